//! Questionnaire structure: usage frequency, Likert categories and
//! per-respondent scores.

use crate::SurveyError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Self-reported usage frequency, most frequent first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Frequency {
    Daily,
    SeveralTimesAWeek,
    Weekly,
    TwiceAMonth,
    Monthly,
    SeveralTimesASemester,
    OncePerSemester,
}

impl Frequency {
    pub const ALL: [Frequency; 7] = [
        Frequency::Daily,
        Frequency::SeveralTimesAWeek,
        Frequency::Weekly,
        Frequency::TwiceAMonth,
        Frequency::Monthly,
        Frequency::SeveralTimesASemester,
        Frequency::OncePerSemester,
    ];

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }
}

/// 1 for daily up to 7 for once per semester.
pub fn encode_frequency(level: Option<Frequency>) -> Result<u8, SurveyError> {
    let level = level.ok_or(SurveyError::Missing)?;
    Ok(Frequency::ALL.iter().position(|f| *f == level).unwrap() as u8 + 1)
}

/// Parsed usage answer; `Never` marks a non-user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Usage {
    Never,
    Uses(Frequency),
}

impl FromStr for Usage {
    type Err = SurveyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if let Ok(code) = key.parse::<u8>() {
            return Frequency::from_code(code)
                .map(Usage::Uses)
                .ok_or_else(|| SurveyError::UnknownFrequency(s.to_owned()));
        }
        let f = match key.as_str() {
            "never" | "0" => return Ok(Usage::Never),
            "daily" => Frequency::Daily,
            "severaltimesaweek" => Frequency::SeveralTimesAWeek,
            "weekly" | "onceaweek" => Frequency::Weekly,
            "twiceamonth" => Frequency::TwiceAMonth,
            "monthly" | "onceamonth" => Frequency::Monthly,
            "severaltimesasemester" => Frequency::SeveralTimesASemester,
            "oncepersemester" | "onceasemester" => Frequency::OncePerSemester,
            _ => return Err(SurveyError::UnknownFrequency(s.to_owned())),
        };
        Ok(Usage::Uses(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    IntentionToUse,
    OutputQuality,
    RelevanceToStudy,
    PerceivedEaseOfUse,
    PerceivedUsefulness,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::IntentionToUse,
        Category::OutputQuality,
        Category::RelevanceToStudy,
        Category::PerceivedEaseOfUse,
        Category::PerceivedUsefulness,
    ];

    fn prefix(self) -> &'static str {
        match self {
            Category::IntentionToUse => "IU",
            Category::OutputQuality => "OQ",
            Category::RelevanceToStudy => "RS",
            Category::PerceivedEaseOfUse => "PEOU",
            Category::PerceivedUsefulness => "PU",
        }
    }

    fn size(self) -> usize {
        match self {
            Category::IntentionToUse => 2,
            Category::OutputQuality => 6,
            Category::RelevanceToStudy => 2,
            Category::PerceivedEaseOfUse => 4,
            Category::PerceivedUsefulness => 4,
        }
    }

    pub fn def(self) -> CategoryDef {
        CategoryDef {
            name: self,
            items: (1..=self.size()).map(|i| format!("{}{}", self.prefix(), i)).collect(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDef {
    pub name: Category,
    pub items: Vec<String>,
}

/// Every Likert item id in questionnaire order.
pub fn all_items() -> Vec<String> {
    Category::ALL.iter().flat_map(|c| c.def().items).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub respondent: String,
    pub is_user: bool,
    pub frequency: Option<Frequency>,
    /// Answered items only; values are 1..=7.
    pub likert: BTreeMap<String, u8>,
    pub age: Option<u32>,
    pub gender: Option<String>,
    pub lectures: Vec<String>,
    pub free_text: BTreeMap<String, String>,
}

impl SurveyResponse {
    pub fn set_likert(&mut self, item: &str, value: u8) -> Result<(), SurveyError> {
        if !(1..=7).contains(&value) {
            return Err(SurveyError::LikertOutOfRange {
                item: item.to_owned(),
                value: i64::from(value),
            });
        }
        self.likert.insert(item.to_owned(), value);
        Ok(())
    }
}

/// Mean over the answered items of the category; `None` if none answered.
pub fn category_score(response: &SurveyResponse, category: &CategoryDef) -> Option<f64> {
    let answered: Vec<u8> = category
        .items
        .iter()
        .filter_map(|item| response.likert.get(item).copied())
        .collect();
    if answered.is_empty() {
        return None;
    }
    let sum: u32 = answered.iter().map(|&v| u32::from(v)).sum();
    Some(f64::from(sum) / answered.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfirmationRate {
    pub confirmed: usize,
    pub answered: usize,
    /// `None` when nobody answered the category.
    pub rate: Option<f64>,
}

/// Share of respondents whose category score is 5 or higher.
pub fn confirmation_rate<'a>(
    responses: impl IntoIterator<Item = &'a SurveyResponse>,
    category: &CategoryDef,
) -> ConfirmationRate {
    let scores: Vec<f64> = responses
        .into_iter()
        .filter_map(|r| category_score(r, category))
        .collect();
    let confirmed = scores.iter().filter(|&&s| s >= 5.0).count();
    ConfirmationRate {
        confirmed,
        answered: scores.len(),
        rate: (!scores.is_empty()).then(|| confirmed as f64 / scores.len() as f64),
    }
}
