//! Full analysis of a response set.

use crate::questionnaire::{category_score, confirmation_rate, encode_frequency, Category, ConfirmationRate, SurveyResponse};
use crate::stats::{complete_pairs, mediation, moderation, regress, MediationResult, ModerationResult, RegressionResult};
use crate::SurveyError;
use serde::{Deserialize, Serialize};

/// A computed value or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Failed { error: String },
}

impl<T> From<Result<T, SurveyError>> for Outcome<T> {
    fn from(r: Result<T, SurveyError>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Failed { error: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
    pub confirmation: ConfirmationRate,
}

fn descriptives(responses: &[&SurveyResponse], category: Category) -> Descriptives {
    let def = category.def();
    let mut scores: Vec<f64> = responses.iter().filter_map(|r| category_score(r, &def)).collect();
    scores.sort_by(f64::total_cmp);
    let n = scores.len();
    let mean = (n > 0).then(|| scores.iter().sum::<f64>() / n as f64);
    let sd = mean.filter(|_| n > 1).map(|m| {
        (scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (n - 1) as f64).sqrt()
    });
    let median = (n > 0).then(|| {
        if n % 2 == 1 {
            scores[n / 2]
        } else {
            (scores[n / 2 - 1] + scores[n / 2]) / 2.0
        }
    });
    Descriptives {
        n,
        mean,
        sd,
        median,
        confirmation: confirmation_rate(responses.iter().copied(), &def),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub category: Category,
    pub all: Descriptives,
    pub users: Descriptives,
    pub non_users: Descriptives,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRegression {
    pub x: Category,
    pub y: Category,
    pub result: Outcome<RegressionResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub respondents: usize,
    pub users: usize,
    pub frequency_counts: [usize; 7],
    pub categories: Vec<CategorySummary>,
    pub pairwise: Vec<PairRegression>,
    /// Intention to use (x) against the 1..7 frequency code (y), users only.
    pub intention_frequency: Outcome<RegressionResult>,
    /// Ease of use, mediated by usefulness, on intention to use.
    pub ease_usefulness_intention: Outcome<MediationResult>,
    /// Relevance on usefulness, moderated by output quality.
    pub relevance_quality_usefulness: Outcome<ModerationResult>,
}

fn scores(responses: &[SurveyResponse], c: Category) -> Vec<Option<f64>> {
    let def = c.def();
    responses.iter().map(|r| category_score(r, &def)).collect()
}

fn complete_triples(a: &[Option<f64>], b: &[Option<f64>], c: &[Option<f64>]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut out = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..a.len() {
        if let (Some(x), Some(y), Some(z)) = (a[i], b[i], c[i]) {
            out.0.push(x);
            out.1.push(y);
            out.2.push(z);
        }
    }
    out
}

pub fn analyze(responses: &[SurveyResponse]) -> SurveyReport {
    let users: Vec<&SurveyResponse> = responses.iter().filter(|r| r.is_user).collect();
    let non_users: Vec<&SurveyResponse> = responses.iter().filter(|r| !r.is_user).collect();
    let all: Vec<&SurveyResponse> = responses.iter().collect();

    let mut frequency_counts = [0; 7];
    for r in &users {
        if let Ok(code) = encode_frequency(r.frequency) {
            frequency_counts[usize::from(code) - 1] += 1;
        }
    }

    let categories = Category::ALL
        .iter()
        .map(|&c| CategorySummary {
            category: c,
            all: descriptives(&all, c),
            users: descriptives(&users, c),
            non_users: descriptives(&non_users, c),
        })
        .collect();

    let mut pairwise = Vec::new();
    for &x in &Category::ALL {
        for &y in &Category::ALL {
            if x != y {
                let (xs, ys) = complete_pairs(&scores(responses, x), &scores(responses, y));
                pairwise.push(PairRegression { x, y, result: regress(&xs, &ys).into() });
            }
        }
    }

    let user_rows: Vec<SurveyResponse> = users.iter().map(|r| (*r).clone()).collect();
    let freq: Vec<Option<f64>> = user_rows
        .iter()
        .map(|r| encode_frequency(r.frequency).ok().map(f64::from))
        .collect();
    let (ix, fy) = complete_pairs(&scores(&user_rows, Category::IntentionToUse), &freq);

    let (ex, um, iy) = complete_triples(
        &scores(responses, Category::PerceivedEaseOfUse),
        &scores(responses, Category::PerceivedUsefulness),
        &scores(responses, Category::IntentionToUse),
    );
    let (rx, qw, uy) = complete_triples(
        &scores(responses, Category::RelevanceToStudy),
        &scores(responses, Category::OutputQuality),
        &scores(responses, Category::PerceivedUsefulness),
    );

    SurveyReport {
        respondents: responses.len(),
        users: users.len(),
        frequency_counts,
        categories,
        pairwise,
        intention_frequency: regress(&ix, &fy).into(),
        ease_usefulness_intention: mediation(&ex, &um, &iy).into(),
        relevance_quality_usefulness: moderation(&rx, &qw, &uy).into(),
    }
}
