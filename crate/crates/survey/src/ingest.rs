//! CSV ingestion of questionnaire exports.

use crate::questionnaire::{all_items, SurveyResponse, Usage};
use crate::SurveyError;
use std::io::Read;

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "y" | "1" | "ja" => Some(true),
        "false" | "no" | "n" | "0" | "nein" => Some(false),
        _ => None,
    }
}

/// Reads one response per row. Item columns are named by item id (`IU1`,
/// `OQ3`, ...); `frequency` holds a level name or its 1..7 code, or
/// `never`; columns starting with `comment` are kept as free text. Empty
/// cells are missing answers.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SurveyResponse>, SurveyError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let items = all_items();
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let mut r = SurveyResponse {
            respondent: (row + 1).to_string(),
            ..SurveyResponse::default()
        };
        let mut is_user = None;
        let mut never = false;
        for (header, cell) in headers.iter().zip(record.iter()) {
            if cell.is_empty() {
                continue;
            }
            match header {
                "respondent" => r.respondent = cell.to_owned(),
                "is_user" => {
                    is_user = Some(parse_bool(cell).ok_or_else(|| SurveyError::Row {
                        line,
                        message: format!("is_user: cannot parse {cell:?}"),
                    })?)
                }
                "frequency" => match cell.parse::<Usage>() {
                    Ok(Usage::Never) => never = true,
                    Ok(Usage::Uses(f)) => r.frequency = Some(f),
                    Err(e) => return Err(SurveyError::Row { line, message: e.to_string() }),
                },
                "age" => {
                    r.age = Some(cell.parse().map_err(|_| SurveyError::Row {
                        line,
                        message: format!("age: cannot parse {cell:?}"),
                    })?)
                }
                "gender" => r.gender = Some(cell.to_owned()),
                "lectures" => {
                    r.lectures = cell.split(';').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect()
                }
                h if h.starts_with("comment") => {
                    r.free_text.insert(h.to_owned(), cell.to_owned());
                }
                h if items.iter().any(|i| i == h) => {
                    let value: i64 = cell.parse().map_err(|_| SurveyError::Row {
                        line,
                        message: format!("{h}: cannot parse {cell:?}"),
                    })?;
                    if !(1..=7).contains(&value) {
                        return Err(SurveyError::Row {
                            line,
                            message: SurveyError::LikertOutOfRange { item: h.to_owned(), value }.to_string(),
                        });
                    }
                    r.likert.insert(h.to_owned(), value as u8);
                }
                _ => {}
            }
        }
        // Respondents who never used the system are non-users even when
        // they hold an account.
        r.is_user = !never && is_user.unwrap_or(r.frequency.is_some());
        out.push(r);
    }
    Ok(out)
}
