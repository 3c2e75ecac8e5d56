//! Live sheet runs with concurrent tallies.

use crate::ids::{LectureId, LiveSessionId, RatId, SheetId, UserId};
use crate::model::{Response, Verdict};
use crate::{Error, Result};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiveState {
    Open,
    Closed,
}

/// Tally bucket of an answer: the chosen option for multiple choice, the
/// verdict otherwise.
pub fn tally_key(response: &Response, verdict: Verdict) -> String {
    match (response, verdict) {
        (Response::Choice(option), _) => option.to_string(),
        (_, Verdict::Correct) => "correct".into(),
        (_, Verdict::Incorrect) => "incorrect".into(),
        (_, Verdict::Ungraded) => "ungraded".into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatTally {
    pub tally: BTreeMap<String, u64>,
    pub correct: u64,
    pub graded: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct LiveInner {
    state: LiveState,
    tallies: BTreeMap<RatId, RatTally>,
    answered: BTreeSet<(UserId, RatId)>,
    participants: BTreeSet<UserId>,
    version: u64,
}

/// A live run. Clones share the same tallies, so a handle can be read
/// without holding the content store.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "LiveSnapshot", from = "LiveSnapshot")]
pub struct LiveSession {
    pub id: LiveSessionId,
    pub sheet: SheetId,
    pub lecture: LectureId,
    pub rats: Vec<RatId>,
    inner: Arc<Mutex<LiveInner>>,
}

#[derive(Serialize, Deserialize)]
struct LiveSnapshot {
    id: LiveSessionId,
    sheet: SheetId,
    lecture: LectureId,
    rats: Vec<RatId>,
    inner: LiveInner,
}

impl From<LiveSession> for LiveSnapshot {
    fn from(s: LiveSession) -> Self {
        let inner = s.inner.lock().clone();
        LiveSnapshot {
            id: s.id,
            sheet: s.sheet,
            lecture: s.lecture,
            rats: s.rats,
            inner,
        }
    }
}

impl From<LiveSnapshot> for LiveSession {
    fn from(s: LiveSnapshot) -> Self {
        LiveSession {
            id: s.id,
            sheet: s.sheet,
            lecture: s.lecture,
            rats: s.rats,
            inner: Arc::new(Mutex::new(s.inner)),
        }
    }
}

impl LiveSession {
    pub fn new(id: LiveSessionId, sheet: SheetId, lecture: LectureId, rats: Vec<RatId>) -> Self {
        let tallies = rats.iter().map(|&r| (r, RatTally::default())).collect();
        LiveSession {
            id,
            sheet,
            lecture,
            rats,
            inner: Arc::new(Mutex::new(LiveInner {
                state: LiveState::Open,
                tallies,
                answered: BTreeSet::new(),
                participants: BTreeSet::new(),
                version: 0,
            })),
        }
    }

    pub fn state(&self) -> LiveState {
        self.inner.lock().state
    }

    pub fn is_open(&self) -> bool {
        self.state() == LiveState::Open
    }

    /// Bumped on every tally change and on close.
    pub fn version(&self) -> u64 {
        self.inner.lock().version
    }

    pub fn participants(&self) -> BTreeSet<UserId> {
        self.inner.lock().participants.clone()
    }

    /// Checks whether `record` would accept the answer.
    pub fn check(&self, student: UserId, rat: RatId) -> Result<()> {
        let inner = self.inner.lock();
        Self::check_locked(&inner, student, rat)
    }

    fn check_locked(inner: &LiveInner, student: UserId, rat: RatId) -> Result<()> {
        if inner.state == LiveState::Closed {
            return Err(Error::SessionClosed);
        }
        if !inner.tallies.contains_key(&rat) {
            return Err(Error::NotFound("RAT in live session"));
        }
        if inner.answered.contains(&(student, rat)) {
            return Err(Error::AlreadyAnswered);
        }
        Ok(())
    }

    /// Tallies one answer atomically.
    pub fn record(&self, student: UserId, rat: RatId, key: String, verdict: Verdict) -> Result<()> {
        let mut inner = self.inner.lock();
        Self::check_locked(&inner, student, rat)?;
        inner.answered.insert((student, rat));
        inner.participants.insert(student);
        let t = inner.tallies.get_mut(&rat).expect("checked above");
        *t.tally.entry(key).or_default() += 1;
        t.n += 1;
        if verdict.is_graded() {
            t.graded += 1;
        }
        if verdict == Verdict::Correct {
            t.correct += 1;
        }
        inner.version += 1;
        Ok(())
    }

    /// Freezes the tallies. Closing twice is harmless.
    pub fn close(&self) {
        let mut inner = self.inner.lock();
        if inner.state == LiveState::Open {
            inner.state = LiveState::Closed;
            inner.version += 1;
        }
    }

    pub fn stats(&self) -> LiveStats {
        let inner = self.inner.lock();
        let per_rat: Vec<RatStats> = self
            .rats
            .iter()
            .map(|rat| {
                let t = &inner.tallies[rat];
                RatStats {
                    rat: *rat,
                    tally: t.tally.clone(),
                    correct_fraction: fraction(t.correct, t.graded),
                    n: t.n,
                }
            })
            .collect();
        let (correct, graded, n) = inner
            .tallies
            .values()
            .fold((0, 0, 0), |(c, g, n), t| (c + t.correct, g + t.graded, n + t.n));
        LiveStats {
            kind: "stats".into(),
            session: self.id,
            state: inner.state,
            per_rat,
            sheet: SheetStats {
                n_answers: n,
                correct_fraction: fraction(correct, graded),
            },
        }
    }
}

fn fraction(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatStats {
    pub rat: RatId,
    pub tally: BTreeMap<String, u64>,
    pub correct_fraction: Option<f64>,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetStats {
    pub n_answers: u64,
    pub correct_fraction: Option<f64>,
}

/// Server-to-lecturer message on the live channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveStats {
    #[serde(rename = "type")]
    pub kind: String,
    pub session: LiveSessionId,
    pub state: LiveState,
    pub per_rat: Vec<RatStats>,
    pub sheet: SheetStats,
}
