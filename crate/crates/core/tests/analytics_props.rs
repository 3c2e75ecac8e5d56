mod common;

use chrono::{DateTime, Duration, TimeZone, Utc};
use common::*;
use num_rational::Ratio;
use proptest::prelude::*;
use rats_core::analytics::lottery_eligible;
use rats_core::model::{Attempt, AttemptContext};
use rats_core::{ContentDb, LectureId, OptionId, Policy, RatId, Response, Verdict};
use std::collections::{BTreeMap, BTreeSet};

fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 4, 1, 8, 0, 0).unwrap()
}

fn brute_lottery(logins: &[DateTime<Utc>]) -> bool {
    let mut v = logins.to_vec();
    v.sort();
    let n = v.len();
    let ok = |a: usize, b: usize| v[b] - v[a] >= Duration::hours(24);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if ok(a, b) && ok(b, c) && ok(c, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn greedy_lottery_matches_exhaustive(minutes in prop::collection::vec(prop_oneof![
        (0i64..8).prop_map(|d| d * 24 * 60),
        0i64..8 * 24 * 60,
    ], 0..=12)) {
        let logins: Vec<_> = minutes.iter().map(|m| t0() + Duration::minutes(*m)).collect();
        prop_assert_eq!(lottery_eligible(&logins), brute_lottery(&logins));
    }
}

#[test]
fn lottery_fixtures() {
    let h = |x: i64| t0() + Duration::hours(x);
    assert!(lottery_eligible(&[h(0), h(24), h(48), h(72)]));
    assert!(!lottery_eligible(&[h(0), h(24), h(48), h(72) - Duration::seconds(1)]));
    assert!(lottery_eligible(&[h(0), h(23), h(25), h(50), h(74), h(100)]));
    // two logins within an hour count once
    assert!(!lottery_eligible(&[h(0), h(0) + Duration::minutes(30), h(24), h(48)]));
}

/// Builds a lecture with `rats` multiple-choice RATs (option 1 correct,
/// options 2 and 3 wrong) and appends the given answers.
fn world(rats: usize, answers: &[(u64, usize, u64, i64, bool)]) -> (ContentDb, LectureId, Vec<RatId>) {
    let mut db = db(Policy::default());
    let lec = lecture(&mut db, &[day(0)]);
    let other = lecture(&mut db, &[day(0)]);
    let ids: Vec<RatId> = (0..rats).map(|_| published(&mut db, mc(&["t0"], &[], &[lec, other], &[1]))).collect();
    for (i, &(student, rat, option, minute, in_lecture)) in answers.iter().enumerate() {
        db.attempts.push(Attempt {
            id: (10_000 + i as u64).into(),
            student: student.into(),
            rat: ids[rat],
            lecture: Some(if in_lecture { lec } else { other }),
            context: AttemptContext::Sheet,
            response: Response::Choice(option.into()),
            verdict: Verdict::from_bool(option == 1),
            submitted_at: t0() + Duration::minutes(minute),
            is_first_for_rat: false,
            counts: Default::default(),
        });
    }
    (db, lec, ids)
}

#[derive(Debug, PartialEq)]
struct Expected {
    always: BTreeSet<RatId>,
    often: BTreeSet<RatId>,
    deceptive: BTreeSet<(RatId, OptionId)>,
    top: BTreeMap<RatId, OptionId>,
}

fn rescan(db: &ContentDb, lec: LectureId, min: u64) -> Expected {
    let mut first: BTreeMap<(rats_core::UserId, RatId), &Attempt> = BTreeMap::new();
    for a in db.attempts.iter().filter(|a| a.lecture == Some(lec)) {
        let slot = first.entry((a.student, a.rat)).or_insert(a);
        if (a.submitted_at, a.id) < (slot.submitted_at, slot.id) {
            *slot = a;
        }
    }
    let mut per_rat: BTreeMap<RatId, Vec<&Attempt>> = BTreeMap::new();
    for ((_, rat), a) in first {
        per_rat.entry(rat).or_default().push(a);
    }
    let mut e = Expected { always: BTreeSet::new(), often: BTreeSet::new(), deceptive: BTreeSet::new(), top: BTreeMap::new() };
    for (rat, list) in per_rat {
        let n = list.len() as u64;
        if n < min {
            continue;
        }
        let correct = list.iter().filter(|a| a.verdict == Verdict::Correct).count() as u64;
        if correct == 0 {
            e.always.insert(rat);
        }
        if Ratio::new(correct, n) < Ratio::new(2, 5) {
            e.often.insert(rat);
        }
        let mut counts: BTreeMap<OptionId, u64> = BTreeMap::new();
        for a in &list {
            if let Response::Choice(o) = a.response {
                *counts.entry(o).or_default() += 1;
            }
        }
        for (&o, &c) in &counts {
            if o != OptionId(1) && Ratio::new(c, n) > Ratio::new(3, 10) {
                e.deceptive.insert((rat, o));
            }
        }
        let best = counts.values().copied().max().unwrap();
        let top = counts.iter().filter(|(_, &c)| c == best).map(|(o, _)| *o).min().unwrap();
        e.top.insert(rat, top);
    }
    e
}

fn observed(db: &ContentDb, lec: LectureId, min: u64) -> Expected {
    let r = db.classify_errors(lec, min);
    Expected {
        always: r.always_incorrect,
        often: r.often_incorrect,
        deceptive: r.deceptive.iter().map(|d| (d.rat, d.option)).collect(),
        top: r.most_frequent_option,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classifier_equals_rescan(
        answers in prop::collection::vec((0u64..12, 0usize..4, 1u64..4, 0i64..100, prop::bool::weighted(0.85)), 0..80),
        min in 1u64..7,
    ) {
        let (db, lec, _) = world(4, &answers);
        prop_assert_eq!(observed(&db, lec, min), rescan(&db, lec, min));
    }
}

/// `n` distinct students; the first `correct` choose option 1, the next
/// `wrong_c` choose option 3, the rest option 2.
fn spread(n: u64, correct: u64, wrong_c: u64) -> Vec<(u64, usize, u64, i64, bool)> {
    (0..n)
        .map(|s| {
            let option = if s < correct { 1 } else if s < correct + wrong_c { 3 } else { 2 };
            (s, 0, option, s as i64, true)
        })
        .collect()
}

#[test]
fn strict_boundaries() {
    let check = |answers: Vec<_>, often: bool, deceptive_c: bool| {
        let (db, lec, ids) = world(1, &answers);
        let r = db.classify_errors(lec, 5);
        assert_eq!(r.often_incorrect.contains(&ids[0]), often, "often");
        assert_eq!(r.deceptive.iter().any(|d| d.option == OptionId(3)), deceptive_c, "deceptive");
    };
    check(spread(10, 4, 0), false, false);
    check(spread(100, 39, 0), true, false);
    check(spread(10, 5, 3), false, false);
    check(spread(100, 50, 31), false, true);
    check(spread(10, 5, 4), false, true);

    let (db, lec, ids) = world(1, &spread(5, 0, 0));
    let r = db.classify_errors(lec, 5);
    assert!(r.always_incorrect.contains(&ids[0]) && r.often_incorrect.contains(&ids[0]));

    // Among wrong answers option 3 would have a share of 1.0; among all
    // answers it is 0.2.
    let (db, lec, _) = world(1, &spread(10, 8, 2));
    assert!(db.classify_errors(lec, 5).deceptive.is_empty());

    // Below the floor nothing is classified.
    let (db, lec, _) = world(1, &spread(4, 0, 0));
    assert!(db.classify_errors(lec, 5).rows.is_empty());
}

#[test]
fn repeat_attempts_do_not_reclassify() {
    let mut answers = spread(5, 0, 0);
    for s in 0..5 {
        answers.push((s, 0, 1, 1000, true));
    }
    let (db, lec, ids) = world(1, &answers);
    assert!(db.classify_errors(lec, 5).always_incorrect.contains(&ids[0]));
    assert_eq!(db.student_stats(0.into(), Some(lec)).total, 2);
}
