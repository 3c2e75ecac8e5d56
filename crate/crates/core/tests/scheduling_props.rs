mod common;

use common::*;
use proptest::prelude::*;
use rats_core::scheduling::SyllabusEntry;
use rats_core::{ConceptId, Error, Policy, RatId, TopicId};
use std::collections::BTreeSet;

const CONCEPTS: [(&str, &str); 5] = [("t0", "c0"), ("t0", "c1"), ("t1", "c2"), ("t1", "c3"), ("t2", "c4")];

#[derive(Debug, Clone)]
struct RatSpec {
    concepts: u8,
    extra_topics: u8,
    published: bool,
    cross: bool,
    linked: bool,
}

#[derive(Debug, Clone)]
struct Case {
    entries: Vec<(u32, u8, u8)>,
    rats: Vec<RatSpec>,
    date: u32,
}

fn pick<T: Copy>(mask: u8, items: &[T]) -> Vec<T> {
    items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, t)| *t).collect()
}

fn topics_of(spec: &RatSpec) -> BTreeSet<String> {
    let mut topics: BTreeSet<String> = pick(spec.concepts, &CONCEPTS).iter().map(|(t, _)| t.to_string()).collect();
    topics.extend(pick(spec.extra_topics, &["t0", "t1", "t2"]).iter().map(|t| t.to_string()));
    if topics.is_empty() {
        topics.insert("t0".into());
    }
    topics
}

fn case() -> impl Strategy<Value = Case> {
    let entry = (0u32..6, 0u8..8, 0u8..32);
    let rat = (0u8..32, 0u8..8, any::<bool>(), prop::bool::weighted(0.2), prop::bool::weighted(0.8))
        .prop_map(|(concepts, extra_topics, published, cross, linked)| RatSpec { concepts, extra_topics, published, cross, linked });
    (prop::collection::vec(entry, 0..6), prop::collection::vec(rat, 0..12), 0u32..40)
        .prop_map(|(entries, rats, date)| Case { entries, rats, date })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn auto_pool_is_sound_and_complete(case in case()) {
        let mut db = db(Policy::default());
        let dates: Vec<_> = (0..6).map(|i| day(i * 7)).collect();
        let lec = lecture(&mut db, &dates);
        let other = lecture(&mut db, &dates);

        // Later duplicates of a date are dropped: one entry per date.
        let mut used = BTreeSet::new();
        let entries: Vec<SyllabusEntry> = case
            .entries
            .iter()
            .filter(|(d, _, _)| used.insert(*d))
            .map(|&(d, tmask, cmask)| SyllabusEntry {
                date: dates[d as usize],
                topics: pick(tmask, &["t0", "t1", "t2"]).into_iter().map(TopicId::from).collect(),
                concepts: pick(cmask, &CONCEPTS).into_iter().map(|(_, c)| ConceptId::from(c)).collect(),
            })
            .collect();
        db.set_syllabus(&LECTURER, lec, entries.clone()).unwrap();

        let mut ids = Vec::new();
        for spec in &case.rats {
            let topics: Vec<String> = topics_of(spec).into_iter().collect();
            let topic_refs: Vec<&str> = topics.iter().map(String::as_str).collect();
            let concepts: Vec<&str> = pick(spec.concepts, &CONCEPTS).into_iter().map(|(_, c)| c).collect();
            let mut content = mc(&topic_refs, &concepts, &[if spec.linked { lec } else { other }], &[1]);
            content.is_cross_lecture = spec.cross;
            let id = db.create_rat(&AUTHOR, content, now()).unwrap();
            if spec.published {
                db.approve(&REVIEWERS[0], id).unwrap();
                db.approve(&REVIEWERS[1], id).unwrap();
            }
            ids.push(id);
        }

        let date = day(case.date);
        let pool: BTreeSet<RatId> = db.auto_generate_sheet(lec, date).unwrap().into_iter().collect();

        let mut taught_topics = BTreeSet::new();
        let mut taught_concepts = BTreeSet::new();
        for e in &entries {
            if e.date <= date {
                taught_topics.extend(e.topics.iter().map(|t| t.as_str().to_string()));
                taught_concepts.extend(e.concepts.iter().map(|c| c.as_str().to_string()));
            }
        }
        let expected: BTreeSet<RatId> = case
            .rats
            .iter()
            .zip(&ids)
            .filter(|(spec, _)| {
                let concepts: BTreeSet<String> = pick(spec.concepts, &CONCEPTS).iter().map(|(_, c)| c.to_string()).collect();
                spec.published && !spec.cross && spec.linked
                    && topics_of(spec).is_subset(&taught_topics)
                    && concepts.is_subset(&taught_concepts)
            })
            .map(|(_, id)| *id)
            .collect();
        prop_assert_eq!(&pool, &expected);

        for id in &pool {
            let rat = db.rat(*id).unwrap();
            let taught = db.taught_by(lec, date);
            prop_assert!(rat.content.topics.is_subset(&taught.topics));
            prop_assert!(rat.content.concepts.is_subset(&taught.concepts));
        }

        let sheet = db.commit_auto_sheet(&LECTURER, lec, "auto", date, &BTreeSet::new()).unwrap();
        for id in &db.sheet(sheet).unwrap().rats {
            prop_assert!(!db.rat(*id).unwrap().content.is_cross_lecture);
        }
        for (spec, id) in case.rats.iter().zip(&ids) {
            if spec.cross {
                let err = db.create_manual_sheet(&LECTURER, lec, "manual", vec![*id], date).unwrap_err();
                prop_assert!(matches!(err, Error::InvalidMember(bad, _) if bad == *id));
            }
        }
    }
}

#[test]
fn missing_syllabus_is_reported() {
    let mut db = db(Policy::default());
    let lec = lecture(&mut db, &[day(0)]);
    assert!(matches!(db.auto_generate_sheet(lec, day(0)), Err(Error::NoSyllabus)));
}

#[test]
fn concept_taught_later_excludes_rat() {
    let mut db = db(Policy::default());
    let lec = lecture(&mut db, &[day(0), day(7)]);
    db.set_syllabus(
        &LECTURER,
        lec,
        vec![
            SyllabusEntry { date: day(0), topics: set(&["t0".into()]), concepts: set(&["c0".into()]) },
            SyllabusEntry { date: day(7), topics: BTreeSet::new(), concepts: set(&["c1".into()]) },
        ],
    )
    .unwrap();
    let rat = published(&mut db, mc(&["t0"], &["c0", "c1"], &[lec], &[1]));
    assert!(db.auto_generate_sheet(lec, day(3)).unwrap().is_empty());
    assert_eq!(db.auto_generate_sheet(lec, day(7)).unwrap(), vec![rat]);
}

#[test]
fn manual_sheet_keeps_order_and_rejects_drafts() {
    let mut db = db(Policy::default());
    let lec = lecture(&mut db, &[day(0)]);
    let a = published(&mut db, mc(&["t0"], &[], &[lec], &[1]));
    let b = published(&mut db, mc(&["t1"], &[], &[lec], &[2]));
    let draft = db.create_rat(&AUTHOR, mc(&["t0"], &[], &[lec], &[1]), now()).unwrap();
    let sheet = db.create_manual_sheet(&LECTURER, lec, "week 1", vec![b, a], day(0)).unwrap();
    assert_eq!(db.sheet(sheet).unwrap().rats, vec![b, a]);
    assert!(matches!(
        db.create_manual_sheet(&LECTURER, lec, "week 2", vec![draft], day(0)),
        Err(Error::InvalidMember(..))
    ));
    assert!(matches!(
        db.create_manual_sheet(&LECTURER, lec, "week 1", vec![a], day(0)),
        Err(Error::DuplicateName)
    ));
    assert!(matches!(
        db.create_manual_sheet(&student(1), lec, "week 3", vec![a], day(0)),
        Err(Error::Forbidden)
    ));
}

#[test]
fn cross_lecture_pool_rules() {
    let mut db = db(Policy::default());
    let mut content = mc(&["t0"], &[], &[], &[1]);
    content.is_cross_lecture = true;
    let cross = published(&mut db, content);
    assert!(matches!(db.cross_lecture_pool(&LECTURER), Err(Error::Forbidden)));
    let s = student(1);
    assert_eq!(db.cross_lecture_pool(&s).unwrap(), vec![cross]);
    db.answer_cross_lecture(&s, cross, &rats_core::Response::Choice(1.into()), now()).unwrap();
    assert!(db.cross_lecture_pool(&s).unwrap().is_empty());
    assert!(matches!(
        db.answer_cross_lecture(&s, cross, &rats_core::Response::Choice(1.into()), now()),
        Err(Error::AlreadyAnswered)
    ));
}

#[test]
fn join_codes() {
    let mut db = db(Policy::default());
    let lec = lecture(&mut db, &[day(0)]);
    let s = student(1);
    assert!(matches!(db.join_lecture(&s, lec, "wrong"), Err(Error::BadCode)));
    assert!(db.join_lecture(&s, lec, "secret").unwrap());
    assert!(!db.join_lecture(&s, lec, "secret").unwrap());
    assert_eq!(db.lecture(lec).unwrap().members.len(), 1);
}
