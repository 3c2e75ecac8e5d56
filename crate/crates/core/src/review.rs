//! RAT and scaffold lifecycle: authoring, the N-expert approval state
//! machine, revision, search and threaded review comments.

use crate::db::ContentDb;
use crate::ids::{ConceptId, LectureId, RatId, ScaffoldId, TopicId, UserId};
use crate::model::{validate_rat, Actor, PublicationState, Rat, RatContent, ReviewStage, Role};
use crate::{Error, Result};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewComment {
    pub author: UserId,
    pub body: String,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewThread {
    pub rat: RatId,
    pub comments: Vec<ReviewComment>,
    pub subscribers: BTreeSet<UserId>,
}

/// Result of one approval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApprovalOutcome {
    pub state: ReviewStage,
    pub approvals: usize,
    /// This approval moved the RAT to `Published`.
    pub published_now: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaffoldState {
    Pending,
    Visible,
}

/// Exact-match filters, combined by conjunction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFilter {
    pub author: Option<UserId>,
    pub lecture: Option<LectureId>,
    pub topic: Option<TopicId>,
    pub concept: Option<ConceptId>,
}

impl RatFilter {
    pub fn matches(&self, rat: &Rat) -> bool {
        let c = &rat.content;
        self.author.is_none_or(|a| rat.author == a)
            && self.lecture.is_none_or(|l| c.lectures.contains(&l))
            && self.topic.as_ref().is_none_or(|t| c.topics.contains(t))
            && self.concept.as_ref().is_none_or(|k| c.concepts.contains(k))
    }
}

/// Whether a role may read a RAT in the given stage. Students only see
/// published items; authoring roles see everything.
pub fn visible_to(role: Role, stage: ReviewStage) -> bool {
    role >= Role::RatCreator || stage == ReviewStage::Published
}

impl ContentDb {
    pub fn create_rat(&mut self, actor: &Actor, content: RatContent, now: DateTime<Utc>) -> Result<RatId> {
        actor.require(Role::RatCreator)?;
        self.check_content(&content)?;
        let id = self.alloc();
        self.rats.insert(
            id,
            Rat {
                id,
                content,
                author: actor.id,
                state: PublicationState::draft(),
                created_at: now,
            },
        );
        self.threads.insert(
            id,
            ReviewThread {
                rat: id,
                comments: Vec::new(),
                subscribers: [actor.id].into(),
            },
        );
        Ok(id)
    }

    fn check_content(&self, content: &RatContent) -> Result<()> {
        let violations = validate_rat(content, &self.taxonomy, &self.catalog);
        if !violations.is_empty() {
            return Err(Error::ValidationFailed(violations));
        }
        for lecture in &content.lectures {
            self.lecture(*lecture)?;
        }
        Ok(())
    }

    pub fn approve(&mut self, actor: &Actor, rat_id: RatId) -> Result<ApprovalOutcome> {
        actor.require(Role::RatCreator)?;
        let threshold = self.policy.rat_approval_threshold;
        let rat = self.rats.get_mut(&rat_id).ok_or(Error::NotFound("RAT"))?;
        if rat.author == actor.id {
            return Err(Error::SelfApproval);
        }
        if !matches!(rat.state.value, ReviewStage::Draft | ReviewStage::InReview) {
            return Err(Error::NotReviewable);
        }
        if !rat.state.approvals.insert(actor.id) {
            return Err(Error::DuplicateApproval);
        }
        let published_now = rat.state.approvals.len() >= threshold;
        rat.state.value = if published_now {
            ReviewStage::Published
        } else {
            ReviewStage::InReview
        };
        Ok(ApprovalOutcome {
            state: rat.state.value,
            approvals: rat.state.approvals.len(),
            published_now,
        })
    }

    /// Visible scaffolds absorb further approvals without change.
    pub fn approve_scaffold(&mut self, actor: &Actor, scaffold: ScaffoldId) -> Result<ScaffoldState> {
        actor.require(Role::RatCreator)?;
        let threshold = self.policy.scaffold_approval_threshold;
        let s = self
            .scaffolds
            .get_mut(&scaffold)
            .ok_or(Error::NotFound("scaffold"))?;
        if s.suggested_by == actor.id {
            return Err(Error::SelfApproval);
        }
        if s.is_visible(threshold) {
            return Ok(ScaffoldState::Visible);
        }
        if !s.approvals.insert(actor.id) {
            return Err(Error::DuplicateApproval);
        }
        Ok(if s.is_visible(threshold) {
            ScaffoldState::Visible
        } else {
            ScaffoldState::Pending
        })
    }

    /// Appends a review comment and notifies every other subscriber.
    /// Returns the number of notifications produced.
    pub fn comment(&mut self, actor: &Actor, rat_id: RatId, body: &str, now: DateTime<Utc>) -> Result<usize> {
        let author = self.rat(rat_id)?.author;
        if actor.role < Role::RatCreator && actor.id != author {
            return Err(Error::Forbidden);
        }
        if body.trim().is_empty() {
            return Err(Error::EmptyBody);
        }
        let thread = self.threads.entry(rat_id).or_insert_with(|| ReviewThread {
            rat: rat_id,
            comments: Vec::new(),
            subscribers: [author].into(),
        });
        thread.subscribers.insert(author);
        thread.comments.push(ReviewComment {
            author: actor.id,
            body: body.to_owned(),
            at: now,
        });
        let recipients: Vec<UserId> = thread
            .subscribers
            .iter()
            .copied()
            .filter(|&u| u != actor.id)
            .collect();
        thread.subscribers.insert(actor.id);
        for &to in &recipients {
            self.notify(
                to,
                format!("New review comment on RAT {rat_id}"),
                format!("RAT {rat_id}\n\n{body}"),
                now,
            );
        }
        Ok(recipients.len())
    }

    fn require_editor(&self, actor: &Actor, rat_id: RatId) -> Result<&Rat> {
        let rat = self.rat(rat_id)?;
        if rat.author == actor.id && actor.role >= Role::RatCreator || actor.role >= Role::Lecturer {
            Ok(rat)
        } else {
            Err(Error::Forbidden)
        }
    }

    /// Replaces the content. Any approvals are void afterwards: a published
    /// or in-review item goes back to review.
    pub fn edit_rat(&mut self, actor: &Actor, rat_id: RatId, content: RatContent) -> Result<ReviewStage> {
        let stage = self.require_editor(actor, rat_id)?.state.value;
        if stage == ReviewStage::Retired {
            return Err(Error::NotReviewable);
        }
        self.check_content(&content)?;
        let rat = self.rats.get_mut(&rat_id).expect("checked above");
        rat.content = content;
        rat.state.approvals.clear();
        if stage != ReviewStage::Draft {
            rat.state.value = ReviewStage::InReview;
        }
        Ok(rat.state.value)
    }

    pub fn duplicate_rat(&mut self, actor: &Actor, rat_id: RatId, now: DateTime<Utc>) -> Result<RatId> {
        let content = self.require_editor(actor, rat_id)?.content.clone();
        self.create_rat(actor, content, now)
    }

    /// Soft delete: the RAT is retired so attempt history stays intact.
    pub fn delete_rat(&mut self, actor: &Actor, rat_id: RatId) -> Result<()> {
        self.require_editor(actor, rat_id)?;
        let rat = self.rats.get_mut(&rat_id).expect("checked above");
        rat.state.value = ReviewStage::Retired;
        Ok(())
    }

    /// Non-retired RATs matching every given filter, ordered by id.
    pub fn search_rats(&self, actor: &Actor, filter: &RatFilter) -> Result<Vec<&Rat>> {
        actor.require(Role::RatCreator)?;
        Ok(self
            .rats
            .values()
            .filter(|r| r.state.value != ReviewStage::Retired && filter.matches(r))
            .collect())
    }

    pub fn rat_visible_to(&self, actor: &Actor, rat_id: RatId) -> bool {
        self.rats
            .get(&rat_id)
            .is_some_and(|r| visible_to(actor.role, r.state.value))
    }

    /// Reads a RAT as the actor may see it; hidden items look missing.
    pub fn rat_for(&self, actor: &Actor, rat_id: RatId) -> Result<&Rat> {
        if self.rat_visible_to(actor, rat_id) {
            self.rat(rat_id)
        } else {
            Err(Error::NotFound("RAT"))
        }
    }

    pub fn thread(&self, actor: &Actor, rat_id: RatId) -> Result<&ReviewThread> {
        let author = self.rat(rat_id)?.author;
        if actor.role < Role::RatCreator && actor.id != author {
            return Err(Error::Forbidden);
        }
        self.threads.get(&rat_id).ok_or(Error::NotFound("thread"))
    }
}
