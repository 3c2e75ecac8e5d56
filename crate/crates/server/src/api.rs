//! HTTP routes. Handlers translate between JSON and the domain model; all
//! rules live in `rats_core`.

use crate::auth::{self, Auth, LogSubject};
use crate::error::{ApiError, ApiResult};
use crate::extract::{ApiJson, ApiPath, ApiQuery};
use crate::state::AppState;
use crate::store::LOGIN_ACTION;
use crate::views::{rat_view, LectureView, SessionView, StudentRat};
use crate::ws;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{middleware, Json, Router};
use chrono::{NaiveDate, TimeZone, Utc};
use rats_core::analytics::lottery_eligible;
use rats_core::assessment::{GradedResult, NoteKind};
use rats_core::competence::competence_report;
use rats_core::model::{RichText, ScaffoldKind};
use rats_core::review::RatFilter;
use rats_core::scheduling::{LectureDraft, SyllabusEntry};
use rats_core::{
    AttemptId, ConceptId, Error, LectureId, LiveSessionId, RatContent, RatId, Response as Answer, Role,
    ScaffoldId, SessionId, SheetId, TopicId, UserId,
};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/auth/signup", post(auth::signup))
        .route("/auth/verify", post(auth::verify))
        .route("/auth/login", post(auth::login))
        .route("/auth/password", post(auth::change_password))
        .route("/me", get(auth::me).delete(auth::delete_me))
        .route("/me/stats", get(my_stats))
        .route("/me/competence", get(my_competence))
        .route("/me/preferences", get(get_preferences).put(put_preferences))
        .route("/catalog", get(catalog))
        .route("/taxonomy", get(taxonomy).put(put_taxonomy))
        .route("/lectures", get(list_lectures).post(create_lecture))
        .route("/lectures/{id}", get(get_lecture))
        .route("/lectures/{id}/join", post(join_lecture))
        .route("/lectures/{id}/syllabus", get(get_syllabus).put(put_syllabus))
        .route("/lectures/{id}/rats", get(lecture_rats))
        .route("/lectures/{id}/pool", get(lecture_pool))
        .route("/lectures/{id}/sessions", post(begin_auto_session))
        .route("/lectures/{id}/sheets", get(list_sheets).post(create_manual_sheet))
        .route("/lectures/{id}/sheets/auto", post(create_auto_sheet))
        .route("/lectures/{id}/dashboard", get(dashboard))
        .route("/lectures/{id}/ungraded", get(ungraded))
        .route("/attempts/{id}/grade", post(grade_attempt))
        .route("/sheets/{id}/sessions", post(begin_sheet_session))
        .route("/sheets/{id}/live", post(open_live))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/answers", post(submit_answer))
        .route("/rats", get(search_rats).post(create_rat))
        .route("/rats/{id}", get(get_rat).put(edit_rat).delete(delete_rat))
        .route("/rats/{id}/duplicate", post(duplicate_rat))
        .route("/rats/{id}/approvals", post(approve_rat))
        .route("/rats/{id}/scaffolds", get(scaffolds))
        .route("/rats/{id}/scaffold-suggestions", post(suggest_scaffold))
        .route("/rats/{id}/comments", get(comments).post(comment))
        .route("/rats/{id}/error-reports", post(error_report))
        .route("/rats/{id}/stats", get(rat_stats))
        .route("/scaffolds/{id}/rating", post(rate_scaffold))
        .route("/scaffolds/{id}/approvals", post(approve_scaffold))
        .route("/live/{session}", get(ws::upgrade))
        .route("/live/{session}/answers", post(live_answer))
        .route("/live/{session}/stats", get(live_stats))
        .route("/live/{session}/close", post(close_live))
        .route("/cross-lecture/next", get(cross_lecture_next))
        .route("/cross-lecture/answers", post(cross_lecture_answer))
        .route("/admin/stats", get(admin_stats))
        .route("/admin/users/{id}/role", put(set_role))
        .route("/admin/log", get(admin_log))
        .route("/admin/lottery", get(lottery))
        .route_layer(middleware::from_fn_with_state(state.clone(), auth::log_mutations))
        .fallback(|| async { ApiError::Core(Error::NotFound("route")) })
        .with_state(state)
}

fn created(id: impl std::fmt::Display + serde::Serialize, extra: Value) -> Response {
    let mut body = json!({ "id": id });
    if let (Some(b), Some(e)) = (body.as_object_mut(), extra.as_object()) {
        b.extend(e.clone());
    }
    let mut response = (StatusCode::CREATED, Json(body)).into_response();
    response.extensions_mut().insert(LogSubject(id.to_string()));
    response
}

fn to_json<T: serde::Serialize>(v: T) -> ApiResult<Json<Value>> {
    Ok(Json(serde_json::to_value(v).map_err(|e| ApiError::Internal(e.into()))?))
}

// ---- me

#[derive(Debug, Deserialize)]
struct LectureScope {
    lecture: Option<LectureId>,
}

async fn my_stats(State(s): State<AppState>, Auth(a): Auth, ApiQuery(q): ApiQuery<LectureScope>) -> ApiResult<Json<Value>> {
    to_json(s.db.read().student_stats(a.id, q.lecture))
}

async fn my_competence(State(s): State<AppState>, Auth(a): Auth, ApiQuery(q): ApiQuery<LectureScope>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    let report = competence_report(a.id, q.lecture, &db.attempts);
    to_json(json!({
        "student": a.id,
        "lecture": q.lecture,
        "levels": report.levels,
        "series": report.series,
        "current_score": report.profile.current_score,
        "max_score": report.profile.max_score,
    }))
}

async fn get_preferences(State(s): State<AppState>, Auth(a): Auth) -> ApiResult<Json<Value>> {
    Ok(Json(s.db.read().preferences.get(&a.id).cloned().unwrap_or_else(|| json!({}))))
}

async fn put_preferences(State(s): State<AppState>, Auth(a): Auth, ApiJson(v): ApiJson<Value>) -> ApiResult<Json<Value>> {
    if !v.is_object() {
        return Err(ApiError::BadRequest("preferences must be a JSON object".into()));
    }
    s.write(|db| {
        db.preferences.insert(a.id, v.clone());
        Ok(())
    })?;
    Ok(Json(v))
}

// ---- reference data

async fn catalog(State(s): State<AppState>, Auth(_): Auth) -> ApiResult<Json<Value>> {
    to_json(&s.db.read().catalog)
}

async fn taxonomy(State(s): State<AppState>, Auth(_): Auth) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    let mut topics: BTreeMap<&TopicId, Vec<&ConceptId>> = BTreeMap::new();
    for (concept, topic) in &db.taxonomy.concepts {
        topics.entry(topic).or_default().push(concept);
    }
    to_json(json!({ "topics": topics }))
}

#[derive(Debug, Deserialize)]
struct TaxonomyBody {
    /// topic -> concepts; merged into the existing taxonomy
    topics: BTreeMap<TopicId, Vec<ConceptId>>,
}

async fn put_taxonomy(State(s): State<AppState>, Auth(a): Auth, ApiJson(b): ApiJson<TaxonomyBody>) -> ApiResult<StatusCode> {
    s.write(|db| {
        a.require(Role::Lecturer)?;
        for (topic, concepts) in &b.topics {
            for c in concepts {
                db.taxonomy.add_concept(topic.clone(), c.clone());
            }
        }
        Ok(())
    })?;
    Ok(StatusCode::NO_CONTENT)
}

// ---- lectures

async fn list_lectures(State(s): State<AppState>, Auth(a): Auth) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    to_json(db.lectures.values().map(|l| LectureView::new(l, &a)).collect::<Vec<_>>())
}

async fn create_lecture(State(s): State<AppState>, Auth(a): Auth, ApiJson(d): ApiJson<LectureDraft>) -> ApiResult<Response> {
    let id = s.write(|db| db.create_lecture(&a, d))?;
    Ok(created(id, json!({})))
}

async fn get_lecture(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LectureId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    to_json(LectureView::new(db.lecture(id)?, &a))
}

#[derive(Debug, Deserialize)]
struct JoinBody {
    code: String,
}

async fn join_lecture(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiJson(b): ApiJson<JoinBody>,
) -> ApiResult<Json<Value>> {
    let joined = s.write(|db| db.join_lecture(&a, id, &b.code))?;
    Ok(Json(json!({ "lecture": id, "joined": joined })))
}

async fn get_syllabus(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LectureId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    db.require_member(&a, id)?;
    let entries: Vec<&SyllabusEntry> = db.syllabi.get(&id).map(|s| s.entries.values().collect()).unwrap_or_default();
    to_json(json!({ "entries": entries }))
}

#[derive(Debug, Deserialize)]
struct SyllabusBody {
    entries: Vec<SyllabusEntry>,
}

async fn put_syllabus(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiJson(b): ApiJson<SyllabusBody>,
) -> ApiResult<StatusCode> {
    s.write(|db| db.set_syllabus(&a, id, b.entries))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
struct TopicQuery {
    /// comma separated
    topic: Option<String>,
}

fn topics(q: &TopicQuery) -> BTreeSet<TopicId> {
    q.topic
        .as_deref()
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(TopicId::new)
        .collect()
}

/// The automatically selected RATs available right now.
async fn lecture_rats(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiQuery(q): ApiQuery<TopicQuery>,
) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    db.require_member(&a, id)?;
    let ids = db.auto_selection(id, s.now().date_naive(), &topics(&q))?;
    to_json(ids.iter().map(|r| StudentRat::from(&db.rats[r])).collect::<Vec<_>>())
}

#[derive(Debug, Deserialize)]
struct DateQuery {
    date: Option<NaiveDate>,
}

/// Preview of the automatic pool, for pruning before commit.
async fn lecture_pool(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiQuery(q): ApiQuery<DateQuery>,
) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    db.require_owner(&a, id)?;
    let date = q.date.unwrap_or_else(|| s.now().date_naive());
    let pool = db.auto_generate_sheet(id, date)?;
    to_json(json!({ "date": date, "rats": pool.iter().map(|r| &db.rats[r]).collect::<Vec<_>>() }))
}

#[derive(Debug, Default, Deserialize)]
struct AutoSessionBody {
    #[serde(default)]
    topics: BTreeSet<TopicId>,
}

async fn begin_auto_session(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    body: axum::body::Bytes,
) -> ApiResult<Response> {
    let b: AutoSessionBody = if body.iter().all(u8::is_ascii_whitespace) {
        AutoSessionBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?
    };
    let today = s.now().date_naive();
    let session = s.write(|db| db.begin_auto_session(&a, id, today, &b.topics))?;
    let view = SessionView::new(&session, &s.db.read());
    let mut response = (StatusCode::CREATED, Json(view)).into_response();
    response.extensions_mut().insert(LogSubject(session.id.to_string()));
    Ok(response)
}

async fn list_sheets(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LectureId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    to_json(db.sheets_for(&a, id, s.now().date_naive())?)
}

#[derive(Debug, Deserialize)]
struct ManualSheetBody {
    name: String,
    rats: Vec<RatId>,
    available_from: Option<NaiveDate>,
}

async fn create_manual_sheet(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiJson(b): ApiJson<ManualSheetBody>,
) -> ApiResult<Response> {
    let from = b.available_from.unwrap_or_else(|| s.now().date_naive());
    let sheet = s.write(|db| db.create_manual_sheet(&a, id, &b.name, b.rats, from))?;
    Ok(created(sheet, json!({})))
}

#[derive(Debug, Deserialize)]
struct AutoSheetBody {
    name: String,
    date: Option<NaiveDate>,
    #[serde(default)]
    pruned: BTreeSet<RatId>,
}

async fn create_auto_sheet(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LectureId>,
    ApiJson(b): ApiJson<AutoSheetBody>,
) -> ApiResult<Response> {
    let date = b.date.unwrap_or_else(|| s.now().date_naive());
    let sheet = s.write(|db| db.commit_auto_sheet(&a, id, &b.name, date, &b.pruned))?;
    let rats = s.db.read().sheet(sheet)?.rats.clone();
    Ok(created(sheet, json!({ "rats": rats })))
}

async fn dashboard(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LectureId>) -> ApiResult<Json<Value>> {
    to_json(s.db.read().lecture_dashboard(&a, id)?)
}

async fn ungraded(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LectureId>) -> ApiResult<Json<Value>> {
    to_json(s.db.read().ungraded(&a, id)?)
}

#[derive(Debug, Deserialize)]
struct GradeBody {
    correct: bool,
}

async fn grade_attempt(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<AttemptId>,
    ApiJson(b): ApiJson<GradeBody>,
) -> ApiResult<StatusCode> {
    s.write(|db| db.grade_attempt(&a, id, b.correct))?;
    Ok(StatusCode::NO_CONTENT)
}

// ---- sheets and sessions

async fn begin_sheet_session(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<SheetId>) -> ApiResult<Response> {
    let today = s.now().date_naive();
    let session = s.write(|db| db.begin_sheet_session(&a, id, today))?;
    let view = SessionView::new(&session, &s.db.read());
    let mut response = (StatusCode::CREATED, Json(view)).into_response();
    response.extensions_mut().insert(LogSubject(session.id.to_string()));
    Ok(response)
}

async fn get_session(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<SessionId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    to_json(SessionView::new(db.session(&a, id)?, &db))
}

#[derive(Debug, Deserialize)]
struct AnswerBody {
    rat: RatId,
    response: Answer,
}

fn answer_view(result: &GradedResult, db: &rats_core::ContentDb) -> ApiResult<Json<Value>> {
    let mut v = serde_json::to_value(result).map_err(|e| ApiError::Internal(e.into()))?;
    v["next"] = json!(result.next_rat.and_then(|id| db.rats.get(&id)).map(StudentRat::from));
    Ok(Json(v))
}

async fn submit_answer(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<SessionId>,
    ApiJson(b): ApiJson<AnswerBody>,
) -> ApiResult<Json<Value>> {
    let now = s.now();
    let result = s.write(|db| db.submit_answer(&a, id, b.rat, &b.response, now))?;
    answer_view(&result, &s.db.read())
}

// ---- RATs

#[derive(Debug, Deserialize)]
struct RatQuery {
    author: Option<UserId>,
    lecture: Option<LectureId>,
    topic: Option<TopicId>,
    concept: Option<ConceptId>,
}

async fn search_rats(State(s): State<AppState>, Auth(a): Auth, ApiQuery(q): ApiQuery<RatQuery>) -> ApiResult<Json<Value>> {
    let filter = RatFilter {
        author: q.author,
        lecture: q.lecture,
        topic: q.topic,
        concept: q.concept,
    };
    to_json(s.db.read().search_rats(&a, &filter)?)
}

async fn create_rat(State(s): State<AppState>, Auth(a): Auth, ApiJson(c): ApiJson<RatContent>) -> ApiResult<Response> {
    let now = s.now();
    let id = s.write(|db| db.create_rat(&a, c, now))?;
    let state = s.db.read().rat(id)?.state.value;
    Ok(created(id, json!({ "state": state })))
}

async fn get_rat(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    Ok(Json(rat_view(db.rat_for(&a, id)?, a.role)))
}

async fn edit_rat(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<RatId>,
    ApiJson(c): ApiJson<RatContent>,
) -> ApiResult<Json<Value>> {
    let state = s.write(|db| db.edit_rat(&a, id, c))?;
    Ok(Json(json!({ "id": id, "state": state })))
}

async fn delete_rat(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<StatusCode> {
    s.write(|db| db.delete_rat(&a, id))?;
    Ok(StatusCode::NO_CONTENT)
}

async fn duplicate_rat(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Response> {
    let now = s.now();
    let copy = s.write(|db| db.duplicate_rat(&a, id, now))?;
    Ok(created(copy, json!({ "source": id })))
}

async fn approve_rat(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Json<Value>> {
    to_json(s.write(|db| db.approve(&a, id))?)
}

async fn scaffolds(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Json<Value>> {
    let now = s.now();
    let list = s.write(|db| db.scaffolds_for(&a, id, now))?;
    let threshold = s.config.scaffold_approval_threshold;
    to_json(
        list.iter()
            .map(|sc| {
                json!({
                    "id": sc.id,
                    "rat_id": sc.rat_id,
                    "kind": sc.kind,
                    "body": sc.body,
                    "mean_rating": sc.mean_rating(),
                    "ratings": sc.ratings.len(),
                    "visible": sc.is_visible(threshold),
                })
            })
            .collect::<Vec<_>>(),
    )
}

#[derive(Debug, Deserialize)]
struct SuggestionBody {
    kind: ScaffoldKind,
    body: RichText,
}

async fn suggest_scaffold(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<RatId>,
    ApiJson(b): ApiJson<SuggestionBody>,
) -> ApiResult<Response> {
    let now = s.now();
    let sc = s.write(|db| db.suggest_scaffold(&a, id, b.kind, b.body, now))?;
    Ok(created(sc, json!({ "rat": id })))
}

#[derive(Debug, Deserialize)]
struct TextBody {
    body: String,
}

/// Students leave a note for the author; creators and above write into the
/// review thread.
async fn comment(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<RatId>,
    ApiJson(b): ApiJson<TextBody>,
) -> ApiResult<Response> {
    let now = s.now();
    if a.role == Role::Student {
        s.write(|db| db.student_note(&a, id, NoteKind::Comment, &b.body, now))?;
        Ok((StatusCode::CREATED, Json(json!({ "rat": id, "kind": "Comment" }))).into_response())
    } else {
        let notified = s.write(|db| db.comment(&a, id, &b.body, now))?;
        Ok((StatusCode::CREATED, Json(json!({ "rat": id, "kind": "Review", "notified": notified }))).into_response())
    }
}

async fn comments(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    match db.thread(&a, id) {
        Ok(t) => to_json(&t.comments),
        Err(Error::NotFound(_)) => {
            db.rat(id)?;
            Ok(Json(json!([])))
        }
        Err(e) => Err(e.into()),
    }
}

async fn error_report(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<RatId>,
    ApiJson(b): ApiJson<TextBody>,
) -> ApiResult<Response> {
    let now = s.now();
    s.write(|db| db.student_note(&a, id, NoteKind::ErrorReport, &b.body, now))?;
    Ok((StatusCode::CREATED, Json(json!({ "rat": id, "kind": "ErrorReport" }))).into_response())
}

async fn rat_stats(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<RatId>) -> ApiResult<Json<Value>> {
    to_json(s.db.read().rat_summary(&a, id)?)
}

#[derive(Debug, Deserialize)]
struct RatingBody {
    stars: u8,
}

async fn rate_scaffold(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<ScaffoldId>,
    ApiJson(b): ApiJson<RatingBody>,
) -> ApiResult<Json<Value>> {
    let mean = s.write(|db| db.rate_scaffold(&a, id, b.stars))?;
    Ok(Json(json!({ "scaffold": id, "mean_rating": mean })))
}

async fn approve_scaffold(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<ScaffoldId>) -> ApiResult<Json<Value>> {
    let state = s.write(|db| db.approve_scaffold(&a, id))?;
    Ok(Json(json!({ "scaffold": id, "state": state })))
}

// ---- live

async fn open_live(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<SheetId>) -> ApiResult<Response> {
    let live = s.write(|db| db.open_live(&a, id))?;
    Ok(created(live, json!({ "sheet": id, "channel": format!("/live/{live}") })))
}

#[derive(Debug, Deserialize)]
struct LiveAnswerBody {
    rat: RatId,
    response: Answer,
}

pub fn live_ack(session: LiveSessionId, rat: RatId) -> Value {
    json!({ "type": "ack", "session": session, "rat": rat })
}

async fn live_answer(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<LiveSessionId>,
    ApiJson(b): ApiJson<LiveAnswerBody>,
) -> ApiResult<Json<Value>> {
    let now = s.now();
    s.write(|db| db.submit_live(&a, id, b.rat, &b.response, now))?;
    Ok(Json(live_ack(id, b.rat)))
}

/// Aggregates are for owners of the lecture only.
pub fn live_stats_for(s: &AppState, actor: &rats_core::Actor, id: LiveSessionId) -> ApiResult<rats_core::live::LiveStats> {
    let db = s.db.read();
    let live = db.live_session(id)?;
    db.require_owner(actor, live.lecture)?;
    Ok(live.stats())
}

async fn live_stats(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LiveSessionId>) -> ApiResult<Json<Value>> {
    to_json(live_stats_for(&s, &a, id)?)
}

async fn close_live(State(s): State<AppState>, Auth(a): Auth, ApiPath(id): ApiPath<LiveSessionId>) -> ApiResult<Json<Value>> {
    s.write(|db| db.close_live(&a, id))?;
    to_json(live_stats_for(&s, &a, id)?)
}

// ---- cross-lecture

async fn cross_lecture_next(State(s): State<AppState>, Auth(a): Auth) -> ApiResult<Json<Value>> {
    let db = s.db.read();
    let pool = db.cross_lecture_pool(&a)?;
    let next = pool.first().map(|id| StudentRat::from(&db.rats[id]));
    to_json(json!({ "rat": next, "remaining": pool.len() }))
}

async fn cross_lecture_answer(State(s): State<AppState>, Auth(a): Auth, ApiJson(b): ApiJson<AnswerBody>) -> ApiResult<Json<Value>> {
    let now = s.now();
    let result = s.write(|db| db.answer_cross_lecture(&a, b.rat, &b.response, now))?;
    answer_view(&result, &s.db.read())
}

// ---- administration

#[derive(Debug, Deserialize)]
struct RangeQuery {
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
}

async fn admin_stats(State(s): State<AppState>, Auth(a): Auth, ApiQuery(q): ApiQuery<RangeQuery>) -> ApiResult<Json<Value>> {
    to_json(s.db.read().admin_stats(&a, q.from, q.to)?)
}

#[derive(Debug, Deserialize)]
struct RoleBody {
    role: Role,
}

async fn set_role(
    State(s): State<AppState>,
    Auth(a): Auth,
    ApiPath(id): ApiPath<UserId>,
    ApiJson(b): ApiJson<RoleBody>,
) -> ApiResult<Json<Value>> {
    a.require(Role::Administrator)?;
    let mut users = s.users.lock();
    if !users.set_role(id, b.role) {
        return Err(Error::NotFound("user").into());
    }
    users.save()?;
    Ok(Json(json!({ "user": id, "role": b.role })))
}

async fn admin_log(State(s): State<AppState>, Auth(a): Auth) -> ApiResult<Json<Value>> {
    a.require(Role::Administrator)?;
    to_json(s.content.read_log()?)
}

/// Users with four logins at least a day apart within the window.
async fn lottery(State(s): State<AppState>, Auth(a): Auth, ApiQuery(q): ApiQuery<RangeQuery>) -> ApiResult<Json<Value>> {
    a.require(Role::Administrator)?;
    let from = q.from.map(|d| Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight")));
    let to = q.to.and_then(|d| d.succ_opt()).map(|d| Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight")));
    let mut logins: BTreeMap<UserId, Vec<_>> = BTreeMap::new();
    for e in s.content.read_log()? {
        if e.action != LOGIN_ACTION || e.status != 200 {
            continue;
        }
        if from.is_some_and(|f| e.at < f) || to.is_some_and(|t| e.at >= t) {
            continue;
        }
        if let Some(u) = e.user {
            logins.entry(u).or_default().push(e.at);
        }
    }
    let eligible: Vec<UserId> = logins
        .into_iter()
        .filter(|(_, times)| lottery_eligible(times))
        .map(|(u, _)| u)
        .collect();
    Ok(Json(json!({ "eligible": eligible })))
}
