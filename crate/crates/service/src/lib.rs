//! HTTP/JSON front end over one immutable global election.
//!
//! Endpoints: `GET /healthz`, `GET /movies?q=&limit=`, `POST /search` and
//! `POST /embedding`. Every request reads the shared election; the only
//! shared mutable state is the rank-table memo behind `/embedding`.

mod error;
mod memo;

use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Query as UrlQuery, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use votesearch_core::analysis::{build_extension, embed, DissimilarityGraph, LayoutConfig};
use votesearch_core::owa::Exponent;
use votesearch_core::{search as run_search, Algorithm, AnnealingConfig, Gamma, GlobalData, Query, ResourceId, SearchResult};

pub use error::ApiError;
pub use memo::RankMemo;

pub const DEFAULT_NODE_CAP: usize = 200;
pub const DEFAULT_MEMO_CAPACITY: usize = 4096;
const DEFAULT_MOVIE_LIMIT: usize = 20;
const MAX_MOVIE_LIMIT: usize = 1000;
/// Server-drawn seeds stay below 2^53 so JavaScript clients can echo them.
const SEED_BOUND: u64 = 1 << 53;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub node_cap: usize,
    pub memo_capacity: NonZeroUsize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            node_cap: DEFAULT_NODE_CAP,
            memo_capacity: NonZeroUsize::new(DEFAULT_MEMO_CAPACITY).unwrap(),
        }
    }
}

pub struct AppState {
    pub global: GlobalData,
    pub config: ServiceConfig,
    pub memo: RankMemo,
}

impl AppState {
    pub fn new(global: GlobalData, config: ServiceConfig) -> Arc<Self> {
        let memo = RankMemo::new(config.memo_capacity);
        Arc::new(Self { global, config, memo })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/movies", get(movies))
        .route("/search", post(search))
        .route("/embedding", post(embedding))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Parses a JSON body; any syntax or schema problem is a 400.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("worker failed: {e}")))?
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    agents: usize,
    resources: usize,
}

async fn healthz(State(state): State<Arc<AppState>>) -> Json<Health> {
    Json(Health {
        status: "ok",
        agents: state.global.election.n_agents(),
        resources: state.global.election.n_resources(),
    })
}

#[derive(Deserialize)]
struct MoviesParams {
    q: Option<String>,
    limit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovieHit {
    pub id: ResourceId,
    pub title: String,
    pub genres: Vec<String>,
    pub global_approvals: usize,
}

async fn movies(
    State(state): State<Arc<AppState>>,
    params: Result<UrlQuery<MoviesParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<Vec<MovieHit>>, ApiError> {
    let UrlQuery(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let q = params.q.unwrap_or_default();
    if q.trim().is_empty() {
        return Err(ApiError::bad_request("query parameter q must be nonempty"));
    }
    let limit = params.limit.unwrap_or(DEFAULT_MOVIE_LIMIT).min(MAX_MOVIE_LIMIT);
    let global = &state.global;
    let mut hits: Vec<MovieHit> = global
        .catalog
        .search(q.trim())
        .into_iter()
        .map(|id| MovieHit {
            id,
            title: global.catalog.title(id),
            genres: global.catalog.get(id).map(|e| e.genres.clone()).unwrap_or_default(),
            global_approvals: global.election.approval_count(id),
        })
        .collect();
    hits.sort_by(|a, b| b.global_approvals.cmp(&a.global_approvals).then(a.id.cmp(&b.id)));
    hits.truncate(limit);
    Ok(Json(hits))
}

fn default_k() -> usize {
    10
}

fn default_gamma() -> f64 {
    2.0
}

fn default_algorithm() -> Algorithm {
    Algorithm::Greedy
}

fn default_p() -> Exponent {
    Exponent::Finite(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub query: Vec<ResourceId>,
    #[serde(default = "default_p")]
    pub p: Exponent,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    /// The request with every default filled in, including a drawn seed.
    pub request: SearchRequest,
    #[serde(flatten)]
    pub result: SearchResult,
    pub timing_ms: f64,
}

/// Validates and completes a request; the seed is drawn only for annealing.
fn resolve_request(global: &GlobalData, mut req: SearchRequest) -> Result<(SearchRequest, Query), ApiError> {
    if req.query.is_empty() {
        return Err(ApiError::bad_request("query must list at least one resource id"));
    }
    if let Some(&missing) = req.query.iter().find(|&&id| !global.election.contains(id)) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown resource id {missing}")).with("id", missing.0));
    }
    if req.k == 0 {
        return Err(ApiError::bad_request("k must be at least 1"));
    }
    if req.algorithm == Algorithm::BruteForce {
        return Err(ApiError::bad_request("algorithm must be exact, greedy or anneal"));
    }
    let mut query = Query::new(req.query.clone(), req.p);
    query.k = req.k;
    query.gamma = Gamma::new(req.gamma)?;
    query.algorithm = req.algorithm;
    if query.effective_algorithm() == Algorithm::Annealing {
        let seed = *req.seed.get_or_insert_with(|| rand::random_range(0..SEED_BOUND));
        query.annealing = AnnealingConfig::with_seed(seed);
    }
    Ok((req, query))
}

async fn search(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SearchResponse>, ApiError> {
    let req: SearchRequest = parse_body(&body)?;
    let started = Instant::now();
    let (request, query) = resolve_request(&state.global, req)?;
    let result = blocking(move || Ok(run_search(&state.global.election, &state.global.catalog, &query)?)).await?;
    Ok(Json(SearchResponse {
        request,
        result,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    }))
}

fn default_p_values() -> Vec<Exponent> {
    (0..4).map(Exponent::Finite).collect()
}

fn default_iterations() -> usize {
    LayoutConfig::default().iterations
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingRequest {
    pub ids: Vec<ResourceId>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<Exponent>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub query: ResourceId,
    pub p: Exponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingNode {
    pub id: ResourceId,
    pub title: String,
    pub genre: Option<String>,
    pub genres: Vec<String>,
    pub x: f64,
    pub y: f64,
    /// True for members of the requested set.
    pub queried: bool,
    /// The (query, p) committees, for queried movies, that contain this node.
    pub committees: Vec<Membership>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitteeOut {
    pub query: ResourceId,
    pub p: Exponent,
    pub members: Vec<ResourceId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResponse {
    pub request: EmbeddingRequest,
    pub nodes: Vec<EmbeddingNode>,
    /// Committees of the requested movies, one per (query, p).
    pub committees: Vec<CommitteeOut>,
    pub timing_ms: f64,
}

fn compute_embedding(state: &AppState, req: EmbeddingRequest) -> Result<EmbeddingResponse, ApiError> {
    let started = Instant::now();
    if req.ids.is_empty() {
        return Err(ApiError::bad_request("ids must list at least one resource id"));
    }
    if req.k == 0 {
        return Err(ApiError::bad_request("k must be at least 1"));
    }
    if req.p_values.is_empty() {
        return Err(ApiError::bad_request("p_values must be nonempty"));
    }
    let gamma = Gamma::new(req.gamma)?;
    let global = &state.global;
    let ext = build_extension(&global.election, &req.ids, req.k, &req.p_values, gamma)?;
    if ext.members.len() > state.config.node_cap {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("extension has {} movies, above the cap of {}", ext.members.len(), state.config.node_cap),
        )
        .with("extension_size", ext.members.len())
        .with("node_cap", state.config.node_cap));
    }
    let nodes = DissimilarityGraph::check_nodes(&global.election, &ext.members)?;
    let ranks = state.memo.ranks(&global.election, &nodes, gamma)?;
    let graph = DissimilarityGraph::from_ranks(nodes, |i| ranks[i].as_deref());
    let layout = embed(
        &graph,
        &LayoutConfig {
            iterations: req.iterations,
            seed: req.seed,
            ..LayoutConfig::default()
        },
    )?;

    let queried: std::collections::BTreeSet<ResourceId> = req.ids.iter().copied().collect();
    let committees: Vec<CommitteeOut> = ext
        .committees
        .into_iter()
        .filter(|c| queried.contains(&c.query))
        .map(|c| CommitteeOut {
            query: c.query,
            p: c.p,
            members: c.members,
        })
        .collect();
    let nodes = layout
        .nodes
        .iter()
        .zip(&layout.positions)
        .map(|(&id, pos)| {
            let entry = global.catalog.get(id);
            EmbeddingNode {
                id,
                title: global.catalog.title(id),
                genre: entry.and_then(|e| e.first_genre()).map(str::to_owned),
                genres: entry.map(|e| e.genres.clone()).unwrap_or_default(),
                x: pos[0],
                y: pos[1],
                queried: queried.contains(&id),
                committees: committees
                    .iter()
                    .filter(|c| c.members.contains(&id))
                    .map(|c| Membership { query: c.query, p: c.p })
                    .collect(),
            }
        })
        .collect();
    Ok(EmbeddingResponse {
        request: req,
        nodes,
        committees,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

async fn embedding(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<EmbeddingResponse>, ApiError> {
    let req: EmbeddingRequest = parse_body(&body)?;
    blocking(move || compute_embedding(&state, req)).await.map(Json)
}
