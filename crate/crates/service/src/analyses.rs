use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use fdakit::dimred::{fpca_fit, fpca_transform};
use fdakit::exploratory::{boxplot_stats, msplot_stats, outliergram_stats, parabola_polyline, DepthMethod};
use fdakit::io::Dataset;
use fdakit::registration::{
    elastic_register, landmark_elastic_register, landmark_shift_register, least_squares_shift_register,
    ElasticOptions, LeastSquaresShiftOptions,
};
use fdakit::smoothing::{parameter_search, Kernel, PenaltyFunction, Scorer, SmootherSpec};
use fdakit::{BasisSpec, GridSample, LinearDifferentialOperator, SampleNames};
use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{parse_body, ApiError, AppState, Reply};

const ELLIPSE_VERTICES: usize = 96;
const PARABOLA_VERTICES: usize = 100;

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn to_value(value: impl serde::Serialize) -> Value {
    serde_json::to_value(value).expect("results serialize")
}

fn invalid(message: impl Into<String>) -> ApiError {
    fdakit::FdaError::InvalidParameter(message.into()).into()
}

/// Runs `job` on the grid form of dataset `id` off the async executor.
async fn on_dataset<F>(state: Arc<AppState>, id: String, job: F) -> Reply
where
    F: FnOnce(&AppState, &GridSample) -> Result<Value, ApiError> + Send + 'static,
{
    let entry = state.store.get(&id).ok_or_else(|| ApiError::unknown_dataset(&id))?;
    tokio::task::spawn_blocking(move || {
        let sample = entry.dataset.to_grid(None)?;
        job(&state, &sample)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", e.to_string()))?
    .map(Json)
}

/// Stores a derived dataset and returns its handle merged into `extra`.
fn store_result(state: &AppState, sample: GridSample, mut extra: Value) -> Result<Value, ApiError> {
    let handle = state.store.insert(Dataset::Grid(sample))?;
    let object = extra.as_object_mut().expect("extra is an object");
    object.insert("id".into(), json!(handle.id));
    object.insert("created_at".into(), json!(handle.created_at));
    object.insert("summary".into(), to_value(&handle.summary));
    Ok(extra)
}

fn depth_method(name: &str) -> Result<DepthMethod, ApiError> {
    Ok(DepthMethod::from_str(name)?)
}

fn default_depth() -> String {
    "mbd".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct DepthRequest {
    #[serde(default = "default_depth")]
    method: String,
}

pub(crate) async fn depth(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let request: DepthRequest = parse_body(&body)?;
    let method = depth_method(&request.method)?;
    on_dataset(state, id, move |_, sample| Ok(to_value(fdakit::exploratory::depth(sample, method)?))).await
}

fn default_factor() -> f64 {
    1.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BoxplotRequest {
    #[serde(default = "default_factor")]
    factor: f64,
    #[serde(default)]
    prob: Vec<f64>,
    #[serde(default = "default_depth")]
    depth: String,
}

pub(crate) async fn boxplot(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let request: BoxplotRequest = parse_body(&body)?;
    let method = depth_method(&request.depth)?;
    on_dataset(state, id, move |_, sample| {
        let stats = boxplot_stats(sample, method, request.factor, &request.prob)?;
        let median = sample.curve(stats.median_index);
        let mut value = to_value(&stats);
        value["grid"] = json!(sample.points());
        value["median"] = json!(median);
        Ok(value)
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Empty {}

pub(crate) async fn msplot(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let _: Empty = parse_body(&body)?;
    on_dataset(state, id, |_, sample| {
        let stats = msplot_stats(sample)?;
        let mut value = to_value(&stats);
        value["points"] = json!(stats.mo.iter().zip(&stats.vo).map(|(m, v)| [*m, *v]).collect::<Vec<_>>());
        value["ellipse_polyline"] = json!(stats.ellipse.polyline(ELLIPSE_VERTICES));
        Ok(value)
    })
    .await
}

pub(crate) async fn outliergram(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let _: Empty = parse_body(&body)?;
    on_dataset(state, id, |_, sample| {
        let stats = outliergram_stats(sample)?;
        let mut value = to_value(&stats);
        value["points"] = json!(stats.mei.iter().zip(&stats.mbd).map(|(a, b)| [*a, *b]).collect::<Vec<_>>());
        value["parabola_polyline"] = json!(parabola_polyline(&stats.parabola, PARABOLA_VERTICES));
        Ok(value)
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

fn default_kernel() -> String {
    "gaussian".into()
}

fn default_basis() -> String {
    "bspline".into()
}

fn default_penalty() -> String {
    "default".into()
}

fn default_n_basis() -> usize {
    10
}

fn default_derivative() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SmoothRequest {
    method: String,
    param: OneOrMany,
    #[serde(default)]
    search: Option<String>,
    #[serde(default = "default_penalty")]
    penalty: String,
    #[serde(default = "default_kernel")]
    kernel: String,
    #[serde(default = "default_basis")]
    basis: String,
    #[serde(default = "default_n_basis")]
    n_basis: usize,
    #[serde(default = "default_derivative")]
    derivative: usize,
}

fn smoother_template(request: &SmoothRequest, first: f64, sample: &GridSample) -> Result<SmootherSpec, ApiError> {
    let kernel = Kernel::from_str(&request.kernel).map_err(invalid)?;
    Ok(match request.method.as_str() {
        "nw" => SmootherSpec::NadarayaWatson { bandwidth: first, kernel },
        "llr" => SmootherSpec::LocalLinear { bandwidth: first, kernel },
        "knn" => {
            if !(first >= 1.0 && first.fract() == 0.0) {
                return Err(invalid("knn needs a positive integer parameter"));
            }
            SmootherSpec::KNeighbors { k: first as usize }
        }
        "basis" => {
            let domain = sample.domain_range();
            let basis = match request.basis.as_str() {
                "bspline" => BasisSpec::bspline(domain, request.n_basis)?,
                "fourier" => BasisSpec::fourier(domain, request.n_basis)?,
                "monomial" => BasisSpec::monomial(domain, request.n_basis)?,
                other => return Err(invalid(format!("unknown basis {other:?}"))),
            };
            SmootherSpec::Basis {
                basis,
                lambda: first,
                operator: LinearDifferentialOperator::derivative(request.derivative),
            }
        }
        other => return Err(invalid(format!("unknown smoothing method {other:?}"))),
    })
}

pub(crate) async fn smooth(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let request: SmoothRequest = parse_body(&body)?;
    let params = match &request.param {
        OneOrMany::One(p) => vec![*p],
        OneOrMany::Many(p) => p.clone(),
    };
    if params.is_empty() {
        return Err(invalid("param must not be empty"));
    }
    let scorer = match request.search.as_deref() {
        None if params.len() > 1 => return Err(invalid("several parameters need a search criterion")),
        None => None,
        Some("loo") => Some(Scorer::LeaveOneOut),
        Some("gcv") => Some(Scorer::Gcv(match request.penalty.as_str() {
            "default" => PenaltyFunction::Gcv,
            "akaike" => PenaltyFunction::Akaike,
            "shibata" => PenaltyFunction::Shibata,
            other => return Err(invalid(format!("unknown penalty {other:?}"))),
        })),
        Some(other) => return Err(invalid(format!("unknown search criterion {other:?}"))),
    };
    on_dataset(state, id, move |state, sample| {
        let template = smoother_template(&request, params[0], sample)?;
        let (spec, diagnostics) = match scorer {
            None => {
                let spec = template.with_parameter(params[0])?;
                (spec, json!({ "parameter": params[0] }))
            }
            Some(scorer) => {
                let result = parameter_search(&template, &params, scorer, sample)?;
                let scores: Vec<Value> = result
                    .scores
                    .iter()
                    .map(|entry| match &entry.score {
                        Ok(s) => json!({ "parameter": entry.parameter, "score": s }),
                        Err(e) => json!({ "parameter": entry.parameter, "error": e.name() }),
                    })
                    .collect();
                let diagnostics = json!({
                    "parameter": result.best_parameter,
                    "score": result.best_score,
                    "scores": scores,
                });
                (result.best_spec, diagnostics)
            }
        };
        let smoothed = fdakit::smoothing::smooth(&spec, sample)?;
        let mut diagnostics = diagnostics;
        diagnostics["method"] = json!(spec.name());
        store_result(state, smoothed, diagnostics)
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RegisterRequest {
    method: String,
    #[serde(default)]
    landmarks: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    target: Option<Vec<f64>>,
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
}

pub(crate) async fn register(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let request: RegisterRequest = parse_body(&body)?;
    if !["shift", "landmark-shift", "landmark-elastic", "elastic"].contains(&request.method.as_str()) {
        return Err(invalid(format!("unknown registration method {:?}", request.method)));
    }
    if request.method.starts_with("landmark") && request.landmarks.is_none() {
        return Err(invalid("landmark registration needs landmarks"));
    }
    on_dataset(state, id, move |state, sample| match request.method.as_str() {
        "shift" => {
            let defaults = LeastSquaresShiftOptions::default();
            let options = LeastSquaresShiftOptions {
                max_iter: request.max_iter.unwrap_or(defaults.max_iter),
                tol: request.tol.unwrap_or(defaults.tol),
                ..defaults
            };
            let result = least_squares_shift_register(sample, &options)?;
            let diagnostics = json!({
                "method": "shift",
                "shifts": result.shifts.deltas(),
                "converged": result.converged,
                "iterations": result.iterations,
                "regsse_history": result.regsse_history,
            });
            store_result(state, result.registered, diagnostics)
        }
        "landmark-shift" => {
            let landmarks = request.landmarks.as_ref().expect("checked above");
            if landmarks.iter().any(|r| r.len() != 1) {
                return Err(invalid("landmark-shift takes exactly one landmark per curve"));
            }
            let target = match request.target.as_deref() {
                None => None,
                Some([t]) => Some(*t),
                Some(_) => return Err(invalid("landmark-shift takes a single target")),
            };
            let flat: Vec<f64> = landmarks.iter().map(|r| r[0]).collect();
            let (registered, shifts) = landmark_shift_register(sample, &flat, target, None)?;
            store_result(state, registered, json!({ "method": "landmark-shift", "shifts": shifts.deltas() }))
        }
        "landmark-elastic" => {
            let landmarks = request.landmarks.as_ref().expect("checked above");
            let (registered, warping) = landmark_elastic_register(sample, landmarks, request.target.as_deref())?;
            let diagnostics = json!({ "method": "landmark-elastic", "warping": rows(warping.sample().values()) });
            store_result(state, registered, diagnostics)
        }
        _ => {
            let defaults = ElasticOptions::default();
            let options = ElasticOptions {
                max_iter: request.max_iter.unwrap_or(defaults.max_iter),
                tol: request.tol.unwrap_or(defaults.tol),
                ..defaults
            };
            let result = elastic_register(sample, &options)?;
            let diagnostics = json!({
                "method": "elastic",
                "warping": rows(result.warping.sample().values()),
                "template_srvf": result.template_srvf,
                "converged": result.converged,
                "iterations": result.iterations,
            });
            store_result(state, result.registered, diagnostics)
        }
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FpcaRequest {
    components: usize,
    #[serde(default)]
    lambda: f64,
}

/// The stored dataset holds the components, one curve per component.
pub(crate) async fn fpca(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let request: FpcaRequest = parse_body(&body)?;
    on_dataset(state, id, move |state, sample| {
        let model = fpca_fit(sample, request.components, request.lambda, None)?;
        let scores = fpca_transform(&model, sample)?;
        let names = SampleNames {
            dataset: format!("{} principal components", sample.names().dataset).trim().to_string(),
            argument: sample.names().argument.clone(),
            coordinate: sample.names().coordinate.clone(),
            curves: (1..=model.n_components()).map(|j| format!("PC{j}")).collect(),
        };
        let components = GridSample::from_matrix(model.grid().clone(), model.components().clone())?.with_names(names)?;
        let diagnostics = json!({
            "mean": model.mean(),
            "eigenvalues": model.eigenvalues(),
            "explained_variance_ratio": model.explained_variance_ratio(),
            "total_variance": model.total_variance(),
            "scores": rows(&scores),
        });
        store_result(state, components, diagnostics)
    })
    .await
}
