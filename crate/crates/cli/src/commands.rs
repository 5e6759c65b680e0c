use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use ncjulia::boundary::{
    bpoint_report, estimate_alpha, extract_w, julia_inequality_check, ReportOptions,
};
use ncjulia::derivative::{eta_numeric, relative_error, DirectionalDerivativeResult};
use ncjulia::domain::{random_interior_point, ApproachSequence, SearchOptions};
use ncjulia::fixtures::{
    example_h1_realization, fixture, fixture_names, polydisk_delta, random_distinguished_point,
    ClosedForm,
};
use ncjulia::freepoly::{parse_poly, MatrixTuple};
use ncjulia::numerics::{self, c, identity, operator_norm, ComplexMatrix};
use ncjulia::random;
use ncjulia::realization::{random_realization, NcFunctionHandle};
use ncjulia::Error;

use crate::config::RunConfig;
use crate::input::{load_json, resolve};
use crate::output::render;
use crate::{Cli, Command, Outcome};

#[derive(Debug)]
pub enum CliError {
    /// Malformed JSON or polynomial text.
    Parse(String),
    /// Unreadable input file.
    Input(String),
    Precondition(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Core(Error::Parse { .. } | Error::Json(_)) => 2,
            CliError::Core(Error::Divergent(_) | Error::NonUnitaryLimit { .. }) => 1,
            CliError::Core(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.global.config {
        Some(arg) => load_json::<RunConfig>(arg, "config")?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.global.format {
        cfg.format = format;
    }
    cfg.validate().map_err(CliError::Precondition)?;
    Ok(cfg)
}

fn emit<T: Serialize>(value: &T, cfg: &RunConfig, code: u8) -> CliResult<Outcome> {
    let stdout = render(value, cfg.format)
        .map_err(|e| CliError::Precondition(format!("cannot render output: {e}")))?;
    Ok(Outcome {
        stdout,
        stderr: String::new(),
        code,
    })
}

pub fn dispatch(cli: Cli) -> CliResult<Outcome> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Eval { source, point } => cmd_eval(&cfg, &source, &point),
        Command::Bpoint {
            source,
            t,
            ray,
            radial: _,
            samples,
        } => {
            if let Some(s) = samples {
                cfg.samples.julia = s;
            }
            cfg.validate().map_err(CliError::Precondition)?;
            cmd_bpoint(&cfg, &source, &t, ray.as_deref())
        }
        Command::Fuzz {
            dim_e,
            j,
            delta,
            samples,
            no_isometry,
        } => {
            if let Some(s) = samples {
                cfg.samples.fuzz = s;
            }
            cfg.validate().map_err(CliError::Precondition)?;
            cmd_fuzz(&cfg, dim_e, j, &delta, no_isometry)
        }
        Command::Derivative {
            source,
            t,
            h,
            w,
            closed_form,
        } => cmd_derivative(&cfg, &source, &t, &h, w.as_deref(), closed_form),
        Command::Fixtures { name } => cmd_fixtures(&cfg, name.as_deref()),
        Command::Schema { name } => cmd_schema(&cfg, name.as_deref()),
    }
}

#[derive(Serialize)]
struct EvalReport {
    #[serde(with = "numerics::json")]
    phi: ComplexMatrix,
    #[serde(with = "numerics::json")]
    u: ComplexMatrix,
    delta_norm: f64,
    phi_norm: f64,
    condition: f64,
    model_residual: f64,
}

pub fn cmd_eval(cfg: &RunConfig, source: &crate::Source, point: &str) -> CliResult<Outcome> {
    let h = resolve(source)?.handle()?;
    let x: MatrixTuple = load_json(point, "point")?;
    let e = h.evaluate(&x)?;
    let report = EvalReport {
        phi_norm: operator_norm(&e.phi),
        model_residual: h.model_residual(&x, &x)?,
        phi: e.phi,
        u: e.u,
        delta_norm: e.delta_norm,
        condition: e.condition,
    };
    emit(&report, cfg, 0)
}

fn search_options(cfg: &RunConfig) -> SearchOptions {
    SearchOptions {
        seed: cfg.seed,
        tol: cfg.numerics(),
        ..SearchOptions::default()
    }
}

fn sequence(cfg: &RunConfig, t: MatrixTuple, ray: Option<MatrixTuple>) -> ApproachSequence {
    match ray {
        Some(k) => ApproachSequence::ray(t, k, cfg.ladder.ray_t0, cfg.ladder.ray_steps),
        None => ApproachSequence::radial(t, cfg.ladder.radial_steps),
    }
}

pub fn cmd_bpoint(
    cfg: &RunConfig,
    source: &crate::Source,
    t: &str,
    ray: Option<&str>,
) -> CliResult<Outcome> {
    let h = resolve(source)?.handle()?;
    let t: MatrixTuple = load_json(t, "T")?;
    let k = ray
        .map(|k| load_json::<MatrixTuple>(k, "ray direction"))
        .transpose()?;
    let seq = sequence(cfg, t, k);
    let opts = ReportOptions {
        samples: cfg.samples.julia,
        seed: cfg.seed,
        range_tol: cfg.tolerances.residual,
        search: search_options(cfg),
    };
    let report = bpoint_report(&h, &seq, &opts)?;
    let code = if report.is_bpoint && report.julia_violations == 0 {
        0
    } else {
        1
    };
    emit(&report, cfg, code)
}

#[derive(Serialize, Default)]
pub struct FuzzSummary {
    pub delta: String,
    pub dim_e: usize,
    pub j: usize,
    pub isometric: bool,
    pub samples: usize,
    pub seed: u64,
    pub model_checked: usize,
    pub model_failures: usize,
    pub max_model_residual: f64,
    pub julia_checked: usize,
    pub julia_violations: usize,
    pub julia_skipped: usize,
    /// Boundary points whose quotients grew, so no inequality applies.
    pub not_bpoint: usize,
    /// Largest `lhs / rhs` seen.
    pub max_julia_ratio: f64,
    /// Samples where an evaluation failed outright.
    pub errors: usize,
}

#[derive(Default)]
struct SampleResult {
    model_residual: Option<f64>,
    julia: Option<(f64, f64, bool)>,
    julia_skipped: bool,
    not_bpoint: bool,
    error: bool,
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i as u64)
}

fn fuzz_one(
    cfg: &RunConfig,
    name: &str,
    dim_e: usize,
    j: usize,
    perturb: bool,
    i: usize,
) -> CliResult<SampleResult> {
    let fx = fixture(name)?;
    let seed = sample_seed(cfg.seed, i);
    let mut rng = random::rng(seed);
    let n = 1 + i % 3;
    let mut r = random_realization(dim_e, j, seed)?;
    if perturb {
        let mut d = r.d().clone();
        d[(0, 0)] += c(0.5, 0.0);
        r = r.with_d_unvalidated(d)?;
    }
    let h = NcFunctionHandle::new(r, fx.delta.clone())?;
    let mut out = SampleResult::default();

    let x = random_interior_point(h.delta(), n, 0.95, &mut rng)?;
    let y = random_interior_point(h.delta(), n, 0.95, &mut rng)?;
    out.model_residual = Some(h.model_residual(&x, &y)?);

    let t = random_distinguished_point(name, n, &mut rng)?;
    let seq = ApproachSequence::radial(t.clone(), cfg.ladder.radial_steps);
    let alpha = estimate_alpha(&h, &seq)?;
    if !alpha.bounded {
        out.not_bpoint = true;
        return Ok(out);
    }
    let w = match extract_w(&h, &seq) {
        Ok(w) => w.w,
        Err(Error::NonUnitaryLimit { .. }) => {
            out.not_bpoint = true;
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    let z = random_interior_point(h.delta(), n, 0.999, &mut rng)?;
    let check = julia_inequality_check(&h, &t, &w, alpha.alpha, &z)?;
    if check.skipped {
        out.julia_skipped = true;
    } else {
        out.julia = Some((check.lhs, check.rhs, check.holds));
    }
    Ok(out)
}

pub fn run_fuzz(
    cfg: &RunConfig,
    dim_e: usize,
    j: Option<usize>,
    name: &str,
    no_isometry: bool,
) -> CliResult<FuzzSummary> {
    let fx = fixture(name)?;
    if fx.delta.rows() == 0 {
        return Err(CliError::Precondition("empty delta".into()));
    }
    let j = j.unwrap_or(fx.delta.j());
    if j != fx.delta.j() {
        return Err(CliError::Precondition(format!(
            "--j {j} does not match delta `{name}` of size {}",
            fx.delta.j()
        )));
    }
    if dim_e == 0 {
        return Err(CliError::Precondition("--dim-e must be at least 1".into()));
    }
    // Probe once so configuration errors surface before the sweep.
    random_distinguished_point(name, 1, &mut random::rng(0))?;
    let results: Vec<SampleResult> = (0..cfg.samples.fuzz)
        .into_par_iter()
        .map(|i| {
            fuzz_one(cfg, name, dim_e, j, no_isometry, i).unwrap_or(SampleResult {
                error: true,
                ..SampleResult::default()
            })
        })
        .collect();
    let mut s = FuzzSummary {
        delta: name.to_string(),
        dim_e,
        j,
        isometric: !no_isometry,
        samples: cfg.samples.fuzz,
        seed: cfg.seed,
        ..FuzzSummary::default()
    };
    for r in &results {
        if let Some(res) = r.model_residual {
            s.model_checked += 1;
            s.max_model_residual = s.max_model_residual.max(res);
            s.model_failures += usize::from(res.is_nan() || res > cfg.tolerances.residual);
        }
        if let Some((lhs, rhs, holds)) = r.julia {
            s.julia_checked += 1;
            s.julia_violations += usize::from(!holds);
            if rhs > 0.0 {
                s.max_julia_ratio = s.max_julia_ratio.max(lhs / rhs);
            }
        }
        s.julia_skipped += usize::from(r.julia_skipped);
        s.not_bpoint += usize::from(r.not_bpoint);
        s.errors += usize::from(r.error);
    }
    Ok(s)
}

pub fn cmd_fuzz(
    cfg: &RunConfig,
    dim_e: usize,
    j: Option<usize>,
    name: &str,
    no_isometry: bool,
) -> CliResult<Outcome> {
    let s = run_fuzz(cfg, dim_e, j, name, no_isometry)?;
    let clean = s.model_failures == 0 && s.julia_violations == 0 && s.errors == 0;
    emit(&s, cfg, if clean { 0 } else { 1 })
}

#[derive(Serialize)]
struct DerivativeReport {
    #[serde(flatten)]
    result: DirectionalDerivativeResult,
    #[serde(rename = "W", with = "numerics::json")]
    w: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<numerics::json::Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error: Option<f64>,
}

/// Relative error accepted against a closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

pub fn cmd_derivative(
    cfg: &RunConfig,
    source: &crate::Source,
    t: &str,
    dir: &str,
    w: Option<&str>,
    closed_form: bool,
) -> CliResult<Outcome> {
    let resolved = resolve(source)?;
    let h = resolved.handle()?;
    let t: MatrixTuple = load_json(t, "T")?;
    let dir: MatrixTuple = load_json(dir, "H")?;
    let w = match w {
        Some(arg) => load_json::<numerics::json::Matrix>(arg, "W")?.0,
        None => {
            if !h.delta().is_homogeneous_linear() {
                return Err(CliError::Precondition(
                    "pass --w: radial extraction needs a linear delta".into(),
                ));
            }
            extract_w(
                &h,
                &ApproachSequence::radial(t.clone(), cfg.ladder.radial_steps),
            )?
            .w
        }
    };
    let result = eta_numeric(&h, &t, &w, &dir, &cfg.derivative_ladder())?;
    let (closed, rel) = if closed_form {
        let form = resolved.closed_form(ClosedForm::Eta).ok_or_else(|| {
            CliError::Precondition("the fixture has no closed-form derivative".into())
        })?;
        let n = t.n();
        let at_identity = t
            .components()
            .iter()
            .all(|x| operator_norm(&(x - identity(n))) <= 1e-12);
        if !at_identity {
            return Err(CliError::Precondition(
                "the closed form is valid at T = (I, I) only".into(),
            ));
        }
        let exact = form.eval(&dir)?;
        let rel = relative_error(&result.eta, &exact);
        (Some(numerics::json::Matrix(exact)), Some(rel))
    } else {
        (None, None)
    };
    let ok = result.converged && rel.is_none_or(|r| r <= CLOSED_FORM_TOL);
    let report = DerivativeReport {
        result,
        w,
        closed_form: closed,
        relative_error: rel,
    };
    emit(&report, cfg, if ok { 0 } else { 1 })
}

pub fn cmd_fixtures(cfg: &RunConfig, name: Option<&str>) -> CliResult<Outcome> {
    match name {
        None => {
            let list: Vec<_> = fixture_names()
                .into_iter()
                .map(|(name, description)| json!({"name": name, "description": description}))
                .collect();
            emit(&list, cfg, 0)
        }
        Some(name) => {
            let fx = fixture(name)?;
            let forms: Vec<&str> = fx.closed_forms.iter().map(|f| f.name()).collect();
            let value = json!({
                "name": fx.name,
                "delta": fx.delta,
                "realization": fx.realization,
                "closed_forms": forms,
            });
            emit(&value, cfg, 0)
        }
    }
}

pub fn schemas() -> serde_json::Value {
    let matrix = numerics::from_rows(2, 2, &[c(1.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(2.0, 0.0)]);
    let tuple = MatrixTuple::scalars(&[Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.0)]);
    let poly = parse_poly("x0*x1 - 2", 2).expect("valid example");
    json!({
        "matrix": {
            "description": "complex matrix, row-major, entries as [re, im]",
            "example": numerics::json::Matrix(matrix),
        },
        "tuple": {
            "description": "d-tuple of n x n matrices; at level 1 a bare list of [re, im] scalars is also accepted",
            "example": tuple,
            "shorthand": [[0.5, 0.0], [0.3, 0.0]],
        },
        "polynomial": {
            "description": "free polynomial; word lists variable indices left to right. Text form: x0*x1 - 2, x0^2, (1+2i)*x1",
            "example": poly,
        },
        "delta": {
            "description": "matrix of free polynomials; J is the padded size, entries may also be strings in the text grammar",
            "example": polydisk_delta(2),
            "text_example": {"d": 2, "J": 2, "entries": [["x0", "0"], ["0", "x1"]]},
        },
        "realization": {
            "description": "isometric colligation [[A, B], [C, D]] on C + (C^dim_E (x) C^J), E index slowest",
            "example": example_h1_realization(),
        },
        "config": {
            "description": "run configuration; every field is optional",
            "example": RunConfig::default(),
        },
    })
}

pub fn cmd_schema(cfg: &RunConfig, name: Option<&str>) -> CliResult<Outcome> {
    let all = schemas();
    match name {
        None => emit(&all, cfg, 0),
        Some(n) => match all.get(n) {
            Some(v) => emit(v, cfg, 0),
            None => Err(CliError::Precondition(format!("unknown schema `{n}`"))),
        },
    }
}
