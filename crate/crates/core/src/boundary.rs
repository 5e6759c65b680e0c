//! Boundary behaviour at a point `T ∈ ∂G_δ`: Julia quotients, the boundary
//! value `W`, the boundary model vector `u_T`, the range test for B-points,
//! the nc Julia inequality and the comparability of the bounded quantities
//! along non-tangential sequences.

use serde::Serialize;

use crate::domain::{
    check_assumption_a, generate_sequence, in_g_delta, nontangential_constant,
    on_distinguished_boundary, random_interior_point, ApproachRule, ApproachSequence,
    AssumptionReport, GeneratedSequence, SearchOptions,
};
use crate::error::{Error, Result};
use crate::freepoly::MatrixTuple;
use crate::numerics::{
    self, extrapolate_limit, identity, kernel_basis, kron, min_norm_solve, nearest_unitary,
    operator_norm, ComplexMatrix, Tolerances,
};
use crate::random;
use crate::realization::NcFunctionHandle;

/// Largest accepted distance between the extrapolated `φ(Z_j)` and the unitaries.
pub const MAX_UNITARY_DISTANCE: f64 = 1e-4;

/// Relative slack in `lhs ≤ rhs` for the Julia inequality.
pub const JULIA_REL_TOL: f64 = 1e-8;

/// Denominators below this are treated as degenerate.
const DEGENERATE: f64 = 1e-14;

/// Consecutive quotient ratio that counts as growth.
const GROWTH_RATIO: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JuliaQuotient {
    pub value: f64,
    /// `‖I − φ(Z)*φ(Z)‖`.
    pub numerator: f64,
    /// `1 − ‖δ(Z)‖²`.
    pub denominator: f64,
}

/// `‖I − φ(Z)*φ(Z)‖ / (1 − ‖δ(Z)‖²)`.
pub fn julia_quotient(h: &NcFunctionHandle, z: &MatrixTuple) -> Result<JuliaQuotient> {
    let e = h.evaluate(z)?;
    let numerator = operator_norm(&(identity(z.n()) - e.phi.adjoint() * &e.phi));
    let denominator = 1.0 - e.delta_norm * e.delta_norm;
    Ok(JuliaQuotient {
        value: numerator / denominator,
        numerator,
        denominator,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// `(t, q(Z_t))` along the kept points.
    pub quotients: Vec<(f64, f64)>,
    pub increments: Vec<f64>,
    /// Quotients stay bounded (no sustained growth at the tail).
    pub bounded: bool,
    /// Bounded and the tail increments shrink.
    pub converged: bool,
    /// The estimate is a liminf over all of `G_δ` (radial rule, `δ` homogeneous
    /// of degree one); otherwise it is a sequence-wise estimate only.
    pub liminf_claim: bool,
}

fn grows(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return true;
    }
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    ratios.len() >= 3 && ratios[ratios.len() - 3..].iter().all(|&r| r > GROWTH_RATIO)
}

fn shrinking(increments: &[f64], scale: f64) -> bool {
    match increments {
        [] => false,
        [.., last] if *last <= 1e-8 * scale => true,
        [.., prev, last] => *last <= 0.75 * prev,
        _ => false,
    }
}

/// Estimates `α = lim q(Z_j)` along a generated sequence by extrapolating the
/// contiguous tail of the quotients.
pub fn estimate_alpha(h: &NcFunctionHandle, seq: &ApproachSequence) -> Result<AlphaEstimate> {
    let generated = generate_sequence(seq, h.delta())?;
    estimate_alpha_on(h, seq, &generated)
}

fn estimate_alpha_on(
    h: &NcFunctionHandle,
    seq: &ApproachSequence,
    g: &GeneratedSequence,
) -> Result<AlphaEstimate> {
    let tail = g.contiguous_tail(&seq.steps);
    let quotients = tail
        .iter()
        .map(|(t, z)| Ok((*t, julia_quotient(h, z)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = quotients.iter().map(|q| q.1).collect();
    let liminf_claim = seq.rule == ApproachRule::Radial && h.delta().is_homogeneous_linear();
    let bounded = !grows(&values);
    if quotients.len() < 2 {
        let alpha = values.first().copied().ok_or(Error::EmptySequence)?;
        return Ok(AlphaEstimate {
            alpha,
            quotients,
            increments: vec![],
            bounded,
            converged: false,
            liminf_claim,
        });
    }
    let samples: Vec<_> = quotients
        .iter()
        .map(|&(t, q)| (t, ComplexMatrix::from_element(1, 1, numerics::c(q, 0.0))))
        .collect();
    let ex = extrapolate_limit(&samples)?;
    let alpha = ex.limit[(0, 0)].re;
    let converged = bounded && shrinking(&ex.increments, 1.0 + alpha.abs());
    Ok(AlphaEstimate {
        alpha,
        quotients,
        increments: ex.increments,
        bounded,
        converged,
        liminf_claim,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryValue {
    #[serde(with = "numerics::json")]
    pub w: ComplexMatrix,
    /// Extrapolated limit before projecting onto the unitaries.
    #[serde(with = "numerics::json")]
    pub raw_limit: ComplexMatrix,
    pub unitary_distance: f64,
    pub increments: Vec<f64>,
}

/// `W = lim φ(Z_j)`, projected onto the unitaries by polar decomposition.
pub fn extract_w(h: &NcFunctionHandle, seq: &ApproachSequence) -> Result<BoundaryValue> {
    let generated = generate_sequence(seq, h.delta())?;
    extract_w_on(h, seq, &generated)
}

fn extract_w_on(
    h: &NcFunctionHandle,
    seq: &ApproachSequence,
    g: &GeneratedSequence,
) -> Result<BoundaryValue> {
    let samples = g
        .contiguous_tail(&seq.steps)
        .iter()
        .map(|(t, z)| Ok((*t, h.eval_phi(z)?)))
        .collect::<Result<Vec<_>>>()?;
    let ex = extrapolate_limit(&samples)?;
    let w = nearest_unitary(&ex.limit).map_err(|_| Error::NonUnitaryLimit { distance: 1.0 })?;
    let unitary_distance = operator_norm(&(&ex.limit - &w));
    if unitary_distance > MAX_UNITARY_DISTANCE {
        return Err(Error::NonUnitaryLimit {
            distance: unitary_distance,
        });
    }
    Ok(BoundaryValue {
        w,
        raw_limit: ex.limit,
        unitary_distance,
        increments: ex.increments,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryModel {
    #[serde(with = "numerics::json")]
    pub u_t: ComplexMatrix,
    /// `‖[I − (D⊗I)(I⊗δ(T))]u_T − C⊗I‖`; zero iff `C⊗I` is in the range.
    pub range_residual: f64,
    /// `‖P_ker u_T‖`, the component of `u_T` in the kernel.
    pub kernel_orthogonality: f64,
    /// Distance between the kernel projections of the system matrix and of
    /// its adjoint. Vanishes for isometric colligations.
    pub kernel_range_defect: f64,
    pub kernel_dim: usize,
}

fn kernel_projection(basis: &ComplexMatrix) -> ComplexMatrix {
    basis * basis.adjoint()
}

/// Minimum-norm solution of `[I − (D⊗I)(I⊗δ(T))] u_T = C⊗I`.
pub fn solve_ut(h: &NcFunctionHandle, t: &MatrixTuple, tol: &Tolerances) -> Result<BoundaryModel> {
    let m = h.resolvent_matrix(t)?;
    let b = h.lifted_c(t.n());
    let sol = min_norm_solve(&m, &b, tol)?;
    let ker = kernel_basis(&m, tol.pinv_cutoff);
    let ker_adj = kernel_basis(&m.adjoint(), tol.pinv_cutoff);
    let kernel_orthogonality = if ker.ncols() == 0 {
        0.0
    } else {
        operator_norm(&(ker.adjoint() * &sol.solution))
    };
    let kernel_range_defect =
        operator_norm(&(kernel_projection(&ker) - kernel_projection(&ker_adj)));
    Ok(BoundaryModel {
        u_t: sol.solution,
        range_residual: sol.residual_norm,
        kernel_orthogonality,
        kernel_range_defect,
        kernel_dim: ker.ncols(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeVerdict {
    pub is_bpoint: bool,
    pub range_residual: f64,
    /// (A1) could not be confirmed at `T`, so the equivalence is not backed.
    pub conditional: bool,
    pub assumption: AssumptionReport,
}

/// B-point test: `C⊗I ∈ Ran[I − (D⊗I)(I⊗δ(T))]` up to `tol`.
///
/// The equivalence holds for square `δ` with `δ(T)` an isometry and (A1) at
/// `T`; for rectangular `δ` the padded `δ(T)` is never an isometry and the
/// test is refused.
pub fn is_bpoint_range_test(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    tol: f64,
    search: &SearchOptions,
) -> Result<RangeVerdict> {
    let delta = h.delta();
    if delta.rows() != delta.cols() {
        return Err(Error::OracleInapplicable(format!(
            "range test needs a square delta, got {}x{}",
            delta.rows(),
            delta.cols()
        )));
    }
    crate::domain::require_distinguished(delta, t, search.tol.consistency)?;
    let assumption = check_assumption_a(delta, t, search)?;
    let model = solve_ut(h, t, &search.tol)?;
    Ok(RangeVerdict {
        is_bpoint: model.range_residual <= tol,
        range_residual: model.range_residual,
        conditional: !assumption.a1 || assumption.a1_inconclusive,
        assumption,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JuliaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `‖I − φ(Z)*φ(Z)‖` vanished, so the left side is undefined.
    pub skipped: bool,
}

/// `‖φ(Z)−W‖² / ‖I−φ(Z)*φ(Z)‖ ≤ α ‖I−δ(T)*δ(Z)‖² / (1−‖δ(Z)‖²)`.
pub fn julia_inequality_check(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    alpha: f64,
    z: &MatrixTuple,
) -> Result<JuliaCheck> {
    if t.n() != z.n() || w.shape() != (z.n(), z.n()) {
        return Err(Error::Dimension("T, W and Z must share the level n".into()));
    }
    let e = h.evaluate(z)?;
    let n = z.n();
    let phi_defect = operator_norm(&(identity(n) - e.phi.adjoint() * &e.phi));
    let dt = h.delta().eval(t)?;
    let dz = h.delta().eval(z)?;
    let geometric = operator_norm(&(identity(dz.ncols()) - dt.adjoint() * dz));
    let rhs = alpha * geometric * geometric / (1.0 - e.delta_norm * e.delta_norm);
    if phi_defect <= DEGENERATE {
        return Ok(JuliaCheck {
            lhs: f64::NAN,
            rhs,
            holds: true,
            skipped: true,
        });
    }
    let lhs = operator_norm(&(&e.phi - w)).powi(2) / phi_defect;
    Ok(JuliaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + JULIA_REL_TOL),
        skipped: false,
    })
}

/// `‖I − W*φ(Z) − u_T*(I⊗(I−δ(T)*δ(Z)))u(Z)‖`.
pub fn boundary_model_residual(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    u_t: &ComplexMatrix,
    z: &MatrixTuple,
) -> Result<f64> {
    let n = z.n();
    let e = h.evaluate(z)?;
    if t.n() != n || w.shape() != (n, n) || u_t.shape() != e.u.shape() {
        return Err(Error::Dimension("T, W, u_T and Z do not match".into()));
    }
    let dt = h.delta().eval(t)?;
    let dz = h.delta().eval(z)?;
    let kernel = kron(
        &identity(h.realization().dim_e()),
        &(identity(dz.ncols()) - dt.adjoint() * dz),
    );
    let r = identity(n) - w.adjoint() * &e.phi - u_t.adjoint() * kernel * &e.u;
    Ok(operator_norm(&r))
}

#[derive(Clone, Debug, Serialize)]
pub struct TfaePoint {
    pub t: f64,
    /// Non-tangential constant `c(Z)`.
    pub c: f64,
    /// `‖I−φ*φ‖ / ‖I−δ*δ‖`.
    pub q1: f64,
    /// `‖I−φ*φ‖ / (1−‖δ‖²)`.
    pub q2: f64,
    /// `‖u(Z)‖²`.
    pub q3: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TfaeReport {
    pub points: Vec<TfaePoint>,
    pub sup_c: f64,
    pub sup_q1: f64,
    pub sup_q2: f64,
    /// Bounds (iii) and (iv) alike: for a realization `u` is determined by `φ`.
    pub sup_q3: f64,
    /// Every point satisfies `1 ≤ q2/q1 ≤ 2c(Z)`.
    pub ratio_within_2c: bool,
    /// Largest `q2 / (2 c(Z) q1)`; at most one when the comparison holds.
    pub worst_ratio: f64,
    /// Every point satisfies `q3 ≤ q2` and, for square `δ`, `q1 ≤ q3`.
    pub chain_holds: bool,
    /// `sup q3 ≤ 2 · sup q1 · sup c`.
    pub u_bound_holds: bool,
    pub q1_bounded: bool,
    pub q3_bounded: bool,
}

const CHAIN_SLACK: f64 = 1e-9;

/// The four comparable quantities along the kept points of a sequence.
pub fn tfae_report(h: &NcFunctionHandle, seq: &ApproachSequence) -> Result<TfaeReport> {
    let generated = generate_sequence(seq, h.delta())?;
    tfae_report_on(h, seq, &generated)
}

fn tfae_report_on(
    h: &NcFunctionHandle,
    seq: &ApproachSequence,
    g: &GeneratedSequence,
) -> Result<TfaeReport> {
    tfae_report_points(h, &seq.base, &g.points)
}

/// [`tfae_report`] over explicit `(t, Z)` points approaching `base`.
pub fn tfae_report_points(
    h: &NcFunctionHandle,
    base: &MatrixTuple,
    sequence: &[(f64, MatrixTuple)],
) -> Result<TfaeReport> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    let delta = h.delta();
    let square = delta.rows() == delta.cols();
    let mut points = Vec::with_capacity(sequence.len());
    let mut ratio_ok = true;
    let mut chain_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (t, z) in sequence {
        let e = h.evaluate(z)?;
        let n = z.n();
        let phi_defect = operator_norm(&(identity(n) - e.phi.adjoint() * &e.phi));
        let dz = delta.eval_rect(z)?;
        let geo = operator_norm(&(identity(dz.ncols()) - dz.adjoint() * &dz));
        let c = nontangential_constant(delta, z, base)?;
        let q1 = phi_defect / geo;
        let q2 = phi_defect / (1.0 - e.delta_norm * e.delta_norm);
        let unorm = operator_norm(&e.u);
        let q3 = unorm * unorm;
        let ratio = geo / (1.0 - e.delta_norm * e.delta_norm);
        ratio_ok &=
            ratio >= 1.0 - CHAIN_SLACK && ratio <= 2.0 * c * (1.0 + CHAIN_SLACK) + CHAIN_SLACK;
        worst_ratio = worst_ratio.max(ratio / (2.0 * c));
        chain_ok &= q3 <= q2 * (1.0 + CHAIN_SLACK) + CHAIN_SLACK;
        if square {
            chain_ok &= q1 <= q3 * (1.0 + CHAIN_SLACK) + CHAIN_SLACK;
        }
        points.push(TfaePoint {
            t: *t,
            c,
            q1,
            q2,
            q3,
        });
    }
    let cs: Vec<f64> = points.iter().map(|p| p.c).collect();
    if grows(&cs) {
        return Err(Error::Tangential(
            "non-tangential constant grows along the sequence".into(),
        ));
    }
    let sup = |f: fn(&TfaePoint) -> f64| points.iter().map(f).fold(0.0, f64::max);
    let (sup_c, sup_q1, sup_q2, sup_q3) =
        (sup(|p| p.c), sup(|p| p.q1), sup(|p| p.q2), sup(|p| p.q3));
    let q1s: Vec<f64> = points.iter().map(|p| p.q1).collect();
    let q3s: Vec<f64> = points.iter().map(|p| p.q3).collect();
    Ok(TfaeReport {
        ratio_within_2c: ratio_ok,
        worst_ratio,
        chain_holds: chain_ok,
        u_bound_holds: sup_q3 <= 2.0 * sup_q1 * sup_c * (1.0 + CHAIN_SLACK) + CHAIN_SLACK,
        q1_bounded: !grows(&q1s),
        q3_bounded: !grows(&q3s),
        points,
        sup_c,
        sup_q1,
        sup_q2,
        sup_q3,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceMeta {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<MatrixTuple>,
    pub steps: Vec<f64>,
    pub kept: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BPointReport {
    #[serde(rename = "T")]
    pub t: MatrixTuple,
    pub on_distinguished_boundary: bool,
    pub sequence: SequenceMeta,
    pub alpha: AlphaEstimate,
    pub alpha_estimate: f64,
    #[serde(rename = "W")]
    pub w: Option<BoundaryValue>,
    pub u_t: Option<BoundaryModel>,
    pub range_residual: Option<f64>,
    pub range_test: Option<RangeVerdict>,
    /// Largest residual of the boundary model identity over the sample set.
    pub boundary_model_residual: Option<f64>,
    pub julia_checked: usize,
    pub julia_violations: usize,
    pub julia_skipped: usize,
    pub tfae: Option<TfaeReport>,
    /// Verdict and what it rests on: `"range-test"` or `"quotients"`.
    pub is_bpoint: bool,
    pub verdict_basis: &'static str,
    pub conditional: bool,
    /// Problems met while assembling the report.
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    /// Random interior points for the Julia inequality and the model identity.
    pub samples: usize,
    pub seed: u64,
    pub range_tol: f64,
    pub search: SearchOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            range_tol: 1e-8,
            search: SearchOptions::default(),
        }
    }
}

/// Random points of `G_δ` at level `n`, see [`random_interior_point`].
pub fn random_interior_points(
    h: &NcFunctionHandle,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<MatrixTuple>> {
    let mut rng = random::rng(seed);
    (0..count)
        .map(|_| random_interior_point(h.delta(), n, 0.999, &mut rng))
        .collect()
}

/// Full boundary diagnostics at `T` along `seq`.
///
/// On the distinguished boundary the verdict comes from the range test;
/// elsewhere only the quotient-based checks run.
pub fn bpoint_report(
    h: &NcFunctionHandle,
    seq: &ApproachSequence,
    opts: &ReportOptions,
) -> Result<BPointReport> {
    let t = &seq.base;
    let delta = h.delta();
    let membership = in_g_delta(delta, t)?;
    if membership.inside {
        return Err(Error::Contract(format!(
            "T is interior (norm of delta(T) is {}), not a boundary point",
            membership.norm
        )));
    }
    let distinguished = on_distinguished_boundary(delta, t, opts.search.tol.consistency)?;
    let generated = generate_sequence(seq, delta)?;
    let alpha = estimate_alpha_on(h, seq, &generated)?;
    let mut notes = Vec::new();

    let w = if alpha.bounded {
        match extract_w_on(h, seq, &generated) {
            Ok(w) => Some(w),
            Err(e) => {
                notes.push(format!("W: {e}"));
                None
            }
        }
    } else {
        notes.push("quotients grow along the sequence".into());
        None
    };

    let mut range_test = None;
    let mut u_t = None;
    if distinguished {
        match is_bpoint_range_test(h, t, opts.range_tol, &opts.search) {
            Ok(v) => range_test = Some(v),
            Err(e) => notes.push(format!("range test: {e}")),
        }
        u_t = Some(solve_ut(h, t, &opts.search.tol)?);
    }

    let samples = random_interior_points(h, t.n(), opts.samples, opts.seed)?;
    let mut julia_checked = 0;
    let mut julia_violations = 0;
    let mut julia_skipped = 0;
    let mut model_worst: Option<f64> = None;
    if let Some(bv) = &w {
        for z in &samples {
            let check = julia_inequality_check(h, t, &bv.w, alpha.alpha, z)?;
            if check.skipped {
                julia_skipped += 1;
            } else {
                julia_checked += 1;
                julia_violations += usize::from(!check.holds);
            }
        }
        if let (Some(model), Some(rt)) = (&u_t, &range_test) {
            if rt.is_bpoint {
                let mut worst: f64 = 0.0;
                for z in &samples {
                    worst = worst.max(boundary_model_residual(h, t, &bv.w, &model.u_t, z)?);
                }
                model_worst = Some(worst);
            }
        }
    }

    let tfae = if distinguished {
        match tfae_report_on(h, seq, &generated) {
            Ok(r) => Some(r),
            Err(e) => {
                notes.push(format!("tfae: {e}"));
                None
            }
        }
    } else {
        None
    };

    let (is_bpoint, verdict_basis, conditional) = match &range_test {
        Some(v) => (v.is_bpoint, "range-test", v.conditional),
        None => (alpha.bounded && w.is_some(), "quotients", true),
    };
    let (rule, direction) = match &seq.rule {
        ApproachRule::Radial => ("radial", None),
        ApproachRule::Ray(k) => ("ray", Some(k.clone())),
    };
    Ok(BPointReport {
        t: t.clone(),
        on_distinguished_boundary: distinguished,
        sequence: SequenceMeta {
            rule,
            direction,
            steps: seq.steps.clone(),
            kept: generated.points.len(),
            dropped: generated.dropped,
        },
        alpha_estimate: alpha.alpha,
        alpha,
        w,
        range_residual: u_t.as_ref().map(|m| m.range_residual),
        u_t,
        range_test,
        boundary_model_residual: model_worst,
        julia_checked,
        julia_violations,
        julia_skipped,
        tfae,
        is_bpoint,
        verdict_basis,
        conditional,
        notes,
    })
}
