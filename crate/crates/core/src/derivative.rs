//! One-sided directional derivatives at boundary points.
//!
//! At a B-point `T` with boundary value `W`, the limit
//!
//! ```text
//! η(H) = lim_{t↓0} (φ(T + tH) − W) / t
//! ```
//!
//! exists for inward `H` and is homogeneous of degree one in `H`. It is
//! computed here from difference quotients on a halving ladder of steps.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{
    halving_steps, in_delta, in_g_delta, require_distinguished, transversality_margin,
};
use crate::error::{Error, Result};
use crate::freepoly::MatrixTuple;
use crate::numerics::{self, extrapolate_limit, operator_norm, ComplexMatrix};
use crate::realization::NcFunctionHandle;

/// Halving ladder `t_k = t0 · 2^{−k}`, `k = 0..steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ladder {
    pub t0: f64,
    pub steps: usize,
    /// No step may go below this.
    pub t_min: f64,
}

impl Default for Ladder {
    fn default() -> Self {
        Self {
            t0: 1e-2,
            steps: 6,
            t_min: 1e-8,
        }
    }
}

impl Ladder {
    pub fn with_t0(self, t0: f64) -> Self {
        Self { t0, ..self }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionalDerivativeResult {
    #[serde(rename = "H")]
    pub h: MatrixTuple,
    #[serde(with = "numerics::json")]
    pub eta: ComplexMatrix,
    pub increments: Vec<f64>,
    pub in_gamma: bool,
    /// `−λ_max(Re[δ(T)*∇δ(T)[H]])`.
    pub beta: f64,
    pub converged: bool,
    /// Steps actually used, after shrinking `t0` into `G_δ`.
    pub t_values: Vec<f64>,
}

const CONSISTENCY: f64 = 1e-8;

fn shrinking(increments: &[f64], scale: f64) -> bool {
    match increments {
        [] => false,
        [.., last] if *last <= 1e-8 * scale => true,
        [.., prev, last] => *last <= 0.75 * prev,
        _ => false,
    }
}

/// Largest `t0' = t0 · 2^{−j}` whose whole ladder `T + t H` lies in `G_δ`.
fn admissible_steps(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    dir: &MatrixTuple,
    ladder: &Ladder,
) -> Result<Vec<f64>> {
    if ladder.steps < 2
        || ladder.t0.is_nan()
        || ladder.t0 <= 0.0
        || ladder.t_min.is_nan()
        || ladder.t_min <= 0.0
    {
        return Err(Error::Contract(
            "ladder needs t0 > 0, t_min > 0 and at least 2 steps".into(),
        ));
    }
    let mut t0 = ladder.t0;
    loop {
        let steps = halving_steps(t0, ladder.steps);
        if *steps.last().expect("at least 2 steps") < ladder.t_min {
            return Err(Error::NoAdmissibleStep {
                t_min: ladder.t_min,
            });
        }
        let mut inside = true;
        for &s in &steps {
            let z = t.add_scaled(Complex64::new(s, 0.0), dir)?;
            if !in_g_delta(h.delta(), &z)?.inside {
                inside = false;
                break;
            }
        }
        if inside {
            return Ok(steps);
        }
        t0 *= 0.5;
    }
}

/// `η(H)` by first-order extrapolation of `(φ(T + t_k H) − W) / t_k`.
pub fn eta_numeric(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    dir: &MatrixTuple,
    ladder: &Ladder,
) -> Result<DirectionalDerivativeResult> {
    require_distinguished(h.delta(), t, CONSISTENCY)?;
    if dir.d() != t.d() || dir.n() != t.n() || w.shape() != (t.n(), t.n()) {
        return Err(Error::Dimension("T, W and H must share d and n".into()));
    }
    let norm = dir.norm();
    if norm > 1.0 + 1e-12 {
        return Err(Error::DirectionTooLarge { norm });
    }
    let beta = transversality_margin(h.delta(), t, dir)?;
    if beta <= 0.0 {
        return Err(Error::NotInward(format!(
            "Re[delta(T)* grad delta(T)[H]] has largest eigenvalue {}",
            -beta
        )));
    }
    let steps = admissible_steps(h, t, dir, ladder)?;
    let samples = steps
        .iter()
        .map(|&s| {
            let z = t.add_scaled(Complex64::new(s, 0.0), dir)?;
            Ok((s, (h.eval_phi(&z)? - w).unscale(s)))
        })
        .collect::<Result<Vec<_>>>()?;
    let ex = extrapolate_limit(&samples)?;
    let converged = shrinking(&ex.increments, 1.0 + operator_norm(&ex.limit));
    Ok(DirectionalDerivativeResult {
        h: dir.clone(),
        eta: ex.limit,
        increments: ex.increments,
        in_gamma: true,
        beta,
        converged,
        t_values: steps,
    })
}

/// `‖η(sH) − s η(H)‖` with `η(sH)` from a fresh run on the same ladder.
pub fn homogeneity_check(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    result: &DirectionalDerivativeResult,
    s: f64,
    ladder: &Ladder,
) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Contract(format!(
            "homogeneity factor must lie in (0, 1], got {s}"
        )));
    }
    let scaled = eta_numeric(h, t, w, &result.h.scale(Complex64::new(s, 0.0)), ladder)?;
    Ok(operator_norm(&(scaled.eta - result.eta.scale(s))))
}

/// `‖η_{t0}(H) − η_{t0/3}(H)‖`: two ladders with no common step.
pub fn ladder_independence(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    dir: &MatrixTuple,
    ladder: &Ladder,
) -> Result<f64> {
    let a = eta_numeric(h, t, w, dir, ladder)?;
    let b = eta_numeric(h, t, w, dir, &ladder.with_t0(ladder.t0 / 3.0))?;
    Ok(operator_norm(&(a.eta - b.eta)))
}

#[derive(Clone, Debug, Serialize)]
pub struct AngularDerivative {
    pub re: f64,
    pub im: f64,
    pub increments: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl AngularDerivative {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Derivative at `0⁺` of the slice `f(t) = ⟨φ(T + tK)v, Wv⟩` for `K ∈ Δ(T)`;
/// `v` defaults to the first basis vector.
pub fn scalar_angular_derivative(
    h: &NcFunctionHandle,
    t: &MatrixTuple,
    w: &ComplexMatrix,
    k: &MatrixTuple,
    v: Option<&DVector<Complex64>>,
    ladder: &Ladder,
) -> Result<AngularDerivative> {
    require_distinguished(h.delta(), t, CONSISTENCY)?;
    let n = t.n();
    let v = match v {
        Some(v) if v.len() == n && v.norm() > 0.0 => v.unscale(v.norm()),
        Some(_) => {
            return Err(Error::Dimension(format!(
                "v must be a nonzero vector of length {n}"
            )))
        }
        None => {
            let mut e = DVector::zeros(n);
            e[0] = Complex64::new(1.0, 0.0);
            e
        }
    };
    if !in_delta(h.delta(), t, k, 0.0, CONSISTENCY)?
        || transversality_margin(h.delta(), t, k)? <= 0.0
    {
        return Err(Error::NotInward(
            "K is not in the transverse inward set".into(),
        ));
    }
    let steps = admissible_steps(h, t, k, ladder)?;
    let wv = w * &v;
    let f0 = wv.dotc(&wv);
    let samples = steps
        .iter()
        .map(|&s| {
            let z = t.add_scaled(Complex64::new(s, 0.0), k)?;
            let ft = wv.dotc(&(h.eval_phi(&z)? * &v));
            Ok((s, (ft - f0) / s))
        })
        .collect::<Result<Vec<_>>>()?;
    let (value, increments) = numerics::extrapolate_scalar(&samples)?;
    if !shrinking(&increments, 1.0 + value.norm()) {
        return Err(Error::Divergent(format!(
            "difference quotients do not settle: increments {increments:?}"
        )));
    }
    Ok(AngularDerivative {
        re: value.re,
        im: value.im,
        increments,
        t_values: steps,
    })
}

/// `‖a − b‖ / ‖b‖`, or the absolute error when `b` vanishes.
pub fn relative_error(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = operator_norm(b);
    let err = operator_norm(&(a - b));
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}
