//! Schur-class functions given by an isometric colligation.
//!
//! For a colligation
//!
//! ```text
//! [ A  B ] : ℂ ⊕ (E ⊗ ℂ^J) → ℂ ⊕ (E ⊗ ℂ^J)
//! [ C  D ]
//! ```
//!
//! and a point `x` of level `n`, the model vector and the function value are
//!
//! ```text
//! u(x) = [I − (D ⊗ I_n)(I_E ⊗ δ(x))]⁻¹ (C ⊗ I_n)
//! φ(x) = A ⊗ I_n + (B ⊗ I_n)(I_E ⊗ δ(x)) u(x)
//! ```
//!
//! All tensor products use the ordering `E ⊗ ℂ^J ⊗ ℂ^n` with the `E` index
//! slowest and the `ℂ^n` index fastest. Because the colligation is an
//! isometry, `I − φ(y)*φ(x) = u(y)*(I_E ⊗ (I − δ(y)*δ(x)))u(x)`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::{in_g_delta, DeltaMatrix};
use crate::error::{Error, Result};
use crate::freepoly::MatrixTuple;
use crate::numerics::{
    self, condition_number, identity, isometry_defect, kron, operator_norm, ComplexMatrix,
};
use crate::random;

/// Largest accepted `‖M*M − I‖` for a colligation `M`.
pub const ISOMETRY_TOL: f64 = 1e-8;

/// Resolvent condition numbers above this are reported as near-singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    dim_e: usize,
    j: usize,
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl Realization {
    /// Validates block shapes and the isometry property.
    pub fn new(
        dim_e: usize,
        j: usize,
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        let r = Self::new_unvalidated(dim_e, j, a, b, c, d)?;
        let defect = r.isometry_defect();
        if defect > ISOMETRY_TOL {
            return Err(Error::NotIsometric { defect });
        }
        Ok(r)
    }

    /// Checks shapes only. Used to build non-isometric negative controls.
    pub fn new_unvalidated(
        dim_e: usize,
        j: usize,
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if dim_e == 0 || j == 0 {
            return Err(Error::Dimension("dim_E and J must be at least 1".into()));
        }
        let m = dim_e * j;
        let shapes = [
            ("A", a.shape(), (1, 1)),
            ("B", b.shape(), (1, m)),
            ("C", c.shape(), (m, 1)),
            ("D", d.shape(), (m, m)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::Dimension(format!(
                    "block {name} is {}x{}, expected {}x{}",
                    got.0, got.1, want.0, want.1
                )));
            }
        }
        for (name, blk) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if !numerics::is_finite(blk) {
                return Err(Error::Contract(format!(
                    "block {name} has non-finite entries"
                )));
            }
        }
        Ok(Self {
            dim_e,
            j,
            a,
            b,
            c,
            d,
        })
    }

    /// Splits a square `(1 + mJ)`-dimensional matrix into its four blocks.
    pub fn from_colligation(dim_e: usize, j: usize, m: &ComplexMatrix) -> Result<Self> {
        let size = 1 + dim_e * j;
        if m.shape() != (size, size) {
            return Err(Error::Dimension(format!(
                "colligation must be {size}x{size}"
            )));
        }
        let k = size - 1;
        Self::new(
            dim_e,
            j,
            m.view((0, 0), (1, 1)).into_owned(),
            m.view((0, 1), (1, k)).into_owned(),
            m.view((1, 0), (k, 1)).into_owned(),
            m.view((1, 1), (k, k)).into_owned(),
        )
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn colligation(&self) -> ComplexMatrix {
        let k = self.dim_e * self.j;
        let mut m = numerics::zeros(1 + k, 1 + k);
        m.view_mut((0, 0), (1, 1)).copy_from(&self.a);
        m.view_mut((0, 1), (1, k)).copy_from(&self.b);
        m.view_mut((1, 0), (k, 1)).copy_from(&self.c);
        m.view_mut((1, 1), (k, k)).copy_from(&self.d);
        m
    }

    pub fn isometry_defect(&self) -> f64 {
        isometry_defect(&self.colligation())
    }

    /// Replaces `D`, skipping validation.
    pub fn with_d_unvalidated(&self, d: ComplexMatrix) -> Result<Self> {
        Self::new_unvalidated(
            self.dim_e,
            self.j,
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            d,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationWire {
    #[serde(rename = "dim_E")]
    dim_e: usize,
    #[serde(rename = "J")]
    j: usize,
    #[serde(rename = "A", with = "numerics::json")]
    a: ComplexMatrix,
    #[serde(rename = "B", with = "numerics::json")]
    b: ComplexMatrix,
    #[serde(rename = "C", with = "numerics::json")]
    c: ComplexMatrix,
    #[serde(rename = "D", with = "numerics::json")]
    d: ComplexMatrix,
}

impl Serialize for Realization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RealizationWire {
            dim_e: self.dim_e,
            j: self.j,
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        }
        .serialize(s)
    }
}

/// Deserialization rejects colligations that are not isometric.
impl<'de> Deserialize<'de> for Realization {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = RealizationWire::deserialize(d)?;
        Realization::new(w.dim_e, w.j, w.a, w.b, w.c, w.d).map_err(D::Error::custom)
    }
}

/// Haar-random unitary colligation on `ℂ ⊕ (ℂ^{dim_e} ⊗ ℂ^J)`.
pub fn random_realization(dim_e: usize, j: usize, seed: u64) -> Result<Realization> {
    if dim_e == 0 || j == 0 {
        return Err(Error::Dimension("dim_E and J must be at least 1".into()));
    }
    let mut rng = random::rng(seed);
    let u = random::haar_unitary(1 + dim_e * j, &mut rng);
    Realization::from_colligation(dim_e, j, &u)
}

/// A realization paired with the `δ` it is built over.
#[derive(Clone, Debug)]
pub struct NcFunctionHandle {
    realization: Realization,
    delta: DeltaMatrix,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub phi: ComplexMatrix,
    pub u: ComplexMatrix,
    pub delta_norm: f64,
    /// Condition number of `I − (D⊗I)(I⊗δ(x))`.
    pub condition: f64,
}

#[derive(Clone, Debug)]
pub struct NeumannEvaluation {
    pub phi: ComplexMatrix,
    /// `‖(D⊗I)(I⊗δ(x))‖`.
    pub q: f64,
    /// `q^{terms+1} / (1 − q)`.
    pub truncation_bound: f64,
}

impl NcFunctionHandle {
    pub fn new(realization: Realization, delta: DeltaMatrix) -> Result<Self> {
        if realization.j() != delta.j() {
            return Err(Error::Dimension(format!(
                "realization has J={}, delta has J={}",
                realization.j(),
                delta.j()
            )));
        }
        Ok(Self { realization, delta })
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn delta(&self) -> &DeltaMatrix {
        &self.delta
    }

    /// `I_E ⊗ δ(x)` with `δ` padded to `J×J`.
    pub fn lifted_delta(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        Ok(kron(
            &identity(self.realization.dim_e),
            &self.delta.eval(x)?,
        ))
    }

    /// `(D ⊗ I_n)(I_E ⊗ δ(x))`, defined for every `x` (interior or not).
    pub fn transfer(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        let n = x.n();
        Ok(kron(&self.realization.d, &identity(n)) * self.lifted_delta(x)?)
    }

    /// `I − (D ⊗ I_n)(I_E ⊗ δ(x))`.
    pub fn resolvent_matrix(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        let k = self.transfer(x)?;
        Ok(identity(k.nrows()) - k)
    }

    /// `C ⊗ I_n`.
    pub fn lifted_c(&self, n: usize) -> ComplexMatrix {
        kron(&self.realization.c, &identity(n))
    }

    fn require_interior(&self, x: &MatrixTuple) -> Result<f64> {
        let m = in_g_delta(&self.delta, x)?;
        if !m.inside {
            return Err(Error::NotInDomain { norm: m.norm });
        }
        Ok(m.norm)
    }

    fn solve_u(&self, x: &MatrixTuple) -> Result<(ComplexMatrix, f64)> {
        let m = self.resolvent_matrix(x)?;
        let condition = condition_number(&m);
        if condition > MAX_CONDITION {
            return Err(Error::NearSingular { condition });
        }
        let u = m
            .lu()
            .solve(&self.lifted_c(x.n()))
            .ok_or(Error::NearSingular {
                condition: f64::INFINITY,
            })?;
        Ok((u, condition))
    }

    /// Model vector `u(x)`, an `(mJn)×n` matrix.
    pub fn eval_u(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        self.require_interior(x)?;
        Ok(self.solve_u(x)?.0)
    }

    /// `φ(x)` by a direct solve of the resolvent system.
    pub fn eval_phi(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        Ok(self.evaluate(x)?.phi)
    }

    /// `φ(x)` together with `u(x)`, `‖δ(x)‖` and the resolvent condition.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<Evaluation> {
        let delta_norm = self.require_interior(x)?;
        let (u, condition) = self.solve_u(x)?;
        let n = x.n();
        let phi = kron(&self.realization.a, &identity(n))
            + kron(&self.realization.b, &identity(n)) * self.lifted_delta(x)? * &u;
        Ok(Evaluation {
            phi,
            u,
            delta_norm,
            condition,
        })
    }

    /// `φ(x)` from the truncated Neumann series of the resolvent.
    pub fn eval_phi_neumann(&self, x: &MatrixTuple, terms: usize) -> Result<NeumannEvaluation> {
        let n = x.n();
        let k = self.transfer(x)?;
        let q = operator_norm(&k);
        if q >= 1.0 {
            return Err(Error::OracleInapplicable(format!(
                "Neumann series needs ||(D x I)(I x delta(x))|| < 1, got {q}"
            )));
        }
        let mut power = self.lifted_c(n);
        let mut sum = power.clone();
        for _ in 0..terms {
            power = &k * power;
            sum += &power;
        }
        let phi = kron(&self.realization.a, &identity(n))
            + kron(&self.realization.b, &identity(n)) * self.lifted_delta(x)? * sum;
        Ok(NeumannEvaluation {
            phi,
            q,
            truncation_bound: q.powi(terms as i32 + 1) / (1.0 - q),
        })
    }

    /// `‖I − φ(y)*φ(x) − u(y)*(I_E ⊗ (I − δ(y)*δ(x)))u(x)‖`.
    pub fn model_residual(&self, x: &MatrixTuple, y: &MatrixTuple) -> Result<f64> {
        if x.n() != y.n() {
            return Err(Error::Dimension(format!(
                "points have levels {} and {}",
                x.n(),
                y.n()
            )));
        }
        let ex = self.evaluate(x)?;
        let ey = if x == y {
            ex.clone()
        } else {
            self.evaluate(y)?
        };
        let n = x.n();
        let dx = self.delta.eval(x)?;
        let dy = self.delta.eval(y)?;
        let kernel = kron(
            &identity(self.realization.dim_e),
            &(identity(dx.nrows()) - dy.adjoint() * dx),
        );
        let lhs = identity(n) - ey.phi.adjoint() * &ex.phi;
        let rhs = ey.u.adjoint() * kernel * &ex.u;
        Ok(operator_norm(&(lhs - rhs)))
    }
}

pub fn eval_u(h: &NcFunctionHandle, x: &MatrixTuple) -> Result<ComplexMatrix> {
    h.eval_u(x)
}

pub fn eval_phi(h: &NcFunctionHandle, x: &MatrixTuple) -> Result<ComplexMatrix> {
    h.eval_phi(x)
}

pub fn eval_phi_neumann(
    h: &NcFunctionHandle,
    x: &MatrixTuple,
    terms: usize,
) -> Result<NeumannEvaluation> {
    h.eval_phi_neumann(x, terms)
}

pub fn model_residual(h: &NcFunctionHandle, x: &MatrixTuple, y: &MatrixTuple) -> Result<f64> {
    h.model_residual(x, y)
}

/// Scalar value of a `1×1` evaluation.
pub fn scalar(m: &ComplexMatrix) -> Complex64 {
    m[(0, 0)]
}
