//! Built-in domains and the two-variable worked example.
//!
//! The example is the rational inner function
//! `f(z,w) = (z + w − 2zw) / (2 − z − w)` on the bidisk. Its unitary
//! realization [`example_h1`] extends it to the non-commutative bidisk, where
//! it agrees with the closed form [`example_phi_closed`]. [`example_psi`] is a
//! second nc extension of `f` that is *not* contractive, and [`example_eta`]
//! is the directional derivative of the extension at `(I, I)`.

use num_complex::Complex64;

use crate::domain::DeltaMatrix;
use crate::error::{Error, Result};
use crate::freepoly::{FreePolynomial, MatrixTuple};
use crate::numerics::{identity, operator_norm, ComplexMatrix};
use crate::random::{self, SeededRng};
use crate::realization::{NcFunctionHandle, Realization};

fn var(d: usize, i: usize) -> FreePolynomial {
    FreePolynomial::var(d, i).expect("index below d")
}

/// `diag(x0, …, x{d-1})`.
pub fn polydisk_delta(d: usize) -> DeltaMatrix {
    let entries = (0..d)
        .map(|r| {
            (0..d)
                .map(|c| {
                    if r == c {
                        var(d, r)
                    } else {
                        FreePolynomial::zero(d)
                    }
                })
                .collect()
        })
        .collect();
    DeltaMatrix::new(d, entries).expect("square grid")
}

/// The column `(x0, …, x{d-1})ᵀ`; `J = d` after padding.
pub fn ball_delta(d: usize) -> DeltaMatrix {
    DeltaMatrix::new(d, (0..d).map(|r| vec![var(d, r)]).collect()).expect("column grid")
}

/// Symmetric `J×J` matrix of `J(J+1)/2` variables, upper triangle in
/// row-major order (`x0 = (0,0)`, `x1 = (0,1)`, …).
#[allow(clippy::needless_range_loop)]
pub fn cartan_delta(j: usize) -> DeltaMatrix {
    let d = j * (j + 1) / 2;
    let mut index = vec![vec![0; j]; j];
    let mut k = 0;
    for r in 0..j {
        for c in r..j {
            index[r][c] = k;
            index[c][r] = k;
            k += 1;
        }
    }
    let entries = index
        .iter()
        .map(|row| row.iter().map(|&i| var(d, i)).collect())
        .collect();
    DeltaMatrix::new(d, entries).expect("square grid")
}

/// The colligation `[[0, B], [C, D]]` with `B = Cᵀ = (1/√2, 1/√2)` and
/// `D = ½[[1, −1], [−1, 1]]` over the bidisk (`E = ℂ`, `J = 2`).
pub fn example_h1_realization() -> Realization {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    Realization::new(
        1,
        2,
        ComplexMatrix::from_element(1, 1, r(0.0)),
        ComplexMatrix::from_row_slice(1, 2, &[r(s), r(s)]),
        ComplexMatrix::from_row_slice(2, 1, &[r(s), r(s)]),
        ComplexMatrix::from_row_slice(2, 2, &[r(0.5), r(-0.5), r(-0.5), r(0.5)]),
    )
    .expect("the example colligation is unitary")
}

pub fn example_h1() -> NcFunctionHandle {
    NcFunctionHandle::new(example_h1_realization(), polydisk_delta(2)).expect("J matches")
}

/// `f(z, w) = (z + w − 2wz) / (2 − z − w)`.
pub fn example_f(z: Complex64, w: Complex64) -> Result<Complex64> {
    let den = Complex64::new(2.0, 0.0) - z - w;
    if den.norm() == 0.0 {
        return Err(Error::Pole("2 - z - w = 0".into()));
    }
    Ok((z + w - w * z * 2.0) / den)
}

fn require_pair(z: &MatrixTuple) -> Result<()> {
    if z.d() != 2 {
        return Err(Error::Dimension(format!(
            "example functions take pairs, got d={}",
            z.d()
        )));
    }
    Ok(())
}

fn inverse(m: ComplexMatrix, what: &str) -> Result<ComplexMatrix> {
    if crate::numerics::condition_number(&m) > 1e14 {
        return Err(Error::Pole(format!("{what} is singular")));
    }
    m.try_inverse()
        .ok_or_else(|| Error::Pole(format!("{what} is singular")))
}

/// `φ(Z) = ½(Z¹+Z²) + ½(Z¹−Z²)(2 − Z¹ − Z²)⁻¹(Z¹−Z²)`.
pub fn example_phi_closed(z: &MatrixTuple) -> Result<ComplexMatrix> {
    require_pair(z)?;
    let (a, b) = (z.component(0), z.component(1));
    let n = z.n();
    let res = inverse(identity(n).scale(2.0) - a - b, "2 - Z1 - Z2")?;
    let diff = a - b;
    Ok((a + b).scale(0.5) + (&diff * res * &diff).scale(0.5))
}

/// `ψ(Z) = (Z¹ + Z² − Z¹Z² − Z²Z¹)(2I − Z¹ − Z²)⁻¹`; agrees with `f` on
/// commuting pairs but leaves the Schur class.
pub fn example_psi(z: &MatrixTuple) -> Result<ComplexMatrix> {
    require_pair(z)?;
    let (a, b) = (z.component(0), z.component(1));
    let n = z.n();
    let res = inverse(identity(n).scale(2.0) - a - b, "2I - Z1 - Z2")?;
    Ok((a + b - a * b - b * a) * res)
}

/// `η(H) = ½(H¹+H²) − ½(H¹−H²)(H¹+H²)⁻¹(H¹−H²)`.
pub fn example_eta(h: &MatrixTuple) -> Result<ComplexMatrix> {
    require_pair(h)?;
    let (a, b) = (h.component(0), h.component(1));
    let sum = a + b;
    let inv = inverse(sum.clone(), "H1 + H2")?;
    let diff = a - b;
    Ok(sum.scale(0.5) - (&diff * inv * &diff).scale(0.5))
}

/// Random `H = (H¹, H²)` with `‖H‖ = 1` and `Re Hʳ` negative definite:
/// an inward direction at `(Iₙ, Iₙ)` on the bidisk.
pub fn random_inward_pair(n: usize, rng: &mut SeededRng) -> MatrixTuple {
    let component = |rng: &mut SeededRng| {
        let g = random::gaussian_matrix(n, n, rng);
        let p = &g * g.adjoint();
        let p = p.unscale(operator_norm(&p).max(1e-300)) + identity(n).scale(0.25);
        let s = random::gaussian_matrix(n, n, rng);
        let skew = (&s - s.adjoint()).scale(0.25);
        skew - p
    };
    let h = MatrixTuple::new(vec![component(rng), component(rng)]).expect("square components");
    let norm = h.norm();
    h.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Random point of the distinguished boundary of a built-in domain at
/// level `n`: a tuple of unitaries for `polydisk:d`, the blocks of a random
/// isometry for `ball:d`, and `S ⊗ Iₙ` with `S = UUᵀ` a symmetric unitary for
/// `cartan:J`.
pub fn random_distinguished_point(
    name: &str,
    n: usize,
    rng: &mut SeededRng,
) -> Result<MatrixTuple> {
    let fx = fixture(name)?;
    let d = fx.delta.d();
    match name.split_once(':').map(|p| p.0).unwrap_or(name) {
        "polydisk" | "example-h1" | "example-h3-eta" => Ok(random::unitary_tuple(d, n, rng)),
        "ball" => {
            let u = random::haar_unitary(d * n, rng);
            let blocks = (0..d)
                .map(|r| u.view((r * n, 0), (n, n)).into_owned())
                .collect();
            MatrixTuple::new(blocks)
        }
        "cartan" => {
            let j = fx.delta.j();
            let u = random::haar_unitary(j, rng);
            let s = &u * u.transpose();
            let mut comps = Vec::with_capacity(d);
            for r in 0..j {
                for c in r..j {
                    comps.push(identity(n) * s[(r, c)]);
                }
            }
            MatrixTuple::new(comps)
        }
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

/// Named closed-form evaluators attached to a fixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// Closed form of the realization's function.
    Phi,
    Psi,
    /// Directional derivative at `(I, I)`.
    Eta,
}

impl ClosedForm {
    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::Phi => "phi",
            ClosedForm::Psi => "psi",
            ClosedForm::Eta => "eta",
        }
    }

    pub fn eval(self, z: &MatrixTuple) -> Result<ComplexMatrix> {
        match self {
            ClosedForm::Phi => example_phi_closed(z),
            ClosedForm::Psi => example_psi(z),
            ClosedForm::Eta => example_eta(z),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub delta: DeltaMatrix,
    pub realization: Option<Realization>,
    pub closed_forms: Vec<ClosedForm>,
}

impl Fixture {
    pub fn handle(&self) -> Option<NcFunctionHandle> {
        self.realization
            .clone()
            .map(|r| NcFunctionHandle::new(r, self.delta.clone()).expect("fixture J matches"))
    }
}

/// Names understood by [`fixture`], with a one-line description.
pub fn fixture_names() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "polydisk:<d>",
            "diagonal delta, the noncommutative polydisk in d variables",
        ),
        (
            "ball:<d>",
            "column delta, the noncommutative column ball in d variables",
        ),
        ("cartan:<J>", "symmetric JxJ delta in J(J+1)/2 variables"),
        (
            "example-h1",
            "unitary realization of (z+w-2zw)/(2-z-w) over polydisk:2",
        ),
        (
            "example-h3-eta",
            "closed-form directional derivative of example-h1 at (I,I)",
        ),
    ]
}

/// Looks up a built-in fixture by name.
pub fn fixture(name: &str) -> Result<Fixture> {
    let unknown = || Error::UnknownFixture(name.to_string());
    let parse_arg = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(unknown()),
        }
    };
    let plain = |delta: DeltaMatrix| Fixture {
        name: name.to_string(),
        delta,
        realization: None,
        closed_forms: Vec::new(),
    };
    match name.split_once(':') {
        Some(("polydisk", k)) => Ok(plain(polydisk_delta(parse_arg(k)?))),
        Some(("ball", k)) => Ok(plain(ball_delta(parse_arg(k)?))),
        Some(("cartan", k)) => Ok(plain(cartan_delta(parse_arg(k)?))),
        None if name == "example-h1" => Ok(Fixture {
            name: name.into(),
            delta: polydisk_delta(2),
            realization: Some(example_h1_realization()),
            closed_forms: vec![ClosedForm::Phi, ClosedForm::Psi, ClosedForm::Eta],
        }),
        None if name == "example-h3-eta" => Ok(Fixture {
            name: name.into(),
            delta: polydisk_delta(2),
            realization: Some(example_h1_realization()),
            closed_forms: vec![ClosedForm::Eta],
        }),
        _ => Err(unknown()),
    }
}
