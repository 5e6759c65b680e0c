//! Polynomial polyhedra `G_δ = { x : ‖δ(x)‖ < 1 }`.
//!
//! A [`DeltaMatrix`] keeps the grid of polynomials exactly as given (possibly
//! rectangular, e.g. the column defining the ball) and reports a square size
//! `J` obtained by zero padding. Transfer-function formulas work with the
//! padded `J×J` evaluation ([`eval_delta`]); the isometry test for the
//! distinguished boundary and the inward cones use the grid as given
//! ([`DeltaMatrix::eval_rect`]), because zero columns would destroy the
//! isometry property. Norms do not see the padding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::freepoly::{parse_poly, FreePolynomial, MatrixTuple};
use crate::numerics::{
    self, hermitian_part, hermitian_part_max_eig, identity, isometry_defect, operator_norm,
    ComplexMatrix, Tolerances,
};

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaMatrix {
    d: usize,
    j: usize,
    entries: Vec<Vec<FreePolynomial>>,
}

impl DeltaMatrix {
    /// Builds from a (possibly rectangular) grid; `J = max(rows, cols)`.
    pub fn new(d: usize, entries: Vec<Vec<FreePolynomial>>) -> Result<Self> {
        let j = entries.len().max(entries.first().map_or(0, Vec::len));
        Self::with_size(d, j, entries)
    }

    /// Builds with an explicit padded size `j ≥ max(rows, cols)`.
    pub fn with_size(d: usize, j: usize, entries: Vec<Vec<FreePolynomial>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("delta needs at least one entry".into()));
        }
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("delta rows have different lengths".into()));
        }
        if entries.iter().flatten().any(|p| p.d() != d) {
            return Err(Error::Dimension(format!(
                "every delta entry must have d={d}"
            )));
        }
        if j < rows.max(cols) {
            return Err(Error::Dimension(format!(
                "J={j} is smaller than the {rows}x{cols} grid"
            )));
        }
        Ok(Self { d, j, entries })
    }

    /// Parses every entry with [`parse_poly`].
    pub fn from_text(d: usize, grid: &[&[&str]]) -> Result<Self> {
        let entries = grid
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_poly(s, d))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, entries)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Size of the square padded matrix.
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn entries(&self) -> &[Vec<FreePolynomial>] {
        &self.entries
    }

    /// True iff every term of every entry has total degree one, so that
    /// `δ(rZ) = rδ(Z)`.
    pub fn is_homogeneous_linear(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_homogeneous(1))
    }

    fn check(&self, x: &MatrixTuple) -> Result<()> {
        if x.d() != self.d {
            return Err(Error::Dimension(format!(
                "delta has d={}, point has d={}",
                self.d,
                x.d()
            )));
        }
        Ok(())
    }

    fn assemble(
        &self,
        rows: usize,
        cols: usize,
        n: usize,
        mut block: impl FnMut(&FreePolynomial) -> Result<ComplexMatrix>,
    ) -> Result<ComplexMatrix> {
        let mut out = numerics::zeros(rows * n, cols * n);
        for (a, row) in self.entries.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                out.view_mut((a * n, b * n), (n, n)).copy_from(&block(p)?);
            }
        }
        Ok(out)
    }

    /// `δ(x)` as given, `(rows·n)×(cols·n)`.
    pub fn eval_rect(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        self.check(x)?;
        self.assemble(self.rows(), self.cols(), x.n(), |p| p.eval(x))
    }

    /// `δ(x)` zero-padded to `(J·n)×(J·n)`; block `(j,k)` is `δ_{jk}(x)`.
    pub fn eval(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        self.check(x)?;
        self.assemble(self.j, self.j, x.n(), |p| p.eval(x))
    }

    /// `∇δ(T)[H]` as given (unpadded).
    pub fn derivative_rect(&self, at: &MatrixTuple, dir: &MatrixTuple) -> Result<ComplexMatrix> {
        self.check(at)?;
        self.check(dir)?;
        self.assemble(self.rows(), self.cols(), at.n(), |p| {
            p.directional_derivative(at, dir)
        })
    }

    /// `∇δ(T)[H]` zero-padded to `J×J` blocks.
    pub fn derivative(&self, at: &MatrixTuple, dir: &MatrixTuple) -> Result<ComplexMatrix> {
        self.check(at)?;
        self.check(dir)?;
        self.assemble(self.j, self.j, at.n(), |p| {
            p.directional_derivative(at, dir)
        })
    }
}

#[derive(Serialize)]
struct DeltaWire {
    d: usize,
    #[serde(rename = "J")]
    j: usize,
    entries: Vec<Vec<FreePolynomial>>,
}

impl Serialize for DeltaMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DeltaWire {
            d: self.d,
            j: self.j,
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryInput {
    Text(String),
    Poly(FreePolynomial),
}

#[derive(Deserialize)]
struct DeltaInput {
    d: usize,
    #[serde(rename = "J")]
    j: usize,
    entries: Vec<Vec<EntryInput>>,
}

/// Entries may be polynomial objects or strings in the text grammar.
impl<'de> Deserialize<'de> for DeltaMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = DeltaInput::deserialize(d)?;
        let entries = w
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        EntryInput::Text(text) => parse_poly(&text, w.d),
                        EntryInput::Poly(p) => Ok(p),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        DeltaMatrix::with_size(w.d, w.j, entries).map_err(D::Error::custom)
    }
}

pub fn eval_delta(delta: &DeltaMatrix, x: &MatrixTuple) -> Result<ComplexMatrix> {
    delta.eval(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub norm: f64,
    /// `1 − ‖δ(x)‖`.
    pub margin: f64,
}

pub fn in_g_delta(delta: &DeltaMatrix, x: &MatrixTuple) -> Result<Membership> {
    let norm = operator_norm(&delta.eval_rect(x)?);
    Ok(Membership {
        inside: norm < 1.0,
        norm,
        margin: 1.0 - norm,
    })
}

/// `‖δ(T)*δ(T) − I‖` on the unpadded `δ`.
pub fn boundary_isometry_defect(delta: &DeltaMatrix, t: &MatrixTuple) -> Result<f64> {
    Ok(isometry_defect(&delta.eval_rect(t)?))
}

pub fn on_distinguished_boundary(delta: &DeltaMatrix, t: &MatrixTuple, tol: f64) -> Result<bool> {
    Ok(boundary_isometry_defect(delta, t)? <= tol)
}

/// `Ok(())` if `T` lies on the distinguished boundary, otherwise the defect.
pub fn require_distinguished(delta: &DeltaMatrix, t: &MatrixTuple, tol: f64) -> Result<()> {
    let defect = boundary_isometry_defect(delta, t)?;
    if defect > tol {
        return Err(Error::NotDistinguished { defect });
    }
    Ok(())
}

/// `c(Z) = ‖δ(Z) − δ(T)‖ / (1 − ‖δ(Z)‖²)`; infinite when `Z` is not interior.
pub fn nontangential_constant(
    delta: &DeltaMatrix,
    z: &MatrixTuple,
    t: &MatrixTuple,
) -> Result<f64> {
    let dz = delta.eval_rect(z)?;
    let dt = delta.eval_rect(t)?;
    if z.n() != t.n() {
        return Err(Error::Dimension("Z and T have different levels".into()));
    }
    let denom = 1.0 - operator_norm(&dz).powi(2);
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(operator_norm(&(dz - dt)) / denom)
}

/// `δ(T)* ∇δ(T)[H]` on the unpadded `δ`.
pub fn inward_matrix(
    delta: &DeltaMatrix,
    t: &MatrixTuple,
    h: &MatrixTuple,
) -> Result<ComplexMatrix> {
    if t.n() != h.n() {
        return Err(Error::Dimension("T and H have different levels".into()));
    }
    Ok(delta.eval_rect(t)?.adjoint() * delta.derivative_rect(t, h)?)
}

const NORM_SLACK: f64 = 1e-12;

fn require_unit_ball(h: &MatrixTuple) -> Result<()> {
    let norm = h.norm();
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::DirectionTooLarge { norm });
    }
    Ok(())
}

/// `−λ_max(Re[δ(T)*∇δ(T)[H]])`; positive iff the real part is negative definite.
pub fn transversality_margin(delta: &DeltaMatrix, t: &MatrixTuple, h: &MatrixTuple) -> Result<f64> {
    Ok(-hermitian_part_max_eig(&inward_matrix(delta, t, h)?)?)
}

/// `H ∈ Γ(T)`: `‖H‖ ≤ 1` and `Re[δ(T)*∇δ(T)[H]] ≤ −β`.
pub fn in_gamma(delta: &DeltaMatrix, t: &MatrixTuple, h: &MatrixTuple, beta: f64) -> Result<bool> {
    require_unit_ball(h)?;
    Ok(transversality_margin(delta, t, h)? >= beta)
}

/// `H ∈ Δ(T)`: the inward matrix is self-adjoint (within `tol`) and `≤ −β`.
pub fn in_delta(
    delta: &DeltaMatrix,
    t: &MatrixTuple,
    h: &MatrixTuple,
    beta: f64,
    tol: f64,
) -> Result<bool> {
    require_unit_ball(h)?;
    let m = inward_matrix(delta, t, h)?;
    Ok(numerics::is_self_adjoint(&m, tol)? && -hermitian_part_max_eig(&m)? >= beta)
}

/// `H ∈ Σ(T)`: the inward matrix is self-adjoint within `tol`.
pub fn in_sigma(delta: &DeltaMatrix, t: &MatrixTuple, h: &MatrixTuple, tol: f64) -> Result<bool> {
    require_unit_ball(h)?;
    numerics::is_self_adjoint(&inward_matrix(delta, t, h)?, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionReport {
    /// A witness `K ∈ Δ(T)` was found.
    pub a1: bool,
    pub a1_witness: Option<MatrixTuple>,
    /// Best `β` reached: `δ(T)*∇δ(T)[K] ≤ −β I` with `‖K‖ = 1`.
    pub a1_beta: f64,
    /// `a1 == false` only means the search found nothing.
    pub a1_inconclusive: bool,
    pub a2: bool,
    pub span_dim: usize,
    pub full_dim: usize,
    pub a: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            random_starts: 50,
            iterations: 200,
            seed: 0,
            tol: Tolerances::default(),
        }
    }
}

/// Real coordinates of `M_n^d`: entry `(r, i, j)` has real part at
/// `2(r n² + i n + j)` and imaginary part right after.
fn tuple_from_coords(coords: &[f64], d: usize, n: usize) -> MatrixTuple {
    let comps = (0..d)
        .map(|r| {
            ComplexMatrix::from_fn(n, n, |i, j| {
                let k = 2 * (r * n * n + i * n + j);
                Complex64::new(coords[k], coords[k + 1])
            })
        })
        .collect();
    MatrixTuple::new(comps).expect("uniform components")
}

fn coords_from_tuple(h: &MatrixTuple) -> Vec<f64> {
    let n = h.n();
    let mut out = vec![0.0; 2 * h.d() * n * n];
    for (r, m) in h.components().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let k = 2 * (r * n * n + i * n + j);
                out[k] = m[(i, j)].re;
                out[k + 1] = m[(i, j)].im;
            }
        }
    }
    out
}

/// Orthonormal basis (columns) of the numerical kernel of a real matrix.
fn real_kernel(m: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let (p, q) = m.shape();
    let padded = if p < q {
        let mut x = DMatrix::zeros(q, q);
        x.view_mut((0, 0), (p, q)).copy_from(m);
        x
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let cutoff = rel_cutoff * smax;
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= cutoff)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(q, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Real basis of `Σ(T)` in the coordinates of [`tuple_from_coords`], together
/// with the inward matrices of the basis elements.
struct SigmaBasis {
    coords: DMatrix<f64>,
    images: Vec<ComplexMatrix>,
}

fn sigma_basis(delta: &DeltaMatrix, t: &MatrixTuple, tol: &Tolerances) -> Result<SigmaBasis> {
    let (d, n) = (t.d(), t.n());
    let dim = 2 * d * n * n;
    // The inward map is complex linear: image of i·E is i times the image of E.
    let mut unit_images = Vec::with_capacity(dim);
    for k in 0..dim / 2 {
        let mut coords = vec![0.0; dim];
        coords[2 * k] = 1.0;
        let img = inward_matrix(delta, t, &tuple_from_coords(&coords, d, n))?;
        unit_images.push(img.clone());
        unit_images.push(img * Complex64::new(0.0, 1.0));
    }
    let m = unit_images[0].nrows();
    let mut constraint = DMatrix::<f64>::zeros(2 * m * m, dim);
    for (col, img) in unit_images.iter().enumerate() {
        let skew = img - img.adjoint();
        for (idx, z) in skew.iter().enumerate() {
            constraint[(2 * idx, col)] = z.re;
            constraint[(2 * idx + 1, col)] = z.im;
        }
    }
    let coords = real_kernel(&constraint, tol.rank);
    let images = coords
        .column_iter()
        .map(|c| {
            let img = c
                .iter()
                .zip(&unit_images)
                .fold(numerics::zeros(m, m), |acc, (&w, u)| {
                    acc + u * Complex64::new(w, 0.0)
                });
            hermitian_part(&img)
        })
        .collect();
    Ok(SigmaBasis { coords, images })
}

impl SigmaBasis {
    fn dim(&self) -> usize {
        self.images.len()
    }

    fn tuple(&self, c: &[f64], d: usize, n: usize) -> MatrixTuple {
        let v = &self.coords * nalgebra::DVector::from_column_slice(c);
        tuple_from_coords(v.as_slice(), d, n)
    }

    fn image(&self, c: &[f64]) -> ComplexMatrix {
        let m = self.images[0].nrows();
        c.iter()
            .zip(&self.images)
            .fold(numerics::zeros(m, m), |acc, (&w, img)| {
                acc + img * Complex64::new(w, 0.0)
            })
    }

    /// Orthogonal projection (in real coordinates) of an arbitrary tuple.
    fn project(&self, h: &MatrixTuple) -> Vec<f64> {
        let v = nalgebra::DVector::from_vec(coords_from_tuple(h));
        (self.coords.transpose() * v).iter().cloned().collect()
    }

    /// `λ_max(M(H)) / ‖H‖` and the top eigenvector.
    fn objective(
        &self,
        c: &[f64],
        d: usize,
        n: usize,
    ) -> Option<(f64, nalgebra::DVector<Complex64>)> {
        let norm = self.tuple(c, d, n).norm();
        if norm == 0.0 {
            return None;
        }
        let eig = nalgebra::SymmetricEigen::new(self.image(c));
        let (k, lmax) = eig.eigenvalues.iter().cloned().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, l)| if l > best.1 { (i, l) } else { best },
        );
        Some((lmax / norm, eig.eigenvectors.column(k).into_owned()))
    }
}

/// Checks `(A1)` (some `K ∈ Δ(T)`) and `(A2)` (`Σ(T)` spans `M_n^d`).
///
/// `(A1)` is a feasibility search, not a certificate: it minimises
/// `λ_max(δ(T)*∇δ(T)[H]) / ‖H‖` over the real subspace `Σ(T)`, trying `−T`
/// and the least-squares solution of `δ(T)*∇δ(T)[H] = −I` first, then
/// projected subgradient descent from random starts.
pub fn check_assumption_a(
    delta: &DeltaMatrix,
    t: &MatrixTuple,
    opts: &SearchOptions,
) -> Result<AssumptionReport> {
    require_distinguished(delta, t, opts.tol.consistency)?;
    let (d, n) = (t.d(), t.n());
    let full_dim = d * n * n;
    let basis = sigma_basis(delta, t, &opts.tol)?;

    let span_vectors: Vec<_> = basis
        .coords
        .column_iter()
        .map(|c| {
            nalgebra::DVector::from_fn(full_dim, |k, _| Complex64::new(c[2 * k], c[2 * k + 1]))
        })
        .collect();
    let span_dim = numerics::numerical_rank(&span_vectors, opts.tol.rank)?;
    let a2 = span_dim == full_dim;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let consider = |c: Vec<f64>, best: &mut Option<(f64, Vec<f64>)>| {
        if let Some((g, _)) = basis.objective(&c, d, n) {
            if best.as_ref().is_none_or(|(b, _)| g < *b) {
                *best = Some((g, c));
            }
        }
    };

    if basis.dim() > 0 {
        consider(
            basis.project(&t.scale(Complex64::new(-1.0, 0.0))),
            &mut best,
        );
        if let Some(h) = least_squares_direction(delta, t, &opts.tol)? {
            consider(basis.project(&h), &mut best);
        }
        if best.as_ref().is_none_or(|(g, _)| *g >= 0.0) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..opts.random_starts {
                let start: Vec<f64> = (0..basis.dim())
                    .map(|_| {
                        rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
                    })
                    .collect();
                let c = descend(&basis, start, d, n, opts.iterations);
                consider(c, &mut best);
            }
        }
    }

    let (a1, witness, beta) = match best {
        Some((g, c)) if g < 0.0 => {
            let h = basis.tuple(&c, d, n);
            let h = h.scale(Complex64::new(1.0 / h.norm(), 0.0));
            (true, Some(h), -g)
        }
        Some((g, _)) => (false, None, -g),
        None => (false, None, f64::NEG_INFINITY),
    };
    Ok(AssumptionReport {
        a1,
        a1_witness: witness,
        a1_beta: beta,
        a1_inconclusive: !a1,
        a2,
        span_dim,
        full_dim,
        a: a1 && a2,
    })
}

fn least_squares_direction(
    delta: &DeltaMatrix,
    t: &MatrixTuple,
    tol: &Tolerances,
) -> Result<Option<MatrixTuple>> {
    let (d, n) = (t.d(), t.n());
    let cols = d * n * n;
    let mut images = Vec::with_capacity(cols);
    for k in 0..cols {
        let mut coords = vec![0.0; 2 * cols];
        coords[2 * k] = 1.0;
        images.push(inward_matrix(delta, t, &tuple_from_coords(&coords, d, n))?);
    }
    let m = images[0].nrows();
    let system = ComplexMatrix::from_fn(m * m, cols, |row, col| images[col][(row / m, row % m)]);
    let target = -identity(m);
    let rhs = ComplexMatrix::from_fn(m * m, 1, |row, _| target[(row / m, row % m)]);
    let sol = numerics::min_norm_solve(&system, &rhs, tol)?.solution;
    let coords: Vec<f64> = sol.iter().flat_map(|z| [z.re, z.im]).collect();
    let h = tuple_from_coords(&coords, d, n);
    Ok((h.norm() > 0.0).then_some(h))
}

fn descend(basis: &SigmaBasis, mut c: Vec<f64>, d: usize, n: usize, iterations: usize) -> Vec<f64> {
    let mut best = c.clone();
    let mut best_g = f64::INFINITY;
    for k in 0..iterations {
        let Some((g, v)) = basis.objective(&c, d, n) else {
            break;
        };
        if g < best_g {
            best_g = g;
            best = c.clone();
        }
        let norm = basis.tuple(&c, d, n).norm();
        let step = 0.5 / ((k + 1) as f64).sqrt();
        for (ci, img) in c.iter_mut().zip(&basis.images) {
            let grad = (v.adjoint() * img * &v)[(0, 0)].re / norm;
            *ci -= step * grad;
        }
        let scale = basis.tuple(&c, d, n).norm();
        if scale == 0.0 {
            break;
        }
        c.iter_mut().for_each(|x| *x /= scale);
    }
    best
}

/// Random point of `G_δ` at level `n` with `‖δ(x)‖ < max_delta_norm`.
///
/// For `δ` homogeneous of degree one a random direction is rescaled to a
/// uniform radius; otherwise contractive tuples are drawn until one fits.
pub fn random_interior_point<R: rand::Rng + ?Sized>(
    delta: &DeltaMatrix,
    n: usize,
    max_delta_norm: f64,
    rng: &mut R,
) -> Result<MatrixTuple> {
    if !(max_delta_norm > 0.0 && max_delta_norm <= 1.0) {
        return Err(Error::Contract(format!(
            "max_delta_norm must lie in (0, 1], got {max_delta_norm}"
        )));
    }
    if delta.is_homogeneous_linear() {
        for _ in 0..100 {
            let x = crate::random::contractive_tuple(delta.d(), n, 1.0, rng);
            let norm = operator_norm(&delta.eval_rect(&x)?);
            if norm > 0.0 {
                let radius = rng.random::<f64>() * max_delta_norm;
                return Ok(x.scale(Complex64::new(radius / norm, 0.0)));
            }
        }
    } else {
        for _ in 0..10_000 {
            let x = crate::random::contractive_tuple(delta.d(), n, 1.0, rng);
            if operator_norm(&delta.eval_rect(&x)?) < max_delta_norm {
                return Ok(x);
            }
        }
    }
    Err(Error::Contract("could not sample an interior point".into()))
}

/// How points approach the base point `T`.
#[derive(Clone, Debug, PartialEq)]
pub enum ApproachRule {
    /// `Z = (1 − t) T`, i.e. `r = 1 − t ↑ 1`.
    Radial,
    /// `Z = T + t K`.
    Ray(MatrixTuple),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproachSequence {
    pub base: MatrixTuple,
    pub rule: ApproachRule,
    /// Decreasing step parameters `t`.
    pub steps: Vec<f64>,
}

/// Radial ladder length used by reports: `t` runs down to `2^{−20}`, small
/// enough that the first-order extrapolation error is below `1e-10` for
/// smooth boundary behaviour, large enough that rounding in a singular
/// resolvent stays below `1e-9`.
pub const DEFAULT_RADIAL_STEPS: usize = 20;

/// `t_k = t0 · 2^{−k}` for `k = 0..count`.
pub fn halving_steps(t0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 * 0.5f64.powi(k as i32)).collect()
}

impl ApproachSequence {
    /// `r_k = 1 − 2^{−k}`, `k = 1..=count`.
    pub fn radial(base: MatrixTuple, count: usize) -> Self {
        Self {
            base,
            rule: ApproachRule::Radial,
            steps: halving_steps(0.5, count),
        }
    }

    pub fn ray(base: MatrixTuple, dir: MatrixTuple, t0: f64, count: usize) -> Self {
        Self {
            base,
            rule: ApproachRule::Ray(dir),
            steps: halving_steps(t0, count),
        }
    }

    pub fn point(&self, t: f64) -> Result<MatrixTuple> {
        match &self.rule {
            ApproachRule::Radial => Ok(self.base.scale(Complex64::new(1.0 - t, 0.0))),
            ApproachRule::Ray(k) => self.base.add_scaled(Complex64::new(t, 0.0), k),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedSequence {
    /// `(t, Z)` pairs inside `G_δ`, in the order of the steps.
    pub points: Vec<(f64, MatrixTuple)>,
    /// Steps whose point fell outside `G_δ`.
    pub dropped: usize,
}

impl GeneratedSequence {
    /// Longest run of consecutive kept steps ending at the last step, which
    /// is what halving-based extrapolation may use.
    pub fn contiguous_tail(&self, steps: &[f64]) -> &[(f64, MatrixTuple)] {
        let mut len = 0;
        for (k, &t) in steps.iter().enumerate().rev() {
            let idx = self.points.len().checked_sub(len + 1);
            match idx {
                Some(i) if self.points[i].0 == t && k + len + 1 == steps.len() => len += 1,
                _ => break,
            }
        }
        &self.points[self.points.len() - len..]
    }
}

pub fn generate_sequence(seq: &ApproachSequence, delta: &DeltaMatrix) -> Result<GeneratedSequence> {
    if seq.rule == ApproachRule::Radial && !delta.is_homogeneous_linear() {
        return Err(Error::Contract(
            "radial sequences need delta homogeneous of degree 1".into(),
        ));
    }
    if let ApproachRule::Ray(k) = &seq.rule {
        if k.d() != seq.base.d() || k.n() != seq.base.n() {
            return Err(Error::Dimension(
                "ray direction and base point differ in shape".into(),
            ));
        }
    }
    let mut points = Vec::new();
    let mut dropped = 0;
    for &t in &seq.steps {
        let z = seq.point(t)?;
        if in_g_delta(delta, &z)?.inside {
            points.push((t, z));
        } else {
            dropped += 1;
        }
    }
    if points.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(GeneratedSequence { points, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ball_delta, cartan_delta, polydisk_delta};
    use crate::numerics::{c, from_real_rows};
    use crate::random;

    #[test]
    fn eval_examples() {
        let poly = polydisk_delta(2);
        let x = MatrixTuple::real_scalars(&[0.5, 0.3]);
        assert_eq!(
            poly.eval(&x).unwrap(),
            from_real_rows(2, 2, &[0.5, 0.0, 0.0, 0.3])
        );
        let ball = ball_delta(2);
        let y = MatrixTuple::real_scalars(&[0.6, 0.8]);
        assert_eq!(
            ball.eval(&y).unwrap(),
            from_real_rows(2, 2, &[0.6, 0.0, 0.8, 0.0])
        );
        assert_eq!(
            ball.eval_rect(&y).unwrap(),
            from_real_rows(2, 1, &[0.6, 0.8])
        );
        let zero = DeltaMatrix::new(2, vec![vec![FreePolynomial::zero(2)]]).unwrap();
        assert_eq!(zero.eval(&x).unwrap(), numerics::zeros(1, 1));
        assert!(poly.eval(&MatrixTuple::real_scalars(&[0.1])).is_err());
    }

    #[test]
    fn block_layout_is_row_block_major() {
        let delta = DeltaMatrix::from_text(2, &[&["x0", "x1"], &["2", "0"]]).unwrap();
        let x = MatrixTuple::new(vec![
            from_real_rows(2, 2, &[1.0, 2.0, 3.0, 4.0]),
            from_real_rows(2, 2, &[5.0, 6.0, 7.0, 8.0]),
        ])
        .unwrap();
        let m = delta.eval(&x).unwrap();
        assert_eq!(m[(0, 1)].re, 2.0);
        assert_eq!(m[(1, 2)].re, 7.0);
        assert_eq!(m[(3, 1)].re, 2.0);
        assert_eq!(m[(3, 3)].re, 0.0);
    }

    #[test]
    fn membership_examples() {
        let poly = polydisk_delta(2);
        let m = in_g_delta(&poly, &MatrixTuple::real_scalars(&[0.5, 0.3])).unwrap();
        assert!(m.inside && (m.margin - 0.5).abs() < 1e-15);
        assert!(
            !in_g_delta(&poly, &MatrixTuple::real_scalars(&[1.0, 0.0]))
                .unwrap()
                .inside
        );
        let m = in_g_delta(&ball_delta(2), &MatrixTuple::real_scalars(&[0.8, 0.7])).unwrap();
        assert!(!m.inside);
        assert!((m.norm - 1.13f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn distinguished_boundary_examples() {
        let poly = polydisk_delta(2);
        assert!(
            on_distinguished_boundary(&poly, &MatrixTuple::real_scalars(&[1.0, 1.0]), 1e-12)
                .unwrap()
        );
        assert!(on_distinguished_boundary(
            &ball_delta(2),
            &MatrixTuple::real_scalars(&[0.6, 0.8]),
            1e-12
        )
        .unwrap());
        let t = MatrixTuple::new(vec![
            identity(2),
            from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap();
        assert!(!on_distinguished_boundary(&poly, &t, 1e-12).unwrap());
    }

    #[test]
    fn nontangential_constant_examples() {
        let disk = polydisk_delta(1);
        let t = MatrixTuple::real_scalars(&[1.0]);
        for r in [0.5, 0.9, 0.999] {
            let c = nontangential_constant(&disk, &MatrixTuple::real_scalars(&[r]), &t).unwrap();
            assert!((c - 1.0 / (1.0 + r)).abs() < 1e-12 && c <= 1.0);
        }
        assert_eq!(
            nontangential_constant(&disk, &t, &t).unwrap(),
            f64::INFINITY
        );
        // Z = T − tT on the bidisk: c = t / (2t − t²) → 1/2
        let poly = polydisk_delta(2);
        let t2 = MatrixTuple::real_scalars(&[1.0, 1.0]);
        for t in [1e-2, 1e-4, 1e-6] {
            let z = t2.add_scaled(c(-t, 0.0), &t2).unwrap();
            let cz = nontangential_constant(&poly, &z, &t2).unwrap();
            assert!((cz - t / (2.0 * t - t * t)).abs() < 1e-9);
        }
    }

    #[test]
    fn inward_cone_examples() {
        let poly = polydisk_delta(2);
        let t = MatrixTuple::real_scalars(&[1.0, 1.0]);
        let h = MatrixTuple::real_scalars(&[-1.0, -1.0]);
        assert!(in_delta(&poly, &t, &h, 0.5, 1e-12).unwrap());
        assert!(in_gamma(&poly, &t, &h, 0.5,).unwrap());
        let h2 = MatrixTuple::scalars(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        assert!(!in_gamma(&poly, &t, &h2, 1e-12).unwrap());
        assert!((transversality_margin(&poly, &t, &h2).unwrap()).abs() < 1e-15);
        let big = MatrixTuple::real_scalars(&[-2.0, 0.0]);
        assert!(matches!(
            in_gamma(&poly, &t, &big, 0.1),
            Err(Error::DirectionTooLarge { .. })
        ));

        let degenerate = DeltaMatrix::from_text(1, &[&["x0", "0"], &["0", "1"]]).unwrap();
        let one = MatrixTuple::real_scalars(&[1.0]);
        for h in [-1.0, -0.5, 0.5] {
            assert!(!in_delta(
                &degenerate,
                &one,
                &MatrixTuple::real_scalars(&[h]),
                1e-9,
                1e-12
            )
            .unwrap());
        }
    }

    #[test]
    fn assumption_a_on_polydisk() {
        let poly = polydisk_delta(2);
        let mut rng = random::rng(11);
        for n in 1..=2 {
            let t = random::unitary_tuple(2, n, &mut rng);
            let rep = check_assumption_a(&poly, &t, &SearchOptions::default()).unwrap();
            assert!(rep.a1 && rep.a2 && rep.a, "{rep:?}");
            assert_eq!(rep.span_dim, 2 * n * n);
            let k = rep.a1_witness.unwrap();
            assert!(in_delta(&poly, &t, &k, rep.a1_beta * 0.99, 1e-10).unwrap());
        }
    }

    #[test]
    fn assumption_a_on_cartan() {
        let delta = cartan_delta(2);
        let mut rng = random::rng(5);
        let u = random::haar_unitary(2, &mut rng);
        let s = &u * u.transpose();
        let t = MatrixTuple::scalars(&[s[(0, 0)], s[(0, 1)], s[(1, 1)]]);
        assert!(on_distinguished_boundary(&delta, &t, 1e-12).unwrap());
        let rep = check_assumption_a(&delta, &t, &SearchOptions::default()).unwrap();
        assert!(rep.a, "{rep:?}");
    }

    #[test]
    fn assumption_a1_fails_with_constant_entry() {
        let degenerate = DeltaMatrix::from_text(1, &[&["x0", "0"], &["0", "1"]]).unwrap();
        let one = MatrixTuple::real_scalars(&[1.0]);
        let rep = check_assumption_a(&degenerate, &one, &SearchOptions::default()).unwrap();
        assert!(!rep.a1 && rep.a1_inconclusive && !rep.a);
        assert!(check_assumption_a(
            &degenerate,
            &MatrixTuple::real_scalars(&[0.5]),
            &SearchOptions::default()
        )
        .is_err());
    }

    #[test]
    fn sequences() {
        let poly = polydisk_delta(2);
        let t = MatrixTuple::real_scalars(&[1.0, 1.0]);
        let radial = generate_sequence(&ApproachSequence::radial(t.clone(), 10), &poly).unwrap();
        assert_eq!(radial.points.len(), 10);
        assert_eq!(radial.dropped, 0);
        let ray = ApproachSequence::ray(t.clone(), t.scale(c(-1.0, 0.0)), 0.5, 10);
        let ray = generate_sequence(&ray, &poly).unwrap();
        for ((ta, a), (tb, b)) in radial.points.iter().zip(&ray.points) {
            assert_eq!(ta, tb);
            assert!((a.component(0) - b.component(0)).norm() < 1e-15);
        }
        // tangential direction: points leave the closed bidisk
        let tangent = MatrixTuple::scalars(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        let seq = ApproachSequence::ray(t.clone(), tangent, 0.5, 6);
        let out = generate_sequence(&seq, &poly);
        assert!(matches!(out, Err(Error::EmptySequence)));
        let mixed = MatrixTuple::scalars(&[c(-0.5, 0.0), c(0.0, 0.2)]);
        let seq = ApproachSequence::ray(t.clone(), mixed, 0.5, 4);
        assert!(matches!(
            generate_sequence(&seq, &poly),
            Err(Error::EmptySequence)
        ));

        let non_homog = DeltaMatrix::from_text(1, &[&["x0^2"]]).unwrap();
        let one = MatrixTuple::real_scalars(&[1.0]);
        assert!(generate_sequence(&ApproachSequence::radial(one, 3), &non_homog).is_err());
    }

    #[test]
    fn contiguous_tail_skips_leading_drops() {
        let t = MatrixTuple::real_scalars(&[1.0]);
        let steps = halving_steps(1.0, 4);
        let pts = |ts: &[f64]| ts.iter().map(|&x| (x, t.clone())).collect::<Vec<_>>();
        let g = GeneratedSequence {
            points: pts(&[0.5, 0.25, 0.125]),
            dropped: 1,
        };
        assert_eq!(g.contiguous_tail(&steps).len(), 3);
        let g = GeneratedSequence {
            points: pts(&[1.0, 0.25, 0.125]),
            dropped: 1,
        };
        assert_eq!(g.contiguous_tail(&steps).len(), 2);
        let g = GeneratedSequence {
            points: pts(&[1.0, 0.5]),
            dropped: 2,
        };
        assert_eq!(g.contiguous_tail(&steps).len(), 0);
    }

    #[test]
    fn json_keeps_rectangular_grid() {
        let ball = ball_delta(3);
        let s = serde_json::to_string(&ball).unwrap();
        assert!(s.contains("\"J\":3"));
        let back: DeltaMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ball);
        let bad = r#"{"d":1,"J":1,"entries":[[{"d":1,"terms":[]}, {"d":1,"terms":[]}]]}"#;
        assert!(serde_json::from_str::<DeltaMatrix>(bad).is_err());
    }

    #[test]
    fn json_accepts_text_entries() {
        let text = r#"{"d":2,"J":2,"entries":[["x0","0"],["0","x1"]]}"#;
        assert_eq!(
            serde_json::from_str::<DeltaMatrix>(text).unwrap(),
            polydisk_delta(2)
        );
        for bad in ["x5", "x0 x1", "x0^-1"] {
            let text = format!(r#"{{"d":2,"J":1,"entries":[["{bad}"]]}}"#);
            let err = serde_json::from_str::<DeltaMatrix>(&text)
                .unwrap_err()
                .to_string();
            assert!(err.contains("parse error at position"), "{err}");
        }
    }
}
