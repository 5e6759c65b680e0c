use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{self, block_diag, condition_number, operator_norm, ComplexMatrix};

/// A point `x = (x¹, …, x^d)` of `M_n^d`: `d` square matrices of common size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    n: usize,
    components: Vec<ComplexMatrix>,
}

impl MatrixTuple {
    pub fn new(components: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Dimension(
                "a matrix tuple needs at least one component".into(),
            ));
        };
        let n = first.nrows();
        for (r, m) in components.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!(
                    "component {r} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !numerics::is_finite(m) {
                return Err(Error::Contract(format!(
                    "component {r} has non-finite entries"
                )));
            }
        }
        Ok(Self { n, components })
    }

    /// Level-one tuple of commuting scalars.
    pub fn scalars(values: &[Complex64]) -> Self {
        Self::new(
            values
                .iter()
                .map(|&z| ComplexMatrix::from_element(1, 1, z))
                .collect(),
        )
        .expect("at least one scalar")
    }

    pub fn real_scalars(values: &[f64]) -> Self {
        Self::scalars(
            &values
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// `(sI_n, …, sI_n)` with `d` components.
    pub fn scalar_identity(d: usize, n: usize, s: Complex64) -> Self {
        Self::new(vec![numerics::identity(n) * s; d]).expect("uniform components")
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Self::new(vec![numerics::zeros(n, n); d]).expect("uniform components")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ComplexMatrix] {
        &self.components
    }

    pub fn component(&self, r: usize) -> &ComplexMatrix {
        &self.components[r]
    }

    /// `max_r ‖x^r‖`.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .map(operator_norm)
            .fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.d() != other.d() || self.n != other.n {
            return Err(Error::Dimension(format!(
                "tuple shapes differ: d={} n={} vs d={} n={}",
                self.d(),
                self.n,
                other.d(),
                other.n
            )));
        }
        Ok(())
    }

    /// `self + t·dir`, componentwise.
    pub fn add_scaled(&self, t: Complex64, dir: &Self) -> Result<Self> {
        self.check_same_shape(dir)?;
        Ok(Self {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&dir.components)
                .map(|(a, b)| a + b * t)
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            components: self.components.iter().map(|m| m * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self::new(self.components.iter().map(f).collect()).expect("map preserves shape")
    }

    /// Componentwise block-diagonal `x ⊕ y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::Dimension(format!(
                "direct sum of tuples with d={} and d={}",
                self.d(),
                other.d()
            )));
        }
        Ok(Self {
            n: self.n + other.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| block_diag(a, b))
                .collect(),
        })
    }

    /// `s⁻¹ x s`, componentwise.
    pub fn similarity(&self, s: &ComplexMatrix) -> Result<Self> {
        if s.nrows() != self.n || s.ncols() != self.n {
            return Err(Error::Dimension(format!(
                "similarity is {}x{}, tuple level is {}",
                s.nrows(),
                s.ncols(),
                self.n
            )));
        }
        let condition = condition_number(s);
        if condition > 1e12 {
            return Err(Error::IllConditioned { condition });
        }
        let inv = s.clone().try_inverse().ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
        })?;
        Ok(self.map(|x| &inv * x * s))
    }
}

#[derive(Serialize, Deserialize)]
struct TupleWire {
    #[serde(with = "numerics::json::vec")]
    components: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TupleInput {
    Full(TupleWire),
    Scalars(Vec<[f64; 2]>),
}

impl Serialize for MatrixTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleWire {
            components: self.components.clone(),
        }
        .serialize(s)
    }
}

/// Accepts `{"components":[cmat, …]}` or, for level one, a bare list of
/// `[re, im]` scalars.
impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let components = match TupleInput::deserialize(d)? {
            TupleInput::Full(w) => w.components,
            TupleInput::Scalars(xs) => xs
                .iter()
                .map(|&[re, im]| ComplexMatrix::from_element(1, 1, Complex64::new(re, im)))
                .collect(),
        };
        MatrixTuple::new(components).map_err(D::Error::custom)
    }
}
