//! Polynomials in non-commuting variables and their evaluation on matrix tuples.
//!
//! A [`FreePolynomial`] in `d` variables is a finite sum of complex multiples
//! of words `x^{i₁} x^{i₂} ⋯ x^{i_k}`. Substituting an `n×n` tuple for the
//! variables gives an `n×n` matrix; since multiplication does not commute,
//! `x0*x1` and `x1*x0` are different polynomials.
//!
//! The text form accepted by [`parse_poly`] is
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+' | '-') factor | atom ('^' k)?
//! atom   := number | number 'i' | 'i' | 'x'index | '(' expr ')'
//! ```
//!
//! where `^k` is only allowed on variables and parenthesised groups. Products
//! need an explicit `*`.

mod parser;
mod tuple;

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{identity, zeros, ComplexMatrix};

pub use parser::parse_poly;
pub use tuple::MatrixTuple;

/// A monomial: variable indices in multiplication order. The empty word is
/// the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeWord(pub Vec<usize>);

impl FreeWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }
}

/// Total degree first, then lexicographic on letters.
impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub word: FreeWord,
}

/// Canonical free polynomial: distinct words in ascending degree-lex order,
/// no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FreePolynomial {
    d: usize,
    terms: Vec<Term>,
}

impl FreePolynomial {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            terms: Vec::new(),
        }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        Self::from_terms(d, [(c, FreeWord::empty())]).expect("empty word is valid")
    }

    pub fn var(d: usize, index: usize) -> Result<Self> {
        Self::from_terms(d, [(Complex64::new(1.0, 0.0), FreeWord(vec![index]))])
    }

    /// Builds the canonical form: merges repeated words and drops zeros.
    pub fn from_terms(
        d: usize,
        terms: impl IntoIterator<Item = (Complex64, FreeWord)>,
    ) -> Result<Self> {
        let mut raw: Vec<Term> = Vec::new();
        for (coeff, word) in terms {
            if let Some(&bad) = word.0.iter().find(|&&i| i >= d) {
                return Err(Error::Contract(format!(
                    "variable index {bad} out of range for d={d}"
                )));
            }
            if !(coeff.re.is_finite() && coeff.im.is_finite()) {
                return Err(Error::Contract("non-finite coefficient".into()));
            }
            raw.push(Term { coeff, word });
        }
        Ok(Self::canonicalize(d, raw))
    }

    fn canonicalize(d: usize, mut raw: Vec<Term>) -> Self {
        raw.sort_by(|a, b| a.word.cmp(&b.word));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.word == t.word => last.coeff += t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        Self { d, terms }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.word.degree())
            .max()
            .unwrap_or(0)
    }

    /// True iff every term has total degree exactly `k` (the zero polynomial
    /// counts as homogeneous of every degree).
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.iter().all(|t| t.word.degree() == k)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.d, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_tuple(&self, x: &MatrixTuple) -> Result<()> {
        if x.d() != self.d {
            return Err(Error::Dimension(format!(
                "polynomial has d={}, point has d={}",
                self.d,
                x.d()
            )));
        }
        Ok(())
    }

    /// `Σ c · x^{i₁}⋯x^{i_k}` with the empty word mapped to `c·I_n`.
    pub fn eval(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        self.check_tuple(x)?;
        let n = x.n();
        let mut out = zeros(n, n);
        for t in &self.terms {
            let mut prod: Option<ComplexMatrix> = None;
            for &i in t.word.letters() {
                prod = Some(match prod {
                    None => x.component(i).clone(),
                    Some(p) => p * x.component(i),
                });
            }
            match prod {
                None => {
                    for k in 0..n {
                        out[(k, k)] += t.coeff;
                    }
                }
                Some(p) => out += p * t.coeff,
            }
        }
        Ok(out)
    }

    /// Exact directional derivative `d/ds p(T + sH)|_{s=0}` by the
    /// non-commutative product rule.
    pub fn directional_derivative(
        &self,
        at: &MatrixTuple,
        dir: &MatrixTuple,
    ) -> Result<ComplexMatrix> {
        self.check_tuple(at)?;
        self.check_tuple(dir)?;
        if at.n() != dir.n() {
            return Err(Error::Dimension(format!(
                "base point has n={}, direction has n={}",
                at.n(),
                dir.n()
            )));
        }
        let n = at.n();
        let mut out = zeros(n, n);
        for t in &self.terms {
            let w = t.word.letters();
            let k = w.len();
            if k == 0 {
                continue;
            }
            // suffix[m] = T^{w[m]} ⋯ T^{w[k-1]}
            let mut suffix = vec![identity(n); k + 1];
            for m in (0..k).rev() {
                suffix[m] = at.component(w[m]) * &suffix[m + 1];
            }
            let mut prefix = identity(n);
            for m in 0..k {
                out += (&prefix * dir.component(w[m]) * &suffix[m + 1]) * t.coeff;
                prefix *= at.component(w[m]);
            }
        }
        Ok(out)
    }
}

impl Add for &FreePolynomial {
    type Output = FreePolynomial;
    fn add(self, rhs: Self) -> FreePolynomial {
        assert_eq!(
            self.d, rhs.d,
            "adding polynomials in different variable counts"
        );
        FreePolynomial::canonicalize(
            self.d,
            self.terms.iter().chain(&rhs.terms).cloned().collect(),
        )
    }
}

impl Neg for &FreePolynomial {
    type Output = FreePolynomial;
    fn neg(self) -> FreePolynomial {
        FreePolynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -t.coeff,
                    word: t.word.clone(),
                })
                .collect(),
        }
    }
}

impl Sub for &FreePolynomial {
    type Output = FreePolynomial;
    fn sub(self, rhs: Self) -> FreePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &FreePolynomial {
    type Output = FreePolynomial;
    fn mul(self, rhs: Self) -> FreePolynomial {
        assert_eq!(
            self.d, rhs.d,
            "multiplying polynomials in different variable counts"
        );
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                raw.push(Term {
                    coeff: a.coeff * b.coeff,
                    word: a.word.concat(&b.word),
                });
            }
        }
        FreePolynomial::canonicalize(self.d, raw)
    }
}

pub fn eval_poly(p: &FreePolynomial, x: &MatrixTuple) -> Result<ComplexMatrix> {
    p.eval(x)
}

pub fn directional_derivative_poly(
    p: &FreePolynomial,
    at: &MatrixTuple,
    dir: &MatrixTuple,
) -> Result<ComplexMatrix> {
    p.directional_derivative(at, dir)
}

fn write_word(out: &mut String, word: &FreeWord) {
    let mut first = true;
    let letters = word.letters();
    let mut i = 0;
    while i < letters.len() {
        let v = letters[i];
        let mut run = 1;
        while i + run < letters.len() && letters[i + run] == v {
            run += 1;
        }
        if !first {
            out.push('*');
        }
        first = false;
        let _ = write!(out, "x{v}");
        if run > 1 {
            let _ = write!(out, "^{run}");
        }
        i += run;
    }
}

/// Returns (negative, body) where body carries no leading sign.
fn format_term(t: &Term) -> (bool, String) {
    let Complex64 { re, im } = t.coeff;
    let has_word = t.word.degree() > 0;
    let mut body = String::new();
    let negative;
    if im == 0.0 {
        negative = re < 0.0;
        let mag = re.abs();
        if !has_word {
            let _ = write!(body, "{mag}");
        } else if mag != 1.0 {
            let _ = write!(body, "{mag}*");
        }
    } else if re == 0.0 {
        negative = im < 0.0;
        let _ = write!(body, "{}i", im.abs());
        if has_word {
            body.push('*');
        }
    } else {
        negative = false;
        let sign = if im < 0.0 { '-' } else { '+' };
        let _ = write!(body, "({re}{sign}{}i)", im.abs());
        if has_word {
            body.push('*');
        }
    }
    write_word(&mut body, &t.word);
    (negative, body)
}

/// Deterministic text form, highest degree first; [`parse_poly`] maps it back
/// to the same canonical polynomial.
pub fn format_poly(p: &FreePolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut order: Vec<&Term> = p.terms.iter().collect();
    order.sort_by(|a, b| {
        b.word
            .degree()
            .cmp(&a.word.degree())
            .then_with(|| a.word.letters().cmp(b.word.letters()))
    });
    let mut out = String::new();
    for (k, t) in order.into_iter().enumerate() {
        let (neg, body) = format_term(t);
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for FreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    coeff: [f64; 2],
    word: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    d: usize,
    terms: Vec<TermWire>,
}

impl Serialize for FreePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|t| TermWire {
                    coeff: [t.coeff.re, t.coeff.im],
                    word: t.word.0.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PolyWire::deserialize(d)?;
        FreePolynomial::from_terms(
            w.d,
            w.terms
                .into_iter()
                .map(|t| (Complex64::new(t.coeff[0], t.coeff[1]), FreeWord(t.word))),
        )
        .map_err(D::Error::custom)
    }
}
