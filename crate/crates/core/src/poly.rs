//! Sparse multivariate polynomials over [`Scalar`] with the differential
//! operators used to state the eiconal and Laplace equations.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic. Iteration and serialization run from the leading term down,
//! so output is deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::ScalarMatrix;
use crate::scalar::Scalar;

/// Largest supported variable count.
pub const MAX_VARS: usize = 64;

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher total degree first, ties broken by the
    /// exponent of `x1`, then `x2`, and so on.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `n` variables `x1..xn` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

fn check_vars(n: usize) -> Result<()> {
    if (1..=MAX_VARS).contains(&n) {
        Ok(())
    } else {
        Err(Error::VariableCount(n))
    }
}

impl Polynomial {
    /// Zero polynomial. Panics if `n` is outside `1..=64`; use
    /// [`Polynomial::try_zero`] at input boundaries.
    pub fn zero(n: usize) -> Self {
        Polynomial::try_zero(n).expect("variable count within 1..=64")
    }

    pub fn try_zero(n: usize) -> Result<Self> {
        check_vars(n)?;
        Ok(Polynomial {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = Polynomial::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    /// The coordinate `x_{i+1}` (zero-based index).
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for n = {n}");
        let mut p = Polynomial::zero(n);
        p.add_term(Monomial::var(n, i), Scalar::one());
        p
    }

    pub fn monomial(n: usize, exps: Vec<u32>, coef: Scalar) -> Self {
        assert_eq!(exps.len(), n, "exponent vector length");
        let mut p = Polynomial::zero(n);
        p.add_term(Monomial(exps), coef);
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the leading (graded-lex largest) monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    /// Adds `coef * mono` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, mono: Monomial, coef: Scalar) {
        assert_eq!(mono.0.len(), self.n, "monomial length");
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_vars(&self, other: &Polynomial) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    /// Exact product.
    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_vars(other)?;
        let mut acc: HashMap<Monomial, Scalar> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.times(mb))
                    .and_modify(|c| *c += &prod)
                    .or_insert(prod);
            }
        }
        Ok(Polynomial {
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.n, Scalar::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂f/∂x_{i+1}`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.n, "variable index {i} out of range");
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.terms
                .insert(Monomial(exps), c * &Scalar::from_int(i64::from(e)));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.n).map(|i| self.derivative(i)).collect()
    }

    /// Symbolic Hessian, `H[i][j] = ∂²f/∂x_i∂x_j`.
    pub fn hessian(&self) -> Vec<Vec<Polynomial>> {
        self.gradient()
            .iter()
            .map(|g| (0..self.n).map(|j| g.derivative(j)).collect())
            .collect()
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for i in 0..self.n {
            let d2 = self.derivative(i).derivative(i);
            for (m, c) in d2.terms {
                out.add_term(m, c);
            }
        }
        out
    }

    /// `Σ x_i ∂f/∂x_i`; equals `k f` for `f` homogeneous of degree `k`.
    pub fn euler(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * &Scalar::from_int(i64::from(m.degree())));
        }
        out
    }

    /// `f(Mx)`, expanded exactly.
    pub fn substitute_linear(&self, m: &ScalarMatrix) -> Result<Polynomial> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "substitution matrix {}x{} for {} variables",
                m.rows(),
                m.cols(),
                self.n
            )));
        }
        let images: Vec<Polynomial> = (0..self.n)
            .map(|i| {
                let mut l = Polynomial::zero(self.n);
                for j in 0..self.n {
                    l.add_term(Monomial::var(self.n, j), m.get(i, j).clone());
                }
                l
            })
            .collect();
        let mut power_cache: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(self.n);
        for (mono, c) in &self.terms {
            let mut term = Polynomial::constant(self.n, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = power_cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e));
                term = &term * p;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Re-embeds into `n_new` variables, sending `x_{i+1}` to `x_{map[i]+1}`.
    pub fn embed(&self, n_new: usize, map: &[usize]) -> Result<Polynomial> {
        check_vars(n_new)?;
        if map.len() != self.n || map.iter().any(|&j| j >= n_new) {
            return Err(Error::DimensionMismatch("variable map".into()));
        }
        let mut out = Polynomial::zero(n_new);
        for (m, c) in &self.terms {
            let mut exps = vec![0; n_new];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("evaluation point".into()));
        }
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &xi.pow(e);
                }
            }
            total += &t;
        }
        Ok(total)
    }

    /// Floating-point copy of the terms, leading term first.
    pub fn to_f64_terms(&self) -> Result<Vec<(Vec<u32>, f64)>> {
        self.terms()
            .map(|(m, c)| Ok((m.0.clone(), c.to_f64()?)))
            .collect()
    }
}

/// `Σ_i (∂f/∂x_i)(∂g/∂x_i)`.
pub fn grad_inner(f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    f.same_vars(g)?;
    let n = f.n;
    let products: Vec<Polynomial> = (0..n)
        .into_par_iter()
        .map(|i| &f.derivative(i) * &g.derivative(i))
        .collect();
    // summation order is fixed, so the result does not depend on scheduling
    Ok(products.iter().fold(Polynomial::zero(n), |acc, p| &acc + p))
}

/// `|x|² = x1² + … + xn²`.
pub fn norm_sq_poly(n: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 2;
        p.add_term(Monomial(e), Scalar::one());
    }
    p
}

macro_rules! poly_op {
    ($tr:ident, $m:ident, $via:ident) => {
        impl<'a> $tr<&'a Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            /// Panics on a variable-count mismatch.
            fn $m(self, rhs: &'a Polynomial) -> Polynomial {
                self.$via(rhs).expect("polynomials over the same variables")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}

poly_op!(Add, add, try_add);
poly_op!(Sub, sub, try_sub);
poly_op!(Mul, mul, try_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg_single = c.signum() < 0
                && c.parts()
                    .iter()
                    .filter(|p| !num_traits::Zero::is_zero(*p))
                    .count()
                    == 1;
            let (sign, mag) = if neg_single {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, e)
                        }
                    })
                    .collect();
            let multi = mag
                .parts()
                .iter()
                .filter(|p| !num_traits::Zero::is_zero(*p))
                .count()
                > 1;
            let coef = if multi {
                format!("({mag})")
            } else {
                mag.to_string()
            };
            match (vars.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{coef}")?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{coef}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[n={}]({})", self.n, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: Vec<u32>,
    coef: Scalar,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    n: usize,
    terms: Vec<TermWire>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            n: self.n,
            terms: self
                .terms()
                .map(|(m, c)| TermWire {
                    exp: m.0.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PolyWire::deserialize(d)?;
        Polynomial::from_wire(wire).map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    fn from_wire(wire: PolyWire) -> Result<Self> {
        let mut p = Polynomial::try_zero(wire.n)?;
        for t in wire.terms {
            if t.exp.len() != wire.n {
                return Err(Error::Parse(format!(
                    "exponent vector of length {} in a polynomial with n = {}",
                    t.exp.len(),
                    wire.n
                )));
            }
            if t.coef.is_zero() {
                return Err(Error::Parse("zero coefficient stored".into()));
            }
            let m = Monomial(t.exp);
            if p.terms.contains_key(&m) {
                return Err(Error::Parse("duplicate monomial".into()));
            }
            p.terms.insert(m, t.coef);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, Scalar::from_int(v))
    }

    #[test]
    fn products() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        assert_eq!(&(&x1 + &x2) * &(&x1 - &x2), &(&x1 * &x1) - &(&x2 * &x2));
        assert!((&x1 * &Polynomial::zero(2)).is_zero());
        let s = norm_sq_poly(2);
        let expected = &(&x1.pow(4) + &(&c(2, 2) * &(&x1.pow(2) * &x2.pow(2)))) + &x2.pow(4);
        assert_eq!(&s * &s, expected);
        assert_eq!(
            x1.try_mul(&x(3, 0)),
            Err(Error::VariableMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn degree_of_product() {
        let f = &x(3, 0).pow(2) + &x(3, 2);
        let g = &x(3, 1).pow(3) - &c(3, 1);
        assert_eq!((&f * &g).degree(), Some(5));
        assert_eq!(Polynomial::zero(3).degree(), None);
    }

    #[test]
    fn gradients() {
        let f = x(3, 0).pow(3);
        let g = f.gradient();
        assert_eq!(g[0], &c(3, 3) * &x(3, 0).pow(2));
        assert!(g[1].is_zero() && g[2].is_zero());
        let grad_norm = norm_sq_poly(4).gradient();
        for (i, gi) in grad_norm.iter().enumerate() {
            assert_eq!(gi, &(&c(4, 2) * &x(4, i)));
        }
    }

    #[test]
    fn gradient_of_reducible_cubic() {
        // x3³ - 3x3(x1² + x2²)
        let n = 3;
        let f = &x(n, 2).pow(3) - &(&c(n, 3) * &(&x(n, 2) * &(&x(n, 0).pow(2) + &x(n, 1).pow(2))));
        let g = f.gradient();
        assert_eq!(g[0], &c(n, -6) * &(&x(n, 2) * &x(n, 0)));
        assert_eq!(g[1], &c(n, -6) * &(&x(n, 2) * &x(n, 1)));
        assert_eq!(
            g[2],
            &(&(&c(n, 3) * &x(n, 2).pow(2)) - &(&c(n, 3) * &x(n, 0).pow(2)))
                - &(&c(n, 3) * &x(n, 1).pow(2))
        );
    }

    #[test]
    fn gradient_inner_products() {
        let s = norm_sq_poly(3);
        assert_eq!(grad_inner(&s, &s).unwrap(), &c(3, 4) * &s);
        assert!(grad_inner(&x(2, 0), &x(2, 1)).unwrap().is_zero());
    }

    #[test]
    fn laplacians() {
        assert_eq!(norm_sq_poly(5).laplacian(), c(5, 10));
        assert!((&x(2, 0) * &x(2, 1)).laplacian().is_zero());
    }

    #[test]
    fn linear_substitution() {
        let f = x(2, 0).pow(2);
        assert_eq!(f.substitute_linear(&ScalarMatrix::identity(2)).unwrap(), f);
        let rot = ScalarMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        assert_eq!(f.substitute_linear(&rot).unwrap(), x(2, 1).pow(2));
        assert!(f.substitute_linear(&ScalarMatrix::identity(3)).is_err());
    }

    #[test]
    fn euler_identity() {
        let f = &(&x(3, 0).pow(2) * &x(3, 1)) - &(&c(3, 5) * &x(3, 2).pow(3));
        assert_eq!(f.euler(), &c(3, 3) * &f);
    }

    #[test]
    fn norm_square_sizes() {
        assert_eq!(norm_sq_poly(1), x(1, 0).pow(2));
        assert_eq!(norm_sq_poly(3).num_terms(), 3);
    }

    #[test]
    fn variable_cap() {
        assert_eq!(Polynomial::try_zero(0), Err(Error::VariableCount(0)));
        assert_eq!(Polynomial::try_zero(65), Err(Error::VariableCount(65)));
        assert!(Polynomial::try_zero(64).is_ok());
    }

    #[test]
    fn display_is_leading_term_first() {
        let n = 2;
        let f = &(&x(n, 1).pow(3) - &(&c(n, 3) * &(&x(n, 1) * &x(n, 0).pow(2)))) + &c(n, 1);
        assert_eq!(f.to_string(), "-3*x1^2*x2 + x2^3 + 1");
        let g = Polynomial::constant(1, Scalar::one() + Scalar::sqrt2());
        assert_eq!((&g * &x(1, 0)).to_string(), "(1 + √2)*x1");
    }

    #[test]
    fn json_shape_and_validation() {
        let f = &x(2, 0) - &c(2, 2);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"n":2,"terms":[{"exp":[1,0],"coef":[1,1,0,1,0,1,0,1]},{"exp":[0,0],"coef":[-2,1,0,1,0,1,0,1]}]}"#
        );
        assert_eq!(serde_json::from_str::<Polynomial>(&text).unwrap(), f);
        let bad_len = r#"{"n":2,"terms":[{"exp":[1],"coef":[1,1,0,1,0,1,0,1]}]}"#;
        assert!(serde_json::from_str::<Polynomial>(bad_len).is_err());
        let zero_coef = r#"{"n":1,"terms":[{"exp":[1],"coef":[0,1,0,1,0,1,0,1]}]}"#;
        assert!(serde_json::from_str::<Polynomial>(zero_coef).is_err());
        let too_many = r#"{"n":65,"terms":[]}"#;
        assert!(serde_json::from_str::<Polynomial>(too_many).is_err());
    }
}
