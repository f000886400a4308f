//! The Cayley-Dickson tower R, C, H, O with polynomial components.
//!
//! Products use the doubling rule `(a, b)(c, d) = (ac − d̄b, da + bc̄)`. The
//! rule is applied once per dimension to generate structure constants
//! `e_i e_j = ±e_k`, and all products go through those tables.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Scalar;

/// Supported algebra dimensions.
pub const DIMS: [usize; 4] = [1, 2, 4, 8];

/// One structure constant: `e_i e_j = sign · e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub sign: i8,
}

/// Multiplication table of the dimension-`dim` algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulTable {
    dim: usize,
    // lookup[i * dim + j] = (k, sign)
    lookup: Vec<(usize, i8)>,
}

impl MulTable {
    fn generate(dim: usize) -> Self {
        let mut lookup = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut ei = vec![0i64; dim];
                let mut ej = vec![0i64; dim];
                ei[i] = 1;
                ej[j] = 1;
                let prod = doubling_mul(&ei, &ej);
                let (k, v) = prod
                    .iter()
                    .enumerate()
                    .find(|(_, v)| **v != 0)
                    .expect("product of basis elements is a signed basis element");
                debug_assert_eq!(prod.iter().filter(|v| **v != 0).count(), 1);
                lookup.push((k, *v as i8));
            }
        }
        MulTable { dim, lookup }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(k, sign)` with `e_i e_j = sign · e_k`.
    pub fn product(&self, i: usize, j: usize) -> (usize, i8) {
        self.lookup[i * self.dim + j]
    }

    pub fn entries(&self) -> Vec<TableEntry> {
        (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (k, sign) = self.product(i, j);
                TableEntry { i, j, k, sign }
            })
            .collect()
    }

    /// Audit export: array of signed triples `[i, j, k, sign]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries()
                .into_iter()
                .map(|e| serde_json::json!([e.i, e.j, e.k, e.sign]))
                .collect(),
        )
    }
}

/// Product of integer vectors by the recursive doubling rule.
fn doubling_mul(x: &[i64], y: &[i64]) -> Vec<i64> {
    let n = x.len();
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = doubling_mul(a, c);
    let db = doubling_mul(&int_conj(d), b);
    let da = doubling_mul(d, a);
    let bc = doubling_mul(b, &int_conj(c));
    let mut out: Vec<i64> = ac.iter().zip(&db).map(|(p, q)| p - q).collect();
    out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
    out
}

fn int_conj(v: &[i64]) -> Vec<i64> {
    v.iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { *x } else { -x })
        .collect()
}

fn check_dim(dim: usize) -> Result<()> {
    if DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "algebra dimension {dim} not in {{1, 2, 4, 8}}"
        )))
    }
}

/// Shared, lazily generated table for `dim ∈ {1, 2, 4, 8}`.
pub fn table(dim: usize) -> Result<&'static MulTable> {
    static TABLES: OnceLock<Vec<MulTable>> = OnceLock::new();
    check_dim(dim)?;
    let tables = TABLES.get_or_init(|| DIMS.iter().map(|&d| MulTable::generate(d)).collect());
    Ok(&tables[dim.trailing_zeros() as usize])
}

/// Element of the dimension-`dim` algebra whose coordinates are polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElement {
    components: Vec<Polynomial>,
}

impl AlgebraElement {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        check_dim(components.len())?;
        let n = components[0].nvars();
        if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
            return Err(Error::VariableMismatch {
                left: n,
                right: bad.nvars(),
            });
        }
        Ok(AlgebraElement { components })
    }

    /// The element `(x_{offset+1}, …, x_{offset+dim})` in `n` variables.
    pub fn symbolic(n: usize, offset: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if offset + dim > n {
            return Err(Error::DimensionMismatch(format!(
                "variables {}..{} exceed n = {n}",
                offset + 1,
                offset + dim
            )));
        }
        AlgebraElement::new((0..dim).map(|i| Polynomial::var(n, offset + i)).collect())
    }

    /// Constant element with the given coordinates.
    pub fn constant(n: usize, coords: &[Scalar]) -> Result<Self> {
        AlgebraElement::new(
            coords
                .iter()
                .map(|c| Polynomial::constant(n, c.clone()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn real_part(&self) -> &Polynomial {
        &self.components[0]
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.compatible(other)?;
        AlgebraElement::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    fn compatible(&self, other: &AlgebraElement) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "algebra dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.nvars() != other.nvars() {
            return Err(Error::VariableMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        Ok(())
    }

    /// Cayley-Dickson product.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.compatible(other)?;
        let t = table(self.dim())?;
        let n = self.nvars();
        let mut out = vec![Polynomial::zero(n); self.dim()];
        for (i, a) in self.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.components.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (k, sign) = t.product(i, j);
                let prod = a * b;
                out[k] = if sign > 0 {
                    &out[k] + &prod
                } else {
                    &out[k] - &prod
                };
            }
        }
        AlgebraElement::new(out)
    }

    /// Keeps the real coordinate, negates the rest.
    pub fn conjugate(&self) -> AlgebraElement {
        AlgebraElement {
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| if i == 0 { c.clone() } else { -c })
                .collect(),
        }
    }

    /// `Σ components²`.
    pub fn norm_poly(&self) -> Polynomial {
        self.components
            .iter()
            .fold(Polynomial::zero(self.nvars()), |acc, c| &acc + &(c * c))
    }
}

/// Checks `|XY|² = |X|²|Y|²` symbolically over `2·dim` fresh variables.
pub fn verify_norm_composition(dim: usize) -> Result<bool> {
    let n = 2 * dim;
    let x = AlgebraElement::symbolic(n, 0, dim)?;
    let y = AlgebraElement::symbolic(n, dim, dim)?;
    let lhs = x.mul(&y)?.norm_poly();
    let rhs = &x.norm_poly() * &y.norm_poly();
    Ok((&lhs - &rhs).is_zero())
}

/// Matrix of left multiplication `v ↦ e_i v` as signed-permutation rows.
pub(crate) fn left_mul_signs(dim: usize, i: usize) -> Result<Vec<(usize, usize, i8)>> {
    let t = table(dim)?;
    // (row k, column j, sign) with e_i e_j = sign e_k
    Ok((0..dim)
        .map(|j| {
            let (k, s) = t.product(i, j);
            (k, j, s)
        })
        .collect())
}

/// Constant monomial helper for tests and callers that need `1` in `n` variables.
pub fn unit(n: usize, dim: usize) -> Result<AlgebraElement> {
    check_dim(dim)?;
    let mut comps = vec![Polynomial::zero(n); dim];
    comps[0].add_term(Monomial::one(n), Scalar::one());
    AlgebraElement::new(comps)
}
