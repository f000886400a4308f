//! Quadratic maps between spheres.
//!
//! A [`QuadraticSphereMap`] stores symmetric `p×p` matrices `A_i` and defines
//! the quadratic forms `Q_i(ξ) = c·ξᵀA_iξ` with the fixed scaling
//! `c = √3/2`. Verified maps satisfy
//!
//! ```text
//! Σ Q_i² = (3/4)|ξ|⁴,      ⟨∇Q_i, ∇Q_j⟩ = 3 δ_ij |ξ|²
//! ```
//!
//! so that `y(ζ) = (2/√3)(Q_1(ζ), …, Q_q(ζ))` sends the unit sphere `S^(p−1)`
//! into `S^(q−1)`.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cdalgebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::hurwitz::{rho, verify_hme, HmeReport};
use crate::matrix::ScalarMatrix;
use crate::poly::{grad_inner, norm_sq_poly, Monomial, Polynomial};
use crate::scalar::Scalar;

/// The constant `c = √3/2` in `Q_i = c·ξᵀA_iξ`.
pub fn scaling_constant() -> Scalar {
    Scalar::sqrt3() * Scalar::ratio(1, 2)
}

/// Yiu's function: the least `l` admitting a nonconstant quadratic map
/// `S^k → S^l`. With `k = 2^a + b` and `2^a` maximal,
/// `σ(k) = 2^a` when `b < ρ(2^a)` and `2^a + σ(b)` otherwise.
pub fn sigma(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("sigma is defined for k >= 1".into()));
    }
    let pow = 1u64 << (63 - k.leading_zeros());
    let b = k - pow;
    if b < rho(pow)? {
        Ok(pow)
    } else {
        Ok(pow + sigma(b)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSphereMap {
    p: usize,
    matrices: Vec<ScalarMatrix>,
}

impl QuadraticSphereMap {
    /// Wraps `q ≥ 1` symmetric `p×p` matrices. No identities are checked here;
    /// see [`verify_spheremap`].
    pub fn new(matrices: Vec<ScalarMatrix>) -> Result<Self> {
        let p = matrices
            .first()
            .ok_or_else(|| Error::Invariant("a sphere map needs q >= 1 forms".into()))?
            .rows();
        if p == 0 {
            return Err(Error::Invariant("p must be positive".into()));
        }
        for (i, a) in matrices.iter().enumerate() {
            if a.rows() != p || a.cols() != p {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {i} is {}x{}, expected {p}x{p}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(QuadraticSphereMap { p, matrices })
    }

    /// The `q = 1` map `Q_1 = (√3/2)|ξ|²`.
    pub fn norm_form(p: usize) -> Result<Self> {
        QuadraticSphereMap::new(vec![ScalarMatrix::identity(p)])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ScalarMatrix] {
        &self.matrices
    }

    pub fn scaling(&self) -> Scalar {
        scaling_constant()
    }

    /// `Q_i(ξ) = c·ξᵀA_iξ` as polynomials in `p` variables.
    pub fn forms(&self) -> Vec<Polynomial> {
        let c = scaling_constant();
        self.matrices
            .iter()
            .map(|a| forms_from_matrix(a, &c))
            .collect()
    }

    /// `y(ζ) = (2/√3)(Q_1(ζ), …, Q_q(ζ)) = (ζᵀA_1ζ, …, ζᵀA_qζ)`.
    pub fn eval_unit(&self, zeta: &[f64]) -> Result<Vec<f64>> {
        if zeta.len() != self.p {
            return Err(Error::DimensionMismatch("point dimension".into()));
        }
        let v = nalgebra::DVector::from_column_slice(zeta);
        self.matrices
            .iter()
            .map(|a| Ok(v.dot(&(a.to_f64()? * &v))))
            .collect()
    }

    /// Replaces member `i` by `factor · A_i`.
    pub fn with_scaled_member(&self, i: usize, factor: &Scalar) -> Result<Self> {
        let mut matrices = self.matrices.clone();
        let slot = matrices
            .get_mut(i)
            .ok_or_else(|| Error::Domain(format!("no member {i}")))?;
        *slot = slot.scale(factor);
        QuadraticSphereMap::new(matrices)
    }
}

fn forms_from_matrix(a: &ScalarMatrix, c: &Scalar) -> Polynomial {
    let p = a.rows();
    let mut q = Polynomial::zero(p);
    for i in 0..p {
        for j in i..p {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            let mut e = vec![0; p];
            e[i] += 1;
            e[j] += 1;
            let coef = if i == j {
                v * c
            } else {
                &(v * c) * &Scalar::from_int(2)
            };
            q.add_term(Monomial::new(e), coef);
        }
    }
    q
}

/// Inverse of [`QuadraticSphereMap::forms`]: the unique symmetric `A` with
/// `Q = c·ξᵀAξ` for each input form.
pub fn matrices_from_forms(forms: &[Polynomial]) -> Result<Vec<ScalarMatrix>> {
    let c_inv = scaling_constant().inv()?;
    let half_c_inv = &c_inv * &Scalar::ratio(1, 2);
    let p = forms
        .first()
        .map(Polynomial::nvars)
        .ok_or_else(|| Error::Invariant("no forms given".into()))?;
    forms
        .iter()
        .map(|q| {
            if q.nvars() != p {
                return Err(Error::VariableMismatch {
                    left: p,
                    right: q.nvars(),
                });
            }
            if !q.is_homogeneous(2) {
                return Err(Error::NotQuadratic);
            }
            let mut a = ScalarMatrix::zeros(p, p);
            for (mono, coef) in q.terms() {
                let idx: Vec<usize> = mono
                    .exponents()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                    .collect();
                let (i, j) = (idx[0], idx[1]);
                if i == j {
                    a.set(i, i, coef * &c_inv);
                } else {
                    let v = coef * &half_c_inv;
                    a.set(i, j, v.clone());
                    a.set(j, i, v);
                }
            }
            Ok(a)
        })
        .collect()
}

/// Sphere map built from the division algebra of dimension `d`: on
/// `ξ = (u, v) ∈ F_d × F_d`, `Q_1 = c(|u|² − |v|²)` and
/// `Q_(1+i) = 2c·(u v̄)_i`. Here `p = 2d`, `q = d + 1`.
pub fn hopf_map(d: usize) -> Result<QuadraticSphereMap> {
    if !crate::cdalgebra::DIMS.contains(&d) {
        return Err(Error::Domain(format!("d = {d} not in {{1, 2, 4, 8}}")));
    }
    let p = 2 * d;
    let c = scaling_constant();
    let two_c = &c * &Scalar::from_int(2);
    let u = AlgebraElement::symbolic(p, 0, d)?;
    let v = AlgebraElement::symbolic(p, d, d)?;
    let mut forms = vec![(&u.norm_poly() - &v.norm_poly()).scale(&c)];
    let w = u.mul(&v.conjugate())?;
    forms.extend(w.components().iter().map(|wi| wi.scale(&two_c)));
    QuadraticSphereMap::new(matrices_from_forms(&forms)?)
}

/// Outcome of [`verify_spheremap`]. Residuals are listed only when nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereMapReport {
    pub ok: bool,
    /// `Σ Q_i² − (3/4)|ξ|⁴`
    pub sum_of_squares_residual: Polynomial,
    /// `(i, j, ⟨∇Q_i, ∇Q_j⟩ − 3δ_ij|ξ|²)` for each failing pair, zero-based
    pub gradient_residuals: Vec<(usize, usize, Polynomial)>,
}

/// Exact check of both sphere-map identities.
pub fn verify_spheremap(map: &QuadraticSphereMap) -> Result<SphereMapReport> {
    let p = map.p();
    let forms = map.forms();
    let norm = norm_sq_poly(p);
    let target4 = (&norm * &norm).scale(&Scalar::ratio(3, 4));
    let sum_sq = forms
        .iter()
        .fold(Polynomial::zero(p), |acc, q| &acc + &(q * q));
    let sum_of_squares_residual = &sum_sq - &target4;

    let target2 = norm.scale(&Scalar::from_int(3));
    let pairs: Vec<(usize, usize)> = (0..forms.len())
        .flat_map(|i| (i..forms.len()).map(move |j| (i, j)))
        .collect();
    let residuals = pairs
        .par_iter()
        .map(|&(i, j)| {
            let g = grad_inner(&forms[i], &forms[j])?;
            Ok((i, j, if i == j { &g - &target2 } else { g }))
        })
        .collect::<Result<Vec<_>>>()?;
    let gradient_residuals: Vec<_> = residuals
        .into_iter()
        .filter(|(_, _, r)| !r.is_zero())
        .collect();
    Ok(SphereMapReport {
        ok: sum_of_squares_residual.is_zero() && gradient_residuals.is_empty(),
        sum_of_squares_residual,
        gradient_residuals,
    })
}

/// The map's matrices checked against the Hurwitz equations.
pub fn hurwitz_report(map: &QuadraticSphereMap) -> HmeReport {
    verify_hme(map.matrices())
}

#[derive(Serialize, Deserialize)]
struct MapWire {
    p: usize,
    q: usize,
    scaling: Scalar,
    matrices: Vec<ScalarMatrix>,
}

impl Serialize for QuadraticSphereMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapWire {
            p: self.p,
            q: self.q(),
            scaling: scaling_constant(),
            matrices: self.matrices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticSphereMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = MapWire::deserialize(d)?;
        if wire.scaling != scaling_constant() {
            return Err(D::Error::custom(format!(
                "scaling must be √3/2, got {}",
                wire.scaling
            )));
        }
        let map = QuadraticSphereMap::new(wire.matrices).map_err(D::Error::custom)?;
        if map.p != wire.p || map.q() != wire.q {
            return Err(D::Error::custom("p/q header disagrees with the matrices"));
        }
        Ok(map)
    }
}
