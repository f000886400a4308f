//! Cubic solutions of the eiconal equation `|∇f|² = 9|x|⁴`: the reducible
//! family `f_0`, the four Cartan cubics `f_d`, the normal-form assembler and
//! the exact verifiers.

use serde::{Deserialize, Serialize};

use crate::cdalgebra::{AlgebraElement, DIMS};
use crate::error::{Error, Result};
use crate::hurwitz::rho;
use crate::matrix::ScalarMatrix;
use crate::poly::{grad_inner, norm_sq_poly, Monomial, Polynomial};
use crate::scalar::Scalar;
use crate::spheremap::{sigma, verify_spheremap, QuadraticSphereMap};

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn three_sqrt3_half() -> Scalar {
    Scalar::sqrt3() * Scalar::ratio(3, 2)
}

/// `f_0 = x_n³ − 3x_n(x_1² + … + x_(n−1)²)`.
pub fn build_f0(n: usize) -> Result<Polynomial> {
    if n < 2 {
        return Err(Error::Domain(format!("f0 needs n >= 2, got {n}")));
    }
    Polynomial::try_zero(n)?;
    let xn = Polynomial::var(n, n - 1);
    let rest = norm_sq_poly(n - 1).embed(n, &(0..n - 1).collect::<Vec<_>>())?;
    Ok(&xn.pow(3) - &(&xn * &rest).scale(&int(3)))
}

/// Cartan cubic `f_d` in `n = 3d + 2` variables laid out as
/// `(X_0, X_1, X_2, x_(n−1), x_n)` with `X_k = (x_(kd+1), …, x_(kd+d))`:
///
/// ```text
/// f_d = x_n³ − 3x_n x_(n−1)² + (3/2) x_n (|X_0|² + |X_1|² − 2|X_2|²)
///     + (3√3/2) x_(n−1) (|X_0|² − |X_1|²)
///     + (3√3/2) ((X_0 X_1) X_2 + X̄_2 (X̄_1 X̄_0))
/// ```
pub fn build_cartan(d: usize) -> Result<Polynomial> {
    if !DIMS.contains(&d) {
        return Err(Error::Domain(format!("d = {d} not in {{1, 2, 4, 8}}")));
    }
    let n = 3 * d + 2;
    let x0 = AlgebraElement::symbolic(n, 0, d)?;
    let x1 = AlgebraElement::symbolic(n, d, d)?;
    let x2 = AlgebraElement::symbolic(n, 2 * d, d)?;
    let y = Polynomial::var(n, n - 2);
    let z = Polynomial::var(n, n - 1);
    let (n0, n1, n2) = (x0.norm_poly(), x1.norm_poly(), x2.norm_poly());

    let triple = x0.mul(&x1)?.mul(&x2)?;
    let triple_bar = x2.conjugate().mul(&x1.conjugate().mul(&x0.conjugate())?)?;
    let trilinear = triple.add(&triple_bar)?;
    if trilinear.components()[1..].iter().any(|c| !c.is_zero()) {
        return Err(Error::VerificationFailed(
            "trilinear term is not real".into(),
        ));
    }

    let mut f = &z.pow(3) - &(&z * &(&y * &y)).scale(&int(3));
    let mix = &(&n0 + &n1) - &n2.scale(&int(2));
    f = &f + &(&z * &mix).scale(&Scalar::ratio(3, 2));
    f = &f + &(&y * &(&n0 - &n1)).scale(&three_sqrt3_half());
    f = &f + &trilinear.components()[0].scale(&three_sqrt3_half());
    Ok(f)
}

/// Normal-form data `(p, q, Q)`: `A = ½|ξ|² − |η|²` on `ξ ∈ R^p`, `η ∈ R^q`,
/// and `B = Σ η_j Q_j(ξ)` from a verified sphere map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicData {
    p: usize,
    q: usize,
    map: Option<QuadraticSphereMap>,
}

impl CubicData {
    /// The `p = 0` shape; yields `f_0` in `n = q + 1` variables.
    pub fn reducible(q: usize) -> Result<Self> {
        CubicData::new(0, q, None)
    }

    /// Data carried by a sphere map with `p = map.p()`, `q = map.q()`.
    pub fn from_map(map: QuadraticSphereMap) -> Result<Self> {
        CubicData::new(map.p(), map.q(), Some(map))
    }

    pub fn new(p: usize, q: usize, map: Option<QuadraticSphereMap>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invariant(
                "q = 0 admits no eiconal cubic (A would equal |x|²/2)".into(),
            ));
        }
        if p + q + 1 > crate::poly::MAX_VARS {
            return Err(Error::VariableCount(p + q + 1));
        }
        match (&map, p) {
            (None, 0) => {}
            (Some(_), 0) => {
                return Err(Error::Invariant("p = 0 takes no sphere map".into()));
            }
            (None, _) => {
                return Err(Error::Invariant(format!("p = {p} requires a sphere map")));
            }
            (Some(m), _) => {
                if m.p() != p || m.q() != q {
                    return Err(Error::Invariant(format!(
                        "map has (p, q) = ({}, {}), expected ({p}, {q})",
                        m.p(),
                        m.q()
                    )));
                }
                let report = verify_spheremap(m)?;
                if !report.ok {
                    return Err(Error::VerificationFailed(
                        "sphere map identities do not hold".into(),
                    ));
                }
            }
        }
        Ok(CubicData { p, q, map })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.p + self.q + 1
    }

    pub fn map(&self) -> Option<&QuadraticSphereMap> {
        self.map.as_ref()
    }
}

/// `f = x_n³ + 3x_n(½Σξ_i² − Ση_j²) + 3Ση_jQ_j(ξ)` over `(ξ, η, x_n)`.
pub fn assemble_cubic(data: &CubicData) -> Result<Polynomial> {
    let (p, q, n) = (data.p, data.q, data.n());
    let xn = Polynomial::var(n, n - 1);
    let mut a = Polynomial::zero(n);
    for i in 0..p {
        a = &a + &Polynomial::var(n, i).pow(2).scale(&Scalar::ratio(1, 2));
    }
    for j in 0..q {
        a = &a - &Polynomial::var(n, p + j).pow(2);
    }
    let mut b = Polynomial::zero(n);
    if let Some(map) = &data.map {
        let xi_slots: Vec<usize> = (0..p).collect();
        for (j, form) in map.forms().iter().enumerate() {
            let lifted = form.embed(n, &xi_slots)?;
            b = &b + &(&Polynomial::var(n, p + j) * &lifted);
        }
    }
    Ok(&(&xn.pow(3) + &(&xn * &a).scale(&int(3))) + &b.scale(&int(3)))
}

/// Outcome of [`verify_eiconal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EiconalReport {
    pub ok: bool,
    /// `|∇f|² − 9|x|⁴`
    pub residual: Polynomial,
}

/// `|∇f|² − 9|x|⁴`, exactly.
pub fn verify_eiconal(f: &Polynomial) -> Result<EiconalReport> {
    let n = f.nvars();
    let norm = norm_sq_poly(n);
    let residual = &grad_inner(f, f)? - &(&norm * &norm).scale(&int(9));
    Ok(EiconalReport {
        ok: residual.is_zero(),
        residual,
    })
}

pub fn verify_harmonic(f: &Polynomial) -> bool {
    f.laplacian().is_zero()
}

/// Splits `f = x_n³ + 3x_nA(x̄) + 3B(x̄)` into `(A, B)` over `n − 1` variables.
pub fn split_normal_form(f: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    let n = f.nvars();
    if n < 2 {
        return Err(Error::Domain("normal form needs n >= 2".into()));
    }
    let m = n - 1;
    let third = Scalar::ratio(1, 3);
    let mut a = Polynomial::zero(m);
    let mut b = Polynomial::zero(m);
    let mut lead = Scalar::zero();
    for (mono, c) in f.terms() {
        let e = mono.exponents();
        if mono.degree() != 3 {
            return Err(Error::Invariant("cubic must be homogeneous".into()));
        }
        let rest = Monomial::new(e[..m].to_vec());
        match e[m] {
            3 => lead = c.clone(),
            1 => a.add_term(rest, c * &third),
            0 => b.add_term(rest, c * &third),
            _ => {
                return Err(Error::Invariant(
                    "x_n² x_i terms present; not in normal form".into(),
                ))
            }
        }
    }
    if !lead.is_one() {
        return Err(Error::Invariant(format!(
            "x_n³ coefficient is {lead}, not 1"
        )));
    }
    Ok((a, b))
}

/// Residuals of the three equations the eiconal condition splits into for a
/// normal-form cubic:
/// `2A + |∇A|² − 2|x̄|²`, `⟨∇A, ∇B⟩`, `A² + |∇B|² − |x̄|⁴`.
pub fn normal_form_residuals(a: &Polynomial, b: &Polynomial) -> Result<[Polynomial; 3]> {
    let norm = norm_sq_poly(a.nvars());
    let two = int(2);
    let first = &(&a.scale(&two) + &grad_inner(a, a)?) - &norm.scale(&two);
    let second = grad_inner(a, b)?;
    let third = &(&(a * a) + &grad_inner(b, b)?) - &(&norm * &norm);
    Ok([first, second, third])
}

/// Row of the dimension scan: `p = 2^(ν+1)`, `q = 2^ν + 1`, `n = p + q + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleRow {
    pub nu: u32,
    pub p: u64,
    pub q: u64,
    pub n: u64,
}

/// All `(p, q)` with `1 ≤ p ≤ p_max`, `q ≥ 2` and
/// `1 + σ(p − 1) ≤ q ≤ 1 + ρ(p/2)` (with `ρ(p/2) = 0` for odd `p`).
pub fn feasibility_scan(p_max: u64) -> Result<Vec<FeasibleRow>> {
    if p_max == 0 {
        return Err(Error::Domain("p_max must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for p in 1..=p_max {
        let upper = 1 + if p % 2 == 0 { rho(p / 2)? } else { 0 };
        if upper < 2 {
            continue;
        }
        let lower = (1 + sigma(p - 1)?).max(2);
        for q in lower..=upper {
            rows.push(FeasibleRow {
                nu: p.trailing_zeros() - 1,
                p,
                q,
                n: p + q + 1,
            });
        }
    }
    Ok(rows)
}

/// True iff `f(Mx) = g(x)` exactly. `M` must be orthogonal.
pub fn congruence_check(f: &Polynomial, g: &Polynomial, m: &ScalarMatrix) -> Result<bool> {
    if !m.is_orthogonal() {
        return Err(Error::NotOrthogonal);
    }
    if f.nvars() != g.nvars() {
        return Err(Error::VariableMismatch {
            left: f.nvars(),
            right: g.nvars(),
        });
    }
    Ok(&f.substitute_linear(m)? == g)
}

/// Rotation `M` of the last two coordinates with `f_0(Mx)` equal to the
/// `q = 1` normal-form cubic
/// `x_n³ + (3/2)x_n(x_1² + … + x_(n−2)² − 2x_(n−1)²) + (3√3/2)x_(n−1)(x_1² + … + x_(n−2)²)`:
///
/// ```text
/// y_(n−1) = −½ x_(n−1) + (√3/2) x_n
/// y_n     = −(√3/2) x_(n−1) − ½ x_n
/// ```
pub fn q1_rotation(n: usize) -> Result<ScalarMatrix> {
    if n < 3 {
        return Err(Error::Domain("the q = 1 form needs n >= 3".into()));
    }
    let mut m = ScalarMatrix::identity(n);
    let half = Scalar::ratio(1, 2);
    let s = Scalar::sqrt3() * Scalar::ratio(1, 2);
    m.set(n - 2, n - 2, -&half);
    m.set(n - 2, n - 1, s.clone());
    m.set(n - 1, n - 2, -&s);
    m.set(n - 1, n - 1, -&half);
    Ok(m)
}
