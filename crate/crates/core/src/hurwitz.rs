//! Hurwitz-Radon numbers and exact solutions of the Hurwitz matrix equations
//!
//! ```text
//! A_iᵀ A_i = 1_s,    A_iᵀ A_j + A_jᵀ A_i = 0  (i ≠ j)
//! ```
//!
//! A [`HurwitzFamily`] can only be obtained through a constructor that runs
//! [`verify_hme`], so holding one is a proof that the equations hold exactly.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cdalgebra;
use crate::error::{Error, Result};
use crate::matrix::ScalarMatrix;
use crate::poly::{norm_sq_poly, Polynomial, MAX_VARS};
use crate::scalar::Scalar;

/// Largest `m` accepted by [`build_hr_family`].
pub const MAX_FAMILY_SIZE: usize = 64;

/// Hurwitz-Radon number: for `m = 2^(4a+b)·odd` with `0 ≤ b ≤ 3`, `ρ(m) = 8a + 2^b`.
pub fn rho(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("rho is defined for m >= 1".into()));
    }
    let v = u64::from(m.trailing_zeros());
    let (a, b) = (v / 4, v % 4);
    Ok(8 * a + (1 << b))
}

/// `ρ(m/2)` with `ρ` extended by zero off the integers.
fn rho_of_half(m: u64) -> Result<u64> {
    if m % 2 == 1 {
        Ok(0)
    } else {
        rho(m / 2)
    }
}

/// Maximal size of a symmetric solution of the Hurwitz equations on R^m,
/// `1 + ρ(m/2)` (which is 1 for odd `m`).
pub fn rho_symm(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("rho_symm is defined for m >= 1".into()));
    }
    Ok(1 + rho_of_half(m)?)
}

/// Which equation a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// `A_iᵀ A_i ≠ 1`
    Orthogonality { i: usize },
    /// `A_iᵀ A_j + A_jᵀ A_i ≠ 0`
    Anticommutation { i: usize, j: usize },
    /// member is not `m×s`
    Shape { i: usize },
    /// member of a symmetric family is not symmetric
    Asymmetric { i: usize },
}

/// Result of [`verify_hme`]: empty `violations` means the equations hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HmeReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks the Hurwitz matrix equations exactly and lists every violated
/// member or pair (indices are zero-based).
pub fn verify_hme(matrices: &[ScalarMatrix]) -> HmeReport {
    let mut violations = Vec::new();
    let Some(first) = matrices.first() else {
        return HmeReport {
            ok: true,
            violations,
        };
    };
    let (m, s) = (first.rows(), first.cols());
    for (i, a) in matrices.iter().enumerate() {
        if a.rows() != m || a.cols() != s {
            violations.push(Violation::Shape { i });
        }
    }
    if !violations.is_empty() {
        return HmeReport {
            ok: false,
            violations,
        };
    }
    let transposes: Vec<ScalarMatrix> = matrices.iter().map(ScalarMatrix::transpose).collect();
    for i in 0..matrices.len() {
        let gram = transposes[i].mul(&matrices[i]).expect("shapes checked");
        if !gram.is_identity() {
            violations.push(Violation::Orthogonality { i });
        }
        for j in i + 1..matrices.len() {
            let p = transposes[i].mul(&matrices[j]).expect("shapes checked");
            let q = transposes[j].mul(&matrices[i]).expect("shapes checked");
            if !p.add(&q).expect("same shape").is_zero() {
                violations.push(Violation::Anticommutation { i, j });
            }
        }
    }
    HmeReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Verified solution `{A_1, …, A_r}` of size `[r, s, m]` (each `A_i` is `m×s`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HurwitzFamily {
    matrices: Vec<ScalarMatrix>,
    symmetric: bool,
}

impl HurwitzFamily {
    /// Accepts the matrices only if they solve the Hurwitz equations exactly
    /// (and are symmetric when `symmetric` is set).
    pub fn new(matrices: Vec<ScalarMatrix>, symmetric: bool) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Invariant("empty family".into()));
        }
        let mut report = verify_hme(&matrices);
        if symmetric {
            for (i, a) in matrices.iter().enumerate() {
                if !a.is_symmetric() {
                    report.violations.push(Violation::Asymmetric { i });
                }
            }
            report.ok = report.violations.is_empty();
        }
        if !report.ok {
            return Err(Error::VerificationFailed(format!(
                "Hurwitz equations violated: {:?}",
                report.violations
            )));
        }
        Ok(HurwitzFamily {
            matrices,
            symmetric,
        })
    }

    pub fn r(&self) -> usize {
        self.matrices.len()
    }

    pub fn s(&self) -> usize {
        self.matrices[0].cols()
    }

    pub fn m(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn matrices(&self) -> &[ScalarMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<ScalarMatrix> {
        self.matrices
    }

    pub fn traces(&self) -> Vec<Scalar> {
        self.matrices.iter().map(ScalarMatrix::trace).collect()
    }

    pub fn is_trace_free(&self) -> bool {
        self.matrices.iter().all(|a| a.trace().is_zero())
    }

    pub fn verify(&self) -> HmeReport {
        verify_hme(&self.matrices)
    }
}

/// Family file contents before verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub symmetric: bool,
    pub matrices: Vec<ScalarMatrix>,
}

impl FamilyFile {
    /// Checks the declared `r, s, m` against the matrices.
    pub fn check_header(&self) -> Result<()> {
        if self.matrices.len() != self.r {
            return Err(Error::Parse(format!(
                "r = {} but {} matrices given",
                self.r,
                self.matrices.len()
            )));
        }
        if let Some(a) = self
            .matrices
            .iter()
            .find(|a| a.rows() != self.m || a.cols() != self.s)
        {
            return Err(Error::Parse(format!(
                "declared {}x{} but found a {}x{} matrix",
                self.m,
                self.s,
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }
}

impl From<&HurwitzFamily> for FamilyFile {
    fn from(f: &HurwitzFamily) -> Self {
        FamilyFile {
            r: f.r(),
            s: f.s(),
            m: f.m(),
            symmetric: f.symmetric,
            matrices: f.matrices.clone(),
        }
    }
}

impl TryFrom<FamilyFile> for HurwitzFamily {
    type Error = Error;

    fn try_from(file: FamilyFile) -> Result<Self> {
        file.check_header()?;
        HurwitzFamily::new(file.matrices, file.symmetric)
    }
}

impl Serialize for HurwitzFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HurwitzFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = FamilyFile::deserialize(d)?;
        HurwitzFamily::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Left multiplication by the basis element `e_i` of the dimension-`dim` algebra.
fn left_multiplication(dim: usize, i: usize) -> Result<ScalarMatrix> {
    let mut l = ScalarMatrix::zeros(dim, dim);
    for (k, j, sign) in cdalgebra::left_mul_signs(dim, i)? {
        l.set(k, j, Scalar::from_int(i64::from(sign)));
    }
    Ok(l)
}

/// `ρ(m) − 1` anticommuting skew-symmetric orthogonal matrices on R^m
/// (a real Clifford module), for `m` a power of two.
fn clifford_generators(m: usize) -> Result<Vec<ScalarMatrix>> {
    if m <= 8 {
        return (1..m).map(|i| left_multiplication(m, i)).collect();
    }
    if !m.is_multiple_of(16) {
        return Err(Error::UnsupportedSize(format!("m = {m}")));
    }
    // Eight generators on R^16: octonion imaginary units J_i doubled to
    // diag(J_i, -J_i), plus [[0, 1], [-1, 0]].
    let i8m = ScalarMatrix::identity(8);
    let z8 = ScalarMatrix::zeros(8, 8);
    let mut sixteen = Vec::with_capacity(8);
    for j in clifford_generators(8)? {
        sixteen.push(ScalarMatrix::from_blocks(&j, &z8, &z8, &j.neg())?);
    }
    sixteen.push(ScalarMatrix::from_blocks(&z8, &i8m, &i8m.neg(), &z8)?);

    // Periodicity: with ω = E_1⋯E_8 (symmetric, ω² = 1, anticommuting with
    // every E_i), {E_i ⊗ 1} ∪ {ω ⊗ S_j} generates on R^(16·m').
    let inner = m / 16;
    let inner_gens = clifford_generators(inner)?;
    let mut omega = ScalarMatrix::identity(16);
    for e in &sixteen {
        omega = omega.mul(e)?;
    }
    let id_inner = ScalarMatrix::identity(inner);
    let mut gens: Vec<ScalarMatrix> = sixteen.iter().map(|e| e.kron(&id_inner)).collect();
    gens.extend(inner_gens.iter().map(|s| omega.kron(s)));
    Ok(gens)
}

/// `r` orthogonal `m×m` matrices solving the Hurwitz equations, for
/// `m ∈ {1, 2, 4, …, 64}` and `1 ≤ r ≤ ρ(m)`. The first member is the identity.
///
/// For `m ≤ 8` the members are left multiplications by basis elements of the
/// Cayley-Dickson algebra of dimension `m`; larger sizes come from 2×2-block
/// doubling and tensoring with the 16-dimensional module.
pub fn build_hr_family(m: usize, r: usize) -> Result<HurwitzFamily> {
    if !m.is_power_of_two() || m > MAX_FAMILY_SIZE {
        return Err(Error::UnsupportedSize(format!(
            "m = {m}; supported sizes are 1, 2, 4, 8, 16, 32, 64"
        )));
    }
    let max = rho(m as u64)? as usize;
    if r == 0 || r > max {
        return Err(Error::TooLarge { r, max });
    }
    let mut matrices = vec![ScalarMatrix::identity(m)];
    matrices.extend(clifford_generators(m)?.into_iter().take(r - 1));
    HurwitzFamily::new(matrices, false)
}

/// Symmetric solution of size `[r, m, m]`:
/// `A_i = [[0, E_i], [E_iᵀ, 0]]` for `i < r` from an E-family of size
/// `[r−1, m/2, m/2]`, and `A_r = 1 ⊕ (−1)`. Every member is trace-free.
pub fn build_symmetric_family(m: usize, r: usize) -> Result<HurwitzFamily> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::UnsupportedSize(format!("m = {m} must be even")));
    }
    let max = rho_symm(m as u64)? as usize;
    if r < 2 || r > max {
        return Err(Error::TooLarge { r, max });
    }
    let t = m / 2;
    let e_family = build_hr_family(t, r - 1)?;
    let z = ScalarMatrix::zeros(t, t);
    let mut matrices = Vec::with_capacity(r);
    for e in e_family.matrices() {
        matrices.push(ScalarMatrix::from_blocks(&z, e, &e.transpose(), &z)?);
    }
    let id = ScalarMatrix::identity(t);
    matrices.push(id.direct_sum(&id.neg()));
    HurwitzFamily::new(matrices, true)
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// Orthonormal basis of the column space, by exact Gram-Schmidt. Fails when
/// a normalizing square root leaves Q(√2, √3).
fn orthonormal_column_basis(p: &ScalarMatrix) -> Result<Vec<Vec<Scalar>>> {
    let mut ortho: Vec<(Vec<Scalar>, Scalar)> = Vec::new();
    for j in 0..p.cols() {
        let mut v = p.column(j);
        for (u, uu) in &ortho {
            let coef = &dot(&v, u) / uu;
            if coef.is_zero() {
                continue;
            }
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= &(&coef * ui);
            }
        }
        if v.iter().all(Scalar::is_zero) {
            continue;
        }
        let vv = dot(&v, &v);
        ortho.push((v, vv));
    }
    ortho
        .into_iter()
        .map(|(v, vv)| {
            let norm = vv
                .sqrt_rational()
                .ok_or_else(|| Error::NotRepresentable(format!("√({vv})")))?;
            let inv = norm.inv()?;
            Ok(v.iter().map(|x| x * &inv).collect())
        })
        .collect()
}

/// Reduces a symmetric family of size `[r, m, m]` to a family of size
/// `[r−1, m/2, m/2]`.
///
/// One member `A` (the one with the lexicographically smallest serialized
/// form) is diagonalized to `1_t ⊕ (−1)_(m−t)` through its eigenprojectors
/// `(1 ± A)/2`; the remaining members become `[[0, E_i], [E_iᵀ, 0]]` in that
/// basis and the blocks `E_i` are returned.
pub fn split_symmetric_family(fam: &HurwitzFamily) -> Result<HurwitzFamily> {
    if !fam.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if fam.r() < 2 {
        return Err(Error::Degenerate("split needs r >= 2".into()));
    }
    let m = fam.m();
    let keys: Vec<String> = fam
        .matrices()
        .iter()
        .map(|a| serde_json::to_string(a).expect("matrix serializes"))
        .collect();
    let pivot = (0..fam.r())
        .min_by(|&a, &b| keys[a].cmp(&keys[b]))
        .expect("nonempty family");
    let a = &fam.matrices()[pivot];

    let id = ScalarMatrix::identity(m);
    let half = Scalar::ratio(1, 2);
    let p_plus = id.add(a)?.scale(&half);
    let p_minus = id.sub(a)?.scale(&half);
    let plus = orthonormal_column_basis(&p_plus)?;
    let minus = orthonormal_column_basis(&p_minus)?;
    let t = plus.len();
    if t == 0 || t == m {
        return Err(Error::Degenerate(format!(
            "pivot member is {}1",
            if t == 0 { "-" } else { "+" }
        )));
    }
    if plus.len() + minus.len() != m || 2 * t != m {
        return Err(Error::VerificationFailed(format!(
            "eigenspaces of dimensions {} and {} in R^{m}",
            plus.len(),
            minus.len()
        )));
    }
    let mut u = ScalarMatrix::zeros(m, m);
    for (j, col) in plus.iter().chain(minus.iter()).enumerate() {
        for (i, v) in col.iter().enumerate() {
            u.set(i, j, v.clone());
        }
    }
    let ut = u.transpose();
    let mut blocks = Vec::with_capacity(fam.r() - 1);
    for (idx, member) in fam.matrices().iter().enumerate() {
        if idx == pivot {
            continue;
        }
        let rotated = ut.mul(member)?.mul(&u)?;
        if !rotated.block(0, 0, t, t).is_zero() || !rotated.block(t, t, t, t).is_zero() {
            return Err(Error::VerificationFailed(format!(
                "member {idx} has nonzero diagonal blocks in the eigenbasis"
            )));
        }
        blocks.push(rotated.block(0, t, t, t));
    }
    HurwitzFamily::new(blocks, false)
}

/// Forms `b_k(x, y) = Σ_i x_i (A_i y)_k` over symbolic `x ∈ R^r`, `y ∈ R^s`
/// and checks `Σ_k b_k² = |x|²|y|²` as a polynomial identity.
pub fn composition_from_family(fam: &HurwitzFamily) -> Result<bool> {
    let (r, s, m) = (fam.r(), fam.s(), fam.m());
    let n = r + s;
    if n > MAX_VARS {
        return Err(Error::UnsupportedSize(format!(
            "r + s = {n} variables exceeds {MAX_VARS}"
        )));
    }
    let mut b = vec![Polynomial::zero(n); m];
    for (i, a) in fam.matrices().iter().enumerate() {
        let xi = Polynomial::var(n, i);
        for (k, bk) in b.iter_mut().enumerate() {
            for (j, v) in a.row(k).iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let term = (&xi * &Polynomial::var(n, r + j)).scale(v);
                *bk = &*bk + &term;
            }
        }
    }
    let lhs = b
        .iter()
        .fold(Polynomial::zero(n), |acc, bk| &acc + &(bk * bk));
    let x_sq = norm_sq_poly(r).embed(n, &(0..r).collect::<Vec<_>>())?;
    let y_sq = norm_sq_poly(s).embed(n, &(r..n).collect::<Vec<_>>())?;
    Ok((&lhs - &(&x_sq * &y_sq)).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        assert_eq!(rho(1).unwrap(), 1);
        assert_eq!(rho(8).unwrap(), 8);
        let powers: Vec<u64> = (0..9).map(|k| rho(1 << k).unwrap()).collect();
        assert_eq!(powers, [1, 2, 4, 8, 9, 10, 12, 16, 17]);
        assert_eq!(rho(12).unwrap(), 4);
        assert!(rho(0).is_err());
        for m in (1..200).step_by(2) {
            assert_eq!(rho(m).unwrap(), 1);
        }
    }

    #[test]
    fn rho_symm_values() {
        assert_eq!(rho_symm(3).unwrap(), 1);
        assert_eq!(rho_symm(2).unwrap(), 2);
        assert_eq!(rho_symm(16).unwrap(), 9);
        assert!(rho_symm(0).is_err());
    }

    #[test]
    fn small_families() {
        let f1 = build_hr_family(1, 1).unwrap();
        assert_eq!(f1.matrices(), &[ScalarMatrix::identity(1)]);
        let f2 = build_hr_family(2, 2).unwrap();
        assert_eq!(f2.matrices()[0], ScalarMatrix::identity(2));
        assert_eq!(
            f2.matrices()[1],
            ScalarMatrix::from_ints(&[&[0, -1], &[1, 0]])
        );
    }

    #[test]
    fn family_size_errors() {
        assert!(matches!(
            build_hr_family(16, 10),
            Err(Error::TooLarge { r: 10, max: 9 })
        ));
        assert!(matches!(
            build_hr_family(12, 1),
            Err(Error::UnsupportedSize(_))
        ));
        assert!(matches!(
            build_hr_family(128, 1),
            Err(Error::UnsupportedSize(_))
        ));
        assert!(matches!(build_hr_family(4, 0), Err(Error::TooLarge { .. })));
        assert!(matches!(
            build_symmetric_family(3, 2),
            Err(Error::UnsupportedSize(_))
        ));
        assert!(matches!(
            build_symmetric_family(4, 4),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            build_symmetric_family(4, 1),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn maximal_families_verify() {
        for k in 0..=6 {
            let m = 1usize << k;
            let r = rho(m as u64).unwrap() as usize;
            let fam = build_hr_family(m, r).unwrap();
            assert_eq!(fam.r(), r);
            assert!(fam.verify().ok);
        }
    }

    #[test]
    fn proof_pair_is_symmetric_solution() {
        let a1 = ScalarMatrix::from_ints(&[&[-1, 0], &[0, 1]]);
        let a2 = ScalarMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert!(verify_hme(&[a1.clone(), a2.clone()]).ok);
        assert!(HurwitzFamily::new(vec![a1, a2], true).is_ok());
    }

    #[test]
    fn identity_pair_fails() {
        let report = verify_hme(&[ScalarMatrix::identity(2), ScalarMatrix::identity(2)]);
        assert!(!report.ok);
        assert_eq!(
            report.violations,
            vec![Violation::Anticommutation { i: 0, j: 1 }]
        );
        assert!(HurwitzFamily::new(
            vec![ScalarMatrix::identity(2), ScalarMatrix::identity(2)],
            false
        )
        .is_err());
    }

    #[test]
    fn symmetric_construction_m2() {
        let fam = build_symmetric_family(2, 2).unwrap();
        assert_eq!(
            fam.matrices()[0],
            ScalarMatrix::from_ints(&[&[0, 1], &[1, 0]])
        );
        assert_eq!(
            fam.matrices()[1],
            ScalarMatrix::from_ints(&[&[1, 0], &[0, -1]])
        );
        assert!(fam.is_trace_free());
    }

    #[test]
    fn symmetric_families_are_trace_free() {
        for m in [2usize, 4, 8, 16, 32, 64] {
            let r = rho_symm(m as u64).unwrap() as usize;
            let fam = build_symmetric_family(m, r).unwrap();
            assert!(fam.is_symmetric() && fam.verify().ok, "m = {m}");
            assert!(fam.is_trace_free(), "m = {m}");
        }
    }

    #[test]
    fn splitting() {
        let small = split_symmetric_family(&build_symmetric_family(2, 2).unwrap()).unwrap();
        assert_eq!(small.matrices(), &[ScalarMatrix::identity(1)]);
        let four = split_symmetric_family(&build_symmetric_family(4, 3).unwrap()).unwrap();
        assert_eq!((four.r(), four.s(), four.m()), (2, 2, 2));
        assert!(four.verify().ok);
        let plain = build_hr_family(4, 2).unwrap();
        assert_eq!(split_symmetric_family(&plain), Err(Error::NotSymmetric));
    }

    #[test]
    fn split_rejects_single_member() {
        let lone = HurwitzFamily::new(vec![ScalarMatrix::identity(2)], true).unwrap();
        assert!(matches!(
            split_symmetric_family(&lone),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn compositions() {
        assert!(composition_from_family(&build_hr_family(1, 1).unwrap()).unwrap());
        assert!(composition_from_family(&build_hr_family(2, 2).unwrap()).unwrap());
        assert!(composition_from_family(&build_hr_family(8, 8).unwrap()).unwrap());
        assert!(composition_from_family(&build_hr_family(16, 9).unwrap()).unwrap());
    }

    #[test]
    fn family_json() {
        let fam = build_symmetric_family(4, 3).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        assert!(text.starts_with(r#"{"r":3,"s":4,"m":4,"symmetric":true,"matrices":"#));
        let back: HurwitzFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let lying = text.replacen(r#""r":3"#, r#""r":2"#, 1);
        assert!(serde_json::from_str::<HurwitzFamily>(&lying).is_err());
    }
}
