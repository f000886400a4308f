//! Floating-point recognition of eiconal cubics.
//!
//! The pipeline mirrors the reduction to normal form: find the maximum of `f`
//! on the unit sphere, rotate it to the last axis so that
//! `f = x_n³ + 3x_nA(x̄) + 3B(x̄)`, diagonalize `A` (its eigenvalues must be
//! `1/2` or `−1`), check that `B` only has the mixed `V^{2,1}` component, read
//! off the quadratic forms `Q_j` and test them against the Hurwitz equations.
//! The recovered `(p, q)` names the congruence class.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::cartan::feasibility_scan;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Default tolerances. Each is independently overridable through
/// [`ClassifyOptions`].
pub mod tolerances {
    /// Sup-norm of `|∇f|² − 9` over random unit points.
    pub const EICONAL: f64 = 1e-8;
    /// Distance of each eigenvalue of `A` from `1/2` or `−1`.
    pub const EIGENVALUE: f64 = 1e-6;
    /// Coefficient norms of `B₃₀`, `B₁₂`, `B₀₃`, the normal-form defects and
    /// the Hurwitz residual of the extracted `Q_j`.
    pub const B_COMPONENT: f64 = 1e-6;
    /// Tangential gradient at the returned sphere maximum.
    pub const STATIONARITY: f64 = 1e-10;
    pub const RESTARTS: usize = 32;
    pub const SAMPLES: usize = 200;
}

const MAX_ASCENT_STEPS: usize = 20_000;
const MAX_NEWTON_STEPS: usize = 30;

/// `f(x) = Σ_{i≤j≤k} c_ijk x_i x_j x_k`, kept alongside the fully symmetric
/// tensor `T` with `f(x) = Σ_{ijk} T_ijk x_i x_j x_k`.
#[derive(Clone, PartialEq)]
pub struct FloatCubic {
    n: usize,
    tensor: Vec<f64>,
}

fn multiplicity(i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        1.0
    } else if i == j || j == k || i == k {
        3.0
    } else {
        6.0
    }
}

impl FloatCubic {
    /// Builds from `(i, j, k)` coefficient triples (zero-based, any order;
    /// repeated triples add up).
    pub fn from_terms(n: usize, terms: &[([usize; 3], f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::VariableCount(0));
        }
        let mut tensor = vec![0.0; n * n * n];
        for (idx, c) in terms {
            let mut s = *idx;
            s.sort_unstable();
            if s[2] >= n {
                return Err(Error::DimensionMismatch(format!(
                    "index {} out of range for n = {n}",
                    s[2] + 1
                )));
            }
            if !c.is_finite() {
                return Err(Error::Parse("non-finite coefficient".into()));
            }
            let share = c / multiplicity(s[0], s[1], s[2]);
            for p in permutations(s) {
                tensor[(p[0] * n + p[1]) * n + p[2]] += share;
            }
        }
        Ok(FloatCubic { n, tensor })
    }

    /// Float image of an exact homogeneous cubic.
    pub fn from_polynomial(f: &Polynomial) -> Result<Self> {
        if !f.is_homogeneous(3) {
            return Err(Error::Invariant(
                "polynomial is not a homogeneous cubic".into(),
            ));
        }
        let terms = f
            .to_f64_terms()?
            .into_iter()
            .map(|(exps, c)| {
                let idx: Vec<usize> = exps
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                    .collect();
                ([idx[0], idx[1], idx[2]], c)
            })
            .collect::<Vec<_>>();
        FloatCubic::from_terms(f.nvars(), &terms)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Canonical sorted-index coefficients `c_ijk`, `i ≤ j ≤ k`, zeros omitted.
    pub fn terms(&self) -> Vec<([usize; 3], f64)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let t = self.t(i, j, k);
                    if t != 0.0 {
                        out.push(([i, j, k], t * multiplicity(i, j, k)));
                    }
                }
            }
        }
        out
    }

    fn t(&self, i: usize, j: usize, k: usize) -> f64 {
        self.tensor[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms()
            .iter()
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    /// `H(x)_ij = Σ_k T_ijk x_k`; then `f = xᵀHx`, `∇f = 3Hx`, `∇²f = 6H`.
    fn contract(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let base = (i * n + j) * n;
            (0..n).map(|k| self.tensor[base + k] * x[k]).sum()
        })
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let h = self.contract(x);
        x.dot(&(h * x))
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.contract(x) * x * 3.0
    }

    /// `|∇f(x)|² − 9|x|⁴`.
    pub fn eiconal_defect(&self, x: &DVector<f64>) -> f64 {
        let g = self.gradient(x);
        let r2 = x.norm_squared();
        g.norm_squared() - 9.0 * r2 * r2
    }

    /// `g(y) = f(My)`.
    pub fn rotate(&self, m: &DMatrix<f64>) -> Result<FloatCubic> {
        let n = self.n;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch("rotation size".into()));
        }
        // three mode products, O(n⁴)
        let mut a = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for c in 0..n {
                    let base = (i * n + j) * n;
                    a[base + c] = (0..n).map(|k| self.tensor[base + k] * m[(k, c)]).sum();
                }
            }
        }
        let mut b = vec![0.0; n * n * n];
        for i in 0..n {
            for bb in 0..n {
                for c in 0..n {
                    b[(i * n + bb) * n + c] =
                        (0..n).map(|j| a[(i * n + j) * n + c] * m[(j, bb)]).sum();
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for aa in 0..n {
            for bb in 0..n {
                for c in 0..n {
                    out[(aa * n + bb) * n + c] =
                        (0..n).map(|i| b[(i * n + bb) * n + c] * m[(i, aa)]).sum();
                }
            }
        }
        Ok(FloatCubic { n, tensor: out })
    }
}

fn permutations(s: [usize; 3]) -> Vec<[usize; 3]> {
    let [a, b, c] = s;
    let mut all = vec![
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ];
    all.sort_unstable();
    all.dedup();
    all
}

impl fmt::Debug for FloatCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FloatCubic {{ n: {}, terms: {:?} }}",
            self.n,
            self.terms()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    ijk: [usize; 3],
    c: f64,
}

/// FloatCubic file: `{"n": …, "terms": [{"ijk": [i, j, k], "c": …}]}` with
/// one-based indices `i ≤ j ≤ k`.
#[derive(Serialize, Deserialize)]
pub struct FloatCubicFile {
    n: usize,
    terms: Vec<TermWire>,
}

impl From<&FloatCubic> for FloatCubicFile {
    fn from(f: &FloatCubic) -> Self {
        FloatCubicFile {
            n: f.n,
            terms: f
                .terms()
                .into_iter()
                .map(|(ijk, c)| TermWire {
                    ijk: ijk.map(|i| i + 1),
                    c,
                })
                .collect(),
        }
    }
}

impl TryFrom<FloatCubicFile> for FloatCubic {
    type Error = Error;

    fn try_from(file: FloatCubicFile) -> Result<Self> {
        let mut terms = Vec::with_capacity(file.terms.len());
        for t in file.terms {
            let [i, j, k] = t.ijk;
            if i == 0 || j == 0 || k == 0 {
                return Err(Error::Parse("indices are one-based".into()));
            }
            if !(i <= j && j <= k) {
                return Err(Error::Parse(format!("indices {:?} not sorted", t.ijk)));
            }
            terms.push(([i - 1, j - 1, k - 1], t.c));
        }
        FloatCubic::from_terms(file.n, &terms)
    }
}

/// A unit vector and the value of `f` there.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMax {
    pub point: DVector<f64>,
    pub value: f64,
    /// Norm of the tangential gradient `∇f − ⟨∇f, x⟩x`.
    pub stationarity: f64,
}

fn tangential(f: &FloatCubic, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let h = f.contract(x);
    let hx = &h * x;
    let value = x.dot(&hx);
    let g = hx * 3.0;
    let t = &g - x * g.dot(x);
    (value, t, h)
}

/// Projected gradient ascent with step adaptation, then Riemannian Newton
/// polishing, from a single start.
fn ascend(f: &FloatCubic, start: DVector<f64>) -> SphereMax {
    let mut x = start.normalize();
    let mut step = 0.1;
    let (mut value, mut t, _) = tangential(f, &x);
    for _ in 0..MAX_ASCENT_STEPS {
        let r = t.norm();
        if r < 1e-6 {
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let cand = (&x + &t * step).normalize();
            let cand_value = f.value(&cand);
            if cand_value >= value + 1e-4 * step * r * r {
                x = cand;
                value = cand_value;
                step = (step * 2.0).min(10.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        let (v, tt, _) = tangential(f, &x);
        value = v;
        t = tt;
    }
    // Newton on the sphere: solve P(6H − 3f·1)P s = −t in the least-squares sense.
    let n = f.nvars();
    for _ in 0..MAX_NEWTON_STEPS {
        let (v, tt, h) = tangential(f, &x);
        value = v;
        t = tt;
        if t.norm() < 1e-14 {
            break;
        }
        let proj = DMatrix::identity(n, n) - &x * x.transpose();
        let hess = &proj * (h * 6.0 - DMatrix::identity(n, n) * (3.0 * value)) * &proj;
        let svd = hess.svd(true, true);
        let Ok(s) = svd.solve(&(-&t), 1e-9) else {
            break;
        };
        let cand = (&x + &s).normalize();
        let (cv, ct, _) = tangential(f, &cand);
        if ct.norm() < t.norm() && cv >= value - 1e-12 {
            x = cand;
            value = cv;
            t = ct;
        } else {
            break;
        }
    }
    SphereMax {
        stationarity: t.norm(),
        point: x,
        value,
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Maximum of `f` on the unit sphere over `restarts` seeded random starts.
pub fn max_on_sphere(f: &FloatCubic, restarts: usize, seed: u64) -> Result<SphereMax> {
    if restarts == 0 {
        return Err(Error::Domain("restarts must be >= 1".into()));
    }
    if f.max_abs_coefficient() == 0.0 {
        return Err(Error::ZeroInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<DVector<f64>> = (0..restarts)
        .map(|_| random_unit(&mut rng, f.nvars()))
        .collect();
    let results: Vec<SphereMax> = starts.into_par_iter().map(|s| ascend(f, s)).collect();
    let best = results
        .into_iter()
        .filter(|r| r.stationarity <= tolerances::STATIONARITY)
        .fold(None::<SphereMax>, |best, r| match best {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        });
    best.ok_or_else(|| {
        Error::NonConvergence(format!(
            "no restart reached tangential gradient below {:e}",
            tolerances::STATIONARITY
        ))
    })
}

/// Orthogonal matrix whose last column is the unit vector `x` (a Householder
/// reflection swapping `e_n` and `x`).
fn frame_with_last(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut v = -x.clone();
    v[n - 1] += 1.0;
    let vv = v.norm_squared();
    if vv < 1e-30 {
        return DMatrix::identity(n, n);
    }
    DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv)
}

/// `f` rotated so that the chosen sphere maximum sits on the last axis.
#[derive(Debug, Clone)]
pub struct NormalForm {
    /// Orthogonal `R` with `g(y) = f(Ry)` in normal form and `R e_n = x⁰`.
    pub rotation: DMatrix<f64>,
    /// Symmetric matrix of the quadratic form `A` on the first `n − 1` variables.
    pub a: DMatrix<f64>,
    /// The rotated cubic `g`; `B` is its restriction to `x_n = 0`, divided by 3.
    pub rotated: FloatCubic,
    /// Coefficient of `y_n³`.
    pub lead: f64,
    /// Largest `|coefficient|` of `y_n² y_i`.
    pub cross: f64,
}

/// Rotates `x0` to the last axis and splits `f` into `A` and `B`. Fails when
/// the `y_n³` coefficient is not 1 or an `y_n² y_i` coefficient does not
/// vanish, within `tol`.
pub fn normal_form_reduce(f: &FloatCubic, x0: &DVector<f64>, tol: f64) -> Result<NormalForm> {
    let n = f.nvars();
    let rotation = frame_with_last(x0);
    let rotated = f.rotate(&rotation)?;
    let last = n - 1;
    let lead = rotated.t(last, last, last);
    let cross = (0..last)
        .map(|i| (3.0 * rotated.t(last, last, i)).abs())
        .fold(0.0, f64::max);
    // coefficient of y_n y_i y_j is 3·T_nij summed over ordered (i, j): A = T_n··
    let a = DMatrix::from_fn(last, last, |i, j| rotated.t(last, i, j));
    if (lead - 1.0).abs() > tol || cross > tol {
        return Err(Error::Tolerance(format!(
            "not in normal form: x_n³ coefficient {lead}, x_n² x_i coefficients up to {cross:e}"
        )));
    }
    Ok(NormalForm {
        rotation,
        a,
        rotated,
        lead,
        cross,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicClass {
    /// Congruent to the Cartan cubic built on the algebra of dimension `d`.
    Cartan(u32),
    F0Reducible,
    NotEiconal,
    Indeterminate,
}

impl fmt::Display for CubicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubicClass::Cartan(d) => write!(f, "cartan({d})"),
            CubicClass::F0Reducible => write!(f, "f0_reducible"),
            CubicClass::NotEiconal => write!(f, "not_eiconal"),
            CubicClass::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

impl Serialize for CubicClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub eiconal_tol: f64,
    pub eigen_tol: f64,
    pub b_tol: f64,
    pub restarts: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            eiconal_tol: tolerances::EICONAL,
            eigen_tol: tolerances::EIGENVALUE,
            b_tol: tolerances::B_COMPONENT,
            restarts: tolerances::RESTARTS,
            samples: tolerances::SAMPLES,
            seed: 0,
        }
    }
}

impl ClassifyOptions {
    /// All three tolerances set to `tol`.
    pub fn with_tol(tol: f64) -> Self {
        ClassifyOptions {
            eiconal_tol: tol,
            eigen_tol: tol,
            b_tol: tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecognitionReport {
    pub class: CubicClass,
    pub p: usize,
    pub q: usize,
    /// Eigenvalues of `A`, ascending.
    pub eigenvalues: Vec<f64>,
    /// `eiconal`, `stationarity`, `b30`, `b12`, `b03`, `hurwitz` (all ≥ 0).
    pub residuals: BTreeMap<String, f64>,
    /// Orthogonal `W` with `f(Wy)` in the split normal form over `(ξ, η, x_n)`.
    #[serde(serialize_with = "serialize_matrix")]
    pub rotation: DMatrix<f64>,
    pub notes: Vec<String>,
}

fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect();
    rows.serialize(s)
}

impl RecognitionReport {
    fn new(n: usize) -> Self {
        RecognitionReport {
            class: CubicClass::Indeterminate,
            p: 0,
            q: 0,
            eigenvalues: Vec::new(),
            residuals: BTreeMap::new(),
            rotation: DMatrix::identity(n, n),
            notes: Vec::new(),
        }
    }

    fn finish(mut self, class: CubicClass, note: impl Into<String>) -> Self {
        self.class = class;
        let note = note.into();
        if !note.is_empty() {
            self.notes.push(note);
        }
        self
    }
}

/// Eigen-split of a normal form: `ξ` block (eigenvalue 1/2), then `η` block (−1).
struct Split {
    p: usize,
    q: usize,
    eigenvalues: Vec<f64>,
    /// `W = R · (V ⊕ 1)`
    frame: DMatrix<f64>,
    /// `f(W y)` with coordinates `(ξ, η, x_n)`
    cubic: FloatCubic,
}

fn split_eigenspaces(
    f: &FloatCubic,
    x0: &DVector<f64>,
    opts: &ClassifyOptions,
) -> std::result::Result<Split, (Vec<f64>, String)> {
    let n = f.nvars();
    let nf = normal_form_reduce(f, x0, opts.b_tol).map_err(|e| (Vec::new(), e.to_string()))?;
    let m = n - 1;
    let eig = nalgebra::SymmetricEigen::new(nf.a.clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let mut p = 0;
    let mut q = 0;
    for &i in &order {
        let lam = eig.eigenvalues[i];
        if (lam - 0.5).abs() <= opts.eigen_tol {
            p += 1;
        } else if (lam + 1.0).abs() <= opts.eigen_tol {
            q += 1;
        } else {
            return Err((
                eigenvalues,
                format!(
                    "eigenvalue {lam} of A is not within {:e} of 1/2 or -1",
                    opts.eigen_tol
                ),
            ));
        }
    }
    // columns sorted by descending eigenvalue put the 1/2-block first
    let mut v = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        v.view_mut((0, col), (m, 1))
            .copy_from(&eig.eigenvectors.column(i));
    }
    v[(m, m)] = 1.0;
    let frame = &nf.rotation * v;
    let cubic = f
        .rotate(&frame)
        .map_err(|e| (eigenvalues.clone(), e.to_string()))?;
    Ok(Split {
        p,
        q,
        eigenvalues,
        frame,
        cubic,
    })
}

/// Coefficient norms of the pure-ξ, one-ξ and pure-η parts of `B`, where
/// `3B` is the `x_n`-free part of the split cubic.
fn b_components(s: &Split) -> (f64, f64, f64) {
    let (p, m) = (s.p, s.p + s.q);
    let (mut b30, mut b12, mut b03) = (0.0, 0.0, 0.0);
    for ([i, j, k], c) in s.cubic.terms() {
        if k >= m {
            continue;
        }
        let xi_count = [i, j, k].iter().filter(|&&t| t < p).count();
        let coef = c / 3.0;
        match xi_count {
            3 => b30 += coef * coef,
            1 => b12 += coef * coef,
            0 => b03 += coef * coef,
            _ => {}
        }
    }
    (b30.sqrt(), b12.sqrt(), b03.sqrt())
}

/// Matrices `A_j` with `Q_j(ξ) = (√3/2)ξᵀA_jξ`, where `B₂₁ = Σ η_j Q_j(ξ)`.
fn sphere_map_matrices(s: &Split) -> Vec<DMatrix<f64>> {
    let c = 3f64.sqrt() / 2.0;
    (0..s.q)
        .map(|j| DMatrix::from_fn(s.p, s.p, |a, b| s.cubic.t(a, b, s.p + j) / c))
        .collect()
}

fn hurwitz_residual(mats: &[DMatrix<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate().skip(i) {
            let mut m = a.transpose() * b + b.transpose() * a;
            if i == j {
                m -= DMatrix::identity(a.ncols(), a.ncols()) * 2.0;
            }
            worst = worst.max(m.amax());
        }
    }
    worst
}

/// Names the congruence class of a floating-point cubic.
pub fn classify(f: &FloatCubic, opts: &ClassifyOptions) -> RecognitionReport {
    let n = f.nvars();
    let mut report = RecognitionReport::new(n);

    if f.max_abs_coefficient() <= opts.eiconal_tol {
        report.residuals.insert("eiconal".into(), 9.0);
        return report.finish(CubicClass::NotEiconal, "f is the zero polynomial");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_5a3f_1e00_0000);
    let eiconal = (0..opts.samples.max(1))
        .map(|_| f.eiconal_defect(&random_unit(&mut rng, n)).abs())
        .fold(0.0, f64::max);
    report.residuals.insert("eiconal".into(), eiconal);
    if eiconal > opts.eiconal_tol {
        return report.finish(
            CubicClass::NotEiconal,
            format!("|∇f|² − 9|x|⁴ reaches {eiconal:e} on the unit sphere"),
        );
    }

    let best = match max_on_sphere(f, opts.restarts, opts.seed) {
        Ok(b) => b,
        Err(e) => return report.finish(CubicClass::Indeterminate, e.to_string()),
    };
    report
        .residuals
        .insert("stationarity".into(), best.stationarity);

    if n == 1 {
        report.rotation = DMatrix::from_element(1, 1, best.point[0]);
        return report.finish(CubicClass::F0Reducible, "one variable: f = x³");
    }

    let mut split = match split_eigenspaces(f, &best.point, opts) {
        Ok(s) => s,
        Err((eigs, msg)) => {
            report.eigenvalues = eigs;
            return report.finish(CubicClass::Indeterminate, msg);
        }
    };

    // q = 1 with p ≥ 1 is f_0 seen from a non-isolated maximum; move to the
    // isolated one, −s(√3/2)e_η − ½e_n in split coordinates (s = sign of Q_1).
    if split.q == 1 && split.p >= 1 {
        let sign = sphere_map_matrices(&split)[0].trace().signum();
        let mut local = DVector::zeros(n);
        local[n - 2] = -sign * 3f64.sqrt() / 2.0;
        local[n - 1] = -0.5;
        let start = &split.frame * local;
        let polished = ascend(f, start);
        if polished.stationarity <= tolerances::STATIONARITY {
            if let Ok(s) = split_eigenspaces(f, &polished.point, opts) {
                report.notes.push(format!(
                    "q = 1 normal form (p = {}) rotated to the isolated maximum",
                    split.p
                ));
                report
                    .residuals
                    .insert("stationarity".into(), polished.stationarity);
                split = s;
            }
        }
    }

    report.p = split.p;
    report.q = split.q;
    report.eigenvalues = split.eigenvalues.clone();
    report.rotation = split.frame.clone();

    let (b30, b12, b03) = b_components(&split);
    report.residuals.insert("b30".into(), b30);
    report.residuals.insert("b12".into(), b12);
    report.residuals.insert("b03".into(), b03);
    if b30.max(b12).max(b03) > opts.b_tol {
        return report.finish(
            CubicClass::Indeterminate,
            "B has components outside the mixed (ξ, ξ, η) part",
        );
    }

    let mats = sphere_map_matrices(&split);
    let hme = hurwitz_residual(&mats);
    report.residuals.insert("hurwitz".into(), hme);
    if hme > opts.b_tol {
        return report.finish(
            CubicClass::Indeterminate,
            "extracted quadratic forms violate the Hurwitz equations",
        );
    }

    if split.p == 0 || split.q == 1 {
        return report.finish(CubicClass::F0Reducible, "");
    }
    let table = feasibility_scan(split.p as u64).unwrap_or_default();
    if table
        .iter()
        .any(|row| row.p == split.p as u64 && row.q == split.q as u64)
    {
        let d = (split.p / 2) as u32;
        return report.finish(CubicClass::Cartan(d), "");
    }
    report.finish(
        CubicClass::Indeterminate,
        format!(
            "(p, q) = ({}, {}) matches no admissible dimension pair",
            split.p, split.q
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_cartan, build_f0};

    fn float(f: &Polynomial) -> FloatCubic {
        FloatCubic::from_polynomial(f).unwrap()
    }

    #[test]
    fn terms_round_trip() {
        let f = FloatCubic::from_terms(3, &[([0, 1, 2], 2.0), ([0, 0, 1], -1.0), ([2, 2, 2], 1.0)])
            .unwrap();
        let terms = f.terms();
        assert_eq!(terms.len(), 3);
        assert!(terms.contains(&([0, 1, 2], 2.0)));
        assert!(terms.contains(&([0, 0, 1], -1.0)));
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!((f.value(&x) - (12.0 - 2.0 + 27.0)).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_values() {
        let f = float(&build_cartan(1).unwrap());
        let m = random_orthogonal(5, 7);
        let g = f.rotate(&m).unwrap();
        let y = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, 0.7]);
        assert!((g.value(&y) - f.value(&(&m * &y))).abs() < 1e-12);
    }

    #[test]
    fn max_of_reducible_cubic() {
        let f = float(&build_f0(3).unwrap());
        let best = max_on_sphere(&f, 32, 1).unwrap();
        assert!((best.value - 1.0).abs() < 1e-12);
        let g = f.gradient(&best.point);
        assert!((&g - &best.point * 3.0).norm() < 1e-9);
    }

    #[test]
    fn max_of_one_variable_cube() {
        let f = FloatCubic::from_terms(1, &[([0, 0, 0], 1.0)]).unwrap();
        let best = max_on_sphere(&f, 4, 0).unwrap();
        assert!((best.point[0] - 1.0).abs() < 1e-12);
        assert!((best.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_input_rejected() {
        let f = FloatCubic::from_terms(2, &[]).unwrap();
        assert_eq!(max_on_sphere(&f, 4, 0), Err(Error::ZeroInput));
        let report = classify(&f, &ClassifyOptions::default());
        assert_eq!(report.class, CubicClass::NotEiconal);
    }

    #[test]
    fn reducible_normal_form() {
        let f = float(&build_f0(4).unwrap());
        let e = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
        let nf = normal_form_reduce(&f, &e, 1e-9).unwrap();
        assert!((nf.a.clone() + DMatrix::identity(3, 3)).amax() < 1e-12);
        let b_max = nf
            .rotated
            .terms()
            .iter()
            .filter(|(ijk, _)| ijk[2] < 3)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max);
        assert!(b_max < 1e-12);
    }

    #[test]
    fn cartan_normal_form_spectrum() {
        let f = float(&build_cartan(1).unwrap());
        let e = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let nf = normal_form_reduce(&f, &e, 1e-9).unwrap();
        let mut eig: Vec<f64> = nf.a.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let expected = [-1.0, -1.0, 0.5, 0.5];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn off_maximum_is_rejected() {
        let f = float(&build_f0(3).unwrap());
        let e = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            normal_form_reduce(&f, &e, 1e-6),
            Err(Error::Tolerance(_))
        ));
    }

    #[test]
    fn classify_reducible() {
        let f = float(&build_f0(7).unwrap());
        let report = classify(&f, &ClassifyOptions::default());
        assert_eq!(report.class, CubicClass::F0Reducible);
        assert_eq!((report.p, report.q), (0, 6));
    }

    #[test]
    fn classify_sum_of_cubes() {
        let f = FloatCubic::from_terms(2, &[([0, 0, 0], 1.0), ([1, 1, 1], 1.0)]).unwrap();
        let x = DVector::from_vec(vec![1.0, 1.0]) / 2f64.sqrt();
        assert!((f.eiconal_defect(&x) + 4.5).abs() < 1e-12);
        let report = classify(&f, &ClassifyOptions::default());
        assert_eq!(report.class, CubicClass::NotEiconal);
        assert!(report.residuals["eiconal"] > 1.0);
    }

    #[test]
    fn file_format() {
        let text = r#"{"n":2,"terms":[{"ijk":[1,1,2],"c":-3.0},{"ijk":[2,2,2],"c":1.0}]}"#;
        let file: FloatCubicFile = serde_json::from_str(text).unwrap();
        let f = FloatCubic::try_from(file).unwrap();
        assert_eq!(f, float(&build_f0(2).unwrap()));
        let unsorted: FloatCubicFile =
            serde_json::from_str(r#"{"n":2,"terms":[{"ijk":[2,1,1],"c":1.0}]}"#).unwrap();
        assert!(FloatCubic::try_from(unsorted).is_err());
        let zero_based: FloatCubicFile =
            serde_json::from_str(r#"{"n":2,"terms":[{"ijk":[0,1,1],"c":1.0}]}"#).unwrap();
        assert!(FloatCubic::try_from(zero_based).is_err());
    }
}
