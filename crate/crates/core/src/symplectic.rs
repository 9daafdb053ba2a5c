//! Symplectic linear algebra on ℝ²ⁿ and the Korányi isometries it induces.
//!
//! Subspaces are carried as orthonormal bases (Euclidean inner product). The
//! symplectic complement, Lagrangian completion and the isometry between two
//! isotropic subspaces are all built from modified Gram–Schmidt with a
//! deterministic greedy choice of the next basis vector, so repeated calls
//! with the same input give bit-identical output.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{omega, HPoint};

/// Default isotropy tolerance (relative to the basis norms).
pub const ISOTROPY_TOL: f64 = 1e-10;

/// Orthonormality tolerance for bases accepted as-is.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Residual norm below which a vector is treated as already in the span.
const DEPENDENCE_TOL: f64 = 1e-10;

/// A vector of ℝ²ⁿ with interleaved `(v^{x₁}, v^{y₁}, …)` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SympVector(Vec<f64>);

impl SympVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::InvalidSubspace(format!(
                "vector length must be even and positive, got {}",
                v.len()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSubspace("non-finite component".into()));
        }
        Ok(SympVector(v))
    }

    /// Unit vector `∂/∂xᵢ` (zero-based `i`).
    pub fn e_x(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; 2 * n];
        v[2 * i] = 1.0;
        SympVector(v)
    }

    /// Unit vector `∂/∂yᵢ` (zero-based `i`).
    pub fn e_y(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; 2 * n];
        v[2 * i + 1] = 1.0;
        SympVector(v)
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn symp_form(v: &SympVector, w: &SympVector) -> Result<f64> {
    if v.0.len() != w.0.len() {
        return Err(Error::DimensionMismatch {
            expected: v.n(),
            found: w.n(),
        });
    }
    Ok(omega(&v.0, &w.0))
}

/// `𝒥(∂/∂xᵢ) = ∂/∂yᵢ`, `𝒥(∂/∂yᵢ) = −∂/∂xᵢ`.
pub fn complex_structure(v: &SympVector) -> SympVector {
    SympVector(j_apply(&v.0))
}

fn j_apply(v: &[f64]) -> Vec<f64> {
    v.chunks_exact(2).flat_map(|c| [-c[1], c[0]]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components of `v` along the orthonormal vectors `q`, twice
/// (classical MGS followed by one reorthogonalization pass).
fn project_out(v: &mut [f64], q: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in q {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// A linear subspace of ℝ²ⁿ held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    /// Files may hold any spanning set; it is orthonormalized on load.
    fn try_from(r: SubspaceRepr) -> Result<Self> {
        Subspace::span(r.n, &r.basis)
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            n: s.n,
            basis: s.basis,
        }
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..2 * n)
            .map(|i| {
                let mut e = vec![0.0; 2 * n];
                e[i] = 1.0;
                e
            })
            .collect();
        Subspace { n, basis }
    }

    /// Orthonormalizes `vectors` in order, dropping those already in the span.
    pub fn span(n: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSubspace("n must be positive".into()));
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len() / 2,
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSubspace("non-finite component".into()));
            }
            let scale = norm(v);
            if scale == 0.0 {
                continue;
            }
            let mut w: Vec<f64> = v.iter().map(|c| c / scale).collect();
            project_out(&mut w, &basis);
            let r = norm(&w);
            if r > DEPENDENCE_TOL {
                w.iter_mut().for_each(|c| *c /= r);
                basis.push(w);
            }
        }
        Ok(Subspace { n, basis })
    }

    /// Accepts `basis` only if it is already orthonormal within
    /// [`ORTHONORMAL_TOL`].
    pub fn from_orthonormal(n: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.len() > 2 * n {
            return Err(Error::InvalidSubspace(format!(
                "{} basis vectors in a space of dimension {}",
                basis.len(),
                2 * n
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.len() / 2,
                });
            }
            for (j, c) in basis.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(b, c) - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidSubspace(format!(
                        "basis vectors {j} and {i} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Subspace { n, basis })
    }

    /// `span{∂/∂x₁, …, ∂/∂x_j}`.
    pub fn canonical_isotropic(n: usize, j: usize) -> Self {
        assert!(j <= n);
        Subspace {
            n,
            basis: (0..j).map(|i| SympVector::e_x(n, i).0).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let mut w = v.to_vec();
        project_out(&mut w, &self.basis);
        norm(&w)
    }

    /// `max |ω(bᵢ, bⱼ)|` over basis pairs.
    pub fn isotropy_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(omega(a, b).abs());
            }
        }
        worst
    }

    fn check_same_n(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// True iff `|ω(bᵢ, bⱼ)| ≤ tol · |bᵢ| |bⱼ|` for all basis pairs.
pub fn is_isotropic(v: &Subspace, tol: f64) -> bool {
    v.basis.iter().enumerate().all(|(i, a)| {
        v.basis[i + 1..]
            .iter()
            .all(|b| omega(a, b).abs() <= tol * norm(a) * norm(b))
    })
}

/// Extends the orthonormal set `q` by `count` vectors chosen greedily from
/// `candidates`: at each step the candidate with the largest residual after
/// projecting out the current set (lowest index on ties).
fn greedy_extend(q: &mut Vec<Vec<f64>>, candidates: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut added = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for c in candidates {
            let mut w = c.clone();
            project_out(&mut w, q);
            let r = norm(&w);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, w));
            }
        }
        let (r, mut w) = best.expect("candidate set is non-empty");
        w.iter_mut().for_each(|c| *c /= r);
        project_out(&mut w, q);
        let r2 = norm(&w);
        w.iter_mut().for_each(|c| *c /= r2);
        q.push(w.clone());
        added.push(w);
    }
    added
}

/// `V^ω = {w : ω(v, w) = 0 ∀ v ∈ V}`, as the orthogonal complement of `𝒥V`
/// (since `ω(v, w) = ⟨𝒥v, w⟩`). Its dimension is always `2n − dim V`.
pub fn symp_complement(v: &Subspace) -> Subspace {
    let n = v.n;
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    for b in &v.basis {
        let mut jb = j_apply(b);
        project_out(&mut jb, &q);
        let r = norm(&jb);
        jb.iter_mut().for_each(|c| *c /= r);
        q.push(jb);
    }
    let basis = greedy_extend(&mut q, &Subspace::full(n).basis, 2 * n - v.dim());
    Subspace { n, basis }
}

/// Completes an isotropic subspace to a Lagrangian one containing it, by
/// repeatedly adjoining the unit vector of `V^ω` farthest from `V`.
/// The input basis is kept as the leading basis vectors of the result.
pub fn lagrangian_extension(v: &Subspace) -> Result<Subspace> {
    if !is_isotropic(v, ISOTROPY_TOL) {
        return Err(Error::NotIsotropic {
            defect: v.isotropy_defect(),
        });
    }
    let mut current = v.clone();
    while current.dim() < current.n {
        let complement = symp_complement(&current);
        let mut q = current.basis.clone();
        greedy_extend(&mut q, &complement.basis, 1);
        current = Subspace::span(current.n, &q)?;
    }
    Ok(current)
}

/// A Korányi isometry `Φ(z, t) = (φ z, t)` with `φ` orthogonal and symplectic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HIsometry {
    n: usize,
    /// `2n × 2n`, row-major.
    phi: Vec<f64>,
}

impl HIsometry {
    pub fn identity(n: usize) -> Self {
        let m = 2 * n;
        let mut phi = vec![0.0; m * m];
        (0..m).for_each(|i| phi[i * m + i] = 1.0);
        HIsometry { n, phi }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[f64] {
        &self.phi
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let m = 2 * self.n;
        (0..m).map(|i| dot(&self.phi[i * m..(i + 1) * m], v)).collect()
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.n(),
            });
        }
        HPoint::new(self.apply_vec(p.z()), p.t())
    }

    /// `max |φᵀφ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = 2 * self.n;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let s: f64 = (0..m).map(|k| self.phi[k * m + i] * self.phi[k * m + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `max |ω(φ eᵢ, φ eⱼ) − ω(eᵢ, eⱼ)|` over standard basis pairs.
    pub fn symplectic_defect(&self) -> f64 {
        let m = 2 * self.n;
        let cols: Vec<Vec<f64>> = (0..m)
            .map(|j| (0..m).map(|i| self.phi[i * m + j]).collect())
            .collect();
        let e = Subspace::full(self.n).basis;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((omega(&cols[i], &cols[j]) - omega(&e[i], &e[j])).abs());
            }
        }
        worst
    }
}

/// Columns `[v₁ … vₙ, 𝒥v₁ … 𝒥vₙ]` of a symplectic orthonormal frame built
/// from a Lagrangian basis.
fn symplectic_frame(lagrangian: &Subspace) -> DMatrix<f64> {
    let m = 2 * lagrangian.n;
    let mut cols = lagrangian.basis.clone();
    cols.extend(lagrangian.basis.iter().map(|b| j_apply(b)));
    DMatrix::from_fn(m, m, |i, j| cols[j][i])
}

/// Builds `Φ` with `Φ(V × {0}) = W × {0}` for isotropic `V`, `W` of equal
/// dimension: both are completed to Lagrangians `V′ ⊇ V`, `W′ ⊇ W` with
/// orthonormal bases extending those of `V` and `W`, and `φ` sends the
/// symplectic basis `{vᵢ} ∪ {𝒥vᵢ}` onto `{wᵢ} ∪ {𝒥wᵢ}`.
pub fn isometry_between_isotropic(v: &Subspace, w: &Subspace) -> Result<HIsometry> {
    v.check_same_n(w)?;
    if v.dim() != w.dim() {
        return Err(Error::SubspaceDimMismatch {
            left: v.dim(),
            right: w.dim(),
        });
    }
    for s in [v, w] {
        if !is_isotropic(s, ISOTROPY_TOL) {
            return Err(Error::NotIsotropic {
                defect: s.isotropy_defect(),
            });
        }
    }
    if v.dim() == 0 {
        return Ok(HIsometry::identity(v.n));
    }
    let fv = symplectic_frame(&lagrangian_extension(v)?);
    let fw = symplectic_frame(&lagrangian_extension(w)?);
    let phi = fw * fv.transpose();
    let m = 2 * v.n;
    let mut rows = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            rows.push(phi[(i, j)]);
        }
    }
    Ok(HIsometry { n: v.n, phi: rows })
}

/// A random isotropic subspace of dimension `j`: `j` random combinations of
/// a basis of the Lagrangian completion of a random line.
pub fn random_isotropic<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Subspace {
    assert!(j <= n);
    if j == 0 {
        return Subspace::zero(n);
    }
    let seed: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let line = Subspace::span(n, &[seed]).expect("valid vector");
    let lag = lagrangian_extension(&line).expect("lines are isotropic");
    let combos: Vec<Vec<f64>> = (0..j)
        .map(|_| {
            let mut acc = vec![0.0; 2 * n];
            for b in lag.basis() {
                let c: f64 = rng.random_range(-1.0..1.0);
                acc.iter_mut().zip(b).for_each(|(a, x)| *a += c * x);
            }
            acc
        })
        .collect();
    let sub = Subspace::span(n, &combos).expect("valid vectors");
    if sub.dim() == j {
        sub
    } else {
        random_isotropic(n, j, rng)
    }
}
