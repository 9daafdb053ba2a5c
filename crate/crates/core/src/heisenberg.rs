//! Group law and gauge geometry of the Heisenberg group Hⁿ = ℝ²ⁿ × ℝ.
//!
//! Points are stored with interleaved horizontal coordinates
//! `(x₁, y₁, …, xₙ, yₙ)` followed by the vertical coordinate `t`, so the
//! symplectic pairing of slot `2j` with slot `2j + 1` is local in memory.
//!
//! Everything here is a direct formula evaluation in `f64`; tolerances belong
//! to the analysis layers built on top.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard symplectic form on interleaved slices:
/// `ω(v, w) = Σ (v^{xᵢ} w^{yᵢ} − v^{yᵢ} w^{xᵢ})`.
#[inline]
pub fn omega(v: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(v.len(), w.len());
    let mut acc = 0.0;
    for (a, b) in v.chunks_exact(2).zip(w.chunks_exact(2)) {
        acc += a[0] * b[1] - a[1] * b[0];
    }
    acc
}

/// `(|z|⁴ + t²)^{1/4}` on raw coordinates.
#[inline]
pub fn koranyi_norm_raw(z: &[f64], t: f64) -> f64 {
    let s: f64 = z.iter().map(|c| c * c).sum();
    (s * s + t * t).sqrt().sqrt()
}

/// Korányi distance on raw coordinates, evaluated as `‖q⁻¹ * p‖_K` with the
/// same operation order as [`group_mul`] applied to `(group_inv(q), p)`.
#[inline]
pub fn koranyi_dist_raw(pz: &[f64], pt: f64, qz: &[f64], qt: f64) -> f64 {
    debug_assert_eq!(pz.len(), qz.len());
    let mut s = 0.0;
    let mut w = 0.0;
    for (a, b) in qz.chunks_exact(2).zip(pz.chunks_exact(2)) {
        let (ax, ay) = (-a[0], -a[1]);
        let dx = ax + b[0];
        let dy = ay + b[1];
        s += dx * dx;
        s += dy * dy;
        w += ax * b[1] - ay * b[0];
    }
    let t = (-qt + pt) - 2.0 * w;
    (s * s + t * t).sqrt().sqrt()
}

/// Korányi distance between two points stored as `[z…, t]` slices.
#[inline]
pub fn koranyi_dist_coords(p: &[f64], q: &[f64]) -> f64 {
    let m = p.len() - 1;
    koranyi_dist_raw(&p[..m], p[m], &q[..m], q[m])
}

/// `α(v)` at horizontal position `z`: `v_t + 2 Σ (xⱼ v^{yⱼ} − yⱼ v^{xⱼ})`.
/// `v` has length `2n + 1` with the vertical component last.
#[inline]
pub fn contact_form_raw(z: &[f64], v: &[f64]) -> f64 {
    let m = z.len();
    v[m] + 2.0 * omega(z, &v[..m])
}

/// A point `(z, t)` of Hⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HPointRepr", into = "HPointRepr")]
pub struct HPoint {
    z: Vec<f64>,
    t: f64,
}

#[derive(Serialize, Deserialize)]
struct HPointRepr {
    n: usize,
    z: Vec<f64>,
    t: f64,
}

impl TryFrom<HPointRepr> for HPoint {
    type Error = Error;

    fn try_from(r: HPointRepr) -> Result<Self> {
        let p = HPoint::new(r.z, r.t)?;
        if p.n() != r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n,
                found: p.n(),
            });
        }
        Ok(p)
    }
}

impl From<HPoint> for HPointRepr {
    fn from(p: HPoint) -> Self {
        HPointRepr {
            n: p.n(),
            z: p.z,
            t: p.t,
        }
    }
}

impl HPoint {
    pub fn new(z: Vec<f64>, t: f64) -> Result<Self> {
        if z.is_empty() || !z.len().is_multiple_of(2) {
            return Err(Error::InvalidPoint(format!(
                "horizontal part must have even positive length, got {}",
                z.len()
            )));
        }
        if !t.is_finite() || z.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(HPoint { z, t })
    }

    /// The identity element of Hⁿ.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "Hⁿ needs n >= 1");
        HPoint {
            z: vec![0.0; 2 * n],
            t: 0.0,
        }
    }

    /// Builds a point from `[x₁, y₁, …, xₙ, yₙ, t]`.
    pub fn from_coords(c: &[f64]) -> Result<Self> {
        if c.len() < 3 {
            return Err(Error::InvalidPoint(format!(
                "need at least 3 coordinates, got {}",
                c.len()
            )));
        }
        let m = c.len() - 1;
        HPoint::new(c[..m].to_vec(), c[m])
    }

    /// Builds a point from separate x- and y-blocks.
    pub fn from_blocks(x: &[f64], y: &[f64], t: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidPoint(format!(
                "x-block has {} entries, y-block has {}",
                x.len(),
                y.len()
            )));
        }
        let z = x.iter().zip(y).flat_map(|(a, b)| [*a, *b]).collect();
        HPoint::new(z, t)
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `xⱼ`, zero-based.
    pub fn x(&self, j: usize) -> f64 {
        self.z[2 * j]
    }

    /// `yⱼ`, zero-based.
    pub fn y(&self, j: usize) -> f64 {
        self.z[2 * j + 1]
    }

    /// `(x-block, y-block, t)`.
    pub fn to_blocks(&self) -> (Vec<f64>, Vec<f64>, f64) {
        let x = self.z.iter().step_by(2).copied().collect();
        let y = self.z.iter().skip(1).step_by(2).copied().collect();
        (x, y, self.t)
    }

    /// `[z…, t]`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.z.clone();
        c.push(self.t);
        c
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0.0 && self.z.iter().all(|c| *c == 0.0)
    }

    fn check_same_n(&self, other: &HPoint) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }

    /// Anisotropic dilation `δ_r(z, t) = (r z, r² t)`.
    pub fn dilate(&self, r: f64) -> HPoint {
        HPoint {
            z: self.z.iter().map(|c| r * c).collect(),
            t: r * r * self.t,
        }
    }

    /// Euclidean distance in ℝ²ⁿ⁺¹.
    pub fn euclidean_dist(&self, other: &HPoint) -> f64 {
        let s: f64 = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (s + (self.t - other.t).powi(2)).sqrt()
    }
}

/// `(z, t) * (z′, t′) = (z + z′, t + t′ − 2ω(z, z′))`.
pub fn group_mul(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    p.check_same_n(q)?;
    let z = p.z.iter().zip(&q.z).map(|(a, b)| a + b).collect();
    let t = (p.t + q.t) - 2.0 * omega(&p.z, &q.z);
    Ok(HPoint { z, t })
}

/// `(z, t)⁻¹ = (−z, −t)`.
pub fn group_inv(p: &HPoint) -> HPoint {
    HPoint {
        z: p.z.iter().map(|c| -c).collect(),
        t: -p.t,
    }
}

pub fn koranyi_norm(p: &HPoint) -> f64 {
    koranyi_norm_raw(&p.z, p.t)
}

/// `d_K(p, q) = ‖q⁻¹ * p‖_K`.
pub fn koranyi_dist(p: &HPoint, q: &HPoint) -> Result<f64> {
    p.check_same_n(q)?;
    Ok(koranyi_dist_raw(&p.z, p.t, &q.z, q.t))
}

/// A Euclidean tangent vector of ℝ²ⁿ⁺¹ attached to a point of Hⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct ETangent {
    base: HPoint,
    v: Vec<f64>,
}

impl ETangent {
    pub fn new(base: HPoint, v: Vec<f64>) -> Result<Self> {
        if v.len() != 2 * base.n() + 1 {
            return Err(Error::DimensionMismatch {
                expected: base.n(),
                found: v.len().saturating_sub(1) / 2,
            });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite tangent component".into()));
        }
        Ok(ETangent { base, v })
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }
}

/// Contact form `α = dt + 2 Σ (xⱼ dyⱼ − yⱼ dxⱼ)` at `p` applied to `v`.
pub fn contact_form(p: &HPoint, v: &ETangent) -> Result<f64> {
    if v.base != *p {
        return Err(Error::BaseMismatch);
    }
    Ok(contact_form_raw(&p.z, &v.v))
}

/// The left-invariant frame `Xⱼ = ∂ₓⱼ + 2yⱼ ∂ₜ`, `Yⱼ = ∂ᵧⱼ − 2xⱼ ∂ₜ`, `T = ∂ₜ`
/// evaluated at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct HFrame {
    pub base: HPoint,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub t: Vec<f64>,
}

impl HFrame {
    pub fn x_tangent(&self, j: usize) -> ETangent {
        ETangent {
            base: self.base.clone(),
            v: self.x[j].clone(),
        }
    }

    pub fn y_tangent(&self, j: usize) -> ETangent {
        ETangent {
            base: self.base.clone(),
            v: self.y[j].clone(),
        }
    }

    pub fn t_tangent(&self) -> ETangent {
        ETangent {
            base: self.base.clone(),
            v: self.t.clone(),
        }
    }
}

pub fn horizontal_frame(p: &HPoint) -> HFrame {
    let n = p.n();
    let dim = 2 * n + 1;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for j in 0..n {
        let mut x = vec![0.0; dim];
        x[2 * j] = 1.0;
        x[2 * n] = 2.0 * p.y(j);
        xs.push(x);
        let mut y = vec![0.0; dim];
        y[2 * j + 1] = 1.0;
        y[2 * n] = -2.0 * p.x(j);
        ys.push(y);
    }
    let mut t = vec![0.0; dim];
    t[2 * n] = 1.0;
    HFrame {
        base: p.clone(),
        x: xs,
        y: ys,
        t,
    }
}
