//! Finite-difference analysis of maps `ℝᵏ → Hⁿ` sampled on uniform grids.
//!
//! Derivatives are central differences at interior grid points only. From
//! them come the contact residual `maxᵢ |α(Dᵢ)| / (1 + |Dᵢ|)`, the numeric
//! rank of `D`, and the pullback `Mᵢⱼ = ω(πDᵢ, πDⱼ)` whose vanishing means
//! the horizontal image is isotropic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::heisenberg::{contact_form_raw, koranyi_dist_coords, omega};
use crate::spatial::KoranyiHash;

/// Default numeric rank threshold relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-8;
/// Pullback magnitude above which a contact point counts as non-isotropic.
pub const ISOTROPY_FLAG_TOL: f64 = 1e-6;
/// Angular samples on loop-integral circles.
pub const LOOP_SAMPLES: usize = 512;
/// Smallest grid size per axis.
pub const MIN_GRID: usize = 5;

/// A map from a uniform grid on a box in ℝᵏ into ℝ²ⁿ⁺¹, values stored
/// row-major (last axis fastest), `2n + 1` coordinates per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledMapRepr", into = "SampledMapRepr")]
pub struct SampledMap {
    n: usize,
    bounds: Vec<[f64; 2]>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SampledMapRepr {
    k: usize,
    n: usize,
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    shape: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<SampledMapRepr> for SampledMap {
    type Error = Error;

    fn try_from(r: SampledMapRepr) -> Result<Self> {
        if r.bounds.len() != r.k {
            return Err(Error::InvalidMap(format!(
                "box has {} intervals but k = {}",
                r.bounds.len(),
                r.k
            )));
        }
        let stride = 2 * r.n + 1;
        if let Some(v) = r.values.iter().find(|v| v.len() != stride) {
            return Err(Error::InvalidMap(format!(
                "value of length {} where 2n + 1 = {stride}",
                v.len()
            )));
        }
        SampledMap::new(r.n, r.bounds, r.shape, r.values.concat())
    }
}

impl From<SampledMap> for SampledMapRepr {
    fn from(m: SampledMap) -> Self {
        let stride = m.stride();
        SampledMapRepr {
            k: m.k(),
            n: m.n,
            values: m.values.chunks(stride).map(<[f64]>::to_vec).collect(),
            bounds: m.bounds,
            shape: m.shape,
        }
    }
}

impl SampledMap {
    pub fn new(n: usize, bounds: Vec<[f64; 2]>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMap("n must be positive".into()));
        }
        if shape.is_empty() || shape.len() != bounds.len() {
            return Err(Error::InvalidMap(format!(
                "shape {shape:?} does not match {} box intervals",
                bounds.len()
            )));
        }
        if let Some(s) = shape.iter().find(|s| **s < MIN_GRID) {
            return Err(Error::InvalidMap(format!("grid size {s} < {MIN_GRID}")));
        }
        if bounds
            .iter()
            .any(|[a, b]| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(Error::InvalidMap(format!("invalid box {bounds:?}")));
        }
        let points: usize = shape.iter().product();
        if values.len() != points * (2 * n + 1) {
            return Err(Error::InvalidMap(format!(
                "expected {} values, got {}",
                points * (2 * n + 1),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("non-finite value".into()));
        }
        let mut strides = vec![1; shape.len()];
        for a in (0..shape.len() - 1).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        Ok(SampledMap {
            n,
            bounds,
            shape,
            strides,
            values,
        })
    }

    /// Samples `f` (returning `2n + 1` coordinates) at every grid point.
    pub fn from_fn<F>(n: usize, bounds: Vec<[f64; 2]>, shape: Vec<usize>, exec: Exec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
    {
        let points: usize = shape.iter().product();
        let stride = 2 * n + 1;
        let mut values = vec![0.0; points * stride];
        let mut probe = SampledMap::new(n, bounds, shape, vec![0.0; points * stride])?;
        exec.for_each_chunk(&mut values, stride, |i, out| {
            let v = f(&probe.point(i));
            assert_eq!(v.len(), stride, "map returned {} coordinates", v.len());
            out.copy_from_slice(&v);
        });
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("non-finite value".into()));
        }
        probe.values = values;
        Ok(probe)
    }

    pub fn k(&self) -> usize {
        self.shape.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stride(&self) -> usize {
        2 * self.n + 1
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let [a, b] = self.bounds[axis];
        (b - a) / (self.shape[axis] - 1) as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.k()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.shape)
            .map(|(s, n)| (flat / s) % n)
            .collect()
    }

    /// Domain coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.bounds[a][0] + i as f64 * self.spacing(a))
            .collect()
    }

    pub fn value(&self, flat: usize) -> &[f64] {
        let s = self.stride();
        &self.values[flat * s..(flat + 1) * s]
    }

    pub fn is_interior(&self, idx: &[usize]) -> bool {
        idx.len() == self.k() && idx.iter().zip(&self.shape).all(|(&i, &n)| i >= 1 && i + 1 < n)
    }

    fn is_interior_flat(&self, flat: usize) -> bool {
        self.strides
            .iter()
            .zip(&self.shape)
            .all(|(s, n)| {
                let i = (flat / s) % n;
                i >= 1 && i + 1 < *n
            })
    }

    /// Flat indices of all interior grid points, ascending.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&f| self.is_interior_flat(f)).collect()
    }

    /// Euclidean distance between two grid points in the domain.
    pub fn domain_dist(&self, a: usize, b: usize) -> f64 {
        let (ia, ib) = (self.multi_index(a), self.multi_index(b));
        ia.iter()
            .zip(&ib)
            .enumerate()
            .map(|(ax, (x, y))| {
                let d = (*x as f64 - *y as f64) * self.spacing(ax);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Central differences at an interior point, column `a` at
    /// `out[a·(2n+1) ..]`.
    fn jacobian_into(&self, flat: usize, out: &mut [f64]) {
        let s = self.stride();
        for a in 0..self.k() {
            let inv = 1.0 / (2.0 * self.spacing(a));
            let plus = self.value(flat + self.strides[a]);
            let minus = self.value(flat - self.strides[a]);
            for r in 0..s {
                out[a * s + r] = (plus[r] - minus[r]) * inv;
            }
        }
    }

    /// Interpolated value at domain point `x`, bilinear in axes `(i, j)`
    /// with the remaining coordinates taken at grid index `base`.
    fn bilinear(&self, base: &[usize], axes: (usize, usize), x: (f64, f64), out: &mut [f64]) {
        let s = self.stride();
        let mut cell = base.to_vec();
        let mut w = [0.0; 2];
        for (slot, (axis, xv)) in [(axes.0, x.0), (axes.1, x.1)].into_iter().enumerate() {
            let u = (xv - self.bounds[axis][0]) / self.spacing(axis);
            let c = (u.floor().max(0.0) as usize).min(self.shape[axis] - 2);
            cell[axis] = c;
            w[slot] = u - c as f64;
        }
        let f00 = self.flat_index(&cell);
        let f10 = f00 + self.strides[axes.0];
        let f01 = f00 + self.strides[axes.1];
        let f11 = f10 + self.strides[axes.1];
        let (a, b) = (w[0], w[1]);
        for r in 0..s {
            out[r] = (1.0 - a) * (1.0 - b) * self.values[f00 * s + r]
                + a * (1.0 - b) * self.values[f10 * s + r]
                + (1.0 - a) * b * self.values[f01 * s + r]
                + a * b * self.values[f11 * s + r];
        }
    }
}

/// Central-difference Jacobian at an interior grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianSample {
    pub at: Vec<usize>,
    /// `(2n + 1) × k`.
    pub d: DMatrix<f64>,
}

pub fn finite_diff_jacobian(m: &SampledMap, idx: &[usize]) -> Result<JacobianSample> {
    if !m.is_interior(idx) {
        return Err(Error::BoundaryIndex(idx.to_vec()));
    }
    let s = m.stride();
    let mut buf = vec![0.0; s * m.k()];
    m.jacobian_into(m.flat_index(idx), &mut buf);
    Ok(JacobianSample {
        at: idx.to_vec(),
        d: DMatrix::from_column_slice(s, m.k(), &buf),
    })
}

fn residual_of(z: &[f64], d: &[f64], s: usize) -> f64 {
    d.chunks_exact(s)
        .map(|col| {
            let norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            contact_form_raw(z, col).abs() / (1.0 + norm)
        })
        .fold(0.0, f64::max)
}

fn pullback_of(d: &[f64], s: usize, k: usize) -> DMatrix<f64> {
    let mut mat = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let w = omega(&d[i * s..i * s + s - 1], &d[j * s..j * s + s - 1]);
            mat[(i, j)] = w;
            mat[(j, i)] = -w;
        }
    }
    mat
}

/// `Mᵢⱼ = ω(πDᵢ, πDⱼ)`; antisymmetric by construction.
pub fn pullback_symplectic(m: &SampledMap, idx: &[usize]) -> Result<DMatrix<f64>> {
    let jac = finite_diff_jacobian(m, idx)?;
    Ok(pullback_of(jac.d.as_slice(), m.stride(), m.k()))
}

fn numeric_rank(d: &[f64], s: usize, k: usize, rank_tol: f64) -> usize {
    let sv = DMatrix::from_column_slice(s, k, d).singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|v| **v > rank_tol * top).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    /// Flat grid index; see [`SampledMap::multi_index`].
    pub index: usize,
    pub residual: f64,
    pub rank: Option<usize>,
    pub isotropy_defect: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub min: f64,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

/// Nearest-rank quantile of an unsorted slice, `q ∈ [0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

impl ResidualSummary {
    fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        ResidualSummary {
            min: quantile_sorted(&v, 0.0),
            median: quantile_sorted(&v, 0.5),
            p90: quantile_sorted(&v, 0.9),
            p99: quantile_sorted(&v, 0.99),
            max: quantile_sorted(&v, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactReport {
    pub k: usize,
    pub n: usize,
    pub contact_tol: Option<f64>,
    pub rank_tol: Option<f64>,
    pub points: Vec<PointReport>,
    pub summary: ResidualSummary,
    /// Number of points with residual ≤ `contact_tol`.
    pub contact_points: usize,
    /// Positions in `points` of contact points with rank > n or isotropy
    /// defect above the threshold.
    pub flagged: Vec<usize>,
}

impl ContactReport {
    pub fn max_residual(&self) -> f64 {
        self.summary.max
    }

    pub fn max_contact_rank(&self) -> usize {
        self.points.iter().filter_map(|p| p.rank).max().unwrap_or(0)
    }
}

/// Contact residual at every interior point.
pub fn contact_residual(m: &SampledMap) -> ContactReport {
    contact_residual_with(m, Exec::default())
}

pub fn contact_residual_with(m: &SampledMap, exec: Exec) -> ContactReport {
    let s = m.stride();
    let interior = m.interior();
    let points = exec.map(interior.len(), |i| {
        let flat = interior[i];
        let mut d = vec![0.0; s * m.k()];
        m.jacobian_into(flat, &mut d);
        PointReport {
            index: flat,
            residual: residual_of(&m.value(flat)[..s - 1], &d, s),
            rank: None,
            isotropy_defect: None,
        }
    });
    let res: Vec<f64> = points.iter().map(|p| p.residual).collect();
    ContactReport {
        k: m.k(),
        n: m.n(),
        contact_tol: None,
        rank_tol: None,
        summary: ResidualSummary::of(&res),
        contact_points: 0,
        flagged: Vec::new(),
        points,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    pub contact_tol: f64,
    pub rank_tol: f64,
    pub isotropy_tol: f64,
}

impl RankOptions {
    /// `contact_tol = 10h` with `h` the largest grid spacing.
    pub fn for_map(m: &SampledMap) -> Self {
        RankOptions {
            contact_tol: 10.0 * m.max_spacing(),
            rank_tol: RANK_TOL,
            isotropy_tol: ISOTROPY_FLAG_TOL,
        }
    }
}

/// Residual at every interior point, and numeric rank plus isotropy defect
/// at points whose residual is at most `contact_tol`.
pub fn rank_report(m: &SampledMap, contact_tol: f64, rank_tol: f64) -> ContactReport {
    rank_report_with(
        m,
        &RankOptions {
            contact_tol,
            rank_tol,
            isotropy_tol: ISOTROPY_FLAG_TOL,
        },
        Exec::default(),
    )
}

pub fn rank_report_with(m: &SampledMap, opts: &RankOptions, exec: Exec) -> ContactReport {
    let s = m.stride();
    let k = m.k();
    let interior = m.interior();
    let points = exec.map(interior.len(), |i| {
        let flat = interior[i];
        let mut d = vec![0.0; s * k];
        m.jacobian_into(flat, &mut d);
        let residual = residual_of(&m.value(flat)[..s - 1], &d, s);
        let (rank, defect) = if residual <= opts.contact_tol {
            let pb = pullback_of(&d, s, k);
            (
                Some(numeric_rank(&d, s, k, opts.rank_tol)),
                Some(pb.amax()),
            )
        } else {
            (None, None)
        };
        PointReport {
            index: flat,
            residual,
            rank,
            isotropy_defect: defect,
        }
    });
    let res: Vec<f64> = points.iter().map(|p| p.residual).collect();
    let contact_points = points.iter().filter(|p| p.rank.is_some()).count();
    let flagged = points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            p.rank.is_some_and(|r| r > m.n())
                || p.isotropy_defect.is_some_and(|d| d > opts.isotropy_tol)
        })
        .map(|(i, _)| i)
        .collect();
    ContactReport {
        k,
        n: m.n(),
        contact_tol: Some(opts.contact_tol),
        rank_tol: Some(opts.rank_tol),
        summary: ResidualSummary::of(&res),
        contact_points,
        flagged,
        points,
    }
}

/// `½ Σⱼ ∮ (gˣʲ − gˣʲ(x₀)) dgʸʲ − (gʸʲ − gʸʲ(x₀)) dgˣʲ` over a circle of
/// radius `r` about grid point `idx` in the coordinate plane `axes`, with
/// the map interpolated bilinearly. For a C¹ map this is about
/// `Mᵢⱼ(x₀)·πr²`.
pub fn loop_integral_residual(
    m: &SampledMap,
    idx: &[usize],
    r: f64,
    axes: (usize, usize),
) -> Result<f64> {
    let k = m.k();
    if idx.len() != k || idx.iter().zip(m.shape()).any(|(i, n)| i >= n) {
        return Err(Error::InvalidArgument(format!("grid index {idx:?} out of range")));
    }
    if axes.0 == axes.1 || axes.0 >= k || axes.1 >= k {
        return Err(Error::InvalidArgument(format!("invalid axes {axes:?}")));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let center = m.point(m.flat_index(idx));
    for a in [axes.0, axes.1] {
        let [lo, hi] = m.bounds()[a];
        if center[a] - r < lo || center[a] + r > hi {
            return Err(Error::CircleOutsideBox {
                index: idx.to_vec(),
                radius: r,
            });
        }
    }
    let s = m.stride();
    let base = m.value(m.flat_index(idx)).to_vec();
    let mut pts = vec![0.0; LOOP_SAMPLES * s];
    for (q, out) in pts.chunks_exact_mut(s).enumerate() {
        let phi = TAU * q as f64 / LOOP_SAMPLES as f64;
        let x = (center[axes.0] + r * phi.cos(), center[axes.1] + r * phi.sin());
        m.bilinear(idx, axes, x, out);
    }
    let mut total = 0.0;
    for q in 0..LOOP_SAMPLES {
        let a = &pts[q * s..q * s + s];
        let b = &pts[((q + 1) % LOOP_SAMPLES) * s..][..s];
        for j in 0..m.n() {
            let (x0, y0) = (base[2 * j], base[2 * j + 1]);
            total += (a[2 * j] - x0) * (b[2 * j + 1] - a[2 * j + 1])
                - (a[2 * j + 1] - y0) * (b[2 * j] - a[2 * j]);
        }
    }
    Ok(0.5 * total)
}

/// The value `Mᵢⱼ(x₀)·πr²` that [`loop_integral_residual`] approximates.
pub fn loop_integral_prediction(
    m: &SampledMap,
    idx: &[usize],
    r: f64,
    axes: (usize, usize),
) -> Result<f64> {
    Ok(pullback_symplectic(m, idx)?[(axes.0, axes.1)] * PI * r * r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderScale {
    pub axis: usize,
    pub step: usize,
    pub separation: f64,
    pub max_dist: f64,
    /// `max_dist / separation^alpha_hat`.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub alpha_hat: f64,
    pub profile: Vec<HolderScale>,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `log max d_K(f(x), f(x + s·hₐ·eₐ))` against `log(s·hₐ)` over
/// dyadic steps `s` and every axis `a` along which the map moves.
pub fn holder_exponent_estimate(m: &SampledMap) -> Result<HolderEstimate> {
    holder_exponent_estimate_with(m, Exec::default())
}

pub fn holder_exponent_estimate_with(m: &SampledMap, exec: Exec) -> Result<HolderEstimate> {
    let mut scales: Vec<(usize, usize)> = Vec::new();
    for a in 0..m.k() {
        let mut step = 1;
        while 2 * step < m.shape()[a] {
            scales.push((a, step));
            step *= 2;
        }
    }
    let maxima = exec.map(scales.len(), |q| {
        let (a, step) = scales[q];
        let shift = step * m.strides[a];
        (0..m.len())
            .filter(|&f| (f / m.strides[a]) % m.shape[a] + step < m.shape[a])
            .map(|f| koranyi_dist_coords(m.value(f), m.value(f + shift)))
            .fold(0.0, f64::max)
    });
    let mut profile: Vec<HolderScale> = scales
        .iter()
        .zip(&maxima)
        .filter(|(_, d)| **d > 0.0)
        .map(|(&(axis, step), &max_dist)| HolderScale {
            axis,
            step,
            separation: step as f64 * m.spacing(axis),
            max_dist,
            beta: 0.0,
        })
        .collect();
    let xs: Vec<f64> = profile.iter().map(|p| p.separation.ln()).collect();
    let ys: Vec<f64> = profile.iter().map(|p| p.max_dist.ln()).collect();
    let distinct = xs.iter().any(|x| (x - xs[0]).abs() > 1e-12);
    if profile.len() < 2 || !distinct {
        return Err(Error::DegenerateMap);
    }
    let alpha_hat = fit_slope(&xs, &ys);
    for p in &mut profile {
        p.beta = p.max_dist / p.separation.powf(alpha_hat);
    }
    Ok(HolderEstimate { alpha_hat, profile })
}

/// All grid pairs `(a, b)`, `a < b`, at domain distance at least `delta`
/// whose images are within Korányi distance `eps`, sorted.
pub fn injectivity_collision_search(m: &SampledMap, eps: f64, delta: f64) -> Vec<(usize, usize)> {
    injectivity_collision_search_with(m, eps, delta, Exec::default())
}

pub fn injectivity_collision_search_with(
    m: &SampledMap,
    eps: f64,
    delta: f64,
    exec: Exec,
) -> Vec<(usize, usize)> {
    injectivity_collision_search_limited(m, eps, delta, usize::MAX, exec)
}

/// The first `limit` pairs, in sorted order, of
/// [`injectivity_collision_search`]. Rank-deficient maps can collide on
/// most of the grid; the cap bounds memory.
pub fn injectivity_collision_search_limited(
    m: &SampledMap,
    eps: f64,
    delta: f64,
    limit: usize,
    exec: Exec,
) -> Vec<(usize, usize)> {
    const BLOCK: usize = 4096;
    let hash = KoranyiHash::new(m.values(), m.stride(), eps.max(0.0));
    let mut out = Vec::new();
    let mut start = 0;
    while start < m.len() && out.len() < limit {
        let end = (start + BLOCK).min(m.len());
        let block = exec.flat_map(end - start, |o| {
            let i = start + o;
            hash.candidates(i)
                .into_iter()
                .filter(|&j| {
                    j > i
                        && koranyi_dist_coords(m.value(i), m.value(j)) <= eps
                        && m.domain_dist(i, j) >= delta
                })
                .map(|j| (i, j))
                .take(limit)
                .collect()
        });
        out.extend(block.into_iter().take(limit - out.len()));
        start = end;
    }
    out
}

/// Nearest-rank `q`-quantile of image nearest-neighbour Korányi distances.
///
/// Grid neighbours give an upper bound `u(x)` on each point's NN distance;
/// the `q`-quantile of `u` caps the true quantile. Exact searches run at
/// radii growing from zero up to that cap, stopping once enough points have
/// a neighbour inside the radius.
pub fn nn_distance_percentile(m: &SampledMap, q: f64) -> Result<f64> {
    nn_distance_percentile_with(m, q, Exec::default())
}

pub fn nn_distance_percentile_with(m: &SampledMap, q: f64, exec: Exec) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("quantile {q} outside [0, 1]")));
    }
    let upper = exec.map(m.len(), |f| {
        let mut best = f64::INFINITY;
        for a in 0..m.k() {
            let i = (f / m.strides[a]) % m.shape[a];
            if i + 1 < m.shape[a] {
                best = best.min(koranyi_dist_coords(m.value(f), m.value(f + m.strides[a])));
            }
            if i > 0 {
                best = best.min(koranyi_dist_coords(m.value(f), m.value(f - m.strides[a])));
            }
        }
        best
    });
    let cap = quantile(&upper, q);
    if cap == 0.0 {
        return Ok(0.0);
    }
    // Nearest-neighbour distances within radius r (infinite when none), for
    // growing r. The quantile is exact as soon as it is finite.
    let within = |r: f64| {
        let hash = KoranyiHash::new(m.values(), m.stride(), r);
        exec.map(m.len(), |i| {
            hash.candidates(i)
                .into_iter()
                .filter(|&j| j != i)
                .map(|j| koranyi_dist_coords(m.value(i), m.value(j)))
                .filter(|d| *d <= r)
                .fold(f64::INFINITY, f64::min)
        })
    };
    let mut r = 0.0;
    loop {
        let found = within(r);
        let v = quantile(&found, q);
        if v.is_finite() {
            return Ok(v);
        }
        if r >= cap {
            break;
        }
        r = if r == 0.0 { cap / 4096.0 } else { (r * 8.0).min(cap) };
    }
    Ok(cap)
}

/// Largest Korányi and Euclidean (ℝ²ⁿ⁺¹) difference quotients over pairs
/// of grid neighbours along each axis.
pub fn grid_lipschitz(m: &SampledMap) -> (f64, f64) {
    let mut kor = 0.0f64;
    let mut euc = 0.0f64;
    for a in 0..m.k() {
        let h = m.spacing(a);
        for f in 0..m.len() {
            if (f / m.strides[a]) % m.shape[a] + 1 < m.shape[a] {
                let (p, q) = (m.value(f), m.value(f + m.strides[a]));
                kor = kor.max(koranyi_dist_coords(p, q) / h);
                let e = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
                euc = euc.max(e.sqrt() / h);
            }
        }
    }
    (kor, euc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_box(k: usize) -> Vec<[f64; 2]> {
        vec![[-1.0, 1.0]; k]
    }

    fn map<F>(n: usize, k: usize, size: usize, f: F) -> SampledMap
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
    {
        SampledMap::from_fn(n, unit_box(k), vec![size; k], Exec::Sequential, f).unwrap()
    }

    #[test]
    fn affine_map_differentiates_exactly() {
        let m = map(1, 2, 9, |x| vec![2.0 * x[0] - x[1], 0.5 * x[1], 3.0 * x[0] + 0.25]);
        let j = finite_diff_jacobian(&m, &[3, 5]).unwrap();
        let expect = DMatrix::from_row_slice(3, 2, &[2.0, -1.0, 0.0, 0.5, 3.0, 0.0]);
        assert!((j.d - expect).amax() < 1e-12);
        assert!(matches!(
            finite_diff_jacobian(&m, &[0, 5]),
            Err(Error::BoundaryIndex(_))
        ));
    }

    #[test]
    fn axis_map_columns() {
        let m = map(1, 2, 9, |x| vec![x[0], 0.0, 0.0]);
        let j = finite_diff_jacobian(&m, &[4, 4]).unwrap();
        assert_eq!(j.d.column(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(j.d.column(1).as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn quadratic_derivative_within_taylor_bound() {
        // D of x² by central differences is exact; x³ errs by h².
        let m = map(1, 1, 33, |x| vec![x[0], x[0] * x[0], x[0].powi(3)]);
        let h = m.spacing(0);
        for i in 1..32 {
            let x = m.point(i)[0];
            let j = finite_diff_jacobian(&m, &[i]).unwrap();
            assert!((j.d[(1, 0)] - 2.0 * x).abs() < 1e-12);
            assert!((j.d[(2, 0)] - 3.0 * x * x).abs() <= h * h + 1e-12);
        }
    }

    #[test]
    fn plane_map_residual() {
        let m = map(1, 2, 17, |x| vec![x[0], x[1], 0.0]);
        let r = contact_residual(&m);
        for p in &r.points {
            let x = m.point(p.index);
            let want = (2.0 * x[1].abs()).max(2.0 * x[0].abs()) / 2.0;
            assert!((p.residual - want).abs() < 1e-12);
        }
        assert!(r.max_residual() > 0.5);
        let c = map(2, 3, 6, |_| vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(contact_residual(&c).max_residual(), 0.0);
    }

    #[test]
    fn pullback_examples() {
        let m = map(1, 2, 9, |x| vec![x[0], x[1], 0.0]);
        let p = pullback_symplectic(&m, &[4, 4]).unwrap();
        assert_relative_eq!(p[(0, 1)], 1.0, epsilon = 1e-12);
        assert_eq!(p[(1, 0)], -p[(0, 1)]);
        assert_eq!(p[(0, 0)], 0.0);
        let iso = map(2, 3, 7, |x| vec![x[0] + x[1], 0.0, x[2] * x[2], 0.0, 0.0]);
        assert_eq!(pullback_symplectic(&iso, &[2, 3, 4]).unwrap().amax(), 0.0);
    }

    #[test]
    fn rank_report_examples() {
        let m = map(2, 2, 17, |x| vec![x[0], 0.0, x[1], 0.0, 0.0]);
        let r = rank_report(&m, 10.0 * m.max_spacing(), RANK_TOL);
        assert_eq!(r.contact_points, r.points.len());
        assert!(r.points.iter().all(|p| p.rank == Some(2)));
        assert!(r.flagged.is_empty());

        let m = map(1, 2, 17, |x| vec![x[0], 0.0, 0.0]);
        let r = rank_report(&m, 10.0 * m.max_spacing(), RANK_TOL);
        assert!(r.points.iter().all(|p| p.rank == Some(1)));
        assert!(r.flagged.is_empty());

        let m = map(1, 2, 33, |x| vec![x[0], x[1], 0.0]);
        let tol = 10.0 * m.max_spacing();
        let r = rank_report(&m, tol, RANK_TOL);
        for p in &r.points {
            let x = m.point(p.index);
            if x[0].abs().max(x[1].abs()) > tol {
                assert_eq!(p.rank, None);
            } else {
                assert_eq!(p.rank, Some(2));
                assert!((p.isotropy_defect.unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(!r.flagged.is_empty());
    }

    #[test]
    fn loop_integral_of_identity_plane() {
        let m = map(1, 2, 65, |x| vec![x[0], x[1], 0.0]);
        let h = m.spacing(0);
        for idx in [[32, 32], [20, 40]] {
            let got = loop_integral_residual(&m, &idx, 8.0 * h, (0, 1)).unwrap();
            let want = loop_integral_prediction(&m, &idx, 8.0 * h, (0, 1)).unwrap();
            assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
        }
        let back = loop_integral_residual(&m, &[32, 32], 8.0 * h, (1, 0)).unwrap();
        assert!(back < 0.0);
        assert!(matches!(
            loop_integral_residual(&m, &[2, 32], 8.0 * h, (0, 1)),
            Err(Error::CircleOutsideBox { .. })
        ));
    }

    #[test]
    fn loop_integral_vanishes_for_isotropic_pullback() {
        let m = map(2, 2, 65, |x| {
            vec![x[0] + 0.3 * x[1] * x[1], 0.0, x[1].sin(), 0.0, 0.0]
        });
        let h = m.spacing(0);
        let r = loop_integral_residual(&m, &[32, 32], 8.0 * h, (0, 1)).unwrap();
        assert!(r.abs() < 1e-14);
    }

    #[test]
    fn holder_examples() {
        let t_map = map(1, 2, 65, |x| vec![0.0, 0.0, x[0]]);
        assert_relative_eq!(holder_exponent_estimate(&t_map).unwrap().alpha_hat, 0.5, epsilon = 1e-9);
        let axis = map(2, 2, 65, |x| vec![x[0], 0.0, 0.0, 0.0, 0.0]);
        let est = holder_exponent_estimate(&axis).unwrap();
        assert_relative_eq!(est.alpha_hat, 1.0, epsilon = 1e-9);
        assert!(est.profile.iter().all(|p| (p.beta - 1.0).abs() < 1e-9));
        let c = map(1, 2, 9, |_| vec![1.0, 1.0, 1.0]);
        assert!(matches!(holder_exponent_estimate(&c), Err(Error::DegenerateMap)));
    }

    #[test]
    fn collision_examples() {
        let m = map(1, 2, 9, |x| vec![x[0], 0.0, 0.0]);
        let pairs = injectivity_collision_search(&m, 0.0, 0.0);
        // Pairs differ only in the second grid index.
        assert_eq!(pairs.len(), 9 * (9 * 8 / 2));
        for &(a, b) in &pairs {
            assert_eq!(m.multi_index(a)[0], m.multi_index(b)[0]);
        }
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));

        let axis = map(2, 1, 101, |x| vec![x[0], 0.0, 0.0, 0.0, 0.0]);
        let delta = 0.2;
        assert!(injectivity_collision_search(&axis, 0.19, delta).is_empty());
    }

    #[test]
    fn nn_percentile_matches_brute_force() {
        let m = map(1, 2, 12, |x| {
            vec![(3.0 * x[0]).sin() * x[1], x[0] * x[0], x[1] + 0.3 * x[0]]
        });
        let mut nn = vec![f64::INFINITY; m.len()];
        for i in 0..m.len() {
            for j in 0..m.len() {
                if i != j {
                    nn[i] = nn[i].min(koranyi_dist_coords(m.value(i), m.value(j)));
                }
            }
        }
        for q in [0.01, 0.1, 0.5] {
            assert_eq!(nn_distance_percentile(&m, q).unwrap(), quantile(&nn, q));
        }
    }

    #[test]
    fn json_shape() {
        let m = map(1, 1, 5, |x| vec![x[0], 0.0, 1.0]);
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert_eq!(v["k"], 1);
        assert_eq!(v["box"][0][1], 1.0);
        assert_eq!(v["values"][4], serde_json::json!([1.0, 0.0, 1.0]));
        let back: SampledMap = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::json!({"k": 1, "n": 1, "box": [[0.0, 1.0]], "shape": [3], "values": []});
        assert!(serde_json::from_value::<SampledMap>(bad).is_err());
    }

    #[test]
    fn strategies_agree() {
        let m = map(1, 2, 33, |x| vec![x[0] * x[1], x[0].cos(), x[1].powi(3)]);
        let a = rank_report_with(&m, &RankOptions::for_map(&m), Exec::Sequential);
        let b = rank_report_with(&m, &RankOptions::for_map(&m), Exec::Parallel);
        assert_eq!(a, b);
        assert_eq!(
            injectivity_collision_search_with(&m, 0.05, 0.1, Exec::Sequential),
            injectivity_collision_search_with(&m, 0.05, 0.1, Exec::Parallel)
        );
    }
}
