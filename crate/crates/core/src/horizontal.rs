//! Horizontal curves in Hⁿ built from planar polylines.
//!
//! Along a straight planar segment `a → b` the horizontal part of the contact
//! form integrates in closed form, `∫ Σ (xⱼ dyⱼ − yⱼ dxⱼ) = ω(a, b)`, so the
//! lift of a polyline is exact: `t_{i+1} = t_i − 2 ω(zᵢ, z_{i+1})`. Lifted
//! segments are straight lines of ℝ²ⁿ⁺¹, which makes linear interpolation on a
//! [`HorizontalPolyline`] horizontal as well.
//!
//! Geodesics come from the lifted-circular-arc family: after left-translating
//! the start point to the origin, the projection of a minimizer from `0` to
//! `(z, t)` is a circular arc in the complex line spanned by `z` and `𝒥z`
//! whose region cut off by the chord has area `|t| / 4`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::heisenberg::{group_inv, group_mul, koranyi_dist_raw, omega, HPoint};

/// Closure tolerance (Korányi distance) for a lift to count as a closed curve.
pub const CLOSURE_TOL: f64 = 1e-9;

/// An ordered list of points of ℝ²ⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPolyline {
    samples: Vec<Vec<f64>>,
    closed: bool,
}

impl PlanarPolyline {
    pub fn new(samples: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        let m = samples[0].len();
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidCurve(format!(
                "sample length must be even and positive, got {m}"
            )));
        }
        for s in &samples {
            if s.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m / 2,
                    found: s.len() / 2,
                });
            }
            if s.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidCurve("non-finite sample".into()));
            }
        }
        Ok(PlanarPolyline { samples, closed })
    }

    pub fn n(&self) -> usize {
        self.samples[0].len() / 2
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Samples with the first one appended when the curve is closed and its
    /// last sample differs from the first.
    pub fn traversal(&self) -> Vec<&[f64]> {
        let mut v: Vec<&[f64]> = self.samples.iter().map(Vec::as_slice).collect();
        if self.closed && self.samples.first() != self.samples.last() {
            v.push(&self.samples[0]);
        }
        v
    }

    /// Euclidean length of the traversal.
    pub fn length(&self) -> f64 {
        self.traversal()
            .windows(2)
            .map(|w| euclid(w[0], w[1]))
            .sum()
    }

    /// Reverses the traversal direction.
    pub fn reversed(&self) -> Self {
        let mut s = self.samples.clone();
        s.reverse();
        PlanarPolyline {
            samples: s,
            closed: self.closed,
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A polyline in Hⁿ whose `t`-component follows the exact segment lift of
/// its projection (up to endpoint snapping, see [`geodesic`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizontalPolyline {
    samples: Vec<HPoint>,
    closed: bool,
}

impl HorizontalPolyline {
    /// Validates dimensions and horizontality: every segment's `t`-increment
    /// must match the exact lift within `1e-9 · (1 + |Δz|²)`.
    pub fn new(samples: Vec<HPoint>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        let n = samples[0].n();
        if let Some(bad) = samples.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        let h = HorizontalPolyline { samples, closed };
        let r = h.max_segment_residual();
        if r > 1e-9 {
            return Err(Error::InvalidCurve(format!(
                "segment contact residual {r:e} exceeds 1e-9"
            )));
        }
        if closed && h.closure_gap() > CLOSURE_TOL {
            return Err(Error::InvalidCurve(format!(
                "closed curve has closure gap {:e}",
                h.closure_gap()
            )));
        }
        Ok(h)
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<HPoint>, closed: bool) -> Self {
        HorizontalPolyline { samples, closed }
    }

    pub fn n(&self) -> usize {
        self.samples[0].n()
    }

    pub fn samples(&self) -> &[HPoint] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<HPoint> {
        self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> &HPoint {
        &self.samples[0]
    }

    pub fn end(&self) -> &HPoint {
        self.samples.last().expect("at least two samples")
    }

    /// Korányi distance between the last and first samples.
    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (self.start(), self.end());
        koranyi_dist_raw(b.z(), b.t(), a.z(), a.t())
    }

    pub fn projection(&self) -> PlanarPolyline {
        PlanarPolyline {
            samples: self.samples.iter().map(|p| p.z().to_vec()).collect(),
            closed: self.closed,
        }
    }

    /// Largest `|Δt + 2ω(zᵢ, zᵢ₊₁)| / (1 + |Δz|²)` over segments.
    pub fn max_segment_residual(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let dz2: f64 = w[0]
                    .z()
                    .iter()
                    .zip(w[1].z())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                ((w[1].t() - w[0].t()) + 2.0 * omega(w[0].z(), w[1].z())).abs() / (1.0 + dz2)
            })
            .fold(0.0, f64::max)
    }

    /// Cumulative projected length at each sample.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.samples.len());
        out.push(0.0);
        for w in self.samples.windows(2) {
            acc += euclid(w[0].z(), w[1].z());
            out.push(acc);
        }
        out
    }

    /// Point at projected arc length `s` (clamped), by linear interpolation
    /// on the containing segment. `cumulative` must come from
    /// [`Self::cumulative_lengths`].
    pub fn point_at_length(&self, cumulative: &[f64], s: f64) -> HPoint {
        let total = *cumulative.last().expect("non-empty");
        if s <= 0.0 || total == 0.0 {
            return self.samples[0].clone();
        }
        if s >= total {
            return self.end().clone();
        }
        let i = cumulative.partition_point(|c| *c <= s).saturating_sub(1);
        let i = i.min(self.samples.len() - 2);
        let seg = cumulative[i + 1] - cumulative[i];
        let lam = if seg > 0.0 { (s - cumulative[i]) / seg } else { 0.0 };
        lerp(&self.samples[i], &self.samples[i + 1], lam)
    }
}

/// Linear interpolation in ℝ²ⁿ⁺¹; horizontal when `a → b` is a lifted segment.
pub fn lerp(a: &HPoint, b: &HPoint, lam: f64) -> HPoint {
    let z = a
        .z()
        .iter()
        .zip(b.z())
        .map(|(x, y)| x + lam * (y - x))
        .collect();
    HPoint::new(z, a.t() + lam * (b.t() - a.t())).expect("finite interpolation")
}

/// Exact horizontal lift of `c` starting at height `t0`. For a closed input
/// the closing segment is included; the output is flagged closed only if the
/// lift returns to its start, i.e. its `t`-gap is at most
/// `1e-12 · perimeter²`. That gap is rounding and is then snapped to zero,
/// since the Korányi closure gap would otherwise be its square root.
pub fn horizontal_lift(c: &PlanarPolyline, t0: f64) -> HorizontalPolyline {
    let pts = c.traversal();
    let mut samples = Vec::with_capacity(pts.len());
    let mut t = t0;
    samples.push(HPoint::new(pts[0].to_vec(), t).expect("validated polyline"));
    for w in pts.windows(2) {
        t -= 2.0 * omega(w[0], w[1]);
        samples.push(HPoint::new(w[1].to_vec(), t).expect("validated polyline"));
    }
    let mut closed = false;
    if c.is_closed() {
        let per = c.length();
        let last = samples.len() - 1;
        if (samples[last].t() - t0).abs() <= 1e-12 * per * per {
            samples[last] = samples[0].clone();
            closed = true;
        }
    }
    HorizontalPolyline { samples, closed }
}

/// Carnot–Carathéodory length: the Euclidean length of the projection.
pub fn cc_length(h: &HorizontalPolyline) -> f64 {
    h.samples
        .windows(2)
        .map(|w| euclid(w[0].z(), w[1].z()))
        .sum()
}

/// Signed areas enclosed by the projections onto the `xⱼyⱼ` planes, and their
/// sum.
pub fn projected_signed_areas(c: &PlanarPolyline) -> Result<(Vec<f64>, f64)> {
    if !c.is_closed() {
        return Err(Error::OpenCurve);
    }
    let n = c.n();
    let mut areas = vec![0.0; n];
    for w in c.traversal().windows(2) {
        for (j, a) in areas.iter_mut().enumerate() {
            *a += w[0][2 * j] * w[1][2 * j + 1] - w[0][2 * j + 1] * w[1][2 * j];
        }
    }
    areas.iter_mut().for_each(|a| *a *= 0.5);
    let total = areas.iter().sum();
    Ok((areas, total))
}

/// Solver settings for [`geodesic_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicOptions {
    /// Relative length tolerance and endpoint tolerance.
    pub tol: f64,
    /// Minimum number of segments for a full turn.
    pub samples_per_turn: usize,
    /// Iteration cap for the angle solver.
    pub max_iter: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            tol: 1e-8,
            samples_per_turn: 256,
            max_iter: 200,
        }
    }
}

/// Below this normalized area the vertical offset is treated as zero.
const KAPPA_FLOOR: f64 = 1e-50;

/// `θ − sin θ` and `N sin(θ/N) − sin θ` without cancellation for small `θ`:
/// below `θ = 1` both are summed from their alternating Taylor series
/// `Σₖ (−1)ᵏ⁺¹ θ²ᵏ⁺¹ (1 − N⁻²ᵏ) / (2k+1)!`, whose leading term dominates.
fn arc_excess(theta: f64, sides: Option<usize>) -> f64 {
    if theta < 1.0 {
        let r2 = sides.map_or(0.0, |n| 1.0 / (n as f64 * n as f64));
        let t2 = theta * theta;
        let (mut term, mut rk, mut sum) = (theta, 1.0, 0.0);
        for k in 1..=12 {
            term *= -t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            rk *= r2;
            sum -= term * (1.0 - rk);
        }
        return sum;
    }
    match sides {
        None => theta - theta.sin(),
        Some(n) => n as f64 * (theta / n as f64).sin() - theta.sin(),
    }
}

/// Area cut off by the arc (or inscribed polygon) over chord², as a function
/// of the central angle. The branch variable is `θ` on `(0, π]` and
/// `v = 2π − θ` on `(0, π)`, so that both ends keep full relative precision.
#[derive(Clone, Copy)]
enum Branch {
    Low,
    High,
}

fn angles(branch: Branch, x: f64) -> (f64, f64, f64) {
    // (θ, sin(θ/2), sin θ)
    match branch {
        Branch::Low => (x, (x / 2.0).sin(), x.sin()),
        Branch::High => (TAU - x, (x / 2.0).sin(), -x.sin()),
    }
}

fn normalized_area(branch: Branch, x: f64, sides: Option<usize>) -> f64 {
    let (theta, s_half, s_full) = angles(branch, x);
    let excess = match (branch, sides) {
        (Branch::Low, _) => arc_excess(theta, sides),
        (Branch::High, None) => theta - s_full,
        (Branch::High, Some(n)) => n as f64 * (theta / n as f64).sin() - s_full,
    };
    excess / (8.0 * s_half * s_half)
}

/// Derivative of [`normalized_area`] with respect to the branch variable.
fn normalized_area_slope(branch: Branch, x: f64, sides: Option<usize>) -> f64 {
    let (theta, s_half, s_full) = angles(branch, x);
    let c_half = (theta / 2.0).cos();
    let excess = match (branch, sides) {
        (Branch::Low, _) => arc_excess(theta, sides),
        (Branch::High, None) => theta - s_full,
        (Branch::High, Some(n)) => n as f64 * (theta / n as f64).sin() - s_full,
    };
    // d(excess)/dθ as a product of sines, free of cancellation.
    let d_excess = match sides {
        None => 2.0 * s_half * s_half,
        Some(n) => {
            let r = 1.0 / n as f64;
            2.0 * (theta * (1.0 + r) / 2.0).sin() * (theta * (1.0 - r) / 2.0).sin()
        }
    };
    let d = d_excess / (8.0 * s_half * s_half) - c_half * excess / (8.0 * s_half.powi(3));
    match branch {
        Branch::Low => d,
        Branch::High => -d,
    }
}

/// Solves `normalized_area = kappa` for the arc parameter: Newton steps
/// kept inside a bisection bracket on `(0, π)`, bisecting whenever a step
/// would leave it.
fn solve_angle(kappa: f64, sides: Option<usize>, max_iter: usize) -> Result<(Branch, f64)> {
    let branch = if kappa <= normalized_area(Branch::Low, PI, sides) {
        Branch::Low
    } else {
        Branch::High
    };
    // Low branch: area increases with θ, about θ/12 near 0. High branch:
    // area decreases with v, about π/v² near 0.
    let increasing = matches!(branch, Branch::Low);
    let (mut lo, mut hi) = (0.0f64, PI);
    let guess = match branch {
        Branch::Low => 12.0 * kappa,
        Branch::High => (PI / kappa).sqrt(),
    };
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * PI };
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let f = normalized_area(branch, x, sides) - kappa;
        if f.abs() <= f64::EPSILON * kappa {
            break;
        }
        if (f < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / normalized_area_slope(branch, x, sides);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || next <= lo || next >= hi {
            break;
        }
        x = next;
    }
    let residual = (normalized_area(branch, x, sides) - kappa).abs() / kappa;
    if !(residual <= 1e-10) {
        return Err(Error::NonConvergence {
            iterations,
            residual,
            width: hi - lo,
        });
    }
    Ok((branch, x))
}

/// Length of the optimal lifted arc from the origin to `(z, t)` with
/// `|z| = chord`.
fn arc_family_length(chord: f64, t: f64, max_iter: usize) -> Result<f64> {
    let at = t.abs();
    if chord == 0.0 {
        return Ok((PI * at).sqrt());
    }
    let kappa = at / (4.0 * chord * chord);
    if kappa < KAPPA_FLOOR {
        return Ok(chord);
    }
    let (branch, x) = solve_angle(kappa, None, max_iter)?;
    let (theta, s_half, _) = angles(branch, x);
    Ok(chord * theta / (2.0 * s_half))
}

/// Carnot–Carathéodory distance, evaluated in closed form over the
/// lifted-arc family (the same family [`geodesic`] discretizes). The
/// returned value is the infimum over the family; `cc_length(geodesic(..))`
/// exceeds it by at most a factor `1 + tol`.
pub fn cc_distance(p: &HPoint, q: &HPoint, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let w = group_mul(&group_inv(p), q)?;
    let chord = w.z().iter().map(|c| c * c).sum::<f64>().sqrt();
    arc_family_length(chord, w.t(), GeodesicOptions::default().max_iter)
}

/// Raw-coordinate variant of [`cc_distance`] for hot loops.
pub fn cc_distance_coords(p: &[f64], q: &[f64]) -> Result<f64> {
    let m = p.len() - 1;
    let mut chord2 = 0.0;
    let mut w = 0.0;
    for (a, b) in p[..m].chunks_exact(2).zip(q[..m].chunks_exact(2)) {
        let (ax, ay) = (-a[0], -a[1]);
        let dx = ax + b[0];
        let dy = ay + b[1];
        chord2 += dx * dx;
        chord2 += dy * dy;
        w += ax * b[1] - ay * b[0];
    }
    let t = (-p[m] + q[m]) - 2.0 * w;
    arc_family_length(chord2.sqrt(), t, GeodesicOptions::default().max_iter)
}

/// A geodesic from `p` to `q` with default discretization settings.
pub fn geodesic(p: &HPoint, q: &HPoint, tol: f64) -> Result<HorizontalPolyline> {
    geodesic_with(
        p,
        q,
        &GeodesicOptions {
            tol,
            ..GeodesicOptions::default()
        },
    )
}

/// Discretized geodesic from `p` to `q`. The projection is a polygon
/// inscribed in the optimal arc whose lift lands exactly on `q` (the polygon
/// angle is solved for directly), refined until its length is within
/// `1 + tol` of the arc-family infimum. The final sample is set to `q`.
pub fn geodesic_with(p: &HPoint, q: &HPoint, opts: &GeodesicOptions) -> Result<HorizontalPolyline> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let w = group_mul(&group_inv(p), q)?;
    let n = p.n();
    let m = 2 * n;
    let chord = w.z().iter().map(|c| c * c).sum::<f64>().sqrt();
    let at = w.t().abs();

    if chord == 0.0 && at == 0.0 {
        return Ok(HorizontalPolyline::from_parts_unchecked(
            vec![p.clone(), q.clone()],
            false,
        ));
    }

    // Orthonormal pair (u, 𝒥u) of the complex line carrying the arc.
    let u: Vec<f64> = if chord > 0.0 {
        w.z().iter().map(|c| c / chord).collect()
    } else {
        let mut e = vec![0.0; m];
        e[0] = 1.0;
        e
    };
    let ju: Vec<f64> = u.chunks_exact(2).flat_map(|c| [-c[1], c[0]]).collect();
    // Positive polygon area gives Δt < 0; mirror the arc for t > 0.
    let flip = if w.t() > 0.0 { -1.0 } else { 1.0 };

    let kappa = if chord > 0.0 {
        at / (4.0 * chord * chord)
    } else {
        f64::INFINITY
    };
    let planar: Vec<(f64, f64)> = if chord > 0.0 && kappa < KAPPA_FLOOR {
        vec![(0.0, 0.0), (chord, 0.0)]
    } else {
        let optimum = arc_family_length(chord, w.t(), opts.max_iter)?;
        let full_theta = if chord > 0.0 {
            let (b, x) = solve_angle(kappa, None, opts.max_iter)?;
            angles(b, x).0
        } else {
            TAU
        };
        let mut sides = ((opts.samples_per_turn as f64 * full_theta / TAU).ceil() as usize)
            .max(if chord > 0.0 { 2 } else { 3 });
        loop {
            let (pts, len) = inscribed_polygon(chord, at, sides, opts.max_iter)?;
            if len <= optimum * (1.0 + opts.tol) {
                break pts;
            }
            if sides > 1 << 24 {
                return Err(Error::NonConvergence {
                    iterations: sides,
                    residual: len / optimum - 1.0,
                    width: 0.0,
                });
            }
            sides *= 2;
        }
    };

    let samples: Vec<Vec<f64>> = planar
        .iter()
        .map(|(a, b)| {
            (0..m)
                .map(|i| p.z()[i] + (a * u[i] + flip * b * ju[i]))
                .collect()
        })
        .collect();
    let lifted = horizontal_lift(
        &PlanarPolyline {
            samples,
            closed: false,
        },
        p.t(),
    );
    let mut samples = lifted.into_samples();
    let end = samples.last().expect("non-empty");
    let scale = 1.0 + q.z().iter().map(|c| c.abs()).sum::<f64>() + q.t().abs() + at;
    let drift = end.euclidean_dist(q);
    if drift > 1e-9 * scale {
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual: drift,
            width: 0.0,
        });
    }
    *samples.last_mut().expect("non-empty") = q.clone();
    Ok(HorizontalPolyline::from_parts_unchecked(samples, false))
}

/// Polygon with `sides` equal chords inscribed in a circular arc from
/// `(0, 0)` to `(chord, 0)`, below the chord, enclosing area `|t| / 4`
/// together with the chord. Returns the vertices and the perimeter.
fn inscribed_polygon(
    chord: f64,
    at: f64,
    sides: usize,
    max_iter: usize,
) -> Result<(Vec<(f64, f64)>, f64)> {
    let area = at / 4.0;
    let nf = sides as f64;
    let (radius, theta, center_b, start) = if chord == 0.0 {
        let r = (2.0 * area / (nf * (TAU / nf).sin())).sqrt();
        (r, TAU, -r, -1.5 * PI)
    } else {
        let kappa = area / (chord * chord);
        let (branch, x) = solve_angle(kappa, Some(sides), max_iter)?;
        let (theta, s_half, _) = angles(branch, x);
        let r = chord / (2.0 * s_half);
        let cos_half = match branch {
            Branch::Low => (theta / 2.0).cos(),
            Branch::High => -(x / 2.0).cos(),
        };
        (r, theta, r * cos_half, -0.5 * PI - 0.5 * theta)
    };
    let center_a = chord / 2.0;
    let mut pts = Vec::with_capacity(sides + 1);
    pts.push((0.0, 0.0));
    for k in 1..sides {
        let phi = start + theta * k as f64 / nf;
        pts.push((center_a + radius * phi.cos(), center_b + radius * phi.sin()));
    }
    pts.push((chord, 0.0));
    let perimeter = nf * 2.0 * radius * (theta / (2.0 * nf)).sin();
    Ok((pts, perimeter))
}
