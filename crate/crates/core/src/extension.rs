//! Lipschitz extension of partially defined curves into (Hⁿ, d_cc).
//!
//! On an interval, gaps between consecutive knots are bridged by geodesics
//! run at constant speed `d_cc(f(aᵢ), f(bᵢ)) / |aᵢ − bᵢ|`; the curve is
//! constant before the first and after the last knot. On a circle, each arc
//! gap is first flattened onto its chord by the 1-Lipschitz projection
//! `h(θ) = clamp(⟨P(θ) − A, û⟩, 0, |B − A|)` and then sent along the bridge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::heisenberg::{koranyi_dist_raw, HPoint};
use crate::horizontal::{
    cc_distance_coords, cc_length, geodesic_with, lerp, GeodesicOptions, HorizontalPolyline,
};

/// Domain of a partial curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    /// Knot parameters are angles in `[0, 2π)`; distances are chordal.
    Circle { center: [f64; 2], radius: f64 },
}

impl Domain {
    fn validate(&self) -> Result<()> {
        match *self {
            Domain::Interval { a, b } if a.is_finite() && b.is_finite() && a < b => Ok(()),
            Domain::Circle { center, radius }
                if center.iter().all(|c| c.is_finite()) && radius.is_finite() && radius > 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidKnots(format!("invalid domain {self:?}"))),
        }
    }

    /// Distance between two parameters in the domain's Euclidean metric.
    pub fn dist(&self, s: f64, u: f64) -> f64 {
        match *self {
            Domain::Interval { .. } => (s - u).abs(),
            Domain::Circle { radius, .. } => 2.0 * radius * ((s - u) / 2.0).sin().abs(),
        }
    }

    /// The parameter as a point of ℝ (interval) or ℝ² (circle).
    pub fn embed(&self, s: f64) -> Vec<f64> {
        match *self {
            Domain::Interval { .. } => vec![s],
            Domain::Circle { center, radius } => {
                vec![center[0] + radius * s.cos(), center[1] + radius * s.sin()]
            }
        }
    }

    /// Total size used for output sampling density.
    fn size(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Circle { .. } => TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub param: f64,
    pub value: HPoint,
}

/// Knot data with a declared Lipschitz constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialCurveData {
    pub domain: Domain,
    pub knots: Vec<Knot>,
    pub lipschitz: f64,
}

impl PartialCurveData {
    /// Checks ordering, ranges and dimensions. The Lipschitz condition is
    /// checked separately by [`Self::check_lipschitz`].
    pub fn new(domain: Domain, knots: Vec<Knot>, lipschitz: f64) -> Result<Self> {
        domain.validate()?;
        if knots.is_empty() {
            return Err(Error::InvalidKnots("no knots".into()));
        }
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::InvalidKnots(format!("invalid Lipschitz constant {lipschitz}")));
        }
        let n = knots[0].value.n();
        for (i, k) in knots.iter().enumerate() {
            if k.value.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: k.value.n(),
                });
            }
            let in_range = match domain {
                Domain::Interval { a, b } => (a..=b).contains(&k.param),
                Domain::Circle { .. } => (0.0..TAU).contains(&k.param),
            };
            if !in_range {
                return Err(Error::InvalidKnots(format!(
                    "knot {i} parameter {} outside the domain",
                    k.param
                )));
            }
            if i > 0 && !(knots[i - 1].param < k.param) {
                return Err(Error::InvalidKnots(format!(
                    "knot parameters not strictly increasing at {i}"
                )));
            }
        }
        Ok(PartialCurveData {
            domain,
            knots,
            lipschitz,
        })
    }

    pub fn n(&self) -> usize {
        self.knots[0].value.n()
    }

    /// Largest pairwise `d_cc / dist` ratio and the pair attaining it.
    pub fn knot_lipschitz(&self) -> Result<(f64, usize, usize)> {
        let coords: Vec<Vec<f64>> = self.knots.iter().map(|k| k.value.coords()).collect();
        let mut best = (0.0, 0, 0);
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let d = cc_distance_coords(&coords[i], &coords[j])?;
                let r = d / self.domain.dist(self.knots[i].param, self.knots[j].param);
                if r > best.0 {
                    best = (r, i, j);
                }
            }
        }
        Ok(best)
    }

    /// Fails with the worst offending pair when the data is not
    /// `L`-Lipschitz within `1e-9`.
    pub fn check_lipschitz(&self) -> Result<()> {
        let (ratio, i, j) = self.knot_lipschitz()?;
        let bound = self.lipschitz;
        if ratio > bound * (1.0 + 1e-9) + 1e-9 {
            return Err(Error::LipschitzViolation { i, j, ratio, bound });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionOptions {
    pub geodesic: GeodesicOptions,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            geodesic: GeodesicOptions {
                tol: 1e-7,
                ..GeodesicOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
struct Bridge {
    /// Start and end parameter of the gap.
    s0: f64,
    s1: f64,
    path: HorizontalPolyline,
    cumulative: Vec<f64>,
    /// Chord data for circle gaps: start point, unit direction, chord length.
    chord: Option<([f64; 2], [f64; 2], f64)>,
}

impl Bridge {
    fn length(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    /// Fraction of the bridge covered at parameter `s` (in `[s0, s1]`).
    fn fraction(&self, domain: &Domain, s: f64) -> f64 {
        match self.chord {
            None => ((s - self.s0) / (self.s1 - self.s0)).clamp(0.0, 1.0),
            Some((a, u, c)) => {
                let p = domain.embed(s);
                (((p[0] - a[0]) * u[0] + (p[1] - a[1]) * u[1]) / c).clamp(0.0, 1.0)
            }
        }
    }

    fn eval(&self, domain: &Domain, s: f64) -> HPoint {
        let len = self.length();
        self.path
            .point_at_length(&self.cumulative, len * self.fraction(domain, s))
    }

    /// Parameter at which the bridge has covered fraction `f`.
    fn param_at_fraction(&self, f: f64) -> f64 {
        match self.chord {
            None => self.s0 + f * (self.s1 - self.s0),
            Some(_) => {
                // On the circle the chord projection is
                // (sin(s − m) + sin g) / (2 sin g), with m the midpoint and g
                // the half-width of the gap.
                let m = 0.5 * (self.s0 + self.s1);
                let g = 0.5 * (self.s1 - self.s0);
                let x = ((2.0 * f - 1.0) * g.sin()).clamp(-1.0, 1.0).asin();
                (m + x).clamp(self.s0, self.s1)
            }
        }
    }
}

/// An extended curve: a horizontal polyline with a domain parameter per
/// vertex, plus exact evaluation at any parameter.
#[derive(Debug, Clone)]
pub struct Extension {
    domain: Domain,
    params: Vec<f64>,
    curve: HorizontalPolyline,
    knots: Vec<Knot>,
    bridges: Vec<Bridge>,
}

impl Extension {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn curve(&self) -> &HorizontalPolyline {
        &self.curve
    }

    pub fn into_curve(self) -> HorizontalPolyline {
        self.curve
    }

    /// Value of the extension at parameter `s` (angles are taken mod 2π).
    pub fn eval(&self, s: f64) -> HPoint {
        let first = &self.knots[0];
        if self.bridges.is_empty() {
            return first.value.clone();
        }
        let s = match self.domain {
            Domain::Interval { .. } => {
                if s <= first.param {
                    return first.value.clone();
                }
                let last = self.knots.last().expect("non-empty");
                if s >= last.param {
                    return last.value.clone();
                }
                s
            }
            Domain::Circle { .. } => first.param + (s - first.param).rem_euclid(TAU),
        };
        let i = self
            .bridges
            .partition_point(|b| b.s1 <= s)
            .min(self.bridges.len() - 1);
        self.bridges[i].eval(&self.domain, s)
    }

    /// Largest distance from a knot value to the extension at its parameter.
    pub fn knot_agreement(&self) -> f64 {
        self.knots
            .iter()
            .map(|k| {
                let v = self.eval(k.param);
                koranyi_dist_raw(v.z(), v.t(), k.value.z(), k.value.t())
            })
            .fold(0.0, f64::max)
    }

    /// Sampled Lipschitz constant of the output with respect to d_cc:
    /// all adjacent vertex pairs plus `pairs` random vertex pairs.
    pub fn measured_lipschitz(&self, pairs: usize, seed: u64, exec: Exec) -> Result<f64> {
        let coords: Vec<Vec<f64>> = self.curve.samples().iter().map(HPoint::coords).collect();
        let m = coords.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<(usize, usize)> = (1..m).map(|i| (i - 1, i)).collect();
        for _ in 0..pairs {
            idx.push((rng.random_range(0..m), rng.random_range(0..m)));
        }
        let ratios = exec.map(idx.len(), |k| {
            let (i, j) = idx[k];
            let dp = self.domain.dist(self.params[i], self.params[j]);
            if dp == 0.0 {
                return Ok(0.0);
            }
            Ok(cc_distance_coords(&coords[i], &coords[j])? / dp)
        });
        ratios
            .into_iter()
            .try_fold(0.0, |acc, r: Result<f64>| Ok(f64::max(acc, r?)))
    }
}

fn bridge(p: &HPoint, q: &HPoint, s0: f64, s1: f64, opts: &ExtensionOptions) -> Result<Bridge> {
    let path = geodesic_with(p, q, &opts.geodesic)?;
    let cumulative = path.cumulative_lengths();
    Ok(Bridge {
        s0,
        s1,
        path,
        cumulative,
        chord: None,
    })
}

/// Assembles output vertices for one bridge: every bridge vertex plus a
/// uniform parameter grid, merged in parameter order. Vertices of the bridge
/// are copied exactly so consecutive output samples stay on one lifted
/// segment.
fn emit_bridge(
    b: &Bridge,
    domain: &Domain,
    params: &mut Vec<f64>,
    points: &mut Vec<HPoint>,
) {
    let gap = b.s1 - b.s0;
    let spacing = domain.size() / 256.0;
    let uniform = ((gap / spacing).ceil() as usize).max(64);
    let len = b.length();
    let verts = b.path.samples();

    let mut events: Vec<(f64, Option<usize>)> = Vec::with_capacity(verts.len() + uniform);
    if len > 0.0 {
        for (k, c) in b.cumulative.iter().enumerate().take(verts.len() - 1).skip(1) {
            events.push((b.param_at_fraction(c / len), Some(k)));
        }
    }
    for k in 1..uniform {
        events.push((b.s0 + gap * k as f64 / uniform as f64, None));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    // Grid samples crowding a vertex only add rounding noise in t.
    let min_sep = 1e-6 * spacing;
    let mut kept: Vec<(f64, Option<usize>)> = Vec::with_capacity(events.len());
    for (i, &(s, vertex)) in events.iter().enumerate() {
        if vertex.is_none() {
            let prev = kept.last().map_or(b.s0, |e| e.0);
            let next = events[i + 1..]
                .iter()
                .find(|e| e.1.is_some())
                .map_or(b.s1, |e| e.0);
            if s - prev < min_sep || next - s < min_sep {
                continue;
            }
        }
        kept.push((s, vertex));
    }
    for (s, vertex) in kept {
        params.push(s);
        points.push(match vertex {
            Some(k) => verts[k].clone(),
            None => b.eval(domain, s),
        });
    }
    params.push(b.s1);
    points.push(b.path.end().clone());
}

/// Lipschitz extension on an interval. Fails with the offending knot pair
/// if the data is not `L`-Lipschitz.
pub fn extend_interval(data: &PartialCurveData, opts: &ExtensionOptions) -> Result<Extension> {
    extend_interval_with(data, opts, Exec::default())
}

pub fn extend_interval_with(
    data: &PartialCurveData,
    opts: &ExtensionOptions,
    exec: Exec,
) -> Result<Extension> {
    let (a, b) = match data.domain {
        Domain::Interval { a, b } => (a, b),
        Domain::Circle { .. } => {
            return Err(Error::InvalidKnots("extend_interval needs an interval domain".into()))
        }
    };
    data.check_lipschitz()?;
    let knots = &data.knots;
    let bridges: Vec<Bridge> = exec
        .map(knots.len() - 1, |i| {
            bridge(
                &knots[i].value,
                &knots[i + 1].value,
                knots[i].param,
                knots[i + 1].param,
                opts,
            )
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut params = Vec::new();
    let mut points = Vec::new();
    if a < knots[0].param {
        params.push(a);
        points.push(knots[0].value.clone());
    }
    params.push(knots[0].param);
    points.push(knots[0].value.clone());
    for br in &bridges {
        emit_bridge(br, &data.domain, &mut params, &mut points);
    }
    let last = knots.last().expect("non-empty");
    if last.param < b {
        params.push(b);
        points.push(last.value.clone());
    }
    if points.len() == 1 {
        params.push(knots[0].param);
        points.push(knots[0].value.clone());
    }
    Ok(Extension {
        domain: data.domain,
        params,
        curve: HorizontalPolyline::from_parts_unchecked(points, false),
        knots: knots.clone(),
        bridges,
    })
}

/// Lipschitz extension on a circle; the output is a closed curve whose
/// chordal Lipschitz constant is at most `Lπ/2` up to the geodesic
/// tolerance.
pub fn extend_circle(data: &PartialCurveData, opts: &ExtensionOptions) -> Result<Extension> {
    extend_circle_with(data, opts, Exec::default())
}

pub fn extend_circle_with(
    data: &PartialCurveData,
    opts: &ExtensionOptions,
    exec: Exec,
) -> Result<Extension> {
    if !matches!(data.domain, Domain::Circle { .. }) {
        return Err(Error::InvalidKnots("extend_circle needs a circle domain".into()));
    }
    data.check_lipschitz()?;
    let knots = &data.knots;
    let k = knots.len();
    if k == 1 {
        let p = knots[0].value.clone();
        let s = knots[0].param;
        return Ok(Extension {
            domain: data.domain,
            params: vec![s, s + TAU],
            curve: HorizontalPolyline::from_parts_unchecked(vec![p.clone(), p], true),
            knots: knots.clone(),
            bridges: Vec::new(),
        });
    }
    let bridges: Vec<Bridge> = exec
        .map(k, |i| {
            let j = (i + 1) % k;
            let s0 = knots[i].param;
            let s1 = if j == 0 { knots[0].param + TAU } else { knots[j].param };
            let mut br = bridge(&knots[i].value, &knots[j].value, s0, s1, opts)?;
            let pa = data.domain.embed(s0);
            let pb = data.domain.embed(s1);
            let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
            let c = dx.hypot(dy);
            br.chord = Some(([pa[0], pa[1]], [dx / c, dy / c], c));
            Ok(br)
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut params = vec![knots[0].param];
    let mut points = vec![knots[0].value.clone()];
    for br in &bridges {
        emit_bridge(br, &data.domain, &mut params, &mut points);
    }
    Ok(Extension {
        domain: data.domain,
        params,
        curve: HorizontalPolyline::from_parts_unchecked(points, true),
        knots: knots.clone(),
        bridges,
    })
}

/// Metric on the target for [`lipschitz_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Koranyi,
    Cc,
}

/// Largest `d(f(s), f(s′)) / |s − s′|` over all sample pairs, with domain
/// points in ℝᵏ under the Euclidean metric.
pub fn lipschitz_constant(samples: &[(Vec<f64>, HPoint)], metric: Metric) -> Result<f64> {
    lipschitz_constant_with(samples, metric, Exec::default())
}

pub fn lipschitz_constant_with(
    samples: &[(Vec<f64>, HPoint)],
    metric: Metric,
    exec: Exec,
) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let coords: Vec<Vec<f64>> = samples.iter().map(|(_, p)| p.coords()).collect();
    let n = samples[0].1.n();
    if let Some((_, p)) = samples.iter().find(|(_, p)| p.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.n(),
        });
    }
    let rows = exec.map(samples.len(), |i| -> Result<f64> {
        let mut best = 0.0f64;
        for j in i + 1..samples.len() {
            let ds = samples[i]
                .0
                .iter()
                .zip(&samples[j].0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if ds == 0.0 {
                return Err(Error::DuplicateDomainPoint(i, j));
            }
            let d = match metric {
                Metric::Koranyi => {
                    let (p, q) = (&samples[i].1, &samples[j].1);
                    koranyi_dist_raw(p.z(), p.t(), q.z(), q.t())
                }
                Metric::Cc => cc_distance_coords(&coords[i], &coords[j])?,
            };
            best = best.max(d / ds);
        }
        Ok(best)
    });
    rows.into_iter()
        .try_fold(0.0, |acc, r| Ok(f64::max(acc, r?)))
}

/// The Lipschitz bound of the circle construction, `Lπ/2`.
pub fn circle_bound(lipschitz: f64) -> f64 {
    lipschitz * PI / 2.0
}

/// Total Carnot–Carathéodory length of the output curve.
pub fn extension_length(e: &Extension) -> f64 {
    cc_length(e.curve())
}

/// Linear interpolation between two output samples, for tests of
/// horizontality between vertices.
pub fn midpoint(e: &Extension, i: usize) -> HPoint {
    let s = e.curve().samples();
    lerp(&s[i], &s[i + 1], 0.5)
}
