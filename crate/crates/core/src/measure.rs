//! Ball coverings in the Korányi metric, Hausdorff content upper bounds and
//! the covering-decay experiment.
//!
//! A map of rank `j` whose image is normalized so that its first `j`
//! coordinates follow the first `j` domain coordinates is covered by
//! `mʲ` balls of radius `≲ L d / m`, one per slab of the domain. At
//! dimension `s = k` the content is then `≲ mʲ (L d / m)ᵏ`, which decays like
//! `m^{j − k}` when `k > j`.

use serde::{Deserialize, Serialize};

use crate::contact::{fit_slope, grid_lipschitz, rank_report_with, RankOptions, SampledMap};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generators::lagrangian_graph_map;
use crate::heisenberg::{koranyi_dist_coords, HPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudMetric {
    Koranyi,
    Euclidean,
}

/// A finite set of points of Hⁿ, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    data: Vec<f64>,
    metric: CloudMetric,
}

impl PointCloud {
    pub fn new(points: &[HPoint], metric: CloudMetric) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::DegenerateCloud("empty point cloud".into()))?;
        let n = first.n();
        let mut data = Vec::with_capacity(points.len() * (2 * n + 1));
        for p in points {
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            data.extend_from_slice(p.z());
            data.push(p.t());
        }
        Ok(PointCloud { n, data, metric })
    }

    /// The image of every grid point of `m`.
    pub fn from_map(m: &SampledMap, metric: CloudMetric) -> Self {
        PointCloud {
            n: m.n(),
            data: m.values().to_vec(),
            metric,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn metric(&self) -> CloudMetric {
        self.metric
    }

    fn stride(&self) -> usize {
        2 * self.n + 1
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        let s = self.stride();
        &self.data[i * s..(i + 1) * s]
    }

    pub fn point(&self, i: usize) -> HPoint {
        HPoint::from_coords(self.coords(i)).expect("validated cloud")
    }

    pub fn dist_to(&self, i: usize, c: &[f64]) -> f64 {
        metric_dist(self.metric, self.coords(i), c)
    }
}

fn metric_dist(metric: CloudMetric, p: &[f64], q: &[f64]) -> f64 {
    match metric {
        CloudMetric::Koranyi => koranyi_dist_coords(p, q),
        CloudMetric::Euclidean => p
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: HPoint,
    pub radius: f64,
}

/// Balls covering a point cloud. A ball of radius 0 covers a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallCovering {
    pub balls: Vec<Ball>,
    pub s: f64,
}

impl BallCovering {
    /// `Σ rᵢˢ`, summed in ball order.
    pub fn content_at(&self, s: f64) -> f64 {
        self.balls.iter().map(|b| b.radius.powf(s)).sum()
    }

    pub fn content(&self) -> f64 {
        self.content_at(self.s)
    }

    pub fn max_radius(&self) -> f64 {
        self.balls.iter().map(|b| b.radius).fold(0.0, f64::max)
    }

    /// True if every cloud point lies in some ball (distances as computed by
    /// the cloud's metric, no slack).
    pub fn covers(&self, cloud: &PointCloud) -> bool {
        let centers: Vec<Vec<f64>> = self.balls.iter().map(|b| b.center.coords()).collect();
        (0..cloud.len()).all(|i| {
            centers
                .iter()
                .zip(&self.balls)
                .any(|(c, b)| cloud.dist_to(i, c) <= b.radius)
        })
    }
}

/// Farthest-point ordering of a cloud.
struct Fps {
    /// Centers in insertion order (cloud indices).
    centers: Vec<usize>,
    /// Distance from each center to the earlier centers when it was chosen
    /// (`∞` for the seed); nonincreasing.
    insertion: Vec<f64>,
    /// Nearest chosen center (position in `centers`) for every point.
    nearest: Vec<usize>,
    dist: Vec<f64>,
}

/// Cloud indices in lexicographic coordinate order.
fn lexicographic_order(cloud: &PointCloud) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| {
        cloud
            .coords(a)
            .iter()
            .zip(cloud.coords(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Greedy farthest-point sampling seeded at the lexicographically smallest
/// point, stopping once every point is within `r_stop` of a center. Ties go
/// to the lexicographically smallest point.
fn farthest_point_sampling(cloud: &PointCloud, r_stop: f64, exec: Exec) -> Fps {
    let order = lexicographic_order(cloud);
    let coords: Vec<&[f64]> = order.iter().map(|&i| cloud.coords(i)).collect();
    let len = order.len();
    let mut dist = vec![f64::INFINITY; len];
    let mut nearest = vec![0usize; len];
    let mut centers = Vec::new();
    let mut insertion = Vec::new();
    let mut next = 0usize;
    let mut radius = f64::INFINITY;
    loop {
        let c = coords[next];
        let pos = centers.len();
        centers.push(next);
        insertion.push(radius);
        let fresh = exec.map(len, |i| metric_dist(cloud.metric, coords[i], c));
        for i in 0..len {
            if fresh[i] < dist[i] {
                dist[i] = fresh[i];
                nearest[i] = pos;
            }
        }
        match exec.argmax(len, |i| dist[i]) {
            Some((i, d)) if d > r_stop => {
                next = i;
                radius = d;
            }
            _ => break,
        }
    }
    // Back to cloud indices.
    let mut near_out = vec![0usize; len];
    let mut dist_out = vec![0.0; len];
    for (pos, &i) in order.iter().enumerate() {
        near_out[i] = nearest[pos];
        dist_out[i] = dist[pos];
    }
    Fps {
        centers: centers.into_iter().map(|p| order[p]).collect(),
        insertion,
        nearest: near_out,
        dist: dist_out,
    }
}

/// Axis-aligned bounding-box midpoint of the given cloud points.
fn bbox_midpoint(cloud: &PointCloud, members: &[usize]) -> Vec<f64> {
    let s = cloud.stride();
    let mut lo = vec![f64::INFINITY; s];
    let mut hi = vec![f64::NEG_INFINITY; s];
    for &i in members {
        for (d, c) in cloud.coords(i).iter().enumerate() {
            lo[d] = lo[d].min(*c);
            hi[d] = hi[d].max(*c);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// Greedy covering by balls of radius at most `r_max`: a farthest-point
/// net, nearest-center assignment, then each ball shrunk to fit its
/// cluster and moved to the cluster's bounding-box midpoint when that gives
/// a smaller radius.
pub fn greedy_covering(cloud: &PointCloud, s: f64, r_max: f64, exec: Exec) -> Result<BallCovering> {
    if !(s > 0.0) || !(r_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need s > 0 and r_max > 0 (got s = {s}, r_max = {r_max})"
        )));
    }
    let fps = farthest_point_sampling(cloud, r_max, exec);
    let mut clusters = vec![Vec::new(); fps.centers.len()];
    for i in 0..cloud.len() {
        clusters[fps.nearest[i]].push(i);
    }
    let balls = exec.map(clusters.len(), |c| {
        let members = &clusters[c];
        let own = cloud.coords(fps.centers[c]).to_vec();
        let own_r = members.iter().map(|&i| fps.dist[i]).fold(0.0, f64::max);
        let mid = bbox_midpoint(cloud, members);
        let mid_r = members
            .iter()
            .map(|&i| cloud.dist_to(i, &mid))
            .fold(0.0, f64::max);
        let (center, radius) = if mid_r < own_r { (mid, mid_r) } else { (own, own_r) };
        Ball {
            center: HPoint::from_coords(&center).expect("finite center"),
            radius,
        }
    });
    Ok(BallCovering { balls, s })
}

/// Upper bound on the `s`-dimensional Hausdorff content `H^s_∞` of the
/// cloud from a greedy covering with radii at most `r_max`.
pub fn hausdorff_content(cloud: &PointCloud, s: f64, r_max: f64) -> Result<f64> {
    Ok(greedy_covering(cloud, s, r_max, Exec::default())?.content())
}

/// Half the extent of the cloud's projection onto the horizontal unit
/// direction `u ∈ ℝ²ⁿ`. The projection is 1-Lipschitz for both metrics, so
/// for a cloud densely sampling a connected set this bounds its
/// 1-dimensional content from below.
pub fn projection_lower_bound(cloud: &PointCloud, u: &[f64]) -> Result<f64> {
    if u.len() != 2 * cloud.n() {
        return Err(Error::DimensionMismatch {
            expected: cloud.n(),
            found: u.len() / 2,
        });
    }
    let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("zero projection direction".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..cloud.len() {
        let p: f64 = cloud.coords(i).iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / norm;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    Ok(0.5 * (hi - lo))
}

/// Farthest-point net sizes at the given radii.
pub fn net_counts(cloud: &PointCloud, scales: &[f64], exec: Exec) -> Vec<usize> {
    let smallest = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let fps = farthest_point_sampling(cloud, smallest, exec);
    scales
        .iter()
        .map(|&r| fps.insertion.iter().filter(|&&rho| rho > r).count())
        .collect()
}

/// Slope of `log N(r)` against `log(1/r)`, `N(r)` the farthest-point net
/// size at radius `r`.
pub fn box_counting_dimension(cloud: &PointCloud, scales: &[f64]) -> Result<f64> {
    box_counting_dimension_with(cloud, scales, Exec::default())
}

pub fn box_counting_dimension_with(cloud: &PointCloud, scales: &[f64], exec: Exec) -> Result<f64> {
    if scales.len() < 3 {
        return Err(Error::DegenerateCloud(format!(
            "need at least 3 scales, got {}",
            scales.len()
        )));
    }
    if scales.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::DegenerateCloud("scales must be positive".into()));
    }
    let xs: Vec<f64> = scales.iter().map(|r| -r.ln()).collect();
    if xs.iter().all(|x| (x - xs[0]).abs() < 1e-12) {
        return Err(Error::DegenerateCloud("scales must not all coincide".into()));
    }
    let counts = net_counts(cloud, scales, exec);
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    Ok(fit_slope(&xs, &ys))
}

/// A covering of a sampled map's image with the constant it realizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SardCovering {
    pub covering: BallCovering,
    pub mdiv: usize,
    /// Observed `max radius · mdiv / (L d)`.
    pub c_observed: f64,
}

/// Fails with [`Error::RankStructure`] if some contact point of `m` has
/// numeric rank above `j`.
pub fn check_rank_structure(m: &SampledMap, j: usize, exec: Exec) -> Result<()> {
    let report = rank_report_with(m, &RankOptions::for_map(m), exec);
    let violations = report
        .points
        .iter()
        .filter(|p| p.rank.is_some_and(|r| r > j))
        .count();
    if violations > 0 {
        return Err(Error::RankStructure { j, violations });
    }
    Ok(())
}

/// Side length `d` of the smallest cube containing the sampling box.
pub fn domain_side(m: &SampledMap) -> f64 {
    m.bounds().iter().map(|[a, b]| b - a).fold(0.0, f64::max)
}

/// One ball per cell of the split of the first `j` domain axes into `mdiv`
/// equal intervals (all other axes whole). Each ball is centered at the
/// image of the grid point nearest the cell center, with radius the largest
/// Korányi distance to the images in the cell.
pub fn sard_covering(m: &SampledMap, j: usize, mdiv: usize, lipschitz: f64) -> Result<SardCovering> {
    if j > m.k() {
        return Err(Error::InvalidArgument(format!("j = {j} exceeds k = {}", m.k())));
    }
    check_rank_structure(m, j, Exec::default())?;
    sard_covering_unchecked(m, j, mdiv, lipschitz, m.k() as f64, Exec::default())
}

fn sard_covering_unchecked(
    m: &SampledMap,
    j: usize,
    mdiv: usize,
    lipschitz: f64,
    s: f64,
    exec: Exec,
) -> Result<SardCovering> {
    if mdiv == 0 {
        return Err(Error::InvalidArgument("mdiv must be at least 1".into()));
    }
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidArgument(format!("L must be positive, got {lipschitz}")));
    }
    let cells = mdiv.pow(j as u32);
    let cell_of = |flat: usize| -> usize {
        let idx = m.multi_index(flat);
        let mut c = 0;
        for a in 0..j {
            let frac = idx[a] as f64 / (m.shape()[a] - 1) as f64;
            let b = ((frac * mdiv as f64).floor() as usize).min(mdiv - 1);
            c = c * mdiv + b;
        }
        c
    };
    let mut members = vec![Vec::new(); cells];
    for f in 0..m.len() {
        members[cell_of(f)].push(f);
    }
    let balls: Vec<Option<Ball>> = exec.map(cells, |c| {
        let pts = &members[c];
        if pts.is_empty() {
            return None;
        }
        // Cell center in normalized coordinates along the split axes; the
        // remaining axes are centered in the box.
        let mut target = vec![0.5; m.k()];
        let mut rest = c;
        for a in (0..j).rev() {
            target[a] = ((rest % mdiv) as f64 + 0.5) / mdiv as f64;
            rest /= mdiv;
        }
        let closeness = |f: usize| -> f64 {
            m.multi_index(f)
                .iter()
                .enumerate()
                .map(|(a, &i)| {
                    let d = i as f64 / (m.shape()[a] - 1) as f64 - target[a];
                    d * d
                })
                .sum()
        };
        let center = *pts
            .iter()
            .min_by(|&&a, &&b| closeness(a).total_cmp(&closeness(b)).then(a.cmp(&b)))
            .expect("non-empty cell");
        let cv = m.value(center);
        let radius = pts
            .iter()
            .map(|&f| koranyi_dist_coords(m.value(f), cv))
            .fold(0.0, f64::max);
        Some(Ball {
            center: HPoint::from_coords(cv).expect("finite values"),
            radius,
        })
    });
    let covering = BallCovering {
        balls: balls.into_iter().flatten().collect(),
        s,
    };
    let c_observed = covering.max_radius() * mdiv as f64 / (lipschitz * domain_side(m));
    Ok(SardCovering {
        covering,
        mdiv,
        c_observed,
    })
}

/// Parameters of a covering-decay run on a normalized rank-`j` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub k: usize,
    pub n: usize,
    pub j: usize,
    /// Grid points per axis.
    pub size: usize,
    pub seed: u64,
    pub mdivs: Vec<usize>,
}

impl DecayConfig {
    /// Geometric ladder `2, 4, …, 32` on a 65-point grid.
    pub fn new(k: usize, n: usize, j: usize, seed: u64) -> Self {
        DecayConfig {
            k,
            n,
            j,
            size: 65,
            seed,
            mdivs: vec![2, 4, 8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub mdiv: usize,
    pub balls: usize,
    pub max_radius: f64,
    pub content: f64,
    pub c_observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTable {
    pub config: DecayConfig,
    pub lipschitz: f64,
    pub side: f64,
    pub rows: Vec<DecayRow>,
    /// Fitted slope of `log content` against `log mdiv`; expected `j − k`.
    pub slope: f64,
    /// Fit residuals in log space, one per row.
    pub residuals: Vec<f64>,
    /// Largest observed covering constant over the ladder.
    pub c_max: f64,
}

/// Covers the image of a normalized rank-`j` contact map (a Lagrangian
/// graph over the first `j` axes) at every `mdiv` of the ladder and fits
/// the decay of the `k`-dimensional content.
pub fn content_decay_experiment(config: &DecayConfig) -> Result<DecayTable> {
    content_decay_experiment_with(config, Exec::default())
}

pub fn content_decay_experiment_with(config: &DecayConfig, exec: Exec) -> Result<DecayTable> {
    let DecayConfig { k, n, j, .. } = *config;
    if k <= n {
        return Err(Error::HypothesisViolation { k, n });
    }
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ n, got j = {j}")));
    }
    if config.mdivs.len() < 2 || config.mdivs.contains(&0) {
        return Err(Error::InvalidArgument("need at least two positive mdiv values".into()));
    }
    let m = lagrangian_graph_map(k, n, j, config.size, config.seed)?;
    check_rank_structure(&m, j, exec)?;
    let (lipschitz, _) = grid_lipschitz(&m);
    let side = domain_side(&m);
    let mut rows = Vec::with_capacity(config.mdivs.len());
    for &mdiv in &config.mdivs {
        let sc = sard_covering_unchecked(&m, j, mdiv, lipschitz, k as f64, exec)?;
        rows.push(DecayRow {
            mdiv,
            balls: sc.covering.balls.len(),
            max_radius: sc.covering.max_radius(),
            content: sc.covering.content(),
            c_observed: sc.c_observed,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.mdiv as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.content.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (my + slope * (x - mx)))
        .collect();
    let c_max = rows.iter().map(|r| r.c_observed).fold(0.0, f64::max);
    Ok(DecayTable {
        config: config.clone(),
        lipschitz,
        side,
        rows,
        slope,
        residuals,
        c_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::isotropic_axis_map;
    use approx::assert_relative_eq;

    fn segment(m: usize, f: impl Fn(f64) -> HPoint) -> PointCloud {
        let pts: Vec<HPoint> = (0..=m).map(|i| f(i as f64 / m as f64)).collect();
        PointCloud::new(&pts, CloudMetric::Koranyi).unwrap()
    }

    fn x_axis(m: usize) -> PointCloud {
        segment(m, |s| HPoint::new(vec![s, 0.0], 0.0).unwrap())
    }

    fn t_axis(m: usize) -> PointCloud {
        segment(m, |s| HPoint::new(vec![0.0, 0.0], s).unwrap())
    }

    #[test]
    fn single_point_content_vanishes() {
        let c = PointCloud::new(&[HPoint::identity(1)], CloudMetric::Koranyi).unwrap();
        for r in [1.0, 0.1, 1e-3] {
            assert_eq!(hausdorff_content(&c, 1.0, r).unwrap(), 0.0);
        }
        assert!(PointCloud::new(&[], CloudMetric::Koranyi).is_err());
    }

    #[test]
    fn unit_segment_content() {
        let c = x_axis(1000);
        let v = hausdorff_content(&c, 1.0, 1.0).unwrap();
        let lb = projection_lower_bound(&c, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(lb, 0.5);
        assert!(v <= 0.5 * (1.0 + 1e-9) && v >= lb * (1.0 - 1e-9), "{v}");
        let mut prev = f64::INFINITY;
        for r in [0.1, 0.01, 0.001] {
            let v2 = hausdorff_content(&c, 2.0, r).unwrap();
            assert!(v2 <= r * hausdorff_content(&c, 1.0, r).unwrap() + 1e-12);
            assert!(v2 < prev);
            prev = v2;
        }
    }

    #[test]
    fn coverings_cover_and_are_monotone() {
        let c = PointCloud::new(
            &(0..300)
                .map(|i| {
                    let s = i as f64 * 0.021;
                    HPoint::new(vec![s.sin(), (2.0 * s).cos(), 0.3 * s, -s], s * s).unwrap()
                })
                .collect::<Vec<_>>(),
            CloudMetric::Koranyi,
        )
        .unwrap();
        for r in [2.0, 0.5, 0.1] {
            let cov = greedy_covering(&c, 1.0, r, Exec::Sequential).unwrap();
            assert!(cov.covers(&c));
            assert!(cov.max_radius() <= r);
            if cov.max_radius() <= 1.0 {
                assert!(cov.content_at(2.0) <= cov.content_at(1.0));
            }
            assert_eq!(cov, greedy_covering(&c, 1.0, r, Exec::Parallel).unwrap());
        }
    }

    #[test]
    fn box_counting_examples() {
        let scales = [0.1, 0.05, 0.025, 0.0125];
        let dx = box_counting_dimension(&x_axis(4000), &scales).unwrap();
        assert!((dx - 1.0).abs() <= 0.15, "{dx}");
        let t_scales = [0.2, 0.1, 0.05, 0.025];
        let dt = box_counting_dimension(&t_axis(20000), &t_scales).unwrap();
        assert!((dt - 2.0).abs() <= 0.2, "{dt}");
        let p = PointCloud::new(&[HPoint::identity(2)], CloudMetric::Koranyi).unwrap();
        assert_eq!(box_counting_dimension(&p, &scales).unwrap(), 0.0);
        assert!(box_counting_dimension(&p, &scales[..2]).is_err());
    }

    #[test]
    fn sard_covering_halves_radius() {
        let m = lagrangian_graph_map(2, 1, 1, 65, 3).unwrap();
        let (l, _) = grid_lipschitz(&m);
        let mut prev: Option<f64> = None;
        for mdiv in [2usize, 4, 8] {
            let sc = sard_covering(&m, 1, mdiv, l).unwrap();
            assert_eq!(sc.covering.balls.len(), mdiv);
            assert!(sc.covering.covers(&PointCloud::from_map(&m, CloudMetric::Koranyi)));
            let r = sc.covering.max_radius();
            if let Some(p) = prev {
                assert!((r / p - 0.5).abs() <= 0.5 * 0.25, "{r} vs {p}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn sard_covering_rank_zero_and_violation() {
        let m = SampledMap::from_fn(1, vec![[0.0, 1.0]; 2], vec![9, 9], Exec::Sequential, |x| {
            vec![1e-3 * x[0], 0.0, 0.0]
        })
        .unwrap();
        let sc = sard_covering_unchecked(&m, 0, 4, 1.0, 2.0, Exec::Sequential).unwrap();
        assert_eq!(sc.covering.balls.len(), 1);
        assert!(sc.covering.max_radius() <= 1e-3);

        let plane = isotropic_axis_map(2, 2, 9).unwrap();
        assert!(sard_covering(&plane, 1, 2, 1.0).is_ok());
        let twisted = SampledMap::from_fn(2, vec![[0.0, 1.0]; 2], vec![9, 9], Exec::Sequential, |x| {
            vec![x[0], 0.0, x[1], 0.0, 0.0]
        })
        .unwrap();
        assert!(matches!(
            sard_covering(&twisted, 1, 2, 1.0),
            Err(Error::RankStructure { j: 1, .. })
        ));
    }

    #[test]
    fn decay_rejects_k_le_n() {
        let err = content_decay_experiment(&DecayConfig::new(2, 2, 2, 0)).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation { k: 2, n: 2 }));
        assert!(err.to_string().contains("k > n"));
    }

    #[test]
    fn decay_slope_small() {
        let mut cfg = DecayConfig::new(2, 1, 1, 5);
        cfg.size = 33;
        cfg.mdivs = vec![2, 4, 8];
        let t = content_decay_experiment(&cfg).unwrap();
        assert!((t.slope + 1.0).abs() <= 0.3, "{}", t.slope);
        assert_eq!(t.rows.len(), 3);
    }
}
