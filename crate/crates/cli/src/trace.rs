//! Traceability table: every result the toolkit realizes, the test that
//! covers it, and the outcome of a quick in-process re-check.

use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::Write;

use heisenlab::contact::{
    contact_residual, grid_lipschitz, holder_exponent_estimate, injectivity_collision_search_limited,
    loop_integral_prediction, loop_integral_residual, nn_distance_percentile, rank_report, SampledMap,
};
use heisenlab::extension::{
    circle_bound, extend_circle, extend_interval, Domain, ExtensionOptions, Knot, PartialCurveData,
};
use heisenlab::generators::{
    curved_lift_map, isotropic_axis_map, isotropic_lift_map, lagrangian_graph_map, pure_t_map,
    quadratic_contact_map, twisted_control_map,
};
use heisenlab::heisenberg::{contact_form, group_inv, group_mul, horizontal_frame, koranyi_norm, ETangent};
use heisenlab::horizontal::{
    cc_distance, cc_length, horizontal_lift, projected_signed_areas, HorizontalPolyline, PlanarPolyline,
};
use heisenlab::measure::{
    content_decay_experiment, hausdorff_content, sard_covering, CloudMetric, DecayConfig, PointCloud,
};
use heisenlab::symplectic::{
    complex_structure, isometry_between_isotropic, random_isotropic, symp_complement, symp_form, Subspace,
    SympVector,
};
use heisenlab::{koranyi_dist, Exec, HPoint};

#[derive(Debug, Clone)]
pub struct Row {
    pub anchor: &'static str,
    pub statement: &'static str,
    pub module: &'static str,
    pub test: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut ChaCha8Rng) -> Result<String>;

const ANCHORS: &[(&str, &str, &str, &str, Check)] = &[
    (
        "left-invariant-frame",
        "X_j, Y_j are left-invariant and horizontal; T is transverse",
        "heisenberg_core",
        "heisenberg::tests::frame_examples",
        frame,
    ),
    (
        "contact-form",
        "alpha = dt + 2 sum(x_j dy_j - y_j dx_j)",
        "heisenberg_core",
        "heisenberg::tests::contact_form_examples",
        contact,
    ),
    (
        "group-law",
        "(z,t)*(z',t') = (z+z', t+t'-2 omega(z,z')) is a group law",
        "heisenberg_core",
        "properties::associativity, properties::inverse_law",
        group,
    ),
    (
        "koranyi-metric",
        "d_K(p,q) = |q^-1 p|_K is a left-invariant metric",
        "heisenberg_core",
        "properties::left_invariance, properties::distance_is_norm_of_quotient",
        koranyi,
    ),
    (
        "metric-comparison",
        "C^-1 |p-q| <= d(p,q) <= C |p-q|^(1/2) on compact sets",
        "heisenberg_core",
        "properties::metric_comparison_on_unit_box, properties::cc_bracket_and_projection_bound",
        comparison,
    ),
    (
        "cc-length-of-lift",
        "the length of a horizontal curve equals the Euclidean length of its projection",
        "horizontal_curves",
        "properties::lift_is_reproducible_from_its_projection",
        lift_length,
    ),
    (
        "closed-curve-zero-area",
        "a closed horizontal curve encloses zero signed projected area",
        "horizontal_curves",
        "properties::lift_area_law, properties::closed_horizontal_polylines_enclose_no_area",
        zero_area,
    ),
    (
        "geodesic-distance",
        "d_cc is realized by arcs; d_cc(0,(0,t)) = sqrt(pi |t|)",
        "horizontal_curves",
        "horizontal::tests::cc_distance_examples, properties::cc_triangle_inequality",
        vertical,
    ),
    (
        "interval-extension",
        "an L-Lipschitz map from a subset of an interval extends L-Lipschitz",
        "lipschitz_extension",
        "properties::interval_extension_properties",
        interval,
    ),
    (
        "circle-extension",
        "an L-Lipschitz map from a subset of a circle extends (pi/2) L-Lipschitz",
        "lipschitz_extension",
        "properties::circle_extension_properties",
        circle,
    ),
    (
        "horizontal-derivative",
        "derivatives of contact maps are horizontal (numeric contact residual)",
        "contact_analysis",
        "generators::tests::families_are_contact_with_low_rank",
        horizontal_derivative,
    ),
    (
        "symplectic-form",
        "omega is antisymmetric and omega(v, Jv) = |v|^2",
        "symplectic",
        "symplectic::tests::form_examples, symplectic::tests::complex_structure_examples",
        form,
    ),
    (
        "complement-dimension",
        "dim V^omega = 2n - dim V",
        "symplectic",
        "properties::dimension_law",
        complement,
    ),
    (
        "isotropic-isometry",
        "isotropic V, W of equal dimension are related by a Koranyi isometry",
        "symplectic",
        "properties::isometries_preserve_distance",
        isometry,
    ),
    (
        "isotropic-koranyi-euclidean",
        "d_K agrees with the Euclidean metric on V x {0} for isotropic V",
        "symplectic",
        "properties::isotropic_subspaces_are_euclidean",
        isotropic_euclidean,
    ),
    (
        "rank-bound",
        "contact maps have isotropic horizontal image and rank at most n",
        "contact_analysis",
        "suite_invariants::rank_bound_over_suite",
        rank_bound,
    ),
    (
        "loop-integral",
        "the loop integral around x0 is about c(x0) pi r^2, nonzero off contact",
        "contact_analysis",
        "contact::tests::loop_integral_of_identity_plane",
        loop_integral,
    ),
    (
        "affine-normalization",
        "isometries and left translations of the image leave coverings unchanged",
        "measure_experiments",
        "suite_invariants::normalization_preserves_coverings",
        normalization,
    ),
    (
        "cube-covering",
        "a rank-j image is covered by m^j balls of radius C L d / m",
        "measure_experiments",
        "measure::tests::sard_covering_halves_radius",
        cube_covering,
    ),
    (
        "hausdorff-content",
        "content upper bounds from ball coverings",
        "measure_experiments",
        "measure::tests::unit_segment_content, properties::coverings_cover",
        content,
    ),
    (
        "content-decay",
        "the k-content of the covering decays like m^(j-k) for k > j",
        "measure_experiments",
        "suite_invariants::decay_bound_over_suite",
        decay,
    ),
    (
        "t-component-differentiable",
        "for contact Lipschitz maps the last component is differentiable with the horizontal formula",
        "contact_analysis",
        "suite_invariants::t_component_is_differentiable",
        t_differentiable,
    ),
    (
        "lipschitz-class-comparison",
        "contact maps that are Euclidean Lipschitz are Koranyi Lipschitz",
        "contact_analysis",
        "suite_invariants::koranyi_lipschitz_controlled_by_euclidean",
        lipschitz_class,
    ),
    (
        "holder-exponent",
        "the t-axis is 1/2-Holder and isotropic lines are 1-Holder",
        "contact_analysis",
        "contact::tests::holder_examples",
        holder,
    ),
    (
        "no-injective-map",
        "contact Lipschitz maps from k > n dimensions are not injective",
        "contact_analysis",
        "contact::tests::collision_examples",
        collisions,
    ),
];

pub fn run(seed: u64) -> Vec<Row> {
    ANCHORS
        .iter()
        .enumerate()
        .map(|(i, &(anchor, statement, module, test, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let (passed, detail) = match check(&mut rng) {
                Ok(d) => (true, d),
                Err(e) => (false, format!("{e:#}")),
            };
            Row {
                anchor,
                statement,
                module,
                test,
                passed,
                detail,
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(w: W, rows: &[Row]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["anchor", "statement", "module", "test", "status", "detail"])?;
    for r in rows {
        out.write_record([
            r.anchor,
            r.statement,
            r.module,
            r.test,
            if r.passed { "pass" } else { "fail" },
            &r.detail,
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> HPoint {
    let c: Vec<f64> = (0..=2 * n).map(|_| rng.random_range(-r..r)).collect();
    HPoint::from_coords(&c).expect("finite")
}

fn euclid(p: &HPoint, q: &HPoint) -> f64 {
    p.euclidean_dist(q)
}

fn frame(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = point(rng, 2, 5.0);
        let f = horizontal_frame(&p);
        for j in 0..2 {
            worst = worst.max(contact_form(&p, &f.x_tangent(j))?.abs());
            worst = worst.max(contact_form(&p, &f.y_tangent(j))?.abs());
        }
        ensure!(contact_form(&p, &f.t_tangent())? == 1.0, "alpha(T) != 1");
    }
    ensure!(worst <= 1e-12, "alpha(X), alpha(Y) up to {worst:e}");
    Ok(format!("max |alpha(X_j)|, |alpha(Y_j)| = {worst:.1e}"))
}

fn contact(_: &mut ChaCha8Rng) -> Result<String> {
    let p = HPoint::new(vec![1.0, 0.0], 0.0)?;
    let v = contact_form(&p, &ETangent::new(p.clone(), vec![0.0, 1.0, 0.0])?)?;
    ensure!(v == 2.0, "alpha at (1,0,0) on e_y = {v}");
    Ok("alpha((1,0,0); e_y) = 2".into())
}

fn group(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 1 + i % 4;
        let (p, q, r) = (point(rng, n, 10.0), point(rng, n, 10.0), point(rng, n, 10.0));
        let a = group_mul(&group_mul(&p, &q)?, &r)?;
        let b = group_mul(&p, &group_mul(&q, &r)?)?;
        worst = worst.max(euclid(&a, &b));
        worst = worst.max(euclid(&group_mul(&p, &group_inv(&p))?, &HPoint::identity(n)));
    }
    ensure!(worst <= 1e-10, "group axioms off by {worst:e}");
    Ok(format!("associativity and inverses within {worst:.1e}"))
}

fn koranyi(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 1 + i % 4;
        let (a, p, q) = (point(rng, n, 5.0), point(rng, n, 5.0), point(rng, n, 5.0));
        let d = koranyi_dist(&p, &q)?;
        let moved = koranyi_dist(&group_mul(&a, &p)?, &group_mul(&a, &q)?)?;
        worst = worst.max((moved - d).abs() / (1.0 + d));
        ensure!(d == koranyi_norm(&group_mul(&group_inv(&q), &p)?), "d_K differs from |q^-1 p|");
    }
    ensure!(worst <= 1e-10, "left invariance off by {worst:e}");
    Ok(format!("left invariance within {worst:.1e}"))
}

fn comparison(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut ratio = (f64::INFINITY, 0.0f64);
    for i in 0..500 {
        let n = 1 + i % 3;
        let c = (1.0 + 8.0 * n as f64).sqrt();
        let (p, q) = (point(rng, n, 1.0), point(rng, n, 1.0));
        let (e, d) = (euclid(&p, &q), koranyi_dist(&p, &q)?);
        lo = lo.min(c * d / e);
        hi = hi.max(d / (c * e.sqrt()));
        let cc = cc_distance(&p, &q, 1e-10)?;
        ratio = (ratio.0.min(cc / d), ratio.1.max(cc / d));
    }
    ensure!(lo >= 1.0 && hi <= 1.0, "comparison constants violated ({lo}, {hi})");
    ensure!(
        ratio.0 >= 1.0 - 1e-9 && ratio.1 <= PI.sqrt() + 1e-9,
        "d_cc/d_K outside [1, sqrt(pi)]: {ratio:?}"
    );
    Ok(format!("d_cc/d_K in [{:.4}, {:.4}]", ratio.0, ratio.1))
}

fn planar(rng: &mut ChaCha8Rng, n: usize, len: usize, closed: bool) -> PlanarPolyline {
    let pts = (0..len)
        .map(|_| (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    PlanarPolyline::new(pts, closed).expect("valid polyline")
}

fn lift_length(rng: &mut ChaCha8Rng) -> Result<String> {
    for _ in 0..200 {
        let c = planar(rng, 2, 8, false);
        let h = horizontal_lift(&c, rng.random_range(-1.0..1.0));
        ensure!(cc_length(&h) == c.length(), "lift length differs from projection length");
    }
    Ok("200 lifts, lengths equal bitwise".into())
}

fn zero_area(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let c = planar(rng, 1, 7, true);
        let per = c.length();
        let h = horizontal_lift(&c, 0.0);
        let (_, area) = projected_signed_areas(&c)?;
        let gap = h.end().t() - h.start().t();
        worst = worst.max((gap + 4.0 * area).abs() / (per * per));
        // An out-and-back path is a closed horizontal curve.
        let mut pts = c.samples().to_vec();
        pts.extend(c.samples().iter().rev().skip(1).cloned());
        let back = horizontal_lift(&PlanarPolyline::new(pts.clone(), true)?, 0.0);
        let (_, a) = projected_signed_areas(&back.projection())?;
        worst = worst.max(a.abs() / (per * per));
        HorizontalPolyline::new(back.samples().to_vec(), true)?;
    }
    ensure!(worst <= 1e-12, "area law off by {worst:e} per^2");
    Ok(format!("t-gap + 4 area within {worst:.1e} per^2"))
}

fn vertical(_: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 4.0, 10.0] {
        let d = cc_distance(&HPoint::identity(1), &HPoint::new(vec![0.0, 0.0], t)?, 1e-12)?;
        worst = worst.max((d - (PI * t).sqrt()).abs() / (PI * t).sqrt());
    }
    ensure!(worst <= 1e-6, "vertical distances off by {worst:e}");
    Ok(format!("relative error {worst:.1e}"))
}

fn knots(rng: &mut ChaCha8Rng, params: Vec<f64>) -> Vec<Knot> {
    params
        .into_iter()
        .map(|param| Knot {
            param,
            value: point(rng, 1, 1.0),
        })
        .collect()
}

fn interval(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut params: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
    params.sort_by(f64::total_cmp);
    let mut data = PartialCurveData::new(Domain::Interval { a: 0.0, b: 1.0 }, knots(rng, params), 0.0)?;
    data.lipschitz = data.knot_lipschitz()?.0;
    let e = extend_interval(&data, &ExtensionOptions::default())?;
    let lip = e.measured_lipschitz(500, 0, Exec::default())?;
    ensure!(lip <= data.lipschitz * (1.0 + 1e-6), "measured {lip} > L = {}", data.lipschitz);
    Ok(format!("Lip / L = {:.6}", lip / data.lipschitz))
}

fn circle(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut params: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    params.sort_by(f64::total_cmp);
    let domain = Domain::Circle {
        center: [0.0, 0.0],
        radius: 1.0,
    };
    let mut data = PartialCurveData::new(domain, knots(rng, params), 0.0)?;
    data.lipschitz = data.knot_lipschitz()?.0;
    let e = extend_circle(&data, &ExtensionOptions::default())?;
    let lip = e.measured_lipschitz(500, 0, Exec::default())?;
    let bound = circle_bound(data.lipschitz);
    ensure!(lip <= bound * (1.0 + 1e-6), "measured {lip} > pi L / 2 = {bound}");
    Ok(format!("Lip / (pi L / 2) = {:.6}", lip / bound))
}

fn horizontal_derivative(rng: &mut ChaCha8Rng) -> Result<String> {
    let m = quadratic_contact_map(2, 1, 33, rng.random())?;
    let r = contact_residual(&m).max_residual();
    let h = m.max_spacing();
    ensure!(r <= 10.0 * h, "residual {r:e} > 10h");
    Ok(format!("max residual {r:.1e} (h = {h:.3})"))
}

fn form(rng: &mut ChaCha8Rng) -> Result<String> {
    for _ in 0..100 {
        let v = SympVector::new((0..4).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let w = SympVector::new((0..4).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        ensure!(symp_form(&v, &w)? == -symp_form(&w, &v)?, "omega not antisymmetric");
        let norm2: f64 = v.as_slice().iter().map(|x| x * x).sum();
        let jv = complex_structure(&v);
        ensure!((symp_form(&v, &jv)? - norm2).abs() <= 1e-12, "omega(v, Jv) != |v|^2");
    }
    Ok("100 random pairs".into())
}

fn complement(rng: &mut ChaCha8Rng) -> Result<String> {
    for n in 1..=4 {
        for d in 0..=2 * n {
            let vs: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let v = Subspace::span(n, &vs)?;
            let c = symp_complement(&v);
            ensure!(v.dim() + c.dim() == 2 * n, "n = {n}, dim V = {}, dim V^w = {}", v.dim(), c.dim());
        }
    }
    Ok("n = 1..4, every dimension".into())
}

fn isometry(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for j in 1..=n {
            let v = random_isotropic(n, j, rng);
            let w = random_isotropic(n, j, rng);
            let phi = isometry_between_isotropic(&v, &w)?;
            for _ in 0..50 {
                let (p, q) = (point(rng, n, 2.0), point(rng, n, 2.0));
                let d = koranyi_dist(&p, &q)?;
                let e = (koranyi_dist(&phi.apply(&p)?, &phi.apply(&q)?)? - d).abs() / d;
                worst = worst.max(e);
            }
            for b in v.basis() {
                worst = worst.max(w.residual(&phi.apply_vec(b)));
            }
        }
    }
    ensure!(worst <= 1e-10, "isometry error {worst:e}");
    Ok(format!("relative distance error {worst:.1e}"))
}

fn isotropic_euclidean(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let v = random_isotropic(n, n, rng);
        for _ in 0..50 {
            let mut pick = || -> Result<HPoint> {
                let mut z = vec![0.0; 2 * n];
                for b in v.basis() {
                    let c = rng.random_range(-1.0..1.0);
                    z.iter_mut().zip(b).for_each(|(z, b)| *z += c * b);
                }
                Ok(HPoint::new(z, 0.0)?)
            };
            let (p, q) = (pick()?, pick()?);
            worst = worst.max((koranyi_dist(&p, &q)? - euclid(&p, &q)).abs());
        }
    }
    ensure!(worst <= 1e-12, "|d_K - |p-q|| = {worst:e}");
    Ok(format!("max |d_K - |p-q|| = {worst:.1e}"))
}

fn rank_bound(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst_rank = 0;
    for m in [
        isotropic_lift_map(3, 2, 2, 17, rng.random())?,
        quadratic_contact_map(3, 2, 17, rng.random())?,
        lagrangian_graph_map(3, 2, 2, 17, rng.random())?,
    ] {
        let r = rank_report(&m, 10.0 * m.max_spacing(), heisenlab::contact::RANK_TOL);
        ensure!(r.flagged.is_empty(), "{} flagged contact points", r.flagged.len());
        worst_rank = worst_rank.max(r.max_contact_rank());
    }
    ensure!(worst_rank <= 2, "rank {worst_rank} > n");
    Ok(format!("(k, n) = (3, 2): max contact rank {worst_rank}, no flags"))
}

fn loop_integral(rng: &mut ChaCha8Rng) -> Result<String> {
    let m = twisted_control_map(2, 1, 65, rng.random())?;
    let idx = [32, 32];
    let r = 8.0 * m.max_spacing();
    let value = loop_integral_residual(&m, &idx, r, (0, 1))?;
    let pred = loop_integral_prediction(&m, &idx, r, (0, 1))?;
    let rel = (value - pred).abs() / pred.abs();
    ensure!(pred != 0.0 && rel <= 0.05, "loop {value:e} vs c pi r^2 {pred:e}");
    Ok(format!("relative error {rel:.1e} at r = 8h"))
}

fn normalization(rng: &mut ChaCha8Rng) -> Result<String> {
    let m = lagrangian_graph_map(3, 2, 2, 17, rng.random())?;
    let v = random_isotropic(2, 2, rng);
    let phi = isometry_between_isotropic(&Subspace::canonical_isotropic(2, 2), &v)?;
    let a = point(rng, 2, 1.0);
    let mut values = Vec::with_capacity(m.values().len());
    for f in 0..m.len() {
        let p = HPoint::from_coords(m.value(f))?;
        values.extend(group_mul(&a, &phi.apply(&p)?)?.coords());
    }
    let moved = SampledMap::new(m.n(), m.bounds().to_vec(), m.shape().to_vec(), values)?;
    let (l, _) = grid_lipschitz(&m);
    let r0 = sard_covering(&m, 2, 4, l)?.covering.max_radius();
    let r1 = sard_covering(&moved, 2, 4, l)?.covering.max_radius();
    ensure!((r0 - r1).abs() <= 1e-9 * r0, "radii {r0} vs {r1}");
    Ok(format!("max radius {r0:.6} vs {r1:.6}"))
}

fn cube_covering(rng: &mut ChaCha8Rng) -> Result<String> {
    let m = lagrangian_graph_map(2, 1, 1, 65, rng.random())?;
    let (l, _) = grid_lipschitz(&m);
    let mut c_max = 0.0f64;
    for mdiv in [2, 4, 8, 16] {
        let sc = sard_covering(&m, 1, mdiv, l)?;
        ensure!(sc.covering.balls.len() == mdiv, "{} balls for m = {mdiv}", sc.covering.balls.len());
        c_max = c_max.max(sc.c_observed);
    }
    ensure!(c_max <= 1.0, "covering constant {c_max} > 1");
    Ok(format!("m balls, constant {c_max:.3}"))
}

fn content(_: &mut ChaCha8Rng) -> Result<String> {
    let pts: Vec<HPoint> = (0..=500)
        .map(|i| HPoint::new(vec![i as f64 / 500.0, 0.0], 0.0).expect("finite"))
        .collect();
    let cloud = PointCloud::new(&pts, CloudMetric::Koranyi)?;
    let v = hausdorff_content(&cloud, 1.0, 1.0)?;
    ensure!((v - 0.5).abs() <= 0.5 * 1e-9, "unit segment content {v}");
    Ok(format!("unit segment, s = 1: {v}"))
}

fn decay(rng: &mut ChaCha8Rng) -> Result<String> {
    let t = content_decay_experiment(&DecayConfig::new(2, 1, 1, rng.random()))?;
    ensure!((t.slope + 1.0).abs() <= 0.3, "slope {} for (k, n, j) = (2, 1, 1)", t.slope);
    Ok(format!("(2, 1, 1) slope {:.3}", t.slope))
}

fn t_differentiable(_: &mut ChaCha8Rng) -> Result<String> {
    let coarse = curved_lift_map(33)?;
    let fine = curved_lift_map(65)?;
    let (rc, rf) = (contact_residual(&coarse).max_residual(), contact_residual(&fine).max_residual());
    let h = fine.max_spacing();
    ensure!(rf <= 10.0 * h && rf < rc, "residuals {rc:e} -> {rf:e}");
    Ok(format!("t-residual {rc:.1e} -> {rf:.1e} as h halves"))
}

fn lipschitz_class(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut worst = 0.0f64;
    for m in [
        isotropic_lift_map(2, 1, 1, 65, rng.random())?,
        quadratic_contact_map(2, 1, 65, rng.random())?,
    ] {
        let (kor, euc) = grid_lipschitz(&m);
        worst = worst.max(kor / euc);
    }
    ensure!(worst <= 1.25, "Koranyi / Euclidean grid Lipschitz ratio {worst}");
    Ok(format!("ratio {worst:.3}"))
}

fn holder(_: &mut ChaCha8Rng) -> Result<String> {
    let a = holder_exponent_estimate(&pure_t_map(2, 1, 65)?)?.alpha_hat;
    let b = holder_exponent_estimate(&isotropic_axis_map(2, 1, 65)?)?.alpha_hat;
    ensure!((a - 0.5).abs() <= 0.02 && (b - 1.0).abs() <= 0.02, "alpha_hat {a}, {b}");
    Ok(format!("t-axis {a:.4}, isotropic line {b:.4}"))
}

fn collisions(rng: &mut ChaCha8Rng) -> Result<String> {
    let m = isotropic_lift_map(2, 1, 1, 65, rng.random())?;
    let eps = nn_distance_percentile(&m, 0.01)?;
    let pairs = injectivity_collision_search_limited(&m, eps, 10.0 * m.max_spacing(), 1024, Exec::default());
    ensure!(!pairs.is_empty(), "no collisions at eps = {eps:e}");
    Ok(format!("{} pairs at eps = {eps:.1e}", pairs.len()))
}
