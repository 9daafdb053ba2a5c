use heisenlab::extension::{
    extend_circle, extend_interval, Domain, ExtensionOptions, Knot, PartialCurveData,
};
use heisenlab::horizontal::{
    cc_distance, cc_length, horizontal_lift, projected_signed_areas, HorizontalPolyline,
    PlanarPolyline,
};
use heisenlab::measure::{greedy_covering, CloudMetric, PointCloud};
use heisenlab::symplectic::{
    is_isotropic, isometry_between_isotropic, lagrangian_extension, random_isotropic, symp_complement,
    Subspace,
};
use heisenlab::heisenberg::omega;
use heisenlab::{group_inv, group_mul, koranyi_dist, koranyi_norm, Exec, HPoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn point(n: usize, r: f64) -> impl Strategy<Value = HPoint> {
    (prop::collection::vec(-r..r, 2 * n), -r..r).prop_map(|(z, t)| HPoint::new(z, t).unwrap())
}

fn points(count: usize, r: f64) -> impl Strategy<Value = Vec<HPoint>> {
    (1usize..=3).prop_flat_map(move |n| prop::collection::vec(point(n, r), count))
}

fn euclid(p: &HPoint, q: &HPoint) -> f64 {
    p.euclidean_dist(q)
}

fn polyline(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 3..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn associativity(v in points(3, 10.0)) {
        let a = group_mul(&group_mul(&v[0], &v[1]).unwrap(), &v[2]).unwrap();
        let b = group_mul(&v[0], &group_mul(&v[1], &v[2]).unwrap()).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn inverse_law(p in points(1, 10.0)) {
        let e = group_mul(&p[0], &group_inv(&p[0])).unwrap();
        prop_assert!(e.coords().iter().all(|c| c.abs() <= 1e-12));
        prop_assert_eq!(group_inv(&group_inv(&p[0])), p[0].clone());
    }

    #[test]
    fn left_invariance(v in points(3, 5.0)) {
        let d = koranyi_dist(&v[1], &v[2]).unwrap();
        let a1 = group_mul(&v[0], &v[1]).unwrap();
        let a2 = group_mul(&v[0], &v[2]).unwrap();
        let da = koranyi_dist(&a1, &a2).unwrap();
        prop_assert!((da - d).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn distance_is_norm_of_quotient(v in points(2, 5.0)) {
        let d = koranyi_dist(&v[0], &v[1]).unwrap();
        let q = group_mul(&group_inv(&v[1]), &v[0]).unwrap();
        prop_assert_eq!(d.to_bits(), koranyi_norm(&q).to_bits());
    }

    #[test]
    fn metric_comparison_on_unit_box(v in points(2, 1.0)) {
        // sup of |p − q| / d_K on the box is √(1 + 8n), attained at a
        // corner for horizontal displacements; it also dominates
        // d_K / |p − q|^½ there.
        let c = (1.0 + 8.0 * v[0].n() as f64).sqrt();
        let d = koranyi_dist(&v[0], &v[1]).unwrap();
        let e = euclid(&v[0], &v[1]);
        prop_assert!(e <= c * d * (1.0 + 1e-12));
        prop_assert!(d <= c * e.sqrt() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cc_bracket_and_projection_bound(v in points(2, 1.0)) {
        let dcc = cc_distance(&v[0], &v[1], 1e-8).unwrap();
        let dk = koranyi_dist(&v[0], &v[1]).unwrap();
        let dz: f64 = v[0].z().iter().zip(v[1].z()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(dcc >= dz * (1.0 - 1e-12));
        if dk > 0.0 {
            let r = dcc / dk;
            prop_assert!((1.0 - 1e-9..=PI.sqrt() * (1.0 + 1e-9)).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn cc_triangle_inequality(v in points(3, 2.0)) {
        let tol = 1e-8;
        let d = |a: &HPoint, b: &HPoint| cc_distance(a, b, tol).unwrap();
        prop_assert!(d(&v[0], &v[2]) <= d(&v[0], &v[1]) + d(&v[1], &v[2]) + 2.0 * tol);
    }

    #[test]
    fn lift_area_law(raw in polyline(12), t0 in -1.0f64..1.0) {
        let c = PlanarPolyline::new(raw, true).unwrap();
        let (_, total) = projected_signed_areas(&c).unwrap();
        let lift = horizontal_lift(&c, t0);
        let s = lift.samples();
        let gap = s[s.len() - 1].t() - s[0].t();
        let per = c.length();
        prop_assert!((gap + 4.0 * total).abs() <= 1e-12 * per * per);
        prop_assert_eq!(cc_length(&lift), per);
    }

    #[test]
    fn lift_is_reproducible_from_its_projection(raw in polyline(12), t0 in -1.0f64..1.0) {
        let c = PlanarPolyline::new(raw, false).unwrap();
        let lift = horizontal_lift(&c, t0);
        let again = horizontal_lift(&lift.projection(), t0);
        prop_assert_eq!(lift, again);
    }

    #[test]
    fn closed_horizontal_polylines_enclose_no_area(raw in polyline(10)) {
        // Close the loop by appending the reversed path.
        let mut back = raw.clone();
        back.reverse();
        let mut all = raw;
        all.extend(back.into_iter().skip(1));
        let c = PlanarPolyline::new(all, true).unwrap();
        let per = c.length();
        let lift = horizontal_lift(&c, 0.0);
        prop_assert!(lift.is_closed());
        let closed = HorizontalPolyline::new(lift.into_samples(), true).unwrap();
        let (_, total) = projected_signed_areas(&closed.projection()).unwrap();
        prop_assert!(total.abs() <= 1e-12 * per * per);
    }

    #[test]
    fn dimension_law(n in 1usize..=4, d in 0usize..=8, seed in any::<u64>()) {
        use rand::Rng;
        let d = d.min(2 * n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vecs: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let v = Subspace::span(n, &vecs).unwrap();
        prop_assert_eq!(v.dim() + symp_complement(&v).dim(), 2 * n);
        if is_isotropic(&v, 1e-10) {
            prop_assert!(v.dim() <= n);
        }
    }

    #[test]
    fn isotropic_subspaces_of_lagrangians(n in 1usize..=4, j in 1usize..=4, seed in any::<u64>()) {
        let j = j.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_isotropic(n, j, &mut rng);
        let l = lagrangian_extension(&v).unwrap();
        prop_assert_eq!(l.dim(), n);
        for m in 1..=n {
            let sub = Subspace::span(n, &l.basis()[..m]).unwrap();
            prop_assert!(is_isotropic(&sub, 1e-10));
            prop_assert!(sub.dim() <= n);
        }
    }

    #[test]
    fn isotropic_subspaces_are_euclidean(n in 1usize..=4, j in 1usize..=4, seed in any::<u64>(),
                                         a in prop::collection::vec(-5.0f64..5.0, 4),
                                         b in prop::collection::vec(-5.0f64..5.0, 4)) {
        let j = j.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_isotropic(n, j, &mut rng);
        let embed = |c: &[f64]| {
            let mut z = vec![0.0; 2 * n];
            for (w, b) in c.iter().zip(v.basis()) {
                for (zi, bi) in z.iter_mut().zip(b) {
                    *zi += w * bi;
                }
            }
            HPoint::new(z, 0.0).unwrap()
        };
        let (p, q) = (embed(&a[..j]), embed(&b[..j]));
        prop_assert!(omega(p.z(), q.z()).abs() <= 1e-12 * (1.0 + euclid(&p, &q).powi(2)));
        let d = koranyi_dist(&p, &q).unwrap();
        prop_assert!((d - euclid(&p, &q)).abs() <= 1e-12 * (1.0 + d));
    }

    #[test]
    fn isometries_preserve_distance(n in 1usize..=4, j in 1usize..=4, seed in any::<u64>(),
                                    pair in (prop::collection::vec(-5.0f64..5.0, 9),
                                             prop::collection::vec(-5.0f64..5.0, 9))) {
        let j = j.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_isotropic(n, j, &mut rng);
        let w = random_isotropic(n, j, &mut rng);
        let phi = isometry_between_isotropic(&v, &w).unwrap();
        let p = HPoint::from_coords(&pair.0[..2 * n + 1]).unwrap();
        let q = HPoint::from_coords(&pair.1[..2 * n + 1]).unwrap();
        let d = koranyi_dist(&p, &q).unwrap();
        let dphi = koranyi_dist(&phi.apply(&p).unwrap(), &phi.apply(&q).unwrap()).unwrap();
        prop_assert!((dphi - d).abs() <= 1e-10 * (1.0 + d));
        for b in v.basis() {
            prop_assert!(w.residual(&phi.apply_vec(b)) <= 1e-12);
        }
    }
}

fn interval_data(n: usize, count: usize, seed: u64) -> PartialCurveData {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..1.0)).collect();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let knots: Vec<Knot> = params
        .into_iter()
        .map(|param| Knot {
            param,
            value: HPoint::from_coords(
                &(0..2 * n + 1).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>(),
            )
            .unwrap(),
        })
        .collect();
    let mut data = PartialCurveData::new(Domain::Interval { a: 0.0, b: 1.0 }, knots, 0.0).unwrap();
    data.lipschitz = data.knot_lipschitz().unwrap().0;
    data
}

fn circle_data(n: usize, count: usize, seed: u64) -> PartialCurveData {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..TAU)).collect();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let knots: Vec<Knot> = params
        .into_iter()
        .map(|param| Knot {
            param,
            value: HPoint::from_coords(
                &(0..2 * n + 1).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>(),
            )
            .unwrap(),
        })
        .collect();
    let domain = Domain::Circle { center: [0.0, 0.0], radius: 1.0 };
    let mut data = PartialCurveData::new(domain, knots, 0.0).unwrap();
    data.lipschitz = data.knot_lipschitz().unwrap().0;
    data
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interval_extension_properties(n in 1usize..=2, count in 1usize..=8, seed in any::<u64>()) {
        let data = interval_data(n, count, seed);
        let opts = ExtensionOptions::default();
        let e = extend_interval(&data, &opts).unwrap();
        prop_assert!(e.knot_agreement() <= opts.geodesic.tol);
        prop_assert!(e.curve().max_segment_residual() <= 1e-9);
        let lip = e.measured_lipschitz(200, seed, Exec::Sequential).unwrap();
        prop_assert!(lip <= data.lipschitz * (1.0 + 1e-6) + 1e-12, "{lip} > {}", data.lipschitz);
    }

    #[test]
    fn circle_extension_properties(n in 1usize..=2, count in 1usize..=8, seed in any::<u64>()) {
        let data = circle_data(n, count, seed);
        let opts = ExtensionOptions::default();
        let e = extend_circle(&data, &opts).unwrap();
        prop_assert!(e.curve().is_closed());
        prop_assert!(e.knot_agreement() <= opts.geodesic.tol);
        prop_assert!(e.curve().max_segment_residual() <= 1e-9);
        let bound = data.lipschitz * PI / 2.0;
        let lip = e.measured_lipschitz(200, seed, Exec::Sequential).unwrap();
        prop_assert!(lip <= bound * (1.0 + 1e-6) + 1e-12, "{lip} > {bound}");
    }

    #[test]
    fn coverings_cover(v in points(60, 1.0), r in 0.05f64..1.0, euclidean in any::<bool>()) {
        let metric = if euclidean { CloudMetric::Euclidean } else { CloudMetric::Koranyi };
        let cloud = PointCloud::new(&v, metric).unwrap();
        let cov = greedy_covering(&cloud, 1.0, r, Exec::Sequential).unwrap();
        prop_assert!(cov.covers(&cloud));
        prop_assert!(cov.max_radius() <= r);
        let mut prev = f64::INFINITY;
        for s in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let c = cov.content_at(s);
            prop_assert!(c <= prev);
            prev = c;
        }
    }
}
