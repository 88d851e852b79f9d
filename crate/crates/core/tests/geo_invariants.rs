use proptest::prelude::*;
use trailrank_core::geo::{
    compute_attributes, elevation_gain_loss, elevation_profile, is_out_and_back, proximity_percent,
    route_length, AttributeParams, ElevationGrid, FeatureLayer, Geometry, LayerClass, Point2D,
    RouteAttributes, RoutePolyline,
};
use trailrank_core::synth::{generate_corpus, RouteFamily, SynthCorpus, SynthSpec};

const PERCENT_TOL: f64 = 1.0;

fn percents(a: &RouteAttributes) -> [f64; 6] {
    [a.along_surfacewater, a.along_coast, a.in_national_parks, a.in_greenspace, a.in_woodland, a.in_urban]
}

fn assert_percents_close(a: &RouteAttributes, b: &RouteAttributes, what: &str) {
    for (x, y) in percents(a).iter().zip(percents(b)) {
        assert!((x - y).abs() <= PERCENT_TOL, "{what} {}: {:?} vs {:?}", a.route_id, percents(a), percents(b));
    }
}

fn corpus_200() -> SynthCorpus {
    generate_corpus(&SynthSpec::default().with_routes(200).with_seed(2024)).unwrap()
}

fn attrs_of(c: &SynthCorpus, route: &RoutePolyline, params: &AttributeParams) -> RouteAttributes {
    compute_attributes(route, &c.layers, &c.grid, &c.places, params).unwrap()
}

#[test]
fn spiral_length_matches_resummation() {
    let pts: Vec<Point2D> = (0..1000)
        .map(|i| {
            let t = i as f64 * 0.05;
            Point2D::new((10.0 + 3.0 * t) * t.cos(), (10.0 + 3.0 * t) * t.sin())
        })
        .collect();
    let mut expected = 0.0;
    for w in pts.windows(2) {
        expected += ((w[1].easting - w[0].easting).powi(2) + (w[1].northing - w[0].northing).powi(2)).sqrt();
    }
    let r = RoutePolyline::new("spiral", pts).unwrap();
    let got = route_length(&r).unwrap();
    assert!((got / expected - 1.0).abs() < 1e-9);
}

#[test]
fn ramp_profile_is_arithmetic() {
    let grid = ElevationGrid::from_fn(Point2D::new(-500.0, -500.0), 10.0, 100, 200, |p| p.northing / 100.0).unwrap();
    let r = RoutePolyline::new("n", vec![Point2D::new(0.0, 0.0), Point2D::new(0.0, 1000.0)]).unwrap();
    let profile = elevation_profile(&r, &grid, 10.0).unwrap();
    assert_eq!(profile.len(), 101);
    for (i, z) in profile.iter().enumerate() {
        assert!((z - i as f64 * 0.1).abs() < 1e-9, "sample {i}: {z}");
    }
    let (gain, loss) = elevation_gain_loss(&profile).unwrap();
    assert!((gain - 10.0).abs() < 1e-9 && loss == 0.0);
}

/// Cell-count oracle for the buffer of a retraced line and of a circle.
#[test]
fn out_and_back_examples() {
    let retrace = RoutePolyline::new(
        "ab",
        vec![Point2D::new(0.0, 0.0), Point2D::new(2000.0, 0.0), Point2D::new(0.0, 0.0)],
    )
    .unwrap();
    assert!(is_out_and_back(&retrace, 500.0, 25.0, 5.0, 0.6).unwrap());
    let ratio = trailrank_core::geo::buffer_overlap_ratio(&retrace, 25.0, 5.0).unwrap();
    // one capsule of 2000 x 50 plus two half discs, over 50 * 4000
    let oracle = (2000.0 * 50.0 + std::f64::consts::PI * 625.0) / (50.0 * 4000.0);
    assert!((ratio - oracle).abs() < 0.01, "{ratio} vs {oracle}");

    let circle: Vec<Point2D> = (0..=360)
        .map(|d| {
            let t = (d as f64).to_radians();
            Point2D::new(1000.0 * t.cos(), 1000.0 * t.sin())
        })
        .collect();
    let circle = RoutePolyline::new("loop", circle).unwrap();
    let ratio = trailrank_core::geo::buffer_overlap_ratio(&circle, 25.0, 5.0).unwrap();
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    assert!(!is_out_and_back(&circle, 500.0, 25.0, 5.0, 0.6).unwrap());

    let straight = RoutePolyline::new("s", vec![Point2D::new(0.0, 0.0), Point2D::new(3000.0, 0.0)]).unwrap();
    assert!(!is_out_and_back(&straight, 500.0, 25.0, 5.0, 0.6).unwrap());
}

#[test]
fn reversal_invariants_on_synthetic_routes() {
    let c = corpus_200();
    let p = AttributeParams::default();
    for r in &c.routes {
        let a = attrs_of(&c, r, &p);
        let b = attrs_of(&c, &r.reversed(), &p);
        assert!((a.length_m / b.length_m - 1.0).abs() < 1e-9);
        assert!((a.total_gain - b.total_loss).abs() < 1e-6, "{}: {} vs {}", r.id(), a.total_gain, b.total_loss);
        assert!((a.total_loss - b.total_gain).abs() < 1e-6);
        assert_eq!(a.start_place, b.end_place);
        assert_eq!(a.end_place, b.start_place);
        assert_eq!(a.is_circular, b.is_circular);
        assert_eq!(a.is_out_and_back, b.is_out_and_back);
        assert_percents_close(&a, &b, "reversal");
    }
}

#[test]
fn translation_invariants_on_synthetic_routes() {
    let c = corpus_200();
    let (dx, dy) = (12_345.0, -6_780.0);
    let shift = |q: Point2D| q.translate(dx, dy);
    let layers = c.layers.map_points(shift);
    let grid = c.grid.with_origin(shift(c.grid.origin()));
    let places: Vec<_> = c
        .places
        .iter()
        .map(|pl| trailrank_core::geo::NamedPlace::new(pl.name.clone(), shift(pl.location)).unwrap())
        .collect();
    let p = AttributeParams::default();
    for r in &c.routes {
        let a = attrs_of(&c, r, &p);
        let moved = r.map_points(shift).unwrap();
        let b = compute_attributes(&moved, &layers, &grid, &places, &p).unwrap();
        assert!((a.length_m / b.length_m - 1.0).abs() < 1e-9);
        assert!((a.total_gain - b.total_gain).abs() < 1e-6);
        assert!((a.total_loss - b.total_loss).abs() < 1e-6);
        assert_eq!((a.is_circular, a.is_out_and_back, a.is_coastal), (b.is_circular, b.is_out_and_back, b.is_coastal));
        assert_eq!((&a.start_place, &a.end_place), (&b.start_place, &b.end_place));
        assert_percents_close(&a, &b, "translation");
    }
}

#[test]
fn scaling_invariants_on_synthetic_routes() {
    let c = corpus_200();
    let s = 2.0;
    let scale = |q: Point2D| Point2D::new(q.easting * s, q.northing * s);
    let layers = c.layers.map_points(scale);
    // same elevation field in route-relative coordinates
    let grid = c.grid.with_geometry(scale(c.grid.origin()), c.grid.cell_size() * s).unwrap();
    let p = AttributeParams::default();
    let ps = p.scaled(s);
    for r in &c.routes {
        let a = attrs_of(&c, r, &p);
        let b = compute_attributes(&r.map_points(scale).unwrap(), &layers, &grid, &[], &ps).unwrap();
        assert!((b.length_m / (a.length_m * s) - 1.0).abs() < 1e-9);
        assert!((b.grade - a.grade / s).abs() < 1e-9 * a.grade.max(1.0), "{}: {} vs {}", r.id(), b.grade, a.grade);
        assert_eq!(a.is_circular, b.is_circular);
        assert_percents_close(&a, &b, "scaling");
    }
}

#[test]
fn out_and_back_agrees_with_construction() {
    let c = generate_corpus(&SynthSpec::default().with_routes(1500).with_seed(77)).unwrap();
    let p = AttributeParams::default();
    let pick = |fam: RouteFamily| -> Vec<usize> {
        c.truth.iter().enumerate().filter(|(_, t)| t.family == fam).map(|(i, _)| i).take(100).collect()
    };
    let (retraces, loops) = (pick(RouteFamily::OutAndBack), pick(RouteFamily::Loop));
    assert_eq!((retraces.len(), loops.len()), (100, 100));
    for i in retraces.into_iter().chain(loops) {
        let a = attrs_of(&c, &c.routes[i], &p);
        assert_eq!(a.is_out_and_back, c.truth[i].is_out_and_back, "{}", c.truth[i].route_id);
        assert!(a.is_circular);
    }
}

#[test]
fn computed_attribute_invariants() {
    let c = corpus_200();
    let p = AttributeParams::default();
    for r in &c.routes {
        let a = attrs_of(&c, r, &p);
        assert!(a.length_m > 0.0 && a.total_gain >= 0.0 && a.total_loss >= 0.0);
        assert_eq!(a.grade, a.total_gain / a.length_m * 100.0);
        assert!(percents(&a).iter().all(|v| (0.0..=100.0).contains(v)));
        assert_eq!(a.is_coastal, a.along_coast >= 50.0);
        assert!(!a.is_out_and_back || a.is_circular);
    }
}

fn arb_route() -> impl Strategy<Value = RoutePolyline> {
    prop::collection::vec((-2000.0f64..2000.0, -2000.0f64..2000.0), 2..12).prop_filter_map("degenerate", |pts| {
        let pts: Vec<Point2D> = pts.into_iter().map(Point2D::from).collect();
        let r = RoutePolyline::new("p", pts).ok()?;
        (route_length(&r).ok()? > 1.0).then_some(r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gain_minus_loss_is_net(profile in prop::collection::vec(-500.0f64..3000.0, 2..200)) {
        let (gain, loss) = elevation_gain_loss(&profile).unwrap();
        let net = profile[profile.len() - 1] - profile[0];
        let scale = profile.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!(gain >= 0.0 && loss >= 0.0);
        prop_assert!(((gain - loss) - net).abs() <= 1e-12 * scale);
        let rev: Vec<f64> = profile.iter().rev().copied().collect();
        let (g2, l2) = elevation_gain_loss(&rev).unwrap();
        prop_assert!((g2 - loss).abs() <= 1e-12 * scale && (l2 - gain).abs() <= 1e-12 * scale);
    }

    #[test]
    fn length_survives_reversal_and_translation(r in arb_route(), dx in -1e5f64..1e5, dy in -1e5f64..1e5) {
        let l = route_length(&r).unwrap();
        prop_assert!((route_length(&r.reversed()).unwrap() / l - 1.0).abs() < 1e-9);
        let t = r.map_points(|q| q.translate(dx, dy)).unwrap();
        prop_assert!((route_length(&t).unwrap() / l - 1.0).abs() < 1e-9);
    }

    #[test]
    fn proximity_monotone_in_buffer(r in arb_route(), b0 in 0.0f64..300.0, extra in 0.0f64..300.0) {
        let layer = FeatureLayer::new(
            LayerClass::Coastline,
            vec![Geometry::LineString(vec![Point2D::new(-1500.0, 100.0), Point2D::new(1500.0, -200.0)])],
        ).unwrap();
        let lo = proximity_percent(&r, &layer, b0, 10.0).unwrap();
        let hi = proximity_percent(&r, &layer, b0 + extra, 10.0).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((0.0..=100.0).contains(&lo) && (0.0..=100.0).contains(&hi));
    }
}
