use std::collections::HashMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use trailrank_core::describe::{generate_description, DescriptionConfig};
use trailrank_core::embed::{rank_documents, reference_embed, EmbeddingVector, RankedEntry, RankedList};
use trailrank_core::eval::{
    builtin_queries, cumulative_mean, evaluate, read_curves_csv, render_svg, write_curves_csv, EvaluationReport,
    PlotLayout, Query,
};
use trailrank_core::geo::{compute_attributes_batch, AttributeName, AttributeParams, RouteAttributes};
use trailrank_core::synth::{generate_corpus, SynthSpec};
use trailrank_core::Execution;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn attr(id: &str, length: f64, coast: f64) -> RouteAttributes {
    RouteAttributes { route_id: id.into(), length_m: length, along_coast: coast, is_coastal: coast >= 50.0, ..Default::default() }
}

fn ranking(query_id: &str, ids: &[&str]) -> RankedList {
    RankedList {
        query_id: query_id.into(),
        entries: ids
            .iter()
            .enumerate()
            .map(|(i, id)| RankedEntry { route_id: id.to_string(), score: 1.0 - i as f64 * 0.01 })
            .collect(),
    }
}

#[test]
fn cumulative_mean_examples() {
    assert_eq!(cumulative_mean(&[2.0, 4.0, 6.0]).unwrap(), vec![2.0, 3.0, 4.0]);
    assert!(cumulative_mean(&[7.5; 40]).unwrap().iter().all(|v| *v == 7.5));
    assert!(cumulative_mean(&[]).is_err());
}

#[test]
fn running_mean_is_stable_at_a_million() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let values: Vec<f64> = (0..1_000_000).map(|_| rand::Rng::random_range(&mut rng, 0.0..1e5)).collect();
    let got = cumulative_mean(&values).unwrap();
    let mut sum = 0.0f64;
    for (k, (v, c)) in values.iter().zip(&got).enumerate() {
        sum += v;
        let naive = sum / (k + 1) as f64;
        assert!((c - naive).abs() <= 1e-9 * naive.abs(), "k={}: {c} vs {naive}", k + 1);
    }
}

#[test]
fn single_document_and_reversed_ranking() {
    let attrs: HashMap<String, RouteAttributes> =
        [attr("a", 1000.0, 10.0), attr("b", 2000.0, 60.0), attr("c", 4000.0, 0.0)]
            .into_iter()
            .map(|a| (a.route_id.clone(), a))
            .collect();
    let q = Query::new("q", "what is a short walk", vec![AttributeName::LengthM]).unwrap();

    let one: HashMap<_, _> = [("q".to_string(), ranking("q", &["b"]))].into();
    let r = evaluate(&one, &attrs, &[q.clone()], Execution::Sequential).unwrap();
    assert_eq!(r.curves[0].values, vec![2000.0]);

    let fwd: HashMap<_, _> = [("q".to_string(), ranking("q", &["a", "b", "c"]))].into();
    let rev: HashMap<_, _> = [("q".to_string(), ranking("q", &["c", "b", "a"]))].into();
    let f = evaluate(&fwd, &attrs, &[q.clone()], Execution::Sequential).unwrap();
    let b = evaluate(&rev, &attrs, &[q.clone()], Execution::Sequential).unwrap();
    assert_eq!(f.curves[0].values[0], 1000.0);
    assert_eq!(b.curves[0].values[0], 4000.0);
    assert!(close(f.curves[0].values[2], b.curves[0].values[2]));

    let missing: HashMap<_, _> = [("q".to_string(), ranking("q", &["a", "zz"]))].into();
    assert!(evaluate(&missing, &attrs, &[q], Execution::Sequential).is_err());
}

#[test]
fn boolean_attributes_average_as_proportions() {
    let attrs: HashMap<String, RouteAttributes> = [attr("a", 1000.0, 80.0), attr("b", 1000.0, 0.0)]
        .into_iter()
        .map(|a| (a.route_id.clone(), a))
        .collect();
    let q = Query::new("q", "what is a walk by the seaside", vec![AttributeName::IsCoastal]).unwrap();
    let rk: HashMap<_, _> = [("q".to_string(), ranking("q", &["a", "b"]))].into();
    let r = evaluate(&rk, &attrs, &[q], Execution::Sequential).unwrap();
    assert_eq!(r.curves[0].values, vec![1.0, 0.5]);
}

fn csv_of(report: &EvaluationReport) -> String {
    let mut buf = Vec::new();
    write_curves_csv(report, None, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn csv_rows_and_round_trip() {
    let empty = EvaluationReport {
        curves: vec![],
        summary: trailrank_core::eval::CorpusSummary::from_attributes([]),
        provider: None,
    };
    assert_eq!(csv_of(&empty), "query_id,attribute,k,cumulative_mean\n");

    let attrs: HashMap<String, RouteAttributes> =
        [attr("a", 1234.5678, 0.0), attr("b", 2000.0 / 3.0, 0.0), attr("c", 1e-7, 0.0)]
            .into_iter()
            .map(|a| (a.route_id.clone(), a))
            .collect();
    let qs = vec![
        Query::new("q1", "x", vec![AttributeName::LengthM]).unwrap(),
        Query::new("q2", "y", vec![AttributeName::LengthM]).unwrap(),
    ];
    let rk: HashMap<_, _> =
        [("q1".to_string(), ranking("q1", &["a", "b", "c"])), ("q2".to_string(), ranking("q2", &["c", "a", "b"]))].into();
    let report = evaluate(&rk, &attrs, &qs, Execution::Parallel).unwrap();
    let text = csv_of(&report);
    assert_eq!(text.lines().count(), 1 + 6);
    let back = read_curves_csv(text.as_bytes()).unwrap();
    for c in &report.curves {
        let rows = &back[&(c.query_id.clone(), c.attribute)];
        assert_eq!(rows.len(), c.len());
        for (k, v) in rows {
            assert!(close(*v, c.values[k - 1]));
        }
    }
}

/// Full chain on a synthetic corpus, checked against a from-scratch recomputation.
#[test]
fn end_to_end_recomputation() {
    let c = generate_corpus(&SynthSpec::default().with_routes(1000).with_seed(31)).unwrap();
    let attrs: Vec<RouteAttributes> =
        compute_attributes_batch(&c.routes, &c.layers, &c.grid, &c.places, &AttributeParams::default(), Execution::Parallel)
            .into_iter()
            .map(Result::unwrap)
            .collect();
    let cfg = DescriptionConfig::with_seed(31);
    let docs: Vec<(String, EmbeddingVector)> = attrs
        .iter()
        .map(|a| (a.route_id.clone(), reference_embed(&generate_description(a, &cfg).text, 256).unwrap()))
        .collect();
    let queries = builtin_queries();
    let rankings: HashMap<String, RankedList> = queries
        .iter()
        .map(|q| {
            let v = reference_embed(&q.text, 256).unwrap();
            (q.id.clone(), rank_documents(&q.id, &v, &docs, Execution::Parallel).unwrap())
        })
        .collect();
    let by_id: HashMap<String, RouteAttributes> = attrs.iter().map(|a| (a.route_id.clone(), a.clone())).collect();
    let report = evaluate(&rankings, &by_id, &queries, Execution::Parallel).unwrap();
    assert_eq!(report.curves.len(), queries.iter().map(|q| q.relevant_attributes.len()).sum::<usize>());

    for q in &queries {
        let qv = reference_embed(&q.text, 256).unwrap();
        let mut scored: Vec<(f64, usize)> = docs
            .iter()
            .enumerate()
            .map(|(i, (_, v))| {
                let dot: f64 = qv.values().iter().zip(v.values()).map(|(a, b)| f64::from(*a) * f64::from(*b)).sum();
                (dot / (qv.norm() * v.norm()), i)
            })
            .collect();
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(docs[a.1].0.cmp(&docs[b.1].0)));
        for &name in &q.relevant_attributes {
            let curve = report.curve(&q.id, name).unwrap();
            let mut sum = 0.0;
            for (k, (_, i)) in scored.iter().enumerate() {
                sum += attrs[*i].value(name);
                assert!(close(curve.values[k], sum / (k + 1) as f64), "{} {name} k={}", q.id, k + 1);
            }
            let mean = attrs.iter().map(|a| a.value(name)).sum::<f64>() / attrs.len() as f64;
            assert!(close(*curve.values.last().unwrap(), mean));
            assert_eq!(curve.values[0], attrs[scored[0].1].value(name));
        }
    }
}

#[test]
fn plot_is_well_formed_xml() {
    let curve = trailrank_core::eval::CumulativeCurve {
        query_id: "q1".into(),
        query_text: "walks <near> \"water\" & more".into(),
        attribute: AttributeName::AlongSurfacewater,
        values: cumulative_mean(&(0..500).map(|i| (i % 7) as f64).collect::<Vec<_>>()).unwrap(),
    };
    let svg = render_svg(&[&curve], "along_surfacewater", &PlotLayout::default());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_bound_holds(values in prop::collection::vec(-50.0f64..1e4, 1..400)) {
        let c = cumulative_mean(&values).unwrap();
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        for k in 1..c.len() {
            prop_assert!((c[k] - c[k - 1]).abs() <= (hi - lo) / (k + 1) as f64 + 1e-9);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!(close(c[c.len() - 1], mean));
    }

    #[test]
    fn insertion_order_does_not_change_curves(seed in any::<u64>(), n in 1usize..120) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut rows: Vec<RouteAttributes> =
            (0..n).map(|i| attr(&format!("r{i}"), 1000.0 + (i * 37 % 101) as f64 * 13.7, (i * 11 % 100) as f64)).collect();
        let ids: Vec<String> = rows.iter().map(|a| a.route_id.clone()).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let qs = vec![Query::new("q", "t", vec![AttributeName::LengthM, AttributeName::AlongCoast, AttributeName::IsCoastal]).unwrap()];
        let rk: HashMap<_, _> = [("q".to_string(), ranking("q", &id_refs))].into();

        let first: HashMap<String, RouteAttributes> = rows.iter().map(|a| (a.route_id.clone(), a.clone())).collect();
        rows.shuffle(&mut rng);
        let second: HashMap<String, RouteAttributes> = rows.iter().map(|a| (a.route_id.clone(), a.clone())).collect();
        let a = evaluate(&rk, &first, &qs, Execution::Parallel).unwrap();
        let b = evaluate(&rk, &second, &qs, Execution::Sequential).unwrap();
        for (x, y) in a.curves.iter().zip(&b.curves) {
            let bits = |c: &trailrank_core::eval::CumulativeCurve| c.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(x), bits(y));
        }
    }
}
