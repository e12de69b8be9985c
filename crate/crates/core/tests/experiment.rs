use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use trackstat::experiment::*;
use trackstat::lattice::Counter;
use trackstat::surface::trace_components;
use trackstat::tracks::{CarriedWeights, TrainTrack};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn track(name: &str) -> TrainTrack {
    TrainTrack::load(&data(name)).unwrap()
}

/// Points of the once-punctured torus track of length at most `l`, listed
/// directly from its switch conditions.
fn toy_points(l: u64) -> Vec<Vec<u64>> {
    let t = track("s11.track");
    let rows = t.switch_rows();
    let mut out = Vec::new();
    for a in 1..=l {
        for b in 1..=l {
            for c in 1..=l {
                for d in 1..=l {
                    let x = [a, b, c, d];
                    if x.iter().sum::<u64>() <= l
                        && rows.iter().all(|r| r.iter().zip(&x).map(|(&s, &v)| s * v as i64).sum::<i64>() == 0)
                    {
                        out.push(x.to_vec());
                    }
                }
            }
        }
    }
    out
}

#[test]
fn sampler_is_uniform_on_a_small_track() {
    for kind in [SamplerKind::Cone, SamplerKind::Lex] {
        let points = toy_points(8);
        assert_eq!(points.len(), 6);
        let sampler = Sampler::new(Arc::new(track("s11.track")), 8, kind).unwrap();
        assert_eq!(sampler.count(), 6);
        let mut counter = Counter::new();
        let draws = 30_000u64;
        let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
        for i in 0..draws {
            let (w, _) = sampler.sample(&mut sample_rng(7, i), &mut counter).unwrap();
            *seen.entry(w.0).or_insert(0) += 1;
        }
        assert!(seen.keys().all(|k| points.contains(k)));
        let e = draws as f64 / points.len() as f64;
        let chi: f64 = points
            .iter()
            .map(|p| (seen.get(p).copied().unwrap_or(0) as f64 - e).powi(2) / e)
            .sum();
        let p = 1.0 - ChiSquared::new(5.0).unwrap().cdf(chi);
        assert!(p > 0.001, "chi-square {chi}, p {p}");
    }
}

#[test]
fn index_map_is_a_bijection() {
    let sampler = Sampler::new(Arc::new(track("s11.track")), 20, SamplerKind::Cone).unwrap();
    let mut expect = toy_points(20);
    let mut counter = Counter::new();
    let mut got: Vec<Vec<u64>> = (0..sampler.count()).map(|i| sampler.weights(i, &mut counter).unwrap().0).collect();
    expect.sort();
    got.sort();
    assert_eq!(got, expect);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut config = ExperimentConfig::new(data("s12.track"), 200, 400, 99);
    let reports: Vec<DistributionReport> = [1, 2, 4]
        .into_iter()
        .map(|w| {
            config.workers = w;
            run(&config).unwrap()
        })
        .collect();
    for r in &reports[1..] {
        assert_eq!(r.counts, reports[0].counts);
        assert_eq!(r.excluded, reports[0].excluded);
    }
    config.seed = 100;
    assert_ne!(run(&config).unwrap().counts, reports[0].counts);
}

#[test]
fn samples_are_accounted_for() {
    let t = track("s12.track");
    for filter in [Filter::None, Filter::Curves, Filter::Primitive] {
        let mut config = ExperimentConfig::new(data("s12.track"), 150, 300, 3);
        config.filter = filter;
        let r = run(&config).unwrap();
        assert_eq!(r.drawn, r.retained + r.filtered_out + r.errored);
        assert_eq!(r.counts.values().sum::<u64>(), r.retained);
        if filter == Filter::None {
            assert_eq!(r.filtered_out, 0);
        } else {
            assert!(r.filtered_out > 0);
        }
    }
    // the filters agree with component tracing of the drawn samples
    let sampler = Sampler::new(Arc::new(t), 150, SamplerKind::Cone).unwrap();
    let mut counter = Counter::new();
    let (mut curves, mut primitive) = (0, 0);
    for i in 0..300 {
        let (_, c) = sampler.sample(&mut sample_rng(3, i), &mut counter).unwrap();
        let comps = trace_components(sampler.track().base(), &c).unwrap();
        curves += (comps.len() == 1) as u64;
        let mut distinct = comps.clone();
        distinct.sort();
        distinct.dedup();
        primitive += (distinct.len() == comps.len()) as u64;
    }
    let mut config = ExperimentConfig::new(data("s12.track"), 150, 300, 3);
    config.filter = Filter::Curves;
    assert_eq!(run(&config).unwrap().retained, curves);
    config.filter = Filter::Primitive;
    assert_eq!(run(&config).unwrap().retained, primitive);
}

#[test]
fn doubled_curves_report_multiplicity_two() {
    let t = track("s2.track");
    let w = CarriedWeights(vec![2, 2, 2, 2, 4, 4, 4, 2, 4, 2, 2, 4, 4, 2, 2]);
    let k = classify(t.base(), &t.to_multicurve(&w).unwrap(), true).unwrap();
    assert_eq!(k.name.to_string(), "([1], [{2}])");
    assert_eq!(k.num_components, 2);
    assert!(!k.primitive);
}

#[test]
fn bad_configurations_are_rejected() {
    let config = ExperimentConfig::new(data("s12.track"), 200, 0, 1);
    assert!(matches!(run(&config), Err(ExperimentError::Config(_))));
    let config = ExperimentConfig::new(data("s12.track"), 3, 10, 1);
    assert!(matches!(run(&config), Err(ExperimentError::Config(_))));
    let config = ExperimentConfig::new(data("missing.track"), 200, 10, 1);
    assert!(matches!(run(&config), Err(ExperimentError::Track(_))));
    assert!("everything".parse::<Filter>().is_err());
}

fn reference_counts() -> BTreeMap<String, u64> {
    [
        ("([0], [{1,1}])", 720_649),
        ("([1], [{1}])", 600_700),
        ("([0, 0], [{1}, {1}, {1}])", 59_921),
        ("([0, 0], [{}, {1,1,1}, {}])", 40_053),
        ("([0, 1], [{1}, {1}, {}])", 29_956),
        ("([1, 1], [{}, {1}, {}])", 12_496),
    ]
    .into_iter()
    .map(|(n, c)| (n.to_string(), c))
    .collect()
}

#[test]
fn reference_counts_match_the_expected_table() {
    let expected = load_expected(&data("s2_expected.csv")).unwrap();
    assert_eq!(expected.len(), 6);
    assert!((expected.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() < 1e-12);
    let cmp = compare(&reference_counts(), &expected).unwrap();
    assert_eq!(cmp.degrees_of_freedom, 5);
    for row in &cmp.rows {
        assert!(row.deviation.abs() < 0.05, "{row:?}");
    }
    assert!(cmp.unexpected.is_empty());
    let uniform: BTreeMap<String, u64> = expected.iter().map(|(n, _)| (n.clone(), 1000)).collect();
    assert!(compare(&uniform, &expected).unwrap().p_value < 0.001);
    // names outside the table are reported, not counted
    let mut extra = reference_counts();
    extra.insert("([0], [{2}])".into(), 7);
    let c = compare(&extra, &expected).unwrap();
    assert_eq!(c.unexpected, vec![("([0], [{2}])".to_string(), 7)]);
    assert_eq!(c.chi_square, cmp.chi_square);
}

#[test]
fn expected_tables_are_validated() {
    let good = "name,fraction\n\"([0], [{1, 1}])\",1/2\n\"([1], [{1}])\",0.5\n";
    let e = read_expected(good.as_bytes()).unwrap();
    assert_eq!(e[0], ("([0], [{1,1}])".to_string(), 0.5));
    assert!(read_expected("name,fraction\nnonsense,1\n".as_bytes()).is_err());
    assert!(read_expected("name,fraction\n\"([1], [{1}])\",x\n".as_bytes()).is_err());
    let short = read_expected("name,fraction\n\"([1], [{1}])\",1/3\n".as_bytes()).unwrap();
    assert!(matches!(compare(&reference_counts(), &short), Err(ExperimentError::Expected(_))));
}

#[test]
fn ratio_estimates_cover_the_point_value() {
    let mut config = ExperimentConfig::new(data("s12.track"), 200, 400, 5);
    config.filter = Filter::Curves;
    let r = run(&config).unwrap();
    let rows = r.rows();
    assert!(rows.len() >= 2);
    let k = r.ratio(&rows[0].name, &rows[1].name, 0.99);
    assert!(k.low <= k.value && k.value <= k.high);
    let (lo, hi) = wilson_interval(0, 10, 0.95);
    // with no successes the upper end is z^2 / (n + z^2)
    let z2 = 1.959_963_984_540_054f64.powi(2);
    assert!(lo.abs() < 1e-12);
    assert!((hi - z2 / (10.0 + z2)).abs() < 1e-9);
}

#[test]
fn csv_and_json_output() {
    let config = ExperimentConfig::new(data("s12.track"), 150, 200, 8);
    let r = run(&config).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,count,fraction"));
    assert_eq!(lines.count(), r.counts.len());
    let v: serde_json::Value = serde_json::from_str(&r.to_json(None).unwrap()).unwrap();
    assert_eq!(v["drawn"], 200);
    assert_eq!(v["seed"], 8);
    assert_eq!(v["rows"].as_array().unwrap().len(), r.counts.len());
    assert!(v["comparison"].is_null());
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_trackstat")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn command_line() {
    let s11 = data("s11.track");
    let s11 = s11.to_str().unwrap();
    let (code, out, err) = cli(&["count", "--track", s11, "--length", "20"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), toy_points(20).len().to_string());
    assert!(err.contains("carried dimension 2"));

    let s2 = data("s2.track");
    let s2 = s2.to_str().unwrap();
    let (code, out, _) = cli(&["classify", "--track", s2, "--weights", "1,1,1,1,2,2,2,1,2,1,1,2,2,1,1"]);
    assert_eq!((code, out.trim()), (0, "([1], [{1}])"));
    let (code, _, _) = cli(&["classify", "--track", s2, "--weights", "1,2,x"]);
    assert_eq!(code, 2);
    let (code, _, _) = cli(&["classify", "--track", s2, "--weights", "1,1,1"]);
    assert_eq!(code, 2);
    let (code, _, _) = cli(&["count", "--track", "/no/such/file.track", "--length", "20"]);
    assert_eq!(code, 1);
    let (code, _, _) = cli(&["run", "--track", s2, "--length", "100", "--samples", "0"]);
    assert_eq!(code, 2);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "name,fraction\n\"([1], [{{1}}])\",1/3").unwrap();
    let (code, _, _) = cli(&[
        "run", "--track", s2, "--length", "100", "--samples", "5",
        "--expected", bad.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2);

    let expected = data("s2_expected.csv");
    let (code, out, _) = cli(&[
        "run", "--track", s2, "--length", "200", "--samples", "40", "--seed", "4",
        "--filter", "primitive", "--format", "json", "--workers", "2",
        "--expected", expected.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["drawn"], 40);
    assert_eq!(v["comparison"]["degrees_of_freedom"], 5);
}

#[test]
fn fractions_settle_as_samples_grow() {
    // the first n draws of a 4n run are the n-draw run
    let small = run(&ExperimentConfig::new(data("s12.track"), 400, 500, 17)).unwrap();
    let large = run(&ExperimentConfig::new(data("s12.track"), 400, 2000, 17)).unwrap();
    let mut cells = 0;
    let mut close = 0;
    for name in large.counts.keys().chain(small.counts.keys()) {
        let (a, b) = (small.fraction(name), large.fraction(name));
        let p = b.max(1.0 / large.retained as f64);
        let se = (p * (1.0 - p) / small.retained as f64).sqrt();
        cells += 1;
        close += ((a - b).abs() < 3.0 * se) as u32;
    }
    assert!(close as f64 >= 0.99 * cells as f64, "{close} of {cells} cells within 3 standard errors");
    let mut prefix = ExperimentConfig::new(data("s12.track"), 400, 2000, 17);
    prefix.workers = 3;
    assert_eq!(run(&prefix).unwrap().counts, large.counts);
}
