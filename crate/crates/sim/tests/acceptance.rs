//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use biclique_core::engine::{
    decompose_greedy, exists_biclique, max_edge_biclique_exact, validation_counts, DecomposeConfig,
};
use biclique_core::exposure::{Assignment, ClusterStructure, ExposureMap, Label};
use biclique_core::graph::{biclique_existence_bound, NullExposureGraph};
use biclique_core::rng::{self, Rng};
use biclique_core::test::{BicliqueTest, Mode, TestConfig, TestStatistic};
use biclique_sim::{
    ci_coverage, spatial_power_on, ClusteredDgp, ClusteredStudy, CoverageConfig, GaussianCloud, HotspotDesign,
    PowerEstimate, PowerModel, SpatialDgp, SpatialScenario, StudyConfig,
};
use rand::Rng as _;

const ALPHAS: usize = 99;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn fmt(e: &PowerEstimate) -> String {
    format!("{:.3}+-{:.3} (n={}, untestable={})", e.power, e.se, e.testable(), e.untestable)
}

/// `hi` is not below `lo` by more than two combined standard errors.
fn not_below(hi: &PowerEstimate, lo: &PowerEstimate) -> bool {
    hi.power >= lo.power - 2.0 * (hi.se * hi.se + lo.se * lo.se).sqrt()
}

fn level(v: u32) -> Label {
    Label::Level(v)
}

/// Sum of outcomes over `b`-exposed focal units; defined for every assignment.
fn sum_b() -> TestStatistic {
    TestStatistic::custom("sum_b", |s| {
        Ok(s.labels.iter().zip(s.outcomes).filter(|(l, _)| **l == Label::Level(1)).map(|(_, y)| y).sum())
    })
}

/// Checks P(pval <= alpha | C) <= alpha over every biclique and level.
fn conditional_violations(test: &BicliqueTest, y: &[f64]) -> usize {
    let config = TestConfig { mode: Mode::Exact, ..TestConfig::default() };
    let stat = sum_b();
    let mut violations = 0;
    for b in test.decomposition().bicliques() {
        let w: Vec<f64> = b.assignments.iter().map(|&j| test.weights()[j]).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = b
            .assignments
            .iter()
            .map(|&j| test.test(j, y, &stat, &config, &mut rng::seeded(0)).unwrap().pval)
            .collect();
        for k in 1..=ALPHAS {
            let alpha = k as f64 / 100.0;
            let mass: f64 = p.iter().zip(&w).filter(|(p, _)| **p <= alpha).map(|(_, w)| w).sum();
            if mass / total > alpha * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    violations
}

fn random_instance(r: &mut Rng) -> Option<(BicliqueTest, Vec<f64>)> {
    let n = r.random_range(2..=10);
    let h = r.random_range(2..=16usize);
    let mut seen = std::collections::HashSet::new();
    let mut zs = Vec::new();
    while zs.len() < h && seen.len() < (1usize << n) {
        let bits: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        if seen.insert(bits.clone()) {
            zs.push(Assignment::from_bits(&bits).unwrap());
        }
    }
    let table: HashMap<Assignment, Vec<Label>> =
        zs.iter().map(|z| (z.clone(), (0..n).map(|_| level(r.random_range(0..3))).collect())).collect();
    let map = ExposureMap::custom(n, move |i, z| table[z][i].clone());
    let weights: Vec<f64> = zs.iter().map(|_| r.random_range(0.1..1.0)).collect();
    let g = NullExposureGraph::build(zs, &map, &[level(0), level(1)]).unwrap();
    let test = BicliqueTest::new(g, weights, &DecomposeConfig::default()).ok()?;
    let y = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    Some((test, y))
}

fn criterion_1() -> Verdict {
    let one_hots: Vec<Assignment> = (0..4).map(|i| Assignment::from_treated(4, &[i]).unwrap()).collect();
    let map = ExposureMap::clustered(ClusterStructure::new(&[0, 0, 1, 1]).unwrap());
    let g = NullExposureGraph::build(one_hots, &map, &[level(0), level(1)]).unwrap();
    let fig1 = BicliqueTest::new(g, vec![0.25; 4], &DecomposeConfig::default()).unwrap();
    let mut violations = conditional_violations(&fig1, &[0.0, 0.0, 0.0, 1.0]);
    let mut r = rng::seeded(101);
    let mut instances = 0;
    while instances < 50 {
        if let Some((test, y)) = random_instance(&mut r) {
            violations += conditional_violations(&test, &y);
            instances += 1;
        }
    }
    verdict(violations == 0, format!("Figure-1 plus {instances} random instances, {violations} violations"))
}

fn criteria_2_3() -> (Verdict, Verdict) {
    let mut r = rng::seeded(202);
    let dgp = ClusteredDgp::reference(20).with_spillover(0.0);
    let study = ClusteredStudy::new(dgp, StudyConfig::clustered(), &mut r).unwrap();
    let stats = study.study().stats().unwrap();
    let null = study.power(0.0, 500, 0.05, &mut r).unwrap();
    let v2 = verdict(
        (0.03..=0.07).contains(&null.power),
        format!(
            "rejection {} ; {} bicliques, {:.2} focal units per cluster",
            fmt(&null),
            stats.n_bicliques,
            stats.focal_units_per_cluster(20)
        ),
    );

    let taus = [0.0, 0.25, 0.5, 0.75, 1.0];
    let curve: Vec<PowerEstimate> = taus.iter().map(|&t| study.power(t, 400, 0.05, &mut r).unwrap()).collect();
    let monotone = curve.windows(2).all(|w| not_below(&w[1], &w[0]));
    let plain = study.power(0.3, 400, 0.05, &mut r).unwrap();
    let assisted = study.design_assisted_power(0.3, 400, 0.05, &mut r).unwrap();
    let dominates = not_below(&assisted, &plain);
    let listing: Vec<String> = taus.iter().zip(&curve).map(|(t, e)| format!("{t}:{:.3}", e.power)).collect();
    let v3 = verdict(
        monotone && dominates,
        format!(
            "power [{}] monotone={monotone}; at 0.3 assisted {} vs plain {}",
            listing.join(" "),
            fmt(&assisted),
            fmt(&plain)
        ),
    );
    (v2, v3)
}

fn random_graph(r: &mut Rng) -> NullExposureGraph {
    loop {
        let n = r.random_range(1..=10);
        let h = r.random_range(1..=10);
        let p: f64 = r.random_range(0.2..0.9);
        let rows: Vec<Vec<usize>> = (0..h).map(|_| (0..n).filter(|_| r.random::<f64>() < p).collect()).collect();
        if rows.iter().any(|row| !row.is_empty()) {
            return NullExposureGraph::from_adjacency(n, &rows).unwrap();
        }
    }
}

fn criterion_4() -> Verdict {
    let mut r = rng::seeded(404);
    let mut mismatches = 0;
    for _ in 0..200 {
        let g = random_graph(&mut r);
        let greedy = decompose_greedy(&g, &DecomposeConfig::default()).unwrap();
        let exact = max_edge_biclique_exact(&g).unwrap();
        if greedy.bicliques()[0].n_edges() != exact.n_edges() {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("200 graphs, {mismatches} mismatches"))
}

/// Every multiset of `h` rows over `n` units, as row bitmasks.
fn row_multisets(n: usize, h: usize, mut f: impl FnMut(&[u32])) {
    fn rec(start: u32, end: u32, rows: &mut Vec<u32>, h: usize, f: &mut impl FnMut(&[u32])) {
        if rows.len() == h {
            f(rows);
            return;
        }
        for m in start..end {
            rows.push(m);
            rec(m, end, rows, h, f);
            rows.pop();
        }
    }
    rec(0, 1 << n, &mut Vec::new(), h, &mut f);
}

fn criterion_5() -> Verdict {
    let lo = biclique_existence_bound(300, 100_000, 30, 500).unwrap().density;
    let hi = biclique_existence_bound(300, 100_000, 100, 500).unwrap().density;
    let values_ok = (lo - 0.85).abs() <= 0.01 && (hi - 0.96).abs() <= 0.01;
    let (mut graphs, mut checked, mut unsound) = (0usize, 0usize, 0usize);
    for n_units in 2..=5 {
        for n_assign in 2..=5 {
            let mut bounds = Vec::new();
            for n in 1..n_units {
                for h in 1..n_assign {
                    bounds.push((n, h, biclique_existence_bound(n_units, n_assign, n, h).unwrap()));
                }
            }
            row_multisets(n_units, n_assign, |rows| {
                graphs += 1;
                let edges: usize = rows.iter().map(|m| m.count_ones() as usize).sum();
                let due: Vec<(usize, usize)> =
                    bounds.iter().filter(|(_, _, b)| b.guarantees(edges)).map(|&(n, h, _)| (n, h)).collect();
                if due.is_empty() {
                    return;
                }
                let adj: Vec<Vec<usize>> =
                    rows.iter().map(|&m| (0..n_units).filter(|&i| m >> i & 1 == 1).collect()).collect();
                let g = NullExposureGraph::from_adjacency(n_units, &adj).unwrap();
                for (n, h) in due {
                    checked += 1;
                    if !exists_biclique(&g, n, h).unwrap() {
                        unsound += 1;
                    }
                }
            });
        }
    }
    verdict(
        values_ok && unsound == 0,
        format!("thresholds {lo:.3} and {hi:.3}; {graphs} graphs up to 5x5, {checked} guarantees checked, {unsound} unsound"),
    )
}

fn criterion_6() -> Verdict {
    let mut r = rng::seeded(606);
    let mut run = |n, m, tau| biclique_sim::theory_power(&PowerModel { n, m, tau, alpha: 0.05 }, 2000, &mut r).unwrap();
    let null = run(20, 1000, 0.0);
    let null_ok = (null.power - 0.05).abs() <= 0.015;
    let (small, large) = (run(20, 1000, 0.5), run(100, 1000, 0.5));
    let sens_ok = large.power > small.power;
    let asym: Vec<PowerEstimate> = [20, 100, 1000].iter().map(|&m| run(20, m, 2.0)).collect();
    let asym_ok = asym.windows(2).all(|w| not_below(&w[1], &w[0]));
    let listing: Vec<String> = asym.iter().map(|e| format!("{:.3}", e.power)).collect();
    verdict(
        null_ok && sens_ok && asym_ok,
        format!(
            "null {:.3}; n=20 {:.3} vs n=100 {:.3}; tau=2 over m=20,100,1000 [{}]",
            null.power,
            small.power,
            large.power,
            listing.join(" ")
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut r = rng::seeded(707);
    let cloud = GaussianCloud::city();
    let net = cloud.sample(&mut r).unwrap();
    let hotspots = HotspotDesign::random(cloud.n_units, 52, 21, &mut r).unwrap();
    let scenario = SpatialScenario::new(net, hotspots, StudyConfig::spatial());
    let dgp = SpatialDgp::default();
    let null_dgp = dgp.clone().with_tau_scale(0.0);
    let mut null_ok = true;
    let (mut null_row, mut alt_row) = (Vec::new(), Vec::new());
    let mut alt = HashMap::new();
    for &radius in &dgp.radii {
        let study = scenario.study(radius, &mut r).unwrap();
        let null = spatial_power_on(&study, &scenario, &null_dgp, radius, 500, 0.05, &mut r).unwrap().estimate;
        null_ok &= null.testable() > 0 && (0.03..=0.07).contains(&null.power);
        let point = spatial_power_on(&study, &scenario, &dgp, radius, 500, 0.05, &mut r).unwrap();
        null_row.push(format!("{:.3}", null.power));
        alt_row.push(format!("{radius}:{:.3}/{:.0}", point.estimate.power, point.mean_focals));
        alt.insert(radius as u32, point.estimate);
    }
    let (short, long) = (&alt[&75], &alt[&275]);
    let gap = long.power - short.power;
    let se = (long.se * long.se + short.se * short.se).sqrt();
    let ordered = short.testable() > 0 && long.testable() > 0 && gap >= 2.0 * se;
    verdict(
        ordered && null_ok,
        format!(
            "r=275 {} vs r=75 {}; power/focals by radius [{}]; null row [{}]",
            fmt(long),
            fmt(short),
            alt_row.join(" "),
            null_row.join(" ")
        ),
    )
}

fn criterion_9() -> Verdict {
    let res = ci_coverage(&CoverageConfig::default(), 200, &mut rng::seeded(909)).unwrap();
    verdict(
        res.rate >= 0.93,
        format!(
            "coverage {:.3} over {} testable reps, mean width {:.3}, {} empty intervals",
            res.rate,
            res.reps - res.untestable,
            res.mean_width,
            res.empty
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut timed = |k: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {k} {}: {name}: {} [{secs:.1}s]", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((k, name, v, secs));
    };
    timed(1, "exact conditional validity", &mut criterion_1);
    let (v2, v3) = {
        let t = Instant::now();
        let out = criteria_2_3();
        println!("(clustered study took {:.1}s)", t.elapsed().as_secs_f64());
        out
    };
    let mut v2 = Some(v2);
    let mut v3 = Some(v3);
    timed(2, "clustered type-I error", &mut || v2.take().unwrap());
    timed(3, "clustered power trend", &mut || v3.take().unwrap());
    timed(4, "greedy first pick equals exact max-edge biclique", &mut criterion_4);
    timed(5, "density bound", &mut criterion_5);
    timed(6, "theoretical power model", &mut criterion_6);
    timed(7, "spatial radius profile", &mut criterion_7);
    timed(9, "interval coverage", &mut criterion_9);
    let (validated, violations) = validation_counts();
    timed(8, "decomposition invariants", &mut || {
        verdict(validated > 0 && violations == 0, format!("{validated} decompositions validated, {violations} violations"))
    });
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
