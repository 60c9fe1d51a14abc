//! Conditional randomization tests within bicliques.

mod statistic;

pub use ci::{invert_additive_ci, shift_outcomes, ConfidenceInterval};
pub use pvalue::{pvalue_exact, pvalue_monte_carlo, Sidedness, TiePolicy};
pub use residual::residualize_outcomes;
pub use runner::{
    candidate_set, randomization_pvalue, run_biclique_test, run_design_assisted_test, run_exclusion_test, BicliqueTest,
    Draw, ExclusionTest, Mode, ModeUsed, RandomizationFrame, TestConfig, TestReport, DEFAULT_DRAWS, DEFAULT_EXACT_LIMIT,
};
pub use statistic::{diff_in_means, CustomStatistic, DiffInMeans, StatInput, TestStatistic};

#[cfg(test)]
mod tests {
    use rand::Rng as _;

    use super::*;
    use crate::engine::{decompose_design_assisted, Biclique, DecomposeConfig};
    use crate::exposure::{Assignment, ClusterStructure, Design, EnumeratedDesign, ExposureMap, Label, TwoStageCluster};
    use crate::graph::{ExposureFamily, ExposureTable, NullExposureGraph};
    use crate::{rng, Error};

    fn one_hots(n: usize) -> Vec<Assignment> {
        (0..n).map(|i| Assignment::from_treated(n, &[i]).unwrap()).collect()
    }

    fn figure1_map() -> ExposureMap {
        ExposureMap::clustered(ClusterStructure::new(&[0, 0, 1, 1]).unwrap())
    }

    fn l(v: u32) -> Label {
        Label::Level(v)
    }

    fn figure1_test(floors: (usize, usize)) -> BicliqueTest {
        let g = NullExposureGraph::build(one_hots(4), &figure1_map(), &[l(0), l(1)]).unwrap();
        BicliqueTest::new(g, vec![0.25; 4], &DecomposeConfig::with_floors(floors.0, floors.1)).unwrap()
    }

    /// Sum of outcomes of `b`-exposed focal units: always defined.
    fn sum_b() -> TestStatistic {
        TestStatistic::custom("sum_b", |s| Ok(s.labels.iter().zip(s.outcomes).filter(|(l, _)| **l == Label::Level(1)).map(|(_, y)| y).sum()))
    }

    #[test]
    fn diff_in_means_examples() {
        let labels = [l(0), l(0), l(1), l(1)];
        let d = diff_in_means(&labels, &[1.0, 2.0, 3.0, 5.0], &l(0), &l(1), 0).unwrap();
        assert_eq!(d.value, 2.5);
        assert_eq!((d.n_a, d.n_b), (2, 2));
        let swapped = diff_in_means(&labels, &[1.0, 2.0, 3.0, 5.0], &l(1), &l(0), 0).unwrap();
        assert_eq!(swapped.value, -2.5);
        assert_eq!(diff_in_means(&labels, &[4.0; 4], &l(0), &l(1), 0).unwrap().value, 0.0);
        assert!(matches!(diff_in_means(&labels, &[0.0; 4], &l(0), &l(2), 3), Err(Error::EmptyGroup { assignment: 3, .. })));
        assert!(TestStatistic::diff_in_means(l(1), l(1)).is_err());
    }

    #[test]
    fn pvalue_tie_policies() {
        let stats = [1.0, 1.0, 1.0];
        let w = [1.0, 2.0, 1.0];
        assert_eq!(pvalue_exact(1.0, &stats, &w, TiePolicy::Inclusive, Sidedness::Greater), 1.0);
        assert_eq!(pvalue_exact(1.0, &stats, &w, TiePolicy::Strict, Sidedness::Greater), 0.0);
        assert_eq!(pvalue_exact(-2.0, &[-2.0, 1.0, 3.0], &w, TiePolicy::Inclusive, Sidedness::TwoSided), 0.5);
        assert_eq!(pvalue_monte_carlo(0.0, &[1.0, -1.0, 0.0, -3.0], TiePolicy::Inclusive, Sidedness::Greater), 0.6);
        assert_eq!(pvalue_monte_carlo(0.0, &[1.0, -1.0, 0.0, -3.0], TiePolicy::Strict, Sidedness::Greater), 0.25);
    }

    #[test]
    fn constant_outcomes_give_one() {
        let t = figure1_test((2, 2));
        let stat = sum_b();
        for obs in 0..4 {
            let r = t.test(obs, &[3.0; 4], &stat, &TestConfig::default(), &mut rng::seeded(0)).unwrap();
            assert!(r.pval == 1.0 || r.t_obs == 0.0);
        }
        let design = Design::two_stage(ClusterStructure::new(&[0, 0, 1, 1]).unwrap(), 1).unwrap();
        let mut r = rng::seeded(1);
        let z = Assignment::from_treated(4, &[0]).unwrap();
        let rep = run_biclique_test(&design, &figure1_map(), &[l(0), l(1)], &z, &[1.0; 4], &stat, &TestConfig::default(), &mut r).unwrap();
        assert_eq!(rep.pval, 1.0);
    }

    #[test]
    fn empty_group_refused() {
        let t = figure1_test((2, 2));
        let stat = TestStatistic::diff_in_means(l(0), l(1)).unwrap();
        let err = t.test(2, &[0.0, 0.0, 0.0, 1.0], &stat, &TestConfig::default(), &mut rng::seeded(0)).unwrap_err();
        assert!(matches!(err, Error::EmptyGroup { .. }));
        assert!(err.is_untestable());
    }

    fn two_point_frame() -> (Vec<Assignment>, ExposureTable, NullExposureGraph) {
        // units 0,1 in one cluster, unit 2 alone; assignments treat 0 or 1
        let map = ExposureMap::clustered(ClusterStructure::new(&[0, 0, 1]).unwrap());
        let zs = vec![Assignment::from_treated(3, &[0]).unwrap(), Assignment::from_treated(3, &[1]).unwrap()];
        let g = NullExposureGraph::build(zs.clone(), &map, &[l(0), l(1)]).unwrap();
        let table = ExposureTable::compute(&map, &zs).unwrap();
        (zs, table, g)
    }

    #[test]
    fn two_point_distribution_uses_design_mass() {
        let (zs, table, _) = two_point_frame();
        let weights = [0.2, 0.6];
        let frame = RandomizationFrame { assignments: &zs, weights: &weights, table: &table };
        let c = Biclique::new(vec![0, 1], vec![0, 1]);
        let stat = sum_b();
        let y = [5.0, 1.0, 0.0];
        let cfg = TestConfig { keep_draws: true, ..Default::default() };
        // under assignment 1 unit 0 is spillover: sum_b = 5 (larger)
        let r = randomization_pvalue(frame, &c, 1, &y, &stat, &cfg, &mut rng::seeded(0)).unwrap();
        assert_eq!(r.t_obs, 5.0);
        assert!((r.pval - 0.75).abs() < 1e-15);
        let masses: Vec<f64> = r.draws.iter().map(|d| d.mass).collect();
        assert!((masses[0] - 0.25).abs() < 1e-15 && (masses[1] - 0.75).abs() < 1e-15);
        let r = randomization_pvalue(frame, &c, 0, &y, &stat, &cfg, &mut rng::seeded(0)).unwrap();
        assert_eq!(r.pval, 1.0);
        let err = randomization_pvalue(frame, &Biclique::new(vec![0], vec![0]), 1, &y, &stat, &cfg, &mut rng::seeded(0));
        assert!(err.is_err());
    }

    #[test]
    fn exact_validity_on_small_instances() {
        let mut r = rng::seeded(41);
        let alphas: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        for _ in 0..30 {
            let n = r.random_range(3..9);
            let k = r.random_range(1..=n / 2);
            let ids: Vec<usize> = (0..n).map(|i| i % k).collect();
            let cl = ClusterStructure::new(&ids).unwrap();
            let map = ExposureMap::clustered(cl.clone());
            let design = Design::two_stage(cl, r.random_range(1..=k)).unwrap();
            let support = design.enumerate_support(1 << 12).unwrap();
            let weights: Vec<f64> = support.iter().map(|z| design.mass(z).unwrap()).collect();
            let g = NullExposureGraph::build(support, &map, &[l(0), l(1)]).unwrap();
            let test = BicliqueTest::new(g, weights.clone(), &DecomposeConfig::with_floors(2, 2)).unwrap();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
            for b in test.decomposition().bicliques() {
                let total: f64 = b.assignments.iter().map(|&j| weights[j]).sum();
                let mut pv = Vec::new();
                for &j in &b.assignments {
                    pv.push((test.test(j, &y, &sum_b(), &TestConfig::default(), &mut r).unwrap().pval, weights[j] / total));
                }
                for &a in &alphas {
                    let mass: f64 = pv.iter().filter(|(p, _)| *p <= a).map(|(_, w)| w).sum();
                    assert!(mass <= a + 1e-12, "P(p <= {a}) = {mass}");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let design = Design::complete(12, 4).unwrap();
        let map = ExposureMap::clustered(ClusterStructure::equal(12, 4).unwrap());
        let support = design.enumerate_support(1000).unwrap();
        let w = vec![1.0; support.len()];
        let g = NullExposureGraph::build(support, &map, &[l(0), l(1)]).unwrap();
        let test = BicliqueTest::new(g, w, &DecomposeConfig::default()).unwrap();
        let mut r = rng::seeded(3);
        let y: Vec<f64> = (0..12).map(|_| r.random_range(0.0..1.0)).collect();
        let stat = sum_b();
        for obs in [0, 17, 101, 300] {
            let exact = test.test(obs, &y, &stat, &TestConfig { mode: Mode::Exact, ..Default::default() }, &mut r).unwrap();
            let cfg = TestConfig { mode: Mode::MonteCarlo, draws: 20_000, ..Default::default() };
            let mc = test.test(obs, &y, &stat, &cfg, &mut r).unwrap();
            let se = (exact.pval * (1.0 - exact.pval) / 20_000.0).sqrt();
            assert!((mc.pval - exact.pval).abs() <= 3.0 * se + 1e-4, "{} vs {}", mc.pval, exact.pval);
            assert_eq!(mc.mode, ModeUsed::MonteCarlo { draws: 20_000 });
        }
    }

    #[test]
    fn non_focal_outcomes_do_not_matter() {
        let t = figure1_test((2, 2));
        let stat = sum_b();
        let y = [1.0, 2.0, 3.0, 4.0];
        let base = t.test(0, &y, &stat, &TestConfig::default(), &mut rng::seeded(0)).unwrap();
        let mut y2 = y;
        for i in 0..4 {
            if !base.units.contains(&i) {
                y2[i] = 1e6;
            }
        }
        let again = t.test(0, &y2, &stat, &TestConfig::default(), &mut rng::seeded(0)).unwrap();
        assert_eq!(base, again);
    }

    #[test]
    fn exclusion_figure1() {
        let design = Design::enumerated(one_hots(4), vec![0.25; 4]).unwrap();
        let z = &one_hots(4)[0];
        let stat = TestStatistic::custom("first_cluster_treated", |s| {
            Ok(if s.assignment.get(0) { s.outcomes.iter().sum() } else { 0.0 })
        });
        let cfg = TestConfig { decompose: DecomposeConfig::with_floors(2, 2), ..Default::default() };
        for seed in 0..10 {
            let mut r = rng::seeded(seed);
            let rep = run_exclusion_test(&design, &figure1_map(), &ExposureFamily::exclusion(), z, &[9.0, 9.0, 0.0, 1.0], &stat, &cfg, &mut r).unwrap();
            assert_eq!(rep.mode, ModeUsed::Exact);
            if rep.units == vec![2, 3] {
                assert_eq!(rep.n_assignments, 2);
                assert_eq!(rep.pval, 0.5);
            }
        }
        let total = TestStatistic::custom("total", |s| Ok(s.outcomes.iter().sum()));
        let rep = run_exclusion_test(&design, &figure1_map(), &ExposureFamily::exclusion(), z, &[2.0; 4], &total, &cfg, &mut rng::seeded(1)).unwrap();
        assert_eq!(rep.pval, 1.0);
    }

    #[test]
    fn design_assisted_constant_and_shifted() {
        let cl = ClusterStructure::equal(60, 20).unwrap();
        let ts = TwoStageCluster::new(std::sync::Arc::new(cl.clone()), 10).unwrap();
        let design = Design::TwoStageCluster(ts.clone());
        let map = ExposureMap::clustered(cl);
        let stat = TestStatistic::diff_in_means(l(0), l(1)).unwrap();
        let mut r = rng::seeded(12);
        let z = design.sample_one(&mut r);
        let rule = decompose_design_assisted(&ts, &mut r).unwrap();
        let rep = run_design_assisted_test(&ts, &rule, &map, &z, &[1.0; 60], &stat, &TestConfig::default(), &mut r).unwrap();
        assert_eq!(rep.pval, 1.0);
        assert!(rep.n_units >= 20);
        assert_eq!(rep.mode, ModeUsed::MonteCarlo { draws: DEFAULT_DRAWS });
        let labels = map.exposures(&z).unwrap();
        let y: Vec<f64> = labels.iter().map(|x| if *x == l(1) { 10.0 } else { 0.0 }).collect();
        let rep = run_design_assisted_test(&ts, &rule, &map, &z, &y, &stat, &TestConfig::default(), &mut r).unwrap();
        assert!(rep.pval < 0.05, "{}", rep.pval);
    }

    #[test]
    fn interval_inversion() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let ci = invert_additive_ci(&grid, 0.05, |t| Ok(if (0.3..=0.6).contains(&t) { 0.5 } else { 0.01 })).unwrap();
        assert_eq!((ci.lower, ci.upper), (Some(0.3), Some(0.6)));
        assert!(ci.contiguous && ci.contains(0.45) && !ci.contains(0.7));
        let none = invert_additive_ci(&grid, 0.05, |_| Ok(0.0)).unwrap();
        assert!(none.is_empty());
        assert!(matches!(invert_additive_ci(&[], 0.05, |_| Ok(1.0)), Err(Error::EmptyGrid)));
        assert!(invert_additive_ci(&[1.0, 0.0], 0.05, |_| Ok(1.0)).is_err());
        let gap = invert_additive_ci(&[0.0, 1.0, 2.0], 0.05, |t| Ok(if t == 1.0 { 0.0 } else { 1.0 })).unwrap();
        assert!(!gap.contiguous);
    }

    #[test]
    fn interval_covers_truth_on_clean_data() {
        let cl = ClusterStructure::equal(60, 6).unwrap();
        let design = Design::two_stage(cl.clone(), 3).unwrap();
        let map = ExposureMap::clustered(cl);
        let mut r = rng::seeded(77);
        let support = design.enumerate_support(1 << 16).unwrap();
        let w: Vec<f64> = support.iter().map(|z| design.mass(z).unwrap()).collect();
        let g = NullExposureGraph::build(support, &map, &[l(0), l(1)]).unwrap();
        let cfg = DecomposeConfig { node_budget: 20_000, ..DecomposeConfig::with_floors(20, 20) };
        let test = BicliqueTest::new(g, w, &cfg).unwrap();
        let obs = r.random_range(0..test.graph().n_assignments());
        let labels = test.labels_at(obs);
        let y: Vec<f64> = labels.iter().map(|x| r.random_range(0.0..1.0) + if *x == l(1) { 0.5 } else { 0.0 }).collect();
        let grid: Vec<f64> = (0..=40).map(|k| -1.0 + k as f64 * 0.05).collect();
        let ci = test.confidence_interval(obs, &y, &l(0), &l(1), &grid, 0.05, &TestConfig::default(), &mut r).unwrap();
        assert!(ci.contains(0.5), "{ci:?}");
    }

    #[test]
    fn residuals() {
        let y = [1.0, 2.0, 6.0];
        let res = residualize_outcomes(&y, &[vec![], vec![], vec![]]).unwrap();
        for (a, b) in res.iter().zip([-2.0, -1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let lin: Vec<f64> = x.iter().map(|r| 1.0 + 2.0 * r[0] - 0.5 * r[1]).collect();
        assert!(residualize_outcomes(&lin, &x).unwrap().iter().all(|v| v.abs() < 1e-10));
        let mut g = rng::seeded(4);
        let x: Vec<Vec<f64>> = (0..50).map(|_| vec![g.random_range(-1.0..1.0), g.random_range(0.0..5.0)]).collect();
        let y: Vec<f64> = (0..50).map(|_| g.random_range(0.0..10.0)).collect();
        let res = residualize_outcomes(&y, &x).unwrap();
        assert!(res.iter().sum::<f64>().abs() < 1e-10);
        for c in 0..2 {
            let dot: f64 = res.iter().zip(&x).map(|(e, row)| e * row[c]).sum();
            assert!(dot.abs() < 1e-8);
        }
        let dup: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert!(matches!(residualize_outcomes(&[0.0; 5], &dup), Err(Error::RankDeficient { rank: 2, columns: 3 })));
    }

    #[test]
    fn enumerated_candidate_set_keeps_observed() {
        let design = Design::complete(6, 2).unwrap();
        let mut r = rng::seeded(2);
        let z = design.sample_one(&mut r);
        let (set, obs) = candidate_set(&design, &z, &TestConfig::default(), &mut r).unwrap();
        assert_eq!(set.len(), 15);
        assert_eq!(set.assignments()[obs], z);
        let (set, obs) = candidate_set(&design, &z, &TestConfig { subsample: Some(5), ..Default::default() }, &mut r).unwrap();
        assert_eq!((set.len(), obs), (5, 0));
        let _ = EnumeratedDesign::uniform(vec![z]).unwrap();
    }
}
