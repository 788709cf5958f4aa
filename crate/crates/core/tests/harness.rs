use wellplace::de::DeConfig;
use wellplace::harness::{
    export_results, mini_config, read_finals, run_trial, run_trials_on, summarize, CaseId,
    CaseSpec, TrialSummary,
};
use wellplace::placement::PlacementProblem;

fn problem() -> PlacementProblem {
    CaseSpec::mini(CaseId::Case1).build_problem().unwrap()
}

fn short(k: usize) -> DeConfig {
    DeConfig {
        budget: 120,
        ..mini_config(k).unwrap()
    }
}

#[test]
fn concurrent_and_sequential_trials_agree() {
    let p = problem();
    let config = short(6);
    let together = run_trials_on(&p, &config, 3, 42).unwrap();
    let fresh = problem();
    for t in 1..=3 {
        let alone = run_trial(&fresh, &config, t, 42 + t as u64).unwrap();
        let rec = &together.trials[t - 1];
        assert_eq!((rec.trial, rec.seed), (t, 42 + t as u64));
        assert_eq!(rec.best, alone.best);
        assert_eq!(rec.best_so_far, alone.best_so_far);
        assert_eq!(rec.cells, alone.cells);
    }
}

#[test]
fn single_trial_summary() {
    let s = run_trials_on(&problem(), &short(2), 1, 7).unwrap();
    let st = s.stats.unwrap();
    assert_eq!(
        (st.best, st.worst, st.mean, st.median, st.sd),
        (st.best, st.best, st.best, st.best, 0.0)
    );
    assert!(run_trials_on(&problem(), &short(2), 0, 7).is_err());
}

#[test]
fn envelope_and_order_invariance() {
    let s = run_trials_on(&problem(), &short(5), 4, 100).unwrap();
    let st = s.stats.unwrap();
    for t in &s.trials {
        assert!(t.best.value() <= st.best && t.best.value() >= st.worst);
        assert_eq!(t.evaluations, 120);
    }
    let mut reversed = s.trials.clone();
    reversed.reverse();
    let r = TrialSummary::from_trials(s.config, reversed)
        .unwrap()
        .stats
        .unwrap();
    assert_eq!((r.best, r.worst, r.median), (st.best, st.worst, st.median));
    assert!((r.mean - st.mean).abs() <= 1e-9 * st.mean.abs());
}

#[test]
fn exported_tables_are_consistent() {
    let case = CaseSpec::mini(CaseId::Case1);
    let s = run_trials_on(&case.build_problem().unwrap(), &short(6), 3, 42).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let ids: Vec<String> = case.well_templates().into_iter().map(|t| t.id).collect();
    let files = export_results(&s, &case.name(), "6", &ids, dir.path()).unwrap();

    let rows = read_finals(&files.finals).unwrap();
    assert_eq!(rows.len(), 3);
    let finals: Vec<f64> = rows.iter().map(|r| r.npv_usd).collect();
    let recomputed = summarize(&finals).unwrap();
    let summary = std::fs::read_to_string(&files.summary).unwrap();
    let fields: Vec<f64> = summary
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .skip(4)
        .map(|v| v.parse().unwrap())
        .collect();
    let expected = [
        recomputed.best,
        recomputed.worst,
        recomputed.mean,
        recomputed.sd,
        recomputed.median,
    ];
    for (got, want) in fields.iter().zip(expected) {
        assert!(
            (got - want).abs() <= 1e-5 * want.abs().max(1.0),
            "{got} vs {want}"
        );
    }

    // Last convergence row: mean of the trials' final best-so-far.
    let conv = std::fs::read_to_string(&files.convergence).unwrap();
    let last: Vec<&str> = conv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "120");
    let mean: f64 = last[1].parse().unwrap();
    let st = s.stats.unwrap();
    assert!((mean - st.mean).abs() <= 1e-5 * st.mean.abs());
}
