use haplo_core::bench::{
    mean_sd, run_sweep, strip_columns, write_aggregate, write_trials_csv, Method, PSchedule, SweepSpec, TableFormat,
    CSV_HEADER, TIMING_COLUMNS,
};
use haplo_core::SolverParams;

fn small_spec() -> SweepSpec {
    SweepSpec {
        m: 12,
        n: 15,
        pds: vec![0.3, 0.6],
        err_ratios: vec![0.1],
        trials: 3,
        methods: Method::ALL.to_vec(),
        base_seed: 40,
        params: SolverParams {
            max_iters: 200,
            ..SolverParams::default()
        },
        p_schedule: PSchedule::Fixed,
    }
}

fn csv(rows: &[haplo_core::bench::AggregateRow]) -> String {
    let mut out = Vec::new();
    write_aggregate(rows, TableFormat::Csv, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn one_row_per_method_and_grid_point() {
    let spec = small_spec();
    let out = run_sweep(&spec, 1).unwrap();
    assert_eq!(out.rows.len(), 2 * 3);
    assert_eq!(out.trials.len(), 2 * 3 * 3);
    let text = csv(&out.rows);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 7);
    for r in &out.rows {
        assert_eq!(r.trials, 3);
        assert_eq!(r.failures, 0);
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let spec = small_spec();
    let a = run_sweep(&spec, 1).unwrap();
    let b = run_sweep(&spec, 4).unwrap();
    assert_eq!(
        strip_columns(&csv(&a.rows), &TIMING_COLUMNS),
        strip_columns(&csv(&b.rows), &TIMING_COLUMNS)
    );
    let trials = |o: &haplo_core::bench::SweepOutput| {
        let mut buf = Vec::new();
        write_trials_csv(&spec, &o.trials, &mut buf).unwrap();
        strip_columns(&String::from_utf8(buf).unwrap(), &TIMING_COLUMNS)
    };
    assert_eq!(trials(&a), trials(&b));
}

#[test]
fn aggregates_are_means_of_trial_rows() {
    let spec = small_spec();
    let out = run_sweep(&spec, 2).unwrap();
    for row in &out.rows {
        let hd: Vec<f64> = out
            .trials
            .iter()
            .filter(|t| t.method == row.method && t.grid.pd == row.pd)
            .map(|t| t.outcome.as_ref().unwrap().hd as f64)
            .collect();
        let (mean, sd) = mean_sd(&hd);
        assert_eq!(row.mean_hd, mean);
        assert_eq!(row.sd_hd, sd);
    }
    for (k, t) in out.trials.iter().enumerate() {
        assert_eq!(t.trial, (k / 3) % 3);
        assert_eq!(t.seed, 40 + t.trial as u64);
    }
}

#[test]
fn unobserved_columns_fail_only_the_factorization_baseline() {
    let spec = SweepSpec {
        m: 4,
        n: 30,
        pds: vec![0.1],
        err_ratios: vec![0.0],
        trials: 4,
        methods: Method::ALL.to_vec(),
        base_seed: 1,
        params: SolverParams {
            max_iters: 50,
            ..SolverParams::default()
        },
        p_schedule: PSchedule::Fixed,
    };
    let out = run_sweep(&spec, 1).unwrap();
    let altmin = out.rows.iter().find(|r| r.method == Method::Altmin).unwrap();
    assert!(altmin.failures > 0);
    let fro = out.rows.iter().find(|r| r.method == Method::ManifoldFro).unwrap();
    assert_eq!(fro.failures, 0);
    let mut buf = Vec::new();
    write_trials_csv(&spec, &out.trials, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().any(|l| l.contains("error: column")));
    let width = text.lines().next().unwrap().split(',').count();
    assert!(text.lines().all(|l| l.split(',').count() == width));
}

#[test]
fn linear_schedule_sets_p_per_error_ratio() {
    let spec = SweepSpec {
        err_ratios: vec![0.14, 0.21, 0.28],
        pds: vec![0.5],
        trials: 1,
        p_schedule: PSchedule::LINEAR_DEFAULT,
        ..small_spec()
    };
    let ps: Vec<f64> = spec.grid().iter().map(|g| g.p).collect();
    assert!((ps[0] - 1.05).abs() < 1e-12 && (ps[1] - 1.125).abs() < 1e-12 && (ps[2] - 1.2).abs() < 1e-12);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let bad = [
        SweepSpec {
            pds: vec![0.0],
            ..small_spec()
        },
        SweepSpec {
            trials: 0,
            ..small_spec()
        },
        SweepSpec {
            methods: vec![],
            ..small_spec()
        },
        SweepSpec {
            err_ratios: vec![1.0],
            ..small_spec()
        },
    ];
    for spec in bad {
        assert!(run_sweep(&spec, 1).is_err());
    }
}

#[test]
fn gnuplot_layout_separates_methods() {
    let out = run_sweep(&small_spec(), 1).unwrap();
    let mut buf = Vec::new();
    write_aggregate(&out.rows, TableFormat::Gnuplot, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# method m n"));
    let blocks: Vec<&str> = text.split("\n\n\n").collect();
    assert_eq!(blocks.len(), 3);
    for (block, method) in blocks.iter().zip(Method::ALL) {
        let data: Vec<&str> = block.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 2);
        assert!(data.iter().all(|l| l.starts_with(method.name())));
    }
}
