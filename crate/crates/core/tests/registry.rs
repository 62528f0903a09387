use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use octobench_core::checks::{CheckContext, CheckSpec, Registry};
use octobench_core::harness::{prepare_input, run_all_with, run_cell, summarize, HarnessConfig};
use octobench_core::op::GridCell;
use octobench_core::{DomainKind, OpId, Octagon};

fn two_by_two(ops: Vec<OpId>) -> HarnessConfig {
    HarnessConfig {
        n_set: vec![4, 6],
        density_set: vec![0.3, 0.6],
        warmup_iters: 0,
        measure_iters: 1,
        ops,
        checks_enabled: true,
        ..HarnessConfig::default()
    }
}

#[test]
fn user_check_runs_only_on_its_op() {
    let calls = Arc::new(AtomicU64::new(0));
    let mut r = Registry::<Octagon>::with_builtins(false);
    let seen = calls.clone();
    r.register(CheckSpec::new("count-joins", &[OpId::Join], move |_: &CheckContext<'_, Octagon>| {
        seen.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }))
    .unwrap();
    let cfg = two_by_two(vec![OpId::CloseFull, OpId::Join]);
    let report = run_all_with(&cfg, &r, &mut 0, "t".into()).unwrap();
    let join_cells = report.cells.iter().filter(|c| c.op == OpId::Join).count() as u64;
    assert_eq!(join_cells, 4);
    assert_eq!(calls.load(Ordering::Relaxed), join_cells);
    assert!(!report.any_failed());
}

#[test]
fn empty_registry_still_times() {
    let r = Registry::<Octagon>::empty();
    let report = run_all_with(&two_by_two(vec![OpId::Forget]), &r, &mut 0, "t".into()).unwrap();
    assert_eq!(report.cells.len(), 4);
    assert!(report.cells.iter().all(|c| c.samples_ns.len() == 1));
}

#[test]
fn checks_leave_states_untouched() {
    let r = Registry::<Octagon>::with_builtins(true);
    for op in OpId::ALL {
        let cell = GridCell {
            op,
            domain: DomainKind::Octagon,
            n: 7,
            density: 0.5,
            density_index: 4,
            seed: 9,
        };
        let input = prepare_input::<Octagon>(&cell).unwrap();
        let out = op.apply(&input).unwrap();
        let (before_in, before_out) = (input.first.dbm().clone(), out.dbm().clone());
        let ctx = CheckContext {
            op,
            input: &input,
            output: &out,
            consistent_inputs: true,
        };
        let reports = r.run_checks(&ctx, Some(cell));
        assert!(!reports.is_empty());
        assert_eq!(input.first.dbm(), &before_in);
        assert_eq!(out.dbm(), &before_out);
    }
}

/// Checks run outside the timed region, so switching them on must not move
/// the mean beyond noise. Timing is noisy on shared machines; a few
/// attempts are allowed.
#[test]
fn checks_do_not_inflate_timings() {
    let cell = GridCell {
        op: OpId::CloseFull,
        domain: DomainKind::Octagon,
        n: 30,
        density: 0.5,
        density_index: 4,
        seed: 3,
    };
    let r = Registry::<Octagon>::with_builtins(false);
    let mut last = String::new();
    for _ in 0..5 {
        let mut cfg = HarnessConfig {
            warmup_iters: 3,
            measure_iters: 30,
            ..HarnessConfig::default()
        };
        let off = run_cell(&cell, &cfg, &r, &mut 0).unwrap();
        cfg.checks_enabled = true;
        let on = run_cell(&cell, &cfg, &r, &mut 0).unwrap();
        assert!(on.checks.passed > 0 && on.checks.failed == 0);
        let (a, b) = (summarize(&off.samples_ns), summarize(&on.samples_ns));
        let sigma = a.stddev_ms.max(b.stddev_ms);
        if (a.mean_ms - b.mean_ms).abs() <= 3.0 * sigma {
            return;
        }
        last = format!("off {:.4}±{:.4} ms, on {:.4}±{:.4} ms", a.mean_ms, a.stddev_ms, b.mean_ms, b.stddev_ms);
    }
    panic!("checks moved the timing beyond 3 sigma: {last}");
}
