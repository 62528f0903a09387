//! The untimed property suite behind `verify`: closure laws, incremental
//! equivalence, lattice laws, widening termination, forget, generator
//! guarantees and, optionally, agreement with the integer enumeration oracle.

use std::fmt::Write as _;
use std::str::FromStr;

use octobench_oracle::IntegerSystem;

use crate::checks::{CheckContext, Registry, Verdict};
use crate::constraint::{Constraint, ConstraintKind};
use crate::generator::{expected_density, generate, sample_tightening_constraint, Generated, GeneratorParams};
use crate::octagon::Octagon;
use crate::op::{OpId, OpInput};
use crate::oracle_bridge::{system_of_constraints, system_of_octagon, tightest_entries};
use crate::rng::{mix, Rng};

/// Failure messages kept per property.
const KEEP_FAILURES: usize = 5;

/// Projection is checked on every assignment of the other variables in
/// `[-PROJECTION_RADIUS, PROJECTION_RADIUS]`, which covers every generated
/// bound with the default ranges.
const PROJECTION_RADIUS: i64 = 160;

/// Deliberate bugs `verify` can run against, to show the suite notices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Full closure without the strengthening pass.
    SkipStrengthening,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip-strengthening" => Ok(Fault::SkipStrengthening),
            other => Err(format!("unknown fault `{other}` (expected skip-strengthening)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Number of random instances.
    pub seeds: u64,
    /// Variable counts cycle through `2..=max_n`.
    pub max_n: usize,
    /// Also compare closure against exhaustive enumeration (n <= 3).
    pub oracle: bool,
    pub fault: Option<Fault>,
    pub base_seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seeds: 100,
            max_n: 8,
            oracle: false,
            fault: None,
            base_seed: 42,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub properties: Vec<PropertyOutcome>,
}

impl VerifyReport {
    fn record(&mut self, name: &str, outcome: Result<(), String>, context: impl FnOnce() -> String) {
        let idx = match self.properties.iter().position(|p| p.name == name) {
            Some(i) => i,
            None => {
                self.properties.push(PropertyOutcome {
                    name: name.to_string(),
                    ..PropertyOutcome::default()
                });
                self.properties.len() - 1
            }
        };
        let p = &mut self.properties[idx];
        match outcome {
            Ok(()) => p.passed += 1,
            Err(detail) => {
                p.failed += 1;
                if p.failures.len() < KEEP_FAILURES {
                    p.failures.push(format!("{}: {detail}", context()));
                }
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&PropertyOutcome> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn totals(&self) -> (u64, u64) {
        self.properties
            .iter()
            .fold((0, 0), |(p, f), o| (p + o.passed, f + o.failed))
    }

    pub fn all_passed(&self) -> bool {
        self.totals().1 == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let mark = if p.failed == 0 { "ok  " } else { "FAIL" };
            writeln!(out, "{mark} {:<28} {:>6} passed {:>6} failed", p.name, p.passed, p.failed).unwrap();
            for f in &p.failures {
                writeln!(out, "       {f}").unwrap();
            }
        }
        let (passed, failed) = self.totals();
        writeln!(out, "total: {passed} passed, {failed} failed").unwrap();
        out
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn diff_detail(label: &str, got: &Octagon, want: &Octagon) -> String {
    if got.is_bottom() != want.is_bottom() {
        return format!("{label}: bottom {} vs expected {}", got.is_bottom(), want.is_bottom());
    }
    let (i, j) = got
        .dbm()
        .first_above(want.dbm())
        .or_else(|| want.dbm().first_above(got.dbm()))
        .unwrap_or((0, 0));
    format!("{label}: m[{i}][{j}] = {} vs expected {}", got.entry(i, j), want.entry(i, j))
}

fn same(label: &str, got: &Octagon, want: &Octagon) -> Result<(), String> {
    ensure(got == want, || diff_detail(label, got, want))
}

fn includes(big: &Octagon, small: &Octagon, what: &str) -> Result<(), String> {
    match big.includes(small) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{what} does not hold")),
        Err(e) => Err(format!("{what}: {e}")),
    }
}

/// `n` and density of instance `s`: `n` cycles through `2..=max_n` and each
/// full cycle moves to the next density.
fn instance_shape(s: u64, max_n: usize) -> (usize, f64) {
    const DENSITIES: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
    if max_n < 2 {
        return (1, 0.0);
    }
    let span = (max_n - 1) as u64;
    ((2 + s % span) as usize, DENSITIES[((s / span) % 4) as usize])
}

/// Any constraint over a random form, sometimes contradicting the witness.
fn random_constraint(rng: &mut Rng, n: usize, witness: &[i64]) -> Constraint {
    let kinds: Vec<ConstraintKind> = ConstraintKind::ALL
        .into_iter()
        .filter(|k| n > 1 || k.is_unary())
        .collect();
    let kind = kinds[rng.index(kinds.len())];
    let i = rng.index(n);
    let j = if n > 1 { (i + 1 + rng.index(n - 1)) % n } else { i };
    let v = Constraint::form_value(kind, i, j, witness);
    Constraint::from_le_form(kind, i, j, v + rng.range_inclusive(-60, 20))
}

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let mut report = VerifyReport::default();
    let registry = Registry::<Octagon>::with_builtins(true);
    for s in 0..cfg.seeds {
        let (n, density) = instance_shape(s, cfg.max_n);
        let seed = mix(cfg.base_seed ^ s);
        let ctx = || format!("seed {seed} (instance {s}, n={n}, density={density:.1})");
        let params = GeneratorParams::new(n, density, seed);
        let g = generate::<Octagon>(&params).expect("valid generator params");
        let g2 = generate::<Octagon>(&params.with_seed(mix(seed))).expect("valid generator params");
        let mut rng = Rng::new(mix(seed ^ 0x5eed));

        check_generator(&mut report, &g, &params, &ctx);
        check_closure(&mut report, &registry, &g.state, cfg.fault, &ctx);
        let a = g.state.close_full();
        let b = g2.state.close_full();
        check_incremental(&mut report, &registry, &a, &g, &params, &mut rng, &ctx);
        check_lattice(&mut report, &a, &b, &g, &g2, &ctx);
        check_widening(&mut report, &a, &params, &ctx);
        check_forget(&mut report, &registry, &a, rng.index(n), &ctx);
        if cfg.oracle {
            check_oracle(&mut report, cfg.max_n.min(3), &mut rng, &ctx);
        }
    }
    report
}

fn check_generator(report: &mut VerifyReport, g: &Generated<Octagon>, p: &GeneratorParams, ctx: &dyn Fn() -> String) {
    let closed = g.state.close_full();
    report.record("generator-consistent", ensure(!closed.is_bottom(), || "closure is bottom".into()), ctx);
    report.record(
        "generator-witness",
        ensure(g.state.contains_point(&g.witness) && closed.contains_point(&g.witness), || {
            format!("witness {:?} escapes the state", g.witness)
        }),
        ctx,
    );
    let want = expected_density(p.n, p.density);
    let got = g.state.achieved_density();
    report.record(
        "generator-density",
        ensure(got == want, || format!("density {got} vs {want}")),
        ctx,
    );
}

fn check_closure(
    report: &mut VerifyReport,
    registry: &Registry<Octagon>,
    state: &Octagon,
    fault: Option<Fault>,
    ctx: &dyn Fn() -> String,
) {
    let closed = match fault {
        None => state.close_full(),
        Some(Fault::SkipStrengthening) => state.close_without_strengthening(),
    };
    let input = OpInput::unary(state.clone());
    let cctx = CheckContext {
        op: OpId::CloseFull,
        input: &input,
        output: &closed,
        consistent_inputs: true,
    };
    for r in registry.run_checks(&cctx, None) {
        let outcome = match r.verdict {
            Verdict::Pass => Ok(()),
            Verdict::Fail => Err(r.detail),
        };
        report.record(&r.check, outcome, ctx);
    }
}

fn check_incremental(
    report: &mut VerifyReport,
    registry: &Registry<Octagon>,
    closed: &Octagon,
    g: &Generated<Octagon>,
    p: &GeneratorParams,
    rng: &mut Rng,
    ctx: &dyn Fn() -> String,
) {
    let tightening = sample_tightening_constraint(closed, rng, &g.witness, p.median_slack());
    let arbitrary = random_constraint(rng, p.n, &g.witness);
    for k in [tightening, arbitrary] {
        let full = closed.add_constraint(&k).expect("valid constraint").close_full();
        let mine = closed.close_incremental_mine(&k).expect("closed input");
        let chaw = closed.close_incremental_chawdhary(&k).expect("closed input");
        let outcome = same("inc-mine", &mine, &full).and_then(|()| same("inc-chawdhary", &chaw, &full));
        report.record("incremental-equivalence", outcome, || format!("{} with `{k}`", ctx()));
    }
    let mut input = OpInput::unary(closed.clone());
    input.constraint = Some(tightening);
    for op in [OpId::IncMine, OpId::IncChawdhary] {
        let out = op.apply(&input).expect("closed input");
        let cctx = CheckContext {
            op,
            input: &input,
            output: &out,
            consistent_inputs: true,
        };
        for r in registry.run_checks(&cctx, None) {
            let outcome = match r.verdict {
                Verdict::Pass => Ok(()),
                Verdict::Fail => Err(format!("{op}: {}", r.detail)),
            };
            report.record(&r.check, outcome, ctx);
        }
    }
}

fn check_lattice(
    report: &mut VerifyReport,
    a: &Octagon,
    b: &Octagon,
    ga: &Generated<Octagon>,
    gb: &Generated<Octagon>,
    ctx: &dyn Fn() -> String,
) {
    let j = a.join(b).expect("closed operands");
    let outcome = includes(&j, a, "join includes a")
        .and_then(|()| includes(&j, b, "join includes b"))
        .and_then(|()| ensure(j.contains_point(&ga.witness) && j.contains_point(&gb.witness), || "join lost a witness".into()));
    report.record("join-upper-bound", outcome, ctx);
    report.record("join-commutative", same("b join a", &b.join(a).unwrap(), &j), ctx);
    report.record("join-idempotent", same("a join a", &a.join(a).unwrap(), a), ctx);
    report.record("join-closed", same("closure of join", &j.close_full(), &j), ctx);

    let m = a.meet(b).expect("same dimension").close_full();
    let outcome = if m.is_bottom() {
        Ok(())
    } else {
        includes(a, &m, "a includes meet").and_then(|()| includes(b, &m, "b includes meet"))
    };
    report.record("meet-lower-bound", outcome, ctx);
    report.record(
        "meet-commutative",
        same("b meet a", &b.meet(a).unwrap().close_full(), &m),
        ctx,
    );
    let outcome = includes(a, a, "a includes a").and_then(|()| {
        let both = a.includes(b).unwrap() && b.includes(a).unwrap();
        ensure(!both || a.equals(b).unwrap(), || "mutual inclusion without equality".into())
    });
    report.record("includes-order", outcome, ctx);
}

fn check_widening(report: &mut VerifyReport, a: &Octagon, p: &GeneratorParams, ctx: &dyn Fn() -> String) {
    let d = 2 * p.n;
    let limit = d * d + 1;
    let mut x = a.clone();
    let mut outcome = Err(format!("no fixpoint within {limit} steps"));
    for step in 0..limit {
        let y = generate::<Octagon>(&p.with_seed(mix(p.seed ^ (step as u64 + 7))))
            .expect("valid generator params")
            .state
            .close_full();
        let target = x.close_full().join(&y).expect("closed operands");
        let next = x.widen(&target).expect("same dimension");
        if let Err(e) = includes(&next.close_full(), &target, "widen includes its argument") {
            outcome = Err(format!("step {step}: {e}"));
            break;
        }
        if next.dbm() == x.dbm() {
            outcome = Ok(());
            break;
        }
        x = next;
    }
    report.record("widening-termination", outcome, ctx);
}

fn check_forget(report: &mut VerifyReport, registry: &Registry<Octagon>, a: &Octagon, var: usize, ctx: &dyn Fn() -> String) {
    let f = a.forget(var).expect("closed input");
    report.record("forget-upper-bound", includes(&f, a, "forget includes its input"), ctx);
    let mut input = OpInput::unary(a.clone());
    input.var = Some(var);
    let cctx = CheckContext {
        op: OpId::Forget,
        input: &input,
        output: &f,
        consistent_inputs: true,
    };
    for r in registry.run_checks(&cctx, None) {
        let outcome = match r.verdict {
            Verdict::Pass => Ok(()),
            Verdict::Fail => Err(r.detail),
        };
        report.record(&r.check, outcome, ctx);
    }
    if a.n() <= 3 {
        let ok = system_of_octagon(a).projection_matches(var, &system_of_octagon(&f), PROJECTION_RADIUS);
        report.record(
            "forget-projection-oracle",
            ensure(ok, || format!("forget x{var} differs from the integer projection")),
            ctx,
        );
    }
}

/// A random system of up to eight constraints with constants in [-8, 8].
pub fn random_small_system(rng: &mut Rng, n: usize) -> Vec<Constraint> {
    let count = 1 + rng.index(8);
    (0..count)
        .map(|_| {
            let kinds: Vec<ConstraintKind> = ConstraintKind::ALL
                .into_iter()
                .filter(|k| n > 1 || k.is_unary())
                .collect();
            let kind = kinds[rng.index(kinds.len())];
            let i = rng.index(n);
            let j = if n > 1 { (i + 1 + rng.index(n - 1)) % n } else { i };
            Constraint::new(kind, i, j, rng.range_inclusive(-8, 8))
        })
        .collect()
}

/// Closure of `ks` against exhaustive enumeration: same emptiness, entries
/// equal to the tightest realized bounds, same integer points.
pub fn closure_matches_oracle(n: usize, ks: &[Constraint]) -> Result<(), String> {
    let o = Octagon::from_constraints(n, ks).map_err(|e| e.to_string())?;
    let closed = o.close_full();
    let system: IntegerSystem = system_of_constraints(n, ks);
    let points = system.enumerate();
    match tightest_entries(n, &points) {
        None => ensure(closed.is_bottom(), || "oracle finds no points but closure is not bottom".into()),
        Some(want) => {
            ensure(!closed.is_bottom(), || "closure is bottom but the oracle finds points".into())?;
            let d = 2 * n;
            for i in 0..d {
                for j in 0..d {
                    let got = closed.entry(i, j);
                    if got != want[i * d + j] {
                        return Err(format!("m[{i}][{j}] = {got}, tightest is {}", want[i * d + j]));
                    }
                }
            }
            ensure(system_of_octagon(&closed).same_points(&system), || {
                "closure changed the integer point set".into()
            })
        }
    }
}

fn check_oracle(report: &mut VerifyReport, max_n: usize, rng: &mut Rng, ctx: &dyn Fn() -> String) {
    let n = 1 + rng.index(max_n.max(1));
    let ks = random_small_system(rng, n);
    let listed = || {
        let text: Vec<String> = ks.iter().map(ToString::to_string).collect();
        format!("{} with n={n} {{{}}}", ctx(), text.join("; "))
    };
    report.record("closure-oracle", closure_matches_oracle(n, &ks), listed);
}
