use octobench_dfa::builtins;
use octobench_dfa::syntax::{parse_program, Cond, Expr, Program, Stmt};
use proptest::prelude::*;

fn cond(nv: usize) -> impl Strategy<Value = Cond> {
    let sign = prop_oneof![Just(1i64), Just(-1i64)];
    prop_oneof![
        (sign.clone(), 0..nv, -20i64..20).prop_map(|(s, x, k)| Cond { terms: vec![(s, x)], bound: k }),
        (sign.clone(), sign, 0..nv, 1..nv, -20i64..20).prop_map(move |(s, t, x, d, k)| Cond {
            terms: vec![(s, x), (t, (x + d) % nv)],
            bound: k,
        }),
    ]
}

fn expr(nv: usize) -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-50i64..50).prop_map(Expr::Const),
        (0..nv).prop_map(Expr::Var),
        (0..nv, (-9i64..9).prop_filter("nonzero", |k| *k != 0)).prop_map(|(y, k)| Expr::Offset(y, k)),
        (0..nv, 0..nv).prop_map(|(y, z)| Expr::Sum(y, z)),
    ]
}

fn stmt(nv: usize) -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        (0..nv, expr(nv)).prop_map(|(target, expr)| Stmt::Assign { target, expr }),
        cond(nv).prop_map(Stmt::Assume),
    ];
    leaf.prop_recursive(3, 12, 4, move |inner| {
        (cond(nv), prop::collection::vec(inner, 1..4)).prop_map(|(cond, body)| Stmt::While { cond, body })
    })
}

fn program() -> impl Strategy<Value = Program> {
    (2usize..5).prop_flat_map(|nv| {
        prop::collection::vec(stmt(nv), 1..6).prop_map(move |body| Program {
            vars: (0..nv).map(|k| format!("v{k}")).collect(),
            body,
        })
    })
}

proptest! {
    #[test]
    fn pretty_print_reparses_to_equal_program(p in program()) {
        let text = p.to_string();
        let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p);
    }
}

#[test]
fn builtins_parse_and_round_trip() {
    for src in [builtins::LOOP, builtins::FIB] {
        let p = parse_program(src).unwrap();
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }
    assert_eq!(parse_program(builtins::FIB).unwrap().vars.len(), 4);
}
