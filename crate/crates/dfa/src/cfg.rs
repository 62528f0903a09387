//! Control-flow graph over program points.

use crate::syntax::{Cond, Expr, Program, Stmt};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Assign { target: usize, expr: Expr },
    Assume(Cond),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Label,
    pub back: bool,
}

#[derive(Clone, Debug)]
pub struct Cfg {
    pub num_points: usize,
    pub edges: Vec<Edge>,
    pub entry: usize,
    pub exit: usize,
    pub loop_heads: Vec<bool>,
    /// Outgoing edge indices per point.
    pub succ: Vec<Vec<usize>>,
}

struct Builder {
    edges: Vec<Edge>,
    heads: Vec<bool>,
}

impl Builder {
    fn point(&mut self) -> usize {
        self.heads.push(false);
        self.heads.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, label: Label, back: bool) {
        self.edges.push(Edge { from, to, label, back });
    }

    /// Lowers `body` starting at `at`; returns the point after it.
    fn block(&mut self, body: &[Stmt], mut at: usize) -> usize {
        for s in body {
            at = match s {
                Stmt::Assign { target, expr } => {
                    let next = self.point();
                    let label = Label::Assign {
                        target: *target,
                        expr: expr.clone(),
                    };
                    self.edge(at, next, label, false);
                    next
                }
                Stmt::Assume(c) => {
                    let next = self.point();
                    self.edge(at, next, Label::Assume(c.clone()), false);
                    next
                }
                Stmt::While { cond, body } => {
                    // the loop head is a point of its own so that entering
                    // edges and the back edge meet there
                    let head = self.point();
                    self.heads[head] = true;
                    self.edge(at, head, Label::Assume(Cond { terms: Vec::new(), bound: 0 }), false);
                    let start = self.point();
                    self.edge(head, start, Label::Assume(cond.clone()), false);
                    let end = self.block(body, start);
                    self.edge(end, head, Label::Assume(Cond { terms: Vec::new(), bound: 0 }), true);
                    let after = self.point();
                    self.edge(head, after, Label::Assume(cond.negate()), false);
                    after
                }
            };
        }
        at
    }
}

impl Label {
    /// The always-true condition used for plain control transfer.
    pub fn is_skip(&self) -> bool {
        matches!(self, Label::Assume(c) if c.terms.is_empty())
    }
}

impl Cfg {
    pub fn build(p: &Program) -> Cfg {
        let mut b = Builder {
            edges: Vec::new(),
            heads: Vec::new(),
        };
        let entry = b.point();
        let exit = b.block(&p.body, entry);
        let num_points = b.heads.len();
        let mut succ = vec![Vec::new(); num_points];
        for (i, e) in b.edges.iter().enumerate() {
            succ[e.from].push(i);
        }
        Cfg {
            num_points,
            edges: b.edges,
            entry,
            exit,
            loop_heads: b.heads,
            succ,
        }
    }

    pub fn loop_head_points(&self) -> Vec<usize> {
        (0..self.num_points).filter(|&p| self.loop_heads[p]).collect()
    }

    pub fn describe(&self, p: &Program, e: &Edge) -> String {
        match &e.label {
            Label::Assign { target, expr } => p.show_stmt_head(&Stmt::Assign {
                target: *target,
                expr: expr.clone(),
            }),
            l if l.is_skip() => "skip".into(),
            Label::Assume(c) => format!("assume({})", p.show_cond(c)),
        }
    }
}
