//! Program text: lexer, recursive-descent parser and pretty-printer.
//!
//! ```text
//! var a, b;            optional; otherwise variables are declared on first use
//! a := 3;  a := b;  a := b + 2;  a := b - 2;  a := b + c;
//! assume(a - b <= 4);
//! while (a <= 9) { a := a + 1 }
//! ```
//!
//! Conditions are `±x <= k` or `±x ±y <= k`; `<`, `>=` and `>` are
//! normalized to `<=`. Semicolons separate statements and are optional
//! before `}`, after a loop's closing brace and at the end.

use std::fmt;

use octobench_core::Constraint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(i64),
    Var(usize),
    /// `y + k`
    Offset(usize, i64),
    /// `y + z`
    Sum(usize, usize),
}

/// `Σ sign·x <= bound` over one or two distinct variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cond {
    pub terms: Vec<(i64, usize)>,
    pub bound: i64,
}

impl Cond {
    /// The integer complement: `Σ > k` as `-Σ <= -k - 1`.
    pub fn negate(&self) -> Cond {
        Cond {
            terms: self.terms.iter().map(|&(s, v)| (-s, v)).collect(),
            bound: -self.bound - 1,
        }
    }

    pub fn holds(&self, vals: &[i64]) -> bool {
        self.terms.iter().map(|&(s, v)| s * vals[v]).sum::<i64>() <= self.bound
    }

    pub fn to_constraint(&self) -> Constraint {
        let c = self.bound;
        match self.terms.as_slice() {
            [(1, x)] => Constraint::upper(*x, c),
            [(-1, x)] => Constraint::lower(*x, -c),
            [(1, x), (1, y)] => Constraint::sum(*x, *y, c),
            [(1, x), (-1, y)] => Constraint::diff(*x, *y, c),
            [(-1, x), (1, y)] => Constraint::diff(*y, *x, c),
            [(-1, x), (-1, y)] => Constraint::neg_sum(*x, *y, c),
            _ => unreachable!("parser only builds unit-coefficient forms"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign { target: usize, expr: Expr },
    Assume(Cond),
    While { cond: Cond, body: Vec<Stmt> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Assign,
    Plus,
    Minus,
    Le,
    Lt,
    Ge,
    Gt,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(v) => return write!(f, "`{v}`"),
            Tok::Assign => ":=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let err = |message: String| SyntaxError {
            line: l0,
            col: c0,
            message,
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match (c, two.as_str()) {
            (_, ":=") => (Tok::Assign, 2),
            (_, "<=") => (Tok::Le, 2),
            (_, ">=") => (Tok::Ge, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            _ if c.is_ascii_digit() => {
                let end = (i..chars.len()).find(|&k| !chars[k].is_ascii_digit()).unwrap_or(chars.len());
                let s: String = chars[i..end].iter().collect();
                let v = s.parse().map_err(|_| err(format!("integer `{s}` out of range")))?;
                (Tok::Int(v), end - i)
            }
            _ if c.is_alphabetic() || c == '_' => {
                let end = (i..chars.len())
                    .find(|&k| !(chars[k].is_alphanumeric() || chars[k] == '_'))
                    .unwrap_or(chars.len());
                (Tok::Ident(chars[i..end].iter().collect()), end - i)
            }
            _ => return Err(err(format!("unexpected character `{c}`"))),
        };
        out.push(Lexed { tok, line, col });
        i += len;
        col += len;
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: [&str; 3] = ["var", "while", "assume"];

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    vars: Vec<String>,
    declared: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        let t = &self.toks[self.pos];
        SyntaxError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error_here(format!("expected {wanted}, found {}", self.peek()))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn var(&mut self) -> Result<usize, SyntaxError> {
        let at = self.pos;
        let name = self.name()?;
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(i);
        }
        if self.declared {
            self.pos = at;
            return Err(self.error_here(format!("undeclared variable `{name}`")));
        }
        self.vars.push(name);
        Ok(self.vars.len() - 1)
    }

    fn int(&mut self) -> Result<i64, SyntaxError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        if *self.peek() == Tok::Ident("var".into()) {
            self.bump();
            loop {
                let at = self.pos;
                let name = self.name()?;
                if self.vars.contains(&name) {
                    self.pos = at;
                    return Err(self.error_here(format!("`{name}` declared twice")));
                }
                self.vars.push(name);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
            self.declared = true;
        }
        let body = self.stmts()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("a statement"));
        }
        if self.vars.is_empty() {
            return Err(self.error_here("program has no variables"));
        }
        Ok(Program {
            vars: std::mem::take(&mut self.vars),
            body,
        })
    }

    fn stmts(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while *self.peek() == Tok::Semi {
                self.bump();
            }
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                return Ok(out);
            }
            let s = self.stmt()?;
            let block = matches!(s, Stmt::While { .. });
            out.push(s);
            if !block && !matches!(self.peek(), Tok::Semi | Tok::RBrace | Tok::Eof) {
                return Err(self.unexpected("`;`"));
            }
        }
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "while" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.cond()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::LBrace)?;
                let body = self.stmts()?;
                if body.is_empty() {
                    return Err(self.error_here("loop body is empty"));
                }
                self.expect(Tok::RBrace)?;
                Ok(Stmt::While { cond, body })
            }
            Tok::Ident(k) if k == "assume" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.cond()?;
                self.expect(Tok::RParen)?;
                Ok(Stmt::Assume(cond))
            }
            Tok::Ident(k) if k == "var" => Err(self.error_here("declarations must come first")),
            _ => {
                let target = self.var()?;
                self.expect(Tok::Assign)?;
                let expr = self.expr()?;
                Ok(Stmt::Assign { target, expr })
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        if matches!(self.peek(), Tok::Int(_) | Tok::Minus) {
            return Ok(Expr::Const(self.int()?));
        }
        let y = self.var()?;
        match self.peek() {
            Tok::Plus => {
                self.bump();
                if matches!(self.peek(), Tok::Int(_)) {
                    Ok(Expr::Offset(y, self.int()?))
                } else {
                    Ok(Expr::Sum(y, self.var()?))
                }
            }
            Tok::Minus => {
                self.bump();
                match self.peek() {
                    Tok::Int(v) => {
                        let v = *v;
                        self.bump();
                        Ok(Expr::Offset(y, -v))
                    }
                    _ => Err(self.unexpected("an integer")),
                }
            }
            _ => Ok(Expr::Var(y)),
        }
    }

    fn signed_var(&mut self, first: bool) -> Result<(i64, usize), SyntaxError> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1
            }
            Tok::Plus if !first => {
                self.bump();
                1
            }
            _ if first => 1,
            _ => return Err(self.unexpected("`+` or `-`")),
        };
        Ok((sign, self.var()?))
    }

    fn cond(&mut self) -> Result<Cond, SyntaxError> {
        let mut terms = vec![self.signed_var(true)?];
        if matches!(self.peek(), Tok::Plus | Tok::Minus) {
            let at = self.pos;
            let t = self.signed_var(false)?;
            if t.1 == terms[0].1 {
                self.pos = at;
                return Err(self.error_here("a condition must relate two distinct variables"));
            }
            terms.push(t);
        }
        let op = match self.peek() {
            Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt => self.bump(),
            _ => return Err(self.unexpected("a comparison")),
        };
        let k = self.int()?;
        let flip = |terms: Vec<(i64, usize)>| terms.into_iter().map(|(s, v)| (-s, v)).collect();
        Ok(match op {
            Tok::Le => Cond { terms, bound: k },
            Tok::Lt => Cond { terms, bound: k - 1 },
            Tok::Ge => Cond {
                terms: flip(terms),
                bound: -k,
            },
            _ => Cond {
                terms: flip(terms),
                bound: -k - 1,
            },
        })
    }
}

pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    Parser {
        toks: lex(text)?,
        pos: 0,
        vars: Vec::new(),
        declared: false,
    }
    .program()
}

struct Show<'a, T>(&'a Program, &'a T);

impl fmt::Display for Show<'_, Cond> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(s, v)) in self.1.terms.iter().enumerate() {
            let name = &self.0.vars[v];
            match (k, s) {
                (0, 1) => write!(f, "{name}")?,
                (0, _) => write!(f, "-{name}")?,
                (_, 1) => write!(f, " + {name}")?,
                _ => write!(f, " - {name}")?,
            }
        }
        write!(f, " <= {}", self.1.bound)
    }
}

impl fmt::Display for Show<'_, Expr> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |i: usize| &self.0.vars[i];
        match *self.1 {
            Expr::Const(k) => write!(f, "{k}"),
            Expr::Var(y) => write!(f, "{}", v(y)),
            Expr::Offset(y, k) if k < 0 => write!(f, "{} - {}", v(y), k.unsigned_abs()),
            Expr::Offset(y, k) => write!(f, "{} + {k}", v(y)),
            Expr::Sum(y, z) => write!(f, "{} + {}", v(y), v(z)),
        }
    }
}

impl Program {
    pub fn show_cond(&self, c: &Cond) -> String {
        Show(self, c).to_string()
    }

    pub fn show_stmt_head(&self, s: &Stmt) -> String {
        match s {
            Stmt::Assign { target, expr } => format!("{} := {}", self.vars[*target], Show(self, expr)),
            Stmt::Assume(c) => format!("assume({})", Show(self, c)),
            Stmt::While { cond, .. } => format!("while ({})", Show(self, cond)),
        }
    }

    fn write_block(&self, f: &mut fmt::Formatter<'_>, body: &[Stmt], indent: usize) -> fmt::Result {
        for s in body {
            write!(f, "{:indent$}{}", "", self.show_stmt_head(s))?;
            match s {
                Stmt::While { body, .. } => {
                    writeln!(f, " {{")?;
                    self.write_block(f, body, indent + 2)?;
                    writeln!(f, "{:indent$}}}", "")?;
                }
                _ => writeln!(f, ";")?,
            }
        }
        Ok(())
    }
}

/// Canonical text: explicit declarations, one statement per line.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "var {};", self.vars.join(", "))?;
        self.write_block(f, &self.body, 0)
    }
}
