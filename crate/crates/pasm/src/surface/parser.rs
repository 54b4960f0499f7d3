//! Recursive-descent parser for machine files, state files and terms.
//!
//! Scope and typing errors are reported with the span of the offending
//! construct. Syntax errors stop the parse; scope, arity, stratification and
//! target errors are collected and reported together.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Diagnostics, Span};
use crate::machine::Machine;
use crate::rules::{is_boolean_term, Rule};
use crate::state::{sym, State, SymId, SymKind, Symbol, Vocabulary};
use crate::terms::{stratum, Stratum, Term};
use crate::values::{Atom, Multiset, Value};

pub const KEYWORDS: &[&str] = &[
    "vocab", "end", "rule", "machine", "par", "endpar", "if", "then", "endif", "forall", "exists", "with", "do",
    "enddo", "import", "skip", "and", "or", "not", "true", "false", "undef", "emptyset", "carrier", "fun", "over",
];

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'v> {
    toks: Vec<Token>,
    pos: usize,
    vocab: &'v Vocabulary,
    scope: Vec<Arc<str>>,
    errors: Vec<Diagnostic>,
}

impl<'v> Parser<'v> {
    fn new(toks: Vec<Token>, vocab: &'v Vocabulary) -> Parser<'v> {
        Parser { toks, pos: 0, vocab, scope: Vec::new(), errors: Vec::new() }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::new(self.span(), format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<Span> {
        if self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.errors.push(Diagnostic::new(span, msg));
    }

    fn finish<T>(self, v: T) -> Result<T, Diagnostics> {
        if self.errors.is_empty() {
            Ok(v)
        } else {
            Err(Diagnostics(self.errors))
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<(Term, Span)> {
        let (mut lhs, mut sp) = self.implies()?;
        while self.eat(&Tok::DArrow) {
            let (rhs, rs) = self.implies()?;
            lhs = Term::App(sym::IFF, vec![lhs, rhs]);
            sp = sp.to(rs);
        }
        Ok((lhs, sp))
    }

    fn implies(&mut self) -> PResult<(Term, Span)> {
        let (lhs, sp) = self.or()?;
        if self.eat(&Tok::Arrow) {
            let (rhs, rs) = self.implies()?;
            return Ok((Term::App(sym::IMPLIES, vec![lhs, rhs]), sp.to(rs)));
        }
        Ok((lhs, sp))
    }

    fn or(&mut self) -> PResult<(Term, Span)> {
        let (mut lhs, mut sp) = self.and()?;
        while self.eat_kw("or") {
            let (rhs, rs) = self.and()?;
            lhs = Term::or(lhs, rhs);
            sp = sp.to(rs);
        }
        Ok((lhs, sp))
    }

    fn and(&mut self) -> PResult<(Term, Span)> {
        let (mut lhs, mut sp) = self.not()?;
        while self.eat_kw("and") {
            let (rhs, rs) = self.not()?;
            lhs = Term::and(lhs, rhs);
            sp = sp.to(rs);
        }
        Ok((lhs, sp))
    }

    fn not(&mut self) -> PResult<(Term, Span)> {
        if self.is_kw("not") {
            let sp = self.bump().span;
            let (t, ts) = self.not()?;
            return Ok((Term::not(t), sp.to(ts)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> PResult<(Term, Span)> {
        let (lhs, sp) = self.add()?;
        let op = match self.peek() {
            Tok::Eq => sym::EQ,
            Tok::Ne => sym::NOT,
            Tok::Lt => sym::LT,
            Tok::Le => sym::LE,
            _ => return Ok((lhs, sp)),
        };
        self.bump();
        let (rhs, rs) = self.add()?;
        if matches!(self.peek(), Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le) {
            return Err(Diagnostic::new(self.span(), "comparisons do not chain; add parentheses"));
        }
        let t = if op == sym::NOT { Term::not(Term::eq(lhs, rhs)) } else { Term::App(op, vec![lhs, rhs]) };
        Ok((t, sp.to(rs)))
    }

    fn add(&mut self) -> PResult<(Term, Span)> {
        let (mut lhs, mut sp) = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => sym::ADD,
                Tok::Minus => sym::SUB,
                _ => return Ok((lhs, sp)),
            };
            self.bump();
            let (rhs, rs) = self.mul()?;
            lhs = Term::App(op, vec![lhs, rhs]);
            sp = sp.to(rs);
        }
    }

    fn mul(&mut self) -> PResult<(Term, Span)> {
        let (mut lhs, mut sp) = self.primary()?;
        while self.eat(&Tok::Star) {
            let (rhs, rs) = self.primary()?;
            lhs = Term::App(sym::MUL, vec![lhs, rhs]);
            sp = sp.to(rs);
        }
        Ok((lhs, sp))
    }

    fn var_list(&mut self) -> PResult<Vec<(Arc<str>, Span)>> {
        let mut out = Vec::new();
        loop {
            let (n, sp) = self.name("a variable name")?;
            out.push((Arc::from(n.as_str()), sp));
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    /// Brings variables into scope, reporting shadowing and symbol clashes.
    fn bind(&mut self, vars: &[(Arc<str>, Span)]) -> Vec<Arc<str>> {
        for (v, sp) in vars {
            if self.scope.contains(v) {
                self.error(*sp, format!("variable `{v}` is already bound here"));
            } else if self.vocab.get(v).is_some() {
                self.error(*sp, format!("`{v}` is a declared symbol and cannot be used as a variable"));
            }
            self.scope.push(v.clone());
        }
        vars.iter().map(|(v, _)| v.clone()).collect()
    }

    fn unbind(&mut self, n: usize) {
        self.scope.truncate(self.scope.len() - n);
    }

    fn primary(&mut self) -> PResult<(Term, Span)> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok((Term::Lit(n), start))
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                let n = self.int()?;
                Ok((Term::Lit(n), start.to(self.prev_span())))
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.term()?.0];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?.0);
                }
                let end = self.expect(&Tok::RParen, "`)`")?;
                Ok((Term::tuple(&items), start.to(end)))
            }
            Tok::LBrace2 => self.comprehension(),
            Tok::Atom(_) | Tok::Fresh(_) => {
                Err(Diagnostic::new(start, "atom literals are not allowed in rules; use a nullary symbol"))
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" | "undef" | "emptyset" => {
                    self.bump();
                    let f = self.vocab.get(&s).expect("obligatory symbol");
                    Ok((Term::constant(f), start))
                }
                "exists" | "forall" => {
                    self.bump();
                    let vars = self.var_list()?;
                    let names = self.bind(&vars);
                    self.expect(&Tok::LParen, "`(` after the quantified variables")?;
                    let body = self.term();
                    self.unbind(names.len());
                    let (body, bs) = body?;
                    self.expect(&Tok::RParen, "`)`")?;
                    if !is_boolean_term(self.vocab, &body) {
                        self.error(bs, "quantifier body is not a Boolean term");
                    }
                    let t = if s == "exists" { Term::exists(names, body) } else { Term::forall(names, body) };
                    Ok((t, start.to(self.prev_span())))
                }
                kw if KEYWORDS.contains(&kw) => Err(self.unexpected("a term")),
                _ => self.name_or_app(),
            },
            _ => Err(self.unexpected("a term")),
        }
    }

    fn name_or_app(&mut self) -> PResult<(Term, Span)> {
        let (name, sp) = self.name("a name")?;
        let var: Arc<str> = Arc::from(name.as_str());
        if self.scope.contains(&var) {
            if *self.peek() == Tok::LParen {
                return Err(Diagnostic::new(sp, format!("variable `{name}` cannot be applied to arguments")));
            }
            return Ok((Term::Var(var), sp));
        }
        let Some(f) = self.vocab.get(&name) else {
            if *self.peek() == Tok::LParen {
                return Err(Diagnostic::new(sp, format!("unknown symbol `{name}`")));
            }
            self.error(sp, format!("unbound variable `{name}`"));
            return Ok((Term::Var(var), sp));
        };
        let mut args = Vec::new();
        let mut end = sp;
        if self.eat(&Tok::LParen) {
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term()?.0);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            end = self.expect(&Tok::RParen, "`)` or `,`")?;
        }
        let arity = self.vocab.symbol(f).arity;
        let full = sp.to(end);
        if arity != args.len() {
            self.error(full, format!("`{name}` expects {arity} arguments, got {}", args.len()));
            return Ok((Term::App(f, args), full));
        }
        let t = Term::App(f, args);
        if let Err(e) = stratum(self.vocab, &t) {
            self.error(full, e.to_string());
        }
        Ok((t, full))
    }

    /// `{{ head | x, y with guard }}`, `{{ head | guard }} over x, y` or
    /// `{{ head | guard }}`. The binder follows the head, so the binder is
    /// parsed first and the head second.
    fn comprehension(&mut self) -> PResult<(Term, Span)> {
        let open = self.bump().span;
        let head_start = self.pos;
        let mut depth = 0usize;
        let mut bar = None;
        for i in self.pos..self.toks.len() {
            match self.toks[i].tok {
                Tok::LParen | Tok::LBrace2 => depth += 1,
                Tok::RParen => depth = depth.saturating_sub(1),
                Tok::RBrace2 if depth == 0 => break,
                Tok::RBrace2 => depth -= 1,
                Tok::Bar if depth == 0 => {
                    bar = Some(i);
                    break;
                }
                Tok::Eof => break,
                _ => {}
            }
        }
        let Some(bar) = bar else {
            return Err(Diagnostic::new(open, "comprehension is missing `|`"));
        };
        self.pos = bar + 1;
        let has_vars = {
            let mut k = 0;
            loop {
                match (self.peek_at(k), self.peek_at(k + 1)) {
                    (Tok::Ident(_), Tok::Comma) => k += 2,
                    (Tok::Ident(_), Tok::Ident(w)) if w == "with" => break true,
                    _ => break false,
                }
            }
        };
        let over = self.over_clause(bar + 1);
        let vars = if has_vars {
            let v = self.var_list()?;
            self.expect_kw("with")?;
            v
        } else if let Some((at, _)) = over {
            let save = self.pos;
            self.pos = at;
            let v = self.var_list()?;
            self.pos = save;
            v
        } else {
            Vec::new()
        };
        let names = self.bind(&vars);
        let parts = (|| {
            let (guard, gs) = self.term()?;
            let close = self.expect(&Tok::RBrace2, "`}}`")?;
            let end_pos = self.pos;
            self.pos = head_start;
            let (head, _) = self.term()?;
            if self.pos != bar {
                return Err(self.unexpected("`|`"));
            }
            self.pos = end_pos;
            Ok((guard, gs, close, head))
        })();
        self.unbind(names.len());
        let (guard, gs, mut close, head) = parts?;
        if let Some((_, end)) = over.filter(|_| !has_vars) {
            close = self.toks[end - 1].span;
            self.pos = end;
        }
        if !is_boolean_term(self.vocab, &guard) {
            self.error(gs, "comprehension guard is not a Boolean term");
        }
        Ok((Term::compr(head, names, guard), open.to(close)))
    }

    /// For the postfix binder form `{{ head | guard }} over x, y`: the
    /// position of the first variable and the position just past the list.
    fn over_clause(&self, from: usize) -> Option<(usize, usize)> {
        let mut depth = 0usize;
        let mut i = from;
        loop {
            match self.toks.get(i)?.tok {
                Tok::LParen | Tok::LBrace2 => depth += 1,
                Tok::RParen => depth = depth.saturating_sub(1),
                Tok::RBrace2 if depth == 0 => break,
                Tok::RBrace2 => depth -= 1,
                Tok::Eof => return None,
                _ => {}
            }
            i += 1;
        }
        match &self.toks.get(i + 1)?.tok {
            Tok::Ident(w) if w == "over" => {}
            _ => return None,
        }
        let start = i + 2;
        let mut k = start;
        loop {
            if !matches!(self.toks.get(k)?.tok, Tok::Ident(_)) {
                return None;
            }
            k += 1;
            if self.toks.get(k)?.tok != Tok::Comma {
                return Some((start, k));
            }
            k += 1;
        }
    }

    fn guard(&mut self) -> PResult<Term> {
        let (g, sp) = self.term()?;
        if !is_boolean_term(self.vocab, &g) {
            self.error(sp, "guard is not a Boolean term");
        }
        Ok(g)
    }

    // ---- rules ----

    fn rule_seq(&mut self, closers: &[&str]) -> PResult<Vec<Rule>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(out),
                Tok::Ident(s) if closers.contains(&s.as_str()) => return Ok(out),
                _ => out.push(self.rule()?),
            }
        }
    }

    fn block(&mut self, opener: &str, open: Span, closer: &str) -> PResult<Rule> {
        let mut rs = self.rule_seq(&[closer])?;
        if *self.peek() == Tok::Eof {
            return Err(Diagnostic::new(open, format!("`{opener}` is never closed by `{closer}`")));
        }
        self.bump();
        if rs.is_empty() {
            return Err(Diagnostic::new(open, format!("empty `{opener}` body; write `skip`")));
        }
        Ok(if rs.len() == 1 { rs.pop().expect("one rule") } else { Rule::Par(rs) })
    }

    fn rule(&mut self) -> PResult<Rule> {
        let start = self.span();
        let Tok::Ident(word) = self.peek().clone() else {
            return Err(self.unexpected("a rule"));
        };
        match word.as_str() {
            "skip" => {
                self.bump();
                Ok(Rule::skip())
            }
            "par" => {
                self.bump();
                let rs = self.rule_seq(&["endpar"])?;
                if *self.peek() == Tok::Eof {
                    return Err(Diagnostic::new(start, "`par` is never closed by `endpar`"));
                }
                self.bump();
                Ok(Rule::Par(rs))
            }
            "if" => {
                self.bump();
                let g = self.guard()?;
                self.expect_kw("then")?;
                let body = self.block("if", start, "endif")?;
                Ok(Rule::if_then(g, body))
            }
            "forall" => {
                self.bump();
                let vars = self.var_list()?;
                let names = self.bind(&vars);
                let inner = (|| {
                    let g = if self.eat_kw("with") { self.guard()? } else { Term::tt() };
                    self.expect_kw("do")?;
                    let body = self.block("forall", start, "enddo")?;
                    Ok((g, body))
                })();
                self.unbind(names.len());
                let (g, body) = inner?;
                Ok(Rule::forall(names, g, body))
            }
            "import" => {
                self.bump();
                let (v, vs) = self.name("a variable name")?;
                let names = self.bind(&[(Arc::from(v.as_str()), vs)]);
                let inner = (|| {
                    self.expect_kw("do")?;
                    self.block("import", start, "enddo")
                })();
                self.unbind(1);
                Ok(Rule::import(&names[0], inner?))
            }
            w if KEYWORDS.contains(&w) => Err(Diagnostic::new(start, format!("unexpected `{w}`"))),
            _ => self.assignment(),
        }
    }

    fn assignment(&mut self) -> PResult<Rule> {
        let (name, sp) = self.name("an update target")?;
        let Some(f) = self.vocab.get(&name) else {
            return Err(Diagnostic::new(sp, format!("unknown symbol `{name}`")));
        };
        let mut args = Vec::new();
        let mut arg_spans = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let (t, ts) = self.term()?;
                args.push(t);
                arg_spans.push(ts);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)` or `,`")?;
        }
        let target = sp.to(self.prev_span());
        self.expect(&Tok::Assign, "`:=`")?;
        let (rhs, _) = self.term()?;
        let s = self.vocab.symbol(f);
        if Vocabulary::is_obligatory(f) || !s.dynamic || s.builtin.is_some() {
            self.error(sp, format!("`{name}` is static and cannot be updated"));
        }
        if s.arity != args.len() {
            self.error(target, format!("`{name}` expects {} arguments, got {}", s.arity, args.len()));
        } else if matches!(s.kind, SymKind::Primary | SymKind::Bridge) {
            for (a, asp) in args.iter().zip(&arg_spans) {
                if stratum(self.vocab, a) == Ok(Stratum::Bridge) {
                    self.error(*asp, format!("arguments of the {} symbol `{name}` must be point terms", s.kind.as_str()));
                }
            }
        }
        Ok(Rule::assign(f, args, rhs))
    }

    // ---- vocabulary and values ----

    fn vocab_section(&mut self) -> PResult<Vocabulary> {
        self.expect_kw("vocab")?;
        let mut v = Vocabulary::new();
        loop {
            if self.eat_kw("end") {
                return Ok(v);
            }
            if self.is_kw("atomic") && *self.peek_at(1) != Tok::Slash {
                self.bump();
                while let Tok::Ident(w) = self.peek().clone() {
                    match w.as_str() {
                        "pairs" => v.atomic_pairs = true,
                        "multisets" => v.atomic_multisets = true,
                        _ => break,
                    }
                    self.bump();
                }
                continue;
            }
            let (name, sp) = match self.peek() {
                Tok::Eof => return Err(self.unexpected("`end` closing the vocabulary")),
                _ => self.name("a symbol declaration")?,
            };
            self.expect(&Tok::Slash, "`/` and an arity")?;
            let arity = self.int()?;
            if !(0..=16).contains(&arity) {
                return Err(Diagnostic::new(self.prev_span(), "arity must be between 0 and 16"));
            }
            let kind = match self.peek() {
                Tok::Ident(k) => SymKind::parse(k),
                _ => None,
            };
            let Some(kind) = kind else {
                return Err(self.unexpected("one of primary, secondary, bridge, background"));
            };
            self.bump();
            let mut s = Symbol::new(&name, arity as usize, kind);
            loop {
                if self.eat_kw("dynamic") {
                    s.dynamic = true;
                } else if self.eat_kw("static") {
                    s.dynamic = false;
                } else if self.eat_kw("relational") {
                    s.relational = true;
                } else if self.is_kw("builtin") {
                    self.bump();
                    self.expect(&Tok::Eq, "`=` after builtin")?;
                    let (b, bs) = match self.peek().clone() {
                        Tok::Ident(b) => (b, self.bump().span),
                        _ => return Err(self.unexpected("a builtin name")),
                    };
                    s = s.with_builtin(&b).map_err(|e| Diagnostic::new(bs, e.to_string()))?;
                } else {
                    break;
                }
            }
            v.add(s).map_err(|e| Diagnostic::new(sp, e.to_string()))?;
        }
    }

    fn value(&mut self) -> PResult<Value> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Atom(a) => {
                self.bump();
                Ok(Value::atom(&a))
            }
            Tok::Fresh(n) => {
                self.bump();
                Ok(Value::Atom(Atom::fresh(n)))
            }
            Tok::Int(_) | Tok::Minus => Ok(Value::Int(self.int()?)),
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.value()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.value()?);
                }
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Value::tuple(&items))
            }
            Tok::LBrace2 => {
                self.bump();
                let mut counts: BTreeMap<Value, u64> = BTreeMap::new();
                if !self.eat(&Tok::RBrace2) {
                    loop {
                        let v = self.value()?;
                        let n = if self.eat(&Tok::Colon) { self.int()? } else { 1 };
                        if n < 1 {
                            return Err(Diagnostic::new(self.prev_span(), "multiplicities must be positive"));
                        }
                        *counts.entry(v).or_insert(0) += n as u64;
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RBrace2, "`}}`")?;
                }
                Ok(Value::multiset(Multiset::from_map(counts)))
            }
            Tok::Ident(w) => {
                self.bump();
                match w.as_str() {
                    "true" => Ok(Value::Bool(true)),
                    "false" => Ok(Value::Bool(false)),
                    "undef" => Ok(Value::Undef),
                    "emptyset" => Ok(Value::empty_multiset()),
                    _ => Err(Diagnostic::new(sp, format!("expected a value, found `{w}`; atoms are written `@{w}`"))),
                }
            }
            _ => Err(self.unexpected("a value")),
        }
    }
}

fn lexed(src: &str) -> Result<Vec<Token>, Diagnostics> {
    lex(src).map_err(Diagnostics::from)
}

/// Parses a machine file: optional `machine NAME`, a `vocab ... end`
/// section, then `rule` followed by the rule body.
pub fn parse_machine(src: &str) -> Result<Machine, Diagnostics> {
    let toks = lexed(src)?;
    let empty = Vocabulary::new();
    let mut head = Parser::new(toks.clone(), &empty);
    let name = if head.eat_kw("machine") { head.name("a machine name")?.0 } else { "machine".to_string() };
    let vocab = head.vocab_section()?;
    let pos = head.pos;
    let mut p = Parser::new(toks, &vocab);
    p.pos = pos;
    p.expect_kw("rule")?;
    let mut rs = p.rule_seq(&[])?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input").into());
    }
    if rs.is_empty() {
        return Err(Diagnostic::new(p.span(), "the rule section is empty; write `skip`").into());
    }
    let rule = if rs.len() == 1 { rs.pop().expect("one rule") } else { Rule::Par(rs) };
    let rule = p.finish(rule)?;
    Machine::new(&name, Arc::new(vocab.clone()), rule)
        .map_err(|errs| Diagnostics(errs.into_iter().map(|e| Diagnostic::new(Span::default(), e.to_string())).collect()))
}

/// Parses a closed or open term against a vocabulary; `vars` are in scope.
pub fn parse_term(src: &str, vocab: &Vocabulary, vars: &[&str]) -> Result<Term, Diagnostics> {
    let mut p = Parser::new(lexed(src)?, vocab);
    p.scope = vars.iter().map(|v| Arc::from(*v)).collect();
    let (t, _) = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input").into());
    }
    p.finish(t)
}

/// Parses a state file that carries its own `vocab` section.
pub fn parse_state(src: &str) -> Result<State, Diagnostics> {
    parse_state_with(src, None)
}

/// Parses a state file. The `vocab` section may be omitted when a
/// vocabulary is supplied; when both are present they must agree.
pub fn parse_state_with(src: &str, given: Option<&Arc<Vocabulary>>) -> Result<State, Diagnostics> {
    let toks = lexed(src)?;
    let empty = Vocabulary::new();
    let mut p = Parser::new(toks, &empty);
    let vocab: Arc<Vocabulary> = if p.is_kw("vocab") {
        let sp = p.span();
        let v = p.vocab_section()?;
        if let Some(g) = given {
            if **g != v {
                return Err(Diagnostic::new(sp, "the state's vocabulary differs from the machine's").into());
            }
            g.clone()
        } else {
            Arc::new(v)
        }
    } else {
        match given {
            Some(g) => g.clone(),
            None => return Err(p.unexpected("a `vocab` section").into()),
        }
    };
    let mut s = State::new(vocab.clone());
    let mut reserve = None;
    let mut entries: Vec<(SymId, Vec<Value>, Value, Span)> = Vec::new();
    loop {
        let sp = p.span();
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(w) if w == "reserve" => {
                p.bump();
                let n = p.int()?;
                if n < 0 {
                    return Err(Diagnostic::new(p.prev_span(), "reserve counter must be non-negative").into());
                }
                reserve = Some(n as u64);
            }
            Tok::Ident(w) if w == "carrier" => {
                p.bump();
                while !matches!(p.peek(), Tok::Eof | Tok::Ident(_)) {
                    let vs = p.span();
                    let v = p.value()?;
                    if !matches!(v, Value::Atom(_) | Value::Int(_)) {
                        return Err(Diagnostic::new(vs, format!("{v} cannot be a carrier element")).into());
                    }
                    s.add_element(v).map_err(|e| Diagnostic::new(vs, e.to_string()))?;
                }
            }
            Tok::Ident(w) if w == "fun" => {
                p.bump();
                let (name, ns) = p.name("a symbol name")?;
                let Some(f) = vocab.get(&name) else {
                    return Err(Diagnostic::new(ns, format!("unknown symbol `{name}`")).into());
                };
                let mut args = Vec::new();
                if p.eat(&Tok::LParen) {
                    loop {
                        args.push(p.value()?);
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    p.expect(&Tok::RParen, "`)` or `,`")?;
                }
                p.expect(&Tok::Eq, "`=`")?;
                let v = p.value()?;
                entries.push((f, args, v, sp.to(p.prev_span())));
            }
            _ => return Err(p.unexpected("`carrier`, `fun` or `reserve`").into()),
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (f, args, v, sp) in entries {
        let symb = vocab.symbol(f);
        if !vocab.is_table(f) {
            p.error(sp, format!("`{}` has no stored interpretation", symb.name));
            continue;
        }
        if symb.arity != args.len() {
            p.error(sp, format!("`{}` expects {} arguments, got {}", symb.name, symb.arity, args.len()));
            continue;
        }
        if !seen.insert((f, args.clone())) {
            p.error(sp, "this location is defined twice");
            continue;
        }
        if let Some(msg) = range_problem(&s, symb.kind, &args, &v) {
            p.error(sp, msg);
            continue;
        }
        s.set(f, args, v).expect("checked above");
    }
    if let Some(n) = reserve {
        s.set_reserve_next(n);
    }
    p.finish(s)
}

fn range_problem(s: &State, kind: SymKind, args: &[Value], v: &Value) -> Option<String> {
    match kind {
        SymKind::Primary | SymKind::Bridge => {
            if let Some(a) = args.iter().find(|a| !s.in_carrier(a)) {
                return Some(format!("argument {a} is not in the carrier"));
            }
            let ok = if kind == SymKind::Primary {
                s.in_carrier(v) || matches!(v, Value::Bool(_) | Value::Undef)
            } else {
                s.is_atomic(v)
            };
            (!ok).then(|| format!("value {v} is outside the range of a {} symbol", kind.as_str()))
        }
        SymKind::Secondary | SymKind::Background => {
            args.iter().chain([v]).find(|x| !s.is_atomic(x)).map(|x| format!("{x} is not an element of the base set"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPLEMENT: &str = "machine complement
vocab
  V/1 bridge static relational
  E/2 bridge dynamic relational
end
rule
  forall x, y with V(x) and V(y) do
    if x != y then E(x, y) := not E(x, y) endif
  enddo
";

    #[test]
    fn parses_a_machine() {
        let m = parse_machine(COMPLEMENT).unwrap();
        assert_eq!(m.name, "complement");
        assert!(matches!(m.rule, Rule::Forall { .. }));
    }

    #[test]
    fn unclosed_par_reports_its_opener() {
        let src = "vocab\n  c/0 bridge dynamic\nend\nrule\n  par\n    c := 1\n";
        let d = parse_machine(src).unwrap_err();
        assert_eq!(d.0.len(), 1);
        assert_eq!(&src[d.0[0].span.start..d.0[0].span.end], "par");
    }

    #[test]
    fn stray_closer() {
        let src = "vocab c/0 bridge dynamic end rule c := 1 endpar";
        let d = parse_machine(src).unwrap_err();
        assert_eq!(d.0.len(), 1);
        assert!(d.0[0].message.contains("endpar"));
    }

    #[test]
    fn unbound_variable_has_a_span() {
        let src = "vocab c/0 bridge dynamic end rule c := zz";
        let d = parse_machine(src).unwrap_err();
        assert_eq!(&src[d.0[0].span.start..d.0[0].span.end], "zz");
        assert!(d.0[0].message.contains("unbound"));
    }

    #[test]
    fn static_target_and_stratification() {
        let src = "vocab f/1 primary static\n g/1 primary dynamic end rule forall x do f(x) := x g(1) := x enddo";
        let d = parse_machine(src).unwrap_err();
        assert_eq!(d.0.len(), 2, "{d}");
    }

    #[test]
    fn comprehension_head_sees_binder() {
        let v = parse_machine(COMPLEMENT).unwrap().vocab;
        let t = parse_term("{{ (x, y) | x, y with E(x, y) }}", &v, &[]).unwrap();
        let Term::Compr(c) = &t else { panic!() };
        assert_eq!(c.binder.vars.len(), 2);
        assert!(t.free_vars().is_empty());
        let post = parse_term("{{ (x, y) | E(x, y) }} over x, y", &v, &[]).unwrap();
        assert_eq!(post, t);
        let nested = parse_term("{{ {{ y | y with E(x, y) }} | x with V(x) }}", &v, &[]).unwrap();
        assert!(nested.free_vars().is_empty());
    }

    #[test]
    fn state_file_round_values() {
        let src = "vocab\n  E/2 bridge dynamic relational\n  w/1 bridge dynamic\nend\ncarrier @a @b 3\nfun E(@a, @b) = true\nfun w(@a) = 7\n";
        let s = parse_state(src).unwrap();
        assert_eq!(s.carrier().len(), 3);
        assert_eq!(s.lookup_name("w", &[Value::atom("a")]).unwrap(), Value::Int(7));
        let bad = "vocab E/2 bridge dynamic relational end carrier @a fun E(@a, @z) = true";
        assert!(parse_state(bad).is_err());
        let twice = "vocab w/0 bridge dynamic end fun w = 1 fun w = 2";
        assert!(parse_state(twice).is_err());
    }
}
