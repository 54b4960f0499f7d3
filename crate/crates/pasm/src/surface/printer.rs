//! Canonical printer. Parsing the output yields the same AST or state.

use std::fmt::Write as _;

use crate::machine::Machine;
use crate::rules::Rule;
use crate::state::{sym, State, SymId, Vocabulary};
use crate::terms::Term;

// Binding strengths, loosest first.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;
const CMP: u8 = 6;
const ADD: u8 = 7;
const MUL: u8 = 8;
const ATOM: u8 = 9;

pub fn term_to_string(vocab: &Vocabulary, t: &Term) -> String {
    let mut out = String::new();
    term(vocab, t, 0, &mut out);
    out
}

fn binop(f: SymId) -> Option<(&'static str, u8, u8, u8)> {
    // (operator, own level, left minimum, right minimum)
    Some(match f {
        sym::IFF => ("<->", IFF, IFF, IMPLIES),
        sym::IMPLIES => ("->", IMPLIES, OR, IMPLIES),
        sym::OR => ("or", OR, OR, AND),
        sym::AND => ("and", AND, AND, NOT),
        sym::EQ => ("=", CMP, ADD, ADD),
        sym::LT => ("<", CMP, ADD, ADD),
        sym::LE => ("<=", CMP, ADD, ADD),
        sym::ADD => ("+", ADD, ADD, MUL),
        sym::SUB => ("-", ADD, ADD, MUL),
        sym::MUL => ("*", MUL, MUL, ATOM),
        _ => return None,
    })
}

/// Recognizes the quantifier encodings produced by [`Term::exists`] and [`Term::forall`].
fn quantifier(t: &Term) -> Option<(&'static str, &[std::sync::Arc<str>], &Term)> {
    let (neg, inner) = match t {
        Term::App(sym::NOT, a) => (true, &a[0]),
        _ => (false, t),
    };
    let Term::App(sym::EQ, a) = inner else { return None };
    let (Term::Compr(c), Term::App(sym::EMPTY, e)) = (&a[0], &a[1]) else { return None };
    if !e.is_empty() || c.binder.vars.is_empty() {
        return None;
    }
    let head = Term::tuple(&c.binder.vars.iter().map(|v| Term::Var(v.clone())).collect::<Vec<_>>());
    if c.head != head {
        return None;
    }
    if neg {
        Some(("exists", &c.binder.vars, &c.binder.guard))
    } else {
        match &c.binder.guard {
            Term::App(sym::NOT, g) => Some(("forall", &c.binder.vars, &g[0])),
            _ => None,
        }
    }
}

fn term(vocab: &Vocabulary, t: &Term, min: u8, out: &mut String) {
    let level = level_of(t);
    let paren = level < min;
    if paren {
        out.push('(');
    }
    write_term(vocab, t, out);
    if paren {
        out.push(')');
    }
}

fn level_of(t: &Term) -> u8 {
    if quantifier(t).is_some() {
        return ATOM;
    }
    match t {
        Term::App(sym::NOT, a) if matches!(&a[0], Term::App(sym::EQ, _)) => CMP,
        Term::App(sym::NOT, _) => NOT,
        Term::App(f, _) => binop(*f).map_or(ATOM, |b| b.1),
        Term::Lit(n) if *n < 0 => ATOM,
        _ => ATOM,
    }
}

fn write_term(vocab: &Vocabulary, t: &Term, out: &mut String) {
    if let Some((q, vars, body)) = quantifier(t) {
        let _ = write!(out, "{q} {} (", join(vars));
        term(vocab, body, 0, out);
        out.push(')');
        return;
    }
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Lit(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Compr(c) => {
            out.push_str("{{ ");
            term(vocab, &c.head, 0, out);
            out.push_str(" | ");
            if !c.binder.vars.is_empty() {
                let _ = write!(out, "{} with ", join(&c.binder.vars));
            }
            term(vocab, &c.binder.guard, 0, out);
            out.push_str(" }}");
        }
        Term::App(sym::NOT, a) => match &a[0] {
            Term::App(sym::EQ, e) => {
                term(vocab, &e[0], ADD, out);
                out.push_str(" != ");
                term(vocab, &e[1], ADD, out);
            }
            inner => {
                out.push_str("not ");
                term(vocab, inner, NOT, out);
            }
        },
        Term::App(sym::PAIR, a) => {
            out.push('(');
            term(vocab, &a[0], 0, out);
            let mut rest = &a[1];
            while let Term::App(sym::PAIR, b) = rest {
                out.push_str(", ");
                term(vocab, &b[0], 0, out);
                rest = &b[1];
            }
            out.push_str(", ");
            term(vocab, rest, 0, out);
            out.push(')');
        }
        Term::App(f, a) => {
            if let Some((op, _, lmin, rmin)) = binop(*f) {
                term(vocab, &a[0], lmin, out);
                let _ = write!(out, " {op} ");
                term(vocab, &a[1], rmin, out);
                return;
            }
            out.push_str(vocab.name(*f));
            if !a.is_empty() {
                out.push('(');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    term(vocab, x, 0, out);
                }
                out.push(')');
            }
        }
    }
}

fn join(vars: &[std::sync::Arc<str>]) -> String {
    vars.iter().map(|v| &**v).collect::<Vec<_>>().join(", ")
}

pub fn rule_to_string(vocab: &Vocabulary, r: &Rule) -> String {
    let mut out = String::new();
    rule(vocab, r, 0, &mut out);
    out
}

fn indent(out: &mut String, depth: usize) {
    out.push_str(&"  ".repeat(depth));
}

/// A rule body: a `Par` with two or more members is printed as a plain sequence.
fn body(vocab: &Vocabulary, r: &Rule, depth: usize, out: &mut String) {
    match r {
        Rule::Par(rs) if rs.len() >= 2 => rs.iter().for_each(|r| rule(vocab, r, depth, out)),
        _ => rule(vocab, r, depth, out),
    }
}

fn rule(vocab: &Vocabulary, r: &Rule, depth: usize, out: &mut String) {
    indent(out, depth);
    match r {
        Rule::Assign { sym, args, rhs } => {
            out.push_str(vocab.name(*sym));
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    term(vocab, a, 0, out);
                }
                out.push(')');
            }
            out.push_str(" := ");
            term(vocab, rhs, 0, out);
            out.push('\n');
        }
        Rule::Par(rs) if rs.is_empty() => out.push_str("skip\n"),
        Rule::Par(rs) => {
            out.push_str("par\n");
            rs.iter().for_each(|r| rule(vocab, r, depth + 1, out));
            indent(out, depth);
            out.push_str("endpar\n");
        }
        Rule::If { guard, body: b } => {
            let _ = writeln!(out, "if {} then", term_to_string(vocab, guard));
            body(vocab, b, depth + 1, out);
            indent(out, depth);
            out.push_str("endif\n");
        }
        Rule::Forall { binder, body: b } => {
            let _ = writeln!(out, "forall {} with {} do", join(&binder.vars), term_to_string(vocab, &binder.guard));
            body(vocab, b, depth + 1, out);
            indent(out, depth);
            out.push_str("enddo\n");
        }
        Rule::Import { var, body: b, .. } => {
            let _ = writeln!(out, "import {var} do");
            body(vocab, b, depth + 1, out);
            indent(out, depth);
            out.push_str("enddo\n");
        }
    }
}

pub fn vocab_to_string(v: &Vocabulary) -> String {
    let mut out = String::from("vocab\n");
    if v.atomic_pairs || v.atomic_multisets {
        out.push_str("  atomic");
        if v.atomic_pairs {
            out.push_str(" pairs");
        }
        if v.atomic_multisets {
            out.push_str(" multisets");
        }
        out.push('\n');
    }
    for (_, s) in v.user_symbols() {
        let _ = writeln!(out, "  {}", s.declaration());
    }
    out.push_str("end\n");
    out
}

pub fn print_machine(m: &Machine) -> String {
    let mut out = format!("machine {}\n", m.name);
    out.push_str(&vocab_to_string(&m.vocab));
    out.push_str("rule\n");
    body(&m.vocab, &m.rule, 1, &mut out);
    out
}

pub fn print_state(s: &State) -> String {
    let mut out = vocab_to_string(s.vocab());
    let floor = s
        .carrier()
        .iter()
        .filter_map(|v| v.as_atom()?.reserve_index())
        .map(|n| n + 1)
        .max()
        .unwrap_or(0);
    if s.reserve_next() != floor {
        let _ = writeln!(out, "reserve {}", s.reserve_next());
    }
    out.push_str("carrier");
    for (i, v) in s.carrier().iter().enumerate() {
        if i > 0 && i % 12 == 0 {
            out.push_str("\n       ");
        }
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    let vocab = s.vocab();
    for (id, sy) in vocab.user_symbols() {
        if !vocab.is_table(id) {
            continue;
        }
        for (args, v) in s.table(id) {
            out.push_str("fun ");
            out.push_str(&sy.name);
            if !args.is_empty() {
                let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
                let _ = write!(out, "({})", a.join(", "));
            }
            let _ = writeln!(out, " = {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::is_boolean_term;
    use crate::state::{SymKind, Symbol};
    use crate::surface::parse_term;
    use proptest::prelude::*;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn vocab() -> Vocabulary {
        Vocabulary::new()
            .with(Symbol::new("E", 2, SymKind::Bridge).relational())
            .unwrap()
            .with(Symbol::new("f", 1, SymKind::Primary))
            .unwrap()
            .with(Symbol::new("c", 0, SymKind::Primary))
            .unwrap()
            .with(Symbol::new("g", 2, SymKind::Secondary))
            .unwrap()
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let v = vocab();
        let (e, f, c, g) = (v.get("E").unwrap(), v.get("f").unwrap(), v.get("c").unwrap(), v.get("g").unwrap());
        let var = prop::sample::select(vec!["x", "y"]).prop_map(Term::var);
        let leaf = prop_oneof![
            var.clone(),
            (-3i64..20).prop_map(Term::Lit),
            Just(Term::constant(c)),
            prop::sample::select(vec![sym::TRUE, sym::FALSE, sym::UNDEF, sym::EMPTY]).prop_map(Term::constant),
            (var.clone(), var.clone()).prop_map(move |(a, b)| Term::app(e, vec![a, b])),
            var.prop_map(move |a| Term::app(f, vec![a])),
        ];
        let unary = vec![sym::NOT, sym::FIRST, sym::SECOND, sym::SINGLETON, sym::ASSET, sym::BOOLE];
        let binary = vec![
            sym::EQ, sym::AND, sym::OR, sym::IMPLIES, sym::IFF, sym::UNION, sym::PAIR, sym::ADD, sym::SUB, sym::MUL,
            sym::LT, sym::LE,
        ];
        leaf.prop_recursive(4, 24, 3, move |inner| {
            let vars = prop::sample::select(vec!["x", "y", "z"]);
            prop_oneof![
                (prop::sample::select(unary.clone()), inner.clone()).prop_map(|(f, a)| Term::app(f, vec![a])),
                (prop::sample::select(binary.clone()), inner.clone(), inner.clone())
                    .prop_map(|(f, a, b)| Term::app(f, vec![a, b])),
                (inner.clone(), inner.clone()).prop_map(move |(a, b)| Term::app(g, vec![a, b])),
                (inner.clone(), prop::collection::vec(vars, 0..3), inner.clone()).prop_map(|(h, vs, gd)| {
                    let mut vs: Vec<Arc<str>> = vs.into_iter().map(Arc::from).collect();
                    vs.dedup();
                    Term::compr(h, vs, gd)
                }),
            ]
        })
    }

    /// Makes binders unique and guards Boolean so the term is accepted by the parser.
    fn tidy(v: &Vocabulary, t: &Term, n: &mut usize) -> Term {
        match t {
            Term::Compr(c) => {
                let mut map = BTreeMap::new();
                let mut vars = Vec::new();
                for x in &c.binder.vars {
                    let fresh: Arc<str> = Arc::from(format!("b{n}").as_str());
                    *n += 1;
                    map.insert(x.clone(), Term::Var(fresh.clone()));
                    vars.push(fresh);
                }
                let head = tidy(v, &c.head.subst(&map), n);
                let mut guard = tidy(v, &c.binder.guard.subst(&map), n);
                if !is_boolean_term(v, &guard) {
                    guard = Term::eq(guard, Term::tt());
                }
                Term::compr(head, vars, guard)
            }
            Term::App(f, a) => Term::App(*f, a.iter().map(|x| tidy(v, x, n)).collect()),
            _ => t.clone(),
        }
    }

    proptest! {
        #[test]
        fn printed_terms_parse_back(t in arb_term()) {
            let v = vocab();
            let t = tidy(&v, &t, &mut 0);
            let text = term_to_string(&v, &t);
            let back = parse_term(&text, &v, &["x", "y"]);
            prop_assert_eq!(back.as_ref().ok(), Some(&t), "{} => {:?}", text, back);
        }
    }

    #[test]
    fn quantifiers_print_as_sugar() {
        let v = vocab();
        let t = parse_term("forall x (exists y (E(x, y)))", &v, &[]).unwrap();
        assert_eq!(term_to_string(&v, &t), "forall x (exists y (E(x, y)))");
        let u = parse_term("not (x = y) and (1 + 2) * 3 = 9 -> x != c", &v, &["x", "y"]).unwrap();
        assert_eq!(term_to_string(&v, &u), "x != y and (1 + 2) * 3 = 9 -> x != c");
    }
}
