//! Sequents and derivation trees for full and restricted PNL.
//!
//! Derivation files are s-expressions:
//!
//! ```text
//! (proof :goal "forall Y:iota#perm(+{},-{}). eq(Y, Y) |- eq(var(nu#-1), var(nu#-1))"
//!   (forallL :witness "var(nu#-1)" (ax)))
//! ```
//!
//! A node may state its conclusion with `:seq "..."`. Without it the
//! conclusion is computed from the parent: the principal formula is the one
//! named by `:on`, or the first candidate, and it is dropped from the context
//! unless `:keep true` is given. The checker re-verifies every node either way.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::atoms::{AtomSetExpr, Permutation};
use crate::error::{Error, Result};
use crate::pnl::subst::check_permission;
use crate::pnl::{
    canon_prop, free_atoms_prop, free_unknowns_prop, perm_prop, Prop, Scope, Signature, Subst, Term, Unknown,
};
use crate::sexpr::{self, quote, Node, Sexp};
use crate::text::Cursor;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Sequent {
    pub left: BTreeSet<Prop>,
    pub right: BTreeSet<Prop>,
}

impl Sequent {
    pub fn new(left: impl IntoIterator<Item = Prop>, right: impl IntoIterator<Item = Prop>) -> Sequent {
        Sequent {
            left: left.into_iter().map(|p| canon_prop(&p)).collect(),
            right: right.into_iter().map(|p| canon_prop(&p)).collect(),
        }
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.left.iter().chain(self.right.iter())
    }

    pub fn free_atoms(&self) -> AtomSetExpr {
        self.props().fold(AtomSetExpr::empty(), |acc, p| acc.union(&free_atoms_prop(p)))
    }

    pub fn free_unknowns(&self) -> BTreeSet<Unknown> {
        self.props().flat_map(free_unknowns_prop).collect()
    }
}

fn write_props(f: &mut fmt::Formatter<'_>, ps: &BTreeSet<Prop>) -> fmt::Result {
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_props(f, &self.left)?;
        f.write_str(if self.left.is_empty() { "|-" } else { " |-" })?;
        if !self.right.is_empty() {
            f.write_str(" ")?;
        }
        write_props(f, &self.right)
    }
}

pub fn parse_sequent(scope: &Scope, src: &str) -> Result<Sequent> {
    let mut c = Cursor::new(src)?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut side = &mut left;
    let mut seen_turnstile = false;
    loop {
        if c.at_end() {
            break;
        }
        if c.eat_sym("|-") {
            if seen_turnstile {
                return c.err("second `|-`");
            }
            seen_turnstile = true;
            side = &mut right;
            continue;
        }
        let p = scope.prop(&mut c, &mut Vec::new())?;
        scope.sig.check_prop(&p)?;
        side.push(p);
        if !c.eat_sym(",") && !c.at_end() && !c.is_sym("|-") {
            return c.err("expected `,` or `|-`");
        }
    }
    if !seen_turnstile {
        return c.err("expected `|-`");
    }
    Ok(Sequent::new(left, right))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    /// `Φ,φ ⊢ π·φ,Ψ`.
    Ax(Permutation),
    /// `Φ,φ ⊢ φ,Ψ`.
    AxR,
    BotL,
    ImpL,
    ImpR,
    /// Instantiates a quantifier on the left; `bound`, when present, restricts
    /// the principal quantifier to that sort and permission set.
    ForallL { bound: Option<Unknown>, witness: Term },
    /// Introduces a quantifier on the right with eigen-unknown `eigen`.
    ForallR { eigen: Unknown },
}

impl Rule {
    pub fn arity(&self) -> usize {
        match self {
            Rule::Ax(_) | Rule::AxR | Rule::BotL => 0,
            Rule::ImpL => 2,
            Rule::ImpR | Rule::ForallL { .. } | Rule::ForallR { .. } => 1,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Ax(_) | Rule::AxR => "ax",
            Rule::BotL => "botL",
            Rule::ImpL => "impL",
            Rule::ImpR => "impR",
            Rule::ForallL { .. } => "forallL",
            Rule::ForallR { .. } => "forallR",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(conclusion: Sequent, rule: Rule) -> Self {
        Derivation { conclusion, rule, premises: Vec::new() }
    }

    /// Every node, pre-order, with its path (`root`, `root.0`, ...).
    pub fn nodes(&self) -> Vec<(String, &Derivation)> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a Derivation, path: String, out: &mut Vec<(String, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premises.iter().enumerate() {
                go(p, format!("{path}.{i}"), out);
            }
        }
        go(self, "root".into(), &mut out);
        out
    }

    pub fn sequents(&self) -> impl Iterator<Item = &Sequent> {
        self.nodes().into_iter().map(|(_, d)| &d.conclusion).collect::<Vec<_>>().into_iter()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Restricted,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct NodeReport {
    pub path: String,
    pub rule: String,
    pub conclusion: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CheckReport {
    pub checker: String,
    pub accepted: bool,
    pub nodes: Vec<NodeReport>,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| !n.ok)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.checker, if self.accepted { "accepted" } else { "rejected" })?;
        for n in &self.nodes {
            match &n.message {
                Some(m) => writeln!(f, "  {} {} {}: {}", if n.ok { "ok " } else { "ERR" }, n.path, n.rule, m)?,
                None => writeln!(f, "  {} {} {}", if n.ok { "ok " } else { "ERR" }, n.path, n.rule)?,
            }
        }
        Ok(())
    }
}

/// What a successful node check resolved.
#[derive(Clone, Debug)]
pub(crate) struct NodeInfo {
    pub principal: Option<Prop>,
}

fn with(set: &BTreeSet<Prop>, p: &Prop) -> BTreeSet<Prop> {
    let mut s = set.clone();
    s.insert(p.clone());
    s
}

fn without(set: &BTreeSet<Prop>, p: &Prop) -> BTreeSet<Prop> {
    let mut s = set.clone();
    s.remove(p);
    s
}

/// The context left after removing a principal formula: the union in the
/// rule schemas need not be disjoint, so both readings are allowed.
fn contexts(set: &BTreeSet<Prop>, p: &Prop) -> [BTreeSet<Prop>; 2] {
    [without(set, p), set.clone()]
}

/// `φ[X:=r]` for the body of `∀X.φ`.
pub(crate) fn instantiate(sig: &Signature, x: &Unknown, body: &Prop, r: &Term) -> Result<Prop> {
    Ok(Subst::point(sig, x, r)?.apply_prop(body))
}

pub(crate) fn check_node(sig: &Signature, d: &Derivation, mode: Mode) -> std::result::Result<NodeInfo, String> {
    for p in d.conclusion.props() {
        sig.check_prop(p).map_err(|e| format!("ill-sorted formula {p}: {e}"))?;
    }
    if d.premises.len() != d.rule.arity() {
        return Err(format!("rule {} expects {} premises, found {}", d.rule.tag(), d.rule.arity(), d.premises.len()));
    }
    let Sequent { left, right } = &d.conclusion;
    let prem: Vec<&Sequent> = d.premises.iter().map(|p| &p.conclusion).collect();
    match &d.rule {
        Rule::AxR => left
            .iter()
            .find(|p| right.contains(*p))
            .map(|p| NodeInfo { principal: Some(p.clone()) })
            .ok_or_else(|| "no formula occurs on both sides".to_string()),
        Rule::Ax(pi) => {
            if mode == Mode::Restricted && !pi.is_id() {
                return Err(format!("non-identity axiom permutation {pi} is not a restricted axiom"));
            }
            left.iter()
                .find(|p| right.contains(&perm_prop(pi, p)))
                .map(|p| NodeInfo { principal: Some(p.clone()) })
                .ok_or_else(|| format!("no left formula φ with {pi}·φ on the right"))
        }
        Rule::BotL => {
            if left.contains(&Prop::Bot) {
                Ok(NodeInfo { principal: Some(Prop::Bot) })
            } else {
                Err("bot does not occur on the left".into())
            }
        }
        Rule::ImpL => {
            for p in left {
                let Prop::Imp(a, b) = p else { continue };
                for ctx in contexts(left, p) {
                    if prem[0].left == ctx
                        && prem[0].right == with(right, a)
                        && prem[1].left == with(&ctx, b)
                        && prem[1].right == *right
                    {
                        return Ok(NodeInfo { principal: Some(p.clone()) });
                    }
                }
            }
            Err("no implication on the left matches the premises".into())
        }
        Rule::ImpR => {
            for p in right {
                let Prop::Imp(a, b) = p else { continue };
                for ctx in contexts(right, p) {
                    if prem[0].left == with(left, a) && prem[0].right == with(&ctx, b) {
                        return Ok(NodeInfo { principal: Some(p.clone()) });
                    }
                }
            }
            Err("no implication on the right matches the premise".into())
        }
        Rule::ForallL { bound, witness } => {
            let mut side_failure = None;
            for p in left {
                let Prop::Forall(x, body) = p else { continue };
                if bound.as_ref().is_some_and(|b| !b.same_kind(x)) {
                    continue;
                }
                let inst = match instantiate(sig, x, body, witness) {
                    Ok(i) => i,
                    Err(e) => {
                        side_failure.get_or_insert_with(|| format!("witness {witness} for {p}: {e}"));
                        continue;
                    }
                };
                for ctx in contexts(left, p) {
                    if prem[0].left == with(&ctx, &inst) && prem[0].right == *right {
                        return Ok(NodeInfo { principal: Some(p.clone()) });
                    }
                }
            }
            Err(side_failure.unwrap_or_else(|| "no quantifier on the left instantiates to the premise".into()))
        }
        Rule::ForallR { eigen } => {
            if d.conclusion.free_unknowns().contains(eigen) {
                return Err(format!("eigen-unknown {eigen} is free in the conclusion"));
            }
            let mut kind_mismatch = true;
            for p in right {
                let Prop::Forall(x, body) = p else { continue };
                if !x.same_kind(eigen) {
                    continue;
                }
                kind_mismatch = false;
                let inst = instantiate(sig, x, body, &Term::var(eigen)).map_err(|e| e.to_string())?;
                for ctx in contexts(right, p) {
                    if prem[0].left == *left && prem[0].right == with(&ctx, &inst) {
                        return Ok(NodeInfo { principal: Some(p.clone()) });
                    }
                }
            }
            if kind_mismatch {
                Err(format!("no quantifier on the right binds an unknown of the sort and permission set of {eigen}"))
            } else {
                Err("no quantifier on the right instantiates to the premise".into())
            }
        }
    }
}

fn describe(rule: &Rule) -> String {
    match rule {
        Rule::Ax(pi) => format!("ax {pi}"),
        Rule::ForallL { witness, .. } => format!("forallL {witness}"),
        Rule::ForallR { eigen } => format!("forallR {eigen}"),
        r => r.tag().to_string(),
    }
}

pub fn check(sig: &Signature, d: &Derivation, mode: Mode) -> CheckReport {
    let nodes: Vec<NodeReport> = d
        .nodes()
        .into_iter()
        .map(|(path, n)| {
            let res = check_node(sig, n, mode);
            NodeReport {
                path,
                rule: describe(&n.rule),
                conclusion: n.conclusion.to_string(),
                ok: res.is_ok(),
                message: res.err(),
            }
        })
        .collect();
    let checker = match mode {
        Mode::Full => "pnl-full",
        Mode::Restricted => "pnl-restricted",
    };
    CheckReport { checker: checker.into(), accepted: nodes.iter().all(|n| n.ok), nodes }
}

pub fn check_full(sig: &Signature, d: &Derivation) -> CheckReport {
    check(sig, d, Mode::Full)
}

pub fn check_restricted(sig: &Signature, d: &Derivation) -> CheckReport {
    check(sig, d, Mode::Restricted)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LintReport {
    pub ok: bool,
    /// Paths and sequents whose free atoms escape those of the end-sequent.
    pub offending: Vec<(String, String)>,
}

/// Whether every sequent's free atoms lie within those of the end-sequent.
pub fn fa_restriction_lint(d: &Derivation) -> LintReport {
    let bound = d.conclusion.free_atoms();
    let offending: Vec<(String, String)> = d
        .nodes()
        .into_iter()
        .filter(|(_, n)| !n.conclusion.free_atoms().is_subset(&bound))
        .map(|(p, n)| (p, n.conclusion.to_string()))
        .collect();
    LintReport { ok: offending.is_empty(), offending }
}

/// Re-verifies the substitution preconditions at every accepted `forallL` node.
pub fn forall_l_preconditions_hold(sig: &Signature, d: &Derivation) -> bool {
    d.nodes().into_iter().all(|(_, n)| {
        let Rule::ForallL { witness, .. } = &n.rule else { return true };
        match check_node(sig, n, Mode::Full) {
            Ok(NodeInfo { principal: Some(Prop::Forall(x, _)) }) => {
                sig.sort_of(witness).ok().as_ref() == Some(x.sort()) && check_permission(&x, witness).is_ok()
            }
            _ => true,
        }
    })
}

fn parse_eigen(scope: &Scope, text: &str) -> Result<Unknown> {
    if text.contains(':') {
        scope.parse_unknown_decl(text)
    } else {
        scope
            .unknown(text)
            .cloned()
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("undeclared eigen-unknown {text}") })
    }
}

fn pick<'a>(
    set: &'a BTreeSet<Prop>,
    on: Option<&Prop>,
    ok: impl Fn(&Prop) -> bool,
    what: &str,
) -> Result<&'a Prop> {
    match on {
        Some(p) => set.get(p).ok_or_else(|| Error::Invalid(format!("{p} is not in the context"))),
        None => set.iter().find(|p| ok(p)).ok_or_else(|| Error::Invalid(format!("no {what} to decompose"))),
    }
}

fn expected_premises(sig: &Signature, s: &Sequent, rule: &Rule, on: Option<&Prop>, keep: bool) -> Result<Vec<Sequent>> {
    let ctx = |set: &BTreeSet<Prop>, p: &Prop| if keep { set.clone() } else { without(set, p) };
    Ok(match rule {
        Rule::Ax(_) | Rule::AxR | Rule::BotL => vec![],
        Rule::ImpL => {
            let p = pick(&s.left, on, |p| matches!(p, Prop::Imp(..)), "implication on the left")?;
            let Prop::Imp(a, b) = p else { return Err(Error::Invalid(format!("{p} is not an implication"))) };
            let c = ctx(&s.left, p);
            vec![
                Sequent { left: c.clone(), right: with(&s.right, a) },
                Sequent { left: with(&c, b), right: s.right.clone() },
            ]
        }
        Rule::ImpR => {
            let p = pick(&s.right, on, |p| matches!(p, Prop::Imp(..)), "implication on the right")?;
            let Prop::Imp(a, b) = p else { return Err(Error::Invalid(format!("{p} is not an implication"))) };
            vec![Sequent { left: with(&s.left, a), right: with(&ctx(&s.right, p), b) }]
        }
        Rule::ForallL { bound, witness } => {
            let p = pick(
                &s.left,
                on,
                |p| match p {
                    Prop::Forall(x, body) => {
                        bound.as_ref().is_none_or(|b| b.same_kind(x)) && instantiate(sig, x, body, witness).is_ok()
                    }
                    _ => false,
                },
                "instantiable quantifier on the left",
            )?;
            let Prop::Forall(x, body) = p else { return Err(Error::Invalid(format!("{p} is not a quantifier"))) };
            let inst = instantiate(sig, x, body, witness)?;
            vec![Sequent { left: with(&ctx(&s.left, p), &inst), right: s.right.clone() }]
        }
        Rule::ForallR { eigen } => {
            let p = pick(
                &s.right,
                on,
                |p| matches!(p, Prop::Forall(x, _) if x.same_kind(eigen)),
                "matching quantifier on the right",
            )?;
            let Prop::Forall(x, body) = p else { return Err(Error::Invalid(format!("{p} is not a quantifier"))) };
            let inst = instantiate(sig, x, body, &Term::var(eigen))?;
            vec![Sequent { left: s.left.clone(), right: with(&ctx(&s.right, p), &inst) }]
        }
    })
}

fn build(scope: &Scope, sx: &Sexp, expected: Option<Sequent>) -> Result<Derivation> {
    let n = Node::of(sx)?;
    let conclusion = match n.get_text("seq")? {
        Some(t) => parse_sequent(scope, t)?,
        None => expected.ok_or_else(|| Error::Invalid(format!("node {} needs an explicit :seq", n.tag)))?,
    };
    let mut inner = scope.clone();
    let rule = match n.tag {
        "ax" => match n.get_text("perm")? {
            Some(p) => Rule::Ax(p.parse()?),
            None => Rule::AxR,
        },
        "botL" => Rule::BotL,
        "impL" => Rule::ImpL,
        "impR" => Rule::ImpR,
        "forallL" => {
            let w = n
                .get_text("witness")?
                .ok_or_else(|| Error::Parse { pos: 0, msg: "forallL needs :witness".into() })?;
            let bound = n.get_text("X")?.and_then(|x| scope.unknown(x).cloned());
            Rule::ForallL { bound, witness: scope.parse_term(w)? }
        }
        "forallR" => {
            let x = n.get_text("X")?.ok_or_else(|| Error::Parse { pos: 0, msg: "forallR needs :X".into() })?;
            let eigen = parse_eigen(scope, x)?;
            inner.declare(eigen.clone());
            Rule::ForallR { eigen }
        }
        other => return Err(Error::Parse { pos: 0, msg: format!("unknown rule tag {other}") }),
    };
    if n.children.len() != rule.arity() {
        return Err(Error::Invalid(format!(
            "rule {} expects {} premises, found {}",
            n.tag,
            rule.arity(),
            n.children.len()
        )));
    }
    let on = n.get_text("on")?.map(|t| scope.parse_prop(t)).transpose()?;
    let keep = n.get_text("keep")? == Some("true");
    let need_expected = n.children.iter().any(|c| Node::of(c).ok().and_then(|c| c.get("seq")).is_none());
    let exp = if need_expected {
        Some(expected_premises(scope.sig, &conclusion, &rule, on.as_ref(), keep)?)
    } else {
        None
    };
    let premises = n
        .children
        .iter()
        .enumerate()
        .map(|(i, c)| build(&inner, c, exp.as_ref().map(|e| e[i].clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Derivation { conclusion, rule, premises })
}

/// Reads `(proof :goal "..." TREE)`.
pub fn parse_derivation(scope: &Scope, src: &str) -> Result<Derivation> {
    let top = sexpr::parse_one(src)?;
    let n = Node::of(&top)?;
    if n.tag != "proof" {
        return Err(Error::Parse { pos: 0, msg: format!("expected (proof ...), found ({} ...)", n.tag) });
    }
    let goal = n.get_text("goal")?.ok_or_else(|| Error::Parse { pos: 0, msg: "proof needs :goal".into() })?;
    let goal = parse_sequent(scope, goal)?;
    let [tree] = n.children.as_slice() else {
        return Err(Error::Parse { pos: 0, msg: "proof needs exactly one derivation tree".into() });
    };
    build(scope, tree, Some(goal))
}

fn node_sexp(d: &Derivation) -> Sexp {
    let mut xs = vec![Sexp::Sym(d.rule.tag().into())];
    let mut key = |k: &str, v: String| {
        xs.push(Sexp::Sym(format!(":{k}")));
        xs.push(Sexp::Str(v));
    };
    match &d.rule {
        Rule::Ax(pi) => key("perm", pi.to_string()),
        Rule::ForallL { bound, witness } => {
            if let Some(b) = bound {
                key("X", b.name().to_string());
            }
            key("witness", witness.to_string());
        }
        Rule::ForallR { eigen } => key("X", format!("{}:{}#{}", eigen.name(), eigen.sort(), eigen.pmss())),
        _ => {}
    }
    key("seq", d.conclusion.to_string());
    xs.extend(d.premises.iter().map(node_sexp));
    Sexp::List(xs)
}

/// Prints a derivation with an explicit `:seq` on every node.
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = format!("(proof :goal {}\n", quote(&d.conclusion.to_string()));
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let s = node_sexp(&Derivation { premises: vec![], ..d.clone() }).to_string();
        out.push_str(&"  ".repeat(depth));
        out.push_str(&s[..s.len() - 1]);
        for p in &d.premises {
            out.push('\n');
            go(p, depth + 1, out);
        }
        out.push(')');
    }
    go(d, 1, &mut out);
    out.push_str(")\n");
    out
}
