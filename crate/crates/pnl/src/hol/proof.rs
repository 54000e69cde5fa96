//! HOL sequents, derivations and the checker.
//!
//! Derivation files use the same shape as the PNL ones with `h`-prefixed tags:
//! `(hproof :goal "..." (hforallL :witness "t" (hax)))`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::proof::{CheckReport, NodeReport};
use crate::sexpr::{self, quote, Node, Sexp};
use crate::text::Cursor;

use super::{beta_normalize, free_vars, instantiate, HolScope, HolSignature, HolTerm, HolVar};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HolSequent {
    pub left: BTreeSet<HolTerm>,
    pub right: BTreeSet<HolTerm>,
}

impl HolSequent {
    pub fn new(left: impl IntoIterator<Item = HolTerm>, right: impl IntoIterator<Item = HolTerm>) -> Self {
        HolSequent { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    pub fn props(&self) -> impl Iterator<Item = &HolTerm> {
        self.left.iter().chain(self.right.iter())
    }

    pub fn free_vars(&self) -> BTreeSet<HolVar> {
        self.props().flat_map(free_vars).collect()
    }

    fn normalized(&self) -> HolSequent {
        HolSequent {
            left: self.left.iter().map(beta_normalize).collect(),
            right: self.right.iter().map(beta_normalize).collect(),
        }
    }
}

impl fmt::Display for HolSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &BTreeSet<HolTerm>| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        let (l, r) = (side(&self.left), side(&self.right));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {r}"),
            (false, true) => write!(f, "{l} |-"),
            (false, false) => write!(f, "{l} |- {r}"),
        }
    }
}

pub fn parse_hol_sequent(scope: &HolScope, src: &str) -> Result<HolSequent> {
    let mut c = Cursor::new(src)?;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let mut on_right = false;
    while !c.at_end() {
        if c.eat_sym("|-") {
            if on_right {
                return c.err("second `|-`");
            }
            on_right = true;
            continue;
        }
        let t = scope.term(&mut c, &mut Vec::new())?;
        scope.sig.check_prop(&t)?;
        if on_right { &mut right } else { &mut left }.push(t);
        if !c.eat_sym(",") && !c.at_end() && !c.is_sym("|-") {
            return c.err("expected `,` or `|-`");
        }
    }
    if !on_right {
        return c.err("expected `|-`");
    }
    Ok(HolSequent::new(left, right))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum HolRule {
    Ax,
    BotL,
    ImpL,
    ImpR,
    ForallL { witness: HolTerm },
    ForallR { eigen: HolVar },
}

impl HolRule {
    pub fn arity(&self) -> usize {
        match self {
            HolRule::Ax | HolRule::BotL => 0,
            HolRule::ImpL => 2,
            _ => 1,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            HolRule::Ax => "hax",
            HolRule::BotL => "hbotL",
            HolRule::ImpL => "himpL",
            HolRule::ImpR => "himpR",
            HolRule::ForallL { .. } => "hforallL",
            HolRule::ForallR { .. } => "hforallR",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HolDerivation {
    pub conclusion: HolSequent,
    pub rule: HolRule,
    pub premises: Vec<HolDerivation>,
}

impl HolDerivation {
    pub fn nodes(&self) -> Vec<(String, &HolDerivation)> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a HolDerivation, path: String, out: &mut Vec<(String, &'a HolDerivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premises.iter().enumerate() {
                go(p, format!("{path}.{i}"), out);
            }
        }
        go(self, "root".into(), &mut out);
        out
    }
}

fn with(s: &BTreeSet<HolTerm>, t: &HolTerm) -> BTreeSet<HolTerm> {
    let mut s = s.clone();
    s.insert(t.clone());
    s
}

fn contexts(s: &BTreeSet<HolTerm>, t: &HolTerm) -> [BTreeSet<HolTerm>; 2] {
    let mut w = s.clone();
    w.remove(t);
    [w, s.clone()]
}

fn check_node(sig: &HolSignature, d: &HolDerivation, modulo_beta: bool) -> std::result::Result<(), String> {
    for p in d.conclusion.props() {
        sig.check_prop(p).map_err(|e| format!("ill-typed formula {p}: {e}"))?;
    }
    if d.premises.len() != d.rule.arity() {
        return Err(format!("rule {} expects {} premises, found {}", d.rule.tag(), d.rule.arity(), d.premises.len()));
    }
    let norm = |s: &HolSequent| if modulo_beta { s.normalized() } else { s.clone() };
    let nt = |t: HolTerm| if modulo_beta { beta_normalize(&t) } else { t };
    let HolSequent { left, right } = norm(&d.conclusion);
    let prem: Vec<HolSequent> = d.premises.iter().map(|p| norm(&p.conclusion)).collect();
    match &d.rule {
        HolRule::Ax => {
            if left.iter().any(|p| right.contains(p)) {
                Ok(())
            } else {
                Err("no formula occurs on both sides".into())
            }
        }
        HolRule::BotL => {
            if left.iter().any(HolTerm::is_bot) {
                Ok(())
            } else {
                Err("bot does not occur on the left".into())
            }
        }
        HolRule::ImpL => {
            for p in &left {
                let Some((a, b)) = p.as_imp() else { continue };
                for ctx in contexts(&left, p) {
                    if prem[0].left == ctx
                        && prem[0].right == with(&right, a)
                        && prem[1].left == with(&ctx, b)
                        && prem[1].right == right
                    {
                        return Ok(());
                    }
                }
            }
            Err("no implication on the left matches the premises".into())
        }
        HolRule::ImpR => {
            for p in &right {
                let Some((a, b)) = p.as_imp() else { continue };
                for ctx in contexts(&right, p) {
                    if prem[0].left == with(&left, a) && prem[0].right == with(&ctx, b) {
                        return Ok(());
                    }
                }
            }
            Err("no implication on the right matches the premise".into())
        }
        HolRule::ForallL { witness } => {
            let wt = sig.type_of(witness).map_err(|e| format!("witness {witness}: {e}"))?;
            let mut type_mismatch = None;
            for p in &left {
                let Some((b, body)) = p.as_forall() else { continue };
                if b.ty != wt {
                    type_mismatch.get_or_insert_with(|| format!("witness has type {wt}, quantifier binds {}", b.ty));
                    continue;
                }
                let inst = nt(instantiate(body, witness));
                for ctx in contexts(&left, p) {
                    if prem[0].left == with(&ctx, &inst) && prem[0].right == right {
                        return Ok(());
                    }
                }
            }
            Err(type_mismatch.unwrap_or_else(|| "no quantifier on the left instantiates to the premise".into()))
        }
        HolRule::ForallR { eigen } => {
            if d.conclusion.free_vars().contains(eigen) {
                return Err(format!("eigenvariable {eigen} is free in the conclusion"));
            }
            for p in &right {
                let Some((b, body)) = p.as_forall() else { continue };
                if b.ty != eigen.ty {
                    continue;
                }
                let inst = nt(instantiate(body, &HolTerm::var(eigen)));
                for ctx in contexts(&right, p) {
                    if prem[0].left == left && prem[0].right == with(&ctx, &inst) {
                        return Ok(());
                    }
                }
            }
            Err("no quantifier on the right instantiates to the premise".into())
        }
    }
}

fn describe(r: &HolRule) -> String {
    match r {
        HolRule::ForallL { witness } => format!("hforallL {witness}"),
        HolRule::ForallR { eigen } => format!("hforallR {eigen}"),
        r => r.tag().into(),
    }
}

/// Checks every node; with `modulo_beta` formulas are compared after
/// β-normalization.
pub fn check_hol(sig: &HolSignature, d: &HolDerivation, modulo_beta: bool) -> CheckReport {
    let nodes: Vec<NodeReport> = d
        .nodes()
        .into_iter()
        .map(|(path, n)| {
            let res = check_node(sig, n, modulo_beta);
            NodeReport {
                path,
                rule: describe(&n.rule),
                conclusion: n.conclusion.to_string(),
                ok: res.is_ok(),
                message: res.err(),
            }
        })
        .collect();
    let checker = if modulo_beta { "hol-modulo-beta" } else { "hol" };
    CheckReport { checker: checker.into(), accepted: nodes.iter().all(|n| n.ok), nodes }
}

fn pick<'a>(set: &'a BTreeSet<HolTerm>, on: Option<&HolTerm>, ok: impl Fn(&HolTerm) -> bool) -> Result<&'a HolTerm> {
    match on {
        Some(p) => set.get(p).ok_or_else(|| Error::Invalid(format!("{p} is not in the context"))),
        None => set.iter().find(|p| ok(p)).ok_or_else(|| Error::Invalid("no formula to decompose".into())),
    }
}

fn expected_premises(
    sig: &HolSignature,
    s: &HolSequent,
    rule: &HolRule,
    on: Option<&HolTerm>,
    keep: bool,
) -> Result<Vec<HolSequent>> {
    let ctx = |set: &BTreeSet<HolTerm>, p: &HolTerm| {
        let mut c = set.clone();
        if !keep {
            c.remove(p);
        }
        c
    };
    Ok(match rule {
        HolRule::Ax | HolRule::BotL => vec![],
        HolRule::ImpL => {
            let p = pick(&s.left, on, |p| p.as_imp().is_some())?;
            let (a, b) = p.as_imp().ok_or_else(|| Error::Invalid(format!("{p} is not an implication")))?;
            let c = ctx(&s.left, p);
            vec![
                HolSequent { left: c.clone(), right: with(&s.right, a) },
                HolSequent { left: with(&c, b), right: s.right.clone() },
            ]
        }
        HolRule::ImpR => {
            let p = pick(&s.right, on, |p| p.as_imp().is_some())?;
            let (a, b) = p.as_imp().ok_or_else(|| Error::Invalid(format!("{p} is not an implication")))?;
            vec![HolSequent { left: with(&s.left, a), right: with(&ctx(&s.right, p), b) }]
        }
        HolRule::ForallL { witness } => {
            let wt = sig.type_of(witness)?;
            let p = pick(&s.left, on, |p| p.as_forall().is_some_and(|(b, _)| b.ty == wt))?;
            let (_, body) = p.as_forall().ok_or_else(|| Error::Invalid(format!("{p} is not a quantifier")))?;
            vec![HolSequent { left: with(&ctx(&s.left, p), &instantiate(body, witness)), right: s.right.clone() }]
        }
        HolRule::ForallR { eigen } => {
            let p = pick(&s.right, on, |p| p.as_forall().is_some_and(|(b, _)| b.ty == eigen.ty))?;
            let (_, body) = p.as_forall().ok_or_else(|| Error::Invalid(format!("{p} is not a quantifier")))?;
            let inst = instantiate(body, &HolTerm::var(eigen));
            vec![HolSequent { left: s.left.clone(), right: with(&ctx(&s.right, p), &inst) }]
        }
    })
}

fn build(scope: &HolScope, sx: &Sexp, expected: Option<HolSequent>) -> Result<HolDerivation> {
    let n = Node::of(sx)?;
    let conclusion = match n.get_text("seq")? {
        Some(t) => parse_hol_sequent(scope, t)?,
        None => expected.ok_or_else(|| Error::Invalid(format!("node {} needs an explicit :seq", n.tag)))?,
    };
    let mut inner = scope.clone();
    let missing = |k: &str| Error::Parse { pos: 0, msg: format!("{} needs :{k}", n.tag) };
    let rule = match n.tag {
        "hax" => HolRule::Ax,
        "hbotL" => HolRule::BotL,
        "himpL" => HolRule::ImpL,
        "himpR" => HolRule::ImpR,
        "hforallL" => {
            let w = n.get_text("witness")?.ok_or_else(|| missing("witness"))?;
            HolRule::ForallL { witness: scope.parse_term(w)? }
        }
        "hforallR" => {
            let x = n.get_text("X")?.ok_or_else(|| missing("X"))?;
            let eigen = match scope.var(x) {
                Some(v) if !x.contains(':') => v.clone(),
                _ => scope.parse_var_decl(x)?,
            };
            inner.declare(eigen.clone());
            HolRule::ForallR { eigen }
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
    let need = n.children.iter().any(|c| Node::of(c).ok().and_then(|c| c.get("seq")).is_none());
    let exp = if need { Some(expected_premises(scope.sig, &conclusion, &rule, on.as_ref(), keep)?) } else { None };
    let premises = n
        .children
        .iter()
        .enumerate()
        .map(|(i, c)| build(&inner, c, exp.as_ref().map(|e| e[i].clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(HolDerivation { conclusion, rule, premises })
}

/// Reads `(hproof :goal "..." TREE)`.
pub fn parse_hol_derivation(scope: &HolScope, src: &str) -> Result<HolDerivation> {
    let top = sexpr::parse_one(src)?;
    let n = Node::of(&top)?;
    if n.tag != "hproof" {
        return Err(Error::Parse { pos: 0, msg: format!("expected (hproof ...), found ({} ...)", n.tag) });
    }
    let goal = n.get_text("goal")?.ok_or_else(|| Error::Parse { pos: 0, msg: "hproof needs :goal".into() })?;
    let goal = parse_hol_sequent(scope, goal)?;
    let [tree] = n.children.as_slice() else {
        return Err(Error::Parse { pos: 0, msg: "hproof needs exactly one derivation tree".into() });
    };
    build(scope, tree, Some(goal))
}

/// Prints with an explicit `:seq` on every node.
pub fn print_hol_derivation(d: &HolDerivation) -> String {
    fn head(d: &HolDerivation) -> String {
        let mut xs = vec![Sexp::Sym(d.rule.tag().into())];
        let mut key = |k: &str, v: String| {
            xs.push(Sexp::Sym(format!(":{k}")));
            xs.push(Sexp::Str(v));
        };
        match &d.rule {
            HolRule::ForallL { witness } => key("witness", witness.to_string()),
            HolRule::ForallR { eigen } => key("X", format!("{}:{}", eigen.name, eigen.ty)),
            _ => {}
        }
        key("seq", d.conclusion.to_string());
        let s = Sexp::List(xs).to_string();
        s[..s.len() - 1].to_string()
    }
    fn go(d: &HolDerivation, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&head(d));
        for p in &d.premises {
            out.push('\n');
            go(p, depth + 1, out);
        }
        out.push(')');
    }
    let mut out = format!("(hproof :goal {}\n", quote(&d.conclusion.to_string()));
    go(d, 1, &mut out);
    out.push_str(")\n");
    out
}
