mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pnl::atoms::{Atom, AtomSetExpr, PermissionSet, Permutation, Renaming};
use pnl::corpus;
use pnl::gen::Universe;
use pnl::hol::proof::check_hol;
use pnl::hol::{self, HolTerm, HolVar};
use pnl::nomsem::{
    denote_term, valuation_lift, HValue, HolModel, HolWitnesses, PnlInterp, PnlValuation, RenElement,
};
use pnl::nomsem::square::{check_square, square_universe};
use pnl::pnl::{
    alpha_eq, canon_prop, canon_term, free_atoms, free_unknowns, level2_prop, level2_term, perm_prop,
    perm_term, PnlSort, Prop, Scope, Subst, Term, Unknown, UnknownPerm,
};
use pnl::proof::{check_full, check_restricted, forall_l_preconditions_hold, Derivation, Rule, Sequent};
use pnl::translate::{
    capture_infer_minimal, restrict_list, translate_derivation, translate_prop, translate_sort, translate_term,
    unknown_var, Subject,
};

use support::{free_in, nu, swap_term};

fn iota() -> PnlSort {
    PnlSort::base("iota")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_d(u: &Universe, r: &mut ChaCha8Rng) -> Vec<Atom> {
    let mut d: Vec<Atom> = u.atoms.iter().filter(|_| r.gen_bool(0.5)).cloned().collect();
    d.shuffle(r);
    d
}

fn random_renaming(u: &Universe, r: &mut ChaCha8Rng) -> Renaming {
    let m = u.atoms.iter().map(|a| (a.clone(), u.atoms.choose(r).expect("nonempty").clone())).collect();
    Renaming::from_map(m).expect("one sort")
}

/// `s` obtained from `r` by swapping two atoms free in neither, if any.
fn alpha_variant(u: &Universe, r: &Term, g: &mut ChaCha8Rng) -> Option<Term> {
    let fresh: Vec<&Atom> = u.atoms.iter().filter(|a| !free_in(a, r)).collect();
    if fresh.len() < 2 {
        return None;
    }
    let pick: Vec<&&Atom> = fresh.choose_multiple(g, 2).collect();
    Some(swap_term(pick[0], pick[1], r))
}

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

// Atoms.

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn permutation_group_laws(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let (p, q, s) = (u.random_perm(&mut g), u.random_perm(&mut g), u.random_perm(&mut g));
        prop_assert_eq!(p.compose(&q.compose(&s)), p.compose(&q).compose(&s));
        prop_assert_eq!(p.compose(&p.inverse()), Permutation::id());
        prop_assert_eq!(p.compose(&Permutation::id()), p.clone());
        for a in &u.atoms {
            prop_assert_eq!(p.compose(&q).apply(a), p.apply(&q.apply(a)));
        }
    }

    #[test]
    fn renaming_monoid_laws(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let (p, q, s) = (random_renaming(&u, &mut g), random_renaming(&u, &mut g), random_renaming(&u, &mut g));
        for a in u.atoms.iter().chain([&nu(7)]) {
            prop_assert_eq!(p.compose(&q.compose(&s)).apply(a), p.compose(&q).compose(&s).apply(a));
            prop_assert_eq!(p.compose(&q).apply(a), p.apply(&q.apply(a)));
            prop_assert_eq!(p.compose(&Renaming::id()).apply(a), p.apply(a));
        }
    }

    #[test]
    fn atom_sets_under_permutation(seed in any::<u64>(), down in any::<bool>(), picks in prop::collection::vec(-16i64..=16, 0..5)) {
        let mut g = rng(seed);
        let pi = Permutation::from_cycles(&[(0..3).map(|_| nu(g.gen_range(-16..=16))).collect::<BTreeSet<_>>().into_iter().collect()])
            .expect("distinct atoms");
        let set: BTreeSet<Atom> = picks.iter().map(|&i| nu(i)).collect();
        let s = if down { AtomSetExpr::all_down().minus(&set) } else { AtomSetExpr::finite(set.clone()) };
        prop_assert_eq!(s.perm_image(&pi.inverse()).perm_image(&pi), s.clone());
        let t = s.perm_image(&pi);
        for i in -16..=16 {
            prop_assert_eq!(t.contains(&pi.apply(&nu(i))), s.contains(&nu(i)));
        }
        let other = AtomSetExpr::finite(picks.iter().map(|&i| nu(i / 2)));
        let brute = (-40..=40).all(|i| !other.contains(&nu(i)) || s.contains(&nu(i)));
        prop_assert_eq!(other.is_subset(&s), brute);
        if down {
            prop_assert!(t.include_down());
        }
    }

    #[test]
    fn permission_sets_stay_permission_sets(seed in any::<u64>()) {
        let mut g = rng(seed);
        let adds: BTreeSet<Atom> = (0..2).map(|_| nu(g.gen_range(0..5))).collect();
        let removes: BTreeSet<Atom> = (0..2).map(|_| nu(g.gen_range(-5..0))).collect();
        let pm = PermissionSet::new(adds, removes).expect("one sort");
        let pi = Universe::lambda().random_perm(&mut g);
        prop_assert!(pm.to_expr().perm_image(&pi).include_down());
    }
}

// Terms.

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn alpha_preserves_free_atoms_and_sort(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let Some(s) = alpha_variant(&u, &r, &mut g) else { return Ok(()) };
        prop_assert!(alpha_eq(&r, &s));
        prop_assert_eq!(free_atoms(&r), free_atoms(&s));
        prop_assert_eq!(u.sig.sort_of(&r).ok(), u.sig.sort_of(&s).ok());
    }

    #[test]
    fn permutation_action_on_terms(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = canon_term(&u.random_term(&mut g, &iota(), 4));
        let (p, q) = (u.random_perm(&mut g), u.random_perm(&mut g));
        prop_assert_eq!(perm_term(&Permutation::id(), &r), r.clone());
        prop_assert_eq!(perm_term(&p, &perm_term(&q, &r)), perm_term(&p.compose(&q), &r));
        prop_assert_eq!(free_atoms(&perm_term(&p, &r)), free_atoms(&r).perm_image(&p));
    }

    #[test]
    fn substitution_respects_alpha(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let Some(s) = alpha_variant(&u, &r, &mut g) else { return Ok(()) };
        let x = u.unknowns.choose(&mut g).expect("two unknowns");
        let Ok(th) = Subst::point(&u.sig, x, &u.random_term(&mut g, &iota(), 3)) else { return Ok(()) };
        prop_assert!(alpha_eq(&th.apply(&r), &th.apply(&s)));
    }

    #[test]
    fn suspension_normal_form(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let x = &u.unknowns[0];
        let p = u.random_perm(&mut g);
        // nu#0 and nu#1 are outside pmss(X), so the two agree on it.
        let q = p.compose(&Permutation::swap(&nu(0), &nu(1)).expect("same sort"));
        prop_assert_eq!(canon_term(&Term::susp(p, x)), canon_term(&Term::susp(q, x)));
    }

    #[test]
    fn props_print_and_parse(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let phi = canon_prop(&u.random_prop(&mut g, 4, true));
        let sc = Scope::with_unknowns(&u.sig, u.unknowns.clone());
        prop_assert_eq!(sc.parse_prop(&phi.to_string()).expect("printed form parses"), phi);
    }
}

// Proofs.

fn map_derivation(d: &Derivation, sigma: &Permutation, l2: &UnknownPerm) -> Derivation {
    let prop = |p: &Prop| level2_prop(l2, &perm_prop(sigma, p));
    let rule = match &d.rule {
        Rule::Ax(pi) => Rule::Ax(sigma.compose(pi).compose(&sigma.inverse())),
        Rule::ForallL { bound, witness } => {
            Rule::ForallL { bound: bound.as_ref().map(|b| l2.apply(b)), witness: level2_term(l2, witness) }
        }
        Rule::ForallR { eigen } => Rule::ForallR { eigen: l2.apply(eigen) },
        r => r.clone(),
    };
    Derivation {
        conclusion: Sequent::new(d.conclusion.left.iter().map(prop), d.conclusion.right.iter().map(prop)),
        rule,
        premises: d.premises.iter().map(|p| map_derivation(p, sigma, l2)).collect(),
    }
}

fn all_unknowns(d: &Derivation) -> BTreeSet<Unknown> {
    d.nodes().iter().flat_map(|(_, n)| n.conclusion.free_unknowns()).collect()
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn restricted_implies_full(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let phi = u.random_prop(&mut g, 3, false);
        let pi = if g.gen_bool(0.5) { Permutation::id() } else { u.random_perm(&mut g) };
        let leaf = Derivation::leaf(Sequent::new([phi.clone()], [perm_prop(&pi, &phi)]), Rule::Ax(pi.clone()));
        let root = Derivation {
            conclusion: Sequent::new([], [Prop::imp(phi.clone(), perm_prop(&pi, &phi))]),
            rule: Rule::ImpR,
            premises: vec![leaf],
        };
        for d in [&root, &root.premises[0]] {
            prop_assert!(!check_restricted(&u.sig, d).accepted || check_full(&u.sig, d).accepted);
            prop_assert!(check_full(&u.sig, d).accepted);
        }
    }

    #[test]
    fn checking_is_stable_under_renaming(seed in any::<u64>()) {
        let th = corpus::lambda_theory();
        let u = Universe::lambda();
        let mut g = rng(seed);
        let ders = corpus::lambda_derivations().expect("corpus parses");
        let (name, d) = ders.choose(&mut g).expect("nonempty");
        let sigma = u.random_perm(&mut g);
        let l2 = match all_unknowns(d).into_iter().next() {
            Some(x) => UnknownPerm::swap(&x, &x.renamed("Fresh")).expect("same kind"),
            None => UnknownPerm::default(),
        };
        let e = map_derivation(d, &sigma, &l2);
        prop_assert_eq!(check_full(&th.sig, d).accepted, check_full(&th.sig, &e).accepted, "{}", name);
        prop_assert!(check_full(&th.sig, &e).accepted, "{}", name);
    }
}

#[test]
fn forall_left_nodes_meet_substitution_preconditions() {
    let th = corpus::lambda_theory();
    for (name, d) in corpus::lambda_derivations().unwrap() {
        assert!(check_full(&th.sig, &d).accepted, "{name}");
        assert!(forall_l_preconditions_hold(&th.sig, &d), "{name}");
    }
}

#[test]
fn strict_hol_checking_is_included_in_modulo_beta() {
    let th = corpus::lambda_theory();
    let mut strict = 0;
    for (name, d) in corpus::lambda_derivations().unwrap() {
        let t = translate_derivation(&th.sig, &d, None).unwrap();
        if check_hol(&t.signature, &t.derivation, false).accepted {
            strict += 1;
            assert!(check_hol(&t.signature, &t.derivation, true).accepted, "{name}");
        }
    }
    // Instantiations leave redexes, so not every derivation checks strictly.
    assert!(strict < corpus::lambda_derivations().unwrap().len());
}

// HOL and the translation.

/// `⟦φ⟧_D` with `X_D` replaced by the raised translation of a random term:
/// a typed term with redexes.
fn redex_term(u: &Universe, g: &mut ChaCha8Rng) -> Option<HolTerm> {
    let phi = u.random_prop(g, 3, false);
    let x = u.unknowns.choose(g).expect("two unknowns").clone();
    let r = u.random_term(g, &iota(), 3);
    Subst::point(&u.sig, &x, &r).ok()?;
    let d = capture_infer_minimal([Subject::Prop(&phi), Subject::Term(&r)]);
    let binders: Vec<HolVar> = restrict_list(&d, &x).iter().map(HolVar::atom).collect();
    let t = translate_prop(&u.sig, &d, &phi);
    Some(hol::subst(&t, &unknown_var(&d, &x), &HolTerm::lams(&binders, translate_term(&u.sig, &d, &r))))
}

fn hol_sig_with_vars(u: &Universe, t: &HolTerm) -> hol::HolSignature {
    let mut s = pnl::translate::translate_signature(&u.sig);
    for v in hol::free_vars(t) {
        if !v.is_atom() {
            s.add_var(&v.to_string(), v.ty.clone()).expect("fresh name");
        }
    }
    s
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn beta_normalisation(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let Some(t) = redex_term(&u, &mut g) else { return Ok(()) };
        let s = hol_sig_with_vars(&u, &t);
        let n = hol::beta_normalize(&t);
        prop_assert_eq!(s.type_of(&t).ok(), s.type_of(&n).ok());
        prop_assert!(s.type_of(&n).is_ok());
        prop_assert_eq!(hol::beta_normalize(&n), n.clone());
        prop_assert_eq!(hol::beta_normalize_innermost(&t), n);
    }

    #[test]
    fn translation_is_typed(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let d = random_d(&u, &mut g);
        let t = translate_term(&u.sig, &d, &r);
        let s = hol_sig_with_vars(&u, &t);
        prop_assert_eq!(s.type_of(&t).ok(), Some(translate_sort(&u.sig.sort_of(&r).unwrap())));
    }

    #[test]
    fn translation_is_well_defined(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let Some(s) = alpha_variant(&u, &r, &mut g) else { return Ok(()) };
        let d = random_d(&u, &mut g);
        prop_assert!(hol::alpha_eq(&translate_term(&u.sig, &d, &r), &translate_term(&u.sig, &d, &s)));
    }

    #[test]
    fn translation_is_equivariant(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let pi = u.random_perm(&mut g);
        let d = random_d(&u, &mut g);
        let lhs = translate_term(&u.sig, &d, &perm_term(&pi, &r));
        let rhs = hol::perm(&pi, &translate_term(&u.sig, &d, &r));
        prop_assert!(hol::alpha_eq(&lhs, &rhs), "{} vs {}", lhs, rhs);
    }
}

// Semantics.

fn random_valuation(u: &Universe, interp: &PnlInterp, r: &Term, g: &mut ChaCha8Rng) -> PnlValuation {
    let mut val = PnlValuation::new();
    for x in free_unknowns(r) {
        let v = u.random_value(g, x.sort(), x.pmss(), 3);
        val.set(&interp.sig, &x, v).expect("within pmss");
    }
    val
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn term_square(seed in any::<u64>()) {
        let (u, interp) = square_universe();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let val = random_valuation(&u, &interp, &r, &mut g);
        let d = capture_infer_minimal([Subject::Term(&r)]);
        let hv = valuation_lift(&interp.sig, &d, &val, free_unknowns(&r).iter()).unwrap();
        let t = translate_term(&interp.sig, &d, &r);
        let got = HolModel::new(&interp).denote(&t, &hv, &HolWitnesses::default()).unwrap();
        let want = RenElement::id(&denote_term(&interp, &val, &r).unwrap());
        prop_assert_eq!(got.as_ren(), Some(&want));
    }

    #[test]
    fn proposition_square(seed in any::<u64>()) {
        let (u, interp) = square_universe();
        let mut g = rng(seed);
        let phi = u.random_prop(&mut g, 3, false);
        let mut val = PnlValuation::new();
        for x in pnl::pnl::free_unknowns_prop(&phi) {
            val.set(&interp.sig, &x, u.random_value(&mut g, x.sort(), x.pmss(), 3)).unwrap();
        }
        let case = check_square(&interp, &phi, &val, &Default::default());
        prop_assert!(case.agrees(), "{:?}", case);
    }

    #[test]
    fn renaming_action_on_classes(seed in any::<u64>()) {
        let u = Universe::lambda();
        let mut g = rng(seed);
        let x = u.random_value(&mut g, &iota(), &PermissionSet::down(), 3);
        let (p, q, s) = (random_renaming(&u, &mut g), random_renaming(&u, &mut g), random_renaming(&u, &mut g));
        let e = RenElement::new(&p, &x);
        prop_assert_eq!(e.act(&Renaming::id()), e.clone());
        prop_assert_eq!(e.act(&q).act(&s), e.act(&s.compose(&q)));
        // Reflexive, symmetric and transitive: the same element by three routes.
        let pi = u.random_perm(&mut g);
        let f = RenElement::new(&p.compose_perm(&pi.inverse()), &x.permute(&pi));
        prop_assert_eq!(&e, &f);
        prop_assert_eq!(&f, &e);
        let sigma = u.random_perm(&mut g);
        let h = RenElement::new(&p.compose_perm(&pi.inverse()).compose_perm(&sigma.inverse()), &x.permute(&pi).permute(&sigma));
        prop_assert_eq!(&e, &h);
    }

    #[test]
    fn denotation_is_equivariant_and_supported(seed in any::<u64>()) {
        let (u, interp) = square_universe();
        let mut g = rng(seed);
        let r = u.random_term(&mut g, &iota(), 4);
        let val = random_valuation(&u, &interp, &r, &mut g);
        let pi = u.random_perm(&mut g);
        let v = denote_term(&interp, &val, &r).unwrap();
        prop_assert_eq!(denote_term(&interp, &val, &perm_term(&pi, &r)).unwrap(), v.permute(&pi));
        let fa = free_atoms(&r);
        prop_assert!(v.support().iter().all(|a| fa.contains(a)));
    }
}

#[test]
fn holvalue_of_proposition_is_boolean() {
    let (u, interp) = square_universe();
    let sc = Scope::with_unknowns(&u.sig, u.unknowns.clone());
    let phi = sc.parse_prop("isvar(var(nu#-1))").unwrap();
    let t = translate_prop(&u.sig, &[], &phi);
    let v = HolModel::new(&interp).denote(&t, &Default::default(), &HolWitnesses::default()).unwrap();
    assert!(matches!(v, HValue::Bool(true)));
}
