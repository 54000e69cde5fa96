//! `pnl`: command-line front end for the kernel.
//!
//! Exit codes: 0 when the checked property holds, 1 when it was checked and
//! fails, 2 on input errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pnl::atoms::{Atom, AtomSort};
use pnl::hol::proof::{check_hol, parse_hol_derivation, print_hol_derivation, HolDerivation, HolRule};
use pnl::hol::{self, parse_hol_signature, HolScope, HolSignature, HolTerm};
use pnl::nomsem::square::square_test;
use pnl::nomsem::{denote_prop, denote_term, witnesses, PnlValuation, PnlWitnesses};
use pnl::pnl::{alpha_eq, alpha_eq_prop, canon_prop, canon_term, free_unknowns, free_unknowns_prop, Prop, Term};
use pnl::proof::{check_full, check_restricted, CheckReport, Derivation};
use pnl::translate::{
    capture_infer_minimal, capture_missing, dlist_name, symbol_map, translate_derivation, translate_prop,
    translate_signature, translate_term, Subject,
};
use pnl::workspace::{parse_interp, FileKind, Theory};
use pnl::{corpus, Error};

#[derive(Parser)]
#[command(name = "pnl", version, about = "Permissive-nominal logic: checking, translation to HOL, semantics")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide alpha-equivalence of two terms or two propositions.
    AlphaEq { file: PathBuf, left: String, right: String },
    /// Check a derivation.
    Check(CheckArgs),
    /// Translate a term, proposition, theory or derivation to HOL.
    Translate(TranslateArgs),
    /// Evaluate in the Herbrand and renaming-set semantics.
    Semantics {
        #[command(subcommand)]
        cmd: SemCmd,
    },
    /// The bundled lambda-calculus corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    full: bool,
    #[arg(long)]
    restricted: bool,
    /// Check a HOL derivation against a HOL signature.
    #[arg(long)]
    hol: bool,
    /// With --hol, compare formulas up to beta.
    #[arg(long)]
    modulo_beta: bool,
    sig: PathBuf,
    derivation: PathBuf,
}

#[derive(Args)]
struct TranslateArgs {
    /// Signature or theory file.
    sig: PathBuf,
    /// A file, or literal text: a term, proposition, theory or derivation.
    input: String,
    /// Read the input as a derivation.
    #[arg(long)]
    derivation: bool,
    /// `auto`, or a comma-separated atom list such as `nu#-1,nu#-2`.
    #[arg(long = "D", default_value = "auto")]
    d: String,
    /// Also write the HOL files into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SemCmd {
    /// Evaluate ground propositions under an interpretation.
    Eval {
        theory: PathBuf,
        interp: PathBuf,
        #[arg(required = true)]
        props: Vec<String>,
        /// Bind a free unknown to a ground term: `X=var(nu#-1)`.
        #[arg(long = "let", value_name = "X=TERM")]
        lets: Vec<String>,
    },
    /// Compare both denotations on random propositions.
    SquareTest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Additional instances carrying quantifiers.
        #[arg(long, default_value_t = 20)]
        quantified: usize,
    },
    /// Run the fixtures for the maps between free extensions.
    Witnesses,
}

#[derive(Subcommand)]
enum CorpusCmd {
    List,
    Show { name: String },
    /// Write every corpus file under a directory.
    Extract { dir: PathBuf },
}

/// A command's result: the report and whether the property holds.
struct Outcome {
    text: String,
    json: Value,
    holds: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli.cmd) {
        Ok(o) => o,
        Err(e) => {
            let code = if checked_failure(&e) { 1 } else { 2 };
            if cli.json {
                println!("{}", json!({ "error": e.to_string(), "kind": error_kind(&e) }));
            } else {
                eprintln!("error: {e}");
            }
            return ExitCode::from(code);
        }
    };
    let mut body = if cli.json { serde_json::to_string_pretty(&out.json).expect("serializable") } else { out.text };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    // A closed pipe is not an error of the command.
    let _ = std::io::stdout().write_all(body.as_bytes());
    if out.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Errors that report a checked property failing rather than bad input.
fn checked_failure(e: &CliError) -> bool {
    matches!(e, CliError::Pnl(Error::Capture(_) | Error::Unsound(_)))
}

fn error_kind(e: &CliError) -> &'static str {
    match e {
        CliError::Io(..) => "io",
        CliError::Pnl(e) => match e {
            Error::Parse { .. } => "parse",
            Error::Sort(_) => "sort",
            Error::Type(_) => "type",
            Error::Permission(_) => "permission",
            Error::Capture(_) => "capture",
            Error::Unsound(_) => "unsound",
            Error::Unsupported(_) => "unsupported",
            Error::Exhausted(_) => "exhausted",
            Error::Invalid(_) => "invalid",
        },
    }
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Pnl(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Pnl(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Pnl(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn theory(path: &Path) -> Result<Theory> {
    Ok(Theory::parse(&read(path)?)?)
}

fn run(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::AlphaEq { file, left, right } => alpha(file, left, right),
        Cmd::Check(a) => check(a),
        Cmd::Translate(a) => translate(a),
        Cmd::Semantics { cmd } => match cmd {
            SemCmd::Eval { theory, interp, props, lets } => eval(theory, interp, props, lets),
            SemCmd::SquareTest { seed, n, quantified } => Ok(square(*seed, *n, *quantified)),
            SemCmd::Witnesses => Ok(witness_report()),
        },
        Cmd::Corpus { cmd } => corpus_cmd(cmd),
    }
}

fn alpha(file: &Path, left: &str, right: &str) -> Result<Outcome> {
    let th = theory(file)?;
    let sc = th.scope();
    let (equal, l, r) = match (sc.parse_term(left), sc.parse_term(right)) {
        (Ok(a), Ok(b)) => (alpha_eq(&a, &b), canon_term(&a).to_string(), canon_term(&b).to_string()),
        (term_l, _) => {
            let (a, b) = match (sc.parse_prop(left), sc.parse_prop(right)) {
                (Ok(a), Ok(b)) => (a, b),
                // Report the term error when neither reading works.
                _ => return Err(term_l.and(sc.parse_term(right)).expect_err("one side failed").into()),
            };
            (alpha_eq_prop(&a, &b), canon_prop(&a).to_string(), canon_prop(&b).to_string())
        }
    };
    Ok(Outcome {
        text: format!("{}\n  {l}\n  {r}\n", if equal { "alpha-equivalent" } else { "not alpha-equivalent" }),
        json: json!({ "equal": equal, "left": l, "right": r }),
        holds: equal,
    })
}

fn report_outcome(r: CheckReport) -> Outcome {
    Outcome { text: r.to_string(), holds: r.accepted, json: serde_json::to_value(&r).expect("serializable") }
}

fn check(a: &CheckArgs) -> Result<Outcome> {
    if [a.full, a.restricted, a.hol].iter().filter(|b| **b).count() != 1 {
        return Err(Error::Invalid("give exactly one of --full, --restricted, --hol".into()).into());
    }
    if a.hol {
        let sig = parse_hol_signature(&read(&a.sig)?)?;
        let d = parse_hol_derivation(&HolScope::new(&sig), &read(&a.derivation)?)?;
        return Ok(report_outcome(check_hol(&sig, &d, a.modulo_beta)));
    }
    let th = theory(&a.sig)?;
    let d = th.parse_derivation(&read(&a.derivation)?)?;
    Ok(report_outcome(if a.full { check_full(&th.sig, &d) } else { check_restricted(&th.sig, &d) }))
}

fn parse_dlist(src: &str) -> Result<Option<Vec<Atom>>> {
    if src == "auto" {
        return Ok(None);
    }
    let bad = |m: String| CliError::Pnl(Error::Parse { pos: 0, msg: m });
    src.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (sort, idx) = s.split_once('#').ok_or_else(|| bad(format!("`{s}` is not an atom like nu#-1")))?;
            let i = idx.parse::<i64>().map_err(|_| bad(format!("`{s}` has a non-integer index")))?;
            Ok(Atom::new(&AtomSort::new(sort), i))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Adds a `var` line for every non-atom free variable of `ts`.
fn with_vars<'a>(mut sig: HolSignature, ts: impl IntoIterator<Item = &'a HolTerm>) -> Result<HolSignature> {
    let mut vars = BTreeMap::new();
    for t in ts {
        for v in hol::free_vars(t) {
            if !v.is_atom() {
                vars.insert(v.name.to_string(), v.ty.clone());
            }
        }
    }
    for (n, ty) in vars {
        if !sig.vars().contains_key(n.as_str()) {
            sig.add_var(&n, ty)?;
        }
    }
    Ok(sig)
}

fn derivation_terms(d: &HolDerivation) -> Vec<HolTerm> {
    let mut out = Vec::new();
    for (_, n) in d.nodes() {
        out.extend(n.conclusion.props().cloned());
        match &n.rule {
            HolRule::ForallL { witness } => out.push(witness.clone()),
            HolRule::ForallR { eigen } => out.push(HolTerm::var(eigen)),
            _ => {}
        }
    }
    out
}

fn require_typed(d: &[Atom], subject: Subject) -> Result<()> {
    let missing = capture_missing(d, subject, &Default::default());
    if missing.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = missing.iter().map(|a| a.to_string()).collect();
    Err(Error::Capture(format!("not capture-typed by D={}; add {}", dlist_name(d), names.join(", "))).into())
}

enum Input {
    Term(Term),
    Prop(Prop),
    Theory(Theory),
    Derivation(Derivation),
}

fn translate(a: &TranslateArgs) -> Result<Outcome> {
    let th = theory(&a.sig)?;
    let text = if Path::new(&a.input).is_file() { read(Path::new(&a.input))? } else { a.input.clone() };
    let explicit = parse_dlist(&a.d)?;
    let sc = th.scope();
    let head = text.trim_start();
    let input = if a.derivation || head.starts_with("(proof") || head.starts_with(';') {
        Input::Derivation(th.parse_derivation(&text)?)
    } else if FileKind::detect(&text) == FileKind::Theory {
        Input::Theory(Theory::parse(&text)?)
    } else {
        match sc.parse_prop(text.trim()) {
            Ok(p) => Input::Prop(p),
            Err(pe) => match sc.parse_term(text.trim()) {
                Ok(t) => Input::Term(t),
                Err(te) => return Err(if matches!(pe, Error::Parse { .. }) { te } else { pe }.into()),
            },
        }
    };

    let (sig_src, d, items, derivation, unknowns) = match &input {
        Input::Derivation(der) => {
            let t = translate_derivation(&th.sig, der, explicit.as_deref())?;
            let terms = derivation_terms(&t.derivation);
            let hsig = with_vars(t.signature, &terms)?;
            let unknowns = der.nodes().iter().flat_map(|(_, n)| n.conclusion.free_unknowns()).collect();
            (hsig, t.d, Vec::new(), Some(t.derivation), unknowns)
        }
        Input::Theory(t2) => {
            let subjects = t2.axioms.iter().map(|(_, p)| Subject::Prop(p));
            let d = explicit.clone().unwrap_or_else(|| capture_infer_minimal(subjects));
            let mut items = Vec::new();
            for (n, p) in &t2.axioms {
                require_typed(&d, Subject::Prop(p))?;
                items.push((n.clone(), translate_prop(&t2.sig, &d, p)));
            }
            let hsig = with_vars(translate_signature(&t2.sig), items.iter().map(|(_, t)| t))?;
            let unknowns = t2.axioms.iter().flat_map(|(_, p)| free_unknowns_prop(p)).collect();
            (hsig, d, items, None, unknowns)
        }
        Input::Prop(p) => {
            let d = explicit.clone().unwrap_or_else(|| capture_infer_minimal([Subject::Prop(p)]));
            require_typed(&d, Subject::Prop(p))?;
            let t = translate_prop(&th.sig, &d, p);
            let hsig = with_vars(translate_signature(&th.sig), [&t])?;
            (hsig, d, vec![("prop".to_string(), t)], None, free_unknowns_prop(p))
        }
        Input::Term(r) => {
            let d = explicit.clone().unwrap_or_else(|| capture_infer_minimal([Subject::Term(r)]));
            require_typed(&d, Subject::Term(r))?;
            let t = translate_term(&th.sig, &d, r);
            let hsig = with_vars(translate_signature(&th.sig), [&t])?;
            (hsig, d, vec![("term".to_string(), t)], None, free_unknowns(r))
        }
    };

    // Round-trip through the printed files and type-check what a consumer
    // would read back.
    let sig_text = sig_src.to_string();
    let hsig = parse_hol_signature(&sig_text)?;
    let hs = HolScope::new(&hsig);
    let mut item_lines = Vec::new();
    for (n, t) in &items {
        let back = hs.parse_term(&t.to_string())?;
        if matches!(input, Input::Theory(_) | Input::Prop(_)) {
            hsig.check_prop(&back)?;
        } else {
            hsig.type_of(&back)?;
        }
        item_lines.push(format!("{n} : {t}"));
    }
    let der_text = derivation.as_ref().map(print_hol_derivation);
    if let Some(src) = &der_text {
        parse_hol_derivation(&hs, src)?;
    }
    let symbols = symbol_map(&th.sig, &d, unknowns);

    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let stem = Path::new(&a.input).file_stem().filter(|_| Path::new(&a.input).is_file());
        let stem = stem.map_or("input".into(), |s| s.to_string_lossy().to_string());
        write(&dir.join(format!("{stem}.hsig")), &sig_text)?;
        if !item_lines.is_empty() {
            write(&dir.join(format!("{stem}.hol")), &(item_lines.join("\n") + "\n"))?;
        }
        if let Some(src) = &der_text {
            write(&dir.join(format!("{stem}.hproof")), &(src.clone() + "\n"))?;
        }
        let sym: String = symbols.iter().map(|(k, v)| format!("{k} -> {v}\n")).collect();
        write(&dir.join(format!("{stem}.symbols")), &sym)?;
    }

    let mut text = format!("% D = {}\n% signature\n{sig_text}", dlist_name(&d));
    if !item_lines.is_empty() {
        text += &format!("% translation\n{}\n", item_lines.join("\n"));
    }
    if let Some(src) = &der_text {
        text += &format!("% derivation\n{src}\n");
    }
    text += "% symbols\n";
    for (k, v) in &symbols {
        text += &format!("%   {k} -> {v}\n");
    }
    let json = json!({
        "D": d.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "signature": sig_text,
        "translation": items.iter().map(|(n, t)| json!({ "name": n, "hol": t.to_string() })).collect::<Vec<_>>(),
        "derivation": der_text,
        "symbols": symbols,
    });
    Ok(Outcome { text, json, holds: true })
}

fn eval(theory_path: &Path, interp_path: &Path, props: &[String], lets: &[String]) -> Result<Outcome> {
    let th = theory(theory_path)?;
    let interp = parse_interp(&th.sig, &read(interp_path)?)?;
    let sc = th.scope();
    let mut val = PnlValuation::new();
    for l in lets {
        let (name, src) = l.split_once('=').ok_or_else(|| {
            CliError::Pnl(Error::Parse { pos: 0, msg: format!("--let expects X=TERM, got `{l}`") })
        })?;
        let x = sc.unknown(name.trim()).cloned().ok_or_else(|| {
            CliError::Pnl(Error::Parse { pos: 0, msg: format!("no unknown `{}` declared", name.trim()) })
        })?;
        let v = denote_term(&interp, &PnlValuation::new(), &sc.parse_term(src.trim())?)?;
        val.set(&th.sig, &x, v)?;
    }
    let mut results = Vec::new();
    for p in props {
        let phi = sc.parse_prop(p)?;
        results.push((canon_prop(&phi).to_string(), denote_prop(&interp, &val, &phi, &PnlWitnesses::default())?));
    }
    let text = results.iter().map(|(p, v)| format!("{} {p}\n", u8::from(*v))).collect();
    let json = json!({
        "equivariant": interp.fully_equivariant(),
        "results": results.iter().map(|(p, v)| json!({ "prop": p, "value": u8::from(*v) })).collect::<Vec<_>>(),
    });
    Ok(Outcome { text, json, holds: results.iter().all(|(_, v)| *v) })
}

fn square(seed: u64, n: usize, quantified: usize) -> Outcome {
    let qf = square_test(seed, n, false);
    let q = square_test(seed.wrapping_add(1), quantified, true);
    let mut text = format!(
        "quantifier-free: {}/{} agree (seed {})\nquantified: {}/{} agree (seed {})\n",
        qf.agreed, qf.instances, qf.seed, q.agreed, q.instances, q.seed
    );
    for c in qf.failures.iter().chain(&q.failures) {
        text += &format!("  mismatch: {} with D={}: pnl={:?} hol={:?} {}\n", c.prop, c.d, c.pnl, c.hol, c.error.clone().unwrap_or_default());
    }
    Outcome { text, holds: qf.ok() && q.ok(), json: json!({ "quantifier_free": qf, "quantified": q }) }
}

fn witness_report() -> Outcome {
    let checks = witnesses::all();
    let text = checks.iter().map(|c| format!("{c}\n")).collect();
    Outcome {
        text,
        holds: checks.iter().all(|c| c.agrees()),
        json: serde_json::to_value(&checks).expect("serializable"),
    }
}

fn corpus_cmd(cmd: &CorpusCmd) -> Result<Outcome> {
    let files = corpus::files();
    match cmd {
        CorpusCmd::List => {
            let rows: Vec<(String, FileKind)> = files.iter().map(|(n, s)| (n.clone(), FileKind::detect(s))).collect();
            let text = rows.iter().map(|(n, k)| format!("{n}\t{}\n", json!(k).as_str().unwrap_or(""))).collect();
            let json = rows.iter().map(|(n, k)| json!({ "name": n, "kind": k })).collect::<Vec<_>>();
            Ok(Outcome { text, json: json.into(), holds: true })
        }
        CorpusCmd::Show { name } => {
            let src = corpus::file(name).ok_or_else(|| {
                CliError::Pnl(Error::Invalid(format!("no corpus file `{name}`; see `pnl corpus list`")))
            })?;
            Ok(Outcome { text: src.to_string(), json: json!({ "name": name, "text": src }), holds: true })
        }
        CorpusCmd::Extract { dir } => {
            for (n, src) in &files {
                let path = dir.join(n);
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.to_path_buf(), e))?;
                }
                write(&path, src)?;
            }
            let names: Vec<&String> = files.iter().map(|(n, _)| n).collect();
            Ok(Outcome {
                text: format!("wrote {} files under {}\n", files.len(), dir.display()),
                json: json!({ "dir": dir, "files": names }),
                holds: true,
            })
        }
    }
}
