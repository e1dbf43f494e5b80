use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kripkecon::classical::{
    bounded_fo_validity, decide_propositional, eval_classical, BoundedVerdict, ClassicalModel,
    PropVerdict, DEFAULT_CEILING,
};
use kripkecon::golden::{verify_paper, EXPECTED_DEVIATIONS};
use kripkecon::kripke::{
    bounded_cd_countermodel_search, eval_all_worlds, eval_kripke, model_validity,
    validate_kripke_model, CdSearchVerdict, KripkeModel, ModelVerdict,
};
use kripkecon::model::{Assignment, RawModel};
use kripkecon::separator::{render_human, separate, Separation};
use kripkecon::suites::{fuzz, FuzzConfig, DEFAULT_TRIALS};
use kripkecon::syntax::{parse_formula, parse_sequent, Formula, Sequent};
use kripkecon::truthfn::{standard, Signature};
use kripkecon::Error;

const CEILING_VAR: &str = "KRIPKECON_MAX_INTERPRETATIONS";

const SUCCESS: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const ALL_MONOTONE: u8 = 3;
const INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "kripkecon",
    version,
    about = "Kripke semantics for arbitrary truth-table connectives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    ClassicalProp,
    ClassicalBounded,
    KripkeModel,
    CdSearch,
}

#[derive(Subcommand)]
enum Command {
    /// Report monotonicity, witness pair and case of every connective.
    CheckMono {
        #[arg(long)]
        sig: PathBuf,
    },
    /// Evaluate a formula in a classical or Kripke model.
    Eval {
        /// Signature file; defaults to and, or, implies, nand, xor, not.
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Formula text, or a path to a file containing it.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        all_worlds: bool,
        /// Bind a free variable, as `x=individual`. Repeatable.
        #[arg(long = "assign", value_name = "VAR=IND")]
        assign: Vec<String>,
    },
    /// Decide or search for countermodels of a sequent.
    Valid {
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Sequent text `Γ => Δ`, or a path to a file containing it.
        #[arg(long)]
        sequent: String,
        /// Kripke model for `kripke-model`.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Domain bound: 3 for `classical-bounded`, 2 for `cd-search`.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_domain: Option<u64>,
        /// World bound for `cd-search`.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
        max_worlds: Option<u64>,
    },
    /// Synthesize and verify a sequent separating constant-domain Kripke
    /// validity from classical validity.
    Separate {
        #[arg(long)]
        sig: PathBuf,
    },
    /// Regenerate the published value tables and compare.
    VerifyPaper,
    /// Run the seeded heredity, lift and collapse property suites.
    Fuzz {
        #[arg(long, default_value_t = DEFAULT_TRIALS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: corrupt the first heredity trial.
        #[arg(long)]
        inject_non_hereditary: bool,
    },
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Verification { .. } => INTERNAL,
            _ => INPUT_ERROR,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: INPUT_ERROR,
        message: message.into(),
    }
}

/// Rendered output plus exit code.
struct Output {
    code: u8,
    human: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Human => print!("{}", out.human),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
                ),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            match cli.format {
                Format::Human => eprintln!("error: {}", f.message),
                Format::Json => println!("{}", json!({ "error": f.message, "exit_code": f.code })),
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::CheckMono { sig } => check_mono(&load_signature(sig)?),
        Command::Eval {
            sig,
            model,
            formula,
            world,
            all_worlds,
            assign,
        } => {
            let sig = signature_or_default(sig.as_deref())?;
            let f = parse_formula(&text_or_file(formula)?, &sig)
                .map_err(|e| input_error(e.to_string()))?;
            eval(&f, model, world.as_deref(), *all_worlds, assign)
        }
        Command::Valid {
            sig,
            mode,
            sequent,
            model,
            max_domain,
            max_worlds,
        } => {
            let sig = signature_or_default(sig.as_deref())?;
            let s = parse_sequent(&text_or_file(sequent)?, &sig)
                .map_err(|e| input_error(e.to_string()))?;
            valid(&s, *mode, model.as_deref(), *max_domain, *max_worlds)
        }
        Command::Separate { sig } => separate_cmd(&load_signature(sig)?),
        Command::VerifyPaper => verify(),
        Command::Fuzz {
            trials,
            seed,
            inject_non_hereditary,
        } => fuzz_cmd(&FuzzConfig {
            trials: *trials as usize,
            seed: *seed,
            inject_non_hereditary: *inject_non_hereditary,
        }),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn text_or_file(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        read(path)
    } else {
        Ok(arg.to_string())
    }
}

fn load_signature(path: &Path) -> Result<Signature, Failure> {
    Signature::parse(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn signature_or_default(path: Option<&Path>) -> Result<Signature, Failure> {
    match path {
        Some(p) => load_signature(p),
        None => Ok(Signature::from_tables([
            standard::and(),
            standard::or(),
            standard::implies(),
            standard::nand(),
            standard::xor(),
            standard::not(),
        ])?),
    }
}

fn ceiling() -> Result<u128, Failure> {
    match std::env::var(CEILING_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            input_error(format!(
                "{CEILING_VAR} must be a non-negative integer, found `{v}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_CEILING),
    }
}

fn check_mono(sig: &Signature) -> Result<Output, Failure> {
    let mut human = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for c in sig.connectives() {
        let witness = c.monotonicity_witness();
        all &= witness.is_none();
        let bits = c.outputs().to_bit_string();
        match &witness {
            None => {
                let _ = writeln!(human, "{} ({}/{bits}): monotone", c.name(), c.arity());
            }
            Some((a, b)) => {
                let _ = writeln!(
                    human,
                    "{} ({}/{bits}): not monotone, witness ({a}, {b}) with t(a) = 1, t(b) = 0, case ({})",
                    c.name(),
                    c.arity(),
                    c.classify_case()
                );
            }
        }
        rows.push(json!({
            "name": c.name(),
            "arity": c.arity(),
            "table": bits,
            "monotone": witness.is_none(),
            "witness": witness.as_ref().map(|(a, b)| json!({"a": a.to_bit_string(), "b": b.to_bit_string()})),
            "case": witness.as_ref().map(|_| c.classify_case().to_string()),
        }));
    }
    if all {
        human.push_str("all monotone\n");
    }
    Ok(Output {
        code: if all { SUCCESS } else { NEGATIVE },
        human,
        json: json!({ "all_monotone": all, "connectives": rows }),
    })
}

fn load_model(path: &Path) -> Result<RawModel, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_kripke(path: &Path) -> Result<KripkeModel, Failure> {
    match load_model(path)? {
        RawModel::Kripke(raw) => validate_kripke_model(&raw).map_err(|vs| {
            let lines: Vec<String> = vs.iter().map(|v| format!("  {v}")).collect();
            input_error(format!(
                "{}: invalid Kripke model\n{}",
                path.display(),
                lines.join("\n")
            ))
        }),
        RawModel::Classical(_) => Err(input_error(format!(
            "{}: expected a Kripke model",
            path.display()
        ))),
    }
}

fn parse_assignment(pairs: &[String], individuals: &[String]) -> Result<Assignment, Failure> {
    let mut rho = Assignment::empty();
    for pair in pairs {
        let (x, name) = pair.split_once('=').ok_or_else(|| {
            input_error(format!(
                "assignment `{pair}` is not of the form var=individual"
            ))
        })?;
        let a = individuals
            .iter()
            .position(|i| i == name.trim())
            .ok_or_else(|| input_error(format!("unknown individual `{}`", name.trim())))?;
        rho.bind(x.trim(), a);
    }
    Ok(rho)
}

fn eval(
    f: &Formula,
    model: &Path,
    world: Option<&str>,
    all_worlds: bool,
    assign: &[String],
) -> Result<Output, Failure> {
    match load_model(model)? {
        RawModel::Classical(raw) => {
            let (m, _) = ClassicalModel::from_raw(&raw)?;
            let rho = parse_assignment(assign, m.individuals())?;
            let v = eval_classical(&m, &rho, f)? as u8;
            Ok(Output {
                code: SUCCESS,
                human: format!("{v}\n"),
                json: json!({ "formula": f.to_string(), "value": v }),
            })
        }
        RawModel::Kripke(_) => {
            let k = load_kripke(model)?;
            let rho = parse_assignment(assign, k.individuals())?;
            let mut human = String::new();
            let mut doc = json!({ "formula": f.to_string() });
            if let Some(name) = world {
                let v = eval_kripke(&k, k.world(name)?, &rho, f)? as u8;
                let _ = writeln!(human, "{v}");
                doc["world"] = json!(name);
                doc["value"] = json!(v);
            } else if !all_worlds {
                return Err(input_error("Kripke models need --world or --all-worlds"));
            }
            if all_worlds {
                let values = eval_all_worlds(&k, &rho, f)?;
                let mut per = serde_json::Map::new();
                for (w, v) in k.worlds().iter().zip(values) {
                    let shown =
                        v.map_or_else(|| "undefined".to_string(), |b| (b as u8).to_string());
                    let _ = writeln!(human, "{w}: {shown}");
                    per.insert(w.clone(), v.map_or(Value::Null, |b| json!(b as u8)));
                }
                doc["worlds"] = Value::Object(per);
            }
            Ok(Output {
                code: SUCCESS,
                human,
                json: doc,
            })
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("model records serialize")
}

fn valid(
    s: &Sequent,
    mode: Mode,
    model: Option<&Path>,
    max_domain: Option<u64>,
    max_worlds: Option<u64>,
) -> Result<Output, Failure> {
    let text = s.to_string();
    let valid_out = |human: String, json: Value| Output {
        code: SUCCESS,
        human,
        json,
    };
    let negative = |human: String, json: Value| Output {
        code: NEGATIVE,
        human,
        json,
    };
    match mode {
        Mode::ClassicalProp => match decide_propositional(s)? {
            PropVerdict::Valid { symbols, rows } => Ok(valid_out(
                format!("Valid ({rows} valuations of {})\n", symbols.join(", ")),
                json!({ "sequent": text, "verdict": "valid", "symbols": symbols, "rows": rows }),
            )),
            PropVerdict::Countermodel(m) => {
                let raw = m.to_raw();
                let vals: Vec<String> = raw
                    .interp
                    .iter()
                    .map(|f| format!("{}={}", f.pred, f.value.as_bool().unwrap_or(false) as u8))
                    .collect();
                Ok(negative(
                    format!("Countermodel: {}\n", vals.join(" ")),
                    json!({ "sequent": text, "verdict": "countermodel", "model": to_json(&raw) }),
                ))
            }
        },
        Mode::ClassicalBounded => {
            let n = max_domain.unwrap_or(3) as usize;
            match bounded_fo_validity(s, n, ceiling()?)? {
                BoundedVerdict::NoCountermodelUpTo(n) => Ok(valid_out(
                    format!("NoCountermodelUpTo(domain {n})\n"),
                    json!({ "sequent": text, "verdict": "no-countermodel-up-to", "max_domain": n }),
                )),
                BoundedVerdict::Countermodel { model, assignment } => {
                    let names = model.individuals().to_vec();
                    Ok(negative(
                        format!(
                            "Countermodel with domain {{{}}} under {}\n{}\n",
                            names.join(", "),
                            render_assignment(&assignment, &names),
                            serde_json::to_string(&model.to_raw()).expect("serializable")
                        ),
                        json!({
                            "sequent": text,
                            "verdict": "countermodel",
                            "model": to_json(&model.to_raw()),
                            "assignment": assignment.to_named(&names),
                        }),
                    ))
                }
            }
        }
        Mode::KripkeModel => {
            let path = model.ok_or_else(|| input_error("kripke-model mode needs --model"))?;
            let k = load_kripke(path)?;
            match model_validity(&k, s)? {
                ModelVerdict::Valid => Ok(valid_out(
                    "Valid in the model\n".into(),
                    json!({ "sequent": text, "verdict": "valid" }),
                )),
                ModelVerdict::Failure { world, assignment } => {
                    let w = &k.worlds()[world];
                    Ok(negative(
                        format!(
                            "Failure at {w} under {}\n",
                            render_assignment(&assignment, k.individuals())
                        ),
                        json!({
                            "sequent": text,
                            "verdict": "failure",
                            "world": w,
                            "assignment": assignment.to_named(k.individuals()),
                        }),
                    ))
                }
            }
        }
        Mode::CdSearch => {
            let worlds = max_worlds.unwrap_or(3) as usize;
            let domain = max_domain.unwrap_or(2) as usize;
            match bounded_cd_countermodel_search(s, worlds, domain, ceiling()?)? {
                CdSearchVerdict::NoCountermodelUpTo { worlds, domain } => Ok(valid_out(
                    format!("NoCountermodelUpTo({worlds} worlds, domain {domain})\n"),
                    json!({
                        "sequent": text,
                        "verdict": "no-countermodel-up-to",
                        "max_worlds": worlds,
                        "max_domain": domain,
                    }),
                )),
                CdSearchVerdict::Countermodel {
                    model,
                    world,
                    assignment,
                } => {
                    let raw = model.to_raw();
                    let w = &model.worlds()[world];
                    Ok(negative(
                        format!(
                            "Countermodel refuting at {w} under {}\n{}\n",
                            render_assignment(&assignment, model.individuals()),
                            serde_json::to_string_pretty(&raw).expect("serializable")
                        ),
                        json!({
                            "sequent": text,
                            "verdict": "countermodel",
                            "world": w,
                            "assignment": assignment.to_named(model.individuals()),
                            "model": to_json(&raw),
                        }),
                    ))
                }
            }
        }
    }
}

fn render_assignment(rho: &Assignment, names: &[String]) -> String {
    let parts: Vec<String> = rho
        .to_named(names)
        .into_iter()
        .map(|(x, a)| format!("{x} -> {a}"))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn separate_cmd(sig: &Signature) -> Result<Output, Failure> {
    match separate(sig)? {
        Separation::AllMonotone => Ok(Output {
            code: ALL_MONOTONE,
            human: "all monotone: classical and constant-domain Kripke validity coincide\n".into(),
            json: json!({ "result": "all-monotone" }),
        }),
        Separation::Separated(r) => Ok(Output {
            code: if r.verification.passed {
                SUCCESS
            } else {
                INTERNAL
            },
            human: render_human(&r),
            json: to_json(&*r),
        }),
    }
}

fn verify() -> Result<Output, Failure> {
    let r = verify_paper()?;
    let mut human = format!(
        "{} tables, {} claims, {} schemas over {} connectives: {} comparisons\n",
        r.tables, r.claims, r.schemas, r.connectives, r.cells_checked
    );
    for (id, why) in EXPECTED_DEVIATIONS {
        let _ = writeln!(human, "expected deviation {id}: {why}");
        for d in r.deviations.iter().filter(|d| d.id == *id) {
            let _ = writeln!(
                human,
                "  {}: printed {}, engine {}",
                d.location, d.printed, d.engine
            );
        }
    }
    for m in &r.mismatches {
        let _ = writeln!(human, "MISMATCH {m}");
    }
    let _ = writeln!(human, "{}", if r.passed { "passed" } else { "FAILED" });
    Ok(Output {
        code: if r.passed { SUCCESS } else { INTERNAL },
        human,
        json: to_json(&r),
    })
}

fn fuzz_cmd(cfg: &FuzzConfig) -> Result<Output, Failure> {
    let r = fuzz(cfg)?;
    let mut human = format!("seed {}, {} trials per suite\n", r.seed, r.trials);
    for s in &r.suites {
        let _ = writeln!(
            human,
            "{}: {} effective trials, {} checks, {} violations",
            s.name, s.effective, s.checks, s.violations
        );
        if let Some(cx) = &s.counterexample {
            let _ = writeln!(
                human,
                "  trial {} (shrunk in {} steps): {}\n  {}\n  assignment {:?}\n  model {}",
                cx.trial,
                cx.shrink_steps,
                cx.subject,
                cx.detail,
                cx.assignment,
                serde_json::to_string(&cx.model).expect("serializable")
            );
        }
    }
    let _ = writeln!(human, "{}", if r.passed { "passed" } else { "FAILED" });
    Ok(Output {
        code: if r.passed { SUCCESS } else { NEGATIVE },
        human,
        json: to_json(&r),
    })
}
