use clap::{Parser, Subcommand, ValueEnum};
use gsf::eval::EvalError;
use gsf::precision::PrecCtx;
use gsf::seal::{differential_check_with, Embedding};
use gsf::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gsf", version, about = "Gradual System F with existentials")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Dialect {
    Gsf,
    Lseal,
    Ldyn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Dyn,
    Seal,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the type of a program.
    Typecheck {
        file: PathBuf,
        #[arg(long, value_enum)]
        dialect: Option<Dialect>,
    },
    /// Evaluate a program.
    Run {
        file: PathBuf,
        #[arg(long, value_enum)]
        dialect: Option<Dialect>,
        /// Adapt missing type abstractions and applications at runtime.
        #[arg(long)]
        dip: bool,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "text")]
        trace: Option<TraceFormat>,
        /// Include every consistent transitivity call in the trace.
        #[arg(long)]
        trace_trans: bool,
        /// Print the elaborated program before running it.
        #[arg(long)]
        emit_eps: bool,
    },
    /// Translate a dynamically typed or sealing program into the gradual language.
    Embed {
        file: PathBuf,
        #[arg(long, value_enum)]
        from: Source,
    },
    /// Run a sealing or dynamic program directly and through its embedding.
    Diff {
        file: PathBuf,
        #[arg(long, value_enum)]
        dialect: Option<Dialect>,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Decide whether the first program is more precise than the second.
    Precision {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Step two related programs side by side.
    Lockstep {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
    },
}

// Exit codes.
const VALUE: u8 = 0;
const RUNTIME_ERROR: u8 = 1;
const TYPE_ERROR: u8 = 2;
const TIMEOUT: u8 = 3;
const PARSE_ERROR: u8 = 4;
const INTERNAL: u8 = 5;

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Res = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cmd: Cmd) -> Res {
    match cmd {
        Cmd::Typecheck { file, dialect } => typecheck(&file, dialect),
        Cmd::Run { file, dialect, dip, max_steps, trace, trace_trans, emit_eps } => {
            let opts = EvalOptions { max_steps, dip, trace: trace.is_some(), trace_trans, ..EvalOptions::default() };
            run_file(&file, dialect, &opts, trace, emit_eps)
        }
        Cmd::Embed { file, from } => {
            let text = read(&file)?;
            let t = match from {
                Source::Seal => embed_seal(&parse_with(&file, &text, parse_seal)?),
                Source::Dyn => embed_dyn(&parse_with(&file, &text, parse_dyn)?).map_err(|e| fail(TYPE_ERROR, e.0))?,
            };
            println!("{t}");
            Ok(VALUE)
        }
        Cmd::Diff { file, dialect, max_steps } => diff(&file, dialect, max_steps),
        Cmd::Precision { file1, file2, strict } => {
            let (t1, t2) = (load_gsf(&file1)?, load_gsf(&file2)?);
            for (f, t) in [(&file1, &t1), (&file2, &t2)] {
                typecheck_gsf(&TypeEnv::new(), t).map_err(|e| fail(TYPE_ERROR, format!("{}: {e}", f.display())))?;
            }
            let related = if strict {
                strict_term_precision_gsf(&mut PrecCtx::default(), &t1, &t2).is_some()
            } else {
                term_precision(&t1, &t2)
            };
            println!("{related}");
            Ok(VALUE)
        }
        Cmd::Lockstep { file1, file2, max_steps } => {
            let (t1, t2) = (load_gsf(&file1)?, load_gsf(&file2)?);
            let v = lockstep_check(&t1, &t2, &EvalOptions::with_steps(max_steps)).map_err(eval_failure)?;
            println!("{v}");
            Ok(if v.ok() { VALUE } else { INTERNAL })
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(PARSE_ERROR, format!("{}: {e}", path.display())))
}

fn dialect_of(path: &Path, flag: Option<Dialect>) -> Dialect {
    flag.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("lseal") => Dialect::Lseal,
        Some("ldyn") => Dialect::Ldyn,
        _ => Dialect::Gsf,
    })
}

fn parse_with<T>(path: &Path, text: &str, p: fn(&str) -> Result<T, ParseError>) -> Result<T, Failure> {
    p(text).map_err(|e| fail(PARSE_ERROR, format!("{}: {e}", path.display())))
}

fn load_gsf(path: &Path) -> Result<Term, Failure> {
    parse_with(path, &read(path)?, parse_gsf)
}

/// The program as a gradual term, embedding the untyped dialects.
fn load(path: &Path, dialect: Option<Dialect>) -> Result<Term, Failure> {
    let text = read(path)?;
    match dialect_of(path, dialect) {
        Dialect::Gsf => parse_with(path, &text, parse_gsf),
        Dialect::Lseal => Ok(embed_seal(&parse_with(path, &text, parse_seal)?)),
        Dialect::Ldyn => embed_dyn(&parse_with(path, &text, parse_dyn)?).map_err(|e| fail(TYPE_ERROR, e.0)),
    }
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::Type(e) => fail(TYPE_ERROR, e.to_string()),
        e @ EvalError::Internal { .. } => fail(INTERNAL, e.to_string()),
    }
}

fn typecheck(path: &Path, dialect: Option<Dialect>) -> Res {
    let t = load(path, dialect)?;
    let ty = typecheck_gsf(&TypeEnv::new(), &t).map_err(|e| fail(TYPE_ERROR, e.to_string()))?;
    println!("{ty}");
    Ok(VALUE)
}

fn run_file(path: &Path, dialect: Option<Dialect>, opts: &EvalOptions, trace: Option<TraceFormat>, emit_eps: bool) -> Res {
    let dialect = dialect_of(path, dialect);
    if dialect != Dialect::Gsf && trace.is_none() && !emit_eps {
        return run_untyped(path, dialect, opts.max_steps);
    }
    let t = load(path, Some(dialect))?;
    let (e, ty) = elaborate(&t).map_err(|e| fail(TYPE_ERROR, e.to_string()))?;
    if emit_eps {
        println!("{e}");
    }
    let r = gsf::eval::run_config(Configuration::new(e), &ty, opts).map_err(eval_failure)?;
    match trace {
        Some(TraceFormat::Json) => {
            println!("{}", serde_json::to_string_pretty(&trace_json(&r)).expect("trace serializes"));
        }
        Some(TraceFormat::Text) => {
            for (i, entry) in r.trace.iter().enumerate() {
                println!("{:>4} {:<8} {} {}", i + 1, entry.rule, entry.config.store, entry.config.term);
                for call in &entry.trans {
                    println!("              {call}");
                }
            }
            print_outcome(&r.outcome, &ty);
        }
        None => print_outcome(&r.outcome, &ty),
    }
    Ok(exit_code(&r.outcome))
}

fn exit_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Value(..) => VALUE,
        Outcome::RuntimeError { .. } => RUNTIME_ERROR,
        Outcome::Timeout(_) => TIMEOUT,
    }
}

fn print_outcome(o: &Outcome, ty: &Ty) {
    match (o, o.constant()) {
        (Outcome::Value(..), Some(c)) => println!("{} : {ty}", constant(c)),
        (Outcome::Value(_, v), None) => println!("{v} : {ty}"),
        _ => println!("{o}"),
    }
}

fn constant(c: Const) -> String {
    match c {
        Const::Int(n) => n.to_string(),
        Const::Bool(b) => b.to_string(),
        Const::Unit => "unit".into(),
    }
}

fn store_json(s: &Store) -> Value {
    s.iter().map(|(a, t)| json!({ "name": a.to_string(), "type": t.to_string() })).collect()
}

fn trace_json(r: &Run) -> Value {
    let mut records: Vec<Value> = r
        .trace
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut rec = json!({
                "step": i + 1,
                "rule": e.rule,
                "store": store_json(&e.config.store),
                "term": e.config.term.to_string(),
            });
            if !e.trans.is_empty() {
                rec["trans"] = e
                    .trans
                    .iter()
                    .map(|c| {
                        json!({
                            "left": c.left.to_string(),
                            "right": c.right.to_string(),
                            "result": c.result.as_ref().map(|e| e.to_string()),
                        })
                    })
                    .collect();
            }
            rec
        })
        .collect();
    let outcome = match &r.outcome {
        Outcome::Value(_, v) => json!({ "kind": "value", "term": v.to_string() }),
        Outcome::RuntimeError { step, detail } => json!({ "kind": "error", "step": step, "detail": detail }),
        Outcome::Timeout(n) => json!({ "kind": "timeout", "steps": n }),
    };
    match records.last_mut() {
        Some(last) => last["outcome"] = outcome,
        None => records.push(json!({
            "step": 0,
            "rule": null,
            "store": store_json(&r.initial.store),
            "term": r.initial.term.to_string(),
            "outcome": outcome,
        })),
    }
    Value::Array(records)
}

fn run_untyped(path: &Path, dialect: Dialect, max_steps: usize) -> Res {
    let text = read(path)?;
    let parse = if dialect == Dialect::Lseal { parse_seal } else { parse_dyn };
    let o = eval_seal(&parse_with(path, &text, parse)?, max_steps);
    println!("{o}");
    Ok(match o {
        SealOutcome::Value(..) => VALUE,
        SealOutcome::UnsealError | SealOutcome::TypeError(_) => RUNTIME_ERROR,
        SealOutcome::SealTypeError(_) => TYPE_ERROR,
        SealOutcome::Timeout(_) => TIMEOUT,
    })
}

fn diff(path: &Path, dialect: Option<Dialect>, max_steps: usize) -> Res {
    let text = read(path)?;
    let (t, how) = match dialect_of(path, dialect) {
        Dialect::Lseal => (parse_with(path, &text, parse_seal)?, Embedding::Seal),
        Dialect::Ldyn => (parse_with(path, &text, parse_dyn)?, Embedding::Dyn),
        Dialect::Gsf => return Err(fail(TYPE_ERROR, "diff takes a sealing (.lseal) or dynamic (.ldyn) program")),
    };
    match differential_check_with(&t, max_steps, how) {
        Verdict::Agree(_) => {
            println!("Agree");
            Ok(VALUE)
        }
        Verdict::Disagree(d) => {
            println!("Disagree: {d}");
            Ok(INTERNAL)
        }
        Verdict::Skipped => {
            println!("Skipped: the program misuses a seal");
            Ok(TYPE_ERROR)
        }
    }
}
