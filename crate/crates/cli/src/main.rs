use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use planar_vcsp::classify_boolean::{self, BooleanVerdict};
use planar_vcsp::classify_conservative::{self, ConservativeVerdict, PairGraph};
use planar_vcsp::closure::{saturate, Budget};
use planar_vcsp::express::{self, check_realization, realize, Derivation, RealizationCheck};
use planar_vcsp::json::{self, QueryDoc};
use planar_vcsp::ops::is_multimorphism;
use planar_vcsp::plane::{self, validate_instance};
use planar_vcsp::value::format_rational;
use planar_vcsp::{Error, Language, WeightedRelation};

const OK: u8 = 0;
const INPUT: u8 = 1;
const INFEASIBLE: u8 = 2;
const INTRACTABLE: u8 = 3;
const SELF_COMPLEMENTARY: u8 = 4;
const EXHAUSTED: u8 = 5;
const UNKNOWN: u8 = 6;

#[derive(Parser)]
#[command(name = "pvcsp", version, about = "Planar valued CSP toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    /// Largest arity kept during saturation.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_arity: Option<u64>,
    /// Number of saturation rounds.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_depth: Option<u64>,
    /// Largest saturated set.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_set: Option<u64>,
    /// Enumeration cap as a number of variables: at most |D|^n assignments or factor entries.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_vars: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Optimum and a minimising assignment of a plane instance.
    Solve { instance: PathBuf },
    /// The relation a query expresses on its outer vertices.
    Express { query: PathBuf },
    /// Structural and embedding checks of a plane instance.
    Validate { instance: PathBuf },
    /// Checks a multimorphism, given as a file or as names like `min,max`.
    CheckMm { language: PathBuf, multimorphism: String },
    /// Planar tractability verdict for a Boolean language.
    ClassifyBoolean { language: PathBuf },
    /// Planar tractability verdict for a conservative language (all unaries assumed).
    ClassifyConservative { language: PathBuf },
    /// The pair graph of a conservative language.
    PairGraph {
        language: PathBuf,
        /// Same as `--format dot`.
        #[arg(long)]
        dot: bool,
    },
    /// ρ₀, ρ₁, ρ≠ and ρ_1-in-3 gadgets of a Boolean language, with plane realizations.
    Synthesize { language: PathBuf },
    /// Relations derivable within the budgets, with derivations.
    Saturate {
        language: PathBuf,
        /// Treat every unary as available.
        #[arg(long)]
        conservative: bool,
    },
}

struct Output {
    body: String,
    code: u8,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn language(path: &Path) -> Result<Language, Error> {
    json::parse_language(&read(path)?).map_err(|e| located(path, e))
}

fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

impl Opts {
    fn budget(&self, lang: &Language) -> Budget {
        let mut b = Budget::for_language(lang);
        if let Some(v) = self.max_arity {
            b.max_arity = v as usize;
        }
        if let Some(v) = self.max_depth {
            b.max_depth = v as usize;
        }
        if let Some(v) = self.max_set {
            b.max_set = v as usize;
        }
        b
    }

    fn cap(&self, d: usize) -> u64 {
        match self.max_vars {
            None => plane::DEFAULT_CAP,
            Some(n) => (d.max(2) as u64).checked_pow(n.min(63) as u32).unwrap_or(u64::MAX),
        }
    }
}

fn json_out<T: Serialize>(v: &T, code: u8) -> Output {
    Output { body: json::to_pretty(v), code }
}

fn text_table(r: &WeightedRelation) -> String {
    r.tuples()
        .map(|t| {
            let labels: Vec<String> = t.iter().map(|a| a.to_string()).collect();
            format!("{} {}\n", labels.join(" "), r.get(&t))
        })
        .collect()
}

fn unsupported(format: Format, command: &str) -> Result<Output, Error> {
    let name = match format {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Text => "text",
    };
    Err(Error::Invalid(format!("{command} does not support --format {name}")))
}

#[derive(Serialize)]
struct GadgetArtifact {
    target: String,
    relation: WeightedRelation,
    derivation: Derivation,
    realization: QueryDoc,
    shift: String,
    opt_scaled: bool,
    check: RealizationCheck,
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let o = &cli.opts;
    let f = o.format;
    match &cli.command {
        Command::Solve { instance } => {
            let inst = json::parse_instance(&read(instance)?).map_err(|e| located(instance, e))?;
            let sol = plane::solve_with_cap(&inst, o.cap(inst.domain_size))?;
            let code = if sol.optimum.is_inf() { INFEASIBLE } else { OK };
            match f {
                Format::Json => Ok(json_out(&sol, code)),
                Format::Text => {
                    let a = match &sol.assignment {
                        Some(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                        None => "-".into(),
                    };
                    Ok(Output { body: format!("optimum {}\nassignment {a}\n", sol.optimum), code })
                }
                Format::Dot => unsupported(f, "solve"),
            }
        }
        Command::Express { query } => {
            let q = json::parse_query(&read(query)?).map_err(|e| located(query, e))?;
            let r = express::pi_v_with_cap(&q, o.cap(q.instance.domain_size))?;
            match f {
                Format::Json => Ok(json_out(&r, OK)),
                Format::Text => Ok(Output { body: text_table(&r), code: OK }),
                Format::Dot => unsupported(f, "express"),
            }
        }
        Command::Validate { instance } => {
            let inst = json::parse_instance(&read(instance)?).map_err(|e| located(instance, e))?;
            let report = validate_instance(&inst);
            let code = if report.ok { OK } else { INPUT };
            match f {
                Format::Json => Ok(json_out(&report, code)),
                Format::Text => {
                    let mut body = format!("ok {}\nfaces {}\n", report.ok, report.faces);
                    for v in &report.violations {
                        body.push_str(&format!("{}\n", serde_json::to_string(v).expect("serializable")));
                    }
                    Ok(Output { body, code })
                }
                Format::Dot => unsupported(f, "validate"),
            }
        }
        Command::CheckMm { language: path, multimorphism } => {
            let lang = language(path)?;
            let mm_path = Path::new(multimorphism);
            let mm = if mm_path.is_file() {
                json::parse_multimorphism(&read(mm_path)?).map_err(|e| located(mm_path, e))?
            } else {
                json::multimorphism_by_names(multimorphism)?
            };
            let v = is_multimorphism(&mm, &lang)?;
            match f {
                Format::Json => Ok(json_out(&v, OK)),
                Format::Text => Ok(Output {
                    body: format!("{}\n", serde_json::to_value(&v).expect("serializable")["verdict"].as_str().unwrap_or("")),
                    code: OK,
                }),
                Format::Dot => unsupported(f, "check-mm"),
            }
        }
        Command::ClassifyBoolean { language: path } => {
            let lang = language(path)?;
            let v = classify_boolean::classify_boolean_with_cap(&lang, o.budget(&lang), o.cap(2))?;
            let code = match &v {
                BooleanVerdict::Tractable { .. } => OK,
                BooleanVerdict::PlanarlyIntractable { .. } => INTRACTABLE,
                BooleanVerdict::OpenSelfComplementary => SELF_COMPLEMENTARY,
                BooleanVerdict::BudgetExhausted { .. } => EXHAUSTED,
            };
            verdict_out(f, &v, code, "classify-boolean")
        }
        Command::ClassifyConservative { language: path } => {
            let lang = language(path)?;
            let v = classify_conservative::classify_conservative(&lang, o.budget(&lang))?;
            let code = match &v {
                ConservativeVerdict::Tractable { .. } => OK,
                ConservativeVerdict::PlanarlyIntractable { .. } => INTRACTABLE,
                ConservativeVerdict::Unknown { .. } => UNKNOWN,
            };
            verdict_out(f, &v, code, "classify-conservative")
        }
        Command::PairGraph { language: path, dot } => {
            let lang = language(path)?;
            let (g, _) = PairGraph::build(&lang, o.budget(&lang))?;
            if *dot || f == Format::Dot {
                return Ok(Output { body: g.to_dot(), code: OK });
            }
            match f {
                Format::Json => Ok(json_out(&g, OK)),
                _ => unsupported(f, "pair-graph"),
            }
        }
        Command::Synthesize { language: path } => {
            let lang = language(path)?;
            let s = saturate(&lang, o.budget(&lang), false)?;
            let ders = match classify_boolean::synthesize(&lang, &s) {
                Ok(d) => d,
                Err(e @ (Error::Budget(_) | Error::Precondition(_))) => {
                    eprintln!("pvcsp: {e}");
                    return Ok(json_out(&serde_json::json!({ "gadgets": null, "reason": e.to_string() }), EXHAUSTED));
                }
                Err(e) => return Err(e),
            };
            let mut out = Vec::new();
            for (target, derivation) in ders {
                let real = realize(&derivation, &lang)?;
                let check = check_realization(&derivation, &lang, o.cap(2))?;
                out.push(GadgetArtifact {
                    target,
                    relation: derivation.replay(&lang)?,
                    realization: QueryDoc::from_query(&real.query),
                    shift: format_rational(&real.shift),
                    opt_scaled: real.opt_scaled,
                    check,
                    derivation,
                });
            }
            match f {
                Format::Json => Ok(json_out(&serde_json::json!({ "gadgets": out }), OK)),
                Format::Text => Ok(Output {
                    body: out
                        .iter()
                        .map(|g| format!("{} {} vertices={} matches={}\n", g.target, g.derivation.encode(), g.check.vertices, g.check.matches))
                        .collect(),
                    code: OK,
                }),
                Format::Dot => unsupported(f, "synthesize"),
            }
        }
        Command::Saturate { language: path, conservative } => {
            let lang = language(path)?;
            let s = saturate(&lang, o.budget(&lang), *conservative)?;
            match f {
                Format::Json => Ok(json_out(&s, OK)),
                Format::Text => {
                    let mut body = format!("entries {}\nexhausted {}\n", s.len(), s.exhausted);
                    for e in &s.entries {
                        body.push_str(&format!("{} {} {}\n", e.level, e.relation.encode(), e.derivation.encode()));
                    }
                    Ok(Output { body, code: OK })
                }
                Format::Dot => unsupported(f, "saturate"),
            }
        }
    }
}

fn verdict_out<T: Serialize>(f: Format, v: &T, code: u8, command: &str) -> Result<Output, Error> {
    match f {
        Format::Json => Ok(json_out(v, code)),
        Format::Text => {
            let value = serde_json::to_value(v).expect("serializable");
            Ok(Output { body: format!("{}\n", value["verdict"].as_str().unwrap_or("")), code })
        }
        Format::Dot => unsupported(f, command),
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Budget(_) => EXHAUSTED,
        _ => INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.opts.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("pvcsp: {e}");
            return ExitCode::from(INPUT);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.body);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("pvcsp: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
