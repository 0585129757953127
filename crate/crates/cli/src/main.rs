use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arakelov_core::audit::{audit, Suite};
use arakelov_core::catalog::{emit, x1n_model, ENTRIES};
use arakelov_core::document::FiberDocument;
use arakelov_core::fiber::validate;
use arakelov_core::global::{evaluate, global_beta, FormalLogSum};
use arakelov_core::invariants::{beta_closed, beta_direct, semipositivity_certificate};
use arakelov_core::linalg::effective_resistance;
use arakelov_core::rational::{fmt_rat, parse_rat};
use arakelov_core::{Error, FiberAnalysis, HorizontalIncidence, VerticalDivisor};

#[derive(Parser)]
#[command(name = "arakelov", version, about = "Exact invariants of special fibers of arithmetic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural conditions on a fiber document.
    Validate { file: PathBuf },
    /// Compute an invariant of a fiber document.
    Compute {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Op::Beta)]
        op: Op,
        /// Horizontal divisor id; defaults to the first one in the document.
        #[arg(long)]
        divisor: Option<String>,
    },
    /// List or emit catalog fibers.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run a reproduction audit suite.
    Audit {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate a formal sum of logarithms `p=q ...` numerically.
    Evaluate {
        #[arg(long, default_value_t = 6)]
        digits: u32,
        /// Evaluate the global beta of the X1(N) model instead of explicit terms.
        #[arg(long, conflicts_with = "terms")]
        x1n: Option<u64>,
        terms: Vec<String>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Emit {
        name: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        params: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Beta,
    Vdiv,
    Udiv,
    Resistance,
    Semipos,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Table1,
    Fermat,
    X1n,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Table1 => Suite::Table1,
            SuiteArg::Fermat => Suite::Fermat,
            SuiteArg::X1n => Suite::X1n,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Failure {
    Input(String),
    Audit,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_document(path: &Path) -> Result<FiberDocument, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(FiberDocument::parse(&bytes)?)
}

fn pick_divisor<'a>(doc: &'a FiberDocument, id: Option<&str>) -> Result<&'a HorizontalIncidence, Failure> {
    match id {
        Some(id) => doc
            .divisor(id)
            .ok_or_else(|| Failure::Input(format!("no horizontal divisor `{id}` in document"))),
        None => doc
            .horizontals
            .first()
            .ok_or_else(|| Error::MissingDivisor(doc.fiber.name().to_string()).into()),
    }
}

fn render_vertical(an: &FiberAnalysis, label: &str, v: &VerticalDivisor) -> String {
    let mut out = String::new();
    for (c, q) in an.fiber().components().iter().zip(&v.coeffs) {
        out.push_str(&format!("{label}[{}] {}\n", c.id, fmt_rat(q)));
    }
    out
}

fn compute(file: &Path, op: Op, divisor: Option<&str>) -> Result<String, Failure> {
    let doc = read_document(file)?;
    let an = FiberAnalysis::new(doc.fiber.clone())?;
    let out = match op {
        Op::Beta => {
            if divisor.is_none() && an.fiber().is_reduced() {
                beta_closed(&an)?.render()
            } else {
                beta_direct(&an, pick_divisor(&doc, divisor)?)?.render()
            }
        }
        Op::Vdiv => {
            let d = pick_divisor(&doc, divisor)?;
            let v = an.solve_vertical(d)?;
            format!("divisor {}\n{}", d.id, render_vertical(&an, "V", &v))
        }
        Op::Udiv => {
            let d = pick_divisor(&doc, divisor)?;
            let g = an.gamma_u(d)?;
            let mut out = format!("divisor {}\n", d.id);
            for (c, q) in an.fiber().components().iter().zip(&g.gamma) {
                out.push_str(&format!("gamma[{}] {}\n", c.id, fmt_rat(q)));
            }
            out.push_str(&render_vertical(&an, "U", &g.u_divisor));
            out
        }
        Op::Resistance => {
            let comps = an.fiber().components();
            let mut out = String::new();
            for i in 0..comps.len() {
                for j in i + 1..comps.len() {
                    let r = effective_resistance(an.pinv(), i, j)?;
                    out.push_str(&format!("r({},{}) {}\n", comps[i].id, comps[j].id, fmt_rat(&r)));
                }
            }
            out
        }
        Op::Semipos => {
            let d = pick_divisor(&doc, divisor)?;
            let cert = semipositivity_certificate(&an, d)?;
            let mut out = format!("divisor {}\nverdict {}\n", d.id, cert.verdict);
            for (k, c) in an.fiber().components().iter().enumerate() {
                out.push_str(&format!("q[{}] {}", c.id, fmt_rat(&cert.q[k])));
                if let Some(df) = &cert.d_free {
                    out.push_str(&format!(" d_free {}", fmt_rat(&df[k])));
                }
                if let Some(rb) = &cert.resistance_bound {
                    out.push_str(&format!(" resistance_bound {}", fmt_rat(&rb[k])));
                }
                out.push('\n');
            }
            out
        }
    };
    Ok(out)
}

fn parse_terms(terms: &[String]) -> Result<FormalLogSum, Failure> {
    let mut sum = FormalLogSum::new();
    for t in terms {
        let (p, q) = t
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("term `{t}` is not of the form p=q")))?;
        let p: u64 = p
            .trim()
            .parse()
            .ok()
            .filter(|p| *p >= 2)
            .ok_or_else(|| Failure::Input(format!("term `{t}`: base must be an integer >= 2")))?;
        let q = parse_rat(q.trim()).map_err(|e| Failure::Input(format!("term `{t}`: {e}")))?;
        sum.add_term(p, q);
    }
    Ok(sum)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let doc = read_document(&file)?;
            let report = validate(&doc.fiber);
            print!("{}", report.render());
            if !report.is_valid() {
                return Err(Failure::Input(format!("fiber `{}` is invalid", doc.fiber.name())));
            }
        }
        Command::Compute { file, op, divisor } => {
            print!("{}", compute(&file, op, divisor.as_deref())?);
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for e in ENTRIES {
                    println!("{}\t{}\t{}", e.name, e.params, e.summary);
                }
            }
            CatalogAction::Emit { name, params } => {
                let (fiber, horizontals) = emit(&name, &params)?;
                print!("{}", FiberDocument::new(fiber, horizontals).to_json());
            }
        },
        Command::Audit { suite, out, format } => {
            let report = audit(suite.into());
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            write_output(out.as_deref(), &text)?;
            if !report.passed() {
                return Err(Failure::Audit);
            }
        }
        Command::Evaluate { digits, x1n, terms } => {
            if digits == 0 {
                return Err(Failure::Input("--digits must be at least 1".into()));
            }
            let sum = match x1n {
                Some(n) => global_beta(&x1n_model(n)?)?,
                None => parse_terms(&terms)?,
            };
            println!("{sum} = {}", evaluate(&sum, digits));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Audit) => {
            eprintln!("audit: asserted rows failed");
            ExitCode::from(2)
        }
    }
}
