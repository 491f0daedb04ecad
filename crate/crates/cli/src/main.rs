//! `tnsgeo`: JSON pipelines over tensor network states.
//!
//! Exit codes: 0 success or certified, 1 inconclusive, 2 parse error,
//! 3 semantic error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tns_core::degeneration::{act_curve, leading_term, splitting_curves};
use tns_core::geometry::{certify_not_closed_in, tns_dim, Conclusion};
use tns_core::json::{self, CurveJson, GraphJson, TensorJson};
use tns_core::lie_stab;
use tns_core::network::{
    contract_network, expected_dim, reduce_valence_one, supercritical_truncate, Merge,
};
use tns_core::scalar::PRIME_M61;
use tns_core::zoo::{diagonal_splitting, mmult, Splitting};
use tns_core::{Error, Field, Tensor};

#[derive(Parser, Debug)]
#[command(
    name = "tnsgeo",
    version,
    about = "Exact computations on tensor network states"
)]
struct Cli {
    /// Arithmetic for ranks and stabilizers. Without this flag, stabilizers
    /// pick the field by system size and everything else is rational.
    #[arg(long, global = true, value_enum)]
    field: Option<FieldMode>,

    /// Prime for `--field fp` (2^30 < p < 2^63). Implies `--field fp`.
    #[arg(long, global = true)]
    prime: Option<u64>,

    /// Seed for random instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FieldMode {
    Rational,
    Fp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contract an instance to a tensor.
    Contract { instance: PathBuf },
    /// Stabilizer and orbit dimensions of a tensor.
    Stabilizer { tensor: PathBuf },
    /// Non-closedness certificate for the critical triangle with edge dim e.
    Certify {
        #[arg(long)]
        e: usize,
        /// Splitting file (X0, Y0, Z0); defaults to the diagonal splitting.
        #[arg(long)]
        splitting: Option<PathBuf>,
    },
    /// Jacobian dimension of a graph's tensor network set.
    Dim { graph: PathBuf },
    /// Valence-one reduction of a graph.
    Reduce { graph: PathBuf },
    /// Leading term of a curve acting on a tensor: either a splitting curve
    /// on MMult (`--e`, optional `--splitting`) or explicit `--tensor` and
    /// `--curves`.
    Limit {
        #[arg(long, conflicts_with_all = ["tensor", "curves"])]
        e: Option<usize>,
        #[arg(long, requires = "e")]
        splitting: Option<PathBuf>,
        #[arg(long, requires = "curves")]
        tensor: Option<PathBuf>,
        #[arg(long, requires = "tensor")]
        curves: Option<PathBuf>,
    },
}

/// Successful output plus whether the result is conclusive.
struct Outcome {
    json: String,
    conclusive: bool,
    note: Option<String>,
}

impl Outcome {
    fn done<T: Serialize>(v: &T) -> Outcome {
        Outcome {
            json: json::render(v),
            conclusive: true,
            note: None,
        }
    }
}

enum Failure {
    Parse(String),
    Semantic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Semantic(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

impl Cli {
    /// `None` leaves the choice to the operation.
    fn field(&self) -> Result<Option<Field>, Failure> {
        match (self.field, self.prime) {
            (Some(FieldMode::Rational), Some(_)) => {
                Err(Failure::Semantic("--prime requires --field fp".into()))
            }
            (Some(FieldMode::Rational), None) => Ok(Some(Field::Rational)),
            (Some(FieldMode::Fp), p) | (None, p @ Some(_)) => {
                Ok(Some(Field::prime(p.unwrap_or(PRIME_M61))?))
            }
            (None, None) => Ok(None),
        }
    }

    fn exact_or(&self) -> Result<Field, Failure> {
        Ok(self.field()?.unwrap_or(Field::Rational))
    }
}

fn load_splitting(path: Option<&Path>, e: usize) -> Result<Splitting, Failure> {
    match path {
        Some(p) => Ok(json::splitting_from_str(&read(p)?)?),
        None => Ok(diagonal_splitting(e)?),
    }
}

#[derive(Serialize)]
struct DimReport {
    jacobian_dim: usize,
    formula_dim: FormulaDim,
    agree: Option<bool>,
    field: &'static str,
    prime: Option<u64>,
    seed: u64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum FormulaDim {
    Known(u64),
    Unknown(&'static str),
}

#[derive(Serialize)]
struct ReduceReport {
    graph: GraphJson,
    merge_log: Vec<Merge>,
    truncated: GraphJson,
    truncation_offset: u64,
}

#[derive(Serialize)]
struct LimitReport {
    power: i64,
    tensor: TensorJson,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Contract { instance } => {
            let inst = json::instance_from_str(&read(instance)?)?.to_field(cli.exact_or()?)?;
            Ok(Outcome::done(&TensorJson::from(&contract_network(&inst)?)))
        }
        Command::Stabilizer { tensor } => {
            let t = json::tensor_from_str(&read(tensor)?)?;
            let field = cli
                .field()?
                .unwrap_or_else(|| lie_stab::auto_field(t.shape()));
            Ok(Outcome::done(&lie_stab::report(&t, field)?))
        }
        Command::Certify { e, splitting } => {
            if *e < 2 {
                return Err(Failure::Semantic("certify needs e >= 2".into()));
            }
            let s = load_splitting(splitting.as_deref(), *e)?;
            let cert = certify_not_closed_in(&s, *e, cli.field()?)?;
            let conclusive = cert.conclusion == Conclusion::NotClosedCertified;
            Ok(Outcome {
                json: json::render(&cert),
                conclusive,
                note: (!conclusive).then(|| format!("inconclusive: {}", cert.reasons.join("; "))),
            })
        }
        Command::Dim { graph } => {
            let g = json::graph_from_str(&read(graph)?)?;
            let field = cli.exact_or()?;
            let jacobian_dim = tns_dim(&g, cli.seed, field)?;
            let formula = expected_dim(&g).value();
            Ok(Outcome::done(&DimReport {
                jacobian_dim,
                formula_dim: formula.map_or(FormulaDim::Unknown("unknown"), FormulaDim::Known),
                agree: formula.map(|f| f == jacobian_dim as u64),
                field: field.label(),
                prime: field.modulus(),
                seed: cli.seed,
            }))
        }
        Command::Reduce { graph } => {
            let g = json::graph_from_str(&read(graph)?)?;
            let (reduced, merge_log) = reduce_valence_one(&g);
            let (truncated, truncation_offset) = supercritical_truncate(&g);
            Ok(Outcome::done(&ReduceReport {
                graph: GraphJson::from(&reduced),
                merge_log,
                truncated: GraphJson::from(&truncated),
                truncation_offset,
            }))
        }
        Command::Limit {
            e,
            splitting,
            tensor,
            curves,
        } => {
            let field = cli.exact_or()?;
            let (t, cs) = match (e, tensor, curves) {
                (Some(e), _, _) => {
                    let s = load_splitting(splitting.as_deref(), *e)?;
                    (mmult(*e, *e, *e), splitting_curves(&s))
                }
                (None, Some(tp), Some(cp)) => {
                    let t = json::tensor_from_str(&read(tp)?)?;
                    let cj: Vec<CurveJson> = json::parse(&read(cp)?)?;
                    let cs = json::curves_from_json(&cj, t.shape())?;
                    (t, cs)
                }
                _ => {
                    return Err(Failure::Parse(
                        "limit needs --e or both --tensor and --curves".into(),
                    ))
                }
            };
            let t: Tensor = t.to_field(field)?;
            let cs = cs
                .iter()
                .map(|c| {
                    let terms = c
                        .terms()
                        .iter()
                        .map(|(p, m)| Ok((*p, m.to_field(field)?)))
                        .collect::<Result<Vec<_>, Error>>()?;
                    tns_core::degeneration::MatrixCurve::new(terms)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let (power, lead) = leading_term(&act_curve(&t, &cs)?)?;
            Ok(Outcome::done(&LimitReport {
                power,
                tensor: TensorJson::from(&lead),
            }))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Semantic(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| emit(&cli, &o.json).map(|()| o));
    match result {
        Ok(o) if o.conclusive => ExitCode::SUCCESS,
        Ok(o) => {
            if let Some(note) = o.note {
                eprintln!("{note}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
