//! Command-line front end. Exit codes: 0 success, 1 input or usage error,
//! 2 property alarm (a certificate that contradicts the expected property).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::graphs::{self, CostFunction, Edge, Matching};
use crate::hunt::{self, HuntConfig};
use crate::improve;
use crate::io::{self, CertificateDocument};
use crate::svg::render_svg;
use crate::tverberg::{self, Classification, TverbergCertificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ALARM: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tverberg", version, about = "Max-sum trees and matchings with Tverberg certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Max-sum spanning tree, optionally certified via the enclosing-ball center.
    Tree(TreeArgs),
    /// Max-sum perfect matching, optionally certified or improved from a given matching.
    #[command(name = "match")]
    Match(MatchArgs),
    /// Seeded search for small depth-to-distance ratios.
    Hunt(HuntArgs),
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Point file (JSON or CSV).
    pub input: PathBuf,
    /// Edge-length transform: id, square or sqrt.
    #[arg(long = "f", default_value = "id")]
    pub f: String,
    /// Emit a certificate; exit 2 if the closed balls share no point.
    #[arg(long)]
    pub verify: bool,
    /// Write a planar figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Also write the certificate document to this file.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Point file (JSON or CSV) with an even number of points.
    pub input: PathBuf,
    /// Emit a certificate; exit 2 if the closed balls share no point.
    #[arg(long)]
    pub verify: bool,
    /// Require an open certificate; exit 2 otherwise.
    #[arg(long)]
    pub open: bool,
    /// Run local search from the matching in this JSON edge file.
    #[arg(long)]
    pub improve_from: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Write a planar figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Also write the certificate document to this file.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HuntArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub descent_steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub step_size: f64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TreeReport<'a> {
    command: &'static str,
    input_digest: String,
    n: usize,
    dim: usize,
    cost_function: &'a str,
    edges: &'a [Edge],
    cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDocument>,
}

#[derive(Serialize)]
struct StepReport {
    cycle: Vec<usize>,
    edges: Vec<Edge>,
    cost: f64,
    gain: f64,
}

#[derive(Serialize)]
struct MatchReport<'a> {
    command: &'static str,
    input_digest: String,
    n: usize,
    dim: usize,
    source: &'static str,
    edges: &'a [Edge],
    cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<StepReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDocument>,
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::NoCycleFound(_)
        | Error::CertificateFailure(_)
        | Error::TangentIdentity { .. }
        | Error::IterationLimit(_) => EXIT_ALARM,
        _ => EXIT_INPUT,
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report fields are finite");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

fn emit_svg(path: Option<&PathBuf>, ps: &PointSet, edges: &[Edge], cert: Option<&TverbergCertificate>) -> Result<()> {
    if let Some(path) = path {
        write_file(path, &render_svg(ps, edges, cert)?)?;
    }
    Ok(())
}

fn emit_certificate(path: Option<&PathBuf>, doc: Option<&CertificateDocument>) -> Result<()> {
    if let (Some(path), Some(doc)) = (path, doc) {
        let mut text = doc.to_json();
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(())
}

fn cmd_tree(args: &TreeArgs, out: &mut dyn Write) -> Result<i32> {
    let f: CostFunction = args.f.parse()?;
    let ps = io::read_points(&args.input)?;
    let tree = graphs::max_sum_tree(&ps, &f)?;
    let cert = if args.verify || args.svg.is_some() {
        Some(tverberg::tree_witness_seb(&ps, &tree)?)
    } else {
        None
    };
    let doc = cert
        .as_ref()
        .filter(|_| args.verify)
        .map(|c| CertificateDocument::new(&ps, "tree", tree.edges(), c));
    emit_svg(args.svg.as_ref(), &ps, tree.edges(), cert.as_ref())?;
    emit_certificate(args.certificate.as_ref(), doc.as_ref())?;
    let code = match &doc {
        Some(d) if d.classification == Classification::None => EXIT_ALARM,
        _ => EXIT_OK,
    };
    let report = TreeReport {
        command: "tree",
        input_digest: io::input_digest(&ps),
        n: ps.len(),
        dim: ps.dim(),
        cost_function: f.name(),
        edges: tree.edges(),
        cost: graphs::cost(&ps, tree.edges(), &f),
        certificate: doc,
    };
    out.write_all(json_line(&report).as_bytes())?;
    Ok(code)
}

fn cmd_match(args: &MatchArgs, out: &mut dyn Write) -> Result<i32> {
    let ps = io::read_points(&args.input)?;
    if ps.len() % 2 == 1 {
        return Err(Error::OddPointCount(ps.len()));
    }
    let want_cert = args.verify || args.open;
    let (matching, steps, cert) = match &args.improve_from {
        Some(path) => {
            let edges = io::parse_edges(&io::read_text(path)?)?;
            let initial = Matching::new(ps.len(), &edges)?;
            let outcome = improve::local_search(&ps, &initial, args.max_iters)?;
            let steps = outcome
                .steps
                .iter()
                .map(|s| StepReport {
                    cycle: s.cycle.vertices.clone(),
                    edges: s.matching.edges().to_vec(),
                    cost: s.cost,
                    gain: s.gain,
                })
                .collect();
            (outcome.matching, Some(steps), Some(outcome.certificate))
        }
        None => {
            let m = graphs::max_sum_matching(&ps)?;
            let cert = if want_cert || args.svg.is_some() {
                Some(tverberg::verify_tverberg(&ps, m.edges())?)
            } else {
                None
            };
            (m, None, cert)
        }
    };
    let doc = cert
        .as_ref()
        .filter(|_| want_cert || steps.is_some())
        .map(|c| CertificateDocument::new(&ps, "matching", matching.edges(), c));
    emit_svg(args.svg.as_ref(), &ps, matching.edges(), cert.as_ref())?;
    emit_certificate(args.certificate.as_ref(), doc.as_ref())?;
    let code = match doc.as_ref().map(|d| d.classification) {
        Some(Classification::None) => EXIT_ALARM,
        Some(c) if args.open && c != Classification::Open => EXIT_ALARM,
        _ => EXIT_OK,
    };
    let report = MatchReport {
        command: "match",
        input_digest: io::input_digest(&ps),
        n: ps.len(),
        dim: ps.dim(),
        source: if steps.is_some() { "local_search" } else { "max_sum" },
        edges: matching.edges(),
        cost: graphs::cost(&ps, matching.edges(), &CostFunction::Identity),
        steps,
        certificate: doc,
    };
    out.write_all(json_line(&report).as_bytes())?;
    Ok(code)
}

fn cmd_hunt(args: &HuntArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = HuntConfig {
        dim: args.dim,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        descent_steps: args.descent_steps,
        step_size: args.step_size,
    };
    let report = json_line(&hunt::hunt(&cfg)?);
    match &args.out {
        Some(path) => write_file(path, &report)?,
        None => out.write_all(report.as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Tree(a) => cmd_tree(a, out),
        Command::Match(a) => cmd_match(a, out),
        Command::Hunt(a) => cmd_hunt(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_exit_code(&e)
        }
    }
}
