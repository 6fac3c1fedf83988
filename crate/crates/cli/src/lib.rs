//! Command implementations behind the `loccdist` binary.
//!
//! Every command produces both a human-readable text report and a JSON
//! value encoding the same verdict, so the two output modes can never
//! disagree. Exit codes: 0 = verdict computed (whatever it is), 1 = input
//! or usage error, 2 = numerical indeterminacy.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use loccdist::classify::classify_2x2;
use loccdist::numerics::MatrixDoc;
use loccdist::povm::{BranchOutcome, FirstMoveVerdict, FirstMoveVerdictKind, first_move_verdict, nwe_report};
use loccdist::protocol::{OutcomeLabel, SimulationReport, build_protocol_with_tol, simulate};
use loccdist::states::{Party, QubitBasis, StateSet, named_set, named_set_catalog, set_from_json};
use loccdist::{Error, SearchConfig, SearchResult, SearchStatus, find_basis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

/// Shots used by the optional sampling mode of `simulate --seed`.
pub const SAMPLE_SHOTS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "loccdist",
    version,
    about = "Decide, witness, and certify exact LOCC discrimination of orthogonal bipartite state sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit a JSON document instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// State-set JSON document: `{"dims":[dA,dB],"states":[{"label":…,"amps":[[re,im],…]},…]}`.
    #[arg(value_name = "FILE", required_unless_present = "named", conflicts_with = "named")]
    pub input: Option<PathBuf>,
    /// Built-in named set (see `loccdist named --list`).
    #[arg(long, value_name = "NAME")]
    pub named: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Witness acceptance tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Bloch-sphere grid step for searches, in degrees.
    #[arg(long = "grid-deg", default_value_t = 2.0)]
    pub grid_deg: f64,
}

impl ConfigArgs {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(Error::Validation(format!(
                "--tol {} outside (0, 1e-4]",
                self.tol
            )));
        }
        if !(self.grid_deg > 0.0 && self.grid_deg <= 45.0) {
            return Err(Error::Validation(format!(
                "--grid-deg {} outside (0, 45]",
                self.grid_deg
            )));
        }
        Ok(())
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            grid_step_deg: self.grid_deg,
            zero_tol: self.tol.min(1e-6),
            ..SearchConfig::default()
        }
    }
}

fn parse_party(s: &str) -> Result<Party, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_basis(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected θ,φ (two comma-separated radians)".into());
    }
    let theta: f64 = parts[0].trim().parse().map_err(|e| format!("θ: {e}"))?;
    let phi: f64 = parts[1].trim().parse().map_err(|e| format!("φ: {e}"))?;
    Ok((theta, phi))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact classification of an orthogonal 2×2 set, with witness bases.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Search the Bloch sphere for a first-mover basis for one party.
    FindBasis {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Which party measures first.
        #[arg(long, value_parser = parse_party)]
        party: Party,
    },
    /// Decide whether a party can perform any nontrivial first measurement.
    FirstMove {
        #[command(flatten)]
        input: InputArgs,
        /// Which party would measure first.
        #[arg(long, value_parser = parse_party)]
        party: Party,
    },
    /// Check nonlocality without entanglement: an all-product set neither
    /// party can start measuring.
    VerifyNwe {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Build the two-step protocol from a witness basis and evaluate it.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Which party measures first.
        #[arg(long, value_parser = parse_party)]
        party: Party,
        /// Witness basis as θ,φ in radians; searched for when omitted.
        #[arg(long, value_parser = parse_basis)]
        basis: Option<(f64, f64)>,
        /// Also draw sampled outcome frequencies with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Named example sets shipped in the binary.
    Named {
        /// List the available names.
        #[arg(long)]
        list: bool,
    },
}

/// A rendered command outcome: text and JSON views of the same verdict.
pub struct CmdOutput {
    pub text: String,
    pub json: serde_json::Value,
}

fn load_set(input: &InputArgs) -> Result<StateSet, Error> {
    if let Some(name) = &input.named {
        return named_set(name, None);
    }
    let path = input.input.as_ref().expect("clap enforces file-or-named");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    set_from_json(&text)
}

fn angle(x: f64) -> String {
    // 12 significant digits.
    format!("{x:.11e}")
}

fn basis_line(label: &str, basis: &QubitBasis) -> String {
    format!("  {label} witness: θ = {}, φ = {} rad", angle(basis.theta), angle(basis.phi))
}

pub fn run(cli: &Cli) -> Result<CmdOutput, Error> {
    match &cli.command {
        Command::Classify { input, config } => {
            config.validate()?;
            let set = load_set(input)?;
            cmd_classify(&set)
        }
        Command::FindBasis { input, config, party } => {
            config.validate()?;
            let set = load_set(input)?;
            cmd_find_basis(&set, *party, &config.search_config())
        }
        Command::FirstMove { input, party } => {
            let set = load_set(input)?;
            cmd_first_move(&set, *party)
        }
        Command::VerifyNwe { input } => {
            let set = load_set(input)?;
            cmd_verify_nwe(&set)
        }
        Command::Simulate { input, config, party, basis, seed } => {
            config.validate()?;
            let set = load_set(input)?;
            cmd_simulate(&set, *party, *basis, *seed, config)
        }
        Command::Named { .. } => cmd_named(),
    }
}

fn cmd_classify(set: &StateSet) -> Result<CmdOutput, Error> {
    let verdict = classify_2x2(set)?;
    let mut text = format!("{:?}\n", verdict.kind);
    if let Some(b) = &verdict.alice_witness {
        text.push_str(&basis_line("Alice", b));
        text.push('\n');
    }
    if let Some(b) = &verdict.bob_witness {
        text.push_str(&basis_line("Bob", b));
        text.push('\n');
    }
    text.push_str(&format!("  rationale: {}\n", verdict.rationale));
    let json = serde_json::to_value(&verdict).expect("verdict serializes");
    Ok(CmdOutput { text, json })
}

fn cmd_find_basis(set: &StateSet, party: Party, config: &SearchConfig) -> Result<CmdOutput, Error> {
    let result: SearchResult = find_basis(set, party, config)?;
    let mut text = String::new();
    match result.status {
        SearchStatus::Found => {
            let b = result.basis.as_ref().expect("found carries basis");
            text.push_str(&format!(
                "Found: {party} measuring first distinguishes the set\n"
            ));
            text.push_str(&basis_line(&party.to_string(), b));
            text.push_str(&format!("\n  residual: {:.3e}\n", result.residual));
        }
        SearchStatus::NotFoundAtResolution => {
            text.push_str(&format!(
                "NotFoundAtResolution: no basis for {party} at this resolution \
                 (numerical non-witness, not an impossibility proof)\n"
            ));
            text.push_str(&format!("  residual floor: {:.6e}\n", result.grid_floor));
        }
    }
    let json = serde_json::to_value(&result).expect("search result serializes");
    Ok(CmdOutput { text, json })
}

fn first_move_text(v: &FirstMoveVerdict) -> String {
    let mut text = String::new();
    match v.kind {
        FirstMoveVerdictKind::CannotGoFirst => {
            text.push_str(&format!(
                "CannotGoFirst: every POVM element {} could apply first is \
                 proportional to the identity ({} branches checked)\n",
                v.party,
                v.certificate.len()
            ));
            let trivial = v.certificate.iter().filter(|r| r.outcome == BranchOutcome::TrivialOnly).count();
            let infeasible = v.certificate.iter().filter(|r| r.outcome == BranchOutcome::Infeasible).count();
            let max_dim = v.certificate.iter().map(|r| r.subspace_dim).max().unwrap_or(0);
            text.push_str(&format!(
                "  certificate: {trivial} identity-only branch(es), {infeasible} infeasible, \
                 max solution-space dimension {max_dim}\n"
            ));
        }
        FirstMoveVerdictKind::MayGoFirst => {
            let record = v.certificate.last().expect("witness branch recorded");
            text.push_str(&format!(
                "MayGoFirst: {} has a nontrivial first measurement (branch {}, \
                 solution space dimension {})\n",
                v.party, record.branch, record.subspace_dim
            ));
            if let Some(w) = &v.witness {
                text.push_str("  witness POVM element:\n");
                for line in format!("{}", w.matrix()).lines() {
                    text.push_str(&format!("    {line}\n"));
                }
            }
        }
    }
    text
}

fn cmd_first_move(set: &StateSet, party: Party) -> Result<CmdOutput, Error> {
    let verdict = first_move_verdict(set, party)?;
    let text = first_move_text(&verdict);
    let json = serde_json::to_value(&verdict).expect("verdict serializes");
    Ok(CmdOutput { text, json })
}

fn cmd_verify_nwe(set: &StateSet) -> Result<CmdOutput, Error> {
    let report = nwe_report(set)?;
    let mut text = format!(
        "nonlocality without entanglement: {}\n",
        report.nonlocality_without_entanglement
    );
    if !report.all_product {
        text.push_str("  the set contains entangled states, so the phenomenon does not apply\n");
    }
    text.push_str(&format!("— Alice: {}", first_move_text(&report.alice)));
    text.push_str(&format!("— Bob: {}", first_move_text(&report.bob)));
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(CmdOutput { text, json })
}

#[derive(Serialize)]
struct SampledReport {
    seed: u64,
    shots: usize,
    empirical_success: Vec<(String, f64)>,
}

fn cmd_simulate(
    set: &StateSet,
    party: Party,
    basis: Option<(f64, f64)>,
    seed: Option<u64>,
    config: &ConfigArgs,
) -> Result<CmdOutput, Error> {
    let witness = match basis {
        Some((theta, phi)) => QubitBasis::canonical(party, theta, phi),
        None => {
            let res = find_basis(set, party, &config.search_config())?;
            match res.status {
                SearchStatus::Found => res.basis.expect("found carries basis"),
                SearchStatus::NotFoundAtResolution => {
                    return Err(Error::WitnessInvalid(format!(
                        "no witness basis found for {party} (residual floor {:.3e}); \
                         supply one with --basis θ,φ",
                        res.grid_floor
                    )));
                }
            }
        }
    };
    let protocol = build_protocol_with_tol(set, &witness, config.tol)?;
    let report = simulate(&protocol, set)?;

    let mut text = format!(
        "protocol from {party} basis θ = {}, φ = {}\n",
        angle(witness.theta),
        angle(witness.phi)
    );
    for sr in &report.per_state {
        text.push_str(&format!("  {}: success {:.9}\n", sr.label, sr.success));
    }
    text.push_str(&format!("  minimum success: {:.9}\n", report.min_success));

    let sampled = seed.map(|s| sample_report(&report, s));
    if let Some(sr) = &sampled {
        text.push_str(&format!("sampled ({} shots, seed {}):\n", sr.shots, sr.seed));
        for (label, freq) in &sr.empirical_success {
            text.push_str(&format!("  {label}: {freq:.4}\n"));
        }
    }

    let json = json!({
        "witness": witness,
        "report": report,
        "sampled": sampled,
    });
    Ok(CmdOutput { text, json })
}

fn sample_report(report: &SimulationReport, seed: u64) -> SampledReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut empirical = Vec::new();
    for sr in &report.per_state {
        let mut hits = 0usize;
        for _ in 0..SAMPLE_SHOTS {
            let mut x: f64 = rand::Rng::random(&mut rng);
            for (_, _, p, meaning) in &sr.outcomes {
                x -= p;
                if x <= 0.0 {
                    if *meaning == OutcomeLabel::State(sr.label.clone()) {
                        hits += 1;
                    }
                    break;
                }
            }
        }
        empirical.push((sr.label.clone(), hits as f64 / SAMPLE_SHOTS as f64));
    }
    SampledReport { seed, shots: SAMPLE_SHOTS, empirical_success: empirical }
}

fn cmd_named() -> Result<CmdOutput, Error> {
    let catalog = named_set_catalog();
    let mut text = String::from("named sets:\n");
    for (name, desc) in &catalog {
        text.push_str(&format!("  {name:<16} {desc}\n"));
    }
    let json = json!({
        "named_sets": catalog.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>(),
    });
    Ok(CmdOutput { text, json })
}

/// Map an error to its process exit code.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericalIndeterminate(_) => EXIT_INDETERMINATE,
        _ => EXIT_USAGE,
    }
}

/// Serialization helper for witness matrices in ad-hoc JSON blocks.
pub fn matrix_json(m: &loccdist::CMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixDoc::from_matrix(m)).expect("matrix serializes")
}
