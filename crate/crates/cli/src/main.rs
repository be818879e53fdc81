//! Command-line front end: demos with verified contracts, a solver for
//! JSON-defined finite games, and a verifier for their check suite.
//!
//! Exit codes partition outcomes: `0` all verdicts true, `1` some verdict
//! false, `2` usage or parse error, `3` budget or continuity error.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use selgames::bw::{bw_realizer, verify_bw, BwConfig};
use selgames::corpus::{comprehension_corpus, drinkers_corpus, injection_corpus};
use selgames::eps::{EpsConfig, GameFunctionals, PaddedSequence};
use selgames::gamefile::{analyze_game_file, parse_game_file, TraceDocument, Verdict};
use selgames::realizers::{
    collision_invariants_hold, drinkers_selection, metastability_search, no_injection_witness,
    sigma1_ca_approximation_set, sigma1_ca_contract_holds, sigma1_ca_realizer, RationalSequence,
};
use selgames::sources::{PsiSpec, SequenceSpec};
use selgames::Error;

#[derive(Parser)]
#[command(name = "selgames", version, about = "Selection-function games: demos, solver, verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in demonstration and check its contracts
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
        #[command(flatten)]
        common: CommonArgs,
        /// Counterexample functional for the bw demo: const:<n> or
        /// read-b:<index>:<cap>
        #[arg(long, default_value = "const:1")]
        psi: String,
        /// Sequence for the bw demo: alternating, const:N/D, i-over-i+1, or
        /// a file of "numerator denominator" lines
        #[arg(long, default_value = "alternating")]
        sequence: String,
    },
    /// Solve a JSON game file and print its trace document
    SolveGame {
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-run the check suite of a JSON game file and print the verdicts
    Verify {
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    Drinkers,
    Metastability,
    Ca,
    Noinj,
    Bw,
}

#[derive(Args)]
struct CommonArgs {
    /// Emit machine-readable JSON instead of the text report
    #[arg(long)]
    json: bool,
    /// Expansion budget for product evaluations
    #[arg(long)]
    max_depth: Option<u64>,
    /// Seed for the sampled demos
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CommonArgs {
    fn eps_config(&self) -> EpsConfig {
        match self.max_depth {
            Some(budget) => EpsConfig::with_budget(budget),
            None => EpsConfig::default(),
        }
    }

    fn bw_config(&self) -> BwConfig {
        let mut cfg = BwConfig::default();
        if let Some(budget) = self.max_depth {
            cfg.eps_budget = budget;
        }
        cfg
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_limit() {
                3
            } else {
                2
            }
        }
    };
    std::process::exit(code);
}

/// Runs one command; `Ok(bool)` is "did every verdict pass".
fn run(command: &Command) -> Result<bool, Error> {
    match command {
        Command::Demo {
            which,
            common,
            psi,
            sequence,
        } => {
            let report = match which {
                DemoKind::Drinkers => demo_drinkers(common)?,
                DemoKind::Metastability => demo_metastability()?,
                DemoKind::Ca => demo_ca(common)?,
                DemoKind::Noinj => demo_noinj(common)?,
                DemoKind::Bw => demo_bw(common, psi, sequence)?,
            };
            report.print(common.json);
            Ok(report.all_pass())
        }
        Command::SolveGame { file, common } => {
            let doc = analyze(file, common)?;
            if common.json {
                println!("{}", doc.to_json());
            } else {
                print_trace(&doc);
            }
            Ok(doc.all_pass())
        }
        Command::Verify { file, common } => {
            let doc = analyze(file, common)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc.verdicts)
                        .expect("verdicts always serialize")
                );
            } else {
                for v in &doc.verdicts {
                    println!("{}: {}", v.check, pass_str(v.pass));
                }
            }
            Ok(doc.all_pass())
        }
    }
}

fn analyze(file: &PathBuf, common: &CommonArgs) -> Result<TraceDocument, Error> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::InvalidInput(format!("reading {}: {e}", file.display())))?;
    let game = parse_game_file(&text)?;
    analyze_game_file(&game, &common.eps_config())
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn print_trace(doc: &TraceDocument) {
    println!("play: {:?}", doc.play);
    println!("outcome: {}", doc.outcome);
    println!("relevant length: {}", doc.relevant_length);
    for (i, r) in doc.rounds.iter().enumerate() {
        println!(
            "  round {i}: at {:?} chose {} (continuation outcome {})",
            r.position, r.chosen, r.continuation_outcome
        );
    }
    for v in &doc.verdicts {
        println!("{}: {}", v.check, pass_str(v.pass));
    }
}

/// A demo's inputs, outputs, and contract verdicts, printable both ways.
struct DemoReport {
    title: &'static str,
    lines: Vec<String>,
    verdicts: Vec<Verdict>,
    json: serde_json::Value,
}

impl DemoReport {
    fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    fn print(&self, as_json: bool) {
        if as_json {
            let mut body = self.json.clone();
            body["verdicts"] = serde_json::to_value(&self.verdicts)
                .expect("verdicts always serialize");
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ self.title: body }))
                    .expect("demo reports always serialize")
            );
            return;
        }
        println!("{}", self.title);
        for line in &self.lines {
            println!("  {line}");
        }
        for v in &self.verdicts {
            println!("{}: {}", v.check, pass_str(v.pass));
        }
    }
}

fn verdict(check: &str, pass: bool) -> Verdict {
    Verdict {
        check: check.into(),
        pass,
    }
}

const DEMO_SAMPLES: usize = 20;

/// For each sampled predicate/counterexample pair, the chosen element must
/// satisfy "if the predicate holds of the response, it holds of the choice".
fn demo_drinkers(common: &CommonArgs) -> Result<DemoReport, Error> {
    let mut lines = Vec::new();
    let mut samples = Vec::new();
    let mut all_hold = true;
    for (i, sample) in drinkers_corpus(common.seed, DEMO_SAMPLES).iter().enumerate() {
        let pred = sample.pred();
        let responses = sample.response_fn();
        let selection = drinkers_selection(Arc::clone(&pred), 0u64);
        let chosen = selection.apply(&|x| Ok(responses(x)))?;
        let holds = !pred(&responses(&chosen)) || pred(&chosen);
        all_hold &= holds;
        if i < 3 {
            lines.push(format!(
                "sample {i}: chose {chosen}, response {}, implication {}",
                responses(&chosen),
                pass_str(holds)
            ));
        }
        samples.push(json!({ "chosen": chosen, "response": responses(&chosen) }));
    }
    lines.push(format!("({DEMO_SAMPLES} samples, seed {})", common.seed));
    Ok(DemoReport {
        title: "drinkers",
        lines,
        verdicts: vec![verdict("implication-contract", all_hold)],
        json: json!({ "seed": common.seed, "samples": samples }),
    })
}

/// Fixed instance: the dyadic approach `1 - 2^-n` with tolerance `2^-1` and
/// window functional `p(n) = n + 5` stabilizes at `n = 1`.
fn demo_metastability() -> Result<DemoReport, Error> {
    let k = 1u32;
    let x = RationalSequence::new(|n| {
        BigRational::from_integer(BigInt::from(1))
            - BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(n as u32))
    });
    let p = |n: u64| n + 5;
    let witness = metastability_search(&x, k, &p)?;
    let n = witness.index;
    let spread = x.at(n + p(n)) - x.at(n);
    let tolerance = BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(k));
    let window_ok = spread <= tolerance;
    let candidates_ok = witness.candidates <= (1 << k) + 1;
    let lines = vec![
        format!("sequence: 1 - 2^-n, tolerance 2^-{k}, window p(n) = n + 5"),
        format!("stable from n = {n}, window spread {spread}"),
        format!("candidates examined: {}", witness.candidates),
    ];
    Ok(DemoReport {
        title: "metastability",
        lines,
        verdicts: vec![
            verdict("window-spread", window_ok),
            verdict("candidate-bound", candidates_ok),
        ],
        json: json!({
            "tolerance_exponent": k,
            "index": n,
            "candidates": witness.candidates,
            "spread": spread.to_string(),
        }),
    })
}

/// Sampled comprehension instances: each finite approximation must decide
/// membership correctly for every round up to its control value.
fn demo_ca(common: &CommonArgs) -> Result<DemoReport, Error> {
    let cfg = common.eps_config();
    let mut lines = Vec::new();
    let mut samples = Vec::new();
    let mut all_hold = true;
    for (i, sample) in comprehension_corpus(common.seed, DEMO_SAMPLES).iter().enumerate() {
        let phi = sample.phi();
        let (omega, q) = (sample.omega.clone(), sample.q.clone());
        let functionals = GameFunctionals::new(
            move |play: &PaddedSequence<u64>| q.value(play),
            move |play: &PaddedSequence<u64>| omega.value(play),
        );
        let f = sigma1_ca_realizer(Arc::clone(&phi), &functionals, &cfg)?;
        let holds = sigma1_ca_contract_holds(&phi, &f, &functionals)?;
        all_hold &= holds;
        let relevant = functionals.control(&f)?;
        let set = sigma1_ca_approximation_set(&phi, &f, relevant);
        if i < 3 {
            lines.push(format!(
                "sample {i}: F = {:?}.., members {set:?}, contract {}",
                f.take_prefix(relevant + 1),
                pass_str(holds)
            ));
        }
        samples.push(json!({ "f": f.take_prefix(relevant + 1), "members": set }));
    }
    lines.push(format!("({DEMO_SAMPLES} samples, seed {})", common.seed));
    Ok(DemoReport {
        title: "comprehension",
        lines,
        verdicts: vec![verdict("membership-contract", all_hold)],
        json: json!({ "seed": common.seed, "samples": samples }),
    })
}

/// Sampled claimed injections: each must yield two distinct functions with
/// the same image point.
fn demo_noinj(common: &CommonArgs) -> Result<DemoReport, Error> {
    let cfg = common.eps_config();
    let mut lines = Vec::new();
    let mut samples = Vec::new();
    let mut all_hold = true;
    for (i, sample) in injection_corpus(common.seed, DEMO_SAMPLES).iter().enumerate() {
        let psi = sample.build();
        let witness = no_injection_witness(&psi, &cfg)?;
        let holds = collision_invariants_hold(&psi, &witness);
        all_hold &= holds;
        if i < 3 {
            lines.push(format!(
                "sample {i}: {:?} and {:?} collide at image {}, contract {}",
                witness.g1,
                witness.g2,
                witness.index,
                pass_str(holds)
            ));
        }
        samples.push(json!({
            "g1": { "prefix": witness.g1.prefix(), "tail": witness.g1.tail() },
            "g2": { "prefix": witness.g2.prefix(), "tail": witness.g2.tail() },
            "index": witness.index,
        }));
    }
    lines.push(format!("({DEMO_SAMPLES} samples, seed {})", common.seed));
    Ok(DemoReport {
        title: "no-injection",
        lines,
        verdicts: vec![verdict("collision-contract", all_hold)],
        json: json!({ "seed": common.seed, "samples": samples }),
    })
}

/// One convergent-subsequence run: build the approximation for the requested
/// sequence and counterexample functional, then verify its window contract.
fn demo_bw(common: &CommonArgs, psi_spec: &str, sequence_spec: &str) -> Result<DemoReport, Error> {
    let x = SequenceSpec::parse(sequence_spec)?.load()?;
    let psi = PsiSpec::parse(psi_spec)?.build();
    let cfg = common.bw_config();
    let approx = bw_realizer(&x, &psi, &cfg)?;
    let verified = verify_bw(&x, &psi, &approx);
    let head: Vec<String> = (0..6).map(|i| x.at(i).to_string()).collect();
    let subsequence: Vec<String> = (0..=approx.psi_value + 1)
        .map(|n| x.at(approx.b.get(n)).to_string())
        .collect();
    let lines = vec![
        format!("sequence {sequence_spec}: {} ...", head.join(", ")),
        format!("counterexample functional {psi_spec}, value {}", approx.psi_value),
        format!("interval path a = {:?}", approx.a.prefix()),
        format!("indices b = {:?} picking {}", approx.b.prefix(), subsequence.join(", ")),
        format!("bounds beta = {:?}", approx.beta.prefix()),
    ];
    Ok(DemoReport {
        title: "bolzano-weierstrass",
        lines,
        verdicts: vec![verdict("subsequence-window", verified)],
        json: json!({
            "sequence": sequence_spec,
            "psi": psi_spec,
            "a": approx.a.prefix(),
            "b": approx.b.prefix(),
            "beta": approx.beta.prefix(),
            "psi_value": approx.psi_value,
            "b_fallback_indices": approx.b_fallback_indices,
        }),
    })
}
