use clap::{Parser, Subcommand};
use multiholo::Sampling;
use multiholo_cli::{
    cmd_analyze, cmd_oracle, cmd_selftest, cmd_verify, input_error, load_spec, CliError,
    FormLiteral, VerifyInput,
};

#[derive(Parser)]
#[command(
    name = "multiholo",
    about = "Structure of the multiple-holomorph quotient T(G) for class-two p-groups given by power-commutator data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report rank, orders, and the induced-automorphism stabilizer for a spec
    Analyze {
        /// Path to a spec file {"p": .., "n": .., "D": [[..]]}
        spec: String,
        #[arg(long)]
        json: bool,
        /// Sample budget for the randomized stabilizer search
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
    },
    /// Construct an isomorphism witness and verify it
    Verify {
        spec: String,
        /// Verify the power form with this c via the power map x -> x^d
        #[arg(long)]
        power_c: Option<i64>,
        /// Path to a form literal {"kind":"power"|"sigma"|"tensor", ...}
        #[arg(long)]
        form: Option<String>,
        /// Paths to two JSON matrices A and T satisfying the criterion
        #[arg(long, num_args = 2, value_names = ["A_JSON", "T_JSON"])]
        criterion: Option<Vec<String>>,
        #[arg(long)]
        json: bool,
        /// Check this many random pairs instead of the default policy
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
    /// Brute-force correspondence scan and conjugation checks
    Oracle {
        spec: String,
        #[arg(long)]
        json: bool,
        /// Inject a tampered non-bilinear table; exits 1 with the rejection
        #[arg(long)]
        corrupt_form: bool,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
    /// Run the seeded property suites of every module
    Selftest {
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        /// Run the exhaustive small-group suites as well
        #[arg(long)]
        exhaustive_small: bool,
    },
}

fn read_matrix(path: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read matrix file `{path}`: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| input_error(format!("matrix file `{path}` is not a JSON array of rows: {e}")))
}

fn run() -> Result<i32, CliError> {
    match Cli::parse().command {
        Command::Analyze { spec, json, budget } => {
            let spec = load_spec(&spec)?;
            let report = cmd_analyze(&spec, budget)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!("m = {}, rank(D) = {}", report.m, report.rank_d);
                println!("Omega_1(G) contained in G': {}", report.omega1_in_derived);
                println!("|S| (symmetric part)     = {}", report.sym_part_order);
                match (&report.res_group_order, &report.tg_order, &report.tg_order_status) {
                    (Some(res), Some(tg), Some(status)) => {
                        println!("|res(S')|                = {res}");
                        println!("|S ⋊ res(S')|            = {tg}  [{status}]");
                    }
                    _ => println!("|res(S')|                = (not full rank)"),
                }
                println!(
                    "stabilizer of D in GL_n: {} {}",
                    report.stabilizer.kind,
                    report
                        .stabilizer
                        .order
                        .map_or_else(String::new, |o| format!("(order {o})"))
                );
                println!("({})", report.pair_order);
            }
            Ok(0)
        }
        Command::Verify { spec, power_c, form, criterion, json, pairs, seed } => {
            let spec = load_spec(&spec)?;
            let input = match (power_c, form, criterion) {
                (Some(c), None, None) => VerifyInput::PowerC(c),
                (None, Some(path), None) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        input_error(format!("cannot read form file `{path}`: {e}"))
                    })?;
                    VerifyInput::Form(FormLiteral::parse(&text)?)
                }
                (None, None, Some(files)) => VerifyInput::Criterion {
                    a: read_matrix(&files[0])?,
                    t: read_matrix(&files[1])?,
                },
                _ => {
                    return Err(input_error(
                        "pass exactly one of --power-c, --form, --criterion",
                    ))
                }
            };
            let sampling = match pairs {
                Some(pairs) => Sampling::Random { pairs, seed },
                None => Sampling::default_for(&spec),
            };
            let report = cmd_verify(&spec, &input, sampling)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!(
                    "{}: {} ({} pairs, {})",
                    report.kind,
                    if report.verified { "verified" } else { "FAILED" },
                    report.pairs_checked,
                    if report.exhaustive { "exhaustive" } else { "sampled" }
                );
                println!("res_c = {:?}", report.res_c);
                println!("res_z = {:?}", report.res_z);
                if let Some(dc) = &report.d_circle {
                    println!(
                        "D°    = {:?} (circle relations hold: {})",
                        dc,
                        report
                            .circle_relations_hold
                            .map_or_else(|| "-".into(), |b| b.to_string())
                    );
                }
            }
            Ok(if report.verified { 0 } else { 1 })
        }
        Command::Oracle { spec, json, corrupt_form, seed } => {
            let spec = load_spec(&spec)?;
            let report = cmd_oracle(&spec, corrupt_form, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!(
                    "forms scanned: {}, equivariant: {}, distinct subgroups: {}",
                    report.forms_scanned, report.equivariant_forms, report.valid_subgroups
                );
                println!(
                    "correspondence bijection: {}",
                    if report.bijection_confirmed { "confirmed" } else { "FAILED" }
                );
                for f in &report.failures {
                    println!("  failure: {f}");
                }
                for (c, ok) in &report.theta_d_checks {
                    println!("theta_d conjugation (c = {c}): {}", if *ok { "ok" } else { "FAILED" });
                }
                println!(
                    "symmetric-witness conjugations: {}/{} ok",
                    if report.symmetric_conjugations_ok { report.symmetric_conjugation_checks } else { 0 },
                    report.symmetric_conjugation_checks
                );
                if let Some(order) = report.holomorph_order {
                    println!("|Hol(G)| = {order} (materialized)");
                }
                if let Some(detail) = &report.corruption_detail {
                    println!("counterexample: {detail}");
                }
            }
            if corrupt_form {
                // the injected corruption is itself a failed assertion
                Ok(1)
            } else {
                Ok(if report.all_ok() { 0 } else { 1 })
            }
        }
        Command::Selftest { json, seed, pairs, exhaustive_small } => {
            let report = cmd_selftest(seed, pairs, exhaustive_small);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                for s in &report.suites {
                    println!(
                        "{:20} {} ({} ms, {})",
                        s.name,
                        if s.passed { "ok" } else { "FAILED" },
                        s.millis,
                        s.detail
                    );
                }
            }
            Ok(if report.all_passed { 0 } else { 1 })
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code);
        }
    }
}
