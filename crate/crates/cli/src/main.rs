//! `sft`: exact computations with the graded Weyl algebra of curve counts,
//! the coherent-orientation sign calculus, the finite-dimensional
//! determinant-line calculus, and the Conley-Zehnder index numerics.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use sft_core::czindex::{conley_zehnder, is_admissible, spectral_gap, CzConfig, LoopSpec, SymmetricLoop};
use sft_core::dataset::{parse_gradings, Dataset};
use sft_core::detline::{
    iso_ratio, round_trip_scalar, stabilization_ratio, stabilize, stabilize_with, subspace_iso,
    subspace_iso_with, swap_disjoint_check,
};
use sft_core::linalg::{cokernel_basis, Mat};
use sft_core::sign::{Sign, Z2};
use sft_core::signs::Convention;
use sft_core::tuples::{fredholm_index, virtual_dimension, CRTupleShape};
use sft_core::weyl::Prefactor;
use sft_core::Rat;

#[derive(Parser)]
#[command(name = "sft", version, about = "Exact sign calculus and index toolbox for curve counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Orientation bookkeeping convention.
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Ht)]
    convention: ConventionArg,
    /// Inverse-multiplicity weighting of the generating function.
    #[arg(long = "h-prefactor", global = true, value_enum, default_value_t = PrefactorArg::None)]
    h_prefactor: PrefactorArg,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    out: OutputFormat,
    /// Override the orbit gradings (comma list, declaration order).
    #[arg(long, global = true)]
    gradings: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Ht,
    Bm,
}

impl From<ConventionArg> for Convention {
    fn from(a: ConventionArg) -> Convention {
        match a {
            ConventionArg::Ht => Convention::Ht,
            ConventionArg::Bm => Convention::Bm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefactorArg {
    None,
    InvMneg,
}

impl From<PrefactorArg> for Prefactor {
    fn from(a: PrefactorArg) -> Prefactor {
        match a {
            PrefactorArg::None => Prefactor::None,
            PrefactorArg::InvMneg => Prefactor::InvMNeg,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the generating function of the dataset's signed counts.
    Hamiltonian(DatasetArgs),
    /// Print the square of the generating function.
    HSquare(DatasetArgs),
    /// Verify the boundary identity: every glued-profile coefficient of the
    /// squared generating function equals minus the geometric boundary count.
    ClaimCheck(DatasetArgs),
    /// Print the genus-zero differential on the q-generators.
    ChomD(ChomArgs),
    /// Verify that the genus-zero differential squares to zero.
    ChomD2(DatasetArgs),
    /// Evaluate the index and virtual-dimension formulas on shape data.
    Index(IndexArgs),
    /// Admissibility, crossing index, and spectral gap of a loop file.
    Cz(CzArgs),
    /// Randomized property sweep of the determinant-line calculus.
    DetlineSelftest(SelftestArgs),
    /// Apply a sign change of capping data to the generating function.
    CappingChange(CappingArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Dataset JSON file.
    dataset: PathBuf,
}

#[derive(Args)]
struct ChomArgs {
    dataset: PathBuf,
    /// Restrict to one generator id (default: all).
    #[arg(long)]
    orbit: Option<String>,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, default_value_t = 0)]
    c1: i64,
    /// Integer indices of the positive ends, comma list.
    #[arg(long, default_value = "")]
    mu_pos: String,
    /// Integer indices of the negative ends, comma list.
    #[arg(long, default_value = "")]
    mu_neg: String,
}

#[derive(Args)]
struct CzArgs {
    /// Loop JSON file.
    #[arg(long = "loop")]
    loop_file: PathBuf,
    /// Output samples per period.
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// Fourier truncation for the spectral gap.
    #[arg(long, default_value_t = 128)]
    modes: usize,
}

#[derive(Args)]
struct SelftestArgs {
    /// Number of random instances per property.
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Args)]
struct CappingArgs {
    dataset: PathBuf,
    /// Comma list of id=+1|-1 assignments; unlisted orbits default to +1.
    #[arg(long)]
    eps: String,
}

enum Failure {
    /// A verification ran and failed.
    Verification(String),
    /// The input was unusable.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Input(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load_dataset(cli: &Cli, path: &PathBuf) -> Result<Dataset, Failure> {
    let gradings = match &cli.gradings {
        None => None,
        Some(text) => Some(parse_gradings(text).map_err(Failure::Input)?),
    };
    Dataset::load_with_gradings(path, gradings.as_deref()).map_err(input_err)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Hamiltonian(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let h = alg
                .hamiltonian::<Rat>(&ds.curves, cli.h_prefactor.into())
                .map_err(input_err)?;
            match cli.out {
                OutputFormat::Text => println!("H = {}", alg.render(&h)),
                OutputFormat::Json => println!("{}", alg.to_json(&h)),
            }
            Ok(())
        }
        Command::HSquare(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let h2 = alg
                .h_square::<Rat>(&ds.curves, cli.h_prefactor.into())
                .map_err(input_err)?;
            match cli.out {
                OutputFormat::Text => println!("H*H = {}", alg.render(&h2)),
                OutputFormat::Json => println!("{}", alg.to_json(&h2)),
            }
            Ok(())
        }
        Command::ClaimCheck(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let report = sft_core::boundary::claim_check::<Rat>(&ds, cli.convention.into(), false)
                .map_err(input_err)?;
            match cli.out {
                OutputFormat::Json => println!("{}", report.to_json(&alg)),
                OutputFormat::Text => {
                    for e in &report.entries {
                        println!(
                            "profile g={} pos=[{}] neg=[{}] A={:?}: algebraic {} geometric {} {}",
                            e.profile.genus,
                            e.profile.pos.iter().map(|&r| alg.ids[r].as_str()).collect::<Vec<_>>().join(","),
                            e.profile.neg.iter().map(|&r| alg.ids[r].as_str()).collect::<Vec<_>>().join(","),
                            e.profile.homology,
                            e.algebraic,
                            e.geometric,
                            if e.ok { "ok" } else { "MISMATCH" },
                        );
                        if !e.ok {
                            for t in &e.triples {
                                println!(
                                    "  triple upper={} lower={} pairs={:?} value={}",
                                    t.upper, t.lower, t.pairs, t.value
                                );
                            }
                        }
                    }
                    println!("claim-check: {}", if report.ok { "pass" } else { "FAIL" });
                }
            }
            if report.ok {
                Ok(())
            } else {
                Err(Failure::Verification("claim-check found mismatched profiles".into()))
            }
        }
        Command::ChomD(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let reversed = matches!(cli.convention, ConventionArg::Bm);
            let orbits: Vec<usize> = match &args.orbit {
                Some(id) => vec![alg
                    .ids
                    .iter()
                    .position(|x| x == id)
                    .ok_or_else(|| Failure::Input(format!("unknown orbit id '{id}'")))?],
                None => (0..alg.orbit_count()).collect(),
            };
            let mut rows = Vec::new();
            for r in orbits {
                let d = alg.contact_d::<Rat>(&ds.curves, r, reversed);
                match cli.out {
                    OutputFormat::Text => println!("d {} = {}", alg.ids[r], alg.render(&d)),
                    OutputFormat::Json => rows.push(json!({
                        "orbit": alg.ids[r],
                        "d": alg.to_json(&d),
                    })),
                }
            }
            if cli.out == OutputFormat::Json {
                println!("{}", serde_json::Value::Array(rows));
            }
            Ok(())
        }
        Command::ChomD2(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let reversed = matches!(cli.convention, ConventionArg::Bm);
            let mut rows = Vec::new();
            let mut all_zero = true;
            for r in 0..alg.orbit_count() {
                let d = alg.contact_d::<Rat>(&ds.curves, r, reversed);
                let dd = alg.contact_d_apply(&ds.curves, &d, reversed).map_err(input_err)?;
                all_zero &= dd.is_zero();
                match cli.out {
                    OutputFormat::Text => {
                        println!("d(d {}) = {}", alg.ids[r], alg.render(&dd));
                    }
                    OutputFormat::Json => rows.push(json!({
                        "orbit": alg.ids[r],
                        "dd": alg.to_json(&dd),
                        "zero": dd.is_zero(),
                    })),
                }
            }
            if cli.out == OutputFormat::Json {
                println!("{}", serde_json::Value::Array(rows));
            }
            if all_zero {
                Ok(())
            } else {
                Err(Failure::Verification("the differential does not square to zero".into()))
            }
        }
        Command::Index(args) => {
            let parse_list = |text: &str| -> Result<Vec<i64>, Failure> {
                if text.trim().is_empty() {
                    return Ok(Vec::new());
                }
                text.split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<i64>()
                            .map_err(|_| Failure::Input(format!("invalid index entry '{p}'")))
                    })
                    .collect()
            };
            let mu_pos = parse_list(&args.mu_pos)?;
            let mu_neg = parse_list(&args.mu_neg)?;
            let grade = |mu: i64| Z2::new(mu + i64::from(args.n) - 1);
            let shape = CRTupleShape::new(
                mu_pos.iter().map(|&m| grade(m)).collect(),
                mu_neg.iter().map(|&m| grade(m)).collect(),
                args.genus,
                args.c1,
                args.n,
            );
            let ind = fredholm_index(&shape, &mu_pos, &mu_neg).map_err(input_err)?;
            let virdim = virtual_dimension(&shape, &mu_pos, &mu_neg).map_err(input_err)?;
            match cli.out {
                OutputFormat::Text => {
                    println!("fredholm index = {ind}");
                    println!("virtual dimension = {virdim}");
                    println!(
                        "ind+ = {}, ind- = {}, total grading = {}",
                        shape.ind_pos(),
                        shape.ind_neg(),
                        shape.ind_total()
                    );
                }
                OutputFormat::Json => println!(
                    "{}",
                    json!({
                        "fredholm": ind,
                        "virdim": virdim,
                        "ind_pos": shape.ind_pos().0,
                        "ind_neg": shape.ind_neg().0,
                        "ind_total": shape.ind_total().0,
                    })
                ),
            }
            Ok(())
        }
        Command::Cz(args) => {
            let text = std::fs::read_to_string(&args.loop_file).map_err(input_err)?;
            let spec: LoopSpec = serde_json::from_str(&text).map_err(input_err)?;
            let lp = SymmetricLoop::<f64>::from_spec(&spec).map_err(input_err)?;
            let cfg = CzConfig { steps: args.steps, modes: args.modes, ..CzConfig::default() };
            let admissible = is_admissible(&lp, &cfg).map_err(input_err)?;
            let (mu, lambda) = if admissible {
                (
                    Some(conley_zehnder(&lp, &cfg).map_err(input_err)?),
                    Some(spectral_gap(&lp, &cfg).map_err(input_err)?),
                )
            } else {
                (None, None)
            };
            match cli.out {
                OutputFormat::Json => println!(
                    "{}",
                    json!({ "admissible": admissible, "mu_cz": mu, "lambda": lambda })
                ),
                OutputFormat::Text => {
                    println!("admissible: {admissible}");
                    match (mu, lambda) {
                        (Some(mu), Some(lambda)) => {
                            println!("mu_cz: {mu}");
                            println!("lambda: {lambda:.9}");
                        }
                        _ => println!("index and gap undefined for a non-admissible loop"),
                    }
                }
            }
            Ok(())
        }
        Command::DetlineSelftest(args) => detline_selftest(cli, args),
        Command::CappingChange(args) => {
            let ds = load_dataset(cli, &args.dataset)?;
            let alg = ds.algebra();
            let mut eps = vec![Sign::Plus; alg.orbit_count()];
            for part in args.eps.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (id, value) = part
                    .split_once('=')
                    .ok_or_else(|| Failure::Input(format!("bad eps entry '{part}'")))?;
                let rank = alg
                    .ids
                    .iter()
                    .position(|x| x == id.trim())
                    .ok_or_else(|| Failure::Input(format!("unknown orbit id '{id}'")))?;
                eps[rank] = match value.trim() {
                    "1" | "+1" => Sign::Plus,
                    "-1" => Sign::Minus,
                    other => return Err(Failure::Input(format!("bad sign '{other}'"))),
                };
            }
            let h = alg
                .hamiltonian::<Rat>(&ds.curves, cli.h_prefactor.into())
                .map_err(input_err)?;
            let transformed = alg.capping_change(&eps, &h);
            match cli.out {
                OutputFormat::Text => println!("eps(H) = {}", alg.render(&transformed)),
                OutputFormat::Json => println!("{}", alg.to_json(&transformed)),
            }
            Ok(())
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<Rat> {
    Mat::from_rows(
        (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| <Rat as num_traits::FromPrimitive>::from_i64(rng.gen_range(-3..=3)).unwrap())
                    .collect()
            })
            .collect(),
    )
    .expect("rectangular")
}

/// Randomized sweep over the determinant-line identities: the swap law of
/// disjoint unions, choice- and subspace-independence of the restriction
/// identification, and choice-independence of the stabilization.
fn detline_selftest(cli: &Cli, args: &SelftestArgs) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut swap_ok = 0usize;
    let mut subspace_ok = 0usize;
    let mut stab_ok = 0usize;
    let mut failures: Vec<String> = Vec::new();

    for trial in 0..args.trials {
        // Swap law.
        let (r1, c1) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
        let l = random_matrix(&mut rng, r1, c1);
        let (r2, c2) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
        let l2 = random_matrix(&mut rng, r2, c2);
        match swap_disjoint_check(&l, &l2) {
            Ok(true) => swap_ok += 1,
            Ok(false) => failures.push(format!("trial {trial}: swap law failed")),
            Err(e) => failures.push(format!("trial {trial}: swap check error: {e}")),
        }

        // Subspace identification.
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let m = random_matrix(&mut rng, r, c);
        let coker = cokernel_basis(&m);
        let mut subspace = None;
        for _ in 0..40 {
            let count = coker.len() + rng.gen_range(0..=1);
            if count > r {
                continue;
            }
            let f: Vec<Vec<Rat>> = (0..count)
                .map(|_| {
                    (0..r)
                        .map(|_| {
                            <Rat as num_traits::FromPrimitive>::from_i64(rng.gen_range(-2..=2))
                                .unwrap()
                        })
                        .collect()
                })
                .collect();
            if subspace_iso(&m, &f).is_ok() {
                subspace = Some(f);
                break;
            }
        }
        if let Some(f) = subspace {
            let det = subspace_iso(&m, &f).expect("validated");
            let rand_choice = subspace_iso_with(&m, &f, &mut rng).expect("validated");
            let choice = iso_ratio(&m, &f, &rand_choice, &det);
            let trip = round_trip_scalar(&m, &f);
            match (choice, trip) {
                (Ok(c), Ok(t)) if c.is_positive() && t.is_positive() => subspace_ok += 1,
                other => failures.push(format!("trial {trial}: subspace identification: {other:?}")),
            }
        }

        // Stabilization.
        let rows = rng.gen_range(1..=4);
        let cols_phi = rng.gen_range(1..=5);
        let phi = random_matrix(&mut rng, rows, cols_phi);
        let cols_psi = rng.gen_range(1..=4);
        let psi = random_matrix(&mut rng, rows, cols_psi);
        if phi.hcat(&psi).rank() == rows {
            let a = stabilize(&phi, &psi).expect("surjective");
            let b = stabilize_with(&phi, &psi, &mut rng).expect("surjective");
            match stabilization_ratio(&phi, &psi, &b, &a) {
                Ok(r) if r.is_positive() => stab_ok += 1,
                other => failures.push(format!("trial {trial}: stabilization: {other:?}")),
            }
        }
    }

    let ok = failures.is_empty();
    match cli.out {
        OutputFormat::Json => println!(
            "{}",
            json!({
                "trials": args.trials,
                "swap_ok": swap_ok,
                "subspace_ok": subspace_ok,
                "stabilization_ok": stab_ok,
                "failures": failures,
                "ok": ok,
            })
        ),
        OutputFormat::Text => {
            println!("swap law:          {swap_ok} checks passed");
            println!("subspace iso:      {subspace_ok} checks passed");
            println!("stabilization iso: {stab_ok} checks passed");
            for f in &failures {
                println!("FAIL {f}");
            }
            println!("detline-selftest: {}", if ok { "pass" } else { "FAIL" });
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification("determinant-line self-test failed".into()))
    }
}
