//! Command-line interface: `run`, `sweep`, `oracle`, and `gradcheck`.

use std::ffi::OsString;
use std::path::PathBuf;

use catperc::autoencoder::Autoencoder;
use catperc::classifier::Classifier;
use catperc::nn::{gradient_check, Activation, DenseLayer, LossKind, Mlp};
use catperc::stimuli::StimulusSpec;
use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{KvConfig, RunConfig, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::pipeline::{run_pipeline, CSV_HEADER};
use crate::plot::emit_plots;
use crate::sweep::run_sweep;

#[derive(Parser)]
#[command(
    name = "catperc",
    about = "Two-phase category-learning simulations and their separation/compression measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single pipeline run from a config file.
    Run(RunArgs),
    /// Sweep (N, k, seed) cells and emit CSV tables plus plots.
    Sweep(SweepArgs),
    /// Print the analytic mean squared pair distances of a stimulus family.
    Oracle(OracleArgs),
    /// Compare analytic gradients with finite differences for every network.
    Gradcheck(GradcheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Probe override: pre_activation | post_activation.
    #[arg(long)]
    probe: Option<String>,
    /// Output directory for weights and reports.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Optional config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario: vector | vector_narrowed | grid.
    #[arg(long)]
    scenario: Option<String>,
    /// Stimulus dimensions to sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Covariant counts to sweep, comma separated (default: halving grid).
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Covariant salience a.
    #[arg(long)]
    a: Option<f64>,
    /// Magnitude b of the non-covariant components.
    #[arg(long)]
    b: Option<f64>,
    /// Number of seeds (seed, seed+1, ...).
    #[arg(long)]
    seeds: Option<usize>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Stimuli per category.
    #[arg(long)]
    per_category: Option<usize>,
    /// Probe override: pre_activation | post_activation.
    #[arg(long)]
    probe: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Total feature count N.
    #[arg(long)]
    n: usize,
    /// Covariant feature count k.
    #[arg(long)]
    k: usize,
    /// Covariant salience a.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Non-covariant magnitude b.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Central-difference step size.
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
}

/// Parses and dispatches; returns the process exit status.
pub fn cli_main<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Gradcheck(args) => return cmd_gradcheck(args),
    };
    match result {
        Ok(()) => 0,
        Err(e @ HarnessError::Config(_)) => {
            eprintln!("{e}");
            eprintln!("run `catperc <command> --help` for usage");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn overlay_common(kv: &mut KvConfig, seed: Option<u64>, probe: Option<&str>) -> Result<()> {
    if let Some(seed) = seed {
        kv.set("seed", seed);
    }
    if let Some(probe) = probe {
        // Validate early so a typo is a usage error, not a late failure.
        probe
            .parse::<catperc::Probe>()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        kv.set("probe", probe);
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut kv = KvConfig::defaults().merged(&KvConfig::from_file(&args.config)?);
    overlay_common(&mut kv, args.seed, args.probe.as_deref())?;
    let cfg = RunConfig::from_kv(&kv)?;
    let record = run_pipeline(&cfg, Some(&args.out))?;
    println!("run {} finished in {:.1?}", record.run_id, record.wall_time);
    println!(
        "  accuracy {:.4} ({})",
        record.sup_report.final_accuracy,
        if record.reached_criterion {
            "criterion reached"
        } else {
            "criterion missed"
        }
    );
    let r = record.report();
    println!("  sp_b {:+.6}  sp_w {:+.6}  (probe {})", r.sp_b, r.sp_w, cfg.probe.name());
    println!(
        "  artifacts: {0}/{1}.unsup.weights {0}/{1}.sup.weights {0}/{1}.report.csv",
        args.out.display(),
        record.run_id
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut kv = KvConfig::defaults();
    if let Some(path) = &args.config {
        kv = kv.merged(&KvConfig::from_file(path)?);
    }
    if let Some(scenario) = &args.scenario {
        kv.set("scenario", scenario);
    }
    if !args.n.is_empty() {
        kv.set(
            "n_values",
            args.n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        );
    }
    if !args.k.is_empty() {
        kv.set(
            "k_values",
            args.k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        );
    }
    if let Some(a) = args.a {
        kv.set("a", a);
    }
    if let Some(b) = args.b {
        kv.set("b", b);
    }
    if let Some(count) = args.seeds {
        kv.set("seed_count", count);
    }
    if let Some(per_category) = args.per_category {
        kv.set("per_category", per_category);
    }
    overlay_common(&mut kv, args.seed, args.probe.as_deref())?;

    let sweep = SweepConfig::from_kv(&kv)?;
    let output = run_sweep(&sweep, &args.out)?;
    let plots = emit_plots(&output.summaries, &args.out)?;
    println!(
        "sweep finished: {} runs -> {} and {}",
        output.rows.len(),
        output.csv_path.display(),
        output.summary_path.display()
    );
    for path in plots {
        println!("  plot: {}", path.display());
    }
    println!("columns: {CSV_HEADER}");
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let spec = StimulusSpec::with_magnitude(args.n, args.k, args.a, args.b)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let (within, between) = spec.expected_squared_distances();
    println!("within {within}, between {between}");
    Ok(())
}

/// Runs the gradient-check suite; prints one line per network and exits
/// nonzero when any check reaches 1e-4.
fn cmd_gradcheck(args: GradcheckArgs) -> i32 {
    match gradcheck_suite(args.epsilon) {
        Ok(results) => {
            let mut worst = 0.0f64;
            for (name, err) in &results {
                println!("{name}: max relative error {err:.3e}");
                worst = worst.max(*err);
            }
            println!("worst: {worst:.3e}");
            if worst < 1e-4 {
                0
            } else {
                eprintln!("gradient check failed: {worst:.3e} >= 1e-4");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// The three architectures that matter: a plain linear/quadratic baseline,
/// the tied autoencoder, and the classifier with cross-entropy.
pub fn gradcheck_suite(epsilon: f64) -> Result<Vec<(&'static str, f64)>> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6AD);

    let mut linear = Mlp {
        layers: vec![DenseLayer::<f64>::new_random(3, 5, Activation::Identity, &mut rng)],
        loss: LossKind::SquaredError,
    };
    let input = [0.8, -0.4, 0.2, 1.0, -1.0];
    let target = [0.5, -0.25, 1.5];
    results.push((
        "linear network, quadratic loss",
        gradient_check(&mut linear, &input, &target, epsilon)?,
    ));

    let mut two_layer = Mlp {
        layers: vec![
            DenseLayer::<f64>::new_random(4, 6, Activation::Tanh, &mut rng),
            DenseLayer::<f64>::new_random(2, 4, Activation::Logistic, &mut rng),
        ],
        loss: LossKind::SquaredError,
    };
    let input6 = [1.0, -1.0, 0.5, -0.5, 0.25, -0.25];
    results.push((
        "two-layer network, squared error",
        gradient_check(&mut two_layer, &input6, &[0.2, 0.9], epsilon)?,
    ));

    let mut ae = Autoencoder::<f64>::new_random(12, 6, &mut rng);
    let stimulus: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
    let mut corrupted = stimulus.clone();
    corrupted[1] = -corrupted[1];
    corrupted[7] = -corrupted[7];
    results.push((
        "tied-weight autoencoder",
        gradient_check(&mut ae, &corrupted, &stimulus, epsilon)?,
    ));

    let mut clf = Classifier::from_autoencoder(&ae, 0x7E57);
    let mut worst_clf = 0.0f64;
    for target in [0.0, 1.0] {
        worst_clf = worst_clf.max(gradient_check(&mut clf, &stimulus, &[target], epsilon)?);
    }
    results.push(("classifier, cross-entropy", worst_clf));

    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradcheck_suite_stays_under_the_threshold() {
        let results = gradcheck_suite(1e-5).unwrap();
        assert_eq!(results.len(), 4);
        for (name, err) in results {
            assert!(err < 1e-4, "{name}: {err}");
        }
    }

    #[test]
    fn unknown_subcommands_exit_with_usage_status() {
        assert_eq!(cli_main(["catperc", "frobnicate"]), 2);
        assert_eq!(cli_main(["catperc", "oracle", "--n", "x"]), 2);
    }

    #[test]
    fn missing_config_file_is_a_usage_error() {
        assert_eq!(
            cli_main(["catperc", "run", "--config", "/nonexistent/path.cfg"]),
            2
        );
    }
}
