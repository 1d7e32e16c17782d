use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use resolvent_cycles::harness::{
    load_config, run_duality, run_solve, run_sweep, run_verify, write_outputs, HarnessError,
    Overrides, RunOutput, SweepGrid,
};
use resolvent_cycles::MapKind;

#[derive(Parser)]
#[command(
    name = "rcycles",
    version,
    about = "Find and verify cycles of resolvent compositions"
)]
struct Cli {
    /// Fixed-point residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true)]
    max_iter: Option<usize>,

    /// Seed of the random-start generator.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for result.json, trace CSVs and meta.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver from seeded random starts.
    Solve { config: PathBuf },
    /// Solve, then check cycle and gap-vector invariants.
    Verify { config: PathBuf },
    /// Primal/dual solutions and singleton relations for two affine operators.
    Duality { config: PathBuf },
    /// Cross solver settings and compare iteration counts and gap vectors.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        starts: Option<usize>,
        /// Comma-separated relaxation parameters.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        /// Comma-separated maps (composed, averaged).
        #[arg(long, value_delimiter = ',')]
        map: Vec<MapKind>,
    },
}

fn run(cli: &Cli) -> Result<RunOutput, HarnessError> {
    let overrides = Overrides {
        tol: cli.tol,
        max_iter: cli.max_iter,
        seed: cli.seed,
    };
    let path = match &cli.command {
        Command::Solve { config }
        | Command::Verify { config }
        | Command::Duality { config }
        | Command::Sweep { config, .. } => config,
    };
    let cfg = load_config(path)?.with_overrides(&overrides)?;
    let out = match &cli.command {
        Command::Solve { .. } => run_solve(&cfg)?,
        Command::Verify { .. } => run_verify(&cfg)?,
        Command::Duality { .. } => run_duality(&cfg)?,
        Command::Sweep {
            starts, alpha, map, ..
        } => run_sweep(
            &cfg,
            &SweepGrid {
                starts: *starts,
                alphas: alpha.clone(),
                maps: map.clone(),
            },
        )?,
    };
    write_outputs(&cli.out, &out)?;
    Ok(out)
}

fn report(out: &RunOutput) {
    let r = &out.result;
    for s in &r.settings {
        println!(
            "{} alpha={} : {}/{} converged, mean iterations {:.1}, max {}",
            s.map,
            s.alpha,
            s.converged,
            s.starts.len(),
            s.mean_iterations,
            s.max_iterations
        );
        for st in s.starts.iter().filter(|st| !st.converged) {
            println!(
                "  start {}: no cycle after {} iterations (residual {:.3e}{})",
                st.index,
                st.iterations,
                st.final_residual,
                if st.stalled { ", stalled" } else { "" }
            );
        }
    }
    if let Some(g) = &r.consensus_gap {
        println!("gap vector: {g}");
    }
    if let Some(d) = r.max_gap_distance {
        println!("max pairwise gap distance: {d:.3e}");
    }
    if let Some(d) = &r.duality {
        if let Some(x) = &d.psol {
            println!("psol: {x}");
        }
        if let Some(y) = &d.dsol {
            println!("dsol: {y}");
        }
    }
    for c in &r.checks {
        println!(
            "[{}] {:<22} {:.3e} (threshold {:.1e}) {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold,
            c.detail
        );
    }
    for e in &r.errors {
        println!("error: {e}");
    }
    if !r.all_converged() {
        eprintln!("no cycle found for some starts: a cycle exists iff every F_i is nonempty, so the F_i may be empty");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            report(&out);
            ExitCode::from(out.result.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
