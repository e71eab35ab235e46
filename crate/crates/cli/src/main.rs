//! Command-line front end: loads a scenario file, applies flag overrides,
//! runs sweeps and serializes results.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fogsplit::config::{load_config, parse_policy, parse_float_grid, parse_usize_grid};
use fogsplit::optimizer::{brute_force_oracle, solve_exact, solve_greedy};
use fogsplit::report::{rows_to_csv, rows_to_gnuplot, RunManifest};
use fogsplit::scenarios::run_sweep;
use fogsplit::topology::{NodeKind, Topology};
use fogsplit::workload::make_demand_set;
use fogsplit::{Error, ParsedConfig, SolverKind};

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "fogsplit", about = "Energy-aware IoT workload placement", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario sweep and write result rows.
    Solve(SolveArgs),
    /// Check a scenario file and print the derived efficiency table.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Override the solver: exact, greedy or oracle.
    #[arg(long)]
    solver: Option<String>,
    /// Override the split-limit grid, e.g. `3` or `1..6` or `1,2,4`.
    #[arg(long)]
    k: Option<String>,
    /// Override the traffic grid in Mbps, e.g. `5` or `1..10`.
    #[arg(long)]
    traffic: Option<String>,
    /// Override the candidate policy: hierarchy, peers, peers-local, cloud-only.
    #[arg(long)]
    candidate_policy: Option<String>,
    /// Override the number of core hops on the cloud path.
    #[arg(long)]
    core_hops: Option<usize>,
    /// Write the CSV here (plus `.manifest` and `.dat` siblings); stdout
    /// when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print each demand's final allocation for the first traffic level at
    /// the largest K.
    #[arg(long)]
    dump_placement: bool,
    /// Validate only; identical to the `validate` subcommand.
    #[arg(long)]
    validate: bool,
    /// Report real wall-clock times in the CSV instead of zeros.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            let code = if e.exit_code() == 0 { 0 } else { EXIT_USAGE };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn load(path: &PathBuf) -> Result<(ParsedConfig, String), (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    let parsed = fogsplit::config::parse_config(&text)
        .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    let _ = load_config::<f64>; // same parser, kept for library callers
    Ok((parsed, text))
}

fn apply_overrides(parsed: &mut ParsedConfig, args: &SolveArgs) -> CmdResult {
    let usage = |e: Error| (EXIT_USAGE, e.to_string());
    let s = &mut parsed.scenario;
    if let Some(solver) = &args.solver {
        s.solver = solver.parse().map_err(usage)?;
    }
    if let Some(k) = &args.k {
        s.k_values = parse_usize_grid(k).map_err(usage)?;
    }
    if let Some(traffic) = &args.traffic {
        s.traffic_mbps = parse_float_grid(traffic).map_err(usage)?;
        s.sources = None; // an explicit grid overrides per-demand lines
    }
    if let Some(policy) = &args.candidate_policy {
        s.policy = parse_policy(policy).map_err(usage)?;
    }
    if let Some(hops) = args.core_hops {
        s.core_hop_count = hops;
    }
    s.validate().map_err(|e| (EXIT_CONFIG, e.to_string()))
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    if args.validate {
        return cmd_validate(ValidateArgs {
            config: args.config,
        });
    }
    let (mut parsed, config_text) = load(&args.config)?;
    apply_overrides(&mut parsed, &args)?;
    let scenario = &parsed.scenario;

    let mut manifest = RunManifest::new(
        &config_text,
        scenario.solver,
        scenario.max_nodes,
        scenario.min_alloc,
    );
    let rows = run_sweep(scenario, &parsed.catalog)
        .map_err(|e| (EXIT_SOLVER, e.to_string()))?;
    manifest.finish();

    let csv = rows_to_csv(&rows, args.timings);
    match &args.out {
        None => print!("{csv}"),
        Some(path) => {
            let write = |p: PathBuf, data: &str| {
                std::fs::write(&p, data).map_err(|e| (EXIT_CONFIG, format!("{}: {e}", p.display())))
            };
            write(path.clone(), &csv)?;
            write(path.with_extension("manifest"), &manifest.to_text())?;
            write(path.with_extension("dat"), &rows_to_gnuplot(&rows))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
    }

    if args.dump_placement {
        dump_placement(&parsed).map_err(|e| (EXIT_SOLVER, e.to_string()))?;
    }
    Ok(())
}

/// Solve one representative cell and print its allocation in full.
fn dump_placement(parsed: &ParsedConfig) -> fogsplit::Result<()> {
    let s = &parsed.scenario;
    let topology = Topology::build(s.site_count, s.iot_per_site, s.core_hop_count)?;
    let mbps = s.traffic_mbps.first().copied().unwrap_or(1.0);
    let set = make_demand_set(&topology, &parsed.catalog, s.active_iot_count, mbps, s.intensity)?;
    let k = s.k_values.iter().copied().max().unwrap_or(1);
    let result = match s.solver {
        SolverKind::Greedy => solve_greedy(
            &topology,
            &parsed.catalog,
            &set.demands,
            k,
            s.policy,
            s.min_alloc,
        )?,
        SolverKind::Oracle => brute_force_oracle(
            &topology,
            &parsed.catalog,
            &set.demands,
            k,
            s.policy,
            s.min_alloc,
        )?,
        SolverKind::Exact => solve_exact(
            &topology,
            &parsed.catalog,
            &set.demands,
            k,
            s.policy,
            &fogsplit::SolverOpts {
                min_alloc: s.min_alloc,
                ..Default::default()
            },
        )?,
    };
    println!("placement for traffic {mbps} Mbps, K = {k}:");
    for (d, shares) in set.demands.iter().zip(&result.placement.shares) {
        let total: f64 = shares.iter().map(|&(_, x)| x).sum();
        println!("  demand {} at {} ({} MIPS):", d.id, d.source, d.cpu);
        for &(host, x) in shares {
            println!("    {host}  {x} MIPS");
        }
        println!("    = {total} MIPS");
    }
    println!("total power: {} W", result.power.total);
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let (parsed, _) = load(&args.config)?;
    let s = &parsed.scenario;
    let topology = Topology::build(s.site_count, s.iot_per_site, s.core_hop_count)
        .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    for &mbps in &s.traffic_mbps {
        make_demand_set(&topology, &parsed.catalog, s.active_iot_count, mbps, s.intensity)
            .map_err(|e| (EXIT_CONFIG, format!("traffic {mbps} Mbps: {e}")))?;
        if !(1.0..=10.0).contains(&mbps) {
            eprintln!("warning: traffic {mbps} Mbps is outside the usual 1-10 Mbps range");
        }
    }
    if let Some(sources) = &s.sources {
        for &(site, dev, mbps) in sources {
            if site >= s.site_count || dev >= s.iot_per_site {
                return Err((
                    EXIT_CONFIG,
                    format!("demand source site {site} device {dev} outside the topology"),
                ));
            }
            let _ = mbps;
        }
    }

    println!("configuration ok: {}", s.name);
    println!(
        "topology: {} sites x {} IoT, {} core hops, {} nodes",
        s.site_count,
        s.iot_per_site,
        s.core_hop_count,
        topology.node_count()
    );
    println!("solver: {} (policy {})", s.solver.label(), s.policy.label());
    println!();
    println!("derived efficiencies:");
    println!("{:<14} {:>18} {:>18}", "device", "net W/Gbps", "cpu W/MIPS");
    for kind in [
        NodeKind::IotDevice,
        NodeKind::AccessFog,
        NodeKind::EdgeFog,
        NodeKind::MetroSwitch,
        NodeKind::MetroRouter,
        NodeKind::CoreNode,
        NodeKind::CloudLanSwitch,
        NodeKind::CloudLanRouter,
        NodeKind::CloudServer,
    ] {
        let fmt = |slope: Option<f64>| match slope {
            Some(v) => format!("{v:.4}"),
            None => "-".to_string(),
        };
        println!(
            "{:<14} {:>18} {:>18}",
            format!("{kind:?}"),
            fmt(parsed
                .catalog
                .network(kind)
                .map(|p| p.proportional_slope())),
            fmt(parsed
                .catalog
                .processing(kind)
                .map(|p| p.proportional_slope())),
        );
    }
    Ok(())
}
