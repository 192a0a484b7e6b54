use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flagred::adversarial::{worst_case_audit, worst_case_filtration, WorstCaseParams};
use flagred::bench::{self, ExperimentConfig, Metric};
use flagred::exec::Execution;
use flagred::flagfilt::{boundary_matrix, Filtration};
use flagred::homology::{
    betti1_profile, betti_probability_scan, critical_implies_cycle, default_grid, fillup_betti_bound,
};
use flagred::io::{read_filtration, write_file, write_filtration, write_vr_sidecar};
use flagred::randmodels::{sample_order, sample_vr, Model, Seed};
use flagred::z2core::{reduce, reduce_with, ReduceOptions};
use flagred::{Error, Result};

#[derive(Parser)]
#[command(name = "flagred", version, about = "Left-to-right persistence reduction on clique filtrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a filtration file.
    Gen {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: Option<usize>,
        /// Ambient dimension for vr (default 2).
        #[arg(long)]
        dim: Option<usize>,
        /// Group size for the worst-case model (odd, >= 3).
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// vr only: write point coordinates and edge lengths here.
        #[arg(long)]
        points: Option<PathBuf>,
        /// worst only: write the group label of every edge here.
        #[arg(long)]
        groups: Option<PathBuf>,
    },
    /// Reduce a filtration and report fill-up, cost and index classes.
    Reduce {
        file: PathBuf,
        /// Write the statistics record as JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Print the columns added to each column and include per-column
        /// addition counts in the JSON.
        #[arg(long)]
        log_additions: bool,
    },
    /// β₁ profile of a filtration.
    Betti {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Build the worst-case filtration for group size p.
    Worst {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Reduce and print the fat-column audit.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        groups: Option<PathBuf>,
    },
    /// Sweep sizes, aggregate fill-up and cost, fit exponents.
    Experiment {
        #[arg(long)]
        model: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Comma-separated sizes (p values for worst).
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Write PREFIX_fillup.svg and PREFIX_cost.svg.
        #[arg(long)]
        svg: Option<String>,
        #[arg(long)]
        serial: bool,
        /// Write zero in the wall-clock column.
        #[arg(long)]
        no_timing: bool,
    },
    /// Log-log fit of one CSV column against another.
    Fit {
        csv: PathBuf,
        #[arg(long, default_value = "n")]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Empirical probability that β₁(K_i) > 0 over a grid of i.
    Scan {
        #[arg(long)]
        model: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Comma-separated grid; defaults to about 30 geometric points.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
        #[arg(long)]
        serial: bool,
    },
}

fn model_arg(name: &str, dim: Option<usize>) -> Result<Model> {
    let dim = if name == "vr" { dim.or(Some(2)) } else { dim };
    Model::parse(name, dim)
}

fn execution(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    model: &str,
    n: Option<usize>,
    dim: Option<usize>,
    p: Option<usize>,
    seed: Seed,
    out: &Path,
    points: Option<&Path>,
    groups: Option<&Path>,
) -> Result<()> {
    let model = model_arg(model, dim)?;
    if points.is_some() && !matches!(model, Model::Vr { .. }) {
        return Err(Error::Config("--points only applies to vr".into()));
    }
    if groups.is_some() && model != Model::Worst {
        return Err(Error::Config("--groups only applies to worst".into()));
    }
    match model {
        Model::Worst => {
            let p = p.ok_or_else(|| Error::Config("worst needs --p".into()))?;
            return worst(p, seed, out, false, groups);
        }
        _ if p.is_some() => return Err(Error::Config("--p only applies to worst".into())),
        _ => {}
    }
    let n = n.ok_or_else(|| Error::Config(format!("{} needs --n", model.tag())))?;
    let f = match model {
        Model::Vr { dim } => {
            let s = sample_vr(n, dim, seed, "gen", 0)?;
            if let Some(path) = points {
                write_file(path, &write_vr_sidecar(&s))?;
            }
            Filtration::with_default_ties(s.order)
        }
        _ => Filtration::with_default_ties(sample_order(model, n, seed, "gen", 0)?),
    };
    write_file(out, &write_filtration(&f, false))?;
    println!("wrote {} (n={}, {} edges)", out.display(), f.n(), f.edge_order().m());
    Ok(())
}

fn reduce_cmd(file: &Path, stats_out: Option<&Path>, log_additions: bool) -> Result<()> {
    let f = read_filtration(file)?;
    let (_, stats) = reduce_with(&boundary_matrix(&f), ReduceOptions { log_additions })?;
    println!("rows {} columns {}", stats.rows, stats.cols);
    println!("fill_up {}", stats.fill_up);
    println!("cost {}", stats.cost);
    println!("additions {}", stats.additions_total());
    println!("step {} critical {}", stats.step_indices.len(), stats.critical_indices.len());
    println!("critical_indices {:?}", stats.critical_indices);
    if let Some(log) = &stats.addition_log {
        for (j, added) in log.iter().enumerate().filter(|(_, a)| !a.is_empty()) {
            println!("column {j}: {added:?}");
        }
    }
    if let Some(path) = stats_out {
        write_file(path, &(stats.to_json(log_additions) + "\n"))?;
    }
    Ok(())
}

fn betti(file: &Path, out: Option<&Path>) -> Result<()> {
    let f = read_filtration(file)?;
    let (reduced, stats) = reduce(&boundary_matrix(&f))?;
    let profile = betti1_profile(&f, &reduced)?;
    let max = profile.values.iter().copied().max().unwrap_or(0);
    let support = profile.values.iter().filter(|&&b| b > 0).count();
    println!("max_betti1 {max}");
    println!("positive_steps {support}");
    println!("weighted_support {}", profile.weighted_support());
    println!(
        "fill_up {} <= {} : {}",
        stats.fill_up,
        fillup_betti_bound(&profile),
        stats.fill_up <= fillup_betti_bound(&profile)
    );
    println!("critical_indices_in_cycles {}", critical_implies_cycle(&profile, &stats));
    if let Some(path) = out {
        let mut csv = String::from("i,betti1\n");
        for (i, b) in profile.values.iter().enumerate() {
            csv.push_str(&format!("{i},{b}\n"));
        }
        write_file(path, &csv)?;
    }
    Ok(())
}

fn worst(p: usize, seed: Seed, out: &Path, audit: bool, groups: Option<&Path>) -> Result<()> {
    let w = worst_case_filtration(WorstCaseParams::new(p)?, seed)?;
    write_file(out, &write_filtration(&w.filtration, true))?;
    if let Some(path) = groups {
        write_file(path, &w.groups_sidecar())?;
    }
    println!("wrote {} (p={p}, n={})", out.display(), w.params.n());
    if audit {
        let (reduced, stats) = reduce(&boundary_matrix(&w.filtration))?;
        println!("{}", worst_case_audit(&w, &reduced, &stats));
    }
    Ok(())
}

fn experiment(cfg: ExperimentConfig, out: &Path, svg: Option<&str>) -> Result<()> {
    let table = bench::run_experiment(&cfg)?;
    bench::emit_csv(&table, out)?;
    for metric in [Metric::FillUp, Metric::Cost] {
        match bench::fit_table(&table, metric) {
            Ok(fit) => {
                println!(
                    "{} {}: exponent {:.6} lambda {:.6e} residual {:.6e}",
                    cfg.model.tag(),
                    metric.column(),
                    fit.exponent,
                    fit.lambda,
                    fit.residual
                );
                if let Some(prefix) = svg {
                    let name = match metric {
                        Metric::FillUp => "fillup",
                        Metric::Cost => "cost",
                    };
                    bench::emit_svg(&table, &fit, metric, Path::new(&format!("{prefix}_{name}.svg")))?;
                }
            }
            Err(e) => println!("{} {}: no fit ({e})", cfg.model.tag(), metric.column()),
        }
    }
    Ok(())
}

fn fit(csv: &Path, x: &str, y: &str) -> Result<()> {
    let text = std::fs::read_to_string(csv).map_err(|e| Error::io(csv, e))?;
    let pts = bench::read_csv_columns(&text, x, y)?;
    let fit = bench::loglog_fit(&pts)?;
    println!("exponent {:.6}", fit.exponent);
    println!("lambda {:.6e}", fit.lambda);
    println!("residual {:.6e}", fit.residual);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn scan(
    model: &str,
    dim: Option<usize>,
    n: usize,
    trials: usize,
    seed: Seed,
    out: &Path,
    grid: Option<Vec<usize>>,
    serial: bool,
) -> Result<()> {
    let model = model_arg(model, dim)?;
    let grid = grid.unwrap_or_else(|| default_grid(n * n.saturating_sub(1) / 2));
    let res = betti_probability_scan(model, n, trials, &grid, seed, execution(serial))?;
    write_file(out, &res.to_csv())?;
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.4}"));
    println!("{} n={} trials={}", res.model, res.n, res.trials);
    println!(
        "threshold T (p_hat < {}) {}",
        res.level,
        res.threshold_t.map_or("none".to_string(), |t| t.to_string())
    );
    println!("A {}", opt(res.a_param));
    println!("T/(n ln n) {}", opt(res.c_nlogn));
    println!("p_hat at i={} {}", grid[grid.len() - 1], res.p_hat[res.p_hat.len() - 1]);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { model, n, dim, p, seed, out, points, groups } => {
            gen(&model, n, dim, p, Seed::new(seed), &out, points.as_deref(), groups.as_deref())
        }
        Command::Reduce { file, stats, log_additions } => reduce_cmd(&file, stats.as_deref(), log_additions),
        Command::Betti { file, out } => betti(&file, out.as_deref()),
        Command::Worst { p, seed, out, audit, groups } => worst(p, Seed::new(seed), &out, audit, groups.as_deref()),
        Command::Experiment { model, dim, ns, trials, seed, out, svg, serial, no_timing } => {
            let cfg = ExperimentConfig {
                model: model_arg(&model, dim)?,
                sizes: ns,
                trials,
                seed: Seed::new(seed),
                exec: execution(serial),
                timing: !no_timing,
            };
            experiment(cfg, &out, svg.as_deref())
        }
        Command::Fit { csv, x, y } => fit(&csv, &x, &y),
        Command::Scan { model, dim, n, trials, seed, out, grid, serial } => {
            scan(&model, dim, n, trials, Seed::new(seed), &out, grid, serial)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
