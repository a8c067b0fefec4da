use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spherepack::packing_io::{load_packing, save_packing, Packing};
use spherepack::run::{report_path, solve_best_of, threads_from_env, RunConfig};
use spherepack::{
    compare_to_record, load_records, verify_exact, ContainerKind, RecordTable, Result,
};

#[derive(Parser)]
#[command(name = "spherepack", version, about = "Pack equal spheres into a sphere or a cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Sphere,
    Cube,
}

impl From<Kind> for ContainerKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Sphere => ContainerKind::Sphere,
            Kind::Cube => ContainerKind::Cube,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum PlotFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a dense packing and print `n kind ratio r0_min delta`.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Container radius for the search (default: record radius + 0.01%).
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 6)]
        scan_limit: usize,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        /// Write the packing here and the run report next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record table to compare against (default: bundled).
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Certify a packing file; exit 0 when valid, 1 when not, 2 on a bad file.
    Verify { path: PathBuf },
    /// Solve a range of instances and compare with the record table.
    Bench {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        scan_limit: usize,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        /// CSV copy of the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export centers and container for external plotting.
    Plotdata {
        packing: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: PlotFormat,
    },
}

fn records(path: Option<&Path>) -> Result<RecordTable> {
    match path {
        Some(p) => load_records(p),
        None => Ok(RecordTable::bundled()),
    }
}

fn fmt_delta(delta: Option<f64>) -> String {
    delta.map_or_else(|| "n/a".to_string(), |d| format!("{d:+.8}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    n: usize,
    kind: ContainerKind,
    r0: Option<f64>,
    seed: u64,
    runs: usize,
    scan_limit: usize,
    eps: f64,
    out: Option<&Path>,
    records_path: Option<&Path>,
) -> Result<()> {
    let table = records(records_path)?;
    let cfg = RunConfig {
        r0_estimate: r0,
        seed,
        scan_limit,
        eps,
        threads: threads_from_env(),
        ..RunConfig::new(n, kind)
    };
    let clock = Instant::now();
    let result = solve_best_of(&cfg, runs, &table)?;
    for (s, r) in &result.runs {
        match r {
            Ok(ratio) => eprintln!("# run seed={s} ratio={ratio:.8}"),
            Err(e) => eprintln!("# run seed={s} failed: {e}"),
        }
    }
    let best = &result.best;
    let delta = compare_to_record(&table, n, kind, best.outcome.ratio).ok();
    println!(
        "{n} {kind} {:.8} {:.12} {}",
        best.outcome.ratio,
        best.outcome.r0_min,
        fmt_delta(delta)
    );
    eprintln!("# wall_clock_secs={:.3}", clock.elapsed().as_secs_f64());
    if let Some(path) = out {
        save_packing(&best.outcome, path)?;
        best.report.save(report_path(path))?;
    }
    Ok(())
}

fn cmd_verify(path: &Path) -> ExitCode {
    let packing = match load_packing(path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cert = verify_exact(&packing.configuration, packing.r0, packing.kind);
    println!("n={}", packing.configuration.len());
    println!("kind={}", packing.kind);
    println!("r0={}", packing.r0);
    println!("valid={}", cert.valid);
    println!("wall_margin={:e}", cert.worst_wall_margin);
    println!("pair_margin={:e}", cert.worst_pair_margin);
    println!("robust={}", cert.robustly_valid());
    for v in &cert.violations {
        let spheres: Vec<String> = v.indices.iter().map(|i| (i + 1).to_string()).collect();
        println!(
            "violation {:?} spheres={} magnitude={:e}",
            v.kind,
            spheres.join(","),
            v.magnitude
        );
    }
    if cert.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    kind: ContainerKind,
    n_min: usize,
    n_max: usize,
    runs: usize,
    seed: u64,
    scan_limit: usize,
    eps: f64,
    out: Option<&Path>,
) -> Result<()> {
    let table = RecordTable::bundled();
    let threads = threads_from_env();
    let mut csv = String::from("n,kind,best_ratio,record,delta,mean_secs,status\n");
    println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "n", "best_ratio", "record", "delta", "mean_s");
    for n in n_min..=n_max {
        let record = table.get(n, kind).ok();
        let cfg = RunConfig {
            seed,
            scan_limit,
            eps,
            threads,
            ..RunConfig::new(n, kind)
        };
        let clock = Instant::now();
        let outcome = solve_best_of(&cfg, runs, &table);
        let mean = clock.elapsed().as_secs_f64() / runs.max(1) as f64;
        let record_s = record.map_or("n/a".into(), |r| format!("{r:.8}"));
        match outcome {
            Ok(best) => {
                let ratio = best.best.outcome.ratio;
                let delta = record.map(|r| ratio - r);
                println!(
                    "{n:>4} {ratio:>12.8} {record_s:>12} {:>12} {mean:>10.3}",
                    fmt_delta(delta)
                );
                let _ = writeln!(
                    csv,
                    "{n},{kind},{ratio:.8},{record_s},{},{mean:.3},ok",
                    fmt_delta(delta)
                );
            }
            Err(e) => {
                println!("{n:>4} {:>12} {record_s:>12} {:>12} {mean:>10.3} FAILED: {e}", "-", "-");
                let _ = writeln!(csv, "{n},{kind},,{record_s},,{mean:.3},failed");
            }
        }
    }
    if let Some(path) = out {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn plot_text(p: &Packing, format: PlotFormat) -> String {
    let r = p.configuration.radius();
    match format {
        PlotFormat::Csv => {
            let mut s = String::from("i,x,y,z,r,kind,r0\n");
            for (i, c) in p.configuration.centers().iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
                    i + 1,
                    c.x,
                    c.y,
                    c.z,
                    r,
                    p.kind,
                    p.r0
                );
            }
            s
        }
        PlotFormat::Json => {
            let centers: Vec<[f64; 3]> = p
                .configuration
                .centers()
                .iter()
                .map(|c| c.to_array())
                .collect();
            let v = json!({ "kind": p.kind, "r0": p.r0, "r": r, "centers": centers });
            serde_json::to_string_pretty(&v).expect("plain data serializes") + "\n"
        }
    }
}

fn cmd_plotdata(packing: &Path, out: &Path, format: PlotFormat) -> ExitCode {
    let p = match load_packing(packing) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::write(out, plot_text(&p, format)) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            n,
            kind,
            r0,
            seed,
            runs,
            scan_limit,
            eps,
            out,
            records,
        } => cmd_solve(
            n,
            kind.into(),
            r0,
            seed,
            runs,
            scan_limit,
            eps,
            out.as_deref(),
            records.as_deref(),
        ),
        Command::Verify { path } => return cmd_verify(&path),
        Command::Bench {
            kind,
            n_min,
            n_max,
            runs,
            seed,
            scan_limit,
            eps,
            out,
        } => {
            if n_min > n_max || n_min == 0 {
                eprintln!("error: need 1 <= --n-min <= --n-max");
                return ExitCode::from(2);
            }
            cmd_bench(kind.into(), n_min, n_max, runs, seed, scan_limit, eps, out.as_deref())
        }
        Command::Plotdata {
            packing,
            out,
            format,
        } => return cmd_plotdata(&packing, &out, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
