use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use medsched::geometry::{
    generate_circle_layout, generate_random_layout, GraphLayout, MorphProfile,
};
use medsched::harness::{run_experiment, summarize, write_csv, ExperimentConfig, HarnessError};
use medsched::render::frame_svg;
use medsched::scheduler::{Instance, Schedule, SchedulerConfig, SortOrder};
use medsched::validator::validate_cycles;

#[derive(Parser)]
#[command(
    name = "medsched",
    version,
    about = "Morph scheduling for morphing edge drawings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute start times for every edge of a layout.
    Schedule {
        #[arg(long)]
        layout: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        overlap: bool,
        #[arg(long)]
        duplicate: bool,
        #[arg(long, default_value_t = 0)]
        allow: u32,
        #[arg(long, default_value = "desc")]
        order: SortOrder,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replay a schedule and check crossings at every instant.
    Validate {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Allowable crossing number; defaults to the schedule's own.
        #[arg(long)]
        allow: Option<u32>,
        /// Steady-state cycles to check.
        #[arg(long, default_value_t = 1)]
        cycles: usize,
        #[command(flatten)]
        profile: OptProfileArgs,
        /// Write the full report as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the circle-layout sweep and write one CSV row per case.
    Experiment {
        #[arg(long, value_enum, default_value_t = Preset::Paper)]
        preset: Preset,
        #[arg(long)]
        orders: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated node counts replacing the preset's.
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<u32>>,
        #[arg(long)]
        no_validate: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write SVG frames of the stub states at the given times.
    Render {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[command(flatten)]
        profile: OptProfileArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a layout: K_n on a circle, or a random graph.
    Generate {
        #[arg(long)]
        nodes: u32,
        #[arg(long, default_value_t = 200.0)]
        radius: f64,
        /// Random graph in a square of side `2 * radius` instead.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0.4)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
    Ci,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = 100.0)]
    speed: f64,
    #[arg(long, default_value_t = 100)]
    pause: i64,
}

/// Profile flags for commands that can take the profile from the schedule.
#[derive(Args)]
struct OptProfileArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    speed: Option<f64>,
    #[arg(long)]
    pause: Option<i64>,
}

enum Failure {
    Invalid(String),
    BadInput(String),
}

type Outcome = Result<(), Failure>;

fn bad<E: std::fmt::Display>(e: E) -> Failure {
    Failure::BadInput(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| bad(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_layout(path: &Path) -> Result<GraphLayout, Failure> {
    GraphLayout::from_json(&read(path)?).map_err(bad)
}

fn load_schedule(path: &Path) -> Result<Schedule, Failure> {
    Schedule::from_json(&read(path)?).map_err(bad)
}

fn resolve_profile(args: &OptProfileArgs, schedule: &Schedule) -> Result<MorphProfile, Failure> {
    let base = schedule.profile;
    let pick = |v: Option<f64>, from: Option<f64>, name: &str| {
        v.or(from).ok_or_else(|| {
            bad(format!(
                "--{name} missing and the schedule carries no profile"
            ))
        })
    };
    let profile = MorphProfile::new(
        pick(args.delta, base.map(|p| p.delta), "delta")?,
        pick(args.eta, base.map(|p| p.eta), "eta")?,
        pick(args.speed, base.map(|p| p.speed), "speed")?,
        args.pause
            .or(base.map(|p| p.pause))
            .ok_or_else(|| bad("--pause missing and the schedule carries no profile"))?,
    )
    .map_err(bad)?;
    Ok(profile)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Schedule {
            layout,
            profile,
            overlap,
            duplicate,
            allow,
            order,
            output,
        } => {
            let p = MorphProfile::new(profile.delta, profile.eta, profile.speed, profile.pause)
                .map_err(bad)?;
            let inst = Instance::new(load_layout(&layout)?, p).map_err(bad)?;
            let config = SchedulerConfig {
                order,
                overlap,
                duplicate,
                allow,
            };
            let schedule = inst
                .schedule(&config)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            write(output.as_deref(), &(schedule.to_json() + "\n"))
        }
        Command::Validate {
            layout,
            schedule,
            allow,
            cycles,
            profile,
            output,
        } => {
            let schedule = load_schedule(&schedule)?;
            let p = resolve_profile(&profile, &schedule)?;
            let inst = Instance::new(load_layout(&layout)?, p).map_err(bad)?;
            let allow = allow.unwrap_or(schedule.allow);
            let report = validate_cycles(&inst, &schedule, allow, cycles.max(1)).map_err(bad)?;
            if let Some(path) = &output {
                write(Some(path), &report.to_json())?;
            }
            let failing: Vec<String> = report
                .edges
                .iter()
                .filter(|e| !e.ok)
                .map(|e| format!("{} ({} violating intervals)", e.edge, e.violations.len()))
                .chain(report.errors.iter().cloned())
                .collect();
            println!(
                "edges {}  max crossings {}  max fully-avoidable {}  {}",
                report.edges.len(),
                report.max_crossings,
                report.max_fully,
                if report.valid { "valid" } else { "INVALID" }
            );
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Invalid(failing.join("; ")))
            }
        }
        Command::Experiment {
            preset,
            orders,
            seed,
            nodes,
            no_validate,
            output,
        } => {
            let mut config = match preset {
                Preset::Paper => ExperimentConfig::paper(),
                Preset::Ci => ExperimentConfig::ci(),
            };
            if let Some(o) = orders {
                config.orders = o;
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(n) = nodes {
                config.nodes = n;
            }
            config.validate = !no_validate;
            let outcome = match run_experiment(&config) {
                Ok(o) => o,
                Err(HarnessError::Validation {
                    case,
                    layout_json,
                    schedule_json,
                    report,
                }) => {
                    let stem = output.with_extension("failure");
                    fs::create_dir_all(&stem).map_err(bad)?;
                    fs::write(stem.join("layout.json"), layout_json).map_err(bad)?;
                    fs::write(stem.join("schedule.json"), schedule_json).map_err(bad)?;
                    fs::write(stem.join("report.json"), report.to_json()).map_err(bad)?;
                    return Err(Failure::Invalid(format!(
                        "validation failed for {case}; artifacts in {}",
                        stem.display()
                    )));
                }
                Err(HarnessError::Config(m)) => return Err(Failure::BadInput(m)),
                Err(e) => return Err(Failure::Invalid(e.to_string())),
            };
            for s in &outcome.skipped {
                eprintln!("skipped: {s}");
            }
            let file =
                fs::File::create(&output).map_err(|e| bad(format!("{}: {e}", output.display())))?;
            write_csv(std::io::BufWriter::new(file), &outcome.rows).map_err(bad)?;
            eprintln!(
                "{} rows written to {}",
                outcome.rows.len(),
                output.display()
            );
            for s in summarize(&outcome.rows).map_err(bad)? {
                let n_max = s.allowance.keys().max().copied().unwrap_or(0);
                eprintln!(
                    "K{:<2} samples {:>5}  overlap median {:.3}  duplication median {:.3}  allowance median n=0 {:.3} n={} {:.3}",
                    s.nodes,
                    s.samples,
                    s.overlap.1,
                    s.duplication.1,
                    s.allowance[&0].1,
                    n_max,
                    s.allowance[&n_max].1
                );
            }
            Ok(())
        }
        Command::Render {
            layout,
            schedule,
            times,
            profile,
            output,
        } => {
            let schedule = load_schedule(&schedule)?;
            let p = resolve_profile(&profile, &schedule)?;
            let inst = Instance::new(load_layout(&layout)?, p).map_err(bad)?;
            fs::create_dir_all(&output).map_err(|e| bad(format!("{}: {e}", output.display())))?;
            for t in times {
                let path = output.join(format!("frame_{:06}.svg", t.round() as i64));
                fs::write(&path, frame_svg(&inst, &schedule, t))
                    .map_err(|e| bad(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Generate {
            nodes,
            radius,
            random,
            edge_prob,
            seed,
            output,
        } => {
            let layout = if random {
                generate_random_layout(nodes, edge_prob, 2.0 * radius, seed)
            } else {
                generate_circle_layout(nodes, radius)
            }
            .map_err(bad)?;
            write(output.as_deref(), &(layout.to_json() + "\n"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::BadInput(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
