//! Argument parsing and command dispatch; [`run`] returns the exit code.

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normsurf_core::separable::{preset, PRESET_NAMES};
use normsurf_core::Signs;

use crate::check::check;
use crate::coeffs;
use crate::gen::{self, GenError, GenOutput, GridOptions, HomotheticalParams, SeparableParams, Window};
use crate::verify::{render, run_suite, Tier, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "normsurf", version, about = "Minimal surfaces in R^3 with the 2m-norm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a surface mesh and curvature report.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Evaluate the constraints and positivity domain of a coefficient file.
    Check {
        file: PathBuf,
        /// Sampling window `u0,u1,v0,v1`; one period for trig sets, else [-3, 3]^2.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(value_enum)]
        tier: TierArg,
        #[arg(long, default_value_t = 0x5eed_2024)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TierArg {
    Fast,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Graph of g(u) + h(v).
    Translation {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Graph of (a u + b) Psi^{-1}(v).
    Homothetical {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        c2: f64,
        /// Put the Psi factor on u and the linear factor on v.
        #[arg(long)]
        swapped: bool,
        /// Vertices with |g| or |h| at most this are not evaluated.
        #[arg(long, default_value_t = gen::FACTOR_CLIP)]
        factor_clip: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Implicit surface f(x1) + g(x2) + h(x3) = 0.
    Separable {
        #[arg(long, value_parser = PRESET_NAMES, conflicts_with = "coeffs", required_unless_present = "coeffs")]
        preset: Option<String>,
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Base point `u0,v0`; by default each domain component uses the
        /// grid point nearest its centroid.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        anchor: Option<(f64, f64)>,
        #[arg(long, default_value = "+++", allow_hyphen_values = true)]
        signs: Signs,
        /// Clip vertices where a factor is below this fraction of its maximum.
        #[arg(long, default_value_t = gen::BOUNDARY_CLIP)]
        boundary_clip: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 40)]
    grid: usize,
    /// Fraction of the natural range, or `u0,u1,v0,v1`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Mesh output; `.csv` writes the vertex table, anything else OBJ. Repeatable.
    #[arg(long)]
    out_mesh: Vec<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-7)]
    h_threshold: f64,
    /// Also evaluate H with the finite-difference oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = normsurf_core::curvature::DEFAULT_ORACLE_STEP)]
    step: f64,
    /// Write `wall_ms` as null.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn grid_options(&self) -> GridOptions {
        GridOptions { m: self.m, grid: self.grid, window: self.window, oracle: self.oracle, step: self.step }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>() {
        Ok(v) if v.len() == 2 => Ok((v[0], v[1])),
        _ => Err(format!("expected u0,v0, got {s:?}")),
    }
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Gen { family } => run_gen(family),
        Command::Check { file, window, grid } => run_check(&file, window, grid),
        Command::Verify { tier, seed, inject_fault } => {
            let tier = match tier {
                TierArg::Fast => Tier::Fast,
                TierArg::Full => Tier::Full,
            };
            let results = run_suite(&VerifyOptions { tier, inject_fault, seed });
            print!("{}", render(&results));
            u8::from(results.iter().any(|r| !r.passed))
        }
    }
}

fn run_gen(family: Family) -> u8 {
    let start = Instant::now();
    let (common, outcome) = match family {
        Family::Translation { a, common } => {
            let out = gen::translation(a, &common.grid_options());
            (common, out)
        }
        Family::Homothetical { a, b, c2, swapped, factor_clip, common } => {
            let hp = HomotheticalParams { a, b, c2, swapped, factor_clip };
            let out = gen::homothetical(&hp, &common.grid_options());
            (common, out)
        }
        Family::Separable { preset: name, coeffs: path, anchor, signs, boundary_clip, common } => {
            let coeffs = match (&name, &path) {
                (Some(n), _) => Ok(preset(n).expect("clap restricts preset names").coeffs),
                (None, Some(p)) => coeffs::load(p).map_err(GenError::Invalid),
                (None, None) => Err(GenError::Invalid("either --preset or --coeffs is required".into())),
            };
            let out = coeffs.and_then(|coeffs| {
                let sp = SeparableParams { coeffs, preset: name, anchor, signs, boundary_clip };
                gen::separable(&sp, &common.grid_options())
            });
            (common, out)
        }
    };
    let mut out = match outcome {
        Ok(out) => out,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    if !common.no_timing {
        out.report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if let Err(e) = write_outputs(&out, &common) {
        eprintln!("{e}");
        return e.exit_code();
    }
    let r = &out.report;
    let fmt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3e}"));
    println!(
        "{} m={}: {} vertices, {} faces, {} skipped; max |H| analytic {}, numeric {}",
        r.family,
        r.m,
        out.mesh.vertices.len(),
        out.mesh.faces.len(),
        r.skipped_vertices,
        fmt(r.max_abs_h_analytic),
        fmt(r.max_abs_h_numeric)
    );
    match r.max_abs_h_analytic {
        Some(h) if h < common.h_threshold => 0,
        _ => {
            eprintln!("max analytic |H| is not below the threshold {:e}", common.h_threshold);
            1
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, GenError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: io::Error) -> GenError {
    GenError::Io(format!("{}: {e}", path.display()))
}

fn write_outputs(out: &GenOutput, common: &Common) -> Result<(), GenError> {
    for path in &common.out_mesh {
        let w = create(path)?;
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let written = if is_csv { out.mesh.write_csv(w) } else { out.mesh.write_obj(w) };
        written.map_err(|e| io_error(path, e))?;
    }
    if let Some(path) = &common.out_report {
        out.report.write(create(path)?).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn run_check(file: &Path, window: Option<Window>, grid: usize) -> u8 {
    let coeffs = match coeffs::load(file) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cannot parse coefficient file: {e}");
            return 2;
        }
    };
    match check(&coeffs, window, grid) {
        Ok(outcome) => {
            print!("{}", outcome.render());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}
