mod commands;
mod parse;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use arakelov_core::{FiniteModel, PrecisionContext, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::Outcome;

#[derive(Parser, Debug, Clone)]
#[command(name = "arakelov", version, about = "Theta functions, Faltings heights and Néron–Tate heights at arbitrary precision")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(64..=4096))]
    prec: u32,
    /// Recompute at prec + 64 bits and report the largest component change.
    #[arg(long, global = true)]
    verify: bool,
    /// Write the JSON document here; the table then goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Theta functions with characteristics.
    Theta {
        #[command(subcommand)]
        cmd: ThetaCmd,
    },
    /// Reduction of period matrices.
    Siegel {
        #[command(subcommand)]
        cmd: SiegelCmd,
    },
    /// Weierstrass equations.
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Elliptic curves over ℚ.
    Elliptic {
        #[command(subcommand)]
        cmd: EllipticCmd,
    },
    /// Hyperelliptic Jacobians.
    Jacobian {
        #[command(subcommand)]
        cmd: JacobianCmd,
    },
    /// Verification suites.
    Check {
        #[command(subcommand)]
        cmd: CheckCmd,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum ThetaCmd {
    /// θ[a;b](z, τ); for g = 1 without --char, all four Jacobi thetas.
    Eval {
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "0")]
        z: String,
        /// Characteristic as "a1,..,ag;b1,..,bg", e.g. "1/2;0".
        #[arg(long = "char")]
        characteristic: Option<String>,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum SiegelCmd {
    /// Reduce τ (g = 1) into the fundamental domain.
    Reduce {
        #[arg(long)]
        tau: String,
    },
    /// Check the reduction conditions and, for reduced τ, the theta-null bounds.
    Check {
        #[arg(long)]
        tau: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum CurveCmd {
    /// Exact discriminant and its factorisation.
    Disc {
        #[arg(long)]
        curve: String,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Finite {
    Semistable,
    Rational,
}

impl From<Finite> for FiniteModel {
    fn from(f: Finite) -> Self {
        match f {
            Finite::Semistable => FiniteModel::Semistable,
            Finite::Rational => FiniteModel::Rational,
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
enum EllipticCmd {
    /// Stable Faltings height.
    Faltings {
        #[arg(long)]
        curve: String,
        #[arg(long, value_enum, default_value_t = Finite::Semistable)]
        finite: Finite,
    },
    /// Néron–Tate height of a rational point, place by place.
    Height {
        #[arg(long)]
        curve: String,
        /// "x,y" with rational coordinates.
        #[arg(long)]
        point: String,
    },
    /// α, β and μ at each place for the point z = s + tτ.
    Decompose {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value = "0.3,0.2")]
        z: String,
        #[arg(long, value_enum, default_value_t = Finite::Semistable)]
        finite: Finite,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum JacobianCmd {
    /// Faltings height of a hyperelliptic Jacobian from its period matrix and finite data.
    Faltings {
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        tau: Option<String>,
        /// Built-in period matrix: "bomemo" (y^2 + y = x^5).
        #[arg(long)]
        tau_preset: Option<String>,
        /// JSON list of {"p", "ord_delta_min", "e"} records.
        #[arg(long)]
        places: Option<String>,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum CheckCmd {
    /// Theta, discriminant and height identities on random inputs.
    Identities {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Theta-null bounds and the period-matrix height inequality.
    MatrixLemma {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Positivity of the archimedean Autissier integral.
    Autissier {
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
}

fn dispatch(cmd: &Cmd, ctx: &PrecisionContext) -> Result<Outcome> {
    use commands::*;
    match cmd {
        Cmd::Theta { cmd: ThetaCmd::Eval { tau, z, characteristic } } => theta_eval(tau, z, characteristic.as_deref(), ctx),
        Cmd::Siegel { cmd: SiegelCmd::Reduce { tau } } => siegel_reduce(tau, ctx),
        Cmd::Siegel { cmd: SiegelCmd::Check { tau } } => siegel_check(tau, ctx),
        Cmd::Curve { cmd: CurveCmd::Disc { curve } } => curve_disc(curve, ctx),
        Cmd::Elliptic { cmd: EllipticCmd::Faltings { curve, finite } } => elliptic_faltings(curve, (*finite).into(), ctx),
        Cmd::Elliptic { cmd: EllipticCmd::Height { curve, point } } => elliptic_height(curve, point, ctx),
        Cmd::Elliptic { cmd: EllipticCmd::Decompose { curve, z, finite } } => elliptic_decompose(curve, z, (*finite).into(), ctx),
        Cmd::Jacobian { cmd: JacobianCmd::Faltings { genus, tau, tau_preset, places } } => {
            jacobian_faltings(*genus, tau.as_deref(), tau_preset.as_deref(), places.as_deref(), ctx)
        }
        Cmd::Check { cmd: CheckCmd::Identities { seed, samples } } => check_identities(*seed, *samples, ctx),
        Cmd::Check { cmd: CheckCmd::MatrixLemma { seed, samples, genus } } => check_matrix_lemma(*seed, *samples, *genus, ctx),
        Cmd::Check { cmd: CheckCmd::Autissier { tau, seed, samples, grid } } => check_autissier(tau.as_deref(), *seed, *samples, *grid, ctx),
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let ctx = PrecisionContext::new(cli.prec);
    let mut out = dispatch(&cli.cmd, &ctx)?;
    if cli.verify {
        let hi = ctx.raised(64);
        let again = dispatch(&cli.cmd, &hi)?;
        let delta = report::max_delta(&Value::Object(out.doc.clone()), &Value::Object(again.doc), hi.prec());
        let d = delta.map(|d| format!("{:.3e}", d.to_f64())).unwrap_or_else(|| "0".into());
        out.doc.insert("verify".into(), json!({"precision_bits": hi.bits, "max_delta": d}));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&Value::Object(out.doc.clone())).expect("documents serialise");
            let table = report::table(&out.doc);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(4);
                    }
                    print!("{table}");
                }
                None => {
                    println!("{text}");
                    eprint!("{table}");
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: one or more checks failed");
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
