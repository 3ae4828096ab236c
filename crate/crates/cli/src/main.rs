//! kleintrace CLI: moments, recurrence/star-product coefficients, positivity
//! classification, discrete-Painlevé runs, exact low-degree values, and
//! structural verification, over JSON problem specs.

mod outfmt;
mod problem;
mod verify;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use kleintrace::moments::{moment_table, PrecisionConfig};
use kleintrace::orthopoly::{recurrence_coeffs, star_product_row};
use kleintrace::painleve;
use kleintrace::positivity::{self, rat_from_f64};
use kleintrace::prec;
use kleintrace::Error as CoreError;

use outfmt::{digits_for, fmt_complex, fmt_float, render, OutFormat, Table};
use problem::ProblemSpec;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        CliError { code: EXIT_VALIDATION, message }
    }

    /// Core errors arising from user input are validation failures.
    pub fn from_core_validation(e: CoreError) -> Self {
        CliError { code: EXIT_VALIDATION, message: e.to_string() }
    }

    /// Core errors arising mid-computation keep their contractual codes.
    pub fn from_core(e: CoreError) -> Self {
        let code = match &e {
            CoreError::PrecisionUnreachable { .. } => EXIT_PRECISION,
            CoreError::UnsupportedShape => EXIT_UNSUPPORTED,
            CoreError::DegenerateTrace { .. } | CoreError::DegeneratePade { .. } => EXIT_PRECISION,
            _ => EXIT_VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "kleintrace", version, about = "Twisted traces and short star-products on quantized type-A Kleinian singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// problem spec file (JSON)
    #[arg(long)]
    spec: String,
    /// working precision in bits (overrides the spec file and the
    /// KLEINTRACE_PRECISION_BITS environment variable)
    #[arg(long)]
    precision_bits: Option<u32>,
    /// output format
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// write output to a file (atomically) instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace moments M_0..M_r with error estimates
    Moments {
        #[command(flatten)]
        common: CommonArgs,
        /// highest moment order
        #[arg(long, default_value_t = 10)]
        r_max: usize,
    },
    /// Three-term recurrence coefficients a_k, b_k
    Recurrence {
        #[command(flatten)]
        common: CommonArgs,
        /// recurrence depth K
        #[arg(long = "K", short = 'K')]
        k: Option<usize>,
    },
    /// Short star-product rows z*z^k = z^{k+1} + b_k z^k + a_k z^{k-1}
    Starprod {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "K", short = 'K')]
        k: Option<usize>,
    },
    /// Positivity classification of the trace and the cone of the quantization
    Positivity {
        #[command(flatten)]
        common: CommonArgs,
        /// Hankel corroboration depth
        #[arg(long, default_value_t = 8)]
        hankel_depth: usize,
    },
    /// Discrete-Painlevé recurrence run (P = x² or P = x³+β²x)
    Painleve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "K", short = 'K')]
        k: Option<usize>,
        /// compute the seeds (b_0 resp. a_1) from the moment pipeline
        #[arg(long, default_value_t = true)]
        seed_from_moments: bool,
    },
    /// Exact residue-formula values for the n=3 and n=4 positive traces
    Exact {
        #[command(subcommand)]
        which: ExactCommand,
    },
    /// Structural verification (axioms, stieltjes, pade, lax, painleve)
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// which verification to run
        #[arg(long)]
        which: String,
        /// depth where applicable
        #[arg(long = "K", short = 'K', default_value_t = 8)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum ExactCommand {
    /// n = 3: α(κ), T(1), T(z²) at κ < 0
    N3 {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value = "alpha", value_parser = ["alpha", "t1", "tz2"])]
        emit: String,
        #[arg(long)]
        precision_bits: Option<u32>,
    },
    /// n = 4: α(β,γ), τ = 128α, T(1), T(z²)
    N4 {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value = "alpha", value_parser = ["alpha", "tau", "t1", "tz2"])]
        emit: String,
        #[arg(long)]
        precision_bits: Option<u32>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Moments { common, r_max } => cmd_moments(&common, r_max),
        Command::Recurrence { common, k } => cmd_recurrence(&common, k, false),
        Command::Starprod { common, k } => cmd_recurrence(&common, k, true),
        Command::Positivity { common, hankel_depth } => cmd_positivity(&common, hankel_depth),
        Command::Painleve { common, k, seed_from_moments } => {
            cmd_painleve(&common, k, seed_from_moments)
        }
        Command::Exact { which } => cmd_exact(which),
        Command::Verify { common, which, k } => cmd_verify(&common, &which, k),
    }
}

fn load(common: &CommonArgs) -> Result<(ProblemSpec, u32, OutFormat), CliError> {
    let spec = ProblemSpec::load(&common.spec)?;
    let bits = spec.bits(common.precision_bits);
    let fmt = OutFormat::parse(common.format.as_deref(), spec.format.as_deref())?;
    Ok((spec, bits, fmt))
}

fn cmd_moments(common: &CommonArgs, r_max: usize) -> Result<(), CliError> {
    let (problem, bits, fmt) = load(common)?;
    let (_spec, w) = problem.weight(bits)?;
    let cfg = PrecisionConfig::with_bits(bits);
    let table = moment_table(&w, r_max, &cfg).map_err(CliError::from_core)?;
    let digits = digits_for(bits);
    let mut t = Table::new(vec!["r", "re", "im", "abs_error"]);
    for r in 0..=r_max {
        let (re, im) = fmt_complex(table.value(r), digits);
        t.push(vec![r.to_string(), re, im, format!("{:e}", table.error(r).to_f64())]);
    }
    render(
        &t,
        fmt,
        json!({ "command": "moments", "precision_bits": bits, "r_max": r_max, "spec": problem }),
        common.out.as_deref(),
    )
}

fn cmd_recurrence(common: &CommonArgs, k: Option<usize>, star_rows: bool) -> Result<(), CliError> {
    let (problem, bits, fmt) = load(common)?;
    let depth = k.or(problem.k).unwrap_or(10);
    let (_spec, w) = problem.weight(bits)?;
    let cfg = PrecisionConfig::with_bits(bits);
    let table = moment_table(&w, 2 * depth + 2, &cfg).map_err(CliError::from_core)?;
    let rc = recurrence_coeffs(&table, depth).map_err(CliError::from_core)?;
    let digits = digits_for(bits);
    let mut t = if star_rows {
        Table::new(vec!["k", "z_kplus1", "b_k_re", "b_k_im", "a_k_re", "a_k_im"])
    } else {
        Table::new(vec!["k", "a_k_re", "a_k_im", "b_k_re", "b_k_im"])
    };
    for kk in 0..=depth {
        let (one, b, a) = star_product_row(&rc, kk);
        let (are, aim) = fmt_complex(&a, digits);
        let (bre, bim) = fmt_complex(&b, digits);
        if star_rows {
            t.push(vec![
                kk.to_string(),
                fmt_float(one.real(), digits),
                bre,
                bim,
                are,
                aim,
            ]);
        } else {
            t.push(vec![kk.to_string(), are, aim, bre, bim]);
        }
    }
    render(
        &t,
        fmt,
        json!({
            "command": if star_rows { "starprod" } else { "recurrence" },
            "precision_bits": bits,
            "K": depth,
            "spec": problem
        }),
        common.out.as_deref(),
    )
}

fn cmd_positivity(common: &CommonArgs, hankel_depth: usize) -> Result<(), CliError> {
    let (problem, bits, fmt) = load(common)?;
    let spec = problem.quantization(bits)?;
    let mut cfg = PrecisionConfig::with_bits(bits);
    cfg.hankel_depth = hankel_depth;
    let g_rat: Vec<positivity::Rat> = problem
        .g
        .iter()
        .map(|&c| {
            rat_from_f64(c).ok_or_else(|| CliError::validation(format!("non-finite G coefficient {c}")))
        })
        .collect::<Result<_, _>>()?;
    let atoms = problem.atom_list(bits);
    let cone = positivity::cone_description(&spec).map_err(CliError::from_core_validation)?;
    let report =
        positivity::decide_positivity(&spec, &g_rat, &atoms, &cfg).map_err(CliError::from_core)?;
    let digits = digits_for(bits);
    let gens: Vec<String> = cone
        .generators
        .iter()
        .map(|g| {
            let coeffs: Vec<String> = g.iter().map(|c| c.to_string()).collect();
            format!("[{}]", coeffs.join(", "))
        })
        .collect();
    let hankel_min = report
        .hankel_base
        .iter()
        .chain(report.hankel_shifted.iter())
        .map(|d| d.to_f64())
        .fold(f64::INFINITY, f64::min);
    let even_dim = if spec.is_even_quantization() {
        json!(positivity::even_cone_dimension(spec.n(), spec.epsilon()))
    } else {
        json!(null)
    };
    let payload = json!({
        "command": "positivity",
        "precision_bits": bits,
        "positive": report.positive,
        "certificate": format!("{:?}", report.certificate),
        "cone": {
            "dimension_mod_scaling": cone.dimension_mod_scaling,
            "degree_bound": cone.degree_bound,
            "atom_count": cone.atom_count,
            "sign_mode": format!("{:?}", cone.sign_mode),
            "require_g0_zero": cone.require_g0_zero,
            "generators": gens,
            "even_cone_dimension_mod_scaling": even_dim,
        },
        "hankel": {
            "depth": hankel_depth,
            "base": report.hankel_base.iter().map(|d| fmt_float(d, digits)).collect::<Vec<_>>(),
            "shifted": report.hankel_shifted.iter().map(|d| fmt_float(d, digits)).collect::<Vec<_>>(),
            "min": if hankel_min.is_finite() { json!(hankel_min) } else { json!(null) },
            "corroborated": report.corroborated,
        },
        "spec": problem,
    });
    match fmt {
        OutFormat::Json => outfmt::emit(
            &serde_json::to_string_pretty(&payload).unwrap(),
            common.out.as_deref(),
        ),
        OutFormat::Csv => {
            let mut t = Table::new(vec!["key", "value"]);
            t.push(vec!["positive".into(), report.positive.to_string()]);
            t.push(vec!["certificate".into(), format!("{:?}", report.certificate)]);
            t.push(vec![
                "dimension_mod_scaling".into(),
                cone.dimension_mod_scaling.to_string(),
            ]);
            t.push(vec!["atom_count".into(), cone.atom_count.to_string()]);
            t.push(vec!["generators".into(), gens.join(" ; ")]);
            render(&t, fmt, json!({}), common.out.as_deref())
        }
    }
}

fn cmd_painleve(common: &CommonArgs, k: Option<usize>, seed_from_moments: bool) -> Result<(), CliError> {
    let (problem, bits, fmt) = load(common)?;
    let depth = k.or(problem.k).unwrap_or(10);
    let (spec, w) = problem.weight(bits)?;
    let (shape, _) = painleve::detect_shape(&spec).map_err(CliError::from_core)?;
    if !seed_from_moments {
        return Err(CliError::validation(
            "only --seed-from-moments is supported; the recurrence needs trace seeds".into(),
        ));
    }
    let cfg = PrecisionConfig::with_bits(bits);
    let table = moment_table(&w, 4, &cfg).map_err(CliError::from_core)?;
    let digits = digits_for(bits);
    let mut t = Table::new(vec!["n", "a_n_re", "a_n_im", "b_n_re", "b_n_im"]);
    match shape {
        painleve::RecurrenceShape::X2 => {
            let tt = spec.derive_constants().t;
            let b0 = table.value(1).clone() / table.value(0);
            let (a_seq, b_seq) = painleve::run_x2(&tt, &b0, depth).map_err(CliError::from_core)?;
            let zero = prec::czero(bits);
            for n in 0..=depth {
                let a = if n == 0 { &zero } else { &a_seq[n - 1] };
                let (are, aim) = fmt_complex(a, digits);
                let (bre, bim) = fmt_complex(&b_seq[n], digits);
                t.push(vec![n.to_string(), are, aim, bre, bim]);
            }
        }
        painleve::RecurrenceShape::X3Even => {
            let m2 = moment_table(&w, 2, &cfg).map_err(CliError::from_core)?;
            let a1 = m2.value(2).clone() / m2.value(0);
            let beta_sq = {
                let p = spec.p_poly();
                p.coeff(1)
            };
            let a_seq =
                painleve::run_x3_even(&beta_sq, &a1, depth).map_err(CliError::from_core)?;
            for n in 1..=depth {
                let (are, aim) = fmt_complex(&a_seq[n - 1], digits);
                t.push(vec![n.to_string(), are, aim, "0".into(), "0".into()]);
            }
        }
    }
    render(
        &t,
        fmt,
        json!({
            "command": "painleve",
            "shape": format!("{shape:?}"),
            "precision_bits": bits,
            "K": depth,
            "spec": problem
        }),
        common.out.as_deref(),
    )
}

fn cmd_exact(which: ExactCommand) -> Result<(), CliError> {
    match which {
        ExactCommand::N3 { kappa, emit, precision_bits } => {
            let bits = precision_bits.unwrap_or(prec::DEFAULT_BITS);
            if !(kappa < 0.0) {
                return Err(CliError::validation(format!(
                    "κ must be negative (strip condition β² > -1/4), got {kappa}"
                )));
            }
            let digits = digits_for(bits);
            let kappa_f = prec::float(bits, kappa);
            let beta_sq = -kappa - 0.25;
            let value = match emit.as_str() {
                "alpha" => kleintrace::exact::alpha_n3(&kappa_f),
                _ => {
                    if beta_sq < 0.0 {
                        return Err(CliError::validation(
                            "T(1)/T(z²) are emitted for β² ≥ 0 (κ ≤ -1/4); α covers the rest"
                                .into(),
                        ));
                    }
                    let v = kleintrace::exact::trace_values_n3(&prec::float(bits, beta_sq.sqrt()));
                    if emit == "t1" {
                        v.t1
                    } else {
                        v.tz2
                    }
                }
            };
            println!("{}", fmt_float(&value, digits));
            Ok(())
        }
        ExactCommand::N4 { beta, gamma, emit, precision_bits } => {
            let bits = precision_bits.unwrap_or(prec::DEFAULT_BITS);
            let digits = digits_for(bits);
            let b = prec::float(bits, beta);
            let g = prec::float(bits, gamma);
            let v = kleintrace::exact::trace_values_n4(&b, &g);
            let value = match emit.as_str() {
                "alpha" => v.alpha,
                "tau" => v.alpha * 128u32,
                "t1" => v.t1,
                _ => v.tz2,
            };
            println!("{}", fmt_float(&value, digits));
            Ok(())
        }
    }
}

fn cmd_verify(common: &CommonArgs, which: &str, k: usize) -> Result<(), CliError> {
    let (problem, bits, fmt) = load(common)?;
    let (payload, pass) = verify::run(&problem, which, k, bits)?;
    let content = match fmt {
        OutFormat::Json => serde_json::to_string_pretty(&payload).unwrap(),
        OutFormat::Csv => {
            let mut t = Table::new(vec!["key", "value"]);
            if let Some(obj) = payload.as_object() {
                for (key, val) in obj {
                    t.push(vec![key.clone(), val.to_string()]);
                }
            }
            t.to_csv()
        }
    };
    outfmt::emit(&content, common.out.as_deref())?;
    if !pass {
        return Err(CliError {
            code: 1,
            message: format!("verification {which} failed"),
        });
    }
    Ok(())
}
