//! `verify` subcommand: run one of the structural verifications against a
//! problem spec and report pass/fail with residuals. Thresholds follow the
//! library's reference tolerances at 256-bit working precision and scale
//! with the requested depth.

use rug::Complex;
use serde_json::{json, Value};

use kleintrace::moments::{moment_table, verify_trace_axiom, PrecisionConfig};
use kleintrace::orthopoly::{
    orthopoly_coeffs, recurrence_coeffs, verify_stieltjes_polynomiality, StieltjesSeries,
};
use kleintrace::pade::{
    asymptotic_extract, lax_matrix, pade_denominator, pade_numerator, verify_difference_equation,
};
use kleintrace::painleve;
use kleintrace::poly::Poly;
use kleintrace::prec;

use crate::problem::ProblemSpec;
use crate::CliError;

pub const AXIOM_TOL: f64 = 1e-20;
pub const STIELTJES_TOL: f64 = 1e-18;
pub const STIELTJES_ORDER: usize = 24;
pub const PADE_TOL: f64 = 1e-15;
pub const LAX_DET_TOL: f64 = 1e-18;
pub const LAX_DIFFEQ_TOL: f64 = 1e-15;
pub const LAX_ASY_TOL: f64 = 1e-14;
pub const PAINLEVE_TOL: f64 = 1e-10;

/// Deterministic test polynomials of degree ≤ 6 for the axiom check.
fn axiom_test_polys(bits: u32, count: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(count);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for _ in 0..count {
        let deg = 1 + (next().abs() * 6.0) as usize % 6;
        let coeffs: Vec<f64> = (0..=deg).map(|_| next()).collect();
        out.push(Poly::from_f64(bits, &coeffs));
    }
    out
}

pub fn run(
    problem: &ProblemSpec,
    which: &str,
    depth: usize,
    bits: u32,
) -> Result<(Value, bool), CliError> {
    let cfg = PrecisionConfig::with_bits(bits);
    match which {
        "axioms" => {
            let (spec, w) = problem.weight(bits)?;
            let mut worst = prec::float(bits, 0.0);
            for s in axiom_test_polys(bits, 12) {
                let r = verify_trace_axiom(&spec, &w, &s, &cfg).map_err(CliError::from_core)?;
                if r > worst {
                    worst = r;
                }
            }
            let pass = worst.to_f64() <= AXIOM_TOL;
            Ok((
                json!({
                    "check": "axioms",
                    "max_residual": format!("{:e}", worst.to_f64()),
                    "tolerance": format!("{AXIOM_TOL:e}"),
                    "pass": pass,
                }),
                pass,
            ))
        }
        "stieltjes" => {
            let (spec, w) = problem.weight(bits)?;
            let n = spec.n();
            let table =
                moment_table(&w, STIELTJES_ORDER, &cfg).map_err(CliError::from_core)?;
            let f = StieltjesSeries::from_moments(&table, STIELTJES_ORDER)
                .map_err(CliError::from_core)?;
            let t = spec.derive_constants().t;
            let (l, residual) =
                verify_stieltjes_polynomiality(&f, &spec.p_poly(), &t, STIELTJES_ORDER - n - 2)
                    .map_err(CliError::from_core)?;
            let t_is_one = spec.c_is_zero();
            let lt = l.trimmed_bits(bits / 3);
            let deg_ok = match lt.degree() {
                None => true,
                Some(d) => {
                    if t_is_one {
                        d + 1 < n
                    } else {
                        d < n
                    }
                }
            };
            let pass = residual.to_f64() <= STIELTJES_TOL && deg_ok;
            Ok((
                json!({
                    "check": "stieltjes",
                    "tail_residual": format!("{:e}", residual.to_f64()),
                    "deg_L": lt.degree().map(|d| d as i64).unwrap_or(-1),
                    "degree_bound_ok": deg_ok,
                    "tolerance": format!("{STIELTJES_TOL:e}"),
                    "pass": pass,
                }),
                pass,
            ))
        }
        "pade" => {
            let (_spec, w) = problem.weight(bits)?;
            let depth = depth.min(10).max(1);
            let order = 2 * depth + 4;
            let table = moment_table(&w, order, &cfg).map_err(CliError::from_core)?;
            let f = StieltjesSeries::from_moments(&table, order).map_err(CliError::from_core)?;
            let rc = recurrence_coeffs(&table, depth).map_err(CliError::from_core)?;
            let mut worst = 0.0f64;
            for k in 0..=depth {
                let pade = pade_denominator(&f, k).map_err(CliError::from_core)?;
                let gs = orthopoly_coeffs(&rc, k);
                let d = pade.max_coeff_dist(&gs).to_f64();
                if d > worst {
                    worst = d;
                }
            }
            let pass = worst <= PADE_TOL;
            Ok((
                json!({
                    "check": "pade",
                    "depth": depth,
                    "max_coeff_dist": format!("{worst:e}"),
                    "tolerance": format!("{PADE_TOL:e}"),
                    "pass": pass,
                }),
                pass,
            ))
        }
        "lax" => {
            let (spec, w) = problem.weight(bits)?;
            let depth = depth.min(8).max(1);
            let order = 2 * depth + 8;
            let table = moment_table(&w, order, &cfg).map_err(CliError::from_core)?;
            let f = StieltjesSeries::from_moments(&table, order).map_err(CliError::from_core)?;
            let rc = recurrence_coeffs(&table, depth).map_err(CliError::from_core)?;
            let t = spec.derive_constants().t;
            let (l_poly, _) = verify_stieltjes_polynomiality(&f, &spec.p_poly(), &t, 4)
                .map_err(CliError::from_core)?;
            let l_poly = l_poly.trimmed_bits(bits / 3);
            let t_is_one = spec.c_is_zero();
            let mut det_worst = 0.0f64;
            let mut diffeq_worst = 0.0f64;
            let mut asy_worst = 0.0f64;
            for k in 1..=depth {
                let p_n = pade_denominator(&f, k).map_err(CliError::from_core)?;
                let p_nm1 = pade_denominator(&f, k - 1).map_err(CliError::from_core)?;
                let q_n = pade_numerator(&f, &p_n);
                let q_nm1 = pade_numerator(&f, &p_nm1);
                let a = lax_matrix(
                    &p_n,
                    &p_nm1,
                    &q_n,
                    &q_nm1,
                    &spec.p_poly(),
                    &t,
                    &l_poly,
                    &rc.norms[k - 1],
                    k - 1,
                )
                .map_err(CliError::from_core)?;
                det_worst = det_worst.max(a.det_residual(&t).to_f64());
                let samples: Vec<Complex> = (0..40)
                    .map(|j| prec::cplx(bits, 0.11 * j as f64 - 2.2, 0.07 * j as f64 - 1.4))
                    .collect();
                let r = verify_difference_equation(&a, &p_n, &p_nm1, &samples)
                    .map_err(CliError::from_core)?;
                diffeq_worst = diffeq_worst.max(r.to_f64());
                let asy = asymptotic_extract(&a);
                let dev = |x: &Complex, y: &Complex| prec::cabs(&(x.clone() - y)).to_f64();
                asy_worst = asy_worst
                    .max(dev(&asy.c11[1], &prec::cplx(bits, k as f64, 0.0)));
                if t_is_one {
                    let expect21 = prec::cplx(bits, 2.0 * k as f64 - 1.0, 0.0);
                    asy_worst = asy_worst.max(dev(&asy.c21[2], &expect21));
                } else {
                    let one_minus = prec::cone(bits) - t.clone().recip();
                    asy_worst = asy_worst.max(dev(&asy.c21[1], &one_minus));
                    let expect12 = -(one_minus * rc.a_k(k));
                    asy_worst = asy_worst.max(dev(&asy.c12[1], &expect12));
                }
            }
            let pass =
                det_worst <= LAX_DET_TOL && diffeq_worst <= LAX_DIFFEQ_TOL && asy_worst <= LAX_ASY_TOL;
            Ok((
                json!({
                    "check": "lax",
                    "depth": depth,
                    "det_residual": format!("{det_worst:e}"),
                    "diffeq_residual": format!("{diffeq_worst:e}"),
                    "asymptotics_residual": format!("{asy_worst:e}"),
                    "pass": pass,
                }),
                pass,
            ))
        }
        "painleve" => {
            let (spec, w) = problem.weight(bits)?;
            let rep = painleve::crosscheck(&spec, &w, depth.max(1), &cfg, PAINLEVE_TOL)
                .map_err(CliError::from_core)?;
            let pass = rep.max_rel_dev_a <= PAINLEVE_TOL
                && rep.max_rel_dev_b <= PAINLEVE_TOL
                && rep.first_divergence.is_none();
            Ok((
                json!({
                    "check": "painleve",
                    "shape": format!("{:?}", rep.shape),
                    "depth": rep.depth,
                    "max_rel_dev_a": format!("{:e}", rep.max_rel_dev_a),
                    "max_rel_dev_b": format!("{:e}", rep.max_rel_dev_b),
                    "first_divergence": rep.first_divergence,
                    "pass": pass,
                }),
                pass,
            ))
        }
        other => Err(CliError::validation(format!(
            "unknown verification {other:?}; pick axioms|stieltjes|pade|lax|painleve"
        ))),
    }
}
