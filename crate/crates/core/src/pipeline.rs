//! Orchestration: weight → moments → recurrence with automatic precision
//! escalation, and the numeric α pipelines the acceptance gates compare
//! against the closed forms.

use rug::Float;

use crate::error::{Error, Result};
use crate::families;
use crate::moments::{moment_table, MomentTable, PrecisionConfig};
use crate::orthopoly::{recurrence_coeffs, RecurrenceCoeffs};
use crate::params::QuantizationSpec;
use crate::poly::Poly;
use crate::prec;
use crate::weight::{build_weight, Atom, WeightSpec};

/// A trace given by its defining data, rebuildable at any precision.
#[derive(Debug, Clone)]
pub struct TraceData {
    pub spec: QuantizationSpec,
    pub g: Poly,
    pub atoms: Vec<Atom>,
}

impl TraceData {
    pub fn new(spec: QuantizationSpec, g: Poly, atoms: Vec<Atom>) -> Self {
        TraceData { spec, g, atoms }
    }

    pub fn weight_at(&self, bits: u32) -> Result<WeightSpec> {
        let spec = self.spec.at_bits(bits);
        let g = self.g.at_bits(bits);
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                y: prec::float(bits, 0.0) + &a.y,
                mass: prec::float(bits, 0.0) + &a.mass,
            })
            .collect();
        build_weight(&spec, &g, &atoms)
    }
}

/// Recurrence coefficients with the precision-escalation policy: recompute
/// at doubled precision until a_K moves by less than `rel_target`, capped at
/// `prec::MAX_BITS`.
pub fn recurrence_with_escalation(
    data: &TraceData,
    depth: usize,
    cfg: &PrecisionConfig,
    rel_target: f64,
) -> Result<(RecurrenceCoeffs, MomentTable, u32)> {
    let mut cur_cfg = cfg.clone();
    let w = data.weight_at(cur_cfg.bits)?;
    let table = moment_table(&w, 2 * depth + 2, &cur_cfg)?;
    let mut cur = (recurrence_coeffs(&table, depth)?, table);
    loop {
        if cur_cfg.bits >= prec::MAX_BITS {
            return Err(Error::PrecisionUnreachable { best: f64::NAN });
        }
        let next_cfg = cur_cfg.escalated();
        let w = data.weight_at(next_cfg.bits)?;
        let table = moment_table(&w, 2 * depth + 2, &next_cfg)?;
        let rc = recurrence_coeffs(&table, depth)?;
        let a_cur = cur.0.a_k(depth);
        let a_next = rc.a_k(depth);
        let diff = prec::cabs(&(a_next.clone() - prec::at_prec(next_cfg.bits, &a_cur)));
        let scale = prec::cabs(&a_next).max(&prec::float(next_cfg.bits, 1e-30));
        let stable = diff / scale < rel_target;
        cur = (rc, table);
        cur_cfg = next_cfg;
        if stable {
            return Ok((cur.0, cur.1, cur_cfg.bits));
        }
    }
}

/// Numeric α = -T(z²)/T(1) for the n = 3 positive trace at β² = -κ - 1/4.
pub fn alpha_numeric_n3(beta_sq: f64, cfg: &PrecisionConfig) -> Result<Float> {
    let fam = families::family_n3(cfg.bits, beta_sq)?;
    let table = moment_table(&fam.weight, 2, cfg)?;
    let alpha = -(table.value(2).clone() / table.value(0));
    Ok(alpha.real().clone())
}

/// Numeric α for the n = 4 positive trace.
pub fn alpha_numeric_n4(beta: f64, gamma: f64, cfg: &PrecisionConfig) -> Result<Float> {
    let fam = families::family_n4(cfg.bits, beta, gamma)?;
    let table = moment_table(&fam.weight, 2, cfg)?;
    let alpha = -(table.value(2).clone() / table.value(0));
    Ok(alpha.real().clone())
}
