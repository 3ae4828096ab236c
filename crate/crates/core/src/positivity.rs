//! Classification of positive (unitary) traces.
//!
//! The cone of positive ρ-equivariant traces for (P, c, ε) is cut out by
//! sign conditions on the numerator polynomial G plus nonnegativity of the
//! atom masses, after reducing P into the closed strip and splitting off the
//! boundary part. Sign decisions on G are exact: G is taken with rational
//! coefficients and analyzed with Sturm chains and Yun square-free
//! decomposition, never by sampling.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rug::Float;

use crate::error::{Error, Result};
use crate::moments::{moment_table, shifted_measure_moments, PrecisionConfig};
use crate::orthopoly::hankel_determinants_y;
use crate::params::QuantizationSpec;
use crate::poly::Poly;
use crate::prec::{self, DELTA_STRIP};
use crate::weight::{Atom, WeightSpec};

pub type Rat = BigRational;
pub type RatPoly = Vec<Rat>;

// ---------------------------------------------------------------------------
// exact polynomial arithmetic over ℚ

fn rp_trim(p: &mut RatPoly) {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
}

fn rp_deg(p: &RatPoly) -> Option<usize> {
    p.len().checked_sub(1)
}

fn rp_derivative(p: &RatPoly) -> RatPoly {
    if p.len() <= 1 {
        return vec![];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rat::from_integer(k.into()))
        .collect()
}

fn rp_divrem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let db = rp_deg(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem = a.clone();
    if rem.len() <= db {
        return (vec![], rem);
    }
    let qlen = rem.len() - db;
    let mut q = vec![Rat::zero(); qlen];
    for k in (0..qlen).rev() {
        let coef = &rem[k + db] / &lead;
        for j in 0..=db {
            let t = &b[j] * &coef;
            rem[k + j] -= t;
        }
        q[k] = coef;
    }
    rem.truncate(db);
    rp_trim(&mut rem);
    (q, rem)
}

fn rp_monic(p: &RatPoly) -> RatPoly {
    match rp_deg(p) {
        None => vec![],
        Some(d) => {
            let lead = p[d].clone();
            p.iter().map(|c| c / &lead).collect()
        }
    }
}

fn rp_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut x = rp_monic(a);
    let mut y = rp_monic(b);
    while !y.is_empty() {
        let (_, r) = rp_divrem(&x, &y);
        x = y;
        y = rp_monic(&r);
    }
    if x.is_empty() {
        x
    } else {
        rp_monic(&x)
    }
}

/// Yun's square-free decomposition: p = lc · ∏ out[i].0 ^ out[i].1.
fn squarefree_decomposition(p: &RatPoly) -> Vec<(RatPoly, usize)> {
    let mut out = Vec::new();
    let a = rp_monic(p);
    if rp_deg(&a).map_or(true, |d| d == 0) {
        return out;
    }
    let da = rp_derivative(&a);
    let g = rp_gcd(&a, &da);
    if rp_deg(&g).map_or(true, |d| d == 0) {
        out.push((a, 1));
        return out;
    }
    let (mut b, _) = rp_divrem(&a, &g);
    let (c0, _) = rp_divrem(&da, &g);
    let mut d: RatPoly = {
        let mut v = c0;
        let bb = rp_derivative(&b);
        for (k, coef) in bb.iter().enumerate() {
            if k < v.len() {
                v[k] -= coef.clone();
            } else {
                v.push(-coef.clone());
            }
        }
        rp_trim(&mut v);
        v
    };
    let mut i = 1usize;
    while rp_deg(&b).map_or(false, |deg| deg > 0) {
        let w = rp_gcd(&b, &d);
        if rp_deg(&w).map_or(false, |deg| deg > 0) {
            out.push((w.clone(), i));
        }
        let (b_next, _) = rp_divrem(&b, &w);
        let (c_next, _) = rp_divrem(&d, &w);
        b = b_next;
        d = {
            let mut v = c_next;
            let bb = rp_derivative(&b);
            for (k, coef) in bb.iter().enumerate() {
                if k < v.len() {
                    v[k] -= coef.clone();
                } else {
                    v.push(-coef.clone());
                }
            }
            rp_trim(&mut v);
            v
        };
        i += 1;
    }
    out
}

/// Number of distinct real roots of a square-free polynomial (Sturm).
fn count_real_roots_squarefree(p: &RatPoly) -> usize {
    let d = match rp_deg(p) {
        None | Some(0) => return 0,
        Some(d) => d,
    };
    let _ = d;
    let mut chain = vec![rp_monic(p), rp_monic(&rp_derivative(p))];
    loop {
        let last = &chain[chain.len() - 1];
        if last.is_empty() {
            chain.pop();
            break;
        }
        if rp_deg(last) == Some(0) {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let (_, r) = rp_divrem(prev, last);
        let mut neg: RatPoly = r.iter().map(|c| -c.clone()).collect();
        rp_trim(&mut neg);
        if neg.is_empty() {
            break;
        }
        chain.push(rp_monic(&neg));
    }
    // sign at +∞ is sign(lc) (monic chain: +1); at -∞ it is (-1)^deg
    let signs_at = |at_plus: bool| -> Vec<i8> {
        chain
            .iter()
            .map(|q| {
                let deg = rp_deg(q).unwrap_or(0);
                if at_plus || deg % 2 == 0 {
                    1i8
                } else {
                    -1i8
                }
            })
            .collect()
    };
    let count_changes = |s: &[i8]| s.windows(2).filter(|w| w[0] != w[1]).count();
    let v_minus = count_changes(&signs_at(false));
    let v_plus = count_changes(&signs_at(true));
    v_minus.saturating_sub(v_plus)
}

/// Exact decision: p(x) ≥ 0 for all real x. The zero polynomial counts as
/// nonnegative here; cone membership excludes it separately.
pub fn is_nonneg_on_reals(p: &RatPoly) -> bool {
    let mut q = p.clone();
    rp_trim(&mut q);
    let d = match rp_deg(&q) {
        None => return true,
        Some(d) => d,
    };
    if d % 2 != 0 || q[d].is_negative() {
        return false;
    }
    if d == 0 {
        return q[0].is_positive() || q[0].is_zero();
    }
    // sign changes happen exactly at real roots of odd multiplicity
    for (factor, mult) in squarefree_decomposition(&q) {
        if mult % 2 == 1 && count_real_roots_squarefree(&factor) > 0 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// the cone of positive traces

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// ε = +1: G ≥ 0 on all of ℝ
    EpsPlus,
    /// ε = -1: G ≥ 0 on ℝ₊ and ≤ 0 on ℝ₋ (so G = X·U with U ≥ 0)
    EpsMinus,
}

/// Description of the cone of positive traces for a quantization.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    /// max allowed degree of G (deg G < ℓ); -1 when no nonzero G is allowed
    pub degree_bound: i64,
    pub require_g0_zero: bool,
    pub sign_mode: SignMode,
    /// number of independent atoms (distinct roots of Q)
    pub atom_count: usize,
    /// dimension of the G-cone modulo scaling, -1 for the empty cone
    pub dimension_mod_scaling: i64,
    /// extreme-ray examples spanning the cone
    pub generators: Vec<RatPoly>,
}

fn x_pow(k: usize) -> RatPoly {
    let mut v = vec![Rat::zero(); k + 1];
    v[k] = Rat::one();
    v
}

fn rp_mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Squares spanning the nonnegative polynomials of degree ≤ d (d even):
/// X^{2j} and (X^j + X^k)².
fn square_generators(d_even: i64) -> Vec<RatPoly> {
    let mut out = Vec::new();
    if d_even < 0 {
        return out;
    }
    let h = (d_even / 2) as usize;
    for j in 0..=h {
        out.push(x_pow(2 * j));
    }
    for j in 0..h {
        for k in (j + 1)..=h {
            let mut s = x_pow(j);
            let xk = x_pow(k);
            for (idx, c) in xk.iter().enumerate() {
                if idx < s.len() {
                    s[idx] += c.clone();
                } else {
                    s.push(c.clone());
                }
            }
            out.push(rp_mul(&s, &s));
        }
    }
    out
}

/// Dimensions and generators of the positive cone for `spec`, after the
/// strip reduction and the closed-strip factorization.
pub fn cone_description(spec: &QuantizationSpec) -> Result<ConeSpec> {
    let reduced = spec.reduced()?;
    let (p_star, q) = reduced.factor_closed_strip()?;
    let ell = p_star.total_degree() as i64;
    let atom_count = q.0.len();
    let c_zero = spec.c_is_zero();
    let sign_mode = if reduced.epsilon() == 1 { SignMode::EpsPlus } else { SignMode::EpsMinus };
    // cap on the degree of the auxiliary nonnegative factor U
    let (u_cap, u_shift): (i64, usize) = match (sign_mode, c_zero) {
        (SignMode::EpsMinus, _) => (ell - 2, 1),
        (SignMode::EpsPlus, false) => (ell - 1, 0),
        (SignMode::EpsPlus, true) => (ell - 3, 2),
    };
    let d_even = if u_cap < 0 { -1 } else { u_cap - (u_cap % 2) };
    let dimension = if d_even < 0 { -1 } else { d_even };
    let shift = x_pow(u_shift);
    let generators = square_generators(d_even)
        .into_iter()
        .map(|u| rp_mul(&shift, &u))
        .collect();
    Ok(ConeSpec {
        degree_bound: ell - 1,
        require_g0_zero: c_zero,
        sign_mode,
        atom_count,
        dimension_mod_scaling: dimension,
        generators,
    })
}

/// Dimension of the even cone C₊^even modulo scaling (t = (-1)^n implied).
pub fn even_cone_dimension(n: usize, epsilon: i8) -> i64 {
    let n = n as i64;
    let dim = match (epsilon, n % 2) {
        (-1, 1) => (n - 3) / 2,
        (1, 1) => (n - 1) / 2,
        (-1, 0) => (n - 2) / 2,
        (1, 0) => (n - 4) / 2,
        _ => unreachable!("epsilon is ±1"),
    };
    dim.max(-1)
}

/// Exact sign decision for cone membership of G.
/// ε=+1 needs G ≥ 0 on ℝ; ε=-1 needs G = X·U with U ≥ 0; c=0 forces G(0)=0.
pub fn is_positive_g(g: &RatPoly, epsilon: i8, c_is_zero: bool) -> bool {
    let mut gg = g.clone();
    rp_trim(&mut gg);
    if gg.is_empty() {
        return false;
    }
    if c_is_zero && !gg[0].is_zero() {
        return false;
    }
    match epsilon {
        1 => is_nonneg_on_reals(&gg),
        -1 => {
            if !gg[0].is_zero() {
                return false;
            }
            let u: RatPoly = gg[1..].to_vec();
            is_nonneg_on_reals(&u)
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Positive,
    /// deg G exceeds the bound deg G < ℓ of the reduced quantization
    DegreeTooHigh,
    /// c = 0 but G(0) ≠ 0
    VanishingAtZero,
    /// G violates the ε sign constraints (or G = 0 with no usable atoms)
    SignCondition,
    /// an atom carries negative mass
    NegativeAtom { index: usize },
    /// the density has poles on the imaginary axis
    AxisPole,
}

#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub positive: bool,
    pub certificate: Certificate,
    /// degree of the reduced interior part (ℓ)
    pub ell: usize,
    /// y-variable Hankel determinants of the base measure (symbolic positives only)
    pub hankel_base: Vec<Float>,
    /// y-variable Hankel determinants of the shifted measure λP(x)w(x+1/2)
    pub hankel_shifted: Vec<Float>,
    /// Some(true) when all computed determinants are positive
    pub corroborated: Option<bool>,
}

/// Exact rational coefficients lifted to a working-precision polynomial.
pub fn rat_poly_to_poly(g: &RatPoly, bits: u32) -> Poly {
    let coeffs = g
        .iter()
        .map(|c| {
            let r: rug::Rational = c.to_string().parse().expect("rational parse");
            rug::Complex::with_val(bits, (prec::float(bits, 0.0) + r, Float::new(bits)))
        })
        .collect();
    Poly::new(bits, coeffs)
}

/// Decide positivity of the trace given by (G, atoms) on the quantization
/// `spec`, reducing outside-strip roots first (the verdict is invariant under
/// the reduction). Symbolic conditions decide; Hankel determinants of both
/// positivity measures corroborate numerically when the verdict is positive.
pub fn decide_positivity(
    spec: &QuantizationSpec,
    g: &RatPoly,
    atoms: &[Atom],
    cfg: &PrecisionConfig,
) -> Result<PositivityReport> {
    let reduced = spec.reduced()?;
    let (p_star, q) = reduced.factor_closed_strip()?;
    let ell = p_star.total_degree();
    let fail = |certificate: Certificate| PositivityReport {
        positive: false,
        certificate,
        ell,
        hankel_base: vec![],
        hankel_shifted: vec![],
        corroborated: None,
    };
    // atoms must sit at Q roots; negative mass is a positivity failure
    for (idx, a) in atoms.iter().enumerate() {
        let on_q = q
            .0
            .iter()
            .any(|(r, _)| (r.imag().clone() - &a.y).to_f64().abs() <= DELTA_STRIP);
        if !on_q {
            return Err(Error::AtomOffAxis { y: a.y.to_f64() });
        }
        if a.mass.clone() < 0 {
            return Ok(fail(Certificate::NegativeAtom { index: idx }));
        }
    }
    let mut gg = g.clone();
    rp_trim(&mut gg);
    if let Some(d) = rp_deg(&gg) {
        if ell == 0 || d as i64 > ell as i64 - 1 {
            return Ok(fail(Certificate::DegreeTooHigh));
        }
    }
    let c_zero = spec.c_is_zero();
    if c_zero && !gg.is_empty() && !gg[0].is_zero() {
        return Ok(fail(Certificate::VanishingAtZero));
    }
    if !is_positive_g(&gg, reduced.epsilon(), c_zero) {
        return Ok(fail(Certificate::SignCondition));
    }
    // symbolic verdict: positive. Build the weight and corroborate.
    let bits = cfg.bits;
    let g_poly = rat_poly_to_poly(&gg, bits);
    let interior_spec = reduced.with_roots(p_star);
    let w = crate::weight::build_weight(&reduced, &g_poly, atoms)?;
    if !w.axis_poles().is_empty() {
        return Ok(fail(Certificate::AxisPole));
    }
    let depth = cfg.hankel_depth;
    let base_table = moment_table(&w, 2 * depth.max(1), cfg)?;
    let hankel_base = hankel_determinants_y(&base_table, depth)?;
    let shifted_table = shifted_measure_moments(&interior_spec, &w, 2 * depth.max(1), cfg)?;
    let hankel_shifted = hankel_determinants_y(&shifted_table, depth)?;
    let all_pos = hankel_base.iter().chain(hankel_shifted.iter()).all(|d| d.clone() > 0);
    Ok(PositivityReport {
        positive: true,
        certificate: Certificate::Positive,
        ell,
        hankel_base,
        hankel_shifted,
        corroborated: Some(all_pos),
    })
}

/// Exact rational from an f64 (every finite f64 is rational).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}
