//! Closed-form residue values for the distinguished positive traces at
//! n = 3 and n = 4, with stable handling of the degenerate parameter loci.
//!
//! n = 3 (P = x³ + β²x, κ = -β² - 1/4):
//!   T(1)  = 1/(2 cosh²(πβ/2) cosh πβ)
//!   T(z²) = (-1/4 + (β²+1/4)/cosh πβ)/sinh² πβ
//!   α(κ)  = 1/4 - (κ+1/4)/(1 - cos π√(κ+1/4))
//!
//! n = 4 (P = (x²+β²)(x²+γ²)):
//!   T(1)  = (4β/sinh 2πβ - 4γ/sinh 2πγ)/(sinh π(β+γ) sinh π(γ-β))
//!   T(z²) = ((γ+4γ³)/(3 sinh 2πγ) - (β+4β³)/(3 sinh 2πβ))·(same prefactor)
//!   α     = 1/12 + (β³ sinh 2πγ - γ³ sinh 2πβ)/(3(β sinh 2πγ - γ sinh 2πβ))
//!
//! Writing u(β) = β/sinh 2πβ and F(a) = u(√a) (analytic in a = β² near the
//! real axis), the n = 4 values become divided differences of F and a·F(a)
//! in the variables a = β², b = γ². Coincident or nearly coincident points
//! are handled by Richardson-extrapolated symmetric divided differences, one
//! code path for the whole degenerate locus βγ(β-γ)(β+γ) = 0.

use rug::Float;

use crate::prec;

/// T(1), T(z²) and α = -T(z²)/T(1) of a distinguished positive trace.
#[derive(Debug, Clone)]
pub struct ExactTraceValues {
    pub t1: Float,
    pub tz2: Float,
    pub alpha: Float,
}

/// (1 - cos(π√s))/s, complex-safe in the sign of s, series near s = 0.
fn one_minus_cos_over(s: &Float) -> Float {
    let bits = s.prec();
    let pi = prec::pi(bits);
    if s.clone().abs() > 1e-8 {
        let num = if *s > 0 {
            let u = s.clone().sqrt();
            Float::with_val(bits, 1) - (pi * u).cos()
        } else {
            let u = (-s.clone()).sqrt();
            Float::with_val(bits, 1) - (pi * u).cosh()
        };
        num / s
    } else {
        // Σ_{k≥1} (-1)^{k+1} π^{2k} s^{k-1} / (2k)!
        let pi2 = pi.clone().square();
        let mut term = pi2.clone() / 2u32; // k = 1
        let mut acc = term.clone();
        for k in 2..=8u32 {
            term = -(term * &pi2) * s / ((2 * k - 1) * (2 * k));
            acc += &term;
        }
        acc
    }
}

/// α(κ) = 1/4 - (κ+1/4)/(1 - cos π√(κ+1/4)).
/// Evaluates the cos/cosh branch by the sign of κ + 1/4; the trace is
/// positive for κ < 0 (strip condition β² > -1/4).
pub fn alpha_n3(kappa: &Float) -> Float {
    let bits = kappa.prec();
    let s = kappa.clone() + prec::float(bits, 0.25);
    let q = one_minus_cos_over(&s);
    prec::float(bits, 0.25) - q.recip()
}

/// Exact n = 3 trace values for real β (small |β| through the α route).
pub fn trace_values_n3(beta: &Float) -> ExactTraceValues {
    let bits = beta.prec();
    let pi = prec::pi(bits);
    let ch_half = (pi.clone() * beta / 2u32).cosh();
    let ch = (pi.clone() * beta).cosh();
    let t1 = (ch_half.square() * &ch * 2u32).recip();
    let kappa = -(beta.clone().square()) - prec::float(bits, 0.25);
    let alpha = alpha_n3(&kappa);
    let tz2 = if beta.clone().abs() > 1e-4 {
        let sh2 = (pi * beta).sinh().square();
        let num = prec::float(bits, -0.25) + (beta.clone().square() + prec::float(bits, 0.25)) / ch;
        num / sh2
    } else {
        -(alpha.clone() * &t1)
    };
    ExactTraceValues { t1, tz2, alpha }
}

/// u(β) = β/sinh(2πβ) as an analytic function of a = β² (complex-safe sign).
fn f_of(a: &Float) -> Float {
    let bits = a.prec();
    let two_pi = prec::two_pi(bits);
    if a.is_zero() {
        return two_pi.recip();
    }
    if *a > 0 {
        let b = a.clone().sqrt();
        b.clone() / (two_pi * b).sinh()
    } else {
        let d = (-a.clone()).sqrt();
        d.clone() / (two_pi * d).sin()
    }
}

fn v_of(a: &Float) -> Float {
    a.clone() * f_of(a)
}

/// Divided difference (H(a) - H(b))/(a - b) with a Richardson-extrapolated
/// symmetric fallback when a and b (nearly) coincide.
fn divided_difference(h: &dyn Fn(&Float) -> Float, a: &Float, b: &Float) -> Float {
    let bits = a.prec();
    let scale = a
        .clone()
        .abs()
        .max(&b.clone().abs())
        .max(&prec::float(bits, 1.0));
    let d = a.clone() - b;
    if d.clone().abs() > scale.clone() * 1e-8 {
        return (h(a) - h(b)) / d;
    }
    let m = (a.clone() + b) / 2u32;
    let hstep = scale * 1e-6;
    let sym = |hh: &Float| -> Float {
        (h(&(m.clone() + hh)) - h(&(m.clone() - hh))) / (hh.clone() * 2u32)
    };
    let s1 = sym(&hstep);
    let s2 = sym(&(hstep.clone() / 2u32));
    // H'(m) with the h² term eliminated
    let hp = (s2.clone() * 4u32 - &s1) / 3u32;
    // curvature correction H'''(m)·d²/24 via H''' ≈ 6(S(h) - H')/h²
    let h3 = (s1 - &hp) * 6u32 / hstep.square();
    hp + h3 * d.square() / 24u32
}

/// Exact n = 4 trace values; the degenerate loci βγ(β-γ)(β+γ) = 0 are
/// regular and handled by the divided-difference limits.
pub fn trace_values_n4(beta: &Float, gamma: &Float) -> ExactTraceValues {
    let bits = beta.prec();
    let a = beta.clone().square();
    let b = gamma.clone().square();
    let dd_f = divided_difference(&f_of, &a, &b);
    let dd_v = divided_difference(&v_of, &a, &b);
    let alpha = prec::float(bits, 1.0) / 12u32 + dd_v.clone() / (dd_f.clone() * 3u32);
    // snc(x) = x/sinh(πx), snc(0) = 1/π
    let snc = |x: Float| -> Float {
        if x.is_zero() {
            prec::pi(bits).recip()
        } else {
            x.clone() / (prec::pi(bits) * &x).sinh()
        }
    };
    let t1 = -(dd_f * 4u32) * snc(beta.clone() + gamma) * snc(gamma.clone() - beta);
    let tz2 = -(alpha.clone() * &t1);
    ExactTraceValues { t1, tz2, alpha }
}

/// α(β,γ) alone.
pub fn alpha_n4(beta: &Float, gamma: &Float) -> Float {
    trace_values_n4(beta, gamma).alpha
}

/// τ = 128·α, the normalization used for the n = 4 surface.
pub fn tau_n4(beta: &Float, gamma: &Float) -> Float {
    alpha_n4(beta, gamma) * 128u32
}
