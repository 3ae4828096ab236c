//! Adaptive composite Gauss–Legendre quadrature at arbitrary precision.
//!
//! The integrands here are analytic on the axis with poles at distance
//! ≥ the strip gap, so fixed-order panels with pairwise refinement converge
//! geometrically; refinement concentrates automatically in pole shadows.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::prec;

pub const GL_ORDER: usize = 32;

/// Nodes and weights on [-1, 1].
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

fn legendre_pair(n: usize, x: &Float, bits: u32) -> (Float, Float) {
    // returns (P_n(x), P_{n-1}(x))
    let mut p0 = prec::float(bits, 1.0);
    let mut p1 = x.clone();
    for k in 1..n {
        let kf = prec::float(bits, k as f64);
        let a = (kf.clone() * 2u32 + 1u32) * x * &p1;
        let b = kf.clone() * &p0;
        let next = (a - b) / (kf + 1u32);
        p0 = p1;
        p1 = next;
    }
    (p1, p0)
}

fn compute_gl(n: usize, bits: u32) -> GaussLegendre {
    // Newton from cosine initial guesses; quadratic convergence from f64 seeds
    let work = bits + 32;
    let stop = prec::pow10(work, -(prec::decimal_digits(work) as i32) + 2);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let pi = std::f64::consts::PI;
    for i in 0..n {
        let guess = (pi * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = prec::float(work, guess);
        let mut dp = prec::float(work, 1.0);
        for _ in 0..64 {
            let (pn, pnm1) = legendre_pair(n, &x, work);
            // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
            let x2m1 = x.clone().square() - 1u32;
            dp = (x.clone() * &pn - &pnm1) * prec::float(work, n as f64) / &x2m1;
            let step = pn / &dp;
            x -= &step;
            if step.abs() < stop {
                break;
            }
        }
        // w = 2 / ((1 - x^2) P'_n(x)^2)
        let w = prec::float(work, 2.0)
            / ((Float::with_val(work, 1u32) - x.clone().square()) * dp.square());
        nodes.push(prec::float(bits, 0.0) + &x);
        weights.push(prec::float(bits, 0.0) + &w);
    }
    GaussLegendre { nodes, weights }
}

/// Cached Gauss–Legendre rule for the given order and precision.
pub fn gauss_legendre(order: usize, bits: u32) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((order, bits))
        .or_insert_with(|| Arc::new(compute_gl(order, bits)))
        .clone()
}

pub struct VecIntegral {
    pub values: Vec<Complex>,
    /// accumulated panel-pair disagreement (absolute, sup over components)
    pub error: Float,
    pub panels: usize,
}

fn gl_panel(
    rule: &GaussLegendre,
    f: &mut dyn FnMut(&Float) -> Vec<Complex>,
    a: &Float,
    b: &Float,
    dim: usize,
    bits: u32,
) -> Vec<Complex> {
    let half = (b.clone() - a) / 2u32;
    let mid = (a.clone() + b) / 2u32;
    let mut acc = vec![prec::czero(bits); dim];
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let y = mid.clone() + half.clone() * x;
        let vals = f(&y);
        for (acc_k, v) in acc.iter_mut().zip(vals.into_iter()) {
            *acc_k += v * w;
        }
    }
    for v in acc.iter_mut() {
        *v *= &half;
    }
    acc
}

fn sup_dist(a: &[Complex], b: &[Complex], bits: u32) -> Float {
    let mut m = prec::float(bits, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        let d = prec::cabs(&(x.clone() - y));
        if d > m {
            m = d;
        }
    }
    m
}

/// Integrate a vector-valued integrand over [a, b], subdividing panels until
/// the whole-vs-halves disagreement per panel is below `target` scaled by the
/// panel's share of the interval.
pub fn integrate_adaptive(
    bits: u32,
    f: &mut dyn FnMut(&Float) -> Vec<Complex>,
    a: &Float,
    b: &Float,
    dim: usize,
    target: &Float,
    max_panels: usize,
) -> Result<VecIntegral> {
    let rule = gauss_legendre(GL_ORDER, bits);
    let total_width = b.clone() - a;
    // initial panels of width ≤ 1
    let segments = total_width.to_f64().ceil().max(1.0) as usize;
    let mut stack: Vec<(Float, Float, Vec<Complex>)> = Vec::new();
    for k in 0..segments {
        let x0 = a.clone() + total_width.clone() * prec::float(bits, k as f64 / segments as f64);
        let x1 = a.clone() + total_width.clone() * prec::float(bits, (k + 1) as f64 / segments as f64);
        let est = gl_panel(&rule, f, &x0, &x1, dim, bits);
        stack.push((x0, x1, est));
    }
    let mut values = vec![prec::czero(bits); dim];
    let mut error = prec::float(bits, 0.0);
    let mut panels = 0usize;
    while let Some((x0, x1, parent)) = stack.pop() {
        panels += 1;
        if panels > max_panels {
            return Err(Error::PrecisionUnreachable { best: error.to_f64() });
        }
        let mid = (x0.clone() + &x1) / 2u32;
        let left = gl_panel(&rule, f, &x0, &mid, dim, bits);
        let right = gl_panel(&rule, f, &mid, &x1, dim, bits);
        let mut sum = Vec::with_capacity(dim);
        for (l, r) in left.iter().zip(right.iter()) {
            sum.push(l.clone() + r);
        }
        let d = sup_dist(&parent, &sum, bits);
        let width = x1.clone() - &x0;
        let budget = target.clone() * width / &total_width;
        if d < budget {
            for (acc, v) in values.iter_mut().zip(sum.into_iter()) {
                *acc += v;
            }
            error += d;
        } else {
            stack.push((x0, mid.clone(), left));
            stack.push((mid, x1, right));
        }
    }
    Ok(VecIntegral { values, error, panels })
}
