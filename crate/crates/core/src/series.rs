//! Formal series at infinity: tails Σ_{k≥0} a_k x^{-k-1} and their interplay
//! with polynomials. This is the engine behind the Stieltjes transform,
//! the polynomiality check and the Padé layer.

use rug::ops::CompleteRound;
use rug::{Complex, Integer};

use crate::poly::Poly;
use crate::prec;

/// Σ_{k≥0} coeffs[k] · x^{-k-1}, truncated after `coeffs.len()` terms.
#[derive(Debug, Clone)]
pub struct Tail {
    pub coeffs: Vec<Complex>,
    pub bits: u32,
}

impl Tail {
    pub fn new(bits: u32, coeffs: Vec<Complex>) -> Self {
        Tail { coeffs, bits }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// F(x+s): (x+s)^{-r-1} = Σ_j (-1)^j C(r+j, j) s^j x^{-r-1-j}.
    /// The truncation order is preserved (entries stay exact to that order).
    pub fn shift(&self, s: &Complex) -> Tail {
        let n = self.coeffs.len();
        let bits = self.bits;
        let mut out = vec![prec::czero(bits); n];
        // powers of s
        let mut spow = vec![prec::cone(bits)];
        for _ in 1..n {
            spow.push(spow.last().unwrap().clone() * s);
        }
        for (k, o) in out.iter_mut().enumerate() {
            // contribution of a_r with j = k - r: sign (-1)^{k-r} C(k, k-r)
            for r in 0..=k {
                let j = k - r;
                let binom = Integer::from(k).binomial(j as u32);
                let term = (&self.coeffs[r] * &binom).complete(bits) * &spow[j];
                if j % 2 == 0 {
                    *o += term;
                } else {
                    *o -= term;
                }
            }
        }
        Tail::new(bits, out)
    }

    pub fn sub(&self, other: &Tail) -> Tail {
        let n = self.coeffs.len().min(other.coeffs.len());
        let out = (0..n)
            .map(|k| self.coeffs[k].clone() - &other.coeffs[k])
            .collect();
        Tail::new(self.bits, out)
    }

    pub fn scale(&self, s: &Complex) -> Tail {
        Tail::new(
            self.bits,
            self.coeffs.iter().map(|c| (c * s).complete(self.bits)).collect(),
        )
    }
}

/// P(x) · T(x) split into its polynomial part and its tail part.
/// With deg P = n and T exact to order m, the returned tail is exact to
/// order m - n (entries beyond that are dropped).
pub fn poly_times_tail(p: &Poly, t: &Tail) -> (Poly, Tail) {
    let bits = t.bits;
    if p.is_zero() {
        return (Poly::zero(bits), Tail::new(bits, vec![]));
    }
    let n = p.degree().unwrap();
    let m = t.coeffs.len();
    // polynomial part: coefficient of x^d, 0 ≤ d ≤ n-1: Σ_k p_{d+k+1} a_k
    let mut poly_part = vec![prec::czero(bits); n.max(1)];
    for d in 0..n {
        let mut acc = prec::czero(bits);
        for k in 0..m.min(n - d) {
            acc += (&p.coeffs()[d + k + 1] * &t.coeffs[k]).complete(bits);
        }
        poly_part[d] = acc;
    }
    // tail part: coefficient of x^{-l-1}: Σ_j p_j a_{j+l}, exact for l ≤ m-1-n
    let tail_len = (m as isize - n as isize).max(0) as usize;
    let mut tail = vec![prec::czero(bits); tail_len];
    for (l, o) in tail.iter_mut().enumerate() {
        let mut acc = prec::czero(bits);
        for (j, pj) in p.coeffs().iter().enumerate() {
            acc += (pj * &t.coeffs[j + l]).complete(bits);
        }
        *o = acc;
    }
    (Poly::new(bits, poly_part), Tail::new(bits, tail))
}

/// Expand L(x)/P(x) at infinity as a tail (requires deg L < deg P).
pub fn poly_div_at_inf(l: &Poly, p: &Poly, order: usize) -> Tail {
    let bits = p.bits();
    let n = p.degree().expect("division by zero polynomial");
    assert!(
        l.degree().map_or(true, |dl| dl < n),
        "poly_div_at_inf needs deg L < deg P"
    );
    let lead = p.leading().unwrap().clone();
    // long division in descending powers: maintain the running remainder
    // coefficients of x^{n-1-k} for k = 0,1,...
    let mut rem = vec![prec::czero(bits); order + n + 1];
    for (j, c) in l.coeffs().iter().enumerate() {
        // x^j sits at descending index (n-1) - j
        rem[n - 1 - j] = c.clone();
    }
    let mut out = Vec::with_capacity(order);
    for k in 0..order {
        let q = rem[k].clone() / &lead;
        // subtract q·x^{-k-1}·P
        for i in 0..=n {
            // P coefficient of x^{n-i} lands at descending index k+i
            let t = (&p.coeffs()[n - i] * &q).complete(bits);
            rem[k + i] -= t;
        }
        out.push(q);
    }
    Tail::new(bits, out)
}

/// Solve H = F(x+1/2) - t·F(x-1/2) for the tail F given the tail H.
/// The map acts triangularly with diagonal (1-t) for t ≠ 1 and first
/// subdiagonal -(r+1) for t = 1; `t_is_one` selects the branch.
pub fn invert_twisted_difference(h: &Tail, t: &Complex, t_is_one: bool, count: usize) -> Vec<Complex> {
    let bits = h.bits;
    let half = prec::cplx(bits, 0.5, 0.0);
    let mut f = Vec::with_capacity(count);
    // A_{k,j} = C(k,j)·(1/2)^{k-j}·((-1)^{k-j} - t): x^{-j-1} contributes to x^{-k-1}
    let a = |k: usize, j: usize| -> Complex {
        let d = k - j;
        let binom = Integer::from(k).binomial(d as u32);
        let sp = half.clone().pow(d as u32);
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        let factor = prec::cplx(bits, sign, 0.0) - t;
        sp * &binom * factor
    };
    if !t_is_one {
        for j in 0..count {
            // h_j = Σ_{i≤j} A_{j,i} f_i
            let mut acc = h.coeffs[j].clone();
            for (i, fi) in f.iter().enumerate().take(j) {
                acc -= a(j, i) * fi;
            }
            f.push(acc / a(j, j));
        }
    } else {
        // diagonal vanishes; h_{j+1} determines f_j
        for j in 0..count {
            let mut acc = h.coeffs[j + 1].clone();
            for (i, fi) in f.iter().enumerate().take(j) {
                acc -= a(j + 1, i) * fi;
            }
            f.push(acc / a(j + 1, j));
        }
    }
    f
}

use rug::ops::Pow;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{cabs, cplx, czero, float};

    const B: u32 = 192;

    #[test]
    fn shift_matches_numeric_evaluation() {
        // F = 2/x + 3/x^2 - 1/x^3, compare F(x+s) series against direct values
        let t = Tail::new(B, vec![cplx(B, 2.0, 0.0), cplx(B, 3.0, 0.0), cplx(B, -1.0, 0.0)]);
        let s = cplx(B, 0.5, 0.0);
        let sh = t.shift(&s);
        let x = cplx(B, 40.0, 3.0);
        let eval = |tt: &Tail, x: &Complex| {
            let mut acc = czero(B);
            let mut xp = x.clone().recip();
            for c in &tt.coeffs {
                acc += (c * &xp).complete(B);
                xp /= x;
            }
            acc
        };
        let lhs = eval(&sh, &x);
        let rhs = eval(&t, &(x + s));
        // agreement up to the truncation order ~ |x|^{-4}
        assert!(cabs(&(lhs - rhs)) < float(B, 1e-5));
    }

    #[test]
    fn poly_times_tail_splits() {
        // P = x^2 - 1, T = 1/x + 2/x^2 + 3/x^3 + 4/x^4
        let p = Poly::from_f64(B, &[-1.0, 0.0, 1.0]);
        let t = Tail::new(
            B,
            (1..=4).map(|k| cplx(B, k as f64, 0.0)).collect(),
        );
        let (q, tail) = poly_times_tail(&p, &t);
        // product = x + 2 + (3-1)/x + (4-2)/x^2 + ...
        assert!(q.max_coeff_dist(&Poly::from_f64(B, &[2.0, 1.0])) < float(B, 1e-40));
        assert_eq!(tail.order(), 2);
        assert!(cabs(&(tail.coeffs[0].clone() - cplx(B, 2.0, 0.0))) < float(B, 1e-40));
        assert!(cabs(&(tail.coeffs[1].clone() - cplx(B, 2.0, 0.0))) < float(B, 1e-40));
    }

    #[test]
    fn div_at_inf_inverts_multiplication() {
        let p = Poly::from_f64(B, &[1.0, -0.5, 2.0, 1.0]);
        let l = Poly::from_f64(B, &[3.0, 1.0, -2.0]);
        let tail = poly_div_at_inf(&l, &p, 12);
        let (q, _t2) = poly_times_tail(&p, &tail);
        // P·(L/P) must reproduce L as its polynomial part
        assert!(q.max_coeff_dist(&l) < float(B, 1e-40));
    }

    #[test]
    fn twisted_difference_roundtrip() {
        // forward: H_k from F via shift; inverse must reproduce F
        let f = Tail::new(B, vec![
            cplx(B, 0.7, 0.1),
            cplx(B, -1.3, 0.0),
            cplx(B, 0.2, -2.0),
            cplx(B, 1.0, 1.0),
            cplx(B, 0.0, 0.3),
            cplx(B, 2.0, 0.0),
        ]);
        let half = cplx(B, 0.5, 0.0);
        for (t, t_is_one) in [(cplx(B, 0.0, 1.0), false), (cplx(B, 1.0, 0.0), true)] {
            let h = f.shift(&half).sub(&f.shift(&(-half.clone())).scale(&t));
            let back = invert_twisted_difference(&h, &t, t_is_one, 4);
            for (k, b) in back.iter().enumerate() {
                assert!(
                    cabs(&(b.clone() - &f.coeffs[k])) < float(B, 1e-40),
                    "k={k} t_is_one={t_is_one}"
                );
            }
        }
    }
}
