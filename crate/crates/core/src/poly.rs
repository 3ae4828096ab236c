//! Dense complex polynomials in one variable, ascending coefficient order.
//!
//! Roots are the primary representation elsewhere in the crate; this type is
//! the coefficient form derived on demand. All coefficients of one polynomial
//! share a precision, fixed at construction.

use rug::ops::CompleteRound;
use rug::{Complex, Float, Integer};

use crate::prec;

#[derive(Debug, Clone)]
pub struct Poly {
    coeffs: Vec<Complex>,
    bits: u32,
}

impl Poly {
    /// Build from ascending coefficients; exact trailing zeros are trimmed.
    pub fn new(bits: u32, coeffs: Vec<Complex>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| prec::at_prec(bits, &c))
            .collect();
        let mut p = Poly { coeffs, bits };
        p.trim_exact();
        p
    }

    pub fn zero(bits: u32) -> Self {
        Poly { coeffs: vec![], bits }
    }

    pub fn constant(bits: u32, c: Complex) -> Self {
        Self::new(bits, vec![c])
    }

    pub fn one(bits: u32) -> Self {
        Self::constant(bits, prec::cone(bits))
    }

    /// The monomial `x`.
    pub fn x(bits: u32) -> Self {
        Self::new(bits, vec![prec::czero(bits), prec::cone(bits)])
    }

    pub fn from_f64(bits: u32, coeffs: &[f64]) -> Self {
        Self::new(bits, coeffs.iter().map(|&c| prec::cplx(bits, c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots (with multiplicity).
    pub fn from_roots<'a>(bits: u32, roots: impl IntoIterator<Item = &'a Complex>) -> Self {
        let mut p = Poly::one(bits);
        for r in roots {
            let lin = Poly::new(bits, vec![-prec::at_prec(bits, r), prec::cone(bits)]);
            p = p.mul(&lin);
        }
        p
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Lossless re-precision (widening keeps values exact).
    pub fn at_bits(&self, bits: u32) -> Poly {
        Poly::new(bits, self.coeffs.clone())
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Complex> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| prec::czero(self.bits))
    }

    fn trim_exact(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if prec::is_czero(c)) {
            self.coeffs.pop();
        }
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coeff_abs(&self) -> Float {
        let mut m = prec::float(self.bits, 0.0);
        for c in &self.coeffs {
            let a = prec::cabs(c);
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Drop leading coefficients smaller than `eps` times the largest one.
    /// Matrix products with exact cancellation leave tiny numerical ghosts
    /// in the top coefficients; degree-sensitive consumers trim them first.
    pub fn trimmed(&self, eps: f64) -> Poly {
        let scale = self.max_coeff_abs();
        if scale.is_zero() {
            return self.clone();
        }
        let thr = scale * prec::float(self.bits, eps);
        let mut coeffs = self.coeffs.clone();
        while matches!(coeffs.last(), Some(c) if prec::cabs(c) < thr) {
            coeffs.pop();
        }
        Poly { coeffs, bits: self.bits }
    }

    /// `trimmed` with a threshold of `2^{-drop_bits}` relative to the largest
    /// coefficient; usable beyond the f64 exponent range.
    pub fn trimmed_bits(&self, drop_bits: u32) -> Poly {
        let scale = self.max_coeff_abs();
        if scale.is_zero() {
            return self.clone();
        }
        let thr = scale * Float::with_val(self.bits, Float::i_exp(1, -(drop_bits as i32)));
        let mut coeffs = self.coeffs.clone();
        while matches!(coeffs.last(), Some(c) if prec::cabs(c) < thr) {
            coeffs.pop();
        }
        Poly { coeffs, bits: self.bits }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Poly::new(self.bits, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| (-c).complete(self.bits)).collect(),
            bits: self.bits,
        }
    }

    pub fn scale(&self, s: &Complex) -> Poly {
        Poly::new(
            self.bits,
            self.coeffs.iter().map(|c| (c * s).complete(self.bits)).collect(),
        )
    }

    pub fn scale_re(&self, s: &Float) -> Poly {
        self.scale(&Complex::with_val(self.bits, (s.clone(), Float::new(self.bits))))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.bits);
        }
        let mut out = vec![prec::czero(self.bits); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += (a * b).complete(self.bits);
            }
        }
        Poly::new(self.bits, out)
    }

    /// Multiply by `x^k`.
    pub fn mul_xk(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![prec::czero(self.bits); k];
        out.extend(self.coeffs.iter().cloned());
        Poly { coeffs: out, bits: self.bits }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Complex) -> Complex {
        let mut acc = prec::czero(self.bits);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.bits);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (c * Integer::from(k)).complete(self.bits))
            .collect();
        Poly::new(self.bits, out)
    }

    /// Taylor shift: the polynomial `x ↦ p(x + s)`.
    pub fn shift(&self, s: &Complex) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return self.clone();
        }
        // binomial expansion; exact integer binomials lifted to working precision
        let mut spow = vec![prec::cone(self.bits)];
        for _ in 1..n {
            let last = spow.last().unwrap().clone();
            spow.push(last * s);
        }
        let mut out = vec![prec::czero(self.bits); n];
        let mut binom_row: Vec<Integer> = vec![Integer::from(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            // binom_row holds C(i, 0..=i)
            for j in 0..=i {
                let term = (c * &binom_row[j]).complete(self.bits) * &spow[i - j];
                out[j] += term;
            }
            // advance Pascal row to C(i+1, ·)
            let mut next = vec![Integer::from(1)];
            for j in 1..=i {
                next.push(Integer::from(&binom_row[j - 1] + &binom_row[j]));
            }
            next.push(Integer::from(1));
            binom_row = next;
        }
        Poly::new(self.bits, out)
    }

    /// The polynomial `x ↦ p(-x)`.
    pub fn reflect(&self) -> Poly {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.clone() } else { (-c).complete(self.bits) })
            .collect();
        Poly { coeffs: out, bits: self.bits }
    }

    /// Long division: `self = q·div + r` with `deg r < deg div`.
    /// Panics on a zero divisor.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        let d = div.degree().expect("division by zero polynomial");
        let lead = div.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Poly::zero(self.bits), self.clone());
        }
        let qlen = rem.len() - d;
        let mut q = vec![prec::czero(self.bits); qlen];
        for k in (0..qlen).rev() {
            let coef = rem[k + d].clone() / &lead;
            for j in 0..=d {
                let t = (&div.coeffs[j] * &coef).complete(self.bits);
                rem[k + j] -= t;
            }
            q[k] = coef;
        }
        rem.truncate(d);
        (Poly::new(self.bits, q), Poly::new(self.bits, rem))
    }

    /// Order of vanishing at 0 under the given absolute threshold.
    pub fn order_at_zero(&self, eps: f64) -> usize {
        let scale = self.max_coeff_abs();
        if scale.is_zero() {
            return 0;
        }
        let thr = scale * prec::float(self.bits, eps);
        self.coeffs.iter().take_while(|c| prec::cabs(c) < thr).count()
    }

    /// Largest imaginary part over all coefficients.
    pub fn max_imag_abs(&self) -> Float {
        let mut m = prec::float(self.bits, 0.0);
        for c in &self.coeffs {
            let a = c.imag().clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Sup distance between coefficient vectors (padding with zeros).
    pub fn max_coeff_dist(&self, other: &Poly) -> Float {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut m = prec::float(self.bits, 0.0);
        for k in 0..n {
            let d = prec::cabs(&(self.coeff(k) - other.coeff(k)));
            if d > m {
                m = d;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{cplx, czero};

    const B: u32 = 128;

    fn p(coeffs: &[f64]) -> Poly {
        Poly::from_f64(B, coeffs)
    }

    #[test]
    fn mul_and_eval() {
        let a = p(&[1.0, 2.0]); // 1 + 2x
        let b = p(&[-3.0, 1.0]); // -3 + x
        let c = a.mul(&b); // -3 - 5x + 2x^2
        assert_eq!(c.degree(), Some(2));
        let v = c.eval(&cplx(B, 2.0, 0.0));
        assert_eq!(v, cplx(B, -5.0, 0.0));
    }

    #[test]
    fn shift_matches_eval() {
        let a = p(&[1.0, -4.0, 0.5, 2.0]);
        let s = cplx(B, 0.5, -1.25);
        let sh = a.shift(&s);
        for re in [-1.0, 0.3, 2.0] {
            let x = cplx(B, re, 0.7);
            let lhs = sh.eval(&x);
            let rhs = a.eval(&(x + &s));
            let d = prec::cabs(&(lhs - rhs));
            assert!(d < prec::float(B, 1e-30), "dist {d}");
        }
    }

    #[test]
    fn divrem_roundtrip() {
        let a = p(&[2.0, 0.0, -1.0, 3.0, 1.0]);
        let d = p(&[1.0, 1.0, 2.0]);
        let (q, r) = a.divrem(&d);
        let back = q.mul(&d).add(&r);
        assert!(back.max_coeff_dist(&a) < prec::float(B, 1e-30));
        assert!(r.degree().unwrap_or(0) < d.degree().unwrap());
    }

    #[test]
    fn from_roots_monic() {
        let roots = [cplx(B, 0.0, 1.0), cplx(B, 0.0, -1.0)];
        let q = Poly::from_roots(B, roots.iter());
        // (x - i)(x + i) = x^2 + 1
        assert!(q.max_coeff_dist(&p(&[1.0, 0.0, 1.0])) < prec::float(B, 1e-30));
    }

    #[test]
    fn zero_polynomial_degree() {
        let z = Poly::new(B, vec![czero(B), czero(B)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn order_at_zero_detects() {
        let a = p(&[0.0, 0.0, 3.0, 1.0]);
        assert_eq!(a.order_at_zero(1e-30), 2);
    }
}
