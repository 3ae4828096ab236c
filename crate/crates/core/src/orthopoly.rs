//! Monic orthogonal polynomials of a trace, their three-term recurrence
//! (= short star-product coefficients), Hankel determinants, and the formal
//! Stieltjes transform with its polynomiality test.

use rug::ops::CompleteRound;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::poly::Poly;
use crate::prec;
use crate::series::{invert_twisted_difference, poly_div_at_inf, poly_times_tail, Tail};

/// Coefficients of p_{k+1}(x) = (x - b_k) p_k(x) - a_k p_{k-1}(x),
/// with norms ν_k = T(p_k²) and a_k = ν_k/ν_{k-1}.
#[derive(Debug, Clone)]
pub struct RecurrenceCoeffs {
    /// a_1 .. a_K
    pub a: Vec<Complex>,
    /// b_0 .. b_K
    pub b: Vec<Complex>,
    /// ν_0 .. ν_K
    pub norms: Vec<Complex>,
    pub bits: u32,
}

impl RecurrenceCoeffs {
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// a_k for k ≥ 1 (a_0 ≡ 0 by convention).
    pub fn a_k(&self, k: usize) -> Complex {
        if k == 0 {
            prec::czero(self.bits)
        } else {
            self.a[k - 1].clone()
        }
    }

    pub fn b_k(&self, k: usize) -> Complex {
        self.b[k].clone()
    }
}

/// Leading principal minors D_1..D_K of the Hankel matrix (M_{i+j}).
pub fn hankel_determinants(table: &MomentTable, depth: usize) -> Result<Vec<Complex>> {
    if depth == 0 {
        return Ok(vec![]);
    }
    table.require(2 * depth - 1)?;
    let bits = table.bits();
    let mut out = Vec::with_capacity(depth);
    for k in 1..=depth {
        let mut m: Vec<Vec<Complex>> = (0..k)
            .map(|i| (0..k).map(|j| table.value(i + j).clone()).collect())
            .collect();
        out.push(det_in_place(&mut m, bits));
    }
    Ok(out)
}

/// Hankel determinants of the y-variable measure, m_r = i^r M_r (real parts;
/// for equivariant data the imaginary parts vanish to the error estimate).
pub fn hankel_determinants_y(table: &MomentTable, depth: usize) -> Result<Vec<Float>> {
    if depth == 0 {
        return Ok(vec![]);
    }
    table.require(2 * depth - 1)?;
    let bits = table.bits();
    let mut out = Vec::with_capacity(depth);
    for k in 1..=depth {
        let mut m: Vec<Vec<Float>> = (0..k)
            .map(|i| (0..k).map(|j| table.y_moment(i + j)).collect())
            .collect();
        out.push(det_in_place_re(&mut m, bits));
    }
    Ok(out)
}

fn det_in_place(m: &mut [Vec<Complex>], bits: u32) -> Complex {
    let k = m.len();
    let mut det = prec::cone(bits);
    for col in 0..k {
        // partial pivot
        let mut piv = col;
        let mut best = prec::cabs(&m[col][col]);
        for row in col + 1..k {
            let a = prec::cabs(&m[row][col]);
            if a > best {
                best = a;
                piv = row;
            }
        }
        if best.is_zero() {
            return prec::czero(bits);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let d = m[col][col].clone();
        det *= &d;
        for row in col + 1..k {
            let f = m[row][col].clone() / &d;
            for j in col..k {
                let t = (&m[col][j] * &f).complete(bits);
                m[row][j] -= t;
            }
        }
    }
    det
}

fn det_in_place_re(m: &mut [Vec<Float>], bits: u32) -> Float {
    let k = m.len();
    let mut det = prec::float(bits, 1.0);
    for col in 0..k {
        let mut piv = col;
        let mut best = m[col][col].clone().abs();
        for row in col + 1..k {
            let a = m[row][col].clone().abs();
            if a > best {
                best = a;
                piv = row;
            }
        }
        if best.is_zero() {
            return prec::float(bits, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let d = m[col][col].clone();
        det *= &d;
        for row in col + 1..k {
            let f = m[row][col].clone() / &d;
            for j in col..k {
                let t = m[col][j].clone() * &f;
                m[row][j] -= t;
            }
        }
    }
    det
}

/// Apply the moment functional to a polynomial, also returning the absolute
/// sum of the terms (a cancellation gauge).
fn functional(table: &MomentTable, p: &Poly) -> Result<(Complex, Float)> {
    table.require(p.coeffs().len())?;
    let bits = table.bits();
    let mut acc = prec::czero(bits);
    let mut mag = prec::float(bits, 0.0);
    for (k, c) in p.coeffs().iter().enumerate() {
        let term = (c * table.value(k)).complete(bits);
        mag += prec::cabs(&term);
        acc += term;
    }
    Ok((acc, mag))
}

/// Stieltjes procedure: Gram–Schmidt on the moment functional. Needs moments
/// up to 2K+1. Errors with `DegenerateTrace` when some ν_k vanishes to
/// working precision (relative to the accumulated term magnitude).
pub fn recurrence_coeffs(table: &MomentTable, depth: usize) -> Result<RecurrenceCoeffs> {
    table.require(2 * depth + 2)?;
    let bits = table.bits();
    // cancellation threshold: a third of the significand digits gone is degenerate
    let tiny = Float::with_val(bits, 2).pow(-(bits as i32) / 3);
    let x = Poly::x(bits);
    let mut p_prev = Poly::one(bits);
    let mut nu_prev = table.value(0).clone();
    let mag0 = prec::cabs(&nu_prev);
    if prec::is_czero(&nu_prev) || prec::cabs(&nu_prev) < mag0.clone() * &tiny {
        return Err(Error::DegenerateTrace { k: 0 });
    }
    let b0 = table.value(1).clone() / &nu_prev;
    let mut norms = vec![nu_prev.clone()];
    let mut bs = vec![b0.clone()];
    let mut as_ = Vec::with_capacity(depth);
    let mut p_cur = Poly::new(bits, vec![-b0, prec::cone(bits)]);
    for k in 1..=depth {
        let sq = p_cur.mul(&p_cur);
        let (nu, mag) = functional(table, &sq)?;
        if prec::cabs(&nu) < mag * &tiny {
            return Err(Error::DegenerateTrace { k });
        }
        let a_k = nu.clone() / &nu_prev;
        let (xnum, _) = functional(table, &x.mul(&sq))?;
        let b_k = xnum / &nu;
        as_.push(a_k.clone());
        bs.push(b_k.clone());
        norms.push(nu.clone());
        let next = Poly::new(bits, vec![-b_k, prec::cone(bits)])
            .mul(&p_cur)
            .sub(&p_prev.scale(&a_k));
        p_prev = p_cur;
        p_cur = next;
        nu_prev = nu;
    }
    Ok(RecurrenceCoeffs { a: as_, b: bs, norms, bits })
}

/// p_k(x) by forward recurrence.
pub fn eval_orthopoly(rc: &RecurrenceCoeffs, k: usize, x: &Complex) -> Complex {
    assert!(k <= rc.depth() + 1, "k exceeds computed depth");
    let bits = rc.bits;
    if k == 0 {
        return prec::cone(bits);
    }
    let mut prev = prec::cone(bits);
    let mut cur = x.clone() - &rc.b[0];
    for j in 1..k {
        let next = (x.clone() - &rc.b[j]) * &cur - rc.a[j - 1].clone() * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficient form of p_k.
pub fn orthopoly_coeffs(rc: &RecurrenceCoeffs, k: usize) -> Poly {
    let bits = rc.bits;
    if k == 0 {
        return Poly::one(bits);
    }
    let mut prev = Poly::one(bits);
    let mut cur = Poly::new(bits, vec![-rc.b[0].clone(), prec::cone(bits)]);
    for j in 1..k {
        let next = Poly::new(bits, vec![-rc.b[j].clone(), prec::cone(bits)])
            .mul(&cur)
            .sub(&prev.scale(&rc.a[j - 1]));
        prev = cur;
        cur = next;
    }
    cur
}

/// Star-product row: z * z^k = z^{k+1} + b_k z^k + a_k z^{k-1}.
pub fn star_product_row(rc: &RecurrenceCoeffs, k: usize) -> (Complex, Complex, Complex) {
    (prec::cone(rc.bits), rc.b_k(k), rc.a_k(k))
}

/// Formal Stieltjes transform F_T(x) = Σ_{r≥0} M_r x^{-r-1}.
#[derive(Debug, Clone)]
pub struct StieltjesSeries {
    coeffs: Vec<Complex>,
    bits: u32,
}

impl StieltjesSeries {
    pub fn from_moments(table: &MomentTable, order: usize) -> Result<Self> {
        table.require(order + 1)?;
        Ok(StieltjesSeries {
            coeffs: table.values()[..=order].to_vec(),
            bits: table.bits(),
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn moment(&self, r: usize) -> &Complex {
        &self.coeffs[r]
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tail(&self) -> Tail {
        Tail::new(self.bits, self.coeffs.clone())
    }
}

/// L(x) = polynomial part of P(x)(F(x+1/2) - t·F(x-1/2)), together with the
/// sup of the first `tail_length` surviving negative-power coefficients.
/// For a genuine trace the tail vanishes; L is the trace's image under the
/// Stieltjes isomorphism (deg L < deg P, and < deg P - 1 when t = 1).
pub fn verify_stieltjes_polynomiality(
    f_series: &StieltjesSeries,
    p: &Poly,
    t: &Complex,
    tail_length: usize,
) -> Result<(Poly, Float)> {
    let bits = f_series.bits;
    let n = p.degree().ok_or_else(|| Error::Invalid("P must be nonzero".into()))?;
    if f_series.order() + 1 < n + tail_length {
        return Err(Error::InsufficientMoments {
            have: f_series.order() + 1,
            need: n + tail_length,
        });
    }
    let half = prec::cplx(bits, 0.5, 0.0);
    let tail = f_series.tail();
    let h = tail.shift(&half).sub(&tail.shift(&(-half)).scale(t));
    let (l, rest) = poly_times_tail(p, &h);
    let mut residual = prec::float(bits, 0.0);
    for c in rest.coeffs.iter().take(tail_length) {
        let a = prec::cabs(c);
        if a > residual {
            residual = a;
        }
    }
    Ok((l, residual))
}

/// Invert the Stieltjes isomorphism: recover M_0..M_{count-1} from (L, P, t)
/// by the triangular solve of the twisted difference operator.
pub fn reconstruct_moments(
    l: &Poly,
    p: &Poly,
    t: &Complex,
    t_is_one: bool,
    count: usize,
) -> Vec<Complex> {
    let h = poly_div_at_inf(l, p, count + 2);
    invert_twisted_difference(&h, t, t_is_one, count)
}

use rug::ops::Pow;
