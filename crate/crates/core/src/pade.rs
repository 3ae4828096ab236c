//! Padé approximants of the Stieltjes series and the Lax-type difference
//! matrices A_n with P(x)·A_n polynomial and det A_n = t^{-1}.
//!
//! All rational identities are checked in cleared polynomial form; sampling
//! is used only for the difference equation itself.

use rug::ops::CompleteRound;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::orthopoly::StieltjesSeries;
use crate::poly::Poly;
use crate::prec;
use crate::series::poly_times_tail;

/// 2×2 rational matrix: four numerator polynomials over one denominator.
#[derive(Debug, Clone)]
pub struct RationalMatrix2 {
    pub num: [[Poly; 2]; 2],
    pub den: Poly,
    pub bits: u32,
}

impl RationalMatrix2 {
    /// Entry values at a sample point.
    pub fn eval(&self, x: &Complex) -> Result<[[Complex; 2]; 2]> {
        let d = self.den.eval(x);
        let scale = self.den.max_coeff_abs();
        if prec::cabs(&d) < scale * prec::pow10(self.bits, -(prec::decimal_digits(self.bits) as i32) + 8)
        {
            return Err(Error::SampleAtPole);
        }
        Ok([
            [self.num[0][0].eval(x) / &d, self.num[0][1].eval(x) / &d],
            [self.num[1][0].eval(x) / &d, self.num[1][1].eval(x) / &d],
        ])
    }

    /// Sup-norm of the coefficients of num00·num11 - num01·num10 - t^{-1}·den²,
    /// relative to the scale of t^{-1}·den². Zero means det = t^{-1} exactly.
    pub fn det_residual(&self, t: &Complex) -> Float {
        let lhs = self.num[0][0]
            .mul(&self.num[1][1])
            .sub(&self.num[0][1].mul(&self.num[1][0]));
        let rhs = self.den.mul(&self.den).scale(&t.clone().recip());
        let scale = rhs.max_coeff_abs();
        lhs.sub(&rhs).max_coeff_abs() / scale
    }

    /// 1/x-expansion of entry (i,j) at infinity: coefficients of
    /// x^0, x^{-1}, ..., x^{-(terms-1)}, after trimming numerical ghost
    /// degrees from the numerator.
    pub fn entry_series(&self, i: usize, j: usize, terms: usize) -> Vec<Complex> {
        let bits = self.bits;
        let num = self.num[i][j].trimmed_bits(bits / 3);
        let den = &self.den;
        let mut out = vec![prec::czero(bits); terms];
        if num.is_zero() {
            return out;
        }
        let dn = num.degree().unwrap() as isize;
        let dd = den.degree().unwrap() as isize;
        let top = dn - dd; // leading power of the quotient
        debug_assert!(top <= 0, "entry grows at infinity");
        // long division in descending powers
        let steps = terms as isize + top.max(0) + 8;
        let lead = den.leading().unwrap().clone();
        let mut rem: Vec<Complex> = num.coeffs().iter().rev().cloned().collect();
        rem.resize(rem.len() + steps as usize, prec::czero(bits));
        let dcoeffs: Vec<Complex> = den.coeffs().iter().rev().cloned().collect();
        for k in 0..steps as usize {
            let q = rem[k].clone() / &lead;
            for (idx, dc) in dcoeffs.iter().enumerate() {
                let t = (dc * &q).complete(bits);
                rem[k + idx] -= t;
            }
            let power = top - k as isize;
            if power <= 0 && (-power) < terms as isize {
                out[(-power) as usize] = q;
            }
        }
        out
    }
}

/// Monic denominator p_n of the n-th Padé approximant of F: solves the
/// Hankel system Σ_j c_j M_{m+j} = -M_{m+n}, m = 0..n-1.
pub fn pade_denominator(f: &StieltjesSeries, n: usize) -> Result<Poly> {
    let bits = f.bits();
    if n == 0 {
        return Ok(Poly::one(bits));
    }
    if f.order() + 1 < 2 * n {
        return Err(Error::InsufficientMoments { have: f.order() + 1, need: 2 * n });
    }
    let mut m: Vec<Vec<Complex>> = (0..n)
        .map(|i| (0..n).map(|j| f.moment(i + j).clone()).collect())
        .collect();
    let mut rhs: Vec<Complex> = (0..n).map(|i| (-f.moment(i + n)).complete(bits)).collect();
    solve_in_place(&mut m, &mut rhs, bits).map_err(|_| Error::DegeneratePade { n })?;
    rhs.push(prec::cone(bits));
    Ok(Poly::new(bits, rhs))
}

fn solve_in_place(
    m: &mut [Vec<Complex>],
    rhs: &mut [Complex],
    bits: u32,
) -> std::result::Result<(), ()> {
    let k = m.len();
    let mut scale = prec::float(bits, 0.0);
    for row in m.iter() {
        for v in row {
            let a = prec::cabs(v);
            if a > scale {
                scale = a;
            }
        }
    }
    if scale.is_zero() {
        return Err(());
    }
    let tiny = scale * Float::with_val(bits, Float::i_exp(1, -(bits as i32) * 2 / 3));
    for col in 0..k {
        let mut piv = col;
        let mut best = prec::cabs(&m[col][col]);
        for row in col + 1..k {
            let a = prec::cabs(&m[row][col]);
            if a > best {
                best = a;
                piv = row;
            }
        }
        if best < tiny {
            return Err(());
        }
        if piv != col {
            m.swap(piv, col);
            rhs.swap(piv, col);
        }
        let d = m[col][col].clone();
        for row in col + 1..k {
            let f = m[row][col].clone() / &d;
            for j in col..k {
                let t = (&m[col][j] * &f).complete(bits);
                m[row][j] -= t;
            }
            let t = (&rhs[col] * &f).complete(bits);
            rhs[row] -= t;
        }
    }
    for col in (0..k).rev() {
        let mut acc = rhs[col].clone();
        for j in col + 1..k {
            let t = (&m[col][j] * &rhs[j]).complete(bits);
            acc -= t;
        }
        rhs[col] = acc / &m[col][col];
    }
    Ok(())
}

/// q_n(x) = T((p_n(x) - p_n(z))/(x - z)) = Σ_m c_m Σ_{i<m} x^i M_{m-1-i}.
pub fn pade_numerator(f: &StieltjesSeries, p_n: &Poly) -> Poly {
    let bits = f.bits();
    let deg = match p_n.degree() {
        None | Some(0) => return Poly::zero(bits),
        Some(d) => d,
    };
    let mut out = vec![prec::czero(bits); deg];
    for m in 1..=deg {
        for i in 0..m {
            out[i] += (&p_n.coeffs()[m] * f.moment(m - 1 - i)).complete(bits);
        }
    }
    Poly::new(bits, out)
}

/// The Lax matrix in cleared form:
/// P·A_n = ν_{n-1}^{-1} · [p_n⁺ -q_n⁺; p_{n-1}⁺ -q_{n-1}⁺]
///         · [P t^{-1}L; 0 t^{-1}P] · [-q_{n-1}⁻ q_n⁻; -p_{n-1}⁻ p_n⁻],
/// superscripts denoting argument shifts by ±1/2.
#[allow(clippy::too_many_arguments)]
pub fn lax_matrix(
    p_n: &Poly,
    p_nm1: &Poly,
    q_n: &Poly,
    q_nm1: &Poly,
    p: &Poly,
    t: &Complex,
    l: &Poly,
    nu_nm1: &Complex,
    k_index: usize,
) -> Result<RationalMatrix2> {
    let bits = p.bits();
    if prec::is_czero(nu_nm1) {
        return Err(Error::ZeroNorm { k: k_index });
    }
    let half = prec::cplx(bits, 0.5, 0.0);
    let sp = |poly: &Poly| poly.shift(&half);
    let sm = |poly: &Poly| poly.shift(&(-half.clone()));
    let t_inv = t.clone().recip();
    let m1 = [
        [sp(p_n), sp(q_n).neg()],
        [sp(p_nm1), sp(q_nm1).neg()],
    ];
    let mid = [
        [p.clone(), l.scale(&t_inv)],
        [Poly::zero(bits), p.scale(&t_inv)],
    ];
    let m3 = [
        [sm(q_nm1).neg(), sm(q_n)],
        [sm(p_nm1).neg(), sm(p_n)],
    ];
    let prod = mat_mul(&mat_mul(&m1, &mid), &m3);
    let inv_nu = nu_nm1.clone().recip();
    let num = [
        [prod[0][0].scale(&inv_nu), prod[0][1].scale(&inv_nu)],
        [prod[1][0].scale(&inv_nu), prod[1][1].scale(&inv_nu)],
    ];
    Ok(RationalMatrix2 { num, den: p.clone(), bits })
}

fn mat_mul(a: &[[Poly; 2]; 2], b: &[[Poly; 2]; 2]) -> [[Poly; 2]; 2] {
    let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Max relative residual of
/// (p_n(x+1/2), p_{n-1}(x+1/2))ᵀ = A_n(x) (p_n(x-1/2), p_{n-1}(x-1/2))ᵀ
/// over the sample points.
pub fn verify_difference_equation(
    a: &RationalMatrix2,
    p_n: &Poly,
    p_nm1: &Poly,
    samples: &[Complex],
) -> Result<Float> {
    let bits = a.bits;
    let half = prec::cplx(bits, 0.5, 0.0);
    let mut worst = prec::float(bits, 0.0);
    for x in samples {
        let m = a.eval(x)?;
        let xm = x.clone() - &half;
        let xp = x.clone() + &half;
        let vm = [p_n.eval(&xm), p_nm1.eval(&xm)];
        let vp = [p_n.eval(&xp), p_nm1.eval(&xp)];
        for i in 0..2 {
            let pred = m[i][0].clone() * &vm[0] + m[i][1].clone() * &vm[1];
            let mag = prec::cabs(&vp[i]).max(&prec::float(bits, 1.0));
            let r = prec::cabs(&(pred - &vp[i])) / mag;
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}

/// First 1/x-expansion coefficients of all four entries (x^0, x^{-1}, x^{-2}).
#[derive(Debug, Clone)]
pub struct LaxAsymptotics {
    pub c11: Vec<Complex>,
    pub c12: Vec<Complex>,
    pub c21: Vec<Complex>,
    pub c22: Vec<Complex>,
}

pub fn asymptotic_extract(a: &RationalMatrix2) -> LaxAsymptotics {
    LaxAsymptotics {
        c11: a.entry_series(0, 0, 3),
        c12: a.entry_series(0, 1, 3),
        c21: a.entry_series(1, 0, 3),
        c22: a.entry_series(1, 1, 3),
    }
}

/// Cleared-form residual of the transfer identity
/// A_{n+1}(x)·[x-1/2-b_n, -a_n; 1, 0] = [x+1/2-b_n, -a_n; 1, 0]·A_n(x).
pub fn transfer_consistency_residual(
    a_n: &RationalMatrix2,
    a_np1: &RationalMatrix2,
    a_coeff: &Complex,
    b_coeff: &Complex,
) -> Float {
    let bits = a_n.bits;
    let transfer = |shift: f64| -> [[Poly; 2]; 2] {
        [
            [
                Poly::new(
                    bits,
                    vec![prec::cplx(bits, shift, 0.0) - b_coeff, prec::cone(bits)],
                ),
                Poly::constant(bits, (-a_coeff).complete(bits)),
            ],
            [Poly::one(bits), Poly::zero(bits)],
        ]
    };
    let lhs = mat_mul(&a_np1.num, &transfer(-0.5));
    let rhs = mat_mul(&transfer(0.5), &a_n.num);
    let mut worst = prec::float(bits, 0.0);
    let mut scale = prec::float(bits, 1.0);
    for i in 0..2 {
        for j in 0..2 {
            let s = rhs[i][j].max_coeff_abs();
            if s > scale {
                scale = s;
            }
            let d = lhs[i][j].max_coeff_dist(&rhs[i][j]);
            if d > worst {
                worst = d;
            }
        }
    }
    worst / scale
}

/// Y_n bookkeeping checks used by tests and the CLI verifier:
/// det(Y_n) = q_n·p_{n-1} - p_n·q_{n-1} must equal the constant ν_{n-1}.
pub fn y_det_residual(
    p_n: &Poly,
    p_nm1: &Poly,
    q_n: &Poly,
    q_nm1: &Poly,
    nu_nm1: &Complex,
) -> Float {
    let det = q_n.mul(p_nm1).sub(&p_n.mul(q_nm1));
    let diff = det.sub(&Poly::constant(p_n.bits(), nu_nm1.clone()));
    diff.max_coeff_abs() / prec::cabs(nu_nm1)
}

/// Y_n(x)_{12} = p_n·F - q_n: its tail must start at ν_n·x^{-n-1}.
/// Returns (max |coeff| of x^{-1}..x^{-n}, the coefficient at x^{-n-1}).
pub fn y12_tail(f: &StieltjesSeries, p_n: &Poly, q_n: &Poly) -> (Float, Complex) {
    let bits = f.bits();
    let (poly_part, tail) = poly_times_tail(p_n, &f.tail());
    debug_assert!(poly_part.sub(q_n).max_coeff_abs() < prec::pow10(bits, -10) || q_n.is_zero());
    let n = p_n.degree().unwrap_or(0);
    let mut worst = prec::float(bits, 0.0);
    for c in tail.coeffs.iter().take(n) {
        let a = prec::cabs(c);
        if a > worst {
            worst = a;
        }
    }
    let lead = tail.coeffs.get(n).cloned().unwrap_or_else(|| prec::czero(bits));
    (worst, lead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moment_table, PrecisionConfig};
    use crate::orthopoly::{orthopoly_coeffs, recurrence_coeffs, verify_stieltjes_polynomiality};
    use crate::params::QuantizationSpec;
    use crate::prec::{cabs, cplx, float};
    use crate::weight::build_weight;

    const B: u32 = 256;

    struct Setup {
        spec: QuantizationSpec,
        f: StieltjesSeries,
        rc: crate::orthopoly::RecurrenceCoeffs,
        l: Poly,
        t: Complex,
    }

    fn setup(roots: &[(f64, f64)], c: f64, g: &[f64], depth: usize) -> Setup {
        let spec = QuantizationSpec::from_f64(B, roots, c, -1).unwrap();
        let w = build_weight(&spec, &Poly::from_f64(B, g), &[]).unwrap();
        let order = (2 * depth + 6).max(26);
        let table = moment_table(&w, order, &PrecisionConfig::with_bits(B)).unwrap();
        let f = StieltjesSeries::from_moments(&table, order).unwrap();
        let rc = recurrence_coeffs(&table, depth).unwrap();
        let t = spec.derive_constants().t;
        let (l, _) = verify_stieltjes_polynomiality(&f, &spec.p_poly(), &t, 4).unwrap();
        let l = l.trimmed_bits(B / 3);
        Setup { spec, f, rc, l, t }
    }

    fn mp_setup() -> Setup {
        setup(&[(0.0, 0.0)], 0.25, &[1.0], 9)
    }

    #[test]
    fn pade_denominator_matches_orthopoly() {
        let s = mp_setup();
        for n in 0..=8usize {
            let pade = pade_denominator(&s.f, n).unwrap();
            let gs = orthopoly_coeffs(&s.rc, n);
            let d = pade.max_coeff_dist(&gs);
            assert!(d < prec::pow10(B, -25), "n={n}: dist {d}");
        }
    }

    #[test]
    fn pade_numerator_tail_condition() {
        let s = mp_setup();
        for n in [1usize, 3, 5] {
            let p_n = pade_denominator(&s.f, n).unwrap();
            let q_n = pade_numerator(&s.f, &p_n);
            // p_n·F - q_n = O(x^{-n-1}): first n tail coefficients vanish
            let (worst, lead) = y12_tail(&s.f, &p_n, &q_n);
            assert!(worst < prec::pow10(B, -30), "n={n} tail {worst}");
            // and the x^{-n-1} coefficient is ν_n
            let rel = cabs(&(lead.clone() - &s.rc.norms[n])) / cabs(&s.rc.norms[n]);
            assert!(rel < prec::pow10(B, -20), "n={n} lead {lead}");
        }
        // n=1 numerator is the constant M_0
        let p1 = pade_denominator(&s.f, 1).unwrap();
        let q1 = pade_numerator(&s.f, &p1);
        assert_eq!(q1.degree(), Some(0));
        assert!(cabs(&(q1.coeff(0) - s.f.moment(0))) < prec::pow10(B, -40));
    }

    fn lax_for(s: &Setup, n: usize) -> RationalMatrix2 {
        let p_n = pade_denominator(&s.f, n).unwrap();
        let p_nm1 = pade_denominator(&s.f, n - 1).unwrap();
        let q_n = pade_numerator(&s.f, &p_n);
        let q_nm1 = pade_numerator(&s.f, &p_nm1);
        lax_matrix(
            &p_n,
            &p_nm1,
            &q_n,
            &q_nm1,
            &s.spec.p_poly(),
            &s.t,
            &s.l,
            &s.rc.norms[n - 1],
            n - 1,
        )
        .unwrap()
    }

    #[test]
    fn lax_determinant_and_difference_equation() {
        let s = mp_setup();
        for n in [1usize, 3, 6] {
            let a = lax_for(&s, n);
            let det_res = a.det_residual(&s.t);
            assert!(det_res < prec::pow10(B, -30), "n={n} det residual {det_res}");
            let p_n = orthopoly_coeffs(&s.rc, n);
            let p_nm1 = orthopoly_coeffs(&s.rc, n - 1);
            let samples: Vec<Complex> = (0..12)
                .map(|k| cplx(B, 0.21 * k as f64 - 1.1, 0.13 * k as f64 - 0.7))
                .collect();
            let res = verify_difference_equation(&a, &p_n, &p_nm1, &samples).unwrap();
            assert!(res < prec::pow10(B, -25), "n={n} diff-eq residual {res}");
        }
    }

    #[test]
    fn lax_asymptotics_match_displayed_patterns() {
        let s = mp_setup();
        for n in [1usize, 4] {
            let a = lax_for(&s, n);
            let asy = asymptotic_extract(&a);
            let t_inv = s.t.clone().recip();
            let one_minus = prec::cone(B) - &t_inv;
            // A11 = 1 + n/x, A21 = (1-t^{-1})/x, A12 = -(1-t^{-1})a_n/x,
            // A22 = t^{-1}(1 - n/x)
            assert!(cabs(&(asy.c11[0].clone() - prec::cone(B))) < prec::pow10(B, -25));
            assert!(cabs(&(asy.c11[1].clone() - cplx(B, n as f64, 0.0))) < prec::pow10(B, -25));
            assert!(cabs(&(asy.c21[1].clone() - &one_minus)) < prec::pow10(B, -25));
            let expect12 = -(one_minus.clone() * s.rc.a_k(n));
            assert!(cabs(&(asy.c12[1].clone() - &expect12)) < prec::pow10(B, -25));
            assert!(cabs(&(asy.c22[0].clone() - &t_inv)) < prec::pow10(B, -25));
            let expect22 = -(t_inv.clone() * cplx(B, n as f64, 0.0));
            assert!(cabs(&(asy.c22[1].clone() - &expect22)) < prec::pow10(B, -25));
            // ratio identity c12/c21 = -a_n
            let ratio = asy.c12[1].clone() / &asy.c21[1];
            assert!(cabs(&(ratio + s.rc.a_k(n))) < prec::pow10(B, -22));
        }
    }

    #[test]
    fn lax_t1_refined_asymptotics() {
        // n=2 continuous-Hahn family has t = 1: entry 21 goes like (2n-1)/x²,
        // entry 12 like -(2n+1) a_n/x²
        let s = setup(&[(0.0, 0.3), (0.0, -0.3)], 0.0, &[0.0, 1.0], 7);
        for n in [2usize, 5] {
            let a = lax_for(&s, n);
            assert!(a.det_residual(&s.t) < prec::pow10(B, -30));
            let asy = asymptotic_extract(&a);
            assert!(cabs(&asy.c21[1]) < prec::pow10(B, -25), "c21 1/x term should vanish");
            let expect21 = cplx(B, (2 * n) as f64 - 1.0, 0.0);
            assert!(cabs(&(asy.c21[2].clone() - &expect21)) < prec::pow10(B, -22));
            assert!(cabs(&asy.c12[1]) < prec::pow10(B, -22));
            let expect12 = -(cplx(B, (2 * n) as f64 + 1.0, 0.0) * s.rc.a_k(n));
            assert!(cabs(&(asy.c12[2].clone() - &expect12)) < prec::pow10(B, -20));
        }
    }

    #[test]
    fn transfer_identity_links_consecutive_matrices() {
        let s = mp_setup();
        for n in [1usize, 4] {
            let a_n = lax_for(&s, n);
            let a_np1 = lax_for(&s, n + 1);
            let res = transfer_consistency_residual(&a_n, &a_np1, &s.rc.a_k(n), &s.rc.b_k(n));
            assert!(res < prec::pow10(B, -25), "n={n} transfer residual {res}");
        }
    }

    #[test]
    fn y_determinant_is_norm() {
        let s = mp_setup();
        for n in [1usize, 2, 5] {
            let p_n = pade_denominator(&s.f, n).unwrap();
            let p_nm1 = pade_denominator(&s.f, n - 1).unwrap();
            let q_n = pade_numerator(&s.f, &p_n);
            let q_nm1 = pade_numerator(&s.f, &p_nm1);
            let r = y_det_residual(&p_n, &p_nm1, &q_n, &q_nm1, &s.rc.norms[n - 1]);
            assert!(r < prec::pow10(B, -25), "n={n}: {r}");
        }
    }

    #[test]
    fn negative_control_perturbed_recurrence() {
        let s = mp_setup();
        let n = 3usize;
        let a = lax_for(&s, n);
        let p_n = orthopoly_coeffs(&s.rc, n);
        let p_nm1 = orthopoly_coeffs(&s.rc, n - 1);
        let samples: Vec<Complex> = (0..8)
            .map(|k| cplx(B, 0.3 * k as f64 - 1.0, 0.2))
            .collect();
        // perturb p_n: the difference equation must fail visibly
        let bad = p_n.add(&Poly::from_f64(B, &[1e-6]));
        let res = verify_difference_equation(&a, &bad, &p_nm1, &samples).unwrap();
        assert!(res > float(B, 1e-9), "perturbation went unnoticed: {res}");
    }
}
