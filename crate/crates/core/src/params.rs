//! Quantization parameters and root-level polynomial manipulation.
//!
//! A quantization is determined by the roots of a monic polynomial `P`
//! (degree n), a twist `c ∈ [0,1)` giving `t = e^{2πic}`, and a conjugation
//! sign `ε`. Roots are the primary representation; every construction in the
//! crate (the exponentiated polynomial 𝐏, the closed-strip factorization,
//! the strip reduction) acts on roots, and the coefficient form is derived
//! on demand.

use rug::ops::{CompleteRound, Pow};
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::prec::{self, DELTA_STRIP};

/// Quantization data: roots of `P`, twist `c`, conjugation sign `ε`.
#[derive(Debug, Clone)]
pub struct QuantizationSpec {
    roots: Vec<Complex>,
    c: Float,
    epsilon: i8,
    bits: u32,
}

/// Derived unit-modulus constants of a quantization.
#[derive(Debug, Clone)]
pub struct Constants {
    pub t: Complex,
    pub lambda: Complex,
    pub lambda_star: Complex,
}

/// Roots with multiplicities, merged under the strip tolerance.
#[derive(Debug, Clone, Default)]
pub struct RootSet(pub Vec<(Complex, usize)>);

/// Roots of `P` split by position relative to the strip `|Re α| ≤ 1/2`.
#[derive(Debug, Clone)]
pub struct StripClassification {
    pub interior: Vec<(Complex, usize)>,
    pub boundary_plus: Vec<(Complex, usize)>,
    pub boundary_minus: Vec<(Complex, usize)>,
    pub outside: Vec<(Complex, usize)>,
}

/// Result of the minimal-integer shift into the strip.
#[derive(Debug, Clone)]
pub struct StripReduction {
    /// Same degree as `P`; every root translated into `|Re x| ≤ 1/2`.
    pub p_tilde: RootSet,
    /// Only the roots of `P` already satisfying `|Re x| ≤ 1/2`.
    pub p_circ: RootSet,
}

impl RootSet {
    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Expand multiplicities into a flat root list.
    pub fn expanded(&self) -> Vec<Complex> {
        let mut out = Vec::with_capacity(self.total_degree());
        for (r, m) in &self.0 {
            for _ in 0..*m {
                out.push(r.clone());
            }
        }
        out
    }

    /// Monic polynomial with these roots.
    pub fn to_poly(&self, bits: u32) -> Poly {
        Poly::from_roots(bits, self.expanded().iter())
    }
}

/// Merge roots closer than `DELTA_STRIP` into one root with summed multiplicity.
pub fn group_roots(roots: &[Complex]) -> RootSet {
    let mut groups: Vec<(Complex, usize)> = Vec::new();
    for r in roots {
        let mut found = false;
        for (rep, m) in groups.iter_mut() {
            let d = prec::cabs(&(r.clone() - &*rep));
            if d.to_f64() <= DELTA_STRIP {
                *m += 1;
                found = true;
                break;
            }
        }
        if !found {
            groups.push((r.clone(), 1));
        }
    }
    RootSet(groups)
}

impl QuantizationSpec {
    /// `roots` are the α_j (dimensionless); `c ∈ [0,1)`; `epsilon = ±1`.
    pub fn new(bits: u32, roots: Vec<Complex>, c: Float, epsilon: i8) -> Result<Self> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Invalid(format!("epsilon must be ±1, got {epsilon}")));
        }
        if c < 0u32 || c >= 1u32 {
            // real c in [0,1) keeps |t| = 1; the real-t distributional case is out of scope
            return Err(Error::Invalid(format!("c must lie in [0,1), got {c}")));
        }
        let roots = roots.into_iter().map(|r| prec::at_prec(bits, &r)).collect();
        Ok(QuantizationSpec { roots, c: prec::float(bits, 0.0) + c, epsilon, bits })
    }

    pub fn from_f64(bits: u32, roots: &[(f64, f64)], c: f64, epsilon: i8) -> Result<Self> {
        let roots = roots.iter().map(|&(re, im)| prec::cplx(bits, re, im)).collect();
        Self::new(bits, roots, prec::float(bits, c), epsilon)
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn c(&self) -> &Float {
        &self.c
    }

    pub fn c_is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn roots(&self) -> &[Complex] {
        &self.roots
    }

    pub fn grouped_roots(&self) -> RootSet {
        group_roots(&self.roots)
    }

    /// Monic `P` in coefficient form.
    pub fn p_poly(&self) -> Poly {
        Poly::from_roots(self.bits, self.roots.iter())
    }

    /// Lossless re-precision of the stored roots and twist.
    pub fn at_bits(&self, bits: u32) -> QuantizationSpec {
        QuantizationSpec {
            roots: self.roots.iter().map(|r| prec::at_prec(bits, r)).collect(),
            c: prec::float(bits, 0.0) + &self.c,
            epsilon: self.epsilon,
            bits,
        }
    }

    /// Same quantization data over a different root multiset.
    pub fn with_roots(&self, roots: RootSet) -> QuantizationSpec {
        QuantizationSpec {
            roots: roots.expanded(),
            c: self.c.clone(),
            epsilon: self.epsilon,
            bits: self.bits,
        }
    }

    /// t = e^{2πic}, λ = ε·i^{-n}·e^{-πic}, λ_* = (-1)^n λ^{-1}.
    pub fn derive_constants(&self) -> Constants {
        let bits = self.bits;
        let n = self.n() as i64;
        let i = prec::iunit(bits);
        let two_pi_c = prec::two_pi(bits) * &self.c;
        let t = (i.clone() * &two_pi_c).exp();
        let minus_pi_i_c = -(prec::iunit(bits) * prec::pi(bits) * &self.c);
        let lambda = prec::ipow(bits, -n) * minus_pi_i_c.exp() * self.epsilon as i64;
        let sign_n = prec::cplx(bits, if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        let lambda_star = sign_n / &lambda;
        Constants { t, lambda, lambda_star }
    }

    /// Even quantization with the matching twist: P(-x) = (-1)^n P(x)
    /// (roots closed under α ↦ -α) and t = (-1)^n.
    pub fn is_even_quantization(&self) -> bool {
        let c = self.c.to_f64();
        let t_matches = if self.n() % 2 == 0 { c == 0.0 } else { (c - 0.5).abs() <= 1e-15 };
        if !t_matches {
            return false;
        }
        let mut pool: Vec<Complex> = self.roots.clone();
        for r in &self.roots {
            let target = (-r).complete(self.bits);
            let mut hit = None;
            for (k, cand) in pool.iter().enumerate() {
                if prec::cabs(&(cand.clone() - &target)).to_f64() <= DELTA_STRIP {
                    hit = Some(k);
                    break;
                }
            }
            match hit {
                Some(k) => {
                    pool.swap_remove(k);
                }
                None => return false,
            }
        }
        true
    }

    /// conj(P)(-x) = (-1)^n P(x), i.e. the root multiset is invariant
    /// under α ↦ -conj(α).
    pub fn check_reality(&self) -> bool {
        let mut pool: Vec<Complex> = self.roots.clone();
        for r in &self.roots {
            let target = -prec::conj(r);
            let mut hit = None;
            for (k, cand) in pool.iter().enumerate() {
                let d = prec::cabs(&(cand.clone() - &target));
                if d.to_f64() <= DELTA_STRIP {
                    hit = Some(k);
                    break;
                }
            }
            match hit {
                Some(k) => {
                    pool.swap_remove(k);
                }
                None => return false,
            }
        }
        pool.is_empty()
    }

    /// Place every root relative to the strip `|Re α| ≤ 1/2`.
    pub fn classify_strip(&self) -> StripClassification {
        classify_rootset(&self.grouped_roots())
    }

    /// Minimal integer shift of each root into `|Re x| ≤ 1/2` (P̃), and the
    /// sub-multiset of roots already there (P∘).
    pub fn shift_to_strip(&self) -> StripReduction {
        let cls = self.classify_strip();
        let mut tilde_roots: Vec<Complex> = Vec::new();
        let mut circ_roots: Vec<Complex> = Vec::new();
        for bucket in [&cls.interior, &cls.boundary_plus, &cls.boundary_minus] {
            for (r, m) in bucket {
                for _ in 0..*m {
                    tilde_roots.push(r.clone());
                    circ_roots.push(r.clone());
                }
            }
        }
        for (r, m) in &cls.outside {
            let re = r.real().to_f64();
            // smallest integer translate landing in the closed strip; the
            // tolerance keeps near-half-integer roots on the nearer boundary
            let k = if re > 0.5 {
                -((re - 0.5 - DELTA_STRIP).ceil())
            } else {
                (-re - 0.5 - DELTA_STRIP).ceil()
            };
            let shifted = r.clone() + prec::cplx(self.bits, k, 0.0);
            for _ in 0..*m {
                tilde_roots.push(shifted.clone());
            }
        }
        StripReduction {
            p_tilde: group_roots(&tilde_roots),
            p_circ: group_roots(&circ_roots),
        }
    }

    /// Factor `P(x) = P_*(x) Q(x+1/2) Q(x-1/2)` with `P_*` interior and `Q`
    /// supported on the imaginary axis. Requires all roots in the closed strip.
    pub fn factor_closed_strip(&self) -> Result<(RootSet, RootSet)> {
        factor_rootset(&self.grouped_roots(), self.bits)
    }

    /// 𝐏(X) = ∏ (X + e^{2πiα_j}) over all roots of `P`.
    pub fn exponentiate(&self) -> Poly {
        exponentiate_roots(&self.grouped_roots(), self.bits)
    }

    /// Strip reduction to `(P∘, ε∘)`. The sign is carried through
    /// λ∘ = (-1)^{(n-n∘)/2} λ and read back against i^{-n∘} e^{-πic}.
    pub fn reduced(&self) -> Result<QuantizationSpec> {
        if !self.check_reality() {
            return Err(Error::RealityViolated);
        }
        let red = self.shift_to_strip();
        let n_circ = red.p_circ.total_degree();
        let dropped = self.n() - n_circ;
        if dropped % 2 != 0 {
            return Err(Error::RealityViolated);
        }
        let lambda = self.derive_constants().lambda;
        let sign = if (dropped / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let lambda_circ = lambda * prec::cplx(self.bits, sign, 0.0);
        // ε∘ = i^{n∘} e^{πic} λ∘, a unit sign by construction
        let pi_i_c = prec::iunit(self.bits) * prec::pi(self.bits) * &self.c;
        let eps_c = prec::ipow(self.bits, n_circ as i64) * pi_i_c.exp() * lambda_circ;
        let eps_re = eps_c.real().to_f64();
        if eps_c.imag().to_f64().abs() > 1e-6 || (eps_re.abs() - 1.0).abs() > 1e-6 {
            return Err(Error::RealityViolated);
        }
        let epsilon = if eps_re > 0.0 { 1 } else { -1 };
        let mut out = self.with_roots(red.p_circ);
        out.epsilon = epsilon;
        Ok(out)
    }
}

fn classify_rootset(set: &RootSet) -> StripClassification {
    let mut cls = StripClassification {
        interior: vec![],
        boundary_plus: vec![],
        boundary_minus: vec![],
        outside: vec![],
    };
    for (r, m) in &set.0 {
        let re = r.real().to_f64();
        let d = re.abs() - 0.5;
        if d.abs() <= DELTA_STRIP {
            if re > 0.0 {
                cls.boundary_plus.push((r.clone(), *m));
            } else {
                cls.boundary_minus.push((r.clone(), *m));
            }
        } else if d < 0.0 {
            cls.interior.push((r.clone(), *m));
        } else {
            cls.outside.push((r.clone(), *m));
        }
    }
    cls
}

/// Closed-strip factorization on a grouped root multiset.
pub fn factor_rootset(set: &RootSet, bits: u32) -> Result<(RootSet, RootSet)> {
    let cls = classify_rootset(set);
    if !cls.outside.is_empty() {
        return Err(Error::RootsOutsideStrip);
    }
    let mut q_roots: Vec<(Complex, usize)> = Vec::new();
    let mut minus_pool = cls.boundary_minus.clone();
    for (r, m) in &cls.boundary_plus {
        let mu = r.imag().clone();
        let mu_f = mu.to_f64();
        let mut hit = None;
        for (k, (s, sm)) in minus_pool.iter().enumerate() {
            if (s.imag().clone() - &mu).to_f64().abs() <= DELTA_STRIP {
                if sm != m {
                    return Err(Error::UnpairedBoundaryRoot { im: mu_f });
                }
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => {
                minus_pool.swap_remove(k);
                let axis_root = Complex::with_val(bits, (Float::new(bits), mu));
                q_roots.push((axis_root, *m));
            }
            None => return Err(Error::UnpairedBoundaryRoot { im: mu_f }),
        }
    }
    if let Some((s, _)) = minus_pool.first() {
        return Err(Error::UnpairedBoundaryRoot { im: s.imag().to_f64() });
    }
    Ok((RootSet(cls.interior), RootSet(q_roots)))
}

/// 𝐏(X) = ∏ (X + e^{2πiα}) over a grouped root multiset.
pub fn exponentiate_roots(set: &RootSet, bits: u32) -> Poly {
    let mut p = Poly::one(bits);
    for (r, m) in &set.0 {
        let e = (prec::iunit(bits) * prec::two_pi(bits) * r).exp();
        let lin = Poly::new(bits, vec![e, prec::cone(bits)]);
        for _ in 0..*m {
            p = p.mul(&lin);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{cabs, cplx, float};

    const B: u32 = 256;

    fn spec(roots: &[(f64, f64)], c: f64, eps: i8) -> QuantizationSpec {
        QuantizationSpec::from_f64(B, roots, c, eps).unwrap()
    }

    #[test]
    fn constants_n2_c0() {
        // λ = -i^{-2} = 1 for ε = -1
        let s = spec(&[(0.0, 1.0), (0.0, -1.0)], 0.0, -1);
        let k = s.derive_constants();
        assert!(cabs(&(k.t.clone() - cplx(B, 1.0, 0.0))) < float(B, 1e-70));
        assert!(cabs(&(k.lambda.clone() - cplx(B, 1.0, 0.0))) < float(B, 1e-70));
        assert!(cabs(&(k.lambda_star - cplx(B, 1.0, 0.0))) < float(B, 1e-70));
    }

    #[test]
    fn constants_n3_c_half() {
        // symbolic: t = -1, λ = -i^{-3} e^{-πi/2} = -1, λ_* = 1
        let s = spec(&[(0.0, 0.0), (0.0, 1.0), (0.0, -1.0)], 0.5, -1);
        let k = s.derive_constants();
        assert!(cabs(&(k.t.clone() - cplx(B, -1.0, 0.0))) < float(B, 1e-70));
        assert!(cabs(&(k.lambda.clone() - cplx(B, -1.0, 0.0))) < float(B, 1e-70));
        assert!(cabs(&(k.lambda_star - cplx(B, 1.0, 0.0))) < float(B, 1e-70));
    }

    #[test]
    fn constants_unit_modulus() {
        let s = spec(&[(0.0, 0.0)], 0.25, 1);
        let k = s.derive_constants();
        assert!(cabs(&(k.t.clone() - cplx(B, 0.0, 1.0))) < float(B, 1e-70));
        let m = cabs(&k.lambda).to_f64();
        assert!((m - 1.0).abs() < 1e-70);
    }

    #[test]
    fn reality_examples() {
        assert!(spec(&[(0.0, 0.7), (0.0, -0.7)], 0.0, -1).check_reality());
        assert!(spec(&[(0.0, 0.0), (0.0, 1.0), (0.0, -1.0)], 0.5, -1).check_reality());
        assert!(!spec(&[(0.3, 0.0)], 0.5, 1).check_reality());
        // real pair ±δ is also symmetric under α ↦ -conj(α)
        assert!(spec(&[(0.3, 0.0), (-0.3, 0.0)], 0.5, 1).check_reality());
    }

    #[test]
    fn classify_examples() {
        let s = spec(&[(0.0, 0.0), (0.0, 1.0)], 0.5, -1);
        let c = s.classify_strip();
        assert_eq!(c.interior.len(), 2);
        assert!(c.boundary_plus.is_empty() && c.outside.is_empty());

        let s = spec(&[(0.5, 1.0)], 0.5, -1);
        let c = s.classify_strip();
        assert_eq!(c.boundary_plus.len(), 1);

        let s = spec(&[(1.5, 0.0)], 0.5, -1);
        let c = s.classify_strip();
        assert_eq!(c.outside.len(), 1);
    }

    #[test]
    fn shift_examples() {
        let s = spec(&[(1.5, 0.0)], 0.5, -1);
        let r = s.shift_to_strip();
        assert_eq!(r.p_tilde.total_degree(), 1);
        assert!(cabs(&(r.p_tilde.0[0].0.clone() - cplx(B, 0.5, 0.0))) < float(B, 1e-10));
        assert!(r.p_circ.is_empty());

        let s = spec(&[(0.0, 0.0), (0.0, 2.0), (0.0, -2.0)], 0.5, -1);
        let r = s.shift_to_strip();
        assert_eq!(r.p_tilde.total_degree(), 3);
        assert_eq!(r.p_circ.total_degree(), 3);

        let s = spec(&[(-1.5, 0.0), (1.5, 0.0)], 0.5, -1);
        let r = s.shift_to_strip();
        let mut res: Vec<f64> = r.p_tilde.0.iter().map(|(z, _)| z.real().to_f64()).collect();
        res.sort_by(f64::total_cmp);
        assert!((res[0] + 0.5).abs() < 1e-10 && (res[1] - 0.5).abs() < 1e-10);
        assert!(r.p_circ.is_empty());
    }

    #[test]
    fn factor_examples() {
        // x^2 - 1/4: Q(x) = x, P_* = 1
        let s = spec(&[(0.5, 0.0), (-0.5, 0.0)], 0.5, -1);
        let (p_star, q) = s.factor_closed_strip().unwrap();
        assert!(p_star.is_empty());
        assert_eq!(q.total_degree(), 1);
        assert!(cabs(&q.0[0].0).to_f64() < 1e-10);

        // x: interior root, Q = 1
        let s = spec(&[(0.0, 0.0)], 0.5, -1);
        let (p_star, q) = s.factor_closed_strip().unwrap();
        assert_eq!(p_star.total_degree(), 1);
        assert!(q.is_empty());

        // boundary pair at ±1/2 + i: Q = x - i
        let s = spec(&[(0.5, 1.0), (-0.5, 1.0)], 0.5, -1);
        let (p_star, q) = s.factor_closed_strip().unwrap();
        assert!(p_star.is_empty());
        assert!(cabs(&(q.0[0].0.clone() - cplx(B, 0.0, 1.0))) < float(B, 1e-10));

        // unpaired boundary root must fail
        let s = spec(&[(0.5, 1.0)], 0.5, -1);
        assert!(matches!(
            s.factor_closed_strip(),
            Err(Error::UnpairedBoundaryRoot { .. })
        ));
    }

    #[test]
    fn factor_reconstructs_p() {
        let s = spec(&[(0.5, 0.3), (-0.5, 0.3), (0.0, -0.2), (0.1, 0.0), (-0.1, 0.0)], 0.5, -1);
        let (p_star, q) = s.factor_closed_strip().unwrap();
        let bits = s.bits();
        let half = cplx(bits, 0.5, 0.0);
        let qp = q.to_poly(bits);
        let prod = p_star
            .to_poly(bits)
            .mul(&qp.shift(&half))
            .mul(&qp.shift(&(-half)));
        let d = prod.max_coeff_dist(&s.p_poly());
        assert!(d < float(bits, 1e-30), "reconstruction error {d}");
    }

    #[test]
    fn exponentiate_examples() {
        let s = spec(&[(0.0, 0.0)], 0.5, 1);
        let p = s.exponentiate();
        assert!(p.max_coeff_dist(&Poly::from_f64(B, &[1.0, 1.0])) < float(B, 1e-70));

        let beta = 0.37;
        let s = spec(&[(0.0, beta), (0.0, -beta)], 0.5, -1);
        let p = s.exponentiate();
        let e = float(B, 0.0) + (prec::two_pi(B) * float(B, beta)).exp();
        let expect = Poly::new(
            B,
            vec![
                prec::cone(B),
                Complex::with_val(B, (&e + e.clone().recip(), 0.0)),
                prec::cone(B),
            ],
        );
        assert!(p.max_coeff_dist(&expect) < float(B, 1e-70));
        assert!(p.max_imag_abs() < float(B, 1e-70));
    }

    #[test]
    fn reduced_keeps_epsilon_and_drops_outside() {
        let s = spec(&[(1.5, 0.0), (-1.5, 0.0), (0.0, 0.4), (0.0, -0.4)], 0.5, -1);
        let r = s.reduced().unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(r.epsilon(), -1);
    }
}
