//! The weight function w(x) on the imaginary axis and its structure.
//!
//! ```text
//!     w(x) = e^{2πicx} · G(e^{2πix}) / 𝐏_*(e^{2πix})
//! ```
//!
//! where 𝐏_* is the exponentiated polynomial of the interior roots of `P`
//! (the roots with `|Re α| < 1/2`), `deg G ≤ deg P_* - 1`, and `G(0) = 0`
//! when `c = 0`. Boundary roots of `P` contribute point masses (atoms) at
//! the roots of `Q` on the axis instead of density.
//!
//! Everything evaluates at complex argument; the trace contour is `x = iy`.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::params::{exponentiate_roots, QuantizationSpec, RootSet};
use crate::poly::Poly;
use crate::prec::{self, DELTA_POLE, DELTA_STRIP};

/// A point mass on the imaginary axis: location `x = iy`, weight `mass`.
///
/// Positive traces carry only nonnegative masses; the sign is checked by the
/// positivity analysis, not at construction.
#[derive(Debug, Clone)]
pub struct Atom {
    pub y: Float,
    pub mass: Float,
}

/// Exponential decay rates of |w(iy)| as y → ±∞.
#[derive(Debug, Clone)]
pub struct DecayRates {
    pub rate_plus: Float,
    pub rate_minus: Float,
}

/// Structural symmetry flags decided by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryReport {
    /// w(x+1) = t·w(x); holds by construction for this functional form.
    pub quasi_periodic: bool,
    pub even: bool,
    pub real_on_axis: bool,
}

#[derive(Debug, Clone)]
pub struct WeightSpec {
    c: Float,
    g: Poly,
    big_p: Poly,
    /// interior roots the denominator was built from
    p_star: RootSet,
    atoms: Vec<Atom>,
    axis_poles: Vec<Float>,
    rates: DecayRates,
    bits: u32,
}

/// Construct the weight of a trace for `spec` with numerator `G` and the
/// given atoms. All roots of `spec` must lie in the closed strip; interior
/// roots form the denominator, boundary roots determine where atoms may sit.
pub fn build_weight(spec: &QuantizationSpec, g: &Poly, atoms: &[Atom]) -> Result<WeightSpec> {
    let bits = spec.bits();
    let (p_star, q) = spec.factor_closed_strip()?;
    let q_locs: Vec<Float> = q.0.iter().map(|(r, _)| r.imag().clone()).collect();
    for a in atoms {
        let ok = q_locs
            .iter()
            .any(|mu| (a.y.clone() - mu).abs().to_f64() <= DELTA_STRIP);
        if !ok {
            return Err(Error::AtomOffAxis { y: a.y.to_f64() });
        }
    }
    WeightSpec::from_parts(spec.c().clone(), g.clone(), p_star, atoms.to_vec(), bits)
}

impl WeightSpec {
    /// Low-level constructor from an interior root multiset. `build_weight`
    /// is the validated path; this one lets diagnostics construct weights
    /// whose denominator has axis poles.
    pub fn from_parts(
        c: Float,
        g: Poly,
        p_star: RootSet,
        atoms: Vec<Atom>,
        bits: u32,
    ) -> Result<WeightSpec> {
        let n_star = p_star.total_degree();
        let big_p = exponentiate_roots(&p_star, bits);
        let g = Poly::new(bits, g.coeffs().to_vec());
        if !g.is_zero() {
            let deg_g = g.degree().unwrap();
            if n_star == 0 || deg_g > n_star - 1 {
                return Err(Error::DegreeTooHigh { deg_g, n_star });
            }
        }
        let c_zero = c.is_zero();
        let ord0 = g.order_at_zero(1e-25);
        if c_zero && !g.is_zero() && ord0 == 0 {
            return Err(Error::MissingVanishingAtZero);
        }
        let rates = if g.is_zero() {
            // no continuous part; rates are only used to truncate quadrature
            DecayRates {
                rate_plus: prec::two_pi(bits),
                rate_minus: prec::two_pi(bits),
            }
        } else {
            let deg_g = g.degree().unwrap() as i64;
            let rate_plus = prec::two_pi(bits) * (c.clone() + ord0 as i64);
            let rate_minus = prec::two_pi(bits) * (-c.clone() + (n_star as i64 - deg_g));
            for r in [&rate_plus, &rate_minus] {
                if !(r.clone() > 0) {
                    return Err(Error::NonIntegrable { rate: r.to_f64() });
                }
            }
            DecayRates { rate_plus, rate_minus }
        };
        // axis poles come from roots with Re α ≡ ±1/2: there E = e^{2πix}
        // meets the root -e^{2πiα} of 𝐏_* on the positive real ray
        let mut axis_poles = Vec::new();
        for (r, _) in &p_star.0 {
            let re = r.real().to_f64();
            if ((re.abs() - 0.5).abs()) <= DELTA_STRIP {
                axis_poles.push(r.imag().clone());
            }
        }
        Ok(WeightSpec { c, g, big_p, p_star, atoms, axis_poles, rates, bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn c(&self) -> &Float {
        &self.c
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn big_p(&self) -> &Poly {
        &self.big_p
    }

    pub fn p_star(&self) -> &RootSet {
        &self.p_star
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn decay_rates(&self) -> &DecayRates {
        &self.rates
    }

    pub fn has_density(&self) -> bool {
        !self.g.is_zero()
    }

    /// y-locations of poles of the density on the imaginary axis.
    /// Empty whenever the denominator was built from interior roots only.
    pub fn axis_poles(&self) -> &[Float] {
        &self.axis_poles
    }

    /// t = e^{2πic}.
    pub fn t(&self) -> Complex {
        (prec::iunit(self.bits) * prec::two_pi(self.bits) * &self.c).exp()
    }

    /// Density at complex argument `x`: e^{2πicx} G(E)/𝐏_*(E), E = e^{2πix}.
    /// No pole guard; quadrature controls its own sample points.
    pub fn eval_at(&self, x: &Complex) -> Complex {
        if self.g.is_zero() {
            return prec::czero(self.bits);
        }
        let two_pi_i = prec::iunit(self.bits) * prec::two_pi(self.bits);
        let e = (two_pi_i.clone() * x).exp();
        let pref = (two_pi_i * &self.c * x).exp();
        pref * self.g.eval(&e) / self.big_p.eval(&e)
    }

    /// Density on the axis: w(iy), guarded against axis poles.
    pub fn eval_weight(&self, y: &Float) -> Result<Complex> {
        for p in &self.axis_poles {
            if (y.clone() - p).abs().to_f64() < DELTA_POLE {
                return Err(Error::EvaluationAtPole { y: y.to_f64(), delta: DELTA_POLE });
            }
        }
        let x = Complex::with_val(self.bits, (Float::new(self.bits), y.clone()));
        Ok(self.eval_at(&x))
    }

    /// Decide evenness and axis-reality by sampling 64 symmetric points.
    pub fn symmetry_report(&self) -> SymmetryReport {
        let bits = self.bits;
        let mut even = true;
        let mut real_on_axis = true;
        let mut scale = prec::float(bits, 0.0);
        let mut samples = Vec::new();
        for k in 0..32 {
            let y = prec::float(bits, 0.047 + 3.0 * (k as f64) / 32.0);
            let wp = self.eval_at(&Complex::with_val(bits, (Float::new(bits), y.clone())));
            let wm = self.eval_at(&Complex::with_val(bits, (Float::new(bits), -y.clone())));
            let m = prec::cabs(&wp).max(&prec::cabs(&wm));
            if m > scale {
                scale = m;
            }
            samples.push((wp, wm));
        }
        if scale.is_zero() {
            scale = prec::float(bits, 1.0);
        }
        let tol = scale * prec::float(bits, 1e-20);
        for (wp, wm) in &samples {
            if prec::cabs(&(wp.clone() - wm)) > tol {
                even = false;
            }
            if wp.imag().clone().abs() > tol || wm.imag().clone().abs() > tol {
                real_on_axis = false;
            }
        }
        SymmetryReport { quasi_periodic: true, even, real_on_axis }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{cabs, cplx, float};

    const B: u32 = 256;

    fn spec_n1() -> QuantizationSpec {
        QuantizationSpec::from_f64(B, &[(0.0, 0.0)], 0.5, 1).unwrap()
    }

    fn spec_n3(beta: f64) -> QuantizationSpec {
        QuantizationSpec::from_f64(B, &[(0.0, 0.0), (0.0, beta), (0.0, -beta)], 0.5, -1).unwrap()
    }

    #[test]
    fn n1_weight_is_half_sech() {
        // G = 1, c = 1/2: w(iy) = 1/(2 cosh πy)
        let w = build_weight(&spec_n1(), &Poly::from_f64(B, &[1.0]), &[]).unwrap();
        let v0 = w.eval_weight(&float(B, 0.0)).unwrap();
        assert!(cabs(&(v0 - cplx(B, 0.5, 0.0))) < float(B, 1e-70));
        let y = float(B, 1.25);
        let v = w.eval_weight(&y).unwrap();
        let expect = (prec::pi(B) * &y).cosh().recip() / 2u32;
        assert!((v.real().clone() - expect).abs() < float(B, 1e-70));
        assert!(v.imag().clone().abs() < float(B, 1e-70));
    }

    #[test]
    fn n3_weight_matches_cosine_product() {
        // G(X) = 8X reproduces 1/(cos πx · cos π(x-iβ) · cos π(x+iβ))
        let beta = 0.6;
        let w = build_weight(&spec_n3(beta), &Poly::from_f64(B, &[0.0, 8.0]), &[]).unwrap();
        for yv in [0.0, 0.31, -1.2] {
            let y = float(B, yv);
            let got = w.eval_weight(&y).unwrap();
            let c1 = (prec::pi(B) * y.clone()).cosh();
            let c2 = (prec::pi(B) * (y.clone() - float(B, beta))).cosh();
            let c3 = (prec::pi(B) * (y.clone() + float(B, beta))).cosh();
            let expect = (c1 * c2 * c3).recip();
            assert!(
                (got.real().clone() - &expect).abs() < expect * float(B, 1e-65),
                "mismatch at y={yv}"
            );
        }
    }

    #[test]
    fn c_zero_requires_vanishing_numerator() {
        let spec = QuantizationSpec::from_f64(B, &[(0.0, 0.3), (0.0, -0.3)], 0.0, -1).unwrap();
        let err = build_weight(&spec, &Poly::from_f64(B, &[1.0]), &[]);
        assert!(matches!(err, Err(Error::MissingVanishingAtZero)));
        assert!(build_weight(&spec, &Poly::from_f64(B, &[0.0, 1.0]), &[]).is_ok());
    }

    #[test]
    fn degree_cap_enforced() {
        let spec = spec_n1();
        let err = build_weight(&spec, &Poly::from_f64(B, &[0.0, 1.0]), &[]);
        assert!(matches!(err, Err(Error::DegreeTooHigh { .. })));
    }

    #[test]
    fn atom_locations_validated() {
        // no boundary roots: any atom is off-axis for this spec
        let atom = Atom { y: float(B, 0.3), mass: float(B, 1.0) };
        let err = build_weight(&spec_n1(), &Poly::from_f64(B, &[1.0]), &[atom.clone()]);
        assert!(matches!(err, Err(Error::AtomOffAxis { .. })));
        // boundary pair at ±1/2 + 0.3i admits an atom at y = 0.3
        let spec = QuantizationSpec::from_f64(B, &[(0.5, 0.3), (-0.5, 0.3)], 0.5, -1).unwrap();
        let w = build_weight(&spec, &Poly::zero(B), &[atom]).unwrap();
        assert_eq!(w.atoms().len(), 1);
        assert!(!w.has_density());
    }

    #[test]
    fn quasi_periodicity_on_samples() {
        let beta = 0.4;
        let w = build_weight(&spec_n3(beta), &Poly::from_f64(B, &[0.0, 1.0]), &[]).unwrap();
        let t = w.t();
        for yv in [-2.0, -0.7, 0.1, 1.3] {
            let x = cplx(B, 0.0, yv);
            let lhs = w.eval_at(&(x.clone() + cplx(B, 1.0, 0.0)));
            let rhs = t.clone() * w.eval_at(&x);
            assert!(cabs(&(lhs - rhs)) < float(B, 1e-60));
        }
    }

    #[test]
    fn symmetry_flags() {
        let w = build_weight(&spec_n3(0.8), &Poly::from_f64(B, &[0.0, 1.0]), &[]).unwrap();
        let rep = w.symmetry_report();
        assert!(rep.quasi_periodic && rep.even && rep.real_on_axis);

        let spec = QuantizationSpec::from_f64(B, &[(0.0, 0.0)], 0.25, 1).unwrap();
        let w = build_weight(&spec, &Poly::from_f64(B, &[1.0]), &[]).unwrap();
        let rep = w.symmetry_report();
        assert!(!rep.even && rep.real_on_axis);
    }

    #[test]
    fn axis_pole_detection_and_guard() {
        // hypothetical denominator with a boundary root at α = 1/2: pole at y = 0
        let root = cplx(B, 0.5, 0.0);
        let ws = WeightSpec::from_parts(
            float(B, 0.5),
            Poly::from_f64(B, &[1.0]),
            RootSet(vec![(root, 1)]),
            vec![],
            B,
        )
        .unwrap();
        assert_eq!(ws.axis_poles().len(), 1);
        assert!(ws.axis_poles()[0].to_f64().abs() < 1e-12);
        assert!(matches!(
            ws.eval_weight(&float(B, 0.0)),
            Err(Error::EvaluationAtPole { .. })
        ));
        // interior-only construction has no axis poles
        let w = build_weight(&spec_n3(0.5), &Poly::from_f64(B, &[0.0, 1.0]), &[]).unwrap();
        assert!(w.axis_poles().is_empty());
    }

    #[test]
    fn decay_rates_match_structure() {
        // n=1, c=1/2, G=1: rate± = π each
        let w = build_weight(&spec_n1(), &Poly::from_f64(B, &[1.0]), &[]).unwrap();
        let pi = prec::pi(B);
        assert!((w.decay_rates().rate_plus.clone() - &pi).abs() < float(B, 1e-70));
        assert!((w.decay_rates().rate_minus.clone() - &pi).abs() < float(B, 1e-70));
        // decay bound: |w(iy)| ≤ 2 e^{-rate·|y|} · C for moderate C, sampled
        for yv in [3.0f64, 5.0, -4.0] {
            let y = float(B, yv);
            let v = cabs(&w.eval_weight(&y).unwrap());
            let rate = if yv > 0.0 { &w.decay_rates().rate_plus } else { &w.decay_rates().rate_minus };
            let bound = (-(rate.clone() * float(B, yv.abs()))).exp() * 2u32;
            assert!(v < bound);
        }
    }
}
