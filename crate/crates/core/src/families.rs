//! The worked trace families in low degree, in the normalization whose
//! closed-form values the `exact` module reproduces. Used by the CLI
//! verifier and the test suites.

use crate::error::Result;
use crate::params::QuantizationSpec;
use crate::poly::Poly;
use crate::weight::{build_weight, WeightSpec};

/// A quantization together with a distinguished trace on it.
#[derive(Debug, Clone)]
pub struct Family {
    pub label: &'static str,
    pub spec: QuantizationSpec,
    pub g: Poly,
    pub weight: WeightSpec,
}

fn assemble(
    label: &'static str,
    bits: u32,
    roots: &[(f64, f64)],
    c: f64,
    epsilon: i8,
    g_coeffs: &[f64],
) -> Result<Family> {
    let spec = QuantizationSpec::from_f64(bits, roots, c, epsilon)?;
    let g = Poly::from_f64(bits, g_coeffs);
    let weight = build_weight(&spec, &g, &[])?;
    Ok(Family { label, spec, g, weight })
}

/// n = 1, P = x: w(iy) = e^{2π(1/2-c)·(-y)}-type sech weight, G = 1.
/// Meixner–Pollaczek for general c ∈ (0,1).
pub fn family_n1(bits: u32, c: f64) -> Result<Family> {
    assemble("n1-meixner-pollaczek", bits, &[(0.0, 0.0)], c, 1, &[1.0])
}

/// n = 2 even case: P = x² + β², c = 0, G = X, ε = -1.
/// w(iy) = 1/(4 cosh π(y-β) cosh π(y+β)): continuous Hahn.
pub fn family_n2(bits: u32, beta: f64) -> Result<Family> {
    assemble(
        "n2-continuous-hahn",
        bits,
        &[(0.0, beta), (0.0, -beta)],
        0.0,
        -1,
        &[0.0, 1.0],
    )
}

/// n = 3: P = x³ + β²x, c = 1/2, ε = -1, G = 8X; β² may be negative down to
/// -1/4 (roots ±√(-β²) real). This is the unique positive trace, normalized
/// so that w(x) = 1/(cos πx · cos π(x-iβ) · cos π(x+iβ)).
pub fn family_n3(bits: u32, beta_sq: f64) -> Result<Family> {
    let roots = if beta_sq >= 0.0 {
        let b = beta_sq.sqrt();
        vec![(0.0, 0.0), (0.0, b), (0.0, -b)]
    } else {
        let d = (-beta_sq).sqrt();
        vec![(0.0, 0.0), (d, 0.0), (-d, 0.0)]
    };
    assemble("n3-positive", bits, &roots, 0.5, -1, &[0.0, 8.0])
}

/// n = 4: P = (x²+β²)(x²+γ²), c = 0, ε = +1, G = 16X²; the unique positive
/// trace, normalized to w(x) = 1/∏ cos π(x ∓ iβ)(…γ).
pub fn family_n4(bits: u32, beta: f64, gamma: f64) -> Result<Family> {
    assemble(
        "n4-positive",
        bits,
        &[(0.0, beta), (0.0, -beta), (0.0, gamma), (0.0, -gamma)],
        0.0,
        1,
        &[0.0, 0.0, 16.0],
    )
}

/// P = x² with twist c ∈ (0,1), G = X: w(iy) = e^{-2πcy}/(4 cosh² πy).
/// The trace family driven by the x² discrete-Painlevé recurrence.
pub fn family_x2(bits: u32, c: f64) -> Result<Family> {
    assemble("x2-painleve", bits, &[(0.0, 0.0), (0.0, 0.0)], c, -1, &[0.0, 1.0])
}

/// Product-of-sech trace: roots iβ_j, t = (-1)^n, G = X^{⌊n/2⌋}, with the
/// canonical conjugation sign (ε = +1 for n ≡ 0,1 mod 4, else -1).
/// w(iy) ∝ ∏ 1/(2 cosh π(y - β_j)).
pub fn sech_product(bits: u32, betas: &[f64]) -> Result<Family> {
    let n = betas.len();
    let c = if n % 2 == 0 { 0.0 } else { 0.5 };
    let epsilon = if n % 4 == 0 || n % 4 == 1 { 1 } else { -1 };
    let roots: Vec<(f64, f64)> = betas.iter().map(|&b| (0.0, b)).collect();
    let mut g = vec![0.0; n / 2 + 1];
    g[n / 2] = 1.0;
    let spec = QuantizationSpec::from_f64(bits, &roots, c, epsilon)?;
    let g = Poly::from_f64(bits, &g);
    let weight = build_weight(&spec, &g, &[])?;
    Ok(Family { label: "sech-product", spec, g, weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{self, float};

    #[test]
    fn families_build_and_are_equivariant() {
        const B: u32 = 192;
        let fams = [
            family_n1(B, 0.25).unwrap(),
            family_n2(B, 0.4).unwrap(),
            family_n3(B, 1.0).unwrap(),
            family_n3(B, -0.2).unwrap(),
            family_n4(B, 0.3, 0.7).unwrap(),
            family_x2(B, 0.25).unwrap(),
            sech_product(B, &[0.1, 0.5, -0.3]).unwrap(),
        ];
        for f in &fams {
            assert!(f.spec.check_reality(), "{}", f.label);
            let rep = f.weight.symmetry_report();
            assert!(rep.real_on_axis, "{} should be real on the axis", f.label);
        }
    }

    #[test]
    fn n3_weight_value_spot_check() {
        const B: u32 = 256;
        let f = family_n3(B, 1.0).unwrap();
        // w(0) = 1/(cosh 0 · cosh(-π) · cosh(π)) = 1/cosh²π
        let got = f.weight.eval_weight(&float(B, 0.0)).unwrap();
        let expect = prec::pi(B).cosh().square().recip();
        assert!((got.real().clone() - expect).abs() < prec::pow10(B, -60));
    }

    #[test]
    fn sech_product_value_spot_check() {
        const B: u32 = 256;
        let f = sech_product(B, &[0.2, 0.0, -0.2]).unwrap();
        let got = f.weight.eval_weight(&float(B, 0.0)).unwrap();
        let c = (prec::pi(B) * float(B, 0.2)).cosh();
        let expect = (c.clone().square() * 8u32).recip();
        assert!((got.real().clone() - expect).abs() < prec::pow10(B, -60));
    }
}
