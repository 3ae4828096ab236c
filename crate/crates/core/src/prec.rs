//! Precision bookkeeping and scalar helpers.
//!
//! Every computation runs at an explicit significand width in bits. Values
//! are created at that width once and arithmetic inherits it, so the width
//! never has to be threaded through inner loops.

use rug::ops::CompleteRound;
use rug::{Complex, Float};

/// Default working precision in bits.
pub const DEFAULT_BITS: u32 = 256;
/// Hard cap for automatic precision escalation.
pub const MAX_BITS: u32 = 4096;

/// Strip-boundary matching tolerance (absolute, roots are O(1) by convention).
pub const DELTA_STRIP: f64 = 1e-12;
/// Guard distance for weight evaluation near an axis pole.
pub const DELTA_POLE: f64 = 1e-10;

pub fn float(bits: u32, v: f64) -> Float {
    Float::with_val(bits, v)
}

pub fn cplx(bits: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(bits, (re, im))
}

pub fn czero(bits: u32) -> Complex {
    Complex::new(bits)
}

pub fn cone(bits: u32) -> Complex {
    Complex::with_val(bits, (1, 0))
}

/// The imaginary unit at the given precision.
pub fn iunit(bits: u32) -> Complex {
    Complex::with_val(bits, (0, 1))
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, rug::float::Constant::Pi)
}

pub fn two_pi(bits: u32) -> Float {
    pi(bits) * 2u32
}

/// i^k for integer k (exact).
pub fn ipow(bits: u32, k: i64) -> Complex {
    match k.rem_euclid(4) {
        0 => Complex::with_val(bits, (1, 0)),
        1 => Complex::with_val(bits, (0, 1)),
        2 => Complex::with_val(bits, (-1, 0)),
        _ => Complex::with_val(bits, (0, -1)),
    }
}

/// Lift a complex value to the given precision.
pub fn at_prec(bits: u32, z: &Complex) -> Complex {
    Complex::with_val(bits, z)
}

/// |z| as a Float at the precision of `z`.
pub fn cabs(z: &Complex) -> Float {
    z.abs_ref().complete(z.prec().0)
}

/// Complex conjugate without consuming the argument.
pub fn conj(z: &Complex) -> Complex {
    let (p, _) = z.prec();
    Complex::with_val(p, (z.real().clone(), -z.imag().clone()))
}

/// Exact zero test for a complex value.
pub fn is_czero(z: &Complex) -> bool {
    z.real().is_zero() && z.imag().is_zero()
}

/// Decimal digit count carried by `bits` of significand.
pub fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) * 0.301_029_995_663_981_2).floor() as usize
}

/// 10^exp at the given precision (exp may be large and negative).
pub fn pow10(bits: u32, exp: i32) -> Float {
    Float::with_val(bits, 10).pow(exp)
}

use rug::ops::Pow;
