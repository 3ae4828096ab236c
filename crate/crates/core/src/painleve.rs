//! The two explicit discrete-Painlevé-type recurrences that propagate the
//! star-product coefficients a_n, b_n without moment determinants:
//! P(x) = x² for any t ≠ 1, and P(x) = x³ + β²x with t = -1 (even trace).
//!
//! The steps are rational maps, so they are written once over a small scalar
//! interface and run both on arbitrary-precision complex numbers and on
//! exact rationals (ℚ or ℚ(i)).

use rug::Complex;

use crate::error::{Error, Result};
use crate::moments::{moment_table, PrecisionConfig};
use crate::orthopoly::{recurrence_coeffs, RecurrenceCoeffs};
use crate::params::QuantizationSpec;
use crate::poly::Poly;
use crate::prec;
use crate::weight::WeightSpec;

/// Field operations the recurrences need. `of_i64` lifts an integer into the
/// scalar's precision context; `near_zero` is the singularity guard
/// (exact zero test for exact scalars).
pub trait PainleveScalar: Clone {
    fn of_i64(&self, n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn near_zero(&self, scale: &Self) -> bool;
}

impl PainleveScalar for Complex {
    fn of_i64(&self, n: i64) -> Self {
        let (p, _) = self.prec();
        Complex::with_val(p, (n, 0i64))
    }
    fn add(&self, o: &Self) -> Self {
        self.clone() + o
    }
    fn sub(&self, o: &Self) -> Self {
        self.clone() - o
    }
    fn mul(&self, o: &Self) -> Self {
        self.clone() * o
    }
    fn div(&self, o: &Self) -> Self {
        self.clone() / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn near_zero(&self, scale: &Self) -> bool {
        let m = prec::cabs(self);
        let s = prec::cabs(scale).max(&prec::float(self.prec().0, 1.0));
        m < s * prec::pow10(self.prec().0, -30)
    }
}

/// Exact arithmetic over ℚ(i) (or ℚ when imaginary parts stay zero).
pub type ExactScalar = num_complex::Complex<num_rational::BigRational>;

impl PainleveScalar for ExactScalar {
    fn of_i64(&self, n: i64) -> Self {
        use num_traits::Zero;
        ExactScalar::new(
            num_rational::BigRational::from_integer(n.into()),
            num_rational::BigRational::zero(),
        )
    }
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn sub(&self, o: &Self) -> Self {
        self.clone() - o.clone()
    }
    fn mul(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn div(&self, o: &Self) -> Self {
        self.clone() / o.clone()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn near_zero(&self, _scale: &Self) -> bool {
        use num_traits::Zero;
        self.is_zero()
    }
}

/// State of the P = x² recurrence: auxiliary variables (f_n, g_n).
#[derive(Debug, Clone)]
pub struct PainleveStateX2<T> {
    pub n: usize,
    pub f: T,
    pub g: T,
    pub t: T,
}

/// One step n → n+1; returns (next state, a_n, b_n). The n = 0 step uses the
/// simplified transition f_1 = -f_0, g_1 = 1/(t·g_0).
pub fn step_x2<T: PainleveScalar>(state: &PainleveStateX2<T>) -> Result<(PainleveStateX2<T>, T, T)> {
    let n = state.n;
    let one = state.f.of_i64(1);
    let nn = state.f.of_i64(n as i64);
    let t = &state.t;
    let f = &state.f;
    let g = &state.g;
    if g.near_zero(&one) {
        return Err(Error::SingularStep { n, what: "g_n = 0" });
    }
    let gm1 = g.sub(&one);
    let n2g = nn.mul(&nn).mul(g);
    let fgm1 = f.mul(&gm1);
    let disc = n2g.sub(&f.mul(f).mul(&gm1).mul(&gm1)); // n²g - f²(g-1)²
    let tm1 = t.sub(&one);
    if tm1.near_zero(&one) {
        return Err(Error::SingularStep { n, what: "t = 1" });
    }
    // a_n = t/(t-1)² · (n²g - f²(g-1)²)/g
    let a_n = t.div(&tm1.mul(&tm1)).mul(&disc.div(g));
    let (f_next, g_next) = if n == 0 {
        (f.neg(), one.div(&t.mul(g)))
    } else {
        if disc.near_zero(&n2g) {
            return Err(Error::SingularStep { n, what: "n²g - f²(g-1)² = 0" });
        }
        let u = fgm1.sub(&nn.mul(g)); // f(g-1) - ng
        let v = fgm1.sub(&nn); // f(g-1) - n
        if v.near_zero(&one) {
            return Err(Error::SingularStep { n, what: "f(g-1) - n = 0" });
        }
        let f_next = f.mul(&u).mul(&v).div(&disc);
        let g_next = u.mul(&u).div(&t.mul(g).mul(&v.mul(&v)));
        (f_next, g_next)
    };
    // b_n = -f_{n+1} - (t+1)(n+1/2)/(t-1)
    let half = one.div(&one.of_i64(2));
    let b_n = f_next
        .neg()
        .sub(&t.add(&one).mul(&nn.add(&half)).div(&tm1));
    let next = PainleveStateX2 { n: n + 1, f: f_next, g: g_next, t: state.t.clone() };
    Ok((next, a_n, b_n))
}

/// Initial state from the seed b_0 = M_1/M_0: f_0 = b_0 + (t+1)/(2(t-1)), g_0 = 1.
pub fn init_x2<T: PainleveScalar>(t: &T, b0: &T) -> PainleveStateX2<T> {
    let one = t.of_i64(1);
    let two = t.of_i64(2);
    let f0 = b0.add(&t.add(&one).div(&two.mul(&t.sub(&one))));
    PainleveStateX2 { n: 0, f: f0, g: one, t: t.clone() }
}

/// Run the x² recurrence; returns (a_1..a_K, b_0..b_K).
pub fn run_x2<T: PainleveScalar>(t: &T, b0: &T, depth: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut state = init_x2(t, b0);
    let mut a_out = Vec::with_capacity(depth);
    let mut b_out = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let (next, a_n, b_n) = step_x2(&state)?;
        if n > 0 {
            a_out.push(a_n);
        }
        b_out.push(b_n);
        state = next;
    }
    Ok((a_out, b_out))
}

/// State of the even P = x³ + β²x recurrence (t = -1, b_n ≡ 0).
#[derive(Debug, Clone)]
pub struct PainleveStateX3<T> {
    pub n: usize,
    pub f: T,
    pub g: T,
    pub beta_sq: T,
}

/// a_n read off the state: a_n = -n²/4 + f_n(f_n+β²)/(g_n²-f_n).
pub fn a_from_state_x3<T: PainleveScalar>(state: &PainleveStateX3<T>) -> Result<T> {
    let one = state.f.of_i64(1);
    let nn = state.f.of_i64(state.n as i64);
    let denom = state.g.mul(&state.g).sub(&state.f);
    if denom.near_zero(&one) {
        return Err(Error::SingularStep { n: state.n, what: "g² - f = 0" });
    }
    let quarter = one.of_i64(1).div(&one.of_i64(4));
    Ok(nn
        .mul(&nn)
        .mul(&quarter)
        .neg()
        .add(&state.f.mul(&state.f.add(&state.beta_sq)).div(&denom)))
}

/// One step n → n+1 of the even x³ recurrence; returns (next, a_n).
pub fn step_x3_even<T: PainleveScalar>(
    state: &PainleveStateX3<T>,
) -> Result<(PainleveStateX3<T>, T)> {
    let n = state.n;
    let one = state.f.of_i64(1);
    let nn = state.f.of_i64(n as i64);
    let a_n = a_from_state_x3(state)?;
    let u = nn.mul(&state.g).sub(&state.f.of_i64(2).mul(&state.f)); // ng - 2f
    if u.near_zero(&one) {
        return Err(Error::SingularStep { n, what: "ng - 2f = 0" });
    }
    // g_{n+1} = -n/2 - 2 g a_n/(ng - 2f)
    let g_next = nn
        .div(&one.of_i64(2))
        .neg()
        .sub(&one.of_i64(2).mul(&state.g).mul(&a_n).div(&u));
    if state.f.near_zero(&one) || a_n.near_zero(&one) {
        return Err(Error::SingularStep { n, what: "f_n·a_n = 0 in f_{n+1}" });
    }
    // f_{n+1} = -(ng - 2f)² g_{n+1}²/(4 f a_n)
    let f_next = u
        .mul(&u)
        .mul(&g_next)
        .mul(&g_next)
        .div(&one.of_i64(4).mul(&state.f).mul(&a_n))
        .neg();
    let next = PainleveStateX3 {
        n: n + 1,
        f: f_next,
        g: g_next,
        beta_sq: state.beta_sq.clone(),
    };
    Ok((next, a_n))
}

/// Initial state from the seed a_1: f_1 = -β² - 1/4 - a_1, g_1 = 0.
pub fn init_x3<T: PainleveScalar>(beta_sq: &T, a1: &T) -> PainleveStateX3<T> {
    let one = beta_sq.of_i64(1);
    let quarter = one.div(&one.of_i64(4));
    let f1 = beta_sq.add(&quarter).add(a1).neg();
    PainleveStateX3 { n: 1, f: f1, g: beta_sq.of_i64(0), beta_sq: beta_sq.clone() }
}

/// Run the even x³ recurrence; returns a_1..a_K.
pub fn run_x3_even<T: PainleveScalar>(beta_sq: &T, a1: &T, depth: usize) -> Result<Vec<T>> {
    let mut state = init_x3(beta_sq, a1);
    let mut out = Vec::with_capacity(depth);
    for _ in 1..depth {
        let (next, a_n) = step_x3_even(&state)?;
        out.push(a_n);
        state = next;
    }
    if depth >= 1 {
        out.push(a_from_state_x3(&state)?);
    }
    Ok(out)
}

/// Which recurrence a quantization shape matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceShape {
    X2,
    X3Even,
}

/// Detect P = x² (any c with t ≠ 1) or P = x³ + β²x with c = 1/2,
/// by the coefficient form of P.
pub fn detect_shape(spec: &QuantizationSpec) -> Result<(RecurrenceShape, f64)> {
    let p = spec.p_poly();
    let near_zero = |z: &Complex| prec::cabs(z).to_f64() <= 1e-10;
    match spec.n() {
        2 => {
            // x²: constant and linear coefficients vanish, and t ≠ 1
            if near_zero(&p.coeff(0)) && near_zero(&p.coeff(1)) && !spec.c_is_zero() {
                return Ok((RecurrenceShape::X2, 0.0));
            }
        }
        3 => {
            // x³ + β²x with t = -1: even polynomial, c = 1/2
            if (spec.c().to_f64() - 0.5).abs() <= 1e-15
                && near_zero(&p.coeff(0))
                && near_zero(&p.coeff(2))
                && p.coeff(1).imag().to_f64().abs() <= 1e-10
            {
                return Ok((RecurrenceShape::X3Even, p.coeff(1).real().to_f64()));
            }
        }
        _ => {}
    }
    Err(Error::UnsupportedShape)
}

/// Cross-check report between the recurrence and the moment pipeline.
#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub shape: RecurrenceShape,
    pub max_rel_dev_a: f64,
    pub max_rel_dev_b: f64,
    pub first_divergence: Option<usize>,
    pub depth: usize,
}

/// Run both pipelines up to depth K and report relative deviations.
/// The seeds (b_0 for x², a_1 for x³) are taken from the moment pipeline.
pub fn crosscheck(
    spec: &QuantizationSpec,
    w: &WeightSpec,
    depth: usize,
    cfg: &PrecisionConfig,
    divergence_threshold: f64,
) -> Result<CrosscheckReport> {
    let (shape, _beta_sq) = detect_shape(spec)?;
    let bits = cfg.bits;
    let table = moment_table(w, 2 * depth + 2, cfg)?;
    let rc: RecurrenceCoeffs = recurrence_coeffs(&table, depth)?;
    let rel = |x: &Complex, y: &Complex| -> f64 {
        let d = prec::cabs(&(x.clone() - y)).to_f64();
        let s = prec::cabs(y).to_f64().max(1e-30);
        d / s
    };
    let mut max_a = 0.0f64;
    let mut max_b = 0.0f64;
    let mut first_div = None;
    match shape {
        RecurrenceShape::X2 => {
            let t = spec.derive_constants().t;
            let b0 = table.value(1).clone() / table.value(0);
            let (a_rec, b_rec) = run_x2(&t, &b0, depth)?;
            for k in 1..=depth {
                let da = rel(&a_rec[k - 1], &rc.a_k(k));
                let db = rel(&b_rec[k], &rc.b_k(k));
                if da > max_a {
                    max_a = da;
                }
                if db > max_b {
                    max_b = db;
                }
                if (da > divergence_threshold || db > divergence_threshold) && first_div.is_none() {
                    first_div = Some(k);
                }
            }
        }
        RecurrenceShape::X3Even => {
            let beta_sq_c = beta_sq_of(spec, bits);
            let a1 = rc.a_k(1);
            let a_rec = run_x3_even(&beta_sq_c, &a1, depth)?;
            for k in 1..=depth {
                let da = rel(&a_rec[k - 1], &rc.a_k(k));
                let db = prec::cabs(&rc.b_k(k)).to_f64();
                if da > max_a {
                    max_a = da;
                }
                if db > max_b {
                    max_b = db;
                }
                if da > divergence_threshold && first_div.is_none() {
                    first_div = Some(k);
                }
            }
        }
    }
    Ok(CrosscheckReport {
        shape,
        max_rel_dev_a: max_a,
        max_rel_dev_b: max_b,
        first_divergence: first_div,
        depth,
    })
}

fn beta_sq_of(spec: &QuantizationSpec, bits: u32) -> Complex {
    // β² = e_2 coefficient of P(x) = x³ + β²x
    let p = spec.p_poly();
    Complex::with_val(bits, p.coeff(1))
}
