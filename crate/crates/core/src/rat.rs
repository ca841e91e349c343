//! Small helpers around `BigRational`: parsing, canonical printing, logarithms
//! and certified rational roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"p"`, `"p/q"` (any sign placement, not necessarily reduced).
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// Canonical `"p/q"` form: lowest terms, `q > 0`, always with the slash.
pub fn format_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Display adaptor printing a rational in canonical `p/q` form.
pub struct Canon<'a>(pub &'a Rat);

impl fmt::Display for Canon<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn log2_int(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: BigInt = &x >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

/// Base-2 logarithm of a positive rational, accurate to f64 precision even when
/// the value itself is far outside the f64 range.
pub fn log2_rat(x: &Rat) -> f64 {
    assert!(x.is_positive(), "log of non-positive rational");
    log2_int(x.numer()) - log2_int(x.denom())
}

pub fn ln_rat(x: &Rat) -> f64 {
    log2_rat(x) * std::f64::consts::LN_2
}

pub fn to_f64(x: &Rat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let v = log2_rat(&x.abs()).exp2();
    if x.is_negative() {
        -v
    } else {
        v
    }
}

fn pow2(e: i64) -> Rat {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << (e as u64))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-e) as u64))
    }
}

/// A rational `r` with `r^n >= x` and `r` within a relative `2^-20` or so of the
/// true root. `x` must be non-negative.
pub fn root_upper(x: &Rat, n: u32) -> Rat {
    assert!(n >= 1);
    if x.is_zero() {
        return Rat::zero();
    }
    if n == 1 {
        return x.clone();
    }
    let l = log2_rat(x) / n as f64;
    let whole = l.floor();
    let frac = (l - whole).exp2() * (1.0 + 1e-9);
    let mut r = Rat::from_float(frac).unwrap() * pow2(whole as i64);
    let bump = Rat::one() + pow2(-20);
    while &r.pow(n as i32) < x {
        r *= &bump;
    }
    r
}

/// Largest integer `m` with `m <= c + sqrt(r)` for `r >= 0`.
pub fn floor_add_sqrt(c: &Rat, r: &Rat) -> Int {
    let ok = |m: &Int| {
        let d = BigRational::from_integer(m.clone()) - c;
        !d.is_positive() || &(&d * &d) <= r
    };
    let guess = to_f64(c) + to_f64(r).sqrt();
    let mut m = if guess.is_finite() {
        BigInt::from_f64(guess.floor()).unwrap()
    } else {
        c.floor().to_integer()
    };
    while !ok(&m) {
        m -= 1;
    }
    loop {
        let next = &m + 1;
        if ok(&next) {
            m = next;
        } else {
            break;
        }
    }
    m
}

/// Smallest integer `m` with `m >= c - sqrt(r)` for `r >= 0`.
pub fn ceil_sub_sqrt(c: &Rat, r: &Rat) -> Int {
    -floor_add_sqrt(&-c, r)
}

/// Nearest integer, halves rounded up.
pub fn round_half_up(x: &Rat) -> Int {
    (x + rat(1, 2)).floor().to_integer()
}

pub fn lcm_upto(n: usize) -> u32 {
    (1..=n as u32).fold(1u32, |acc, k| acc.lcm(&k))
}
