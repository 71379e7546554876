//! Outward-rounded interval arithmetic.
//!
//! `+`, `-`, `*`, `sqr` and `sqrt` are rounded exactly in the directed sense
//! using error-free transformations (TwoSum and FMA residuals), so intervals
//! with exactly representable results stay tight. The transcendental
//! enclosures call the platform libm at the endpoints and step the result
//! outward by a configurable number of ulps.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{self, Endpoint};

/// Default outward widening, in ulps, applied to libm results.
pub const DEFAULT_ULP_SLOP: u32 = 4;

/// Below this radius `sin_cos_ulps` uses a one-point Lipschitz enclosure,
/// which is as tight as the endpoint hull up to a few ulps.
const NARROW_RADIUS: f64 = 1e-9;

/// A closed interval `[lo, hi]` with `lo <= hi` and no NaN endpoints.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Endpoint> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidInput("NaN interval endpoint".into()));
        }
        if lo > hi {
            return Err(Error::InvalidInput(format!("reversed interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: T) -> Result<Self> {
        Self::new(x, x)
    }

    /// Caller guarantees `lo <= hi` and neither is NaN.
    #[inline]
    pub(crate) fn raw(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "raw interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// The exact integer `n` as a degenerate interval.
    pub fn from_count(n: u64) -> Self {
        let x = T::from_count(n);
        Self { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self { lo: T::zero(), hi: T::zero() }
    }

    pub fn one() -> Self {
        Self { lo: T::one(), hi: T::one() }
    }

    /// `[nextDown(pi), nextUp(pi)]` around the correctly rounded constant.
    pub fn pi() -> Self {
        let p = T::PI();
        Self { lo: p.next_down(), hi: p.next_up() }
    }

    /// Enclosure of 2π; doubling is exact.
    pub fn two_pi() -> Self {
        let p = Self::pi();
        let two = T::one() + T::one();
        Self { lo: p.lo * two, hi: p.hi * two }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    /// Width rounded upward.
    pub fn width(&self) -> T {
        scalar::add_up(self.hi, -self.lo)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// `max |x|` over the interval.
    pub fn mag(&self) -> T {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn is_positive(&self) -> bool {
        self.lo > T::zero()
    }

    pub fn is_negative(&self) -> bool {
        self.hi < T::zero()
    }

    pub fn midpoint(&self) -> T {
        let two = T::one() + T::one();
        self.lo + (self.hi - self.lo) / two
    }

    /// Halves the interval at its midpoint. Both halves share the midpoint and
    /// are strictly narrower than `self`.
    pub fn split(&self) -> Result<(Self, Self)> {
        let mid = self.midpoint();
        if !(self.lo < mid && mid < self.hi) {
            return Err(Error::CannotSplit { lo: self.lo.to_f64_exact(), hi: self.hi.to_f64_exact() });
        }
        Ok((Self { lo: self.lo, hi: mid }, Self { lo: mid, hi: self.hi }))
    }

    /// Multiplication by an exact scalar.
    #[inline]
    pub fn scale(self, k: T) -> Self {
        if k == T::one() {
            self
        } else if k >= T::zero() {
            Self { lo: scalar::mul_down(self.lo, k), hi: scalar::mul_up(self.hi, k) }
        } else {
            Self { lo: scalar::mul_down(self.hi, k), hi: scalar::mul_up(self.lo, k) }
        }
    }

    /// `{x^2 : x in self}`; never has a negative lower endpoint.
    #[inline]
    pub fn sqr(self) -> Self {
        if self.lo >= T::zero() {
            Self { lo: scalar::mul_down(self.lo, self.lo), hi: scalar::mul_up(self.hi, self.hi) }
        } else if self.hi <= T::zero() {
            Self { lo: scalar::mul_down(self.hi, self.hi), hi: scalar::mul_up(self.lo, self.lo) }
        } else {
            let m = (-self.lo).max(self.hi);
            Self { lo: T::zero(), hi: scalar::mul_up(m, m) }
        }
    }

    /// Square root over `self ∩ [0, ∞)`. A negative lower endpoint (round-off
    /// from a sum of squares) is clamped to zero.
    pub fn sqrt(self) -> Result<Self> {
        if self.hi < T::zero() {
            return Err(self.domain("sqrt"));
        }
        let lo = self.lo.max(T::zero());
        Ok(Self { lo: scalar::sqrt_down(lo), hi: scalar::sqrt_up(self.hi) })
    }

    pub fn exp(self) -> Self {
        self.exp_ulps(DEFAULT_ULP_SLOP)
    }

    pub fn exp_ulps(self, ulps: u32) -> Self {
        let lo = if self.lo == T::zero() { T::one() } else { self.lo.exp().down_by(ulps).max(T::zero()) };
        let hi = if self.hi == T::zero() { T::one() } else { self.hi.exp().up_by(ulps) };
        Self { lo, hi }
    }

    pub fn ln(self) -> Result<Self> {
        self.ln_ulps(DEFAULT_ULP_SLOP)
    }

    pub fn ln_ulps(self, ulps: u32) -> Result<Self> {
        if self.lo <= T::zero() {
            return Err(self.domain("log"));
        }
        let at = |x: T, outward: fn(T, u32) -> T| {
            if x == T::one() {
                T::zero()
            } else {
                outward(x.ln(), ulps)
            }
        };
        Ok(Self { lo: at(self.lo, T::down_by), hi: at(self.hi, T::up_by) })
    }

    pub fn cos(self) -> Self {
        self.sin_cos_ulps(DEFAULT_ULP_SLOP).1
    }

    pub fn sin(self) -> Self {
        self.sin_cos_ulps(DEFAULT_ULP_SLOP).0
    }

    /// Joint enclosure of `(sin, cos)` over the interval.
    ///
    /// Extrema are detected by bracketing `x / π` with the π enclosure; a
    /// spurious extremum only widens the result toward ±1.
    pub fn sin_cos_ulps(self, ulps: u32) -> (Self, Self) {
        if self.lo == self.hi {
            let (s, c) = self.lo.sin_cos();
            let widen = |x: T| Self { lo: x.down_by(ulps), hi: x.up_by(ulps) }.clamp_unit();
            return (widen(s), widen(c));
        }
        let full = Self { lo: -T::one(), hi: T::one() };
        let radius = scalar::add_up(self.hi, -self.lo) / (T::one() + T::one());
        if radius < T::from_f64(NARROW_RADIUS).expect("representable") {
            // Lipschitz bound about the midpoint: |sin x - sin x0| <= |x - x0|.
            let x0 = self.midpoint();
            let w = scalar::add_up(x0, -self.lo).max(scalar::add_up(self.hi, -x0));
            let (s, c) = x0.sin_cos();
            let around =
                |v: T| Self { lo: scalar::add_down(v.down_by(ulps), -w), hi: scalar::add_up(v.up_by(ulps), w) };
            return (around(s).clamp_unit(), around(c).clamp_unit());
        }
        let pi = Self::pi();
        let two = T::one() + T::one();
        if scalar::add_down(self.hi, -self.lo) >= pi.lo * two {
            return (full, full);
        }

        // Bracket lo/π from below and hi/π from above, using an enclosure of
        // 1/π (the correctly rounded constant plus one float either way).
        let inv_lo = T::FRAC_1_PI().next_down();
        let inv_hi = T::FRAC_1_PI().next_up();
        let q_lo = scalar::mul_down(self.lo, if self.lo >= T::zero() { inv_lo } else { inv_hi });
        let q_hi = scalar::mul_up(self.hi, if self.hi >= T::zero() { inv_hi } else { inv_lo });
        // Far from the origin the float spacing exceeds π; give up on shape.
        let limit = T::from_count(1 << 40);
        if q_lo.abs() > limit || q_hi.abs() > limit {
            return (full, full);
        }

        let (sa, ca) = self.lo.sin_cos();
        let (sb, cb) = self.hi.sin_cos();
        let endpoint_hull = |a: T, b: T| Self { lo: a.min(b).down_by(ulps), hi: a.max(b).up_by(ulps) };
        let mut cos = endpoint_hull(ca, cb);
        let mut sin = endpoint_hull(sa, sb);

        // cos peaks at kπ (even k: +1, odd k: -1).
        apply_extrema(&mut cos, ceil_i64(q_lo), floor_i64(q_hi));
        // sin peaks at (j + 1/2)π (even j: +1, odd j: -1).
        let half = T::one() / two;
        apply_extrema(&mut sin, ceil_i64(scalar::add_down(q_lo, -half)), floor_i64(scalar::add_up(q_hi, -half)));

        (sin.clamp_unit(), cos.clamp_unit())
    }

    fn clamp_unit(self) -> Self {
        Self { lo: self.lo.max(-T::one()), hi: self.hi.min(T::one()) }
    }

    fn domain(&self, op: &'static str) -> Error {
        Error::Domain { op, lo: self.lo.to_f64_exact(), hi: self.hi.to_f64_exact() }
    }
}

/// Floor of a float of magnitude at most 2^40, via truncation.
#[inline]
fn floor_i64<T: Endpoint>(x: T) -> i64 {
    let t = x.to_i64().expect("bounded magnitude");
    if T::from_i64(t).expect("exact") > x {
        t - 1
    } else {
        t
    }
}

#[inline]
fn ceil_i64<T: Endpoint>(x: T) -> i64 {
    -floor_i64(-x)
}

/// Widens `iv` with +1 if an even integer lies in `[k_min, k_max]` and with -1
/// if an odd one does.
fn apply_extrema<T: Endpoint>(iv: &mut Interval<T>, k_min: i64, k_max: i64) {
    if k_min > k_max {
        return;
    }
    let (has_even, has_odd) = if k_max > k_min { (true, true) } else { (k_min % 2 == 0, k_min % 2 != 0) };
    if has_even {
        iv.hi = T::one();
    }
    if has_odd {
        iv.lo = -T::one();
    }
}

/// Enclosure of `{ n^(-σ) : σ ∈ sigma }`.
///
/// `n = 1` gives `[1, 1]`. A degenerate integer `σ` with `n^σ` exactly
/// representable is evaluated as a directed reciprocal; everything else goes
/// through `exp(-σ·log n)`.
pub fn pow_neg_sigma<T: Endpoint>(n: u64, sigma: Interval<T>, ulps: u32) -> Result<Interval<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("n^(-sigma) needs n >= 1".into()));
    }
    if n == 1 {
        return Ok(Interval::one());
    }
    if let Some(q) = exact_integer_power::<T>(n, sigma) {
        return Ok(Interval::raw(scalar::div_down(T::one(), q), scalar::div_up(T::one(), q)));
    }
    let log_n = Interval::from_count(n).ln_ulps(ulps)?;
    Ok((-(sigma * log_n)).exp_ulps(ulps))
}

fn exact_integer_power<T: Endpoint>(n: u64, sigma: Interval<T>) -> Option<T> {
    let s = sigma.lo;
    if !sigma.is_degenerate() || s != s.floor() || s < T::one() || s > T::from_count(64) {
        return None;
    }
    let m = s.to_u32()?;
    // 2 / ε = 2^(mantissa digits): every integer up to it is exact.
    let limit = (T::one() + T::one()) / T::epsilon();
    let q = (n as u128).checked_pow(m)?;
    let qf = T::from_u128(q)?;
    (qf <= limit).then_some(qf)
}

impl<T: Endpoint> Add for Interval<T> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self { lo: scalar::add_down(self.lo, rhs.lo), hi: scalar::add_up(self.hi, rhs.hi) }
    }
}

impl<T: Endpoint> Sub for Interval<T> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self { lo: scalar::add_down(self.lo, -rhs.hi), hi: scalar::add_up(self.hi, -rhs.lo) }
    }
}

impl<T: Endpoint> Neg for Interval<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

impl<T: Endpoint> Mul for Interval<T> {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        // Nonnegative left factor is the common case (coefficients n^-σ).
        if self.lo >= T::zero() {
            return Self {
                lo: scalar::mul_down(self.lo, rhs.lo).min(scalar::mul_down(self.hi, rhs.lo)),
                hi: scalar::mul_up(self.lo, rhs.hi).max(scalar::mul_up(self.hi, rhs.hi)),
            };
        }
        let lo = scalar::mul_down(self.lo, rhs.lo)
            .min(scalar::mul_down(self.lo, rhs.hi))
            .min(scalar::mul_down(self.hi, rhs.lo))
            .min(scalar::mul_down(self.hi, rhs.hi));
        let hi = scalar::mul_up(self.lo, rhs.lo)
            .max(scalar::mul_up(self.lo, rhs.hi))
            .max(scalar::mul_up(self.hi, rhs.lo))
            .max(scalar::mul_up(self.hi, rhs.hi));
        Self { lo, hi }
    }
}

impl<T: fmt::Debug> fmt::Debug for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl<T: Endpoint> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Serializes as a two-element array of shortest round-trip decimals.
impl<T: Endpoint> Serialize for Interval<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.lo.to_f64_exact())?;
        tup.serialize_element(&self.hi.to_f64_exact())?;
        tup.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn rejects_nan_and_reversed() {
        assert!(matches!(Interval::new(f64::NAN, 1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(Interval::point(f64::NAN), Err(Error::InvalidInput(_))));
        assert!(Interval::new(2.0, 1.0).is_err());
    }

    #[test]
    fn square_of_four_five() {
        let x = iv(4.0, 5.0);
        let sq = x * x;
        assert!(sq.lo() <= 16.0 && sq.hi() >= 25.0);
        assert!(sq.lo() >= 16.0f64.down_by(2) && sq.hi() <= 25.0f64.up_by(2));
    }

    #[test]
    fn additive_identity() {
        for x in [0.1, -3.7, 1e300, 5e-324] {
            assert_eq!(iv(x, x) + Interval::zero(), iv(x, x));
        }
    }

    #[test]
    fn mixed_sign_product() {
        // endpoint products: -2*-1=2, -2*4=-8, 3*-1=-3, 3*4=12
        let p = iv(-2.0, 3.0) * iv(-1.0, 4.0);
        assert!(p.lo() <= -8.0 && p.hi() >= 12.0);
    }

    #[test]
    fn sqrt_examples() {
        let r = iv(4.0, 9.0).sqrt().unwrap();
        assert!(r.lo() <= 2.0 && r.hi() >= 3.0);
        assert!(r.lo() >= 2.0f64.next_down() && r.hi() <= 3.0f64.next_up());
        assert_eq!(Interval::<f64>::zero().sqrt().unwrap(), Interval::zero());
        assert!(matches!(iv(-2.0, -1.0).sqrt(), Err(Error::Domain { op: "sqrt", .. })));
        assert_eq!(iv(-1e-17, 4.0).sqrt().unwrap(), iv(0.0, 2.0));
    }

    #[test]
    fn exp_log_identities() {
        let e = Interval::<f64>::zero().exp();
        assert!(e.contains(1.0) && e.hi() <= 1.0f64.up_by(2) && e.lo() >= 1.0f64.down_by(2));
        assert!(Interval::<f64>::one().ln().unwrap().contains(0.0));
        let seven = Interval::<f64>::from_count(7);
        assert!(seven.ln().unwrap().exp().contains(7.0));
        assert!(matches!(iv(0.0, 1.0).ln(), Err(Error::Domain { op: "log", .. })));
    }

    #[test]
    fn cos_wide_and_point() {
        assert_eq!(iv(0.0, 7.0).cos(), iv(-1.0, 1.0));
        assert!(Interval::<f64>::zero().cos().contains(1.0));
        let s = iv(1.0, 2.0).sin();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() <= 1.0f64.sin().min(2.0f64.sin()));
        let c = iv(3.0, 3.5).cos();
        assert_eq!(c.lo(), -1.0);
        let c = iv(-0.5, 0.25).cos();
        assert_eq!(c.hi(), 1.0);
        assert!(c.lo() <= 0.5f64.cos());
    }

    #[test]
    fn cos_near_half_pi_straddles_zero() {
        let x = std::f64::consts::FRAC_PI_2;
        let c = iv(x, x).cos();
        // cos(x) = π/2 - x + O(ε³) ≈ 6.123e-17
        assert!(c.contains(6.123233995736766e-17));
        assert!(c.width() < 1e-30);
    }

    #[test]
    fn pow_neg_sigma_examples() {
        let one = Interval::<f64>::one();
        assert_eq!(pow_neg_sigma(1, iv(1.0, 1.5), 4).unwrap(), one);
        let half = pow_neg_sigma(2, one, 4).unwrap();
        assert!(half.contains(0.5) && half.width() <= 4.0 * f64::EPSILON * 0.5);
        let r17 = pow_neg_sigma(17, one, 4).unwrap();
        assert!(r17.lo() < 1.0 / 17.0 + 1e-17 && r17.hi() > 1.0 / 17.0 - 1e-17);
        assert!(pow_neg_sigma(0, one, 4).is_err());
        let wide = pow_neg_sigma(3, iv(1.0, 2.0), 4).unwrap();
        assert!(wide.lo() <= 1.0 / 9.0 && wide.hi() >= 1.0 / 3.0);
    }

    #[test]
    fn split_examples() {
        assert_eq!(iv(0.0, 2.0).split().unwrap(), (iv(0.0, 1.0), iv(1.0, 2.0)));
        assert_eq!(iv(4.0, 5.0).split().unwrap(), (iv(4.0, 4.5), iv(4.5, 5.0)));
        let s = iv(1.0, 1.0 + 2f64.powi(-16));
        let (a, b) = s.split().unwrap();
        assert_eq!(a.lo(), s.lo());
        assert_eq!(b.hi(), s.hi());
        assert_eq!(a.hi(), b.lo());
        assert!(matches!(iv(3.0, 3.0).split(), Err(Error::CannotSplit { .. })));
        assert!(iv(1.0, 1.0f64.next_up()).split().is_err());
    }

    #[test]
    fn pi_enclosures() {
        let pi = Interval::<f64>::pi();
        assert!(pi.lo() < std::f64::consts::PI && std::f64::consts::PI < pi.hi());
        let tp = Interval::<f32>::two_pi();
        assert!((tp.lo() as f64) < std::f64::consts::TAU && std::f64::consts::TAU < tp.hi() as f64);
    }

    #[test]
    fn serializes_as_pair() {
        let s = serde_json::to_string(&iv(0.1, 2.0)).unwrap();
        assert_eq!(s, "[0.1,2.0]");
    }
}
