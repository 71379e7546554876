//! Floating-point endpoint types.
//!
//! Every rigorous computation in this crate is generic over [`Endpoint`], which
//! is implemented for `f32` and `f64`. The trait adds the few things
//! `num_traits::Float` does not provide: neighbouring floats and a conversion to
//! `f64` for reporting.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// A binary floating-point type usable as an interval endpoint.
pub trait Endpoint:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest representable value strictly greater than `self`.
    fn next_up(self) -> Self;

    /// Largest representable value strictly less than `self`.
    fn next_down(self) -> Self;

    /// Lossless widening to `f64`.
    fn to_f64_exact(self) -> f64;

    /// Exact conversion of a small integer. Panics if `n` is not representable.
    fn from_count(n: u64) -> Self {
        let x = Self::from_u64(n).expect("integer out of endpoint range");
        debug_assert_eq!(x.to_u64(), Some(n), "integer {n} not exactly representable");
        x
    }

    /// `(p, e)` with `p = fl(a*b)` and `e` carrying the sign of the rounding
    /// error `a*b - p` (exactly zero iff the product is exact). `None` when
    /// over- or underflow makes the residual unreliable.
    fn split_product(self, other: Self) -> Option<(Self, Self)>;

    /// Steps `k` floats downwards.
    fn down_by(self, k: u32) -> Self {
        (0..k).fold(self, |x, _| x.next_down())
    }

    /// Steps `k` floats upwards.
    fn up_by(self, k: u32) -> Self {
        (0..k).fold(self, |x, _| x.next_up())
    }
}

impl Endpoint for f64 {
    #[inline]
    fn next_up(self) -> Self {
        f64::next_up(self)
    }

    #[inline]
    fn next_down(self) -> Self {
        f64::next_down(self)
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self
    }

    #[inline]
    fn down_by(self, k: u32) -> Self {
        let bits = self.to_bits();
        // Positive normal/subnormal values far from zero and infinity.
        if self > 0.0 && self.is_finite() && bits > k as u64 {
            f64::from_bits(bits - k as u64)
        } else if self < 0.0 && self.is_finite() && (bits & !(1 << 63)) + (k as u64) < 0x7ff0_0000_0000_0000 {
            f64::from_bits(bits + k as u64)
        } else {
            (0..k).fold(self, |x, _| x.next_down())
        }
    }

    #[inline]
    fn up_by(self, k: u32) -> Self {
        -(-self).down_by(k)
    }

    #[inline]
    fn split_product(self, other: Self) -> Option<(Self, Self)> {
        #[cfg(target_feature = "fma")]
        {
            let p = self * other;
            Some((p, self.mul_add(other, -p)))
        }
        #[cfg(not(target_feature = "fma"))]
        {
            dekker_product(self, other, 134_217_729.0, 2f64.powi(995))
        }
    }
}

impl Endpoint for f32 {
    #[inline]
    fn next_up(self) -> Self {
        f32::next_up(self)
    }

    #[inline]
    fn next_down(self) -> Self {
        f32::next_down(self)
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self as f64
    }

    #[inline]
    fn split_product(self, other: Self) -> Option<(Self, Self)> {
        // Exact in f64: 24 + 24 significant bits.
        let p = self * other;
        let exact = self as f64 * other as f64;
        if !p.is_finite() || p.abs() < f32::MIN_POSITIVE * 16.0 {
            return None;
        }
        let residual = exact - p as f64;
        let sign = if residual > 0.0 {
            1.0
        } else if residual < 0.0 {
            -1.0
        } else {
            0.0
        };
        Some((p, sign))
    }
}

/// Veltkamp/Dekker TwoProduct for platforms compiled without FMA.
#[allow(dead_code)]
#[inline]
fn dekker_product<T: Endpoint>(a: T, b: T, splitter: T, limit: T) -> Option<(T, T)> {
    let p = a * b;
    if !(a.abs() < limit && b.abs() < limit && p.is_finite()) || p.abs() < fma_safe_threshold() {
        return None;
    }
    let split = |x: T| {
        let c = splitter * x;
        let hi = c - (c - x);
        (hi, x - hi)
    };
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    Some((p, e))
}

/// Error-free transformation: `a + b = s + e` exactly (Knuth's TwoSum).
#[inline]
fn two_sum<T: Endpoint>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Below this magnitude a product may have lost bits to underflow, so the
/// FMA residual is no longer exact.
#[inline]
fn fma_safe_threshold<T: Endpoint>() -> T {
    T::min_positive_value() / T::epsilon() * T::from_count(4)
}

#[inline]
pub(crate) fn add_down<T: Endpoint>(a: T, b: T) -> T {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return if s > T::zero() { T::max_value() } else { s };
    }
    if e < T::zero() {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up<T: Endpoint>(a: T, b: T) -> T {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return if s < T::zero() { T::min_value() } else { s };
    }
    if e > T::zero() {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn mul_down<T: Endpoint>(a: T, b: T) -> T {
    if a == T::zero() || b == T::zero() {
        return T::zero();
    }
    match a.split_product(b) {
        Some((p, e)) if e < T::zero() => p.next_down(),
        Some((p, _)) => p,
        None => {
            let p = a * b;
            if p.is_infinite() && p > T::zero() {
                T::max_value()
            } else {
                p.next_down()
            }
        }
    }
}

#[inline]
pub(crate) fn mul_up<T: Endpoint>(a: T, b: T) -> T {
    if a == T::zero() || b == T::zero() {
        return T::zero();
    }
    match a.split_product(b) {
        Some((p, e)) if e > T::zero() => p.next_up(),
        Some((p, _)) => p,
        None => {
            let p = a * b;
            if p.is_infinite() && p < T::zero() {
                T::min_value()
            } else {
                p.next_up()
            }
        }
    }
}

/// Division rounded down. The residual `q*b - a` is exact via FMA away from
/// underflow; otherwise step one float outward.
#[inline]
pub(crate) fn div_down<T: Endpoint>(a: T, b: T) -> T {
    let q = a / b;
    if q == T::zero() || q.abs() < fma_safe_threshold() || !q.is_finite() {
        return q.next_down();
    }
    // q*b - a has the sign of (q - a/b) * sign(b).
    let r = q.mul_add(b, -a);
    let too_big = if b > T::zero() { r > T::zero() } else { r < T::zero() };
    if too_big {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub(crate) fn div_up<T: Endpoint>(a: T, b: T) -> T {
    let q = a / b;
    if q == T::zero() || q.abs() < fma_safe_threshold() || !q.is_finite() {
        return q.next_up();
    }
    let r = q.mul_add(b, -a);
    let too_small = if b > T::zero() { r < T::zero() } else { r > T::zero() };
    if too_small {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub(crate) fn sqrt_down<T: Endpoint>(a: T) -> T {
    let r = a.sqrt();
    if r == T::zero() {
        return r;
    }
    if r < fma_safe_threshold() {
        return r.next_down().max(T::zero());
    }
    if r.mul_add(r, -a) > T::zero() {
        r.next_down()
    } else {
        r
    }
}

#[inline]
pub(crate) fn sqrt_up<T: Endpoint>(a: T) -> T {
    let r = a.sqrt();
    if r == T::zero() {
        return if a == T::zero() { r } else { r.next_up() };
    }
    if r < fma_safe_threshold() {
        return r.next_up();
    }
    if r.mul_add(r, -a) < T::zero() {
        r.next_up()
    } else {
        r
    }
}
