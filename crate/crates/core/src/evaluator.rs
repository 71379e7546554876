//! Interval evaluation of the reduced sum and the absorbed-term bound, plus
//! plain floating-point oracles used by tests and the `scan` command.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{pow_neg_sigma, Interval, DEFAULT_ULP_SLOP};
use crate::reduction::{classify, primes_up_to, ReductionPlan};
use crate::scalar::{self, Endpoint};

/// One θ interval per core prime, in the plan's core-prime order.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaAssignment<T> {
    values: Vec<Interval<T>>,
}

impl<T: Endpoint> ThetaAssignment<T> {
    pub fn new(plan: &ReductionPlan, values: Vec<Interval<T>>) -> Result<Self> {
        if values.len() != plan.core_primes().len() {
            return Err(Error::InvalidInput(format!(
                "expected {} theta intervals for N={}, got {}",
                plan.core_primes().len(),
                plan.n(),
                values.len()
            )));
        }
        let upper = Interval::<T>::two_pi().hi();
        if let Some(bad) = values.iter().find(|v| v.lo() < T::zero() || v.hi() > upper) {
            return Err(Error::InvalidInput(format!("theta interval {bad} outside [0, 2π]")));
        }
        Ok(Self { values })
    }

    pub fn from_map(plan: &ReductionPlan, map: &BTreeMap<u64, Interval<T>>) -> Result<Self> {
        if map.len() != plan.core_primes().len() {
            return Err(Error::InvalidInput("theta map does not match the core primes".into()));
        }
        let values = plan
            .core_primes()
            .iter()
            .map(|p| map.get(p).copied().ok_or_else(|| Error::InvalidInput(format!("missing theta for prime {p}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(plan, values)
    }

    /// The same interval for every core prime.
    pub fn uniform(plan: &ReductionPlan, value: Interval<T>) -> Result<Self> {
        Self::new(plan, vec![value; plan.core_primes().len()])
    }

    pub fn values(&self) -> &[Interval<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn from_raw(values: Vec<Interval<T>>) -> Self {
        Self { values }
    }
}

/// Core-prime count up to which the Taylor form is used.
const MAX_CENTERED: usize = 16;

/// Largest per-term phase radius at which the Taylor form alone is used;
/// wider boxes are also enclosed by the natural extension.
const NATURAL_PHASE_RADIUS: f64 = 0.5;

#[derive(Debug, Clone)]
struct CompiledTerm<T> {
    coefficient: Interval<T>,
    /// (core prime index, exponent)
    phase: Vec<(usize, T)>,
}

/// Evaluator bound to one plan and one σ interval. Coefficients `n^-σ` are
/// computed once at construction and only read afterwards.
#[derive(Debug, Clone)]
pub struct Evaluator<'a, T> {
    plan: &'a ReductionPlan,
    sigma: Interval<T>,
    ulp_slop: u32,
    terms: Vec<CompiledTerm<T>>,
    theta2_index: Option<usize>,
    singleton_sum: Interval<T>,
    pairs: Vec<(Interval<T>, Interval<T>)>,
}

impl<'a, T: Endpoint> Evaluator<'a, T> {
    pub fn new(plan: &'a ReductionPlan, sigma: Interval<T>, ulp_slop: u32) -> Result<Self> {
        if sigma.lo() < T::zero() {
            return Err(Error::InvalidInput(format!("sigma {sigma} must be nonnegative")));
        }
        let coef = |n: u64| pow_neg_sigma(n, sigma, ulp_slop);
        let terms = plan
            .core_terms()
            .iter()
            .map(|term| {
                let phase = term
                    .exponents
                    .iter()
                    .map(|(p, e)| (plan.core_index(p).expect("core term uses core primes"), T::from_count(e as u64)))
                    .collect();
                Ok(CompiledTerm { coefficient: coef(term.n)?, phase })
            })
            .collect::<Result<Vec<_>>>()?;
        let singleton_sum =
            plan.singleton_primes().iter().try_fold(Interval::zero(), |acc, &p| Ok::<_, Error>(acc + coef(p)?))?;
        let pairs = plan.pair_primes().iter().map(|&p| Ok((coef(p)?, coef(2 * p)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { plan, sigma, ulp_slop, terms, theta2_index: plan.core_index(2), singleton_sum, pairs })
    }

    pub fn plan(&self) -> &ReductionPlan {
        self.plan
    }

    pub fn sigma(&self) -> Interval<T> {
        self.sigma
    }

    /// Enclosure of `|Σ_core n^-σ e^{-i·angle_n}|` over the box.
    pub fn core_magnitude(&self, theta: &ThetaAssignment<T>) -> Result<Interval<T>> {
        if theta.len() != self.plan.core_primes().len() {
            return Err(Error::InvalidInput("theta assignment does not match the plan".into()));
        }
        Ok(self.core_magnitude_unchecked(theta.values()))
    }

    /// Re and Im are enclosed by a second-order Taylor form about the box
    /// midpoint `m`: with `D_n = Σ_p e_p r_p` the phase radius of term `n`,
    ///
    /// `cos(φ_n(m) + δ) ∈ cos φ_n(m) - δ sin φ_n(m) ± D_n²/2`
    ///
    /// (and likewise for sin), so only one point sin/cos is needed per term.
    /// For boxes whose phase radius exceeds `NATURAL_PHASE_RADIUS` the natural
    /// extension is computed too and the two enclosures are intersected.
    pub(crate) fn core_magnitude_unchecked(&self, theta: &[Interval<T>]) -> Interval<T> {
        let k = theta.len();
        if k == 0 || k > MAX_CENTERED {
            return self.natural_magnitude(theta);
        }
        let mut mid = [T::zero(); MAX_CENTERED];
        let mut radius = [T::zero(); MAX_CENTERED];
        for (p, t) in theta.iter().enumerate() {
            let m = t.midpoint();
            mid[p] = m;
            radius[p] = scalar::add_up(m, -t.lo()).max(scalar::add_up(t.hi(), -m));
        }
        // d(Re)/dθ_p = -Σ c e_p sin φ,  d(Im)/dθ_p = -Σ c e_p cos φ  (at m)
        let mut grad_re = [Interval::zero(); MAX_CENTERED];
        let mut grad_im = [Interval::zero(); MAX_CENTERED];
        let (mut re, mut im) = (Interval::zero(), Interval::zero());
        let mut remainder = T::zero();
        let mut max_phase_radius = T::zero();
        let two = T::one() + T::one();
        for term in &self.terms {
            let c = term.coefficient;
            let Some((&(i, e), rest)) = term.phase.split_first() else {
                re = re + c;
                continue;
            };
            let point = |j: usize| Interval::raw(mid[j], mid[j]);
            let mut angle = point(i).scale(e);
            let mut d = scalar::mul_up(radius[i], e);
            for &(j, f) in rest {
                angle = angle + point(j).scale(f);
                d = scalar::add_up(d, scalar::mul_up(radius[j], f));
            }
            max_phase_radius = max_phase_radius.max(d);
            let (sin, cos) = angle.sin_cos_ulps(self.ulp_slop);
            let c_sin = c * sin;
            let c_cos = c * cos;
            re = re + c_cos;
            im = im - c_sin;
            for &(j, f) in &term.phase {
                grad_re[j] = grad_re[j] + c_sin.scale(f);
                grad_im[j] = grad_im[j] + c_cos.scale(f);
            }
            remainder = scalar::add_up(remainder, scalar::div_up(scalar::mul_up(c.hi(), scalar::mul_up(d, d)), two));
        }
        let spread = |grad: &[Interval<T>]| {
            let linear = grad
                .iter()
                .zip(&radius[..k])
                .fold(T::zero(), |acc, (g, &r)| scalar::add_up(acc, scalar::mul_up(g.mag(), r)));
            let s = scalar::add_up(linear, remainder);
            Interval::raw(-s, s)
        };
        let mut re = re + spread(&grad_re[..k]);
        let mut im = im + spread(&grad_im[..k]);
        if max_phase_radius > T::from_f64(NATURAL_PHASE_RADIUS).expect("representable") {
            let (re_nat, im_nat) = self.natural_parts(theta);
            re = re.intersect(&re_nat).unwrap_or(re);
            im = im.intersect(&im_nat).unwrap_or(im);
        }
        (re.sqr() + im.sqr()).sqrt().expect("sum of squares is nonnegative")
    }

    /// Natural interval extension only.
    pub fn natural_magnitude(&self, theta: &[Interval<T>]) -> Interval<T> {
        let (re, im) = self.natural_parts(theta);
        (re.sqr() + im.sqr()).sqrt().expect("sum of squares is nonnegative")
    }

    fn natural_parts(&self, theta: &[Interval<T>]) -> (Interval<T>, Interval<T>) {
        let mut re = Interval::zero();
        let mut im = Interval::zero();
        for term in &self.terms {
            let mut phase = term.phase.iter();
            let Some(&(i, e)) = phase.next() else {
                re = re + term.coefficient;
                continue;
            };
            let angle = phase.fold(theta[i].scale(e), |acc, &(j, f)| acc + theta[j].scale(f));
            let (sin, cos) = angle.sin_cos_ulps(self.ulp_slop);
            re = re + term.coefficient * cos;
            im = im - term.coefficient * sin;
        }
        (re, im)
    }

    /// Enclosure of the absorbed singleton and pair moduli. `theta2` is
    /// ignored when the plan has no pair primes.
    pub fn absorbed_bound(&self, theta2: Interval<T>) -> Interval<T> {
        if self.pairs.is_empty() {
            return self.singleton_sum;
        }
        let cos2 = theta2.sin_cos_ulps(self.ulp_slop).1;
        let two = T::one() + T::one();
        self.pairs.iter().fold(self.singleton_sum, |acc, &(a, b)| {
            let radicand = a.sqr() + b.sqr() + (a * b).scale(two) * cos2;
            acc + radicand.sqrt().expect("cosine-rule radicand is a squared modulus")
        })
    }

    /// `absorbed_bound` reading θ_2 out of a box's assignment.
    pub(crate) fn absorbed_bound_for(&self, theta: &[Interval<T>]) -> Interval<T> {
        match self.theta2_index {
            Some(i) => self.absorbed_bound(theta[i]),
            None => self.absorbed_bound(Interval::zero()),
        }
    }
}

/// Enclosure of the core-sum modulus over `sigma × theta`.
pub fn core_magnitude<T: Endpoint>(
    plan: &ReductionPlan,
    sigma: Interval<T>,
    theta: &ThetaAssignment<T>,
) -> Result<Interval<T>> {
    Evaluator::new(plan, sigma, DEFAULT_ULP_SLOP)?.core_magnitude(theta)
}

/// Enclosure of `Σ_singleton p^-σ + Σ_pair |p^-σ + (2p)^-σ e^{-iθ_2}|`.
pub fn absorbed_bound<T: Endpoint>(
    plan: &ReductionPlan,
    sigma: Interval<T>,
    theta2: Interval<T>,
) -> Result<Interval<T>> {
    Ok(Evaluator::new(plan, sigma, DEFAULT_ULP_SLOP)?.absorbed_bound(theta2))
}

// ---------------------------------------------------------------------------
// Non-rigorous double-precision oracles. Never used on the certification path.

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// `ζ_N(σ + it)` by direct summation.
pub fn point_eval(n: u64, sigma: f64, t: f64) -> ComplexPoint {
    let (mut re, mut im) = (0.0, 0.0);
    for k in 1..=n {
        let ln = (k as f64).ln();
        let c = (-sigma * ln).exp();
        let (s, co) = (t * ln).sin_cos();
        re += c * co;
        im -= c * s;
    }
    ComplexPoint { re, im }
}

/// `ζ_N` in the θ parameterization: term `n` has phase `Σ e_p(n)·θ_p`.
/// `angles` must hold a θ for every prime `<= N`.
pub fn point_eval_angles(n: u64, sigma: f64, angles: &BTreeMap<u64, f64>) -> Result<ComplexPoint> {
    if let Some(p) = primes_up_to(n).into_iter().find(|p| !angles.contains_key(p)) {
        return Err(Error::InvalidInput(format!("missing angle for prime {p}")));
    }
    let (mut re, mut im) = (0.0, 0.0);
    for k in 1..=n {
        let phase: f64 = crate::reduction::factorize(k)?.iter().map(|(p, e)| e as f64 * angles[&p]).sum();
        let c = (k as f64).powf(-sigma);
        re += c * phase.cos();
        im -= c * phase.sin();
    }
    Ok(ComplexPoint { re, im })
}

/// Modulus of the core sum at a point.
pub fn point_eval_theta(plan: &ReductionPlan, sigma: f64, theta: &BTreeMap<u64, f64>) -> Result<f64> {
    if theta.len() != plan.core_primes().len() || plan.core_primes().iter().any(|p| !theta.contains_key(p)) {
        return Err(Error::InvalidInput("theta points do not match the core primes".into()));
    }
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for term in plan.core_terms() {
        let phase: f64 = term.exponents.iter().map(|(p, e)| e as f64 * theta[&p]).sum();
        let c = (term.n as f64).powf(-sigma);
        re += c * phase.cos();
        im -= c * phase.sin();
    }
    Ok(re.hypot(im))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub sigma: f64,
    pub t: f64,
    pub modulus: f64,
}

/// Grid search for the smallest `|ζ_N(σ+it)|` over a rectangle, then pattern
/// refinement with halving steps until both steps fall below `1e-12`.
pub fn scan_min_modulus(
    n: u64,
    sigma_range: (f64, f64),
    t_range: (f64, f64),
    grid: (usize, usize),
) -> Result<ScanResult> {
    let (s0, s1) = sigma_range;
    let (t0, t1) = t_range;
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if !(s0.is_finite() && s1.is_finite() && s0 <= s1 && t0.is_finite() && t1.is_finite() && t0 <= t1) {
        return Err(Error::InvalidInput("scan ranges must be finite and ordered".into()));
    }
    if grid.0 < 2 || grid.1 < 2 {
        return Err(Error::InvalidInput("scan grid must be at least 2x2".into()));
    }
    // Only plan validity matters here.
    classify(n)?;

    let logs: Vec<f64> = (1..=n).map(|k| (k as f64).ln()).collect();
    let hs = (s1 - s0) / (grid.0 - 1) as f64;
    let ht = (t1 - t0) / (grid.1 - 1) as f64;
    let sigmas: Vec<f64> = (0..grid.0).map(|i| s0 + i as f64 * hs).collect();
    let coefs: Vec<Vec<f64>> = sigmas.iter().map(|&s| logs.iter().map(|l| (-s * l).exp()).collect()).collect();

    let mut best = ScanResult { sigma: s0, t: t0, modulus: f64::INFINITY };
    let mut phasors = vec![(0.0, 0.0); logs.len()];
    for j in 0..grid.1 {
        let t = t0 + j as f64 * ht;
        for (ph, l) in phasors.iter_mut().zip(&logs) {
            let (s, c) = (t * l).sin_cos();
            *ph = (c, -s);
        }
        for (i, row) in coefs.iter().enumerate() {
            let (re, im) =
                row.iter().zip(&phasors).fold((0.0, 0.0), |(re, im), (c, (pr, pi))| (re + c * pr, im + c * pi));
            let m = re.hypot(im);
            if m < best.modulus {
                best = ScanResult { sigma: sigmas[i], t, modulus: m };
            }
        }
    }

    let eval = |s: f64, t: f64| point_eval(n, s, t).modulus();
    let (mut ds, mut dt) = (hs.max(1e-3 * (s1 - s0)), ht.max(1e-3 * (t1 - t0)));
    let mut iterations = 0;
    while (ds >= 1e-12 || dt >= 1e-12) && iterations < 100_000 {
        iterations += 1;
        let mut moved = false;
        for (a, b) in [(ds, 0.0), (-ds, 0.0), (0.0, dt), (0.0, -dt)] {
            let s = (best.sigma + a).clamp(s0, s1);
            let t = (best.t + b).clamp(t0, t1);
            let m = eval(s, t);
            if m < best.modulus {
                best = ScanResult { sigma: s, t, modulus: m };
                moved = true;
            }
        }
        if !moved {
            ds *= 0.5;
            dt *= 0.5;
        }
    }
    Ok(best)
}
