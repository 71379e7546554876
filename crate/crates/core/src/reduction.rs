//! Per-N reduction of the partial sum to a small set of search variables.
//!
//! With `θ_p = t·log p`, term `n = Π p^e` carries the phase `Σ e·θ_p`. A prime
//! that divides only one term (`p <= N < 2p`) contributes a free phase and is
//! absorbed as `p^-σ`. A prime `p >= 3` dividing exactly `p` and `2p` contributes
//! two phasors whose relative angle is `θ_2`; their combined modulus is given by
//! the cosine rule and does not depend on `θ_p`. All remaining primes stay as
//! search coordinates.

use serde::Serialize;

use crate::error::{Error, Result};

/// `n = Π p^e`, primes ascending, every exponent at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ExponentVector {
    factors: Vec<(u64, u32)>,
}

impl ExponentVector {
    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// The integer this vector factors.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    fn restricted_to(&self, primes: &[u64]) -> Self {
        Self { factors: self.factors.iter().copied().filter(|(p, _)| primes.contains(p)).collect() }
    }
}

impl FromIterator<(u64, u32)> for ExponentVector {
    fn from_iter<I: IntoIterator<Item = (u64, u32)>>(iter: I) -> Self {
        let mut factors: Vec<_> = iter.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        Self { factors }
    }
}

/// Trial division; adequate for `n <= 10^6`.
pub fn factorize(n: u64) -> Result<ExponentVector> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(ExponentVector { factors })
}

/// Primes `<= n` by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// A term of the core sum and its exponents over the core primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreTerm {
    pub n: u64,
    pub exponents: ExponentVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionPlan {
    n: u64,
    core_primes: Vec<u64>,
    pair_primes: Vec<u64>,
    singleton_primes: Vec<u64>,
    core_terms: Vec<CoreTerm>,
}

/// Compact form of a plan for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanSummary {
    pub core: Vec<u64>,
    pub pairs: Vec<u64>,
    pub singletons: Vec<u64>,
    pub core_terms: usize,
}

impl ReductionPlan {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn core_primes(&self) -> &[u64] {
        &self.core_primes
    }

    pub fn pair_primes(&self) -> &[u64] {
        &self.pair_primes
    }

    pub fn singleton_primes(&self) -> &[u64] {
        &self.singleton_primes
    }

    pub fn core_terms(&self) -> &[CoreTerm] {
        &self.core_terms
    }

    /// Index of `p` among the core primes.
    pub fn core_index(&self, p: u64) -> Option<usize> {
        self.core_primes.iter().position(|&q| q == p)
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            core: self.core_primes.clone(),
            pairs: self.pair_primes.clone(),
            singletons: self.singleton_primes.clone(),
            core_terms: self.core_terms.len(),
        }
    }
}

/// Builds the reduction plan for `ζ_N`.
pub fn classify(n: u64) -> Result<ReductionPlan> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let mut core_primes = Vec::new();
    let mut pair_primes = Vec::new();
    let mut singleton_primes = Vec::new();
    for p in primes_up_to(n) {
        if 2 * p > n {
            singleton_primes.push(p);
        } else if p >= 3 && 3 * p > n {
            pair_primes.push(p);
        } else {
            core_primes.push(p);
        }
    }

    let absorbed = |m: u64| singleton_primes.iter().chain(&pair_primes).any(|&p| m.is_multiple_of(p));
    let core_terms = (1..=n)
        .filter(|&m| !absorbed(m))
        .map(|m| {
            let exponents = factorize(m).expect("m >= 1").restricted_to(&core_primes);
            CoreTerm { n: m, exponents }
        })
        .collect();

    Ok(ReductionPlan { n, core_primes, pair_primes, singleton_primes, core_terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(28).unwrap(), [(2, 2), (7, 1)].into_iter().collect());
        assert!(factorize(1).unwrap().is_empty());
        let v = factorize(26).unwrap();
        assert_eq!((v.exponent(2), v.exponent(13), v.exponent(3)), (1, 1, 0));
        assert!(factorize(0).is_err());
        assert_eq!(factorize(999_983).unwrap().value(), 999_983);
        assert_eq!(factorize(720_720).unwrap().value(), 720_720);
    }

    #[test]
    fn classify_28() {
        let plan = classify(28).unwrap();
        assert_eq!(plan.singleton_primes(), &[17, 19, 23]);
        assert_eq!(plan.pair_primes(), &[11, 13]);
        assert_eq!(plan.core_primes(), &[2, 3, 5, 7]);
        assert_eq!(plan.core_terms().len(), 21);
    }

    #[test]
    fn classify_1() {
        let plan = classify(1).unwrap();
        assert!(plan.core_primes().is_empty());
        assert!(plan.pair_primes().is_empty());
        assert!(plan.singleton_primes().is_empty());
        let terms: Vec<u64> = plan.core_terms().iter().map(|t| t.n).collect();
        assert_eq!(terms, vec![1]);
        assert!(classify(0).is_err());
    }

    #[test]
    fn classify_10() {
        let plan = classify(10).unwrap();
        assert_eq!(plan.singleton_primes(), &[7]);
        assert_eq!(plan.pair_primes(), &[5]);
        assert_eq!(plan.core_primes(), &[2, 3]);
        let terms: Vec<u64> = plan.core_terms().iter().map(|t| t.n).collect();
        assert_eq!(terms, vec![1, 2, 3, 4, 6, 8, 9]);
    }

    #[test]
    fn two_is_never_a_pair_prime() {
        for n in [4, 5] {
            let plan = classify(n).unwrap();
            assert!(plan.core_primes().contains(&2), "N={n}");
            assert!(!plan.pair_primes().contains(&2));
        }
        // 2 and 4 share θ_2 with exponent 2 at n = 4.
        assert_eq!(classify(4).unwrap().singleton_primes(), &[3]);
    }

    #[test]
    fn seven_stays_core_for_21() {
        let plan = classify(21).unwrap();
        assert_eq!(plan.core_primes(), &[2, 3, 5, 7]);
        assert!(plan.pair_primes().is_empty());
        assert_eq!(plan.singleton_primes(), &[11, 13, 17, 19]);
    }
}
