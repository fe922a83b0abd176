//! Independent classical ground truth: multiplicative orders, trial-division
//! factorization, ideal phase injection, reference DFT matrices, and the
//! closed-form outcome distribution. Nothing here touches the statevector
//! backend, so agreement between the two paths is a genuine cross-check.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::driver::gcd;
use crate::error::{Error, Result};
use crate::modexp::{phase_constants, CircuitSpec};
use crate::state::Distribution;

/// Iteration bound for the order search; beyond this the search aborts
/// with a diagnostic error rather than spinning.
pub const ORDER_SEARCH_BOUND: u64 = 100_000_000;

/// Work bound (roots-of-unity evaluations) for the closed-form
/// distribution, which costs `q²` with `q = 2^p`.
pub const ANALYTIC_WORK_CAP: u128 = 1 << 28;

/// Least `l ≥ 1` with `a^l ≡ 1 (mod n)`, found by repeated multiplication;
/// `None` when `gcd(a, n) ≠ 1` so no order exists.
pub fn multiplicative_order(a: &BigUint, n: &BigUint) -> Result<Option<BigUint>> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidConfig(format!(
            "order is defined for moduli >= 2, got {n}"
        )));
    }
    let a_red = a % n;
    if !gcd(&a_red, n)?.is_one() {
        return Ok(None);
    }
    if let (Some(a64), Some(n64)) = (a_red.to_u64(), n.to_u64()) {
        let mut cur = a64 as u128;
        let m = n64 as u128;
        for l in 1..=ORDER_SEARCH_BOUND {
            if cur == 1 {
                return Ok(Some(BigUint::from(l)));
            }
            cur = cur * (a64 as u128) % m;
        }
    } else {
        let mut cur = a_red.clone();
        for l in 1..=ORDER_SEARCH_BOUND {
            if cur.is_one() {
                return Ok(Some(BigUint::from(l)));
            }
            cur = &cur * &a_red % n;
        }
    }
    Err(Error::OrderSearchAborted {
        a: a.to_string(),
        n: n.to_string(),
        bound: ORDER_SEARCH_BOUND,
    })
}

/// Complete factorization of `n` with the full divisor set enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    prime_powers: Vec<(u64, u32)>,
    divisors: Vec<u64>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs in ascending prime order.
    pub fn prime_powers(&self) -> &[(u64, u32)] {
        &self.prime_powers
    }

    /// All divisors of `n`, ascending.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn is_prime(&self) -> bool {
        self.prime_powers.len() == 1 && self.prime_powers[0].1 == 1
    }
}

/// Factor `n` by trial division. Adequate for desk scale (`n ≤ ~10^12`,
/// where the divisor scan stays under ~10^6 iterations).
pub fn trial_factor(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "factorization is defined for n >= 2, got {n}"
        )));
    }
    let mut remaining = n;
    let mut prime_powers = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= remaining {
        if remaining % d == 0 {
            let mut e = 0u32;
            while remaining % d == 0 {
                remaining /= d;
                e += 1;
            }
            prime_powers.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if remaining > 1 {
        prime_powers.push((remaining, 1));
    }
    let mut divisors = vec![1u64];
    for &(p, e) in &prime_powers {
        let base = divisors.clone();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            divisors.extend(base.iter().map(|d| d * power));
        }
    }
    divisors.sort_unstable();
    Ok(Factorization {
        n,
        prime_powers,
        divisors,
    })
}

/// Ideal phases for the injector backend: the single exact phase
/// `ord(a, n)/n`, from which `round(phase·n)` recovers the order.
pub fn ideal_phases(a: &BigUint, n: &BigUint) -> Result<Vec<f64>> {
    let g = gcd(a, n)?;
    if !g.is_one() {
        return Err(Error::NotCoprime {
            a: a.to_string(),
            n: n.to_string(),
            g: g.to_string(),
        });
    }
    let order = multiplicative_order(a, n)?.expect("coprime base has an order");
    let phase = order.to_f64().unwrap_or(f64::MAX) / n.to_f64().unwrap_or(f64::MAX);
    Ok(vec![phase])
}

/// The DFT matrix over `2^width` dimensions, row-major: entry `[k][j]` is
/// `ω^{±kj}/√q` with `ω = e^{2πi/q}` (`-` for the inverse transform).
pub fn dft_matrix(width: usize, inverse: bool) -> Vec<Vec<Complex64>> {
    let q = 1u64 << width;
    let scale = 1.0 / (q as f64).sqrt();
    let sign = if inverse { -1.0 } else { 1.0 };
    (0..q)
        .map(|k| {
            (0..q)
                .map(|j| {
                    let t = (k as u128 * j as u128 % q as u128) as f64;
                    Complex64::from_polar(scale, sign * TAU * t / q as f64)
                })
                .collect()
        })
        .collect()
}

/// Exact upper-register distribution computed from the closed-form final
/// state: the ladder maps each exponent `l` to the accumulator value
/// `f(l) = Σ_{j∈bits(l)} b_j mod 2^n`, and the final inverse transform
/// is evaluated as an explicit sum. Never calls the simulator.
pub fn analytic_distribution(spec: &CircuitSpec) -> Result<Distribution> {
    let quantized: Vec<u64> = phase_constants(spec).iter().map(|c| c.quantized).collect();
    analytic_distribution_from_quantized(spec.upper_bits(), spec.lower_bits(), &quantized)
}

/// Same computation from explicit per-block constants.
pub fn analytic_distribution_from_quantized(
    upper_bits: usize,
    lower_bits: usize,
    quantized: &[u64],
) -> Result<Distribution> {
    assert_eq!(quantized.len(), upper_bits);
    let q = 1u64 << upper_bits;
    let work = (q as u128) * (q as u128);
    if work > ANALYTIC_WORK_CAP {
        return Err(Error::AnalyticCapExceeded {
            terms: work,
            cap: ANALYTIC_WORK_CAP,
        });
    }
    let modmask = (1u64 << lower_bits) - 1;
    // Bucket exponents by their accumulator value.
    let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for l in 0..q {
        let mut acc = 0u64;
        for (j, b) in quantized.iter().enumerate() {
            if (l >> j) & 1 == 1 {
                acc = (acc + b) & modmask;
            }
        }
        buckets.entry(acc).or_default().push(l);
    }
    let roots: Vec<Complex64> = (0..q)
        .map(|t| Complex64::from_polar(1.0, -TAU * t as f64 / q as f64))
        .collect();
    let norm = 1.0 / (q as f64 * q as f64);
    let mut probs = vec![0.0f64; q as usize];
    for m in 0..q {
        let mut total = 0.0;
        for ls in buckets.values() {
            let mut s = Complex64::new(0.0, 0.0);
            for &l in ls {
                s += roots[(m * l % q) as usize];
            }
            total += s.norm_sqr();
        }
        probs[m as usize] = total * norm;
    }
    Ok(Distribution::from_probs(upper_bits, probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modexp::circuit_params;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn order_of_two_mod_fifteen() {
        assert_eq!(
            multiplicative_order(&big(2), &big(15)).unwrap(),
            Some(big(4))
        );
    }

    #[test]
    fn order_of_two_mod_1591_matches_repeated_multiplication() {
        // Independent oracle: multiply until the residue returns to 1.
        let mut cur = 2u64;
        let mut l = 1u64;
        while cur != 1 {
            cur = cur * 2 % 1591;
            l += 1;
        }
        assert_eq!(l, 252);
        assert_eq!(
            multiplicative_order(&big(2), &big(1591)).unwrap(),
            Some(big(252))
        );
    }

    #[test]
    fn order_none_when_not_coprime() {
        assert_eq!(multiplicative_order(&big(3), &big(9)).unwrap(), None);
    }

    #[test]
    fn order_satisfies_minimality() {
        for n in [15u64, 21, 33, 35, 1591] {
            for a in 2..20u64 {
                if a >= n {
                    continue;
                }
                let Some(ord) = multiplicative_order(&big(a), &big(n)).unwrap() else {
                    continue;
                };
                let ord = ord.to_u64().unwrap();
                let mut cur = 1u128;
                for k in 1..=ord {
                    cur = cur * a as u128 % n as u128;
                    if k < ord {
                        assert_ne!(cur, 1, "a={a} n={n}: premature 1 at {k}");
                    }
                }
                assert_eq!(cur, 1);
            }
        }
    }

    #[test]
    fn trial_factor_fifteen() {
        let f = trial_factor(15).unwrap();
        assert_eq!(f.divisors(), &[1, 3, 5, 15]);
        assert_eq!(f.prime_powers(), &[(3, 1), (5, 1)]);
        assert!(!f.is_prime());
    }

    #[test]
    fn trial_factor_844821_has_24_divisors() {
        let f = trial_factor(844_821).unwrap();
        assert_eq!(f.prime_powers(), &[(3, 2), (37, 1), (43, 1), (59, 1)]);
        assert_eq!(f.divisors().len(), 24);
        let product: u64 = f.prime_powers().iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(product, 844_821);
    }

    #[test]
    fn trial_factor_semiprime() {
        let f = trial_factor(1_660_759).unwrap();
        assert_eq!(f.divisors(), &[1, 1129, 1471, 1_660_759]);
    }

    #[test]
    fn trial_factor_invariants_against_divisor_scan() {
        for n in [2u64, 9, 97, 1591, 5040, 123_456] {
            let f = trial_factor(n).unwrap();
            let scanned: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(f.divisors(), scanned.as_slice(), "n={n}");
            let count: usize = f
                .prime_powers()
                .iter()
                .map(|&(_, e)| e as usize + 1)
                .product();
            assert_eq!(f.divisors().len(), count);
            for &d in f.divisors() {
                assert!(f.divisors().contains(&(n / d)));
            }
        }
    }

    #[test]
    fn trial_factor_rejects_below_two() {
        assert!(trial_factor(1).is_err());
        assert!(trial_factor(0).is_err());
    }

    #[test]
    fn ideal_phase_encodes_order() {
        assert_eq!(ideal_phases(&big(2), &big(15)).unwrap(), vec![4.0 / 15.0]);
        let phases = ideal_phases(&big(2), &big(1591)).unwrap();
        assert_eq!(phases, vec![252.0 / 1591.0]);
        assert!(matches!(
            ideal_phases(&big(3), &big(9)),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn dft_matrix_is_unitary() {
        for width in 1..=4usize {
            let m = dft_matrix(width, false);
            let dim = 1 << width;
            for r in 0..dim {
                for c in 0..dim {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        dot += m[k][r].conj() * m[k][c];
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn analytic_zero_constants_concentrate_on_zero() {
        let d = analytic_distribution_from_quantized(4, 2, &[0, 0, 0, 0]).unwrap();
        assert!((d.prob(0) - 1.0).abs() < 1e-12);
        for m in 1..16 {
            assert!(d.prob(m) < 1e-12);
        }
    }

    #[test]
    fn analytic_distribution_sums_to_one() {
        for (n, a) in [(15u64, 2u64), (15, 7), (21, 2), (1591, 2)] {
            let spec = circuit_params(n, a, None).unwrap();
            let d = analytic_distribution(&spec).unwrap();
            assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_agrees_with_simulator() {
        let spec = circuit_params(15, 2, None).unwrap();
        let analytic = analytic_distribution(&spec).unwrap();
        let (circuit, map) = crate::modexp::build_shor_circuit(&spec).unwrap();
        let simulated = circuit
            .execute()
            .unwrap()
            .exact_probabilities(map.upper)
            .unwrap();
        for (m, p) in analytic.iter() {
            assert!(
                (p - simulated.prob(m)).abs() < 1e-8,
                "m={m}: {p} vs {}",
                simulated.prob(m)
            );
        }
    }

    #[test]
    fn analytic_cap_enforced() {
        let quantized = vec![0u64; 20];
        assert!(matches!(
            analytic_distribution_from_quantized(20, 2, &quantized),
            Err(Error::AnalyticCapExceeded { .. })
        ));
    }
}
