//! Property tests for the structural invariants: text round-trips,
//! inversion, norm preservation, sampling determinism, and the integer
//! arithmetic contracts.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use phasefactor::circuit::{canonical_angle, Circuit, Gate};
use phasefactor::driver::{gcd, modpow, phase_to_l};
use phasefactor::modexp::{block_coefficient, quantize_phase};
use phasefactor::state::StateVector;

fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
    let q = 0..width;
    let q2 = (0..width, 0..width - 1).prop_map(move |(a, b)| {
        let b = if b >= a { b + 1 } else { b };
        (a, b)
    });
    prop_oneof![
        q.clone().prop_map(Gate::h),
        q.clone().prop_map(Gate::x),
        (q, -20.0..20.0f64).prop_map(|(i, alpha)| Gate::phase(i, alpha)),
        (q2.clone(), -20.0..20.0f64).prop_map(|((c, t), alpha)| Gate::cphase(c, t, alpha)),
        q2.prop_map(|(a, b)| Gate::swap(a, b)),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..6).prop_flat_map(|width| {
        prop::collection::vec(arb_gate(width), 0..40).prop_map(move |gates| {
            let mut c = Circuit::new(width).unwrap();
            for g in gates {
                c.push(g).unwrap();
            }
            c
        })
    })
}

proptest! {
    #[test]
    fn text_roundtrip(c in arb_circuit()) {
        let parsed = Circuit::parse_text(&c.to_text()).unwrap();
        prop_assert_eq!(c, parsed);
    }

    #[test]
    fn double_inverse_is_identity_on_angles(c in arb_circuit()) {
        let back = c.inverse().inverse();
        prop_assert_eq!(c.gates().len(), back.gates().len());
        for (a, b) in c.gates().iter().zip(back.gates()) {
            match (a, b) {
                (Gate::Phase { qubit: qa, alpha: x }, Gate::Phase { qubit: qb, alpha: y }) => {
                    prop_assert_eq!(qa, qb);
                    prop_assert!((x - y).abs() < 1e-12);
                }
                (
                    Gate::CPhase { control: ca, target: ta, alpha: x },
                    Gate::CPhase { control: cb, target: tb, alpha: y },
                ) => {
                    prop_assert_eq!((ca, ta), (cb, tb));
                    prop_assert!((x - y).abs() < 1e-12);
                }
                _ => prop_assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn inverse_restores_any_basis_state(c in arb_circuit(), basis in any::<u64>()) {
        let basis = basis % (1 << c.width());
        let mut s = StateVector::new(c.width()).unwrap();
        s.prepare_basis(basis).unwrap();
        c.apply_to(&mut s).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        c.inverse().apply_to(&mut s).unwrap();
        for (idx, amp) in s.amplitudes().iter().enumerate() {
            let expect = if idx as u64 == basis { 1.0 } else { 0.0 };
            prop_assert!((amp.norm() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic(c in arb_circuit(), seed in any::<u64>()) {
        let state = c.execute().unwrap();
        let reg = 0..c.width();
        let a = state.sample_outcomes(reg.clone(), 64, seed).unwrap();
        let b = state.sample_outcomes(reg, 64, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn canonical_angles_stay_in_range(alpha in -1e6..1e6f64) {
        let a = canonical_angle(alpha);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&a));
    }

    #[test]
    fn quantization_stays_in_range(phi in -100.0..100.0f64, bits in 1usize..16) {
        prop_assert!(quantize_phase(phi, bits) < (1 << bits));
    }

    #[test]
    fn coefficients_follow_doubling(n in (3u64..u64::MAX / 4).prop_map(|x| x | 1), j in 0usize..63) {
        let c = block_coefficient(j, n);
        let next = block_coefficient(j + 1, n);
        prop_assert!(c < n);
        prop_assert_eq!(next, ((c as u128 * 2) % n as u128) as u64);
    }

    #[test]
    fn gcd_divides_both_and_is_greatest(x in 1u64..100_000, y in 1u64..100_000) {
        let g = gcd(&BigUint::from(x), &BigUint::from(y)).unwrap().to_u64().unwrap();
        prop_assert_eq!(x % g, 0);
        prop_assert_eq!(y % g, 0);
        // Any larger candidate must fail to divide one of them.
        for k in (g + 1)..=(x.min(y)) {
            prop_assert!(!(x % k == 0 && y % k == 0) || k == g);
        }
    }

    #[test]
    fn modpow_multiplicative_in_exponent(a in 2u64..1000, e1 in 0u64..500, e2 in 0u64..500, n in (3u64..100_000).prop_map(|x| x | 1)) {
        let n = BigUint::from(n);
        let lhs = modpow(&BigUint::from(a), &BigUint::from(e1 + e2), &n).unwrap();
        let rhs = modpow(&BigUint::from(a), &BigUint::from(e1), &n).unwrap()
            * modpow(&BigUint::from(a), &BigUint::from(e2), &n).unwrap()
            % &n;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn phase_to_l_within_half(phase in 0.0..1.0f64, n in 3u64..1_000_000) {
        let l = phase_to_l(phase, &BigUint::from(n)).unwrap().to_f64().unwrap();
        prop_assert!((phase * n as f64 - l).abs() <= 0.5 + 1e-6);
    }
}
