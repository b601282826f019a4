//! Randomized structural invariants.
//!
//! Step sets are generated as unions of reflection orbits (one orbit per
//! nonzero support pattern), which is exactly the class of valid inputs, so
//! these properties sweep the whole model space rather than hand-picked
//! examples.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use orthant_walks::asymptotics::{asymptotic_formula, AsymptoticsError};
use orthant_walks::critical::{contributing_points, enumerate_critical_points, ParitySign};
use orthant_walks::oracle::{enumerate, EnumerateOptions};
use orthant_walks::stepset::{pq_eval, validate, Step, StepSet};
use orthant_walks::weighting::{
    classify_central, classify_weighting, factor_weighting, weight_profile, StepWeights,
    WeightingClass,
};
use orthant_walks::{rational, rational_int, Rational};

fn alpha_values() -> Vec<Rational> {
    vec![
        rational(1, 3),
        rational(1, 2),
        rational(2, 3),
        rational_int(1),
        rational(3, 2),
        rational_int(2),
        rational_int(3),
    ]
}

fn beta_values() -> Vec<Rational> {
    vec![
        rational_int(1),
        rational(1, 2),
        rational_int(2),
        rational_int(3),
    ]
}

fn omega_values() -> Vec<Rational> {
    vec![
        rational_int(1),
        rational_int(2),
        rational_int(3),
        rational(1, 2),
        rational_int(5),
    ]
}

/// Nonzero evaluation points, both signs.
fn coord_values() -> Vec<Rational> {
    vec![
        rational_int(1),
        rational_int(-1),
        rational(1, 2),
        rational(-1, 2),
        rational_int(2),
        rational_int(3),
        rational(-2, 3),
    ]
}

fn orbit_steps(d: usize, support: usize) -> Vec<Vec<i64>> {
    let axes: Vec<usize> = (0..d).filter(|a| support >> a & 1 == 1).collect();
    let mut out = Vec::new();
    for pat in 0..(1u32 << axes.len()) {
        let mut st = vec![0i64; d];
        for (bi, &a) in axes.iter().enumerate() {
            st[a] = if pat >> bi & 1 == 1 { -1 } else { 1 };
        }
        out.push(st);
    }
    out
}

fn supports_from_mask(d: usize, mask: &[bool]) -> Vec<usize> {
    let n = (1usize << d) - 1;
    let mut supports: Vec<usize> = (1..=n).filter(|&s| mask[s - 1]).collect();
    for a in 0..d {
        if !supports.iter().any(|&s| s >> a & 1 == 1) {
            supports.push(1 << a);
        }
    }
    supports.sort_unstable();
    supports
}

fn set_from_supports(d: usize, supports: &[usize]) -> StepSet {
    let steps: Vec<Vec<i64>> = supports.iter().flat_map(|&s| orbit_steps(d, s)).collect();
    validate(d, &steps).expect("orbit unions are reflectable")
}

prop_compose! {
    fn arb_supports()(d in 1usize..=3)(
        d in Just(d),
        mask in prop::collection::vec(any::<bool>(), (1usize << d) - 1),
    ) -> (usize, Vec<usize>) {
        (d, supports_from_mask(d, &mask))
    }
}

fn arb_step_set() -> impl Strategy<Value = StepSet> {
    arb_supports().prop_map(|(d, sup)| set_from_supports(d, &sup))
}

fn arb_alpha(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(prop::sample::select(alpha_values()), d)
}

fn arb_model() -> impl Strategy<Value = (StepSet, Vec<Rational>)> {
    arb_step_set().prop_flat_map(|s| {
        let d = s.dimension();
        (Just(s), arb_alpha(d))
    })
}

fn arb_symmetric_model() -> impl Strategy<Value = (StepSet, StepWeights)> {
    arb_supports().prop_flat_map(|(d, supports)| {
        let count = supports.len();
        (
            Just((d, supports)),
            prop::collection::vec(prop::sample::select(omega_values()), count),
        )
            .prop_map(|((d, supports), ws)| {
                let set = set_from_supports(d, &supports);
                let mut map = BTreeMap::new();
                for (sup, w) in supports.iter().zip(ws) {
                    for st in orbit_steps(d, *sup) {
                        let step = Step::new(st.iter().map(|&v| v as i8).collect());
                        map.insert(step, w.clone());
                    }
                }
                let weights = StepWeights::new(&set, map).unwrap();
                (set, weights)
            })
    })
}

fn inventory_at(s: &StepSet, x: &[Rational]) -> Rational {
    s.inventory_eval(x).expect("nonzero coordinates")
}

fn prod(xs: &[Rational]) -> Rational {
    xs.iter().fold(rational_int(1), |acc, v| acc * v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reflections_stay_inside(s in arb_step_set()) {
        for st in s.steps() {
            for axis in 0..s.dimension() {
                prop_assert!(s.contains(&st.reflect(axis)));
            }
        }
        prop_assert_eq!(s.drift(), vec![0i64; s.dimension()]);
    }

    #[test]
    fn pq_identity_exact(
        (s, x) in arb_step_set().prop_flat_map(|s| {
            let d = s.dimension();
            (Just(s), prop::collection::vec(prop::sample::select(coord_values()), d))
        })
    ) {
        let sx = inventory_at(&s, &x);
        for k in 0..s.dimension() {
            let rest: Vec<Rational> = x.iter().enumerate()
                .filter(|&(i, _)| i != k).map(|(_, v)| v.clone()).collect();
            let (p, q) = pq_eval::<Rational>(&s, k, &rest).unwrap();
            let pair = &x[k] + rational_int(1) / &x[k];
            prop_assert_eq!(&pair * &p + &q, sx.clone());

            let mut flipped = x.clone();
            flipped[k] = -flipped[k].clone();
            let s_flip = inventory_at(&s, &flipped);
            prop_assert_eq!(s_flip, &sx - rational_int(2) * &pair * &p);
        }
    }

    #[test]
    fn central_weights_round_trip(
        (s, alpha, beta) in arb_model().prop_flat_map(|(s, a)| {
            (Just(s), Just(a), prop::sample::select(beta_values()))
        })
    ) {
        let w = StepWeights::from_central(&s, &alpha, &beta).unwrap();
        let c = classify_central(&s, &w).unwrap();
        prop_assert_eq!(c.alpha, alpha);
        prop_assert_eq!(c.beta, beta);
    }

    #[test]
    fn profile_relations((s, alpha) in arb_model()) {
        let d = s.dimension();
        let profile = weight_profile(&s, &alpha).unwrap();
        let one = rational_int(1);
        let r = alpha.iter().filter(|a| *a <= &one).count();
        let m = alpha.iter().filter(|a| *a < &one).count();
        prop_assert_eq!(profile.r, r);
        prop_assert_eq!(profile.m, m);
        prop_assert!(m <= r && r <= d);
        for i in 0..d {
            prop_assert_eq!(&profile.alpha_plus[i], (&alpha[i]).max(&one));
            prop_assert_eq!(&profile.alpha_minus[i], (&alpha[i]).min(&one));
        }
        let s_plus = inventory_at(&s, &profile.alpha_plus);
        prop_assert_eq!(
            &profile.t_minimal * prod(&profile.alpha_minus) * s_plus,
            one
        );
    }

    #[test]
    fn factoring_recovers_parts(
        ((s, omega), alpha) in arb_symmetric_model().prop_flat_map(|(s, w)| {
            let d = s.dimension();
            (Just((s, w)), arb_alpha(d))
        })
    ) {
        // w_σ = ω_σ·α^σ must factor back into exactly (ω, α).
        let mut map = BTreeMap::new();
        for (st, w) in omega.iter() {
            let mut v = w.clone();
            for (i, &c) in st.components().iter().enumerate() {
                match c {
                    1 => v *= &alpha[i],
                    -1 => v /= &alpha[i],
                    _ => {}
                }
            }
            map.insert(st.clone(), v);
        }
        let combined = StepWeights::new(&s, map).unwrap();
        let (got_omega, got_alpha) = factor_weighting(&s, &combined).unwrap();
        prop_assert_eq!(got_alpha, alpha);
        for (st, w) in omega.iter() {
            prop_assert_eq!(got_omega.get(st), w);
        }
        match classify_weighting(&s, &combined) {
            WeightingClass::Unclassified { .. } => prop_assert!(false, "factorable set classified none"),
            _ => {}
        }
    }

    #[test]
    fn critical_point_census((s, alpha) in arb_model()) {
        let d = s.dimension();
        let points = enumerate_critical_points(&s, None, &alpha);
        prop_assert_eq!(points.len(), 1 << d);
        prop_assert!(points[0].signs.iter().all(|&e| e == 1));
        let profile = weight_profile(&s, &alpha).unwrap();
        let s_plus = inventory_at(&s, &profile.alpha_plus);
        let mut seen = BTreeSet::new();
        for p in &points {
            prop_assert!(seen.insert(p.signs.clone()));
            prop_assert!(p.s_value.abs() <= s_plus);
            let eps: Vec<Rational> = p.signs.iter().map(|&e| rational_int(e as i64)).collect();
            let s_eps = inventory_at(&s, &eps);
            match &p.t {
                None => prop_assert!(s_eps.is_zero()),
                Some(t) => {
                    prop_assert!(!s_eps.is_zero());
                    prop_assert_eq!(t * prod(&p.x) * s_eps, rational_int(1));
                }
            }
        }
    }

    #[test]
    fn contributing_points_are_the_maximizers((s, alpha) in arb_model()) {
        let one = rational_int(1);
        let cs = contributing_points(&s, None, &alpha);
        prop_assert!(!cs.points.is_empty());
        prop_assert!(cs.points[0].point.signs.iter().all(|&e| e == 1));
        prop_assert!(matches!(cs.points[0].parity, ParitySign::AlwaysPlus));
        for cp in &cs.points {
            prop_assert_eq!(cp.point.s_value.abs(), cs.s_plus.clone());
            let alternating = cp.point.s_value.is_negative();
            prop_assert_eq!(alternating, matches!(cp.parity, ParitySign::Alternating));
            // Signs are forced positive wherever α_j ≥ 1.
            for (j, a) in alpha.iter().enumerate() {
                if *a >= one {
                    prop_assert_eq!(cp.point.signs[j], 1);
                }
            }
        }
        // Membership over the full census: among sign patterns positive on
        // every α ≥ 1 axis, contributing ⟺ the inventory value is extremal.
        let members: BTreeSet<Vec<i8>> =
            cs.points.iter().map(|cp| cp.point.signs.clone()).collect();
        for p in enumerate_critical_points(&s, None, &alpha) {
            let admissible = p
                .signs
                .iter()
                .zip(&alpha)
                .all(|(&e, a)| e == 1 || *a < one);
            if admissible {
                prop_assert_eq!(p.s_value.abs() == cs.s_plus, members.contains(&p.signs));
            } else {
                prop_assert!(!members.contains(&p.signs));
            }
        }
        if alpha.iter().all(|a| *a >= one) {
            prop_assert_eq!(cs.points.len(), 1);
        }
    }

    #[test]
    fn formula_invariants(
        (s, alpha, beta) in arb_model().prop_flat_map(|(s, a)| {
            (Just(s), Just(a), prop::sample::select(beta_values()))
        })
    ) {
        let profile = weight_profile(&s, &alpha).unwrap();
        match asymptotic_formula(&s, None, &alpha, &beta) {
            Ok(f) => {
                let expect_exp = rational(-(profile.r as i64), 2) - rational_int(profile.m as i64);
                prop_assert_eq!(f.exponent.clone(), expect_exp);
                prop_assert_eq!(f.base.clone(), inventory_at(&s, &profile.alpha_plus));
                prop_assert_eq!(f.growth(), &beta * &f.base);
                prop_assert!(f.gamma_even > 0.0);
                prop_assert!(f.gamma_even >= f.gamma_odd - 1e-12 * f.gamma_even.abs());
                prop_assert!(f.gamma_odd >= -1e-12 * f.gamma_even);
                let has_alternating = f
                    .breakdown
                    .iter()
                    .any(|b| matches!(b.parity, ParitySign::Alternating));
                if !has_alternating {
                    prop_assert_eq!(f.gamma_even, f.gamma_odd);
                }
                // β rescales growth only.
                let unit = asymptotic_formula(&s, None, &alpha, &rational_int(1)).unwrap();
                prop_assert_eq!(unit.base, f.base);
                prop_assert_eq!(unit.exponent, f.exponent);
                prop_assert_eq!(unit.gamma_even, f.gamma_even);
                prop_assert_eq!(unit.gamma_odd, f.gamma_odd);
            }
            // A negative P_j slice at an alternating point is outside the
            // smooth regime the constants cover; rejecting is the contract.
            Err(AsymptoticsError::DomainSlice { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e:?}"),
        }
    }

    #[test]
    fn simple_sets_decompose_by_axis(alpha in prop::collection::vec(prop::sample::select(alpha_values()), 1..=3)) {
        let d = alpha.len();
        let set = validate(d, &orthant_walks::stepset::simple_steps(d)).unwrap();
        let f = asymptotic_formula(&set, None, &alpha, &rational_int(1)).unwrap();
        let mut base = Rational::zero();
        let mut exponent = Rational::zero();
        for a in &alpha {
            let set1 = validate(1, &orthant_walks::stepset::simple_steps(1)).unwrap();
            let f1 = asymptotic_formula(&set1, None, std::slice::from_ref(a), &rational_int(1)).unwrap();
            base += f1.base;
            exponent += f1.exponent;
        }
        prop_assert_eq!(f.base, base);
        prop_assert_eq!(f.exponent, exponent);
    }

    #[test]
    fn uniform_weights_reduce_to_counting(s in arb_step_set()) {
        let d = s.dimension();
        let ones = vec![rational_int(1); d];
        let f = asymptotic_formula(&s, None, &ones, &rational_int(1)).unwrap();
        prop_assert_eq!(f.base, rational_int(s.len() as i64));
        prop_assert_eq!(f.exponent, rational(-(d as i64), 2));
        prop_assert_eq!(f.gamma_even, f.gamma_odd);
        prop_assert!(f.gamma_even > 0.0);
        prop_assert_eq!(contributing_points(&s, None, &ones).points.len(), 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn enumeration_conserves_and_dominates(
        (s, alpha, beta) in arb_model().prop_flat_map(|(s, a)| {
            (Just(s), Just(a), prop::sample::select(beta_values()))
        })
    ) {
        let n_max = 5u32;
        let w = StepWeights::from_central(&s, &alpha, &beta).unwrap();
        let confined =
            enumerate::<Rational>(&s, Some(&w), n_max, &EnumerateOptions::default()).unwrap();
        let free = enumerate::<Rational>(
            &s,
            Some(&w),
            n_max,
            &EnumerateOptions { confined: false, ..EnumerateOptions::default() },
        )
        .unwrap();
        let step_sum: Rational = w.iter().fold(Rational::zero(), |acc, (_, v)| acc + v);
        let mut expect = rational_int(1);
        for n in 0..=n_max {
            prop_assert!(confined.total(n).is_positive());
            prop_assert!(confined.total(n) <= free.total(n));
            prop_assert!(confined.excursion(n) <= free.excursion(n));
            prop_assert_eq!(free.total(n).clone(), expect.clone());
            expect *= &step_sum;
        }
    }

    #[test]
    fn enumeration_matches_brute_force(
        (s, alpha) in arb_supports()
            .prop_filter("keep tables tiny", |(d, _)| *d <= 2)
            .prop_flat_map(|(d, sup)| {
                let s = set_from_supports(d, &sup);
                (Just(s), arb_alpha(d))
            })
    ) {
        let n_max = 4u32;
        let w = StepWeights::from_central(&s, &alpha, &rational_int(1)).unwrap();
        let table =
            enumerate::<Rational>(&s, Some(&w), n_max, &EnumerateOptions::default()).unwrap();
        for n in 0..=n_max {
            let mut total = Rational::zero();
            let mut exc = Rational::zero();
            brute(&s, &w, &mut vec![0i64; s.dimension()], n, &rational_int(1), &mut total, &mut exc);
            prop_assert_eq!(table.total(n).clone(), total);
            prop_assert_eq!(table.excursion(n).clone(), exc);
        }
    }
}

fn brute(
    s: &StepSet,
    w: &StepWeights,
    pos: &mut Vec<i64>,
    depth: u32,
    acc: &Rational,
    total: &mut Rational,
    exc: &mut Rational,
) {
    if depth == 0 {
        *total += acc;
        if pos.iter().all(|&c| c == 0) {
            *exc += acc;
        }
        return;
    }
    for st in s.steps() {
        let mut ok = true;
        for (i, &c) in st.components().iter().enumerate() {
            pos[i] += c as i64;
            if pos[i] < 0 {
                ok = false;
            }
        }
        if ok {
            let next = acc * w.get(st);
            brute(s, w, pos, depth - 1, &next, total, exc);
        }
        for (i, &c) in st.components().iter().enumerate() {
            pos[i] -= c as i64;
        }
    }
}
