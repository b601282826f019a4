//! Enumeration engine checks against closed forms and brute force.

use num_traits::Zero;
use orthant_walks::oracle::{
    enumerate, estimate_constant, estimate_exponent, excursions, verify_evaluation,
    EnumerateOptions, OracleError,
};
use orthant_walks::stepset::{simple_steps, validate, StepSet};
use orthant_walks::weighting::{CentralWeighting, StepWeights};
use orthant_walks::{rational, rational_int, Int, Rational};

fn simple(d: usize) -> StepSet {
    validate(d, &simple_steps(d)).unwrap()
}

fn diagonal2d() -> StepSet {
    validate(
        2,
        &[
            vec![1, 1],
            vec![1, -1],
            vec![-1, 1],
            vec![-1, -1],
            vec![1, 0],
            vec![-1, 0],
        ],
    )
    .unwrap()
}

fn big(n: i64) -> Rational {
    rational_int(n)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    set: &StepSet,
    w: Option<&StepWeights>,
    pos: &mut [i64],
    depth: u32,
    confined: bool,
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
    for st in set.steps() {
        let mut ok = true;
        for (i, &c) in st.components().iter().enumerate() {
            pos[i] += c as i64;
            if confined && pos[i] < 0 {
                ok = false;
            }
        }
        if ok {
            let next = match w {
                Some(w) => acc * w.get(st),
                None => acc.clone(),
            };
            dfs(set, w, pos, depth - 1, confined, &next, total, exc);
        }
        for (i, &c) in st.components().iter().enumerate() {
            pos[i] -= c as i64;
        }
    }
}

fn brute_force(
    set: &StepSet,
    w: Option<&StepWeights>,
    n: u32,
    confined: bool,
) -> (Rational, Rational) {
    let mut total = Rational::zero();
    let mut exc = Rational::zero();
    let mut pos = vec![0i64; set.dimension()];
    dfs(set, w, &mut pos, n, confined, &big(1), &mut total, &mut exc);
    (total, exc)
}

#[test]
fn simple_2d_small_counts() {
    let set = simple(2);
    let table = enumerate::<Int>(&set, None, 6, &EnumerateOptions::default()).unwrap();
    let totals: Vec<i64> = (0..=6)
        .map(|n| i64::try_from(table.total(n)).unwrap())
        .collect();
    assert_eq!(totals, [1, 2, 6, 18, 60, 200, 700]);
    assert_eq!(i64::try_from(table.excursion(2)).unwrap(), 2);
    assert!(table.excursion(3).is_zero());
}

#[test]
fn simple_1d_small_counts() {
    let set = simple(1);
    let table = enumerate::<Int>(&set, None, 6, &EnumerateOptions::default()).unwrap();
    let totals: Vec<i64> = (0..=6)
        .map(|n| i64::try_from(table.total(n)).unwrap())
        .collect();
    assert_eq!(totals, [1, 1, 2, 3, 6, 10, 20]);
    let exc: Vec<i64> = excursions(&set, 6)
        .unwrap()
        .iter()
        .map(|v| i64::try_from(v).unwrap())
        .collect();
    assert_eq!(exc, [1, 0, 1, 0, 2, 0, 5]);
}

#[test]
fn weighted_1d_totals() {
    let set = simple(1);
    let w = StepWeights::from_central(&set, &[big(2)], &big(1)).unwrap();
    let table =
        enumerate::<Rational>(&set, Some(&w), 4, &EnumerateOptions::default()).unwrap();
    let expect = [big(1), big(2), big(5), big(12), big(30)];
    for (n, e) in expect.iter().enumerate() {
        assert_eq!(table.total(n as u32), e);
    }
}

#[test]
fn brute_force_cross_check_simple_2d() {
    let set = simple(2);
    let table = enumerate::<Int>(&set, None, 8, &EnumerateOptions::default()).unwrap();
    for n in 0..=8 {
        let (total, exc) = brute_force(&set, None, n, true);
        assert_eq!(Rational::from_integer(table.total(n).clone()), total);
        assert_eq!(Rational::from_integer(table.excursion(n).clone()), exc);
    }
}

#[test]
fn brute_force_cross_check_weighted_diagonal() {
    let set = diagonal2d();
    let central = CentralWeighting {
        alpha: vec![big(2), rational(1, 2)],
        beta: big(1),
    };
    let w = central.to_step_weights(&set);
    let table =
        enumerate::<Rational>(&set, Some(&w), 6, &EnumerateOptions::default()).unwrap();
    for n in 0..=6 {
        let (total, exc) = brute_force(&set, Some(&w), n, true);
        assert_eq!(*table.total(n), total);
        assert_eq!(*table.excursion(n), exc);
    }
}

#[test]
fn unconfined_counts_conserve() {
    let set = simple(2);
    let opts = EnumerateOptions {
        confined: false,
        ..EnumerateOptions::default()
    };
    let table = enumerate::<Int>(&set, None, 8, &opts).unwrap();
    let mut expect = Int::from(1);
    for n in 0..=8 {
        assert_eq!(*table.total(n), expect);
        expect *= Int::from(4);
    }
}

#[test]
fn confinement_only_removes_walks() {
    let set = simple(2);
    let confined = enumerate::<Int>(&set, None, 8, &EnumerateOptions::default()).unwrap();
    let free = enumerate::<Int>(
        &set,
        None,
        8,
        &EnumerateOptions {
            confined: false,
            ..EnumerateOptions::default()
        },
    )
    .unwrap();
    for n in 0..=8 {
        assert!(confined.total(n) <= free.total(n));
        assert!(confined.excursion(n) <= free.excursion(n));
    }
}

#[test]
fn float_matches_exact() {
    let set = simple(2);
    let exact = enumerate::<Int>(&set, None, 60, &EnumerateOptions::default()).unwrap();
    let float = enumerate::<f64>(&set, None, 60, &EnumerateOptions::default()).unwrap();
    for n in 0..=60 {
        let le = exact.log_total(n);
        let lf = float.log_total(n);
        assert!((le - lf).abs() <= 1e-9 * le.abs().max(1.0), "n = {n}");
    }
}

#[test]
fn float_renormalization_tracks_offsets() {
    // Free 1D walk with weights 20 and 1/20: the weighted total is exactly
    // (20 + 1/20)^n, which overflows f64 near n = 237.
    let set = simple(1);
    let w = StepWeights::from_central(&set, &[big(20)], &big(1)).unwrap();
    let opts = EnumerateOptions {
        confined: false,
        ..EnumerateOptions::default()
    };
    let table = enumerate::<f64>(&set, Some(&w), 400, &opts).unwrap();
    let ln_sum = (20.0f64 + 0.05).ln();
    for n in [100u32, 237, 399, 400] {
        let expect = n as f64 * ln_sum;
        assert!(
            (table.log_total(n) - expect).abs() <= 1e-9 * expect,
            "n = {n}"
        );
    }
    assert!(table.log_offset(400) > 0.0);
    assert_eq!(table.log_offset(0), 0.0);
}

#[test]
fn kept_layers_match_positions() {
    let set = simple(1);
    let table = enumerate::<Int>(
        &set,
        None,
        2,
        &EnumerateOptions {
            keep_layers: true,
            ..EnumerateOptions::default()
        },
    )
    .unwrap();
    let layer0 = table.layer(0).unwrap();
    assert_eq!(layer0.len(), 1);
    assert_eq!(layer0[&vec![0u32]], Int::from(1));
    let layer2 = table.layer(2).unwrap();
    assert_eq!(layer2.len(), 2);
    assert_eq!(layer2[&vec![0u32]], Int::from(1));
    assert_eq!(layer2[&vec![2u32]], Int::from(1));
}

#[test]
fn verify_evaluation_examples() {
    let set = validate(
        3,
        &[
            vec![0, 0, 1],
            vec![0, 0, -1],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![1, 0, 0],
            vec![-1, 0, 0],
        ],
    )
    .unwrap();
    let central = CentralWeighting {
        alpha: vec![big(2), big(1), rational(1, 4)],
        beta: big(4),
    };
    let w = central.to_step_weights(&set);
    let res = verify_evaluation(&set, &w, 12).unwrap();
    assert!(res.pass);
    assert_eq!(res.first_failure, None);
    assert_eq!(res.checked_n, 12);

    let set1 = simple(1);
    let w1 = StepWeights::from_central(&set1, &[big(2)], &big(1)).unwrap();
    assert!(verify_evaluation(&set1, &w1, 12).unwrap().pass);
    let weighted =
        enumerate::<Rational>(&set1, Some(&w1), 2, &EnumerateOptions::default()).unwrap();
    assert_eq!(*weighted.total(2), big(5));
}

#[test]
fn verify_evaluation_rejects_noncentral() {
    let set = simple(2);
    let mut map = std::collections::BTreeMap::new();
    map.insert("(1,0)".parse().unwrap(), rational(3, 2));
    map.insert("(-1,0)".parse().unwrap(), big(6));
    map.insert("(0,1)".parse().unwrap(), big(35));
    map.insert("(0,-1)".parse().unwrap(), rational(5, 7));
    let w = StepWeights::new(&set, map).unwrap();
    assert!(matches!(
        verify_evaluation(&set, &w, 8),
        Err(OracleError::NotCentral(_))
    ));
}

#[test]
fn budget_refuses_large_tables() {
    let set = simple(4);
    let err = enumerate::<f64>(&set, None, 200, &EnumerateOptions::default()).unwrap_err();
    match err {
        OracleError::BudgetExceeded {
            required_bytes,
            budget_bytes,
        } => {
            assert!(required_bytes > budget_bytes);
            assert_eq!(budget_bytes, orthant_walks::oracle::DEFAULT_BUDGET_BYTES);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn estimates_recover_1d_asymptotics() {
    // q(n) = C(n, ⌊n/2⌋) ~ (2/√(2π))·2^n·n^{-1/2}.
    let set = simple(1);
    let table = enumerate::<f64>(&set, None, 240, &EnumerateOptions::default()).unwrap();
    let counts = table.log_counts();
    let gamma = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    let rep = estimate_constant(&counts, &big(1), &big(2), &rational(-1, 2)).unwrap();
    assert!(rep.converged);
    assert!((rep.gamma_even().unwrap() - gamma).abs() < 1e-3 * gamma);
    assert!((rep.gamma_odd().unwrap() - gamma).abs() < 1e-3 * gamma);
    let est = estimate_exponent(&counts, &big(1), &big(2)).unwrap();
    assert!((est.estimate + 0.5).abs() < 0.02);
}
