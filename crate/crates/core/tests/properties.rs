use proptest::prelude::*;
use ratquad::integrands::Integrand;
use ratquad::moments::{modified_moments_unchecked, quadrature_moment};
use ratquad::numerics::format_mantissa_exponent;
use ratquad::params::modified_weight_gr;
use ratquad::recurrence::ReferenceRecurrence;
use ratquad::rules::{build_gaussian_rule, build_orthogonal_rule, orthogonal_nodes};
use ratquad::{make_context, ParameterSet, PrecisionContext, Real};

fn ctx() -> PrecisionContext {
    make_context(256, 1e-30).unwrap()
}

/// `len` parameters in (-0.9, 0.9), at least 0.05 from each other and from
/// zero, in random order. Built from increasing values in (-0.85, 0.85)
/// pushed 0.05 away from the origin, which only widens the gaps.
fn params(len: usize) -> impl Strategy<Value = Vec<f64>> {
    (-0.84f64..-0.5, prop::collection::vec(0.05f64..0.13, len))
        .prop_map(|(start, gaps)| {
            let mut u = start;
            gaps.iter()
                .map(|g| {
                    let t = u + 0.05 * u.signum();
                    u += g;
                    t
                })
                .collect::<Vec<f64>>()
        })
        .prop_shuffle()
}

fn sized(max_n: usize, slots: fn(usize) -> usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), params(slots(n))))
}

fn set(ts: &[f64], c: &PrecisionContext) -> ParameterSet {
    ParameterSet::from_f64(ts, c).unwrap()
}

fn with_zero(ts: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(ts.iter().copied()).collect()
}

fn max_diff(a: &[Real], b: &[Real]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y).abs().to_f64())
        .fold(0.0, f64::max)
}

fn assert_valid(nodes: &[Real], weights: &[Real]) {
    assert!(nodes.iter().all(|x| *x > -1 && *x < 1));
    assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    assert!(weights.iter().all(|w| *w > 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gaussian_nodes_inside_and_weights_positive((n, ts) in sized(5, |n| 2 * n)) {
        let c = ctx();
        let rule = build_gaussian_rule(&set(&ts, &c), n, &c).unwrap();
        assert_valid(&rule.nodes, &rule.weights);
        prop_assert!(rule.audit.max < 1e-25);
    }

    #[test]
    fn orthogonal_nodes_inside_and_weights_positive((n, ts) in sized(5, |n| n)) {
        let c = ctx();
        let rule = build_orthogonal_rule(&set(&with_zero(&ts), &c), n, &c).unwrap();
        assert_valid(&rule.nodes, &rule.weights);
        prop_assert!(rule.audit.max < 1e-25);
    }

    #[test]
    fn weights_sum_to_two_with_zero_first((n, ts) in sized(5, |n| 2 * n - 1)) {
        let c = ctx();
        let p = set(&with_zero(&ts), &c);
        for rule in [build_gaussian_rule(&p, n, &c).unwrap(), build_orthogonal_rule(&p, n, &c).unwrap()] {
            prop_assert!((rule.weight_sum() - 2u32).abs() < 1e-25);
        }
    }

    #[test]
    fn gaussian_rule_ignores_parameter_order((n, ts) in sized(4, |n| 2 * n), seed in any::<u64>()) {
        let c = ctx();
        let mut shuffled = ts.clone();
        shuffled.rotate_left((seed % ts.len() as u64) as usize);
        shuffled.reverse();
        let a = build_gaussian_rule(&set(&ts, &c), n, &c).unwrap();
        let b = build_gaussian_rule(&set(&shuffled, &c), n, &c).unwrap();
        prop_assert!(max_diff(&a.nodes, &b.nodes) < 1e-40);
        prop_assert!(max_diff(&a.weights, &b.weights) < 1e-40);
    }

    #[test]
    fn orthogonal_nodes_depend_only_on_which_parameter_is_last((n, ts) in sized(5, |n| n + 1)) {
        let c = ctx();
        let mut permuted = ts.clone();
        permuted[..n].reverse();
        let a = orthogonal_nodes(&set(&ts, &c), n, &c).unwrap();
        let b = orthogonal_nodes(&set(&permuted, &c), n, &c).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-40);
    }

    #[test]
    fn moments_agree_with_quadrature((n, ts) in sized(3, |n| 2 * n)) {
        let c = ctx();
        let mw = modified_weight_gr(&set(&ts, &c), n).unwrap();
        let count = 2 * n;
        let table = modified_moments_unchecked(&mw, count, &c).unwrap();
        let reference = ReferenceRecurrence::monic_chebyshev(count, &c);
        for k in 0..count {
            let q = quadrature_moment(&mw, &reference, k, &c).unwrap();
            let scale = q.clone().abs() + 1u32;
            prop_assert!((table.values[k].clone() - &q).abs() / scale < 1e-25, "k = {}", k);
        }
    }

    #[test]
    fn squared_integrand_is_square(x in -0.999f64..0.999, omega in 1.01f64..10.0) {
        let c = ctx();
        let x = c.real(x);
        let i3 = Integrand::SincPoles { omega }.eval(&x);
        let i4 = Integrand::SincPolesSquared { omega }.eval(&x);
        prop_assert!((i4 - i3.clone().square()).abs() < 1e-60);
        let mirrored = Integrand::SincPoles { omega }.eval(&(-x));
        prop_assert!((mirrored - i3).abs() < 1e-70);
    }

    #[test]
    fn parameter_json_round_trip(ts in params(6)) {
        let c = ctx();
        let p = set(&ts, &c);
        let back = ParameterSet::from_json(&p.to_json(70), &c).unwrap();
        prop_assert!(max_diff(&p.slots(), &back.slots()) < 1e-65);
    }

    #[test]
    fn rule_json_carries_nodes((n, ts) in sized(3, |n| 2 * n)) {
        let c = ctx();
        let rule = build_gaussian_rule(&set(&ts, &c), n, &c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rule.to_json(40).to_string()).unwrap();
        for (key, values) in [("nodes", &rule.nodes), ("weights", &rule.weights)] {
            let parsed: Vec<Real> = v[key]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| c.parse(&x.to_string()).unwrap())
                .collect();
            prop_assert!(max_diff(&parsed, values) < 1e-38);
        }
    }

    #[test]
    fn mantissa_exponent_reads_back(m in 0.1f64..1.0, e in -40i32..5) {
        let v = m * 10f64.powi(e);
        let s = format_mantissa_exponent(v, 3);
        let (mant, exp) = match s.split_once('(') {
            Some((a, b)) => (a.parse::<f64>().unwrap(), b.trim_end_matches(')').parse::<i32>().unwrap()),
            None => (s.parse::<f64>().unwrap(), 0),
        };
        prop_assert!((0.1..1.0).contains(&mant), "{}", s);
        prop_assert!((mant * 10f64.powi(exp) - v).abs() <= 5e-4 * 10f64.powi(exp) * 1.0001, "{}", s);
    }
}
