//! Monte Carlo and quadrature oracles for order statistics, skew marginals,
//! the limit field and the comparison bounds.

use nalgebra::DMatrix;
use ostat_core::albin::{estimate_albin, nested_hit_counts};
use ostat_core::asymptotics::{chi_tail, pointwise_orderstat_tail, skew_tail};
use ostat_core::comparison::{
    a_star, li_shao_bound, minstat_sharp_bound, orderstat_comparison_bound, verify_bound,
};
use ostat_core::processes::{order_statistic_into, skew_into, LimitField};
use ostat_core::special::std_normal_tail;
use ostat_core::{split_stream, AlbinConfig, BoundKind, GaussianPair, RandomStream, SkewParams};

fn pair2(s1: f64, s0: f64) -> GaussianPair {
    GaussianPair::new(
        DMatrix::from_row_slice(2, 2, &[1.0, s1, s1, 1.0]),
        DMatrix::from_row_slice(2, 2, &[1.0, s0, s0, 1.0]),
    )
    .unwrap()
}

/// Exact `P(at least r of n exceed u)` for i.i.d. standard normals.
fn binomial_tail(r: usize, n: usize, u: f64) -> f64 {
    let p = std_normal_tail(u);
    (r..=n)
        .map(|j| {
            let c = (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            c * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32)
        })
        .sum()
}

#[test]
fn pointwise_order_statistic_frequency() {
    let reps = 100_000;
    let mut s = RandomStream::new(5, 0);
    for (r, n, u) in [(2usize, 3usize, 1.0), (1, 2, 1.5), (3, 3, 0.5)] {
        let mut cols = vec![vec![0.0; 1]; n];
        let mut out = [0.0];
        let mut hits = 0;
        for _ in 0..reps {
            for c in cols.iter_mut() {
                c[0] = s.normal();
            }
            let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
            order_statistic_into(&refs, r, &mut out);
            hits += (out[0] > u) as usize;
        }
        let p = binomial_tail(r, n, u);
        let f = hits as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((f - p).abs() < 4.0 * se, "r={r} n={n}: {f} vs {p}");
    }
}

#[test]
fn leading_pointwise_term_against_binomial_tail() {
    let lead = pointwise_orderstat_tail(1, 2, 3.0).unwrap();
    let exact = binomial_tail(1, 2, 3.0);
    assert!((lead / exact - 1.0).abs() < 7e-4);
    for (r, n) in [(2usize, 3usize), (3, 5), (1, 4)] {
        let ratio =
            pointwise_orderstat_tail(r as u32, n as u32, 6.0).unwrap() / binomial_tail(r, n, 6.0);
        assert!((ratio - 1.0).abs() < 1e-6, "r={r} n={n}: {ratio}");
    }
}

/// `P(δ|X| + sqrt(1-δ²) Y > u)` by the trapezoid rule on `x ∈ [0, 12]`.
fn skew_normal_survival(delta: f64, u: f64) -> f64 {
    let w = (1.0 - delta * delta).sqrt();
    let steps = 200_000;
    let h = 12.0 / steps as f64;
    let f = |x: f64| {
        let dens = 2.0 * (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        dens * std_normal_tail((u - delta * x) / w)
    };
    let inner: f64 = (1..steps).map(|i| f(i as f64 * h)).sum();
    h * (inner + 0.5 * (f(0.0) + f(12.0)))
}

#[test]
fn skew_marginal_matches_integration_oracle() {
    let params = SkewParams::new(0.6, 1).unwrap();
    let reps = 100_000;
    let mut s = RandomStream::new(6, 0);
    let mut hits = 0;
    let mut out = [0.0];
    for _ in 0..reps {
        let (a, b) = ([s.normal()], [s.normal()]);
        skew_into(&[&a, &b], params, &mut out);
        hits += (out[0] > 1.0) as usize;
    }
    let p = skew_normal_survival(0.6, 1.0);
    let f = hits as f64 / reps as f64;
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    assert!((f - p).abs() < 4.0 * se, "{f} vs {p}");
}

#[test]
fn skew_tail_leading_term_at_five() {
    for delta in [0.3, 0.6, 0.9] {
        let ratio = skew_tail(1, delta, 5.0).unwrap() / skew_normal_survival(delta, 5.0);
        assert!((ratio - 1.0).abs() < 0.10, "delta={delta}: {ratio}");
    }
    let ratio = chi_tail(1, 5.0).unwrap() / (2.0 * std_normal_tail(5.0));
    assert!((ratio - 1.0).abs() < 0.10);
}

#[test]
fn limit_field_mean_at_first_point() {
    let field = LimitField::new(1.0, 0.01, 16).unwrap();
    let mut ws = field.workspace();
    let reps = 100_000;
    let mut values = Vec::with_capacity(reps);
    for i in 0..reps {
        ws.draw(1, &split_stream(9, i as u64));
        values.push(ws.values()[0]);
    }
    let mean = values.iter().sum::<f64>() / reps as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    assert!((mean - 0.99).abs() < 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn albin_counts_grow_with_copies() {
    let cfg = AlbinConfig {
        r: 3,
        alpha: 1.0,
        grid_a: 0.05,
        horizon_t: 30.0,
        reps: 20_000,
        seed: 4,
    };
    let counts = nested_hit_counts(&cfg, 3).unwrap();
    assert!(counts[0] > 0);
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
}

#[test]
fn albin_estimate_is_stable_in_the_horizon() {
    let base = AlbinConfig {
        r: 1,
        alpha: 1.0,
        grid_a: 0.05,
        horizon_t: 30.0,
        reps: 50_000,
        seed: 8,
    };
    let short = estimate_albin(&base).unwrap();
    let long = estimate_albin(&AlbinConfig {
        horizon_t: 45.0,
        seed: 9,
        ..base
    })
    .unwrap();
    let se = (short.std_err.powi(2) + long.std_err.powi(2)).sqrt();
    assert!(
        (short.value - long.value).abs() < 4.0 * se,
        "{} vs {}",
        short.value,
        long.value
    );
}

#[test]
fn a_star_oracles() {
    let v = a_star(0.5, 0.0, 2).unwrap();
    assert!((v - (-0.5 + 2.0 * 2f64.ln())).abs() < 1e-9);
    let mut s = RandomStream::new(77, 0);
    for _ in 0..100 {
        let x = -0.99 + 1.98 * s.uniform();
        let y = -0.99 + 1.98 * s.uniform();
        let v = a_star(x, y, 1).unwrap();
        assert!((v - (x.asin() - y.asin())).abs() < 1e-8, "{x} {y}");
    }
}

#[test]
fn bounds_are_symmetric_under_swap() {
    let p = GaussianPair::new(
        DMatrix::from_row_slice(3, 3, &[1.0, 0.4, -0.2, 0.4, 1.0, 0.1, -0.2, 0.1, 1.0]),
        DMatrix::from_row_slice(3, 3, &[1.0, -0.3, 0.2, -0.3, 1.0, 0.5, 0.2, 0.5, 1.0]),
    )
    .unwrap();
    let q = p.swapped();
    let u = [1.2, 0.7, 2.0];
    assert_eq!(
        li_shao_bound(&p, &u).unwrap(),
        li_shao_bound(&q, &u).unwrap()
    );
    assert_eq!(
        orderstat_comparison_bound(&p, &u, 3, 3).unwrap(),
        orderstat_comparison_bound(&q, &u, 3, 1).unwrap()
    );
    let a = minstat_sharp_bound(&p, &u, 2).unwrap();
    let b = minstat_sharp_bound(&q, &u, 2).unwrap();
    assert!((a - b).abs() <= 1e-9 * a);
}

#[test]
fn sharp_bound_decreases_in_the_level() {
    let p = pair2(0.5, -0.2);
    for n in 1..=4usize {
        let start = ((n - 1) as f64).sqrt().max(0.1);
        let values: Vec<f64> = (0..20)
            .map(|i| {
                let u = start + 0.25 * i as f64;
                minstat_sharp_bound(&p, &[u, u + 0.3], n).unwrap()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "n={n}: {values:?}");
    }
}

#[test]
fn worked_minimum_case_passes() {
    let p = pair2(0.5, 0.0);
    let rep = verify_bound(
        &p,
        &[1.0, 1.0],
        2,
        2,
        1_000_000,
        &RandomStream::new(21, 0),
        BoundKind::Comparison,
    )
    .unwrap();
    assert!((rep.bound - (-2.0f64 / 3.0).exp() / 6.0).abs() < 1e-15);
    assert!(rep.pass, "{rep:?}");
    let same = pair2(0.3, 0.3);
    let rep = verify_bound(
        &same,
        &[1.0, 1.0],
        2,
        1,
        100_000,
        &RandomStream::new(22, 0),
        BoundKind::Comparison,
    )
    .unwrap();
    assert_eq!(rep.bound, 0.0);
    assert!(rep.pass && rep.lhs_estimate == 0.0);
}
