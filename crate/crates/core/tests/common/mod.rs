//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gamma at integers and half-integers by the recurrence from 1 and 1/2.
pub fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!((twice - 2.0 * x).abs() < 1e-12 && twice >= 1.0);
    let (mut g, mut at) = if twice as i64 % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while at < x - 0.25 {
        g *= at;
        at += 1.0;
    }
    g
}

/// Student-t density for integer degrees of freedom.
pub fn t_density(x: f64, dof: u32) -> f64 {
    let nu = dof as f64;
    let c = gamma_half_integer((nu + 1.0) / 2.0) / ((nu * PI).sqrt() * gamma_half_integer(nu / 2.0));
    c * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

/// Upper tail `P(T > t)` by composite Gauss-Legendre quadrature of the
/// density over `[0, t]`.
pub fn t_sf_quadrature(t: f64, dof: u32) -> f64 {
    // 5-point Gauss-Legendre on [-1, 1]
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels = 400;
    let h = t / panels as f64;
    let mut integral = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            integral += w * t_density(mid + 0.5 * h * x, dof);
        }
    }
    0.5 - 0.5 * h * integral
}

/// Upper `prob` quantile of t by bisection on the quadrature tail.
pub fn t_quantile_bisection(prob: f64, dof: u32) -> f64 {
    let (mut lo, mut hi) = (-200.0, 200.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_sf_quadrature(mid, dof) > prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest gap between the empirical CDF of `draws` and the U(0, 1) CDF on
/// the grid `k / points`, `k = 1..points`.
pub fn uniform_grid_deviation(draws: &[f64], points: usize) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    (1..=points)
        .map(|k| {
            let x = k as f64 / points as f64;
            let below = sorted.partition_point(|&v| v <= x) as f64;
            (below / n - x).abs()
        })
        .fold(0.0, f64::max)
}
