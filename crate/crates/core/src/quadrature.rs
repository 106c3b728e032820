//! Gauss–Legendre quadrature on the unit interval with node doubling.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

use nalgebra::Vector3;

/// Node count of the first estimate.
pub const INITIAL_NODES: usize = 32;
/// Hard cap on the node count.
pub const MAX_NODES: usize = 256;
/// Two successive estimates must agree to this (scaled by `max(1, |I|)`).
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Nodes and weights of an `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]; store ascending
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fixed-rule estimate of `int_0^1 f(u) du`.
    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        let mut acc = T::zero();
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(u) * w;
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Cached rule for the node counts used by the doubling scheme.
pub fn rule(n: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<(usize, GaussLegendre)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        let mut v = Vec::new();
        let mut k = INITIAL_NODES;
        while k <= MAX_NODES {
            v.push((k, GaussLegendre::new(k)));
            k *= 2;
        }
        v
    });
    rules
        .iter()
        .find(|(k, _)| *k == n)
        .map(|(_, r)| r)
        .unwrap_or_else(|| panic!("no cached Gauss-Legendre rule with {n} nodes"))
}

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn magnitude(&self) -> f64 {
        self.amax()
    }
}

/// Result of the node-doubling scheme.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<T> {
    pub value: T,
    /// Node count of the returned estimate.
    pub nodes: usize,
    /// Difference between the last two estimates.
    pub change: f64,
    pub converged: bool,
}

/// `int_0^1 f(u) du`, doubling from 32 nodes until two successive estimates
/// differ by less than `tol * max(1, |I|)` or 256 nodes are reached.
pub fn integrate_unit<T, F>(mut f: F, tol: f64) -> Adaptive<T>
where
    T: QuadValue + std::ops::Sub<Output = T>,
    F: FnMut(f64) -> T,
{
    let mut n = INITIAL_NODES;
    let mut prev = rule(n).integrate(&mut f);
    loop {
        let next_n = n * 2;
        if next_n > MAX_NODES {
            return Adaptive {
                value: prev,
                nodes: n,
                change: f64::INFINITY,
                converged: false,
            };
        }
        let next = rule(next_n).integrate(&mut f);
        let change = (next - prev).magnitude();
        if change < tol * next.magnitude().max(1.0) {
            return Adaptive {
                value: next,
                nodes: next_n,
                change,
                converged: true,
            };
        }
        if next_n == MAX_NODES {
            return Adaptive {
                value: next,
                nodes: next_n,
                change,
                converged: false,
            };
        }
        prev = next;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_nodes_are_ascending() {
        for n in [1, 2, 5, 32, 256] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes.iter().all(|&u| (0.0..=1.0).contains(&u)));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let r = GaussLegendre::new(5);
        for k in 0..10 {
            let got = r.integrate(|u: f64| u.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn adaptive_converges_on_smooth_integrand() {
        let out = integrate_unit(|u: f64| (3.0 * u).cos(), DEFAULT_TOLERANCE);
        assert!(out.converged);
        assert_eq!(out.nodes, 64);
        assert!((out.value - 3f64.sin() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_reports_non_convergence_on_kink() {
        let out = integrate_unit(|u: f64| (u - 0.3).abs().sqrt(), 1e-14);
        assert!(!out.converged);
        assert_eq!(out.nodes, MAX_NODES);
    }
}
