//! Tensor Gauss–Legendre quadrature on chart boxes.

use crate::error::{Error, Result};
use crate::immersion::ChartBox;
use serde::Serialize;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule along one axis: `panels` equal sub-intervals with `nodes` points each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AxisRule {
    pub nodes: usize,
    pub panels: usize,
}

impl AxisRule {
    pub fn new(nodes: usize, panels: usize) -> Self {
        Self { nodes, panels }
    }

    pub fn total(&self) -> usize {
        self.nodes * self.panels
    }
}

/// Tensor-product nodes and chart weights on a box. The induced measure
/// factor √det g is supplied by the immersion at evaluation time.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub rules: Vec<AxisRule>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl QuadratureGrid {
    pub fn on_box(lower: &[f64], upper: &[f64], rules: &[AxisRule]) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != rules.len() || lower.is_empty() {
            return Err(Error::InvalidParameter("quadrature box dimensions disagree".into()));
        }
        let mut axes: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(lower.len());
        for ((&a, &b), rule) in lower.iter().zip(upper).zip(rules) {
            if !(b > a) || rule.nodes == 0 || rule.panels == 0 {
                return Err(Error::InvalidParameter(format!("bad axis [{a}, {b}] with {rule:?}")));
            }
            let (z, w) = gauss_legendre(rule.nodes);
            let width = (b - a) / rule.panels as f64;
            let mut xs = Vec::with_capacity(rule.total());
            let mut ws = Vec::with_capacity(rule.total());
            for p in 0..rule.panels {
                let lo = a + p as f64 * width;
                for (zi, wi) in z.iter().zip(&w) {
                    xs.push(lo + 0.5 * width * (zi + 1.0));
                    ws.push(0.5 * width * wi);
                }
            }
            axes.push((xs, ws));
        }
        let total: usize = axes.iter().map(|a| a.0.len()).product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            nodes.push(idx.iter().enumerate().map(|(d, &k)| axes[d].0[k]).collect());
            weights.push(idx.iter().enumerate().map(|(d, &k)| axes[d].1[k]).product());
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].0.len() {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(Self {
            nodes,
            weights,
            rules: rules.to_vec(),
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        })
    }

    /// Same number of nodes on every axis of the chart box.
    pub fn uniform(chart: &ChartBox, per_axis: usize) -> Result<Self> {
        let rules = vec![AxisRule::new(per_axis, 1); chart.dim()];
        Self::on_box(&chart.lower, &chart.upper, &rules)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Sum in a fixed pairwise order, independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-14);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [5, 24, 96] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((s - exact).abs() < 1e-13, "n={n}");
            assert!(w.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn tensor_grid_gaussian() {
        let g = QuadratureGrid::on_box(&[-9.0, -9.0], &[9.0, 9.0], &[AxisRule::new(24, 3); 2]).unwrap();
        let vals: Vec<f64> = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(u, w)| w * (-0.5 * (u[0] * u[0] + u[1] * u[1])).exp())
            .collect();
        let s = pairwise_sum(&vals);
        assert!((s - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
