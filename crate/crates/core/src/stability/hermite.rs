//! Probabilists' Hermite polynomials 𝓗_{n+1}(u) = u𝓗_n − n𝓗_{n−1} and their
//! products, the eigenfunctions of −Δ + ∇_u in L²(ℝ^m, e^{−|u|²/2}du).

use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum, QuadratureGrid};
use serde::{Deserialize, Serialize};

/// Largest total degree accepted, to stay clear of overflow in products.
pub const MAX_DEGREE: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HermiteIndex(pub Vec<usize>);

impl HermiteIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// All multi-indices in m variables with total degree ≤ d, graded.
    pub fn up_to_degree(m: usize, d: usize) -> Vec<HermiteIndex> {
        let mut out = Vec::new();
        for total in 0..=d {
            let mut cur = vec![0; m];
            compositions(total, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(rest: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<HermiteIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(HermiteIndex(cur.clone()));
        return;
    }
    for k in (0..=rest).rev() {
        cur[pos] = k;
        compositions(rest - k, pos + 1, cur, out);
    }
}

/// 𝓗_0(u), …, 𝓗_n(u) from the three-term recurrence.
pub fn hermite_table(n: usize, u: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(u);
    }
    for k in 1..n {
        let next = u * h[k] - k as f64 * h[k - 1];
        h.push(next);
    }
    h
}

fn check_degree(idx: &HermiteIndex) -> Result<()> {
    if idx.degree() > MAX_DEGREE {
        return Err(Error::DegreeTooLarge { degree: idx.degree(), limit: MAX_DEGREE });
    }
    Ok(())
}

/// 𝓗_{n₁⋯n_m}(u) = Π 𝓗_{n_i}(u^i).
pub fn hermite_eval(idx: &HermiteIndex, u: &[f64]) -> Result<f64> {
    check_degree(idx)?;
    Ok(idx.0.iter().zip(u).map(|(&n, &ui)| hermite_table(n, ui)[n]).product())
}

/// Value, gradient and Laplacian, using 𝓗_n′ = n𝓗_{n−1}.
pub fn hermite_jet(idx: &HermiteIndex, u: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
    check_degree(idx)?;
    let m = idx.dim();
    let mut val = vec![0.0; m];
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    for i in 0..m {
        let n = idx.0[i];
        let t = hermite_table(n, u[i]);
        val[i] = t[n];
        d1[i] = if n >= 1 { n as f64 * t[n - 1] } else { 0.0 };
        d2[i] = if n >= 2 { (n * (n - 1)) as f64 * t[n - 2] } else { 0.0 };
    }
    let prod_except = |i: usize| -> f64 { (0..m).filter(|&j| j != i).map(|j| val[j]).product() };
    let value: f64 = val.iter().product();
    let grad: Vec<f64> = (0..m).map(|i| d1[i] * prod_except(i)).collect();
    let lap: f64 = (0..m).map(|i| d2[i] * prod_except(i)).sum();
    Ok((value, grad, lap))
}

/// 𝓗_α / √(α!), orthonormal for the probability weight (2π)^{−m/2}e^{−|u|²/2}.
pub fn normalized_hermite(idx: &HermiteIndex, u: &[f64]) -> Result<f64> {
    Ok(hermite_eval(idx, u)? / factorial_product(idx).sqrt())
}

pub fn factorial_product(idx: &HermiteIndex) -> f64 {
    idx.0.iter().map(|&n| (1..=n).map(|k| k as f64).product::<f64>()).product()
}

/// sup over the grid of |(−Δ + ⟨u,∇⟩)𝓗 − (Σn_i)𝓗|, relative to 1 + |𝓗|·deg.
pub fn ou_eigen_check(idx: &HermiteIndex, grid: &QuadratureGrid) -> Result<f64> {
    let deg = idx.degree() as f64;
    let mut worst: f64 = 0.0;
    for u in &grid.nodes {
        let (v, g, lap) = hermite_jet(idx, u)?;
        let drift: f64 = g.iter().zip(u).map(|(gi, ui)| gi * ui).sum();
        let defect = (-lap + drift - deg * v).abs() / (1.0 + deg * v.abs());
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// max over a ≠ b of |⟨𝓗_a, 𝓗_b⟩_w| / (‖𝓗_a‖_w‖𝓗_b‖_w) with weight e^{−|u|²/2}.
pub fn weighted_orthogonality(indices: &[HermiteIndex], grid: &QuadratureGrid) -> Result<f64> {
    let k = indices.len();
    let mut vals = vec![vec![0.0; grid.len()]; k];
    for (q, u) in grid.nodes.iter().enumerate() {
        let w = grid.weights[q] * (-0.5 * u.iter().map(|t| t * t).sum::<f64>()).exp();
        for (a, idx) in indices.iter().enumerate() {
            vals[a][q] = hermite_eval(idx, u)? * w.sqrt();
        }
    }
    let ip = |a: usize, b: usize| -> f64 {
        let terms: Vec<f64> = vals[a].iter().zip(&vals[b]).map(|(x, y)| x * y).collect();
        pairwise_sum(&terms)
    };
    let norms: Vec<f64> = (0..k).map(|a| ip(a, a).sqrt()).collect();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            worst = worst.max(ip(a, b).abs() / (norms[a] * norms[b]));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::AxisRule;

    #[test]
    fn low_order_polynomials() {
        let h = |n: usize, u: f64| hermite_eval(&HermiteIndex(vec![n]), &[u]).unwrap();
        assert_eq!(h(0, 3.7), 1.0);
        assert_eq!(h(1, 3.7), 3.7);
        assert!((h(2, 1.5) - (1.5 * 1.5 - 1.0)).abs() < 1e-15);
        assert!((h(3, 1.5) - (1.5f64.powi(3) - 3.0 * 1.5)).abs() < 1e-14);
    }

    #[test]
    fn product_eigenvalue() {
        let idx = HermiteIndex(vec![1, 2]);
        assert_eq!(idx.degree(), 3);
        let grid = QuadratureGrid::on_box(&[-4.0, -4.0], &[4.0, 4.0], &[AxisRule::new(8, 1); 2]).unwrap();
        assert!(ou_eigen_check(&idx, &grid).unwrap() < 1e-12);
    }

    #[test]
    fn degree_guard() {
        let idx = HermiteIndex(vec![20, 11]);
        assert!(matches!(hermite_eval(&idx, &[0.1, 0.2]), Err(Error::DegreeTooLarge { degree: 31, .. })));
    }

    #[test]
    fn index_enumeration() {
        let all = HermiteIndex::up_to_degree(2, 3);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], HermiteIndex(vec![0, 0]));
        assert!(all.windows(2).all(|w| w[0].degree() <= w[1].degree()));
        assert_eq!(HermiteIndex::up_to_degree(3, 6).len(), 84);
    }

    #[test]
    fn normalization() {
        let grid = QuadratureGrid::on_box(&[-12.0], &[12.0], &[AxisRule::new(24, 4)]).unwrap();
        let idx = HermiteIndex(vec![5]);
        let s: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .map(|(u, w)| normalized_hermite(&idx, u).unwrap().powi(2) * (-0.5 * u[0] * u[0]).exp() * w)
            .sum();
        assert!((s - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }
}
