//! Explicit negative directions of Q, and the VP-restricted W-stability test
//! for planes.

use crate::catalog::{make_plane, make_sphere, CatalogImmersion, PLANE_HALF_WIDTH};
use crate::error::{Error, Result};
use crate::functionals::{gaussian_weight, integrate, weighted_volume};
use crate::immersion::{ScalarFn, VecFn};
use crate::quadrature::gauss_legendre;
use crate::stability::form::{quadratic_form, quadratic_form_weak};
use crate::stability::operator::{precondition_grid, OperatorMode, StabilityOperator};
use crate::stability::spectrum::{assemble, BasisKind, SpectralProblem};
use crate::xi::XiData;
use nalgebra::DVector;
use serde::Serialize;
use std::sync::Arc;

/// Width of the transition shell of the plane cutoff.
pub const CUTOFF_SHELL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    PlaneCutoff,
    SphereRadial,
    ParallelNormal,
}

/// Which witness to evaluate, and on what.
#[derive(Debug, Clone)]
pub enum WitnessSpec {
    /// φ_R N on the plane through `offset`, with N the first normal axis.
    PlaneCutoff { m: usize, p: usize, offset: Vec<f64>, radius: f64 },
    /// η = x on S^m(r) ⊂ ℝ^{m+p}.
    SphereRadial { m: usize, r: f64, p: usize },
    /// η = a field of the item's parallel normal frame.
    ParallelNormal { item: CatalogImmersion, direction: usize },
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub item: String,
    pub q: f64,
    /// Closed-form or independently integrated value of Q.
    pub expected: f64,
    /// ∫|η|²e^{−f}.
    pub norm_sq: f64,
}

/// Radial cutoff: 1 on ρ ≤ R, 0 on ρ ≥ R + 2, quintic smoothstep in between
/// (|φ'| ≤ 15/16).
pub fn cutoff_profile(rho: f64, radius: f64) -> (f64, f64) {
    let t = (rho - radius) / CUTOFF_SHELL;
    if t <= 0.0 {
        (1.0, 0.0)
    } else if t >= 1.0 {
        (0.0, 0.0)
    } else {
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (1.0 - s, -ds / CUTOFF_SHELL)
    }
}

/// ∫(φ'² − φ²)e^{−ρ²/2} over ℝ^m in polar form, by Gauss–Legendre panels
/// split at the profile's breakpoints.
pub fn plane_cutoff_radial_q(m: usize, radius: f64) -> f64 {
    // |S^{m−1}| from |S⁰| = 2, |S¹| = 2π and |S^{k+1}| = 2π|S^{k−1}|/k
    let mut area = [2.0, 2.0 * std::f64::consts::PI];
    for k in 1..m.saturating_sub(1) {
        area = [area[1], 2.0 * std::f64::consts::PI * area[0] / k as f64];
    }
    let sphere_area = if m == 1 { area[0] } else { area[1] };
    let (nodes, weights) = gauss_legendre(40);
    let mut total = 0.0;
    let mut edges: Vec<f64> = (0..=((radius / 0.5).ceil() as usize)).map(|k| (k as f64 * 0.5).min(radius)).collect();
    edges.dedup();
    edges.extend((1..=8).map(|k| radius + CUTOFF_SHELL * k as f64 / 8.0));
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        for (t, wt) in nodes.iter().zip(&weights) {
            let rho = 0.5 * (a + b) + 0.5 * (b - a) * t;
            let (phi, dphi) = cutoff_profile(rho, radius);
            total += 0.5 * (b - a) * wt * (dphi * dphi - phi * phi) * (-0.5 * rho * rho).exp() * rho.powi(m as i32 - 1);
        }
    }
    sphere_area * total
}

/// Evaluates Q(η, η) for the chosen witness.
pub fn instability_witness(spec: &WitnessSpec) -> Result<Witness> {
    match spec {
        WitnessSpec::PlaneCutoff { m, p, offset, radius } => plane_cutoff(*m, *p, offset, *radius),
        WitnessSpec::SphereRadial { m, r, p } => sphere_radial(*m, *r, *p),
        WitnessSpec::ParallelNormal { item, direction } => parallel_normal(item, *direction),
    }
}

fn plane_cutoff(m: usize, p: usize, offset: &[f64], radius: f64) -> Result<Witness> {
    if !(radius >= 0.0) || radius + CUTOFF_SHELL > PLANE_HALF_WIDTH {
        return Err(Error::InvalidParameter(format!(
            "cutoff radius must lie in [0, {}], got {radius}",
            PLANE_HALF_WIDTH - CUTOFF_SHELL
        )));
    }
    let item = make_plane(m, p, offset)?;
    let n = m + p;
    let pos = item.immersion.position_fn();
    let xi0 = DVector::from_column_slice(offset);
    let eta: VecFn = Arc::new(move |u: &[f64]| {
        let rho = (pos(u) - &xi0).norm();
        let mut v = DVector::zeros(n);
        v[m] = cutoff_profile(rho, radius).0;
        v
    });
    let op = StabilityOperator::new(item.immersion.clone(), XiData::new(item.xi.clone()), OperatorMode::Bundle);
    let grid = item.quadrature_grid()?;
    let q = quadratic_form_weak(&op, &eta, &eta, &grid)?;
    let norm_sq = weighted_norm_sq(&item, &eta)?;
    Ok(Witness { kind: WitnessKind::PlaneCutoff, item: item.name(), q, expected: plane_cutoff_radial_q(m, radius), norm_sq })
}

/// Smallest radius in `radii` (ascending) from which Q(φ_R N) stays negative
/// along the scan, with the scanned values.
pub fn plane_cutoff_threshold(m: usize, p: usize, offset: &[f64], radii: &[f64]) -> Result<(Option<f64>, Vec<(f64, f64)>)> {
    let mut scan = Vec::with_capacity(radii.len());
    for &r in radii {
        let w = plane_cutoff(m, p, offset, r)?;
        scan.push((r, w.q));
    }
    let mut threshold = None;
    for (r, q) in scan.iter().rev() {
        if *q < 0.0 {
            threshold = Some(*r);
        } else {
            break;
        }
    }
    Ok((threshold, scan))
}

fn sphere_radial(m: usize, r: f64, p: usize) -> Result<Witness> {
    let item = make_sphere(m, r, p)?;
    let xi = XiData::new(item.xi.clone());
    let op = StabilityOperator::certified(item.immersion.clone(), xi.clone(), OperatorMode::Bundle, &precondition_grid(&item.immersion)?)?;
    let grid = item.quadrature_grid()?;
    let x = item.immersion.position_fn();
    let q = quadratic_form(&op, &x, &x, &grid)?;
    let (v, _) = weighted_volume(&item.immersion, &xi, &grid)?;
    let norm_sq = weighted_norm_sq(&item, &x)?;
    Ok(Witness { kind: WitnessKind::SphereRadial, item: item.name(), q, expected: -(m as f64 + r * r) * v, norm_sq })
}

fn parallel_normal(item: &CatalogImmersion, direction: usize) -> Result<Witness> {
    let frame = item.frame_fields();
    let n = frame
        .get(direction)
        .cloned()
        .ok_or_else(|| Error::NoParallelFrame(format!("{} has {} parallel directions, asked for {direction}", item.name(), frame.len())))?;
    crate::functionals::check_parallel_frame(&item.immersion, std::slice::from_ref(&n))?;
    let xi = XiData::new(item.xi.clone());
    let op = StabilityOperator::certified(item.immersion.clone(), xi.clone(), OperatorMode::Bundle, &precondition_grid(&item.immersion)?)?;
    let grid = item.quadrature_grid()?;
    let q = quadratic_form(&op, &n, &n, &grid)?;
    // L(N) = N + ⟨h_ij,N⟩h_ij for parallel N
    let expected = -integrate(&item.immersion, &grid, |u, jet| {
        let v = n(u);
        Ok((jet.shape_norm_sq(&v) + v.norm_squared()) * gaussian_weight(&jet.x, &xi.at(u)))
    })?;
    let norm_sq = weighted_norm_sq(item, &n)?;
    Ok(Witness { kind: WitnessKind::ParallelNormal, item: item.name(), q, expected, norm_sq })
}

fn weighted_norm_sq(item: &CatalogImmersion, eta: &VecFn) -> Result<f64> {
    let grid = item.quadrature_grid()?;
    let xi = item.xi.clone();
    integrate(&item.immersion, &grid, |u, jet| Ok(eta(u).norm_squared() * gaussian_weight(&jet.x, &xi(u))))
}

/// Ratio Q(η,η)/‖η‖²_w after VP projection for every Hermite-basis field
/// φ_a e_α of degree ≤ `degree` on the plane through the origin.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WStability {
    pub m: usize,
    pub p: usize,
    pub degree: usize,
    pub fields: usize,
    /// Basis fields lying in the parallel span, whose projection vanishes.
    pub parallel_fields: usize,
    pub min_ratio: f64,
    /// Q/‖η‖² of the constant normal before projection.
    pub constant_ratio: f64,
}

impl WStability {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_ratio >= -tol
    }
}

/// Projects every trial field weighted-orthogonally off the parallel normals
/// in the assembled Galerkin space and evaluates Q on it.
pub fn plane_w_stability(m: usize, p: usize, degree: usize) -> Result<WStability> {
    let item = make_plane(m, p, &vec![0.0; m + p])?;
    let problem = SpectralProblem::new(item, OperatorMode::Bundle, true)?.with_basis(BasisKind::Hermite { degree });
    let asm = assemble(&problem)?;
    let (g, k, c) = (&asm.gram, &asm.stiffness, &asm.constraints);
    let nt = g.nrows();
    let chol = g.clone().cholesky().ok_or(Error::IllConditionedBasis { condition: f64::INFINITY })?;
    // weighted projection y − G⁻¹Cᵀ(CG⁻¹Cᵀ)⁻¹Cy
    let ginv_ct = chol.solve(&c.transpose());
    let s = c * &ginv_ct;
    let s_chol = s.cholesky().ok_or_else(|| Error::NoParallelFrame("constraint rows are dependent".into()))?;
    let mut min_ratio = f64::INFINITY;
    let mut parallel_fields = 0;
    for t in 0..nt {
        let mut y = DVector::zeros(nt);
        y[t] = 1.0;
        let before = g[(t, t)];
        let z = &y - &ginv_ct * s_chol.solve(&(c * &y));
        let norm = z.dot(&(g * &z));
        if norm <= 1e-20 * before {
            parallel_fields += 1;
            continue;
        }
        min_ratio = min_ratio.min(z.dot(&(k * &z)) / norm);
    }
    // the first trial field is the constant along the first normal direction
    let constant_ratio = k[(0, 0)] / g[(0, 0)];
    Ok(WStability { m, p, degree, fields: nt, parallel_fields, min_ratio, constant_ratio })
}

/// Scalar cutoff φ_R(|x − ξ|) as a chart function on a plane.
pub fn plane_cutoff_scalar(item: &CatalogImmersion, radius: f64) -> ScalarFn {
    let pos = item.immersion.position_fn();
    let xi = item.xi.clone();
    Arc::new(move |u: &[f64]| cutoff_profile((pos(u) - xi(u)).norm(), radius).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_product;
    use std::f64::consts::PI;

    #[test]
    fn profile_bounds() {
        let mut max_slope: f64 = 0.0;
        for k in 0..=400 {
            let rho = 2.0 + 3.0 * k as f64 / 400.0;
            let (v, d) = cutoff_profile(rho, 2.5);
            assert!((0.0..=1.0).contains(&v));
            max_slope = max_slope.max(d.abs());
        }
        assert!(max_slope <= 15.0 / 16.0 + 1e-12);
        assert_eq!(cutoff_profile(2.4, 2.5), (1.0, 0.0));
        assert_eq!(cutoff_profile(4.5, 2.5), (0.0, 0.0));
    }

    #[test]
    fn sphere_radial_on_unit_circle() {
        let w = instability_witness(&WitnessSpec::SphereRadial { m: 1, r: 1.0, p: 1 }).unwrap();
        let want = -2.0 * 2.0 * PI * (-0.5f64).exp();
        assert!((w.q - want).abs() < 1e-9 * want.abs(), "{} vs {want}", w.q);
        assert!((w.expected - want).abs() < 1e-12);
    }

    #[test]
    fn parallel_normal_on_cylinder() {
        let cyl = make_product(&make_sphere(1, 1.0, 1).unwrap(), &make_plane(1, 1, &[0.0, 0.0]).unwrap());
        let w = instability_witness(&WitnessSpec::ParallelNormal { item: cyl.clone(), direction: 1 }).unwrap();
        let grid = cyl.quadrature_grid().unwrap();
        let (v, _) = weighted_volume(&cyl.immersion, &XiData::new(cyl.xi.clone()), &grid).unwrap();
        assert!((w.q + v).abs() < 1e-8 * v, "{} vs {}", w.q, -v);
    }

    #[test]
    fn plane_cutoff_matches_radial_oracle() {
        let w = instability_witness(&WitnessSpec::PlaneCutoff { m: 2, p: 1, offset: vec![0.0; 3], radius: 10.0 }).unwrap();
        assert!(w.q < 0.0);
        assert!((w.q + 2.0 * PI).abs() < 1e-8, "{}", w.q);
        let w = instability_witness(&WitnessSpec::PlaneCutoff { m: 1, p: 1, offset: vec![0.0, 0.7], radius: 0.5 }).unwrap();
        // tensor quadrature does not resolve the profile's C² breakpoints exactly
        assert!((w.q - w.expected).abs() < 1e-3 * w.expected.abs(), "{} vs {}", w.q, w.expected);
    }

    #[test]
    fn w_stability_of_line() {
        let w = plane_w_stability(1, 1, 6).unwrap();
        assert!(w.holds(1e-8), "{w:?}");
        assert_eq!(w.parallel_fields, 1);
        assert!((w.constant_ratio + 1.0).abs() < 1e-10);
    }
}
