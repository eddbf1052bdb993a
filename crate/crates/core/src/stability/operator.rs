//! 𝓛 = Δ⊥ − D⊥_W, L = 𝓛 + ⟨h_ij,·⟩h_ij + 1, 𝓛̃ = Δ − ∇_W and L̃ = 𝓛̃ + 1,
//! with drift W = x⊤ + A_ξ(x⊤).

use crate::error::{Error, Result};
use crate::fd::{self, FieldJet};
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, ScalarFn, VecFn};
use crate::quadrature::QuadratureGrid;
use crate::xi::{xi_residual, XiData};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Residual below which an immersion is accepted as a ξ-submanifold.
pub const XI_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorMode {
    /// L on normal fields.
    Bundle,
    /// 𝓛 on normal fields.
    BundleDrift,
    /// L̃ on functions.
    Scalar,
    /// 𝓛̃ on functions.
    ScalarDrift,
}

impl OperatorMode {
    pub fn is_bundle(self) -> bool {
        matches!(self, Self::Bundle | Self::BundleDrift)
    }
}

/// Drift W in chart coordinates at a jet.
pub fn drift_coords(jet: &GeometryJet, xi: &DVector<f64>) -> DVector<f64> {
    let w = jet.tangent_coords(&jet.x_tan);
    &w + jet.shape_operator(xi) * &w
}

/// 𝓛η from the field's jet.
pub fn drift_laplacian(jet: &GeometryJet, w: &DVector<f64>, field: &FieldJet) -> DVector<f64> {
    let mut out = jet.bundle_laplacian(field);
    for (i, d) in jet.normal_derivatives(&field.d1).iter().enumerate() {
        out -= d * w[i];
    }
    out
}

/// Lη from the field's jet.
pub fn stability_l(jet: &GeometryJet, w: &DVector<f64>, field: &FieldJet) -> DVector<f64> {
    drift_laplacian(jet, w, field) + jet.sff_contract(&field.value) + &field.value
}

/// 𝓛̃φ from partials of φ.
pub fn scalar_drift_laplacian(jet: &GeometryJet, w: &DVector<f64>, dphi: &[f64], d2phi: &[f64]) -> f64 {
    let grad: f64 = dphi.iter().zip(w.iter()).map(|(d, wi)| d * wi).sum();
    jet.laplace_beltrami(dphi, d2phi) - grad
}

/// One of the four operators bound to a base immersion and its ξ.
#[derive(Clone)]
pub struct StabilityOperator {
    pub immersion: ParametricImmersion,
    pub xi: XiData,
    pub mode: OperatorMode,
}

impl StabilityOperator {
    /// Binds without certifying the base.
    pub fn new(immersion: ParametricImmersion, xi: XiData, mode: OperatorMode) -> Self {
        Self { immersion, xi, mode }
    }

    /// Binds after checking the ξ-equation on `grid`.
    pub fn certified(immersion: ParametricImmersion, xi: XiData, mode: OperatorMode, grid: &QuadratureGrid) -> Result<Self> {
        ensure_xi_submanifold(&immersion, grid)?;
        Ok(Self::new(immersion, xi, mode))
    }

    pub fn with_mode(&self, mode: OperatorMode) -> Self {
        Self { mode, ..self.clone() }
    }

    /// Ambient drift vector x⊤ + A_ξ(x⊤).
    pub fn drift(&self, u: &[f64]) -> Result<DVector<f64>> {
        let jet = GeometryJet::at(&self.immersion, u)?;
        Ok(jet.push_forward(&drift_coords(&jet, &self.xi.at(u))))
    }

    /// Applies a bundle mode to a normal field.
    pub fn apply(&self, field: &VecFn, u: &[f64]) -> Result<DVector<f64>> {
        let jet = GeometryJet::at(&self.immersion, u)?;
        let fj = FieldJet::of(field.as_ref(), u, self.immersion.policy());
        self.apply_jet(&jet, &fj, &self.xi.at(u))
    }

    pub fn apply_jet(&self, jet: &GeometryJet, fj: &FieldJet, xi: &DVector<f64>) -> Result<DVector<f64>> {
        let w = drift_coords(jet, xi);
        match self.mode {
            OperatorMode::Bundle => Ok(stability_l(jet, &w, fj)),
            OperatorMode::BundleDrift => Ok(drift_laplacian(jet, &w, fj)),
            _ => Err(Error::InvalidParameter("scalar operator applied to a normal field".into())),
        }
    }

    /// Applies a scalar mode to a function.
    pub fn apply_scalar(&self, phi: &ScalarFn, u: &[f64]) -> Result<f64> {
        let jet = GeometryJet::at(&self.immersion, u)?;
        let p = self.immersion.policy();
        let d1 = fd::scalar_gradient(phi.as_ref(), u, p.first);
        let d2 = fd::scalar_hessian(phi.as_ref(), u, p.second);
        let w = drift_coords(&jet, &self.xi.at(u));
        let lap = scalar_drift_laplacian(&jet, &w, &d1, &d2);
        match self.mode {
            OperatorMode::Scalar => Ok(lap + phi(u)),
            OperatorMode::ScalarDrift => Ok(lap),
            _ => Err(Error::InvalidParameter("bundle operator applied to a function".into())),
        }
    }
}

/// NotXiSubmanifold unless the ξ-residual on `grid` is below [`XI_TOLERANCE`].
pub fn ensure_xi_submanifold(imm: &ParametricImmersion, grid: &QuadratureGrid) -> Result<()> {
    let r = xi_residual(imm, grid)?;
    if r.residual > XI_TOLERANCE {
        return Err(Error::NotXiSubmanifold { residual: r.residual, tolerance: XI_TOLERANCE });
    }
    Ok(())
}

/// Coarse grid used for precondition checks.
pub fn precondition_grid(imm: &ParametricImmersion) -> Result<QuadratureGrid> {
    QuadratureGrid::uniform(imm.chart(), 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_product, make_sphere, off_center_sphere};
    use std::sync::Arc;

    #[test]
    fn sphere_position_eigenfield() {
        for (m, r) in [(1usize, 1.0), (2, 1.5), (3, 0.8)] {
            let s = make_sphere(m, r, 1).unwrap();
            let op = StabilityOperator::new(s.immersion.clone(), XiData::new(s.xi.clone()), OperatorMode::Bundle);
            let pos = s.immersion.position_fn();
            let u: Vec<f64> = (0..m).map(|i| 0.6 + 0.4 * i as f64).collect();
            let lx = op.apply(&pos, &u).unwrap();
            let want = pos(&u) * ((m as f64 + r * r) / (r * r));
            assert!((lx - &want).norm() < 1e-7 * want.norm(), "m={m}");
        }
    }

    #[test]
    fn plane_constant_normal_is_fixed() {
        let p = make_plane(2, 2, &[0.0, 0.0, 0.3, 0.1]).unwrap();
        let op = StabilityOperator::new(p.immersion.clone(), XiData::new(p.xi.clone()), OperatorMode::Bundle);
        let n: VecFn = Arc::new(|_: &[f64]| DVector::from_vec(vec![0.0, 0.0, 1.0, -2.0]));
        let ln = op.apply(&n, &[0.4, -1.3]).unwrap();
        assert!((ln - DVector::from_vec(vec![0.0, 0.0, 1.0, -2.0])).norm() < 1e-9);
    }

    #[test]
    fn parallel_field_image() {
        // L(N) = N + ⟨h_ij, N⟩h_ij on S¹ × S¹ for each frame vector
        let s = make_sphere(1, 1.3, 1).unwrap();
        let t = make_product(&s, &s);
        let op = StabilityOperator::new(t.immersion.clone(), XiData::new(t.xi.clone()), OperatorMode::Bundle);
        let u = [0.3, 2.1];
        let jet = GeometryJet::at(&t.immersion, &u).unwrap();
        for f in t.frame_fields() {
            let n = f(&u);
            let want = &n + jet.sff_contract(&n);
            assert!((op.apply(&f, &u).unwrap() - want).norm() < 1e-7);
        }
    }

    #[test]
    fn scalar_modes_on_plane() {
        let p = make_plane(1, 1, &[0.0, 0.0]).unwrap();
        let op = StabilityOperator::new(p.immersion.clone(), XiData::new(p.xi.clone()), OperatorMode::ScalarDrift);
        // u² − 1 is an Ornstein–Uhlenbeck eigenfunction with −𝓛̃ eigenvalue 2
        let phi: ScalarFn = Arc::new(|u: &[f64]| u[0] * u[0] - 1.0);
        let v = op.apply_scalar(&phi, &[0.7]).unwrap();
        assert!((v + 2.0 * (0.49 - 1.0)).abs() < 1e-8);
        let full = op.with_mode(OperatorMode::Scalar).apply_scalar(&phi, &[0.7]).unwrap();
        assert!((full - v - (0.49 - 1.0)).abs() < 1e-12);
        assert!(op.apply(&p.immersion.position_fn(), &[0.0]).is_err());
    }

    #[test]
    fn rejects_non_examples() {
        let imm = off_center_sphere(2, 1.0, &[0.5, 0.0, 0.0]).unwrap();
        let grid = precondition_grid(&imm).unwrap();
        let res = StabilityOperator::certified(imm.clone(), XiData::from_immersion(&imm), OperatorMode::Bundle, &grid);
        assert!(matches!(res, Err(Error::NotXiSubmanifold { .. })));
    }
}
