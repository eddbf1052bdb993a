//! The second-variation quadratic form Q in strong and weak form.

use crate::error::{Error, Result};
use crate::fd::FieldJet;
use crate::functionals::{gaussian_weight, integrate};
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, VecFn};
use crate::quadrature::QuadratureGrid;
use crate::stability::operator::{drift_coords, StabilityOperator};
use nalgebra::DVector;

/// −∫⟨Tη₁, η₂⟩e^{−f}dV with T the operator's bundle mode.
pub fn quadratic_form(op: &StabilityOperator, eta1: &VecFn, eta2: &VecFn, grid: &QuadratureGrid) -> Result<f64> {
    if !op.mode.is_bundle() {
        return Err(Error::InvalidParameter("quadratic form needs a bundle operator".into()));
    }
    let policy = op.immersion.policy();
    integrate(&op.immersion, grid, |u, jet| {
        let b = eta2(u);
        let a = FieldJet::of(eta1.as_ref(), u, policy);
        if a.value.norm() == 0.0 && b.norm() == 0.0 && a.d2.iter().all(|d| d.norm() == 0.0) {
            return Ok(0.0);
        }
        let xi = op.xi.at(u);
        let l = op.apply_jet(jet, &a, &xi)?;
        Ok(-l.dot(&b) * gaussian_weight(&jet.x, &xi))
    })
}

/// g^{ij}⟨D⊥_i a, D⊥_j b⟩.
pub fn normal_gradient_pairing(jet: &GeometryJet, da: &[DVector<f64>], db: &[DVector<f64>]) -> f64 {
    let na = jet.normal_derivatives(da);
    let nb = jet.normal_derivatives(db);
    let m = jet.dim();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            s += jet.metric_inv[(i, j)] * na[i].dot(&nb[j]);
        }
    }
    s
}

/// ∫(⟨D⊥η₁, D⊥η₂⟩ − Σ⟨h_ij,η₁⟩⟨h_ij,η₂⟩ − ⟨η₁,η₂⟩)e^{−f}dV, equal to Q on
/// ξ-submanifolds when one field has compact support.
pub fn quadratic_form_weak(op: &StabilityOperator, eta1: &VecFn, eta2: &VecFn, grid: &QuadratureGrid) -> Result<f64> {
    let policy = op.immersion.policy();
    integrate(&op.immersion, grid, |u, jet| {
        let a = FieldJet::first_order(eta1.as_ref(), u, policy);
        let b = FieldJet::first_order(eta2.as_ref(), u, policy);
        let xi = op.xi.at(u);
        let grad = normal_gradient_pairing(jet, &a.d1, &b.d1);
        let zero = jet.sff_contract(&a.value).dot(&b.value) + a.value.dot(&b.value);
        Ok((grad - zero) * gaussian_weight(&jet.x, &xi))
    })
}

/// Second variation of Ṽ_H for an SN normal variation of an immersion with
/// parallel H: −∫(⟨Δ⊥η + D⊥_{∇⟨x,H⟩}η, η⟩ + |A_η|²)e^{⟨x,H⟩}dV.
pub fn pmc_second_variation(imm: &ParametricImmersion, eta: &VecFn, grid: &QuadratureGrid) -> Result<f64> {
    let policy = imm.policy();
    integrate(imm, grid, |u, jet| {
        let a = FieldJet::of(eta.as_ref(), u, policy);
        let h = &jet.mean_curvature;
        // parallel H: ∂_i⟨x,H⟩ = ⟨x, ∂_i H⟩ = −⟨A_H x_i, x⊤⟩, so ∇⟨x,H⟩ = −A_H(x⊤)
        let w = jet.tangent_coords(&jet.x_tan);
        let grad = -(jet.shape_operator(h) * w);
        let mut t = jet.bundle_laplacian(&a);
        for (i, d) in jet.normal_derivatives(&a.d1).iter().enumerate() {
            t += d * grad[i];
        }
        let val = t.dot(&a.value) + jet.shape_norm_sq(&a.value);
        Ok(-val * jet.x.dot(h).exp())
    })
}

/// Drift in chart coordinates for the operator's ξ at `u`.
pub fn drift_at(op: &StabilityOperator, jet: &GeometryJet, u: &[f64]) -> DVector<f64> {
    drift_coords(jet, &op.xi.at(u))
}
