//! Pointwise and integrated identities for the operators L, 𝓛 and 𝓛̃:
//! product rule, integration by parts, the cutoff formula, and the height
//! function identities with condition (A).

use crate::error::{Error, Result};
use crate::fd::FieldJet;
use crate::fields::scalar_jet;
use crate::functionals::{check_parallel_frame, gaussian_weight, integrate_n};
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, ScalarFn, VecFn};
use crate::quadrature::QuadratureGrid;
use crate::stability::operator::{
    drift_coords, drift_laplacian, ensure_xi_submanifold, precondition_grid, scalar_drift_laplacian, stability_l,
    OperatorMode, StabilityOperator,
};
use crate::xi::XiData;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Threshold on sup |h(A_ξ(x⊤), ·)| for reporting condition (A) as holding.
pub const CONDITION_A_TOL: f64 = 1e-8;

/// Two sides of an integrated identity.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct IdentityGap {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs|.
    pub gap: f64,
    /// Product of the weighted H¹ norms of the arguments.
    pub scale: f64,
}

impl IdentityGap {
    fn new(lhs: f64, rhs: f64, scale: f64) -> Self {
        Self { lhs, rhs, gap: (lhs - rhs).abs(), scale }
    }

    /// gap / scale, or the raw gap when the scale vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.gap / self.scale
        } else {
            self.gap
        }
    }
}

/// Largest value of `f` over the grid nodes.
pub fn sup_over<F>(imm: &ParametricImmersion, grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&[f64], &GeometryJet) -> Result<f64> + Sync,
{
    let vals: Vec<Result<f64>> = grid
        .nodes
        .par_iter()
        .map(|u| {
            let jet = GeometryJet::at(imm, u)?;
            f(u, &jet)
        })
        .collect();
    let mut best: f64 = 0.0;
    for v in vals {
        let v = v?;
        if !v.is_finite() {
            return Err(Error::NonFinite("pointwise defect"));
        }
        best = best.max(v);
    }
    Ok(best)
}

fn product_field(phi: &ScalarFn, eta: &VecFn) -> VecFn {
    let (phi, eta) = (phi.clone(), eta.clone());
    Arc::new(move |u: &[f64]| eta(u) * phi(u))
}

/// D⊥_{∇φ}η from the partials of φ and η.
fn directional(jet: &GeometryJet, dphi: &[f64], field: &FieldJet) -> DVector<f64> {
    let grad = jet.gradient_coords(dphi);
    let mut out = DVector::zeros(jet.ambient_dim());
    for (i, d) in jet.normal_derivatives(&field.d1).iter().enumerate() {
        out += d * grad[i];
    }
    out
}

/// sup |L(φη) − (𝓛̃φ)η − φLη − 2D⊥_{∇φ}η| over the grid. The bundle operator
/// may be L or 𝓛; the scalar part is always 𝓛̃.
pub fn product_rule_check(op: &StabilityOperator, phi: &ScalarFn, eta: &VecFn, grid: &QuadratureGrid) -> Result<f64> {
    if !op.mode.is_bundle() {
        return Err(Error::InvalidParameter("product rule needs a bundle operator".into()));
    }
    let policy = op.immersion.policy();
    let prod = product_field(phi, eta);
    sup_over(&op.immersion, grid, |u, jet| {
        let xi = op.xi.at(u);
        let w = drift_coords(jet, &xi);
        let fe = FieldJet::of(eta.as_ref(), u, policy);
        let fp = FieldJet::of(prod.as_ref(), u, policy);
        let (p, dp, d2p) = scalar_jet(phi, u, &op.immersion);
        let lhs = op.apply_jet(jet, &fp, &xi)?;
        let lphi = scalar_drift_laplacian(jet, &w, &dp, &d2p);
        let rhs = &fe.value * lphi + op.apply_jet(jet, &fe, &xi)? * p + directional(jet, &dp, &fe) * 2.0;
        Ok((lhs - rhs).norm())
    })
}

/// ∫⟨η₁, 𝓛η₂⟩e^{−f} against −∫⟨D⊥η₁, D⊥η₂⟩e^{−f}; one field must be
/// compactly supported inside the grid's box.
pub fn integration_by_parts_check(
    imm: &ParametricImmersion,
    xi: &XiData,
    eta1: &VecFn,
    eta2: &VecFn,
    grid: &QuadratureGrid,
) -> Result<IdentityGap> {
    let policy = imm.policy();
    let [lhs, rhs, n1, n2] = integrate_n(imm, grid, |u, jet| {
        let z = xi.at(u);
        let w = drift_coords(jet, &z);
        let a = FieldJet::first_order(eta1.as_ref(), u, policy);
        let b = FieldJet::of(eta2.as_ref(), u, policy);
        let da = jet.normal_derivatives(&a.d1);
        let db = jet.normal_derivatives(&b.d1);
        let pair = |x: &[DVector<f64>], y: &[DVector<f64>]| -> f64 {
            let m = jet.dim();
            (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| jet.metric_inv[(i, j)] * x[i].dot(&y[j])).sum()
        };
        let e = gaussian_weight(&jet.x, &z);
        Ok([
            a.value.dot(&drift_laplacian(jet, &w, &b)) * e,
            -pair(&da, &db) * e,
            (a.value.norm_squared() + pair(&da, &da)) * e,
            (b.value.norm_squared() + pair(&db, &db)) * e,
        ])
    })?;
    Ok(IdentityGap::new(lhs, rhs, (n1 * n2).sqrt()))
}

/// Scalar version: ∫φ₁𝓛̃φ₂e^{−f} against −∫⟨∇φ₁, ∇φ₂⟩e^{−f}.
pub fn scalar_integration_by_parts_check(
    imm: &ParametricImmersion,
    xi: &XiData,
    phi1: &ScalarFn,
    phi2: &ScalarFn,
    grid: &QuadratureGrid,
) -> Result<IdentityGap> {
    let [lhs, rhs, n1, n2] = integrate_n(imm, grid, |u, jet| {
        let z = xi.at(u);
        let w = drift_coords(jet, &z);
        let (a, da, _) = scalar_jet(phi1, u, imm);
        let (b, db, d2b) = scalar_jet(phi2, u, imm);
        let ga = jet.gradient_coords(&da);
        let gb = jet.gradient_coords(&db);
        let e = gaussian_weight(&jet.x, &z);
        Ok([
            a * scalar_drift_laplacian(jet, &w, &db, &d2b) * e,
            -(ga.dot(&(&jet.metric * &gb))) * e,
            (a * a + ga.dot(&(&jet.metric * &ga))) * e,
            (b * b + gb.dot(&(&jet.metric * &gb))) * e,
        ])
    })?;
    Ok(IdentityGap::new(lhs, rhs, (n1 * n2).sqrt()))
}

/// ∫⟨φη, L(φη)⟩e^{−f} against ∫φ²⟨η, Lη⟩e^{−f} − ∫|∇φ|²|η|²e^{−f} for a
/// compactly supported φ.
pub fn cutoff_identity_check(
    imm: &ParametricImmersion,
    xi: &XiData,
    phi: &ScalarFn,
    eta: &VecFn,
    grid: &QuadratureGrid,
) -> Result<IdentityGap> {
    let policy = imm.policy();
    let prod = product_field(phi, eta);
    let [lhs, rhs, norm] = integrate_n(imm, grid, |u, jet| {
        let z = xi.at(u);
        let w = drift_coords(jet, &z);
        let fe = FieldJet::of(eta.as_ref(), u, policy);
        let fp = FieldJet::of(prod.as_ref(), u, policy);
        let (p, dp, _) = scalar_jet(phi, u, imm);
        let gp = jet.gradient_coords(&dp);
        let grad_sq = gp.dot(&(&jet.metric * &gp));
        let e = gaussian_weight(&jet.x, &z);
        let eta_sq = fe.value.norm_squared();
        let dn = jet.normal_derivatives(&fp.d1);
        let m = jet.dim();
        let mut dsq = 0.0;
        for i in 0..m {
            for j in 0..m {
                dsq += jet.metric_inv[(i, j)] * dn[i].dot(&dn[j]);
            }
        }
        Ok([
            fp.value.dot(&stability_l(jet, &w, &fp)) * e,
            (p * p * fe.value.dot(&stability_l(jet, &w, &fe)) - grad_sq * eta_sq) * e,
            (fp.value.norm_squared() + dsq) * e,
        ])
    })?;
    Ok(IdentityGap::new(lhs, rhs, norm))
}

/// Defects of the height-function identities for one constant vector v.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct HeightIdentities {
    /// sup over the grid and the frame of |𝓛̃⟨v,N⟩ + ⟨A_N, A_{v⊥}⟩ − ⟨A_N v⊤, A_ξ x⊤⟩|.
    pub vn_defect: f64,
    /// sup |L(v⊥) − v⊥ − h(A_ξ x⊤, v⊤)|.
    pub lvbot_defect: f64,
    /// sup |h(A_ξ x⊤, v⊤)| for this v.
    pub condition_a_v: f64,
    /// sup over the grid of the operator norm of h(A_ξ x⊤, ·).
    pub condition_a: f64,
    pub condition_a_holds: bool,
}

/// Evaluates both height identities on `grid` and reports condition (A).
pub fn height_identities(
    imm: &ParametricImmersion,
    xi: &XiData,
    v: &DVector<f64>,
    frame: &[VecFn],
    grid: &QuadratureGrid,
) -> Result<HeightIdentities> {
    if v.len() != imm.ambient_dim() {
        return Err(Error::InvalidParameter(format!("v has length {} but the ambient dimension is {}", v.len(), imm.ambient_dim())));
    }
    ensure_xi_submanifold(imm, &precondition_grid(imm)?)?;
    check_parallel_frame(imm, frame)?;
    let policy = imm.policy();
    let op = StabilityOperator::new(imm.clone(), xi.clone(), OperatorMode::Bundle);
    let vv = v.clone();
    let pos = imm.position_fn();
    let imm2 = imm.clone();
    // v⊥ as a field, projected through each node's own jet
    let vperp: VecFn = Arc::new(move |u: &[f64]| match GeometryJet::at_unchecked(&imm2, u) {
        Ok(j) => j.normal_part(&vv),
        Err(_) => DVector::from_element(pos(u).len(), f64::NAN),
    });
    let heights: Vec<ScalarFn> = frame
        .iter()
        .map(|e| {
            let (e, v) = (e.clone(), v.clone());
            Arc::new(move |u: &[f64]| v.dot(&e(u))) as ScalarFn
        })
        .collect();

    let per_node = |u: &[f64], jet: &GeometryJet| -> Result<[f64; 4]> {
        let z = xi.at(u);
        let w = drift_coords(jet, &z);
        let xt = jet.tangent_coords(&jet.x_tan);
        let axt = jet.shape_operator(&z) * &xt;
        let vt = jet.tangent_coords(v);
        let vn = jet.normal_part(v);
        let mut vn_def: f64 = 0.0;
        for (e, hgt) in frame.iter().zip(&heights) {
            let n = e(u);
            let (_, d1, d2) = scalar_jet(hgt, u, imm);
            let lhs = scalar_drift_laplacian(jet, &w, &d1, &d2);
            let an = jet.shape_operator(&n);
            let rhs = -jet.sff_contract(&n).dot(&vn) + (&an * &vt).dot(&(&jet.metric * &axt));
            vn_def = vn_def.max((lhs - rhs).abs());
        }
        let fj = FieldJet::of(vperp.as_ref(), u, policy);
        let l = op.apply_jet(jet, &fj, &z)?;
        let hv = jet.sff_apply(&axt, &vt);
        let lv_def = (l - &vn - &hv).norm();
        // operator norm of v ↦ h(A_ξ x⊤, v⊤) over unit v
        let cols = nalgebra::DMatrix::from_fn(jet.ambient_dim(), jet.dim(), |r, j| {
            let mut ej = DVector::zeros(jet.dim());
            ej[j] = 1.0;
            jet.sff_apply(&axt, &ej)[r]
        });
        let map = cols * &jet.metric_inv * jet.tangent.transpose();
        let opnorm = map.singular_values().max();
        Ok([vn_def, lv_def, hv.norm(), opnorm])
    };
    let vals: Vec<Result<[f64; 4]>> = grid
        .nodes
        .par_iter()
        .map(|u| {
            let jet = GeometryJet::at(imm, u)?;
            per_node(u, &jet)
        })
        .collect();
    let mut sup = [0.0f64; 4];
    for r in vals {
        let r = r?;
        for k in 0..4 {
            if !r[k].is_finite() {
                return Err(Error::NonFinite("height identities"));
            }
            sup[k] = sup[k].max(r[k]);
        }
    }
    Ok(HeightIdentities {
        vn_defect: sup[0],
        lvbot_defect: sup[1],
        condition_a_v: sup[2],
        condition_a: sup[3],
        condition_a_holds: sup[3] <= CONDITION_A_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_product, make_sphere, CatalogImmersion};
    use crate::fields::{random_compact_normal_field, random_compact_scalar, SupportWindow};
    use rand::SeedableRng;

    fn support_grid(item: &CatalogImmersion, w: &SupportWindow) -> QuadratureGrid {
        let c = item.immersion.chart();
        let (lo, hi) = w.support_box(&c.lower, &c.upper);
        item.quadrature_on(&lo, &hi).unwrap()
    }

    fn operator(item: &CatalogImmersion) -> StabilityOperator {
        StabilityOperator::new(item.immersion.clone(), XiData::new(item.xi.clone()), OperatorMode::Bundle)
    }

    #[test]
    fn product_rule_on_sphere_and_circle() {
        let s = make_sphere(2, 1.3, 2).unwrap();
        let grid = s.verification_grid_with(6).unwrap();
        let pos = s.immersion.position_fn();
        let height: ScalarFn = Arc::new(move |u: &[f64]| pos(u)[0] - 0.5 * pos(u)[2]);
        let n = s.frame_fields()[1].clone();
        let d = product_rule_check(&operator(&s), &height, &n, &grid).unwrap();
        assert!(d < 1e-6, "{d}");

        let c = make_sphere(1, 0.9, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (bump, _) = random_compact_scalar(&c.immersion, &mut rng);
        let x = c.immersion.position_fn();
        let d = product_rule_check(&operator(&c), &bump, &x, &c.verification_grid_with(12).unwrap()).unwrap();
        assert!(d < 1e-6, "{d}");
        let one: ScalarFn = Arc::new(|_: &[f64]| 1.0);
        assert!(product_rule_check(&operator(&c), &one, &x, &c.verification_grid_with(8).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn integration_by_parts_on_plane_and_cylinder() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = make_plane(2, 1, &[0.0, 0.0, 0.4]).unwrap();
        let xi = XiData::new(p.xi.clone());
        let eta = random_compact_normal_field(&p.immersion, &mut rng);
        let grid = support_grid(&p, eta.support.as_ref().unwrap());
        let g = integration_by_parts_check(&p.immersion, &xi, &eta.values, &eta.values, &grid).unwrap();
        assert!(g.relative() < 1e-6, "{g:?}");

        let cyl = make_product(&make_sphere(1, 1.2, 1).unwrap(), &make_plane(1, 1, &[0.0, 0.3]).unwrap());
        let xi = XiData::new(cyl.xi.clone());
        let eta = random_compact_normal_field(&cyl.immersion, &mut rng);
        let grid = support_grid(&cyl, eta.support.as_ref().unwrap());
        let par = cyl.frame_fields()[1].clone();
        let g = integration_by_parts_check(&cyl.immersion, &xi, &eta.values, &eta.values, &grid).unwrap();
        assert!(g.relative() < 1e-6, "{g:?}");
        let g = integration_by_parts_check(&cyl.immersion, &xi, &eta.values, &par, &grid).unwrap();
        assert!(g.lhs.abs() < 1e-9 && g.rhs.abs() < 1e-9, "{g:?}");

        let (a, w) = random_compact_scalar(&cyl.immersion, &mut rng);
        let grid = support_grid(&cyl, &w);
        let g = scalar_integration_by_parts_check(&cyl.immersion, &xi, &a, &a, &grid).unwrap();
        assert!(g.relative() < 1e-6, "{g:?}");
    }

    #[test]
    fn cutoff_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s = make_sphere(2, 1.1, 1).unwrap();
        let xi = XiData::new(s.xi.clone());
        let (phi, w) = random_compact_scalar(&s.immersion, &mut rng);
        let x = s.immersion.position_fn();
        let g = cutoff_identity_check(&s.immersion, &xi, &phi, &x, &support_grid(&s, &w)).unwrap();
        assert!(g.relative() < 1e-6, "{g:?}");
    }

    #[test]
    fn height_identities_on_catalog_items() {
        let v = DVector::from_vec(vec![0.3, -0.7, 0.5]);
        let s = make_sphere(2, 1.4, 1).unwrap();
        let h = height_identities(&s.immersion, &XiData::new(s.xi.clone()), &v, &s.frame_fields(), &s.verification_grid_with(6).unwrap()).unwrap();
        assert!(h.vn_defect < 1e-6 && h.lvbot_defect < 1e-6, "{h:?}");
        assert!(h.condition_a_holds);

        let cyl = make_product(&make_sphere(1, 0.8, 1).unwrap(), &make_plane(1, 1, &[0.0, 0.5]).unwrap());
        let v = DVector::from_vec(vec![0.2, 0.9, -0.4, 0.6]);
        let grid = cyl.verification_grid_with(6).unwrap();
        let h = height_identities(&cyl.immersion, &XiData::new(cyl.xi.clone()), &v, &cyl.frame_fields(), &grid).unwrap();
        assert!(h.vn_defect < 1e-6 && h.lvbot_defect < 1e-6, "{h:?}");

        let p = make_plane(2, 2, &[0.0, 0.0, 1.0, -0.5]).unwrap();
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let h = height_identities(&p.immersion, &XiData::new(p.xi.clone()), &v, &p.frame_fields(), &p.verification_grid_with(5).unwrap()).unwrap();
        assert!(h.vn_defect < 1e-9 && h.lvbot_defect < 1e-9 && h.condition_a_holds, "{h:?}");
    }
}
