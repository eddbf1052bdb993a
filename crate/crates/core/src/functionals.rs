//! Weighted volume functionals V_ξ, V̄_ξ, Ṽ_ξ, their first and second
//! variations, and finite-difference oracles along explicit variations.

use crate::catalog::CatalogImmersion;
use crate::error::{Error, Result};
use crate::fd;
use crate::fields::NormalField;
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, VecFn};
use crate::quadrature::{pairwise_sum, AxisRule, QuadratureGrid};
use crate::stability::form::{pmc_second_variation, quadratic_form};
use crate::stability::operator::{ensure_xi_submanifold, precondition_grid, StabilityOperator};
use crate::stability::OperatorMode;
use crate::xi::XiData;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default time step of the finite-difference oracles.
pub const FD_STEP: f64 = 0.02;
/// Node counts per axis visited by quadrature refinement.
pub const REFINEMENT_LEVELS: [usize; 4] = [12, 24, 48, 96];
/// Relative change at which refinement stops.
pub const REFINEMENT_TOL: f64 = 1e-10;

/// ∫ F dV over the grid, summed pairwise in node order.
pub fn integrate<F>(imm: &ParametricImmersion, grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&[f64], &GeometryJet) -> Result<f64> + Sync,
{
    Ok(integrate_n::<1, _>(imm, grid, |u, j| Ok([f(u, j)?]))?[0])
}

/// Several integrals sharing one pass over the nodes.
pub fn integrate_n<const N: usize, F>(imm: &ParametricImmersion, grid: &QuadratureGrid, f: F) -> Result<[f64; N]>
where
    F: Fn(&[f64], &GeometryJet) -> Result<[f64; N]> + Sync,
{
    let terms: Vec<Result<[f64; N]>> = grid
        .nodes
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(u, w)| {
            let jet = GeometryJet::at(imm, u)?;
            let vals = f(u, &jet)?;
            let dv = w * jet.volume_density;
            Ok(vals.map(|v| v * dv))
        })
        .collect();
    let mut cols = vec![Vec::with_capacity(terms.len()); N];
    for t in terms {
        let t = t?;
        for k in 0..N {
            cols[k].push(t[k]);
        }
    }
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = pairwise_sum(&cols[k]);
        if !out[k].is_finite() {
            return Err(Error::NonFinite("integral"));
        }
    }
    Ok(out)
}

/// e^{−f} with f = ½|x − ξ|².
pub fn gaussian_weight(x: &DVector<f64>, xi: &DVector<f64>) -> f64 {
    (-0.5 * (x - xi).norm_squared()).exp()
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Volumes {
    pub v_xi: f64,
    pub v_bar: f64,
    pub v_tilde: f64,
}

/// (V_ξ, V̄_ξ) on the grid.
pub fn weighted_volume(imm: &ParametricImmersion, xi: &XiData, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    let v = volumes(imm, xi, grid)?;
    Ok((v.v_xi, v.v_bar))
}

/// Ṽ_ξ = ∫ e^{⟨x,ξ⟩} dV.
pub fn pmc_volume(imm: &ParametricImmersion, xi: &XiData, grid: &QuadratureGrid) -> Result<f64> {
    Ok(volumes(imm, xi, grid)?.v_tilde)
}

pub fn volumes(imm: &ParametricImmersion, xi: &XiData, grid: &QuadratureGrid) -> Result<Volumes> {
    let [a, b, c] = integrate_n(imm, grid, |u, jet| {
        let z = xi.at(u);
        let f = xi.f(&jet.x, &z);
        let fbar = xi.f_bar(&jet.x, &z);
        Ok([(-f).exp(), (-fbar).exp(), jet.x.dot(&z).exp()])
    })?;
    Ok(Volumes { v_xi: a, v_bar: b, v_tilde: c })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RefinedVolumes {
    pub volumes: Volumes,
    pub nodes_per_axis: usize,
    pub converged: bool,
    /// (nodes per axis, V_ξ) for every level visited.
    pub history: Vec<(usize, f64)>,
}

/// Rules with `total` nodes per axis, keeping each axis's panel count.
pub fn rules_with_total(rules: &[AxisRule], total: usize) -> Vec<AxisRule> {
    rules.iter().map(|r| AxisRule::new((total / r.panels).max(2), r.panels)).collect()
}

/// Doubles the per-axis nodes until V_ξ settles to [`REFINEMENT_TOL`].
pub fn refined_volumes(item: &CatalogImmersion) -> Result<RefinedVolumes> {
    let xi = XiData::new(item.xi.clone());
    let chart = item.immersion.chart();
    let mut history = Vec::new();
    let mut last: Option<Volumes> = None;
    for &n in REFINEMENT_LEVELS.iter() {
        let grid = QuadratureGrid::on_box(&chart.lower, &chart.upper, &rules_with_total(&item.rules, n))?;
        let v = volumes(&item.immersion, &xi, &grid)?;
        history.push((n, v.v_xi));
        if let Some(prev) = last {
            if (v.v_xi - prev.v_xi).abs() <= REFINEMENT_TOL * v.v_xi.abs() {
                return Ok(RefinedVolumes { volumes: v, nodes_per_axis: n, converged: true, history });
            }
        }
        last = Some(v);
    }
    let n = *REFINEMENT_LEVELS.last().unwrap();
    Ok(RefinedVolumes { volumes: last.unwrap(), nodes_per_axis: n, converged: false, history })
}

/// ψ in F(p, t) = x(p) + ψ(t)η(p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeProfile {
    /// ψ(t) = t.
    Linear,
    /// ψ(t) = t + ½ a t².
    Quadratic { accel: f64 },
}

impl TimeProfile {
    pub fn psi(self, t: f64) -> f64 {
        match self {
            Self::Linear => t,
            Self::Quadratic { accel } => t + 0.5 * accel * t * t,
        }
    }

    /// ψ″(0) = 0.
    pub fn is_sn(self) -> bool {
        match self {
            Self::Linear => true,
            Self::Quadratic { accel } => accel == 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationFamily {
    pub field: NormalField,
    /// η is normal, so gradient terms of the first variation drop out.
    pub normal: bool,
    pub profile: TimeProfile,
}

impl VariationFamily {
    pub fn normal(field: NormalField) -> Self {
        Self { field, normal: true, profile: TimeProfile::Linear }
    }

    pub fn general(field: NormalField) -> Self {
        Self { field, normal: false, profile: TimeProfile::Linear }
    }

    pub fn with_profile(mut self, profile: TimeProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn is_sn(&self) -> bool {
        self.profile.is_sn()
    }

    /// F(p, t).
    pub fn position(&self, imm: &ParametricImmersion, u: &[f64], t: f64) -> DVector<f64> {
        imm.position(u) + self.field.eval(u) * self.profile.psi(t)
    }

    /// Sub-box of the chart containing the support of η.
    pub fn support_box(&self, imm: &ParametricImmersion) -> (Vec<f64>, Vec<f64>) {
        let c = imm.chart();
        match &self.field.support {
            Some(w) => w.support_box(&c.lower, &c.upper),
            None => (c.lower.clone(), c.upper.clone()),
        }
    }
}

struct NodeSample {
    weight: f64,
    x: DVector<f64>,
    jac: DMatrix<f64>,
    eta: DVector<f64>,
    deta: DMatrix<f64>,
    xi: DVector<f64>,
}

/// Node data for evaluating all three functionals along F(·, t).
pub struct VariationSampler {
    nodes: Vec<NodeSample>,
    profile: TimeProfile,
    rank_tol: f64,
}

impl VariationSampler {
    pub fn new(imm: &ParametricImmersion, xi: &XiData, fam: &VariationFamily, grid: &QuadratureGrid) -> Result<Self> {
        let policy = imm.policy();
        let nodes = grid
            .nodes
            .par_iter()
            .zip(grid.weights.par_iter())
            .map(|(u, w)| {
                if !imm.chart().contains(u) {
                    return Err(Error::OutOfDomain { u: u.clone() });
                }
                let d = fd::gradient(fam.field.values.as_ref(), u, policy.first);
                let n = imm.ambient_dim();
                let deta = DMatrix::from_fn(n, d.len(), |r, c| d[c][r]);
                Ok(NodeSample {
                    weight: *w,
                    x: imm.position(u),
                    jac: imm.jacobian(u),
                    eta: fam.field.eval(u),
                    deta,
                    xi: xi.at(u),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes, profile: fam.profile, rank_tol: imm.rank_tolerance() })
    }

    /// [V_ξ, V̄_ξ, Ṽ_ξ] of F(·, t).
    pub fn eval(&self, t: f64) -> Result<[f64; 3]> {
        let s = self.profile.psi(t);
        let mut cols = [Vec::with_capacity(self.nodes.len()), Vec::new(), Vec::new()];
        for nd in &self.nodes {
            let j = &nd.jac + &nd.deta * s;
            let det = (j.transpose() * &j).determinant();
            if det <= self.rank_tol {
                return Err(Error::StepTooLarge { step: t });
            }
            let dv = nd.weight * det.sqrt();
            let x = &nd.x + &nd.eta * s;
            let f = 0.5 * (&x - &nd.xi).norm_squared();
            cols[0].push((-f).exp() * dv);
            cols[1].push((-f + 0.5 * nd.xi.norm_squared()).exp() * dv);
            cols[2].push(x.dot(&nd.xi).exp() * dv);
        }
        let out = [pairwise_sum(&cols[0]), pairwise_sum(&cols[1]), pairwise_sum(&cols[2])];
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("functional along variation"));
        }
        Ok(out)
    }
}

fn combine(a: [f64; 3], b: [f64; 3], f: impl Fn(f64, f64) -> f64) -> [f64; 3] {
    [f(a[0], b[0]), f(a[1], b[1]), f(a[2], b[2])]
}

/// Central difference with one Richardson step: [V′, V̄′, Ṽ′] at t = 0.
pub fn first_variation_fd(
    imm: &ParametricImmersion,
    xi: &XiData,
    fam: &VariationFamily,
    grid: &QuadratureGrid,
    step: f64,
) -> Result<[f64; 3]> {
    let s = VariationSampler::new(imm, xi, fam, grid)?;
    let d = |h: f64| -> Result<[f64; 3]> { Ok(combine(s.eval(h)?, s.eval(-h)?, |p, m| (p - m) / (2.0 * h))) };
    let (coarse, fine) = (d(step)?, d(0.5 * step)?);
    Ok(combine(fine, coarse, |f, c| (4.0 * f - c) / 3.0))
}

/// Second central difference with one Richardson step: [V″, V̄″, Ṽ″] at t = 0.
pub fn second_variation_fd(
    imm: &ParametricImmersion,
    xi: &XiData,
    fam: &VariationFamily,
    grid: &QuadratureGrid,
    step: f64,
) -> Result<[f64; 3]> {
    if !fam.is_sn() {
        return Err(Error::InvalidParameter("second variation oracle needs an SN family".into()));
    }
    let s = VariationSampler::new(imm, xi, fam, grid)?;
    let v0 = s.eval(0.0)?;
    let d = |h: f64| -> Result<[f64; 3]> {
        let p = s.eval(h)?;
        let m = s.eval(-h)?;
        Ok([0, 1, 2].map(|k| (p[k] - 2.0 * v0[k] + m[k]) / (h * h)))
    };
    let (coarse, fine) = (d(step)?, d(0.5 * step)?);
    Ok(combine(fine, coarse, |f, c| (4.0 * f - c) / 3.0))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct FirstVariation {
    pub v: f64,
    pub v_bar: f64,
    pub v_tilde: f64,
}

/// Analytic first variations of V_ξ, V̄_ξ and Ṽ_ξ along the family at t = 0.
/// ξ must be a smooth field for the gradient terms of general variations.
pub fn first_variation(
    imm: &ParametricImmersion,
    xi: &XiData,
    fam: &VariationFamily,
    grid: &QuadratureGrid,
) -> Result<FirstVariation> {
    let policy = imm.policy();
    let pos = imm.position_fn();
    let xf = xi.xi.clone();
    let pairing = move |u: &[f64]| pos(u).dot(&xf(u));
    let xf2 = xi.xi.clone();
    let half_sq = move |u: &[f64]| 0.5 * xf2(u).norm_squared();
    let [v, vb, vt] = integrate_n(imm, grid, |u, jet| {
        let eta = fam.field.eval(u);
        let z = xi.at(u);
        let e = &jet.mean_curvature + &jet.x_nor - &z;
        let ht = &jet.mean_curvature - &z;
        let (gp, gq) = if fam.normal {
            (0.0, 0.0)
        } else {
            let dp = fd::scalar_gradient(&pairing, u, policy.first);
            let dq = fd::scalar_gradient(&half_sq, u, policy.first);
            let gp = jet.push_forward(&jet.gradient_coords(&dp));
            let gq = jet.push_forward(&jet.gradient_coords(&dq));
            (gp.dot(&eta), gq.dot(&eta))
        };
        let f = xi.f(&jet.x, &z);
        let fbar = xi.f_bar(&jet.x, &z);
        let en = e.dot(&eta);
        Ok([
            -(en + gp - gq) * (-f).exp(),
            -(en + gp) * (-fbar).exp(),
            -(ht.dot(&eta) + gp) * jet.x.dot(&z).exp(),
        ])
    })?;
    Ok(FirstVariation { v, v_bar: vb, v_tilde: vt })
}

/// Q(η, η) = −∫⟨Lη, η⟩e^{−f}dV on a certified ξ-submanifold.
pub fn second_variation(imm: &ParametricImmersion, xi: &XiData, eta: &NormalField, grid: &QuadratureGrid) -> Result<f64> {
    let op = StabilityOperator::certified(imm.clone(), xi.clone(), OperatorMode::Bundle, &precondition_grid(imm)?)?;
    quadratic_form(&op, &eta.values, &eta.values, grid)
}

/// ∫⟨η, e_α⟩e^{−f}dV for each frame vector.
pub fn vp_defect(
    imm: &ParametricImmersion,
    xi: &XiData,
    eta: &NormalField,
    frame: &[VecFn],
    grid: &QuadratureGrid,
) -> Result<Vec<f64>> {
    check_parallel_frame(imm, frame)?;
    frame
        .iter()
        .map(|e| integrate(imm, grid, |u, jet| Ok(eta.eval(u).dot(&e(u)) * gaussian_weight(&jet.x, &xi.at(u)))))
        .collect()
}

/// η minus its weighted projection onto the span of the parallel frame.
pub fn vp_project(
    imm: &ParametricImmersion,
    xi: &XiData,
    eta: &NormalField,
    frame: &[VecFn],
    grid: &QuadratureGrid,
) -> Result<NormalField> {
    let d = vp_defect(imm, xi, eta, frame, grid)?;
    let k = frame.len();
    let mut gram = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let g = integrate(imm, grid, |u, jet| Ok(frame[a](u).dot(&frame[b](u)) * gaussian_weight(&jet.x, &xi.at(u))))?;
            gram[(a, b)] = g;
            gram[(b, a)] = g;
        }
    }
    let c = gram
        .cholesky()
        .ok_or_else(|| Error::NoParallelFrame("frame Gram matrix is singular".into()))?
        .solve(&DVector::from_vec(d));
    let vals = eta.values.clone();
    let fr: Vec<VecFn> = frame.to_vec();
    Ok(NormalField {
        values: Arc::new(move |u: &[f64]| {
            let mut v = vals(u);
            for (e, ca) in fr.iter().zip(c.iter()) {
                v -= e(u) * *ca;
            }
            v
        }),
        support: None,
        parallel: false,
    })
}

/// NoParallelFrame unless the frame is non-empty and parallel on a coarse grid.
pub fn check_parallel_frame(imm: &ParametricImmersion, frame: &[VecFn]) -> Result<()> {
    if frame.is_empty() {
        return Err(Error::NoParallelFrame("no parallel normal fields supplied".into()));
    }
    let grid = precondition_grid(imm)?;
    for e in frame {
        let (tang, dperp) = NormalField::parallel(e.clone()).verify(imm, &grid)?;
        if tang > 1e-8 || dperp > 1e-6 {
            return Err(Error::NoParallelFrame(format!("frame field not parallel: |e⊤| = {tang:.1e}, |D⊥e| = {dperp:.1e}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PmcSuite {
    pub v_tilde: f64,
    pub first: f64,
    pub first_fd: f64,
    /// Only when H is parallel and equal to ξ.
    pub second: Option<f64>,
    pub second_fd: Option<f64>,
}

/// Ṽ_ξ with its first variation, and the second variation when H ≡ ξ is parallel.
pub fn pmc_functional_suite(
    imm: &ParametricImmersion,
    xi: &XiData,
    fam: &VariationFamily,
    grid: &QuadratureGrid,
) -> Result<PmcSuite> {
    let v_tilde = pmc_volume(imm, xi, grid)?;
    let first = first_variation(imm, xi, fam, grid)?.v_tilde;
    let first_fd = first_variation_fd(imm, xi, fam, grid, FD_STEP)?[2];
    let (second, second_fd) = if fam.normal && fam.is_sn() && mean_curvature_matches(imm, xi)? {
        let q = pmc_second_variation(imm, &fam.field.values, grid)?;
        (Some(q), Some(second_variation_fd(imm, xi, fam, grid, FD_STEP)?[2]))
    } else {
        (None, None)
    };
    Ok(PmcSuite { v_tilde, first, first_fd, second, second_fd })
}

/// H ≡ ξ and D⊥H ≡ 0 on a coarse grid.
pub fn mean_curvature_matches(imm: &ParametricImmersion, xi: &XiData) -> Result<bool> {
    let grid = precondition_grid(imm)?;
    let imm_c = imm.clone();
    let h = move |u: &[f64]| match GeometryJet::at_unchecked(&imm_c, u) {
        Ok(j) => j.mean_curvature,
        Err(_) => DVector::from_element(imm_c.ambient_dim(), f64::NAN),
    };
    for u in &grid.nodes {
        let jet = GeometryJet::at(imm, u)?;
        if (&jet.mean_curvature - xi.at(u)).norm() > 1e-8 {
            return Ok(false);
        }
        for i in 0..imm.dim() {
            let d = fd::partial(&h, u, i, imm.policy().first);
            if jet.normal_part(&d).norm() > 1e-6 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Grid of the item's rules over the support of η.
pub fn family_grid(item: &CatalogImmersion, fam: &VariationFamily) -> Result<QuadratureGrid> {
    let (lo, hi) = fam.support_box(&item.immersion);
    item.quadrature_on(&lo, &hi)
}

/// Rejects a base that is not a ξ-submanifold.
pub fn require_xi_submanifold(imm: &ParametricImmersion) -> Result<()> {
    ensure_xi_submanifold(imm, &precondition_grid(imm)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_sphere};
    use crate::fields::random_compact_normal_field;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn xi_of(item: &CatalogImmersion) -> XiData {
        XiData::new(item.xi.clone())
    }

    #[test]
    fn closed_form_volumes() {
        let p = make_plane(2, 1, &[0.0; 3]).unwrap();
        let (v, vb) = weighted_volume(&p.immersion, &xi_of(&p), &p.quadrature_grid().unwrap()).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-10);
        assert_eq!(v, vb);
        let c = make_sphere(1, 1.0, 1).unwrap();
        let (v, _) = weighted_volume(&c.immersion, &xi_of(&c), &c.quadrature_grid().unwrap()).unwrap();
        assert!((v - 2.0 * PI * (-0.5f64).exp()).abs() < 1e-12);
        // S²(r): ω₂ r² e^{−m²/2r²}
        let r = 1.3;
        let s = make_sphere(2, r, 1).unwrap();
        let rv = refined_volumes(&s).unwrap();
        let want = 4.0 * PI * r * r * (-4.0 / (2.0 * r * r)).exp();
        assert!(rv.converged);
        assert!((rv.volumes.v_xi - want).abs() < 1e-10 * want);
        // constant |ξ|²: V̄ = e^{½|ξ|²}V
        let xi2 = (1.0 - 2.0 / (r * r)).powi(2) * r * r;
        assert!((rv.volumes.v_bar - (0.5 * xi2).exp() * rv.volumes.v_xi).abs() < 1e-10 * rv.volumes.v_bar);
    }

    #[test]
    fn first_variation_examples() {
        // S²(1) with ξ = 0: H + x⊥ = −x, so −∫⟨H + x⊥, x⟩e^{−f} = V
        let s = make_sphere(2, 1.0, 1).unwrap();
        let zero = XiData::zero(3);
        let fam = VariationFamily::normal(NormalField::new(s.immersion.position_fn()));
        let grid = s.quadrature_grid().unwrap();
        let fv = first_variation(&s.immersion, &zero, &fam, &grid).unwrap();
        let (v, _) = weighted_volume(&s.immersion, &zero, &grid).unwrap();
        assert!((fv.v - v).abs() < 1e-10 * v);
        let fd = first_variation_fd(&s.immersion, &zero, &fam, &grid, FD_STEP).unwrap();
        assert!((fd[0] - fv.v).abs() < 1e-6 * v);
        // zero field: exactly 0
        let z = VariationFamily::normal(NormalField::zero(3));
        assert_eq!(first_variation_fd(&s.immersion, &zero, &z, &grid, FD_STEP).unwrap()[0], 0.0);
    }

    #[test]
    fn critical_on_own_xi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for item in [make_sphere(2, 1.4, 1).unwrap(), make_plane(2, 1, &[0.0, 0.0, 0.8]).unwrap()] {
            let xi = xi_of(&item);
            for _ in 0..2 {
                let fam = VariationFamily::normal(random_compact_normal_field(&item.immersion, &mut rng));
                let grid = family_grid(&item, &fam).unwrap();
                let fv = first_variation(&item.immersion, &xi, &fam, &grid).unwrap();
                let fd = first_variation_fd(&item.immersion, &xi, &fam, &grid, FD_STEP).unwrap();
                assert!(fv.v.abs() < 1e-10 && fv.v_bar.abs() < 1e-10);
                assert!(fd[0].abs() < 1e-6, "{}", fd[0]);
            }
        }
    }

    #[test]
    fn tangential_variation_of_sphere() {
        // constant |ξ|²: a tangential field does not change V_ξ to first order
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = make_sphere(2, 1.6, 1).unwrap();
        let xi = xi_of(&s);
        let win = crate::fields::random_window(s.immersion.chart(), &mut rng);
        let imm = s.immersion.clone();
        let w = win.clone();
        let tang: VecFn = Arc::new(move |u: &[f64]| {
            let j = imm.jacobian(u);
            (j.column(0) * 0.7 + j.column(1) * 0.2) * w.eval(u)
        });
        let fam = VariationFamily::general(NormalField { values: tang, support: Some(win), parallel: false });
        let grid = family_grid(&s, &fam).unwrap();
        let fv = first_variation(&s.immersion, &xi, &fam, &grid).unwrap();
        let fd = first_variation_fd(&s.immersion, &xi, &fam, &grid, FD_STEP).unwrap();
        assert!(fv.v.abs() < 1e-10 && fd[0].abs() < 1e-6, "{} {}", fv.v, fd[0]);
    }

    #[test]
    fn profile_flags() {
        assert!(TimeProfile::Linear.is_sn());
        assert!(!TimeProfile::Quadratic { accel: 1.0 }.is_sn());
        assert_eq!(TimeProfile::Quadratic { accel: 2.0 }.psi(0.5), 0.75);
    }
}
