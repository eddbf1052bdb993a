//! The ξ-equation H + x⊥ = ξ, its Gaussian-space reformulation, and the
//! grid-level certificates built on them.

use crate::error::Result;
use crate::fd::{self, DiffPolicy};
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, VecFn};
use crate::quadrature::QuadratureGrid;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// The soliton field with its weights and Weingarten map.
#[derive(Clone)]
pub struct XiData {
    pub xi: VecFn,
}

impl XiData {
    pub fn new(xi: VecFn) -> Self {
        Self { xi }
    }

    /// ξ = H + x⊥ read off the immersion itself.
    pub fn from_immersion(imm: &ParametricImmersion) -> Self {
        Self { xi: xi_field(imm) }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { xi: Arc::new(move |_: &[f64]| DVector::zeros(ambient)) }
    }

    pub fn at(&self, u: &[f64]) -> DVector<f64> {
        (self.xi)(u)
    }

    /// f = ½|x − ξ|².
    pub fn f(&self, x: &DVector<f64>, xi: &DVector<f64>) -> f64 {
        0.5 * (x - xi).norm_squared()
    }

    /// f̄ = f − ½|ξ|².
    pub fn f_bar(&self, x: &DVector<f64>, xi: &DVector<f64>) -> f64 {
        self.f(x, xi) - 0.5 * xi.norm_squared()
    }

    pub fn weingarten(&self, jet: &GeometryJet, xi: &DVector<f64>) -> DMatrix<f64> {
        jet.shape_operator(xi)
    }

    /// Chart coordinates of the drift x⊤ + A_ξ(x⊤).
    pub fn drift_coords(&self, jet: &GeometryJet, xi: &DVector<f64>) -> DVector<f64> {
        let w = jet.tangent_coords(&jet.x_tan);
        let a = self.weingarten(jet, xi);
        &w + a * &w
    }

    pub fn drift(&self, jet: &GeometryJet, xi: &DVector<f64>) -> DVector<f64> {
        jet.push_forward(&self.drift_coords(jet, xi))
    }
}

/// H + x⊥ at a jet.
pub fn xi_vector(jet: &GeometryJet) -> DVector<f64> {
    &jet.mean_curvature + &jet.x_nor
}

/// u ↦ H(u) + x⊥(u) as a field.
pub fn xi_field(imm: &ParametricImmersion) -> VecFn {
    let imm = imm.clone();
    Arc::new(move |u: &[f64]| match GeometryJet::at_unchecked(&imm, u) {
        Ok(j) => xi_vector(&j),
        Err(_) => DVector::from_element(imm.ambient_dim(), f64::NAN),
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct XiResidual {
    /// sup over nodes and coordinate directions of |D⊥_i (H + x⊥)|.
    pub residual: f64,
    /// sup |(H + x⊥)⊤|, a sanity channel.
    pub tangential: f64,
}

/// Certifies the ξ-equation on a grid.
pub fn xi_residual(imm: &ParametricImmersion, grid: &QuadratureGrid) -> Result<XiResidual> {
    let field = xi_field(imm);
    let policy = imm.policy();
    let per_node: Vec<Result<(f64, f64)>> = grid
        .nodes
        .par_iter()
        .map(|u| {
            let jet = GeometryJet::at(imm, u)?;
            let v = xi_vector(&jet);
            let mut r: f64 = 0.0;
            for i in 0..jet.dim() {
                let d = fd::partial(field.as_ref(), u, i, policy.first);
                r = r.max(jet.normal_part(&d).norm());
            }
            Ok((r, jet.tangent_part(&v).norm()))
        })
        .collect();
    let mut out = XiResidual { residual: 0.0, tangential: 0.0 };
    for res in per_node {
        let (r, t) = res?;
        out.residual = out.residual.max(r);
        out.tangential = out.tangential.max(t);
    }
    Ok(out)
}

/// Levi-Civita shift of the conformal metric e^{−|x|²/m}⟨·,·⟩:
/// D̄_{e_B} e_A − D_{e_B} e_A = (1/m)(⟨e_A,e_B⟩x − ⟨x,e_A⟩e_B − ⟨x,e_B⟩e_A).
pub fn conformal_shift(x: &DVector<f64>, m: f64, ea: &DVector<f64>, eb: &DVector<f64>) -> DVector<f64> {
    (x * ea.dot(eb) - eb * x.dot(ea) - ea * x.dot(eb)) / m
}

/// Connection of an arbitrary ambient metric applied to constant fields,
/// from the Koszul formula with finite-difference metric derivatives.
pub fn koszul_connection<G>(metric: &G, x: &DVector<f64>, ea: &DVector<f64>, eb: &DVector<f64>) -> DVector<f64>
where
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    let flat = |v: &[f64]| {
        let g = metric(v);
        DVector::from_iterator(n * n, g.iter().copied())
    };
    let step = DiffPolicy::default().first;
    let dg: Vec<DMatrix<f64>> = fd::gradient(&flat, x.as_slice(), step)
        .into_iter()
        .map(|d| DMatrix::from_column_slice(n, n, d.as_slice()))
        .collect();
    let ginv = metric(x.as_slice()).try_inverse().expect("metric must be invertible");
    // lowered Γ_{D,ab} = ½(∂_a g_{bD} + ∂_b g_{aD} − ∂_D g_{ab})
    let mut lowered = DVector::zeros(n);
    for d in 0..n {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                let c = ea[a] * eb[b];
                if c == 0.0 {
                    continue;
                }
                s += 0.5 * c * (dg[b][(a, d)] + dg[a][(b, d)] - dg[d][(a, b)]);
            }
        }
        lowered[d] = s;
    }
    ginv * lowered
}

/// Max defect between the closed-form shift and the Koszul evaluation over
/// all pairs of ambient basis vectors at x(u), using the immersion's m.
pub fn conformal_connection_check(imm: &ParametricImmersion, u: &[f64]) -> Result<f64> {
    let jet = GeometryJet::at(imm, u)?;
    let x = jet.x.clone();
    Ok(conformal_connection_defect(&x, imm.dim() as f64))
}

pub fn conformal_connection_defect(x: &DVector<f64>, m: f64) -> f64 {
    let n = x.len();
    let metric = move |v: &[f64]| {
        let r2: f64 = v.iter().map(|t| t * t).sum();
        DMatrix::identity(n, n) * (-r2 / m).exp()
    };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut ea = DVector::zeros(n);
            ea[a] = 1.0;
            let mut eb = DVector::zeros(n);
            eb[b] = 1.0;
            let k = koszul_connection(&metric, x, &ea, &eb);
            worst = worst.max((k - conformal_shift(x, m, &ea, &eb)).norm());
        }
    }
    worst
}

/// Second fundamental form and mean curvature in the Gaussian space.
#[derive(Debug, Clone)]
pub struct GaussianJet {
    pub h_bar: Vec<DVector<f64>>,
    pub mean_bar: DVector<f64>,
    /// H̃ = e^{−|x|²/2m} H̄.
    pub modified_mean: DVector<f64>,
}

/// h̄_ij = (D̄_{∂_j} ∂_i x)⊥ through the conformal shift, H̄ = ḡ^{ij} h̄_ij.
pub fn gaussian_geometry(jet: &GeometryJet) -> GaussianJet {
    let m = jet.dim();
    let mf = m as f64;
    let x = &jet.x;
    let mut h_bar = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let xi = jet.tangent.column(i).into_owned();
            let xj = jet.tangent.column(j).into_owned();
            let shifted = &jet.second[i * m + j] + conformal_shift(x, mf, &xi, &xj);
            h_bar.push(jet.normal_part(&shifted));
        }
    }
    let r2 = x.norm_squared();
    let conf = (-r2 / mf).exp();
    let gbar_inv = &jet.metric_inv / conf;
    let mut mean_bar = DVector::zeros(jet.ambient_dim());
    for i in 0..m {
        for j in 0..m {
            mean_bar += &h_bar[i * m + j] * gbar_inv[(i, j)];
        }
    }
    let modified_mean = &mean_bar * (-r2 / (2.0 * mf)).exp();
    GaussianJet { h_bar, mean_bar, modified_mean }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ParallelismCheck {
    /// sup e^{−|x|²/2m} |D̄⊥H̃ − e^{|x|²/2m} D⊥(H + x⊥)|.
    pub discrepancy: f64,
    pub sup_lhs: f64,
    pub sup_rhs: f64,
    /// sup |D̄⊥H̃| without normalization.
    pub sup_gaussian: f64,
    pub sup_radius_sq: f64,
}

/// Evaluates both sides of D̄⊥_i H̃ = e^{|x|²/2m} D⊥_i(H + x⊥) on the grid.
/// The gap is normalized by e^{|x|²/2m} so that it is comparable across points.
pub fn modified_mcv_parallelism_check(imm: &ParametricImmersion, grid: &QuadratureGrid) -> Result<ParallelismCheck> {
    let m = imm.dim() as f64;
    let n = imm.ambient_dim();
    let imm_c = imm.clone();
    let h_tilde = move |u: &[f64]| match GeometryJet::at_unchecked(&imm_c, u) {
        Ok(j) => gaussian_geometry(&j).modified_mean,
        Err(_) => DVector::from_element(n, f64::NAN),
    };
    let xi = xi_field(imm);
    let policy = imm.policy();
    let rows: Vec<Result<[f64; 5]>> = grid
        .nodes
        .par_iter()
        .map(|u| {
            let jet = GeometryJet::at(imm, u)?;
            let ht = gaussian_geometry(&jet).modified_mean;
            let r2 = jet.x.norm_squared();
            let factor = (r2 / (2.0 * m)).exp();
            let mut row = [0.0, 0.0, 0.0, 0.0, r2];
            for i in 0..jet.dim() {
                let xi_col = jet.tangent.column(i).into_owned();
                let d_ht = fd::partial(&h_tilde, u, i, policy.first);
                let amb = d_ht - &ht * (jet.x.dot(&xi_col) / m) - &xi_col * (jet.x.dot(&ht) / m)
                    + &jet.x * (xi_col.dot(&ht) / m);
                let lhs = jet.normal_part(&amb);
                let rhs = jet.normal_part(&fd::partial(xi.as_ref(), u, i, policy.first)) * factor;
                row[0] = row[0].max((&lhs - &rhs).norm() / factor);
                row[1] = row[1].max(lhs.norm() / factor);
                row[2] = row[2].max(rhs.norm() / factor);
                row[3] = row[3].max(lhs.norm());
            }
            Ok(row)
        })
        .collect();
    let mut out = ParallelismCheck { discrepancy: 0.0, sup_lhs: 0.0, sup_rhs: 0.0, sup_gaussian: 0.0, sup_radius_sq: 0.0 };
    for r in rows {
        let r = r?;
        out.discrepancy = out.discrepancy.max(r[0]);
        out.sup_lhs = out.sup_lhs.max(r[1]);
        out.sup_rhs = out.sup_rhs.max(r[2]);
        out.sup_gaussian = out.sup_gaussian.max(r[3]);
        out.sup_radius_sq = out.sup_radius_sq.max(r[4]);
    }
    Ok(out)
}
