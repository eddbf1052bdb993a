//! Pointwise differential geometry of a parametric immersion: metric,
//! Christoffel symbols, second fundamental form, projections, and the
//! connection/Laplacian operators on scalar and normal fields.

use crate::error::{Error, Result};
use crate::fd::{self, FieldJet};
use crate::immersion::{Jet2, ParametricImmersion};
use nalgebra::{DMatrix, DVector};

/// Tolerance for "is this vector normal" checks, relative to 1 + |v|.
pub const NORMAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GeometryJet {
    pub u: Vec<f64>,
    pub x: DVector<f64>,
    /// n × m, columns ∂x/∂u^i.
    pub tangent: DMatrix<f64>,
    /// Row-major m × m list of ∂_i∂_j x.
    pub second: Vec<DVector<f64>>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub volume_density: f64,
    /// Γ^k_ij stored at `k*m*m + i*m + j`.
    pub christoffel: Vec<f64>,
    pub normal_projector: DMatrix<f64>,
    /// h_ij, normal-valued, row-major.
    pub sff: Vec<DVector<f64>>,
    pub mean_curvature: DVector<f64>,
    pub x_tan: DVector<f64>,
    pub x_nor: DVector<f64>,
}

impl GeometryJet {
    pub fn at(imm: &ParametricImmersion, u: &[f64]) -> Result<Self> {
        let jet = imm.jet(u)?;
        Self::from_jet(imm, u, jet)
    }

    /// As [`GeometryJet::at`] without the chart-box check.
    pub fn at_unchecked(imm: &ParametricImmersion, u: &[f64]) -> Result<Self> {
        let jet = imm.jet_unchecked(u);
        Self::from_jet(imm, u, jet)
    }

    pub fn from_jet(imm: &ParametricImmersion, u: &[f64], jet: Jet2) -> Result<Self> {
        let m = imm.dim();
        let n = imm.ambient_dim();
        let Jet2 { x, dx, ddx } = jet;
        let metric = dx.transpose() * &dx;
        let det = metric.determinant();
        if !(det > imm.rank_tolerance()) {
            return Err(Error::DegenerateMetric { u: u.to_vec(), det });
        }
        let metric_inv = metric
            .clone()
            .cholesky()
            .ok_or(Error::DegenerateMetric { u: u.to_vec(), det })?
            .inverse();
        let q = dx.clone().col_piv_qr().q();
        let tangential = &q * q.transpose();
        let normal_projector = DMatrix::identity(n, n) - tangential;

        let mut christoffel = vec![0.0; m * m * m];
        for i in 0..m {
            for j in 0..m {
                let lowered: Vec<f64> = (0..m).map(|l| ddx[i * m + j].dot(&dx.column(l))).collect();
                for k in 0..m {
                    christoffel[k * m * m + i * m + j] =
                        (0..m).map(|l| metric_inv[(k, l)] * lowered[l]).sum();
                }
            }
        }
        let sff: Vec<DVector<f64>> = ddx.iter().map(|v| &normal_projector * v).collect();
        let mut mean_curvature = DVector::zeros(n);
        for i in 0..m {
            for j in 0..m {
                mean_curvature += &sff[i * m + j] * metric_inv[(i, j)];
            }
        }
        let x_nor = &normal_projector * &x;
        let x_tan = &x - &x_nor;
        Ok(Self {
            u: u.to_vec(),
            x,
            tangent: dx,
            second: ddx,
            metric,
            metric_inv,
            volume_density: det.sqrt(),
            christoffel,
            normal_projector,
            sff,
            mean_curvature,
            x_tan,
            x_nor,
        })
    }

    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.tangent.nrows()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        let m = self.dim();
        self.christoffel[k * m * m + i * m + j]
    }

    pub fn h(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.sff[i * self.dim() + j]
    }

    pub fn tangential_projector(&self) -> DMatrix<f64> {
        DMatrix::identity(self.ambient_dim(), self.ambient_dim()) - &self.normal_projector
    }

    pub fn normal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.normal_projector * v
    }

    pub fn tangent_part(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.normal_part(v)
    }

    /// Chart coordinates of the tangential part of `v`: g⁻¹ ∂xᵀ v.
    pub fn tangent_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.metric_inv * (self.tangent.transpose() * v)
    }

    /// Pushes chart coordinates forward: ∂x · w.
    pub fn push_forward(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.tangent * w
    }

    /// Coordinate gradient g⁻¹ dφ of a scalar with partials `dphi`.
    pub fn gradient_coords(&self, dphi: &[f64]) -> DVector<f64> {
        &self.metric_inv * DVector::from_column_slice(dphi)
    }

    /// h(a, b) for chart-coordinate vectors a, b.
    pub fn sff_apply(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let mut out = DVector::zeros(self.ambient_dim());
        for i in 0..m {
            for j in 0..m {
                out += self.h(i, j) * (a[i] * b[j]);
            }
        }
        out
    }

    /// Shape operator A_N with (A_N)^k_i = g^{kj}⟨h_ij, N⟩, without the normality check.
    pub fn shape_operator(&self, n: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        let lowered = DMatrix::from_fn(m, m, |j, i| self.h(i, j).dot(n));
        &self.metric_inv * lowered
    }

    /// Σ g^{ik} g^{jl} ⟨h_ij, η⟩ h_kl.
    pub fn sff_contract(&self, eta: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let lowered = DMatrix::from_fn(m, m, |i, j| self.h(i, j).dot(eta));
        let raised = &self.metric_inv * lowered * &self.metric_inv;
        let mut out = DVector::zeros(self.ambient_dim());
        for k in 0..m {
            for l in 0..m {
                out += self.h(k, l) * raised[(k, l)];
            }
        }
        out
    }

    /// |A_η|² = Σ g^{ik} g^{jl} ⟨h_ij, η⟩⟨h_kl, η⟩.
    pub fn shape_norm_sq(&self, eta: &DVector<f64>) -> f64 {
        self.sff_contract(eta).dot(eta)
    }

    /// ∂_i of the normal projector, exact in the second derivatives of x.
    pub fn projector_derivative(&self, i: usize) -> DMatrix<f64> {
        let m = self.dim();
        let n = self.ambient_dim();
        let xi = DMatrix::from_fn(n, m, |r, k| self.second[k * m + i][r]);
        let dg = xi.transpose() * &self.tangent + self.tangent.transpose() * &xi;
        let a = &xi * &self.metric_inv * self.tangent.transpose();
        let d_tan = &a + a.transpose()
            - &self.tangent * &self.metric_inv * dg * &self.metric_inv * self.tangent.transpose();
        -d_tan
    }

    /// D⊥_i η = P⊥ ∂_i η for each coordinate direction.
    pub fn normal_derivatives(&self, d1: &[DVector<f64>]) -> Vec<DVector<f64>> {
        d1.iter().map(|d| &self.normal_projector * d).collect()
    }

    /// Δ⊥η = g^{ij}(D⊥_i D⊥_j η − Γ^k_ij D⊥_k η) from the field's partials.
    pub fn bundle_laplacian(&self, field: &FieldJet) -> DVector<f64> {
        let m = self.dim();
        let dn = self.normal_derivatives(&field.d1);
        let dp: Vec<DMatrix<f64>> = (0..m).map(|i| self.projector_derivative(i)).collect();
        let mut out = DVector::zeros(self.ambient_dim());
        for i in 0..m {
            for j in 0..m {
                let gij = self.metric_inv[(i, j)];
                if gij == 0.0 {
                    continue;
                }
                // D⊥_i D⊥_j η = P⊥[(∂_i P⊥) ∂_j η + P⊥ ∂_i∂_j η]
                let inner = &dp[i] * &field.d1[j] + &self.normal_projector * &field.d2[i * m + j];
                let mut term = &self.normal_projector * inner;
                for (k, dk) in dn.iter().enumerate() {
                    term -= dk * self.gamma(k, i, j);
                }
                out += term * gij;
            }
        }
        out
    }

    /// Δφ = g^{ij}(∂_i∂_j φ − Γ^k_ij ∂_k φ).
    pub fn laplace_beltrami(&self, dphi: &[f64], d2phi: &[f64]) -> f64 {
        let m = self.dim();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                let mut t = d2phi[i * m + j];
                for (k, dk) in dphi.iter().enumerate() {
                    t -= self.gamma(k, i, j) * dk;
                }
                s += self.metric_inv[(i, j)] * t;
            }
        }
        s
    }
}

/// Assembles the geometry jet at `u`, using exact callbacks when present.
pub fn geometry_jet(imm: &ParametricImmersion, u: &[f64]) -> Result<GeometryJet> {
    GeometryJet::at(imm, u)
}

/// Weingarten map A_N, rejecting non-normal N.
pub fn weingarten_map(jet: &GeometryJet, n: &DVector<f64>) -> Result<DMatrix<f64>> {
    let tangential = jet.tangent_part(n).norm();
    if tangential > NORMAL_TOL * (1.0 + n.norm()) {
        return Err(Error::NotNormal { tangential });
    }
    Ok(jet.shape_operator(n))
}

/// D⊥_{∂_i} η at `u`.
pub fn normal_derivative<F>(imm: &ParametricImmersion, field: &F, u: &[f64], i: usize) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    let jet = GeometryJet::at(imm, u)?;
    if i >= jet.dim() {
        return Err(Error::InvalidParameter(format!("direction {i} out of range")));
    }
    let d = fd::partial(field, u, i, imm.policy().first);
    Ok(jet.normal_part(&d))
}

/// Normal-bundle Laplacian Δ⊥η at `u`.
pub fn bundle_laplacian<F>(imm: &ParametricImmersion, field: &F, u: &[f64]) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    let jet = GeometryJet::at(imm, u)?;
    let fj = FieldJet::of(field, u, imm.policy());
    Ok(jet.bundle_laplacian(&fj))
}

/// Laplace–Beltrami Δφ at `u`.
pub fn laplace_beltrami<F>(imm: &ParametricImmersion, phi: &F, u: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let jet = GeometryJet::at(imm, u)?;
    let p = imm.policy();
    let d1 = fd::scalar_gradient(phi, u, p.first);
    let d2 = fd::scalar_hessian(phi, u, p.second);
    Ok(jet.laplace_beltrami(&d1, &d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{ChartBox, VecFn};
    use std::sync::Arc;

    /// Graph (u, u²) with no derivative callbacks: the FD path.
    fn parabola() -> ParametricImmersion {
        let chart = ChartBox::new(vec![-1.0], vec![1.0], vec![false]).unwrap();
        let p: VecFn = Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0], u[0] * u[0]]));
        ParametricImmersion::new(1, 2, chart, p).unwrap()
    }

    fn flat_plane() -> ParametricImmersion {
        let chart = ChartBox::new(vec![-2.0, -2.0], vec![2.0, 2.0], vec![false, false]).unwrap();
        let p: VecFn = Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0], u[1], 0.0]));
        ParametricImmersion::new(2, 3, chart, p).unwrap()
    }

    #[test]
    fn parabola_matches_symbolic_oracle() {
        let imm = parabola();
        for &u in &[-0.8, -0.25, 0.0, 0.4, 0.9] {
            let jet = geometry_jet(&imm, &[u]).unwrap();
            // symbolic: n = (-2u, 1)/√(1+4u²), h = 2/√(1+4u²) n, H = h/(1+4u²)
            let s = (1.0 + 4.0 * u * u).sqrt();
            let nrm = DVector::from_vec(vec![-2.0 * u / s, 1.0 / s]);
            let h = &nrm * (2.0 / s);
            let hm = &h / (s * s);
            assert!((jet.h(0, 0) - &h).norm() < 1e-8, "u={u}");
            assert!((&jet.mean_curvature - &hm).norm() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn plane_is_totally_geodesic() {
        let imm = flat_plane();
        let jet = geometry_jet(&imm, &[0.3, -1.1]).unwrap();
        assert!(jet.sff.iter().all(|h| h.norm() < 1e-12));
        assert!(jet.mean_curvature.norm() < 1e-12);
        let w = weingarten_map(&jet, &DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap();
        assert!(w.norm() < 1e-12);
    }

    #[test]
    fn weingarten_rejects_tangent_vector() {
        let imm = flat_plane();
        let jet = geometry_jet(&imm, &[0.0, 0.0]).unwrap();
        let r = weingarten_map(&jet, &DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert!(matches!(r, Err(Error::NotNormal { .. })));
        let z = weingarten_map(&jet, &DVector::zeros(3)).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn projector_identities() {
        let imm = parabola();
        let jet = geometry_jet(&imm, &[0.37]).unwrap();
        let p = &jet.normal_projector;
        assert!((p * p - p).norm() < 1e-12);
        assert!((p + jet.tangential_projector() - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert_eq!(&jet.x_tan + &jet.x_nor, jet.x);
        let gg = &jet.metric * &jet.metric_inv;
        assert!((gg - DMatrix::identity(1, 1)).norm() < 1e-10);
    }

    #[test]
    fn flat_laplacians() {
        let imm = flat_plane();
        let lin = |u: &[f64]| 2.0 * u[0] - 3.0 * u[1];
        assert!(laplace_beltrami(&imm, &lin, &[0.5, 0.2]).unwrap().abs() < 1e-8);
        let sq = |u: &[f64]| u[0] * u[0] + u[1] * u[1];
        assert!((laplace_beltrami(&imm, &sq, &[0.5, 0.2]).unwrap() - 4.0).abs() < 1e-8);
        let c = |_: &[f64]| DVector::from_vec(vec![0.0, 0.0, 2.0]);
        assert!(normal_derivative(&imm, &c, &[0.1, 0.1], 1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn projector_derivative_matches_fd() {
        let imm = parabola();
        let u = [0.3];
        let jet = geometry_jet(&imm, &u).unwrap();
        let pf = |v: &[f64]| {
            let j = GeometryJet::at_unchecked(&imm, v).unwrap();
            DVector::from_iterator(4, j.normal_projector.iter().copied())
        };
        let d = fd::partial(&pf, &u, 0, 1e-3);
        let exact = jet.projector_derivative(0);
        let ev = DVector::from_iterator(4, exact.iter().copied());
        assert!((d - ev).norm() < 1e-6);
    }
}
