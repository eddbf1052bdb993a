//! Chart-based parametric immersions u ∈ D ⊂ ℝ^m → ℝ^{m+p}.

use crate::error::{Error, Result};
use crate::fd::{self, DiffPolicy};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

pub type VecFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// Second derivatives as a row-major `m*m` list of ambient vectors.
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync>;

/// Axis-aligned chart box with per-axis periodicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl ChartBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != periodic.len() || lower.is_empty() {
            return Err(Error::InvalidParameter("chart box dimensions disagree".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidParameter("chart box has an empty axis".into()));
        }
        Ok(Self { lower, upper, periodic })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter().enumerate().all(|(i, &v)| {
                if self.periodic[i] {
                    v.is_finite()
                } else {
                    let slack = 1e-12 * (1.0 + (self.upper[i] - self.lower[i]).abs());
                    v >= self.lower[i] - slack && v <= self.upper[i] + slack
                }
            })
    }

    /// Shrinks one axis by `width` at both ends (polar collars).
    pub fn collared(&self, axis: usize, width: f64) -> Self {
        let mut b = self.clone();
        b.lower[axis] += width;
        b.upper[axis] -= width;
        b
    }

    pub fn product(&self, other: &ChartBox) -> ChartBox {
        ChartBox {
            lower: [self.lower.clone(), other.lower.clone()].concat(),
            upper: [self.upper.clone(), other.upper.clone()].concat(),
            periodic: [self.periodic.clone(), other.periodic.clone()].concat(),
        }
    }
}

/// Position with first and second partial derivatives at one chart point.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub x: DVector<f64>,
    /// n × m Jacobian.
    pub dx: DMatrix<f64>,
    /// Row-major m × m list of ∂_i∂_j x.
    pub ddx: Vec<DVector<f64>>,
}

#[derive(Clone)]
pub struct ParametricImmersion {
    dim: usize,
    ambient: usize,
    chart: ChartBox,
    position: VecFn,
    jacobian: Option<JacobianFn>,
    hessian: Option<HessianFn>,
    policy: DiffPolicy,
    /// Characteristic length used by the rank tolerance.
    scale: f64,
}

impl std::fmt::Debug for ParametricImmersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricImmersion")
            .field("dim", &self.dim)
            .field("ambient", &self.ambient)
            .field("chart", &self.chart)
            .field("exact_jacobian", &self.jacobian.is_some())
            .field("exact_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl ParametricImmersion {
    pub fn new(dim: usize, ambient: usize, chart: ChartBox, position: VecFn) -> Result<Self> {
        if dim == 0 || ambient < dim {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= m <= m+p, got m={dim}, m+p={ambient}"
            )));
        }
        if chart.dim() != dim {
            return Err(Error::InvalidParameter("chart dimension differs from m".into()));
        }
        Ok(Self {
            dim,
            ambient,
            chart,
            position,
            jacobian: None,
            hessian: None,
            policy: DiffPolicy::default(),
            scale: 1.0,
        })
    }

    pub fn with_jacobian(mut self, j: JacobianFn) -> Self {
        self.jacobian = Some(j);
        self
    }

    pub fn with_hessian(mut self, h: HessianFn) -> Self {
        self.hessian = Some(h);
        self
    }

    pub fn with_policy(mut self, policy: DiffPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Drops exact derivative callbacks, forcing finite-difference jets.
    pub fn numerically_differentiated(&self) -> Self {
        let mut s = self.clone();
        s.jacobian = None;
        s.hessian = None;
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim
    }

    pub fn chart(&self) -> &ChartBox {
        &self.chart
    }

    pub fn policy(&self) -> DiffPolicy {
        self.policy
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn has_exact_jets(&self) -> bool {
        self.jacobian.is_some() && self.hessian.is_some()
    }

    pub fn position(&self, u: &[f64]) -> DVector<f64> {
        (self.position)(u)
    }

    pub fn position_fn(&self) -> VecFn {
        self.position.clone()
    }

    /// Threshold on det g. Polar Gauss nodes of S³ charts reach det g ~ 1e−13 r⁶,
    /// so only round-off-level determinants count as rank loss.
    pub fn rank_tolerance(&self) -> f64 {
        1e-24 * self.scale.powi(2 * self.dim as i32)
    }

    pub fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        match &self.jacobian {
            Some(j) => j(u),
            None => {
                let cols = fd::gradient(self.position.as_ref(), u, self.policy.first);
                DMatrix::from_columns(&cols)
            }
        }
    }

    /// Jet without the domain check; finite-difference stencils evaluate
    /// slightly outside the chart box.
    pub fn jet_unchecked(&self, u: &[f64]) -> Jet2 {
        let x = self.position(u);
        let dx = self.jacobian(u);
        let ddx = match &self.hessian {
            Some(h) => h(u),
            None => match &self.jacobian {
                // differentiate the exact Jacobian once rather than x twice
                Some(j) => {
                    let m = self.dim;
                    let n = self.ambient;
                    let cols = |v: &[f64]| {
                        let jm = j(v);
                        DVector::from_iterator(n * m, jm.iter().copied())
                    };
                    let d = fd::gradient(&cols, u, self.policy.first);
                    let mut out = vec![DVector::zeros(n); m * m];
                    for i in 0..m {
                        for k in 0..m {
                            // column k of ∂_i J is ∂_i∂_k x
                            let v = d[i].rows(k * n, n).into_owned();
                            out[i * m + k] = v;
                        }
                    }
                    out
                }
                None => fd::hessian(self.position.as_ref(), u, self.policy.second, &x),
            },
        };
        Jet2 { x, dx, ddx }
    }

    pub fn jet(&self, u: &[f64]) -> Result<Jet2> {
        if !self.chart.contains(u) {
            return Err(Error::OutOfDomain { u: u.to_vec() });
        }
        Ok(self.jet_unchecked(u))
    }

    /// Ambient isometry x ↦ R x + t applied to the immersion.
    pub fn transformed(&self, rotation: DMatrix<f64>, shift: DVector<f64>) -> Self {
        let pos = self.position.clone();
        let r1 = rotation.clone();
        let t = shift.clone();
        let mut out = Self {
            position: Arc::new(move |u: &[f64]| &r1 * pos(u) + &t),
            jacobian: None,
            hessian: None,
            ..self.clone()
        };
        if let Some(j) = &self.jacobian {
            let j = j.clone();
            let r2 = rotation.clone();
            out.jacobian = Some(Arc::new(move |u: &[f64]| &r2 * j(u)));
        }
        if let Some(h) = &self.hessian {
            let h = h.clone();
            let r3 = rotation;
            out.hessian = Some(Arc::new(move |u: &[f64]| h(u).into_iter().map(|v| &r3 * v).collect()));
        }
        out
    }

    /// Cartesian product x₁ × x₂ into ℝ^{n₁+n₂}.
    pub fn product(a: &Self, b: &Self) -> Self {
        let (ma, mb) = (a.dim, b.dim);
        let (na, nb) = (a.ambient, b.ambient);
        let m = ma + mb;
        let n = na + nb;
        let pa = a.position.clone();
        let pb = b.position.clone();
        let position: VecFn = Arc::new(move |u: &[f64]| {
            let xa = pa(&u[..ma]);
            let xb = pb(&u[ma..]);
            DVector::from_iterator(n, xa.iter().chain(xb.iter()).copied())
        });
        let (aa, bb) = (a.clone(), b.clone());
        let jacobian: JacobianFn = Arc::new(move |u: &[f64]| {
            let ja = aa.jacobian(&u[..ma]);
            let jb = bb.jacobian(&u[ma..]);
            let mut j = DMatrix::zeros(n, m);
            j.view_mut((0, 0), (na, ma)).copy_from(&ja);
            j.view_mut((na, ma), (nb, mb)).copy_from(&jb);
            j
        });
        let (aa, bb) = (a.clone(), b.clone());
        let hessian: HessianFn = Arc::new(move |u: &[f64]| {
            let ha = aa.jet_unchecked(&u[..ma]).ddx;
            let hb = bb.jet_unchecked(&u[ma..]).ddx;
            let mut out = vec![DVector::zeros(n); m * m];
            for i in 0..ma {
                for j in 0..ma {
                    out[i * m + j].rows_mut(0, na).copy_from(&ha[i * ma + j]);
                }
            }
            for i in 0..mb {
                for j in 0..mb {
                    out[(ma + i) * m + ma + j].rows_mut(na, nb).copy_from(&hb[i * mb + j]);
                }
            }
            out
        });
        Self {
            dim: m,
            ambient: n,
            chart: a.chart.product(&b.chart),
            position,
            jacobian: Some(jacobian),
            hessian: Some(hessian),
            policy: a.policy,
            scale: a.scale.max(b.scale),
        }
    }

    /// Largest mismatch of x between the two ends of each periodic axis.
    pub fn periodicity_gap(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let m = self.dim;
        for axis in 0..m {
            if !self.chart.periodic[axis] {
                continue;
            }
            for k in 0..samples.max(1) {
                let u0: Vec<f64> = (0..m)
                    .map(|i| {
                        let t = (k as f64 + 0.5) / samples.max(1) as f64;
                        self.chart.lower[i] + t * (self.chart.upper[i] - self.chart.lower[i])
                    })
                    .collect();
                let mut lo = u0.clone();
                let mut hi = u0;
                lo[axis] = self.chart.lower[axis];
                hi[axis] = self.chart.upper[axis];
                worst = worst.max((self.position(&lo) - self.position(&hi)).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64) -> ParametricImmersion {
        let chart = ChartBox::new(vec![0.0], vec![2.0 * std::f64::consts::PI], vec![true]).unwrap();
        ParametricImmersion::new(
            1,
            2,
            chart,
            Arc::new(move |u: &[f64]| DVector::from_vec(vec![r * u[0].cos(), r * u[0].sin()])),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_dimensions() {
        let chart = ChartBox::new(vec![0.0], vec![1.0], vec![false]).unwrap();
        let p: VecFn = Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0]]));
        assert!(ParametricImmersion::new(2, 1, chart, p).is_err());
        assert!(ChartBox::new(vec![1.0], vec![0.0], vec![false]).is_err());
    }

    #[test]
    fn out_of_domain_is_reported() {
        let chart = ChartBox::new(vec![0.0], vec![1.0], vec![false]).unwrap();
        let p: VecFn = Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0], 0.0]));
        let imm = ParametricImmersion::new(1, 2, chart, p).unwrap();
        assert!(matches!(imm.jet(&[1.5]), Err(Error::OutOfDomain { .. })));
        assert!(imm.jet(&[0.5]).is_ok());
    }

    #[test]
    fn periodic_endpoints_match() {
        assert!(circle(2.0).periodicity_gap(4) < 1e-12);
    }

    #[test]
    fn fd_jet_second_derivative() {
        let c = circle(1.5);
        let j = c.jet(&[0.3]).unwrap();
        let exact = DVector::from_vec(vec![-1.5 * 0.3f64.cos(), -1.5 * 0.3f64.sin()]);
        assert!((&j.ddx[0] - exact).norm() < 1e-9);
    }
}
