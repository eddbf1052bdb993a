//! Normal and scalar fields on a chart, compact support windows.

use crate::error::Result;
use crate::fd::{self, FieldJet};
use crate::geometry::GeometryJet;
use crate::immersion::{ChartBox, ParametricImmersion, ScalarFn, VecFn};
use crate::quadrature::QuadratureGrid;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::sync::Arc;

/// Exponent of the bump profile; high enough that 4th-order stencils
/// straddling the support edge keep their order.
pub const WINDOW_POWER: i32 = 6;

/// Product of C⁵ bumps (1 − s²)⁶ along the axes where a half-width is set;
/// axes with `None` are left unrestricted.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportWindow {
    pub center: Vec<f64>,
    pub half_width: Vec<Option<f64>>,
}

impl SupportWindow {
    pub fn new(center: Vec<f64>, half_width: Vec<Option<f64>>) -> Self {
        assert_eq!(center.len(), half_width.len());
        Self { center, half_width }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        let mut w = 1.0;
        for (i, hw) in self.half_width.iter().enumerate() {
            if let Some(hw) = hw {
                let s = (u[i] - self.center[i]) / hw;
                if s.abs() >= 1.0 {
                    return 0.0;
                }
                w *= (1.0 - s * s).powi(WINDOW_POWER);
            }
        }
        w
    }

    /// Chart box on which the window is supported, clipped to `[lower, upper]`.
    pub fn support_box(&self, lower: &[f64], upper: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut lo = lower.to_vec();
        let mut hi = upper.to_vec();
        for (i, hw) in self.half_width.iter().enumerate() {
            if let Some(hw) = hw {
                lo[i] = lo[i].max(self.center[i] - hw);
                hi[i] = hi[i].min(self.center[i] + hw);
            }
        }
        (lo, hi)
    }
}

/// A section of the normal bundle given by its values in chart coordinates.
#[derive(Clone)]
pub struct NormalField {
    pub values: VecFn,
    pub support: Option<SupportWindow>,
    /// Claimed D⊥η ≡ 0.
    pub parallel: bool,
}

impl std::fmt::Debug for NormalField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NormalField")
            .field("support", &self.support)
            .field("parallel", &self.parallel)
            .finish()
    }
}

impl NormalField {
    pub fn new(values: VecFn) -> Self {
        Self { values, support: None, parallel: false }
    }

    pub fn parallel(values: VecFn) -> Self {
        Self { values, support: None, parallel: true }
    }

    pub fn eval(&self, u: &[f64]) -> DVector<f64> {
        (self.values)(u)
    }

    pub fn zero(ambient: usize) -> Self {
        Self::parallel(Arc::new(move |_: &[f64]| DVector::zeros(ambient)))
    }

    /// η(u) = w(u) · P⊥(u) c(x(u)) for an ambient vector field c.
    pub fn projected(imm: &ParametricImmersion, ambient: VecFn, window: Option<SupportWindow>) -> Self {
        let imm = imm.clone();
        let win = window.clone();
        let values: VecFn = Arc::new(move |u: &[f64]| {
            let w = win.as_ref().map_or(1.0, |s| s.eval(u));
            let n = imm.ambient_dim();
            if w == 0.0 {
                return DVector::zeros(n);
            }
            match GeometryJet::at_unchecked(&imm, u) {
                Ok(j) => j.normal_part(&ambient(j.x.as_slice())) * w,
                Err(_) => DVector::from_element(n, f64::NAN),
            }
        });
        Self { values, support: window, parallel: false }
    }

    /// φ · η for a scalar φ.
    pub fn scaled(&self, phi: ScalarFn) -> Self {
        let v = self.values.clone();
        Self {
            values: Arc::new(move |u: &[f64]| v(u) * phi(u)),
            support: self.support.clone(),
            parallel: false,
        }
    }

    pub fn windowed(&self, window: SupportWindow) -> Self {
        let v = self.values.clone();
        let w = window.clone();
        Self {
            values: Arc::new(move |u: &[f64]| v(u) * w.eval(u)),
            support: Some(window),
            parallel: false,
        }
    }

    /// Linear combination Σ c_k η_k.
    pub fn combination(fields: &[NormalField], coeffs: &[f64]) -> Self {
        let vs: Vec<VecFn> = fields.iter().map(|f| f.values.clone()).collect();
        let cs = coeffs.to_vec();
        Self::new(Arc::new(move |u: &[f64]| {
            let mut acc = vs[0](u) * cs[0];
            for (v, c) in vs.iter().zip(&cs).skip(1) {
                acc += v(u) * *c;
            }
            acc
        }))
    }

    pub fn jet(&self, u: &[f64], imm: &ParametricImmersion) -> FieldJet {
        FieldJet::of(self.values.as_ref(), u, imm.policy())
    }

    /// (sup |η⊤|, sup |D⊥η|) over the grid nodes.
    pub fn verify(&self, imm: &ParametricImmersion, grid: &QuadratureGrid) -> Result<(f64, f64)> {
        let mut tang: f64 = 0.0;
        let mut dperp: f64 = 0.0;
        for u in &grid.nodes {
            let jet = GeometryJet::at(imm, u)?;
            let fj = FieldJet::first_order(self.values.as_ref(), u, imm.policy());
            tang = tang.max(jet.tangent_part(&fj.value).norm());
            for d in jet.normal_derivatives(&fj.d1) {
                dperp = dperp.max(d.norm());
            }
        }
        Ok((tang, dperp))
    }
}

/// Scalar field with its finite-difference partials.
pub fn scalar_jet(phi: &ScalarFn, u: &[f64], imm: &ParametricImmersion) -> (f64, Vec<f64>, Vec<f64>) {
    let p = imm.policy();
    (
        phi(u),
        fd::scalar_gradient(phi.as_ref(), u, p.first),
        fd::scalar_hessian(phi.as_ref(), u, p.second),
    )
}

/// Random window inside the chart: unrestricted along periodic axes, and
/// near the Gaussian bulk on long axes.
pub fn random_window<R: Rng>(chart: &ChartBox, rng: &mut R) -> SupportWindow {
    let m = chart.dim();
    let mut center = vec![0.0; m];
    let mut half = vec![None; m];
    for i in 0..m {
        let (a, b) = (chart.lower[i], chart.upper[i]);
        if chart.periodic[i] {
            center[i] = 0.5 * (a + b);
            continue;
        }
        let len = b - a;
        if len > 10.0 {
            let w = rng.gen_range(1.5..3.0);
            center[i] = rng.gen_range(-1.5..1.5);
            half[i] = Some(w);
        } else {
            let w = rng.gen_range(0.2..0.45) * len;
            let margin = 0.02 * len;
            center[i] = rng.gen_range(a + w + margin..b - w - margin);
            half[i] = Some(w);
        }
    }
    SupportWindow::new(center, half)
}

fn random_affine<R: Rng>(n: usize, rng: &mut R) -> VecFn {
    let a = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
    Arc::new(move |x: &[f64]| &a + &b * DVector::from_column_slice(x))
}

/// w · P⊥(a + Bx) with a random window and random affine a + Bx.
pub fn random_compact_normal_field<R: Rng>(imm: &ParametricImmersion, rng: &mut R) -> NormalField {
    let window = random_window(imm.chart(), rng);
    let c = random_affine(imm.ambient_dim(), rng);
    NormalField::projected(imm, c, Some(window))
}

/// w · (a + Bx) without projection, so generally not normal.
pub fn random_compact_field<R: Rng>(imm: &ParametricImmersion, rng: &mut R) -> NormalField {
    let window = random_window(imm.chart(), rng);
    let c = random_affine(imm.ambient_dim(), rng);
    let pos = imm.position_fn();
    let win = window.clone();
    let values: VecFn = Arc::new(move |u: &[f64]| {
        let w = win.eval(u);
        if w == 0.0 {
            return DVector::zeros(pos(u).len());
        }
        c(pos(u).as_slice()) * w
    });
    NormalField { values, support: Some(window), parallel: false }
}

/// Random smooth window-supported function (a + ⟨b, x⟩ + c|x|²)·w.
pub fn random_compact_scalar<R: Rng>(imm: &ParametricImmersion, rng: &mut R) -> (ScalarFn, SupportWindow) {
    let window = random_window(imm.chart(), rng);
    let n = imm.ambient_dim();
    let a = rng.gen_range(-1.0..1.0);
    let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let c = rng.gen_range(-0.3..0.3);
    let pos = imm.position_fn();
    let win = window.clone();
    let phi: ScalarFn = Arc::new(move |u: &[f64]| {
        let w = win.eval(u);
        if w == 0.0 {
            return 0.0;
        }
        let x = pos(u);
        (a + b.dot(&x) + c * x.norm_squared()) * w
    });
    (phi, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_compact_and_c2() {
        let w = SupportWindow::new(vec![0.0, 0.0], vec![Some(2.0), None]);
        assert_eq!(w.eval(&[2.0, 5.0]), 0.0);
        assert_eq!(w.eval(&[0.0, 100.0]), 1.0);
        // value, slope and curvature vanish at the edge
        let f = |s: f64| w.eval(&[s, 0.0]);
        let h = 1e-4;
        let e = 2.0 - 2.0 * h;
        assert!(f(e) < 1e-9);
        assert!(((f(e + h) - f(e - h)) / (2.0 * h)).abs() < 1e-6);
        let (lo, hi) = w.support_box(&[-10.0, -1.0], &[1.0, 1.0]);
        assert_eq!(lo, vec![-2.0, -1.0]);
        assert_eq!(hi, vec![1.0, 1.0]);
    }

    #[test]
    fn random_fields_are_normal_and_supported() {
        use crate::catalog::make_sphere;
        use rand::SeedableRng;
        let s = make_sphere(2, 1.2, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let f = random_compact_normal_field(&s.immersion, &mut rng);
            let win = f.support.clone().unwrap();
            assert!(win.half_width[1].is_none());
            let (lo, hi) = win.support_box(&s.immersion.chart().lower, &s.immersion.chart().upper);
            assert!(lo[0] > 0.0 && hi[0] < std::f64::consts::PI);
            let grid = QuadratureGrid::uniform(&ChartBox::new(lo, hi, vec![false; 2]).unwrap(), 6).unwrap();
            let (tang, _) = f.verify(&s.immersion, &grid).unwrap();
            assert!(tang < 1e-12);
        }
    }
}
