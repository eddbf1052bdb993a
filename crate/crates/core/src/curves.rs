//! Planar ξ-curves and self-shrinker curves by adaptive Dormand–Prince
//! integration, closure detection, and the Frenet obstruction for space
//! curves.
//!
//! State (x₁, x₂, θ, κ) with T = (cos θ, sin θ) and N the left normal. Both
//! kinds carry κ̇ = κ⟨x,T⟩; ξ-curves turn with θ̇ = κ, shrinkers with
//! θ̇ = −⟨x,N⟩, so κ + ⟨x,N⟩ stays 0 along a shrinker.

use crate::error::{Error, Result};
use crate::fd;
use crate::immersion::{ChartBox, HessianFn, JacobianFn, ParametricImmersion, VecFn};
use nalgebra::{DMatrix, DVector};
use ode_solvers::{Dopri5, System, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default escape radius; beyond it κ ∝ e^{|x|²/2} exceeds 6e7.
pub const BLOWUP_RADIUS: f64 = 6.0;
/// Default closure tolerance on position and heading.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Substeps of the local RK4 flow used to evaluate trajectories between samples.
const LOCAL_SUBSTEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the dense output samples.
    pub output_step: f64,
    pub blowup_radius: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, output_step: 0.01, blowup_radius: BLOWUP_RADIUS }
    }
}

impl StepPolicy {
    /// Tolerances divided by 2⁵, the analogue of halving the step of a
    /// fifth-order method.
    pub fn refined(&self) -> Self {
        Self { rtol: self.rtol / 32.0, atol: self.atol / 32.0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    /// κ = C e^{|x|²/2}.
    Xi { c: f64 },
    /// κ = −⟨x, N⟩.
    Shrinker,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub x: [f64; 2],
    pub theta: f64,
    /// Signed curvature, i.e. θ̇.
    pub kappa_r: f64,
    /// κ e^{−|x|²/2} for ξ-curves; κ + ⟨x,N⟩ for shrinkers.
    pub first_integral: f64,
    /// Integrated κ state.
    #[serde(skip)]
    pub kappa: f64,
}

impl CurveSample {
    pub fn tangent(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    pub fn normal(&self) -> [f64; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }

    pub fn radius(&self) -> f64 {
        self.x[0].hypot(self.x[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub kind: CurveKind,
    pub samples: Vec<CurveSample>,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

type State = [f64; 4];

fn rhs(kind: CurveKind, y: &State) -> State {
    let (c, s) = (y[2].cos(), y[2].sin());
    let xt = y[0] * c + y[1] * s;
    let turn = match kind {
        CurveKind::Xi { .. } => y[3],
        // −⟨x, N⟩ with N = (−sin θ, cos θ)
        CurveKind::Shrinker => y[0] * s - y[1] * c,
    };
    [c, s, turn, y[3] * xt]
}

fn sample(kind: CurveKind, s: f64, y: &State) -> CurveSample {
    let d = rhs(kind, y);
    let r2 = y[0] * y[0] + y[1] * y[1];
    let xn = -y[0] * y[2].sin() + y[1] * y[2].cos();
    let first_integral = match kind {
        CurveKind::Xi { .. } => y[3] * (-0.5 * r2).exp(),
        CurveKind::Shrinker => y[3] + xn,
    };
    CurveSample { s, x: [y[0], y[1]], theta: y[2], kappa_r: d[2], first_integral, kappa: y[3] }
}

struct CurveOde {
    kind: CurveKind,
    bound: f64,
    escaped: Option<f64>,
}

impl System<f64, Vector4<f64>> for CurveOde {
    fn system(&self, _s: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let d = rhs(self.kind, &[y[0], y[1], y[2], y[3]]);
        for k in 0..4 {
            dy[k] = d[k];
        }
    }

    fn solout(&mut self, s: f64, y: &Vector4<f64>, _dy: &Vector4<f64>) -> bool {
        if y[0].hypot(y[1]) > self.bound {
            self.escaped = Some(s);
            return true;
        }
        false
    }
}

fn integrate(kind: CurveKind, x0: [f64; 2], theta0: f64, kappa0: f64, s_max: f64, policy: &StepPolicy) -> Result<Polyline> {
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(Error::InvalidParameter(format!("s_max must be positive, got {s_max}")));
    }
    if !(policy.output_step > 0.0) || !(policy.rtol > 0.0) || !(policy.atol > 0.0) {
        return Err(Error::InvalidParameter("step policy tolerances must be positive".into()));
    }
    if x0[0].hypot(x0[1]) > policy.blowup_radius {
        return Err(Error::BlowUp { s: 0.0, bound: policy.blowup_radius });
    }
    let ode = CurveOde { kind, bound: policy.blowup_radius, escaped: None };
    let y0 = Vector4::new(x0[0], x0[1], theta0, kappa0);
    let mut solver = Dopri5::new(ode, 0.0, s_max, policy.output_step, y0, policy.rtol, policy.atol);
    let stats = solver.integrate().map_err(|e| Error::Integration(e.to_string()))?;
    let (ss, ys) = solver.results().get();
    let mut samples = Vec::with_capacity(ss.len());
    for (s, y) in ss.iter().zip(ys) {
        let st = [y[0], y[1], y[2], y[3]];
        if st.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("curve integration"));
        }
        if y[0].hypot(y[1]) > policy.blowup_radius {
            return Err(Error::BlowUp { s: *s, bound: policy.blowup_radius });
        }
        samples.push(sample(kind, *s, &st));
    }
    Ok(Polyline { kind, samples, accepted_steps: stats.accepted_steps, rejected_steps: stats.rejected_steps })
}

/// Integrates a ξ-curve with first integral κ e^{−|x|²/2} = C. C = 0 gives
/// the straight line through x₀.
pub fn integrate_xi_curve(x0: [f64; 2], theta0: f64, c: f64, s_max: f64, policy: &StepPolicy) -> Result<Polyline> {
    let kind = CurveKind::Xi { c };
    if c == 0.0 {
        return straight_line(kind, x0, theta0, s_max, policy);
    }
    let kappa0 = c * (0.5 * (x0[0] * x0[0] + x0[1] * x0[1])).exp();
    integrate(kind, x0, theta0, kappa0, s_max, policy)
}

/// Integrates a self-shrinker curve κ = −⟨x, N⟩.
pub fn integrate_self_shrinker_curve(x0: [f64; 2], theta0: f64, s_max: f64, policy: &StepPolicy) -> Result<Polyline> {
    let kappa0 = x0[0] * theta0.sin() - x0[1] * theta0.cos();
    integrate(CurveKind::Shrinker, x0, theta0, kappa0, s_max, policy)
}

fn straight_line(kind: CurveKind, x0: [f64; 2], theta0: f64, s_max: f64, policy: &StepPolicy) -> Result<Polyline> {
    let (c, s) = (theta0.cos(), theta0.sin());
    let n = (s_max / policy.output_step).floor() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * policy.output_step;
        let x = [x0[0] + t * c, x0[1] + t * s];
        if x[0].hypot(x[1]) > policy.blowup_radius {
            return Err(Error::BlowUp { s: t, bound: policy.blowup_radius });
        }
        samples.push(sample(kind, t, &[x[0], x[1], theta0, 0.0]));
    }
    Ok(Polyline { kind, samples, accepted_steps: 0, rejected_steps: 0 })
}

impl Polyline {
    /// sup |I(s) − I(0)| of the first integral; for ξ-curves I(0) = C.
    pub fn first_integral_drift(&self) -> f64 {
        let i0 = match self.kind {
            CurveKind::Xi { c } => c,
            CurveKind::Shrinker => 0.0,
        };
        self.samples.iter().map(|p| (p.first_integral - i0).abs()).fold(0.0, f64::max)
    }

    pub fn radius_range(&self) -> (f64, f64) {
        self.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.radius()), hi.max(p.radius())))
    }

    pub fn last(&self) -> &CurveSample {
        self.samples.last().expect("polyline has at least the initial sample")
    }

    /// CSV "s,x1,x2,theta,kappa_r,first_integral" with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x1,x2,theta,kappa_r,first_integral\n");
        for p in &self.samples {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.s, p.x[0], p.x[1], p.theta, p.kappa_r, p.first_integral
            ));
        }
        out
    }

    /// State at arc length s by a fixed-substep RK4 flow from the nearest
    /// earlier sample; smooth in s within each sample cell.
    pub fn state_at(&self, s: f64) -> State {
        let first = self.samples[0].s;
        let step = if self.samples.len() > 1 { self.samples[1].s - first } else { 1.0 };
        let k = (((s - first) / step).floor().max(0.0) as usize).min(self.samples.len() - 1);
        let p = &self.samples[k];
        let mut y = [p.x[0], p.x[1], p.theta, p.kappa];
        let h = (s - p.s) / LOCAL_SUBSTEPS as f64;
        for _ in 0..LOCAL_SUBSTEPS {
            let k1 = rhs(self.kind, &y);
            let k2 = rhs(self.kind, &add(&y, &k1, 0.5 * h));
            let k3 = rhs(self.kind, &add(&y, &k2, 0.5 * h));
            let k4 = rhs(self.kind, &add(&y, &k3, h));
            for i in 0..4 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }
}

fn add(y: &State, d: &State, h: f64) -> State {
    [y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2], y[3] + h * d[3]]
}

/// Rigid rotation by α of an initial condition.
pub fn rotate_initial(x0: [f64; 2], theta0: f64, alpha: f64) -> ([f64; 2], f64) {
    let (c, s) = (alpha.cos(), alpha.sin());
    ([c * x0[0] - s * x0[1], s * x0[0] + c * x0[1]], theta0 + alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Closure {
    pub closed: bool,
    /// Arc length of the first return, when closed.
    pub period: Option<f64>,
    /// Total turning over one period (or the whole run) divided by 2π.
    pub rotation_number: f64,
    /// Smallest combined position/heading gap among near-returns.
    pub gap: Option<f64>,
    pub min_radius: f64,
    pub max_radius: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Cubic Hermite interpolation of a value with known slopes.
fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1
}

/// Position and heading between two samples.
fn interpolate(a: &CurveSample, b: &CurveSample, s: f64) -> ([f64; 2], f64) {
    let h = b.s - a.s;
    let t = (s - a.s) / h;
    let (ta, tb) = (a.tangent(), b.tangent());
    let x = [hermite(t, h, a.x[0], ta[0], b.x[0], tb[0]), hermite(t, h, a.x[1], ta[1], b.x[1], tb[1])];
    (x, hermite(t, h, a.theta, a.kappa_r, b.theta, b.kappa_r))
}

/// Looks for a return of (x, θ mod 2π) to the initial state within `tol`.
pub fn closure_detect(poly: &Polyline, tol: f64) -> Result<Closure> {
    let p = &poly.samples;
    let (min_radius, max_radius) = poly.radius_range();
    let start = p[0];
    let total_turn = (poly.last().theta - start.theta) / (2.0 * PI);
    let dist = |q: &CurveSample| (q.x[0] - start.x[0]).hypot(q.x[1] - start.x[1]);
    let straight = p.iter().all(|q| q.kappa_r == 0.0);
    if straight {
        return Ok(Closure { closed: false, period: None, rotation_number: 0.0, gap: None, min_radius, max_radius });
    }
    // leave the starting neighbourhood before looking for returns
    let away = 5.0 * poly.samples.get(1).map_or(1.0, |q| q.s - start.s);
    let Some(first_away) = p.iter().position(|q| dist(q) > away) else {
        return Err(Error::Inconclusive { s_max: poly.last().s });
    };
    let mut best: Option<f64> = None;
    for k in first_away.max(1)..p.len().saturating_sub(1) {
        let (d0, d1, d2) = (dist(&p[k - 1]), dist(&p[k]), dist(&p[k + 1]));
        if !(d1 <= d0 && d1 <= d2) || d1 > 10.0 * away {
            continue;
        }
        // golden-section refinement of |x(s) − x₀| on [s_{k−1}, s_{k+1}]
        let f = |s: f64| {
            let (a, b) = if s <= p[k].s { (&p[k - 1], &p[k]) } else { (&p[k], &p[k + 1]) };
            let (x, _) = interpolate(a, b, s);
            (x[0] - start.x[0]).hypot(x[1] - start.x[1])
        };
        let (mut lo, mut hi) = (p[k - 1].s, p[k + 1].s);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let c = hi - g * (hi - lo);
            let d = lo + g * (hi - lo);
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        let s_star = 0.5 * (lo + hi);
        let (a, b) = if s_star <= p[k].s { (&p[k - 1], &p[k]) } else { (&p[k], &p[k + 1]) };
        let (x, theta) = interpolate(a, b, s_star);
        let gap = ((x[0] - start.x[0]).hypot(x[1] - start.x[1])).max(wrap_angle(theta - start.theta).abs());
        best = Some(best.map_or(gap, |g: f64| g.min(gap)));
        if gap <= tol {
            return Ok(Closure {
                closed: true,
                period: Some(s_star - start.s),
                rotation_number: (theta - start.theta) / (2.0 * PI),
                gap: Some(gap),
                min_radius,
                max_radius,
            });
        }
    }
    match best {
        None => Err(Error::Inconclusive { s_max: poly.last().s }),
        Some(g) => Ok(Closure { closed: false, period: None, rotation_number: total_turn, gap: Some(g), min_radius, max_radius }),
    }
}

/// Summary of one run for JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub curve: CurveKind,
    pub x0: [f64; 2],
    pub theta0: f64,
    pub s_end: f64,
    pub samples: usize,
    pub first_integral_drift: f64,
    pub closure: Option<Closure>,
    /// Closure failure reason when the detector was inconclusive.
    pub closure_note: Option<String>,
}

pub fn summarize(poly: &Polyline) -> CurveSummary {
    let p0 = poly.samples[0];
    let (closure, closure_note) = match closure_detect(poly, CLOSURE_TOL) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CurveSummary {
        curve: poly.kind,
        x0: p0.x,
        theta0: p0.theta,
        s_end: poly.last().s,
        samples: poly.samples.len(),
        first_integral_drift: poly.first_integral_drift(),
        closure,
        closure_note,
    }
}

/// The trajectory on [s_lo, s_hi] as a 1-dimensional immersion into ℝ²,
/// with exact first and second derivatives from the ODE.
pub fn trajectory_immersion(poly: &Polyline, s_lo: f64, s_hi: f64) -> Result<ParametricImmersion> {
    let (first, last) = (poly.samples[0].s, poly.last().s);
    if !(first <= s_lo && s_lo < s_hi && s_hi <= last) {
        return Err(Error::InvalidParameter(format!("trajectory window [{s_lo}, {s_hi}] outside [{first}, {last}]")));
    }
    let chart = ChartBox::new(vec![s_lo], vec![s_hi], vec![false])?;
    let (a, b, c) = (Arc::new(poly.clone()), Arc::new(poly.clone()), Arc::new(poly.clone()));
    let position: VecFn = Arc::new(move |u: &[f64]| {
        let y = a.state_at(u[0]);
        DVector::from_vec(vec![y[0], y[1]])
    });
    let jac: JacobianFn = Arc::new(move |u: &[f64]| {
        let y = b.state_at(u[0]);
        DMatrix::from_vec(2, 1, vec![y[2].cos(), y[2].sin()])
    });
    let kind = poly.kind;
    let hess: HessianFn = Arc::new(move |u: &[f64]| {
        let y = c.state_at(u[0]);
        let turn = rhs(kind, &y)[2];
        vec![DVector::from_vec(vec![-turn * y[2].sin(), turn * y[2].cos()])]
    });
    Ok(ParametricImmersion::new(1, 2, chart, position)?.with_jacobian(jac).with_hessian(hess))
}

/// Position and first three derivatives of a space curve at parameter t.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub t: f64,
    pub x: DVector<f64>,
    pub d1: DVector<f64>,
    pub d2: DVector<f64>,
    pub d3: DVector<f64>,
}

/// Finite-difference jet of a parametrized curve t ↦ γ(t).
pub fn curve_jet_fd<F>(gamma: &F, t: f64) -> CurveJet
where
    F: Fn(f64) -> DVector<f64> + ?Sized,
{
    let policy = fd::DiffPolicy::default();
    let g = |u: &[f64]| gamma(u[0]);
    let x = gamma(t);
    let d1 = fd::partial(&g, &[t], 0, policy.first);
    let d2 = fd::second_partial(&g, &[t], 0, 0, policy.second, &x);
    // third derivative as a first difference of second differences
    let base = 1e-2;
    let second = |u: &[f64]| fd::second_partial(&g, u, 0, 0, base, &g(u));
    let d3 = fd::partial(&second, &[t], 0, base);
    CurveJet { t, x, d1, d2, d3 }
}

/// Arc-length jets of a planar trajectory embedded in the first two axes of
/// ℝ^{1+p}: γ' = T, γ'' = κN, γ''' = κ̇N − κ²T.
pub fn embedded_jets(poly: &Polyline, p: usize) -> Result<Vec<CurveJet>> {
    if p == 0 {
        return Err(Error::InvalidParameter("space curve needs p >= 1".into()));
    }
    let n = 1 + p;
    let embed = |v: [f64; 2]| {
        let mut e = DVector::zeros(n);
        e[0] = v[0];
        e[1] = v[1];
        e
    };
    Ok(poly
        .samples
        .iter()
        .map(|q| {
            let y = [q.x[0], q.x[1], q.theta, q.kappa];
            let d = rhs(poly.kind, &y);
            let (t, nn) = (q.tangent(), q.normal());
            let k = d[2];
            // κ̇ = d/ds of θ̇, from the state derivative
            let kdot = match poly.kind {
                CurveKind::Xi { .. } => d[3],
                CurveKind::Shrinker => {
                    let xt = q.x[0] * t[0] + q.x[1] * t[1];
                    k * xt
                }
            };
            CurveJet {
                t: q.s,
                x: embed(q.x),
                d1: embed(t),
                d2: embed([k * nn[0], k * nn[1]]),
                d3: embed([kdot * nn[0] - k * k * t[0], kdot * nn[1] - k * k * t[1]]),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetResidual {
    /// sup |κ̇₁ − κ₁⟨x,T⟩| (derivative in arc length).
    pub curvature: f64,
    /// sup |κ₁κ₂|.
    pub torsion: f64,
}

/// Frenet residuals of a space curve from jets in any regular parameter.
pub fn frenet_torsion_check(jets: &[CurveJet]) -> Result<FrenetResidual> {
    let mut out = FrenetResidual { curvature: 0.0, torsion: 0.0 };
    for j in jets {
        let v = j.d1.norm();
        if !(v > 0.0) {
            return Err(Error::FrenetDegenerate { t: j.t });
        }
        let tt = &j.d1 / v;
        let vdot = j.d2.dot(&tt);
        let aperp = &j.d2 - &tt * vdot;
        let ap = aperp.norm();
        let k1 = ap / (v * v);
        if k1 <= 1e-10 * (1.0 + j.x.norm()) {
            return Err(Error::FrenetDegenerate { t: j.t });
        }
        let e2 = &aperp / ap;
        let k1dot = (j.d3.dot(&e2) - 3.0 * vdot * ap / v) / (v * v * v);
        let d3perp = &j.d3 - &tt * j.d3.dot(&tt) - &e2 * j.d3.dot(&e2);
        let k1k2 = d3perp.norm() / (v * v * v);
        out.curvature = out.curvature.max((k1dot - k1 * j.x.dot(&tt)).abs());
        out.torsion = out.torsion.max(k1k2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureGrid;
    use crate::xi::xi_residual;

    #[test]
    fn circle_xi_curve() {
        // κ = 1/r on the centered circle: C = e^{−r²/2}/r
        let r: f64 = 1.7;
        let c = (-0.5 * r * r).exp() / r;
        let poly = integrate_xi_curve([r, 0.0], PI / 2.0, c, 2.0 * PI * r + 0.5, &StepPolicy::default()).unwrap();
        let cl = closure_detect(&poly, 1e-8).unwrap();
        assert!(cl.closed, "{cl:?}");
        assert!((cl.period.unwrap() - 2.0 * PI * r).abs() < 1e-8);
        assert!(poly.first_integral_drift() < 1e-10);
    }

    #[test]
    fn generic_xi_curve_conserves_first_integral() {
        let pol = StepPolicy::default();
        let a = integrate_xi_curve([1.0, 0.0], PI / 2.0, 0.3, 20.0, &pol).unwrap();
        assert!(a.first_integral_drift() < 1e-8, "{}", a.first_integral_drift());
        let b = integrate_xi_curve([1.0, 0.0], PI / 2.0, 0.3, 20.0, &pol.refined()).unwrap();
        let (pa, pb) = (a.last(), b.last());
        assert!((pa.x[0] - pb.x[0]).hypot(pa.x[1] - pb.x[1]) < 1e-9);
    }

    #[test]
    fn straight_lines() {
        let poly = integrate_xi_curve([0.0, 1.0], 0.3, 0.0, 3.0, &StepPolicy::default()).unwrap();
        assert!(poly.samples.iter().all(|p| p.kappa_r == 0.0));
        assert!(!closure_detect(&poly, 1e-6).unwrap().closed);
        let s = integrate_self_shrinker_curve([0.0, 0.0], 0.7, 4.0, &StepPolicy::default()).unwrap();
        let last = s.last();
        assert!((last.x[1] / last.x[0] - 0.7f64.tan()).abs() < 1e-12);
    }

    #[test]
    fn unit_circle_shrinker_closes_once() {
        let poly = integrate_self_shrinker_curve([1.0, 0.0], PI / 2.0, 2.0 * PI + 0.5, &StepPolicy::default()).unwrap();
        assert!((poly.samples[0].kappa_r - 1.0).abs() < 1e-15);
        let cl = closure_detect(&poly, 1e-8).unwrap();
        assert!(cl.closed && cl.gap.unwrap() <= 1e-8, "{cl:?}");
        assert!((cl.rotation_number - 1.0).abs() < 1e-8);
        assert!((cl.period.unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn blow_up_guard() {
        // nearly straight until κ = C e^{|x|²/2} is felt, well past the guard
        let e = integrate_xi_curve([0.0, 0.0], 0.0, 1e-12, 50.0, &StepPolicy::default()).unwrap_err();
        assert!(matches!(e, Error::BlowUp { s, .. } if s > 5.9 && s < 6.1), "{e:?}");
        let e = integrate_xi_curve([0.0, 0.0], 0.0, 0.0, 50.0, &StepPolicy::default()).unwrap_err();
        assert!(matches!(e, Error::BlowUp { .. }), "{e:?}");
    }

    #[test]
    fn frenet_on_helix_circle_and_xi_curve() {
        let helix = |t: f64| DVector::from_vec(vec![t.cos(), t.sin(), 0.5 * t]);
        let jets: Vec<CurveJet> = (0..20).map(|k| curve_jet_fd(&helix, 0.3 * k as f64)).collect();
        let r = frenet_torsion_check(&jets).unwrap();
        assert!((r.torsion - 0.32).abs() < 1e-6, "{r:?}");
        let circle = |t: f64| DVector::from_vec(vec![2.0 * t.cos(), 2.0 * t.sin(), 0.0]);
        let jets: Vec<CurveJet> = (0..20).map(|k| curve_jet_fd(&circle, 0.3 * k as f64)).collect();
        assert!(frenet_torsion_check(&jets).unwrap().torsion < 1e-8);

        let poly = integrate_xi_curve([1.0, 0.0], PI / 2.0, 0.3, 10.0, &StepPolicy::default()).unwrap();
        let r = frenet_torsion_check(&embedded_jets(&poly, 2).unwrap()).unwrap();
        assert!(r.curvature < 1e-6 && r.torsion < 1e-12, "{r:?}");
    }

    #[test]
    fn trajectory_is_a_xi_submanifold() {
        let poly = integrate_xi_curve([1.0, 0.0], PI / 2.0, 0.3, 8.0, &StepPolicy::default()).unwrap();
        let imm = trajectory_immersion(&poly, 0.5, 7.5).unwrap();
        let grid = QuadratureGrid::uniform(imm.chart(), 60).unwrap();
        let r = xi_residual(&imm, &grid).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        // a perturbed curvature breaks the equation
        let mut bad = poly.clone();
        for p in bad.samples.iter_mut() {
            p.kappa *= 1.0 + 0.01 * p.s;
        }
        let imm = trajectory_immersion(&bad, 0.5, 7.5).unwrap();
        assert!(xi_residual(&imm, &grid).unwrap().residual > 1e-3);
    }

    #[test]
    fn rotation_equivariance() {
        let pol = StepPolicy::default();
        let a = integrate_xi_curve([1.1, 0.2], 1.0, -0.4, 6.0, &pol).unwrap();
        let (x0, t0) = rotate_initial([1.1, 0.2], 1.0, 0.9);
        let b = integrate_xi_curve(x0, t0, -0.4, 6.0, &pol).unwrap();
        let (ra, rb) = (a.last(), b.last());
        let (rx, _) = rotate_initial(ra.x, ra.theta, 0.9);
        assert!((rx[0] - rb.x[0]).hypot(rx[1] - rb.x[1]) < 1e-10);
    }
}
