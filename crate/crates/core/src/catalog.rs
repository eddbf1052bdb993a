//! Closed-form ξ-submanifolds: planes, centered spheres, products, and
//! parallel-mean-curvature submanifolds of round spheres. Each item carries
//! exact jets, its exact ξ field and a parallel orthonormal normal frame.

use crate::error::{Error, Result};
use crate::immersion::{ChartBox, HessianFn, JacobianFn, ParametricImmersion, VecFn};
use crate::quadrature::{AxisRule, QuadratureGrid};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Half-width of plane charts; e^{-|u|²/2} is far below 1e-16 of its peak there.
pub const PLANE_HALF_WIDTH: f64 = 12.0;
/// Planes are certified where the Gaussian weight is above ~1e−8.
pub const PLANE_VERIFICATION_HALF_WIDTH: f64 = 6.0;
/// Width of the polar collar excluded from sphere verification grids.
pub const POLAR_COLLAR: f64 = 1e-3;
/// Default verification nodes per axis.
pub const VERIFICATION_NODES: usize = 24;

pub type FrameFn = Arc<dyn Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync>;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CatalogMeta {
    pub family: String,
    pub parameters: BTreeMap<String, f64>,
    pub m: usize,
    pub p: usize,
    pub xi_norm: f64,
    pub self_shrinker: bool,
}

#[derive(Clone)]
pub struct CatalogImmersion {
    pub immersion: ParametricImmersion,
    pub xi: VecFn,
    pub frame: FrameFn,
    pub meta: CatalogMeta,
    pub verification_box: ChartBox,
    /// Full-domain integration rule per chart axis.
    pub rules: Vec<AxisRule>,
}

impl std::fmt::Debug for CatalogImmersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogImmersion").field("meta", &self.meta).finish()
    }
}

impl CatalogImmersion {
    pub fn name(&self) -> String {
        let params: Vec<String> = self.meta.parameters.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
        format!("{}({})", self.meta.family, params.join(","))
    }

    pub fn verification_grid(&self) -> Result<QuadratureGrid> {
        self.verification_grid_with(VERIFICATION_NODES)
    }

    pub fn verification_grid_with(&self, per_axis: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::uniform(&self.verification_box, per_axis)
    }

    pub fn quadrature_grid(&self) -> Result<QuadratureGrid> {
        let c = self.immersion.chart();
        QuadratureGrid::on_box(&c.lower, &c.upper, &self.rules)
    }

    /// Quadrature on a sub-box with the item's per-axis rules.
    pub fn quadrature_on(&self, lower: &[f64], upper: &[f64]) -> Result<QuadratureGrid> {
        QuadratureGrid::on_box(lower, upper, &self.rules)
    }

    pub fn frame_fields(&self) -> Vec<VecFn> {
        let k = (self.frame)(&self.verification_box.lower).len();
        (0..k)
            .map(|a| {
                let f = self.frame.clone();
                Arc::new(move |u: &[f64]| f(u)[a].clone()) as VecFn
            })
            .collect()
    }

    /// Applies an ambient rotation to the immersion, ξ and the frame.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Self {
        let n = self.immersion.ambient_dim();
        let imm = self.immersion.transformed(rotation.clone(), DVector::zeros(n));
        let (r1, r2) = (rotation.clone(), rotation.clone());
        let xi = self.xi.clone();
        let frame = self.frame.clone();
        Self {
            immersion: imm,
            xi: Arc::new(move |u: &[f64]| &r1 * xi(u)),
            frame: Arc::new(move |u: &[f64]| frame(u).into_iter().map(|v| &r2 * v).collect()),
            meta: self.meta.clone(),
            verification_box: self.verification_box.clone(),
            rules: self.rules.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Factor {
    One,
    Sin,
    Cos,
}

impl Factor {
    fn eval(self, t: f64, order: usize) -> f64 {
        match (self, order % 4) {
            (Factor::One, 0) => 1.0,
            (Factor::One, _) => 0.0,
            (Factor::Sin, 0) => t.sin(),
            (Factor::Sin, 1) => t.cos(),
            (Factor::Sin, 2) => -t.sin(),
            (Factor::Sin, _) => -t.cos(),
            (Factor::Cos, 0) => t.cos(),
            (Factor::Cos, 1) => -t.sin(),
            (Factor::Cos, 2) => -t.cos(),
            (Factor::Cos, _) => t.sin(),
        }
    }
}

/// Components that are products of sin/cos of single chart coordinates,
/// differentiated exactly.
#[derive(Debug, Clone)]
struct TrigMap {
    scale: f64,
    comps: Vec<Vec<Factor>>,
}

impl TrigMap {
    fn eval(&self, u: &[f64], orders: &[usize]) -> DVector<f64> {
        DVector::from_iterator(
            self.comps.len(),
            self.comps.iter().map(|c| {
                self.scale
                    * c.iter()
                        .enumerate()
                        .map(|(k, f)| f.eval(u[k], orders[k]))
                        .product::<f64>()
            }),
        )
    }
}

/// Unit sphere S^m in hyperspherical angles (a₁, …, a_{m−1} polar, last azimuthal).
fn unit_sphere_map(m: usize) -> TrigMap {
    use Factor::*;
    // component list for S^m ⊂ ℝ^{m+1}
    let mut comps: Vec<Vec<Factor>> = Vec::new();
    match m {
        1 => {
            comps.push(vec![Cos]);
            comps.push(vec![Sin]);
        }
        _ => {
            // x_{m+1} = cos a1, x_m = sin a1 cos a2, ..., x_1, x_2 use the azimuth
            for i in 0..=m {
                let mut c = vec![One; m];
                if i < 2 {
                    for f in c.iter_mut().take(m - 1) {
                        *f = Sin;
                    }
                    c[m - 1] = if i == 0 { Cos } else { Sin };
                } else {
                    // polar index counted from the last component
                    let depth = m - i; // number of leading sines
                    for f in c.iter_mut().take(depth) {
                        *f = Sin;
                    }
                    c[depth] = Cos;
                }
                comps.push(c);
            }
        }
    }
    TrigMap { scale: 1.0, comps }
}

fn trig_immersion(map: TrigMap, ambient: usize, chart: ChartBox, scale: f64) -> Result<ParametricImmersion> {
    let m = chart.dim();
    let k = map.comps.len();
    let pad = move |v: DVector<f64>| {
        let mut out = DVector::zeros(ambient);
        out.rows_mut(0, k).copy_from(&v);
        out
    };
    let (m1, m2, m3) = (map.clone(), map.clone(), map);
    let position: VecFn = Arc::new(move |u: &[f64]| pad(m1.eval(u, &vec![0; m])));
    let jac: JacobianFn = Arc::new(move |u: &[f64]| {
        let mut j = DMatrix::zeros(ambient, m);
        for i in 0..m {
            let mut o = vec![0; m];
            o[i] = 1;
            j.view_mut((0, i), (k, 1)).copy_from(&m2.eval(u, &o));
        }
        j
    });
    let hess: HessianFn = Arc::new(move |u: &[f64]| {
        let mut out = vec![DVector::zeros(ambient); m * m];
        for i in 0..m {
            for jj in 0..m {
                let mut o = vec![0; m];
                o[i] += 1;
                o[jj] += 1;
                out[i * m + jj].rows_mut(0, k).copy_from(&m3.eval(u, &o));
            }
        }
        out
    });
    Ok(ParametricImmersion::new(m, ambient, chart, position)?
        .with_jacobian(jac)
        .with_hessian(hess)
        .with_scale(scale))
}

fn sphere_chart(m: usize) -> ChartBox {
    let mut lower = vec![0.0; m];
    let mut upper = vec![PI; m];
    let mut periodic = vec![false; m];
    lower[m - 1] = 0.0;
    upper[m - 1] = 2.0 * PI;
    periodic[m - 1] = true;
    ChartBox { lower, upper, periodic }
}

fn sphere_rules(m: usize) -> Vec<AxisRule> {
    let mut r = vec![AxisRule::new(24, 1); m];
    r[m - 1] = AxisRule::new(16, 2);
    r
}

/// Raw immersion of S^m(r) centered at `center` in ℝ^{ambient}.
pub fn sphere_immersion(m: usize, r: f64, ambient: usize, center: Option<DVector<f64>>) -> Result<ParametricImmersion> {
    if !(1..=3).contains(&m) {
        return Err(Error::UnsupportedSpec(format!("sphere charts support 1 <= m <= 3, got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if ambient < m + 1 {
        return Err(Error::InvalidParameter("sphere needs ambient dimension >= m+1".into()));
    }
    let mut map = unit_sphere_map(m);
    map.scale = r;
    let imm = trig_immersion(map, ambient, sphere_chart(m), r)?;
    Ok(match center {
        Some(c) => imm.transformed(DMatrix::identity(ambient, ambient), c),
        None => imm,
    })
}

fn sphere_box(m: usize) -> ChartBox {
    let mut b = sphere_chart(m);
    for axis in 0..m - 1 {
        b = b.collared(axis, POLAR_COLLAR);
    }
    b
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// The m-plane spanned by the first m axes, translated by a normal offset ξ₀.
pub fn make_plane(m: usize, p: usize, offset: &[f64]) -> Result<CatalogImmersion> {
    let n = m + p;
    if m == 0 || offset.len() != n {
        return Err(Error::InvalidParameter(format!("plane offset must have length m+p = {n}")));
    }
    let tangential = offset[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
    if tangential > 1e-12 {
        return Err(Error::BadOffset { tangential });
    }
    let xi0 = DVector::from_column_slice(offset);
    let base = xi0.clone();
    let chart = ChartBox::new(vec![-PLANE_HALF_WIDTH; m], vec![PLANE_HALF_WIDTH; m], vec![false; m])?;
    let position: VecFn = Arc::new(move |u: &[f64]| {
        let mut x = base.clone();
        for (i, ui) in u.iter().enumerate() {
            x[i] += ui;
        }
        x
    });
    let jac: JacobianFn = Arc::new(move |_: &[f64]| DMatrix::identity(n, m));
    let hess: HessianFn = Arc::new(move |_: &[f64]| vec![DVector::zeros(n); m * m]);
    let imm = ParametricImmersion::new(m, n, chart.clone(), position)?
        .with_jacobian(jac)
        .with_hessian(hess);
    let xi_norm = xi0.norm();
    let xi_c = xi0.clone();
    let mut pars = params(&[("m", m as f64), ("p", p as f64)]);
    for (i, v) in offset.iter().enumerate().skip(m) {
        pars.insert(format!("offset{i}"), *v);
    }
    Ok(CatalogImmersion {
        immersion: imm,
        xi: Arc::new(move |_: &[f64]| xi_c.clone()),
        frame: Arc::new(move |_: &[f64]| (m..n).map(|i| unit(n, i)).collect()),
        meta: CatalogMeta {
            family: "plane".into(),
            parameters: pars,
            m,
            p,
            xi_norm,
            self_shrinker: xi_norm <= 1e-10,
        },
        verification_box: ChartBox::new(
            vec![-PLANE_VERIFICATION_HALF_WIDTH; m],
            vec![PLANE_VERIFICATION_HALF_WIDTH; m],
            vec![false; m],
        )?,
        rules: vec![AxisRule::new(24, 4); m],
    })
}

/// Centered round sphere S^m(r) ⊂ ℝ^{m+1} ⊂ ℝ^{m+p}, with ξ = (1 − m/r²) x.
pub fn make_sphere(m: usize, r: f64, p: usize) -> Result<CatalogImmersion> {
    if p == 0 {
        return Err(Error::InvalidParameter("sphere needs codimension p >= 1".into()));
    }
    let n = m + p;
    let imm = sphere_immersion(m, r, n, None)?;
    let c = 1.0 - m as f64 / (r * r);
    let pos = imm.position_fn();
    let pos2 = imm.position_fn();
    Ok(CatalogImmersion {
        xi: Arc::new(move |u: &[f64]| pos(u) * c),
        frame: Arc::new(move |u: &[f64]| {
            let mut f = vec![pos2(u) / r];
            f.extend((m + 1..n).map(|i| unit(n, i)));
            f
        }),
        meta: CatalogMeta {
            family: "sphere".into(),
            parameters: params(&[("m", m as f64), ("r", r), ("p", p as f64)]),
            m,
            p,
            xi_norm: c.abs() * r,
            self_shrinker: (r * r - m as f64).abs() < 1e-12,
        },
        verification_box: sphere_box(m),
        rules: sphere_rules(m),
        immersion: imm,
    })
}

/// x₁ × x₂ with ξ = (ξ₁, ξ₂).
pub fn make_product(a: &CatalogImmersion, b: &CatalogImmersion) -> CatalogImmersion {
    let imm = ParametricImmersion::product(&a.immersion, &b.immersion);
    let ma = a.immersion.dim();
    let (na, nb) = (a.immersion.ambient_dim(), b.immersion.ambient_dim());
    let n = na + nb;
    let (xa, xb) = (a.xi.clone(), b.xi.clone());
    let xi: VecFn = Arc::new(move |u: &[f64]| {
        let va = xa(&u[..ma]);
        let vb = xb(&u[ma..]);
        DVector::from_iterator(n, va.iter().chain(vb.iter()).copied())
    });
    let (fa, fb) = (a.frame.clone(), b.frame.clone());
    let frame: FrameFn = Arc::new(move |u: &[f64]| {
        let mut out = Vec::new();
        for v in fa(&u[..ma]) {
            let mut w = DVector::zeros(n);
            w.rows_mut(0, na).copy_from(&v);
            out.push(w);
        }
        for v in fb(&u[ma..]) {
            let mut w = DVector::zeros(n);
            w.rows_mut(na, nb).copy_from(&v);
            out.push(w);
        }
        out
    });
    let mut parameters = BTreeMap::new();
    for (k, v) in &a.meta.parameters {
        parameters.insert(format!("a.{k}"), *v);
    }
    for (k, v) in &b.meta.parameters {
        parameters.insert(format!("b.{k}"), *v);
    }
    let xi_norm = a.meta.xi_norm.hypot(b.meta.xi_norm);
    CatalogImmersion {
        meta: CatalogMeta {
            family: format!("{}x{}", a.meta.family, b.meta.family),
            parameters,
            m: imm.dim(),
            p: imm.codim(),
            xi_norm,
            self_shrinker: a.meta.self_shrinker && b.meta.self_shrinker,
        },
        verification_box: a.verification_box.product(&b.verification_box),
        rules: [a.rules.clone(), b.rules.clone()].concat(),
        immersion: imm,
        xi,
        frame,
    }
}

/// Fixed menu of parallel-mean-curvature submanifolds of S^{m+p}(a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SphericalSpec {
    /// Totally geodesic S^m(a) ⊂ S^{m+1}(a) ⊂ ℝ^{m+2}.
    GreatSphere { m: usize, a: f64 },
    /// S^m(√(a² − c²)) at height c inside S^{m+1}(a) ⊂ ℝ^{m+2}.
    SmallSphere { m: usize, a: f64, height: f64 },
    /// S¹(a/√2) × S¹(a/√2) ⊂ S³(a) ⊂ ℝ⁴.
    CliffordTorus { a: f64 },
}

pub fn make_spherical(spec: SphericalSpec) -> Result<CatalogImmersion> {
    match spec {
        SphericalSpec::GreatSphere { m, a } => {
            let mut item = make_sphere(m, a, 2)?;
            item.meta.family = "great_sphere".into();
            item.meta.parameters = params(&[("m", m as f64), ("a", a)]);
            Ok(item)
        }
        SphericalSpec::SmallSphere { m, a, height } => {
            if !(a > 0.0) || height.abs() >= a {
                return Err(Error::UnsupportedSpec(format!(
                    "small sphere needs |height| < a, got a={a}, height={height}"
                )));
            }
            let rho = (a * a - height * height).sqrt();
            let n = m + 2;
            let shift = unit(n, m + 1) * height;
            let imm = sphere_immersion(m, rho, n, Some(shift))?;
            let pos = imm.position_fn();
            let pos2 = imm.position_fn();
            let mf = m as f64;
            let radial = move |u: &[f64]| {
                let mut y = pos(u);
                y[m + 1] = 0.0;
                y / rho
            };
            let radial2 = move |u: &[f64]| {
                let mut y = pos2(u);
                y[m + 1] = 0.0;
                y / rho
            };
            let e = unit(n, m + 1);
            let e2 = e.clone();
            let c = rho - mf / rho;
            let xi_norm = c.hypot(height);
            Ok(CatalogImmersion {
                xi: Arc::new(move |u: &[f64]| radial(u) * c + &e * height),
                frame: Arc::new(move |u: &[f64]| vec![radial2(u), e2.clone()]),
                meta: CatalogMeta {
                    family: "small_sphere".into(),
                    parameters: params(&[("m", mf), ("a", a), ("height", height)]),
                    m,
                    p: 2,
                    xi_norm,
                    self_shrinker: xi_norm <= 1e-10,
                },
                verification_box: sphere_box(m),
                rules: sphere_rules(m),
                immersion: imm,
            })
        }
        SphericalSpec::CliffordTorus { a } => {
            if !(a > 0.0) {
                return Err(Error::UnsupportedSpec(format!("radius must be positive, got {a}")));
            }
            let r = a / 2f64.sqrt();
            let c = make_sphere(1, r, 1)?;
            let mut t = make_product(&c, &c);
            t.meta.family = "clifford_torus".into();
            t.meta.parameters = params(&[("a", a)]);
            Ok(t)
        }
    }
}

/// Off-center sphere S^m(r, x₀) ⊂ ℝ^{m+1}: a ξ-submanifold only when x₀ = 0.
pub fn off_center_sphere(m: usize, r: f64, center: &[f64]) -> Result<ParametricImmersion> {
    sphere_immersion(m, r, m + 1, Some(DVector::from_column_slice(center)))
}

/// Ellipse (a cos t, b sin t), not a ξ-curve unless a = b.
pub fn ellipse(a: f64, b: f64) -> Result<ParametricImmersion> {
    let chart = ChartBox::new(vec![0.0], vec![2.0 * PI], vec![true])?;
    let position: VecFn = Arc::new(move |u: &[f64]| DVector::from_vec(vec![a * u[0].cos(), b * u[0].sin()]));
    let jac: JacobianFn =
        Arc::new(move |u: &[f64]| DMatrix::from_column_slice(2, 1, &[-a * u[0].sin(), b * u[0].cos()]));
    let hess: HessianFn =
        Arc::new(move |u: &[f64]| vec![DVector::from_vec(vec![-a * u[0].cos(), -b * u[0].sin()])]);
    Ok(ParametricImmersion::new(1, 2, chart, position)?
        .with_jacobian(jac)
        .with_hessian(hess)
        .with_scale(a.min(b)))
}

/// Everything the acceptance suite certifies.
pub fn standard_catalog() -> Result<Vec<CatalogImmersion>> {
    let mut items = vec![
        make_plane(1, 1, &[0.0, 1.0])?,
        make_plane(2, 1, &[0.0, 0.0, 0.0])?,
        make_plane(2, 2, &[0.0, 0.0, 0.7, -0.4])?,
    ];
    for m in 1..=3 {
        for r in [0.8, 1.0, 2f64.sqrt(), 2.0] {
            items.push(make_sphere(m, r, 1)?);
        }
    }
    let s1 = make_sphere(1, 1.0, 1)?;
    let s1b = make_sphere(1, 1.5, 1)?;
    let line = make_plane(1, 0, &[0.0])?;
    let s2 = make_sphere(2, 1.2, 1)?;
    items.push(make_product(&s1, &s1));
    items.push(make_product(&s1b, &line));
    items.push(make_product(&s1, &s2));
    items.push(make_spherical(SphericalSpec::GreatSphere { m: 2, a: 1.5 })?);
    items.push(make_spherical(SphericalSpec::GreatSphere { m: 2, a: 2f64.sqrt() })?);
    items.push(make_spherical(SphericalSpec::SmallSphere { m: 1, a: 1.3, height: 0.6 })?);
    items.push(make_spherical(SphericalSpec::CliffordTorus { a: 2.0 })?);
    Ok(items)
}

pub fn catalog_listing(items: &[CatalogImmersion]) -> Vec<CatalogMeta> {
    items.iter().map(|i| i.meta.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::geometry_jet;

    #[test]
    fn sphere_mean_curvature_is_radial() {
        for m in 1..=3 {
            let r = 1.7;
            let s = make_sphere(m, r, 1).unwrap();
            let u: Vec<f64> = (0..m).map(|i| 0.4 + 0.3 * i as f64).collect();
            let jet = geometry_jet(&s.immersion, &u).unwrap();
            let expect = &jet.x * (-(m as f64) / (r * r));
            assert!((&jet.mean_curvature - expect).norm() < 1e-12, "m={m}");
            assert!((jet.x.norm() - r).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_and_fd_sphere_jets_agree() {
        let s = make_sphere(2, 1.3, 2).unwrap();
        let fd = s.immersion.numerically_differentiated();
        let u = [0.9, 2.1];
        let a = geometry_jet(&s.immersion, &u).unwrap();
        let b = geometry_jet(&fd, &u).unwrap();
        assert!((a.tangent - b.tangent).norm() < 1e-10);
        for (x, y) in a.sff.iter().zip(&b.sff) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn plane_examples() {
        let p = make_plane(2, 1, &[0.0; 3]).unwrap();
        assert!(p.meta.self_shrinker);
        let l = make_plane(1, 1, &[0.0, 1.0]).unwrap();
        assert_eq!((l.xi)(&[3.0]), DVector::from_vec(vec![0.0, 1.0]));
        let jet = geometry_jet(&l.immersion, &[3.0]).unwrap();
        assert!((&jet.x_tan - (&jet.x - DVector::from_vec(vec![0.0, 1.0]))).norm() < 1e-14);
        assert!(matches!(make_plane(1, 1, &[0.5, 1.0]), Err(Error::BadOffset { .. })));
    }

    #[test]
    fn sphere_xi_examples() {
        let c = make_sphere(1, 1.0, 1).unwrap();
        assert!(c.meta.self_shrinker);
        let s = make_sphere(2, 1.0, 1).unwrap();
        let x = s.immersion.position(&[0.5, 0.5]);
        assert!(((s.xi)(&[0.5, 0.5]) + &x).norm() < 1e-15);
        assert!((s.meta.xi_norm - 1.0).abs() < 1e-15);
        assert!(make_sphere(2, 2f64.sqrt(), 1).unwrap().meta.self_shrinker);
        assert!(make_sphere(4, 1.0, 1).is_err());
    }

    #[test]
    fn products_and_spherical_menu() {
        let s = make_sphere(1, 1.0, 1).unwrap();
        let t = make_product(&s, &s);
        assert_eq!((t.meta.m, t.meta.p), (2, 2));
        assert!(t.meta.self_shrinker);
        let g = make_spherical(SphericalSpec::GreatSphere { m: 2, a: 2f64.sqrt() }).unwrap();
        assert!(g.meta.self_shrinker);
        let ct = make_spherical(SphericalSpec::CliffordTorus { a: 2.0 }).unwrap();
        let u = [0.3, 1.2];
        let x = ct.immersion.position(&u);
        assert!(((ct.xi)(&u) - &x * 0.5).norm() < 1e-14);
        assert!(make_spherical(SphericalSpec::SmallSphere { m: 1, a: 1.0, height: 1.0 }).is_err());
    }

    #[test]
    fn frames_are_orthonormal_and_normal() {
        for item in standard_catalog().unwrap() {
            let grid = item.verification_grid_with(4).unwrap();
            for u in &grid.nodes {
                let jet = geometry_jet(&item.immersion, u).unwrap();
                let f = (item.frame)(u);
                assert_eq!(f.len(), item.meta.p, "{}", item.name());
                for (a, ea) in f.iter().enumerate() {
                    assert!(jet.tangent_part(ea).norm() < 1e-12, "{}", item.name());
                    for (b, eb) in f.iter().enumerate() {
                        let d = if a == b { 1.0 } else { 0.0 };
                        assert!((ea.dot(eb) - d).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
