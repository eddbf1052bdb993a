//! Weighted Galerkin spectra K v = λ G v with G_ab = ∫⟨b_a,b_b⟩e^{−f}dV and
//! K_ab = −∫⟨b_a, T b_b⟩e^{−f}dV assembled in weak form.

use crate::catalog::CatalogImmersion;
use crate::error::{Error, Result};
use crate::fd;
use crate::geometry::GeometryJet;
use crate::immersion::{ParametricImmersion, ScalarFn, VecFn};
use crate::quadrature::{AxisRule, QuadratureGrid};
use crate::stability::hermite::{factorial_product, hermite_jet, HermiteIndex};
use crate::stability::operator::OperatorMode;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Eigenvalues below −NEG_TOL count towards the index.
pub const NEG_TOL: f64 = 1e-8;
/// Largest accepted condition number of the scaled Gram matrix.
pub const MAX_CONDITION: f64 = 1e8;
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Normalized Hermite products of total degree ≤ `degree` in chart coordinates.
    Hermite { degree: usize },
    /// 1, cos kθ, sin kθ for 1 ≤ k ≤ `kmax` on a circle.
    Fourier { kmax: usize },
    /// Real spherical harmonics of degree ≤ `lmax` on a 2-sphere.
    Harmonics { lmax: usize },
}

impl BasisKind {
    /// The default basis for a plane, circle or 2-sphere.
    pub fn default_for(item: &CatalogImmersion) -> Result<Self> {
        match (item.meta.family.as_str(), item.meta.m) {
            ("plane", _) => Ok(Self::Hermite { degree: 8 }),
            ("sphere", 1) => Ok(Self::Fourier { kmax: 16 }),
            ("sphere", 2) => Ok(Self::Harmonics { lmax: 8 }),
            (f, m) => Err(Error::UnsupportedSpec(format!("no spectral basis for {f} of dimension {m}"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Hermite { degree } => format!("hermite(degree<={degree})"),
            Self::Fourier { kmax } => format!("fourier(|k|<={kmax})"),
            Self::Harmonics { lmax } => format!("spherical_harmonics(l<={lmax})"),
        }
    }

    /// Integration rules that resolve products of two basis functions.
    pub fn rules(&self, item: &CatalogImmersion) -> Vec<AxisRule> {
        match self {
            Self::Hermite { .. } => item.rules.clone(),
            Self::Fourier { .. } => vec![AxisRule::new(48, 2)],
            Self::Harmonics { .. } => vec![AxisRule::new(32, 1), AxisRule::new(48, 2)],
        }
    }

    /// Scalar trial functions with exact derivatives.
    pub fn functions(&self, item: &CatalogImmersion) -> Result<Vec<TrialFn>> {
        let m = item.immersion.dim();
        let r = item.meta.parameters.get("r").copied().unwrap_or(1.0);
        match *self {
            Self::Hermite { degree } => Ok(HermiteIndex::up_to_degree(m, degree)
                .into_iter()
                .map(|idx| {
                    let norm = factorial_product(&idx).sqrt();
                    TrialFn::Chart(Arc::new(move |u: &[f64]| match hermite_jet(&idx, u) {
                        Ok((v, g, _)) => (v / norm, g.into_iter().map(|t| t / norm).collect()),
                        Err(_) => (f64::NAN, vec![f64::NAN; u.len()]),
                    }))
                })
                .collect()),
            Self::Fourier { kmax } => {
                if m != 1 {
                    return Err(Error::UnsupportedSpec("Fourier basis needs a circle".into()));
                }
                let mut out = Vec::new();
                for k in 0..=kmax {
                    for part in if k == 0 { vec![0] } else { vec![0, 1] } {
                        let c = if k == 0 { 1.0 } else { 2f64.sqrt() };
                        out.push(TrialFn::Ambient(Arc::new(move |x: &DVector<f64>| {
                            let (val, da, db) = complex_power_jet(x[0] / r, x[1] / r, k, part);
                            let mut g = DVector::zeros(x.len());
                            g[0] = c * da / r;
                            g[1] = c * db / r;
                            (c * val, g)
                        })));
                    }
                }
                Ok(out)
            }
            Self::Harmonics { lmax } => {
                if m != 2 {
                    return Err(Error::UnsupportedSpec("spherical harmonics need a 2-sphere".into()));
                }
                let mut out = Vec::new();
                for l in 0..=lmax {
                    for order in 0..=l {
                        for part in if order == 0 { vec![0] } else { vec![0, 1] } {
                            out.push(TrialFn::Ambient(Arc::new(move |x: &DVector<f64>| {
                                let (v, g) = real_harmonic_jet(l, order, part, [x[0] / r, x[1] / r, x[2] / r]);
                                let mut grad = DVector::zeros(x.len());
                                for i in 0..3 {
                                    grad[i] = g[i] / r;
                                }
                                (v, grad)
                            })));
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// A trial function with its gradient, given in chart coordinates or as a
/// function of the ambient position.
#[derive(Clone)]
pub enum TrialFn {
    Chart(Arc<dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync>),
    Ambient(Arc<dyn Fn(&DVector<f64>) -> (f64, DVector<f64>) + Send + Sync>),
}

impl TrialFn {
    /// Value and chart partials at a jet.
    pub fn eval(&self, u: &[f64], jet: &GeometryJet) -> (f64, Vec<f64>) {
        match self {
            Self::Chart(f) => f(u),
            Self::Ambient(f) => {
                let (v, g) = f(&jet.x);
                let d = jet.tangent.transpose() * g;
                (v, d.iter().copied().collect())
            }
        }
    }

    /// Value only, as a chart function.
    pub fn scalar(&self, imm: &ParametricImmersion) -> ScalarFn {
        match self.clone() {
            Self::Chart(f) => Arc::new(move |u: &[f64]| f(u).0),
            Self::Ambient(f) => {
                let pos = imm.position_fn();
                Arc::new(move |u: &[f64]| f(&pos(u)).0)
            }
        }
    }
}

/// Re or Im of (a + ib)^k with its partials in a and b.
fn complex_power_jet(a: f64, b: f64, k: usize, part: usize) -> (f64, f64, f64) {
    let (re, im) = complex_power(a, b, k);
    if k == 0 {
        return (if part == 0 { re } else { im }, 0.0, 0.0);
    }
    let (pre, pim) = complex_power(a, b, k - 1);
    let kf = k as f64;
    // d/da = k z^{k−1}, d/db = i k z^{k−1}
    if part == 0 {
        (re, kf * pre, -kf * pim)
    } else {
        (im, kf * pim, kf * pre)
    }
}

/// Re and Im of (a + ib)^k.
fn complex_power(a: f64, b: f64, k: usize) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..k {
        let t = re * a - im * b;
        im = re * b + im * a;
        re = t;
    }
    (re, im)
}

/// Real spherical harmonic with unit L²(S²) norm in polynomial form
/// P_l^m(z)/(1−z²)^{m/2} · Re/Im (n₁ + i n₂)^m with z = n₀, together with
/// its gradient as a polynomial on ℝ³.
pub fn real_harmonic_jet(l: usize, order: usize, part: usize, n: [f64; 3]) -> (f64, [f64; 3]) {
    let z = n[0];
    // reduced associated Legendre and its z-derivative, upward in l
    let mut pmm = 1.0;
    for k in 1..=order {
        pmm *= (2 * k - 1) as f64;
    }
    let (p, dp) = if l == order {
        (pmm, 0.0)
    } else {
        let c = (2 * order + 1) as f64;
        let (mut prev, mut dprev) = (pmm, 0.0);
        let (mut cur, mut dcur) = (z * c * pmm, c * pmm);
        for ll in order + 2..=l {
            let a = (2 * ll - 1) as f64;
            let b = (ll + order - 1) as f64;
            let den = (ll - order) as f64;
            let next = (a * z * cur - b * prev) / den;
            let dnext = (a * (cur + z * dcur) - b * dprev) / den;
            prev = cur;
            dprev = dcur;
            cur = next;
            dcur = dnext;
        }
        (cur, dcur)
    };
    let ratio: f64 = ((l - order + 1)..=(l + order)).map(|k| k as f64).product();
    let mut norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) / ratio).sqrt();
    if order > 0 {
        norm *= 2f64.sqrt();
    }
    let (w, da, db) = complex_power_jet(n[1], n[2], order, part);
    (norm * p * w, [norm * dp * w, norm * p * da, norm * p * db])
}

/// Weighted Galerkin setup for one of the stability operators.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub item: CatalogImmersion,
    pub mode: OperatorMode,
    pub basis: BasisKind,
    /// Deflate the parallel normal directions (or constants for scalar modes).
    pub vp: bool,
    /// Subset of frame directions for bundle modes; all when `None`.
    pub directions: Option<Vec<usize>>,
}

impl SpectralProblem {
    pub fn new(item: CatalogImmersion, mode: OperatorMode, vp: bool) -> Result<Self> {
        let basis = BasisKind::default_for(&item)?;
        Ok(Self { item, mode, basis, vp, directions: None })
    }

    pub fn with_basis(mut self, basis: BasisKind) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_directions(mut self, dirs: Vec<usize>) -> Self {
        self.directions = Some(dirs);
        self
    }

    fn frame(&self) -> Vec<VecFn> {
        let all = self.item.frame_fields();
        match &self.directions {
            Some(d) => d.iter().map(|&i| all[i].clone()).collect(),
            None => all,
        }
    }

    pub fn grid(&self) -> Result<QuadratureGrid> {
        let c = self.item.immersion.chart();
        QuadratureGrid::on_box(&c.lower, &c.upper, &self.basis.rules(&self.item))
    }
}

/// Assembled matrices; `constraints` holds ∫⟨b_a, e_β⟩e^{−f} row-wise per β.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub gram: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub constraints: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Spectrum {
    pub basis: String,
    pub mode: OperatorMode,
    pub size: usize,
    pub vp: bool,
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    pub max_residual: f64,
    pub gram_condition: f64,
    pub stiffness_asymmetry: f64,
}

/// Assembles G, K and the VP constraint rows.
pub fn assemble(problem: &SpectralProblem) -> Result<Assembly> {
    let item = &problem.item;
    let imm = &item.immersion;
    let m = imm.dim();
    let n = imm.ambient_dim();
    let policy = imm.policy();
    let funcs = problem.basis.functions(item)?;
    let bundle = problem.mode.is_bundle();
    let frame = if bundle { problem.frame() } else { Vec::new() };
    if bundle && frame.is_empty() {
        return Err(Error::NoParallelFrame("bundle spectrum needs at least one normal direction".into()));
    }
    let (d, k) = if bundle { (n, frame.len()) } else { (1, 1) };
    let nt = funcs.len() * k;
    let shift = match problem.mode {
        OperatorMode::Bundle | OperatorMode::Scalar => 1.0,
        _ => 0.0,
    };
    let second_order = problem.mode == OperatorMode::Bundle;
    let xi = item.xi.clone();
    let grid = problem.grid()?;
    let idx: Vec<usize> = (0..grid.len()).collect();
    let partials: Vec<Result<Assembly>> = idx
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = Assembly {
                gram: DMatrix::zeros(nt, nt),
                stiffness: DMatrix::zeros(nt, nt),
                constraints: DMatrix::zeros(k, nt),
            };
            for &q in chunk {
                let u = &grid.nodes[q];
                let jet = GeometryJet::at(imm, u)?;
                let z = xi(u);
                let wq = grid.weights[q] * jet.volume_density * (-0.5 * (&jet.x - &z).norm_squared()).exp();
                let (vals, grads): (Vec<f64>, Vec<Vec<f64>>) = funcs.iter().map(|f| f.eval(u, &jet)).unzip();
                // frame values and covariant derivatives
                let (fv, fd_): (Vec<DVector<f64>>, Vec<Vec<DVector<f64>>>) = if bundle {
                    frame
                        .iter()
                        .map(|e| {
                            let g = fd::gradient(e.as_ref(), u, policy.first);
                            (e(u), jet.normal_derivatives(&g))
                        })
                        .unzip()
                } else {
                    (vec![DVector::from_element(1, 1.0)], vec![vec![DVector::zeros(1); m]])
                };
                let mut v = DMatrix::zeros(nt, d);
                let mut dd: Vec<DMatrix<f64>> = vec![DMatrix::zeros(nt, d); m];
                for (a, (phi, dphi)) in vals.iter().zip(&grads).enumerate() {
                    for b in 0..k {
                        let t = a * k + b;
                        v.row_mut(t).copy_from(&(&fv[b] * *phi).transpose());
                        for i in 0..m {
                            let di = &fv[b] * dphi[i] + &fd_[b][i] * *phi;
                            dd[i].row_mut(t).copy_from(&di.transpose());
                        }
                    }
                }
                let vvt = &v * v.transpose();
                acc.gram += &vvt * wq;
                let mut stiff = -vvt * shift;
                for i in 0..m {
                    for j in 0..m {
                        let gij = jet.metric_inv[(i, j)];
                        if gij != 0.0 {
                            stiff += &dd[i] * dd[j].transpose() * gij;
                        }
                    }
                }
                if second_order {
                    let s = sff_matrix(&jet);
                    stiff -= &v * s * v.transpose();
                }
                acc.stiffness += stiff * wq;
                let f = DMatrix::from_fn(k, d, |r, c| fv[r][c]);
                acc.constraints += f * v.transpose() * wq;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Assembly {
        gram: DMatrix::zeros(nt, nt),
        stiffness: DMatrix::zeros(nt, nt),
        constraints: DMatrix::zeros(k, nt),
    };
    for p in partials {
        let p = p?;
        total.gram += p.gram;
        total.stiffness += p.stiffness;
        total.constraints += p.constraints;
    }
    if total.gram.iter().any(|v| !v.is_finite()) || total.stiffness.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Galerkin assembly"));
    }
    Ok(total)
}

/// S with ⟨Sa, b⟩ = Σ g^{ik}g^{jl}⟨h_ij,a⟩⟨h_kl,b⟩.
pub fn sff_matrix(jet: &GeometryJet) -> DMatrix<f64> {
    let n = jet.ambient_dim();
    let mut s = DMatrix::zeros(n, n);
    for c in 0..n {
        let mut e = DVector::zeros(n);
        e[c] = 1.0;
        s.set_column(c, &jet.sff_contract(&e));
    }
    s
}

/// Orthonormal basis of the null space of the constraint rows.
pub fn constraint_null_space(c: &DMatrix<f64>) -> DMatrix<f64> {
    let nt = c.ncols();
    let cct = c * c.transpose();
    let scale = cct.diagonal().max().max(f64::MIN_POSITIVE);
    // drop dependent constraint rows through a pseudo-inverse
    let eig = SymmetricEigen::new(cct);
    let mut proj = DMatrix::zeros(nt, nt);
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam > 1e-12 * scale {
            let w = c.transpose() * eig.eigenvectors.column(i) / lam.sqrt();
            proj += &w * w.transpose();
        }
    }
    let keep = DMatrix::identity(nt, nt) - proj;
    let e = SymmetricEigen::new(keep);
    let cols: Vec<DVector<f64>> = e
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.5)
        .map(|(i, _)| e.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Ascending eigenpairs of K y = λ G y, with the scaled Gram condition number.
pub fn solve_generalized(k: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, f64)> {
    let n = g.nrows();
    let dscale = DVector::from_iterator(n, g.diagonal().iter().map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt()));
    let ds = DMatrix::from_diagonal(&dscale);
    let gs = &ds * g * &ds;
    let ks = &ds * k * &ds;
    let ge = SymmetricEigen::new(gs.clone()).eigenvalues;
    let (lo, hi) = (ge.min(), ge.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditionedBasis { condition });
    }
    let chol = gs.cholesky().ok_or(Error::IllConditionedBasis { condition })?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or(Error::IllConditionedBasis { condition })?;
    let c = &linv * ks * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let back = &ds * linv.transpose();
    let vecs = DMatrix::from_columns(&order.iter().map(|&i| &back * eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok((values, vecs, condition))
}

/// Assembles and solves the problem, deflating VP directions first when asked.
pub fn galerkin_spectrum(problem: &SpectralProblem) -> Result<Spectrum> {
    let asm = assemble(problem)?;
    let asym = (&asm.stiffness - asm.stiffness.transpose()).amax();
    let (k, g) = if problem.vp {
        let z = constraint_null_space(&asm.constraints);
        (z.transpose() * &asm.stiffness * &z, z.transpose() * &asm.gram * &z)
    } else {
        (asm.stiffness.clone(), asm.gram.clone())
    };
    let k = (&k + k.transpose()) * 0.5;
    let (values, vecs, condition) = solve_generalized(&k, &g)?;
    let mut max_residual: f64 = 0.0;
    for (i, lam) in values.iter().enumerate() {
        let y = vecs.column(i);
        let r = (&k * y - &g * y * *lam).amax() / y.norm();
        max_residual = max_residual.max(r);
    }
    Ok(Spectrum {
        basis: problem.basis.describe(),
        mode: problem.mode,
        size: values.len(),
        vp: problem.vp,
        index: values.iter().filter(|v| **v < -NEG_TOL).count(),
        eigenvalues: values,
        max_residual,
        gram_condition: condition,
        stiffness_asymmetry: asym,
    })
}

/// CSV table "band,k,multiplicity,value" of a computed spectrum, grouping
/// numerically equal eigenvalues.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("band,k,multiplicity,value\n");
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &v in &s.eigenvalues {
        match groups.last_mut() {
            Some((g, c)) if (v - *g).abs() <= 1e-7 * (1.0 + g.abs()) => *c += 1,
            _ => groups.push((v, 1)),
        }
    }
    for (k, (v, c)) in groups.iter().enumerate() {
        out.push_str(&format!("galerkin,{k},{c},{v:.17e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_plane, make_sphere};

    fn close(vals: &[f64], want: &[f64], tol: f64) {
        for (v, w) in vals.iter().zip(want) {
            assert!((v - w).abs() < tol, "{v} vs {w}");
        }
    }

    #[test]
    fn harmonic_gradients_match_fd() {
        let n = [0.3, -0.5, 0.2];
        for (l, o, part) in [(3usize, 1usize, 0usize), (4, 2, 1), (5, 0, 0), (2, 2, 0)] {
            let (_, g) = real_harmonic_jet(l, o, part, n);
            for i in 0..3 {
                let f = |t: f64| {
                    let mut p = n;
                    p[i] += t;
                    real_harmonic_jet(l, o, part, p).0
                };
                let h = 1e-5;
                let d = (f(h) - f(-h)) / (2.0 * h);
                assert!((d - g[i]).abs() < 1e-7, "{l} {o} {part} {i}");
            }
        }
    }

    #[test]
    fn line_ou_spectrum() {
        let p = make_plane(1, 1, &[0.0, 0.0]).unwrap();
        let prob = SpectralProblem::new(p, OperatorMode::Scalar, false).unwrap().with_basis(BasisKind::Hermite { degree: 5 });
        let s = galerkin_spectrum(&prob).unwrap();
        close(&s.eigenvalues, &[-1.0, 0.0, 1.0, 2.0, 3.0, 4.0], 1e-6);
        assert_eq!(s.index, 1);
        assert!(s.max_residual < 1e-7);
    }

    #[test]
    fn circle_laplacian_spectrum() {
        let r = 1.3;
        let c = make_sphere(1, r, 1).unwrap();
        let prob = SpectralProblem::new(c, OperatorMode::Scalar, false).unwrap().with_basis(BasisKind::Fourier { kmax: 6 });
        let s = galerkin_spectrum(&prob).unwrap();
        let mut want = vec![-1.0];
        for k in 1..=6 {
            let v = (k * k) as f64 / (r * r) - 1.0;
            want.push(v);
            want.push(v);
        }
        close(&s.eigenvalues, &want, 1e-8);
    }

    #[test]
    fn radial_vp_problem_on_unit_circle() {
        let c = make_sphere(1, 1.0, 1).unwrap();
        let prob = SpectralProblem::new(c, OperatorMode::Bundle, true).unwrap().with_directions(vec![0]);
        let s = galerkin_spectrum(&prob).unwrap();
        close(&s.eigenvalues[..2], &[-1.0, -1.0], 1e-8);
        assert!(s.eigenvalues[2] > -1e-8);
    }

    #[test]
    fn two_sphere_harmonics_are_orthonormal() {
        let s = make_sphere(2, 1.0, 1).unwrap();
        let prob = SpectralProblem::new(s, OperatorMode::ScalarDrift, false).unwrap().with_basis(BasisKind::Harmonics { lmax: 4 });
        let asm = assemble(&prob).unwrap();
        // f = ½|x − ξ|² is constant on the sphere
        let g = &asm.gram / asm.gram[(0, 0)];
        assert!((g - DMatrix::identity(25, 25)).amax() < 1e-10);
        let sp = galerkin_spectrum(&prob).unwrap();
        // −Δ on S²: l(l+1) with multiplicity 2l+1
        let mut want = Vec::new();
        for l in 0..=4usize {
            want.extend(std::iter::repeat_n((l * (l + 1)) as f64, 2 * l + 1));
        }
        close(&sp.eigenvalues, &want, 1e-8);
    }
}
