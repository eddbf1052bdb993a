//! Fourth-order central finite differences on chart coordinates.

use nalgebra::DVector;

/// Step policy for numerically differentiated jets.
///
/// The step along axis `i` is `base * (1 + |u_i|)`, with a separate base for
/// each derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffPolicy {
    pub first: f64,
    pub second: f64,
}

impl Default for DiffPolicy {
    fn default() -> Self {
        let eps = f64::EPSILON;
        Self {
            first: eps.powf(1.0 / 5.0),
            second: eps.powf(1.0 / 6.0),
        }
    }
}

impl DiffPolicy {
    pub fn uniform(base: f64) -> Self {
        Self { first: base, second: base }
    }

    #[inline]
    pub fn step(base: f64, ui: f64) -> f64 {
        base * (1.0 + ui.abs())
    }
}

fn shifted(u: &[f64], i: usize, d: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[i] += d;
    v
}

fn shifted2(u: &[f64], i: usize, di: f64, j: usize, dj: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[i] += di;
    v[j] += dj;
    v
}

const W1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// ∂_i F(u) for a vector-valued F.
pub fn partial<F>(f: &F, u: &[f64], i: usize, base: f64) -> DVector<f64>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    let h = DiffPolicy::step(base, u[i]);
    let mut acc: Option<DVector<f64>> = None;
    for (k, w) in W1 {
        let v = f(&shifted(u, i, k * h)) * w;
        acc = Some(match acc {
            None => v,
            Some(a) => a + v,
        });
    }
    acc.unwrap() / (12.0 * h)
}

/// All first partials of a vector-valued map.
pub fn gradient<F>(f: &F, u: &[f64], base: f64) -> Vec<DVector<f64>>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    (0..u.len()).map(|i| partial(f, u, i, base)).collect()
}

/// ∂_i∂_j F(u); `center` is F(u) when already known.
pub fn second_partial<F>(
    f: &F,
    u: &[f64],
    i: usize,
    j: usize,
    base: f64,
    center: &DVector<f64>,
) -> DVector<f64>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    if i == j {
        let h = DiffPolicy::step(base, u[i]);
        let s = (f(&shifted(u, i, h)) + f(&shifted(u, i, -h))) * 16.0
            - (f(&shifted(u, i, 2.0 * h)) + f(&shifted(u, i, -2.0 * h)))
            - center * 30.0;
        s / (12.0 * h * h)
    } else {
        let hi = DiffPolicy::step(base, u[i]);
        let hj = DiffPolicy::step(base, u[j]);
        let mut acc = DVector::zeros(center.len());
        for (a, wa) in W1 {
            for (b, wb) in W1 {
                acc += f(&shifted2(u, i, a * hi, j, b * hj)) * (wa * wb);
            }
        }
        acc / (144.0 * hi * hj)
    }
}

/// Full Hessian as a row-major `m*m` list (symmetric).
pub fn hessian<F>(f: &F, u: &[f64], base: f64, center: &DVector<f64>) -> Vec<DVector<f64>>
where
    F: Fn(&[f64]) -> DVector<f64> + ?Sized,
{
    let m = u.len();
    let mut out = vec![DVector::zeros(center.len()); m * m];
    for i in 0..m {
        for j in i..m {
            let d = second_partial(f, u, i, j, base, center);
            out[j * m + i] = d.clone();
            out[i * m + j] = d;
        }
    }
    out
}

/// Scalar convenience wrappers.
pub fn scalar_gradient<F>(f: &F, u: &[f64], base: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let g = |v: &[f64]| DVector::from_element(1, f(v));
    gradient(&g, u, base).into_iter().map(|d| d[0]).collect()
}

pub fn scalar_hessian<F>(f: &F, u: &[f64], base: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let g = |v: &[f64]| DVector::from_element(1, f(v));
    let c = g(u);
    hessian(&g, u, base, &c).into_iter().map(|d| d[0]).collect()
}

/// Value, first and second partials of a vector field at one point.
#[derive(Debug, Clone)]
pub struct FieldJet {
    pub value: DVector<f64>,
    pub d1: Vec<DVector<f64>>,
    pub d2: Vec<DVector<f64>>,
}

impl FieldJet {
    pub fn of<F>(f: &F, u: &[f64], policy: DiffPolicy) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + ?Sized,
    {
        let value = f(u);
        let d1 = gradient(f, u, policy.first);
        let d2 = hessian(f, u, policy.second, &value);
        Self { value, d1, d2 }
    }

    pub fn first_order<F>(f: &F, u: &[f64], policy: DiffPolicy) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + ?Sized,
    {
        let value = f(u);
        let d1 = gradient(f, u, policy.first);
        Self { value, d1, d2: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_exact_to_roundoff() {
        // quartic: 4th-order stencils are exact up to rounding
        let f = |u: &[f64]| DVector::from_vec(vec![u[0].powi(4) + u[0] * u[1] * u[1]]);
        let u = [0.7, -0.3];
        let p = DiffPolicy::default();
        let g = gradient(&f, &u, p.first);
        assert!((g[0][0] - (4.0 * 0.343 + 0.09)).abs() < 1e-10);
        assert!((g[1][0] - (2.0 * 0.7 * -0.3)).abs() < 1e-10);
        let c = f(&u);
        let h = hessian(&f, &u, p.second, &c);
        assert!((h[0][0] - 12.0 * 0.49).abs() < 1e-8);
        assert!((h[1][0] - 2.0 * -0.3).abs() < 1e-8);
        assert!((h[3][0] - 1.4).abs() < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let f = |u: &[f64]| (3.0 * u[0]).sin();
        let exact = 3.0 * (3.0_f64 * 0.4).cos();
        let e1 = (scalar_gradient(&f, &[0.4], 0.05)[0] - exact).abs();
        let e2 = (scalar_gradient(&f, &[0.4], 0.025)[0] - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }
}
