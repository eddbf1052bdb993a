//! Property tests for invariants that hold for every admissible input.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use xisub::catalog::{make_plane, make_product, make_sphere};
use xisub::config::Tolerances;
use xisub::curves::{integrate_self_shrinker_curve, integrate_xi_curve, summarize, StepPolicy};
use xisub::geometry::{geometry_jet, weingarten_map};
use xisub::report::format_f64_17;
use xisub::stability::index::sphere_index;
use xisub::xi::xi_vector;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

/// Orthogonal matrix from the QR factor of an arbitrary square matrix.
fn orthogonal(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| entries[i * n + j] + if i == j { 2.0 } else { 0.0 });
    a.qr().q()
}

/// Interior point of the chart box, staying clear of polar collars.
fn interior(lower: &[f64], upper: &[f64], t: &[f64]) -> Vec<f64> {
    lower.iter().zip(upper).zip(t).map(|((a, b), s)| a + (b - a) * (0.1 + 0.8 * s)).collect()
}

fn harmonic_dim(m: usize, k: usize) -> usize {
    let c = |n: usize, r: usize| -> usize {
        if r > n {
            0
        } else {
            (1..=r).map(|i| (n - r + i) as f64 / i as f64).product::<f64>().round() as usize
        }
    };
    c(m + k, m) - if k >= 2 { c(m + k - 2, m) } else { 0 }
}

/// Counts negative eigenvalues band by band directly from the closed form.
fn index_oracle(m: usize, p: usize, r: f64, vp: bool) -> usize {
    let (mf, r2) = (m as f64, r * r);
    let mut count = 0;
    for k in usize::from(vp)..200 {
        let kk = (k * (m + k - 1)) as f64 / r2;
        let radial = kk - 1.0 - mf / r2;
        let transverse = kk - 1.0;
        let h = harmonic_dim(m, k);
        if radial < -1e-8 {
            count += h;
        }
        if transverse < -1e-8 {
            count += h * (p - 1);
        }
        if radial >= 0.0 && transverse >= 0.0 {
            break;
        }
    }
    count
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn report_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_f64_17(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn sphere_index_matches_band_count(m in 1usize..5, p in 1usize..4, r in 0.2f64..4.0, vp in any::<bool>()) {
        let s = sphere_index(m, p, r, vp).unwrap();
        prop_assert_eq!(s.index, index_oracle(m, p, r, vp));
    }

    #[test]
    fn sphere_index_grows_with_radius(m in 1usize..4, p in 1usize..3, r in 0.2f64..3.0, dr in 0.0f64..2.0) {
        let small = sphere_index(m, p, r, true).unwrap().index;
        let large = sphere_index(m, p, r + dr, true).unwrap().index;
        prop_assert!(large >= small);
        prop_assert!(small > m);
    }

    #[test]
    fn xi_vector_is_rotation_equivariant(
        r in 0.5f64..3.0,
        entries in prop::collection::vec(-1.0f64..1.0, 16),
        t in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let item = make_sphere(2, r, 2).unwrap();
        let q = orthogonal(4, &entries);
        let rotated = item.immersion.transformed(q.clone(), DVector::zeros(4));
        let c = item.immersion.chart();
        let u = interior(&c.lower, &c.upper, &t);
        let xi = xi_vector(&geometry_jet(&item.immersion, &u).unwrap());
        let xi_rot = xi_vector(&geometry_jet(&rotated, &u).unwrap());
        prop_assert!((&q * xi - xi_rot).norm() < 1e-9 * (1.0 + r));
    }

    #[test]
    fn projections_split_vectors(
        r in 0.5f64..3.0,
        v in prop::collection::vec(-2.0f64..2.0, 4),
        t in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let item = make_product(&make_sphere(1, r, 1).unwrap(), &make_sphere(1, 1.0, 1).unwrap());
        let c = item.immersion.chart();
        let jet = geometry_jet(&item.immersion, &interior(&c.lower, &c.upper, &t)).unwrap();
        let v = DVector::from_vec(v);
        let (n, tn) = (jet.normal_part(&v), jet.tangent_part(&v));
        prop_assert!((&n + &tn - &v).norm() < 1e-12);
        prop_assert!((jet.normal_part(&n) - &n).norm() < 1e-12);
        prop_assert!((jet.tangent.transpose() * &n).norm() < 1e-10);
    }

    #[test]
    fn weingarten_map_is_self_adjoint(
        r in 0.5f64..3.0,
        w in prop::collection::vec(-1.0f64..1.0, 4),
        t in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let item = make_product(&make_sphere(1, r, 1).unwrap(), &make_sphere(1, 2.0, 1).unwrap());
        let c = item.immersion.chart();
        let jet = geometry_jet(&item.immersion, &interior(&c.lower, &c.upper, &t)).unwrap();
        let n = jet.normal_part(&DVector::from_vec(w));
        prop_assume!(n.norm() > 1e-3);
        let a = weingarten_map(&jet, &n).unwrap();
        let ga = &jet.metric * a;
        prop_assert!((&ga - ga.transpose()).norm() < 1e-9);
    }

    #[test]
    fn planes_have_vanishing_second_fundamental_form(
        offset in prop::collection::vec(-3.0f64..3.0, 2),
        t in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let plane = make_plane(2, 2, &[0.0, 0.0, offset[0], offset[1]]).unwrap();
        let c = plane.immersion.chart();
        let jet = geometry_jet(&plane.immersion, &interior(&c.lower, &c.upper, &t)).unwrap();
        prop_assert!(jet.sff.iter().all(|h| h.norm() < 1e-10));
        prop_assert!((xi_vector(&jet) - jet.x_nor.clone()).norm() < 1e-10);
    }

    #[test]
    fn xi_curves_conserve_the_first_integral(
        c in prop_oneof![-1.0f64..-0.05, 0.05f64..1.0],
        x in prop::collection::vec(-1.0f64..1.0, 2),
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let run = integrate_xi_curve([x[0], x[1]], theta, c, 10.0, &StepPolicy::default());
        prop_assume!(run.is_ok());
        prop_assert!(summarize(&run.unwrap()).first_integral_drift < 1e-8);
    }

    #[test]
    fn shrinker_circles_stay_on_the_unit_circle(phi in 0.0f64..std::f64::consts::TAU) {
        let x0 = [phi.cos(), phi.sin()];
        let poly = integrate_self_shrinker_curve(x0, phi + std::f64::consts::FRAC_PI_2, 7.0, &StepPolicy::default()).unwrap();
        let (lo, hi) = poly.radius_range();
        prop_assert!((lo - 1.0).abs() < 1e-7 && (hi - 1.0).abs() < 1e-7);
    }

    #[test]
    fn tolerances_reject_non_positive_values(v in -1.0f64..=0.0) {
        let mut t = Tolerances::default();
        prop_assert!(t.set("xi_residual", v).is_err());
        prop_assert!(t.set("xi_residual", f64::NAN).is_err());
        prop_assert_eq!(t, Tolerances::default());
    }
}
