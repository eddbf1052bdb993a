//! Closed-form index of round spheres and its Galerkin cross-check.
//!
//! On S^m(r) the operator −L splits along the parallel normal frame
//! {x/r, e_{m+2}, …}: the radial band has eigenvalues
//! μ_k = k(m+k−1)/r² − 1 − m/r² and each of the p − 1 transverse bands has
//! ν_k = k(m+k−1)/r² − 1, both with the multiplicity of degree-k spherical
//! harmonics.

use crate::catalog::make_sphere;
use crate::error::{Error, Result};
use crate::stability::operator::OperatorMode;
use crate::stability::spectrum::{galerkin_spectrum, BasisKind, SpectralProblem, Spectrum, NEG_TOL};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Radial,
    Transverse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandEigenvalue {
    pub band: Band,
    pub k: usize,
    /// Harmonic multiplicity times the number of directions in the band.
    pub multiplicity: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereIndex {
    pub m: usize,
    pub p: usize,
    pub r: f64,
    pub vp: bool,
    pub index: usize,
    pub bands: Vec<BandEigenvalue>,
    /// Whether index = m + 1.
    pub minimal: bool,
    /// The stated criterion r² ≤ m for index = m + 1.
    pub stated_condition: bool,
    /// Whether the count agrees with that criterion.
    pub claim_holds: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the degree-k spherical harmonics on S^m.
pub fn harmonic_multiplicity(m: usize, k: usize) -> usize {
    let all = binomial(m + k, k);
    if k < 2 {
        all
    } else {
        all - binomial(m + k - 2, k - 2)
    }
}

/// Eigenvalue bands and index of −L on S^m(r) ⊂ ℝ^{m+p}. With `vp` the k = 0
/// modes (the parallel normal fields) are excluded.
pub fn sphere_index(m: usize, p: usize, r: f64, vp: bool) -> Result<SphereIndex> {
    if m == 0 || p == 0 || !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("sphere index needs m, p >= 1 and r > 0 (got m={m}, p={p}, r={r})")));
    }
    let mf = m as f64;
    let r2 = r * r;
    let lap = |k: usize| (k * (m + k - 1)) as f64 / r2;
    let mut bands = Vec::new();
    let start = usize::from(vp);
    let mut k = start;
    // both bands increase in k; list until everything is nonnegative
    loop {
        let mult = harmonic_multiplicity(m, k);
        let mu = lap(k) - 1.0 - mf / r2;
        let nu = lap(k) - 1.0;
        bands.push(BandEigenvalue { band: Band::Radial, k, multiplicity: mult, value: mu });
        if p > 1 {
            bands.push(BandEigenvalue { band: Band::Transverse, k, multiplicity: mult * (p - 1), value: nu });
        }
        if mu >= 0.0 && k >= start + 2 {
            break;
        }
        k += 1;
    }
    let index = bands.iter().filter(|b| b.value < -NEG_TOL).map(|b| b.multiplicity).sum();
    let minimal = index == m + 1;
    // relative slack so that r = √2 (r² = 2.0000000000000004) counts as r² = 2
    let stated_condition = r2 <= mf * (1.0 + 1e-12);
    Ok(SphereIndex { m, p, r, vp, index, bands, minimal, stated_condition, claim_holds: minimal == stated_condition })
}

/// CSV table "band,k,multiplicity,value".
pub fn sphere_index_csv(s: &SphereIndex) -> String {
    let mut out = String::from("band,k,multiplicity,value\n");
    for b in &s.bands {
        let name = match b.band {
            Band::Radial => "radial",
            Band::Transverse => "transverse",
        };
        out.push_str(&format!("{name},{},{},{:.17e}\n", b.k, b.multiplicity, b.value));
    }
    out
}

/// VP-restricted Galerkin spectrum of −L on S^m(r) ⊂ ℝ^{m+p}, m ∈ {1, 2}.
pub fn galerkin_sphere_spectrum(m: usize, p: usize, r: f64, vp: bool) -> Result<Spectrum> {
    let basis = match m {
        1 => BasisKind::Fourier { kmax: 12 },
        2 => BasisKind::Harmonics { lmax: 6 },
        _ => return Err(Error::UnsupportedSpec(format!("Galerkin sphere index needs m <= 2 (got {m})"))),
    };
    let item = make_sphere(m, r, p)?;
    let problem = SpectralProblem::new(item, OperatorMode::Bundle, vp)?.with_basis(basis);
    galerkin_spectrum(&problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        assert_eq!((0..5).map(|k| harmonic_multiplicity(1, k)).collect::<Vec<_>>(), vec![1, 2, 2, 2, 2]);
        assert_eq!((0..5).map(|k| harmonic_multiplicity(2, k)).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        assert_eq!(harmonic_multiplicity(3, 2), 9);
    }

    #[test]
    fn closed_form_examples() {
        let s = sphere_index(2, 1, 1.0, true).unwrap();
        assert_eq!(s.index, 3);
        assert!(s.claim_holds);
        let s = sphere_index(1, 1, 2.0, true).unwrap();
        assert_eq!(s.index, 4);
        // k = 2 radial eigenvalue is −1/4 with multiplicity 2
        let b = s.bands.iter().find(|b| b.band == Band::Radial && b.k == 2).unwrap();
        assert!((b.value + 0.25).abs() < 1e-15 && b.multiplicity == 2);
        // transverse k = 1 band (m/r² − 1) drives the count up once p ≥ 2
        assert_eq!(sphere_index(2, 2, 2.0, true).unwrap().index, 3 + 3);
        // without VP the k = 0 modes add 1 per direction
        assert_eq!(sphere_index(2, 2, 1.0, false).unwrap().index, 3 + 2);
    }

    #[test]
    fn codimension_one_threshold_is_m_plus_two() {
        // for p = 1 only the radial k = 2 band can add negative directions
        let s = sphere_index(2, 1, 2.0, true).unwrap();
        assert_eq!(s.index, 3);
        assert!(!s.claim_holds);
        assert_eq!(sphere_index(2, 1, 2.1, true).unwrap().index, 3 + 5);
    }

    #[test]
    fn galerkin_matches_closed_form_on_circles() {
        for (r, p) in [(1.0, 1), (2.0, 1), (1.0, 2), (2.0f64.sqrt(), 2)] {
            let s = galerkin_sphere_spectrum(1, p, r, true).unwrap();
            assert_eq!(s.index, sphere_index(1, p, r, true).unwrap().index, "r={r} p={p}");
        }
    }
}
