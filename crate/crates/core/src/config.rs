//! Run configuration. Values come from built-in defaults, then an optional
//! TOML file, then command-line flags, each layer overriding the previous.
//!
//! File layout (every key optional):
//!
//! ```toml
//! seed = 20240601
//! reproducible = true
//!
//! [example]
//! family = "sphere"   # plane | sphere | cylinder | torus | sphere_x_sphere |
//!                     # great_sphere | small_sphere | clifford_torus |
//!                     # off_center_sphere | ellipse
//! m = 2
//! p = 1
//! r = 1.5
//!
//! [grid]
//! verification_nodes = 24
//! random_fields = 3
//!
//! [tolerances]
//! xi_residual = 1e-8
//!
//! [output]
//! report = "report.json"
//! csv = "table.csv"
//! ```

use crate::catalog::{
    ellipse, make_plane, make_product, make_sphere, make_spherical, off_center_sphere, CatalogImmersion, SphericalSpec,
    POLAR_COLLAR, VERIFICATION_NODES,
};
use crate::error::{Error, Result};
use crate::immersion::ParametricImmersion;
use crate::quadrature::QuadratureGrid;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Upper bound on nodes per axis of verification grids.
pub const MAX_VERIFICATION_NODES: usize = 64;
/// Upper bound on random fields drawn by `variation`.
pub const MAX_RANDOM_FIELDS: usize = 100;
pub const DEFAULT_SEED: u64 = 20240601;

/// Check thresholds. Defaults are the acceptance values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// sup |D⊥(H + x⊥)|.
    pub xi_residual: f64,
    /// Normalized gap of the Gaussian-metric parallelism identity.
    pub parallelism: f64,
    /// |first variation| relative to the functional value.
    pub critical: f64,
    /// |analytic − fd| / max(1, |fd|) for first variations.
    pub first_variation_fd: f64,
    /// Relative gap between analytic and fd second variations.
    pub second_variation_fd: f64,
    /// Relative gap of the radial sphere anchor.
    pub sphere_anchor: f64,
    /// Pointwise and integrated operator identities.
    pub identity: f64,
    /// Relative defect of the Hermite eigen-equation.
    pub hermite_eigen: f64,
    pub hermite_orthogonality: f64,
    /// Eigenvalue error of reference Galerkin spectra.
    pub spectrum: f64,
    /// Allowed negative part of Q/‖η‖² after VP projection.
    pub w_stability: f64,
    /// Rayleigh residual |Kv − λGv|∞ / |v|.
    pub rayleigh: f64,
    /// First-integral drift of ξ-curves.
    pub curve_drift: f64,
    /// Closure gap of closed orbits.
    pub closure: f64,
    /// xi_residual of sampled ξ-curve trajectories.
    pub trajectory: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            xi_residual: 1e-8,
            parallelism: 1e-5,
            critical: 1e-8,
            first_variation_fd: 1e-5,
            second_variation_fd: 1e-4,
            sphere_anchor: 1e-6,
            identity: 1e-6,
            hermite_eigen: 1e-9,
            hermite_orthogonality: 1e-8,
            spectrum: 1e-6,
            w_stability: 1e-8,
            rayleigh: 1e-7,
            curve_drift: 1e-8,
            closure: 1e-8,
            trajectory: 1e-6,
        }
    }
}

impl Tolerances {
    /// Sets one tolerance by its key name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let mut map = match serde_json::to_value(*self) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => unreachable!("tolerances serialize to an object"),
        };
        if !map.contains_key(key) {
            let known: Vec<&String> = map.keys().collect();
            return Err(Error::InvalidParameter(format!("unknown tolerance '{key}'; known: {known:?}")));
        }
        map.insert(key.to_string(), serde_json::json!(value));
        let next: Self = serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(self) {
            for (k, v) in map {
                match v.as_f64() {
                    Some(x) if x > 0.0 && x.is_finite() => {}
                    _ => return Err(Error::InvalidParameter(format!("tolerance '{k}' must be positive and finite"))),
                }
            }
        }
        Ok(())
    }
}

/// Family name plus parameters; unused parameters are ignored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleSelector {
    pub family: Option<String>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub r: Option<f64>,
    /// Second radius (torus, sphere_x_sphere) or ellipse semi-axis b.
    pub r2: Option<f64>,
    /// Ambient sphere radius (great/small sphere, Clifford torus) or ellipse semi-axis a.
    pub a: Option<f64>,
    pub height: Option<f64>,
    /// Normal offset of a plane, length m + p.
    pub offset: Option<Vec<f64>>,
    /// Center of an off-center sphere, length m + 1.
    pub center: Option<Vec<f64>>,
}

/// A constructed example: a catalog item, or a bare immersion used as a
/// negative control.
#[derive(Clone)]
pub enum Example {
    Catalog(Box<CatalogImmersion>),
    Bare { name: String, immersion: ParametricImmersion },
}

impl Example {
    pub fn name(&self) -> String {
        match self {
            Self::Catalog(c) => c.name(),
            Self::Bare { name, .. } => name.clone(),
        }
    }

    pub fn immersion(&self) -> &ParametricImmersion {
        match self {
            Self::Catalog(c) => &c.immersion,
            Self::Bare { immersion, .. } => immersion,
        }
    }

    pub fn catalog(&self) -> Option<&CatalogImmersion> {
        match self {
            Self::Catalog(c) => Some(c),
            Self::Bare { .. } => None,
        }
    }

    /// Uniform verification grid; bare spheres get the polar collar.
    pub fn verification_grid(&self, per_axis: usize) -> Result<QuadratureGrid> {
        match self {
            Self::Catalog(c) => c.verification_grid_with(per_axis),
            Self::Bare { immersion, .. } => {
                let mut chart = immersion.chart().clone();
                for axis in 0..immersion.dim().saturating_sub(1) {
                    chart = chart.collared(axis, POLAR_COLLAR);
                }
                QuadratureGrid::uniform(&chart, per_axis)
            }
        }
    }
}

impl ExampleSelector {
    pub fn family(family: &str) -> Self {
        Self { family: Some(family.into()), ..Self::default() }
    }

    /// Fields of `other` that are set replace ours.
    pub fn overlay(&mut self, other: &ExampleSelector) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(family, m, p, r, r2, a, height, offset, center);
    }

    pub fn build(&self) -> Result<Example> {
        let family = self.family.as_deref().ok_or_else(|| Error::InvalidParameter("no example family given".into()))?;
        let m = self.m.unwrap_or(2);
        let p = self.p.unwrap_or(1);
        let r = self.r.unwrap_or(1.0);
        let cat = |c: CatalogImmersion| Ok(Example::Catalog(Box::new(c)));
        match family {
            "plane" => {
                let offset = self.offset.clone().unwrap_or_else(|| vec![0.0; m + p]);
                cat(make_plane(m, p, &offset)?)
            }
            "sphere" => cat(make_sphere(m, r, p)?),
            "cylinder" => {
                let line = make_plane(1, 0, &[0.0])?;
                cat(make_product(&make_sphere(1, r, 1)?, &line))
            }
            "torus" => cat(make_product(&make_sphere(1, r, 1)?, &make_sphere(1, self.r2.unwrap_or(r), 1)?)),
            "sphere_x_sphere" => cat(make_product(&make_sphere(1, r, 1)?, &make_sphere(2, self.r2.unwrap_or(1.2), 1)?)),
            "great_sphere" => cat(make_spherical(SphericalSpec::GreatSphere { m, a: self.a.unwrap_or(1.5) })?),
            "small_sphere" => cat(make_spherical(SphericalSpec::SmallSphere {
                m,
                a: self.a.unwrap_or(1.3),
                height: self.height.unwrap_or(0.6),
            })?),
            "clifford_torus" => cat(make_spherical(SphericalSpec::CliffordTorus { a: self.a.unwrap_or(2.0) })?),
            "off_center_sphere" => {
                let center = self.center.clone().unwrap_or_else(|| {
                    let mut c = vec![0.0; m + 1];
                    c[0] = 0.5;
                    c
                });
                if center.len() != m + 1 {
                    return Err(Error::InvalidParameter(format!("center must have length m+1 = {}", m + 1)));
                }
                Ok(Example::Bare { name: format!("off_center_sphere(m={m},r={r},center={center:?})"), immersion: off_center_sphere(m, r, &center)? })
            }
            "ellipse" => {
                let (a, b) = (self.a.unwrap_or(2.0), self.r2.unwrap_or(1.0));
                Ok(Example::Bare { name: format!("ellipse(a={a},b={b})"), immersion: ellipse(a, b)? })
            }
            other => Err(Error::UnsupportedSpec(format!("unknown example family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub verification_nodes: Option<usize>,
    pub random_fields: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    /// JSON report destination; stdout when absent.
    pub report: Option<PathBuf>,
    /// CSV table destination for `curve`, `spectrum` and `index`; stdout when absent.
    pub csv: Option<PathBuf>,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub reproducible: Option<bool>,
    pub example: ExampleSelector,
    pub grid: GridSettings,
    pub tolerances: Option<Tolerances>,
    pub output: OutputPaths,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Everything one command needs, after layering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub example: ExampleSelector,
    pub verification_nodes: usize,
    pub random_fields: usize,
    pub tolerances: Tolerances,
    pub output: OutputPaths,
    pub reproducible: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn defaults(command: &str) -> Self {
        Self {
            command: command.into(),
            example: ExampleSelector::default(),
            verification_nodes: VERIFICATION_NODES,
            random_fields: 3,
            tolerances: Tolerances::default(),
            output: OutputPaths::default(),
            reproducible: false,
            seed: DEFAULT_SEED,
        }
    }

    /// Applies a configuration file on top of the current values.
    pub fn apply_file(&mut self, file: &ConfigFile) {
        self.example.overlay(&file.example);
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(r) = file.reproducible {
            self.reproducible = r;
        }
        if let Some(n) = file.grid.verification_nodes {
            self.verification_nodes = n;
        }
        if let Some(n) = file.grid.random_fields {
            self.random_fields = n;
        }
        if let Some(t) = file.tolerances {
            self.tolerances = t;
        }
        if file.output.report.is_some() {
            self.output.report = file.output.report.clone();
        }
        if file.output.csv.is_some() {
            self.output.csv = file.output.csv.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if !(2..=MAX_VERIFICATION_NODES).contains(&self.verification_nodes) {
            return Err(Error::InvalidParameter(format!(
                "verification_nodes must lie in [2, {MAX_VERIFICATION_NODES}], got {}",
                self.verification_nodes
            )));
        }
        if !(1..=MAX_RANDOM_FIELDS).contains(&self.random_fields) {
            return Err(Error::InvalidParameter(format!("random_fields must lie in [1, {MAX_RANDOM_FIELDS}], got {}", self.random_fields)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_order() {
        let file = ConfigFile::parse(
            "seed = 5\n[example]\nfamily = \"sphere\"\nm = 1\nr = 2.0\n[grid]\nverification_nodes = 10\n[tolerances]\nxi_residual = 1e-9\n",
        )
        .unwrap();
        let mut cfg = RunConfig::defaults("check");
        cfg.apply_file(&file);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.verification_nodes, 10);
        assert_eq!(cfg.tolerances.xi_residual, 1e-9);
        // unspecified tolerances keep their defaults
        assert_eq!(cfg.tolerances.parallelism, 1e-5);
        // a flag-level selector wins over the file
        cfg.example.overlay(&ExampleSelector { r: Some(1.5), ..Default::default() });
        assert_eq!(cfg.example.r, Some(1.5));
        assert_eq!(cfg.example.m, Some(1));
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        let mut t = Tolerances::default();
        assert!(t.set("xi_residual", -1.0).is_err());
        assert!(t.set("nope", 1.0).is_err());
        t.set("closure", 1e-7).unwrap();
        assert_eq!(t.closure, 1e-7);
        let mut cfg = RunConfig::defaults("check");
        cfg.verification_nodes = 1000;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn selectors_build() {
        assert!(ExampleSelector::family("off_center_sphere").build().unwrap().catalog().is_none());
        let e = ExampleSelector { family: Some("plane".into()), m: Some(1), p: Some(1), ..Default::default() }.build().unwrap();
        assert_eq!(e.immersion().ambient_dim(), 2);
        assert!(ExampleSelector::family("klein_bottle").build().is_err());
    }
}
