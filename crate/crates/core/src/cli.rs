//! Command-line front end. [`run`] parses argv, layers the configuration,
//! executes one command and returns the exit code with the report.
//!
//! Exit codes: 0 when every record passes, 1 when a check fails or a
//! computation errors (the error is recorded), 2 on usage errors.

use crate::acceptance::{self, variation_grid, SuiteOptions};
use crate::catalog::{catalog_listing, standard_catalog};
use crate::config::{ConfigFile, Example, ExampleSelector, RunConfig};
use crate::curves::{integrate_self_shrinker_curve, integrate_xi_curve, summarize, Polyline, StepPolicy};
use crate::error::{Error, Result};
use crate::fields::random_compact_normal_field;
use crate::functionals::{
    first_variation, first_variation_fd, refined_volumes, second_variation, second_variation_fd, volumes, VariationFamily,
    FD_STEP,
};
use crate::quadrature::{AxisRule, QuadratureGrid};
use crate::report::{Record, Report};
use crate::stability::index::{galerkin_sphere_spectrum, sphere_index, sphere_index_csv};
use crate::stability::spectrum::{galerkin_spectrum, spectrum_csv, BasisKind, SpectralProblem, MAX_CONDITION};
use crate::stability::OperatorMode;
use crate::xi::{modified_mcv_parallelism_check, xi_residual, XiData};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xisub", version, about = "Checks and computations for xi-submanifolds of Euclidean space")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Omit the wall time so that reports of identical runs are byte-identical
    /// apart from the timestamp.
    #[arg(long, global = true)]
    pub reproducible: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Write the CSV table (curve, spectrum, index) here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Nodes per axis of verification grids.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Override a tolerance, e.g. --tol xi_residual=1e-9 (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_key_value)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_key_value(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in '{s}': {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Example family and parameters.
#[derive(Debug, Clone, Args)]
pub struct SelectorArgs {
    /// plane, sphere, cylinder, torus, sphere_x_sphere, great_sphere,
    /// small_sphere, clifford_torus, off_center_sphere or ellipse.
    pub family: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub height: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub offset: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
}

impl SelectorArgs {
    fn selector(&self) -> ExampleSelector {
        ExampleSelector {
            family: self.family.clone(),
            m: self.m,
            p: self.p,
            r: self.r,
            r2: self.r2,
            a: self.a,
            height: self.height,
            offset: self.offset.clone(),
            center: self.center.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bundle,
    BundleDrift,
    Scalar,
    ScalarDrift,
}

impl From<ModeArg> for OperatorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bundle => OperatorMode::Bundle,
            ModeArg::BundleDrift => OperatorMode::BundleDrift,
            ModeArg::Scalar => OperatorMode::Scalar,
            ModeArg::ScalarDrift => OperatorMode::ScalarDrift,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKindArg {
    Xi,
    Shrinker,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the catalog of examples.
    Catalog,
    /// ξ-equation residual and the Gaussian-metric parallelism identity.
    Check(SelectorArgs),
    /// Weighted volumes V_ξ, V̄_ξ, Ṽ_ξ.
    Functional(SelectorArgs),
    /// Analytic against finite-difference first and second variations.
    Variation {
        #[command(flatten)]
        selector: SelectorArgs,
        /// Number of random compact normal fields.
        #[arg(long)]
        fields: Option<usize>,
    },
    /// Galerkin spectrum of a stability operator.
    Spectrum {
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long, value_enum, default_value = "bundle")]
        mode: ModeArg,
        /// Restrict to fields weighted-orthogonal to the parallel normals.
        #[arg(long)]
        vp: bool,
        /// Hermite degree on planes.
        #[arg(long)]
        degree: Option<usize>,
        /// Fourier cutoff on circles.
        #[arg(long)]
        kmax: Option<usize>,
        /// Harmonic degree on 2-spheres.
        #[arg(long)]
        lmax: Option<usize>,
    },
    /// Closed-form index of S^m(r) ⊂ ℝ^{m+p}.
    Index {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: f64,
        /// Keep the k = 0 modes (parallel normal fields).
        #[arg(long)]
        no_vp: bool,
        /// Skip the Galerkin cross-check (otherwise run for m ≤ 2).
        #[arg(long)]
        no_galerkin: bool,
    },
    /// Integrate a ξ-curve or a self-shrinker curve.
    Curve {
        #[arg(long, value_enum)]
        kind: CurveKindArg,
        /// First-integral constant of a ξ-curve.
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, default_value = "1,0")]
        x0: Vec<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta0: f64,
        #[arg(long, default_value_t = 20.0)]
        smax: f64,
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        blowup_radius: Option<f64>,
    },
    /// The full acceptance suite.
    VerifyAll {
        /// Run only these criteria (comma-separated numbers).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Catalog => "catalog",
            Self::Check(_) => "check",
            Self::Functional(_) => "functional",
            Self::Variation { .. } => "variation",
            Self::Spectrum { .. } => "spectrum",
            Self::Index { .. } => "index",
            Self::Curve { .. } => "curve",
            Self::VerifyAll { .. } => "verify-all",
        }
    }

    fn selector(&self) -> Option<&SelectorArgs> {
        match self {
            Self::Check(s) | Self::Functional(s) => Some(s),
            Self::Variation { selector, .. } | Self::Spectrum { selector, .. } => Some(selector),
            _ => None,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    pub csv: Option<String>,
    /// Text for usage errors, help and version requests.
    pub message: Option<String>,
    pub config: Option<RunConfig>,
}

impl Outcome {
    fn usage(code: i32, message: String) -> Self {
        Self { code, report: None, csv: None, message: Some(message), config: None }
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(cli.command.name());
    if let Some(path) = &cli.config {
        cfg.apply_file(&ConfigFile::load(path)?);
    }
    if let Some(sel) = cli.command.selector() {
        cfg.example.overlay(&sel.selector());
    }
    if cli.reproducible {
        cfg.reproducible = true;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.nodes {
        cfg.verification_nodes = n;
    }
    if let Command::Variation { fields: Some(n), .. } = cli.command {
        cfg.random_fields = n;
    }
    for (k, v) in &cli.tolerances {
        cfg.tolerances.set(k, *v)?;
    }
    if cli.output.is_some() {
        cfg.output.report = cli.output.clone();
    }
    if cli.csv.is_some() {
        cfg.output.csv = cli.csv.clone();
    }
    cfg.validate()?;
    if cli.command.selector().is_some() {
        cfg.example.build()?;
    }
    Ok(cfg)
}

/// Parses and executes; never exits the process.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            return Outcome::usage(code, e.render().to_string());
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(EXIT_USAGE, format!("error: {e}\n")),
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let (records, data, csv) = match execute(&cli.command, &cfg) {
        Ok(x) => x,
        Err(e) => (vec![Record::error(cfg.command.clone(), e)], None, None),
    };
    let wall = (!cfg.reproducible).then(|| start.elapsed().as_secs_f64());
    let mut report = Report::new(echo, records).with_wall_time(wall);
    if let Some(d) = data {
        report = report.with_data(d);
    }
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Outcome { code, report: Some(report), csv, message: None, config: Some(cfg) }
}

type Executed = (Vec<Record>, Option<serde_json::Value>, Option<String>);

fn to_value<T: serde::Serialize>(v: &T) -> Option<serde_json::Value> {
    serde_json::to_value(v).ok()
}

/// Runs one parsed command under a resolved configuration.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Executed> {
    match command {
        Command::Catalog => catalog(),
        Command::Check(_) => check(cfg),
        Command::Functional(_) => functional(cfg),
        Command::Variation { .. } => variation(cfg),
        Command::Spectrum { mode, vp, degree, kmax, lmax, .. } => spectrum(cfg, (*mode).into(), *vp, *degree, *kmax, *lmax),
        Command::Index { m, p, r, no_vp, no_galerkin } => index(*m, *p, *r, !no_vp, !no_galerkin),
        Command::Curve { kind, c, x0, theta0, smax, rtol, blowup_radius } => {
            let mut policy = StepPolicy::default();
            if let Some(t) = rtol {
                policy.rtol = *t;
                policy.atol = *t;
            }
            if let Some(b) = blowup_radius {
                policy.blowup_radius = *b;
            }
            curve(cfg, *kind, *c, x0, *theta0, *smax, &policy)
        }
        Command::VerifyAll { only } => verify_all(cfg, only.as_deref()),
    }
}

fn catalog() -> Result<Executed> {
    let items = standard_catalog()?;
    let records = items.iter().map(|i| Record::flag(format!("catalog/{}", i.name()), true)).collect();
    Ok((records, to_value(&catalog_listing(&items)), None))
}

fn build_example(cfg: &RunConfig) -> Result<Example> {
    cfg.example.build()
}

fn check(cfg: &RunConfig) -> Result<Executed> {
    let ex = build_example(cfg)?;
    let grid = ex.verification_grid(cfg.verification_nodes)?;
    let res = xi_residual(ex.immersion(), &grid)?;
    let par = modified_mcv_parallelism_check(ex.immersion(), &grid)?;
    let name = ex.name();
    let records = vec![
        Record::at_most(format!("xi_residual/{name}"), res.residual, cfg.tolerances.xi_residual),
        Record::at_most(format!("parallelism/{name}"), par.discrepancy, cfg.tolerances.parallelism),
    ];
    let data = serde_json::json!({ "example": name, "grid_nodes": grid.len(), "xi_residual": res, "parallelism": par });
    Ok((records, Some(data), None))
}

/// Tensor Gauss rule for bare immersions without catalog rules.
fn bare_rules(dim: usize) -> Vec<AxisRule> {
    vec![AxisRule::new(24, 2); dim]
}

fn functional(cfg: &RunConfig) -> Result<Executed> {
    let ex = build_example(cfg)?;
    let name = ex.name();
    match ex.catalog() {
        Some(item) => {
            let rv = refined_volumes(item)?;
            let v = rv.volumes;
            let h = &rv.history;
            let change = match h.len() {
                0 | 1 => f64::NAN,
                n => (h[n - 1].1 - h[n - 2].1).abs() / h[n - 1].1.abs(),
            };
            let records = vec![
                Record::above(format!("v_xi/{name}"), v.v_xi, 0.0),
                Record::at_most(format!("refinement_change/{name}"), change, cfg.tolerances.identity)
                    .with_detail(format!("{} nodes per axis", rv.nodes_per_axis)),
            ];
            Ok((records, to_value(&rv), None))
        }
        None => {
            let imm = ex.immersion();
            let c = imm.chart();
            let grid = QuadratureGrid::on_box(&c.lower, &c.upper, &bare_rules(imm.dim()))?;
            let v = volumes(imm, &XiData::from_immersion(imm), &grid)?;
            let records = vec![Record::above(format!("v_xi/{name}"), v.v_xi, 0.0)
                .with_detail("xi taken as H + x-perp of the immersion itself")];
            Ok((records, to_value(&v), None))
        }
    }
}

fn variation(cfg: &RunConfig) -> Result<Executed> {
    let ex = build_example(cfg)?;
    let item = ex
        .catalog()
        .ok_or_else(|| Error::UnsupportedSpec(format!("variations need a catalog item; {} is not one", ex.name())))?;
    let tol = cfg.tolerances;
    let xi = XiData::new(item.xi.clone());
    let (v, vb) = crate::functionals::weighted_volume(&item.immersion, &xi, &item.quadrature_grid()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for k in 0..cfg.random_fields {
        let eta = random_compact_normal_field(&item.immersion, &mut rng);
        let fam = VariationFamily::normal(eta.clone());
        let grid = variation_grid(item, &fam)?;
        let a = first_variation(&item.immersion, &xi, &fam, &grid)?;
        let fd = first_variation_fd(&item.immersion, &xi, &fam, &grid, FD_STEP)?;
        let q = second_variation(&item.immersion, &xi, &eta, &grid)?;
        let q_fd = second_variation_fd(&item.immersion, &xi, &fam, &grid, FD_STEP)?[0];
        let crit = (a.v.abs() / v).max(a.v_bar.abs() / vb);
        let gap1 = ((a.v - fd[0]).abs() / fd[0].abs().max(1.0)).max((a.v_bar - fd[1]).abs() / fd[1].abs().max(1.0));
        let gap2 = (q - q_fd).abs() / q.abs().max(q_fd.abs()).max(f64::MIN_POSITIVE);
        records.push(Record::at_most(format!("field{k}/critical"), crit, tol.critical));
        records.push(Record::at_most(format!("field{k}/first_analytic_vs_fd"), gap1, tol.first_variation_fd));
        records.push(Record::at_most(format!("field{k}/second_analytic_vs_fd"), gap2, tol.second_variation_fd));
        rows.push(serde_json::json!({
            "first": a, "first_fd": fd, "second": q, "second_fd": q_fd,
        }));
    }
    let data = serde_json::json!({ "example": item.name(), "v_xi": v, "v_bar": vb, "fields": rows });
    Ok((records, Some(data), None))
}

fn spectrum(
    cfg: &RunConfig,
    mode: OperatorMode,
    vp: bool,
    degree: Option<usize>,
    kmax: Option<usize>,
    lmax: Option<usize>,
) -> Result<Executed> {
    let ex = build_example(cfg)?;
    let item = ex.catalog().ok_or_else(|| Error::UnsupportedSpec("spectra need a catalog item".into()))?.clone();
    let basis = match (degree, kmax, lmax) {
        (Some(d), _, _) => BasisKind::Hermite { degree: d },
        (_, Some(k), _) => BasisKind::Fourier { kmax: k },
        (_, _, Some(l)) => BasisKind::Harmonics { lmax: l },
        _ => BasisKind::default_for(&item)?,
    };
    match basis {
        BasisKind::Hermite { degree } if degree > 8 => return Err(Error::DegreeTooLarge { degree, limit: 8 }),
        BasisKind::Fourier { kmax } if kmax > 16 => return Err(Error::DegreeTooLarge { degree: kmax, limit: 16 }),
        BasisKind::Harmonics { lmax } if lmax > 8 => return Err(Error::DegreeTooLarge { degree: lmax, limit: 8 }),
        _ => {}
    }
    let s = galerkin_spectrum(&SpectralProblem::new(item, mode, vp)?.with_basis(basis))?;
    let records = vec![
        Record::at_most("rayleigh_residual", s.max_residual, cfg.tolerances.rayleigh),
        Record::at_most("gram_condition", s.gram_condition, MAX_CONDITION),
    ];
    let csv = spectrum_csv(&s);
    Ok((records, to_value(&s), Some(csv)))
}

fn index(m: usize, p: usize, r: f64, vp: bool, galerkin: bool) -> Result<Executed> {
    let s = sphere_index(m, p, r, vp)?;
    let mut records = vec![Record::flag("index_m_plus_1_iff_r2_le_m", s.claim_holds)
        .with_detail(format!("index = {}, m + 1 = {}, r^2 = {r2}", s.index, m + 1, r2 = r * r))];
    let mut data = serde_json::json!({ "closed_form": s });
    if galerkin && m <= 2 {
        let g = galerkin_sphere_spectrum(m, p, r, vp)?;
        records.push(Record::equals("galerkin_count", g.index as f64, s.index as f64).with_detail(g.basis.clone()));
        data["galerkin"] = serde_json::to_value(&g).unwrap_or_default();
    }
    Ok((records, Some(data), Some(sphere_index_csv(&s))))
}

fn curve(
    cfg: &RunConfig,
    kind: CurveKindArg,
    c: Option<f64>,
    x0: &[f64],
    theta0: f64,
    smax: f64,
    policy: &StepPolicy,
) -> Result<Executed> {
    if x0.len() != 2 {
        return Err(Error::InvalidParameter(format!("x0 needs two components, got {}", x0.len())));
    }
    let x0 = [x0[0], x0[1]];
    let integrate = |pol: &StepPolicy| -> Result<Polyline> {
        match kind {
            CurveKindArg::Xi => {
                let c = c.ok_or_else(|| Error::InvalidParameter("--C is required for --kind xi".into()))?;
                integrate_xi_curve(x0, theta0, c, smax, pol)
            }
            CurveKindArg::Shrinker => integrate_self_shrinker_curve(x0, theta0, smax, pol),
        }
    };
    let poly = integrate(policy)?;
    let fine = integrate(&policy.refined())?;
    let (a, b) = (poly.last(), fine.last());
    let end_gap = (a.x[0] - b.x[0]).hypot(a.x[1] - b.x[1]);
    let summary = summarize(&poly);
    let records = vec![
        Record::at_most("first_integral_drift", summary.first_integral_drift, cfg.tolerances.curve_drift),
        Record::at_most("refined_endpoint_gap", end_gap, cfg.tolerances.trajectory)
            .with_detail("endpoint against a run at tolerances / 32"),
    ];
    let data = serde_json::json!({
        "summary": summary,
        "accepted_steps": poly.accepted_steps,
        "rejected_steps": poly.rejected_steps,
        "radius_range": poly.radius_range(),
    });
    Ok((records, Some(data), Some(poly.to_csv())))
}

fn verify_all(cfg: &RunConfig, only: Option<&[u8]>) -> Result<Executed> {
    let opts = SuiteOptions { seed: cfg.seed, tolerances: cfg.tolerances };
    let outcomes = match only {
        Some(ids) => acceptance::verify(ids, &opts)?,
        None => acceptance::verify_all(&opts),
    };
    let summary: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|c| serde_json::json!({ "criterion": c.id, "title": c.title, "pass": c.pass(), "records": c.records.len() }))
        .collect();
    Ok((acceptance::all_records(&outcomes), Some(serde_json::Value::Array(summary)), None))
}

/// Writes the report and CSV where the configuration says; used by the binary.
pub fn emit(outcome: &Outcome) -> std::io::Result<()> {
    use std::io::Write;
    if let Some(msg) = &outcome.message {
        if outcome.code == EXIT_PASS {
            print!("{msg}");
        } else {
            eprint!("{msg}");
        }
    }
    let out = outcome.config.as_ref().map(|c| c.output.clone()).unwrap_or_default();
    if let Some(rep) = &outcome.report {
        let json = rep.to_json();
        match &out.report {
            Some(path) => std::fs::write(path, json + "\n")?,
            None => writeln!(std::io::stdout(), "{json}")?,
        }
        for r in rep.failures() {
            eprintln!("FAIL {}: value {:e}, tolerance {:e} {}", r.name, r.value, r.tolerance, r.detail.as_deref().unwrap_or(""));
        }
    }
    if let (Some(csv), Some(path)) = (&outcome.csv, &out.csv) {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("xisub").chain(args.iter().copied()))
    }

    #[test]
    fn index_example_passes() {
        let o = run_args(&["index", "--m", "2", "--p", "1", "--r", "1"]);
        assert_eq!(o.code, EXIT_PASS);
        let rep = o.report.unwrap();
        assert_eq!(rep.data.unwrap()["closed_form"]["index"], 3);
    }

    #[test]
    fn check_sphere_passes() {
        let o = run_args(&["check", "sphere", "--m", "2", "--r", "1.5", "--nodes", "12"]);
        assert_eq!(o.code, EXIT_PASS, "{:?}", o.report.map(|r| r.to_json()));
    }

    #[test]
    fn off_center_sphere_fails_check() {
        let o = run_args(&["check", "off_center_sphere", "--nodes", "10"]);
        assert_eq!(o.code, EXIT_FAIL);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["bogus"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["index", "--m", "2"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["check", "sphere", "--tol", "xi_residual=-1"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["check", "sphere", "--nodes", "100000"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).code, EXIT_PASS);
    }

    #[test]
    fn shrinker_circle_closes() {
        let o = run_args(&["curve", "--kind", "shrinker", "--x0", "1,0", "--theta0", "1.5707963", "--smax", "8"]);
        let rep = o.report.unwrap();
        let closure = &rep.data.as_ref().unwrap()["summary"]["closure"];
        assert_eq!(closure["closed"], true, "{}", rep.to_json());
        assert!(o.csv.unwrap().starts_with("s,"));
    }

    #[test]
    fn reproducible_reports_match() {
        let args = ["check", "sphere", "--m", "1", "--r", "2", "--reproducible"];
        let a = run_args(&args).report.unwrap();
        let b = run_args(&args).report.unwrap();
        assert!(a.wall_time_s.is_none());
        assert_eq!(a.to_json_without_timestamp(), b.to_json_without_timestamp());
    }
}
