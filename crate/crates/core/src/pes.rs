//! Potential energy surface scans, inverse-power surface fits and their
//! minimization.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{build_ansatz, AnsatzCircuit, HFReference};
use crate::chem_io::{read_fcidump, reduce_active_space, ActiveSpaceSpec, FermionicHamiltonian, Geometry, ScanManifest};
use crate::exact_solver::{ground_state, ExactResult};
use crate::format::{round_json, sig12};
use crate::optimizer::SPSAConfig;
use crate::qubit_map::{jordan_wigner, PauliOperatorSum, SpinOrdering};
use crate::rng::derive_seed;
use crate::vqe_engine::{vqe_energy, ProbabilityDiagnostics};
use crate::{Error, Result};

/// Exponents of the inverse-power basis, shared by both coordinates.
pub const POWERS: [f64; 4] = [2.0, 3.0, 4.0, 4.5];

const MIN_FIT_POINTS: usize = 10;
const RANK_TOL: f64 = 1e-12;
const GRID_POINTS: usize = 1000;
const GOLDEN_TOL: f64 = 1e-6;

/// A molecule reduced to its qubit Hamiltonian.
#[derive(Debug, Clone)]
pub struct QubitProblem {
    pub fermionic: FermionicHamiltonian,
    pub hamiltonian: PauliOperatorSum,
    pub hf: HFReference,
}

impl QubitProblem {
    pub fn new(full: &FermionicHamiltonian, spec: &ActiveSpaceSpec) -> Result<Self> {
        let fermionic = reduce_active_space(full, spec)?;
        let hamiltonian = jordan_wigner(&fermionic, SpinOrdering::Blocked)?;
        let hf = HFReference::blocked(fermionic.n_spatial(), fermionic.n_alpha(), fermionic.n_beta())?;
        Ok(Self {
            fermionic,
            hamiltonian,
            hf,
        })
    }

    pub fn from_fcidump(path: impl AsRef<Path>, spec: &ActiveSpaceSpec) -> Result<Self> {
        let path = path.as_ref();
        Self::new(&read_fcidump(path)?, spec).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn ansatz(&self, layers: usize) -> Result<AnsatzCircuit> {
        build_ansatz(self.n_qubits(), layers, &self.hf)
    }

    pub fn n_electrons(&self) -> usize {
        self.fermionic.n_electrons()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PESRecord {
    pub angle_deg: f64,
    pub length_angstrom: f64,
    pub vqe_energy: f64,
    pub exact_energy: f64,
    pub delta: f64,
    pub diagnostics: ProbabilityDiagnostics,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub layers: usize,
    /// Restrict the exact reference to this particle number.
    pub sector: Option<usize>,
    /// Collect per-entry failures instead of aborting.
    pub keep_going: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            layers: 2,
            sector: None,
            keep_going: false,
        }
    }
}

#[derive(Debug)]
pub struct ScanFailure {
    pub geometry: Geometry,
    pub path: PathBuf,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct ScanOutcome {
    pub records: Vec<PESRecord>,
    pub failures: Vec<ScanFailure>,
}

/// SPSA seed for manifest entry `index`.
pub fn entry_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, (1u64 << 40) + index as u64)
}

/// Exact energy for one geometry under the scan conventions.
pub fn exact_energy(problem: &QubitProblem, sector: Option<usize>) -> Result<ExactResult> {
    ground_state(&problem.hamiltonian, sector)
}

fn scan_entry(
    path: &Path,
    geometry: &Geometry,
    spec: &ActiveSpaceSpec,
    warm_params: &[f64],
    config: &SPSAConfig,
    options: &ScanOptions,
) -> Result<PESRecord> {
    let problem = QubitProblem::from_fcidump(path, spec)?;
    let exact = exact_energy(&problem, options.sector)?;
    let circuit = problem.ansatz(options.layers)?;
    let run = vqe_energy(&problem.hamiltonian, &circuit, warm_params, config)?;
    Ok(PESRecord {
        angle_deg: geometry.bond_angle,
        length_angstrom: geometry.bond_length,
        vqe_energy: run.energy,
        exact_energy: exact.ground_energy,
        delta: (run.energy - exact.ground_energy).abs(),
        diagnostics: run.diagnostics,
    })
}

/// Runs exact diagonalization and a VQE started from `warm_params` at every
/// manifest geometry. Entries are processed in parallel; records keep
/// manifest order.
pub fn scan(
    manifest: &ScanManifest,
    spec: &ActiveSpaceSpec,
    warm_params: &[f64],
    config: &SPSAConfig,
    options: &ScanOptions,
) -> Result<ScanOutcome> {
    if manifest.is_empty() {
        return Err(Error::Validation("manifest has no entries".into()));
    }
    let results: Vec<Result<PESRecord>> = manifest
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, entry)| {
            let cfg = SPSAConfig {
                seed: entry_seed(config.seed, i),
                ..config.clone()
            };
            scan_entry(&entry.path, &entry.geometry, spec, warm_params, &cfg, options)
        })
        .collect();

    let mut outcome = ScanOutcome::default();
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(record) => outcome.records.push(record),
            Err(error) if options.keep_going => outcome.failures.push(ScanFailure {
                geometry: entry.geometry,
                path: entry.path.clone(),
                error,
            }),
            Err(error) => return Err(error.context(format!("scan entry ({})", entry.geometry))),
        }
    }
    Ok(outcome)
}

/// Linear model `E(x, y) = c + sum_p a_p x^-p + sum_p b_p y^-p` with
/// `x` the bond angle (degrees) and `y` the bond length (Angstrom).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceFit {
    pub intercept: f64,
    pub angle_coefficients: [f64; 4],
    pub length_coefficients: [f64; 4],
    pub residual_rms: f64,
    /// Bounding box of the fitted data: angle range then length range.
    pub angle_domain: (f64, f64),
    pub length_domain: (f64, f64),
}

/// Names of the nine basis functions, in coefficient order.
pub const BASIS_NAMES: [&str; 9] = [
    "1", "x^-2", "x^-3", "x^-4", "x^-4.5", "y^-2", "y^-3", "y^-4", "y^-4.5",
];

fn basis_row(x: f64, y: f64) -> [f64; 9] {
    let mut row = [1.0; 9];
    for (k, p) in POWERS.iter().enumerate() {
        row[1 + k] = x.powf(-p);
        row[5 + k] = y.powf(-p);
    }
    row
}

impl SurfaceFit {
    /// Builds a model from explicit coefficients (basis order of
    /// [`BASIS_NAMES`]).
    pub fn from_coefficients(coefficients: [f64; 9], angle_domain: (f64, f64), length_domain: (f64, f64)) -> Self {
        Self {
            intercept: coefficients[0],
            angle_coefficients: [coefficients[1], coefficients[2], coefficients[3], coefficients[4]],
            length_coefficients: [coefficients[5], coefficients[6], coefficients[7], coefficients[8]],
            residual_rms: 0.0,
            angle_domain,
            length_domain,
        }
    }

    pub fn coefficients(&self) -> [f64; 9] {
        let mut c = [0.0; 9];
        c[0] = self.intercept;
        c[1..5].copy_from_slice(&self.angle_coefficients);
        c[5..9].copy_from_slice(&self.length_coefficients);
        c
    }

    pub fn angle_part(&self, x: f64) -> f64 {
        self.angle_coefficients
            .iter()
            .zip(POWERS)
            .map(|(a, p)| a * x.powf(-p))
            .sum()
    }

    pub fn length_part(&self, y: f64) -> f64 {
        self.length_coefficients
            .iter()
            .zip(POWERS)
            .map(|(b, p)| b * y.powf(-p))
            .sum()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.intercept + self.angle_part(x) + self.length_part(y)
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Least-squares fit of the inverse-power model to `(angle, length,
/// energy)` points, solved by Householder QR on unit-norm columns.
pub fn fit_surface(points: &[(f64, f64, f64)]) -> Result<SurfaceFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::Domain(format!(
            "surface fit needs at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(x, y, e)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() && e.is_finite()))
    {
        return Err(Error::Domain("fit points need positive coordinates and finite energies".into()));
    }
    if distinct(points.iter().map(|p| p.0)) < 3 || distinct(points.iter().map(|p| p.1)) < 3 {
        return Err(Error::Domain("fit needs at least 3 distinct angles and 3 distinct lengths".into()));
    }

    let m = points.len();
    let mut design = DMatrix::<f64>::zeros(m, 9);
    for (i, &(x, y, _)) in points.iter().enumerate() {
        for (j, v) in basis_row(x, y).into_iter().enumerate() {
            design[(i, j)] = v;
        }
    }
    let scales: Vec<f64> = (0..9).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let rhs = DVector::from_iterator(m, points.iter().map(|p| p.2));

    let svd = design.clone().svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let deficient: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] < RANK_TOL * smax).collect();
    if !deficient.is_empty() {
        let v_t = svd.v_t.as_ref().expect("requested");
        let directions: Vec<String> = deficient
            .iter()
            .map(|&k| {
                let names: Vec<&str> = (0..9)
                    .filter(|&j| v_t[(k, j)].abs() > 0.1)
                    .map(|j| BASIS_NAMES[j])
                    .collect();
                format!("[{}]", names.join(", "))
            })
            .collect();
        return Err(Error::Fit(format!(
            "design matrix is rank deficient along {}",
            directions.join(" and ")
        )));
    }

    let qr = design.clone().qr();
    let qtb = qr.q().transpose() * &rhs;
    let solution = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Fit("singular triangular factor".into()))?;
    let mut coefficients = [0.0; 9];
    for j in 0..9 {
        coefficients[j] = solution[j] / scales[j];
    }

    let residual = &design * &solution - &rhs;
    let residual_rms = (residual.norm_squared() / m as f64).sqrt();
    let bounds = |f: fn(&(f64, f64, f64)) -> f64| {
        points.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let mut fit = SurfaceFit::from_coefficients(coefficients, bounds(|p| p.0), bounds(|p| p.1));
    fit.residual_rms = residual_rms;
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceMinimum {
    pub angle_star: f64,
    pub length_star: f64,
    pub energy_star: f64,
    /// The angle minimum sits on an end of the searched range.
    pub angle_at_boundary: bool,
    pub length_at_boundary: bool,
}

impl SurfaceMinimum {
    pub fn at_boundary(&self) -> bool {
        self.angle_at_boundary || self.length_at_boundary
    }
}

/// Golden-section search on `[lo, hi]` to absolute width `tol`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Dense grid then golden-section refinement; returns (argmin, at_boundary).
fn minimize_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, bool) {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid = |i: usize| if i == GRID_POINTS - 1 { hi } else { lo + step * i as f64 };
    let best = (0..GRID_POINTS)
        .map(|i| (i, f(grid(i))))
        .fold((0, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    let i = best.0;
    let a = grid(i.saturating_sub(1));
    let b = grid((i + 1).min(GRID_POINTS - 1));
    let mut x = golden_section(&f, a, b, GOLDEN_TOL);
    // golden section never evaluates the bracket ends
    if f(lo) <= f(x) && i == 0 {
        x = lo;
    } else if f(hi) <= f(x) && i == GRID_POINTS - 1 {
        x = hi;
    }
    let boundary = (x - lo).abs() <= GOLDEN_TOL || (hi - x).abs() <= GOLDEN_TOL;
    (x, boundary)
}

/// Minimizes the separable model over the given angle and length ranges.
pub fn minimize_surface(fit: &SurfaceFit, x_range: (f64, f64), y_range: (f64, f64)) -> Result<SurfaceMinimum> {
    for (name, (lo, hi), (dlo, dhi)) in [
        ("angle", x_range, fit.angle_domain),
        ("length", y_range, fit.length_domain),
    ] {
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::Domain(format!("{name} range ({lo}, {hi}) must be positive and increasing")));
        }
        let slack = 1e-9 * dhi.abs().max(1.0);
        if lo < dlo - slack || hi > dhi + slack {
            return Err(Error::Domain(format!(
                "{name} range ({lo}, {hi}) leaves the fitted domain ({dlo}, {dhi})"
            )));
        }
    }
    let (angle_star, angle_at_boundary) = minimize_1d(|x| fit.angle_part(x), x_range.0, x_range.1);
    let (length_star, length_at_boundary) = minimize_1d(|y| fit.length_part(y), y_range.0, y_range.1);
    Ok(SurfaceMinimum {
        angle_star,
        length_star,
        energy_star: fit.evaluate(angle_star, length_star),
        angle_at_boundary,
        length_at_boundary,
    })
}

pub const PES_CSV_HEADER: &str = "angle_deg,length_angstrom,vqe_energy,exact_energy,delta,top_prob,gap";

pub fn pes_csv(records: &[PESRecord]) -> String {
    let mut out = String::from(PES_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig12(r.angle_deg),
            sig12(r.length_angstrom),
            sig12(r.vqe_energy),
            sig12(r.exact_energy),
            sig12(r.delta),
            sig12(r.diagnostics.top_probability),
            sig12(r.diagnostics.gap),
        );
    }
    out
}

/// Which energy column of a PES CSV to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyColumn {
    Vqe,
    Exact,
}

/// Reads `(angle, length, energy)` triples from a PES CSV.
pub fn parse_pes_csv(text: &str, column: EnergyColumn) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == PES_CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header '{PES_CSV_HEADER}'"),
            })
        }
    }
    let col = match column {
        EnergyColumn::Vqe => 2,
        EnergyColumn::Exact => 3,
    };
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            let get = |k: usize| -> Result<f64> {
                fields
                    .get(k)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: format!("bad field {k}"),
                    })
            };
            if fields.len() != 7 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 7 fields, found {}", fields.len()),
                });
            }
            Ok((get(0)?, get(1)?, get(col)?))
        })
        .collect()
}

pub fn fit_json(fit: &SurfaceFit, minimum: Option<&SurfaceMinimum>) -> serde_json::Value {
    let coefficients: Vec<serde_json::Value> = BASIS_NAMES
        .iter()
        .zip(fit.coefficients())
        .map(|(name, c)| serde_json::json!({ "basis": name, "value": c }))
        .collect();
    let minimum = minimum.map(|m| {
        serde_json::json!({
            "angle_deg": m.angle_star,
            "length_angstrom": m.length_star,
            "energy": m.energy_star,
            "angle_at_boundary": m.angle_at_boundary,
            "length_at_boundary": m.length_at_boundary,
        })
    });
    round_json(serde_json::json!({
        "coefficients": coefficients,
        "residual_rms": fit.residual_rms,
        "angle_domain": [fit.angle_domain.0, fit.angle_domain.1],
        "length_domain": [fit.length_domain.0, fit.length_domain.1],
        "minimum": minimum,
    }))
}

/// Writes `<prefix>.csv` and `<prefix>.json`; returns both paths.
pub fn emit_pes(
    records: &[PESRecord],
    fit: Option<(&SurfaceFit, Option<&SurfaceMinimum>)>,
    prefix: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let csv_path = with_suffix(prefix, "csv");
    let json_path = with_suffix(prefix, "json");
    std::fs::write(&csv_path, pes_csv(records)).map_err(|e| Error::io(&csv_path, e))?;
    let max_delta = records.iter().map(|r| r.delta).fold(0.0, f64::max);
    let json = round_json(serde_json::json!({
        "records": records.len(),
        "max_delta": max_delta,
        "fit": fit.map(|(f, m)| fit_json(f, m)),
    }));
    let text = serde_json::to_string_pretty(&json).expect("json serializes") + "\n";
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

pub fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}
