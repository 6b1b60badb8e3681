//! Serialized report shapes. Each mirrors a schema under `schemas/`.

use dfcert::{Enumeration, FixedPointRecord, LefschetzCertificate, RateEstimate, Trajectory};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Serialize)]
pub struct InteriorFixedPoint {
    pub location: Vec<f64>,
    pub residual: f64,
    pub eigenvalues: Vec<f64>,
    pub spectral_radius: f64,
    pub lefschetz_index: i8,
    pub stability: &'static str,
    pub basin_hits: usize,
}

#[derive(Debug, Serialize)]
pub struct CornerEntry {
    pub corner: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub schema_version: &'static str,
    pub gamma: Vec<f64>,
    pub verdict: &'static str,
    pub interior_fixed_points: Vec<InteriorFixedPoint>,
    pub corner_reports: Vec<CornerEntry>,
    pub index_sum: i32,
    pub euler_characteristic: i32,
    pub nonconverged_starts: usize,
    pub seed: u64,
}

impl CertificateReport {
    pub fn new(gamma: &[f64], cert: &LefschetzCertificate, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: gamma.to_vec(),
            verdict: cert.verdict.as_str(),
            interior_fixed_points: cert
                .interior_points
                .iter()
                .map(|(rec, rep)| InteriorFixedPoint {
                    location: rec.location.coords().to_vec(),
                    residual: rec.residual,
                    eigenvalues: rep.reduced_eigenvalues.clone(),
                    spectral_radius: rep.spectral_radius,
                    lefschetz_index: rep.lefschetz_index,
                    stability: rep.stability.as_str(),
                    basin_hits: rec.basin_hits,
                })
                .collect(),
            corner_reports: cert
                .corner_reports
                .iter()
                .map(|c| CornerEntry {
                    corner: c.corner,
                    eigenvalue: c.eigenvalue,
                })
                .collect(),
            index_sum: cert.index_sum,
            euler_characteristic: cert.euler_characteristic,
            nonconverged_starts: cert.nonconverged_starts,
            seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FixedPointEntry {
    pub location: Vec<f64>,
    pub residual: f64,
    pub basin_hits: usize,
    pub is_corner: bool,
}

impl From<&FixedPointRecord> for FixedPointEntry {
    fn from(r: &FixedPointRecord) -> Self {
        Self {
            location: r.location.coords().to_vec(),
            residual: r.residual,
            basin_hits: r.basin_hits,
            is_corner: r.is_corner,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FixedPointReport {
    pub schema_version: &'static str,
    pub gamma: Vec<f64>,
    pub fixed_points: Vec<FixedPointEntry>,
    pub starts: usize,
    pub converged_starts: usize,
    pub nonconverged_starts: usize,
    pub seed: u64,
}

impl FixedPointReport {
    pub fn new(gamma: &[f64], e: &Enumeration, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: gamma.to_vec(),
            fixed_points: e.records.iter().map(FixedPointEntry::from).collect(),
            starts: e.starts,
            converged_starts: e.converged_starts,
            nonconverged_starts: e.nonconverged_starts,
            seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub schema_version: &'static str,
    pub gamma: Vec<f64>,
    pub point: Vec<f64>,
    pub full_jacobian: Vec<Vec<f64>>,
    pub reduced_jacobian: Vec<Vec<f64>>,
    pub full_eigenvalues: Vec<f64>,
    pub reduced_eigenvalues: Vec<f64>,
    pub column_sum_max_abs: f64,
}

#[derive(Debug, Serialize)]
pub struct RateReport {
    pub schema_version: &'static str,
    pub gamma: Vec<f64>,
    pub fixed_point: Vec<f64>,
    pub x0: Vec<f64>,
    pub steps: usize,
    pub spectral_rate: f64,
    pub empirical_rate: f64,
    pub tail_points: usize,
    pub relative_gap: f64,
    pub seed: u64,
}

impl RateReport {
    pub fn new(gamma: &[f64], xbar: &[f64], x0: &[f64], steps: usize, r: &RateEstimate, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: gamma.to_vec(),
            fixed_point: xbar.to_vec(),
            x0: x0.to_vec(),
            steps,
            spectral_rate: r.spectral_rate,
            empirical_rate: r.empirical_rate,
            tail_points: r.tail_window,
            relative_gap: r.relative_gap(),
            seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TrajectoryReport {
    pub schema_version: &'static str,
    pub gamma: Vec<f64>,
    pub steps: usize,
    pub states: Vec<Vec<f64>>,
}

impl TrajectoryReport {
    pub fn new(gamma: &[f64], t: &Trajectory) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: gamma.to_vec(),
            steps: t.step_count,
            states: t.states.iter().map(|s| s.coords().to_vec()).collect(),
        }
    }
}

/// `step,x_1,...,x_n` with 17 significant digits per value.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let n = t.states.first().map_or(0, |s| s.dim());
    let mut out = String::from("step");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    out.push('\n');
    for (k, s) in t.states.iter().enumerate() {
        out.push_str(&k.to_string());
        for v in s.coords() {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
