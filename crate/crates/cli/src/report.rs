//! Report document assembly and serialization.
//!
//! Reports are the durable output of the tool: schema-versioned JSON with
//! sorted struct fields, shortest round-trip floats and the frozen
//! convention constants echoed in every document, so identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;

use spinor_forge_core::checks::{
    run_checks, run_connection_suite, run_geometry_suite, worst_verdict, CheckResult,
    Classification, FrameResiduals, Verdict,
};
use spinor_forge_core::error::Error;
use spinor_forge_core::geometry::{Spacetime, Tetrad, F_COMPONENT_FACTOR};
use spinor_forge_core::selftest::run_selftest;
use spinor_forge_core::{algebra, matrix};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "spinor-forge",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The convention choices frozen at build time; every report carries them so
/// numbers can be compared across runs and versions.
#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    /// Sign of the image of the quaternion product i*j against i sigma^3.
    pub quaternion_product_sign: f64,
    /// Matrix image of the ideal-generating idempotent.
    pub rep_idempotent_projector: &'static str,
    /// Factor relating rotation components of the paravector square to the
    /// closed form eps_{ijk} h^i_mu h^j_nu.
    pub f_component_factor: f64,
    /// Global sign of raising after lowering a spinor index.
    pub raise_lower_sign: f64,
}

impl Conventions {
    pub fn current() -> Self {
        Conventions {
            quaternion_product_sign: algebra::QUATERNION_PRODUCT_SIGN,
            rep_idempotent_projector: "diag(0,1)",
            f_component_factor: F_COMPONENT_FACTOR,
            raise_lower_sign: matrix::RAISE_LOWER_SIGN,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub spacetime: Option<String>,
    pub tetrad: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<String>,
    pub points: usize,
    pub seed: u64,
    pub tol_alg: f64,
    pub tol_geo: f64,
}

#[derive(Debug, Serialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub conventions: Conventions,
    pub config: ConfigEcho,
    pub points: Vec<[f64; 4]>,
    pub suites: Vec<Suite>,
    /// Per-point frame-condition residuals, aligned with `points`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub frame_records: Vec<FrameResiduals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub overall: Verdict,
}

impl ReportDocument {
    pub fn overall_verdict(suites: &[Suite]) -> Verdict {
        let all: Vec<CheckResult> = suites.iter().flat_map(|s| s.checks.clone()).collect();
        worst_verdict(&all)
    }

    pub fn to_json(&self) -> String {
        // route through Value so object keys come out sorted (serde_json's
        // default map is ordered); floats print shortest round-trip
        let value = serde_json::to_value(self).expect("report serialization");
        let mut s = serde_json::to_string_pretty(&value).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} (schema {})",
            self.tool.name, self.tool.version, self.schema_version
        );
        let _ = writeln!(out, "command: {}", self.config.command);
        if let Some(s) = &self.config.spacetime {
            let tetrad = self.config.tetrad.as_deref().unwrap_or("-");
            let _ = writeln!(out, "configuration: {s}/{tetrad}");
        }
        let _ = writeln!(
            out,
            "conventions: quaternion_product_sign={} rep_idempotent={} f_factor={} raise_lower={}",
            self.conventions.quaternion_product_sign,
            self.conventions.rep_idempotent_projector,
            self.conventions.f_component_factor,
            self.conventions.raise_lower_sign,
        );
        let _ = writeln!(
            out,
            "points: {}  seed: {}  tol_alg: {:e}  tol_geo: {:e}",
            self.config.points, self.config.seed, self.config.tol_alg, self.config.tol_geo
        );
        for suite in &self.suites {
            let _ = writeln!(out, "suite {}:", suite.name);
            for c in &suite.checks {
                let verdict = match c.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Inconclusive => "INCONCLUSIVE",
                    Verdict::Fail => "FAIL",
                };
                let _ = writeln!(
                    out,
                    "  {verdict:<12} {:<28} max {:>12.4e}  tol {:>8.1e}",
                    c.name, c.max_residual, c.threshold
                );
            }
        }
        if let Some(c) = &self.classification {
            let name = match c {
                Classification::Teleparallel => "TELEPARALLEL",
                Classification::GeodesicFermi => "GEODESIC_FERMI",
                Classification::InertialE0Only => "INERTIAL_E0_ONLY",
                Classification::None => "NONE",
            };
            let _ = writeln!(out, "classification: {name}");
        }
        let overall = match self.overall {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(out, "overall: {overall}");
        out
    }
}

/// Build the self-test report document.
pub fn selftest_report(seed: u64, corrupt: bool) -> ReportDocument {
    let result = run_selftest(seed, corrupt);
    let suites = vec![Suite {
        name: "algebra-selftest".to_string(),
        checks: result.checks,
    }];
    let overall = ReportDocument::overall_verdict(&suites);
    ReportDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        conventions: Conventions::current(),
        config: ConfigEcho {
            command: "algebra-selftest".to_string(),
            spacetime: None,
            tetrad: None,
            mass: None,
            config_path: None,
            points: 0,
            seed,
            tol_alg: 0.0,
            tol_geo: 0.0,
        },
        points: Vec::new(),
        suites,
        frame_records: Vec::new(),
        classification: None,
        overall,
    }
}

pub struct ReportParams {
    pub points: usize,
    pub seed: u64,
    pub tol_alg: f64,
    pub tol_geo: f64,
    pub mass: Option<f64>,
    pub config_path: Option<String>,
}

/// Run the geometry, connection and frame-condition suites for a
/// configuration and assemble the report.
pub fn build_report(
    s: &Spacetime,
    t: &Tetrad,
    params: &ReportParams,
) -> Result<ReportDocument, Error> {
    let points = s.sample_points(params.points, params.seed);
    if points.len() < params.points {
        return Err(Error::Config(format!(
            "could only draw {} of {} sample points inside the domain",
            points.len(),
            params.points
        )));
    }

    let geometry = Suite {
        name: "geometry".to_string(),
        checks: run_geometry_suite(s, t, &points, params.tol_alg, params.tol_geo)?,
    };
    let connection = Suite {
        name: "connection".to_string(),
        checks: run_connection_suite(s, t, &points, params.tol_alg, params.tol_geo)?,
    };
    let frame_report = run_checks(s, t, &points, params.tol_geo)?;
    let frame = Suite {
        name: "frame-conditions".to_string(),
        checks: frame_report.aggregates.clone(),
    };
    let frame_records = frame_report.records.clone();

    let suites = vec![geometry, connection, frame];
    let overall = ReportDocument::overall_verdict(&suites);
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        conventions: Conventions::current(),
        config: ConfigEcho {
            command: "report".to_string(),
            spacetime: Some(s.name().to_string()),
            tetrad: Some(t.name().to_string()),
            mass: params.mass,
            config_path: params.config_path.clone(),
            points: params.points,
            seed: params.seed,
            tol_alg: params.tol_alg,
            tol_geo: params.tol_geo,
        },
        points,
        suites,
        frame_records,
        classification: Some(frame_report.classification),
        overall,
    })
}
