//! Frame-condition checks over a sampled spacetime/tetrad configuration and
//! the classification built from them.
//!
//! Each check produces a residual per sample point; a check passes when the
//! max residual stays at or below its threshold and fails only above ten
//! times the threshold, with an inconclusive band in between so that stencil
//! noise cannot flip a verdict. The classification looks at the frame
//! constancy ladder: all legs parallel (teleparallel), time leg geodesic
//! with the spatial legs carried rigidly along it (geodesic transport), or
//! a parallel time leg only.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Multivector, SpacetimeBasis, SPACETIME};
use crate::connection::{
    self, commutator_identity_matrix_residual, commutator_identity_residual, hermitian_checks,
    spin_connection, SpinConnection,
};
use crate::fd::{self, Point};
use crate::geometry::{
    f_closed_form, f_components, frame_kinematics, q_tensor_square, tetrad_time_leg, Spacetime,
    Tetrad,
};
use crate::tolerance::FAIL_MARGIN;
use crate::Result;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

pub fn verdict_for(residual: f64, threshold: f64) -> Verdict {
    if residual <= threshold {
        Verdict::Pass
    } else if residual > FAIL_MARGIN * threshold {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// One named check with its aggregate residual over all sample points.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

impl CheckResult {
    pub fn new(name: &str, max_residual: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            max_residual,
            threshold,
            verdict: verdict_for(max_residual, threshold),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Residuals of the frame conditions at a single point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameResiduals {
    /// max_a |D_{e_a} e_0|: the time leg is parallel in every direction.
    pub inertial: f64,
    /// max_a |Ric(e_0, e_a)|: necessary condition for the above.
    pub ricci_condition: f64,
    /// max_{nu,i} |D_nu (e_i e_0)|: constancy of the sigma elements.
    pub pauli_constancy: f64,
    /// Equivalent formulation max |D_nu e_i + e_i (D_nu e_0) e_0|.
    pub pauli_constancy_alt: f64,
    /// |D_{e_0} e_0|: the time leg is geodesic.
    pub geodesic: f64,
    /// max_i |D_{e_0} e_i|: spatial legs carried without rotation along e_0.
    pub fermi: f64,
    /// max_a |D_{e_0} e_a|: both of the above at once.
    pub frame_constancy: f64,
    /// max_{a,b} |D_{e_a} e_b|: fully parallel frame.
    pub teleparallel: f64,
    /// max |R^a_{b mu nu}|: reported with the teleparallel corollary.
    pub riemann_max: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Classification {
    #[serde(rename = "TELEPARALLEL")]
    Teleparallel,
    #[serde(rename = "GEODESIC_FERMI")]
    GeodesicFermi,
    #[serde(rename = "INERTIAL_E0_ONLY")]
    InertialE0Only,
    #[serde(rename = "NONE")]
    None,
}

/// Checks, aggregates and classification for one configuration.
#[derive(Debug, Serialize)]
pub struct ConstraintReport {
    pub configuration: String,
    pub points: Vec<Point>,
    pub records: Vec<FrameResiduals>,
    pub aggregates: Vec<CheckResult>,
    pub classification: Classification,
}

impl ConstraintReport {
    pub fn check(&self, name: &str) -> &CheckResult {
        self.aggregates
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("unknown check {name}"))
    }

    pub fn worst_verdict(&self) -> Verdict {
        worst_verdict(&self.aggregates)
    }
}

fn frame_residuals(sc: &SpinConnection, s: &Spacetime, x: &Point) -> Result<FrameResiduals> {
    let basis = SpacetimeBasis::get();

    let leg_norm = |a: usize, b: usize| -> f64 {
        let mut m = 0.0f64;
        for c in 0..4 {
            m = m.max(sc.coeffs[a][b][c].abs());
        }
        m
    };

    let mut inertial = 0.0f64;
    let mut frame_constancy = 0.0f64;
    let mut teleparallel = 0.0f64;
    for a in 0..4 {
        inertial = inertial.max(leg_norm(a, 0));
        frame_constancy = frame_constancy.max(leg_norm(0, a));
        for b in 0..4 {
            teleparallel = teleparallel.max(leg_norm(a, b));
        }
    }
    let geodesic = leg_norm(0, 0);
    let mut fermi = 0.0f64;
    for i in 1..4 {
        fermi = fermi.max(leg_norm(0, i));
    }

    // Pauli constancy: D_nu sigma_i = (1/2)[omega_nu, sigma_i], and the
    // equivalent leg form D_nu e_i = -e_i (D_nu e_0) e_0.
    let mut pauli_constancy = 0.0f64;
    let mut pauli_constancy_alt = 0.0f64;
    for nu in 0..4 {
        for i in 1..4 {
            let d_sigma = sc.omega_coord[nu]
                .commutator(&basis.sigma[i])?
                .scale(0.5);
            pauli_constancy = pauli_constancy.max(d_sigma.max_abs());

            let d_ei = sc.coord_leg_deriv(nu, i);
            let d_e0 = sc.coord_leg_deriv(nu, 0);
            let sandwich = basis.m_lower[i].product(&d_e0)?.product(&basis.m_lower[0])?;
            pauli_constancy_alt = pauli_constancy_alt.max(d_ei.add(&sandwich).max_abs());
        }
    }

    let riemann = s.riemann(x)?;
    let mut riemann_max = 0.0f64;
    let mut ricci = [[0.0f64; 4]; 4];
    for alpha in 0..4 {
        for beta in 0..4 {
            for mu in 0..4 {
                for nu in 0..4 {
                    riemann_max = riemann_max.max(riemann[alpha][beta][mu][nu].abs());
                    if alpha == mu {
                        ricci[beta][nu] += riemann[alpha][beta][mu][nu];
                    }
                }
            }
        }
    }
    let mut ricci_condition = 0.0f64;
    for a in 0..4 {
        let mut v = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                v += ricci[mu][nu] * sc.h_inv[0][mu] * sc.h_inv[a][nu];
            }
        }
        ricci_condition = ricci_condition.max(v.abs());
    }

    Ok(FrameResiduals {
        inertial,
        ricci_condition,
        pauli_constancy,
        pauli_constancy_alt,
        geodesic,
        fermi,
        frame_constancy,
        teleparallel,
        riemann_max,
    })
}

/// Evaluate every frame condition at the given points and classify.
pub fn run_checks(
    s: &Spacetime,
    t: &Tetrad,
    points: &[Point],
    tol_geo: f64,
) -> Result<ConstraintReport> {
    let records: Vec<FrameResiduals> = points
        .par_iter()
        .map(|x| {
            let sc = spin_connection(s, t, x)?;
            frame_residuals(&sc, s, x)
        })
        .collect::<Result<Vec<_>>>()?;

    let max_of = |f: fn(&FrameResiduals) -> f64| -> f64 {
        records.iter().map(f).fold(0.0f64, f64::max)
    };

    let inertial = CheckResult::new("inertial-e0", max_of(|r| r.inertial), tol_geo);
    let ricci = CheckResult::new("ricci-condition", max_of(|r| r.ricci_condition), tol_geo);
    let pauli = CheckResult::new("pauli-constancy", max_of(|r| r.pauli_constancy), tol_geo);
    let pauli_alt = CheckResult::new(
        "pauli-constancy-alt",
        max_of(|r| r.pauli_constancy_alt),
        tol_geo,
    );
    let geodesic = CheckResult::new("geodesic-e0", max_of(|r| r.geodesic), tol_geo);
    let fermi = CheckResult::new("fermi-transport", max_of(|r| r.fermi), tol_geo);
    let frame_const = CheckResult::new("frame-constancy", max_of(|r| r.frame_constancy), tol_geo);
    let teleparallel = CheckResult::new("teleparallel", max_of(|r| r.teleparallel), tol_geo);
    let riemann_flat = CheckResult::new("riemann-flat", max_of(|r| r.riemann_max), tol_geo);

    // Consistency of the two Pauli-constancy formulations: same verdict and
    // residuals within an order of magnitude of each other.
    assert_eq!(
        pauli.verdict, pauli_alt.verdict,
        "inconsistent Pauli-constancy formulations"
    );
    if pauli.max_residual.max(pauli_alt.max_residual) > 1e-13 {
        let ratio = pauli.max_residual.max(1e-300) / pauli_alt.max_residual.max(1e-300);
        assert!(
            (0.1..=10.0).contains(&ratio),
            "Pauli-constancy residuals diverge: {ratio}"
        );
    }

    // Implication ladder on definite verdicts.
    if teleparallel.passed() {
        assert!(inertial.passed(), "teleparallel frame with non-parallel e0");
        assert!(geodesic.passed() && fermi.passed());
        assert!(
            riemann_flat.passed(),
            "teleparallel frame over curved spacetime"
        );
    }
    if inertial.passed() {
        assert!(geodesic.passed());
        assert!(
            ricci.verdict != Verdict::Fail,
            "parallel e0 with Ric(e0,.) != 0"
        );
    }

    let classification = if teleparallel.passed() {
        Classification::Teleparallel
    } else if geodesic.passed() && fermi.passed() {
        Classification::GeodesicFermi
    } else if inertial.passed() {
        Classification::InertialE0Only
    } else {
        Classification::None
    };

    Ok(ConstraintReport {
        configuration: format!("{}/{}", s.name(), t.name()),
        points: points.to_vec(),
        records,
        aggregates: vec![
            inertial,
            ricci,
            pauli,
            pauli_alt,
            geodesic,
            fermi,
            frame_const,
            teleparallel,
            riemann_flat,
        ],
        classification,
    })
}

/// Residuals of the pointwise geometric identities at one point.
struct GeometrySuiteResiduals {
    tetrad_relation: f64,
    metric_compatibility: f64,
    q_square_symmetric: f64,
    q_square_antisym_grade: f64,
    f_closed_form: f64,
    riemann_antisymmetry: f64,
    riemann_first_bianchi: f64,
    kinematics_reassembly: f64,
}

fn geometry_suite_residuals(
    s: &Spacetime,
    t: &Tetrad,
    x: &Point,
) -> Result<GeometrySuiteResiduals> {
    let tetrad_relation = t.metric_residual(s, x)?;

    // covariant constancy of the metric under the produced connection
    let gamma = s.christoffel(x)?;
    let g = s.metric(x)?;
    let mut metric_compatibility = 0.0f64;
    for alpha in 0..4 {
        let dg: [[f64; 4]; 4] = fd::deriv(|p| s.metric(p), x, alpha)?;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut v = dg[mu][nu];
                for lam in 0..4 {
                    v -= gamma[lam][alpha][mu] * g[lam][nu] + gamma[lam][alpha][nu] * g[mu][lam];
                }
                metric_compatibility = metric_compatibility.max(v.abs());
            }
        }
    }

    let sq = q_tensor_square(t, s, x)?;
    let one = Multivector::scalar(SPACETIME, 1.0);
    let mut q_square_symmetric = 0.0f64;
    let mut q_square_antisym_grade = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let expected = one.scale(-g[mu][nu]);
            q_square_symmetric = q_square_symmetric.max(sq.sym[mu][nu].sub(&expected).max_abs());
            let anti = &sq.antisym[mu][nu];
            q_square_antisym_grade =
                q_square_antisym_grade.max(anti.sub(&anti.grade(2)?).max_abs());
        }
    }

    let h = t.h(s, x)?;
    let f = f_components(t, s, x)?;
    let closed = f_closed_form(&h);
    let mut f_residual = 0.0f64;
    for k in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                f_residual = f_residual.max((f[k][mu][nu] - closed[k][mu][nu]).abs());
            }
        }
    }

    let riemann = s.riemann(x)?;
    let mut riemann_antisymmetry = 0.0f64;
    let mut riemann_first_bianchi = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    riemann_antisymmetry =
                        riemann_antisymmetry.max((riemann[a][b][m][n] + riemann[a][b][n][m]).abs());
                    riemann_first_bianchi = riemann_first_bianchi.max(
                        (riemann[a][b][m][n] + riemann[a][m][n][b] + riemann[a][n][b][m]).abs(),
                    );
                }
            }
        }
    }

    let kin = frame_kinematics(s, tetrad_time_leg(t, s), x)?;

    Ok(GeometrySuiteResiduals {
        tetrad_relation,
        metric_compatibility,
        q_square_symmetric,
        q_square_antisym_grade,
        f_closed_form: f_residual,
        riemann_antisymmetry,
        riemann_first_bianchi,
        kinematics_reassembly: kin.reassembly_residual,
    })
}

/// Pointwise geometric identities aggregated over the sample points.
pub fn run_geometry_suite(
    s: &Spacetime,
    t: &Tetrad,
    points: &[Point],
    tol_alg: f64,
    tol_geo: f64,
) -> Result<Vec<CheckResult>> {
    let rs: Vec<GeometrySuiteResiduals> = points
        .par_iter()
        .map(|x| geometry_suite_residuals(s, t, x))
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&GeometrySuiteResiduals) -> f64| rs.iter().map(f).fold(0.0f64, f64::max);
    Ok(vec![
        CheckResult::new("tetrad-relation", max_of(|r| r.tetrad_relation), tol_alg),
        CheckResult::new(
            "metric-compatibility",
            max_of(|r| r.metric_compatibility),
            tol_geo,
        ),
        CheckResult::new(
            "q-square-symmetric",
            max_of(|r| r.q_square_symmetric),
            tol_alg,
        ),
        CheckResult::new(
            "q-square-antisym-grade",
            max_of(|r| r.q_square_antisym_grade),
            tol_alg,
        ),
        CheckResult::new("f-closed-form", max_of(|r| r.f_closed_form), tol_alg),
        CheckResult::new(
            "riemann-antisymmetry",
            max_of(|r| r.riemann_antisymmetry),
            tol_geo,
        ),
        CheckResult::new(
            "riemann-first-bianchi",
            max_of(|r| r.riemann_first_bianchi),
            tol_geo,
        ),
        CheckResult::new(
            "kinematics-reassembly",
            max_of(|r| r.kinematics_reassembly),
            tol_geo,
        ),
    ])
}

struct ConnectionSuiteResiduals {
    antisymmetry: f64,
    adjoint_vs_dagger: f64,
    epsilon_sandwich: f64,
    total_deriv_q: f64,
    omega_reconstruction: f64,
    trace_contraction: f64,
    trace_sandwich: f64,
    trace_sandwich_matrix: f64,
    commutator_identity: f64,
    commutator_identity_matrix: f64,
}

fn connection_suite_residuals(
    s: &Spacetime,
    t: &Tetrad,
    x: &Point,
) -> Result<ConnectionSuiteResiduals> {
    let sc = spin_connection(s, t, x)?;
    let adj = hermitian_checks(&sc);

    let mut total_deriv = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            total_deriv =
                total_deriv.max(connection::total_deriv_q(s, t, &sc, mu, nu)?.max_abs());
        }
    }
    let mut omega_rec = 0.0f64;
    let mut trace_contraction = 0.0f64;
    let mut trace_sandwich = 0.0f64;
    let mut trace_sandwich_matrix = 0.0f64;
    for rho in 0..4 {
        let rebuilt = connection::omega_from_q(s, t, &sc, rho)?;
        omega_rec = omega_rec.max(rebuilt.sub(&sc.omega_coord[rho]).max_abs());
        let tr = connection::trace_identities(s, t, &sc, rho)?;
        trace_contraction = trace_contraction.max(tr.q_contraction);
        trace_sandwich = trace_sandwich.max(tr.sandwich);
        trace_sandwich_matrix = trace_sandwich_matrix.max(tr.sandwich_matrix);
    }
    let mut commutator = 0.0f64;
    let mut commutator_matrix = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            commutator = commutator.max(commutator_identity_residual(&sc, a, b));
            commutator_matrix =
                commutator_matrix.max(commutator_identity_matrix_residual(&sc, a, b));
        }
    }

    Ok(ConnectionSuiteResiduals {
        antisymmetry: sc.antisymmetry_residual,
        adjoint_vs_dagger: adj.adjoint_vs_dagger,
        epsilon_sandwich: adj.epsilon_sandwich,
        total_deriv_q: total_deriv,
        omega_reconstruction: omega_rec,
        trace_contraction,
        trace_sandwich,
        trace_sandwich_matrix,
        commutator_identity: commutator,
        commutator_identity_matrix: commutator_matrix,
    })
}

/// Spin-connection identity suite aggregated over the sample points.
pub fn run_connection_suite(
    s: &Spacetime,
    t: &Tetrad,
    points: &[Point],
    tol_alg: f64,
    tol_geo: f64,
) -> Result<Vec<CheckResult>> {
    let rs: Vec<ConnectionSuiteResiduals> = points
        .par_iter()
        .map(|x| connection_suite_residuals(s, t, x))
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&ConnectionSuiteResiduals) -> f64| rs.iter().map(f).fold(0.0f64, f64::max);
    Ok(vec![
        CheckResult::new(
            "connection-antisymmetry",
            max_of(|r| r.antisymmetry),
            tol_geo,
        ),
        CheckResult::new("adjoint-vs-dagger", max_of(|r| r.adjoint_vs_dagger), tol_alg),
        CheckResult::new("epsilon-sandwich", max_of(|r| r.epsilon_sandwich), tol_alg),
        CheckResult::new("total-deriv-q", max_of(|r| r.total_deriv_q), tol_geo),
        CheckResult::new(
            "omega-reconstruction",
            max_of(|r| r.omega_reconstruction),
            tol_geo,
        ),
        CheckResult::new(
            "trace-contraction",
            max_of(|r| r.trace_contraction),
            tol_alg,
        ),
        CheckResult::new("trace-sandwich", max_of(|r| r.trace_sandwich), tol_alg),
        CheckResult::new(
            "trace-sandwich-matrix",
            max_of(|r| r.trace_sandwich_matrix),
            tol_alg,
        ),
        CheckResult::new(
            "commutator-identity",
            max_of(|r| r.commutator_identity),
            tol_geo,
        ),
        CheckResult::new(
            "commutator-identity-matrix",
            max_of(|r| r.commutator_identity_matrix),
            tol_geo,
        ),
    ])
}

/// Worst verdict across a list of checks.
pub fn worst_verdict(checks: &[CheckResult]) -> Verdict {
    let mut worst = Verdict::Pass;
    for c in checks {
        match (worst, c.verdict) {
            (_, Verdict::Pass) => {}
            (Verdict::Fail, _) => {}
            (_, v) => worst = v,
        }
    }
    worst
}
