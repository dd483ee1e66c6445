//! Spin connection of a tetrad field and the covariant derivatives it
//! generates on spinor and even-multivector fields.
//!
//! The coefficients omega^c_{ab} (direction a, leg b, component c) come from
//! the Levi-Civita connection pushed onto the frame. They assemble into the
//! bivectors omega_{e_a} = (1/2) omega_a^{bc} m_b m_c that act on spinors by
//! one-sided multiplication and on even fields by commutator:
//!
//!   D_a phi    = d_a phi + (1/2) omega_a phi        (left ideal)
//!   D_a xidot  = d_a xidot - (1/2) xidot omega_a    (right ideal)
//!   D_a P      = d_a P + (1/2) [omega_a, P]         (even fields)
//!
//! The paravector values q_mu = h^a_mu sigma_a are column-times-conjugate
//! objects, so their derivative pairs omega with its formal adjoint:
//!
//!   D_nu q_mu = d_nu q_mu + (1/2) omega_nu q_mu + (1/2) q_mu adj(omega_nu)
//!
//! and subtracting Gamma^alpha_{nu mu} q_alpha from it gives a residual that
//! vanishes identically (the tetrad postulate in paravector form). That
//! identity also inverts: the connection is recoverable from the q field
//! alone, see [`omega_from_q`].

use crate::algebra::{Multivector, SpacetimeBasis, ETA, SPACETIME};
use crate::fd::{self, Point};
use crate::geometry::{paravectors, paravectors_check, Christoffel, Spacetime, Tetrad};
use crate::ideals::{AlgebraicSpinor, DottedSpinor};
use crate::linalg::Mat4;
use crate::matrix::{epsilon, rep, C2Matrix};
use crate::Result;

/// Spin connection data at a single point.
pub struct SpinConnection {
    pub point: Point,
    /// Tetrad components h^a_mu.
    pub h: Mat4,
    /// Inverse components h_a^mu.
    pub h_inv: Mat4,
    /// Levi-Civita coefficients Gamma^alpha_{nu mu}.
    pub gamma: Christoffel,
    /// `coeffs[a][b][c]` = omega^c_{ab}, the e_c component of D_{e_a} e_b.
    pub coeffs: [[[f64; 4]; 4]; 4],
    /// Bivectors omega_{e_a}.
    pub omega: [Multivector; 4],
    /// Their 2x2 matrix images.
    pub omega_matrix: [C2Matrix; 4],
    /// Coordinate-frame versions omega_mu = h^a_mu omega_{e_a}.
    pub omega_coord: [Multivector; 4],
    /// Max violation of omega_{abc} = -omega_{cba} (metric compatibility).
    pub antisymmetry_residual: f64,
}

/// Build the spin connection of a tetrad at a point.
pub fn spin_connection(s: &Spacetime, t: &Tetrad, x: &Point) -> Result<SpinConnection> {
    t.validate(s, x, crate::tolerance::TOL_ALG.max(1e-8))?;
    let h = t.h(s, x)?;
    let h_inv = t.h_inverse(s, x)?;
    let dh = t.dh(s, x)?;
    let gamma = s.christoffel(x)?;

    // omega^c_{ab} = h^c_gam (h_a^nu d_nu h_b^gam + h_a^nu Gam^gam_{nu mu} h_b^mu)
    let mut coeffs = [[[0.0f64; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut acc = 0.0;
                for gam in 0..4 {
                    // note dh[nu][b][gam] stores d_nu h^b_gam of the coframe;
                    // the frame-vector derivative needs d_nu h_b^gam, obtained
                    // from d(h_inv) = -h_inv dh h_inv.
                    let mut inner = 0.0;
                    for nu in 0..4 {
                        let mut d_hinv = 0.0;
                        for p in 0..4 {
                            for q in 0..4 {
                                d_hinv -= h_inv[b][p] * dh[nu][q][p] * h_inv[q][gam];
                            }
                        }
                        inner += h_inv[a][nu] * d_hinv;
                        for mu in 0..4 {
                            inner += h_inv[a][nu] * gamma[gam][nu][mu] * h_inv[b][mu];
                        }
                    }
                    acc += h[c][gam] * inner;
                }
                coeffs[a][b][c] = acc;
            }
        }
    }

    let mut antisymmetry_residual = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let v = ETA[a] * coeffs[b][c][a] + ETA[c] * coeffs[b][a][c];
                antisymmetry_residual = antisymmetry_residual.max(v.abs());
            }
        }
    }

    let basis = SpacetimeBasis::get();
    let omega: [Multivector; 4] = std::array::from_fn(|a| {
        let mut out = Multivector::zero(SPACETIME);
        for b in 0..4 {
            for c in b + 1..4 {
                // omega_a^{bc} = eta^{cc} omega^b_{ac}, antisymmetrized over
                // (b,c) so stencil noise cannot leak into the scalar blade
                let upper_bc = ETA[c] * coeffs[a][c][b];
                let upper_cb = ETA[b] * coeffs[a][b][c];
                let coef = 0.5 * (upper_bc - upper_cb);
                if coef != 0.0 {
                    out = out.add(&(&basis.m_lower[b] * &basis.m_lower[c]).scale(coef));
                }
            }
        }
        out
    });
    let omega_matrix: [C2Matrix; 4] = std::array::from_fn(|a| rep(&omega[a]).expect("bivector"));
    let omega_coord: [Multivector; 4] = std::array::from_fn(|mu| {
        let mut out = Multivector::zero(SPACETIME);
        for a in 0..4 {
            if h[a][mu] != 0.0 {
                out = out.add(&omega[a].scale(h[a][mu]));
            }
        }
        out
    });

    Ok(SpinConnection {
        point: *x,
        h,
        h_inv,
        gamma,
        coeffs,
        omega,
        omega_matrix,
        omega_coord,
        antisymmetry_residual,
    })
}

impl SpinConnection {
    /// D_{e_a} e_b as a vector, from the coefficients.
    pub fn frame_leg_deriv(&self, a: usize, b: usize) -> Multivector {
        let basis = SpacetimeBasis::get();
        let mut out = Multivector::zero(SPACETIME);
        for c in 0..4 {
            if self.coeffs[a][b][c] != 0.0 {
                out = out.add(&basis.m_lower[c].scale(self.coeffs[a][b][c]));
            }
        }
        out
    }

    /// Same derivative through the bivector action (1/2)[omega_a, e_b].
    pub fn frame_leg_deriv_commutator(&self, a: usize, b: usize) -> Multivector {
        let basis = SpacetimeBasis::get();
        self.omega[a]
            .commutator(&basis.m_lower[b])
            .unwrap()
            .scale(0.5)
    }

    /// Coordinate-direction derivative of a frame leg: (1/2)[omega_nu, e_b].
    pub fn coord_leg_deriv(&self, nu: usize, b: usize) -> Multivector {
        let basis = SpacetimeBasis::get();
        self.omega_coord[nu]
            .commutator(&basis.m_lower[b])
            .unwrap()
            .scale(0.5)
    }
}

/// Residuals of the two adjoint relations obeyed by connection bivectors:
/// the algebraic adjoint maps to the matrix conjugate transpose, and the
/// matrix image is fixed by the epsilon-transpose sandwich.
pub struct AdjointResiduals {
    pub adjoint_vs_dagger: f64,
    pub epsilon_sandwich: f64,
}

pub fn hermitian_checks(sc: &SpinConnection) -> AdjointResiduals {
    let basis = SpacetimeBasis::get();
    let eps = epsilon();
    let mut adjoint_vs_dagger = 0.0f64;
    let mut epsilon_sandwich = 0.0f64;
    for a in 0..4 {
        let adj = basis.dagger(&sc.omega[a]);
        let lhs = rep(&adj).expect("bivector adjoint stays even");
        let rhs = sc.omega_matrix[a].dagger();
        adjoint_vs_dagger = adjoint_vs_dagger.max(lhs.sub(&rhs).max_abs());
        let sandwich = eps.mul(&sc.omega_matrix[a].transpose()).mul(&eps);
        epsilon_sandwich = epsilon_sandwich.max(sc.omega_matrix[a].sub(&sandwich).max_abs());
    }
    AdjointResiduals {
        adjoint_vs_dagger,
        epsilon_sandwich,
    }
}

/// Directional derivative d_{e_a} of a multivector field, coefficientwise in
/// the fixed algebra basis.
fn frame_directional_deriv<F>(sc: &SpinConnection, field: F, a: usize) -> Result<Multivector>
where
    F: Fn(&Point) -> Result<Multivector>,
{
    let mut out = Multivector::zero(SPACETIME);
    for nu in 0..4 {
        if sc.h_inv[a][nu] != 0.0 {
            let d = fd::deriv(&field, &sc.point, nu)?;
            out = out.add(&d.scale(sc.h_inv[a][nu]));
        }
    }
    Ok(out)
}

/// Covariant derivative of a left-ideal spinor field along e_a.
pub fn cov_deriv_spinor<F>(sc: &SpinConnection, field: F, a: usize) -> Result<AlgebraicSpinor>
where
    F: Fn(&Point) -> Result<AlgebraicSpinor>,
{
    let raw = |p: &Point| Ok(field(p)?.value().clone());
    let d = frame_directional_deriv(sc, raw, a)?;
    let phi = field(&sc.point)?;
    let value = d.add(&(&sc.omega[a] * phi.value()).scale(0.5));
    AlgebraicSpinor::new(value)
}

/// Covariant derivative of a right-ideal (dotted) spinor field along e_a.
pub fn cov_deriv_dotted<F>(sc: &SpinConnection, field: F, a: usize) -> Result<DottedSpinor>
where
    F: Fn(&Point) -> Result<DottedSpinor>,
{
    let raw = |p: &Point| Ok(field(p)?.value().clone());
    let d = frame_directional_deriv(sc, raw, a)?;
    let xi = field(&sc.point)?;
    let value = d.sub(&(xi.value() * &sc.omega[a]).scale(0.5));
    DottedSpinor::new(value)
}

/// Covariant derivative of an even multivector field along e_a.
pub fn cov_deriv_even<F>(sc: &SpinConnection, field: F, a: usize) -> Result<Multivector>
where
    F: Fn(&Point) -> Result<Multivector>,
{
    let d = frame_directional_deriv(sc, &field, a)?;
    let p = field(&sc.point)?;
    Ok(d.add(&sc.omega[a].commutator(&p)?.scale(0.5)))
}

/// Covariant derivative of an even field along a coordinate direction.
pub fn cov_deriv_even_coord<F>(sc: &SpinConnection, field: F, nu: usize) -> Result<Multivector>
where
    F: Fn(&Point) -> Result<Multivector>,
{
    let d = fd::deriv(&field, &sc.point, nu)?;
    let p = field(&sc.point)?;
    Ok(d.add(&sc.omega_coord[nu].commutator(&p)?.scale(0.5)))
}

fn q_component_field<'a>(
    t: &'a Tetrad,
    s: &'a Spacetime,
    mu: usize,
) -> impl Fn(&Point) -> Result<Multivector> + 'a {
    move |p: &Point| Ok(paravectors(t, s, p)?[mu].clone())
}

/// Spinorial derivative of q_mu along coordinate direction nu:
/// d_nu q_mu + (1/2) omega_nu q_mu + (1/2) q_mu adj(omega_nu).
pub fn paravector_deriv(
    s: &Spacetime,
    t: &Tetrad,
    sc: &SpinConnection,
    mu: usize,
    nu: usize,
) -> Result<Multivector> {
    let basis = SpacetimeBasis::get();
    let d = fd::deriv(q_component_field(t, s, mu), &sc.point, nu)?;
    let q = paravectors(t, s, &sc.point)?;
    let omega = &sc.omega_coord[nu];
    let adj = basis.dagger(omega);
    Ok(d
        .add(&(omega * &q[mu]).scale(0.5))
        .add(&(&q[mu] * &adj).scale(0.5)))
}

/// Derivative of q_mu with the plain commutator rule (the rule for generic
/// even fields). Differs from [`paravector_deriv`] by the boost part of
/// omega; the two coincide exactly when the time leg is parallel.
pub fn paravector_deriv_commutator(
    s: &Spacetime,
    t: &Tetrad,
    sc: &SpinConnection,
    mu: usize,
    nu: usize,
) -> Result<Multivector> {
    cov_deriv_even_coord(sc, q_component_field(t, s, mu), nu)
}

/// Total derivative residual: [`paravector_deriv`] minus
/// Gamma^alpha_{nu mu} q_alpha. Vanishes identically.
pub fn total_deriv_q(
    s: &Spacetime,
    t: &Tetrad,
    sc: &SpinConnection,
    mu: usize,
    nu: usize,
) -> Result<Multivector> {
    let d = paravector_deriv(s, t, sc, mu, nu)?;
    let q = paravectors(t, s, &sc.point)?;
    let mut out = d;
    for alpha in 0..4 {
        let coef = sc.gamma[alpha][nu][mu];
        if coef != 0.0 {
            out = out.sub(&q[alpha].scale(coef));
        }
    }
    Ok(out)
}

/// Index-raised paravectors q^mu = g^{mu nu} q_nu at a point.
pub fn paravectors_upper(t: &Tetrad, s: &Spacetime, x: &Point) -> Result<[Multivector; 4]> {
    let g_inv = s.metric_inverse(x)?;
    let q = paravectors(t, s, x)?;
    Ok(std::array::from_fn(|mu| {
        let mut out = Multivector::zero(SPACETIME);
        for nu in 0..4 {
            if g_inv[mu][nu] != 0.0 {
                out = out.add(&q[nu].scale(g_inv[mu][nu]));
            }
        }
        out
    }))
}

/// Reconstruct the coordinate-frame connection bivector from the paravector
/// field alone:
///
///   omega_rho = (1/2) (d_rho q^mu + Gamma^mu_{rho tau} q^tau) qcheck_mu.
///
/// Agrees with `omega_coord[rho]` of the geometric construction.
pub fn omega_from_q(
    s: &Spacetime,
    t: &Tetrad,
    sc: &SpinConnection,
    rho: usize,
) -> Result<Multivector> {
    let upper_field = |mu: usize| {
        move |p: &Point| {
            let up = paravectors_upper(t, s, p)?;
            Ok(up[mu].clone())
        }
    };
    let q_up = paravectors_upper(t, s, &sc.point)?;
    let q_check = paravectors_check(t, s, &sc.point)?;
    let mut out = Multivector::zero(SPACETIME);
    for mu in 0..4 {
        let mut term = fd::deriv(upper_field(mu), &sc.point, rho)?;
        for tau in 0..4 {
            let coef = sc.gamma[mu][rho][tau];
            if coef != 0.0 {
                term = term.add(&q_up[tau].scale(coef));
            }
        }
        out = out.add(&(&term * &q_check[mu]).scale(0.5));
    }
    Ok(out)
}

/// Residuals of the two contraction identities of the paravector field:
/// q^mu qcheck_mu = -4 and q^mu B qcheck_mu = 0 for any bivector B (checked
/// with B = omega_rho on both the algebra and the matrix side).
pub struct TraceResiduals {
    pub q_contraction: f64,
    pub sandwich: f64,
    pub sandwich_matrix: f64,
}

pub fn trace_identities(
    s: &Spacetime,
    t: &Tetrad,
    sc: &SpinConnection,
    rho: usize,
) -> Result<TraceResiduals> {
    let q_up = paravectors_upper(t, s, &sc.point)?;
    let q_check = paravectors_check(t, s, &sc.point)?;
    let mut contraction = Multivector::scalar(SPACETIME, 4.0);
    let mut sandwich = Multivector::zero(SPACETIME);
    for mu in 0..4 {
        contraction = contraction.add(&(&q_up[mu] * &q_check[mu]));
        sandwich = sandwich.add(&(&(&q_up[mu] * &sc.omega_coord[rho]) * &q_check[mu]));
    }
    let mut sandwich_m = C2Matrix::zero();
    for mu in 0..4 {
        let qm = rep(&q_up[mu]).expect("even");
        let qc = rep(&q_check[mu]).expect("even");
        sandwich_m = sandwich_m.add(&qm.mul(&rep(&sc.omega_coord[rho]).unwrap()).mul(&qc));
    }
    Ok(TraceResiduals {
        q_contraction: contraction.max_abs(),
        sandwich: sandwich.max_abs(),
        sandwich_matrix: sandwich_m.max_abs(),
    })
}

/// Residual of the commutator identity
/// omega^c_{ab} e_c - (1/2) omega_a e_b + (1/2) e_b omega_a = 0.
pub fn commutator_identity_residual(sc: &SpinConnection, a: usize, b: usize) -> f64 {
    sc.frame_leg_deriv(a, b)
        .sub(&sc.frame_leg_deriv_commutator(a, b))
        .max_abs()
}

/// The 2x2 matrix image of the commutator identity, assembled purely from
/// matrix data: omega^c_{ab} S_c - (1/2) Omega_a S_b - (1/2) S_b Omega_a^H,
/// with S_c the images of the paravector basis.
pub fn commutator_identity_matrix_residual(sc: &SpinConnection, a: usize, b: usize) -> f64 {
    let basis = SpacetimeBasis::get();
    let s_mat: [C2Matrix; 4] = std::array::from_fn(|c| rep(&basis.sigma[c]).unwrap());
    let mut lhs = C2Matrix::zero();
    for c in 0..4 {
        if sc.coeffs[a][b][c] != 0.0 {
            lhs = lhs.add(&s_mat[c].scale(sc.coeffs[a][b][c].into()));
        }
    }
    let omega = &sc.omega_matrix[a];
    let term1 = omega.mul(&s_mat[b]).scale(0.5.into());
    let term2 = s_mat[b].mul(&omega.dagger()).scale(0.5.into());
    lhs.sub(&term1).sub(&term2).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::paravectors_from_components;
    use crate::tolerance::{TOL_EXACT, TOL_GEO};

    fn configs() -> Vec<(Spacetime, Tetrad)> {
        vec![
            (Spacetime::minkowski(), Tetrad::identity()),
            (Spacetime::schwarzschild(1.0), Tetrad::schwarzschild_static()),
            (Spacetime::einstein_de_sitter(), Tetrad::comoving()),
        ]
    }

    #[test]
    fn minkowski_connection_vanishes() {
        let s = Spacetime::minkowski();
        let t = Tetrad::identity();
        let sc = spin_connection(&s, &t, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        for a in 0..4 {
            assert!(sc.omega[a].max_abs() < 1e-12);
        }
        assert!(sc.antisymmetry_residual < 1e-12);
    }

    #[test]
    fn eds_boost_connection() {
        // comoving frame in the matter cosmology: omega_{e_i} = (adot/a) sigma_i
        let s = Spacetime::einstein_de_sitter();
        let t = Tetrad::comoving();
        let x = [1.0, 0.3, -0.2, 0.1];
        let sc = spin_connection(&s, &t, &x).unwrap();
        let b = SpacetimeBasis::get();
        let hubble = 2.0 / 3.0;
        assert!(sc.omega[0].max_abs() < 1e-9);
        for i in 1..4 {
            let expected = b.sigma_lower[i - 1].scale(hubble);
            assert!(
                sc.omega[i].sub(&expected).max_abs() < 1e-9,
                "omega_{i}: {}",
                sc.omega[i]
            );
            // index placement: omega_i^{0i} = -adot/a
            let w = ETA[i] * sc.coeffs[i][i][0];
            assert!((w + hubble).abs() < 1e-9);
        }
    }

    #[test]
    fn schwarzschild_static_has_radial_boost() {
        let s = Spacetime::schwarzschild(1.0);
        let t = Tetrad::schwarzschild_static();
        let x = [0.0, 10.0, 1.2, 0.7];
        let sc = spin_connection(&s, &t, &x).unwrap();
        // omega^1_{00} component: radial acceleration of the static frame
        assert!(sc.coeffs[0][0][1].abs() > 1e-3);
        assert!(sc.antisymmetry_residual < 1e-9);
    }

    #[test]
    fn adjoint_relations_hold_everywhere() {
        for (s, t) in configs() {
            for x in s.sample_points(8, 5) {
                let sc = spin_connection(&s, &t, &x).unwrap();
                let r = hermitian_checks(&sc);
                assert!(r.adjoint_vs_dagger <= 1e-12, "{}: {:?}", s.name(), x);
                assert!(r.epsilon_sandwich <= 1e-12, "{}: {:?}", s.name(), x);
            }
        }
    }

    #[test]
    fn adjoint_relations_on_handmade_bivectors() {
        // zero connection and a pure radial boost both satisfy the relations
        let b = SpacetimeBasis::get();
        let eps = epsilon();
        for biv in [
            Multivector::zero(SPACETIME),
            b.sigma_lower[0].clone(),
            b.sigma_lower[1].clone(),
            b.times_i(&b.sigma_lower[2]),
        ] {
            let m = rep(&biv).unwrap();
            let lhs = rep(&b.dagger(&biv)).unwrap();
            assert!(lhs.sub(&m.dagger()).max_abs() <= TOL_EXACT);
            let sandwich = eps.mul(&m.transpose()).mul(&eps);
            assert!(m.sub(&sandwich).max_abs() <= TOL_EXACT);
        }
    }

    #[test]
    fn constant_fields_have_zero_derivative_in_flat_space() {
        let s = Spacetime::minkowski();
        let t = Tetrad::identity();
        let sc = spin_connection(&s, &t, &[0.0; 4]).unwrap();
        let b = SpacetimeBasis::get();
        let phi = crate::ideals::project_left(&b.sigma_lower[0]).unwrap();
        for a in 0..4 {
            let d = cov_deriv_spinor(&sc, |_| Ok(phi.clone()), a).unwrap();
            assert!(d.value().max_abs() < 1e-12);
        }
        // constant scalar field has zero derivative anywhere ([omega, 1] = 0)
        let s2 = Spacetime::schwarzschild(1.0);
        let t2 = Tetrad::schwarzschild_static();
        let sc2 = spin_connection(&s2, &t2, &[0.0, 8.0, 1.0, 0.2]).unwrap();
        for a in 0..4 {
            let d = cov_deriv_even(&sc2, |_| Ok(Multivector::scalar(SPACETIME, 1.0)), a).unwrap();
            assert!(d.max_abs() < 1e-12);
        }
    }

    #[test]
    fn leibniz_rule_over_spinor_product() {
        // D(phi xid) = (D phi) xid + phi (D xid) on smooth sampled fields
        use crate::ideals::{project_left, project_right, spinor_product};
        let s = Spacetime::schwarzschild(1.0);
        let t = Tetrad::schwarzschild_static();
        let x = [0.1, 9.0, 1.3, 0.8];
        let sc = spin_connection(&s, &t, &x).unwrap();
        let b = SpacetimeBasis::get();
        let phi_field = |p: &Point| {
            let coef = p[1] * p[1] + p[2];
            project_left(&b.sigma_lower[0].scale(coef).add(&b.one.scale(p[3])))
        };
        let xi_field = |p: &Point| {
            let coef = p[1].sin() + 2.0;
            project_right(&b.sigma_lower[1].scale(coef).add(&b.one))
        };
        for a in 0..4 {
            let lhs = cov_deriv_even(
                &sc,
                |p| Ok(spinor_product(&phi_field(p)?, &xi_field(p)?)),
                a,
            )
            .unwrap();
            let dphi = cov_deriv_spinor(&sc, phi_field, a).unwrap();
            let dxi = cov_deriv_dotted(&sc, xi_field, a).unwrap();
            let rhs = spinor_product(&dphi, &xi_field(&x).unwrap())
                .add(&spinor_product(&phi_field(&x).unwrap(), &dxi));
            assert!(lhs.sub(&rhs).max_abs() < TOL_GEO, "a={a}");
        }
    }

    #[test]
    fn leibniz_rule_over_even_product() {
        let s = Spacetime::einstein_de_sitter();
        let t = Tetrad::comoving();
        let x = [1.4, 0.2, 0.5, -0.3];
        let sc = spin_connection(&s, &t, &x).unwrap();
        let b = SpacetimeBasis::get();
        let p_field = |p: &Point| {
            Ok(b.sigma_lower[0]
                .scale(p[0] * p[1] + 1.0)
                .add(&b.times_i(&b.sigma_lower[2]).scale(p[2])))
        };
        let q_field = |p: &Point| Ok(b.sigma_lower[1].scale(p[0]).add(&b.one.scale(2.0)));
        for a in 0..4 {
            let lhs =
                cov_deriv_even(&sc, |p| Ok(p_field(p)?.product(&q_field(p)?).unwrap()), a).unwrap();
            let dp = cov_deriv_even(&sc, p_field, a).unwrap();
            let dq = cov_deriv_even(&sc, q_field, a).unwrap();
            let rhs = dp
                .product(&q_field(&x).unwrap())
                .unwrap()
                .add(&p_field(&x).unwrap().product(&dq).unwrap());
            assert!(lhs.sub(&rhs).max_abs() < TOL_GEO, "a={a}");
        }
    }

    #[test]
    fn total_deriv_q_vanishes_identically() {
        for (s, t) in configs() {
            for x in s.sample_points(8, 9) {
                let sc = spin_connection(&s, &t, &x).unwrap();
                for mu in 0..4 {
                    for nu in 0..4 {
                        let r = total_deriv_q(&s, &t, &sc, mu, nu).unwrap();
                        assert!(
                            r.max_abs() < TOL_GEO,
                            "{} mu={mu} nu={nu} at {:?}: {:.3e}",
                            s.name(),
                            x,
                            r.max_abs()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_rule_decomposition() {
        // the even-field rule on q splits into Gamma q plus the time-leg term
        let s = Spacetime::schwarzschild(1.0);
        let t = Tetrad::schwarzschild_static();
        let x = [0.0, 7.0, 1.0, 0.5];
        let sc = spin_connection(&s, &t, &x).unwrap();
        let q = paravectors(&t, &s, &x).unwrap();
        let b = SpacetimeBasis::get();
        for mu in 0..4 {
            for nu in 0..4 {
                let lhs = paravector_deriv_commutator(&s, &t, &sc, mu, nu).unwrap();
                // e_mu (D_nu e_0) with e_mu = h^a_mu m_a and
                // D_nu e_0 = (1/2)[omega_nu, m_0]
                let mut e_mu = Multivector::zero(SPACETIME);
                for a in 0..4 {
                    e_mu = e_mu.add(&b.m_lower[a].scale(sc.h[a][mu]));
                }
                let d_e0 = sc.coord_leg_deriv(nu, 0);
                let mut rhs = e_mu.product(&d_e0).unwrap();
                for alpha in 0..4 {
                    rhs = rhs.add(&q[alpha].scale(sc.gamma[alpha][nu][mu]));
                }
                assert!(lhs.sub(&rhs).max_abs() < TOL_GEO, "mu={mu} nu={nu}");
                // and the spinorial rule drops the time-leg term entirely
                let spinorial = paravector_deriv(&s, &t, &sc, mu, nu).unwrap();
                let mut gamma_q = Multivector::zero(SPACETIME);
                for alpha in 0..4 {
                    gamma_q = gamma_q.add(&q[alpha].scale(sc.gamma[alpha][nu][mu]));
                }
                assert!(spinorial.sub(&gamma_q).max_abs() < TOL_GEO);
            }
        }
    }

    #[test]
    fn left_contracted_reconstruction_variant_yields_the_adjoint() {
        // contracting qcheck from the left instead of the right flips the
        // boost part: -(1/2) qcheck_mu (d_rho q^mu + Gamma q) = -adj(omega).
        // Documented here because it is easy to get the ordering wrong.
        let s = Spacetime::schwarzschild(1.0);
        let t = Tetrad::schwarzschild_static();
        let x = [0.0, 7.5, 1.1, 0.4];
        let sc = spin_connection(&s, &t, &x).unwrap();
        let basis = SpacetimeBasis::get();
        for rho in 0..4 {
            let q_up = paravectors_upper(&t, &s, &sc.point).unwrap();
            let q_check = paravectors_check(&t, &s, &sc.point).unwrap();
            let mut variant = Multivector::zero(SPACETIME);
            for mu in 0..4 {
                let mut term = crate::fd::deriv(
                    |p: &Point| Ok(paravectors_upper(&t, &s, p)?[mu].clone()),
                    &sc.point,
                    rho,
                )
                .unwrap();
                for tau in 0..4 {
                    term = term.add(&q_up[tau].scale(sc.gamma[mu][rho][tau]));
                }
                variant = variant.add(&(&q_check[mu] * &term).scale(-0.5));
            }
            let expected = basis.dagger(&sc.omega_coord[rho]).neg();
            assert!(
                variant.sub(&expected).max_abs() < TOL_GEO,
                "rho={rho}: {}",
                variant.sub(&expected).max_abs()
            );
        }
    }

    #[test]
    fn omega_reconstruction_agrees() {
        for (s, t) in configs() {
            for x in s.sample_points(6, 13) {
                let sc = spin_connection(&s, &t, &x).unwrap();
                for rho in 0..4 {
                    let rebuilt = omega_from_q(&s, &t, &sc, rho).unwrap();
                    let res = rebuilt.sub(&sc.omega_coord[rho]).max_abs();
                    assert!(res < TOL_GEO, "{} rho={rho} at {:?}: {res:.3e}", s.name(), x);
                }
            }
        }
    }

    #[test]
    fn trace_identities_hold() {
        for (s, t) in configs() {
            for x in s.sample_points(6, 17) {
                let sc = spin_connection(&s, &t, &x).unwrap();
                for rho in 0..4 {
                    let r = trace_identities(&s, &t, &sc, rho).unwrap();
                    assert!(r.q_contraction < 1e-9);
                    assert!(r.sandwich < 1e-9);
                    assert!(r.sandwich_matrix < 1e-9);
                }
            }
        }
    }

    #[test]
    fn commutator_identity_all_pairs() {
        for (s, t) in configs() {
            for x in s.sample_points(6, 19) {
                let sc = spin_connection(&s, &t, &x).unwrap();
                for a in 0..4 {
                    for b in 0..4 {
                        assert!(commutator_identity_residual(&sc, a, b) < TOL_GEO);
                        assert!(commutator_identity_matrix_residual(&sc, a, b) < TOL_GEO);
                    }
                }
            }
        }
    }

    #[test]
    fn paravector_assembly_lives_in_scalar_plus_sigma_span() {
        let h = [
            [1.2, 0.1, 0.0, 0.0],
            [0.0, 0.9, 0.2, 0.0],
            [0.0, 0.0, 1.1, 0.0],
            [0.3, 0.0, 0.0, 0.8],
        ];
        let q = paravectors_from_components(&h);
        for mu in 0..4 {
            // only scalar and boost-bivector blades may appear
            for (mask, &c) in q[mu].coeffs().iter().enumerate() {
                if c != 0.0 {
                    assert!(
                        mask == 0 || mask == 0b0011 || mask == 0b0101 || mask == 0b1001,
                        "mask {mask:b}"
                    );
                }
            }
        }
    }
}
