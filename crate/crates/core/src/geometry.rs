//! Numerical Lorentzian geometry: metrics (built-in and expression-backed),
//! tetrads, Levi-Civita connection and curvature by fourth-order central
//! differences, the paravector field built from a tetrad, and the kinematic
//! decomposition of a unit timelike frame field.
//!
//! Built-in spacetimes: Minkowski in Cartesian coordinates, the
//! Schwarzschild exterior in Schwarzschild coordinates, and the spatially
//! flat matter cosmology with scale factor a(t) = t^(2/3). Each carries an
//! analytic Christoffel path; the generic finite-difference path is always
//! available and is what expression-backed metrics use.

use crate::algebra::{epsilon3, Multivector, SpacetimeBasis, ETA, SPACETIME};
use crate::error::Error;
use crate::expr::Expr;
use crate::fd::{self, Point};
use crate::linalg::{self, Mat4, MAT4_ZERO};
use crate::tolerance::TOL_ALG;
use crate::Result;

/// Connection coefficients, indexed `[alpha][nu][mu]` for Gamma^alpha_{nu mu}.
pub type Christoffel = [[[f64; 4]; 4]; 4];

/// Curvature tensor, indexed `[alpha][beta][mu][nu]` for R^alpha_{beta mu nu}.
pub type Riemann = [[[[f64; 4]; 4]; 4]; 4];

/// A spacetime defined by expressions instead of built-in formulas.
#[derive(Debug)]
pub struct CustomSpacetime {
    pub name: String,
    pub coords: [String; 4],
    /// Full symmetric table of metric component expressions.
    pub metric: Vec<Vec<Expr>>,
    /// Point admissible iff this evaluates to a positive value.
    pub domain: Option<Expr>,
    pub probe: Point,
    pub sample_box: [[f64; 2]; 4],
    /// Optional tetrad component expressions h^a_mu (rows a).
    pub tetrad: Option<Vec<Vec<Expr>>>,
}

#[derive(Debug)]
#[allow(clippy::large_enum_variant)] // one spacetime value per run
enum SpacetimeKind {
    Minkowski,
    Schwarzschild { mass: f64 },
    EinsteinDeSitter,
    Custom(CustomSpacetime),
}

/// A metric field over a coordinate chart, with domain predicate and the
/// box used for drawing sample points.
#[derive(Debug)]
pub struct Spacetime {
    name: String,
    kind: SpacetimeKind,
}

/// Margin keeping stencils away from the horizon and the axis.
const SCHWARZSCHILD_DOMAIN_MARGIN: f64 = 1.05;
const AXIS_MARGIN: f64 = 0.05;
const EDS_TIME_FLOOR: f64 = 0.05;

impl Spacetime {
    pub fn minkowski() -> Self {
        Spacetime {
            name: "minkowski".into(),
            kind: SpacetimeKind::Minkowski,
        }
    }

    pub fn schwarzschild(mass: f64) -> Self {
        Spacetime {
            name: "schwarzschild".into(),
            kind: SpacetimeKind::Schwarzschild { mass },
        }
    }

    pub fn einstein_de_sitter() -> Self {
        Spacetime {
            name: "eds".into(),
            kind: SpacetimeKind::EinsteinDeSitter,
        }
    }

    /// Wrap an expression-backed spacetime, validating the metric signature
    /// and invertibility at the probe point.
    pub fn custom(spec: CustomSpacetime) -> Result<Self> {
        let st = Spacetime {
            name: spec.name.clone(),
            kind: SpacetimeKind::Custom(spec),
        };
        let probe = match &st.kind {
            SpacetimeKind::Custom(c) => c.probe,
            _ => unreachable!(),
        };
        let g = st.metric(&probe)?;
        if !linalg::has_lorentzian_signature(&g) {
            return Err(Error::WrongMetricSignature { point: probe });
        }
        linalg::mat4_inverse(&g, &probe)?;
        Ok(st)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coord_names(&self) -> [String; 4] {
        match &self.kind {
            SpacetimeKind::Minkowski => ["t", "x", "y", "z"].map(String::from),
            SpacetimeKind::Schwarzschild { .. } => ["t", "r", "th", "ph"].map(String::from),
            SpacetimeKind::EinsteinDeSitter => ["t", "x", "y", "z"].map(String::from),
            SpacetimeKind::Custom(c) => c.coords.clone(),
        }
    }

    pub fn mass(&self) -> Option<f64> {
        match self.kind {
            SpacetimeKind::Schwarzschild { mass } => Some(mass),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match &self.kind {
            SpacetimeKind::Minkowski => true,
            SpacetimeKind::Schwarzschild { mass } => {
                let r = x[1];
                let th = x[2];
                r > 2.0 * mass * SCHWARZSCHILD_DOMAIN_MARGIN
                    && th > AXIS_MARGIN
                    && th < std::f64::consts::PI - AXIS_MARGIN
            }
            SpacetimeKind::EinsteinDeSitter => x[0] > EDS_TIME_FLOOR,
            SpacetimeKind::Custom(c) => match &c.domain {
                Some(expr) => expr.eval(x).map(|v| v > 0.0).unwrap_or(false),
                None => true,
            },
        }
    }

    /// Metric components g_{mu nu} at a point.
    pub fn metric(&self, x: &Point) -> Result<Mat4> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain { point: *x });
        }
        let mut g = MAT4_ZERO;
        match &self.kind {
            SpacetimeKind::Minkowski => {
                for mu in 0..4 {
                    g[mu][mu] = ETA[mu];
                }
            }
            SpacetimeKind::Schwarzschild { mass } => {
                let r = x[1];
                let f = 1.0 - 2.0 * mass / r;
                g[0][0] = f;
                g[1][1] = -1.0 / f;
                g[2][2] = -r * r;
                g[3][3] = -(r * x[2].sin()).powi(2);
            }
            SpacetimeKind::EinsteinDeSitter => {
                let a2 = x[0].powf(4.0 / 3.0);
                g[0][0] = 1.0;
                for i in 1..4 {
                    g[i][i] = -a2;
                }
            }
            SpacetimeKind::Custom(c) => {
                for mu in 0..4 {
                    for nu in mu..4 {
                        let v = c.metric[mu][nu].eval(x)?;
                        g[mu][nu] = v;
                        g[nu][mu] = v;
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn metric_inverse(&self, x: &Point) -> Result<Mat4> {
        linalg::mat4_inverse(&self.metric(x)?, x)
    }

    fn has_analytic_christoffel(&self) -> bool {
        !matches!(self.kind, SpacetimeKind::Custom(_))
    }

    fn christoffel_analytic(&self, x: &Point) -> Result<Christoffel> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain { point: *x });
        }
        let mut c = [[[0.0; 4]; 4]; 4];
        match &self.kind {
            SpacetimeKind::Minkowski => {}
            SpacetimeKind::Schwarzschild { mass } => {
                let m = *mass;
                let r = x[1];
                let th = x[2];
                let f = 1.0 - 2.0 * m / r;
                c[0][0][1] = m / (r * r * f);
                c[0][1][0] = c[0][0][1];
                c[1][0][0] = m * f / (r * r);
                c[1][1][1] = -m / (r * r * f);
                c[1][2][2] = -r * f;
                c[1][3][3] = -r * f * th.sin().powi(2);
                c[2][1][2] = 1.0 / r;
                c[2][2][1] = 1.0 / r;
                c[2][3][3] = -th.sin() * th.cos();
                c[3][1][3] = 1.0 / r;
                c[3][3][1] = 1.0 / r;
                c[3][2][3] = th.cos() / th.sin();
                c[3][3][2] = c[3][2][3];
            }
            SpacetimeKind::EinsteinDeSitter => {
                let t = x[0];
                let a = t.powf(2.0 / 3.0);
                let adot = (2.0 / 3.0) * t.powf(-1.0 / 3.0);
                let hub = adot / a;
                for i in 1..4 {
                    c[0][i][i] = a * adot;
                    c[i][0][i] = hub;
                    c[i][i][0] = hub;
                }
            }
            SpacetimeKind::Custom(_) => unreachable!(),
        }
        Ok(c)
    }

    /// Levi-Civita connection from central differences of the metric.
    /// Independent of the analytic formulas above.
    pub fn christoffel_from_metric(&self, x: &Point) -> Result<Christoffel> {
        let g_inv = self.metric_inverse(x)?;
        let mut dg = [MAT4_ZERO; 4];
        for nu in 0..4 {
            dg[nu] = fd::deriv(|p| self.metric(p), x, nu).map_err(stencil_err(x))?;
        }
        Ok(assemble_christoffel(&g_inv, &dg))
    }

    /// Connection coefficients Gamma^alpha_{nu mu}; analytic when the
    /// spacetime provides them, finite differences otherwise.
    pub fn christoffel(&self, x: &Point) -> Result<Christoffel> {
        if self.has_analytic_christoffel() {
            self.christoffel_analytic(x)
        } else {
            self.christoffel_from_metric(x)
        }
    }

    /// Coordinate derivatives of the connection. Analytic Christoffels are
    /// differenced directly; otherwise the derivative is assembled from
    /// first and (nested) second derivatives of the metric.
    fn christoffel_derivs(&self, x: &Point) -> Result<[Christoffel; 4]> {
        if self.has_analytic_christoffel() {
            let mut out = [[[[0.0; 4]; 4]; 4]; 4];
            for rho in 0..4 {
                out[rho] =
                    fd::deriv(|p| self.christoffel_analytic(p), x, rho).map_err(stencil_err(x))?;
            }
            return Ok(out);
        }
        let g_inv = self.metric_inverse(x)?;
        let mut dg = [MAT4_ZERO; 4];
        for nu in 0..4 {
            dg[nu] = fd::deriv(|p| self.metric(p), x, nu).map_err(stencil_err(x))?;
        }
        // second derivatives d2g[rho][nu] = d_rho d_nu g by nested stencils
        let mut d2g = [[MAT4_ZERO; 4]; 4];
        for rho in 0..4 {
            for nu in 0..4 {
                d2g[rho][nu] = fd::deriv(
                    |p| fd::deriv(|q| self.metric(q), p, nu),
                    x,
                    rho,
                )
                .map_err(stencil_err(x))?;
            }
        }
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for rho in 0..4 {
            // d_rho g^{ab} = -g^{ac} (d_rho g_{cd}) g^{db}
            let mut dginv = MAT4_ZERO;
            for a in 0..4 {
                for b in 0..4 {
                    let mut acc = 0.0;
                    for cc in 0..4 {
                        for d in 0..4 {
                            acc -= g_inv[a][cc] * dg[rho][cc][d] * g_inv[d][b];
                        }
                    }
                    dginv[a][b] = acc;
                }
            }
            for alpha in 0..4 {
                for nu in 0..4 {
                    for mu in 0..4 {
                        let mut acc = 0.0;
                        for beta in 0..4 {
                            let first =
                                dg[nu][beta][mu] + dg[mu][beta][nu] - dg[beta][nu][mu];
                            let second = d2g[rho][nu][beta][mu] + d2g[rho][mu][beta][nu]
                                - d2g[rho][beta][nu][mu];
                            acc += 0.5 * (dginv[alpha][beta] * first + g_inv[alpha][beta] * second);
                        }
                        out[rho][alpha][nu][mu] = acc;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Curvature R^alpha_{beta mu nu} =
    /// d_mu Gamma^alpha_{nu beta} - d_nu Gamma^alpha_{mu beta}
    /// + Gamma^alpha_{mu lam} Gamma^lam_{nu beta}
    /// - Gamma^alpha_{nu lam} Gamma^lam_{mu beta}.
    pub fn riemann(&self, x: &Point) -> Result<Riemann> {
        let gamma = self.christoffel(x)?;
        let dgamma = self.christoffel_derivs(x)?;
        let mut r = [[[[0.0; 4]; 4]; 4]; 4];
        for alpha in 0..4 {
            for beta in 0..4 {
                for mu in 0..4 {
                    for nu in 0..4 {
                        let mut acc = dgamma[mu][alpha][nu][beta] - dgamma[nu][alpha][mu][beta];
                        for lam in 0..4 {
                            acc += gamma[alpha][mu][lam] * gamma[lam][nu][beta]
                                - gamma[alpha][nu][lam] * gamma[lam][mu][beta];
                        }
                        r[alpha][beta][mu][nu] = acc;
                    }
                }
            }
        }
        Ok(r)
    }

    /// Ricci tensor Ric_{beta nu} = R^alpha_{beta alpha nu}.
    pub fn ricci(&self, x: &Point) -> Result<Mat4> {
        let r = self.riemann(x)?;
        let mut ric = MAT4_ZERO;
        for beta in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for alpha in 0..4 {
                    acc += r[alpha][beta][alpha][nu];
                }
                ric[beta][nu] = acc;
            }
        }
        Ok(ric)
    }

    /// Box the sampler draws from; a subset of the domain with margin for
    /// nested stencils.
    pub fn sample_box(&self) -> [[f64; 2]; 4] {
        match &self.kind {
            SpacetimeKind::Minkowski => [[-2.0, 2.0]; 4],
            SpacetimeKind::Schwarzschild { mass } => [
                [0.0, 1.0],
                [4.0 * mass, 50.0 * mass],
                [0.4, std::f64::consts::PI - 0.4],
                [0.0, 6.2],
            ],
            SpacetimeKind::EinsteinDeSitter => {
                [[0.5, 5.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]]
            }
            SpacetimeKind::Custom(c) => c.sample_box,
        }
    }

    /// Deterministic low-discrepancy sample points: Halton in bases
    /// 2, 3, 5, 7 with a seed-derived rotation per axis.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let bx = self.sample_box();
        let rot: [f64; 4] = std::array::from_fn(|i| {
            splitmix64(seed.wrapping_add(i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) as f64
                / (u64::MAX as f64 + 1.0)
        });
        const BASES: [u64; 4] = [2, 3, 5, 7];
        let mut out = Vec::with_capacity(count);
        let mut n = 1u64;
        while out.len() < count {
            let p: Point = std::array::from_fn(|i| {
                let u = (halton(n, BASES[i]) + rot[i]).fract();
                bx[i][0] + u * (bx[i][1] - bx[i][0])
            });
            n += 1;
            if self.contains(&p) {
                out.push(p);
            }
            if n > 100 * (count as u64 + 16) {
                break; // degenerate domain; return what we have
            }
        }
        out
    }
}

fn assemble_christoffel(g_inv: &Mat4, dg: &[Mat4; 4]) -> Christoffel {
    let mut c = [[[0.0; 4]; 4]; 4];
    for alpha in 0..4 {
        for nu in 0..4 {
            for mu in 0..4 {
                let mut acc = 0.0;
                for beta in 0..4 {
                    acc += 0.5
                        * g_inv[alpha][beta]
                        * (dg[nu][beta][mu] + dg[mu][beta][nu] - dg[beta][nu][mu]);
                }
                c[alpha][nu][mu] = acc;
            }
        }
    }
    c
}

fn stencil_err(x: &Point) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::OutsideDomain { .. } => Error::StencilOutsideDomain { point: *x },
        other => other,
    }
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug)]
enum TetradKind {
    Identity,
    SchwarzschildStatic,
    Comoving,
    /// Hyperbolic Gram-Schmidt on the coordinate basis; works for any metric
    /// with g_00 > 0 and is smooth where the leading minors stay regular.
    Orthonormalized,
    FromExprs(Vec<Vec<Expr>>),
}

/// An orthonormal frame field, stored through its dual components h^a_mu
/// (rows are tetrad indices, columns coordinate indices).
#[derive(Debug)]
pub struct Tetrad {
    name: String,
    kind: TetradKind,
}

impl Tetrad {
    pub fn identity() -> Self {
        Tetrad {
            name: "inertial".into(),
            kind: TetradKind::Identity,
        }
    }

    pub fn schwarzschild_static() -> Self {
        Tetrad {
            name: "static".into(),
            kind: TetradKind::SchwarzschildStatic,
        }
    }

    pub fn comoving() -> Self {
        Tetrad {
            name: "comoving".into(),
            kind: TetradKind::Comoving,
        }
    }

    pub fn orthonormalized() -> Self {
        Tetrad {
            name: "orthonormal".into(),
            kind: TetradKind::Orthonormalized,
        }
    }

    pub fn from_exprs(exprs: Vec<Vec<Expr>>) -> Self {
        Tetrad {
            name: "custom".into(),
            kind: TetradKind::FromExprs(exprs),
        }
    }

    /// The conventional frame for each built-in spacetime.
    pub fn default_for(s: &Spacetime) -> Self {
        match s.kind {
            SpacetimeKind::Minkowski => Tetrad::identity(),
            SpacetimeKind::Schwarzschild { .. } => Tetrad::schwarzschild_static(),
            SpacetimeKind::EinsteinDeSitter => Tetrad::comoving(),
            SpacetimeKind::Custom(_) => Tetrad::orthonormalized(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Components h^a_mu at a point.
    pub fn h(&self, s: &Spacetime, x: &Point) -> Result<Mat4> {
        if !s.contains(x) {
            return Err(Error::OutsideDomain { point: *x });
        }
        let mut h = MAT4_ZERO;
        match &self.kind {
            TetradKind::Identity => {
                for a in 0..4 {
                    h[a][a] = 1.0;
                }
            }
            TetradKind::SchwarzschildStatic => {
                let mass = s.mass().unwrap_or(0.0);
                let r = x[1];
                let f = 1.0 - 2.0 * mass / r;
                h[0][0] = f.sqrt();
                h[1][1] = 1.0 / f.sqrt();
                h[2][2] = r;
                h[3][3] = r * x[2].sin();
            }
            TetradKind::Comoving => {
                let a = x[0].powf(2.0 / 3.0);
                h[0][0] = 1.0;
                for i in 1..4 {
                    h[i][i] = a;
                }
            }
            TetradKind::Orthonormalized => {
                h = orthonormal_coframe(&s.metric(x)?, x)?;
            }
            TetradKind::FromExprs(exprs) => {
                for a in 0..4 {
                    for mu in 0..4 {
                        h[a][mu] = exprs[a][mu].eval(x)?;
                    }
                }
            }
        }
        Ok(h)
    }

    /// Inverse components h_a^mu (rows a), so that e_a = h_a^mu d/dx^mu.
    pub fn h_inverse(&self, s: &Spacetime, x: &Point) -> Result<Mat4> {
        let h = self.h(s, x)?;
        // h^a_mu h_b^mu = delta: the inverse-transpose of h as a matrix
        let inv = linalg::mat4_inverse(&h, x)?;
        Ok(linalg::mat4_transpose(&inv))
    }

    /// Coordinate derivatives d_nu h^a_mu, indexed `[nu]`.
    pub fn dh(&self, s: &Spacetime, x: &Point) -> Result<[Mat4; 4]> {
        let mut out = [MAT4_ZERO; 4];
        for nu in 0..4 {
            out[nu] = fd::deriv(|p| self.h(s, p), x, nu).map_err(stencil_err(x))?;
        }
        Ok(out)
    }

    /// Residual of g = h^T eta h at a point.
    pub fn metric_residual(&self, s: &Spacetime, x: &Point) -> Result<f64> {
        let h = self.h(s, x)?;
        let g = s.metric(x)?;
        let mut rebuilt = MAT4_ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for a in 0..4 {
                    acc += h[a][mu] * ETA[a] * h[a][nu];
                }
                rebuilt[mu][nu] = acc;
            }
        }
        Ok(linalg::mat4_max_abs(&linalg::mat4_sub(&rebuilt, &g)))
    }

    /// Validate the tetrad at a point against `tol`.
    pub fn validate(&self, s: &Spacetime, x: &Point, tol: f64) -> Result<()> {
        let residual = self.metric_residual(s, x)?;
        if residual > tol {
            return Err(Error::TetradMismatch {
                point: *x,
                residual,
            });
        }
        Ok(())
    }
}

/// Hyperbolic Gram-Schmidt: orthonormalize the coordinate basis against g,
/// timelike leg first, and return the dual components h^a_mu.
fn orthonormal_coframe(g: &Mat4, x: &Point) -> Result<Mat4> {
    let dot = |u: &[f64; 4], v: &[f64; 4]| {
        let mut acc = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                acc += g[mu][nu] * u[mu] * v[nu];
            }
        }
        acc
    };
    let mut frame = [[0.0f64; 4]; 4]; // frame[a] = components of e_a
    for a in 0..4 {
        let mut v = [0.0; 4];
        v[a] = 1.0;
        for b in 0..a {
            let coef = dot(&v, &frame[b]) * ETA[b];
            for mu in 0..4 {
                v[mu] -= coef * frame[b][mu];
            }
        }
        let norm2 = dot(&v, &v) * ETA[a];
        if norm2 <= 1e-12 {
            return Err(Error::WrongMetricSignature { point: *x });
        }
        let inv = 1.0 / norm2.sqrt();
        for mu in 0..4 {
            frame[a][mu] = v[mu] * inv;
        }
    }
    // frame holds h_a^mu; the coframe is its inverse transpose
    let inv = linalg::mat4_inverse(&frame, x)?;
    Ok(linalg::mat4_transpose(&inv))
}

/// The four paravector values q_mu = h^a_mu sigma_a at a point.
pub fn paravectors(t: &Tetrad, s: &Spacetime, x: &Point) -> Result<[Multivector; 4]> {
    let h = t.h(s, x)?;
    Ok(paravectors_from_components(&h))
}

/// Same with the checked partners sigma_check in place of sigma.
pub fn paravectors_check(t: &Tetrad, s: &Spacetime, x: &Point) -> Result<[Multivector; 4]> {
    let h = t.h(s, x)?;
    Ok(paravectors_check_from_components(&h))
}

pub fn paravectors_from_components(h: &Mat4) -> [Multivector; 4] {
    let b = SpacetimeBasis::get();
    std::array::from_fn(|mu| {
        let mut q = Multivector::zero(SPACETIME);
        for a in 0..4 {
            if h[a][mu] != 0.0 {
                q = q.add(&b.sigma[a].scale(h[a][mu]));
            }
        }
        q
    })
}

pub fn paravectors_check_from_components(h: &Mat4) -> [Multivector; 4] {
    let b = SpacetimeBasis::get();
    std::array::from_fn(|mu| {
        let mut q = Multivector::zero(SPACETIME);
        for a in 0..4 {
            if h[a][mu] != 0.0 {
                q = q.add(&b.sigma_check[a].scale(h[a][mu]));
            }
        }
        q
    })
}

/// Symmetric and antisymmetric parts of the table q_mu qcheck_nu.
pub struct QTensorSquare {
    pub sym: [[Multivector; 4]; 4],
    pub antisym: [[Multivector; 4]; 4],
}

/// Split q_mu qcheck_nu into its symmetric part (minus the metric times the
/// identity) and its antisymmetric, bivector-valued part.
pub fn q_tensor_square(t: &Tetrad, s: &Spacetime, x: &Point) -> Result<QTensorSquare> {
    let q = paravectors(t, s, x)?;
    let qc = paravectors_check(t, s, x)?;
    let prod: [[Multivector; 4]; 4] =
        std::array::from_fn(|mu| std::array::from_fn(|nu| &q[mu] * &qc[nu]));
    let sym = std::array::from_fn(|mu| {
        std::array::from_fn(|nu| prod[mu][nu].add(&prod[nu][mu]).scale(0.5))
    });
    let antisym = std::array::from_fn(|mu| {
        std::array::from_fn(|nu| prod[mu][nu].sub(&prod[nu][mu]).scale(0.5))
    });
    Ok(QTensorSquare { sym, antisym })
}

/// Frozen factor relating the extracted rotation components to the
/// closed form eps_{ijk} h^i_mu h^j_nu (see `f_closed_form`).
pub const F_COMPONENT_FACTOR: f64 = -1.0;

/// Coefficients of i sigma_k (k = 1..3 mapped to index 0..2) in an even
/// multivector.
pub fn rotation_bivector_components(p: &Multivector) -> [f64; 3] {
    // i sigma_1 = m2 m3, i sigma_2 = -m1 m3, i sigma_3 = m1 m2
    [p.coeff(0b1100), -p.coeff(0b1010), p.coeff(0b0110)]
}

/// The rotation components F^k_{mu nu} of the antisymmetric part of the
/// paravector square, indexed `[k][mu][nu]`.
pub fn f_components(t: &Tetrad, s: &Spacetime, x: &Point) -> Result<[Mat4; 3]> {
    let sq = q_tensor_square(t, s, x)?;
    let mut out = [MAT4_ZERO; 3];
    for mu in 0..4 {
        for nu in 0..4 {
            let c = rotation_bivector_components(&sq.antisym[mu][nu]);
            for k in 0..3 {
                out[k][mu][nu] = c[k];
            }
        }
    }
    Ok(out)
}

/// Closed form F_COMPONENT_FACTOR * eps_{ijk} h^i_mu h^j_nu for comparison
/// with the extracted components.
pub fn f_closed_form(h: &Mat4) -> [Mat4; 3] {
    let mut out = [MAT4_ZERO; 3];
    for k in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let e = epsilon3(i, j, k);
                        if e != 0.0 {
                            acc += e * h[i + 1][mu] * h[j + 1][nu];
                        }
                    }
                }
                out[k][mu][nu] = F_COMPONENT_FACTOR * acc;
            }
        }
    }
    out
}

/// Kinematic decomposition of a unit timelike frame field.
pub struct FrameKinematics {
    /// Acceleration one-form a_mu.
    pub acceleration: [f64; 4],
    /// Rotation two-form, antisymmetric.
    pub rotation: Mat4,
    /// Shear, symmetric and orthogonal to the frame.
    pub shear: Mat4,
    /// Expansion scalar.
    pub expansion: f64,
    /// Projector p_{mu nu} onto the local rest space.
    pub projector: Mat4,
    /// Max residual of the reassembled covariant derivative.
    pub reassembly_residual: f64,
}

/// Decompose the covariant derivative of the one-form dual to `z` into
/// acceleration, rotation, shear and expansion parts. `z` must be unit
/// timelike at `x` (within `TOL_ALG`).
pub fn frame_kinematics<F>(s: &Spacetime, z: F, x: &Point) -> Result<FrameKinematics>
where
    F: Fn(&Point) -> Result<[f64; 4]>,
{
    let g = s.metric(x)?;
    let g_inv = s.metric_inverse(x)?;
    let zx = z(x)?;
    let mut norm = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            norm += g[mu][nu] * zx[mu] * zx[nu];
        }
    }
    if (norm - 1.0).abs() > TOL_ALG {
        return Err(Error::FrameNotNormalized { point: *x, norm });
    }

    let z_lower_at = |p: &Point| -> Result<[f64; 4]> {
        let gp = s.metric(p)?;
        let zp = z(p)?;
        let mut out = [0.0; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu] += gp[mu][nu] * zp[nu];
            }
        }
        Ok(out)
    };
    let z_low = z_lower_at(x)?;
    let gamma = s.christoffel(x)?;

    // nabla[mu][nu] = Z_{mu;nu}
    let mut dz = [[0.0f64; 4]; 4];
    for nu in 0..4 {
        let d: [f64; 4] = fd::deriv(z_lower_at, x, nu).map_err(stencil_err(x))?;
        dz[nu].copy_from_slice(&d);
    }
    let mut nabla = MAT4_ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = dz[nu][mu];
            for alpha in 0..4 {
                acc -= gamma[alpha][nu][mu] * z_low[alpha];
            }
            nabla[mu][nu] = acc;
        }
    }

    let z_upper = {
        let mut out = [0.0; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu] += g_inv[mu][nu] * z_low[nu];
            }
        }
        out
    };

    let mut expansion = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            expansion += g_inv[mu][nu] * nabla[mu][nu];
        }
    }
    let mut acceleration = [0.0; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            acceleration[mu] += nabla[mu][nu] * z_upper[nu];
        }
    }
    let mut projector = MAT4_ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            projector[mu][nu] = g[mu][nu] - z_low[mu] * z_low[nu];
        }
    }
    // projected derivative: p^a_mu p^b_nu Z_{a;b}
    let proj_mixed: Mat4 = {
        let mut out = MAT4_ZERO;
        for a in 0..4 {
            for mu in 0..4 {
                out[a][mu] = if a == mu { 1.0 } else { 0.0 };
                out[a][mu] -= z_upper[a] * z_low[mu];
            }
        }
        out
    };
    let mut projected = MAT4_ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += proj_mixed[a][mu] * proj_mixed[b][nu] * nabla[a][b];
                }
            }
            projected[mu][nu] = acc;
        }
    }
    let mut rotation = MAT4_ZERO;
    let mut shear = MAT4_ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            rotation[mu][nu] = 0.5 * (projected[mu][nu] - projected[nu][mu]);
            shear[mu][nu] = 0.5 * (projected[mu][nu] + projected[nu][mu])
                - expansion / 3.0 * projector[mu][nu];
        }
    }

    let mut reassembly_residual = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let rebuilt = acceleration[mu] * z_low[nu]
                + rotation[mu][nu]
                + shear[mu][nu]
                + expansion / 3.0 * projector[mu][nu];
            reassembly_residual = reassembly_residual.max((nabla[mu][nu] - rebuilt).abs());
        }
    }

    Ok(FrameKinematics {
        acceleration,
        rotation,
        shear,
        expansion,
        projector,
        reassembly_residual,
    })
}

/// The timelike tetrad leg as a frame field for [`frame_kinematics`].
pub fn tetrad_time_leg<'a>(
    t: &'a Tetrad,
    s: &'a Spacetime,
) -> impl Fn(&Point) -> Result<[f64; 4]> + 'a {
    move |p: &Point| {
        let hinv = t.h_inverse(s, p)?;
        Ok(hinv[0])
    }
}
