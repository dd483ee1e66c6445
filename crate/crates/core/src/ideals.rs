//! Minimal left and right ideals of the even spacetime algebra and the
//! algebraic spinors that live in them.
//!
//! With e = (1 + sigma_lower_3)/2, the left ideal Cl^(0) e carries the
//! undotted spinors and the right ideal e Cl^(0) the dotted ones. The
//! pseudoscalar is the complex unit on both: it is central on the even
//! subalgebra and squares to -1, which is what makes the complex coordinates
//! below well defined.
//!
//! Two bases appear. The theta basis (theta_1 = e, theta_2 = sigma_1 e)
//! defines the complex coordinates of `decompose`. The s bases used by the
//! reconstruction identities are fixed by the matrix side: s_A is the ideal
//! element whose representation has second column equal to the standard
//! basis column A, and s^B the right-ideal element whose second row is the
//! standard basis row B. Under the frozen projector rep(e) = diag(0,1) this
//! gives s_1 = -sigma_1 e, s_2 = e, s^1 = -e sigma_1, s^2 = e, and all four
//! sigma reconstruction identities hold exactly in this basis.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::algebra::{Multivector, SpacetimeBasis, SPACETIME};
use crate::error::Error;
use crate::tolerance::IDEAL_MEMBERSHIP_REL;
use crate::Result;

/// Element of the minimal left ideal Cl^(0) e (undotted spinor).
#[derive(Clone, PartialEq, Debug)]
pub struct AlgebraicSpinor(Multivector);

/// Element of the minimal right ideal e Cl^(0) (dotted spinor).
#[derive(Clone, PartialEq, Debug)]
pub struct DottedSpinor(Multivector);

/// The two complex coordinates of an undotted spinor in the theta basis.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ComplexPair {
    pub c1: Complex64,
    pub c2: Complex64,
}

fn ideal_residual(value: &Multivector, projected: &Multivector) -> Result<()> {
    let scale = value.max_abs().max(1.0e-300);
    let residual = projected.sub(value).max_abs();
    if residual > IDEAL_MEMBERSHIP_REL * scale.max(1.0) {
        return Err(Error::NotInIdeal { residual });
    }
    Ok(())
}

impl AlgebraicSpinor {
    /// Wrap an even multivector, checking membership phi e = phi.
    pub fn new(value: Multivector) -> Result<Self> {
        if value.signature() != SPACETIME {
            return Err(Error::WrongAlgebra { p: 1, q: 3 });
        }
        if !value.is_even() {
            return Err(Error::NotEven);
        }
        let e = &SpacetimeBasis::get().e_plus;
        ideal_residual(&value, &value.product(e)?)?;
        Ok(AlgebraicSpinor(value))
    }

    pub fn value(&self) -> &Multivector {
        &self.0
    }

    pub fn zero() -> Self {
        AlgebraicSpinor(Multivector::zero(SPACETIME))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        AlgebraicSpinor(self.0.add(&rhs.0))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        AlgebraicSpinor(self.0.sub(&rhs.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        AlgebraicSpinor(self.0.scale(factor))
    }

    /// Multiplication by the pseudoscalar: the complex structure on the ideal.
    pub fn times_i(&self) -> Self {
        AlgebraicSpinor(SpacetimeBasis::get().times_i(&self.0))
    }
}

impl DottedSpinor {
    /// Wrap an even multivector, checking membership e phi = phi.
    pub fn new(value: Multivector) -> Result<Self> {
        if value.signature() != SPACETIME {
            return Err(Error::WrongAlgebra { p: 1, q: 3 });
        }
        if !value.is_even() {
            return Err(Error::NotEven);
        }
        let e = &SpacetimeBasis::get().e_plus;
        ideal_residual(&value, &e.product(&value)?)?;
        Ok(DottedSpinor(value))
    }

    pub fn value(&self) -> &Multivector {
        &self.0
    }

    pub fn zero() -> Self {
        DottedSpinor(Multivector::zero(SPACETIME))
    }

    pub fn times_i(&self) -> Self {
        DottedSpinor(SpacetimeBasis::get().times_i(&self.0))
    }
}

/// Project an even element into the left ideal: P -> P e.
pub fn project_left(p: &Multivector) -> Result<AlgebraicSpinor> {
    if !p.is_even() {
        return Err(Error::NotEven);
    }
    let e = &SpacetimeBasis::get().e_plus;
    AlgebraicSpinor::new(p.product(e)?)
}

/// Project an even element into the right ideal: P -> e P.
pub fn project_right(p: &Multivector) -> Result<DottedSpinor> {
    if !p.is_even() {
        return Err(Error::NotEven);
    }
    let e = &SpacetimeBasis::get().e_plus;
    DottedSpinor::new(e.product(p)?)
}

/// theta_1 = e and theta_2 = sigma_1 e, the basis behind `decompose`.
pub fn theta_basis() -> [AlgebraicSpinor; 2] {
    let b = SpacetimeBasis::get();
    [
        AlgebraicSpinor(b.e_plus.clone()),
        AlgebraicSpinor(b.sigma_lower[0].product(&b.e_plus).unwrap()),
    ]
}

/// The undotted s basis fixed by the matrix representation (see module docs).
pub fn undotted_basis() -> [AlgebraicSpinor; 2] {
    let b = SpacetimeBasis::get();
    let theta2 = b.sigma_lower[0].product(&b.e_plus).unwrap();
    [
        AlgebraicSpinor(theta2.neg()),
        AlgebraicSpinor(b.e_plus.clone()),
    ]
}

/// The dotted s basis fixed by the matrix representation.
pub fn dotted_basis() -> [DottedSpinor; 2] {
    let b = SpacetimeBasis::get();
    let e_sigma1 = b.e_plus.product(&b.sigma_lower[0]).unwrap();
    [
        DottedSpinor(e_sigma1.neg()),
        DottedSpinor(b.e_plus.clone()),
    ]
}

/// Real coefficient vectors of theta_1, theta_2, i theta_1, i theta_2 and
/// their dual basis, precomputed once.
struct DecomposeBasis {
    duals: [Vec<f64>; 4],
}

static DECOMPOSE_BASIS: OnceLock<DecomposeBasis> = OnceLock::new();

fn decompose_basis() -> &'static DecomposeBasis {
    DECOMPOSE_BASIS.get_or_init(|| {
        let [t1, t2] = theta_basis();
        let elems = [
            t1.value().clone(),
            t1.times_i().value().clone(),
            t2.value().clone(),
            t2.times_i().value().clone(),
        ];
        let vectors: Vec<Vec<f64>> = elems.iter().map(|m| m.coeffs().to_vec()).collect();
        // Gram matrix and its inverse give the dual basis.
        let gram: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| dot(&vectors[i], &vectors[j]))
                    .collect::<Vec<f64>>()
            })
            .collect();
        let mut duals: [Vec<f64>; 4] = Default::default();
        for i in 0..4 {
            let mut rhs = [0.0; 4];
            rhs[i] = 1.0;
            let x = crate::linalg::solve(&gram, &rhs);
            let mut dual = vec![0.0; vectors[0].len()];
            for j in 0..4 {
                for (d, v) in dual.iter_mut().zip(&vectors[j]) {
                    *d += x[j] * v;
                }
            }
            duals[i] = dual;
        }
        DecomposeBasis { duals }
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Complex coordinates of a spinor in the theta basis:
/// phi = c1 theta_1 + c2 theta_2 with the pseudoscalar as imaginary unit.
pub fn decompose(phi: &AlgebraicSpinor) -> ComplexPair {
    let basis = decompose_basis();
    let coeffs = phi.value().coeffs();
    let x: [f64; 4] = std::array::from_fn(|i| dot(&basis.duals[i], coeffs));
    ComplexPair {
        c1: Complex64::new(x[0], x[1]),
        c2: Complex64::new(x[2], x[3]),
    }
}

/// Rebuild the spinor from its theta-basis coordinates.
pub fn reconstruct(pair: &ComplexPair) -> AlgebraicSpinor {
    let [t1, t2] = theta_basis();
    t1.scale(pair.c1.re)
        .add(&t1.times_i().scale(pair.c1.im))
        .add(&t2.scale(pair.c2.re))
        .add(&t2.times_i().scale(pair.c2.im))
}

/// Product of an undotted and a dotted spinor; recovers an even multivector.
/// Bilinear over the pseudoscalar complex structure.
pub fn spinor_product(phi: &AlgebraicSpinor, xi: &DottedSpinor) -> Multivector {
    phi.value().product(xi.value()).unwrap()
}

/// Assemble an even element from complex components on the s bases:
/// P = sum over A,B of (`x[A][B]` + i `y[A][B]`) s_A s^B.
pub fn pauli_from_components(x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> Multivector {
    let s = undotted_basis();
    let sd = dotted_basis();
    let mut out = Multivector::zero(SPACETIME);
    for a in 0..2 {
        for b in 0..2 {
            let base = spinor_product(&s[a], &sd[b]);
            out = out.add(&base.scale(x[a][b]));
            out = out.add(&SpacetimeBasis::get().times_i(&base).scale(y[a][b]));
        }
    }
    out
}

struct ComponentBasis {
    duals: [Vec<f64>; 8],
}

static COMPONENT_BASIS: OnceLock<ComponentBasis> = OnceLock::new();

fn component_basis() -> &'static ComponentBasis {
    COMPONENT_BASIS.get_or_init(|| {
        let s = undotted_basis();
        let sd = dotted_basis();
        let mut elems = Vec::with_capacity(8);
        for a in 0..2 {
            for b in 0..2 {
                let base = spinor_product(&s[a], &sd[b]);
                let ibase = SpacetimeBasis::get().times_i(&base);
                elems.push(base);
                elems.push(ibase);
            }
        }
        let vectors: Vec<Vec<f64>> = elems.iter().map(|m| m.coeffs().to_vec()).collect();
        let gram: Vec<Vec<f64>> = (0..8)
            .map(|i| (0..8).map(|j| dot(&vectors[i], &vectors[j])).collect())
            .collect();
        let mut duals: [Vec<f64>; 8] = Default::default();
        for i in 0..8 {
            let mut rhs = [0.0; 8];
            rhs[i] = 1.0;
            let sol = crate::linalg::solve(&gram, &rhs);
            let mut dual = vec![0.0; vectors[0].len()];
            for j in 0..8 {
                for (d, v) in dual.iter_mut().zip(&vectors[j]) {
                    *d += sol[j] * v;
                }
            }
            duals[i] = dual;
        }
        ComponentBasis { duals }
    })
}

/// Real and imaginary component tables on the s bases.
pub type ComponentTables = ([[f64; 2]; 2], [[f64; 2]; 2]);

/// Inverse of [`pauli_from_components`]: requires an even input.
pub fn components_of_pauli(p: &Multivector) -> Result<ComponentTables> {
    if !p.is_even() {
        return Err(Error::NotEven);
    }
    let basis = component_basis();
    let coeffs = p.coeffs();
    let mut x = [[0.0; 2]; 2];
    let mut y = [[0.0; 2]; 2];
    let mut idx = 0;
    for a in 0..2 {
        for b in 0..2 {
            x[a][b] = dot(&basis.duals[idx], coeffs);
            y[a][b] = dot(&basis.duals[idx + 1], coeffs);
            idx += 2;
        }
    }
    Ok((x, y))
}
