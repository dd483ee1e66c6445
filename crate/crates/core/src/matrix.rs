//! Faithful 2x2 complex representation of the even spacetime algebra, plus
//! the two-component column/row spinor layer with the antisymmetric epsilon
//! metric for raising and lowering spinor indices.
//!
//! Conventions frozen here (and echoed in report output):
//!   * `rep` sends the upper sigma elements to the standard Pauli matrices
//!     and the pseudoscalar to i*Id. Consequently `rep` of the idempotent
//!     (1 + sigma_lower_3)/2 is diag(0,1).
//!   * The column spinor of an ideal element is the second column of its
//!     representation (the image of the left ideal has a zero first column
//!     under the projector above); dotted spinors take the second row.
//!   * With the index conventions below, raising after lowering is the
//!     identity (sign +1).

use num_complex::Complex64;

use crate::algebra::{Multivector, SPACETIME};
use crate::error::Error;
use crate::Result;

/// 2x2 complex matrix, row major.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct C2Matrix {
    pub m: [[Complex64; 2]; 2],
}

/// Two-component complex column spinor.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ColumnSpinor(pub [Complex64; 2]);

/// Two-component complex row spinor.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RowSpinor(pub [Complex64; 2]);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl C2Matrix {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        C2Matrix { m }
    }

    pub fn zero() -> Self {
        C2Matrix { m: [[ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        C2Matrix {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = C2Matrix::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] *= factor;
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        C2Matrix {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    pub fn transpose(&self) -> Self {
        C2Matrix {
            m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]],
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        let mut out = 0.0f64;
        for row in &self.m {
            for v in row {
                out = out.max(v.re.abs()).max(v.im.abs());
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> ColumnSpinor {
        ColumnSpinor([self.m[0][j], self.m[1][j]])
    }

    pub fn row(&self, i: usize) -> RowSpinor {
        RowSpinor([self.m[i][0], self.m[i][1]])
    }
}

/// Standard Pauli matrices, index 0..2 for sigma^1..sigma^3.
pub fn pauli_matrix(k: usize) -> C2Matrix {
    match k {
        0 => C2Matrix::new([[ZERO, ONE], [ONE, ZERO]]),
        1 => C2Matrix::new([[ZERO, -I], [I, ZERO]]),
        2 => C2Matrix::new([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("pauli index out of range"),
    }
}

/// The antisymmetric spinor metric, equal to i * sigma^2.
pub fn epsilon() -> C2Matrix {
    C2Matrix::new([[ZERO, ONE], [-ONE, ZERO]])
}

/// epsilon with both indices down or both up: adiag(1,-1).
fn eps_component(a: usize, b: usize) -> Complex64 {
    match (a, b) {
        (0, 1) => ONE,
        (1, 0) => -ONE,
        _ => ZERO,
    }
}

/// Frozen global sign of raise after lower (see module docs).
pub const RAISE_LOWER_SIGN: f64 = 1.0;

/// Even-subalgebra blade masks in Cl(1,3).
mod mask {
    pub const S1: usize = 0b0011; // m0 m1 = sigma^1
    pub const S2: usize = 0b0101; // m0 m2 = sigma^2
    pub const S3: usize = 0b1001; // m0 m3 = sigma^3
    pub const IS1: usize = 0b1100; // m2 m3 = -i sigma^1
    pub const IS2: usize = 0b1010; // m1 m3 = +i sigma^2
    pub const IS3: usize = 0b0110; // m1 m2 = -i sigma^3
    pub const I5: usize = 0b1111; // m0 m1 m2 m3 = -pseudoscalar
}

/// Representation of an even element as a 2x2 complex matrix.
///
/// An algebra homomorphism: rep(1) = Id, rep(sigma^k) = pauli_matrix(k-1),
/// rep(pseudoscalar) = i Id. Errors when the input has a nonzero odd part.
pub fn rep(p: &Multivector) -> Result<C2Matrix> {
    if p.signature() != SPACETIME {
        return Err(Error::WrongAlgebra { p: 1, q: 3 });
    }
    if !p.is_even() {
        return Err(Error::NotEven);
    }
    let c = p.coeffs();
    let z0 = Complex64::new(c[0], -c[mask::I5]);
    let z = [
        Complex64::new(c[mask::S1], -c[mask::IS1]),
        Complex64::new(c[mask::S2], c[mask::IS2]),
        Complex64::new(c[mask::S3], -c[mask::IS3]),
    ];
    let mut out = C2Matrix::identity().scale(z0);
    for k in 0..3 {
        out = out.add(&pauli_matrix(k).scale(z[k]));
    }
    Ok(out)
}

/// Two-sided inverse of [`rep`].
pub fn unrep(m: &C2Matrix) -> Multivector {
    let half = Complex64::new(0.5, 0.0);
    let z0 = (m.m[0][0] + m.m[1][1]) * half;
    let z1 = (m.m[0][1] + m.m[1][0]) * half;
    let z2 = (m.m[0][1] - m.m[1][0]) * half * I; // (m10 - m01)/(2i)
    let z3 = (m.m[0][0] - m.m[1][1]) * half;
    let mut coeffs = vec![0.0; SPACETIME.blade_count()];
    coeffs[0] = z0.re;
    coeffs[mask::I5] = -z0.im;
    coeffs[mask::S1] = z1.re;
    coeffs[mask::IS1] = -z1.im;
    coeffs[mask::S2] = z2.re;
    coeffs[mask::IS2] = z2.im;
    coeffs[mask::S3] = z3.re;
    coeffs[mask::IS3] = -z3.im;
    Multivector::from_coeffs(SPACETIME, coeffs).unwrap()
}

/// Column spinor carried by a left-ideal element: the second column of its
/// matrix representation.
pub fn column_of(p: &Multivector) -> Result<ColumnSpinor> {
    Ok(rep(p)?.column(1))
}

/// Row spinor carried by a right-ideal element: the second row.
pub fn row_of(p: &Multivector) -> Result<RowSpinor> {
    Ok(rep(p)?.row(1))
}

/// The dotted (covariant) partner of an undotted column spinor: the
/// componentwise conjugate row multiplied by epsilon.
pub fn dotted_of(xi: &ColumnSpinor) -> RowSpinor {
    let conj = [xi.0[0].conj(), xi.0[1].conj()];
    let e = epsilon();
    RowSpinor([
        conj[0] * e.m[0][0] + conj[1] * e.m[1][0],
        conj[0] * e.m[0][1] + conj[1] * e.m[1][1],
    ])
}

/// Lower an undotted index: phi_A = phi^B eps_{BA}.
pub fn lower_index(phi: &ColumnSpinor) -> RowSpinor {
    let mut out = [ZERO; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a] += phi.0[b] * eps_component(b, a);
        }
    }
    RowSpinor(out)
}

/// Raise an undotted index: phi^B = eps^{BA} phi_A.
pub fn raise_index(phi: &RowSpinor) -> ColumnSpinor {
    let mut out = [ZERO; 2];
    for b in 0..2 {
        for a in 0..2 {
            out[b] += eps_component(b, a) * phi.0[a];
        }
    }
    ColumnSpinor(out)
}

/// Outer (Kronecker) product of a column and a row spinor.
pub fn kronecker(c: &ColumnSpinor, r: &RowSpinor) -> C2Matrix {
    let mut out = C2Matrix::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.m[i][j] = c.0[i] * r.0[j];
        }
    }
    out
}
