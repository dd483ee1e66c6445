//! Real Clifford algebras Cl(p,q) up to dimension six, stored as dense
//! coefficient vectors indexed by blade bitmask.
//!
//! Basis vector `k` squares to +1 for `k < p` and to -1 otherwise. Bit `k` of
//! a blade mask selects basis vector `k`; the blade is the product of its
//! vectors in increasing index order, so mask `0b0101` in Cl(1,3) is the
//! bivector `m0 m2`. Products of small-integer inputs are exact: every
//! coefficient of a product is a sum of signed products of input
//! coefficients, with signs from transposition counts and the metric.
//!
//! The module also pins down the three concrete algebras the rest of the
//! crate runs on: the spacetime algebra Cl(1,3) with its sigma elements
//! `sigma_i = m_i m_0`, the Pauli algebra Cl(3,0), and the quaternions
//! Cl(0,2), together with the embeddings of the latter two into the even
//! subalgebra of the former.

use std::fmt;
use std::sync::OnceLock;

use crate::error::Error;
use crate::Result;

/// Metric signature (p plus-squares, q minus-squares), p + q <= 6.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Signature {
    p: u32,
    q: u32,
}

/// The spacetime algebra Cl(1,3).
pub const SPACETIME: Signature = Signature { p: 1, q: 3 };
/// The Pauli algebra Cl(3,0).
pub const PAULI: Signature = Signature { p: 3, q: 0 };
/// The quaternion algebra Cl(0,2).
pub const QUATERNION: Signature = Signature { p: 0, q: 2 };

impl Signature {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p + q > 6 {
            return Err(Error::SignatureTooLarge { p, q });
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dim(&self) -> u32 {
        self.p + self.q
    }

    /// Number of blade coefficients, 2^(p+q).
    pub fn blade_count(&self) -> usize {
        1usize << self.dim()
    }

    /// Square of basis vector `k`: +1 or -1.
    pub fn basis_square(&self, k: u32) -> f64 {
        if k < self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign and resulting mask of the product of two basis blades.
    ///
    /// The sign combines the transpositions needed to interleave the two
    /// index lists with the metric squares of the annihilated pairs.
    pub fn blade_product(&self, a: usize, b: usize) -> (f64, usize) {
        let mut sign = reorder_sign(a, b);
        let mut common = a & b;
        while common != 0 {
            let k = common.trailing_zeros();
            sign *= self.basis_square(k);
            common &= common - 1;
        }
        (sign, a ^ b)
    }
}

/// Parity of the transpositions that bring the concatenation of two
/// increasing index lists back into increasing order.
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Element of Cl(p,q): one real coefficient per basis blade.
#[derive(Clone, PartialEq, Debug)]
pub struct Multivector {
    sig: Signature,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![0.0; sig.blade_count()],
        }
    }

    pub fn scalar(sig: Signature, value: f64) -> Self {
        let mut mv = Multivector::zero(sig);
        mv.coeffs[0] = value;
        mv
    }

    /// Basis vector with the given index.
    pub fn basis_vector(sig: Signature, index: usize) -> Result<Self> {
        if index >= sig.dim() as usize {
            return Err(Error::BasisIndexOutOfRange {
                index,
                dim: sig.dim(),
            });
        }
        Ok(Multivector::basis_blade(sig, 1 << index))
    }

    /// Unit blade for a given mask (assumed < 2^dim).
    pub fn basis_blade(sig: Signature, mask: usize) -> Self {
        let mut mv = Multivector::zero(sig);
        mv.coeffs[mask] = 1.0;
        mv
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != sig.blade_count() {
            return Err(Error::CoefficientCount {
                got: coeffs.len(),
                expected: sig.blade_count(),
            });
        }
        Ok(Multivector { sig, coeffs })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    fn check_signature(&self, rhs: &Self) -> Result<()> {
        if self.sig != rhs.sig {
            return Err(Error::SignatureMismatch {
                p1: self.sig.p,
                q1: self.sig.q,
                p2: rhs.sig.p,
                q2: rhs.sig.q,
            });
        }
        Ok(())
    }

    /// Geometric (Clifford) product.
    pub fn product(&self, rhs: &Self) -> Result<Self> {
        self.check_signature(rhs)?;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &ci) in self.coeffs.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            for (j, &cj) in rhs.coeffs.iter().enumerate() {
                if cj == 0.0 {
                    continue;
                }
                let (sign, mask) = self.sig.blade_product(i, j);
                out[mask] += sign * ci * cj;
            }
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: out,
        })
    }

    /// Exterior product: the grade-(r+s) part of the product of grade-r and
    /// grade-s blades, i.e. products of disjoint blades only.
    pub fn wedge(&self, rhs: &Self) -> Result<Self> {
        self.check_signature(rhs)?;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &ci) in self.coeffs.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            for (j, &cj) in rhs.coeffs.iter().enumerate() {
                if cj == 0.0 || i & j != 0 {
                    continue;
                }
                out[i ^ j] += reorder_sign(i, j) * ci * cj;
            }
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: out,
        })
    }

    /// Scalar product: the grade-0 part of the geometric product. On vectors
    /// this is the underlying bilinear form.
    pub fn scalar_product(&self, rhs: &Self) -> Result<f64> {
        self.check_signature(rhs)?;
        let mut acc = 0.0;
        for (i, &ci) in self.coeffs.iter().enumerate() {
            if ci == 0.0 || rhs.coeffs[i] == 0.0 {
                continue;
            }
            let (sign, _) = self.sig.blade_product(i, i);
            acc += sign * ci * rhs.coeffs[i];
        }
        Ok(acc)
    }

    /// Left contraction: for grade-r by grade-s inputs, the grade (s-r) part
    /// of the product (zero when r > s). Blade-wise this keeps exactly the
    /// terms where the left mask is a subset of the right mask.
    pub fn left_contraction(&self, rhs: &Self) -> Result<Self> {
        self.check_signature(rhs)?;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &ci) in self.coeffs.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            for (j, &cj) in rhs.coeffs.iter().enumerate() {
                if cj == 0.0 || i & !j != 0 {
                    continue;
                }
                let (sign, mask) = self.sig.blade_product(i, j);
                out[mask] += sign * ci * cj;
            }
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: out,
        })
    }

    /// Keep only the grade-k part.
    pub fn grade(&self, k: u32) -> Result<Self> {
        if k > self.sig.dim() {
            return Err(Error::GradeOutOfRange {
                grade: k,
                dim: self.sig.dim(),
            });
        }
        let mut mv = Multivector::zero(self.sig);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i.count_ones() == k {
                mv.coeffs[i] = c;
            }
        }
        Ok(mv)
    }

    /// Keep only even-grade blades.
    pub fn even_part(&self) -> Self {
        let mut mv = Multivector::zero(self.sig);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i.count_ones() % 2 == 0 {
                mv.coeffs[i] = c;
            }
        }
        mv
    }

    /// Keep only odd-grade blades.
    pub fn odd_part(&self) -> Self {
        let mut mv = Multivector::zero(self.sig);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i.count_ones() % 2 == 1 {
                mv.coeffs[i] = c;
            }
        }
        mv
    }

    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c == 0.0 || i.count_ones() % 2 == 0)
    }

    /// ab - ba.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(self.product(rhs)?.sub(&rhs.product(self)?))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Multivector {
            sig: self.sig,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Multivector {
            sig: self.sig,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Max absolute blade coefficient; the norm used for all residuals.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

impl fmt::Display for Multivector {
    /// Blades print as `m0^m1` with signed coefficients, ordered by mask.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if wrote {
                write!(f, " {} ", if c < 0.0 { "-" } else { "+" })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let mag = c.abs();
            if mask == 0 {
                write!(f, "{mag}")?;
            } else {
                if mag != 1.0 {
                    write!(f, "{mag}*")?;
                }
                let mut first = true;
                for k in 0..self.sig.dim() {
                    if mask & (1 << k) != 0 {
                        if !first {
                            write!(f, "^")?;
                        }
                        write!(f, "m{k}")?;
                        first = false;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: Self) -> Multivector {
        Multivector::add(self, rhs)
    }
}

impl std::ops::Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Self) -> Multivector {
        Multivector::sub(self, rhs)
    }
}

impl std::ops::Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        Multivector::neg(self)
    }
}

/// Geometric product; panics on signature mismatch (the checked form is
/// [`Multivector::product`]).
impl std::ops::Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Self) -> Multivector {
        self.product(rhs).expect("signature mismatch")
    }
}

impl std::ops::Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

/// The named elements of the spacetime algebra used everywhere downstream.
///
/// `m_lower[mu]` are the orthonormal basis vectors (m0^2 = 1, mk^2 = -1),
/// `m_upper` the reciprocal set (m^0 = m0, m^k = -mk), `m5` the pseudoscalar
/// m^0 m^1 m^2 m^3. The sigma elements generate the even subalgebra:
/// `sigma_upper[i-1] = m^i m^0`, `sigma_lower[i-1] = m_i m_0 = -sigma_upper`.
/// `sigma[a]` is the paravector basis (`sigma[0]` = 1) and `sigma_check[a]`
/// its partner with the time component negated. `e_plus`/`e_minus` are the
/// idempotents (1 +- `sigma_lower[2]`)/2.
pub struct SpacetimeBasis {
    pub m_lower: [Multivector; 4],
    pub m_upper: [Multivector; 4],
    pub m5: Multivector,
    pub sigma_upper: [Multivector; 3],
    pub sigma_lower: [Multivector; 3],
    pub sigma: [Multivector; 4],
    pub sigma_check: [Multivector; 4],
    pub e_plus: Multivector,
    pub e_minus: Multivector,
    pub one: Multivector,
}

static SPACETIME_BASIS: OnceLock<SpacetimeBasis> = OnceLock::new();

impl SpacetimeBasis {
    pub fn get() -> &'static SpacetimeBasis {
        SPACETIME_BASIS.get_or_init(SpacetimeBasis::build)
    }

    fn build() -> SpacetimeBasis {
        let sig = SPACETIME;
        let m_lower: [Multivector; 4] =
            std::array::from_fn(|mu| Multivector::basis_vector(sig, mu).unwrap());
        let m_upper: [Multivector; 4] = std::array::from_fn(|mu| {
            if mu == 0 {
                m_lower[0].clone()
            } else {
                m_lower[mu].neg()
            }
        });
        let m5 = &(&(&m_upper[0] * &m_upper[1]) * &m_upper[2]) * &m_upper[3];
        let sigma_upper: [Multivector; 3] = std::array::from_fn(|i| &m_upper[i + 1] * &m_upper[0]);
        let sigma_lower: [Multivector; 3] = std::array::from_fn(|i| &m_lower[i + 1] * &m_lower[0]);
        let one = Multivector::scalar(sig, 1.0);
        let sigma: [Multivector; 4] = std::array::from_fn(|a| {
            if a == 0 {
                one.clone()
            } else {
                sigma_lower[a - 1].clone()
            }
        });
        let sigma_check: [Multivector; 4] = std::array::from_fn(|a| {
            if a == 0 {
                one.neg()
            } else {
                sigma_lower[a - 1].clone()
            }
        });
        let half = 0.5;
        let e_plus = one.add(&sigma_lower[2]).scale(half);
        let e_minus = one.sub(&sigma_lower[2]).scale(half);
        SpacetimeBasis {
            m_lower,
            m_upper,
            m5,
            sigma_upper,
            sigma_lower,
            sigma,
            sigma_check,
            e_plus,
            e_minus,
            one,
        }
    }

    /// Pseudoscalar, the central complex unit of the even subalgebra.
    pub fn pseudoscalar(&self) -> &Multivector {
        &self.m5
    }

    /// Multiply by the pseudoscalar from the left (i is central on the even
    /// subalgebra, which is where this is used).
    pub fn times_i(&self, a: &Multivector) -> Multivector {
        &self.m5 * a
    }

    /// The v -> -m^0 v m^0 involution; on connection bivectors this is the
    /// formal Hermitian adjoint (boost parts fixed, rotation parts negated).
    pub fn dagger(&self, a: &Multivector) -> Multivector {
        (&(&self.m_upper[0] * a) * &self.m_upper[0]).neg()
    }
}

/// Minkowski metric eta_ab = diag(1,-1,-1,-1).
pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Homomorphic embedding of the Pauli algebra into the even subalgebra of
/// the spacetime algebra; basis vector i maps to m^i m^0.
pub fn embed_pauli(p: &Multivector) -> Result<Multivector> {
    if p.signature() != PAULI {
        return Err(Error::WrongAlgebra { p: 3, q: 0 });
    }
    embed_by_table(p, pauli_blade_images())
}

/// Homomorphic embedding of the quaternions into the even subalgebra of the
/// spacetime algebra: the two generators map to i sigma^1 and i sigma^2 and
/// the blade basis extends multiplicatively.
pub fn embed_quaternion(q: &Multivector) -> Result<Multivector> {
    if q.signature() != QUATERNION {
        return Err(Error::WrongAlgebra { p: 0, q: 2 });
    }
    embed_by_table(q, quaternion_blade_images())
}

fn embed_by_table(src: &Multivector, table: &[Multivector]) -> Result<Multivector> {
    let mut out = Multivector::zero(SPACETIME);
    for (mask, &c) in src.coeffs().iter().enumerate() {
        if c != 0.0 {
            out = out.add(&table[mask].scale(c));
        }
    }
    Ok(out)
}

static PAULI_IMAGES: OnceLock<Vec<Multivector>> = OnceLock::new();
static QUATERNION_IMAGES: OnceLock<Vec<Multivector>> = OnceLock::new();

fn blade_images(generators: &[Multivector]) -> Vec<Multivector> {
    let count = 1usize << generators.len();
    let mut table = Vec::with_capacity(count);
    for mask in 0..count {
        let mut img = Multivector::scalar(SPACETIME, 1.0);
        for (k, gen) in generators.iter().enumerate() {
            if mask & (1 << k) != 0 {
                img = &img * gen;
            }
        }
        table.push(img);
    }
    table
}

fn pauli_blade_images() -> &'static [Multivector] {
    PAULI_IMAGES.get_or_init(|| {
        let b = SpacetimeBasis::get();
        blade_images(&[
            b.sigma_upper[0].clone(),
            b.sigma_upper[1].clone(),
            b.sigma_upper[2].clone(),
        ])
    })
}

fn quaternion_blade_images() -> &'static [Multivector] {
    QUATERNION_IMAGES.get_or_init(|| {
        let b = SpacetimeBasis::get();
        blade_images(&[
            b.times_i(&b.sigma_upper[0]),
            b.times_i(&b.sigma_upper[1]),
        ])
    })
}

/// Sign of the image of the quaternion unit i*j against the third embedding
/// unit i sigma^3: (i sigma^1)(i sigma^2) = -(i sigma^3). Frozen here and
/// echoed in report conventions.
pub const QUATERNION_PRODUCT_SIGN: f64 = -1.0;

/// Totally antisymmetric symbol on three indices in 0..3.
pub fn epsilon3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::TOL_EXACT;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mv(sig: Signature, rng: &mut impl Rng) -> Multivector {
        let coeffs = (0..sig.blade_count())
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        Multivector::from_coeffs(sig, coeffs).unwrap()
    }

    /// Independent product oracle: blades as explicit index lists, brought to
    /// normal form by bubble sort with metric contractions.
    fn oracle_blade_product(sig: Signature, a: usize, b: usize) -> (f64, usize) {
        let mut indices: Vec<u32> = (0..sig.dim()).filter(|k| a & (1 << k) != 0).collect();
        indices.extend((0..sig.dim()).filter(|k| b & (1 << k) != 0));
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < indices.len() {
                if indices[i] > indices[i + 1] {
                    indices.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if indices[i] == indices[i + 1] {
                    sign *= sig.basis_square(indices[i]);
                    indices.drain(i..i + 2);
                    changed = true;
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        let mask = indices.iter().fold(0usize, |m, &k| m | (1 << k));
        (sign, mask)
    }

    #[test]
    fn blade_product_matches_oracle_exhaustively() {
        for sig in [SPACETIME, PAULI, QUATERNION, Signature::new(2, 3).unwrap()] {
            for a in 0..sig.blade_count() {
                for b in 0..sig.blade_count() {
                    assert_eq!(
                        sig.blade_product(a, b),
                        oracle_blade_product(sig, a, b),
                        "sig {:?} blades {a:b} {b:b}",
                        sig
                    );
                }
            }
        }
    }

    #[test]
    fn dimension_capped_at_six() {
        assert!(Signature::new(4, 3).is_err());
        assert!(Signature::new(6, 0).is_ok());
    }

    #[test]
    fn anticommutation_relations_exact() {
        let b = SpacetimeBasis::get();
        for mu in 0..4 {
            for nu in 0..4 {
                let sum = (&b.m_upper[mu] * &b.m_upper[nu]).add(&(&b.m_upper[nu] * &b.m_upper[mu]));
                let expected = if mu == nu { 2.0 * ETA[mu] } else { 0.0 };
                assert_eq!(sum, Multivector::scalar(SPACETIME, expected));
            }
        }
        // Pauli relation in Cl(3,0) itself.
        for i in 0..3 {
            for j in 0..3 {
                let si = Multivector::basis_vector(PAULI, i).unwrap();
                let sj = Multivector::basis_vector(PAULI, j).unwrap();
                let sum = (&si * &sj).add(&(&sj * &si));
                let expected = if i == j { 2.0 } else { 0.0 };
                assert_eq!(sum, Multivector::scalar(PAULI, expected));
            }
        }
    }

    #[test]
    fn product_identity_cases() {
        let b = SpacetimeBasis::get();
        assert_eq!(&b.m_upper[0] * &b.m_upper[0], b.one);
        let one = Multivector::scalar(SPACETIME, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_mv(SPACETIME, &mut rng);
            assert_eq!(&one * &a, a);
            assert_eq!(&a * &one, a);
        }
    }

    #[test]
    fn m_upper_m_upper_scalar_products() {
        let b = SpacetimeBasis::get();
        assert_eq!(b.m_upper[0].scalar_product(&b.m_upper[0]).unwrap(), 1.0);
        assert_eq!(b.m_upper[1].scalar_product(&b.m_upper[1]).unwrap(), -1.0);
        assert_eq!(b.m_upper[0].scalar_product(&b.m_upper[1]).unwrap(), 0.0);
        let v = b.m_upper[0].scale(2.0).add(&b.m_upper[1]);
        assert_eq!(v.scalar_product(&b.m_upper[0]).unwrap(), 2.0);
    }

    #[test]
    fn sigma_products_give_pseudoscalar_combinations() {
        let b = SpacetimeBasis::get();
        // sigma^1 sigma^2 = i sigma^3
        let lhs = &b.sigma_upper[0] * &b.sigma_upper[1];
        let rhs = b.times_i(&b.sigma_upper[2]);
        assert!(lhs.sub(&rhs).max_abs() <= TOL_EXACT);
        // full relation sigma^i sigma^j = i eps_ijk sigma^k + delta_ij
        for i in 0..3 {
            for j in 0..3 {
                let prod = &b.sigma_upper[i] * &b.sigma_upper[j];
                let mut expected = Multivector::scalar(SPACETIME, if i == j { 1.0 } else { 0.0 });
                for k in 0..3 {
                    let e = epsilon3(i, j, k);
                    if e != 0.0 {
                        expected = expected.add(&b.times_i(&b.sigma_upper[k]).scale(e));
                    }
                }
                assert!(prod.sub(&expected).max_abs() <= TOL_EXACT, "i={i} j={j}");
            }
        }
        // commutator form
        let comm = b.sigma_upper[0].commutator(&b.sigma_upper[1]).unwrap();
        let expected = b.times_i(&b.sigma_upper[2]).scale(2.0);
        assert!(comm.sub(&expected).max_abs() <= TOL_EXACT);
    }

    #[test]
    fn sigma_lower_is_minus_sigma_upper() {
        let b = SpacetimeBasis::get();
        for i in 0..3 {
            assert_eq!(b.sigma_lower[i], b.sigma_upper[i].neg());
        }
    }

    #[test]
    fn reciprocal_basis_constants() {
        let b = SpacetimeBasis::get();
        assert_eq!(b.m_upper[0], b.m_lower[0]);
        for k in 1..4 {
            assert_eq!(b.m_upper[k], b.m_lower[k].neg());
        }
        // the pseudoscalar is the product of the upper sigma elements
        let product = &(&b.sigma_upper[0] * &b.sigma_upper[1]) * &b.sigma_upper[2];
        assert_eq!(product, b.m5);
    }

    #[test]
    fn pseudoscalar_squares_to_minus_one_and_is_central_on_even() {
        let b = SpacetimeBasis::get();
        let i2 = &b.m5 * &b.m5;
        assert_eq!(i2, Multivector::scalar(SPACETIME, -1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let e = random_mv(SPACETIME, &mut rng).even_part();
            let d = (&b.m5 * &e).sub(&(&e * &b.m5));
            assert!(d.max_abs() <= TOL_EXACT);
        }
    }

    #[test]
    fn sigma_check_anticommutation() {
        let b = SpacetimeBasis::get();
        for a in 0..4 {
            for c in 0..4 {
                let sum =
                    (&b.sigma[a] * &b.sigma_check[c]).add(&(&b.sigma[c] * &b.sigma_check[a]));
                let expected = if a == c { -2.0 * ETA[a] } else { 0.0 };
                assert!(
                    sum.sub(&Multivector::scalar(SPACETIME, expected)).max_abs() <= TOL_EXACT,
                    "a={a} c={c}"
                );
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let b = SpacetimeBasis::get();
        assert!(b.m_upper[0].wedge(&b.m_upper[0]).unwrap().is_zero());
        // m^mu m^nu = eta(m^mu, m^nu) + m^mu ^ m^nu
        for mu in 0..4 {
            for nu in 0..4 {
                let prod = &b.m_upper[mu] * &b.m_upper[nu];
                let s = b.m_upper[mu].scalar_product(&b.m_upper[nu]).unwrap();
                let w = b.m_upper[mu].wedge(&b.m_upper[nu]).unwrap();
                let rebuilt = Multivector::scalar(SPACETIME, s).add(&w);
                assert!(prod.sub(&rebuilt).max_abs() <= TOL_EXACT);
            }
        }
        // in the Pauli algebra the sigma are grade-1, so their wedge is the
        // full product (zero scalar part) and embeds to the pseudoscalar
        // combination i sigma^3
        let s1 = Multivector::basis_vector(PAULI, 0).unwrap();
        let s2 = Multivector::basis_vector(PAULI, 1).unwrap();
        let w = s1.wedge(&s2).unwrap();
        assert!(w.sub(&(&s1 * &s2)).max_abs() <= TOL_EXACT);
        let embedded = embed_pauli(&w).unwrap();
        let expected = b.times_i(&b.sigma_upper[2]);
        assert!(embedded.sub(&expected).max_abs() <= TOL_EXACT);
    }

    #[test]
    fn left_contraction_examples() {
        let b = SpacetimeBasis::get();
        let m01 = b.m_upper[0].wedge(&b.m_upper[1]).unwrap();
        let got = b.m_upper[0].left_contraction(&m01).unwrap();
        assert!(got.sub(&b.m_upper[1]).max_abs() <= TOL_EXACT);
        // scalar contraction scales
        let s = Multivector::scalar(SPACETIME, 3.0);
        let got = s.left_contraction(&m01).unwrap();
        assert!(got.sub(&m01.scale(3.0)).max_abs() <= TOL_EXACT);
        // vector into vector is their scalar product
        let got = b.m_upper[1].left_contraction(&b.m_upper[0]).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn grade_ops() {
        let b = SpacetimeBasis::get();
        let mixed = b.m_upper[0].add(&(&b.m_upper[0] * &b.m_upper[1]));
        assert_eq!(mixed.even_part(), &b.m_upper[0] * &b.m_upper[1]);
        assert_eq!(b.m5.grade(4).unwrap(), b.m5);
        assert!(b.m5.grade(2).unwrap().is_zero());
        assert!(Multivector::scalar(SPACETIME, 1.0).grade(5).is_err());
    }

    #[test]
    fn paravector_space_does_not_close() {
        // two paravectors whose product has a grade-2 piece
        let b = SpacetimeBasis::get();
        let a = b.one.add(&b.sigma_lower[0]);
        let c = b.one.add(&b.sigma_lower[1]);
        let prod = &a * &c;
        // grade 2 in the even algebra: sigma_i themselves are grade 2 in
        // Cl(1,3); the tell-tale non-closure piece is sigma_1 sigma_2, the
        // rotation bivector m1 m2.
        let rot_part = prod.coeff(0b0110);
        assert!(rot_part.abs() > 0.5);
    }

    #[test]
    fn embed_pauli_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_mv(PAULI, &mut rng);
            let b = random_mv(PAULI, &mut rng);
            let lhs = embed_pauli(&a.product(&b).unwrap()).unwrap();
            let rhs = embed_pauli(&a).unwrap().product(&embed_pauli(&b).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).max_abs() <= 1e-12);
            assert!(lhs.is_even());
        }
        let one = Multivector::scalar(PAULI, 1.0);
        assert_eq!(embed_pauli(&one).unwrap(), Multivector::scalar(SPACETIME, 1.0));
        // basis vector i lands on m^i m^0
        let sb = SpacetimeBasis::get();
        for i in 0..3 {
            let v = Multivector::basis_vector(PAULI, i).unwrap();
            assert_eq!(embed_pauli(&v).unwrap(), sb.sigma_upper[i]);
        }
        assert!(embed_pauli(&Multivector::scalar(SPACETIME, 1.0)).is_err());
    }

    #[test]
    fn embed_quaternion_units() {
        let units: Vec<Multivector> = (0..2)
            .map(|k| Multivector::basis_vector(QUATERNION, k).unwrap())
            .collect();
        let ih = embed_quaternion(&units[0]).unwrap();
        let jh = embed_quaternion(&units[1]).unwrap();
        let minus_one = Multivector::scalar(SPACETIME, -1.0);
        assert!((&ih * &ih).sub(&minus_one).max_abs() <= TOL_EXACT);
        assert!((&jh * &jh).sub(&minus_one).max_abs() <= TOL_EXACT);
        let kh = embed_quaternion(&(&units[0] * &units[1])).unwrap();
        assert!((&kh * &kh).sub(&minus_one).max_abs() <= TOL_EXACT);
        // pairwise anticommutation
        assert!((&ih * &jh).add(&(&jh * &ih)).max_abs() <= TOL_EXACT);
        // orientation: image of i*j against i sigma^3
        let b = SpacetimeBasis::get();
        let target = b.times_i(&b.sigma_upper[2]).scale(QUATERNION_PRODUCT_SIGN);
        assert!((&ih * &jh).sub(&target).max_abs() <= TOL_EXACT);
    }

    #[test]
    fn pauli_number_splits_into_quaternion_pair() {
        // any Pauli number is Q1 + i Q2 with both parts in the quaternion
        // subalgebra (the span of 1 and the i sigma^k inside the image)
        let quaternion_masks = [0usize, 0b1100, 0b1010, 0b0110];
        let i_pauli = Multivector::basis_blade(PAULI, 0b111);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = random_mv(PAULI, &mut rng);
            let q1 = p.even_part();
            let q2 = i_pauli.neg().product(&p.odd_part()).unwrap();
            assert!(q2.is_even());
            // reassembly p = q1 + i q2 in the Pauli algebra
            let rebuilt = q1.add(&i_pauli.product(&q2).unwrap());
            assert!(rebuilt.sub(&p).max_abs() <= TOL_EXACT);
            // their spacetime images live on the quaternion blades only
            for part in [embed_pauli(&q1).unwrap(), embed_pauli(&q2).unwrap()] {
                for (mask, &c) in part.coeffs().iter().enumerate() {
                    if c != 0.0 {
                        assert!(quaternion_masks.contains(&mask), "mask {mask:b}");
                    }
                }
            }
        }
    }

    #[test]
    fn quaternion_embedding_factors_through_pauli() {
        // the direct embedding agrees with going through the even Pauli
        // subalgebra, and the image is even on both levels
        let i_pauli = Multivector::basis_blade(PAULI, 0b111);
        for k in 0..2 {
            let f = Multivector::basis_vector(QUATERNION, k).unwrap();
            let direct = embed_quaternion(&f).unwrap();
            let pauli_unit = i_pauli
                .product(&Multivector::basis_vector(PAULI, k).unwrap())
                .unwrap();
            assert!(pauli_unit.is_even());
            let via_pauli = embed_pauli(&pauli_unit).unwrap();
            assert!(direct.sub(&via_pauli).max_abs() <= TOL_EXACT, "k={k}");
            assert!(direct.is_even());
        }
    }

    #[test]
    fn embeddings_are_injective() {
        // rank test: images of the blade bases are linearly independent
        for (count, images) in [
            (8usize, pauli_blade_images()),
            (4usize, quaternion_blade_images()),
        ] {
            let rows: Vec<Vec<f64>> = (0..count).map(|m| images[m].coeffs().to_vec()).collect();
            assert_eq!(crate::linalg::rank(&rows, 1e-9), count);
        }
    }

    #[test]
    fn display_form() {
        let b = SpacetimeBasis::get();
        let v = b.m_lower[0].add(&(&b.m_lower[0] * &b.m_lower[1]).scale(-2.0));
        assert_eq!(format!("{v}"), "m0 - 2*m0^m1");
        assert_eq!(format!("{}", Multivector::zero(SPACETIME)), "0");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_mv(sig: Signature) -> impl Strategy<Value = Multivector> {
            proptest::collection::vec(-2.0f64..2.0, sig.blade_count())
                .prop_map(move |c| Multivector::from_coeffs(sig, c).unwrap())
        }

        proptest! {
            #[test]
            fn associativity_spacetime(
                a in arb_mv(SPACETIME), b in arb_mv(SPACETIME), c in arb_mv(SPACETIME)
            ) {
                let lhs = (&(&a * &b) * &c).clone();
                let rhs = (&a * &(&b * &c)).clone();
                prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12);
            }

            #[test]
            fn left_contraction_grade_rule(
                a in arb_mv(SPACETIME), b in arb_mv(SPACETIME)
            ) {
                // a |_ b equals the sum over grades of <<a>_r <b>_s>_{s-r}
                let direct = a.left_contraction(&b).unwrap();
                let mut rebuilt = Multivector::zero(SPACETIME);
                for r in 0..=4u32 {
                    for s in r..=4u32 {
                        let part = a.grade(r).unwrap().product(&b.grade(s).unwrap()).unwrap();
                        rebuilt = rebuilt.add(&part.grade(s - r).unwrap());
                    }
                }
                prop_assert!(direct.sub(&rebuilt).max_abs() <= 1e-12);
            }

            #[test]
            fn wedge_antisymmetric_on_vectors(
                x in proptest::array::uniform4(-2.0f64..2.0),
                y in proptest::array::uniform4(-2.0f64..2.0),
            ) {
                let b = SpacetimeBasis::get();
                let mut v = Multivector::zero(SPACETIME);
                let mut w = Multivector::zero(SPACETIME);
                for mu in 0..4 {
                    v = v.add(&b.m_lower[mu].scale(x[mu]));
                    w = w.add(&b.m_lower[mu].scale(y[mu]));
                }
                let vw = v.wedge(&w).unwrap();
                let wv = w.wedge(&v).unwrap();
                prop_assert!(vw.add(&wv).max_abs() <= 1e-12);
                // and the wedge is the antisymmetric half of the product
                let half = (&v * &w).sub(&(&w * &v)).scale(0.5);
                prop_assert!(vw.sub(&half).max_abs() <= 1e-12);
            }
        }
    }
}
