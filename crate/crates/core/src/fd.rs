//! Fourth-order central finite differences for fields over chart points.
//!
//! The step per coordinate is `max(1e-4, 1e-4 |x_i|)`, which keeps the
//! truncation and rounding contributions balanced near 1e-12 for smooth
//! analytic inputs. Values are differentiated coefficientwise through the
//! [`Linear`] trait.

use crate::algebra::Multivector;
use crate::linalg::Mat4;
use crate::Result;

pub type Point = [f64; 4];

/// Base step used by the default stencils.
pub const BASE_STEP: f64 = 1e-4;

pub fn step_for(x: &Point, axis: usize) -> f64 {
    BASE_STEP * x[axis].abs().max(1.0)
}

/// Values that can be combined linearly, coefficient by coefficient.
pub trait Linear: Clone {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self;
}

impl Linear for f64 {
    fn lin_comb(terms: &[(f64, &Self)]) -> f64 {
        terms.iter().map(|(c, v)| c * **v).sum()
    }
}

impl Linear for [f64; 4] {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let mut out = [0.0; 4];
        for (c, v) in terms {
            for i in 0..4 {
                out[i] += c * v[i];
            }
        }
        out
    }
}

impl Linear for Mat4 {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (c, v) in terms {
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += c * v[i][j];
                }
            }
        }
        out
    }
}

impl Linear for [[[f64; 4]; 4]; 4] {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let mut out = [[[0.0; 4]; 4]; 4];
        for (c, v) in terms {
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        out[i][j][k] += c * v[i][j][k];
                    }
                }
            }
        }
        out
    }
}

impl Linear for Multivector {
    fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let mut out = Multivector::zero(terms[0].1.signature());
        for (c, v) in terms {
            out = out.add(&v.scale(*c));
        }
        out
    }
}

/// Fourth-order central first derivative along `axis`.
pub fn deriv<T, F>(f: F, x: &Point, axis: usize) -> Result<T>
where
    T: Linear,
    F: Fn(&Point) -> Result<T>,
{
    let h = step_for(x, axis);
    let shifted = |k: f64| {
        let mut p = *x;
        p[axis] += k * h;
        f(&p)
    };
    let f_m2 = shifted(-2.0)?;
    let f_m1 = shifted(-1.0)?;
    let f_p1 = shifted(1.0)?;
    let f_p2 = shifted(2.0)?;
    let d = 1.0 / (12.0 * h);
    // pair the mirrored samples so constant fields cancel exactly
    Ok(T::lin_comb(&[
        (8.0 * d, &f_p1),
        (-8.0 * d, &f_m1),
        (-d, &f_p2),
        (d, &f_m2),
    ]))
}

/// Points the 5-point stencil will touch (used for domain precondition
/// checks; nested derivatives widen the margin themselves).
pub fn stencil_points(x: &Point, axis: usize) -> [Point; 4] {
    let h = step_for(x, axis);
    let mut out = [*x; 4];
    out[0][axis] -= 2.0 * h;
    out[1][axis] -= h;
    out[2][axis] += h;
    out[3][axis] += 2.0 * h;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_accuracy_on_smooth_scalars() {
        let f = |p: &Point| Ok(p[0].sin() * p[1].exp());
        let x = [0.7, 0.3, 0.0, 0.0];
        let d0: f64 = deriv(f, &x, 0).unwrap();
        let d1: f64 = deriv(f, &x, 1).unwrap();
        assert!((d0 - x[0].cos() * x[1].exp()).abs() < 1e-11);
        assert!((d1 - x[0].sin() * x[1].exp()).abs() < 1e-11);
    }

    #[test]
    fn errors_propagate_from_the_stencil() {
        let f = |p: &Point| {
            if p[0] < 0.0 {
                Err(crate::Error::OutsideDomain { point: *p })
            } else {
                Ok(p[0])
            }
        };
        assert!(deriv(f, &[1e-5, 0.0, 0.0, 0.0], 0).is_err());
        assert!(deriv(f, &[1.0, 0.0, 0.0, 0.0], 0).is_ok());
    }

    #[test]
    fn multivector_fields_differentiate_coefficientwise() {
        use crate::algebra::{SpacetimeBasis, SPACETIME};
        let b = SpacetimeBasis::get();
        let f = |p: &Point| {
            Ok(b.sigma_lower[0]
                .scale(p[0] * p[0])
                .add(&b.one.scale(p[1])))
        };
        let x = [1.5, 2.0, 0.0, 0.0];
        let d = deriv(f, &x, 0).unwrap();
        let expected = b.sigma_lower[0].scale(3.0);
        assert!(d.sub(&expected).max_abs() < 1e-10);
        assert_eq!(d.signature(), SPACETIME);
    }
}
