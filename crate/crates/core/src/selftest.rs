//! Seeded self-test battery over the algebra, ideal and representation
//! layers. This is what the CLI `algebra-selftest` command runs: the same
//! invariants the unit tests pin down, but re-evaluated at runtime with a
//! caller-chosen seed so a binary installation can vouch for itself.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    embed_pauli, embed_quaternion, epsilon3, Multivector, Signature, SpacetimeBasis, ETA, PAULI,
    QUATERNION, SPACETIME,
};
use crate::checks::CheckResult;
use crate::ideals;
use crate::matrix;
use crate::tolerance::TOL_EXACT;

#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Run the whole battery. `corrupt_table` flips one sign in the reference
/// product table, a hook for exercising the failure path end to end.
pub fn run_selftest(seed: u64, corrupt_table: bool) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64, threshold: f64| {
        checks.push(CheckResult::new(name, residual, threshold));
    };

    push(
        "blade-product-table",
        product_table_residual(corrupt_table),
        0.0,
    );
    push("associativity", associativity_residual(&mut rng), 1e-12);
    push("vector-anticommutation", anticommutation_residual(), 0.0);
    push("sigma-products", sigma_product_residual(), 0.0);
    push(
        "paravector-anticommutation",
        paravector_relation_residual(),
        0.0,
    );
    push("pseudoscalar", pseudoscalar_residual(&mut rng), 0.0);
    push("paravector-nonclosure", paravector_nonclosure_witness(), 0.0);
    push(
        "embed-pauli-homomorphism",
        embed_pauli_residual(&mut rng),
        1e-12,
    );
    push("embed-quaternion", embed_quaternion_residual(), TOL_EXACT);
    push("ideal-idempotents", idempotent_residual(), 0.0);
    push("ideal-closure", ideal_closure_residual(&mut rng), 1e-12);
    push("ideal-reconstruction", reconstruction_residual(), TOL_EXACT);
    push(
        "decompose-roundtrip",
        decompose_roundtrip_residual(&mut rng),
        1e-12,
    );
    push(
        "decompose-complex-linearity",
        complex_linearity_residual(&mut rng),
        1e-12,
    );
    push("ideal-span-rank", ideal_rank_residual(), 0.0);
    push("rep-generators", rep_generator_residual(), 0.0);
    push("rep-homomorphism", rep_homomorphism_residual(&mut rng), 1e-12);
    push("rep-faithful", rep_rank_residual(), 0.0);
    push(
        "rep-roundtrip-dyadic",
        rep_roundtrip_dyadic_residual(&mut rng),
        0.0,
    );
    push("epsilon-identities", epsilon_residual(), 0.0);
    push(
        "spinor-product-vs-kronecker",
        iota_kronecker_residual(&mut rng),
        1e-12,
    );
    push("index-raise-lower-sign", raise_lower_residual(&mut rng), 0.0);
    push(
        "component-roundtrip",
        component_roundtrip_residual(&mut rng),
        1e-12,
    );

    let passed = checks.iter().all(|c| c.passed());
    SelftestReport {
        seed,
        checks,
        passed,
    }
}

fn random_mv(sig: Signature, rng: &mut impl Rng) -> Multivector {
    let coeffs = (0..sig.blade_count())
        .map(|_| rng.random_range(-2.0..2.0))
        .collect();
    Multivector::from_coeffs(sig, coeffs).unwrap()
}

fn random_even(rng: &mut impl Rng) -> Multivector {
    random_mv(SPACETIME, rng).even_part()
}

/// Reference table built by explicit index-list normal ordering, compared
/// against the engine on every basis pair.
fn product_table_residual(corrupt: bool) -> f64 {
    let mut residual = 0.0f64;
    for sig in [SPACETIME, PAULI, QUATERNION] {
        for a in 0..sig.blade_count() {
            for b in 0..sig.blade_count() {
                let mut indices: Vec<u32> =
                    (0..sig.dim()).filter(|k| a & (1usize << k) != 0).collect();
                indices.extend((0..sig.dim()).filter(|k| b & (1usize << k) != 0));
                let mut sign = 1.0f64;
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
                if corrupt && sig == SPACETIME && a == 1 && b == 2 {
                    sign = -sign;
                }
                let mask = indices.iter().fold(0usize, |m, &k| m | (1usize << k));
                let (engine_sign, engine_mask) = sig.blade_product(a, b);
                if engine_mask != mask {
                    residual = residual.max(1.0);
                }
                residual = residual.max((engine_sign - sign).abs());
            }
        }
    }
    residual
}

fn associativity_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for sig in [SPACETIME, PAULI, QUATERNION] {
        for _ in 0..1000 {
            let a = random_mv(sig, rng);
            let b = random_mv(sig, rng);
            let c = random_mv(sig, rng);
            let lhs = a.product(&b).unwrap().product(&c).unwrap();
            let rhs = a.product(&b.product(&c).unwrap()).unwrap();
            residual = residual.max(lhs.sub(&rhs).max_abs());
        }
    }
    residual
}

fn anticommutation_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let mut residual = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let sum = (&b.m_upper[mu] * &b.m_upper[nu]).add(&(&b.m_upper[nu] * &b.m_upper[mu]));
            let expected = if mu == nu { 2.0 * ETA[mu] } else { 0.0 };
            residual = residual.max(sum.sub(&Multivector::scalar(SPACETIME, expected)).max_abs());
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let si = Multivector::basis_vector(PAULI, i).unwrap();
            let sj = Multivector::basis_vector(PAULI, j).unwrap();
            let sum = si.product(&sj).unwrap().add(&sj.product(&si).unwrap());
            let expected = if i == j { 2.0 } else { 0.0 };
            residual = residual.max(sum.sub(&Multivector::scalar(PAULI, expected)).max_abs());
        }
    }
    residual
}

fn sigma_product_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let mut residual = 0.0f64;
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
            residual = residual.max(prod.sub(&expected).max_abs());
        }
    }
    residual
}

fn paravector_relation_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let mut residual = 0.0f64;
    for a in 0..4 {
        for c in 0..4 {
            let sum = (&b.sigma[a] * &b.sigma_check[c]).add(&(&b.sigma[c] * &b.sigma_check[a]));
            let expected = if a == c { -2.0 * ETA[a] } else { 0.0 };
            residual = residual.max(sum.sub(&Multivector::scalar(SPACETIME, expected)).max_abs());
        }
    }
    residual
}

fn pseudoscalar_residual(rng: &mut impl Rng) -> f64 {
    let b = SpacetimeBasis::get();
    let mut residual = (&b.m5 * &b.m5)
        .sub(&Multivector::scalar(SPACETIME, -1.0))
        .max_abs();
    for _ in 0..100 {
        let e = random_even(rng);
        residual = residual.max((&b.m5 * &e).sub(&(&e * &b.m5)).max_abs());
    }
    residual
}

fn paravector_nonclosure_witness() -> f64 {
    let b = SpacetimeBasis::get();
    let a = b.one.add(&b.sigma_lower[0]);
    let c = b.one.add(&b.sigma_lower[1]);
    let rotation_part = (&a * &c).coeff(0b0110);
    if rotation_part.abs() > 0.5 {
        0.0
    } else {
        1.0
    }
}

fn embed_pauli_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..200 {
        let a = random_mv(PAULI, rng);
        let b = random_mv(PAULI, rng);
        let lhs = embed_pauli(&a.product(&b).unwrap()).unwrap();
        let rhs = embed_pauli(&a)
            .unwrap()
            .product(&embed_pauli(&b).unwrap())
            .unwrap();
        residual = residual.max(lhs.sub(&rhs).max_abs());
        if !lhs.is_even() {
            residual = residual.max(1.0);
        }
    }
    residual
}

fn embed_quaternion_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let f1 = Multivector::basis_vector(QUATERNION, 0).unwrap();
    let f2 = Multivector::basis_vector(QUATERNION, 1).unwrap();
    let ih = embed_quaternion(&f1).unwrap();
    let jh = embed_quaternion(&f2).unwrap();
    let kh = embed_quaternion(&f1.product(&f2).unwrap()).unwrap();
    let minus_one = Multivector::scalar(SPACETIME, -1.0);
    let mut residual = 0.0f64;
    for u in [&ih, &jh, &kh] {
        residual = residual.max((u * u).sub(&minus_one).max_abs());
    }
    residual = residual.max((&ih * &jh).add(&(&jh * &ih)).max_abs());
    let target = b
        .times_i(&b.sigma_upper[2])
        .scale(crate::algebra::QUATERNION_PRODUCT_SIGN);
    residual.max((&ih * &jh).sub(&target).max_abs())
}

fn idempotent_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let mut r = (&b.e_plus * &b.e_plus).sub(&b.e_plus).max_abs();
    r = r.max((&b.e_minus * &b.e_minus).sub(&b.e_minus).max_abs());
    r.max((&b.e_plus * &b.e_minus).max_abs())
}

fn ideal_closure_residual(rng: &mut impl Rng) -> f64 {
    let b = SpacetimeBasis::get();
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let e = random_even(rng);
        let phi = ideals::project_left(&random_even(rng)).unwrap();
        let moved = e.product(phi.value()).unwrap();
        let back = moved.product(&b.e_plus).unwrap();
        residual = residual.max(back.sub(&moved).max_abs());
    }
    residual
}

fn reconstruction_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let s = ideals::undotted_basis();
    let sd = ideals::dotted_basis();
    let p11 = ideals::spinor_product(&s[0], &sd[0]);
    let p12 = ideals::spinor_product(&s[0], &sd[1]);
    let p21 = ideals::spinor_product(&s[1], &sd[0]);
    let p22 = ideals::spinor_product(&s[1], &sd[1]);
    let mut r = p11.add(&p22).sub(&b.one).max_abs();
    r = r.max(p12.add(&p21).neg().sub(&b.sigma_lower[0]).max_abs());
    r = r.max(b.times_i(&p12.sub(&p21)).sub(&b.sigma_lower[1]).max_abs());
    r.max(p11.sub(&p22).neg().sub(&b.sigma_lower[2]).max_abs())
}

fn decompose_roundtrip_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..200 {
        let phi = ideals::project_left(&random_even(rng)).unwrap();
        let back = ideals::reconstruct(&ideals::decompose(&phi));
        residual = residual.max(back.value().sub(phi.value()).max_abs());
    }
    residual
}

fn complex_linearity_residual(rng: &mut impl Rng) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let phi = ideals::project_left(&random_even(rng)).unwrap();
        let p = ideals::decompose(&phi);
        let pi = ideals::decompose(&phi.times_i());
        residual = residual.max((pi.c1 - i * p.c1).norm());
        residual = residual.max((pi.c2 - i * p.c2).norm());
    }
    residual
}

fn ideal_rank_residual() -> f64 {
    let [t1, t2] = ideals::theta_basis();
    let rows = vec![
        t1.value().coeffs().to_vec(),
        t2.value().coeffs().to_vec(),
        t1.times_i().value().coeffs().to_vec(),
        t2.times_i().value().coeffs().to_vec(),
    ];
    if crate::linalg::rank(&rows, 1e-9) == 4 {
        0.0
    } else {
        1.0
    }
}

fn rep_generator_residual() -> f64 {
    let b = SpacetimeBasis::get();
    let mut r = 0.0f64;
    for k in 0..3 {
        r = r.max(
            matrix::rep(&b.sigma_upper[k])
                .unwrap()
                .sub(&matrix::pauli_matrix(k))
                .max_abs(),
        );
    }
    let i_id = matrix::C2Matrix::identity().scale(Complex64::new(0.0, 1.0));
    r.max(matrix::rep(&b.m5).unwrap().sub(&i_id).max_abs())
}

fn rep_homomorphism_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..500 {
        let a = random_even(rng);
        let b = random_even(rng);
        let lhs = matrix::rep(&a.product(&b).unwrap()).unwrap();
        let rhs = matrix::rep(&a).unwrap().mul(&matrix::rep(&b).unwrap());
        residual = residual.max(lhs.sub(&rhs).max_abs());
    }
    residual
}

fn rep_rank_residual() -> f64 {
    let even_masks = [0usize, 0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100, 0b1111];
    let rows: Vec<Vec<f64>> = even_masks
        .iter()
        .map(|&mask| {
            let m = matrix::rep(&Multivector::basis_blade(SPACETIME, mask)).unwrap();
            let mut row = Vec::with_capacity(8);
            for i in 0..2 {
                for j in 0..2 {
                    row.push(m.m[i][j].re);
                    row.push(m.m[i][j].im);
                }
            }
            row
        })
        .collect();
    if crate::linalg::rank(&rows, 1e-12) == 8 {
        0.0
    } else {
        1.0
    }
}

fn rep_roundtrip_dyadic_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let coeffs: Vec<f64> = (0..16)
            .map(|_| rng.random_range(-32..32i32) as f64 / 16.0)
            .collect();
        let p = Multivector::from_coeffs(SPACETIME, coeffs)
            .unwrap()
            .even_part();
        let back = matrix::unrep(&matrix::rep(&p).unwrap());
        if back != p {
            residual = residual.max(back.sub(&p).max_abs().max(f64::MIN_POSITIVE));
        }
    }
    residual
}

fn epsilon_residual() -> f64 {
    let e = matrix::epsilon();
    let minus_id = matrix::C2Matrix::identity().scale(Complex64::new(-1.0, 0.0));
    let r = e.mul(&e).sub(&minus_id).max_abs();
    let is2 = matrix::pauli_matrix(1).scale(Complex64::new(0.0, 1.0));
    r.max(e.sub(&is2).max_abs())
}

fn iota_kronecker_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let phi = ideals::project_left(&random_even(rng)).unwrap();
        let xi = ideals::project_right(&random_even(rng)).unwrap();
        let lhs = matrix::rep(&ideals::spinor_product(&phi, &xi)).unwrap();
        let rhs = matrix::kronecker(
            &matrix::column_of(phi.value()).unwrap(),
            &matrix::row_of(xi.value()).unwrap(),
        );
        residual = residual.max(lhs.sub(&rhs).max_abs());
    }
    residual
}

fn raise_lower_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..20 {
        let x = matrix::ColumnSpinor([
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        ]);
        let back = matrix::raise_index(&matrix::lower_index(&x));
        for k in 0..2 {
            residual = residual.max((back.0[k] - x.0[k] * matrix::RAISE_LOWER_SIGN).norm());
        }
    }
    residual
}

fn component_roundtrip_residual(rng: &mut impl Rng) -> f64 {
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let p = random_even(rng);
        let (x, y) = ideals::components_of_pauli(&p).unwrap();
        let back = ideals::pauli_from_components(&x, &y);
        residual = residual.max(back.sub(&p).max_abs());
    }
    residual
}
