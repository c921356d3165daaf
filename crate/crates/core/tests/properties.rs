use iiaffine::al_models::{holonomy_phase, random_gl_n_z};
use iiaffine::forms::random::{random_form, random_form_any_degree};
use iiaffine::forms::{Ambient, Form};
use iiaffine::scalar::{frac, int, rat};
use iiaffine::{EnhancedALModel, FibreLoop, Polytope, RAffineMap, RMatrix, RVector, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix(n: usize) -> impl Strategy<Value = RMatrix> {
    prop::collection::vec(-4i64..=4, n * n)
        .prop_map(move |v| RMatrix::new(n, n, v.into_iter().map(int).collect()).unwrap())
}

fn small_vector(n: usize) -> impl Strategy<Value = RVector> {
    prop::collection::vec((-6i64..=6, 1i64..=4), n)
        .prop_map(|v| RVector::new(v.into_iter().map(|(p, q)| rat(p, q)).collect()))
}

fn unimodular(n: usize) -> impl Strategy<Value = RMatrix> {
    any::<u64>().prop_map(move |seed| random_gl_n_z(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

fn affine(n: usize) -> impl Strategy<Value = RAffineMap> {
    (
        small_matrix(n).prop_filter("singular", |a| !a.det().unwrap().is_zero()),
        small_vector(n),
    )
        .prop_map(|(a, b)| RAffineMap::new(a, b).unwrap())
}

/// Naive cofactor expansion, independent of the elimination code.
fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    if m.is_empty() {
        return Rational::one();
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_matches_cofactor_expansion(n in 1usize..=4, seed in any::<u64>()) {
        let m = random_gl_n_z(&mut ChaCha8Rng::seed_from_u64(seed), n)
            .add(&RMatrix::identity(n)).unwrap();
        prop_assert_eq!(m.det().unwrap(), cofactor_det(&m.to_rows()));
    }

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (small_matrix(n), small_matrix(n)))) {
        prop_assert_eq!(a.matmul(&b).unwrap().det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn unimodular_inverse_is_integral(m in (1usize..=4).prop_flat_map(unimodular)) {
        prop_assert!(m.is_gl_n_z());
        prop_assert!(m.det().unwrap().abs().is_one());
        let inv = m.inverse().unwrap();
        prop_assert!(inv.is_integral());
        prop_assert_eq!(inv.inverse().unwrap(), m.clone());
        prop_assert_eq!(m.matmul(&inv).unwrap(), RMatrix::identity(m.rows()));
    }

    #[test]
    fn compose_then_apply(
        (f, g, x) in (1usize..=3).prop_flat_map(|n| (affine(n), affine(n), small_vector(n)))
    ) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.apply(&x).unwrap(), f.apply(&g.apply(&x).unwrap()).unwrap());
        let back = f.invert().unwrap().apply(&f.apply(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn volume_scales_by_det(
        (a, b) in (1usize..=3).prop_flat_map(|n| (small_matrix(n), small_vector(n))),
        side in 1i64..=3,
    ) {
        let n = a.rows();
        let d = a.det().unwrap();
        prop_assume!(!d.is_zero());
        let cube = Polytope::half_open_box(&vec![int(0); n], &vec![int(side); n]).unwrap();
        let image = cube.image(&RAffineMap::new(a, b).unwrap()).unwrap();
        prop_assert_eq!(image.volume(), cube.volume() * d.abs());
    }

    #[test]
    fn holonomy_is_a_homomorphism(
        (x, m1, m2) in (1usize..=3).prop_flat_map(|n| (
            prop::collection::vec(0i64..60, n),
            prop::collection::vec(-3i64..=3, n),
            prop::collection::vec(-3i64..=3, n),
        ))
    ) {
        let x = RVector::new(x.into_iter().map(|p| rat(p, 60)).collect());
        let model = EnhancedALModel::around(&x).unwrap();
        let phase = |m: Vec<i64>| holonomy_phase(&model, &FibreLoop::new(x.clone(), m).unwrap()).unwrap();
        let sum: Vec<i64> = m1.iter().zip(&m2).map(|(a, b)| a + b).collect();
        prop_assert_eq!(phase(sum), frac(&(phase(m1) + phase(m2))));
    }

    #[test]
    fn form_text_round_trips(n in 1usize..=3, torus in any::<bool>(), seed in any::<u64>()) {
        let amb = if torus { Ambient::torus(n) } else { Ambient::open(n) };
        let f = random_form_any_degree(&mut ChaCha8Rng::seed_from_u64(seed), amb);
        prop_assert_eq!(Form::parse(&f.to_string(), amb).unwrap(), f);
    }

    #[test]
    fn d_squared_vanishes(n in 1usize..=3, k in 0usize..=5, seed in any::<u64>()) {
        let amb = Ambient::open(n);
        prop_assume!(k <= 2 * n);
        let f = random_form(&mut ChaCha8Rng::seed_from_u64(seed), amb, k);
        prop_assert!(f.d().d().is_zero());
    }
}
