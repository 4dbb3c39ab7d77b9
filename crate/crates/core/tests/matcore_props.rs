use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spop::matcore::{random, schatten_norm, singular_values, svd, Matrix};

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |d| Matrix::new(r, c, d).unwrap())
    })
}

fn entrywise(m: &Matrix) -> f64 {
    m.data().iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn schatten_two_is_frobenius(m in matrix_strategy()) {
        let s = schatten_norm(&m, 2.0).unwrap();
        let e = entrywise(&m);
        prop_assert!((s - e).abs() <= 1e-12 * e.max(1e-300));
    }

    #[test]
    fn svd_is_deterministic(m in matrix_strategy()) {
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        prop_assert_eq!(a.u, b.u);
        prop_assert_eq!(a.sigma, b.sigma);
        prop_assert_eq!(a.v, b.v);
    }

    #[test]
    fn holder_on_singular_values(seed in 0u64..100_000, q in 1.1f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gaussian(5, 4, &mut rng);
        let b = random::gaussian(5, 4, &mut rng);
        let sa = singular_values(&a).unwrap();
        let sb = singular_values(&b).unwrap();
        let lhs: f64 = sa.iter().zip(&sb).map(|(x, y)| x * y).sum();
        let pc = q / (q - 1.0);
        let rhs = schatten_norm(&a, pc).unwrap() * schatten_norm(&b, q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}

#[test]
fn von_neumann_trace_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let (r, c) = (2 + i % 6, 2 + (i / 6) % 5);
        let a = random::gaussian(r, c, &mut rng);
        let b = random::gaussian(r, c, &mut rng);
        let sa = singular_values(&a).unwrap();
        let sb = singular_values(&b).unwrap();
        let bound: f64 = sa.iter().zip(&sb).map(|(x, y)| x * y).sum();
        assert!(a.inner(&b) <= bound + 1e-9, "pair {i}");
    }
}

#[test]
fn reconstruction_on_larger_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (r, c) in [(40, 17), (17, 40), (33, 33)] {
        let m = random::gaussian(r, c, &mut rng);
        let f = svd(&m).unwrap();
        assert!(f.reconstruct().sub(&m).max_abs() <= 1e-10 * m.max_abs());
        let k = r.min(c);
        let ut = f.u.t_matmul(&f.u);
        let vt = f.v.t_matmul(&f.v);
        assert!(ut.sub(&Matrix::identity(k)).max_abs() <= 1e-10);
        assert!(vt.sub(&Matrix::identity(k)).max_abs() <= 1e-10);
    }
}
