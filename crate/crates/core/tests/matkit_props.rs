use ncconvex::matkit::sample::{rng_from_seed, sample_gaussian, sample_herm, SampleRng};
use ncconvex::matkit::{
    build_embedding_e, eye, is_psd, khatri_rao, kron, min_eig, psd_complete, real, signature_decompose, sqrt_psd,
    BlockMatrix2, CompletionResult, LinearConstraint,
};
use ncconvex::{CMat, C64};
use proptest::prelude::*;
use rand::Rng;

fn psd(n: usize, rank: usize, rng: &mut SampleRng) -> CMat {
    let f = sample_gaussian(n, rank, rng);
    &f * f.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_of_square(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let r = sqrt_psd(&psd(n, n, &mut rng), 1e-12).unwrap();
        let back = sqrt_psd(&(&r * &r), 1e-12).unwrap();
        prop_assert!((&back - &r).camax() < 1e-8 * r.camax().max(1.0));
    }

    #[test]
    fn sqrt_of_rank_deficient(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let m = psd(n, n - 1, &mut rng);
        let r = sqrt_psd(&m, 1e-9).unwrap();
        prop_assert!((&r * &r - &m).camax() < 1e-8 * m.camax().max(1.0));
        prop_assert!(min_eig(&r) > -1e-8);
    }

    #[test]
    fn khatri_rao_matches_embedding(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let mut d = || rng.random_range(1..=3usize);
        let (r1, r2, c1, c2, s1, s2, d1, d2) = (d(), d(), d(), d(), d(), d(), d(), d());
        let a = BlockMatrix2::split(&sample_gaussian(r1 + r2, c1 + c2, &mut rng), r1, c1).unwrap();
        let b = BlockMatrix2::split(&sample_gaussian(s1 + s2, d1 + d2, &mut rng), s1, d1).unwrap();
        let lhs = khatri_rao(&a, &b).unwrap().to_matrix();
        let rhs = build_embedding_e((r1, r2), (s1, s2)).adjoint()
            * kron(&a.to_matrix(), &b.to_matrix())
            * build_embedding_e((c1, c2), (d1, d2));
        prop_assert!((&lhs - &rhs).camax() < 1e-12);
    }

    #[test]
    fn signature_diagonalizes(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let h = sample_herm(n, 1.0, &mut rng) + eye(n) * real(0.05);
        let Ok((j, c)) = signature_decompose(&h) else {
            // near-singular draws are rejected by design
            return Ok(());
        };
        prop_assert!((&j * &j - eye(n)).camax() < 1e-12);
        prop_assert!((c.adjoint() * &h * &c - &j).camax() < 1e-10);
        let d: Vec<f64> = j.diagonal().iter().map(|z| z.re).collect();
        prop_assert!(d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn completion_satisfies_its_verdict(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let g = psd(d, rng.random_range(1..=d), &mut rng);
        let mut cons = vec![];
        for i in 0..d {
            for j in i..d {
                if i == j || rng.random_bool(0.5) {
                    cons.push(LinearConstraint::pin(i, j, g[(i, j)]));
                }
            }
        }
        match psd_complete(d, &cons, None, 1e-9, 4000).unwrap() {
            CompletionResult::Complete { g: out, .. } => {
                prop_assert!(is_psd(&out, 1e-9).unwrap().is_psd());
                for c in &cons {
                    let v: C64 = c.terms.iter().map(|&(i, j, w)| w * out[(i, j)]).sum();
                    prop_assert!((v - c.value).norm() < 1e-8);
                }
            }
            CompletionResult::Infeasible { .. } => prop_assert!(false, "a feasible pattern was rejected"),
        }
    }
}

#[test]
fn completion_detects_infeasible_pattern() {
    // unit diagonal with an off-diagonal of 2 has no PSD completion
    let cons = vec![
        LinearConstraint::pin(0, 0, real(1.0)),
        LinearConstraint::pin(1, 1, real(1.0)),
        LinearConstraint::pin(0, 1, real(2.0)),
    ];
    assert!(matches!(psd_complete(2, &cons, None, 1e-9, 2000).unwrap(), CompletionResult::Infeasible { .. }));
}
