use ncconvex::matkit::sample::{rng_from_seed, sample_gaussian, sample_herm, SampleRng};
use ncconvex::matkit::{build_embedding_e, min_eig, real};
use ncconvex::xycvx::{
    assemble_certificate, bmb, build_p, e_operator_embed, e_operator_star, gram_complete_certificate,
    sample_xy_pair, xy_convexity_test, xy_hessian, xy_hessian_explicit, GramOutcome, Mono, PLPoly, Sigma,
};
use ncconvex::{CMat, CVec, C64};
use proptest::prelude::*;
use rand::Rng;

fn dims(rng: &mut SampleRng) -> (usize, usize, usize) {
    (rng.random_range(1..=3), rng.random_range(1..=2), rng.random_range(1..=2))
}

fn scaled(p: &PLPoly, s: f64) -> PLPoly {
    let pairs: Vec<(Mono, C64)> = p.terms().map(|(m, c)| (m, c * s)).collect();
    PLPoly::from_pairs(&pairs)
}

fn random_pencil(rng: &mut SampleRng) -> PLPoly {
    let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    PLPoly::from_pairs(&[
        (Mono::One, real(rng.random_range(-1.0..1.0))),
        (Mono::X, real(rng.random_range(-1.0..1.0))),
        (Mono::Y, real(rng.random_range(-1.0..1.0))),
        (Mono::XY, c),
        (Mono::YX, c.conj()),
    ])
}

/// `Λ*Λ` with `Λ = (Λx)x + (Λy)y + (Λxy)xy + (Λyx)yx`, plus a pencil.
fn certified(rng: &mut SampleRng) -> PLPoly {
    let n = rng.random_range(1..=3);
    let mut col = || CVec::from_iterator(n, sample_gaussian(n, 1, rng).iter().copied());
    let (lx, ly, lxy, lyx) = (col(), col(), col(), col());
    let d = |a: &CVec, b: &CVec| a.dotc(b);
    PLPoly::from_pairs(&[
        (Mono::X2, d(&lx, &lx)),
        (Mono::Y2, d(&ly, &ly)),
        (Mono::XY, d(&lx, &ly)),
        (Mono::YX, d(&ly, &lx)),
        (Mono::X2Y, d(&lx, &lxy)),
        (Mono::XYX, d(&lx, &lyx) + d(&lyx, &lx)),
        (Mono::YXY, d(&ly, &lxy) + d(&lxy, &ly)),
        (Mono::Y2X, d(&ly, &lyx)),
        (Mono::YX2, d(&lxy, &lx)),
        (Mono::YX2Y, d(&lxy, &lxy)),
        (Mono::YXYX, d(&lxy, &lyx)),
        (Mono::XY2, d(&lyx, &ly)),
        (Mono::XYXY, d(&lyx, &lxy)),
        (Mono::XY2X, d(&lyx, &lyx)),
    ])
    .add(&random_pencil(rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hessian_paths_and_middle_matrix_agree(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let p = PLPoly::random(&mut rng, 1.0);
        let q = sample_xy_pair(dims(&mut rng), 1.0, &mut rng);
        let h = xy_hessian(&p, &q).unwrap();
        let s = h.substitution.camax().max(1.0);
        prop_assert!(h.gap / s < 1e-10);
        prop_assert!((bmb(&p, &q).unwrap() - &h.explicit).camax() / s < 1e-10);
    }

    #[test]
    fn hessian_is_linear_and_kills_pencils(seed in any::<u64>(), a in -2.0f64..2.0) {
        let mut rng = rng_from_seed(seed);
        let (p, r) = (PLPoly::random(&mut rng, 1.0), PLPoly::random(&mut rng, 1.0));
        let q = sample_xy_pair(dims(&mut rng), 1.0, &mut rng);
        let lhs = xy_hessian_explicit(&scaled(&p, a).add(&r), &q);
        let rhs = xy_hessian_explicit(&p, &q) * real(a) + xy_hessian_explicit(&r, &q);
        prop_assert!((lhs - rhs).camax() < 1e-10);
        prop_assert!(xy_hessian_explicit(&random_pencil(&mut rng), &q).camax() < 1e-12);
    }

    #[test]
    fn operator_star_matches_embedding(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let pm = build_p(&PLPoly::random(&mut rng, 1.0));
        let sig = Sigma::sample(rng.random_range(1..=3), rng.random_range(1..=3), 1.0, &mut rng);
        let a = e_operator_star(&pm, &sig).unwrap();
        prop_assert!((&a - e_operator_embed(&pm, &sig).unwrap()).camax() < 1e-10);
        // the embedding is an isometry
        let e = build_embedding_e((1, 1), sig.part);
        let n = e.ncols();
        prop_assert!((e.adjoint() * &e - CMat::identity(n, n)).camax() == 0.0);
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let p = certified(&mut rng);
        let GramOutcome::Feasible(sol) = gram_complete_certificate(&p).unwrap() else {
            return Err(TestCaseError::fail("a Gram-representable polynomial was rejected"));
        };
        let cert = assemble_certificate(&p, &sol).unwrap();
        prop_assert!(cert.residuals.identities < 1e-8);
        let f = p.to_free_poly(&PLPoly::default_ctx()).unwrap();
        for _ in 0..4 {
            let q = sample_xy_pair(dims(&mut rng), 1.0, &mut rng);
            let d = xy_convexity_test(&f, &q.x(), &q.y(), &q.v(), 1e-8).unwrap();
            prop_assert!(d.psd, "λ_min {:e}", d.lambda_min);
        }
    }

    #[test]
    fn xy_convex_implies_separately_convex(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let p = certified(&mut rng);
        let (x1, x2, y) = (sample_herm(n, 1.0, &mut rng), sample_herm(n, 1.0, &mut rng), sample_herm(n, 1.0, &mut rng));
        let half = real(0.5);
        let in_x = (p.eval(&x1, &y) + p.eval(&x2, &y)) * half - p.eval(&((&x1 + &x2) * half), &y);
        let in_y = (p.eval(&y, &x1) + p.eval(&y, &x2)) * half - p.eval(&y, &((&x1 + &x2) * half));
        prop_assert!(min_eig(&in_x) > -1e-9);
        prop_assert!(min_eig(&in_y) > -1e-9);
    }
}
