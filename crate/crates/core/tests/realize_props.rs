use ncconvex::matkit::sample::{rng_from_seed, sample_tuple, sample_unitary};
use ncconvex::matkit::{min_eig, real};
use ncconvex::realize::random::{random_smr, sample_scale};
use ncconvex::realize::{
    caterpillar, minimize, schur_butterfly, slice_at, state_space_similarity, ButterflyCert, Realization,
};
use ncconvex::ncalg::HermTuple;
use ncconvex::CMat;
use proptest::prelude::*;

fn dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).camax()
}

fn draw(seed: u64) -> (Realization, f64) {
    let mut rng = rng_from_seed(seed);
    let e = 3 + (seed % 3) as usize;
    let k = 1 + (seed % 2) as usize;
    let r = random_smr(e, 1, 1, k, &mut rng);
    let s = sample_scale(&r);
    (r, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn minimize_keeps_values(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let doubled = r.direct_sum(&r).unwrap();
        let m = minimize(&doubled).unwrap();
        prop_assert_eq!(m.e(), r.e());
        let mut rng = rng_from_seed(seed ^ 77);
        for _ in 0..3 {
            let t = sample_tuple(2, 1, 1, s, &mut rng);
            let want = r.eval(&t).unwrap() * real(2.0);
            prop_assert!(dist(&m.eval(&t).unwrap(), &want) < 1e-8);
        }
    }

    #[test]
    fn unitary_similarity_recovered(seed in 0u64..10_000) {
        let (r, _) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 5);
        let g = sample_unitary(r.e(), &mut rng);
        let mut r2 = r.congruence(&g).unwrap();
        r2.minimal = true;
        let sim = state_space_similarity(&r, &r2).unwrap();
        prop_assert!(sim.max_residual() < 1e-7, "{}", sim.max_residual());
        let gi = g.adjoint();
        prop_assert!(dist(&sim.s, &gi) < 1e-7);
    }

    #[test]
    fn caterpillar_and_butterfly_agree(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let b = ButterflyCert::new(&r);
        let mut rng = rng_from_seed(seed ^ 11);
        for _ in 0..3 {
            let t = sample_tuple(2, 1, 1, s, &mut rng);
            let v = r.eval(&t).unwrap();
            prop_assert!(dist(&caterpillar(&r, &t).unwrap().total(), &v) < 1e-8);
            prop_assert!(dist(&b.eval(&t).unwrap(), &v) < 1e-8);
            if let Ok(sq) = b.eval_sqrt(&t) {
                prop_assert!(dist(&sq, &v) < 1e-7);
            }
        }
    }

    #[test]
    fn slice_membership_matches(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 23);
        for _ in 0..6 {
            // wide points so both verdicts occur
            let t = sample_tuple(2, 1, 1, 8.0 * s, &mut rng);
            let sl = slice_at(&r, &t).unwrap();
            let comp = sl.form.compressed(&sl.lambda(&t.x));
            let margin = if comp.is_empty() { 1.0 } else { min_eig(&comp).abs().min(
                ncconvex::matkit::singular_extremes(&comp).0) };
            if sl.form.empty || margin < 1e-5 {
                continue;
            }
            prop_assert_eq!(sl.in_dom(&t.x, 1e-10), r.in_dom(&t));
            if r.in_dom(&t) {
                let rt = r.r_t(&t).unwrap();
                if min_eig(&rt).abs() > 1e-6 {
                    prop_assert_eq!(sl.in_dom_plus(&t.x, 1e-8), r.in_dom_plus(&t));
                }
            }
        }
    }

    #[test]
    fn schur_form_matches(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 31);
        let t = sample_tuple(2, 1, 1, s, &mut rng);
        match schur_butterfly(&r, &t) {
            Ok(sb) => {
                prop_assert!(dist(&sb.value, &sb.direct) < 1e-8);
                prop_assert_eq!(sb.rt_psd, sb.in_dom_plus);
            }
            Err(ncconvex::Error::NotApplicable(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn positive_domain_is_realization_independent(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 41);
        let g = ncconvex::matkit::sample::sample_gaussian(r.e(), r.e(), &mut rng) + ncconvex::matkit::eye(r.e()) * real(2.0);
        let r2 = r.congruence(&g).unwrap();
        for _ in 0..6 {
            let t = sample_tuple(2, 1, 1, 6.0 * s, &mut rng);
            if !r.in_dom(&t) || !r2.in_dom(&t) {
                continue;
            }
            let (l1, l2) = (plus_margin(&r, &t), plus_margin(&r2, &t));
            // eigenvalues move under congruence, signs do not
            if l1.abs() > 1e-6 && l2.abs() > 1e-6 {
                prop_assert_eq!(l1 > 0.0, l2 > 0.0);
            }
        }
    }

    #[test]
    fn positive_domain_slices_are_convex(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 53);
        let t1 = sample_tuple(2, 1, 1, 3.0 * s, &mut rng);
        let t2 = t1.with_x(sample_tuple(2, 1, 1, 3.0 * s, &mut rng).x);
        if !(r.in_dom_plus(&t1) && r.in_dom_plus(&t2)) {
            return Ok(());
        }
        for k in 1..4 {
            let th = k as f64 / 4.0;
            let x: Vec<CMat> = t1.x.iter().zip(&t2.x).map(|(a, b)| a * real(1.0 - th) + b * real(th)).collect();
            let mid = t1.with_x(x);
            prop_assert!(r.in_dom(&mid));
            prop_assert!(plus_margin(&r, &mid) > -1e-9);
        }
    }

    #[test]
    fn positive_domain_is_a_free_set(seed in 0u64..10_000) {
        let (r, s) = draw(seed);
        let mut rng = rng_from_seed(seed ^ 67);
        let pts: Vec<HermTuple> = (0..8)
            .map(|i| sample_tuple(1 + i % 2, 1, 1, 2.0 * s, &mut rng))
            .filter(|t| r.in_dom(t) && plus_margin(&r, t) > 1e-6)
            .take(2)
            .collect();
        if pts.len() < 2 {
            return Ok(());
        }
        let sum = pts[0].direct_sum(&pts[1]).unwrap();
        prop_assert!(r.in_dom_plus(&sum));
        let u = sample_unitary(sum.n, &mut rng);
        prop_assert!(r.in_dom_plus(&sum.conjugate(&u)));
    }
}

fn plus_margin(r: &Realization, t: &HermTuple) -> f64 {
    let rt = r.r_t(t).unwrap();
    if rt.is_empty() { 1.0 } else { min_eig(&rt) }
}
