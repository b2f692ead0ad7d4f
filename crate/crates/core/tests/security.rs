use std::collections::BTreeMap;

use coded_compute::algebra::{FMatrix, Field};
use coded_compute::harness::{measure_recovery_threshold, Job, JobTarget, Mode};
use coded_compute::scheme::FaultPattern;
use coded_compute::security::{
    collusion_leakage_check, masking_rank, run_secure_matmul, secure_decode, secure_encode, secure_threshold_report,
    uniformity_check, MotherFamily, SecurePlan,
};
use coded_compute::subsets::Combinations;
use coded_compute::Error;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rs(q: u64, workers: usize, k: usize, t: usize) -> SecurePlan {
    SecurePlan::new(&MotherFamily::ReedSolomon { q }, workers, k, t).unwrap()
}

fn blocks(f: &Field, rng: &mut ChaCha8Rng, count: usize, rows: usize, cols: usize) -> Vec<FMatrix> {
    (0..count).map(|_| FMatrix::random(f, rows, cols, rng)).collect()
}

#[test]
fn infeasible_secure_plans() {
    let h = MotherFamily::Hermitian { q: 2 };
    let err = SecurePlan::new(&h, 4, 1, 1).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
    assert!(matches!(SecurePlan::new(&MotherFamily::ReedSolomon { q: 17 }, 10, 2, 0), Err(Error::Hypothesis(_))));
    assert!(SecurePlan::new(&MotherFamily::ReedSolomon { q: 13 }, 10, 2, 2).is_err());
    assert!(SecurePlan::new(&h, 6, 1, 2).is_err());
    assert!(SecurePlan::new(&MotherFamily::ReedSolomon { q: 17 }, 10, 0, 2).is_err());
}

#[test]
fn hermitian_small_curve_cannot_host_r2_t2() {
    // [N+4, 4] on at most 8 points squares to nearly the whole space.
    for workers in 1..=4 {
        let err = SecurePlan::new(&MotherFamily::Hermitian { q: 2 }, workers, 2, 2).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)), "{err}");
    }
}

#[test]
fn strassen_rank_threshold_over_rs() {
    let plan = rs(29, 17, 7, 2);
    let report = secure_threshold_report(&plan, 7).unwrap();
    assert_eq!((report.designed, report.from_product, report.insecure), (17, 17, 13));
    assert_eq!(plan.wait_for(), 17);
    // Any 17 of the 26 product coordinates determine a degree-16 polynomial,
    // and 16 never do.
    let job = Job::Secure { plan, block: (1, 1, 1) };
    let m = measure_recovery_threshold(&JobTarget::new(&job, 3).unwrap(), Mode::Exhaustive, 3).unwrap();
    assert_eq!(m.measured, Some(17));
    assert!(secure_threshold_report(&rs(29, 17, 7, 2), 8).is_err());
}

#[test]
fn unpadded_formula_is_the_zero_padding_limit() {
    for (k, t) in [(2, 1), (3, 2), (4, 3)] {
        let plan = rs(31, 20, k, t);
        let r = secure_threshold_report(&plan, k).unwrap();
        assert_eq!(r.insecure, 2 * k - 1);
        assert_eq!(r.designed, r.insecure + 2 * t);
        assert_eq!(r.designed, r.designed_alt);
    }
}

#[test]
fn hermitian_mother_code_over_gf9() {
    let plan = SecurePlan::new(&MotherFamily::Hermitian { q: 3 }, 21, 2, 4).unwrap();
    assert_eq!((plan.mother().len(), plan.mother().dim()), (27, 6));
    assert_eq!((plan.generalized_genus(), plan.curve_genus()), (3, Some(3)));
    assert_eq!(plan.collusion_tolerance(), 1);
    assert!(collusion_leakage_check(&plan, 1, 1000).unwrap().secure);
    assert!(!collusion_leakage_check(&plan, 2, 1000).unwrap().secure);

    let report = secure_threshold_report(&plan, 2).unwrap();
    assert_eq!((report.designed, report.designed_alt, report.from_product), (14, 14, 17));
    let job = Job::Secure { plan: plan.clone(), block: (1, 1, 1) };
    let m = measure_recovery_threshold(&JobTarget::new(&job, 1).unwrap(), Mode::Exhaustive, 1).unwrap();
    assert_eq!(m.measured, Some(17));

    let f = plan.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = blocks(&f, &mut rng, 2, 2, 2);
    let b = blocks(&f, &mut rng, 2, 2, 1);
    let out = run_secure_matmul(&plan, &a, &b, 9, &FaultPattern::stragglers(&[0, 5, 10, 20])).unwrap();
    for i in 0..2 {
        assert_eq!(out[i], a[i].mul(&b[i]).unwrap());
    }
}

#[test]
fn masking_is_sharp_on_rs_plans() {
    for (workers, t) in [(6, 1), (8, 2), (9, 3)] {
        let plan = rs(17, workers, 2, t);
        assert!(collusion_leakage_check(&plan, t, 10_000).unwrap().secure);
        let over = collusion_leakage_check(&plan, t + 1, 10_000).unwrap();
        assert!(!over.secure);
        assert!(over.exhaustive);
        let witness = over.witness.unwrap();
        assert!(masking_rank(&plan, &witness).unwrap() < t + 1);
        for set in Combinations::new(workers, t) {
            assert_eq!(masking_rank(&plan, &set).unwrap(), t);
        }
    }
    assert!(masking_rank(&rs(17, 6, 2, 1), &[6]).is_err());
}

#[test]
fn observations_are_uniform_over_gf5() {
    let plan = rs(5, 3, 1, 1);
    for w in 0..3 {
        let u = uniformity_check(&plan, &[w], &[2], &[3]).unwrap();
        assert_eq!((u.paddings, u.distinct_observations, u.possible_observations), (25, 25, 25));
        assert!(u.uniform);
    }
    let u = uniformity_check(&plan, &[0, 1], &[2], &[3]).unwrap();
    assert!(!u.uniform);
}

#[test]
fn secure_decoding_with_faults_and_seeds() {
    let plan = rs(17, 10, 2, 2).with_byzantine(1).unwrap();
    assert_eq!(plan.wait_for(), 9);
    let f = plan.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..20 {
        let a = blocks(&f, &mut rng, 2, 2, 3);
        let b = blocks(&f, &mut rng, 2, 3, 2);
        let mut order: Vec<usize> = (0..10).collect();
        order.shuffle(&mut rng);
        let mut corruptions = BTreeMap::new();
        corruptions.insert(order[1], FMatrix::random(&f, 2, 2, &mut rng));
        let faults = FaultPattern {
            stragglers: vec![order[0]],
            corruptions,
        };
        let out = run_secure_matmul(&plan, &a, &b, seed, &faults).unwrap();
        for i in 0..2 {
            assert_eq!(out[i], a[i].mul(&b[i]).unwrap());
        }
    }
    assert!(rs(17, 10, 2, 2).with_byzantine(2).is_err());
}

#[test]
fn too_few_results_are_reported() {
    let plan = rs(17, 10, 2, 2);
    let f = plan.field().clone();
    let a = vec![FMatrix::identity(&f, 2); 2];
    let enc = secure_encode(&plan, &a, &a, 0).unwrap();
    let results: Vec<_> = enc
        .tasks
        .iter()
        .take(6)
        .map(|t| coded_compute::scheme::worker_compute(t).unwrap())
        .collect();
    assert!(matches!(
        secure_decode(&plan, &results),
        Err(Error::InsufficientResults { present: 6, required: 7 })
    ));
}
