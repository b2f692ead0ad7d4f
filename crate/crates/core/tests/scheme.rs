use std::collections::BTreeMap;

use coded_compute::algebra::{FMatrix, Field};
use coded_compute::evalcodes::{hermitian_code, rs_code_prefix};
use coded_compute::scheme::{
    composed_encoders, decode_batch, decode_multilinear, encode_batch, encode_general, encode_multilinear,
    run_batch_matmul, run_general_matmul, run_multilinear, worker_compute, FaultPattern, JobPlan, Payload,
};
use coded_compute::subsets::Combinations;
use coded_compute::tensors::{BilinearTensor, BlockMatrix, MultilinearDecomp};
use coded_compute::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matmul_mod(a: &FMatrix, b: &FMatrix, p: u64) -> Vec<Vec<u32>> {
    (0..a.rows())
        .map(|i| {
            (0..b.cols())
                .map(|j| ((0..a.cols()).map(|k| a.get(i, k) as u64 * b.get(k, j) as u64).sum::<u64>() % p) as u32)
                .collect()
        })
        .collect()
}

fn random_blocks(f: &Field, rng: &mut ChaCha8Rng, count: usize, rows: usize, cols: usize) -> Vec<FMatrix> {
    (0..count).map(|_| FMatrix::random(f, rows, cols, rng)).collect()
}

fn rs_plan(p: u32, n: usize, k: usize, s: usize, b: usize) -> JobPlan {
    let c = rs_code_prefix(&Field::prime(p).unwrap(), n, k).unwrap();
    JobPlan::batch_matmul(&c, &c, n, s, b).unwrap()
}

#[test]
fn plan_thresholds_for_rs_7_3() {
    let plan = rs_plan(7, 7, 3, 2, 0);
    assert_eq!((plan.product().dim(), plan.product_distance()), (5, 3));
    assert_eq!((plan.designed_threshold(), plan.wait_for()), (5, 5));
    let plan = rs_plan(7, 7, 3, 0, 1);
    assert_eq!(plan.wait_for(), 7);
    assert_eq!(plan.summary().designed_threshold, 5);
}

#[test]
fn plan_rejections() {
    let f = Field::prime(7).unwrap();
    let c = rs_code_prefix(&f, 7, 3).unwrap();
    assert!(matches!(JobPlan::batch_matmul(&c, &c, 6, 0, 0), Err(Error::Hypothesis(_))));
    let msg = JobPlan::batch_matmul(&c, &c, 7, 1, 1).unwrap_err().to_string();
    assert!(msg.contains("2b + s + 1"), "{msg}");
    let other = rs_code_prefix(&f, 7, 2).unwrap();
    assert!(JobPlan::batch_matmul(&c, &other, 7, 0, 0).is_err());
    let g = rs_code_prefix(&Field::prime(11).unwrap(), 7, 3).unwrap();
    assert!(matches!(JobPlan::batch_matmul(&c, &g, 7, 0, 0), Err(Error::FieldMismatch)));
    assert!(JobPlan::new(Vec::new(), 0, 0, 0).is_err());
}

#[test]
fn any_five_of_seven_workers_suffice() {
    let f = Field::prime(7).unwrap();
    let plan = rs_plan(7, 7, 3, 2, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_blocks(&f, &mut rng, 3, 2, 3);
    let b = random_blocks(&f, &mut rng, 3, 3, 2);
    let mut patterns = 0;
    for stragglers in Combinations::new(7, 2) {
        let got = run_batch_matmul(&plan, &a, &b, &FaultPattern::stragglers(&stragglers)).unwrap();
        for i in 0..3 {
            assert_eq!(got[i].to_rows(), matmul_mod(&a[i], &b[i], 7), "stragglers {stragglers:?}");
        }
        patterns += 1;
    }
    assert_eq!(patterns, 21);
    let too_many = FaultPattern::stragglers(&[0, 1, 2]);
    assert!(matches!(
        run_batch_matmul(&plan, &a, &b, &too_many),
        Err(Error::InsufficientResults { present: 4, required: 5 })
    ));
}

#[test]
fn byzantine_results_are_corrected_on_rs_15_3() {
    let f = Field::prime(17).unwrap();
    let plan = rs_plan(17, 15, 3, 2, 2);
    assert_eq!(plan.wait_for(), 9);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let a = random_blocks(&f, &mut rng, 3, 2, 2);
        let b = random_blocks(&f, &mut rng, 3, 2, 2);
        let mut order: Vec<usize> = (0..15).collect();
        order.shuffle(&mut rng);
        let mut corruptions = BTreeMap::new();
        for &w in &order[2..4] {
            corruptions.insert(w, FMatrix::random(&f, 2, 2, &mut rng));
        }
        let faults = FaultPattern {
            stragglers: order[..2].to_vec(),
            corruptions,
        };
        let got = run_batch_matmul(&plan, &a, &b, &faults).unwrap();
        for i in 0..3 {
            assert_eq!(got[i].to_rows(), matmul_mod(&a[i], &b[i], 17));
        }
    }
}

#[test]
fn decoding_ignores_arrival_order() {
    let f = Field::prime(11).unwrap();
    let plan = rs_plan(11, 10, 3, 3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_blocks(&f, &mut rng, 3, 2, 2);
    let b = random_blocks(&f, &mut rng, 3, 2, 2);
    let mut results: Vec<_> = encode_batch(&plan, &a, &b)
        .unwrap()
        .iter()
        .map(|t| worker_compute(t).unwrap())
        .collect();
    results[4].value = Some(FMatrix::random(&f, 2, 2, &mut rng));
    let expected = decode_batch(&plan, &results).unwrap();
    for _ in 0..10 {
        results.shuffle(&mut rng);
        assert_eq!(decode_batch(&plan, &results).unwrap(), expected);
    }
    for i in 0..3 {
        assert_eq!(expected[i].to_rows(), matmul_mod(&a[i], &b[i], 11));
    }
}

#[test]
fn strassen_over_rs_15_7_with_every_straggler_pair() {
    let f = Field::prime(17).unwrap();
    let plan = rs_plan(17, 15, 7, 2, 0);
    let t = BilinearTensor::strassen(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let am = FMatrix::random(&f, 4, 4, &mut rng);
    let bm = FMatrix::random(&f, 4, 4, &mut rng);
    let a = BlockMatrix::partition(&am, 2, 2).unwrap();
    let b = BlockMatrix::partition(&bm, 2, 2).unwrap();
    let expected = matmul_mod(&am, &bm, 17);
    for stragglers in Combinations::new(15, 2) {
        let got = run_general_matmul(&plan, &t, &a, &b, &FaultPattern::stragglers(&stragglers)).unwrap();
        assert_eq!(got.assemble().to_rows(), expected);
    }
}

#[test]
fn composed_encoders_give_the_worker_blocks() {
    let f = Field::prime(17).unwrap();
    let plan = rs_plan(17, 15, 7, 2, 0);
    let t = BilinearTensor::strassen(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = BlockMatrix::partition(&FMatrix::random(&f, 2, 2, &mut rng), 2, 2).unwrap();
    let b = BlockMatrix::partition(&FMatrix::random(&f, 2, 2, &mut rng), 2, 2).unwrap();
    let (ma, mb) = composed_encoders(&plan, &t).unwrap();
    let va = a.assemble();
    let vb = b.assemble();
    let tasks = encode_general(&plan, &t, &a, &b).unwrap();
    for task in &tasks {
        let Payload::Matmul { a: wa, b: wb } = &task.payload else { panic!("matmul task") };
        let dot = |row: &[u32], v: &FMatrix| {
            (0..4).map(|i| row[i] as u64 * v.get(i / 2, i % 2) as u64).sum::<u64>() % 17
        };
        assert_eq!(wa.get(0, 0) as u64, dot(ma.row(task.worker), &va));
        assert_eq!(wb.get(0, 0) as u64, dot(mb.row(task.worker), &vb));
    }
}

#[test]
fn tensor_rank_and_distance_hypotheses() {
    let f = Field::prime(7).unwrap();
    let plan = rs_plan(7, 7, 3, 0, 0);
    let t = BilinearTensor::strassen(&f);
    let a = BlockMatrix::partition(&FMatrix::identity(&f, 2), 2, 2).unwrap();
    assert!(matches!(encode_general(&plan, &t, &a, &a), Err(Error::Hypothesis(_))));
    // Seven Hermitian functions already fill GF(4)^8 when squared.
    let h = hermitian_code(2, 7).unwrap();
    assert_eq!(h.dim(), 7);
    assert!(matches!(JobPlan::batch_matmul(&h, &h, 8, 1, 0), Err(Error::Hypothesis(_))));
    let plan = JobPlan::batch_matmul(&h, &h, 8, 0, 0).unwrap();
    assert_eq!(plan.product_distance(), 1);
}

#[test]
fn coded_dot_product_on_rs_7_3() {
    let f = Field::prime(7).unwrap();
    let c = rs_code_prefix(&f, 7, 3).unwrap();
    let plan = JobPlan::new(vec![c.clone(), c.clone(), c], 7, 0, 0).unwrap();
    let t = MultilinearDecomp::dot_product(&f, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let x: Vec<u32> = (0..3).map(|_| rng.gen_range(0..7)).collect();
        let y: Vec<u32> = (0..3).map(|_| rng.gen_range(0..7)).collect();
        let expected = (0..3).map(|i| x[i] * y[i]).sum::<u32>() % 7;
        assert_eq!(run_multilinear(&plan, &t, &[x, y], &FaultPattern::default()).unwrap(), vec![expected]);
    }
}

#[test]
fn dot_product_over_rs_9_2_tolerates_five_stragglers() {
    let f = Field::prime(11).unwrap();
    let c = rs_code_prefix(&f, 9, 2).unwrap();
    let plan = JobPlan::new(vec![c.clone(), c.clone(), c.clone()], 9, 5, 0).unwrap();
    assert_eq!(plan.product_distance(), 6);
    assert!(JobPlan::new(vec![c.clone(), c.clone(), c], 9, 6, 0).is_err());
    let t = MultilinearDecomp::dot_product(&f, 2);
    let xs = vec![vec![3, 9], vec![4, 7]];
    let expected = (3 * 4 + 9 * 7) % 11;
    let tasks = encode_multilinear(&plan, &t, &xs).unwrap();
    let honest: Vec<_> = tasks.iter().map(|t| worker_compute(t).unwrap()).collect();
    for stragglers in Combinations::new(9, 5) {
        let results = FaultPattern::stragglers(&stragglers).apply(honest.clone()).unwrap();
        assert_eq!(decode_multilinear(&plan, &t, &results).unwrap(), vec![expected]);
    }
}

#[test]
fn zero_input_gives_zero_output() {
    let f = Field::prime(11).unwrap();
    let c = rs_code_prefix(&f, 10, 3).unwrap();
    let plan = JobPlan::new(vec![c.clone(), c.clone(), c.clone(), c], 10, 1, 0).unwrap();
    let t = MultilinearDecomp::trilinear_trace(&f, 3);
    let got = run_multilinear(&plan, &t, &[vec![0; 3], vec![5, 6, 7], vec![1, 2, 3]], &FaultPattern::stragglers(&[4]))
        .unwrap();
    assert_eq!(got, vec![0]);
    let got = run_multilinear(&plan, &t, &[vec![1, 2, 3], vec![5, 6, 7], vec![1, 2, 3]], &FaultPattern::default())
        .unwrap();
    assert_eq!(got, vec![(5 + 2 * 6 * 2 + 3 * 7 * 3) % 11]);
}

#[test]
fn multilinear_plan_must_match_the_map() {
    let f = Field::prime(7).unwrap();
    let c = rs_code_prefix(&f, 7, 3).unwrap();
    let plan = rs_plan(7, 7, 3, 0, 0);
    let t = MultilinearDecomp::dot_product(&f, 3);
    assert!(encode_multilinear(&plan, &t, &[vec![1, 2, 3], vec![1, 2, 3]]).is_err());
    let plan = JobPlan::new(vec![c.clone(), c.clone(), c], 7, 0, 0).unwrap();
    let wide = MultilinearDecomp::dot_product(&f, 4);
    assert!(matches!(
        encode_multilinear(&plan, &wide, &[vec![1; 4], vec![1; 4]]),
        Err(Error::Hypothesis(_))
    ));
}
