use coded_compute::algebra::{poly, FMatrix, Field, Solution};
use coded_compute::codes::{stack_symbols, unstack_symbols, weight};
use coded_compute::evalcodes::rs_code_prefix;
use coded_compute::harness::{measure_recovery_threshold, Job, JobTarget, Mode};
use coded_compute::scheme::JobPlan;
use coded_compute::tensors::{BilinearTensor, BlockMatrix};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 10] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3)];

fn field(i: usize) -> Field {
    let (p, m) = FIELDS[i];
    Field::new(p, m, None).unwrap()
}

fn field_and_elems(count: usize) -> impl Strategy<Value = (Field, Vec<u32>)> {
    (0..FIELDS.len()).prop_flat_map(move |i| {
        let f = field(i);
        let q = f.order();
        (Just(f), proptest::collection::vec(0..q, count))
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((f, v) in field_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.mul(a, 1), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.mul(f.div(b, a).unwrap(), a), b);
        } else {
            prop_assert!(f.inv(a).is_err());
        }
    }

    #[test]
    fn frobenius((f, v) in field_and_elems(2)) {
        let p = f.characteristic() as u64;
        let (a, b) = (v[0], v[1]);
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.pow(a, f.order() as u64), a);
        if a != 0 {
            prop_assert_eq!(f.pow(a, f.order() as u64 - 1), 1);
        }
    }

    #[test]
    fn rref_is_idempotent_and_keeps_the_row_space(i in 0..FIELDS.len(), rows in 1usize..6, cols in 1usize..7, seed: u64) {
        let f = field(i);
        let m = FMatrix::random(&f, rows, cols, &mut rng(seed));
        let r = m.rref();
        prop_assert_eq!(&r.reduced.rref().reduced, &r.reduced);
        prop_assert_eq!(r.rank, m.rank());
        prop_assert!(r.reduced.same_row_space(&m).unwrap());
        prop_assert_eq!(r.pivots.len(), r.rank);
        let null = m.nullspace();
        prop_assert_eq!(null.rows(), cols - r.rank);
        if null.rows() > 0 {
            prop_assert!(m.mul(&null.transpose()).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_finds_a_solution(i in 0..FIELDS.len(), rows in 1usize..6, cols in 1usize..6, seed: u64) {
        let f = field(i);
        let mut r = rng(seed);
        let a = FMatrix::random(&f, rows, cols, &mut r);
        let x0 = FMatrix::random(&f, cols, 2, &mut r);
        let b = a.mul(&x0).unwrap();
        match a.solve(&b).unwrap() {
            Solution::Feasible { particular, nullspace } => {
                prop_assert_eq!(a.mul(&particular).unwrap(), b);
                prop_assert_eq!(nullspace.rows(), cols - a.rank());
            }
            Solution::Infeasible => prop_assert!(false, "consistent system reported infeasible"),
        }
    }

    #[test]
    fn interpolation_round_trip(i in 0..FIELDS.len(), seed: u64) {
        let f = field(i);
        let mut r = rng(seed);
        let mut xs: Vec<u32> = f.elements().collect();
        xs.shuffle(&mut r);
        xs.truncate((f.order() as usize).min(5));
        let ys: Vec<u32> = xs.iter().map(|_| f.random(&mut r)).collect();
        let p = poly::interpolate(&f, &xs, &ys).unwrap();
        prop_assert!(p.len() <= xs.len());
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(poly::eval(&f, &p, *x), *y);
        }
    }

    #[test]
    fn systematic_embedding_and_erasure_decoding(i in 0..FIELDS.len(), seed: u64) {
        let f = field(i);
        let n = (f.order() as usize).min(8);
        let mut r = rng(seed);
        let k = 1 + (seed as usize) % n;
        let c = rs_code_prefix(&f, n, k).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let positions = order[..k].to_vec();
        let msg = FMatrix::random(&f, k, 2, &mut r);
        let word = c.systematic_embed(&positions, &msg).unwrap();
        prop_assert_eq!(word.select_rows(&positions), msg);
        prop_assert!(c.is_codeword(&word.col(0)));
        let present: Vec<bool> = (0..n).map(|j| positions.contains(&j)).collect();
        prop_assert_eq!(c.erasure_decode(&word, &present).unwrap(), word);
    }

    #[test]
    fn rs_codewords_are_heavy(i in 0..FIELDS.len(), seed: u64) {
        let f = field(i);
        let n = f.order() as usize;
        let k = 1 + (seed as usize) % n;
        let c = rs_code_prefix(&f, n, k).unwrap();
        let mut r = rng(seed);
        let msg: Vec<u32> = (0..k).map(|_| f.random(&mut r)).collect();
        let word = c.encode_scalars(&msg).unwrap();
        if msg.iter().any(|&m| m != 0) {
            prop_assert!(weight(&word) > n - k);
        } else {
            prop_assert_eq!(weight(&word), 0);
        }
    }

    #[test]
    fn schur_product_contains_pairwise_products(i in 0..FIELDS.len(), seed: u64) {
        let f = field(i);
        let n = (f.order() as usize).min(8);
        let mut r = rng(seed);
        let k1 = 1 + (seed as usize) % n;
        let k2 = 1 + (seed as usize / 7) % n;
        let c1 = rs_code_prefix(&f, n, k1).unwrap();
        let c2 = rs_code_prefix(&f, n, k2).unwrap();
        let prod = c1.hs_product(&c2).unwrap();
        prop_assert_eq!(prod.dim(), (k1 + k2 - 1).min(n));
        let u = c1.encode_scalars(&(0..k1).map(|_| f.random(&mut r)).collect::<Vec<_>>()).unwrap();
        let v = c2.encode_scalars(&(0..k2).map(|_| f.random(&mut r)).collect::<Vec<_>>()).unwrap();
        let uv: Vec<u32> = u.iter().zip(&v).map(|(&a, &b)| f.mul(a, b)).collect();
        prop_assert!(prod.is_codeword(&uv));
    }

    #[test]
    fn block_stacking_round_trip(i in 0..FIELDS.len(), count in 1usize..5, rows in 1usize..4, cols in 1usize..4, seed: u64) {
        let f = field(i);
        let mut r = rng(seed);
        let blocks: Vec<FMatrix> = (0..count).map(|_| FMatrix::random(&f, rows, cols, &mut r)).collect();
        let stacked = stack_symbols(&blocks).unwrap();
        prop_assert_eq!(stacked.shape(), (count, rows * cols));
        prop_assert_eq!(unstack_symbols(&stacked, rows, cols).unwrap(), blocks);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn strassen_is_bilinear(i in 0..FIELDS.len(), seed: u64) {
        let f = field(i);
        let t = BilinearTensor::strassen(&f);
        let mut r = rng(seed);
        let mut m = || FMatrix::random(&f, 4, 4, &mut r);
        let (a1, a2, b) = (m(), m(), m());
        let s = f.random(&mut rng(seed ^ 1));
        let mul = |a: &FMatrix, b: &FMatrix| {
            t.multiply(&BlockMatrix::partition(a, 2, 2).unwrap(), &BlockMatrix::partition(b, 2, 2).unwrap())
                .unwrap()
                .assemble()
        };
        let lhs = mul(&a1.scale(s).add(&a2).unwrap(), &b);
        let rhs = mul(&a1, &b).scale(s).add(&mul(&a2, &b)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs, a1.scale(s).add(&a2).unwrap().mul(&b).unwrap());
    }

    #[test]
    fn measured_thresholds_are_monotone(n in 3usize..8, k in 1usize..4, seed in 0u64..1000) {
        prop_assume!(2 * k - 1 <= n);
        let f = Field::prime(7).unwrap();
        let c = rs_code_prefix(&f, n, k).unwrap();
        let job = Job::Batch { plan: JobPlan::batch_matmul(&c, &c, n, 0, 0).unwrap(), block: (1, 1, 1) };
        let m = measure_recovery_threshold(&JobTarget::new(&job, seed).unwrap(), Mode::Exhaustive, seed).unwrap();
        prop_assert_eq!(m.monotone, Some(true));
        prop_assert_eq!(m.measured, Some(2 * k - 1));
    }
}
