use coded_compute::algebra::{FMatrix, Field};
use coded_compute::tensors::{BilinearTensor, BlockMatrix, MultilinearDecomp, VerifyMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Schoolbook product modulo a prime on plain integers.
fn matmul_mod(a: &[Vec<u32>], b: &[Vec<u32>], p: u32) -> Vec<Vec<u32>> {
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| ((0..inner).map(|k| row[k] as u64 * b[k][j] as u64).sum::<u64>() % p as u64) as u32)
                .collect()
        })
        .collect()
}

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: u32) -> Vec<Vec<u32>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..p)).collect()).collect()
}

fn multiply_blocks(t: &BilinearTensor, a: &FMatrix, b: &FMatrix) -> FMatrix {
    let (c, z, u) = t.shape();
    let a = BlockMatrix::partition(a, c, z).unwrap();
    let b = BlockMatrix::partition(b, z, u).unwrap();
    t.multiply(&a, &b).unwrap().assemble()
}

#[test]
fn naive_tensor_matches_schoolbook_products() {
    let f = Field::prime(5).unwrap();
    let t = BilinearTensor::naive(&f, 2, 3, 2).unwrap();
    assert_eq!(t.rank(), 12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let a = random_rows(&mut rng, 2, 3, 5);
        let b = random_rows(&mut rng, 3, 2, 5);
        let got = multiply_blocks(&t, &FMatrix::from_rows(&f, &a).unwrap(), &FMatrix::from_rows(&f, &b).unwrap());
        assert_eq!(got.to_rows(), matmul_mod(&a, &b, 5));
    }
}

#[test]
fn strassen_on_matrix_blocks() {
    let f = Field::prime(7).unwrap();
    let t = BilinearTensor::strassen(&f);
    assert_eq!((t.shape(), t.rank()), ((2, 2, 2), 7));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (rows, inner, cols) in [(2, 2, 2), (4, 6, 2), (6, 4, 8)] {
        let a = random_rows(&mut rng, rows, inner, 7);
        let b = random_rows(&mut rng, inner, cols, 7);
        let got = multiply_blocks(&t, &FMatrix::from_rows(&f, &a).unwrap(), &FMatrix::from_rows(&f, &b).unwrap());
        assert_eq!(got.to_rows(), matmul_mod(&a, &b, 7), "{rows}x{inner}x{cols}");
    }
}

#[test]
fn strassen_with_identity_and_zero_blocks() {
    let f = Field::prime(11).unwrap();
    let t = BilinearTensor::strassen(&f);
    let id = FMatrix::identity(&f, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = FMatrix::random(&f, 4, 4, &mut rng);
    assert_eq!(multiply_blocks(&t, &id, &m), m);
    assert_eq!(multiply_blocks(&t, &m, &id), m);
    let zero = FMatrix::zeros(&f, 4, 4);
    assert!(multiply_blocks(&t, &zero, &m).is_zero());
    let (ah, bh) = t
        .encode(&BlockMatrix::partition(&zero, 2, 2).unwrap(), &BlockMatrix::partition(&zero, 2, 2).unwrap())
        .unwrap();
    assert!(ah.iter().chain(&bh).all(FMatrix::is_zero));
    let decoded = t.decode(&vec![FMatrix::zeros(&f, 2, 2); 7]).unwrap();
    assert!(decoded.assemble().is_zero());
}

#[test]
fn strassen_verifies_in_every_mode() {
    let f2 = Field::prime(2).unwrap();
    let v = BilinearTensor::strassen(&f2).verify(VerifyMode::Exhaustive).unwrap();
    assert!(v.passed);
    assert_eq!(v.checked, 256);
    let f4 = Field::new(2, 2, None).unwrap();
    let v = BilinearTensor::strassen(&f4).verify(VerifyMode::Randomized { trials: 200, seed: 1 }).unwrap();
    assert!(v.passed);
    assert_eq!(v.miss_probability, Some(0.5f64.powi(200)));
    let f7 = Field::prime(7).unwrap();
    assert!(BilinearTensor::strassen(&f7).verify(VerifyMode::Formal).unwrap().passed);
}

#[test]
fn broken_tensors_are_caught() {
    let f = Field::prime(3).unwrap();
    let t = BilinearTensor::strassen(&f);
    let broken = t.with_eta_entry(0, 0, f.add(t.eta().get(0, 0), 1));
    for mode in [VerifyMode::Exhaustive, VerifyMode::Formal, VerifyMode::Randomized { trials: 100, seed: 4 }] {
        let v = broken.verify(mode).unwrap();
        assert!(!v.passed, "{mode:?}");
        let ce = v.counterexample.unwrap();
        assert_eq!(ce.expected, ce.a.mul(&ce.b).unwrap());
        assert_ne!(ce.expected, ce.got);
    }
}

#[test]
fn strassen_square_is_rank_49() {
    let f = Field::prime(5).unwrap();
    let t = BilinearTensor::strassen_power(&f, 2).unwrap();
    assert_eq!((t.shape(), t.rank()), ((4, 4, 4), 49));
    assert!(t.verify(VerifyMode::Formal).unwrap().passed);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_rows(&mut rng, 4, 4, 5);
    let b = random_rows(&mut rng, 4, 4, 5);
    let got = multiply_blocks(&t, &FMatrix::from_rows(&f, &a).unwrap(), &FMatrix::from_rows(&f, &b).unwrap());
    assert_eq!(got.to_rows(), matmul_mod(&a, &b, 5));
    assert_eq!(BilinearTensor::strassen_power(&f, 0).unwrap().rank(), 1);
}

#[test]
fn composing_rectangular_tensors() {
    let f = Field::prime(7).unwrap();
    let t = BilinearTensor::naive(&f, 1, 2, 3).unwrap().compose(&BilinearTensor::strassen(&f)).unwrap();
    assert_eq!((t.shape(), t.rank()), ((2, 4, 6), 42));
    assert!(t.verify(VerifyMode::Randomized { trials: 50, seed: 8 }).unwrap().passed);
    let other = Field::prime(5).unwrap();
    assert!(BilinearTensor::strassen(&f).compose(&BilinearTensor::strassen(&other)).is_err());
}

#[test]
fn multilinear_maps_match_direct_sums() {
    let f = Field::prime(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dot = MultilinearDecomp::dot_product(&f, 4);
    let trace = MultilinearDecomp::trilinear_trace(&f, 3);
    assert_eq!((dot.arity(), trace.arity(), trace.rank()), (2, 3, 3));
    for _ in 0..200 {
        let x: Vec<u32> = (0..4).map(|_| rng.gen_range(0..13)).collect();
        let y: Vec<u32> = (0..4).map(|_| rng.gen_range(0..13)).collect();
        let expected = (0..4).map(|i| x[i] * y[i]).sum::<u32>() % 13;
        assert_eq!(dot.eval(&[x.clone(), y.clone()]).unwrap(), vec![expected]);
        let expected = (0..3).map(|i| x[i] * y[i] * x[i + 1]).sum::<u32>() % 13;
        assert_eq!(trace.eval(&[x[..3].to_vec(), y[..3].to_vec(), x[1..].to_vec()]).unwrap(), vec![expected]);
    }
    assert!(dot.eval(&[vec![1, 2, 3], vec![1, 2, 3, 4]]).is_err());
    assert!(dot.eval(&[vec![13, 0, 0, 0], vec![0; 4]]).is_err());
}

#[test]
fn bilinear_as_multilinear() {
    let f = Field::prime(7).unwrap();
    let t = BilinearTensor::strassen(&f);
    let m = MultilinearDecomp::from_bilinear(&t);
    assert_eq!((m.input_dims(), m.output_dim(), m.rank()), (&[4, 4][..], 4, 7));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let a = random_rows(&mut rng, 2, 2, 7);
        let b = random_rows(&mut rng, 2, 2, 7);
        let c: Vec<u32> = matmul_mod(&a, &b, 7).concat();
        assert_eq!(m.eval(&[a.concat(), b.concat()]).unwrap(), c);
    }
}
