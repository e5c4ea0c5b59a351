//! Engine results against independent brute-force computations.

mod common;

use common::{ext_model_text, random_ext, rfold, zcl_oracle, Ext};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqtc_core::invariants::{zcl, AssertionSet};
use seqtc_core::linalg::{q, RationalMatrix};
use seqtc_core::model::ModelFile;

fn load(name: &str) -> ModelFile {
    let text = std::fs::read_to_string(common::models_dir().join(format!("{name}.model"))).unwrap();
    ModelFile::parse(&text).unwrap()
}

fn engine_zcl(name: &str, r: u32) -> u32 {
    let m = load(name);
    let f = m.fibration().unwrap();
    zcl(&f, r, 400, &AssertionSet::default()).unwrap().value
}

// Λ(x3, y3, z5), dz = xy, as base/fiber data for the oracle.
fn ky_data(base: bool) -> (Vec<u32>, Vec<u32>, Vec<Vec<(i64, Vec<usize>)>>) {
    let d = vec![vec![], vec![], vec![(1, vec![0, 1])]];
    if base {
        (vec![3], vec![3, 5], d)
    } else {
        (vec![], vec![3, 3, 5], d)
    }
}

#[test]
fn zcl_matches_brute_force_all_odd_fiber() {
    let (b, fib, d) = ky_data(false);
    for r in 2..=3 {
        let (model, total, images) = rfold(&b, &fib, &d, r);
        assert!(model.is_valid());
        assert_eq!(engine_zcl("ky", r as u32), zcl_oracle(&model, &total, &images), "r = {r}");
    }
}

#[test]
fn zcl_matches_brute_force_non_tncz() {
    let (b, fib, d) = ky_data(true);
    let expected = [2, 4, 5];
    for r in 2..=4 {
        let (model, total, images) = rfold(&b, &fib, &d, r);
        let oracle = zcl_oracle(&model, &total, &images);
        assert_eq!(oracle, expected[r - 2], "oracle r = {r}");
        assert_eq!(engine_zcl("not_tncz", r as u32), oracle, "r = {r}");
    }
}

#[test]
fn zcl_of_odd_sphere_is_r_minus_one() {
    for r in 2..=5 {
        let (model, total, images) = rfold(&[], &[3], &[vec![]], r);
        assert_eq!(zcl_oracle(&model, &total, &images), r as u32 - 1);
        assert_eq!(engine_zcl("odd_sphere_point", r as u32), r as u32 - 1);
    }
}

#[test]
fn random_all_odd_cohomology() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..50 {
        let e = random_ext(&mut rng, 6);
        let text = ext_model_text(&e);
        let cdga = ModelFile::parse(&text).unwrap().cdga().unwrap();
        let mut euler = 0i64;
        for n in 0..=e.top() {
            let h = cdga.cohomology(n).dim();
            assert_eq!(h, e.cohomology_dim(n), "case {case}, degree {n}\n{text}");
            euler += if n % 2 == 0 { h as i64 } else { -(h as i64) };
        }
        let chain: i64 = (0..=e.top()).map(|n| if n % 2 == 0 { 1 } else { -1 } * e.algebra_dim(n) as i64).sum();
        assert_eq!(euler, chain, "case {case}");
    }
}

/// Fraction-free Gaussian elimination over the integers.
fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m = rows.to_vec();
    let (nr, nc) = (m.len(), m[0].len());
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..nc {
        let Some(p) = (rank..nr).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..nr {
            for j in col + 1..nc {
                let v = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].abs();
        rank += 1;
        if rank == nr {
            break;
        }
    }
    rank
}

#[test]
fn rank_matches_fraction_free_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        // Low-rank products keep dependencies in play.
        let k = rng.gen_range(1..=6);
        let a: Vec<Vec<i64>> = (0..6).map(|_| (0..k).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let b: Vec<Vec<i64>> = (0..k).map(|_| (0..9).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let m: Vec<Vec<i64>> =
            (0..6).map(|i| (0..9).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect();
        let dense: Vec<Vec<_>> = m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let ints: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(RationalMatrix::from_dense(&dense).rank(), bareiss_rank(&ints));
    }
}

#[test]
fn monomial_basis_enumeration() {
    // Λ(x3, y3, z5) in degree 8: exactly xz and yz.
    let m = load("ky");
    let cdga = m.cdga().unwrap();
    let names: Vec<String> =
        cdga.slice(8).monomials().iter().map(|mono| cdga.gens().format_monomial(mono)).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(sorted, vec!["x*z", "y*z"]);
    let e = Ext::new(vec![3, 3, 5]);
    assert_eq!(e.algebra_dim(8), 2);
}

proptest! {
    #[test]
    fn graded_commutative_and_associative(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ModelFile::parse("[generators]\na = 2\nb = 3\nc = 1\nd = 4\n").unwrap();
        let gens = m.gens().clone();
        let pick = |rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..4);
            let j = rng.gen_range(0..4);
            let p = gens.mul(&gens.generator_poly(i), &gens.generator_poly(j));
            (p, gens.generator(i).degree + gens.generator(j).degree)
        };
        let (x, dx) = pick(&mut rng);
        let (y, dy) = pick(&mut rng);
        let (z, _) = pick(&mut rng);
        let xy = gens.mul(&x, &y);
        let yx = gens.mul(&y, &x);
        let expect = if dx * dy % 2 == 1 { yx.neg() } else { yx };
        prop_assert_eq!(xy, expect);
        prop_assert_eq!(gens.mul(&gens.mul(&x, &y), &z), gens.mul(&x, &gens.mul(&y, &z)));
    }

    #[test]
    fn rank_plus_nullity(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 1..6)) {
        let dense: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let m = RationalMatrix::from_dense(&dense);
        let kernel = seqtc_core::linalg::kernel(&m);
        prop_assert_eq!(m.rank() + kernel.dim(), 5);
    }
}
