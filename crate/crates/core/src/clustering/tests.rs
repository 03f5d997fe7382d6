use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dpp::DppSampler;
use crate::kernels::{rbf_gram, sq_euclidean, GramMatrix, KernelKind};
use crate::linalg::SymMatrix;

fn line(xs: &[f64]) -> Vec<Vec<f64>> {
    xs.iter().map(|&x| vec![x]).collect()
}

fn euclid(points: &[Vec<f64>]) -> impl Fn(usize, usize) -> f64 + '_ {
    move |i, j| sq_euclidean(&points[i], &points[j])
}

fn blobs(rng: &mut ChaCha8Rng, groups: usize, per: usize, spread: f64) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for g in 0..groups {
        for _ in 0..per {
            pts.push(vec![
                20.0 * g as f64 + spread * rng.random_range(-1.0..1.0),
                spread * rng.random_range(-1.0..1.0),
            ]);
        }
    }
    pts
}

#[test]
fn seed_set_rejects_duplicates_and_empty() {
    assert!(SeedSet::new(vec![], SeedMethod::Rand).is_err());
    assert!(SeedSet::new(vec![1, 1], SeedMethod::Rand).is_err());
    assert_eq!(SeedSet::new(vec![2, 0], SeedMethod::Rand).unwrap().inferred_k(), 2);
}

#[test]
fn method_names_round_trip() {
    for m in SeedMethod::ALL {
        assert_eq!(m.name().parse::<SeedMethod>().unwrap(), m);
    }
    assert!("kmeans".parse::<SeedMethod>().is_err());
    assert!(!SeedMethod::Dpp.needs_k());
}

#[test]
fn random_init_full_and_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut all = init_random(5, 5, &mut rng).unwrap().indices().to_vec();
    all.sort();
    assert_eq!(all, vec![0, 1, 2, 3, 4]);
    assert!(init_random(3, 4, &mut rng).is_err());
    assert!(init_random(3, 0, &mut rng).is_err());

    let draws = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..draws {
        counts[init_random(4, 1, &mut rng).unwrap().indices()[0]] += 1;
    }
    let sd = (0.25f64 * 0.75 / draws as f64).sqrt();
    for c in counts {
        assert!((c as f64 / draws as f64 - 0.25).abs() < 3.0 * sd);
    }
}

#[test]
fn random_init_is_deterministic() {
    let a = init_random(50, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = init_random(50, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn kmeanspp_d2_law_on_line() {
    let pts = line(&[0.0, 1.0, 3.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 100_000;
    let mut far = 0;
    for _ in 0..draws {
        let s = init_kmeanspp_with_first(euclid(&pts), 3, 2, 0, &mut rng).unwrap();
        assert_eq!(s.method(), SeedMethod::PlusPlus);
        if s.indices()[1] == 2 {
            far += 1;
        }
    }
    let p = far as f64 / draws as f64;
    let sd = (0.9f64 * 0.1 / draws as f64).sqrt();
    assert!((p - 0.9).abs() < 3.0 * sd, "{p}");
}

#[test]
fn kmeanspp_outlier_is_certain() {
    let pts = line(&[0.0, 0.0, 0.0, 5.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let s = init_kmeanspp_with_first(euclid(&pts), 4, 2, 1, &mut rng).unwrap();
        assert_eq!(s.indices(), &[1, 3]);
    }
    let err = init_kmeanspp_with_first(euclid(&pts), 4, 3, 1, &mut rng).unwrap_err();
    assert!(matches!(err, crate::error::Error::Degenerate(_)));
}

#[test]
fn kdpp_init_with_k_n_takes_everything() {
    let pts = line(&[0.0, 1.0, 2.5, 4.0]);
    let g = rbf_gram(&pts, 1.0).unwrap();
    let sampler = DppSampler::new(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = init_kdpp(&sampler, 4, &mut rng).unwrap().indices().to_vec();
    s.sort();
    assert_eq!(s, vec![0, 1, 2, 3]);
    let seq = init_sequential(&g, 4, &mut rng).unwrap();
    assert_eq!(seq.inferred_k(), 4);
}

#[test]
fn dpp_init_on_tight_cluster_infers_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.random_range(0.0..0.05), rng.random_range(0.0..0.05)]).collect();
    let g = rbf_gram(&pts, 1.0).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            assert!(g.get(i, j) > 0.99);
        }
    }
    let sampler = DppSampler::new(&g).unwrap();
    let ones = (0..1000)
        .filter(|_| init_dpp(&sampler, &mut rng).unwrap().inferred_k() == 1)
        .count();
    assert!(ones >= 950, "{ones}");
}

#[test]
fn dpp_init_on_zero_kernel_is_degenerate() {
    let g = GramMatrix::from_matrix(SymMatrix::<f64>::from_diagonal(&[0.0, 0.0]), KernelKind::Rbf { sigma: 1.0 });
    let sampler = DppSampler::new(&g).unwrap();
    assert!(init_dpp(&sampler, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}

#[test]
fn lloyd_vector_hand_example() {
    let pts = line(&[0.0, 1.0, 9.0, 10.0]);
    let seeds = SeedSet::new(vec![1, 2], SeedMethod::Rand).unwrap();
    let c = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(c.assignments, vec![0, 0, 1, 1]);
    assert_eq!(c.centroids().unwrap(), &[vec![0.5], vec![9.5]]);
    assert!((c.cost - 1.0).abs() < 1e-12);
    assert!(c.converged);
    assert_eq!(c.mode, ClusterMode::Vector);
    assert!((c.cost_per_point() - 0.25).abs() < 1e-12);
}

#[test]
fn lloyd_vector_single_cluster_is_total_scatter() {
    let pts = line(&[1.0, 2.0, 6.0]);
    let seeds = SeedSet::new(vec![2], SeedMethod::Rand).unwrap();
    let c = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert!((c.centroids().unwrap()[0][0] - 3.0).abs() < 1e-12);
    assert!((c.cost - 14.0).abs() < 1e-12);
}

#[test]
fn lloyd_vector_repairs_empty_cluster() {
    // Two seeds on identical points: the second cluster starts empty.
    let pts = line(&[0.0, 0.0, 1.0, 10.0]);
    let seeds = SeedSet::new(vec![0, 1], SeedMethod::Rand).unwrap();
    let c = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(c.members().iter().filter(|m| m.is_empty()).count(), 0);
    assert_eq!(c.assignments[0], c.assignments[2]);
    assert_ne!(c.assignments[0], c.assignments[3]);
}

#[test]
fn lloyd_vector_rejects_bad_input() {
    let pts = vec![vec![0.0], vec![1.0, 2.0]];
    let seeds = SeedSet::new(vec![0], SeedMethod::Rand).unwrap();
    assert!(lloyd_vector(&pts, &seeds, 10).is_err());
    let seeds = SeedSet::new(vec![5], SeedMethod::Rand).unwrap();
    assert!(lloyd_vector(&line(&[0.0]), &seeds, 10).is_err());
}

#[test]
fn lloyd_kernel_k_equals_n() {
    let pts = line(&[0.0, 1.0, 3.0]);
    let g = rbf_gram(&pts, 1.0).unwrap();
    let seeds = SeedSet::new(vec![2, 0, 1], SeedMethod::DppK).unwrap();
    let c = lloyd_kernel(&g, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(c.assignments, vec![1, 2, 0]);
    assert_eq!(c.cost, 0.0);
}

#[test]
fn lloyd_kernel_block_gram() {
    let n = 6;
    let m = SymMatrix::<f64>::from_fn(n, |i, j| if (i < 3) == (j < 3) { 1.0 } else { 0.0 });
    let g = GramMatrix::from_matrix(m, KernelKind::WordNgram { max_n: 2 });
    let seeds = SeedSet::new(vec![4, 1], SeedMethod::DppK).unwrap();
    let c = lloyd_kernel(&g, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(c.assignments, vec![1, 1, 1, 0, 0, 0]);
    assert!(c.cost.abs() < 1e-12);
    assert_eq!(c.members(), vec![vec![3, 4, 5], vec![0, 1, 2]]);
    assert_eq!(c.mode, ClusterMode::Kernel);
}

#[test]
fn kernel_and_vector_agree_on_separated_blobs() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = blobs(&mut rng, 3, 8, 1.0);
        let g = rbf_gram(&pts, 0.01).unwrap();
        let seeds = init_kmeanspp(euclid(&pts), pts.len(), 3, &mut rng).unwrap();
        let v = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
        let k = lloyd_kernel(&g, &seeds, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(v.assignments, k.assignments, "seed {seed}");
    }
}

#[test]
fn kernel_cost_matches_linear_kernel_vector_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = blobs(&mut rng, 2, 6, 3.0);
    let n = pts.len();
    let lin = SymMatrix::from_fn(n, |i, j| pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum());
    let g = GramMatrix::from_matrix(lin, KernelKind::Rbf { sigma: 1.0 });
    let assign: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let a = kernel_cost(&g, &assign, 3);
    let b = vector_cost(&pts, &assign, 3);
    assert!((a - b).abs() < 1e-9 * b.max(1.0), "{a} vs {b}");
}

#[test]
fn f32_lloyd_runs() {
    let pts: Vec<Vec<f32>> = vec![vec![0.0], vec![1.0], vec![9.0], vec![10.0]];
    let seeds = SeedSet::new(vec![1, 2], SeedMethod::Rand).unwrap();
    let c = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
    assert!((c.cost - 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_lloyd_is_monotone_and_cost_recomputes(seed in any::<u64>(), n in 4usize..40, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
        let seeds = init_random(n, k, &mut rng).unwrap();
        let c = lloyd_vector(&pts, &seeds, DEFAULT_MAX_ITER).unwrap();
        for w in c.cost_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        let re = vector_cost(&pts, &c.assignments, k);
        prop_assert!((re - c.cost).abs() <= 1e-8 * c.cost.max(1.0));
        prop_assert!(c.assignments.iter().all(|&a| a < k));
        prop_assert!(c.members().iter().all(|m| !m.is_empty()));
    }

    #[test]
    fn kernel_lloyd_is_monotone_and_cost_recomputes(seed in any::<u64>(), n in 4usize..30, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-3.0..3.0)]).collect();
        let g = rbf_gram(&pts, 0.5).unwrap();
        let seeds = init_random(n, k, &mut rng).unwrap();
        let c = lloyd_kernel(&g, &seeds, DEFAULT_MAX_ITER).unwrap();
        for w in c.cost_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        let re = kernel_cost(&g, &c.assignments, k);
        prop_assert!((re - c.cost).abs() <= 1e-8 * c.cost.max(1.0));
        prop_assert!(c.members().iter().all(|m| !m.is_empty()));
    }
}
