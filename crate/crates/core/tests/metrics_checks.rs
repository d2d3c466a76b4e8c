use std::collections::{HashMap, HashSet, VecDeque};

use apollonian_core::coding::{chain_distance, Code};
use apollonian_core::experiments::stats;
use apollonian_core::generator::{GraphState, Model, QSchedule};
use apollonian_core::metrics;
use apollonian_core::rng::rng_from_seed;
use proptest::prelude::*;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

fn ran(d: u8, steps: u32, seed: u64) -> GraphState {
    let mut g = GraphState::new(d, Model::Ran).unwrap();
    g.grow(steps, None, &mut rng_from_seed(seed)).unwrap();
    g
}

/// Plain textbook BFS, kept separate from the library's scratch version.
fn bfs(adj: &[Vec<u32>], src: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[src as usize] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_distance_is_graph_distance(d in 2u8..=4, steps in 1u32..120, seed in any::<u64>()) {
        let g = ran(d, steps, seed);
        let inner: Vec<u32> = (0..g.vertex_count() as u32).filter(|&v| g.code_of(v).is_some()).collect();
        for &u in &inner {
            let dist = bfs(g.adjacency(), u);
            let cu = g.code_of(u).unwrap();
            for &v in &inner {
                prop_assert_eq!(chain_distance(&cu, &g.code_of(v).unwrap()), dist[v as usize] as usize);
            }
        }
    }

    #[test]
    fn library_bfs_and_eccentricities(d in 2u8..=3, steps in 1u32..80, seed in any::<u64>()) {
        let g = ran(d, steps, seed);
        let n = g.vertex_count() as u32;
        let mut diam = 0;
        for u in 0..n {
            let dist = bfs(g.adjacency(), u);
            prop_assert_eq!(&metrics::bfs_from(g.adjacency(), u), &dist);
            let ecc = *dist.iter().max().unwrap();
            prop_assert_eq!(metrics::flooding(&g, u).unwrap(), ecc);
            diam = diam.max(ecc);
        }
        prop_assert_eq!(metrics::diameter(&g).unwrap(), diam);
    }
}

#[test]
fn figure_pair_distance() {
    // Full occupation for four steps holds every code of length <= 4.
    let mut g = GraphState::new(2, Model::Ean).unwrap();
    g.grow(4, Some(&QSchedule::Constant { q: 1.0 }), &mut rng_from_seed(0)).unwrap();
    let by_code: HashMap<String, u32> = (0..g.vertex_count() as u32)
        .filter_map(|v| g.code_of(v).map(|c| (c.to_string(), v)))
        .collect();
    let (u, v) = (by_code["132"], by_code["3312"]);
    assert_eq!(metrics::bfs_distance(&g, u, v).unwrap(), 3);
    let (a, b) = (Code::parse(2, "132").unwrap(), Code::parse(2, "3312").unwrap());
    assert_eq!(chain_distance(&a, &b), 3);
}

#[test]
fn local_clustering_counts_triangles() {
    let g = ran(3, 300, 8);
    let adj = g.adjacency();
    let sets: Vec<HashSet<u32>> = adj.iter().map(|n| n.iter().copied().collect()).collect();
    let local = metrics::local_clustering(&g);
    for (v, nbrs) in adj.iter().enumerate() {
        let k = nbrs.len();
        let mut links = 0;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if sets[a as usize].contains(&b) {
                    links += 1;
                }
            }
        }
        let want = links as f64 / (k * (k - 1) / 2) as f64;
        assert!((local[v] - want).abs() < 1e-15);
        assert!((local[v] - metrics::clustering_of_degree(3, k as u32)).abs() < 1e-12, "vertex {v}");
    }
}

#[test]
fn degree_law_is_a_distribution() {
    for d in 2..=5u32 {
        let table = metrics::pk_table(d, 5000).unwrap();
        let head: f64 = table.iter().sum();
        let tail = metrics::pk_tail_mass(d, d + table.len() as u32).unwrap();
        assert!((head + tail - 1.0).abs() < 1e-10, "d={d}: {head} + {tail}");
        for (i, &p) in table.iter().enumerate() {
            let k = d + 1 + i as u32;
            let direct = metrics::theoretical_pk(d, k).unwrap();
            assert!(p > 0.0 && (direct / p - 1.0).abs() < 1e-10, "d={d} k={k}");
        }
    }
    assert!((metrics::theoretical_pk(2, 3).unwrap() - 0.4).abs() < 1e-15);
}

#[test]
fn ks_of_normal_samples() {
    let mut rng = rng_from_seed(42);
    let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    assert!(stats::ks_statistic(&xs).unwrap() < 0.01);
    let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
    assert!(stats::ks_statistic(&shifted).unwrap() > 0.15);
    let u: Vec<f64> = (0..50_000).map(|_| rng.gen::<f64>()).collect();
    assert!(stats::ks_against(&u, |x| x.clamp(0.0, 1.0)).unwrap() < 0.01);
}
