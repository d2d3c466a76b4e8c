use apollonian_core::generator::{GraphState, Model, QSchedule};
use apollonian_core::rng::rng_from_seed;
use apollonian_core::theory::{self, CouponSampler};

/// Draws until every one of `k` symbols has appeared, counted by brute
/// force over all strings of length `t`.
fn collection_time_pmf(k: usize, t_max: usize) -> Vec<f64> {
    let mut pmf = vec![0.0; t_max + 1];
    for (t, slot) in pmf.iter_mut().enumerate().skip(1) {
        let total = k.pow(t as u32);
        let mut hits = 0usize;
        for idx in 0..total {
            let mut x = idx;
            let mut seen = 0u32;
            let mut done_at = 0;
            for step in 1..=t {
                seen |= 1 << (x % k);
                x /= k;
                if seen.count_ones() as usize == k {
                    done_at = step;
                    break;
                }
            }
            if done_at == t {
                hits += 1;
            }
        }
        *slot = hits as f64 / total as f64;
    }
    pmf
}

#[test]
fn coupon_law_matches_enumeration() {
    for (d, t_max) in [(2u32, 10usize), (3, 8)] {
        let brute = collection_time_pmf(d as usize + 1, t_max);
        let law = theory::coupon_pmf(d, t_max).unwrap();
        for (t, &p) in brute.iter().enumerate() {
            assert!((law.prob(t) - p).abs() < 1e-15, "d={d} t={t}");
        }
    }
}

#[test]
fn moments_agree_with_the_pmf() {
    for d in 2..=6u32 {
        let law = theory::coupon_pmf(d, 3000).unwrap();
        let mean: f64 = law.pmf.iter().enumerate().map(|(t, p)| t as f64 * p).sum();
        let second: f64 = law.pmf.iter().enumerate().map(|(t, p)| (t * t) as f64 * p).sum();
        assert!((mean - theory::mu(d)).abs() < 1e-10, "d={d}");
        assert!((second - mean * mean - theory::sigma2(d)).abs() < 1e-8, "d={d}");
        let harmonic: f64 = (1..=d + 1).map(|i| 1.0 / i as f64).sum();
        assert!((theory::mu(d) - (d + 1) as f64 * harmonic).abs() < 1e-12);
    }
}

#[test]
fn log_mgf_agrees_with_the_pmf() {
    for d in 2..=5u32 {
        let law = theory::coupon_pmf(d, 6000).unwrap();
        let b = theory::mgf_boundary(d);
        for frac in [-3.0, -0.5, 0.0, 0.3, 0.7, 0.9] {
            let l = frac * b;
            let direct: f64 = law.pmf.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(t, p)| (l * t as f64).exp() * p).sum();
            let got = theory::log_mgf(d, l).unwrap();
            assert!((got - direct.ln()).abs() < 1e-10, "d={d} lambda={l}: {got} vs {}", direct.ln());
        }
    }
}

/// Legendre transform by golden-section search on the concave map
/// `lambda -> lambda x - log_mgf(lambda)`.
fn legendre(d: u32, x: f64) -> f64 {
    let f = |l: f64| l * x - theory::log_mgf(d, l).unwrap();
    let (mut lo, mut hi) = (-60.0, theory::mgf_boundary(d) * (1.0 - 1e-13));
    // Coarse grid first, to bracket the maximiser.
    let grid: Vec<f64> = (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0).collect();
    let best = (0..grid.len()).max_by(|&a, &b| f(grid[a]).total_cmp(&f(grid[b]))).unwrap();
    lo = grid[best.saturating_sub(1)];
    hi = grid[(best + 1).min(grid.len() - 1)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    f(0.5 * (lo + hi))
}

#[test]
fn rate_function_is_the_legendre_transform() {
    for d in 2..=5u32 {
        let (k, mu) = (d as f64 + 1.0, theory::mu(d));
        for i in 0..20 {
            let x = k + 0.3 + (3.0 * mu - k) * i as f64 / 19.0;
            let want = legendre(d, x);
            let got = theory::rate_function(d, x).unwrap();
            assert!((got - want).abs() < 1e-8, "d={d} x={x}: {got} vs {want}");
            assert!(got >= -1e-15);
        }
        assert!(theory::rate_function(d, mu).unwrap().abs() < 1e-13);
    }
}

#[test]
fn rate_derivative_matches_finite_differences() {
    for d in 2..=5u32 {
        let mu = theory::mu(d);
        for x in [0.7 * mu, 0.9 * mu, 1.2 * mu, 2.0 * mu] {
            let h = 1e-5;
            let fd = (theory::rate_function(d, x + h).unwrap() - theory::rate_function(d, x - h).unwrap()) / (2.0 * h);
            let got = theory::rate_derivative(d, x).unwrap();
            assert!((got - fd).abs() < 1e-7 * (1.0 + got.abs()), "d={d} x={x}");
        }
    }
}

#[test]
fn rate_function_is_convex() {
    let d = 2;
    let mu = theory::mu(d);
    let xs: Vec<f64> = (0..60).map(|i| 3.2 + i as f64 * 0.2).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| theory::rate_function(d, x).unwrap()).collect();
    for w in vals.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] > -1e-12);
    }
    assert!(xs.iter().zip(&vals).all(|(&x, &v)| (v > 0.0) == ((x - mu).abs() > 1e-9)));
}

#[test]
fn depth_constant_solves_its_equation() {
    for d in 2..=6u32 {
        let c = theory::c_tilde(d);
        let r = (d as f64 + 1.0) / d as f64;
        // Independent form of f_d(c) = -1.
        let lhs = c - r - c * (d as f64 * c / (d as f64 + 1.0)).ln();
        assert!((lhs + 1.0).abs() < 1e-9, "d={d}");
        assert!(c > r);
    }
    assert!((theory::c_tilde(2) - 3.540393).abs() < 1e-6);
}

#[test]
fn diameter_solution_is_stationary_on_the_constraint() {
    for d in 2..=5u32 {
        let b = theory::solve_diameter(d).unwrap();
        let g = theory::diameter_constraint(d, b.alpha_tilde, b.beta_tilde).unwrap();
        assert!(g.abs() < 1e-9, "d={d}: constraint {g}");
        let (r1, r2) = theory::stationarity_residuals(&b).unwrap();
        assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8, "d={d}: {r1} {r2}");
        assert!(b.diam_const > b.flood_const);
    }
}

#[test]
fn hop_constants_at_d2() {
    let (mean, var) = theory::hop_clt_constants(2);
    assert_eq!(mean, 6.0 / 11.0);
    // 2 (sigma^2 + mu) / mu^3 * 3/2 with mu = 11/2, sigma^2 = 27/4.
    assert!((var - 2.0 * (6.75 + 5.5) / 5.5f64.powi(3) * 1.5).abs() < 1e-15);
}

#[test]
fn generation_law_sampler_matches_moments() {
    let mut rng = rng_from_seed(11);
    let (d, m, n) = (2u32, 5000u64, 4000usize);
    let xs: Vec<f64> = (0..n).map(|_| theory::sample_gm(d, m, &mut rng) as f64).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let (em, ev) = theory::gm_moments(d, m);
    assert!((mean - em).abs() < 5.0 * (ev / n as f64).sqrt(), "{mean} vs {em}");
    assert!((var / ev - 1.0).abs() < 0.1);
}

#[test]
fn coupon_sampler_has_the_right_mean() {
    let mut rng = rng_from_seed(5);
    for d in [2u32, 4] {
        let s = CouponSampler::new(d).unwrap();
        let n = 200_000;
        let mean = (0..n).map(|_| s.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        let se = (theory::sigma2(d) / n as f64).sqrt();
        assert!((mean - theory::mu(d)).abs() < 5.0 * se, "d={d}");
    }
}

#[test]
fn uniform_clique_generation_in_evolving_networks_is_size_biased() {
    // Four full steps first, so that later splits act on hundreds of
    // cliques and the law of large numbers applies.
    let (d, q) = (2u8, 0.2);
    let mut values = vec![1.0; 4];
    values.extend([q; 10]);
    let steps = values.len() as u32;
    let schedule = QSchedule::Custom { values };
    let mut rng = rng_from_seed(77);
    let reps = 400;
    let mut total = 0.0;
    for _ in 0..reps {
        let mut g = GraphState::new(d, Model::Ean).unwrap();
        g.grow(steps, Some(&schedule), &mut rng).unwrap();
        // Average over every active clique of the graph.
        let n = g.active_count();
        total += (0..n).map(|i| g.clique_generation(i) as f64).sum::<f64>() / n as f64;
    }
    let mean = total / reps as f64;
    let want = theory::ean_clique_generation(d as u32, &schedule, steps as u64).unwrap();
    // Clique generations start at 1 for the initial cliques.
    assert!((mean - 1.0 - want).abs() < 0.02 * want, "{mean} vs 1 + {want}");
    // The unbiased count would be 4 + 10 q.
    assert!(mean - 1.0 > 4.0 + 10.0 * q + 2.0);
}
