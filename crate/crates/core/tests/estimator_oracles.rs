use dimlab::estimators::danco::danco_norm_mle;
use dimlab::estimators::spectrum::{capca_select_q, local_cov_spectrum};
use dimlab::estimators::twonn::twonn_from_ratios;
use dimlab::estimators::{estimate, DensityForm, EstimatorConfig, Method};
use dimlab::geometry::{embed_linear, lookup, sample_manifold, SampleConfig};
use dimlab::neighbors::{knn_all, NeighborSet};
use dimlab::numerics::{EigenSpectrum, RngStream};
use dimlab::PointCloud;
use proptest::prelude::*;

fn brute_neighbors(cloud: &PointCloud, i: usize, k: usize) -> Vec<(f64, usize)> {
    let mut all: Vec<(f64, usize)> = (0..cloud.n())
        .filter(|&j| j != i)
        .map(|j| {
            let s: f64 = cloud.row(i).iter().zip(cloud.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            (s.sqrt(), j)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn sphere(d: usize, n: usize, seed: u64) -> PointCloud {
    sample_manifold(&dimlab::ManifoldSpec::sphere(d, 1.0, 2 * d), &SampleConfig::uniform(n, seed)).unwrap()
}

#[test]
fn mle_and_mada_match_direct_formulas() {
    let cloud = sphere(3, 300, 1);
    let k = 20;
    let mut mle = Vec::new();
    let mut mada = Vec::new();
    for i in 0..cloud.n() {
        let nb = brute_neighbors(&cloud, i, k);
        let big = nb[k - 1].0;
        let s = compensated_sum(nb.iter().map(|(r, _)| (big / r).ln()));
        mle.push(k as f64 / s);
        let inner = nb[k.div_ceil(2) - 1].0;
        mada.push(2f64.ln() / (big / inner).ln());
    }
    let mean = |v: &[f64]| compensated_sum(v.iter().copied()) / v.len() as f64;
    let got = estimate(&cloud, &EstimatorConfig::new(Method::Mle).with_k(k)).unwrap().d_hat;
    assert!((got - mean(&mle)).abs() < 1e-12 * got, "{got} vs {}", mean(&mle));
    let got = estimate(&cloud, &EstimatorConfig::new(Method::Mada).with_k(k)).unwrap().d_hat;
    assert!((got - mean(&mada)).abs() < 1e-12 * got);
}

/// Printed pair radius `(R / D)(sqrt(t^2 + V^2 D) - t)`, boundary form
/// `R V^2 / (2t)` when `D = 0`.
fn printed_radius(x: &[f64], v: &[f64], w: &[f64], big_r: f64) -> Option<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>();
    let xv = sub(x, v);
    let d = big_r * big_r - dot(&xv, &xv);
    let wv = sub(w, v);
    let t = dot(&xv, &wv);
    let v2 = dot(&wv, &wv);
    let r = if d.abs() < 1e-14 {
        (t > 0.0).then(|| big_r * v2 / (2.0 * t))?
    } else {
        (big_r / d) * ((t * t + v2 * d).sqrt() - t)
    };
    (r > 0.0).then_some(r)
}

#[test]
fn tle_two_neighbour_fixture() {
    // x at the origin with neighbours at distance 1 and 2
    let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.2, 1.6]];
    let cloud = PointCloud::from_rows(&pts).unwrap();
    let big_r = 2.0;
    let x = &pts[0];
    let mut logs = Vec::new();
    for (a, b) in [(1, 2), (2, 1)] {
        let v = &pts[a];
        let reflected: Vec<f64> = v.iter().zip(x).map(|(vi, xi)| 2.0 * xi - vi).collect();
        for vv in [v.clone(), reflected] {
            if let Some(r) = printed_radius(x, &vv, &pts[b], big_r) {
                logs.push((r / big_r).ln());
            }
        }
    }
    let want = -(logs.len() as f64) / logs.iter().sum::<f64>();
    let report = estimate(&cloud, &EstimatorConfig::new(Method::Tle).with_k(2)).unwrap();
    let got = report.locals.as_ref().unwrap()[0];
    assert!((got - want).abs() < 1e-12, "{got} vs {want} from {logs:?}");
}

#[test]
fn tle_matches_printed_form_on_sphere() {
    let cloud = sphere(2, 120, 4);
    let k = 8;
    let report = estimate(&cloud, &EstimatorConfig::new(Method::Tle).with_k(k)).unwrap();
    let locals = report.locals.unwrap();
    for i in [0, 17, 63] {
        let nb = brute_neighbors(&cloud, i, k);
        let big_r = nb[k - 1].0;
        let x = cloud.row(i);
        let mut logs = Vec::new();
        for (a, _) in nb.iter().enumerate() {
            let v = cloud.row(nb[a].1);
            let reflected: Vec<f64> = v.iter().zip(x).map(|(vi, xi)| 2.0 * xi - vi).collect();
            for (b, _) in nb.iter().enumerate() {
                if a == b {
                    continue;
                }
                for vv in [v, reflected.as_slice()] {
                    if let Some(r) = printed_radius(x, vv, cloud.row(nb[b].1), big_r) {
                        logs.push((r / big_r).ln());
                    }
                }
            }
        }
        let want = -(logs.len() as f64) / logs.iter().sum::<f64>();
        assert!((locals[i] - want).abs() < 1e-9 * want, "point {i}: {} vs {want}", locals[i]);
    }
}

fn objective(values: &[f64], r: f64, q: usize) -> f64 {
    let (qf, r2) = (q as f64, r * r);
    let tail: f64 = values[q..].iter().sum();
    let mut fit = 0.0;
    for l in &values[..q] {
        let corrected = (l + (3.0 * qf + 4.0) / (qf * (qf + 4.0)) * tail) / r2;
        fit += (1.0 / (qf + 2.0) - corrected).powi(2);
    }
    fit.sqrt() + 2.0 * tail / r2
}

#[test]
fn ca_pca_selection_is_exhaustive_minimum() {
    let mut s = RngStream::new(12, 0);
    for _ in 0..200 {
        let p = 2 + s.index(12);
        let mut values: Vec<f64> = (0..p).map(|_| s.uniform().powi(3)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        let r = 0.5 + 2.0 * s.uniform();
        let objs: Vec<f64> = (1..=p).map(|q| objective(&values, r, q)).collect();
        let min = objs.iter().copied().fold(f64::INFINITY, f64::min);
        let got = capca_select_q(&EigenSpectrum::from_values(values.clone()), r, p).unwrap();
        assert!(objs[got - 1] <= min + 1e-12 * min.abs().max(1.0));
    }
}

#[test]
fn local_pca_on_flat_pieces() {
    // a 3-flat in R^7 gives exactly 3 for every neighbourhood
    let mut s = RngStream::new(2, 0);
    let flat: Vec<f64> = (0..200 * 3).map(|_| s.uniform()).collect();
    let cloud = embed_linear(&flat, 3, 7, 5).unwrap();
    let r = estimate(&cloud, &EstimatorConfig::new(Method::LocalPca).with_k(30)).unwrap();
    assert_eq!(r.d_hat, 3.0);
    // CA-PCA matches ball-shaped neighbourhoods; cube corners may read as 2
    let r = estimate(&cloud, &EstimatorConfig::new(Method::CaPca).with_k(30)).unwrap();
    assert!((r.d_hat - 3.0).abs() < 0.1, "{}", r.d_hat);
    let nbrs = knn_all(&cloud, 30).unwrap();
    let spec = local_cov_spectrum(&nbrs[0], &cloud).unwrap();
    assert!(spec.values[3..].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn danco_norm_mle_recovers_sampled_dimension() {
    // r^d ~ Beta(1, K) under the corrected density
    let (d, k) = (5.0, 10usize);
    let mut s = RngStream::new(77, 0);
    let ratios: Vec<f64> = (0..10_000)
        .map(|_| {
            let u = 1.0 - (1.0 - s.uniform()).powf(1.0 / k as f64);
            u.powf(1.0 / d)
        })
        .collect();
    assert_eq!(danco_norm_mle(&ratios, k, 30, DensityForm::Corrected).unwrap(), 5);
}

#[test]
fn twonn_recovers_pareto_dimension() {
    let d = 4.0;
    let mut s = RngStream::new(5, 0);
    let ratios: Vec<f64> = (0..10_000).map(|_| s.uniform_open().powf(-1.0 / d)).collect();
    let got = twonn_from_ratios(&ratios).unwrap();
    assert!((got - d).abs() < 0.15, "{got}");
}

#[test]
fn tuned_estimate_matches_manual_grid() {
    use dimlab::tuning::{default_grid, tuned_estimate};
    let cloud = sample_manifold(&lookup("M7").unwrap(), &SampleConfig::uniform(400, 2)).unwrap();
    for m in [Method::Mle, Method::LocalPca, Method::Wasserstein] {
        let base = EstimatorConfig::new(m).with_seed(3);
        let grid = default_grid(m, cloud.n()).unwrap();
        let est: Vec<f64> = grid
            .iter()
            .map(|&v| {
                let cfg = if m == Method::Wasserstein { base.with_alpha(v) } else { base.with_k(v as usize) };
                estimate(&cloud, &cfg).unwrap().d_hat
            })
            .collect();
        // window rule with sample standard deviations (same ratio test)
        let sd = |w: &[f64]| {
            let mu = w.iter().sum::<f64>() / w.len() as f64;
            (w.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (w.len() - 1) as f64).sqrt()
        };
        let sds: Vec<f64> = est.windows(3).map(sd).collect();
        let smin = sds.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = sds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first_min = sds.iter().position(|&x| x == smin).unwrap();
        let sel = if smax > 1.25 * smin { &est[first_min..first_min + 3] } else { &est[..] };
        let want = sel.iter().sum::<f64>() / sel.len() as f64;
        let t = tuned_estimate(&cloud, &base, None).unwrap();
        assert_eq!(t.grid.as_ref().unwrap().estimates, est, "{m}");
        assert!((t.d_hat() - want).abs() < 1e-12, "{m}: {} vs {want}", t.d_hat());
    }
}

#[test]
fn danco_is_embedding_and_scale_invariant() {
    let cloud = sphere(3, 300, 9);
    let cfg = EstimatorConfig::new(Method::Danco).with_seed(4);
    let base = estimate(&cloud, &cfg).unwrap().d_hat;
    let wide = embed_linear(cloud.data(), cloud.p(), 15, 2).unwrap();
    assert_eq!(estimate(&wide, &cfg).unwrap().d_hat, base);
    assert_eq!(estimate(&cloud.scaled(37.5), &cfg).unwrap().d_hat, base);
}

fn shuffled(cloud: &PointCloud, seed: u64) -> PointCloud {
    let mut idx: Vec<usize> = (0..cloud.n()).collect();
    RngStream::new(seed, 9).shuffle(&mut idx);
    cloud.subset(&idx).unwrap()
}

const CHEAP: [Method; 6] = [Method::LocalPca, Method::Mada, Method::Mle, Method::Tle, Method::Twonn, Method::CaPca];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scale_invariance(seed in 0u64..1000, c in prop::sample::select(vec![0.001, 0.5, 3.7, 100.0])) {
        let cloud = sphere(2, 150, seed);
        let scaled = cloud.scaled(c);
        for m in CHEAP {
            let cfg = EstimatorConfig::new(m).with_k(10);
            let a = estimate(&cloud, &cfg).unwrap().d_hat;
            let b = estimate(&scaled, &cfg).unwrap().d_hat;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs(), "{} {} vs {}", m, a, b);
        }
        let cfg = EstimatorConfig::new(Method::Wasserstein).with_alpha(2.0).with_seed(seed);
        let a = estimate(&cloud, &cfg).unwrap().d_hat;
        let b = estimate(&scaled, &cfg).unwrap().d_hat;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs());
    }

    #[test]
    fn embedding_invariance(seed in 0u64..1000, p in 5usize..30) {
        let cloud = sphere(2, 120, seed);
        let wide = embed_linear(cloud.data(), cloud.p(), p, seed + 1).unwrap();
        for m in Method::ALL {
            if m == Method::Danco { continue; }
            let cfg = EstimatorConfig::new(m).with_k(10).with_alpha(2.0).with_seed(seed);
            let a = estimate(&cloud, &cfg).unwrap().d_hat;
            let b = estimate(&wide, &cfg).unwrap().d_hat;
            prop_assert!((a - b).abs() <= 1e-9 * a.abs(), "{} {} vs {}", m, a, b);
        }
    }

    #[test]
    fn row_order_invariance(seed in 0u64..1000) {
        let cloud = sphere(3, 120, seed);
        let perm = shuffled(&cloud, seed);
        for m in CHEAP {
            let cfg = EstimatorConfig::new(m).with_k(12);
            let a = estimate(&cloud, &cfg).unwrap().d_hat;
            let b = estimate(&perm, &cfg).unwrap().d_hat;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs(), "{} {} vs {}", m, a, b);
        }
    }

    #[test]
    fn locals_average_to_estimate(seed in 0u64..1000, k in 3usize..25) {
        let cloud = sphere(2, 100, seed);
        for m in [Method::LocalPca, Method::Mada, Method::Mle, Method::Tle, Method::CaPca] {
            let r = estimate(&cloud, &EstimatorConfig::new(m).with_k(k)).unwrap();
            let kept = r.retained_locals();
            let mean = kept.iter().sum::<f64>() / kept.len() as f64;
            prop_assert!((mean - r.d_hat).abs() <= 1e-12 * r.d_hat);
            prop_assert_eq!(kept.len() + r.diagnostics.dropped_locals, cloud.n());
        }
    }

    #[test]
    fn twonn_on_a_random_line(seed in 0u64..1000, n in 50usize..400) {
        let mut s = RngStream::new(seed, 3);
        let dir = [0.3, -0.4, 1.2];
        let data: Vec<f64> = (0..n).flat_map(|_| { let t = s.uniform_range(-5.0, 5.0); dir.map(|c| c * t) }).collect();
        let cloud = PointCloud::new(n, 3, data).unwrap();
        let d = estimate(&cloud, &EstimatorConfig::new(Method::Twonn)).unwrap().d_hat;
        prop_assert!((0.6..=1.5).contains(&d), "{}", d);
    }
}

#[test]
fn neighbor_sets_longer_than_k_are_truncated() {
    use dimlab::estimators::estimate_with_neighbors;
    let cloud = sphere(2, 80, 0);
    let long: Vec<NeighborSet> = knn_all(&cloud, 30).unwrap();
    for m in CHEAP {
        let cfg = EstimatorConfig::new(m).with_k(10);
        let a = estimate(&cloud, &cfg).unwrap().d_hat;
        let b = estimate_with_neighbors(&cloud, &long, &cfg).unwrap().d_hat;
        assert_eq!(a, b, "{m}");
    }
}

#[test]
fn ca_pca_ignores_zero_variance_directions() {
    // small neighbourhoods on a 2-sphere: zero directions from the embedding
    // must not move the argmin towards q = p
    let cloud = sample_manifold(&dimlab::ManifoldSpec::sphere(2, 1.0, 4), &SampleConfig::uniform(120, 44)).unwrap();
    let cfg = EstimatorConfig::new(Method::CaPca).with_k(10);
    let base = estimate(&cloud, &cfg).unwrap().locals.unwrap();
    for p in [5, 13, 40] {
        let wide = embed_linear(cloud.data(), 4, p, 45).unwrap();
        assert_eq!(estimate(&wide, &cfg).unwrap().locals.unwrap(), base, "p={p}");
    }
    assert!(base.iter().all(|&q| q <= 4.0));
}
