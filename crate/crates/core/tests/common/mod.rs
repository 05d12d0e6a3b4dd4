//! Random instance builders and invariant checks shared by the property
//! tests and the acceptance harness. Every check returns `Err(description)`
//! instead of panicking so the harness can count failures.

#![allow(dead_code)]

use dsad_core::evaluation::{auc, double_center, mds_embed};
use dsad_core::synth::{generate_synthetic, Generator, Segment, SyntheticSpec};
use dsad_core::{
    build_trajectory_matrix, canonical_angles, detect, detect_baseline, difference_subspace,
    difference_subspace_analytic, magnitude, signal_subspace, ssa_theta_score, subspace_dissimilarity,
    train, window_pair, DetectorConfig, Lag, RankRule, Span, Subspace, TimeSeries,
};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Orthonormal basis of a random `k`-dimensional subspace of `R^n`.
pub fn random_basis(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, n, k).qr().q().columns(0, k).into_owned()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    random_basis(rng, n, n)
}

/// Two subspaces of dims `p` and `q` in `R^n` sharing exactly `shared`
/// directions (plus whatever random coincidences occur, which is none
/// almost surely when `p + q ≤ n`).
pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize, shared: usize) -> (Subspace, Subspace) {
    assert!(shared <= p.min(q) && p + q - shared <= n);
    let frame = random_basis(rng, n, p + q - shared);
    let common = frame.columns(0, shared);
    let own_p = frame.columns(shared, p - shared);
    // mix q's private part with random directions of the whole frame so the
    // non-shared angles are generic rather than all 90°
    let mix = gaussian_matrix(rng, p + q - shared, q - shared);
    let own_q = &frame * mix;
    let bp = DMatrix::from_columns(
        &common.column_iter().chain(own_p.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
    );
    let mut cols: Vec<DVector<f64>> = common.column_iter().map(|c| c.into_owned()).collect();
    cols.extend(own_q.column_iter().map(|c| c.into_owned()));
    let bq = DMatrix::from_columns(&cols);
    (
        Subspace::from_spanning(bp).expect("independent columns"),
        Subspace::from_spanning(bq).expect("independent columns"),
    )
}

/// Sine of the largest principal angle between two equal-dimension spans,
/// computed as the spectral norm of the projector difference.
pub fn max_angle_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.ncols(), b.ncols());
    if a.ncols() == 0 {
        return 0.0;
    }
    let diff = a * a.transpose() - b * b.transpose();
    SymmetricEigen::new(diff).eigenvalues.amax()
}

/// Cosines of the canonical angles from an eigensolve of `(AᵀB)(AᵀB)ᵀ`.
pub fn oracle_cosines(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let (a, b) = if a.ncols() <= b.ncols() { (a, b) } else { (b, a) };
    let c = a.transpose() * b;
    let mut v: Vec<f64> = SymmetricEigen::new(&c * c.transpose())
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt().min(1.0))
        .collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Geometric and analytic difference subspaces agree, and the eigenvalues
/// of `G` pair up as `1 ± cos θᵢ`.
pub fn check_ds_constructions(p: &Subspace, q: &Subspace, delta: f64) -> Check {
    let geo = difference_subspace(p, q, delta).map_err(|e| e.to_string())?;
    let ana = difference_subspace_analytic(p, q, delta).map_err(|e| e.to_string())?;
    ensure(geo.dim() == ana.dim(), || format!("DS dims {} vs {}", geo.dim(), ana.dim()))?;
    let s = max_angle_sine(geo.basis(), ana.basis());
    ensure(s <= 1e-6, || format!("largest angle between constructions has sine {s:e}"))?;
    ensure(close(geo.g_eigenvalues(), ana.g_eigenvalues(), 1e-8), || {
        format!("g eigenvalues {:?} vs {:?}", geo.g_eigenvalues(), ana.g_eigenvalues())
    })?;

    let n = p.ambient_dim();
    let cos = canonical_angles(p, q).map_err(|e| e.to_string())?.cosines;
    let mut expected: Vec<f64> = cos.iter().flat_map(|c| [1.0 + c, 1.0 - c]).collect();
    expected.extend(std::iter::repeat_n(1.0, p.dim().abs_diff(q.dim())));
    expected.extend(std::iter::repeat_n(0.0, n - p.dim() - q.dim()));
    expected.sort_by(f64::total_cmp);
    let g = p.basis() * p.basis().transpose() + q.basis() * q.basis().transpose();
    let mut actual: Vec<f64> = SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    actual.sort_by(f64::total_cmp);
    ensure(close(&expected, &actual, 1e-8), || format!("G eigenvalues {actual:?}, expected {expected:?}"))
}

/// Symmetry, rotation invariance and basis invariance of the angle-based quantities.
pub fn check_angle_invariances(rng: &mut ChaCha8Rng, p: &Subspace, q: &Subspace) -> Check {
    let n = p.ambient_dim();
    let err = |e: dsad_core::Error| e.to_string();
    let pq = canonical_angles(p, q).map_err(err)?.cosines;
    let qp = canonical_angles(q, p).map_err(err)?.cosines;
    ensure(close(&pq, &qp, 1e-10), || format!("asymmetric cosines {pq:?} vs {qp:?}"))?;
    ensure(close(&pq, &oracle_cosines(p.basis(), q.basis()), 1e-8), || "cosines disagree with eigen oracle".into())?;

    let t = random_orthogonal(rng, n);
    let tp = &t * p.basis();
    let tq = &t * q.basis();
    let rot = canonical_angles(&tp, &tq).map_err(err)?.cosines;
    ensure(close(&pq, &rot, 1e-8), || format!("rotation changed cosines {pq:?} -> {rot:?}"))?;

    let p2 = p.basis() * random_orthogonal(rng, p.dim());
    let q2 = q.basis() * random_orthogonal(rng, q.dim());
    let re = canonical_angles(&p2, &q2).map_err(err)?.cosines;
    ensure(close(&pq, &re, 1e-8), || "basis change altered cosines".into())?;
    let d1 = difference_subspace(p, q, 1e-6).map_err(err)?;
    let d2 = difference_subspace(&p2, &q2, 1e-6).map_err(err)?;
    ensure(d1.dim() == d2.dim(), || "basis change altered DS dimension".into())?;
    let s = max_angle_sine(d1.basis(), d2.basis());
    ensure(s <= 1e-8, || format!("basis change moved the DS span (sine {s:e})"))?;
    let (m1, m2) = (magnitude(p, q).map_err(err)?, magnitude(&p2, &q2).map_err(err)?);
    ensure((m1 - m2).abs() <= 1e-8, || format!("magnitude {m1} vs {m2}"))?;
    let (e1, e2) = (
        subspace_dissimilarity(p, q, 3).map_err(err)?,
        subspace_dissimilarity(&p2, &q2, 3).map_err(err)?,
    );
    ensure((e1 - e2).abs() <= 1e-8, || format!("dissimilarity {e1} vs {e2}"))
}

/// Subspaces `span(e_1..e_k)` and `span(cos θᵢ e_i + sin θᵢ e_{k+i})` with
/// prescribed canonical cosines.
pub fn prescribed_pair(cosines: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let k = cosines.len();
    let n = 2 * k;
    let p = DMatrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 });
    let q = DMatrix::from_fn(n, k, |i, j| {
        let c = cosines[j];
        if i == j {
            c
        } else if i == k + j {
            (1.0 - c * c).max(0.0).sqrt()
        } else {
            0.0
        }
    });
    (p, q)
}

/// Direction dissimilarity stays in `[0, 1]`, matches the mean of
/// `1 − cos` over the `c` largest cosines, and does not decrease when one
/// cosine shrinks; the magnitude index is never positive.
pub fn check_dissimilarity_and_magnitude(cosines: &[f64], c: usize, shrink_at: usize, factor: f64) -> Check {
    let err = |e: dsad_core::Error| e.to_string();
    let (p, q) = prescribed_pair(cosines);
    let d = subspace_dissimilarity(&p, &q, c).map_err(err)?;
    ensure((0.0..=1.0).contains(&d), || format!("dissimilarity {d} outside [0, 1]"))?;
    let mut sorted = cosines.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let used = c.min(sorted.len());
    let oracle = sorted[..used].iter().map(|x| 1.0 - x).sum::<f64>() / used as f64;
    ensure((d - oracle).abs() <= 1e-10, || format!("dissimilarity {d}, oracle {oracle}"))?;

    let mut smaller = cosines.to_vec();
    smaller[shrink_at] *= factor;
    let (ps, qs) = prescribed_pair(&smaller);
    let d2 = subspace_dissimilarity(&ps, &qs, c).map_err(err)?;
    ensure(d2 >= d - 1e-12, || format!("shrinking a cosine lowered dissimilarity {d} -> {d2}"))?;

    let mu = magnitude(&p, &q).map_err(err)?;
    ensure(mu <= 0.0, || format!("magnitude {mu} > 0"))?;
    let mu_self = magnitude(&p, &p).map_err(err)?;
    ensure(mu_self.abs() <= 1e-12, || format!("magnitude of identical subspaces {mu_self}"))
}

/// Hankel structure, orthonormal bases, reconstruction at full rank,
/// spectrum against an eigen oracle of `H·Hᵀ`, and determinism.
pub fn check_trajectory_and_subspace(series: &TimeSeries, t: usize, w: usize, m: usize) -> Check {
    let err = |e: dsad_core::Error| e.to_string();
    let h = build_trajectory_matrix(series, t, w, m).map_err(err)?;
    let e = h.entries();
    for i in 0..w {
        for j in 0..m {
            let expected = series.samples()[t + 1 + i + j - w - m];
            ensure(e[(i, j)] == expected, || format!("H[{i},{j}] = {} ≠ sample {expected}", e[(i, j)]))?;
            if i + 1 < w && j > 0 {
                ensure(e[(i + 1, j - 1)] == e[(i, j)], || format!("anti-diagonal broken at ({i},{j})"))?;
            }
        }
    }
    let full = w.min(m);
    let sub = signal_subspace(&h, RankRule::Fixed(full)).map_err(err)?;
    let orth = dsad_core::linalg::orthonormality_error(sub.basis());
    ensure(orth <= 1e-10, || format!("orthonormality error {orth:e}"))?;
    let recon = sub.basis() * sub.basis().transpose() * e - e;
    ensure(recon.norm() <= 1e-8 * e.norm(), || format!("reconstruction error {:e}", recon.norm()))?;

    let mut oracle: Vec<f64> = SymmetricEigen::new(e * e.transpose()).eigenvalues.iter().copied().collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    let top = oracle[0].max(f64::MIN_POSITIVE);
    for (i, (s, o)) in sub.spectrum().iter().zip(&oracle).enumerate() {
        ensure((s - o).abs() <= 1e-8 * top, || format!("spectrum[{i}] = {s}, oracle {o}"))?;
    }
    let again = signal_subspace(&h, RankRule::Fixed(full)).map_err(err)?;
    ensure(again == sub, || "repeated signal_subspace differs".into())?;
    let energy = signal_subspace(&h, RankRule::Energy(0.95)).map_err(err)?;
    let total: f64 = oracle.iter().map(|x| x.max(0.0)).sum();
    let mut acc = 0.0;
    let mut want = 0;
    for (i, x) in oracle.iter().enumerate() {
        acc += x.max(0.0);
        if acc >= 0.95 * total {
            want = i + 1;
            break;
        }
    }
    // a cumulative share landing within rounding of 0.95 may flip by one
    ensure(energy.dim().abs_diff(want) <= usize::from((acc / total - 0.95).abs() < 1e-9), || {
        format!("energy rank {} vs oracle {want}", energy.dim())
    })
}

pub fn noise_series(seed: u64, len: usize) -> TimeSeries {
    generate_synthetic(&SyntheticSpec {
        segments: vec![Segment {
            generator: Generator::Noise { sigma: 1.0 },
            length: len,
        }],
        seed,
        label_half_width: 0,
    })
    .unwrap()
}

pub fn small_config(w: usize, m: usize, tau: usize, r: usize) -> DetectorConfig {
    DetectorConfig {
        window_width: w,
        window_count: m,
        lag: Lag::Tau(tau),
        signal_rank: RankRule::Fixed(r),
        reference_dims: 2 * r,
        angle_count: 3,
        ..DetectorConfig::default()
    }
}

/// Nonnegative degrees, exact `t − t_c` alignment, determinism, the
/// minimum-angle baseline identity, and bit-identical degrees under a
/// power-of-two amplitude scale.
pub fn check_scores(train_series: &TimeSeries, test_series: &TimeSeries, config: &DetectorConfig) -> Check {
    let err = |e: dsad_core::Error| e.to_string();
    let model = train(train_series, config).map_err(err)?;
    let scores = detect(test_series, &model).map_err(err)?;
    let positions = config.positions(test_series.len()).map_err(err)?;
    let t_c = (config.window_width + config.window_count + config.tau().map_err(err)? + 1) / 2;
    ensure(scores.len() == positions.len(), || "one score per position".into())?;
    for (p, &t) in scores.points.iter().zip(&positions) {
        ensure(p.degree >= 0.0, || format!("negative degree {} at t = {t}", p.degree))?;
        ensure(p.time_index == t - t_c, || format!("time index {} for t = {t}", p.time_index))?;
    }
    ensure(model.training_degrees.iter().all(|&d| d >= 0.0), || "negative training degree".into())?;
    let again = detect(test_series, &train(train_series, config).map_err(err)?).map_err(err)?;
    ensure(again == scores, || "repeated train/detect differs".into())?;

    let base = detect_baseline(test_series, config, 1).map_err(err)?;
    for (p, &t) in base.points.iter().zip(&positions) {
        let (past, present) = window_pair(test_series, t, config).map_err(err)?;
        let largest = oracle_cosines(past.basis(), present.basis())[0];
        ensure((p.degree - (1.0 - largest)).abs() <= 1e-12, || {
            format!("baseline {} vs 1 − largest cosine {}", p.degree, 1.0 - largest)
        })?;
        let direct = ssa_theta_score(&past, &present, 1).map_err(err)?;
        ensure(direct == p.degree, || "baseline differs from ssa_theta_score".into())?;
    }

    let scaled_model = train(&train_series.scaled(4.0).map_err(err)?, config).map_err(err)?;
    let scaled = detect(&test_series.scaled(4.0).map_err(err)?, &scaled_model).map_err(err)?;
    ensure(scaled == scores, || "scaling by 4 changed the degrees".into())
}

/// AUC equals the quadratic pairwise count.
pub fn brute_force_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut twice, mut pairs) = (0u64, 0u64);
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1;
            twice += if si > sj { 2 } else if si == sj { 1 } else { 0 };
        }
    }
    twice as f64 / (2 * pairs) as f64
}

/// Integer-valued scores (plenty of ties) with both classes present.
pub fn random_scored_labels(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<u8>) {
    let levels = rng.random_range(2..=20);
    let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
    let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    labels[0] = 0;
    labels[n - 1] = 1;
    (scores, labels)
}

pub fn check_auc(scores: &[f64], labels: &[u8]) -> Check {
    let err = |e: dsad_core::Error| e.to_string();
    let a = auc(scores, labels).map_err(err)?;
    let b = brute_force_auc(scores, labels);
    ensure(a == b, || format!("auc {a} vs brute force {b}"))?;
    let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
    let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 1.0).collect();
    ensure(auc(&exp, labels).map_err(err)? == a, || "exp changed AUC".into())?;
    ensure(auc(&affine, labels).map_err(err)? == a, || "affine map changed AUC".into())?;
    let flipped: Vec<u8> = labels.iter().map(|l| 1 - l).collect();
    let c = auc(scores, &flipped).map_err(err)?;
    ensure((c - (1.0 - a)).abs() <= 1e-12, || format!("complement AUC {c} vs 1 − {a}"))
}

/// Double centering zeroes row/column sums and MDS recovers a 3-D
/// configuration from its exact distances.
pub fn check_mds(points: &DMatrix<f64>) -> Check {
    let err = |e: dsad_core::Error| e.to_string();
    let n = points.nrows();
    let dist = DMatrix::from_fn(n, n, |i, j| (points.row(i) - points.row(j)).norm());
    let b = double_center(&dist);
    for i in 0..n {
        let (r, c) = (b.row(i).sum(), b.column(i).sum());
        ensure(r.abs() <= 1e-10 && c.abs() <= 1e-10, || format!("row/col {i} sums {r:e}, {c:e}"))?;
    }
    let emb = mds_embed(&dist, 3).map_err(err)?;
    ensure(emb.missing_dims == 0, || "missing dimensions for a 3-D configuration".into())?;
    let x = &emb.coordinates;
    for i in 0..n {
        for j in 0..n {
            let d = (x.row(i) - x.row(j)).norm();
            ensure((d - dist[(i, j)]).abs() <= 1e-8, || format!("distance ({i},{j}) {d} vs {}", dist[(i, j)]))?;
        }
    }
    ensure(emb.stress <= 1e-10, || format!("stress {}", emb.stress))
}

/// Spectral peak of the first regime, in cycles per sample.
pub const BENCH_F0: f64 = 1.0 / 32.0;
pub const BENCH_CHANGE: usize = 2000;

/// 2000 samples of AR(2) resonating at `BENCH_F0`, then 1000 samples of a
/// clean sine at twice that frequency; labels cover `w + M = 128` samples
/// either side of the change.
pub fn benchmark_spec(seed: u64) -> SyntheticSpec {
    let radius: f64 = 0.95;
    SyntheticSpec {
        segments: vec![
            Segment {
                generator: Generator::Ar2 {
                    a1: 2.0 * radius * (2.0 * std::f64::consts::PI * BENCH_F0).cos(),
                    a2: -radius * radius,
                    sigma: 1.0,
                },
                length: BENCH_CHANGE,
            },
            Segment {
                generator: Generator::Sine {
                    freq: 2.0 * BENCH_F0,
                    amp: 16.0,
                    phase: 0.0,
                    sigma: 0.0,
                },
                length: 1000,
            },
        ],
        seed,
        label_half_width: 128,
    }
}

/// Detector settings for the benchmark at `w = M = 64`.
pub fn benchmark_params(rank: usize) -> dsad_core::evaluation::ExperimentParams {
    let mut params = dsad_core::evaluation::ExperimentParams::default();
    params.detector.signal_rank = RankRule::Fixed(rank);
    params.detector.lag = Lag::Overlap(0.1);
    params.detector.reference_dims = 8;
    params
}
