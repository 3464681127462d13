//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them). Tolerances
//! are pinned here, not computed.

mod common;

use common::{brute_force_local_series, random_real_value, random_unit_disc_value};
use euler_zeta::approx_analyzer::{
    almost_period_search, gap, q_profile, shifted_pair_search, GapKind,
};
use euler_zeta::classifier::{
    classify, classify_degree2, reduce_integer_dependent, scan_coefficients, ScanOutcome,
    Verdict, Witness,
};
use euler_zeta::evaluator::{
    eval_product, truncation_tail_bound, EvalPoint, SpecEvaluator,
};
use euler_zeta::levy::{build_quasi_levy, reconstruction_gap, total_variation};
use euler_zeta::number_kernel::{
    dirichlet_coefficients, local_coefficients, power_sum, primes_up_to, LocalValues,
    PowerSumValue,
};
use euler_zeta::rng::SplitMix64;
use euler_zeta::sampler::{build_pmf, draw, empirical_cf};
use euler_zeta::spec_model::{
    builtin_names, builtin_spec, CoefficientRule, DependenceMode, Direction, EulerProductSpec,
    NumberLiteral,
};
use euler_zeta::value::ComplexRational;
use euler_zeta::TruncationBounds;
use std::time::Instant;

fn bounds(p: u64, r: u32, n: u64) -> TruncationBounds {
    TruncationBounds::new(p, r, n).unwrap()
}

/// Builtin in its classifiable form (integer-dependent specs reduced).
fn reduced_builtin(name: &str) -> EulerProductSpec {
    let spec = builtin_spec(name).unwrap();
    if matches!(spec.mode, DependenceMode::IntegerDependent { .. }) {
        reduce_integer_dependent(&spec).unwrap()
    } else {
        spec
    }
}

#[test]
fn c01_scaled_gap_headline_constant() {
    // single-threaded by contract for the runtime bound
    std::env::set_var("EULER_ZETA_THREADS", "1");
    let started = Instant::now();
    let spec = builtin_spec("dirichlet-chi4").unwrap();
    let b = bounds(2_000_000, 60, 1);
    let report = gap(&spec, GapKind::Scaled, &[1.5], &[19.3], &[82.9], &b).unwrap();
    let elapsed = started.elapsed();
    std::env::remove_var("EULER_ZETA_THREADS");
    let expected = -0.205831;
    assert!(
        (report.gap - expected).abs() <= 5e-3,
        "scaled gap {} vs expected {expected} (tol 5e-3)",
        report.gap
    );
    assert!(
        elapsed.as_secs() < 60,
        "runtime {elapsed:?} exceeds 60 s single-threaded"
    );
    println!(
        "PASS c01 scaled-gap constant: {} (expected {expected} +- 5e-3) in {elapsed:?}",
        report.gap
    );
}

#[test]
fn c02_log_gap_headline_constant() {
    let spec = builtin_spec("dirichlet-chi4").unwrap();
    let b = bounds(2_000_000, 60, 1);
    let report = gap(&spec, GapKind::Log, &[1.5], &[19.3], &[82.9], &b).unwrap();
    let expected = -0.16818;
    assert!(
        (report.gap - expected).abs() <= 1e-3,
        "log gap {} vs expected {expected} (tol 1e-3); the series-defined \
         log at these parameters evaluates to -0.132354 against two \
         independent high-precision computations, so the expected constant \
         appears to be unreproducible as printed",
        report.gap
    );
    println!(
        "PASS c02 log-gap constant: {} (expected {expected} +- 1e-3)",
        report.gap
    );
}

#[test]
fn c03_q_profile_sign_contrast() {
    let started = Instant::now();
    let zq = builtin_spec("zq").unwrap();
    let log_profile = q_profile(&zq, 1.0 / 3.0, 7.0, 0.0, 47.0, 0.01, GapKind::Log).unwrap();
    let log_min = log_profile
        .iter()
        .map(|&(_, q)| q)
        .fold(f64::INFINITY, f64::min);
    let plain_profile =
        q_profile(&zq, 1.0 / 3.0, 7.0, 0.0, 47.0, 0.01, GapKind::Plain).unwrap();
    let plain_min = plain_profile
        .iter()
        .map(|&(_, q)| q)
        .fold(f64::INFINITY, f64::min);
    let elapsed = started.elapsed();
    assert_eq!(log_profile.len(), 4701);
    assert!(log_min < 0.0, "log Q-profile minimum {log_min} not negative");
    assert!(
        plain_min >= -1e-9,
        "plain analogue minimum {plain_min} below -1e-9"
    );
    assert!(elapsed.as_secs() < 5, "runtime {elapsed:?} exceeds 5 s");
    println!(
        "PASS c03 Q-profile: log min {log_min}, plain min {plain_min}, {elapsed:?}"
    );
}

#[test]
fn c04_classification_gallery_and_degree2_dichotomy() {
    let b = bounds(100_000, 60, 10_000);
    let expectations: Vec<(&str, Verdict)> = vec![
        ("riemann", Verdict::InfinitelyDivisible),
        ("dirichlet-chi4", Verdict::NotCharacteristic),
        ("zq", Verdict::QuasiInfinitelyDivisibleOnly),
        ("fn:0", Verdict::NotCharacteristic),
        ("fn:1", Verdict::QuasiInfinitelyDivisibleOnly),
        ("fn:2", Verdict::InfinitelyDivisible),
        ("fn:3", Verdict::InfinitelyDivisible),
        ("zeta-l2s", Verdict::QuasiInfinitelyDivisibleOnly),
        ("zeta2-l2s", Verdict::InfinitelyDivisible),
        ("l-zeta2s", Verdict::NotCharacteristic),
    ];
    for (name, expected) in &expectations {
        let verdict = classify(&reduced_builtin(name), &b).unwrap();
        assert_eq!(
            verdict.verdict, *expected,
            "{name}: got {:?}",
            verdict.verdict
        );
        match (*name, &verdict.witness) {
            ("dirichlet-chi4", Some(Witness::Coefficient { n, .. })) => assert_eq!(*n, 3),
            ("dirichlet-chi4", w) => panic!("chi4 witness {w:?}"),
            ("zq", Some(Witness::PowerSum { prime, r, .. })) => {
                assert_eq!((*prime, *r), (2, 2))
            }
            ("zq", w) => panic!("zq witness {w:?}"),
            ("l-zeta2s", Some(Witness::Coefficient { n, .. })) => {
                assert_eq!(*n, 3, "first prime congruent 3 mod 4")
            }
            ("l-zeta2s", w) => panic!("l-zeta2s witness {w:?}"),
            _ => {}
        }
    }

    // degree <= 2 dichotomy: 500 random exact specs, never QuasiOnly
    let mut rng = SplitMix64::new(0xD1C4_0202);
    let mut verdict_counts = [0usize; 2];
    for case in 0..500 {
        let pair: Vec<ComplexRational> = match case % 5 {
            0 => {
                let a = random_real_value(&mut rng);
                let b = random_real_value(&mut rng);
                vec![a, b]
            }
            1 | 2 => {
                let a = random_unit_disc_value(&mut rng);
                let c = a.conj();
                vec![a, c]
            }
            3 => {
                // conjugate unit pair from a Pythagorean parametrization
                let m = (rng.next_u64() % 5 + 2) as i64;
                let n = (rng.next_u64() % (m as u64 - 1) + 1) as i64;
                let den = m * m + n * n;
                let a = ComplexRational::from_ratios((m * m - n * n, den), (2 * m * n, den));
                let c = a.conj();
                vec![a, c]
            }
            _ => vec![
                random_unit_disc_value(&mut rng),
                random_unit_disc_value(&mut rng),
            ],
        };
        let spec = EulerProductSpec::new(
            1,
            vec![Direction(vec![NumberLiteral::from_integer(1)])],
            vec![pair.into_iter().map(CoefficientRule::ConstantExact).collect()],
            DependenceMode::Independent,
        )
        .unwrap();
        let verdict = classify_degree2(&spec).unwrap();
        match verdict.verdict {
            Verdict::InfinitelyDivisible => verdict_counts[0] += 1,
            Verdict::NotCharacteristic => {
                verdict_counts[1] += 1;
                // verify the witness independently: a(n) with n = p^e must
                // reproduce the claimed value and lie outside R_{>=0}
                let Some(Witness::Coefficient { rank, n, value }) = verdict.witness else {
                    panic!("case {case}: ND without coefficient witness");
                };
                let factors = euler_zeta::number_kernel::factorize(n);
                assert_eq!(factors.len(), 1, "witness must be a prime power");
                let (p, e) = factors[0];
                let series = local_coefficients(&spec, rank, p, e).unwrap();
                let LocalValues::Exact(h) = &series.values else {
                    panic!("exact spec gave numeric series");
                };
                let claimed = match value {
                    PowerSumValue::Exact(v) => v,
                    other => panic!("case {case}: numeric witness {other:?}"),
                };
                assert_eq!(h[e as usize], claimed, "case {case}: witness value");
                assert!(
                    !claimed.is_real() || claimed.to_complex64().re < 0.0,
                    "case {case}: witness value {claimed} not outside R>=0"
                );
            }
            other => panic!("case {case}: degree-2 verdict {other:?} breaks the dichotomy"),
        }
    }
    println!(
        "PASS c04 gallery ({} specs) and dichotomy (500 specs: {} ID, {} ND)",
        expectations.len(),
        verdict_counts[0],
        verdict_counts[1]
    );
}

#[test]
fn c05_newton_oracle_equivalence() {
    let mut rng = SplitMix64::new(0x0EAC_1E05);
    for case in 0..50 {
        let eta = (rng.next_u64() % 4 + 1) as usize;
        let values: Vec<ComplexRational> =
            (0..eta).map(|_| random_unit_disc_value(&mut rng)).collect();
        let expected = brute_force_local_series(&values, 12);
        let spec = EulerProductSpec::new(
            1,
            vec![Direction(vec![NumberLiteral::from_integer(1)])],
            vec![values.into_iter().map(CoefficientRule::ConstantExact).collect()],
            DependenceMode::Independent,
        )
        .unwrap();
        let series = local_coefficients(&spec, 1, 2, 12).unwrap();
        let LocalValues::Exact(h) = &series.values else {
            panic!("exact spec gave numeric series");
        };
        assert_eq!(h.as_slice(), expected.as_slice(), "case {case}: exact equality");
    }
    println!("PASS c05 Newton-recurrence oracle equivalence (50 tuples, zero tolerance)");
}

#[test]
fn c06_levy_reconstruction_and_total_variation() {
    let riemann = builtin_spec("riemann").unwrap();
    let br = bounds(10_000, 40, 1);
    for t in [0.0, 1.0, 5.0, 12.0] {
        let g = reconstruction_gap(&riemann, &[2.0], &[t], &br).unwrap();
        assert!(g < 1e-6, "riemann reconstruction gap {g} at t = {t}");
    }
    let zq = builtin_spec("zq").unwrap();
    let bz = bounds(100, 300, 1);
    for t in [0.0, 1.0, 5.0, 7.0, 12.0] {
        let g = reconstruction_gap(&zq, &[1.0 / 3.0], &[t], &bz).unwrap();
        assert!(g < 1e-10, "zq reconstruction gap {g} at t = {t}");
    }
    // total variation bound for every builtin at sigma = 2 (reduced form
    // where the directions are integer-dependent)
    for name in builtin_names() {
        let spec = reduced_builtin(name);
        let sigma = vec![2.0; spec.dimension];
        let measure = build_quasi_levy(&spec, &sigma, &bounds(2000, 60, 1)).unwrap();
        let (tv, flag) = total_variation(&measure, &spec);
        assert_eq!(
            flag,
            Some(true),
            "{name}: total variation {tv} violates the 2 phi eta zeta(v) bound"
        );
    }
    println!("PASS c06 reconstruction gaps (riemann < 1e-6, zq < 1e-10) and TV bounds");
}

#[test]
fn c07_sampling_accuracy() {
    let spec = builtin_spec("riemann").unwrap();
    let m = 100_000usize;
    let pmf = build_pmf(&spec, &[2.0], 2_000_000).unwrap();
    assert!(pmf.deficit < 1e-6, "deficit {}", pmf.deficit);
    let samples = draw(&pmf, 42, m).unwrap();
    // empirical characteristic function within 5/sqrt(M)
    let evaluator = SpecEvaluator::new(&spec, &bounds(100_000, 60, 1));
    let tol = 5.0 / (m as f64).sqrt();
    for t in [0.5, 1.0, 3.0] {
        let emp = empirical_cf(&samples, &[t]).unwrap();
        let exact = evaluator.normalized_cf(&[2.0], &[t]).unwrap();
        let err = (emp - exact).norm();
        assert!(err < tol, "ecf error {err} at t = {t} (tol {tol})");
    }
    // mass at x = 0 within a 3 sigma binomial band of 1/zeta(2)
    let p0 = 0.6079271018540266;
    let band = 3.0 * (p0 * (1.0 - p0) / m as f64).sqrt();
    let hits = samples.iter().filter(|x| x[0] == 0.0).count();
    let freq = hits as f64 / m as f64;
    assert!(
        (freq - p0).abs() < band,
        "frequency {freq} outside {p0} +- {band}"
    );
    // determinism
    let again = draw(&pmf, 42, 100).unwrap();
    assert_eq!(&samples[..100], &again[..]);
    println!(
        "PASS c07 sampling: ecf within {tol:.4}, mass at 0 = {freq} (band {band:.4})"
    );
}

#[test]
fn c08_gap_inequality_suite() {
    let b = bounds(30_000, 60, 1);
    let classification_bounds = bounds(10_000, 60, 10_000);
    let mut characteristic: Vec<(String, EulerProductSpec)> = Vec::new();
    let mut complete_id: Vec<(String, EulerProductSpec)> = Vec::new();
    for name in builtin_names() {
        let spec = reduced_builtin(name);
        let verdict = classify(&spec, &classification_bounds).unwrap();
        match verdict.verdict {
            Verdict::InfinitelyDivisible => {
                if verdict.certification.complete {
                    complete_id.push((name.to_string(), spec.clone()));
                }
                characteristic.push((name.to_string(), spec));
            }
            Verdict::QuasiInfinitelyDivisibleOnly => {
                characteristic.push((name.to_string(), spec));
            }
            _ => {}
        }
    }
    assert!(characteristic.len() >= 8, "gallery shrank unexpectedly");
    assert!(complete_id.len() >= 5, "complete-ID set shrank unexpectedly");

    let mut rng = SplitMix64::new(0x1EA1_0808);
    let pairs: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            (
                rng.next_f64() * 100.0 - 50.0,
                rng.next_f64() * 100.0 - 50.0,
            )
        })
        .collect();

    let mut plain_min = f64::INFINITY;
    for (name, spec) in &characteristic {
        let evaluator = SpecEvaluator::new(spec, &b);
        let sigma = vec![2.0; spec.dimension];
        for &(t1, t2) in &pairs {
            let f1 = evaluator.normalized_cf(&sigma, &[t1]).unwrap();
            let f2 = evaluator.normalized_cf(&sigma, &[t2]).unwrap();
            let fd = evaluator.normalized_cf(&sigma, &[t1 - t2]).unwrap();
            let gap = 4.0 * (euler_zeta::Complex64::new(1.0, 0.0) - fd).norm()
                - (f1 - f2).norm_sqr();
            plain_min = plain_min.min(gap);
            assert!(
                gap >= -1e-9,
                "{name}: plain gap {gap} at ({t1}, {t2})"
            );
        }
    }

    let mut log_min = f64::INFINITY;
    for (name, spec) in &complete_id {
        let evaluator = SpecEvaluator::new(spec, &b);
        let sigma = vec![2.0; spec.dimension];
        let l0 = evaluator.log(&EvalPoint::real(sigma.clone())).unwrap();
        for &(t1, t2) in &pairs {
            let l1 = evaluator
                .log(&EvalPoint::new(sigma.clone(), vec![t1]))
                .unwrap();
            let l2 = evaluator
                .log(&EvalPoint::new(sigma.clone(), vec![t2]))
                .unwrap();
            let ld = evaluator
                .log(&EvalPoint::new(sigma.clone(), vec![t1 - t2]))
                .unwrap();
            let gap = 4.0 * l0.norm() * (l0 - ld).norm() - (l1 - l2).norm_sqr();
            log_min = log_min.min(gap);
            assert!(gap >= -1e-9, "{name}: log gap {gap} at ({t1}, {t2})");
        }
    }
    println!(
        "PASS c08 inequalities: {} characteristic specs (plain min {plain_min:.3e}), \
         {} complete-ID specs (log min {log_min:.3e}), 200 pairs each",
        characteristic.len(),
        complete_id.len()
    );
}

#[test]
fn c09_search_witnesses() {
    let spec = builtin_spec("riemann").unwrap();
    let b = bounds(10_000, 60, 1);

    let witness = almost_period_search(&spec, &[2.0], 0.05, 100_000.0, 0.01, &[1.0], false, &b)
        .unwrap()
        .expect("almost period tau <= 1e5 must exist");
    assert!(witness.value > 0.0 && witness.value <= 100_000.0);
    assert!(witness.difference < 0.05);
    // independent re-evaluation at quadrupled prime cutoff
    let b4 = bounds(40_000, 60, 1);
    let tail4 = truncation_tail_bound(&spec, &[2.0], &b4).unwrap();
    let z0 = eval_product(&spec, &EvalPoint::real(vec![2.0]), &b4).unwrap();
    let zt = eval_product(
        &spec,
        &EvalPoint::new(vec![2.0], vec![witness.value]),
        &b4,
    )
    .unwrap();
    let diff4 = (z0 - zt).norm();
    assert!(
        diff4 < 0.05 + 2.0 * tail4,
        "re-evaluated difference {diff4} at tau = {}",
        witness.value
    );

    let pair = shifted_pair_search(&spec, &[2.0], &[0.3], 2.0, 0.05, 100_000.0, 0.01, false, &b)
        .unwrap()
        .expect("shifted pair must exist");
    assert!(pair.difference < 0.05);
    let za = eval_product(
        &spec,
        &EvalPoint::new(vec![2.0], vec![0.3 + 2.0 * pair.value]),
        &b4,
    )
    .unwrap();
    let zb = eval_product(&spec, &EvalPoint::new(vec![2.0], vec![pair.value]), &b4).unwrap();
    let pair_diff4 = (za - zb).norm();
    assert!(
        pair_diff4 < 0.05 + 2.0 * tail4,
        "re-evaluated pair difference {pair_diff4} at t = {}",
        pair.value
    );
    println!(
        "PASS c09 searches: tau = {} (diff {:.4}), shifted t = {} (diff {:.4})",
        witness.value, witness.difference, pair.value, pair.difference
    );
}

#[test]
fn c10_structural_invariants() {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let names = builtin_names();

    // multiplicativity on every coprime pair with product <= 1e4
    for name in &names {
        let spec = builtin_spec(name).unwrap();
        for l in 1..=spec.phi {
            let table = dirichlet_coefficients(&spec, l, 10_000).unwrap();
            for m in 2..=5000u64 {
                for n in m..=10_000 / m {
                    if gcd(m, n) == 1 {
                        let lhs = table.get_complex(m * n);
                        let rhs = table.get_complex(m) * table.get_complex(n);
                        assert!(
                            (lhs - rhs).norm() < 1e-12,
                            "{name} rank {l}: a({}) != a({m})a({n})",
                            m * n
                        );
                    }
                }
            }
        }
    }

    // hermitian symmetry for specs with real coefficient tables
    for name in &names {
        let spec = reduced_builtin(name);
        let all_real = (1..=spec.phi).all(|l| {
            dirichlet_coefficients(&spec, l, 2000)
                .map(|t| t.all_real())
                .unwrap_or(false)
        });
        if !all_real {
            continue;
        }
        let evaluator = SpecEvaluator::new(&spec, &bounds(2000, 60, 1));
        let sigma = vec![2.0; spec.dimension];
        for t in [0.5, 1.0, 7.3] {
            let fp = evaluator.normalized_cf(&sigma, &[t]).unwrap();
            let fm = evaluator.normalized_cf(&sigma, &[-t]).unwrap();
            assert!(
                (fp.conj() - fm).norm() < 1e-12,
                "{name}: f(-t) != conj f(t) at t = {t}"
            );
        }
    }

    // zero-freeness at 100 random valid points
    let mut rng = SplitMix64::new(0x02EE_F4EE);
    let mut checked = 0;
    'outer: loop {
        for name in &names {
            let spec = reduced_builtin(name);
            let sigma = vec![1.05 + 2.0 * rng.next_f64(); spec.dimension];
            let t = vec![100.0 * rng.next_f64() - 50.0; spec.dimension];
            let z = eval_product(
                &spec,
                &EvalPoint::new(sigma.clone(), t.clone()),
                &bounds(2000, 60, 1),
            )
            .unwrap();
            assert!(
                z.norm() > 0.0,
                "{name} vanished at sigma = {sigma:?}, t = {t:?}"
            );
            checked += 1;
            if checked >= 100 {
                break 'outer;
            }
        }
    }

    // clean coefficient scan implies real power sums (p <= 100, r <= 20)
    for name in &names {
        let spec = reduced_builtin(name);
        match scan_coefficients(&spec, 10_000).unwrap() {
            ScanOutcome::Clean { .. } => {}
            _ => continue,
        }
        for l in 1..=spec.phi {
            for &p in primes_up_to(100).iter() {
                for r in 1..=20u32 {
                    match power_sum(&spec, l, p, r).unwrap() {
                        PowerSumValue::Exact(v) => {
                            assert!(
                                v.is_real(),
                                "{name}: non-real exact power sum at (l={l}, p={p}, r={r})"
                            );
                        }
                        PowerSumValue::Numeric(z) => {
                            assert!(
                                z.im.abs() < 1e-9,
                                "{name}: non-real power sum at (l={l}, p={p}, r={r})"
                            );
                        }
                    }
                }
            }
        }
    }
    println!("PASS c10 structural invariants (multiplicativity, symmetry, zero-freeness, realness)");
}
