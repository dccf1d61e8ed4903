//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them all.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shtomo::forward::{
    assemble_dtn_matrix, build_kernel_spectrum, forward_apply, kappa_closed_form, solve_mode_system, DtnMatrix,
    KernelSpectrum, MaterialParams,
};
use shtomo::inversion::{
    build_imaging_map, decompose, indicator, GridSpec, ImagingMap, Indicator, NoiseSpec, RegularizationSpec,
};
use shtomo::parameters::{compute_mu0, disk_positivity_margin, fit_parameters};
use shtomo::pipeline::ExperimentConfig;
use shtomo::probe::{assemble_probe, SamplePoint};

fn report(id: &str, pass: bool, detail: String) {
    println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn example_matrix() -> (KernelSpectrum, DtnMatrix) {
    let spec = build_kernel_spectrum(&MaterialParams::example_one(), 100).unwrap();
    let a = assemble_dtn_matrix(&spec, 128).unwrap();
    (spec, a)
}

/// Eigenvalue of frequency `p` for the circulant built from a truncated
/// spectrum: every mode aliases onto `n mod N` and `-n mod N`.
fn aliased_eigenvalues(spec: &KernelSpectrum, n: usize) -> Vec<f64> {
    let mut lam = vec![0.0; n];
    for mode in 1..=spec.n_max() {
        let k = spec.kappa(mode as i64);
        lam[mode % n] += k;
        lam[(n - mode % n) % n] += k;
    }
    lam
}

fn example_map(noise: NoiseSpec, alpha: f64) -> ImagingMap {
    let (_, a) = example_matrix();
    build_imaging_map(
        &a,
        &noise,
        &RegularizationSpec::spectral_cutoff(alpha).unwrap(),
        &GridSpec::default(),
    )
    .unwrap()
}

#[test]
fn c01_closed_form_matches_mode_system() {
    let p = MaterialParams::example_one();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=100 {
        let closed = kappa_closed_form(n, &p).unwrap();
        let oracle = solve_mode_system(n, &p).unwrap().kappa();
        worst = worst.max((closed - oracle).abs() / oracle.abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "C1 closed form vs 3x3 system",
        worst <= 1e-12 && elapsed < 0.1,
        format!("max rel err {worst:.2e} (tol 1e-12), {elapsed:.4} s (limit 0.1 s)"),
    );
}

#[test]
fn c02_operator_structure() {
    let (spec, a) = example_matrix();
    let m = a.as_matrix();
    let asym = (m - m.transpose()).amax();
    let null = forward_apply(&a, &[1.0; 128]).unwrap().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    let mut expected = aliased_eigenvalues(&spec, 128);
    expected.sort_by(|x, y| y.total_cmp(x));
    let eig_err = eig.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let min_eig = *eig.last().unwrap();
    report(
        "C2 operator structure",
        asym <= 1e-14 && null <= 1e-13 && eig_err <= 1e-10 && min_eig >= -1e-14,
        format!(
            "||A-A^T||_max {asym:.1e}, ||A1||_inf {null:.1e}, eigen err {eig_err:.1e}, min eig {min_eig:.1e}"
        ),
    );
}

#[test]
fn c03_pseudo_inverse_equivalence() {
    // rho = 0.9 keeps every non-constant mode above roundoff (smallest ~3e-4);
    // at rho = 0.7 half the spectrum sits below 1e-16 and A^+ is not numerically defined.
    let p = MaterialParams::new(2.0, 0.1, 1e-3, 0.9).unwrap();
    let spec = build_kernel_spectrum(&p, 100).unwrap();
    let n = 128;
    let a = assemble_dtn_matrix(&spec, n).unwrap();
    let svd = decompose(&a).unwrap();
    let sigma_min = svd.singular_values.iter().copied().filter(|&s| s > 0.0).fold(f64::INFINITY, f64::min);
    let reg = RegularizationSpec::spectral_cutoff(sigma_min * sigma_min).unwrap();

    let lam = aliased_eigenvalues(&spec, n);
    let pinv = DMatrix::from_fn(n, n, |j, k| {
        let d = (j + n - k) % n;
        (1..n)
            .map(|q| (2.0 * PI * ((q * d) % n) as f64 / n as f64).cos() / lam[q])
            .sum::<f64>()
            / n as f64
    });

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = 0.95 * rng.random::<f64>().sqrt();
        let z = SamplePoint::new(r, rng.random_range(0.0..2.0 * PI)).unwrap();
        let b = nalgebra::DVector::from_vec(assemble_probe(&z, n).unwrap().normalized);
        let oracle = b.dot(&(&pinv * &b));
        let Indicator::Value(ind) = indicator(&z, &svd, &reg, n).unwrap() else {
            panic!("degenerate point {z:?}")
        };
        worst = worst.max((ind - oracle).abs() / oracle.abs());
    }
    report(
        "C3 indicator vs pseudo-inverse",
        worst <= 1e-8,
        format!("max rel err {worst:.2e} over 50 points (tol 1e-8), alpha = sigma_min^2 = {:.2e}", reg.alpha),
    );
}

#[test]
fn c04_reconstruction_contrast() {
    let start = Instant::now();
    let map = example_map(NoiseSpec::noiseless(), 1e-16);
    let elapsed = start.elapsed().as_secs_f64();
    let (mut inside, mut inside_hi, mut outside, mut outside_lo) = (0, 0, 0, 0);
    for (r, w) in map.radial_samples() {
        if r <= 0.63 {
            inside += 1;
            inside_hi += usize::from(w >= 0.5);
        } else if (0.77..=0.95).contains(&r) {
            outside += 1;
            outside_lo += usize::from(w <= 0.5);
        }
    }
    let fin = inside_hi as f64 / inside as f64;
    let fout = outside_lo as f64 / outside as f64;
    report(
        "C4 reconstruction contrast",
        fin >= 0.9 && fout >= 0.9 && elapsed < 10.0,
        format!(
            "interior W>=0.5 fraction {fin:.4} (need 0.9), exterior W<=0.5 fraction {fout:.4} (need 0.9), {elapsed:.2} s"
        ),
    );
}

#[test]
fn c05_regularization_trend() {
    let alphas = [1e-3, 1e-6, 1e-11, 1e-16];
    let contrasts: Vec<f64> = alphas
        .iter()
        .map(|&alpha| example_map(NoiseSpec::noiseless(), alpha).contrast(0.7))
        .collect();
    report(
        "C5 regularization trend",
        contrasts.windows(2).all(|w| w[1] >= w[0]),
        format!("contrast for alpha {alphas:?}: {contrasts:.3?}"),
    );
}

#[test]
fn c06_noise_robustness() {
    let map = example_map(NoiseSpec::new(0.01, 2024).unwrap(), 1e-8);
    let c = map.contrast(0.7);
    report("C6 noise robustness", c >= 3.0, format!("contrast {c:.3} at delta 0.01, alpha 1e-8 (need >= 3)"));
}

#[test]
fn c07_parameter_identifiability() {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let fit_truth = |p: &MaterialParams| {
        let spec = build_kernel_spectrum(p, 40).unwrap();
        let data: Vec<(i64, f64)> = (1..=40).map(|n| (n, spec.kappa(n))).collect();
        fit_parameters(&data, p.rho(), None)
            .map(|f| rel(f.mu, p.mu()).max(rel(f.mu_s, p.mu_s())).max(rel(f.ell2, p.ell2())))
            .unwrap_or(f64::INFINITY)
    };
    let example_err = fit_truth(&MaterialParams::example_one());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo.log10()..hi.log10()));
    let mut successes = 0;
    for _ in 0..100 {
        let mu = log_uniform(&mut rng, 0.9, 100.0);
        let mu_s = log_uniform(&mut rng, 1e-3, 1.0);
        let ell2 = log_uniform(&mut rng, 1e-8, 1e-2);
        let rho = rng.random_range(0.25..0.8);
        let p = MaterialParams::new(mu, mu_s, ell2, rho).unwrap();
        if fit_truth(&p) <= 1e-4 {
            successes += 1;
        }
    }
    report(
        "C7 parameter identifiability",
        example_err <= 1e-6 && successes >= 95,
        format!("example max rel err {example_err:.2e} (tol 1e-6), random successes {successes}/100 (need 95)"),
    );
}

#[test]
fn c08_coercivity_threshold() {
    let p = MaterialParams::example_one();
    let report_mu0 = compute_mu0(&p, 0.0).unwrap();
    let scan = 1.0
        - (1..=10_000)
            .map(|n| {
                let l = n as f64 / 0.7;
                0.1 * l + 0.1 * 1e-3 * l.powi(3)
            })
            .fold(f64::INFINITY, f64::min);
    let err = (report_mu0.mu0 - scan.max(0.0)).abs();
    let mu0 = report_mu0.mu0;
    let positive = (1..=20).all(|k| {
        let mu = mu0 + (1.0 - mu0) * k as f64 / 20.0;
        disk_positivity_margin(&p, mu, 0.0, 10_000) > 0.0
    });
    report(
        "C8 coercivity threshold",
        err <= 1e-10 && positive,
        format!("mu0 {mu0:.9}, |mu0 - scan| {err:.1e} (tol 1e-10), positivity at 20 mu > mu0: {positive}"),
    );
}

#[test]
fn c09_probe_fidelity() {
    let n = 128;
    let mut worst_flux: f64 = 0.0;
    let mut worst_center: f64 = 0.0;
    let mut ok = true;
    for i in 0..=90 {
        let r = i as f64 / 100.0;
        for t in [0.0, 0.4, 1.3, 2.9, 5.0] {
            let p = assemble_probe(&SamplePoint::new(r, t).unwrap(), n).unwrap();
            let mean = p.raw.iter().sum::<f64>() / n as f64;
            let flux = (mean - 1.0 / (2.0 * PI)).abs();
            let tol = f64::max(1e-12, r.powi(n as i32));
            let max = p.raw.iter().copied().fold(0.0, f64::max);
            let center = p.centered.iter().sum::<f64>().abs() / (n as f64 * max);
            ok &= flux <= tol && center <= 1e-14;
            worst_flux = worst_flux.max(flux / tol);
            worst_center = worst_center.max(center);
        }
    }
    report(
        "C9 probe fidelity",
        ok,
        format!("max flux err / tol {worst_flux:.2e}, max |sum centered| / (N max raw) {worst_center:.1e}"),
    );
}

#[test]
fn c10_determinism() {
    let root = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::example_one(1e-8, root.path().join("unused"));
    config.noise = NoiseSpec::new(0.01, 11).unwrap();
    let config_path = root.path().join("run.toml");
    std::fs::write(&config_path, config.to_toml_string()).unwrap();

    let run = |dir: &str| {
        let out = root.path().join(dir);
        let args = [
            "shtomo",
            "reconstruct",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        let code = shtomo::cli::run(args, &mut std::io::sink(), &mut std::io::sink());
        assert_eq!(code, 0);
        let csv = std::fs::read(out.join("map.csv")).unwrap();
        let pgm = std::fs::read(out.join("map.pgm")).unwrap();
        (csv, pgm)
    };
    let (csv1, pgm1) = run("a");
    let (csv2, pgm2) = run("b");
    report(
        "C10 determinism",
        csv1 == csv2 && pgm1 == pgm2 && !csv1.is_empty(),
        format!("map.csv {} bytes identical: {}, map.pgm identical: {}", csv1.len(), csv1 == csv2, pgm1 == pgm2),
    );
}
