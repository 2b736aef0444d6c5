//! Acceptance criteria at full desk scale. Each test prints one
//! `criterion N: PASS|FAIL` line with the measured quantities.

use std::io::Write;
use std::process::Command;

use fdsic::RayonExecutor;
use fdsic_core::complexity::{
    runtime_hammerstein, runtime_proposed, training_hammerstein, training_proposed, ComplexityInput,
};
use fdsic_core::frontend::{Amplifier, ChannelTiming, MultipathChannel};
use fdsic_core::hammerstein::{self, HammersteinConfig};
use fdsic_core::lsq::{solve_ls, DesignMatrix};
use fdsic_core::signal::{rrc_taps, FirTaps};
use fdsic_core::sim::{
    gen_ofdm_like_symbols, run_ber, sweep, BerMode, BerOptions, BerPoint, ExperimentConfig, MethodStats, SiLink,
    SweepParam, SweepResult,
};
use fdsic_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PACKETS: usize = 500;

/// Written straight to stderr so the line shows even when the harness
/// captures output of passing tests.
fn report(id: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {id}: {verdict} | {detail}");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn desk() -> ExperimentConfig {
    ExperimentConfig {
        n_packets: PACKETS,
        ..ExperimentConfig::default()
    }
}

fn exec() -> RayonExecutor {
    RayonExecutor::new(None).unwrap()
}

fn run_sweep(cfg: &ExperimentConfig, param: SweepParam, values: &[f64]) -> SweepResult {
    let res = sweep(cfg, param, values, &exec()).unwrap();
    assert_eq!(res.total_failed(), 0, "failed fits in {param} sweep");
    res
}

fn means(res: &SweepResult, pick: fn(&fdsic_core::sim::SweepPoint) -> Option<MethodStats>) -> Vec<f64> {
    res.points.iter().map(|p| pick(p).unwrap().mean_residual_db).collect()
}

fn ham(p: &fdsic_core::sim::SweepPoint) -> Option<MethodStats> {
    p.hammerstein
}

fn lmf(p: &fdsic_core::sim::SweepPoint) -> Option<MethodStats> {
    p.learned_mf
}

fn spread(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min)
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

#[test]
fn criterion_01_ordering_over_snr() {
    let snrs: Vec<f64> = (0..=7).map(|k| 3.0 * k as f64).collect();
    let res = run_sweep(&desk(), SweepParam::SnrDb, &snrs);
    let gains: Vec<f64> = res.points.iter().map(|p| p.gain_db().unwrap()).collect();
    let pass = gains.iter().all(|&g| g >= 10.0);
    report(
        1,
        pass,
        &format!(
            "SNR {:?} dB: hammerstein [{}] learned_mf [{}] gain [{}] (need gain >= 10 dB everywhere)",
            snrs,
            fmt(&means(&res, ham)),
            fmt(&means(&res, lmf)),
            fmt(&gains)
        ),
    );
}

#[test]
fn criterion_02_symbol_rate_equivalence() {
    let cfg = ExperimentConfig { m: 1, lg: 1, ..desk() };
    let res = run_sweep(&cfg, SweepParam::SnrDb, &[cfg.snr_db]);
    let diff = res.points[0].gain_db().unwrap();
    report(
        2,
        diff.abs() <= 1.0,
        &format!(
            "M=1, L_g=1, delta pulse: hammerstein {:.2} dB learned_mf {:.2} dB difference {diff:.2} dB (need |diff| <= 1 dB)",
            means(&res, ham)[0],
            means(&res, lmf)[0]
        ),
    );
}

#[test]
fn criterion_03_oversampling_trend() {
    let res = run_sweep(&desk(), SweepParam::M, &[2.0, 4.0, 8.0]);
    let h = means(&res, ham);
    let m = means(&res, lmf);
    let h_worse = h[2] - h[0];
    let pass = h_worse >= 3.0 && spread(&m) <= 3.0;
    report(
        3,
        pass,
        &format!(
            "M [2, 4, 8]: hammerstein [{}] (M=8 minus M=2 {h_worse:.2} dB, need >= 3) learned_mf [{}] (spread {:.2} dB, need <= 3)",
            fmt(&h),
            fmt(&m),
            spread(&m)
        ),
    );
}

#[test]
fn criterion_04_overfitting_in_filter_span() {
    let res = run_sweep(&desk(), SweepParam::Lg, &[2.0, 4.0, 8.0, 16.0]);
    let h = means(&res, ham);
    let m = means(&res, lmf);
    let m_worse = m[3] - m[1];
    let pass = m_worse >= 2.0 && spread(&h) <= 2.0;
    report(
        4,
        pass,
        &format!(
            "L_g [2, 4, 8, 16]: learned_mf [{}] (L_g=16 minus L_g=4 {m_worse:.2} dB, need >= 2) hammerstein [{}] (spread {:.2} dB, need <= 2)",
            fmt(&m),
            fmt(&h),
            spread(&h)
        ),
    );
}

#[test]
fn criterion_05_backoff_robustness() {
    let res = run_sweep(&desk(), SweepParam::IboDb, &[0.0, 3.0, 5.0, 8.0, 12.0]);
    let h = means(&res, ham);
    let m = means(&res, lmf);
    let h_worse = h[4] - h[2];
    let pass = spread(&m) <= 3.0 && h_worse >= 2.0;
    report(
        5,
        pass,
        &format!(
            "IBO [0, 3, 5, 8, 12] dB: learned_mf [{}] (spread {:.2} dB, need <= 3) hammerstein [{}] (IBO=12 minus IBO=5 {h_worse:.2} dB, need >= 2)",
            fmt(&m),
            spread(&m),
            fmt(&h)
        ),
    );
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn noiseless_hammerstein_db(link: &SiLink, h: &[Complex64], seed: u64) -> f64 {
    let m = link.pulse().oversampling();
    let mut taps = vec![c(0.0, 0.0); h.len() * m];
    for (l, &v) in h.iter().enumerate() {
        taps[l * m] = v;
    }
    let channel = MultipathChannel::new(taps, h.len(), m)
        .unwrap()
        .with_timing(ChannelTiming::Causal);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_pilot = gen_ofdm_like_symbols(&mut rng, 128).unwrap();
    let s_data = gen_ofdm_like_symbols(&mut rng, 128).unwrap();
    let cfg = HammersteinConfig::new(3, 4).unwrap();
    let rx = |s| {
        link.conventional_receive(&link.transmit(s, &channel).unwrap(), 128)
            .unwrap()
    };
    let model = hammerstein::fit(&s_pilot, &rx(&s_pilot), &cfg).unwrap();
    let r = rx(&s_data);
    let eps = hammerstein::cancel(&r, &hammerstein::regenerate(&model, &s_data).unwrap()).unwrap();
    let lg = link.pulse().span_symbols();
    let num: f64 = eps[lg..128 - lg].iter().map(|v| v.norm_sqr()).sum();
    let den: f64 = r[lg..128 - lg].iter().map(|v| v.norm_sqr()).sum();
    10.0 * (num / den).log10()
}

#[test]
fn criterion_06_hammerstein_exactness_oracle() {
    let pa = Amplifier::OddPolynomial(vec![c(1.0, 0.0), c(-0.08, 0.03)]);
    let exact = SiLink::with_parts(FirTaps::delta(), pa.clone());
    let shaped = SiLink::with_parts(rrc_taps(0.35, 4, 8).unwrap(), pa);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_exact, mut best_shaped) = (f64::MIN, f64::MAX);
    for trial in 0..20u64 {
        let len = 1 + (trial as usize % 4);
        let h: Vec<_> = (0..len)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        worst_exact = worst_exact.max(noiseless_hammerstein_db(&exact, &h, trial));
        best_shaped = best_shaped.min(noiseless_hammerstein_db(&shaped, &h, trial));
    }
    report(
        6,
        worst_exact < -80.0 && best_shaped > -40.0,
        &format!(
            "M=1 cubic PA, causal channels of 1..4 symbols: worst residual {worst_exact:.1} dB (need < -80); \
             same with RRC at M=8: best residual {best_shaped:.1} dB (need > -40)"
        ),
    );
}

#[test]
fn criterion_07_least_squares_solver() {
    let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let (mut worst_recovery, mut worst_orth) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = rng.random_range(8..200);
        let cols = rng.random_range(1..=rows.min(40));
        let mut gen = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a = DesignMatrix::from_rows(rows, cols, (0..rows * cols).map(|_| gen()).collect()).unwrap();
        let x0: Vec<_> = (0..cols).map(|_| gen()).collect();
        let b: Vec<_> = (0..rows).map(|_| gen()).collect();

        let x = solve_ls(&a, &a.mul_vec(&x0).unwrap()).unwrap();
        let err: Vec<_> = x.iter().zip(&x0).map(|(p, q)| p - q).collect();
        worst_recovery = worst_recovery.max(norm(&err) / norm(&x0));

        let x = solve_ls(&a, &b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        let res: Vec<_> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let g = a.adjoint_mul_vec(&res).unwrap();
        worst_orth = worst_orth.max(norm(&g) / (a.frobenius_norm() * norm(&b)));
    }
    report(
        7,
        worst_recovery < 1e-9 && worst_orth < 1e-10,
        &format!("100 seeds: worst recovery error {worst_recovery:.2e} (need < 1e-9), worst orthogonality {worst_orth:.2e} (need < 1e-10)"),
    );
}

#[test]
fn criterion_08_complexity_counts() {
    let c = ComplexityInput::new(128, 8, 4, 4, 3).unwrap();
    let got = [
        runtime_hammerstein(&c),
        runtime_proposed(&c),
        training_hammerstein(&c),
        training_proposed(&c),
    ];
    let cli = Command::new(env!("CARGO_BIN_EXE_fdsic")).arg("complexity").output().unwrap();
    let text = String::from_utf8(cli.stdout).unwrap();
    let cli_ok = cli.status.success() && ["14592", "8448", "82176", "1196032"].iter().all(|n| text.contains(n));
    report(
        8,
        got == [14592, 8448, 82176, 1196032] && cli_ok,
        &format!("runtime H/P {} / {}, training H/P {} / {}, CLI agrees: {cli_ok}", got[0], got[1], got[2], got[3]),
    );
}

/// `Q(x) = erfc(x / sqrt 2) / 2`.
fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Nonincreasing up to three binomial standard errors of the difference.
fn monotone(points: &[&BerPoint]) -> bool {
    points.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        let p = (a.errors + b.errors) as f64 / (a.bits + b.bits) as f64;
        let se = (p * (1.0 - p) * (1.0 / a.bits as f64 + 1.0 / b.bits as f64)).sqrt();
        b.ber() - a.ber() <= 3.0 * se
    })
}

#[test]
fn criterion_09_ber() {
    let grid: Vec<f64> = (0..=6).map(|k| 2.0 * k as f64).collect();
    let interior = 128 - 2 * 4;
    let packets = 100_000usize.div_ceil(interior);
    let cfg = ExperimentConfig {
        n_packets: packets,
        ..ExperimentConfig::default()
    };
    let opts = BerOptions {
        snr_grid: grid.clone(),
        ..BerOptions::default()
    };
    let pts = run_ber(&cfg, &opts, &exec()).unwrap();
    let by = |mode| pts.iter().filter(|p| p.mode == mode).collect::<Vec<_>>();
    let (h, m) = (by(BerMode::Hammerstein), by(BerMode::LearnedMf));
    assert!(h.iter().chain(&m).all(|p| p.bits >= 100_000 && p.n_failed == 0));
    let ordered = h.iter().zip(&m).all(|(a, b)| b.ber() <= a.ber());
    let mono = monotone(&h) && monotone(&m);

    // Interference-free baseline: Eb/N0 is M times the per-sample SNR. M = 1
    // keeps several grid points above 1e-3 so the comparison is not vacuous.
    let mut baseline_ok = true;
    let mut compared = 0;
    let mut baseline_text = Vec::new();
    for m_os in [8usize, 1] {
        let base_cfg = ExperimentConfig {
            m: m_os,
            ibo_db: f64::INFINITY,
            ..cfg.clone()
        };
        let base_opts = BerOptions {
            include_si: false,
            ..opts.clone()
        };
        for p in run_ber(&base_cfg, &base_opts, &exec()).unwrap() {
            let oracle = q_function((2.0 * m_os as f64 * 10f64.powf(p.snr_db / 10.0)).sqrt());
            if oracle >= 1e-3 {
                compared += 1;
                let ratio = p.ber() / oracle;
                baseline_ok &= (0.5..=2.0).contains(&ratio);
                baseline_text.push(format!("M={m_os}@{}dB {:.2e}/{:.2e}", p.snr_db, p.ber(), oracle));
            }
        }
    }
    baseline_ok &= compared > 0;

    let fmt_ber = |v: &[&BerPoint]| v.iter().map(|p| format!("{:.2e}", p.ber())).collect::<Vec<_>>().join(", ");
    report(
        9,
        ordered && mono && baseline_ok,
        &format!(
            "SNR {grid:?} dB, {} bits/point: hammerstein [{}] learned_mf [{}]; learned <= hammerstein everywhere: {ordered}; \
             monotone: {mono}; no-SI baseline vs Q oracle (measured/oracle) [{}]: {baseline_ok}",
            h[0].bits,
            fmt_ber(&h),
            fmt_ber(&m),
            baseline_text.join(", ")
        ),
    );
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["sweep", "--param", "snr", "--values", "0:3:21", "--packets", "2", "--seed", "7"],
        &["single", "--packets", "5", "--seed", "11", "--m", "4"],
        &["ber", "--packets", "3", "--seed", "2", "--snr-grid", "0,6,12"],
        &["export-mf", "--seed", "4"],
    ];
    let mut identical = true;
    for (i, args) in runs.iter().enumerate() {
        let files: Vec<Vec<u8>> = ["1", "3"]
            .iter()
            .map(|jobs| {
                let out = dir.path().join(format!("r{i}-{jobs}.csv"));
                let status = Command::new(env!("CARGO_BIN_EXE_fdsic"))
                    .args(*args)
                    .args(["--jobs", jobs, "--out", out.to_str().unwrap()])
                    .status()
                    .unwrap();
                assert!(status.success(), "{args:?}");
                std::fs::read(out).unwrap()
            })
            .collect();
        identical &= files[0] == files[1] && !files[0].is_empty();
    }
    report(10, identical, "sweep, single, ber and export-mf repeated with the same seed (1 and 3 threads) give byte-identical files");
}
