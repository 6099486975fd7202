//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line with the measured quantities.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the report lines.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use jcladder::coupling::{geff_coherent, CouplingResult, TransitionSpec};
use jcladder::eigen::tridiagonal_residual;
use jcladder::ladder::{dispersive_chi, stark_shift, LadderModel, StarkConvention};
use jcladder::oracle::two_strip_splitting_oracle;
use jcladder::params::{reference, DeviceParams};
use jcladder::resonance::{
    linspace, sweep_qubit_frequency, SweepConfig, SweepEntry, SweepOutcome, TransitionFamily,
};
use jcladder::tls::{bare_amplitude, crossing_frequency, tls_crossing_diagram, TlsSpec};
use jcladder::transmon::{
    asymptotic_coupling, normalized_charge_coupling, params_from_spectroscopy, solve_transmon,
};
use jcladder::Execution;

const MHZ: f64 = 1e3;

fn report(id: u32, title: &str, checks: &[(&str, bool, String)]) {
    let ok = checks.iter().all(|c| c.1);
    let details: Vec<String> = checks
        .iter()
        .map(|(name, pass, detail)| format!("{}{name}: {detail}", if *pass { "" } else { "[X] " }))
        .collect();
    println!(
        "{} criterion {id} ({title}): {}",
        if ok { "PASS" } else { "FAIL" },
        details.join("; ")
    );
    assert!(ok, "criterion {id} failed");
}

fn template(eps: f64) -> DeviceParams {
    DeviceParams::new(0.2, 20.0, reference::OMEGA_R, reference::G).with_epsilon(eps)
}

fn model_at(omega_10: f64, eps: f64) -> LadderModel {
    let fit = params_from_spectroscopy(omega_10, reference::ETA, &template(eps)).unwrap();
    LadderModel::new(&fit.params).unwrap()
}

fn reference_model() -> LadderModel {
    model_at(reference::omega_10(), 0.0)
}

/// 50-point sweep over the band where feature B resonates between roughly
/// n_c and 2 n_c.
const SWEEP_START: f64 = 5.24;
const SWEEP_STOP: f64 = 5.30;
const SWEEP_COUNT: usize = 50;

struct Sweep {
    entries: Vec<SweepEntry>,
    elapsed: Duration,
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let cfg = SweepConfig {
            template: template(reference::EPSILON_SYM),
            eta: reference::ETA,
            omega_10_grid: linspace(SWEEP_START, SWEEP_STOP, SWEEP_COUNT),
            families: vec![TransitionFamily::feature_b(), TransitionFamily::feature_a()],
            n_range: 0..800,
        };
        let start = Instant::now();
        let entries = sweep_qubit_frequency(&cfg, Execution::Parallel);
        Sweep {
            entries,
            elapsed: start.elapsed(),
        }
    })
}

/// Couplings per grid point for one family; `None` where no resonance was found.
fn couplings(family: TransitionFamily) -> Vec<Option<CouplingResult>> {
    sweep()
        .entries
        .iter()
        .filter(|e| e.family == family)
        .map(|e| match &e.outcome {
            SweepOutcome::Resonance(p) => Some(p.coupling.clone()),
            _ => None,
        })
        .collect()
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

#[test]
fn criterion_1_stark_calibration() {
    let start = Instant::now();
    let m = reference_model();
    let chi = dispersive_chi(m.spec(), m.params()).unwrap();
    let linear = 2.0 * chi;
    // small-n slope: least squares through the origin over n = 1..=5
    let (num, den) = (1..=5).fold((0.0, 0.0), |(num, den), n| {
        let s = stark_shift(&m, n, StarkConvention::Rezeroed).unwrap();
        (num + s * n as f64, den + (n * n) as f64)
    });
    let slope = num / den;
    let slope_err = (slope / linear - 1.0).abs();
    let s60 = stark_shift(&m, 60, StarkConvention::Rezeroed).unwrap();
    let deviation = (s60 - 60.0 * linear).abs() / (60.0 * linear).abs();
    let elapsed = start.elapsed();
    report(
        1,
        "Stark calibration",
        &[
            (
                "slope vs -2|chi|",
                slope_err < 0.10 && linear < 0.0,
                format!(
                    "slope {:.4} MHz, 2chi {:.4} MHz, rel err {:.3}",
                    slope * MHZ,
                    linear * MHZ,
                    slope_err
                ),
            ),
            (
                "deviation at n=60 > 5%",
                deviation > 0.05,
                format!("{:.3}", deviation),
            ),
            (
                "runtime < 5 s",
                elapsed < Duration::from_secs(5),
                format!("{:.2?}", elapsed),
            ),
        ],
    );
}

#[test]
fn criterion_2_feature_b_coupling() {
    let s = sweep();
    let b = couplings(TransitionFamily::feature_b());
    let found: Vec<&CouplingResult> = b.iter().flatten().collect();
    let (lo, hi) = range_of(found.iter().map(|c| c.g_eff_coh.abs() * MHZ));
    let band = found
        .iter()
        .all(|c| (0.3..=3.0).contains(&(c.g_eff_coh.abs() * MHZ)));
    let incoh = found.iter().all(|c| c.g_eff_incoh > c.g_eff_coh.abs());
    report(
        2,
        "feature-B coupling",
        &[
            (
                "resonance at every point",
                found.len() == SWEEP_COUNT,
                format!("{}/{SWEEP_COUNT}", found.len()),
            ),
            ("|g_coh| in 0.3-3 MHz", band, format!("{lo:.3}-{hi:.3} MHz")),
            (
                "g_incoh > |g_coh|",
                incoh,
                format!(
                    "min ratio {:.1}",
                    range_of(found.iter().map(|c| c.cancellation_ratio())).0
                ),
            ),
            (
                "50-point sweep < 60 s",
                s.elapsed < Duration::from_secs(60),
                format!("{:.2?}", s.elapsed),
            ),
        ],
    );
}

#[test]
fn criterion_3_feature_a_coupling() {
    let a = couplings(TransitionFamily::feature_a());
    let b = couplings(TransitionFamily::feature_b());
    let found: Vec<&CouplingResult> = a.iter().flatten().collect();
    let (lo, hi) = range_of(found.iter().map(|c| c.g_eff_coh.abs() * MHZ));
    let in_band = found
        .iter()
        .filter(|c| (1.0..=10.0).contains(&(c.g_eff_coh.abs() * MHZ)))
        .count();
    let (rlo, rhi) = range_of(found.iter().map(|c| c.cancellation_ratio()));
    let ratio_ok = found
        .iter()
        .all(|c| (1.0..=5.0).contains(&c.cancellation_ratio()));
    let matched: Vec<(f64, f64)> = a
        .iter()
        .zip(&b)
        .filter_map(|(a, b)| {
            Some((
                a.as_ref()?.cancellation_ratio(),
                b.as_ref()?.cancellation_ratio(),
            ))
        })
        .collect();
    let less = matched.iter().all(|(ra, rb)| ra < rb);
    report(
        3,
        "feature-A coupling (eps = 0.01)",
        &[
            (
                "resonance at every point",
                found.len() == SWEEP_COUNT,
                format!("{}/{SWEEP_COUNT}", found.len()),
            ),
            (
                "|g_coh| in 1-10 MHz",
                in_band == found.len(),
                format!("{lo:.3}-{hi:.3} MHz, {in_band}/{} in band", found.len()),
            ),
            ("incoh/coh in 1-5", ratio_ok, format!("{rlo:.2}-{rhi:.2}")),
            (
                "ratio A < ratio B at matched points",
                less && !matched.is_empty(),
                format!("{} matched points", matched.len()),
            ),
        ],
    );
}

#[test]
fn criterion_4_selection_rule() {
    let m = model_at(5.27, 0.0);
    let a = TransitionFamily::feature_a();
    let mut max_m1 = 0.0_f64;
    for n in [2, 10, 100, 300, 505] {
        let c = geff_coherent(&m, &a.at(n).unwrap()).unwrap();
        max_m1 = max_m1.max(c.g_eff_coh.abs()).max(c.g_eff_incoh);
    }
    let spec = m.spec();
    let mut max_even = 0.0_f64;
    for k in 0..=spec.k_max() {
        for kp in (k + 2..=spec.k_max()).step_by(2) {
            max_even = max_even.max(normalized_charge_coupling(spec, k, kp).unwrap().abs());
        }
    }
    report(
        4,
        "selection rule",
        &[
            (
                "eps = 0 gives m = 1 couplings exactly 0",
                max_m1 == 0.0,
                format!("max {max_m1:e}"),
            ),
            (
                "g_{k,k+2j} < 1e-10 g",
                max_even < 1e-10 * spec.g(),
                format!("max {:.2e} g", max_even / spec.g()),
            ),
        ],
    );
}

#[test]
fn criterion_5_cancellation_structure() {
    let (omega_10, n) = (5.27, 129);
    let m = model_at(omega_10, reference::EPSILON_SYM);
    let t = TransitionFamily::feature_b().at(n).unwrap();
    let initial = m.strip(t.initial_strip()).unwrap();
    let fin = m.strip(t.final_strip()).unwrap();
    let ci: Vec<f64> = (0..initial.dim())
        .map(|l| initial.coeff(t.k_i, l))
        .collect();
    let cf: Vec<f64> = (0..6).map(|l| fin.coeff(t.k_f, l)).collect();
    let alternating = cf.windows(2).all(|w| w[0] * w[1] < 0.0);
    let c = geff_coherent(&m, &t).unwrap();
    let signs: String = cf
        .iter()
        .map(|x| if *x > 0.0 { '+' } else { '-' })
        .collect();
    report(
        5,
        "cancellation structure at feature-B resonance",
        &[
            (
                "c_l^(0,n) > 0",
                ci.iter().all(|&x| x > 0.0),
                format!(
                    "min {:.3e}",
                    ci.iter().copied().fold(f64::INFINITY, f64::min)
                ),
            ),
            (
                "final coefficients alternate for l < 6",
                alternating,
                format!("signs {signs}"),
            ),
            (
                "|g_coh| < max |term|",
                c.g_eff_coh.abs() < c.max_abs_term(),
                format!(
                    "{:.3} vs {:.3} MHz",
                    c.g_eff_coh.abs() * MHZ,
                    c.max_abs_term() * MHZ
                ),
            ),
        ],
    );
}

#[test]
fn criterion_6_perturbative_oracle() {
    let omega_10 = 5.27;
    let m = model_at(omega_10, reference::EPSILON_SYM);
    let mut checks = Vec::new();
    for (name, family, n) in [
        ("B", TransitionFamily::feature_b(), 129),
        ("A", TransitionFamily::feature_a(), 505),
    ] {
        let t: TransitionSpec = family.at(n).unwrap();
        let coh = geff_coherent(&m, &t).unwrap().g_eff_coh.abs();
        let err = |lambda: f64| {
            let r = two_strip_splitting_oracle(&m, &t, lambda).unwrap();
            (r.coupling_estimate() / coh - 1.0).abs()
        };
        let errs = [err(0.3), err(0.1), err(0.03)];
        checks.push((
            if name == "B" {
                "B within 5% at lambda = 0.1"
            } else {
                "A within 5% at lambda = 0.1"
            },
            errs[1] < 0.05,
            format!("{:.2e}", errs[1]),
        ));
        checks.push((
            if name == "B" {
                "B monotone over 0.3, 0.1, 0.03"
            } else {
                "A monotone over 0.3, 0.1, 0.03"
            },
            errs[0] > errs[1] && errs[1] > errs[2],
            format!("{:.2e} > {:.2e} > {:.2e}", errs[0], errs[1], errs[2]),
        ));
    }
    report(6, "perturbative oracle", &checks);
}

#[test]
fn criterion_7_tls_anchors() {
    let m = reference_model();
    let tls = TlsSpec::new(10.0);
    let d = tls_crossing_diagram(&m, &tls, 0..400).unwrap();
    let c = d.crossing.expect("crossing in range");
    let ratio = c.n_star / d.n_c;
    let c3 = bare_amplitude(&m, c.n_res, 3).unwrap();
    let n17 = (1.7 * d.n_c).round() as usize;
    let c2 = bare_amplitude(&m, n17, 2).unwrap();
    let exact = crossing_frequency(&m, &tls, c.n_res).unwrap();
    report(
        7,
        "TLS anchors",
        &[
            (
                "crossing n/n_c = 1 +- 20%",
                (0.8..=1.2).contains(&ratio),
                format!("{ratio:.3}"),
            ),
            (
                "c_3 = 0.03 +- 50%",
                (0.015..=0.045).contains(&c3),
                format!("{c3:.4} at n = {}", c.n_res),
            ),
            (
                "c_2 = 0.2 +- 25% at 1.7 n_c",
                (0.15..=0.25).contains(&c2),
                format!("{c2:.4} at n = {n17}"),
            ),
            (
                "estimate < exact crossing",
                d.condition_estimate < exact,
                format!("{:.4} < {:.4} GHz", d.condition_estimate, exact),
            ),
        ],
    );
}

#[test]
fn criterion_8_numerical_properties() {
    let start = Instant::now();
    let mut checks = Vec::new();

    let m = model_at(5.27, reference::EPSILON_SYM);
    let (mut ortho, mut resid) = (0.0_f64, 0.0_f64);
    for n in 0..=600 {
        let s = m.strip(n).unwrap();
        let c = &s.coeffs;
        let gram = c * c.transpose();
        let id = nalgebra::DMatrix::<f64>::identity(s.dim(), s.dim());
        ortho = ortho.max((gram - id).amax());
        resid = resid.max(s.residual / s.hamiltonian_norm());
    }
    checks.push((
        "strip orthonormality 1e-10",
        ortho < 1e-10,
        format!("{ortho:.1e}"),
    ));
    checks.push((
        "eigen-residual 1e-9 relative",
        resid < 1e-9,
        format!("{resid:.1e}"),
    ));

    // independent residual through the public tridiagonal solver
    let (diag, off) = m.strip_hamiltonian(300);
    let eig = jcladder::eigen::tridiagonal_eigen(&diag, &off).unwrap();
    let r300 = tridiagonal_residual(&diag, &off, &eig);
    checks.push((
        "solver residual at N = 300",
        r300 < 1e-9 * diag.iter().fold(0.0_f64, |a, x| a.max(x.abs())),
        format!("{r300:.1e} GHz"),
    ));

    let p = *m.params();
    let base = solve_transmon(&p).unwrap();
    let doubled = solve_transmon(&p.with_truncation(p.k_max, 2 * p.charge_cutoff)).unwrap();
    let conv = base
        .levels
        .iter()
        .zip(&doubled.levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push((
        "cutoff doubling 1e-10",
        conv < 1e-10,
        format!("{conv:.1e} GHz"),
    ));

    // E_J/E_C = 50 holds seven levels below the doublets
    let spec50 =
        solve_transmon(&DeviceParams::new(0.2, 10.0, 6.9, 0.087).with_truncation(6, 30)).unwrap();
    let rel = |k: usize, offset: usize| {
        let num = normalized_charge_coupling(&spec50, k, k + offset).unwrap();
        let asy = asymptotic_coupling(&spec50, k, offset).unwrap();
        (num / asy - 1.0).abs()
    };
    let eq5: Vec<f64> = (0..=3).map(|k| rel(k, 1)).collect();
    let eq7: Vec<f64> = (0..=3).map(|k| rel(k, 3)).collect();
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{:.1}%", 100.0 * x))
            .collect::<Vec<_>>()
            .join("/")
    };
    checks.push((
        "g_{k,k+1} asymptotic within 2%, k <= 3",
        eq5.iter().all(|&e| e < 0.02),
        fmt(&eq5),
    ));
    checks.push((
        "g_{k,k+3} asymptotic within 15%, k <= 3",
        eq7.iter().all(|&e| e < 0.15),
        fmt(&eq7),
    ));

    let shifted = solve_transmon(&p.with_offset_charge(0.3)).unwrap();
    let shifted_1 = solve_transmon(&p.with_offset_charge(1.3)).unwrap();
    let period = shifted
        .levels
        .iter()
        .zip(&shifted_1.levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // levels of order E_J ~ 30 GHz; 1e-12 relative to them
    let scale = p.e_j;
    checks.push((
        "n_g periodicity 1e-12",
        period < 1e-12 * scale,
        format!("{:.1e} relative", period / scale),
    ));

    let cfg = SweepConfig {
        template: template(reference::EPSILON_SYM),
        eta: reference::ETA,
        omega_10_grid: linspace(5.24, 5.30, 4),
        families: vec![TransitionFamily::feature_b(), TransitionFamily::feature_a()],
        n_range: 0..800,
    };
    let first = format!("{:?}", sweep_qubit_frequency(&cfg, Execution::Parallel));
    let again = format!("{:?}", sweep_qubit_frequency(&cfg, Execution::Parallel));
    let seq = format!("{:?}", sweep_qubit_frequency(&cfg, Execution::Sequential));
    checks.push((
        "determinism",
        first == again && first == seq,
        "parallel x2 and sequential identical".into(),
    ));

    let elapsed = start.elapsed();
    checks.push((
        "suite < 2 min",
        elapsed < Duration::from_secs(120),
        format!("{elapsed:.2?}"),
    ));
    report(8, "numerical property suite", &checks);
}
