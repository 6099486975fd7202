//! Subcommand dispatch and artifact writing for the `jcladder` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_config, RunConfig};
use crate::coupling::geff_coherent;
use crate::error::{Error, Result};
use crate::ladder::{
    critical_photon_number, dispersive_chi, fan_frequency, stark_shift, LadderModel,
};
use crate::oracle::two_strip_splitting_oracle;
use crate::resonance::{resonance_point, sweep_qubit_frequency, SweepConfig, SweepOutcome};
use crate::table::{Cell, Table};
use crate::tls::{crossing_frequency, tls_crossing_diagram};
use crate::transmon::solve_transmon;
use crate::Execution;

pub const SPECTRUM_COLUMNS: &[&str] = &["k", "E_k_GHz", "omega_k0_GHz"];
pub const STARK_COLUMNS: &[&str] = &["n", "stark_shift_GHz", "linear_ref_GHz"];
pub const FAN_COLUMNS: &[&str] = &["n_total", "k", "fan_freq_GHz"];
pub const GEFF_COLUMNS: &[&str] = &[
    "omega_10_GHz",
    "n_res",
    "geff_coh_MHz",
    "geff_incoh_MHz",
    "transition_tag",
];
pub const SWEEP_COLUMNS: &[&str] = &[
    "omega_10_GHz",
    "delta_GHz",
    "transition_tag",
    "n_star",
    "n_res",
    "geff_coh_MHz",
    "geff_incoh_MHz",
    "n_c",
];
pub const TLS_COLUMNS: &[&str] = &["n", "E_initial_GHz", "E_final_GHz", "n_over_nc"];
pub const TLS_SUMMARY_COLUMNS: &[&str] = &[
    "omega_tls_GHz",
    "n_star",
    "n_res",
    "n_star_over_nc",
    "condition_estimate_GHz",
    "exact_crossing_GHz",
];
pub const ORACLE_COLUMNS: &[&str] = &[
    "transition_tag",
    "n_res",
    "lambda",
    "splitting_GHz",
    "oracle_coupling_MHz",
    "geff_coh_MHz",
    "relative_error",
    "branch_weight",
];

const MHZ: f64 = 1e3;

/// Beyond-RWA Jaynes-Cummings ladder tools. All frequencies are in GHz
/// (ordinary frequency, omega/2pi); couplings in CSV output are in MHz.
#[derive(Debug, Parser)]
#[command(name = "jcladder", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir` in the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Transmon levels E_k and transition frequencies omega_k0.
    Spectrum,
    /// ac Stark shift of the 0-1 transition versus photon number.
    Stark,
    /// Fan diagram: E(|k, N-k>) - N omega_r over the strip range.
    Fan,
    /// Effective couplings at the configured device point.
    Geff,
    /// Resonance photon numbers and couplings over the omega_10 sweep.
    ResonanceSweep,
    /// Composite-level crossing diagram with a spectator TLS.
    Tls,
    /// Two-strip splitting oracle at each configured lambda.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Stark => "stark",
            Command::Fan => "fan",
            Command::Geff => "geff",
            Command::ResonanceSweep => "resonance-sweep",
            Command::Tls => "tls",
            Command::Oracle => "oracle",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Command::ResonanceSweep => "resonance_sweep",
            other => other.name(),
        }
    }
}

/// Tables produced by one subcommand plus its one-line summary.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub tables: Vec<(String, Table)>,
    pub summary: String,
}

fn model(cfg: &RunConfig) -> Result<LadderModel> {
    LadderModel::new(&cfg.device_params()?)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Artifacts> {
    let spec = solve_transmon(&cfg.device_params()?)?;
    let mut t = Table::new(SPECTRUM_COLUMNS);
    for (k, &e) in spec.levels.iter().enumerate() {
        t.push(vec![k.into(), e.into(), spec.omega(k, 0).into()]);
    }
    let summary = format!(
        "spectrum: {} levels, omega_10 = {:.6} GHz, eta = {:.6} GHz",
        t.len(),
        spec.omega_10,
        spec.eta
    );
    Ok(Artifacts {
        tables: vec![("spectrum".into(), t)],
        summary,
    })
}

pub fn stark(cfg: &RunConfig) -> Result<Artifacts> {
    let m = model(cfg)?;
    let chi = dispersive_chi(m.spec(), m.params())?;
    let mut t = Table::new(STARK_COLUMNS);
    for n in cfg.n_range.clone() {
        let shift = stark_shift(&m, n, cfg.stark_convention)?;
        t.push(vec![n.into(), shift.into(), (2.0 * chi * n as f64).into()]);
    }
    let summary = format!("stark: {} rows, chi = {:.6} MHz", t.len(), chi * MHZ);
    Ok(Artifacts {
        tables: vec![("stark".into(), t)],
        summary,
    })
}

pub fn fan(cfg: &RunConfig) -> Result<Artifacts> {
    let m = model(cfg)?;
    m.prefetch(
        *cfg.n_total_range.start()..*cfg.n_total_range.end() + 1,
        Execution::Parallel,
    )?;
    let mut t = Table::new(FAN_COLUMNS);
    for n_total in cfg.n_total_range.clone() {
        for k in 0..=n_total.min(m.k_max()) {
            t.push(vec![
                n_total.into(),
                k.into(),
                fan_frequency(&m, k, n_total)?.into(),
            ]);
        }
    }
    let summary = format!("fan: {} rows over N = {:?}", t.len(), cfg.n_total_range);
    Ok(Artifacts {
        tables: vec![("fan".into(), t)],
        summary,
    })
}

fn n_scan(cfg: &RunConfig) -> std::ops::Range<usize> {
    *cfg.n_range.start()..*cfg.n_range.end() + 1
}

pub fn geff(cfg: &RunConfig) -> Result<Artifacts> {
    let m = model(cfg)?;
    let mut t = Table::new(GEFF_COLUMNS);
    let mut found = 0;
    for family in &cfg.transitions {
        let row = match resonance_point(&m, family, n_scan(cfg))? {
            Some(p) => {
                found += 1;
                vec![
                    p.omega_10.into(),
                    p.n_res.into(),
                    (p.coupling.g_eff_coh * MHZ).into(),
                    (p.coupling.g_eff_incoh * MHZ).into(),
                    family.to_string().into(),
                ]
            }
            None => vec![
                m.spec().omega_10.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                family.to_string().into(),
            ],
        };
        t.push(row);
    }
    let summary = format!(
        "geff: {found}/{} transitions resonant in n = {:?}",
        cfg.transitions.len(),
        cfg.n_range
    );
    Ok(Artifacts {
        tables: vec![("geff".into(), t)],
        summary,
    })
}

pub fn resonance_sweep(cfg: &RunConfig, exec: Execution) -> Result<Artifacts> {
    let grid = cfg.sweep.as_ref().ok_or_else(|| Error::Config {
        path: "sweep".into(),
        reason: "resonance-sweep requires a [sweep] block".into(),
    })?;
    let sweep = SweepConfig {
        template: cfg.template,
        eta: cfg.sweep_eta()?,
        omega_10_grid: grid.points(),
        families: cfg.transitions.clone(),
        n_range: n_scan(cfg),
    };
    let entries = sweep_qubit_frequency(&sweep, exec);
    let mut t = Table::new(SWEEP_COLUMNS);
    let (mut gaps, mut misses) = (0, 0);
    for e in &entries {
        match &e.outcome {
            SweepOutcome::Resonance(p) => t.push(vec![
                p.omega_10.into(),
                p.delta.into(),
                e.family.to_string().into(),
                p.n_star.into(),
                p.n_res.into(),
                (p.coupling.g_eff_coh * MHZ).into(),
                (p.coupling.g_eff_incoh * MHZ).into(),
                p.n_c.into(),
            ]),
            SweepOutcome::NoCrossing => misses += 1,
            SweepOutcome::Gap(_) => gaps += 1,
        }
    }
    let summary = format!(
        "resonance-sweep: {} grid points x {} transitions -> {} rows ({misses} without crossing, {gaps} failed)",
        grid.count,
        cfg.transitions.len(),
        t.len()
    );
    Ok(Artifacts {
        tables: vec![("resonance_sweep".into(), t)],
        summary,
    })
}

pub fn tls(cfg: &RunConfig) -> Result<Artifacts> {
    let spec = cfg.tls.ok_or_else(|| Error::Config {
        path: "tls".into(),
        reason: "tls requires a [tls] block".into(),
    })?;
    let m = model(cfg)?;
    let d = tls_crossing_diagram(&m, &spec, n_scan(cfg))?;
    let mut rows = Table::new(TLS_COLUMNS);
    for r in &d.rows {
        rows.push(vec![
            r.n.into(),
            r.e_initial.into(),
            r.e_final.into(),
            r.n_over_nc.into(),
        ]);
    }
    let mut summary_table = Table::new(TLS_SUMMARY_COLUMNS);
    let exact = d
        .crossing
        .map(|c| crossing_frequency(&m, &spec, c.n_res))
        .transpose()?;
    summary_table.push(vec![
        spec.omega_tls.into(),
        d.crossing.map(|c| c.n_star).into(),
        d.crossing.map(|c| c.n_res).into(),
        d.crossing_n_over_nc().into(),
        d.condition_estimate.into(),
        exact.into(),
    ]);
    let summary = match d.crossing {
        Some(c) => format!(
            "tls: crossing at n* = {:.3} (n/n_c = {:.3}), estimate {:.6} GHz",
            c.n_star,
            c.n_star / d.n_c,
            d.condition_estimate
        ),
        None => format!(
            "tls: no crossing in n = {:?}, estimate {:.6} GHz",
            cfg.n_range, d.condition_estimate
        ),
    };
    Ok(Artifacts {
        tables: vec![("tls".into(), rows), ("tls_summary".into(), summary_table)],
        summary,
    })
}

pub fn oracle(cfg: &RunConfig) -> Result<Artifacts> {
    let m = model(cfg)?;
    let mut t = Table::new(ORACLE_COLUMNS);
    for family in &cfg.transitions {
        let Some(p) = resonance_point(&m, family, n_scan(cfg))? else {
            continue;
        };
        let transition = family.at(p.n_res).expect("resonance above threshold");
        let coh = geff_coherent(&m, &transition)?.g_eff_coh.abs();
        for &lambda in &cfg.oracle_lambdas {
            let r = two_strip_splitting_oracle(&m, &transition, lambda)?;
            t.push(vec![
                family.to_string().into(),
                p.n_res.into(),
                lambda.into(),
                r.splitting.into(),
                (r.coupling_estimate() * MHZ).into(),
                (coh * MHZ).into(),
                (r.coupling_estimate() / coh - 1.0).into(),
                r.branch_weight.into(),
            ]);
        }
    }
    let summary = format!("oracle: {} rows", t.len());
    Ok(Artifacts {
        tables: vec![("oracle".into(), t)],
        summary,
    })
}

pub fn artifacts(command: Command, cfg: &RunConfig) -> Result<Artifacts> {
    match command {
        Command::Spectrum => spectrum(cfg),
        Command::Stark => stark(cfg),
        Command::Fan => fan(cfg),
        Command::Geff => geff(cfg),
        Command::ResonanceSweep => resonance_sweep(cfg, Execution::Parallel),
        Command::Tls => tls(cfg),
        Command::Oracle => oracle(cfg),
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    config: String,
    files: Vec<(String, usize)>,
    summary: &'a str,
    n_c: Option<f64>,
}

/// Writes `<name>.csv` for each table and a `<command>.meta.json` sidecar;
/// returns the summary line.
pub fn write_artifacts(
    command: Command,
    cfg: &RunConfig,
    config_path: &Path,
    out: &Path,
) -> Result<String> {
    let art = artifacts(command, cfg)?;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    for (name, table) in &art.tables {
        let file = format!("{name}.csv");
        fs::write(out.join(&file), table.to_csv()?)?;
        files.push((file, table.len()));
    }
    let n_c = cfg
        .device_params()
        .ok()
        .and_then(|p| solve_transmon(&p).ok().map(|s| (p, s)))
        .and_then(|(p, s)| critical_photon_number(&p, &s).ok());
    let sidecar = Sidecar {
        tool: "jcladder",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: command.name(),
        config: config_path.display().to_string(),
        files,
        summary: &art.summary,
        n_c,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(
        out.join(format!("{}.meta.json", command.file_stem())),
        json + "\n",
    )?;
    Ok(art.summary)
}

/// Entry point behind `main`; returns the summary line.
pub fn run(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        path: "--config".into(),
        reason: "a configuration file is required".into(),
    })?;
    let cfg = load_config(path)?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    write_artifacts(cli.command, &cfg, path, &out)
}
