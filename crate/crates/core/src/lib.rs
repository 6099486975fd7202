//! Beyond-RWA Jaynes-Cummings ladder of a transmon coupled to a resonator.
//!
//! Frequencies are in GHz (ordinary, not angular). The pipeline runs
//! charge-basis transmon spectrum -> RWA strips -> inter-strip couplings ->
//! resonance search, with the TLS diagram and the splitting oracle on the side.

pub mod cli;
pub mod config;
pub mod coupling;
pub mod eigen;
pub mod error;
pub mod ladder;
pub mod oracle;
pub mod params;
pub mod resonance;
pub mod table;
pub mod tls;
pub mod transmon;

pub use coupling::{
    geff_coherent, geff_incoherent, CouplingResult, PathFamily, StripOffset, TransitionSpec,
};
pub use error::{Error, Result};
pub use ladder::{
    critical_photon_number, dispersive_chi, dressed_energy, fan_frequency, stark_shift,
    LadderModel, StarkConvention,
};
pub use oracle::{two_strip_splitting_oracle, OracleResult};
pub use params::DeviceParams;
pub use resonance::{
    find_resonant_photon_number, sweep_qubit_frequency, SweepConfig, TransitionFamily,
};
pub use tls::{bare_amplitude, tls_crossing_diagram, tls_resonance_condition, TlsSpec};
pub use transmon::{params_from_spectroscopy, solve_transmon, TransmonSpectrum};

/// How independent jobs (strips, sweep points) are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon thread pool; identical to `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

/// Order-preserving map over independent jobs.
pub fn par_map<T, R, F>(items: Vec<T>, exec: Execution, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}
