//! Effective couplings between dressed states of different RWA strips.
//!
//! The non-RWA interaction is expanded in the bare basis of both strips and
//! evaluated path by path. For a next-nearest strip (offset 2) a bare state
//! `|l, p>` of the initial strip connects to
//!
//! * `|l+1, p+1>` through `g_{l,l+1} sqrt(p+1)` (counter-rotating term), and
//! * `|l+3, p-1>` through `g_{l,l+3} sqrt(p)`.
//!
//! For a nearest strip (offset 1) it connects to `|l+2, p-1>` through the
//! symmetry-breaking `g_{l,l+2} sqrt(p)` with `g_{l,l+2} = eps g sqrt((l+1)(l+2))`.
//! Each path is weighted by `c_l^{(i)} c_{l'}^{(f)}`; the coherent coupling is
//! the signed sum of the paths and the incoherent one their root-sum-square.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::LadderModel;
use crate::transmon::{broken_symmetry_coupling, normalized_charge_coupling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StripOffset {
    /// Total excitation changes by 1; needs the broken-symmetry terms.
    Nearest,
    /// Total excitation changes by 2.
    NextNearest,
}

impl StripOffset {
    pub fn value(self) -> usize {
        match self {
            StripOffset::Nearest => 1,
            StripOffset::NextNearest => 2,
        }
    }

    pub fn from_value(m: i64) -> Result<Self> {
        match m {
            1 => Ok(StripOffset::Nearest),
            2 => Ok(StripOffset::NextNearest),
            other => Err(Error::InvalidStripOffset(other)),
        }
    }
}

/// `|k_i, n_i>` (dressed) to `|k_f, n_f>` (dressed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransitionSpec {
    pub k_i: usize,
    pub n_i: usize,
    pub k_f: usize,
    pub n_f: usize,
}

impl TransitionSpec {
    pub fn new(k_i: usize, n_i: usize, k_f: usize, n_f: usize) -> Self {
        Self { k_i, n_i, k_f, n_f }
    }

    pub fn initial_strip(&self) -> usize {
        self.k_i + self.n_i
    }

    pub fn final_strip(&self) -> usize {
        self.k_f + self.n_f
    }

    pub fn offset(&self) -> Result<StripOffset> {
        StripOffset::from_value(self.final_strip() as i64 - self.initial_strip() as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PathFamily {
    /// g_{l,l+1}, counter-rotating.
    Single,
    /// g_{l,l+3}.
    Triple,
    /// g_{l,l+2}, broken symmetry.
    Double,
}

impl PathFamily {
    pub fn level_step(self) -> usize {
        match self {
            PathFamily::Single => 1,
            PathFamily::Double => 2,
            PathFamily::Triple => 3,
        }
    }
}

impl fmt::Display for PathFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PathFamily::Single => "g(l,l+1)",
            PathFamily::Triple => "g(l,l+3)",
            PathFamily::Double => "g(l,l+2)",
        };
        f.write_str(s)
    }
}

/// One bare-basis matrix element of the non-RWA block, `<l', p'| V |l, p>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareLink {
    pub family: PathFamily,
    /// Transmon level in the initial strip.
    pub l: usize,
    /// Transmon level in the final strip.
    pub l_final: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathTerm {
    pub l: usize,
    pub family: PathFamily,
    /// c_l^{(i)} * amplitude * c_{l'}^{(f)}, GHz.
    pub contribution: f64,
    pub initial_coeff: f64,
    pub final_coeff: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingResult {
    pub transition: TransitionSpec,
    pub terms: Vec<PathTerm>,
    pub g_eff_coh: f64,
    pub g_eff_incoh: f64,
}

impl CouplingResult {
    fn from_terms(transition: TransitionSpec, terms: Vec<PathTerm>) -> Self {
        let g_eff_coh = terms.iter().map(|t| t.contribution).sum();
        let g_eff_incoh = terms
            .iter()
            .map(|t| t.contribution * t.contribution)
            .sum::<f64>()
            .sqrt();
        Self {
            transition,
            terms,
            g_eff_coh,
            g_eff_incoh,
        }
    }

    pub fn max_abs_term(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.contribution.abs())
            .fold(0.0, f64::max)
    }

    pub fn sum_abs_terms(&self) -> f64 {
        self.terms.iter().map(|t| t.contribution.abs()).sum()
    }

    /// g_eff_incoh / |g_eff_coh|; large values mean strong path cancellation.
    pub fn cancellation_ratio(&self) -> f64 {
        self.g_eff_incoh / self.g_eff_coh.abs()
    }
}

/// Bare links from strip `n_initial` to strip `n_initial + offset`, ordered by
/// (family, l).
pub fn nonrwa_links(
    model: &LadderModel,
    n_initial: usize,
    offset: StripOffset,
) -> Result<Vec<BareLink>> {
    let k_max = model.k_max();
    let dim_i = n_initial.min(k_max) + 1;
    let dim_f = (n_initial + offset.value()).min(k_max) + 1;
    let spec = model.spec();
    let families: &[PathFamily] = match offset {
        StripOffset::NextNearest => &[PathFamily::Single, PathFamily::Triple],
        StripOffset::Nearest => &[PathFamily::Double],
    };
    let mut links = Vec::new();
    for &family in families {
        for l in 0..dim_i {
            let l_final = l + family.level_step();
            if l_final >= dim_f {
                continue;
            }
            let photons = (n_initial - l) as f64;
            let amplitude = match family {
                PathFamily::Single => {
                    normalized_charge_coupling(spec, l, l_final)? * (photons + 1.0).sqrt()
                }
                PathFamily::Triple => {
                    if photons < 1.0 {
                        continue;
                    }
                    normalized_charge_coupling(spec, l, l_final)? * photons.sqrt()
                }
                PathFamily::Double => {
                    if photons < 1.0 {
                        continue;
                    }
                    broken_symmetry_coupling(spec, l, model.params().epsilon_sym)? * photons.sqrt()
                }
            };
            links.push(BareLink {
                family,
                l,
                l_final,
                amplitude,
            });
        }
    }
    Ok(links)
}

/// Per-path contributions, ordered by (family, l).
pub fn path_terms(model: &LadderModel, t: &TransitionSpec) -> Result<Vec<PathTerm>> {
    let offset = t.offset()?;
    let initial = model.strip(t.initial_strip())?;
    let fin = model.strip(t.final_strip())?;
    for (label, strip) in [(t.k_i, &initial), (t.k_f, &fin)] {
        if label >= strip.dim() {
            return Err(Error::LabelUnavailable {
                label,
                n_total: strip.n_total,
                dim: strip.dim(),
            });
        }
    }
    let links = nonrwa_links(model, t.initial_strip(), offset)?;
    Ok(links
        .into_iter()
        .map(|link| {
            let ci = initial.coeff(t.k_i, link.l);
            let cf = fin.coeff(t.k_f, link.l_final);
            PathTerm {
                l: link.l,
                family: link.family,
                contribution: ci * link.amplitude * cf,
                initial_coeff: ci,
                final_coeff: cf,
                amplitude: link.amplitude,
            }
        })
        .collect())
}

pub fn geff_coherent(model: &LadderModel, t: &TransitionSpec) -> Result<CouplingResult> {
    Ok(CouplingResult::from_terms(*t, path_terms(model, t)?))
}

/// Same term list as [`geff_coherent`]; the result carries both sums.
pub fn geff_incoherent(model: &LadderModel, t: &TransitionSpec) -> Result<CouplingResult> {
    geff_coherent(model, t)
}
