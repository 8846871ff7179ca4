use alloc::vec::Vec;

use super::family::{HardFamily, Sign};
use super::rounds::{tau, zeta};
use crate::collab::CollabRun;
use crate::error::{Error, Result};
use crate::math;
use crate::transcript::{Entry, Transcript};

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// `Proj_k(γ, ℓ)`.
    pub proj: Transcript,
    /// `Last_k(γ, ℓ)`: the final agent-`k` segment of `proj`.
    pub last: Transcript,
    pub tau: usize,
    pub zeta: f64,
    /// `⌊ζ_ℓ⌋`, the segment length asked for.
    pub zeta_len: u64,
    /// `⌊ζ_ℓ⌋ = 0`: the constants leave no room for a final segment.
    pub collapsed: bool,
    /// The round ended before `⌊ζ_ℓ⌋` pulls.
    pub truncated: bool,
    /// `|proj| <= K·t_{τ−1} + ζ_ℓ`.
    pub budget_ok: bool,
}

fn round_entries(transcript: &Transcript, round: u32) -> impl Iterator<Item = &Entry> {
    transcript.iter().filter(move |e| e.round == round)
}

/// Builds `Proj_k(γ, ℓ)` and `Last_k(γ, ℓ)` for agent `k` (0-based).
///
/// Rounds before `τ(γ, ℓ)` are interleaved across agents by within-round
/// position; then agent `k`'s first `min(⌊ζ_ℓ⌋, m)` entries of round `τ`
/// are appended.
pub fn project_transcript(run: &CollabRun, k: usize, ell: u32, family: &HardFamily, rounds: u32) -> Result<Projection> {
    if k >= run.agents {
        return Err(Error::AgentOutOfRange {
            agent: k,
            agents: run.agents,
        });
    }
    if ell == 0 || ell > family.levels {
        return Err(Error::NotInFamily { ell });
    }
    let tau = tau(run, family, ell).ok_or(Error::NoRoundForLevel { ell })?;
    let zeta = zeta(family, ell, rounds);
    let zeta_len = if zeta.is_finite() {
        math::floor(zeta) as u64
    } else {
        u64::MAX
    };

    let mut proj = Transcript::new();
    for round in 1..tau as u32 {
        let per_agent: Vec<Vec<&Entry>> = run
            .per_agent_transcripts
            .iter()
            .map(|t| round_entries(t, round).collect())
            .collect();
        let longest = per_agent.iter().map(Vec::len).max().unwrap_or(0);
        for i in 0..longest {
            for entries in &per_agent {
                if let Some(&&e) = entries.get(i) {
                    proj.push(e);
                }
            }
        }
    }

    let available: Vec<Entry> = round_entries(&run.per_agent_transcripts[k], tau as u32)
        .copied()
        .collect();
    let take = (available.len() as u64).min(zeta_len) as usize;
    let last: Transcript = available[..take].iter().copied().collect();
    proj.extend_from(&last);

    let (num, den) = run.boundary(tau - 1);
    let budget = run.agents as f64 * num as f64 / den as f64 + zeta;
    Ok(Projection {
        budget_ok: proj.len() as f64 <= budget,
        proj,
        last,
        tau,
        zeta,
        zeta_len,
        collapsed: zeta_len == 0,
        truncated: (take as u64) < zeta_len,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedRegret {
    /// `Σ_k Reg(I_ℓ^+, Last_k)`.
    pub u: f64,
    /// `Σ_k Reg(I_ℓ^−, Last_k)`.
    pub v: f64,
    pub bound: f64,
    pub full_length: bool,
    pub holds: bool,
}

/// Regret of the final segments under the critical pair `I_ℓ^±`.
///
/// With every segment of length `zeta_len` the bound is `K·Δ_ℓ·zeta_len`;
/// otherwise it relaxes to `Δ_ℓ` times the total segment length.
pub fn paired_regret_lower(
    segments: &[Transcript],
    family: &HardFamily,
    ell: u32,
    zeta_len: u64,
) -> Result<PairedRegret> {
    if ell == 0 || ell > family.levels {
        return Err(Error::NotInFamily { ell });
    }
    let plus = family.input(ell, Sign::Plus);
    let minus = family.input(ell, Sign::Minus);
    let mut u = 0.0;
    let mut v = 0.0;
    let mut total = 0u64;
    for segment in segments {
        let counts = segment.arm_counts(2)?;
        u += plus.regret_from_counts(&counts);
        v += minus.regret_from_counts(&counts);
        total += segment.len() as u64;
    }
    let gap = family.gap(ell);
    let full_length = segments.iter().all(|s| s.len() as u64 == zeta_len);
    let bound = if full_length {
        segments.len() as f64 * gap * zeta_len as f64
    } else {
        gap * total as f64
    };
    Ok(PairedRegret {
        u,
        v,
        bound,
        full_length,
        holds: u + v >= bound * (1.0 - 1e-12),
    })
}
