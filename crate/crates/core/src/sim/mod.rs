//! Random superposition code, likelihood encoder, typicality decoder and
//! small-blocklength metrics.
//!
//! Every simulation runs on the composite (plugged) form of the design, so a
//! causal design's codewords carry the embedded state where the mode puts it.

mod codebook;
mod covering;
mod decoder;
mod encoder;
mod trials;

pub use codebook::{generate_codebook, Codebook};
pub use covering::{
    covering_bound, gallager_e0, lemma_thresholds, soft_cover_divergence, soft_cover_exact,
    CoverEstimate, CoverMode, CoveringBound,
};
pub use decoder::{typicality_decode, DecodeOutcome, Decoded};
pub use encoder::{
    causal_encode, causal_outcome_law, generate_input, likelihood_encode, likelihood_law,
    likelihood_outcome_law, likelihood_weights, state_substituted, CausalEncoder, Indices,
};
pub use trials::{
    evaluate_code, run_trials, DecodeFailures, Halfwidths, SimMode, SimOptions, SimReport, Sizes,
};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::scheme::{JointSystem, SchemeMode, VarSet};

/// Default limit on enumerated outcomes, codebook entries and atom counts.
pub const DEFAULT_GUARD: u128 = 1 << 24;

/// Rates in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "RK")]
    pub rk: f64,
    #[serde(rename = "RM")]
    pub rm: f64,
}

impl Rates {
    pub fn new(r1: f64, r2: f64, rk: f64, rm: f64) -> Self {
        Rates { r1, r2, rk, rm }
    }
}

/// `⌈2^{nR}⌉`, with a small slack so exact powers of two are not rounded up.
pub fn index_size(n: usize, rate: f64) -> Result<usize> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rate {rate} must be finite and non-negative"
        )));
    }
    let size = (2f64.powf(n as f64 * rate) - 1e-9).ceil().max(1.0);
    if size > usize::MAX as f64 / 2.0 {
        return Err(Error::GuardExceeded {
            needed: u128::MAX,
            guard: DEFAULT_GUARD,
        });
    }
    Ok(size as usize)
}

/// Conditional laws of a design in the form the code needs.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CodeLaw {
    pub source_mode: SchemeMode,
    /// `[|S|, |U|, |V|, |X|, |Y|, |Z|]` of the composite design.
    pub dims: [usize; 6],
    pub p_s: Vec<f64>,
    pub p_u: Vec<f64>,
    /// `[u][v]`
    pub v_given_u: Vec<f64>,
    /// `[u][v][s]`; zero rows where `p(u, v) = 0`.
    pub s_given_uv: Vec<f64>,
    /// `[s][u][v][x]`; uniform rows where `p(s, u, v) = 0`.
    pub x_given_suv: Vec<f64>,
    /// `[u][v][y]`
    pub p_uvy: Vec<f64>,
}

fn conditional(joint: &[f64], cond: usize, out: usize, filler: f64) -> Vec<f64> {
    let mut res = vec![filler; cond * out];
    for (c, row) in joint.chunks(out).enumerate() {
        let t: f64 = row.iter().sum();
        if t > 0.0 {
            for (o, &p) in row.iter().enumerate() {
                res[c * out + o] = p / t;
            }
        }
    }
    res
}

impl CodeLaw {
    pub fn from_joint(j: &JointSystem) -> Self {
        let eff = j.plugged();
        let dims = eff.dims();
        let [s_n, u_n, v_n, x_n, ..] = dims;
        let (s, u, v, x, y) = (VarSet::S, VarSet::U, VarSet::V, VarSet::X, VarSet::Y);
        let p_uv = eff.marginal(u | v);
        let p_uvs = marginal_reordered(&eff.marginal(s | u | v), s_n, u_n * v_n);
        CodeLaw {
            source_mode: j.mode(),
            dims,
            p_s: eff.marginal(s),
            p_u: eff.marginal(u),
            v_given_u: conditional(&p_uv, u_n, v_n, 0.0),
            s_given_uv: conditional(&p_uvs, u_n * v_n, s_n, 0.0),
            x_given_suv: conditional(
                &eff.marginal(s | u | v | x),
                s_n * u_n * v_n,
                x_n,
                1.0 / x_n as f64,
            ),
            p_uvy: eff.marginal(u | v | y),
        }
    }

    pub fn w(&self, s: usize, u: usize, v: usize) -> f64 {
        let [s_n, _, v_n, ..] = self.dims;
        self.s_given_uv[(u * v_n + v) * s_n + s]
    }

    pub fn x_row(&self, s: usize, u: usize, v: usize) -> &[f64] {
        let [_, u_n, v_n, x_n, ..] = self.dims;
        let r = (s * u_n + u) * v_n + v;
        &self.x_given_suv[r * x_n..(r + 1) * x_n]
    }

    /// Whether the second layer embeds the state as `V' = (S, V)`.
    pub fn embeds_state_in_v(&self) -> bool {
        matches!(
            self.source_mode,
            SchemeMode::Case2 | SchemeMode::Case2A | SchemeMode::Case2B
        )
    }

    /// `|V|` before the state was embedded.
    pub fn inner_v(&self) -> usize {
        if self.embeds_state_in_v() {
            self.dims[2] / self.dims[0]
        } else {
            self.dims[2]
        }
    }
}

/// Transposes a `[a][b]` table into `[b][a]`.
fn marginal_reordered(p_ab: &[f64], a: usize, b: usize) -> Vec<f64> {
    let mut out = vec![0.0; a * b];
    for i in 0..a {
        for k in 0..b {
            out[k * a + i] = p_ab[i * b + k];
        }
    }
    out
}

/// Digits of `idx` in base `base`, most significant first.
pub(crate) fn digits(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for slot in d.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    d
}

/// Index of a sequence, most significant symbol first.
pub(crate) fn seq_index(seq: &[usize], base: usize) -> usize {
    seq.iter().fold(0, |acc, &d| acc * base + d)
}

/// Law of an independent sequence with per-symbol laws `laws[t]`.
pub(crate) fn product_law(laws: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![1.0];
    for law in laws {
        let mut next = Vec::with_capacity(out.len() * law.len());
        for &p in &out {
            next.extend(law.iter().map(|&q| p * q));
        }
        out = next;
    }
    out
}

pub(crate) fn checked_pow(base: usize, n: usize) -> u128 {
    (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

pub(crate) fn guard_check(needed: u128, guard: u128) -> Result<()> {
    if needed > guard {
        Err(Error::GuardExceeded { needed, guard })
    } else {
        Ok(())
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    WeightedIndex::new(weights).ok().map(|d| d.sample(rng))
}

/// Passes `x_seq` through the channel under `s_seq`, one symbol at a time.
pub fn channel_transmit(
    ch: &WiretapChannel,
    s_seq: &[usize],
    x_seq: &[usize],
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if s_seq.len() != x_seq.len() {
        return Err(Error::Dimension(format!(
            "state sequence has length {}, input sequence {}",
            s_seq.len(),
            x_seq.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    transmit_with(ch, s_seq, x_seq, &mut rng)
}

pub(crate) fn transmit_with(
    ch: &WiretapChannel,
    s_seq: &[usize],
    x_seq: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let [s_n, x_n, _, z_n] = ch.dims();
    let mut ys = Vec::with_capacity(s_seq.len());
    let mut zs = Vec::with_capacity(s_seq.len());
    for (&s, &x) in s_seq.iter().zip(x_seq) {
        if s >= s_n || x >= x_n {
            return Err(Error::Dimension(format!(
                "symbol (s={s}, x={x}) out of range"
            )));
        }
        let yz = sample_index(ch.row(s, x), rng).expect("channel rows are distributions");
        ys.push(yz / z_n);
        zs.push(yz % z_n);
    }
    Ok((ys, zs))
}
