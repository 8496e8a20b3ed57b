use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::decoder::{typicality_decode, DecodeOutcome};
use super::encoder::{encode_with, generate_input, likelihood_weights};
use super::{
    checked_pow, digits, guard_check, product_law, sample_index, seq_index, stream_rng,
    transmit_with, Codebook, Rates, DEFAULT_GUARD,
};
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::info::{kl_slice, mutual_information, tv_slice, Tensor};
use crate::scheme::JointSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// `None` picks exact mode when the enumeration fits the guard.
    pub mode: Option<SimMode>,
    /// Typicality tolerance of the decoder.
    pub eps: f64,
    pub guard: u128,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            mode: None,
            eps: 0.1,
            guard: DEFAULT_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Halfwidths {
    pub error_prob: f64,
    pub key_tv: f64,
    pub leakage_bits: f64,
    pub covering_div_bits: f64,
}

/// Probabilities of the two decoder failure kinds, averaged over messages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeFailures {
    pub no_match: f64,
    pub multiple: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sizes {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

/// Reliability, key uniformity, leakage and covering metrics of one code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub n: usize,
    pub rates: Rates,
    pub sizes: Sizes,
    /// Max over messages (exact) or average over uniform messages (Monte Carlo).
    pub error_prob: f64,
    /// Max over messages of `TV(p_{K|M=m}, uniform)` given successful encoding.
    pub key_tv: f64,
    /// `I(MK; Z^n)` under uniform messages.
    pub leakage_bits: f64,
    /// Mean over messages of `D(q_m ‖ p_S^n)`.
    pub covering_div_bits: f64,
    pub halfwidths: Halfwidths,
    /// Probability that every likelihood weight vanishes (counted as error).
    pub atypical_prob: f64,
    pub decode_failures: DecodeFailures,
    pub eps: f64,
    /// Monte Carlo trials, zero in exact mode.
    pub trials: u64,
    pub seed: u64,
}

/// Per-symbol `p(y | s, u, v)` and `p(z | s, u, v)` of the code on `ch`.
struct OutputLaws {
    y: Vec<f64>,
    z: Vec<f64>,
    y_n: usize,
    z_n: usize,
}

impl OutputLaws {
    fn new(ch: &WiretapChannel, cb: &Codebook) -> Self {
        let [s_n, u_n, v_n, x_n, y_n, z_n] = cb.dims();
        let mut y = vec![0.0; s_n * u_n * v_n * y_n];
        let mut z = vec![0.0; s_n * u_n * v_n * z_n];
        for s in 0..s_n {
            for u in 0..u_n {
                for v in 0..v_n {
                    let r = (s * u_n + u) * v_n + v;
                    for (x, &px) in cb.law.x_row(s, u, v).iter().enumerate().take(x_n) {
                        for (yz, &w) in ch.row(s, x).iter().enumerate() {
                            y[r * y_n + yz / z_n] += px * w;
                            z[r * z_n + yz % z_n] += px * w;
                        }
                    }
                }
            }
        }
        OutputLaws { y, z, y_n, z_n }
    }

    fn seq_laws(
        &self,
        law: &[f64],
        a: usize,
        cb: &Codebook,
        s: &[usize],
        u: &[usize],
        v: &[usize],
    ) -> Vec<f64> {
        let [_, u_n, v_n, ..] = cb.dims();
        let rows: Vec<&[f64]> = (0..s.len())
            .map(|t| {
                let r = (s[t] * u_n + u[t]) * v_n + v[t];
                &law[r * a..(r + 1) * a]
            })
            .collect();
        product_law(&rows)
    }
}

fn exact_cost(cb: &Codebook) -> u128 {
    let [s_n, _, _, _, y_n, z_n] = cb.dims();
    let n = cb.n();
    let [_, _, _, m] = cb.sizes();
    let yz = checked_pow(y_n, n).saturating_add(checked_pow(z_n, n));
    let enc = (m as u128)
        .saturating_mul(checked_pow(s_n, n))
        .saturating_mul(cb.candidates() as u128)
        .saturating_mul(yz);
    let dec = checked_pow(y_n, n).saturating_mul((cb.candidates() * m) as u128);
    enc.saturating_add(dec)
}

/// Simulates the code drawn from `seed` at blocklength `n`.
///
/// Exact mode enumerates state sequences, encoder choices and channel
/// outputs for every message; Monte Carlo mode runs `trials` independent
/// transmissions with uniform messages.
pub fn run_trials(
    ch: &WiretapChannel,
    j: &JointSystem,
    n: usize,
    rates: Rates,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimReport> {
    let cb = Codebook::generate(j, n, rates, seed, opts.guard)?;
    evaluate_code(ch, &cb, trials, seed, opts)
}

/// Simulates a given codebook; see [`run_trials`].
pub fn evaluate_code(
    ch: &WiretapChannel,
    cb: &Codebook,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimReport> {
    let [s_n, _, _, x_n, y_n, z_n] = cb.dims();
    if [s_n, x_n, y_n, z_n] != ch.dims() {
        return Err(Error::Dimension(
            "codebook design does not match the channel".into(),
        ));
    }
    if opts.eps.is_nan() || opts.eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "typicality eps {} must be positive",
            opts.eps
        )));
    }
    let cost = exact_cost(cb);
    let mode = match opts.mode {
        Some(m) => m,
        None if cost <= opts.guard => SimMode::Exact,
        None => SimMode::MonteCarlo,
    };
    match mode {
        SimMode::Exact => {
            guard_check(cost, opts.guard)?;
            Ok(exact(ch, cb, seed, opts.eps))
        }
        SimMode::MonteCarlo => {
            if trials == 0 {
                return Err(Error::InvalidArgument(
                    "Monte Carlo mode needs at least one trial".into(),
                ));
            }
            Ok(monte_carlo(ch, cb, trials, seed, opts.eps))
        }
    }
}

fn sizes_of(cb: &Codebook) -> Sizes {
    let [l, n, k, m] = cb.sizes();
    Sizes { l, n, k, m }
}

struct MessageStats {
    error: f64,
    atypical: f64,
    no_match: f64,
    multiple: f64,
    key: Vec<f64>,
    /// `[k][z^n]`, unnormalized.
    z_joint: Vec<f64>,
    cover: f64,
}

fn exact(ch: &WiretapChannel, cb: &Codebook, seed: u64, eps: f64) -> SimReport {
    let [s_n, ..] = cb.dims();
    let n = cb.n();
    let [_, nn, kk, mm] = cb.sizes();
    let outs = OutputLaws::new(ch, cb);
    let (y_n, z_n) = (outs.y_n, outs.z_n);
    let ys = y_n.pow(n as u32);
    let zs = z_n.pow(n as u32);
    let decoded: Vec<DecodeOutcome> = (0..ys)
        .into_par_iter()
        .map(|y| typicality_decode(cb, &digits(y, y_n, n), eps))
        .collect();
    let p_states = product_law(&vec![cb.law.p_s.as_slice(); n]);
    let c_n = cb.candidates();

    let per_message: Vec<MessageStats> = (0..mm)
        .into_par_iter()
        .map(|m| {
            let mut st = MessageStats {
                error: 0.0,
                atypical: 0.0,
                no_match: 0.0,
                multiple: 0.0,
                key: vec![0.0; kk],
                z_joint: vec![0.0; kk * zs],
                cover: 0.0,
            };
            let mut q = vec![0.0; p_states.len()];
            for (si, &ps) in p_states.iter().enumerate() {
                let s_seq = digits(si, s_n, n);
                let w = likelihood_weights(cb, m, &s_seq).expect("valid state sequence");
                let total: f64 = w.iter().sum();
                q[si] = total / c_n as f64;
                if ps == 0.0 {
                    continue;
                }
                if total <= 0.0 {
                    st.atypical += ps;
                    continue;
                }
                for (c, &wc) in w.iter().enumerate() {
                    if wc == 0.0 {
                        continue;
                    }
                    let pc = ps * wc / total;
                    let (i, jj, k) = (c / (nn * kk), (c / kk) % nn, c % kk);
                    let u = cb.u_seq(i);
                    let v = cb.v_seq(i, jj, k, m);
                    let y_law = outs.seq_laws(&outs.y, y_n, cb, &s_seq, u, v);
                    for (y, &py) in y_law.iter().enumerate() {
                        if py == 0.0 {
                            continue;
                        }
                        let out = decoded[y];
                        if out.message_key() != (m, k) {
                            st.error += pc * py;
                        }
                        match out {
                            DecodeOutcome::NoMatch => st.no_match += pc * py,
                            DecodeOutcome::Multiple => st.multiple += pc * py,
                            DecodeOutcome::Unique(_) => {}
                        }
                    }
                    st.key[k] += pc;
                    let z_law = outs.seq_laws(&outs.z, z_n, cb, &s_seq, u, v);
                    for (slot, pz) in st.z_joint[k * zs..(k + 1) * zs].iter_mut().zip(z_law) {
                        *slot += pc * pz;
                    }
                }
            }
            st.error += st.atypical;
            st.cover = kl_slice(&q, &p_states);
            st
        })
        .collect();

    let mf = mm as f64;
    let uniform = vec![1.0 / kk as f64; kk];
    let mut key_tv: f64 = 0.0;
    let mut any_success = false;
    for st in &per_message {
        let succ = 1.0 - st.atypical;
        if succ > 0.0 {
            any_success = true;
            let p: Vec<f64> = st.key.iter().map(|x| x / succ).collect();
            key_tv = key_tv.max(tv_slice(&p, &uniform));
        }
    }
    if !any_success {
        key_tv = 1.0;
    }
    let mut joint: Vec<f64> = per_message
        .iter()
        .flat_map(|st| st.z_joint.iter().map(|x| x / mf))
        .collect();
    let total: f64 = joint.iter().sum();
    let mut leakage_bits = if total > 0.0 {
        joint.iter_mut().for_each(|x| *x /= total);
        let t = Tensor::new(vec![mm * kk, zs], joint).expect("normalized joint");
        mutual_information(&t).expect("rank-2 joint")
    } else {
        0.0
    };
    if eve_is_blind(ch) {
        // The enumerated value is rounding noise here; report the exact zero.
        debug_assert!(
            leakage_bits.abs() <= 1e-12,
            "blind Eve leaks {leakage_bits}"
        );
        leakage_bits = 0.0;
    }
    SimReport {
        mode: SimMode::Exact,
        n,
        rates: cb.rates(),
        sizes: sizes_of(cb),
        error_prob: per_message
            .iter()
            .map(|s| s.error)
            .fold(0.0, f64::max)
            .min(1.0),
        key_tv,
        leakage_bits,
        covering_div_bits: per_message.iter().map(|s| s.cover).sum::<f64>() / mf,
        halfwidths: Halfwidths {
            error_prob: 0.0,
            key_tv: 0.0,
            leakage_bits: 0.0,
            covering_div_bits: 0.0,
        },
        atypical_prob: per_message.iter().map(|s| s.atypical).sum::<f64>() / mf,
        decode_failures: DecodeFailures {
            no_match: per_message.iter().map(|s| s.no_match).sum::<f64>() / mf,
            multiple: per_message.iter().map(|s| s.multiple).sum::<f64>() / mf,
        },
        eps,
        trials: 0,
        seed,
    }
}

/// Whether Eve's marginal kernel `p(z | s, x)` is the same for every
/// `(s, x)`; her output is then independent of everything the code does.
fn eve_is_blind(ch: &WiretapChannel) -> bool {
    let [s_n, x_n, ..] = ch.dims();
    let first = ch.z_law(0, 0);
    (0..s_n).all(|s| {
        (0..x_n).all(|x| {
            ch.z_law(s, x)
                .iter()
                .zip(&first)
                .all(|(a, b)| (a - b).abs() <= 1e-12)
        })
    })
}

struct Trial {
    m: usize,
    /// Key and Eve's output index when encoding succeeded.
    delivered: Option<(usize, usize)>,
    error: bool,
    failure: Option<DecodeOutcome>,
    cover: f64,
}

fn one_trial(ch: &WiretapChannel, cb: &Codebook, seed: u64, t: u64, eps: f64) -> Trial {
    let mut rng = stream_rng(seed, 1 + t);
    let z_n = ch.z_size();
    let m = rng.random_range(0..cb.sizes()[3]);
    let s_seq: Vec<usize> = (0..cb.n())
        .map(|_| sample_index(&cb.law.p_s, &mut rng).expect("state law"))
        .collect();
    let w = likelihood_weights(cb, m, &s_seq).expect("valid state sequence");
    let p_s: f64 = s_seq.iter().map(|&s| cb.law.p_s[s]).product();
    let ratio = w.iter().sum::<f64>() / cb.candidates() as f64 / p_s;
    let cover = if ratio > 0.0 {
        ratio * ratio.log2()
    } else {
        0.0
    };
    let idx = match encode_with(cb, m, &s_seq, &mut rng) {
        Ok(idx) => idx,
        Err(_) => {
            return Trial {
                m,
                delivered: None,
                error: true,
                failure: None,
                cover,
            }
        }
    };
    let x = generate_input(cb, idx, m, &s_seq, &mut rng);
    let (y, z) = transmit_with(ch, &s_seq, &x, &mut rng).expect("matching lengths");
    let out = typicality_decode(cb, &y, eps);
    Trial {
        m,
        delivered: Some((idx.k, seq_index(&z, z_n))),
        error: out.message_key() != (m, idx.k),
        failure: out.is_failure().then_some(out),
        cover,
    }
}

fn plug_in_key_tv(trials: &[Trial], k_n: usize, m_n: usize) -> f64 {
    let mut counts = vec![0u64; m_n * k_n];
    for t in trials {
        if let Some((k, _)) = t.delivered {
            counts[t.m * k_n + k] += 1;
        }
    }
    let uniform = vec![1.0 / k_n as f64; k_n];
    let mut worst: f64 = 0.0;
    let mut seen = false;
    for row in counts.chunks(k_n) {
        let total: u64 = row.iter().sum();
        if total > 0 {
            seen = true;
            let p: Vec<f64> = row.iter().map(|&c| c as f64 / total as f64).collect();
            worst = worst.max(tv_slice(&p, &uniform));
        }
    }
    if seen {
        worst
    } else {
        1.0
    }
}

fn plug_in_leakage(trials: &[Trial], k_n: usize) -> f64 {
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut a: BTreeMap<usize, u64> = BTreeMap::new();
    let mut b: BTreeMap<usize, u64> = BTreeMap::new();
    let mut total = 0u64;
    for t in trials {
        if let Some((k, z)) = t.delivered {
            let mk = t.m * k_n + k;
            *joint.entry((mk, z)).or_default() += 1;
            *a.entry(mk).or_default() += 1;
            *b.entry(z).or_default() += 1;
            total += 1;
        }
    }
    let tf = total as f64;
    joint
        .iter()
        .map(|(&(mk, z), &c)| {
            let c = c as f64;
            c / tf * (c * tf / (a[&mk] as f64 * b[&z] as f64)).log2()
        })
        .sum::<f64>()
        .max(0.0)
}

const Z95: f64 = 1.96;
const BATCHES: usize = 10;

fn wilson_halfwidth(p: f64, n: f64) -> f64 {
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

fn mean_halfwidth(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * (var / n).sqrt())
}

fn monte_carlo(ch: &WiretapChannel, cb: &Codebook, trials: u64, seed: u64, eps: f64) -> SimReport {
    let [_, _, kk, mm] = cb.sizes();
    let runs: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| one_trial(ch, cb, seed, t, eps))
        .collect();
    let tf = trials as f64;
    let errors = runs.iter().filter(|t| t.error).count() as f64;
    let error_prob = errors / tf;
    let key_tv = plug_in_key_tv(&runs, kk, mm);
    let leakage_bits = plug_in_leakage(&runs, kk);
    let batches = BATCHES.min(runs.len());
    let chunk = runs.len().div_ceil(batches);
    let (tv_b, leak_b): (Vec<f64>, Vec<f64>) = runs
        .chunks(chunk)
        .map(|b| (plug_in_key_tv(b, kk, mm), plug_in_leakage(b, kk)))
        .unzip();
    let batch_half = |xs: &[f64]| mean_halfwidth(xs).1;
    let covers: Vec<f64> = runs.iter().map(|t| t.cover).collect();
    let (covering_div_bits, cover_half) = mean_halfwidth(&covers);
    let count = |f: &dyn Fn(&Trial) -> bool| runs.iter().filter(|t| f(t)).count() as f64 / tf;
    SimReport {
        mode: SimMode::MonteCarlo,
        n: cb.n(),
        rates: cb.rates(),
        sizes: sizes_of(cb),
        error_prob,
        key_tv,
        leakage_bits,
        covering_div_bits,
        halfwidths: Halfwidths {
            error_prob: wilson_halfwidth(error_prob, tf),
            key_tv: batch_half(&tv_b),
            leakage_bits: batch_half(&leak_b),
            covering_div_bits: cover_half,
        },
        atypical_prob: count(&|t| t.delivered.is_none()),
        decode_failures: DecodeFailures {
            no_match: count(&|t| t.failure == Some(DecodeOutcome::NoMatch)),
            multiple: count(&|t| t.failure == Some(DecodeOutcome::Multiple)),
        },
        eps,
        trials,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_joint, AuxiliaryScheme};

    fn bsc(p: f64, a: usize, b: usize) -> f64 {
        if a == b {
            1.0 - p
        } else {
            p
        }
    }

    /// Trivial state, `X = V` uniform on {0, 1}.
    fn plain_design(ch: &WiretapChannel) -> JointSystem {
        let dims = [1, 1, 2, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1]);
        build_joint(
            ch,
            &AuxiliaryScheme::non_causal(dims, vec![0.5, 0.5], sel).unwrap(),
        )
        .unwrap()
    }

    fn rates() -> Rates {
        Rates::new(0.0, 0.0, 0.5, 0.5)
    }

    #[test]
    fn constant_eve_kernel_leaks_nothing() {
        let ch =
            WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, _| 0.5 * bsc(0.1, x, y))
                .unwrap();
        let j = plain_design(&ch);
        for seed in 0..4 {
            let r = run_trials(&ch, &j, 2, rates(), 0, seed, &SimOptions::default()).unwrap();
            assert_eq!(r.mode, SimMode::Exact);
            assert_eq!(r.leakage_bits, 0.0);
        }
    }

    #[test]
    fn eve_equal_to_bob_leaks() {
        let ch = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            f64::from(u8::from(y == z)) * bsc(0.1, x, y)
        })
        .unwrap();
        let j = plain_design(&ch);
        let r = run_trials(&ch, &j, 2, rates(), 0, 3, &SimOptions::default()).unwrap();
        assert!(r.leakage_bits > 0.1, "leakage {}", r.leakage_bits);
    }

    #[test]
    fn distinct_noiseless_codewords_never_err() {
        let ch = WiretapChannel::from_fn([1, 4, 4, 1], vec![1.0], |_, x, y, _| {
            f64::from(u8::from(x == y))
        })
        .unwrap();
        let dims = [1, 1, 4, 4];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 2, 3]);
        let j = build_joint(
            &ch,
            &AuxiliaryScheme::non_causal(dims, vec![0.25; 4], sel).unwrap(),
        )
        .unwrap();
        let v = vec![0, 1, 2, 3, 1, 2, 3, 0, 2, 3, 0, 1, 3, 0, 1, 2];
        let cb = Codebook::with_sequences(&j, 4, [1, 1, 2, 2], vec![0; 4], v).unwrap();
        let r = evaluate_code(&ch, &cb, 0, 0, &SimOptions::default()).unwrap();
        assert_eq!(r.error_prob, 0.0);
        assert!(r.key_tv < 1e-15);
        assert_eq!(r.atypical_prob, 0.0);
        assert_eq!(r.decode_failures.no_match + r.decode_failures.multiple, 0.0);
    }

    #[test]
    fn key_tv_matches_enumeration() {
        // Binary state known non-causally; S is U flipped with probability 0.2 or 0.4 by V.
        let ch = WiretapChannel::from_fn([2, 2, 2, 2], vec![0.5, 0.5], |s, x, y, z| {
            bsc(0.1, x ^ s, y) * bsc(0.3, x, z)
        })
        .unwrap();
        let flip = [0.2, 0.4];
        let mut p = vec![0.0; 8];
        for s in 0..2 {
            for u in 0..2 {
                for v in 0..2 {
                    p[(s * 2 + u) * 2 + v] = 0.25 * bsc(flip[v], u, s);
                }
            }
        }
        let dims = [2, 2, 2, 2];
        let table: Vec<usize> = (0..8).map(|r| (r >> 2) ^ (r & 1)).collect();
        let sel = AuxiliaryScheme::deterministic_selector(dims, &table);
        let j = build_joint(&ch, &AuxiliaryScheme::non_causal(dims, p, sel).unwrap()).unwrap();
        let n = 2;
        let rates = Rates::new(0.5, 0.0, 0.5, 0.5);
        for seed in [1, 7, 11] {
            let cb = Codebook::generate(&j, n, rates, seed, DEFAULT_GUARD).unwrap();
            let r = evaluate_code(&ch, &cb, 0, seed, &SimOptions::default()).unwrap();
            let [l, nn, kk, mm] = cb.sizes();
            let mut worst: f64 = 0.0;
            for m in 0..mm {
                let mut key = vec![0.0; kk];
                for s0 in 0..2 {
                    for s1 in 0..2 {
                        let s = [s0, s1];
                        let mut w = vec![0.0; l * nn * kk];
                        for i in 0..l {
                            for jj in 0..nn {
                                for k in 0..kk {
                                    let u = cb.u_seq(i);
                                    let v = cb.v_seq(i, jj, k, m);
                                    w[(i * nn + jj) * kk + k] =
                                        (0..n).map(|t| bsc(flip[v[t]], u[t], s[t])).product();
                                }
                            }
                        }
                        let total: f64 = w.iter().sum();
                        for (c, wc) in w.iter().enumerate() {
                            key[c % kk] += 0.25 * wc / total;
                        }
                    }
                }
                let tv = 0.5 * key.iter().map(|q| (q - 1.0 / kk as f64).abs()).sum::<f64>();
                worst = worst.max(tv);
            }
            assert!((r.key_tv - worst).abs() < 1e-12, "{} vs {worst}", r.key_tv);
        }
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let ch = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            bsc(0.1, x, y) * bsc(0.3, x, z)
        })
        .unwrap();
        let j = plain_design(&ch);
        let rates = Rates::new(0.0, 0.0, 0.5, 0.0);
        let cb = Codebook::generate(&j, 3, rates, 5, DEFAULT_GUARD).unwrap();
        let exact = evaluate_code(&ch, &cb, 0, 5, &SimOptions::default()).unwrap();
        let opts = SimOptions {
            mode: Some(SimMode::MonteCarlo),
            ..SimOptions::default()
        };
        let mc = evaluate_code(&ch, &cb, 20_000, 5, &opts).unwrap();
        assert_eq!(mc.mode, SimMode::MonteCarlo);
        assert!((mc.error_prob - exact.error_prob).abs() <= 2.0 * mc.halfwidths.error_prob + 1e-3);
        assert!((mc.leakage_bits - exact.leakage_bits).abs() < 0.05);
        assert!(mc.halfwidths.key_tv.is_finite());
    }

    #[test]
    fn mode_selection_respects_guard() {
        let ch = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            bsc(0.1, x, y) * bsc(0.3, x, z)
        })
        .unwrap();
        let j = plain_design(&ch);
        let tight = SimOptions {
            guard: 64,
            ..SimOptions::default()
        };
        let auto = run_trials(&ch, &j, 3, rates(), 100, 0, &tight).unwrap();
        assert_eq!(auto.mode, SimMode::MonteCarlo);
        let forced = SimOptions {
            mode: Some(SimMode::Exact),
            ..tight
        };
        assert!(matches!(
            run_trials(&ch, &j, 3, rates(), 0, 0, &forced),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(run_trials(&ch, &j, 3, rates(), 0, 0, &auto_mc()).is_err());
    }

    fn auto_mc() -> SimOptions {
        SimOptions {
            mode: Some(SimMode::MonteCarlo),
            ..SimOptions::default()
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let ch = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            bsc(0.1, x, y) * bsc(0.3, x, z)
        })
        .unwrap();
        let j = plain_design(&ch);
        let a = run_trials(&ch, &j, 3, rates(), 500, 9, &auto_mc()).unwrap();
        let b = run_trials(&ch, &j, 3, rates(), 500, 9, &auto_mc()).unwrap();
        assert_eq!(a, b);
    }
}
