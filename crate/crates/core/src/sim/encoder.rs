use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{checked_pow, digits, sample_index, stream_rng, Codebook};
use crate::error::{Error, Result};

/// Chosen `(i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Indices {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Indices {
    fn from_flat(idx: usize, sizes: [usize; 4]) -> Self {
        let [_, nn, kk, _] = sizes;
        Indices {
            i: idx / (nn * kk),
            j: (idx / kk) % nn,
            k: idx % kk,
        }
    }

    fn flat(self, sizes: [usize; 4]) -> usize {
        let [_, nn, kk, _] = sizes;
        (self.i * nn + self.j) * kk + self.k
    }
}

fn check_states(cb: &Codebook, m: usize, s_seq: &[usize]) -> Result<()> {
    if s_seq.len() != cb.n() {
        return Err(Error::Dimension(format!(
            "state sequence has length {}, blocklength is {}",
            s_seq.len(),
            cb.n()
        )));
    }
    if s_seq.iter().any(|&s| s >= cb.dims()[0]) {
        return Err(Error::Dimension("state symbol out of range".into()));
    }
    if m >= cb.sizes()[3] {
        return Err(Error::InvalidArgument(format!("message {m} out of range")));
    }
    Ok(())
}

/// `Π_t W(s_t | u_it, v_ijkm,t)` for every candidate, indexed `(i·N + j)·K + k`.
pub fn likelihood_weights(cb: &Codebook, m: usize, s_seq: &[usize]) -> Result<Vec<f64>> {
    check_states(cb, m, s_seq)?;
    let sizes = cb.sizes();
    Ok((0..cb.candidates())
        .map(|c| {
            let Indices { i, j, k } = Indices::from_flat(c, sizes);
            let u = cb.u_seq(i);
            let v = cb.v_seq(i, j, k, m);
            s_seq
                .iter()
                .zip(u.iter().zip(v))
                .map(|(&s, (&u, &v))| cb.law.w(s, u, v))
                .product()
        })
        .collect())
}

/// Normalized likelihood weights; [`Error::AtypicalState`] if all vanish.
pub fn likelihood_law(cb: &Codebook, m: usize, s_seq: &[usize]) -> Result<Vec<f64>> {
    let mut w = likelihood_weights(cb, m, s_seq)?;
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::AtypicalState);
    }
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Samples `(i, j, k)` in proportion to the likelihood weights.
pub fn likelihood_encode(cb: &Codebook, m: usize, s_seq: &[usize], seed: u64) -> Result<Indices> {
    let mut rng = stream_rng(seed, 0);
    encode_with(cb, m, s_seq, &mut rng)
}

pub(crate) fn encode_with(
    cb: &Codebook,
    m: usize,
    s_seq: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<Indices> {
    let w = likelihood_weights(cb, m, s_seq)?;
    let c = sample_index(&w, rng).ok_or(Error::AtypicalState)?;
    Ok(Indices::from_flat(c, cb.sizes()))
}

/// Draws `x_t ~ p(x | s_t, u_it, v_ijkm,t)` symbol by symbol.
pub fn generate_input(
    cb: &Codebook,
    idx: Indices,
    m: usize,
    s_seq: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let u = cb.u_seq(idx.i);
    let v = cb.v_seq(idx.i, idx.j, idx.k, m);
    s_seq
        .iter()
        .zip(u.iter().zip(v))
        .map(|(&s, (&u, &v))| sample_index(cb.law.x_row(s, u, v), rng).expect("rows are laws"))
        .collect()
}

/// Streaming encoder for designs whose second layer embeds the state.
///
/// The indices are drawn uniformly before the first symbol; each incoming
/// state replaces the embedded state of the current `v` symbol.
#[derive(Debug)]
pub struct CausalEncoder<'a> {
    cb: &'a Codebook,
    m: usize,
    idx: Indices,
    t: usize,
    rng: ChaCha8Rng,
}

impl<'a> CausalEncoder<'a> {
    pub fn new(cb: &'a Codebook, m: usize, seed: u64) -> Result<Self> {
        if !cb.law.embeds_state_in_v() {
            return Err(Error::ModeMismatch {
                expected: "a Case2, Case2A or Case2B design".into(),
                found: cb.law.source_mode.to_string(),
            });
        }
        if m >= cb.sizes()[3] {
            return Err(Error::InvalidArgument(format!("message {m} out of range")));
        }
        let mut rng = stream_rng(seed, 0);
        let idx = Indices::from_flat(rng.random_range(0..cb.candidates()), cb.sizes());
        Ok(CausalEncoder {
            cb,
            m,
            idx,
            t: 0,
            rng,
        })
    }

    /// The pre-drawn indices; `k` is the key.
    pub fn indices(&self) -> Indices {
        self.idx
    }

    /// Emits the input symbol for state `s` at the next time step.
    pub fn step(&mut self, s: usize) -> Result<usize> {
        let [s_n, ..] = self.cb.dims();
        if self.t >= self.cb.n() || s >= s_n {
            return Err(Error::InvalidArgument(format!(
                "step {} with state {s} outside the block",
                self.t
            )));
        }
        let Indices { i, j, k } = self.idx;
        let u = self.cb.u_seq(i)[self.t];
        let v = substitute(self.cb, self.cb.v_seq(i, j, k, self.m)[self.t], s);
        self.t += 1;
        Ok(sample_index(self.cb.law.x_row(s, u, v), &mut self.rng).expect("rows are laws"))
    }

    /// Indices after the block ends.
    pub fn finish(self) -> Indices {
        self.idx
    }
}

fn substitute(cb: &Codebook, v: usize, s: usize) -> usize {
    let inner = cb.law.inner_v();
    s * inner + v % inner
}

/// Runs [`CausalEncoder`] over a whole state sequence.
pub fn causal_encode(
    cb: &Codebook,
    m: usize,
    states: &[usize],
    seed: u64,
) -> Result<(Vec<usize>, Indices)> {
    if states.len() != cb.n() {
        return Err(Error::Dimension(format!(
            "state stream has length {}, blocklength is {}",
            states.len(),
            cb.n()
        )));
    }
    let mut enc = CausalEncoder::new(cb, m, seed)?;
    let xs = states
        .iter()
        .map(|&s| enc.step(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((xs, enc.finish()))
}

/// The codebook with every `v` symbol's embedded state set to `s_seq`.
pub fn state_substituted(cb: &Codebook, s_seq: &[usize]) -> Result<Codebook> {
    if !cb.law.embeds_state_in_v() {
        return Err(Error::ModeMismatch {
            expected: "a Case2, Case2A or Case2B design".into(),
            found: cb.law.source_mode.to_string(),
        });
    }
    check_states(cb, 0, s_seq)?;
    let mut out = cb.clone();
    let [l, nn, kk, mm] = cb.sizes();
    for idx in 0..l * nn * kk * mm {
        let inner = cb.law.inner_v();
        for (v, &s) in out.v_seq_mut(idx).iter_mut().zip(s_seq) {
            *v = s * inner + *v % inner;
        }
    }
    Ok(out)
}

fn x_law(cb: &Codebook, idx: Indices, m: usize, s_seq: &[usize], sub: bool) -> Vec<f64> {
    let x_n = cb.dims()[3];
    let n = cb.n();
    let u = cb.u_seq(idx.i);
    let v = cb.v_seq(idx.i, idx.j, idx.k, m);
    (0..x_n.pow(n as u32))
        .map(|xi| {
            digits(xi, x_n, n)
                .into_iter()
                .enumerate()
                .map(|(t, x)| {
                    let vt = if sub {
                        substitute(cb, v[t], s_seq[t])
                    } else {
                        v[t]
                    };
                    cb.law.x_row(s_seq[t], u[t], vt)[x]
                })
                .product()
        })
        .collect()
}

fn outcome_guard(cb: &Codebook) -> Result<()> {
    let needed = (cb.candidates() as u128).saturating_mul(checked_pow(cb.dims()[3], cb.n()));
    super::guard_check(needed, super::DEFAULT_GUARD)
}

/// Exact law of `(i, j, k, x^n)` under the causal encoder, indexed
/// `((i·N + j)·K + k)·|X|^n + x`.
pub fn causal_outcome_law(cb: &Codebook, m: usize, s_seq: &[usize]) -> Result<Vec<f64>> {
    if !cb.law.embeds_state_in_v() {
        return Err(Error::ModeMismatch {
            expected: "a Case2, Case2A or Case2B design".into(),
            found: cb.law.source_mode.to_string(),
        });
    }
    check_states(cb, m, s_seq)?;
    outcome_guard(cb)?;
    let c = cb.candidates();
    let sizes = cb.sizes();
    let mut out = Vec::new();
    for flat in 0..c {
        let idx = Indices::from_flat(flat, sizes);
        out.extend(
            x_law(cb, idx, m, s_seq, true)
                .into_iter()
                .map(|p| p / c as f64),
        );
    }
    Ok(out)
}

/// Exact law of `(i, j, k, x^n)` under the likelihood encoder followed by
/// symbol-wise input generation, same indexing as [`causal_outcome_law`].
pub fn likelihood_outcome_law(cb: &Codebook, m: usize, s_seq: &[usize]) -> Result<Vec<f64>> {
    outcome_guard(cb)?;
    let law = likelihood_law(cb, m, s_seq)?;
    let sizes = cb.sizes();
    let mut out = Vec::new();
    for (flat, &p) in law.iter().enumerate() {
        let idx = Indices::from_flat(flat, sizes);
        debug_assert_eq!(idx.flat(sizes), flat);
        out.extend(x_law(cb, idx, m, s_seq, false).into_iter().map(|q| p * q));
    }
    Ok(out)
}
