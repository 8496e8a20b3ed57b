//! Soft covering of the state by the two-layer codebook.
//!
//! For a codebook of `L` first-layer and `L·N` second-layer codewords the
//! induced state law is `q(s) = (1/LN) Σ_ij W^n(s | u_i, v_ij)`. Its expected
//! divergence from `p_S^n` over the random codebook is computed exactly from
//! the law of `A_i = Σ_j W^n(s | u_i, v_ij)`: a mixture over `u^n` of `N`-fold
//! sums, then an `L`-fold sum. Atoms with equal value (to 1e-15) are merged.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    checked_pow, digits, guard_check, index_size, sample_index, stream_rng, CodeLaw, DEFAULT_GUARD,
};
use crate::error::{Error, Result};
use crate::info::kl_slice;
use crate::scheme::{JointSystem, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverEstimate {
    pub mode: CoverMode,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub nn: usize,
    /// Expected divergence in bits.
    pub value: f64,
    /// 95% half-width; zero in exact mode.
    pub half_width: f64,
}

/// `(I(U;S), I(UV;S))` of the composite design.
pub fn lemma_thresholds(j: &JointSystem) -> (f64, f64) {
    let e = j.plugged();
    (
        e.mi(VarSet::U, VarSet::S, VarSet::EMPTY),
        e.mi(VarSet::U | VarSet::V, VarSet::S, VarSet::EMPTY),
    )
}

/// Expected `D(q^n ‖ p^n)` in bits at `L = ⌈2^{nR1}⌉`, `N = ⌈2^{nR2}⌉`.
pub fn soft_cover_divergence(
    j: &JointSystem,
    n: usize,
    r1: f64,
    r2: f64,
    mode: CoverMode,
    seed: u64,
) -> Result<CoverEstimate> {
    let (l, nn) = (index_size(n, r1)?, index_size(n, r2)?);
    let (value, half_width) = match mode {
        CoverMode::Exact => (soft_cover_exact(j, n, l, nn, DEFAULT_GUARD)?, 0.0),
        CoverMode::MonteCarlo { samples } => soft_cover_mc(j, n, l, nn, samples, seed)?,
    };
    Ok(CoverEstimate {
        mode,
        n,
        l,
        nn,
        value,
        half_width,
    })
}

type Atoms = Vec<(f64, f64)>;

const KEY_SCALE: f64 = 1e15;

fn merge(atoms: impl IntoIterator<Item = (f64, f64)>) -> Atoms {
    let mut map: BTreeMap<i128, (f64, f64)> = BTreeMap::new();
    for (x, p) in atoms {
        if p == 0.0 {
            continue;
        }
        let e = map
            .entry((x * KEY_SCALE).round() as i128)
            .or_insert((x, 0.0));
        e.1 += p;
    }
    map.into_values().collect()
}

fn convolve(a: &Atoms, b: &Atoms, guard: u128) -> Result<Atoms> {
    guard_check((a.len() as u128) * (b.len() as u128), guard)?;
    Ok(merge(a.iter().flat_map(|&(x, p)| {
        b.iter().map(move |&(y, q)| (x + y, p * q))
    })))
}

/// Law of the sum of `k` independent copies, by repeated doubling.
fn sum_law(base: &Atoms, mut k: usize, guard: u128) -> Result<Atoms> {
    let mut acc: Atoms = vec![(0.0, 1.0)];
    let mut pow = base.clone();
    loop {
        if k & 1 == 1 {
            acc = convolve(&acc, &pow, guard)?;
        }
        k >>= 1;
        if k == 0 {
            return Ok(acc);
        }
        pow = convolve(&pow, &pow, guard)?;
    }
}

/// Exact expected divergence in bits over the random codebook with `L = l`,
/// `N = nn`; refuses any step with more than `guard` atoms or sequences.
pub fn soft_cover_exact(
    j: &JointSystem,
    n: usize,
    l: usize,
    nn: usize,
    guard: u128,
) -> Result<f64> {
    if n == 0 || l == 0 || nn == 0 {
        return Err(Error::InvalidArgument(
            "blocklength and codebook sizes must be positive".into(),
        ));
    }
    let law = &CodeLaw::from_joint(j);
    let [s_n, u_n, v_n, ..] = law.dims;
    guard_check(
        checked_pow(s_n, n).saturating_mul(checked_pow(u_n, n)),
        guard,
    )?;
    let s_count = s_n.pow(n as u32);
    let u_count = u_n.pow(n as u32);
    let scale = (l * nn) as f64;
    let terms = (0..s_count)
        .into_par_iter()
        .map(|si| {
            let s_seq = digits(si, s_n, n);
            let p_s: f64 = s_seq.iter().map(|&s| law.p_s[s]).product();
            if p_s == 0.0 {
                return Ok(0.0);
            }
            let mut mixture = Vec::new();
            for ui in 0..u_count {
                let u_seq = digits(ui, u_n, n);
                let p_u: f64 = u_seq.iter().map(|&u| law.p_u[u]).product();
                if p_u == 0.0 {
                    continue;
                }
                let mut single: Atoms = vec![(1.0, 1.0)];
                for (&s, &u) in s_seq.iter().zip(&u_seq) {
                    let row = &law.v_given_u[u * v_n..(u + 1) * v_n];
                    single = merge(single.iter().flat_map(|&(x, p)| {
                        row.iter()
                            .enumerate()
                            .map(move |(v, &pv)| (x * law.w(s, u, v), p * pv))
                    }));
                }
                let inner = sum_law(&single, nn, guard)?;
                mixture.extend(inner.into_iter().map(|(x, p)| (x, p * p_u)));
            }
            let a = merge(mixture);
            let total = sum_law(&a, l, guard)?;
            let mut q_log_q = 0.0;
            let mut mean_q = 0.0;
            for (x, p) in total {
                let q = x / scale;
                if q > 0.0 {
                    q_log_q += p * q * q.log2();
                    mean_q += p * q;
                }
            }
            Ok(q_log_q - mean_q * p_s.log2())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>().max(0.0))
}

fn soft_cover_mc(
    j: &JointSystem,
    n: usize,
    l: usize,
    nn: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo covering needs at least two samples".into(),
        ));
    }
    let law = CodeLaw::from_joint(j);
    let [s_n, _, v_n, ..] = law.dims;
    let per_sample = checked_pow(s_n, n).saturating_mul((l * nn * n) as u128);
    guard_check(per_sample, DEFAULT_GUARD)?;
    let s_count = s_n.pow(n as u32);
    let p_states: Vec<f64> = (0..s_count)
        .map(|si| digits(si, s_n, n).iter().map(|&s| law.p_s[s]).product())
        .collect();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, 1 + k as u64);
            let mut q = vec![0.0; s_count];
            for _ in 0..l {
                let u: Vec<usize> = (0..n)
                    .map(|_| sample_index(&law.p_u, &mut rng).expect("p_U"))
                    .collect();
                for _ in 0..nn {
                    let v: Vec<usize> = u
                        .iter()
                        .map(|&ut| {
                            sample_index(&law.v_given_u[ut * v_n..(ut + 1) * v_n], &mut rng)
                                .expect("drawn u has positive mass")
                        })
                        .collect();
                    for (si, slot) in q.iter_mut().enumerate() {
                        let s_seq = digits(si, s_n, n);
                        *slot += (0..n).map(|t| law.w(s_seq[t], u[t], v[t])).product::<f64>();
                    }
                }
            }
            let scale = (l * nn) as f64;
            q.iter_mut().for_each(|x| *x /= scale);
            kl_slice(&q, &p_states)
        })
        .collect();
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((mean, 1.96 * (var / m).sqrt()))
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rho = {rho} must lie in (0, 1)"
        )))
    }
}

/// Single-letter `E0(ρ) = −log2 Σ_s (Σ_uv p(u,v) W(s|u,v)^{1/(1−ρ)})^{1−ρ}`;
/// the `n`-letter value is `n` times this.
pub fn gallager_e0(j: &JointSystem, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let law = CodeLaw::from_joint(j);
    let [s_n, u_n, v_n, ..] = law.dims;
    let mut total = 0.0;
    for s in 0..s_n {
        let mut inner = 0.0;
        for u in 0..u_n {
            for v in 0..v_n {
                let p = law.p_u[u] * law.v_given_u[u * v_n + v];
                if p > 0.0 {
                    inner += p * law.w(s, u, v).powf(1.0 / (1.0 - rho));
                }
            }
        }
        total += inner.powf(1.0 - rho);
    }
    Ok(-total.log2())
}

/// Terms of the expected-divergence bound at one `ρ`.
///
/// `E D ≤ F1 + F2` in nats, with `F1 = (1/ρ) L^{−ρ} G1^n` and
/// `F2 = (1/ρ) (LN)^{−ρ} G2^n`; Hölder gives `F2 ≤ (1/ρ) (LN)^{−ρ} 2^{−n E0(ρ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveringBound {
    pub rho: f64,
    pub e0_bits: f64,
    pub f1_nats: f64,
    pub f2_nats: f64,
    pub f2_gallager_nats: f64,
    /// `(F1 + F2) / ln 2`.
    pub bound_bits: f64,
    /// `(F1 + F2 via E0) / ln 2`.
    pub gallager_bound_bits: f64,
}

pub fn covering_bound(
    j: &JointSystem,
    n: usize,
    l: usize,
    nn: usize,
    rho: f64,
) -> Result<CoveringBound> {
    check_rho(rho)?;
    let law = CodeLaw::from_joint(j);
    let [s_n, u_n, v_n, ..] = law.dims;
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for s in 0..s_n {
        let ps = law.p_s[s];
        if ps == 0.0 {
            continue;
        }
        for u in 0..u_n {
            let pu = law.p_u[u];
            if pu == 0.0 {
                continue;
            }
            let mut w_su = 0.0;
            for v in 0..v_n {
                let pv = law.v_given_u[u * v_n + v];
                let w = law.w(s, u, v);
                w_su += pv * w;
                g2 += pu * pv * w.powf(1.0 + rho) * ps.powf(-rho);
            }
            g1 += pu * w_su.powf(1.0 + rho) * ps.powf(-rho);
        }
    }
    let e0 = gallager_e0(j, rho)?;
    let nf = n as f64;
    let f1 = (l as f64).powf(-rho) * g1.powf(nf) / rho;
    let lead = ((l * nn) as f64).powf(-rho) / rho;
    let f2 = lead * g2.powf(nf);
    let f2_gallager = lead * 2f64.powf(-nf * e0);
    Ok(CoveringBound {
        rho,
        e0_bits: e0,
        f1_nats: f1,
        f2_nats: f2,
        f2_gallager_nats: f2_gallager,
        bound_bits: (f1 + f2) / std::f64::consts::LN_2,
        gallager_bound_bits: (f1 + f2_gallager) / std::f64::consts::LN_2,
    })
}
