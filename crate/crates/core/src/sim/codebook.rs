use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{guard_check, index_size, CodeLaw, Rates, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::scheme::JointSystem;

/// A two-layer random code.
///
/// `u` holds `L` sequences; `v` holds `L·N·K·M` sequences, the one for
/// `(i, j, k, m)` at index `((i·N + j)·K + k)·M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    sizes: [usize; 4],
    u: Vec<usize>,
    v: Vec<usize>,
    seed: u64,
    rates: Rates,
    pub(crate) law: CodeLaw,
}

impl Codebook {
    /// Draws `u_i ~ p_U^n` and `v_ijkm ~ p_{V|U}^n(· | u_i)`, refusing tables
    /// with more than `guard` symbols.
    pub fn generate(
        j: &JointSystem,
        n: usize,
        rates: Rates,
        seed: u64,
        guard: u128,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "blocklength must be at least 1".into(),
            ));
        }
        let sizes = [
            index_size(n, rates.r1)?,
            index_size(n, rates.r2)?,
            index_size(n, rates.rk)?,
            index_size(n, rates.rm)?,
        ];
        let [l, nn, k, m] = sizes.map(|s| s as u128);
        let words = l
            .saturating_mul(nn)
            .saturating_mul(k)
            .saturating_mul(m)
            .saturating_add(l);
        guard_check(words.saturating_mul(n as u128), guard)?;
        let law = CodeLaw::from_joint(j);
        let [_, u_n, v_n, ..] = law.dims;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u_dist = WeightedIndex::new(&law.p_u).expect("p_U is a distribution");
        let v_dists: Vec<Option<WeightedIndex<f64>>> = (0..u_n)
            .map(|u| WeightedIndex::new(&law.v_given_u[u * v_n..(u + 1) * v_n]).ok())
            .collect();
        let [l, nn, k, m] = sizes;
        let u: Vec<usize> = (0..l * n).map(|_| u_dist.sample(&mut rng)).collect();
        let mut v = Vec::with_capacity(l * nn * k * m * n);
        for i in 0..l {
            let ui = &u[i * n..(i + 1) * n];
            for _ in 0..nn * k * m {
                for &ut in ui {
                    let d = v_dists[ut].as_ref().expect("drawn u has positive mass");
                    v.push(d.sample(&mut rng));
                }
            }
        }
        Ok(Codebook {
            n,
            sizes,
            u,
            v,
            seed,
            rates,
            law,
        })
    }

    /// A codebook with given sequences, e.g. for hand-built test codes.
    pub fn with_sequences(
        j: &JointSystem,
        n: usize,
        sizes: [usize; 4],
        u: Vec<usize>,
        v: Vec<usize>,
    ) -> Result<Self> {
        let law = CodeLaw::from_joint(j);
        let [_, u_n, v_n, ..] = law.dims;
        let [l, nn, k, m] = sizes;
        if n == 0 || sizes.contains(&0) {
            return Err(Error::InvalidArgument(
                "blocklength and index sizes must be positive".into(),
            ));
        }
        if u.len() != l * n || v.len() != l * nn * k * m * n {
            return Err(Error::Dimension(format!(
                "codebook needs {} u-symbols and {} v-symbols",
                l * n,
                l * nn * k * m * n
            )));
        }
        if u.iter().any(|&x| x >= u_n) || v.iter().any(|&x| x >= v_n) {
            return Err(Error::Dimension("codeword symbol out of range".into()));
        }
        Ok(Codebook {
            n,
            sizes,
            u,
            v,
            seed: 0,
            rates: Rates::new(
                (l as f64).log2() / n as f64,
                (nn as f64).log2() / n as f64,
                (k as f64).log2() / n as f64,
                (m as f64).log2() / n as f64,
            ),
            law,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[L, N, K, M]`.
    pub fn sizes(&self) -> [usize; 4] {
        self.sizes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Rates the code was generated at, or `log2(size) / n` for given sequences.
    pub fn rates(&self) -> Rates {
        self.rates
    }

    /// Composite `[|S|, |U|, |V|, |X|, |Y|, |Z|]`.
    pub fn dims(&self) -> [usize; 6] {
        self.law.dims
    }

    /// Encoder candidates per message, `L·N·K`.
    pub fn candidates(&self) -> usize {
        self.sizes[0] * self.sizes[1] * self.sizes[2]
    }

    pub fn u_seq(&self, i: usize) -> &[usize] {
        &self.u[i * self.n..(i + 1) * self.n]
    }

    pub fn v_index(&self, i: usize, j: usize, k: usize, m: usize) -> usize {
        let [_, nn, kk, mm] = self.sizes;
        ((i * nn + j) * kk + k) * mm + m
    }

    pub fn v_seq(&self, i: usize, j: usize, k: usize, m: usize) -> &[usize] {
        let idx = self.v_index(i, j, k, m);
        &self.v[idx * self.n..(idx + 1) * self.n]
    }

    pub(crate) fn v_seq_mut(&mut self, idx: usize) -> &mut [usize] {
        &mut self.v[idx * self.n..(idx + 1) * self.n]
    }
}

/// [`Codebook::generate`] with the default guard.
pub fn generate_codebook(j: &JointSystem, n: usize, rates: Rates, seed: u64) -> Result<Codebook> {
    Codebook::generate(j, n, rates, seed, DEFAULT_GUARD)
}
