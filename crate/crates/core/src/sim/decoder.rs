use serde::Serialize;

use super::Codebook;

/// Decoded `(i, j, k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decoded {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecodeOutcome {
    Unique(Decoded),
    /// No jointly typical codeword.
    NoMatch,
    /// More than one jointly typical codeword.
    Multiple,
}

impl DecodeOutcome {
    /// `(m, k)` as output by the decoder; failures map to the designated
    /// value `(0, 0)`.
    pub fn message_key(&self) -> (usize, usize) {
        match self {
            DecodeOutcome::Unique(d) => (d.m, d.k),
            _ => (0, 0),
        }
    }

    pub fn is_failure(&self) -> bool {
        !matches!(self, DecodeOutcome::Unique(_))
    }
}

/// Whether the joint type of `(u, v, y)` is within `eps` of `p_UVY` in every
/// entry, with no symbols outside the support.
fn jointly_typical(
    cb: &Codebook,
    u: &[usize],
    v: &[usize],
    y: &[usize],
    eps: f64,
    counts: &mut [u32],
) -> bool {
    let [_, _, v_n, _, y_n, _] = cb.dims();
    counts.iter_mut().for_each(|c| *c = 0);
    for t in 0..y.len() {
        counts[(u[t] * v_n + v[t]) * y_n + y[t]] += 1;
    }
    let n = y.len() as f64;
    counts.iter().zip(&cb.law.p_uvy).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n - p).abs() <= eps
        }
    })
}

/// Strong-typicality decoder over all `(i, j, k, m)`.
///
/// # Panics
///
/// If `eps` is not positive or `y_seq` has the wrong length.
pub fn typicality_decode(cb: &Codebook, y_seq: &[usize], eps: f64) -> DecodeOutcome {
    assert!(eps > 0.0, "typicality eps must be positive");
    assert_eq!(y_seq.len(), cb.n(), "output sequence length");
    let [_, u_n, v_n, _, y_n, _] = cb.dims();
    let mut counts = vec![0u32; u_n * v_n * y_n];
    let [l, nn, kk, mm] = cb.sizes();
    let mut found = None;
    for i in 0..l {
        let u = cb.u_seq(i);
        for j in 0..nn {
            for k in 0..kk {
                for m in 0..mm {
                    if jointly_typical(cb, u, cb.v_seq(i, j, k, m), y_seq, eps, &mut counts) {
                        if found.is_some() {
                            return DecodeOutcome::Multiple;
                        }
                        found = Some(Decoded { i, j, k, m });
                    }
                }
            }
        }
    }
    found.map_or(DecodeOutcome::NoMatch, DecodeOutcome::Unique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::WiretapChannel;
    use crate::scheme::{build_joint, AuxiliaryScheme, JointSystem};

    /// Y = X = V, V uniform on {0, 1, 2, 3}, trivial state and U.
    fn noiseless() -> JointSystem {
        let ch = WiretapChannel::from_fn([1, 4, 4, 1], vec![1.0], |_, x, y, _| {
            f64::from(u8::from(x == y))
        })
        .unwrap();
        let dims = [1, 1, 4, 4];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 2, 3]);
        build_joint(
            &ch,
            &AuxiliaryScheme::non_causal(dims, vec![0.25; 4], sel).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_code_recovers_indices() {
        let j = noiseless();
        // Four typical codewords of length 4, one per (k, m).
        let v = vec![0, 1, 2, 3, 1, 2, 3, 0, 2, 3, 0, 1, 3, 0, 1, 2];
        let cb = Codebook::with_sequences(&j, 4, [1, 1, 2, 2], vec![0; 4], v).unwrap();
        for k in 0..2 {
            for m in 0..2 {
                let y = cb.v_seq(0, 0, k, m).to_vec();
                assert_eq!(
                    typicality_decode(&cb, &y, 0.1),
                    DecodeOutcome::Unique(Decoded { i: 0, j: 0, k, m })
                );
            }
        }
    }

    #[test]
    fn impossible_symbols_fail() {
        // Y never equals 3 when V is restricted to {0, 1, 2}.
        let ch = WiretapChannel::from_fn([1, 4, 4, 1], vec![1.0], |_, x, y, _| {
            f64::from(u8::from(x == y))
        })
        .unwrap();
        let dims = [1, 1, 3, 4];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 2]);
        let j = build_joint(
            &ch,
            &AuxiliaryScheme::non_causal(dims, vec![1.0 / 3.0; 3], sel).unwrap(),
        )
        .unwrap();
        let cb = Codebook::with_sequences(&j, 3, [1, 1, 1, 1], vec![0; 3], vec![0, 1, 2]).unwrap();
        let out = typicality_decode(&cb, &[3, 3, 3], 0.5);
        assert_eq!(out, DecodeOutcome::NoMatch);
        assert_eq!(out.message_key(), (0, 0));
    }

    #[test]
    fn duplicate_codewords_are_ambiguous() {
        let j = noiseless();
        let v = vec![0, 1, 2, 3, 0, 1, 2, 3];
        let cb = Codebook::with_sequences(&j, 4, [1, 1, 1, 2], vec![0; 4], v).unwrap();
        let out = typicality_decode(&cb, &[0, 1, 2, 3], 0.1);
        assert_eq!(out, DecodeOutcome::Multiple);
        assert!(out.is_failure());
    }
}
