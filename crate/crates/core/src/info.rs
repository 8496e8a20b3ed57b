//! Shannon measures in bits over small dense joint tensors.
//!
//! Conventions: `0 log 0 = 0`, and `p log(p/0) = +inf` for `p > 0`.
//! Marginals are always accumulated by a single pass in row-major order so
//! repeated evaluations are bit-identical.

use crate::error::{Error, Result};
use crate::prob::{ProbVector, SUM_TOL, ZERO_TOL};

/// A dense joint probability tensor in row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Validates shape, nonnegativity and unit mass.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let t = Self::new_unchecked(shape, data)?;
        if t.data.iter().any(|&p| p < 0.0 || p.is_nan()) {
            return Err(Error::InvalidDistribution("negative tensor entry".into()));
        }
        let total: f64 = t.data.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "tensor is not normalized (total mass {total})"
            )));
        }
        Ok(t)
    }

    /// Only checks that `data` fits `shape`.
    pub(crate) fn new_unchecked(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if size != data.len() || shape.contains(&0) {
            return Err(Error::Dimension(format!(
                "tensor of shape {:?} cannot hold {} entries",
                shape,
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Marginal onto `keep`, which must be strictly increasing axis indices.
    pub fn marginal(&self, keep: &[usize]) -> Tensor {
        Tensor {
            shape: keep.iter().map(|&a| self.shape[a]).collect(),
            data: marginal_flat(&self.shape, &self.data, keep),
        }
    }

    /// Entropy of the marginal on `axes`.
    pub fn entropy_of(&self, axes: &[usize]) -> f64 {
        entropy_slice(&marginal_flat(&self.shape, &self.data, axes))
    }

    /// `I(A;B|C)` between axis groups, unclamped.
    pub fn cmi_raw(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let union = |xs: &[&[usize]]| {
            let mut v: Vec<usize> = xs.iter().flat_map(|s| s.iter().copied()).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        self.entropy_of(&union(&[a, c])) + self.entropy_of(&union(&[b, c]))
            - self.entropy_of(&union(&[a, b, c]))
            - self.entropy_of(&union(&[c]))
    }
}

/// Sums `data` onto the axes in `keep` (strictly increasing).
pub(crate) fn marginal_flat(shape: &[usize], data: &[f64], keep: &[usize]) -> Vec<f64> {
    debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
    let rank = shape.len();
    // Stride of each source axis inside the marginal; zero for summed axes.
    let mut out_stride = vec![0usize; rank];
    let mut acc = 1usize;
    for &axis in keep.iter().rev() {
        out_stride[axis] = acc;
        acc *= shape[axis];
    }
    let mut out = vec![0.0; acc];
    if keep.len() == rank {
        out.copy_from_slice(data);
        return out;
    }
    let mut idx = vec![0usize; rank];
    let mut target = 0usize;
    for &p in data {
        out[target] += p;
        for axis in (0..rank).rev() {
            idx[axis] += 1;
            target += out_stride[axis];
            if idx[axis] < shape[axis] {
                break;
            }
            target -= out_stride[axis] * shape[axis];
            idx[axis] = 0;
        }
    }
    out
}

/// Entropy of a mass function given as a slice, in bits.
pub fn entropy_slice(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

pub fn entropy(p: &ProbVector) -> f64 {
    entropy_slice(p.as_slice())
}

/// `h(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "binary entropy argument {p} outside [0, 1]"
        )));
    }
    Ok(entropy_slice(&[p, 1.0 - p]))
}

/// Inverse of `h` on `[0, 1/2]`, by bisection.
pub fn inverse_binary_entropy(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "entropy {h} outside [0, 1]"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy_slice(&[mid, 1.0 - mid]) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_rank(joint: &Tensor, rank: usize) -> Result<()> {
    if joint.rank() != rank {
        return Err(Error::Dimension(format!(
            "expected a rank-{rank} joint, got shape {:?}",
            joint.shape()
        )));
    }
    Ok(())
}

fn require_normalized(joint: &Tensor) -> Result<()> {
    let total: f64 = joint.data().iter().sum();
    if (total - 1.0).abs() > SUM_TOL || joint.data().iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "joint is not normalized (total mass {total})"
        )));
    }
    Ok(())
}

/// `H(A|B)` for a joint over `(A, B)`.
pub fn conditional_entropy(joint: &Tensor) -> Result<f64> {
    require_rank(joint, 2)?;
    require_normalized(joint)?;
    Ok((joint.entropy_of(&[0, 1]) - joint.entropy_of(&[1])).max(0.0))
}

/// `I(A;B)` for a joint over `(A, B)`, clamped at zero.
pub fn mutual_information(joint: &Tensor) -> Result<f64> {
    require_rank(joint, 2)?;
    require_normalized(joint)?;
    Ok(joint.cmi_raw(&[0], &[1], &[]).max(0.0))
}

/// `I(A;B|C)` for a joint over `(A, B, C)`, clamped at zero.
pub fn conditional_mutual_information(joint: &Tensor) -> Result<f64> {
    require_rank(joint, 3)?;
    require_normalized(joint)?;
    Ok(joint.cmi_raw(&[0], &[1], &[2]).max(0.0))
}

/// `D(p || q)` in bits; `+inf` when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> f64 {
    kl_slice(p.as_slice(), q.as_slice())
}

pub(crate) fn kl_slice(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "kl divergence of different lengths");
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= ZERO_TOL && pi > ZERO_TOL {
            return f64::INFINITY;
        }
        if qi > 0.0 {
            d += pi * (pi / qi).log2();
        }
    }
    d.max(0.0)
}

/// `½ Σ |p - q|`.
pub fn total_variation(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "total variation between lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(tv_slice(p.as_slice(), q.as_slice()))
}

pub(crate) fn tv_slice(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
