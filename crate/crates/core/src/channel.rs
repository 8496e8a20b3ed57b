//! Finite-alphabet wiretap channels with a random state.

use std::fmt;
use std::path::Path;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::info::{binary_entropy, inverse_binary_entropy};
use crate::nested::{flatten, nest};
use crate::prob::{check_row, CondKernel, ProbVector};

/// Residual tolerance of the degradedness feasibility program.
pub const DEGRADED_TOL: f64 = 1e-7;

/// Channel `(S, X, Y, Z, W_S, W_{YZ|SX})`.
///
/// Kernel rows are indexed by `s * |X| + x`; columns by `y * |Z| + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct WiretapChannel {
    dims: [usize; 4],
    state_dist: ProbVector,
    kernel: CondKernel,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
struct Alphabets {
    s: usize,
    x: usize,
    y: usize,
    z: usize,
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    alphabets: Alphabets,
    state_dist: Value,
    kernel: Value,
}

impl WiretapChannel {
    /// `dims` is `[|S|, |X|, |Y|, |Z|]`.
    pub fn new(dims: [usize; 4], state_dist: ProbVector, kernel: CondKernel) -> Result<Self> {
        let [s, x, y, z] = dims;
        if dims.contains(&0) {
            return Err(Error::Dimension("empty alphabet".into()));
        }
        if state_dist.len() != s {
            return Err(Error::Dimension(format!(
                "state distribution has {} entries, |S| = {s}",
                state_dist.len()
            )));
        }
        if kernel.inputs() != s * x || kernel.outputs() != y * z {
            return Err(Error::Dimension(format!(
                "kernel is {}x{}, expected {}x{}",
                kernel.inputs(),
                kernel.outputs(),
                s * x,
                y * z
            )));
        }
        Ok(WiretapChannel {
            dims,
            state_dist,
            kernel,
        })
    }

    /// Builds a channel from a closure `w(s, x, y, z)`.
    pub fn from_fn(
        dims: [usize; 4],
        state_dist: Vec<f64>,
        w: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let [s_n, x_n, y_n, z_n] = dims;
        let mut data = Vec::with_capacity(s_n * x_n * y_n * z_n);
        for s in 0..s_n {
            for x in 0..x_n {
                for y in 0..y_n {
                    for z in 0..z_n {
                        data.push(w(s, x, y, z));
                    }
                }
            }
        }
        Self::from_flat(dims, state_dist, data)
    }

    fn from_flat(dims: [usize; 4], state_dist: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        let [s_n, x_n, y_n, z_n] = dims;
        if data.len() != s_n * x_n * y_n * z_n {
            return Err(Error::Dimension(
                "kernel size does not match alphabets".into(),
            ));
        }
        check_row(&state_dist, "state_dist")?;
        for s in 0..s_n {
            for x in 0..x_n {
                let r = s * x_n + x;
                check_row(
                    &data[r * y_n * z_n..(r + 1) * y_n * z_n],
                    &format!("(s={s}, x={x})"),
                )?;
            }
        }
        let kernel = CondKernel::from_flat(s_n * x_n, y_n * z_n, data)?;
        Self::new(dims, ProbVector::new(state_dist)?, kernel)
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn s_size(&self) -> usize {
        self.dims[0]
    }

    pub fn x_size(&self) -> usize {
        self.dims[1]
    }

    pub fn y_size(&self) -> usize {
        self.dims[2]
    }

    pub fn z_size(&self) -> usize {
        self.dims[3]
    }

    pub fn state_dist(&self) -> &ProbVector {
        &self.state_dist
    }

    pub fn kernel(&self) -> &CondKernel {
        &self.kernel
    }

    /// `W(y, z | s, x)`.
    pub fn w(&self, s: usize, x: usize, y: usize, z: usize) -> f64 {
        self.kernel.get(s * self.dims[1] + x, y * self.dims[3] + z)
    }

    /// Joint law of `(Y, Z)` given `(s, x)`, flattened as `y * |Z| + z`.
    pub fn row(&self, s: usize, x: usize) -> &[f64] {
        self.kernel.row(s * self.dims[1] + x)
    }

    /// `W_{Y|SX}(· | s, x)`.
    pub fn y_law(&self, s: usize, x: usize) -> Vec<f64> {
        let z_n = self.dims[3];
        self.row(s, x).chunks(z_n).map(|c| c.iter().sum()).collect()
    }

    /// `W_{Z|SX}(· | s, x)`.
    pub fn z_law(&self, s: usize, x: usize) -> Vec<f64> {
        let z_n = self.dims[3];
        let mut out = vec![0.0; z_n];
        for (i, &p) in self.row(s, x).iter().enumerate() {
            out[i % z_n] += p;
        }
        out
    }

    /// The same channel with the roles of Bob and Eve exchanged.
    pub fn swap_outputs(&self) -> Self {
        let [s_n, x_n, y_n, z_n] = self.dims;
        Self::from_fn(
            [s_n, x_n, z_n, y_n],
            self.state_dist.as_slice().to_vec(),
            |s, x, z, y| self.w(s, x, y, z),
        )
        .expect("swapping outputs preserves validity")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(text).map_err(Error::from_json)?;
        let a = &file.alphabets;
        let dims = [a.s, a.x, a.y, a.z];
        if dims.contains(&0) {
            return Err(Error::Dimension("alphabet sizes must be positive".into()));
        }
        let state = flatten(&file.state_dist, &[a.s], "state_dist")?;
        let data = flatten(&file.kernel, &dims, "kernel")?;
        Self::from_flat(dims, state, data)
    }

    pub fn to_json_string(&self) -> String {
        let [s, x, y, z] = self.dims;
        let file = ChannelFile {
            alphabets: Alphabets { s, x, y, z },
            state_dist: nest(self.state_dist.as_slice(), &[s]),
            kernel: nest(self.kernel.as_flat(), &self.dims),
        };
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Reads and validates a channel file.
pub fn load_channel(path: &Path) -> Result<WiretapChannel> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    WiretapChannel::from_json_str(&text)
}

/// Degradedness classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Degradedness {
    Degraded,
    ReverselyDegraded,
    Neither,
}

impl fmt::Display for Degradedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Degradedness::Degraded => "Degraded",
            Degradedness::ReverselyDegraded => "ReverselyDegraded",
            Degradedness::Neither => "Neither",
        };
        f.write_str(name)
    }
}

/// Both directions of the degradedness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegradednessFlags {
    /// `Z` is a per-state stochastic function of `Y`.
    pub degraded: bool,
    /// `Y` is a per-state stochastic function of `Z`.
    pub reversely: bool,
}

/// Classifies the channel; `Degraded` wins when both directions hold.
pub fn check_degraded(ch: &WiretapChannel) -> Degradedness {
    let flags = degradedness_flags(ch);
    if flags.degraded {
        Degradedness::Degraded
    } else if flags.reversely {
        Degradedness::ReverselyDegraded
    } else {
        Degradedness::Neither
    }
}

pub fn degradedness_flags(ch: &WiretapChannel) -> DegradednessFlags {
    let [s_n, x_n, _, _] = ch.dims();
    let y_rows = |s: usize| (0..x_n).map(|x| ch.y_law(s, x)).collect::<Vec<_>>();
    let z_rows = |s: usize| (0..x_n).map(|x| ch.z_law(s, x)).collect::<Vec<_>>();
    let degraded = (0..s_n).all(|s| stochastic_factor_exists(&y_rows(s), &z_rows(s)));
    let reversely = (0..s_n).all(|s| stochastic_factor_exists(&z_rows(s), &y_rows(s)));
    DegradednessFlags {
        degraded,
        reversely,
    }
}

/// Whether some row-stochastic `Q` satisfies `target[x] = Σ_a source[x][a] Q[a]`.
///
/// Minimizes the total absolute residual with an LP and compares it to
/// [`DEGRADED_TOL`].
fn stochastic_factor_exists(source: &[Vec<f64>], target: &[Vec<f64>]) -> bool {
    let a_n = source[0].len();
    let b_n = target[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let q: Vec<Vec<_>> = (0..a_n)
        .map(|_| (0..b_n).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect())
        .collect();
    for row in &q {
        lp.add_constraint(row.iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, 1.0);
    }
    for (src, tgt) in source.iter().zip(target) {
        for b in 0..b_n {
            let plus = lp.add_var(1.0, (0.0, f64::INFINITY));
            let minus = lp.add_var(1.0, (0.0, f64::INFINITY));
            let mut terms: Vec<_> = (0..a_n)
                .filter(|&a| src[a] != 0.0)
                .map(|a| (q[a][b], src[a]))
                .collect();
            terms.push((plus, 1.0));
            terms.push((minus, -1.0));
            lp.add_constraint(terms, ComparisonOp::Eq, tgt[b]);
        }
    }
    match lp.solve() {
        Ok(sol) => sol.objective() <= DEGRADED_TOL,
        Err(_) => false,
    }
}

/// Side information `p(s_a, s_b, s_e | s)`: Alice, Bob and Eve observe
/// correlated versions of the channel state.
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfo {
    dims: [usize; 4],
    kernel: CondKernel,
}

#[derive(Serialize, Deserialize)]
struct SideAlphabets {
    #[serde(rename = "S")]
    s: usize,
    #[serde(rename = "Sa")]
    sa: usize,
    #[serde(rename = "Sb")]
    sb: usize,
    #[serde(rename = "Se")]
    se: usize,
}

#[derive(Serialize, Deserialize)]
struct SideInfoFile {
    alphabets: SideAlphabets,
    kernel: Value,
}

impl SideInfo {
    /// `dims` is `[|S|, |S_a|, |S_b|, |S_e|]`; rows indexed by `s`, columns by
    /// `(sa * |S_b| + sb) * |S_e| + se`.
    pub fn new(dims: [usize; 4], kernel: CondKernel) -> Result<Self> {
        let [s, sa, sb, se] = dims;
        if kernel.inputs() != s || kernel.outputs() != sa * sb * se {
            return Err(Error::Dimension(format!(
                "side information kernel is {}x{}, expected {}x{}",
                kernel.inputs(),
                kernel.outputs(),
                s,
                sa * sb * se
            )));
        }
        Ok(SideInfo { dims, kernel })
    }

    pub fn from_fn(
        dims: [usize; 4],
        p: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let [s_n, a_n, b_n, e_n] = dims;
        let mut data = Vec::new();
        for s in 0..s_n {
            for a in 0..a_n {
                for b in 0..b_n {
                    for e in 0..e_n {
                        data.push(p(s, a, b, e));
                    }
                }
            }
        }
        Self::new(dims, CondKernel::from_flat(s_n, a_n * b_n * e_n, data)?)
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn get(&self, s: usize, sa: usize, sb: usize, se: usize) -> f64 {
        let [_, _, b_n, e_n] = self.dims;
        self.kernel.get(s, (sa * b_n + sb) * e_n + se)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SideInfoFile = serde_json::from_str(text).map_err(Error::from_json)?;
        let a = &file.alphabets;
        let dims = [a.s, a.sa, a.sb, a.se];
        if dims.contains(&0) {
            return Err(Error::Dimension("alphabet sizes must be positive".into()));
        }
        let data = flatten(&file.kernel, &dims, "kernel")?;
        let width = a.sa * a.sb * a.se;
        for (s, row) in data.chunks(width).enumerate() {
            check_row(row, &format!("(s={s})"))?;
        }
        Self::new(dims, CondKernel::from_flat(a.s, width, data)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}

/// Reduces a channel with three correlated state observations to an ordinary
/// channel with state `S_a` at Alice, Bob output `(S_b, Y)` and Eve output
/// `(S_e, Z)`.
///
/// Composite outputs are indexed `sb * |Y| + y` and `se * |Z| + z`. A state
/// value `s_a` of probability zero gets the kernel of the prior mixture.
pub fn transform_general_csi(ch: &WiretapChannel, side: &SideInfo) -> Result<WiretapChannel> {
    let [s_n, x_n, y_n, z_n] = ch.dims();
    let [side_s, a_n, b_n, e_n] = side.dims();
    if side_s != s_n {
        return Err(Error::Dimension(format!(
            "side information expects |S| = {side_s}, channel has {s_n}"
        )));
    }
    let ws = ch.state_dist().as_slice();
    let p_a: Vec<f64> = (0..a_n)
        .map(|a| {
            (0..s_n)
                .map(|s| {
                    let mut m = 0.0;
                    for b in 0..b_n {
                        for e in 0..e_n {
                            m += side.get(s, a, b, e);
                        }
                    }
                    ws[s] * m
                })
                .sum()
        })
        .collect();
    let weight = |s: usize, a: usize, b: usize, e: usize| -> f64 {
        if p_a[a] > 0.0 {
            ws[s] * side.get(s, a, b, e) / p_a[a]
        } else {
            // Unreachable s_a: prior on S, then p(b, e | s, a) where defined.
            let pa_s: f64 = (0..b_n)
                .flat_map(|bb| (0..e_n).map(move |ee| (bb, ee)))
                .map(|(bb, ee)| side.get(s, a, bb, ee))
                .sum();
            if pa_s > 0.0 {
                ws[s] * side.get(s, a, b, e) / pa_s
            } else {
                ws[s] / (b_n * e_n) as f64
            }
        }
    };
    let dims = [a_n, x_n, b_n * y_n, e_n * z_n];
    let p_a_norm: f64 = p_a.iter().sum();
    let state: Vec<f64> = p_a.iter().map(|p| p / p_a_norm).collect();
    let out = WiretapChannel::from_fn(dims, state, |a, x, yy, zz| {
        let (b, y) = (yy / y_n, yy % y_n);
        let (e, z) = (zz / z_n, zz % z_n);
        (0..s_n)
            .map(|s| weight(s, a, b, e) * ch.w(s, x, y, z))
            .sum()
    })?;
    Ok(out)
}

/// Default flip probability of the `fig7` family.
pub const FIG7_DEFAULT_FLIP: f64 = 0.1;

/// Registry names accepted by [`builtin_example`].
pub const BUILTIN_NAMES: &[&str] = &["fig5", "fig6", "fig7", "fig7:<flip>", "gp-xor"];

fn bsc(flip: f64, a: usize, b: usize) -> f64 {
    if a == b {
        1.0 - flip
    } else {
        flip
    }
}

/// Binary state law `(1 - p, p)` with `p ≤ 1/2` and `h(p) = entropy`.
fn state_with_entropy(entropy: f64) -> Result<Vec<f64>> {
    let p = inverse_binary_entropy(entropy)?;
    Ok(vec![1.0 - p, p])
}

/// Reversely degraded binary channel whose kernel ignores the state:
/// `Z = X`, `Y = X` through a flip of probability `flip`.
pub fn reversely_degraded_binary(flip: f64, state_entropy: f64) -> Result<WiretapChannel> {
    if !(0.0..=0.5).contains(&flip) {
        return Err(Error::InvalidArgument(format!(
            "flip {flip} outside [0, 0.5]"
        )));
    }
    WiretapChannel::from_fn(
        [2, 2, 2, 2],
        state_with_entropy(state_entropy)?,
        |_, x, y, z| bsc(flip, x, y) * if z == x { 1.0 } else { 0.0 },
    )
}

/// Channels used by the worked binary examples.
///
/// * `fig5`: `Z = X`, `Y = X` through flip 0.1, `H(S) = 1 - h(0.1)`.
/// * `fig6`: no state, `Y = X`, `Z = Y` through flip 0.1.
/// * `fig7[:flip]`: like `fig5` with `H(S) = 1 - h(0.2)` and a configurable flip.
/// * `gp-xor`: uniform binary state, `Y = X xor S`, constant `Z`.
pub fn builtin_example(name: &str) -> Result<WiretapChannel> {
    let h = |p: f64| binary_entropy(p).expect("valid probability");
    match name {
        "fig5" => reversely_degraded_binary(0.1, 1.0 - h(0.1)),
        "fig6" => WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            if y == x {
                bsc(0.1, y, z)
            } else {
                0.0
            }
        }),
        "fig7" => reversely_degraded_binary(FIG7_DEFAULT_FLIP, 1.0 - h(0.2)),
        "gp-xor" => WiretapChannel::from_fn([2, 2, 2, 1], vec![0.5, 0.5], |s, x, y, _| {
            if y == s ^ x {
                1.0
            } else {
                0.0
            }
        }),
        other => {
            if let Some(flip) = other.strip_prefix("fig7:") {
                let flip: f64 = flip
                    .parse()
                    .map_err(|_| Error::UnknownExample(other.to_string()))?;
                reversely_degraded_binary(flip, 1.0 - h(0.2))
            } else {
                Err(Error::UnknownExample(other.to_string()))
            }
        }
    }
}
