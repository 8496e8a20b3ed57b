//! Auxiliary input designs and the induced joint over `(S, U, V, X, Y, Z)`.

use std::fmt;
use std::ops::BitOr;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::info::{entropy_slice, marginal_flat};
use crate::nested::{flatten, nest};
use crate::prob::{check_row, CondKernel, SUM_TOL};

/// Structure of an auxiliary design.
///
/// `NonCausal` carries a full `p_{SUV}`; the causal modes carry `p_{UV}` with
/// `S` independent. In `Case2*` the effective second-layer variable is
/// `(S, V)`; in `Case3` the first-layer variable is `(S, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeMode {
    NonCausal,
    Case1,
    Case2,
    Case2A,
    Case2B,
    Case3,
}

impl SchemeMode {
    pub const ALL: [SchemeMode; 6] = [
        SchemeMode::NonCausal,
        SchemeMode::Case1,
        SchemeMode::Case2,
        SchemeMode::Case2A,
        SchemeMode::Case2B,
        SchemeMode::Case3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeMode::NonCausal => "NonCausal",
            SchemeMode::Case1 => "Case1",
            SchemeMode::Case2 => "Case2",
            SchemeMode::Case2A => "Case2A",
            SchemeMode::Case2B => "Case2B",
            SchemeMode::Case3 => "Case3",
        }
    }

    pub fn is_causal(self) -> bool {
        self != SchemeMode::NonCausal
    }
}

impl fmt::Display for SchemeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "Case4" {
            return Ok(SchemeMode::Case3);
        }
        SchemeMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown scheme mode `{s}` (expected NonCausal, Case1, Case2, Case2A, Case2B, Case3 or Case4)"
                ))
            })
    }
}

/// A subset of the six joint variables as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarSet(u8);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);
    pub const S: VarSet = VarSet(1);
    pub const U: VarSet = VarSet(2);
    pub const V: VarSet = VarSet(4);
    pub const X: VarSet = VarSet(8);
    pub const Y: VarSet = VarSet(16);
    pub const Z: VarSet = VarSet(32);

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Axis indices in increasing order.
    pub fn axes(self) -> Vec<usize> {
        (0..6).filter(|i| self.0 & (1 << i) != 0).collect()
    }
}

impl BitOr for VarSet {
    type Output = VarSet;
    fn bitor(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 | rhs.0)
    }
}

/// An input design: distribution of the auxiliaries and the input selector.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryScheme {
    mode: SchemeMode,
    dims: [usize; 4],
    input: Vec<f64>,
    selector: CondKernel,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
struct AuxSizes {
    u: usize,
    v: usize,
}

#[derive(Serialize, Deserialize)]
struct AuxFile {
    mode: String,
    sizes: AuxSizes,
    input_dist: Value,
    selector: Value,
}

impl AuxiliaryScheme {
    /// Fully correlated design: `p_suv` is `[s][u][v]`, `selector` is
    /// `p(x | s, u, v)` as `[s][u][v][x]`; `dims` is `[|S|, |U|, |V|, |X|]`.
    pub fn non_causal(dims: [usize; 4], p_suv: Vec<f64>, selector: Vec<f64>) -> Result<Self> {
        let [s, u, v, _] = dims;
        if p_suv.len() != s * u * v {
            return Err(Error::Dimension(format!(
                "p_SUV has {} entries, expected {}",
                p_suv.len(),
                s * u * v
            )));
        }
        check_row(&p_suv, "p_SUV")?;
        Self::assemble(SchemeMode::NonCausal, dims, p_suv, selector)
    }

    /// Causal design with `p_uv` as `[u][v]` independent of the state.
    pub fn causal(
        mode: SchemeMode,
        dims: [usize; 4],
        p_uv: Vec<f64>,
        selector: Vec<f64>,
    ) -> Result<Self> {
        let [_, u, v, _] = dims;
        if mode == SchemeMode::NonCausal {
            return Err(Error::ModeMismatch {
                expected: "a causal mode".into(),
                found: mode.to_string(),
            });
        }
        if mode == SchemeMode::Case2A && u != 1 {
            return Err(Error::Dimension("Case2A requires |U| = 1".into()));
        }
        if mode == SchemeMode::Case2B && v != 1 {
            return Err(Error::Dimension("Case2B requires |V| = 1".into()));
        }
        if p_uv.len() != u * v {
            return Err(Error::Dimension(format!(
                "p_UV has {} entries, expected {}",
                p_uv.len(),
                u * v
            )));
        }
        check_row(&p_uv, "p_UV")?;
        Self::assemble(mode, dims, p_uv, selector)
    }

    fn assemble(
        mode: SchemeMode,
        dims: [usize; 4],
        input: Vec<f64>,
        selector: Vec<f64>,
    ) -> Result<Self> {
        let [s, u, v, x] = dims;
        if dims.contains(&0) {
            return Err(Error::Dimension("empty auxiliary alphabet".into()));
        }
        if selector.len() != s * u * v * x {
            return Err(Error::Dimension(format!(
                "selector has {} entries, expected {}",
                selector.len(),
                s * u * v * x
            )));
        }
        for (r, row) in selector.chunks(x).enumerate() {
            let (si, ui, vi) = (r / (u * v), (r / v) % u, r % v);
            check_row(row, &format!("selector (s={si}, u={ui}, v={vi})"))?;
        }
        let selector = CondKernel::from_flat(s * u * v, x, selector)?;
        Ok(AuxiliaryScheme {
            mode,
            dims,
            input,
            selector,
        })
    }

    /// Expands a deterministic table `x = table[(s * |U| + u) * |V| + v]`.
    pub fn deterministic_selector(dims: [usize; 4], table: &[usize]) -> Vec<f64> {
        let x_n = dims[3];
        let mut out = vec![0.0; table.len() * x_n];
        for (r, &x) in table.iter().enumerate() {
            out[r * x_n + x] = 1.0;
        }
        out
    }

    pub fn mode(&self) -> SchemeMode {
        self.mode
    }

    /// `[|S|, |U|, |V|, |X|]`.
    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    /// Stored input law: `p_SUV` for `NonCausal`, `p_UV` otherwise.
    pub fn input(&self) -> &[f64] {
        &self.input
    }

    pub fn selector(&self) -> &CondKernel {
        &self.selector
    }

    /// `p(x | s, u, v)`.
    pub fn select(&self, s: usize, u: usize, v: usize, x: usize) -> f64 {
        let [_, u_n, v_n, _] = self.dims;
        self.selector.get((s * u_n + u) * v_n + v, x)
    }

    /// `p_in(s, u, v)` given the channel state law.
    pub fn input_suv(&self, state: &[f64]) -> Vec<f64> {
        match self.mode {
            SchemeMode::NonCausal => self.input.clone(),
            _ => state
                .iter()
                .flat_map(|&ps| self.input.iter().map(move |&p| ps * p))
                .collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: AuxFile = serde_json::from_str(text).map_err(Error::from_json)?;
        let mode: SchemeMode = file.mode.parse()?;
        let (u, v) = (file.sizes.u, file.sizes.v);
        let sel_arr = file
            .selector
            .as_array()
            .ok_or_else(|| Error::Dimension("selector is not an array".into()))?;
        let s = sel_arr.len();
        let x = sel_arr
            .first()
            .and_then(|a| a.get(0))
            .and_then(|a| a.get(0))
            .and_then(|a| a.as_array())
            .map(|a| a.len())
            .ok_or_else(|| Error::Dimension("selector must be indexed [s][u][v][x]".into()))?;
        let dims = [s, u, v, x];
        let selector = flatten(&file.selector, &dims, "selector")?;
        match mode {
            SchemeMode::NonCausal => {
                let p = flatten(&file.input_dist, &[s, u, v], "input_dist")?;
                Self::non_causal(dims, p, selector)
            }
            _ => {
                let p = flatten(&file.input_dist, &[u, v], "input_dist")?;
                Self::causal(mode, dims, p, selector)
            }
        }
    }

    pub fn to_json_value(&self) -> Value {
        let [s, u, v, _] = self.dims;
        let input_shape: Vec<usize> = match self.mode {
            SchemeMode::NonCausal => vec![s, u, v],
            _ => vec![u, v],
        };
        let file = AuxFile {
            mode: self.mode.to_string(),
            sizes: AuxSizes { u, v },
            input_dist: nest(&self.input, &input_shape),
            selector: nest(self.selector.as_flat(), &self.dims),
        };
        serde_json::to_value(file).expect("aux design serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("aux design serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// The equivalent fully correlated design (composite variables made
    /// explicit). See [`JointSystem::plugged`].
    pub fn plugged(&self, ch: &WiretapChannel) -> Result<AuxiliaryScheme> {
        let j = build_joint(ch, self)?.plugged();
        let [s_n, u_n, v_n, x_n, _, _] = j.dims();
        let p_suv = j.marginal(VarSet::S | VarSet::U | VarSet::V);
        let p_suvx = j.marginal(VarSet::S | VarSet::U | VarSet::V | VarSet::X);
        let mut selector = vec![0.0; s_n * u_n * v_n * x_n];
        for (r, &p) in p_suv.iter().enumerate() {
            for x in 0..x_n {
                selector[r * x_n + x] = if p > 0.0 {
                    p_suvx[r * x_n + x] / p
                } else {
                    1.0 / x_n as f64
                };
            }
        }
        // Rows with mass come from a valid conditional; renormalize rounding.
        for row in selector.chunks_mut(x_n) {
            let t: f64 = row.iter().sum();
            row.iter_mut().for_each(|q| *q /= t);
        }
        Self::non_causal([s_n, u_n, v_n, x_n], p_suv, selector)
    }
}

/// The joint `p(s, u, v, x, y, z)` induced by a design on a channel.
#[derive(Debug)]
pub struct JointSystem {
    mode: SchemeMode,
    dims: [usize; 6],
    data: Vec<f64>,
    cache: [OnceLock<f64>; 64],
}

impl Clone for JointSystem {
    fn clone(&self) -> Self {
        JointSystem {
            mode: self.mode,
            dims: self.dims,
            data: self.data.clone(),
            cache: self.cache.clone(),
        }
    }
}

/// Builds `p_in(s,u,v) p(x|s,u,v) W(y,z|s,x)`.
pub fn build_joint(ch: &WiretapChannel, aux: &AuxiliaryScheme) -> Result<JointSystem> {
    let [s_n, x_n, y_n, z_n] = ch.dims();
    let [as_n, u_n, v_n, ax_n] = aux.dims();
    if as_n != s_n || ax_n != x_n {
        return Err(Error::Dimension(format!(
            "design has |S| = {as_n}, |X| = {ax_n}; channel has |S| = {s_n}, |X| = {x_n}"
        )));
    }
    let ws = ch.state_dist().as_slice();
    if aux.mode() == SchemeMode::NonCausal {
        for (s, &w) in ws.iter().enumerate() {
            let m: f64 = aux.input()[s * u_n * v_n..(s + 1) * u_n * v_n].iter().sum();
            if (m - w).abs() > SUM_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "S-marginal of p_SUV is {m} at s={s}, state distribution has {w}"
                )));
            }
        }
    }
    let p_in = aux.input_suv(ws);
    let yz = y_n * z_n;
    let mut data = vec![0.0; s_n * u_n * v_n * x_n * yz];
    for s in 0..s_n {
        for u in 0..u_n {
            for v in 0..v_n {
                let r = (s * u_n + u) * v_n + v;
                let p = p_in[r];
                if p == 0.0 {
                    continue;
                }
                for x in 0..x_n {
                    let px = p * aux.selector().get(r, x);
                    if px == 0.0 {
                        continue;
                    }
                    let base = (r * x_n + x) * yz;
                    for (k, &w) in ch.row(s, x).iter().enumerate() {
                        data[base + k] = px * w;
                    }
                }
            }
        }
    }
    Ok(JointSystem::from_parts(
        aux.mode(),
        [s_n, u_n, v_n, x_n, y_n, z_n],
        data,
    ))
}

impl JointSystem {
    pub(crate) fn from_parts(mode: SchemeMode, dims: [usize; 6], data: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        JointSystem {
            mode,
            dims,
            data,
            cache: std::array::from_fn(|_| OnceLock::new()),
        }
    }

    /// Wraps a raw six-way tensor; it must be a distribution.
    pub fn from_tensor(mode: SchemeMode, dims: [usize; 6], data: Vec<f64>) -> Result<Self> {
        if dims.iter().product::<usize>() != data.len() || dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "joint of shape {dims:?} cannot hold {} entries",
                data.len()
            )));
        }
        check_row(&data, "joint")?;
        Ok(Self::from_parts(mode, dims, data))
    }

    pub fn mode(&self) -> SchemeMode {
        self.mode
    }

    /// `[|S|, |U|, |V|, |X|, |Y|, |Z|]`.
    pub fn dims(&self) -> [usize; 6] {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Marginal on `set`, row-major in axis order.
    pub fn marginal(&self, set: VarSet) -> Vec<f64> {
        marginal_flat(&self.dims, &self.data, &set.axes())
    }

    /// `H(set)`, memoized.
    pub fn h(&self, set: VarSet) -> f64 {
        *self.cache[set.bits() as usize].get_or_init(|| entropy_slice(&self.marginal(set)))
    }

    /// `H(a | given)`.
    pub fn h_cond(&self, a: VarSet, given: VarSet) -> f64 {
        (self.h(a | given) - self.h(given)).max(0.0)
    }

    /// `I(a; b | given)` without clamping.
    pub fn mi_raw(&self, a: VarSet, b: VarSet, given: VarSet) -> f64 {
        self.h(a | given) + self.h(b | given) - self.h(a | b | given) - self.h(given)
    }

    /// `I(a; b | given)`, clamped at zero.
    pub fn mi(&self, a: VarSet, b: VarSet, given: VarSet) -> f64 {
        self.mi_raw(a, b, given).max(0.0)
    }

    /// The equivalent `NonCausal` joint with composite auxiliaries.
    ///
    /// * `Case2`, `Case2A`, `Case2B`: `V' = (S, V)` indexed `s * |V| + v`.
    /// * `Case3`: `U' = (S, U)` indexed `s * |U| + u`.
    /// * `Case1`: `U` is dropped, since only `V` enters its rate constraints.
    pub fn plugged(&self) -> JointSystem {
        let [s_n, u_n, v_n, x_n, y_n, z_n] = self.dims;
        let tail = x_n * y_n * z_n;
        match self.mode {
            SchemeMode::NonCausal => {
                let mut j = self.clone();
                j.mode = SchemeMode::NonCausal;
                j
            }
            SchemeMode::Case1 => {
                let data = self.marginal(VarSet::S | VarSet::V | VarSet::X | VarSet::Y | VarSet::Z);
                JointSystem::from_parts(SchemeMode::NonCausal, [s_n, 1, v_n, x_n, y_n, z_n], data)
            }
            SchemeMode::Case2 | SchemeMode::Case2A | SchemeMode::Case2B => {
                let vv = s_n * v_n;
                let mut data = vec![0.0; s_n * u_n * vv * tail];
                for s in 0..s_n {
                    for u in 0..u_n {
                        for v in 0..v_n {
                            let src = ((s * u_n + u) * v_n + v) * tail;
                            let dst = ((s * u_n + u) * vv + s * v_n + v) * tail;
                            data[dst..dst + tail].copy_from_slice(&self.data[src..src + tail]);
                        }
                    }
                }
                JointSystem::from_parts(SchemeMode::NonCausal, [s_n, u_n, vv, x_n, y_n, z_n], data)
            }
            SchemeMode::Case3 => {
                let uu = s_n * u_n;
                let block = v_n * tail;
                let mut data = vec![0.0; s_n * uu * block];
                for s in 0..s_n {
                    for u in 0..u_n {
                        let src = (s * u_n + u) * block;
                        let dst = (s * uu + s * u_n + u) * block;
                        data[dst..dst + block].copy_from_slice(&self.data[src..src + block]);
                    }
                }
                JointSystem::from_parts(SchemeMode::NonCausal, [s_n, uu, v_n, x_n, y_n, z_n], data)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{mutual_information, Tensor};
    use proptest::prelude::*;

    fn identity_channel() -> WiretapChannel {
        WiretapChannel::from_fn([1, 2, 2, 1], vec![1.0], |_, x, y, _| {
            f64::from(u8::from(x == y))
        })
        .unwrap()
    }

    #[test]
    fn selector_copy_gives_one_bit() {
        let ch = identity_channel();
        let dims = [1, 1, 2, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1]);
        let aux = AuxiliaryScheme::causal(SchemeMode::Case1, dims, vec![0.5, 0.5], sel).unwrap();
        let j = build_joint(&ch, &aux).unwrap();
        // Oracle: p(v, y) = p(v) 1[y = v] built by hand.
        let oracle = Tensor::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let want = mutual_information(&oracle).unwrap();
        assert!((j.mi(VarSet::V, VarSet::Y, VarSet::EMPTY) - want).abs() < 1e-12);
        assert!((want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn causal_input_factorizes() {
        let ch = crate::channel::builtin_example("gp-xor").unwrap();
        let dims = [2, 2, 2, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 1, 0, 1, 0, 0, 1]);
        let aux = AuxiliaryScheme::causal(SchemeMode::Case2, dims, vec![0.25; 4], sel).unwrap();
        let j = build_joint(&ch, &aux).unwrap();
        let p = j.marginal(VarSet::S | VarSet::U | VarSet::V);
        let ps = j.marginal(VarSet::S);
        let puv = j.marginal(VarSet::U | VarSet::V);
        for s in 0..2 {
            for r in 0..4 {
                assert_eq!(p[s * 4 + r], ps[s] * puv[r]);
            }
        }
    }

    #[test]
    fn noncausal_marginal_must_match_state() {
        let ch = crate::channel::builtin_example("gp-xor").unwrap();
        let dims = [2, 1, 1, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1]);
        let aux = AuxiliaryScheme::non_causal(dims, vec![0.7, 0.3], sel).unwrap();
        assert!(matches!(
            build_joint(&ch, &aux),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn mode_shape_rules() {
        let dims = [2, 2, 1, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0; 4]);
        assert!(
            AuxiliaryScheme::causal(SchemeMode::Case2A, dims, vec![0.5, 0.5], sel.clone()).is_err()
        );
        assert!(AuxiliaryScheme::causal(SchemeMode::Case2B, dims, vec![0.5, 0.5], sel).is_ok());
        assert_eq!("Case4".parse::<SchemeMode>().unwrap(), SchemeMode::Case3);
        assert!("Case5".parse::<SchemeMode>().is_err());
    }

    #[test]
    fn aux_file_round_trip() {
        let dims = [2, 1, 2, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 1, 0]);
        let aux = AuxiliaryScheme::causal(SchemeMode::Case2A, dims, vec![0.3, 0.7], sel).unwrap();
        let back = AuxiliaryScheme::from_json_str(&aux.to_json_string()).unwrap();
        assert_eq!(aux, back);
        let bad = aux.to_json_string().replace("0.3", "0.2");
        assert!(AuxiliaryScheme::from_json_str(&bad).is_err());
    }

    #[test]
    fn plugging_embeds_state() {
        let ch = crate::channel::builtin_example("fig5").unwrap();
        let dims = [2, 1, 2, 2];
        let sel = AuxiliaryScheme::deterministic_selector(dims, &[0, 1, 1, 0]);
        let aux = AuxiliaryScheme::causal(SchemeMode::Case2A, dims, vec![0.5, 0.5], sel).unwrap();
        let j = build_joint(&ch, &aux).unwrap();
        let p = j.plugged();
        assert_eq!(p.dims(), [2, 1, 4, 2, 2, 2]);
        // S is a function of V' = (S, V).
        assert!(p.h_cond(VarSet::S, VarSet::V) < 1e-12);
        assert!(
            (p.h(VarSet::S | VarSet::V | VarSet::X | VarSet::Y)
                - j.h(VarSet::S | VarSet::V | VarSet::X | VarSet::Y))
            .abs()
                < 1e-12
        );
        let plugged_aux = aux.plugged(&ch).unwrap();
        let j2 = build_joint(&ch, &plugged_aux).unwrap();
        for (a, b) in j2.data().iter().zip(p.data()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    fn random_design() -> impl Strategy<Value = (WiretapChannel, AuxiliaryScheme)> {
        (
            prop::collection::vec(0.01f64..1.0, 2),
            prop::collection::vec(0.01f64..1.0, 32),
            prop::collection::vec(0.01f64..1.0, 8),
            prop::collection::vec(0.0f64..1.0, 16),
        )
            .prop_map(|(ws, w, p, sel)| {
                let norm = |v: &[f64]| {
                    let t: f64 = v.iter().sum();
                    v.iter().map(|x| x / t).collect::<Vec<_>>()
                };
                let ws = norm(&ws);
                let mut kernel = Vec::new();
                for r in 0..4 {
                    kernel.extend(norm(&w[r * 8..r * 8 + 8]));
                }
                let ch = WiretapChannel::from_fn([2, 2, 2, 4], ws.clone(), |s, x, y, z| {
                    kernel[(s * 2 + x) * 8 + y * 4 + z]
                })
                .unwrap();
                let mut p_suv = Vec::new();
                for s in 0..2 {
                    p_suv.extend(norm(&p[s * 4..s * 4 + 4]).into_iter().map(|q| q * ws[s]));
                }
                let mut selector = Vec::new();
                for r in 0..8 {
                    let a = sel[r * 2];
                    let b = sel[r * 2 + 1] + 1e-3;
                    selector.extend([a / (a + b), b / (a + b)]);
                }
                let aux = AuxiliaryScheme::non_causal([2, 2, 2, 2], p_suv, selector).unwrap();
                (ch, aux)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn joint_reproduces_channel((ch, aux) in random_design()) {
            let j = build_joint(&ch, &aux).unwrap();
            let total: f64 = j.data().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            let ps = j.marginal(VarSet::S);
            for (p, q) in ps.iter().zip(ch.state_dist().as_slice()) {
                prop_assert!((p - q).abs() < 1e-9);
            }
            let sx = j.marginal(VarSet::S | VarSet::X);
            let sxyz = j.marginal(VarSet::S | VarSet::X | VarSet::Y | VarSet::Z);
            for s in 0..2 {
                for x in 0..2 {
                    let m = sx[s * 2 + x];
                    if m < 1e-6 { continue; }
                    for k in 0..8 {
                        let cond = sxyz[(s * 2 + x) * 8 + k] / m;
                        prop_assert!((cond - ch.row(s, x)[k]).abs() < 1e-9);
                    }
                }
            }
            // Markov chain UV -> SX -> YZ.
            prop_assert!(j.mi_raw(VarSet::U | VarSet::V, VarSet::Y | VarSet::Z, VarSet::S | VarSet::X).abs() < 1e-9);
        }
    }
}
