//! Rate-region evaluators.
//!
//! Every bound is a two-constraint polytope
//! `{R_M, R_K ≥ 0, R_M ≤ cM, R_M + R_K ≤ cSum}`. Caps are kept signed;
//! clamping happens when the polytope is projected or assembled into a
//! frontier.
//!
//! | id | cM | cSum |
//! |----|----|------|
//! | `NC_Inner_T1` | I(UV;Y) − I(UV;S) | I(V;Y\|U) − I(V;Z\|U) − [I(U;S) − I(U;Y)]⁺ |
//! | `NC_ED_Region_T3` | I(UV;Y\|S) | I(V;Y\|SU) − I(V;Z\|SU) + H(S\|ZU) |
//! | `C_Case1` | I(V;Y) | I(V;Y) − I(V;Z) |
//! | `C_TypeI_Case2` | I(USV;Y) − H(S) | I(SV;Y\|U) − I(SV;Z\|U) |
//! | `C_Case2A` | I(SV;Y) − H(S) | I(SV;Y) − I(SV;Z) |
//! | `C_Case2B` | I(U;Y) − H(S\|UY) | H(S\|UZ) − H(S\|UY) |
//! | `C_TypeII_Case3` | I(USV;Y) − H(S) | I(V;Y\|SU) − I(V;Z\|SU) − [H(S) − I(SU;Y)]⁺ |
//! | `C_ED_Cor4` | I(V;Y\|S) | I(V;Y\|S) − I(V;Z\|S) + H(S\|Z) |
//! | `C_ED_Cor5` | I(U;Y\|S) | H(S\|UZ) |
//! | `D_Region_T4` | I(X;Y\|S) | I(X;Y\|S) − I(X;Z\|S) + H(S\|Z) |
//! | `E_Outer_T5` | I(X;Y\|S) | I(X;Y\|S) − I(X;Z\|S) + H(S\|Z) − H(S\|Y) |
//! | `StateRepro_Outer` | I(USV;Y) − H(S) | I(SV;Y\|U) − I(SV;Z\|U) |
//!
//! `T1`, `T3`, `T4`, `T5` and `StateRepro_Outer` are non-causal or outer
//! bounds; the `C_*` ids are causal inner bounds; the `ED` ids assume the
//! state is also known to the legitimate receiver.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::info::Tensor;
use crate::prob::SUM_TOL;
use crate::scheme::{build_joint, AuxiliaryScheme, JointSystem, SchemeMode, VarSet};

/// Tolerance of the `cM ≥ 0` feasibility gate on secret-key projections.
pub const GATE_TOL: f64 = 1e-9;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundId {
    NC_Inner_T1,
    NC_ED_Region_T3,
    C_Case1,
    C_TypeI_Case2,
    C_Case2A,
    C_Case2B,
    C_TypeII_Case3,
    C_ED_Cor4,
    C_ED_Cor5,
    D_Region_T4,
    E_Outer_T5,
    StateRepro_Outer,
}

impl BoundId {
    pub const ALL: [BoundId; 12] = [
        BoundId::NC_Inner_T1,
        BoundId::NC_ED_Region_T3,
        BoundId::C_Case1,
        BoundId::C_TypeI_Case2,
        BoundId::C_Case2A,
        BoundId::C_Case2B,
        BoundId::C_TypeII_Case3,
        BoundId::C_ED_Cor4,
        BoundId::C_ED_Cor5,
        BoundId::D_Region_T4,
        BoundId::E_Outer_T5,
        BoundId::StateRepro_Outer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::NC_Inner_T1 => "NC_Inner_T1",
            BoundId::NC_ED_Region_T3 => "NC_ED_Region_T3",
            BoundId::C_Case1 => "C_Case1",
            BoundId::C_TypeI_Case2 => "C_TypeI_Case2",
            BoundId::C_Case2A => "C_Case2A",
            BoundId::C_Case2B => "C_Case2B",
            BoundId::C_TypeII_Case3 => "C_TypeII_Case3",
            BoundId::C_ED_Cor4 => "C_ED_Cor4",
            BoundId::C_ED_Cor5 => "C_ED_Cor5",
            BoundId::D_Region_T4 => "D_Region_T4",
            BoundId::E_Outer_T5 => "E_Outer_T5",
            BoundId::StateRepro_Outer => "StateRepro_Outer",
        }
    }

    /// The design structure searched for this bound.
    pub fn design_mode(self) -> SchemeMode {
        match self {
            BoundId::NC_Inner_T1
            | BoundId::NC_ED_Region_T3
            | BoundId::StateRepro_Outer
            | BoundId::D_Region_T4
            | BoundId::E_Outer_T5 => SchemeMode::NonCausal,
            BoundId::C_Case1 => SchemeMode::Case1,
            BoundId::C_TypeI_Case2 => SchemeMode::Case2,
            BoundId::C_Case2A | BoundId::C_ED_Cor4 => SchemeMode::Case2A,
            BoundId::C_Case2B | BoundId::C_ED_Cor5 => SchemeMode::Case2B,
            BoundId::C_TypeII_Case3 => SchemeMode::Case3,
        }
    }

    /// Whether the bound's formulas apply to a joint built in `mode` with
    /// auxiliary sizes `u`, `v`.
    pub fn accepts(self, mode: SchemeMode, u: usize, v: usize) -> bool {
        use SchemeMode::*;
        match self {
            BoundId::NC_Inner_T1 => mode == NonCausal || (mode == Case1 && u == 1),
            BoundId::NC_ED_Region_T3
            | BoundId::D_Region_T4
            | BoundId::E_Outer_T5
            | BoundId::StateRepro_Outer => true,
            BoundId::C_Case1 => mode == Case1,
            BoundId::C_TypeI_Case2 => matches!(mode, Case2 | Case2A | Case2B),
            BoundId::C_Case2A => mode == Case2A || (mode == Case2 && u == 1),
            BoundId::C_Case2B => mode == Case2B || (mode == Case2 && v == 1),
            BoundId::C_TypeII_Case3 => mode == Case3,
            BoundId::C_ED_Cor4 => mode == Case2A || (matches!(mode, Case2 | Case1) && u == 1),
            BoundId::C_ED_Cor5 => mode == Case2B || (mode == Case2 && v == 1),
        }
    }

    pub fn is_causal(self) -> bool {
        self.design_mode().is_causal()
    }

    fn valid_list() -> String {
        BoundId::ALL.map(BoundId::name).join(", ")
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownBound {
                name: s.to_string(),
                valid: BoundId::valid_list(),
            })
    }
}

/// `{R_M, R_K ≥ 0, R_M ≤ cM, R_M + R_K ≤ cSum}` with signed caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePolytope {
    pub c_m: f64,
    pub c_sum: f64,
    pub bound: BoundId,
}

impl RatePolytope {
    /// The non-trivial corner `(a, b - a)` with `a = min(cM⁺, cSum⁺)`, `b = cSum⁺`.
    pub fn corner(&self) -> (f64, f64) {
        let b = self.c_sum.max(0.0);
        let a = self.c_m.max(0.0).min(b);
        (a, b - a)
    }

    pub fn contains(&self, r_m: f64, r_k: f64, tol: f64) -> bool {
        let (a, _) = self.corner();
        r_m >= -tol && r_k >= -tol && r_m <= a + tol && r_m + r_k <= self.c_sum.max(0.0) + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    SM,
    SK,
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SM" | "sm" => Ok(Axis::SM),
            "SK" | "sk" => Ok(Axis::SK),
            _ => Err(Error::InvalidArgument(format!(
                "unknown axis `{s}` (SM or SK)"
            ))),
        }
    }
}

/// A scalar projection of a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projection {
    /// Clamped value, meaningful when `feasible`.
    pub value: f64,
    /// Unclamped value used for comparisons across bounds.
    pub signed: f64,
    /// False when the SK gate `cM ≥ -GATE_TOL` fails.
    pub feasible: bool,
}

/// SM: `min(cM, cSum)`. SK: `cSum`, only when the region admits `R_M = 0`,
/// i.e. `cM ≥ -GATE_TOL`.
pub fn scalar_projection(poly: &RatePolytope, axis: Axis) -> Projection {
    match axis {
        Axis::SM => {
            let signed = poly.c_m.min(poly.c_sum);
            Projection {
                value: signed.max(0.0),
                signed,
                feasible: true,
            }
        }
        Axis::SK => Projection {
            value: poly.c_sum.max(0.0),
            signed: poly.c_sum,
            feasible: poly.c_m >= -GATE_TOL,
        },
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn require(bound: BoundId, j: &JointSystem) -> Result<()> {
    let [_, u, v, ..] = j.dims();
    if bound.accepts(j.mode(), u, v) {
        Ok(())
    } else {
        Err(Error::ModeMismatch {
            expected: bound.to_string(),
            found: format!("{} (|U|={u}, |V|={v})", j.mode()),
        })
    }
}

const E: VarSet = VarSet::EMPTY;
const S: VarSet = VarSet::S;
const U: VarSet = VarSet::U;
const V: VarSet = VarSet::V;
const X: VarSet = VarSet::X;
const Y: VarSet = VarSet::Y;
const Z: VarSet = VarSet::Z;

fn polytope(bound: BoundId, c_m: f64, c_sum: f64) -> RatePolytope {
    RatePolytope { c_m, c_sum, bound }
}

fn nc_inner_caps(j: &JointSystem) -> (f64, f64) {
    let c_m = j.mi(U | V, Y, E) - j.mi(U | V, S, E);
    let c_sum = j.mi(V, Y, U) - j.mi(V, Z, U) - pos(j.mi(U, S, E) - j.mi(U, Y, E));
    (c_m, c_sum)
}

fn type_one_caps(j: &JointSystem) -> (f64, f64) {
    (
        j.mi(U | S | V, Y, E) - j.h(S),
        j.mi(S | V, Y, U) - j.mi(S | V, Z, U),
    )
}

/// Non-causal inner bound.
pub fn eval_nc_inner(j: &JointSystem) -> Result<RatePolytope> {
    require(BoundId::NC_Inner_T1, j)?;
    let (c_m, c_sum) = nc_inner_caps(j);
    Ok(polytope(BoundId::NC_Inner_T1, c_m, c_sum))
}

/// Non-causal region with state known at both legitimate ends. Composite
/// causal joints are evaluated on their plugged form.
pub fn eval_nc_ed_region(j: &JointSystem) -> Result<RatePolytope> {
    let plugged;
    let j = if matches!(j.mode(), SchemeMode::NonCausal | SchemeMode::Case1) {
        j
    } else {
        plugged = j.plugged();
        &plugged
    };
    let c_m = j.mi(U | V, Y, S);
    let c_sum = j.mi(V, Y, S | U) - j.mi(V, Z, S | U) + j.h_cond(S, Z | U);
    Ok(polytope(BoundId::NC_ED_Region_T3, c_m, c_sum))
}

/// Causal inner bounds for Cases 1 to 3.
pub fn eval_causal_case(case: BoundId, j: &JointSystem) -> Result<RatePolytope> {
    require(case, j)?;
    let (c_m, c_sum) = match case {
        BoundId::C_Case1 => (j.mi(V, Y, E), j.mi(V, Y, E) - j.mi(V, Z, E)),
        BoundId::C_TypeI_Case2 => type_one_caps(j),
        BoundId::C_Case2A => (
            j.mi(S | V, Y, E) - j.h(S),
            j.mi(S | V, Y, E) - j.mi(S | V, Z, E),
        ),
        BoundId::C_Case2B => (
            j.mi(U, Y, E) - j.h_cond(S, U | Y),
            j.h_cond(S, U | Z) - j.h_cond(S, U | Y),
        ),
        BoundId::C_TypeII_Case3 => (
            j.mi(U | S | V, Y, E) - j.h(S),
            j.mi(V, Y, S | U) - j.mi(V, Z, S | U) - pos(j.h(S) - j.mi(S | U, Y, E)),
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} is not a causal case bound"
            )))
        }
    };
    Ok(polytope(case, c_m, c_sum))
}

/// Causal inner bounds with the state also available to the legitimate receiver.
pub fn eval_causal_ed(case: BoundId, j: &JointSystem) -> Result<RatePolytope> {
    require(case, j)?;
    let (c_m, c_sum) = match case {
        BoundId::C_ED_Cor4 => {
            let iy = j.mi(V, Y, S);
            (iy, iy - j.mi(V, Z, S) + j.h_cond(S, Z))
        }
        BoundId::C_ED_Cor5 => (j.mi(U, Y, S), j.h_cond(S, U | Z)),
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} is not a causal bound with receiver state"
            )))
        }
    };
    Ok(polytope(case, c_m, c_sum))
}

fn degraded_caps(j: &JointSystem) -> (f64, f64) {
    let iy = j.mi(X, Y, S);
    (iy, iy - j.mi(X, Z, S) + j.h_cond(S, Z))
}

/// A joint over the channel from an input law `p_SX` (`[s][x]`), with
/// trivial auxiliaries.
pub fn joint_from_input(ch: &WiretapChannel, p_sx: &Tensor) -> Result<JointSystem> {
    let [s_n, x_n, _, _] = ch.dims();
    if p_sx.shape() != [s_n, x_n] {
        return Err(Error::Dimension(format!(
            "p_SX has shape {:?}, expected [{s_n}, {x_n}]",
            p_sx.shape()
        )));
    }
    let data = p_sx.data();
    let mut selector = Vec::with_capacity(s_n * x_n);
    for s in 0..s_n {
        let row = &data[s * x_n..(s + 1) * x_n];
        let m: f64 = row.iter().sum();
        let w = ch.state_dist()[s];
        if (m - w).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "S-marginal of p_SX is {m} at s={s}, state distribution has {w}"
            )));
        }
        if m > 0.0 {
            selector.extend(row.iter().map(|p| p / m));
        } else {
            selector.extend(std::iter::repeat_n(1.0 / x_n as f64, x_n));
        }
    }
    let aux = AuxiliaryScheme::non_causal(
        [s_n, 1, 1, x_n],
        ch.state_dist().as_slice().to_vec(),
        selector,
    )?;
    build_joint(ch, &aux)
}

/// Degraded-channel region from an input law `p_SX`.
pub fn eval_degraded_region(ch: &WiretapChannel, p_sx: &Tensor) -> Result<RatePolytope> {
    let j = joint_from_input(ch, p_sx)?;
    let (c_m, c_sum) = degraded_caps(&j);
    Ok(polytope(BoundId::D_Region_T4, c_m, c_sum))
}

/// Outer bound from an input law `p_SX`.
pub fn eval_outer_e(ch: &WiretapChannel, p_sx: &Tensor) -> Result<RatePolytope> {
    let j = joint_from_input(ch, p_sx)?;
    let (c_m, c_sum) = degraded_caps(&j);
    Ok(polytope(BoundId::E_Outer_T5, c_m, c_sum - j.h_cond(S, Y)))
}

/// Outer bound for state-reproducing schemes: type-I formulas on any joint.
pub fn eval_state_repro_outer(j: &JointSystem) -> Result<RatePolytope> {
    let (c_m, c_sum) = type_one_caps(j);
    Ok(polytope(BoundId::StateRepro_Outer, c_m, c_sum))
}

/// Evaluates any bound on a joint, checking mode compatibility.
pub fn evaluate(bound: BoundId, j: &JointSystem) -> Result<RatePolytope> {
    match bound {
        BoundId::NC_Inner_T1 => eval_nc_inner(j),
        BoundId::NC_ED_Region_T3 => eval_nc_ed_region(j),
        BoundId::C_ED_Cor4 | BoundId::C_ED_Cor5 => eval_causal_ed(bound, j),
        BoundId::D_Region_T4 => {
            let (c_m, c_sum) = degraded_caps(j);
            Ok(polytope(bound, c_m, c_sum))
        }
        BoundId::E_Outer_T5 => {
            let (c_m, c_sum) = degraded_caps(j);
            Ok(polytope(bound, c_m, c_sum - j.h_cond(S, Y)))
        }
        BoundId::StateRepro_Outer => eval_state_repro_outer(j),
        _ => eval_causal_case(bound, j),
    }
}

/// Secret-key expressions with and without the auxiliary `U`:
/// `I(V;Y|SU) - I(V;Z|SU) + H(S|ZU)` and `I(V;Y|S) - I(V;Z|S) + H(S|Z)`.
pub fn compare_sk_formulas(j: &JointSystem) -> (f64, f64) {
    let plugged;
    let j = if matches!(j.mode(), SchemeMode::NonCausal | SchemeMode::Case1) {
        j
    } else {
        plugged = j.plugged();
        &plugged
    };
    (
        j.mi(V, Y, S | U) - j.mi(V, Z, S | U) + j.h_cond(S, Z | U),
        j.mi(V, Y, S) - j.mi(V, Z, S) + j.h_cond(S, Z),
    )
}
