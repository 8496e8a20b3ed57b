//! Search over auxiliary designs.
//!
//! A design is a list of probability-simplex blocks plus, for deterministic
//! selectors, a table `x = f(s, u, v)`. Non-causal bounds use one block
//! `p(u, v | s)` per state; causal bounds use a single block `p(u, v)`;
//! `D_Region_T4`/`E_Outer_T5` search `p(x | s)` directly.
//!
//! The search evaluates a simplex grid (exhaustive within
//! `max_grid_points`, otherwise a seeded sample), then refines from the best
//! vertex design and from random restarts, one work unit per
//! (start, direction). Units draw from their own ChaCha stream, so serial and
//! parallel runs agree exactly.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{evaluate, scalar_projection, Axis, BoundId, RatePolytope, GATE_TOL};
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::frontier::{pareto_union_tagged, upper_concave_envelope, RegionFrontier};
use crate::info::entropy_slice;
use crate::scheme::{build_joint, AuxiliaryScheme, JointSystem, SchemeMode};

/// Search parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// `|U|`; `None` uses the non-causal cardinality cap `(|X|-1)|S| + 3`
    /// (1 for `C_Case1`, whose caps do not involve `U`).
    pub u_size: Option<usize>,
    /// `|V|`; `None` uses `(|X|-1)²|S|² + 3(|X|-1)|S| + 2`.
    pub v_size: Option<usize>,
    /// Grid steps per simplex block.
    pub resolution: usize,
    /// Random restarts per direction, in addition to the best vertex design.
    pub restarts: usize,
    /// Local moves per work unit.
    pub refine_iters: usize,
    pub seed: u64,
    /// Report the upper concave envelope instead of the raw union.
    pub hull: bool,
    /// Scalarization directions spread over `[0°, 90°]`.
    pub directions: usize,
    /// Search stochastic selectors instead of deterministic tables.
    pub stochastic_selectors: bool,
    /// Exhaustive grid limit; larger grids are sampled.
    pub max_grid_points: usize,
    /// Pins the selector table `x = table[(s * |U| + u) * |V| + v]`.
    pub fixed_selector: Option<Vec<usize>>,
    /// Causal bounds whose designs are also evaluated under the target bound
    /// (plugged into composite form when the target needs it).
    pub extend_from: Vec<BoundId>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            u_size: None,
            v_size: None,
            resolution: 8,
            restarts: 3,
            refine_iters: 400,
            seed: 0,
            hull: false,
            directions: 33,
            stochastic_selectors: false,
            max_grid_points: 4096,
            fixed_selector: None,
            extend_from: Vec::new(),
        }
    }
}

impl SearchConfig {
    /// A copy without the pinned sizes that `bound` fixes itself
    /// (`|U|` for `C_Case2A`, `|V|` for `C_Case2B`).
    pub fn adapted_to(&self, bound: BoundId) -> Self {
        let mut cfg = self.clone();
        match bound.design_mode() {
            SchemeMode::Case2A => cfg.u_size = None,
            SchemeMode::Case2B => cfg.v_size = None,
            _ => {}
        }
        cfg
    }

    /// `|V| = |X|^|S|`, `|U| = 1`, with `x = f_v(s)` ranging over all maps `S → X`.
    pub fn functional_representation(ch: &WiretapChannel) -> Self {
        let (s_n, x_n) = (ch.s_size(), ch.x_size());
        let v_n = x_n.pow(s_n as u32);
        let table = (0..s_n)
            .flat_map(|s| (0..v_n).map(move |v| (v / x_n.pow(s as u32)) % x_n))
            .collect();
        SearchConfig {
            u_size: Some(1),
            v_size: Some(v_n),
            fixed_selector: Some(table),
            ..SearchConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InfeasibleConfig(m.to_string()));
        if self.u_size == Some(0) || self.v_size == Some(0) {
            return bad("auxiliary sizes must be at least 1");
        }
        if self.resolution < 2 {
            return bad("grid resolution must be at least 2");
        }
        if self.restarts < 1 {
            return bad("at least one restart is needed");
        }
        if self.refine_iters < 1 {
            return bad("refinement iterations must be at least 1");
        }
        if self.directions < 2 {
            return bad("at least two scalarization directions are needed");
        }
        if self.max_grid_points < 1 {
            return bad("grid budget must be at least 1");
        }
        Ok(())
    }
}

/// Default `|U|` cap `(|X|-1)|S| + 3`.
pub fn default_u_cap(s: usize, x: usize) -> usize {
    (x - 1) * s + 3
}

/// Default `|V|` cap `(|X|-1)²|S|² + 3(|X|-1)|S| + 2`.
pub fn default_v_cap(s: usize, x: usize) -> usize {
    let t = (x - 1) * s;
    t * t + 3 * t + 2
}

/// A searched frontier with the designs behind its vertices.
#[derive(Debug, Clone)]
pub struct RegionSearch {
    pub bound: BoundId,
    /// Raw union or envelope, per `SearchConfig::hull`.
    pub frontier: RegionFrontier,
    pub union: RegionFrontier,
    pub hull: RegionFrontier,
    /// Designs indexed by provenance id.
    pub designs: Vec<AuxiliaryScheme>,
    pub polytopes: Vec<RatePolytope>,
    pub u_size: usize,
    pub v_size: usize,
    pub evaluations: usize,
}

/// Best scalar projection found.
#[derive(Debug, Clone)]
pub struct ScalarOptimum {
    pub bound: BoundId,
    pub axis: Axis,
    /// Clamped value.
    pub value: f64,
    /// Signed value, for comparisons between bounds.
    pub signed: f64,
    /// False if no visited design passed the SK gate.
    pub feasible: bool,
    pub polytope: RatePolytope,
    pub design: AuxiliaryScheme,
    pub gate_tol: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Point {
    blocks: Vec<Vec<f64>>,
    table: Vec<usize>,
}

impl Point {
    fn entropy(&self) -> f64 {
        self.blocks.iter().map(|b| entropy_slice(b)).sum()
    }
}

/// The design space of one bound on one channel.
struct Space<'a> {
    ch: &'a WiretapChannel,
    bound: BoundId,
    mode: SchemeMode,
    dims: [usize; 4],
    /// Lengths of all simplex blocks, input blocks first.
    block_lens: Vec<usize>,
    input_blocks: usize,
    /// Number of table cells searched (zero when stochastic or fixed).
    table_cells: usize,
    fixed_table: Option<Vec<usize>>,
}

impl<'a> Space<'a> {
    fn new(ch: &'a WiretapChannel, bound: BoundId, cfg: &SearchConfig) -> Result<Self> {
        cfg.validate()?;
        let (s_n, x_n) = (ch.s_size(), ch.x_size());
        let mode = bound.design_mode();
        let direct_input = matches!(bound, BoundId::D_Region_T4 | BoundId::E_Outer_T5);
        let (u_n, v_n) = if direct_input {
            (1, 1)
        } else {
            let u = match mode {
                SchemeMode::Case2A => {
                    if cfg.u_size.is_some_and(|u| u != 1) {
                        return Err(Error::InfeasibleConfig(format!("{bound} requires |U| = 1")));
                    }
                    1
                }
                SchemeMode::Case1 => cfg.u_size.unwrap_or(1),
                _ => cfg.u_size.unwrap_or_else(|| default_u_cap(s_n, x_n)),
            };
            let v = match mode {
                SchemeMode::Case2B => {
                    if cfg.v_size.is_some_and(|v| v != 1) {
                        return Err(Error::InfeasibleConfig(format!("{bound} requires |V| = 1")));
                    }
                    1
                }
                _ => cfg.v_size.unwrap_or_else(|| default_v_cap(s_n, x_n)),
            };
            (u, v)
        };
        let cells = s_n * u_n * v_n;
        let input_blocks = if mode == SchemeMode::NonCausal {
            s_n
        } else {
            1
        };
        let mut block_lens = vec![u_n * v_n; input_blocks];
        let stochastic = direct_input || cfg.stochastic_selectors;
        let mut fixed_table = None;
        let mut table_cells = 0;
        if stochastic {
            block_lens.extend(std::iter::repeat_n(x_n, cells));
        } else if let Some(t) = &cfg.fixed_selector {
            if t.len() != cells || t.iter().any(|&x| x >= x_n) {
                return Err(Error::InfeasibleConfig(format!(
                    "fixed selector needs {cells} entries below {x_n}"
                )));
            }
            fixed_table = Some(t.clone());
        } else {
            table_cells = cells;
        }
        Ok(Space {
            ch,
            bound,
            mode,
            dims: [s_n, u_n, v_n, x_n],
            block_lens,
            input_blocks,
            table_cells,
            fixed_table,
        })
    }

    fn stochastic(&self) -> bool {
        self.block_lens.len() > self.input_blocks
    }

    fn scheme(&self, p: &Point) -> Result<AuxiliaryScheme> {
        let [s_n, u_n, v_n, x_n] = self.dims;
        let selector = if self.stochastic() {
            p.blocks[self.input_blocks..].concat()
        } else {
            let table = self.fixed_table.as_ref().unwrap_or(&p.table);
            AuxiliaryScheme::deterministic_selector(self.dims, table)
        };
        if self.mode == SchemeMode::NonCausal {
            let ws = self.ch.state_dist().as_slice();
            let mut p_suv = Vec::with_capacity(s_n * u_n * v_n);
            for (s, &w) in ws.iter().enumerate() {
                p_suv.extend(p.blocks[s].iter().map(|q| w * q));
            }
            AuxiliaryScheme::non_causal([s_n, u_n, v_n, x_n], p_suv, selector)
        } else {
            AuxiliaryScheme::causal(self.mode, self.dims, p.blocks[0].clone(), selector)
        }
    }

    fn joint(&self, p: &Point) -> Result<JointSystem> {
        build_joint(self.ch, &self.scheme(p)?)
    }

    fn eval(&self, p: &Point) -> RatePolytope {
        self.joint(p)
            .and_then(|j| evaluate(self.bound, &j))
            .expect("search points are valid designs")
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Point {
        let blocks = self
            .block_lens
            .iter()
            .map(|&k| {
                let e: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let t: f64 = e.iter().sum();
                e.into_iter().map(|x| x / t).collect()
            })
            .collect();
        let table = (0..self.table_cells)
            .map(|_| rng.random_range(0..self.dims[3]))
            .collect();
        Point { blocks, table }
    }

    fn grid_size(&self, r: usize) -> f64 {
        let blocks: f64 = self
            .block_lens
            .iter()
            .map(|&k| compositions_count(r, k))
            .product();
        blocks * (self.dims[3] as f64).powi(self.table_cells as i32)
    }

    /// Exhaustive grid at resolution `r` if within `budget`, else `budget`
    /// random grid points drawn from `rng`.
    fn grid(&self, r: usize, budget: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let x_n = self.dims[3];
        if self.grid_size(r) <= budget as f64 {
            let per_block: Vec<Vec<Vec<f64>>> = self
                .block_lens
                .iter()
                .map(|&k| compositions(r, k))
                .collect();
            let mut radices: Vec<usize> = per_block.iter().map(Vec::len).collect();
            radices.extend(std::iter::repeat_n(x_n, self.table_cells));
            let total: usize = radices.iter().product();
            (0..total)
                .map(|mut idx| {
                    let mut digits = vec![0; radices.len()];
                    for (d, &radix) in digits.iter_mut().zip(&radices).rev() {
                        *d = idx % radix;
                        idx /= radix;
                    }
                    let nb = per_block.len();
                    Point {
                        blocks: (0..nb).map(|b| per_block[b][digits[b]].clone()).collect(),
                        table: digits[nb..].to_vec(),
                    }
                })
                .collect()
        } else {
            (0..budget)
                .map(|_| Point {
                    blocks: self
                        .block_lens
                        .iter()
                        .map(|&k| random_composition(r, k, rng))
                        .collect(),
                    table: (0..self.table_cells)
                        .map(|_| rng.random_range(0..x_n))
                        .collect(),
                })
                .collect()
        }
    }
}

fn compositions_count(r: usize, k: usize) -> f64 {
    // C(r + k - 1, k - 1)
    let mut c = 1.0f64;
    for i in 1..k {
        c = c * (r + i) as f64 / i as f64;
    }
    c.round()
}

/// All points of the simplex grid `{q / r}` in `k` coordinates.
fn compositions(r: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for q in (0..=left).rev() {
            cur.push(q);
            rec(left - q, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, k, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|c| c.into_iter().map(|q| q as f64 / r as f64).collect())
        .collect()
}

fn random_composition(r: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    let mut bars: Vec<usize> = sample(rng, r + k - 1, k - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut prev = 0usize;
    for (i, &b) in bars.iter().enumerate() {
        out.push((b - prev - if i == 0 { 0 } else { 1 }) as f64 / r as f64);
        prev = b;
    }
    out.push((r + k - 2 - prev) as f64 / r as f64);
    out
}

/// What a work unit maximizes.
#[derive(Debug, Clone, Copy)]
enum Objective {
    /// Best polytope corner along `(cos θ, sin θ)`; negative caps add a penalty.
    Direction(f64),
    Scalar(Axis),
}

/// Lexicographic score: feasibility tier, then value.
type Score = (u8, f64);

fn score(obj: Objective, p: &RatePolytope) -> Score {
    match obj {
        Objective::Direction(theta) => {
            let (a, y) = p.corner();
            let b = a + y;
            let (c, s) = (theta.cos(), theta.sin());
            let best = (s * b).max(c * a + s * y);
            (1, best + p.c_m.min(0.0) + p.c_sum.min(0.0))
        }
        Objective::Scalar(axis) => {
            let proj = scalar_projection(p, axis);
            if proj.feasible {
                (1, proj.signed)
            } else {
                (0, p.c_m)
            }
        }
    }
}

fn better(a: Score, b: Score) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

/// Non-dominated (corner, design) pairs.
#[derive(Debug, Default)]
struct ParetoSet {
    items: Vec<(RatePolytope, Point)>,
}

impl ParetoSet {
    fn key(p: &RatePolytope) -> (f64, f64) {
        let (a, y) = p.corner();
        (a, a + y)
    }

    fn insert(&mut self, p: RatePolytope, point: &Point) {
        let (a, b) = Self::key(&p);
        if self.items.iter().any(|(q, _)| {
            let (qa, qb) = Self::key(q);
            qa >= a && qb >= b
        }) {
            return;
        }
        self.items.retain(|(q, _)| {
            let (qa, qb) = Self::key(q);
            !(a >= qa && b >= qb)
        });
        self.items.push((p, point.clone()));
    }
}

struct UnitResult {
    pareto: ParetoSet,
    best: (Score, RatePolytope, Point),
    evaluations: usize,
}

const MIN_STEP: f64 = 1e-4;

fn local_search(
    space: &Space<'_>,
    obj: Objective,
    start: Point,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> UnitResult {
    let mut pareto = ParetoSet::default();
    let mut cur = start;
    let mut cur_poly = space.eval(&cur);
    let mut cur_score = score(obj, &cur_poly);
    let mut cur_entropy = cur.entropy();
    pareto.insert(cur_poly, &cur);
    let movable: Vec<usize> = (0..space.block_lens.len())
        .filter(|&b| space.block_lens[b] >= 2)
        .collect();
    let coords: usize =
        movable.iter().map(|&b| space.block_lens[b]).sum::<usize>() + space.table_cells;
    let patience = 2 * coords + 4;
    let x_n = space.dims[3];
    let mut step = 0.25;
    let mut fails = 0usize;
    let mut evaluations = 1;
    for _ in 0..iters {
        if coords == 0 || step < MIN_STEP {
            break;
        }
        let mut cand = cur.clone();
        let table_move =
            space.table_cells > 0 && x_n > 1 && (movable.is_empty() || rng.random_bool(0.25));
        if table_move {
            let cell = rng.random_range(0..space.table_cells);
            let shift = rng.random_range(1..x_n);
            cand.table[cell] = (cand.table[cell] + shift) % x_n;
        } else {
            let b = movable[rng.random_range(0..movable.len())];
            let k = space.block_lens[b];
            let i = rng.random_range(0..k);
            let j = (i + rng.random_range(1..k)) % k;
            let amount = step.min(cand.blocks[b][i]);
            if amount <= 0.0 {
                fails += 1;
                if fails >= patience {
                    step /= 2.0;
                    fails = 0;
                }
                continue;
            }
            cand.blocks[b][i] -= amount;
            cand.blocks[b][j] += amount;
            if cand.blocks[b][i] < 1e-15 {
                cand.blocks[b][i] = 0.0;
            }
        }
        let poly = space.eval(&cand);
        evaluations += 1;
        pareto.insert(poly, &cand);
        let s = score(obj, &poly);
        let accept = better(s, cur_score) || {
            let e = cand.entropy();
            s == cur_score && e < cur_entropy
        };
        if accept {
            cur_entropy = cand.entropy();
            cur = cand;
            cur_poly = poly;
            cur_score = s;
            fails = 0;
        } else {
            fails += 1;
            if fails >= patience {
                step /= 2.0;
                fails = 0;
            }
        }
    }
    UnitResult {
        pareto,
        best: (cur_score, cur_poly, cur),
        evaluations,
    }
}

fn unit_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const GRID_STREAM: u64 = 1;
const VERTEX_STREAM: u64 = 2;
const UNIT_STREAM_BASE: u64 = 16;

fn evaluate_all(space: &Space<'_>, points: &[Point]) -> Vec<RatePolytope> {
    points.par_iter().map(|p| space.eval(p)).collect()
}

struct Explored {
    entries: Vec<(RatePolytope, Point)>,
    units: Vec<UnitResult>,
    grid_best: Option<(Score, RatePolytope, Point)>,
    evaluations: usize,
}

fn explore(space: &Space<'_>, cfg: &SearchConfig, objectives: &[Objective]) -> Explored {
    let grid = space.grid(
        cfg.resolution,
        cfg.max_grid_points,
        &mut unit_rng(cfg.seed, GRID_STREAM),
    );
    let grid_polys = evaluate_all(space, &grid);
    let vertices = space.grid(
        1,
        cfg.max_grid_points,
        &mut unit_rng(cfg.seed, VERTEX_STREAM),
    );
    let vertex_polys = evaluate_all(space, &vertices);

    let pick_best = |obj: Objective, pts: &[Point], polys: &[RatePolytope]| {
        let mut best: Option<(Score, usize)> = None;
        for (i, p) in polys.iter().enumerate() {
            let s = score(obj, p);
            if best.is_none_or(|(b, _)| better(s, b)) {
                best = Some((s, i));
            }
        }
        best.map(|(s, i)| (s, polys[i], pts[i].clone()))
    };

    let starts = 1 + cfg.restarts;
    let n_units = starts * objectives.len();
    let units: Vec<UnitResult> = (0..n_units)
        .into_par_iter()
        .map(|u| {
            let (k, d) = (u / objectives.len(), u % objectives.len());
            let obj = objectives[d];
            let mut rng = unit_rng(cfg.seed, UNIT_STREAM_BASE + u as u64);
            let start = if k == 0 {
                pick_best(obj, &vertices, &vertex_polys)
                    .map(|(_, _, p)| p)
                    .unwrap_or_else(|| space.random_point(&mut rng))
            } else {
                space.random_point(&mut rng)
            };
            local_search(space, obj, start, cfg.refine_iters, &mut rng)
        })
        .collect();

    let mut entries = Vec::new();
    let mut grid_set = ParetoSet::default();
    for (p, pt) in grid_polys
        .iter()
        .zip(&grid)
        .chain(vertex_polys.iter().zip(&vertices))
    {
        grid_set.insert(*p, pt);
    }
    entries.extend(grid_set.items);
    let grid_best = if let [Objective::Scalar(axis)] = objectives {
        let obj = Objective::Scalar(*axis);
        let a = pick_best(obj, &grid, &grid_polys);
        let b = pick_best(obj, &vertices, &vertex_polys);
        match (a, b) {
            (Some(a), Some(b)) => Some(if better(b.0, a.0) { b } else { a }),
            (a, b) => a.or(b),
        }
    } else {
        None
    };
    let evaluations =
        grid.len() + vertices.len() + units.iter().map(|u| u.evaluations).sum::<usize>();
    Explored {
        entries,
        units,
        grid_best,
        evaluations,
    }
}

fn directions(n: usize) -> Vec<Objective> {
    (0..n)
        .map(|d| Objective::Direction(std::f64::consts::FRAC_PI_2 * d as f64 / (n - 1) as f64))
        .collect()
}

/// Traces the frontier of the union of `bound` polytopes over searched designs.
pub fn optimize_region(
    ch: &WiretapChannel,
    bound: BoundId,
    cfg: &SearchConfig,
) -> Result<RegionSearch> {
    let space = Space::new(ch, bound, cfg)?;
    let explored = explore(&space, cfg, &directions(cfg.directions));
    let mut tagged: Vec<(RatePolytope, AuxiliaryScheme)> = Vec::new();
    for (p, pt) in explored
        .entries
        .iter()
        .chain(explored.units.iter().flat_map(|u| u.pareto.items.iter()))
    {
        tagged.push((*p, space.scheme(pt)?));
    }
    let mut evaluations = explored.evaluations;
    for &source in &cfg.extend_from {
        if !source.is_causal() {
            return Err(Error::InfeasibleConfig(format!(
                "extended search draws on causal bounds; {source} is not causal"
            )));
        }
        let sub_cfg = SearchConfig {
            extend_from: Vec::new(),
            fixed_selector: None,
            ..cfg.adapted_to(source)
        };
        let sub = optimize_region(ch, source, &sub_cfg)?;
        evaluations += sub.evaluations;
        for design in &sub.designs {
            let j = build_joint(ch, design)?;
            let [_, u, v, ..] = j.dims();
            let (joint, scheme) = if bound.accepts(j.mode(), u, v) {
                (j, design.clone())
            } else {
                (j.plugged(), design.plugged(ch)?)
            };
            tagged.push((evaluate(bound, &joint)?, scheme));
        }
    }
    Ok(assemble(bound, cfg.hull, tagged, space.dims, evaluations))
}

fn assemble(
    bound: BoundId,
    hull: bool,
    tagged: Vec<(RatePolytope, AuxiliaryScheme)>,
    dims: [usize; 4],
    evaluations: usize,
) -> RegionSearch {
    let items: Vec<(RatePolytope, usize)> = tagged
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (*p, i))
        .collect();
    let raw = pareto_union_tagged(&items);
    let env = upper_concave_envelope(&raw);
    // Renumber provenance to the designs that survive in either frontier.
    let mut used: Vec<usize> = raw
        .provenance
        .iter()
        .chain(&env.provenance)
        .copied()
        .collect();
    used.sort_unstable();
    used.dedup();
    let remap = |f: &RegionFrontier| {
        let mut g = f.clone();
        for id in g.provenance.iter_mut() {
            *id = used.binary_search(id).expect("provenance id present");
        }
        g
    };
    let (union, envelope) = if tagged.is_empty() {
        (
            RegionFrontier::origin(),
            upper_concave_envelope(&RegionFrontier::origin()),
        )
    } else {
        (remap(&raw), remap(&env))
    };
    let designs = used.iter().map(|&i| tagged[i].1.clone()).collect();
    let polytopes = used.iter().map(|&i| tagged[i].0).collect();
    RegionSearch {
        bound,
        frontier: if hull {
            envelope.clone()
        } else {
            union.clone()
        },
        union,
        hull: envelope,
        designs,
        polytopes,
        u_size: dims[1],
        v_size: dims[2],
        evaluations,
    }
}

/// Maximizes the `axis` projection of `bound`.
///
/// Designs failing the SK gate rank below every feasible design, ordered by
/// `cM` so the search moves toward the gate.
pub fn optimize_scalar(
    ch: &WiretapChannel,
    bound: BoundId,
    axis: Axis,
    cfg: &SearchConfig,
) -> Result<ScalarOptimum> {
    let space = Space::new(ch, bound, cfg)?;
    let obj = Objective::Scalar(axis);
    let explored = explore(&space, cfg, &[obj]);
    let mut best = explored
        .grid_best
        .clone()
        .expect("grid contains at least one point");
    for u in &explored.units {
        if better(u.best.0, best.0) {
            best = u.best.clone();
        }
    }
    let (_, poly, point) = best;
    let proj = scalar_projection(&poly, axis);
    Ok(ScalarOptimum {
        bound,
        axis,
        value: proj.value,
        signed: proj.signed,
        feasible: proj.feasible,
        polytope: poly,
        design: space.scheme(&point)?,
        gate_tol: GATE_TOL,
        evaluations: explored.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::builtin_example;
    use crate::frontier::{frontier_dominates, hausdorff_frontier_distance};
    use crate::info::binary_entropy;

    fn small_cfg() -> SearchConfig {
        SearchConfig {
            u_size: Some(1),
            v_size: Some(2),
            resolution: 4,
            restarts: 1,
            refine_iters: 150,
            directions: 9,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn compositions_cover_grid() {
        assert_eq!(compositions(2, 3).len(), 6);
        assert_eq!(compositions_count(2, 3), 6.0);
        assert_eq!(compositions_count(4, 12), 1365.0);
        let mut rng = unit_rng(3, 0);
        for _ in 0..50 {
            let c = random_composition(5, 4, &mut rng);
            assert_eq!(c.len(), 4);
            assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(c
                .iter()
                .all(|&q| q >= 0.0 && (q * 5.0 - (q * 5.0).round()).abs() < 1e-9));
        }
    }

    #[test]
    fn fig6_degraded_region() {
        let ch = builtin_example("fig6").unwrap();
        let r = optimize_region(&ch, BoundId::D_Region_T4, &small_cfg()).unwrap();
        let h = binary_entropy(0.1).unwrap();
        let seg = crate::frontier::pareto_union(&[RatePolytope {
            c_m: 1.0,
            c_sum: h,
            bound: BoundId::D_Region_T4,
        }]);
        assert!(hausdorff_frontier_distance(&r.frontier, &seg) < 1e-3);
    }

    #[test]
    fn equal_outputs_give_origin() {
        let ch = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            if y == z {
                if x == y {
                    0.9
                } else {
                    0.1
                }
            } else {
                0.0
            }
        })
        .unwrap();
        let cfg = SearchConfig {
            u_size: Some(2),
            ..small_cfg()
        };
        let r = optimize_region(&ch, BoundId::NC_Inner_T1, &cfg).unwrap();
        assert_eq!(r.frontier.vertices, vec![(0.0, 0.0)]);
    }

    #[test]
    fn xor_case1_reaches_one_bit() {
        let ch = builtin_example("gp-xor").unwrap();
        let r = optimize_region(&ch, BoundId::C_Case1, &small_cfg()).unwrap();
        assert!(r.frontier.message_endpoint() >= 1.0 - 1e-3);
    }

    #[test]
    fn scalar_examples() {
        let ch = builtin_example("gp-xor").unwrap();
        let cfg = SearchConfig {
            u_size: Some(1),
            ..small_cfg()
        };
        let gp = optimize_scalar(&ch, BoundId::NC_Inner_T1, Axis::SM, &cfg).unwrap();
        assert!((gp.value - 1.0).abs() < 1e-3);
        // No eavesdropper: SM capacity of the flip-0.1 channel.
        let clean =
            WiretapChannel::from_fn(
                [1, 2, 2, 1],
                vec![1.0],
                |_, x, y, _| {
                    if x == y {
                        0.9
                    } else {
                        0.1
                    }
                },
            )
            .unwrap();
        let sm = optimize_scalar(&clean, BoundId::NC_Inner_T1, Axis::SM, &cfg).unwrap();
        assert!(
            (sm.value - (1.0 - binary_entropy(0.1).unwrap())).abs() < 1e-3,
            "{}",
            sm.value
        );
        // Z = Y with trivial state: no secret key from bounds without H(S|Z) terms.
        let zy = WiretapChannel::from_fn([1, 2, 2, 2], vec![1.0], |_, x, y, z| {
            if y == z {
                if x == y {
                    0.9
                } else {
                    0.1
                }
            } else {
                0.0
            }
        })
        .unwrap();
        let sk = optimize_scalar(&zy, BoundId::NC_Inner_T1, Axis::SK, &cfg).unwrap();
        assert_eq!(sk.value, 0.0);
    }

    #[test]
    fn reruns_are_identical() {
        let ch = builtin_example("fig5").unwrap();
        let cfg = small_cfg();
        let a = optimize_region(&ch, BoundId::C_Case2A, &cfg).unwrap();
        let b = optimize_region(&ch, BoundId::C_Case2A, &cfg).unwrap();
        assert_eq!(a.frontier, b.frontier);
        assert_eq!(a.designs, b.designs);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = serial.install(|| optimize_region(&ch, BoundId::C_Case2A, &cfg).unwrap());
        assert_eq!(a.frontier, c.frontier);
    }

    #[test]
    fn doubling_resolution_never_shrinks() {
        let ch = builtin_example("fig5").unwrap();
        for bound in [
            BoundId::NC_ED_Region_T3,
            BoundId::C_ED_Cor4,
            BoundId::D_Region_T4,
        ] {
            let coarse = small_cfg();
            let fine = SearchConfig {
                resolution: 8,
                ..coarse.clone()
            };
            let a = optimize_region(&ch, bound, &coarse).unwrap();
            let b = optimize_region(&ch, bound, &fine).unwrap();
            assert!(
                frontier_dominates(&b.frontier, &a.frontier, 1e-9),
                "{bound}"
            );
        }
    }

    #[test]
    fn infeasible_configs() {
        let ch = builtin_example("fig5").unwrap();
        let cfg = SearchConfig {
            u_size: Some(2),
            ..small_cfg()
        };
        assert!(matches!(
            optimize_region(&ch, BoundId::C_Case2A, &cfg),
            Err(Error::InfeasibleConfig(_))
        ));
        let cfg = SearchConfig {
            directions: 1,
            ..small_cfg()
        };
        assert!(optimize_region(&ch, BoundId::NC_Inner_T1, &cfg).is_err());
        let cfg = SearchConfig {
            resolution: 1,
            ..small_cfg()
        };
        assert!(optimize_region(&ch, BoundId::NC_Inner_T1, &cfg).is_err());
        let cfg = SearchConfig {
            restarts: 0,
            ..small_cfg()
        };
        assert!(optimize_scalar(&ch, BoundId::NC_Inner_T1, Axis::SM, &cfg).is_err());
        let cfg = SearchConfig {
            fixed_selector: Some(vec![0; 3]),
            ..small_cfg()
        };
        assert!(optimize_region(&ch, BoundId::NC_Inner_T1, &cfg).is_err());
    }

    #[test]
    fn functional_representation_table() {
        let ch = builtin_example("fig5").unwrap();
        let cfg = SearchConfig::functional_representation(&ch);
        assert_eq!(cfg.v_size, Some(4));
        // Each v indexes a distinct map s -> x.
        let t = cfg.fixed_selector.unwrap();
        let maps: std::collections::BTreeSet<(usize, usize)> =
            (0..4).map(|v| (t[v], t[4 + v])).collect();
        assert_eq!(maps.len(), 4);
    }
}
