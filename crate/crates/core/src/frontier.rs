//! Pareto frontiers of unions of rate polytopes.

use serde::Serialize;

use crate::bounds::RatePolytope;

/// How a frontier's vertex list is interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrontierKind {
    /// Raw union: `R_K(R_M) = max over corners (a, y) with a ≥ R_M of y + a - R_M`.
    Union,
    /// Upper concave envelope: linear interpolation between vertices.
    Hull,
}

/// Upper boundary of an `(R_M, R_K)` region, vertices sorted by `R_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionFrontier {
    pub kind: FrontierKind,
    pub vertices: Vec<(f64, f64)>,
    /// Identifier of the design behind each vertex.
    pub provenance: Vec<usize>,
}

impl RegionFrontier {
    /// The region `{(0, 0)}`.
    pub fn origin() -> Self {
        RegionFrontier {
            kind: FrontierKind::Union,
            vertices: vec![(0.0, 0.0)],
            provenance: vec![0],
        }
    }

    /// Largest `R_M` in the region.
    pub fn extent(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.0)
    }

    /// Largest `R_K` in the region.
    pub fn key_endpoint(&self) -> f64 {
        self.vertices.first().map_or(0.0, |v| v.1)
    }

    /// Largest `R_M` (equal to [`extent`](Self::extent)).
    pub fn message_endpoint(&self) -> f64 {
        self.extent()
    }

    /// Largest `R_K` at `r_m`, or `-inf` beyond the extent.
    pub fn value_at(&self, r_m: f64) -> f64 {
        self.eval(r_m, false)
    }

    /// `lim_{t↓r_m}` of [`value_at`](Self::value_at).
    pub fn value_right_of(&self, r_m: f64) -> f64 {
        self.eval(r_m, true)
    }

    fn eval(&self, x: f64, right: bool) -> f64 {
        let v = &self.vertices;
        match self.kind {
            FrontierKind::Union => v
                .iter()
                .filter(|&&(a, _)| if right { a > x } else { a >= x })
                .map(|&(a, y)| y + a - x)
                .fold(f64::NEG_INFINITY, f64::max),
            FrontierKind::Hull => {
                if x < 0.0 || x > self.extent() || (right && x >= self.extent()) {
                    return f64::NEG_INFINITY;
                }
                let i = v.partition_point(|&(a, _)| a < x);
                if i == 0 {
                    return v[0].1;
                }
                let (x0, y0) = v[i - 1];
                let (x1, y1) = v[i.min(v.len() - 1)];
                if x1 == x0 {
                    y1
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    /// CSV with header `R_M,R_K,provenance_id`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R_M,R_K,provenance_id\n");
        for (&(a, b), id) in self.vertices.iter().zip(&self.provenance) {
            out.push_str(&format!("{a},{b},{id}\n"));
        }
        out
    }
}

/// Frontier of the union of `polys`; vertex provenance indexes into `polys`.
pub fn pareto_union(polys: &[RatePolytope]) -> RegionFrontier {
    let tagged: Vec<_> = polys.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    pareto_union_tagged(&tagged)
}

/// Like [`pareto_union`] with caller-supplied provenance ids.
pub fn pareto_union_tagged(polys: &[(RatePolytope, usize)]) -> RegionFrontier {
    let mut corners: Vec<(f64, f64, usize)> = polys
        .iter()
        .map(|(p, id)| {
            let b = p.c_sum.max(0.0);
            (p.c_m.max(0.0).min(b), b, *id)
        })
        .collect();
    if corners.is_empty() {
        return RegionFrontier::origin();
    }
    // Larger a first, then larger b, then the earliest id.
    corners.sort_by(|l, r| {
        r.0.total_cmp(&l.0)
            .then(r.1.total_cmp(&l.1))
            .then(l.2.cmp(&r.2))
    });
    let mut kept: Vec<(f64, f64, usize)> = Vec::new();
    for c in corners {
        if kept.last().is_none_or(|k| c.1 > k.1) {
            kept.push(c);
        }
    }
    kept.reverse();
    let (_, b0, id0) = kept[0];
    let mut vertices = vec![(0.0, b0)];
    let mut provenance = vec![id0];
    for &(a, b, id) in &kept {
        if a == 0.0 {
            continue;
        }
        vertices.push((a, b - a));
        provenance.push(id);
    }
    RegionFrontier {
        kind: FrontierKind::Union,
        vertices,
        provenance,
    }
}

/// Upper concave envelope of the region under a frontier.
pub fn upper_concave_envelope(f: &RegionFrontier) -> RegionFrontier {
    let mut pts: Vec<(f64, f64, usize)> = f
        .vertices
        .iter()
        .zip(&f.provenance)
        .map(|(&(a, b), &id)| (a, b, id))
        .collect();
    pts.sort_by(|l, r| l.0.total_cmp(&r.0).then(r.1.total_cmp(&l.1)));
    pts.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1, _) = hull[hull.len() - 2];
            let (x2, y2, _) = hull[hull.len() - 1];
            // Drop the middle point unless it lies strictly above the chord.
            let cross = (x2 - x1) * (p.1 - y1) - (y2 - y1) * (p.0 - x1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    RegionFrontier {
        kind: FrontierKind::Hull,
        vertices: hull.iter().map(|&(a, b, _)| (a, b)).collect(),
        provenance: hull.iter().map(|&(_, _, id)| id).collect(),
    }
}

/// Whether the region under `a` contains the region under `b`, up to `tol`.
///
/// Both frontiers are affine between consecutive breakpoints, so comparing
/// values and right limits at every breakpoint of either is exact.
pub fn frontier_dominates(a: &RegionFrontier, b: &RegionFrontier, tol: f64) -> bool {
    let ext_b = b.extent();
    let mut xs: Vec<f64> = a
        .vertices
        .iter()
        .chain(&b.vertices)
        .map(|v| v.0)
        .filter(|&x| x <= ext_b)
        .collect();
    xs.push(0.0);
    xs.push(ext_b);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let a_at = |x: f64, right: bool| {
        let x = if x > a.extent() && x <= a.extent() + tol {
            a.extent()
        } else {
            x
        };
        if right && x == a.extent() {
            a.value_at(x)
        } else {
            a.eval(x, right)
        }
    };
    xs.iter().all(|&x| {
        let left_ok = a_at(x, false) >= b.value_at(x) - tol;
        let right_ok = x >= ext_b || a_at(x, true) >= b.value_right_of(x) - tol;
        left_ok && right_ok
    })
}

/// Maximum gap between two frontiers over an evenly spaced `R_M` grid.
pub fn hausdorff_frontier_distance(a: &RegionFrontier, b: &RegionFrontier) -> f64 {
    hausdorff_frontier_distance_with(a, b, 200)
}

/// The last grid point sits this far inside the larger extent, so a vertical
/// right edge is read as its left limit rather than its rounding-dependent top.
const EDGE_INSET: f64 = 1e-9;

/// As [`hausdorff_frontier_distance`] with `points` grid points; outside a
/// frontier's extent its value is taken as zero.
pub fn hausdorff_frontier_distance_with(
    a: &RegionFrontier,
    b: &RegionFrontier,
    points: usize,
) -> f64 {
    let hi = a.extent().max(b.extent());
    let value = |f: &RegionFrontier, x: f64| f.value_at(x).max(0.0);
    (0..points)
        .map(|i| {
            let x = if points > 1 {
                hi * i as f64 / (points - 1) as f64
            } else {
                0.0
            };
            let x = if i + 1 == points && hi > EDGE_INSET {
                hi - EDGE_INSET
            } else {
                x
            };
            (value(a, x) - value(b, x)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundId;
    use proptest::prelude::*;

    fn poly(c_m: f64, c_sum: f64) -> RatePolytope {
        RatePolytope {
            c_m,
            c_sum,
            bound: BoundId::NC_Inner_T1,
        }
    }

    fn segment(b: f64) -> RegionFrontier {
        pareto_union(&[poly(b, b)])
    }

    #[test]
    fn single_polytope() {
        let f = pareto_union(&[poly(1.0, 0.5)]);
        assert_eq!(f.vertices, vec![(0.0, 0.5), (0.5, 0.0)]);
    }

    #[test]
    fn staircase_union() {
        let f = pareto_union(&[poly(1.0, 0.5), poly(0.2, 0.8)]);
        assert_eq!(f.vertices.len(), 3);
        let want = [(0.0, 0.8), (0.2, 0.6), (0.5, 0.0)];
        for (v, w) in f.vertices.iter().zip(want) {
            assert!((v.0 - w.0).abs() < 1e-15 && (v.1 - w.1).abs() < 1e-15);
        }
        assert_eq!(f.provenance, vec![1, 1, 0]);
        assert!((f.value_at(0.3) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn dominated_polytope_is_dropped() {
        let f = pareto_union(&[poly(0.3, 0.4), poly(1.0, 0.5), poly(0.1, 0.1)]);
        assert!(!f.provenance.contains(&0) && !f.provenance.contains(&2));
        assert_eq!(pareto_union(&[]).vertices, vec![(0.0, 0.0)]);
        assert_eq!(pareto_union(&[poly(-0.2, -0.1)]).vertices, vec![(0.0, 0.0)]);
    }

    #[test]
    fn envelope_examples() {
        let seg = segment(0.7);
        assert_eq!(upper_concave_envelope(&seg).vertices, seg.vertices);
        let stair = pareto_union(&[poly(1.0, 0.5), poly(0.2, 0.8)]);
        let hull = upper_concave_envelope(&stair);
        // Oracle: (0.2, 0.6) survives iff it lies above the chord (0, 0.8)-(0.5, 0).
        let chord = 0.8 - 0.8 / 0.5 * 0.2;
        assert_eq!(hull.vertices.len(), if 0.6 > chord { 3 } else { 2 });
        let origin = RegionFrontier::origin();
        assert_eq!(upper_concave_envelope(&origin).vertices, origin.vertices);
        // A point below the chord is removed.
        let low = pareto_union(&[poly(0.1, 1.0), poly(0.3, 0.65), poly(0.6, 0.6)]);
        let hull = upper_concave_envelope(&low);
        assert_eq!(hull.vertices.len(), 3);
        assert_eq!(hull.vertices[1], low.vertices[1]);
        assert_eq!(hull.vertices[2], low.vertices[3]);
    }

    #[test]
    fn dominance_examples() {
        let big = segment(1.0);
        let small = segment(0.5);
        assert!(frontier_dominates(&big, &big, 0.0));
        assert!(frontier_dominates(&big, &small, 0.0));
        assert!(!frontier_dominates(&small, &big, 0.0));
        // Right-limit check between corners.
        let stair = pareto_union(&[poly(1.0, 0.5), poly(0.2, 0.8)]);
        let single = pareto_union(&[poly(0.2, 0.8)]);
        assert!(frontier_dominates(&stair, &single, 0.0));
        assert!(!frontier_dominates(&single, &stair, 1e-6));
        let hull = upper_concave_envelope(&stair);
        assert!(frontier_dominates(&hull, &stair, 1e-12));
    }

    #[test]
    fn distance_examples() {
        let f = segment(1.0);
        assert_eq!(hausdorff_frontier_distance(&f, &f), 0.0);
        let g = pareto_union(&[poly(1.0, 1.1)]);
        let shifted = RegionFrontier {
            kind: FrontierKind::Hull,
            vertices: vec![(0.0, 1.1), (1.0, 0.1)],
            provenance: vec![0, 0],
        };
        let f_hull = upper_concave_envelope(&f);
        assert!((hausdorff_frontier_distance(&f_hull, &shifted) - 0.1).abs() < 1e-12);
        assert!(hausdorff_frontier_distance(&f, &g) >= 0.1 - 1e-12);
        // Segment vs staircase against a direct grid oracle.
        let stair = pareto_union(&[poly(1.0, 0.5), poly(0.2, 0.8)]);
        let seg = segment(0.8);
        let oracle = (0..200)
            .map(|i| {
                let x = 0.8 * i as f64 / 199.0;
                let s = (0.8 - x).max(0.0);
                let t = if x <= 0.2 {
                    0.8 - x
                } else if x <= 0.5 {
                    0.5 - x
                } else {
                    0.0
                };
                (s - t).abs()
            })
            .fold(0.0, f64::max);
        assert!((hausdorff_frontier_distance(&seg, &stair) - oracle).abs() < 1e-12);
        // A vertical right edge whose position differs only by rounding.
        let a = pareto_union(&[poly(0.4691673286462472, 1.0705319070416497)]);
        let b = pareto_union(&[poly(0.46916732864624766, 1.07053190704165)]);
        assert!(hausdorff_frontier_distance(&a, &b) < 1e-12);
    }

    proptest! {
        #[test]
        fn union_is_pareto_minimal(caps in prop::collection::vec((-0.2f64..1.0, -0.2f64..1.0), 1..12)) {
            let polys: Vec<_> = caps.iter().map(|&(m, s)| poly(m, s)).collect();
            let f = pareto_union(&polys);
            for w in f.vertices.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            // Every input polytope lies inside the union.
            for p in &polys {
                let single = pareto_union(std::slice::from_ref(p));
                prop_assert!(frontier_dominates(&f, &single, 1e-12));
            }
            let hull = upper_concave_envelope(&f);
            prop_assert!(frontier_dominates(&hull, &f, 1e-12));
            for w in hull.vertices.windows(2) {
                prop_assert!(w[1].1 <= w[0].1 + 1e-12);
            }
        }
    }
}
