//! Point clouds and linked cell lists for cutoff neighbour search.

use crate::error::{param, Error, Result};
use crate::vec2::Vec2;

/// Source strengths: scalar for G, 2-vectors for H.
#[derive(Clone, Debug, PartialEq)]
pub enum Strengths {
    Scalar(Vec<f64>),
    Vector(Vec<Vec2>),
}

impl Strengths {
    pub fn len(&self) -> usize {
        match self {
            Strengths::Scalar(v) => v.len(),
            Strengths::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Q = sum of squared strengths (over components for vectors).
    pub fn sum_of_squares(&self) -> f64 {
        match self {
            Strengths::Scalar(v) => v.iter().map(|f| f * f).sum(),
            Strengths::Vector(v) => v.iter().map(|f| f.norm2()).sum(),
        }
    }

    pub fn scaled(&self, s: f64) -> Strengths {
        match self {
            Strengths::Scalar(v) => Strengths::Scalar(v.iter().map(|f| f * s).collect()),
            Strengths::Vector(v) => Strengths::Vector(v.iter().map(|&f| f * s).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub positions: Vec<Vec2>,
    pub strengths: Strengths,
}

impl PointCloud {
    pub fn new(positions: Vec<Vec2>, strengths: Strengths) -> Result<Self> {
        if positions.len() != strengths.len() {
            return param(format!(
                "{} positions but {} strengths",
                positions.len(),
                strengths.len()
            ));
        }
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(Error::Input(format!("non-finite position {p:?}")));
        }
        let finite = match &strengths {
            Strengths::Scalar(v) => v.iter().all(|f| f.is_finite()),
            Strengths::Vector(v) => v.iter().all(|f| f.is_finite()),
        };
        if !finite {
            return Err(Error::Input("non-finite strength".into()));
        }
        Ok(PointCloud {
            positions,
            strengths,
        })
    }

    pub fn scalar(positions: Vec<Vec2>, f: Vec<f64>) -> Result<Self> {
        Self::new(positions, Strengths::Scalar(f))
    }

    pub fn vector(positions: Vec<Vec2>, f: Vec<Vec2>) -> Result<Self> {
        Self::new(positions, Strengths::Vector(f))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Errors unless every coordinate lies in [0, side).
    pub fn check_in_box(&self, side: f64) -> Result<()> {
        check_points_in_box(&self.positions, side, false)
    }
}

/// Checks coordinates against [0, side) or, with `closed`, [0, side].
pub fn check_points_in_box(points: &[Vec2], side: f64, closed: bool) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        let ok = |c: f64| c >= 0.0 && (c < side || closed && c <= side);
        if !ok(p.x) || !ok(p.y) {
            let b = if closed { "]" } else { ")" };
            return Err(Error::Domain(format!(
                "point {i} at ({}, {}) outside [0, {side}{b}^2",
                p.x, p.y
            )));
        }
    }
    Ok(())
}

/// Neighbour search domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Square box [0, side)^2 with periodic images.
    Periodic { side: f64 },
    /// Unbounded plane; the grid covers the bounding box of the points.
    Free,
}

/// One neighbour pair: source index, periodic image shift added to the
/// source position, and separation `target - (source + shift)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub shift: Vec2,
    pub sep: Vec2,
}

// Free-space grids never exceed this many cells per dimension.
const MAX_FREE_CELLS: usize = 4096;

/// Linked cell list over a fixed set of points.
#[derive(Clone, Debug)]
pub struct CellList {
    points: Vec<Vec2>,
    cutoff: f64,
    cutoff2: f64,
    domain: Domain,
    origin: Vec2,
    cell_size: f64,
    n: [usize; 2],
    head: Vec<usize>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

pub fn build_cell_list(points: &[Vec2], cutoff: f64, domain: Domain) -> Result<CellList> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return param(format!("cutoff must be positive, got {cutoff}"));
    }
    let (origin, cell_size, n) = match domain {
        Domain::Periodic { side } => {
            if cutoff > 0.5 * side {
                return param(format!("cutoff {cutoff} exceeds half the box {side}"));
            }
            check_points_in_box(points, side, false)?;
            let n = (side / cutoff).floor() as usize;
            (Vec2::ZERO, side / n as f64, [n, n])
        }
        Domain::Free => {
            let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
            let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in points {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            if points.is_empty() {
                (Vec2::ZERO, cutoff, [1, 1])
            } else {
                let ext = (hi.x - lo.x).max(hi.y - lo.y);
                let size = cutoff.max(ext / MAX_FREE_CELLS as f64);
                let cells = |e: f64| ((e / size).floor() as usize + 1).min(MAX_FREE_CELLS);
                (lo, size, [cells(hi.x - lo.x), cells(hi.y - lo.y)])
            }
        }
    };
    let mut list = CellList {
        points: points.to_vec(),
        cutoff,
        cutoff2: cutoff * cutoff,
        domain,
        origin,
        cell_size,
        n,
        head: vec![NIL; n[0] * n[1]],
        next: vec![NIL; points.len()],
    };
    // reverse insertion keeps each cell's chain in ascending index order
    for i in (0..points.len()).rev() {
        let c = list.cell_of(points[i]);
        let ci = c[1] * n[0] + c[0];
        list.next[i] = list.head[ci];
        list.head[ci] = i;
    }
    Ok(list)
}

impl CellList {
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cells_per_dim(&self) -> [usize; 2] {
        self.n
    }

    fn raw_cell(&self, p: Vec2) -> [i64; 2] {
        [
            ((p.x - self.origin.x) / self.cell_size).floor() as i64,
            ((p.y - self.origin.y) / self.cell_size).floor() as i64,
        ]
    }

    fn cell_of(&self, p: Vec2) -> [usize; 2] {
        let c = self.raw_cell(p);
        [
            c[0].clamp(0, self.n[0] as i64 - 1) as usize,
            c[1].clamp(0, self.n[1] as i64 - 1) as usize,
        ]
    }

    /// Calls `f` for every (source, image) pair within the cutoff of
    /// `target`, in a deterministic order.
    #[inline]
    pub fn for_each_neighbor<F: FnMut(Neighbor)>(&self, target: Vec2, mut f: F) {
        match self.domain {
            Domain::Periodic { side } => {
                let c = self.cell_of(target);
                let n = self.n[0] as i64;
                for dy in -1..=1i64 {
                    let (cy, sy) = wrap(c[1] as i64 + dy, n);
                    for dx in -1..=1i64 {
                        let (cx, sx) = wrap(c[0] as i64 + dx, n);
                        let shift = Vec2::new(sx as f64 * side, sy as f64 * side);
                        self.visit_cell(cy * self.n[0] + cx, target, shift, &mut f);
                    }
                }
            }
            Domain::Free => {
                let c = self.raw_cell(target);
                let lo = |v: i64| (v - 1).max(0);
                let hi = |v: i64, n: usize| (v + 1).min(n as i64 - 1);
                for cy in lo(c[1])..=hi(c[1], self.n[1]) {
                    for cx in lo(c[0])..=hi(c[0], self.n[0]) {
                        self.visit_cell(
                            cy as usize * self.n[0] + cx as usize,
                            target,
                            Vec2::ZERO,
                            &mut f,
                        );
                    }
                }
            }
        }
    }

    #[inline]
    fn visit_cell<F: FnMut(Neighbor)>(&self, cell: usize, target: Vec2, shift: Vec2, f: &mut F) {
        let mut i = self.head[cell];
        while i != NIL {
            let sep = target - (self.points[i] + shift);
            if sep.norm2() < self.cutoff2 {
                f(Neighbor {
                    index: i,
                    shift,
                    sep,
                });
            }
            i = self.next[i];
        }
    }

    /// Collected form of [`CellList::for_each_neighbor`].
    pub fn neighbors(&self, target: Vec2) -> Vec<Neighbor> {
        let mut out = Vec::new();
        self.for_each_neighbor(target, |nb| out.push(nb));
        out
    }
}

// Cell index modulo n and the image offset (in box lengths) it implies.
#[inline]
fn wrap(c: i64, n: i64) -> (usize, i64) {
    let p = c.div_euclid(n);
    ((c - p * n) as usize, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_has_no_neighbors() {
        let l = build_cell_list(&[], 0.5, Domain::Periodic { side: 2.0 }).unwrap();
        assert!(l.neighbors(Vec2::new(1.0, 1.0)).is_empty());
        let f = build_cell_list(&[], 0.5, Domain::Free).unwrap();
        assert!(f.neighbors(Vec2::new(1.0, 1.0)).is_empty());
    }

    #[test]
    fn pair_across_periodic_boundary() {
        let side = 4.0;
        let rc = 1.0;
        let pts = [Vec2::new(0.1, 2.0)];
        let l = build_cell_list(&pts, rc, Domain::Periodic { side }).unwrap();
        let t = Vec2::new(side - 0.8, 2.0);
        let nb = l.neighbors(t);
        assert_eq!(nb.len(), 1);
        assert_eq!(nb[0].shift, Vec2::new(side, 0.0));
        assert!((nb[0].sep.norm() - 0.9 * rc).abs() < 1e-15);
    }

    #[test]
    fn coincident_target_reports_zero_separation() {
        let pts = [Vec2::new(0.3, 0.3), Vec2::new(1.0, 1.0)];
        let l = build_cell_list(&pts, 0.5, Domain::Free).unwrap();
        let nb = l.neighbors(pts[1]);
        assert_eq!(nb.len(), 1);
        assert_eq!(nb[0].sep, Vec2::ZERO);
        assert_eq!(nb[0].shift, Vec2::ZERO);
    }

    #[test]
    fn rejects_large_periodic_cutoff() {
        assert!(build_cell_list(&[], 2.1, Domain::Periodic { side: 4.0 }).is_err());
        assert!(
            build_cell_list(&[Vec2::new(4.0, 0.0)], 1.0, Domain::Periodic { side: 4.0 }).is_err()
        );
    }

    #[test]
    fn degenerate_free_space_single_cell() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(0.1, 0.0),
            Vec2::new(0.2, 0.05),
        ];
        let l = build_cell_list(&pts, 10.0, Domain::Free).unwrap();
        assert_eq!(l.cells_per_dim(), [1, 1]);
        assert_eq!(l.neighbors(Vec2::new(5.0, 5.0)).len(), 3);
    }
}
