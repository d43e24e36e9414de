use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{dist_linf, PlanarSpace, Point};

/// Extra nodes connect to lattice nodes within this many grid steps.
const CONNECT_RADIUS: i64 = 2;
const PIECE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Lattice(i64, i64),
    Extra(usize),
}

#[derive(PartialEq)]
struct Entry {
    key: i64,
    g: f64,
    node: Node,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on the quantized f-value, deepest node first among ties
        other
            .key
            .cmp(&self.key)
            .then_with(|| self.g.total_cmp(&other.g))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Grid<'a> {
    space: &'a PlanarSpace,
    h: f64,
    extras: Vec<(Point, u64)>,
    /// lattice node -> (extra index, cost in grid units)
    attach: HashMap<(i64, i64), Vec<(usize, f64)>>,
    pieces: HashMap<(i64, i64), u64>,
}

impl<'a> Grid<'a> {
    fn point(&self, i: i64, j: i64) -> Point {
        Point::new(i as f64 * self.h, j as f64 * self.h)
    }

    fn lattice_pieces(&mut self, i: i64, j: i64) -> u64 {
        if let Some(&m) = self.pieces.get(&(i, j)) {
            return m;
        }
        let m = self.space.pieces(self.point(i, j), PIECE_TOL);
        self.pieces.insert((i, j), m);
        m
    }
}

/// Shortest-path length between `p` and `q` in the 8-neighbour lattice of
/// spacing `resolution` restricted to the space, with sup-norm edge weights.
///
/// An edge is admitted only when both endpoints share a convex piece of the
/// space (a region or a segment), so every edge is a path inside the space.
/// `p`, `q` and the gluing points are added as extra nodes joined to nearby
/// lattice nodes. The result converges to the intrinsic distance from above;
/// `f64::INFINITY` signals that the sampled graph is disconnected.
pub fn intrinsic_dist(space: &PlanarSpace, p: Point, q: Point, resolution: f64) -> f64 {
    if dist_linf(p, q) == 0.0 {
        return 0.0;
    }
    let h = resolution;
    let mut extras: Vec<(Point, u64)> = vec![(p, space.pieces(p, PIECE_TOL)), (q, space.pieces(q, PIECE_TOL))];
    if extras[0].1 == 0 || extras[1].1 == 0 {
        return f64::INFINITY;
    }
    for j in space.junctions() {
        extras.push((j, space.pieces(j, PIECE_TOL)));
    }
    let mut grid = Grid {
        space,
        h,
        extras,
        attach: HashMap::new(),
        pieces: HashMap::new(),
    };
    for e in 0..grid.extras.len() {
        let (pt, mask) = grid.extras[e];
        let (ci, cj) = ((pt.x / h).round() as i64, (pt.y / h).round() as i64);
        for i in (ci - CONNECT_RADIUS)..=(ci + CONNECT_RADIUS) {
            for j in (cj - CONNECT_RADIUS)..=(cj + CONNECT_RADIUS) {
                if grid.lattice_pieces(i, j) & mask != 0 {
                    let cost = dist_linf(pt, grid.point(i, j)) / h;
                    grid.attach.entry((i, j)).or_default().push((e, cost));
                }
            }
        }
    }

    let target = q;
    let heuristic = |pt: Point| dist_linf(pt, target) / h;
    let quantize = |f: f64| (f * 1e7).round() as i64;

    let mut best: HashMap<Node, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(Node::Extra(0), 0.0);
    heap.push(Entry {
        key: quantize(heuristic(p)),
        g: 0.0,
        node: Node::Extra(0),
    });

    while let Some(Entry { g, node, .. }) = heap.pop() {
        if best.get(&node).is_some_and(|&b| g > b) {
            continue;
        }
        if node == Node::Extra(1) {
            return g * h;
        }
        let mut relax = |grid: &Grid, to: Node, cost: f64, heap: &mut BinaryHeap<Entry>| {
            let ng = g + cost;
            if best.get(&to).is_none_or(|&b| ng < b) {
                best.insert(to, ng);
                let pt = match to {
                    Node::Lattice(i, j) => grid.point(i, j),
                    Node::Extra(e) => grid.extras[e].0,
                };
                heap.push(Entry {
                    key: quantize(ng + heuristic(pt)),
                    g: ng,
                    node: to,
                });
            }
        };
        match node {
            Node::Lattice(i, j) => {
                let here = grid.lattice_pieces(i, j);
                for di in -1..=1 {
                    for dj in -1..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let m = grid.lattice_pieces(i + di, j + dj);
                        if m & here != 0 {
                            relax(&grid, Node::Lattice(i + di, j + dj), 1.0, &mut heap);
                        }
                    }
                }
                if let Some(list) = grid.attach.get(&(i, j)).cloned() {
                    for (e, c) in list {
                        relax(&grid, Node::Extra(e), c, &mut heap);
                    }
                }
            }
            Node::Extra(e) => {
                let (pt, mask) = grid.extras[e];
                let links: Vec<((i64, i64), f64)> = grid
                    .attach
                    .iter()
                    .filter_map(|(k, v)| v.iter().find(|(ee, _)| *ee == e).map(|(_, c)| (*k, *c)))
                    .collect();
                for ((i, j), c) in links {
                    relax(&grid, Node::Lattice(i, j), c, &mut heap);
                }
                for f in 0..grid.extras.len() {
                    let (other, omask) = grid.extras[f];
                    if f != e && omask & mask != 0 {
                        relax(&grid, Node::Extra(f), dist_linf(pt, other) / h, &mut heap);
                    }
                }
            }
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LinearDensity, Region2D, Segment1D};
    use crate::spaces::{ConeSpace, SuspensionSpace};
    use std::f64::consts::PI;

    #[test]
    fn through_the_apex() {
        let x = ConeSpace::standard();
        let d = intrinsic_dist(x.space(), Point::new(1.0, 0.0), Point::new(-3.0, 1.0), 0.01);
        assert!((d - 4.0).abs() < 0.02, "{d}");
        assert!(d >= 4.0 - 1e-9);
    }

    #[test]
    fn across_the_lens() {
        let y = SuspensionSpace::new();
        let d = intrinsic_dist(y.space(), Point::new(-PI / 2.0, 0.0), Point::new(PI / 2.0, 0.0), 1.0 / 400.0);
        assert!((d - PI).abs() < 1e-9, "{d}");
    }

    #[test]
    fn zero_for_equal_points() {
        let y = SuspensionSpace::new();
        assert_eq!(intrinsic_dist(y.space(), Point::new(0.1, 0.0), Point::new(0.1, 0.0), 0.01), 0.0);
    }

    #[test]
    fn disconnected_is_infinite() {
        let s = PlanarSpace::new(
            vec![],
            vec![
                Segment1D::horizontal(0.0, 1.0, 0.0, LinearDensity::Constant(1.0)),
                Segment1D::horizontal(2.0, 3.0, 0.0, LinearDensity::Constant(1.0)),
            ],
        );
        let d = intrinsic_dist(&s, Point::new(0.5, 0.0), Point::new(2.5, 0.0), 0.1);
        assert!(d.is_infinite());
    }

    #[test]
    fn non_convex_detour_is_longer() {
        // an L-shaped pair of squares: going around the corner costs more
        let a = Region2D::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.2), Point::new(0.0, 0.2)],
            LinearDensity::Constant(1.0),
        );
        let b = Region2D::new(
            vec![Point::new(0.0, 0.0), Point::new(0.2, 0.0), Point::new(0.2, 1.0), Point::new(0.0, 1.0)],
            LinearDensity::Constant(1.0),
        );
        let s = PlanarSpace::new(vec![a, b], vec![]);
        let d = intrinsic_dist(&s, Point::new(1.0, 0.1), Point::new(0.1, 1.0), 0.01);
        assert!(d >= dist_linf(Point::new(1.0, 0.1), Point::new(0.1, 1.0)) - 1e-12);
        // the corner square must be reached first: 0.8 across, then 0.8 up
        assert!((d - 1.6).abs() < 0.03, "{d}");
    }
}
