//! Entropy convexity along grid Wasserstein geodesics in the cone.
//!
//! Both endpoint measures live on the lattice `h Z^2` restricted to a window
//! of the cone; atom `z` carries the reference mass of the `h`-cell around
//! it, and lattice distances are king-move graph distances. Midpoints of a
//! coupling move each pair `(i, j)` to the set
//! `M_ij = {z : d(i,z) + d(z,j) = d(i,j), |d(i,z) - d(z,j)| <= 1}`.
//!
//! The certificate is a lower bound on the entropy of every such midpoint
//! over every optimal coupling. Optimal couplings are exactly the plans
//! supported on the tight set `T` of an optimal dual pair, and for any
//! potential `phi` on the candidate sites the Gibbs inequality gives
//!
//! `Ent(nu) >= min_{pi on T} sum pi_ij min_{M_ij} phi - log sum_z m_z e^{phi_z}`.
//!
//! Frank-Wolfe iterates supply both an upper bound (an actual midpoint) and
//! the potentials `phi = log(nu / m)` fed to the lower bound.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{CheckReport, Metric, Verdict, Witness};
use crate::error::{domain, Error, Result};
use crate::geometry::{gauss_legendre, Point};
use crate::spaces::ConeSpace;

const FLOW_EPS: f64 = 1e-15;
const TIGHT_TOL: f64 = 1e-6;
const PHI_FLOOR: f64 = -50.0;
const LINE_SEARCH_STEPS: usize = 60;

/// Integer lattice coordinates.
type Node = (i64, i64);

/// A pair of squares of equal side, each carrying the normalized Lebesgue
/// measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdCandidate {
    pub first: Point,
    pub second: Point,
    pub side: f64,
}

impl CdCandidate {
    pub fn new(first: Point, second: Point, side: f64) -> Self {
        Self { first, second, side }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdOptions {
    pub resolution: f64,
    /// Resolution of the stability rerun, normally half of `resolution`.
    pub refined_resolution: f64,
    pub frank_wolfe_steps: usize,
    /// A margin at most `-violation` counts as a violation.
    pub violation: f64,
    /// Required ratio of refined to coarse margin.
    pub stability: f64,
}

impl Default for CdOptions {
    fn default() -> Self {
        Self {
            resolution: 1.0 / 200.0,
            refined_resolution: 1.0 / 400.0,
            frank_wolfe_steps: 40,
            violation: 1e-3,
            stability: 0.9,
        }
    }
}

/// Midpoint entropy bounds for one pair of lattice measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointCertificate {
    pub entropy_start: f64,
    pub entropy_end: f64,
    /// Certified lower bound on the entropy of every grid midpoint.
    pub midpoint_lower: f64,
    /// Entropy of the best midpoint found.
    pub midpoint_upper: f64,
    /// Squared grid Wasserstein distance.
    pub w2_squared: f64,
    pub atoms: (usize, usize),
    pub tight_pairs: usize,
}

impl MidpointCertificate {
    /// `(Ent_0 + Ent_1)/2 - K W^2/8 - lower`; negative certifies that no
    /// grid midpoint satisfies the `CD(K, inf)` inequality.
    pub fn margin(&self, k: f64) -> f64 {
        0.5 * (self.entropy_start + self.entropy_end) - k * self.w2_squared / 8.0 - self.midpoint_lower
    }

    /// Every `K` above this value is violated when the `K = 0` margin is negative.
    pub fn k_threshold(&self) -> f64 {
        8.0 * self.margin(0.0) / self.w2_squared
    }

    /// Distance between the best midpoint found and the certified bound.
    pub fn gap(&self) -> f64 {
        self.midpoint_upper - self.midpoint_lower
    }
}

/// Lattice nodes of the cone inside a rectangular window.
struct Lattice {
    h: f64,
    ix0: i64,
    iy0: i64,
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
    mass: Vec<f64>,
}

impl Lattice {
    fn new(cone: &ConeSpace, h: f64, (ix0, ix1, iy0, iy1): (i64, i64, i64, i64)) -> Self {
        let (nx, ny) = ((ix1 - ix0 + 1) as usize, (iy1 - iy0 + 1) as usize);
        let mut inside = vec![false; nx * ny];
        let mut mass = vec![0.0; nx * ny];
        for a in 0..nx {
            for b in 0..ny {
                let p = Point::new((ix0 + a as i64) as f64 * h, (iy0 + b as i64) as f64 * h);
                if p.x < 0.0 && cone.space().regions()[0].contains(p, 1e-12) {
                    inside[a + nx * b] = true;
                    mass[a + nx * b] = cell_mass(cone, p, h);
                }
            }
        }
        Self { h, ix0, iy0, nx, ny, inside, mass }
    }

    fn index(&self, (ix, iy): (i64, i64)) -> Option<usize> {
        let (a, b) = (ix - self.ix0, iy - self.iy0);
        (a >= 0 && b >= 0 && (a as usize) < self.nx && (b as usize) < self.ny).then(|| a as usize + self.nx * b as usize)
    }

    fn coords(&self, k: usize) -> (i64, i64) {
        (self.ix0 + (k % self.nx) as i64, self.iy0 + (k / self.nx) as i64)
    }

    /// King-move distances from `from` into `dist`; unreachable nodes get `u32::MAX`.
    fn bfs(&self, from: usize, dist: &mut [u32], queue: &mut Vec<usize>) {
        dist.fill(u32::MAX);
        queue.clear();
        dist[from] = 0;
        queue.push(from);
        let mut head = 0;
        while head < queue.len() {
            let k = queue[head];
            head += 1;
            let (a, b) = ((k % self.nx) as i64, (k / self.nx) as i64);
            for da in -1..=1 {
                for db in -1..=1 {
                    let (na, nb) = (a + da, b + db);
                    if na < 0 || nb < 0 || na as usize >= self.nx || nb as usize >= self.ny {
                        continue;
                    }
                    let n = na as usize + self.nx * nb as usize;
                    if self.inside[n] && dist[n] == u32::MAX {
                        dist[n] = dist[k] + 1;
                        queue.push(n);
                    }
                }
            }
        }
    }
}

/// Reference mass of the `h`-cell around `p`, split at the kinks where the
/// cone boundary crosses the cell's horizontal edges.
fn cell_mass(cone: &ConeSpace, p: Point, h: f64) -> f64 {
    let s = cone.slope();
    let (x0, x1) = (p.x - 0.5 * h, (p.x + 0.5 * h).min(0.0));
    let (y0, y1) = (p.y - 0.5 * h, p.y + 0.5 * h);
    let overlap = |x: f64| {
        let half = s * -x;
        (y1.min(half) - y0.max(-half)).max(0.0) / (2.0 * half)
    };
    let mut cuts = vec![x0, x1];
    for y in [y0, y1] {
        let k = -y.abs() / s;
        if k > x0 && k < x1 {
            cuts.push(k);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| gauss_legendre(overlap, w[0], w[1], 1)).sum()
}

/// Lattice nodes `(ix, iy)` of a square: `round(side/h)` per axis starting
/// at the rounded lower-left corner.
fn square_nodes(center: Point, side: f64, h: f64) -> Vec<(i64, i64)> {
    let n = (side / h).round() as i64;
    let (ax, ay) = (((center.x - 0.5 * side) / h).round() as i64, ((center.y - 0.5 * side) / h).round() as i64);
    (0..n).flat_map(|a| (0..n).map(move |b| (ax + a, ay + b))).collect()
}

/// A vertical band `[x - width/2, x + width/2)` covering the fraction
/// `fraction` of every slice, centered on the axis.
fn band_nodes(cone: &ConeSpace, x: f64, width: f64, fraction: f64, h: f64) -> Vec<(i64, i64)> {
    let n = (width / h).round() as i64;
    let ax = ((x - 0.5 * width) / h).round() as i64;
    let mut out = Vec::new();
    for a in ax..ax + n {
        let half = fraction * cone.slope() * -(a as f64 * h);
        let m = (half / h + 1e-9).floor() as i64;
        out.extend((-m..=m).map(|b| (a, b)));
    }
    out
}

#[derive(Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    cost: f64,
}

struct Transport {
    flow: Vec<f64>,
    /// Reduced costs `c_e + p_from - p_to`, non-negative at optimality.
    reduced: Vec<f64>,
    value: f64,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Uncapacitated transport by successive shortest paths with Dijkstra
/// potentials. Costs must be non-negative.
fn min_cost_transport(supply: &[f64], demand: &[f64], edges: &[Edge]) -> Result<Transport> {
    let (n, m) = (supply.len(), demand.len());
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); m];
    for (e, edge) in edges.iter().enumerate() {
        out_edges[edge.from].push(e);
        in_edges[edge.to].push(e);
    }
    let mut excess = supply.to_vec();
    let mut deficit = demand.to_vec();
    let mut flow = vec![0.0; edges.len()];
    let mut pot = vec![0.0; n + m];
    let mut dist = vec![f64::INFINITY; n + m];
    let mut pred: Vec<Option<usize>> = vec![None; n + m];
    let mut done = vec![false; n + m];
    let scale = supply.iter().sum::<f64>().max(1.0);
    loop {
        let remaining: f64 = excess.iter().sum();
        if remaining <= 1e-13 * scale {
            break;
        }
        dist.fill(f64::INFINITY);
        pred.fill(None);
        done.fill(false);
        let mut heap = BinaryHeap::new();
        for i in 0..n {
            if excess[i] > FLOW_EPS {
                dist[i] = 0.0;
                heap.push(Entry(0.0, i));
            }
        }
        let mut sink = None;
        while let Some(Entry(d, v)) = heap.pop() {
            if done[v] || d > dist[v] {
                continue;
            }
            done[v] = true;
            if v >= n && deficit[v - n] > FLOW_EPS {
                sink = Some(v);
                break;
            }
            if v < n {
                for &e in &out_edges[v] {
                    let w = n + edges[e].to;
                    let nd = d + (edges[e].cost + pot[v] - pot[w]).max(0.0);
                    if nd < dist[w] {
                        dist[w] = nd;
                        pred[w] = Some(e);
                        heap.push(Entry(nd, w));
                    }
                }
            } else {
                for &e in &in_edges[v - n] {
                    if flow[e] <= FLOW_EPS {
                        continue;
                    }
                    let w = edges[e].from;
                    let nd = d + (-edges[e].cost + pot[v] - pot[w]).max(0.0);
                    if nd < dist[w] {
                        dist[w] = nd;
                        pred[w] = Some(e);
                        heap.push(Entry(nd, w));
                    }
                }
            }
        }
        let sink = sink.ok_or(Error::Infeasible)?;
        let reach = dist[sink];
        for (p, &d) in pot.iter_mut().zip(&dist) {
            *p += d.min(reach);
        }
        // Walk back to the root, alternating forward and backward arcs.
        let mut path = Vec::new();
        let mut v = sink;
        let mut amount = deficit[sink - n];
        while let Some(e) = pred[v] {
            path.push(e);
            if v >= n {
                v = edges[e].from;
            } else {
                amount = amount.min(flow[e]);
                v = n + edges[e].to;
            }
        }
        amount = amount.min(excess[v]);
        excess[v] -= amount;
        deficit[sink - n] -= amount;
        let mut w = sink;
        for &e in &path {
            if w >= n {
                flow[e] += amount;
                w = edges[e].from;
            } else {
                flow[e] -= amount;
                w = n + edges[e].to;
            }
        }
    }
    let reduced: Vec<f64> = edges.iter().map(|e| e.cost + pot[e.from] - pot[n + e.to]).collect();
    let value = edges.iter().zip(&flow).map(|(e, f)| e.cost * f).sum();
    Ok(Transport { flow, reduced, value })
}

/// How endpoint atoms are weighted.
#[derive(Clone, Copy)]
enum Weighting {
    /// Equal weights: the lattice image of a Lebesgue-uniform measure.
    Uniform,
    /// Proportional to the reference mass.
    Reference,
}

/// Lattice atoms of one endpoint measure: window indices with normalized masses.
struct Atoms {
    nodes: Vec<usize>,
    weights: Vec<f64>,
    entropy: f64,
}

impl Atoms {
    fn new(lattice: &Lattice, nodes: &[(i64, i64)], weighting: Weighting) -> Result<Self> {
        let mut idx = Vec::with_capacity(nodes.len());
        for &c in nodes {
            match lattice.index(c).filter(|&k| lattice.inside[k] && lattice.mass[k] > 0.0) {
                Some(k) => idx.push(k),
                None => return Err(Error::OutsideSpace(Point::new(c.0 as f64 * lattice.h, c.1 as f64 * lattice.h))),
            }
        }
        let raw: Vec<f64> = match weighting {
            Weighting::Uniform => vec![1.0; idx.len()],
            Weighting::Reference => idx.iter().map(|&k| lattice.mass[k]).collect(),
        };
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let entropy = weights.iter().zip(&idx).map(|(&w, &k)| w * (w / lattice.mass[k]).ln()).sum();
        Ok(Self { nodes: idx, weights, entropy })
    }
}

/// Bounding box of two node sets, padded so that every midpoint set of a
/// pair fits.
fn window(a: &[(i64, i64)], b: &[(i64, i64)]) -> (i64, i64, i64, i64) {
    let span = |f: fn(&(i64, i64)) -> i64, s: &[(i64, i64)]| {
        let it = s.iter().map(f);
        (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
    };
    let (ax, bx) = (span(|p| p.0, a), span(|p| p.0, b));
    let (ay, by) = (span(|p| p.1, a), span(|p| p.1, b));
    let range = |(lo0, hi0): (i64, i64), (lo1, hi1): (i64, i64)| ((hi0 - lo1).abs().max((hi1 - lo0).abs()), (lo1 - hi0).max(lo0 - hi1).max(0));
    let (max_dx, min_dx) = range(ax, bx);
    let (max_dy, min_dy) = range(ay, by);
    let reach = max_dx.max(max_dy);
    let pad_x = (reach - min_dx) / 2 + 2;
    let pad_y = (reach - min_dy) / 2 + 2;
    (
        ax.0.min(bx.0) - pad_x,
        ax.1.max(bx.1) + pad_x,
        ay.0.min(by.0) - pad_y,
        ay.1.max(by.1) + pad_y,
    )
}

/// One tight pair and its midpoint sites (indices into the candidate list).
struct TightPair {
    from: usize,
    to: usize,
    sites: Vec<usize>,
}

/// Midpoint entropy bounds for the normalized reference measures on two
/// lattice node sets.
fn certify_nodes(
    cone: &ConeSpace,
    h: f64,
    (first, second): (&[Node], &[Node]),
    weighting: Weighting,
    steps: usize,
) -> Result<MidpointCertificate> {
    let lattice = Lattice::new(cone, h, window(first, second));
    let (mu0, mu1) = (Atoms::new(&lattice, first, weighting)?, Atoms::new(&lattice, second, weighting)?);
    let (n, m) = (mu0.nodes.len(), mu1.nodes.len());
    let size = lattice.inside.len();
    let mut dist = vec![u32::MAX; size];
    let mut queue = Vec::with_capacity(size);

    let mut steps_ij = vec![0u32; n * m];
    for (i, &a) in mu0.nodes.iter().enumerate() {
        lattice.bfs(a, &mut dist, &mut queue);
        for (j, &b) in mu1.nodes.iter().enumerate() {
            if dist[b] == u32::MAX {
                return Err(Error::Invalid("endpoint supports are disconnected in the window".into()));
            }
            steps_ij[i * m + j] = dist[b];
        }
    }
    let edges: Vec<Edge> = (0..n * m)
        .map(|e| Edge {
            from: e / m,
            to: e % m,
            cost: (steps_ij[e] as f64).powi(2),
        })
        .collect();
    let optimal = min_cost_transport(&mu0.weights, &mu1.weights, &edges)?;
    let worst_reduced = optimal.reduced.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = optimal
        .reduced
        .iter()
        .zip(&optimal.flow)
        .filter(|(_, &f)| f > FLOW_EPS)
        .map(|(r, _)| *r)
        .fold(0.0, f64::max);
    if worst_reduced < -TIGHT_TOL || slack > TIGHT_TOL {
        return Err(Error::Invalid(format!(
            "transport duals fail optimality: min reduced cost {worst_reduced}, max slack {slack}"
        )));
    }
    let w2_squared = optimal.value * h * h;

    // Midpoint rectangles of the tight pairs, filled from both ends.
    struct Rect {
        x0: i64,
        y0: i64,
        w: usize,
        from_start: Vec<u32>,
        from_end: Vec<u32>,
    }
    let tight: Vec<usize> = (0..edges.len()).filter(|&e| optimal.reduced[e] <= TIGHT_TOL).collect();
    let mut rects: Vec<Rect> = tight
        .iter()
        .map(|&e| {
            let (a, b) = (lattice.coords(mu0.nodes[e / m]), lattice.coords(mu1.nodes[e % m]));
            let r = (steps_ij[e] as i64 + 1) / 2;
            let (x0, x1) = (a.0.max(b.0) - r, a.0.min(b.0) + r);
            let (y0, y1) = (a.1.max(b.1) - r, a.1.min(b.1) + r);
            let (w, ht) = ((x1 - x0 + 1).max(0) as usize, (y1 - y0 + 1).max(0) as usize);
            Rect {
                x0,
                y0,
                w,
                from_start: vec![u32::MAX; w * ht],
                from_end: vec![u32::MAX; w * ht],
            }
        })
        .collect();
    let fill = |rect: &Rect, dist: &[u32], out: &mut Vec<u32>| {
        for (c, slot) in out.iter_mut().enumerate() {
            let p = (rect.x0 + (c % rect.w) as i64, rect.y0 + (c / rect.w) as i64);
            if let Some(k) = lattice.index(p) {
                *slot = dist[k];
            }
        }
    };
    let mut by_start = vec![Vec::new(); n];
    let mut by_end = vec![Vec::new(); m];
    for (t, &e) in tight.iter().enumerate() {
        by_start[e / m].push(t);
        by_end[e % m].push(t);
    }
    for (i, list) in by_start.iter().enumerate().filter(|(_, l)| !l.is_empty()) {
        lattice.bfs(mu0.nodes[i], &mut dist, &mut queue);
        for &t in list {
            let mut out = std::mem::take(&mut rects[t].from_start);
            fill(&rects[t], &dist, &mut out);
            rects[t].from_start = out;
        }
    }
    for (j, list) in by_end.iter().enumerate().filter(|(_, l)| !l.is_empty()) {
        lattice.bfs(mu1.nodes[j], &mut dist, &mut queue);
        for &t in list {
            let mut out = std::mem::take(&mut rects[t].from_end);
            fill(&rects[t], &dist, &mut out);
            rects[t].from_end = out;
        }
    }
    let mut site_of: HashMap<usize, usize> = HashMap::new();
    let mut sites: Vec<usize> = Vec::new();
    let mut pairs = Vec::with_capacity(tight.len());
    for (t, &e) in tight.iter().enumerate() {
        let d = steps_ij[e];
        let rect = &rects[t];
        let mut own = Vec::new();
        for c in 0..rect.from_start.len() {
            let (s, f) = (rect.from_start[c], rect.from_end[c]);
            if s == u32::MAX || f == u32::MAX || s + f != d || s.abs_diff(f) > 1 {
                continue;
            }
            let p = (rect.x0 + (c % rect.w) as i64, rect.y0 + (c / rect.w) as i64);
            let k = lattice.index(p).expect("finite distance implies a window node");
            let next = sites.len();
            let id = *site_of.entry(k).or_insert(next);
            if id == next {
                sites.push(k);
            }
            own.push(id);
        }
        if own.is_empty() {
            return Err(Error::Invalid("a tight pair has no grid midpoint".into()));
        }
        pairs.push(TightPair {
            from: e / m,
            to: e % m,
            sites: own,
        });
    }
    let site_mass: Vec<f64> = sites.iter().map(|&k| lattice.mass[k]).collect();

    // Start from the uniform spread of the first optimal plan.
    let mut nu = vec![0.0; sites.len()];
    for (t, &e) in tight.iter().enumerate() {
        let f = optimal.flow[e];
        if f > FLOW_EPS {
            let share = f / pairs[t].sites.len() as f64;
            pairs[t].sites.iter().for_each(|&s| nu[s] += share);
        }
    }
    let entropy = |nu: &[f64]| -> f64 {
        nu.iter()
            .zip(&site_mass)
            .filter(|(&v, _)| v > 0.0)
            .map(|(&v, &w)| v * (v / w).ln())
            .sum()
    };
    let tight_edges: Vec<(usize, usize)> = pairs.iter().map(|p| (p.from, p.to)).collect();
    let mut upper = entropy(&nu);
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..=steps {
        let phi: Vec<f64> = nu
            .iter()
            .zip(&site_mass)
            .map(|(&v, &w)| if v > 0.0 { (v / w).ln().max(PHI_FLOOR) } else { PHI_FLOOR })
            .collect();
        let choice: Vec<usize> = pairs
            .iter()
            .map(|p| *p.sites.iter().min_by(|&&a, &&b| phi[a].total_cmp(&phi[b])).expect("non-empty"))
            .collect();
        let shift = choice.iter().map(|&s| phi[s]).fold(f64::INFINITY, f64::min);
        let lmo_edges: Vec<Edge> = tight_edges
            .iter()
            .zip(&choice)
            .map(|(&(from, to), &s)| Edge {
                from,
                to,
                cost: phi[s] - shift,
            })
            .collect();
        let lmo = min_cost_transport(&mu0.weights, &mu1.weights, &lmo_edges)?;
        let log_partition = {
            let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            top + phi.iter().zip(&site_mass).map(|(&p, &w)| w * (p - top).exp()).sum::<f64>().ln()
        };
        lower = lower.max(lmo.value + shift - log_partition);
        let mut vertex = vec![0.0; sites.len()];
        for (e, &f) in lmo.flow.iter().enumerate() {
            if f > FLOW_EPS {
                vertex[choice[e]] += f;
            }
        }
        let mix = |g: f64| -> Vec<f64> { nu.iter().zip(&vertex).map(|(a, b)| (1.0 - g) * a + g * b).collect() };
        let (mut lo, mut hi) = (0.0, 1.0);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..LINE_SEARCH_STEPS {
            let (g1, g2) = (hi - ratio * (hi - lo), lo + ratio * (hi - lo));
            if entropy(&mix(g1)) <= entropy(&mix(g2)) {
                hi = g2;
            } else {
                lo = g1;
            }
        }
        let step = 0.5 * (lo + hi);
        let next = mix(step);
        let value = entropy(&next);
        if value < upper {
            upper = value;
            nu = next;
        }
    }
    Ok(MidpointCertificate {
        entropy_start: mu0.entropy,
        entropy_end: mu1.entropy,
        midpoint_lower: lower,
        midpoint_upper: upper,
        w2_squared,
        atoms: (n, m),
        tight_pairs: pairs.len(),
    })
}

/// Certificate for one candidate at lattice spacing `resolution`.
pub fn midpoint_certificate(cone: &ConeSpace, candidate: &CdCandidate, resolution: f64, frank_wolfe_steps: usize) -> Result<MidpointCertificate> {
    if !(resolution > 0.0 && resolution < candidate.side) {
        return Err(domain("resolution", resolution, "must be positive and below the square side"));
    }
    // the second square is the first shifted by the rounded displacement, so
    // both carry the same lattice pattern
    let first = square_nodes(candidate.first, candidate.side, resolution);
    let shift = (
        ((candidate.second.x - candidate.first.x) / resolution).round() as i64,
        ((candidate.second.y - candidate.first.y) / resolution).round() as i64,
    );
    let second: Vec<(i64, i64)> = first.iter().map(|&(a, b)| (a + shift.0, b + shift.1)).collect();
    certify_nodes(cone, resolution, (&first, &second), Weighting::Uniform, frank_wolfe_steps)
}

/// Two vertical bands covering the same slice fraction, displaced
/// horizontally, each carrying the normalized reference measure; their
/// projections are translates of Lebesgue measure on an interval.
pub fn band_control(cone: &ConeSpace, x: f64, shift: f64, width: f64, fraction: f64, resolution: f64, frank_wolfe_steps: usize) -> Result<MidpointCertificate> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(domain("fraction", fraction, "must lie in (0, 1]"));
    }
    let first = band_nodes(cone, x, width, fraction, resolution);
    let second = band_nodes(cone, x - shift, width, fraction, resolution);
    certify_nodes(cone, resolution, (&first, &second), Weighting::Reference, frank_wolfe_steps)
}

/// Near-diagonal pairs of side-0.05 squares, including one long nearly
/// horizontal pair far from the apex.
pub fn default_candidates() -> Vec<CdCandidate> {
    let side = 0.05;
    [
        ((-1.0, 0.3), (-1.8, -0.5)),
        ((-1.0, 0.3), (-1.4, -0.1)),
        ((-1.0, 0.3), (-1.8, -0.42)),
        ((-2.0, 0.6), (-2.8, -0.2)),
        ((-3.0, 0.8), (-3.2, 0.6)),
    ]
    .into_iter()
    .map(|((ax, ay), (bx, by))| CdCandidate::new(Point::new(ax, ay), Point::new(bx, by), side))
    .collect()
}

/// Searches the candidates at the coarse resolution, reruns the most
/// negative one at the refined resolution, and reports the certified
/// `K = 0` margin. Without a stable violation the verdict is inconclusive.
pub fn cd_failure_search(cone: &ConeSpace, candidates: &[CdCandidate], opts: &CdOptions) -> Result<CheckReport> {
    if candidates.is_empty() {
        return Err(domain("candidates", 0.0, "need at least one candidate"));
    }
    let mut coarse = Vec::with_capacity(candidates.len());
    for c in candidates {
        coarse.push(midpoint_certificate(cone, c, opts.resolution, opts.frank_wolfe_steps)?);
    }
    let (best, cert) = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.margin(0.0).total_cmp(&b.1.margin(0.0)))
        .expect("non-empty");
    let refined = midpoint_certificate(cone, &candidates[best], opts.refined_resolution, opts.frank_wolfe_steps)?;
    let (m0, m1) = (cert.margin(0.0), refined.margin(0.0));
    let metrics = vec![
        Metric::at_most("margin", m0, -opts.violation, 0.0),
        Metric::at_most("refined_margin", m1, -opts.violation, 0.0),
        Metric::at_least("stability", m1 / m0, opts.stability, 0.0),
    ];
    let mut report = CheckReport::from_metrics("cd-failure", metrics);
    if !report.passed() {
        report.verdict = Verdict::Inconclusive;
    }
    let c = &candidates[best];
    let w = Witness::new("square centers", vec![c.first, c.second])
        .with("side", c.side)
        .with("entropy_start", cert.entropy_start)
        .with("entropy_end", cert.entropy_end)
        .with("midpoint_lower", cert.midpoint_lower)
        .with("midpoint_upper", cert.midpoint_upper)
        .with("w2_squared", cert.w2_squared)
        .with("k_threshold", cert.k_threshold())
        .with("refined_k_threshold", refined.k_threshold())
        .with("duality_gap", cert.gap())
        .with("refined_duality_gap", refined.gap());
    let mut report = report
        .with_grid("resolution", opts.resolution)
        .with_grid("refined_resolution", opts.refined_resolution)
        .with_grid("candidates", candidates.len() as f64)
        .with_grid("frank_wolfe_steps", opts.frank_wolfe_steps as f64)
        .with_witness(w);
    for (c, cert) in candidates.iter().zip(&coarse) {
        report = report.with_note(format!(
            "candidate ({}, {}) -> ({}, {}): margin {:.6}, gap {:.2e}",
            c.first.x,
            c.first.y,
            c.second.x,
            c.second.y,
            cert.margin(0.0),
            cert.gap()
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone() -> ConeSpace {
        ConeSpace::standard()
    }

    #[test]
    fn transport_matches_a_hand_solved_instance() {
        let edges = [(0, 0, 4.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 6.0)]
            .map(|(from, to, cost)| Edge { from, to, cost });
        let t = min_cost_transport(&[0.5, 0.5], &[0.3, 0.7], &edges).unwrap();
        // Source 0 ships everything to target 1, source 1 splits.
        assert!((t.value - (0.5 * 1.0 + 0.3 * 2.0 + 0.2 * 6.0)).abs() < 1e-12);
        assert!(t.reduced.iter().all(|&r| r > -1e-12));
    }

    #[test]
    fn cell_masses_add_up_to_the_projection() {
        let h = 0.01;
        let c = cone();
        let ix = -70;
        let total: f64 = (-30..=30)
            .map(|iy| {
                let p = Point::new(ix as f64 * h, iy as f64 * h);
                if c.space().regions()[0].contains(p, 1e-12) {
                    cell_mass(&c, p, h)
                } else {
                    0.0
                }
            })
            .sum();
        assert!((total - h).abs() < 1e-3 * h, "{total}");
    }

    #[test]
    fn identical_measures_have_zero_margin() {
        let c = CdCandidate::new(Point::new(-1.0, 0.1), Point::new(-1.0, 0.1), 0.05);
        let cert = midpoint_certificate(&cone(), &c, 1.0 / 100.0, 5).unwrap();
        assert!(cert.w2_squared.abs() < 1e-15);
        assert!(cert.margin(0.0).abs() < 1e-9, "{cert:?}");
    }

    #[test]
    fn diagonal_pair_violates_convexity() {
        let c = default_candidates()[0];
        let cert = midpoint_certificate(&cone(), &c, 1.0 / 200.0, 40).unwrap();
        assert!(cert.margin(0.0) <= -1e-3, "{cert:?}");
        assert!(cert.midpoint_lower <= cert.midpoint_upper + 1e-12);
    }

    #[test]
    fn horizontal_bands_do_not_violate() {
        let cert = band_control(&cone(), -0.5, 0.1, 0.02, 0.3, 1.0 / 200.0, 40).unwrap();
        assert!(cert.margin(0.0) >= -1e-3, "{cert:?}");
    }

    #[test]
    fn squares_outside_the_cone_are_rejected() {
        let c = CdCandidate::new(Point::new(-1.0, 0.5), Point::new(-1.2, 0.3), 0.05);
        assert!(midpoint_certificate(&cone(), &c, 1.0 / 100.0, 5).is_err());
    }
}
