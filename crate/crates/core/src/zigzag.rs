//! Lattice staircases replacing straight integral edges, and the unit-cell
//! regions they bound.
//!
//! Each edge type gets one monotone unit-step path minimizing the largest
//! vertex-to-segment distance. The path for `-v` is always the reversal of the
//! path for `v`, so tiles sharing an edge share its staircase.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::exactmath::Rat;
use crate::tilemodel::{ExactSystem, Sign, Stage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl Step {
    pub fn delta(self) -> (i64, i64) {
        match self {
            Step::PosX => (1, 0),
            Step::NegX => (-1, 0),
            Step::PosY => (0, 1),
            Step::NegY => (0, -1),
        }
    }

    pub fn reverse(self) -> Step {
        match self {
            Step::PosX => Step::NegX,
            Step::NegX => Step::PosX,
            Step::PosY => Step::NegY,
            Step::NegY => Step::PosY,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Step::PosX => 'R',
            Step::NegX => 'L',
            Step::PosY => 'U',
            Step::NegY => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Step> {
        match c {
            'R' => Some(Step::PosX),
            'L' => Some(Step::NegX),
            'U' => Some(Step::PosY),
            'D' => Some(Step::NegY),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ZigzagError {
    #[error("cannot build a staircase for the zero vector")]
    ZeroVector,
    #[error("path ends at ({0}, {1}) instead of the edge vector")]
    EndpointMismatch(i64, i64),
    #[error("loop does not close: net displacement ({0}, {1})")]
    NotClosed(i64, i64),
    #[error("system must be integral, found stage {0}")]
    NotIntegral(Stage),
    #[error("edge coordinate of `{0}` does not fit in 64 bits")]
    CoordinateTooLarge(String),
    #[error("staircase for edge `{edge}` deviates {deviation:.6} > √2/2 from its segment")]
    DeviationTooLarge { edge: String, deviation: f64 },
    #[error("prototile `{tile}` has winding number {winding} around cell ({}, {}); rescale the system by 2 and retry", .cell.0, .cell.1)]
    WindingOutOfRange {
        tile: String,
        cell: (i64, i64),
        winding: i64,
    },
    #[error("prototile `{0}` bounds no unit cells; rescale the system by 2 and retry")]
    EmptyRegion(String),
    #[error("prototile `{tile}` has {cells} cells but its staircase loop has area {area}")]
    AreaMismatch {
        tile: String,
        cells: usize,
        area: i64,
    },
}

impl ZigzagError {
    /// Failures that a larger prescale is expected to cure.
    pub fn wants_rescale(&self) -> bool {
        matches!(
            self,
            ZigzagError::WindingOutOfRange { .. }
                | ZigzagError::EmptyRegion(_)
                | ZigzagError::AreaMismatch { .. }
        )
    }
}

/// A unit-step lattice path starting at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZigzagPath {
    pub steps: Vec<Step>,
}

impl ZigzagPath {
    pub fn displacement(&self) -> (i64, i64) {
        self.steps.iter().fold((0, 0), |(x, y), s| {
            let (dx, dy) = s.delta();
            (x + dx, y + dy)
        })
    }

    /// The same point set traversed from the other end.
    pub fn reversed(&self) -> ZigzagPath {
        ZigzagPath {
            steps: self.steps.iter().rev().map(|s| s.reverse()).collect(),
        }
    }

    /// Vertices including both endpoints.
    pub fn vertices(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = (0, 0);
        out.push(cur);
        for s in &self.steps {
            let (dx, dy) = s.delta();
            cur = (cur.0 + dx, cur.1 + dy);
            out.push(cur);
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        let has = |s: Step| self.steps.contains(&s);
        !(has(Step::PosX) && has(Step::NegX)) && !(has(Step::PosY) && has(Step::NegY))
    }
}

impl fmt::Display for ZigzagPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.steps
            .iter()
            .try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Largest grid (in lattice points) searched exactly; bigger edges use the
/// greedy closest-vertex walk.
const EXACT_SEARCH_LIMIT: u64 = 4_000_000;

/// The canonical staircase from the origin to `v`.
///
/// The lexicographically positive one of `v`, `-v` (positive x first, then
/// positive y) is solved directly; the other is the reversal. Among monotone
/// paths minimizing the maximum |cross(vertex, v)| (equivalently the maximum
/// distance to the segment) the lexicographically first step sequence is
/// chosen, x-steps before y-steps.
pub fn zigzag_edge(v: (i64, i64)) -> Result<ZigzagPath, ZigzagError> {
    if v == (0, 0) {
        return Err(ZigzagError::ZeroVector);
    }
    let canonical = v.0 > 0 || (v.0 == 0 && v.1 > 0);
    if canonical {
        Ok(canonical_path(v))
    } else {
        Ok(canonical_path((-v.0, -v.1)).reversed())
    }
}

fn canonical_path(v: (i64, i64)) -> ZigzagPath {
    let (w, h) = (v.0 as u64, v.1.unsigned_abs());
    if (w + 1).saturating_mul(h + 1) <= EXACT_SEARCH_LIMIT {
        minmax_path(v)
    } else {
        greedy_path(v)
    }
}

fn cross_abs(v: (i64, i64), i: i64, j: i64) -> u128 {
    (i as i128 * v.1 as i128 - j as i128 * v.0 as i128).unsigned_abs()
}

/// Bottleneck dynamic program over the (w+1)×(h+1) grid of the bounding box.
fn minmax_path(v: (i64, i64)) -> ZigzagPath {
    let w = v.0 as usize;
    let h = v.1.unsigned_abs() as usize;
    let sy: i64 = if v.1 < 0 { -1 } else { 1 };
    let y_step = if v.1 < 0 { Step::NegY } else { Step::PosY };
    let idx = |i: usize, j: usize| i * (h + 1) + j;
    let dev = |i: usize, j: usize| cross_abs(v, i as i64, sy * j as i64);
    let mut best = vec![u128::MAX; (w + 1) * (h + 1)];
    for i in (0..=w).rev() {
        for j in (0..=h).rev() {
            let tail = if i == w && j == h {
                0
            } else {
                let bx = if i < w {
                    best[idx(i + 1, j)]
                } else {
                    u128::MAX
                };
                let by = if j < h {
                    best[idx(i, j + 1)]
                } else {
                    u128::MAX
                };
                bx.min(by)
            };
            best[idx(i, j)] = dev(i, j).max(tail);
        }
    }
    let target = best[idx(0, 0)];
    let mut steps = Vec::with_capacity(w + h);
    let (mut i, mut j) = (0, 0);
    while (i, j) != (w, h) {
        if i < w && best[idx(i + 1, j)] <= target {
            steps.push(Step::PosX);
            i += 1;
        } else {
            steps.push(y_step);
            j += 1;
        }
    }
    ZigzagPath { steps }
}

fn greedy_path(v: (i64, i64)) -> ZigzagPath {
    let w = v.0;
    let h = v.1.abs();
    let sy: i64 = if v.1 < 0 { -1 } else { 1 };
    let y_step = if v.1 < 0 { Step::NegY } else { Step::PosY };
    let mut steps = Vec::with_capacity((w + h) as usize);
    let (mut i, mut j) = (0i64, 0i64);
    while (i, j) != (w, h) {
        let cx = if i < w {
            Some(cross_abs(v, i + 1, sy * j))
        } else {
            None
        };
        let cy = if j < h {
            Some(cross_abs(v, i, sy * (j + 1)))
        } else {
            None
        };
        let take_x = match (cx, cy) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            _ => false,
        };
        if take_x {
            steps.push(Step::PosX);
            i += 1;
        } else {
            steps.push(y_step);
            j += 1;
        }
    }
    ZigzagPath { steps }
}

/// Exact squared distance from a lattice point to the segment `[0, v]`.
pub fn point_segment_distance_sq(p: (i64, i64), v: (i64, i64)) -> Rat {
    let (px, py) = (p.0 as i128, p.1 as i128);
    let (vx, vy) = (v.0 as i128, v.1 as i128);
    let dot = px * vx + py * vy;
    let vv = vx * vx + vy * vy;
    if dot <= 0 {
        return Rat::from_int(px * px + py * py);
    }
    if dot >= vv {
        let (dx, dy) = (px - vx, py - vy);
        return Rat::from_int(dx * dx + dy * dy);
    }
    let c = px * vy - py * vx;
    Rat::new(c * c, vv)
}

/// Largest squared vertex-to-segment distance of a path ending at `v`.
pub fn max_deviation_sq(path: &ZigzagPath, v: (i64, i64)) -> Result<Rat, ZigzagError> {
    let end = path.displacement();
    if end != v {
        return Err(ZigzagError::EndpointMismatch(end.0, end.1));
    }
    Ok(path
        .vertices()
        .into_iter()
        .map(|p| point_segment_distance_sq(p, v))
        .max()
        .unwrap_or_else(Rat::zero))
}

/// Largest Euclidean distance from a path vertex to the segment `[0, v]`.
///
/// Distance to a segment is convex, so vertices suffice.
pub fn max_deviation(path: &ZigzagPath, v: (i64, i64)) -> Result<f64, ZigzagError> {
    Ok(max_deviation_sq(path, v)?.to_f64().sqrt())
}

/// True if the squared deviation is at most 1/2, compared exactly.
pub fn within_half_sqrt2(dev_sq: &Rat) -> bool {
    *dev_sq <= Rat::new(1, 2)
}

/// Winding number of a closed lattice loop around every cell center
/// `(x + 1/2, y + 1/2)`; cells with winding 0 are omitted.
pub fn winding_cells(
    start: (i64, i64),
    steps: &[Step],
) -> Result<BTreeMap<(i64, i64), i64>, ZigzagError> {
    // Vertical unit edges by row: (x, +1 up / -1 down).
    let mut rows: HashMap<i64, Vec<(i64, i64)>> = HashMap::new();
    let mut cur = start;
    for &s in steps {
        let (dx, dy) = s.delta();
        let next = (cur.0 + dx, cur.1 + dy);
        if dx == 0 {
            rows.entry(cur.1.min(next.1)).or_default().push((cur.0, dy));
        }
        cur = next;
    }
    if cur != start {
        return Err(ZigzagError::NotClosed(cur.0 - start.0, cur.1 - start.1));
    }
    let mut out = BTreeMap::new();
    for (y, mut edges) in rows {
        edges.sort_unstable();
        // Crossing count along a ray to the right of the cell center:
        // winding(cx) = Σ dir over edges with x ≥ cx + 1.
        let total: i64 = edges.iter().map(|e| e.1).sum();
        let mut left_sum = 0i64;
        let mut k = 0;
        let (xmin, xmax) = (edges[0].0, edges[edges.len() - 1].0);
        for cx in xmin..xmax {
            while k < edges.len() && edges[k].0 <= cx {
                left_sum += edges[k].1;
                k += 1;
            }
            let w = total - left_sum;
            if w != 0 {
                out.insert((cx, y), w);
            }
        }
    }
    Ok(out)
}

/// Twice the shoelace area of a lattice loop.
pub fn loop_twice_area(start: (i64, i64), steps: &[Step]) -> i64 {
    let mut cur = start;
    let mut acc = 0i64;
    for &s in steps {
        let (dx, dy) = s.delta();
        let next = (cur.0 + dx, cur.1 + dy);
        acc += cur.0 * next.1 - cur.1 * next.0;
        cur = next;
    }
    acc
}

/// The cell region bounded by one prototile's staircase loop, in the
/// prototile's own frame (base vertex at the origin).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagTile {
    pub id: String,
    pub tile: usize,
    /// Lower-left corners, sorted by (y, x).
    pub cells: Vec<(i64, i64)>,
    /// Least cell by (y, x).
    pub anchor: (i64, i64),
    pub connected: bool,
}

impl ZigzagTile {
    pub fn area(&self) -> usize {
        self.cells.len()
    }

    /// Cells relative to the anchor, in `cells` order.
    pub fn offsets(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells
            .iter()
            .map(move |c| (c.0 - self.anchor.0, c.1 - self.anchor.1))
    }
}

/// Staircases for every edge type and the region of every prototile.
#[derive(Clone, Debug, PartialEq)]
pub struct ZigzagSystem {
    pub paths: Vec<ZigzagPath>,
    pub tiles: Vec<ZigzagTile>,
    pub source: ExactSystem,
}

pub(crate) fn int_vector(s: &ExactSystem, edge: usize) -> Result<(i64, i64), ZigzagError> {
    let e = &s.edge_types()[edge];
    match (e.vector.x.to_i64(), e.vector.y.to_i64()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(ZigzagError::CoordinateTooLarge(e.id.clone())),
    }
}

impl ZigzagSystem {
    /// The closed staircase loop of prototile `k`, starting at its base vertex.
    pub fn loop_steps(&self, k: usize) -> Vec<Step> {
        let mut steps = Vec::new();
        for l in &self.source.prototiles()[k].boundary {
            let p = &self.paths[l.edge];
            match l.sign {
                Sign::Plus => steps.extend_from_slice(&p.steps),
                Sign::Minus => steps.extend(p.reversed().steps),
            }
        }
        steps
    }

    pub fn loop_vertices(&self, k: usize) -> Vec<(i64, i64)> {
        ZigzagPath {
            steps: self.loop_steps(k),
        }
        .vertices()
    }

    pub fn total_cells(&self) -> usize {
        self.tiles.iter().map(ZigzagTile::area).sum()
    }
}

fn is_connected(cells: &[(i64, i64)]) -> bool {
    let set: BTreeSet<(i64, i64)> = cells.iter().copied().collect();
    let Some(&first) = cells.first() else {
        return true;
    };
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some((x, y)) = queue.pop_front() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// Replaces every straight edge of an integral system by its staircase and
/// rasterizes every prototile.
pub fn build_zigzag_system(s: &ExactSystem) -> Result<ZigzagSystem, ZigzagError> {
    if s.stage() != Stage::Integral {
        return Err(ZigzagError::NotIntegral(s.stage()));
    }
    let mut paths = Vec::with_capacity(s.edge_types().len());
    for (i, e) in s.edge_types().iter().enumerate() {
        let v = int_vector(s, i)?;
        let p = zigzag_edge(v)?;
        let dev = max_deviation_sq(&p, v)?;
        if !within_half_sqrt2(&dev) {
            return Err(ZigzagError::DeviationTooLarge {
                edge: e.id.clone(),
                deviation: dev.to_f64().sqrt(),
            });
        }
        paths.push(p);
    }
    let mut z = ZigzagSystem {
        paths,
        tiles: Vec::with_capacity(s.prototiles().len()),
        source: s.clone(),
    };
    for (k, proto) in s.prototiles().iter().enumerate() {
        let steps = z.loop_steps(k);
        let winding = winding_cells((0, 0), &steps)?;
        if let Some((&cell, &w)) = winding.iter().find(|(_, &w)| w != 1) {
            return Err(ZigzagError::WindingOutOfRange {
                tile: proto.id.clone(),
                cell,
                winding: w,
            });
        }
        let mut cells: Vec<(i64, i64)> = winding.into_keys().collect();
        cells.sort_by_key(|&(x, y)| (y, x));
        if cells.is_empty() {
            return Err(ZigzagError::EmptyRegion(proto.id.clone()));
        }
        let area2 = loop_twice_area((0, 0), &steps);
        if area2 != 2 * cells.len() as i64 {
            return Err(ZigzagError::AreaMismatch {
                tile: proto.id.clone(),
                cells: cells.len(),
                area: area2 / 2,
            });
        }
        z.tiles.push(ZigzagTile {
            id: proto.id.clone(),
            tile: k,
            anchor: cells[0],
            connected: is_connected(&cells),
            cells,
        });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penrose;
    use crate::rationalizer::scale_integral;
    use crate::tilemodel::fixtures::unit_square;

    use Step::*;

    /// Every monotone path from the origin to `v`, by brute force.
    fn all_monotone(v: (i64, i64)) -> Vec<ZigzagPath> {
        let xs = if v.0 >= 0 { PosX } else { NegX };
        let ys = if v.1 >= 0 { PosY } else { NegY };
        let (w, h) = (v.0.unsigned_abs() as usize, v.1.unsigned_abs() as usize);
        let mut out = Vec::new();
        fn rec(
            w: usize,
            h: usize,
            xs: Step,
            ys: Step,
            cur: &mut Vec<Step>,
            out: &mut Vec<ZigzagPath>,
        ) {
            if w == 0 && h == 0 {
                out.push(ZigzagPath { steps: cur.clone() });
                return;
            }
            if w > 0 {
                cur.push(xs);
                rec(w - 1, h, xs, ys, cur, out);
                cur.pop();
            }
            if h > 0 {
                cur.push(ys);
                rec(w, h - 1, xs, ys, cur, out);
                cur.pop();
            }
        }
        rec(w, h, xs, ys, &mut Vec::new(), &mut out);
        out
    }

    fn brute_min_dev(v: (i64, i64)) -> Rat {
        all_monotone(v)
            .iter()
            .map(|p| max_deviation_sq(p, v).unwrap())
            .min()
            .unwrap()
    }

    #[test]
    fn axis_edge_is_straight() {
        let p = zigzag_edge((4, 0)).unwrap();
        assert_eq!(p.steps, vec![PosX; 4]);
        assert_eq!(max_deviation(&p, (4, 0)).unwrap(), 0.0);
        let back = zigzag_edge((-4, 0)).unwrap();
        assert_eq!(back.steps, vec![NegX; 4]);
    }

    #[test]
    fn diagonal_tie_takes_x_first() {
        let p = zigzag_edge((1, 1)).unwrap();
        assert_eq!(p.steps, vec![PosX, PosY]);
        assert_eq!(max_deviation_sq(&p, (1, 1)).unwrap(), Rat::new(1, 2));
        assert!((max_deviation(&p, (1, 1)).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn one_by_four_matches_enumeration() {
        let v = (1, 4);
        assert_eq!(all_monotone(v).len(), 5);
        let p = zigzag_edge(v).unwrap();
        let d = max_deviation_sq(&p, v).unwrap();
        assert_eq!(d, brute_min_dev(v));
        assert!(d < Rat::new(1, 2));
        // Frozen from the enumeration: the x-step sits in the middle.
        assert_eq!(p.steps, vec![PosY, PosY, PosX, PosY, PosY]);
    }

    #[test]
    fn zero_vector_and_endpoint_errors() {
        assert_eq!(zigzag_edge((0, 0)), Err(ZigzagError::ZeroVector));
        let p = zigzag_edge((2, 1)).unwrap();
        assert!(matches!(
            max_deviation(&p, (2, 2)),
            Err(ZigzagError::EndpointMismatch(2, 1))
        ));
    }

    #[test]
    fn minmax_matches_brute_force_and_reversal() {
        for x in -7i64..=7 {
            for y in -7i64..=7 {
                if (x, y) == (0, 0) {
                    continue;
                }
                let p = zigzag_edge((x, y)).unwrap();
                assert!(p.is_monotone());
                let d = max_deviation_sq(&p, (x, y)).unwrap();
                assert_eq!(d, brute_min_dev((x, y)), "v=({x},{y})");
                assert!(within_half_sqrt2(&d));
                assert_eq!(zigzag_edge((-x, -y)).unwrap(), p.reversed());
            }
        }
    }

    #[test]
    fn greedy_stays_within_bound() {
        for v in [(1000, 7), (3, 999), (777, -555), (1, 1), (5, -3)] {
            let p = greedy_path(v);
            assert_eq!(p.displacement(), v);
            assert!(within_half_sqrt2(&max_deviation_sq(&p, v).unwrap()));
        }
    }

    #[test]
    fn winding_of_unit_loops() {
        let ccw = [PosX, PosY, NegX, NegY];
        assert_eq!(
            winding_cells((0, 0), &ccw).unwrap(),
            BTreeMap::from([((0, 0), 1)])
        );
        let cw = [PosY, PosX, NegY, NegX];
        assert_eq!(
            winding_cells((0, 0), &cw).unwrap(),
            BTreeMap::from([((0, 0), -1)])
        );
        assert_eq!(
            winding_cells((0, 0), &[PosX, PosY]),
            Err(ZigzagError::NotClosed(1, 1))
        );
    }

    /// Oracle: count signed crossings of a horizontal ray from each cell center.
    fn ray_oracle(steps: &[Step], cell: (i64, i64)) -> i64 {
        let (cx, cy) = (cell.0 as f64 + 0.5, cell.1 as f64 + 0.5);
        let mut cur = (0i64, 0i64);
        let mut w = 0;
        for s in steps {
            let (dx, dy) = s.delta();
            let next = (cur.0 + dx, cur.1 + dy);
            if dx == 0 && (cur.0 as f64) > cx {
                let (lo, hi) = (cur.1.min(next.1) as f64, cur.1.max(next.1) as f64);
                if lo < cy && cy < hi {
                    w += dy;
                }
            }
            cur = next;
        }
        w
    }

    #[test]
    fn figure_eight_has_opposite_windings() {
        // Left cell counterclockwise, right cell clockwise, joined at (1,0)-(1,1).
        let fig8 = [PosX, PosY, PosX, NegY, NegX, PosY, NegX, NegY];
        let w = winding_cells((0, 0), &fig8).unwrap();
        assert_eq!(w.get(&(0, 0)), Some(&ray_oracle(&fig8, (0, 0))));
        assert_eq!(w.get(&(1, 0)), Some(&ray_oracle(&fig8, (1, 0))));
        assert_eq!(w[&(0, 0)], 1);
        assert_eq!(w[&(1, 0)], -1);
    }

    #[test]
    fn square_tile_after_prescale() {
        let s = scale_integral(&unit_square(), 2);
        let z = build_zigzag_system(&s).unwrap();
        assert_eq!(z.tiles[0].cells, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
        assert_eq!(z.tiles[0].anchor, (0, 0));
    }

    #[test]
    fn rational_stage_is_rejected() {
        let s = penrose::integral_system();
        let r = s
            .with_vectors(
                Stage::Rational,
                s.edge_types().iter().map(|e| e.vector.clone()).collect(),
            )
            .unwrap();
        assert_eq!(
            build_zigzag_system(&r),
            Err(ZigzagError::NotIntegral(Stage::Rational))
        );
    }

    #[test]
    fn penrose_tiles_are_sound() {
        let s = penrose::integral_system();
        let z = build_zigzag_system(&s).unwrap();
        assert_eq!(z.tiles.len(), 40);
        let a0 = &z.tiles[s.prototile_index("A0").unwrap()];
        let steps = z.loop_steps(a0.tile);
        assert_eq!(a0.cells.len() as i64 * 2, loop_twice_area((0, 0), &steps));
        for t in &z.tiles {
            let steps = z.loop_steps(t.tile);
            for c in &t.cells {
                assert_eq!(ray_oracle(&steps, *c), 1);
            }
        }
    }

    #[test]
    fn shared_edges_use_identical_point_sets() {
        let s = penrose::integral_system();
        let z = build_zigzag_system(&s).unwrap();
        for (i, e) in s.edge_types().iter().enumerate() {
            let v = (e.vector.x.to_i64().unwrap(), e.vector.y.to_i64().unwrap());
            let fwd: BTreeSet<_> = z.paths[i].vertices().into_iter().collect();
            let back: BTreeSet<_> = z.paths[i]
                .reversed()
                .vertices()
                .into_iter()
                .map(|(x, y)| (x + v.0, y + v.1))
                .collect();
            assert_eq!(fwd, back);
        }
    }

    #[test]
    fn build_is_deterministic() {
        let s = penrose::integral_system();
        assert_eq!(
            build_zigzag_system(&s).unwrap(),
            build_zigzag_system(&s).unwrap()
        );
    }
}
