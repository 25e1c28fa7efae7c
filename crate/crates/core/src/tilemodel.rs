//! Tiling systems, prototiles as signed boundary words, and finite patches.
//!
//! Boundary words are the source of truth: a prototile's vertices are the
//! prefix sums of its signed edge vectors, starting from the origin.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::exactmath::{Rat, RealScalar};
use crate::scalar::{orient, Scalar, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Real,
    Rational,
    Integral,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Real => "real",
            Stage::Rational => "rational",
            Stage::Integral => "integral",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct EdgeType<S> {
    pub id: String,
    pub vector: Vec2<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One letter of a boundary word: an edge type traversed forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub edge: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prototile {
    pub id: String,
    pub boundary: Vec<Letter>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate edge type id `{0}`")]
    DuplicateEdge(String),
    #[error("duplicate prototile id `{0}`")]
    DuplicatePrototile(String),
    #[error("edge type `{0}` has the zero vector")]
    ZeroVector(String),
    #[error("prototile `{tile}` references unknown edge index {edge}")]
    UnknownEdge { tile: String, edge: usize },
    #[error("prototile `{0}` has a boundary word shorter than 3")]
    ShortBoundary(String),
    #[error("stage `{stage}` is incompatible with the coordinate type")]
    StageMismatch { stage: Stage },
    #[error("edge type `{0}` has a non-integer coordinate at the integral stage")]
    NonInteger(String),
    #[error("prototile `{0}` is degenerate (zero or negative area)")]
    Degenerate(String),
}

/// A planar tiling system: edge types and prototiles at one numeric stage.
#[derive(Clone, Debug)]
pub struct TileSystem<S> {
    stage: Stage,
    edge_types: Vec<EdgeType<S>>,
    prototiles: Vec<Prototile>,
}

impl<S: Scalar> PartialEq for EdgeType<S> {
    fn eq(&self, o: &EdgeType<S>) -> bool {
        self.id == o.id && self.vector == o.vector
    }
}

impl<S: Scalar> PartialEq for TileSystem<S> {
    fn eq(&self, o: &TileSystem<S>) -> bool {
        self.stage == o.stage && self.edge_types == o.edge_types && self.prototiles == o.prototiles
    }
}

pub type RealSystem = TileSystem<RealScalar>;
pub type ExactSystem = TileSystem<Rat>;

impl<S: Scalar> TileSystem<S> {
    /// Builds a system, checking referential integrity and stage/type
    /// agreement. Geometric validity is reported separately by
    /// [`validate_system`].
    pub fn new(
        stage: Stage,
        edge_types: Vec<EdgeType<S>>,
        prototiles: Vec<Prototile>,
    ) -> Result<TileSystem<S>, ModelError> {
        if S::EXACT == (stage == Stage::Real) {
            return Err(ModelError::StageMismatch { stage });
        }
        let mut seen = HashMap::new();
        for e in &edge_types {
            if seen.insert(e.id.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateEdge(e.id.clone()));
            }
            if e.vector.is_zero() {
                return Err(ModelError::ZeroVector(e.id.clone()));
            }
            if stage == Stage::Integral {
                let int =
                    |s: &S| matches!(s.to_any(), crate::scalar::AnyNum::Exact(r) if r.is_integer());
                if !int(&e.vector.x) || !int(&e.vector.y) {
                    return Err(ModelError::NonInteger(e.id.clone()));
                }
            }
        }
        let mut seen = HashMap::new();
        for p in &prototiles {
            if seen.insert(p.id.as_str(), ()).is_some() {
                return Err(ModelError::DuplicatePrototile(p.id.clone()));
            }
            if p.boundary.len() < 3 {
                return Err(ModelError::ShortBoundary(p.id.clone()));
            }
            if let Some(l) = p.boundary.iter().find(|l| l.edge >= edge_types.len()) {
                return Err(ModelError::UnknownEdge {
                    tile: p.id.clone(),
                    edge: l.edge,
                });
            }
        }
        Ok(TileSystem {
            stage,
            edge_types,
            prototiles,
        })
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn edge_types(&self) -> &[EdgeType<S>] {
        &self.edge_types
    }

    pub fn prototiles(&self) -> &[Prototile] {
        &self.prototiles
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_types.iter().position(|e| e.id == id)
    }

    pub fn prototile_index(&self, id: &str) -> Option<usize> {
        self.prototiles.iter().position(|p| p.id == id)
    }

    /// Signed vector of one boundary letter.
    pub fn letter_vector(&self, l: Letter) -> Vec2<S> {
        let v = &self.edge_types[l.edge].vector;
        match l.sign {
            Sign::Plus => v.clone(),
            Sign::Minus => v.neg(),
        }
    }

    /// Vertices of prototile `k`: prefix sums of its boundary word from the
    /// origin. The closing vertex (equal to the first when closed) is omitted.
    pub fn vertices(&self, k: usize) -> Vec<Vec2<S>> {
        let word = &self.prototiles[k].boundary;
        let mut out = Vec::with_capacity(word.len());
        let mut cur = Vec2::zero();
        for &l in word {
            out.push(cur.clone());
            cur = cur.add(&self.letter_vector(l));
        }
        out
    }

    /// Signed sum of the boundary vectors of prototile `k`.
    pub fn closure_residual(&self, k: usize) -> Vec2<S> {
        self.prototiles[k]
            .boundary
            .iter()
            .fold(Vec2::zero(), |acc, &l| acc.add(&self.letter_vector(l)))
    }

    /// The same combinatorics with new edge vectors (in edge-type order).
    pub fn with_vectors<T: Scalar>(
        &self,
        stage: Stage,
        vectors: Vec<Vec2<T>>,
    ) -> Result<TileSystem<T>, ModelError> {
        assert_eq!(vectors.len(), self.edge_types.len());
        let edges = self
            .edge_types
            .iter()
            .zip(vectors)
            .map(|(e, v)| EdgeType {
                id: e.id.clone(),
                vector: v,
            })
            .collect();
        TileSystem::new(stage, edges, self.prototiles.clone())
    }

    /// True if both systems have the same edge-type ids and prototile words.
    pub fn same_combinatorics<T: Scalar>(&self, other: &TileSystem<T>) -> bool {
        self.prototiles == other.prototiles
            && self.edge_types.len() == other.edge_types.len()
            && self
                .edge_types
                .iter()
                .zip(&other.edge_types)
                .all(|(a, b)| a.id == b.id)
    }
}

/// One problem found by a validator.
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    Closure {
        tile: String,
        residual: (f64, f64),
    },
    NotSimple {
        tile: String,
    },
    NotCounterclockwise {
        tile: String,
    },
    ZeroArea {
        tile: String,
    },
    SeedOutOfRange {
        seed: usize,
        len: usize,
    },
    Overlap {
        a: usize,
        b: usize,
    },
    PartialContact {
        a: usize,
        edge_a: usize,
        b: usize,
        edge_b: usize,
    },
    EdgeMismatch {
        a: usize,
        edge_a: usize,
        b: usize,
        edge_b: usize,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Closure { tile, residual } => write!(
                f,
                "prototile {tile}: boundary does not close (residual {:.3e}, {:.3e})",
                residual.0, residual.1
            ),
            Issue::NotSimple { tile } => write!(f, "prototile {tile}: boundary is not a simple polygon"),
            Issue::NotCounterclockwise { tile } => {
                write!(f, "prototile {tile}: boundary is clockwise")
            }
            Issue::ZeroArea { tile } => write!(f, "prototile {tile}: zero area"),
            Issue::SeedOutOfRange { seed, len } => {
                write!(f, "seed index {seed} out of range for {len} placed tiles")
            }
            Issue::Overlap { a, b } => write!(f, "placed tiles {a} and {b} overlap"),
            Issue::PartialContact { a, edge_a, b, edge_b } => write!(
                f,
                "placed tiles {a} (edge {edge_a}) and {b} (edge {edge_b}) meet along part of an edge"
            ),
            Issue::EdgeMismatch { a, edge_a, b, edge_b } => write!(
                f,
                "placed tiles {a} (edge {edge_a}) and {b} (edge {edge_b}) share an edge with incompatible labels"
            ),
        }
    }
}

/// Issues found by a validator. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub issues: Vec<Issue>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

pub(crate) fn cmp_s<S: Scalar>(a: &S, b: &S) -> Ordering {
    match a.sub(b).sign() {
        -1 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

/// Twice the signed shoelace area of a closed vertex loop.
pub fn twice_signed_area<S: Scalar>(verts: &[Vec2<S>]) -> S {
    let n = verts.len();
    (0..n).fold(S::zero(), |acc, i| {
        acc.add(&verts[i].cross(&verts[(i + 1) % n]))
    })
}

fn on_segment<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>, p: &Vec2<S>) -> bool {
    orient(a, b, p) == 0 && p.sub(a).dot(&p.sub(b)).sign() <= 0
}

fn segments_intersect<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>, c: &Vec2<S>, d: &Vec2<S>) -> bool {
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Checks that a closed vertex loop is a simple polygon.
pub fn is_simple<S: Scalar>(verts: &[Vec2<S>]) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if verts[i].approx_eq(&verts[j]) {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (&verts[i], &verts[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (&verts[j], &verts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Consecutive edges may only share their common vertex.
                let (shared, other_a, other_c) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let folds = orient(other_a, shared, other_c) == 0
                    && other_a.sub(shared).dot(&other_c.sub(shared)).sign() > 0;
                if folds {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Where a point lies relative to a simple polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    Outside,
    Boundary,
}

pub fn classify_point<S: Scalar>(verts: &[Vec2<S>], p: &Vec2<S>) -> PointClass {
    let n = verts.len();
    let mut wn = 0i32;
    for i in 0..n {
        let (a, b) = (&verts[i], &verts[(i + 1) % n]);
        if on_segment(a, b, p) {
            return PointClass::Boundary;
        }
        let a_le = p.y.sub(&a.y).sign() >= 0;
        let b_le = p.y.sub(&b.y).sign() >= 0;
        if a_le {
            if !b_le && orient(a, b, p) > 0 {
                wn += 1;
            }
        } else if b_le && orient(a, b, p) < 0 {
            wn -= 1;
        }
    }
    if wn != 0 {
        PointClass::Inside
    } else {
        PointClass::Outside
    }
}

/// A point strictly inside a simple polygon.
pub fn interior_point<S: Scalar>(verts: &[Vec2<S>]) -> Vec2<S> {
    let n = verts.len();
    let lowest = (0..n)
        .min_by(|&i, &j| {
            cmp_s(&verts[i].y, &verts[j].y).then_with(|| cmp_s(&verts[i].x, &verts[j].x))
        })
        .expect("nonempty polygon");
    let v = &verts[lowest];
    let prev = &verts[(lowest + n - 1) % n];
    let next = &verts[(lowest + 1) % n];
    let tri = [prev.clone(), v.clone(), next.clone()];
    let base = next.sub(prev);
    let mut best: Option<(S, usize)> = None;
    for (i, w) in verts.iter().enumerate() {
        if i == lowest || i == (lowest + 1) % n || i == (lowest + n - 1) % n {
            continue;
        }
        if classify_point(&tri, w) == PointClass::Outside {
            continue;
        }
        let dist = base.cross(&w.sub(prev));
        let dist = if dist.sign() < 0 { dist.neg() } else { dist };
        if best
            .as_ref()
            .is_none_or(|(d, _)| cmp_s(&dist, d) == Ordering::Greater)
        {
            best = Some((dist, i));
        }
    }
    let half = S::from_i64(1).div(&S::from_i64(2));
    match best {
        Some((_, i)) => v.add(&verts[i]).scale(&half),
        None => {
            let third = S::from_i64(1).div(&S::from_i64(3));
            prev.add(v).add(next).scale(&third)
        }
    }
}

/// Per-prototile checks: closure, simplicity, orientation, nonzero area.
pub fn validate_system<S: Scalar>(s: &TileSystem<S>) -> Report {
    let mut issues = Vec::new();
    for (k, p) in s.prototiles.iter().enumerate() {
        let res = s.closure_residual(k);
        if !res.is_zero() {
            issues.push(Issue::Closure {
                tile: p.id.clone(),
                residual: res.to_f64(),
            });
            continue;
        }
        let verts = s.vertices(k);
        let area2 = twice_signed_area(&verts);
        if area2.is_zero() {
            issues.push(Issue::ZeroArea { tile: p.id.clone() });
            continue;
        }
        if !is_simple(&verts) {
            issues.push(Issue::NotSimple { tile: p.id.clone() });
            continue;
        }
        if area2.sign() < 0 {
            issues.push(Issue::NotCounterclockwise { tile: p.id.clone() });
        }
    }
    Report { issues }
}

/// Exact shoelace area of prototile `k`.
pub fn prototile_area<S: Scalar>(s: &TileSystem<S>, k: usize) -> Result<S, ModelError> {
    let area2 = twice_signed_area(&s.vertices(k));
    if area2.sign() <= 0 {
        return Err(ModelError::Degenerate(s.prototiles[k].id.clone()));
    }
    Ok(area2.div(&S::from_i64(2)))
}

#[derive(Clone, Debug)]
pub struct Placement<S> {
    pub tile: usize,
    pub translation: Vec2<S>,
}

impl<S: Scalar> PartialEq for Placement<S> {
    fn eq(&self, o: &Placement<S>) -> bool {
        self.tile == o.tile && self.translation == o.translation
    }
}

/// A finite set of placed prototiles with a marked origin inside the seed tile.
#[derive(Clone, Debug)]
pub struct Patch<S> {
    pub placed: Vec<Placement<S>>,
    pub seed: usize,
    /// Position of the marked origin relative to the seed tile's base vertex.
    pub origin_offset: Vec2<S>,
}

impl<S: Scalar> Patch<S> {
    pub fn single(tile: usize) -> Patch<S> {
        Patch {
            placed: vec![Placement {
                tile,
                translation: Vec2::zero(),
            }],
            seed: 0,
            origin_offset: Vec2::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.placed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placed.is_empty()
    }

    /// Rigid translation of every tile together with the marked origin.
    pub fn translate(&self, w: &Vec2<S>) -> Patch<S> {
        Patch {
            placed: self
                .placed
                .iter()
                .map(|p| Placement {
                    tile: p.tile,
                    translation: p.translation.add(w),
                })
                .collect(),
            seed: self.seed,
            origin_offset: self.origin_offset.clone(),
        }
    }

    /// The translation action on tiling space: the tiles stay put and the
    /// marked origin moves by `w`.
    pub fn shift_origin(&self, w: &Vec2<S>) -> Patch<S> {
        Patch {
            placed: self.placed.clone(),
            seed: self.seed,
            origin_offset: self.origin_offset.add(w),
        }
    }

    /// The same patch translated so that the seed sits at the origin.
    pub fn anchored(&self) -> Patch<S> {
        match self.placed.get(self.seed) {
            Some(pl) => self.translate(&pl.translation.neg()),
            None => self.clone(),
        }
    }

    /// Absolute position of the marked origin.
    pub fn origin(&self) -> Vec2<S> {
        self.placed[self.seed].translation.add(&self.origin_offset)
    }
}

impl<S: Scalar> PartialEq for Patch<S> {
    fn eq(&self, o: &Patch<S>) -> bool {
        self.placed == o.placed && self.seed == o.seed && self.origin_offset == o.origin_offset
    }
}

/// Absolute geometry of a placed tile.
pub struct PlacedGeom<S> {
    pub verts: Vec<Vec2<S>>,
    pub letters: Vec<Letter>,
    pub lo: Vec2<S>,
    pub hi: Vec2<S>,
    // Widened float box for cheap rejection before exact comparison.
    flo: (f64, f64),
    fhi: (f64, f64),
}

impl<S: Scalar> PlacedGeom<S> {
    pub fn new(s: &TileSystem<S>, local: &[Vec<Vec2<S>>], p: &Placement<S>) -> PlacedGeom<S> {
        let verts: Vec<Vec2<S>> = local[p.tile]
            .iter()
            .map(|v| v.add(&p.translation))
            .collect();
        let mut lo = verts[0].clone();
        let mut hi = verts[0].clone();
        for v in &verts[1..] {
            if cmp_s(&v.x, &lo.x) == Ordering::Less {
                lo.x = v.x.clone();
            }
            if cmp_s(&v.y, &lo.y) == Ordering::Less {
                lo.y = v.y.clone();
            }
            if cmp_s(&v.x, &hi.x) == Ordering::Greater {
                hi.x = v.x.clone();
            }
            if cmp_s(&v.y, &hi.y) == Ordering::Greater {
                hi.y = v.y.clone();
            }
        }
        let widen = |v: f64, dir: f64| v + dir * 1e-6 * (1.0 + v.abs());
        PlacedGeom {
            verts,
            letters: s.prototiles[p.tile].boundary.clone(),
            flo: (widen(lo.x.to_f64(), -1.0), widen(lo.y.to_f64(), -1.0)),
            fhi: (widen(hi.x.to_f64(), 1.0), widen(hi.y.to_f64(), 1.0)),
            lo,
            hi,
        }
    }

    fn edge(&self, i: usize) -> (&Vec2<S>, &Vec2<S>) {
        (&self.verts[i], &self.verts[(i + 1) % self.verts.len()])
    }

    fn boxes_touch(&self, o: &PlacedGeom<S>) -> bool {
        if self.flo.0 > o.fhi.0
            || o.flo.0 > self.fhi.0
            || self.flo.1 > o.fhi.1
            || o.flo.1 > self.fhi.1
        {
            return false;
        }
        cmp_s(&self.lo.x, &o.hi.x) != Ordering::Greater
            && cmp_s(&o.lo.x, &self.hi.x) != Ordering::Greater
            && cmp_s(&self.lo.y, &o.hi.y) != Ordering::Greater
            && cmp_s(&o.lo.y, &self.hi.y) != Ordering::Greater
    }
}

pub fn local_vertices<S: Scalar>(s: &TileSystem<S>) -> Vec<Vec<Vec2<S>>> {
    (0..s.prototiles.len()).map(|k| s.vertices(k)).collect()
}

/// Parameters along `a -> b` where the segment meets the other polygon's edges.
fn split_params<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>, other: &[Vec2<S>]) -> Vec<S> {
    let d = b.sub(a);
    let dd = d.dot(&d);
    let mut ts = vec![S::zero(), S::from_i64(1)];
    let in_unit = |t: &S| t.sign() >= 0 && t.sub(&S::from_i64(1)).sign() <= 0;
    let n = other.len();
    for i in 0..n {
        let (c, e) = (&other[i], &other[(i + 1) % n]);
        let f = e.sub(c);
        let denom = d.cross(&f);
        if denom.is_zero() {
            if orient(a, b, c) == 0 {
                for q in [c, e] {
                    let t = q.sub(a).dot(&d).div(&dd);
                    if in_unit(&t) {
                        ts.push(t);
                    }
                }
            }
            continue;
        }
        let t = c.sub(a).cross(&f).div(&denom);
        let u = c.sub(a).cross(&d).div(&denom);
        if in_unit(&t) && in_unit(&u) {
            ts.push(t);
        }
    }
    ts.sort_by(cmp_s);
    ts.dedup_by(|x, y| x.approx_eq(y));
    ts
}

fn boundary_enters<S: Scalar>(p: &[Vec2<S>], q: &[Vec2<S>]) -> bool {
    let n = p.len();
    let half = S::from_i64(1).div(&S::from_i64(2));
    for i in 0..n {
        let (a, b) = (&p[i], &p[(i + 1) % n]);
        let ts = split_params(a, b, q);
        let d = b.sub(a);
        for w in ts.windows(2) {
            let mid = w[0].add(&w[1]).mul(&half);
            let pt = a.add(&d.scale(&mid));
            if classify_point(q, &pt) == PointClass::Inside {
                return true;
            }
        }
    }
    false
}

/// Orientation sign of a convex polygon, or `None` if it is not convex.
fn convex_orientation<S: Scalar>(v: &[Vec2<S>]) -> Option<i8> {
    let n = v.len();
    let mut dir = 0;
    for i in 0..n {
        match orient(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]) {
            0 => {}
            o if dir == 0 => dir = o,
            o if o != dir => return None,
            _ => {}
        }
    }
    (dir != 0).then_some(dir)
}

/// True if some edge line of convex `p` has all of `q` on its closed outer side.
fn separates<S: Scalar>(p: &[Vec2<S>], dir: i8, q: &[Vec2<S>]) -> bool {
    let n = p.len();
    (0..n).any(|i| {
        let (a, b) = (&p[i], &p[(i + 1) % n]);
        q.iter().all(|v| orient(a, b, v) * dir <= 0)
    })
}

/// True if two simple polygons have intersecting interiors.
pub fn interiors_overlap<S: Scalar>(p: &[Vec2<S>], q: &[Vec2<S>]) -> bool {
    if let (Some(sp), Some(sq)) = (convex_orientation(p), convex_orientation(q)) {
        return !(separates(p, sp, q) || separates(q, sq, p));
    }
    boundary_enters(p, q)
        || boundary_enters(q, p)
        || classify_point(q, &interior_point(p)) == PointClass::Inside
        || classify_point(p, &interior_point(q)) == PointClass::Inside
}

/// Pairwise compatibility of two placed tiles.
pub(crate) fn check_pair<S: Scalar>(
    a: usize,
    ga: &PlacedGeom<S>,
    b: usize,
    gb: &PlacedGeom<S>,
    out: &mut Vec<Issue>,
) {
    if !ga.boxes_touch(gb) {
        return;
    }
    if interiors_overlap(&ga.verts, &gb.verts) {
        out.push(Issue::Overlap { a, b });
        return;
    }
    for i in 0..ga.verts.len() {
        let (p0, p1) = ga.edge(i);
        for j in 0..gb.verts.len() {
            let (q0, q1) = gb.edge(j);
            if !collinear_overlap(p0, p1, q0, q1) {
                continue;
            }
            if !(p0.approx_eq(q1) && p1.approx_eq(q0)) {
                out.push(Issue::PartialContact {
                    a,
                    edge_a: i,
                    b,
                    edge_b: j,
                });
                continue;
            }
            let (la, lb) = (ga.letters[i], gb.letters[j]);
            if la.edge != lb.edge || la.sign == lb.sign {
                out.push(Issue::EdgeMismatch {
                    a,
                    edge_a: i,
                    b,
                    edge_b: j,
                });
            }
        }
    }
}

/// True if the segments are collinear and overlap in more than a point.
fn collinear_overlap<S: Scalar>(p0: &Vec2<S>, p1: &Vec2<S>, q0: &Vec2<S>, q1: &Vec2<S>) -> bool {
    if orient(p0, p1, q0) != 0 || orient(p0, p1, q1) != 0 {
        return false;
    }
    let d = p1.sub(p0);
    let (t0, t1) = (q0.sub(p0).dot(&d), q1.sub(p0).dot(&d));
    let (tmin, tmax) = if cmp_s(&t0, &t1) == Ordering::Greater {
        (t1, t0)
    } else {
        (t0, t1)
    };
    let dd = d.dot(&d);
    let lo = if tmin.sign() > 0 { tmin } else { S::zero() };
    let hi = if cmp_s(&tmax, &dd) == Ordering::Less {
        tmax
    } else {
        dd
    };
    hi.sub(&lo).sign() > 0
}

/// Checks that placed tiles have disjoint interiors and meet full edge to
/// full edge with matching labels.
pub fn validate_patch<S: Scalar>(p: &Patch<S>, s: &TileSystem<S>) -> Report {
    let mut issues = Vec::new();
    if !p.placed.is_empty() && p.seed >= p.placed.len() {
        issues.push(Issue::SeedOutOfRange {
            seed: p.seed,
            len: p.placed.len(),
        });
    }
    let local = local_vertices(s);
    let geoms: Vec<PlacedGeom<S>> = p
        .placed
        .iter()
        .map(|pl| PlacedGeom::new(s, &local, pl))
        .collect();
    for (a, b) in candidate_pairs(&geoms) {
        check_pair(a, &geoms[a], b, &geoms[b], &mut issues);
    }
    Report { issues }
}

/// Index pairs `a < b` whose float boxes overlap in x, in lexicographic order.
fn candidate_pairs<S: Scalar>(geoms: &[PlacedGeom<S>]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..geoms.len()).collect();
    order.sort_by(|&i, &j| geoms[i].flo.0.total_cmp(&geoms[j].flo.0));
    let mut pairs = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if geoms[j].flo.0 > geoms[i].fhi.0 {
                break;
            }
            pairs.push((i.min(j), i.max(j)));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Edges of placed tiles paired with the neighbour sharing them, if any.
pub fn adjacency<S: Scalar>(geoms: &[PlacedGeom<S>]) -> Vec<Vec<Option<(usize, usize)>>> {
    let mut adj: Vec<Vec<Option<(usize, usize)>>> =
        geoms.iter().map(|g| vec![None; g.verts.len()]).collect();
    for (a, b) in candidate_pairs(geoms) {
        link_shared_edges(geoms, &mut adj, a, b);
    }
    adj
}

fn link_shared_edges<S: Scalar>(
    geoms: &[PlacedGeom<S>],
    adj: &mut [Vec<Option<(usize, usize)>>],
    a: usize,
    b: usize,
) {
    let (ga, gb) = (&geoms[a], &geoms[b]);
    if !ga.boxes_touch(gb) {
        return;
    }
    for i in 0..ga.verts.len() {
        let (p0, p1) = ga.edge(i);
        for j in 0..gb.verts.len() {
            let (q0, q1) = gb.edge(j);
            if p0.approx_eq(q1) && p1.approx_eq(q0) {
                adj[a][i] = Some((b, j));
                adj[b][j] = Some((a, i));
            }
        }
    }
}

/// A boundary edge for which no prototile could be attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedEdge {
    pub placed: usize,
    pub edge: usize,
}

#[derive(Clone, Debug)]
pub struct Growth<S> {
    pub patch: Patch<S>,
    pub skipped: Vec<SkippedEdge>,
}

/// Extends a valid patch by attaching up to `steps` prototiles across free
/// boundary edges.
///
/// Free edges are visited in (placement index, edge index) order; for each,
/// prototiles are tried in system order and their matching edges in word
/// order, and the first placement compatible with the whole patch is kept.
/// Edges with no compatible attachment are recorded and not revisited.
pub fn grow_patch<S: Scalar>(s: &TileSystem<S>, p: &Patch<S>, steps: usize) -> Growth<S> {
    let local = local_vertices(s);
    let mut patch = p.clone();
    let mut geoms: Vec<PlacedGeom<S>> = patch
        .placed
        .iter()
        .map(|pl| PlacedGeom::new(s, &local, pl))
        .collect();
    let mut adj = adjacency(&geoms);
    let mut skipped: Vec<SkippedEdge> = Vec::new();
    let mut attached = 0;
    let mut cursor = (0usize, 0usize);

    'grow: while attached < steps {
        // Next free, unskipped edge at or after the cursor; earlier edges
        // are either shared or skipped already.
        let mut found = None;
        'scan: for (t, links) in adj.iter().enumerate().skip(cursor.0) {
            let start = if t == cursor.0 { cursor.1 } else { 0 };
            for (e, link) in links.iter().enumerate().skip(start) {
                if link.is_none() && !skipped.iter().any(|sk| sk.placed == t && sk.edge == e) {
                    found = Some((t, e));
                    break 'scan;
                }
            }
        }
        let Some((t, e)) = found else { break };
        cursor = (t, e);

        let letter = geoms[t].letters[e];
        let start = geoms[t].verts[e].clone();
        for (k, proto) in s.prototiles.iter().enumerate() {
            let n = proto.boundary.len();
            for (f, l) in proto.boundary.iter().enumerate() {
                if l.edge != letter.edge || l.sign != letter.sign.flip() {
                    continue;
                }
                let translation = start.sub(&local[k][(f + 1) % n]);
                let cand = Placement {
                    tile: k,
                    translation,
                };
                let g = PlacedGeom::new(s, &local, &cand);
                let mut issues = Vec::new();
                let idx = geoms.len();
                for (i, other) in geoms.iter().enumerate() {
                    check_pair(i, other, idx, &g, &mut issues);
                    if !issues.is_empty() {
                        break;
                    }
                }
                if issues.is_empty() {
                    patch.placed.push(cand);
                    geoms.push(g);
                    adj.push(vec![None; n]);
                    for i in 0..idx {
                        link_shared_edges(&geoms, &mut adj, i, idx);
                    }
                    attached += 1;
                    continue 'grow;
                }
            }
        }
        skipped.push(SkippedEdge { placed: t, edge: e });
    }
    Growth { patch, skipped }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn rat_edge(id: &str, x: i64, y: i64) -> EdgeType<Rat> {
        EdgeType {
            id: id.to_string(),
            vector: Vec2::from_i64(x, y),
        }
    }

    pub fn word(spec: &[(usize, i64)]) -> Vec<Letter> {
        spec.iter()
            .map(|&(edge, s)| Letter {
                edge,
                sign: if s > 0 { Sign::Plus } else { Sign::Minus },
            })
            .collect()
    }

    /// Unit square: edges x=(1,0), y=(0,1); word +x +y -x -y.
    pub fn unit_square() -> ExactSystem {
        TileSystem::new(
            Stage::Integral,
            vec![rat_edge("x", 1, 0), rat_edge("y", 0, 1)],
            vec![Prototile {
                id: "Q".into(),
                boundary: word(&[(0, 1), (1, 1), (0, -1), (1, -1)]),
            }],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn rv(x: i64, y: i64) -> Vec2<Rat> {
        Vec2::from_i64(x, y)
    }

    #[test]
    fn convex_shortcut_agrees_with_general_overlap() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let tri = |rng: &mut rand::rngs::StdRng| loop {
            let v: Vec<Vec2<Rat>> = (0..3)
                .map(|_| rv(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
                .collect();
            match orient(&v[0], &v[1], &v[2]) {
                1 => return v,
                -1 => return vec![v[0].clone(), v[2].clone(), v[1].clone()],
                _ => {}
            }
        };
        for _ in 0..2000 {
            let (p, q) = (tri(&mut rng), tri(&mut rng));
            let general = boundary_enters(&p, &q)
                || boundary_enters(&q, &p)
                || classify_point(&q, &interior_point(&p)) == PointClass::Inside
                || classify_point(&p, &interior_point(&q)) == PointClass::Inside;
            assert_eq!(interiors_overlap(&p, &q), general, "{p:?} {q:?}");
        }
    }

    #[test]
    fn unit_square_is_valid_with_area_one() {
        let s = unit_square();
        assert!(validate_system(&s).is_valid());
        assert_eq!(prototile_area(&s, 0).unwrap(), Rat::one());
    }

    #[test]
    fn open_boundary_reports_closure() {
        let s = TileSystem::new(
            Stage::Integral,
            vec![rat_edge("x", 1, 0), rat_edge("y", 0, 1)],
            vec![Prototile {
                id: "bad".into(),
                boundary: word(&[(0, 1), (1, 1), (0, -1)]),
            }],
        )
        .unwrap();
        let rep = validate_system(&s);
        assert!(matches!(rep.issues[..], [Issue::Closure { .. }]));
    }

    #[test]
    fn clockwise_and_degenerate_words_are_reported() {
        let cw = TileSystem::new(
            Stage::Integral,
            vec![rat_edge("x", 1, 0), rat_edge("y", 0, 1)],
            vec![Prototile {
                id: "cw".into(),
                boundary: word(&[(1, 1), (0, 1), (1, -1), (0, -1)]),
            }],
        )
        .unwrap();
        assert!(matches!(
            validate_system(&cw).issues[..],
            [Issue::NotCounterclockwise { .. }]
        ));

        let flat = TileSystem::new(
            Stage::Integral,
            vec![rat_edge("x", 1, 0)],
            vec![Prototile {
                id: "flat".into(),
                boundary: word(&[(0, 1), (0, 1), (0, -1), (0, -1)]),
            }],
        )
        .unwrap();
        assert!(matches!(
            validate_system(&flat).issues[..],
            [Issue::ZeroArea { .. }]
        ));
        assert!(prototile_area(&flat, 0).is_err());
    }

    #[test]
    fn bowtie_is_not_simple() {
        // (0,0) -> (2,2) -> (2,0) -> (0,2) -> back: a self-crossing quadrilateral
        // whose signed area happens to be zero; shift one vertex to get nonzero area.
        let verts = vec![rv(0, 0), rv(2, 2), rv(3, 0), rv(0, 2)];
        assert!(!is_simple(&verts));
        assert!(is_simple(&[rv(0, 0), rv(2, 0), rv(2, 2), rv(0, 2)]));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            TileSystem::new(Stage::Integral, vec![rat_edge("x", 0, 0)], vec![]),
            Err(ModelError::ZeroVector(_))
        ));
        assert!(matches!(
            TileSystem::<Rat>::new(Stage::Real, vec![], vec![]),
            Err(ModelError::StageMismatch { .. })
        ));
        let half = EdgeType {
            id: "h".into(),
            vector: Vec2::new(Rat::new(1, 2), Rat::zero()),
        };
        assert!(matches!(
            TileSystem::new(Stage::Integral, vec![half], vec![]),
            Err(ModelError::NonInteger(_))
        ));
        assert!(matches!(
            TileSystem::new(
                Stage::Integral,
                vec![rat_edge("x", 1, 0)],
                vec![Prototile {
                    id: "p".into(),
                    boundary: word(&[(0, 1), (3, 1), (0, -1)])
                }]
            ),
            Err(ModelError::UnknownEdge { .. })
        ));
    }

    fn squares_at(pos: &[(Rat, Rat)]) -> Patch<Rat> {
        Patch {
            placed: pos
                .iter()
                .map(|(x, y)| Placement {
                    tile: 0,
                    translation: Vec2::new(x.clone(), y.clone()),
                })
                .collect(),
            seed: 0,
            origin_offset: Vec2::zero(),
        }
    }

    #[test]
    fn patch_validation_cases() {
        let s = unit_square();
        assert!(validate_patch(&Patch::single(0), &s).is_valid());
        let ok = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::one(), Rat::zero())]);
        assert!(validate_patch(&ok, &s).is_valid());
        let bad = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::new(1, 2), Rat::zero())]);
        assert!(validate_patch(&bad, &s)
            .issues
            .iter()
            .any(|i| matches!(i, Issue::Overlap { .. })));
        let same = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::zero(), Rat::zero())]);
        assert!(!validate_patch(&same, &s).is_valid());
        // Half-edge contact without overlap.
        let slid = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::one(), Rat::new(1, 2))]);
        assert!(validate_patch(&slid, &s)
            .issues
            .iter()
            .any(|i| matches!(i, Issue::PartialContact { .. })));
        // Corner contact only is fine.
        let corner = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::one(), Rat::one())]);
        assert!(validate_patch(&corner, &s).is_valid());
    }

    #[test]
    fn grow_unit_square_plus_shape() {
        let s = unit_square();
        assert_eq!(grow_patch(&s, &Patch::single(0), 0).patch, Patch::single(0));
        let g = grow_patch(&s, &Patch::single(0), 4);
        let got: Vec<(i64, i64)> = g
            .patch
            .placed
            .iter()
            .map(|p| {
                (
                    p.translation.x.to_i64().unwrap(),
                    p.translation.y.to_i64().unwrap(),
                )
            })
            .collect();
        // Oracle: edges of the seed in word order are bottom, right, top, left.
        assert_eq!(got, vec![(0, 0), (0, -1), (1, 0), (0, 1), (-1, 0)]);
        assert!(validate_patch(&g.patch, &s).is_valid());
        assert!(g.skipped.is_empty());
    }

    #[test]
    fn validation_is_translation_invariant() {
        let s = unit_square();
        let g = grow_patch(&s, &Patch::single(0), 6).patch;
        let bad = squares_at(&[(Rat::zero(), Rat::zero()), (Rat::new(1, 2), Rat::new(1, 3))]);
        let w = Vec2::new(Rat::new(7, 3), Rat::new(-5, 2));
        for p in [g, bad] {
            assert_eq!(validate_patch(&p, &s), validate_patch(&p.translate(&w), &s));
        }
    }

    #[test]
    fn interior_point_of_concave_polygon() {
        // An L shape whose lowest-left vertex neighbourhood contains a reflex vertex.
        let l = vec![rv(0, 0), rv(4, 0), rv(4, 1), rv(1, 1), rv(1, 4), rv(0, 4)];
        let p = interior_point(&l);
        assert_eq!(classify_point(&l, &p), PointClass::Inside);
        let arrow = vec![rv(0, 0), rv(4, 2), rv(0, 4), rv(1, 2)];
        assert_eq!(
            classify_point(&arrow, &interior_point(&arrow)),
            PointClass::Inside
        );
    }
}
