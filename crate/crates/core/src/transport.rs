//! Moving patches between systems with identical combinatorics, and the
//! end-to-end pipeline from a real system to marked unit squares.
//!
//! A patch is rebuilt tile by tile in breadth-first order from its seed:
//! each newly reached tile is placed so that the shared edge lines up with
//! the already placed neighbour in the target geometry. Every further shared
//! edge then checks that the placement does not depend on the path taken.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmath::{Rat, RealScalar};
use crate::rationalizer::{
    inradius_multiplier, rationalize, rescale_integral, scale_integral, RationalizeError,
    RationalizeReport, RescaleRecord,
};
use crate::scalar::{Scalar, Vec2};
use crate::squaresys::{build_square_system, SquareSystem};
use crate::tilemodel::{
    adjacency, local_vertices, twice_signed_area, validate_patch, validate_system, ExactSystem,
    Issue, Patch, PlacedGeom, Placement, Report, Stage, TileSystem,
};
use crate::zigzag::{build_zigzag_system, ZigzagError, ZigzagSystem};

#[derive(Debug, Error, PartialEq)]
pub enum TransportError {
    #[error("systems differ in edge-type ids or prototile words")]
    CombinatoricsDiffer,
    #[error("{which} system is invalid: {issues}")]
    InvalidSystem { which: &'static str, issues: String },
    #[error("patch is invalid in the source system: {0}")]
    InvalidPatch(String),
    #[error("patch is empty")]
    Empty,
    #[error("seed index {0} out of range")]
    BadSeed(usize),
    #[error("placed tile {0} is not edge-connected to the seed")]
    Disconnected(usize),
    #[error("marked origin does not lie in the seed tile")]
    OriginOutsideSeed,
    #[error("placement of tile {tile} depends on the path: reached from tile {from} across edge {edge} it lands elsewhere")]
    PathDependence {
        tile: usize,
        from: usize,
        edge: usize,
    },
    #[error("transported patch is invalid in the target system: {0}")]
    InvalidResult(String),
}

fn render(r: &Report) -> String {
    r.issues
        .iter()
        .map(Issue::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Two systems over the same edge-type ids and prototile words. Tiles and
/// edges correspond by index.
#[derive(Clone, Copy, Debug)]
pub struct SystemCorrespondence<'a, S, T> {
    pub source: &'a TileSystem<S>,
    pub target: &'a TileSystem<T>,
}

impl<'a, S: Scalar, T: Scalar> SystemCorrespondence<'a, S, T> {
    /// Pairs two valid systems with identical combinatorics.
    pub fn new(
        source: &'a TileSystem<S>,
        target: &'a TileSystem<T>,
    ) -> Result<Self, TransportError> {
        let c = Self::new_unchecked(source, target)?;
        for (which, rep) in [
            ("source", validate_system(source)),
            ("target", validate_system(target)),
        ] {
            if !rep.is_valid() {
                return Err(TransportError::InvalidSystem {
                    which,
                    issues: render(&rep),
                });
            }
        }
        Ok(c)
    }

    /// Checks combinatorics only; the target geometry may be broken, which
    /// transport then reports as path dependence.
    pub fn new_unchecked(
        source: &'a TileSystem<S>,
        target: &'a TileSystem<T>,
    ) -> Result<Self, TransportError> {
        if !source.same_combinatorics(target) {
            return Err(TransportError::CombinatoricsDiffer);
        }
        Ok(SystemCorrespondence { source, target })
    }

    pub fn reverse(&self) -> SystemCorrespondence<'a, T, S> {
        SystemCorrespondence {
            source: self.target,
            target: self.source,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportReport {
    /// Placed-tile indices in the order they were positioned.
    pub order: Vec<usize>,
    /// Shared edges, other than the one a tile was placed across, that
    /// confirmed an existing placement.
    pub path_checks: usize,
}

/// Barycentric coordinates of `p` in the fan triangle (v0, vi, vi+1) of the
/// polygon that contains it.
fn fan_coordinates<S: Scalar>(verts: &[Vec2<S>], p: &Vec2<S>) -> Option<(usize, S, S)> {
    let v0 = &verts[0];
    let d = p.sub(v0);
    let one = S::from_i64(1);
    for i in 1..verts.len() - 1 {
        let e1 = verts[i].sub(v0);
        let e2 = verts[i + 1].sub(v0);
        let det = e1.cross(&e2);
        if det.is_zero() {
            continue;
        }
        let a = d.cross(&e2).div(&det);
        let b = e1.cross(&d).div(&det);
        if a.sign() >= 0 && b.sign() >= 0 && one.sub(&a).sub(&b).sign() >= 0 {
            return Some((i, a, b));
        }
    }
    None
}

/// Rebuilds `p` in the target system of `c`.
///
/// The seed keeps its translation (converted to the target scalar); the
/// marked origin keeps its barycentric position within the seed tile. The
/// output lists tiles in the input order.
pub fn transport_patch<S: Scalar, T: Scalar>(
    p: &Patch<S>,
    c: &SystemCorrespondence<'_, S, T>,
) -> Result<(Patch<T>, TransportReport), TransportError> {
    if p.placed.is_empty() {
        return Err(TransportError::Empty);
    }
    if p.seed >= p.placed.len() {
        return Err(TransportError::BadSeed(p.seed));
    }
    let rep = validate_patch(p, c.source);
    if !rep.is_valid() {
        return Err(TransportError::InvalidPatch(render(&rep)));
    }
    let src_local = local_vertices(c.source);
    let dst_local = local_vertices(c.target);
    let geoms: Vec<PlacedGeom<S>> = p
        .placed
        .iter()
        .map(|pl| PlacedGeom::new(c.source, &src_local, pl))
        .collect();
    let adj = adjacency(&geoms);

    let n = p.placed.len();
    let mut pos: Vec<Option<Vec2<T>>> = vec![None; n];
    let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
    pos[p.seed] = Some(p.placed[p.seed].translation.convert());
    let mut order = vec![p.seed];
    let mut queue = VecDeque::from([p.seed]);
    let mut checks = 0;
    while let Some(i) = queue.pop_front() {
        let ti = pos[i].clone().expect("queued tiles are placed");
        let ki = p.placed[i].tile;
        for (e, link) in adj[i].iter().enumerate() {
            let Some((j, f)) = *link else { continue };
            let kj = p.placed[j].tile;
            let nj = dst_local[kj].len();
            let implied = ti.add(&dst_local[ki][e]).sub(&dst_local[kj][(f + 1) % nj]);
            match &pos[j] {
                None => {
                    pos[j] = Some(implied);
                    via[j] = Some((i, e));
                    order.push(j);
                    queue.push_back(j);
                }
                Some(tj) => {
                    // Crossing back over the edge a tile was placed across only
                    // tests the tile's own closure, so it is not counted as a
                    // second path.
                    if via[i] != Some((j, f)) {
                        checks += 1;
                    }
                    if !tj.approx_eq(&implied) {
                        return Err(TransportError::PathDependence {
                            tile: j,
                            from: i,
                            edge: e,
                        });
                    }
                }
            }
        }
    }
    if let Some(j) = pos.iter().position(Option::is_none) {
        return Err(TransportError::Disconnected(j));
    }

    let seed_tile = p.placed[p.seed].tile;
    let (i, a, b) = fan_coordinates(&src_local[seed_tile], &p.origin_offset)
        .ok_or(TransportError::OriginOutsideSeed)?;
    let dv = &dst_local[seed_tile];
    let origin_offset = dv[0]
        .add(&dv[i].sub(&dv[0]).scale(&a.convert()))
        .add(&dv[i + 1].sub(&dv[0]).scale(&b.convert()));

    let out = Patch {
        placed: p
            .placed
            .iter()
            .zip(pos)
            .map(|(pl, t)| Placement {
                tile: pl.tile,
                translation: t.expect("all tiles placed"),
            })
            .collect(),
        seed: p.seed,
        origin_offset,
    };
    let rep = validate_patch(&out, c.target);
    if !rep.is_valid() {
        return Err(TransportError::InvalidResult(render(&rep)));
    }
    Ok((
        out,
        TransportReport {
            order,
            path_checks: checks,
        },
    ))
}

/// A patch of zig-zag tiles: the same placements as a patch of the integral
/// system, each tile occupying its unit-cell region.
#[derive(Clone, Debug, PartialEq)]
pub struct ZigzagPatch {
    pub patch: Patch<Rat>,
}

impl ZigzagPatch {
    /// Lower-left corners of every occupied cell, in placement order.
    pub fn cells(&self, z: &ZigzagSystem) -> Vec<(Rat, Rat)> {
        self.patch
            .placed
            .iter()
            .flat_map(|pl| {
                z.tiles[pl.tile].cells.iter().map(move |&(x, y)| {
                    (
                        &pl.translation.x + &Rat::from(x),
                        &pl.translation.y + &Rat::from(y),
                    )
                })
            })
            .collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ZigzagPatchError {
    #[error("patch is invalid in the integral system: {0}")]
    InvalidPatch(String),
    #[error("zig-zag tiles overlap in cell ({0}, {1})")]
    Overlap(String, String),
}

/// Replaces every tile of a valid integral patch by its zig-zag tile.
pub fn zigzag_patch(p: &Patch<Rat>, z: &ZigzagSystem) -> Result<ZigzagPatch, ZigzagPatchError> {
    let rep = validate_patch(p, &z.source);
    if !rep.is_valid() {
        return Err(ZigzagPatchError::InvalidPatch(render(&rep)));
    }
    let zp = ZigzagPatch { patch: p.clone() };
    let mut seen = BTreeSet::new();
    for c in zp.cells(z) {
        if !seen.insert(c.clone()) {
            return Err(ZigzagPatchError::Overlap(c.0.to_string(), c.1.to_string()));
        }
    }
    Ok(zp)
}

/// Straightens a zig-zag patch back into a patch of the integral system.
pub fn unzigzag(zp: &ZigzagPatch) -> Patch<Rat> {
    zp.patch.clone()
}

/// The pipeline stage an error came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PipelineStage {
    Validate,
    Rationalize,
    Integralize,
    Zigzag,
}

impl PipelineStage {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineStage::Validate => "validate",
            PipelineStage::Rationalize => "rationalize",
            PipelineStage::Integralize => "integralize",
            PipelineStage::Zigzag => "zigzag",
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("validate: {0}")]
    Invalid(String),
    #[error("rationalize: {0}")]
    Rationalize(#[from] RationalizeError),
    #[error("integralize: {0}")]
    Integralize(String),
    #[error("zigzag: {0}")]
    Zigzag(#[from] ZigzagError),
    #[error(
        "zigzag: the scaled prototiles cover {cells} unit cells, above the budget of {budget}"
    )]
    TooLarge { cells: BigInt, budget: u64 },
}

impl PipelineError {
    pub fn stage(&self) -> PipelineStage {
        match self {
            PipelineError::Invalid(_) => PipelineStage::Validate,
            PipelineError::Rationalize(_) => PipelineStage::Rationalize,
            PipelineError::Integralize(_) => PipelineStage::Integralize,
            PipelineError::Zigzag(_) | PipelineError::TooLarge { .. } => PipelineStage::Zigzag,
        }
    }
}

/// Extra doublings of the prescale tried when a zig-zag region is
/// ill-formed.
pub const ZIGZAG_RETRIES: u32 = 4;

/// Largest total prototile area (in unit cells) the pipeline will rasterize.
pub const CELL_BUDGET: u64 = 1 << 22;

fn total_area(s: &ExactSystem) -> BigInt {
    let twice = (0..s.prototiles().len())
        .map(|k| twice_signed_area(&s.vertices(k)))
        .fold(Rat::zero(), |a, b| a + b);
    twice.floor().numer() / BigInt::from(2)
}

/// Every intermediate system produced by the pipeline.
#[derive(Clone, Debug)]
pub struct PipelineRecord {
    pub rational: ExactSystem,
    pub rationalize: Option<RationalizeReport>,
    /// After the inradius prescale and any retries.
    pub integral: ExactSystem,
    pub rescale: RescaleRecord,
    pub zigzag: ZigzagSystem,
    pub squares: SquareSystem,
    pub log: Vec<String>,
}

/// Runs validate → rationalize → integral rescale → prescale → zig-zag →
/// squares on a real system.
pub fn compose_pipeline(
    s: &TileSystem<RealScalar>,
    epsilon: f64,
) -> Result<PipelineRecord, PipelineError> {
    let rep = validate_system(s);
    if !rep.is_valid() {
        return Err(PipelineError::Invalid(render(&rep)));
    }
    let (rational, report) = rationalize(s, epsilon)?;
    let mut rec = compose_from_exact(&rational)?;
    rec.log.insert(
        0,
        format!(
            "rationalize: qmax {} after {} attempt(s), max deviation {:.3e}",
            report.qmax, report.attempts, report.max_deviation
        ),
    );
    rec.rationalize = Some(report);
    Ok(rec)
}

/// The pipeline from an exact (rational or integral) system onwards.
pub fn compose_from_exact(s: &ExactSystem) -> Result<PipelineRecord, PipelineError> {
    if s.stage() == Stage::Real {
        return Err(PipelineError::Integralize(
            "expected an exact system".into(),
        ));
    }
    let rep = validate_system(s);
    if !rep.is_valid() {
        return Err(PipelineError::Invalid(render(&rep)));
    }
    let mut log = Vec::new();
    let (base, d) = rescale_integral(s);
    log.push(format!("integralize: D = {d}"));
    let mut m = inradius_multiplier(&base);
    log.push(format!("prescale: inradius multiplier {m}"));
    let mut retries = 0;
    let (integral, zigzag) = loop {
        let scaled = scale_integral(&base, m);
        let cells = total_area(&scaled);
        if cells > BigInt::from(CELL_BUDGET) {
            return Err(PipelineError::TooLarge {
                cells,
                budget: CELL_BUDGET,
            });
        }
        match build_zigzag_system(&scaled) {
            Ok(z) => break (scaled, z),
            Err(e) if e.wants_rescale() && retries < ZIGZAG_RETRIES => {
                retries += 1;
                log.push(format!("zigzag: {e}; retrying with prescale {}", m * 2));
                m *= 2;
            }
            Err(e) => return Err(e.into()),
        }
    };
    log.push(format!(
        "zigzag: {} cells over {} tiles",
        zigzag.total_cells(),
        zigzag.tiles.len()
    ));
    let squares = build_square_system(&zigzag);
    log.push(format!(
        "squares: {} symbols, rule radius {}",
        squares.alphabet.len(),
        squares.rule_radius
    ));
    Ok(PipelineRecord {
        rational: s.clone(),
        rationalize: None,
        integral,
        rescale: RescaleRecord {
            lcm_denominator: d,
            inradius_prescale: m,
        },
        zigzag,
        squares,
        log,
    })
}

impl PipelineRecord {
    pub fn total_scale(&self) -> BigInt {
        self.rescale.total_scale()
    }
}
