//! From real edge vectors to an integral system.
//!
//! Every prototile contributes one closure row (its signed edge counts); both
//! coordinates of the edge vectors must lie in the kernel of that integer
//! matrix. Exact solutions near the real vectors are found by pinning the free
//! variables of the reduced row echelon form to bounded-denominator
//! approximations and back-substituting the pivot variables exactly.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmath::{best_rational_approx, lcm_denominators, rref, Rat, RatMatrix, RealScalar};
use crate::scalar::{Scalar, Vec2, REAL_TOLERANCE};
use crate::tilemodel::{
    classify_point, is_simple, twice_signed_area, validate_system, ExactSystem, Patch, PointClass,
    Report, Stage, TileSystem,
};

/// Initial denominator bound for free-variable pinning.
pub const INITIAL_QMAX: u64 = 16;
/// Number of times the denominator bound may be doubled.
pub const MAX_DOUBLINGS: u32 = 8;

#[derive(Debug, Error)]
pub enum RationalizeError {
    #[error("input system is invalid: {}", render_report(.0))]
    Invalid(Report),
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("epsilon {0} is below the real-stage tolerance {REAL_TOLERANCE}; the inputs cannot certify closeness at that scale, use a larger epsilon")]
    EpsilonTooSmall(f64),
    #[error("no rational solution within {epsilon} found after {attempts} denominator bounds (last qmax {qmax}, deviation {deviation:.3e})")]
    Exhausted {
        epsilon: f64,
        attempts: u32,
        qmax: u64,
        deviation: f64,
    },
    #[error("system is at stage {0}, expected {1}")]
    WrongStage(Stage, Stage),
}

fn render_report(r: &Report) -> String {
    r.issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// One row per prototile, one column per edge type; entry = (number of `+`
/// occurrences) − (number of `−` occurrences).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub rows: Vec<Vec<i64>>,
}

impl ConstraintSystem {
    pub fn to_matrix(&self) -> RatMatrix {
        RatMatrix::from_i64_rows(&self.rows).expect("rectangular nonempty constraint matrix")
    }

    /// Residual of one coordinate vector under the constraint rows.
    pub fn residual_exact(&self, xs: &[Rat]) -> Vec<Rat> {
        self.to_matrix().apply(xs)
    }
}

pub fn assemble_constraints<S: Scalar>(
    s: &TileSystem<S>,
) -> Result<ConstraintSystem, RationalizeError> {
    let rep = validate_system(s);
    if !rep.is_valid() {
        return Err(RationalizeError::Invalid(rep));
    }
    Ok(build_rows(s))
}

fn build_rows<S: Scalar>(s: &TileSystem<S>) -> ConstraintSystem {
    let cols = s.edge_types().len();
    let rows = s
        .prototiles()
        .iter()
        .map(|p| {
            let mut row = vec![0i64; cols];
            for l in &p.boundary {
                row[l.edge] += l.sign.as_i64();
            }
            row
        })
        .collect();
    ConstraintSystem { rows }
}

/// Details of a successful rationalization.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalizeReport {
    pub qmax: u64,
    pub attempts: u32,
    /// Largest |v' − v| over all edges and coordinates.
    pub max_deviation: f64,
    pub rank: usize,
    pub free_columns: Vec<usize>,
}

/// Exact rational edge vectors within `epsilon` of the real ones, satisfying
/// every closure constraint exactly.
pub fn rationalize(
    s: &TileSystem<RealScalar>,
    epsilon: f64,
) -> Result<(ExactSystem, RationalizeReport), RationalizeError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(RationalizeError::BadEpsilon(epsilon));
    }
    if epsilon < REAL_TOLERANCE {
        return Err(RationalizeError::EpsilonTooSmall(epsilon));
    }
    if s.stage() != Stage::Real {
        return Err(RationalizeError::WrongStage(s.stage(), Stage::Real));
    }
    let cons = assemble_constraints(s)?;
    let m = cons.to_matrix();
    let (r, pivots) = rref(&m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();

    let reals: Vec<[f64; 2]> = s
        .edge_types()
        .iter()
        .map(|e| [e.vector.x.value(), e.vector.y.value()])
        .collect();
    let exact_reals: Vec<[Rat; 2]> = reals
        .iter()
        .map(|v| v.map(|z| Rat::from_f64_exact(z).expect("finite")))
        .collect();
    let eps = Rat::from_f64_exact(epsilon).expect("finite");

    let mut qmax = INITIAL_QMAX;
    let mut last_dev = f64::INFINITY;
    for attempt in 0..=MAX_DOUBLINGS {
        let mut sol = vec![[Rat::zero(), Rat::zero()]; cols];
        for coord in 0..2 {
            for &f in &free {
                sol[f][coord] = best_rational_approx(reals[f][coord], qmax);
            }
            for (row, &pc) in pivots.iter().enumerate() {
                let v = free.iter().fold(Rat::zero(), |acc, &f| {
                    let c = r.get(row, f);
                    if c.is_zero() {
                        acc
                    } else {
                        acc - c * &sol[f][coord]
                    }
                });
                sol[pc][coord] = v;
            }
        }
        let dev = sol
            .iter()
            .zip(&exact_reals)
            .flat_map(|(v, x)| (0..2).map(move |c| (&v[c] - &x[c]).abs()))
            .max()
            .unwrap_or_else(Rat::zero);
        last_dev = dev.to_f64();
        if dev <= eps && sol.iter().all(|v| !(v[0].is_zero() && v[1].is_zero())) {
            let vectors = sol.into_iter().map(|[x, y]| Vec2::new(x, y)).collect();
            let out = s
                .with_vectors(Stage::Rational, vectors)
                .expect("nonzero vectors with identical combinatorics");
            if validate_system(&out).is_valid() {
                return Ok((
                    out,
                    RationalizeReport {
                        qmax,
                        attempts: attempt + 1,
                        max_deviation: last_dev,
                        rank: pivots.len(),
                        free_columns: free,
                    },
                ));
            }
        }
        if attempt < MAX_DOUBLINGS {
            qmax *= 2;
        }
    }
    Err(RationalizeError::Exhausted {
        epsilon,
        attempts: MAX_DOUBLINGS + 1,
        qmax,
        deviation: last_dev,
    })
}

/// Scale factors applied on the way from rational to integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescaleRecord {
    pub lcm_denominator: BigInt,
    pub inradius_prescale: u64,
}

impl RescaleRecord {
    pub fn total_scale(&self) -> BigInt {
        &self.lcm_denominator * BigInt::from(self.inradius_prescale)
    }
}

impl fmt::Display for RescaleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D = {}, prescale = {}, total = {}",
            self.lcm_denominator,
            self.inradius_prescale,
            self.total_scale()
        )
    }
}

fn scale_system(s: &ExactSystem, k: &Rat, stage: Stage) -> ExactSystem {
    let vectors = s.edge_types().iter().map(|e| e.vector.scale(k)).collect();
    s.with_vectors(stage, vectors)
        .expect("scaling preserves well-formedness")
}

/// Multiplies every edge vector by the least common multiple `D` of all
/// coordinate denominators. Returns the integral system and `D`.
pub fn rescale_integral(s: &ExactSystem) -> (ExactSystem, BigInt) {
    let d = lcm_denominators(
        s.edge_types()
            .iter()
            .flat_map(|e| [&e.vector.x, &e.vector.y]),
    );
    let out = scale_system(s, &Rat::from_int(d.clone()), Stage::Integral);
    (out, d)
}

/// Multiplies an integral system by an integer factor.
pub fn scale_integral(s: &ExactSystem, k: u64) -> ExactSystem {
    scale_system(s, &Rat::from_int(k), Stage::Integral)
}

const HALF_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn float_vertices(s: &ExactSystem, k: usize) -> Vec<(f64, f64)> {
    s.vertices(k).iter().map(Vec2::to_f64).collect()
}

fn is_convex(verts: &[(f64, f64)]) -> bool {
    let n = verts.len();
    (0..n).all(|i| {
        let (a, b, c) = (verts[i], verts[(i + 1) % n], verts[(i + 2) % n]);
        (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0) >= 0.0
    })
}

fn triangle_inradius(s: &ExactSystem, k: usize) -> f64 {
    let area = twice_signed_area(&s.vertices(k)).to_f64() / 2.0;
    let v = float_vertices(s, k);
    let per: f64 = (0..3)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt()
        })
        .sum();
    2.0 * area / per
}

/// Largest inscribed disk of a convex counterclockwise polygon, as the best
/// vertex of the 3-variable program max r s.t. nᵢ·p − r ≥ nᵢ·aᵢ.
fn convex_inradius(verts: &[(f64, f64)]) -> f64 {
    let n = verts.len();
    // Inward unit normal and offset for each edge: nᵢ·p ≥ cᵢ.
    let lines: Vec<(f64, f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len = (dx * dx + dy * dy).sqrt();
            let (nx, ny) = (-dy / len, dx / len);
            (nx, ny, nx * a.0 + ny * a.1)
        })
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                // nx·px + ny·py − r = c  for the three lines.
                let rows = [lines[i], lines[j], lines[k]];
                let det = |m: [[f64; 3]; 3]| {
                    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
                };
                let a = rows.map(|(x, y, _)| [x, y, -1.0]);
                let c = rows.map(|(_, _, c)| c);
                let d = det(a);
                if d.abs() < 1e-12 {
                    continue;
                }
                let solve = |col: usize| {
                    let mut m = a;
                    for r in 0..3 {
                        m[r][col] = c[r];
                    }
                    det(m) / d
                };
                let (px, py, r) = (solve(0), solve(1), solve(2));
                let feasible = lines
                    .iter()
                    .all(|&(nx, ny, cc)| nx * px + ny * py - cc >= r - 1e-9);
                if feasible && r > best {
                    best = r;
                }
            }
        }
    }
    best
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Lower bound on the inscribed radius of a simple polygon by grid search.
fn grid_inradius(s: &ExactSystem, k: usize) -> f64 {
    let verts = s.vertices(k);
    let fv = float_vertices(s, k);
    let n = fv.len();
    let (mut lo, mut hi) = (verts[0].clone(), verts[0].clone());
    for v in &verts {
        if v.x < lo.x {
            lo.x = v.x.clone();
        }
        if v.y < lo.y {
            lo.y = v.y.clone();
        }
        if v.x > hi.x {
            hi.x = v.x.clone();
        }
        if v.y > hi.y {
            hi.y = v.y.clone();
        }
    }
    let mut step = Rat::new(1, 4);
    loop {
        let mut best: f64 = 0.0;
        let mut y = lo.y.clone();
        while y <= hi.y {
            let mut x = lo.x.clone();
            while x <= hi.x {
                let p = Vec2::new(x.clone(), y.clone());
                if classify_point(&verts, &p) == PointClass::Inside {
                    let pf = p.to_f64();
                    let d = (0..n)
                        .map(|i| point_segment_distance(pf, fv[i], fv[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min);
                    best = best.max(d);
                }
                x = &x + &step;
            }
            y = &y + &step;
        }
        if best > 0.0 {
            return best;
        }
        step = &step / &Rat::from(2);
    }
}

/// Radius of a disk inscribed in prototile `k`: exact formula for triangles,
/// the Chebyshev radius for convex tiles and a grid-search lower bound
/// otherwise.
pub fn inradius(s: &ExactSystem, k: usize) -> f64 {
    let n = s.prototiles()[k].boundary.len();
    if n == 3 {
        return triangle_inradius(s, k);
    }
    let fv = float_vertices(s, k);
    if is_convex(&fv) && is_simple(&s.vertices(k)) {
        convex_inradius(&fv)
    } else {
        grid_inradius(s, k)
    }
}

/// The smallest multiplier m ≥ 1 with m·r > √2/2 for every prototile.
pub fn inradius_multiplier(s: &ExactSystem) -> u64 {
    (0..s.prototiles().len())
        .map(|k| {
            let r = inradius(s, k);
            let mut m = ((HALF_SQRT2 / r).floor() as u64).max(1);
            while (m as f64) * r <= HALF_SQRT2 {
                m += 1;
            }
            // Step back while a smaller multiplier still clears the bound.
            while m > 1 && ((m - 1) as f64) * r > HALF_SQRT2 {
                m -= 1;
            }
            m
        })
        .max()
        .unwrap_or(1)
}

/// Scales an integral system so every prototile contains a disk of radius
/// greater than √2/2. Returns the scaled system and the multiplier.
pub fn prescale_for_inradius(s: &ExactSystem) -> (ExactSystem, u64) {
    let m = inradius_multiplier(s);
    (scale_integral(s, m), m)
}

/// A point of the torus R²/Z², both coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    pub x: Rat,
    pub y: Rat,
}

impl TorusPoint {
    pub fn new(x: Rat, y: Rat) -> TorusPoint {
        TorusPoint {
            x: x.fract_pos(),
            y: y.fract_pos(),
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectError {
    #[error("patch is empty")]
    Empty,
    #[error("seed index {0} out of range")]
    BadSeed(usize),
    #[error("vertex residues disagree: placed tile {tile} vertex {vertex} gives {found}, expected {expected}")]
    Inconsistent {
        tile: usize,
        vertex: usize,
        found: String,
        expected: String,
    },
}

/// The common residue mod Z² of (vertex − marked origin) over every vertex of
/// an integral patch.
pub fn torus_project(p: &Patch<Rat>, s: &ExactSystem) -> Result<TorusPoint, ProjectError> {
    if p.placed.is_empty() {
        return Err(ProjectError::Empty);
    }
    if p.seed >= p.placed.len() {
        return Err(ProjectError::BadSeed(p.seed));
    }
    let origin = p.origin();
    let mut expected: Option<TorusPoint> = None;
    for (t, pl) in p.placed.iter().enumerate() {
        for (i, v) in s.vertices(pl.tile).iter().enumerate() {
            let d = v.add(&pl.translation).sub(&origin);
            let tp = TorusPoint::new(d.x, d.y);
            match &expected {
                None => expected = Some(tp),
                Some(e) if *e != tp => {
                    return Err(ProjectError::Inconsistent {
                        tile: t,
                        vertex: i,
                        found: tp.to_string(),
                        expected: e.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
    }
    Ok(expected.expect("nonempty patch has vertices"))
}
