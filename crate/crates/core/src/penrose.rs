//! The Penrose B-tile system: 40 triangular prototiles (families A, B, C, D,
//! each in ten rotations by multiples of 2π/10) over 40 edge types
//! `a0..a9, b0..b9, c0..c9, d0..d9`.
//!
//! The boundary words come from the four families of closure equations
//!
//! ```text
//! A_n:  a(n)   + b(n)   - c(n) = 0
//! B_n:  a(n+6) + b(n+4) - c(n) = 0
//! C_n: -a(n+4) + b(n+1) - d(n) = 0
//! D_n: -a(n+2) + b(n+3) - d(n) = 0
//! ```
//!
//! (indices mod 10), with each word reversed where needed so every prototile
//! is counterclockwise. The real stage uses vectors derived from
//! τ = (1+√5)/2; the integral stage uses a fixed integer solution that keeps
//! the half-turn symmetry and the identity a(n) = b(n+4).

use std::collections::{BTreeSet, HashMap};

use crate::exactmath::{Rat, RealScalar};
use crate::scalar::{Scalar, Vec2};
use crate::tilemodel::{
    twice_signed_area, EdgeType, ExactSystem, Letter, Prototile, RealSystem, Sign, Stage,
    TileSystem,
};
use crate::tilemodel::{Patch, Placement};

pub const FAMILIES: [char; 4] = ['a', 'b', 'c', 'd'];
pub const TILE_FAMILIES: [char; 4] = ['A', 'B', 'C', 'D'];

/// Integer edge vectors, row `n` holding `(a(n), b(n), c(n), d(n))`.
pub const INTEGER_TABLE: [[(i64, i64); 4]; 10] = [
    [(1, 4), (1, -4), (2, 0), (6, 0)],
    [(-1, 4), (3, -2), (2, 2), (5, 4)],
    [(-3, 2), (4, 0), (1, 2), (2, 6)],
    [(-4, 0), (3, 2), (-1, 2), (-2, 6)],
    [(-3, -2), (1, 4), (-2, 2), (-5, 4)],
    [(-1, -4), (-1, 4), (-2, 0), (-6, 0)],
    [(1, -4), (-3, 2), (-2, -2), (-5, -4)],
    [(3, -2), (-4, 0), (-1, -2), (-2, -6)],
    [(4, 0), (-3, -2), (1, -2), (2, -6)],
    [(3, 2), (-1, -4), (2, -2), (5, -4)],
];

pub fn tau() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Index of edge type `family` (0..4 for a..d) rotation `n`.
pub fn edge_index(family: usize, n: i64) -> usize {
    family * 10 + n.rem_euclid(10) as usize
}

/// Index of prototile `family` (0..4 for A..D) rotation `n`.
pub fn tile_index(family: usize, n: i64) -> usize {
    family * 10 + n.rem_euclid(10) as usize
}

/// Real edge vectors in edge-type order, as doubles.
pub fn real_vectors() -> Vec<(f64, f64)> {
    let t = tau();
    let first_five = [
        (2.0 * (t - 1.0), 2.0 * (t + 2.0).sqrt()),
        (-2.0 * (t - 1.0), 2.0 * (t + 2.0).sqrt()),
        (-2.0 * t, 2.0 * (3.0 - t).sqrt()),
        (-4.0, 0.0),
        (-2.0 * t, -2.0 * (3.0 - t).sqrt()),
    ];
    let a = |n: i64| {
        let n = n.rem_euclid(10) as usize;
        if n < 5 {
            first_five[n]
        } else {
            let (x, y) = first_five[n - 5];
            (-x, -y)
        }
    };
    let mut out = Vec::with_capacity(40);
    for n in 0..10 {
        out.push(a(n));
    }
    for n in 0..10 {
        out.push(a(n - 4));
    }
    for n in 0..10 {
        let (x, y) = a(n - 2);
        out.push(((t - 1.0) * x, (t - 1.0) * y));
    }
    for n in 0..10 {
        let (x, y) = a(n - 2);
        out.push((t * x, t * y));
    }
    out
}

/// Decimal literal with 17 significant digits in positional notation.
pub fn decimal17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn edge_ids() -> Vec<String> {
    FAMILIES
        .iter()
        .flat_map(|f| (0..10).map(move |n| format!("{f}{n}")))
        .collect()
}

fn letter(family: usize, n: i64, sign: Sign) -> Letter {
    Letter {
        edge: edge_index(family, n),
        sign,
    }
}

/// Boundary words as read off the closure equations, before orientation.
fn raw_words() -> Vec<(String, Vec<Letter>)> {
    use Sign::{Minus, Plus};
    let mut out = Vec::with_capacity(40);
    for (fi, fam) in TILE_FAMILIES.iter().enumerate() {
        for n in 0..10i64 {
            let word = match fi {
                0 => vec![letter(0, n, Plus), letter(1, n, Plus), letter(2, n, Minus)],
                1 => vec![
                    letter(0, n + 6, Plus),
                    letter(1, n + 4, Plus),
                    letter(2, n, Minus),
                ],
                2 => vec![
                    letter(0, n + 4, Minus),
                    letter(1, n + 1, Plus),
                    letter(3, n, Minus),
                ],
                _ => vec![
                    letter(0, n + 2, Minus),
                    letter(1, n + 3, Plus),
                    letter(3, n, Minus),
                ],
            };
            out.push((format!("{fam}{n}"), word));
        }
    }
    out
}

fn reversed(word: &[Letter]) -> Vec<Letter> {
    word.iter()
        .rev()
        .map(|l| Letter {
            edge: l.edge,
            sign: l.sign.flip(),
        })
        .collect()
}

/// Real-stage system with 17-significant-digit literals.
pub fn real_system() -> RealSystem {
    let vectors = real_vectors();
    let edges: Vec<EdgeType<RealScalar>> = edge_ids()
        .into_iter()
        .zip(&vectors)
        .map(|(id, &(x, y))| EdgeType {
            id,
            vector: Vec2::new(
                RealScalar::parse_literal(&decimal17(x)).expect("finite"),
                RealScalar::parse_literal(&decimal17(y)).expect("finite"),
            ),
        })
        .collect();
    let raw = TileSystem::new(
        Stage::Real,
        edges.clone(),
        raw_words()
            .into_iter()
            .map(|(id, boundary)| Prototile { id, boundary })
            .collect(),
    )
    .expect("fixture is well formed");
    let oriented = (0..raw.prototiles().len())
        .map(|k| {
            let p = &raw.prototiles()[k];
            let boundary = if twice_signed_area(&raw.vertices(k)).sign() < 0 {
                reversed(&p.boundary)
            } else {
                p.boundary.clone()
            };
            Prototile {
                id: p.id.clone(),
                boundary,
            }
        })
        .collect();
    TileSystem::new(Stage::Real, edges, oriented).expect("fixture is well formed")
}

/// Vectors of the integer table in edge-type order.
pub fn integer_vectors() -> Vec<(i64, i64)> {
    (0..4)
        .flat_map(|f| (0..10).map(move |n| INTEGER_TABLE[n][f]))
        .collect()
}

/// Integral-stage system using the integer table, with the same words as
/// [`real_system`].
pub fn integral_system() -> ExactSystem {
    with_integer_vectors(&integer_vectors())
}

/// The fixture words with arbitrary integer vectors (used to corrupt the table).
pub fn with_integer_vectors(vectors: &[(i64, i64)]) -> ExactSystem {
    let real = real_system();
    let vs: Vec<Vec2<Rat>> = vectors.iter().map(|&(x, y)| Vec2::from_i64(x, y)).collect();
    real.with_vectors(Stage::Integral, vs)
        .expect("integer vectors are nonzero")
}

/// A Robinson triangle in the plane: `acute` for the 36° apex kind, apex
/// first.
#[derive(Clone, Copy, Debug)]
struct Robinson {
    acute: bool,
    a: (f64, f64),
    b: (f64, f64),
    c: (f64, f64),
}

fn lerp(p: (f64, f64), q: (f64, f64), t: f64) -> (f64, f64) {
    (p.0 + (q.0 - p.0) * t, p.1 + (q.1 - p.1) * t)
}

fn deflate(tris: &[Robinson]) -> Vec<Robinson> {
    let inv = 1.0 / tau();
    let mut out = Vec::with_capacity(tris.len() * 3);
    for t in tris {
        if t.acute {
            let p = lerp(t.a, t.b, inv);
            out.push(Robinson {
                acute: true,
                a: t.c,
                b: p,
                c: t.b,
            });
            out.push(Robinson {
                acute: false,
                a: p,
                b: t.c,
                c: t.a,
            });
        } else {
            let q = lerp(t.b, t.a, inv);
            let r = lerp(t.b, t.c, inv);
            out.push(Robinson {
                acute: false,
                a: r,
                b: t.c,
                c: t.a,
            });
            out.push(Robinson {
                acute: false,
                a: q,
                b: r,
                c: t.b,
            });
            out.push(Robinson {
                acute: true,
                a: r,
                b: q,
                c: t.a,
            });
        }
    }
    out
}

/// The triangles of `generations` deflations of a wheel of ten acute
/// triangles around the origin, scaled so that rhomb sides have length 4.
fn robinson_wheel(generations: u32) -> Vec<Robinson> {
    let radius = 4.0 * tau().powi(generations as i32);
    let at = |k: i32| {
        let th = std::f64::consts::PI * k as f64 / 5.0;
        (radius * th.cos(), radius * th.sin())
    };
    let mut tris: Vec<Robinson> = (0..10)
        .map(|i| {
            let (b, c) = (at(i), at(i + 1));
            // Alternate mirror images so the wheel is a legal patch.
            let (b, c) = if i % 2 == 0 { (c, b) } else { (b, c) };
            Robinson {
                acute: true,
                a: (0.0, 0.0),
                b,
                c,
            }
        })
        .collect();
    for _ in 0..generations {
        tris = deflate(&tris);
    }
    tris
}

/// Apex, end of the `a` leg and end of the `b` leg of each prototile, in
/// its own frame.
fn labelled_corners(s: &RealSystem) -> Vec<[(f64, f64); 3]> {
    (0..s.prototiles().len())
        .map(|k| {
            let vs: Vec<(f64, f64)> = s.vertices(k).iter().map(Vec2::to_f64).collect();
            let word = &s.prototiles()[k].boundary;
            let n = word.len();
            let ends = |family: usize| {
                let i = word
                    .iter()
                    .position(|l| l.edge / 10 == family)
                    .expect("B-tile word");
                (i, (i + 1) % n)
            };
            let (ai, aj) = ends(0);
            let (bi, bj) = ends(1);
            // The apex is the vertex shared by both legs.
            let apex = if ai == bi || ai == bj { ai } else { aj };
            let a_end = if apex == ai { aj } else { ai };
            let b_end = if apex == bi { bj } else { bi };
            [vs[apex], vs[a_end], vs[b_end]]
        })
        .collect()
}

/// The prototile whose apex is `t.a` and whose `a` leg ends at `t.b`, with
/// its translation.
fn identify(corners: &[[(f64, f64); 3]], t: &Robinson) -> Option<(usize, (f64, f64))> {
    let close = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() < 1e-6 && (p.1 - q.1).abs() < 1e-6;
    corners.iter().enumerate().find_map(|(k, c)| {
        let shift = (t.a.0 - c[0].0, t.a.1 - c[0].1);
        let moved = |p: (f64, f64)| (p.0 + shift.0, p.1 + shift.1);
        (close(moved(c[1]), t.b) && close(moved(c[2]), t.c)).then_some((k, shift))
    })
}

/// A connected patch of `tiles` B-tiles cut from a Penrose tiling. Starting
/// from the tile whose centroid is nearest the centre of a deflated wheel, it
/// repeatedly adds the nearest tile sharing an edge with those already taken.
/// The seed is that first tile, translated so that its base vertex (the marked
/// origin) is at the origin.
pub fn penrose_patch(tiles: usize) -> Patch<RealScalar> {
    let s = real_system();
    let corners = labelled_corners(&s);
    let mut generations = 0;
    let mut tris = robinson_wheel(0);
    while tris.len() < tiles.max(1) * 2 {
        generations += 1;
        tris = robinson_wheel(generations);
    }
    let centroid = |t: &Robinson| ((t.a.0 + t.b.0 + t.c.0) / 3.0, (t.a.1 + t.b.1 + t.c.1) / 3.0);
    let mut order: Vec<usize> = (0..tris.len()).collect();
    let dist = |i: usize| {
        let c = centroid(&tris[i]);
        c.0 * c.0 + c.1 * c.1
    };
    order.sort_by(|&i, &j| dist(i).total_cmp(&dist(j)).then(i.cmp(&j)));
    let mut rank = vec![0; tris.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    // Triangles sharing an edge, found by snapping vertices to a fine grid.
    let key = |p: (f64, f64)| ((p.0 * 1e4).round() as i64, (p.1 * 1e4).round() as i64);
    type EdgeKey = ((i64, i64), (i64, i64));
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        let v = [key(t.a), key(t.b), key(t.c)];
        for k in 0..3 {
            let (p, q) = (v[k], v[(k + 1) % 3]);
            by_edge.entry((p.min(q), p.max(q))).or_default().push(i);
        }
    }
    let mut neighbours = vec![Vec::new(); tris.len()];
    for ts in by_edge.values() {
        for &i in ts {
            neighbours[i].extend(ts.iter().copied().filter(|&j| j != i));
        }
    }

    let mut taken = vec![false; tris.len()];
    let mut frontier = BTreeSet::from([0usize]);
    let mut chosen = Vec::with_capacity(tiles);
    while chosen.len() < tiles {
        let Some(r) = frontier.pop_first() else { break };
        let i = order[r];
        if std::mem::replace(&mut taken[i], true) {
            continue;
        }
        chosen.push(i);
        frontier.extend(
            neighbours[i]
                .iter()
                .filter(|&&j| !taken[j])
                .map(|&j| rank[j]),
        );
    }

    let real = |x: f64| RealScalar::new(x).expect("finite");
    let placed = chosen
        .iter()
        .map(|&i| {
            let t = &tris[i];
            let (tile, (x, y)) =
                identify(&corners, t).expect("every Robinson triangle is a B-tile");
            Placement {
                tile,
                translation: Vec2::new(real(x), real(y)),
            }
        })
        .collect::<Vec<_>>();
    Patch {
        placed,
        seed: 0,
        origin_offset: Vec2::zero(),
    }
    .anchored()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilemodel::{prototile_area, validate_system};

    #[test]
    fn real_vectors_have_expected_lengths() {
        let v = real_vectors();
        for &(x, y) in &v[..10] {
            assert!(((x * x + y * y).sqrt() - 4.0).abs() < 1e-12);
        }
        // c has length 4(τ-1), d has length 4τ.
        let (cx, cy) = v[20];
        assert!(((cx * cx + cy * cy).sqrt() - 4.0 * (tau() - 1.0)).abs() < 1e-12);
        let (dx, dy) = v[30];
        assert!(((dx * dx + dy * dy).sqrt() - 4.0 * tau()).abs() < 1e-12);
    }

    #[test]
    fn decimal_literal_round_trips() {
        for &(x, y) in &real_vectors() {
            for z in [x, y] {
                let back: f64 = decimal17(z).parse().unwrap();
                assert!((back - z).abs() <= 1e-15 * z.abs().max(1.0));
            }
        }
        assert_eq!(decimal17(-4.0), "-4");
    }

    #[test]
    fn both_stages_validate() {
        assert!(validate_system(&real_system()).is_valid());
        let rep = validate_system(&integral_system());
        assert!(rep.is_valid(), "{:?}", rep.issues);
    }

    #[test]
    fn deflated_patches_are_valid() {
        let s = real_system();
        for n in [1, 2, 7, 30, 120] {
            let p = penrose_patch(n);
            assert_eq!(p.len(), n);
            let rep = crate::tilemodel::validate_patch(&p, &s);
            assert!(rep.is_valid(), "{n}: {:?}", rep.issues);
        }
    }

    #[test]
    fn deflated_patches_are_connected() {
        use crate::tilemodel::{adjacency, local_vertices, PlacedGeom};
        let s = real_system();
        let local = local_vertices(&s);
        for n in 1..=40 {
            let p = penrose_patch(n);
            let geoms: Vec<_> = p
                .placed
                .iter()
                .map(|pl| PlacedGeom::new(&s, &local, pl))
                .collect();
            let adj = adjacency(&geoms);
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for &(j, _) in adj[i].iter().flatten() {
                    if !std::mem::replace(&mut seen[j], true) {
                        stack.push(j);
                    }
                }
            }
            assert!(seen.iter().all(|&b| b), "{n} tiles are not connected");
        }
    }

    #[test]
    fn first_tile_area_is_four() {
        let s = integral_system();
        let k = s.prototile_index("A0").unwrap();
        assert_eq!(prototile_area(&s, k).unwrap(), Rat::from(4));
    }
}
