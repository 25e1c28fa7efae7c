//! Marked unit squares.
//!
//! Every cell of every zig-zag tile becomes its own symbol `(tile, offset from
//! the anchor cell)`. A configuration of symbols on Z² amalgamates back into
//! zig-zag tiles when each symbol's siblings sit at the right relative
//! offsets; those sibling requirements are the local matching rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::exactmath::Rat;
use crate::scalar::Vec2;
use crate::tilemodel::{validate_patch, Issue, Patch, Placement};
use crate::zigzag::ZigzagSystem;

pub use crate::rationalizer::TorusPoint;

pub type Cell = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareSymbol {
    /// Prototile index in the source system.
    pub tile: usize,
    /// Cell position relative to the tile's anchor cell.
    pub offset: Cell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareSystem {
    pub alphabet: Vec<SquareSymbol>,
    pub tiles: ZigzagSystem,
    pub rule_radius: i64,
}

/// A finite window of a point of the square subshift.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SquareConfiguration {
    pub cells: BTreeMap<Cell, SquareSymbol>,
}

impl SquareConfiguration {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn translate(&self, w: Cell) -> SquareConfiguration {
        SquareConfiguration {
            cells: self
                .cells
                .iter()
                .map(|(&(x, y), &s)| ((x + w.0, y + w.1), s))
                .collect(),
        }
    }
}

/// Boundary policy for finite windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    /// Every tile touched by the window must lie completely inside it.
    #[default]
    Closed,
    /// Tiles cut by the window edge are accepted as long as no present cell
    /// contradicts them.
    Open,
}

#[derive(Debug, Error, PartialEq)]
pub enum SquareError {
    #[error("placed tile {0} has a non-integer translation; square configurations live on Z²")]
    NonLattice(usize),
    #[error("placed tiles overlap at cell ({}, {})", .0.0, .0.1)]
    Overlap(Cell),
    #[error("cell ({}, {}) holds a symbol for unknown tile {tile}", .cell.0, .cell.1)]
    UnknownSymbol { cell: Cell, tile: usize },
    #[error("cell ({}, {}) is claimed by two tile placements", .0.0, .0.1)]
    Inconsistent(Cell),
    #[error("tile {tile} placed at ({}, {}) is missing its cell at offset ({}, {})", .at.0, .at.1, .missing.0, .missing.1)]
    IncompleteTile {
        tile: String,
        at: Cell,
        missing: Cell,
    },
    #[error("amalgamated patch is invalid: {0}")]
    InvalidPatch(String),
}

fn chebyshev_diameter(cells: &[Cell]) -> i64 {
    let xs = cells.iter().map(|c| c.0);
    let ys = cells.iter().map(|c| c.1);
    let dx = xs.clone().max().unwrap_or(0) - xs.min().unwrap_or(0);
    let dy = ys.clone().max().unwrap_or(0) - ys.min().unwrap_or(0);
    dx.max(dy)
}

/// One symbol per (tile, cell); rule radius = largest tile Chebyshev diameter + 1.
pub fn build_square_system(z: &ZigzagSystem) -> SquareSystem {
    let alphabet = z
        .tiles
        .iter()
        .flat_map(|t| {
            t.offsets().map(move |offset| SquareSymbol {
                tile: t.tile,
                offset,
            })
        })
        .collect();
    let rule_radius = z
        .tiles
        .iter()
        .map(|t| chebyshev_diameter(&t.cells))
        .max()
        .unwrap_or(0)
        + 1;
    SquareSystem {
        alphabet,
        tiles: z.clone(),
        rule_radius,
    }
}

fn lattice_translation(p: &Placement<Rat>, i: usize) -> Result<Cell, SquareError> {
    match (p.translation.x.to_i64(), p.translation.y.to_i64()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(SquareError::NonLattice(i)),
    }
}

/// Splits every placed zig-zag tile into its marked unit squares.
pub fn explode(p: &Patch<Rat>, z: &ZigzagSystem) -> Result<SquareConfiguration, SquareError> {
    let mut cells = BTreeMap::new();
    for (i, pl) in p.placed.iter().enumerate() {
        let (tx, ty) = lattice_translation(pl, i)?;
        let zt = &z.tiles[pl.tile];
        for (c, off) in zt.cells.iter().zip(zt.offsets()) {
            let at = (tx + c.0, ty + c.1);
            let sym = SquareSymbol {
                tile: pl.tile,
                offset: off,
            };
            if cells.insert(at, sym).is_some() {
                return Err(SquareError::Overlap(at));
            }
        }
    }
    Ok(SquareConfiguration { cells })
}

/// Tile placements implied by the symbols present, keyed by (tile, translation).
fn inferred_placements(
    c: &SquareConfiguration,
    s: &SquareSystem,
) -> Result<BTreeSet<(Cell, usize)>, SquareError> {
    let mut out = BTreeSet::new();
    for (&cell, sym) in &c.cells {
        let Some(zt) = s.tiles.tiles.get(sym.tile) else {
            return Err(SquareError::UnknownSymbol {
                cell,
                tile: sym.tile,
            });
        };
        let t = (
            cell.0 - sym.offset.0 - zt.anchor.0,
            cell.1 - sym.offset.1 - zt.anchor.1,
        );
        // Sorted by translation (y, x), then tile.
        out.insert(((t.1, t.0), sym.tile));
    }
    Ok(out)
}

/// Reassembles zig-zag tile placements from a square configuration.
///
/// Placements are returned sorted by translation (y, then x) and tile index,
/// with the first one as seed and a zero origin offset.
pub fn amalgamate(
    c: &SquareConfiguration,
    s: &SquareSystem,
    window: Window,
) -> Result<Patch<Rat>, SquareError> {
    let placements = inferred_placements(c, s)?;
    let z = &s.tiles;
    if window == Window::Closed {
        for &((ty, tx), k) in &placements {
            let zt = &z.tiles[k];
            for (cell, off) in zt.cells.iter().zip(zt.offsets()) {
                let at = (tx + cell.0, ty + cell.1);
                let want = SquareSymbol {
                    tile: k,
                    offset: off,
                };
                if c.cells.get(&at) != Some(&want) {
                    return Err(SquareError::IncompleteTile {
                        tile: zt.id.clone(),
                        at: (tx, ty),
                        missing: off,
                    });
                }
            }
        }
    }
    // Every present cell of a placement must carry that placement's symbol.
    let mut claimed: BTreeMap<Cell, (Cell, usize)> = BTreeMap::new();
    for &((ty, tx), k) in &placements {
        let zt = &z.tiles[k];
        for (cell, off) in zt.cells.iter().zip(zt.offsets()) {
            let at = (tx + cell.0, ty + cell.1);
            if window == Window::Closed {
                if claimed.insert(at, ((tx, ty), k)).is_some() {
                    return Err(SquareError::Inconsistent(at));
                }
            } else if let Some(sym) = c.cells.get(&at) {
                if *sym
                    != (SquareSymbol {
                        tile: k,
                        offset: off,
                    })
                {
                    return Err(SquareError::Inconsistent(at));
                }
            }
        }
    }
    let patch = Patch {
        placed: placements
            .iter()
            .map(|&((ty, tx), k)| Placement {
                tile: k,
                translation: Vec2::from_i64(tx, ty),
            })
            .collect(),
        seed: 0,
        origin_offset: Vec2::zero(),
    };
    if window == Window::Closed {
        let rep = validate_patch(&patch, &z.source);
        if !rep.is_valid() {
            let msg = rep
                .issues
                .iter()
                .map(Issue::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(SquareError::InvalidPatch(msg));
        }
    }
    Ok(patch)
}

/// The siblings a symbol requires, as (relative offset, symbol) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingRule {
    pub symbol: SquareSymbol,
    pub requires: Vec<(Cell, SquareSymbol)>,
}

pub fn matching_rules(s: &SquareSystem) -> Vec<MatchingRule> {
    s.tiles
        .tiles
        .iter()
        .flat_map(|zt| {
            let offs: Vec<Cell> = zt.offsets().collect();
            offs.clone().into_iter().map(move |u| MatchingRule {
                symbol: SquareSymbol {
                    tile: zt.tile,
                    offset: u,
                },
                requires: offs
                    .iter()
                    .filter(|&&v| v != u)
                    .map(|&v| {
                        (
                            (v.0 - u.0, v.1 - u.1),
                            SquareSymbol {
                                tile: zt.tile,
                                offset: v,
                            },
                        )
                    })
                    .collect(),
            })
        })
        .collect()
}

/// A present cell whose required sibling cell holds a different symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleViolation {
    pub cell: Cell,
    pub at: Cell,
    pub expected: SquareSymbol,
    pub found: Option<SquareSymbol>,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cell ({}, {}) requires {:?} at ({}, {}), found {:?}",
            self.cell.0, self.cell.1, self.expected, self.at.0, self.at.1, self.found
        )
    }
}

/// Checks a window against the rules with open-window semantics: required
/// cells outside the window's domain are not checked. With `closed` set, a
/// missing required cell is a violation as well.
pub fn check_rules(
    c: &SquareConfiguration,
    rules: &[MatchingRule],
    closed: bool,
) -> Result<(), RuleViolation> {
    let index: BTreeMap<SquareSymbol, &MatchingRule> =
        rules.iter().map(|r| (r.symbol, r)).collect();
    for (&cell, sym) in &c.cells {
        let Some(rule) = index.get(sym) else {
            return Err(RuleViolation {
                cell,
                at: cell,
                expected: *sym,
                found: None,
            });
        };
        for &(d, want) in &rule.requires {
            let at = (cell.0 + d.0, cell.1 + d.1);
            match c.cells.get(&at) {
                Some(found) if *found == want => {}
                None if !closed => {}
                found => {
                    return Err(RuleViolation {
                        cell,
                        at,
                        expected: want,
                        found: found.copied(),
                    })
                }
            }
        }
    }
    Ok(())
}

/// Placements sorted by tile index and translation, for order-insensitive
/// comparison of patches.
pub fn placement_multiset(p: &Patch<Rat>) -> Vec<(usize, Rat, Rat)> {
    let mut v: Vec<(usize, Rat, Rat)> = p
        .placed
        .iter()
        .map(|pl| (pl.tile, pl.translation.x.clone(), pl.translation.y.clone()))
        .collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rationalizer::scale_integral;
    use crate::tilemodel::fixtures::unit_square;
    use crate::tilemodel::grow_patch;
    use crate::zigzag::build_zigzag_system;

    fn system(scale: u64) -> SquareSystem {
        let s = scale_integral(&unit_square(), scale);
        build_square_system(&build_zigzag_system(&s).unwrap())
    }

    #[test]
    fn alphabet_and_radius() {
        let s1 = system(1);
        assert_eq!(s1.alphabet.len(), 1);
        assert_eq!(s1.rule_radius, 1);
        let s2 = system(2);
        assert_eq!(s2.alphabet.len(), 4);
        assert_eq!(s2.rule_radius, 2);
    }

    #[test]
    fn explode_single_and_empty() {
        let s2 = system(2);
        let c = explode(&Patch::single(0), &s2.tiles).unwrap();
        let offs: Vec<Cell> = c.cells.values().map(|s| s.offset).collect();
        assert_eq!(c.len(), 4);
        assert_eq!(offs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let empty = Patch::<Rat> {
            placed: vec![],
            seed: 0,
            origin_offset: Vec2::zero(),
        };
        assert!(explode(&empty, &s2.tiles).unwrap().is_empty());
    }

    #[test]
    fn rules_for_small_alphabets() {
        assert!(matching_rules(&system(1))
            .iter()
            .all(|r| r.requires.is_empty()));
        let rules = matching_rules(&system(2));
        assert_eq!(rules.len(), 4);
        let r0 = rules.iter().find(|r| r.symbol.offset == (0, 0)).unwrap();
        let want: Vec<(Cell, SquareSymbol)> = [(1, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&o| (o, SquareSymbol { tile: 0, offset: o }))
            .collect();
        assert_eq!(r0.requires, want);
    }

    #[test]
    fn round_trip_on_grown_patch() {
        let s2 = system(2);
        let p = grow_patch(&s2.tiles.source, &Patch::single(0), 8).patch;
        let c = explode(&p, &s2.tiles).unwrap();
        let back = amalgamate(&c, &s2, Window::Closed).unwrap();
        assert_eq!(placement_multiset(&back), placement_multiset(&p));
        assert_eq!(explode(&back, &s2.tiles).unwrap(), c);
    }

    #[test]
    fn replaced_symbol_is_an_incomplete_tile() {
        // Two tile kinds so that a foreign symbol exists: a 2x2 and a 1x1.
        let s2 = system(2);
        let mut c = explode(&Patch::single(0), &s2.tiles).unwrap();
        c.cells.insert(
            (1, 1),
            SquareSymbol {
                tile: 0,
                offset: (0, 0),
            },
        );
        assert!(matches!(
            amalgamate(&c, &s2, Window::Closed),
            Err(SquareError::IncompleteTile { .. })
        ));
    }

    #[test]
    fn missing_cell_fails_closed_but_passes_open() {
        let s2 = system(2);
        let mut c = explode(&Patch::single(0), &s2.tiles).unwrap();
        c.cells.remove(&(1, 1));
        assert_eq!(
            amalgamate(&c, &s2, Window::Closed),
            Err(SquareError::IncompleteTile {
                tile: "Q".into(),
                at: (0, 0),
                missing: (1, 1)
            })
        );
        assert!(amalgamate(&c, &s2, Window::Open).is_ok());
        assert!(check_rules(&c, &matching_rules(&s2), false).is_ok());
        assert!(check_rules(&c, &matching_rules(&s2), true).is_err());
    }

    #[test]
    fn unknown_symbol_is_rejected() {
        let s2 = system(2);
        let mut c = SquareConfiguration::default();
        c.cells.insert(
            (0, 0),
            SquareSymbol {
                tile: 9,
                offset: (0, 0),
            },
        );
        assert!(matches!(
            amalgamate(&c, &s2, Window::Open),
            Err(SquareError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn overlapping_patch_cannot_explode() {
        let s2 = system(2);
        let p = Patch {
            placed: vec![
                Placement {
                    tile: 0,
                    translation: Vec2::zero(),
                },
                Placement {
                    tile: 0,
                    translation: Vec2::from_i64(1, 0),
                },
            ],
            seed: 0,
            origin_offset: Vec2::zero(),
        };
        assert_eq!(explode(&p, &s2.tiles), Err(SquareError::Overlap((1, 0))));
        let frac = Patch {
            placed: vec![Placement {
                tile: 0,
                translation: Vec2::new(Rat::new(1, 2), Rat::zero()),
            }],
            seed: 0,
            origin_offset: Vec2::zero(),
        };
        assert_eq!(explode(&frac, &s2.tiles), Err(SquareError::NonLattice(0)));
    }
}
