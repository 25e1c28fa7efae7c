//! SVG scenes for patches, prototile charts, zig-zag edges and square
//! configurations.
//!
//! Every tile, edge or cell is exactly one shape element, so a scene's shape
//! count can be checked against the data it draws. The optional unit grid is
//! a single extra `path` element. Coordinates carry 6 fractional digits and
//! the y axis is flipped so that y grows upwards on screen.

use std::fmt::Write;

use crate::scalar::{Scalar, Vec2};
use crate::squaresys::SquareConfiguration;
use crate::tilemodel::{Patch, TileSystem};
use crate::zigzag::ZigzagSystem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgOptions {
    /// Pixels per unit of length.
    pub scale: f64,
    pub grid: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            scale: 10.0,
            grid: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Polygon,
    Polyline,
    Rect,
}

/// One drawn shape in model coordinates (y up).
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub kind: ShapeKind,
    /// Fill class index, usually the prototile index.
    pub class: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgScene {
    pub title: String,
    pub shapes: Vec<Shape>,
    pub classes: usize,
    pub grid: bool,
    pub scale: f64,
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Deterministic, well-spread fill colour for class `k`.
fn colour(k: usize) -> String {
    let hue = (k as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},55%,70%)")
}

impl SvgScene {
    fn new(title: &str, classes: usize, opts: &SvgOptions) -> SvgScene {
        SvgScene {
            title: title.to_string(),
            shapes: Vec::new(),
            classes,
            grid: opts.grid,
            scale: opts.scale,
        }
    }

    /// Number of drawn elements: one per shape plus one for the grid.
    pub fn element_count(&self) -> usize {
        self.shapes.len() + usize::from(self.grid && !self.shapes.is_empty())
    }

    fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut it = self.shapes.iter().flat_map(|s| s.points.iter());
        let &(x0, y0) = it.next()?;
        Some(it.fold((x0, y0, x0, y0), |(a, b, c, d), &(x, y)| {
            (a.min(x), b.min(y), c.max(x), d.max(y))
        }))
    }

    pub fn to_svg(&self) -> String {
        let k = self.scale;
        let (x0, y0, x1, y1) = self.bounds().unwrap_or((0.0, 0.0, 0.0, 0.0));
        let margin = 1.0;
        let (vx, vy) = ((x0 - margin) * k, (-y1 - margin) * k);
        let (vw, vh) = ((x1 - x0 + 2.0 * margin) * k, (y1 - y0 + 2.0 * margin) * k);
        let mut out = String::new();
        let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
            num(vx),
            num(vy),
            num(vw),
            num(vh)
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(out, "<style>");
        let _ = writeln!(out, "polygon,rect{{stroke:#222;stroke-width:0.5}} polyline{{fill:none;stroke:#222;stroke-width:1}} .grid{{fill:none;stroke:#bbb;stroke-width:0.25}}");
        for c in 0..self.classes {
            let _ = writeln!(out, ".t{c}{{fill:{}}}", colour(c));
        }
        let _ = writeln!(out, "</style>");
        if self.grid && !self.shapes.is_empty() {
            let mut d = String::new();
            let (gx0, gx1) = ((x0.floor() - 1.0) as i64, (x1.ceil() + 1.0) as i64);
            let (gy0, gy1) = ((y0.floor() - 1.0) as i64, (y1.ceil() + 1.0) as i64);
            for x in gx0..=gx1 {
                let _ = write!(
                    d,
                    "M{} {}V{}",
                    num(x as f64 * k),
                    num(-(gy1 as f64) * k),
                    num(-(gy0 as f64) * k)
                );
            }
            for y in gy0..=gy1 {
                let _ = write!(
                    d,
                    "M{} {}H{}",
                    num(gx0 as f64 * k),
                    num(-(y as f64) * k),
                    num(gx1 as f64 * k)
                );
            }
            let _ = writeln!(out, "<path class=\"grid\" d=\"{d}\"/>");
        }
        for s in &self.shapes {
            match s.kind {
                ShapeKind::Rect => {
                    let (x, y) = s.points[0];
                    let _ = writeln!(
                        out,
                        "<rect class=\"t{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                        s.class,
                        num(x * k),
                        num(-(y + 1.0) * k),
                        num(k),
                        num(k)
                    );
                }
                kind => {
                    let pts: Vec<String> = s
                        .points
                        .iter()
                        .map(|&(x, y)| format!("{},{}", num(x * k), num(-y * k)))
                        .collect();
                    let tag = if kind == ShapeKind::Polygon {
                        "polygon"
                    } else {
                        "polyline"
                    };
                    let _ = writeln!(
                        out,
                        "<{tag} class=\"t{}\" points=\"{}\"/>",
                        s.class,
                        pts.join(" ")
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn to_points<S: Scalar>(vs: &[Vec2<S>], shift: &Vec2<S>) -> Vec<(f64, f64)> {
    vs.iter().map(|v| v.add(shift).to_f64()).collect()
}

/// One polygon per placed tile.
pub fn render_patch<S: Scalar>(p: &Patch<S>, s: &TileSystem<S>, opts: &SvgOptions) -> SvgScene {
    let mut scene = SvgScene::new("patch", s.prototiles().len(), opts);
    for pl in &p.placed {
        scene.shapes.push(Shape {
            kind: ShapeKind::Polygon,
            class: pl.tile,
            points: to_points(&s.vertices(pl.tile), &pl.translation),
        });
    }
    scene
}

/// Lays out `items` (each a point list in local coordinates) on a grid with
/// `columns` columns, each item shifted so its bounding box starts at its
/// grid slot.
fn chart(items: Vec<Vec<(f64, f64)>>, columns: usize) -> Vec<Vec<(f64, f64)>> {
    let boxes: Vec<(f64, f64, f64, f64)> = items
        .iter()
        .map(|pts| {
            pts.iter().fold(
                (
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::NEG_INFINITY,
                ),
                |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
            )
        })
        .collect();
    let w = boxes.iter().map(|b| b.2 - b.0).fold(0.0, f64::max) + 2.0;
    let h = boxes.iter().map(|b| b.3 - b.1).fold(0.0, f64::max) + 2.0;
    items
        .into_iter()
        .zip(&boxes)
        .enumerate()
        .map(|(i, (pts, b))| {
            let (col, row) = ((i % columns) as f64, (i / columns) as f64);
            pts.into_iter()
                .map(|(x, y)| (x - b.0 + col * w, y - b.1 - row * h))
                .collect()
        })
        .collect()
}

/// Every prototile drawn once, ten to a row.
pub fn render_prototiles<S: Scalar>(s: &TileSystem<S>, opts: &SvgOptions) -> SvgScene {
    let mut scene = SvgScene::new("prototiles", s.prototiles().len(), opts);
    let items = (0..s.prototiles().len())
        .map(|k| to_points(&s.vertices(k), &Vec2::zero()))
        .collect();
    for (k, points) in chart(items, 10).into_iter().enumerate() {
        scene.shapes.push(Shape {
            kind: ShapeKind::Polygon,
            class: k,
            points,
        });
    }
    scene
}

/// One polyline per edge type, ten to a row.
pub fn render_zigzag_edges(z: &ZigzagSystem, opts: &SvgOptions) -> SvgScene {
    let mut scene = SvgScene::new("zig-zag edges", z.paths.len(), opts);
    let items = z
        .paths
        .iter()
        .map(|p| {
            p.vertices()
                .into_iter()
                .map(|(x, y)| (x as f64, y as f64))
                .collect()
        })
        .collect();
    for (k, points) in chart(items, 10).into_iter().enumerate() {
        scene.shapes.push(Shape {
            kind: ShapeKind::Polyline,
            class: k,
            points,
        });
    }
    scene
}

/// One staircase polygon per placed tile of an integral patch.
pub fn render_zigzag_patch(
    p: &Patch<crate::exactmath::Rat>,
    z: &ZigzagSystem,
    opts: &SvgOptions,
) -> SvgScene {
    let mut scene = SvgScene::new("zig-zag patch", z.tiles.len(), opts);
    for pl in &p.placed {
        let (tx, ty) = pl.translation.to_f64();
        scene.shapes.push(Shape {
            kind: ShapeKind::Polygon,
            class: pl.tile,
            points: z
                .loop_vertices(pl.tile)
                .into_iter()
                .map(|(x, y)| (x as f64 + tx, y as f64 + ty))
                .collect(),
        });
    }
    scene
}

/// One unit square per configuration cell, filled by the symbol's tile.
pub fn render_configuration(
    c: &SquareConfiguration,
    classes: usize,
    opts: &SvgOptions,
) -> SvgScene {
    let mut scene = SvgScene::new("square configuration", classes, opts);
    for (&(x, y), sym) in &c.cells {
        scene.shapes.push(Shape {
            kind: ShapeKind::Rect,
            class: sym.tile,
            points: vec![(x as f64, y as f64), (x as f64 + 1.0, y as f64 + 1.0)],
        });
    }
    scene
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Rat;
    use crate::penrose;
    use crate::rationalizer::scale_integral;
    use crate::squaresys::explode;
    use crate::tilemodel::fixtures::unit_square;
    use crate::zigzag::build_zigzag_system;

    fn count(svg: &str, tag: &str) -> usize {
        svg.matches(&format!("<{tag} ")).count()
    }

    #[test]
    fn single_square_is_one_polygon() {
        let s = unit_square();
        let scene = render_patch(&Patch::<Rat>::single(0), &s, &SvgOptions::default());
        let svg = scene.to_svg();
        assert_eq!(count(&svg, "polygon"), 1);
        assert_eq!(scene.element_count(), 1);
        assert!(svg.contains("0.000000,-10.000000"));
    }

    #[test]
    fn penrose_edge_chart_has_forty_polylines() {
        let z = build_zigzag_system(&penrose::integral_system()).unwrap();
        let svg = render_zigzag_edges(&z, &SvgOptions::default()).to_svg();
        assert_eq!(count(&svg, "polyline"), 40);
    }

    #[test]
    fn exploded_two_by_two_is_four_rects() {
        let s = scale_integral(&unit_square(), 2);
        let z = build_zigzag_system(&s).unwrap();
        let c = explode(&Patch::single(0), &z).unwrap();
        let opts = SvgOptions {
            grid: true,
            ..SvgOptions::default()
        };
        let scene = render_configuration(&c, 1, &opts);
        let svg = scene.to_svg();
        assert_eq!(count(&svg, "rect"), 4);
        assert_eq!(count(&svg, "path"), 1);
        assert_eq!(scene.element_count(), 5);
    }

    #[test]
    fn empty_scene_and_determinism() {
        let s = unit_square();
        let empty = Patch::<Rat> {
            placed: vec![],
            seed: 0,
            origin_offset: Vec2::zero(),
        };
        let scene = render_patch(
            &empty,
            &s,
            &SvgOptions {
                grid: true,
                ..SvgOptions::default()
            },
        );
        assert_eq!(scene.element_count(), 0);
        assert!(scene.to_svg().ends_with("</svg>\n"));
        let p = penrose::real_system();
        let a = render_prototiles(&p, &SvgOptions::default()).to_svg();
        assert_eq!(a, render_prototiles(&p, &SvgOptions::default()).to_svg());
        assert_eq!(count(&a, "polygon"), 40);
        assert!(!a.contains("-0.000000"));
    }
}
