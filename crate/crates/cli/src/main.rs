//! Command-line front end for the tilebundle pipeline.
//!
//! Exit status: 0 on success, 1 when an input fails validation or a stage
//! cannot complete, 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tilebundle::format::{self, AnyPatch, AnySystem, DocumentKind, JsonScalar, SystemRef};
use tilebundle::penrose;
use tilebundle::rationalizer::{
    inradius_multiplier, rationalize, rescale_integral, scale_integral, torus_project,
    RationalizeError,
};
use tilebundle::squaresys::{build_square_system, explode, matching_rules};
use tilebundle::svg::{self, SvgOptions};
use tilebundle::tilemodel::{validate_patch, Issue, Report};
use tilebundle::transport::{transport_patch, zigzag_patch, SystemCorrespondence};
use tilebundle::zigzag::{build_zigzag_system, max_deviation, ZigzagSystem};
use tilebundle::{ExactSystem, Patch, Rat, Scalar, Stage, TileSystem, Vec2};

#[derive(Parser)]
#[command(
    name = "tilebundle",
    version,
    about = "Polygonal tiling systems to marked unit squares"
)]
struct Cli {
    /// Print machine-readable JSON results on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system or patch file.
    Validate { input: PathBuf },
    /// Exact rational edge vectors within epsilon of a real system.
    Rationalize {
        system: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clear denominators and apply the inradius prescale.
    Integralize {
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Staircase edges and unit-cell regions of an integral system.
    Zigzag {
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// The marked unit-square alphabet and matching rules.
    Squarify {
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Carry a patch into another system with the same combinatorics.
    Transport {
        patch: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Torus coordinates of an integral patch.
    Project {
        patch: PathBuf,
        /// Move the marked origin by `x,y` (rationals) before projecting.
        #[arg(long)]
        shift: Option<String>,
    },
    /// Draw a system, patch, zig-zag, squares or configuration file.
    Render {
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Integral system for configuration files.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Draw an integral patch with zig-zag tiles.
        #[arg(long)]
        zigzag: bool,
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
    },
    /// Write the Penrose fixture, every pipeline stage and four figures.
    DemoPenrose {
        #[arg(long)]
        outdir: PathBuf,
        /// Tiles in the patch cut from a Penrose tiling.
        #[arg(long, default_value_t = 180)]
        tiles: usize,
    },
}

enum Failure {
    Invalid(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl From<format::FormatError> for Failure {
    fn from(e: format::FormatError) -> Failure {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn invalid(msg: impl ToString) -> Failure {
    Failure::Invalid(msg.to_string())
}

fn issues(r: &Report) -> Vec<String> {
    r.issues.iter().map(Issue::to_string).collect()
}

fn report_failure(r: &Report, what: &str) -> Failure {
    invalid(format!("{what} is invalid:\n  {}", issues(r).join("\n  ")))
}

fn note(json: bool, line: impl AsRef<str>) {
    if !json {
        println!("{}", line.as_ref());
    }
}

fn load_exact(path: &Path) -> Result<ExactSystem, Failure> {
    match format::load_system(path)? {
        AnySystem::Exact(s) => Ok(s),
        AnySystem::Real(_) => Err(invalid(format!(
            "{}: expected a rational or integral system; run `rationalize` first",
            path.display()
        ))),
    }
}

fn require_valid(s: &AnySystem, what: &str) -> Result<(), Failure> {
    let rep = s.validate();
    if rep.is_valid() {
        Ok(())
    } else {
        Err(report_failure(&rep, what))
    }
}

fn validate(input: &Path, json: bool) -> Outcome {
    let text =
        std::fs::read_to_string(input).map_err(|e| invalid(format!("{}: {e}", input.display())))?;
    let (kind, sys_report, patch_report, summary) = match format::document_kind(&text)? {
        DocumentKind::Patch => {
            let p = format::load_patch(input)?;
            let sys = p.system();
            let pr = match &p {
                AnyPatch::Real { patch, system } => validate_patch(patch, system),
                AnyPatch::Exact { patch, system } => validate_patch(patch, system),
            };
            let summary = format!("patch of {} tiles over a {} system", p.len(), sys.stage());
            ("patch", sys.validate(), Some(pr), summary)
        }
        DocumentKind::System => {
            let s = format::parse_system(&text)?;
            let summary = match &s {
                AnySystem::Real(s) => counts(s),
                AnySystem::Exact(s) => counts(s),
            };
            ("system", s.validate(), None, summary)
        }
        _ => return Err(invalid("validate expects a system or patch file")),
    };
    let all: Vec<String> = issues(&sys_report)
        .into_iter()
        .chain(patch_report.iter().flat_map(issues))
        .collect();
    if !all.is_empty() {
        if json {
            println!("{}", json!({"valid": false, "kind": kind, "issues": all}));
        }
        return Err(invalid(format!(
            "{kind} is invalid:\n  {}",
            all.join("\n  ")
        )));
    }
    note(json, format!("valid {summary}"));
    Ok(json!({"valid": true, "kind": kind, "issues": []}))
}

fn counts<S: Scalar>(s: &TileSystem<S>) -> String {
    format!(
        "{} system: {} edge types, {} prototiles",
        s.stage(),
        s.edge_types().len(),
        s.prototiles().len()
    )
}

fn rationalize_cmd(system: &Path, epsilon: f64, out: &Path, json: bool) -> Outcome {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Failure::Usage(format!(
            "--epsilon must be positive, got {epsilon}"
        )));
    }
    let s = match format::load_system(system)? {
        AnySystem::Real(s) => s,
        AnySystem::Exact(_) => return Err(invalid("rationalize expects a real-stage system")),
    };
    let (r, rep) = rationalize(&s, epsilon).map_err(|e| match e {
        RationalizeError::BadEpsilon(_) | RationalizeError::EpsilonTooSmall(_) => {
            Failure::Usage(e.to_string())
        }
        e => invalid(e),
    })?;
    format::save_system(&r, out)?;
    note(
        json,
        format!(
            "rational system written to {} (qmax {}, {} attempt(s), max deviation {:.6e}, rank {})",
            out.display(),
            rep.qmax,
            rep.attempts,
            rep.max_deviation,
            rep.rank
        ),
    );
    Ok(json!({
        "out": out.display().to_string(),
        "qmax": rep.qmax,
        "attempts": rep.attempts,
        "max_deviation": rep.max_deviation,
        "rank": rep.rank,
        "free_columns": rep.free_columns,
    }))
}

fn integralize_cmd(system: &Path, out: &Path, json: bool) -> Outcome {
    let s = load_exact(system)?;
    require_valid(&AnySystem::Exact(s.clone()), "system")?;
    let (base, d) = rescale_integral(&s);
    let m = inradius_multiplier(&base);
    let scaled = scale_integral(&base, m);
    format::save_system(&scaled, out)?;
    note(
        json,
        format!("integral system written to {}", out.display()),
    );
    note(json, format!("D = {d}"));
    note(json, format!("prescale s = {m}"));
    Ok(json!({"out": out.display().to_string(), "D": d.to_string(), "prescale": m}))
}

fn load_integral(path: &Path) -> Result<ExactSystem, Failure> {
    let s = load_exact(path)?;
    if s.stage() != Stage::Integral {
        return Err(invalid(format!(
            "{}: expected an integral system; run `integralize` first",
            path.display()
        )));
    }
    require_valid(&AnySystem::Exact(s.clone()), "system")?;
    Ok(s)
}

fn build_zigzag(s: &ExactSystem) -> Result<ZigzagSystem, Failure> {
    build_zigzag_system(s).map_err(|e| {
        if e.wants_rescale() {
            invalid(format!("{e}; integralize again with a larger prescale"))
        } else {
            invalid(e)
        }
    })
}

fn edge_deviation(z: &ZigzagSystem, i: usize) -> f64 {
    let v = &z.source.edge_types()[i].vector;
    let v = (v.x.to_i64().unwrap_or(0), v.y.to_i64().unwrap_or(0));
    max_deviation(&z.paths[i], v).unwrap_or(f64::NAN)
}

fn zigzag_cmd(system: &Path, out: &Path, json: bool) -> Outcome {
    let s = load_integral(system)?;
    let z = build_zigzag(&s)?;
    format::write_file(out, &format::zigzag_to_json(&z))?;
    let edges: Vec<Value> = s
        .edge_types()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let dev = edge_deviation(&z, i);
            note(
                json,
                format!(
                    "edge {:>6}  {:>4} steps  max deviation {dev:.6}",
                    e.id,
                    z.paths[i].steps.len()
                ),
            );
            json!({"id": e.id, "steps": z.paths[i].steps.len(), "max_deviation": dev})
        })
        .collect();
    let tiles: Vec<Value> = z
        .tiles
        .iter()
        .map(|t| {
            note(json, format!("tile {:>6}  {:>5} cells", t.id, t.area()));
            json!({"id": t.id, "cells": t.area()})
        })
        .collect();
    note(json, format!("zig-zag system written to {}", out.display()));
    Ok(json!({"out": out.display().to_string(), "edges": edges, "tiles": tiles}))
}

fn zigzag_from_any(path: &Path) -> Result<ZigzagSystem, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    match format::document_kind(&text)? {
        DocumentKind::Zigzag | DocumentKind::Squares => {
            build_zigzag(&format::zigzag_source(&text)?)
        }
        DocumentKind::System => build_zigzag(&load_integral(path)?),
        _ => Err(invalid("expected an integral system or zig-zag file")),
    }
}

fn squarify_cmd(system: &Path, out: &Path, json: bool) -> Outcome {
    let z = zigzag_from_any(system)?;
    let sq = build_square_system(&z);
    let rules = matching_rules(&sq);
    let rule_count: usize = rules.iter().map(|r| r.requires.len()).sum();
    format::write_file(out, &format::squares_to_json(&sq))?;
    note(json, format!("alphabet size {}", sq.alphabet.len()));
    note(json, format!("rule radius {}", sq.rule_radius));
    note(json, format!("square system written to {}", out.display()));
    Ok(json!({
        "out": out.display().to_string(),
        "alphabet": sq.alphabet.len(),
        "rule_radius": sq.rule_radius,
        "rules": rule_count,
    }))
}

fn carry<S: JsonScalar, T: JsonScalar>(
    p: &Patch<S>,
    from: &TileSystem<S>,
    to: &TileSystem<T>,
    out: &Path,
) -> Result<(usize, usize), Failure> {
    let c = SystemCorrespondence::new(from, to).map_err(invalid)?;
    let (q, rep) = transport_patch(p, &c).map_err(invalid)?;
    format::write_file(out, &format::patch_to_json(&q, to, &SystemRef::Inline))?;
    Ok((q.len(), rep.path_checks))
}

fn transport_cmd(patch: &Path, to: &Path, out: &Path, json: bool) -> Outcome {
    let p = format::load_patch(patch)?;
    let target = format::load_system(to)?;
    let (n, checks) = match (&p, &target) {
        (AnyPatch::Real { patch, system }, AnySystem::Real(t)) => carry(patch, system, t, out)?,
        (AnyPatch::Real { patch, system }, AnySystem::Exact(t)) => carry(patch, system, t, out)?,
        (AnyPatch::Exact { patch, system }, AnySystem::Real(t)) => carry(patch, system, t, out)?,
        (AnyPatch::Exact { patch, system }, AnySystem::Exact(t)) => carry(patch, system, t, out)?,
    };
    note(
        json,
        format!(
            "transported {n} tiles to {} ({checks} path-independence checks)",
            out.display()
        ),
    );
    Ok(json!({"out": out.display().to_string(), "tiles": n, "path_checks": checks}))
}

fn parse_shift(s: &str) -> Result<Vec2<Rat>, Failure> {
    let usage = || {
        Failure::Usage(format!(
            "--shift expects `x,y` with rational coordinates, got `{s}`"
        ))
    };
    let (x, y) = s.split_once(',').ok_or_else(usage)?;
    Ok(Vec2::new(
        x.parse().map_err(|_| usage())?,
        y.parse().map_err(|_| usage())?,
    ))
}

fn project_cmd(patch: &Path, shift: Option<&str>, json: bool) -> Outcome {
    let (p, s) = match format::load_patch(patch)? {
        AnyPatch::Exact { patch, system } if system.stage() == Stage::Integral => (patch, system),
        _ => return Err(invalid("project expects a patch over an integral system")),
    };
    let p = match shift {
        Some(w) => p.shift_origin(&parse_shift(w)?),
        None => p,
    };
    let t = torus_project(&p, &s).map_err(invalid)?;
    note(json, t.to_string());
    Ok(json!({"x": t.x.to_string(), "y": t.y.to_string()}))
}

fn render_cmd(
    input: &Path,
    out: &Path,
    system: Option<&Path>,
    zz: bool,
    opts: &SvgOptions,
    json: bool,
) -> Outcome {
    let text =
        std::fs::read_to_string(input).map_err(|e| invalid(format!("{}: {e}", input.display())))?;
    let scene = match format::document_kind(&text)? {
        DocumentKind::System => match format::parse_system(&text)? {
            AnySystem::Real(s) => svg::render_prototiles(&s, opts),
            AnySystem::Exact(s) => svg::render_prototiles(&s, opts),
        },
        DocumentKind::Patch => match format::load_patch(input)? {
            AnyPatch::Exact { patch, system } if zz => {
                let z = build_zigzag(&system)?;
                zigzag_patch(&patch, &z).map_err(invalid)?;
                svg::render_zigzag_patch(&patch, &z, opts)
            }
            _ if zz => return Err(invalid("--zigzag needs a patch over an integral system")),
            AnyPatch::Real { patch, system } => svg::render_patch(&patch, &system, opts),
            AnyPatch::Exact { patch, system } => svg::render_patch(&patch, &system, opts),
        },
        DocumentKind::Zigzag | DocumentKind::Squares => {
            svg::render_zigzag_edges(&build_zigzag(&format::zigzag_source(&text)?)?, opts)
        }
        DocumentKind::Configuration => {
            let path = system.ok_or_else(|| {
                Failure::Usage("rendering a configuration needs --system <integral system>".into())
            })?;
            let s = load_exact(path)?;
            let c = format::parse_configuration(&text, &s)?;
            svg::render_configuration(&c, s.prototiles().len(), opts)
        }
    };
    format::write_file(out, &scene.to_svg())?;
    note(
        json,
        format!(
            "{} elements written to {}",
            scene.element_count(),
            out.display()
        ),
    );
    Ok(json!({"out": out.display().to_string(), "elements": scene.element_count()}))
}

fn demo_penrose(outdir: &Path, tiles: usize, json: bool) -> Outcome {
    std::fs::create_dir_all(outdir).map_err(|e| invalid(format!("{}: {e}", outdir.display())))?;
    let path = |name: &str| outdir.join(name);
    let real = penrose::real_system();
    let table = penrose::integral_system();
    format::save_system(&real, &path("penrose-real.json"))?;
    format::save_system(&table, &path("penrose-integral.json"))?;

    // Our own rationalization of the real system. Its denominators make the
    // zig-zag stage far too large, so the figures use the published table.
    let (rational, _) = rationalize(&real, 0.5).map_err(invalid)?;
    let (rescaled, d) = rescale_integral(&rational);
    format::save_system(&rational, &path("rationalized.json"))?;
    format::save_system(&rescaled, &path("rationalized-integral.json"))?;

    // The published integer table, through zig-zag and squares.
    let z = build_zigzag(&table)?;
    let sq = build_square_system(&z);
    format::write_file(&path("penrose-zigzag.json"), &format::zigzag_to_json(&z))?;
    format::write_file(&path("penrose-squares.json"), &format::squares_to_json(&sq))?;

    let grown = penrose::penrose_patch(tiles);
    format::write_file(
        &path("patch-real.json"),
        &format::patch_to_json(&grown, &real, &SystemRef::Path("penrose-real.json".into())),
    )?;
    let c = SystemCorrespondence::new(&real, &table).map_err(invalid)?;
    let (int_patch, rep) = transport_patch(&grown, &c).map_err(invalid)?;
    format::write_file(
        &path("patch-integral.json"),
        &format::patch_to_json(
            &int_patch,
            &table,
            &SystemRef::Path("penrose-integral.json".into()),
        ),
    )?;
    let zp = zigzag_patch(&int_patch, &z).map_err(invalid)?;
    let config = explode(&zp.patch, &z).map_err(invalid)?;
    format::write_file(
        &path("configuration.json"),
        &format::configuration_to_json(&config, &table),
    )?;
    let torus = torus_project(&int_patch, &table).map_err(invalid)?;

    let opts = SvgOptions::default();
    let figures = [
        ("fig1-prototiles.svg", svg::render_prototiles(&real, &opts)),
        (
            "fig2-rational-patch.svg",
            svg::render_patch(&int_patch, &table, &opts),
        ),
        ("fig3-zigzag-edges.svg", svg::render_zigzag_edges(&z, &opts)),
        (
            "fig4-square-patch.svg",
            svg::render_configuration(
                &config,
                table.prototiles().len(),
                &SvgOptions { grid: true, ..opts },
            ),
        ),
    ];
    for (name, scene) in &figures {
        format::write_file(&path(name), &scene.to_svg())?;
    }
    let summary = json!({
        "patch_tiles": grown.len(),
        "path_checks": rep.path_checks,
        "zigzag_cells": zp.cells(&z).len(),
        "alphabet": sq.alphabet.len(),
        "rule_radius": sq.rule_radius,
        "torus": [torus.x.to_string(), torus.y.to_string()],
        "rationalized_D": d.to_string(),
        "figures": figures.iter().map(|(n, s)| json!({"file": n, "elements": s.element_count()})).collect::<Vec<_>>(),
    });
    format::write_file(
        &path("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("plain data") + "\n"),
    )?;
    note(
        json,
        format!("wrote the Penrose demo to {}", outdir.display()),
    );
    note(
        json,
        format!(
            "patch: {} tiles, {} path-independence checks",
            grown.len(),
            rep.path_checks
        ),
    );
    note(
        json,
        format!(
            "squares: {} symbols, rule radius {}",
            sq.alphabet.len(),
            sq.rule_radius
        ),
    );
    Ok(summary)
}

fn run(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Validate { input } => validate(input, json),
        Command::Rationalize {
            system,
            epsilon,
            out,
        } => rationalize_cmd(system, *epsilon, out, json),
        Command::Integralize { system, out } => integralize_cmd(system, out, json),
        Command::Zigzag { system, out } => zigzag_cmd(system, out, json),
        Command::Squarify { system, out } => squarify_cmd(system, out, json),
        Command::Transport { patch, to, out } => transport_cmd(patch, to, out, json),
        Command::Project { patch, shift } => project_cmd(patch, shift.as_deref(), json),
        Command::Render {
            input,
            svg,
            system,
            zigzag,
            grid,
            scale,
        } => {
            if !(scale.is_finite() && *scale > 0.0) {
                return Err(Failure::Usage(format!(
                    "--scale must be positive, got {scale}"
                )));
            }
            let opts = SvgOptions {
                scale: *scale,
                grid: *grid,
            };
            render_cmd(input, svg, system.as_deref(), *zigzag, &opts, json)
        }
        Command::DemoPenrose { outdir, tiles } => demo_penrose(outdir, *tiles, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&v).expect("plain data"));
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Usage(m) => eprintln!("usage error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
