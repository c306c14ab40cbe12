//! Command-line front end: text formats, SVG output and the `eulerhole`
//! commands.
//!
//! Exit codes: 0 success, 1 malformed input or failed validation, 2 a
//! replay or schedule that fails, 3 an internal invariant violation.

pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use eulerhole::cutter::{cut_open, subdivide_along, transversalize, Surface};
use eulerhole::engine::{replay, HoleState, Mode, Rules, Seed};
use eulerhole::lift::{
    lift, verify_theorem1, Closing, LiftError, LiftOptions, Metric, OrderRule, WalkDirection,
};
use eulerhole::polyhedron::{descartes_check, project_schlegel};
use eulerhole::rational::{parse_rational, Point2};
use eulerhole::surface::{generate, SurfaceKind, SurfaceSpec};
use eulerhole::{quotient, PlanarPolygon};

use format::{
    parse_complex, parse_curve, parse_order, parse_polyhedron, write_order, write_polygon,
    ComplexFile,
};

#[derive(Parser, Debug)]
#[command(
    name = "eulerhole",
    version,
    about = "Hole expansion, quotient complexes and Euler characteristics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler characteristic of a complex, or of the quotient of a polygon
    /// with a word.
    Chi {
        /// Complex file, or `-` for standard input.
        file: PathBuf,
        /// Print `n0 n1 n2 chi` instead of chi alone.
        #[arg(long)]
        counts: bool,
    },
    /// Structural checks; exits 1 when anything is wrong.
    Validate {
        file: PathBuf,
        /// Also require a closed surface: no boundary edges, every vertex
        /// on at least three edges.
        #[arg(long)]
        closed: bool,
    },
    /// Removal schedule from the lifting construction, with its report.
    Schedule {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = OrderArg::Guarded)]
        ordering: OrderArg,
        #[arg(long, value_enum, default_value_t = ClosingArg::ReverseTail)]
        closing: ClosingArg,
        /// Walk bands clockwise.
        #[arg(long)]
        cw: bool,
        /// Distance origin `X Y`, inside an interior triangle.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        origin: Option<Vec<String>>,
        /// Write the subdivided polygon the schedule refers to.
        #[arg(long)]
        complex_out: Option<PathBuf>,
        /// Write an SVG with the level curves.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Replays a removal order and prints the trace.
    Replay {
        complex: PathBuf,
        order: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Allow operation III.
        #[arg(long)]
        op3: bool,
        /// `outer`, or the number of the seed triangle.
        #[arg(long, default_value = "outer")]
        seed: String,
        /// Write an SVG of the final state.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Subdivides a polygon along a curve and cuts it open.
    Cut {
        polygon: PathBuf,
        curve: PathBuf,
        /// Where to write the subdivided polygon; standard output otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the cut-open polygon.
        #[arg(long)]
        open: Option<PathBuf>,
    },
    /// Planar representation of a standard surface.
    Gen {
        /// sphere, sphere-grid, torus, projective-plane, klein-bottle,
        /// pinched-torus, genus or crosscaps (with --g), genus-<g> or
        /// crosscaps-<g>.
        kind: String,
        #[arg(long = "r", default_value_t = 3)]
        resolution: usize,
        #[arg(long = "g")]
        genus: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Angle-sum check for a convex polyhedron.
    Descartes {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also project from beyond this face (numbered from 1).
        #[arg(long, requires = "out")]
        project: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of a polygon, a removal state or the level curves.
    Render {
        file: PathBuf,
        /// Removal order to replay before drawing.
        #[arg(long)]
        order: Option<PathBuf>,
        /// Stop after this many steps.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Lenient)]
        mode: ModeArg,
        #[arg(long)]
        op3: bool,
        #[arg(long, default_value = "outer")]
        seed: String,
        /// Draw the subdivided polygon with its level curves instead.
        #[arg(long, conflicts_with = "order")]
        levels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Euclidean,
    EdgePath,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    Guarded,
    Plain,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClosingArg {
    ReverseTail,
    Op3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Lenient => Mode::Lenient,
        }
    }
}

/// A failed command: exit code and message for standard error.
#[derive(Debug)]
struct Exit {
    code: i32,
    msg: String,
}

fn input(msg: impl ToString) -> Exit {
    Exit {
        code: 1,
        msg: msg.to_string(),
    }
}

fn lift_exit(e: LiftError) -> Exit {
    let code = match e {
        LiftError::MultiplePointOnLevel(_)
        | LiftError::OrderingStuck(_)
        | LiftError::MalformedBand(_) => 3,
        LiftError::ScheduleReplayFailed(_) | LiftError::Engine(_) => 2,
        _ => 1,
    };
    Exit {
        code,
        msg: e.to_string(),
    }
}

type Out<'a> = &'a mut dyn Write;

/// Runs one command. `args` starts with the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cli.command, out)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {}", e.msg);
            e.code
        }
        Err(p) => {
            let what = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            let _ = writeln!(err, "internal error: {what}");
            3
        }
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Exit> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(out: Out, text: &str) -> Result<(), Exit> {
    out.write_all(text.as_bytes())
        .map_err(|e| input(format!("output: {e}")))
}

fn load_complex(path: &Path) -> Result<ComplexFile, Exit> {
    parse_complex(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_polygon(path: &Path) -> Result<PlanarPolygon, Exit> {
    load_complex(path)?
        .polygon()
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_seed(s: &str, n_triangles: usize) -> Result<Seed, Exit> {
    if s == "outer" {
        return Ok(Seed::Outer);
    }
    match s.parse::<usize>() {
        Ok(k) if (1..=n_triangles).contains(&k) => Ok(Seed::Triangle(k - 1)),
        _ => Err(input(format!(
            "seed must be `outer` or a triangle in 1..={n_triangles}, not {s:?}"
        ))),
    }
}

fn dispatch(cmd: Command, out: Out) -> Result<(), Exit> {
    match cmd {
        Command::Chi { file, counts } => chi(&file, counts, out),
        Command::Validate { file, closed } => validate(&file, closed, out),
        Command::Schedule {
            file,
            metric,
            ordering,
            closing,
            cw,
            origin,
            complex_out,
            svg,
        } => {
            let origin = match origin {
                None => None,
                Some(v) => {
                    let x = parse_rational(&v[0]).map_err(input)?;
                    let y = parse_rational(&v[1]).map_err(input)?;
                    Some(Point2::new(x, y))
                }
            };
            let opts = LiftOptions {
                metric: match metric {
                    MetricArg::Euclidean => Metric::Euclidean,
                    MetricArg::EdgePath => Metric::EdgePath,
                },
                order_rule: match ordering {
                    OrderArg::Guarded => OrderRule::Guarded,
                    OrderArg::Plain => OrderRule::Plain,
                },
                direction: if cw {
                    WalkDirection::Cw
                } else {
                    WalkDirection::Ccw
                },
                closing: match closing {
                    ClosingArg::ReverseTail => Closing::ReverseTail,
                    ClosingArg::Op3 => Closing::OpIII,
                },
                origin,
            };
            schedule(&file, &opts, complex_out.as_deref(), svg.as_deref(), out)
        }
        Command::Replay {
            complex,
            order,
            mode,
            op3,
            seed,
            svg,
        } => replay_cmd(
            &complex,
            &order,
            Rules::new(mode.into(), op3),
            &seed,
            svg.as_deref(),
            out,
        ),
        Command::Cut {
            polygon,
            curve,
            out: t_out,
            open,
        } => cut(&polygon, &curve, t_out.as_deref(), open.as_deref(), out),
        Command::Gen {
            kind,
            resolution,
            genus,
            out: path,
        } => {
            let kind = SurfaceKind::parse(&kind, genus)
                .ok_or_else(|| input(format!("unknown surface {kind:?}")))?;
            let p = generate(SurfaceSpec { kind, resolution }).map_err(input)?;
            let text = format!(
                "# {} at resolution {resolution}\n{}",
                kind.name(),
                write_polygon(&p)
            );
            match path {
                Some(path) => write_file(&path, &text),
                None => emit(out, &text),
            }
        }
        Command::Descartes {
            file,
            tol,
            project,
            out: path,
        } => descartes(&file, tol, project, path.as_deref(), out),
        Command::Render {
            file,
            order,
            steps,
            mode,
            op3,
            seed,
            levels,
            out: path,
        } => {
            let text = render(
                &file,
                order.as_deref(),
                steps,
                Rules::new(mode.into(), op3),
                &seed,
                levels,
            )?;
            match path {
                Some(path) => write_file(&path, &text),
                None => emit(out, &text),
            }
        }
    }
}

fn chi(path: &Path, counts: bool, out: Out) -> Result<(), Exit> {
    let f = load_complex(path)?;
    let c = if f.has_scheme() {
        quotient(&f.polygon().map_err(input)?).map_err(input)?
    } else {
        f.complex
    };
    let k = c.counts();
    let text = if counts {
        format!("{k} {}\n", k.chi())
    } else {
        format!("{}\n", k.chi())
    };
    emit(out, &text)
}

fn validate(path: &Path, closed: bool, out: Out) -> Result<(), Exit> {
    let f = load_complex(path)?;
    let c = if f.has_scheme() {
        quotient(&f.polygon().map_err(input)?).map_err(input)?
    } else {
        f.complex
    };
    let report = c.validate(closed);
    if report.is_valid() {
        return emit(out, "valid\n");
    }
    let mut text = String::new();
    for v in &report.violations {
        text.push_str(&format!("{v}\n"));
    }
    emit(out, &text)?;
    Err(input(format!("{} violation(s)", report.violations.len())))
}

fn schedule(
    path: &Path,
    opts: &LiftOptions,
    complex_out: Option<&Path>,
    svg_out: Option<&Path>,
    out: Out,
) -> Result<(), Exit> {
    let p = load_polygon(path)?;
    let l = lift(&p, opts).map_err(lift_exit)?;
    let rep = verify_theorem1(&p, opts).map_err(lift_exit)?;
    let k2 = &l.subdivision.polygon;
    let mut text = format!(
        "# subdivided polygon: {} vertices, {} edges, {} triangles; seed triangle {}\n",
        k2.complex().n_vertices(),
        k2.complex().n_edges(),
        k2.complex().n_triangles(),
        l.schedule.base + 1
    );
    text.push_str(&format!(
        "# levels: {}, mode: {:?}, op3: {}\n",
        l.subdivision.n_levels, l.schedule.rules.mode, l.schedule.rules.allow_op3
    ));
    text.push_str(&write_order(&l.schedule.order()));
    let kinds: Vec<&str> = l.schedule.entries.iter().map(|e| e.kind.name()).collect();
    text.push_str(&format!("# kinds: {}\n", kinds.join(" ")));
    text.push_str(&format!(
        "# chi(K) = {}\n# chi(K0) = {}\n# chi by schedule = {}\n",
        rep.chi_k, rep.chi_k0, rep.chi_by_schedule
    ));
    text.push_str(&format!(
        "# chords split: {}, base refined: {}\n",
        rep.flags.chords_split, rep.flags.refined_base
    ));
    text.push_str(&format!(
        "# schedule replays: {}\n# chi(K) = chi(K0) + 1: {}\n",
        rep.schedule_ok,
        rep.holds()
    ));
    emit(out, &text)?;
    if let Some(path) = complex_out {
        write_file(path, &write_polygon(k2))?;
    }
    if let Some(path) = svg_out {
        let scene = svg::Scene {
            levels: &l.curves,
            ..Default::default()
        };
        let pic = svg::render(k2, &scene).ok_or_else(|| input("polygon has no coordinates"))?;
        write_file(path, &pic)?;
    }
    if rep.holds() {
        Ok(())
    } else {
        Err(Exit {
            code: 2,
            msg: "the schedule does not confirm chi(K) = chi(K0) + 1".into(),
        })
    }
}

/// Replays `order` and returns the trace with the state it reached.
fn replay_state(
    f: &ComplexFile,
    order: &[usize],
    rules: Rules,
    seed: Seed,
) -> Result<(eulerhole::Trace, HoleState), Exit> {
    let c = &f.complex;
    let trace = replay(c, seed, order, rules).map_err(input)?;
    let mut h = HoleState::new(c, seed).map_err(input)?;
    for st in &trace.steps {
        h.apply(c, st.tri, st.kind).map_err(|e| Exit {
            code: 3,
            msg: e.to_string(),
        })?;
    }
    Ok((trace, h))
}

fn replay_cmd(
    complex: &Path,
    order: &Path,
    rules: Rules,
    seed: &str,
    svg_out: Option<&Path>,
    out: Out,
) -> Result<(), Exit> {
    let f = load_complex(complex)?;
    let n = f.complex.n_triangles();
    let order =
        parse_order(&read(order)?, n).map_err(|e| input(format!("{}: {e}", order.display())))?;
    let seed = parse_seed(seed, n)?;
    let (trace, h) = replay_state(&f, &order, rules, seed)?;
    emit(out, &trace.to_text())?;
    if let Some(path) = svg_out {
        let p = f.polygon().map_err(input)?;
        let scene = svg::Scene {
            state: Some(&h),
            current: trace.steps.last().map(|s| s.tri),
            levels: &[],
        };
        write_file(
            path,
            &svg::render(&p, &scene).ok_or_else(|| input("complex has no coordinates"))?,
        )?;
    }
    if let Some(fail) = &trace.failure {
        emit(
            out,
            &format!("FAIL step {} ({})\n", fail.index, fail.reason),
        )?;
        return Err(Exit {
            code: 2,
            msg: format!("step {} is invalid: {}", fail.index, fail.reason),
        });
    }
    if !trace.complete {
        emit(
            out,
            &format!("INCOMPLETE after {} steps\n", trace.steps.len()),
        )?;
        return Err(Exit {
            code: 2,
            msg: "triangles remain after the order".into(),
        });
    }
    emit(out, "OK\n")
}

fn cut(
    polygon: &Path,
    curve: &Path,
    t_out: Option<&Path>,
    open: Option<&Path>,
    out: Out,
) -> Result<(), Exit> {
    let p = load_polygon(polygon)?;
    let c = parse_curve(&read(curve)?).map_err(|e| input(format!("{}: {e}", curve.display())))?;
    let c = transversalize(&c, &p).map_err(input)?;
    let s = subdivide_along(&p, &c).map_err(input)?;
    let mut text = write_polygon(&s.polygon);
    let curve_ids: Vec<String> = s.curve_vertices.iter().map(|v| v.to_string()).collect();
    text.push_str(&format!("# curve: {}\n", curve_ids.join(" ")));
    let opened = cut_open(&Surface::from_polygon(&s.polygon), &s.curve_edges)
        .and_then(|k| k.surface.to_polygon());
    match &opened {
        Ok(q) => {
            let word = q
                .scheme()
                .word
                .as_ref()
                .map(|w| w.to_string())
                .unwrap_or_default();
            text.push_str(&format!("# cut word: {word}\n"));
        }
        Err(e) => text.push_str(&format!("# cut: {e}\n")),
    }
    match t_out {
        Some(path) => write_file(path, &text)?,
        None => emit(out, &text)?,
    }
    match opened {
        Ok(q) => {
            if let Some(path) = open {
                write_file(path, &write_polygon(&q))?;
            }
            Ok(())
        }
        Err(e) => Err(input(format!("cannot cut open: {e}"))),
    }
}

fn descartes(
    path: &Path,
    tol: f64,
    project: Option<usize>,
    poly_out: Option<&Path>,
    out: Out,
) -> Result<(), Exit> {
    let poly =
        parse_polyhedron(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let (n0, n1, n2) = poly.counts();
    let r = descartes_check(&poly, tol);
    let text = format!(
        "vertices {n0} edges {n1} faces {n2} chi {}\nangle_sum {:.12}\nexpected {:.12}\ndifference {:.3e}\nedge_identity {}\n{}\n",
        poly.euler_characteristic(),
        r.angle_sum,
        r.expected,
        (r.angle_sum - r.expected).abs(),
        if r.edge_identity_ok { "ok" } else { "fails" },
        if r.passes { "PASS" } else { "FAIL" }
    );
    emit(out, &text)?;
    if let (Some(face), Some(path)) = (project, poly_out) {
        if face == 0 || face > n2 {
            return Err(input(format!("face must be in 1..={n2}")));
        }
        let s = project_schlegel(&poly, face - 1).map_err(input)?;
        write_file(path, &write_polygon(&s.polygon))?;
    }
    if r.passes {
        Ok(())
    } else {
        Err(input("angle sum check failed"))
    }
}

fn render(
    path: &Path,
    order: Option<&Path>,
    steps: Option<usize>,
    rules: Rules,
    seed: &str,
    levels: bool,
) -> Result<String, Exit> {
    let f = load_complex(path)?;
    let p = f.polygon().map_err(input)?;
    let none = || input("polygon has no coordinates");
    if levels {
        let l = lift(&p, &LiftOptions::default()).map_err(lift_exit)?;
        let scene = svg::Scene {
            levels: &l.curves,
            ..Default::default()
        };
        return svg::render(&l.subdivision.polygon, &scene).ok_or_else(none);
    }
    let Some(order) = order else {
        return svg::render(&p, &svg::Scene::default()).ok_or_else(none);
    };
    let n = f.complex.n_triangles();
    let mut order =
        parse_order(&read(order)?, n).map_err(|e| input(format!("{}: {e}", order.display())))?;
    if let Some(k) = steps {
        order.truncate(k);
    }
    let seed = parse_seed(seed, n)?;
    // The picture follows the polygon's triangle numbering.
    let (trace, h) = replay_state(&f, &order, rules, seed)?;
    let scene = svg::Scene {
        state: Some(&h),
        current: trace.steps.last().map(|s| s.tri),
        levels: &[],
    };
    svg::render(&p, &scene).ok_or_else(none)
}
