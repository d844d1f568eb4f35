//! Subcommand implementations. Each returns `Ok(())` on PASS.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use soliton_core::catalog::{build, BuildRequest, FamilyId, SolitonFamily, Window};
use soliton_core::classify::{classify, representative_velocity, ClassifyOptions};
use soliton_core::export::{fmt_g17, sample_mesh};
use soliton_core::fit::solve_velocity_constrained;
use soliton_core::ode::{integrate, lift_cylinder, OdeKind, ReaperOde, Termination, DEFAULT_TOL};
use soliton_core::surface::{max_residual, residual_over_points, Grid, DEFAULT_DEGENERACY_TOL};
use soliton_core::{Surface, Vec3};

use crate::args::{FamilyArgs, Format};
use crate::error::CliError;
use crate::settings::Settings;
use crate::spec_file;

const DEFAULT_GRID: Grid = Grid::new(30, 30);

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(out: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::io(out.unwrap_or(Path::new("<stdout>")), e)
}

fn fmt_vec(v: Vec3) -> String {
    format!("{}, {}, {}", fmt_g17(v.x), fmt_g17(v.y), fmt_g17(v.z))
}

#[derive(Serialize)]
struct ParamJson {
    name: &'static str,
    default: f64,
    doc: &'static str,
}

#[derive(Serialize)]
struct FamilyJson {
    id: &'static str,
    description: &'static str,
    params: Vec<ParamJson>,
}

fn family_json(id: FamilyId) -> FamilyJson {
    FamilyJson {
        id: id.name(),
        description: id.description(),
        params: id
            .params()
            .iter()
            .map(|p| ParamJson {
                name: p.name,
                default: p.default,
                doc: p.doc,
            })
            .collect(),
    }
}

pub fn list(settings: &Settings, family: Option<&str>, json: bool) -> Result<(), CliError> {
    let ids: Vec<FamilyId> = match family {
        Some(name) => vec![name.parse()?],
        None => FamilyId::ALL.to_vec(),
    };
    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    if json {
        let data: Vec<FamilyJson> = ids.into_iter().map(family_json).collect();
        serde_json::to_writer_pretty(&mut w, &data).map_err(|e| err(e.into()))?;
        writeln!(w).map_err(&err)?;
    } else if family.is_some() {
        let id = ids[0];
        writeln!(w, "{}: {}", id, id.description()).map_err(&err)?;
        for p in id.params() {
            writeln!(w, "  {:<6} default {:<5} {}", p.name, p.default, p.doc).map_err(&err)?;
        }
    } else {
        for id in ids {
            let names: Vec<&str> = id.params().iter().map(|p| p.name).collect();
            writeln!(w, "{:<16} ({:<17}) {}", id.name(), names.join(", "), id.description()).map_err(&err)?;
        }
    }
    w.flush().map_err(&err)
}

/// A catalog family or a ruled surface read from a spec file.
enum Target {
    Family(Box<SolitonFamily>),
    Spec { surface: Surface, velocity: Option<Vec3> },
}

impl Target {
    fn surface(&self) -> &Surface {
        match self {
            Target::Family(f) => &f.surface,
            Target::Spec { surface, .. } => surface,
        }
    }

    fn velocity(&self) -> Option<Vec3> {
        match self {
            Target::Family(f) => Some(f.velocity),
            Target::Spec { velocity, .. } => *velocity,
        }
    }

    fn name(&self, raw: &str) -> String {
        match self {
            Target::Family(f) => f.id.to_string(),
            Target::Spec { .. } => raw.to_string(),
        }
    }
}

fn resolve(settings: &Settings, target: &str, args: &FamilyArgs) -> Result<Target, CliError> {
    let s_range = settings.pair("s_range", args.s_range.as_deref())?;
    let t_range = settings.pair("t_range", args.t_range.as_deref())?;
    if let Ok(id) = target.parse::<FamilyId>() {
        let mut params = BTreeMap::new();
        for (name, flag) in args.named() {
            if let Some(x) = settings.real(name, flag)? {
                params.insert(name.to_string(), x);
            }
        }
        let req = BuildRequest {
            params,
            window: Window { s: s_range, t: t_range },
            profile: settings.text("profile", args.profile.as_deref()),
        };
        return Ok(Target::Family(Box::new(build(id, &req)?)));
    }
    let path = PathBuf::from(target);
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "`{target}` is neither a family id (see `soliton list`) nor a spec file"
        )));
    }
    if args.named().iter().any(|(_, v)| v.is_some()) {
        return Err(CliError::Usage("family parameters do not apply to a spec file".into()));
    }
    let mut file = spec_file::load(&path)?;
    if let Some(s) = s_range {
        file.spec.domain.s = s;
    }
    if let Some(t) = t_range {
        file.spec.domain.t = t;
    }
    Ok(Target::Spec {
        surface: file.spec.surface(),
        velocity: file.velocity,
    })
}

pub fn sample(settings: &Settings, target: &str, args: &FamilyArgs) -> Result<(), CliError> {
    let target = resolve(settings, target, args)?;
    let grid = settings.grid(DEFAULT_GRID)?;
    let mesh = sample_mesh(target.surface(), grid)?;
    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    match settings.format()? {
        Format::Csv => mesh.write_csv(&mut w),
        Format::Obj => mesh.write_obj(&mut w),
    }
    .map_err(&err)?;
    w.flush().map_err(&err)
}

pub fn residual(
    settings: &Settings,
    raw: &str,
    args: &FamilyArgs,
    v: Option<&str>,
    random_points: usize,
) -> Result<(), CliError> {
    let target = resolve(settings, raw, args)?;
    let v = match settings.vector("v", v)? {
        Some(v) => v,
        None => target
            .velocity()
            .ok_or_else(|| CliError::Usage("no velocity: pass --v or put `v = x,y,z` in the spec file".into()))?,
    };
    let grid = settings.grid(DEFAULT_GRID)?;
    let tol = settings.tol(1e-8)?;
    let surface = target.surface();
    let mut points = surface.domain.interior_grid(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed()?);
    let d = surface.domain;
    for _ in 0..random_points {
        points.push((rng.gen_range(d.s.0..d.s.1), rng.gen_range(d.t.0..d.t.1)));
    }
    let rep = residual_over_points(surface, v, &points, DEFAULT_DEGENERACY_TOL)?;
    let pass = rep.evaluated > 0 && rep.max_abs <= tol;
    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    let text = format!(
        "target: {}\nvelocity: {}\ngrid: {}\nrandom_points: {}\nevaluated: {}\ndegenerate_points: {}\nmax_residual: {:e}\nmean_residual: {:e}\nworst_point: {}, {}\ntolerance: {:e}\nstatus: {}\n",
        target.name(raw),
        fmt_vec(v),
        grid,
        random_points,
        rep.evaluated,
        rep.degenerate,
        rep.max_abs,
        rep.mean_abs,
        fmt_g17(rep.worst.0),
        fmt_g17(rep.worst.1),
        tol,
        if pass { "PASS" } else { "FAIL" }
    );
    w.write_all(text.as_bytes()).map_err(&err)?;
    w.flush().map_err(&err)?;
    if pass {
        Ok(())
    } else if rep.evaluated == 0 {
        Err(CliError::Usage("every sample point is degenerate".into()))
    } else {
        Err(CliError::Tolerance(format!(
            "max residual {:e} exceeds {tol:e}",
            rep.max_abs
        )))
    }
}

pub struct OdeRequest<'a> {
    pub ode: &'a str,
    pub v: [Option<f64>; 3],
    pub init: Option<&'a str>,
    pub range: Option<&'a str>,
    pub ode_tol: Option<f64>,
    pub lift: bool,
}

pub fn solve_ode(settings: &Settings, req: OdeRequest<'_>) -> Result<(), CliError> {
    let kind: OdeKind = req.ode.parse()?;
    let v1 = settings.real("v1", req.v[0])?.unwrap_or(0.0);
    let v2 = settings.real("v2", req.v[1])?.unwrap_or(0.0);
    let v3 = settings.real("v3", req.v[2])?.unwrap_or(0.0);
    let ode = ReaperOde::new(kind, Vec3::new(v1, v2, v3));
    let given = settings.pair("init", req.init)?;
    let init = given.unwrap_or((0.0, 0.0));
    let range = settings.pair("range", req.range)?.unwrap_or((0.0, 1.0));
    let ode_tol = settings.real("ode_tol", req.ode_tol)?.unwrap_or(DEFAULT_TOL);
    let sol = integrate(ode, range.0, init.0, init.1, range.1, ode_tol)?;

    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    sol.write_csv(&mut w).map_err(&err)?;
    w.flush().map_err(&err)?;
    drop(w);

    // the report shares stdout only when the CSV went to a file
    let mut report: Box<dyn Write> = if out.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    let rep_err = io_err(None);
    let (lo, hi) = sol.range();
    let termination = match sol.termination {
        Termination::Completed => "completed".to_string(),
        Termination::RegimeExit { s } => format!("regime-exit at s = {}", fmt_g17(s)),
        Termination::BlowUp { s } => format!("blow-up at s = {}", fmt_g17(s)),
    };
    writeln!(
        report,
        "ode: {kind}\nvelocity: {}\nnodes: {}\ns_range: {}, {}\ntermination: {termination}",
        fmt_vec(ode.velocity()),
        sol.nodes.len(),
        fmt_g17(lo),
        fmt_g17(hi)
    )
    .map_err(&rep_err)?;
    writeln!(
        report,
        "initial_data: u = {}, u' = {}{}",
        fmt_g17(init.0),
        fmt_g17(init.1),
        if given.is_none() { " (default)" } else { "" }
    )
    .map_err(&rep_err)?;
    writeln!(report, "ode_residual: {:e}", sol.ode_residual()).map_err(&rep_err)?;
    if !req.lift {
        return Ok(());
    }
    let tol = settings.tol(1e-6)?;
    let grid = settings.grid(DEFAULT_GRID)?;
    let surface = lift_cylinder(&sol)?;
    let rep = max_residual(&surface, ode.velocity(), grid)?;
    let pass = rep.evaluated > 0 && rep.max_abs <= tol;
    writeln!(
        report,
        "lift_max_residual: {:e}\nlift_degenerate_points: {}\ntolerance: {tol:e}\nstatus: {}",
        rep.max_abs,
        rep.degenerate,
        if pass { "PASS" } else { "FAIL" }
    )
    .map_err(&rep_err)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "lifted cylinder residual {:e} exceeds {tol:e}",
            rep.max_abs
        )))
    }
}

pub fn classify_cmd(
    settings: &Settings,
    spec: &Path,
    v: Option<&str>,
    coefficients: Option<&Path>,
) -> Result<(), CliError> {
    let file = spec_file::load(spec)?;
    let v = settings.vector("v", v)?.or(file.velocity);
    let opts = ClassifyOptions {
        tol: settings.tol(1e-8)?,
        grid: settings.grid(Grid::new(20, 20))?,
        ..ClassifyOptions::default()
    };
    let report = classify(&file.spec, v, opts)?;
    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    write!(w, "{report}").map_err(&err)?;
    w.flush().map_err(&err)?;
    if let Some(path) = coefficients {
        let mut c = writer(Some(path))?;
        report
            .write_coefficients_csv(&mut c)
            .map_err(|e| CliError::io(path, e))?;
        c.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn fit_velocity(settings: &Settings, raw: &str, args: &FamilyArgs, constrain: &[String]) -> Result<(), CliError> {
    let target = resolve(settings, raw, args)?;
    let constraints = constrain
        .iter()
        .map(|c| crate::settings::parse_reals("constrain", c, 3).map(|x| Vec3::new(x[0], x[1], x[2])))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = settings.grid(DEFAULT_GRID)?;
    let tol = settings.tol(1e-8)?;
    let fit = solve_velocity_constrained(target.surface(), grid, &constraints)?;
    let rep_v = representative_velocity(&fit);
    let residual = match rep_v {
        Some(v) => Some(max_residual(target.surface(), v, grid)?),
        None => None,
    };
    let out = settings.out();
    let mut w = writer(out.as_deref())?;
    let err = io_err(out.as_deref());
    let mut text = format!("target: {}\ngrid: {grid}\n", target.name(raw));
    text += &format!("velocity: {}\n", fmt_vec(fit.v));
    if let Some(v) = rep_v.filter(|v| *v != fit.v) {
        text += &format!("representative: {}\n", fmt_vec(v));
    }
    text += &format!("rank: {}\nnullspace_dim: {}\n", fit.rank, fit.nullspace_dim());
    for (i, n) in fit.nullspace.iter().enumerate() {
        text += &format!("nullspace_{i}: {}\n", fmt_vec(*n));
    }
    let sv: Vec<String> = fit.singular_values.iter().map(|x| format!("{x:e}")).collect();
    text += &format!(
        "singular_values: {}\nrows: {}\ndegenerate_points: {}\nrms: {:e}\nmax_defect: {:e}\n",
        sv.join(", "),
        fit.rows,
        fit.degenerate,
        fit.rms,
        fit.max_defect
    );
    if let Target::Family(f) = &target {
        text += &format!(
            "true_velocity: {}\ndistance_to_true: {:e}\n",
            fmt_vec(f.velocity),
            fit.solution_distance(f.velocity)
        );
    }
    let pass = residual.is_some_and(|r| r.evaluated > 0 && r.max_abs <= tol);
    if let Some(r) = residual {
        text += &format!("max_residual: {:e}\n", r.max_abs);
    }
    text += &format!("tolerance: {tol:e}\nstatus: {}\n", if pass { "PASS" } else { "FAIL" });
    w.write_all(text.as_bytes()).map_err(&err)?;
    w.flush().map_err(&err)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Tolerance(
            "no nonzero velocity satisfies the soliton equation".into(),
        ))
    }
}
