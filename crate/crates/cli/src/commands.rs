use std::path::Path;
use std::sync::Arc;

use fevis::expr::parse;
use fevis::mesh::{lattice_mesh, unit_square_mesh, LatticeSpec, Mesh};
use fevis::render::{
    diff_image, mip_render, read_nrrd, sample2d, write_nrrd, write_pgm, AnalyticField, Camera,
    ClipSphere, ImageGrid, RenderConfig, ScalarField, Window,
};
use fevis::solver::solve_helmholtz;
use fevis::space::{function_space, load_field, save_field, DegradeMode, FeField};

use crate::error::CliError;
use crate::{
    Command, DegradeArgs, DiffArgs, Format, HelmholtzArgs, InterpArgs, MeshArgs, MipArgs,
    SampleArgs,
};

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Interp(a) => interp(a),
        Command::Sample(a) => sample(a),
        Command::Mip(a) => mip(a),
        Command::Helmholtz(a) => helmholtz(a),
        Command::Diff(a) => diff(a),
        Command::Degrade(a) => degrade(a),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn floats(text: &str, what: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            invalid(format!(
                "--{what}: expected {n} comma-separated numbers, got `{text}`"
            ))
        })?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!(
            "--{what}: expected {n} comma-separated numbers, got `{text}`"
        )));
    }
    Ok(v)
}

fn vec3(text: &str, what: &str) -> Result<[f64; 3], CliError> {
    let v = floats(text, what, 3)?;
    Ok([v[0], v[1], v[2]])
}

/// `square:NxM` or `box:NxMxK`.
pub fn parse_mesh_spec(args: &MeshArgs) -> Result<LatticeSpec, CliError> {
    let bad = || {
        invalid(format!(
            "--mesh: expected square:NxM or box:NxMxK, got `{}`",
            args.mesh
        ))
    };
    let (kind, counts) = args.mesh.split_once(':').ok_or_else(bad)?;
    let dim = match kind {
        "square" => 2,
        "box" => 3,
        _ => return Err(bad()),
    };
    let c: Vec<usize> = counts
        .split('x')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    if c.len() != dim {
        return Err(bad());
    }
    let lengths = match &args.lengths {
        Some(t) => floats(t, "lengths", dim)?,
        None => vec![1.0; dim],
    };
    let mut spec = LatticeSpec {
        dim,
        counts: [1; 3],
        lengths: [1.0; 3],
    };
    spec.counts[..dim].copy_from_slice(&c);
    spec.lengths[..dim].copy_from_slice(&lengths);
    Ok(spec)
}

fn write_image(img: &ImageGrid, out: &Path, format: Format) -> Result<(), CliError> {
    match format {
        Format::Nrrd => write_nrrd(img, out)?,
        Format::Pgm => write_pgm(img, out)?,
        Format::Both => {
            write_nrrd(img, &out.with_extension("nrrd"))?;
            write_pgm(img, &out.with_extension("pgm"))?;
        }
    }
    Ok(())
}

fn interp(a: InterpArgs) -> Result<(), CliError> {
    let spec = parse_mesh_spec(&a.mesh)?;
    if a.degree == 0 {
        return Err(invalid("--degree must be at least 1"));
    }
    let expr = parse(&a.expr, spec.dim)?;
    let mesh = Arc::new(lattice_mesh(&spec)?);
    let space = function_space(mesh, &a.family, a.degree)?;
    let field = FeField::interpolate(&space, &expr)?;
    save_field(&field, &a.out)?;
    println!("dofs: {}", space.global_dof_count());
    Ok(())
}

fn default_window(field: &FeField) -> Window {
    let (lo, hi) = field.space().mesh().bounding_box();
    Window {
        min: [lo[0], lo[1]],
        max: [hi[0], hi[1]],
    }
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    let window = a
        .window
        .as_deref()
        .map(|w| floats(w, "window", 4))
        .transpose()?;
    if let Some(w) = &window {
        if !(w[2] > w[0] && w[3] > w[1]) {
            return Err(invalid("--window: need xmin < xmax and ymin < ymax"));
        }
    }
    if a.res == 0 {
        return Err(invalid("--res must be positive"));
    }
    let field = load_field(&a.field)?;
    if field.dim() != 2 {
        return Err(invalid(format!(
            "sample needs a 2D field, {} holds a {}D field",
            a.field.display(),
            field.dim()
        )));
    }
    let window = match window {
        Some(w) => Window {
            min: [w[0], w[1]],
            max: [w[2], w[3]],
        },
        None => default_window(&field),
    };
    let img = sample2d(&field, a.res, a.res, window)?;
    write_image(&img, &a.image.out, a.image.format)?;
    let (i, j, v) = img.argmax();
    let p = window.point(i, j, a.res, a.res);
    println!(
        "argmax: column {i} row {j} at ({}, {}) value {v}",
        p[0], p[1]
    );
    Ok(())
}

fn mip(a: MipArgs) -> Result<(), CliError> {
    if !(a.step.is_finite() && a.step > 0.0) {
        return Err(invalid(format!("--step must be positive, got {}", a.step)));
    }
    if a.res == 0 {
        return Err(invalid("--res must be positive"));
    }
    let field = load_field(&a.field)?;
    if field.dim() != 3 {
        return Err(invalid(format!(
            "mip needs a 3D field, {} holds a {}D field",
            a.field.display(),
            field.dim()
        )));
    }
    let (lo, hi) = field.space().mesh().bounding_box();
    let centre: [f64; 3] = std::array::from_fn(|i| 0.5 * (lo[i] + hi[i]));
    let extent = (0..3).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    let look_at = match &a.lookat {
        Some(t) => vec3(t, "lookat")?,
        None => centre,
    };
    let eye = match &a.eye {
        Some(t) => vec3(t, "eye")?,
        None => [centre[0], centre[1], hi[2] + 2.0 * extent],
    };
    let mut camera = Camera::looking_at(eye, look_at);
    camera.up = vec3(&a.up, "up")?;
    camera.fov_deg = a.fov;
    camera.width = a.res;
    camera.height = a.res;
    if let Some(n) = a.near {
        camera.near = n;
    }
    if let Some(f) = a.far {
        camera.far = f;
    }
    let config = RenderConfig {
        step: a.step,
        clip: a.clip.map(|radius| ClipSphere {
            center: look_at,
            radius,
        }),
        background: a.background,
    };
    let analytic;
    let target: &dyn ScalarField = match &a.analytic {
        Some(text) => {
            analytic = AnalyticField::over_mesh_of(parse(text, 3)?, &field);
            &analytic
        }
        None => &field,
    };
    let img = mip_render(target, &camera, &config)?;
    write_image(&img, &a.image.out, a.image.format)?;
    let (i, j, v) = img.argmax();
    println!("argmax: column {i} row {j} value {v}");
    Ok(())
}

fn helmholtz(a: HelmholtzArgs) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(invalid("--n must be positive"));
    }
    if a.degree == 0 {
        return Err(invalid("--degree must be at least 1"));
    }
    if a.res == 0 {
        return Err(invalid("--res must be positive"));
    }
    let mesh: Arc<Mesh> = Arc::new(unit_square_mesh(a.n, a.n, [1.0, 1.0])?);
    let sol = solve_helmholtz(mesh, a.degree)?;
    if let Some(out) = &a.out {
        save_field(&sol.field, out)?;
    }
    if let Some(path) = &a.image {
        let img = sample2d(&sol.field, a.res, a.res, Window::unit())?;
        write_image(&img, path, a.format)?;
    }
    println!("dofs: {}", sol.field.space().global_dof_count());
    println!("cg iterations: {}", sol.iterations);
    println!("relative residual: {:e}", sol.relative_residual);
    println!("l2 error: {:e}", sol.l2_error());
    Ok(())
}

fn diff(a: DiffArgs) -> Result<(), CliError> {
    let x = read_nrrd(&a.a)?;
    let y = read_nrrd(&a.b)?;
    let d = diff_image(&x, &y)?;
    if let Some(out) = &a.out {
        write_image(&d, out, a.format)?;
    }
    println!("max: {:e}", d.max());
    println!("mean: {:e}", d.mean());
    Ok(())
}

fn degrade(a: DegradeArgs) -> Result<(), CliError> {
    let mode: DegradeMode = a.mode.parse().map_err(|e: String| invalid(e))?;
    let field = load_field(&a.field)?;
    let lin = field.degrade_to_linear(mode)?;
    save_field(&lin, &a.out)?;
    println!("dofs: {}", lin.space().global_dof_count());
    Ok(())
}
