//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use fevis::expr::parse;
use fevis::mesh::{box_mesh, unit_square_mesh, Mesh};
use fevis::render::{
    diff_image, mip_render, nrrd_header, pgm_bytes, read_nrrd, sample2d, write_nrrd, write_pgm,
    AnalyticField, Camera, ImageGrid, RenderConfig, Window,
};
use fevis::solver::{assemble_bilinear, quadrature_rule, solve_helmholtz, MAX_QUADRATURE_DEGREE};
use fevis::space::{function_space, DegradeMode, FeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const SPHERE: &str = "0.5 - sqrt((x[0]-1)^2 + (x[1]-1)^2 + (x[2]-1)^2)";
const SPHERE_SHIFTED: &str = "0.5 - sqrt((x[0]-0.75)^2 + (x[1]-1)^2 + (x[2]-1)^2)";

fn extremum() -> Outcome {
    let res = 200;
    let target = 2.0 / 3.0;
    let column_of = |x: f64| x * res as f64 - 0.5;
    let mesh = Arc::new(unit_square_mesh(2, 2, [1.0, 1.0]).unwrap());
    let expr = parse("x[0]*x[0]*(1-x[0])", 2).unwrap();
    let p3 = FeField::interpolate(&function_space(mesh.clone(), "P", 3).unwrap(), &expr).unwrap();
    let img = sample2d(&p3, res, res, Window::unit()).unwrap();
    let (i, _, v) = img.argmax();
    let offset = (i as f64 - column_of(target)).abs();
    let value_err = (v - 4.0 / 27.0).abs();
    let mut ok = offset <= 1.0 && value_err <= 1e-6;
    let mut detail =
        format!("P3 argmax column {i} (offset {offset:.2} px), |max-4/27| = {value_err:.1e}");

    let p1 = FeField::interpolate(&function_space(mesh, "P", 1).unwrap(), &expr).unwrap();
    let lossy = [
        ("P1", p1),
        (
            "P3->P1 interpolate",
            p3.degrade_to_linear(DegradeMode::Interpolate).unwrap(),
        ),
        (
            "P3->P1 l2project",
            p3.degrade_to_linear(DegradeMode::L2Project).unwrap(),
        ),
    ];
    for (name, field) in &lossy {
        let (i, _, _) = sample2d(field, res, res, Window::unit()).unwrap().argmax();
        let off = (i as f64 - column_of(target)).abs();
        ok &= off > 10.0;
        detail += &format!("; {name} offset {off:.1} px");
    }
    check(ok, detail)
}

fn sphere_field(expr: &str) -> FeField {
    let mesh = Arc::new(box_mesh(16, 16, 16, [2.0; 3]).unwrap());
    let space = function_space(mesh, "P", 3).unwrap();
    FeField::interpolate(&space, &parse(expr, 3).unwrap()).unwrap()
}

fn centered_camera(look_at: [f64; 3]) -> Camera {
    let mut cam = Camera::looking_at([1.0, 1.0, 5.0], look_at);
    cam.width = 101;
    cam.height = 101;
    cam.near = 3.0;
    cam.far = 5.0;
    cam
}

fn clamp0(img: &ImageGrid) -> ImageGrid {
    ImageGrid::new(
        img.width,
        img.height,
        img.values().iter().map(|v| v.max(0.0)).collect(),
    )
}

fn rotation_asymmetry(img: &ImageGrid) -> f64 {
    diff_image(img, &img.rotate90()).unwrap().max()
}

fn invariance(fe: &FeField) -> Outcome {
    let cam = centered_camera([1.0, 1.0, 1.0]);
    let cfg = RenderConfig::default();
    let analytic = AnalyticField::over_mesh_of(parse(SPHERE, 3).unwrap(), fe);
    let a = clamp0(&mip_render(fe, &cam, &cfg).unwrap());
    let b = clamp0(&mip_render(&analytic, &cam, &cfg).unwrap());
    let d = diff_image(&a, &b).unwrap().max();
    let (ai, aj, _) = a.argmax();
    let (bi, bj, _) = b.argmax();
    check(
        d <= 2e-3 && (ai, aj) == (bi, bj),
        format!("max |FE - analytic| = {d:.3e}; argmax FE ({ai},{aj}) analytic ({bi},{bj})"),
    )
}

fn misalignment(fe: &FeField) -> Outcome {
    let cfg = RenderConfig::default();
    let centered =
        rotation_asymmetry(&mip_render(fe, &centered_camera([1.0, 1.0, 1.0]), &cfg).unwrap());
    let off_camera =
        rotation_asymmetry(&mip_render(fe, &centered_camera([0.5, 0.5, 1.0]), &cfg).unwrap());
    let shifted = sphere_field(SPHERE_SHIFTED);
    let off_expr =
        rotation_asymmetry(&mip_render(&shifted, &centered_camera([1.0, 1.0, 1.0]), &cfg).unwrap());
    check(
        centered <= 1e-6 && off_camera > 0.01 && off_expr > 0.01,
        format!(
            "rotated difference: centered {centered:.1e}, off-center camera {off_camera:.3}, off-center expression {off_expr:.3}"
        ),
    )
}

fn helmholtz() -> Outcome {
    let solve = |n: usize, k: usize| {
        let mesh = Arc::new(unit_square_mesh(n, n, [1.0, 1.0]).unwrap());
        let s = solve_helmholtz(mesh, k).unwrap();
        (s.l2_error(), s.relative_residual)
    };
    let mut ok = true;
    let mut detail = String::new();
    let mut worst_residual: f64 = 0.0;
    for k in [1, 3] {
        let ns = [4usize, 8, 16];
        let runs: Vec<(f64, f64)> = ns.iter().map(|&n| solve(n, k)).collect();
        worst_residual = runs.iter().fold(worst_residual, |m, r| m.max(r.1));
        // least-squares slope of log(error) against log(n)
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = runs.iter().map(|r| r.0.ln()).collect();
        let xm = xs.iter().sum::<f64>() / 3.0;
        let ym = ys.iter().sum::<f64>() / 3.0;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
        let order = -num / den;
        let pairs: Vec<String> = (0..2)
            .map(|i| format!("{:.2}", (runs[i].0 / runs[i + 1].0).log2()))
            .collect();
        ok &= order >= k as f64 + 0.5 && runs.windows(2).all(|w| w[1].0 < w[0].0);
        detail += &format!(
            "k={k} errors {:.2e}/{:.2e}/{:.2e} order {order:.2} (pairwise {}); ",
            runs[0].0,
            runs[1].0,
            runs[2].0,
            pairs.join(", ")
        );
    }
    let (e1, r1) = solve(10, 1);
    let (e3, r3) = solve(10, 3);
    worst_residual = worst_residual.max(r1).max(r3);
    let ratio = e1 / e3;
    ok &= ratio >= 10.0 && worst_residual <= 1e-10;
    detail += &format!("n=10 k1/k3 error ratio {ratio:.0}; worst CG residual {worst_residual:.1e}");
    check(ok, detail)
}

/// Random polynomial of total degree <= k: (exponents, coefficient) terms.
fn random_poly(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<([usize; 3], f64)> {
    let mut terms = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=(k - a - b) {
                if dim == 2 && c > 0 {
                    continue;
                }
                terms.push(([a, b, c], rng.gen_range(-1.0..1.0)));
            }
        }
    }
    terms
}

fn poly_text(terms: &[([usize; 3], f64)], dim: usize) -> String {
    let mut s = String::from("0");
    for (e, c) in terms {
        s += &format!("+({c:?})");
        for (axis, &p) in e.iter().enumerate().take(dim) {
            if p > 0 {
                s += &format!("*x[{axis}]^{p}");
            }
        }
    }
    s
}

fn poly_value(terms: &[([usize; 3], f64)], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(e, c)| {
            let mut v = *c;
            for (axis, &xi) in x.iter().enumerate() {
                for _ in 0..e[axis] {
                    v *= xi;
                }
            }
            v
        })
        .sum()
}

fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: &[f64]) -> Vec<f64> {
    hi.iter().map(|&h| rng.gen_range(lo..h - lo)).collect()
}

fn point_evaluation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let configs: Vec<(Mesh, Vec<f64>, usize)> = vec![
        (
            unit_square_mesh(3, 4, [1.5, 1.0]).unwrap(),
            vec![1.5, 1.0],
            1,
        ),
        (
            unit_square_mesh(3, 4, [1.5, 1.0]).unwrap(),
            vec![1.5, 1.0],
            2,
        ),
        (
            unit_square_mesh(3, 4, [1.5, 1.0]).unwrap(),
            vec![1.5, 1.0],
            3,
        ),
        (
            unit_square_mesh(3, 4, [1.5, 1.0]).unwrap(),
            vec![1.5, 1.0],
            5,
        ),
        (
            box_mesh(2, 3, 2, [1.0, 1.5, 1.0]).unwrap(),
            vec![1.0, 1.5, 1.0],
            1,
        ),
        (
            box_mesh(2, 3, 2, [1.0, 1.5, 1.0]).unwrap(),
            vec![1.0, 1.5, 1.0],
            2,
        ),
        (
            box_mesh(2, 3, 2, [1.0, 1.5, 1.0]).unwrap(),
            vec![1.0, 1.5, 1.0],
            3,
        ),
    ];
    let mut worst_value: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut worst_facet: f64 = 0.0;
    for (mesh, lengths, k) in configs {
        let dim = mesh.dim();
        let mesh = Arc::new(mesh);
        let space = function_space(mesh.clone(), "P", k).unwrap();
        let terms = random_poly(&mut rng, dim, k);
        let field =
            FeField::interpolate(&space, &parse(&poly_text(&terms, dim), dim).unwrap()).unwrap();
        let h = 1e-5;
        for _ in 0..1000 {
            let x = random_point(&mut rng, 2.0 * h, &lengths);
            worst_value =
                worst_value.max((field.eval_point(&x).unwrap() - poly_value(&terms, &x)).abs());
            let g = field.eval_gradient(&x).unwrap();
            let mut diff2 = 0.0;
            let mut fd2 = 0.0;
            for a in 0..dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[a] += h;
                xm[a] -= h;
                let fd =
                    (field.eval_point(&xp).unwrap() - field.eval_point(&xm).unwrap()) / (2.0 * h);
                diff2 += (g[a] - fd).powi(2);
                fd2 += fd * fd;
            }
            worst_grad = worst_grad.max(diff2.sqrt() / fd2.sqrt().max(f64::MIN_POSITIVE));
        }

        let wavy = format!(
            "sin(3*x[0]+1)*cos(2*x[1]){}",
            if dim == 3 { "*exp(x[2])" } else { "" }
        );
        let wf = FeField::interpolate(&space, &parse(&wavy, dim).unwrap()).unwrap();
        let shared: Vec<(Vec<usize>, Vec<usize>)> = mesh
            .facet_cells()
            .into_iter()
            .filter(|(_, cells)| cells.len() == 2)
            .collect();
        for _ in 0..1000 {
            let (facet, cells) = &shared[rng.gen_range(0..shared.len())];
            let mut w: Vec<f64> = (0..facet.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            let x: Vec<f64> = (0..dim)
                .map(|a| {
                    facet
                        .iter()
                        .zip(&w)
                        .map(|(&v, wi)| wi * mesh.vertex(v)[a])
                        .sum()
                })
                .collect();
            let d = (wf.eval_in_cell(cells[0], &x) - wf.eval_in_cell(cells[1], &x)).abs();
            worst_facet = worst_facet.max(d);
        }
    }
    check(
        worst_value <= 1e-9 && worst_grad <= 1e-4 && worst_facet <= 1e-9,
        format!(
            "7 configurations x 1000 points: value {worst_value:.1e}, gradient rel {worst_grad:.1e}, facet jump {worst_facet:.1e}"
        ),
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn quadrature_and_assembly() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rules = 0;
    for dim in [2, 3] {
        for degree in 0..=MAX_QUADRATURE_DEGREE {
            let rule = quadrature_rule(dim, degree).unwrap();
            rules += 1;
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let cs = if dim == 3 { degree - a - b } else { 0 };
                    for c in 0..=cs {
                        let exact =
                            factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim);
                        let got = rule.integrate(|p| {
                            let z = if dim == 3 { p[2].powi(c as i32) } else { 1.0 };
                            p[0].powi(a as i32) * p[1].powi(b as i32) * z
                        });
                        worst = worst.max((got - exact).abs() / exact);
                    }
                }
            }
        }
    }

    let tri = Arc::new(
        Mesh::new(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap(),
    );
    let p1 = function_space(tri, "P", 1).unwrap();
    let mass = assemble_bilinear(&p1, 0.0, 1.0).unwrap();
    let stiff = assemble_bilinear(&p1, 1.0, 0.0).unwrap();
    let m_ref = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]].map(|r| r.map(|v| v / 24.0));
    let k_ref = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    let mut block_err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            block_err = block_err
                .max((mass.get(i, j) - m_ref[i][j]).abs())
                .max((stiff.get(i, j) - k_ref[i][j]).abs());
        }
    }
    check(
        worst <= 1e-12 && block_err <= 1e-12,
        format!("{rules} rules, worst monomial rel error {worst:.1e}; P1 mass/stiffness error {block_err:.1e}"),
    )
}

fn formats() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (7, 3);
    let values: Vec<f64> = (0..w * h).map(|i| (i as f64 * 0.37).sin()).collect();
    let grid = ImageGrid::new(w, h, values.clone());
    let path = dir.path().join("grid.nrrd");
    write_nrrd(&grid, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let header =
        "NRRD0004\ntype: double\ndimension: 2\nsizes: 7 3\nendian: little\nencoding: raw\n\n";
    let header_ok = nrrd_header(w, h) == header && bytes.starts_with(header.as_bytes());
    let payload = &bytes[header.len()..];
    let payload_ok = payload.len() == 8 * w * h
        && payload
            .chunks_exact(8)
            .zip(&values)
            .all(|(c, v)| c == v.to_le_bytes());
    let round_trip = read_nrrd(&path).unwrap() == grid;

    let pgm_grid = ImageGrid::new(2, 2, vec![0.0, 1.0, 2.0, 3.0]);
    let pgm = pgm_bytes(&pgm_grid).unwrap();
    let pgm_path = dir.path().join("grid.pgm");
    write_pgm(&pgm_grid, &pgm_path).unwrap();
    let pgm_ok =
        pgm == b"P5\n2 2\n255\n\x00\x55\xaa\xff" && std::fs::read(&pgm_path).unwrap() == pgm;
    check(
        header_ok && payload_ok && round_trip && pgm_ok,
        format!(
            "NRRD header {header_ok}, payload {} bytes {payload_ok}, round trip {round_trip}; PGM bytes {:?}",
            payload.len(),
            &pgm[pgm.len() - 4..]
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sphere = sphere_field(SPHERE);
    let criteria: Vec<Criterion> = vec![
        ("extremum reproduction", Box::new(extremum)),
        (
            "representation invariance",
            Box::new(|| invariance(&sphere)),
        ),
        (
            "misalignment reproduction",
            Box::new(|| misalignment(&sphere)),
        ),
        ("helmholtz convergence", Box::new(helmholtz)),
        ("point evaluation", Box::new(point_evaluation)),
        ("quadrature and assembly", Box::new(quadrature_and_assembly)),
        ("format exactness", Box::new(formats)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match run() {
            Ok(d) => println!("PASS {} {name}: {d} [{:.1?}]", n + 1, t.elapsed()),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} [{:.1?}]", n + 1, t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
