//! The experiment implementations behind the subcommands. Each one reads
//! its keys from the config, runs the measurement and renders a CSV whose
//! first lines echo the resolved configuration.

use crate::config::{CliError, Config};
use smallprop::doubling::{doubling_index_cube, CubeIndexParams, FieldTarget};
use smallprop::fields::{
    concentrating_spherical_harmonic, parse_coefficient, parse_field, AnalyticSolution,
    EigenRegion, Eigenfunction, GradientMagnitude, ScalarField,
};
use smallprop::fit::linear_fit;
use smallprop::geometry::{hausdorff_content, read_mask, Ball, Cube, PointSet};
use smallprop::smallness::{
    bad_cube_census, critical_census, decay_profile, eigen_remez_check, feasible_exponents,
    recursive_bound_propagator, remez_check, RecursionParams,
};
use smallprop::solver::{gradient, read_grid, solve_dirichlet, write_grid};
use smallprop::SplitMix64;

fn core_err(e: smallprop::Error) -> CliError {
    match e {
        smallprop::Error::Format(msg) => CliError::parse(msg),
        smallprop::Error::Io(msg) => CliError::io(msg),
        other => CliError::run(other),
    }
}

/// Gradient magnitude that owns its analytic solution.
struct OwnedGradient(AnalyticSolution);

impl ScalarField for OwnedGradient {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        GradientMagnitude(&self.0).value(x)
    }
    fn sup_abs_ball(&self, ball: &Ball) -> f64 {
        GradientMagnitude(&self.0).sup_abs_ball(ball)
    }
    fn sup_abs_cube(&self, cube: &Cube) -> f64 {
        GradientMagnitude(&self.0).sup_abs_cube(cube)
    }
    fn inf_abs_cube(&self, cube: &Cube) -> f64 {
        GradientMagnitude(&self.0).inf_abs_cube(cube)
    }
    fn domain(&self) -> Option<Cube> {
        None
    }
}

fn parse_target(cfg: &Config, default: &str) -> Result<FieldTarget, CliError> {
    let raw = cfg.get_str("target", default);
    match raw.as_str() {
        "u" => Ok(FieldTarget::U),
        "grad" => Ok(FieldTarget::Grad),
        other => Err(CliError::parse(other)),
    }
}

/// Resolves `--field` (registry spec or `grid:<path>`) with `--target`.
fn load_field(
    cfg: &Config,
    default_spec: &str,
    default_target: &str,
) -> Result<(Box<dyn ScalarField>, FieldTarget), CliError> {
    let spec = cfg.get_str("field", default_spec);
    let target = parse_target(cfg, default_target)?;
    if let Some(path) = spec.strip_prefix("grid:") {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{path}: {e}")))?;
        let grid = read_grid(&text).map_err(core_err)?;
        let field: Box<dyn ScalarField> = match target {
            FieldTarget::U => Box::new(grid),
            FieldTarget::Grad => Box::new(gradient(&grid).map_err(core_err)?.magnitude()),
        };
        Ok((field, target))
    } else {
        let sol = parse_field(&spec).map_err(core_err)?;
        let field: Box<dyn ScalarField> = match target {
            FieldTarget::U => Box::new(sol),
            FieldTarget::Grad => Box::new(OwnedGradient(sol)),
        };
        Ok((field, target))
    }
}

fn index_params(cfg: &Config) -> Result<CubeIndexParams, CliError> {
    Ok(CubeIndexParams {
        dilation: cfg.get_f64("dilation", 4.0)?,
        centers_per_axis: cfg.get_usize("centers", 17)?,
        radii_levels: cfg.get_usize("radii", 6)?,
    })
}

pub fn dispatch(name: &str, cfg: &Config) -> Result<String, CliError> {
    match name {
        "solve" => solve(cfg),
        "doubling" => doubling(cfg),
        "decay" => decay(cfg),
        "census" => census(cfg),
        "critical" => critical(cfg),
        "remez" => remez(cfg),
        "recursion" => recursion(cfg),
        "eigen" => eigen(cfg),
        "content" => content(cfg),
        other => Err(CliError::unknown_experiment(other)),
    }
}

fn solve(cfg: &Config) -> Result<String, CliError> {
    let coeff = parse_coefficient(&cfg.get_str("coeff", "identity:n=2")).map_err(core_err)?;
    let (boundary, _) = load_field(cfg, "harmonic_poly:n=2,k=3", "u")?;
    let cube = cfg.get_cube("cube", "0,0,1")?;
    let padding = cfg.get_f64("padding", 4.0)?;
    let res = cfg.get_usize("res", 33)?;
    let tol = cfg.get_f64("tol", 1e-10)?;
    let grid_out = cfg.get_path("grid-out");
    let domain = cube.scale(padding).map_err(core_err)?;
    let (u, report) =
        solve_dirichlet(&coeff, &domain, |x| boundary.value(x), res, tol).map_err(core_err)?;
    if !report.converged {
        return Err(CliError::solver(format!(
            "unconverged after {} iterations, relative residual {}",
            report.iterations, report.relative_residual
        )));
    }
    if !grid_out.is_empty() {
        std::fs::write(&grid_out, write_grid(&u))
            .map_err(|e| CliError::io(format!("{grid_out}: {e}")))?;
    }
    let mut out = cfg.echo();
    out.push_str("iterations,relative_residual,converged,max_principle\n");
    out.push_str(&format!(
        "{},{},{},{}\n",
        report.iterations, report.relative_residual, report.converged, report.max_principle_ok
    ));
    Ok(out)
}

fn doubling(cfg: &Config) -> Result<String, CliError> {
    let (field, target) = load_field(cfg, "affine", "u")?;
    let cube = cfg.get_cube("cube", "0,0,1")?;
    let params = index_params(cfg)?;
    let report = doubling_index_cube(field.as_ref(), &cube, &params, target).map_err(core_err)?;
    let x_star = report
        .max_center
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let mut out = cfg.echo();
    out.push_str("target,N_ball,N_cube,x*,r*\n");
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        report.target, report.ball_index, report.cube_index, x_star, report.max_radius
    ));
    Ok(out)
}

fn decay(cfg: &Config) -> Result<String, CliError> {
    let (field, target) = load_field(cfg, "harmonic_poly:n=2,k=3", "u")?;
    let cube = cfg.get_cube("cube", "0,0,1")?;
    let order = cfg.get_f64("d", 1.5)?;
    let a_grid = cfg.get_grid("a", "1:8:0.5")?;
    let res = cfg.get_usize("res", 513)?;
    let params = index_params(cfg)?;
    let fit = decay_profile(field.as_ref(), &cube, order, &a_grid, res, &params, target)
        .map_err(core_err)?;
    let mut out = cfg.echo();
    out.push_str("a,content\n");
    for (a, m) in &fit.samples {
        out.push_str(&format!("{a},{m}\n"));
    }
    out.push_str(&format!("# slope={}\n", fit.slope));
    out.push_str(&format!("# intercept={}\n", fit.intercept));
    out.push_str(&format!(
        "# certified_intercept={}\n",
        fit.certified_intercept
    ));
    out.push_str(&format!("# doubling_index={}\n", fit.doubling_index));
    out.push_str(&format!("# empty_masks={}\n", fit.empty_masks));
    Ok(out)
}

fn census(cfg: &Config) -> Result<String, CliError> {
    let (field, target) = load_field(cfg, "harmonic_poly:n=2,k=3", "u")?;
    let cube = cfg.get_cube("cube", "0,0,1")?;
    let b = cfg.get_usize("b", 8)?;
    let n_floor = cfg.get_f64("n0", 1.0)?;
    let params = index_params(cfg)?;
    let report =
        bad_cube_census(field.as_ref(), &cube, b, n_floor, &params, target).map_err(core_err)?;
    let indices = report
        .bad_indices
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let mut out = cfg.echo();
    out.push_str("subdivision,threshold,parent_index,count,total,exponent,bad_indices\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        report.subdivision,
        report.threshold,
        report.parent_index,
        report.count,
        report.total_subcubes,
        report.empirical_exponent,
        indices
    ));
    Ok(out)
}

fn critical(cfg: &Config) -> Result<String, CliError> {
    let (field, _) = load_field(cfg, "harmonic_poly:n=3,k=3", "grad")?;
    let cube = cfg.get_cube("cube", "0,0,0,1")?;
    let splits = cfg.get_usize_list("k", "8,16,32")?;
    let c = cfg.get_f64("c", 0.5)?;
    let mut out = cfg.echo();
    out.push_str("K,count,total,clipped,exponent\n");
    let mut log_k = Vec::new();
    let mut log_count = Vec::new();
    for &split in &splits {
        let rep = critical_census(field.as_ref(), &cube, split, c).map_err(core_err)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rep.split, rep.count, rep.total_subcubes, rep.clipped, rep.empirical_exponent
        ));
        if rep.count > 0 {
            log_k.push((split as f64).ln());
            log_count.push((rep.count as f64).ln());
        }
    }
    let fitted = if log_k.len() >= 2 {
        linear_fit(&log_k, &log_count).0
    } else {
        f64::NAN
    };
    out.push_str(&format!("# fitted_exponent={fitted}\n"));
    Ok(out)
}

fn remez(cfg: &Config) -> Result<String, CliError> {
    let (field, _) = load_field(cfg, "harmonic_poly:n=2,k=3", "u")?;
    let cube = cfg.get_cube("cube", "0,0,1")?;
    let res = cfg.get_usize("res", 65)?;
    let fraction = cfg.get_f64("measure", 0.1)?;
    let seed = cfg.get_u64("seed", 1)?;
    let params = index_params(cfg)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CliError::parse(format!("measure {fraction}")));
    }
    let n = cube.dim();
    let total: usize = res.pow(n as u32);
    let mut rng = SplitMix64::new(seed);
    let mask: Vec<bool> = (0..total).map(|_| rng.next_f64() < fraction).collect();
    let spacing = cube.side() / (res - 1) as f64;
    let set = PointSet::from_mask(vec![res; n], spacing, cube.center().to_vec(), mask)
        .map_err(core_err)?;
    if set.is_empty() {
        return Err(CliError::run("random mask came out empty; raise measure"));
    }
    let report = remez_check(field.as_ref(), &cube, &set, &params).map_err(core_err)?;
    let mut out = cfg.echo();
    out.push_str("c_fit,sup_q,sup_e,measure_ratio,doubling_index\n");
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        report.c_fit, report.sup_q, report.sup_e, report.measure_ratio, report.doubling_index
    ));
    Ok(out)
}

fn recursion(cfg: &Config) -> Result<String, CliError> {
    let b = cfg.get_f64("b", 10.0)?;
    let hole = cfg.get_f64("c", 0.25)?;
    let delta = cfg.get_f64("delta", 0.5)?;
    let shift = cfg.get_f64("c1", 1.0)?;
    let n0 = cfg.get_f64("n0", 1.0)?;
    let doublings = cfg.get_usize("doublings", 4)?;
    let a_grid = cfg.get_grid("a", "1:200:0.5")?;
    let cap = cfg.get_f64("cap", 1.0)?;
    let (beta, c0) = feasible_exponents(b, hole, delta, shift).map_err(core_err)?;
    let params = RecursionParams {
        subdivision: b,
        hole_exponent: hole,
        delta,
        shift,
        small_a: c0,
    };
    let table = recursive_bound_propagator(
        |a| (-beta * a).exp(),
        n0,
        doublings,
        &a_grid,
        &params,
        beta,
        cap,
    )
    .map_err(core_err)?;
    let mut out = cfg.echo();
    out.push_str(&format!("# beta={beta}\n"));
    out.push_str(&format!("# c0={c0}\n"));
    out.push_str(&format!(
        "# sufficient_condition={}\n",
        params.sufficient_condition(beta)
    ));
    out.push_str(&format!(
        "# worst_recursion_slack={}\n",
        table.verify_recursion()
    ));
    out.push_str(&format!(
        "# envelope_constant={}\n",
        table.envelope_constant(beta)
    ));
    out.push_str("N,a,M\n");
    for (level, row) in table.rows.iter().enumerate() {
        let n = table.n_levels[level];
        for (i, &m) in row.iter().enumerate() {
            out.push_str(&format!("{n},{},{m}\n", table.a_grid[i]));
        }
    }
    Ok(out)
}

fn eigen(cfg: &Config) -> Result<String, CliError> {
    let family = cfg.get_str("family", "sphere");
    let kmin = cfg.get_usize("kmin", if family == "sphere" { 2 } else { 1 })?;
    let kmax = cfg.get_usize("kmax", if family == "sphere" { 12 } else { 8 })?;
    if kmin < 1 || kmax < kmin {
        return Err(CliError::parse(format!("kmin {kmin} kmax {kmax}")));
    }
    let (members, region): (Vec<Eigenfunction>, EigenRegion) = match family.as_str() {
        "sphere" => {
            let cap = cfg.get_f64("cap", std::f64::consts::FRAC_PI_6)?;
            (
                (kmin..=kmax)
                    .map(|k| concentrating_spherical_harmonic(k as u32).map_err(core_err))
                    .collect::<Result<_, _>>()?,
                EigenRegion::PolarCap { colatitude: cap },
            )
        }
        "torus" => {
            let raw = cfg.get_str("disc", "0.37,0.2,0.1");
            let parts: Vec<f64> = raw
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::parse(&raw)))
                .collect::<Result<_, _>>()?;
            if parts.len() < 3 {
                return Err(CliError::parse(&raw));
            }
            let (center, radius) = (parts[..parts.len() - 1].to_vec(), *parts.last().unwrap());
            (
                (kmin..=kmax)
                    .map(|k| {
                        let mut freqs = vec![0i64; center.len()];
                        freqs[0] = k as i64;
                        Eigenfunction::TorusCosine { freqs }
                    })
                    .collect(),
                EigenRegion::TorusBall { center, radius },
            )
        }
        other => return Err(CliError::parse(other)),
    };
    let fit = eigen_remez_check(&members, &region).map_err(core_err)?;
    let mut out = cfg.echo();
    out.push_str("degree,sqrt_lambda,log_ratio\n");
    for i in 0..fit.degrees.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fit.degrees[i], fit.sqrt_eigenvalues[i], fit.log_ratios[i]
        ));
    }
    out.push_str(&format!("# slope_vs_degree={}\n", fit.slope_vs_degree));
    out.push_str(&format!(
        "# intercept_vs_degree={}\n",
        fit.intercept_vs_degree
    ));
    out.push_str(&format!(
        "# slope_vs_sqrt_lambda={}\n",
        fit.slope_vs_sqrt_lambda
    ));
    Ok(out)
}

fn content(cfg: &Config) -> Result<String, CliError> {
    let path = cfg.get_str("mask", "");
    if path.is_empty() {
        return Err(CliError::parse("mask"));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(format!("{path}: {e}")))?;
    let set = read_mask(&text).map_err(core_err)?;
    let order = cfg.get_f64("d", 1.5)?;
    let depth = cfg.get_usize("depth", set.default_depth())?;
    let mut out = cfg.echo();
    out.push_str("max_depth,value,winning_generation,cover_cells\n");
    for md in 0..=depth {
        let est = hausdorff_content(&set, order, md).map_err(core_err)?;
        out.push_str(&format!(
            "{md},{},{},{}\n",
            est.value,
            est.depth,
            est.cover.len()
        ));
    }
    Ok(out)
}
