//! Subcommand implementations. Each returns the complete stdout payload, so
//! nothing is emitted on failure paths (all-or-nothing output).

use nep_core::correction::{first_order_slope, nonlinear_correction};
use nep_core::family::{OperatorFamily, PerturbationFamily};
use nep_core::resolvent::Contour;
use nep_core::solver::{
    default_group_tol, find_cluster, solve_in_contour_auto, track, NonlinearEigenpair,
    SpectralCluster,
};
use nep_core::C64;

use crate::config::StudyConfig;
use crate::report::{csv, fmt_bool, fmt_f64, loglog_slope};
use crate::CliError;

/// Relative agreement required between the correction slope and the central
/// finite difference of tracked eigenvalues.
const SLOPE_AGREE_RTOL: f64 = 1e-6;

/// Step for the central-difference slope check.
const SLOPE_CHECK_H: f64 = 1e-5;

fn group_tolerance(cfg: &StudyConfig, lambda0: C64) -> f64 {
    cfg.solver.tol.unwrap_or_else(|| default_group_tol(lambda0))
}

fn solve_pairs(
    cfg: &StudyConfig,
    family: &OperatorFamily<f64>,
    contour: &Contour<f64>,
) -> Result<Vec<NonlinearEigenpair<f64>>, CliError> {
    solve_in_contour_auto(family, contour, cfg.probes_for(family.dim()), cfg.solver.seed)
        .map_err(CliError::from_core)
}

fn acquire_cluster(
    cfg: &StudyConfig,
    family: &OperatorFamily<f64>,
    contour: &Contour<f64>,
) -> Result<SpectralCluster<f64>, CliError> {
    let tol = cfg.solver.tol;
    find_cluster(
        family,
        contour,
        cfg.probes_for(family.dim()),
        cfg.solver.seed,
        tol,
    )
    .map_err(CliError::from_core)
}

/// `nep solve`: all eigenvalues inside the contour, one CSV row each.
pub fn run_solve(cfg: &StudyConfig) -> Result<String, CliError> {
    let family = cfg.build_family()?;
    let contour = cfg.build_contour()?;
    let pairs = solve_pairs(cfg, &family, &contour)?;

    let mut rows = Vec::with_capacity(pairs.len());
    let mut group = 0usize;
    let mut group_rep: Option<C64> = None;
    for (i, p) in pairs.iter().enumerate() {
        let tol = group_tolerance(cfg, p.lambda);
        match group_rep {
            Some(rep) if (p.lambda - rep).norm() <= tol => {}
            Some(_) => {
                group += 1;
                group_rep = Some(p.lambda);
            }
            None => group_rep = Some(p.lambda),
        }
        rows.push(vec![
            i.to_string(),
            fmt_f64(p.lambda.re),
            fmt_f64(p.lambda.im),
            fmt_f64(p.residual),
            group.to_string(),
        ]);
    }
    Ok(csv(
        "index,lambda_re,lambda_im,residual,multiplicity_group",
        &rows,
    ))
}

/// `nep correct --h X`: one correction report row for the isolated cluster.
pub fn run_correct(cfg: &StudyConfig, h: f64) -> Result<String, CliError> {
    let pert = cfg.build_perturbation()?;
    let contour = cfg.build_contour()?;
    let cluster = acquire_cluster(cfg, pert.base(), &contour)?;
    let rep = nonlinear_correction(&pert, &cluster, h).map_err(CliError::from_core)?;
    let row = vec![
        fmt_f64(rep.lambda0.re),
        fmt_f64(rep.lambda0.im),
        rep.multiplicity.to_string(),
        fmt_f64(rep.numerator.re),
        fmt_f64(rep.numerator.im),
        fmt_f64(rep.denominator.re),
        fmt_f64(rep.denominator.im),
        fmt_f64(rep.predicted.re),
        fmt_f64(rep.predicted.im),
        fmt_bool(rep.condition_ok).to_string(),
    ];
    Ok(csv(
        "lambda0_re,lambda0_im,m,numerator_re,numerator_im,denominator_re,denominator_im,predicted_re,predicted_im,condition_ok",
        &[row],
    ))
}

/// `nep study`: per-h rows comparing tracked eigenvalues against the
/// correction prediction, plus a fitted-slope summary line.
pub fn run_study(cfg: &StudyConfig) -> Result<String, CliError> {
    if cfg.h_schedule.is_empty() {
        return Err(CliError::config("study requires study.h"));
    }
    let pert = cfg.build_perturbation()?;
    let contour = cfg.build_contour()?;
    let probes = cfg.probes_for(pert.base().dim());
    let seed = cfg.solver.seed;
    let cluster = acquire_cluster(cfg, pert.base(), &contour)?;
    let lambda0 = cluster.lambda0;

    let mut rows = Vec::with_capacity(cfg.h_schedule.len());
    let mut err_points = Vec::with_capacity(cfg.h_schedule.len());
    for &h in &cfg.h_schedule {
        let tracked =
            track(&pert, &cluster, h, &contour, probes, seed).map_err(CliError::from_core)?;
        let rep = nonlinear_correction(&pert, &cluster, h).map_err(CliError::from_core)?;
        let err_pred = (tracked.lambda_mean - rep.predicted).norm();
        let err_base = (tracked.lambda_mean - lambda0).norm();
        err_points.push((h, err_pred));
        rows.push(vec![
            fmt_f64(h),
            fmt_f64(tracked.lambda_mean.re),
            fmt_f64(tracked.lambda_mean.im),
            fmt_f64(rep.predicted.re),
            fmt_f64(rep.predicted.im),
            fmt_f64(err_pred),
            fmt_f64(err_base),
            fmt_bool(tracked.split).to_string(),
            fmt_bool(rep.condition_ok).to_string(),
        ]);
    }

    let slope_fit = loglog_slope(&err_points);
    let slope = first_order_slope(&pert, &cluster).map_err(CliError::from_core)?;
    let plus = track(&pert, &cluster, SLOPE_CHECK_H, &contour, probes, seed)
        .map_err(CliError::from_core)?;
    let minus = track(&pert, &cluster, -SLOPE_CHECK_H, &contour, probes, seed)
        .map_err(CliError::from_core)?;
    let central = (plus.lambda_mean - minus.lambda_mean) / C64::new(2.0 * SLOPE_CHECK_H, 0.0);
    let scale = slope.norm().max(central.norm()).max(1e-30);
    let first_order_ok = (slope - central).norm() <= SLOPE_AGREE_RTOL * scale;

    let mut out = csv(
        "h,lambda_h_re,lambda_h_im,predicted_re,predicted_im,err_predicted,err_lambda0,split,condition_ok",
        &rows,
    );
    out.push_str(&format!(
        "remainder_slope={} first_order_ok={}\n",
        fmt_f64(slope_fit),
        fmt_bool(first_order_ok)
    ));
    Ok(out)
}

/// Shared helper for tests and studies that need a one-shot cluster from an
/// arbitrary family (bypassing the config layer).
pub fn cluster_of(
    family: &OperatorFamily<f64>,
    contour: &Contour<f64>,
    probes: usize,
    seed: u64,
) -> Result<SpectralCluster<f64>, CliError> {
    find_cluster(family, contour, probes, seed, None).map_err(CliError::from_core)
}

/// Convenience used by the verification suite: tracked eigenvalue and
/// prediction at one `h`.
pub fn study_point(
    pert: &PerturbationFamily<f64>,
    cluster: &SpectralCluster<f64>,
    contour: &Contour<f64>,
    probes: usize,
    seed: u64,
    h: f64,
) -> Result<(C64, C64), CliError> {
    let tracked = track(pert, cluster, h, contour, probes, seed).map_err(CliError::from_core)?;
    let rep = nonlinear_correction(pert, cluster, h).map_err(CliError::from_core)?;
    Ok((tracked.lambda_mean, rep.predicted))
}
