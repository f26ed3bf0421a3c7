//! Acceptance suite: the end-to-end accuracy and behavior gates of the
//! project, one test per criterion, each printing a PASS/FAIL line with its
//! measured values (run with `-- --nocapture` to see the lines).
//!
//! Criterion 6 documents a known limitation: the midpoint Nystrom
//! discretization of the 1D resonance kernel converges at second order with
//! measured error ~7.9/q^2 against the transfer-matrix oracle, so the 1e-4
//! gate at q = 128 is out of reach of this discretization (it would need
//! q ~ 280). The assertion is kept as stated and fails honestly; the
//! convergence-rate assertions pass.

use std::process::Command;
use std::time::{Duration, Instant};

use nep_cli::oracles;
use nep_cli::run::cluster_of;
use nep_core::correction::{first_order_slope, nonlinear_correction, osborn_linear_correction};
use nep_core::family::{OperatorFamily, PerturbationFamily, PiecewiseConstant};
use nep_core::linalg::eig_dense;
use nep_core::matrix::ComplexMatrix;
use nep_core::resolvent::{apply_resolvent, contour_moments, perturbation_bound, Contour};
use nep_core::solver::{
    default_probes, extract_cluster, solve_in_contour_auto, track, SpectralCluster,
};
use nep_core::{C64, Matrix64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    name: &'static str,
    budget: Duration,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64) -> Self {
        Self {
            name,
            budget: Duration::from_secs_f64(budget_s),
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        if elapsed > self.budget {
            self.failures
                .push(format!("runtime {elapsed:?} over budget {:?}", self.budget));
        }
        if self.failures.is_empty() {
            println!("{}: PASS ({elapsed:.2?})", self.name);
        } else {
            println!(
                "{}: FAIL ({elapsed:.2?}) — {}",
                self.name,
                self.failures.join("; ")
            );
            panic!("{} failed: {}", self.name, self.failures.join("; "));
        }
    }
}

fn scalar(v: f64) -> Matrix64 {
    Matrix64::from_vec(1, 1, vec![C64::new(v, 0.0)]).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix64 {
    Matrix64::from_fn(n, n, |_, _| {
        C64::new(
            scale * rng.gen_range(-1.0..1.0),
            scale * rng.gen_range(-1.0..1.0),
        )
    })
}

#[test]
fn criterion_1_scalar_quadratic_family() {
    let mut c = Criterion::new("criterion 1 (scalar quadratic family)", 1.0);
    // Pencil (-1, 0.5, 0.25): T(lambda) = 0.5 + 0.25 lambda with the root
    // -1 + sqrt(5) of det(A + lambda B + lambda^2 C) inside the contour.
    let family =
        OperatorFamily::quadratic(&scalar(-1.0), &scalar(0.5), &scalar(0.25)).unwrap();
    let contour = Contour::new(C64::new(1.0, 0.0), 1.0, 32).unwrap();
    let pairs = solve_in_contour_auto(&family, &contour, default_probes(1), 1).unwrap();
    let want = -1.0 + 5.0_f64.sqrt();
    c.check(pairs.len() == 1, format!("found {} eigenvalues", pairs.len()));
    if let Some(p) = pairs.first() {
        let err = (p.lambda - C64::new(want, 0.0)).norm();
        c.check(err <= 1e-10, format!("|lambda - (-1+sqrt5)| = {err:.3e}"));
    }

    let cluster = cluster_of(&family, &contour, 2, 1).unwrap();
    let pert = PerturbationFamily::linear(family, OperatorFamily::constant(scalar(1.0)).unwrap())
        .unwrap();
    let slope = first_order_slope(&pert, &cluster).unwrap();
    let lambda0 = cluster.lambda0.re;
    let oracle = -lambda0 * lambda0 / (1.0 + 0.25 * lambda0 * lambda0);
    let rel = (slope - C64::new(oracle, 0.0)).norm() / oracle.abs();
    c.check(rel <= 1e-8, format!("slope relative error {rel:.3e}"));
    c.finish();
}

#[test]
fn criterion_2_companion_equivalence() {
    let mut c = Criterion::new("criterion 2 (companion-linearization equivalence)", 10.0);
    let mut tested = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let n = 3;
        let a = random_matrix(&mut rng, n, 1.0);
        let b = random_matrix(&mut rng, n, 1.0);
        let mut cc = random_matrix(&mut rng, n, 1.0);
        for i in 0..n {
            cc[(i, i)] += C64::new(2.0, 0.0);
        }
        let family = OperatorFamily::quadratic(&a, &b, &cc).unwrap();
        let roots = oracles::companion_eigenvalues(&a, &b, &cc).unwrap();
        // Choose a center and radius isolating at most n roots with a clear
        // annulus (the moment rank saturates at n).
        let mut choice = None;
        'centers: for center in [
            C64::new(0.0, 0.0),
            C64::new(0.2, 0.1),
            C64::new(-0.15, 0.2),
            C64::new(0.1, -0.25),
        ] {
            let mut dist: Vec<f64> = roots.iter().map(|z| (z - center).norm()).collect();
            dist.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for k in (1..=n).rev() {
                if dist[k] - dist[k - 1] >= 0.12 {
                    choice = Some((center, 0.5 * (dist[k - 1] + dist[k])));
                    break 'centers;
                }
            }
        }
        let (center, radius) = match choice {
            Some(c) => c,
            None => {
                c.check(false, format!("seed {seed}: no isolating annulus"));
                continue;
            }
        };
        let contour = Contour::new(center, radius, 64).unwrap();
        let mut inside: Vec<C64> = roots
            .iter()
            .copied()
            .filter(|z| (z - center).norm() < radius)
            .collect();
        inside.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        match solve_in_contour_auto(&family, &contour, default_probes(n), 37 + seed) {
            Ok(pairs) => {
                c.check(
                    pairs.len() == inside.len(),
                    format!("seed {seed}: count {} vs oracle {}", pairs.len(), inside.len()),
                );
                for (p, o) in pairs.iter().zip(inside.iter()) {
                    let err = (p.lambda - o).norm();
                    c.check(err <= 1e-8, format!("seed {seed}: mismatch {err:.3e}"));
                }
                tested += 1;
            }
            Err(err) => c.check(false, format!("seed {seed}: solver error {err}")),
        }
    }
    c.check(tested == 20, format!("only {tested} of 20 families tested"));
    c.finish();
}

#[test]
fn criterion_3_remainder_order() {
    let mut c = Criterion::new("criterion 3 (remainder order of the correction)", 30.0);
    let h_schedule = [1e-1, 1e-2, 1e-3, 1e-4];
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let n = 4;
        let c0 = random_matrix(&mut rng, n, 0.6);
        let eig = eig_dense(&c0).unwrap();
        // Anchor the family at the reciprocal of the largest eigenvalue of
        // C0: T(lambda) = C0 + (lambda - lambda0) C1 keeps lambda0 exact.
        let (mut mu, mut best) = (C64::new(0.0, 0.0), 0.0);
        for v in &eig.values {
            if v.norm() > best {
                best = v.norm();
                mu = *v;
            }
        }
        let lambda0 = mu.inv();
        let gap = eig
            .values
            .iter()
            .filter(|v| (*v - mu).norm() > 1e-9)
            .map(|v| (v.inv() - lambda0).norm())
            .fold(f64::INFINITY, f64::min);
        let c1 = random_matrix(&mut rng, n, 0.15);
        let family = OperatorFamily::polynomial(vec![
            c0.sub(&c1.scaled(lambda0)),
            c1,
        ])
        .unwrap();
        let radius = (0.3 * gap).min(0.5 * lambda0.norm());
        let contour = Contour::new(lambda0, radius, 32).unwrap();
        let cluster = match cluster_of(&family, &contour, default_probes(n), 700 + seed) {
            Ok(cl) => cl,
            Err(err) => {
                c.check(false, format!("seed {seed}: cluster acquisition: {err}"));
                continue;
            }
        };
        c.check(
            cluster.multiplicity == 1,
            format!("seed {seed}: multiplicity {}", cluster.multiplicity),
        );

        // Direction scaled so the tracked eigenvalue stays well inside.
        let d = OperatorFamily::polynomial(vec![
            random_matrix(&mut rng, n, 0.3),
            random_matrix(&mut rng, n, 0.3),
        ])
        .unwrap();
        let probe = PerturbationFamily::linear(family.clone(), d.clone()).unwrap();
        let raw_slope = first_order_slope(&probe, &cluster).unwrap();
        let budget = 0.25 * radius;
        let scale = (budget / (raw_slope.norm() * h_schedule[0])).min(1.0);
        let dir = OperatorFamily::scaled(d, C64::new(scale, 0.0));
        let pert = PerturbationFamily::linear(family, dir).unwrap();

        let mut pts = Vec::new();
        let mut ok = true;
        for &h in &h_schedule {
            let tracked = match track(&pert, &cluster, h, &contour, default_probes(n), 700 + seed)
            {
                Ok(t) => t,
                Err(err) => {
                    c.check(false, format!("seed {seed}: track({h}): {err}"));
                    ok = false;
                    break;
                }
            };
            let rep = nonlinear_correction(&pert, &cluster, h).unwrap();
            pts.push((h, (tracked.lambda_mean - rep.predicted).norm()));
        }
        if !ok {
            continue;
        }
        let slope = nep_cli::report::loglog_slope(&pts);
        c.check(
            slope >= 1.9,
            format!("seed {seed}: remainder slope {slope:.3} (errors {pts:?})"),
        );
    }
    c.finish();
}

#[test]
fn criterion_4_linear_theory() {
    let mut c = Criterion::new("criterion 4 (linear Osborn correction)", 1.0);

    // Diagonal perturbation reproduces the exact shift to roundoff.
    let k = Matrix64::diag(&[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]).unwrap();
    let fam_k = OperatorFamily::constant(k.clone()).unwrap();
    let contour = Contour::new(C64::new(1.0, 0.0), 0.4, 32).unwrap();
    let cluster = cluster_of(&fam_k, &contour, 2, 5).unwrap();
    let h = 1e-3;
    let mut k_n = k.clone();
    k_n[(0, 0)] = C64::new(1.0 + h, 0.0);
    let mu_hat = osborn_linear_correction(&k, &k_n, &cluster).unwrap();
    let err = (mu_hat - C64::new(1.0 + h, 0.0)).norm();
    c.check(err <= 1e-13, format!("diagonal case error {err:.3e}"));

    // Non-normal example against the dense-eigensolver oracle: the
    // first-order error ratio |mu_hat - mu_exact| / h^2 stays bounded.
    let k = Matrix64::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
    ])
    .unwrap();
    let fam_k = OperatorFamily::constant(k.clone()).unwrap();
    let cluster = cluster_of(&fam_k, &contour, 2, 5).unwrap();
    for h in [1e-2, 1e-3, 1e-4] {
        let mut k_n = k.clone();
        k_n[(1, 0)] = C64::new(h, 0.0);
        let mu_hat = osborn_linear_correction(&k, &k_n, &cluster).unwrap();
        // Oracle: eigenvalue of K_n nearest 1 from the dense eigensolver.
        let mu_exact = eig_dense(&k_n)
            .unwrap()
            .values
            .into_iter()
            .min_by(|a, b| {
                (a - C64::new(1.0, 0.0))
                    .norm()
                    .partial_cmp(&(b - C64::new(1.0, 0.0)).norm())
                    .unwrap()
            })
            .unwrap();
        let ratio = (mu_hat - mu_exact).norm() / (h * h);
        c.check(ratio <= 10.0, format!("h = {h}: ratio {ratio:.3}"));
    }
    c.finish();
}

#[test]
fn criterion_5_resolvent_moments_and_bound() {
    let mut c = Criterion::new("criterion 5 (resolvent moments and bound)", 5.0);

    // Scalar pole: M0 = -2 at the pole of T == 0.5.
    let f_half = OperatorFamily::constant(scalar(0.5)).unwrap();
    let g_pole = Contour::new(C64::new(2.0, 0.0), 0.5, 32).unwrap();
    let m0 = contour_moments(&f_half, &g_pole, 0).unwrap().moments[0][(0, 0)];
    let err = (m0 - C64::new(-2.0, 0.0)).norm();
    c.check(err <= 1e-10, format!("scalar pole M0 error {err:.3e}"));

    // Empty contour: vanishing moment.
    let g_empty = Contour::new(C64::new(0.0, 0.0), 0.5, 32).unwrap();
    let m0_empty = contour_moments(&f_half, &g_empty, 0).unwrap().moments[0].frobenius_norm();
    c.check(m0_empty <= 1e-10, format!("empty-contour |M0| = {m0_empty:.3e}"));

    // Perturbation bound dominates the measured difference at 20 valid
    // sample points for each test family.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut families: Vec<(OperatorFamily<f64>, OperatorFamily<f64>)> = Vec::new();
    families.push((
        OperatorFamily::polynomial(vec![scalar(0.5), scalar(0.25)]).unwrap(),
        OperatorFamily::polynomial(vec![scalar(0.52), scalar(0.25)]).unwrap(),
    ));
    {
        let mut a = random_matrix(&mut rng, 4, 1.0);
        for i in 0..4 {
            a[(i, i)] += C64::new(3.0, 0.0);
        }
        let b = random_matrix(&mut rng, 4, 1.0);
        let cc = random_matrix(&mut rng, 4, 1.0);
        let d = random_matrix(&mut rng, 4, 1e-3);
        let base = OperatorFamily::quadratic(&a, &b, &cc).unwrap();
        let pert = OperatorFamily::sum(base.clone(), OperatorFamily::constant(d).unwrap());
        families.push((base, pert.unwrap()));
    }
    {
        let base =
            OperatorFamily::resonance_1d(&PiecewiseConstant::constant(1.0), 16).unwrap();
        let dir =
            OperatorFamily::resonance_1d(&PiecewiseConstant::constant(0.05), 16).unwrap();
        let pert = OperatorFamily::sum(base.clone(), dir).unwrap();
        families.push((base, pert));
    }
    for (idx, (f0, fh)) in families.iter().enumerate() {
        let eye = ComplexMatrix::identity(f0.dim());
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 20 && attempts < 4000 {
            attempts += 1;
            let lambda = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if !f0.region().contains(lambda) {
                continue;
            }
            let pb = match perturbation_bound(f0, fh, lambda) {
                Ok(pb) if pb.valid => pb,
                _ => continue,
            };
            let r0 = apply_resolvent(f0, lambda, &eye).unwrap();
            let rh = match apply_resolvent(fh, lambda, &eye) {
                Ok(rh) => rh,
                Err(_) => continue,
            };
            let measured = nep_core::linalg::operator_norm(&rh.sub(&r0)).unwrap();
            let bound = pb.bound.unwrap();
            c.check(
                measured <= bound * (1.0 + 1e-10),
                format!("family {idx}: measured {measured:.3e} > bound {bound:.3e} at {lambda}"),
            );
            checked += 1;
        }
        c.check(
            checked == 20,
            format!("family {idx}: only {checked} valid sample points"),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_resonance_oracle() {
    let mut c = Criterion::new("criterion 6 (resonance vs transfer-matrix oracle)", 60.0);
    let eta0 = 1.0;
    let oracle = oracles::transfer_matrix_resonance(eta0, oracles::resonance_guess(eta0, 1));
    c.check(
        oracles::transfer_matrix_residual(eta0, oracle) <= 1e-12,
        "oracle Newton did not converge".into(),
    );
    let eta = PiecewiseConstant::constant(eta0);
    let contour = Contour::new(oracle, 0.5, 16).unwrap();
    let mut errs = Vec::new();
    for q in [64usize, 128, 256] {
        let family = OperatorFamily::resonance_1d(&eta, q).unwrap();
        let pairs = solve_in_contour_auto(&family, &contour, default_probes(q), 4).unwrap();
        let nearest = pairs
            .iter()
            .map(|p| (p.lambda - oracle).norm())
            .fold(f64::INFINITY, f64::min);
        errs.push((q, nearest));
    }
    // Convergence: the error at least halves per doubling (measured ~0.25x).
    c.check(
        errs[1].1 <= 0.5 * errs[0].1,
        format!("halving 64->128 violated: {errs:?}"),
    );
    c.check(
        errs[2].1 <= 0.5 * errs[1].1,
        format!("halving 128->256 violated: {errs:?}"),
    );
    // Known-failing accuracy gate: second-order midpoint quadrature measures
    // ~7.9/q^2 (= 4.8e-4 at q = 128), so 1e-4 at q = 128 is out of reach of
    // this discretization. Kept as stated; see the project notes.
    c.check(
        errs[1].1 <= 1e-4,
        format!("q = 128 error {:.4e} > 1e-4 (quadrature-limited)", errs[1].1),
    );
    c.finish();
}

#[test]
fn criterion_7_invariance_suite() {
    let mut c = Criterion::new("criterion 7 (invariance suite)", 10.0);

    // Biorthogonality on every cluster produced across representative
    // families: scalar quadratic, double semisimple, random quadratic.
    let mut clusters: Vec<(SpectralCluster<f64>, &'static str)> = Vec::new();
    let scalar_fam = OperatorFamily::polynomial(vec![scalar(0.5), scalar(0.25)]).unwrap();
    let g1 = Contour::new(C64::new(1.0, 0.0), 1.0, 32).unwrap();
    clusters.push((cluster_of(&scalar_fam, &g1, 2, 1).unwrap(), "scalar"));
    let dbl = OperatorFamily::constant(
        Matrix64::diag(&[C64::new(0.5, 0.0), C64::new(0.5, 0.0)]).unwrap(),
    )
    .unwrap();
    let g2 = Contour::new(C64::new(2.0, 0.0), 0.5, 32).unwrap();
    clusters.push((cluster_of(&dbl, &g2, 4, 2).unwrap(), "double"));
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let a = random_matrix(&mut rng, 3, 1.0);
    let b = random_matrix(&mut rng, 3, 1.0);
    let mut cc = random_matrix(&mut rng, 3, 1.0);
    for i in 0..3 {
        cc[(i, i)] += C64::new(2.0, 0.0);
    }
    let quad = OperatorFamily::quadratic(&a, &b, &cc).unwrap();
    let roots = oracles::companion_eigenvalues(&a, &b, &cc).unwrap();
    let lone = roots
        .iter()
        .copied()
        .min_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
        .unwrap();
    let gap = roots
        .iter()
        .filter(|z| (*z - lone).norm() > 1e-9)
        .map(|z| (z - lone).norm())
        .fold(f64::INFINITY, f64::min);
    let g3 = Contour::new(lone, 0.4 * gap, 32).unwrap();
    clusters.push((cluster_of(&quad, &g3, 3, 3).unwrap(), "quadratic"));
    for (cl, label) in &clusters {
        let m = cl.multiplicity;
        let gram = cl.dual_basis.adjoint().matmul(&cl.basis);
        let dev = gram.sub(&Matrix64::identity(m)).frobenius_norm();
        c.check(dev <= 1e-8, format!("{label}: biorthogonality dev {dev:.3e}"));
    }

    // Eigenvector rescaling invariance: phi -> s*phi with the dual
    // re-derived (phi* -> phi*/conj(s)) leaves the prediction unchanged.
    let pert = PerturbationFamily::linear(
        scalar_fam.clone(),
        OperatorFamily::polynomial(vec![scalar(1.0), scalar(-0.3)]).unwrap(),
    )
    .unwrap();
    let base_cluster = &clusters[0].0;
    let rep0 = nonlinear_correction(&pert, base_cluster, 1e-3).unwrap();
    let s = C64::new(1.7, -2.3);
    let scaled = SpectralCluster {
        lambda0: base_cluster.lambda0,
        multiplicity: base_cluster.multiplicity,
        basis: base_cluster.basis.scaled(s),
        dual_basis: base_cluster.dual_basis.scaled(s.conj().inv()),
        semisimple: true,
    };
    let rep1 = nonlinear_correction(&pert, &scaled, 1e-3).unwrap();
    let dev = (rep0.predicted - rep1.predicted).norm();
    c.check(dev <= 1e-12, format!("rescaling moved prediction by {dev:.3e}"));

    // Byte-identical CSV across two runs of the binary with the same seed.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(
        &cfg,
        "problem.kind = matrix_poly\n\
         problem.A.inline = 0.5\n\
         problem.B.inline = 0.25\n\
         perturbation.direction.A.inline = 1\n\
         contour.center_re = 1.0\n\
         contour.radius = 1.0\n\
         solver.seed = 11\n\
         study.h = 1e-1,1e-2,1e-3\n",
    )
    .unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_nep"))
            .args(args)
            .output()
            .expect("spawn nep")
    };
    for sub in ["solve", "study"] {
        let a = run(&[sub, "--config", cfg.to_str().unwrap()]);
        let b = run(&[sub, "--config", cfg.to_str().unwrap()]);
        c.check(
            a.status.code() == Some(0) && a.stdout == b.stdout,
            format!("{sub}: outputs differ between identical runs"),
        );
    }
    c.finish();
}

#[test]
fn criterion_8_guard_behavior() {
    let mut c = Criterion::new("criterion 8 (guard behavior)", 1.0);

    // Engineered denominator violation (scalar c = -1/lambda0^2): exit 3.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dtcond.cfg");
    std::fs::write(
        &cfg,
        "problem.kind = matrix_poly\n\
         problem.A.inline = 2\n\
         problem.B.inline = -1\n\
         perturbation.direction.A.inline = 1\n\
         contour.center_re = 1.0\n\
         contour.radius = 0.5\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nep"))
        .args(["correct", "--config", cfg.to_str().unwrap(), "--h", "0.001"])
        .output()
        .expect("spawn nep");
    c.check(
        out.status.code() == Some(3),
        format!("exit code {:?}, expected 3", out.status.code()),
    );

    // Defective Jordan-block cluster rejected with DefectiveCluster.
    let m = Matrix64::from_rows(&[
        vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
    ])
    .unwrap();
    let f = OperatorFamily::constant(m).unwrap();
    let g = Contour::new(C64::new(2.0, 0.0), 0.5, 32).unwrap();
    let pairs = solve_in_contour_auto(&f, &g, 2, 11).unwrap();
    let rejected = matches!(
        extract_cluster(&f, &pairs, C64::new(2.0, 0.0), 1e-6),
        Err(nep_core::Error::DefectiveCluster(_))
    );
    c.check(rejected, "Jordan cluster was not rejected".into());
    c.finish();
}
