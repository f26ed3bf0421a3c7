//! Contour-integral eigensolver for `lambda T(lambda) u = u` with Newton
//! refinement, spectral-cluster extraction and eigenvalue tracking under
//! perturbations.
//!
//! The solver probes the modified resolvent `R(lambda) = (I - lambda
//! T(lambda))^{-1}` with a seeded random block, forms the first two contour
//! moments, and reads eigenvalues inside the contour off the reduced
//! rank-revealed problem. Every candidate is polished by a Newton iteration
//! on `S(lambda) = I - lambda T(lambda)`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::family::{OperatorFamily, PerturbationFamily};
use crate::linalg::{eig, lu, svd};
use crate::matrix::{normalized, pairing, vec_norm, ComplexMatrix};
use crate::resolvent::{resolvent_system, Contour};
use crate::scalar::{czero, Cx, Scalar};

/// Residual tolerance for accepted eigenpairs.
pub const TOL_EIG: f64 = 1e-10;

/// Initial pairs with residual at or above this are outside the Newton basin.
const BASIN_RESIDUAL: f64 = 0.1;

/// Newton iteration cap.
const MAX_NEWTON: usize = 50;

/// Gram matrices with smallest singular value below this are defective.
const GRAM_TOL: f64 = 1e-8;

/// Same pole-proximity guard as the moment quadrature.
const NODE_POLE_TOL: f64 = 1e-10;

/// Default probe block width.
pub fn default_probes(n: usize) -> usize {
    n.min(8)
}

/// Default tolerance for grouping eigenvalues into one cluster.
pub fn default_group_tol<S: Scalar>(lambda0: Cx<S>) -> S {
    S::real(1e-6) * (S::one() + lambda0.norm())
}

/// A refined nonlinear eigenpair with unit right and left vectors.
#[derive(Debug, Clone)]
pub struct NonlinearEigenpair<S: Scalar> {
    pub lambda: Cx<S>,
    /// Right vector, `||u|| = 1`, with `(I - lambda T(lambda)) u ~= 0`.
    pub right: Vec<Cx<S>>,
    /// Left vector, `||w|| = 1`, with `w^H (I - lambda T(lambda)) ~= 0`.
    pub left: Vec<Cx<S>>,
    pub residual: S,
    pub left_residual: S,
}

/// Semisimple cluster: eigenvalue, multiplicity, orthonormal right basis and
/// the biorthogonal dual basis `(dual)^H basis = I`.
#[derive(Debug, Clone)]
pub struct SpectralCluster<S: Scalar> {
    pub lambda0: Cx<S>,
    pub multiplicity: usize,
    /// `n x m`, orthonormal columns spanning the right eigenspace.
    pub basis: ComplexMatrix<S>,
    /// `n x m`, spans the left eigenspace, scaled so that
    /// `dual_basis^H basis = I_m`.
    pub dual_basis: ComplexMatrix<S>,
    pub semisimple: bool,
}

impl<S: Scalar> SpectralCluster<S> {
    /// Builds a cluster from explicit bases, validating biorthonormality
    /// `(dual)^H basis = I` and unit basis columns to 1e-8.
    pub fn from_bases(
        lambda0: Cx<S>,
        basis: ComplexMatrix<S>,
        dual_basis: ComplexMatrix<S>,
    ) -> Result<Self> {
        if basis.rows() != dual_basis.rows() || basis.cols() != dual_basis.cols() {
            return Err(Error::DimensionMismatch(
                "basis and dual basis shapes differ".into(),
            ));
        }
        let m = basis.cols();
        if m == 0 {
            return Err(Error::InvalidInput("empty cluster basis".into()));
        }
        let tol = S::real(1e-8);
        for j in 0..m {
            let nj = vec_norm(&basis.column(j));
            if (nj - S::one()).abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "basis column {} is not unit length",
                    j
                )));
            }
        }
        let gram = dual_basis.adjoint().matmul(&basis);
        let dev = gram.sub(&ComplexMatrix::identity(m)).frobenius_norm();
        if dev > tol {
            return Err(Error::InvalidInput(format!(
                "bases are not biorthonormal (deviation {:.3e})",
                dev.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            lambda0,
            multiplicity: m,
            basis,
            dual_basis,
            semisimple: true,
        })
    }
}

/// Result of tracking a cluster to the perturbed family at one value of `h`.
#[derive(Debug, Clone)]
pub struct TrackResult<S: Scalar> {
    /// Arithmetic mean of the tracked eigenvalues.
    pub lambda_mean: Cx<S>,
    /// True when the cluster visibly separates at this `h`.
    pub split: bool,
    /// The tracked eigenvalues, nearest to the base eigenvalue first.
    pub members: Vec<Cx<S>>,
}

fn eigen_residual<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda: Cx<S>,
    u: &[Cx<S>],
) -> Result<S> {
    let s = resolvent_system(family, lambda)?;
    Ok(vec_norm(&s.matvec(u)))
}

/// Computes the left vector of a (converged) eigenpair by one or two rounds
/// of inverse iteration on the slightly regularized adjoint system.
fn left_vector<S: Scalar>(
    s_mat: &ComplexMatrix<S>,
    u: &[Cx<S>],
    accept: S,
) -> Result<(Vec<Cx<S>>, S)> {
    let n = s_mat.rows();
    let mut delta = S::real(1e-13) * s_mat.frobenius_norm().max(S::one());
    for _attempt in 0..4 {
        let mut reg = s_mat.clone();
        for i in 0..n {
            reg[(i, i)] = reg[(i, i)] + Complex::new(delta, S::zero());
        }
        if let Ok(fac) = lu::factor(&reg) {
            let mut w = u.to_vec();
            let mut best: Option<(Vec<Cx<S>>, S)> = None;
            for _round in 0..3 {
                w = normalized(&fac.adjoint_solve_vec(&w))?;
                let res = vec_norm(&s_mat.adjoint_matvec(&w));
                if best.as_ref().is_none_or(|(_, b)| res < *b) {
                    best = Some((w.clone(), res));
                }
                if res <= accept {
                    return Ok(best.unwrap());
                }
            }
            if let Some((w, res)) = best {
                if res <= accept * S::real(1e2) {
                    return Ok((w, res));
                }
            }
        }
        delta = delta * S::real(100.0);
    }
    Err(Error::NoConvergence(
        "left-vector inverse iteration stalled".into(),
    ))
}

/// Completes `(lambda, u)` into a full eigenpair without moving it.
fn complete_pair<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda: Cx<S>,
    u: Vec<Cx<S>>,
) -> Result<NonlinearEigenpair<S>> {
    let s_mat = resolvent_system(family, lambda)?;
    let residual = vec_norm(&s_mat.matvec(&u));
    let accept = S::real(TOL_EIG);
    let (left, left_residual) = left_vector(&s_mat, &u, accept)?;
    Ok(NonlinearEigenpair {
        lambda,
        right: u,
        left,
        residual,
        left_residual,
    })
}

/// Newton refinement of an approximate eigenpair.
///
/// Iterates the bordered-Newton update `v = S(lambda)^{-1} S'(lambda) u`,
/// `lambda <- lambda - 1/(u^H v)`, `u <- v/||v||`, with
/// `S'(lambda) = -T(lambda) - lambda DT(lambda)`, until
/// `||S(lambda) u|| <= 1e-12 (1 + |lambda| ||T(lambda)||_F)` or 50 steps.
/// The initial pair must satisfy `||S(lambda) u|| < 0.1`.
pub fn refine<S: Scalar>(
    family: &OperatorFamily<S>,
    lambda_init: Cx<S>,
    u_init: &[Cx<S>],
) -> Result<NonlinearEigenpair<S>> {
    if u_init.len() != family.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs family dimension {}",
            u_init.len(),
            family.dim()
        )));
    }
    let mut lambda = lambda_init;
    let mut u = normalized(u_init)?;
    let mut t = family.evaluate(lambda)?;
    let n = family.dim();
    let eye = ComplexMatrix::<S>::identity(n);
    let mut s_mat = eye.sub(&t.scaled(lambda));
    let mut residual = vec_norm(&s_mat.matvec(&u));
    if residual.is_nan() || residual >= S::real(BASIN_RESIDUAL) {
        return Err(Error::InvalidInput(format!(
            "initial residual {:.3e} outside the Newton basin (< {})",
            residual.to_f64().unwrap_or(f64::NAN),
            BASIN_RESIDUAL
        )));
    }

    let stop_tol = |lam: Cx<S>, tf: S| S::real(1e-12) * (S::one() + lam.norm() * tf);
    let mut tfro = t.frobenius_norm();
    for _iter in 0..MAX_NEWTON {
        if residual <= stop_tol(lambda, tfro) {
            break;
        }
        let fac = match lu::factor(&s_mat) {
            Ok(f) => f,
            Err(_) => {
                // Exactly at a pole but the vector is not yet in the null
                // space: nudge lambda off the singularity and continue.
                let bump = S::real(1e-12) * (S::one() + lambda.norm());
                lambda = lambda + Complex::new(bump, bump);
                t = family.evaluate(lambda)?;
                tfro = t.frobenius_norm();
                s_mat = eye.sub(&t.scaled(lambda));
                residual = vec_norm(&s_mat.matvec(&u));
                continue;
            }
        };
        let dt = family.derivative(lambda)?;
        // S'(lambda) = -T - lambda DT.
        let sprime = t.add(&dt.scaled(lambda)).scaled(Complex::new(-S::one(), S::zero()));
        let v = fac.solve_vec(&sprime.matvec(&u));
        let denom = pairing(&v, &u);
        let dnorm = denom.norm();
        if !dnorm.is_finite() || dnorm < S::real(1e-6) / (S::one() + lambda.norm()) {
            return Err(Error::SingularJacobian(format!(
                "update denominator {:.3e} (defective point or derivative degeneracy)",
                dnorm.to_f64().unwrap_or(f64::NAN)
            )));
        }
        lambda = lambda - denom.inv();
        u = normalized(&v)?;
        t = family.evaluate(lambda)?;
        tfro = t.frobenius_norm();
        s_mat = eye.sub(&t.scaled(lambda));
        residual = vec_norm(&s_mat.matvec(&u));
    }
    if residual.is_nan() || residual > S::real(TOL_EIG) {
        return Err(Error::NoConvergence(format!(
            "Newton stalled at residual {:.3e}",
            residual.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let accept = S::real(TOL_EIG);
    let (left, left_residual) = left_vector(&s_mat, &u, accept)?;
    Ok(NonlinearEigenpair {
        lambda,
        right: u,
        left,
        residual,
        left_residual,
    })
}

fn probe_matrix<S: Scalar>(n: usize, probes: usize, seed: u64) -> ComplexMatrix<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    ComplexMatrix::from_fn(n, probes, |_, _| {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        Complex::new(S::real(re), S::real(im))
    })
}

/// Finds all nonlinear eigenpairs inside the contour.
///
/// `probes` bounds the total multiplicity the solver can resolve; when the
/// moment rank saturates it, the call fails with [`Error::RankOverflow`] and
/// the caller should double the probe count. An empty result is a valid
/// return, not an error. Results are sorted by real, then imaginary part,
/// and are deterministic for a fixed seed.
pub fn solve_in_contour<S: Scalar>(
    family: &OperatorFamily<S>,
    contour: &Contour<S>,
    probes: usize,
    seed: u64,
) -> Result<Vec<NonlinearEigenpair<S>>> {
    contour.validate_region(family)?;
    if probes == 0 {
        return Err(Error::InvalidInput("probe count must be positive".into()));
    }
    let n = family.dim();
    let p = probe_matrix::<S>(n, probes, seed);
    let n_nodes = S::real(contour.nodes() as f64);

    let mut a0 = ComplexMatrix::<S>::zeros(n, probes);
    let mut a1 = ComplexMatrix::<S>::zeros(n, probes);
    let mut scale = S::zero();
    for j in 0..contour.nodes() {
        let lambda = contour.node(j);
        let s = resolvent_system(family, lambda)?;
        let s_norm = s.frobenius_norm();
        let fac = lu::factor(&s).map_err(|_| {
            Error::NodeOnPole(format!(
                "node {} at {} + {}i is singular",
                j, lambda.re, lambda.im
            ))
        })?;
        let ratio = fac.smallest_singular_estimate() / s_norm.max(S::min_positive_value());
        if ratio < S::real(NODE_POLE_TOL) {
            return Err(Error::NodeOnPole(format!(
                "node {} at {} + {}i: sigma_min/||S|| = {:.3e}",
                j,
                lambda.re,
                lambda.im,
                ratio.to_f64().unwrap_or(0.0)
            )));
        }
        let x = fac.solve(&p);
        let xn = x.frobenius_norm();
        if xn > scale {
            scale = xn;
        }
        let w = contour.offset(j) / Complex::new(n_nodes, S::zero());
        a0 = a0.add(&x.scaled(w));
        a1 = a1.add(&x.scaled(w * lambda));
    }

    // Rank-revealing step on the zeroth moment block.
    let dec = svd::svd(&a0)?;
    let k = dec.sigma.len();
    if k == 0 || dec.sigma[0] < S::real(1e-12) * scale.max(S::min_positive_value()) {
        return Ok(vec![]);
    }
    if k == probes {
        return Err(Error::RankOverflow(probes));
    }

    // Reduced problem M = V^H A1 W Sigma^{-1}.
    let mut m_red = dec.u.adjoint().matmul(&a1).matmul(&dec.v);
    for i in 0..k {
        for j in 0..k {
            m_red[(i, j)] = m_red[(i, j)] / Complex::new(dec.sigma[j], S::zero());
        }
    }
    let reduced = eig::eig_dense(&m_red)?;

    let mut pairs: Vec<NonlinearEigenpair<S>> = Vec::new();
    let slack = contour.radius() * S::real(1.25);
    for i in 0..k {
        let mu = reduced.values[i];
        if !mu.re.is_finite() || !mu.im.is_finite() {
            continue;
        }
        if (mu - contour.center()).norm() > slack {
            continue;
        }
        if !family.region().contains(mu) {
            continue;
        }
        let u = match normalized(&dec.u.matvec(&reduced.right.column(i))) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let res = match eigen_residual(family, mu, &u) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if res.is_nan() || res >= S::real(BASIN_RESIDUAL) {
            // Spurious direction from quadrature noise.
            continue;
        }
        match refine(family, mu, &u) {
            Ok(pair) => {
                if (pair.lambda - contour.center()).norm() <= contour.radius() {
                    pairs.push(pair);
                }
            }
            // Candidates that wander out of the region or basin are spurious.
            Err(Error::OutOfRegion(_)) | Err(Error::InvalidInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    pairs.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("finite eigenvalues")
    });
    Ok(pairs)
}

/// [`solve_in_contour`] with the standard caller-side restart: on rank
/// overflow the probe count is doubled once.
pub fn solve_in_contour_auto<S: Scalar>(
    family: &OperatorFamily<S>,
    contour: &Contour<S>,
    probes: usize,
    seed: u64,
) -> Result<Vec<NonlinearEigenpair<S>>> {
    match solve_in_contour(family, contour, probes, seed) {
        Err(Error::RankOverflow(l)) => solve_in_contour(family, contour, 2 * l, seed),
        other => other,
    }
}

/// Groups the pairs within `group_tol` of `lambda0` into a semisimple
/// cluster: orthonormalized right basis `Phi` and dual basis
/// `Phi* = W (W^H Phi)^{-H}` so that `(Phi*)^H Phi = I`.
///
/// Fails with [`Error::DefectiveCluster`] on the signatures of Jordan
/// structure, which the dual-basis construction does not support: dependent
/// right vectors, a numerically singular Gram matrix `W^H Phi` (smallest
/// singular value below 1e-8), or orthonormalized basis columns that stop
/// satisfying the eigenpair residual bound at the cluster eigenvalue
/// (dependence amplified into spurious directions).
pub fn extract_cluster<S: Scalar>(
    family: &OperatorFamily<S>,
    pairs: &[NonlinearEigenpair<S>],
    lambda0: Cx<S>,
    group_tol: S,
) -> Result<SpectralCluster<S>> {
    let members: Vec<&NonlinearEigenpair<S>> = pairs
        .iter()
        .filter(|p| (p.lambda - lambda0).norm() <= group_tol)
        .collect();
    if members.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no eigenpair within {:.3e} of the cluster candidate",
            group_tol.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let n = members[0].right.len();
    let m = members.len();

    // Modified Gram-Schmidt with re-orthogonalization on the right vectors.
    let mut basis_cols: Vec<Vec<Cx<S>>> = Vec::with_capacity(m);
    for p in &members {
        let mut v = p.right.clone();
        for _ in 0..2 {
            for q in &basis_cols {
                let c = pairing(&v, q);
                for i in 0..n {
                    v[i] = v[i] - c * q[i];
                }
            }
        }
        let nv = vec_norm(&v);
        if nv < S::real(GRAM_TOL) {
            return Err(Error::DefectiveCluster(
                "right eigenvectors are linearly dependent".into(),
            ));
        }
        basis_cols.push(v.iter().map(|z| z / nv).collect());
    }
    let basis = ComplexMatrix::from_columns(&basis_cols)?;

    let mut mean = czero();
    for p in &members {
        mean = mean + p.lambda;
    }
    mean = mean / Complex::new(S::real(m as f64), S::zero());

    // Orthonormalized columns must still be eigenvectors at the cluster
    // eigenvalue. Near-parallel member vectors (a Jordan signature) get
    // amplified into directions that fail this bound spectacularly.
    let t_mean = family.evaluate(mean)?;
    let dt_mean = family.derivative(mean)?;
    let sens = S::one() + t_mean.frobenius_norm() + mean.norm() * dt_mean.frobenius_norm();
    let col_tol = S::real(TOL_EIG) + S::real(100.0) * group_tol * sens;
    let s_mean = ComplexMatrix::identity(n).sub(&t_mean.scaled(mean));
    for (j, col) in basis_cols.iter().enumerate() {
        let res = vec_norm(&s_mean.matvec(col));
        if res > col_tol {
            return Err(Error::DefectiveCluster(format!(
                "orthonormalized basis column {} has residual {:.3e} at the cluster eigenvalue",
                j,
                res.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }

    let w = ComplexMatrix::from_columns(
        &members.iter().map(|p| p.left.clone()).collect::<Vec<_>>(),
    )?;

    let gram = w.adjoint().matmul(&basis);
    let gram_svd = svd::svd(&gram)?;
    let sigma_min = if gram_svd.sigma.len() == m {
        gram_svd.sigma[m - 1]
    } else {
        S::zero()
    };
    if sigma_min < S::real(GRAM_TOL) {
        return Err(Error::DefectiveCluster(format!(
            "left/right Gram matrix has smallest singular value {:.3e}",
            sigma_min.to_f64().unwrap_or(0.0)
        )));
    }
    // dual = W (W^H Phi)^{-H}: solve G X = W^H, take the adjoint.
    let x = lu::factor(&gram)?.solve(&w.adjoint());
    let dual = x.adjoint();

    Ok(SpectralCluster {
        lambda0: mean,
        multiplicity: m,
        basis,
        dual_basis: dual,
        semisimple: true,
    })
}

/// Solves inside the contour and extracts the single cluster it isolates.
///
/// When the moment solver returns nothing, the contour center is probed
/// directly: the smallest singular direction of `I - lambda T(lambda)` at
/// the center seeds a Newton refinement, and the null space at the refined
/// eigenvalue rebuilds the cluster. This covers eigenvalues whose resolvent
/// residue vanishes (second-order poles without first-order part), which are
/// invisible to the zeroth moment.
pub fn find_cluster<S: Scalar>(
    family: &OperatorFamily<S>,
    contour: &Contour<S>,
    probes: usize,
    seed: u64,
    group_tol: Option<S>,
) -> Result<SpectralCluster<S>> {
    let pairs = solve_in_contour_auto(family, contour, probes, seed)?;
    if !pairs.is_empty() {
        let mut mean = czero();
        for p in &pairs {
            mean = mean + p.lambda;
        }
        mean = mean / Complex::new(S::real(pairs.len() as f64), S::zero());
        let tol = group_tol.unwrap_or_else(|| default_group_tol(mean));
        if pairs.iter().any(|p| (p.lambda - mean).norm() > tol) {
            return Err(Error::InvalidInput(
                "contour does not isolate a single cluster".into(),
            ));
        }
        return extract_cluster(family, &pairs, mean, tol);
    }

    // Moment-invisible case: probe the center directly.
    let center = contour.center();
    let s_c = resolvent_system(family, center)?;
    let (sigma_min, v_min) = svd::smallest_right_singular(&s_c)?;
    if sigma_min.is_nan() || sigma_min >= S::real(BASIN_RESIDUAL) {
        return Err(Error::NoEigenvalue(
            "contour encloses no eigenvalue (moments empty, center probe rejected)".into(),
        ));
    }
    let seed_pair = refine(family, center, &v_min).map_err(|e| match e {
        Error::InvalidInput(_) => {
            Error::NoEigenvalue("center probe did not converge to an eigenpair".into())
        }
        other => other,
    })?;
    if (seed_pair.lambda - center).norm() > contour.radius() {
        return Err(Error::NoEigenvalue(
            "center probe converged outside the contour".into(),
        ));
    }
    let lambda_r = seed_pair.lambda;
    let s_r = resolvent_system(family, lambda_r)?;
    let ns = svd::null_space(&s_r, S::real(1e-8))?;
    let mut pairs = Vec::new();
    for j in 0..ns.cols() {
        let pair = complete_pair(family, lambda_r, ns.column(j))?;
        if pair.residual <= S::real(TOL_EIG) {
            pairs.push(pair);
        }
    }
    if pairs.is_empty() {
        pairs.push(seed_pair);
    }
    let tol = group_tol.unwrap_or_else(|| default_group_tol(lambda_r));
    extract_cluster(family, &pairs, lambda_r, tol)
}

/// Tracks a cluster of the base family to the perturbed family `T_h`.
///
/// Solves `T_h` inside the contour, keeps the `multiplicity` eigenvalues
/// nearest the base eigenvalue, and reports their mean together with a
/// split flag (`max pairwise distance > 1e-6 (1 + |lambda0|)`).
pub fn track<S: Scalar>(
    perturbation: &PerturbationFamily<S>,
    cluster0: &SpectralCluster<S>,
    h: S,
    contour: &Contour<S>,
    probes: usize,
    seed: u64,
) -> Result<TrackResult<S>> {
    let fam_h = perturbation.family_at(h);
    let pairs = solve_in_contour_auto(&fam_h, contour, probes, seed)?;
    let m = cluster0.multiplicity;
    if pairs.len() < m {
        return Err(Error::MultiplicityMismatch(format!(
            "found {} eigenvalue(s) in the contour, cluster multiplicity is {}",
            pairs.len(),
            m
        )));
    }
    let lambda0 = cluster0.lambda0;
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        let da = (pairs[a].lambda - lambda0).norm();
        let db = (pairs[b].lambda - lambda0).norm();
        (da, pairs[a].lambda.re, pairs[a].lambda.im)
            .partial_cmp(&(db, pairs[b].lambda.re, pairs[b].lambda.im))
            .expect("finite")
    });
    let members: Vec<Cx<S>> = order[..m].iter().map(|&i| pairs[i].lambda).collect();
    let mut mean = czero();
    for lam in &members {
        mean = mean + *lam;
    }
    mean = mean / Complex::new(S::real(m as f64), S::zero());
    let mut max_dist = S::zero();
    for i in 0..m {
        for j in i + 1..m {
            let d = (members[i] - members[j]).norm();
            if d > max_dist {
                max_dist = d;
            }
        }
    }
    let split = max_dist > default_group_tol(lambda0);
    Ok(TrackResult {
        lambda_mean: mean,
        split,
        members,
    })
}
