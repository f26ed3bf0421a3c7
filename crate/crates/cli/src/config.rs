//! Study configuration: `key = value` lines with dotted keys.
//!
//! ```text
//! problem.kind = quadratic            # matrix_poly | generalized | quadratic | resonance1d
//! problem.A.inline = 1 0; 0 1         # rows split by ';', entries like the matrix file format
//! problem.B.file = b.mat              # path relative to the config file
//! problem.eta.breakpoints = 0,1       # resonance1d profile
//! problem.eta.values = 1
//! problem.eta.nodes = 128
//! perturbation.direction.A.inline = 1 # polynomial direction A + lambda B + lambda^2 C
//! perturbation.direction.eta.values = 1
//! contour.center_re = 1.0
//! contour.center_im = 0.0
//! contour.radius = 1.0
//! contour.nodes = 32
//! solver.probes = 4                   # default min(n, 8)
//! solver.seed = 0
//! solver.tol = 1e-6                   # cluster grouping tolerance override
//! study.h = 1e-1,1e-2,1e-3,1e-4       # strictly descending, all positive
//! ```
//!
//! `#` starts a comment; blank lines are ignored; keys may not repeat.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nep_core::family::{OperatorFamily, PerturbationFamily, PiecewiseConstant};
use nep_core::io;
use nep_core::resolvent::Contour;
use nep_core::solver::default_probes;
use nep_core::{C64, Matrix64};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    MatrixPoly,
    Generalized,
    Quadratic,
    Resonance1d,
}

impl ProblemKind {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "matrix_poly" => Ok(Self::MatrixPoly),
            "generalized" => Ok(Self::Generalized),
            "quadratic" => Ok(Self::Quadratic),
            "resonance1d" => Ok(Self::Resonance1d),
            other => Err(format!(
                "unknown problem.kind '{}' (expected matrix_poly, generalized, quadratic or resonance1d)",
                other
            )),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::MatrixPoly => "matrix_poly",
            Self::Generalized => "generalized",
            Self::Quadratic => "quadratic",
            Self::Resonance1d => "resonance1d",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EtaConfig {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub nodes: usize,
}

#[derive(Debug, Clone)]
pub struct ContourConfig {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub probes: Option<usize>,
    pub seed: u64,
    /// Cluster grouping tolerance override; default `1e-6 (1 + |lambda0|)`.
    pub tol: Option<f64>,
}

/// Direction of a linear-in-h perturbation: a matrix polynomial
/// `A + lambda B + lambda^2 C`, or a profile increment for resonance
/// problems. Missing direction means the zero direction.
#[derive(Debug, Clone, Default)]
pub struct DirectionConfig {
    pub a: Option<Matrix64>,
    pub b: Option<Matrix64>,
    pub c: Option<Matrix64>,
    pub eta_breakpoints: Option<Vec<f64>>,
    pub eta_values: Option<Vec<f64>>,
}

/// A parsed and resolved study configuration (matrix files already loaded).
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub kind: ProblemKind,
    pub a: Option<Matrix64>,
    pub b: Option<Matrix64>,
    pub c: Option<Matrix64>,
    pub k: Option<Matrix64>,
    pub eta: Option<EtaConfig>,
    pub direction: DirectionConfig,
    pub contour: ContourConfig,
    pub solver: SolverConfig,
    pub h_schedule: Vec<f64>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

fn parse_matrix_inline(value: &str) -> Result<Matrix64, String> {
    let rows: Vec<&str> = value.split(';').map(str::trim).collect();
    if rows.is_empty() || rows.iter().all(|r| r.is_empty()) {
        return Err("empty inline matrix".into());
    }
    let mut data: Vec<Vec<C64>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.is_empty() {
            return Err(format!("inline matrix row {} is empty", i + 1));
        }
        let mut entries = Vec::new();
        for tok in row.split_whitespace() {
            let z = io::parse_complex::<f64>(tok)
                .ok_or_else(|| format!("bad complex entry '{}' in inline matrix", tok))?;
            entries.push(z);
        }
        data.push(entries);
    }
    Matrix64::from_rows(&data).map_err(|e| e.to_string())
}

fn format_matrix_inline(m: &Matrix64) -> String {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| io::format_complex(m[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| format!("bad number '{}'", s))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(format!("non-finite number '{}'", s))
                    }
                })
        })
        .collect()
}

fn format_f64_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| crate::report::fmt_f64(*x))
        .collect::<Vec<_>>()
        .join(",")
}

struct KeyTable {
    entries: BTreeMap<String, String>,
}

impl KeyTable {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| config_err(format!("bad value '{}' for {}", v, key))),
        }
    }
}

/// Reads a matrix from `<prefix>.inline` or `<prefix>.file` (at most one).
fn take_matrix(
    table: &mut KeyTable,
    prefix: &str,
    base_dir: &Path,
) -> Result<Option<Matrix64>, CliError> {
    let inline = table.take(&format!("{prefix}.inline"));
    let file = table.take(&format!("{prefix}.file"));
    match (inline, file) {
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(config_err(format!(
            "{prefix}: give either .inline or .file, not both"
        ))),
        (Some(v), None) => parse_matrix_inline(&v)
            .map(Some)
            .map_err(|e| config_err(format!("{prefix}.inline: {e}"))),
        (None, Some(path)) => {
            let full: PathBuf = base_dir.join(&path);
            let text = std::fs::read_to_string(&full).map_err(|e| {
                config_err(format!("{prefix}.file: cannot read {}: {e}", full.display()))
            })?;
            io::parse_matrix::<f64>(&text)
                .map(Some)
                .map_err(|e| config_err(format!("{prefix}.file {}: {e}", full.display())))
        }
    }
}

impl StudyConfig {
    /// Parses config text; matrix file references are resolved against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err(format!("line {}: expected 'key = value'", idx + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(config_err(format!("line {}: empty key", idx + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(config_err(format!("line {}: duplicate key '{}'", idx + 1, key)));
            }
        }
        let mut table = KeyTable { entries };

        let kind_str = table
            .take("problem.kind")
            .ok_or_else(|| config_err("missing problem.kind"))?;
        let kind = ProblemKind::parse(&kind_str).map_err(config_err)?;

        let a = take_matrix(&mut table, "problem.A", base_dir)?;
        let b = take_matrix(&mut table, "problem.B", base_dir)?;
        let c = take_matrix(&mut table, "problem.C", base_dir)?;
        let k = take_matrix(&mut table, "problem.K", base_dir)?;

        let eta_breaks = table.take("problem.eta.breakpoints");
        let eta_values = table.take("problem.eta.values");
        let eta_nodes: Option<usize> = table.take_parsed("problem.eta.nodes")?;
        let eta = match (eta_breaks, eta_values) {
            (None, None) => None,
            (bp, vals) => {
                let breakpoints = match bp {
                    Some(s) => parse_f64_list(&s)
                        .map_err(|e| config_err(format!("problem.eta.breakpoints: {e}")))?,
                    None => vec![0.0, 1.0],
                };
                let values = parse_f64_list(&vals.ok_or_else(|| {
                    config_err("problem.eta.values is required with breakpoints")
                })?)
                .map_err(|e| config_err(format!("problem.eta.values: {e}")))?;
                Some(EtaConfig {
                    breakpoints,
                    values,
                    nodes: eta_nodes.unwrap_or(128),
                })
            }
        };

        let dir_a = take_matrix(&mut table, "perturbation.direction.A", base_dir)?;
        let dir_b = take_matrix(&mut table, "perturbation.direction.B", base_dir)?;
        let dir_c = take_matrix(&mut table, "perturbation.direction.C", base_dir)?;
        let dir_eta_breaks = match table.take("perturbation.direction.eta.breakpoints") {
            Some(s) => Some(
                parse_f64_list(&s)
                    .map_err(|e| config_err(format!("perturbation.direction.eta.breakpoints: {e}")))?,
            ),
            None => None,
        };
        let dir_eta_values = match table.take("perturbation.direction.eta.values") {
            Some(s) => Some(
                parse_f64_list(&s)
                    .map_err(|e| config_err(format!("perturbation.direction.eta.values: {e}")))?,
            ),
            None => None,
        };

        let center_re: f64 = table
            .take_parsed("contour.center_re")?
            .ok_or_else(|| config_err("missing contour.center_re"))?;
        let center_im: f64 = table.take_parsed("contour.center_im")?.unwrap_or(0.0);
        let radius: f64 = table
            .take_parsed("contour.radius")?
            .ok_or_else(|| config_err("missing contour.radius"))?;
        let nodes: usize = table.take_parsed("contour.nodes")?.unwrap_or(32);
        if radius.is_nan() || radius <= 0.0 {
            return Err(config_err("contour.radius must be positive"));
        }
        if nodes < 16 || !nodes.is_multiple_of(2) {
            return Err(config_err("contour.nodes must be even and at least 16"));
        }

        let probes: Option<usize> = table.take_parsed("solver.probes")?;
        let seed: u64 = table.take_parsed("solver.seed")?.unwrap_or(0);
        let tol: Option<f64> = table.take_parsed("solver.tol")?;
        if let Some(t) = tol {
            if t.is_nan() || t <= 0.0 {
                return Err(config_err("solver.tol must be positive"));
            }
        }

        let h_schedule = match table.take("study.h") {
            None => vec![],
            Some(s) => {
                let hs = parse_f64_list(&s).map_err(|e| config_err(format!("study.h: {e}")))?;
                if hs.iter().any(|&h| h <= 0.0) {
                    return Err(config_err("study.h entries must be positive"));
                }
                if hs.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(config_err("study.h must be strictly descending"));
                }
                hs
            }
        };

        if let Some((key, _)) = table.entries.iter().next() {
            return Err(config_err(format!("unknown key '{}'", key)));
        }

        let cfg = Self {
            kind,
            a,
            b,
            c,
            k,
            eta,
            direction: DirectionConfig {
                a: dir_a,
                b: dir_b,
                c: dir_c,
                eta_breakpoints: dir_eta_breaks,
                eta_values: dir_eta_values,
            },
            contour: ContourConfig {
                center_re,
                center_im,
                radius,
                nodes,
            },
            solver: SolverConfig { probes, seed, tol },
            h_schedule,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.kind {
            ProblemKind::Resonance1d => {
                if self.eta.is_none() {
                    return Err(config_err("resonance1d needs problem.eta.values"));
                }
                if self.a.is_some() || self.b.is_some() || self.c.is_some() || self.k.is_some() {
                    return Err(config_err("resonance1d takes no problem matrices"));
                }
            }
            _ => {
                if self.eta.is_some() {
                    return Err(config_err("problem.eta.* only applies to resonance1d"));
                }
                if self.a.is_none() {
                    return Err(config_err("missing problem.A"));
                }
                if self.kind != ProblemKind::Generalized && self.k.is_some() {
                    return Err(config_err("problem.K only applies to generalized"));
                }
            }
        }
        Ok(())
    }

    /// Builds the base operator family.
    pub fn build_family(&self) -> Result<OperatorFamily<f64>, CliError> {
        let fam = match self.kind {
            ProblemKind::MatrixPoly => {
                let a = self.a.as_ref().expect("validated");
                let n = a.rows();
                let zero = Matrix64::zeros(n, n);
                let mut coeffs = vec![a.clone()];
                coeffs.push(self.b.clone().unwrap_or_else(|| zero.clone()));
                coeffs.push(self.c.clone().unwrap_or(zero));
                while coeffs.len() > 1
                    && coeffs.last().map(|m| m.frobenius_norm()) == Some(0.0)
                {
                    coeffs.pop();
                }
                OperatorFamily::polynomial(coeffs)
            }
            ProblemKind::Generalized => {
                let a = self.a.as_ref().expect("validated");
                let n = a.rows();
                let zero = Matrix64::zeros(n, n);
                OperatorFamily::generalized(
                    a,
                    self.k.as_ref().unwrap_or(&zero),
                    self.b.as_ref().unwrap_or(&zero),
                )
            }
            ProblemKind::Quadratic => {
                let a = self.a.as_ref().expect("validated");
                let n = a.rows();
                let zero = Matrix64::zeros(n, n);
                OperatorFamily::quadratic(
                    a,
                    self.b.as_ref().unwrap_or(&zero),
                    self.c.as_ref().unwrap_or(&zero),
                )
            }
            ProblemKind::Resonance1d => {
                let eta = self.eta.as_ref().expect("validated");
                let profile = PiecewiseConstant::new(eta.breakpoints.clone(), eta.values.clone())
                    .map_err(|e| config_err(format!("problem.eta: {e}")))?;
                OperatorFamily::resonance_1d(&profile, eta.nodes)
            }
        };
        fam.map_err(|e| config_err(format!("problem not constructible: {e}")))
    }

    /// Builds the direction family (zero when no direction keys are set).
    pub fn build_direction(&self, n: usize) -> Result<OperatorFamily<f64>, CliError> {
        let d = &self.direction;
        if self.kind == ProblemKind::Resonance1d {
            if d.a.is_some() || d.b.is_some() || d.c.is_some() {
                return Err(config_err(
                    "resonance1d perturbations use perturbation.direction.eta.*",
                ));
            }
            let eta = self.eta.as_ref().expect("validated");
            return match (&d.eta_breakpoints, &d.eta_values) {
                (_, None) => Ok(OperatorFamily::zero(n)),
                (bp, Some(values)) => {
                    let breakpoints = bp.clone().unwrap_or_else(|| vec![0.0, 1.0]);
                    let profile = PiecewiseConstant::new(breakpoints, values.clone())
                        .map_err(|e| config_err(format!("perturbation.direction.eta: {e}")))?;
                    OperatorFamily::resonance_1d(&profile, eta.nodes)
                        .map_err(|e| config_err(format!("direction not constructible: {e}")))
                }
            };
        }
        if d.eta_breakpoints.is_some() || d.eta_values.is_some() {
            return Err(config_err(
                "perturbation.direction.eta.* only applies to resonance1d",
            ));
        }
        if d.a.is_none() && d.b.is_none() && d.c.is_none() {
            return Ok(OperatorFamily::zero(n));
        }
        let zero = Matrix64::zeros(n, n);
        let mut coeffs = vec![
            d.a.clone().unwrap_or_else(|| zero.clone()),
            d.b.clone().unwrap_or_else(|| zero.clone()),
            d.c.clone().unwrap_or(zero),
        ];
        while coeffs.len() > 1 && coeffs.last().map(|m| m.frobenius_norm()) == Some(0.0) {
            coeffs.pop();
        }
        OperatorFamily::polynomial(coeffs)
            .map_err(|e| config_err(format!("direction not constructible: {e}")))
    }

    /// Builds the perturbation family `T_0 + h T1`.
    pub fn build_perturbation(&self) -> Result<PerturbationFamily<f64>, CliError> {
        let base = self.build_family()?;
        let dir = self.build_direction(base.dim())?;
        PerturbationFamily::linear(base, dir)
            .map_err(|e| config_err(format!("perturbation: {e}")))
    }

    pub fn build_contour(&self) -> Result<Contour<f64>, CliError> {
        Contour::new(
            C64::new(self.contour.center_re, self.contour.center_im),
            self.contour.radius,
            self.contour.nodes,
        )
        .map_err(|e| config_err(format!("contour: {e}")))
    }

    pub fn probes_for(&self, n: usize) -> usize {
        self.solver.probes.unwrap_or_else(|| default_probes(n))
    }

    /// Canonical `key = value` dump; matrices are inlined so the dump is
    /// self-contained and re-parses to an equivalent study.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("problem.kind", self.kind.name().to_string());
        for (key, m) in [
            ("problem.A.inline", &self.a),
            ("problem.B.inline", &self.b),
            ("problem.C.inline", &self.c),
            ("problem.K.inline", &self.k),
        ] {
            if let Some(m) = m {
                push(key, format_matrix_inline(m));
            }
        }
        if let Some(eta) = &self.eta {
            push("problem.eta.breakpoints", format_f64_list(&eta.breakpoints));
            push("problem.eta.values", format_f64_list(&eta.values));
            push("problem.eta.nodes", eta.nodes.to_string());
        }
        for (key, m) in [
            ("perturbation.direction.A.inline", &self.direction.a),
            ("perturbation.direction.B.inline", &self.direction.b),
            ("perturbation.direction.C.inline", &self.direction.c),
        ] {
            if let Some(m) = m {
                push(key, format_matrix_inline(m));
            }
        }
        if let Some(bp) = &self.direction.eta_breakpoints {
            push("perturbation.direction.eta.breakpoints", format_f64_list(bp));
        }
        if let Some(v) = &self.direction.eta_values {
            push("perturbation.direction.eta.values", format_f64_list(v));
        }
        push("contour.center_re", crate::report::fmt_f64(self.contour.center_re));
        push("contour.center_im", crate::report::fmt_f64(self.contour.center_im));
        push("contour.radius", crate::report::fmt_f64(self.contour.radius));
        push("contour.nodes", self.contour.nodes.to_string());
        if let Some(p) = self.solver.probes {
            push("solver.probes", p.to_string());
        }
        push("solver.seed", self.solver.seed.to_string());
        if let Some(t) = self.solver.tol {
            push("solver.tol", crate::report::fmt_f64(t));
        }
        if !self.h_schedule.is_empty() {
            push("study.h", format_f64_list(&self.h_schedule));
        }
        out
    }
}
