//! Deterministic CSV assembly: shortest round-trip decimal formatting,
//! LF line endings, no trailing separators, all-or-nothing emission.

/// Shortest round-trip decimal form of a double; NaN prints as `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{}", x)
    }
}

pub fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Builds a CSV block from a header and rows.
pub fn csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Least-squares slope of `log10(err)` against `log10(h)` over the entries
/// with positive error; NaN when fewer than two such entries exist.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0)
        .map(|(h, e)| (h.log10(), e.log10()))
        .collect();
    if logs.len() < 2 {
        return f64::NAN;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip_and_nan() {
        for &x in &[1.0, -0.5, 1.2360679774997896, 1e-300, 2.2e-16, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn slope_of_exact_quadratic() {
        let pts: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&h| (h, 3.0 * h * h))
            .collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[(1e-1, 0.0)]).is_nan());
    }
}
