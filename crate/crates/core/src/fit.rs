//! Log-log least squares for empirical growth exponents.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    /// Slope of the least-squares line through (ln x, ln y): the empirical
    /// exponent.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Fits ln y = slope * ln x + intercept. Needs at least 3 points, all with
/// positive coordinates.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(usable.len()));
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < f64::EPSILON * n * sxx.max(1.0) {
        return Err(Error::InsufficientData(usable.len()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = usable
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&n| (n, n * n))
            .collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn constant_is_slope_zero() {
        let pts = vec![(1.0, 5.0), (10.0, 5.0), (100.0, 5.0)];
        let fit = fit_exponent(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!((fit.intercept - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(Error::InsufficientData(2))
        ));
        // Nonpositive points do not count.
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 2.0), (0.0, 3.0)]),
            Err(Error::InsufficientData(2))
        ));
        // Identical x gives a degenerate system.
        assert!(fit_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }
}
