//! Small numerical helpers shared by the exponent and slope fits.

/// Ordinary least-squares line `y ≈ slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`; `1` when `y` is
    /// constant.
    pub r_squared: f64,
}

/// Least-squares fit; needs at least two distinct `x` values.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Some(LineFit { slope, intercept, r_squared })
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Geometrically spaced integer sample sizes from `lo` to `hi`, rounded and
/// deduplicated.
pub fn log_spaced_sizes(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let mut out: Vec<usize> = log_spaced(lo as f64, hi as f64, count)
        .into_iter()
        .map(|v| v.round() as usize)
        .collect();
    out.dedup();
    out
}

/// Mean and standard error of the mean (sample standard deviation over
/// `√m`; zero for a single value).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert_abs_diff_eq!(f.slope, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.intercept, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.r_squared, 1.0, epsilon = 1e-15);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }

    #[test]
    fn spacing() {
        assert_eq!(log_spaced_sizes(100, 10_000, 8), vec![100, 193, 373, 720, 1389, 2683, 5179, 10_000]);
        let t = log_spaced(1e-3, 1.0, 4);
        assert_abs_diff_eq!(t[1], 1e-2, epsilon = 1e-15);
        assert_eq!(t[3], 1.0);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_and_stderr(&[2.0, 2.0, 2.0]), (2.0, 0.0));
        let (m, s) = mean_and_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-15);
    }
}
