//! Evaluation metrics: Fréchet Distance between Gaussian moment fits,
//! box-plot statistics, total-variation distance, and bar-image validity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sample mean and unbiased sample covariance (denominator n - 1) of a set
/// of vectors.
pub fn gaussian_fit(samples: &[Vec<f64>]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if samples.len() < 2 {
        return Err(Error::EmptyInput("moment fit needs at least two samples".into()));
    }
    let dim = samples[0].len();
    if dim == 0 {
        return Err(Error::EmptyInput("zero-dimensional samples".into()));
    }
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch {
            context: "ragged sample set in moment fit".into(),
        });
    }
    if samples.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sample set for moment fit".into()));
    }
    let n = samples.len() as f64;
    let mut mean = DVector::zeros(dim);
    for s in samples {
        for (m, &x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean /= n;
    let mut cov = DMatrix::zeros(dim, dim);
    for s in samples {
        let d = DVector::from_iterator(dim, s.iter().cloned()) - &mean;
        cov += &d * d.transpose();
    }
    cov /= n - 1.0;
    Ok((mean, cov))
}

/// Matrix square root of a symmetric positive semi-definite matrix via its
/// eigendecomposition. Small negative eigenvalues from round-off are clipped
/// to zero; eigenvalues below -1e-8 are rejected.
fn sqrtm_psd(mat: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    let sym = (mat + mat.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut roots = eig.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v < -1e-8 {
            return Err(Error::InvalidProbabilities {
                context: format!("{context}: eigenvalue {v} is significantly negative"),
            });
        }
        *v = v.max(0.0).sqrt();
    }
    let d = DMatrix::from_diagonal(&roots);
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Fréchet Distance between the Gaussian fits of two sample sets:
/// FD^2 = |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}).
pub fn fd_score(real: &[Vec<f64>], fake: &[Vec<f64>]) -> Result<f64> {
    let (mu1, s1) = gaussian_fit(real)?;
    let (mu2, s2) = gaussian_fit(fake)?;
    if mu1.len() != mu2.len() {
        return Err(Error::DimensionMismatch {
            context: format!("sample dimensions {} vs {}", mu1.len(), mu2.len()),
        });
    }
    let diff = &mu1 - &mu2;
    let s1_root = sqrtm_psd(&s1, "first covariance")?;
    let inner = &s1_root * &s2 * &s1_root;
    let cross = sqrtm_psd(&inner, "covariance product")?;
    let fd2 = diff.norm_squared() + (s1 + s2 - 2.0 * cross).trace();
    Ok(fd2.max(0.0).sqrt())
}

/// Five-number summary with outliers flagged by the 1.5 IQR rule.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Linear-interpolation quantile (the convention used by numpy's default and
/// R's type 7) on a sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("box statistics over zero values".into()));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("box statistics input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_low = q1 - 1.5 * iqr;
    let fence_high = q3 + 1.5 * iqr;
    let inliers: Vec<f64> = sorted.iter().cloned().filter(|&x| x >= fence_low && x <= fence_high).collect();
    let outliers: Vec<f64> = sorted.iter().cloned().filter(|&x| x < fence_low || x > fence_high).collect();
    let whisker_low = inliers.first().copied().unwrap_or(q1);
    let whisker_high = inliers.last().copied().unwrap_or(q3);
    Ok(BoxStats {
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        whisker_low,
        whisker_high,
        outliers,
    })
}

/// Total-variation distance between two distributions over the same support:
/// TV = 0.5 * sum_i |p_i - q_i|.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            context: format!("distributions of length {} vs {}", p.len(), q.len()),
        });
    }
    if p.is_empty() {
        return Err(Error::EmptyInput("total-variation over empty support".into()));
    }
    for (name, dist) in [("first", p), ("second", q)] {
        let sum: f64 = dist.iter().sum();
        if dist.iter().any(|&x| !x.is_finite() || x < -1e-12) || (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidProbabilities {
                context: format!("{name} distribution (sum {sum})"),
            });
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Per-image diagnostics for an m x m gray-scale bar image.
#[derive(Clone, Debug)]
pub struct BarReport {
    /// Pixel sum of each of the m columns.
    pub column_sums: Vec<f64>,
    /// Total mass outside the two bar pixels (first-column rows 0 and 1).
    pub off_band_mass: f64,
    /// Both bar pixels inside the sampling band [0.4, 0.6] widened by the
    /// tolerance used.
    pub in_range: bool,
}

/// Diagnose one bar image: a valid bar puts pixel (0,0) in unif(0.4, 0.6),
/// pixel (1,0) at its complement, and zero everywhere else. `band_tol`
/// widens the [0.4, 0.6] band on both sides.
pub fn bar_report(image: &[f64], m: usize, band_tol: f64) -> Result<BarReport> {
    if m < 2 || image.len() != m * m {
        return Err(Error::DimensionMismatch {
            context: format!("bar image with {} pixels for side {m}", image.len()),
        });
    }
    let column_sums: Vec<f64> = (0..m).map(|c| (0..m).map(|r| image[r * m + c]).sum()).collect();
    let top = image[0];
    let bottom = image[m];
    let off_band_mass: f64 = image.iter().sum::<f64>() - top - bottom;
    let in_band = |x: f64| (0.4 - band_tol..=0.6 + band_tol).contains(&x);
    Ok(BarReport { column_sums, off_band_mass, in_range: in_band(top) && in_band(bottom) })
}

/// Aggregate validity over generated 2x2 bar images.
#[derive(Clone, Debug)]
pub struct BarValidity {
    pub fraction_valid: f64,
    pub mean_off_band: f64,
}

/// An image passes when its bar report is in range at `band_tol` and its
/// off-band mass does not exceed `mass_tol`; `mean_off_band` averages the
/// off-band mass over all images.
pub fn bar_validity(images: &[Vec<f64>], band_tol: f64, mass_tol: f64) -> Result<BarValidity> {
    if images.is_empty() {
        return Err(Error::EmptyInput("bar validity over zero images".into()));
    }
    let mut valid = 0usize;
    let mut off_band = 0.0;
    for img in images {
        let report = bar_report(img, 2, band_tol)?;
        off_band += report.off_band_mass;
        if report.in_range && report.off_band_mass <= mass_tol {
            valid += 1;
        }
    }
    Ok(BarValidity {
        fraction_valid: valid as f64 / images.len() as f64,
        mean_off_band: off_band / images.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    #[test]
    fn gaussian_fit_hand_case() {
        let samples = vec![vec![1.0, 0.0], vec![3.0, 4.0]];
        let (mu, cov) = gaussian_fit(&samples).unwrap();
        assert_abs_diff_eq!(mu[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mu[1], 2.0, epsilon = 1e-14);
        // Deviations (+-1, +-2) over n - 1 = 1: var = 2 and 8, cov = 4.
        assert_abs_diff_eq!(cov[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cov[(1, 1)], 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cov[(0, 1)], 4.0, epsilon = 1e-14);
    }

    #[test]
    fn fd_identical_sets_is_zero() {
        let mut r = rng::stream(7, 0);
        let samples: Vec<Vec<f64>> = (0..50).map(|_| (0..4).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        let fd = fd_score(&samples, &samples.clone()).unwrap();
        assert!(fd < 1e-6, "fd = {fd}");
    }

    #[test]
    fn fd_mean_shift_closed_form() {
        // Same covariance, mean shifted by delta: FD = |delta|.
        let mut r = rng::stream(8, 0);
        let base: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let delta = [0.5, -0.25, 1.0];
        let shifted: Vec<Vec<f64>> = base
            .iter()
            .map(|s| s.iter().zip(&delta).map(|(x, d)| x + d).collect())
            .collect();
        let expected = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        assert_abs_diff_eq!(fd_score(&base, &shifted).unwrap(), expected, epsilon = 1e-8);
    }

    #[test]
    fn fd_diagonal_covariance_closed_form() {
        // For diagonal covariances the trace term decouples per coordinate:
        // FD^2 = sum_i (mu1_i - mu2_i)^2 + (s1_i - s2_i)^2 with s = std dev.
        // Construct exact two-point sets per coordinate independently.
        let set1 = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0], vec![0.0, -2.0]];
        let set2 = vec![vec![2.0, 0.0], vec![-2.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let (mu1, s1) = gaussian_fit(&set1).unwrap();
        let (mu2, s2) = gaussian_fit(&set2).unwrap();
        let expected2 = (&mu1 - &mu2).norm_squared()
            + (s1[(0, 0)].sqrt() - s2[(0, 0)].sqrt()).powi(2)
            + (s1[(1, 1)].sqrt() - s2[(1, 1)].sqrt()).powi(2);
        assert_abs_diff_eq!(fd_score(&set1, &set2).unwrap(), expected2.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn fd_is_symmetric() {
        let mut r = rng::stream(9, 0);
        let a: Vec<Vec<f64>> = (0..60).map(|_| (0..4).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        let b: Vec<Vec<f64>> = (0..60).map(|_| (0..4).map(|_| r.gen_range(0.5..1.5)).collect()).collect();
        let ab = fd_score(&a, &b).unwrap();
        let ba = fd_score(&b, &a).unwrap();
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-9);
    }

    #[test]
    fn fd_handles_degenerate_covariance() {
        // All-identical samples: zero covariance must not produce NaN.
        let a = vec![vec![0.5, 0.5]; 10];
        let b = vec![vec![0.7, 0.3]; 10];
        let fd = fd_score(&a, &b).unwrap();
        let expected = ((0.2f64).powi(2) * 2.0).sqrt();
        assert_abs_diff_eq!(fd, expected, epsilon = 1e-10);
    }

    #[test]
    fn sqrtm_squares_back() {
        let mut r = rng::stream(10, 0);
        let a = DMatrix::from_fn(4, 4, |_, _| r.gen_range(-1.0..1.0));
        let psd = &a * a.transpose();
        let root = sqrtm_psd(&psd, "test").unwrap();
        let back = &root * &root;
        assert!((back - psd).norm() < 1e-9);
    }

    #[test]
    fn quantiles_match_hand_computation() {
        // Values 1..=5: type-7 quartiles are 2, 3, 4.
        let s = box_stats(&[5.0, 3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_abs_diff_eq!(s.q1, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.median, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.q3, 4.0, epsilon = 1e-14);
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn quantile_interpolation() {
        // Values 1..=4: q1 at position 0.75 -> 1.75.
        let s = box_stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(s.q1, 1.75, epsilon = 1e-14);
        assert_abs_diff_eq!(s.median, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.q3, 3.25, epsilon = 1e-14);
    }

    #[test]
    fn outlier_detection() {
        let mut vals = vec![10.0, 11.0, 12.0, 13.0, 14.0];
        vals.push(100.0);
        let s = box_stats(&vals).unwrap();
        assert_eq!(s.outliers, vec![100.0]);
        assert_abs_diff_eq!(s.whisker_high, 14.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.max, 100.0, epsilon = 1e-14);
    }

    #[test]
    fn tv_basic_properties() {
        let p = [0.5, 0.5];
        let q = [1.0, 0.0];
        assert_abs_diff_eq!(tv_distance(&p, &q).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(tv_distance(&p, &p).unwrap(), 0.0, epsilon = 1e-14);
        // Disjoint supports give TV = 1.
        assert_abs_diff_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn tv_rejects_unnormalized() {
        assert!(tv_distance(&[0.5, 0.4], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn bar_validity_accepts_exact_bars() {
        // Boundary values 0.4 and 0.6 count as valid at tolerance 0.
        let images: Vec<Vec<f64>> = [0.4, 0.45, 0.5, 0.6]
            .iter()
            .map(|&a| vec![a, 0.0, 1.0 - a, 0.0])
            .collect();
        let v = bar_validity(&images, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(v.fraction_valid, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.mean_off_band, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn bar_validity_rejects_off_band_and_leaked_mass() {
        let images = vec![
            vec![0.9, 0.0, 0.1, 0.0],   // bar pixels outside the band
            vec![0.45, 0.2, 0.35, 0.0], // too much mass off the bar column
            vec![0.5, 0.02, 0.43, 0.05], // valid at the trained-model tolerance
            vec![0.25, 0.25, 0.25, 0.25], // uniform image is not a bar
        ];
        let v = bar_validity(&images, 0.05, 0.15).unwrap();
        assert_abs_diff_eq!(v.fraction_valid, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(v.mean_off_band, (0.0 + 0.2 + 0.07 + 0.5) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn bar_report_diagnostics() {
        let r = bar_report(&[0.45, 0.0, 0.55, 0.0], 2, 0.0).unwrap();
        assert!(r.in_range);
        assert_abs_diff_eq!(r.off_band_mass, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.column_sums[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.column_sums[1], 0.0, epsilon = 1e-14);
        assert!(bar_report(&[0.1; 4], 3, 0.0).is_err());
    }
}
