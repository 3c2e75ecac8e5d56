//! Regression, mediation and moderation.

use crate::SurveyError;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Two-sided p-value of a t statistic.
pub fn t_test_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t.is_nan() {
        return 1.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Two-sided p-value of a standard normal statistic.
pub fn z_test_p(z: f64) -> f64 {
    if z.is_infinite() {
        return 0.0;
    }
    if z.is_nan() {
        return 1.0;
    }
    let dist = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * dist.sf(z.abs())).min(1.0)
}

/// Keeps the pairs where both values are present.
pub fn complete_pairs(x: &[Option<f64>], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some((((*a)?), (*b)?)))
        .unzip()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub p_value: f64,
    pub n: usize,
    pub slope_se: f64,
    /// Slope after standardizing both variables; equals `pearson_r`.
    pub standardized_slope: f64,
}

/// Simple least squares of `y` on `x` with a t-test on r (df = n - 2).
pub fn regress(x: &[f64], y: &[f64]) -> Result<RegressionResult, SurveyError> {
    assert_eq!(x.len(), y.len(), "paired samples");
    let n = x.len();
    if n < 3 {
        return Err(SurveyError::TooFewPairs { needed: 3, got: n });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(SurveyError::ZeroVariance);
    }
    let slope = sxy / sxx;
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let one_minus = 1.0 - r * r;
    let (t, rss) = if one_minus <= 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        (r * (df / one_minus).sqrt(), (syy - slope * sxy).max(0.0))
    };
    Ok(RegressionResult {
        slope,
        intercept: my - slope * mx,
        pearson_r: r,
        p_value: t_test_p(t, df),
        n,
        slope_se: (rss / df / sxx).sqrt(),
        standardized_slope: r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    /// Intercept first, then one coefficient per predictor.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub df: usize,
    pub r_squared: f64,
}

/// Least squares with intercept. Rank-deficient designs are rejected.
pub fn ols(y: &[f64], predictors: &[&[f64]]) -> Result<OlsFit, SurveyError> {
    let n = y.len();
    let p = predictors.len() + 1;
    if n <= p {
        return Err(SurveyError::TooFewPairs { needed: p + 1, got: n });
    }
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { predictors[j - 1][i] });
    let yv = DVector::from_column_slice(y);

    let svd = x.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if max == 0.0 || min <= max * 1e-10 {
        return Err(SurveyError::ZeroVariance);
    }
    let xtx_inv = (x.transpose() * &x)
        .try_inverse()
        .ok_or(SurveyError::ZeroVariance)?;
    let beta = &xtx_inv * x.transpose() * &yv;
    let resid = &yv - &x * &beta;
    let rss = resid.norm_squared();
    let my = mean(y);
    let tss: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let df = n - p;
    let sigma2 = rss / df as f64;

    let mut std_errors = Vec::with_capacity(p);
    let mut t_values = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for j in 0..p {
        let se = (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt();
        let t = if se > 0.0 {
            beta[j] / se
        } else if beta[j].abs() > 1e-12 {
            f64::INFINITY
        } else {
            0.0
        };
        std_errors.push(se);
        t_values.push(t);
        p_values.push(t_test_p(t, df as f64));
    }
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_values,
        p_values,
        df,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Paths {
    /// X to M.
    pub a: f64,
    /// M to Y controlling for X.
    pub b: f64,
    /// Total effect of X on Y.
    pub c: f64,
    /// Direct effect of X on Y controlling for M.
    pub c_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediationResult {
    pub paths: Paths,
    pub se_a: f64,
    pub se_b: f64,
    pub sobel_z: f64,
    pub sobel_p: f64,
    pub n: usize,
    /// The same paths on z-scored variables.
    pub standardized: Paths,
}

fn standardize(v: &[f64]) -> Vec<f64> {
    let m = mean(v);
    let sd = (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
    v.iter().map(|x| (x - m) / sd).collect()
}

fn paths(x: &[f64], m: &[f64], y: &[f64]) -> Result<(Paths, f64, f64), SurveyError> {
    let mx = regress(x, m)?;
    let total = regress(x, y)?;
    let fit = ols(y, &[x, m])?;
    Ok((
        Paths {
            a: mx.slope,
            b: fit.coefficients[2],
            c: total.slope,
            c_prime: fit.coefficients[1],
        },
        mx.slope_se,
        fit.std_errors[2],
    ))
}

/// Single-mediator model with a Sobel test of the indirect effect a·b.
pub fn mediation(x: &[f64], m: &[f64], y: &[f64]) -> Result<MediationResult, SurveyError> {
    assert!(x.len() == m.len() && m.len() == y.len(), "paired samples");
    let n = x.len();
    if n < 4 {
        return Err(SurveyError::TooFewPairs { needed: 4, got: n });
    }
    let (raw, se_a, se_b) = paths(x, m, y)?;
    let (standardized, _, _) = paths(&standardize(x), &standardize(m), &standardize(y))?;
    let (a, b) = (raw.a, raw.b);
    let denom = (b * b * se_a * se_a + a * a * se_b * se_b).sqrt();
    let sobel_z = if denom > 0.0 {
        a * b / denom
    } else if a * b == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MediationResult {
        paths: raw,
        se_a,
        se_b,
        sobel_z,
        sobel_p: z_test_p(sobel_z),
        n,
        standardized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModerationResult {
    pub x_slope: f64,
    pub w_slope: f64,
    pub interaction_slope: f64,
    pub interaction_se: f64,
    pub interaction_p: f64,
    pub n: usize,
}

/// Least squares of Y on centered X, centered W and their product.
pub fn moderation(x: &[f64], w: &[f64], y: &[f64]) -> Result<ModerationResult, SurveyError> {
    assert!(x.len() == w.len() && w.len() == y.len(), "paired samples");
    let n = x.len();
    if n < 5 {
        return Err(SurveyError::TooFewPairs { needed: 5, got: n });
    }
    let (mx, mw) = (mean(x), mean(w));
    let xc: Vec<f64> = x.iter().map(|v| v - mx).collect();
    let wc: Vec<f64> = w.iter().map(|v| v - mw).collect();
    let xw: Vec<f64> = xc.iter().zip(&wc).map(|(a, b)| a * b).collect();
    let fit = ols(y, &[&xc, &wc, &xw])?;
    Ok(ModerationResult {
        x_slope: fit.coefficients[1],
        w_slope: fit.coefficients[2],
        interaction_slope: fit.coefficients[3],
        interaction_se: fit.std_errors[3],
        interaction_p: fit.p_values[3],
        n,
    })
}
