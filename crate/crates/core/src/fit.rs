//! Ordinary least-squares line fits, used for exponential decay lengths
//! (fit of `log y` against distance) and growth slopes.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} abscissae, {} ordinates",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::UndefinedFit(format!("{n} points")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LineFit {
        slope,
        intercept,
        r2,
        points: n,
    })
}

/// Fit of `log y = a - x / xi` over the points with `y > floor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub length: f64,
    pub fit: LineFit,
}

pub fn exponential_decay(x: &[f64], y: &[f64], floor: f64) -> Result<DecayFit> {
    let (xs, ls): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > floor)
        .map(|(&a, &v)| (a, v.ln()))
        .unzip();
    let fit = linear_fit(&xs, &ls)?;
    let length = if fit.slope < 0.0 {
        -1.0 / fit.slope
    } else {
        f64::INFINITY
    };
    Ok(DecayFit { length, fit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decay_length_of_exponential() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| (-v / 3.0).exp()).collect();
        let d = exponential_decay(&x, &y, 1e-12).unwrap();
        assert!((d.length - 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            linear_fit(&[1.0], &[2.0]),
            Err(Error::UndefinedFit(_))
        ));
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(exponential_decay(&[0.0, 1.0], &[0.0, 0.0], 1e-12).is_err());
    }
}
