use crate::BenchError;

/// Least-squares line through `(ln n, ln measure)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult, BenchError> {
    if let Some(&(n, m)) = points.iter().find(|&&(n, m)| !(n > 0.0 && m > 0.0)) {
        return Err(BenchError::FitDomain(format!(
            "point ({n}, {m}) is not positive"
        )));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 2 {
        return Err(BenchError::FitDomain(
            "need at least two distinct n values".into(),
        ));
    }

    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();

    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// `base / variant`: how many times faster the variant ran.
pub fn speedup(base: f64, variant: f64) -> Result<f64, BenchError> {
    if !(base > 0.0 && variant > 0.0) {
        return Err(BenchError::FitDomain(format!(
            "speedup needs positive times, got {base} and {variant}"
        )));
    }
    Ok(base / variant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quartic() {
        let c = 3.7e-9;
        let pts: Vec<_> = [50.0f64, 100.0, 200.0]
            .iter()
            .map(|&n| (n, c * n.powi(4)))
            .collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-9);
        assert!((fit.intercept - c.ln()).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.predict(400.0) / (c * 400f64.powi(4)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_square_two_points() {
        let fit = fit_exponent(&[(50.0, 2500.0), (100.0, 10000.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_n_values_are_fine() {
        let fit = fit_exponent(&[(10.0, 100.0), (10.0, 100.0), (20.0, 400.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(fit_exponent(&[]).is_err());
        assert!(fit_exponent(&[(10.0, 1.0), (10.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 1.0), (20.0, 0.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 1.0), (20.0, f64::NAN)]).is_err());
        assert!(fit_exponent(&[(0.0, 1.0), (20.0, 1.0)]).is_err());
    }

    #[test]
    fn speedups() {
        assert!((speedup(10.0, 5.714).unwrap() - 1.75).abs() < 1e-3);
        assert_eq!(speedup(2.5, 2.5).unwrap(), 1.0);
        assert!(speedup(0.0, 1.0).is_err());
        assert!(speedup(1.0, -1.0).is_err());
    }
}
