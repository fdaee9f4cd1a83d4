use crate::error::{Error, Result};

/// 1-based ranks; tied values share the average of the ranks they span.
pub fn rank_with_ties(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot rank an empty sequence".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("cannot rank non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    Ok(ranks)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("correlation inputs must be finite".into()));
    }
    // A constant side is reported ahead of a short input: it is the reason
    // no amount of extra pairs with the same values would help.
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if !x.is_empty() && (constant(x) || constant(y)) {
        return Err(Error::UndefinedCorrelation("one of the sequences is constant".into()));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn pearson_unchecked(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("one of the sequences is constant".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson linear correlation coefficient.
pub fn plcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson_unchecked(x, y)
}

/// Spearman rank-order correlation: Pearson correlation of tie-averaged
/// ranks.
pub fn srcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson_unchecked(&rank_with_ties(x)?, &rank_with_ties(y)?)
}

/// Sample median; even lengths average the two middle values.
pub fn median_of(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("median of an empty sequence".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Ok(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(rank_with_ties(&[10.0, 20.0, 30.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(rank_with_ties(&[1.0, 2.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(rank_with_ties(&[7.0, 7.0]).unwrap(), vec![1.5, 1.5]);
        assert_eq!(
            rank_with_ties(&[3.0, 1.0, 3.0, 2.0, 3.0]).unwrap(),
            vec![4.0, 1.0, 4.0, 2.0, 4.0]
        );
        assert!(rank_with_ties(&[]).is_err());
    }

    #[test]
    fn srcc_examples() {
        let x = [0.5, 1.0, 2.0, 3.0, 7.0];
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert_eq!(srcc(&x, &sq).unwrap(), 1.0);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert_eq!(srcc(&x, &rev).unwrap(), -1.0);
        let r = srcc(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((r - 4.5 / 22.5f64.sqrt()).abs() < 1e-12);
        assert!((r - 0.948683).abs() < 1e-6);
    }

    #[test]
    fn plcc_examples() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let affine: Vec<f64> = x.iter().map(|v| 3.0 * v + 2.0).collect();
        assert!((plcc(&x, &affine).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((plcc(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!((plcc(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(
            srcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            plcc(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            plcc(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(plcc(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median_of(&[1.0, 3.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median_of(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median_of(&[-0.25]).unwrap(), -0.25);
        assert!(median_of(&[]).is_err());
    }
}
