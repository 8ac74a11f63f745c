//! Small numeric helpers shared by the convergence checks.

/// Least-squares slope of `ln y` against `ln x`.
///
/// Pairs with a non-positive or non-finite coordinate are skipped; `None`
/// when fewer than two usable pairs remain.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Rank of a dense row-major matrix by Gaussian elimination with partial
/// pivoting; entries below `tol * max|a|` count as zero.
pub fn matrix_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cut = tol * scale;
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let (pivot, best) = (rank..m)
            .map(|r| (r, a[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= cut {
            continue;
        }
        a.swap(rank, pivot);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[col] / pivot_row[col];
            if factor != 0.0 {
                for (x, p) in row[col..n].iter_mut().zip(&pivot_row[col..n]) {
                    *x -= factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((fit_loglog_slope(&x, &y).unwrap() + 1.5).abs() < 1e-12);
        assert_eq!(fit_loglog_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(matrix_rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-12), 1);
        assert_eq!(matrix_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-12), 2);
        assert_eq!(matrix_rank(&[vec![0.0, 0.0]], 1e-12), 0);
        assert_eq!(matrix_rank(&[], 1e-12), 0);
    }
}
