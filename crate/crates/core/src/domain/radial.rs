//! Partial derivatives of radial functions `x -> F(|x - c|^2)`.
//!
//! Since `s(y) = |y|^2` has vanishing third derivatives, Faa di Bruno's formula
//! reduces to a sum over set partitions of the differentiation axes into
//! singletons (contributing `2 y_i`) and pairs (contributing `2 delta_ij`):
//!
//! `d_{i1..im} F(s) = sum_P F^{(|P|)}(s) * prod_{B in P} c_B`.

/// Highest derivative order handled here.
pub const MAX_ORDER: usize = 3;

/// Expands a multi-index into the list of axes it differentiates along,
/// e.g. `(2, 1)` into `[0, 0, 1]`.
pub fn axes_of(alpha: &[usize]) -> Vec<usize> {
    alpha
        .iter()
        .enumerate()
        .flat_map(|(axis, &k)| std::iter::repeat_n(axis, k))
        .collect()
}

/// Evaluates `d_alpha F(|y|^2)` given `derivs[j] = F^{(j)}(|y|^2)` for `j <= |alpha|`.
pub fn partial(derivs: &[f64], y: &[f64], axes: &[usize]) -> f64 {
    debug_assert!(axes.len() <= MAX_ORDER && derivs.len() > axes.len());
    partitions(axes, 0, 1.0, derivs, y)
}

fn partitions(rest: &[usize], blocks: usize, weight: f64, derivs: &[f64], y: &[f64]) -> f64 {
    let Some((&first, tail)) = rest.split_first() else {
        return derivs[blocks] * weight;
    };
    let mut total = partitions(tail, blocks + 1, weight * 2.0 * y[first], derivs, y);
    for (k, &other) in tail.iter().enumerate() {
        if other == first {
            let mut remaining = tail.to_vec();
            remaining.remove(k);
            total += partitions(&remaining, blocks + 1, weight * 2.0, derivs, y);
        }
    }
    total
}

/// `F(s) = s^q` and its first three derivatives.
pub fn power_derivs(s: f64, q: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    let mut coeff = 1.0;
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = coeff * s.powf(q - j as f64);
        coeff *= q - j as f64;
    }
    out
}

/// `F(s) = exp(-1 / (1 - s / r^2))` for `s < r^2`, zero otherwise, and its
/// first three derivatives.
pub fn bump_derivs(s: f64, r: f64) -> [f64; 4] {
    let r2 = r * r;
    let u = 1.0 - s / r2;
    if u <= 0.0 {
        return [0.0; 4];
    }
    let h = (-1.0 / u).exp();
    let iu = 1.0 / u;
    let iu2 = iu * iu;
    let iu3 = iu2 * iu;
    let iu4 = iu2 * iu2;
    let h1 = iu2 * h;
    let h2 = (iu4 - 2.0 * iu3) * h;
    let h3 = (iu4 * iu2 - 6.0 * iu4 * iu + 6.0 * iu4) * h;
    let c = -1.0 / r2;
    [h, c * h1, c * c * h2, c * c * c * h3]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump1(x: f64) -> f64 {
        bump_derivs(x * x, 0.7)[0]
    }

    fn fd(f: impl Fn(f64) -> f64, x: f64, order: usize) -> f64 {
        let h = 1e-3;
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => {
                (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn bump_partials_match_finite_differences_1d() {
        for &x in &[-0.5, -0.2, 0.0, 0.13, 0.4] {
            let d = bump_derivs(x * x, 0.7);
            for order in 1..=3 {
                let exact = partial(&d, &[x], &vec![0; order]);
                let approx = fd(bump1, x, order);
                assert!(
                    (exact - approx).abs() < 1e-3 * (1.0 + approx.abs()),
                    "x={x} order={order}: {exact} vs {approx}"
                );
            }
        }
    }

    #[test]
    fn mixed_partials_2d_match_finite_differences() {
        let f = |x: f64, y: f64| bump_derivs(x * x + y * y, 0.9)[0];
        let (x, y) = (0.21, -0.33);
        let d = bump_derivs(x * x + y * y, 0.9);
        let h = 1e-4;
        let dxy =
            (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
        let exact = partial(&d, &[x, y], &[0, 1]);
        assert!((exact - dxy).abs() < 1e-5, "{exact} vs {dxy}");
    }

    #[test]
    fn abs_has_sign_derivative_and_zero_curvature() {
        // |y| = s^(1/2)
        let x = -0.3;
        let d = power_derivs(x * x, 0.5);
        assert!((partial(&d, &[x], &[0]) + 1.0).abs() < 1e-14);
        assert!(partial(&d, &[x], &[0, 0]).abs() < 1e-12);
    }

    #[test]
    fn axes_expansion() {
        assert_eq!(axes_of(&[2, 1]), vec![0, 0, 1]);
        assert_eq!(axes_of(&[0]), Vec::<usize>::new());
    }
}
