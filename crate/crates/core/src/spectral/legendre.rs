//! Continuous basis `Q_m(s) = K_m P'_{2m-1}(1 - s)` on `[0, 2]`, even about `s = 1`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{ChainError, Result};

/// `P_r^{(i)}(x)` for `i = 0 ..= order`.
pub fn legendre_derivatives(r: usize, x: f64, order: usize) -> Vec<f64> {
    // rows: derivative order; columns roll over degree
    let mut prev = vec![0.0; order + 1];
    let mut cur = vec![0.0; order + 1];
    prev[0] = 1.0;
    if r == 0 {
        return prev;
    }
    cur[0] = x;
    if order >= 1 {
        cur[1] = 1.0;
    }
    for d in 1..r {
        let df = d as f64;
        let mut next = vec![0.0; order + 1];
        next[0] = ((2.0 * df + 1.0) * x * cur[0] - df * prev[0]) / (df + 1.0);
        for i in 1..=order {
            next[i] = prev[i] + (2.0 * df + 1.0) * cur[i - 1];
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `K_m = sqrt((4m - 1) / (2m (2m - 1)))`.
pub fn normalization(m: usize) -> f64 {
    let m = m as f64;
    ((4.0 * m - 1.0) / (2.0 * m * (2.0 * m - 1.0))).sqrt()
}

fn check_mode(m: usize) -> Result<()> {
    if m < 1 {
        return Err(ChainError::Domain("mode index m must be at least 1".into()));
    }
    Ok(())
}

/// `Q_m^{(j)}(s)` at each point of `s`.
pub fn basis_q_derivative(m: usize, j: usize, s: &[f64]) -> Result<Vec<f64>> {
    check_mode(m)?;
    let k = normalization(m);
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(s
        .iter()
        .map(|&s| sign * k * legendre_derivatives(2 * m - 1, 1.0 - s, j + 1)[j + 1])
        .collect())
}

/// `Q_m(s)` at each point of `s`.
pub fn basis_big_q(m: usize, s: &[f64]) -> Result<Vec<f64>> {
    basis_q_derivative(m, 0, s)
}

/// `r_mj = (2m+j)! / ((2m-j-2)! 2m (2m-1))`, zero when `2m - j - 2 < 0`.
pub fn r_coefficient(m: usize, j: usize) -> f64 {
    if m == 0 || 2 * m < j + 2 {
        return 0.0;
    }
    let mut p = 1.0;
    for i in (2 * m - j - 1)..=(2 * m + j) {
        p *= i as f64;
    }
    p / (2.0 * m as f64 * (2.0 * m as f64 - 1.0))
}

fn rule(points: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("positive"))
}

/// `∫₀¹ ρ(s)^{j+1} f(s) ds`, `ρ(s) = s (2 - s)`, with a Gauss-Legendre rule of `points` nodes.
pub fn weighted_integral<F>(j: usize, points: usize, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    rule(points).integrate(0.0, 1.0, |s| (s * (2.0 - s)).powi(j as i32 + 1) * f(s))
}

/// `⟨⟨Q_l, Q_m⟩⟩_{ρ,j}` by quadrature (exact for polynomials of this degree).
pub fn inner_by_quadrature(l: usize, m: usize, j: usize) -> Result<f64> {
    check_mode(l)?;
    check_mode(m)?;
    let points = 2 * (l + m) + j + 4;
    let kl = normalization(l);
    let km = normalization(m);
    Ok(weighted_integral(j, points, |s| {
        let a = kl * legendre_derivatives(2 * l - 1, 1.0 - s, j + 1)[j + 1];
        let b = km * legendre_derivatives(2 * m - 1, 1.0 - s, j + 1)[j + 1];
        a * b
    }))
}

/// `A_m = ∫₀¹ ρ θ Q_m ds` for `m = 1 ..= m_max`.
pub fn project_function<F>(theta: F, m_max: usize, points: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    (1..=m_max)
        .map(|m| {
            let k = normalization(m);
            weighted_integral(0, points, |s| theta(s) * k * legendre_derivatives(2 * m - 1, 1.0 - s, 1)[1])
        })
        .collect()
}

/// `Σ_m A_m Q_m^{(j)}(s)`.
pub fn evaluate(coeffs: &[f64], j: usize, s: f64) -> f64 {
    let x = 1.0 - s;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let m = i + 1;
            a * sign * normalization(m) * legendre_derivatives(2 * m - 1, x, j + 1)[j + 1]
        })
        .sum()
}

/// `∫₀¹ ρ^{j+1} |θ^{(j)}|² ds` for `θ = Σ A_m Q_m`, by quadrature.
pub fn seminorm_by_quadrature(coeffs: &[f64], j: usize) -> f64 {
    let points = 2 * coeffs.len() + j + 4;
    weighted_integral(j, points, |s| evaluate(coeffs, j, s).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_low_degrees() {
        let x = 0.3;
        let p3 = legendre_derivatives(3, x, 3);
        assert!((p3[0] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        assert!((p3[1] - 0.5 * (15.0 * x * x - 3.0)).abs() < 1e-14);
        assert!((p3[2] - 15.0 * x).abs() < 1e-14);
        assert!((p3[3] - 15.0).abs() < 1e-14);
    }

    #[test]
    fn r_values() {
        for m in 1..10 {
            assert_eq!(r_coefficient(m, 0), 1.0);
        }
        assert_eq!(r_coefficient(1, 1), 0.0);
        assert_eq!(r_coefficient(2, 1), 10.0);
        assert_eq!(r_coefficient(2, 2), 60.0);
    }

    #[test]
    fn q2_first_order_norm() {
        assert!((inner_by_quadrature(2, 2, 1).unwrap() - 10.0).abs() < 1e-8);
    }

    #[test]
    fn even_about_one() {
        let s = [0.1, 0.45, 0.9];
        let mirrored: Vec<f64> = s.iter().map(|x| 2.0 - x).collect();
        for m in 1..6 {
            let a = basis_big_q(m, &s).unwrap();
            let b = basis_big_q(m, &mirrored).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!(basis_big_q(0, &s).is_err());
    }

    #[test]
    fn gram_matches_r() {
        for j in 0..=3 {
            for l in 1..=8 {
                for m in 1..=8 {
                    let g = inner_by_quadrature(l, m, j).unwrap();
                    let want = if l == m { r_coefficient(m, j) } else { 0.0 };
                    let scale = (r_coefficient(l, j) * r_coefficient(m, j)).sqrt().max(1.0);
                    assert!((g - want).abs() <= 1e-12 * scale, "l={l} m={m} j={j}: {g}");
                }
            }
        }
    }
}
