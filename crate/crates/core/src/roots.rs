//! Real roots of real polynomials on a bounded interval.
//!
//! Roots are isolated recursively: the critical points of `p` (roots of `p'`)
//! split the interval into pieces on which `p` is monotone, so each piece
//! holds at most one root, found by bisection. Polynomials are coefficient
//! slices in ascending order, `p(x) = a[0] + a[1] x + ...`.

use crate::scalar::Real;

/// Evaluates a polynomial with Horner's rule.
pub fn horner<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

/// Coefficients of the derivative.
pub fn derivative<T: Real>(coeffs: &[T]) -> Vec<T> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &a)| a * T::from_count(n))
        .collect()
}

/// Drops trailing (highest-order) zero coefficients.
pub fn trim<T: Real>(coeffs: &[T]) -> &[T] {
    let len = coeffs
        .iter()
        .rposition(|a| *a != T::zero())
        .map_or(0, |i| i + 1);
    &coeffs[..len]
}

/// Cauchy bound: every root satisfies `|x| <= 1 + max_k |a_k| / |a_d|`.
///
/// Returns `None` for the zero polynomial.
pub fn cauchy_bound<T: Real>(coeffs: &[T]) -> Option<T> {
    let p = trim(coeffs);
    let (&lead, rest) = p.split_last()?;
    let m = rest.iter().fold(T::zero(), |acc, a| acc.max(a.abs()));
    Some(T::one() + m / lead.abs())
}

/// Bisection on a bracket with `p(lo)` and `p(hi)` of strictly opposite sign.
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T) -> T {
    let mut f_lo = f(lo);
    let tol = T::root_tolerance();
    for _ in 0..300 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi || hi - lo <= tol * T::one().max(mid.abs()) {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / T::lit(2.0)
}

/// All real roots of `coeffs` in the closed interval `[lo, hi]`, ascending.
///
/// Roots of odd multiplicity are always found. Even-multiplicity roots are
/// reported only when the polynomial evaluates to exactly zero at the
/// corresponding critical point. The zero polynomial yields no roots; callers
/// that care must detect it with [`trim`].
pub fn real_roots_in<T: Real>(coeffs: &[T], lo: T, hi: T) -> Vec<T> {
    let p = trim(coeffs);
    if p.len() <= 1 || lo > hi {
        return Vec::new();
    }
    if p.len() == 2 {
        let x = -p[0] / p[1];
        return if x >= lo && x <= hi {
            vec![x]
        } else {
            Vec::new()
        };
    }

    let mut knots = vec![lo];
    knots.extend(
        real_roots_in(&derivative(p), lo, hi)
            .into_iter()
            .filter(|&c| c > lo && c < hi),
    );
    knots.push(hi);

    let f = |x: T| horner(p, x);
    let mut roots: Vec<T> = Vec::new();
    let push = |x: T, roots: &mut Vec<T>| {
        if roots.last().is_none_or(|&r| x > r) {
            roots.push(x);
        }
    };
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == T::zero() {
            push(a, &mut roots);
        }
        if fa != T::zero() && fb != T::zero() && (fa < T::zero()) != (fb < T::zero()) {
            push(bisect(f, a, b), &mut roots);
        }
    }
    if f(hi) == T::zero() {
        push(hi, &mut roots);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct_sum() {
        let p = [0.0f64, -0.5, 0.25];
        assert_eq!(horner(&p, 0.5), -0.5 * 0.5 + 0.25 * 0.25);
    }

    #[test]
    fn cubic_with_three_roots() {
        // (x - 0.5)(x - 1)(x - 3)
        let p = [-1.5f64, 5.0, -4.5, 1.0];
        let r = real_roots_in(&p, 0.0, 10.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([0.5, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        }
    }

    #[test]
    fn interval_is_respected() {
        let p = [-1.5f64, 5.0, -4.5, 1.0];
        let r = real_roots_in(&p, 0.75, 2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn exact_double_root_at_critical_point() {
        // (x - 2)^2
        let r = real_roots_in(&[4.0, -4.0, 1.0], 0.0, 5.0);
        assert_eq!(r, vec![2.0]);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots_in(&[1.0, 0.0, 1.0], -10.0, 10.0).is_empty());
        assert!(real_roots_in(&[0.0, 0.0], -10.0, 10.0).is_empty());
    }

    #[test]
    fn cauchy_bound_contains_roots() {
        let p = [-1.5f64, 5.0, -4.5, 1.0];
        assert!(cauchy_bound(&p).unwrap() >= 3.0);
        assert!(cauchy_bound(&[0.0f64, 0.0]).is_none());
    }

    #[test]
    fn works_in_single_precision() {
        let p = [-2.0f32, 0.0, 1.0];
        let r = real_roots_in(&p, 0.0, 4.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0f32.sqrt()).abs() < 1e-6);
    }
}
