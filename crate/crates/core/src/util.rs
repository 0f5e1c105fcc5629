//! Small numeric helpers shared across modules.

/// Bisection on a bracketing interval [lo, hi] with f(lo)·f(hi) ≤ 0.
/// Runs until the interval collapses to adjacent floats, so the result is
/// deterministic and accurate to the last ulp the function allows.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    debug_assert!(flo * f(hi) <= 0.0, "bisect requires a sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Compensated (Kahan) accumulator; keeps exhaustive sums reproducible to
/// well below the consistency tolerances.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// log(Σ exp(x_i)) over a short slice.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = KahanSum::default();
    for &x in xs {
        acc.add((x - m).exp());
    }
    m + acc.value().ln()
}

/// Continued-fraction convergents p/q of `t`, in order, with |p| and q
/// bounded by `max_bound`. Always lowest terms.
pub(crate) fn convergents(t: f64, max_bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut h0, mut h1): (i64, i64) = (1, 0); // numerators
    let (mut k0, mut k1): (i64, i64) = (0, 1); // denominators
    let mut x = t;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > max_bound as f64 * 4.0 {
            break;
        }
        let a_int = a as i64;
        let (h, k) = (
            a_int.checked_mul(h0).and_then(|v| v.checked_add(h1)),
            a_int.checked_mul(k0).and_then(|v| v.checked_add(k1)),
        );
        let (h, k) = match (h, k) {
            (Some(h), Some(k)) => (h, k),
            _ => break,
        };
        if k.abs() > max_bound || h.abs() > max_bound {
            break;
        }
        out.push((h, k));
        h1 = h0;
        h0 = h;
        k1 = k0;
        k0 = k;
        let frac = x - a;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        if !x.is_finite() {
            break;
        }
    }
    out
}

pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0);
        assert_relative_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = [0.0f64, 1.0, -3.0, 2.5];
        let direct: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&xs), direct, epsilon = 1e-14);
        // survives large offsets
        let shifted: Vec<f64> = xs.iter().map(|x| x + 700.0).collect();
        assert_relative_eq!(log_sum_exp(&shifted), direct + 700.0, epsilon = 1e-11);
    }

    #[test]
    fn convergents_of_rationals_terminate_exactly() {
        assert_eq!(convergents(0.25, 64).last(), Some(&(1, 4)));
        assert_eq!(convergents(2.0, 64).last(), Some(&(2, 1)));
        assert_eq!(convergents(1.5, 64).last(), Some(&(3, 2)));
        // negative values work through the floor convention
        let c = convergents(-0.5, 64);
        let (p, q) = *c.last().unwrap();
        assert_relative_eq!(p as f64 / q as f64, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn convergents_of_sqrt2_improve() {
        let c = convergents(std::f64::consts::SQRT_2, 64);
        assert!(c.contains(&(3, 2)));
        assert!(c.contains(&(17, 12)));
        assert!(c.contains(&(41, 29)));
        for w in c.windows(2) {
            let e0 = (w[0].0 as f64 / w[0].1 as f64 - std::f64::consts::SQRT_2).abs();
            let e1 = (w[1].0 as f64 / w[1].1 as f64 - std::f64::consts::SQRT_2).abs();
            assert!(e1 < e0);
        }
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd_i64(12, 8), 4);
        assert_eq!(gcd_i64(-4, 6), 2);
        assert_eq!(gcd_i64(0, 5), 5);
        assert_eq!(gcd_i64(7, 0), 7);
    }
}
