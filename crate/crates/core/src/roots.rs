//! Root finding for cubics with real coefficients, shared by the reduction
//! and shape modules. Closed-form branches with Newton polish; target 1e-12
//! relative accuracy on well-separated roots.

use crate::error::EvalError;
use num_complex::Complex64;

/// Roots of a nonsingular binary cubic, as points of P^1(R) resp. C.
#[derive(Debug, Clone, Copy)]
pub(crate) enum CubicRoots {
    /// Positive discriminant: three real roots. `finite` is sorted descending;
    /// when `has_infinity` (leading coefficient zero) only the first two
    /// entries are meaningful and the root at infinity precedes them.
    ThreeReal { finite: [f64; 3], has_infinity: bool },
    /// Negative discriminant: one real root (infinite iff `real_is_infinity`)
    /// and a complex pair, upper-half representative stored.
    OnePair { real: f64, real_is_infinity: bool, complex: Complex64 },
}

pub(crate) fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Result<CubicRoots, EvalError> {
    if a == 0.0 {
        return roots_leading_zero(b, c, d);
    }
    let p = (3.0 * a * c - b * b) / (3.0 * a * a);
    let q = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
    let shift = -b / (3.0 * a);
    let quarter = q * q / 4.0 + p * p * p / 27.0;
    if quarter < 0.0 {
        // Three distinct real roots.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt();
        let phi = arg.clamp(-1.0, 1.0).acos();
        let mut roots = [0.0f64; 3];
        for (k, slot) in roots.iter_mut().enumerate() {
            let t = m * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            *slot = polish_real(a, b, c, d, t + shift);
        }
        roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
        Ok(CubicRoots::ThreeReal { finite: roots, has_infinity: false })
    } else {
        // One real root, complex pair.
        let sq = quarter.max(0.0).sqrt();
        let (u, v) = if q <= 0.0 {
            let u = cbrt(-q / 2.0 + sq);
            let v = if u != 0.0 { -p / (3.0 * u) } else { cbrt(-q / 2.0 - sq) };
            (u, v)
        } else {
            let v = cbrt(-q / 2.0 - sq);
            let u = if v != 0.0 { -p / (3.0 * v) } else { cbrt(-q / 2.0 + sq) };
            (u, v)
        };
        let real = polish_real(a, b, c, d, u + v + shift);
        let re = -(u + v) / 2.0 + shift;
        let im = (3.0f64.sqrt() / 2.0) * (u - v).abs();
        if im <= 0.0 {
            return Err(EvalError::Roots {
                what: format!("complex pair collapsed (a={a}, b={b}, c={c}, d={d})"),
            });
        }
        let complex = polish_complex(a, b, c, d, Complex64::new(re, im));
        Ok(CubicRoots::OnePair { real, real_is_infinity: false, complex })
    }
}

fn roots_leading_zero(b: f64, c: f64, d: f64) -> Result<CubicRoots, EvalError> {
    if b == 0.0 {
        return Err(EvalError::Roots { what: "degenerate cubic: a = b = 0".into() });
    }
    let disc2 = c * c - 4.0 * b * d;
    if disc2 > 0.0 {
        // Root at infinity plus two real roots of the quadratic factor.
        let sq = disc2.sqrt();
        let q_big = -(c + c.signum() * sq) / 2.0;
        let (r1, r2) = if c == 0.0 {
            let r = (sq / (2.0 * b)).abs();
            (r, -r)
        } else {
            (q_big / b, d / q_big)
        };
        let hi = polish_quad(b, c, d, r1.max(r2));
        let lo = polish_quad(b, c, d, r1.min(r2));
        Ok(CubicRoots::ThreeReal { finite: [hi, lo, f64::NAN], has_infinity: true })
    } else if disc2 < 0.0 {
        let sigma = -c / (2.0 * b);
        let tau = (-disc2).sqrt() / (2.0 * b.abs());
        Ok(CubicRoots::OnePair {
            real: f64::NAN,
            real_is_infinity: true,
            complex: Complex64::new(sigma, tau),
        })
    } else {
        Err(EvalError::Roots { what: "quadratic factor has a double root".into() })
    }
}

fn cbrt(x: f64) -> f64 {
    x.cbrt()
}

fn polish_real(a: f64, b: f64, c: f64, d: f64, mut x: f64) -> f64 {
    for _ in 0..3 {
        let f = ((a * x + b) * x + c) * x + d;
        let fp = (3.0 * a * x + 2.0 * b) * x + c;
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let step = f / fp;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

fn polish_quad(b: f64, c: f64, d: f64, mut x: f64) -> f64 {
    for _ in 0..3 {
        let f = (b * x + c) * x + d;
        let fp = 2.0 * b * x + c;
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        x -= f / fp;
    }
    x
}

fn polish_complex(a: f64, b: f64, c: f64, d: f64, mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let f = ((a * z + b) * z + c) * z + d;
        let fp = (3.0 * a * z + 2.0 * b) * z + c;
        if fp.norm_sqr() == 0.0 {
            break;
        }
        z -= f / fp;
    }
    if z.im < 0.0 {
        z = z.conj();
    }
    z
}

/// Residual |f(x, 1)| scaled to the coefficient size; used as a validity check.
pub(crate) fn residual_scale(a: f64, b: f64, c: f64, d: f64, x: f64) -> f64 {
    let f = ((a * x + b) * x + c) * x + d;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1.0);
    let xs = x.abs().max(1.0).powi(3);
    f.abs() / (scale * xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_real_roots_sorted() {
        // (x - 2)(x - 1)(x + 3) = x^3 - 7x + 6
        match cubic_roots(1.0, 0.0, -7.0, 6.0).unwrap() {
            CubicRoots::ThreeReal { finite, has_infinity } => {
                assert!(!has_infinity);
                assert!((finite[0] - 2.0).abs() < 1e-12);
                assert!((finite[1] - 1.0).abs() < 1e-12);
                assert!((finite[2] + 3.0).abs() < 1e-12);
            }
            _ => panic!("expected three real roots"),
        }
    }

    #[test]
    fn complex_pair_upper_half() {
        // x^3 - 1 has roots 1, exp(+-2 pi i/3)
        match cubic_roots(1.0, 0.0, 0.0, -1.0).unwrap() {
            CubicRoots::OnePair { real, complex, real_is_infinity } => {
                assert!(!real_is_infinity);
                assert!((real - 1.0).abs() < 1e-12);
                assert!((complex.re + 0.5).abs() < 1e-12);
                assert!((complex.im - 3.0f64.sqrt() / 2.0).abs() < 1e-12);
            }
            _ => panic!("expected one real root"),
        }
    }

    #[test]
    fn leading_zero_cases() {
        // y(x^2 + y^2): roots infinity, +-i
        match cubic_roots(0.0, 1.0, 0.0, 1.0).unwrap() {
            CubicRoots::OnePair { real_is_infinity, complex, .. } => {
                assert!(real_is_infinity);
                assert!(complex.re.abs() < 1e-14);
                assert!((complex.im - 1.0).abs() < 1e-14);
            }
            _ => panic!(),
        }
        // x y (x - y): roots infinity, 1, 0
        match cubic_roots(0.0, 1.0, -1.0, 0.0).unwrap() {
            CubicRoots::ThreeReal { finite, has_infinity } => {
                assert!(has_infinity);
                assert!((finite[0] - 1.0).abs() < 1e-14);
                assert!(finite[1].abs() < 1e-14);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn residuals_small_on_random_cubics() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3000 {
            let coeffs: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-50.0..50.0f64));
            let [a, b, c, d] = coeffs;
            let disc = crate::forms::disc_real(&crate::forms::RealCubicForm::new(a, b, c, d));
            if disc.abs() < 1e-3 || a.abs() < 1e-6 {
                continue;
            }
            match cubic_roots(a, b, c, d).unwrap() {
                CubicRoots::ThreeReal { finite, .. } => {
                    for x in finite {
                        assert!(residual_scale(a, b, c, d, x) < 1e-9);
                    }
                }
                CubicRoots::OnePair { real, complex, .. } => {
                    assert!(residual_scale(a, b, c, d, real) < 1e-9);
                    let f = ((Complex64::from(a) * complex + b) * complex + c) * complex + d;
                    assert!(f.norm() < 1e-7 * (a.abs() + b.abs() + c.abs() + d.abs()).max(1.0) * complex.norm().max(1.0).powi(3));
                }
            }
        }
    }
}
