//! Canonical representatives of SL2(Z) orbits of nonsingular forms, and
//! stabilizer orders.
//!
//! Positive discriminant: the Hessian covariant is positive definite; classic
//! Gauss reduction of the Hessian brings a form into the finite reduced set,
//! and the canonical representative is the lexicographically least form with
//! loosely reduced Hessian in the orbit.
//!
//! Negative discriminant: the Hessian is indefinite, so reduction uses the
//! root-weighted positive quadratic
//!     C_f = sum_i |f'(alpha_i)|^-2 |x - alpha_i y|^2,
//! which satisfies C_{g f} = C_f o g exactly for det g = 1. The same
//! lexicographic tie-break applies, with a small relative slack absorbing
//! floating-point boundary cases.

use crate::error::FormsError;
use crate::forms::{act, disc, hessian, IntegralCubicForm, UnimodularMatrix};
use crate::roots::{cubic_roots, CubicRoots};
use std::sync::OnceLock;

/// Entry bound for the matrix box that links any two reduced forms of one
/// orbit (reduction-theory word length at most three generator factors).
pub const SMALL_BOX_BOUND: i64 = 4;

/// Relative slack for the floating-point reduced test at negative discriminant.
const JULIA_SLACK: f64 = 1e-9;

pub(crate) fn small_box() -> &'static [UnimodularMatrix] {
    static BOX: OnceLock<Vec<UnimodularMatrix>> = OnceLock::new();
    BOX.get_or_init(|| {
        let b = SMALL_BOX_BOUND;
        let mut out = Vec::new();
        for p in -b..=b {
            for q in -b..=b {
                for r in -b..=b {
                    for s in -b..=b {
                        if p * s - q * r == 1 {
                            out.push(UnimodularMatrix::new(p, q, r, s).unwrap());
                        }
                    }
                }
            }
        }
        out.sort_by_key(|m| m.entries());
        out
    })
}

/// Loose Hessian-reduced test for positive discriminant: |Q| <= P <= R.
pub(crate) fn hessian_reduced_loose(f: &IntegralCubicForm) -> bool {
    let (p, q, r) = hessian(f);
    p > 0 && q.abs() <= p && p <= r
}

/// The positive quadratic C_f as (P, Q, R) up to a positive scalar.
/// Requires negative discriminant.
pub(crate) fn julia_quad(f: &IntegralCubicForm) -> Result<(f64, f64, f64), FormsError> {
    let roots = cubic_roots(f.a as f64, f.b as f64, f.c as f64, f.d as f64)
        .map_err(|_| FormsError::Internal { what: "root finding in reduction" })?;
    match roots {
        CubicRoots::OnePair { real, real_is_infinity, complex } => {
            let sigma = complex.re;
            let tau = complex.im;
            if real_is_infinity {
                // Limit of the weighted sum as the real root escapes:
                // P = 1, Q = -2 sigma, R = sigma^2 + 3 tau^2, scale-free.
                Ok((1.0, -2.0 * sigma, sigma * sigma + 3.0 * tau * tau))
            } else {
                let theta = real;
                let mu2 = (theta - sigma) * (theta - sigma) + tau * tau;
                let t2 = tau * tau;
                let p = 2.0 * t2 + mu2;
                let q = -(4.0 * t2 * theta + 2.0 * sigma * mu2);
                let r = 2.0 * t2 * theta * theta + mu2 * (sigma * sigma + t2);
                Ok((p, q, r))
            }
        }
        CubicRoots::ThreeReal { .. } => {
            Err(FormsError::Internal { what: "julia_quad called with positive discriminant" })
        }
    }
}

/// Loose reduced test at negative discriminant.
pub(crate) fn julia_reduced_loose(f: &IntegralCubicForm) -> Result<bool, FormsError> {
    let (p, q, r) = julia_quad(f)?;
    Ok(q.abs() <= p * (1.0 + JULIA_SLACK) && p <= r * (1.0 + JULIA_SLACK))
}

/// Upper-half-plane root of C_f; the orbit representative is reduced exactly
/// when this point lies in the standard fundamental domain.
pub(crate) fn julia_point(f: &IntegralCubicForm) -> Result<(f64, f64), FormsError> {
    let (p, q, r) = julia_quad(f)?;
    let det4 = 4.0 * p * r - q * q;
    if det4 <= 0.0 {
        return Err(FormsError::Internal { what: "julia quadratic not definite" });
    }
    Ok((-q / (2.0 * p), det4.sqrt() / (2.0 * p)))
}

fn div_round_i128(num: i128, den: i128) -> i128 {
    // Nearest integer to num/den, den > 0, ties away from zero.
    debug_assert!(den > 0);
    if num >= 0 {
        (num + den / 2) / den
    } else {
        -((-num + den / 2) / den)
    }
}

fn translation(k: i64) -> UnimodularMatrix {
    UnimodularMatrix::new(1, 0, k, 1).expect("lower triangular unipotent")
}

/// Gauss descent on the Hessian (exact, positive discriminant).
fn descend_pos(f: &IntegralCubicForm) -> Result<(IntegralCubicForm, UnimodularMatrix), FormsError> {
    let mut cur = *f;
    let mut gamma = UnimodularMatrix::IDENTITY;
    for _ in 0..512 {
        let (p, q, r) = hessian(&cur);
        if p <= 0 {
            return Err(FormsError::Internal { what: "hessian not positive definite at D > 0" });
        }
        if p > r {
            let s = UnimodularMatrix::S;
            cur = act(&s, &cur)?;
            gamma = s.mul(&gamma)?;
            continue;
        }
        if q.abs() > p {
            let k = div_round_i128(-q, 2 * p);
            let k = i64::try_from(k).map_err(|_| FormsError::Overflow { context: "reduction step" })?;
            let t = translation(k);
            cur = act(&t, &cur)?;
            gamma = t.mul(&gamma)?;
            continue;
        }
        return Ok((cur, gamma));
    }
    Err(FormsError::Internal { what: "hessian reduction did not terminate" })
}

/// Gauss descent on C_f (floating point decisions, exact integer moves).
fn descend_neg(f: &IntegralCubicForm) -> Result<(IntegralCubicForm, UnimodularMatrix), FormsError> {
    let mut cur = *f;
    let mut gamma = UnimodularMatrix::IDENTITY;
    for _ in 0..512 {
        let (p, q, r) = julia_quad(&cur)?;
        if !(p.is_finite() && q.is_finite() && r.is_finite()) || p <= 0.0 {
            return Err(FormsError::Internal { what: "julia quadratic degenerate" });
        }
        if p > r * (1.0 + JULIA_SLACK) {
            let s = UnimodularMatrix::S;
            cur = act(&s, &cur)?;
            gamma = s.mul(&gamma)?;
            continue;
        }
        if q.abs() > p * (1.0 + JULIA_SLACK) {
            let kf = (-q / (2.0 * p)).round();
            if !kf.is_finite() || kf.abs() > 9.0e17 {
                return Err(FormsError::Overflow { context: "reduction step" });
            }
            let k = kf as i64;
            if k == 0 {
                return Ok((cur, gamma));
            }
            let t = translation(k);
            cur = act(&t, &cur)?;
            gamma = t.mul(&gamma)?;
            continue;
        }
        return Ok((cur, gamma));
    }
    Err(FormsError::Internal { what: "julia reduction did not terminate" })
}

fn loose_reduced(f: &IntegralCubicForm, positive: bool) -> Result<bool, FormsError> {
    if positive {
        Ok(hessian_reduced_loose(f))
    } else {
        julia_reduced_loose(f)
    }
}

/// Canonical representative of the orbit of `f` together with gamma such that
/// act(gamma, f) equals it. Constant on orbits; rejects zero discriminant.
pub fn reduce(f: &IntegralCubicForm) -> Result<(IntegralCubicForm, UnimodularMatrix), FormsError> {
    let d = disc(f)?;
    if d == 0 {
        return Err(FormsError::ZeroDiscriminant);
    }
    let positive = d > 0;
    let (f0, gamma0) = if positive { descend_pos(f)? } else { descend_neg(f)? };
    let mut best: Option<(IntegralCubicForm, UnimodularMatrix)> = None;
    for u in small_box() {
        let Ok(h) = act(u, &f0) else { continue };
        if !loose_reduced(&h, positive)? {
            continue;
        }
        if best.as_ref().map_or(true, |(b, _)| h < *b) {
            best = Some((h, *u));
        }
    }
    let (canonical, u) = best.ok_or(FormsError::Internal { what: "descent output not reduced" })?;
    let gamma = u.mul(&gamma0)?;
    debug_assert_eq!(act(&gamma, f)?, canonical);
    Ok((canonical, gamma))
}

/// Emit test used by the enumeration scan: `f` must already satisfy the loose
/// reduced condition; returns whether `f` is the canonical orbit minimum.
pub(crate) fn is_canonical_among_box(f: &IntegralCubicForm, positive: bool) -> Result<bool, FormsError> {
    for u in small_box() {
        let Ok(h) = act(u, f) else { continue };
        if h < *f && loose_reduced(&h, positive)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// |{gamma in SL2(Z) : act(gamma, f) = f}|, always 1 or 3, and 1 whenever the
/// discriminant is negative.
pub fn stabilizer_order(f: &IntegralCubicForm) -> Result<u32, FormsError> {
    let d = disc(f)?;
    if d == 0 {
        return Err(FormsError::ZeroDiscriminant);
    }
    let (canonical, _) = reduce(f)?;
    let mut count = 0u32;
    for u in small_box() {
        if let Ok(h) = act(u, &canonical) {
            if h == canonical {
                count += 1;
            }
        }
    }
    if count != 1 && count != 3 {
        return Err(FormsError::Internal { what: "stabilizer order outside {1, 3}" });
    }
    if d < 0 && count != 1 {
        return Err(FormsError::Internal { what: "nontrivial stabilizer at negative discriminant" });
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gamma(rng: &mut impl Rng, max_entry: i64) -> UnimodularMatrix {
        let mut g = UnimodularMatrix::IDENTITY;
        for _ in 0..12 {
            let step = match rng.gen_range(0..4u8) {
                0 => UnimodularMatrix::T,
                1 => UnimodularMatrix::T.inverse(),
                2 => UnimodularMatrix::S,
                _ => UnimodularMatrix::NEG_IDENTITY,
            };
            if let Ok(next) = g.mul(&step) {
                if next.max_abs_entry() <= max_entry {
                    g = next;
                }
            }
        }
        g
    }

    fn random_nonsingular(rng: &mut impl Rng, max: i64) -> IntegralCubicForm {
        loop {
            let f = IntegralCubicForm::new(
                rng.gen_range(-max..=max),
                rng.gen_range(-max..=max),
                rng.gen_range(-max..=max),
                rng.gen_range(-max..=max),
            );
            if disc(&f).unwrap() != 0 {
                return f;
            }
        }
    }

    #[test]
    fn small_box_is_substantial() {
        let n = small_box().len();
        assert!(n > 100, "box unexpectedly small: {n}");
        assert!(small_box().contains(&UnimodularMatrix::IDENTITY));
    }

    #[test]
    fn hessian_is_covariant_for_the_action() {
        // H(act(g, f)) must equal H(f) transformed by the same substitution.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let f = random_nonsingular(&mut rng, 30);
            let g = random_gamma(&mut rng, 20);
            let (p0, q0, r0) = hessian(&f);
            let [gp, gq, gr, gs] = g.entries().map(|v| v as i128);
            let p1 = p0 * gp * gp + q0 * gp * gq + r0 * gq * gq;
            let q1 = 2 * p0 * gp * gr + q0 * (gp * gs + gq * gr) + 2 * r0 * gq * gs;
            let r1 = p0 * gr * gr + q0 * gr * gs + r0 * gs * gs;
            assert_eq!(hessian(&act(&g, &f).unwrap()), (p1, q1, r1));
        }
    }

    #[test]
    fn reduce_is_constant_on_orbits_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 400 {
            let f = random_nonsingular(&mut rng, 12);
            if disc(&f).unwrap() <= 0 {
                continue;
            }
            checked += 1;
            let (canon, gamma) = reduce(&f).unwrap();
            assert_eq!(act(&gamma, &f).unwrap(), canon);
            for _ in 0..5 {
                let g = random_gamma(&mut rng, 25);
                let moved = act(&g, &f).unwrap();
                assert_eq!(reduce(&moved).unwrap().0, canon, "f={f} g={g}");
            }
        }
    }

    #[test]
    fn reduce_is_constant_on_orbits_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 400 {
            let f = random_nonsingular(&mut rng, 12);
            if disc(&f).unwrap() >= 0 {
                continue;
            }
            checked += 1;
            let (canon, gamma) = reduce(&f).unwrap();
            assert_eq!(act(&gamma, &f).unwrap(), canon);
            for _ in 0..5 {
                let g = random_gamma(&mut rng, 25);
                let moved = act(&g, &f).unwrap();
                assert_eq!(reduce(&moved).unwrap().0, canon, "f={f} g={g}");
            }
        }
    }

    #[test]
    fn reduce_rejects_singular() {
        assert!(matches!(
            reduce(&IntegralCubicForm::new(1, 0, 0, 0)),
            Err(FormsError::ZeroDiscriminant)
        ));
    }

    #[test]
    fn base_form_stabilizers() {
        assert_eq!(stabilizer_order(&IntegralCubicForm::new(0, 1, -1, 0)).unwrap(), 3);
        assert_eq!(stabilizer_order(&IntegralCubicForm::new(0, 1, 0, 1)).unwrap(), 1);
        assert_eq!(stabilizer_order(&IntegralCubicForm::new(1, 0, -1, -1)).unwrap(), 1);
    }

    #[test]
    fn stabilizer_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let f = random_nonsingular(&mut rng, 8);
            let g = random_gamma(&mut rng, 20);
            let a = stabilizer_order(&f).unwrap();
            let b = stabilizer_order(&act(&g, &f).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }
}
