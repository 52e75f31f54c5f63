//! Iwasawa coordinates g = k_theta a_t n_u (with lower-triangular n_u), the
//! upper-half-plane dictionary (x, y) = (u, t^2), and reduction to the
//! standard fundamental domain of SL2(Z).
//!
//! Right multiplication g -> g h moves the point by the Moebius action of
//! h^T; the startup self-test [`convention_self_test`] checks this on random
//! samples and falls back to the untransposed convention if it ever fails.

use crate::error::EvalError;
use crate::forms::{RealMatrix2, UnimodularMatrix};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Coordinates of g in K A N: g = k_theta a_t n_u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaCoords {
    /// Rotation angle as a fraction of a full turn, in [0, 1).
    pub theta: f64,
    /// Diagonal parameter, > 0.
    pub t: f64,
    /// Lower-triangular shear.
    pub u: f64,
}

/// Point x + i y of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// The base point i.
    pub const I: Self = Self { x: 0.0, y: 1.0 };

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Membership in the standard fundamental domain, with slack for the
    /// boundary: |x| <= 1/2 and x^2 + y^2 >= 1 - 1e-12.
    pub fn is_reduced(&self) -> bool {
        self.y > 0.0 && self.x.abs() <= 0.5 + 1e-12 && self.norm_sqr() >= 1.0 - 1e-12
    }
}

impl IwasawaCoords {
    /// Rebuild k_theta a_t n_u.
    pub fn reconstruct(&self) -> RealMatrix2 {
        let c = (2.0 * std::f64::consts::PI * self.theta).cos();
        let s = (2.0 * std::f64::consts::PI * self.theta).sin();
        let k = RealMatrix2::new([[c, s], [-s, c]]);
        let a = RealMatrix2::new([[self.t, 0.0], [0.0, 1.0 / self.t]]);
        let n = RealMatrix2::new([[1.0, 0.0], [self.u, 1.0]]);
        k.mul(&a).mul(&n)
    }
}

/// Iwasawa decomposition of g in SL2(R). Rejects |det - 1| > 1e-10.
pub fn iwasawa(g: &RealMatrix2) -> Result<IwasawaCoords, EvalError> {
    let det = g.det();
    if (det - 1.0).abs() > 1e-10 {
        return Err(EvalError::Domain {
            what: format!("iwasawa requires det = 1, got {det}"),
        });
    }
    // Column (g12, g22) = (s/t, c/t).
    let g12 = g.m[0][1];
    let g22 = g.m[1][1];
    let norm = g12.hypot(g22);
    if norm == 0.0 || !norm.is_finite() {
        return Err(EvalError::Domain { what: "degenerate second column".into() });
    }
    let t = 1.0 / norm;
    let s = g12 * t;
    let c = g22 * t;
    let mut theta = s.atan2(c) / (2.0 * std::f64::consts::PI);
    if theta < 0.0 {
        theta += 1.0;
    }
    let u = t * (s * g.m[0][0] + c * g.m[1][0]);
    Ok(IwasawaCoords { theta, t, u })
}

/// Project g in G+ to determinant one and return its half-plane point
/// (x, y) = (u, t^2).
pub fn to_halfplane(g: &RealMatrix2) -> Result<HalfPlanePoint, EvalError> {
    let det = g.det();
    if !(det > 0.0) || !det.is_finite() {
        return Err(EvalError::Domain {
            what: format!("to_halfplane requires det > 0, got {det}"),
        });
    }
    let coords = iwasawa(&g.scale(1.0 / det.sqrt()))?;
    Ok(HalfPlanePoint::new(coords.u, coords.t * coords.t))
}

/// Classical Moebius action of an integer matrix [[p, q], [r, s]] on the
/// upper half plane: z -> (p z + q) / (r z + s).
pub fn moebius(m: &UnimodularMatrix, z: &HalfPlanePoint) -> HalfPlanePoint {
    let [p, q, r, s] = m.entries().map(|v| v as f64);
    let den = (r * z.x + s) * (r * z.x + s) + r * r * z.y * z.y;
    HalfPlanePoint::new(
        ((p * z.x + q) * (r * z.x + s) + p * r * z.y * z.y) / den,
        z.y / den,
    )
}

/// Reduce z into the standard fundamental domain; returns the reduced point
/// and the word applied (as a single matrix acting by [`moebius`]).
pub fn reduce_fundamental(
    z: &HalfPlanePoint,
) -> Result<(HalfPlanePoint, UnimodularMatrix), EvalError> {
    if !(z.y > 0.0) || !z.x.is_finite() || !z.y.is_finite() {
        return Err(EvalError::Domain {
            what: format!("point ({}, {}) not in the upper half plane", z.x, z.y),
        });
    }
    let t_shift = UnimodularMatrix::new(1, 1, 0, 1).unwrap(); // z -> z + 1
    let s_inv = UnimodularMatrix::S; // [[0,1],[-1,0]]: z -> -1/z
    let mut cur = *z;
    let mut word = UnimodularMatrix::IDENTITY;
    for _ in 0..10_000 {
        let k = cur.x.round();
        if k != 0.0 {
            let kk = k as i64;
            let shift = UnimodularMatrix::new(1, -kk, 0, 1).unwrap();
            cur = HalfPlanePoint::new(cur.x - k, cur.y);
            word = shift.mul(&word).map_err(|_| EvalError::ReductionStuck)?;
        }
        if cur.norm_sqr() < 1.0 - 1e-15 {
            cur = moebius(&s_inv, &cur);
            word = s_inv.mul(&word).map_err(|_| EvalError::ReductionStuck)?;
            continue;
        }
        // Boundary conventions: x = 1/2 -> -1/2; |z| = 1 with x > 0 -> invert.
        if (cur.x - 0.5).abs() <= 1e-15 {
            cur = HalfPlanePoint::new(cur.x - 1.0, cur.y);
            word = t_shift.inverse().mul(&word).map_err(|_| EvalError::ReductionStuck)?;
        }
        if (cur.norm_sqr() - 1.0).abs() <= 1e-15 && cur.x > 0.0 {
            cur = moebius(&s_inv, &cur);
            word = s_inv.mul(&word).map_err(|_| EvalError::ReductionStuck)?;
            let k2 = cur.x.round();
            if k2 != 0.0 {
                let shift = UnimodularMatrix::new(1, -(k2 as i64), 0, 1).unwrap();
                cur = HalfPlanePoint::new(cur.x - k2, cur.y);
                word = shift.mul(&word).map_err(|_| EvalError::ReductionStuck)?;
            }
        }
        if cur.x.abs() <= 0.5 + 1e-15 && cur.norm_sqr() >= 1.0 - 1e-15 {
            return Ok((cur, word));
        }
    }
    Err(EvalError::ReductionStuck)
}

/// Which Moebius dictionary realizes right multiplication on points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightActionConvention {
    /// z(g h) = Moebius(h^T, z(g)) (the convention this crate derives).
    Transpose,
    /// z(g h) = Moebius(h, z(g)).
    Plain,
}

static CONVENTION: OnceLock<RightActionConvention> = OnceLock::new();

/// Verify on random samples that right multiplication by gamma corresponds to
/// the transposed Moebius action; fall back to the plain convention if the
/// transposed one fails, and error if neither holds.
pub fn convention_self_test() -> Result<RightActionConvention, EvalError> {
    if let Some(c) = CONVENTION.get() {
        return Ok(*c);
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0c0d_e5e1);
    let mut transpose_ok = true;
    let mut plain_ok = true;
    for _ in 0..200 {
        let coords = IwasawaCoords {
            theta: rng.gen_range(0.0..1.0),
            t: rng.gen_range(0.5..2.0),
            u: rng.gen_range(-2.0..2.0),
        };
        let g = coords.reconstruct();
        let gamma = crate::verify::random_gamma(&mut rng, 20);
        let gh = g.mul(&gamma.to_real());
        let z = to_halfplane(&g).unwrap();
        let zh = to_halfplane(&gh).unwrap();
        let [p, q, r, s] = gamma.entries();
        let transposed = UnimodularMatrix::new(p, r, q, s).unwrap();
        if !points_close(&moebius(&transposed, &z), &zh, 1e-8) {
            transpose_ok = false;
        }
        if !points_close(&moebius(&gamma, &z), &zh, 1e-8) {
            plain_ok = false;
        }
    }
    let chosen = if transpose_ok {
        RightActionConvention::Transpose
    } else if plain_ok {
        eprintln!("half-plane convention self-test: falling back to the plain Moebius dictionary");
        RightActionConvention::Plain
    } else {
        return Err(EvalError::ConventionSelfTest);
    };
    let _ = CONVENTION.set(chosen);
    Ok(chosen)
}

fn points_close(a: &HalfPlanePoint, b: &HalfPlanePoint, tol: f64) -> bool {
    (a.x - b.x).abs() <= tol * a.y.max(1.0) && (a.y - b.y).abs() <= tol * a.y.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn iwasawa_identity_and_diagonal() {
        let id = iwasawa(&RealMatrix2::IDENTITY).unwrap();
        assert!(id.theta.abs() < 1e-14 && (id.t - 1.0).abs() < 1e-14 && id.u.abs() < 1e-14);

        let a2 = iwasawa(&RealMatrix2::new([[2.0, 0.0], [0.0, 0.5]])).unwrap();
        assert!(a2.theta.abs() < 1e-14 && (a2.t - 2.0).abs() < 1e-14 && a2.u.abs() < 1e-14);
    }

    #[test]
    fn iwasawa_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10_000 {
            let coords = IwasawaCoords {
                theta: rng.gen_range(0.0..1.0),
                t: rng.gen_range(0.2..5.0),
                u: rng.gen_range(-4.0..4.0),
            };
            let g = coords.reconstruct();
            let back = iwasawa(&g).unwrap();
            let g2 = back.reconstruct();
            assert!(crate::forms::tests::matrix_close(&g, &g2, 1e-10), "{coords:?}");
        }
    }

    #[test]
    fn iwasawa_rejects_non_unit_determinant() {
        let g = RealMatrix2::new([[2.0, 0.0], [0.0, 1.0]]);
        assert!(iwasawa(&g).is_err());
    }

    #[test]
    fn halfplane_points() {
        let z = to_halfplane(&RealMatrix2::IDENTITY).unwrap();
        assert!((z.x, z.y) == (0.0, 1.0) || ((z.x).abs() < 1e-14 && (z.y - 1.0).abs() < 1e-14));
        let a_t = RealMatrix2::new([[1.7, 0.0], [0.0, 1.0 / 1.7]]);
        let z = to_halfplane(&a_t).unwrap();
        assert!((z.y - 1.7 * 1.7).abs() < 1e-12);
        // Scalars project away.
        let g = RealMatrix2::new([[0.3, 1.2], [-0.7, 1.1]]);
        let z1 = to_halfplane(&g).unwrap();
        let z2 = to_halfplane(&g.scale(3.7)).unwrap();
        assert!((z1.x - z2.x).abs() < 1e-12 && (z1.y - z2.y).abs() < 1e-12);
    }

    #[test]
    fn fundamental_domain_examples() {
        let (z, w) = reduce_fundamental(&HalfPlanePoint::new(0.4, 2.0)).unwrap();
        assert_eq!(w, UnimodularMatrix::IDENTITY);
        assert!((z.x - 0.4).abs() < 1e-14 && (z.y - 2.0).abs() < 1e-14);

        let (z, _) = reduce_fundamental(&HalfPlanePoint::new(1.4, 2.0)).unwrap();
        assert!((z.x - 0.4).abs() < 1e-12 && (z.y - 2.0).abs() < 1e-12);

        let (z, _) = reduce_fundamental(&HalfPlanePoint::new(0.0, 0.25)).unwrap();
        assert!(z.x.abs() < 1e-12 && (z.y - 4.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_is_idempotent_and_gamma_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5000 {
            let z = HalfPlanePoint::new(rng.gen_range(-8.0..8.0), rng.gen_range(0.02..6.0));
            let (zr, w) = reduce_fundamental(&z).unwrap();
            assert!(zr.is_reduced(), "{z:?} -> {zr:?}");
            let again = reduce_fundamental(&zr).unwrap().0;
            assert!((again.x - zr.x).abs() < 1e-12 && (again.y - zr.y).abs() < 1e-12);
            let moved = moebius(&w, &z);
            assert!(
                (moved.x - zr.x).abs() < 1e-9 && (moved.y - zr.y).abs() < 1e-9,
                "word mismatch on {z:?}"
            );
        }
    }

    #[test]
    fn reduced_points_of_gamma_translates_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..2000 {
            let z = HalfPlanePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..4.0));
            let gamma = crate::verify::random_gamma(&mut rng, 12);
            let (z1, _) = reduce_fundamental(&z).unwrap();
            let (z2, _) = reduce_fundamental(&moebius(&gamma, &z)).unwrap();
            assert!(
                (z1.x - z2.x).abs() < 1e-8 && (z1.y - z2.y).abs() < 1e-8,
                "z={z:?} gamma={gamma}"
            );
        }
    }

    #[test]
    fn convention_self_test_picks_transpose() {
        assert_eq!(convention_self_test().unwrap(), RightActionConvention::Transpose);
    }
}
