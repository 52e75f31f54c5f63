//! Exact algebra of binary cubic forms.
//!
//! A form (a, b, c, d) stands for a x^3 + b x^2 y + c x y^2 + d y^3. A matrix
//! g = [[p, q], [r, s]] acts by the coordinate substitution
//! x -> p x + r y, y -> q x + s y, which makes the listed stability group of
//! the base form (0, 1, -1, 0) act trivially and gives the composition law
//! act(g, act(h, f)) = act(g h, f).

use crate::error::FormsError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integral binary cubic form. The zero form is permitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralCubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Binary cubic form with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealCubicForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Element of SL2(Z), row-major [[p, q], [r, s]] with p s - q r = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
}

/// Real 2x2 matrix; operations that need G+ check det > 0 themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix2 {
    pub m: [[f64; 2]; 2],
}

/// Exact rational whose denominator divides 3, stored as 3x the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThirdInteger {
    thirds: i128,
}

/// Orbit invariants of an integral form of discriminant zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularClass {
    /// The zero form.
    Zero,
    /// Orbit of (0, 0, 0, m), m >= 1: m times the cube of a primitive linear form.
    TypeI { m: i64 },
    /// Orbit of (0, 0, m, n), m >= 1, 0 <= n < m.
    TypeII { m: i64, n: i64 },
    /// Dual-lattice orbit of (0, 0, 3m, n), m >= 1, 0 <= n < 3m.
    TypeIIDual { m: i64, n: i64 },
}

impl IntegralCubicForm {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub const ZERO: Self = Self::new(0, 0, 0, 0);

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn coeffs(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn to_real(&self) -> RealCubicForm {
        RealCubicForm {
            a: self.a as f64,
            b: self.b as f64,
            c: self.c as f64,
            d: self.d as f64,
        }
    }

    /// Evaluate f(x, y) exactly.
    pub fn eval(&self, x: i64, y: i64) -> Result<i128, FormsError> {
        let (x, y) = (x as i128, y as i128);
        let terms = [
            mul3(self.a as i128, x, x).and_then(|t| t.checked_mul(x)),
            mul3(self.b as i128, x, x).and_then(|t| t.checked_mul(y)),
            mul3(self.c as i128, x, y).and_then(|t| t.checked_mul(y)),
            mul3(self.d as i128, y, y).and_then(|t| t.checked_mul(y)),
        ];
        let mut acc: i128 = 0;
        for t in terms {
            acc = acc
                .checked_add(t.ok_or(FormsError::Overflow { context: "eval" })?)
                .ok_or(FormsError::Overflow { context: "eval" })?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntegralCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

impl RealCubicForm {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }
}

fn mul3(a: i128, b: i128, c: i128) -> Option<i128> {
    a.checked_mul(b)?.checked_mul(c)
}

impl UnimodularMatrix {
    pub const IDENTITY: Self = Self { p: 1, q: 0, r: 0, s: 1 };

    /// -I, which negates every cubic form (odd degree).
    pub const NEG_IDENTITY: Self = Self { p: -1, q: 0, r: 0, s: -1 };

    /// S = [[0, 1], [-1, 0]].
    pub const S: Self = Self { p: 0, q: 1, r: -1, s: 0 };

    /// T = [[1, 0], [1, 1]]; acts by x -> x + y.
    pub const T: Self = Self { p: 1, q: 0, r: 1, s: 1 };

    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self, FormsError> {
        let det = (p as i128) * (s as i128) - (q as i128) * (r as i128);
        if det != 1 {
            return Err(FormsError::NotUnimodular { det: det.clamp(i64::MIN as i128, i64::MAX as i128) as i64 });
        }
        Ok(Self { p, q, r, s })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn inverse(&self) -> Self {
        // det = 1, so the adjugate is the inverse.
        Self { p: self.s, q: -self.q, r: -self.r, s: self.p }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FormsError> {
        let a = self.to_i128();
        let b = other.to_i128();
        let prod = [
            a[0].checked_mul(b[0]).zip(a[1].checked_mul(b[2])),
            a[0].checked_mul(b[1]).zip(a[1].checked_mul(b[3])),
            a[2].checked_mul(b[0]).zip(a[3].checked_mul(b[2])),
            a[2].checked_mul(b[1]).zip(a[3].checked_mul(b[3])),
        ];
        let mut out = [0i64; 4];
        for (slot, pair) in out.iter_mut().zip(prod) {
            let (u, v) = pair.ok_or(FormsError::Overflow { context: "matrix multiply" })?;
            let sum = u.checked_add(v).ok_or(FormsError::Overflow { context: "matrix multiply" })?;
            *slot = i64::try_from(sum).map_err(|_| FormsError::Overflow { context: "matrix multiply" })?;
        }
        Ok(Self { p: out[0], q: out[1], r: out[2], s: out[3] })
    }

    pub fn to_real(&self) -> RealMatrix2 {
        RealMatrix2 {
            m: [[self.p as f64, self.q as f64], [self.r as f64, self.s as f64]],
        }
    }

    fn to_i128(&self) -> [i128; 4] {
        [self.p as i128, self.q as i128, self.r as i128, self.s as i128]
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries().iter().map(|e| e.abs()).max().unwrap()
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.p, self.q, self.r, self.s)
    }
}

impl RealMatrix2 {
    pub const IDENTITY: Self = Self { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub fn new(m: [[f64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// chi(g) = det(g)^6, the relative-invariance factor of the discriminant.
    pub fn chi(&self) -> f64 {
        self.det().powi(6)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        Self::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn inverse(&self) -> Result<Self, FormsError> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(FormsError::SingularMatrix);
        }
        Ok(Self::new([
            [self.m[1][1] / det, -self.m[0][1] / det],
            [-self.m[1][0] / det, self.m[0][0] / det],
        ]))
    }

    pub fn transpose(&self) -> Self {
        Self::new([
            [self.m[0][0], self.m[1][0]],
            [self.m[0][1], self.m[1][1]],
        ])
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new([
            [k * self.m[0][0], k * self.m[0][1]],
            [k * self.m[1][0], k * self.m[1][1]],
        ])
    }
}

/// act(g, f): substitute x -> p x + r y, y -> q x + s y and expand.
pub fn act(g: &UnimodularMatrix, f: &IntegralCubicForm) -> Result<IntegralCubicForm, FormsError> {
    let [p, q, r, s] = g.to_i128();
    let coeffs = act_i128([p, q, r, s], [f.a as i128, f.b as i128, f.c as i128, f.d as i128])?;
    let mut out = [0i64; 4];
    for (slot, v) in out.iter_mut().zip(coeffs) {
        *slot = i64::try_from(v).map_err(|_| FormsError::Overflow { context: "act" })?;
    }
    Ok(IntegralCubicForm::new(out[0], out[1], out[2], out[3]))
}

/// Same substitution on i128 coefficients, overflow-checked.
pub(crate) fn act_i128(g: [i128; 4], f: [i128; 4]) -> Result<[i128; 4], FormsError> {
    let [p, q, r, s] = g;
    let [a, b, c, d] = f;
    let ov = FormsError::Overflow { context: "act" };
    let term = |x: i128, y: i128, z: i128, w: i128| -> Result<i128, FormsError> {
        x.checked_mul(y)
            .and_then(|t| t.checked_mul(z))
            .and_then(|t| t.checked_mul(w))
            .ok_or(ov.clone())
    };
    let sum4 = |t: [i128; 4]| -> Result<i128, FormsError> {
        t.iter().try_fold(0i128, |acc, &v| acc.checked_add(v).ok_or(ov.clone()))
    };
    let a2 = sum4([term(a, p, p, p)?, term(b, p, p, q)?, term(c, p, q, q)?, term(d, q, q, q)?])?;
    let b2 = sum4([
        term(3 * a, p, p, r)?,
        term(b, p, p, s)?.checked_add(term(2 * b, p, q, r)?).ok_or(ov.clone())?,
        term(2 * c, p, q, s)?.checked_add(term(c, q, q, r)?).ok_or(ov.clone())?,
        term(3 * d, q, q, s)?,
    ])?;
    let c2 = sum4([
        term(3 * a, p, r, r)?,
        term(2 * b, p, r, s)?.checked_add(term(b, q, r, r)?).ok_or(ov.clone())?,
        term(c, p, s, s)?.checked_add(term(2 * c, q, r, s)?).ok_or(ov.clone())?,
        term(3 * d, q, s, s)?,
    ])?;
    let d2 = sum4([term(a, r, r, r)?, term(b, r, r, s)?, term(c, r, s, s)?, term(d, s, s, s)?])?;
    Ok([a2, b2, c2, d2])
}

/// Real-matrix action, same substitution in f64.
pub fn act_real(g: &RealMatrix2, f: &RealCubicForm) -> RealCubicForm {
    let p = g.m[0][0];
    let q = g.m[0][1];
    let r = g.m[1][0];
    let s = g.m[1][1];
    let RealCubicForm { a, b, c, d } = *f;
    RealCubicForm {
        a: a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q,
        b: 3.0 * a * p * p * r
            + b * (p * p * s + 2.0 * p * q * r)
            + c * (2.0 * p * q * s + q * q * r)
            + 3.0 * d * q * q * s,
        c: 3.0 * a * p * r * r
            + b * (2.0 * p * r * s + q * r * r)
            + c * (p * s * s + 2.0 * q * r * s)
            + 3.0 * d * q * s * s,
        d: a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s,
    }
}

/// D(f) = 18abcd - 4b^3 d + b^2 c^2 - 4 a c^3 - 27 a^2 d^2, overflow-checked.
pub fn disc(f: &IntegralCubicForm) -> Result<i128, FormsError> {
    disc_i128(f.a as i128, f.b as i128, f.c as i128, f.d as i128)
}

pub(crate) fn disc_i128(a: i128, b: i128, c: i128, d: i128) -> Result<i128, FormsError> {
    let ov = FormsError::Overflow { context: "disc" };
    let p4 = |x: i128, y: i128, z: i128, w: i128| -> Option<i128> {
        x.checked_mul(y)?.checked_mul(z)?.checked_mul(w)
    };
    let t1 = p4(18 * a, b, c, d).ok_or(ov.clone())?;
    let t2 = p4(4 * b, b, b, d).ok_or(ov.clone())?;
    let t3 = p4(b, b, c, c).ok_or(ov.clone())?;
    let t4 = p4(4 * a, c, c, c).ok_or(ov.clone())?;
    let t5 = p4(27 * a, a, d, d).ok_or(ov.clone())?;
    t1.checked_sub(t2)
        .and_then(|v| v.checked_add(t3))
        .and_then(|v| v.checked_sub(t4))
        .and_then(|v| v.checked_sub(t5))
        .ok_or(ov)
}

/// Discriminant of a real form.
pub fn disc_real(f: &RealCubicForm) -> f64 {
    let RealCubicForm { a, b, c, d } = *f;
    18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c
        - 27.0 * a * a * d * d
}

/// Hessian covariant quadratic (P, Q, R) with
/// P = b^2 - 3ac, Q = bc - 9ad, R = c^2 - 3bd. Its discriminant is -3 D(f).
pub fn hessian(f: &IntegralCubicForm) -> (i128, i128, i128) {
    let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
    (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)
}

impl ThirdInteger {
    pub fn from_thirds(thirds: i128) -> Self {
        Self { thirds }
    }

    /// 3x the value; always exact.
    pub fn thirds(&self) -> i128 {
        self.thirds
    }

    pub fn is_zero(&self) -> bool {
        self.thirds == 0
    }

    /// (numerator, denominator) in lowest terms, denominator 1 or 3.
    pub fn reduced(&self) -> (i128, i128) {
        if self.thirds % 3 == 0 {
            (self.thirds / 3, 1)
        } else {
            (self.thirds, 3)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.thirds as f64 / 3.0
    }
}

impl fmt::Display for ThirdInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.reduced();
        if den == 1 {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/3")
        }
    }
}

impl std::ops::Neg for ThirdInteger {
    type Output = Self;
    fn neg(self) -> Self {
        Self { thirds: -self.thirds }
    }
}

/// Alternating pairing <x, y> = x4 y1 - (1/3) x3 y2 + (1/3) x2 y3 - x1 y4, exact.
pub fn pairing(x: &IntegralCubicForm, y: &IntegralCubicForm) -> Result<ThirdInteger, FormsError> {
    let ov = FormsError::Overflow { context: "pairing" };
    let m = |u: i64, v: i64| (u as i128).checked_mul(v as i128);
    let t1 = m(x.d, y.a).and_then(|v| v.checked_mul(3)).ok_or(ov.clone())?;
    let t2 = m(x.c, y.b).ok_or(ov.clone())?;
    let t3 = m(x.b, y.c).ok_or(ov.clone())?;
    let t4 = m(x.a, y.d).and_then(|v| v.checked_mul(3)).ok_or(ov.clone())?;
    let thirds = t1
        .checked_sub(t2)
        .and_then(|v| v.checked_add(t3))
        .and_then(|v| v.checked_sub(t4))
        .ok_or(ov)?;
    Ok(ThirdInteger::from_thirds(thirds))
}

/// Pairing of real quadruples.
pub fn pairing_real(x: &RealCubicForm, y: &RealCubicForm) -> f64 {
    x.d * y.a - x.c * y.b / 3.0 + x.b * y.c / 3.0 - x.a * y.d
}

/// g^iota = [[0,-1],[1,0]] (g^-1)^T [[0,1],[-1,0]]; satisfies
/// <g x, g^iota y> = <x, y> and iota^2 = id.
pub fn involution(g: &RealMatrix2) -> Result<RealMatrix2, FormsError> {
    let j = RealMatrix2::new([[0.0, -1.0], [1.0, 0.0]]);
    let j_inv = RealMatrix2::new([[0.0, 1.0], [-1.0, 0.0]]);
    let inv_t = g.inverse()?.transpose();
    Ok(j.mul(&inv_t).mul(&j_inv))
}

/// True iff 3 | b and 3 | c, i.e. f lies in the dual lattice.
pub fn in_dual_lattice(f: &IntegralCubicForm) -> bool {
    f.b % 3 == 0 && f.c % 3 == 0
}

/// Exact irreducibility over Q for a nonsingular form, by rational root search.
pub fn is_irreducible(f: &IntegralCubicForm) -> Result<bool, FormsError> {
    if disc(f)? == 0 {
        return Err(FormsError::ZeroDiscriminant);
    }
    // A linear factor corresponds to a root (p : q) in P^1(Q). The root (1 : 0)
    // occurs iff a = 0 (then y | f); roots with q >= 1 need q | a and p | d.
    if f.a == 0 {
        return Ok(false);
    }
    if f.d == 0 {
        return Ok(false); // root (0 : 1)
    }
    let ps = divisors(f.d.unsigned_abs());
    let qs = divisors(f.a.unsigned_abs());
    for &q in &qs {
        for &p in &ps {
            if gcd_u64(p, q) != 1 {
                continue;
            }
            let (p, q) = (p as i64, q as i64);
            if f.eval(p, q)? == 0 || f.eval(-p, q)? == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn divisors(n: u64) -> Vec<u64> {
    debug_assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i.saturating_mul(i) <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended gcd: returns (g, u, v) with u a + v b = g = gcd(a, b), g >= 0.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Classify a singular (discriminant zero) integral form by its orbit invariants.
///
/// The repeated primitive root point (p : q) is read off the Hessian (which
/// degenerates to k l^2 for a double factor l and vanishes for perfect cubes),
/// the root is moved to (1 : 0) by an explicit unimodular matrix, and the
/// residual parabolic stabilizer together with -I normalizes the invariants.
pub fn singular_classify(f: &IntegralCubicForm, dual: bool) -> Result<SingularClass, FormsError> {
    if dual && !f.is_zero() && !in_dual_lattice(f) {
        return Err(FormsError::NotInDualLattice { a: f.a, b: f.b, c: f.c, d: f.d });
    }
    if f.is_zero() {
        return Ok(SingularClass::Zero);
    }
    let d = disc(f)?;
    if d != 0 {
        return Err(FormsError::NonzeroDiscriminant { disc: d });
    }
    let (hp, hq, _hr) = hessian(f);
    let (p, q): (i128, i128) = if hp == 0 && hq == 0 && _hr == 0 {
        // Perfect cube m * l^3.
        if f.a != 0 {
            primitive_pair(-(f.b as i128), 3 * f.a as i128)
        } else {
            // Cube with a = 0 forces b = c = 0; the repeated root is (1 : 0).
            (1, 0)
        }
    } else if hp != 0 {
        primitive_pair(-hq, 2 * hp)
    } else {
        // P = 0 with disc(H) = Q^2 - 4 P R = -3 D = 0 forces Q = 0, so H = R y^2
        // with double root (1 : 0).
        (1, 0)
    };
    // Complete (p, q) to delta in SL2(Z): p s - q r = 1 via p u + q v = 1.
    let (g, u, v) = ext_gcd(p, q);
    if g != 1 {
        return Err(FormsError::Internal { what: "repeated root point not primitive" });
    }
    let delta = act_i128(
        [p, q, -v, u],
        [f.a as i128, f.b as i128, f.c as i128, f.d as i128],
    )?;
    let [a2, b2, m0, n0] = delta;
    if a2 != 0 || b2 != 0 {
        return Err(FormsError::Internal { what: "repeated root not moved to (1:0)" });
    }
    let (m, n) = if m0 < 0 { (-m0, -n0) } else { (m0, n0) };
    let fits = |v: i128, ctx: &'static str| -> Result<i64, FormsError> {
        i64::try_from(v).map_err(|_| FormsError::Overflow { context: ctx })
    };
    if m == 0 {
        let mag = n.abs();
        if mag == 0 {
            return Err(FormsError::Internal { what: "vanishing singular normal form" });
        }
        return Ok(SingularClass::TypeI { m: fits(mag, "singular_classify")? });
    }
    let n = n.rem_euclid(m);
    if dual {
        if m % 3 != 0 {
            return Err(FormsError::Internal { what: "dual singular form with 3 not dividing m" });
        }
        Ok(SingularClass::TypeIIDual { m: fits(m / 3, "singular_classify")?, n: fits(n, "singular_classify")? })
    } else {
        Ok(SingularClass::TypeII { m: fits(m, "singular_classify")?, n: fits(n, "singular_classify")? })
    }
}

fn primitive_pair(u: i128, v: i128) -> (i128, i128) {
    let g = gcd_i128(u, v);
    debug_assert!(g > 0);
    (u / g, v / g)
}
