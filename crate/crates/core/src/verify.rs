//! Runtime invariant suites behind `cubic-shapes verify`, shared with the
//! integration tests. Each suite returns a one-line verdict; a failure
//! carries the offending sample.

use crate::forms::{
    act, act_real, disc, disc_real, involution, pairing, pairing_real, IntegralCubicForm,
    RealCubicForm, RealMatrix2, UnimodularMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one named suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        Self { name, passed: true, detail: detail.into() }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        Self { name, passed: false, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Random SL2(Z) element as a bounded word in T, T^-1, S, -I.
pub fn random_gamma(rng: &mut impl Rng, max_entry: i64) -> UnimodularMatrix {
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

fn random_form(rng: &mut impl Rng, max: i64) -> IntegralCubicForm {
    IntegralCubicForm::new(
        rng.gen_range(-max..=max),
        rng.gen_range(-max..=max),
        rng.gen_range(-max..=max),
        rng.gen_range(-max..=max),
    )
}

fn random_real_matrix(rng: &mut impl Rng) -> RealMatrix2 {
    loop {
        let g = RealMatrix2::new([
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        ]);
        if g.det().abs() >= 0.25 {
            return g;
        }
    }
}

/// Exact integer relative invariance of the discriminant, `samples` random
/// (gamma, f) pairs. The `disc_fn` hook exists so tests can inject a tampered
/// formula as a negative control.
pub fn suite_disc_invariance(
    samples: usize,
    seed: u64,
    disc_fn: impl Fn(&IntegralCubicForm) -> i128,
) -> SuiteResult {
    let name = "disc-invariance";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let f = random_form(&mut rng, 100);
        let g = random_gamma(&mut rng, 50);
        let moved = match act(&g, &f) {
            Ok(m) => m,
            Err(e) => return SuiteResult::fail(name, format!("sample {i}: {e}")),
        };
        if disc_fn(&moved) != disc_fn(&f) {
            return SuiteResult::fail(name, format!("sample {i}: gamma={g} f={f}"));
        }
    }
    SuiteResult::pass(name, format!("{samples} samples exact"))
}

/// Pairing invariance under (g, g^iota) and the involution square, both
/// within 1e-10 relative on `samples` random triples.
pub fn suite_pairing_involution(samples: usize, seed: u64) -> SuiteResult {
    let name = "pairing-involution";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let x = RealCubicForm::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let y = RealCubicForm::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let g = random_real_matrix(&mut rng);
        let gi = match involution(&g) {
            Ok(v) => v,
            Err(e) => return SuiteResult::fail(name, format!("sample {i}: {e}")),
        };
        let lhs = pairing_real(&act_real(&g, &x), &act_real(&gi, &y));
        let rhs = pairing_real(&x, &y);
        let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-10 {
            return SuiteResult::fail(name, format!("sample {i}: relative error {rel:.3e}"));
        }
        let gii = involution(&gi).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let err = (gii.m[r][c] - g.m[r][c]).abs();
                if err > 1e-12 {
                    return SuiteResult::fail(name, format!("sample {i}: iota^2 error {err:.3e}"));
                }
            }
        }
    }
    SuiteResult::pass(name, format!("{samples} samples, worst relative {worst:.2e}"))
}

/// act(g h, f) = act(g, act(h, f)) exactly on `samples` random triples.
pub fn suite_action_homomorphism(samples: usize, seed: u64) -> SuiteResult {
    let name = "action-homomorphism";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let f = random_form(&mut rng, 100);
        let g = random_gamma(&mut rng, 50);
        let h = random_gamma(&mut rng, 50);
        let gh = match g.mul(&h) {
            Ok(v) => v,
            Err(e) => return SuiteResult::fail(name, format!("sample {i}: {e}")),
        };
        let lhs = act(&gh, &f);
        let rhs = act(&h, &f).and_then(|m| act(&g, &m));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            other => return SuiteResult::fail(name, format!("sample {i}: {other:?}")),
        }
    }
    SuiteResult::pass(name, format!("{samples} samples exact"))
}

/// Real relative invariance disc(g f) = det(g)^6 disc(f) within 1e-9.
pub fn suite_real_disc_invariance(samples: usize, seed: u64) -> SuiteResult {
    let name = "real-disc-invariance";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..samples {
        // Unit scale keeps the cancellation error of the degree-4 invariant
        // below the 1e-9 gate; the identity itself is scale-free.
        let f = RealCubicForm::new(
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
        );
        let g = loop {
            let g = RealMatrix2::new([
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            ]);
            if g.det().abs() >= 0.25 {
                break g;
            }
        };
        let lhs = disc_real(&act_real(&g, &f));
        let rhs = g.chi() * disc_real(&f);
        let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-9 {
            return SuiteResult::fail(name, format!("sample {i}: relative error {rel:.3e}"));
        }
    }
    SuiteResult::pass(name, format!("{samples} samples, worst relative {worst:.2e}"))
}

/// Orbit round-trips of the singular classifier across all three families.
pub fn suite_singular_roundtrip(samples: usize, seed: u64) -> SuiteResult {
    use crate::forms::{singular_classify, SingularClass};
    let name = "singular-classifier";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let expected = match i % 3 {
            0 => SingularClass::TypeI { m: rng.gen_range(1..60i64) },
            1 => {
                let m = rng.gen_range(1..40i64);
                SingularClass::TypeII { m, n: rng.gen_range(0..m) }
            }
            _ => {
                let m = rng.gen_range(1..15i64);
                SingularClass::TypeIIDual { m, n: rng.gen_range(0..3 * m) }
            }
        };
        let (base, dual) = match expected {
            SingularClass::TypeI { m } => (IntegralCubicForm::new(0, 0, 0, m), i % 2 == 0),
            SingularClass::TypeII { m, n } => (IntegralCubicForm::new(0, 0, m, n), false),
            SingularClass::TypeIIDual { m, n } => (IntegralCubicForm::new(0, 0, 3 * m, n), true),
            SingularClass::Zero => unreachable!(),
        };
        // Type I invariants are shared between the two lattices.
        let expected = match (expected, dual) {
            (SingularClass::TypeI { m }, _) => SingularClass::TypeI { m },
            (other, _) => other,
        };
        let gamma = random_gamma(&mut rng, 30);
        let moved = match act(&gamma, &base) {
            Ok(v) => v,
            Err(e) => return SuiteResult::fail(name, format!("sample {i}: {e}")),
        };
        match singular_classify(&moved, dual) {
            Ok(got) if got == expected => {}
            other => {
                return SuiteResult::fail(
                    name,
                    format!("sample {i}: base {base} gamma {gamma} -> {other:?}, expected {expected:?}"),
                )
            }
        }
    }
    SuiteResult::pass(name, format!("{samples} round-trips exact"))
}

/// Reference discriminant for the suites (the production formula).
pub fn production_disc(f: &IntegralCubicForm) -> i128 {
    disc(f).expect("suite forms stay in range")
}
