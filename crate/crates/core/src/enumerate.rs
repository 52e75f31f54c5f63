//! Enumeration of SL2(Z) classes of nonsingular integral binary cubic forms
//! with 0 < |disc| <= X, and the brute-force oracle the fast path is tested
//! against.
//!
//! Positive discriminant: every class has a representative whose Hessian is
//! Gauss-reduced, and all such forms satisfy
//!     |a| <= (2/3)^{3/2} X^{1/4},  |b| <= 1.5 |a| + 1.415 X^{1/4},
//!     0 < b^2 - 3ac <= sqrt(X),    |bc - 9ad| <= b^2 - 3ac,
//! (AM-GM on the root differences gives the a and b constants), which the
//! scan walks directly. Negative discriminant: the analogous windows for the
//! root-weighted quadratic of [`crate::reduction`], derived from
//!     mu^2 >= 2,  1/2 <= tau <= min(kappa/2, kappa^{1/3}),  kappa = sqrt(X)/(2a^2)
//! where mu is the distance from the real to a complex root and tau the
//! imaginary part. Every scanned candidate is emitted only if it equals the
//! canonical orbit minimum, so records are unique without cross-shard
//! deduplication and output is deterministic for any shard count.

use crate::error::EnumError;
use crate::forms::{disc, in_dual_lattice, is_irreducible, IntegralCubicForm};
use crate::reduction::{
    hessian_reduced_loose, is_canonical_among_box, julia_reduced_loose, reduce, small_box,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::time::Duration;

/// One SL2(Z) orbit of nonsingular integral forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassRecord {
    pub disc: i64,
    pub rep: IntegralCubicForm,
    pub stabilizer_order: u32,
    pub in_dual: bool,
    pub irreducible: bool,
}

/// Summary of an enumeration run.
#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub max_disc: i64,
    pub dual: bool,
    pub plus_classes: usize,
    pub minus_classes: usize,
    pub shards: usize,
    pub elapsed: Duration,
}

/// Class count at one discriminant: plain count and 3x the stabilizer-weighted
/// count (the weight appearing in the twisted Dirichlet series), kept exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCount {
    pub h: u32,
    pub weighted_thirds: u32,
    pub h_irreducible: u32,
    pub weighted_thirds_irreducible: u32,
}

impl ClassCount {
    pub fn weighted(&self) -> f64 {
        self.weighted_thirds as f64 / 3.0
    }

    pub fn weighted_irreducible(&self) -> f64 {
        self.weighted_thirds_irreducible as f64 / 3.0
    }
}

const ORACLE_LIMIT: i64 = 10_000;

/// All classes with 0 < |disc| <= x, optionally restricted to the dual lattice.
pub fn enumerate_classes(x: i64, dual: bool) -> Result<Vec<ClassRecord>, EnumError> {
    enumerate_classes_sharded(x, dual, 1)
}

/// Same as [`enumerate_classes`] with the scan split into `shards` independent
/// slices; the sorted result is identical for every shard count.
pub fn enumerate_classes_sharded(
    x: i64,
    dual: bool,
    shards: usize,
) -> Result<Vec<ClassRecord>, EnumError> {
    enumerate_range_sharded(1, x, dual, shards)
}

/// Classes with lo <= |disc| <= hi (band scan used for checkpointed runs).
pub fn enumerate_range_sharded(
    lo: i64,
    hi: i64,
    dual: bool,
    shards: usize,
) -> Result<Vec<ClassRecord>, EnumError> {
    if lo < 1 || hi < lo {
        return Err(EnumError::BadRange(hi));
    }
    let shards = shards.max(1);
    let mut records: Vec<ClassRecord> = (0..shards)
        .into_par_iter()
        .map(|shard| scan_band(lo, hi, dual, shard, shards))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_unstable();
    Ok(records)
}

pub fn report_for(
    records: &[ClassRecord],
    x: i64,
    dual: bool,
    shards: usize,
    elapsed: Duration,
) -> EnumerationReport {
    EnumerationReport {
        max_disc: x,
        dual,
        plus_classes: records.iter().filter(|r| r.disc > 0).count(),
        minus_classes: records.iter().filter(|r| r.disc < 0).count(),
        shards,
        elapsed,
    }
}

fn scan_band(
    lo: i64,
    hi: i64,
    dual: bool,
    shard: usize,
    shards: usize,
) -> Result<Vec<ClassRecord>, EnumError> {
    let mut out = Vec::new();
    scan_positive(lo, hi, dual, shard, shards, &mut out)?;
    scan_negative(lo, hi, dual, shard, shards, &mut out)?;
    Ok(out)
}

fn take_slice(index: usize, shard: usize, shards: usize) -> bool {
    index % shards == shard
}

fn emit(
    f: IntegralCubicForm,
    d: i64,
    dual: bool,
    positive: bool,
    out: &mut Vec<ClassRecord>,
) -> Result<(), EnumError> {
    if dual && !in_dual_lattice(&f) {
        return Ok(());
    }
    if !is_canonical_among_box(&f, positive)? {
        return Ok(());
    }
    let stab = stabilizer_of_canonical(&f);
    out.push(ClassRecord {
        disc: d,
        rep: f,
        stabilizer_order: stab,
        in_dual: in_dual_lattice(&f),
        irreducible: is_irreducible(&f)?,
    });
    Ok(())
}

fn stabilizer_of_canonical(f: &IntegralCubicForm) -> u32 {
    let mut count = 0;
    for u in small_box() {
        if let Ok(h) = crate::forms::act(u, f) {
            if h == *f {
                count += 1;
            }
        }
    }
    count
}

fn div_floor(n: i128, d: i128) -> i128 {
    debug_assert!(d != 0);
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(n: i128, d: i128) -> i128 {
    -div_floor(-n, d)
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Signed values from..=max interleaved with their negatives; excludes zero.
fn slice_signed(from: i64, max: i64) -> impl Iterator<Item = i64> {
    (from..=max).flat_map(|v| [v, -v])
}

/// Positive-discriminant scan over Hessian-reduced forms.
fn scan_positive(
    lo: i64,
    hi: i64,
    dual: bool,
    shard: usize,
    shards: usize,
    out: &mut Vec<ClassRecord>,
) -> Result<(), EnumError> {
    let quarter = (hi as f64).powf(0.25);
    let sqrt_hi = isqrt(hi) as i128;
    let amax = ((2.0f64 / 3.0).powf(1.5) * quarter).floor() as i64 + 1;
    let mut slice_idx = 0usize;

    // a = 0: forms y (b x^2 + c x y + d y^2), Hessian (b^2, bc, c^2 - 3bd).
    let bmax0 = quarter.floor() as i64 + 1;
    for b in slice_signed(1, bmax0) {
        slice_idx += 1;
        if !take_slice(slice_idx, shard, shards) {
            continue;
        }
        for c in -b.abs()..=b.abs() {
            // lo <= b^2 (c^2 - 4 b d) <= hi
            let b2 = (b as i128) * (b as i128);
            let t_lo = div_ceil(lo as i128, b2);
            let t_hi = div_floor(hi as i128, b2);
            if t_lo > t_hi {
                continue;
            }
            let c2 = (c as i128) * (c as i128);
            let (lo4, hi4) = (c2 - t_hi, c2 - t_lo);
            let den = 4 * b as i128;
            let (dlo, dhi) = if den > 0 {
                (div_ceil(lo4, den), div_floor(hi4, den))
            } else {
                (div_ceil(hi4, den), div_floor(lo4, den))
            };
            for dd in dlo..=dhi {
                let Ok(d64) = i64::try_from(dd) else { continue };
                let f = IntegralCubicForm::new(0, b, c, d64);
                let Ok(dv) = disc(&f) else { continue };
                if dv < lo as i128 || dv > hi as i128 {
                    continue;
                }
                if !hessian_reduced_loose(&f) {
                    continue;
                }
                emit(f, dv as i64, dual, true, out)?;
            }
        }
    }

    // a != 0.
    for a in slice_signed(1, amax) {
        slice_idx += 1;
        if !take_slice(slice_idx, shard, shards) {
            continue;
        }
        let bmax = (1.5 * a.abs() as f64 + 1.415 * quarter).floor() as i64 + 2;
        let a3 = 3 * a as i128;
        for b in -bmax..=bmax {
            let b2 = (b as i128) * (b as i128);
            // 1 <= P = b^2 - 3 a c <= sqrt(hi)
            let (c_lo, c_hi) = if a > 0 {
                (div_ceil(b2 - sqrt_hi, a3), div_floor(b2 - 1, a3))
            } else {
                (div_ceil(b2 - 1, a3), div_floor(b2 - sqrt_hi, a3))
            };
            for cc in c_lo..=c_hi {
                let Ok(c) = i64::try_from(cc) else { continue };
                let p = b2 - a3 * cc;
                if p < 1 || p > sqrt_hi {
                    continue;
                }
                // |Q| = |b c - 9 a d| <= P
                let bc = (b as i128) * cc;
                let den = 9 * a as i128;
                let (d_lo, d_hi) = if a > 0 {
                    (div_ceil(bc - p, den), div_floor(bc + p, den))
                } else {
                    (div_ceil(bc + p, den), div_floor(bc - p, den))
                };
                for dd in d_lo..=d_hi {
                    let Ok(d64) = i64::try_from(dd) else { continue };
                    let r = cc * cc - 3 * (b as i128) * dd;
                    if r < p {
                        continue;
                    }
                    let f = IntegralCubicForm::new(a, b, c, d64);
                    let Ok(dv) = disc(&f) else { continue };
                    if dv < lo as i128 || dv > hi as i128 {
                        continue;
                    }
                    emit(f, dv as i64, dual, true, out)?;
                }
            }
        }
    }
    Ok(())
}

/// Integer d-windows where the concave parabola D(d) lands in [-hi, -lo].
fn negative_disc_windows(a: i64, b: i64, c: i64, lo: i64, hi: i64, dcap: i64) -> Vec<(i64, i64)> {
    // D(d) = -27 a^2 d^2 + (18 a b c - 4 b^3) d + (b^2 c^2 - 4 a c^3)
    let a_ = a as f64;
    let b_ = b as f64;
    let c_ = c as f64;
    let qa = -27.0 * a_ * a_;
    let qb = 18.0 * a_ * b_ * c_ - 4.0 * b_ * b_ * b_;
    let qc = b_ * b_ * c_ * c_ - 4.0 * a_ * c_ * c_ * c_;

    let roots_at = |level: f64| -> Option<(f64, f64)> {
        // qa d^2 + qb d + (qc - level) = 0 with qa < 0
        let disc = qb * qb - 4.0 * qa * (qc - level);
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let r1 = (-qb + s) / (2.0 * qa);
        let r2 = (-qb - s) / (2.0 * qa);
        Some((r1.min(r2), r2.max(r1)))
    };

    let Some((outer_l, outer_r)) = roots_at(-(hi as f64)) else {
        return Vec::new();
    };
    let lo_i = ((outer_l - 2.0).floor() as i64).max(-dcap);
    let hi_i = ((outer_r + 2.0).ceil() as i64).min(dcap);
    if lo_i > hi_i {
        return Vec::new();
    }
    match roots_at(-(lo as f64)) {
        Some((inner_l, inner_r)) => {
            let l_end = ((inner_l + 2.0).ceil() as i64).min(hi_i);
            let r_start = ((inner_r - 2.0).floor() as i64).max(lo_i);
            if r_start <= l_end {
                return vec![(lo_i, hi_i)];
            }
            let mut v = Vec::with_capacity(2);
            if lo_i <= l_end {
                v.push((lo_i, l_end));
            }
            if r_start <= hi_i {
                v.push((r_start, hi_i));
            }
            v
        }
        None => vec![(lo_i, hi_i)],
    }
}

struct NegBounds {
    bmax: i64,
    cmax: i64,
    dmax: i64,
}

fn neg_bounds(a: i64, hi: i64) -> Option<NegBounds> {
    let kappa = (hi as f64).sqrt() / (2.0 * (a * a) as f64);
    if kappa < 0.99 {
        // Reduced forms force kappa = mu^2 tau >= 2 * (1/2) = 1.
        return None;
    }
    let mu_max = (2.0 * kappa).sqrt();
    let tau_max = (kappa / 2.0).min(kappa.cbrt());
    let slack = 1.3;
    let af = a.abs() as f64;
    let bmax = (slack * af * (1.4143 * mu_max + 4.0 * tau_max)).ceil() as i64 + 2;
    let cmax = (slack * af * (4.0 * kappa + 5.0 * tau_max * tau_max)).ceil() as i64 + 2;
    let dmax = (slack * 5.0 * af * kappa * tau_max).ceil() as i64 + 2;
    Some(NegBounds { bmax, cmax, dmax })
}

/// Negative-discriminant scan over loosely Julia-reduced forms.
fn scan_negative(
    lo: i64,
    hi: i64,
    dual: bool,
    shard: usize,
    shards: usize,
    out: &mut Vec<ClassRecord>,
) -> Result<(), EnumError> {
    let quarter = (hi as f64).powf(0.25);
    let mut slice_idx = usize::MAX / 2; // disjoint from the positive scan indices

    // a = 0: C_f has (P, Q, R) = (1, -2 sigma, sigma^2 + 3 tau^2) with
    // sigma = -c/(2b), tau^2 = (4bd - c^2)/(4 b^2); |c| <= |b| when reduced.
    let bmax0 = (1.01 * quarter).ceil() as i64 + 1;
    for b in slice_signed(1, bmax0) {
        slice_idx += 1;
        if !take_slice(slice_idx, shard, shards) {
            continue;
        }
        for c in -b.abs()..=b.abs() {
            // -hi <= D = b^2 c^2 - 4 b^3 d <= -lo
            let b2 = (b as i128) * (b as i128);
            let c2 = (c as i128) * (c as i128);
            let den = 4 * b2 * (b as i128);
            let (lhs, rhs) = (b2 * c2 + lo as i128, b2 * c2 + hi as i128);
            let (dlo, dhi) = if den > 0 {
                (div_ceil(lhs, den), div_floor(rhs, den))
            } else {
                (div_ceil(rhs, den), div_floor(lhs, den))
            };
            for dd in dlo..=dhi {
                let Ok(d64) = i64::try_from(dd) else { continue };
                let f = IntegralCubicForm::new(0, b, c, d64);
                let Ok(dv) = disc(&f) else { continue };
                if dv > -(lo as i128) || dv < -(hi as i128) {
                    continue;
                }
                if !julia_reduced_loose(&f)? {
                    continue;
                }
                emit(f, dv as i64, dual, false, out)?;
            }
        }
    }

    // a != 0.
    let amax = ((hi as f64 / 4.0).powf(0.25)).floor() as i64 + 1;
    for a in slice_signed(1, amax) {
        slice_idx += 1;
        if !take_slice(slice_idx, shard, shards) {
            continue;
        }
        let Some(bounds) = neg_bounds(a, hi) else { continue };
        for b in -bounds.bmax..=bounds.bmax {
            for c in -bounds.cmax..=bounds.cmax {
                for (d_from, d_to) in negative_disc_windows(a, b, c, lo, hi, bounds.dmax) {
                    for d64 in d_from..=d_to {
                        let f = IntegralCubicForm::new(a, b, c, d64);
                        let Ok(dv) = disc(&f) else { continue };
                        if dv > -(lo as i128) || dv < -(hi as i128) {
                            continue;
                        }
                        if !julia_reduced_loose(&f)? {
                            continue;
                        }
                        emit(f, dv as i64, dual, false, out)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Independent oracle: walk an explicit rectangular coefficient box guaranteed
/// to contain a representative of every class with |disc| <= x, canonicalize
/// with [`reduce`], deduplicate. Heavyweight by design; capped at x <= 10^4.
pub fn brute_force_classes(x: i64, dual: bool) -> Result<Vec<ClassRecord>, EnumError> {
    if x < 1 {
        return Err(EnumError::BadRange(x));
    }
    if x > ORACLE_LIMIT {
        return Err(EnumError::OracleScale { limit: ORACLE_LIMIT, got: x });
    }
    let quarter = (x as f64).powf(0.25);
    let sqrt_x = isqrt(x);
    let amax = (0.91 * quarter).ceil() as i64 + 1;

    let a_values: Vec<i64> = (-amax..=amax).collect();
    let reps_per_a: Vec<HashSet<IntegralCubicForm>> = a_values
        .par_iter()
        .map(|&a| brute_force_slice(a, x, quarter, sqrt_x))
        .collect::<Result<Vec<_>, EnumError>>()?;
    let mut all: HashSet<IntegralCubicForm> = HashSet::new();
    for set in reps_per_a {
        all.extend(set);
    }

    let mut records = Vec::with_capacity(all.len());
    for rep in all {
        if dual && !in_dual_lattice(&rep) {
            continue;
        }
        let d = disc(&rep)? as i64;
        records.push(ClassRecord {
            disc: d,
            rep,
            stabilizer_order: crate::reduction::stabilizer_order(&rep)?,
            in_dual: in_dual_lattice(&rep),
            irreducible: is_irreducible(&rep)?,
        });
    }
    records.sort_unstable();
    Ok(records)
}

fn brute_force_slice(
    a: i64,
    x: i64,
    quarter: f64,
    sqrt_x: i64,
) -> Result<HashSet<IntegralCubicForm>, EnumError> {
    let mut reps = HashSet::new();
    let kappa = if a != 0 {
        (x as f64).sqrt() / (2.0 * (a * a) as f64)
    } else {
        0.0
    };
    let tau_max = (kappa / 2.0).min(kappa.cbrt()).max(0.0);
    let bmax = if a == 0 {
        (1.01 * quarter).ceil() as i64 + 1
    } else {
        let neg = 1.3 * a.abs() as f64 * (1.4143 * (2.0 * kappa).sqrt() + 4.0 * tau_max);
        (neg.max(1.5 * a.abs() as f64 + 1.415 * quarter)).ceil() as i64 + 2
    };
    for b in -bmax..=bmax {
        if a == 0 && b == 0 {
            continue; // singular for every (c, d)
        }
        let cmax = if a == 0 {
            b.abs() + 1
        } else {
            let neg = 1.3 * a.abs() as f64 * (4.0 * kappa + 5.0 * tau_max * tau_max);
            let pos = ((b as f64 * b as f64 + sqrt_x as f64) / (3.0 * a.abs() as f64)).ceil();
            neg.max(pos) as i64 + 2
        };
        for c in -cmax..=cmax {
            for (d_from, d_to) in oracle_d_windows(a, b, c, x) {
                for d in d_from..=d_to {
                    let f = IntegralCubicForm::new(a, b, c, d);
                    let Ok(dv) = disc(&f) else { continue };
                    if dv == 0 || dv.unsigned_abs() > x as u128 {
                        continue;
                    }
                    let (canonical, _) = reduce(&f)?;
                    reps.insert(canonical);
                }
            }
        }
    }
    Ok(reps)
}

/// Integer d ranges with |D(d)| <= x: parabola window for a != 0, linear for
/// a = 0 (b != 0); a = b = 0 is singular for every d.
fn oracle_d_windows(a: i64, b: i64, c: i64, x: i64) -> Vec<(i64, i64)> {
    if a != 0 {
        let a_ = a as f64;
        let b_ = b as f64;
        let c_ = c as f64;
        let qa = -27.0 * a_ * a_;
        let qb = 18.0 * a_ * b_ * c_ - 4.0 * b_ * b_ * b_;
        let qc = b_ * b_ * c_ * c_ - 4.0 * a_ * c_ * c_ * c_;
        let disc = qb * qb - 4.0 * qa * (qc + x as f64); // D >= -x boundary
        if disc < 0.0 {
            return Vec::new();
        }
        let s = disc.sqrt();
        let r1 = (-qb + s) / (2.0 * qa);
        let r2 = (-qb - s) / (2.0 * qa);
        vec![(
            (r1.min(r2) - 2.0).floor() as i64,
            (r1.max(r2) + 2.0).ceil() as i64,
        )]
    } else if b != 0 {
        let b2 = (b as i128) * (b as i128);
        let c2 = (c as i128) * (c as i128);
        let den = 4 * b2 * (b as i128);
        let (lhs, rhs) = (b2 * c2 - x as i128, b2 * c2 + x as i128);
        let (dlo, dhi) = if den > 0 {
            (div_ceil(lhs, den), div_floor(rhs, den))
        } else {
            (div_ceil(rhs, den), div_floor(lhs, den))
        };
        vec![(dlo as i64, dhi as i64)]
    } else {
        Vec::new()
    }
}

/// Class numbers per discriminant from a record list.
pub fn class_numbers(records: &[ClassRecord], dual: bool) -> BTreeMap<i64, ClassCount> {
    let mut map: BTreeMap<i64, ClassCount> = BTreeMap::new();
    for r in records {
        if dual && !r.in_dual {
            continue;
        }
        let e = map.entry(r.disc).or_default();
        e.h += 1;
        e.weighted_thirds += 3 / r.stabilizer_order;
        if r.irreducible {
            e.h_irreducible += 1;
            e.weighted_thirds_irreducible += 3 / r.stabilizer_order;
        }
    }
    map
}

pub const RECORD_CSV_HEADER: &str = "disc,a,b,c,d,stab,dual,irreducible";

pub fn record_csv_row(r: &ClassRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.disc,
        r.rep.a,
        r.rep.b,
        r.rep.c,
        r.rep.d,
        r.stabilizer_order,
        r.in_dual as u8,
        r.irreducible as u8
    )
}

pub fn write_records_csv<W: Write>(w: &mut W, records: &[ClassRecord]) -> std::io::Result<()> {
    writeln!(w, "{RECORD_CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", record_csv_row(r))?;
    }
    Ok(())
}

pub fn parse_record_line(line: &str) -> Option<ClassRecord> {
    let mut it = line.split(',');
    let disc: i64 = it.next()?.parse().ok()?;
    let a: i64 = it.next()?.parse().ok()?;
    let b: i64 = it.next()?.parse().ok()?;
    let c: i64 = it.next()?.parse().ok()?;
    let d: i64 = it.next()?.parse().ok()?;
    let stab: u32 = it.next()?.parse().ok()?;
    let dual: u8 = it.next()?.parse().ok()?;
    let irr: u8 = it.next()?.parse().ok()?;
    Some(ClassRecord {
        disc,
        rep: IntegralCubicForm::new(a, b, c, d),
        stabilizer_order: stab,
        in_dual: dual != 0,
        irreducible: irr != 0,
    })
}

/// Append-only checkpointed enumeration. The first line is fixed-width
/// `# max_disc_completed=<n> bytes=<b>` and is rewritten in place after each
/// completed band of 10^4 discriminants; rows past the recorded byte count
/// belong to an interrupted band and are discarded on resume.
pub struct Checkpoint {
    path: std::path::PathBuf,
}

const CHECKPOINT_HEADER_WIDTH: usize = 80;
pub const CHECKPOINT_BAND: i64 = 10_000;

impl Checkpoint {
    pub fn at(path: impl Into<std::path::PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &std::path::Path {
        &self.path
    }

    fn header_line(completed: i64, bytes: u64) -> String {
        let mut s = format!("# max_disc_completed={completed} bytes={bytes}");
        while s.len() < CHECKPOINT_HEADER_WIDTH - 1 {
            s.push(' ');
        }
        s.push('\n');
        s
    }

    /// (completed disc bound, records) or fresh state if the file is absent.
    pub fn load(&self) -> Result<(i64, Vec<ClassRecord>), EnumError> {
        if !self.path.exists() {
            return Ok((0, Vec::new()));
        }
        let file = std::fs::File::open(&self.path)?;
        let mut reader = std::io::BufReader::new(file);
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let bad = |what: &str| EnumError::CorruptCheckpoint {
            path: self.path.display().to_string(),
            what: what.to_string(),
        };
        let rest = header
            .trim()
            .strip_prefix("# max_disc_completed=")
            .ok_or_else(|| bad("missing header"))?;
        let mut parts = rest.split_whitespace();
        let completed: i64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("bad completed field"))?;
        let bytes: u64 = parts
            .next()
            .and_then(|v| v.strip_prefix("bytes="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("bad bytes field"))?;
        let mut records = Vec::new();
        let mut consumed = header.len() as u64;
        let mut line = String::new();
        loop {
            line.clear();
            let n = reader.read_line(&mut line)?;
            if n == 0 || consumed + n as u64 > bytes {
                break;
            }
            consumed += n as u64;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed == RECORD_CSV_HEADER {
                continue;
            }
            records.push(parse_record_line(trimmed).ok_or_else(|| bad("bad record row"))?);
        }
        Ok((completed, records))
    }

    /// Run (or resume) enumeration through |disc| <= x, appending each
    /// completed band before bumping the header. Returns the sorted records.
    pub fn run(&self, x: i64, dual: bool, shards: usize) -> Result<Vec<ClassRecord>, EnumError> {
        use std::io::{Seek, SeekFrom};
        let (mut completed, mut records) = self.load()?;
        if completed == 0 {
            let mut file = std::fs::File::create(&self.path)?;
            let body_start = CHECKPOINT_HEADER_WIDTH as u64 + RECORD_CSV_HEADER.len() as u64 + 1;
            file.write_all(Self::header_line(0, body_start).as_bytes())?;
            file.write_all(format!("{RECORD_CSV_HEADER}\n").as_bytes())?;
            file.sync_all()?;
        }
        while completed < x {
            let band_hi = (completed + CHECKPOINT_BAND).min(x);
            // Checkpoint files always carry the full lattice; dual filtering
            // happens on return so a cache serves both modes.
            let band = enumerate_range_sharded(completed + 1, band_hi, false, shards)?;
            let mut file = std::fs::OpenOptions::new().read(true).write(true).open(&self.path)?;
            let confirmed = Self::read_header_bytes(&mut file)?;
            file.seek(SeekFrom::Start(confirmed))?;
            file.set_len(confirmed)?;
            let mut buf = Vec::new();
            for r in &band {
                buf.extend_from_slice(record_csv_row(r).as_bytes());
                buf.push(b'\n');
            }
            file.write_all(&buf)?;
            file.sync_all()?;
            let new_bytes = confirmed + buf.len() as u64;
            file.seek(SeekFrom::Start(0))?;
            file.write_all(Self::header_line(band_hi, new_bytes).as_bytes())?;
            file.sync_all()?;
            completed = band_hi;
            records.extend(band);
        }
        records.retain(|r| r.disc.unsigned_abs() <= x as u64);
        if dual {
            records.retain(|r| r.in_dual);
        }
        records.sort_unstable();
        records.dedup();
        Ok(records)
    }

    fn read_header_bytes(file: &mut std::fs::File) -> Result<u64, EnumError> {
        use std::io::{Read, Seek, SeekFrom};
        file.seek(SeekFrom::Start(0))?;
        let mut head = vec![0u8; CHECKPOINT_HEADER_WIDTH];
        file.read_exact(&mut head)?;
        let text = String::from_utf8_lossy(&head);
        text.split("bytes=")
            .nth(1)
            .and_then(|v| v.split_whitespace().next())
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| EnumError::CorruptCheckpoint {
                path: "<checkpoint>".into(),
                what: "unreadable header".into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::act;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_equivalence_small() {
        for x in [1, 4, 23, 80] {
            let fast = enumerate_classes(x, false).unwrap();
            let slow = brute_force_classes(x, false).unwrap();
            assert_eq!(fast, slow, "X = {x}");
        }
    }

    #[test]
    fn disc_one_class_has_stabilizer_three() {
        let recs = enumerate_classes(1, false).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].disc, 1);
        assert_eq!(recs[0].stabilizer_order, 3);
        let (canon, _) = reduce(&IntegralCubicForm::new(0, 1, -1, 0)).unwrap();
        assert_eq!(recs[0].rep, canon);
    }

    #[test]
    fn disc_minus_four_class_present() {
        let recs = enumerate_classes(4, false).unwrap();
        let (canon, _) = reduce(&IntegralCubicForm::new(0, 1, 0, 1)).unwrap();
        assert!(recs.iter().any(|r| r.disc == -4 && r.rep == canon));
    }

    #[test]
    fn shard_counts_agree() {
        let one = enumerate_classes_sharded(150, false, 1).unwrap();
        let two = enumerate_classes_sharded(150, false, 2).unwrap();
        let eight = enumerate_classes_sharded(150, false, 8).unwrap();
        assert_eq!(one, two);
        assert_eq!(one, eight);
    }

    #[test]
    fn dual_records_satisfy_congruences() {
        let recs = enumerate_classes(300, true).unwrap();
        assert!(!recs.is_empty());
        for r in &recs {
            assert!(r.rep.b % 3 == 0 && r.rep.c % 3 == 0, "{:?}", r.rep);
        }
        let all = enumerate_classes(300, false).unwrap();
        let dual_from_all: Vec<_> = all.into_iter().filter(|r| r.in_dual).collect();
        assert_eq!(recs, dual_from_all);
    }

    #[test]
    fn orbit_soundness_of_emitted_records() {
        let recs = enumerate_classes(120, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for r in recs.iter().step_by(3) {
            for _ in 0..10 {
                let g = crate::verify::random_gamma(&mut rng, 25);
                let moved = act(&g, &r.rep).unwrap();
                assert_eq!(reduce(&moved).unwrap().0, r.rep);
            }
        }
    }

    #[test]
    fn completeness_small_coefficient_spot_check() {
        let recs = enumerate_classes(300, false).unwrap();
        let reps: HashSet<IntegralCubicForm> = recs.iter().map(|r| r.rep).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut tested = 0;
        while tested < 4000 {
            let f = IntegralCubicForm::new(
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
            );
            let d = disc(&f).unwrap();
            if d == 0 || d.unsigned_abs() > 300 {
                continue;
            }
            tested += 1;
            let (canon, _) = reduce(&f).unwrap();
            assert!(reps.contains(&canon), "missing class of {f} (disc {d})");
        }
    }

    #[test]
    fn class_numbers_weighting() {
        let recs = enumerate_classes(1, false).unwrap();
        let counts = class_numbers(&recs, false);
        let c1 = counts.get(&1).unwrap();
        assert_eq!(c1.h, 1);
        assert_eq!(c1.weighted_thirds, 1); // weight 1/3 from the stabilizer of order 3
    }

    #[test]
    fn checkpoint_resume_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("classes.checkpoint.csv");
        let cp = Checkpoint::at(&path);
        let first = cp.run(60, false, 2).unwrap();
        let direct = enumerate_classes(60, false).unwrap();
        assert_eq!(first, direct);
        let again = cp.run(60, false, 1).unwrap();
        assert_eq!(again, direct);
        let (completed, _) = cp.load().unwrap();
        assert_eq!(completed, 60);
    }
}
