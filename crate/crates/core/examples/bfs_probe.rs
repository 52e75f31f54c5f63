// temporary scratch: independent class count via orbit BFS (no reduce())
use cubic_shapes::enumerate::enumerate_classes;
use cubic_shapes::forms::{act, disc, IntegralCubicForm, UnimodularMatrix};
use std::collections::{BTreeMap, HashSet, VecDeque};

fn main() {
    let xcap: i64 = 2000;
    let coeff_seed = 25i64; // seeds: all forms with small coeffs and |D| <= xcap
    let coeff_path = 600i64; // BFS may wander this far
    let gens = [
        UnimodularMatrix::T,
        UnimodularMatrix::T.inverse(),
        UnimodularMatrix::S,
        UnimodularMatrix::S.inverse(),
        UnimodularMatrix::NEG_IDENTITY,
    ];
    let mut seen: HashSet<IntegralCubicForm> = HashSet::new();
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for a in -coeff_seed..=coeff_seed {
        for b in -coeff_seed..=coeff_seed {
            for c in -coeff_seed..=coeff_seed {
                for d in -coeff_seed..=coeff_seed {
                    let f = IntegralCubicForm::new(a, b, c, d);
                    let dv = disc(&f).unwrap();
                    if dv == 0 || dv.unsigned_abs() > xcap as u128 {
                        continue;
                    }
                    if seen.contains(&f) {
                        continue;
                    }
                    // BFS the whole orbit within the path box
                    let mut queue = VecDeque::new();
                    queue.push_back(f);
                    seen.insert(f);
                    while let Some(g) = queue.pop_front() {
                        for gen in &gens {
                            if let Ok(h) = act(gen, &g) {
                                if h.coeffs().iter().all(|v| v.abs() <= coeff_path)
                                    && !seen.contains(&h)
                                {
                                    seen.insert(h);
                                    queue.push_back(h);
                                }
                            }
                        }
                    }
                    *counts.entry(dv as i64).or_default() += 1;
                }
            }
        }
    }
    let bfs_pos: usize = counts.iter().filter(|(d, _)| **d > 0).map(|(_, c)| c).sum();
    let bfs_neg: usize = counts.iter().filter(|(d, _)| **d < 0).map(|(_, c)| c).sum();
    println!("BFS components: pos={bfs_pos} neg={bfs_neg}");

    let recs = enumerate_classes(xcap, false).unwrap();
    let en_pos = recs.iter().filter(|r| r.disc > 0).count();
    let en_neg = recs.iter().filter(|r| r.disc < 0).count();
    println!("enumerate:      pos={en_pos} neg={en_neg}");

    // per-disc comparison for first mismatches
    let mut en_counts: BTreeMap<i64, usize> = BTreeMap::new();
    for r in &recs {
        *en_counts.entry(r.disc).or_default() += 1;
    }
    let mut mismatches = 0;
    for (d, c) in &counts {
        let e = en_counts.get(d).copied().unwrap_or(0);
        if e != *c {
            mismatches += 1;
            if mismatches <= 12 {
                println!("disc {d}: bfs={c} enumerate={e}");
            }
        }
    }
    for (d, e) in &en_counts {
        if !counts.contains_key(d) {
            mismatches += 1;
            if mismatches <= 12 {
                println!("disc {d}: bfs=MISSING enumerate={e}");
            }
        }
    }
    println!("mismatched discs: {mismatches}");
}
