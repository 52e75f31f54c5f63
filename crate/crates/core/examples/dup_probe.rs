// temporary scratch: check for orbit over-counting at scale
use cubic_shapes::enumerate::enumerate_classes;
use cubic_shapes::forms::act;
use cubic_shapes::reduction::reduce;
use cubic_shapes::verify::random_gamma;
use rand::SeedableRng;

fn main() {
    let x = 20_000i64;
    let recs = enumerate_classes(x, false).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0usize;
    let mut checked = 0usize;
    for r in recs.iter().step_by(17) {
        for _ in 0..4 {
            let g = random_gamma(&mut rng, 30);
            let moved = act(&g, &r.rep).unwrap();
            let (canon, _) = reduce(&moved).unwrap();
            checked += 1;
            if canon != r.rep {
                bad += 1;
                if bad <= 10 {
                    println!("UNSTABLE: rep {:?} disc {} -> canon {:?}", r.rep, r.disc, canon);
                }
            }
        }
    }
    println!("orbit-constancy: {bad}/{checked} unstable");

    // Duplicates: same disc, mutually equivalent reps.
    let mut dup = 0usize;
    let mut by_disc: std::collections::BTreeMap<i64, Vec<_>> = Default::default();
    for r in &recs {
        by_disc.entry(r.disc).or_default().push(r.rep);
    }
    'outer: for (d, reps) in &by_disc {
        if reps.len() < 2 { continue; }
        for i in 0..reps.len() {
            for j in i+1..reps.len() {
                // same orbit iff reduce maps one to the other (reps are canonical)
                let (ci, _) = reduce(&reps[i]).unwrap();
                let (cj, _) = reduce(&reps[j]).unwrap();
                if ci == cj {
                    dup += 1;
                    if dup <= 10 { println!("DUP at disc {d}: {:?} {:?}", reps[i], reps[j]); }
                    if dup > 50 { break 'outer; }
                }
            }
        }
    }
    println!("self-reduce duplicate pairs: {dup}");
}
