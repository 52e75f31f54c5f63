// temporary scratch: density probe
use cubic_shapes::enumerate::{enumerate_classes, class_numbers};
fn main() {
    for x in [10_000i64, 30_000, 100_000] {
        let t = std::time::Instant::now();
        let recs = enumerate_classes(x, false).unwrap();
        let el = t.elapsed();
        let pos_irr: u32 = class_numbers(&recs, false).iter().filter(|(m, _)| **m > 0).map(|(_, c)| c.h_irreducible).sum();
        let neg_irr: u32 = class_numbers(&recs, false).iter().filter(|(m, _)| **m < 0).map(|(_, c)| c.h_irreducible).sum();
        let pos_all = recs.iter().filter(|r| r.disc > 0).count();
        let neg_all = recs.iter().filter(|r| r.disc < 0).count();
        println!(
            "X={x}: elapsed={el:?} pos_irr/X={:.5} neg_irr/X={:.5} pos_all/X={:.5} neg_all/X={:.5}",
            pos_irr as f64 / x as f64, neg_irr as f64 / x as f64,
            pos_all as f64 / x as f64, neg_all as f64 / x as f64
        );
    }
}
