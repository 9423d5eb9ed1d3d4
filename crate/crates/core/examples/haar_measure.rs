//! Characters of U(2)_m: the orthogonality table under Haar measure and a
//! seeded Haar sample checked fiber by fiber.

use sato_tate::equidist::{equidist_report, ClassPoint};
use sato_tate::stgroup::{haar_inner_product, sample_haar, IrrepIndex};

fn main() -> sato_tate::Result<()> {
    let m = 3;
    let irreps: Vec<IrrepIndex> = (0..m)
        .flat_map(|a| (0..3).map(move |b| IrrepIndex::new(a, b, m).unwrap()))
        .collect();
    println!("<det^a Sym^b, det^a' Sym^b'> on U(2)_{m}");
    for x in &irreps {
        let row: Vec<String> = irreps
            .iter()
            .map(|y| format!("{:5.2}", haar_inner_product(*x, *y, m).re))
            .collect();
        println!("{}", row.join(" "));
    }

    let n = 50_000;
    let points: Vec<ClassPoint> = sample_haar(m, 7, n)?
        .into_iter()
        .map(ClassPoint::from)
        .collect();
    let report = equidist_report("haar", 0, &points, 4)?;
    println!("\n{n} Haar samples");
    for (e, ks) in &report.ks_by_fiber {
        println!("fiber z^{e}: {:5} classes, K-S {:.4}", ks.count, ks.d);
    }
    for w in report.weyl.iter().filter(|w| w.b <= 2) {
        println!("weyl({}, {}) = {:.4}", w.a, w.b, w.modulus());
    }
    Ok(())
}
