//! Minor monomials of left weight t in the entries of an n x n matrix, their
//! right weights, and T+ valuations for a dominant b.

use sato_tate::weightlat::{
    enumerate_monomials, highest_weight_monomial, lowest_weight_monomial, tplus_valuation,
    weyl_dimension, TPlusElement, WeightVec,
};

fn main() -> sato_tate::Result<()> {
    let t = WeightVec::new(vec![2, 1, 0])?;
    let b = TPlusElement::new(vec![2, 1, 0])?;
    let monos = enumerate_monomials(&t, 3)?;
    println!(
        "t = (2,1,0): {} monomials, Weyl dimension {}",
        monos.len(),
        weyl_dimension(&t)
    );
    println!(
        "highest {}, lowest {}",
        highest_weight_monomial(&t).encode(),
        lowest_weight_monomial(&t).encode()
    );
    println!(
        "{:<16} {:>10} {:>4} {:>8}",
        "monomial", "right", "raw", "twisted"
    );
    for m in &monos {
        let (raw, twisted) = tplus_valuation(m, &b, &t)?;
        println!(
            "{:<16} {:>10} {raw:>4} {twisted:>8}",
            m.encode(),
            format!("{:?}", m.right_weight())
        );
    }
    Ok(())
}
