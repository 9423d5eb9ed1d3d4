//! Hecke eigenvalues of the level-11 curve from three sources: naive point
//! counting, Legendre-symbol sums, and the eta product η(z)²η(11z)².

use sato_tate::forms::curve::ap_charsum_curve;
use sato_tate::forms::{ap_count, eta_product_series, EllipticCurve};
use sato_tate::numtheory::sieve_primes;

fn main() -> sato_tate::Result<()> {
    let curve = EllipticCurve::from_coefficients([0, -1, 1, -10, -20])?;
    let eta = eta_product_series(&[(1, 2), (11, 2)], 100)?;
    println!("{:>4} {:>6} {:>8} {:>5}", "p", "count", "charsum", "eta");
    for &p in sieve_primes(2, 100)?.iter() {
        if !curve.has_good_reduction(p) {
            println!(
                "{p:>4}  bad reduction (eta coefficient {})",
                eta[p as usize - 1]
            );
            continue;
        }
        println!(
            "{p:>4} {:>6} {:>8} {:>5}",
            ap_count(&curve, p)?,
            ap_charsum_curve(&curve, p)?,
            eta[p as usize - 1]
        );
    }
    Ok(())
}
