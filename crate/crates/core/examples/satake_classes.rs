//! Satake classes in U(2)_m for a weight-2 curve and for the weight-3 form
//! η(z)³η(7z)³ with character (-7|·), plus the local Steinberg check.

use num_traits::ToPrimitive;
use sato_tate::forms::eta_product_series;
use sato_tate::forms::{
    Backend, CoefficientField, EigenvalueRecord, Nebentypus, NewformDescriptor,
};
use sato_tate::numtheory::sieve_primes;
use sato_tate::satake::{classes_from_records, steinberg_heuristic, DEFAULT_TOL};

fn main() -> sato_tate::Result<()> {
    let series = eta_product_series(&[(1, 3), (7, 3)], 60)?;
    let desc = NewformDescriptor {
        label: "eta 1^3 7^3".into(),
        level: 7,
        weight: 3,
        nebentypus: Nebentypus::kronecker(-7)?,
        coefficient_field: CoefficientField::rationals(),
        is_cm: Some(true),
        steinberg_primes: Default::default(),
        source: Backend::Eta,
    };
    let records: Vec<EigenvalueRecord> = sieve_primes(2, 60)?
        .iter()
        .filter(|&&p| desc.is_good(p))
        .map(|&p| {
            EigenvalueRecord::from_integer(
                p,
                series[p as usize - 1].to_i64().unwrap(),
                Backend::Eta,
            )
        })
        .collect();
    println!("weight 3, level 7, m = 2");
    println!("{:>3} {:>5} {:>10} {:>4}", "p", "a_p", "theta", "det");
    for (r, c) in records
        .iter()
        .zip(classes_from_records(&desc, &records, DEFAULT_TOL)?)
    {
        println!(
            "{:>3} {:>5} {:>10.6} {:>4}",
            c.p,
            r.exact_integer().unwrap(),
            c.theta,
            format!("z^{}", c.det.exponent())
        );
    }
    println!("local component at 7: {:?}", steinberg_heuristic(&desc, 7)?);
    Ok(())
}
