//! Partial Euler products of twisted symmetric powers: the zeta sanity check,
//! a nonvanishing scan for Sym^2 of the level-11 curve, and the per-prime
//! Clebsch-Gordan identity.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use sato_tate::forms::curve::curve_eigenvalues;
use sato_tate::forms::{Backend, CoefficientField, EllipticCurve, Nebentypus, NewformDescriptor};
use sato_tate::lfunc::{
    clebsch_gordan_error, nonvanishing_scan, partial_l_product, ClassTable, EulerFactorSpec, TGrid,
};
use sato_tate::numtheory::{sieve_primes, RootOfUnity};
use sato_tate::satake::{classes_from_records, SatakeClass, DEFAULT_TOL};

fn main() -> sato_tate::Result<()> {
    // θ = π/2 at every prime turns the b = 0 product into ζ(s)
    let trivial: Vec<SatakeClass> = sieve_primes(2, 10_000)?
        .iter()
        .map(|&p| SatakeClass {
            p,
            theta: FRAC_PI_2,
            det: RootOfUnity::one(1),
            weight: 2,
            residual: 0.0,
        })
        .collect();
    let z2 = partial_l_product(
        ClassTable::new(&trivial, 1),
        EulerFactorSpec::new(0, 0, 2),
        Complex64::new(2.0, 0.0),
        10_000,
    )?;
    println!(
        "prod_(p <= 10^4) (1 - p^-2)^-1 = {:.6}, pi^2/6 = {:.6}",
        z2.re,
        std::f64::consts::PI.powi(2) / 6.0
    );

    let desc = NewformDescriptor {
        label: "11a1".into(),
        level: 11,
        weight: 2,
        nebentypus: Nebentypus::trivial(),
        coefficient_field: CoefficientField::rationals(),
        is_cm: Some(false),
        steinberg_primes: Default::default(),
        source: Backend::Charsum,
    };
    let curve = EllipticCurve::from_coefficients([0, -1, 1, -10, -20])?;
    let primes: Vec<u64> = sieve_primes(2, 10_000)?
        .iter()
        .copied()
        .filter(|&p| desc.is_good(p))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().build().unwrap();
    let records = curve_eigenvalues(&curve, &primes, Backend::Charsum, &pool)?;
    let classes = classes_from_records(&desc, &records, DEFAULT_TOL)?;
    let table = ClassTable::new(&classes, 11);

    let spec = EulerFactorSpec::new(0, 2, 2);
    let grid = TGrid::new(0.0, 10.0, 0.25)?;
    let scan = nonvanishing_scan(table, spec, 2.5, grid, 10_000, Some(&pool))?;
    println!(
        "Sym^2 on Re s = 2.5, t in [0, 10]: min |L| = {:.4} at t = {:.2}",
        scan.min_modulus, scan.argmin_t
    );

    for b in 1..=4 {
        let s = Complex64::new(EulerFactorSpec::new(0, b + 1, 2).abscissa() + 0.5, 1.0);
        let worst = classes
            .iter()
            .take(50)
            .map(|c| clebsch_gordan_error(c, 0, b, s))
            .collect::<sato_tate::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("Clebsch-Gordan b = {b}, s = {s}: max relative error {worst:.2e} over 50 primes");
    }
    Ok(())
}
