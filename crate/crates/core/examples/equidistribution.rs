//! Sato-Tate statistics of a non-CM curve next to the CM curve y² = x³ - x.
//! Pass the prime bound as the first argument (default 20000).

use sato_tate::equidist::{equidist_report, ClassPoint};
use sato_tate::forms::curve::curve_eigenvalues;
use sato_tate::forms::{Backend, CoefficientField, EllipticCurve, Nebentypus, NewformDescriptor};
use sato_tate::numtheory::sieve_primes;
use sato_tate::satake::{classes_from_records, DEFAULT_TOL};

fn curve_form(
    label: &str,
    coeffs: [i64; 5],
    level: u64,
    x: u64,
) -> sato_tate::Result<Vec<ClassPoint>> {
    let curve = EllipticCurve::from_coefficients(coeffs)?;
    let desc = NewformDescriptor {
        label: label.into(),
        level,
        weight: 2,
        nebentypus: Nebentypus::trivial(),
        coefficient_field: CoefficientField::rationals(),
        is_cm: None,
        steinberg_primes: Default::default(),
        source: Backend::Count,
    };
    let primes: Vec<u64> = sieve_primes(2, x)?
        .iter()
        .copied()
        .filter(|&p| desc.is_good(p))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().build().unwrap();
    let records = curve_eigenvalues(&curve, &primes, Backend::Count, &pool)?;
    Ok(classes_from_records(&desc, &records, DEFAULT_TOL)?
        .iter()
        .map(ClassPoint::from)
        .collect())
}

fn main() -> sato_tate::Result<()> {
    let x: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    for (label, coeffs, level) in [
        ("11a1", [0, -1, 1, -10, -20], 11),
        ("32a2", [0, 0, 0, -1, 0], 2),
    ] {
        let points = curve_form(label, coeffs, level, x)?;
        let report = equidist_report(label, x, &points, 4)?;
        println!("{label}: {} classes up to {x}", report.class_count);
        println!(
            "  K-S against (2/pi) sin^2: {:.4}",
            report.ks_pooled.unwrap_or(f64::NAN)
        );
        for b in 1..=4 {
            println!("  |weyl(0,{b})| = {:.4}", report.weyl(0, b).unwrap().norm());
        }
        let at_half = points
            .iter()
            .filter(|p| p.theta == std::f64::consts::FRAC_PI_2)
            .count();
        println!("  classes with theta = pi/2: {at_half}");
    }
    Ok(())
}
