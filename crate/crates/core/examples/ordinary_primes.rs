//! Ordinary primes of the level-11 curve, the degree-3 part of the set of
//! integer polynomials with roots in |z| <= 2, and an l-adic unit root.

use sato_tate::forms::curve::curve_eigenvalues;
use sato_tate::forms::{Backend, CoefficientField, EllipticCurve, Nebentypus, NewformDescriptor};
use sato_tate::numtheory::sieve_primes;
use sato_tate::ordinarity::{ordinary_density, unit_root, wiles_t_set, Certification};

fn main() -> sato_tate::Result<()> {
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
    let density = ordinary_density(&desc, &records, 10_000)?;
    println!("ordinary fraction up to 10^4: {:.4}", density.fraction);
    println!("non-ordinary primes: {:?}", density.non_ordinary);

    let t3 = wiles_t_set(3)?;
    let boundary = t3
        .iter()
        .filter(|t| t.certification == Certification::ExactBoundary)
        .count();
    println!(
        "\ndegree 3: {} polynomials, {boundary} with a root on |z| = 2",
        t3.len()
    );
    for t in t3.iter().take(5) {
        println!(
            "  {:?}  max |root| = {:.6}",
            t.coeffs, t.max_conjugate_modulus
        );
    }

    let a13 = records
        .iter()
        .find(|r| r.p == 13)
        .unwrap()
        .exact_integer()
        .unwrap();
    let r = unit_root(a13, 1, 2, 13, 4)?;
    println!(
        "\nunit root of X^2 - {a13}X + 13 mod 13^4: {} (other root {})",
        r.unit, r.cofactor
    );
    Ok(())
}
