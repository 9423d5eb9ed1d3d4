use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A number field `Q[x]/(f)` together with a fixed complex embedding,
/// given by one root of `f` and an error radius for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    /// Monic defining polynomial, constant term first.
    pub poly: Vec<i64>,
    pub root: Complex64,
    pub root_err: f64,
}

fn horner(poly: &[i64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for &c in poly.iter().rev() {
        df = df * z + f;
        f = f * z + c as f64;
        mag = mag * z.norm() + (c as f64).abs();
    }
    (f, df, mag)
}

impl CoefficientField {
    pub fn rationals() -> Self {
        CoefficientField {
            poly: vec![0, 1],
            root: Complex64::new(0.0, 0.0),
            root_err: 0.0,
        }
    }

    /// Builds the field from a monic polynomial and an approximate root,
    /// polishing the root by Newton iteration and bounding its error.
    pub fn new(poly: Vec<i64>, approx_root: Complex64) -> Result<Self> {
        if poly.len() < 2 || *poly.last().unwrap() != 1 {
            return Err(Error::InvalidArgument(
                "coefficient field polynomial must be monic of degree >= 1".into(),
            ));
        }
        let mut z = approx_root;
        for _ in 0..100 {
            let (f, df, _) = horner(&poly, z);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            z -= step;
            if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        let (f, df, mag) = horner(&poly, z);
        if df.norm() == 0.0 {
            return Err(Error::InvalidArgument("selected root is not simple".into()));
        }
        let degree = (poly.len() - 1) as f64;
        // a disk of radius d·|f/f'| about z contains a root; widen for the
        // rounding error committed while evaluating f
        let residual = f.norm() + 4.0 * degree * f64::EPSILON * mag;
        let root_err = degree * residual / df.norm();
        if root_err > 1e-6 * z.norm().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "approximate root {approx_root} did not converge"
            )));
        }
        Ok(CoefficientField {
            poly,
            root: z,
            root_err,
        })
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Image of `Σ c_i x^i` under the embedding, with an absolute error bound.
    pub fn embed(&self, coords: &[Rational64]) -> Result<(Complex64, f64)> {
        if coords.len() != self.degree() {
            return Err(Error::Malformed(format!(
                "expected {} power-basis coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        if self.degree() == 1 {
            let v = coords[0].to_f64().unwrap_or(f64::NAN);
            let err = if coords[0].is_integer() && v.abs() < 2f64.powi(53) {
                0.0
            } else {
                v.abs() * f64::EPSILON
            };
            return Ok((Complex64::new(v, 0.0), err));
        }
        let r = self.root.norm() + self.root_err;
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut power = Complex64::new(1.0, 0.0);
        for (i, c) in coords.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            value += power * c;
            // |z^i - ẑ^i| <= i·r^(i-1)·δ
            if i > 0 {
                err += c.abs() * i as f64 * r.powi(i as i32 - 1) * self.root_err;
            }
            err += c.abs() * r.powi(i as i32) * 4.0 * (i + 1) as f64 * f64::EPSILON;
            power *= self.root;
        }
        Ok((value, err))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_embedding_is_exact() {
        let q = CoefficientField::rationals();
        let (v, e) = q.embed(&[Rational64::from_integer(-7)]).unwrap();
        assert_eq!(v, Complex64::new(-7.0, 0.0));
        assert_eq!(e, 0.0);
        assert!(q.embed(&[]).is_err());
    }

    #[test]
    fn quadratic_root_refinement() {
        // x^2 - 2, starting from a rough guess
        let k = CoefficientField::new(vec![-2, 0, 1], Complex64::new(1.4, 0.0)).unwrap();
        assert!((k.root.re - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(k.root_err < 1e-14);
        let one_plus_sqrt2 = [Rational64::from_integer(1), Rational64::from_integer(1)];
        let (v, e) = k.embed(&one_plus_sqrt2).unwrap();
        assert!((v.re - (1.0 + std::f64::consts::SQRT_2)).abs() <= e + 1e-15);

        // x^2 + x + 1, selected root in the upper half plane
        let k = CoefficientField::new(vec![1, 1, 1], Complex64::new(-0.5, 0.8)).unwrap();
        assert!((k.root.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CoefficientField::new(vec![1, 2], Complex64::new(0.0, 0.0)).is_err());
        assert!(CoefficientField::new(vec![1, 0, 1], Complex64::new(0.0, 0.0)).is_err());
    }
}
