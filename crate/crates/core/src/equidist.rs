//! Equidistribution statistics for Sato-Tate classes: Weyl character sums,
//! Kolmogorov-Smirnov distances per determinant fiber, and fiber
//! frequencies.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::RootOfUnity;
use crate::satake::{SatakeClass, SqrtConvention};
use crate::stgroup::{character_value, sin2_cdf, IrrepIndex};

/// Number of bins in the angle histogram.
pub const HISTOGRAM_BINS: usize = 64;

/// Sum by recursive halving. The association order depends only on the
/// length, so results are reproducible however the terms were produced.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + Default,
{
    match xs.len() {
        0 => T::default(),
        1 => xs[0],
        2..=8 => xs[1..].iter().fold(xs[0], |acc, &x| acc + x),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// A conjugacy class reduced to what the statistics need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassPoint {
    pub theta: f64,
    pub det: RootOfUnity,
}

impl From<&SatakeClass> for ClassPoint {
    fn from(c: &SatakeClass) -> Self {
        ClassPoint {
            theta: c.theta,
            det: c.det,
        }
    }
}

impl From<(f64, RootOfUnity)> for ClassPoint {
    fn from((theta, det): (f64, RootOfUnity)) -> Self {
        ClassPoint { theta, det }
    }
}

fn common_order(points: &[ClassPoint]) -> Result<u64> {
    let first = points.first().ok_or(Error::Empty("class sequence"))?;
    let m = first.det.order();
    if let Some(other) = points.iter().find(|c| c.det.order() != m) {
        return Err(Error::MixedOrder(m, other.det.order()));
    }
    Ok(m)
}

/// Averages of the character of `det^a ⊗ Sym^b` over the classes, for
/// every `a <= a_max` and `b <= b_max`.
pub fn weyl_sum_table(
    points: &[ClassPoint],
    a_max: u64,
    b_max: u64,
) -> Result<BTreeMap<(u64, u64), Complex64>> {
    common_order(points)?;
    let n = points.len() as f64;
    let mut table = BTreeMap::new();
    let mut terms = Vec::with_capacity(points.len());
    for a in 0..=a_max {
        for b in 0..=b_max {
            let idx = IrrepIndex { a, b };
            terms.clear();
            for c in points {
                terms.push(character_value(idx, c.theta, c.det)?);
            }
            let avg = if (a, b) == (0, 0) {
                Complex64::new(1.0, 0.0)
            } else {
                pairwise_sum(&terms) / n
            };
            table.insert((a, b), avg);
        }
    }
    Ok(table)
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `angles` and `cdf`, evaluated on both sides of every sample point.
pub fn ks_statistic<F: Fn(f64) -> f64>(angles: &[f64], cdf: F) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::Empty("angle sequence"));
    }
    if let Some(bad) = angles.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(Error::InvalidArgument(format!(
            "angle {bad} outside [0, π]"
        )));
    }
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max(((i + 1) as f64 / n - f).abs())
            .max((f - i as f64 / n).abs());
    }
    Ok(d)
}

/// Kolmogorov-Smirnov distance against the Sato-Tate law.
pub fn ks_sato_tate(angles: &[f64]) -> Result<f64> {
    ks_statistic(angles, |t| sin2_cdf(t).expect("angles validated"))
}

/// Relative frequency of each determinant exponent in `0..m`.
pub fn det_partition(points: &[ClassPoint], m: u64) -> Result<BTreeMap<u64, f64>> {
    if points.is_empty() {
        return Err(Error::Empty("class sequence"));
    }
    let mut counts = vec![0usize; m as usize];
    for c in points {
        if c.det.order() != m {
            return Err(Error::MixedOrder(m, c.det.order()));
        }
        counts[c.det.exponent() as usize] += 1;
    }
    let n = points.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(e, c)| (e as u64, c as f64 / n))
        .collect())
}

/// Counts of angles in [`HISTOGRAM_BINS`] equal bins on `[0, π]`.
pub fn angle_histogram(angles: &[f64]) -> Vec<(f64, usize)> {
    let width = PI / HISTOGRAM_BINS as f64;
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    for &t in angles {
        let i = ((t / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| ((i as f64 + 0.5) * width, c))
        .collect()
}

/// Two-column `theta,count` text for plotting.
pub fn histogram_text(angles: &[f64]) -> String {
    let mut out = String::from("theta,count\n");
    for (center, count) in angle_histogram(angles) {
        writeln!(out, "{center:.17e},{count}").unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberKs {
    pub count: usize,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylEntry {
    pub a: u64,
    pub b: u64,
    pub re: f64,
    pub im: f64,
}

impl WeylEntry {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub label: String,
    pub prime_bound: u64,
    pub class_count: usize,
    pub m: u64,
    pub weyl: Vec<WeylEntry>,
    /// Keyed by determinant exponent; fibers without classes are omitted.
    pub ks_by_fiber: BTreeMap<u64, FiberKs>,
    pub ks_pooled: Option<f64>,
    pub fiber_freq: BTreeMap<u64, f64>,
    pub convention: String,
}

impl EquidistReport {
    pub fn weyl(&self, a: u64, b: u64) -> Option<Complex64> {
        self.weyl
            .iter()
            .find(|w| w.a == a && w.b == b)
            .map(|w| Complex64::new(w.re, w.im))
    }
}

/// Full report: Weyl sums for `a < m, b <= b_max`, per-fiber K-S and
/// fiber frequencies. The pooled K-S statistic is filled in when `m = 1`.
pub fn equidist_report(
    label: &str,
    prime_bound: u64,
    points: &[ClassPoint],
    b_max: u64,
) -> Result<EquidistReport> {
    let m = common_order(points)?;
    let table = weyl_sum_table(points, m - 1, b_max)?;
    let mut ks_by_fiber = BTreeMap::new();
    for e in 0..m {
        let angles: Vec<f64> = points
            .iter()
            .filter(|c| c.det.exponent() == e)
            .map(|c| c.theta)
            .collect();
        if !angles.is_empty() {
            ks_by_fiber.insert(
                e,
                FiberKs {
                    count: angles.len(),
                    d: ks_sato_tate(&angles)?,
                },
            );
        }
    }
    let ks_pooled = if m == 1 {
        ks_by_fiber.get(&0).map(|f| f.d)
    } else {
        None
    };
    Ok(EquidistReport {
        label: label.to_string(),
        prime_bound,
        class_count: points.len(),
        m,
        weyl: table
            .into_iter()
            .map(|((a, b), v)| WeylEntry {
                a,
                b,
                re: v.re,
                im: v.im,
            })
            .collect(),
        ks_by_fiber,
        ks_pooled,
        fiber_freq: det_partition(points, m)?,
        convention: SqrtConvention::Principal.describe().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stgroup::{sample_haar, sin2_quantile};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_2;

    fn at(theta: f64, e: i64, m: u64) -> ClassPoint {
        ClassPoint {
            theta,
            det: RootOfUnity::new(e, m).unwrap(),
        }
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }

    #[test]
    fn weyl_examples() {
        let pts = vec![at(FRAC_PI_2, 0, 1); 10];
        let t = weyl_sum_table(&pts, 0, 2).unwrap();
        assert!((t[&(0, 2)] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(t[&(0, 0)], Complex64::new(1.0, 0.0));
        assert!(weyl_sum_table(&[], 0, 1).is_err());
        assert!(matches!(
            weyl_sum_table(&[at(0.1, 0, 1), at(0.2, 0, 2)], 0, 1),
            Err(Error::MixedOrder(1, 2))
        ));
    }

    #[test]
    fn weyl_trivial_entry_is_exactly_one() {
        let pts: Vec<ClassPoint> = sample_haar(3, 5, 1000)
            .unwrap()
            .into_iter()
            .map(Into::into)
            .collect();
        let t = weyl_sum_table(&pts, 2, 3).unwrap();
        assert_eq!(t[&(0, 0)], Complex64::new(1.0, 0.0));
        for v in t.iter().map(|((_, b), v)| (b, v)) {
            assert!(v.1.norm() <= (*v.0 + 1) as f64 + 1e-12);
        }
    }

    #[test]
    fn weyl_haar_self_test() {
        let pts: Vec<ClassPoint> = sample_haar(1, 11, 100_000)
            .unwrap()
            .into_iter()
            .map(Into::into)
            .collect();
        let t = weyl_sum_table(&pts, 0, 1).unwrap();
        assert!(t[&(0, 1)].norm() <= 0.02);
    }

    #[test]
    fn ks_examples() {
        assert!((ks_sato_tate(&[FRAC_PI_2]).unwrap() - 0.5).abs() < 1e-15);
        let n = 1000;
        let grid: Vec<f64> = (1..=n)
            .map(|i| sin2_quantile((i as f64 - 0.5) / n as f64))
            .collect();
        assert!(ks_sato_tate(&grid).unwrap() <= 0.0005 + 1e-9);
        assert_eq!(ks_sato_tate(&[0.0; 10]).unwrap(), 1.0);
        assert!(ks_sato_tate(&[]).is_err());
        assert!(ks_sato_tate(&[4.0]).is_err());
    }

    #[test]
    fn ks_permutation_invariant() {
        let mut angles: Vec<f64> = sample_haar(1, 3, 500)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let d = ks_sato_tate(&angles).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            angles.shuffle(&mut rng);
            assert_eq!(ks_sato_tate(&angles).unwrap(), d);
        }
    }

    #[test]
    fn partition_examples() {
        let f = det_partition(&[at(0.3, 0, 1)], 1).unwrap();
        assert_eq!(f[&0], 1.0);
        let f = det_partition(&[at(0.3, 0, 2), at(1.0, 1, 2)], 2).unwrap();
        assert_eq!((f[&0], f[&1]), (0.5, 0.5));
        assert!(det_partition(&[], 2).is_err());
    }

    #[test]
    fn report_invariants() {
        let pts: Vec<ClassPoint> = sample_haar(4, 17, 4000)
            .unwrap()
            .into_iter()
            .map(Into::into)
            .collect();
        let r = equidist_report("haar", 0, &pts, 4).unwrap();
        let total: f64 = r.fiber_freq.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(r.weyl.len(), 4 * 5);
        assert!(r
            .weyl
            .iter()
            .all(|w| w.modulus() <= (w.b + 1) as f64 + 1e-12));
        assert!(r.ks_pooled.is_none());
        assert_eq!(r.ks_by_fiber.values().map(|f| f.count).sum::<usize>(), 4000);
        let json = serde_json::to_string(&r).unwrap();
        let back: EquidistReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn histogram_shape() {
        let h = angle_histogram(&[0.0, PI, FRAC_PI_2]);
        assert_eq!(h.len(), HISTOGRAM_BINS);
        assert_eq!(h.iter().map(|(_, c)| c).sum::<usize>(), 3);
        assert_eq!(h[0].1, 1);
        assert_eq!(h[HISTOGRAM_BINS - 1].1, 1);
        assert!(histogram_text(&[0.5]).starts_with("theta,count\n"));
    }
}
