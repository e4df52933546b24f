//! Recurrence matrices, τ-recurrence profiles and twin classes.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default recurrence threshold in normalized units.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Distance used to compare phase-space points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    /// `|a - b|`, for scalar data.
    #[default]
    Absolute,
    Euclidean,
    Maximum,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::Absolute if a.len() == 1 => (a[0] - b[0]).abs(),
            // L1 for vectors; identical to the others in one dimension.
            Norm::Absolute => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::Maximum => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Threshold and norm defining when two points recur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceConfig {
    epsilon: f64,
    norm: Norm,
}

impl RecurrenceConfig {
    pub fn new(epsilon: f64, norm: Norm) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { epsilon, norm })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Heaviside decision with `Θ(0) = 1`.
    #[inline]
    pub fn recurs(&self, a: &[f64], b: &[f64]) -> bool {
        self.norm.distance(a, b) <= self.epsilon
    }
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            norm: Norm::Absolute,
        }
    }
}

/// A trajectory of `m`-dimensional phase points stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    coords: Vec<f64>,
}

impl Trajectory {
    /// One-dimensional trajectory; the unembedded scalar case.
    pub fn from_scalar(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("points must have dimension >= 1".into()));
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Largest pairwise distance under `norm`.
    pub fn max_distance(&self, norm: Norm) -> f64 {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| norm.distance(self.point(i), self.point(j)))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Symmetric binary recurrence matrix, bit-packed by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceMatrix {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    config: RecurrenceConfig,
}

impl RecurrenceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &RecurrenceConfig {
        &self.config
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let word = self.bits[i * self.words_per_row + j / 64];
        (word >> (j % 64)) & 1 == 1
    }

    /// Packed words of row `i`; bits past column `n` are zero.
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Fraction of recurrent entries.
    pub fn recurrence_rate(&self) -> f64 {
        let ones: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        ones as f64 / (self.n * self.n) as f64
    }

    /// Writes the matrix as a plain PBM (P1) bitmap, one image row per
    /// matrix row, `1` (black) marking a recurrence.
    pub fn write_pbm<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "P1")?;
        writeln!(out, "{} {}", self.n, self.n)?;
        let mut line = String::with_capacity(2 * self.n);
        for i in 0..self.n {
            line.clear();
            for j in 0..self.n {
                if j > 0 {
                    line.push(' ');
                }
                line.push(if self.get(i, j) { '1' } else { '0' });
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

pub fn recurrence_matrix(traj: &Trajectory, config: &RecurrenceConfig) -> Result<RecurrenceMatrix> {
    let n = traj.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let words_per_row = n.div_ceil(64);
    let mut bits = vec![0u64; n * words_per_row];
    bits.par_chunks_mut(words_per_row)
        .enumerate()
        .for_each(|(i, row)| {
            let xi = traj.point(i);
            for j in 0..n {
                if config.recurs(xi, traj.point(j)) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        });
    Ok(RecurrenceMatrix {
        n,
        words_per_row,
        bits,
        config: *config,
    })
}

/// Recurrence rate along each diagonal `τ = 0..=tau_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauRecurrenceProfile {
    p: Vec<f64>,
}

impl TauRecurrenceProfile {
    /// Wraps raw values, checking `p[0] = 1` and `0 <= p <= 1`.
    pub fn from_values(p: Vec<f64>) -> Result<Self> {
        if p.first() != Some(&1.0) {
            return Err(Error::InvalidParameter("profile must start with p(0) = 1".into()));
        }
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("profile values must lie in [0, 1]".into()));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn tau_max(&self) -> usize {
        self.p.len() - 1
    }
}

fn check_tau_max(n: usize, tau_max: usize) -> Result<()> {
    if tau_max == 0 || tau_max >= n {
        return Err(Error::InvalidParameter(format!(
            "tau_max must satisfy 0 < tau_max < N = {n}, got {tau_max}"
        )));
    }
    Ok(())
}

pub fn tau_recurrence_rate(r: &RecurrenceMatrix, tau_max: usize) -> Result<TauRecurrenceProfile> {
    let n = r.n;
    check_tau_max(n, tau_max)?;
    let mut counts = vec![0usize; tau_max + 1];
    for i in 0..n {
        let row = r.row_words(i);
        // Scan set bits of row i at columns i..=i+tau_max.
        let hi = (i + tau_max).min(n - 1);
        let (first_word, last_word) = (i / 64, hi / 64);
        for (w, &word) in row.iter().enumerate().take(last_word + 1).skip(first_word) {
            let mut bitsleft = word;
            if w == first_word {
                bitsleft &= u64::MAX << (i % 64);
            }
            if w == last_word && hi % 64 != 63 {
                bitsleft &= (1u64 << (hi % 64 + 1)) - 1;
            }
            while bitsleft != 0 {
                let j = w * 64 + bitsleft.trailing_zeros() as usize;
                counts[j - i] += 1;
                bitsleft &= bitsleft - 1;
            }
        }
    }
    Ok(profile_from_counts(n, counts))
}

/// Same profile as [`tau_recurrence_rate`] on the matrix of `traj`, computed
/// straight from the points without materializing the matrix.
pub fn tau_recurrence_rate_direct(
    traj: &Trajectory,
    config: &RecurrenceConfig,
    tau_max: usize,
) -> Result<TauRecurrenceProfile> {
    let n = traj.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    check_tau_max(n, tau_max)?;
    let mut counts = vec![0usize; tau_max + 1];
    counts[0] = n;
    if traj.dim() == 1 {
        let x = &traj.coords;
        let eps = config.epsilon;
        for (tau, c) in counts.iter_mut().enumerate().skip(1) {
            *c = x[..n - tau]
                .iter()
                .zip(&x[tau..])
                .filter(|(a, b)| (*a - *b).abs() <= eps)
                .count();
        }
    } else {
        for (tau, c) in counts.iter_mut().enumerate().skip(1) {
            *c = (0..n - tau)
                .filter(|&i| config.recurs(traj.point(i), traj.point(i + tau)))
                .count();
        }
    }
    Ok(profile_from_counts(n, counts))
}

fn profile_from_counts(n: usize, counts: Vec<usize>) -> TauRecurrenceProfile {
    let p = counts
        .into_iter()
        .enumerate()
        .map(|(tau, c)| c as f64 / (n - tau) as f64)
        .collect();
    TauRecurrenceProfile { p }
}

/// Partition of point indices into groups with identical matrix columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinClasses {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl TwinClasses {
    /// Classes ordered by their smallest member; members ascending.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// All members of the class holding `i`, including `i` itself.
    pub fn class_members(&self, i: usize) -> &[usize] {
        &self.classes[self.class_of[i]]
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn n_points(&self) -> usize {
        self.class_of.len()
    }

    pub fn has_twins(&self, i: usize) -> bool {
        self.class_members(i).len() > 1
    }
}

pub fn find_twins(r: &RecurrenceMatrix) -> TwinClasses {
    // The matrix is symmetric, so comparing rows compares columns.
    let mut index: HashMap<&[u64], usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(r.n);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..r.n {
        let id = *index.entry(r.row_words(i)).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[id].push(i);
        class_of.push(id);
    }
    TwinClasses { class_of, classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_matrix(x: &[f64], eps: f64) -> RecurrenceMatrix {
        let traj = Trajectory::from_scalar(x).unwrap();
        recurrence_matrix(&traj, &RecurrenceConfig::new(eps, Norm::Absolute).unwrap()).unwrap()
    }

    fn dense(r: &RecurrenceMatrix) -> Vec<Vec<u8>> {
        (0..r.n())
            .map(|i| (0..r.n()).map(|j| r.get(i, j) as u8).collect())
            .collect()
    }

    #[test]
    fn three_point_matrix() {
        let r = scalar_matrix(&[0.0, 1.0, 0.05], 0.1);
        assert_eq!(dense(&r), vec![vec![1, 0, 1], vec![0, 1, 0], vec![1, 0, 1]]);
        let p = tau_recurrence_rate(&r, 2).unwrap();
        assert_eq!(p.p(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn saturated_matrices() {
        let r = scalar_matrix(&[2.0; 5], 0.1);
        assert!(dense(&r).iter().flatten().all(|&b| b == 1));
        let r = scalar_matrix(&[0.0, 0.3, -0.2, 0.1], 0.5);
        assert!(dense(&r).iter().flatten().all(|&b| b == 1));
        let p = tau_recurrence_rate(&r, 3).unwrap();
        assert!(p.p().iter().all(|&v| v == 1.0));
        assert_eq!(find_twins(&r).classes(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn boundary_distance_recurs() {
        let r = scalar_matrix(&[0.0, 0.5], 0.5);
        assert!(r.get(0, 1));
    }

    #[test]
    fn twins_of_small_series() {
        let r = scalar_matrix(&[0.0, 0.0, 1.0], 0.1);
        assert_eq!(find_twins(&r).classes(), &[vec![0, 1], vec![2]]);
        let r = scalar_matrix(&[0.0, 1.0, 2.0, 3.0], 0.1);
        assert_eq!(find_twins(&r).classes().len(), 4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(RecurrenceConfig::new(0.0, Norm::Absolute).is_err());
        let traj = Trajectory::from_scalar(&[1.0]).unwrap();
        assert!(recurrence_matrix(&traj, &RecurrenceConfig::default()).is_err());
        let err = Trajectory::from_points(&[vec![0.0, 1.0], vec![0.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { index: 1, .. }));
        let r = scalar_matrix(&[0.0, 1.0, 2.0], 0.1);
        assert!(tau_recurrence_rate(&r, 3).is_err());
        assert!(tau_recurrence_rate(&r, 0).is_err());
    }

    #[test]
    fn pbm_output() {
        let r = scalar_matrix(&[0.0, 1.0, 0.05], 0.1);
        let mut buf = Vec::new();
        r.write_pbm(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "P1\n3 3\n1 0 1\n0 1 0\n1 0 1\n");
    }

    #[test]
    fn norms_agree_in_one_dimension() {
        for norm in [Norm::Absolute, Norm::Euclidean, Norm::Maximum] {
            assert_eq!(norm.distance(&[1.5], &[-0.25]), 1.75);
        }
        assert_eq!(Norm::Euclidean.distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(Norm::Maximum.distance(&[0.0, 0.0], &[3.0, 4.0]), 4.0);
        assert_eq!(Norm::Absolute.distance(&[0.0, 0.0], &[3.0, 4.0]), 7.0);
    }
}
