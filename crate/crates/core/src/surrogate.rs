//! Twin surrogates and the Z-test against a surrogate distribution.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::preprocess::mean_std;
use crate::recurrence::{Trajectory, TwinClasses};
use crate::seed;

/// Significance level used throughout the connectivity analysis.
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Number of surrogates per test.
pub const DEFAULT_SURROGATES: usize = 100;

/// Source indices of one twin surrogate.
///
/// Starts at a uniformly drawn index. From source index `l` the next index
/// is the successor of a member drawn uniformly from the twin class of `l`
/// (`l` itself when it has no twins). The successor of the last point is
/// the first point.
pub fn twin_surrogate_indices<R: Rng + ?Sized>(twins: &TwinClasses, rng: &mut R) -> Vec<usize> {
    let n = twins.n_points();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut current = rng.random_range(0..n);
    out.push(current);
    while out.len() < n {
        let members = twins.class_members(current);
        let chosen = if members.len() > 1 {
            members[rng.random_range(0..members.len())]
        } else {
            current
        };
        current = (chosen + 1) % n;
        out.push(current);
    }
    out
}

/// Twin surrogate of `traj`, drawn from the stream addressed by `seed`.
pub fn twin_surrogate(traj: &Trajectory, twins: &TwinClasses, seed: u64) -> Result<Trajectory> {
    check_twins(traj, twins)?;
    let mut rng = seed::stream(seed, &[]);
    let idx = twin_surrogate_indices(twins, &mut rng);
    gather(traj, &idx)
}

fn check_twins(traj: &Trajectory, twins: &TwinClasses) -> Result<()> {
    if traj.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: traj.len(),
        });
    }
    if twins.n_points() != traj.len() {
        return Err(Error::LengthMismatch(twins.n_points(), traj.len()));
    }
    Ok(())
}

fn gather(traj: &Trajectory, idx: &[usize]) -> Result<Trajectory> {
    let points: Vec<Vec<f64>> = idx.iter().map(|&i| traj.point(i).to_vec()).collect();
    Trajectory::from_points(&points)
}

/// A set of twin surrogates of one source trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateEnsemble {
    pub surrogates: Vec<Trajectory>,
    pub seed: u64,
    pub source_label: String,
}

/// Generates `n` surrogates; surrogate `i` uses the stream `(seed, i)`.
pub fn generate_ensemble(
    traj: &Trajectory,
    twins: &TwinClasses,
    n: usize,
    seed: u64,
    source_label: impl Into<String>,
) -> Result<SurrogateEnsemble> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 surrogates, got {n}"
        )));
    }
    check_twins(traj, twins)?;
    let surrogates = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(seed, &[i]);
            gather(traj, &twin_surrogate_indices(twins, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurrogateEnsemble {
        surrogates,
        seed,
        source_label: source_label.into(),
    })
}

/// Outcome of testing an observed measure against its surrogate distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceResult {
    pub observed: f64,
    pub mu: f64,
    pub sigma: f64,
    pub z: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    pub n_surrogates: usize,
}

/// Two-sided Z-test of `observed` against the surrogate values, using their
/// mean and population standard deviation.
pub fn significance_test(observed: f64, surrogate_values: &[f64], alpha: f64) -> Result<SignificanceResult> {
    if surrogate_values.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 surrogate values, got {}",
            surrogate_values.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (mu, sigma) = mean_std(surrogate_values);
    if !(sigma > 1e-12 * mu.abs().max(1.0)) {
        return Err(Error::DegenerateSurrogates);
    }
    let z = (observed - mu) / sigma;
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(SignificanceResult {
        observed,
        mu,
        sigma,
        z,
        p_value,
        alpha,
        significant: p_value < alpha,
        n_surrogates: surrogate_values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{find_twins, recurrence_matrix, RecurrenceConfig};

    fn twins_of(x: &[f64], eps: f64) -> (Trajectory, TwinClasses) {
        let traj = Trajectory::from_scalar(x).unwrap();
        let cfg = RecurrenceConfig::new(eps, Default::default()).unwrap();
        let twins = find_twins(&recurrence_matrix(&traj, &cfg).unwrap());
        (traj, twins)
    }

    #[test]
    fn constant_series_is_reproduced() {
        let (traj, twins) = twins_of(&[3.0; 40], 0.1);
        let s = twin_surrogate(&traj, &twins, 1).unwrap();
        assert_eq!(s, traj);
    }

    #[test]
    fn twinless_series_is_a_rotation() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let (traj, twins) = twins_of(&x, 0.1);
        for seed in 0..10 {
            let s = twin_surrogate(&traj, &twins, seed).unwrap();
            let start = s.point(0)[0] as usize;
            let expected: Vec<f64> = (0..30).map(|k| ((start + k) % 30) as f64).collect();
            let got: Vec<f64> = s.points().map(|p| p[0]).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn surrogates_are_deterministic() {
        let x: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64 * 0.013).sin()).collect();
        let (traj, twins) = twins_of(&x, 0.2);
        assert_eq!(
            twin_surrogate(&traj, &twins, 42).unwrap(),
            twin_surrogate(&traj, &twins, 42).unwrap()
        );
        let e1 = generate_ensemble(&traj, &twins, 100, 9, "b").unwrap();
        let e2 = generate_ensemble(&traj, &twins, 100, 9, "b").unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.surrogates.len(), 100);
        assert!(e1.surrogates.iter().all(|s| s.len() == 200));
        assert!(generate_ensemble(&traj, &twins, 1, 9, "b").is_err());
    }

    #[test]
    fn twin_jumps_follow_class_successors() {
        // points 0 and 2 are twins; 1 and 3 are twins
        let x = [0.0, 5.0, 0.0, 5.0, 9.0];
        let (_, twins) = twins_of(&x, 0.1);
        let mut rng = seed::stream(3, &[]);
        for _ in 0..50 {
            let idx = twin_surrogate_indices(&twins, &mut rng);
            for w in idx.windows(2) {
                let allowed: Vec<usize> = twins
                    .class_members(w[0])
                    .iter()
                    .map(|&m| (m + 1) % x.len())
                    .collect();
                assert!(allowed.contains(&w[1]), "{idx:?}");
            }
        }
    }

    #[test]
    fn z_test_values() {
        let vals = [-1.0, 1.0, -1.0, 1.0];
        let r = significance_test(0.0, &vals, 0.1).unwrap();
        assert_eq!((r.z, r.p_value, r.significant), (0.0, 1.0, false));
        let r = significance_test(2.0, &vals, 0.1).unwrap();
        assert!((r.z - 2.0).abs() < 1e-15);
        // 2 * (1 - Φ(2)) from the standard normal table
        assert!((r.p_value - 0.0455002638963584).abs() < 1e-10);
        assert!(r.significant);
        assert_eq!(r.n_surrogates, 4);
    }

    #[test]
    fn z_test_errors() {
        assert_eq!(
            significance_test(0.3, &[0.5; 10], 0.1),
            Err(Error::DegenerateSurrogates)
        );
        assert!(significance_test(0.3, &[0.5], 0.1).is_err());
        assert!(significance_test(0.3, &[0.5, 0.6], 1.0).is_err());
    }
}
