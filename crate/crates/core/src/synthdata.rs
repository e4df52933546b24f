//! Deterministic synthetic series: uniform white noise and the Lorenz system.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// `n` i.i.d. samples from `U[0, 1)`.
pub fn white_noise(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("white noise length must be >= 1".into()));
    }
    let mut rng = seed::stream(seed, &[]);
    Ok((0..n).map(|_| rng.random::<f64>()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub dt: f64,
    /// Number of samples returned after the transient.
    pub n: usize,
    pub initial: [f64; 3],
    /// Integration steps discarded before sampling starts.
    pub transient: usize,
}

impl LorenzParams {
    /// σ = 10, ρ = 28, β = 10/3, as used for the recurrence-plot demos.
    pub fn demo() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 10.0 / 3.0,
            dt: 0.01,
            n: 5000,
            initial: [1.0, 1.0, 1.0],
            transient: 1000,
        }
    }

    /// The textbook β = 8/3.
    pub fn classic() -> Self {
        Self {
            beta: 8.0 / 3.0,
            ..Self::demo()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if ![self.sigma, self.rho, self.beta].iter().chain(&self.initial).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("Lorenz parameters must be finite".into()));
        }
        Ok(())
    }

    fn field(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        [
            self.sigma * (y - x),
            x * (self.rho - z) - y,
            x * y - self.beta * z,
        ]
    }

    fn rk4_step(&self, s: [f64; 3]) -> [f64; 3] {
        let h = self.dt;
        let add = |a: [f64; 3], b: [f64; 3], k: f64| [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]];
        let k1 = self.field(s);
        let k2 = self.field(add(s, k1, h / 2.0));
        let k3 = self.field(add(s, k2, h / 2.0));
        let k4 = self.field(add(s, k3, h));
        let mut out = s;
        for i in 0..3 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self::demo()
    }
}

/// Fixed-step RK4 trajectory, one sample per step, transient discarded.
pub fn lorenz(params: &LorenzParams) -> Result<Vec<[f64; 3]>> {
    params.validate()?;
    let mut state = params.initial;
    let mut out = Vec::with_capacity(params.n);
    for step in 0..params.transient + params.n {
        if step >= params.transient {
            out.push(state);
        }
        state = params.rk4_step(state);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::Diverged(step + 1));
        }
    }
    Ok(out)
}
