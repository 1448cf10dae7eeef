//! Random-field Schrödinger trajectories.
//!
//! Each step applies the exact unitary `exp(−(i/2)·dW·σ)` with independent
//! Gaussian components of variance `dt/τ`. Averaging the second-order term of
//! the kick gives `dρ = −(1/(8τ))Σ_k[σ_k,[σ_k,ρ]]dt`, so the ensemble Bloch
//! vector decays as `e^{−t/τ}`.
//!
//! Trajectory `i` draws from ChaCha8 stream `i` of the run seed, so results
//! do not depend on how trajectories are scheduled across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::BlochVector;
use crate::error::{Error, Result};

/// Two complex amplitudes.
pub type StateVector = [Complex64; 2];

pub const DEFAULT_SAMPLES: usize = 10;

/// |z| above which a comparison fails.
pub const Z_FAIL: f64 = 4.0;
/// |z| above which a comparison is flagged but not failed.
pub const Z_FLAG: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SSEConfig {
    pub tau: f64,
    pub dt: f64,
    pub t_final: f64,
    pub n_traj: usize,
    pub seed: u64,
    pub initial_state: StateVector,
    /// Uniform sample times on `[0, t_final]`, endpoints included.
    pub n_samples: usize,
}

impl SSEConfig {
    pub fn new(
        tau: f64,
        dt: f64,
        t_final: f64,
        n_traj: usize,
        seed: u64,
        initial_state: StateVector,
    ) -> Result<Self> {
        let cfg = Self {
            tau,
            dt,
            t_final,
            n_traj,
            seed,
            initial_state,
            n_samples: DEFAULT_SAMPLES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_samples(mut self, n_samples: usize) -> Result<Self> {
        self.n_samples = n_samples;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.tau > 0.0) {
            return bad(format!("tau must be > 0, got {}", self.tau));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be finite and > 0, got {}", self.dt));
        }
        if self.dt > self.tau / 100.0 {
            return bad(format!(
                "dt = {} exceeds tau/100 = {}",
                self.dt,
                self.tau / 100.0
            ));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return bad(format!(
                "t_final = {} must be finite and >= dt",
                self.t_final
            ));
        }
        if self.n_traj == 0 {
            return bad("n_traj must be positive".into());
        }
        if self.n_samples < 2 {
            return bad(format!(
                "need at least 2 sample times, got {}",
                self.n_samples
            ));
        }
        let norm_sq = self.initial_state[0].norm_sqr() + self.initial_state[1].norm_sqr();
        if !((norm_sq.sqrt() - 1.0).abs() <= 1e-12) {
            return bad(format!("initial state norm {} is not 1", norm_sq.sqrt()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    /// Step indices at which the state is recorded.
    pub fn sample_steps(&self) -> Vec<usize> {
        let n = self.n_steps();
        let m = self.n_samples - 1;
        (0..=m)
            .map(|i| ((i * n) as f64 / m as f64).round() as usize)
            .collect()
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.sample_steps()
            .iter()
            .map(|&s| s as f64 * self.dt)
            .collect()
    }

    pub fn noise_std(&self) -> f64 {
        (self.dt / self.tau).sqrt()
    }
}

/// Pure state with Bloch vector `r` (`‖r‖ = 1`).
pub fn state_from_bloch(r: &BlochVector) -> Result<StateVector> {
    let n = r.norm();
    if !((n - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "pure state needs ‖r‖ = 1, got {n}"
        )));
    }
    let [x, y, z] = r.0;
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    Ok([
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

pub fn bloch_of_state(psi: &StateVector) -> BlochVector {
    let c = psi[0].conj() * psi[1];
    BlochVector([
        2.0 * c.re,
        2.0 * c.im,
        psi[0].norm_sqr() - psi[1].norm_sqr(),
    ])
}

/// `exp(−(i/2)·dW·σ)ψ = [cos(θ/2) − i sin(θ/2)(n̂·σ)]ψ` with `θ = ‖dW‖`.
pub fn sse_kick(psi: &StateVector, dw: [f64; 3]) -> StateVector {
    let theta = (dw[0] * dw[0] + dw[1] * dw[1] + dw[2] * dw[2]).sqrt();
    if theta == 0.0 {
        return *psi;
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let [n1, n2, n3] = dw.map(|x| x / theta);
    // −i·sin(θ/2)·(n̂·σ), with n̂·σ = [[n3, n1 − i n2], [n1 + i n2, −n3]]
    let u00 = Complex64::new(c, -s * n3);
    let u01 = Complex64::new(-s * n2, -s * n1);
    let u10 = Complex64::new(s * n2, -s * n1);
    let u11 = Complex64::new(c, s * n3);
    [u00 * psi[0] + u01 * psi[1], u10 * psi[0] + u11 * psi[1]]
}

/// Per-trajectory Gaussian increments: ChaCha8 keyed by the run seed, stream
/// selected by the trajectory index, standard normals from `rand_distr`'s
/// ziggurat sampler.
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, trajectory_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trajectory_index);
        Self { rng }
    }

    /// Three independent `N(0, std²)` components.
    pub fn increment(&mut self, std: f64) -> [f64; 3] {
        let mut next = || -> f64 { self.rng.sample::<f64, _>(StandardNormal) * std };
        [next(), next(), next()]
    }
}

/// Bloch vectors of one trajectory at [`SSEConfig::sample_times`].
pub fn run_trajectory(cfg: &SSEConfig, trajectory_index: u64) -> Vec<BlochVector> {
    let mut noise = NoiseStream::new(cfg.seed, trajectory_index);
    let std = cfg.noise_std();
    let samples = cfg.sample_steps();
    let mut out = Vec::with_capacity(samples.len());
    let mut psi = cfg.initial_state;
    let mut next_sample = samples.iter().peekable();
    for step in 0..=cfg.n_steps() {
        while next_sample.next_if(|&&s| s == step).is_some() {
            out.push(bloch_of_state(&psi));
        }
        if step < cfg.n_steps() {
            psi = sse_kick(&psi, noise.increment(std));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub mean_bloch: Vec<BlochVector>,
    /// Standard error of each mean component; `None` for a single trajectory.
    pub stderr: Option<Vec<[f64; 3]>>,
    pub initial_bloch: BlochVector,
    pub n_traj: usize,
}

impl EnsembleResult {
    /// Delta-method standard error of `‖mean_bloch[k]‖`.
    pub fn norm_stderr(&self, k: usize) -> Option<f64> {
        let se = self.stderr.as_ref()?[k];
        let m = self.mean_bloch[k];
        let n = m.norm();
        if n == 0.0 {
            return Some((se[0].powi(2) + se[1].powi(2) + se[2].powi(2)).sqrt());
        }
        Some(
            (0..3)
                .map(|c| (m.0[c] / n * se[c]).powi(2))
                .sum::<f64>()
                .sqrt(),
        )
    }
}

/// Runs all trajectories (in parallel) and reduces in trajectory order.
pub fn run_ensemble(cfg: &SSEConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let runs: Vec<Vec<BlochVector>> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| run_trajectory(cfg, i))
        .collect();
    let times = cfg.sample_times();
    let n = runs.len() as f64;

    let mean_bloch: Vec<BlochVector> = (0..times.len())
        .map(|k| {
            let mut sum = [0.0; 3];
            for run in &runs {
                for c in 0..3 {
                    sum[c] += run[k].0[c];
                }
            }
            BlochVector(sum.map(|s| s / n))
        })
        .collect();

    let stderr = (runs.len() > 1).then(|| {
        (0..times.len())
            .map(|k| {
                let mut ss = [0.0; 3];
                for run in &runs {
                    for c in 0..3 {
                        ss[c] += (run[k].0[c] - mean_bloch[k].0[c]).powi(2);
                    }
                }
                ss.map(|s| (s / (n - 1.0)).sqrt() / n.sqrt())
            })
            .collect()
    });

    Ok(EnsembleResult {
        times,
        mean_bloch,
        stderr,
        initial_bloch: bloch_of_state(&cfg.initial_state),
        n_traj: cfg.n_traj,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZRow {
    pub t: f64,
    pub z: [f64; 3],
}

/// Per-component z-scores against `e^{−t/τ}·r(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZReport {
    pub rows: Vec<ZRow>,
}

impl ZReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.z.iter())
            .fold(0.0, |m, z| m.max(z.abs()))
    }

    pub fn passed(&self) -> bool {
        self.max_abs_z() < Z_FAIL
    }

    /// Passed, but with some |z| at or above [`Z_FLAG`].
    pub fn flagged(&self) -> bool {
        self.passed() && self.max_abs_z() >= Z_FLAG
    }
}

pub fn analytic_bloch(r0: &BlochVector, t: f64, tau: f64) -> BlochVector {
    let f = (-t / tau).exp();
    BlochVector(r0.0.map(|x| f * x))
}

pub fn compare_to_analytic(res: &EnsembleResult, tau: f64) -> Result<ZReport> {
    let stderr = res.stderr.as_ref().ok_or(Error::StderrUndefined)?;
    let mut rows = Vec::with_capacity(res.times.len());
    for (k, &t) in res.times.iter().enumerate() {
        let expected = analytic_bloch(&res.initial_bloch, t, tau);
        let mut z = [0.0; 3];
        for c in 0..3 {
            let dev = res.mean_bloch[k].0[c] - expected.0[c];
            let se = stderr[k][c];
            z[c] = if se > 0.0 {
                dev / se
            } else if dev.abs() <= 1e-12 {
                0.0
            } else {
                return Err(Error::ZeroStderr(t));
            };
        }
        rows.push(ZRow { t, z });
    }
    Ok(ZReport { rows })
}
