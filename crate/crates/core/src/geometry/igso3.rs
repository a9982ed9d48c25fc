//! Isotropic Gaussian on SO(3).
//!
//! The rotation angle ω has density `(1 − cos ω)/π · f(ω; σ)` with
//! `f(ω; σ) = Σ_l (2l + 1) exp(−l(l+1)σ²/2) sin((l + ½)ω) / sin(ω/2)`.
//! The series is truncated at [`SERIES_TERMS`]; below [`SMALL_SIGMA`] it no
//! longer resolves the concentrated density and the closed-form small-σ
//! expansion is used instead. Sampling is by inverse CDF on a tabulated grid.

use super::{Rotation, Vec3};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

pub const SERIES_TERMS: usize = 100;
const CACHE_LIMIT: usize = 512;
pub const GRID_POINTS: usize = 4096;
/// Below this scale the truncated series is replaced by the closed form.
pub const SMALL_SIGMA: f64 = 0.1;

fn series(omega: f64, sigma: f64) -> f64 {
    let half = 0.5 * omega;
    let s_half = half.sin();
    if s_half.abs() < 1e-12 {
        // ω → 0 limit: sin((l+½)ω)/sin(ω/2) → 2l + 1.
        return (0..=SERIES_TERMS)
            .map(|l| {
                let l = l as f64;
                (2.0 * l + 1.0).powi(2) * (-l * (l + 1.0) * sigma * sigma / 2.0).exp()
            })
            .sum();
    }
    // sin((l+½)ω) by angle-addition recurrence.
    let (sin_w, cos_w) = omega.sin_cos();
    let (mut s, mut c) = (half.sin(), half.cos());
    let mut total = 0.0;
    for l in 0..=SERIES_TERMS {
        let lf = l as f64;
        let weight = (-lf * (lf + 1.0) * sigma * sigma / 2.0).exp();
        if weight < 1e-300 {
            break;
        }
        total += (2.0 * lf + 1.0) * weight * s;
        let next_s = s * cos_w + c * sin_w;
        c = c * cos_w - s * sin_w;
        s = next_s;
    }
    total / s_half
}

fn small_sigma_closed_form(omega: f64, sigma: f64) -> f64 {
    let eps = 0.5 * sigma * sigma;
    let s_half = (0.5 * omega).sin();
    let gauss = (eps / 4.0 - omega * omega / (4.0 * eps)).exp();
    if gauss == 0.0 {
        return 0.0;
    }
    let wrap = (omega - 2.0 * PI) * (-PI * (PI - omega) / eps).exp()
        + (omega + 2.0 * PI) * (-PI * (PI + omega) / eps).exp();
    let ratio = if s_half.abs() < 1e-12 {
        1.0
    } else {
        (omega - wrap) / (2.0 * s_half)
    };
    PI.sqrt() * eps.powf(-1.5) * gauss * ratio
}

/// Probability density of the IGSO3 rotation angle at `omega ∈ [0, π]`.
pub fn igso3_angle_density(omega: f64, sigma: f64) -> f64 {
    let f = if sigma < SMALL_SIGMA {
        small_sigma_closed_form(omega, sigma)
    } else {
        series(omega, sigma)
    };
    ((1.0 - omega.cos()) / PI * f).max(0.0)
}

/// Tabulated inverse CDF of the IGSO3 angle for one σ.
#[derive(Debug, Clone)]
pub struct Igso3Table {
    sigma: f64,
    angles: Vec<f64>,
    cdf: Vec<f64>,
}

impl Igso3Table {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        // Mass beyond 12σ is below e^-72; narrowing the grid keeps small σ resolved.
        let upper = (12.0 * sigma).min(PI);
        let n = GRID_POINTS;
        let angles: Vec<f64> = (0..n).map(|i| upper * i as f64 / (n - 1) as f64).collect();
        let density: Vec<f64> = angles.iter().map(|&w| igso3_angle_density(w, sigma)).collect();
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        for i in 1..n {
            let dw = angles[i] - angles[i - 1];
            let prev = cdf[i - 1];
            cdf.push(prev + 0.5 * (density[i] + density[i - 1]) * dw);
        }
        let total = cdf[n - 1];
        for v in &mut cdf {
            *v /= total;
        }
        Igso3Table { sigma, angles, cdf }
    }

    /// Shared table for `sigma`, built once per distinct value (the cache is
    /// flushed after `CACHE_LIMIT` entries).
    pub fn cached(sigma: f64) -> Arc<Igso3Table> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Igso3Table>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = sigma.to_bits();
        if let Some(t) = cache.lock().expect("igso3 cache poisoned").get(&key) {
            return Arc::clone(t);
        }
        let table = Arc::new(Igso3Table::new(sigma));
        let mut guard = cache.lock().expect("igso3 cache poisoned");
        if guard.len() >= CACHE_LIMIT {
            guard.clear();
        }
        guard
            .entry(key)
            .or_insert(table)
            .clone()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Angle at cumulative probability `u ∈ [0, 1]`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.angles[0];
        }
        if idx >= self.cdf.len() {
            return *self.angles.last().unwrap();
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let (a0, a1) = (self.angles[idx - 1], self.angles[idx]);
        if c1 - c0 <= 0.0 {
            return a1;
        }
        a0 + (a1 - a0) * (u - c0) / (c1 - c0)
    }

    pub fn sample_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rotation {
        let axis = loop {
            let v = Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            let n = v.norm();
            if n > 1e-12 {
                break v / n;
            }
        };
        let angle = self.sample_angle(rng);
        Rotation::exp(&(axis * angle))
    }
}

/// Draws a rotation from IGSO3(σ): uniform axis, tabulated angle.
pub fn igso3_sample<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Rotation {
    Igso3Table::cached(sigma).sample(rng)
}
