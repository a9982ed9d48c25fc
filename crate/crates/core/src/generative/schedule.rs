use super::GenerationError;
use std::fmt;
use std::str::FromStr;

/// Smallest rotation noise scale, at t = 0.
pub const SIGMA_ROT_MIN: f64 = 0.01;
/// Rotation noise scale at t = T.
pub const SIGMA_ROT_MAX: f64 = 1.5;
/// Upper clip on per-step β so that ᾱ_T stays positive.
const MAX_BETA: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleKind {
    #[default]
    Cosine,
    Linear,
}

impl FromStr for ScheduleKind {
    type Err = GenerationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(ScheduleKind::Cosine),
            "linear" => Ok(ScheduleKind::Linear),
            other => Err(GenerationError::InvalidSchedule(other.to_string())),
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleKind::Cosine => "cosine",
            ScheduleKind::Linear => "linear",
        })
    }
}

/// Noise levels for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSchedule {
    kind: ScheduleKind,
    alpha_bar: Vec<f64>,
    sigma_rot: Vec<f64>,
}

impl DiffusionSchedule {
    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn timesteps(&self) -> usize {
        self.alpha_bar.len() - 1
    }

    /// Signal retention ᾱ_t, with ᾱ_0 = 1.
    pub fn alpha_bar(&self) -> &[f64] {
        &self.alpha_bar
    }

    /// IGSO3 scale of the rotation branch per step.
    pub fn sigma_rot(&self) -> &[f64] {
        &self.sigma_rot
    }

    /// Torsion noise scale `σ(t) = sqrt(1 − ᾱ_t) · σ_max`.
    pub fn torsion_sigma(&self, t: usize, sigma_max: f64) -> f64 {
        (1.0 - self.alpha_bar[t]).max(0.0).sqrt() * sigma_max
    }
}

/// Builds a schedule of `timesteps` steps (cosine or linear β).
pub fn make_schedule(kind: ScheduleKind, timesteps: usize) -> Result<DiffusionSchedule, GenerationError> {
    if timesteps < 1 {
        return Err(GenerationError::InvalidTimesteps(timesteps));
    }
    let t_max = timesteps as f64;
    let betas: Vec<f64> = match kind {
        ScheduleKind::Cosine => {
            let s = 0.008;
            let f = |t: f64| {
                let x = ((t / t_max + s) / (1.0 + s)) * std::f64::consts::FRAC_PI_2;
                x.cos().powi(2)
            };
            (1..=timesteps)
                .map(|t| (1.0 - f(t as f64) / f((t - 1) as f64)).clamp(0.0, MAX_BETA))
                .collect()
        }
        ScheduleKind::Linear => {
            let scale = 1000.0 / t_max;
            let (start, end) = (1e-4 * scale, 0.02 * scale);
            (0..timesteps)
                .map(|i| {
                    let frac = if timesteps == 1 { 0.0 } else { i as f64 / (timesteps - 1) as f64 };
                    (start + (end - start) * frac).min(MAX_BETA)
                })
                .collect()
        }
    };
    let mut alpha_bar = Vec::with_capacity(timesteps + 1);
    alpha_bar.push(1.0);
    for b in &betas {
        let prev = *alpha_bar.last().unwrap();
        alpha_bar.push(prev * (1.0 - b));
    }
    let sigma_rot = alpha_bar
        .iter()
        .map(|a| SIGMA_ROT_MIN + (SIGMA_ROT_MAX - SIGMA_ROT_MIN) * (1.0 - a).max(0.0).sqrt())
        .collect();
    let sched = DiffusionSchedule {
        kind,
        alpha_bar,
        sigma_rot,
    };
    debug_assert!(sched.alpha_bar.windows(2).all(|w| w[1] < w[0]));
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_and_monotonicity() {
        for kind in [ScheduleKind::Cosine, ScheduleKind::Linear] {
            for t in [1, 2, 10, 1000] {
                let s = make_schedule(kind, t).unwrap();
                assert_eq!(s.alpha_bar()[0], 1.0);
                assert_eq!(s.timesteps(), t);
                assert!(s.alpha_bar().windows(2).all(|w| w[1] < w[0]), "{kind} {t}");
                assert!(s.alpha_bar().iter().all(|&a| a > 0.0 && a <= 1.0));
                assert!(s.sigma_rot().windows(2).all(|w| w[1] > w[0]));
                assert!(s.sigma_rot()[0] > 0.0);
            }
        }
    }

    #[test]
    fn linear_two_steps() {
        let s = make_schedule(ScheduleKind::Linear, 2).unwrap();
        let a = s.alpha_bar();
        assert!(a[0] > a[1] && a[1] > a[2]);
    }

    #[test]
    fn zero_steps_rejected() {
        assert_eq!(make_schedule(ScheduleKind::Cosine, 0), Err(GenerationError::InvalidTimesteps(0)));
    }

    #[test]
    fn parses_kind() {
        assert_eq!("linear".parse::<ScheduleKind>().unwrap(), ScheduleKind::Linear);
        assert!("quadratic".parse::<ScheduleKind>().is_err());
    }
}
