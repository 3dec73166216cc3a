use num_complex::Complex64;
use serde::Serialize;

/// Per-site magnitudes and relative phases of a single-excitation state.
///
/// Phases are only defined on active sites (`|alpha_j| > threshold`). The
/// lowest-index active site of each connected component is the phase
/// reference and carries phase 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeProfile {
    pub magnitudes: Vec<f64>,
    pub phases: Vec<Option<f64>>,
    pub active: Vec<bool>,
    pub threshold: f64,
}

impl AmplitudeProfile {
    /// Direct profile of known amplitudes, phases relative to the first
    /// active site.
    pub fn from_amplitudes(amplitudes: &[Complex64], threshold: f64) -> Self {
        let magnitudes: Vec<f64> = amplitudes.iter().map(|a| a.norm()).collect();
        let active: Vec<bool> = magnitudes.iter().map(|&m| m > threshold).collect();
        let reference = active.iter().position(|&a| a).map(|j| amplitudes[j].arg());
        let phases = amplitudes
            .iter()
            .zip(&active)
            .map(|(a, &on)| match (on, reference) {
                (true, Some(r)) => Some(wrap_phase(a.arg() - r)),
                _ => None,
            })
            .collect();
        Self { magnitudes, phases, active, threshold }
    }

    pub fn n_sites(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn reference_site(&self) -> Option<usize> {
        self.active.iter().position(|&a| a)
    }

    pub fn active_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&j| self.active[j]).collect()
    }

    /// `theta_k - theta_j` wrapped to (-pi, pi], when both phases exist.
    pub fn phase_difference(&self, j: usize, k: usize) -> Option<f64> {
        Some(wrap_phase(self.phases[k]? - self.phases[j]?))
    }

    pub fn probability_sum(&self) -> f64 {
        self.magnitudes.iter().map(|m| m * m).sum()
    }

    /// Complex amplitudes implied by the profile; inactive sites get phase 0.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.magnitudes
            .iter()
            .zip(&self.phases)
            .map(|(&m, p)| Complex64::from_polar(m, p.unwrap_or(0.0)))
            .collect()
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_keeps_upper_end() {
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn phases_are_relative_to_first_active_site() {
        let amps = [
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(0.6, 1.0),
            Complex64::from_polar(0.8, 2.5),
        ];
        let p = AmplitudeProfile::from_amplitudes(&amps, 1e-9);
        assert_eq!(p.reference_site(), Some(1));
        assert_eq!(p.phases[0], None);
        assert_eq!(p.phases[1], Some(0.0));
        assert!((p.phases[2].unwrap() - 1.5).abs() < 1e-12);
    }
}
