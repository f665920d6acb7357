//! ADADELTA parameter updates: accumulate E[g^2], scale each step by
//! RMS[dx]/RMS[g], accumulate E[dx^2]. No learning-rate parameter.

use super::TrainError;

pub const RHO: f64 = 0.95;
pub const EPSILON: f64 = 1e-6;

/// Per-parameter accumulators over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdadeltaState {
    avg_sq_grad: Vec<f64>,
    avg_sq_delta: Vec<f64>,
}

impl AdadeltaState {
    pub fn new(param_count: usize) -> Self {
        AdadeltaState {
            avg_sq_grad: vec![0.0; param_count],
            avg_sq_delta: vec![0.0; param_count],
        }
    }

    /// Apply one update in place. Errors on non-finite gradients.
    pub fn step(&mut self, grads: &[f64], params: &mut [f64]) -> Result<(), TrainError> {
        assert_eq!(grads.len(), params.len());
        assert_eq!(grads.len(), self.avg_sq_grad.len());
        for i in 0..grads.len() {
            let g = grads[i];
            if !g.is_finite() {
                return Err(TrainError::NonFiniteGradient);
            }
            self.avg_sq_grad[i] = RHO * self.avg_sq_grad[i] + (1.0 - RHO) * g * g;
            let delta = -((self.avg_sq_delta[i] + EPSILON).sqrt()
                / (self.avg_sq_grad[i] + EPSILON).sqrt())
                * g;
            self.avg_sq_delta[i] = RHO * self.avg_sq_delta[i] + (1.0 - RHO) * delta * delta;
            params[i] += delta;
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn accumulators(&self) -> (&[f64], &[f64]) {
        (&self.avg_sq_grad, &self.avg_sq_delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_gives_zero_update_and_decays_accumulators() {
        let mut state = AdadeltaState::new(1);
        let mut params = vec![1.5];
        state.step(&[2.0], &mut params).unwrap();
        let (g2, _) = state.accumulators();
        let g2_before = g2[0];
        let p_before = params[0];
        state.step(&[0.0], &mut params).unwrap();
        assert_eq!(params[0], p_before);
        let (g2, _) = state.accumulators();
        assert!((g2[0] - RHO * g2_before).abs() < 1e-15);
    }

    #[test]
    fn first_step_matches_hand_formula() {
        // E[g^2] = 0.05 g^2; RMS[dx] = sqrt(eps); dx = -(sqrt(eps)/sqrt(0.05 g^2 + eps)) g
        let g = 3.0f64;
        let mut state = AdadeltaState::new(1);
        let mut params = vec![0.0];
        state.step(&[g], &mut params).unwrap();
        let expected = -(EPSILON.sqrt() / (0.05 * g * g + EPSILON).sqrt()) * g;
        assert!(
            (params[0] - expected).abs() < 1e-15,
            "got {} expected {expected}",
            params[0]
        );
    }

    #[test]
    fn repeated_identical_gradients_grow_the_step() {
        let g = 0.5f64;
        let mut state = AdadeltaState::new(1);
        let mut params = vec![0.0];
        state.step(&[g], &mut params).unwrap();
        let first = params[0].abs();
        let before = params[0];
        state.step(&[g], &mut params).unwrap();
        let second = (params[0] - before).abs();
        assert!(second >= first, "second step {second} < first {first}");
    }

    #[test]
    fn non_finite_gradient_errors() {
        let mut state = AdadeltaState::new(1);
        let mut params = vec![0.0];
        assert!(state.step(&[f64::NAN], &mut params).is_err());
        assert!(state.step(&[f64::INFINITY], &mut params).is_err());
    }
}
