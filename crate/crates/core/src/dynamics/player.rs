use crate::error::{Error, Result};
use crate::potential::{EntropyRegularizer, StepWeights};

use super::feedback::FeedbackMessage;

/// Local state of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerState {
    /// Action for the next iteration, `x_{k+1}`.
    pub x_next: Vec<f64>,
    /// Averaged iterate `y_k`.
    pub y: Vec<f64>,
    /// Dual accumulator `z_k`.
    pub z: Vec<f64>,
    /// Mirror image of `z_k`.
    pub v: Vec<f64>,
    /// Freshest accepted feedback.
    pub g_star: Vec<f64>,
    /// Iteration at which `g_star` was queried.
    pub s: u64,
}

impl PlayerState {
    /// State before the first iteration: `x_0 = x_1 = x0`, `z_0` the entropy
    /// gradient at `x0`, `y_0 = 0`, and the first gradient `g1` (queried at
    /// `x_1`) already in hand with timestamp 1.
    pub fn new(reg: &EntropyRegularizer, x0: Vec<f64>, g1: Vec<f64>) -> Result<Self> {
        let z = reg.gradient(&x0)?;
        if g1.len() != x0.len() {
            return Err(Error::domain("initial gradient has the wrong dimension"));
        }
        Ok(PlayerState {
            y: vec![0.0; x0.len()],
            v: x0.clone(),
            x_next: x0,
            z,
            g_star: g1,
            s: 1,
        })
    }

    /// One iteration with the exact gradient `g` at the current joint action.
    pub fn instant_step(
        &mut self,
        g: &[f64],
        reg: &EntropyRegularizer,
        w: &StepWeights,
    ) -> Result<()> {
        self.accelerated_update(g, reg, w)?;
        self.g_star.clear();
        self.g_star.extend_from_slice(g);
        self.s = w.k;
        Ok(())
    }

    /// One iteration with whatever feedback arrived this round.
    ///
    /// Only the message with the largest origin can matter; it replaces the
    /// cached gradient if it is newer. The update then uses the cached
    /// gradient, stale or not.
    pub fn delayed_step(
        &mut self,
        inbox: Vec<FeedbackMessage>,
        reg: &EntropyRegularizer,
        w: &StepWeights,
    ) -> Result<()> {
        if let Some(freshest) = inbox.into_iter().max_by_key(|m| m.origin) {
            if freshest.origin > self.s {
                self.s = freshest.origin;
                self.g_star = freshest.gradient;
            }
        }
        let g = std::mem::take(&mut self.g_star);
        let res = self.accelerated_update(&g, reg, w);
        self.g_star = g;
        res
    }

    fn accelerated_update(
        &mut self,
        g: &[f64],
        reg: &EntropyRegularizer,
        w: &StepWeights,
    ) -> Result<()> {
        if !(w.big_a > 0.0 && w.big_a_next > 0.0) {
            return Err(Error::Schedule(format!(
                "partial sum A_{} is not positive",
                w.k
            )));
        }
        if g.len() != self.z.len() {
            return Err(Error::domain("gradient has the wrong dimension"));
        }
        for (z, g) in self.z.iter_mut().zip(g) {
            *z -= w.a * g;
        }
        self.v = reg.mirror_map(&self.z)?;

        if w.big_a_prev == 0.0 {
            self.y.clone_from(&self.v);
        } else {
            let keep = w.big_a_prev / w.big_a;
            let take = w.a / w.big_a;
            for (y, v) in self.y.iter_mut().zip(&self.v) {
                *y = keep * *y + take * v;
            }
        }

        let keep = w.big_a / w.big_a_next;
        let take = w.a_next / w.big_a_next;
        for ((x, y), v) in self.x_next.iter_mut().zip(&self.y).zip(&self.v) {
            *x = keep * y + take * v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{ScaledSimplex, StepSchedule};

    fn reg(n: usize, s: f64) -> EntropyRegularizer {
        EntropyRegularizer::new(ScaledSimplex::new(n, s).unwrap()).unwrap()
    }

    #[test]
    fn first_step_ignores_history() {
        let r = reg(2, 1.0);
        let mut st = PlayerState::new(&r, vec![0.5, 0.5], vec![1.0, 0.0]).unwrap();
        st.y = vec![f64::NAN, 42.0];
        let w = StepSchedule::power(1.0, 0.0).unwrap().cursor().next().unwrap();
        st.instant_step(&[1.0, 0.0], &r, &w).unwrap();
        assert_eq!(st.y, st.v);
    }

    #[test]
    fn hand_evaluated_first_step() {
        let r = reg(2, 1.0);
        let x0 = vec![0.5, 0.5];
        let z0 = r.gradient(&x0).unwrap();
        let mut st = PlayerState::new(&r, x0, vec![1.0, 0.0]).unwrap();
        // a_1 = 1
        let w = StepSchedule::power(1.0, 1.0).unwrap().cursor().next().unwrap();
        st.instant_step(&[1.0, 0.0], &r, &w).unwrap();
        assert_eq!(st.z, vec![z0[0] - 1.0, z0[1]]);
        let e = (-1.0f64).exp();
        let expected = [e / (1.0 + e), 1.0 / (1.0 + e)];
        assert!((st.y[0] - expected[0]).abs() < 1e-15);
        assert!((st.y[1] - expected[1]).abs() < 1e-15);
        assert!((st.y[0] - 0.268941).abs() < 1e-6);
        // x_2 = (A_1/A_2) y_1 + (a_2/A_2) v_1 = y_1 since y_1 = v_1
        assert!((st.x_next[0] - expected[0]).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_stationary() {
        let r = reg(3, 6.0);
        let x0 = vec![2.0, 2.0, 2.0];
        let mut st = PlayerState::new(&r, x0.clone(), vec![0.0; 3]).unwrap();
        for w in StepSchedule::power(0.3, 1.0).unwrap().cursor().take(200) {
            st.instant_step(&[0.0; 3], &r, &w).unwrap();
            for (a, b) in st.y.iter().zip(&x0) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delayed_step_keeps_cache_without_news() {
        let r = reg(2, 1.0);
        let mut st = PlayerState::new(&r, vec![0.5, 0.5], vec![1.0, 2.0]).unwrap();
        let mut cursor = StepSchedule::inverse(1.0).unwrap().cursor();
        st.delayed_step(vec![], &r, &cursor.next().unwrap()).unwrap();
        assert_eq!(st.s, 1);
        assert_eq!(st.g_star, vec![1.0, 2.0]);

        st.s = 5;
        st.delayed_step(vec![FeedbackMessage::new(3, vec![9.0, 9.0], 4)], &r, &cursor.next().unwrap())
            .unwrap();
        assert_eq!(st.s, 5);
        assert_eq!(st.g_star, vec![1.0, 2.0]);

        st.delayed_step(
            vec![
                FeedbackMessage::new(6, vec![6.0, 0.0], 7),
                FeedbackMessage::new(7, vec![7.0, 0.0], 7),
            ],
            &r,
            &cursor.next().unwrap(),
        )
        .unwrap();
        assert_eq!(st.s, 7);
        assert_eq!(st.g_star, vec![7.0, 0.0]);
    }

    #[test]
    fn degenerate_weights_rejected() {
        let r = reg(2, 1.0);
        let mut st = PlayerState::new(&r, vec![0.5, 0.5], vec![0.0, 0.0]).unwrap();
        let w = StepWeights {
            k: 1,
            a: 0.0,
            a_next: 0.0,
            big_a_prev: 0.0,
            big_a: 0.0,
            big_a_next: 0.0,
        };
        assert!(matches!(st.instant_step(&[0.0, 0.0], &r, &w), Err(Error::Schedule(_))));
    }

    #[test]
    fn boundary_start_rejected() {
        let r = reg(2, 1.0);
        assert!(PlayerState::new(&r, vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }
}
