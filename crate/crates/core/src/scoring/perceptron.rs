/// Perceptron weights with lazily maintained averages.
///
/// After `T` training steps the averaged weight of a feature is the mean of
/// its values at the end of steps `1..=T`. An update made during step `t`
/// (with `t - 1` completed steps) is recorded in `shadow` scaled by `t - 1`,
/// so the average is `w - shadow / T`.
#[derive(Clone, Debug)]
pub struct AveragedPerceptron {
    weights: Vec<f64>,
    shadow: Vec<f64>,
    steps: u64,
}

impl AveragedPerceptron {
    pub fn new(bits: u8) -> Self {
        let size = 1usize << bits;
        AveragedPerceptron {
            weights: vec![0.0; size],
            shadow: vec![0.0; size],
            steps: 0,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn score(&self, ids: &[u32]) -> f64 {
        ids.iter().map(|&i| self.weights[i as usize]).sum()
    }

    pub fn update(&mut self, ids: &[u32], delta: f64) {
        let scaled = self.steps as f64 * delta;
        for &i in ids {
            self.weights[i as usize] += delta;
            self.shadow[i as usize] += scaled;
        }
    }

    /// Mark the end of one training step.
    pub fn tick(&mut self) {
        self.steps += 1;
    }

    pub fn averaged(&self) -> Vec<f64> {
        if self.steps == 0 {
            return self.weights.clone();
        }
        let t = self.steps as f64;
        self.weights.iter().zip(&self.shadow).map(|(w, s)| w - s / t).collect()
    }
}
