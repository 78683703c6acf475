use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// A seeded, splittable random stream.
///
/// Backed by ChaCha20, a counter-based generator: the output sequence is a
/// pure function of the seed, identical on every platform.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha20Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child seed for stream `index`, a pure function of `(parent seed, index)`.
    ///
    /// The current position of `self` does not matter.
    pub fn child_seed(parent: u64, index: u64) -> u64 {
        let mut gen = ChaCha20Rng::seed_from_u64(parent);
        // stream 0 is the parent's own stream
        gen.set_stream(index.wrapping_add(1));
        gen.next_u64()
    }

    pub fn split(&self, index: u64) -> RngState {
        RngState::new(Self::child_seed(self.seed, index))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// One standard-normal draw; advancing `rng` is the only side effect.
pub fn sample_standard_normal(rng: &mut RngState) -> f64 {
    rng.standard_normal()
}
