//! Keyed random streams.
//!
//! Every stochastic decision in a run draws from its own stream, addressed by
//! `(seed, run, episode, step, entity, purpose)`: a ChaCha8 generator whose
//! key and stream id are packed from those fields. The values an agent sees
//! never depend on which thread executed it or on how many draws other
//! entities made before it. This is what lets distributed and centralized training
//! consume exactly the same randomness.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which part of a run an episode belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EpisodeId {
    /// The n-th training trial.
    Train(u64),
    /// Evaluation rollout `index` at checkpoint `checkpoint`.
    Eval { checkpoint: u64, index: u64 },
    /// Free-standing episodes (analysis, sampling tests).
    Free(u64),
}

impl EpisodeId {
    fn words(self) -> (u64, u64, u64) {
        match self {
            EpisodeId::Train(n) => (0, n, 0),
            EpisodeId::Eval { checkpoint, index } => (1, checkpoint, index),
            EpisodeId::Free(n) => (2, n, 0),
        }
    }
}

/// Who consumes a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entity {
    Environment,
    Agent(usize),
    /// A centralized controller acting for every agent at once.
    Central,
}

impl Entity {
    fn word(self) -> u64 {
        match self {
            Entity::Environment => 0,
            Entity::Central => 1,
            Entity::Agent(i) => {
                assert!(i < (1 << 16) - 2, "agent index out of range");
                i as u64 + 2
            }
        }
    }
}

/// What a stream is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    Reset,
    Transition,
    InitialInternalState,
    Decision,
    Exploration,
    Initialization,
}

impl Purpose {
    fn word(self) -> u64 {
        match self {
            Purpose::Reset => 1,
            Purpose::Transition => 2,
            Purpose::InitialInternalState => 3,
            Purpose::Decision => 4,
            Purpose::Exploration => 5,
            Purpose::Initialization => 6,
        }
    }
}

/// Full address of one random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub run: u64,
    pub episode: EpisodeId,
    pub step: u64,
    pub entity: Entity,
    pub purpose: Purpose,
}

impl StreamKey {
    /// ChaCha key from `(seed, run, episode)`, stream id from the rest.
    /// Both packings are injective, so distinct keys never share a stream.
    pub fn rng(&self) -> StreamRng {
        let (tag, a, b) = self.episode.words();
        let mut key = [0u8; 32];
        for (chunk, w) in key.chunks_mut(8).zip([self.seed, self.run, a, b]) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        assert!(self.step < 1 << 43, "step index out of range");
        let stream = self.step << 21 | self.entity.word() << 5 | self.purpose.word() << 2 | tag;
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        StreamRng(rng)
    }
}

/// One keyed ChaCha8 stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    /// A stream that is not tied to any run layout; handy in tests.
    pub fn from_seed(seed: u64) -> Self {
        StreamRng(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Stream factory for one run of one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunStreams {
    pub seed: u64,
    pub run: u64,
}

impl RunStreams {
    pub fn new(seed: u64, run: u64) -> Self {
        RunStreams { seed, run }
    }

    pub fn stream(
        &self,
        episode: EpisodeId,
        step: u64,
        entity: Entity,
        purpose: Purpose,
    ) -> StreamRng {
        StreamKey {
            seed: self.seed,
            run: self.run,
            episode,
            step,
            entity,
            purpose,
        }
        .rng()
    }

    pub fn episode(&self, episode: EpisodeId) -> EpisodeStreams {
        EpisodeStreams {
            run: *self,
            episode,
        }
    }
}

/// Streams for a single episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeStreams {
    pub run: RunStreams,
    pub episode: EpisodeId,
}

impl EpisodeStreams {
    pub fn stream(&self, step: u64, entity: Entity, purpose: Purpose) -> StreamRng {
        self.run.stream(self.episode, step, entity, purpose)
    }
}

/// Draws an index from a probability vector.
///
/// Falls back to the last index with positive mass when rounding leaves the
/// uniform draw above the cumulative total.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_pure_functions_of_their_key() {
        let s = RunStreams::new(7, 3);
        let mut a = s.stream(EpisodeId::Train(10), 4, Entity::Agent(1), Purpose::Decision);
        let mut b = s.stream(EpisodeId::Train(10), 4, Entity::Agent(1), Purpose::Decision);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_keys_give_distinct_streams() {
        let s = RunStreams::new(7, 3);
        let base = s
            .stream(EpisodeId::Train(10), 4, Entity::Agent(1), Purpose::Decision)
            .next_u64();
        let others = [
            s.stream(EpisodeId::Train(11), 4, Entity::Agent(1), Purpose::Decision),
            s.stream(EpisodeId::Train(10), 5, Entity::Agent(1), Purpose::Decision),
            s.stream(EpisodeId::Train(10), 4, Entity::Agent(0), Purpose::Decision),
            s.stream(
                EpisodeId::Train(10),
                4,
                Entity::Agent(1),
                Purpose::Exploration,
            ),
            s.stream(
                EpisodeId::Eval {
                    checkpoint: 10,
                    index: 0,
                },
                4,
                Entity::Agent(1),
                Purpose::Decision,
            ),
            RunStreams::new(7, 4).stream(
                EpisodeId::Train(10),
                4,
                Entity::Agent(1),
                Purpose::Decision,
            ),
            RunStreams::new(8, 3).stream(
                EpisodeId::Train(10),
                4,
                Entity::Agent(1),
                Purpose::Decision,
            ),
        ];
        for mut o in others {
            assert_ne!(o.next_u64(), base);
        }
    }

    #[test]
    fn uniform_floats_look_uniform() {
        let mut rng = StreamRng::from_seed(1);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| rng.gen::<f64>()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "{mean}");
    }

    #[test]
    fn sample_index_matches_probabilities() {
        let probs = [0.2, 0.0, 0.5, 0.3];
        let mut rng = StreamRng::from_seed(99);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[sample_index(&probs, &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        for (c, p) in counts.iter().zip(probs) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.02);
        }
    }
}
