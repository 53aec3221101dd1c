//! Seeded Monte Carlo estimates of exact-recovery error rates.
//!
//! Trial `r` draws everything (design, defective set, noise) from a ChaCha8
//! generator seeded with `seed` on stream `r`, so any single trial can be
//! replayed on its own and the tally does not depend on trial order.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decode::{decode_exhaustive_with, model_observation, DecodeOptions};
use crate::error::{domain, Error, Result};
use crate::info::{ModelKind, TestModel};
use crate::ternary::{apply_noise, apply_or_noise, BinaryWord, CodeMatrix, SubjectSet, TernaryWord};

#[derive(Clone, Debug, PartialEq)]
pub enum Design {
    /// Fresh i.i.d. Bernoulli(`p`) design for every trial.
    RandomBernoulli { p: f64 },
    Fixed(CodeMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    /// Number of subjects `N`.
    pub subjects: usize,
    /// Defectives per trial.
    pub m: usize,
    /// Number of tests.
    pub tests: usize,
    pub model: TestModel,
    pub trials: u64,
    pub seed: u64,
    pub design: Design,
    pub decode: DecodeOptions,
}

impl TrialConfig {
    /// Random Bernoulli design with `p` taken from the model.
    pub fn random(subjects: usize, m: usize, tests: usize, model: TestModel, trials: u64, seed: u64) -> Self {
        Self {
            subjects,
            m,
            tests,
            model,
            trials,
            seed,
            design: Design::RandomBernoulli { p: model.p },
            decode: DecodeOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(domain("need at least one trial"));
        }
        if self.m == 0 || self.m >= self.subjects {
            return Err(domain("need 1 <= m < N"));
        }
        self.model.validate(self.m)?;
        match &self.design {
            Design::RandomBernoulli { p } if *p != self.model.p => {
                Err(domain("random design probability must equal the model's p"))
            }
            Design::Fixed(code) if code.cols() != self.subjects || code.rows() != self.tests => {
                Err(Error::LengthMismatch { expected: self.subjects * self.tests, found: code.cols() * code.rows() })
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRateReport {
    pub config: TrialConfig,
    pub successes: u64,
    pub ambiguities: u64,
    pub wrong_sets: u64,
    /// `(trials - successes) / trials`
    pub error_rate: f64,
}

impl ErrorRateReport {
    /// Binomial standard error of `error_rate`.
    pub fn std_error(&self) -> f64 {
        let t = self.config.trials as f64;
        libm::sqrt(self.error_rate * (1.0 - self.error_rate) / t)
    }
}

/// Generator for trial `r`.
pub fn trial_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

fn random_design<R: Rng + ?Sized>(tests: usize, subjects: usize, p: f64, rng: &mut R) -> Result<CodeMatrix> {
    let columns = (0..subjects)
        .map(|_| BinaryWord::from_bits((0..tests).map(|_| rng.random_bool(p))))
        .collect();
    CodeMatrix::from_columns(columns)
}

/// Noisy observation of `defectives` under the model.
pub fn synthesize<R: Rng + ?Sized>(
    code: &CodeMatrix,
    defectives: &SubjectSet,
    model: &TestModel,
    rng: &mut R,
) -> Result<TernaryWord> {
    let clean = model_observation(code, defectives.indices(), model.kind);
    match (model.q, model.kind) {
        (None, _) => Ok(clean),
        (Some(q), ModelKind::Agt) => apply_or_noise(&clean, q, rng),
        (Some(q), ModelKind::Sgt) => apply_noise(&clean, q, rng),
        (Some(_), ModelKind::Ggt { .. }) => Err(domain("no noise channel defined for two-threshold tests")),
    }
}

enum Outcome {
    Success,
    Ambiguous,
    Wrong,
}

fn run_one(config: &TrialConfig, r: u64) -> Result<Outcome> {
    if config.tests == 0 {
        return Ok(Outcome::Ambiguous);
    }
    let mut rng = trial_rng(config.seed, r);
    let drawn;
    let code = match &config.design {
        Design::RandomBernoulli { p } => {
            drawn = random_design(config.tests, config.subjects, *p, &mut rng)?;
            &drawn
        }
        Design::Fixed(code) => code,
    };
    let defectives = SubjectSet::new(index::sample(&mut rng, config.subjects, config.m))?;
    let y = synthesize(code, &defectives, &config.model, &mut rng)?;
    match decode_exhaustive_with(code, &y, config.m, &config.model, config.decode) {
        Ok(found) if found == defectives => Ok(Outcome::Success),
        Ok(_) => Ok(Outcome::Wrong),
        Err(Error::Ambiguous { .. }) => Ok(Outcome::Ambiguous),
        Err(e) => Err(e),
    }
}

/// Runs every trial and tallies exact recoveries, ambiguous decodes and
/// wrong sets. Ambiguity counts as an error.
pub fn run_trials(config: &TrialConfig) -> Result<ErrorRateReport> {
    config.validate()?;
    let (mut successes, mut ambiguities, mut wrong_sets) = (0, 0, 0);
    for r in 0..config.trials {
        match run_one(config, r)? {
            Outcome::Success => successes += 1,
            Outcome::Ambiguous => ambiguities += 1,
            Outcome::Wrong => wrong_sets += 1,
        }
    }
    Ok(ErrorRateReport {
        config: config.clone(),
        successes,
        ambiguities,
        wrong_sets,
        error_rate: (config.trials - successes) as f64 / config.trials as f64,
    })
}
