//! The attentional-switching word-detection experiment.
//!
//! Two fixed spatio-temporal "words" are stamped at random non-overlapping
//! positions into a multichannel event timeline, Poisson noise is mixed in,
//! and a square-wave attention signal (±1 on one continuous channel)
//! selects which word currently counts: with positive attention word A must
//! be detected, with negative attention word B. The composite target is a
//! single event channel marking the final timestep of each attended word.
//!
//! [`run_experiment`] builds a training and a test scenario (same words,
//! different placement/noise seeds), trains a network on the composite
//! target, and scores the test output by regime-split cross-correlation and
//! window-level hit/false-alarm rates.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{score_attention_confusion, xcorr, XcorrCurve};
use crate::error::{Result, SkimError};
use crate::events::{poisson_generate, ContinuousSignal, EventStream};
use crate::kernels::KernelFamily;
use crate::network::{FamilyMix, HiddenLayer, Nonlinearity, ParamRanges, SkimModel};
use crate::solver::default_eps;
use crate::trainer::{train, TargetSpec, TrainReport};

/// One spatio-temporal pattern: events at `(t_offset, channel)` within a
/// fixed duration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordPattern {
    n_channels: usize,
    duration: usize,
    events: Vec<(usize, usize)>,
}

impl WordPattern {
    pub fn new(n_channels: usize, duration: usize, mut events: Vec<(usize, usize)>) -> Result<Self> {
        if n_channels == 0 || duration == 0 {
            return Err(SkimError::parameter(
                "word",
                "needs at least one channel and one timestep",
            ));
        }
        if events.is_empty() {
            return Err(SkimError::parameter("word", "needs at least one event"));
        }
        for &(t, c) in &events {
            if t >= duration || c >= n_channels {
                return Err(SkimError::parameter(
                    "word",
                    format!("event ({t}, {c}) outside {n_channels} channels x {duration} steps"),
                ));
            }
        }
        events.sort_unstable();
        events.dedup();
        Ok(WordPattern {
            n_channels,
            duration,
            events,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn duration(&self) -> usize {
        self.duration
    }

    pub fn events(&self) -> &[(usize, usize)] {
        &self.events
    }

    /// The pattern as a dense channels × duration 0/1 matrix.
    pub fn raster(&self) -> ndarray::Array2<f64> {
        let mut m = ndarray::Array2::zeros((self.n_channels, self.duration));
        for &(t, c) in &self.events {
            m[(c, t)] = 1.0;
        }
        m
    }
}

/// Draws `n_events` distinct cells uniformly at random.
pub fn random_word(
    n_channels: usize,
    duration: usize,
    n_events: usize,
    seed: u64,
) -> Result<WordPattern> {
    let cells = n_channels
        .checked_mul(duration)
        .ok_or_else(|| SkimError::parameter("duration", "grid too large"))?;
    if n_events == 0 || n_events > cells {
        return Err(SkimError::parameter(
            "n_events",
            format!("{n_events} events do not fit {n_channels} x {duration} cells"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, cells, n_events);
    let events = picks
        .into_iter()
        .map(|cell| (cell / n_channels, cell % n_channels))
        .collect();
    WordPattern::new(n_channels, duration, events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordId {
    A,
    B,
}

/// Experiment generator settings.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub n_event_channels: usize,
    pub word_a: WordPattern,
    pub word_b: WordPattern,
    /// Mean word instances per 1000 timesteps.
    pub word_rate: f64,
    /// Timesteps between attention sign flips.
    pub attention_period: usize,
    /// Poisson noise rate per channel per timestep.
    pub noise_rate: f64,
    pub n_steps: usize,
    /// Target pulse width for training and scoring.
    pub target_widen: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_event_channels == 0 {
            return Err(SkimError::parameter("n_event_channels", "must be >= 1"));
        }
        for (name, word) in [("word_a", &self.word_a), ("word_b", &self.word_b)] {
            if word.n_channels() != self.n_event_channels {
                return Err(SkimError::parameter(
                    "word",
                    format!(
                        "{name} has {} channels, scenario has {}",
                        word.n_channels(),
                        self.n_event_channels
                    ),
                ));
            }
            if word.duration() > self.n_steps {
                return Err(SkimError::parameter(
                    "n_steps",
                    format!("{name} does not fit in {} steps", self.n_steps),
                ));
            }
        }
        if !(self.word_rate.is_finite() && self.word_rate >= 0.0) {
            return Err(SkimError::parameter(
                "word_rate",
                format!("{} must be finite and >= 0", self.word_rate),
            ));
        }
        if self.attention_period == 0 {
            return Err(SkimError::parameter("attention_period", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(SkimError::parameter(
                "noise_rate",
                format!("{} outside [0, 1]", self.noise_rate),
            ));
        }
        if self.n_steps == 0 {
            return Err(SkimError::parameter("n_steps", "must be >= 1"));
        }
        if self.target_widen == 0 || self.target_widen > self.n_steps {
            return Err(SkimError::parameter(
                "target_widen",
                format!("{} outside [1, n_steps]", self.target_widen),
            ));
        }
        Ok(())
    }
}

/// One placed word occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordInstance {
    pub start: usize,
    pub word: WordId,
}

/// A generated experiment timeline.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Word events plus Poisson noise on the event channels.
    pub inputs: EventStream,
    /// ±1 square wave on one channel.
    pub attention: ContinuousSignal,
    /// Per-word target events (channel 0 = word A, channel 1 = word B), one
    /// at each word's final timestep, attention-agnostic.
    pub targets: EventStream,
    /// Single-channel target keeping only the attended words.
    pub composite_target: EventStream,
    pub word_log: Vec<WordInstance>,
}

fn attention_wave(n_steps: usize, period: usize) -> Result<ContinuousSignal> {
    let values = ndarray::Array2::from_shape_fn((1, n_steps), |(_, t)| {
        if (t / period) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    ContinuousSignal::new(values)
}

/// Generates a full scenario from the config. Deterministic per seed.
///
/// Word instances (A or B with equal probability) are placed at
/// non-overlapping uniform-random starts until the configured count
/// `round(word_rate · n_steps / 1000)` is reached; an over-dense config that
/// cannot be placed is an error.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let n = config.n_steps;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise_seed = rng.random::<u64>();

    let count = (config.word_rate * n as f64 / 1000.0).round() as usize;
    let max_duration = config.word_a.duration().max(config.word_b.duration());
    if count * max_duration > n {
        return Err(SkimError::parameter(
            "word_rate",
            format!(
                "{count} words of up to {max_duration} steps cannot fit in {n} steps"
            ),
        ));
    }

    let mut placed: Vec<(usize, usize)> = Vec::with_capacity(count);
    let mut word_log = Vec::with_capacity(count);
    for _ in 0..count {
        let word_id = if rng.random::<f64>() < 0.5 {
            WordId::A
        } else {
            WordId::B
        };
        let duration = match word_id {
            WordId::A => config.word_a.duration(),
            WordId::B => config.word_b.duration(),
        };
        let mut start = None;
        for _ in 0..5000 {
            let s = rng.random_range(0..=n - duration);
            if placed.iter().all(|&(ps, pe)| s + duration <= ps || s >= pe) {
                start = Some(s);
                break;
            }
        }
        let start = start.ok_or_else(|| {
            SkimError::parameter(
                "word_rate",
                format!("timeline too dense to place {count} non-overlapping words"),
            )
        })?;
        placed.push((start, start + duration));
        word_log.push(WordInstance {
            start,
            word: word_id,
        });
    }
    word_log.sort_by_key(|w| w.start);

    let attention = attention_wave(n, config.attention_period)?;

    let mut word_events = Vec::new();
    let mut target_events = Vec::new();
    let mut composite_events = Vec::new();
    for inst in &word_log {
        let word = match inst.word {
            WordId::A => &config.word_a,
            WordId::B => &config.word_b,
        };
        for &(off, ch) in word.events() {
            word_events.push((inst.start + off, ch));
        }
        let t_end = inst.start + word.duration() - 1;
        let target_channel = match inst.word {
            WordId::A => 0,
            WordId::B => 1,
        };
        target_events.push((t_end, target_channel));
        let attended = match inst.word {
            WordId::A => attention.value(0, t_end) > 0.0,
            WordId::B => attention.value(0, t_end) < 0.0,
        };
        if attended {
            composite_events.push((t_end, 0));
        }
    }

    let stamped = EventStream::new(config.n_event_channels, n, word_events)?;
    let noise = poisson_generate(config.n_event_channels, n, config.noise_rate, noise_seed)?;
    let inputs = stamped.merge(&noise)?;
    let targets = EventStream::new(2, n, target_events)?;
    let composite_target = EventStream::new(1, n, composite_events)?;

    Ok(Scenario {
        inputs,
        attention,
        targets,
        composite_target,
        word_log,
    })
}

/// Network and training settings for [`run_experiment`].
#[derive(Debug, Clone, Serialize)]
pub struct ModelParams {
    pub n_hidden: usize,
    pub families: FamilyMix,
    pub ranges: ParamRanges,
    pub nonlinearity: Nonlinearity,
    /// Ridge regularizer; `None` = `1e-6 · n_hidden`.
    pub eps: Option<f64>,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n_hidden: 250,
            families: FamilyMix::single(KernelFamily::DelayedGaussian),
            ranges: ParamRanges::default(),
            nonlinearity: Nonlinearity::Tanh,
            eps: None,
            seed: 1,
        }
    }
}

/// Event bookkeeping for one scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioCounts {
    pub words: usize,
    pub word_events: usize,
    pub input_events: usize,
    /// `(input_events − word_events) / input_events`.
    pub noise_fraction: f64,
    pub composite_targets: usize,
}

fn count_scenario(scenario: &Scenario, config: &ScenarioConfig) -> ScenarioCounts {
    let word_events: usize = scenario
        .word_log
        .iter()
        .map(|inst| match inst.word {
            WordId::A => config.word_a.events().len(),
            WordId::B => config.word_b.events().len(),
        })
        .sum();
    let input_events = scenario.inputs.len();
    ScenarioCounts {
        words: scenario.word_log.len(),
        word_events,
        input_events,
        noise_fraction: if input_events > 0 {
            (input_events - word_events.min(input_events)) as f64 / input_events as f64
        } else {
            0.0
        },
        composite_targets: scenario.composite_target.len(),
    }
}

/// Window-level detection rates on the test scenario.
#[derive(Debug, Clone, Serialize)]
pub struct HitReport {
    /// Hit rate over attended word-A instances (the positive regime).
    pub hit_rate_word_a: Option<f64>,
    /// Hit rate over attended word-B instances (the negative regime).
    pub hit_rate_word_b: Option<f64>,
    /// Spurious-response rate over unattended word-B instances in the
    /// positive regime.
    pub unattended_hit_rate_pos: Option<f64>,
    /// Spurious-response rate over unattended word-A instances in the
    /// negative regime.
    pub unattended_hit_rate_neg: Option<f64>,
    /// Output events outside every attended target window.
    pub false_alarms: usize,
    pub false_alarm_rate_per_1000: f64,
    pub output_events: usize,
}

/// Zero-lag values and full curves of the four pairings plus the two
/// self-correlation references.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub zero_lag_correct_a: f64,
    pub zero_lag_correct_b: f64,
    pub zero_lag_incorrect_b_pos: f64,
    pub zero_lag_incorrect_a_neg: f64,
    /// Smallest correct zero-lag over largest incorrect zero-lag, with +1
    /// smoothing on both sides.
    pub summary: f64,
    pub min_correct_to_max_incorrect: f64,
    pub constant_attention: bool,
    pub l_max: usize,
    pub correct_a_pos: Vec<f64>,
    pub correct_b_neg: Vec<f64>,
    pub incorrect_b_pos: Vec<f64>,
    pub incorrect_a_neg: Vec<f64>,
    /// Autocorrelation of the attended word-A target (ideal response).
    pub reference_a: Vec<f64>,
    /// Autocorrelation of the attended word-B target (ideal response).
    pub reference_b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunTiming {
    pub train_seconds: f64,
    pub eval_seconds: f64,
    pub total_seconds: f64,
}

/// Everything [`run_experiment`] measures. Serializes deterministically for
/// fixed seeds; wall-clock timing is kept out of the serialized form.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ScenarioConfig,
    pub model_params: ModelParams,
    pub eps: f64,
    pub test_seed: u64,
    pub train: TrainReport,
    pub train_counts: ScenarioCounts,
    pub test_counts: ScenarioCounts,
    pub score: ScoreReport,
    pub hits: HitReport,
    #[serde(skip)]
    pub timing: RunTiming,
}

/// A finished experiment: the report plus the trained model (for follow-up
/// analyses such as receptive-field estimation).
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub model: SkimModel,
}

fn rate(hits: usize, total: usize) -> Option<f64> {
    if total == 0 {
        None
    } else {
        Some(hits as f64 / total as f64)
    }
}

/// Trains on one scenario and evaluates on a fresh one (same words, seed+1).
pub fn run_experiment(config: &ScenarioConfig, params: &ModelParams) -> Result<ExperimentRun> {
    let t_start = Instant::now();
    let train_scenario = build_scenario(config)?;
    let test_seed = config.seed.wrapping_add(1);
    let test_config = ScenarioConfig {
        seed: test_seed,
        ..config.clone()
    };
    let test_scenario = build_scenario(&test_config)?;

    let n_inputs = config.n_event_channels + 1;
    let hidden = HiddenLayer::init_random(
        n_inputs,
        config.n_event_channels,
        params.n_hidden,
        &params.families,
        &params.ranges,
        params.nonlinearity,
        params.seed,
    )?;
    let eps = params.eps.unwrap_or_else(|| default_eps(params.n_hidden));
    let target_spec = TargetSpec::new(
        train_scenario.composite_target.clone(),
        config.target_widen,
        1.0,
    )?;
    let (model, train_report) = train(
        hidden,
        &train_scenario.inputs,
        Some(&train_scenario.attention),
        &target_spec,
        eps,
    )?;
    let train_seconds = t_start.elapsed().as_secs_f64();

    let t_eval = Instant::now();
    let (_, z) = model.forward_outputs(&test_scenario.inputs, Some(&test_scenario.attention))?;

    let widen = config.target_widen;
    let n = config.n_steps;
    let per_word_targets =
        TargetSpec::new(test_scenario.targets.clone(), widen, 1.0)?.widen_targets(n)?;
    let target_a: Vec<f64> = per_word_targets.row(0).to_vec();
    let target_b: Vec<f64> = per_word_targets.row(1).to_vec();
    let z_dense = z.channel_dense(0);
    let l_max = 100.max(2 * widen);

    let score = score_attention_confusion(
        &target_a,
        &target_b,
        &z_dense,
        &test_scenario.attention,
        l_max,
    )?;

    // regime-masked self-correlations as the "perfect response" references
    let mask = |row: &[f64], positive: bool| -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(t, &v)| {
                let a = test_scenario.attention.value(0, t);
                if (positive && a > 0.0) || (!positive && a < 0.0) {
                    v
                } else {
                    0.0
                }
            })
            .collect()
    };
    let a_pos = mask(&target_a, true);
    let b_neg = mask(&target_b, false);
    let reference_a = xcorr(&a_pos, &a_pos, l_max)?;
    let reference_b = xcorr(&b_neg, &b_neg, l_max)?;

    // window-level hits and false alarms
    let mut attended_windows: Vec<(usize, usize)> = Vec::new();
    let mut hits_a = (0usize, 0usize); // (hits, instances), attended A
    let mut hits_b = (0usize, 0usize);
    let mut spurious_pos = (0usize, 0usize); // unattended B in positive regime
    let mut spurious_neg = (0usize, 0usize);
    let window_has_event = |s: usize, e: usize| z.events().iter().any(|&(t, _)| t >= s && t < e);
    for inst in &test_scenario.word_log {
        let word = match inst.word {
            WordId::A => &config.word_a,
            WordId::B => &config.word_b,
        };
        let t_end = inst.start + word.duration() - 1;
        let window = (t_end, (t_end + widen).min(n));
        let positive_regime = test_scenario.attention.value(0, t_end) > 0.0;
        let hit = window_has_event(window.0, window.1);
        match (inst.word, positive_regime) {
            (WordId::A, true) => {
                attended_windows.push(window);
                hits_a.1 += 1;
                hits_a.0 += hit as usize;
            }
            (WordId::B, false) => {
                attended_windows.push(window);
                hits_b.1 += 1;
                hits_b.0 += hit as usize;
            }
            (WordId::B, true) => {
                spurious_pos.1 += 1;
                spurious_pos.0 += hit as usize;
            }
            (WordId::A, false) => {
                spurious_neg.1 += 1;
                spurious_neg.0 += hit as usize;
            }
        }
    }
    let false_alarms = z
        .events()
        .iter()
        .filter(|&&(t, _)| !attended_windows.iter().any(|&(s, e)| t >= s && t < e))
        .count();

    let zero_correct_a = score.correct_a_pos.zero_lag();
    let zero_correct_b = score.correct_b_neg.zero_lag();
    let zero_incorrect_bp = score.incorrect_b_pos.zero_lag();
    let zero_incorrect_an = score.incorrect_a_neg.zero_lag();
    let max_incorrect = zero_incorrect_bp.max(zero_incorrect_an);
    let min_correct = zero_correct_a.min(zero_correct_b);
    let raw_ratio = if max_incorrect > 0.0 {
        min_correct / max_incorrect
    } else if min_correct > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };

    let values = |c: &XcorrCurve| c.values.clone();
    let score_report = ScoreReport {
        zero_lag_correct_a: zero_correct_a,
        zero_lag_correct_b: zero_correct_b,
        zero_lag_incorrect_b_pos: zero_incorrect_bp,
        zero_lag_incorrect_a_neg: zero_incorrect_an,
        summary: score.summary,
        min_correct_to_max_incorrect: raw_ratio,
        constant_attention: score.constant_attention,
        l_max,
        correct_a_pos: values(&score.correct_a_pos),
        correct_b_neg: values(&score.correct_b_neg),
        incorrect_b_pos: values(&score.incorrect_b_pos),
        incorrect_a_neg: values(&score.incorrect_a_neg),
        reference_a: reference_a.values,
        reference_b: reference_b.values,
    };
    let hits = HitReport {
        hit_rate_word_a: rate(hits_a.0, hits_a.1),
        hit_rate_word_b: rate(hits_b.0, hits_b.1),
        unattended_hit_rate_pos: rate(spurious_pos.0, spurious_pos.1),
        unattended_hit_rate_neg: rate(spurious_neg.0, spurious_neg.1),
        false_alarms,
        false_alarm_rate_per_1000: false_alarms as f64 * 1000.0 / n as f64,
        output_events: z.len(),
    };
    let eval_seconds = t_eval.elapsed().as_secs_f64();

    let report = ExperimentReport {
        config: config.clone(),
        model_params: params.clone(),
        eps,
        test_seed,
        train: train_report,
        train_counts: count_scenario(&train_scenario, config),
        test_counts: count_scenario(&test_scenario, &test_config),
        score: score_report,
        hits,
        timing: RunTiming {
            train_seconds,
            eval_seconds,
            total_seconds: t_start.elapsed().as_secs_f64(),
        },
    };
    Ok(ExperimentRun { report, model })
}
