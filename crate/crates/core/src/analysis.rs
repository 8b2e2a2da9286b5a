//! Post-hoc analysis: spatio-temporal receptive fields by reverse
//! correlation, and target/output cross-correlation scoring.
//!
//! An STRF answers "what input distribution makes this network fire?": feed
//! Poisson noise, record output events, and average the input around each
//! output event. Baseline subtraction (the channel's mean rate) makes an
//! unselective network produce a near-zero field.

use serde::Serialize;

use crate::error::{Result, SkimError};
use crate::events::{poisson_generate, ContinuousSignal};
use crate::network::SkimModel;

/// Event-triggered input average for one output channel.
///
/// `field[c, l]` is the mean of input channel `c` at `l` steps before an
/// output event, minus the channel's baseline rate. Inputs before the
/// recording start count as silent.
#[derive(Debug, Clone, Serialize)]
pub struct Strf {
    pub n_channels: usize,
    pub n_lags: usize,
    /// channels × lags, lag 0 first.
    pub field: Vec<Vec<f64>>,
    pub n_trigger_events: usize,
    /// Mean input rate per channel.
    pub baseline: Vec<f64>,
}

impl Strf {
    pub fn value(&self, channel: usize, lag: usize) -> f64 {
        self.field[channel][lag]
    }

    /// Lag of the largest field value on `channel`.
    pub fn argmax_lag(&self, channel: usize) -> usize {
        let row = &self.field[channel];
        let mut best = 0;
        for (l, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = l;
            }
        }
        best
    }
}

/// Estimates one [`Strf`] per output channel by driving the model with
/// Poisson noise at `noise_rate` (and, if the model has continuous inputs,
/// a constant attention level) and reverse-correlating its output events
/// with the noise.
///
/// A channel that never fires yields an all-zero field with
/// `n_trigger_events == 0`.
pub fn estimate_strf(
    model: &SkimModel,
    noise_rate: f64,
    n_steps: usize,
    n_lags: usize,
    attention_value: Option<f64>,
    seed: u64,
) -> Result<Vec<Strf>> {
    if !(noise_rate > 0.0 && noise_rate < 1.0) {
        return Err(SkimError::parameter(
            "noise_rate",
            format!("{noise_rate} must lie strictly inside (0, 1)"),
        ));
    }
    if n_lags == 0 {
        return Err(SkimError::parameter("n_lags", "must be >= 1"));
    }
    let n_events = model.hidden().n_event_inputs();
    let n_cont = model.hidden().n_continuous_inputs();
    if attention_value.is_some() && n_cont == 0 {
        return Err(SkimError::parameter(
            "attention_value",
            "model has no continuous channels to drive",
        ));
    }
    let noise = poisson_generate(n_events, n_steps, noise_rate, seed)?;
    let continuous = if n_cont > 0 {
        Some(ContinuousSignal::constant(
            n_cont,
            n_steps,
            attention_value.unwrap_or(0.0),
        )?)
    } else {
        None
    };
    let (_, z) = model.forward_outputs(&noise, continuous.as_ref())?;

    let raster = noise.to_dense();
    let baseline: Vec<f64> = noise
        .channel_counts()
        .iter()
        .map(|&c| c as f64 / n_steps as f64)
        .collect();

    let mut fields = Vec::with_capacity(model.n_outputs());
    for out_ch in 0..model.n_outputs() {
        let triggers: Vec<usize> = z
            .events()
            .iter()
            .filter(|&&(_, c)| c == out_ch)
            .map(|&(t, _)| t)
            .collect();
        let mut field = vec![vec![0.0; n_lags]; n_events];
        if !triggers.is_empty() {
            for &t in &triggers {
                for lag in 0..n_lags.min(t + 1) {
                    let src = t - lag;
                    for (c, row) in field.iter_mut().enumerate() {
                        row[lag] += raster.values()[(c, src)] as f64;
                    }
                }
            }
            let count = triggers.len() as f64;
            for (c, row) in field.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    *v = *v / count - baseline[c];
                }
            }
        }
        fields.push(Strf {
            n_channels: n_events,
            n_lags,
            field,
            n_trigger_events: triggers.len(),
            baseline: baseline.clone(),
        });
    }
    Ok(fields)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    UnitPeakAutocorr,
}

/// Sliding-lag correlation values over `[-l_max, l_max]`.
#[derive(Debug, Clone, Serialize)]
pub struct XcorrCurve {
    pub l_max: usize,
    /// `values[l_max + lag]` = `Σ_t target(t) · output(t + lag)`.
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl XcorrCurve {
    pub fn value_at(&self, lag: isize) -> f64 {
        self.values[(lag + self.l_max as isize) as usize]
    }

    pub fn zero_lag(&self) -> f64 {
        self.value_at(0)
    }

    pub fn lags(&self) -> impl Iterator<Item = isize> + '_ {
        let l = self.l_max as isize;
        -l..=l
    }
}

/// Raw sliding cross-correlation `values[l] = Σ_t target(t) · output(t+l)`
/// over valid `t`.
pub fn xcorr(target: &[f64], output: &[f64], l_max: usize) -> Result<XcorrCurve> {
    if target.len() != output.len() {
        return Err(SkimError::shape(format!(
            "target has {} samples, output has {}",
            target.len(),
            output.len()
        )));
    }
    let t_len = target.len() as isize;
    let l = l_max as isize;
    let mut values = Vec::with_capacity(2 * l_max + 1);
    for lag in -l..=l {
        let mut sum = 0.0;
        let t_start = 0.max(-lag);
        let t_end = t_len.min(t_len - lag);
        for t in t_start..t_end {
            sum += target[t as usize] * output[(t + lag) as usize];
        }
        values.push(sum);
    }
    Ok(XcorrCurve {
        l_max,
        values,
        normalization: Normalization::Raw,
    })
}

/// Cross-correlation scaled so that the target's zero-lag autocorrelation
/// (the "perfect response" peak) equals 1.
pub fn xcorr_normalized(target: &[f64], output: &[f64], l_max: usize) -> Result<XcorrCurve> {
    let mut curve = xcorr(target, output, l_max)?;
    let peak: f64 = target.iter().map(|v| v * v).sum();
    if peak > 0.0 {
        for v in &mut curve.values {
            *v /= peak;
        }
    }
    curve.normalization = Normalization::UnitPeakAutocorr;
    Ok(curve)
}

/// The four attention/word pairings plus a headline ratio.
///
/// Curves correlate the output with each word's target restricted to one
/// attention regime; `summary` is the smaller of the two smoothed ratios
/// `(correct zero-lag + 1) / (max incorrect zero-lag + 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct AttentionScore {
    /// Word-A target in the positive-attention regime (correct pairing).
    pub correct_a_pos: XcorrCurve,
    /// Word-B target in the negative-attention regime (correct pairing).
    pub correct_b_neg: XcorrCurve,
    /// Word-B target in the positive regime (should stay silent).
    pub incorrect_b_pos: XcorrCurve,
    /// Word-A target in the negative regime (should stay silent).
    pub incorrect_a_neg: XcorrCurve,
    pub summary: f64,
    /// Set when the attention signal never changes sign, leaving one
    /// regime empty (its curves are identically zero).
    pub constant_attention: bool,
}

/// Splits the timeline by the sign of the attention signal and correlates
/// the output with each word's target inside each regime.
pub fn score_attention_confusion(
    target_a: &[f64],
    target_b: &[f64],
    output: &[f64],
    attention: &ContinuousSignal,
    l_max: usize,
) -> Result<AttentionScore> {
    let t_len = output.len();
    if target_a.len() != t_len || target_b.len() != t_len {
        return Err(SkimError::shape(format!(
            "targets ({}, {}) and output ({t_len}) must have equal lengths",
            target_a.len(),
            target_b.len()
        )));
    }
    if attention.n_channels() != 1 {
        return Err(SkimError::shape(format!(
            "attention must be a single channel, got {}",
            attention.n_channels()
        )));
    }
    if attention.n_steps() != t_len {
        return Err(SkimError::shape(format!(
            "attention has {} steps, output has {t_len}",
            attention.n_steps()
        )));
    }

    let mask = |row: &[f64], want_positive: bool| -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(t, &v)| {
                let a = attention.value(0, t);
                let in_regime = if want_positive { a > 0.0 } else { a < 0.0 };
                if in_regime {
                    v
                } else {
                    0.0
                }
            })
            .collect()
    };

    let a_pos = mask(target_a, true);
    let a_neg = mask(target_a, false);
    let b_pos = mask(target_b, true);
    let b_neg = mask(target_b, false);

    let has_pos = (0..t_len).any(|t| attention.value(0, t) > 0.0);
    let has_neg = (0..t_len).any(|t| attention.value(0, t) < 0.0);

    let correct_a_pos = xcorr(&a_pos, output, l_max)?;
    let correct_b_neg = xcorr(&b_neg, output, l_max)?;
    let incorrect_b_pos = xcorr(&b_pos, output, l_max)?;
    let incorrect_a_neg = xcorr(&a_neg, output, l_max)?;

    let max_incorrect = incorrect_b_pos
        .zero_lag()
        .max(incorrect_a_neg.zero_lag());
    let ratio = |correct: f64| (correct + 1.0) / (max_incorrect + 1.0);
    let summary = ratio(correct_a_pos.zero_lag()).min(ratio(correct_b_neg.zero_lag()));

    Ok(AttentionScore {
        correct_a_pos,
        correct_b_neg,
        incorrect_b_pos,
        incorrect_a_neg,
        summary,
        constant_attention: !(has_pos && has_neg),
    })
}
