//! Supervised training: target-energy shaping, streaming weight solve, and
//! margin-maximizing threshold selection.
//!
//! Sparse target events carry almost no energy, so each target event is
//! widened into a pulse of `widen` timesteps before regression. The output
//! weights are solved online over one forward pass (the hidden-output
//! matrix never materializes); a second pass computes the trained linear
//! outputs, from which each output's threshold is placed midway between the
//! loudest off-pulse response and the quietest per-pulse peak. When the two
//! overlap, the threshold falls back to a per-pulse F1 sweep.

use ndarray::{Array1, Array2, ArrayView2};
use serde::Serialize;

use crate::error::{Result, SkimError};
use crate::events::{ContinuousSignal, EventStream};
use crate::network::{EventCursor, HiddenLayer, HiddenRunner, SkimModel};
use crate::solver::SolverState;

/// Raw target events plus the pulse shaping applied before regression.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    raw: EventStream,
    widen: usize,
    amplitude: f64,
}

impl TargetSpec {
    pub fn new(raw: EventStream, widen: usize, amplitude: f64) -> Result<TargetSpec> {
        if widen == 0 {
            return Err(SkimError::parameter("widen", "must be >= 1"));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(SkimError::parameter(
                "amplitude",
                format!("{amplitude} must be finite and > 0"),
            ));
        }
        Ok(TargetSpec {
            raw,
            widen,
            amplitude,
        })
    }

    /// Width 10, amplitude 1 (widening, not amplitude, is the knob that
    /// matters).
    pub fn with_defaults(raw: EventStream) -> TargetSpec {
        TargetSpec {
            raw,
            widen: 10,
            amplitude: 1.0,
        }
    }

    pub fn raw(&self) -> &EventStream {
        &self.raw
    }

    pub fn widen(&self) -> usize {
        self.widen
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Dense `N × T` target matrix: each raw event at `t` becomes the value
    /// `amplitude` on `[t, min(t+widen, T))`; overlapping pulses take the
    /// max. Pulses are clipped at the sequence end.
    pub fn widen_targets(&self, n_steps: usize) -> Result<Array2<f64>> {
        if self.raw.n_steps() != n_steps {
            return Err(SkimError::shape(format!(
                "targets span {} steps, sequence has {n_steps}",
                self.raw.n_steps()
            )));
        }
        if self.widen > n_steps {
            return Err(SkimError::parameter(
                "widen",
                format!("pulse width {} exceeds sequence length {n_steps}", self.widen),
            ));
        }
        let mut dense = Array2::zeros((self.raw.n_channels(), n_steps));
        for &(t, c) in self.raw.events() {
            let end = (t + self.widen).min(n_steps);
            for tt in t..end {
                let cell = &mut dense[(c, tt)];
                *cell = f64::max(*cell, self.amplitude);
            }
        }
        Ok(dense)
    }
}

/// Why a fitted threshold on some channel is unreliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdWarning {
    /// The channel has no target pulses; its threshold is set above every
    /// observed output so it never fires.
    NoTargetPulses,
    /// Pulse and off-pulse outputs overlap; the threshold came from the F1
    /// sweep instead of the margin midpoint.
    NonSeparable,
}

/// Training summary: residual, thresholds, and per-output margins.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    /// `‖WA − Y‖_F / ‖Y‖_F` over the training sequence (0 when the target
    /// is identically zero).
    pub train_residual: f64,
    pub theta: Vec<f64>,
    /// Separation `min(per-pulse peak) − max(off-pulse)` per output; `None`
    /// for outputs without pulses.
    pub margin: Vec<Option<f64>>,
    /// `(channel, warning)` pairs for unreliable thresholds.
    pub warnings: Vec<(usize, ThresholdWarning)>,
    pub eps: f64,
    pub columns: usize,
}

/// Contiguous runs of nonzero target values per channel.
fn pulse_windows(row: &[f64]) -> Vec<(usize, usize)> {
    let mut windows = Vec::new();
    let mut start = None;
    for (t, &v) in row.iter().enumerate() {
        match (v > 0.0, start) {
            (true, None) => start = Some(t),
            (false, Some(s)) => {
                windows.push((s, t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        windows.push((s, row.len()));
    }
    windows
}

/// Per-output threshold maximizing the event/non-event margin.
///
/// For each output: `p` = max of `y` outside every pulse window, `q_i` = max
/// of `y` inside pulse `i`. When `min(q) > p` the threshold is the midpoint
/// `(p + min(q))/2`; otherwise it is the value maximizing per-pulse F1 over
/// a 256-point sweep of `[min y, max y]`. A channel with no pulses gets
/// `max y + 1` (never fires) and a warning.
pub fn fit_threshold(
    y: ArrayView2<f64>,
    widened_targets: ArrayView2<f64>,
) -> Result<(Array1<f64>, Vec<Option<f64>>, Vec<(usize, ThresholdWarning)>)> {
    if y.dim() != widened_targets.dim() {
        return Err(SkimError::shape(format!(
            "outputs are {:?}, targets are {:?}",
            y.dim(),
            widened_targets.dim()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SkimError::NonFinite("outputs for threshold fit".into()));
    }
    let (n, t_len) = y.dim();
    let mut theta = Array1::zeros(n);
    let mut margins = Vec::with_capacity(n);
    let mut warnings = Vec::new();

    for ch in 0..n {
        let y_row: Vec<f64> = y.row(ch).to_vec();
        let t_row: Vec<f64> = widened_targets.row(ch).to_vec();
        let windows = pulse_windows(&t_row);
        let y_max = y_row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let y_min = y_row.iter().cloned().fold(f64::INFINITY, f64::min);

        if windows.is_empty() {
            theta[ch] = y_max + 1.0;
            margins.push(None);
            warnings.push((ch, ThresholdWarning::NoTargetPulses));
            continue;
        }

        let in_pulse = {
            let mut mask = vec![false; t_len];
            for &(s, e) in &windows {
                mask[s..e].iter_mut().for_each(|m| *m = true);
            }
            mask
        };
        let off_peak = y_row
            .iter()
            .zip(&in_pulse)
            .filter(|&(_, &inside)| !inside)
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let min_pulse_peak = windows
            .iter()
            .map(|&(s, e)| y_row[s..e].iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min);

        if off_peak.is_finite() && min_pulse_peak > off_peak {
            theta[ch] = 0.5 * (off_peak + min_pulse_peak);
            margins.push(Some(min_pulse_peak - off_peak));
            continue;
        }

        // classes overlap: sweep for the best per-pulse F1
        let mut best_theta = y_min;
        let mut best_f1 = -1.0;
        for step in 0..256 {
            let cand = y_min + (y_max - y_min) * step as f64 / 255.0;
            let mut tp = 0usize;
            for &(s, e) in &windows {
                if y_row[s..e].iter().any(|&v| v > cand) {
                    tp += 1;
                }
            }
            let fp = y_row
                .iter()
                .zip(&in_pulse)
                .filter(|&(&v, &inside)| !inside && v > cand)
                .count();
            let fne = windows.len() - tp;
            let f1 = if tp == 0 {
                0.0
            } else {
                2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fne as f64)
            };
            if f1 >= best_f1 {
                best_f1 = f1;
                best_theta = cand;
            }
        }
        theta[ch] = best_theta;
        margins.push(if off_peak.is_finite() {
            Some(min_pulse_peak - off_peak)
        } else {
            None
        });
        warnings.push((ch, ThresholdWarning::NonSeparable));
    }

    Ok((theta, margins, warnings))
}

/// Trains output weights and thresholds for `hidden` on the given sequence.
///
/// Two streaming passes: the first feeds `(hidden column, target column)`
/// pairs to the online solver, the second computes the trained outputs for
/// the residual and threshold fit. Deterministic given its inputs.
pub fn train(
    hidden: HiddenLayer,
    events: &EventStream,
    continuous: Option<&ContinuousSignal>,
    targets: &TargetSpec,
    eps: f64,
) -> Result<(SkimModel, TrainReport)> {
    let t_len = events.n_steps();
    let n = targets.raw().n_channels();
    let m = hidden.n_hidden();
    let y_target = targets.widen_targets(t_len)?;

    // pass 1: online solve
    let mut solver = SolverState::new(m, n, eps)?;
    {
        let mut runner = HiddenRunner::new(&hidden);
        let mut cursor = EventCursor::new(events);
        let mut active = Vec::new();
        for t in 0..t_len {
            cursor.active_at(t, &mut active);
            let a = runner.step(&active, continuous.map(|c| c.values().column(t)))?;
            solver.update(a.view(), y_target.column(t))?;
        }
    }
    let w2 = solver.into_weights();

    // pass 2: trained outputs for residual and threshold
    let mut y_pred = Array2::zeros((n, t_len));
    {
        let mut runner = HiddenRunner::new(&hidden);
        let mut cursor = EventCursor::new(events);
        let mut active = Vec::new();
        for t in 0..t_len {
            cursor.active_at(t, &mut active);
            let a = runner.step(&active, continuous.map(|c| c.values().column(t)))?;
            y_pred.column_mut(t).assign(&w2.dot(&a));
        }
    }

    let err_sq: f64 = y_pred
        .iter()
        .zip(y_target.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    let target_sq: f64 = y_target.iter().map(|v| v * v).sum();
    let train_residual = if target_sq > 0.0 {
        (err_sq / target_sq).sqrt()
    } else {
        0.0
    };

    let (theta, margin, warnings) = fit_threshold(y_pred.view(), y_target.view())?;
    let report = TrainReport {
        train_residual,
        theta: theta.to_vec(),
        margin,
        warnings,
        eps,
        columns: t_len,
    };
    let model = SkimModel::new(hidden, w2, theta)?;
    Ok((model, report))
}
