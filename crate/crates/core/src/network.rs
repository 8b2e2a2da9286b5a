//! The feedforward network: random input weights into a bank of synaptic
//! kernels, a compressive nonlinearity, a linear output layer, and event
//! thresholding.
//!
//! Per timestep `t` and hidden unit `j`:
//!
//! ```text
//! u_j = Σ_i  w1[j,i] · x[i,t]            (event channels)
//! s_j = kernel_j.step(u_j)
//! v_j = s_j + Σ_c w1[j,c] · cont[c,t]    (continuous channels, post-filter)
//! a_j = nonlinearity(v_j)
//! y   = W² · a
//! z_n = Boolean(y_n > θ_n)
//! ```
//!
//! Continuous-valued channels share columns of `w1` and are injected after
//! the filter but before the nonlinearity, so a network with no event
//! channels degenerates to a conventional random-hidden-layer regression
//! network.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkimError};
use crate::events::{ContinuousSignal, EventStream};
use crate::kernels::{KernelFamily, KernelSpec, KernelState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    Tanh,
    Logistic,
}

impl Nonlinearity {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Tanh => x.tanh(),
            Nonlinearity::Logistic => 1.0 / (1.0 + (-x).exp()),
        }
    }
}

/// Weighted mix of kernel families used when drawing a random hidden layer.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyMix(Vec<(KernelFamily, f64)>);

impl FamilyMix {
    pub fn new(entries: Vec<(KernelFamily, f64)>) -> Result<FamilyMix> {
        if entries.is_empty() {
            return Err(SkimError::parameter("families", "must not be empty"));
        }
        for &(f, w) in &entries {
            if !w.is_finite() || w <= 0.0 {
                return Err(SkimError::parameter(
                    "families",
                    format!("weight {w} for {} must be finite and > 0", f.name()),
                ));
            }
        }
        Ok(FamilyMix(entries))
    }

    pub fn single(family: KernelFamily) -> FamilyMix {
        FamilyMix(vec![(family, 1.0)])
    }

    pub fn entries(&self) -> &[(KernelFamily, f64)] {
        &self.0
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> KernelFamily {
        let total: f64 = self.0.iter().map(|&(_, w)| w).sum();
        let mut x = rng.random::<f64>() * total;
        for &(f, w) in &self.0 {
            if x < w {
                return f;
            }
            x -= w;
        }
        self.0.last().unwrap().0
    }
}

/// Uniform sampling ranges for kernel parameters, in timesteps (`omega` in
/// radians/timestep). A zero-width range pins the parameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRanges {
    pub tau: (f64, f64),
    pub delta_t: (f64, f64),
    pub sigma: (f64, f64),
    pub omega: (f64, f64),
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            tau: (5.0, 50.0),
            delta_t: (0.0, 100.0),
            sigma: (1.0, 10.0),
            // oscillation periods between 10 and 100 steps
            omega: (std::f64::consts::TAU / 100.0, std::f64::consts::TAU / 10.0),
        }
    }
}

impl ParamRanges {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("tau", self.tau),
            ("delta_t", self.delta_t),
            ("sigma", self.sigma),
            ("omega", self.omega),
        ] {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(SkimError::parameter(
                    "param_ranges",
                    format!("range for {name} must be finite with min <= max, got ({lo}, {hi})"),
                ));
            }
        }
        Ok(())
    }
}

fn draw_in(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + rng.random::<f64>() * (hi - lo)
}

/// Input weights, kernel bank, and nonlinearity of the hidden layer.
///
/// `w1` is `M × L`; the first `n_event_inputs` columns weight event
/// channels, the remainder weight continuous channels. Immutable and
/// shareable once built.
#[derive(Debug, Clone)]
pub struct HiddenLayer {
    n_event_inputs: usize,
    w1: Array2<f64>,
    kernel_bank: Vec<KernelSpec>,
    nonlinearity: Nonlinearity,
}

impl HiddenLayer {
    pub fn new(
        n_event_inputs: usize,
        w1: Array2<f64>,
        kernel_bank: Vec<KernelSpec>,
        nonlinearity: Nonlinearity,
    ) -> Result<HiddenLayer> {
        let (m, l) = w1.dim();
        if m == 0 || l == 0 {
            return Err(SkimError::parameter("w1", "must have at least one row and column"));
        }
        if n_event_inputs > l {
            return Err(SkimError::shape(format!(
                "n_event_inputs {n_event_inputs} exceeds input count {l}"
            )));
        }
        if !w1.iter().all(|v| v.is_finite()) {
            return Err(SkimError::NonFinite("w1".into()));
        }
        if w1.outer_iter().any(|row| row.iter().all(|&v| v == 0.0)) {
            return Err(SkimError::parameter(
                "w1",
                "every hidden unit needs at least one nonzero input weight",
            ));
        }
        if kernel_bank.len() != m {
            return Err(SkimError::shape(format!(
                "kernel bank has {} entries for {m} hidden units",
                kernel_bank.len()
            )));
        }
        Ok(HiddenLayer {
            n_event_inputs,
            w1,
            kernel_bank,
            nonlinearity,
        })
    }

    /// Draws `w1` i.i.d. uniform in `[-1, 1]` and a kernel per hidden unit
    /// with its family taken from `families` and parameters uniform in
    /// `ranges`. Deterministic for a given seed.
    pub fn init_random(
        n_inputs: usize,
        n_event_inputs: usize,
        n_hidden: usize,
        families: &FamilyMix,
        ranges: &ParamRanges,
        nonlinearity: Nonlinearity,
        seed: u64,
    ) -> Result<HiddenLayer> {
        if n_hidden == 0 {
            return Err(SkimError::parameter("n_hidden", "must be >= 1"));
        }
        ranges.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = Array2::from_shape_fn((n_hidden, n_inputs), |_| rng.random_range(-1.0..1.0));
        let mut kernel_bank = Vec::with_capacity(n_hidden);
        for _ in 0..n_hidden {
            let spec = match families.draw(&mut rng) {
                KernelFamily::LeakyIntegrator => {
                    KernelSpec::leaky_integrator(draw_in(&mut rng, ranges.tau))?
                }
                KernelFamily::Alpha => KernelSpec::alpha(draw_in(&mut rng, ranges.tau))?,
                KernelFamily::DampedResonant => {
                    let tau = draw_in(&mut rng, ranges.tau);
                    let omega = draw_in(&mut rng, ranges.omega);
                    KernelSpec::damped_resonant(tau, omega)?
                }
                KernelFamily::DelayedAlpha => {
                    let tau = draw_in(&mut rng, ranges.tau);
                    let delta_t = draw_in(&mut rng, ranges.delta_t);
                    KernelSpec::delayed_alpha(tau, delta_t)?
                }
                KernelFamily::DelayedGaussian => {
                    let delta_t = draw_in(&mut rng, ranges.delta_t);
                    let sigma = draw_in(&mut rng, ranges.sigma);
                    KernelSpec::delayed_gaussian(delta_t, sigma)?
                }
            };
            kernel_bank.push(spec);
        }
        HiddenLayer::new(n_event_inputs, w1, kernel_bank, nonlinearity)
    }

    pub fn n_inputs(&self) -> usize {
        self.w1.ncols()
    }

    pub fn n_event_inputs(&self) -> usize {
        self.n_event_inputs
    }

    pub fn n_continuous_inputs(&self) -> usize {
        self.w1.ncols() - self.n_event_inputs
    }

    pub fn n_hidden(&self) -> usize {
        self.w1.nrows()
    }

    pub fn w1(&self) -> &Array2<f64> {
        &self.w1
    }

    pub fn kernel_bank(&self) -> &[KernelSpec] {
        &self.kernel_bank
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }
}

/// Streaming evaluator of the hidden layer: owns one kernel state per unit
/// and produces one hidden-output column per call. Kernel states start at
/// zero (quiet network).
pub struct HiddenRunner<'a> {
    hidden: &'a HiddenLayer,
    states: Vec<KernelState>,
    drive: Vec<f64>,
}

impl<'a> HiddenRunner<'a> {
    pub fn new(hidden: &'a HiddenLayer) -> HiddenRunner<'a> {
        HiddenRunner {
            hidden,
            states: hidden.kernel_bank.iter().map(KernelState::new).collect(),
            drive: vec![0.0; hidden.n_hidden()],
        }
    }

    /// One timestep: `active_event_channels` are the event channels firing
    /// now, `continuous` the continuous-channel values now (required iff the
    /// layer has continuous inputs).
    pub fn step(
        &mut self,
        active_event_channels: &[usize],
        continuous: Option<ArrayView1<f64>>,
    ) -> Result<Array1<f64>> {
        let hidden = self.hidden;
        let m = hidden.n_hidden();
        let n_cont = hidden.n_continuous_inputs();
        match continuous {
            Some(c) if c.len() != n_cont => {
                return Err(SkimError::shape(format!(
                    "expected {n_cont} continuous values, got {}",
                    c.len()
                )))
            }
            None if n_cont > 0 => {
                return Err(SkimError::shape(format!(
                    "layer has {n_cont} continuous channels but no continuous input was given"
                )))
            }
            _ => {}
        }

        self.drive.fill(0.0);
        for &c in active_event_channels {
            if c >= hidden.n_event_inputs {
                return Err(SkimError::shape(format!(
                    "event channel {c} outside {} event inputs",
                    hidden.n_event_inputs
                )));
            }
            for (d, &w) in self.drive.iter_mut().zip(hidden.w1.column(c)) {
                *d += w;
            }
        }

        let mut out = Array1::zeros(m);
        for j in 0..m {
            let mut v = self.states[j].step(self.drive[j])?;
            if let Some(cont) = continuous {
                for (c, &x) in cont.iter().enumerate() {
                    v += hidden.w1[(j, hidden.n_event_inputs + c)] * x;
                }
            }
            out[j] = hidden.nonlinearity.apply(v);
        }
        Ok(out)
    }

    /// Returns all kernel states to zero.
    pub fn reset(&mut self) {
        for s in &mut self.states {
            s.reset();
        }
    }
}

/// Walks a sorted event list timestep by timestep.
pub(crate) struct EventCursor<'a> {
    events: &'a [(usize, usize)],
    pos: usize,
}

impl<'a> EventCursor<'a> {
    pub(crate) fn new(stream: &'a EventStream) -> Self {
        EventCursor {
            events: stream.events(),
            pos: 0,
        }
    }

    /// Channels active at timestep `t`. Must be called with strictly
    /// increasing `t`.
    pub(crate) fn active_at(&mut self, t: usize, buf: &mut Vec<usize>) {
        buf.clear();
        while self.pos < self.events.len() && self.events[self.pos].0 == t {
            buf.push(self.events[self.pos].1);
            self.pos += 1;
        }
    }
}

fn check_input_shapes(
    hidden: &HiddenLayer,
    events: &EventStream,
    continuous: Option<&ContinuousSignal>,
) -> Result<usize> {
    if events.n_channels() != hidden.n_event_inputs() {
        return Err(SkimError::shape(format!(
            "event stream has {} channels, layer expects {}",
            events.n_channels(),
            hidden.n_event_inputs()
        )));
    }
    let n_cont = hidden.n_continuous_inputs();
    match continuous {
        Some(c) => {
            if c.n_channels() != n_cont {
                return Err(SkimError::shape(format!(
                    "continuous signal has {} channels, layer expects {n_cont}",
                    c.n_channels()
                )));
            }
            if c.n_steps() != events.n_steps() {
                return Err(SkimError::shape(format!(
                    "continuous signal has {} steps, events have {}",
                    c.n_steps(),
                    events.n_steps()
                )));
            }
        }
        None => {
            if n_cont > 0 {
                return Err(SkimError::shape(format!(
                    "layer has {n_cont} continuous channels but no continuous signal was given"
                )));
            }
        }
    }
    Ok(events.n_steps())
}

/// A complete trained network: hidden layer, output weights, and per-output
/// event thresholds.
#[derive(Debug, Clone)]
pub struct SkimModel {
    hidden: HiddenLayer,
    w2: Array2<f64>,
    theta: Array1<f64>,
}

/// Forward-pass record: nonlinear hidden outputs (`M × T`), linear outputs
/// (`N × T`), and the thresholded event stream.
///
/// Holds the full hidden-output matrix; for long sequences where that
/// matters, use [`SkimModel::forward_outputs`].
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub hidden_out: Array2<f64>,
    pub y: Array2<f64>,
    pub z: EventStream,
}

impl SkimModel {
    pub fn new(hidden: HiddenLayer, w2: Array2<f64>, theta: Array1<f64>) -> Result<SkimModel> {
        if w2.ncols() != hidden.n_hidden() {
            return Err(SkimError::shape(format!(
                "w2 has {} columns for {} hidden units",
                w2.ncols(),
                hidden.n_hidden()
            )));
        }
        if theta.len() != w2.nrows() {
            return Err(SkimError::shape(format!(
                "theta has {} entries for {} outputs",
                theta.len(),
                w2.nrows()
            )));
        }
        if !w2.iter().all(|v| v.is_finite()) || !theta.iter().all(|v| v.is_finite()) {
            return Err(SkimError::NonFinite("output weights or thresholds".into()));
        }
        Ok(SkimModel { hidden, w2, theta })
    }

    pub fn hidden(&self) -> &HiddenLayer {
        &self.hidden
    }

    pub fn w2(&self) -> &Array2<f64> {
        &self.w2
    }

    pub fn theta(&self) -> &Array1<f64> {
        &self.theta
    }

    pub fn n_outputs(&self) -> usize {
        self.w2.nrows()
    }

    /// Full forward pass from fresh kernel states, retaining the hidden
    /// output matrix.
    pub fn forward(
        &self,
        events: &EventStream,
        continuous: Option<&ContinuousSignal>,
    ) -> Result<ForwardTrace> {
        let t_len = check_input_shapes(&self.hidden, events, continuous)?;
        let m = self.hidden.n_hidden();
        let mut hidden_out = Array2::zeros((m, t_len));
        let mut runner = HiddenRunner::new(&self.hidden);
        let mut cursor = EventCursor::new(events);
        let mut active = Vec::new();
        for t in 0..t_len {
            cursor.active_at(t, &mut active);
            let col = runner.step(&active, continuous.map(|c| c.values().column(t)))?;
            hidden_out.column_mut(t).assign(&col);
        }
        let y = self.w2.dot(&hidden_out);
        let z = threshold_events(y.view(), self.theta.view())?;
        Ok(ForwardTrace { hidden_out, y, z })
    }

    /// Forward pass that streams over timesteps without retaining the
    /// hidden-output matrix; returns the linear outputs and the thresholded
    /// events.
    pub fn forward_outputs(
        &self,
        events: &EventStream,
        continuous: Option<&ContinuousSignal>,
    ) -> Result<(Array2<f64>, EventStream)> {
        let t_len = check_input_shapes(&self.hidden, events, continuous)?;
        let mut y = Array2::zeros((self.w2.nrows(), t_len));
        let mut runner = HiddenRunner::new(&self.hidden);
        let mut cursor = EventCursor::new(events);
        let mut active = Vec::new();
        for t in 0..t_len {
            cursor.active_at(t, &mut active);
            let col = runner.step(&active, continuous.map(|c| c.values().column(t)))?;
            y.column_mut(t).assign(&self.w2.dot(&col));
        }
        let z = threshold_events(y.view(), self.theta.view())?;
        Ok((y, z))
    }
}

/// One event at `(t, n)` for every `y[n, t] > theta[n]` (strict).
pub fn threshold_events(y: ArrayView2<f64>, theta: ArrayView1<f64>) -> Result<EventStream> {
    let (n, t_len) = y.dim();
    if theta.len() != n {
        return Err(SkimError::shape(format!(
            "theta has {} entries for {n} output rows",
            theta.len()
        )));
    }
    if t_len == 0 {
        return Err(SkimError::parameter("y", "must have at least one timestep"));
    }
    let mut events = Vec::new();
    for t in 0..t_len {
        for ch in 0..n {
            if y[(ch, t)] > theta[ch] {
                events.push((t, ch));
            }
        }
    }
    EventStream::new(n, t_len, events)
}
