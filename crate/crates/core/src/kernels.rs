//! Synaptic kernel families: impulse responses, truncation, and stateful
//! per-timestep filtering.
//!
//! A kernel converts weighted input events into a continuous post-event
//! waveform. Four families are finite-impulse-response (FIR) filters defined
//! by a closed-form impulse response evaluated at integer lags and truncated
//! where the response falls below `1e-6` of its peak; the fifth is a leaky
//! integrator with a state-dependent nonlinear leak (IIR, no closed form).
//!
//! FIR filtering superposes a truncated copy of the impulse response into a
//! ring buffer for each nonzero input, so no event history is kept.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkimError};

/// Relative magnitude below which the tail of an impulse response is cut.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `g ← g·(1 − 1/(τ·(1+g²))) + input`; inherent compressive leak.
    LeakyIntegrator,
    /// `h(t) = (t/τ)·e^(−t/τ)`, peak `1/e` at `t = τ`.
    Alpha,
    /// `h(t) = e^(−t/τ)·sin(ωt)`.
    DampedResonant,
    /// Alpha response shifted by an explicit delay; zero before `ΔT`.
    DelayedAlpha,
    /// Gaussian bump `(1/(σ√2π))·e^(−(t−ΔT)²/(2σ²))` for `t ≥ ΔT`; zero
    /// before the delay.
    DelayedGaussian,
}

impl KernelFamily {
    pub fn is_fir(self) -> bool {
        !matches!(self, KernelFamily::LeakyIntegrator)
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::LeakyIntegrator => "leaky_integrator",
            KernelFamily::Alpha => "alpha",
            KernelFamily::DampedResonant => "damped_resonant",
            KernelFamily::DelayedAlpha => "delayed_alpha",
            KernelFamily::DelayedGaussian => "delayed_gaussian",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "leaky_integrator" => Ok(KernelFamily::LeakyIntegrator),
            "alpha" => Ok(KernelFamily::Alpha),
            "damped_resonant" => Ok(KernelFamily::DampedResonant),
            "delayed_alpha" => Ok(KernelFamily::DelayedAlpha),
            "delayed_gaussian" => Ok(KernelFamily::DelayedGaussian),
            other => Err(SkimError::parameter(
                "family",
                format!("unknown kernel family `{other}`"),
            )),
        }
    }
}

/// A kernel family plus its parameters and truncation length.
///
/// Construct through the per-family constructors; parameters are validated
/// there and the truncation length defaults to [`default_trunc_len`].
/// All time parameters are in (real-valued) timesteps; `omega` is in
/// radians per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    tau: f64,
    delta_t: f64,
    sigma: f64,
    omega: f64,
    trunc_len: usize,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(SkimError::parameter(name, format!("{v} must be finite and > 0")));
    }
    Ok(())
}

fn check_non_negative(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(SkimError::parameter(name, format!("{v} must be finite and >= 0")));
    }
    Ok(())
}

impl KernelSpec {
    /// Leaky integrator with nonlinear leak. `tau > 0.5` keeps the
    /// zero-input recurrence contractive.
    pub fn leaky_integrator(tau: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        if tau <= 0.5 {
            return Err(SkimError::parameter(
                "tau",
                format!("{tau} must exceed 0.5 for a stable leak"),
            ));
        }
        Ok(KernelSpec {
            family: KernelFamily::LeakyIntegrator,
            tau,
            delta_t: 0.0,
            sigma: 0.0,
            omega: 0.0,
            trunc_len: 1,
        })
    }

    pub fn alpha(tau: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        let mut spec = KernelSpec {
            family: KernelFamily::Alpha,
            tau,
            delta_t: 0.0,
            sigma: 0.0,
            omega: 0.0,
            trunc_len: 1,
        };
        spec.trunc_len = spec.compute_default_trunc_len();
        Ok(spec)
    }

    pub fn damped_resonant(tau: f64, omega: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        check_positive("omega", omega)?;
        let mut spec = KernelSpec {
            family: KernelFamily::DampedResonant,
            tau,
            delta_t: 0.0,
            sigma: 0.0,
            omega,
            trunc_len: 1,
        };
        spec.trunc_len = spec.compute_default_trunc_len();
        Ok(spec)
    }

    pub fn delayed_alpha(tau: f64, delta_t: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        check_non_negative("delta_t", delta_t)?;
        let mut spec = KernelSpec {
            family: KernelFamily::DelayedAlpha,
            tau,
            delta_t,
            sigma: 0.0,
            omega: 0.0,
            trunc_len: 1,
        };
        spec.trunc_len = spec.compute_default_trunc_len();
        Ok(spec)
    }

    pub fn delayed_gaussian(delta_t: f64, sigma: f64) -> Result<Self> {
        check_non_negative("delta_t", delta_t)?;
        check_positive("sigma", sigma)?;
        let mut spec = KernelSpec {
            family: KernelFamily::DelayedGaussian,
            tau: 0.0,
            delta_t,
            sigma,
            omega: 0.0,
            trunc_len: 1,
        };
        spec.trunc_len = spec.compute_default_trunc_len();
        Ok(spec)
    }

    /// Overrides the truncation length. The response magnitude at the cut
    /// must already be below `1e-6` of the peak.
    pub fn with_trunc_len(mut self, trunc_len: usize) -> Result<Self> {
        if !self.family.is_fir() {
            return Err(SkimError::Unsupported(
                "leaky integrator has no finite impulse response to truncate".into(),
            ));
        }
        if trunc_len == 0 {
            return Err(SkimError::parameter("trunc_len", "must be >= 1"));
        }
        let peak = self.peak_magnitude();
        let at_cut = self.raw_response(trunc_len).abs();
        if at_cut > TRUNCATION_THRESHOLD * peak {
            return Err(SkimError::parameter(
                "trunc_len",
                format!(
                    "response magnitude {at_cut:.3e} at lag {trunc_len} exceeds 1e-6 of peak {peak:.3e}"
                ),
            ));
        }
        self.trunc_len = trunc_len;
        Ok(self)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Time constant (all families except `DelayedGaussian`).
    pub fn tau(&self) -> Option<f64> {
        match self.family {
            KernelFamily::DelayedGaussian => None,
            _ => Some(self.tau),
        }
    }

    /// Explicit delay (`Delayed*` families).
    pub fn delta_t(&self) -> Option<f64> {
        match self.family {
            KernelFamily::DelayedAlpha | KernelFamily::DelayedGaussian => Some(self.delta_t),
            _ => None,
        }
    }

    /// Gaussian width (`DelayedGaussian`).
    pub fn sigma(&self) -> Option<f64> {
        match self.family {
            KernelFamily::DelayedGaussian => Some(self.sigma),
            _ => None,
        }
    }

    /// Resonant frequency in radians/timestep (`DampedResonant`).
    pub fn omega(&self) -> Option<f64> {
        match self.family {
            KernelFamily::DampedResonant => Some(self.omega),
            _ => None,
        }
    }

    pub fn trunc_len(&self) -> usize {
        self.trunc_len
    }

    /// Unit-impulse response at integer lag `t`; zero at and beyond the
    /// truncation length. Not defined for the leaky integrator.
    pub fn impulse_response(&self, t: usize) -> Result<f64> {
        if !self.family.is_fir() {
            return Err(SkimError::Unsupported(
                "leaky integrator has no closed-form impulse response".into(),
            ));
        }
        if t >= self.trunc_len {
            return Ok(0.0);
        }
        Ok(self.raw_response(t))
    }

    /// The truncated response table `h(0), …, h(trunc_len − 1)`.
    pub fn response_table(&self) -> Result<Vec<f64>> {
        if !self.family.is_fir() {
            return Err(SkimError::Unsupported(
                "leaky integrator has no impulse response table".into(),
            ));
        }
        Ok((0..self.trunc_len).map(|t| self.raw_response(t)).collect())
    }

    /// Untruncated response value at integer lag `t`.
    fn raw_response(&self, t: usize) -> f64 {
        let t = t as f64;
        match self.family {
            KernelFamily::LeakyIntegrator => unreachable!("checked by callers"),
            KernelFamily::Alpha => (t / self.tau) * (-t / self.tau).exp(),
            KernelFamily::DampedResonant => (-t / self.tau).exp() * (self.omega * t).sin(),
            KernelFamily::DelayedAlpha => {
                if t < self.delta_t {
                    0.0
                } else {
                    let s = t - self.delta_t;
                    (s / self.tau) * (-s / self.tau).exp()
                }
            }
            KernelFamily::DelayedGaussian => {
                if t < self.delta_t {
                    0.0
                } else {
                    let s = t - self.delta_t;
                    (1.0 / (self.sigma * (2.0 * std::f64::consts::PI).sqrt()))
                        * (-(s * s) / (2.0 * self.sigma * self.sigma)).exp()
                }
            }
        }
    }

    /// Upper scan bound: 20 time constants past the delay. Every family's
    /// envelope is monotone well before this, so no exceedance lies beyond.
    fn scan_cap(&self) -> usize {
        let time_scale = match self.family {
            KernelFamily::DelayedGaussian => self.sigma,
            _ => self.tau,
        };
        (self.delta_t + 20.0 * time_scale).ceil().max(1.0) as usize
    }

    fn peak_magnitude(&self) -> f64 {
        (0..=self.scan_cap())
            .map(|t| self.raw_response(t).abs())
            .fold(0.0, f64::max)
    }

    fn compute_default_trunc_len(&self) -> usize {
        let cap = self.scan_cap();
        let peak = self.peak_magnitude();
        let threshold = TRUNCATION_THRESHOLD * peak;
        let mut last_exceed = 0usize;
        let mut any = false;
        for t in 0..=cap {
            if self.raw_response(t).abs() > threshold {
                last_exceed = t;
                any = true;
            }
        }
        if !any {
            return 1;
        }
        (last_exceed + 1).min(cap).max(1)
    }
}

/// Smallest `T` with `|h(t)| ≤ 1e-6 · max|h|` for all `t ≥ T`, capped at 20
/// time constants past the delay.
pub fn default_trunc_len(spec: &KernelSpec) -> Result<usize> {
    if !spec.family.is_fir() {
        return Err(SkimError::Unsupported(
            "truncation length is only defined for FIR kernel families".into(),
        ));
    }
    Ok(spec.compute_default_trunc_len())
}

/// Running filter state for one kernel.
///
/// FIR families hold a ring buffer of pending response contributions; for
/// each nonzero input the truncated response, scaled by the input, is added
/// into the next `trunc_len` slots. The leaky integrator holds a scalar
/// accumulator. Single-owner mutable: one state must never be stepped from
/// two contexts at once.
#[derive(Debug, Clone)]
pub struct KernelState {
    inner: StateInner,
}

#[derive(Debug, Clone)]
enum StateInner {
    Fir {
        table: Vec<f64>,
        ring: Vec<f64>,
        head: usize,
    },
    Leaky {
        tau: f64,
        g: f64,
    },
}

impl KernelState {
    pub fn new(spec: &KernelSpec) -> KernelState {
        let inner = match spec.family {
            KernelFamily::LeakyIntegrator => StateInner::Leaky {
                tau: spec.tau,
                g: 0.0,
            },
            _ => {
                let table = spec
                    .response_table()
                    .expect("FIR families always have a table");
                let ring = vec![0.0; table.len()];
                StateInner::Fir {
                    table,
                    ring,
                    head: 0,
                }
            }
        };
        KernelState { inner }
    }

    /// Advances one timestep with the summed weighted event input and
    /// returns the filter output for this step.
    pub fn step(&mut self, weighted_input: f64) -> Result<f64> {
        if !weighted_input.is_finite() {
            return Err(SkimError::NonFinite("kernel input".into()));
        }
        match &mut self.inner {
            StateInner::Fir { table, ring, head } => {
                if weighted_input != 0.0 {
                    let split = ring.len() - *head;
                    for (slot, &h) in ring[*head..].iter_mut().zip(&table[..split]) {
                        *slot += weighted_input * h;
                    }
                    for (slot, &h) in ring[..*head].iter_mut().zip(&table[split..]) {
                        *slot += weighted_input * h;
                    }
                }
                let out = ring[*head];
                ring[*head] = 0.0;
                *head = (*head + 1) % ring.len();
                Ok(out)
            }
            StateInner::Leaky { tau, g } => {
                *g = *g * (1.0 - 1.0 / (*tau * (1.0 + *g * *g))) + weighted_input;
                Ok(*g)
            }
        }
    }

    /// Clears all pending contributions / the accumulator.
    pub fn reset(&mut self) {
        match &mut self.inner {
            StateInner::Fir { ring, head, .. } => {
                ring.fill(0.0);
                *head = 0;
            }
            StateInner::Leaky { g, .. } => *g = 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Test-side response formulas, written out independently of
    /// `KernelSpec::raw_response`.
    fn oracle_alpha(tau: f64) -> impl Fn(f64) -> f64 {
        move |t| (t / tau) * (-t / tau).exp()
    }
    fn oracle_resonant(tau: f64, omega: f64) -> impl Fn(f64) -> f64 {
        move |t| (-t / tau).exp() * (omega * t).sin()
    }
    fn oracle_delayed_alpha(tau: f64, dt: f64) -> impl Fn(f64) -> f64 {
        move |t| {
            if t < dt {
                0.0
            } else {
                ((t - dt) / tau) * (-(t - dt) / tau).exp()
            }
        }
    }
    fn oracle_delayed_gaussian(dt: f64, sigma: f64) -> impl Fn(f64) -> f64 {
        move |t| {
            if t < dt {
                0.0
            } else {
                (1.0 / (sigma * (2.0 * PI).sqrt()))
                    * (-((t - dt) * (t - dt)) / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    /// Independent scan: last integer lag whose magnitude exceeds 1e-6 of
    /// the grid peak, plus one.
    fn oracle_trunc(h: impl Fn(f64) -> f64, scan_to: usize) -> usize {
        let peak = (0..=scan_to).map(|t| h(t as f64).abs()).fold(0.0, f64::max);
        let last = (0..=scan_to)
            .filter(|&t| h(t as f64).abs() > 1e-6 * peak)
            .last()
            .unwrap_or(0);
        last + 1
    }

    #[test]
    fn alpha_response_values() {
        let k = KernelSpec::alpha(20.0).unwrap();
        assert_eq!(k.impulse_response(0).unwrap(), 0.0);
        let peak = k.impulse_response(20).unwrap();
        assert!((peak - (-1.0f64).exp()).abs() < 1e-12, "peak {peak}");
        assert!((peak - 0.367879441).abs() < 1e-9);
    }

    #[test]
    fn damped_resonant_zero_crossing() {
        // sin(pi) at the half period, independent of tau
        for tau in [5.0, 20.0, 100.0] {
            let k = KernelSpec::damped_resonant(tau, PI / 50.0).unwrap();
            assert!(k.impulse_response(50).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn delayed_gaussian_peak_at_delay() {
        let k = KernelSpec::delayed_gaussian(70.0, 5.0).unwrap();
        let peak = k.impulse_response(70).unwrap();
        assert!((peak - 0.079788456).abs() < 1e-9, "peak {peak}");
        assert!((peak - 1.0 / (5.0 * (2.0 * PI).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn delayed_families_zero_before_delay() {
        let a = KernelSpec::delayed_alpha(20.0, 70.0).unwrap();
        let g = KernelSpec::delayed_gaussian(70.0, 5.0).unwrap();
        for t in 0..70 {
            assert_eq!(a.impulse_response(t).unwrap(), 0.0, "alpha at {t}");
            assert_eq!(g.impulse_response(t).unwrap(), 0.0, "gaussian at {t}");
        }
        assert!(a.impulse_response(70).unwrap().abs() < 1e-12); // alpha starts from 0 again
        assert!(g.impulse_response(70).unwrap() > 0.07);
    }

    #[test]
    fn leaky_integrator_has_no_impulse_response() {
        let k = KernelSpec::leaky_integrator(20.0).unwrap();
        assert!(k.impulse_response(0).is_err());
        assert!(default_trunc_len(&k).is_err());
        assert!(k.clone().with_trunc_len(10).is_err());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(KernelSpec::alpha(0.0).is_err());
        assert!(KernelSpec::alpha(-1.0).is_err());
        assert!(KernelSpec::alpha(f64::NAN).is_err());
        assert!(KernelSpec::damped_resonant(20.0, 0.0).is_err());
        assert!(KernelSpec::delayed_alpha(20.0, -1.0).is_err());
        assert!(KernelSpec::delayed_gaussian(70.0, 0.0).is_err());
        assert!(KernelSpec::leaky_integrator(0.4).is_err());
    }

    #[test]
    fn default_trunc_len_matches_scan_oracle() {
        // frozen values from the independent scan below
        let alpha = KernelSpec::alpha(20.0).unwrap();
        assert_eq!(alpha.trunc_len(), 354);
        assert_eq!(oracle_trunc(oracle_alpha(20.0), 2000), 354);
        assert!((280..=420).contains(&alpha.trunc_len()));

        let gauss = KernelSpec::delayed_gaussian(70.0, 5.0).unwrap();
        assert_eq!(gauss.trunc_len(), 97);
        assert_eq!(oracle_trunc(oracle_delayed_gaussian(70.0, 5.0), 2000), 97);
        // analytic bound: delay + sigma * sqrt(2 ln 1e6) ~ 96.3
        assert!((96..=97).contains(&gauss.trunc_len()));

        let res = KernelSpec::damped_resonant(20.0, PI / 50.0).unwrap();
        assert_eq!(res.trunc_len(), 288);
        assert_eq!(oracle_trunc(oracle_resonant(20.0, PI / 50.0), 2000), 288);
        // at least the log bound where the envelope alone reaches 1e-6
        assert!(res.trunc_len() >= 276);

        let dalpha = KernelSpec::delayed_alpha(20.0, 70.0).unwrap();
        assert_eq!(dalpha.trunc_len(), 424);
        assert_eq!(oracle_trunc(oracle_delayed_alpha(20.0, 70.0), 2000), 424);
    }

    #[test]
    fn with_trunc_len_validates_cut_magnitude() {
        let k = KernelSpec::alpha(20.0).unwrap();
        assert!(k.clone().with_trunc_len(400).is_ok());
        assert!(k.clone().with_trunc_len(100).is_err()); // response still large there
        assert!(k.clone().with_trunc_len(0).is_err());
    }

    #[test]
    fn zero_input_gives_zero_output() {
        for spec in [
            KernelSpec::alpha(20.0).unwrap(),
            KernelSpec::delayed_gaussian(10.0, 3.0).unwrap(),
        ] {
            let mut st = KernelState::new(&spec);
            for _ in 0..200 {
                assert_eq!(st.step(0.0).unwrap(), 0.0);
            }
        }
        let mut leaky = KernelState::new(&KernelSpec::leaky_integrator(10.0).unwrap());
        for _ in 0..50 {
            assert_eq!(leaky.step(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn unit_impulse_reproduces_response() {
        let spec = KernelSpec::alpha(20.0).unwrap();
        let mut st = KernelState::new(&spec);
        let first = st.step(1.0).unwrap();
        assert_eq!(first, spec.impulse_response(0).unwrap());
        for t in 1..spec.trunc_len() + 20 {
            let out = st.step(0.0).unwrap();
            assert_eq!(out, spec.impulse_response(t).unwrap(), "lag {t}");
        }
    }

    /// Direct convolution of the input with the truncated response.
    fn convolve(spec: &KernelSpec, input: &[f64]) -> Vec<f64> {
        let h = spec.response_table().unwrap();
        let mut out = vec![0.0; input.len()];
        for (s, &u) in input.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            for (lag, &hv) in h.iter().enumerate() {
                if s + lag < out.len() {
                    out[s + lag] += u * hv;
                }
            }
        }
        out
    }

    #[test]
    fn superposition_of_two_events_matches_convolution() {
        let spec = KernelSpec::delayed_gaussian(70.0, 5.0).unwrap();
        for second in [100usize, 30] {
            let mut input = vec![0.0; 300];
            input[0] = 1.0;
            input[second] = 1.0;
            let expected = convolve(&spec, &input);
            let mut st = KernelState::new(&spec);
            for (t, &u) in input.iter().enumerate() {
                let out = st.step(u).unwrap();
                assert!(
                    (out - expected[t]).abs() < 1e-12,
                    "t={t} out={out} expected={}",
                    expected[t]
                );
            }
        }
    }

    #[test]
    fn streaming_equals_convolution_on_random_trains() {
        use rand::{Rng, SeedableRng};
        let specs = [
            KernelSpec::alpha(12.0).unwrap(),
            KernelSpec::damped_resonant(15.0, 0.21).unwrap(),
            KernelSpec::delayed_alpha(8.0, 25.0).unwrap(),
            KernelSpec::delayed_gaussian(40.0, 6.0).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for spec in &specs {
            for _ in 0..3 {
                let input: Vec<f64> = (0..500)
                    .map(|_| {
                        if rng.random::<f64>() < 0.05 {
                            rng.random_range(-2.0..2.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let expected = convolve(spec, &input);
                let mut st = KernelState::new(spec);
                for (t, &u) in input.iter().enumerate() {
                    let out = st.step(u).unwrap();
                    assert!((out - expected[t]).abs() < 1e-12, "{spec:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn fir_linearity() {
        let spec = KernelSpec::damped_resonant(10.0, 0.3).unwrap();
        let a = [1.0, 0.0, 0.5, 0.0, 0.0, -1.2, 0.0, 0.0];
        let b = [0.0, 2.0, 0.0, 0.0, 0.7, 0.3, 0.0, 1.0];
        let mut st_a = KernelState::new(&spec);
        let mut st_b = KernelState::new(&spec);
        let mut st_ab = KernelState::new(&spec);
        for t in 0..a.len() {
            let oa = st_a.step(a[t]).unwrap();
            let ob = st_b.step(b[t]).unwrap();
            let oab = st_ab.step(a[t] + b[t]).unwrap();
            assert!((oab - (oa + ob)).abs() < 1e-12);
        }
    }

    #[test]
    fn fir_memory_fades_exactly() {
        let spec = KernelSpec::delayed_gaussian(20.0, 4.0).unwrap();
        let mut st = KernelState::new(&spec);
        st.step(3.5).unwrap();
        let mut saw_nonzero = false;
        for t in 1..spec.trunc_len() {
            if st.step(0.0).unwrap() != 0.0 {
                saw_nonzero = true;
            }
            let _ = t;
        }
        assert!(saw_nonzero);
        for _ in 0..100 {
            assert_eq!(st.step(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn leaky_integrator_decays_monotonically() {
        let spec = KernelSpec::leaky_integrator(5.0).unwrap();
        let mut st = KernelState::new(&spec);
        let mut prev = st.step(2.0).unwrap().abs();
        for _ in 0..200 {
            let g = st.step(0.0).unwrap().abs();
            assert!(g < prev, "|g| must shrink under zero input");
            prev = g;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn non_finite_input_is_error() {
        let mut st = KernelState::new(&KernelSpec::alpha(10.0).unwrap());
        assert!(st.step(f64::NAN).is_err());
        assert!(st.step(f64::INFINITY).is_err());
    }

    #[test]
    fn reset_clears_state() {
        let spec = KernelSpec::alpha(10.0).unwrap();
        let mut st = KernelState::new(&spec);
        st.step(5.0).unwrap();
        st.step(0.0).unwrap();
        st.reset();
        for _ in 0..spec.trunc_len() {
            assert_eq!(st.step(0.0).unwrap(), 0.0);
        }
    }
}
