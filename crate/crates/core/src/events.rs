//! Event streams, continuous signals, and time-series file I/O.
//!
//! Time is a discrete, unitless grid of `n_steps` timesteps. An event is a
//! Boolean occurrence at one `(timestep, channel)` cell; a stream holds the
//! set of such cells in canonical `(t, c)` order. Continuous signals are
//! dense real-valued matrices on the same grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, SkimError};

/// Sparse set of Boolean events on a channels × timesteps grid.
///
/// Events are kept sorted by `(t, c)` with no duplicates. A stream may have
/// zero channels (and therefore no events), which is the degenerate input of
/// a network with no event path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventStream {
    n_channels: usize,
    n_steps: usize,
    events: Vec<(usize, usize)>,
}

impl EventStream {
    /// Builds a stream from `(t, c)` pairs, canonicalizing order and
    /// dropping duplicate cells.
    pub fn new(n_channels: usize, n_steps: usize, mut events: Vec<(usize, usize)>) -> Result<Self> {
        if n_steps == 0 {
            return Err(SkimError::parameter("n_steps", "must be positive"));
        }
        for &(t, c) in &events {
            if t >= n_steps || c >= n_channels {
                return Err(SkimError::parameter(
                    "events",
                    format!(
                        "event ({t}, {c}) outside grid of {n_channels} channels x {n_steps} steps"
                    ),
                ));
            }
        }
        events.sort_unstable();
        events.dedup();
        Ok(EventStream {
            n_channels,
            n_steps,
            events,
        })
    }

    pub fn empty(n_channels: usize, n_steps: usize) -> Result<Self> {
        Self::new(n_channels, n_steps, Vec::new())
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Events in canonical `(t, c)` order.
    pub fn events(&self) -> &[(usize, usize)] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, t: usize, c: usize) -> bool {
        self.events.binary_search(&(t, c)).is_ok()
    }

    /// Event count per channel.
    pub fn channel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_channels];
        for &(_, c) in &self.events {
            counts[c] += 1;
        }
        counts
    }

    /// Union of two streams on the same grid (Boolean OR per cell).
    pub fn merge(&self, other: &EventStream) -> Result<EventStream> {
        if self.n_channels != other.n_channels || self.n_steps != other.n_steps {
            return Err(SkimError::shape(format!(
                "cannot merge {}x{} stream with {}x{} stream",
                self.n_channels, self.n_steps, other.n_channels, other.n_steps
            )));
        }
        let mut events = Vec::with_capacity(self.events.len() + other.events.len());
        events.extend_from_slice(&self.events);
        events.extend_from_slice(&other.events);
        EventStream::new(self.n_channels, self.n_steps, events)
    }

    pub fn to_dense(&self) -> DenseRaster {
        let mut m = Array2::<u8>::zeros((self.n_channels, self.n_steps));
        for &(t, c) in &self.events {
            m[(c, t)] = 1;
        }
        DenseRaster(m)
    }

    pub fn from_dense(raster: &DenseRaster) -> EventStream {
        let (n_channels, n_steps) = raster.0.dim();
        let mut events = Vec::new();
        for t in 0..n_steps {
            for c in 0..n_channels {
                if raster.0[(c, t)] == 1 {
                    events.push((t, c));
                }
            }
        }
        EventStream {
            n_channels,
            n_steps,
            events,
        }
    }

    /// Dense 0/1 view of a single channel as `f64`, length `n_steps`.
    pub fn channel_dense(&self, channel: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n_steps];
        for &(t, c) in &self.events {
            if c == channel {
                row[t] = 1.0;
            }
        }
        row
    }
}

/// Dense channels × timesteps matrix of exactly 0/1 entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseRaster(Array2<u8>);

impl DenseRaster {
    /// Validates that every entry is 0 or 1.
    pub fn new(values: Array2<u8>) -> Result<Self> {
        if values.ncols() == 0 {
            return Err(SkimError::parameter("values", "must have at least one timestep"));
        }
        if let Some(bad) = values.iter().find(|&&v| v > 1) {
            return Err(SkimError::Parse {
                path: "<raster>".into(),
                line: 0,
                reason: format!("entry {bad} is not 0 or 1"),
            });
        }
        Ok(DenseRaster(values))
    }

    pub fn values(&self) -> &Array2<u8> {
        &self.0
    }

    pub fn n_channels(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.0.ncols()
    }
}

/// Dense real-valued channels × timesteps signal.
///
/// May have zero channels; always at least one timestep. When paired with an
/// [`EventStream`] the step counts must agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSignal {
    values: Array2<f64>,
}

impl ContinuousSignal {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.ncols() == 0 {
            return Err(SkimError::parameter("values", "must have at least one timestep"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(SkimError::NonFinite("continuous signal".into()));
        }
        Ok(ContinuousSignal { values })
    }

    /// A constant-valued signal on every channel.
    pub fn constant(n_channels: usize, n_steps: usize, value: f64) -> Result<Self> {
        Self::new(Array2::from_elem((n_channels, n_steps), value))
    }

    pub fn n_channels(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn value(&self, channel: usize, t: usize) -> f64 {
        self.values[(channel, t)]
    }
}

/// Fills each grid cell independently with probability `rate_per_step`
/// (Bernoulli approximation of a Poisson process on a unit grid; at most one
/// event per cell). Bitwise reproducible for a given seed.
pub fn poisson_generate(
    n_channels: usize,
    n_steps: usize,
    rate_per_step: f64,
    seed: u64,
) -> Result<EventStream> {
    if !(0.0..=1.0).contains(&rate_per_step) {
        return Err(SkimError::parameter(
            "rate_per_step",
            format!("{rate_per_step} outside [0, 1]"),
        ));
    }
    if n_steps == 0 {
        return Err(SkimError::parameter("n_steps", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    for t in 0..n_steps {
        for c in 0..n_channels {
            if rng.random::<f64>() < rate_per_step {
                events.push((t, c));
            }
        }
    }
    // generated in (t, c) order already
    Ok(EventStream {
        n_channels,
        n_steps,
        events,
    })
}

/// Writes the event CSV format:
///
/// ```text
/// # channels=<L> steps=<T>
/// t,channel
/// 0,3
/// ...
/// ```
///
/// Rows are in canonical `(t, c)` order, so write-then-read is byte-stable.
pub fn write_events(stream: &EventStream, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# channels={} steps={}",
        stream.n_channels, stream.n_steps
    );
    out.push_str("t,channel\n");
    for &(t, c) in &stream.events {
        let _ = writeln!(out, "{t},{c}");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_events(path: impl AsRef<Path>) -> Result<EventStream> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    parse_events(&text, &display)
}

fn parse_events(text: &str, path: &str) -> Result<EventStream> {
    let err = |line: usize, reason: String| SkimError::Parse {
        path: path.to_string(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    let rest = header
        .strip_prefix('#')
        .ok_or_else(|| err(1, format!("expected `# channels=<L> steps=<T>`, got `{header}`")))?;
    let mut n_channels = None;
    let mut n_steps = None;
    for part in rest.split_whitespace() {
        if let Some(v) = part.strip_prefix("channels=") {
            n_channels = Some(v.parse::<usize>().map_err(|e| err(1, format!("bad channels: {e}")))?);
        } else if let Some(v) = part.strip_prefix("steps=") {
            n_steps = Some(v.parse::<usize>().map_err(|e| err(1, format!("bad steps: {e}")))?);
        } else {
            return Err(err(1, format!("unrecognized header field `{part}`")));
        }
    }
    let n_channels = n_channels.ok_or_else(|| err(1, "missing channels=".to_string()))?;
    let n_steps = n_steps.ok_or_else(|| err(1, "missing steps=".to_string()))?;

    let (_, cols) = lines
        .next()
        .ok_or_else(|| err(2, "missing `t,channel` header".to_string()))?;
    if cols.trim() != "t,channel" {
        return Err(err(2, format!("expected `t,channel`, got `{cols}`")));
    }

    let mut events = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (t_str, c_str) = line
            .split_once(',')
            .ok_or_else(|| err(lineno, format!("expected `t,channel`, got `{line}`")))?;
        let t: usize = t_str
            .trim()
            .parse()
            .map_err(|e| err(lineno, format!("bad timestep `{t_str}`: {e}")))?;
        let c: usize = c_str
            .trim()
            .parse()
            .map_err(|e| err(lineno, format!("bad channel `{c_str}`: {e}")))?;
        if t >= n_steps {
            return Err(err(lineno, format!("timestep {t} >= steps {n_steps}")));
        }
        if c >= n_channels {
            return Err(err(lineno, format!("channel {c} >= channels {n_channels}")));
        }
        events.push((t, c));
    }
    EventStream::new(n_channels, n_steps, events)
}

/// Writes the continuous-signal CSV format: header `t,ch0,ch1,...`, one row
/// per timestep. Values print as the shortest decimal that round-trips the
/// underlying double.
pub fn write_continuous(signal: &ContinuousSignal, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("t");
    for c in 0..signal.n_channels() {
        let _ = write!(out, ",ch{c}");
    }
    out.push('\n');
    for t in 0..signal.n_steps() {
        let _ = write!(out, "{t}");
        for c in 0..signal.n_channels() {
            let _ = write!(out, ",{}", signal.values[(c, t)]);
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_continuous(path: impl AsRef<Path>) -> Result<ContinuousSignal> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    parse_continuous(&text, &display)
}

fn parse_continuous(text: &str, path: &str) -> Result<ContinuousSignal> {
    let err = |line: usize, reason: String| SkimError::Parse {
        path: path.to_string(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    let mut fields = header.split(',');
    if fields.next() != Some("t") {
        return Err(err(1, format!("expected header starting with `t`, got `{header}`")));
    }
    let n_channels = fields.count();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t_str = fields.next().unwrap_or("");
        let t: usize = t_str
            .trim()
            .parse()
            .map_err(|e| err(lineno, format!("bad timestep `{t_str}`: {e}")))?;
        if t != rows.len() {
            return Err(err(
                lineno,
                format!("expected timestep {}, got {t}", rows.len()),
            ));
        }
        let mut row = Vec::with_capacity(n_channels);
        for f in fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|e| err(lineno, format!("bad value `{f}`: {e}")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite value `{f}`")));
            }
            row.push(v);
        }
        if row.len() != n_channels {
            return Err(err(
                lineno,
                format!("expected {n_channels} values, got {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(1, "no data rows".to_string()));
    }
    let n_steps = rows.len();
    let mut values = Array2::zeros((n_channels, n_steps));
    for (t, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            values[(c, t)] = v;
        }
    }
    ContinuousSignal::new(values)
}
