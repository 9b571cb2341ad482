//! One-step-ahead forecasters behind a common interface.
//!
//! Two implementations: a window-based scheme that adds the mean adjacent
//! difference over the last `w` steps to the current sample, and an
//! autoregressive model of order `p` fit by least squares on the
//! first-differenced series (the classic ARIMA(p,1,0) baseline).

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deterministic one-step forecaster. Identical observation sequences must
/// yield bit-identical predictions; this is what lets the sensor and server
/// stay in lockstep without extra signalling.
pub trait Forecaster {
    fn observe(&mut self, value: f64);

    /// Predicts the next value. No side effects.
    fn predict_next(&self) -> Result<f64>;

    /// Observations required before `predict_next` is defined.
    fn warmup_len(&self) -> usize;
}

/// Forecaster selection plus parameters, as carried in protocol configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "forecaster", rename_all = "snake_case")]
pub enum ForecasterKind {
    Window {
        w: usize,
    },
    Arima {
        p: usize,
        fit_window: usize,
        refit_every: Option<usize>,
    },
}

impl ForecasterKind {
    pub fn window(w: usize) -> Self {
        ForecasterKind::Window { w }
    }

    pub fn arima(p: usize, fit_window: usize) -> Self {
        ForecasterKind::Arima {
            p,
            fit_window,
            refit_every: None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Forecaster>> {
        match *self {
            ForecasterKind::Window { w } => Ok(Box::new(WindowForecaster::new(w)?)),
            ForecasterKind::Arima {
                p,
                fit_window,
                refit_every,
            } => Ok(Box::new(ArForecaster::new(p, fit_window, refit_every)?)),
        }
    }

    /// Samples that must be observed (and, in a protocol run, transmitted)
    /// before predictions start.
    pub fn bootstrap_len(&self) -> usize {
        match *self {
            ForecasterKind::Window { w } => w + 1,
            ForecasterKind::Arima { fit_window, .. } => fit_window,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ForecasterKind::Window { .. } => "window",
            ForecasterKind::Arima { .. } => "arima",
        }
    }
}

/// Closed form of the window scheme: given the last `w+1` values
/// `t[n-w..=n]`, the next value is `t[n] + (t[n] - t[n-w]) / w`.
pub fn window_predict(buffer: &[f64], w: usize) -> Result<f64> {
    if w == 0 {
        return Err(Error::InvalidConfig("window size must be >= 1".into()));
    }
    if buffer.len() != w + 1 {
        return Err(Error::InsufficientHistory {
            need: w + 1,
            have: buffer.len(),
        });
    }
    let newest = buffer[w];
    let oldest = buffer[0];
    Ok(newest + (newest - oldest) / w as f64)
}

/// Window forecaster: ring of the last `w+1` observations.
#[derive(Debug, Clone)]
pub struct WindowForecaster {
    w: usize,
    buffer: VecDeque<f64>,
}

impl WindowForecaster {
    pub fn new(w: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::InvalidConfig("window size must be >= 1".into()));
        }
        Ok(Self {
            w,
            buffer: VecDeque::with_capacity(w + 1),
        })
    }

    pub fn window_size(&self) -> usize {
        self.w
    }
}

impl Forecaster for WindowForecaster {
    fn observe(&mut self, value: f64) {
        if self.buffer.len() == self.w + 1 {
            self.buffer.pop_front();
        }
        self.buffer.push_back(value);
    }

    fn predict_next(&self) -> Result<f64> {
        if self.buffer.len() < self.w + 1 {
            return Err(Error::InsufficientHistory {
                need: self.w + 1,
                have: self.buffer.len(),
            });
        }
        let buf: Vec<f64> = self.buffer.iter().copied().collect();
        window_predict(&buf, self.w)
    }

    fn warmup_len(&self) -> usize {
        self.w + 1
    }
}

/// Result of an AR least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub coefficients: Vec<f64>,
    /// True when the normal matrix was singular and ridge regularization
    /// (lambda = 1e-8) was applied.
    pub ridged: bool,
}

/// Least-squares AR(p) fit on the first-differenced series.
///
/// Rows regress each difference on its `p` predecessors; the normal
/// equations are solved directly. A singular normal matrix falls back to
/// ridge with lambda = 1e-8.
pub fn ar_fit(values: &[f64], p: usize) -> Result<ArFit> {
    if p == 0 {
        return Err(Error::InvalidConfig("AR order must be >= 1".into()));
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.len() < p + 2 {
        return Err(Error::InsufficientHistory {
            need: p + 3,
            have: values.len(),
        });
    }
    // Normal equations a = X'X, b = X'y with rows
    // y = d[t], x = [d[t-1], ..., d[t-p]] for t in p..diffs.len().
    let mut a = vec![vec![0.0_f64; p]; p];
    let mut b = vec![0.0_f64; p];
    for t in p..diffs.len() {
        let y = diffs[t];
        for i in 0..p {
            let xi = diffs[t - 1 - i];
            b[i] += xi * y;
            for j in 0..p {
                a[i][j] += xi * diffs[t - 1 - j];
            }
        }
    }
    match solve_linear(&a, &b) {
        Some(coefficients) if coefficients.iter().all(|c| c.is_finite()) => Ok(ArFit {
            coefficients,
            ridged: false,
        }),
        _ => {
            const LAMBDA: f64 = 1e-8;
            let mut ridged = a.clone();
            for (i, row) in ridged.iter_mut().enumerate() {
                row[i] += LAMBDA;
            }
            let coefficients = solve_linear(&ridged, &b).ok_or_else(|| {
                Error::InvalidConfig("ridge-regularized normal matrix still singular".into())
            })?;
            Ok(ArFit {
                coefficients,
                ridged: true,
            })
        }
    }
}

/// Gaussian elimination with partial pivoting. Returns None on singularity.
fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot < 1e-12 {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in row + 1..n {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// AR(p) forecaster on first differences (d = 1, q = 0).
///
/// Fits once from the leading `fit_window` observations; `refit_every`
/// re-runs the fit on the trailing window every N observations, which is the
/// configuration used for the execution-time comparison against the window
/// scheme.
#[derive(Debug, Clone)]
pub struct ArForecaster {
    p: usize,
    fit_window: usize,
    refit_every: Option<usize>,
    history: Vec<f64>,
    fit: Option<ArFit>,
}

impl ArForecaster {
    pub fn new(p: usize, fit_window: usize, refit_every: Option<usize>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidConfig("AR order must be >= 1".into()));
        }
        // fit_window samples give fit_window - 1 differences; need p + 2 of those.
        if fit_window < p + 3 {
            return Err(Error::InvalidConfig(format!(
                "fit_window must be >= p + 3 (= {})",
                p + 3
            )));
        }
        Ok(Self {
            p,
            fit_window,
            refit_every,
            history: Vec::new(),
            fit: None,
        })
    }

    pub fn fit(&self) -> Option<&ArFit> {
        self.fit.as_ref()
    }
}

impl Forecaster for ArForecaster {
    fn observe(&mut self, value: f64) {
        self.history.push(value);
        let n = self.history.len();
        if n == self.fit_window {
            self.fit = ar_fit(&self.history[..self.fit_window], self.p).ok();
        } else if n > self.fit_window {
            if let Some(every) = self.refit_every {
                if (n - self.fit_window) % every == 0 {
                    let tail = &self.history[n - self.fit_window..];
                    self.fit = ar_fit(tail, self.p).ok();
                }
            }
        }
    }

    fn predict_next(&self) -> Result<f64> {
        let fit = self.fit.as_ref().ok_or(Error::NotFitted)?;
        let n = self.history.len();
        if n < self.p + 1 {
            return Err(Error::InsufficientHistory {
                need: self.p + 1,
                have: n,
            });
        }
        let mut diff = 0.0;
        for (j, c) in fit.coefficients.iter().enumerate() {
            diff += c * (self.history[n - 1 - j] - self.history[n - 2 - j]);
        }
        let last = self.history[n - 1];
        Ok(last + diff)
    }

    fn warmup_len(&self) -> usize {
        self.fit_window
    }
}

/// Median wall-clock seconds per observe+predict cycle over `reps`
/// repetitions of an `n`-sample stream.
pub fn measure_throughput<F>(mut factory: F, n: usize, reps: usize) -> f64
where
    F: FnMut() -> Box<dyn Forecaster>,
{
    use rand::{Rng, SeedableRng};
    let reps = reps.max(1);
    let mut per_rep = Vec::with_capacity(reps);
    for rep in 0..reps {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rep as u64);
        let mut fc = factory();
        let mut acc = 0.0_f64;
        let start = Instant::now();
        for _ in 0..n {
            let v: f64 = rng.gen::<f64>() + acc * 0.01;
            fc.observe(v);
            if let Ok(p) = fc.predict_next() {
                acc = p; // keep the prediction live so it is not optimized out
            }
        }
        per_rep.push(start.elapsed().as_secs_f64() / n as f64);
    }
    per_rep.sort_by(f64::total_cmp);
    per_rep[per_rep.len() / 2]
}
