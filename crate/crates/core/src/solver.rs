//! Output-weight solution `W = Y Aᵀ (A Aᵀ + εI)⁻¹`.
//!
//! The readout weights minimize `‖WA − Y‖²_F + ε‖W‖²_F` for hidden-output
//! columns `A ∈ R^(M×k)` and targets `Y ∈ R^(N×k)`. Two routes produce the
//! same solution:
//!
//! - [`batch_solve`]: forms the M×M normal equations and solves them by
//!   Cholesky factorization (k ≫ M in every intended use).
//! - [`SolverState`]: absorbs one `(a, y)` column pair at a time through the
//!   recursive-least-squares rank-one update, keeping the running inverse
//!   correlation matrix `P = (A Aᵀ + εI)⁻¹`. After any number of updates the
//!   weights match the batch solution over the same columns.
//!
//! Arithmetic is double precision throughout; `P` is re-symmetrized after
//! every update.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Result, SkimError};

/// Ridge default: `1e-6 · M`.
pub fn default_eps(m: usize) -> f64 {
    1e-6 * m as f64
}

fn check_finite_view2(name: &str, m: &ArrayView2<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SkimError::NonFinite(name.into()));
    }
    Ok(())
}

fn check_finite_view1(name: &str, v: &ArrayView1<f64>) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(SkimError::NonFinite(name.into()));
    }
    Ok(())
}

/// In-place lower Cholesky factor of a symmetric positive-definite matrix.
/// Fails if a pivot is not strictly positive.
fn cholesky_lower(g: &Array2<f64>) -> Result<Array2<f64>> {
    let n = g.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[(i, j)];
            for p in 0..j {
                sum -= l[(i, p)] * l[(j, p)];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(SkimError::NonFinite(format!(
                        "normal equations not positive definite (pivot {sum} at {i})"
                    )));
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` in place.
fn cholesky_solve(l: &Array2<f64>, b: &mut Array1<f64>) {
    let n = l.nrows();
    for i in 0..n {
        let mut sum = b[i];
        for p in 0..i {
            sum -= l[(i, p)] * b[p];
        }
        b[i] = sum / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut sum = b[i];
        for p in i + 1..n {
            sum -= l[(p, i)] * b[p];
        }
        b[i] = sum / l[(i, i)];
    }
}

/// Batch regularized pseudoinverse solve: `W = Y Aᵀ (A Aᵀ + εI)⁻¹`.
///
/// `a` is M×k (hidden columns), `y` is N×k (target columns). Converges to
/// the exact least-squares pseudoinverse solution as `eps → 0` when `A` has
/// full row rank.
pub fn batch_solve(a: ArrayView2<f64>, y: ArrayView2<f64>, eps: f64) -> Result<Array2<f64>> {
    if a.ncols() != y.ncols() {
        return Err(SkimError::shape(format!(
            "A has {} columns but Y has {}",
            a.ncols(),
            y.ncols()
        )));
    }
    if a.ncols() == 0 {
        return Err(SkimError::parameter("k", "need at least one column"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SkimError::parameter("eps", format!("{eps} must be finite and > 0")));
    }
    check_finite_view2("A", &a)?;
    check_finite_view2("Y", &y)?;

    let m = a.nrows();
    let mut gram = a.dot(&a.t());
    for i in 0..m {
        gram[(i, i)] += eps;
    }
    let l = cholesky_lower(&gram)?;
    let b = y.dot(&a.t()); // N x M

    let mut w = Array2::<f64>::zeros((y.nrows(), m));
    for (i, row) in b.outer_iter().enumerate() {
        let mut x = row.to_owned();
        cholesky_solve(&l, &mut x);
        w.row_mut(i).assign(&x);
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(SkimError::NonFinite("batch solution".into()));
    }
    Ok(w)
}

/// Running state of the online solve.
///
/// Starts at `P = I/ε`, `W = 0` (the batch solution over zero columns) and
/// absorbs column pairs one at a time. Strictly sequential; never shared
/// across contexts.
#[derive(Debug, Clone)]
pub struct SolverState {
    p: Array2<f64>,
    w: Array2<f64>,
    eps: f64,
    k: usize,
    // scratch for the committed update, so a failed update leaves the state
    // untouched
    p_next: Array2<f64>,
    w_next: Array2<f64>,
}

impl SolverState {
    /// `P = I/ε`, `W = 0`, no columns absorbed.
    pub fn new(m: usize, n: usize, eps: f64) -> Result<SolverState> {
        if m == 0 || n == 0 {
            return Err(SkimError::parameter("m/n", "dimensions must be positive"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(SkimError::parameter("eps", format!("{eps} must be finite and > 0")));
        }
        Ok(SolverState {
            p: Array2::eye(m) / eps,
            w: Array2::zeros((n, m)),
            eps,
            k: 0,
            p_next: Array2::zeros((m, m)),
            w_next: Array2::zeros((n, m)),
        })
    }

    pub fn hidden_width(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_outputs(&self) -> usize {
        self.w.nrows()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of absorbed columns.
    pub fn columns_absorbed(&self) -> usize {
        self.k
    }

    /// Current weights; equal to the batch solution over the columns seen
    /// so far.
    pub fn weights(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn into_weights(self) -> Array2<f64> {
        self.w
    }

    /// Running inverse correlation matrix `(A Aᵀ + εI)⁻¹`.
    pub fn inverse_correlation(&self) -> &Array2<f64> {
        &self.p
    }

    /// Rank-one update with one hidden column `a` and target column `y`:
    ///
    /// ```text
    /// g = P a / (1 + aᵀ P a)
    /// W ← W + (y − W a) gᵀ
    /// P ← P − g (P a)ᵀ        (then re-symmetrized)
    /// ```
    ///
    /// On any non-finite intermediate the state is left unchanged.
    pub fn update(&mut self, a: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<()> {
        let m = self.p.nrows();
        let n = self.w.nrows();
        if a.len() != m || y.len() != n {
            return Err(SkimError::shape(format!(
                "expected column sizes a={m}, y={n}; got a={}, y={}",
                a.len(),
                y.len()
            )));
        }
        check_finite_view1("a", &a)?;
        check_finite_view1("y", &y)?;

        let pa = self.p.dot(&a);
        let denom = 1.0 + a.dot(&pa);
        if !denom.is_finite() || denom <= 0.0 || pa.iter().any(|v| !v.is_finite()) {
            return Err(SkimError::NonFinite("online update gain".into()));
        }
        let gain = &pa / denom;
        let resid = &y.to_owned() - &self.w.dot(&a);
        if resid.iter().any(|v| !v.is_finite()) {
            return Err(SkimError::NonFinite("online update residual".into()));
        }

        // build the committed values in scratch, then swap, so any
        // non-finite result (overflow) leaves the state untouched
        let mut all_finite = true;
        // W' = W + resid ⊗ gain
        for i in 0..n {
            let r = resid[i];
            for j in 0..m {
                let v = self.w[(i, j)] + r * gain[j];
                all_finite &= v.is_finite();
                self.w_next[(i, j)] = v;
            }
        }
        // P' = sym(P − gain ⊗ pa)
        for i in 0..m {
            let gi = gain[i];
            let pi = pa[i];
            for j in 0..=i {
                let v = 0.5 * ((self.p[(i, j)] - gi * pa[j]) + (self.p[(j, i)] - gain[j] * pi));
                all_finite &= v.is_finite();
                self.p_next[(i, j)] = v;
                self.p_next[(j, i)] = v;
            }
        }
        if !all_finite {
            return Err(SkimError::NonFinite("online update result".into()));
        }
        std::mem::swap(&mut self.w, &mut self.w_next);
        std::mem::swap(&mut self.p, &mut self.p_next);
        self.k += 1;
        Ok(())
    }
}

/// Drives [`SolverState::update`] over two column streams so the full
/// hidden-output matrix never materializes. The streams must have equal
/// length.
pub fn solve_stream<A, Y>(m: usize, n: usize, eps: f64, a_cols: A, y_cols: Y) -> Result<Array2<f64>>
where
    A: IntoIterator<Item = Result<Array1<f64>>>,
    Y: IntoIterator<Item = Result<Array1<f64>>>,
{
    let mut state = SolverState::new(m, n, eps)?;
    let mut a_iter = a_cols.into_iter();
    let mut y_iter = y_cols.into_iter();
    loop {
        match (a_iter.next(), y_iter.next()) {
            (Some(a), Some(y)) => state.update(a?.view(), y?.view())?,
            (None, None) => break,
            (Some(_), None) | (None, Some(_)) => {
                return Err(SkimError::shape(format!(
                    "column streams ended at different lengths (absorbed {})",
                    state.columns_absorbed()
                )));
            }
        }
    }
    Ok(state.into_weights())
}
