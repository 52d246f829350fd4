use crate::error::{Error, Result};
use crate::netcore::Compaction;

/// Symmetric block connection probabilities, with cached `ln P` and
/// `ln(1 - P)`, and the assortativity cutoff when the constrained prior is
/// in use.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityState {
    p: Vec<Vec<f64>>,
    ln_p: Vec<Vec<f64>>,
    ln_q: Vec<Vec<f64>>,
    epsilon: Option<f64>,
}

impl ConnectivityState {
    pub fn new(p: Vec<Vec<f64>>, epsilon: Option<f64>) -> Result<Self> {
        let k = p.len();
        for (a, row) in p.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidParameter(format!("P row {a} has length {}, expected {k}", row.len())));
            }
            for (b, &v) in row.iter().enumerate() {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::InvalidParameter(format!("P[{a}][{b}] = {v} outside (0,1)")));
                }
                if v != p[b][a] {
                    return Err(Error::InvalidParameter(format!("P not symmetric at ({a},{b})")));
                }
            }
        }
        let ln_p = p.iter().map(|r| r.iter().map(|v| v.ln()).collect()).collect();
        let ln_q = p.iter().map(|r| r.iter().map(|v| (-v).ln_1p()).collect()).collect();
        Ok(ConnectivityState { p, ln_p, ln_q, epsilon })
    }

    pub(crate) fn zeros(k: usize, epsilon: Option<f64>) -> Self {
        ConnectivityState {
            p: vec![vec![0.5; k]; k],
            ln_p: vec![vec![0.5f64.ln(); k]; k],
            ln_q: vec![vec![0.5f64.ln(); k]; k],
            epsilon,
        }
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a][b]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.p[a]
    }

    #[inline]
    pub(crate) fn ln_p_row(&self, a: usize) -> &[f64] {
        &self.ln_p[a]
    }

    #[inline]
    pub(crate) fn ln_q_row(&self, a: usize) -> &[f64] {
        &self.ln_q[a]
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub(crate) fn set_epsilon(&mut self, eps: f64) {
        self.epsilon = Some(eps);
    }

    /// Sets `P_ab = P_ba = v`, clamped into the open unit interval.
    pub(crate) fn set(&mut self, a: usize, b: usize, v: f64) {
        let v = v.clamp(f64::MIN_POSITIVE, 1.0f64.next_down());
        let (lp, lq) = (v.ln(), (-v).ln_1p());
        for (x, y) in [(a, b), (b, a)] {
            self.p[x][y] = v;
            self.ln_p[x][y] = lp;
            self.ln_q[x][y] = lq;
        }
    }

    /// Appends a block whose connections to existing blocks are `row` and
    /// whose within-block probability is `diag`.
    pub(crate) fn push_block(&mut self, row: &[f64], diag: f64) {
        let k = self.k();
        debug_assert_eq!(row.len(), k);
        for r in self.p.iter_mut().chain(self.ln_p.iter_mut()).chain(self.ln_q.iter_mut()) {
            r.push(0.5);
        }
        self.p.push(vec![0.5; k + 1]);
        self.ln_p.push(vec![0.0; k + 1]);
        self.ln_q.push(vec![0.0; k + 1]);
        for (b, &v) in row.iter().enumerate() {
            self.set(k, b, v);
        }
        self.set(k, k, diag);
    }

    /// Mirrors a block-label compaction: drops block `removed` and moves the
    /// last block into its slot.
    pub(crate) fn apply_compaction(&mut self, c: Compaction) {
        for m in [&mut self.p, &mut self.ln_p, &mut self.ln_q] {
            m.swap_remove(c.removed);
            for row in m.iter_mut() {
                row.swap_remove(c.removed);
            }
        }
    }

    /// `min_a P_aa`.
    pub fn min_diagonal(&self) -> f64 {
        (0..self.k()).map(|a| self.p[a][a]).fold(f64::INFINITY, f64::min)
    }

    /// `max_{a<b} P_ab`, or `-inf` when `k < 2`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for a in 0..self.k() {
            for b in a + 1..self.k() {
                m = m.max(self.p[a][b]);
            }
        }
        m
    }

    /// Checks `max_{a<b} P_ab < eps < min_a P_aa` for the stored cutoff.
    pub fn check_assortative(&self) -> Result<()> {
        let eps = self
            .epsilon
            .ok_or_else(|| Error::InvariantViolation("no cutoff present".into()))?;
        let (p, q) = (self.min_diagonal(), self.max_off_diagonal());
        if q < eps && eps < p {
            Ok(())
        } else {
            Err(Error::InvariantViolation(format!("need q < eps < p, got q={q}, eps={eps}, p={p}")))
        }
    }

    /// Row-major copy of `P`.
    pub fn flattened(&self) -> Vec<f64> {
        self.p.iter().flatten().copied().collect()
    }
}
