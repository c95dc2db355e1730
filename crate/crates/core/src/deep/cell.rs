//! Single recurrent steps and their reverse-mode derivatives.
//!
//! Parameters of one direction are a flat slice holding, gate after gate,
//! the row-major `hidden x (hidden + input)` matrix acting on
//! `[h_{t-1}, x_t]` followed by the bias.

use serde::{Deserialize, Serialize};

use super::Activation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Simple,
    Lstm,
    Gru,
}

impl CellKind {
    pub fn gates(&self) -> usize {
        match self {
            CellKind::Simple => 1,
            CellKind::Lstm => 4,
            CellKind::Gru => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CellKind::Simple => "simple",
            CellKind::Lstm => "lstm",
            CellKind::Gru => "gru",
        }
    }
}

// LSTM gate order
const F: usize = 0;
const I: usize = 1;
const G: usize = 2;
const O: usize = 3;
// GRU gate order
const Z: usize = 0;
const R: usize = 1;
const N: usize = 2;

pub(crate) fn gate_len(hidden: usize, input: usize) -> usize {
    hidden * (hidden + input) + hidden
}

pub(crate) fn cell_len(kind: CellKind, hidden: usize, input: usize) -> usize {
    kind.gates() * gate_len(hidden, input)
}

/// Owned parameters of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub kind: CellKind,
    pub hidden: usize,
    pub input: usize,
    /// Gates in order (LSTM: f, i, candidate, o; GRU: z, r, candidate).
    pub data: Vec<f64>,
}

impl CellParams {
    pub fn zeros(kind: CellKind, hidden: usize, input: usize) -> Self {
        Self { kind, hidden, input, data: vec![0.0; cell_len(kind, hidden, input)] }
    }

    /// Builds from per-gate `(W, b)`, `W` row-major over `[h, x]`.
    pub fn from_gates(kind: CellKind, hidden: usize, input: usize, gates: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        if gates.len() != kind.gates() {
            return Err(Error::Shape(format!("{} cell takes {} gates, got {}", kind.name(), kind.gates(), gates.len())));
        }
        let mut data = Vec::with_capacity(cell_len(kind, hidden, input));
        for (w, b) in gates {
            if w.len() != hidden * (hidden + input) || b.len() != hidden {
                return Err(Error::Shape(format!("gate shapes must be {hidden}x{} and {hidden}", hidden + input)));
            }
            data.extend(w);
            data.extend(b);
        }
        Ok(Self { kind, hidden, input, data })
    }

    pub fn bias_mut(&mut self, gate: usize) -> &mut [f64] {
        let len = gate_len(self.hidden, self.input);
        let start = gate * len + self.hidden * (self.hidden + self.input);
        &mut self.data[start..(gate + 1) * len]
    }

    pub(crate) fn view(&self, act: Activation) -> Cell<'_> {
        Cell { kind: self.kind, hidden: self.hidden, input: self.input, p: &self.data, act }
    }
}

/// Borrowed parameters of one direction.
#[derive(Clone, Copy)]
pub(crate) struct Cell<'a> {
    pub kind: CellKind,
    pub hidden: usize,
    pub input: usize,
    pub p: &'a [f64],
    pub act: Activation,
}

/// Everything a step needs to be differentiated.
#[derive(Debug, Clone)]
pub(crate) struct StepCache {
    /// `[h_{t-1}, x_t]`
    u: Vec<f64>,
    /// GRU candidate input `[r * h_{t-1}, x_t]`.
    u_reset: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

fn sigmoid(a: f64) -> f64 {
    Activation::Sigmoid.apply(a)
}

impl<'a> Cell<'a> {
    fn gate(&self, g: usize) -> (&'a [f64], &'a [f64]) {
        let len = gate_len(self.hidden, self.input);
        let block = &self.p[g * len..(g + 1) * len];
        block.split_at(self.hidden * (self.hidden + self.input))
    }

    fn affine(&self, g: usize, u: &[f64]) -> Vec<f64> {
        let (w, b) = self.gate(g);
        let cols = u.len();
        (0..self.hidden)
            .map(|r| b[r] + w[r * cols..(r + 1) * cols].iter().zip(u).map(|(a, x)| a * x).sum::<f64>())
            .collect()
    }

    pub fn check(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<()> {
        let c_len = if self.kind == CellKind::Lstm { self.hidden } else { 0 };
        if x.len() != self.input || h_prev.len() != self.hidden || c_prev.len() != c_len {
            return Err(Error::Shape(format!(
                "{} step with hidden {} and input {} got x {}, h {}, c {}",
                self.kind.name(),
                self.hidden,
                self.input,
                x.len(),
                h_prev.len(),
                c_prev.len()
            )));
        }
        if self.p.len() != cell_len(self.kind, self.hidden, self.input) {
            return Err(Error::Shape("parameter block has the wrong length".into()));
        }
        Ok(())
    }

    pub fn initial_c(&self) -> Vec<f64> {
        if self.kind == CellKind::Lstm {
            vec![0.0; self.hidden]
        } else {
            Vec::new()
        }
    }

    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
        let mut u = h_prev.to_vec();
        u.extend_from_slice(x);
        let hn = self.hidden;
        match self.kind {
            CellKind::Simple => {
                let a = self.affine(0, &u);
                let h: Vec<f64> = a.iter().map(|v| self.act.apply(*v)).collect();
                StepCache {
                    u,
                    u_reset: Vec::new(),
                    h_prev: h_prev.to_vec(),
                    c_prev: Vec::new(),
                    post: vec![h.clone()],
                    pre: vec![a],
                    h,
                    c: Vec::new(),
                }
            }
            CellKind::Lstm => {
                let pre: Vec<Vec<f64>> = (0..4).map(|g| self.affine(g, &u)).collect();
                let post: Vec<Vec<f64>> = pre
                    .iter()
                    .enumerate()
                    .map(|(g, a)| {
                        a.iter().map(|v| if g == G { self.act.apply(*v) } else { sigmoid(*v) }).collect()
                    })
                    .collect();
                let c: Vec<f64> =
                    (0..hn).map(|k| post[F][k] * c_prev[k] + post[I][k] * post[G][k]).collect();
                let h = (0..hn).map(|k| post[O][k] * self.act.apply(c[k])).collect();
                StepCache {
                    u,
                    u_reset: Vec::new(),
                    h_prev: h_prev.to_vec(),
                    c_prev: c_prev.to_vec(),
                    pre,
                    post,
                    h,
                    c,
                }
            }
            CellKind::Gru => {
                let az = self.affine(Z, &u);
                let ar = self.affine(R, &u);
                let z: Vec<f64> = az.iter().map(|v| sigmoid(*v)).collect();
                let r: Vec<f64> = ar.iter().map(|v| sigmoid(*v)).collect();
                let mut u_reset: Vec<f64> = (0..hn).map(|k| r[k] * h_prev[k]).collect();
                u_reset.extend_from_slice(x);
                let an = self.affine(N, &u_reset);
                let n: Vec<f64> = an.iter().map(|v| self.act.apply(*v)).collect();
                let h = (0..hn).map(|k| (1.0 - z[k]) * h_prev[k] + z[k] * n[k]).collect();
                StepCache {
                    u,
                    u_reset,
                    h_prev: h_prev.to_vec(),
                    c_prev: Vec::new(),
                    pre: vec![az, ar, an],
                    post: vec![z, r, n],
                    h,
                    c: Vec::new(),
                }
            }
        }
    }

    /// Accumulates `W' da` and `da u'` for one gate; returns `W' da`.
    fn gate_backward(&self, g: usize, da: &[f64], u: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let (w, _) = self.gate(g);
        let cols = u.len();
        let len = gate_len(self.hidden, self.input);
        let (gw, gb) = grad[g * len..(g + 1) * len].split_at_mut(self.hidden * cols);
        let mut du = vec![0.0; cols];
        for r in 0..self.hidden {
            if da[r] == 0.0 {
                continue;
            }
            gb[r] += da[r];
            for c in 0..cols {
                gw[r * cols + c] += da[r] * u[c];
                du[c] += w[r * cols + c] * da[r];
            }
        }
        du
    }

    /// Propagates `dL/dh_t` and `dL/dC_t` to the previous state, adding the
    /// parameter gradient into `grad` (same layout as the parameters).
    pub fn backward(&self, cache: &StepCache, dh: &[f64], dc: &[f64], grad: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
        let hn = self.hidden;
        let act = self.act;
        match self.kind {
            CellKind::Simple => {
                let da: Vec<f64> = (0..hn).map(|k| dh[k] * act.derivative(cache.pre[0][k])).collect();
                let du = self.gate_backward(0, &da, &cache.u, grad);
                (du[..hn].to_vec(), Vec::new())
            }
            CellKind::Lstm => {
                let p = &cache.post;
                let mut dc_total = vec![0.0; hn];
                let mut da = vec![vec![0.0; hn]; 4];
                let mut dc_prev = vec![0.0; hn];
                for k in 0..hn {
                    let ac = act.apply(cache.c[k]);
                    dc_total[k] = dc[k] + dh[k] * p[O][k] * act.derivative(cache.c[k]);
                    da[O][k] = dh[k] * ac * p[O][k] * (1.0 - p[O][k]);
                    da[F][k] = dc_total[k] * cache.c_prev[k] * p[F][k] * (1.0 - p[F][k]);
                    da[I][k] = dc_total[k] * p[G][k] * p[I][k] * (1.0 - p[I][k]);
                    da[G][k] = dc_total[k] * p[I][k] * act.derivative(cache.pre[G][k]);
                    dc_prev[k] = dc_total[k] * p[F][k];
                }
                let mut dh_prev = vec![0.0; hn];
                for (g, d) in da.iter().enumerate() {
                    let du = self.gate_backward(g, d, &cache.u, grad);
                    for k in 0..hn {
                        dh_prev[k] += du[k];
                    }
                }
                (dh_prev, dc_prev)
            }
            CellKind::Gru => {
                let (z, r, n) = (&cache.post[Z], &cache.post[R], &cache.post[N]);
                let mut dh_prev: Vec<f64> = (0..hn).map(|k| dh[k] * (1.0 - z[k])).collect();
                let da_z: Vec<f64> =
                    (0..hn).map(|k| dh[k] * (n[k] - cache.h_prev[k]) * z[k] * (1.0 - z[k])).collect();
                let da_n: Vec<f64> = (0..hn).map(|k| dh[k] * z[k] * act.derivative(cache.pre[N][k])).collect();
                let du_reset = self.gate_backward(N, &da_n, &cache.u_reset, grad);
                let da_r: Vec<f64> =
                    (0..hn).map(|k| du_reset[k] * cache.h_prev[k] * r[k] * (1.0 - r[k])).collect();
                for k in 0..hn {
                    dh_prev[k] += du_reset[k] * r[k];
                }
                let du_z = self.gate_backward(Z, &da_z, &cache.u, grad);
                let du_r = self.gate_backward(R, &da_r, &cache.u, grad);
                for k in 0..hn {
                    dh_prev[k] += du_z[k] + du_r[k];
                }
                (dh_prev, Vec::new())
            }
        }
    }
}

/// One LSTM step; returns `(h_t, C_t)`.
pub fn lstm_step(x: &[f64], h_prev: &[f64], c_prev: &[f64], params: &CellParams) -> Result<(Vec<f64>, Vec<f64>)> {
    expect_kind(params, CellKind::Lstm)?;
    let cell = params.view(Activation::Tanh);
    cell.check(x, h_prev, c_prev)?;
    let s = cell.step(x, h_prev, c_prev);
    Ok((s.h, s.c))
}

/// One GRU step; returns `h_t`.
pub fn gru_step(x: &[f64], h_prev: &[f64], params: &CellParams) -> Result<Vec<f64>> {
    expect_kind(params, CellKind::Gru)?;
    let cell = params.view(Activation::Tanh);
    cell.check(x, h_prev, &[])?;
    Ok(cell.step(x, h_prev, &[]).h)
}

/// One step of `h_t = act(W [h_{t-1}, x_t] + b)`.
pub fn simple_step(x: &[f64], h_prev: &[f64], params: &CellParams, activation: Activation) -> Result<Vec<f64>> {
    expect_kind(params, CellKind::Simple)?;
    let cell = params.view(activation);
    cell.check(x, h_prev, &[])?;
    Ok(cell.step(x, h_prev, &[]).h)
}

fn expect_kind(params: &CellParams, kind: CellKind) -> Result<()> {
    if params.kind != kind {
        return Err(Error::StateKind { expected: kind.name(), found: params.kind.name() });
    }
    Ok(())
}
