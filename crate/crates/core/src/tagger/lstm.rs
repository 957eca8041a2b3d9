//! A single-layer unidirectional LSTM with explicit backpropagation.
//!
//! Gates are packed as rows `[input; forget; cell; output]` of one
//! `4H × (I + H)` matrix applied to `[x_t; h_{t-1}]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{axpy, dot};

#[derive(Debug, Clone, PartialEq)]
pub struct Lstm {
    pub input: usize,
    pub hidden: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Per-step values kept for the backward pass.
#[derive(Debug, Clone)]
struct Step {
    xh: Vec<f64>,
    gates: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct LstmTrace {
    steps: Vec<Step>,
}

impl Lstm {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Lstm {
            input,
            hidden,
            weights: vec![0.0; 4 * hidden * (input + hidden)],
            bias: vec![0.0; 4 * hidden],
        }
    }

    fn width(&self) -> usize {
        self.input + self.hidden
    }

    /// Hidden states for each input, in input order.
    pub fn forward<'a, I>(&self, inputs: I) -> (Vec<Vec<f64>>, LstmTrace)
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let h_size = self.hidden;
        let width = self.width();
        let inputs: Vec<&[f64]> = inputs.into_iter().collect();
        // Input projections for every step at once, so each weight row is
        // read once per sequence rather than once per step.
        let mut pre = vec![vec![0.0; 4 * h_size]; inputs.len()];
        for r in 0..4 * h_size {
            let row = &self.weights[r * width..r * width + self.input];
            for (p, x) in pre.iter_mut().zip(&inputs) {
                debug_assert_eq!(x.len(), self.input);
                p[r] = dot(row, x) + self.bias[r];
            }
        }
        let mut h = vec![0.0; h_size];
        let mut c = vec![0.0; h_size];
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut steps = Vec::with_capacity(inputs.len());
        for (x, mut gates) in inputs.iter().zip(pre) {
            for (r, g) in gates.iter_mut().enumerate() {
                let z = *g + dot(&self.weights[r * width + self.input..(r + 1) * width], &h);
                *g = if r / h_size == 2 {
                    libm::tanh(z)
                } else {
                    sigmoid(z)
                };
            }
            let mut xh = Vec::with_capacity(width);
            xh.extend_from_slice(x);
            xh.extend_from_slice(&h);
            let c_prev = c.clone();
            let mut tanh_c = vec![0.0; h_size];
            for k in 0..h_size {
                let (i, f, g, o) = (
                    gates[k],
                    gates[h_size + k],
                    gates[2 * h_size + k],
                    gates[3 * h_size + k],
                );
                c[k] = f * c_prev[k] + i * g;
                tanh_c[k] = libm::tanh(c[k]);
                h[k] = o * tanh_c[k];
            }
            outputs.push(h.clone());
            steps.push(Step {
                xh,
                gates,
                c_prev,
                tanh_c,
            });
        }
        (outputs, LstmTrace { steps })
    }

    /// Accumulates parameter gradients into `grad` and returns the gradient
    /// with respect to each input. `d_outputs[t]` is the loss gradient of
    /// output `t`.
    pub fn backward(
        &self,
        trace: &LstmTrace,
        d_outputs: &[Vec<f64>],
        grad: &mut Lstm,
    ) -> Vec<Vec<f64>> {
        let h_size = self.hidden;
        let width = self.width();
        let n = trace.steps.len();
        debug_assert_eq!(d_outputs.len(), n);
        let mut dh_next = vec![0.0; h_size];
        let mut dc_next = vec![0.0; h_size];
        let mut dzs = vec![vec![0.0; 4 * h_size]; n];
        for t in (0..n).rev() {
            let step = &trace.steps[t];
            let g = &step.gates;
            let dz = &mut dzs[t];
            for k in 0..h_size {
                let dh = d_outputs[t][k] + dh_next[k];
                let (i, f, gg, o) = (g[k], g[h_size + k], g[2 * h_size + k], g[3 * h_size + k]);
                let tc = step.tanh_c[k];
                let dc = dc_next[k] + dh * o * (1.0 - tc * tc);
                dz[k] = dc * gg * i * (1.0 - i);
                dz[h_size + k] = dc * step.c_prev[k] * f * (1.0 - f);
                dz[2 * h_size + k] = dc * i * (1.0 - gg * gg);
                dz[3 * h_size + k] = dh * tc * o * (1.0 - o);
                dc_next[k] = dc * f;
            }
            dh_next.fill(0.0);
            for (r, &d) in dz.iter().enumerate() {
                if d != 0.0 {
                    axpy(
                        d,
                        &self.weights[r * width + self.input..(r + 1) * width],
                        &mut dh_next,
                    );
                }
            }
        }
        // Weight gradients and input gradients, one pass over the rows.
        let mut d_inputs = vec![vec![0.0; self.input]; n];
        let rows = self
            .weights
            .chunks_exact(width)
            .zip(grad.weights.chunks_exact_mut(width));
        for (r, (w_row, g_row)) in rows.enumerate() {
            let w_row = &w_row[..self.input];
            for ((dz, step), d_input) in dzs.iter().zip(&trace.steps).zip(&mut d_inputs) {
                let d = dz[r];
                if d == 0.0 {
                    continue;
                }
                axpy(d, &step.xh, g_row);
                axpy(d, w_row, d_input);
                grad.bias[r] += d;
            }
        }
        d_inputs
    }
}
