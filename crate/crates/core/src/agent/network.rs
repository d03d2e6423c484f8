//! Dense feed-forward Q-network: ReLU hidden layers, identity output,
//! hand-rolled backprop with plain SGD. Small enough that a matrix library
//! would cost more than these loops.

use super::AgentError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One dense layer; `w` is row-major with `rows` outputs over `cols` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Layer {
    fn zeros(rows: usize, cols: usize) -> Layer {
        Layer {
            rows,
            cols,
            w: vec![0.0; rows * cols],
            b: vec![0.0; rows],
        }
    }

    /// y = Wx + b.
    fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.b.clone();
        for (r, y_r) in y.iter_mut().enumerate() {
            let row = &self.w[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (wi, xi) in row.iter().zip(x) {
                acc += wi * xi;
            }
            *y_r += acc;
        }
        y
    }
}

/// Fully connected network over `layers`; every layer but the last is
/// followed by ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    pub layers: Vec<Layer>,
}

/// Per-layer parameter gradients, same shapes as the network.
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl QNetwork {
    /// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero
    /// biases, drawn in layer order then row-major order from `rng`.
    pub fn init(sizes: &[usize], rng: &mut ChaCha8Rng) -> QNetwork {
        assert!(sizes.len() >= 2, "need at least input and output widths");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (cols, rows) = (pair[0], pair[1]);
            let limit = (6.0 / (cols + rows) as f64).sqrt();
            let w = (0..rows * cols)
                .map(|_| rng.gen_range(-limit..limit))
                .collect();
            layers.push(Layer {
                rows,
                cols,
                w,
                b: vec![0.0; rows],
            });
        }
        QNetwork { layers }
    }

    /// All-zero parameters; handy for exact-arithmetic tests.
    pub fn zeros(sizes: &[usize]) -> QNetwork {
        assert!(sizes.len() >= 2);
        let layers = sizes
            .windows(2)
            .map(|p| Layer::zeros(p[1], p[0]))
            .collect();
        QNetwork { layers }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().unwrap().rows
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, AgentError> {
        if x.len() != self.input_width() {
            return Err(AgentError::WrongInputWidth {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        let mut a = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            a = layer.affine(&a);
            if i != last {
                for v in &mut a {
                    *v = v.max(0.0);
                }
            }
        }
        Ok(a)
    }

    /// Forward pass keeping every post-activation (index 0 is the input),
    /// as needed by backprop.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut a = layer.affine(acts.last().unwrap());
            if i != last {
                for v in &mut a {
                    *v = v.max(0.0);
                }
            }
            acts.push(a);
        }
        acts
    }
}

/// Mean squared error over the batch on the taken actions only, with its
/// parameter gradients. Each example is (state, action index, target value);
/// the loss is mean((q[a] - t)^2) and untaken outputs contribute nothing.
pub fn compute_gradients(
    net: &QNetwork,
    batch: &[([f64; super::N_STATES], usize, f64)],
) -> (f64, Gradients) {
    assert!(!batch.is_empty());
    let mut grads = Gradients {
        layers: net
            .layers
            .iter()
            .map(|l| Layer::zeros(l.rows, l.cols))
            .collect(),
    };
    let inv_b = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    for (state, action, target) in batch {
        let acts = net.forward_trace(state);
        let q = acts.last().unwrap();
        let residual = q[*action] - target;
        loss += residual * residual * inv_b;

        // Output delta: the squared error only touches the taken action.
        let mut delta = vec![0.0; q.len()];
        delta[*action] = 2.0 * residual * inv_b;

        for li in (0..net.layers.len()).rev() {
            let layer = &net.layers[li];
            let input = &acts[li];
            let g = &mut grads.layers[li];
            for (r, &d) in delta.iter().enumerate() {
                g.b[r] += d;
                let row = &mut g.w[r * layer.cols..(r + 1) * layer.cols];
                for (gw, xi) in row.iter_mut().zip(input) {
                    *gw += d * xi;
                }
            }
            if li > 0 {
                // Pull the delta through W, then gate by ReLU: a hidden
                // activation of zero means the unit was clamped.
                let mut prev = vec![0.0; layer.cols];
                for (r, &d) in delta.iter().enumerate() {
                    let row = &layer.w[r * layer.cols..(r + 1) * layer.cols];
                    for (p, wi) in prev.iter_mut().zip(row) {
                        *p += d * wi;
                    }
                }
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }
    (loss, grads)
}

/// Plain gradient descent: p <- p - lr * g.
pub fn apply_sgd(net: &mut QNetwork, grads: &Gradients, learning_rate: f64) {
    for (layer, g) in net.layers.iter_mut().zip(&grads.layers) {
        for (w, gw) in layer.w.iter_mut().zip(&g.w) {
            *w -= learning_rate * gw;
        }
        for (b, gb) in layer.b.iter_mut().zip(&g.b) {
            *b -= learning_rate * gb;
        }
    }
}

/// One SGD step on a prepared batch; returns the pre-update loss.
pub fn train_on_batch(
    net: &mut QNetwork,
    batch: &[([f64; super::N_STATES], usize, f64)],
    learning_rate: f64,
) -> f64 {
    let (loss, grads) = compute_gradients(net, batch);
    apply_sgd(net, &grads, learning_rate);
    loss
}
