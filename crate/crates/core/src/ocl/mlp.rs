use crate::error::{Error, Result};
use crate::rng::Rng;

/// Dense layer `y = W x + b`, `W` stored row-major as `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub input: usize,
    pub output: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn new(input: usize, output: usize, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if input == 0 || output == 0 {
            return Err(Error::invalid("layer widths must be at least 1"));
        }
        if weight.len() != input * output || bias.len() != output {
            return Err(Error::invalid(format!(
                "layer {input}->{output} needs {} weights and {output} biases",
                input * output
            )));
        }
        Ok(Self {
            input,
            output,
            weight,
            bias,
        })
    }

    /// He-style Gaussian init, zero bias.
    pub fn random(input: usize, output: usize, rng: &mut Rng) -> Self {
        let scale = (2.0 / input as f64).sqrt();
        let weight = (0..input * output)
            .map(|_| scale * rng.gaussian())
            .collect();
        Self {
            input,
            output,
            weight,
            bias: vec![0.0; output],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut weight = vec![0.0; dim * dim];
        for i in 0..dim {
            weight[i * dim + i] = 1.0;
        }
        Self {
            input: dim,
            output: dim,
            weight,
            bias: vec![0.0; dim],
        }
    }

    pub fn forward_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bias.iter().enumerate().map(|(o, b)| {
            let w = &self.weight[o * self.input..(o + 1) * self.input];
            b + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
        }));
    }
}

/// Layers with `max(0, ·)` between them (not after the last).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Linear>,
}

impl Mlp {
    pub fn new(layers: Vec<Linear>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("an MLP needs at least one layer"));
        }
        for w in layers.windows(2) {
            if w[0].output != w[1].input {
                return Err(Error::invalid(format!(
                    "layer widths {} and {} do not chain",
                    w[0].output, w[1].input
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn random(widths: &[usize], rng: &mut Rng) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::invalid(format!("bad MLP widths {widths:?}")));
        }
        Self::new(
            widths
                .windows(2)
                .map(|w| Linear::random(w[0], w[1], rng))
                .collect(),
        )
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output
    }

    pub fn layers(&self) -> &[Linear] {
        &self.layers
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            layer.forward_into(&cur, &mut next);
            if k < last {
                for v in &mut next {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }
}
