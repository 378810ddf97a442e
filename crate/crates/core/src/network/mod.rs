//! BinaryConnect layers and networks built from BSU arrays.
//!
//! Layers couple only through pulse widths: the output pulses of layer `k`
//! are fed unchanged to layer `k + 1`, which requires
//! `t_out(k) == t_in(k + 1)`. Nothing rescales signals between layers; the
//! per-layer saturation rate in [`LayerTrace`] shows when a network runs out
//! of range.

mod weights;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{sample_variation, BinarySynapseUnit, SubthresholdParams, VariationModel, Weight};
use crate::error::{Error, Result};
use crate::neuron::{simulate_neuron, NeuronConfig, NeuronOutput};
use crate::signal::{decode_width, encode_value, Period, PwmSignal};

pub use weights::{load_weights, parse_weights, save_weights, write_weights};

/// Dense `rows x cols` matrix of binary weights, row-major. Row `j` holds the
/// synapses of neuron `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Weight>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Weight>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::config(format!(
                "{} weights for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, w: Weight) -> Self {
        Self {
            rows,
            cols,
            data: vec![w; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::config(format!(
                    "row {j} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for &w in row {
                data.push(Weight::try_from(w)?);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Weight {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Weight] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Weight]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    /// Entries as `+1` / `-1`.
    pub fn to_signs(&self) -> Vec<Vec<i8>> {
        self.iter_rows().map(|r| r.iter().map(|w| w.value()).collect()).collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|w| w.flipped()).collect(),
        }
    }

    /// Reorders rows so that row `k` of the result is row `perm[k]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.rows {
            return Err(Error::domain("permutation length differs from row count"));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for &r in perm {
            if r >= self.rows {
                return Err(Error::domain(format!("row index {r} out of range")));
            }
            data.extend_from_slice(self.row(r));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

/// Deterministic sign binarization; zero maps to `+1`.
pub fn binarize_weights(real: &[Vec<f64>]) -> Result<WeightMatrix> {
    let cols = real.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(real.len() * cols);
    for (j, row) in real.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::domain(format!("ragged matrix at row {j}")));
        }
        for (i, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::domain(format!("non-finite weight at ({j}, {i})")));
            }
            data.push(if x < 0.0 { Weight::Minus } else { Weight::Plus });
        }
    }
    Ok(WeightMatrix {
        rows: real.len(),
        cols,
        data,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub weights: WeightMatrix,
    pub neuron_cfg: NeuronConfig,
    pub device_params: SubthresholdParams,
}

impl LayerSpec {
    pub fn n_inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn n_neurons(&self) -> usize {
        self.weights.rows()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs() == 0 || self.n_neurons() == 0 {
            return Err(Error::config("layer needs at least one input and one neuron"));
        }
        self.neuron_cfg.validate()?;
        self.device_params.validate()
    }

    /// `W_out / t_out` per unit of `sum(w_i W_i / t_in)` with ideal devices.
    pub fn full_scale_gain(&self) -> f64 {
        self.neuron_cfg.full_scale_gain(self.device_params.on_current())
    }
}

/// An instantiated layer: one BSU per weight, with its mismatch realization.
#[derive(Debug, Clone)]
pub struct Layer {
    spec: LayerSpec,
    synapses: Vec<BinarySynapseUnit>,
}

impl Layer {
    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn n_inputs(&self) -> usize {
        self.spec.n_inputs()
    }

    pub fn n_neurons(&self) -> usize {
        self.spec.n_neurons()
    }

    pub fn synapse_count(&self) -> usize {
        self.synapses.len()
    }

    /// The synapse row feeding neuron `j`.
    pub fn synapses(&self, neuron: usize) -> &[BinarySynapseUnit] {
        let n = self.n_inputs();
        &self.synapses[neuron * n..(neuron + 1) * n]
    }
}

/// Instantiates the BSU array of a layer. Without a variation model every
/// multiplier is 1.
pub fn build_layer(spec: LayerSpec, variation: Option<&VariationModel>) -> Result<Layer> {
    spec.validate()?;
    let n = spec.n_neurons() * spec.n_inputs();
    let multipliers = match variation {
        Some(model) => {
            model.validate()?;
            sample_variation(model, n, spec.device_params.slope_norm)
        }
        None => vec![(1.0, 1.0); n],
    };
    let synapses = spec
        .weights
        .data
        .iter()
        .zip(multipliers)
        .map(|(&w, (vp, vm))| BinarySynapseUnit::with_variation(w, vp, vm))
        .collect::<Result<Vec<_>>>()?;
    Ok(Layer { spec, synapses })
}

/// Per-neuron detail of one layer evaluation.
#[derive(Debug, Clone)]
pub struct LayerTrace {
    pub outputs: Vec<NeuronOutput>,
}

impl LayerTrace {
    pub fn pulses(&self) -> Vec<PwmSignal> {
        self.outputs.iter().map(NeuronOutput::output).collect()
    }

    /// Fraction of neurons with at least one clamped rail.
    pub fn saturation_rate(&self) -> f64 {
        if self.outputs.is_empty() {
            return 0.0;
        }
        let n = self.outputs.iter().filter(|o| o.is_unreliable()).count();
        n as f64 / self.outputs.len() as f64
    }
}

pub fn trace_layer(layer: &Layer, inputs: &[PwmSignal]) -> Result<LayerTrace> {
    if inputs.len() != layer.n_inputs() {
        return Err(Error::domain(format!(
            "{} inputs for a layer with {} inputs",
            inputs.len(),
            layer.n_inputs()
        )));
    }
    let spec = &layer.spec;
    let outputs = (0..layer.n_neurons())
        .into_par_iter()
        .map(|j| simulate_neuron(inputs, layer.synapses(j), &spec.device_params, &spec.neuron_cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LayerTrace { outputs })
}

/// Output pulses of every neuron in the layer for a shared input vector.
pub fn forward_layer(layer: &Layer, inputs: &[PwmSignal]) -> Result<Vec<PwmSignal>> {
    Ok(trace_layer(layer, inputs)?.pulses())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("network has no layers"));
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        for (k, pair) in self.layers.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if a.n_neurons() != b.n_inputs() {
                return Err(Error::config(format!(
                    "layer {k} has {} neurons but layer {} takes {} inputs",
                    a.n_neurons(),
                    k + 1,
                    b.n_inputs()
                )));
            }
            let (t_out, t_in) = (a.neuron_cfg.frame.t_out, b.neuron_cfg.frame.t_in);
            if t_out != t_in {
                return Err(Error::config(format!(
                    "layer {k} t_out {t_out} s differs from layer {} t_in {t_in} s",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    /// Builds every layer. Layer `k` draws its mismatch from seed
    /// `variation.seed + k`.
    pub fn build(spec: NetworkSpec, variation: Option<&VariationModel>) -> Result<Self> {
        spec.validate()?;
        let layers = spec
            .layers
            .into_iter()
            .enumerate()
            .map(|(k, ls)| {
                let model = variation.map(|m| VariationModel {
                    seed: m.seed.wrapping_add(k as u64),
                    ..*m
                });
                build_layer(ls, model.as_ref())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].n_inputs()
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().map_or(0, Layer::n_neurons)
    }

    /// Runs the network and keeps every layer's neuron detail.
    pub fn trace(&self, input: &[f64]) -> Result<Vec<LayerTrace>> {
        if input.len() != self.n_inputs() {
            return Err(Error::domain(format!(
                "input has {} values, network takes {}",
                input.len(),
                self.n_inputs()
            )));
        }
        let first = &self.layers[0].spec.neuron_cfg.frame;
        let mut pulses = input
            .iter()
            .map(|&x| encode_value(x, first))
            .collect::<Result<Vec<_>>>()?;
        let mut traces = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let trace = trace_layer(layer, &pulses)?;
            pulses = trace.pulses();
            traces.push(trace);
        }
        Ok(traces)
    }
}

/// Encodes `input`, chains every layer and decodes the final widths against
/// the last layer's `t_out`.
pub fn forward_network(net: &Network, input: &[f64]) -> Result<Vec<f64>> {
    let traces = net.trace(input)?;
    let last = net.layers.last().expect("validated non-empty");
    let frame = &last.spec.neuron_cfg.frame;
    traces
        .last()
        .expect("one trace per layer")
        .outputs
        .iter()
        .map(|o| decode_width(o.output(), frame, Period::Output))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::TimingFrame;

    const NS: f64 = 1e-9;
    const FF: f64 = 1e-15;

    fn ideal_params() -> SubthresholdParams {
        SubthresholdParams {
            ideal_off: true,
            ..Default::default()
        }
    }

    fn spec(weights: WeightMatrix) -> LayerSpec {
        let frame = TimingFrame::symmetric(300.0 * NS).unwrap();
        LayerSpec {
            weights,
            neuron_cfg: NeuronConfig::new(1000.0 * FF, 50.0 * FF, 0.2, 1.0, frame).unwrap(),
            device_params: ideal_params(),
        }
    }

    #[test]
    fn chip_sized_layer() {
        let layer = build_layer(spec(WeightMatrix::filled(10, 100, Weight::Plus)), None).unwrap();
        assert_eq!(layer.synapse_count(), 1000);
        assert_eq!(layer.n_neurons(), 10);
        let single = build_layer(spec(WeightMatrix::filled(1, 1, Weight::Minus)), None).unwrap();
        assert_eq!(single.synapse_count(), 1);
    }

    #[test]
    fn same_seed_same_realization() {
        let model = VariationModel {
            sigma_vth: 0.01,
            jitter_sigma: 0.0,
            seed: 9,
        };
        let s = spec(WeightMatrix::filled(3, 4, Weight::Plus));
        let a = build_layer(s.clone(), Some(&model)).unwrap();
        let b = build_layer(s, Some(&model)).unwrap();
        assert_eq!(a.synapses, b.synapses);
    }

    #[test]
    fn zero_inputs_propagate() {
        let layer = build_layer(spec(WeightMatrix::filled(4, 6, Weight::Plus)), None).unwrap();
        let out = forward_layer(&layer, &[PwmSignal::ZERO; 6]).unwrap();
        assert!(out.iter().all(|p| p.width == 0.0));
    }

    #[test]
    fn one_hot_identical_rows() {
        let layer = build_layer(spec(WeightMatrix::filled(5, 8, Weight::Plus)), None).unwrap();
        let mut inputs = vec![PwmSignal::ZERO; 8];
        inputs[3] = PwmSignal::new(200.0 * NS).unwrap();
        let out = forward_layer(&layer, &inputs).unwrap();
        assert!(out[0].width > 0.0);
        assert!(out.iter().all(|p| p.width == out[0].width));
    }

    #[test]
    fn forward_layer_rejects_bad_inputs() {
        let layer = build_layer(spec(WeightMatrix::filled(2, 3, Weight::Plus)), None).unwrap();
        assert!(forward_layer(&layer, &[PwmSignal::ZERO; 2]).is_err());
        let wide = [PwmSignal::new(400.0 * NS).unwrap(), PwmSignal::ZERO, PwmSignal::ZERO];
        assert!(forward_layer(&layer, &wide).is_err());
    }

    #[test]
    fn binarize_examples() {
        let m = binarize_weights(&[vec![0.3, -0.7]]).unwrap();
        assert_eq!(m.to_signs(), vec![vec![1, -1]]);
        let z = binarize_weights(&[vec![0.0; 3], vec![-0.0; 3]]).unwrap();
        assert!(z.to_signs().iter().flatten().all(|&s| s == 1));
        assert!(binarize_weights(&[vec![f64::NAN]]).is_err());
        assert!(binarize_weights(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn single_weight_network_is_proportional() {
        let s = spec(WeightMatrix::filled(1, 1, Weight::Plus));
        let gain = s.full_scale_gain();
        let net = Network::build(NetworkSpec { layers: vec![s] }, None).unwrap();
        for x in [0.0, 0.25, 0.5, 1.0] {
            let y = forward_network(&net, &[x]).unwrap()[0];
            assert!((y - gain * x).abs() <= 1e-12, "{x} -> {y}");
        }
    }

    #[test]
    fn frame_mismatch_rejected() {
        let a = spec(WeightMatrix::filled(3, 4, Weight::Plus));
        let mut b = spec(WeightMatrix::filled(2, 3, Weight::Plus));
        b.neuron_cfg.frame = TimingFrame::new(200.0 * NS, 300.0 * NS).unwrap();
        let err = Network::build(NetworkSpec { layers: vec![a.clone(), b] }, None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        let c = spec(WeightMatrix::filled(2, 5, Weight::Plus));
        assert!(Network::build(NetworkSpec { layers: vec![a, c] }, None).is_err());
    }

    #[test]
    fn permute_rows_checks_indices() {
        let m = WeightMatrix::from_rows(&[vec![1, -1], vec![-1, -1]]).unwrap();
        let p = m.permute_rows(&[1, 0]).unwrap();
        assert_eq!(p.to_signs(), vec![vec![-1, -1], vec![1, -1]]);
        assert!(m.permute_rows(&[0]).is_err());
        assert!(m.permute_rows(&[0, 2]).is_err());
    }
}
