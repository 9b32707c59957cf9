#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace repad {

/// Recurrent cell families supported by the online trainer. All three share
/// the same scalar-in / scalar-out topology: one recurrent hidden layer and
/// a linear readout.
enum class CellKind {
    VanillaRnn,
    Lstm,
    Gru,
};

const char* to_string(CellKind kind);

/// Number of gated affine blocks per cell: 1 (vanilla), 4 (LSTM), 3 (GRU).
std::size_t gate_count(CellKind kind);

/// One affine block feeding a gate or candidate activation:
///   a = w_in * x + W_rec * h_prev + bias
struct GateBlock {
    std::vector<double> w_in;   // [hidden]
    std::vector<double> w_rec;  // [hidden * hidden], row-major
    std::vector<double> bias;   // [hidden]
};

/// Full parameter set of one network. Gate order is fixed:
///   VanillaRnn: {cell}
///   Lstm:       {input, forget, cell candidate, output}
///   Gru:        {update, reset, candidate}
struct CellParameters {
    CellKind kind = CellKind::Lstm;
    std::size_t hidden_dim = 0;
    std::vector<GateBlock> gates;
    std::vector<double> w_out;  // [hidden]
    double b_out = 0.0;
};

/// Gradients share the parameter layout.
using CellGradients = CellParameters;

struct TrainingConfig {
    int epochs = 50;
    double learning_rate = 0.005;
    std::uint32_t seed = 140;
    std::size_t hidden_dim = 10;
};

/// Affine input scaling fitted per training window: shift by the window
/// mean, divide by the window's population standard deviation (floored at
/// 1e-8 so constant windows stay finite).
struct WindowNormalizer {
    double shift = 0.0;
    double scale = 1.0;

    double normalize(double x) const { return (x - shift) / scale; }
    double denormalize(double y) const { return y * scale + shift; }

    static WindowNormalizer fit(std::span<const double> window);
};

/// Seeded weight initialization. Deterministic: the generator is a mt19937
/// consumed in a fixed order (gates in declaration order; within a gate
/// w_in, then w_rec row-major; biases are zero and consume no draws; then
/// w_out; b_out is zero). Weights are uniform in (-L, L) with
/// L = sqrt(6 / (fan_in + fan_out)); identical arguments reproduce
/// bit-identical parameters on any platform.
CellParameters init_parameters(CellKind kind, std::size_t hidden_dim,
                               std::uint32_t seed);

/// Total scalar parameter count (weights + biases + readout).
std::size_t parameter_count(const CellParameters& params);

struct ForwardResult {
    std::vector<double> outputs;      // one scalar per input step
    std::vector<double> final_hidden; // hidden state after the last step
    std::vector<double> final_cell;   // LSTM only; empty otherwise
};

/// Runs the sequence through the cell. Hidden activation is tanh, gate
/// activations are logistic sigmoid; the readout is linear.
ForwardResult forward(const CellParameters& params,
                      std::span<const double> inputs);

/// Mean-squared one-step prediction error of the teacher-forced sequence.
double sequence_loss(const CellParameters& params,
                     std::span<const double> inputs,
                     std::span<const double> targets);

/// Exact gradients of sequence_loss via backpropagation through time over
/// the whole sequence. No clipping is applied here.
CellGradients gradients(const CellParameters& params,
                        std::span<const double> inputs,
                        std::span<const double> targets);

struct TrainedModel {
    CellParameters params;
    WindowNormalizer normalizer;
};

/// Trains a fresh network on one look-back window: the window is normalized,
/// then the sequence inputs window[0..n-2] / targets window[1..n-1] are fit
/// with exactly cfg.epochs full-batch gradient steps (gradient elements
/// clipped to |g| <= 5 before each update). Deterministic for fixed inputs.
TrainedModel train_window(CellKind kind, std::span<const double> window,
                          const TrainingConfig& cfg);

/// Feeds the normalized window through the network and denormalizes the
/// final output: the forecast for the point following the window.
double predict_next(const CellParameters& params, const WindowNormalizer& norm,
                    std::span<const double> window);

}  // namespace repad
