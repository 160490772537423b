#pragma once

#include <cstddef>
#include <vector>

#include "mmfl/matrix.hpp"
#include "mmfl/rng.hpp"

namespace mmfl {

enum class Activation { Identity, Tanh, Relu, Sigmoid, LogSoftmax };

const char* to_string(Activation a);

// Flat, ordered weights-and-biases vector for one network. Layout per layer:
// fan_in x fan_out weight block (row-major), then fan_out biases.
using ParameterSet = std::vector<double>;

struct SgdConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 2;
    std::size_t batch_size = 32;
    double dropout_rate = 0.0;  // applied to the network input in train mode
};

// Fully connected feed-forward network. Parameters live in a single flat
// vector so federated averaging can treat them as plain value arrays.
struct DenseNetwork {
    std::vector<std::size_t> layer_dims;  // layer_count() + 1 widths
    std::vector<Activation> activations;  // one per layer
    double input_dropout = 0.0;
    ParameterSet params;

    std::size_t layer_count() const { return activations.size(); }
    std::size_t input_width() const { return layer_dims.front(); }
    std::size_t output_width() const { return layer_dims.back(); }
};

std::size_t param_count(const std::vector<std::size_t>& layer_dims);

// Validates dims/activations (LogSoftmax only allowed last) and zero-fills params.
DenseNetwork make_network(std::vector<std::size_t> layer_dims, std::vector<Activation> activations,
                          double input_dropout = 0.0);

// Glorot-uniform weights in [-s, s] with s = sqrt(6 / (fan_in + fan_out)); zero biases.
void init_params(DenseNetwork& net, Rng& rng);

struct ForwardCache {
    Matrix input;                       // network input after dropout (if any)
    Matrix dropout_mask;                // empty when dropout was not applied
    std::vector<Matrix> layer_outputs;  // post-activation output of every layer
    std::vector<std::size_t> dims;      // copy of layer_dims, for cache validation
};

struct ForwardResult {
    Matrix output;
    ForwardCache cache;
};

// rng is required only when train_mode is set and net.input_dropout > 0.
ForwardResult forward(const DenseNetwork& net, const Matrix& input, bool train_mode = false,
                      Rng* rng = nullptr);

struct BackwardResult {
    ParameterSet param_grads;
    Matrix input_grad;
};

BackwardResult backward(const DenseNetwork& net, const ForwardCache& cache,
                        const Matrix& upstream_grad);

struct LossResult {
    double value = 0.0;
    Matrix grad;  // w.r.t. the prediction argument
};

// Mean over all entries of the squared difference.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

// Negative mean of log_probs[i, labels[i]].
LossResult nll_loss(const Matrix& log_probs, const std::vector<int>& labels);

// params[i] -= lr * grads[i]
void sgd_step(ParameterSet& params, const ParameterSet& grads, double lr);

// Shuffled minibatch index sets covering [0, n); the last batch may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size, Rng& rng);

}  // namespace mmfl
