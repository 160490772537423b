#include "mmfl/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmfl {

const char* to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::LogSoftmax: return "log_softmax";
    }
    return "?";
}

std::size_t param_count(const std::vector<std::size_t>& layer_dims) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l)
        n += layer_dims[l] * layer_dims[l + 1] + layer_dims[l + 1];
    return n;
}

DenseNetwork make_network(std::vector<std::size_t> layer_dims, std::vector<Activation> activations,
                          double input_dropout) {
    if (layer_dims.size() < 2) throw ConfigError("network needs at least one layer");
    if (activations.size() != layer_dims.size() - 1)
        throw ConfigError("activation list length must equal layer count");
    for (std::size_t l = 0; l + 1 < activations.size(); ++l)
        if (activations[l] == Activation::LogSoftmax)
            throw ConfigError("log_softmax is allowed only as the final activation");
    if (input_dropout < 0.0 || input_dropout >= 1.0)
        throw ConfigError("dropout rate must lie in [0, 1)");

    DenseNetwork net;
    net.layer_dims = std::move(layer_dims);
    net.activations = std::move(activations);
    net.input_dropout = input_dropout;
    net.params.assign(param_count(net.layer_dims), 0.0);
    return net;
}

void init_params(DenseNetwork& net, Rng& rng) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        std::size_t fan_in = net.layer_dims[l];
        std::size_t fan_out = net.layer_dims[l + 1];
        double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < fan_in * fan_out; ++i) net.params[off++] = rng.uniform(-s, s);
        for (std::size_t i = 0; i < fan_out; ++i) net.params[off++] = 0.0;
    }
}

namespace {

struct LayerView {
    const double* weights;  // fan_in x fan_out, row-major
    const double* biases;   // fan_out
};

LayerView layer_view(const DenseNetwork& net, std::size_t layer) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l)
        off += net.layer_dims[l] * net.layer_dims[l + 1] + net.layer_dims[l + 1];
    const double* w = net.params.data() + off;
    const double* b = w + net.layer_dims[layer] * net.layer_dims[layer + 1];
    return {w, b};
}

// out = x * W + b, with x (n x fan_in), W (fan_in x fan_out).
Matrix affine(const Matrix& x, LayerView lv, std::size_t fan_in, std::size_t fan_out) {
    Matrix out(x.rows, fan_out);
    for (std::size_t i = 0; i < x.rows; ++i) {
        double* oi = out.data.data() + i * fan_out;
        for (std::size_t j = 0; j < fan_out; ++j) oi[j] = lv.biases[j];
        const double* xi = x.data.data() + i * fan_in;
        for (std::size_t k = 0; k < fan_in; ++k) {
            double xik = xi[k];
            if (xik == 0.0) continue;
            const double* wk = lv.weights + k * fan_out;
            for (std::size_t j = 0; j < fan_out; ++j) oi[j] += xik * wk[j];
        }
    }
    return out;
}

void apply_activation(Matrix& z, Activation act) {
    switch (act) {
        case Activation::Identity:
            break;
        case Activation::Tanh:
            for (double& v : z.data) v = std::tanh(v);
            break;
        case Activation::Relu:
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::Sigmoid:
            for (double& v : z.data) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::LogSoftmax:
            for (std::size_t i = 0; i < z.rows; ++i) {
                double* row = z.data.data() + i * z.cols;
                double m = *std::max_element(row, row + z.cols);
                double sum = 0.0;
                for (std::size_t j = 0; j < z.cols; ++j) sum += std::exp(row[j] - m);
                double lse = m + std::log(sum);
                for (std::size_t j = 0; j < z.cols; ++j) row[j] -= lse;
            }
            break;
    }
}

// delta = upstream .* act'(output), computed from the post-activation values.
Matrix activation_backward(const Matrix& upstream, const Matrix& output, Activation act) {
    Matrix delta = upstream;
    switch (act) {
        case Activation::Identity:
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                delta.data[i] *= 1.0 - output.data[i] * output.data[i];
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                if (output.data[i] <= 0.0) delta.data[i] = 0.0;
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                delta.data[i] *= output.data[i] * (1.0 - output.data[i]);
            break;
        case Activation::LogSoftmax:
            // dL/dz = g - softmax(z) * rowsum(g)
            for (std::size_t i = 0; i < delta.rows; ++i) {
                double gsum = 0.0;
                for (std::size_t j = 0; j < delta.cols; ++j) gsum += upstream(i, j);
                for (std::size_t j = 0; j < delta.cols; ++j)
                    delta(i, j) = upstream(i, j) - std::exp(output(i, j)) * gsum;
            }
            break;
    }
    return delta;
}

}  // namespace

ForwardResult forward(const DenseNetwork& net, const Matrix& input, bool train_mode, Rng* rng) {
    if (input.cols != net.input_width())
        throw ConfigError("forward: input has " + std::to_string(input.cols) +
                          " columns, network expects " + std::to_string(net.input_width()));

    ForwardResult res;
    res.cache.dims = net.layer_dims;
    res.cache.input = input;

    if (train_mode && net.input_dropout > 0.0) {
        if (rng == nullptr) throw UsageError("forward: dropout in train mode requires an rng");
        double keep = 1.0 - net.input_dropout;
        res.cache.dropout_mask = Matrix(input.rows, input.cols);
        for (std::size_t i = 0; i < input.data.size(); ++i) {
            // Inverted scaling: kept activations are divided by the keep
            // probability so inference needs no rescaling.
            double m = rng->uniform() < keep ? 1.0 / keep : 0.0;
            res.cache.dropout_mask.data[i] = m;
            res.cache.input.data[i] = input.data[i] * m;
        }
    }

    Matrix x = res.cache.input;
    res.cache.layer_outputs.reserve(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        LayerView lv = layer_view(net, l);
        Matrix z = affine(x, lv, net.layer_dims[l], net.layer_dims[l + 1]);
        apply_activation(z, net.activations[l]);
        res.cache.layer_outputs.push_back(z);
        x = std::move(z);
    }
    ensure_finite(x, "forward");
    res.output = std::move(x);
    return res;
}

BackwardResult backward(const DenseNetwork& net, const ForwardCache& cache,
                        const Matrix& upstream_grad) {
    if (cache.dims != net.layer_dims || cache.layer_outputs.size() != net.layer_count())
        throw UsageError("backward: cache does not match this network");
    const Matrix& last = cache.layer_outputs.back();
    if (!upstream_grad.same_shape(last))
        throw UsageError("backward: upstream gradient shape does not match network output");

    BackwardResult res;
    res.param_grads.assign(net.params.size(), 0.0);

    Matrix upstream = upstream_grad;
    std::size_t off_end = net.params.size();
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        std::size_t fan_in = net.layer_dims[l];
        std::size_t fan_out = net.layer_dims[l + 1];
        std::size_t block = fan_in * fan_out + fan_out;
        off_end -= block;

        Matrix delta = activation_backward(upstream, cache.layer_outputs[l], net.activations[l]);
        const Matrix& x = l == 0 ? cache.input : cache.layer_outputs[l - 1];

        double* wg = res.param_grads.data() + off_end;
        double* bg = wg + fan_in * fan_out;
        for (std::size_t i = 0; i < delta.rows; ++i) {
            const double* di = delta.data.data() + i * fan_out;
            const double* xi = x.data.data() + i * fan_in;
            for (std::size_t k = 0; k < fan_in; ++k) {
                double xik = xi[k];
                if (xik == 0.0) continue;
                double* wgk = wg + k * fan_out;
                for (std::size_t j = 0; j < fan_out; ++j) wgk[j] += xik * di[j];
            }
            for (std::size_t j = 0; j < fan_out; ++j) bg[j] += di[j];
        }

        // Propagate to the layer input: delta * W^T.
        LayerView lv = layer_view(net, l);
        Matrix prev(delta.rows, fan_in);
        for (std::size_t i = 0; i < delta.rows; ++i) {
            const double* di = delta.data.data() + i * fan_out;
            double* pi = prev.data.data() + i * fan_in;
            for (std::size_t k = 0; k < fan_in; ++k) {
                const double* wk = lv.weights + k * fan_out;
                double s = 0.0;
                for (std::size_t j = 0; j < fan_out; ++j) s += di[j] * wk[j];
                pi[k] = s;
            }
        }
        upstream = std::move(prev);
    }

    if (!cache.dropout_mask.empty())
        for (std::size_t i = 0; i < upstream.data.size(); ++i)
            upstream.data[i] *= cache.dropout_mask.data[i];
    res.input_grad = std::move(upstream);
    return res;
}

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw UsageError("mse_loss: shape mismatch");
    LossResult res;
    res.grad = Matrix(pred.rows, pred.cols);
    double n = static_cast<double>(pred.rows * pred.cols);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = pred.data[i] - target.data[i];
        res.value += d * d;
        res.grad.data[i] = 2.0 * d / n;
    }
    res.value /= n;
    return res;
}

LossResult nll_loss(const Matrix& log_probs, const std::vector<int>& labels) {
    if (log_probs.rows != labels.size())
        throw UsageError("nll_loss: row count does not match label count");
    LossResult res;
    res.grad = Matrix(log_probs.rows, log_probs.cols);
    double n = static_cast<double>(log_probs.rows);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= log_probs.cols)
            throw DataError("nll_loss: label " + std::to_string(y) + " out of range [0, " +
                            std::to_string(log_probs.cols) + ") at row " + std::to_string(i));
        res.value -= log_probs(i, static_cast<std::size_t>(y));
        res.grad(i, static_cast<std::size_t>(y)) = -1.0 / n;
    }
    res.value /= n;
    return res;
}

void sgd_step(ParameterSet& params, const ParameterSet& grads, double lr) {
    if (params.size() != grads.size()) throw UsageError("sgd_step: length mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   Rng& rng) {
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < n; start += batch_size) {
        std::size_t len = std::min(batch_size, n - start);
        batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(start),
                             idx.begin() + static_cast<std::ptrdiff_t>(start + len));
    }
    return batches;
}

}  // namespace mmfl
