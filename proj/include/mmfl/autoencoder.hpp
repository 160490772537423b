#pragma once

#include "mmfl/cca.hpp"
#include "mmfl/common.hpp"
#include "mmfl/network.hpp"

namespace mmfl {

// Aligned minibatch: row i of x_a and row i of x_b describe the same event.
struct AlignedBatch {
    Matrix x_a;
    Matrix x_b;
};

enum class AeKind { SplitAe, Dccae };

const char* to_string(AeKind k);
AeKind ae_kind_from_string(const std::string& s);

// The global/local model unit: one encoder/decoder pair per modality, with a
// shared hidden width. Aggregation and freezing operate on these four nets.
struct MultimodalAutoencoder {
    DenseNetwork f_a, g_a, f_b, g_b;
    std::size_t h_size = 0;
    std::size_t input_size_a = 0;
    std::size_t input_size_b = 0;
};

// Default desk-scale architecture: one tanh hidden layer of width
// max(2 * h_size, ceil(input / 2)), identity output layer, mirrored decoder.
MultimodalAutoencoder make_autoencoder(std::size_t input_size_a, std::size_t input_size_b,
                                       std::size_t h_size, Rng& rng);

bool same_architecture(const MultimodalAutoencoder& a, const MultimodalAutoencoder& b);

// Gradients for all four networks; untouched networks get zero-filled grads.
struct ModelGrads {
    ParameterSet f_a, g_a, f_b, g_b;
};

struct AeResult {
    double loss = 0.0;
    ParameterSet f_grads, g_grads;
};

// Plain autoencoder objective: mse(x, g(f(x))).
AeResult ae_loss_and_grads(const DenseNetwork& f, const DenseNetwork& g, const Matrix& x,
                           Rng* rng = nullptr);

struct SplitAeResult {
    double loss = 0.0;
    ModelGrads grads;
};

// Split autoencoder: h = f_in(x_in); loss = mse(x_a, g_a(h)) + mse(x_b, g_b(h)).
// The encoder of the other modality receives an exactly-zero gradient.
SplitAeResult splitae_loss_and_grads(const MultimodalAutoencoder& model,
                                     ModalityTag input_modality, const AlignedBatch& batch,
                                     Rng* rng = nullptr);

struct DccaeResult {
    double loss = 0.0;
    double corr = 0.0;  // canonical correlation term, for reporting
    ModelGrads grads;
};

// Combined objective: lambda * (mse_a + mse_b) - total canonical correlation,
// where each modality reconstructs through its own encoder's representation.
DccaeResult dccae_loss_and_grads(const MultimodalAutoencoder& model, const AlignedBatch& batch,
                                 const DccaeConfig& cfg, Rng* rng = nullptr);

// Inference-mode encoding with the chosen modality's encoder.
Matrix encode(const MultimodalAutoencoder& model, ModalityTag modality, const Matrix& x);

}  // namespace mmfl
