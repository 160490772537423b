#include "mmfl/autoencoder.hpp"

namespace mmfl {

const char* to_string(AeKind k) {
    return k == AeKind::SplitAe ? "splitae" : "dccae";
}

AeKind ae_kind_from_string(const std::string& s) {
    if (s == "splitae") return AeKind::SplitAe;
    if (s == "dccae") return AeKind::Dccae;
    throw ConfigError("unknown autoencoder kind '" + s + "' (expected splitae or dccae)");
}

namespace {

std::size_t hidden_width(std::size_t input_size, std::size_t h_size) {
    return std::max(2 * h_size, (input_size + 1) / 2);
}

DenseNetwork make_coder(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng) {
    DenseNetwork net = make_network({in, hidden, out}, {Activation::Tanh, Activation::Identity});
    init_params(net, rng);
    return net;
}

}  // namespace

MultimodalAutoencoder make_autoencoder(std::size_t input_size_a, std::size_t input_size_b,
                                       std::size_t h_size, Rng& rng) {
    if (h_size == 0) throw ConfigError("h_size must be positive");
    MultimodalAutoencoder m;
    m.h_size = h_size;
    m.input_size_a = input_size_a;
    m.input_size_b = input_size_b;
    std::size_t ha = hidden_width(input_size_a, h_size);
    std::size_t hb = hidden_width(input_size_b, h_size);
    m.f_a = make_coder(input_size_a, ha, h_size, rng);
    m.g_a = make_coder(h_size, ha, input_size_a, rng);
    m.f_b = make_coder(input_size_b, hb, h_size, rng);
    m.g_b = make_coder(h_size, hb, input_size_b, rng);
    return m;
}

bool same_architecture(const MultimodalAutoencoder& a, const MultimodalAutoencoder& b) {
    auto same_net = [](const DenseNetwork& x, const DenseNetwork& y) {
        return x.layer_dims == y.layer_dims && x.activations == y.activations;
    };
    return same_net(a.f_a, b.f_a) && same_net(a.g_a, b.g_a) && same_net(a.f_b, b.f_b) &&
           same_net(a.g_b, b.g_b);
}

AeResult ae_loss_and_grads(const DenseNetwork& f, const DenseNetwork& g, const Matrix& x,
                           Rng* rng) {
    if (f.output_width() != g.input_width())
        throw ConfigError("autoencoder: encoder output width differs from decoder input width");
    if (g.output_width() != x.cols)
        throw ConfigError("autoencoder: decoder output width differs from data width");

    auto enc = forward(f, x, true, rng);
    auto dec = forward(g, enc.output, true, rng);
    auto loss = mse_loss(dec.output, x);

    auto g_back = backward(g, dec.cache, loss.grad);
    auto f_back = backward(f, enc.cache, g_back.input_grad);

    AeResult res;
    res.loss = loss.value;
    res.f_grads = std::move(f_back.param_grads);
    res.g_grads = std::move(g_back.param_grads);
    return res;
}

SplitAeResult splitae_loss_and_grads(const MultimodalAutoencoder& model,
                                     ModalityTag input_modality, const AlignedBatch& batch,
                                     Rng* rng) {
    if (input_modality == ModalityTag::AB)
        throw UsageError("splitae: input modality must be A or B");
    if (batch.x_a.rows != batch.x_b.rows)
        throw UsageError("splitae: aligned batch row counts differ");
    if (batch.x_a.rows < 1) throw UsageError("splitae: batch must be non-empty");

    const bool from_a = input_modality == ModalityTag::A;
    const DenseNetwork& f_in = from_a ? model.f_a : model.f_b;
    const Matrix& x_in = from_a ? batch.x_a : batch.x_b;

    auto enc = forward(f_in, x_in, true, rng);
    auto dec_a = forward(model.g_a, enc.output, true, rng);
    auto dec_b = forward(model.g_b, enc.output, true, rng);
    auto loss_a = mse_loss(dec_a.output, batch.x_a);
    auto loss_b = mse_loss(dec_b.output, batch.x_b);

    auto ga_back = backward(model.g_a, dec_a.cache, loss_a.grad);
    auto gb_back = backward(model.g_b, dec_b.cache, loss_b.grad);

    Matrix dh = ga_back.input_grad;
    for (std::size_t i = 0; i < dh.data.size(); ++i) dh.data[i] += gb_back.input_grad.data[i];
    auto f_back = backward(f_in, enc.cache, dh);

    SplitAeResult res;
    res.loss = loss_a.value + loss_b.value;
    res.grads.f_a.assign(model.f_a.params.size(), 0.0);
    res.grads.f_b.assign(model.f_b.params.size(), 0.0);
    (from_a ? res.grads.f_a : res.grads.f_b) = std::move(f_back.param_grads);
    res.grads.g_a = std::move(ga_back.param_grads);
    res.grads.g_b = std::move(gb_back.param_grads);
    return res;
}

DccaeResult dccae_loss_and_grads(const MultimodalAutoencoder& model, const AlignedBatch& batch,
                                 const DccaeConfig& cfg, Rng* rng) {
    if (batch.x_a.rows != batch.x_b.rows)
        throw UsageError("dccae: aligned batch row counts differ");
    if (batch.x_a.rows < 2) throw DataError("dccae: need at least 2 rows for the CCA term");
    if (cfg.lambda <= 0.0) throw ConfigError("dccae: lambda must be positive");

    auto enc_a = forward(model.f_a, batch.x_a, true, rng);
    auto enc_b = forward(model.f_b, batch.x_b, true, rng);
    auto dec_a = forward(model.g_a, enc_a.output, true, rng);
    auto dec_b = forward(model.g_b, enc_b.output, true, rng);
    auto loss_a = mse_loss(dec_a.output, batch.x_a);
    auto loss_b = mse_loss(dec_b.output, batch.x_b);
    auto cca = cca_total_correlation(enc_a.output, enc_b.output, cfg);

    // Scale the reconstruction upstream by lambda before backprop so the
    // decoder grads come out already weighted.
    for (double& v : loss_a.grad.data) v *= cfg.lambda;
    for (double& v : loss_b.grad.data) v *= cfg.lambda;
    auto ga_back = backward(model.g_a, dec_a.cache, loss_a.grad);
    auto gb_back = backward(model.g_b, dec_b.cache, loss_b.grad);

    Matrix dh_a = ga_back.input_grad;
    for (std::size_t i = 0; i < dh_a.data.size(); ++i) dh_a.data[i] -= cca.grad_a.data[i];
    Matrix dh_b = gb_back.input_grad;
    for (std::size_t i = 0; i < dh_b.data.size(); ++i) dh_b.data[i] -= cca.grad_b.data[i];

    auto fa_back = backward(model.f_a, enc_a.cache, dh_a);
    auto fb_back = backward(model.f_b, enc_b.cache, dh_b);

    DccaeResult res;
    res.corr = cca.corr;
    res.loss = cfg.lambda * (loss_a.value + loss_b.value) - cca.corr;
    res.grads.f_a = std::move(fa_back.param_grads);
    res.grads.g_a = std::move(ga_back.param_grads);
    res.grads.f_b = std::move(fb_back.param_grads);
    res.grads.g_b = std::move(gb_back.param_grads);
    return res;
}

Matrix encode(const MultimodalAutoencoder& model, ModalityTag modality, const Matrix& x) {
    if (modality == ModalityTag::AB) throw UsageError("encode: modality must be A or B");
    const DenseNetwork& f = modality == ModalityTag::A ? model.f_a : model.f_b;
    return forward(f, x, false, nullptr).output;
}

}  // namespace mmfl
