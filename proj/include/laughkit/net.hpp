#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laughkit/error.hpp"
#include "laughkit/fusion.hpp"
#include "laughkit/rng.hpp"

namespace laughkit {

struct ConvSpec {
    int out_channels = 0;
    int kernel = 0; // odd, stride 1, same padding
    friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

struct ModelConfig {
    std::vector<ConvSpec> conv_layers = {{16, 5}, {32, 5}};
    std::vector<int> dense_layers = {24}; // hidden relu layers; sigmoid head is implicit
    double dropout_p = 0.25;
    double l2_lambda = 1e-4;
    std::uint64_t seed = 1234;

    void validate() const {
        if (conv_layers.empty()) raise(errc::bad_config, "model needs at least one conv layer");
        for (const ConvSpec& c : conv_layers) {
            if (c.out_channels < 1) raise(errc::bad_config, "conv out_channels must be >= 1");
            if (c.kernel < 1 || c.kernel % 2 == 0) {
                raise(errc::bad_config, "conv kernel must be odd and >= 1");
            }
        }
        for (int u : dense_layers) {
            if (u < 1) raise(errc::bad_config, "dense units must be >= 1");
        }
        if (dropout_p < 0.0 || dropout_p >= 1.0) raise(errc::bad_config, "dropout_p must be in [0,1)");
        if (l2_lambda < 0.0) raise(errc::bad_config, "l2_lambda must be >= 0");
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Trainable tensors plus the per-channel input standardization fitted during
// training (empty vectors = identity). Dense layers include the head as the
// last entry. Also reused as the container for gradients and Adam moments.
struct ModelParams {
    ModelConfig config;
    int input_d = 0;
    std::vector<std::vector<double>> conv_w; // [layer] flat [oc][ic][k]
    std::vector<std::vector<double>> conv_b; // [layer][oc]
    std::vector<std::vector<double>> dense_w; // [layer] flat [out][in], head last
    std::vector<std::vector<double>> dense_b;
    std::vector<double> input_mean;  // size input_d, or empty
    std::vector<double> input_scale; // size input_d, or empty

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

namespace detail {

// dense layer widths: pool output -> hidden... -> 1
inline std::vector<int> dense_dims(const ModelConfig& cfg) {
    std::vector<int> dims;
    dims.push_back(cfg.conv_layers.back().out_channels);
    for (int u : cfg.dense_layers) dims.push_back(u);
    dims.push_back(1);
    return dims;
}

inline std::vector<std::vector<double>*> trainable_tensors(ModelParams& p) {
    std::vector<std::vector<double>*> out;
    for (std::size_t l = 0; l < p.conv_w.size(); ++l) {
        out.push_back(&p.conv_w[l]);
        out.push_back(&p.conv_b[l]);
    }
    for (std::size_t l = 0; l < p.dense_w.size(); ++l) {
        out.push_back(&p.dense_w[l]);
        out.push_back(&p.dense_b[l]);
    }
    return out;
}

inline std::vector<const std::vector<double>*> trainable_tensors(const ModelParams& p) {
    std::vector<const std::vector<double>*> out;
    for (std::size_t l = 0; l < p.conv_w.size(); ++l) {
        out.push_back(&p.conv_w[l]);
        out.push_back(&p.conv_b[l]);
    }
    for (std::size_t l = 0; l < p.dense_w.size(); ++l) {
        out.push_back(&p.dense_w[l]);
        out.push_back(&p.dense_b[l]);
    }
    return out;
}

} // namespace detail

inline long long count_params(const ModelConfig& cfg, int input_d) {
    cfg.validate();
    long long total = 0;
    int in_ch = input_d;
    for (const ConvSpec& c : cfg.conv_layers) {
        total += static_cast<long long>(in_ch) * c.out_channels * c.kernel + c.out_channels;
        in_ch = c.out_channels;
    }
    const auto dims = detail::dense_dims(cfg);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        total += static_cast<long long>(dims[l]) * dims[l + 1] + dims[l + 1];
    }
    return total;
}

// He-uniform weights (bound sqrt(6/fan_in)) drawn in fixed flat-index order
// from the model seed; biases zero.
inline ModelParams init_params(const ModelConfig& cfg, int input_d) {
    cfg.validate();
    if (input_d < 1) raise(errc::bad_config, "input dimension must be >= 1");
    ModelParams p;
    p.config = cfg;
    p.input_d = input_d;
    Rng rng(cfg.seed);
    int in_ch = input_d;
    for (const ConvSpec& c : cfg.conv_layers) {
        const double bound = std::sqrt(6.0 / (static_cast<double>(in_ch) * c.kernel));
        std::vector<double> w(static_cast<std::size_t>(c.out_channels) * in_ch * c.kernel);
        for (double& v : w) v = rng.uniform(-bound, bound);
        p.conv_w.push_back(std::move(w));
        p.conv_b.push_back(std::vector<double>(static_cast<std::size_t>(c.out_channels), 0.0));
        in_ch = c.out_channels;
    }
    const auto dims = detail::dense_dims(cfg);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = std::sqrt(6.0 / dims[l]);
        std::vector<double> w(static_cast<std::size_t>(dims[l + 1]) * dims[l]);
        for (double& v : w) v = rng.uniform(-bound, bound);
        p.dense_w.push_back(std::move(w));
        p.dense_b.push_back(std::vector<double>(static_cast<std::size_t>(dims[l + 1]), 0.0));
    }
    return p;
}

inline ModelParams zeros_like(const ModelParams& p) {
    ModelParams z = p;
    for (auto* t : detail::trainable_tensors(z)) std::fill(t->begin(), t->end(), 0.0);
    return z;
}

struct ForwardCache {
    std::vector<std::vector<std::vector<double>>> conv_in; // per layer [ch][t]
    std::vector<std::vector<std::vector<double>>> conv_z;  // pre-relu
    std::vector<double> pooled;
    std::vector<double> pool_mask; // scaled dropout mask; empty in eval mode
    std::vector<std::vector<double>> dense_in;   // input to each dense layer
    std::vector<std::vector<double>> dense_z;    // pre-activation
    std::vector<std::vector<double>> dense_mask; // per hidden layer
    double logit = 0.0;
    double score = 0.0;
};

namespace detail {

inline void check_input_shape(const ModelParams& p, const std::vector<std::vector<double>>& x) {
    if (x.empty()) raise(errc::empty_input, "input sequence has no steps");
    for (const auto& row : x) {
        if (static_cast<int>(row.size()) != p.input_d) {
            raise(errc::shape_mismatch, "input step has " + std::to_string(row.size()) +
                                            " channels, model expects " +
                                            std::to_string(p.input_d));
        }
    }
}

} // namespace detail

// Full forward pass: standardize -> convs (relu, same padding) -> global
// average pool -> dropout -> dense stack (relu + dropout on hidden layers)
// -> sigmoid head. Dropout masks are drawn from dropout_seed in a fixed
// order (pool first, then hidden layers) and scaled by 1/(1-p), so the mask
// pattern is a pure function of the seed.
inline ForwardCache forward(const ModelParams& params, const std::vector<std::vector<double>>& x,
                            bool train_mode = false, std::uint64_t dropout_seed = 0) {
    detail::check_input_shape(params, x);
    const int T = static_cast<int>(x.size());
    const int d = params.input_d;
    ForwardCache cache;

    std::vector<std::vector<double>> act(static_cast<std::size_t>(d),
                                         std::vector<double>(static_cast<std::size_t>(T)));
    const bool has_norm = !params.input_mean.empty();
    for (int c = 0; c < d; ++c) {
        for (int t = 0; t < T; ++t) {
            double v = x[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
            if (has_norm) v = (v - params.input_mean[c]) / params.input_scale[c];
            act[c][t] = v;
        }
    }

    int in_ch = d;
    for (std::size_t l = 0; l < params.config.conv_layers.size(); ++l) {
        const ConvSpec& spec = params.config.conv_layers[l];
        const int k = spec.kernel, pad = spec.kernel / 2, oc_n = spec.out_channels;
        cache.conv_in.push_back(act);
        std::vector<std::vector<double>> z(static_cast<std::size_t>(oc_n),
                                           std::vector<double>(static_cast<std::size_t>(T)));
        const std::vector<double>& w = params.conv_w[l];
        for (int oc = 0; oc < oc_n; ++oc) {
            for (int t = 0; t < T; ++t) {
                double acc = params.conv_b[l][oc];
                for (int ic = 0; ic < in_ch; ++ic) {
                    const double* wrow = &w[(static_cast<std::size_t>(oc) * in_ch + ic) * k];
                    const std::vector<double>& a = cache.conv_in.back()[ic];
                    for (int j = 0; j < k; ++j) {
                        const int src = t + j - pad;
                        if (src >= 0 && src < T) acc += wrow[j] * a[src];
                    }
                }
                z[oc][t] = acc;
            }
        }
        cache.conv_z.push_back(z);
        for (auto& row : z) {
            for (double& v : row) v = std::max(0.0, v);
        }
        act = std::move(z);
        in_ch = oc_n;
    }

    cache.pooled.assign(static_cast<std::size_t>(in_ch), 0.0);
    for (int c = 0; c < in_ch; ++c) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) s += act[c][t];
        cache.pooled[c] = s / T;
    }

    const double p_drop = params.config.dropout_p;
    Rng drop_rng(dropout_seed);
    const bool use_dropout = train_mode && p_drop > 0.0;
    std::vector<double> vec = cache.pooled;
    if (use_dropout) {
        cache.pool_mask.resize(vec.size());
        for (std::size_t i = 0; i < vec.size(); ++i) {
            cache.pool_mask[i] = drop_rng.uniform() < p_drop ? 0.0 : 1.0 / (1.0 - p_drop);
            vec[i] *= cache.pool_mask[i];
        }
    }

    const auto dims = detail::dense_dims(params.config);
    const std::size_t n_dense = params.dense_w.size();
    for (std::size_t l = 0; l < n_dense; ++l) {
        cache.dense_in.push_back(vec);
        const int n_in = dims[l], n_out = dims[l + 1];
        std::vector<double> z(static_cast<std::size_t>(n_out));
        for (int o = 0; o < n_out; ++o) {
            double acc = params.dense_b[l][o];
            const double* wrow = &params.dense_w[l][static_cast<std::size_t>(o) * n_in];
            for (int i = 0; i < n_in; ++i) acc += wrow[i] * vec[i];
            z[o] = acc;
        }
        cache.dense_z.push_back(z);
        if (l + 1 == n_dense) break; // head: no relu/dropout
        for (double& v : z) v = std::max(0.0, v);
        if (use_dropout) {
            std::vector<double> mask(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                mask[i] = drop_rng.uniform() < p_drop ? 0.0 : 1.0 / (1.0 - p_drop);
                z[i] *= mask[i];
            }
            cache.dense_mask.push_back(std::move(mask));
        }
        vec = std::move(z);
    }
    cache.logit = cache.dense_z.back()[0];
    cache.score = 1.0 / (1.0 + std::exp(-cache.logit));
    return cache;
}

struct Example {
    std::vector<std::vector<double>> x; // T rows of input_d channels
    int label = 0;
};

inline Example to_example(const FusedSequence& seq) {
    if (seq.label != 0 && seq.label != 1) {
        raise(errc::bad_label, seq.clip_id + ": example needs a 0/1 label");
    }
    return Example{seq.steps, seq.label};
}

struct LossGrads {
    double loss = 0.0;
    ModelParams grads;
};

// Mean clamped binary cross-entropy over the batch plus L2 on weight tensors
// (not biases). Gradients by reverse-mode accumulation; the logit gradient
// uses the unclamped sigmoid (p - y), the standard composite form.
inline LossGrads loss_and_grads(const ModelParams& params,
                                const std::vector<const Example*>& batch, bool train_mode = false,
                                std::uint64_t dropout_seed = 0) {
    if (batch.empty()) raise(errc::empty_input, "empty batch");
    LossGrads out;
    out.grads = zeros_like(params);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const auto dims = detail::dense_dims(params.config);

    for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const Example& ex = *batch[bi];
        const std::uint64_t sample_seed = dropout_seed ^ (0x9e3779b97f4a7c15ULL * (bi + 1));
        ForwardCache cache = forward(params, ex.x, train_mode, sample_seed);

        const double y = static_cast<double>(ex.label);
        const double p = std::clamp(cache.score, 1e-7, 1.0 - 1e-7);
        out.loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)) * inv_b;

        double dz_head = (cache.score - y) * inv_b;

        // dense stack, head first
        const std::size_t n_dense = params.dense_w.size();
        std::vector<double> dvec; // gradient wrt the current layer's input
        {
            const int n_in = dims[n_dense - 1];
            const std::vector<double>& a_in = cache.dense_in[n_dense - 1];
            dvec.assign(static_cast<std::size_t>(n_in), 0.0);
            for (int i = 0; i < n_in; ++i) {
                out.grads.dense_w[n_dense - 1][i] += dz_head * a_in[i];
                dvec[i] = params.dense_w[n_dense - 1][i] * dz_head;
            }
            out.grads.dense_b[n_dense - 1][0] += dz_head;
        }
        for (std::size_t l = n_dense - 1; l-- > 0;) {
            const int n_in = dims[l], n_out = dims[l + 1];
            // dvec currently holds dL/d(layer output after relu+dropout)
            std::vector<double> dz(static_cast<std::size_t>(n_out));
            for (int o = 0; o < n_out; ++o) {
                double g = dvec[o];
                if (!cache.dense_mask.empty()) g *= cache.dense_mask[l][o];
                dz[o] = cache.dense_z[l][o] > 0.0 ? g : 0.0;
            }
            const std::vector<double>& a_in = cache.dense_in[l];
            std::vector<double> dprev(static_cast<std::size_t>(n_in), 0.0);
            for (int o = 0; o < n_out; ++o) {
                const std::size_t row = static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) {
                    out.grads.dense_w[l][row + i] += dz[o] * a_in[i];
                    dprev[i] += params.dense_w[l][row + i] * dz[o];
                }
                out.grads.dense_b[l][o] += dz[o];
            }
            dvec = std::move(dprev);
        }

        // through pool dropout, then spread over time
        if (!cache.pool_mask.empty()) {
            for (std::size_t i = 0; i < dvec.size(); ++i) dvec[i] *= cache.pool_mask[i];
        }
        const int T = static_cast<int>(ex.x.size());
        const int last_ch = dims[0];
        std::vector<std::vector<double>> dact(
            static_cast<std::size_t>(last_ch),
            std::vector<double>(static_cast<std::size_t>(T), 0.0));
        for (int c = 0; c < last_ch; ++c) {
            const double g = dvec[c] / T;
            for (int t = 0; t < T; ++t) dact[c][t] = g;
        }

        // conv layers in reverse
        for (std::size_t l = params.config.conv_layers.size(); l-- > 0;) {
            const ConvSpec& spec = params.config.conv_layers[l];
            const int k = spec.kernel, pad = spec.kernel / 2, oc_n = spec.out_channels;
            const int ic_n = static_cast<int>(cache.conv_in[l].size());
            // relu
            for (int oc = 0; oc < oc_n; ++oc) {
                for (int t = 0; t < T; ++t) {
                    if (cache.conv_z[l][oc][t] <= 0.0) dact[oc][t] = 0.0;
                }
            }
            std::vector<std::vector<double>> dprev(
                static_cast<std::size_t>(ic_n),
                std::vector<double>(static_cast<std::size_t>(T), 0.0));
            const std::vector<double>& w = params.conv_w[l];
            for (int oc = 0; oc < oc_n; ++oc) {
                double db = 0.0;
                for (int t = 0; t < T; ++t) db += dact[oc][t];
                out.grads.conv_b[l][oc] += db;
                for (int ic = 0; ic < ic_n; ++ic) {
                    const std::size_t wbase = (static_cast<std::size_t>(oc) * ic_n + ic) * k;
                    const std::vector<double>& a = cache.conv_in[l][ic];
                    for (int j = 0; j < k; ++j) {
                        double dw = 0.0;
                        for (int t = 0; t < T; ++t) {
                            const int src = t + j - pad;
                            if (src >= 0 && src < T) {
                                dw += dact[oc][t] * a[src];
                                dprev[ic][src] += w[wbase + j] * dact[oc][t];
                            }
                        }
                        out.grads.conv_w[l][wbase + j] += dw;
                    }
                }
            }
            dact = std::move(dprev);
        }
    }

    // L2 on weights only, once per batch
    const double lambda = params.config.l2_lambda;
    if (lambda > 0.0) {
        double sq = 0.0;
        for (std::size_t l = 0; l < params.conv_w.size(); ++l) {
            for (std::size_t i = 0; i < params.conv_w[l].size(); ++i) {
                sq += params.conv_w[l][i] * params.conv_w[l][i];
                out.grads.conv_w[l][i] += 2.0 * lambda * params.conv_w[l][i];
            }
        }
        for (std::size_t l = 0; l < params.dense_w.size(); ++l) {
            for (std::size_t i = 0; i < params.dense_w[l].size(); ++i) {
                sq += params.dense_w[l][i] * params.dense_w[l][i];
                out.grads.dense_w[l][i] += 2.0 * lambda * params.dense_w[l][i];
            }
        }
        out.loss += lambda * sq;
    }
    return out;
}

struct TrainConfig {
    int epochs = 40;
    int batch_size = 4;
    double lr = 6e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    struct Augment {
        double noise_sigma = 0.05;   // on audio channels, in standardized units
        int max_shift_steps = 10;    // circular shift range
        double mask_fraction = 0.1;  // contiguous zeroed fraction of steps
        int noise_exempt_tail = 2;   // trailing channels noise never touches (smile)
    } augment;
    int early_stop_patience = 10; // 0 disables early stopping
    std::uint64_t seed = 99;

    void validate() const {
        if (epochs < 1) raise(errc::bad_config, "epochs must be >= 1");
        if (batch_size < 1) raise(errc::bad_config, "batch_size must be >= 1");
        if (lr <= 0.0) raise(errc::bad_config, "lr must be positive");
        if (augment.noise_sigma < 0.0 || augment.mask_fraction < 0.0 ||
            augment.mask_fraction > 1.0 || augment.max_shift_steps < 0 ||
            augment.noise_exempt_tail < 0) {
            raise(errc::bad_config, "invalid augmentation settings");
        }
        if (early_stop_patience < 0) raise(errc::bad_config, "patience must be >= 0");
    }
};

struct AdamState {
    ModelParams m, v;
};

inline AdamState make_adam_state(const ModelParams& params) {
    return AdamState{zeros_like(params), zeros_like(params)};
}

inline void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, int t,
                      const TrainConfig& cfg) {
    if (t < 1) raise(errc::bad_argument, "adam step index must be >= 1");
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    auto ps = detail::trainable_tensors(params);
    auto gs = detail::trainable_tensors(grads);
    auto ms = detail::trainable_tensors(state.m);
    auto vs = detail::trainable_tensors(state.v);
    for (std::size_t ti = 0; ti < ps.size(); ++ti) {
        std::vector<double>& p = *ps[ti];
        const std::vector<double>& g = *gs[ti];
        std::vector<double>& m = *ms[ti];
        std::vector<double>& v = *vs[ti];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

// Augmentation, in order: Gaussian noise on audio channels (all but the
// exempt tail), circular time shift, contiguous time mask. All draws come
// from the seed in that fixed order.
inline std::vector<std::vector<double>> augment_sequence(
    const std::vector<std::vector<double>>& x, const TrainConfig::Augment& cfg,
    std::uint64_t seed) {
    std::vector<std::vector<double>> y = x;
    if (y.empty()) return y;
    const int T = static_cast<int>(y.size());
    const int d = static_cast<int>(y.front().size());
    Rng rng(seed);
    if (cfg.noise_sigma > 0.0) {
        const int noisy_d = std::max(0, d - cfg.noise_exempt_tail);
        for (int t = 0; t < T; ++t) {
            for (int c = 0; c < noisy_d; ++c) {
                y[t][c] += cfg.noise_sigma * rng.normal();
            }
        }
    }
    if (cfg.max_shift_steps > 0) {
        const int span = std::min(cfg.max_shift_steps, T - 1);
        const int k = static_cast<int>(rng.uniform_int(-span, span));
        if (k != 0) {
            std::vector<std::vector<double>> shifted(y.size());
            for (int t = 0; t < T; ++t) {
                shifted[static_cast<std::size_t>(((t + k) % T + T) % T)] = std::move(y[t]);
            }
            y = std::move(shifted);
        }
    }
    if (cfg.mask_fraction > 0.0) {
        const int len = std::min(T, static_cast<int>(std::ceil(cfg.mask_fraction * T)));
        const int start = static_cast<int>(rng.uniform_int(0, T - len));
        for (int t = start; t < start + len; ++t) {
            std::fill(y[static_cast<std::size_t>(t)].begin(), y[static_cast<std::size_t>(t)].end(),
                      0.0);
        }
    }
    return y;
}

struct EpochLog {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

struct TrainResult {
    ModelParams params;
    TrainLog log;
};

inline double eval_accuracy(const ModelParams& params, const std::vector<Example>& set,
                            double threshold = 0.5) {
    if (set.empty()) return 0.0;
    int correct = 0;
    for (const Example& ex : set) {
        const double score = forward(params, ex.x).score;
        const int pred = score >= threshold ? 1 : 0;
        if (pred == ex.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(set.size());
}

// Deterministic training: per-epoch seeded shuffle, per-batch Adam updates on
// augmented copies, early stopping on validation accuracy. Input
// standardization (mean/std per channel, fitted on the training split) is
// applied to both splits up front and stored with the returned parameters so
// inference reproduces it; training itself runs in standardized space, which
// also keeps augmentation noise comparable across channels.
inline TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                         const std::vector<Example>& train_set,
                         const std::vector<Example>& val_set) {
    model_cfg.validate();
    train_cfg.validate();
    if (train_set.empty()) raise(errc::empty_split, "training split is empty");
    if (val_set.empty()) raise(errc::empty_split, "validation split is empty");
    const int d = static_cast<int>(train_set.front().x.empty() ? 0 : train_set.front().x.front().size());
    if (d < 1) raise(errc::empty_input, "training examples have no channels");

    // fit standardization on the training split
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    std::vector<double> scale(static_cast<std::size_t>(d), 0.0);
    std::size_t n_steps = 0;
    for (const Example& ex : train_set) {
        for (const auto& row : ex.x) {
            if (static_cast<int>(row.size()) != d) {
                raise(errc::shape_mismatch, "inconsistent channel count in training split");
            }
            for (int c = 0; c < d; ++c) mean[c] += row[c];
            ++n_steps;
        }
    }
    for (int c = 0; c < d; ++c) mean[c] /= static_cast<double>(n_steps);
    for (const Example& ex : train_set) {
        for (const auto& row : ex.x) {
            for (int c = 0; c < d; ++c) {
                const double diff = row[c] - mean[c];
                scale[c] += diff * diff;
            }
        }
    }
    for (int c = 0; c < d; ++c) {
        scale[c] = std::sqrt(scale[c] / static_cast<double>(n_steps));
        if (scale[c] < 1e-8) scale[c] = 1.0;
    }
    auto standardize = [&](const std::vector<Example>& set) {
        std::vector<Example> out = set;
        for (Example& ex : out) {
            for (auto& row : ex.x) {
                if (static_cast<int>(row.size()) != d) {
                    raise(errc::shape_mismatch, "inconsistent channel count across splits");
                }
                for (int c = 0; c < d; ++c) row[c] = (row[c] - mean[c]) / scale[c];
            }
        }
        return out;
    };
    const std::vector<Example> tr = standardize(train_set);
    const std::vector<Example> va = standardize(val_set);

    ModelParams params = init_params(model_cfg, d);
    AdamState adam = make_adam_state(params);
    Rng rng(train_cfg.seed);
    TrainLog log;
    ModelParams best = params;
    double best_val = -1.0;
    int since_best = 0;
    int step = 0;

    std::vector<std::size_t> order(tr.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t base = 0; base < order.size(); base += train_cfg.batch_size) {
            const std::size_t end = std::min(order.size(), base + train_cfg.batch_size);
            std::vector<Example> augmented;
            augmented.reserve(end - base);
            for (std::size_t i = base; i < end; ++i) {
                const Example& src = tr[order[i]];
                augmented.push_back(
                    Example{augment_sequence(src.x, train_cfg.augment, rng.next_u64()), src.label});
            }
            std::vector<const Example*> batch;
            batch.reserve(augmented.size());
            for (const Example& ex : augmented) batch.push_back(&ex);
            const std::uint64_t dropout_seed = rng.next_u64();
            LossGrads lg = loss_and_grads(params, batch, true, dropout_seed);
            adam_step(params, lg.grads, adam, ++step, train_cfg);
            loss_sum += lg.loss * static_cast<double>(batch.size());
            seen += batch.size();
        }
        EpochLog el;
        el.train_loss = loss_sum / static_cast<double>(seen);
        el.train_accuracy = eval_accuracy(params, tr);
        el.val_accuracy = eval_accuracy(params, va);
        log.epochs.push_back(el);

        if (el.val_accuracy > best_val) {
            best_val = el.val_accuracy;
            best = params;
            since_best = 0;
        } else if (train_cfg.early_stop_patience > 0 &&
                   ++since_best >= train_cfg.early_stop_patience) {
            break;
        }
    }

    best.input_mean = mean;
    best.input_scale = scale;
    return TrainResult{std::move(best), std::move(log)};
}

inline double predict_score(const ModelParams& params, const FusedSequence& seq) {
    return forward(params, seq.steps).score;
}

// Model file: {"format_version":1,"model_config":{...},"input_d":N,
// "tensors":[{"name","shape","values"}]}. Standardization vectors ride along
// as input_mean/input_scale tensors when present.
inline nlohmann::json model_to_json(const ModelParams& params) {
    nlohmann::json cfg;
    nlohmann::json convs = nlohmann::json::array();
    for (const ConvSpec& c : params.config.conv_layers) {
        convs.push_back({{"out_channels", c.out_channels}, {"kernel", c.kernel}});
    }
    cfg["conv_layers"] = std::move(convs);
    cfg["dense_layers"] = params.config.dense_layers;
    cfg["dropout_p"] = params.config.dropout_p;
    cfg["l2_lambda"] = params.config.l2_lambda;
    cfg["seed"] = params.config.seed;

    nlohmann::json tensors = nlohmann::json::array();
    auto add = [&tensors](const std::string& name, std::vector<int> shape,
                          const std::vector<double>& values) {
        tensors.push_back({{"name", name}, {"shape", shape}, {"values", values}});
    };
    int in_ch = params.input_d;
    for (std::size_t l = 0; l < params.conv_w.size(); ++l) {
        const ConvSpec& c = params.config.conv_layers[l];
        add("conv" + std::to_string(l) + "_weight", {c.out_channels, in_ch, c.kernel},
            params.conv_w[l]);
        add("conv" + std::to_string(l) + "_bias", {c.out_channels}, params.conv_b[l]);
        in_ch = c.out_channels;
    }
    const auto dims = detail::dense_dims(params.config);
    for (std::size_t l = 0; l < params.dense_w.size(); ++l) {
        add("dense" + std::to_string(l) + "_weight", {dims[l + 1], dims[l]}, params.dense_w[l]);
        add("dense" + std::to_string(l) + "_bias", {dims[l + 1]}, params.dense_b[l]);
    }
    if (!params.input_mean.empty()) {
        add("input_mean", {params.input_d}, params.input_mean);
        add("input_scale", {params.input_d}, params.input_scale);
    }

    nlohmann::json j;
    j["format_version"] = 1;
    j["model_config"] = std::move(cfg);
    j["input_d"] = params.input_d;
    j["tensors"] = std::move(tensors);
    return j;
}

inline ModelParams model_from_json(const nlohmann::json& j) {
    for (const char* key : {"format_version", "model_config", "input_d", "tensors"}) {
        if (!j.contains(key)) {
            raise(errc::missing_field, std::string("model file missing '") + key + "'");
        }
    }
    if (j.at("format_version").get<int>() != 1) {
        raise(errc::bad_manifest, "unsupported model format_version");
    }
    ModelConfig cfg;
    const nlohmann::json& jc = j.at("model_config");
    cfg.conv_layers.clear();
    for (const auto& c : jc.at("conv_layers")) {
        cfg.conv_layers.push_back(
            ConvSpec{c.at("out_channels").get<int>(), c.at("kernel").get<int>()});
    }
    cfg.dense_layers = jc.at("dense_layers").get<std::vector<int>>();
    cfg.dropout_p = jc.at("dropout_p").get<double>();
    cfg.l2_lambda = jc.at("l2_lambda").get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    cfg.validate();

    const int input_d = j.at("input_d").get<int>();
    ModelParams params = init_params(cfg, input_d); // correct shapes, then overwritten

    std::map<std::string, std::pair<std::vector<int>, std::vector<double>>> by_name;
    for (const auto& t : j.at("tensors")) {
        by_name[t.at("name").get<std::string>()] = {t.at("shape").get<std::vector<int>>(),
                                                    t.at("values").get<std::vector<double>>()};
    }
    auto take = [&by_name](const std::string& name, const std::vector<int>& want_shape,
                           std::vector<double>& dst) {
        auto it = by_name.find(name);
        if (it == by_name.end()) raise(errc::missing_field, "model tensor missing: " + name);
        const auto& [shape, values] = it->second;
        if (shape != want_shape) raise(errc::shape_mismatch, "tensor shape mismatch: " + name);
        std::size_t expect = 1;
        for (int s : shape) expect *= static_cast<std::size_t>(s);
        if (values.size() != expect) raise(errc::shape_mismatch, "tensor size mismatch: " + name);
        dst = values;
        by_name.erase(it);
    };
    int in_ch = input_d;
    for (std::size_t l = 0; l < cfg.conv_layers.size(); ++l) {
        const ConvSpec& c = cfg.conv_layers[l];
        take("conv" + std::to_string(l) + "_weight", {c.out_channels, in_ch, c.kernel},
             params.conv_w[l]);
        take("conv" + std::to_string(l) + "_bias", {c.out_channels}, params.conv_b[l]);
        in_ch = c.out_channels;
    }
    const auto dims = detail::dense_dims(cfg);
    for (std::size_t l = 0; l < params.dense_w.size(); ++l) {
        take("dense" + std::to_string(l) + "_weight", {dims[l + 1], dims[l]}, params.dense_w[l]);
        take("dense" + std::to_string(l) + "_bias", {dims[l + 1]}, params.dense_b[l]);
    }
    if (by_name.count("input_mean") || by_name.count("input_scale")) {
        take("input_mean", {input_d}, params.input_mean);
        take("input_scale", {input_d}, params.input_scale);
    }
    if (!by_name.empty()) {
        raise(errc::bad_manifest, "model file has unexpected tensor: " + by_name.begin()->first);
    }
    return params;
}

inline void save_model(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write model file: " + path);
    out << model_to_json(params).dump(2) << "\n";
    if (!out) raise(errc::io_error, "short write: " + path);
}

inline ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::bad_manifest, path + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace laughkit
