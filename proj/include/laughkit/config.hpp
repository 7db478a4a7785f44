#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "laughkit/detect.hpp"
#include "laughkit/error.hpp"
#include "laughkit/fusion.hpp"
#include "laughkit/mfcc.hpp"
#include "laughkit/net.hpp"

namespace laughkit {

// One document configures a whole run. Every field has a default, so a config
// file only needs the keys it wants to change; command-line flags override
// the file in turn.
struct RunConfig {
    MfccConfig mfcc;
    FusionConfig fusion;
    DetectionParams detection;
    std::string cascade_path; // empty: the built-in toy cascade
    ModelConfig model;
    TrainConfig train;
    double threshold = 0.5;

    void validate() const {
        if (threshold < 0.0 || threshold > 1.0) {
            raise(errc::bad_config, "threshold must lie in [0,1]");
        }
        fusion.validate();
        detection.validate();
        model.validate();
        train.validate();
    }
};

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

} // namespace detail

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["mfcc"] = {{"pre_emphasis", cfg.mfcc.pre_emphasis},
                 {"frame_len_ms", cfg.mfcc.frame_len_ms},
                 {"hop_ms", cfg.mfcc.hop_ms},
                 {"window", cfg.mfcc.window == WindowKind::hamming ? "hamming" : "rectangular"},
                 {"n_fft", cfg.mfcc.n_fft},
                 {"n_mels", cfg.mfcc.n_mels},
                 {"n_mfcc", cfg.mfcc.n_mfcc},
                 {"fmin_hz", cfg.mfcc.fmin_hz},
                 {"fmax_hz", cfg.mfcc.fmax_hz},
                 {"log_floor", cfg.mfcc.log_floor}};
    j["fusion"] = {{"target_steps", cfg.fusion.target_steps}};
    j["detection"] = {{"scale_factor", cfg.detection.scale_factor},
                      {"min_neighbors", cfg.detection.min_neighbors},
                      {"step_px", cfg.detection.step_px},
                      {"min_window_px", cfg.detection.min_window_px},
                      {"cascade_path", cfg.cascade_path}};
    nlohmann::json convs = nlohmann::json::array();
    for (const ConvSpec& c : cfg.model.conv_layers) {
        convs.push_back({{"out_channels", c.out_channels}, {"kernel", c.kernel}});
    }
    j["model"] = {{"conv_layers", std::move(convs)},
                  {"dense_layers", cfg.model.dense_layers},
                  {"dropout_p", cfg.model.dropout_p},
                  {"l2_lambda", cfg.model.l2_lambda},
                  {"seed", cfg.model.seed}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"lr", cfg.train.lr},
                  {"beta1", cfg.train.beta1},
                  {"beta2", cfg.train.beta2},
                  {"eps", cfg.train.eps},
                  {"augment",
                   {{"noise_sigma", cfg.train.augment.noise_sigma},
                    {"max_shift_steps", cfg.train.augment.max_shift_steps},
                    {"mask_fraction", cfg.train.augment.mask_fraction},
                    {"noise_exempt_tail", cfg.train.augment.noise_exempt_tail}}},
                  {"early_stop_patience", cfg.train.early_stop_patience},
                  {"seed", cfg.train.seed}};
    j["threshold"] = cfg.threshold;
    return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (!j.is_object()) raise(errc::bad_config, "run config must be a JSON object");
    if (j.contains("mfcc")) {
        const nlohmann::json& m = j.at("mfcc");
        detail::read_if(m, "pre_emphasis", cfg.mfcc.pre_emphasis);
        detail::read_if(m, "frame_len_ms", cfg.mfcc.frame_len_ms);
        detail::read_if(m, "hop_ms", cfg.mfcc.hop_ms);
        if (m.contains("window")) {
            const std::string w = m.at("window").get<std::string>();
            if (w == "hamming") cfg.mfcc.window = WindowKind::hamming;
            else if (w == "rectangular") cfg.mfcc.window = WindowKind::rectangular;
            else raise(errc::bad_config, "unknown window kind: " + w);
        }
        detail::read_if(m, "n_fft", cfg.mfcc.n_fft);
        detail::read_if(m, "n_mels", cfg.mfcc.n_mels);
        detail::read_if(m, "n_mfcc", cfg.mfcc.n_mfcc);
        detail::read_if(m, "fmin_hz", cfg.mfcc.fmin_hz);
        detail::read_if(m, "fmax_hz", cfg.mfcc.fmax_hz);
        detail::read_if(m, "log_floor", cfg.mfcc.log_floor);
    }
    if (j.contains("fusion")) {
        detail::read_if(j.at("fusion"), "target_steps", cfg.fusion.target_steps);
    }
    if (j.contains("detection")) {
        const nlohmann::json& d = j.at("detection");
        detail::read_if(d, "scale_factor", cfg.detection.scale_factor);
        detail::read_if(d, "min_neighbors", cfg.detection.min_neighbors);
        detail::read_if(d, "step_px", cfg.detection.step_px);
        detail::read_if(d, "min_window_px", cfg.detection.min_window_px);
        detail::read_if(d, "cascade_path", cfg.cascade_path);
    }
    if (j.contains("model")) {
        const nlohmann::json& m = j.at("model");
        if (m.contains("conv_layers")) {
            cfg.model.conv_layers.clear();
            for (const auto& c : m.at("conv_layers")) {
                cfg.model.conv_layers.push_back(
                    ConvSpec{c.at("out_channels").get<int>(), c.at("kernel").get<int>()});
            }
        }
        detail::read_if(m, "dense_layers", cfg.model.dense_layers);
        detail::read_if(m, "dropout_p", cfg.model.dropout_p);
        detail::read_if(m, "l2_lambda", cfg.model.l2_lambda);
        detail::read_if(m, "seed", cfg.model.seed);
    }
    if (j.contains("train")) {
        const nlohmann::json& t = j.at("train");
        detail::read_if(t, "epochs", cfg.train.epochs);
        detail::read_if(t, "batch_size", cfg.train.batch_size);
        detail::read_if(t, "lr", cfg.train.lr);
        detail::read_if(t, "beta1", cfg.train.beta1);
        detail::read_if(t, "beta2", cfg.train.beta2);
        detail::read_if(t, "eps", cfg.train.eps);
        if (t.contains("augment")) {
            const nlohmann::json& a = t.at("augment");
            detail::read_if(a, "noise_sigma", cfg.train.augment.noise_sigma);
            detail::read_if(a, "max_shift_steps", cfg.train.augment.max_shift_steps);
            detail::read_if(a, "mask_fraction", cfg.train.augment.mask_fraction);
            detail::read_if(a, "noise_exempt_tail", cfg.train.augment.noise_exempt_tail);
        }
        detail::read_if(t, "early_stop_patience", cfg.train.early_stop_patience);
        detail::read_if(t, "seed", cfg.train.seed);
    }
    detail::read_if(j, "threshold", cfg.threshold);
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::bad_config, std::string("config parse failure: ") + e.what());
    }
    return run_config_from_json(j);
}

} // namespace laughkit
