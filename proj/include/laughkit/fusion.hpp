#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "laughkit/acoustics.hpp"
#include "laughkit/detect.hpp"
#include "laughkit/error.hpp"
#include "laughkit/mfcc.hpp"

namespace laughkit {

struct FusionConfig {
    int target_steps = 200; // fixed length T fed to the classifier

    void validate() const {
        if (target_steps < 1) raise(errc::bad_config, "fusion target_steps must be >= 1");
    }
};

// Per-step fused feature rows: n_mfcc MFCC values, 4 band-energy ratios, the
// 5 clip-level acoustics broadcast to every step, then the 2 aligned smile
// channels [present, count]. Channel order is part of the dataset format.
struct FusedSequence {
    std::string clip_id;
    int label = -1; // 0/1, -1 when unlabeled
    std::vector<std::vector<double>> steps;

    int n_steps() const { return static_cast<int>(steps.size()); }
    int dims() const { return steps.empty() ? 0 : static_cast<int>(steps.front().size()); }

    friend bool operator==(const FusedSequence&, const FusedSequence&) = default;
};

inline constexpr int kSmileChannels = 2;

inline int fused_dims(const MfccConfig& mfcc_cfg) {
    return mfcc_cfg.n_mfcc + AcousticFeatureVector::channel_count + kSmileChannels;
}

// Nearest-neighbor alignment of the per-video-frame smile series onto audio
// frame start times: audio frame j at t = j*hop maps to video frame
// argmin_i |i/fps - t|, ties to the lower index.
inline std::vector<std::array<double, 2>> align_streams(const MfccMatrix& mfcc,
                                                        const SmileSeries& smiles,
                                                        double frame_rate_hz) {
    if (mfcc.rows.empty()) raise(errc::empty_input, "no audio frames to align");
    if (smiles.frames.empty()) raise(errc::empty_input, "no video frames to align");
    if (frame_rate_hz <= 0.0) raise(errc::bad_argument, "frame rate must be positive");
    const int n_video = static_cast<int>(smiles.frames.size());
    std::vector<std::array<double, 2>> out;
    out.reserve(mfcc.rows.size());
    for (std::size_t j = 0; j < mfcc.rows.size(); ++j) {
        const double t = static_cast<double>(j) * mfcc.hop_s;
        // ceil(x - 1/2) rounds halves down, matching the tie rule
        int i = static_cast<int>(std::ceil(t * frame_rate_hz - 0.5));
        i = std::clamp(i, 0, n_video - 1);
        const SmileFrameRecord& rec = smiles.frames[static_cast<std::size_t>(i)];
        out.push_back({rec.present ? 1.0 : 0.0, static_cast<double>(rec.count)});
    }
    return out;
}

inline FusedSequence assemble_fused_sequence(const MfccMatrix& mfcc,
                                             const AcousticFeatureVector& acoustics,
                                             const std::vector<std::array<double, 2>>& smiles,
                                             int label, const std::string& clip_id) {
    if (smiles.size() != mfcc.rows.size()) {
        raise(errc::length_mismatch, clip_id + ": aligned smile channels (" +
                                         std::to_string(smiles.size()) +
                                         ") do not match audio frames (" +
                                         std::to_string(mfcc.rows.size()) + ")");
    }
    FusedSequence seq;
    seq.clip_id = clip_id;
    seq.label = label;
    seq.steps.reserve(mfcc.rows.size());
    for (std::size_t j = 0; j < mfcc.rows.size(); ++j) {
        std::vector<double> step;
        step.reserve(mfcc.rows[j].size() + AcousticFeatureVector::channel_count + kSmileChannels);
        step.insert(step.end(), mfcc.rows[j].begin(), mfcc.rows[j].end());
        step.insert(step.end(), acoustics.band_energy_ratio.begin(),
                    acoustics.band_energy_ratio.end());
        step.push_back(acoustics.spectral_centroid_hz);
        step.push_back(acoustics.rolloff85_hz);
        step.push_back(acoustics.zcr_per_s);
        step.push_back(acoustics.rms_mean);
        step.push_back(acoustics.rms_std);
        step.push_back(smiles[j][0]);
        step.push_back(smiles[j][1]);
        seq.steps.push_back(std::move(step));
    }
    return seq;
}

// Center-crops longer sequences and symmetrically zero-pads shorter ones to
// exactly T steps. Idempotent at length T.
inline FusedSequence fit_length(const FusedSequence& seq, int target_steps) {
    if (target_steps < 1) raise(errc::bad_argument, "target length must be >= 1");
    const int n = seq.n_steps();
    if (n == target_steps) return seq;
    FusedSequence out;
    out.clip_id = seq.clip_id;
    out.label = seq.label;
    out.steps.reserve(static_cast<std::size_t>(target_steps));
    const int d = seq.dims();
    if (n > target_steps) {
        const int start = (n - target_steps) / 2;
        for (int j = start; j < start + target_steps; ++j) {
            out.steps.push_back(seq.steps[static_cast<std::size_t>(j)]);
        }
    } else {
        const int pad_front = (target_steps - n) / 2;
        const std::vector<double> zeros(static_cast<std::size_t>(d), 0.0);
        for (int j = 0; j < pad_front; ++j) out.steps.push_back(zeros);
        for (const auto& row : seq.steps) out.steps.push_back(row);
        while (static_cast<int>(out.steps.size()) < target_steps) out.steps.push_back(zeros);
    }
    return out;
}

// JSONL dataset records: {"id","label","split","steps":[[...]]} one per line.
// The split tag lets a single dataset file carry both training splits.
inline std::string serialize_fused_record(const FusedSequence& seq, const std::string& split) {
    nlohmann::json j;
    j["id"] = seq.clip_id;
    j["label"] = seq.label;
    j["split"] = split;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& row : seq.steps) steps.push_back(row);
    j["steps"] = std::move(steps);
    return j.dump();
}

struct FusedRecord {
    FusedSequence seq;
    std::string split;
};

inline FusedRecord parse_fused_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::bad_manifest, std::string("fused record: ") + e.what());
    }
    for (const char* key : {"id", "label", "split", "steps"}) {
        if (!j.contains(key)) {
            raise(errc::missing_field, std::string("fused record missing '") + key + "'");
        }
    }
    FusedRecord rec;
    rec.seq.clip_id = j.at("id").get<std::string>();
    rec.seq.label = j.at("label").get<int>();
    rec.split = j.at("split").get<std::string>();
    if (rec.split != "train" && rec.split != "test") {
        raise(errc::unknown_split, rec.seq.clip_id + ": unknown split '" + rec.split + "'");
    }
    const nlohmann::json& steps = j.at("steps");
    if (!steps.is_array()) raise(errc::bad_manifest, "steps must be an array");
    std::size_t d = 0;
    for (const auto& row : steps) {
        if (!row.is_array()) raise(errc::bad_manifest, "each step must be an array");
        std::vector<double> vals = row.get<std::vector<double>>();
        if (d == 0) d = vals.size();
        if (vals.size() != d || d == 0) {
            raise(errc::shape_mismatch, rec.seq.clip_id + ": ragged step rows");
        }
        rec.seq.steps.push_back(std::move(vals));
    }
    return rec;
}

} // namespace laughkit
