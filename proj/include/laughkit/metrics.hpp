#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "laughkit/error.hpp"

namespace laughkit {

struct ConfusionMatrix {
    long long tp = 0, fp = 0, fn = 0, tn = 0;

    long long total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct ClipResult {
    std::string id;
    double score = 0.0;
    int pred = 0;
    int label = 0;
    friend bool operator==(const ClipResult&, const ClipResult&) = default;
};

struct EvalReport {
    double threshold = 0.5;
    ConfusionMatrix confusion;
    Metrics metrics;
    std::vector<ClipResult> per_clip;
};

// pred = (score >= threshold); the boundary counts as positive.
inline ConfusionMatrix confusion_from_scores(const std::vector<std::pair<double, int>>& pairs,
                                             double threshold) {
    if (pairs.empty()) raise(errc::empty_input, "no score/label pairs");
    ConfusionMatrix m;
    for (const auto& [score, label] : pairs) {
        if (!(score >= 0.0 && score <= 1.0)) {
            raise(errc::bad_argument, "score outside [0,1]");
        }
        if (label != 0 && label != 1) raise(errc::bad_label, "label must be 0 or 1");
        const int pred = score >= threshold ? 1 : 0;
        if (pred == 1 && label == 1) ++m.tp;
        else if (pred == 1 && label == 0) ++m.fp;
        else if (pred == 0 && label == 1) ++m.fn;
        else ++m.tn;
    }
    return m;
}

// 0/0 cases are defined as 0 so degenerate splits still produce a report.
inline Metrics compute_metrics(const ConfusionMatrix& m) {
    if (m.total() < 1) raise(errc::empty_input, "confusion matrix is empty");
    if (m.tp < 0 || m.fp < 0 || m.fn < 0 || m.tn < 0) {
        raise(errc::bad_argument, "confusion counts must be nonnegative");
    }
    Metrics out;
    out.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
    out.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    out.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

inline EvalReport make_report(const std::vector<ClipResult>& per_clip, double threshold) {
    std::vector<std::pair<double, int>> pairs;
    pairs.reserve(per_clip.size());
    for (const ClipResult& c : per_clip) pairs.emplace_back(c.score, c.label);
    EvalReport report;
    report.threshold = threshold;
    report.confusion = confusion_from_scores(pairs, threshold);
    report.metrics = compute_metrics(report.confusion);
    report.per_clip = per_clip;
    return report;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c);
            }
        }
    }
    return out;
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

// Canonical report encoding: keys sorted, reals with six decimal places,
// per-clip order preserved. The byte layout is part of the CLI contract.
inline std::string serialize_report(const EvalReport& r) {
    using detail::fixed6;
    using detail::json_escape;
    std::string out = "{";
    out += "\"accuracy\": " + fixed6(r.metrics.accuracy) + ", ";
    out += "\"confusion\": {\"fn\": " + std::to_string(r.confusion.fn) +
           ", \"fp\": " + std::to_string(r.confusion.fp) +
           ", \"tn\": " + std::to_string(r.confusion.tn) +
           ", \"tp\": " + std::to_string(r.confusion.tp) + "}, ";
    out += "\"f1\": " + fixed6(r.metrics.f1) + ", ";
    out += "\"per_clip\": [";
    for (std::size_t i = 0; i < r.per_clip.size(); ++i) {
        const ClipResult& c = r.per_clip[i];
        if (i) out += ", ";
        out += "{\"id\": \"" + json_escape(c.id) + "\", \"label\": " + std::to_string(c.label) +
               ", \"pred\": " + std::to_string(c.pred) + ", \"score\": " + fixed6(c.score) + "}";
    }
    out += "], ";
    out += "\"precision\": " + fixed6(r.metrics.precision) + ", ";
    out += "\"recall\": " + fixed6(r.metrics.recall) + ", ";
    out += "\"threshold\": " + fixed6(r.threshold);
    out += "}\n";
    return out;
}

inline void write_report(const EvalReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write report: " + path);
    out << serialize_report(r);
    if (!out) raise(errc::io_error, "short write: " + path);
}

inline EvalReport parse_report(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::bad_manifest, std::string("report: ") + e.what());
    }
    EvalReport r;
    r.threshold = j.at("threshold").get<double>();
    r.metrics.accuracy = j.at("accuracy").get<double>();
    r.metrics.precision = j.at("precision").get<double>();
    r.metrics.recall = j.at("recall").get<double>();
    r.metrics.f1 = j.at("f1").get<double>();
    const auto& cj = j.at("confusion");
    r.confusion = ConfusionMatrix{cj.at("tp").get<long long>(), cj.at("fp").get<long long>(),
                                  cj.at("fn").get<long long>(), cj.at("tn").get<long long>()};
    for (const auto& pc : j.at("per_clip")) {
        r.per_clip.push_back(ClipResult{pc.at("id").get<std::string>(),
                                        pc.at("score").get<double>(), pc.at("pred").get<int>(),
                                        pc.at("label").get<int>()});
    }
    return r;
}

} // namespace laughkit
