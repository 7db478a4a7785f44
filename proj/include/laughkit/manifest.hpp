#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "laughkit/error.hpp"

namespace laughkit {

struct ManifestEntry {
    std::string id;
    std::string audio_path;
    std::string frames_dir;
    double frame_rate_hz = 0.0;
    int label = 0;            // 0 or 1
    std::string split;        // "train" or "test"

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;

    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

inline nlohmann::json manifest_to_json(const CorpusManifest& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : m.entries) {
        arr.push_back({{"id", e.id},
                       {"audio_path", e.audio_path},
                       {"frames_dir", e.frames_dir},
                       {"frame_rate_hz", e.frame_rate_hz},
                       {"label", e.label},
                       {"split", e.split}});
    }
    return arr;
}

// Validates the manifest schema. `base_dir`, when given, is used to resolve
// relative media paths (normally the manifest's own directory).
inline CorpusManifest manifest_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {}) {
    if (!j.is_array()) raise(errc::bad_manifest, "manifest must be a JSON array");

    static const std::set<std::string> kKeys = {"id",    "audio_path", "frames_dir",
                                                "frame_rate_hz", "label", "split"};
    CorpusManifest m;
    std::set<std::string> seen_ids;
    for (const auto& ej : j) {
        if (!ej.is_object()) raise(errc::bad_manifest, "manifest entry must be an object");
        for (const auto& key : kKeys) {
            if (!ej.contains(key)) raise(errc::missing_field, "manifest entry missing field '" + key + "'");
        }
        for (auto it = ej.begin(); it != ej.end(); ++it) {
            if (!kKeys.count(it.key())) raise(errc::bad_manifest, "unexpected manifest key '" + it.key() + "'");
        }

        ManifestEntry e;
        e.id = ej.at("id").get<std::string>();
        e.audio_path = ej.at("audio_path").get<std::string>();
        e.frames_dir = ej.at("frames_dir").get<std::string>();
        e.frame_rate_hz = ej.at("frame_rate_hz").get<double>();
        if (!ej.at("label").is_number_integer()) raise(errc::bad_label, e.id + ": label must be 0 or 1");
        e.label = ej.at("label").get<int>();
        e.split = ej.at("split").get<std::string>();

        if (!seen_ids.insert(e.id).second) raise(errc::duplicate_id, "duplicate manifest id '" + e.id + "'");
        if (e.label != 0 && e.label != 1) raise(errc::bad_label, e.id + ": label must be 0 or 1");
        if (e.split != "train" && e.split != "test") {
            raise(errc::unknown_split, e.id + ": unknown split '" + e.split + "'");
        }
        if (e.frame_rate_hz <= 0.0) raise(errc::bad_manifest, e.id + ": frame_rate_hz must be positive");

        if (!base_dir.empty()) {
            auto resolve = [&base_dir](const std::string& p) {
                std::filesystem::path fp(p);
                return fp.is_absolute() ? fp.string() : (base_dir / fp).string();
            };
            e.audio_path = resolve(e.audio_path);
            e.frames_dir = resolve(e.frames_dir);
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

inline CorpusManifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::bad_manifest, path.string() + ": " + e.what());
    }
    return manifest_from_json(j, path.parent_path());
}

inline void write_manifest(const std::filesystem::path& path, const CorpusManifest& m) {
    std::ofstream out(path);
    if (!out) raise(errc::io_error, "cannot write manifest " + path.string());
    out << manifest_to_json(m).dump(2) << "\n";
    if (!out) raise(errc::io_error, "short write to " + path.string());
}

} // namespace laughkit
