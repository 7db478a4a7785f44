#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/integral_image.hpp"
#include "laughkit/xml.hpp"

namespace laughkit {

// Boosted Haar cascade in the OpenCV XML layout, restricted to stump-only
// stages (depth-1 trees). Thresholds compare variance-normalized feature
// values; each stump votes one of its two leaf values and a stage passes
// when the vote sum reaches the stage threshold.
struct WeightedRect {
    Rect rect;
    double weight = 0.0;
    friend bool operator==(const WeightedRect& a, const WeightedRect& b) {
        return a.rect.x == b.rect.x && a.rect.y == b.rect.y && a.rect.w == b.rect.w &&
               a.rect.h == b.rect.h && a.weight == b.weight;
    }
};

struct HaarFeature {
    std::vector<WeightedRect> rects; // two or three
    bool tilted = false;
    friend bool operator==(const HaarFeature&, const HaarFeature&) = default;
};

struct Stump {
    int feature_index = 0;
    double threshold = 0.0;
    double leaf_left = 0.0;  // vote when value < threshold
    double leaf_right = 0.0; // vote otherwise
    friend bool operator==(const Stump&, const Stump&) = default;
};

struct CascadeStage {
    double stage_threshold = 0.0;
    std::vector<Stump> stumps;
    friend bool operator==(const CascadeStage&, const CascadeStage&) = default;
};

struct CascadeModel {
    int window_width = 0;
    int window_height = 0;
    std::vector<CascadeStage> stages;
    std::vector<HaarFeature> features;
    friend bool operator==(const CascadeModel&, const CascadeModel&) = default;
};

namespace detail {

[[noreturn]] inline void cascade_fail(errc code, const XmlNode& where, const std::string& what) {
    raise(code, "cascade: line " + std::to_string(where.line) + ": " + what);
}

inline std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' && text[i] != '\r') ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

inline double parse_cascade_double(std::string_view tok, const XmlNode& where) {
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    // OpenCV writes integral weights with a trailing dot ("-1.")
    if (ec == std::errc() && ptr + 1 == last && *ptr == '.') ++ptr;
    if (ec != std::errc() || ptr != last) {
        cascade_fail(errc::cascade_number, where, "malformed number '" + std::string(tok) + "'");
    }
    return value;
}

inline long parse_cascade_int(std::string_view tok, const XmlNode& where) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        cascade_fail(errc::cascade_number, where, "malformed integer '" + std::string(tok) + "'");
    }
    return value;
}

inline const XmlNode& require_child(const XmlNode& parent, std::string_view name) {
    const XmlNode* c = parent.child(name);
    if (!c) {
        cascade_fail(errc::cascade_schema, parent,
                     "element '" + parent.name + "' is missing <" + std::string(name) + ">");
    }
    return *c;
}

inline void validate_rect_in_window(const WeightedRect& wr, bool tilted, int win_w, int win_h,
                                    const XmlNode& where) {
    const Rect& r = wr.rect;
    if (r.w < 1 || r.h < 1) {
        cascade_fail(errc::cascade_rect_bounds, where, "rectangle has empty extent");
    }
    bool ok;
    if (!tilted) {
        ok = r.x >= 0 && r.y >= 0 && r.x + r.w <= win_w && r.y + r.h <= win_h;
    } else {
        ok = r.x - (r.h - 1) >= 0 && r.x + r.w <= win_w && r.y >= 0 && r.y + r.w + r.h - 1 <= win_h;
    }
    if (!ok) cascade_fail(errc::cascade_rect_bounds, where, "rectangle outside detection window");
}

} // namespace detail

inline CascadeModel parse_cascade_xml(std::string_view xml_text) {
    using namespace detail;
    XmlNode doc = parse_xml(xml_text);
    if (doc.name != "opencv_storage") {
        cascade_fail(errc::cascade_schema, doc, "root element must be <opencv_storage>");
    }
    const XmlNode& casc = require_child(doc, "cascade");

    const XmlNode& stage_type = require_child(casc, "stageType");
    if (split_tokens(stage_type.text) != std::vector<std::string_view>{"BOOST"}) {
        cascade_fail(errc::cascade_stage_type, stage_type,
                     "unsupported stageType (only BOOST is supported)");
    }
    const XmlNode& feature_type = require_child(casc, "featureType");
    if (split_tokens(feature_type.text) != std::vector<std::string_view>{"HAAR"}) {
        cascade_fail(errc::cascade_feature_type, feature_type,
                     "unsupported featureType (only HAAR is supported)");
    }

    CascadeModel model;
    const XmlNode& width_node = require_child(casc, "width");
    const XmlNode& height_node = require_child(casc, "height");
    {
        auto wt = split_tokens(width_node.text);
        auto ht = split_tokens(height_node.text);
        if (wt.size() != 1) cascade_fail(errc::cascade_schema, width_node, "width must be a single integer");
        if (ht.size() != 1) cascade_fail(errc::cascade_schema, height_node, "height must be a single integer");
        const long w = parse_cascade_int(wt[0], width_node);
        const long h = parse_cascade_int(ht[0], height_node);
        if (w < 1 || h < 1 || w > 4096 || h > 4096) {
            cascade_fail(errc::cascade_schema, width_node, "window size out of range");
        }
        model.window_width = static_cast<int>(w);
        model.window_height = static_cast<int>(h);
    }

    // features first so stump feature indices can be validated against them
    const XmlNode& features_node = require_child(casc, "features");
    for (const XmlNode* feat_node : features_node.children_named("_")) {
        HaarFeature feat;
        if (const XmlNode* tilted_node = feat_node->child("tilted")) {
            auto toks = split_tokens(tilted_node->text);
            if (toks.size() != 1) {
                cascade_fail(errc::cascade_schema, *tilted_node, "tilted must be a single flag");
            }
            const long flag = parse_cascade_int(toks[0], *tilted_node);
            if (flag != 0 && flag != 1) {
                cascade_fail(errc::cascade_schema, *tilted_node, "tilted flag must be 0 or 1");
            }
            feat.tilted = flag == 1;
        }
        const XmlNode& rects_node = require_child(*feat_node, "rects");
        for (const XmlNode* rect_node : rects_node.children_named("_")) {
            auto toks = split_tokens(rect_node->text);
            if (toks.size() != 5) {
                cascade_fail(errc::cascade_schema, *rect_node,
                             "rectangle needs 5 values (x y w h weight)");
            }
            WeightedRect wr;
            wr.rect.x = static_cast<int>(parse_cascade_int(toks[0], *rect_node));
            wr.rect.y = static_cast<int>(parse_cascade_int(toks[1], *rect_node));
            wr.rect.w = static_cast<int>(parse_cascade_int(toks[2], *rect_node));
            wr.rect.h = static_cast<int>(parse_cascade_int(toks[3], *rect_node));
            wr.weight = parse_cascade_double(toks[4], *rect_node);
            validate_rect_in_window(wr, feat.tilted, model.window_width, model.window_height,
                                    *rect_node);
            feat.rects.push_back(wr);
        }
        if (feat.rects.size() < 2 || feat.rects.size() > 3) {
            cascade_fail(errc::cascade_schema, rects_node,
                         "feature needs two or three rectangles, got " +
                             std::to_string(feat.rects.size()));
        }
        model.features.push_back(std::move(feat));
    }

    const XmlNode& stages_node = require_child(casc, "stages");
    for (const XmlNode* stage_node : stages_node.children_named("_")) {
        CascadeStage stage;
        const XmlNode& thr_node = require_child(*stage_node, "stageThreshold");
        {
            auto toks = split_tokens(thr_node.text);
            if (toks.size() != 1) {
                cascade_fail(errc::cascade_schema, thr_node, "stageThreshold must be a single number");
            }
            stage.stage_threshold = parse_cascade_double(toks[0], thr_node);
        }
        const XmlNode& weak_node = require_child(*stage_node, "weakClassifiers");
        for (const XmlNode* stump_node : weak_node.children_named("_")) {
            const XmlNode& internal = require_child(*stump_node, "internalNodes");
            auto toks = split_tokens(internal.text);
            if (toks.size() != 4) {
                cascade_fail(errc::cascade_tree_depth, internal,
                             "weak classifier is not a stump (expected one internal node)");
            }
            const long left = parse_cascade_int(toks[0], internal);
            const long right = parse_cascade_int(toks[1], internal);
            if (left > 0 || right > 0) {
                cascade_fail(errc::cascade_tree_depth, internal,
                             "weak classifier is not a stump (child node references)");
            }
            Stump stump;
            stump.feature_index = static_cast<int>(parse_cascade_int(toks[2], internal));
            if (stump.feature_index < 0 ||
                stump.feature_index >= static_cast<int>(model.features.size())) {
                cascade_fail(errc::cascade_feature_index, internal,
                             "feature index " + std::to_string(stump.feature_index) +
                                 " out of range (have " + std::to_string(model.features.size()) +
                                 " features)");
            }
            stump.threshold = parse_cascade_double(toks[3], internal);

            const XmlNode& leaves = require_child(*stump_node, "leafValues");
            auto leaf_toks = split_tokens(leaves.text);
            const long left_leaf = -left;
            const long right_leaf = -right;
            if (left_leaf >= static_cast<long>(leaf_toks.size()) ||
                right_leaf >= static_cast<long>(leaf_toks.size())) {
                cascade_fail(errc::cascade_schema, leaves, "leaf index out of range");
            }
            stump.leaf_left = parse_cascade_double(leaf_toks[left_leaf], leaves);
            stump.leaf_right = parse_cascade_double(leaf_toks[right_leaf], leaves);
            stage.stumps.push_back(stump);
        }
        model.stages.push_back(std::move(stage));
    }
    return model;
}

inline CascadeModel load_cascade(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open cascade file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cascade_xml(buf.str());
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace detail

// Writes the model back in the same XML layout it is parsed from. Numbers use
// shortest round-trip formatting, so parse(serialize(m)) == m exactly.
inline std::string serialize_cascade(const CascadeModel& model) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "<?xml version=\"1.0\"?>\n<opencv_storage>\n";
    out << "<cascade type_id=\"opencv-cascade-classifier\">\n";
    out << "  <stageType>BOOST</stageType>\n";
    out << "  <featureType>HAAR</featureType>\n";
    out << "  <height>" << model.window_height << "</height>\n";
    out << "  <width>" << model.window_width << "</width>\n";
    out << "  <stageNum>" << model.stages.size() << "</stageNum>\n";
    out << "  <stages>\n";
    for (const CascadeStage& stage : model.stages) {
        out << "    <_>\n";
        out << "      <maxWeakCount>" << stage.stumps.size() << "</maxWeakCount>\n";
        out << "      <stageThreshold>" << fmt_double(stage.stage_threshold)
            << "</stageThreshold>\n";
        out << "      <weakClassifiers>\n";
        for (const Stump& s : stage.stumps) {
            out << "        <_>\n";
            out << "          <internalNodes>0 -1 " << s.feature_index << ' '
                << fmt_double(s.threshold) << "</internalNodes>\n";
            out << "          <leafValues>" << fmt_double(s.leaf_left) << ' '
                << fmt_double(s.leaf_right) << "</leafValues>\n";
            out << "        </_>\n";
        }
        out << "      </weakClassifiers>\n";
        out << "    </_>\n";
    }
    out << "  </stages>\n";
    out << "  <features>\n";
    for (const HaarFeature& feat : model.features) {
        out << "    <_>\n      <rects>\n";
        for (const WeightedRect& wr : feat.rects) {
            out << "        <_>" << wr.rect.x << ' ' << wr.rect.y << ' ' << wr.rect.w << ' '
                << wr.rect.h << ' ' << fmt_double(wr.weight) << "</_>\n";
        }
        out << "      </rects>\n";
        if (feat.tilted) out << "      <tilted>1</tilted>\n";
        out << "    </_>\n";
    }
    out << "  </features>\n";
    out << "</cascade>\n</opencv_storage>\n";
    return out.str();
}

inline void save_cascade(const CascadeModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write cascade file: " + path);
    out << serialize_cascade(model);
    if (!out) raise(errc::io_error, "short write: " + path);
}

} // namespace laughkit
