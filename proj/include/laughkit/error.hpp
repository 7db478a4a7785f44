#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace laughkit {

// Every failure the library can report, as a distinct value so callers and
// tests can branch on the cause instead of string-matching messages.
enum class errc {
    // WAV ingestion
    not_a_wav,
    unsupported_encoding,
    truncated_data,
    // frame sequences
    missing_frame_index,
    mixed_dimensions,
    unreadable_file,
    bad_image,
    // manifests
    duplicate_id,
    unknown_split,
    bad_label,
    missing_field,
    bad_manifest,
    // feature extraction
    too_short,
    bad_config,
    not_power_of_two,
    // integral images / detection
    out_of_bounds,
    // cascade XML
    xml_malformed,
    cascade_stage_type,
    cascade_feature_type,
    cascade_tree_depth,
    cascade_rect_bounds,
    cascade_feature_index,
    cascade_number,
    cascade_schema,
    // fusion / model
    length_mismatch,
    shape_mismatch,
    empty_input,
    empty_split,
    // misc
    io_error,
    bad_argument,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) {
    throw error(code, msg);
}

} // namespace laughkit
