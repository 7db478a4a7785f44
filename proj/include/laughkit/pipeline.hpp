#pragma once

#include <string>

#include "laughkit/acoustics.hpp"
#include "laughkit/cascade.hpp"
#include "laughkit/detect.hpp"
#include "laughkit/fusion.hpp"
#include "laughkit/image_io.hpp"
#include "laughkit/manifest.hpp"
#include "laughkit/mfcc.hpp"
#include "laughkit/types.hpp"
#include "laughkit/wav.hpp"

namespace laughkit {

struct PipelineConfig {
    MfccConfig mfcc;
    FusionConfig fusion;
    DetectionParams detection;
};

// Single-clip pipeline: MFCC + clip acoustics from the audio, smile series
// from the frames, aligned and fused, then fixed to the configured length.
inline FusedSequence fuse_clip(const AudioClip& audio, const FrameSequence& frames,
                               const CascadeModel& cascade, const PipelineConfig& cfg, int label,
                               const std::string& clip_id) {
    cfg.fusion.validate();
    const MfccMatrix mfcc = compute_mfcc(audio, cfg.mfcc);
    const AcousticFeatureVector acoustics = compute_laughter_acoustics(audio, cfg.mfcc);
    const SmileSeries smiles = smile_presence_series(cascade, frames, cfg.detection);
    const auto aligned = align_streams(mfcc, smiles, frames.frame_rate_hz);
    FusedSequence seq = assemble_fused_sequence(mfcc, acoustics, aligned, label, clip_id);
    return fit_length(seq, cfg.fusion.target_steps);
}

inline FusedSequence fuse_manifest_entry(const ManifestEntry& entry, const CascadeModel& cascade,
                                         const PipelineConfig& cfg) {
    const AudioClip audio = read_wav(entry.audio_path);
    const FrameSequence frames = load_frame_sequence(entry.frames_dir, entry.frame_rate_hz);
    return fuse_clip(audio, frames, cascade, cfg, entry.label, entry.id);
}

} // namespace laughkit
