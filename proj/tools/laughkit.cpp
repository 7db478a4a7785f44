// laughkit: batch pipeline driver for the laughter-detection toolkit.
//
// Subcommands cover the whole workflow: synthesize a labelled corpus,
// extract fused feature sequences, train the classifier, evaluate on the
// held-out split, score a single clip, and inspect a cascade file.
//
// Exit codes are a stable contract: 0 ok, 2 usage, 3 I/O, 4 pipeline,
// 5 empty split, 6 dimension mismatch, 7 cascade/XML parse failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laughkit/laughkit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitPipeline = 4;
constexpr int kExitSplit = 5;
constexpr int kExitDim = 6;
constexpr int kExitParse = 7;

int exit_code_for(laughkit::errc code, int fallback) {
    using laughkit::errc;
    switch (code) {
        case errc::empty_split:
            return kExitSplit;
        case errc::shape_mismatch:
        case errc::length_mismatch:
            return kExitDim;
        case errc::xml_malformed:
        case errc::cascade_stage_type:
        case errc::cascade_feature_type:
        case errc::cascade_tree_depth:
        case errc::cascade_rect_bounds:
        case errc::cascade_feature_index:
        case errc::cascade_number:
        case errc::cascade_schema:
            return kExitParse;
        case errc::io_error:
        case errc::unreadable_file:
        case errc::not_a_wav:
        case errc::unsupported_encoding:
        case errc::truncated_data:
        case errc::bad_image:
        case errc::missing_frame_index:
            return kExitIo;
        case errc::bad_argument:
        case errc::bad_config:
            return kExitUsage;
        default:
            return fallback;
    }
}

struct CommonOpts {
    std::string config_path;
};

laughkit::RunConfig load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) return laughkit::RunConfig{};
    return laughkit::load_run_config(opts.config_path);
}

laughkit::CascadeModel load_cascade_or_builtin(const std::string& path) {
    if (path.empty()) return laughkit::toy_smile_cascade();
    return laughkit::load_cascade(path);
}

laughkit::PipelineConfig pipeline_config(const laughkit::RunConfig& cfg) {
    return laughkit::PipelineConfig{cfg.mfcc, cfg.fusion, cfg.detection};
}

struct DatasetSplits {
    std::vector<laughkit::Example> train, test;
    std::vector<std::string> test_ids;
    std::vector<int> test_labels;
};

DatasetSplits read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) laughkit::raise(laughkit::errc::io_error, "cannot open dataset: " + path);
    DatasetSplits out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        laughkit::FusedRecord rec;
        try {
            rec = laughkit::parse_fused_record(line);
        } catch (const laughkit::error& e) {
            laughkit::raise(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (rec.split == "train") {
            out.train.push_back(laughkit::to_example(rec.seq));
        } else {
            out.test.push_back(laughkit::to_example(rec.seq));
            out.test_ids.push_back(rec.seq.clip_id);
            out.test_labels.push_back(rec.seq.label);
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) laughkit::raise(laughkit::errc::io_error, "cannot write: " + path);
    out << body;
    if (!out) laughkit::raise(laughkit::errc::io_error, "short write: " + path);
}

int run_synth(const std::string& out_dir, int clips, std::uint64_t seed) {
    try {
        laughkit::CorpusManifest manifest =
            laughkit::generate_synthetic_corpus(out_dir, clips, seed, laughkit::SynthParams{});
        (void)manifest;
        std::printf("%s\n", (std::filesystem::path(out_dir) / "manifest.json").string().c_str());
        return kExitOk;
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "synth: %s\n", e.what());
        return exit_code_for(e.code(), kExitIo);
    }
}

int run_extract(const CommonOpts& common, const std::string& manifest_path,
                const std::string& out_dir, const std::string& cascade_flag) {
    laughkit::RunConfig cfg;
    laughkit::CascadeModel cascade;
    laughkit::CorpusManifest manifest;
    try {
        cfg = load_config(common);
        if (!cascade_flag.empty()) cfg.cascade_path = cascade_flag;
        cfg.validate();
        cascade = load_cascade_or_builtin(cfg.cascade_path);
        manifest = laughkit::parse_manifest(manifest_path);
        std::filesystem::create_directories(out_dir);
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "extract: %s\n", e.what());
        return exit_code_for(e.code(), kExitIo);
    }

    const laughkit::PipelineConfig pcfg = pipeline_config(cfg);
    std::string body;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const laughkit::ManifestEntry& entry = manifest.entries[i];
        std::fprintf(stderr, "[%zu/%zu] %s\n", i + 1, manifest.entries.size(), entry.id.c_str());
        try {
            const laughkit::FusedSequence seq =
                laughkit::fuse_manifest_entry(entry, cascade, pcfg);
            body += laughkit::serialize_fused_record(seq, entry.split);
            body += "\n";
        } catch (const std::exception& e) {
            std::fprintf(stderr, "extract: clip %s: %s\n", entry.id.c_str(), e.what());
            return kExitPipeline;
        }
    }
    try {
        write_text_file((std::filesystem::path(out_dir) / "fused.jsonl").string(), body);
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "extract: %s\n", e.what());
        return kExitIo;
    }
    std::printf("%s\n", (std::filesystem::path(out_dir) / "fused.jsonl").string().c_str());
    return kExitOk;
}

int run_train(const CommonOpts& common, const std::string& dataset_path,
              const std::string& model_out, std::string log_out) {
    try {
        laughkit::RunConfig cfg = load_config(common);
        cfg.validate();
        const DatasetSplits data = read_dataset(dataset_path);
        laughkit::TrainResult result =
            laughkit::train(cfg.model, cfg.train, data.train, data.test);
        laughkit::save_model(result.params, model_out);
        if (log_out.empty()) log_out = model_out + ".log.json";
        nlohmann::json log;
        log["epochs"] = nlohmann::json::array();
        for (const laughkit::EpochLog& e : result.log.epochs) {
            log["epochs"].push_back({{"train_loss", e.train_loss},
                                     {"train_accuracy", e.train_accuracy},
                                     {"val_accuracy", e.val_accuracy}});
        }
        write_text_file(log_out, log.dump(2) + "\n");
        const laughkit::EpochLog& last = result.log.epochs.back();
        std::printf("epochs=%zu train_loss=%.6f train_acc=%.4f val_acc=%.4f\n",
                    result.log.epochs.size(), last.train_loss, last.train_accuracy,
                    last.val_accuracy);
        return kExitOk;
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "train: %s\n", e.what());
        return exit_code_for(e.code(), kExitPipeline);
    }
}

int run_eval(const CommonOpts& common, const std::string& dataset_path,
             const std::string& model_path, double threshold_flag, bool threshold_set,
             const std::string& report_out) {
    try {
        laughkit::RunConfig cfg = load_config(common);
        if (threshold_set) cfg.threshold = threshold_flag;
        cfg.validate();
        const laughkit::ModelParams params = laughkit::load_model(model_path);
        const DatasetSplits data = read_dataset(dataset_path);
        if (data.test.empty()) {
            laughkit::raise(laughkit::errc::empty_split, "dataset has no test split");
        }
        std::vector<laughkit::ClipResult> clips;
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            laughkit::ClipResult r;
            r.id = data.test_ids[i];
            r.label = data.test_labels[i];
            r.score = laughkit::forward(params, data.test[i].x).score;
            r.pred = r.score >= cfg.threshold ? 1 : 0;
            clips.push_back(std::move(r));
        }
        const laughkit::EvalReport report = laughkit::make_report(clips, cfg.threshold);
        laughkit::write_report(report, report_out);
        std::printf("acc=%.4f prec=%.4f rec=%.4f f1=%.4f\n", report.metrics.accuracy,
                    report.metrics.precision, report.metrics.recall, report.metrics.f1);
        return kExitOk;
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "eval: %s\n", e.what());
        return exit_code_for(e.code(), kExitPipeline);
    }
}

int run_predict(const CommonOpts& common, const std::string& audio_path,
                const std::string& frames_dir, double fps, const std::string& model_path,
                const std::string& cascade_flag) {
    try {
        laughkit::RunConfig cfg = load_config(common);
        if (!cascade_flag.empty()) cfg.cascade_path = cascade_flag;
        cfg.validate();
        const laughkit::CascadeModel cascade = load_cascade_or_builtin(cfg.cascade_path);
        const laughkit::ModelParams params = laughkit::load_model(model_path);
        const laughkit::AudioClip audio = laughkit::read_wav(audio_path);
        const laughkit::FrameSequence frames = laughkit::load_frame_sequence(frames_dir, fps);
        const laughkit::FusedSequence seq =
            laughkit::fuse_clip(audio, frames, cascade, pipeline_config(cfg), 0, "clip");
        const double score = laughkit::predict_score(params, seq);
        nlohmann::json j;
        j["score"] = score;
        j["pred"] = score >= cfg.threshold ? 1 : 0;
        std::printf("%s\n", j.dump().c_str());
        return kExitOk;
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "predict: %s\n", e.what());
        return exit_code_for(e.code(), kExitPipeline);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "predict: %s\n", e.what());
        return kExitPipeline;
    }
}

int run_inspect(const std::string& cascade_path) {
    try {
        const laughkit::CascadeModel model = laughkit::load_cascade(cascade_path);
        int tilted = 0;
        for (const laughkit::HaarFeature& f : model.features) {
            if (f.tilted) ++tilted;
        }
        std::printf("%dx%d window, %zu stage%s, %zu feature%s, %d tilted\n", model.window_width,
                    model.window_height, model.stages.size(),
                    model.stages.size() == 1 ? "" : "s", model.features.size(),
                    model.features.size() == 1 ? "" : "s", tilted);
        return kExitOk;
    } catch (const laughkit::error& e) {
        std::fprintf(stderr, "inspect-cascade: %s\n", e.what());
        return exit_code_for(e.code(), kExitParse);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laughter detection toolkit"};
    app.require_subcommand(1);

    CommonOpts common;

    auto* synth = app.add_subcommand("synth", "generate a synthetic labelled corpus");
    std::string synth_out;
    int synth_clips = 40;
    std::uint64_t synth_seed = 42;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--clips", synth_clips, "number of clips (even, >= 4)");
    synth->add_option("--seed", synth_seed, "generator seed");

    auto* extract = app.add_subcommand("extract", "extract fused feature sequences");
    std::string extract_manifest, extract_out, extract_cascade;
    extract->add_option("--manifest", extract_manifest, "corpus manifest JSON")->required();
    extract->add_option("--config", common.config_path, "run config JSON");
    extract->add_option("--cascade", extract_cascade, "cascade XML (default: built-in)");
    extract->add_option("--out", extract_out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train the classifier on a fused dataset");
    std::string train_dataset, train_model_out, train_log_out;
    train->add_option("--dataset", train_dataset, "fused JSONL dataset")->required();
    train->add_option("--config", common.config_path, "run config JSON");
    train->add_option("--out", train_model_out, "model JSON output path")->required();
    train->add_option("--log", train_log_out, "train log JSON path (default: OUT.log.json)");

    auto* eval = app.add_subcommand("eval", "evaluate a model on the test split");
    std::string eval_dataset, eval_model, eval_report;
    double eval_threshold = 0.5;
    eval->add_option("--dataset", eval_dataset, "fused JSONL dataset")->required();
    eval->add_option("--model", eval_model, "model JSON")->required();
    eval->add_option("--config", common.config_path, "run config JSON");
    auto* thr_opt = eval->add_option("--threshold", eval_threshold, "decision threshold");
    eval->add_option("--out", eval_report, "report JSON output path")->required();

    auto* predict = app.add_subcommand("predict", "score a single clip");
    std::string pred_audio, pred_frames, pred_model, pred_cascade;
    double pred_fps = 25.0;
    predict->add_option("--audio", pred_audio, "WAV file")->required();
    predict->add_option("--frames", pred_frames, "frames directory")->required();
    predict->add_option("--fps", pred_fps, "frame rate of the frame sequence");
    predict->add_option("--model", pred_model, "model JSON")->required();
    predict->add_option("--config", common.config_path, "run config JSON");
    predict->add_option("--cascade", pred_cascade, "cascade XML (default: built-in)");

    auto* inspect = app.add_subcommand("inspect-cascade", "summarize a cascade XML file");
    std::string inspect_cascade;
    inspect->add_option("--cascade", inspect_cascade, "cascade XML")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (synth->parsed()) return run_synth(synth_out, synth_clips, synth_seed);
    if (extract->parsed()) return run_extract(common, extract_manifest, extract_out, extract_cascade);
    if (train->parsed()) return run_train(common, train_dataset, train_model_out, train_log_out);
    if (eval->parsed())
        return run_eval(common, eval_dataset, eval_model, eval_threshold, thr_opt->count() > 0,
                        eval_report);
    if (predict->parsed())
        return run_predict(common, pred_audio, pred_frames, pred_fps, pred_model, pred_cascade);
    if (inspect->parsed()) return run_inspect(inspect_cascade);
    return kExitUsage;
}
