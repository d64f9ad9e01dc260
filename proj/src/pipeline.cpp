#include "slr/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "slr/keyframes.hpp"
#include "slr/rng.hpp"

namespace slr {

InstanceFeatures extract_features(const std::vector<RgbFrame>& frames,
                                  const PipelineConfig& cfg) {
    if (frames.empty()) throw PipelineError("no frames");
    const long min_area = std::lround(cfg.min_area_frac * frames.front().width *
                                      frames.front().height);

    std::vector<std::vector<ComponentBlob>> blobs_per_frame;
    blobs_per_frame.reserve(frames.size());
    for (const auto& frame : frames) {
        const HsvFrame hsv = rgb_to_hsv(frame);
        BinaryMask mask = skin_mask(hsv, cfg.skin);
        mask = morph_cleanup(mask, cfg.morph);
        blobs_per_frame.push_back(extract_components(mask, min_area));
    }

    InstanceFeatures out;
    out.tracked = assign_identities(blobs_per_frame);

    const double diag = std::hypot(static_cast<double>(frames.front().width),
                                   static_cast<double>(frames.front().height));
    for (std::size_t i = 0; i < out.tracked.size(); ++i) {
        if (out.tracked[i].overlap == Overlap::Unresolved) {
            ++out.unresolved;
            continue;
        }
        FrameFeatures f = compute_features(out.tracked[i]);
        if (cfg.normalize_features) {
            f.d1 /= diag;
            f.d2 /= diag;
            f.d3 /= diag;
            f.d4 /= diag;
            f.d5 /= diag;
            f.d6 /= diag;
        }
        out.features.push_back(f);
        out.feature_frames.push_back(static_cast<int>(i));
    }
    return out;
}

void write_feature_dump(const std::filesystem::path& path, const InstanceFeatures& feats) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write feature dump: " + path.string());
    auto fmt = [](double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    out << "# frame d1 d2 d3 d4 d5 d6 theta overlap\n";
    std::size_t row = 0;
    for (std::size_t i = 0; i < feats.tracked.size(); ++i) {
        const auto& tf = feats.tracked[i];
        if (tf.overlap == Overlap::Unresolved) {
            out << i << " - - - - - - - unresolved\n";
            continue;
        }
        const auto& f = feats.features[row++];
        out << i << " " << fmt(f.d1) << " " << fmt(f.d2) << " " << fmt(f.d3) << " "
            << fmt(f.d4) << " " << fmt(f.d5) << " " << fmt(f.d6) << " " << fmt(f.theta)
            << " " << to_string(tf.overlap) << "\n";
    }
}

SignInstance process_instance(const InstanceEntry& entry,
                              const std::filesystem::path& root,
                              const PipelineConfig& cfg) {
    try {
        const auto frames = load_frames(entry, root);
        const InstanceFeatures feats = extract_features(frames, cfg);
        if (feats.features.empty())
            throw PipelineError(entry.id() + ": no resolvable frames");
        SignInstance inst;
        inst.label = entry.label;
        inst.signer = entry.signer;
        inst.instance = entry.instance;
        inst.keyframes =
            select_keyframes(feats.features, cfg.k, rng::mix(cfg.seed, "keyframes"));
        return inst;
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(entry.id() + ": " + e.what());
    }
}

std::vector<SignInstance> process_dataset(
    const DatasetManifest& manifest, const PipelineConfig& cfg,
    const std::function<void(const SignInstance&)>& progress) {
    std::vector<SignInstance> out;
    out.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        out.push_back(process_instance(entry, manifest.root_path, cfg));
        if (progress) progress(out.back());
    }
    return out;
}

}  // namespace slr
