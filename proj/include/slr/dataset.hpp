#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/image.hpp"

namespace slr {

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One recorded performance of one sign. `frames` holds file names relative
// to `frame_dir`, kept in lexicographic order (file names are expected to be
// zero-padded so lexicographic order is temporal order).
struct InstanceEntry {
    std::string label;
    std::string signer;
    int instance = 0;
    std::string frame_dir;  // relative to the manifest root
    std::vector<std::string> frames;

    std::string id() const {
        return label + "/" + signer + "/" + std::to_string(instance);
    }
};

struct DatasetManifest {
    std::filesystem::path root_path;
    std::vector<InstanceEntry> entries;
};

// Manifest: UTF-8 text, one instance per line, '#' comments, blank lines
// ignored. Whitespace-separated fields:
//   label signer instance frame_dir frame_file...
// Duplicate (label, signer, instance) triples and empty frame lists are
// rejected. Frame lists are sorted lexicographically on load.
DatasetManifest load_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Loads and decodes all frames of an instance, in manifest order. Every
// frame of the instance must share the same dimensions.
std::vector<RgbFrame> load_frames(const InstanceEntry& entry,
                                  const std::filesystem::path& root);

}  // namespace slr
