#include "slr/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "slr/image_io.hpp"

namespace slr {

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("manifest not readable: " + path.string());

    DatasetManifest manifest;
    manifest.root_path = path.parent_path();

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        InstanceEntry entry;
        std::string instance_tok;
        if (!(fields >> entry.label >> entry.signer >> instance_tok >> entry.frame_dir))
            throw DatasetError("malformed manifest record at line " + std::to_string(lineno));
        try {
            entry.instance = std::stoi(instance_tok);
        } catch (const std::exception&) {
            throw DatasetError("non-numeric instance id at line " + std::to_string(lineno));
        }
        if (entry.instance < 1)
            throw DatasetError("instance id must be >= 1 at line " + std::to_string(lineno));
        std::string frame;
        while (fields >> frame) entry.frames.push_back(frame);
        if (entry.frames.empty())
            throw DatasetError("empty frame list at line " + std::to_string(lineno) + " (" +
                               entry.id() + ")");
        std::sort(entry.frames.begin(), entry.frames.end());

        if (!seen.insert(entry.id()).second)
            throw DatasetError("duplicate manifest entry: " + entry.id());
        if (!std::filesystem::is_directory(manifest.root_path / entry.frame_dir))
            throw DatasetError(entry.id() + ": frame directory missing: " + entry.frame_dir);
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write manifest: " + path.string());
    out << "# label signer instance frame_dir frame_file...\n";
    for (const auto& e : manifest.entries) {
        out << e.label << ' ' << e.signer << ' ' << e.instance << ' ' << e.frame_dir;
        for (const auto& f : e.frames) out << ' ' << f;
        out << '\n';
    }
    if (!out) throw DatasetError("manifest write failed: " + path.string());
}

std::vector<RgbFrame> load_frames(const InstanceEntry& entry,
                                  const std::filesystem::path& root) {
    std::vector<RgbFrame> frames;
    frames.reserve(entry.frames.size());
    for (const auto& name : entry.frames) {
        const auto file = root / entry.frame_dir / name;
        RgbFrame frame;
        try {
            frame = read_image(file);
        } catch (const ImageIoError& e) {
            throw DatasetError(entry.id() + ": " + e.what());
        }
        if (!frames.empty() &&
            (frame.width != frames.front().width || frame.height != frames.front().height)) {
            throw DatasetError(entry.id() + ": frame dimension mismatch at " + name);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace slr
