#include "slr/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace slr {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config: bad number for " + key + ": " + v);
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config: bad integer for " + key + ": " + v);
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config: empty key or value at line " + std::to_string(lineno));

        if (key == "skin.h_lo") cfg.skin.h_lo = to_double(key, val);
        else if (key == "skin.h_hi") cfg.skin.h_hi = to_double(key, val);
        else if (key == "skin.s_lo") cfg.skin.s_lo = to_double(key, val);
        else if (key == "skin.s_hi") cfg.skin.s_hi = to_double(key, val);
        else if (key == "skin.adaptive") cfg.skin.adaptive = to_bool(key, val);
        else if (key == "morph.kernel") cfg.morph.kernel = static_cast<int>(to_long(key, val));
        else if (key == "morph.iterations")
            cfg.morph.iterations = static_cast<int>(to_long(key, val));
        else if (key == "min_area_frac") cfg.min_area_frac = to_double(key, val);
        else if (key == "normalize_features") cfg.normalize_features = to_bool(key, val);
        else if (key == "k") cfg.k = static_cast<int>(to_long(key, val));
        else if (key == "delta") cfg.delta = to_double(key, val);
        else if (key == "depth") cfg.depth = static_cast<int>(to_long(key, val));
        else if (key == "linkage") cfg.linkage = val;
        else if (key == "threshold_mode") cfg.threshold_mode = val;
        else if (key == "reject_threshold") cfg.reject_threshold = to_double(key, val);
        else if (key == "holdout.ratio") {
            const auto colon = val.find(':');
            if (colon == std::string::npos)
                throw ConfigError("config: holdout.ratio wants train:test, got " + val);
            cfg.train_pct = static_cast<int>(to_long(key, val.substr(0, colon)));
            cfg.test_pct = static_cast<int>(to_long(key, val.substr(colon + 1)));
        } else if (key == "trials") cfg.trials = static_cast<int>(to_long(key, val));
        else if (key == "kfold.k") cfg.kfold = static_cast<int>(to_long(key, val));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(key, val));
        else throw ConfigError("config: unknown key " + key);
    }
    validate_config(cfg);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "skin.h_lo = " << fmt_double(cfg.skin.h_lo) << "\n";
    out << "skin.h_hi = " << fmt_double(cfg.skin.h_hi) << "\n";
    out << "skin.s_lo = " << fmt_double(cfg.skin.s_lo) << "\n";
    out << "skin.s_hi = " << fmt_double(cfg.skin.s_hi) << "\n";
    out << "skin.adaptive = " << (cfg.skin.adaptive ? "true" : "false") << "\n";
    out << "morph.kernel = " << cfg.morph.kernel << "\n";
    out << "morph.iterations = " << cfg.morph.iterations << "\n";
    out << "min_area_frac = " << fmt_double(cfg.min_area_frac) << "\n";
    out << "normalize_features = " << (cfg.normalize_features ? "true" : "false") << "\n";
    out << "k = " << cfg.k << "\n";
    out << "delta = " << fmt_double(cfg.delta) << "\n";
    out << "depth = " << cfg.depth << "\n";
    out << "linkage = " << cfg.linkage << "\n";
    out << "threshold_mode = " << cfg.threshold_mode << "\n";
    if (cfg.reject_threshold)
        out << "reject_threshold = " << fmt_double(*cfg.reject_threshold) << "\n";
    out << "holdout.ratio = " << cfg.train_pct << ":" << cfg.test_pct << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "kfold.k = " << cfg.kfold << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("config: k must be >= 1");
    if (cfg.delta < 0.1 || cfg.delta > 1.0)
        throw ConfigError("config: delta must lie in [0.1, 1.0]");
    if (cfg.depth < 1) throw ConfigError("config: depth must be >= 1");
    if (cfg.morph.kernel < 1 || cfg.morph.kernel % 2 == 0)
        throw ConfigError("config: morph.kernel must be odd and >= 1");
    if (cfg.morph.iterations < 0) throw ConfigError("config: morph.iterations must be >= 0");
    if (cfg.min_area_frac < 0.0 || cfg.min_area_frac > 1.0)
        throw ConfigError("config: min_area_frac must lie in [0,1]");
    if (cfg.skin.h_lo < 0.0 || cfg.skin.h_lo >= 360.0 || cfg.skin.h_hi < 0.0 ||
        cfg.skin.h_hi >= 360.0)
        throw ConfigError("config: skin hue bounds must lie in [0,360)");
    if (cfg.skin.s_lo < 0.0 || cfg.skin.s_lo > 1.0 || cfg.skin.s_hi < 0.0 ||
        cfg.skin.s_hi > 1.0)
        throw ConfigError("config: skin saturation bounds must lie in [0,1]");
    if (cfg.train_pct + cfg.test_pct != 100 || cfg.train_pct <= 0 || cfg.test_pct <= 0)
        throw ConfigError("config: holdout ratio must be two positive values summing to 100");
    if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (cfg.kfold < 1) throw ConfigError("config: kfold.k must be >= 1");
    if (cfg.linkage != "average")
        throw ConfigError("config: unsupported linkage " + cfg.linkage);
    if (cfg.threshold_mode != "max" && cfg.threshold_mode != "root")
        throw ConfigError("config: threshold_mode must be max or root");
}

KbParams kb_params(const PipelineConfig& cfg) {
    KbParams p;
    p.k = cfg.k;
    p.delta = cfg.delta;
    p.depth = cfg.depth;
    p.linkage_name = cfg.linkage;
    p.threshold_mode =
        cfg.threshold_mode == "root" ? ThresholdMode::RootLink : ThresholdMode::GlobalMax;
    return p;
}

}  // namespace slr
