#include "slr/symbolic_kb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace slr {

double instance_distance(const KeyframeMatrix& a, const KeyframeMatrix& b) {
    if (a.k() != b.k() || a.k() == 0)
        throw KbError("instance_distance: key-frame count mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < a.k(); ++j) sum += row_distance(a.rows[j], b.rows[j]);
    return sum / static_cast<double>(a.k());
}

Dendrogram linkage(const std::vector<const KeyframeMatrix*>& instances) {
    const int n = static_cast<int>(instances.size());
    if (n < 1) throw KbError("linkage: no instances");

    Dendrogram d;
    d.leaf_count = n;
    if (n == 1) return d;

    // Node id == slot index: leaves 0..n-1, link t creates node n+t.
    const int total = 2 * n - 1;
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    std::vector<bool> active(total, false);
    std::vector<int> size(total, 0);
    for (int i = 0; i < n; ++i) {
        active[i] = true;
        size[i] = 1;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = instance_distance(*instances[i], *instances[j]);

    double prev_height = -std::numeric_limits<double>::infinity();
    for (int step = 0; step < n - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        const int limit = n + step;
        for (int i = 0; i < limit; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < limit; ++j) {
                if (!active[j]) continue;
                if (dist[i][j] < best) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        // Average linkage is reducible, so heights must not decrease.
        if (best < prev_height - 1e-9)
            throw KbError("linkage: non-monotone merge heights");
        prev_height = std::max(prev_height, best);

        const int id = n + step;
        d.links.push_back({bi, bj, best, size[bi] + size[bj]});
        size[id] = size[bi] + size[bj];
        active[id] = true;
        active[bi] = active[bj] = false;
        for (int k = 0; k < id; ++k) {
            if (!active[k]) continue;
            dist[id][k] = dist[k][id] =
                (size[bi] * dist[bi][k] + size[bj] * dist[bj][k]) / size[id];
        }
    }
    return d;
}

Dendrogram linkage(const std::vector<KeyframeMatrix>& instances) {
    std::vector<const KeyframeMatrix*> ptrs;
    ptrs.reserve(instances.size());
    for (const auto& m : instances) ptrs.push_back(&m);
    return linkage(ptrs);
}

namespace {

void gather_heights(const Dendrogram& d, int node, int level, int depth,
                    std::vector<double>& out) {
    if (node < d.leaf_count || level > depth) return;
    const auto& link = d.links[node - d.leaf_count];
    out.push_back(link.height);
    gather_heights(d, link.left, level + 1, depth, out);
    gather_heights(d, link.right, level + 1, depth, out);
}

}  // namespace

std::vector<double> inconsistency(const Dendrogram& d, int depth) {
    if (depth < 1) throw KbError("inconsistency: depth must be >= 1");
    std::vector<double> coeffs(d.links.size(), 0.0);
    std::vector<double> heights;
    for (std::size_t t = 0; t < d.links.size(); ++t) {
        heights.clear();
        gather_heights(d, d.leaf_count + static_cast<int>(t), 1, depth, heights);
        if (heights.size() <= 1) continue;
        const bool all_equal =
            std::all_of(heights.begin(), heights.end(),
                        [&](double h) { return h == heights.front(); });
        if (all_equal) continue;
        double mean = 0.0;
        for (double h : heights) mean += h;
        mean /= static_cast<double>(heights.size());
        double ss = 0.0;
        for (double h : heights) ss += (h - mean) * (h - mean);
        const double sd = std::sqrt(ss / static_cast<double>(heights.size() - 1));
        if (sd > 0.0) coeffs[t] = (d.links[t].height - mean) / sd;
    }
    return coeffs;
}

double cut_threshold(const std::vector<double>& coeffs, double delta, ThresholdMode mode) {
    if (coeffs.empty()) throw KbError("cut_threshold: empty coefficient list");
    if (delta < 0.1 || delta > 1.0)
        throw KbError("cut_threshold: delta must lie in [0.1, 1.0]");

    std::vector<double> nonzero;
    for (double c : coeffs)
        if (c != 0.0) nonzero.push_back(c);
    double gamma = 0.0;
    if (nonzero.size() >= 2) {
        double mean = 0.0;
        for (double c : nonzero) mean += c;
        mean /= static_cast<double>(nonzero.size());
        double ss = 0.0;
        for (double c : nonzero) ss += (c - mean) * (c - mean);
        gamma = std::sqrt(ss / static_cast<double>(nonzero.size()));  // population
    }
    const double reference = mode == ThresholdMode::RootLink
                                 ? coeffs.back()
                                 : *std::max_element(coeffs.begin(), coeffs.end());
    return reference - delta * gamma;
}

std::vector<std::vector<int>> cut(const Dendrogram& d, const std::vector<double>& coeffs,
                                  double th) {
    const int n = d.leaf_count;
    const int links = static_cast<int>(d.links.size());
    if (static_cast<int>(coeffs.size()) != links)
        throw KbError("cut: coefficient count does not match link count");

    // A link is accepted when its own coefficient passes and everything
    // beneath it already passed; children always precede parents in id
    // order, so one ascending pass suffices.
    std::vector<bool> accepted(links, false);
    auto child_ok = [&](int node) {
        return node < n || accepted[node - n];
    };
    for (int t = 0; t < links; ++t)
        accepted[t] = coeffs[t] <= th && child_ok(d.links[t].left) && child_ok(d.links[t].right);

    std::vector<int> parent(n + links, -1);
    for (int t = 0; t < links; ++t) {
        parent[d.links[t].left] = n + t;
        parent[d.links[t].right] = n + t;
    }

    std::vector<std::vector<int>> clusters;
    std::vector<int> stack;
    for (int node = 0; node < n + links; ++node) {
        const bool ok = node < n || accepted[node - n];
        if (!ok) continue;
        if (parent[node] >= 0 && accepted[parent[node] - n]) continue;  // not maximal
        std::vector<int> leaves;
        stack.assign(1, node);
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            if (cur < n) {
                leaves.push_back(cur);
            } else {
                stack.push_back(d.links[cur - n].right);
                stack.push_back(d.links[cur - n].left);
            }
        }
        std::sort(leaves.begin(), leaves.end());
        clusters.push_back(std::move(leaves));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return clusters;
}

std::vector<std::vector<int>> cut(const Dendrogram& d, double th, int depth) {
    return cut(d, inconsistency(d, depth), th);
}

std::vector<IntervalRow> aggregate_intervals(
    const std::vector<const KeyframeMatrix*>& members) {
    if (members.empty()) throw KbError("aggregate_intervals: no members");
    const std::size_t k = members.front()->k();
    for (const auto* m : members)
        if (m->k() != k) throw KbError("aggregate_intervals: key-frame count mismatch");

    std::vector<IntervalRow> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            double lo = members.front()->rows[j][f];
            double hi = lo;
            for (const auto* m : members) {
                lo = std::min(lo, m->rows[j][f]);
                hi = std::max(hi, m->rows[j][f]);
            }
            out[j][f] = {lo, hi};
        }
    }
    return out;
}

ClassClustering cluster_class(const std::vector<const KeyframeMatrix*>& instances,
                              const KbParams& params) {
    ClassClustering result;
    if (instances.empty()) throw KbError("cluster_class: no instances");
    if (instances.size() == 1) {
        result.clusters = {{0}};
        return result;
    }
    const Dendrogram d = linkage(instances);
    const auto coeffs = inconsistency(d, params.depth);
    result.th = cut_threshold(coeffs, params.delta, params.threshold_mode);
    result.clusters = cut(d, coeffs, result.th);
    return result;
}

Knowledgebase build_knowledgebase(const std::vector<SignInstance>& training,
                                  const KbParams& params) {
    if (training.empty()) throw KbError("build_knowledgebase: empty training set");

    std::map<std::string, std::vector<const SignInstance*>> by_class;
    for (const auto& inst : training) {
        if (static_cast<int>(inst.keyframes.k()) != params.k)
            throw KbError("build_knowledgebase: " + inst.id() + " has " +
                          std::to_string(inst.keyframes.k()) + " key frames, expected " +
                          std::to_string(params.k));
        by_class[inst.label].push_back(&inst);
    }

    Knowledgebase kb;
    kb.params = params;
    for (const auto& [label, insts] : by_class) {
        std::vector<const KeyframeMatrix*> matrices;
        matrices.reserve(insts.size());
        for (const auto* i : insts) matrices.push_back(&i->keyframes);

        const ClassClustering cc = cluster_class(matrices, params);
        kb.class_thresholds.push_back({label, cc.th});
        for (std::size_t c = 0; c < cc.clusters.size(); ++c) {
            SignTemplate tpl;
            tpl.label = label;
            tpl.cluster_id = static_cast<int>(c);
            tpl.member_count = static_cast<int>(cc.clusters[c].size());
            std::vector<const KeyframeMatrix*> members;
            for (int idx : cc.clusters[c]) {
                members.push_back(matrices[idx]);
                tpl.members.push_back(insts[idx]->id());
            }
            tpl.intervals = aggregate_intervals(members);
            kb.templates.push_back(std::move(tpl));
        }
    }
    return kb;
}

// ---- serialization ----

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw KbError(std::string("knowledgebase parse: bad number in ") + what);
    return v;
}

long parse_long(std::string_view s, const char* what) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw KbError(std::string("knowledgebase parse: bad integer in ") + what);
    return v;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::string save_kb(const Knowledgebase& kb) {
    std::ostringstream out;
    out << "slrkb " << kKbFormatVersion << "\n";
    out << "k " << kb.params.k << "\n";
    out << "delta " << fmt_double(kb.params.delta) << "\n";
    out << "depth " << kb.params.depth << "\n";
    out << "linkage " << kb.params.linkage_name << "\n";
    out << "threshold_mode "
        << (kb.params.threshold_mode == ThresholdMode::RootLink ? "root" : "max") << "\n";
    out << "similarity " << kb.params.similarity << "\n";
    out << "classes " << kb.class_thresholds.size() << "\n";
    for (const auto& ct : kb.class_thresholds)
        out << "class " << ct.label << " " << fmt_double(ct.th) << "\n";
    out << "templates " << kb.templates.size() << "\n";
    for (const auto& tpl : kb.templates) {
        out << "template " << tpl.label << " " << tpl.cluster_id << " " << tpl.member_count
            << "\n";
        for (const auto& m : tpl.members) out << "member " << m << "\n";
        for (const auto& row : tpl.intervals) {
            out << "row";
            for (const auto& cell : row)
                out << " " << fmt_double(cell.lo) << " " << fmt_double(cell.hi);
            out << "\n";
        }
    }
    std::string body = out.str();
    body += "end " + hex64(fnv1a(body)) + "\n";
    return body;
}

Knowledgebase load_kb(const std::string& bytes) {
    const std::size_t end_pos = bytes.rfind("end ");
    if (end_pos == std::string::npos || (end_pos != 0 && bytes[end_pos - 1] != '\n'))
        throw KbError("knowledgebase truncated: missing end record");
    const std::string_view body(bytes.data(), end_pos);
    std::string_view trailer(bytes.data() + end_pos, bytes.size() - end_pos);
    if (trailer.size() < 4 + 16 + 1 || trailer.substr(4, 16) != hex64(fnv1a(body)))
        throw KbError("knowledgebase checksum mismatch");

    std::istringstream in{std::string(body)};
    std::string line;
    auto next_fields = [&](const char* what) {
        if (!std::getline(in, line)) throw KbError(std::string("knowledgebase truncated at ") + what);
        return split_ws(line);
    };

    auto header = next_fields("header");
    if (header.size() != 2 || header[0] != "slrkb")
        throw KbError("not a knowledgebase file");
    if (parse_long(header[1], "version") != kKbFormatVersion)
        throw KbError("knowledgebase format version mismatch");

    Knowledgebase kb;
    auto f = next_fields("k");
    if (f.size() != 2 || f[0] != "k") throw KbError("knowledgebase parse: expected k");
    kb.params.k = static_cast<int>(parse_long(f[1], "k"));
    f = next_fields("delta");
    if (f.size() != 2 || f[0] != "delta") throw KbError("knowledgebase parse: expected delta");
    kb.params.delta = parse_double(f[1], "delta");
    f = next_fields("depth");
    if (f.size() != 2 || f[0] != "depth") throw KbError("knowledgebase parse: expected depth");
    kb.params.depth = static_cast<int>(parse_long(f[1], "depth"));
    f = next_fields("linkage");
    if (f.size() != 2 || f[0] != "linkage") throw KbError("knowledgebase parse: expected linkage");
    kb.params.linkage_name = std::string(f[1]);
    f = next_fields("threshold_mode");
    if (f.size() != 2 || f[0] != "threshold_mode")
        throw KbError("knowledgebase parse: expected threshold_mode");
    kb.params.threshold_mode =
        f[1] == "root" ? ThresholdMode::RootLink : ThresholdMode::GlobalMax;
    f = next_fields("similarity");
    if (f.size() != 2 || f[0] != "similarity")
        throw KbError("knowledgebase parse: expected similarity");
    kb.params.similarity = std::string(f[1]);

    f = next_fields("classes");
    if (f.size() != 2 || f[0] != "classes") throw KbError("knowledgebase parse: expected classes");
    const long n_classes = parse_long(f[1], "classes");
    for (long i = 0; i < n_classes; ++i) {
        f = next_fields("class");
        if (f.size() != 3 || f[0] != "class") throw KbError("knowledgebase parse: expected class");
        kb.class_thresholds.push_back({std::string(f[1]), parse_double(f[2], "class th")});
    }

    f = next_fields("templates");
    if (f.size() != 2 || f[0] != "templates")
        throw KbError("knowledgebase parse: expected templates");
    const long n_templates = parse_long(f[1], "templates");
    for (long t = 0; t < n_templates; ++t) {
        f = next_fields("template");
        if (f.size() != 4 || f[0] != "template")
            throw KbError("knowledgebase parse: expected template");
        SignTemplate tpl;
        tpl.label = std::string(f[1]);
        tpl.cluster_id = static_cast<int>(parse_long(f[2], "cluster_id"));
        tpl.member_count = static_cast<int>(parse_long(f[3], "member_count"));
        for (int m = 0; m < tpl.member_count; ++m) {
            f = next_fields("member");
            if (f.size() != 2 || f[0] != "member")
                throw KbError("knowledgebase parse: expected member");
            tpl.members.emplace_back(f[1]);
        }
        for (int r = 0; r < kb.params.k; ++r) {
            f = next_fields("row");
            if (f.size() != 1 + 2 * kFeatureCount || f[0] != "row")
                throw KbError("knowledgebase parse: bad row");
            IntervalRow row;
            for (std::size_t c = 0; c < kFeatureCount; ++c) {
                row[c].lo = parse_double(f[1 + 2 * c], "row lo");
                row[c].hi = parse_double(f[2 + 2 * c], "row hi");
                if (row[c].lo > row[c].hi)
                    throw KbError("knowledgebase parse: inverted interval");
            }
            tpl.intervals.push_back(row);
        }
        kb.templates.push_back(std::move(tpl));
    }
    return kb;
}

void save_kb_file(const std::filesystem::path& path, const Knowledgebase& kb) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw KbError("cannot write knowledgebase: " + path.string());
    const std::string bytes = save_kb(kb);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw KbError("knowledgebase write failed: " + path.string());
}

Knowledgebase load_kb_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw KbError("cannot read knowledgebase: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_kb(buf.str());
}

}  // namespace slr
