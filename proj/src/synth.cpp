#include "slr/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "slr/image_io.hpp"
#include "slr/rng.hpp"

namespace slr {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else             { r = c; b = x; }
    const double m = v - c;
    auto q = [&](double u) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(u + m, 0.0, 1.0) * 255.0));
    };
    return {q(r), q(g), q(b)};
}

// Closed Catmull-Rom spline through the control points, t in [0,1).
Point spline_at(const std::vector<Point>& ctrl, double t) {
    const int m = static_cast<int>(ctrl.size());
    t -= std::floor(t);
    const double ft = t * m;
    const int s = std::min(static_cast<int>(ft), m - 1);
    const double u = ft - s;
    const Point& p0 = ctrl[(s - 1 + m) % m];
    const Point& p1 = ctrl[s];
    const Point& p2 = ctrl[(s + 1) % m];
    const Point& p3 = ctrl[(s + 2) % m];
    const double u2 = u * u, u3 = u2 * u;
    auto cr = [&](double a0, double a1, double a2, double a3) {
        return 0.5 * ((2.0 * a1) + (-a0 + a2) * u +
                      (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3) * u2 +
                      (-a0 + 3.0 * a1 - 3.0 * a2 + a3) * u3);
    };
    return {cr(p0.x, p1.x, p2.x, p3.x), cr(p0.y, p1.y, p2.y, p3.y)};
}

struct Ellipse {
    Point center;
    double rx = 0, ry = 0;

    bool inside(int x, int y) const {
        const double dx = (x - center.x) / rx;
        const double dy = (y - center.y) / ry;
        return dx * dx + dy * dy <= 1.0;
    }
};

struct Raster {
    Point centroid;
    long count = 0;
    int xmin = 0, xmax = -1, ymin = 0, ymax = -1;
};

// Fills the ellipse with the given color and returns the rasterized pixel
// statistics (the oracle centroid is the rendered one, not the ideal
// center).
Raster fill_ellipse(RgbFrame& img, const Ellipse& e, Rgb color) {
    Raster r;
    r.xmin = std::max(0, static_cast<int>(std::floor(e.center.x - e.rx)));
    r.xmax = std::min(img.width - 1, static_cast<int>(std::ceil(e.center.x + e.rx)));
    r.ymin = std::max(0, static_cast<int>(std::floor(e.center.y - e.ry)));
    r.ymax = std::min(img.height - 1, static_cast<int>(std::ceil(e.center.y + e.ry)));
    double sx = 0, sy = 0;
    for (int y = r.ymin; y <= r.ymax; ++y) {
        for (int x = r.xmin; x <= r.xmax; ++x) {
            if (!e.inside(x, y)) continue;
            const std::size_t off = img.offset(x, y);
            img.pixels[off] = color.r;
            img.pixels[off + 1] = color.g;
            img.pixels[off + 2] = color.b;
            sx += x;
            sy += y;
            ++r.count;
        }
    }
    if (r.count > 0) r.centroid = {sx / r.count, sy / r.count};
    return r;
}

// True when some pixel of a lies within Chebyshev distance <= 2 of a pixel
// of b, i.e. the components would merge (or nearly merge) in a skin mask.
bool components_touch(const Ellipse& a, const Ellipse& b, int w, int h) {
    const int xmin = std::max(0, static_cast<int>(std::floor(a.center.x - a.rx)) - 2);
    const int xmax = std::min(w - 1, static_cast<int>(std::ceil(a.center.x + a.rx)) + 2);
    const int ymin = std::max(0, static_cast<int>(std::floor(a.center.y - a.ry)) - 2);
    const int ymax = std::min(h - 1, static_cast<int>(std::ceil(a.center.y + a.ry)) + 2);
    for (int y = ymin; y <= ymax; ++y)
        for (int x = xmin; x <= xmax; ++x)
            if (a.inside(x, y))
                for (int dy = -2; dy <= 2; ++dy)
                    for (int dx = -2; dx <= 2; ++dx)
                        if (b.inside(x + dx, y + dy)) return true;
    return false;
}

double mean_trajectory_distance(const SynthClassSpec& a, const SynthClassSpec& b) {
    constexpr int kSamples = 50;
    double sum = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double t = static_cast<double>(i) / kSamples;
        sum += distance(spline_at(a.manual_ctrl, t), spline_at(b.manual_ctrl, t));
        sum += distance(spline_at(a.nonmanual_ctrl, t), spline_at(b.nonmanual_ctrl, t));
    }
    return sum / (2.0 * kSamples);
}

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<SynthClassSpec> make_class_specs(const SynthConfig& cfg) {
    if (cfg.classes < 1) throw SynthError("need at least one class");
    const double w = cfg.width, h = cfg.height;
    const double unit = std::min(w, h);
    const double hand_r = 0.05 * unit;
    const Point face_center{0.5 * w, 0.20 * h};
    const double face_ry = 0.11 * h;
    const Point loop_center{0.5 * w, 0.68 * h};
    const int n_manual = 5;

    const int n_overlap =
        static_cast<int>(std::lround(cfg.classes * std::clamp(cfg.overlap_fraction, 0.0, 1.0)));
    const int first_overlap = cfg.classes - n_overlap;

    std::vector<SynthClassSpec> specs;
    for (int c = 0; c < cfg.classes; ++c) {
        SynthClassSpec spec;
        {
            std::ostringstream label;
            label << "C" << (c + 1 < 10 ? "0" : "") << c + 1;
            spec.label = label.str();
        }

        // Manual hand: a lobed loop below the face, phase-rotated per class.
        const double phase = 2.0 * kPi * c / cfg.classes - kPi / 4.0;
        for (int k = 0; k < n_manual; ++k) {
            const double ang = phase + 2.0 * kPi * k / n_manual;
            const double wobble =
                1.0 + 0.20 * std::sin(2.0 * kPi * (k + 1.618 * c) / n_manual);
            const double r = 0.19 * unit * wobble;
            spec.manual_ctrl.push_back(
                {loop_center.x + r * std::cos(ang), loop_center.y + r * std::sin(ang)});
        }

        // Non-manual hand: a small loop parked in a lower corner, the side
        // alternating by class so neighbours differ in more than phase.
        const double psi = 0.7 * c;
        const int side = c % 2 == 0 ? -1 : 1;
        const Point home{loop_center.x + side * (0.33 * w + 0.03 * w * std::sin(psi)),
                         0.80 * h + 0.05 * h * std::cos(psi)};
        const double amp = unit * (0.035 + 0.02 * std::abs(std::sin(psi + 0.9)));
        for (int k = 0; k < 3; ++k) {
            const double ang = psi + kPi / 2.0 + 2.0 * kPi * k / 3.0;
            spec.nonmanual_ctrl.push_back(
                {home.x + amp * std::cos(ang), home.y + amp * std::sin(ang)});
        }

        if (c >= first_overlap) {
            const int kv = 3;  // mid-sequence control point, never the start
            const double tv = static_cast<double>(kv) / n_manual;
            if ((c - first_overlap) % 2 == 0) {
                spec.manual_ctrl[kv] = {face_center.x, face_center.y + 0.4 * face_ry};
                spec.face_visit_time = tv;
            } else {
                // Aim at the non-manual hand's actual position at the visit
                // moment, one hand radius off-center: deep enough to merge,
                // shallow enough that the merged blob keeps most of both
                // components' area.
                const Point nm = spline_at(spec.nonmanual_ctrl, tv);
                spec.manual_ctrl[kv] = {nm.x - side * hand_r, nm.y};
                spec.hands_visit_time = tv;
            }
        }
        specs.push_back(std::move(spec));
    }

    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const double d = mean_trajectory_distance(specs[i], specs[j]);
            if (d < cfg.min_class_separation) {
                std::ostringstream msg;
                msg << "classes " << specs[i].label << " and " << specs[j].label
                    << " are only " << d << " px apart (need "
                    << cfg.min_class_separation
                    << "); reduce the class count or min_class_separation";
                throw SynthError(msg.str());
            }
        }
    }
    return specs;
}

SynthResult generate_dataset(const std::vector<SynthClassSpec>& specs,
                             const SynthConfig& cfg,
                             const std::filesystem::path& out_dir) {
    if (specs.empty()) throw SynthError("no class specs");
    if (cfg.signers < 1 || cfg.instances < 1)
        throw SynthError("signers and instances must be >= 1");
    if (cfg.image_format != "png" && cfg.image_format != "ppm")
        throw SynthError("image_format must be png or ppm");
    if (cfg.duration_min < 1 || cfg.duration_max < cfg.duration_min)
        throw SynthError("bad duration range");

    const double w = cfg.width, h = cfg.height;
    const double unit = std::min(w, h);
    const double hand_r = 0.05 * unit;
    const double face_rx = 0.09 * w, face_ry = 0.11 * h;
    const Rgb background = hsv_to_rgb(215.0, 0.45, 0.50);

    std::filesystem::create_directories(out_dir);

    SynthResult result;
    result.manifest.root_path = out_dir;

    for (int s = 0; s < cfg.signers; ++s) {
        const std::string signer = "s" + std::to_string(s + 1);
        rng::Engine style_eng(rng::mix(cfg.seed, "signer/" + signer));
        const double sdx = cfg.signer_jitter * rng::uniform(style_eng, -1.0, 1.0);
        const double sdy = cfg.signer_jitter * rng::uniform(style_eng, -1.0, 1.0);
        const Rgb skin = hsv_to_rgb(20.0 + rng::uniform(style_eng, -5.0, 5.0),
                                    0.45 + rng::uniform(style_eng, -0.06, 0.06), 0.85);

        for (const auto& spec : specs) {
            for (int inst = 1; inst <= cfg.instances; ++inst) {
                const std::string id = spec.label + "/" + signer + "/" + std::to_string(inst);
                const std::uint64_t inst_seed = rng::mix(cfg.seed, id);

                int duration = (cfg.duration_min + cfg.duration_max) / 2;
                if (cfg.instance_jitter > 0.0) {
                    rng::Engine dur_eng(rng::mix(inst_seed, "dur"));
                    duration = cfg.duration_min +
                               static_cast<int>(rng::bounded(
                                   dur_eng, cfg.duration_max - cfg.duration_min + 1));
                }

                // Per-instance copies of the control polygons: signer
                // offset plus clamped instance noise.
                rng::Engine geom_eng(rng::mix(inst_seed, "geom"));
                auto jittered = [&](const std::vector<Point>& ctrl) {
                    std::vector<Point> out;
                    out.reserve(ctrl.size());
                    for (const auto& p : ctrl) {
                        double x = p.x + sdx, y = p.y + sdy;
                        if (cfg.instance_jitter > 0.0) {
                            x += cfg.instance_jitter * rng::uniform(geom_eng, -1.0, 1.0);
                            y += cfg.instance_jitter * rng::uniform(geom_eng, -1.0, 1.0);
                        }
                        x = std::clamp(x, hand_r + 2.0, w - 3.0 - hand_r);
                        y = std::clamp(y, hand_r + 2.0, h - 3.0 - hand_r);
                        out.push_back({x, y});
                    }
                    return out;
                };
                const auto manual_ctrl = jittered(spec.manual_ctrl);
                const auto nonmanual_ctrl = jittered(spec.nonmanual_ctrl);

                Ellipse face{{std::clamp(0.5 * w + sdx, face_rx + 1.0, w - 2.0 - face_rx),
                              std::clamp(0.20 * h + sdy, face_ry + 1.0, h - 2.0 - face_ry)},
                             face_rx,
                             face_ry};

                const std::string rel_dir =
                    spec.label + "/" + signer + "/" + std::to_string(inst);
                const auto inst_dir = out_dir / rel_dir;
                std::filesystem::create_directories(inst_dir);

                InstanceEntry entry;
                entry.label = spec.label;
                entry.signer = signer;
                entry.instance = inst;
                entry.frame_dir = rel_dir;

                GroundTruthInstance gt;
                gt.label = spec.label;
                gt.signer = signer;
                gt.instance = inst;

                for (int f = 0; f < duration; ++f) {
                    const double t = static_cast<double>(f) / duration;
                    const Ellipse manual{spline_at(manual_ctrl, t), hand_r, hand_r};
                    const Ellipse nonmanual{spline_at(nonmanual_ctrl, t), hand_r, hand_r};

                    RgbFrame img;
                    img.width = cfg.width;
                    img.height = cfg.height;
                    img.pixels.resize(static_cast<std::size_t>(3) * cfg.width * cfg.height);
                    for (std::size_t p = 0; p < img.pixels.size(); p += 3) {
                        img.pixels[p] = background.r;
                        img.pixels[p + 1] = background.g;
                        img.pixels[p + 2] = background.b;
                    }

                    GroundTruthFrame gtf;
                    gtf.c1 = fill_ellipse(img, face, skin).centroid;
                    gtf.c2 = fill_ellipse(img, manual, skin).centroid;
                    gtf.c3 = fill_ellipse(img, nonmanual, skin).centroid;
                    gtf.face_overlap = components_touch(manual, face, cfg.width, cfg.height) ||
                                       components_touch(nonmanual, face, cfg.width, cfg.height);
                    gtf.hands_overlap =
                        components_touch(manual, nonmanual, cfg.width, cfg.height);
                    gt.frames.push_back(gtf);

                    if (cfg.noise > 0.0) {
                        rng::Engine noise_eng(
                            rng::mix(inst_seed, 0xF00Dull + static_cast<std::uint64_t>(f)));
                        for (auto& v : img.pixels) {
                            const double n = cfg.noise * rng::uniform(noise_eng, -1.0, 1.0);
                            v = static_cast<std::uint8_t>(
                                std::clamp(static_cast<int>(v) + static_cast<int>(std::lround(n)),
                                           0, 255));
                        }
                    }

                    std::ostringstream name;
                    name << "frame_" << (f < 10 ? "000" : f < 100 ? "00" : f < 1000 ? "0" : "")
                         << f << "." << cfg.image_format;
                    if (cfg.image_format == "png")
                        write_png(inst_dir / name.str(), img);
                    else
                        write_ppm(inst_dir / name.str(), img);
                    entry.frames.push_back(name.str());
                }

                write_ground_truth(inst_dir / "ground_truth.txt", gt);
                result.manifest.entries.push_back(std::move(entry));
                result.ground_truth.push_back(std::move(gt));
            }
        }
    }

    write_manifest(out_dir / "manifest.txt", result.manifest);
    return result;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruthInstance& gt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SynthError("cannot write ground truth: " + path.string());
    out << "# label signer instance\n";
    out << gt.label << " " << gt.signer << " " << gt.instance << "\n";
    out << "# frame c1x c1y c2x c2y c3x c3y face_overlap hands_overlap\n";
    for (std::size_t f = 0; f < gt.frames.size(); ++f) {
        const auto& g = gt.frames[f];
        out << f << " " << fmt_double(g.c1.x) << " " << fmt_double(g.c1.y) << " "
            << fmt_double(g.c2.x) << " " << fmt_double(g.c2.y) << " " << fmt_double(g.c3.x)
            << " " << fmt_double(g.c3.y) << " " << (g.face_overlap ? 1 : 0) << " "
            << (g.hands_overlap ? 1 : 0) << "\n";
    }
}

GroundTruthInstance read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SynthError("cannot read ground truth: " + path.string());
    GroundTruthInstance gt;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        if (!have_header) {
            fields >> gt.label >> gt.signer >> gt.instance;
            have_header = true;
            continue;
        }
        long frame = 0;
        GroundTruthFrame g;
        int fo = 0, ho = 0;
        if (!(fields >> frame >> g.c1.x >> g.c1.y >> g.c2.x >> g.c2.y >> g.c3.x >> g.c3.y >>
              fo >> ho))
            throw SynthError("malformed ground truth row in " + path.string());
        g.face_overlap = fo != 0;
        g.hands_overlap = ho != 0;
        gt.frames.push_back(g);
    }
    return gt;
}

}  // namespace slr
