#include "fmloss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fmloss/io.hpp"
#include "fmloss/rng.hpp"

namespace fmloss {

namespace {

constexpr std::uint64_t kFeatureStreamSalt = 0x6665617475726573ULL;  // "features"
constexpr Scalar kPi = 3.14159265358979323846;
constexpr Scalar kMaxTurn = 0.45;  // radians per step, bounds the sinuosity

void stamp(Grid& m, Scalar y, Scalar x, Scalar radius) {
    const auto ci = static_cast<Index>(std::llround(y));
    const auto cj = static_cast<Index>(std::llround(x));
    const auto reach = static_cast<Index>(std::ceil(radius));
    for (Index di = -reach; di <= reach; ++di) {
        for (Index dj = -reach; dj <= reach; ++dj) {
            if (static_cast<Scalar>(di * di + dj * dj) > radius * radius) continue;
            const Index r = ci + di;
            const Index c = cj + dj;
            if (r >= 0 && r < m.rows() && c >= 0 && c < m.cols()) m(r, c) = 1.0;
        }
    }
}

}  // namespace

void SynthConfig::validate() const {
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw ParamError(msg);
    };
    need(height >= 1 && width >= 1, "synth: size must be >= 1x1");
    need(std::isfinite(target_ratio) && target_ratio > 0.0 && target_ratio <= 0.2,
         "synth: target_ratio must lie in (0, 0.2]");
    need(stroke_width >= 1, "synth: stroke_width must be >= 1");
    need(n_curves >= 1, "synth: n_curves must be >= 1");
    need(std::isfinite(feature_noise) && feature_noise >= 0.0,
         "synth: feature_noise must be >= 0");
    need(feature_channels >= 1, "synth: feature_channels must be >= 1");
}

Mask generate_mask(const SynthConfig& cfg) {
    cfg.validate();
    constexpr int kMaxAttempts = 50;
    const Scalar total = static_cast<Scalar>(cfg.height) * static_cast<Scalar>(cfg.width);
    const Scalar target = cfg.target_ratio;
    const Scalar radius = static_cast<Scalar>(cfg.stroke_width) / 2.0;

    Rng rng(cfg.seed);
    // Each step paints roughly stroke_width fresh pixels; overlap is corrected
    // by the feedback factor between attempts.
    Scalar scale = 1.0;
    Scalar best_err = std::numeric_limits<Scalar>::infinity();
    Grid best;

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Grid m = Grid::Zero(cfg.height, cfg.width);
        const long want = std::max<long>(
            cfg.n_curves, std::lround(scale * target * total / cfg.stroke_width));
        const long per_curve = std::max<long>(2, want / cfg.n_curves);
        for (int curve = 0; curve < cfg.n_curves; ++curve) {
            Scalar y = rng.uniform(0.0, static_cast<Scalar>(cfg.height - 1));
            Scalar x = rng.uniform(0.0, static_cast<Scalar>(cfg.width - 1));
            Scalar heading = rng.uniform(0.0, 2.0 * kPi);
            for (long step = 0; step < per_curve; ++step) {
                stamp(m, y, x, radius);
                heading += rng.uniform(-kMaxTurn, kMaxTurn);
                Scalar ny = y + std::sin(heading);
                Scalar nx = x + std::cos(heading);
                if (ny < 0.0 || ny > static_cast<Scalar>(cfg.height - 1)) {
                    heading = -heading;
                    ny = y + std::sin(heading);
                }
                if (nx < 0.0 || nx > static_cast<Scalar>(cfg.width - 1)) {
                    heading = kPi - heading;
                    nx = x + std::cos(heading);
                    ny = y + std::sin(heading);
                }
                y = std::clamp(ny, 0.0, static_cast<Scalar>(cfg.height - 1));
                x = std::clamp(nx, 0.0, static_cast<Scalar>(cfg.width - 1));
            }
        }
        const Scalar ratio = reduce_sum(m) / total;
        const Scalar err = std::abs(ratio - target) / target;
        if (err < best_err) {
            best_err = err;
            best = m;
        }
        if (best_err <= 0.10) break;
        scale *= target / std::max(ratio, 1.0 / total);
        scale = std::clamp(scale, 0.02, 50.0);
    }

    if (best_err > 0.30) {
        throw GenerationError(
            "generate_mask: achieved foreground ratio stayed outside 30% of target_ratio " +
            std::to_string(target) + " after " + std::to_string(kMaxAttempts) +
            " attempts; adjust stroke_width, n_curves or target_ratio");
    }
    return Mask(std::move(best));
}

Grid box_blur(const Grid& g, int radius) {
    if (radius < 0) {
        throw ParamError("box_blur: radius must be >= 0");
    }
    if (radius == 0) return g;
    Grid out(g.rows(), g.cols());
    for (Index r = 0; r < g.rows(); ++r) {
        for (Index c = 0; c < g.cols(); ++c) {
            const Index r0 = std::max<Index>(0, r - radius);
            const Index r1 = std::min<Index>(g.rows() - 1, r + radius);
            const Index c0 = std::max<Index>(0, c - radius);
            const Index c1 = std::min<Index>(g.cols() - 1, c + radius);
            Scalar sum = 0.0;
            for (Index i = r0; i <= r1; ++i) {
                for (Index j = c0; j <= c1; ++j) sum += g(i, j);
            }
            out(r, c) = sum / static_cast<Scalar>((r1 - r0 + 1) * (c1 - c0 + 1));
        }
    }
    return out;
}

SynthSample generate_features(const Mask& mask, const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed ^ kFeatureStreamSalt);
    SynthSample s{mask, {}};
    const Grid& base = mask.values();
    for (int k = 1; k <= cfg.feature_channels; ++k) {
        Grid ch = box_blur(base, k - 1);
        if (cfg.feature_noise > 0.0) {
            for (Index r = 0; r < ch.rows(); ++r) {
                for (Index c = 0; c < ch.cols(); ++c) {
                    ch(r, c) += cfg.feature_noise * rng.normal();
                }
            }
        }
        s.features.push_back(std::move(ch));
    }
    return s;
}

SynthSample generate_sample(const SynthConfig& cfg) {
    return generate_features(generate_mask(cfg), cfg);
}

namespace fs = std::filesystem;

nlohmann::json save_dataset(const std::string& dir, const std::vector<DatasetEntry>& entries) {
    fs::create_directories(dir);
    nlohmann::json samples = nlohmann::json::array();
    char buf[64];
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        std::snprintf(buf, sizeof(buf), "mask_%03zu.pgm", i);
        const std::string mask_name = buf;
        write_mask_pgm((fs::path(dir) / mask_name).string(), e.sample.mask);
        nlohmann::json features = nlohmann::json::array();
        for (size_t k = 0; k < e.sample.features.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "feature_%03zu_%zu.txt", i, k + 1);
            write_grid_text((fs::path(dir) / buf).string(), e.sample.features[k]);
            features.push_back(std::string(buf));
        }
        samples.push_back({{"seed", e.seed},
                           {"mask", mask_name},
                           {"features", features},
                           {"achieved_ratio", e.sample.mask.fraction()}});
    }
    nlohmann::json manifest{{"schema", "v1"}, {"samples", samples}};
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) {
        throw ParseError(dir + "/manifest.json: cannot open for writing");
    }
    out << manifest.dump(2) << "\n";
    return manifest;
}

std::vector<SynthSample> load_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw ParseError(manifest_path + ": cannot open for reading");
    }
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path + ": " + e.what());
    }
    if (!manifest.contains("samples") || !manifest["samples"].is_array()) {
        throw ParseError(manifest_path + ": expected a \"samples\" array");
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    std::vector<SynthSample> out;
    for (const auto& s : manifest["samples"]) {
        SynthSample sample;
        sample.mask = read_mask_pgm((base / s.at("mask").get<std::string>()).string());
        for (const auto& f : s.at("features")) {
            Grid g = read_grid_text((base / f.get<std::string>()).string());
            require_same_shape(g, sample.mask.values(), "load_dataset");
            sample.features.push_back(std::move(g));
        }
        if (sample.features.empty()) {
            throw ParseError(manifest_path + ": sample without feature channels");
        }
        out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace fmloss
