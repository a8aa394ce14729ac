#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fmloss/metrics.hpp"
#include "fmloss/synth.hpp"
#include "test_util.hpp"

using namespace fmloss;
using namespace fmloss::test;

TEST_CASE("mask generation is deterministic and hits the ratio band") {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.target_ratio = 0.05;

    const Mask a = generate_mask(cfg);
    const Mask b = generate_mask(cfg);
    CHECK((a.values() == b.values()).all());

    const Scalar frac = a.fraction();
    CHECK(frac >= 0.035);
    CHECK(frac <= 0.065);
}

TEST_CASE("mean achieved ratio over 20 seeds is within 10% of 0.03") {
    SynthConfig cfg;
    cfg.target_ratio = 0.03;
    Scalar sum = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        sum += generate_mask(cfg).fraction();
    }
    const Scalar mean = sum / 20.0;
    CHECK(mean >= 0.027);
    CHECK(mean <= 0.033);
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.n_curves = 0;
    CHECK_THROWS_AS(cfg.validate(), ParamError);
    cfg = SynthConfig{};
    cfg.target_ratio = 0.25;
    CHECK_THROWS_AS(cfg.validate(), ParamError);
    cfg = SynthConfig{};
    cfg.stroke_width = 0;
    CHECK_THROWS_AS(cfg.validate(), ParamError);

    // Unreachable ratio: huge strokes on a tiny grid overshoot permanently.
    SynthConfig impossible;
    impossible.height = 16;
    impossible.width = 16;
    impossible.target_ratio = 0.002;
    impossible.stroke_width = 8;
    impossible.n_curves = 4;
    CHECK_THROWS_AS(generate_mask(impossible), GenerationError);
}

TEST_CASE("box blur") {
    const Grid g = make_grid({{0, 0, 0}, {0, 9, 0}, {0, 0, 0}});
    CHECK((box_blur(g, 0) == g).all());
    const Grid b = box_blur(g, 1);
    CHECK(b(1, 1) == 1.0);          // 9 over the full 3x3 window
    CHECK(b(0, 0) == doctest::Approx(9.0 / 4.0));  // clipped corner window
    CHECK_THROWS_AS(box_blur(g, -1), ParamError);
}

TEST_CASE("features: identity channel, smoothing, determinism") {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.height = 48;
    cfg.width = 48;
    cfg.feature_channels = 2;

    const Mask mask = generate_mask(cfg);

    SynthConfig clean = cfg;
    clean.feature_noise = 0.0;
    const SynthSample s = generate_features(mask, clean);
    REQUIRE(s.features.size() == 2);
    CHECK((s.features[0] == mask.values()).all());  // radius-0 blur, no noise
    CHECK((s.features[1] >= 0.0).all());
    CHECK((s.features[1] <= 1.0).all());

    const SynthSample noisy1 = generate_features(mask, cfg);
    const SynthSample noisy2 = generate_features(mask, cfg);
    CHECK((noisy1.features[0] == noisy2.features[0]).all());
    CHECK((noisy1.features[1] == noisy2.features[1]).all());
    CHECK_FALSE((noisy1.features[0] == s.features[0]).all());
}

TEST_CASE("channel 1 stays informative under noise") {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.target_ratio = 0.05;
    cfg.feature_noise = 0.25;
    const SynthSample s = generate_sample(cfg);

    // Best threshold over a sweep must reach IoU > 0.3, otherwise the toy
    // task would not be learnable at all.
    Scalar best = 0.0;
    for (int i = 1; i < 100; ++i) {
        const Scalar thr = i / 100.0;
        const ConfusionCounts c = confusion(binarize(s.features[0], thr), s.mask);
        const MetricReport m = metrics(c);
        if (m.iou) best = std::max(best, *m.iou);
    }
    CHECK(best > 0.3);
}

TEST_CASE("dataset save/load round-trip") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "fmloss_dataset").string();

    std::vector<DatasetEntry> entries;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.height = 32;
        cfg.width = 32;
        entries.push_back({seed, generate_sample(cfg)});
    }
    const nlohmann::json manifest = save_dataset(dir, entries);
    CHECK(manifest["schema"] == "v1");
    CHECK(manifest["samples"].size() == 3);
    CHECK(manifest["samples"][0].contains("achieved_ratio"));

    const std::vector<SynthSample> back = load_dataset(dir + "/manifest.json");
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK((back[i].mask.values() == entries[i].sample.mask.values()).all());
        REQUIRE(back[i].features.size() == entries[i].sample.features.size());
        for (size_t k = 0; k < back[i].features.size(); ++k) {
            CHECK((back[i].features[k] == entries[i].sample.features[k]).all());
        }
    }
}
