#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmloss/grid.hpp"

namespace fmloss {

// Generator settings for crack-like masks: thin random-walk polylines with a
// controlled foreground fraction, plus blurred noisy feature channels.
struct SynthConfig {
    std::uint64_t seed = 0;
    Index height = 96;
    Index width = 96;
    Scalar target_ratio = 0.05;  // foreground fraction, (0, 0.2]
    int stroke_width = 2;        // pixels
    int n_curves = 3;
    Scalar feature_noise = 0.25;  // std of additive Gaussian noise
    int feature_channels = 2;

    void validate() const;
};

struct SynthSample {
    Mask mask;
    std::vector<Grid> features;  // one grid per channel, same shape as mask
};

// Deterministic in cfg.seed. Retries with a step-count correction until the
// achieved fraction is within 10% relative of target_ratio, keeps the best
// attempt if only the 30% band is reachable, and throws GenerationError
// after 50 attempts.
Mask generate_mask(const SynthConfig& cfg);

// Channel k = box blur of the mask with radius k-1, plus feature_noise *
// N(0,1) per pixel. Uses its own stream derived from cfg.seed so the result
// does not depend on how many draws the mask took.
SynthSample generate_features(const Mask& mask, const SynthConfig& cfg);

SynthSample generate_sample(const SynthConfig& cfg);

// Mean over the window clipped to the grid, so values stay inside the input
// range. Radius 0 is the identity.
Grid box_blur(const Grid& g, int radius);

// Dataset files: mask_XXX.pgm plus feature_XXX_Y.txt per channel, listed in
// a manifest JSON with (seed, files, achieved_ratio) per sample.
struct DatasetEntry {
    std::uint64_t seed = 0;
    SynthSample sample;
};

nlohmann::json save_dataset(const std::string& dir, const std::vector<DatasetEntry>& entries);
std::vector<SynthSample> load_dataset(const std::string& manifest_path);

}  // namespace fmloss
