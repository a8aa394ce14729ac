#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmloss/losses.hpp"
#include "fmloss/metrics.hpp"
#include "fmloss/synth.hpp"

namespace fmloss {

// Per-pixel linear classifier over the feature channels: z = sum w_k f_k + b.
// Stands in for a segmentation backbone; it isolates the gradient geometry of
// the losses without any architecture on top.
struct PixelModel {
    Eigen::VectorXd weights;
    Scalar bias = 0.0;
};

struct TrainConfig {
    LossKind loss_kind = LossKind::OURS;
    LossParams loss_params;
    Scalar learning_rate = 0.5;
    int epochs = 100;
    Scalar val_split = 0.25;  // trailing fraction of samples held out, by index
    Scalar threshold = 0.5;   // metric binarization
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    Scalar train_loss = 0.0;  // at the parameters entering the epoch
    Scalar val_loss = 0.0;
    MetricReport val_metrics;
};

struct TrainReport {
    TrainConfig config;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::vector<EpochStats> history;  // one entry per epoch
    PixelModel model;                 // after the last update
    Scalar final_val_loss = 0.0;
    MetricReport final_metrics;  // final model on the validation split
};

Grid forward(const PixelModel& m, const std::vector<Grid>& features);

// Full-batch gradient descent, deterministic: weights start at zero and the
// bias at the logit of the train foreground rate. Throws DivergenceError
// naming the epoch on a non-finite loss or parameter.
TrainReport train(const TrainConfig& cfg, const std::vector<SynthSample>& dataset);

// One sweep cell: a loss kind with its parameters.
struct SweepCell {
    LossKind kind = LossKind::OURS;
    LossParams params;
    std::string label;  // free-form parameter description for the table
};

struct MetricStats {
    int defined = 0;  // repeats with a defined value; undefined ones are excluded
    Scalar mean = 0.0;
    Scalar stddev = 0.0;  // sample stddev, 0 when defined <= 1
};

struct SweepRow {
    SweepCell cell;
    bool ok = true;
    std::string error;
    int repeats = 0;
    MetricStats iou, f1, recall, precision;
};

// Trains every cell `repeats` times. Repeat r regenerates the dataset with
// sample seeds Rng::mix(base.seed + r, i), shared across cells so identical
// losses see identical data and produce identical rows.
std::vector<SweepRow> compare_losses(const TrainConfig& base, const SynthConfig& synth,
                                     int n_samples, const std::vector<SweepCell>& cells,
                                     int repeats);

std::vector<SynthSample> make_sweep_dataset(const SynthConfig& synth, int n_samples,
                                            std::uint64_t repeat_seed);

nlohmann::json train_report_json(const TrainReport& r);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, int repeats, bool percent);
std::string sweep_csv(const std::vector<SweepRow>& rows, bool percent);

}  // namespace fmloss
