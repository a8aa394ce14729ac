#include "fmloss/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fmloss/rng.hpp"

namespace fmloss {

void TrainConfig::validate() const {
    loss_params.validate();
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw ParamError(msg);
    };
    need(std::isfinite(learning_rate) && learning_rate >= 0.0,
         "train: learning_rate must be >= 0");
    need(epochs >= 1, "train: epochs must be >= 1");
    need(std::isfinite(val_split) && val_split > 0.0 && val_split < 1.0,
         "train: val_split must lie in (0, 1)");
    need(std::isfinite(threshold) && threshold > 0.0 && threshold < 1.0,
         "train: threshold must lie in (0, 1)");
}

Grid forward(const PixelModel& m, const std::vector<Grid>& features) {
    if (features.empty()) {
        throw ShapeError("forward: no feature channels");
    }
    if (static_cast<Index>(features.size()) != m.weights.size()) {
        throw ShapeError("forward: model has " + std::to_string(m.weights.size()) +
                         " weights but sample has " + std::to_string(features.size()) +
                         " channels");
    }
    Grid z = Grid::Constant(features[0].rows(), features[0].cols(), m.bias);
    for (size_t k = 0; k < features.size(); ++k) {
        require_same_shape(features[k], features[0], "forward");
        z += m.weights(static_cast<Index>(k)) * features[k];
    }
    return z;
}

namespace {

struct EvalResult {
    Scalar loss = 0.0;
    MetricReport report;
};

EvalResult evaluate(const PixelModel& model, const TrainConfig& cfg,
                    const std::vector<SynthSample>& samples, size_t begin, size_t end) {
    EvalResult out;
    ConfusionCounts counts;
    for (size_t i = begin; i < end; ++i) {
        const Grid z = forward(model, samples[i].features);
        out.loss += loss_value(cfg.loss_kind, z, samples[i].mask, cfg.loss_params);
        counts += confusion(binarize(sigmoid(z), cfg.threshold), samples[i].mask);
    }
    out.loss /= static_cast<Scalar>(end - begin);
    out.report = metrics(counts);
    return out;
}

}  // namespace

TrainReport train(const TrainConfig& cfg, const std::vector<SynthSample>& dataset) {
    cfg.validate();
    const size_t n = dataset.size();
    if (n < 2) {
        throw ParamError("train: need at least 2 samples for a train/val split");
    }
    const size_t channels = dataset[0].features.size();
    for (const auto& s : dataset) {
        if (s.features.size() != channels) {
            throw ShapeError("train: inconsistent channel counts across samples");
        }
        for (const auto& f : s.features) require_same_shape(f, s.mask.values(), "train");
    }

    const auto n_train = std::clamp<size_t>(
        static_cast<size_t>(std::floor(static_cast<Scalar>(n) * (1.0 - cfg.val_split))), 1,
        n - 1);

    TrainReport rep;
    rep.config = cfg;
    rep.n_train = n_train;
    rep.n_val = n - n_train;

    // Calibrated start: zero weights, bias at the train foreground rate.
    Scalar fg = 0.0, px = 0.0;
    for (size_t i = 0; i < n_train; ++i) {
        fg += reduce_sum(dataset[i].mask.values());
        px += static_cast<Scalar>(dataset[i].mask.size());
    }
    const Scalar rate = clamp_prob(fg / px, cfg.loss_params.eps);
    PixelModel model{Eigen::VectorXd::Zero(static_cast<Index>(channels)),
                     std::log(rate / (1.0 - rate))};

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Eigen::VectorXd grad_w = Eigen::VectorXd::Zero(static_cast<Index>(channels));
        Scalar grad_b = 0.0;
        Scalar train_loss = 0.0;
        for (size_t i = 0; i < n_train; ++i) {
            const Grid z = forward(model, dataset[i].features);
            const LossOutput out =
                loss_value_and_grad(cfg.loss_kind, z, dataset[i].mask, cfg.loss_params);
            train_loss += out.value;
            for (size_t k = 0; k < channels; ++k) {
                grad_w(static_cast<Index>(k)) +=
                    reduce_sum(out.grad_logits * dataset[i].features[k]);
            }
            grad_b += reduce_sum(out.grad_logits);
        }
        const Scalar inv = 1.0 / static_cast<Scalar>(n_train);
        train_loss *= inv;
        grad_w *= inv;
        grad_b *= inv;
        if (!std::isfinite(train_loss) || !grad_w.allFinite() || !std::isfinite(grad_b)) {
            throw DivergenceError("train: non-finite loss or gradient at epoch " +
                                  std::to_string(epoch));
        }

        const EvalResult val = evaluate(model, cfg, dataset, n_train, n);
        rep.history.push_back({train_loss, val.loss, val.report});

        model.weights -= cfg.learning_rate * grad_w;
        model.bias -= cfg.learning_rate * grad_b;
        if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
            throw DivergenceError("train: non-finite parameters after epoch " +
                                  std::to_string(epoch));
        }
    }

    const EvalResult fin = evaluate(model, cfg, dataset, n_train, n);
    rep.model = std::move(model);
    rep.final_val_loss = fin.loss;
    rep.final_metrics = fin.report;
    return rep;
}

std::vector<SynthSample> make_sweep_dataset(const SynthConfig& synth, int n_samples,
                                            std::uint64_t repeat_seed) {
    std::vector<SynthSample> data;
    data.reserve(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        SynthConfig c = synth;
        c.seed = Rng::mix(repeat_seed, static_cast<std::uint64_t>(i));
        data.push_back(generate_sample(c));
    }
    return data;
}

namespace {

MetricStats stats_of(const std::vector<Scalar>& xs) {
    MetricStats s;
    s.defined = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    Scalar sum = 0.0;
    for (Scalar x : xs) sum += x;
    s.mean = sum / static_cast<Scalar>(xs.size());
    if (xs.size() > 1) {
        Scalar ss = 0.0;
        for (Scalar x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<Scalar>(xs.size() - 1));
    }
    return s;
}

}  // namespace

std::vector<SweepRow> compare_losses(const TrainConfig& base, const SynthConfig& synth,
                                     int n_samples, const std::vector<SweepCell>& cells,
                                     int repeats) {
    if (repeats < 1) {
        throw ParamError("compare_losses: repeats must be >= 1");
    }
    if (n_samples < 2) {
        throw ParamError("compare_losses: need at least 2 samples");
    }
    base.validate();
    synth.validate();

    // One dataset per repeat, shared across every cell.
    std::vector<std::vector<SynthSample>> datasets;
    datasets.reserve(static_cast<size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        datasets.push_back(
            make_sweep_dataset(synth, n_samples, base.seed + static_cast<std::uint64_t>(r)));
    }

    std::vector<SweepRow> rows;
    for (const auto& cell : cells) {
        SweepRow row;
        row.cell = cell;
        row.repeats = repeats;
        std::vector<Scalar> iou, f1, recall, precision;
        try {
            for (int r = 0; r < repeats; ++r) {
                TrainConfig cfg = base;
                cfg.loss_kind = cell.kind;
                cfg.loss_params = cell.params;
                cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                const TrainReport rep = train(cfg, datasets[static_cast<size_t>(r)]);
                if (rep.final_metrics.iou) iou.push_back(*rep.final_metrics.iou);
                if (rep.final_metrics.f1) f1.push_back(*rep.final_metrics.f1);
                if (rep.final_metrics.recall) recall.push_back(*rep.final_metrics.recall);
                if (rep.final_metrics.precision)
                    precision.push_back(*rep.final_metrics.precision);
            }
            row.iou = stats_of(iou);
            row.f1 = stats_of(f1);
            row.recall = stats_of(recall);
            row.precision = stats_of(precision);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json train_report_json(const TrainReport& r) {
    nlohmann::json history = nlohmann::json::array();
    for (size_t e = 0; e < r.history.size(); ++e) {
        history.push_back({{"epoch", e + 1},
                           {"train_loss", r.history[e].train_loss},
                           {"val_loss", r.history[e].val_loss},
                           {"val_metrics", r.history[e].val_metrics}});
    }
    nlohmann::json weights = nlohmann::json::array();
    for (Index k = 0; k < r.model.weights.size(); ++k) weights.push_back(r.model.weights(k));
    return nlohmann::json{
        {"schema", "v1"},
        {"config",
         {{"loss_kind", loss_kind_name(r.config.loss_kind)},
          {"loss_params", r.config.loss_params},
          {"learning_rate", r.config.learning_rate},
          {"epochs", r.config.epochs},
          {"val_split", r.config.val_split},
          {"threshold", r.config.threshold},
          {"seed", r.config.seed}}},
        {"n_train", r.n_train},
        {"n_val", r.n_val},
        {"history", history},
        {"final",
         {{"weights", weights},
          {"bias", r.model.bias},
          {"val_loss", r.final_val_loss},
          {"val_metrics", r.final_metrics}}},
    };
}

namespace {

nlohmann::json stats_json(const MetricStats& s, bool percent) {
    const Scalar scale = percent ? 100.0 : 1.0;
    if (s.defined == 0) {
        return nlohmann::json{{"mean", nullptr}, {"stddev", nullptr}, {"defined", 0}};
    }
    return nlohmann::json{
        {"mean", s.mean * scale}, {"stddev", s.stddev * scale}, {"defined", s.defined}};
}

std::string stats_cell(const MetricStats& s, bool percent) {
    if (s.defined == 0) return "n/a";
    const Scalar scale = percent ? 100.0 : 1.0;
    char buf[64];
    const int digits = percent ? 2 : 4;
    std::snprintf(buf, sizeof(buf), "%.*f+-%.*f", digits, s.mean * scale, digits,
                  s.stddev * scale);
    return buf;
}

}  // namespace

nlohmann::json sweep_json(const std::vector<SweepRow>& rows, int repeats, bool percent) {
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json j{{"loss", loss_kind_name(row.cell.kind)},
                         {"parameters", row.cell.label},
                         {"ok", row.ok}};
        if (row.ok) {
            j["iou"] = stats_json(row.iou, percent);
            j["f1"] = stats_json(row.f1, percent);
            j["recall"] = stats_json(row.recall, percent);
            j["precision"] = stats_json(row.precision, percent);
        } else {
            j["error"] = row.error;
        }
        jrows.push_back(std::move(j));
    }
    return nlohmann::json{{"schema", "v1"}, {"repeats", repeats}, {"rows", jrows}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool percent) {
    // Aligned columns: Loss, Parameters, IoU, F1, Recall, Precision.
    std::vector<std::array<std::string, 6>> table;
    table.push_back({"Loss", "Parameters", "IoU", "F1", "Recall", "Precision"});
    for (const auto& row : rows) {
        if (row.ok) {
            table.push_back({std::string(loss_kind_name(row.cell.kind)), row.cell.label,
                             stats_cell(row.iou, percent), stats_cell(row.f1, percent),
                             stats_cell(row.recall, percent),
                             stats_cell(row.precision, percent)});
        } else {
            table.push_back({std::string(loss_kind_name(row.cell.kind)), row.cell.label,
                             "error", "error", "error", "error"});
        }
    }
    std::array<size_t, 6> width{};
    for (const auto& r : table) {
        for (size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream out;
    for (const auto& r : table) {
        for (size_t c = 0; c < 6; ++c) {
            std::string cell = r[c];
            cell.resize(width[c], ' ');
            out << cell << (c + 1 < 6 ? ", " : "\n");
        }
    }
    return out.str();
}

}  // namespace fmloss
