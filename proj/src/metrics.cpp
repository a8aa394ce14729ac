#include "fmloss/metrics.hpp"

namespace fmloss {

Mask binarize(const Grid& pr, Scalar threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParamError("binarize: threshold must lie in (0, 1)");
    }
    return Mask((pr >= threshold).cast<Scalar>());
}

ConfusionCounts confusion(const Mask& pred, const Mask& truth) {
    require_same_shape(pred.values(), truth.values(), "confusion");
    ConfusionCounts c;
    for (Index r = 0; r < pred.rows(); ++r) {
        for (Index j = 0; j < pred.cols(); ++j) {
            const bool p = pred(r, j) == 1.0;
            const bool t = truth(r, j) == 1.0;
            if (p && t)
                ++c.tp;
            else if (p && !t)
                ++c.fp;
            else if (!p && t)
                ++c.fn;
            else
                ++c.tn;
        }
    }
    return c;
}

namespace {

std::optional<Scalar> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<Scalar>(num) / static_cast<Scalar>(den);
}

}  // namespace

MetricReport metrics(const ConfusionCounts& c) {
    MetricReport r;
    r.iou = ratio(c.tp, c.tp + c.fp + c.fn);
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    return r;
}

void to_json(nlohmann::json& j, const ConfusionCounts& c) {
    j = nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

void to_json(nlohmann::json& j, const MetricReport& r) { j = metric_report_json(r, false); }

nlohmann::json metric_report_json(const MetricReport& r, bool percent) {
    const Scalar scale = percent ? 100.0 : 1.0;
    auto field = [&](const std::optional<Scalar>& v) {
        return v ? nlohmann::json(*v * scale) : nlohmann::json(nullptr);
    };
    return nlohmann::json{{"iou", field(r.iou)},
                          {"f1", field(r.f1)},
                          {"recall", field(r.recall)},
                          {"precision", field(r.precision)}};
}

}  // namespace fmloss
