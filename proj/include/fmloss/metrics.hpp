#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "fmloss/grid.hpp"

namespace fmloss {

// Pixel confusion totals; tp+fp+fn+tn equals the compared pixel count.
// Counts from several images add up exactly, so dataset metrics are
// micro-averaged: sum counts first, take ratios last.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

// Ratios are empty on a 0/0 denominator, never NaN; undefined entries are
// excluded from averages downstream.
struct MetricReport {
    std::optional<Scalar> iou;
    std::optional<Scalar> f1;
    std::optional<Scalar> recall;
    std::optional<Scalar> precision;
};

// threshold must lie in (0, 1); ties (pr == threshold) go to foreground.
Mask binarize(const Grid& pr, Scalar threshold);

ConfusionCounts confusion(const Mask& pred, const Mask& truth);

// iou = tp/(tp+fp+fn), precision = tp/(tp+fp), recall = tp/(tp+fn),
// f1 = 2tp/(2tp+fp+fn).
MetricReport metrics(const ConfusionCounts& c);

void to_json(nlohmann::json& j, const ConfusionCounts& c);
void to_json(nlohmann::json& j, const MetricReport& r);
// Same as to_json but with values scaled by 100 when percent is set.
nlohmann::json metric_report_json(const MetricReport& r, bool percent);

}  // namespace fmloss
