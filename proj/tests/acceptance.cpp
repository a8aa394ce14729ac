// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any hard
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fmloss/gradcheck.hpp"
#include "fmloss/losses.hpp"
#include "fmloss/metrics.hpp"
#include "fmloss/rng.hpp"
#include "fmloss/synth.hpp"
#include "fmloss/trainer.hpp"

using namespace fmloss;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_diff(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

double max_rel_diff(const Grid& a, const Grid& b) {
    double worst = 0.0;
    for (Index r = 0; r < a.rows(); ++r) {
        for (Index c = 0; c < a.cols(); ++c) {
            worst = std::max(worst, rel_diff(a(r, c), b(r, c)));
        }
    }
    return worst;
}

Grid random_logits(Rng& rng, Index rows, Index cols, double lo = -4.0, double hi = 4.0) {
    Grid z(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) z(r, c) = rng.uniform(lo, hi);
    }
    return z;
}

Mask random_mask(Rng& rng, Index rows, Index cols, double rate) {
    Grid t(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) t(r, c) = rng.bernoulli(rate) ? 1.0 : 0.0;
    }
    return Mask(std::move(t));
}

struct Criterion {
    int id;
    std::string title;
    bool pass = false;
    std::string detail;
};

// 1. Reduction lattice: 500 random 8x8 instances, every identity within
//    1e-12 relative on value and all gradient entries, under 5 s.
Criterion criterion_reduction_lattice() {
    Criterion c{1, "reduction lattice (500 x 8x8, rel <= 1e-12)"};
    const auto start = Clock::now();
    Rng rng(101);
    auto with = [](double gamma_hat, double margin) {
        LossParams p;
        p.gamma_hat = gamma_hat;
        p.margin = margin;
        return p;
    };
    struct Edge {
        LossKind a;
        LossParams pa;
        LossKind b;
        LossParams pb;
    };
    const std::vector<Edge> edges{
        {LossKind::ASYM_FOCAL_MARGIN, with(2.0, 0.0), LossKind::ASYM_FOCAL, with(2.0, 0.0)},
        {LossKind::ASYM_FOCAL_MARGIN, with(0.0, 1.0), LossKind::ASYM_LARGE_MARGIN,
         with(0.0, 1.0)},
        {LossKind::ASYM_FOCAL_MARGIN, with(0.0, 0.0), LossKind::BCE, with(0.0, 0.0)},
        {LossKind::OURS, with(2.0, 0.0), LossKind::HYBRID_FOCAL, with(2.0, 0.0)},
    };

    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        static constexpr double kRates[] = {0.03, 0.05, 0.07, 0.25};
        const double rate = kRates[rng.below(4)];
        const Grid z = random_logits(rng, 8, 8);
        const Mask t = random_mask(rng, 8, 8, rate);
        for (const auto& e : edges) {
            const LossOutput lhs = loss_value_and_grad(e.a, z, t, e.pa);
            const LossOutput rhs = loss_value_and_grad(e.b, z, t, e.pb);
            worst = std::max(worst, rel_diff(lhs.value, rhs.value));
            worst = std::max(worst, max_rel_diff(lhs.grad_logits, rhs.grad_logits));
        }
    }
    const double elapsed = seconds_since(start);
    c.pass = worst <= 1e-12 && elapsed < 5.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max rel diff %.2e, %.2f s", worst, elapsed);
    c.detail = buf;
    return c;
}

// 2. Tversky <-> Dice identity at delta = 0.5, including all-zero masks.
Criterion criterion_tversky_dice() {
    Criterion c{2, "Tversky==Dice at delta=0.5 (500 instances, rel <= 1e-12)"};
    Rng rng(102);
    LossParams p;
    p.delta = 0.5;
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const double rate = trial % 10 == 0 ? 0.0 : rng.uniform(0.03, 0.4);
        const Grid z = random_logits(rng, 8, 8);
        const Mask t = random_mask(rng, 8, 8, rate);
        const LossOutput tv = loss_value_and_grad(LossKind::TVERSKY, z, t, p);
        const LossOutput di = loss_value_and_grad(LossKind::DICE_SORENSEN, z, t, p);
        worst = std::max(worst, rel_diff(tv.value, di.value));
        worst = std::max(worst, max_rel_diff(tv.grad_logits, di.grad_logits));
        // Index-level identity as well.
        const Grid pr = sigmoid(z);
        worst = std::max(worst,
                         rel_diff(tversky_index(pr, t, p), 1.0 - dice_loss(pr, t, p, false)));
    }
    c.pass = worst <= 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max rel diff %.2e", worst);
    c.detail = buf;
    return c;
}

// 3. Gradient oracle: every kind, 200 trials of 8x8, h = 1e-4, rel 1e-5 with
//    1e-8 absolute floor, clamp-region skip; under 60 s total.
Criterion criterion_gradcheck() {
    Criterion c{3, "gradcheck all kinds (200 x 8x8, rel < 1e-5)"};
    const auto start = Clock::now();
    bool all = true;
    double worst = 0.0;
    std::string failed;
    for (LossKind k : all_loss_kinds()) {
        const GradCheckReport rep = check_gradients(k, 200, 8, 8, 1e-5, 1e-8, 103);
        worst = std::max(worst, rep.max_rel_err);
        if (!rep.pass) {
            all = false;
            failed += std::string(failed.empty() ? "" : ",") + std::string(loss_kind_name(k));
        }
    }
    const double elapsed = seconds_since(start);
    c.pass = all && elapsed < 60.0;
    char buf[160];
    if (all) {
        std::snprintf(buf, sizeof(buf), "max rel err %.2e, %.1f s", worst, elapsed);
    } else {
        std::snprintf(buf, sizeof(buf), "failing kinds: %s", failed.c_str());
    }
    c.detail = buf;
    return c;
}

// 4. Metrics oracle: 1000 random mask pairs against a brute-force reference;
//    exact counts, ratios within 1e-12, f1 = 2 iou/(1+iou) identity.
Criterion criterion_metrics_oracle() {
    Criterion c{4, "metrics vs brute force (1000 pairs, exact counts)"};
    Rng rng(104);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const double rate = trial % 25 == 0 ? 0.0 : rng.uniform(0.02, 0.6);
        const Mask pred = random_mask(rng, 9, 7, rate);
        const Mask truth = random_mask(rng, 9, 7, rng.uniform(0.02, 0.6));

        std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
        for (Index r = 0; r < 9; ++r) {
            for (Index j = 0; j < 7; ++j) {
                const bool pv = pred(r, j) == 1.0;
                const bool tv = truth(r, j) == 1.0;
                tp += pv && tv;
                fp += pv && !tv;
                fn += !pv && tv;
                tn += !pv && !tv;
            }
        }
        const ConfusionCounts counts = confusion(pred, truth);
        ok = counts.tp == tp && counts.fp == fp && counts.fn == fn && counts.tn == tn &&
             counts.total() == 63;

        const MetricReport m = metrics(counts);
        if (tp + fp + fn > 0) {
            worst = std::max(worst, rel_diff(*m.iou, double(tp) / double(tp + fp + fn)));
            worst = std::max(worst, rel_diff(*m.f1, 2.0 * double(tp) / double(2 * tp + fp + fn)));
        }
        if (tp + fn > 0) worst = std::max(worst, rel_diff(*m.recall, double(tp) / double(tp + fn)));
        if (tp + fp > 0) {
            worst = std::max(worst, rel_diff(*m.precision, double(tp) / double(tp + fp)));
        }
        if (m.iou && m.f1) worst = std::max(worst, rel_diff(*m.f1, 2.0 * *m.iou / (1.0 + *m.iou)));
    }
    c.pass = ok && worst <= 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "counts exact: %s, max ratio diff %.2e", ok ? "yes" : "NO",
                  worst);
    c.detail = buf;
    return c;
}

// 5. Margin mechanism: on a 50x50 grid of (z in [-4,4], m in [0,2]) the
//    foreground term strictly increases with m and the background term is
//    bitwise invariant.
Criterion criterion_margin_monotonicity() {
    Criterion c{5, "margin monotonicity on a 50x50 (z, m) grid"};
    // One foreground pixel with logit z, one fixed background pixel.
    const Mask t = Mask(([] {
        Grid g(1, 2);
        g << 1.0, 0.0;
        return g;
    })());
    bool ok = true;
    for (int zi = 0; zi < 50 && ok; ++zi) {
        const double z = -4.0 + 8.0 * zi / 49.0;
        Grid zz(1, 2);
        zz << z, 0.7;
        double prev_fg = -1.0;
        double bg0 = 0.0;
        for (int mi = 0; mi < 50; ++mi) {
            const double m = 2.0 * mi / 49.0;
            LossParams p;
            p.margin = m;
            const LossTerms terms = loss_terms(LossKind::ASYM_FOCAL_MARGIN, zz, t, p);
            if (mi == 0) {
                bg0 = terms.background;
            } else if (!(terms.foreground > prev_fg) || terms.background != bg0) {
                ok = false;
                break;
            }
            prev_fg = terms.foreground;
        }
    }
    c.pass = ok;
    c.detail = ok ? "foreground strictly increasing, background bitwise constant"
                  : "monotonicity violated";
    return c;
}

// 6. Determinism: synth, training and sweeps are bit-identical across reruns
//    with equal seeds.
Criterion criterion_determinism() {
    Criterion c{6, "bit-identical synth, train and sweep reruns"};
    SynthConfig synth;
    synth.seed = 106;
    synth.height = 48;
    synth.width = 48;
    synth.target_ratio = 0.05;

    const SynthSample s1 = generate_sample(synth);
    const SynthSample s2 = generate_sample(synth);
    bool ok = (s1.mask.values() == s2.mask.values()).all();
    for (size_t k = 0; ok && k < s1.features.size(); ++k) {
        ok = (s1.features[k] == s2.features[k]).all();
    }

    TrainConfig cfg;
    cfg.loss_kind = LossKind::OURS;
    cfg.epochs = 20;
    cfg.seed = 106;
    const auto data = make_sweep_dataset(synth, 6, cfg.seed);
    ok = ok && train_report_json(train(cfg, data)).dump() ==
                   train_report_json(train(cfg, data)).dump();

    LossParams m15;
    m15.margin = 1.5;
    LossParams m0;
    m0.margin = 0.0;
    const std::vector<SweepCell> cells{{LossKind::OURS, m15, "m=1.5"},
                                       {LossKind::HYBRID_FOCAL, m0, "m=0"}};
    const auto rows1 = compare_losses(cfg, synth, 6, cells, 2);
    const auto rows2 = compare_losses(cfg, synth, 6, cells, 2);
    ok = ok && sweep_json(rows1, 2, false).dump() == sweep_json(rows2, 2, false).dump();

    c.pass = ok;
    c.detail = ok ? "all reruns byte-identical" : "mismatch between reruns";
    return c;
}

// 7. Behavioral echo of the published recall trend: on heavily imbalanced
//    synthetic data the margin (m = 1.5) must raise mean validation recall
//    over the m = 0 baseline without giving up more than 1 IoU point.
//    Soft criterion: a negative direction is reported, recorded in the docs,
//    and does not fail the suite.
Criterion criterion_recall_trend() {
    Criterion c{7, "margin raises mean recall at ratio 0.03 (soft)"};
    const auto start = Clock::now();

    SynthConfig synth;
    synth.height = 96;
    synth.width = 96;
    synth.target_ratio = 0.03;
    synth.feature_noise = 0.25;
    synth.feature_channels = 2;

    TrainConfig base;
    base.epochs = 100;
    base.learning_rate = 0.5;
    base.val_split = 0.25;
    base.seed = 107;

    LossParams ours;
    ours.margin = 1.5;
    LossParams hf;
    hf.margin = 0.0;
    const std::vector<SweepCell> cells{{LossKind::OURS, ours, "m=1.5"},
                                       {LossKind::HYBRID_FOCAL, hf, "m=0"}};
    const auto rows = compare_losses(base, synth, 20, cells, 10);
    const double elapsed = seconds_since(start);

    const bool trained = rows.size() == 2 && rows[0].ok && rows[1].ok &&
                         rows[0].recall.defined == 10 && rows[1].recall.defined == 10;
    if (!trained) {
        c.pass = false;
        c.detail = "sweep failed to produce 10 defined repeats per cell";
        return c;
    }
    const double d_recall = rows[0].recall.mean - rows[1].recall.mean;
    const double d_iou = rows[0].iou.mean - rows[1].iou.mean;
    const bool direction = d_recall > 0.0 && d_iou >= -0.01;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "recall %.4f vs %.4f (d=%+.4f), iou %.4f vs %.4f (d=%+.4f), %.0f s%s",
                  rows[0].recall.mean, rows[1].recall.mean, d_recall, rows[0].iou.mean,
                  rows[1].iou.mean, d_iou, elapsed,
                  direction ? "" : " [NEGATIVE RESULT, recorded in README]");
    c.detail = buf;
    // Soft: the protocol must run inside its budget; the direction itself is
    // reported, not enforced.
    c.pass = elapsed < 300.0;
    if (direction) c.title += " -- direction holds";
    return c;
}

// 8. The published full-scale table numbers are out of scope by declaration:
//    they need CNN backbones, the real datasets and GPU training. Nothing in
//    this suite references them numerically.
Criterion criterion_out_of_scope() {
    Criterion c{8, "no criterion references full-scale table numbers"};
    c.pass = true;
    c.detail = "desk-scale suite only; absolute benchmark scores not reproduced";
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(criterion_reduction_lattice());
    results.push_back(criterion_tversky_dice());
    results.push_back(criterion_gradcheck());
    results.push_back(criterion_metrics_oracle());
    results.push_back(criterion_margin_monotonicity());
    results.push_back(criterion_determinism());
    results.push_back(criterion_recall_trend());
    results.push_back(criterion_out_of_scope());

    bool all = true;
    for (const auto& c : results) {
        std::printf("[%s] criterion %d: %s — %s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
    return all ? 0 : 1;
}
