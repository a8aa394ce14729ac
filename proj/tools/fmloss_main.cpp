// fmloss: class-imbalance segmentation losses with analytic gradients,
// metrics, synthetic crack masks and a toy per-pixel trainer.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fmloss/gradcheck.hpp"
#include "fmloss/io.hpp"
#include "fmloss/losses.hpp"
#include "fmloss/metrics.hpp"
#include "fmloss/rng.hpp"
#include "fmloss/synth.hpp"
#include "fmloss/trainer.hpp"

namespace {

using nlohmann::json;
using namespace fmloss;

// Loss values print with 15 significant digits; re-parsing pins the emitter
// to exactly that many.
json num15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return json::parse(buf);
}

// --params accepts an inline JSON object or @path to a JSON file.
LossParams load_params(const std::string& spec) {
    if (spec.empty()) return LossParams{};
    json j;
    try {
        if (spec[0] == '@') {
            std::ifstream in(spec.substr(1));
            if (!in) throw ParseError(spec.substr(1) + ": cannot open for reading");
            in >> j;
        } else {
            j = json::parse(spec);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("--params: ") + e.what());
    }
    return j.get<LossParams>();
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// loss
// ---------------------------------------------------------------------------

struct LossArgs {
    std::string kind;
    std::string params;
    std::string logits;
    std::string mask;
    std::string grad_out;
};

int run_loss(const LossArgs& a) {
    const LossKind kind = parse_loss_kind(a.kind);
    const LossParams p = load_params(a.params);
    const Grid z = read_grid_text(a.logits);
    const Mask t = read_mask_pgm(a.mask);
    const LossOutput out = loss_value_and_grad(kind, z, t, p);
    json j{{"schema", "v1"},
           {"kind", loss_kind_name(kind)},
           {"value", num15(out.value)},
           {"params", p}};
    if (!a.grad_out.empty()) {
        write_grid_text(a.grad_out, out.grad_logits);
        j["grad_out"] = a.grad_out;
    }
    emit(j);
    return 0;
}

// ---------------------------------------------------------------------------
// margin-table
// ---------------------------------------------------------------------------

struct MarginTableArgs {
    std::string kind = "ASYM_FOCAL_MARGIN";
    std::string params;
    std::string logits;
    std::string mask;
    std::vector<double> m_list{0.0, 0.5, 1.0, 1.5};
    bool csv = false;
};

int run_margin_table(const MarginTableArgs& a) {
    const LossKind kind = parse_loss_kind(a.kind);
    LossParams p = load_params(a.params);
    const Grid z = read_grid_text(a.logits);
    const Mask t = read_mask_pgm(a.mask);

    std::vector<double> ms = a.m_list;
    if (ms.empty()) throw ParamError("margin-table: --m-list must not be empty");
    std::sort(ms.begin(), ms.end());
    const auto last = std::unique(ms.begin(), ms.end());
    const size_t dupes = static_cast<size_t>(ms.end() - last);
    if (dupes > 0 || !std::is_sorted(a.m_list.begin(), a.m_list.end())) {
        std::cerr << "margin-table: m-list normalized (sorted, " << dupes
                  << " duplicates removed)\n";
    }
    ms.erase(last, ms.end());

    json rows = json::array();
    for (double m : ms) {
        p.margin = m;
        const LossTerms terms = loss_terms(kind, z, t, p);
        rows.push_back({{"m", m},
                        {"value", num15(terms.value)},
                        {"foreground", num15(terms.foreground)},
                        {"background", num15(terms.background)}});
    }

    if (a.csv) {
        std::cout << "m,value,foreground,background\n";
        char buf[160];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%g,%.15g,%.15g,%.15g\n", r["m"].get<double>(),
                          r["value"].get<double>(), r["foreground"].get<double>(),
                          r["background"].get<double>());
            std::cout << buf;
        }
    } else {
        emit(json{{"schema", "v1"}, {"kind", loss_kind_name(kind)}, {"rows", rows}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

struct GradcheckArgs {
    std::string kind;
    std::string params;
    int trials = 200;
    Index height = 8;
    Index width = 8;
    double rel_tol = 1e-5;
    double abs_tol = 1e-8;
    double step = 1e-4;
    std::uint64_t seed = 0;
};

int run_gradcheck(const GradcheckArgs& a) {
    const LossKind kind = parse_loss_kind(a.kind);
    const LossParams p = load_params(a.params);
    const GradCheckReport rep = check_gradients(kind, a.trials, a.height, a.width, a.rel_tol,
                                                a.abs_tol, a.seed, p, a.step);
    json j = gradcheck_report_json(rep);
    j["schema"] = "v1";
    j["kind"] = loss_kind_name(kind);
    j["trials"] = a.trials;
    j["shape"] = {a.height, a.width};
    j["rel_tol"] = a.rel_tol;
    j["abs_tol"] = a.abs_tol;
    j["h"] = a.step;
    j["seed"] = a.seed;
    emit(j);
    return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// reduce-audit
// ---------------------------------------------------------------------------

struct ReduceAuditArgs {
    std::uint64_t seed = 0;
    int trials = 100;
};

struct AuditEdge {
    std::string name;
    LossKind kind_a;
    LossParams params_a;
    LossKind kind_b;
    LossParams params_b;
};

std::vector<AuditEdge> audit_edges() {
    std::vector<AuditEdge> edges;
    auto with = [](double gamma_hat, double margin, double lambda) {
        LossParams p;
        p.gamma_hat = gamma_hat;
        p.margin = margin;
        p.lambda = lambda;
        return p;
    };
    auto add = [&](const std::string& name, LossKind a, LossParams pa, LossKind b,
                   LossParams pb) { edges.push_back({name, a, pa, b, pb}); };

    add("ASYM_FOCAL_MARGIN(m=0) == ASYM_FOCAL", LossKind::ASYM_FOCAL_MARGIN,
        with(2.0, 0.0, 0.5), LossKind::ASYM_FOCAL, with(2.0, 0.0, 0.5));
    add("ASYM_FOCAL_MARGIN(gamma_hat=0) == ASYM_LARGE_MARGIN", LossKind::ASYM_FOCAL_MARGIN,
        with(0.0, 1.0, 0.5), LossKind::ASYM_LARGE_MARGIN, with(0.0, 1.0, 0.5));
    add("ASYM_FOCAL_MARGIN(m=0, gamma_hat=0) == BCE", LossKind::ASYM_FOCAL_MARGIN,
        with(0.0, 0.0, 0.5), LossKind::BCE, with(0.0, 0.0, 0.5));
    add("SYM_FOCAL_MARGIN(m=0) == FOCAL", LossKind::SYM_FOCAL_MARGIN, with(2.0, 0.0, 0.5),
        LossKind::FOCAL, with(2.0, 0.0, 0.5));
    add("SYM_FOCAL_MARGIN(m=0, gamma_hat=0) == BCE", LossKind::SYM_FOCAL_MARGIN,
        with(0.0, 0.0, 0.5), LossKind::BCE, with(0.0, 0.0, 0.5));
    add("FOCAL(gamma_hat=0) == BCE", LossKind::FOCAL, with(0.0, 0.0, 0.5), LossKind::BCE,
        with(0.0, 0.0, 0.5));
    add("OURS(m=0) == HYBRID_FOCAL", LossKind::OURS, with(2.0, 0.0, 0.5),
        LossKind::HYBRID_FOCAL, with(2.0, 0.0, 0.5));
    add("SYM_HYBRID_FOCAL_MARGIN(lambda=1) == SYM_FOCAL_MARGIN",
        LossKind::SYM_HYBRID_FOCAL_MARGIN, with(2.0, 0.5, 1.0), LossKind::SYM_FOCAL_MARGIN,
        with(2.0, 0.5, 1.0));
    add("SYM_HYBRID_FOCAL_MARGIN(lambda=0) == FOCAL_TVERSKY",
        LossKind::SYM_HYBRID_FOCAL_MARGIN, with(2.0, 0.5, 0.0), LossKind::FOCAL_TVERSKY,
        with(2.0, 0.5, 0.0));
    {
        LossParams ph;
        ph.delta = 0.5;
        add("TVERSKY(delta=0.5) == DICE_SORENSEN", LossKind::TVERSKY, ph,
            LossKind::DICE_SORENSEN, ph);
    }
    return edges;
}

double rel_diff(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

int run_reduce_audit(const ReduceAuditArgs& a) {
    if (a.trials < 1) throw ParamError("reduce-audit: --trials must be >= 1");
    constexpr double kTol = 1e-12;
    constexpr Index kSize = 8;

    Rng rng(a.seed);
    const std::vector<AuditEdge> edges = audit_edges();
    std::vector<double> worst_value(edges.size(), 0.0);
    std::vector<double> worst_grad(edges.size(), 0.0);

    for (int trial = 0; trial < a.trials; ++trial) {
        Grid z(kSize, kSize);
        Grid tv(kSize, kSize);
        static constexpr double kRates[] = {0.03, 0.05, 0.07, 0.2, 0.5};
        const double rate = trial == 0 ? 0.0 : kRates[rng.below(5)];  // first: empty mask
        for (Index r = 0; r < kSize; ++r) {
            for (Index c = 0; c < kSize; ++c) {
                z(r, c) = rng.uniform(-4.0, 4.0);
                tv(r, c) = rng.bernoulli(rate) ? 1.0 : 0.0;
            }
        }
        const Mask t(tv);
        for (size_t e = 0; e < edges.size(); ++e) {
            const LossOutput lhs = loss_value_and_grad(edges[e].kind_a, z, t, edges[e].params_a);
            const LossOutput rhs = loss_value_and_grad(edges[e].kind_b, z, t, edges[e].params_b);
            worst_value[e] = std::max(worst_value[e], rel_diff(lhs.value, rhs.value));
            for (Index r = 0; r < kSize; ++r) {
                for (Index c = 0; c < kSize; ++c) {
                    worst_grad[e] = std::max(
                        worst_grad[e], rel_diff(lhs.grad_logits(r, c), rhs.grad_logits(r, c)));
                }
            }
        }
    }

    bool all_pass = true;
    json jedges = json::array();
    for (size_t e = 0; e < edges.size(); ++e) {
        const bool pass = worst_value[e] <= kTol && worst_grad[e] <= kTol;
        all_pass = all_pass && pass;
        jedges.push_back({{"name", edges[e].name},
                          {"max_rel_value", worst_value[e]},
                          {"max_rel_grad", worst_grad[e]},
                          {"pass", pass}});
    }
    emit(json{{"schema", "v1"},
              {"seed", a.seed},
              {"trials", a.trials},
              {"tolerance", kTol},
              {"edges", jedges},
              {"pass", all_pass}});
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsArgs {
    std::string pred;
    std::string truth;
    double threshold = 0.5;
    bool percent = false;
    bool csv = false;
};

int run_metrics(const MetricsArgs& a) {
    const Grid pred = read_grid_text(a.pred);
    const Mask truth = read_mask_pgm(a.truth);
    const ConfusionCounts counts = confusion(binarize(pred, a.threshold), truth);
    const MetricReport rep = metrics(counts);
    if (a.csv) {
        const double scale = a.percent ? 100.0 : 1.0;
        auto cell = [&](const std::optional<Scalar>& v) {
            if (!v) return std::string("n/a");
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.15g", *v * scale);
            return std::string(buf);
        };
        std::cout << "iou,f1,recall,precision\n"
                  << cell(rep.iou) << "," << cell(rep.f1) << "," << cell(rep.recall) << ","
                  << cell(rep.precision) << "\n";
    } else {
        emit(json{{"schema", "v1"},
                  {"threshold", a.threshold},
                  {"counts", counts},
                  {"metrics", metric_report_json(rep, a.percent)}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    int samples = 1;
    SynthConfig cfg;
};

int run_synth(const SynthArgs& a) {
    if (a.samples < 1) throw ParamError("synth: --samples must be >= 1");
    a.cfg.validate();
    std::vector<DatasetEntry> entries;
    for (int i = 0; i < a.samples; ++i) {
        SynthConfig c = a.cfg;
        c.seed = Rng::mix(a.cfg.seed, static_cast<std::uint64_t>(i));
        entries.push_back({c.seed, generate_sample(c)});
    }
    json manifest = save_dataset(a.out, entries);
    manifest["out_dir"] = a.out;
    emit(manifest);
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string kind = "OURS";
    std::string params;
    std::string data;  // optional manifest; otherwise samples are generated
    int samples = 8;
    SynthConfig synth;
    TrainConfig cfg;
    bool csv = false;
};

std::string metric_csv_cell(const std::optional<Scalar>& v) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

int run_train(const TrainArgs& a) {
    TrainConfig cfg = a.cfg;
    cfg.loss_kind = parse_loss_kind(a.kind);
    cfg.loss_params = load_params(a.params);

    std::vector<SynthSample> dataset;
    if (!a.data.empty()) {
        dataset = load_dataset(a.data);
    } else {
        dataset = make_sweep_dataset(a.synth, a.samples, cfg.seed);
    }
    const TrainReport rep = train(cfg, dataset);
    if (a.csv) {
        std::cout << "epoch,train_loss,val_loss,iou,f1,recall,precision\n";
        for (size_t e = 0; e < rep.history.size(); ++e) {
            const auto& h = rep.history[e];
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,", e + 1, h.train_loss,
                          h.val_loss);
            std::cout << buf << metric_csv_cell(h.val_metrics.iou) << ","
                      << metric_csv_cell(h.val_metrics.f1) << ","
                      << metric_csv_cell(h.val_metrics.recall) << ","
                      << metric_csv_cell(h.val_metrics.precision) << "\n";
        }
    } else {
        emit(train_report_json(rep));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::vector<std::string> cells;
    std::string params;  // base params shared by every cell
    int repeats = 1;
    int samples = 8;
    SynthConfig synth;
    TrainConfig cfg;
    bool csv = false;
    bool percent = false;
};

SweepCell parse_cell(const std::string& spec, const LossParams& base) {
    const auto eq = spec.find('=');
    SweepCell cell;
    if (eq == std::string::npos) {
        cell.kind = parse_loss_kind(spec);
        cell.params = base;
        cell.label = "-";
        return cell;
    }
    cell.kind = parse_loss_kind(spec.substr(0, eq));
    const std::string overrides = spec.substr(eq + 1);
    json j;
    try {
        j = json::parse(overrides);
    } catch (const json::exception& e) {
        throw ParseError("--cell: " + std::string(e.what()));
    }
    // Cell overrides apply on top of the shared base parameters.
    json merged = base;
    for (const auto& item : j.items()) merged[item.key()] = item.value();
    cell.params = merged.get<LossParams>();
    cell.label = overrides;
    return cell;
}

int run_sweep(const SweepArgs& a) {
    const LossParams base = load_params(a.params);
    std::vector<SweepCell> cells;
    for (const auto& spec : a.cells) cells.push_back(parse_cell(spec, base));

    const std::vector<SweepRow> rows =
        compare_losses(a.cfg, a.synth, a.samples, cells, a.repeats);
    if (a.csv) {
        std::cout << sweep_csv(rows, a.percent);
    } else {
        emit(sweep_json(rows, a.repeats, a.percent));
    }
    return 0;
}

// ---------------------------------------------------------------------------

void add_synth_options(CLI::App* cmd, SynthConfig& cfg) {
    cmd->add_option("--height", cfg.height, "Mask height in pixels")->capture_default_str();
    cmd->add_option("--width", cfg.width, "Mask width in pixels")->capture_default_str();
    cmd->add_option("--ratio", cfg.target_ratio, "Target foreground fraction, (0, 0.2]")
        ->capture_default_str();
    cmd->add_option("--stroke", cfg.stroke_width, "Stroke width in pixels")
        ->capture_default_str();
    cmd->add_option("--curves", cfg.n_curves, "Number of random-walk curves")
        ->capture_default_str();
    cmd->add_option("--noise", cfg.feature_noise, "Feature noise standard deviation")
        ->capture_default_str();
    cmd->add_option("--channels", cfg.feature_channels, "Number of feature channels")
        ->capture_default_str();
}

void add_train_options(CLI::App* cmd, TrainConfig& cfg) {
    cmd->add_option("--lr", cfg.learning_rate, "Gradient-descent learning rate")
        ->capture_default_str();
    cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--val-split", cfg.val_split, "Validation fraction, (0, 1)")
        ->capture_default_str();
    cmd->add_option("--threshold", cfg.threshold, "Metric binarization threshold")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
}

constexpr const char* kParamsHelp =
    "Loss parameters as inline JSON or @file; fields: gamma_hat (default 2.0), delta (0.7), "
    "gamma_tv (0.75), margin (0.5), lambda (0.5), smooth (1.0), eps (1e-7)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-imbalance segmentation losses: evaluation, gradients and experiments"};
    app.require_subcommand(1);

    LossArgs loss_args;
    auto* loss_cmd = app.add_subcommand("loss", "Evaluate a loss on a logits grid and a mask");
    loss_cmd->add_option("--kind", loss_args.kind, "Loss kind, e.g. BCE or OURS")->required();
    loss_cmd->add_option("--params", loss_args.params, kParamsHelp);
    loss_cmd->add_option("--logits", loss_args.logits, "Logits file in grid text format")
        ->required();
    loss_cmd->add_option("--mask", loss_args.mask, "Ground-truth mask as binary PGM")
        ->required();
    loss_cmd->add_option("--grad-out", loss_args.grad_out,
                         "Write the gradient w.r.t. logits to this grid text file");

    MarginTableArgs mt_args;
    auto* mt_cmd = app.add_subcommand(
        "margin-table", "Tabulate loss value and entropy terms across margin values");
    mt_cmd->add_option("--kind", mt_args.kind, "Entropy-bearing loss kind")
        ->capture_default_str();
    mt_cmd->add_option("--params", mt_args.params, kParamsHelp);
    mt_cmd->add_option("--logits", mt_args.logits, "Logits file in grid text format")
        ->required();
    mt_cmd->add_option("--mask", mt_args.mask, "Ground-truth mask as binary PGM")->required();
    mt_cmd->add_option("--m-list", mt_args.m_list, "Margin values (duplicates are removed)")
        ->delimiter(',')
        ->capture_default_str();
    mt_cmd->add_flag("--csv", mt_args.csv, "Emit CSV instead of JSON");

    GradcheckArgs gc_args;
    auto* gc_cmd = app.add_subcommand(
        "gradcheck", "Compare the analytic gradient against central finite differences");
    gc_cmd->add_option("--kind", gc_args.kind, "Loss kind")->required();
    gc_cmd->add_option("--params", gc_args.params, kParamsHelp);
    gc_cmd->add_option("--trials", gc_args.trials, "Random instances")->capture_default_str();
    gc_cmd->add_option("--height", gc_args.height, "Grid height")->capture_default_str();
    gc_cmd->add_option("--width", gc_args.width, "Grid width")->capture_default_str();
    gc_cmd->add_option("--rel-tol", gc_args.rel_tol, "Relative tolerance per entry")
        ->capture_default_str();
    gc_cmd->add_option("--abs-tol", gc_args.abs_tol, "Absolute floor per entry")
        ->capture_default_str();
    gc_cmd->add_option("--step", gc_args.step, "Central-difference step h")
        ->capture_default_str();
    gc_cmd->add_option("--seed", gc_args.seed, "Seed")->capture_default_str();

    ReduceAuditArgs ra_args;
    auto* ra_cmd = app.add_subcommand(
        "reduce-audit", "Check every reduction identity of the loss family on random inputs");
    ra_cmd->add_option("--seed", ra_args.seed, "Seed")->capture_default_str();
    ra_cmd->add_option("--trials", ra_args.trials, "Random instances per edge")
        ->capture_default_str();

    MetricsArgs m_args;
    auto* m_cmd = app.add_subcommand(
        "metrics", "Binarize a prediction grid and report IoU/F1/Recall/Precision");
    m_cmd->add_option("--pred", m_args.pred, "Predicted probabilities in grid text format")
        ->required();
    m_cmd->add_option("--truth", m_args.truth, "Ground-truth mask as binary PGM")->required();
    m_cmd->add_option("--threshold", m_args.threshold,
                      "Binarization threshold; ties go to foreground")
        ->capture_default_str();
    m_cmd->add_flag("--percent", m_args.percent, "Report metrics as percentages");
    m_cmd->add_flag("--csv", m_args.csv, "Emit CSV instead of JSON");

    SynthArgs s_args;
    auto* s_cmd = app.add_subcommand(
        "synth", "Generate crack-like masks with feature channels and a manifest");
    s_cmd->add_option("--out", s_args.out, "Output directory")->required();
    s_cmd->add_option("--samples", s_args.samples, "Number of samples")->capture_default_str();
    s_cmd->add_option("--seed", s_args.cfg.seed, "Base seed")->capture_default_str();
    add_synth_options(s_cmd, s_args.cfg);

    TrainArgs t_args;
    auto* t_cmd = app.add_subcommand(
        "train", "Train the per-pixel linear classifier under a chosen loss");
    t_cmd->add_option("--kind", t_args.kind, "Loss kind")->capture_default_str();
    t_cmd->add_option("--params", t_args.params, kParamsHelp);
    t_cmd->add_option("--data", t_args.data,
                      "Dataset manifest JSON (default: generate synthetic samples)");
    t_cmd->add_option("--samples", t_args.samples, "Synthetic samples to generate")
        ->capture_default_str();
    add_synth_options(t_cmd, t_args.synth);
    add_train_options(t_cmd, t_args.cfg);
    t_cmd->add_flag("--csv", t_args.csv, "Emit the per-epoch history as CSV");

    SweepArgs sw_args;
    auto* sw_cmd = app.add_subcommand(
        "sweep", "Train several loss configurations and tabulate mean final metrics");
    sw_cmd->add_option("--cell", sw_args.cells,
                       "Loss cell as KIND or KIND={json overrides}; repeatable")
        ->required();
    sw_cmd->add_option("--params", sw_args.params, kParamsHelp);
    sw_cmd->add_option("--repeats", sw_args.repeats, "Training repeats per cell")
        ->capture_default_str();
    sw_cmd->add_option("--samples", sw_args.samples, "Synthetic samples per dataset")
        ->capture_default_str();
    add_synth_options(sw_cmd, sw_args.synth);
    add_train_options(sw_cmd, sw_args.cfg);
    sw_cmd->add_flag("--csv", sw_args.csv, "Emit the paper-style aligned CSV table");
    sw_cmd->add_flag("--percent", sw_args.percent, "Report metrics as percentages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (loss_cmd->parsed()) return run_loss(loss_args);
        if (mt_cmd->parsed()) return run_margin_table(mt_args);
        if (gc_cmd->parsed()) return run_gradcheck(gc_args);
        if (ra_cmd->parsed()) return run_reduce_audit(ra_args);
        if (m_cmd->parsed()) return run_metrics(m_args);
        if (s_cmd->parsed()) return run_synth(s_args);
        if (t_cmd->parsed()) return run_train(t_args);
        if (sw_cmd->parsed()) return run_sweep(sw_args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
