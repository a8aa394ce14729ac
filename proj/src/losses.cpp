#include "fmloss/losses.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace fmloss {

void LossParams::validate() const {
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw ParamError(msg);
    };
    need(std::isfinite(gamma_hat) && gamma_hat >= 0.0, "gamma_hat must be >= 0");
    need(std::isfinite(delta) && delta >= 0.0 && delta <= 1.0, "delta must lie in [0, 1]");
    need(std::isfinite(gamma_tv) && gamma_tv > 0.0, "gamma_tv must be > 0");
    need(std::isfinite(margin) && margin >= 0.0, "margin must be >= 0");
    need(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
    need(std::isfinite(smooth) && smooth >= 0.0, "smooth must be >= 0");
    need(std::isfinite(eps) && eps > 0.0 && eps < 0.5, "eps must lie in (0, 0.5)");
}

namespace {

struct ParamField {
    const char* name;
    Scalar LossParams::* member;
};

constexpr ParamField kParamFields[] = {
    {"gamma_hat", &LossParams::gamma_hat}, {"delta", &LossParams::delta},
    {"gamma_tv", &LossParams::gamma_tv},   {"margin", &LossParams::margin},
    {"lambda", &LossParams::lambda},       {"smooth", &LossParams::smooth},
    {"eps", &LossParams::eps},
};

}  // namespace

void to_json(nlohmann::json& j, const LossParams& p) {
    j = nlohmann::json::object();
    for (const auto& f : kParamFields) j[f.name] = p.*(f.member);
}

void from_json(const nlohmann::json& j, LossParams& p) {
    if (!j.is_object()) {
        throw ParamError("LossParams JSON must be an object");
    }
    for (const auto& item : j.items()) {
        const bool known = std::any_of(std::begin(kParamFields), std::end(kParamFields),
                                       [&](const ParamField& f) { return item.key() == f.name; });
        if (!known) {
            throw ParamError("unknown LossParams field: " + item.key());
        }
    }
    p = LossParams{};
    for (const auto& f : kParamFields) {
        if (j.contains(f.name)) {
            if (!j.at(f.name).is_number()) {
                throw ParamError(std::string("LossParams field ") + f.name + " must be a number");
            }
            p.*(f.member) = j.at(f.name).get<Scalar>();
        }
    }
    p.validate();
}

namespace {

struct KindName {
    LossKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {LossKind::BCE, "BCE"},
    {LossKind::DICE_SORENSEN, "DICE_SORENSEN"},
    {LossKind::DICE_SQUARED, "DICE_SQUARED"},
    {LossKind::BCEDICE, "BCEDICE"},
    {LossKind::FOCAL, "FOCAL"},
    {LossKind::ASYM_FOCAL, "ASYM_FOCAL"},
    {LossKind::ASYM_LARGE_MARGIN, "ASYM_LARGE_MARGIN"},
    {LossKind::TVERSKY, "TVERSKY"},
    {LossKind::FOCAL_TVERSKY, "FOCAL_TVERSKY"},
    {LossKind::ASYM_FOCAL_TVERSKY, "ASYM_FOCAL_TVERSKY"},
    {LossKind::SYM_FOCAL_MARGIN, "SYM_FOCAL_MARGIN"},
    {LossKind::ASYM_FOCAL_MARGIN, "ASYM_FOCAL_MARGIN"},
    {LossKind::HYBRID_FOCAL, "HYBRID_FOCAL"},
    {LossKind::SYM_UNIFIED_FOCAL, "SYM_UNIFIED_FOCAL"},
    {LossKind::ASYM_UNIFIED_FOCAL, "ASYM_UNIFIED_FOCAL"},
    {LossKind::SYM_HYBRID_FOCAL_MARGIN, "SYM_HYBRID_FOCAL_MARGIN"},
    {LossKind::OURS, "OURS"},
};

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (const auto& kn : kKindNames) {
        if (upper == kn.name) return kn.kind;
    }
    throw ParamError("unknown loss kind: " + std::string(name));
}

std::string_view loss_kind_name(LossKind kind) {
    for (const auto& kn : kKindNames) {
        if (kn.kind == kind) return kn.name;
    }
    return "?";
}

const std::vector<LossKind>& all_loss_kinds() {
    static const std::vector<LossKind> kinds = [] {
        std::vector<LossKind> v;
        for (const auto& kn : kKindNames) v.push_back(kn.kind);
        return v;
    }();
    return kinds;
}

Grid margin_shift(const Grid& z, const Mask& t, Scalar m) {
    if (!(m >= 0.0)) {
        throw ParamError("margin_shift: m must be >= 0");
    }
    require_same_shape(z, t.values(), "margin_shift");
    // z - m*t leaves background logits bitwise untouched.
    return sigmoid(z - m * t.values());
}

namespace {

// ---------------------------------------------------------------------------
// Entropy side. One kernel covers the whole family
//
//   L = -(1/N) sum[ w_fg T (1-P)^gf log Phat_c  +  w_bg (1-T) P^gb log(1-P_c) ]
//
// with P = sigmoid(z), Phat = sigmoid(z - m) on foreground pixels and _c the
// clamp to [eps, 1-eps]. Every published reduction (m = 0, exponents = 0)
// then degenerates to the same arithmetic, so the identities hold bitwise.
// The clamp is constant in the gradient: the log path contributes nothing
// where the clamp is active (the gate arrays below).
// ---------------------------------------------------------------------------

struct EntropyCfg {
    Scalar gamma_fg = 0.0;  // exponent on (1-P) over the foreground log term
    Scalar gamma_bg = 0.0;  // exponent on P over the background log term
    Scalar margin = 0.0;    // foreground logit shift inside the log
    Scalar w_fg = 1.0;      // class weights; only the unified kinds use them
    Scalar w_bg = 1.0;
};

struct EntropyPart {
    Scalar foreground = 0.0;  // weighted, already divided by N
    Scalar background = 0.0;
    Grid grad;
};

EntropyPart entropy_loss(const Grid& z, const Mask& t, const EntropyCfg& c, Scalar eps) {
    const Grid& T = t.values();
    const Scalar n = static_cast<Scalar>(z.size());
    const Scalar lo = eps, hi = 1.0 - eps;

    const Grid P = sigmoid(z);
    const Grid pc = P.max(lo).min(hi);
    const Grid gate = ((P >= lo) && (P <= hi)).cast<Scalar>();

    const Grid phat = margin_shift(z, t, c.margin);
    const Grid phatc = phat.max(lo).min(hi);
    const Grid ghat = ((phat >= lo) && (phat <= hi)).cast<Scalar>();

    const Grid wf = (1.0 - P).pow(c.gamma_fg);  // exactly ones when gamma_fg == 0
    const Grid wb = P.pow(c.gamma_bg);
    const Grid log_phatc = phatc.log();
    const Grid log_1mpc = (1.0 - pc).log();

    EntropyPart out;
    out.foreground = -c.w_fg / n * reduce_sum(T * wf * log_phatc);
    out.background = -c.w_bg / n * reduce_sum((1.0 - T) * wb * log_1mpc);

    // d(1-P)^gf/dz = -gf P (1-P)^gf and dP^gb/dz = gb (1-P) P^gb, folded so no
    // negative power is ever formed.
    const Grid dfg =
        T * (c.gamma_fg * P * wf * log_phatc - wf * ghat * phat * (1.0 - phat) / phatc);
    const Grid dbg = (1.0 - T) * (-c.gamma_bg * (1.0 - P) * wb * log_1mpc +
                                  wb * gate * P * (1.0 - P) / (1.0 - pc));
    out.grad = (c.w_fg * dfg + c.w_bg * dbg) / n;
    return out;
}

// ---------------------------------------------------------------------------
// Region side. The ratio core is shared by Tversky, dice and their focal
// powers; the denominator is accumulated on top of the numerator so it can
// never round below it and the ratio stays <= 1.
// ---------------------------------------------------------------------------

struct RegionRatio {
    Scalar ratio = 1.0;
    Grid dratio_dp;
};

RegionRatio tversky_ratio(const Grid& P, const Grid& T, Scalar alpha, Scalar beta,
                          Scalar smooth) {
    const Scalar inter = reduce_sum(T * P);
    const Scalar fn = reduce_sum(T * (1.0 - P));
    const Scalar fp = reduce_sum(P * (1.0 - T));
    const Scalar num = inter + smooth;
    const Scalar den = (num + alpha * fn) + beta * fp;
    RegionRatio out;
    if (den == 0.0) {  // empty mask and prediction with smooth == 0
        out.dratio_dp = Grid::Zero(P.rows(), P.cols());
        return out;
    }
    out.ratio = num / den;
    const Grid dden = (1.0 - alpha) * T + beta * (1.0 - T);
    out.dratio_dp = (T * den - num * dden) / (den * den);
    return out;
}

// Squared-denominator dice in the same arrangement:
//   (sum TP + s) / (0.5 sum T^2 + 0.5 sum P^2 + s),  T^2 == T on a binary mask.
RegionRatio squared_dice_ratio(const Grid& P, const Grid& T, Scalar smooth) {
    const Scalar inter = reduce_sum(T * P);
    const Scalar num = inter + smooth;
    const Scalar den = 0.5 * reduce_sum(T) + 0.5 * reduce_sum(P * P) + smooth;
    RegionRatio out;
    if (den == 0.0) {
        out.dratio_dp = Grid::Zero(P.rows(), P.cols());
        return out;
    }
    // den >= num holds exactly in real arithmetic (AM-GM); the min guards the
    // last-ulp rounding of the independently accumulated sums.
    out.ratio = std::min(num / den, 1.0);
    out.dratio_dp = (T * den - num * P) / (den * den);
    return out;
}

struct RegionCfg {
    Scalar alpha = 0.5;
    Scalar beta = 0.5;
    Scalar exponent = 1.0;  // on (1 - ratio)
    Scalar smooth = 1.0;
    bool squared = false;
};

struct RegionPart {
    Scalar value = 0.0;
    Grid grad;
};

RegionPart region_loss(const Grid& P, const Grid& T, const RegionCfg& c) {
    const RegionRatio rr = c.squared ? squared_dice_ratio(P, T, c.smooth)
                                     : tversky_ratio(P, T, c.alpha, c.beta, c.smooth);
    const Scalar base = 1.0 - rr.ratio;  // >= 0 by construction
    RegionPart out;
    out.value = std::pow(base, c.exponent);
    // Subgradient 0 at the perfect-overlap corner, where exponents < 1 have an
    // unbounded true derivative.
    const Scalar outer = base == 0.0 ? 0.0 : c.exponent * std::pow(base, c.exponent - 1.0);
    out.grad = (-outer) * rr.dratio_dp * P * (1.0 - P);
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch table: every kind is a weighted entropy part plus a weighted
// region part.
// ---------------------------------------------------------------------------

struct KindSpec {
    bool has_entropy = false;
    EntropyCfg entropy;
    Scalar w_entropy = 0.0;
    bool has_region = false;
    RegionCfg region;
    Scalar w_region = 0.0;
};

KindSpec kind_spec(LossKind k, const LossParams& p) {
    const Scalar gh = p.gamma_hat;
    const Scalar gt = p.gamma_tv;
    const Scalar m = p.margin;
    const Scalar la = p.lambda;
    const Scalar a = p.delta;
    const Scalar b = 1.0 - p.delta;
    const Scalar s = p.smooth;

    KindSpec ks;
    auto entropy = [&](Scalar gf, Scalar gb, Scalar mm, Scalar wf, Scalar wb, Scalar w) {
        ks.has_entropy = true;
        ks.entropy = {gf, gb, mm, wf, wb};
        ks.w_entropy = w;
    };
    auto region = [&](Scalar alpha, Scalar beta, Scalar e, bool squared, Scalar w) {
        ks.has_region = true;
        ks.region = {alpha, beta, e, s, squared};
        ks.w_region = w;
    };

    switch (k) {
        case LossKind::BCE:               entropy(0, 0, 0, 1, 1, 1); break;
        case LossKind::FOCAL:             entropy(gh, gh, 0, 1, 1, 1); break;
        case LossKind::ASYM_FOCAL:        entropy(0, gh, 0, 1, 1, 1); break;
        case LossKind::ASYM_LARGE_MARGIN: entropy(0, 0, m, 1, 1, 1); break;
        case LossKind::ASYM_FOCAL_MARGIN: entropy(0, gh, m, 1, 1, 1); break;
        case LossKind::SYM_FOCAL_MARGIN:  entropy(gh, gh, m, 1, 1, 1); break;

        case LossKind::DICE_SORENSEN:     region(0.5, 0.5, 1.0, false, 1); break;
        case LossKind::DICE_SQUARED:      region(0.5, 0.5, 1.0, true, 1); break;
        case LossKind::TVERSKY:           region(a, b, 1.0, false, 1); break;
        case LossKind::FOCAL_TVERSKY:     region(a, b, gt, false, 1); break;
        // Rare-class enhancement exponent (1 - gamma_tv); the non-rare term
        // drops in the binary setting.
        case LossKind::ASYM_FOCAL_TVERSKY: region(a, b, 1.0 - gt, false, 1); break;

        case LossKind::BCEDICE:
            entropy(0, 0, 0, 1, 1, 1);
            region(0.5, 0.5, 1.0, false, 1);
            break;
        // Unit-weighted experimental compounds: OURS and HYBRID_FOCAL differ
        // only in the margin, so OURS(m = 0) == HYBRID_FOCAL bitwise.
        case LossKind::HYBRID_FOCAL:
            entropy(0, gh, 0, 1, 1, 1);
            region(a, b, gt, false, 1);
            break;
        case LossKind::OURS:
            entropy(0, gh, m, 1, 1, 1);
            region(a, b, gt, false, 1);
            break;
        case LossKind::SYM_HYBRID_FOCAL_MARGIN:
            entropy(gh, gh, m, 1, 1, la);
            region(a, b, gt, false, 1.0 - la);
            break;
        // Unified kinds share one delta (class weights on both components)
        // and one gamma (gamma_tv on both components).
        case LossKind::SYM_UNIFIED_FOCAL:
            entropy(gt, gt, 0, a, b, la);
            region(a, b, gt, false, 1.0 - la);
            break;
        case LossKind::ASYM_UNIFIED_FOCAL:
            entropy(0, gt, 0, a, b, la);
            region(a, b, 1.0 - gt, false, 1.0 - la);
            break;
    }
    return ks;
}

void require_probabilities(const Grid& pr, const char* what) {
    if ((pr < 0.0).any() || (pr > 1.0).any()) {
        throw ParamError(std::string(what) + ": probabilities must lie in [0, 1]");
    }
}

}  // namespace

LossOutput loss_value_and_grad(LossKind kind, const Grid& z, const Mask& t,
                               const LossParams& p) {
    p.validate();
    require_same_shape(z, t.values(), "loss");
    const KindSpec ks = kind_spec(kind, p);
    LossOutput out;
    out.grad_logits = Grid::Zero(z.rows(), z.cols());
    if (ks.has_entropy) {
        const EntropyPart e = entropy_loss(z, t, ks.entropy, p.eps);
        out.value += ks.w_entropy * (e.foreground + e.background);
        out.grad_logits += ks.w_entropy * e.grad;
    }
    if (ks.has_region) {
        const Grid P = sigmoid(z);
        const RegionPart r = region_loss(P, t.values(), ks.region);
        out.value += ks.w_region * r.value;
        out.grad_logits += ks.w_region * r.grad;
    }
    return out;
}

Scalar loss_value(LossKind kind, const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(kind, z, t, p).value;
}

LossOutput bce(const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(LossKind::BCE, z, t, p);
}

LossOutput asym_focal(const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(LossKind::ASYM_FOCAL, z, t, p);
}

LossOutput asym_large_margin(const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(LossKind::ASYM_LARGE_MARGIN, z, t, p);
}

LossOutput asym_focal_margin(const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(LossKind::ASYM_FOCAL_MARGIN, z, t, p);
}

LossOutput sym_focal_margin(const Grid& z, const Mask& t, const LossParams& p) {
    return loss_value_and_grad(LossKind::SYM_FOCAL_MARGIN, z, t, p);
}

Scalar tversky_index(const Grid& probs, const Mask& t, const LossParams& p) {
    p.validate();
    require_same_shape(probs, t.values(), "tversky_index");
    require_probabilities(probs, "tversky_index");
    return tversky_ratio(probs, t.values(), p.delta, 1.0 - p.delta, p.smooth).ratio;
}

Scalar focal_tversky(const Grid& probs, const Mask& t, const LossParams& p) {
    p.validate();
    require_same_shape(probs, t.values(), "focal_tversky");
    require_probabilities(probs, "focal_tversky");
    const Scalar ti = tversky_ratio(probs, t.values(), p.delta, 1.0 - p.delta, p.smooth).ratio;
    return std::pow(1.0 - ti, p.gamma_tv);
}

Scalar dice_loss(const Grid& probs, const Mask& t, const LossParams& p, bool squared) {
    p.validate();
    require_same_shape(probs, t.values(), "dice_loss");
    require_probabilities(probs, "dice_loss");
    const RegionRatio rr = squared ? squared_dice_ratio(probs, t.values(), p.smooth)
                                   : tversky_ratio(probs, t.values(), 0.5, 0.5, p.smooth);
    return 1.0 - rr.ratio;
}

bool is_compound(LossKind kind) {
    switch (kind) {
        case LossKind::BCEDICE:
        case LossKind::HYBRID_FOCAL:
        case LossKind::ASYM_FOCAL_TVERSKY:
        case LossKind::SYM_UNIFIED_FOCAL:
        case LossKind::ASYM_UNIFIED_FOCAL:
        case LossKind::SYM_HYBRID_FOCAL_MARGIN:
        case LossKind::OURS:
            return true;
        default:
            return false;
    }
}

LossOutput compound(LossKind kind, const Grid& z, const Mask& t, const LossParams& p) {
    if (!is_compound(kind)) {
        throw ParamError("compound: " + std::string(loss_kind_name(kind)) +
                         " is not a compound kind");
    }
    return loss_value_and_grad(kind, z, t, p);
}

bool has_entropy_component(LossKind kind) {
    return kind_spec(kind, LossParams{}).has_entropy;
}

LossTerms loss_terms(LossKind kind, const Grid& z, const Mask& t, const LossParams& p) {
    p.validate();
    require_same_shape(z, t.values(), "loss_terms");
    const KindSpec ks = kind_spec(kind, p);
    if (!ks.has_entropy) {
        throw ParamError("loss_terms: " + std::string(loss_kind_name(kind)) +
                         " has no entropy component");
    }
    const EntropyPart e = entropy_loss(z, t, ks.entropy, p.eps);
    LossTerms out;
    out.foreground = ks.w_entropy * e.foreground;
    out.background = ks.w_entropy * e.background;
    out.value = out.foreground + out.background;
    if (ks.has_region) {
        out.value += ks.w_region * region_loss(sigmoid(z), t.values(), ks.region).value;
    }
    return out;
}

}  // namespace fmloss
