#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fmloss/grid.hpp"

namespace fmloss {

// Loss hyperparameters. Defaults follow the experimental setup the losses
// were published with: gamma_hat 2.0, delta 0.7, gamma_tv 0.75, margins in
// the 0.5..1.5 band for imbalanced data.
struct LossParams {
    Scalar gamma_hat = 2.0;  // background attenuation exponent on the entropy side
    Scalar delta = 0.7;      // class weight: alpha = delta (FN), beta = 1 - delta (FP)
    Scalar gamma_tv = 0.75;  // Tversky-side enhancement exponent
    Scalar margin = 0.5;     // logit-space margin on foreground pixels
    Scalar lambda = 0.5;     // compound mixing weight (unit-weighted kinds ignore it)
    Scalar smooth = 1.0;     // smoothing term in dice/Tversky ratios
    Scalar eps = 1e-7;       // probability clamp applied inside every log

    // Throws ParamError when any field is out of range.
    void validate() const;
};

void to_json(nlohmann::json& j, const LossParams& p);
// Missing fields keep their defaults; unknown fields are rejected.
void from_json(const nlohmann::json& j, LossParams& p);

enum class LossKind {
    BCE,
    DICE_SORENSEN,
    DICE_SQUARED,
    BCEDICE,
    FOCAL,
    ASYM_FOCAL,
    ASYM_LARGE_MARGIN,
    TVERSKY,
    FOCAL_TVERSKY,
    ASYM_FOCAL_TVERSKY,
    SYM_FOCAL_MARGIN,
    ASYM_FOCAL_MARGIN,
    HYBRID_FOCAL,
    SYM_UNIFIED_FOCAL,
    ASYM_UNIFIED_FOCAL,
    SYM_HYBRID_FOCAL_MARGIN,
    OURS,
};

// Case-insensitive; throws ParamError on unknown names.
LossKind parse_loss_kind(std::string_view name);
std::string_view loss_kind_name(LossKind kind);
const std::vector<LossKind>& all_loss_kinds();

struct LossOutput {
    Scalar value = 0.0;
    Grid grad_logits;  // d value / d z, per pixel
};

// Entropy-component split used by the margin table. For compound kinds the
// region component is folded into value only, so
//   value == foreground + background + region part.
struct LossTerms {
    Scalar value = 0.0;
    Scalar foreground = 0.0;
    Scalar background = 0.0;
};

// Regularized prediction: sigmoid(z - m) on foreground pixels, sigmoid(z)
// elsewhere.
Grid margin_shift(const Grid& z, const Mask& t, Scalar m);

// Entropy losses; value is the per-pixel mean, gradient is w.r.t. logits.
LossOutput bce(const Grid& z, const Mask& t, const LossParams& p);
LossOutput asym_focal(const Grid& z, const Mask& t, const LossParams& p);
LossOutput asym_large_margin(const Grid& z, const Mask& t, const LossParams& p);
LossOutput asym_focal_margin(const Grid& z, const Mask& t, const LossParams& p);
LossOutput sym_focal_margin(const Grid& z, const Mask& t, const LossParams& p);

// Region-overlap quantities on probabilities in [0, 1].
//   tversky_index: (sum TP + s) / (sum TP + alpha*FN + beta*FP + s)
//   focal_tversky: (1 - TI)^gamma_tv
//   dice_loss:     1 - dice ratio; the ratio is arranged as the delta = 0.5
//                  Tversky index so the Tversky<->Dice identity is exact with
//                  a shared smoothing term (squared variant squares the
//                  denominator sums).
Scalar tversky_index(const Grid& probs, const Mask& t, const LossParams& p);
Scalar focal_tversky(const Grid& probs, const Mask& t, const LossParams& p);
Scalar dice_loss(const Grid& probs, const Mask& t, const LossParams& p, bool squared);

bool is_compound(LossKind kind);
// Weighted sum of an entropy component and a region component. BCEDICE,
// HYBRID_FOCAL and OURS use unit weights; the UNIFIED and
// SYM_HYBRID_FOCAL_MARGIN kinds mix with lambda. Throws ParamError for
// non-compound kinds.
LossOutput compound(LossKind kind, const Grid& z, const Mask& t, const LossParams& p);

// Single dispatch over every kind; always returns value and gradient.
LossOutput loss_value_and_grad(LossKind kind, const Grid& z, const Mask& t, const LossParams& p);
Scalar loss_value(LossKind kind, const Grid& z, const Mask& t, const LossParams& p);

bool has_entropy_component(LossKind kind);
// Foreground/background entropy terms (weighted as they enter the value);
// throws ParamError for kinds without an entropy component.
LossTerms loss_terms(LossKind kind, const Grid& z, const Mask& t, const LossParams& p);

}  // namespace fmloss
