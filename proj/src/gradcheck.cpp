#include "fmloss/gradcheck.hpp"

#include <cmath>

#include "fmloss/rng.hpp"

namespace fmloss {

Grid finite_diff_grad(LossKind kind, const Grid& z, const Mask& t, const LossParams& p,
                      Scalar h) {
    return finite_diff([&](const Grid& zz) { return loss_value(kind, zz, t, p); }, z, h);
}

GradCheckReport check_gradients(LossKind kind, int trials, Index rows, Index cols,
                                Scalar rel_tol, Scalar abs_tol, std::uint64_t seed,
                                const LossParams& p, Scalar h) {
    if (trials < 1) {
        throw ParamError("check_gradients: trials must be >= 1");
    }
    p.validate();
    static constexpr Scalar kRates[] = {0.03, 0.05, 0.07};

    Rng rng(seed);
    GradCheckReport rep;
    for (int trial = 0; trial < trials; ++trial) {
        const Scalar rate = kRates[rng.below(3)];
        Grid z(rows, cols);
        Grid tv(rows, cols);
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) {
                z(r, c) = rng.uniform(-4.0, 4.0);
                tv(r, c) = rng.bernoulli(rate) ? 1.0 : 0.0;
            }
        }
        const Mask t(tv);

        const Grid analytic = loss_value_and_grad(kind, z, t, p).grad_logits;
        const Grid fd = finite_diff_grad(kind, z, t, p, h);
        const Grid P = sigmoid(z);
        const Grid phat = margin_shift(z, t, p.margin);

        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) {
                const Scalar band = 2.0 * p.eps;
                const bool near_clamp = P(r, c) < band || P(r, c) > 1.0 - band ||
                                        phat(r, c) < band || phat(r, c) > 1.0 - band;
                if (near_clamp) {
                    ++rep.skipped;
                    continue;
                }
                ++rep.checked;
                const Scalar a = analytic(r, c);
                const Scalar f = fd(r, c);
                const Scalar abs_err = std::abs(a - f);
                const Scalar denom = std::max(std::abs(a), std::abs(f));
                const Scalar rel_err = denom == 0.0 ? 0.0 : abs_err / denom;
                if (rel_err > rep.max_rel_err) {
                    rep.max_rel_err = rel_err;
                    rep.worst_row = r;
                    rep.worst_col = c;
                    rep.worst_trial = trial;
                }
                rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
                if (!(rel_err < rel_tol || abs_err < abs_tol)) {
                    rep.pass = false;
                }
            }
        }
    }
    return rep;
}

nlohmann::json gradcheck_report_json(const GradCheckReport& r) {
    return nlohmann::json{
        {"pass", r.pass},
        {"max_rel_err", r.max_rel_err},
        {"max_abs_err", r.max_abs_err},
        {"worst", {{"row", r.worst_row}, {"col", r.worst_col}, {"trial", r.worst_trial}}},
        {"checked", r.checked},
        {"skipped", r.skipped},
    };
}

}  // namespace fmloss
