#pragma once

#include <cstdint>

#include <json.hpp>

#include "fmloss/losses.hpp"

namespace fmloss {

struct GradCheckReport {
    Scalar max_rel_err = 0.0;
    Scalar max_abs_err = 0.0;
    Index worst_row = -1;  // entry with the largest relative error
    Index worst_col = -1;
    int worst_trial = -1;
    long checked = 0;
    long skipped = 0;  // entries inside the clamp band, where the analytic
                       // gradient is clamp-constant by definition
    bool pass = true;  // every checked entry met rel_tol or abs_tol
};

// Central differences of an arbitrary scalar functional of the logits, one
// coordinate at a time. Also used to calibrate the harness itself.
template <typename F>
Grid finite_diff(F&& f, const Grid& z, Scalar h) {
    if (!(h > 0.0)) {
        throw ParamError("finite_diff: h must be > 0");
    }
    Grid out(z.rows(), z.cols());
    Grid zz = z;
    for (Index r = 0; r < z.rows(); ++r) {
        for (Index c = 0; c < z.cols(); ++c) {
            const Scalar orig = zz(r, c);
            zz(r, c) = orig + h;
            const Scalar hi = f(zz);
            zz(r, c) = orig - h;
            const Scalar lo = f(zz);
            zz(r, c) = orig;
            out(r, c) = (hi - lo) / (2.0 * h);
        }
    }
    return out;
}

Grid finite_diff_grad(LossKind kind, const Grid& z, const Mask& t, const LossParams& p,
                      Scalar h = 1e-4);

// Deterministic in seed: draws z uniform in [-4, 4] and Bernoulli masks with
// foreground rate from {0.03, 0.05, 0.07}, then compares the analytic
// gradient against central differences entry by entry. An entry passes when
// rel_err < rel_tol or abs_err < abs_tol; pixels whose probability lies
// within 2*eps of 0 or 1 are skipped.
GradCheckReport check_gradients(LossKind kind, int trials, Index rows, Index cols,
                                Scalar rel_tol, Scalar abs_tol, std::uint64_t seed,
                                const LossParams& p = {}, Scalar h = 1e-4);

nlohmann::json gradcheck_report_json(const GradCheckReport& r);

}  // namespace fmloss
