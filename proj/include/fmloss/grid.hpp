#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fmloss/errors.hpp"

namespace fmloss {

using Scalar = double;
using Index = Eigen::Index;

// Dense 2D scalar map. Row-major so the storage order matches the text
// format and the fixed summation order.
template <typename S>
using GridOf = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Grid = GridOf<Scalar>;

inline std::string shape_str(Index rows, Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename A, typename B>
void require_same_shape(const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b,
                        const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": shape mismatch, " +
                         shape_str(a.rows(), a.cols()) + " vs " + shape_str(b.rows(), b.cols()));
    }
}

// Binary ground-truth mask; every element is exactly 0 or 1 (checked at
// construction). The underlying grid is exposed for arithmetic.
class Mask {
public:
    Mask() = default;

    explicit Mask(Grid values) : values_(std::move(values)) {
        for (Index r = 0; r < values_.rows(); ++r) {
            for (Index c = 0; c < values_.cols(); ++c) {
                const Scalar v = values_(r, c);
                if (v != 0.0 && v != 1.0) {
                    throw ParamError("mask element at (" + std::to_string(r) + ", " +
                                     std::to_string(c) + ") is " + std::to_string(v) +
                                     ", expected 0 or 1");
                }
            }
        }
    }

    static Mask zeros(Index rows, Index cols) { return Mask(Grid::Zero(rows, cols)); }

    const Grid& values() const { return values_; }
    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    Index size() const { return values_.size(); }
    Scalar operator()(Index r, Index c) const { return values_(r, c); }

    // Foreground fraction.
    Scalar fraction() const;

private:
    Grid values_;
};

// out[i] = f(a[i], b[i]); shapes must match.
template <typename F>
Grid zip_map(const Grid& a, const Grid& b, F f) {
    require_same_shape(a, b, "zip_map");
    return a.binaryExpr(b, f);
}

// Row-major sequential sum. Eigen's redux may reassociate terms; this must
// not, so results are bit-reproducible run to run.
template <typename Derived>
typename Derived::Scalar reduce_sum(const Eigen::ArrayBase<Derived>& a) {
    typename Derived::Scalar acc{};
    for (Index r = 0; r < a.rows(); ++r) {
        for (Index c = 0; c < a.cols(); ++c) {
            acc += a.derived().coeff(r, c);
        }
    }
    return acc;
}

// 1/(1+exp(-z)), branched on sign so exp never overflows.
inline Scalar sigmoid_scalar(Scalar z) {
    if (z >= 0.0) {
        const Scalar e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const Scalar e = std::exp(z);
    return e / (1.0 + e);
}

template <typename Derived>
Grid sigmoid(const Eigen::ArrayBase<Derived>& z) {
    return z.derived().unaryExpr([](Scalar v) { return sigmoid_scalar(v); });
}

inline Scalar clamp_prob(Scalar p, Scalar eps) { return std::clamp(p, eps, 1.0 - eps); }

// ln(p/(1-p)) with p clamped to [eps, 1-eps] first; eps must lie in (0, 0.5).
template <typename Derived>
Grid logit(const Eigen::ArrayBase<Derived>& p, Scalar eps) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw ParamError("logit: eps must lie in (0, 0.5)");
    }
    return p.derived().unaryExpr([eps](Scalar v) {
        const Scalar q = clamp_prob(v, eps);
        return std::log(q / (1.0 - q));
    });
}

inline Scalar Mask::fraction() const {
    return values_.size() == 0 ? 0.0 : reduce_sum(values_) / static_cast<Scalar>(values_.size());
}

}  // namespace fmloss
