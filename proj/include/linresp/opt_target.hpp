#pragma once

#include "linresp/basis.hpp"
#include "linresp/markov.hpp"

namespace linresp {

/// Observable c together with the convention used to scale it.
struct ObservableVector {
    enum class Normalization { Raw, DensityScaled };

    Vector c;
    Normalization normalization = Normalization::Raw;
};

/// c sampled at the cell midpoints of a uniform n-cell partition of [0,1], rescaled to ||c||_2 = sqrt(n).
[[nodiscard]] ObservableVector discretize_observable(const std::function<double(double)>& f, Index n);

/// w = Q^T c, i.e. (Id - M + h 1^T)^T w = c.
[[nodiscard]] Vector adjoint_weights(const StochasticMatrix& m, const Vector& h, const Vector& c);
[[nodiscard]] Vector adjoint_weights(const ResponseSolver& solver, const Vector& c);

struct ExpectationOptimum : ResponseResult {
    Perturbation m_star;
    Vector w;
    /// Multipliers of the column-sum constraints, h_j times the admissible mean of w.
    Vector column_multipliers;
    /// Multiplier of the norm constraint.
    double nu = 0.0;
};

/// Unit-norm perturbation maximizing c^T u1.
/// Throws ConstantObservable, EmptyFeasibleSet, ZeroGradient.
[[nodiscard]] ExpectationOptimum optimize_expectation(const StochasticMatrix& m, const Vector& c,
                                                     const StationaryOptions& options = {});

/// Relative size of the non-constant part of c below which it counts as constant.
inline constexpr double kConstantObservableTolerance = 1e-12;

[[nodiscard]] bool is_constant_observable(const Vector& c);

}  // namespace linresp
