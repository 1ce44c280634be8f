#pragma once

#include "linresp/basis.hpp"
#include "linresp/markov.hpp"
#include "linresp/singular.hpp"

#include <array>
#include <optional>

namespace linresp {

struct NormOptions {
    /// Up to this many states the reduced operator is formed densely and decomposed by SVD.
    Index dense_limit = 60;
    SingularOptions singular;
    /// Relative gap below which the top two singular values count as equal.
    double degeneracy_tolerance = 1e-9;
    /// Probe for the sign choice; defaults to min(1e-3, feasible range / 10).
    std::optional<double> probe_epsilon;
    StationaryOptions stationary;
};

struct NormOptimum : ResponseResult {
    Perturbation m_star;
    /// sigma_1 >= sigma_2 of the reduced response operator.
    std::array<double, 2> leading_singular_values{};
    bool unique = true;
    bool sign_flipped = false;
};

/// Unit-norm direction maximizing ||u1||_2 over perturbations of a positive matrix.
/// Throws NotPositive if some entry is at or below the zero threshold.
[[nodiscard]] NormOptimum optimize_norm_positive(const StochasticMatrix& m, const NormOptions& options = {});

/// Same objective for a mixing matrix with structural zeros and ones.
[[nodiscard]] NormOptimum optimize_norm_general(const StochasticMatrix& m, const NormOptions& options = {});
[[nodiscard]] NormOptimum optimize_norm_general(const StochasticMatrix& m, const ConstraintBasis& basis,
                                                const NormOptions& options = {});

/// The reduced response operator alpha -> Q sum_j h_j B_j alpha_j.
[[nodiscard]] LinearOperator reduced_response_operator(const ResponseSolver& solver, const ConstraintBasis& basis);

/// Dense form of the reduced response operator, n x total_dim.
[[nodiscard]] Matrix reduced_response_matrix(const StochasticMatrix& m, const Vector& h, const ConstraintBasis& basis);

[[nodiscard]] double default_probe_epsilon(const EpsilonRange& range);

struct SignChoice {
    bool flipped = false;
    double probe_epsilon = 0.0;
    double norm_plus = 0.0;
    double norm_minus = 0.0;
};

/// Compare ||h(M + eps m)|| with ||h(M - eps m)||; flipped when the negative side is larger.
/// Throws Inconclusive if the two agree to within 1e-14, InfeasibleEpsilon if the probe leaves
/// the feasible range.
[[nodiscard]] SignChoice select_sign(const StochasticMatrix& m, const Perturbation& direction, double probe_epsilon,
                                     const StationaryOptions& options = {});

inline constexpr double kSignResolution = 1e-14;

}  // namespace linresp
