#pragma once

#include "linresp/stochastic_matrix.hpp"

#include <memory>
#include <string>
#include <vector>

namespace linresp {

struct StationaryOptions {
    double residual_tolerance = 1e-13;
    long max_iterations = 1'000'000;
    /// Matrices up to this size are solved directly instead of by power iteration.
    Index dense_limit = 500;
};

/// Invariant probability vector h with M h = h, 1^T h = 1.
/// Throws NonMixing for reducible or periodic chains, NoConvergence when the
/// power iteration exhausts its budget.
[[nodiscard]] Vector stationary_distribution(const StochasticMatrix& m, const StationaryOptions& options = {});

/// Factorization of the bordered system
///
///     [ Id - M   h ] [u]   [g]
///     [  1^T     0 ] [s] = [0]
///
/// whose solution u agrees with the consistent augmented system
/// (Id - M) u = g, 1^T u = 0 for zero-sum g. One factorization serves both
/// Q g and Q^T v, so the fundamental matrix Q is never formed.
class ResponseSolver {
public:
    ResponseSolver(const StochasticMatrix& m, Vector h);

    [[nodiscard]] Index n() const noexcept { return h_.size(); }
    [[nodiscard]] const Vector& stationary() const noexcept { return h_; }
    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return m_; }

    /// Q g for arbitrary g.
    [[nodiscard]] Vector apply_fundamental(const Vector& g) const;
    /// Q^T v for arbitrary v.
    [[nodiscard]] Vector apply_fundamental_transpose(const Vector& v) const;

    /// Linear response u1 = Q m h, checked against the augmented system.
    [[nodiscard]] Vector response(const Perturbation& m) const;

    /// Residual of (Id - M) u = g, 1^T u = 0 in the 2-norm.
    [[nodiscard]] double augmented_residual(const Vector& u, const Vector& g) const;

    static constexpr double kResidualTolerance = 1e-10;

private:
    struct Factorization;
    SparseMatrix m_;
    Vector h_;
    std::shared_ptr<const Factorization> lu_;
};

[[nodiscard]] Vector linear_response(const StochasticMatrix& m, const Vector& h, const Perturbation& p);

/// Dense Q = (Id - M + h 1^T)^{-1}; TooLarge beyond dense_cap states.
[[nodiscard]] Matrix fundamental_matrix(const StochasticMatrix& m, const Vector& h, Index dense_cap = 5000);

/// M + eps*m as a stochastic matrix; InfeasibleEpsilon if any entry turns negative.
[[nodiscard]] StochasticMatrix perturbed_matrix(const StochasticMatrix& m, const Perturbation& p, double eps);

[[nodiscard]] Vector perturbed_stationary(const StochasticMatrix& m, const Perturbation& p, double eps,
                                          const StationaryOptions& options = {});

/// Invariant vector of a column-sum-one matrix that need not be nonnegative,
/// normalized to sum 1. Solved directly through a bordered system with the
/// given border column (any vector with nonzero sum). SingularSystem if the
/// fixed point is not unique.
[[nodiscard]] Vector invariant_vector(const SparseMatrix& a, const Vector& border);

/// Invariant vector of M + eps*m without the nonnegativity check of
/// perturbed_matrix; for linearization sweeps past the feasibility interval.
[[nodiscard]] Vector perturbed_invariant_vector(const StochasticMatrix& m, const Vector& h, const Perturbation& p,
                                                double eps);

/// Shared fields of every optimizer result.
struct ResponseResult {
    Vector h;
    Vector u1;
    double objective = 0.0;
    double sign_probe_epsilon = 0.0;
    std::vector<std::string> notes;
};

}  // namespace linresp
