#pragma once

#include "linresp/stochastic_matrix.hpp"

#include <cstdint>
#include <functional>

namespace linresp {

/// Linear map R^cols -> R^rows given by its action and the action of its adjoint.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<Vector(const Vector&)> apply;
    std::function<Vector(const Vector&)> apply_adjoint;
};

struct SingularOptions {
    Index block_size = 6;
    /// Relative residual of the Ritz pairs of A A^T at convergence.
    double tolerance = 1e-11;
    long max_iterations = 10'000;
    std::uint64_t seed = 1;
};

/// Leading singular triplets, values in decreasing order.
struct SingularPairs {
    Vector values;
    Matrix left;
    Matrix right;
    long iterations = 0;
};

/// Block subspace iteration on A A^T with Rayleigh-Ritz extraction.
/// Throws NoConvergence when the iteration budget is exhausted.
[[nodiscard]] SingularPairs top_singular_pairs(const LinearOperator& op, Index count, const SingularOptions& options = {});

[[nodiscard]] SingularPairs dense_singular_pairs(const Matrix& a, Index count);

}  // namespace linresp
