#pragma once

#include "linresp/basis.hpp"
#include "linresp/singular.hpp"

#include <array>
#include <string>
#include <vector>

namespace linresp {

/// M^(0), ..., M^(tau-1) acting on an initial probability vector h0.
class MatrixSequence {
public:
    MatrixSequence(std::vector<StochasticMatrix> matrices, Vector h0);

    [[nodiscard]] Index n() const noexcept { return h0_.size(); }
    [[nodiscard]] Index tau() const noexcept { return static_cast<Index>(matrices_.size()); }
    [[nodiscard]] const StochasticMatrix& matrix(Index t) const { return matrices_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] const Vector& h0() const noexcept { return h0_; }

private:
    std::vector<StochasticMatrix> matrices_;
    Vector h0_;
};

struct PerturbationSequence {
    std::vector<Perturbation> perturbations;

    /// sqrt(sum_t ||m^(t)||_F^2)
    [[nodiscard]] double joint_norm() const;
};

/// h^(0), ..., h^(tau) with h^(t+1) = M^(t) h^(t).
[[nodiscard]] std::vector<Vector> propagate(const MatrixSequence& seq);

/// Terminal distribution when every M^(t) is replaced by M^(t) + eps m^(t).
[[nodiscard]] Vector propagate_perturbed(const MatrixSequence& seq, const PerturbationSequence& ms, double eps);

/// u^(0) = 0, u^(t+1) = M^(t) u^(t) + m^(t) h^(t); returns u^(0), ..., u^(tau).
[[nodiscard]] std::vector<Vector> sequential_responses(const MatrixSequence& seq, const PerturbationSequence& ms);
[[nodiscard]] Vector sequential_response(const MatrixSequence& seq, const PerturbationSequence& ms);

/// u^(tau) as sum_t M^(tau-1) ... M^(t+1) m^(t) h^(t), each term pushed forward separately.
[[nodiscard]] Vector sequential_response_expanded(const MatrixSequence& seq, const PerturbationSequence& ms);

struct SequentialOptions {
    Index dense_limit = 60;
    SingularOptions singular;
    double degeneracy_tolerance = 1e-9;
};

struct SequentialOptimum {
    PerturbationSequence perturbations;
    std::vector<Vector> h;
    Vector u_terminal;
    double objective = 0.0;
    /// Objective of the joint optimizer before the per-step sign choice.
    double pre_flip_objective = 0.0;
    std::array<double, 2> leading_singular_values{};
    bool unique = true;
    std::vector<bool> flipped;
    /// Norm-constraint multiplier (expectation objective only).
    double nu = 0.0;
    std::vector<std::string> notes;
};

/// Maximize ||u^(tau)||_2 under sum_t ||m^(t)||_F^2 = 1. Throws EmptyFeasibleSet.
[[nodiscard]] SequentialOptimum optimize_sequential_norm(const MatrixSequence& seq,
                                                         const SequentialOptions& options = {});

/// Maximize c^T u^(tau) under the joint norm budget. Throws ConstantObservable, EmptyFeasibleSet.
[[nodiscard]] SequentialOptimum optimize_sequential_expectation(const MatrixSequence& seq, const Vector& c);

}  // namespace linresp
