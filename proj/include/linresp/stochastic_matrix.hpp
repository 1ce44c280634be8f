#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace linresp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Entries at or below this value are structural zeros for the support mask.
inline constexpr double kDefaultZeroThreshold = 1e-7;
/// Entries within this distance of 1 are structural ones.
inline constexpr double kStructuralOneTolerance = 1e-12;
inline constexpr double kColumnSumTolerance = 1e-12;

/// Rows that may be perturbed, stored per column in increasing order.
///
/// Row i of column j is admissible when the base entry M_ij is neither a
/// structural zero nor a structural one.
class SupportMask {
public:
    SupportMask() = default;
    SupportMask(Index n, std::vector<Index> col_start, std::vector<Index> rows);

    static SupportMask from_matrix(const SparseMatrix& m, double zero_threshold);
    static SupportMask full(Index n);

    [[nodiscard]] Index n() const noexcept { return n_; }
    [[nodiscard]] std::span<const Index> rows(Index col) const;
    [[nodiscard]] Index count(Index col) const { return col_start_[col + 1] - col_start_[col]; }
    [[nodiscard]] bool contains(Index row, Index col) const;
    [[nodiscard]] Index total() const noexcept { return static_cast<Index>(rows_.size()); }

private:
    Index n_ = 0;
    std::vector<Index> col_start_{0};
    std::vector<Index> rows_;
};

/// Column-stochastic transition matrix: M_ij is the probability of moving from state j to state i.
class StochasticMatrix {
public:
    explicit StochasticMatrix(SparseMatrix m, double zero_threshold = kDefaultZeroThreshold);

    static StochasticMatrix from_dense(const Matrix& m, double zero_threshold = kDefaultZeroThreshold);

    [[nodiscard]] Index n() const noexcept { return matrix_.rows(); }
    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] Matrix dense() const { return Matrix(matrix_); }
    [[nodiscard]] double zero_threshold() const noexcept { return zero_threshold_; }
    [[nodiscard]] double coeff(Index i, Index j) const { return matrix_.coeff(i, j); }

    [[nodiscard]] const SupportMask& support() const noexcept { return *support_; }
    [[nodiscard]] const std::shared_ptr<const SupportMask>& support_ptr() const noexcept { return support_; }

    /// Irreducible and aperiodic, i.e. some power of M is entrywise positive.
    [[nodiscard]] bool is_mixing() const noexcept { return mixing_; }
    /// Every entry exceeds the zero threshold.
    [[nodiscard]] bool is_positive() const noexcept;

private:
    SparseMatrix matrix_;
    double zero_threshold_;
    std::shared_ptr<const SupportMask> support_;
    bool mixing_ = false;
};

/// Graph test for primitivity of the nonzero pattern of a square matrix.
[[nodiscard]] bool pattern_is_primitive(const SparseMatrix& m);

struct EpsilonRange {
    double lower;
    double upper;
};

/// Perturbation direction m: zero column sums, vanishing off the support mask.
class Perturbation {
public:
    Perturbation() = default;
    Perturbation(SparseMatrix values, std::shared_ptr<const SupportMask> support);

    static Perturbation zero(const StochasticMatrix& base);
    static Perturbation from_dense(const Matrix& values, const StochasticMatrix& base);

    [[nodiscard]] Index n() const noexcept { return values_.rows(); }
    [[nodiscard]] const SparseMatrix& values() const noexcept { return values_; }
    [[nodiscard]] Matrix dense() const { return Matrix(values_); }
    [[nodiscard]] const SupportMask& support() const noexcept { return *support_; }
    [[nodiscard]] const std::shared_ptr<const SupportMask>& support_ptr() const noexcept { return support_; }

    [[nodiscard]] double frobenius_norm() const { return values_.norm(); }
    [[nodiscard]] double max_abs_column_sum() const;

    [[nodiscard]] Perturbation scaled(double factor) const;
    [[nodiscard]] Perturbation operator-() const { return scaled(-1.0); }

    std::optional<EpsilonRange> epsilon_range;

private:
    SparseMatrix values_;
    std::shared_ptr<const SupportMask> support_;
};

/// Interval [eps-, eps+] on which M + eps*m stays entrywise nonnegative.
[[nodiscard]] EpsilonRange feasible_epsilon_range(const StochasticMatrix& base, const Perturbation& m);

}  // namespace linresp
