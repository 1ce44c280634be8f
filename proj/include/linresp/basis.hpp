#pragma once

#include "linresp/stochastic_matrix.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace linresp {

/// Orthonormal basis of the zero-sum subspace of R^k, k >= 2, as a dense k x (k-1)
/// matrix whose i-th column is (1,...,1,-i,0,...,0)/sqrt(i(i+1)).
[[nodiscard]] Matrix ones_nullspace_basis(Index k);

/// out = B_k * coeffs using the closed form of ones_nullspace_basis, O(k).
void apply_ones_nullspace(std::span<const double> coeffs, std::span<double> out);
/// coeffs = B_k^T * v, O(k).
void apply_ones_nullspace_transpose(std::span<const double> v, std::span<double> coeffs);

/// Orthonormal basis B_j of the admissible variations of one column: vectors
/// vanish on the excluded rows and sum to zero.
class ColumnBasis {
public:
    ColumnBasis(Index n, std::vector<Index> admissible_rows);

    [[nodiscard]] Index n() const noexcept { return n_; }
    [[nodiscard]] Index dim() const noexcept { return rows_.size() > 1 ? static_cast<Index>(rows_.size()) - 1 : 0; }
    [[nodiscard]] bool empty() const noexcept { return dim() == 0; }
    [[nodiscard]] const std::vector<Index>& admissible_rows() const noexcept { return rows_; }
    [[nodiscard]] std::vector<Index> excluded_rows() const;
    [[nodiscard]] Index excluded_count() const noexcept { return n_ - static_cast<Index>(rows_.size()); }

    /// column += scale * B_j * coeffs (only admissible rows are touched).
    void apply_add(std::span<const double> coeffs, double scale, Eigen::Ref<Vector> column) const;
    /// coeffs = scale * B_j^T * column.
    void apply_transpose(const Eigen::Ref<const Vector>& column, double scale, std::span<double> coeffs) const;

    /// Dense n x dim block.
    [[nodiscard]] Matrix dense() const;

    /// Replace B_j by B_j R with R orthogonal (dim x dim).
    void set_rotation(Matrix rotation);

private:
    Index n_;
    std::vector<Index> rows_;
    std::shared_ptr<const Matrix> rotation_;
};

/// Block-diagonal orthonormal basis E = diag(B_1, ..., B_n) of the feasible
/// perturbations (zero column sums, zero off the support mask).
class ConstraintBasis {
public:
    explicit ConstraintBasis(const StochasticMatrix& m);

    [[nodiscard]] Index n() const noexcept { return static_cast<Index>(columns_.size()); }
    [[nodiscard]] Index total_dim() const noexcept { return offsets_.back(); }
    [[nodiscard]] const ColumnBasis& column(Index j) const { return columns_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] Index offset(Index j) const { return offsets_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] const std::shared_ptr<const SupportMask>& support_ptr() const noexcept { return support_; }

    /// Same subspace, each block rotated by a random orthogonal matrix.
    [[nodiscard]] ConstraintBasis randomized(std::uint64_t seed) const;

    /// sum_j weights_j * B_j * alpha_j, an n-vector.
    [[nodiscard]] Vector combine(const Vector& alpha, const Vector& weights) const;
    /// alpha_j = weights_j * B_j^T v for every block.
    [[nodiscard]] Vector spread(const Vector& v, const Vector& weights) const;

    /// Dense n^2 x total_dim matrix E (column-major vectorization); small n only.
    [[nodiscard]] Matrix dense() const;

private:
    std::vector<ColumnBasis> columns_;
    std::vector<Index> offsets_;
    std::shared_ptr<const SupportMask> support_;
};

[[nodiscard]] ColumnBasis column_basis(const StochasticMatrix& m, Index j);

/// Throws EmptyFeasibleSet when no column admits a perturbation.
[[nodiscard]] ConstraintBasis constraint_basis(const StochasticMatrix& m);

/// m = E alpha; DimensionMismatch unless alpha has total_dim entries.
[[nodiscard]] Perturbation assemble_perturbation(const ConstraintBasis& basis, const Vector& alpha);

/// alpha = E^T vec(m).
[[nodiscard]] Vector project_coefficients(const ConstraintBasis& basis, const SparseMatrix& m);

/// Orthogonal projection of the matrix with entries value(i, j) onto the
/// feasible set: on each column, the admissible entries minus their mean;
/// columns with at most one admissible row become zero.
[[nodiscard]] SparseMatrix project_onto_feasible(const SupportMask& support,
                                                 const std::function<double(Index, Index)>& value);

}  // namespace linresp
