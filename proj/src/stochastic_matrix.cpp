#include "linresp/stochastic_matrix.hpp"

#include "linresp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace linresp {

SupportMask::SupportMask(Index n, std::vector<Index> col_start, std::vector<Index> rows)
    : n_(n), col_start_(std::move(col_start)), rows_(std::move(rows)) {
    if (static_cast<Index>(col_start_.size()) != n_ + 1 || col_start_.back() != static_cast<Index>(rows_.size()))
        throw Error(ErrorKind::DimensionMismatch, "malformed support mask");
}

SupportMask SupportMask::from_matrix(const SparseMatrix& m, double zero_threshold) {
    const Index n = m.cols();
    std::vector<Index> col_start(n + 1, 0);
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (Index j = 0; j < n; ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
            const double v = it.value();
            if (v > zero_threshold && v < 1.0 - kStructuralOneTolerance) rows.push_back(it.row());
        }
        col_start[j + 1] = static_cast<Index>(rows.size());
    }
    return SupportMask(n, std::move(col_start), std::move(rows));
}

SupportMask SupportMask::full(Index n) {
    std::vector<Index> col_start(n + 1);
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(n * n));
    for (Index j = 0; j <= n; ++j) col_start[j] = j * n;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) rows.push_back(i);
    return SupportMask(n, std::move(col_start), std::move(rows));
}

std::span<const Index> SupportMask::rows(Index col) const {
    return {rows_.data() + col_start_[col], static_cast<std::size_t>(count(col))};
}

bool SupportMask::contains(Index row, Index col) const {
    const auto r = rows(col);
    return std::binary_search(r.begin(), r.end(), row);
}

bool pattern_is_primitive(const SparseMatrix& m) {
    const Index n = m.rows();
    if (n == 0 || m.cols() != n) return false;
    if (n == 1) return m.coeff(0, 0) > 0.0;

    // Edge j -> i whenever M_ij > 0.
    std::vector<std::vector<Index>> out(n), in(n);
    for (Index j = 0; j < n; ++j)
        for (SparseMatrix::InnerIterator it(m, j); it; ++it)
            if (it.value() > 0.0) {
                out[j].push_back(it.row());
                in[it.row()].push_back(j);
            }

    auto bfs = [n](const std::vector<std::vector<Index>>& adj) {
        std::vector<Index> level(n, -1);
        std::queue<Index> queue;
        level[0] = 0;
        queue.push(0);
        while (!queue.empty()) {
            const Index u = queue.front();
            queue.pop();
            for (Index v : adj[u])
                if (level[v] < 0) {
                    level[v] = level[u] + 1;
                    queue.push(v);
                }
        }
        return level;
    };

    const auto level = bfs(out);
    if (std::any_of(level.begin(), level.end(), [](Index l) { return l < 0; })) return false;
    const auto back = bfs(in);
    if (std::any_of(back.begin(), back.end(), [](Index l) { return l < 0; })) return false;

    // Period of an irreducible chain: gcd of level(u) + 1 - level(v) over all edges u -> v.
    Index period = 0;
    for (Index u = 0; u < n; ++u)
        for (Index v : out[u]) {
            period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
            if (period == 1) return true;
        }
    return period == 1;
}

StochasticMatrix::StochasticMatrix(SparseMatrix m, double zero_threshold)
    : matrix_(std::move(m)), zero_threshold_(zero_threshold) {
    if (matrix_.rows() != matrix_.cols())
        throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square");
    if (matrix_.rows() < 1) throw Error(ErrorKind::DimensionTooSmall, "empty transition matrix");
    if (!(zero_threshold_ >= 0.0)) throw Error(ErrorKind::InvalidInput, "zero threshold must be nonnegative");
    matrix_.prune(0.0);
    matrix_.makeCompressed();

    for (Index j = 0; j < matrix_.cols(); ++j) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(matrix_, j); it; ++it) {
            const double v = it.value();
            if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kColumnSumTolerance)
                throw Error(ErrorKind::InvalidInput, "entry (" + std::to_string(it.row() + 1) + "," +
                                                         std::to_string(j + 1) + ") outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kColumnSumTolerance)
            throw Error(ErrorKind::InvalidInput,
                        "column " + std::to_string(j + 1) + " sums to " + std::to_string(sum) + ", not 1");
    }
    support_ = std::make_shared<const SupportMask>(SupportMask::from_matrix(matrix_, zero_threshold_));
    mixing_ = pattern_is_primitive(matrix_);
}

StochasticMatrix StochasticMatrix::from_dense(const Matrix& m, double zero_threshold) {
    return StochasticMatrix(m.sparseView(), zero_threshold);
}

bool StochasticMatrix::is_positive() const noexcept {
    const Index n = this->n();
    if (matrix_.nonZeros() != n * n) return false;
    for (Index j = 0; j < n; ++j)
        for (SparseMatrix::InnerIterator it(matrix_, j); it; ++it)
            if (it.value() <= zero_threshold_) return false;
    return true;
}

Perturbation::Perturbation(SparseMatrix values, std::shared_ptr<const SupportMask> support)
    : values_(std::move(values)), support_(std::move(support)) {
    if (!support_) throw Error(ErrorKind::InvalidInput, "perturbation requires a support mask");
    if (values_.rows() != support_->n() || values_.cols() != support_->n())
        throw Error(ErrorKind::DimensionMismatch, "perturbation and support mask differ in size");
    values_.prune(0.0);
    values_.makeCompressed();
    for (Index j = 0; j < values_.cols(); ++j) {
        double sum = 0.0, abs_sum = 0.0;
        for (SparseMatrix::InnerIterator it(values_, j); it; ++it) {
            if (!std::isfinite(it.value())) throw Error(ErrorKind::InvalidInput, "non-finite perturbation entry");
            if (!support_->contains(it.row(), j))
                throw Error(ErrorKind::InvalidInput, "perturbation entry (" + std::to_string(it.row() + 1) + "," +
                                                         std::to_string(j + 1) + ") lies off the support mask");
            sum += it.value();
            abs_sum += std::abs(it.value());
        }
        if (std::abs(sum) > kColumnSumTolerance * std::max(1.0, abs_sum))
            throw Error(ErrorKind::InvalidInput, "perturbation column " + std::to_string(j + 1) + " does not sum to 0");
    }
}

Perturbation Perturbation::zero(const StochasticMatrix& base) {
    return Perturbation(SparseMatrix(base.n(), base.n()), base.support_ptr());
}

Perturbation Perturbation::from_dense(const Matrix& values, const StochasticMatrix& base) {
    return Perturbation(values.sparseView(), base.support_ptr());
}

double Perturbation::max_abs_column_sum() const {
    double worst = 0.0;
    for (Index j = 0; j < values_.cols(); ++j) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(values_, j); it; ++it) sum += it.value();
        worst = std::max(worst, std::abs(sum));
    }
    return worst;
}

Perturbation Perturbation::scaled(double factor) const {
    Perturbation out = *this;
    out.values_ *= factor;
    if (epsilon_range) {
        if (factor > 0.0)
            out.epsilon_range = EpsilonRange{epsilon_range->lower / factor, epsilon_range->upper / factor};
        else if (factor < 0.0)
            out.epsilon_range = EpsilonRange{epsilon_range->upper / factor, epsilon_range->lower / factor};
        else
            out.epsilon_range.reset();
    }
    return out;
}

EpsilonRange feasible_epsilon_range(const StochasticMatrix& base, const Perturbation& m) {
    if (base.n() != m.n()) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs from matrix");
    constexpr double inf = std::numeric_limits<double>::infinity();
    EpsilonRange range{-inf, inf};
    const SparseMatrix& values = m.values();
    for (Index j = 0; j < values.cols(); ++j)
        for (SparseMatrix::InnerIterator it(values, j); it; ++it) {
            const double mij = it.value();
            const double Mij = base.coeff(it.row(), j);
            if (mij < 0.0)
                range.upper = std::min(range.upper, Mij / -mij);
            else if (mij > 0.0)
                range.lower = std::max(range.lower, -Mij / mij);
        }
    return range;
}

}  // namespace linresp
