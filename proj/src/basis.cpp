#include "linresp/basis.hpp"

#include "linresp/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace linresp {

namespace {

inline double nullspace_scale(Index i) {
    const double x = static_cast<double>(i);
    return 1.0 / std::sqrt(x * (x + 1.0));
}

}  // namespace

Matrix ones_nullspace_basis(Index k) {
    if (k < 2) {
        throw Error(ErrorKind::DimensionTooSmall, "zero-sum subspace needs k >= 2, got " + std::to_string(k));
    }
    Matrix b = Matrix::Zero(k, k - 1);
    for (Index i = 1; i < k; ++i) {
        const double s = nullspace_scale(i);
        b.col(i - 1).head(i).setConstant(s);
        b(i, i - 1) = -static_cast<double>(i) * s;
    }
    return b;
}

void apply_ones_nullspace(std::span<const double> coeffs, std::span<double> out) {
    const auto k = static_cast<Index>(out.size());
    if (static_cast<Index>(coeffs.size()) != k - 1) {
        throw Error(ErrorKind::DimensionMismatch, "coefficient count must be k-1");
    }
    // out_p = sum_{i>p} c_i s_i - p c_p s_p
    double suffix = 0.0;
    for (Index p = k - 1; p >= 0; --p) {
        double v = suffix;
        if (p >= 1) {
            const double s = nullspace_scale(p);
            const double c = coeffs[static_cast<std::size_t>(p - 1)];
            v -= static_cast<double>(p) * c * s;
            suffix += c * s;
        }
        out[static_cast<std::size_t>(p)] = v;
    }
}

void apply_ones_nullspace_transpose(std::span<const double> v, std::span<double> coeffs) {
    const auto k = static_cast<Index>(v.size());
    if (static_cast<Index>(coeffs.size()) != k - 1) {
        throw Error(ErrorKind::DimensionMismatch, "coefficient count must be k-1");
    }
    double prefix = 0.0;
    for (Index i = 1; i < k; ++i) {
        prefix += v[static_cast<std::size_t>(i - 1)];
        coeffs[static_cast<std::size_t>(i - 1)] =
            (prefix - static_cast<double>(i) * v[static_cast<std::size_t>(i)]) * nullspace_scale(i);
    }
}

ColumnBasis::ColumnBasis(Index n, std::vector<Index> admissible_rows) : n_(n), rows_(std::move(admissible_rows)) {
    for (std::size_t a = 0; a < rows_.size(); ++a) {
        if (rows_[a] < 0 || rows_[a] >= n_ || (a > 0 && rows_[a] <= rows_[a - 1])) {
            throw Error(ErrorKind::InvalidInput, "admissible rows must be increasing and in range");
        }
    }
}

std::vector<Index> ColumnBasis::excluded_rows() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(excluded_count()));
    std::size_t a = 0;
    for (Index i = 0; i < n_; ++i) {
        if (a < rows_.size() && rows_[a] == i) {
            ++a;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

void ColumnBasis::apply_add(std::span<const double> coeffs, double scale, Eigen::Ref<Vector> column) const {
    const Index d = dim();
    if (d == 0) return;
    Vector c = Eigen::Map<const Vector>(coeffs.data(), d);
    if (rotation_) c = (*rotation_) * c;
    std::vector<double> local(rows_.size());
    apply_ones_nullspace(std::span<const double>(c.data(), static_cast<std::size_t>(d)), local);
    for (std::size_t a = 0; a < rows_.size(); ++a) column[rows_[a]] += scale * local[a];
}

void ColumnBasis::apply_transpose(const Eigen::Ref<const Vector>& column, double scale,
                                  std::span<double> coeffs) const {
    const Index d = dim();
    if (d == 0) return;
    std::vector<double> local(rows_.size());
    for (std::size_t a = 0; a < rows_.size(); ++a) local[a] = column[rows_[a]];
    Vector c(d);
    apply_ones_nullspace_transpose(local, std::span<double>(c.data(), static_cast<std::size_t>(d)));
    if (rotation_) c = rotation_->transpose() * c;
    for (Index i = 0; i < d; ++i) coeffs[static_cast<std::size_t>(i)] = scale * c[i];
}

Matrix ColumnBasis::dense() const {
    Matrix out = Matrix::Zero(n_, dim());
    if (empty()) return out;
    Matrix local = ones_nullspace_basis(static_cast<Index>(rows_.size()));
    if (rotation_) local = local * (*rotation_);
    for (std::size_t a = 0; a < rows_.size(); ++a) out.row(rows_[a]) = local.row(static_cast<Index>(a));
    return out;
}

void ColumnBasis::set_rotation(Matrix rotation) {
    if (rotation.rows() != dim() || rotation.cols() != dim()) {
        throw Error(ErrorKind::DimensionMismatch, "rotation must be dim x dim");
    }
    rotation_ = std::make_shared<const Matrix>(std::move(rotation));
}

ConstraintBasis::ConstraintBasis(const StochasticMatrix& m) : support_(m.support_ptr()) {
    const Index n = m.n();
    columns_.reserve(static_cast<std::size_t>(n));
    offsets_.reserve(static_cast<std::size_t>(n) + 1);
    offsets_.push_back(0);
    for (Index j = 0; j < n; ++j) {
        auto rows = support_->rows(j);
        columns_.emplace_back(n, std::vector<Index>(rows.begin(), rows.end()));
        offsets_.push_back(offsets_.back() + columns_.back().dim());
    }
}

ConstraintBasis ConstraintBasis::randomized(std::uint64_t seed) const {
    ConstraintBasis out = *this;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (auto& col : out.columns_) {
        const Index d = col.dim();
        if (d == 0) continue;
        Matrix g(d, d);
        for (Index c = 0; c < d; ++c)
            for (Index r = 0; r < d; ++r) g(r, c) = normal(rng);
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Index c = 0; c < d; ++c)
            if (rr(c, c) < 0) q.col(c) = -q.col(c);
        col.set_rotation(std::move(q));
    }
    return out;
}

Vector ConstraintBasis::combine(const Vector& alpha, const Vector& weights) const {
    if (alpha.size() != total_dim() || weights.size() != n()) {
        throw Error(ErrorKind::DimensionMismatch, "coefficient or weight length does not match the basis");
    }
    Vector out = Vector::Zero(n());
    for (Index j = 0; j < n(); ++j) {
        const auto& col = columns_[static_cast<std::size_t>(j)];
        if (col.empty() || weights[j] == 0.0) continue;
        col.apply_add(std::span<const double>(alpha.data() + offset(j), static_cast<std::size_t>(col.dim())),
                      weights[j], out);
    }
    return out;
}

Vector ConstraintBasis::spread(const Vector& v, const Vector& weights) const {
    if (v.size() != n() || weights.size() != n()) {
        throw Error(ErrorKind::DimensionMismatch, "vector or weight length does not match the basis");
    }
    Vector alpha = Vector::Zero(total_dim());
    for (Index j = 0; j < n(); ++j) {
        const auto& col = columns_[static_cast<std::size_t>(j)];
        if (col.empty()) continue;
        col.apply_transpose(v, weights[j], std::span<double>(alpha.data() + offset(j), static_cast<std::size_t>(col.dim())));
    }
    return alpha;
}

Matrix ConstraintBasis::dense() const {
    const Index n2 = n() * n();
    Matrix e = Matrix::Zero(n2, total_dim());
    for (Index j = 0; j < n(); ++j) {
        const auto& col = columns_[static_cast<std::size_t>(j)];
        if (col.empty()) continue;
        e.block(j * n(), offset(j), n(), col.dim()) = col.dense();
    }
    return e;
}

ColumnBasis column_basis(const StochasticMatrix& m, Index j) {
    if (j < 0 || j >= m.n()) throw Error(ErrorKind::InvalidInput, "column index out of range");
    auto rows = m.support().rows(j);
    return ColumnBasis(m.n(), std::vector<Index>(rows.begin(), rows.end()));
}

ConstraintBasis constraint_basis(const StochasticMatrix& m) {
    ConstraintBasis basis(m);
    if (basis.total_dim() == 0) {
        throw Error(ErrorKind::EmptyFeasibleSet, "no column admits a nonzero perturbation");
    }
    return basis;
}

Perturbation assemble_perturbation(const ConstraintBasis& basis, const Vector& alpha) {
    if (alpha.size() != basis.total_dim()) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(basis.total_dim()) +
                                                      " coefficients, got " + std::to_string(alpha.size()));
    }
    const Index n = basis.n();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(basis.support_ptr()->total()));
    Vector column(n);
    for (Index j = 0; j < n; ++j) {
        const auto& col = basis.column(j);
        if (col.empty()) continue;
        column.setZero();
        col.apply_add(std::span<const double>(alpha.data() + basis.offset(j), static_cast<std::size_t>(col.dim())),
                      1.0, column);
        for (Index i : col.admissible_rows()) triplets.emplace_back(i, j, column[i]);
    }
    SparseMatrix values(n, n);
    values.setFromTriplets(triplets.begin(), triplets.end());
    return Perturbation(std::move(values), basis.support_ptr());
}

Vector project_coefficients(const ConstraintBasis& basis, const SparseMatrix& m) {
    const Index n = basis.n();
    if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::DimensionMismatch, "matrix size does not match the basis");
    Vector alpha = Vector::Zero(basis.total_dim());
    Vector column(n);
    for (Index j = 0; j < n; ++j) {
        const auto& col = basis.column(j);
        if (col.empty()) continue;
        column = m.col(j);
        col.apply_transpose(column, 1.0,
                            std::span<double>(alpha.data() + basis.offset(j), static_cast<std::size_t>(col.dim())));
    }
    return alpha;
}

SparseMatrix project_onto_feasible(const SupportMask& support, const std::function<double(Index, Index)>& value) {
    const Index n = support.n();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(support.total()));
    std::vector<double> local;
    for (Index j = 0; j < n; ++j) {
        auto rows = support.rows(j);
        if (rows.size() < 2) continue;
        local.resize(rows.size());
        double mean = 0.0;
        for (std::size_t a = 0; a < rows.size(); ++a) {
            local[a] = value(rows[a], j);
            mean += local[a];
        }
        mean /= static_cast<double>(rows.size());
        for (std::size_t a = 0; a < rows.size(); ++a) triplets.emplace_back(rows[a], j, local[a] - mean);
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

}  // namespace linresp
