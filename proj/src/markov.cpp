#include "linresp/markov.hpp"

#include "linresp/error.hpp"

#include <Eigen/QR>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace linresp {

namespace {

Vector dense_stationary(const StochasticMatrix& m) {
    const Index n = m.n();
    Matrix a(n + 1, n);
    a.topRows(n) = Matrix::Identity(n, n) - m.dense();
    a.row(n).setOnes();
    Vector b = Vector::Zero(n + 1);
    b[n] = 1.0;
    Vector h = a.colPivHouseholderQr().solve(b);
    return h / h.sum();
}

}  // namespace

Vector stationary_distribution(const StochasticMatrix& m, const StationaryOptions& options) {
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "transition matrix is reducible or periodic");
    const Index n = m.n();
    const SparseMatrix& a = m.matrix();

    Vector h = Vector::Constant(n, 1.0 / static_cast<double>(n));
    if (n <= options.dense_limit) {
        h = dense_stationary(m);
        if ((a * h - h).norm() < options.residual_tolerance) return h;
    }

    for (long it = 0; it < options.max_iterations; ++it) {
        Vector next = a * h;
        const double residual = (next - h).norm();
        if (residual < options.residual_tolerance) return h;
        h = next / next.sum();
    }
    throw Error(ErrorKind::NoConvergence, "power iteration did not reach residual " +
                                              std::to_string(options.residual_tolerance) + " in " +
                                              std::to_string(options.max_iterations) + " iterations");
}

struct ResponseSolver::Factorization {
    mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

ResponseSolver::ResponseSolver(const StochasticMatrix& m, Vector h) : m_(m.matrix()), h_(std::move(h)) {
    const Index n = m.n();
    if (h_.size() != n) throw Error(ErrorKind::DimensionMismatch, "stationary vector has wrong length");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(m_.nonZeros() + 3 * n));
    for (Index j = 0; j < n; ++j) {
        triplets.emplace_back(j, j, 1.0);
        for (SparseMatrix::InnerIterator it(m_, j); it; ++it) triplets.emplace_back(it.row(), j, -it.value());
        triplets.emplace_back(n, j, 1.0);
        triplets.emplace_back(j, n, h_[j]);
    }
    SparseMatrix bordered(n + 1, n + 1);
    bordered.setFromTriplets(triplets.begin(), triplets.end());
    bordered.makeCompressed();

    auto f = std::make_shared<Factorization>();
    f->lu.analyzePattern(bordered);
    f->lu.factorize(bordered);
    if (f->lu.info() != Eigen::Success)
        throw Error(ErrorKind::SingularSystem, "bordered response system is singular: " + f->lu.lastErrorMessage());
    lu_ = std::move(f);
}

Vector ResponseSolver::apply_fundamental(const Vector& g) const {
    const Index n = this->n();
    if (g.size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length differs from matrix size");
    const double total = g.sum();
    Vector rhs(n + 1);
    rhs.head(n) = g - total * h_;
    rhs[n] = total;
    Vector sol = lu_->lu.solve(rhs);
    if (lu_->lu.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "response solve failed");
    return sol.head(n);
}

Vector ResponseSolver::apply_fundamental_transpose(const Vector& v) const {
    const Index n = this->n();
    if (v.size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length differs from matrix size");
    Vector rhs(n + 1);
    rhs.head(n) = v;
    rhs[n] = h_.dot(v);
    Vector sol = lu_->lu.transpose().solve(rhs);
    if (lu_->lu.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "adjoint solve failed");
    return sol.head(n);
}

double ResponseSolver::augmented_residual(const Vector& u, const Vector& g) const {
    const Vector r = u - m_ * u - g;
    const double s = u.sum();
    return std::sqrt(r.squaredNorm() + s * s);
}

Vector ResponseSolver::response(const Perturbation& p) const {
    if (p.n() != n()) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs from matrix");
    const Vector g = p.values() * h_;
    Vector u = apply_fundamental(g);
    const double residual = augmented_residual(u, g);
    if (!(residual < kResidualTolerance * std::max(1.0, g.norm())))
        throw Error(ErrorKind::SingularSystem,
                    "augmented response system residual " + std::to_string(residual) + " exceeds tolerance");
    return u;
}

Vector linear_response(const StochasticMatrix& m, const Vector& h, const Perturbation& p) {
    return ResponseSolver(m, h).response(p);
}

Matrix fundamental_matrix(const StochasticMatrix& m, const Vector& h, Index dense_cap) {
    const Index n = m.n();
    if (n > dense_cap)
        throw Error(ErrorKind::TooLarge, std::to_string(n) + " states exceed the dense cap of " +
                                             std::to_string(dense_cap));
    if (h.size() != n) throw Error(ErrorKind::DimensionMismatch, "stationary vector has wrong length");
    Matrix z = Matrix::Identity(n, n) - m.dense() + h * Vector::Ones(n).transpose();
    Eigen::FullPivLU<Matrix> lu(z);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "Id - M + h 1^T is singular");
    return lu.inverse();
}

StochasticMatrix perturbed_matrix(const StochasticMatrix& m, const Perturbation& p, double eps) {
    if (p.n() != m.n()) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs from matrix");
    SparseMatrix sum = m.matrix() + eps * p.values();
    for (Index j = 0; j < sum.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(sum, j); it; ++it) {
            if (it.value() < -1e-14)
                throw Error(ErrorKind::InfeasibleEpsilon, "M + eps*m has negative entry at (" +
                                                              std::to_string(it.row() + 1) + "," +
                                                              std::to_string(j + 1) + ") for eps = " +
                                                              std::to_string(eps));
            if (it.value() < 0.0) it.valueRef() = 0.0;
        }
    return StochasticMatrix(std::move(sum), m.zero_threshold());
}

Vector perturbed_stationary(const StochasticMatrix& m, const Perturbation& p, double eps,
                            const StationaryOptions& options) {
    if (eps == 0.0) return stationary_distribution(m, options);
    return stationary_distribution(perturbed_matrix(m, p, eps), options);
}

Vector invariant_vector(const SparseMatrix& a, const Vector& border) {
    const Index n = a.rows();
    if (a.cols() != n || border.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "invariant vector needs a square matrix and matching border");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(a.nonZeros() + 3 * n));
    for (Index j = 0; j < n; ++j) {
        triplets.emplace_back(j, j, 1.0);
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) triplets.emplace_back(it.row(), j, -it.value());
        triplets.emplace_back(n, j, 1.0);
        triplets.emplace_back(j, n, border[j]);
    }
    SparseMatrix bordered(n + 1, n + 1);
    bordered.setFromTriplets(triplets.begin(), triplets.end());
    bordered.makeCompressed();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "invariant vector is not unique");
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;
    const Vector sol = lu.solve(rhs);
    const Vector x = sol.head(n);
    if (!((a * x - x).norm() < 1e-12)) throw Error(ErrorKind::SingularSystem, "invariant vector solve is inaccurate");
    return x;
}

Vector perturbed_invariant_vector(const StochasticMatrix& m, const Vector& h, const Perturbation& p, double eps) {
    if (p.n() != m.n()) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs from matrix");
    if (eps == 0.0) return h;
    const SparseMatrix a = m.matrix() + eps * p.values();
    return invariant_vector(a, h);
}

}  // namespace linresp
