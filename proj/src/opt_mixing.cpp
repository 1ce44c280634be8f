#include "linresp/opt_mixing.hpp"

#include "linresp/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>

namespace linresp {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

struct RitzPairs {
    ComplexVector values;
    ComplexMatrix vectors;
};

// Order by modulus, then by imaginary part so the Im >= 0 member of a conjugate pair comes first.
std::vector<Index> modulus_order(const ComplexVector& values) {
    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ma = std::abs(values[a]);
        const double mb = std::abs(values[b]);
        if (std::abs(ma - mb) > 1e-14 * std::max(1.0, ma)) return ma > mb;
        return values[a].imag() > values[b].imag();
    });
    return order;
}

RitzPairs sorted(const ComplexVector& values, const ComplexMatrix& vectors) {
    const auto order = modulus_order(values);
    RitzPairs out{ComplexVector(values.size()), ComplexMatrix(vectors.rows(), vectors.cols())};
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.values[static_cast<Index>(k)] = values[order[k]];
        out.vectors.col(static_cast<Index>(k)) = vectors.col(order[k]);
    }
    return out;
}

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)); }

// Dominant eigenpairs of a real operator by subspace iteration with Schur-Rayleigh-Ritz.
RitzPairs dominant_eigenpairs(const std::function<Vector(const Vector&)>& apply, Index n, const EigenOptions& options) {
    const Index p = std::min(std::max<Index>(options.block_size, 4), n);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    Matrix v(n, p);
    for (Index c = 0; c < p; ++c)
        for (Index r = 0; r < n; ++r) v(r, c) = normal(rng);
    {
        Eigen::HouseholderQR<Matrix> qr(v);
        v = qr.householderQ() * Matrix::Identity(n, p);
    }
    Matrix w(n, p);
    for (long iter = 0; iter < options.max_iterations; ++iter) {
        for (Index c = 0; c < p; ++c) w.col(c) = apply(v.col(c));
        const Matrix h = v.transpose() * w;
        Eigen::EigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "Ritz eigenproblem failed");
        RitzPairs ritz = sorted(es.eigenvalues(), es.eigenvectors());
        const Index check = is_real(ritz.values[0]) ? 1 : 2;
        bool converged = true;
        for (Index k = 0; k < check; ++k) {
            const ComplexVector y = ritz.vectors.col(k);
            const ComplexVector x = v.cast<Complex>() * y;
            const ComplexVector res = w.cast<Complex>() * y - ritz.values[k] * x;
            if (res.norm() > options.tolerance * x.norm()) {
                converged = false;
                break;
            }
        }
        if (converged) {
            ritz.vectors = v.cast<Complex>() * ritz.vectors;
            return ritz;
        }
        Eigen::HouseholderQR<Matrix> qr(w);
        v = qr.householderQ() * Matrix::Identity(n, p);
    }
    throw Error(ErrorKind::NoConvergence,
                "eigen subspace iteration did not converge in " + std::to_string(options.max_iterations) + " iterations");
}

Index closest(const ComplexVector& values, Complex target, Index limit) {
    Index best = 0;
    for (Index k = 1; k < std::min(limit, values.size()); ++k)
        if (std::abs(values[k] - target) < std::abs(values[best] - target)) best = k;
    return best;
}

// Largest modulus after dropping lambda2 and, for complex lambda2, one conjugate partner.
double third_modulus(const ComplexVector& values, Complex lambda2) {
    std::vector<bool> used(static_cast<std::size_t>(values.size()), false);
    used[static_cast<std::size_t>(closest(values, lambda2, values.size()))] = true;
    if (!is_real(lambda2)) {
        Index best = -1;
        for (Index k = 0; k < values.size(); ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            if (best < 0 || std::abs(values[k] - std::conj(lambda2)) < std::abs(values[best] - std::conj(lambda2)))
                best = k;
        }
        if (best >= 0) used[static_cast<std::size_t>(best)] = true;
    }
    double out = 0.0;
    for (Index k = 0; k < values.size(); ++k)
        if (!used[static_cast<std::size_t>(k)]) out = std::max(out, std::abs(values[k]));
    return out;
}

void finalize_pair(const StochasticMatrix& m, SpectralPair& pair, const EigenOptions& options) {
    if (std::abs(pair.lambda2.imag()) <= 1e-14) pair.lambda2.imag(0.0);
    const double mod2 = std::abs(pair.lambda2);
    // A two-state chain has no lambda3.
    pair.gap_ok = m.n() <= 2 || std::abs(mod2 - pair.lambda3_modulus) > options.gap_tolerance;
    if (!pair.gap_ok && options.require_gap) {
        throw Error(ErrorKind::SpectralGapAmbiguous,
                    "|lambda2| and |lambda3| coincide within " + std::to_string(options.gap_tolerance));
    }

    pair.r2 /= pair.r2.norm();
    const Complex s = pair.l2.dot(pair.r2);  // l^* r
    if (std::abs(s) <= 1e-10 * pair.l2.norm()) {
        throw Error(ErrorKind::DefectiveEigenvalue, "left and right eigenvectors of lambda2 are orthogonal");
    }
    pair.l2 /= std::conj(s);

    const SparseMatrix& a = m.matrix();
    const ComplexVector right_res = a.cast<Complex>() * pair.r2 - pair.lambda2 * pair.r2;
    const ComplexVector left_res =
        a.transpose().cast<Complex>() * pair.l2 - std::conj(pair.lambda2) * pair.l2;
    if (right_res.norm() > 1e-9 || left_res.norm() > 1e-9 * std::max(1.0, pair.l2.norm())) {
        throw Error(ErrorKind::NoConvergence, "second eigenpair residual exceeds 1e-9");
    }
}

SpectralPair dense_pair(const StochasticMatrix& m, const EigenOptions& options) {
    const Matrix a = m.dense();
    Eigen::EigenSolver<Matrix> right(a);
    if (right.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
    RitzPairs r = sorted(right.eigenvalues(), right.eigenvectors());
    // Drop the eigenvalue closest to 1.
    const Index unit = closest(r.values, Complex(1.0, 0.0), r.values.size());
    ComplexVector values(r.values.size() - 1);
    ComplexMatrix vectors(a.rows(), r.values.size() - 1);
    for (Index k = 0, o = 0; k < r.values.size(); ++k) {
        if (k == unit) continue;
        values[o] = r.values[k];
        vectors.col(o++) = r.vectors.col(k);
    }
    if (values.size() == 0) throw Error(ErrorKind::InvalidInput, "a 1-state chain has no second eigenvalue");

    SpectralPair pair;
    pair.lambda2 = values[0];
    pair.r2 = vectors.col(0);
    pair.lambda3_modulus = third_modulus(values, pair.lambda2);

    Eigen::EigenSolver<Matrix> left(a.transpose());
    if (left.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
    // M^T conj(l) = lambda conj(l)
    const Index k = closest(left.eigenvalues(), pair.lambda2, left.eigenvalues().size());
    pair.l2 = left.eigenvectors().col(k).conjugate();
    finalize_pair(m, pair, options);
    return pair;
}

SpectralPair iterative_pair(const StochasticMatrix& m, const EigenOptions& options) {
    const Vector h = stationary_distribution(m);
    const SparseMatrix& a = m.matrix();
    const SparseMatrix at = a.transpose();
    const Index n = m.n();

    const RitzPairs right = dominant_eigenpairs([&](const Vector& x) -> Vector { return a * x - h * x.sum(); }, n,
                                                options);
    SpectralPair pair;
    pair.lambda2 = right.values[0];
    pair.r2 = right.vectors.col(0);
    pair.lambda3_modulus = third_modulus(right.values, pair.lambda2);

    const RitzPairs left = dominant_eigenpairs([&](const Vector& x) -> Vector { return at * x - Vector::Constant(n, h.dot(x)); },
                                               n, options);
    const Index k = closest(left.values, pair.lambda2, is_real(pair.lambda2) ? 1 : 2);
    pair.l2 = left.vectors.col(k).conjugate();
    finalize_pair(m, pair, options);
    return pair;
}

}  // namespace

SpectralPair second_eigenpair(const StochasticMatrix& m, const EigenOptions& options) {
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "matrix is not mixing");
    if (m.n() < 2) throw Error(ErrorKind::InvalidInput, "a 1-state chain has no second eigenvalue");
    return m.n() <= options.dense_limit ? dense_pair(m, options) : iterative_pair(m, options);
}

Complex second_eigenvalue(const StochasticMatrix& m, const EigenOptions& options) {
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "matrix is not mixing");
    if (m.n() < 2) throw Error(ErrorKind::InvalidInput, "a 1-state chain has no second eigenvalue");
    const Vector h = m.n() <= options.dense_limit ? Vector() : stationary_distribution(m);
    return second_eigenvalue(m.matrix(), h, options);
}

Complex second_eigenvalue(const SparseMatrix& a, const Vector& h, const EigenOptions& options) {
    const Index n = a.rows();
    if (n < 2) throw Error(ErrorKind::InvalidInput, "a 1-state chain has no second eigenvalue");
    if (n <= options.dense_limit) {
        const ComplexVector values = Matrix(a).eigenvalues();
        const auto order = modulus_order(values);
        const Index unit = closest(values, Complex(1.0, 0.0), values.size());
        for (Index k : order)
            if (k != unit) return values[k];
    }
    if (h.size() != n) throw Error(ErrorKind::DimensionMismatch, "invariant vector has wrong length");
    return dominant_eigenpairs([&](const Vector& x) -> Vector { return a * x - h * x.sum(); }, n, options).values[0];
}

double SensitivityMatrix::inner(const Perturbation& m) const {
    double out = 0.0;
    const SparseMatrix& v = m.values();
    for (Index j = 0; j < v.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(v, j); it; ++it) out += values(it.row(), j) * it.value();
    return out;
}

SensitivityMatrix mixing_sensitivity(const SpectralPair& pair) {
    if (std::abs(pair.lambda2) <= 1e-14) throw Error(ErrorKind::ZeroLambda2, "lambda2 vanishes");
    const Vector lr = pair.l2.real();
    const Vector li = pair.l2.imag();
    const Vector rr = pair.r2.real();
    const Vector ri = pair.r2.imag();
    const double re = pair.lambda2.real();
    const double im = pair.lambda2.imag();
    SensitivityMatrix s;
    s.values = re * (lr * rr.transpose() + li * ri.transpose()) + im * (lr * ri.transpose() - li * rr.transpose());
    return s;
}

Complex eigenvalue_derivative(const SpectralPair& pair, const Perturbation& m) {
    const ComplexVector mr = m.values().cast<Complex>() * pair.r2;
    return pair.l2.dot(mr);
}

MixingOptimum optimize_mixing(const StochasticMatrix& m, const EigenOptions& options) {
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "matrix is not mixing");
    if (ConstraintBasis(m).total_dim() == 0) {
        throw Error(ErrorKind::EmptyFeasibleSet, "no column admits a nonzero perturbation");
    }
    MixingOptimum opt;
    opt.pair = second_eigenpair(m, options);
    const SensitivityMatrix s = mixing_sensitivity(opt.pair);
    const SparseMatrix centered =
        project_onto_feasible(m.support(), [&](Index i, Index j) { return s.values(i, j); });
    const double norm = centered.norm();
    if (!(norm > 1e-14 * std::max(1.0, s.values.norm()))) {
        throw Error(ErrorKind::ZeroGradient, "column-centered sensitivity vanishes");
    }
    opt.nu = -0.5 * norm;
    opt.m_star = Perturbation(-centered / norm, m.support_ptr());
    opt.m_star.epsilon_range = feasible_epsilon_range(m, opt.m_star);
    opt.rho = s.inner(opt.m_star) / std::norm(opt.pair.lambda2);
    if (!opt.pair.gap_ok) opt.notes.emplace_back("|lambda2| and |lambda3| are not separated");
    return opt;
}

}  // namespace linresp
