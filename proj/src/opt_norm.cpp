#include "linresp/opt_norm.hpp"

#include "linresp/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace linresp {

namespace {

bool degenerate(double s1, double s2, double tolerance) {
    return s1 - s2 <= tolerance * std::max(s1, 1e-300);
}

std::string format_pair(const char* label, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << label << a << ", " << b;
    return os.str();
}

// Chooses the sign of opt.m_star in place and records the probe.
void apply_sign_selection(const StochasticMatrix& m, NormOptimum& opt, const NormOptions& options) {
    opt.m_star.epsilon_range = feasible_epsilon_range(m, opt.m_star);
    const double probe = options.probe_epsilon.value_or(default_probe_epsilon(*opt.m_star.epsilon_range));
    opt.sign_probe_epsilon = probe;
    try {
        const SignChoice choice = select_sign(m, opt.m_star, probe, options.stationary);
        if (choice.flipped) {
            opt.m_star = -opt.m_star;
            opt.sign_flipped = true;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Inconclusive) throw;
        opt.notes.emplace_back("sign selection inconclusive; sign left as computed");
    }
}

void finish(const StochasticMatrix& m, const ResponseSolver& solver, NormOptimum& opt, const NormOptions& options) {
    apply_sign_selection(m, opt, options);
    opt.u1 = solver.response(opt.m_star);
    opt.notes.push_back(format_pair("leading singular values: ", opt.leading_singular_values[0],
                                    opt.leading_singular_values[1]));
    if (!opt.unique) opt.notes.emplace_back("degenerate optimum: top two singular values coincide");
}

}  // namespace

double default_probe_epsilon(const EpsilonRange& range) {
    const double room = std::min(range.upper, -range.lower);
    return std::min(1e-3, 0.1 * room);
}

SignChoice select_sign(const StochasticMatrix& m, const Perturbation& direction, double probe_epsilon,
                       const StationaryOptions& options) {
    if (!(probe_epsilon > 0.0) || !std::isfinite(probe_epsilon)) {
        throw Error(ErrorKind::InvalidInput, "probe epsilon must be positive and finite");
    }
    SignChoice out;
    out.probe_epsilon = probe_epsilon;
    out.norm_plus = perturbed_stationary(m, direction, probe_epsilon, options).norm();
    out.norm_minus = perturbed_stationary(m, direction, -probe_epsilon, options).norm();
    if (std::abs(out.norm_plus - out.norm_minus) < kSignResolution) {
        throw Error(ErrorKind::Inconclusive, "probes at +/-eps give the same norm");
    }
    out.flipped = out.norm_minus > out.norm_plus;
    return out;
}

LinearOperator reduced_response_operator(const ResponseSolver& solver, const ConstraintBasis& basis) {
    LinearOperator op;
    op.rows = solver.n();
    op.cols = basis.total_dim();
    op.apply = [&solver, &basis](const Vector& alpha) {
        return solver.apply_fundamental(basis.combine(alpha, solver.stationary()));
    };
    op.apply_adjoint = [&solver, &basis](const Vector& v) {
        return basis.spread(solver.apply_fundamental_transpose(v), solver.stationary());
    };
    return op;
}

Matrix reduced_response_matrix(const StochasticMatrix& m, const Vector& h, const ConstraintBasis& basis) {
    const Index n = m.n();
    Matrix g = Matrix::Zero(n, basis.total_dim());
    for (Index j = 0; j < n; ++j) {
        const auto& col = basis.column(j);
        if (col.empty()) continue;
        g.middleCols(basis.offset(j), col.dim()) = h[j] * col.dense();
    }
    return fundamental_matrix(m, h) * g;
}

NormOptimum optimize_norm_positive(const StochasticMatrix& m, const NormOptions& options) {
    if (!m.is_positive()) throw Error(ErrorKind::NotPositive, "matrix has entries at or below the zero threshold");
    const Index n = m.n();
    NormOptimum opt;
    opt.h = stationary_distribution(m, options.stationary);
    ResponseSolver solver(m, opt.h);

    const Matrix b = ones_nullspace_basis(n);
    Matrix x(n, n - 1);
    for (Index c = 0; c < n - 1; ++c) x.col(c) = solver.apply_fundamental(b.col(c));

    const SingularPairs svd = dense_singular_pairs(x, 2);
    const double hnorm = opt.h.norm();
    const Vector y = svd.right.col(0) / hnorm;
    opt.m_star = Perturbation::from_dense(b * y * opt.h.transpose(), m);

    const double s1 = svd.values[0];
    const double s2 = svd.values.size() > 1 ? svd.values[1] : 0.0;
    opt.objective = s1 * s1 * hnorm * hnorm;
    opt.leading_singular_values = {s1 * hnorm, s2 * hnorm};
    opt.unique = !degenerate(s1, s2, options.degeneracy_tolerance);
    finish(m, solver, opt, options);
    return opt;
}

NormOptimum optimize_norm_general(const StochasticMatrix& m, const NormOptions& options) {
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "matrix is not mixing");
    return optimize_norm_general(m, constraint_basis(m), options);
}

NormOptimum optimize_norm_general(const StochasticMatrix& m, const ConstraintBasis& basis, const NormOptions& options) {
    if (basis.n() != m.n()) throw Error(ErrorKind::DimensionMismatch, "basis size differs from matrix");
    if (basis.total_dim() == 0) throw Error(ErrorKind::EmptyFeasibleSet, "no column admits a nonzero perturbation");
    NormOptimum opt;
    opt.h = stationary_distribution(m, options.stationary);
    ResponseSolver solver(m, opt.h);

    SingularPairs pairs;
    if (m.n() <= options.dense_limit) {
        pairs = dense_singular_pairs(reduced_response_matrix(m, opt.h, basis), 2);
    } else {
        pairs = top_singular_pairs(reduced_response_operator(solver, basis), 2, options.singular);
        opt.notes.push_back("subspace iterations: " + std::to_string(pairs.iterations));
    }
    Vector alpha = pairs.right.col(0);
    alpha /= alpha.norm();
    opt.m_star = assemble_perturbation(basis, alpha);

    const double s1 = pairs.values[0];
    const double s2 = pairs.values.size() > 1 ? pairs.values[1] : 0.0;
    opt.objective = s1 * s1;
    opt.leading_singular_values = {s1, s2};
    opt.unique = !degenerate(s1, s2, options.degeneracy_tolerance);
    finish(m, solver, opt, options);
    return opt;
}

}  // namespace linresp
