#include "linresp/opt_target.hpp"

#include "linresp/error.hpp"

#include <cmath>

namespace linresp {

ObservableVector discretize_observable(const std::function<double(double)>& f, Index n) {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "partition needs at least one cell");
    Vector c(n);
    const double width = 1.0 / static_cast<double>(n);
    for (Index i = 0; i < n; ++i) c[i] = f((static_cast<double>(i) + 0.5) * width);
    const double norm = c.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::InvalidInput, "observable vanishes on every cell");
    c *= std::sqrt(static_cast<double>(n)) / norm;
    return {std::move(c), ObservableVector::Normalization::DensityScaled};
}

bool is_constant_observable(const Vector& c) {
    if (c.size() == 0) return true;
    const double mean = c.mean();
    const double spread = (c.array() - mean).matrix().norm();
    return spread <= kConstantObservableTolerance * std::max(1.0, c.norm());
}

Vector adjoint_weights(const ResponseSolver& solver, const Vector& c) {
    if (c.size() != solver.n()) throw Error(ErrorKind::DimensionMismatch, "observable length differs from matrix");
    return solver.apply_fundamental_transpose(c);
}

Vector adjoint_weights(const StochasticMatrix& m, const Vector& h, const Vector& c) {
    return adjoint_weights(ResponseSolver(m, h), c);
}

ExpectationOptimum optimize_expectation(const StochasticMatrix& m, const Vector& c, const StationaryOptions& options) {
    if (c.size() != m.n()) throw Error(ErrorKind::DimensionMismatch, "observable length differs from matrix");
    if (!c.allFinite()) throw Error(ErrorKind::InvalidInput, "observable has non-finite entries");
    if (is_constant_observable(c)) throw Error(ErrorKind::ConstantObservable, "observable is constant");
    if (!m.is_mixing()) throw Error(ErrorKind::NonMixing, "matrix is not mixing");
    if (m.support().total() == 0 || ConstraintBasis(m).total_dim() == 0) {
        throw Error(ErrorKind::EmptyFeasibleSet, "no column admits a nonzero perturbation");
    }

    ExpectationOptimum opt;
    opt.h = stationary_distribution(m, options);
    ResponseSolver solver(m, opt.h);
    opt.w = adjoint_weights(solver, c);

    const Vector& h = opt.h;
    const Vector& w = opt.w;
    SparseMatrix g = project_onto_feasible(m.support(), [&](Index i, Index j) { return h[j] * w[i]; });
    const double g_norm = g.norm();
    if (!(g_norm > kConstantObservableTolerance * std::max(1.0, w.norm() * h.norm()))) {
        throw Error(ErrorKind::ZeroGradient, "column-centered weights vanish");
    }

    const SupportMask& support = m.support();
    opt.column_multipliers = Vector::Zero(m.n());
    for (Index j = 0; j < m.n(); ++j) {
        auto rows = support.rows(j);
        if (rows.size() < 2) continue;
        double mean = 0.0;
        for (Index i : rows) mean += w[i];
        opt.column_multipliers[j] = h[j] * mean / static_cast<double>(rows.size());
    }

    opt.nu = 0.5 * g_norm;
    opt.m_star = Perturbation(g / g_norm, m.support_ptr());
    opt.m_star.epsilon_range = feasible_epsilon_range(m, opt.m_star);
    opt.u1 = solver.response(opt.m_star);
    opt.objective = c.dot(opt.u1);
    return opt;
}

}  // namespace linresp
