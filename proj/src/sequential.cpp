#include "linresp/sequential.hpp"

#include "linresp/error.hpp"
#include "linresp/markov.hpp"
#include "linresp/opt_target.hpp"

#include <cmath>
#include <sstream>

namespace linresp {

namespace {

void check_perturbations(const MatrixSequence& seq, const PerturbationSequence& ms) {
    if (static_cast<Index>(ms.perturbations.size()) != seq.tau()) {
        throw Error(ErrorKind::DimensionMismatch, "perturbation count differs from sequence length");
    }
    for (const auto& p : ms.perturbations)
        if (p.n() != seq.n()) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs from sequence");
}

std::vector<ConstraintBasis> step_bases(const MatrixSequence& seq) {
    std::vector<ConstraintBasis> bases;
    bases.reserve(static_cast<std::size_t>(seq.tau()));
    for (Index t = 0; t < seq.tau(); ++t) bases.emplace_back(seq.matrix(t));
    return bases;
}

}  // namespace

MatrixSequence::MatrixSequence(std::vector<StochasticMatrix> matrices, Vector h0)
    : matrices_(std::move(matrices)), h0_(std::move(h0)) {
    if (matrices_.empty()) throw Error(ErrorKind::InvalidInput, "sequence needs at least one matrix");
    for (const auto& m : matrices_)
        if (m.n() != h0_.size()) throw Error(ErrorKind::DimensionMismatch, "matrix sizes differ within the sequence");
    if (!h0_.allFinite() || (h0_.array() < 0.0).any() || std::abs(h0_.sum() - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidInput, "h0 must be a probability vector");
    }
}

double PerturbationSequence::joint_norm() const {
    double sq = 0.0;
    for (const auto& p : perturbations) sq += p.values().squaredNorm();
    return std::sqrt(sq);
}

std::vector<Vector> propagate(const MatrixSequence& seq) {
    std::vector<Vector> h;
    h.reserve(static_cast<std::size_t>(seq.tau()) + 1);
    h.push_back(seq.h0());
    for (Index t = 0; t < seq.tau(); ++t) h.push_back(seq.matrix(t).matrix() * h.back());
    return h;
}

Vector propagate_perturbed(const MatrixSequence& seq, const PerturbationSequence& ms, double eps) {
    check_perturbations(seq, ms);
    Vector h = seq.h0();
    for (Index t = 0; t < seq.tau(); ++t) {
        const StochasticMatrix step = perturbed_matrix(seq.matrix(t), ms.perturbations[static_cast<std::size_t>(t)], eps);
        h = step.matrix() * h;
    }
    return h;
}

std::vector<Vector> sequential_responses(const MatrixSequence& seq, const PerturbationSequence& ms) {
    check_perturbations(seq, ms);
    const auto h = propagate(seq);
    std::vector<Vector> u;
    u.reserve(h.size());
    u.push_back(Vector::Zero(seq.n()));
    for (Index t = 0; t < seq.tau(); ++t) {
        const auto k = static_cast<std::size_t>(t);
        u.push_back(seq.matrix(t).matrix() * u.back() + ms.perturbations[k].values() * h[k]);
    }
    return u;
}

Vector sequential_response(const MatrixSequence& seq, const PerturbationSequence& ms) {
    return sequential_responses(seq, ms).back();
}

Vector sequential_response_expanded(const MatrixSequence& seq, const PerturbationSequence& ms) {
    check_perturbations(seq, ms);
    const auto h = propagate(seq);
    Vector total = Vector::Zero(seq.n());
    for (Index t = 0; t < seq.tau(); ++t) {
        Vector term = ms.perturbations[static_cast<std::size_t>(t)].values() * h[static_cast<std::size_t>(t)];
        for (Index s = t + 1; s < seq.tau(); ++s) term = seq.matrix(s).matrix() * term;
        total += term;
    }
    return total;
}

SequentialOptimum optimize_sequential_norm(const MatrixSequence& seq, const SequentialOptions& options) {
    const Index tau = seq.tau();
    const Index n = seq.n();
    const auto bases = step_bases(seq);
    std::vector<Index> offsets{0};
    for (const auto& b : bases) offsets.push_back(offsets.back() + b.total_dim());
    const Index total = offsets.back();
    if (total == 0) throw Error(ErrorKind::EmptyFeasibleSet, "no step admits a nonzero perturbation");

    SequentialOptimum opt;
    opt.h = propagate(seq);

    LinearOperator op;
    op.rows = n;
    op.cols = total;
    op.apply = [&](const Vector& alpha) {
        Vector u = Vector::Zero(n);
        for (Index t = 0; t < tau; ++t) {
            const auto k = static_cast<std::size_t>(t);
            u = seq.matrix(t).matrix() * u;
            if (bases[k].total_dim() > 0)
                u += bases[k].combine(alpha.segment(offsets[k], bases[k].total_dim()), opt.h[k]);
        }
        return u;
    };
    op.apply_adjoint = [&](const Vector& v) {
        Vector alpha(total);
        Vector z = v;
        for (Index t = tau - 1; t >= 0; --t) {
            const auto k = static_cast<std::size_t>(t);
            if (bases[k].total_dim() > 0) alpha.segment(offsets[k], bases[k].total_dim()) = bases[k].spread(z, opt.h[k]);
            if (t > 0) z = seq.matrix(t).matrix().transpose() * z;
        }
        return alpha;
    };

    SingularPairs pairs;
    if (n <= options.dense_limit) {
        Matrix u(n, total);
        for (Index t = 0; t < tau; ++t) {
            const auto k = static_cast<std::size_t>(t);
            for (Index j = 0; j < n; ++j) {
                const auto& col = bases[k].column(j);
                if (col.empty()) continue;
                Matrix block = opt.h[k][j] * col.dense();
                for (Index s = t + 1; s < tau; ++s) block = seq.matrix(s).matrix() * block;
                u.middleCols(offsets[k] + bases[k].offset(j), col.dim()) = block;
            }
        }
        pairs = dense_singular_pairs(u, 2);
    } else {
        pairs = top_singular_pairs(op, 2, options.singular);
        opt.notes.push_back("subspace iterations: " + std::to_string(pairs.iterations));
    }
    Vector alpha = pairs.right.col(0);
    alpha /= alpha.norm();
    const double s1 = pairs.values[0];
    const double s2 = pairs.values.size() > 1 ? pairs.values[1] : 0.0;
    opt.leading_singular_values = {s1, s2};
    opt.unique = s1 - s2 > options.degeneracy_tolerance * s1;
    opt.pre_flip_objective = s1 * s1;

    opt.flipped.assign(static_cast<std::size_t>(tau), false);
    for (Index t = 0; t < tau; ++t) {
        const auto k = static_cast<std::size_t>(t);
        Perturbation p = bases[k].total_dim() > 0
                             ? assemble_perturbation(bases[k], alpha.segment(offsets[k], bases[k].total_dim()))
                             : Perturbation::zero(seq.matrix(t));
        // d/d eps ||(M + eps m) h^(t)||^2 at 0 has the sign of h^(t+1)^T m h^(t)
        const double slope = opt.h[k + 1].dot(p.values() * opt.h[k]);
        if (slope < 0.0) {
            p = -p;
            opt.flipped[k] = true;
        } else if (slope == 0.0 && p.frobenius_norm() > 0.0) {
            opt.notes.push_back("sign of step " + std::to_string(t) + " inconclusive");
        }
        p.epsilon_range = feasible_epsilon_range(seq.matrix(t), p);
        opt.perturbations.perturbations.push_back(std::move(p));
    }
    opt.u_terminal = sequential_response(seq, opt.perturbations);
    opt.objective = opt.u_terminal.squaredNorm();
    if (!opt.unique) opt.notes.emplace_back("degenerate optimum: top two singular values coincide");
    return opt;
}

SequentialOptimum optimize_sequential_expectation(const MatrixSequence& seq, const Vector& c) {
    const Index tau = seq.tau();
    const Index n = seq.n();
    if (c.size() != n) throw Error(ErrorKind::DimensionMismatch, "observable length differs from sequence");
    if (is_constant_observable(c)) throw Error(ErrorKind::ConstantObservable, "observable is constant");
    bool feasible = false;
    for (Index t = 0; t < tau && !feasible; ++t) feasible = ConstraintBasis(seq.matrix(t)).total_dim() > 0;
    if (!feasible) throw Error(ErrorKind::EmptyFeasibleSet, "no step admits a nonzero perturbation");

    SequentialOptimum opt;
    opt.h = propagate(seq);
    std::vector<Vector> w(static_cast<std::size_t>(tau));
    w.back() = c;
    for (Index t = tau - 2; t >= 0; --t)
        w[static_cast<std::size_t>(t)] = seq.matrix(t + 1).matrix().transpose() * w[static_cast<std::size_t>(t + 1)];

    std::vector<SparseMatrix> g(static_cast<std::size_t>(tau));
    double sq = 0.0;
    for (Index t = 0; t < tau; ++t) {
        const auto k = static_cast<std::size_t>(t);
        const Vector& wt = w[k];
        const Vector& ht = opt.h[k];
        g[k] = project_onto_feasible(seq.matrix(t).support(), [&](Index i, Index j) { return ht[j] * wt[i]; });
        sq += g[k].squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (!(norm > kConstantObservableTolerance * std::max(1.0, c.norm()))) {
        throw Error(ErrorKind::ConstantObservable, "column-centered weights vanish at every step");
    }
    opt.nu = 0.5 * norm;
    opt.flipped.assign(static_cast<std::size_t>(tau), false);
    for (Index t = 0; t < tau; ++t) {
        const auto k = static_cast<std::size_t>(t);
        Perturbation p(g[k] / norm, seq.matrix(t).support_ptr());
        p.epsilon_range = feasible_epsilon_range(seq.matrix(t), p);
        opt.perturbations.perturbations.push_back(std::move(p));
    }
    opt.u_terminal = sequential_response(seq, opt.perturbations);
    opt.objective = c.dot(opt.u_terminal);
    opt.pre_flip_objective = opt.objective;
    return opt;
}

}  // namespace linresp
