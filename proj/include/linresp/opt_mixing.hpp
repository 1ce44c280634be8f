#pragma once

#include "linresp/basis.hpp"
#include "linresp/markov.hpp"

#include <complex>
#include <cstdint>

namespace linresp {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Second eigenvalue with right eigenvector r (r^* r = 1) and left eigenvector l
/// (l^* M = lambda l^*, l^* r = 1). A complex lambda2 is reported with Im >= 0.
struct SpectralPair {
    Complex lambda2;
    ComplexVector r2;
    ComplexVector l2;
    bool gap_ok = true;
    /// Largest modulus among the eigenvalues other than 1, lambda2 and its conjugate.
    double lambda3_modulus = 0.0;
};

struct EigenOptions {
    /// Up to this many states the full spectrum is computed densely.
    Index dense_limit = 500;
    Index block_size = 12;
    /// Eigen-residual of the unit Ritz vector at convergence.
    double tolerance = 1e-12;
    long max_iterations = 20'000;
    std::uint64_t seed = 7;
    double gap_tolerance = 1e-9;
    /// When false a tie |lambda2| = |lambda3| is reported through gap_ok instead of an error.
    bool require_gap = true;
};

/// Throws NonMixing, SpectralGapAmbiguous, DefectiveEigenvalue, NoConvergence.
[[nodiscard]] SpectralPair second_eigenpair(const StochasticMatrix& m, const EigenOptions& options = {});

/// lambda2 alone (no left eigenvector, no gap check); Im >= 0 for a complex pair.
[[nodiscard]] Complex second_eigenvalue(const StochasticMatrix& m, const EigenOptions& options = {});
/// Same for a column-sum-one matrix a with invariant vector h; a may carry small negative entries.
[[nodiscard]] Complex second_eigenvalue(const SparseMatrix& a, const Vector& h, const EigenOptions& options = {});

/// S_ij such that d/d eps Re log lambda2(M + eps m) = <S, m>_F / |lambda2|^2.
struct SensitivityMatrix {
    Matrix values;

    [[nodiscard]] double inner(const Perturbation& m) const;
};

/// Throws ZeroLambda2.
[[nodiscard]] SensitivityMatrix mixing_sensitivity(const SpectralPair& pair);

/// First-order change l^* m r of lambda2 along m.
[[nodiscard]] Complex eigenvalue_derivative(const SpectralPair& pair, const Perturbation& m);

struct MixingOptimum {
    Perturbation m_star;
    /// <S, m*> / |lambda2|^2, the rate of change of Re log lambda2.
    double rho = 0.0;
    /// Multiplier of the norm constraint (negative for the minimizer).
    double nu = 0.0;
    SpectralPair pair;
    std::vector<std::string> notes;
};

/// Unit-norm perturbation decreasing |lambda2| fastest.
/// Throws EmptyFeasibleSet, ZeroLambda2, ZeroGradient and the errors of second_eigenpair.
[[nodiscard]] MixingOptimum optimize_mixing(const StochasticMatrix& m, const EigenOptions& options = {});

}  // namespace linresp
