#pragma once

#include "linresp/opt_mixing.hpp"
#include "linresp/opt_norm.hpp"
#include "linresp/opt_target.hpp"
#include "linresp/ulam.hpp"

#include <array>
#include <string>
#include <vector>

namespace linresp {

/// One line of a results table: for each perturbation size eps the linearization
/// error and the quantity of interest at -eps, 0 and +eps.
struct TableRow {
    Index n = 0;
    double objective = 0.0;
    double epsilon = 0.0;
    double error = 0.0;
    double minus = 0.0;
    double base = 0.0;
    double plus = 0.0;
};

enum class Objective { Norm, Expectation, Mixing };

struct TableSpec {
    int number = 0;
    std::string title;
    MapSpec map;
    Objective objective = Objective::Norm;
    double noise = 0.1;
    std::vector<Index> sizes;
    std::vector<double> epsilons{1e-2, 1e-3};
    std::array<std::string, 7> headers;
};

/// Settings of the five published tables; InvalidInput outside 1..5.
[[nodiscard]] TableSpec table_spec(int number);

/// The observable 2 sin(pi x).
[[nodiscard]] double two_sin_pi(double x);

enum class NormAlgorithm { Auto, Positive, General };

struct ExperimentOptions {
    UlamOptions ulam;
    /// Auto takes the positive-matrix path only for small positive matrices.
    NormAlgorithm norm_algorithm = NormAlgorithm::Auto;
    NormOptions norm;
    EigenOptions eigen;
    StationaryOptions stationary;
};

struct NormExperiment {
    NormOptimum optimum;
    std::vector<TableRow> rows;
};

struct ExpectationExperiment {
    ExpectationOptimum optimum;
    Vector c;
    std::vector<TableRow> rows;
};

struct MixingExperiment {
    MixingOptimum optimum;
    std::vector<TableRow> rows;
};

/// Objective s ||u1||^2, error s ||h(eps) - h - eps u1||^2, columns s ||h(-eps)||^2, s ||h||^2,
/// s ||h(eps)||^2, where s = l2_scale (n for the L2 norm of Ulam densities, 1 for the 2-norm).
[[nodiscard]] NormExperiment run_norm_experiment(const StochasticMatrix& m, double l2_scale,
                                                 const std::vector<double>& epsilons,
                                                 const ExperimentOptions& options = {});

/// Objective <c, u1>, error <c, h(eps)> - <c, h + eps u1>, columns <c, h(-eps)>, <c, h>, <c, h(eps)>.
[[nodiscard]] ExpectationExperiment run_expectation_experiment(const StochasticMatrix& m, const Vector& c,
                                                               const std::vector<double>& epsilons,
                                                               const ExperimentOptions& options = {});

/// Objective rho, error |lambda2(eps)| - |lambda2 + eps eta2|, columns |lambda2(-eps)|, |lambda2|, |lambda2(eps)|.
[[nodiscard]] MixingExperiment run_mixing_experiment(const StochasticMatrix& m, const std::vector<double>& epsilons,
                                                     const ExperimentOptions& options = {});

/// Rows of a published table recomputed for the given sizes (the table's own sizes when empty).
[[nodiscard]] std::vector<TableRow> reproduce_table(int number, const std::vector<Index>& sizes = {},
                                                    const ExperimentOptions& options = {});

/// Norm objective of a positive 2x2 chain, (M12^2 + M21^2)/(M12 + M21)^4.
[[nodiscard]] double norm_objective_2x2(double m12, double m21);

/// (M12, M21, log objective) on the grid k/resolution, k = 1..resolution, in both coordinates.
[[nodiscard]] std::vector<std::array<double, 3>> contour_2x2(Index resolution);

}  // namespace linresp
