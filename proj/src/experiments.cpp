#include "linresp/experiments.hpp"

#include "linresp/error.hpp"

#include <cmath>
#include <numbers>

namespace linresp {

namespace {

const std::array<std::string, 7> kNormHeaders{
    "n", "||u1*||^2_L2", "eps", "||h_{M+eps m*}-(h_M+eps u1*)||^2_L2", "||h_{M-eps m*}||^2_L2", "||h_M||^2_L2",
    "||h_{M+eps m*}||^2_L2"};
const std::array<std::string, 7> kExpectationHeaders{
    "n", "<c,u1*>_L2", "eps", "<c,h_{M+eps m*}>_L2-<c,h_M+eps u1*>_L2", "<c,h_{M-eps m*}>_L2", "<c,h_M>_L2",
    "<c,h_{M+eps m*}>_L2"};
const std::array<std::string, 7> kMixingHeaders{
    "n", "rho", "eps", "|lambda2(eps)*|-|lambda2+eps eta2|", "|lambda2(-eps)*|", "|lambda2|", "|lambda2(eps)*|"};

}  // namespace

double two_sin_pi(double x) { return 2.0 * std::sin(std::numbers::pi * x); }

TableSpec table_spec(int number) {
    TableSpec spec;
    spec.number = number;
    switch (number) {
        case 1:
            spec.title = "Lanford map, norm of the response";
            spec.map = MapSpec::lanford();
            spec.objective = Objective::Norm;
            spec.sizes = {1500, 1750, 2000};
            spec.headers = kNormHeaders;
            break;
        case 2:
            spec.title = "Lanford map, expectation of 2 sin(pi x)";
            spec.map = MapSpec::lanford();
            spec.objective = Objective::Expectation;
            spec.sizes = {1500, 1750, 2000, 5000, 7000};
            spec.headers = kExpectationHeaders;
            break;
        case 3:
            spec.title = "logistic map, norm of the response";
            spec.map = MapSpec::logistic();
            spec.objective = Objective::Norm;
            spec.sizes = {1500, 1750, 2000};
            spec.headers = kNormHeaders;
            break;
        case 4:
            spec.title = "logistic map, expectation of 2 sin(pi x)";
            spec.map = MapSpec::logistic();
            spec.objective = Objective::Expectation;
            spec.sizes = {1500, 1750, 2000, 5000, 7000};
            spec.headers = kExpectationHeaders;
            break;
        case 5:
            spec.title = "double Lanford map, mixing rate";
            spec.map = MapSpec::double_lanford();
            spec.objective = Objective::Mixing;
            spec.sizes = {1500, 1750, 2000, 5000, 7000};
            spec.headers = kMixingHeaders;
            break;
        default:
            throw Error(ErrorKind::InvalidInput, "table number must be 1..5, got " + std::to_string(number));
    }
    return spec;
}

NormExperiment run_norm_experiment(const StochasticMatrix& m, double l2_scale, const std::vector<double>& epsilons,
                                   const ExperimentOptions& options) {
    NormExperiment out;
    NormOptions norm = options.norm;
    norm.stationary = options.stationary;
    const bool positive = options.norm_algorithm == NormAlgorithm::Positive ||
                          (options.norm_algorithm == NormAlgorithm::Auto && m.is_positive() && m.n() <= norm.dense_limit);
    out.optimum = positive ? optimize_norm_positive(m, norm) : optimize_norm_general(m, norm);
    const auto& opt = out.optimum;
    const auto sq = [l2_scale](const Vector& v) { return l2_scale * v.squaredNorm(); };
    for (double eps : epsilons) {
        const Vector hp = perturbed_invariant_vector(m, opt.h, opt.m_star, eps);
        const Vector hm = perturbed_invariant_vector(m, opt.h, opt.m_star, -eps);
        out.rows.push_back({m.n(), sq(opt.u1), eps, sq(hp - opt.h - eps * opt.u1), sq(hm), sq(opt.h), sq(hp)});
    }
    return out;
}

ExpectationExperiment run_expectation_experiment(const StochasticMatrix& m, const Vector& c,
                                                 const std::vector<double>& epsilons, const ExperimentOptions& options) {
    ExpectationExperiment out;
    out.c = c;
    out.optimum = optimize_expectation(m, c, options.stationary);
    const auto& opt = out.optimum;
    for (double eps : epsilons) {
        const Vector hp = perturbed_invariant_vector(m, opt.h, opt.m_star, eps);
        const Vector hm = perturbed_invariant_vector(m, opt.h, opt.m_star, -eps);
        out.rows.push_back({m.n(), opt.objective, eps, l2_pairing(c, hp) - l2_pairing(c, opt.h + eps * opt.u1),
                            l2_pairing(c, hm), l2_pairing(c, opt.h), l2_pairing(c, hp)});
    }
    return out;
}

MixingExperiment run_mixing_experiment(const StochasticMatrix& m, const std::vector<double>& epsilons,
                                       const ExperimentOptions& options) {
    MixingExperiment out;
    out.optimum = optimize_mixing(m, options.eigen);
    const auto& opt = out.optimum;
    const Complex lambda = opt.pair.lambda2;
    const Complex eta = eigenvalue_derivative(opt.pair, opt.m_star);
    const Vector h = stationary_distribution(m, options.stationary);
    const auto perturbed_lambda2 = [&](double eps) {
        const SparseMatrix a = m.matrix() + eps * opt.m_star.values();
        const Vector he = m.n() <= options.eigen.dense_limit ? Vector() : invariant_vector(a, h);
        return second_eigenvalue(a, he, options.eigen);
    };
    for (double eps : epsilons) {
        const double plus = std::abs(perturbed_lambda2(eps));
        const double minus = std::abs(perturbed_lambda2(-eps));
        out.rows.push_back({m.n(), opt.rho, eps, plus - std::abs(lambda + eps * eta), minus, std::abs(lambda), plus});
    }
    return out;
}

std::vector<TableRow> reproduce_table(int number, const std::vector<Index>& sizes, const ExperimentOptions& options) {
    const TableSpec spec = table_spec(number);
    const NoiseKernel noise{spec.noise, spec.map.domain};
    std::vector<TableRow> rows;
    for (Index n : sizes.empty() ? spec.sizes : sizes) {
        const UlamModel model = build_ulam(spec.map, noise, n, options.ulam);
        std::vector<TableRow> part;
        switch (spec.objective) {
            case Objective::Norm:
                part = run_norm_experiment(model.matrix, static_cast<double>(n), spec.epsilons, options).rows;
                break;
            case Objective::Expectation:
                part = run_expectation_experiment(model.matrix, discretize_observable(two_sin_pi, n).c, spec.epsilons,
                                                  options)
                           .rows;
                break;
            case Objective::Mixing:
                part = run_mixing_experiment(model.matrix, spec.epsilons, options).rows;
                break;
        }
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

double norm_objective_2x2(double m12, double m21) {
    const double s = m12 + m21;
    return (m12 * m12 + m21 * m21) / (s * s * s * s);
}

std::vector<std::array<double, 3>> contour_2x2(Index resolution) {
    if (resolution < 2) throw Error(ErrorKind::InvalidInput, "resolution must be at least 2");
    std::vector<std::array<double, 3>> out;
    out.reserve(static_cast<std::size_t>(resolution * resolution));
    const double step = 1.0 / static_cast<double>(resolution);
    for (Index a = 1; a <= resolution; ++a)
        for (Index b = 1; b <= resolution; ++b) {
            const double x = static_cast<double>(a) * step;
            const double y = static_cast<double>(b) * step;
            out.push_back({x, y, std::log(norm_objective_2x2(x, y))});
        }
    return out;
}

}  // namespace linresp
