#pragma once

#include "linresp/stochastic_matrix.hpp"

#include <functional>
#include <optional>
#include <string>

namespace linresp {

enum class Domain { Circle, Interval };

enum class MapKind { Lanford, Logistic, DoubleLanford, DoubleLanfordLiteral, Custom };

struct MapSpec {
    MapKind kind = MapKind::Lanford;
    Domain domain = Domain::Circle;
    std::string name = "lanford";
    /// Pointwise map for MapKind::Custom; the result is reduced mod 1 on the circle.
    std::function<double(double)> custom;

    static MapSpec lanford();
    static MapSpec logistic();
    /// Two coupled half-scale Lanford branches, x -> T(2x)/2 mod 1/2 on [0,1/2] and the shifted copy on (1/2,1].
    static MapSpec double_lanford();
    /// The same two-branch map without the 1/2 rescaling: x -> T(2x) mod 1/2.
    static MapSpec double_lanford_literal();
    static MapSpec make_custom(std::string name, Domain domain, std::function<double(double)> f);
};

/// Built-in maps by name: lanford, logistic, double-lanford, double-lanford-literal.
[[nodiscard]] std::optional<MapSpec> map_by_name(const std::string& name);

/// 2x + x(1-x)/2 without reduction.
[[nodiscard]] double lanford_raw(double x);

/// Deterministic image of x; OutOfDomain for x outside [0,1].
[[nodiscard]] double map_point(const MapSpec& map, double x);

/// Uniform noise on the ball of radius epsilon around the image, wrapped on the circle
/// and truncated then renormalized on the interval.
struct NoiseKernel {
    double epsilon = 0.1;
    Domain boundary = Domain::Circle;

    /// Probability that image + noise lands in [a, b], 0 <= a <= b <= 1.
    [[nodiscard]] double mass(double image, double a, double b) const;
};

struct UlamOptions {
    /// Midpoint sub-samples per cell.
    Index quadrature = 32;
    double zero_threshold = kDefaultZeroThreshold;
    /// 0 selects thread_count().
    int threads = 0;
};

struct UlamModel {
    MapSpec map;
    NoiseKernel noise;
    Index n = 0;
    Index quadrature = 0;
    StochasticMatrix matrix;
    /// Largest |column sum - 1| before renormalization.
    double max_column_deviation = 0.0;

    [[nodiscard]] double cell_width() const { return 1.0 / static_cast<double>(n); }
};

inline constexpr double kQuadratureFailureThreshold = 1e-3;

/// Ulam matrix M_ij = (1/K) sum_s mass(T(y_s), I_i) over K midpoints y_s of cell I_j.
/// Throws InvalidInput for n < 2 or epsilon <= 0, QuadratureFailure when a column sum
/// is off by more than 1e-3 before renormalization.
[[nodiscard]] UlamModel build_ulam(const MapSpec& map, const NoiseKernel& noise, Index n, const UlamOptions& options = {});

/// Worker threads: LINRESP_THREADS if set to a positive integer, otherwise the hardware concurrency.
[[nodiscard]] int thread_count();

/// Density coefficients n * v_i of a vector over the uniform n-cell partition.
[[nodiscard]] Vector density_from_vector(const Vector& v);
/// Inverse of density_from_vector.
[[nodiscard]] Vector vector_from_density(const Vector& f);

/// Squared L2 norm of the piecewise-constant density of v, n * ||v||^2.
[[nodiscard]] double l2_norm_squared(const Vector& v);
/// L2 pairing of a density-scaled observable c (||c|| = sqrt(n)) with the density of v, c^T v.
[[nodiscard]] double l2_pairing(const Vector& c, const Vector& v);

/// Projected kernel perturbation n * m_ij.
[[nodiscard]] SparseMatrix perturbation_kernel_scaling(const SparseMatrix& m);

/// sum_ij l(I_i) l(I_j) k_ij^2 for a kernel-cell matrix on the uniform partition.
[[nodiscard]] double hilbert_schmidt_norm_squared(const SparseMatrix& kernel);

}  // namespace linresp
