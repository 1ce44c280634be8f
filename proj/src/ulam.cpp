#include "linresp/ulam.hpp"

#include "linresp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace linresp {

namespace {

double overlap(double lo, double hi, double a, double b) { return std::max(0.0, std::min(hi, b) - std::max(lo, a)); }

double wrap(double x) { return x - std::floor(x); }

using Triplet = Eigen::Triplet<double>;

// Adds weight * mass of [lo, hi] to the cells it meets; lo, hi within [0, 1].
void deposit(double lo, double hi, double weight, Index n, std::vector<double>& acc, std::vector<Index>& touched) {
    if (hi <= lo) return;
    const double dn = static_cast<double>(n);
    const Index first = std::clamp<Index>(static_cast<Index>(std::floor(lo * dn)), 0, n - 1);
    const Index last = std::clamp<Index>(static_cast<Index>(std::ceil(hi * dn)) - 1, 0, n - 1);
    for (Index i = first; i <= last; ++i) {
        const double len = overlap(lo, hi, static_cast<double>(i) / dn, static_cast<double>(i + 1) / dn);
        if (len <= 0.0) continue;
        auto& slot = acc[static_cast<std::size_t>(i)];
        if (slot == 0.0) touched.push_back(i);
        slot += weight * len;
    }
}

struct ColumnResult {
    std::vector<Triplet> entries;
    double deviation = 0.0;
};

void build_columns(const MapSpec& map, const NoiseKernel& noise, Index n, Index k, Index begin, Index end,
                   std::vector<ColumnResult>& out) {
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<Index> touched;
    const double dn = static_cast<double>(n);
    const double eps = noise.epsilon;
    for (Index j = begin; j < end; ++j) {
        touched.clear();
        for (Index s = 0; s < k; ++s) {
            const double y = (static_cast<double>(j) + (static_cast<double>(s) + 0.5) / static_cast<double>(k)) / dn;
            const double z = map_point(map, y);
            if (noise.boundary == Domain::Circle) {
                const double w = 1.0 / (2.0 * eps);
                for (int shift = -1; shift <= 1; ++shift) {
                    const double lo = std::max(0.0, z - eps + shift);
                    const double hi = std::min(1.0, z + eps + shift);
                    deposit(lo, hi, w, n, acc, touched);
                }
            } else {
                const double lo = std::max(0.0, z - eps);
                const double hi = std::min(1.0, z + eps);
                deposit(lo, hi, 1.0 / (hi - lo), n, acc, touched);
            }
        }
        std::sort(touched.begin(), touched.end());
        double sum = 0.0;
        for (Index i : touched) sum += acc[static_cast<std::size_t>(i)];
        sum /= static_cast<double>(k);
        auto& col = out[static_cast<std::size_t>(j)];
        col.deviation = std::abs(sum - 1.0);
        col.entries.reserve(touched.size());
        for (Index i : touched) {
            auto& slot = acc[static_cast<std::size_t>(i)];
            const double v = slot / static_cast<double>(k) / sum;
            if (v > 0.0) col.entries.emplace_back(i, j, v);
            slot = 0.0;
        }
    }
}

}  // namespace

MapSpec MapSpec::lanford() { return {MapKind::Lanford, Domain::Circle, "lanford", {}}; }
MapSpec MapSpec::logistic() { return {MapKind::Logistic, Domain::Interval, "logistic", {}}; }
MapSpec MapSpec::double_lanford() { return {MapKind::DoubleLanford, Domain::Circle, "double-lanford", {}}; }
MapSpec MapSpec::double_lanford_literal() {
    return {MapKind::DoubleLanfordLiteral, Domain::Circle, "double-lanford-literal", {}};
}
MapSpec MapSpec::make_custom(std::string name, Domain domain, std::function<double(double)> f) {
    return {MapKind::Custom, domain, std::move(name), std::move(f)};
}

std::optional<MapSpec> map_by_name(const std::string& name) {
    if (name == "lanford") return MapSpec::lanford();
    if (name == "logistic") return MapSpec::logistic();
    if (name == "double-lanford" || name == "double_lanford") return MapSpec::double_lanford();
    if (name == "double-lanford-literal") return MapSpec::double_lanford_literal();
    return std::nullopt;
}

double lanford_raw(double x) { return 2.0 * x + 0.5 * x * (1.0 - x); }

double map_point(const MapSpec& map, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::OutOfDomain, "point " + std::to_string(x) + " outside [0,1]");
    double y = 0.0;
    switch (map.kind) {
        case MapKind::Lanford:
            y = lanford_raw(x);
            break;
        case MapKind::Logistic:
            y = 4.0 * x * (1.0 - x);
            break;
        case MapKind::DoubleLanford:
            y = x <= 0.5 ? std::fmod(0.5 * lanford_raw(2.0 * x), 0.5)
                         : std::fmod(0.5 * lanford_raw(2.0 * (x - 0.5)), 0.5) + 0.5;
            break;
        case MapKind::DoubleLanfordLiteral:
            y = x <= 0.5 ? std::fmod(lanford_raw(2.0 * x), 0.5) : std::fmod(lanford_raw(2.0 * (x - 0.5)), 0.5) + 0.5;
            break;
        case MapKind::Custom:
            if (!map.custom) throw Error(ErrorKind::InvalidInput, "custom map without a function");
            y = map.custom(x);
            break;
    }
    if (map.domain == Domain::Circle) return wrap(y);
    if (!(y >= 0.0 && y <= 1.0)) throw Error(ErrorKind::OutOfDomain, "image leaves [0,1] for x = " + std::to_string(x));
    return y;
}

double NoiseKernel::mass(double image, double a, double b) const {
    if (boundary == Domain::Circle) {
        double total = 0.0;
        for (int shift = -1; shift <= 1; ++shift) total += overlap(image - epsilon + shift, image + epsilon + shift, a, b);
        return total / (2.0 * epsilon);
    }
    const double lo = std::max(0.0, image - epsilon);
    const double hi = std::min(1.0, image + epsilon);
    return overlap(lo, hi, a, b) / (hi - lo);
}

int thread_count() {
    if (const char* env = std::getenv("LINRESP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

UlamModel build_ulam(const MapSpec& map, const NoiseKernel& noise, Index n, const UlamOptions& options) {
    if (n < 2) throw Error(ErrorKind::InvalidInput, "partition needs n >= 2");
    if (!(noise.epsilon > 0.0) || (noise.boundary == Domain::Circle && noise.epsilon >= 0.5) ||
        (noise.boundary == Domain::Interval && noise.epsilon > 1.0)) {
        throw Error(ErrorKind::InvalidInput, "noise radius out of range");
    }
    if (noise.boundary != map.domain) throw Error(ErrorKind::InvalidInput, "noise boundary differs from map domain");
    if (options.quadrature < 1) throw Error(ErrorKind::InvalidInput, "quadrature needs at least one sample");

    std::vector<ColumnResult> columns(static_cast<std::size_t>(n));
    const int threads = std::max(1, std::min<int>(options.threads > 0 ? options.threads : thread_count(),
                                                  static_cast<int>(n)));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const Index chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const Index begin = std::min<Index>(n, t * chunk);
        const Index end = std::min<Index>(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                build_columns(map, noise, n, options.quadrature, begin, end, columns);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    double deviation = 0.0;
    std::size_t nnz = 0;
    for (const auto& c : columns) {
        deviation = std::max(deviation, c.deviation);
        nnz += c.entries.size();
    }
    if (deviation > kQuadratureFailureThreshold) {
        throw Error(ErrorKind::QuadratureFailure, "column sum deviates by " + std::to_string(deviation));
    }
    std::vector<Triplet> triplets;
    triplets.reserve(nnz);
    for (const auto& c : columns) triplets.insert(triplets.end(), c.entries.begin(), c.entries.end());
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());

    return UlamModel{map, noise, n, options.quadrature, StochasticMatrix(std::move(m), options.zero_threshold),
                     deviation};
}

Vector density_from_vector(const Vector& v) { return static_cast<double>(v.size()) * v; }

Vector vector_from_density(const Vector& f) { return f / static_cast<double>(f.size()); }

double l2_norm_squared(const Vector& v) { return static_cast<double>(v.size()) * v.squaredNorm(); }

double l2_pairing(const Vector& c, const Vector& v) {
    if (c.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "observable length differs from vector");
    return c.dot(v);
}

SparseMatrix perturbation_kernel_scaling(const SparseMatrix& m) { return static_cast<double>(m.rows()) * m; }

double hilbert_schmidt_norm_squared(const SparseMatrix& kernel) {
    const double w = 1.0 / static_cast<double>(kernel.rows());
    return w * w * kernel.squaredNorm();
}

}  // namespace linresp
