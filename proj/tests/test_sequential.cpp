#include "linresp/error.hpp"
#include "linresp/markov.hpp"
#include "linresp/opt_target.hpp"
#include "linresp/sequential.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace linresp;

namespace {

std::vector<StochasticMatrix> chains(const std::vector<Matrix>& ms) {
    std::vector<StochasticMatrix> out;
    for (const auto& m : ms) out.push_back(StochasticMatrix::from_dense(m));
    return out;
}

Vector random_probability(Index n) {
    Vector h(n);
    for (Index i = 0; i < n; ++i) h[i] = oracle::uniform(0.1, 1.0);
    return h / h.sum();
}

/// Joint unit-norm random sequence of feasible perturbations.
std::vector<Matrix> random_sequence(const std::vector<Matrix>& ms) {
    std::vector<Matrix> out;
    double sq = 0.0;
    for (const auto& m : ms) {
        out.push_back(oracle::random_feasible_unit(m) * oracle::uniform(0.1, 1.0));
        sq += out.back().squaredNorm();
    }
    for (auto& p : out) p /= std::sqrt(sq);
    return out;
}

PerturbationSequence wrap(const MatrixSequence& seq, const std::vector<Matrix>& ps) {
    PerturbationSequence out;
    for (Index t = 0; t < seq.tau(); ++t) out.perturbations.push_back(Perturbation::from_dense(ps[t], seq.matrix(t)));
    return out;
}

/// u(tau) by hand: sum_t M(tau-1) ... M(t+1) m(t) h(t).
Vector terminal_response(const std::vector<Matrix>& ms, const Vector& h0, const std::vector<Matrix>& ps) {
    std::vector<Vector> h{h0};
    for (const auto& m : ms) h.push_back(m * h.back());
    Vector u = Vector::Zero(h0.size());
    for (std::size_t t = 0; t < ms.size(); ++t) {
        Vector term = ps[t] * h[t];
        for (std::size_t s = t + 1; s < ms.size(); ++s) term = ms[s] * term;
        u += term;
    }
    return u;
}

}  // namespace

TEST_CASE("propagation") {
    SUBCASE("stationary start is a fixed point") {
        const Matrix m = oracle::random_positive(4);
        const MatrixSequence seq(chains({m}), oracle::stationary(m));
        const auto h = propagate(seq);
        CHECK((h[1] - h[0]).norm() < 1e-14);
    }
    SUBCASE("uniform steps flatten any start") {
        const Index n = 5;
        const Matrix u = Matrix::Constant(n, n, 1.0 / n);
        const MatrixSequence seq(chains({u, u, u}), random_probability(n));
        const auto hs = propagate(seq);
        for (std::size_t t = 1; t < hs.size(); ++t) CHECK((hs[t] - Vector::Constant(n, 1.0 / n)).norm() < 1e-15);
    }
    SUBCASE("hand multiplication") {
        const Matrix a = oracle::random_positive(3), b = oracle::random_positive(3);
        const Vector h0 = random_probability(3);
        const MatrixSequence seq(chains({a, b}), h0);
        CHECK((propagate(seq)[2] - b * (a * h0)).norm() < 1e-15);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(MatrixSequence(chains({oracle::random_positive(3), oracle::random_positive(4)}), random_probability(3)),
                        Error);
        CHECK_THROWS_AS(MatrixSequence(chains({oracle::random_positive(3)}), Vector::Constant(3, 0.5)), Error);
    }
}

TEST_CASE("sequential response") {
    const std::vector<Matrix> ms{oracle::random_with_zeros(5, 3), oracle::random_positive(5), oracle::random_with_zeros(5, 4)};
    const Vector h0 = random_probability(5);
    const MatrixSequence seq(chains(ms), h0);
    const auto ps = random_sequence(ms);
    const PerturbationSequence pert = wrap(seq, ps);
    CHECK(pert.joint_norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Vector ref = terminal_response(ms, h0, ps);
    CHECK((sequential_response(seq, pert) - ref).norm() < 1e-14);
    CHECK((sequential_response_expanded(seq, pert) - ref).norm() < 1e-14);

    SUBCASE("single step") {
        const MatrixSequence one(chains({ms[0]}), h0);
        CHECK((sequential_response(one, wrap(one, {ps[0]})) - ps[0] * h0).norm() < 1e-15);
    }
    SUBCASE("zero perturbations") {
        PerturbationSequence zero;
        for (Index t = 0; t < seq.tau(); ++t) zero.perturbations.push_back(Perturbation::zero(seq.matrix(t)));
        CHECK(sequential_response(seq, zero).norm() == 0.0);
    }
    SUBCASE("second-order remainder") {
        auto err = [&](double eps) { return (propagate_perturbed(seq, pert, eps) - propagate(seq).back() - eps * ref).norm(); };
        const double ratio = err(1e-3) / err(1e-4);
        CHECK(ratio == doctest::Approx(100.0).epsilon(0.05));
    }
}

TEST_CASE("sequential norm optimum") {
    SUBCASE("dominance on n = 3, tau = 2") {
        for (int trial = 0; trial < 4; ++trial) {
            const std::vector<Matrix> ms{oracle::random_with_zeros(3, 1), oracle::random_positive(3)};
            const Vector h0 = random_probability(3);
            const MatrixSequence seq(chains(ms), h0);
            const SequentialOptimum opt = optimize_sequential_norm(seq);
            CHECK(opt.perturbations.joint_norm() == doctest::Approx(1.0).epsilon(1e-12));
            const Vector u = terminal_response(ms, h0, [&] {
                std::vector<Matrix> d;
                for (const auto& p : opt.perturbations.perturbations) d.push_back(p.dense());
                return d;
            }());
            CHECK(u.squaredNorm() == doctest::Approx(opt.objective).epsilon(1e-10));
            // Undoing the per-step sign choices recovers the joint optimum.
            std::vector<Matrix> joint;
            for (std::size_t t = 0; t < ms.size(); ++t)
                joint.push_back((opt.flipped[t] ? -1.0 : 1.0) * opt.perturbations.perturbations[t].dense());
            CHECK(terminal_response(ms, h0, joint).squaredNorm() == doctest::Approx(opt.pre_flip_objective).epsilon(1e-10));
            CHECK(opt.pre_flip_objective + 1e-12 >= opt.objective);
            double best = 0.0;
            for (int s = 0; s < 20000; ++s) best = std::max(best, terminal_response(ms, h0, random_sequence(ms)).squaredNorm());
            CHECK(opt.pre_flip_objective + 1e-12 >= best);
        }
    }
    SUBCASE("longer horizon never loses") {
        // From the stationary vector a one-step optimum padded with a zero first step is feasible for two steps.
        const Matrix m = oracle::random_positive(4);
        const Vector h = oracle::stationary(m);
        const SequentialOptimum one = optimize_sequential_norm(MatrixSequence(chains({m}), h));
        const SequentialOptimum two = optimize_sequential_norm(MatrixSequence(chains({m, m}), h));
        CHECK(two.pre_flip_objective + 1e-12 >= one.pre_flip_objective);
    }
    SUBCASE("uniform steps: only the last block contributes") {
        const Index n = 4;
        const Matrix u = Matrix::Constant(n, n, 1.0 / n);
        const SequentialOptimum opt = optimize_sequential_norm(MatrixSequence(chains({u, u, u}), random_probability(n)));
        CHECK(opt.perturbations.perturbations[0].frobenius_norm() < 1e-10);
        CHECK(opt.perturbations.perturbations[1].frobenius_norm() < 1e-10);
        CHECK(opt.perturbations.perturbations[2].frobenius_norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("iterative singular path") {
        std::vector<Matrix> ms;
        for (int t = 0; t < 3; ++t) ms.push_back(oracle::random_with_zeros(12, 20));
        const MatrixSequence seq(chains(ms), random_probability(12));
        SequentialOptions iterative;
        iterative.dense_limit = 0;
        CHECK(optimize_sequential_norm(seq).objective ==
              doctest::Approx(optimize_sequential_norm(seq, iterative).objective).epsilon(1e-9));
    }
}

TEST_CASE("sequential expectation optimum") {
    SUBCASE("single step at the stationary vector matches the one-step optimizer") {
        const Matrix m = oracle::random_positive(3);
        const StochasticMatrix sm = StochasticMatrix::from_dense(m);
        Vector c(3);
        c << oracle::gaussian(), oracle::gaussian(), oracle::gaussian();
        const MatrixSequence seq(chains({m}), stationary_distribution(sm));
        const SequentialOptimum opt = optimize_sequential_expectation(seq, c);
        // One step: c^T m h0, maximized by the centered outer product of c and h0.
        Matrix g = oracle::project_feasible(m, c * seq.h0().transpose());
        CHECK(opt.objective == doctest::Approx(g.norm()).epsilon(1e-12));
        CHECK((opt.perturbations.perturbations[0].dense() - g / g.norm()).norm() < 1e-12);
    }
    SUBCASE("dominance on n = 3, tau = 2") {
        for (int trial = 0; trial < 4; ++trial) {
            const std::vector<Matrix> ms{oracle::random_positive(3), oracle::random_with_zeros(3, 1)};
            const Vector h0 = random_probability(3);
            Vector c(3);
            c << oracle::gaussian(), oracle::gaussian(), oracle::gaussian();
            const MatrixSequence seq(chains(ms), h0);
            const SequentialOptimum opt = optimize_sequential_expectation(seq, c);
            CHECK(opt.perturbations.joint_norm() == doctest::Approx(1.0).epsilon(1e-12));
            double best = -1e300;
            for (int s = 0; s < 20000; ++s) best = std::max(best, c.dot(terminal_response(ms, h0, random_sequence(ms))));
            CHECK(opt.objective + 1e-12 >= best);
            CHECK(c.dot(opt.u_terminal) == doctest::Approx(opt.objective).epsilon(1e-12));
        }
    }
    SUBCASE("constant observable") {
        const Matrix m = oracle::random_positive(3);
        const MatrixSequence seq(chains({m, m}), random_probability(3));
        try {
            (void)optimize_sequential_expectation(seq, Vector::Constant(3, 1.5));
            FAIL("expected ConstantObservable");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ConstantObservable);
        }
    }
}
