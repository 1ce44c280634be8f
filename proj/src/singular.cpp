#include "linresp/singular.hpp"

#include "linresp/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace linresp {

namespace {

Matrix orthonormalize(const Matrix& w) {
    Eigen::HouseholderQR<Matrix> qr(w);
    return qr.householderQ() * Matrix::Identity(w.rows(), w.cols());
}

}  // namespace

SingularPairs top_singular_pairs(const LinearOperator& op, Index count, const SingularOptions& options) {
    if (count < 1) throw Error(ErrorKind::InvalidInput, "need at least one singular pair");
    const Index rank_cap = std::min(op.rows, op.cols);
    count = std::min(count, rank_cap);
    const Index p = std::min(std::max(options.block_size, count + 2), rank_cap);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    Matrix y(op.rows, p);
    for (Index c = 0; c < p; ++c)
        for (Index r = 0; r < op.rows; ++r) y(r, c) = normal(rng);
    y = orthonormalize(y);

    Matrix z(op.cols, p);
    Matrix w(op.rows, p);
    for (long iter = 1; iter <= options.max_iterations; ++iter) {
        for (Index c = 0; c < p; ++c) z.col(c) = op.apply_adjoint(y.col(c));
        for (Index c = 0; c < p; ++c) w.col(c) = op.apply(z.col(c));

        const Matrix g = z.transpose() * z;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
        // ascending -> descending
        const Matrix s = eig.eigenvectors().rowwise().reverse();
        const Vector theta = eig.eigenvalues().reverse().cwiseMax(0.0);

        const Matrix ritz = y * s;
        const Matrix image = w * s;
        bool converged = true;
        const double scale = std::max(theta[0], std::numeric_limits<double>::min());
        for (Index c = 0; c < count; ++c) {
            const double res = (image.col(c) - theta[c] * ritz.col(c)).norm();
            if (res > options.tolerance * scale) {
                converged = false;
                break;
            }
        }
        if (converged) {
            SingularPairs out;
            out.iterations = iter;
            out.values = theta.head(count).cwiseSqrt();
            out.left = ritz.leftCols(count);
            out.right = (z * s).leftCols(count);
            for (Index c = 0; c < count; ++c) {
                const double nrm = out.right.col(c).norm();
                if (nrm > 0) out.right.col(c) /= nrm;
            }
            return out;
        }
        y = orthonormalize(image);
    }
    throw Error(ErrorKind::NoConvergence,
                "singular subspace iteration did not converge in " + std::to_string(options.max_iterations) +
                    " iterations");
}

SingularPairs dense_singular_pairs(const Matrix& a, Index count) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index k = std::min<Index>(count, svd.singularValues().size());
    SingularPairs out;
    out.values = svd.singularValues().head(k);
    out.left = svd.matrixU().leftCols(k);
    out.right = svd.matrixV().leftCols(k);
    return out;
}

}  // namespace linresp
