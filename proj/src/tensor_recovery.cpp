#include "lensjet/tensor_recovery.hpp"

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lensjet/errors.hpp"

namespace lensjet {

std::vector<std::vector<double>> recover_symmetric_tensor(
    const std::vector<QuadraticSample>& samples, int n, double condition_limit) {
    if (n < 1) throw std::invalid_argument("tensor dimension must be >= 1");
    const int unknowns = n * (n + 1) / 2;
    const int rows = int(samples.size());
    if (rows < unknowns)
        throw std::invalid_argument("need at least n(n+1)/2 quadratic samples");

    Eigen::MatrixXd A(rows, unknowns);
    Eigen::VectorXd q(rows);
    for (int r = 0; r < rows; ++r) {
        const auto& s = samples[std::size_t(r)];
        if (int(s.direction.size()) != n)
            throw std::invalid_argument("sample direction has wrong dimension");
        int col = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double vij = s.direction[std::size_t(i)] * s.direction[std::size_t(j)];
                A(r, col++) = (i == j) ? vij : 2.0 * vij;
            }
        }
        q(r) = s.value;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > condition_limit)
        throw Error(ErrorCode::degenerate_directions,
                    "sample directions do not determine the tensor");
    const Eigen::VectorXd x = svd.solve(q);

    std::vector<std::vector<double>> f(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
    int col = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            f[std::size_t(i)][std::size_t(j)] = x(col);
            f[std::size_t(j)][std::size_t(i)] = x(col);
            ++col;
        }
    }
    return f;
}

}  // namespace lensjet
