#pragma once

#include <vector>

namespace lensjet {

struct QuadraticSample {
    std::vector<double> direction;  // vector v (not necessarily unit)
    double value;                   // sum_ij f_ij v_i v_j
};

// Recovers a symmetric n x n matrix from quadratic-form samples by least
// squares over the n(n+1)/2 independent entries. Needs at least that many
// samples in generic position.
std::vector<std::vector<double>> recover_symmetric_tensor(const std::vector<QuadraticSample>& samples,
                                                          int n,
                                                          double condition_limit = 1e8);

}  // namespace lensjet
