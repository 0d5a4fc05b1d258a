#ifndef KAPSM_TEST_UTIL_HPP
#define KAPSM_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "kapsm/kernels.hpp"

namespace kapsm::testutil {

inline Eigen::VectorXd random_vec(std::mt19937_64& eng, int dim, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = n(eng);
    return v;
}

inline std::vector<Eigen::VectorXd> random_points(std::mt19937_64& eng, int count, int dim,
                                                  double scale = 1.0) {
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(random_vec(eng, dim, scale));
    return pts;
}

// |sum_i c_i k(x_i, .)|^2 computed through the Gram matrix.
inline double rkhs_norm_sq(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& atoms,
                           const Eigen::VectorXd& coeffs) {
    const Eigen::MatrixXd g = gram_matrix(spec, atoms);
    return coeffs.dot(g * coeffs);
}

}  // namespace kapsm::testutil

#endif
