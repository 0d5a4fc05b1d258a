#ifndef KAPSM_KERNELS_HPP
#define KAPSM_KERNELS_HPP

#include <Eigen/Dense>
#include <vector>

namespace kapsm {

enum class KernelKind { Linear, Gaussian, Hybrid };

// Immutable kernel description. All evaluation routines are stateless and
// safe to share across threads.
struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double xi = 0.0;       // Gaussian width, kernel = exp(-xi * |u-v|^2)
    double w_lin = 0.0;    // hybrid mixing weights, w_lin + w_gauss convex in practice
    double w_gauss = 0.0;

    static KernelSpec linear();
    static KernelSpec gaussian(double xi);
    static KernelSpec hybrid(double w_lin, double w_gauss, double xi);

    void validate() const;  // throws std::invalid_argument on bad parameters
};

// k(u, v). Throws std::invalid_argument on dimension mismatch.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Dense symmetric Gram matrix of a point set.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& points);

}  // namespace kapsm

#endif
