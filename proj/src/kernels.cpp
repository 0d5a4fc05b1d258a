#include "kapsm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace kapsm {

KernelSpec KernelSpec::linear() {
    KernelSpec s;
    s.kind = KernelKind::Linear;
    return s;
}

KernelSpec KernelSpec::gaussian(double xi) {
    KernelSpec s;
    s.kind = KernelKind::Gaussian;
    s.xi = xi;
    s.validate();
    return s;
}

KernelSpec KernelSpec::hybrid(double w_lin, double w_gauss, double xi) {
    KernelSpec s;
    s.kind = KernelKind::Hybrid;
    s.w_lin = w_lin;
    s.w_gauss = w_gauss;
    s.xi = xi;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    switch (kind) {
        case KernelKind::Linear:
            return;
        case KernelKind::Gaussian:
            if (!(xi > 0.0)) throw std::invalid_argument("kernel: gaussian width must be positive");
            return;
        case KernelKind::Hybrid:
            if (!(xi > 0.0)) throw std::invalid_argument("kernel: gaussian width must be positive");
            if (w_lin < 0.0 || w_gauss < 0.0)
                throw std::invalid_argument("kernel: hybrid weights must be nonnegative");
            if (!(w_lin + w_gauss > 0.0))
                throw std::invalid_argument("kernel: hybrid weights must not both be zero");
            return;
    }
    throw std::invalid_argument("kernel: unknown kind");
}

namespace {

// Squared distance computed directly from the difference; the expanded
// |u|^2 - 2u.v + |v|^2 form loses precision for nearby points.
inline double sq_dist(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return (u - v).squaredNorm();
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelKind::Linear:
            return u.dot(v);
        case KernelKind::Gaussian:
            return std::exp(-spec.xi * sq_dist(u, v));
        case KernelKind::Hybrid:
            return spec.w_lin * u.dot(v) + spec.w_gauss * std::exp(-spec.xi * sq_dist(u, v));
    }
    throw std::invalid_argument("kernel_eval: unknown kind");
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& points) {
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel_eval(spec, points[i], points[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

}  // namespace kapsm
