#include "kapsm/nlms.hpp"

#include <cmath>
#include <stdexcept>

namespace kapsm {

void NlmsConfig::validate() const {
    if (!(mu > 0.0) || mu > 2.0) throw std::invalid_argument("nlms: mu must be in (0, 2]");
    if (!(delta > 0.0)) throw std::invalid_argument("nlms: delta must be positive");
}

NlmsFilter::NlmsFilter(NlmsConfig cfg, std::size_t dim) : cfg_(cfg) {
    cfg_.validate();
    w_re_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    w_im_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
}

std::complex<double> NlmsFilter::predict(const Eigen::VectorXd& x) const {
    return {w_re_.dot(x), w_im_.dot(x)};
}

std::complex<double> NlmsFilter::step(const Eigen::VectorXd& x, std::complex<double> y) {
    if (!x.allFinite() || !std::isfinite(y.real()) || !std::isfinite(y.imag())) {
        ++skipped_;
        return {0.0, 0.0};
    }
    if (x.size() != w_re_.size())
        throw std::invalid_argument("nlms step: regressor dimension mismatch");
    const double e_re = y.real() - w_re_.dot(x);
    const double e_im = y.imag() - w_im_.dot(x);
    const double scale = cfg_.mu / (x.squaredNorm() + cfg_.delta);
    w_re_ += scale * e_re * x;
    w_im_ += scale * e_im * x;
    return {e_re, e_im};
}

}  // namespace kapsm
