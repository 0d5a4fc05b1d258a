#ifndef KAPSM_NLMS_HPP
#define KAPSM_NLMS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

namespace kapsm {

struct NlmsConfig {
    double mu = 0.1;
    double delta = 1e-8;  // energy regularizer

    void validate() const;
};

// Normalized LMS over the same real-stacked regressor the kernel filter sees:
// independent real weight vectors for the real and imaginary target parts.
class NlmsFilter {
public:
    NlmsFilter(NlmsConfig cfg, std::size_t dim);

    // Returns the pre-update residual y - w'x. Non-finite input is skipped.
    std::complex<double> step(const Eigen::VectorXd& x, std::complex<double> y);
    std::complex<double> predict(const Eigen::VectorXd& x) const;

    const Eigen::VectorXd& weights_re() const { return w_re_; }
    const Eigen::VectorXd& weights_im() const { return w_im_; }
    std::size_t skipped_samples() const { return skipped_; }

private:
    NlmsConfig cfg_;
    Eigen::VectorXd w_re_, w_im_;
    std::size_t skipped_ = 0;
};

}  // namespace kapsm

#endif
