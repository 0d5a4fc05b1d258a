#ifndef KAPSM_APSM_HPP
#define KAPSM_APSM_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "kapsm/dictionary.hpp"
#include "kapsm/kernels.hpp"

namespace kapsm {

// Closed tube of functions whose value at x stays within eps of y.
struct Hyperslab {
    Eigen::VectorXd x;
    double y = 0.0;
    double eps = 0.0;
};

// Projection coefficient beta for one hyperslab: the metric projection of f
// is f + beta * k(x, .). Throws std::domain_error when kxx <= 0.
double beta_coefficient(double f_eval, const Hyperslab& slab, double kxx);

enum class WeightScheme { Uniform };

struct ApsmConfig {
    double mu = 0.1;   // step size, (0, 2]
    int q = 1;         // concurrent hyperslabs (most recent samples)
    double eps = 1e-3; // slab half-width
    WeightScheme weights = WeightScheme::Uniform;
    KernelSpec kernel = KernelSpec::linear();
    double alpha = 0.1;          // dictionary novelty threshold
    double jitter = 1e-8;
    std::optional<std::size_t> max_atoms;
    std::size_t reserve_atoms = 0;  // pre-size the Gram storage (performance hint)

    void validate() const;  // throws std::invalid_argument
};

struct UpdateReport {
    double m_real = 1.0;   // extrapolation factor applied to the real part
    double m_imag = 1.0;
    bool admitted = false; // regressor entered the dictionary this step
    bool skipped = false;  // non-finite input, no state change
    std::complex<double> residual_pre{0.0, 0.0};  // y - prediction before update
};

// One weighted parallel-projection update of a single real estimate:
//   f <- f + mu * M * sum_j w_j beta_j k(x_j, .)
// with M the extrapolation ratio (1 when the combined movement vanishes).
// Increments land directly on the slab's atom when atom_indices[j] >= 0 and
// are otherwise folded through fold_coeffs[j]. slab_gram holds kernel values
// among the slab regressors. Returns M. The dictionary is not modified.
double apply_projection_batch(const Dictionary& dict, FunctionEstimate& f,
                              const std::vector<Hyperslab>& slabs,
                              const std::vector<double>& weights,
                              const std::vector<int>& atom_indices,
                              const std::vector<Eigen::VectorXd>& fold_coeffs,
                              const Eigen::MatrixXd& slab_gram, double mu);

// Complex-output kernel APSM filter: two real estimates (real and imaginary
// parts) over one shared dictionary, updated from the q most recent samples
// with uniform weights. Single-writer, like the dictionary it owns.
class ComplexApsmFilter {
public:
    ComplexApsmFilter(ApsmConfig cfg, std::size_t dim);

    UpdateReport step(const Eigen::VectorXd& x, std::complex<double> y);
    std::complex<double> predict(const Eigen::VectorXd& x) const;

    const Dictionary& dictionary() const { return dict_; }
    const FunctionEstimate& estimate_re() const { return re_; }
    const FunctionEstimate& estimate_im() const { return im_; }
    const ApsmConfig& config() const { return cfg_; }
    std::size_t skipped_samples() const { return skipped_; }

private:
    struct WindowEntry {
        Eigen::VectorXd x;
        double y_re = 0.0, y_im = 0.0;
        int atom_index = -1;            // >= 0 when this regressor is an atom
        Eigen::VectorXd fold;           // cached projection coefficients
        std::size_t fold_dict_size = 0; // dictionary size the cache was built at
    };

    ApsmConfig cfg_;
    std::size_t dim_;
    Dictionary dict_;
    FunctionEstimate re_, im_;
    std::deque<WindowEntry> window_;
    std::size_t skipped_ = 0;
};

}  // namespace kapsm

#endif
