#ifndef KAPSM_SI_SIGNAL_HPP
#define KAPSM_SI_SIGNAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace kapsm {

using cplx = std::complex<double>;

// Deterministic standard-normal source (Marsaglia polar on mt19937_64), so
// that streams do not depend on the standard library's distribution choices.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}
    double next();
    cplx next_complex(double power);  // E|z|^2 = power

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// i.i.d. complex Gaussian transmit samples with per-sample power.
std::vector<cplx> gaussian_iid(std::size_t n, double power, std::uint64_t seed);

// Non-causal/causal tap window around the current sample.
struct TapConfig {
    int m_pre = 10;   // look-ahead taps
    int m_post = 10;  // memory taps

    int window() const { return m_pre + m_post + 1; }
    int regressor_dim() const { return 2 * window(); }
    void validate() const;
};

// Real-stacked regressor [Re window; Im window] for sample n, where the
// window runs x[n+m_pre], ..., x[n], ..., x[n-m_post] and indices outside
// the stream are zero.
Eigen::VectorXd build_regressor(std::span<const cplx> stream, std::ptrdiff_t n,
                                const TapConfig& taps);

// Memory-polynomial self-interference channel: linear taps, odd-order
// nonlinear terms per tap (orders 3 and 5), an IQ-imbalance image term and
// additive complex white Gaussian noise.
struct SiChannelModel {
    std::vector<cplx> taps{cplx{1.0, 0.0}, cplx{0.3, -0.2}, cplx{0.0, 0.1}};
    std::vector<cplx> a3{cplx{0.08, -0.05}};  // per-tap cubic coefficients
    std::vector<cplx> a5{cplx{0.01, 0.0}};    // per-tap fifth-order coefficients
    cplx iq_imbalance{0.05, 0.0};             // coefficient on conj(x[n])
    double noise_std = 0.0;                   // per real dimension
    std::uint64_t seed = 0;

    void validate() const;
};

std::vector<cplx> generate_si(const SiChannelModel& model, std::span<const cplx> x);

// Interleaved 32-bit little-endian IEEE-754 floats, I then Q, no header.
std::vector<cplx> load_iq(const std::filesystem::path& path);
void save_iq(const std::filesystem::path& path, std::span<const cplx> samples);

}  // namespace kapsm

#endif
