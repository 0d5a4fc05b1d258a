#include "kapsm/si_signal.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace kapsm {

double GaussianRng::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method; uniform doubles built from raw 64-bit draws so
    // the stream is identical across standard library implementations.
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    double u, v, s;
    do {
        u = 2.0 * (double)(eng_() >> 11) * kScale - 1.0;
        v = 2.0 * (double)(eng_() >> 11) * kScale - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

cplx GaussianRng::next_complex(double power) {
    const double s = std::sqrt(power / 2.0);
    const double re = next();
    const double im = next();
    return {s * re, s * im};
}

std::vector<cplx> gaussian_iid(std::size_t n, double power, std::uint64_t seed) {
    if (power <= 0.0) throw std::invalid_argument("gaussian_iid: power must be positive");
    GaussianRng rng(seed);
    std::vector<cplx> out(n);
    for (auto& z : out) z = rng.next_complex(power);
    return out;
}

void TapConfig::validate() const {
    if (m_pre < 0 || m_post < 0)
        throw std::invalid_argument("TapConfig: tap counts must be non-negative");
}

Eigen::VectorXd build_regressor(std::span<const cplx> stream, std::ptrdiff_t n,
                                const TapConfig& taps) {
    taps.validate();
    const int w = taps.window();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * w);
    for (int j = 0; j < w; ++j) {
        const std::ptrdiff_t idx = n + taps.m_pre - j;
        if (idx < 0 || idx >= (std::ptrdiff_t)stream.size()) continue;
        r(j) = stream[(std::size_t)idx].real();
        r(w + j) = stream[(std::size_t)idx].imag();
    }
    return r;
}

void SiChannelModel::validate() const {
    bool live = false;
    for (const auto& t : taps) live = live || std::norm(t) > 0.0;
    if (!live) throw std::invalid_argument("SiChannelModel: need at least one nonzero tap");
    if (a3.size() > taps.size() || a5.size() > taps.size())
        throw std::invalid_argument("SiChannelModel: more nonlinear coefficients than taps");
    if (noise_std < 0.0) throw std::invalid_argument("SiChannelModel: noise_std must be >= 0");
}

std::vector<cplx> generate_si(const SiChannelModel& model, std::span<const cplx> x) {
    model.validate();
    GaussianRng rng(model.seed);
    std::vector<cplx> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx acc{0.0, 0.0};
        for (std::size_t m = 0; m < model.taps.size(); ++m) {
            if (n < m) break;
            const cplx xm = x[n - m];
            acc += model.taps[m] * xm;
            const double mag2 = std::norm(xm);
            if (m < model.a3.size()) acc += model.a3[m] * xm * mag2;
            if (m < model.a5.size()) acc += model.a5[m] * xm * mag2 * mag2;
        }
        acc += model.iq_imbalance * std::conj(x[n]);
        if (model.noise_std > 0.0) {
            acc += cplx{model.noise_std * rng.next(), model.noise_std * rng.next()};
        }
        y[n] = acc;
    }
    return y;
}

static_assert(std::endian::native == std::endian::little,
              "IQ file I/O assumes a little-endian host");
static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::vector<cplx> load_iq(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_iq: cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0, std::ios::beg);
    if (bytes % 8 != 0)
        throw std::runtime_error("load_iq: " + path.string() +
                                 " does not hold an even number of 32-bit floats");
    const std::size_t n = (std::size_t)(bytes / 8);
    std::vector<float> raw(2 * n);
    if (n > 0) {
        in.read(reinterpret_cast<char*>(raw.data()), bytes);
        if (!in) throw std::runtime_error("load_iq: short read on " + path.string());
    }
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {(double)raw[2 * i], (double)raw[2 * i + 1]};
    return out;
}

void save_iq(const std::filesystem::path& path, std::span<const cplx> samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_iq: cannot open " + path.string());
    std::vector<float> raw(2 * samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        raw[2 * i] = (float)samples[i].real();
        raw[2 * i + 1] = (float)samples[i].imag();
    }
    if (!raw.empty())
        out.write(reinterpret_cast<const char*>(raw.data()),
                  (std::streamsize)(raw.size() * sizeof(float)));
    if (!out) throw std::runtime_error("save_iq: write failed on " + path.string());
}

}  // namespace kapsm
