#ifndef KAPSM_HARNESS_HPP
#define KAPSM_HARNESS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kapsm/apsm.hpp"
#include "kapsm/config.hpp"
#include "kapsm/nlms.hpp"
#include "kapsm/si_signal.hpp"

namespace kapsm {

enum class FilterKind { Apsm, Nlms };

struct ExperimentConfig {
    FilterKind filter = FilterKind::Apsm;
    ApsmConfig apsm;             // kernel, mu, q, eps, alpha, ...
    NlmsConfig nlms;
    TapConfig taps;              // regressor window
    SiChannelModel channel;      // noise_std filled per realization
    double snr_db = 40.0;        // used when noise_std < 0
    double noise_std = -1.0;     // explicit per-dimension noise; < 0 -> from snr_db
    double tx_power = 0.2;       // per-sample E|x|^2 of the synthetic transmit stream
    std::size_t n_train = 2000;
    std::size_t n_test = 500;
    std::size_t realizations = 1;
    std::uint64_t seed = 1;
    std::size_t curve_window = 100;  // smoothing window, samples
    std::string tx_iq, rx_iq;        // optional recorded input (single realization)
    std::string dict_out;            // optional dictionary snapshot (realization 0)

    void validate() const;  // throws ConfigError with field names
    static ExperimentConfig from_config(const ConfigFile& cfg);
};

// One realization's raw results; MSE values stay linear until serialization.
struct RealizationResult {
    std::vector<double> mse_linear;          // one record per training iteration
    double test_mse_linear = 0.0;
    std::size_t dict_size = 0;
    Eigen::Index linear_rank = 0;            // rank of the atom matrix
    std::array<std::size_t, 4> dict_quarters{};  // dictionary size at n/4, n/2, 3n/4, n
    double min_m = 1.0;                      // smallest extrapolation factor seen
    std::size_t skipped = 0;
    double noise_std = 0.0;                  // per-dimension noise actually injected
};

struct LearningCurve {
    std::vector<double> mse_linear;          // averaged across realizations
    double test_mse_linear = 0.0;
    double avg_dict_size = 0.0;
    double avg_linear_rank = 0.0;
    std::array<double, 4> avg_dict_quarters{};
    double min_m = 1.0;                      // min across realizations
    std::size_t skipped = 0;                 // total across realizations
    double avg_noise_floor_linear = 0.0;     // mean of 2*noise_std^2 across realizations

    double test_mse_db() const;
};

// 10*log10 of a mean squared magnitude, floored at -300 dB below 1e-300.
double linear_to_db(double mse_linear);  // throws std::domain_error when negative
double mse_db(std::span<const cplx> residuals);  // throws std::invalid_argument when empty

RealizationResult run_single_realization(const ExperimentConfig& cfg, std::size_t r);
LearningCurve run_experiment(const ExperimentConfig& cfg);

// CSV with header "iteration,mse_db", one row per training iteration.
void write_curve_csv(std::ostream& out, const LearningCurve& curve);

// CSV with header "filter,kernel,mu,q,eps,alpha,test_mse_db,dict_size".
struct SummaryRow {
    std::string filter, kernel;
    double mu = 0.0;
    long long q = 0;
    double eps = 0.0, alpha = 0.0;
    double test_mse_db = 0.0;
    double dict_size = 0.0;
};
SummaryRow summarize(const ExperimentConfig& cfg, const LearningCurve& curve);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

std::string filter_name(FilterKind kind);
std::string kernel_name(const KernelSpec& spec);

// Grid sweep over mu x q x kernel. Returns one (cell label, config) per cell;
// labels are filesystem-safe fragments like "apsm_hybrid_mu0.02_q20".
struct SweepCell {
    std::string label;
    ExperimentConfig config;
};
std::vector<SweepCell> sweep_cells(const ExperimentConfig& base, const ConfigFile& cfg);

}  // namespace kapsm

#endif
