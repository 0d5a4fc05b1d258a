#include "kapsm/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace kapsm {

namespace {

constexpr std::uint64_t kNoiseSeedSalt = 0x9E3779B97F4A7C15ull;

std::string lower(std::string s) {
    for (auto& c : s) c = (char)std::tolower((unsigned char)c);
    return s;
}

KernelSpec kernel_from_config(const ConfigFile& cfg, const std::string& kind) {
    const std::string k = lower(kind);
    if (k == "linear") return KernelSpec::linear();
    if (k == "gaussian") return KernelSpec::gaussian(cfg.get_double("xi", 0.0715));
    if (k == "hybrid")
        return KernelSpec::hybrid(cfg.get_double("w_lin", 0.1), cfg.get_double("w_gauss", 0.9),
                                  cfg.get_double("xi", 0.225));
    throw ConfigError("key 'kernel': unknown kernel '" + kind + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Mean squared error per iteration, smoothed over non-overlapping blocks of
// `window` iterations; the first `warmup` iterations (zero-padded regressors)
// are left out of the block means.
std::vector<double> block_smooth(const std::vector<double>& sq, std::size_t warmup,
                                 std::size_t window) {
    const std::size_t n = sq.size();
    const std::size_t nblocks = (n + window - 1) / window;
    std::vector<double> mean(nblocks, 0.0);
    std::vector<std::size_t> cnt(nblocks, 0);
    for (std::size_t i = warmup; i < n; ++i) {
        mean[i / window] += sq[i];
        ++cnt[i / window];
    }
    for (std::size_t b = 0; b < nblocks; ++b)
        if (cnt[b] > 0) mean[b] /= (double)cnt[b];
    for (std::size_t b = nblocks; b-- > 1;)  // all-warmup blocks borrow from the right
        if (cnt[b - 1] == 0) mean[b - 1] = mean[b];
    std::vector<double> rec(n);
    for (std::size_t i = 0; i < n; ++i) rec[i] = mean[i / window];
    return rec;
}

struct RealizationData {
    std::vector<cplx> tx, rx;
    double noise_std = 0.0;
};

RealizationData make_data(const ExperimentConfig& cfg, std::size_t r) {
    RealizationData d;
    const std::size_t need = cfg.n_train + cfg.n_test;
    if (!cfg.tx_iq.empty()) {
        d.tx = load_iq(cfg.tx_iq);
        d.rx = load_iq(cfg.rx_iq);
        if (d.tx.size() < need || d.rx.size() < need)
            throw ConfigError("input files hold fewer than n_train + n_test samples");
        return d;
    }
    const std::uint64_t base = cfg.seed + r;
    d.tx = gaussian_iid(need + (std::size_t)cfg.taps.m_pre, cfg.tx_power, base);

    SiChannelModel clean = cfg.channel;
    clean.noise_std = 0.0;
    d.rx = generate_si(clean, d.tx);
    d.rx.resize(need);

    double noise_std = cfg.noise_std;
    if (noise_std < 0.0) {
        double p = 0.0;
        for (const auto& y : d.rx) p += std::norm(y);
        p /= (double)d.rx.size();
        noise_std = std::sqrt(p * std::pow(10.0, -cfg.snr_db / 10.0) / 2.0);
    }
    if (noise_std > 0.0) {
        GaussianRng rng(base ^ kNoiseSeedSalt);
        for (auto& y : d.rx) y += cplx{noise_std * rng.next(), noise_std * rng.next()};
    }
    d.noise_std = noise_std;
    return d;
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        apsm.validate();
        nlms.validate();
        taps.validate();
        channel.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (realizations < 1) throw ConfigError("key 'realizations': must be >= 1");
    if (n_test < 1) throw ConfigError("key 'n_test': must be >= 1");
    const std::size_t warmup = (std::size_t)(taps.m_pre + taps.m_post);
    if (n_train <= warmup)
        throw ConfigError("key 'n_train': must exceed the regressor warmup of " +
                          std::to_string(warmup) + " samples");
    if (curve_window < 1) throw ConfigError("key 'curve_window': must be >= 1");
    if (tx_iq.empty() != rx_iq.empty())
        throw ConfigError("keys 'tx_iq'/'rx_iq': must be given together");
    if (!tx_iq.empty() && realizations != 1)
        throw ConfigError("key 'realizations': recorded input supports a single realization");
    if (tx_iq.empty() && tx_power <= 0.0)
        throw ConfigError("key 'tx_power': must be positive");
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& cfg) {
    ExperimentConfig e;
    const std::string filter = lower(cfg.get_string("filter", "apsm"));
    if (filter == "apsm")
        e.filter = FilterKind::Apsm;
    else if (filter == "nlms")
        e.filter = FilterKind::Nlms;
    else
        throw ConfigError("key 'filter': unknown filter '" + filter + "'");

    e.apsm.kernel = kernel_from_config(cfg, cfg.get_string("kernel", "hybrid"));
    e.apsm.mu = cfg.get_double("mu", 0.1);
    e.apsm.q = (int)cfg.get_int("q", 1);
    e.apsm.eps = cfg.get_double("eps", 0.001);
    e.apsm.alpha = cfg.get_double("alpha", 0.1);
    e.apsm.jitter = cfg.get_double("jitter", 1e-8);
    const long long max_atoms = cfg.get_int("max_atoms", 0);
    if (max_atoms < 0) throw ConfigError("key 'max_atoms': must be >= 0");
    if (max_atoms > 0) e.apsm.max_atoms = (std::size_t)max_atoms;

    e.nlms.mu = cfg.get_double("nlms_mu", 0.1);
    e.nlms.delta = cfg.get_double("nlms_delta", 1e-8);

    e.taps.m_pre = (int)cfg.get_int("m_pre", 10);
    e.taps.m_post = (int)cfg.get_int("m_post", 10);

    e.channel.taps = cfg.get_complex_list("channel_taps", e.channel.taps);
    e.channel.a3 = cfg.get_complex_list("channel_a3", e.channel.a3);
    e.channel.a5 = cfg.get_complex_list("channel_a5", e.channel.a5);
    e.channel.iq_imbalance = cfg.get_complex("iq_imbalance", e.channel.iq_imbalance);
    e.snr_db = cfg.get_double("snr_db", 40.0);
    e.noise_std = cfg.get_double("noise_std", -1.0);
    e.tx_power = cfg.get_double("tx_power", 0.2);

    auto size_key = [&](const char* key, long long def) {
        const long long v = cfg.get_int(key, def);
        if (v < 0) throw ConfigError(std::string("key '") + key + "': must be >= 0");
        return (std::size_t)v;
    };
    e.n_train = size_key("n_train", 2000);
    e.n_test = size_key("n_test", 500);
    e.realizations = size_key("realizations", 1);
    e.seed = cfg.get_u64("seed", 1);
    e.curve_window = size_key("curve_window", 100);

    e.tx_iq = cfg.get_string("tx_iq", "");
    e.rx_iq = cfg.get_string("rx_iq", "");
    e.dict_out = cfg.get_string("dict_out", "");
    e.validate();
    return e;
}

double linear_to_db(double mse_linear) {
    if (mse_linear < 0.0) throw std::domain_error("linear_to_db: negative mean square");
    if (mse_linear < 1e-300) return -300.0;
    return 10.0 * std::log10(mse_linear);
}

double mse_db(std::span<const cplx> residuals) {
    if (residuals.empty()) throw std::invalid_argument("mse_db: empty residual set");
    double acc = 0.0;
    for (const auto& z : residuals) acc += std::norm(z);
    return linear_to_db(acc / (double)residuals.size());
}

double LearningCurve::test_mse_db() const { return linear_to_db(test_mse_linear); }

RealizationResult run_single_realization(const ExperimentConfig& cfg, std::size_t r) {
    cfg.validate();
    const RealizationData data = make_data(cfg, r);
    RealizationResult res;
    std::vector<double> sq(cfg.n_train);

    std::array<std::size_t, 4> quarter_at{};
    for (std::size_t k = 0; k < 4; ++k) quarter_at[k] = cfg.n_train * (k + 1) / 4;

    if (cfg.filter == FilterKind::Apsm) {
        ComplexApsmFilter f(cfg.apsm, (std::size_t)cfg.taps.regressor_dim());
        for (std::size_t n = 0; n < cfg.n_train; ++n) {
            const Eigen::VectorXd x = build_regressor(data.tx, (std::ptrdiff_t)n, cfg.taps);
            const UpdateReport rep = f.step(x, data.rx[n]);
            sq[n] = std::norm(rep.residual_pre);
            res.min_m = std::min({res.min_m, rep.m_real, rep.m_imag});
            for (std::size_t k = 0; k < 4; ++k)
                if (n + 1 == quarter_at[k]) res.dict_quarters[k] = f.dictionary().size();
        }
        double acc = 0.0;
        for (std::size_t n = cfg.n_train; n < cfg.n_train + cfg.n_test; ++n) {
            const Eigen::VectorXd x = build_regressor(data.tx, (std::ptrdiff_t)n, cfg.taps);
            acc += std::norm(data.rx[n] - f.predict(x));
        }
        res.test_mse_linear = acc / (double)cfg.n_test;
        res.dict_size = f.dictionary().size();
        res.linear_rank = atom_matrix_rank(f.dictionary());
        res.skipped = f.skipped_samples();
        if (r == 0 && !cfg.dict_out.empty()) {
            std::ofstream out(cfg.dict_out);
            if (!out) throw std::runtime_error("cannot open dictionary snapshot file: " + cfg.dict_out);
            write_dictionary_snapshot(out, f.dictionary(), &f.estimate_re(), &f.estimate_im());
        }
    } else {
        NlmsFilter f(cfg.nlms, (std::size_t)cfg.taps.regressor_dim());
        for (std::size_t n = 0; n < cfg.n_train; ++n) {
            const Eigen::VectorXd x = build_regressor(data.tx, (std::ptrdiff_t)n, cfg.taps);
            sq[n] = std::norm(f.step(x, data.rx[n]));
        }
        double acc = 0.0;
        for (std::size_t n = cfg.n_train; n < cfg.n_train + cfg.n_test; ++n) {
            const Eigen::VectorXd x = build_regressor(data.tx, (std::ptrdiff_t)n, cfg.taps);
            acc += std::norm(data.rx[n] - f.predict(x));
        }
        res.test_mse_linear = acc / (double)cfg.n_test;
        res.skipped = f.skipped_samples();
    }

    const std::size_t warmup = (std::size_t)(cfg.taps.m_pre + cfg.taps.m_post);
    res.mse_linear = block_smooth(sq, warmup, cfg.curve_window);
    res.noise_std = data.noise_std;
    return res;
}

LearningCurve run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    LearningCurve curve;
    curve.mse_linear.assign(cfg.n_train, 0.0);
    const double inv_r = 1.0 / (double)cfg.realizations;
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
        const RealizationResult res = run_single_realization(cfg, r);
        for (std::size_t i = 0; i < cfg.n_train; ++i) curve.mse_linear[i] += res.mse_linear[i] * inv_r;
        curve.test_mse_linear += res.test_mse_linear * inv_r;
        curve.avg_dict_size += (double)res.dict_size * inv_r;
        curve.avg_linear_rank += (double)res.linear_rank * inv_r;
        for (std::size_t k = 0; k < 4; ++k)
            curve.avg_dict_quarters[k] += (double)res.dict_quarters[k] * inv_r;
        curve.min_m = std::min(curve.min_m, res.min_m);
        curve.skipped += res.skipped;
        curve.avg_noise_floor_linear += 2.0 * res.noise_std * res.noise_std * inv_r;
    }
    return curve;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
    out << "iteration,mse_db\n";
    for (std::size_t i = 0; i < curve.mse_linear.size(); ++i)
        out << i << ',' << fmt_double(linear_to_db(curve.mse_linear[i])) << '\n';
}

std::string filter_name(FilterKind kind) { return kind == FilterKind::Apsm ? "apsm" : "nlms"; }

std::string kernel_name(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

SummaryRow summarize(const ExperimentConfig& cfg, const LearningCurve& curve) {
    SummaryRow row;
    row.filter = filter_name(cfg.filter);
    row.test_mse_db = curve.test_mse_db();
    if (cfg.filter == FilterKind::Apsm) {
        row.kernel = kernel_name(cfg.apsm.kernel);
        row.mu = cfg.apsm.mu;
        row.q = cfg.apsm.q;
        row.eps = cfg.apsm.eps;
        row.alpha = cfg.apsm.alpha;
        row.dict_size = curve.avg_dict_size;
    } else {
        row.kernel = "linear";
        row.mu = cfg.nlms.mu;
        row.q = 1;
    }
    return row;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "filter,kernel,mu,q,eps,alpha,test_mse_db,dict_size\n";
    for (const auto& row : rows) {
        out << row.filter << ',' << row.kernel << ',' << fmt_double(row.mu) << ',' << row.q << ','
            << fmt_double(row.eps) << ',' << fmt_double(row.alpha) << ','
            << fmt_double(row.test_mse_db) << ',' << fmt_double(row.dict_size) << '\n';
    }
}

std::vector<SweepCell> sweep_cells(const ExperimentConfig& base, const ConfigFile& cfg) {
    std::vector<double> mus = cfg.get_double_list(
        "sweep_mu", {base.filter == FilterKind::Apsm ? base.apsm.mu : base.nlms.mu});
    std::vector<double> qs_raw = cfg.get_double_list("sweep_q", {(double)base.apsm.q});
    std::vector<std::string> kernels;
    {
        const std::string raw = cfg.get_string("sweep_kernel", kernel_name(base.apsm.kernel));
        std::size_t start = 0;
        for (std::size_t i = 0; i <= raw.size(); ++i) {
            if (i == raw.size() || raw[i] == ',') {
                std::string part = raw.substr(start, i - start);
                part.erase(0, part.find_first_not_of(" \t"));
                const auto last = part.find_last_not_of(" \t");
                part.erase(last == std::string::npos ? 0 : last + 1);
                if (!part.empty()) kernels.push_back(part);
                start = i + 1;
            }
        }
        if (kernels.empty()) kernels.push_back(kernel_name(base.apsm.kernel));
    }

    std::vector<SweepCell> cells;
    for (const auto& kname : kernels) {
        const KernelSpec spec = kernel_from_config(cfg, kname);
        for (const double mu : mus) {
            for (const double qd : qs_raw) {
                const long long q = (long long)qd;
                if ((double)q != qd || q < 1)
                    throw ConfigError("key 'sweep_q': entries must be integers >= 1");
                SweepCell cell;
                cell.config = base;
                cell.config.apsm.kernel = spec;
                cell.config.apsm.q = (int)q;
                if (cell.config.filter == FilterKind::Apsm)
                    cell.config.apsm.mu = mu;
                else
                    cell.config.nlms.mu = mu;
                cell.config.validate();
                char buf[128];
                std::snprintf(buf, sizeof buf, "%s_%s_mu%g_q%lld",
                              filter_name(cell.config.filter).c_str(), lower(kname).c_str(), mu, q);
                cell.label = buf;
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

}  // namespace kapsm
