// Experiment driver: run one experiment, sweep a parameter grid, or generate
// synthetic IQ files. Exit codes: 0 success, 2 configuration error, 1 runtime
// error.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kapsm/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct CliConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

kapsm::ConfigFile load_config(const std::string& path) {
    if (!fs::exists(path)) throw kapsm::ConfigError("config file not found: " + path);
    return kapsm::ConfigFile::parse_file(path);
}

void warn_unused(const kapsm::ConfigFile& cfg) {
    for (const auto& key : cfg.unused_keys())
        std::cerr << "warning: unused config key '" << key << "'\n";
}

void write_file(const fs::path& path, const std::string& what,
                const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + what + " file: " + path.string());
    body(out);
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::optional<std::uint64_t>& seed) {
    const kapsm::ConfigFile cfg = load_config(config_path);
    kapsm::ExperimentConfig exp = kapsm::ExperimentConfig::from_config(cfg);
    warn_unused(cfg);
    if (seed) exp.seed = *seed;

    const kapsm::LearningCurve curve = kapsm::run_experiment(exp);
    write_file(out_path, "output", [&](std::ostream& out) { kapsm::write_curve_csv(out, curve); });

    const kapsm::SummaryRow row = kapsm::summarize(exp, curve);
    std::cout << row.filter << '/' << row.kernel << ": test MSE " << row.test_mse_db
              << " dB, avg dictionary size " << row.dict_size << ", curve written to " << out_path
              << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed) {
    const kapsm::ConfigFile cfg = load_config(config_path);
    kapsm::ExperimentConfig base = kapsm::ExperimentConfig::from_config(cfg);
    if (seed) base.seed = *seed;
    const std::vector<kapsm::SweepCell> cells = kapsm::sweep_cells(base, cfg);
    warn_unused(cfg);

    fs::create_directories(out_dir);
    std::vector<kapsm::SummaryRow> rows;
    for (const auto& cell : cells) {
        const kapsm::LearningCurve curve = kapsm::run_experiment(cell.config);
        write_file(fs::path(out_dir) / (cell.label + ".csv"), "curve",
                   [&](std::ostream& out) { kapsm::write_curve_csv(out, curve); });
        rows.push_back(kapsm::summarize(cell.config, curve));
        std::cout << cell.label << ": test MSE " << rows.back().test_mse_db << " dB\n";
    }
    write_file(fs::path(out_dir) / "summary.csv", "summary",
               [&](std::ostream& out) { kapsm::write_summary_csv(out, rows); });
    return 0;
}

int cmd_gen(const std::string& out_path, std::size_t n, double power, std::uint64_t seed) {
    const auto samples = kapsm::gaussian_iid(n, power, seed);
    if (fs::path(out_path).has_parent_path())
        fs::create_directories(fs::path(out_path).parent_path());
    kapsm::save_iq(out_path, samples);
    std::cout << "wrote " << n << " samples to " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel adaptive filtering experiments for self-interference cancellation"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t gen_seed = 1;
    std::size_t gen_n = 100000;
    double gen_power = 0.2;

    auto* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_path, "learning-curve CSV path")->required();
    run->add_option("--seed", seed_flag, "override the config seed");

    auto* sweep = app.add_subcommand("sweep", "Run a mu/q/kernel grid from a config file");
    sweep->add_option("--config", config_path, "experiment config file")->required();
    sweep->add_option("--out", out_path, "output directory for curve CSVs and summary.csv")
        ->required();
    sweep->add_option("--seed", seed_flag, "override the config seed");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic IQ sample file");
    gen->add_option("--out", out_path, "IQ output path")->required();
    gen->add_option("--n", gen_n, "number of complex samples");
    gen->add_option("--power", gen_power, "per-sample power E|x|^2");
    gen->add_option("--seed", gen_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_path, seed_flag);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path, seed_flag);
        return cmd_gen(out_path, gen_n, gen_power, gen_seed);
    } catch (const kapsm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
