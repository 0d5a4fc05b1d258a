#ifndef KAPSM_CONFIG_HPP
#define KAPSM_CONFIG_HPP

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kapsm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "1", "-2.5", "0.3i", "-i", "0.3-0.2j", "1e-3+2e1i"
std::complex<double> parse_complex(std::string_view text);

// Flat key = value file. '#' starts a comment, blank lines are skipped,
// whitespace around keys and values is trimmed, later keys override earlier
// ones. Typed getters throw ConfigError naming the offending key.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::filesystem::path& path);
    static ConfigFile parse_string(std::string_view text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    long long get_int(const std::string& key, long long def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::complex<double> get_complex(const std::string& key, std::complex<double> def) const;

    // Comma-separated lists; an absent key yields the default.
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> def) const;
    std::vector<std::complex<double>> get_complex_list(
        const std::string& key, std::vector<std::complex<double>> def) const;

    // Keys present in the file but never queried (typo detection).
    std::vector<std::string> unused_keys() const;

private:
    std::string raw(const std::string& key) const;

    std::map<std::string, std::string> kv_;
    std::string origin_;
    mutable std::set<std::string> used_;
};

}  // namespace kapsm

#endif
