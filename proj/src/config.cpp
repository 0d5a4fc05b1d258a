#include "kapsm/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace kapsm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace((unsigned char)s.front())) s.remove_prefix(1);
    while (!s.empty() && std::isspace((unsigned char)s.back())) s.remove_suffix(1);
    return s;
}

double parse_double_strict(std::string_view s, const std::string& what) {
    const std::string buf(trim(s));
    if (buf.empty()) throw ConfigError(what + ": empty number");
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(buf, &pos);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + buf + "' is not a number");
    }
    if (pos != buf.size()) throw ConfigError(what + ": trailing characters in '" + buf + "'");
    return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

}  // namespace

std::complex<double> parse_complex(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw ConfigError("parse_complex: empty value");

    const char tail = s.back();
    if (tail != 'i' && tail != 'j') return {parse_double_strict(s, "parse_complex"), 0.0};

    std::string_view body = s.substr(0, s.size() - 1);
    // Split at the last top-level +/- that is not an exponent sign and not
    // the leading sign of the real part.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        const char c = body[i];
        if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_value = [](std::string_view part) {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return parse_double_strict(part, "parse_complex");
    };
    if (split == std::string_view::npos) return {0.0, imag_value(body)};
    return {parse_double_strict(body.substr(0, split), "parse_complex"),
            imag_value(body.substr(split))};
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path.string());
}

ConfigFile ConfigFile::parse_string(std::string_view text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string val(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        cfg.kv_[key] = val;
    }
    return cfg;
}

std::string ConfigFile::raw(const std::string& key) const {
    used_.insert(key);
    return kv_.at(key);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& def) const {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double ConfigFile::get_double(const std::string& key, double def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    return parse_double_strict(raw(key), origin_ + ": key '" + key + "'");
}

long long ConfigFile::get_int(const std::string& key, long long def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    const std::string s(trim(raw(key)));
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(origin_ + ": key '" + key + "': '" + s + "' is not an integer");
    return v;
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    const std::string s(trim(raw(key)));
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(origin_ + ": key '" + key + "': '" + s +
                          "' is not an unsigned integer");
    return v;
}

bool ConfigFile::get_bool(const std::string& key, bool def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    std::string s(trim(raw(key)));
    for (auto& c : s) c = (char)std::tolower((unsigned char)c);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(origin_ + ": key '" + key + "': '" + s + "' is not a boolean");
}

std::complex<double> ConfigFile::get_complex(const std::string& key,
                                             std::complex<double> def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    try {
        return parse_complex(raw(key));
    } catch (const ConfigError& e) {
        throw ConfigError(origin_ + ": key '" + key + "': " + e.what());
    }
}

std::vector<double> ConfigFile::get_double_list(const std::string& key,
                                                std::vector<double> def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    const std::string s = raw(key);  // keep the storage alive for the views
    std::vector<double> out;
    for (const auto part : split_commas(s))
        out.push_back(parse_double_strict(part, origin_ + ": key '" + key + "'"));
    return out;
}

std::vector<std::complex<double>> ConfigFile::get_complex_list(
    const std::string& key, std::vector<std::complex<double>> def) const {
    used_.insert(key);
    if (!kv_.count(key)) return def;
    const std::string s = raw(key);
    std::vector<std::complex<double>> out;
    try {
        for (const auto part : split_commas(s)) out.push_back(parse_complex(part));
    } catch (const ConfigError& e) {
        throw ConfigError(origin_ + ": key '" + key + "': " + e.what());
    }
    return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

}  // namespace kapsm
