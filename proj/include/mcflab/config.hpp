#ifndef MCFLAB_CONFIG_HPP
#define MCFLAB_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcflab {

// Raised by experiment configuration parsing/validation. Carries the full
// list of violations (validation is total: every problem is reported, not
// just the first).
struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid config:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

// Line-oriented `key = value` configuration with `[section]` headers.
// Grammar:
//   file     := line*
//   line     := blank | comment | section | entry
//   comment  := '#' any*
//   section  := '[' name ']'
//   entry    := key '=' value        (whitespace around tokens ignored)
// Keys are stored fully qualified as "section.key"; entries before any
// section header use the key alone. Duplicate keys are violations.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::istream& in) {
        ExperimentConfig cfg;
        std::vector<std::string> violations;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']' || t.size() < 3) {
                    violations.push_back("line " + std::to_string(lineno) + ": malformed section header");
                    continue;
                }
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos) {
                violations.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
                continue;
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) {
                violations.push_back("line " + std::to_string(lineno) + ": empty key");
                continue;
            }
            const std::string full = section.empty() ? key : section + "." + key;
            if (cfg.entries_.count(full))
                violations.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
            else
                cfg.entries_[full] = value;
        }
        if (!violations.empty()) throw ConfigError(std::move(violations));
        return cfg;
    }

    static ExperimentConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw std::out_of_range("config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    // Typed accessors used by the validator below; they record violations
    // instead of throwing so every problem surfaces in one pass.
    struct Check {
        const ExperimentConfig& cfg;
        std::vector<std::string> violations;

        explicit Check(const ExperimentConfig& c) : cfg(c) {}

        std::string require(const std::string& key) {
            if (!cfg.has(key)) {
                violations.push_back("missing required key '" + key + "'");
                return {};
            }
            return cfg.get_string(key);
        }

        long require_int(const std::string& key, long lo, long hi) {
            const std::string v = require(key);
            if (v.empty()) return lo;
            try {
                std::size_t pos = 0;
                const long out = std::stol(v, &pos);
                if (pos != v.size()) throw std::invalid_argument(v);
                if (out < lo || out > hi)
                    violations.push_back("'" + key + "' = " + v + " out of range [" +
                                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
                return out;
            } catch (const std::exception&) {
                violations.push_back("'" + key + "' = '" + v + "' is not an integer");
                return lo;
            }
        }

        double require_float(const std::string& key, double lo, double hi) {
            const std::string v = require(key);
            if (v.empty()) return lo;
            try {
                std::size_t pos = 0;
                const double out = std::stod(v, &pos);
                if (pos != v.size()) throw std::invalid_argument(v);
                if (out < lo || out > hi)
                    violations.push_back("'" + key + "' = " + v + " out of range");
                return out;
            } catch (const std::exception&) {
                violations.push_back("'" + key + "' = '" + v + "' is not a number");
                return lo;
            }
        }

        double optional_float(const std::string& key, double fallback, double lo, double hi) {
            if (!cfg.has(key)) return fallback;
            return require_float(key, lo, hi);
        }

        long optional_int(const std::string& key, long fallback, long lo, long hi) {
            if (!cfg.has(key)) return fallback;
            return require_int(key, lo, hi);
        }

        std::string require_enum(const std::string& key, const std::vector<std::string>& allowed) {
            const std::string v = require(key);
            if (v.empty()) return allowed.front();
            if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                std::string msg = "'" + key + "' = '" + v + "' not one of {";
                for (std::size_t i = 0; i < allowed.size(); ++i)
                    msg += (i ? ", " : "") + allowed[i];
                violations.push_back(msg + "}");
                return allowed.front();
            }
            return v;
        }

        void finish() const {
            if (!violations.empty()) throw ConfigError(violations);
        }
    };

    // Comma-separated numeric lists, e.g. "alphas = 4,5,6".
    static std::vector<double> parse_list(const std::string& v) {
        std::vector<double> out;
        std::istringstream in(v);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            const std::string t = trim(tok);
            if (t.empty()) throw std::invalid_argument("empty element in list '" + v + "'");
            std::size_t pos = 0;
            out.push_back(std::stod(t, &pos));
            if (pos != t.size()) throw std::invalid_argument("bad list element '" + t + "'");
        }
        if (out.empty()) throw std::invalid_argument("empty list");
        return out;
    }

private:
    std::map<std::string, std::string> entries_;

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
};

} // namespace mcflab

#endif // MCFLAB_CONFIG_HPP
