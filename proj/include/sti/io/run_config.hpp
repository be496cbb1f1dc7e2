#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sti {

inline constexpr const char* kVersion = "sti 1.0.0";

// Flat key = value run configuration: diffable, hand-editable experiment
// records. A run's canonical text is embedded (with its hash) in every
// output artifact.
class RunConfig {
  public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    double get_num(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : std::stod(it->second);
    }
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : std::stoll(it->second);
    }

    // parse `key = value` lines; '#' starts a comment
    static RunConfig parse(const std::string& text) {
        RunConfig c;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key = value");
            c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return c;
    }

    std::string canonical_text() const {
        std::ostringstream out;
        for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
        return out.str();
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : canonical_text()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace sti
