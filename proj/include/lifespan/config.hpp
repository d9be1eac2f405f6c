#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lifespan/errors.hpp"
#include "lifespan/rational.hpp"

namespace lifespan {

// Flat key-value configuration with [section] headers, '#'/';' comments and
// comma-separated lists. Grammar documented in the README.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;

    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;

    Rational get_rational(const std::string& section, const std::string& key) const;

    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<Rational> get_rational_list(const std::string& section,
                                            const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::optional<std::string> find(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace lifespan
