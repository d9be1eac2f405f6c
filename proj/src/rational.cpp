#include "lifespan/rational.hpp"

#include <cctype>

namespace lifespan {

std::string rational_to_string(const Rational& r) {
    return r.str();
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ConfigError("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
            return Rational(num, den);
        } catch (const std::exception&) {
            throw ConfigError("bad rational literal '" + text + "'");
        }
    }

    auto dot = s.find('.');
    if (dot == std::string::npos) {
        try {
            return Rational(BigInt(s));
        } catch (const std::exception&) {
            throw ConfigError("bad integer literal '" + text + "'");
        }
    }

    // Decimal literal: shift the point into an exact power-of-ten denominator.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+")
        throw ConfigError("bad decimal literal '" + text + "'");
    std::size_t frac_len = s.size() - dot - 1;
    try {
        BigInt num(digits);
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(num, den);
    } catch (const std::exception&) {
        throw ConfigError("bad decimal literal '" + text + "'");
    }
}

std::vector<double> to_double_vector(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(to_double(r));
    return out;
}

}  // namespace lifespan
