#pragma once

#include <cstdlib>
#include <regex>

#include "ratmap.hpp"

namespace lyap {

/// Named test maps: power:d, chebyshev:d, quadratic:c, lattes4.
struct Preset {
    enum class Kind { power, chebyshev, quadratic, lattes };
    Kind kind = Kind::power;
    int degree = 2;
    std::complex<double> c;
    std::string name;
};

/// Parses "a", "a+bi", "a-bi", "bi", "i" or "a,b".
inline std::complex<double> parse_complex(const std::string& text)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s += ch;
    if (s.empty())
        throw ConfigError("empty complex number");
    static const std::regex pair(R"(^([^,]+),([^,]+)$)");
    static const std::regex real(R"(^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$)");
    static const std::regex imag(R"(^([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?\*?[ij]$|^[+-][ij]$)");
    static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)\*?[ij]$)");
    std::smatch m;
    auto imag_part = [](std::string t) {
        while (!t.empty() && (t.back() == 'i' || t.back() == 'j' || t.back() == '*'))
            t.pop_back();
        if (t.empty() || t == "+")
            return 1.0;
        if (t == "-")
            return -1.0;
        return std::stod(t);
    };
    if (std::regex_match(s, m, pair))
        return {std::stod(m[1]), std::stod(m[2])};
    if (std::regex_match(s, real))
        return {std::stod(s), 0.0};
    if (std::regex_match(s, imag))
        return {0.0, imag_part(s)};
    if (std::regex_match(s, m, full))
        return {std::stod(m[1]), imag_part(m[2])};
    throw ConfigError("cannot parse complex number '" + text + "'");
}

inline Preset parse_preset(const std::string& spec)
{
    Preset p;
    p.name = spec;
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto integer = [&](const std::string& s) {
        char* end = nullptr;
        long v = std::strtol(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0' || v < 1 || v > 64)
            throw ConfigError("bad degree in preset '" + spec + "'");
        return static_cast<int>(v);
    };
    if (head == "power") {
        p.kind = Preset::Kind::power;
        p.degree = integer(arg);
        if (p.degree < 2)
            throw ConfigError("power preset needs degree >= 2");
    } else if (head == "chebyshev") {
        p.kind = Preset::Kind::chebyshev;
        p.degree = integer(arg);
        if (p.degree < 2)
            throw ConfigError("chebyshev preset needs degree >= 2");
    } else if (head == "quadratic") {
        p.kind = Preset::Kind::quadratic;
        p.degree = 2;
        p.c = parse_complex(arg);
    } else if (head == "lattes4" && arg.empty()) {
        p.kind = Preset::Kind::lattes;
        p.degree = 4;
    } else {
        throw UnknownPreset("unknown preset '" + spec + "'");
    }
    return p;
}

/// Ascending coefficients of 2 T_d(z/2).
inline std::vector<double> chebyshev_coefficients(int d)
{
    std::vector<double> prev{2.0}, cur{0.0, 1.0};
    if (d == 0)
        return prev;
    for (int n = 1; n < d; ++n) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i)
            next[i + 1] += cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i)
            next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Numerator and denominator coefficient lists of a preset.
inline std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>> preset_coefficients(const Preset& p)
{
    using C = std::complex<double>;
    std::vector<C> num(p.degree + 1), den(p.degree + 1);
    switch (p.kind) {
    case Preset::Kind::power:
        num[p.degree] = 1.0;
        den[0] = 1.0;
        break;
    case Preset::Kind::chebyshev: {
        auto t = chebyshev_coefficients(p.degree);
        for (int i = 0; i <= p.degree; ++i)
            num[i] = t[i];
        den[0] = 1.0;
        break;
    }
    case Preset::Kind::quadratic:
        num = {p.c, 0.0, 1.0};
        den = {1.0, 0.0, 0.0};
        break;
    case Preset::Kind::lattes:
        num = {1.0, 0.0, 2.0, 0.0, 1.0};
        den = {0.0, -4.0, 0.0, 4.0, 0.0};
        break;
    }
    return {num, den};
}

template <class Real = double>
RationalMap<Real> make_map(const Preset& p)
{
    auto [num, den] = preset_coefficients(p);
    std::vector<Complex<Real>> n, d;
    for (const auto& c : num)
        n.push_back(complex_cast<Real>(c));
    for (const auto& c : den)
        d.push_back(complex_cast<Real>(c));
    return RationalMap<Real>::build(std::move(n), std::move(d));
}

inline RationalMap<double> make_map(const std::string& preset) { return make_map<double>(parse_preset(preset)); }

/// Target parsing: a complex number or "inf".
inline ProjectivePoint<double> parse_point(const std::string& text)
{
    if (text == "inf" || text == "infinity" || text == "oo")
        return ProjectivePoint<double>::infinity();
    return ProjectivePoint<double>::affine(parse_complex(text));
}

} // namespace lyap
