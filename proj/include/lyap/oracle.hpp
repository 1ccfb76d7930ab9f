#pragma once

#include "mapspec.hpp"
#include "preimage.hpp"

namespace lyap {

enum class OracleMethod { closed_form, green_formula, birkhoff_mc };

inline const char* to_string(OracleMethod m)
{
    switch (m) {
    case OracleMethod::closed_form: return "closed_form";
    case OracleMethod::green_formula: return "green_formula";
    case OracleMethod::birkhoff_mc: return "birkhoff_mc";
    }
    return "?";
}

struct OracleResult {
    double value = 0.0;
    OracleMethod method = OracleMethod::closed_form;
    double uncertainty = 0.0;
    std::string note;
};

struct GreenOptions {
    int budget = 200;
};

struct GreenValue {
    double value = 0.0;
    double uncertainty = 0.0;
    int iterations = 0;
    bool escaped = false;
};

/// Affine coefficients a_0..a_d of a polynomial map.
inline std::vector<std::complex<double>> polynomial_coefficients(const RationalMap<double>& f)
{
    if (!f.is_polynomial())
        throw Error("the Green function needs a polynomial map");
    std::vector<std::complex<double>> a(f.num().size());
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = f.num()[i] / f.den()[0];
    return a;
}

/// Escape rate G(z) = lim d^{-n} log+|f^n(z)| for a polynomial.
///
/// Once the orbit leaves the disk of radius R = 1 + max(1, sum_{i<d} |a_i|/|a_d|)
/// it is pushed on to |w| ~ 1e30, where (log|w| + log|a_d|/(d-1)) / d^n is
/// accurate to O(R/|w|) / d^n.
inline GreenValue green_value(const RationalMap<double>& f, const std::complex<double>& z, const GreenOptions& opts = {})
{
    const auto a = polynomial_coefficients(f);
    const int d = f.degree();
    const double ad = std::abs(a[d]);
    double tail = 0.0;
    for (int i = 0; i < d; ++i)
        tail += std::abs(a[i]);
    const double R = 1.0 + std::max(1.0, tail / ad);
    const double shift = std::log(ad) / (d - 1);
    auto step = [&](std::complex<double> w) {
        std::complex<double> v = a[d];
        for (int i = d - 1; i >= 0; --i)
            v = v * w + a[i];
        return v;
    };

    GreenValue g;
    std::complex<double> w = z;
    double dn = 1.0;
    for (int n = 0; n <= opts.budget; ++n) {
        if (std::abs(w) > R) {
            while (n < opts.budget && std::abs(w) < 1e30 && d * std::log10(std::abs(w)) + std::log10(ad) < 300) {
                w = step(w);
                dn *= d;
                ++n;
            }
            g.escaped = true;
            g.iterations = n;
            g.value = std::max(0.0, (std::log(std::abs(w)) + shift) / dn);
            g.uncertainty = (4.0 * R / std::abs(w)) / dn + 4.0 * std::numeric_limits<double>::epsilon() * g.value;
            return g;
        }
        if (n == opts.budget)
            break;
        w = step(w);
        dn *= d;
    }
    g.iterations = opts.budget;
    g.value = 0.0;
    g.uncertainty = std::log(R) / dn;
    return g;
}

inline double green_function(const RationalMap<double>& f, const ProjectivePoint<double>& z, const GreenOptions& opts = {})
{
    if (z.is_infinity())
        return std::numeric_limits<double>::infinity();
    return green_value(f, z.value(), opts).value;
}

/// L = log d + sum of G over the finite critical points.
inline OracleResult lyapunov_green(const RationalMap<double>& f, const GreenOptions& opts = {}, const SolverOptions& solver = {})
{
    polynomial_coefficients(f);
    OracleResult r;
    r.method = OracleMethod::green_formula;
    r.value = std::log(static_cast<double>(f.degree()));
    for (const auto& c : critical_points(f, solver).points) {
        if (c.point.is_infinity())
            continue;
        auto g = green_value(f, c.point.value(), opts);
        r.value += c.multiplicity * g.value;
        r.uncertainty += c.multiplicity * g.uncertainty;
    }
    return r;
}

struct BirkhoffOptions {
    int burn_in = 30;
    int samples = 10000;
    std::uint64_t seed = 0;
    bool force = false;
    ScanOptions scan;
    SolverOptions solver;
};

/// Mean of log f^# over the endpoints of independent backward orbits from a.
inline OracleResult lyapunov_birkhoff(const RationalMap<double>& f, const ProjectivePoint<double>& a, const BirkhoffOptions& opts = {})
{
    PreimageOptions popts;
    popts.force = opts.force;
    popts.scan = opts.scan;
    std::vector<std::string> warnings;
    detail::screen_target(f, a, popts, warnings);
    if (opts.samples < 2)
        throw ConfigError("Birkhoff average needs at least two samples");

    std::vector<double> v;
    v.reserve(opts.samples);
    int failed = 0;
    for (int s = 0; s < opts.samples; ++s) {
        auto path = backward_orbit_sample(f, a, opts.burn_in, opts.seed, static_cast<std::uint64_t>(s), opts.solver);
        if (path.failed) {
            ++failed;
            continue;
        }
        v.push_back(detail::log_fsharp(f, path.points.back()));
    }
    OracleResult r;
    r.method = OracleMethod::birkhoff_mc;
    if (v.size() < 2)
        throw RootFindingFailure("every backward path failed");
    double mean = pairwise_sum(v) / v.size();
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        sq[i] = (v[i] - mean) * (v[i] - mean);
    r.value = mean;
    r.uncertainty = std::sqrt(pairwise_sum(sq) / (v.size() - 1) / v.size());
    if (failed > 0)
        r.note = std::to_string(failed) + " paths failed and were dropped";
    for (const auto& w : warnings)
        r.note += (r.note.empty() ? "" : "; ") + w;
    return r;
}

/// p-adic valuation of a nonzero integer.
inline int valuation(long n, long p)
{
    if (n == 0)
        throw Error("valuation of zero");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

/// Exact exponents of the power and Chebyshev families.
inline OracleResult closed_form(const Preset& preset, const ValuedField& field = Archimedean{})
{
    OracleResult r;
    r.method = OracleMethod::closed_form;
    const double d = preset.degree;
    if (std::holds_alternative<Archimedean>(field)) {
        if (preset.kind == Preset::Kind::power || preset.kind == Preset::Kind::chebyshev) {
            r.value = std::log(d);
            return r;
        }
        throw UnknownPreset("no closed form for preset '" + preset.name + "'");
    }
    const long p = static_cast<long>(std::get<NonArchimedean>(field).prime);
    if (preset.kind != Preset::Kind::power)
        throw UnknownPreset("no non-archimedean closed form for preset '" + preset.name + "'");
    int v = valuation(preset.degree, p);
    r.value = v == 0 ? 0.0 : -v * std::log(static_cast<double>(p));
    if (v > 0)
        r.note = "p divides d: the exponent is negative and positivity of L(f) fails (residue characteristic divides the degree)";
    return r;
}

inline OracleResult closed_form(const std::string& preset, const ValuedField& field = Archimedean{})
{
    return closed_form(parse_preset(preset), field);
}

} // namespace lyap
