#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "algebra.hpp"
#include "geometry.hpp"

namespace lyap::padic {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// An exact value p^{-v} of the p-adic absolute value; v = none means 0.
class PNorm {
public:
    static constexpr long none = std::numeric_limits<long>::max();

    PNorm() = default;
    PNorm(unsigned long p, long v) : p_(p), v_(v) {}

    static PNorm zero(unsigned long p) { return {p, none}; }
    static PNorm one(unsigned long p) { return {p, 0}; }

    unsigned long prime() const { return p_; }
    long exponent() const { return v_; }
    bool is_zero() const { return v_ == none; }

    double value() const { return is_zero() ? 0.0 : std::pow(static_cast<double>(p_), -static_cast<double>(v_)); }
    double log() const
    {
        return is_zero() ? -std::numeric_limits<double>::infinity() : -static_cast<double>(v_) * std::log(static_cast<double>(p_));
    }

    friend PNorm operator*(const PNorm& a, const PNorm& b)
    {
        if (a.is_zero() || b.is_zero())
            return zero(a.p_);
        return {a.p_, a.v_ + b.v_};
    }
    friend PNorm operator/(const PNorm& a, const PNorm& b)
    {
        if (b.is_zero())
            throw Error("division by a zero p-adic norm");
        if (a.is_zero())
            return a;
        return {a.p_, a.v_ - b.v_};
    }
    friend bool operator==(const PNorm& a, const PNorm& b) { return a.v_ == b.v_; }
    friend bool operator<(const PNorm& a, const PNorm& b) { return a.v_ > b.v_; }
    friend bool operator<=(const PNorm& a, const PNorm& b) { return a.v_ >= b.v_; }
    friend bool operator>(const PNorm& a, const PNorm& b) { return b < a; }
    friend bool operator>=(const PNorm& a, const PNorm& b) { return b <= a; }

private:
    unsigned long p_ = 2;
    long v_ = none;
};

inline PNorm max(const PNorm& a, const PNorm& b) { return a < b ? b : a; }

inline long valuation(Integer n, unsigned long p)
{
    if (n == 0)
        return PNorm::none;
    long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline long valuation(const Rational& x, unsigned long p)
{
    if (x == 0)
        return PNorm::none;
    return valuation(Integer(numerator(x)), p) - valuation(Integer(denominator(x)), p);
}

inline PNorm norm(const Rational& x, unsigned long p) { return {p, valuation(x, p)}; }

/// A rational number viewed in Q_p.
struct PAdicRational {
    Rational value;
    unsigned long prime = 2;

    long valuation() const { return padic::valuation(value, prime); }
    PNorm abs() const { return norm(value, prime); }
};

/// Parses "n", "n/m" or "-n/m".
inline Rational parse_rational(const std::string& text)
{
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos)
            return Rational(Integer(text));
        Integer den(text.substr(slash + 1));
        if (den == 0)
            throw ConfigError("zero denominator in '" + text + "'");
        return Rational(Integer(text.substr(0, slash)), den);
    } catch (const std::runtime_error&) {
        throw ConfigError("cannot parse rational '" + text + "'");
    }
}

inline std::string to_string(const Rational& x)
{
    if (denominator(x) == 1)
        return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

/// Closed disk {z : |z - a| <= r}; r = 0 is the classical point a.
struct Disk {
    Rational center;
    PNorm radius;

    static Disk point(const Rational& a, unsigned long p) { return {a, PNorm::zero(p)}; }
    static Disk gauss(unsigned long p) { return {Rational(0), PNorm::one(p)}; }

    unsigned long prime() const { return radius.prime(); }
    PNorm diam() const { return radius; }
    /// sup-norm |S| = max(|a|, r)
    PNorm size() const { return max(norm(center, prime()), radius); }

    friend bool operator==(const Disk& a, const Disk& b)
    {
        return a.radius == b.radius && norm(a.center - b.center, a.prime()) <= a.radius;
    }
};

inline PNorm radius_of(unsigned long p, long exponent) { return {p, exponent}; }

/// Smallest disk containing both.
inline Disk join_disks(const Disk& s, const Disk& t)
{
    if (s.prime() != t.prime())
        throw Error("disks over different primes");
    PNorm r = max(max(s.radius, t.radius), norm(s.center - t.center, s.prime()));
    return {s.center, r};
}

/// [S, S']_can = diam(S v S') / (max(1,|S|) max(1,|S'|)), exactly.
inline PNorm hsia_kernel(const Disk& s, const Disk& t)
{
    const unsigned long p = s.prime();
    auto one = PNorm::one(p);
    return join_disks(s, t).diam() / (max(one, s.size()) * max(one, t.size()));
}

/// A point of P^1(Q) as a homogeneous pair; (1, 0) is infinity.
struct Point {
    Rational x;
    Rational y{1};

    static Point affine(const Rational& z) { return {z, Rational(1)}; }
    static Point infinity() { return {Rational(1), Rational(0)}; }
};

/// Non-archimedean chordal distance |x1 y2 - x2 y1| / (||(x1,y1)|| ||(x2,y2)||).
inline PNorm chordal_dist(const Point& a, const Point& b, unsigned long p)
{
    auto ha = max(norm(a.x, p), norm(a.y, p));
    auto hb = max(norm(b.x, p), norm(b.y, p));
    return norm(a.x * b.y - b.x * a.y, p) / (ha * hb);
}

/// A rational map over Q by ascending coefficients of x^i y^(d-i).
struct QMap {
    std::vector<Rational> num;
    std::vector<Rational> den;

    int degree() const { return static_cast<int>(num.size()) - 1; }

    Rational resultant() const
    {
        return determinant(sylvester_matrix(num, den), [](const Rational& r) { return r == 0 ? 0 : 1; });
    }
};

inline QMap make_qmap(std::vector<Rational> num, std::vector<Rational> den)
{
    if (num.size() != den.size() || num.size() < 2)
        throw Error("numerator and denominator need the same number (>= 2) of coefficients");
    return {std::move(num), std::move(den)};
}

/// Scales the coefficients by a power of p so the smallest valuation is 0.
inline QMap normalize(const QMap& f, unsigned long p)
{
    long vmin = PNorm::none;
    for (const auto* side : {&f.num, &f.den})
        for (const auto& c : *side)
            vmin = std::min(vmin, valuation(c, p));
    if (vmin == PNorm::none)
        throw DegenerateMap("all coefficients vanish");
    Rational scale(1);
    Integer pp(p);
    for (long i = 0; i < std::abs(vmin); ++i)
        scale *= Rational(pp);
    QMap g = f;
    for (auto* side : {&g.num, &g.den})
        for (auto& c : *side)
            c = vmin > 0 ? Rational(c / scale) : Rational(c * scale);
    return g;
}

/// Good reduction: |Res(P, Q)|_p = 1 once the content is 1.
inline bool good_reduction_test(const QMap& f, unsigned long p)
{
    auto g = normalize(f, p);
    Rational res = g.resultant();
    return res != 0 && valuation(res, p) == 0;
}

namespace detail {

inline Rational horner(const std::vector<Rational>& c, const Rational& z)
{
    Rational v(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * z + *it;
    return v;
}

inline std::vector<Rational> derivative(const std::vector<Rational>& c)
{
    std::vector<Rational> out(c.size() > 1 ? c.size() - 1 : 1, Rational(0));
    for (std::size_t i = 1; i < c.size(); ++i)
        out[i - 1] = Rational(static_cast<long>(i)) * c[i];
    return out;
}

} // namespace detail

/// f^#(z) = |p'q - pq'|(z) max(1,|z|)^2 / max(|p(z)|,|q(z)|)^2, exactly.
/// The homogeneous pair (p, q) is used as is, so poles need no special case.
inline PNorm padic_chordal_derivative(const QMap& f, const PAdicRational& z)
{
    const unsigned long p = z.prime;
    Rational pv = detail::horner(f.num, z.value);
    Rational qv = detail::horner(f.den, z.value);
    Rational w = detail::horner(detail::derivative(f.num), z.value) * qv - pv * detail::horner(detail::derivative(f.den), z.value);
    PNorm h = max(PNorm::one(p), z.abs());
    PNorm fh = max(norm(pv, p), norm(qv, p));
    if (fh.is_zero())
        throw DegenerateMap("numerator and denominator vanish together");
    return norm(w, p) * h * h / (fh * fh);
}

} // namespace lyap::padic
