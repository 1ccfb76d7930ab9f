#pragma once

#include <sstream>
#include <variant>

#include "numeric.hpp"

namespace lyap {

/// Archimedean backend: complex numbers at a given working precision.
struct Archimedean {
    int precision_bits = 53;
};

/// Non-archimedean backend: rationals with the p-adic absolute value.
struct NonArchimedean {
    unsigned long prime = 2;
};

using ValuedField = std::variant<Archimedean, NonArchimedean>;

inline bool is_prime(unsigned long n)
{
    if (n < 2)
        return false;
    for (unsigned long q = 2; q * q <= n; ++q)
        if (n % q == 0)
            return false;
    return true;
}

inline void validate(const ValuedField& field)
{
    if (const auto* na = std::get_if<NonArchimedean>(&field)) {
        if (!is_prime(na->prime))
            throw ConfigError("non-archimedean backend needs a prime, got " + std::to_string(na->prime));
    } else {
        int bits = std::get<Archimedean>(field).precision_bits;
        if (bits < 24 || bits > 256)
            throw ConfigError("precision must be between 24 and 256 bits");
    }
}

/// A point of the complex projective line in homogeneous coordinates.
///
/// Representatives are kept with unit Euclidean norm and the phase fixed so
/// that the coordinate of larger modulus is real and positive. Infinity is
/// (1, 0).
template <class Real>
class ProjectivePoint {
public:
    using real_type = Real;
    using complex_type = Complex<Real>;

    ProjectivePoint() : x_(0), y_(1) {}

    ProjectivePoint(complex_type x, complex_type y)
    {
        using std::sqrt;
        Real scale = std::max(modulus(x), modulus(y));
        if (!(scale > 0))
            throw Error("projective point with both coordinates zero");
        x /= scale;
        y /= scale;
        Real nx = norm2(x);
        Real ny = norm2(y);
        Real n = sqrt(nx + ny);
        complex_type pivot = nx >= ny ? x : y;
        complex_type phase = std::conj(pivot) / modulus(pivot);
        x_ = x * phase / n;
        y_ = y * phase / n;
    }

    static ProjectivePoint affine(complex_type z) { return ProjectivePoint(z, complex_type(1)); }
    static ProjectivePoint affine(Real re, Real im = Real(0)) { return affine(complex_type(re, im)); }
    static ProjectivePoint infinity() { return ProjectivePoint(complex_type(1), complex_type(0)); }

    const complex_type& x() const { return x_; }
    const complex_type& y() const { return y_; }

    bool is_infinity() const { return y_ == complex_type(0); }

    /// Affine coordinate x/y; infinite for the point at infinity.
    complex_type value() const
    {
        if (is_infinity())
            return complex_type(std::numeric_limits<Real>::infinity(), Real(0));
        return x_ / y_;
    }

    template <class Other>
    ProjectivePoint<Other> cast() const
    {
        return ProjectivePoint<Other>(complex_cast<Other>(x_), complex_cast<Other>(y_));
    }

private:
    complex_type x_;
    complex_type y_;
};

/// Normalized chordal distance, [0, inf] = 1.
template <class Real>
Real chordal_dist(const ProjectivePoint<Real>& z, const ProjectivePoint<Real>& w)
{
    Real d = modulus(z.x() * w.y() - w.x() * z.y());
    return d > Real(1) ? Real(1) : d;
}

/// Chordal distance from unnormalized homogeneous pairs.
template <class Real>
Real chordal_dist(const Complex<Real>& x1, const Complex<Real>& y1, const Complex<Real>& x2, const Complex<Real>& y2)
{
    using std::sqrt;
    Real d = modulus(x1 * y2 - x2 * y1) / sqrt((norm2(x1) + norm2(y1)) * (norm2(x2) + norm2(y2)));
    return d > Real(1) ? Real(1) : d;
}

/// Short text form "re+imi" or "inf".
template <class Real>
std::string describe_point(const ProjectivePoint<Real>& p)
{
    if (p.is_infinity())
        return "inf";
    std::ostringstream s;
    auto v = p.value();
    double re = to_double(v.real()), im = to_double(v.imag());
    s << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
    return s.str();
}

} // namespace lyap
