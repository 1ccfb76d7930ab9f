#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace lyap {

namespace mp = boost::multiprecision;

// Extended working precisions. The bit count is the mantissa width.
using Float128 = mp::number<mp::cpp_bin_float<128, mp::digit_base_2>, mp::et_off>;
using Float256 = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
constexpr int precision_bits()
{
    return std::numeric_limits<Real>::digits;
}

template <class Real>
Real machine_epsilon()
{
    return std::numeric_limits<Real>::epsilon();
}

template <class Real>
double to_double(const Real& x)
{
    return static_cast<double>(x);
}

template <class To, class From>
Complex<To> complex_cast(const Complex<From>& z)
{
    return Complex<To>(To(z.real()), To(z.imag()));
}

template <class Real>
Real norm2(const Complex<Real>& z)
{
    return z.real() * z.real() + z.imag() * z.imag();
}

template <class Real>
Real modulus(const Complex<Real>& z)
{
    using std::abs;
    return abs(z);
}

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateMap : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class RootFindingFailure : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class TargetRejected : public Error {
public:
    using Error::Error;
};

class UnknownPreset : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------

/// Pairwise (cascade) summation in index order. The grouping only depends on
/// the length, so the result is reproducible for a fixed input order.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.empty())
        return 0.0;
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// splitmix64 finalizer, used to derive independent per-path seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0,1) built from the top 53 bits, so the stream is the
/// same on every standard library.
template <class Engine>
double uniform01(Engine& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace lyap
