#pragma once

#include <optional>
#include <string>

#include "algebra.hpp"
#include "geometry.hpp"
#include "roots.hpp"

namespace lyap {

/// A rational map of the projective line, F(x, y) = (P(x, y), Q(x, y)) with
/// P = sum p_i x^i y^(d-i) and Q likewise. Coefficients are ascending in the
/// affine variable z = x/y.
template <class Real>
class RationalMap {
public:
    using real_type = Real;
    using complex_type = Complex<Real>;
    using Coeffs = std::vector<complex_type>;

    /// Values and first partials of P and Q at a homogeneous pair.
    struct Jet {
        complex_type p, q, px, py, qx, qy;
        complex_type jacobian() const { return px * qy - py * qx; }
    };

    RationalMap() = default;

    /// Validated construction; see build_map().
    static RationalMap build(Coeffs num, Coeffs den)
    {
        if (num.size() != den.size() || num.empty())
            throw Error("numerator and denominator need the same number of coefficients");
        while (num.size() > 1 && num.back() == complex_type(0) && den.back() == complex_type(0)) {
            num.pop_back();
            den.pop_back();
        }
        int d = static_cast<int>(num.size()) - 1;
        if (d < 1)
            throw DegenerateMap("constant map");
        RationalMap f(std::move(num), std::move(den));
        complex_type res = f.resultant();
        Real scale(0);
        for (const auto& c : f.num_)
            scale = std::max(scale, modulus(c));
        for (const auto& c : f.den_)
            scale = std::max(scale, modulus(c));
        using std::pow;
        Real threshold = Real(1e-12) * pow(scale, 2 * d);
        if (!(modulus(res) >= threshold))
            throw DegenerateMap("numerator and denominator share a root (resultant below tolerance)");
        f.resultant_ = res;
        return f;
    }

    /// Unchecked construction for maps known to be valid (compositions).
    static RationalMap unchecked(Coeffs num, Coeffs den) { return RationalMap(std::move(num), std::move(den)); }

    int degree() const { return degree_; }
    const Coeffs& num() const { return num_; }
    const Coeffs& den() const { return den_; }

    /// Homogeneous resultant Res(P, Q), cached after validated construction.
    complex_type resultant() const
    {
        if (resultant_)
            return *resultant_;
        return determinant(sylvester_matrix(num_, den_), [](const complex_type& z) { return modulus(z); });
    }

    bool is_polynomial() const
    {
        if (den_[0] == complex_type(0))
            return false;
        for (std::size_t i = 1; i < den_.size(); ++i)
            if (den_[i] != complex_type(0))
                return false;
        return true;
    }

    Jet jet(const complex_type& x, const complex_type& y) const
    {
        const int d = degree_;
        std::vector<complex_type> xp(d + 1), yp(d + 1);
        xp[0] = yp[0] = complex_type(1);
        for (int i = 1; i <= d; ++i) {
            xp[i] = xp[i - 1] * x;
            yp[i] = yp[i - 1] * y;
        }
        Jet j{};
        for (int i = 0; i <= d; ++i) {
            complex_type mono = xp[i] * yp[d - i];
            j.p += num_[i] * mono;
            j.q += den_[i] * mono;
            if (i > 0) {
                complex_type m = Real(i) * xp[i - 1] * yp[d - i];
                j.px += num_[i] * m;
                j.qx += den_[i] * m;
            }
            if (i < d) {
                complex_type m = Real(d - i) * xp[i] * yp[d - i - 1];
                j.py += num_[i] * m;
                j.qy += den_[i] * m;
            }
        }
        return j;
    }

    /// The action on the projective line.
    ProjectivePoint<Real> operator()(const ProjectivePoint<Real>& z) const
    {
        Jet j = jet(z.x(), z.y());
        return ProjectivePoint<Real>(j.p, j.q);
    }

    ProjectivePoint<Real> iterate(ProjectivePoint<Real> z, int n) const
    {
        for (int i = 0; i < n; ++i)
            z = (*this)(z);
        return z;
    }

    template <class Other>
    RationalMap<Other> cast() const
    {
        typename RationalMap<Other>::Coeffs n, d;
        for (const auto& c : num_)
            n.push_back(complex_cast<Other>(c));
        for (const auto& c : den_)
            d.push_back(complex_cast<Other>(c));
        return RationalMap<Other>::unchecked(std::move(n), std::move(d));
    }

private:
    RationalMap(Coeffs num, Coeffs den) : num_(std::move(num)), den_(std::move(den))
    {
        degree_ = static_cast<int>(num_.size()) - 1;
    }

    Coeffs num_;
    Coeffs den_;
    int degree_ = 0;
    std::optional<complex_type> resultant_;
};

/// Validated map from ascending coefficient lists; throws DegenerateMap when
/// the resultant vanishes relative to the coefficient scale.
template <class Real>
RationalMap<Real> build_map(std::vector<Complex<Real>> num, std::vector<Complex<Real>> den)
{
    return RationalMap<Real>::build(std::move(num), std::move(den));
}

template <class Real>
ProjectivePoint<Real> evaluate(const RationalMap<Real>& f, const ProjectivePoint<Real>& z)
{
    return f(z);
}

/// Chordal derivative f^#(z), from the homogeneous Jacobian:
/// f^# = |det DF| / d * |(x,y)|^2 / |F(x,y)|^2. This equals
/// |f'(z)| (1+|z|^2) / (1+|f(z)|^2) in the affine chart and needs no chart
/// change at infinity or at poles.
template <class Real>
Real chordal_derivative(const RationalMap<Real>& f, const ProjectivePoint<Real>& z)
{
    auto j = f.jet(z.x(), z.y());
    Real nz = norm2(z.x()) + norm2(z.y());
    Real nf = norm2(j.p) + norm2(j.q);
    return modulus(j.jacobian()) / Real(f.degree()) * nz / nf;
}

/// Affine derivative f'(z) at a finite non-pole z, from the coefficients.
template <class Real>
Complex<Real> affine_derivative(const RationalMap<Real>& f, const Complex<Real>& z)
{
    auto horner = [&](const auto& c, bool deriv) {
        Complex<Real> v(0);
        for (std::size_t i = c.size(); i-- > (deriv ? 1u : 0u);)
            v = v * z + (deriv ? Real(i) * c[i] : c[i]);
        return v;
    };
    Complex<Real> p = horner(f.num(), false), dp = horner(f.num(), true);
    Complex<Real> q = horner(f.den(), false), dq = horner(f.den(), true);
    return (dp * q - p * dq) / (q * q);
}

/// f o g at the coefficient level, renormalized to unit max-norm.
template <class Real>
RationalMap<Real> compose(const RationalMap<Real>& f, const RationalMap<Real>& g)
{
    using C = Complex<Real>;
    const int d = f.degree();
    std::vector<std::vector<C>> gp(d + 1), gq(d + 1);
    gp[0] = gq[0] = {C(1)};
    for (int i = 1; i <= d; ++i) {
        gp[i] = poly_mul(gp[i - 1], g.num());
        gq[i] = poly_mul(gq[i - 1], g.den());
    }
    const std::size_t len = static_cast<std::size_t>(d) * g.degree() + 1;
    std::vector<C> num(len, C(0)), den(len, C(0));
    for (int i = 0; i <= d; ++i) {
        if (f.num()[i] == C(0) && f.den()[i] == C(0))
            continue;
        auto term = poly_mul(gp[i], gq[d - i]);
        for (std::size_t t = 0; t < term.size(); ++t) {
            num[t] += f.num()[i] * term[t];
            den[t] += f.den()[i] * term[t];
        }
    }
    Real scale(0);
    for (std::size_t t = 0; t < len; ++t)
        scale = std::max(scale, std::max(modulus(num[t]), modulus(den[t])));
    for (std::size_t t = 0; t < len; ++t) {
        num[t] /= scale;
        den[t] /= scale;
    }
    return RationalMap<Real>::unchecked(std::move(num), std::move(den));
}

inline constexpr long default_degree_budget = 1L << 16;

/// d^k, or -1 when it exceeds `budget`.
inline long checked_power(long d, int k, long budget)
{
    long v = 1;
    for (int i = 0; i < k; ++i) {
        if (v > budget / d)
            return -1;
        v *= d;
    }
    return v > budget ? -1 : v;
}

/// The k-th iterate f^k as a coefficient-level map of degree d^k.
template <class Real>
RationalMap<Real> iterate_map(const RationalMap<Real>& f, int k, long max_degree = default_degree_budget)
{
    if (k < 1)
        throw Error("iterate_map needs k >= 1");
    if (checked_power(f.degree(), k, max_degree) < 0)
        throw BudgetExceeded("degree " + std::to_string(f.degree()) + "^" + std::to_string(k) + " exceeds the degree budget");
    RationalMap<Real> g = f;
    for (int i = 1; i < k; ++i)
        g = compose(f, g);
    return g;
}

/// Coefficients of y_a P - x_a Q, whose roots are f^{-1}(a).
template <class Real>
std::vector<Complex<Real>> fiber_coefficients(const RationalMap<Real>& f, const ProjectivePoint<Real>& a)
{
    std::vector<Complex<Real>> c(f.num().size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = a.y() * f.num()[i] - a.x() * f.den()[i];
    return c;
}

/// Solutions of f(z) = a with multiplicity (total d).
template <class Real>
RootSet<Real> fiber(const RationalMap<Real>& f, const ProjectivePoint<Real>& a, const SolverOptions& opts = {})
{
    return solve<Real>(fiber_coefficients(f, a), opts);
}

// ---------------------------------------------------------------------------
// Critical points

enum class OrbitClass { preperiodic, wandering, undetermined };

inline const char* to_string(OrbitClass c)
{
    switch (c) {
    case OrbitClass::preperiodic: return "preperiodic";
    case OrbitClass::wandering: return "wandering";
    case OrbitClass::undetermined: return "undetermined";
    }
    return "?";
}

template <class Real>
struct CriticalPoint {
    ProjectivePoint<Real> point;
    int multiplicity = 1;
    OrbitClass orbit = OrbitClass::undetermined;
    int horizon = 0;
    int preperiod = -1;  // set for preperiodic and undetermined-with-cycle
    int period = -1;
};

template <class Real>
struct CriticalSet {
    std::vector<CriticalPoint<Real>> points;

    int total_multiplicity() const
    {
        int m = 0;
        for (const auto& c : points)
            m += c.multiplicity;
        return m;
    }
};

/// Ascending coefficients of P'Q - PQ' as a form of degree 2d-2.
template <class Real>
std::vector<Complex<Real>> wronskian_coefficients(const RationalMap<Real>& f)
{
    using C = Complex<Real>;
    const int d = f.degree();
    auto deriv = [](const std::vector<C>& a) {
        std::vector<C> out(a.size() > 1 ? a.size() - 1 : 1, C(0));
        for (std::size_t i = 1; i < a.size(); ++i)
            out[i - 1] = Real(i) * a[i];
        return out;
    };
    auto a = poly_mul(deriv(f.num()), f.den());
    auto b = poly_mul(f.num(), deriv(f.den()));
    std::vector<C> w(2 * d - 1, C(0));
    for (std::size_t i = 0; i < w.size(); ++i) {
        C ai = i < a.size() ? a[i] : C(0);
        C bi = i < b.size() ? b[i] : C(0);
        w[i] = ai - bi;
    }
    return w;
}

/// The critical set: roots of the Wronskian with multiplicity (total 2d-2).
template <class Real>
CriticalSet<Real> critical_points(const RationalMap<Real>& f, const SolverOptions& opts = {})
{
    if (f.degree() < 2)
        throw Error("critical points need degree > 1");
    auto roots = solve<Real>(wronskian_coefficients(f), opts);
    CriticalSet<Real> out;
    for (const auto& r : roots.roots) {
        Real fs = chordal_derivative(f, r.point);
        if (!(fs <= Real(1e-6)))
            throw RootFindingFailure("critical point with chordal derivative " + std::to_string(to_double(fs)));
        CriticalPoint<Real> c;
        c.point = r.point;
        c.multiplicity = r.multiplicity;
        out.points.push_back(c);
    }
    return out;
}

struct OrbitOptions {
    int horizon = 1000;
    double tolerance = 1e-9;
    /// A landing on a cycle counts as exact when the last tail point is at
    /// least this far from the cycle; closer tails mean convergence.
    double separation = 1e-3;
};

/// Forward orbit z, f(z), ..., f^n(z).
template <class Real>
std::vector<ProjectivePoint<Real>> forward_orbit(const RationalMap<Real>& f, const ProjectivePoint<Real>& z, int n)
{
    std::vector<ProjectivePoint<Real>> orbit;
    orbit.reserve(n + 1);
    orbit.push_back(z);
    for (int j = 0; j < n; ++j)
        orbit.push_back(f(orbit.back()));
    return orbit;
}

/// Labels each critical point from its forward orbit up to the horizon:
/// preperiodic when the orbit lands on an earlier orbit point, wandering when
/// no two orbit points come within the tolerance, undetermined when the orbit
/// only converges to a cycle.
template <class Real>
CriticalSet<Real> classify_critical_orbits(const RationalMap<Real>& f, CriticalSet<Real> set, const OrbitOptions& opts = {})
{
    const Real tol(opts.tolerance);
    for (auto& c : set.points) {
        c.horizon = opts.horizon;
        auto orbit = forward_orbit(f, c.point, opts.horizon);
        int first = -1, second = -1;
        for (int j = 1; j <= opts.horizon && first < 0; ++j)
            for (int i = 0; i < j; ++i)
                if (chordal_dist(orbit[j], orbit[i]) <= tol) {
                    first = i;
                    second = j;
                    break;
                }
        if (first < 0) {
            c.orbit = OrbitClass::wandering;
            continue;
        }
        c.preperiod = first;
        c.period = second - first;
        bool exact = first == 0 || chordal_dist(orbit[first - 1], orbit[second - 1]) > Real(opts.separation);
        // the cycle must also repeat for one more period
        for (int m = 1; exact && m <= c.period && second + m <= opts.horizon; ++m)
            if (chordal_dist(orbit[second + m], orbit[first + m]) > tol)
                exact = false;
        c.orbit = exact ? OrbitClass::preperiodic : OrbitClass::undetermined;
    }
    return set;
}

/// Classical exceptional points: e with f^{-2}(e) = {e}.
template <class Real>
std::vector<ProjectivePoint<Real>> exceptional_points(const RationalMap<Real>& f, const SolverOptions& opts = {},
                                                      double tolerance = 1e-6)
{
    using C = Complex<Real>;
    auto f2 = compose(f, f);
    std::vector<C> fix(f2.num().size() + 1, C(0));
    for (std::size_t i = 0; i < f2.num().size(); ++i) {
        fix[i] += f2.num()[i];
        fix[i + 1] -= f2.den()[i];
    }
    auto candidates = solve<Real>(fix, opts);
    auto single = [&](const ProjectivePoint<Real>& a) -> std::optional<ProjectivePoint<Real>> {
        auto pre = fiber(f, a, opts);
        const auto& p0 = pre.roots.front().point;
        for (const auto& r : pre.roots)
            if (chordal_dist(r.point, p0) > Real(tolerance))
                return std::nullopt;
        return p0;
    };
    std::vector<ProjectivePoint<Real>> out;
    for (const auto& cand : candidates.roots) {
        auto e1 = single(cand.point);
        if (!e1)
            continue;
        auto e2 = single(*e1);
        if (!e2 || chordal_dist(*e2, cand.point) > Real(tolerance))
            continue;
        bool dup = false;
        for (const auto& e : out)
            dup = dup || chordal_dist(e, cand.point) <= Real(tolerance);
        if (!dup)
            out.push_back(cand.point);
    }
    return out;
}

} // namespace lyap
