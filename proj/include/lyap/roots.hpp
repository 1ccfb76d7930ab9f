#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>

#include "geometry.hpp"

namespace lyap {

struct SolverOptions {
    int max_iterations = 600;
    /// Cluster radius in double precision; scaled with sqrt(eps) in extended precision.
    double cluster_radius = 1e-7;
    /// Accepted relative backward error, as a multiple of the working epsilon.
    double residual_factor = 1e6;
    /// Re-run in 128 then 256 bits when the residual target is missed.
    bool escalate = true;
};

template <class Real>
struct Root {
    ProjectivePoint<Real> point;
    int multiplicity = 1;
    double residual = 0.0;
};

template <class Real>
struct RootSet {
    std::vector<Root<Real>> roots;
    double max_residual = 0.0;
    int iterations = 0;
    int restarts = 0;
    int precision_bits = 0;

    int total_multiplicity() const
    {
        int m = 0;
        for (const auto& r : roots)
            m += r.multiplicity;
        return m;
    }
};

template <class Real>
Real scaled_cluster_radius(const SolverOptions& opts)
{
    using std::sqrt;
    Real ratio = machine_epsilon<Real>() / Real(std::numeric_limits<double>::epsilon());
    return Real(opts.cluster_radius) * sqrt(ratio);
}

namespace detail {

template <class Real>
struct NewtonEval {
    Complex<Real> ratio;  // p / p'
    Real residual;        // |p| / sum |a_i||z|^i, or -1 when not available
};

/// Newton ratio and relative backward error of a polynomial (ascending
/// coefficients). Switches to the reversed polynomial outside the unit disk.
template <class Real>
NewtonEval<Real> newton_ratio(std::span<const Complex<Real>> a, const Complex<Real>& z)
{
    const std::size_t n = a.size() - 1;
    Real az = modulus(z);
    Complex<Real> p, dp;
    Real bound;
    if (az <= Real(1)) {
        p = a[n];
        dp = Complex<Real>(0);
        bound = modulus(a[n]);
        for (std::size_t i = n; i-- > 0;) {
            dp = dp * z + p;
            p = p * z + a[i];
            bound = bound * az + modulus(a[i]);
        }
        Complex<Real> ratio = dp == Complex<Real>(0) ? Complex<Real>(0) : p / dp;
        return {ratio, bound > 0 ? modulus(p) / bound : Real(0)};
    }
    // p(z) = z^n q(w), w = 1/z, q(w) = sum a_{n-i} w^i
    Complex<Real> w = Complex<Real>(1) / z;
    Real aw = Real(1) / az;
    Complex<Real> q = a[0];
    Complex<Real> dq(0);
    bound = modulus(a[0]);
    for (std::size_t i = 1; i <= n; ++i) {
        dq = dq * w + q;
        q = q * w + a[i];
        bound = bound * aw + modulus(a[i]);
    }
    Complex<Real> den = Real(n) * q - w * dq;
    Complex<Real> ratio = den == Complex<Real>(0) ? Complex<Real>(0) : z * q / den;
    return {ratio, bound > 0 ? modulus(q) / bound : Real(0)};
}

/// Starting points on circles whose radii come from the upper convex hull of
/// (i, log|a_i|). All a_0 and a_n must be nonzero.
template <class Real>
std::vector<Complex<Real>> initial_points(std::span<const Complex<Real>> a)
{
    using std::log;
    const int n = static_cast<int>(a.size()) - 1;
    std::vector<double> lg(a.size(), -std::numeric_limits<double>::infinity());
    for (int i = 0; i <= n; ++i) {
        if (a[i] != Complex<Real>(0))
            lg[i] = to_double(log(modulus(a[i])));
    }
    // Andrew's monotone chain, upper hull.
    std::vector<int> hull;
    for (int i = 0; i <= n; ++i) {
        if (!std::isfinite(lg[i]))
            continue;
        while (hull.size() >= 2) {
            int i1 = hull[hull.size() - 2];
            int i2 = hull.back();
            double cross = (i2 - i1) * (lg[i] - lg[i1]) - (lg[i2] - lg[i1]) * (i - i1);
            if (cross >= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<Complex<Real>> z;
    z.reserve(n);
    const double two_pi = 6.283185307179586;
    const double sigma = 0.7;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        int i = hull[e];
        int j = hull[e + 1];
        int count = j - i;
        double radius = std::exp((lg[i] - lg[j]) / count);
        for (int m = 0; m < count; ++m) {
            double ang = two_pi * m / count + two_pi * i / n + sigma;
            z.emplace_back(Real(radius * std::cos(ang)), Real(radius * std::sin(ang)));
        }
    }
    return z;
}

struct AberthStats {
    int iterations = 0;
    bool all_converged = false;
};

/// Simultaneous Aberth-Ehrlich iteration, Jacobi form: every sweep reads the
/// previous sweep's approximations. `eval(z)` returns a NewtonEval; a negative
/// residual means the caller has no backward-error estimate and the step size
/// decides convergence instead.
template <class Real, class Eval>
AberthStats aberth(Eval&& eval, std::vector<Complex<Real>>& z, int max_iterations, std::vector<char>* converged_out = nullptr)
{
    using std::sqrt;
    const std::size_t n = z.size();
    const Real eps = machine_epsilon<Real>();
    const Real residual_level = Real(4 * (n + 2)) * eps;
    const Real step_level = Real(16) * eps;
    const Real stall_level = sqrt(eps) * Real(64);

    std::vector<char> done(n, 0);
    std::vector<Real> last_step(n, Real(-1));
    std::vector<int> stalls(n, 0);
    std::vector<Complex<Real>> next(z);
    AberthStats stats;
    for (int it = 0; it < max_iterations; ++it) {
        bool active = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i])
                continue;
            NewtonEval<Real> ev = eval(z[i]);
            if (ev.residual >= 0 && ev.residual <= Real(2) * eps) {
                done[i] = 1;
                continue;
            }
            Complex<Real> s(0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                Complex<Real> diff = z[i] - z[j];
                if (diff != Complex<Real>(0))
                    s += Complex<Real>(1) / diff;
            }
            Complex<Real> denom = Complex<Real>(1) - ev.ratio * s;
            Complex<Real> corr = denom == Complex<Real>(0) ? ev.ratio : ev.ratio / denom;
            Real size = modulus(corr);
            Real scale = Real(1) + modulus(z[i]);
            next[i] = z[i] - corr;
            active = true;
            // Below the loose level, a step that stops shrinking means the
            // evaluation noise floor has been reached.
            bool noisy = ev.residual >= 0 ? ev.residual <= residual_level : size <= stall_level * scale;
            if (noisy && last_step[i] >= 0 && size >= last_step[i] / 2)
                ++stalls[i];
            else
                stalls[i] = 0;
            if (size <= step_level * scale || stalls[i] >= 3)
                done[i] = 1;
            last_step[i] = size;
        }
        for (std::size_t i = 0; i < n; ++i)
            z[i] = next[i];
        stats.iterations = it + 1;
        if (!active)
            break;
    }
    stats.all_converged = std::all_of(done.begin(), done.end(), [](char c) { return c != 0; });
    if (converged_out)
        *converged_out = std::move(done);
    return stats;
}

/// Groups indices whose members are linked by `close(i, j)` (transitive closure).
template <class Close>
std::vector<std::vector<std::size_t>> cluster_indices(std::size_t n, Close&& close)
{
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (close(i, j)) {
                std::size_t a = find(i), b = find(j);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    return groups;
}

template <class Real>
struct Attempt {
    RootSet<Real> set;
    bool ok = false;
};

/// One solve at the precision of Real, no escalation.
template <class Real>
Attempt<Real> solve_at(std::span<const Complex<Real>> coeffs, const SolverOptions& opts)
{
    const int n_hom = static_cast<int>(coeffs.size()) - 1;
    std::size_t lo = 0;
    while (lo < coeffs.size() && coeffs[lo] == Complex<Real>(0))
        ++lo;
    if (lo == coeffs.size())
        throw Error("cannot solve the zero polynomial");
    std::size_t hi = coeffs.size() - 1;
    while (coeffs[hi] == Complex<Real>(0))
        --hi;
    const int zeros = static_cast<int>(lo);
    const int infinities = n_hom - static_cast<int>(hi);

    Attempt<Real> out;
    out.set.precision_bits = precision_bits<Real>();
    if (zeros > 0)
        out.set.roots.push_back({ProjectivePoint<Real>::affine(Complex<Real>(0)), zeros, 0.0});

    std::span<const Complex<Real>> core = coeffs.subspan(lo, hi - lo + 1);
    const Real target = Real(opts.residual_factor) * machine_epsilon<Real>();
    bool ok = true;
    if (core.size() > 1) {
        std::vector<Complex<Real>> z = initial_points<Real>(core);
        auto eval = [&](const Complex<Real>& x) { return newton_ratio<Real>(core, x); };
        AberthStats st = aberth<Real>(eval, z, opts.max_iterations);
        out.set.iterations = st.iterations;

        const Real radius = scaled_cluster_radius<Real>(opts);
        auto groups = cluster_indices(z.size(), [&](std::size_t i, std::size_t j) {
            Real scale = Real(1) + std::max(modulus(z[i]), modulus(z[j]));
            return modulus(z[i] - z[j]) <= radius * scale;
        });
        for (const auto& g : groups) {
            Complex<Real> c(0);
            for (std::size_t i : g)
                c += z[i];
            c /= Real(g.size());
            Real res = newton_ratio<Real>(core, c).residual;
            if (g.size() == 1) {
                // Newton polish, kept only while the residual improves.
                for (int step = 0; step < 3 && res > 0; ++step) {
                    auto ev = newton_ratio<Real>(core, c);
                    Complex<Real> trial = c - ev.ratio;
                    Real tres = newton_ratio<Real>(core, trial).residual;
                    if (!(tres < res))
                        break;
                    c = trial;
                    res = tres;
                }
            }
            double dres = to_double(res);
            if (!(res <= target))
                ok = false;
            out.set.max_residual = std::max(out.set.max_residual, dres);
            out.set.roots.push_back({ProjectivePoint<Real>::affine(c), static_cast<int>(g.size()), dres});
        }
    }
    if (infinities > 0)
        out.set.roots.push_back({ProjectivePoint<Real>::infinity(), infinities, 0.0});
    out.ok = ok;
    return out;
}

template <class To, class From>
RootSet<To> cast_roots(const RootSet<From>& in)
{
    RootSet<To> out;
    out.max_residual = in.max_residual;
    out.iterations = in.iterations;
    out.restarts = in.restarts;
    out.precision_bits = in.precision_bits;
    for (const auto& r : in.roots)
        out.roots.push_back({r.point.template cast<To>(), r.multiplicity, r.residual});
    return out;
}

template <class To, class From>
std::vector<Complex<To>> cast_coeffs(std::span<const Complex<From>> c)
{
    std::vector<Complex<To>> out;
    out.reserve(c.size());
    for (const auto& x : c)
        out.push_back(complex_cast<To>(x));
    return out;
}

} // namespace detail

/// All roots of a polynomial on the projective line.
///
/// `coeffs` are ascending and define a homogeneous form of degree
/// coeffs.size() - 1; vanishing top coefficients become roots at infinity.
/// Roots closer than the cluster radius are merged with summed multiplicity.
/// Throws RootFindingFailure when the residual target is missed at every
/// available precision.
template <class Real>
RootSet<Real> solve(std::span<const Complex<Real>> coeffs, const SolverOptions& opts = {})
{
    auto first = detail::solve_at<Real>(coeffs, opts);
    if (first.ok)
        return first.set;
    double best = first.set.max_residual;
    int restarts = 0;
    if (opts.escalate) {
        if constexpr (precision_bits<Real>() < precision_bits<Float128>()) {
            ++restarts;
            auto c = detail::cast_coeffs<Float128, Real>(coeffs);
            auto second = detail::solve_at<Float128>(std::span<const Complex<Float128>>(c), opts);
            if (second.ok) {
                second.set.restarts = restarts;
                return detail::cast_roots<Real>(second.set);
            }
            best = std::min(best, second.set.max_residual);
        }
        if constexpr (precision_bits<Real>() < precision_bits<Float256>()) {
            ++restarts;
            auto c = detail::cast_coeffs<Float256, Real>(coeffs);
            auto third = detail::solve_at<Float256>(std::span<const Complex<Float256>>(c), opts);
            if (third.ok) {
                third.set.restarts = restarts;
                return detail::cast_roots<Real>(third.set);
            }
            best = std::min(best, third.set.max_residual);
        }
    }
    std::ostringstream msg;
    msg << "root finding missed the residual target for degree " << coeffs.size() - 1
        << " (best relative residual " << best << " after " << restarts << " restarts)";
    throw RootFindingFailure(msg.str());
}

template <class Real>
RootSet<Real> solve(const std::vector<Complex<Real>>& coeffs, const SolverOptions& opts = {})
{
    return solve<Real>(std::span<const Complex<Real>>(coeffs), opts);
}

/// Newton refinement of an approximate simple root at the precision of Real.
/// Throws NoConvergence when the iteration diverges.
template <class Real>
Complex<Real> polish(Complex<Real> root, std::span<const Complex<Real>> coeffs, int max_iterations = 100)
{
    const Real eps = machine_epsilon<Real>();
    auto ev = detail::newton_ratio<Real>(coeffs, root);
    Real res = ev.residual;
    int growth = 0;
    for (int it = 0; it < max_iterations; ++it) {
        if (res <= Real(4 * coeffs.size()) * eps)
            return root;
        Complex<Real> next = root - ev.ratio;
        auto nev = detail::newton_ratio<Real>(coeffs, next);
        if (!(nev.residual < res)) {
            if (++growth > 3)
                break;
        } else {
            growth = 0;
        }
        if (modulus(next - root) <= eps * (Real(1) + modulus(root)))
            return next;
        root = next;
        ev = nev;
        res = nev.residual;
    }
    if (res <= Real(1e6) * eps)
        return root;
    throw NoConvergence("Newton polishing did not converge");
}

template <class Real>
Complex<Real> polish(Complex<Real> root, const std::vector<Complex<Real>>& coeffs, int max_iterations = 100)
{
    return polish<Real>(root, std::span<const Complex<Real>>(coeffs), max_iterations);
}

/// Relative backward error |p(z)| / sum |a_i||z|^i.
template <class Real>
Real relative_residual(std::span<const Complex<Real>> coeffs, const Complex<Real>& z)
{
    return detail::newton_ratio<Real>(coeffs, z).residual;
}

/// Raw Aberth approximations for a polynomial known only through its Newton
/// ratio h/h' (degree `degree`, no root at infinity). Starts on the unit circle.
template <class Real>
struct ImplicitResult {
    std::vector<Complex<Real>> approximations;
    std::vector<char> converged;
    int iterations = 0;
};

template <class Real, class Eval>
ImplicitResult<Real> solve_implicit(Eval&& ratio, int degree, const SolverOptions& opts = {})
{
    ImplicitResult<Real> out;
    out.approximations.reserve(degree);
    const double two_pi = 6.283185307179586;
    for (int m = 0; m < degree; ++m) {
        double ang = two_pi * m / degree + 0.7;
        out.approximations.emplace_back(Real(std::cos(ang)), Real(std::sin(ang)));
    }
    auto eval = [&](const Complex<Real>& s) { return detail::NewtonEval<Real>{ratio(s), Real(-1)}; };
    auto st = detail::aberth<Real>(eval, out.approximations, opts.max_iterations, &out.converged);
    out.iterations = st.iterations;
    return out;
}

} // namespace lyap
