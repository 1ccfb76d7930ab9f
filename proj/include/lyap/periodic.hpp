#pragma once

#include <sstream>

#include "ratmap.hpp"
#include "series.hpp"

namespace lyap {

enum class Stability { repelling, indifferent, attracting, superattracting };

inline const char* to_string(Stability s)
{
    switch (s) {
    case Stability::repelling: return "repelling";
    case Stability::indifferent: return "indifferent";
    case Stability::attracting: return "attracting";
    case Stability::superattracting: return "superattracting";
    }
    return "?";
}

template <class Real>
struct PeriodicPointRecord {
    ProjectivePoint<Real> point;
    int period = 1;
    bool exact_period = true;
    int multiplicity = 1;
    double multiplier_modulus = 0.0;  // (f^k)^#(point)
    double log_multiplier = 0.0;      // sum of log f^# along the cycle
    Stability stability = Stability::repelling;
};

struct PeriodicOptions {
    double indifference_band = 1e-8;
    double period_tolerance = 1e-8;
    double superattracting_threshold = 1e-10;
    /// Chordal radius for merging multiple roots, double precision.
    double cluster_radius = 1e-7;
    /// Largest accepted chordal distance between f^k(p) and p.
    double fixed_point_residual = 1e-6;
    long degree_budget = default_degree_budget;
    SolverOptions solver;
};

template <class Real>
struct PeriodicSet {
    std::vector<PeriodicPointRecord<Real>> records;
    std::vector<std::string> warnings;
    int precision_bits = 0;
    int iterations = 0;
    double max_residual = 0.0;

    int total_multiplicity() const
    {
        int m = 0;
        for (const auto& r : records)
            m += r.multiplicity;
        return m;
    }
};

/// Coefficients of P_k - z Q_k where f^k = P_k / Q_k (homogeneous degree
/// d^k + 1; vanishing top coefficients are the fixed points at infinity).
template <class Real>
std::vector<Complex<Real>> fixed_point_polynomial(const RationalMap<Real>& f, int k, long budget = default_degree_budget)
{
    auto g = iterate_map(f, k, budget);
    std::vector<Complex<Real>> c(g.num().size() + 1, Complex<Real>(0));
    for (std::size_t i = 0; i < g.num().size(); ++i) {
        c[i] += g.num()[i];
        c[i + 1] -= g.den()[i];
    }
    return c;
}

inline std::vector<int> proper_divisors(int k)
{
    std::vector<int> out;
    for (int j = 1; j < k; ++j)
        if (k % j == 0)
            out.push_back(j);
    return out;
}

namespace detail {

/// Newton ratio of h(s) = y X_k - x Y_k with (x, y) = M (s, 1) for the unitary
/// M = [[a, -conj b], [b, conj a]], evaluated by iterating F with a tangent
/// vector and rescaling every step. Never forms the degree d^k coefficients.
template <class Real>
struct FixedPointEquation {
    const RationalMap<Real>& f;
    int k;
    Complex<Real> a, b;

    struct Value {
        Complex<Real> h, dh;
        Real scale;  // |y X| + |x Y|
    };

    Value operator()(const Complex<Real>& s) const
    {
        using C = Complex<Real>;
        C x = a * s - std::conj(b);
        C y = b * s + std::conj(a);
        C dx = a, dy = b;
        Real n0 = std::max(modulus(x), modulus(y));
        x /= n0;
        y /= n0;
        dx /= n0;
        dy /= n0;
        C X = x, Y = y, dX = dx, dY = dy;
        for (int i = 0; i < k; ++i) {
            auto j = f.jet(X, Y);
            C nX = j.px * dX + j.py * dY;
            C nY = j.qx * dX + j.qy * dY;
            Real n = std::max(modulus(j.p), modulus(j.q));
            X = j.p / n;
            Y = j.q / n;
            dX = nX / n;
            dY = nY / n;
        }
        C h = y * X - x * Y;
        C dh = dy * X + y * dX - dx * Y - x * dY;
        return {h, dh, modulus(y * X) + modulus(x * Y)};
    }
};

template <class Real>
Complex<Real> unit_phase(double angle)
{
    return Complex<Real>(Real(std::cos(angle)), Real(std::sin(angle)));
}

template <class Real>
PeriodicSet<Real> periodic_points_at(const RationalMap<Real>& f, int k, const PeriodicOptions& opts, bool& ok)
{
    using C = Complex<Real>;
    const long dk = checked_power(f.degree(), k, opts.degree_budget);
    if (dk < 0)
        throw BudgetExceeded("d^k exceeds the degree budget for periodic points");
    const int degree = static_cast<int>(dk + 1);

    // Pick a chart whose point at infinity M(1,0) = (a, b) is not periodic.
    static constexpr double charts[][3] = {{0.61, 0.37, 1.13}, {1.07, -0.52, 2.29}, {0.33, 2.71, -0.88}, {1.29, 0.11, 0.47}};
    FixedPointEquation<Real> eq{f, k, C(0), C(0)};
    for (const auto& ch : charts) {
        eq.a = Real(std::cos(ch[0])) * unit_phase<Real>(ch[1]);
        eq.b = Real(std::sin(ch[0])) * unit_phase<Real>(ch[2]);
        // leading coefficient of h is H(a, b), the chordal gap between M(1,0) and its image
        auto X = f.iterate(ProjectivePoint<Real>(eq.a, eq.b), k);
        Real lc = modulus(eq.b * X.x() - eq.a * X.y());
        if (lc > Real(1e-3))
            break;
    }

    SolverOptions sopts = opts.solver;
    auto ratio = [&](const C& s) {
        auto v = eq(s);
        return v.dh == C(0) ? C(0) : v.h / v.dh;
    };
    auto raw = solve_implicit<Real>(ratio, degree, sopts);

    PeriodicSet<Real> out;
    out.precision_bits = precision_bits<Real>();
    out.iterations = raw.iterations;
    ok = std::all_of(raw.converged.begin(), raw.converged.end(), [](char c) { return c != 0; });

    std::vector<ProjectivePoint<Real>> pts;
    pts.reserve(raw.approximations.size());
    for (const auto& s : raw.approximations)
        pts.emplace_back(eq.a * s - std::conj(eq.b), eq.b * s + std::conj(eq.a));

    const Real radius = scaled_cluster_radius<Real>(SolverOptions{.cluster_radius = opts.cluster_radius});
    auto groups = cluster_indices(pts.size(), [&](std::size_t i, std::size_t j) { return chordal_dist(pts[i], pts[j]) <= radius; });

    const auto divisors = proper_divisors(k);
    for (const auto& g : groups) {
        C s(0);
        for (std::size_t i : g)
            s += raw.approximations[i];
        s /= Real(g.size());
        ProjectivePoint<Real> p(eq.a * s - std::conj(eq.b), eq.b * s + std::conj(eq.a));

        PeriodicPointRecord<Real> rec;
        rec.point = p;
        rec.period = k;
        rec.multiplicity = static_cast<int>(g.size());

        using std::log;
        double log_mult = 0.0;
        ProjectivePoint<Real> z = p;
        std::vector<ProjectivePoint<Real>> orbit{p};
        for (int j = 0; j < k; ++j) {
            Real fs = chordal_derivative(f, z);
            log_mult += fs > Real(0) ? to_double(log(fs)) : -std::numeric_limits<double>::infinity();
            z = f(z);
            orbit.push_back(z);
        }
        double residual = to_double(chordal_dist(orbit[k], p));
        out.max_residual = std::max(out.max_residual, residual);
        if (!(residual <= opts.fixed_point_residual))
            ok = false;

        rec.log_multiplier = log_mult;
        rec.multiplier_modulus = std::exp(log_mult);
        rec.exact_period = true;
        for (int j : divisors)
            if (to_double(chordal_dist(orbit[j], p)) <= opts.period_tolerance)
                rec.exact_period = false;

        const double m = rec.multiplier_modulus;
        if (m <= opts.superattracting_threshold)
            rec.stability = Stability::superattracting;
        else if (std::abs(m - 1.0) <= opts.indifference_band)
            rec.stability = Stability::indifferent;
        else if (m < 1.0)
            rec.stability = Stability::attracting;
        else
            rec.stability = Stability::repelling;
        out.records.push_back(rec);
    }
    return out;
}

template <class To, class From>
PeriodicSet<To> cast_periodic(const PeriodicSet<From>& in)
{
    PeriodicSet<To> out;
    out.warnings = in.warnings;
    out.precision_bits = in.precision_bits;
    out.iterations = in.iterations;
    out.max_residual = in.max_residual;
    for (const auto& r : in.records) {
        PeriodicPointRecord<To> c;
        c.point = r.point.template cast<To>();
        c.period = r.period;
        c.exact_period = r.exact_period;
        c.multiplicity = r.multiplicity;
        c.multiplier_modulus = r.multiplier_modulus;
        c.log_multiplier = r.log_multiplier;
        c.stability = r.stability;
        out.records.push_back(c);
    }
    return out;
}

} // namespace detail

/// All d^k + 1 fixed points of f^k with multiplicity, classified by the
/// modulus of their multiplier. Retries in 128 and 256 bits when the double
/// run does not converge or a fixed point fails its residual check.
template <class Real>
PeriodicSet<Real> periodic_points(const RationalMap<Real>& f, int k, const PeriodicOptions& opts = {})
{
    if (k < 1)
        throw Error("period must be >= 1");
    bool ok = false;
    auto out = detail::periodic_points_at<Real>(f, k, opts, ok);
    if (!ok && opts.solver.escalate) {
        if constexpr (precision_bits<Real>() < precision_bits<Float128>()) {
            bool ok2 = false;
            auto hi = detail::periodic_points_at<Float128>(f.template cast<Float128>(), k, opts, ok2);
            if (ok2)
                return detail::cast_periodic<Real>(hi);
        }
        if constexpr (precision_bits<Real>() < precision_bits<Float256>()) {
            bool ok3 = false;
            auto hi = detail::periodic_points_at<Float256>(f.template cast<Float256>(), k, opts, ok3);
            if (ok3)
                return detail::cast_periodic<Real>(hi);
        }
    }
    if (!ok) {
        std::ostringstream msg;
        msg << "periodic points of period " << k << " did not converge (max fixed-point residual " << out.max_residual << ")";
        throw RootFindingFailure(msg.str());
    }
    for (const auto& r : out.records)
        if (r.stability == Stability::indifferent) {
            std::ostringstream w;
            w << "k=" << k << ": indifferent periodic point at " << describe_point(r.point) << " (|multiplier| = " << r.multiplier_modulus
              << ") excluded from the repelling set";
            out.warnings.push_back(w.str());
        }
    return out;
}

/// Repelling average (1/(d^k+1)) sum (1/k) log (f^k)^#(w) over R_k, or over
/// the exact-period subset when strict.
template <class Real>
EstimateRow rep_row(const PeriodicSet<Real>& set, int k, int degree, bool strict)
{
    EstimateRow row;
    row.k = k;
    row.n_points = set.total_multiplicity();
    std::vector<double> terms;
    for (const auto& r : set.records) {
        if (r.stability != Stability::repelling)
            continue;
        if (strict && !r.exact_period)
            continue;
        terms.push_back(r.log_multiplier / k);
    }
    row.n_count = static_cast<long>(terms.size());
    const double total = static_cast<double>(checked_power(degree, k, 1L << 62) + 1);
    row.estimate = pairwise_sum(terms) / total;
    return row;
}

/// Both repelling estimators for k = 1..k_max from one periodic-point solve per k.
template <class Real>
std::pair<EstimateSeries, EstimateSeries> rep_series(const RationalMap<Real>& f, int k_max, const PeriodicOptions& opts = {})
{
    EstimateSeries plain{"rep", {}, {}};
    EstimateSeries strict{"rep_strict", {}, {}};
    for (int k = 1; k <= k_max; ++k) {
        Stopwatch sw;
        try {
            auto set = periodic_points(f, k, opts);
            double ms = sw.elapsed_ms();
            auto a = rep_row(set, k, f.degree(), false);
            auto b = rep_row(set, k, f.degree(), true);
            a.runtime_ms = b.runtime_ms = ms;
            plain.rows.push_back(a);
            strict.rows.push_back(b);
            for (const auto& w : set.warnings) {
                plain.warnings.push_back(w);
                strict.warnings.push_back(w);
            }
        } catch (const RootFindingFailure& e) {
            EstimateRow bad;
            bad.k = k;
            bad.failed = true;
            bad.note = e.what();
            bad.runtime_ms = sw.elapsed_ms();
            plain.rows.push_back(bad);
            strict.rows.push_back(bad);
        }
    }
    return {plain, strict};
}

template <class Real>
EstimateSeries estimator_rep(const RationalMap<Real>& f, int k_max, bool strict, const PeriodicOptions& opts = {})
{
    auto both = rep_series(f, k_max, opts);
    return strict ? both.second : both.first;
}

template <class Real>
struct CensusEntry {
    int k = 0;
    int count = 0;  // cumulative distinct non-repelling points up to k
    std::vector<ProjectivePoint<Real>> points;
};

/// Cumulative distinct non-repelling periodic points for periods 1..k_max.
template <class Real>
std::vector<CensusEntry<Real>> nonrepelling_census(const RationalMap<Real>& f, int k_max, const PeriodicOptions& opts = {},
                                                   double tolerance = 1e-7)
{
    std::vector<CensusEntry<Real>> out;
    std::vector<ProjectivePoint<Real>> seen;
    for (int k = 1; k <= k_max; ++k) {
        auto set = periodic_points(f, k, opts);
        for (const auto& r : set.records) {
            if (r.stability == Stability::repelling)
                continue;
            bool dup = false;
            for (const auto& s : seen)
                dup = dup || chordal_dist(s, r.point) <= Real(tolerance);
            if (!dup)
                seen.push_back(r.point);
        }
        out.push_back({k, static_cast<int>(seen.size()), seen});
    }
    return out;
}

} // namespace lyap
