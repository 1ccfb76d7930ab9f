#pragma once

#include <random>

#include "screening.hpp"
#include "series.hpp"

namespace lyap {

template <class Real>
struct WeightedPoint {
    ProjectivePoint<Real> point;
    long multiplicity = 1;
};

/// f^{-1}(a) with multiplicities summing to d.
template <class Real>
std::vector<WeightedPoint<Real>> preimages(const RationalMap<Real>& f, const ProjectivePoint<Real>& a, const SolverOptions& opts = {})
{
    auto roots = fiber(f, a, opts);
    std::vector<WeightedPoint<Real>> out;
    out.reserve(roots.roots.size());
    for (const auto& r : roots.roots)
        out.push_back({r.point, r.multiplicity});
    return out;
}

struct PreimageMode {
    bool sampled = false;
    int n_paths = 0;
    std::uint64_t seed = 0;

    static PreimageMode full() { return {}; }
    static PreimageMode monte_carlo(int n_paths, std::uint64_t seed) { return {true, n_paths, seed}; }
};

template <class Real>
struct PreimageTree {
    ProjectivePoint<Real> target;
    int depth = 0;
    std::vector<std::vector<WeightedPoint<Real>>> levels;  // levels[0] = {a}

    long level_mass(int j) const
    {
        long m = 0;
        for (const auto& w : levels[j])
            m += w.multiplicity;
        return m;
    }
};

/// Full iterated preimage tree to depth k, expanded level by level.
template <class Real>
PreimageTree<Real> build_preimage_tree(const RationalMap<Real>& f, const ProjectivePoint<Real>& a, int depth,
                                       long budget = default_degree_budget, const SolverOptions& opts = {})
{
    if (checked_power(f.degree(), depth, budget) < 0)
        throw BudgetExceeded("full preimage tree of depth " + std::to_string(depth) +
                             " exceeds the point budget; use sampled mode (mc:N)");
    PreimageTree<Real> tree;
    tree.target = a;
    tree.depth = depth;
    tree.levels.push_back({{a, 1}});
    for (int j = 0; j < depth; ++j) {
        std::vector<WeightedPoint<Real>> next;
        next.reserve(tree.levels.back().size() * f.degree());
        for (const auto& w : tree.levels.back())
            for (const auto& p : preimages(f, w.point, opts))
                next.push_back({p.point, p.multiplicity * w.multiplicity});
        tree.levels.push_back(std::move(next));
    }
    return tree;
}

template <class Real>
struct BackwardPath {
    std::vector<ProjectivePoint<Real>> points;  // points[0] = a, f(points[j+1]) = points[j]
    bool failed = false;
    std::string note;
};

/// One backward orbit of length m; each step picks a preimage with
/// probability multiplicity / d. Reproducible from (seed, stream).
template <class Real>
BackwardPath<Real> backward_orbit_sample(const RationalMap<Real>& f, const ProjectivePoint<Real>& a, int m, std::uint64_t seed,
                                         std::uint64_t stream = 0, const SolverOptions& opts = {})
{
    std::mt19937_64 rng(mix_seed(seed, stream));
    BackwardPath<Real> path;
    path.points.reserve(m + 1);
    path.points.push_back(a);
    const double d = f.degree();
    for (int j = 0; j < m; ++j) {
        std::vector<WeightedPoint<Real>> pre;
        try {
            pre = preimages(f, path.points.back(), opts);
        } catch (const RootFindingFailure& e) {
            path.failed = true;
            path.note = e.what();
            return path;
        }
        double u = uniform01(rng) * d;
        double acc = 0.0;
        std::size_t pick = pre.size() - 1;
        for (std::size_t i = 0; i < pre.size(); ++i) {
            acc += static_cast<double>(pre[i].multiplicity);
            if (u < acc) {
                pick = i;
                break;
            }
        }
        path.points.push_back(pre[pick].point);
    }
    return path;
}

struct PreimageOptions {
    bool force = false;
    long budget = default_degree_budget;
    ScanOptions scan;
    SolverOptions solver;
};

namespace detail {

template <class Real>
double log_fsharp(const RationalMap<Real>& f, const ProjectivePoint<Real>& w)
{
    using std::log;
    Real v = chordal_derivative(f, w);
    return v > Real(0) ? to_double(log(v)) : -std::numeric_limits<double>::infinity();
}

inline void screen_target(const RationalMap<double>& f, const ProjectivePoint<double>& a, const PreimageOptions& opts,
                          std::vector<std::string>& warnings)
{
    if (opts.force)
        return;
    auto rep = bad_target_scan(f, a, opts.scan);
    if (rep.rejected())
        throw TargetRejected(describe(rep));
    if (rep.shrinking_ball_hit)
        warnings.push_back(describe(rep));
}

} // namespace detail

/// Preimage averages (1/d^k) sum_{w in f^{-k}(a)} log f^#(w) for k = 1..k_max.
///
/// Full mode expands the whole tree (d^k_max within the budget). Sampled mode
/// averages log f^# over the depth-k points of n_paths backward paths; row k
/// then carries the standard error. Refuses screened targets unless forced.
template <class Real>
EstimateSeries estimator_preimage(const RationalMap<Real>& f, const ProjectivePoint<Real>& a, int k_max,
                                  const PreimageMode& mode = {}, const PreimageOptions& opts = {})
{
    EstimateSeries series;
    series.estimator = mode.sampled ? "preimage_mc" : "preimage";
    detail::screen_target(f.template cast<double>(), a.template cast<double>(), opts, series.warnings);

    if (!mode.sampled) {
        if (checked_power(f.degree(), k_max, opts.budget) < 0)
            throw BudgetExceeded("d^k_max exceeds the full-tree budget; use sampled mode (mc:N)");
        std::vector<WeightedPoint<Real>> level{{a, 1}};
        bool broken = false;
        std::string why;
        double dk = 1.0;
        for (int k = 1; k <= k_max; ++k) {
            Stopwatch sw;
            dk *= f.degree();
            EstimateRow row;
            row.k = k;
            if (!broken) {
                try {
                    std::vector<WeightedPoint<Real>> next;
                    next.reserve(level.size() * f.degree());
                    for (const auto& w : level)
                        for (const auto& p : preimages(f, w.point, opts.solver))
                            next.push_back({p.point, p.multiplicity * w.multiplicity});
                    level = std::move(next);
                } catch (const RootFindingFailure& e) {
                    broken = true;
                    why = e.what();
                }
            }
            if (broken) {
                row.failed = true;
                row.note = why;
            } else {
                std::vector<double> terms;
                terms.reserve(level.size());
                long mass = 0;
                for (const auto& w : level) {
                    double t = detail::log_fsharp(f, w.point);
                    if (std::isinf(t))
                        row.minus_infinity = true;
                    terms.push_back(static_cast<double>(w.multiplicity) * t);
                    mass += w.multiplicity;
                }
                row.n_points = mass;
                row.n_count = static_cast<long>(level.size());
                row.estimate = row.minus_infinity ? -std::numeric_limits<double>::infinity() : pairwise_sum(terms) / dk;
                if (row.minus_infinity)
                    row.note = "a preimage is a critical point; the summand is -inf";
            }
            row.runtime_ms = sw.elapsed_ms();
            series.rows.push_back(row);
        }
        return series;
    }

    if (mode.n_paths < 2)
        throw ConfigError("sampled mode needs at least two paths");
    Stopwatch sw;
    std::vector<std::vector<double>> values(k_max);
    int failed_paths = 0;
    for (int p = 0; p < mode.n_paths; ++p) {
        auto path = backward_orbit_sample(f, a, k_max, mode.seed, static_cast<std::uint64_t>(p), opts.solver);
        if (path.failed) {
            ++failed_paths;
            continue;
        }
        for (int k = 1; k <= k_max; ++k)
            values[k - 1].push_back(detail::log_fsharp(f, path.points[k]));
    }
    double ms = sw.elapsed_ms();
    for (int k = 1; k <= k_max; ++k) {
        EstimateRow row;
        row.k = k;
        const auto& v = values[k - 1];
        row.n_points = static_cast<long>(v.size());
        row.n_count = static_cast<long>(v.size());
        row.runtime_ms = ms;
        if (v.size() < 2) {
            row.failed = true;
            row.note = "all sampled paths failed";
        } else {
            double mean = pairwise_sum(v) / v.size();
            std::vector<double> sq(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                sq[i] = (v[i] - mean) * (v[i] - mean);
            row.estimate = mean;
            row.std_error = std::sqrt(pairwise_sum(sq) / (v.size() - 1) / v.size());
            row.minus_infinity = std::isinf(mean);
            if (failed_paths > 0)
                row.note = std::to_string(failed_paths) + " paths failed and were dropped";
        }
        series.rows.push_back(row);
    }
    return series;
}

} // namespace lyap
