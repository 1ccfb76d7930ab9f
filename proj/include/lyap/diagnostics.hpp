#pragma once

#include <map>

#include "periodic.hpp"
#include "preimage.hpp"
#include "sphere.hpp"

namespace lyap {

struct Atom {
    ProjectivePoint<double> point;
    double weight = 0.0;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;

    void add(const ProjectivePoint<double>& p, double w)
    {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error("atom weights must be finite and nonnegative");
        atoms.push_back({p, w});
    }

    double mass() const
    {
        std::vector<double> w;
        w.reserve(atoms.size());
        for (const auto& a : atoms)
            w.push_back(a.weight);
        return pairwise_sum(w);
    }

    AtomicMeasure normalized() const
    {
        AtomicMeasure out = *this;
        double m = mass();
        if (m > 0)
            for (auto& a : out.atoms)
                a.weight /= m;
        return out;
    }
};

/// U(z) = sum w_i log [z, x_i]; -inf when z is a charged atom.
inline double chordal_potential(const AtomicMeasure& nu, const ProjectivePoint<double>& z)
{
    std::vector<double> terms;
    terms.reserve(nu.atoms.size());
    for (const auto& a : nu.atoms) {
        if (a.weight == 0.0)
            continue;
        double dist = chordal_dist(z, a.point);
        if (dist == 0.0)
            return -std::numeric_limits<double>::infinity();
        terms.push_back(a.weight * std::log(dist));
    }
    return pairwise_sum(terms);
}

/// Repelling points of period k with weight 1 each, divided by d^k + 1 (raw)
/// or by their number (normalized).
inline AtomicMeasure repelling_measure(const PeriodicSet<double>& set, int d, int k, bool normalized)
{
    AtomicMeasure nu;
    for (const auto& r : set.records)
        if (r.stability == Stability::repelling)
            nu.add(r.point, 1.0);
    double total = normalized ? static_cast<double>(nu.atoms.size()) : static_cast<double>(checked_power(d, k, 1L << 62) + 1);
    for (auto& a : nu.atoms)
        a.weight /= total;
    return nu;
}

/// Depth-k preimage measure (1/d^k) sum mult * delta_w.
inline AtomicMeasure preimage_measure(const RationalMap<double>& f, const ProjectivePoint<double>& a, int k,
                                      long budget = default_degree_budget)
{
    auto tree = build_preimage_tree(f, a, k, budget);
    AtomicMeasure nu;
    const double dk = static_cast<double>(checked_power(f.degree(), k, budget));
    for (const auto& w : tree.levels.back())
        nu.add(w.point, w.multiplicity / dk);
    return nu;
}

/// Fixed list of generic targets; the first one passing the scan is used.
inline ProjectivePoint<double> clean_target(const RationalMap<double>& f, const ScanOptions& scan = {})
{
    static const std::complex<double> candidates[] = {{0.3718, 0.2113}, {-0.4327, 0.5861}, {0.9134, -0.2906}, {1.7321, 1.1442}};
    for (const auto& c : candidates) {
        auto a = ProjectivePoint<double>::affine(c);
        if (bad_target_scan(f, a, scan).clean())
            return a;
    }
    throw Error("no clean reference target among the candidates");
}

struct PotentialRow {
    int k = 0;
    long n_repelling = 0;
    double potential = 0.0;      // normalized repelling measure
    double potential_raw = 0.0;  // weights 1/(d^k+1)
    double reference = 0.0;
    double discrepancy = 0.0;
    bool failed = false;
    std::string note;
};

struct PotentialReport {
    ProjectivePoint<double> point;
    ProjectivePoint<double> reference_target;
    int reference_depth = 0;
    double reference = 0.0;
    std::vector<PotentialRow> rows;
};

struct DiagnosticsOptions {
    PeriodicOptions periodic;
    ScanOptions scan;
    long budget = default_degree_budget;
    int sup_samples = 4096;
    /// Bezout cross-check against the non-exact records of R_k up to this degree.
    long cross_check_limit = 512;
};

/// Potential of nu_k^rep at c against a deep preimage measure of a clean target.
inline PotentialReport potential_convergence_check(const RationalMap<double>& f, const ProjectivePoint<double>& c, int k_max,
                                                   const DiagnosticsOptions& opts = {})
{
    PotentialReport rep;
    rep.point = c;
    int K = k_max + 4;
    while (K > 1 && checked_power(f.degree(), K, opts.budget) < 0)
        --K;
    rep.reference_depth = K;
    rep.reference_target = clean_target(f, opts.scan);
    rep.reference = chordal_potential(preimage_measure(f, rep.reference_target, K, opts.budget), c);
    for (int k = 1; k <= k_max; ++k) {
        PotentialRow row;
        row.k = k;
        row.reference = rep.reference;
        try {
            auto set = periodic_points(f, k, opts.periodic);
            auto nu = repelling_measure(set, f.degree(), k, true);
            row.n_repelling = static_cast<long>(nu.atoms.size());
            row.potential = chordal_potential(nu, c);
            row.potential_raw = chordal_potential(repelling_measure(set, f.degree(), k, false), c);
            row.discrepancy = std::abs(row.potential - rep.reference);
        } catch (const RootFindingFailure& e) {
            row.failed = true;
            row.note = e.what();
        }
        rep.rows.push_back(row);
    }
    return rep;
}

struct PrzytyckiRow {
    int k = 0;
    double distance = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct PrzytyckiCandidate {
    ProjectivePoint<double> point;
    OrbitClass orbit = OrbitClass::undetermined;
    bool julia = true;
    double cycle_multiplier = -1.0;  // -1 when no cycle was detected
    std::string basis;
    std::vector<PrzytyckiRow> rows;
};

struct PrzytyckiReport {
    SupEstimate sup;
    std::vector<PrzytyckiCandidate> critical;
    int violations = 0;
};

/// Checks [f^k(c), c] >= (1/10) max(1, sup f^#)^{-(k-1)} for critical points
/// not attracted to an attracting or superattracting cycle.
inline PrzytyckiReport przytycki_bound_check(const RationalMap<double>& f, int k_max, const DiagnosticsOptions& opts = {})
{
    PrzytyckiReport rep;
    rep.sup = sup_chordal_derivative(f, opts.sup_samples);
    const double base = std::max(1.0, rep.sup.value);
    auto crit = classify_critical_orbits(f, critical_points(f, opts.scan.solver), opts.scan.orbit);
    for (const auto& c : crit.points) {
        PrzytyckiCandidate cand;
        cand.point = c.point;
        cand.orbit = c.orbit;
        if (c.orbit == OrbitClass::wandering) {
            cand.basis = "no cycle detected within the horizon";
        } else {
            auto orbit = forward_orbit(f, c.point, c.preperiod + c.period);
            double m = 1.0;
            for (int i = c.preperiod; i < c.preperiod + c.period; ++i)
                m *= chordal_derivative(f, orbit[i]);
            cand.cycle_multiplier = m;
            cand.julia = !(m < 1.0);
            std::ostringstream s;
            s << to_string(c.orbit) << " orbit, cycle of period " << c.period << " with multiplier " << m
              << (cand.julia ? " (not attracting)" : " (attracting)");
            cand.basis = s.str();
        }
        if (cand.julia) {
            auto orbit = forward_orbit(f, c.point, k_max);
            for (int k = 1; k <= k_max; ++k) {
                PrzytyckiRow row;
                row.k = k;
                row.distance = chordal_dist(orbit[k], c.point);
                row.bound = 0.1 * std::pow(base, -(k - 1));
                row.pass = row.distance >= row.bound;
                if (!row.pass)
                    ++rep.violations;
                cand.rows.push_back(row);
            }
        }
        rep.critical.push_back(std::move(cand));
    }
    return rep;
}

struct BezoutRow {
    int k = 0;
    long overlap = 0;
    double bound = 0.0;
    bool pass = true;
    std::optional<long> cross_check;  // non-exact repelling records of R_k
    bool failed = false;
    std::string note;
};

struct BezoutReport {
    std::vector<BezoutRow> rows;
    int violations = 0;
};

/// Counts the distinct points of the union of R_j over proper divisors j of k.
inline BezoutReport bezout_overlap_check(const RationalMap<double>& f, int k_max, const DiagnosticsOptions& opts = {})
{
    BezoutReport rep;
    std::map<int, PeriodicSet<double>> cache;
    auto get = [&](int j) -> const PeriodicSet<double>& {
        auto it = cache.find(j);
        if (it == cache.end())
            it = cache.emplace(j, periodic_points(f, j, opts.periodic)).first;
        return it->second;
    };
    const double tol = opts.periodic.cluster_radius;
    for (int k = 1; k <= k_max; ++k) {
        BezoutRow row;
        row.k = k;
        row.bound = 2.0 * k * std::pow(static_cast<double>(f.degree()), k / 2.0);
        try {
            std::vector<ProjectivePoint<double>> seen;
            for (int j : proper_divisors(k))
                for (const auto& r : get(j).records) {
                    if (r.stability != Stability::repelling)
                        continue;
                    bool dup = false;
                    for (const auto& s : seen)
                        dup = dup || chordal_dist(s, r.point) <= tol;
                    if (!dup)
                        seen.push_back(r.point);
                }
            row.overlap = static_cast<long>(seen.size());
            long dk = checked_power(f.degree(), k, opts.cross_check_limit);
            if (dk > 0) {
                long n = 0;
                for (const auto& r : get(k).records)
                    if (r.stability == Stability::repelling && !r.exact_period)
                        ++n;
                row.cross_check = n;
            }
            row.pass = row.overlap <= row.bound;
        } catch (const RootFindingFailure& e) {
            row.failed = true;
            row.note = e.what();
        }
        if (!row.pass)
            ++rep.violations;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace lyap
