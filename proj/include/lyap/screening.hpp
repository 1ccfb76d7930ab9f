#pragma once

#include <optional>
#include <sstream>

#include "ratmap.hpp"

namespace lyap {

struct ScanOptions {
    int horizon = 64;
    /// Chordal tolerance for a hit on a preperiodic critical orbit.
    double orbit_tolerance = 1e-9;
    /// Tolerance for matching a detected exceptional point.
    double exceptional_tolerance = 1e-6;
    OrbitOptions orbit;
    SolverOptions solver;
};

struct OrbitWitness {
    int critical_index = -1;
    ProjectivePoint<double> critical_point;
    int j = 0;
    double distance = 0.0;
    double log_distance = 0.0;
    double log_radius = 0.0;  // -d^{j/2} for the shrinking-ball criterion
};

struct CriticalBasis {
    ProjectivePoint<double> point;
    int multiplicity = 1;
    OrbitClass orbit = OrbitClass::undetermined;
    int preperiod = -1;
    int period = -1;
};

/// Verdicts of the finite-horizon screen of a target point.
struct TargetReport {
    ProjectivePoint<double> target;
    int horizon = 0;
    bool exceptional = false;
    bool preperiodic_hit = false;
    std::optional<OrbitWitness> preperiodic_witness;
    bool shrinking_ball_hit = false;
    std::optional<OrbitWitness> shrinking_ball_witness;
    std::vector<CriticalBasis> critical;

    /// Exceptional points and preperiodic critical orbits are refused.
    bool rejected() const { return exceptional || preperiodic_hit; }
    bool clean() const { return !exceptional && !preperiodic_hit && !shrinking_ball_hit; }
};

inline std::string describe(const TargetReport& r)
{
    std::ostringstream s;
    s << "target " << describe_point(r.target) << ":";
    if (r.exceptional)
        s << " exceptional point;";
    if (r.preperiodic_witness) {
        const auto& w = *r.preperiodic_witness;
        s << " on the orbit of preperiodic critical point " << describe_point(w.critical_point) << " (j=" << w.j
          << ", distance " << w.distance << ");";
    }
    if (r.shrinking_ball_witness) {
        const auto& w = *r.shrinking_ball_witness;
        s << " within exp(-d^{j/2}) of the orbit of critical point " << describe_point(w.critical_point) << " (j=" << w.j
          << ", log distance " << w.log_distance << " < " << w.log_radius << ");";
    }
    if (r.clean())
        s << " clean up to horizon " << r.horizon;
    return s.str();
}

/// Screens a target for the preimage estimator: (i) exceptional points,
/// (ii) points on the orbit f^j(c), j >= 0, of a preperiodic critical point,
/// (iii) points within exp(-d^{j/2}) of f^j(c) for any other critical point.
/// An undetermined orbit only converges to a cycle, so it gets check (iii).
/// The ball test runs in log space.
inline TargetReport bad_target_scan(const RationalMap<double>& f, const ProjectivePoint<double>& a, const ScanOptions& opts = {})
{
    TargetReport rep;
    rep.target = a;
    rep.horizon = opts.horizon;

    for (const auto& e : exceptional_points(f, opts.solver, opts.exceptional_tolerance))
        if (chordal_dist(e, a) <= opts.exceptional_tolerance)
            rep.exceptional = true;

    auto crit = classify_critical_orbits(f, critical_points(f, opts.solver), opts.orbit);
    const double d = f.degree();
    for (std::size_t ci = 0; ci < crit.points.size(); ++ci) {
        const auto& c = crit.points[ci];
        rep.critical.push_back({c.point, c.multiplicity, c.orbit, c.preperiod, c.period});
        auto orbit = forward_orbit(f, c.point, opts.horizon);
        if (c.orbit == OrbitClass::preperiodic && !rep.preperiodic_witness) {
            for (int j = 0; j <= opts.horizon; ++j) {
                double dist = chordal_dist(orbit[j], a);
                if (dist <= opts.orbit_tolerance) {
                    OrbitWitness w;
                    w.critical_index = static_cast<int>(ci);
                    w.critical_point = c.point;
                    w.j = j;
                    w.distance = dist;
                    w.log_distance = std::log(dist);
                    rep.preperiodic_hit = true;
                    rep.preperiodic_witness = w;
                    break;
                }
            }
        }
        if (c.orbit != OrbitClass::preperiodic && !rep.shrinking_ball_witness) {
            for (int j = 1; j <= opts.horizon; ++j) {
                double dist = chordal_dist(orbit[j], a);
                double logd = std::log(dist);
                double logr = -std::pow(d, j / 2.0);
                if (logd < logr) {
                    OrbitWitness w;
                    w.critical_index = static_cast<int>(ci);
                    w.critical_point = c.point;
                    w.j = j;
                    w.distance = dist;
                    w.log_distance = logd;
                    w.log_radius = logr;
                    rep.shrinking_ball_hit = true;
                    rep.shrinking_ball_witness = w;
                    break;
                }
            }
        }
    }
    return rep;
}

} // namespace lyap
