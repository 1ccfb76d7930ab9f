#pragma once

#include <algorithm>

#include "ratmap.hpp"

namespace lyap {

/// Fibonacci-lattice point i of n on the Riemann sphere, as a projective point.
inline ProjectivePoint<double> sphere_sample(int i, int n)
{
    const double golden = 2.399963229728653;  // pi (3 - sqrt 5)
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * i;
    std::complex<double> w(r * std::cos(phi), r * std::sin(phi));
    if (z <= 0)
        return ProjectivePoint<double>(w, 1.0 - z);
    return ProjectivePoint<double>(1.0 + z, std::conj(w));
}

struct SupEstimate {
    double value = 0.0;
    ProjectivePoint<double> argmax;
    bool lower_estimate = true;  // sampling can only under-estimate the supremum
};

/// Estimate of sup f^# over the sphere: stratified samples, then a compass
/// search in a local chart from the best few samples.
inline SupEstimate sup_chordal_derivative(const RationalMap<double>& f, int n_samples = 4096, int n_starts = 8)
{
    using C = std::complex<double>;
    std::vector<std::pair<double, int>> scored;
    scored.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i)
        scored.emplace_back(chordal_derivative(f, sphere_sample(i, n_samples)), i);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    SupEstimate best;
    best.value = scored.front().first;
    best.argmax = sphere_sample(scored.front().second, n_samples);
    const C dirs[] = {C(1, 0), C(-1, 0), C(0, 1), C(0, -1)};
    const int starts = std::min(n_starts, n_samples);
    for (int s = 0; s < starts; ++s) {
        ProjectivePoint<double> p = sphere_sample(scored[s].second, n_samples);
        bool outer = std::abs(p.y()) < std::abs(p.x());
        C u = outer ? p.y() / p.x() : p.x() / p.y();
        auto point = [&](C v) { return outer ? ProjectivePoint<double>(C(1), v) : ProjectivePoint<double>(v, C(1)); };
        double val = scored[s].first;
        double h = 2.0 / std::sqrt(static_cast<double>(n_samples));
        while (h > 1e-12) {
            double bv = val;
            C bu = u;
            for (const C& d : dirs) {
                C trial = u + h * d;
                double tv = chordal_derivative(f, point(trial));
                if (tv > bv) {
                    bv = tv;
                    bu = trial;
                }
            }
            if (bv > val) {
                val = bv;
                u = bu;
            } else {
                h /= 2;
            }
        }
        if (val > best.value) {
            best.value = val;
            best.argmax = point(u);
        }
    }
    return best;
}

} // namespace lyap
