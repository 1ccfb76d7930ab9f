#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lyap {

/// One row of a convergence table.
struct EstimateRow {
    int k = 0;
    long n_points = 0;
    long n_count = 0;  // repelling points, or preimages/paths used
    double estimate = 0.0;
    std::optional<double> oracle;
    std::optional<double> std_error;  // sampled estimators only
    double runtime_ms = 0.0;
    bool failed = false;
    bool minus_infinity = false;  // a summand hit a critical point
    std::string note;

    std::optional<double> abs_error() const
    {
        if (!oracle || failed)
            return std::nullopt;
        return std::abs(estimate - *oracle);
    }
};

/// Tag values: rep, rep_strict, preimage, preimage_mc, oracle.
struct EstimateSeries {
    std::string estimator;
    std::vector<EstimateRow> rows;
    std::vector<std::string> warnings;

    bool has_failures() const
    {
        for (const auto& r : rows)
            if (r.failed)
                return true;
        return false;
    }

    void attach_oracle(double value)
    {
        for (auto& r : rows)
            r.oracle = value;
    }
};

inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_header(const EstimateSeries& s)
{
    const char* count = s.estimator.rfind("rep", 0) == 0 ? "n_repelling" : "n_preimages";
    return std::string("k,n_points,") + count + ",estimate,oracle,abs_error,runtime_ms";
}

/// Writes the fixed-order CSV table. Failed rows carry "nan" estimates.
inline void write_csv(std::ostream& out, const EstimateSeries& s, bool include_runtime = true)
{
    out << csv_header(s) << '\n';
    for (const auto& r : s.rows) {
        out << r.k << ',' << r.n_points << ',' << r.n_count << ','
            << (r.failed ? std::string("nan") : format_number(r.estimate)) << ','
            << (r.oracle ? format_number(*r.oracle) : std::string()) << ','
            << (r.abs_error() ? format_number(*r.abs_error()) : std::string()) << ','
            << (include_runtime ? format_number(r.runtime_ms) : std::string("0")) << '\n';
    }
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace lyap
