#pragma once

#include <json.hpp>

#include "diagnostics.hpp"
#include "oracle.hpp"
#include "padic.hpp"

namespace lyap {

using Json = nlohmann::ordered_json;

inline Json number_json(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

inline Json point_json(const ProjectivePoint<double>& p)
{
    if (p.is_infinity())
        return "inf";
    auto v = p.value();
    return Json::array({number_json(v.real()), number_json(v.imag())});
}

inline Json to_json(const EstimateRow& r)
{
    Json j;
    j["k"] = r.k;
    j["n_points"] = r.n_points;
    j["n_count"] = r.n_count;
    j["estimate"] = r.failed ? Json("nan") : number_json(r.estimate);
    j["oracle"] = r.oracle ? number_json(*r.oracle) : Json(nullptr);
    auto e = r.abs_error();
    j["abs_error"] = e ? number_json(*e) : Json(nullptr);
    if (r.std_error)
        j["std_error"] = number_json(*r.std_error);
    j["runtime_ms"] = r.runtime_ms;
    j["failed"] = r.failed;
    j["minus_infinity"] = r.minus_infinity;
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

inline Json to_json(const EstimateSeries& s)
{
    Json j;
    j["estimator"] = s.estimator;
    j["rows"] = Json::array();
    for (const auto& r : s.rows)
        j["rows"].push_back(to_json(r));
    j["warnings"] = s.warnings;
    return j;
}

inline Json to_json(const OracleResult& r)
{
    Json j;
    j["value"] = number_json(r.value);
    j["method"] = to_string(r.method);
    j["uncertainty"] = number_json(r.uncertainty);
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

inline Json to_json(const OrbitWitness& w)
{
    Json j;
    j["critical_point"] = point_json(w.critical_point);
    j["j"] = w.j;
    j["distance"] = number_json(w.distance);
    j["log_distance"] = number_json(w.log_distance);
    if (w.log_radius != 0.0)
        j["log_radius"] = number_json(w.log_radius);
    return j;
}

inline Json to_json(const TargetReport& r)
{
    Json j;
    j["target"] = point_json(r.target);
    j["horizon"] = r.horizon;
    j["exceptional"] = r.exceptional;
    j["preperiodic_critical_orbit_hit"] = r.preperiodic_hit;
    j["preperiodic_witness"] = r.preperiodic_witness ? to_json(*r.preperiodic_witness) : Json(nullptr);
    j["shrinking_ball_hit"] = r.shrinking_ball_hit;
    j["shrinking_ball_witness"] = r.shrinking_ball_witness ? to_json(*r.shrinking_ball_witness) : Json(nullptr);
    j["rejected"] = r.rejected();
    j["critical_points"] = Json::array();
    for (const auto& c : r.critical) {
        Json cj;
        cj["point"] = point_json(c.point);
        cj["multiplicity"] = c.multiplicity;
        cj["orbit"] = to_string(c.orbit);
        if (c.period > 0) {
            cj["preperiod"] = c.preperiod;
            cj["period"] = c.period;
        }
        j["critical_points"].push_back(cj);
    }
    j["summary"] = describe(r);
    return j;
}

inline Json to_json(const PotentialReport& r)
{
    Json j;
    j["point"] = point_json(r.point);
    j["reference_target"] = point_json(r.reference_target);
    j["reference_depth"] = r.reference_depth;
    j["reference"] = number_json(r.reference);
    j["rows"] = Json::array();
    for (const auto& row : r.rows) {
        Json rj;
        rj["k"] = row.k;
        rj["n_repelling"] = row.n_repelling;
        rj["potential"] = number_json(row.potential);
        rj["potential_raw"] = number_json(row.potential_raw);
        rj["discrepancy"] = number_json(row.discrepancy);
        rj["failed"] = row.failed;
        if (!row.note.empty())
            rj["note"] = row.note;
        j["rows"].push_back(rj);
    }
    return j;
}

inline Json to_json(const PrzytyckiReport& r)
{
    Json j;
    j["sup_chordal_derivative"] = number_json(r.sup.value);
    j["sup_is_lower_estimate"] = r.sup.lower_estimate;
    j["violations"] = r.violations;
    j["critical_points"] = Json::array();
    for (const auto& c : r.critical) {
        Json cj;
        cj["point"] = point_json(c.point);
        cj["orbit"] = to_string(c.orbit);
        cj["julia_critical"] = c.julia;
        cj["basis"] = c.basis;
        cj["rows"] = Json::array();
        for (const auto& row : c.rows)
            cj["rows"].push_back({{"k", row.k}, {"distance", number_json(row.distance)}, {"bound", number_json(row.bound)}, {"pass", row.pass}});
        j["critical_points"].push_back(cj);
    }
    return j;
}

inline Json to_json(const BezoutReport& r)
{
    Json j;
    j["violations"] = r.violations;
    j["rows"] = Json::array();
    for (const auto& row : r.rows) {
        Json rj{{"k", row.k}, {"overlap", row.overlap}, {"bound", number_json(row.bound)}, {"pass", row.pass}};
        rj["cross_check"] = row.cross_check ? Json(*row.cross_check) : Json(nullptr);
        rj["failed"] = row.failed;
        if (!row.note.empty())
            rj["note"] = row.note;
        j["rows"].push_back(rj);
    }
    return j;
}

/// Coefficient entry: a number, [re, im], or a string such as "1-2i".
inline std::complex<double> complex_from_json(const Json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string())
        return parse_complex(j.get<std::string>());
    throw ConfigError("bad coefficient " + j.dump());
}

/// {"num": [...], "den": [...]} with ascending coefficients.
inline RationalMap<double> map_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ConfigError("map needs \"num\" and \"den\" coefficient arrays");
    std::vector<std::complex<double>> num, den;
    for (const auto& c : j.at("num"))
        num.push_back(complex_from_json(c));
    for (const auto& c : j.at("den"))
        den.push_back(complex_from_json(c));
    return RationalMap<double>::build(std::move(num), std::move(den));
}

inline padic::QMap qmap_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ConfigError("map needs \"num\" and \"den\" coefficient arrays");
    auto read = [](const Json& arr) {
        std::vector<padic::Rational> out;
        for (const auto& c : arr) {
            if (c.is_number_integer())
                out.emplace_back(c.get<long long>());
            else if (c.is_string())
                out.push_back(padic::parse_rational(c.get<std::string>()));
            else
                throw ConfigError("p-adic coefficients must be integers or \"n/m\" strings, got " + c.dump());
        }
        return out;
    };
    return padic::make_qmap(read(j.at("num")), read(j.at("den")));
}

} // namespace lyap
