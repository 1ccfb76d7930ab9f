#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "io.hpp"

namespace lyap::cli {

inline constexpr const char* tool_version = "lyap 1.0.0";

enum ExitCode { ok = 0, config_error = 1, solver_failure = 2, target_rejected = 3 };

struct RunConfig {
    std::string command;
    std::string preset;
    std::string map;  // inline JSON or a path to a JSON file
    int kmax = 8;
    std::string target;
    std::string mode = "full";
    std::uint64_t seed = 0;
    int precision_bits = 53;
    unsigned long prime = 0;
    std::string out;
    std::string format = "csv";
    bool force = false;
    std::string variant = "both";
    int horizon = 64;
    int burn_in = 30;
    int samples = 10000;
    int przytycki_kmax = 20;
    bool no_timing = false;

    Json to_json() const
    {
        Json j;
        j["command"] = command;
        j["preset"] = preset;
        j["map"] = map;
        j["kmax"] = kmax;
        j["target"] = target;
        j["mode"] = mode;
        j["seed"] = seed;
        j["precision_bits"] = precision_bits;
        j["prime"] = prime;
        j["out"] = out;
        j["format"] = format;
        j["force"] = force;
        j["variant"] = variant;
        j["horizon"] = horizon;
        j["burn_in"] = burn_in;
        j["samples"] = samples;
        j["przytycki_kmax"] = przytycki_kmax;
        j["no_timing"] = no_timing;
        return j;
    }
};

inline Json metadata(const RunConfig& cfg)
{
    Json j;
    j["tool"] = tool_version;
    j["config"] = cfg.to_json();
    return j;
}

inline Json read_json_text(const std::string& text_or_path)
{
    std::string text = text_or_path;
    if (!text.empty() && text.front() != '{') {
        std::ifstream in(text_or_path);
        if (!in)
            throw ConfigError("cannot open '" + text_or_path + "'");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

struct SampleMode {
    bool sampled = false;
    int n = 0;
};

inline SampleMode parse_mode(const std::string& mode)
{
    if (mode == "full")
        return {};
    if (mode.rfind("mc:", 0) == 0) {
        try {
            std::size_t used = 0;
            int n = std::stoi(mode.substr(3), &used);
            if (used == mode.size() - 3 && n >= 2)
                return {true, n};
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("mode must be 'full' or 'mc:N' with N >= 2, got '" + mode + "'");
}

inline void validate(const RunConfig& cfg)
{
    if (cfg.preset.empty() == cfg.map.empty())
        throw ConfigError("give exactly one of --preset and --map");
    if (cfg.kmax < 1 || cfg.kmax > 64)
        throw ConfigError("kmax must be between 1 and 64");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    if (cfg.variant != "both" && cfg.variant != "plain" && cfg.variant != "strict")
        throw ConfigError("variant must be both, plain or strict");
    if (cfg.horizon < 1 || cfg.burn_in < 1 || cfg.samples < 2 || cfg.przytycki_kmax < 1)
        throw ConfigError("horizon, burn_in, przytycki_kmax must be positive and samples >= 2");
    ValuedField field = cfg.prime ? ValuedField(NonArchimedean{cfg.prime}) : ValuedField(Archimedean{cfg.precision_bits});
    lyap::validate(field);
    if (cfg.prime && cfg.command != "padic" && cfg.command != "oracle")
        throw ConfigError("--prime is only supported by the padic and oracle commands");
    parse_mode(cfg.mode);
}

inline RationalMap<double> resolve_map(const RunConfig& cfg)
{
    if (!cfg.preset.empty())
        return make_map(cfg.preset);
    return map_from_json(read_json_text(cfg.map));
}

inline std::optional<Preset> resolve_preset(const RunConfig& cfg)
{
    if (cfg.preset.empty())
        return std::nullopt;
    return parse_preset(cfg.preset);
}

/// Best available reference value: closed form, then the Green formula.
inline std::optional<OracleResult> default_oracle(const RunConfig& cfg, const RationalMap<double>& f)
{
    if (auto p = resolve_preset(cfg)) {
        try {
            return closed_form(*p);
        } catch (const UnknownPreset&) {
        }
    }
    if (f.is_polynomial())
        return lyapunov_green(f);
    return std::nullopt;
}

class Output {
public:
    explicit Output(std::ostream& fallback) : fallback_(fallback) {}

    void write(const std::string& path, const std::string& text)
    {
        if (path.empty()) {
            fallback_ << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write '" + path + "'");
        f << text;
    }

private:
    std::ostream& fallback_;
};

inline std::string with_suffix(const std::string& out, const std::string& suffix)
{
    if (out.empty())
        return out;
    std::filesystem::path p(out);
    auto ext = p.has_extension() ? p.extension().string() : std::string(".csv");
    return (p.parent_path() / (p.stem().string() + suffix + ext)).string();
}

inline std::string csv_text(const RunConfig& cfg, const EstimateSeries& s, const Json& extra = Json::object())
{
    std::ostringstream o;
    o << "# tool: " << tool_version << '\n';
    o << "# config: " << cfg.to_json().dump() << '\n';
    o << "# estimator: " << s.estimator << '\n';
    for (const auto& [k, v] : extra.items())
        o << "# " << k << ": " << v.dump() << '\n';
    for (const auto& w : s.warnings)
        o << "# warning: " << w << '\n';
    write_csv(o, s, !cfg.no_timing);
    return o.str();
}

inline std::string json_text(const Json& j) { return j.dump(2) + '\n'; }

template <class Real>
std::pair<EstimateSeries, EstimateSeries> run_rep(const RationalMap<double>& f, int kmax)
{
    return rep_series(f.template cast<Real>(), kmax);
}

template <class Real>
EstimateSeries run_preimage(const RationalMap<double>& f, const ProjectivePoint<double>& a, int kmax, const PreimageMode& mode,
                            const PreimageOptions& opts)
{
    return estimator_preimage(f.template cast<Real>(), a.template cast<Real>(), kmax, mode, opts);
}

inline int exit_for(const std::vector<const EstimateSeries*>& series)
{
    for (const auto* s : series)
        if (s->has_failures())
            return solver_failure;
    return ok;
}

inline void strip_timing(EstimateSeries& s, const RunConfig& cfg)
{
    if (cfg.no_timing)
        for (auto& r : s.rows)
            r.runtime_ms = 0.0;
}

inline int cmd_rep(const RunConfig& cfg, Output& out)
{
    auto f = resolve_map(cfg);
    std::pair<EstimateSeries, EstimateSeries> both;
    if (cfg.precision_bits <= 53)
        both = run_rep<double>(f, cfg.kmax);
    else if (cfg.precision_bits <= 113)
        both = run_rep<Float128>(f, cfg.kmax);
    else
        both = run_rep<Float256>(f, cfg.kmax);
    auto oracle = default_oracle(cfg, f);
    std::vector<EstimateSeries*> chosen;
    if (cfg.variant != "strict")
        chosen.push_back(&both.first);
    if (cfg.variant != "plain")
        chosen.push_back(&both.second);
    Json extra;
    if (oracle)
        extra["oracle"] = to_json(*oracle);
    for (auto* s : chosen) {
        strip_timing(*s, cfg);
        if (oracle)
            s->attach_oracle(oracle->value);
    }
    if (cfg.format == "json") {
        Json j;
        j["meta"] = metadata(cfg);
        if (oracle)
            j["meta"]["oracle"] = to_json(*oracle);
        j["series"] = Json::array();
        for (auto* s : chosen)
            j["series"].push_back(to_json(*s));
        out.write(cfg.out, json_text(j));
    } else {
        for (auto* s : chosen) {
            std::string path = cfg.out.empty() ? "" : with_suffix(cfg.out, "_" + s->estimator);
            out.write(path, csv_text(cfg, *s, extra));
        }
    }
    std::vector<const EstimateSeries*> c(chosen.begin(), chosen.end());
    return exit_for(c);
}

inline ProjectivePoint<double> require_target(const RunConfig& cfg)
{
    if (cfg.target.empty())
        throw ConfigError("this command needs --target");
    return parse_point(cfg.target);
}

inline int cmd_preimage(const RunConfig& cfg, Output& out, std::ostream& err)
{
    auto f = resolve_map(cfg);
    auto a = require_target(cfg);
    ScanOptions scan;
    scan.horizon = cfg.horizon;
    auto report = bad_target_scan(f, a, scan);
    if (report.rejected() && !cfg.force) {
        err << "target rejected: " << describe(report) << '\n';
        if (cfg.format == "json") {
            Json j;
            j["meta"] = metadata(cfg);
            j["meta"]["target_report"] = to_json(report);
            out.write(cfg.out, json_text(j));
        }
        return target_rejected;
    }
    auto sm = parse_mode(cfg.mode);
    PreimageMode mode = sm.sampled ? PreimageMode::monte_carlo(sm.n, cfg.seed) : PreimageMode::full();
    PreimageOptions opts;
    opts.force = true;  // screened above
    opts.scan = scan;
    EstimateSeries s;
    if (cfg.precision_bits <= 53)
        s = run_preimage<double>(f, a, cfg.kmax, mode, opts);
    else if (cfg.precision_bits <= 113)
        s = run_preimage<Float128>(f, a, cfg.kmax, mode, opts);
    else
        s = run_preimage<Float256>(f, a, cfg.kmax, mode, opts);
    if (report.rejected())
        s.warnings.push_back("forced past screen: " + describe(report));
    else if (report.shrinking_ball_hit)
        s.warnings.push_back(describe(report));
    strip_timing(s, cfg);
    auto oracle = default_oracle(cfg, f);
    if (oracle)
        s.attach_oracle(oracle->value);
    if (cfg.format == "json") {
        Json j;
        j["meta"] = metadata(cfg);
        j["meta"]["target_report"] = to_json(report);
        if (oracle)
            j["meta"]["oracle"] = to_json(*oracle);
        j["series"] = Json::array({to_json(s)});
        out.write(cfg.out, json_text(j));
    } else {
        Json extra;
        extra["target_report"] = describe(report);
        if (oracle)
            extra["oracle"] = to_json(*oracle);
        out.write(cfg.out, csv_text(cfg, s, extra));
    }
    return exit_for({&s});
}

/// Preset over Q: power, chebyshev, lattes4, and quadratic with a rational c.
inline padic::QMap preset_qmap(const std::string& spec)
{
    using padic::Rational;
    auto p = parse_preset(spec);
    std::vector<Rational> num(p.degree + 1, Rational(0)), den(p.degree + 1, Rational(0));
    switch (p.kind) {
    case Preset::Kind::power:
        num[p.degree] = 1;
        den[0] = 1;
        break;
    case Preset::Kind::chebyshev: {
        auto t = chebyshev_coefficients(p.degree);
        for (int i = 0; i <= p.degree; ++i)
            num[i] = Rational(static_cast<long long>(std::llround(t[i])));
        den[0] = 1;
        break;
    }
    case Preset::Kind::quadratic:
        num = {padic::parse_rational(spec.substr(spec.find(':') + 1)), 0, 1};
        den = {1, 0, 0};
        break;
    case Preset::Kind::lattes:
        num = {1, 0, 2, 0, 1};
        den = {0, -4, 0, 4, 0};
        break;
    }
    return padic::make_qmap(num, den);
}

inline int cmd_oracle(const RunConfig& cfg, Output& out)
{
    Json j;
    j["meta"] = metadata(cfg);
    OracleResult r;
    bool done = false;
    if (auto p = resolve_preset(cfg)) {
        ValuedField field = cfg.prime ? ValuedField(NonArchimedean{cfg.prime}) : ValuedField(Archimedean{cfg.precision_bits});
        try {
            r = closed_form(*p, field);
            done = true;
        } catch (const UnknownPreset&) {
            if (cfg.prime)
                throw;
        }
    } else if (cfg.prime) {
        throw ConfigError("non-archimedean oracles exist only for power presets");
    }
    if (!done) {
        auto f = resolve_map(cfg);
        if (f.is_polynomial()) {
            r = lyapunov_green(f);
        } else {
            BirkhoffOptions b;
            b.burn_in = cfg.burn_in;
            b.samples = parse_mode(cfg.mode).sampled ? parse_mode(cfg.mode).n : cfg.samples;
            b.seed = cfg.seed;
            b.force = cfg.force;
            b.scan.horizon = cfg.horizon;
            auto a = cfg.target.empty() ? clean_target(f) : parse_point(cfg.target);
            r = lyapunov_birkhoff(f, a, b);
            j["meta"]["target"] = point_json(a);
        }
    }
    j["oracle"] = to_json(r);
    if (cfg.format == "json") {
        out.write(cfg.out, json_text(j));
    } else {
        std::ostringstream o;
        o << "# tool: " << tool_version << '\n' << "# config: " << cfg.to_json().dump() << '\n';
        o << "method,value,uncertainty\n" << to_string(r.method) << ',' << format_number(r.value) << ','
          << format_number(r.uncertainty) << '\n';
        if (!r.note.empty())
            o << "# note: " << r.note << '\n';
        out.write(cfg.out, o.str());
    }
    return ok;
}

inline int cmd_scan(const RunConfig& cfg, Output& out)
{
    auto f = resolve_map(cfg);
    ScanOptions scan;
    scan.horizon = cfg.horizon;
    auto report = bad_target_scan(f, require_target(cfg), scan);
    if (cfg.format == "json") {
        Json j;
        j["meta"] = metadata(cfg);
        j["report"] = to_json(report);
        out.write(cfg.out, json_text(j));
    } else {
        std::ostringstream o;
        o << (report.rejected() ? "REJECTED" : report.clean() ? "CLEAN" : "WARNING") << ' ' << describe(report) << '\n';
        for (const auto& c : report.critical)
            o << "  critical " << describe_point(c.point) << " x" << c.multiplicity << ": " << to_string(c.orbit) << '\n';
        out.write(cfg.out, o.str());
    }
    return ok;
}

inline int cmd_diag(const RunConfig& cfg, Output& out, std::ostream& err)
{
    auto f = resolve_map(cfg);
    auto crit = critical_points(f);
    auto c = cfg.target.empty() ? crit.points.front().point : parse_point(cfg.target);
    auto pot = potential_convergence_check(f, c, cfg.kmax);
    auto prz = przytycki_bound_check(f, cfg.przytycki_kmax);
    auto bez = bezout_overlap_check(f, cfg.kmax);
    Json j;
    j["meta"] = metadata(cfg);
    j["potential"] = to_json(pot);
    j["przytycki"] = to_json(prz);
    j["bezout"] = to_json(bez);
    if (cfg.format == "json") {
        out.write(cfg.out, json_text(j));
    } else {
        std::ostringstream head;
        head << "# tool: " << tool_version << '\n' << "# config: " << cfg.to_json().dump() << '\n';
        std::ostringstream a, b, d;
        a << head.str() << "k,n_repelling,potential,potential_raw,reference,discrepancy\n";
        for (const auto& r : pot.rows)
            a << r.k << ',' << r.n_repelling << ',' << (r.failed ? "nan" : format_number(r.potential)) << ','
              << format_number(r.potential_raw) << ',' << format_number(r.reference) << ',' << format_number(r.discrepancy) << '\n';
        b << head.str() << "critical,k,distance,bound,pass\n";
        for (const auto& cand : prz.critical)
            for (const auto& r : cand.rows)
                b << describe_point(cand.point) << ',' << r.k << ',' << format_number(r.distance) << ','
                  << format_number(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
        d << head.str() << "k,overlap,bound,pass\n";
        for (const auto& r : bez.rows)
            d << r.k << ',' << r.overlap << ',' << format_number(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
        out.write(with_suffix(cfg.out, "_potential"), a.str());
        out.write(with_suffix(cfg.out, "_przytycki"), b.str());
        out.write(with_suffix(cfg.out, "_bezout"), d.str());
    }
    if (prz.violations || bez.violations)
        err << "warning: " << prz.violations << " Przytycki and " << bez.violations << " Bezout bound violations\n";
    bool failed = false;
    for (const auto& r : pot.rows)
        failed = failed || r.failed;
    for (const auto& r : bez.rows)
        failed = failed || r.failed;
    return failed ? solver_failure : ok;
}

inline int cmd_padic(const RunConfig& cfg, Output& out)
{
    if (!cfg.prime)
        throw ConfigError("padic needs --prime");
    const unsigned long p = cfg.prime;
    auto f = cfg.preset.empty() ? qmap_from_json(read_json_text(cfg.map)) : preset_qmap(cfg.preset);
    auto g = padic::normalize(f, p);
    Json j;
    j["meta"] = metadata(cfg);
    j["prime"] = p;
    auto res = g.resultant();
    j["resultant"] = padic::to_string(res);
    j["resultant_valuation"] = res == 0 ? Json("inf") : Json(padic::valuation(res, p));
    j["good_reduction"] = padic::good_reduction_test(f, p);
    if (auto preset = resolve_preset(cfg)) {
        try {
            auto r = closed_form(*preset, NonArchimedean{p});
            j["L"] = number_json(r.value);
            j["method"] = to_string(r.method);
            if (!r.note.empty())
                j["note"] = r.note;
        } catch (const UnknownPreset&) {
            j["L"] = nullptr;
            j["note"] = "no closed form for this map";
        }
    }
    if (!cfg.target.empty()) {
        padic::PAdicRational z{padic::parse_rational(cfg.target), p};
        auto v = padic::padic_chordal_derivative(f, z);
        j["target"] = padic::to_string(z.value);
        j["chordal_derivative"] = number_json(v.value());
        j["chordal_derivative_exponent"] = v.is_zero() ? Json("inf") : Json(v.exponent());
    }
    if (cfg.format == "json") {
        out.write(cfg.out, json_text(j));
    } else {
        std::ostringstream o;
        o << "# tool: " << tool_version << '\n' << "# config: " << cfg.to_json().dump() << '\n';
        o << "key,value\n";
        for (const auto& [k, v] : j.items())
            if (k != "meta")
                o << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        out.write(cfg.out, o.str());
    }
    return ok;
}

inline void apply_config(RunConfig& cfg, const Json& j, const CLI::App& sub)
{
    static const std::set<std::string> known{"preset", "map", "kmax", "target", "mode", "seed", "precision_bits", "prime", "out",
                                             "format", "force", "variant", "horizon", "burn_in", "samples", "przytycki_kmax",
                                             "no_timing"};
    auto given = [&](const char* flag) { return sub.count(flag) > 0; };
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "preset" && !given("--preset"))
                cfg.preset = value.get<std::string>();
            else if (key == "map" && !given("--map"))
                cfg.map = value.is_string() ? value.get<std::string>() : value.dump();
            else if (key == "kmax" && !given("--kmax"))
                cfg.kmax = value.get<int>();
            else if (key == "target" && !given("--target"))
                cfg.target = value.is_string() ? value.get<std::string>() : value.dump();
            else if (key == "mode" && !given("--mode"))
                cfg.mode = value.get<std::string>();
            else if (key == "seed" && !given("--seed"))
                cfg.seed = value.get<std::uint64_t>();
            else if (key == "precision_bits" && !given("--precision-bits"))
                cfg.precision_bits = value.get<int>();
            else if (key == "prime" && !given("--prime"))
                cfg.prime = value.get<unsigned long>();
            else if (key == "out" && !given("--out"))
                cfg.out = value.get<std::string>();
            else if (key == "format" && !given("--format"))
                cfg.format = value.get<std::string>();
            else if (key == "force" && !given("--force"))
                cfg.force = value.get<bool>();
            else if (key == "variant" && !given("--variant"))
                cfg.variant = value.get<std::string>();
            else if (key == "horizon" && !given("--horizon"))
                cfg.horizon = value.get<int>();
            else if (key == "burn_in" && !given("--burn-in"))
                cfg.burn_in = value.get<int>();
            else if (key == "samples" && !given("--samples"))
                cfg.samples = value.get<int>();
            else if (key == "przytycki_kmax" && !given("--przytycki-kmax"))
                cfg.przytycki_kmax = value.get<int>();
            else if (key == "no_timing" && !given("--no-timing"))
                cfg.no_timing = value.get<bool>();
            else if (!known.contains(key))
                throw ConfigError("unknown config key '" + key + "'");
        } catch (const Json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

/// Entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Lyapunov exponent estimators for rational maps of the Riemann sphere", "lyap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);
    RunConfig cfg;
    std::string config_path;
    const char* names[] = {"rep", "preimage", "oracle", "scan", "diag", "padic"};
    const char* help[] = {"repelling periodic point estimator (plain and strict)", "iterated preimage estimator",
                          "reference value: closed form, Green formula or Birkhoff average",
                          "screen a target for the preimage estimator", "potential, Przytycki and Bezout diagnostics",
                          "exact non-archimedean checks"};
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 6; ++i) {
        auto* s = app.add_subcommand(names[i], help[i]);
        s->add_option("--preset", cfg.preset, "power:d, chebyshev:d, quadratic:c or lattes4");
        s->add_option("--map", cfg.map, "map as JSON {\"num\": [...], \"den\": [...]} or a path to such a file");
        s->add_option("--kmax", cfg.kmax, "largest iterate k");
        s->add_option("--target", cfg.target, "target point (complex, \"inf\", or n/m for padic)");
        s->add_option("--mode", cfg.mode, "full or mc:N");
        s->add_option("--seed", cfg.seed, "random seed");
        s->add_option("--precision-bits", cfg.precision_bits, "working precision (53, up to 113, up to 256)");
        s->add_option("--prime", cfg.prime, "prime p for the non-archimedean backend");
        s->add_option("--out", cfg.out, "output path (default stdout)");
        s->add_option("--format", cfg.format, "csv or json");
        s->add_flag("--force", cfg.force, "skip target screening");
        s->add_option("--variant", cfg.variant, "rep: both, plain or strict");
        s->add_option("--horizon", cfg.horizon, "critical orbit horizon for the target scan");
        s->add_option("--burn-in", cfg.burn_in, "Birkhoff path length");
        s->add_option("--samples", cfg.samples, "Birkhoff sample count");
        s->add_option("--przytycki-kmax", cfg.przytycki_kmax, "diag: largest k for the Przytycki check");
        s->add_flag("--no-timing", cfg.no_timing, "write 0 in the runtime column");
        s->add_option("--config", config_path, "JSON config file; explicit flags win");
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }
    CLI::App* sub = nullptr;
    for (auto* s : subs)
        if (s->parsed())
            sub = s;
    cfg.command = sub->get_name();
    Output output(out);
    try {
        if (!config_path.empty())
            apply_config(cfg, read_json_text(config_path), *sub);
        validate(cfg);
        if (cfg.command == "rep")
            return cmd_rep(cfg, output);
        if (cfg.command == "preimage")
            return cmd_preimage(cfg, output, err);
        if (cfg.command == "oracle")
            return cmd_oracle(cfg, output);
        if (cfg.command == "scan")
            return cmd_scan(cfg, output);
        if (cfg.command == "diag")
            return cmd_diag(cfg, output, err);
        return cmd_padic(cfg, output);
    } catch (const TargetRejected& e) {
        err << "target rejected: " << e.what() << '\n';
        return target_rejected;
    } catch (const RootFindingFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const NoConvergence& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }
}

} // namespace lyap::cli
