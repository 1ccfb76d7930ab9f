// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "lyap/cli.hpp"
#include "lyap/lyap.hpp"

using namespace lyap;
using P = ProjectivePoint<double>;
using C = std::complex<double>;

namespace {

const double ln2 = std::log(2.0);

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Detail {
    std::ostringstream s;
    bool pass = true;
    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass)
                s << "first failure: " << what << "; ";
            pass = false;
        }
    }
    Outcome done() { return {pass, s.str()}; }
};

const char* suite[] = {"power:2", "power:3", "chebyshev:2", "chebyshev:3", "quadratic:3", "quadratic:-1",
                       "quadratic:0.25", "quadratic:-0.12+0.75i", "lattes4"};

Outcome power_closed_form()
{
    Detail d;
    Stopwatch sw;
    double worst = 0;
    for (auto [deg, kmax] : {std::pair{2, 8}, std::pair{3, 5}}) {
        auto s = estimator_rep(make_map("power:" + std::to_string(deg)), kmax, false);
        for (const auto& r : s.rows) {
            double dk = std::pow(deg, r.k);
            worst = std::max(worst, std::abs(r.estimate - (dk - 1) / (dk + 1) * std::log(static_cast<double>(deg))));
        }
    }
    double secs = sw.elapsed_ms() / 1000;
    d.check(worst <= 1e-9, "closed form mismatch");
    d.check(secs <= 60, "runtime");
    d.s << "max error " << worst << ", " << secs << " s";
    return d.done();
}

Outcome strict_variant()
{
    Detail d;
    auto s = estimator_rep(make_map("power:2"), 8, true);
    double e2 = std::abs(s.rows[1].estimate - 0.4 * ln2);
    double e8 = std::abs(s.rows[7].estimate - ln2);
    d.check(e2 <= 1e-9, "k=2");
    d.check(e8 <= 5e-2, "k=8");
    d.s << "k=2 error " << e2 << ", k=8 error " << e8;
    return d.done();
}

Outcome power_preimage_exact()
{
    Detail d;
    auto s = estimator_preimage(make_map("power:2"), P::affine(1.0), 12);
    double worst = 0;
    for (const auto& r : s.rows)
        worst = std::max(worst, std::abs(r.estimate - ln2));
    d.check(s.rows.size() == 12 && worst <= 1e-12, "preimage rows");
    d.s << "max error " << worst;
    return d.done();
}

Outcome chebyshev()
{
    Detail d;
    auto f = make_map("chebyshev:2");
    double oracle = lyapunov_green(f).value;
    double rep = estimator_rep(f, 8, false).rows.back().estimate;
    double pre = estimator_preimage(f, P::affine(0.5), 10).rows.back().estimate;
    d.check(std::abs(oracle - ln2) <= 1e-12, "oracle");
    d.check(std::abs(rep - oracle) <= 5e-2, "rep");
    d.check(std::abs(pre - oracle) <= 5e-2, "preimage");
    d.s << "oracle " << oracle << ", rep " << rep << ", preimage " << pre;
    return d.done();
}

Outcome escaping_quadratic()
{
    Detail d;
    auto f = make_map("quadratic:3");
    auto green = lyapunov_green(f);
    double pre = estimator_preimage(f, P::affine(0.7), 10).rows.back().estimate;
    auto mc = lyapunov_birkhoff(f, P::affine(0.7));
    double combined = std::hypot(green.uncertainty, mc.uncertainty);
    d.check(std::abs(pre - green.value) <= 5e-2, "preimage");
    d.check(std::abs(mc.value - green.value) <= 3 * combined, "birkhoff");
    d.s << "green " << green.value << ", preimage " << pre << ", birkhoff " << mc.value << " +- " << mc.uncertainty;
    return d.done();
}

Outcome lattes()
{
    Detail d;
    auto f = make_map("lattes4");
    P a = P::affine(C(0.3, 0.2));
    auto mc = lyapunov_birkhoff(f, a);
    double pre = estimator_preimage(f, a, 7).rows.back().estimate;
    const double floor = 0.5 * std::log(4.0) - 1e-2;
    d.check(std::abs(mc.value - ln2) <= 5e-2 && mc.value >= floor, "birkhoff");
    d.check(std::abs(pre - ln2) <= 5e-2 && pre >= floor, "preimage");
    d.s << "birkhoff " << mc.value << " +- " << mc.uncertainty << ", preimage " << pre;
    return d.done();
}

Outcome positivity()
{
    Detail d;
    int rows = 0;
    double smallest = INFINITY;
    for (const char* name : suite) {
        auto f = make_map(name);
        int kmax = f.degree() == 2 ? 8 : f.degree() == 3 ? 5 : 4;
        auto [plain, strict] = rep_series(f, kmax);
        for (const auto* s : {&plain, &strict})
            for (const auto& r : s->rows) {
                ++rows;
                smallest = std::min(smallest, r.estimate);
                d.check(!r.failed && r.estimate >= 0, std::string(name) + " k=" + std::to_string(r.k));
            }
    }
    d.s << rows << " rows, smallest " << smallest;
    return d.done();
}

Outcome bezout()
{
    Detail d;
    int violations = 0, rows = 0;
    for (const char* name : suite) {
        auto f = make_map(name);
        int kmax = f.degree() == 2 ? 8 : f.degree() == 3 ? 6 : 5;
        auto rep = bezout_overlap_check(f, kmax);
        violations += rep.violations;
        for (const auto& r : rep.rows) {
            ++rows;
            d.check(!r.failed, std::string(name) + " solver failure");
        }
    }
    d.check(violations == 0, "violations");
    d.s << rows << " rows, " << violations << " violations";
    return d.done();
}

Outcome przytycki()
{
    Detail d;
    for (const char* name : {"chebyshev:2", "lattes4"}) {
        auto rep = przytycki_bound_check(make_map(name), 20);
        int julia = 0;
        for (const auto& c : rep.critical)
            julia += c.julia;
        d.check(julia > 0, std::string(name) + " has no Julia-critical points");
        d.check(rep.violations == 0, std::string(name) + " violations");
        d.s << name << ": " << julia << " Julia-critical, " << rep.violations << " violations; ";
    }
    return d.done();
}

Outcome potential()
{
    Detail d;
    auto set = periodic_points(make_map("power:2"), 8);
    double u = chordal_potential(repelling_measure(set, 2, 8, true), P::affine(0.0));
    double raw = chordal_potential(repelling_measure(set, 2, 8, false), P::affine(0.0));
    double e = std::abs(u - std::log(1 / std::sqrt(2.0)));
    d.check(e <= 1e-3, "k=8");
    d.s << "U(0) = " << u << ", error " << e << " (weights 1/(d^k+1): " << raw << ")";
    return d.done();
}

Outcome screening()
{
    Detail d;
    auto cheb = make_map("chebyshev:2");
    auto z2 = make_map("power:2");
    d.check(bad_target_scan(z2, P::affine(0.0)).rejected(), "z^2 a=0");
    for (double a : {0.0, 2.0, -2.0})
        d.check(bad_target_scan(cheb, P::affine(a)).rejected(), "chebyshev a=" + std::to_string(a));
    d.check(bad_target_scan(z2, P::affine(1.0)).clean(), "z^2 a=1");
    for (double a : {0.0, 2.0, -2.0}) {
        bool refused = false;
        try {
            estimator_preimage(cheb, P::affine(a), 3);
        } catch (const TargetRejected&) {
            refused = true;
        }
        d.check(refused, "preimage refusal");
        PreimageOptions forced;
        forced.force = true;
        d.check(estimator_preimage(cheb, P::affine(a), 3, {}, forced).rows.size() == 3, "forced run");
    }
    d.s << "flags and refusals as expected";
    return d.done();
}

Outcome non_archimedean()
{
    using namespace padic;
    Detail d;
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<long> num(-100000, 100000), den(1, 1000);
    long triples = 0;
    for (unsigned long p : {2ul, 3ul, 5ul})
        for (int i = 0; i < 10000; ++i, ++triples) {
            Rational x(Integer(num(rng)), Integer(den(rng))), y(Integer(num(rng)), Integer(den(rng)));
            PNorm nx = norm(x, p), ny = norm(y, p), ns = norm(x + y, p);
            d.check(ns <= max(nx, ny), "strong triangle");
            if (!(nx == ny))
                d.check(ns == max(nx, ny), "equality case");
            d.check(hsia_kernel(Disk::point(x, p), Disk::point(y, p)) == chordal_dist(Point::affine(x), Point::affine(y), p),
                    "degenerate disk reduction");
        }
    auto qmap = [](std::vector<long> n, std::vector<Rational> den) {
        std::vector<Rational> num;
        for (long c : n)
            num.emplace_back(c);
        return make_qmap(num, den);
    };
    d.check(good_reduction_test(qmap({0, 0, 1}, {1, 0, 0}), 3), "z^2 over Q_3");
    d.check(!good_reduction_test(make_qmap({0, 0, Rational(Integer(1), Integer(5))}, {1, 0, 0}), 5), "z^2/p");
    d.check(good_reduction_test(qmap({5, 0, 1}, {1, 0, 0}), 5), "z^2+p");
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul})
        for (int deg = 2; deg <= 7; ++deg) {
            double v = closed_form(parse_preset("power:" + std::to_string(deg)), NonArchimedean{p}).value;
            double expected = -valuation(deg, static_cast<long>(p)) * std::log(static_cast<double>(p));
            d.check(v == expected && (v == 0.0) == (deg % p != 0), "closed form");
        }
    d.s << triples << " triples, three reduction examples, closed forms for p <= 7, d <= 7";
    return d.done();
}

Outcome monte_carlo()
{
    Detail d;
    auto f = make_map("chebyshev:2");
    P a = P::affine(0.5);
    double full = estimator_preimage(f, a, 5).rows.back().estimate;
    auto mc = estimator_preimage(f, a, 5, PreimageMode::monte_carlo(10000, 7)).rows.back();
    double se = mc.std_error.value_or(0);
    d.check(!mc.failed && se > 0 && std::abs(mc.estimate - full) <= 3 * se, "3 SE");
    d.s << "full " << full << ", sampled " << mc.estimate << " +- " << se;
    return d.done();
}

std::string cli_output(std::vector<std::string> args)
{
    args.insert(args.begin(), "lyap");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::to_string(code) + "\n" + out.str();
}

Outcome determinism()
{
    Detail d;
    std::vector<std::vector<std::string>> runs{
        {"preimage", "--preset", "chebyshev:2", "--target", "0.5", "--kmax", "6", "--mode", "mc:2000", "--seed", "42", "--no-timing"},
        {"oracle", "--preset", "lattes4", "--samples", "500", "--seed", "3"},
        {"rep", "--preset", "quadratic:-1", "--kmax", "6", "--no-timing"},
    };
    for (const auto& args : runs) {
        auto first = cli_output(args);
        d.check(first.rfind("0\n", 0) == 0, args[0] + " exit code");
        d.check(first == cli_output(args), args[0] + " output differs");
    }
    d.s << runs.size() << " commands repeated";
    return d.done();
}

} // namespace

int main()
{
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"power map closed form", power_closed_form},
        {"strict variant", strict_variant},
        {"power map preimage exactness", power_preimage_exact},
        {"chebyshev convergence", chebyshev},
        {"escaping quadratic", escaping_quadratic},
        {"lattes lower bound attainment", lattes},
        {"positivity", positivity},
        {"bezout bound", bezout},
        {"przytycki bound", przytycki},
        {"potential convergence", potential},
        {"target screening", screening},
        {"non-archimedean properties", non_archimedean},
        {"monte carlo soundness", monte_carlo},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    return failures ? 1 : 0;
}
