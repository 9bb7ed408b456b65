// One line per acceptance criterion. Tolerances and budgets are fixed here.
#include "oracles.hpp"

#include "hslab/app/commands.hpp"
#include "hslab/errors.hpp"
#include "hslab/fre.hpp"
#include "hslab/ibps.hpp"
#include "hslab/picard.hpp"
#include "hslab/regions.hpp"
#include "hslab/sharpness.hpp"
#include "hslab/spectral.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

using namespace hslab;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.tellp() > 0 ? "; " : "") << "FAILED " << what;
        }
    }
    template <class T>
    void note(const std::string& key, const T& v) {
        detail << (detail.tellp() > 0 ? "; " : "") << key << "=" << v;
    }
};

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() / ("hslab_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args, std::ostream& log) {
    args.insert(args.begin(), "hslab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream err;
    const int rc = app::cli_main(static_cast<int>(argv.size()), argv.data(), log, err);
    if (rc != 0) log << err.str();
    return rc;
}

// 1: phase algebra
void phases(Outcome& o) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> d(-10, 10), da(-5, 5);
    double w1 = 0, wv = 0, wt = 0;
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0})
        for (int i = 0; i < 10000; ++i) {
            std::array<double, 2> f{d(g), d(g)};
            w1 = std::max(w1, factorization_residual(PhaseId::Phi1u, a, f));
        }
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 2> f{d(g), d(g)};
        wv = std::max(wv, factorization_residual(PhaseId::Phiv, da(g), f));
        std::array<double, 3> h{d(g), d(g), d(g)};
        wt = std::max(wt, factorization_residual(PhaseId::Theta, 0.5, h));
    }
    int violations = 0;
    for (double a : {-2.0, -1.0, -0.125, 0.125})
        for (int i = 0; i < 10000; ++i) {
            const double x1 = d(g), x2 = d(g), x = x1 + x2;
            if (std::abs(phi1u(a, x1, x2)) < phase_floor(a) * std::abs(x * x * x) - 1e-9) ++violations;
        }
    o.note("phi1u", w1);
    o.note("phiv", wv);
    o.note("theta", wt);
    o.note("floor_violations", violations);
    o.check(w1 <= 1e-9 && wv <= 1e-9 && wt <= 1e-9, "factorization residual > 1e-9");
    o.check(violations == 0, "phase floor");
}

// 2: regions
void regions(Outcome& o) {
    struct Diag {
        double a;
        Rational threshold;
        bool closed;
    };
    int diag_bad = 0;
    for (const Diag& c : {Diag{-1.0, Rational(-3) / 4, false}, Diag{-0.125, Rational(-3) / 4, false},
                          Diag{0.5, Rational(0), true}, Diag{0.25, Rational(3) / 4, true}})
        for (int i = -400; i <= 800; ++i) {
            const Rational k = Rational(i) / 160;
            const bool lwp = classify(c.a, RegularityPoint{k, k}).lwp != Lwp::None;
            if (lwp != (c.closed ? k >= c.threshold : k > c.threshold)) ++diag_bad;
        }
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> da(-3, 3), dk(-3, 8), ds(-4, 10);
    int excl = 0, nest = 0;
    for (int i = 0; i < 1000; ++i) {
        double a = da(g);
        if (a == 0.0 || a == 1.0) continue;
        const auto p = RegularityPoint::of(dk(g), ds(g));
        const Verdict v = classify(a, p);
        if (v.lwp != Lwp::None && v.illposed != IllPosed::None) ++excl;
        if (in_A0(a, p) && !in_A(a, p)) ++nest;
    }
    auto vertices = [](double a) {
        std::set<std::pair<std::pair<double, double>, bool>> out;
        for (const auto& s : boundary_segments(a, 7)) {
            out.insert({{s.start.kd(), s.start.sd()}, s.start_included});
            if (!s.ray) out.insert({{s.end.kd(), s.end.sd()}, s.end_included});
        }
        return out;
    };
    const auto half = vertices(0.5), quarter = vertices(0.25), below = vertices(-1.0);
    const bool corners = half.count({{0, 0}, true}) && half.count({{0, 3}, false}) && half.count({{4, 2}, false}) &&
                         quarter.count({{0.75, 0.75}, true}) && below.count({{-0.75, -0.75}, false});
    o.note("diagonal_mismatches", diag_bad);
    o.note("exclusion_violations", excl);
    o.note("A0_not_in_A", nest);
    o.check(diag_bad == 0, "diagonal thresholds");
    o.check(excl == 0 && nest == 0, "exclusion or nesting");
    o.check(corners, "corner/open point sets");
}

// 3: solver
void solver(Outcome& o) {
    const Coefficients c{0.5, 1.0, 1.0, 1.0};
    auto s0 = oracle::gaussian_state(40, 128, c);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.nonlinear_enabled = false;
    const auto s1 = integrate(s0, cfg, 1.0);
    const auto pu = profile_u(s1), pv = profile_v(s1);
    double lin = 0;
    for (int i = 0; i < 128; ++i)
        lin = std::max({lin, std::abs(pu.coeffs[i] - s0.uhat.coeffs[i]), std::abs(pv.coeffs[i] - s0.vhat.coeffs[i])});

    const double order = oracle::convergence_order(oracle::gaussian_state(20, 64, c), 0.5, 0.02);
    const double drift = oracle::mass_drift(oracle::gaussian_state(40, 512, c), 0.5, 1e-4);

    Grid g(2 * pi, 32);
    double conv = 0;
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto s = oracle::random_band_state(g, g.dealias_limit(2.0 / 3.0), {0.5, 0.7, -1.3, 2.1}, seed);
        Transform tr(32);
        const Rhs fast = rhs_physical(s, 2.0 / 3.0, tr);
        const Rhs slow = oracle::convolution_rhs(s, g.dealias_limit(2.0 / 3.0));
        double err = 0, scale = 0;
        for (int i = 0; i < 32; ++i) {
            err = std::max({err, std::abs(fast.u[i] - slow.u[i]), std::abs(fast.v[i] - slow.v[i])});
            scale = std::max({scale, std::abs(slow.u[i]), std::abs(slow.v[i])});
        }
        conv = std::max(conv, err / scale);
    }
    o.note("linear", lin);
    o.note("order", order);
    o.note("mass_drift", drift);
    o.note("conv", conv);
    o.check(lin <= 1e-12, "linear exactness");
    o.check(order >= 3.8 && order <= 4.2, "order");
    o.check(drift <= 1e-6, "mass drift");
    o.check(conv <= 1e-10, "convolution oracle");
}

// 4: picard
void picard(Outcome& o) {
    auto one = [](double lo, double hi, double rho = 0.0) { return BoxData{{FrequencyBox{lo, hi, rho, 1.0}}, false}; };
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> pos(-8.0, 6.0), wid(0.1, 2.0), tt(0.005, 0.05), unit(0.05, 0.95);
    const double as[] = {-1.0, 0.25, 0.5, 2.0};
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const double a = as[i % 4];
        const double ul = pos(g), vl = pos(g);
        const BoxData u = one(ul, ul + wid(g), i % 3 == 0 ? 1.5 : 0.0), v = one(vl, vl + wid(g));
        const double t = tt(g);
        const double lo = u.boxes[0].lo + v.boxes[0].lo, hi = u.boxes[0].hi + v.boxes[0].hi;
        const double xi = lo + (hi - lo) * unit(g);
        const cplx ref = oracle::second_v(u, v, a, t, xi);
        worst = std::max(worst, std::abs(second_iterate_v_at(u, v, a, t, xi) - ref) / std::abs(ref));
    }
    const BoxData u = one(3, 4), v = one(-1, 0.5);
    bool support = true;
    for (double xi : {1.999, 4.5001, -10.0, 10.0}) support = support && second_iterate_v_at(u, v, 2.0, 0.1, xi) == 0.0;
    for (double xi : {-2.0001, 1.0001}) support = support && second_iterate_u_at(v, 2.0, 0.1, xi) == 0.0;
    const cplx alpha{0.3, -1.7};
    double bil = 0;
    for (double xi : {2.5, 3.3, 4.1}) {
        const cplx base = second_iterate_v_at(u, v, 2.0, 0.1, xi);
        bil = std::max(bil, std::abs(second_iterate_v_at(u.scaled(alpha), v, 2.0, 0.1, xi) - alpha * base) /
                                std::abs(base));
        bil = std::max(bil, std::abs(second_iterate_v_at(u, v.scaled(alpha), 2.0, 0.1, xi) - alpha * base) /
                                std::abs(base));
    }
    o.note("worst_rel", worst);
    o.note("bilinearity", bil);
    o.check(worst <= 1e-6, "oracle agreement");
    o.check(support, "support");
    o.check(bil <= 1e-12, "bilinearity");
}

// 5: sharpness, through the CLI so criterion 8 can rerun it
void sharpness(Outcome& o, const fs::path& out) {
    struct Target {
        const char* tag;
        double slope, tol;
    };
    // listed targets; L62 is the listed value, not the lemma formula at this point
    const Target targets[] = {{"L61", -3.0, 0.15}, {"L62", -1.5, 0.15},  {"L63", -0.5, 0.15},
                              {"L64", 0.25, 0.15}, {"L65", 0.25, 0.15},  {"L66", -2.0, 0.15},
                              {"L67", -2.0, 0.15}, {"L68", -2.75, 0.2}};
    std::ostringstream log;
    cli({"sharpness", "--lemma", "all", "--out", out.string()}, log);
    const fs::path file = out / "sharpness.json";
    if (!fs::exists(file)) {
        o.check(false, "no sharpness.json: " + log.str());
        return;
    }
    const auto runs = app::Json::parse(slurp(file));
    for (const Target& t : targets) {
        const app::Json* r = nullptr;
        for (const auto& j : runs)
            if (j["lemma"].get<std::string>().rfind(t.tag, 0) == 0) r = &j;
        if (!r) {
            o.check(false, std::string(t.tag) + " missing");
            continue;
        }
        const double slope = (*r)["slope"], r2 = (*r)["r2"];
        std::ostringstream v;
        v.precision(4);
        v << std::fixed << slope << "/r2 " << r2;
        o.note(t.tag, v.str());
        std::ostringstream why;
        why << t.tag << " slope " << slope << " vs " << t.slope << " +- " << t.tol;
        o.check(std::abs(slope - t.slope) <= t.tol && r2 >= 0.99, why.str());
    }
}

// 6: ibps
void ibps(Outcome& o) {
    const double L = 4 * pi;
    Grid g(L, 256);
    auto bump = [](double c) { return [=](double x) { return 0.2 * std::exp(-(x - c) * (x - c) / (0.15 * 0.15)); }; };
    const SimState s = make_state(g, bump(L / 2), bump(L / 2 + 0.3), Coefficients{0.5, 1.0, 1.0, 1.0});
    const CutoffParams cut{0.05, 0.05, 0.1};
    const IbpsReport r = ibps_residual(s, cut, IbpsRunConfig{0.1, 1e-5});
    IbpsRunConfig lin{0.1, 1e-5};
    lin.nonlinear_enabled = false;
    const IbpsReport rl = ibps_residual(s, cut, lin);
    o.note("residual", r.residual);
    o.note("linear_residual", rl.residual);
    o.check(r.residual <= 1e-4, "residual");
    o.check(rl.residual == 0.0, "linear residual");
}

// 7: fre
void fre(Outcome& o) {
    const std::vector<double> ladder{100, 1000, 10000};
    const double in = ratio_scan(fre_spec_dxv2(1, 0.5), 0.5, ladder).slope;
    const double out = ratio_scan(fre_spec_dxv2(1, 0.25), 0.5, ladder).slope;
    int violations = 0;
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 25; ++j) {
            const double alpha = -100 + 200.0 * i / 39, M = std::pow(10.0, -3 + 6.0 * j / 24);
            if (level_set_measure(alpha, M) > 2 * std::sqrt(2.0 * M) * (1 + 1e-15)) ++violations;
        }
    o.note("slope_s=0.5", in);
    o.note("slope_s=0.25", out);
    o.note("bound_violations", violations);
    o.check(in <= 0.05, "bounded side");
    o.check(out >= 0.2, "growing side");
    o.check(violations == 0, "level set bound");
}

// 8: determinism of the sharpness and fre-scan reports
void determinism(Outcome& o, const fs::path& first, const fs::path& second) {
    std::ostringstream log;
    const std::vector<std::string> fre_args{"fre-scan", "--a", "0.5", "--k", "1", "--s", "0.25"};
    for (const fs::path& d : {first, second}) {
        auto args = fre_args;
        args.insert(args.end(), {"--out", d.string()});
        cli(args, log);
    }
    cli({"sharpness", "--lemma", "all", "--out", second.string()}, log);
    for (const char* f : {"sharpness.json", "fre_scan.json"}) {
        const std::string x = slurp(first / f), y = slurp(second / f);
        o.note(f, std::to_string(x.size()) + " bytes");
        o.check(!x.empty() && x == y, std::string(f) + " differs between runs");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli_app{"acceptance criteria"};
    std::vector<int> known;
    cli_app.add_option("--known-deviation", known, "criterion allowed to fail (recorded, analysed elsewhere)");
    CLI11_PARSE(cli_app, argc, argv);

    Workspace ws;
    const fs::path run1 = ws.root / "run1", run2 = ws.root / "run2";
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<void(Outcome&)> body;
    };
    const std::vector<Criterion> all{
        {1, "phase algebra", 5, phases},
        {2, "regions", 1, regions},
        {3, "solver", 120, solver},
        {4, "picard", 60, picard},
        {5, "sharpness", 600, [&](Outcome& o) { sharpness(o, run1); }},
        {6, "ibps", 120, ibps},
        {7, "fre", 120, fre},
        {8, "determinism", 900, [&](Outcome& o) { determinism(o, run1, run2); }},
    };

    std::set<int> failed;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream b;
        b.precision(1);
        b << std::fixed << secs << "s > " << c.budget_s << "s";
        o.check(secs <= c.budget_s, "time " + b.str());
        if (!o.pass) failed.insert(c.id);
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " ["
                  << std::fixed << std::setprecision(1) << secs << "s] " << std::defaultfloat << std::setprecision(6)
                  << o.detail.str() << '\n'
                  << std::flush;
    }
    const std::set<int> expected(known.begin(), known.end());
    std::cout << failed.size() << " of " << all.size() << " criteria failed";
    if (!failed.empty() && failed == expected) std::cout << " (all of them known deviations)";
    std::cout << '\n';
    return failed == expected ? 0 : app::AcceptanceFailure;
}
