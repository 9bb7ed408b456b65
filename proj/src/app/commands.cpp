#include "hslab/app/commands.hpp"
#include "hslab/app/svg.hpp"
#include "hslab/errors.hpp"
#include "hslab/ibps.hpp"
#include "hslab/picard.hpp"
#include "hslab/quadrature.hpp"
#include "hslab/regions.hpp"
#include "hslab/spectral.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hslab::app {

namespace {

Coefficients coefficients(const RunConfig& cfg) {
    Coefficients c;
    c.a = cfg.number("a", 0.5);
    c.beta = cfg.number("beta", 1.0);
    c.gamma = cfg.number("gamma", 1.0);
    c.theta = cfg.number("theta", 1.0);
    return c;
}

std::function<double(double)> gaussian(double amp, double center, double width) {
    if (!(width > 0.0)) throw ConfigError("Gaussian width must be positive");
    return [=](double x) {
        const double d = (x - center) / width;
        return amp * std::exp(-d * d);
    };
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LemmaParams lemma_params(LemmaId id, const RunConfig& cfg) {
    LemmaParams p = reference_params(id);
    p.a = cfg.number("a", p.a);
    p.k = cfg.number("k", p.k);
    p.s = cfg.number("s", p.s);
    if (cfg.has("rho")) p.rho = cfg.number("rho");
    p.b = cfg.number("b", p.b);
    p.delta = cfg.number("delta", p.delta);
    p.c = cfg.number("c", p.c);
    p.check_side_conditions = cfg.flag("check_side_conditions", p.check_side_conditions);
    return p;
}

BoxData parse_boxes(const RunConfig& cfg, const std::string& key) {
    BoxData d;
    if (!cfg.has(key)) return d;
    const Param& p = cfg.at(key);
    std::istringstream in(p.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::istringstream f(item);
        std::string part;
        std::vector<double> v;
        while (std::getline(f, part, ':')) {
            try {
                v.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw ConfigError(p.origin + ": bad box '" + item + "' in '" + key + "'");
            }
        }
        if (v.size() != 2 && v.size() != 3)
            throw ConfigError(p.origin + ": box '" + item + "' in '" + key + "' must be lo:hi or lo:hi:weight");
        d.boxes.push_back({v[0], v[1], v.size() == 3 ? v[2] : 0.0, 1.0});
    }
    return d;
}

int cmd_classify(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    const double a = cfg.number("a");
    const auto p = RegularityPoint::parse(cfg.at("k").value, cfg.at("s").value);
    Coefficients c = coefficients(cfg);
    const Verdict v = classify(c, p, cfg.flag("original_system", true));
    Json j{{"a", a},
           {"k", p.kd()},
           {"s", p.sd()},
           {"supported", v.supported},
           {"lwp", std::string(to_string(v.lwp))},
           {"illposed", std::string(to_string(v.illposed))},
           {"gwp", std::string(to_string(v.gwp))},
           {"open_region", v.open_region}};
    outs.write("classify.json", dump_json(j));
    out << "classify a=" << a << " k=" << p.kd() << " s=" << p.sd() << ": " << (v.supported ? "" : "unsupported ")
        << "lwp=" << to_string(v.lwp) << " illposed=" << to_string(v.illposed) << '\n';
    return Ok;
}

int cmd_atlas(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    AtlasWindow w;
    w.k_min = cfg.number("k_min", w.k_min);
    w.k_max = cfg.number("k_max", w.k_max);
    w.s_min = cfg.number("s_min", w.s_min);
    w.s_max = cfg.number("s_max", w.s_max);
    w.width = cfg.integer("width", w.width);
    const double a = cfg.number("a");
    const auto path = outs.write("atlas.svg", render_atlas(a, w));
    out << "atlas a=" << a << " -> " << path.string() << '\n';
    return Ok;
}

int cmd_simulate(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    const double L = cfg.number("L", 2.0 * std::numbers::pi);
    const Grid g(L, cfg.integer("n", 256));
    const Coefficients c = coefficients(cfg);
    SimState s = make_state(g, gaussian(cfg.number("u_amp", 0.2), cfg.number("u_center", L / 2), cfg.number("u_width", 0.3)),
                            gaussian(cfg.number("v_amp", 0.2), cfg.number("v_center", L / 2), cfg.number("v_width", 0.3)),
                            c);
    SolverConfig sc;
    sc.dt = cfg.number("dt", 1e-4);
    sc.dealias_fraction = cfg.number("dealias", sc.dealias_fraction);
    sc.monitor_every = cfg.integer("monitor_every", sc.monitor_every);
    sc.validate();
    apply_dealias(s, sc.dealias_fraction);
    const double k = cfg.number("k", 0.0), sreg = cfg.number("s", 0.0);
    Transform tr(g.n());
    std::vector<TrajectoryRow> rows;
    const SimState end =
        integrate(s, sc, cfg.number("T", 1.0), [&](const SimState& st) { rows.push_back(trajectory_row(st, k, sreg, tr)); });
    std::ostringstream csv;
    write_trajectory_csv(csv, rows);
    const auto path = outs.write("trajectory.csv", csv.str());
    out << "simulate t=" << end.t << " rows=" << rows.size() << " -> " << path.string() << '\n';
    return Ok;
}

int cmd_picard(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    PicardOptions opt;
    opt.nodes = cfg.integer("nodes", opt.nodes);
    opt.samples = cfg.integer("samples", opt.samples);
    PicardOutput res;
    if (cfg.has("lemma")) {
        const LemmaId id = lemma_from_tag(cfg.at("lemma").value);
        const Counterexample c = build(id, cfg.number("N", 64.0), lemma_params(id, cfg));
        switch (c.iterate) {
        case Iterate::SecondV: res = second_iterate_v(c.u0, c.v0, c.a, c.t, c.window, opt); break;
        case Iterate::SecondU: res = second_iterate_u(c.v0, c.a, c.t, c.window, opt); break;
        case Iterate::ThirdV: res = third_iterate_v(c.v0, c.a, c.t, c.window, opt); break;
        }
    } else {
        const double a = cfg.number("a");
        const BoxData u0 = parse_boxes(cfg, "u_boxes"), v0 = parse_boxes(cfg, "v_boxes");
        const Window w{cfg.number("window_lo"), cfg.number("window_hi")};
        const double t = cfg.number("t");
        const std::string it = cfg.str("iterate", "second_v");
        if (it == "second_v") res = second_iterate_v(u0, v0, a, t, w, opt);
        else if (it == "second_u") res = second_iterate_u(v0, a, t, w, opt);
        else if (it == "third_v") res = third_iterate_v(v0, a, t, w, opt);
        else throw ConfigError(cfg.at("iterate").origin + ": iterate must be second_v, second_u or third_v");
    }
    std::ostringstream csv;
    write_picard_csv(csv, res);
    const auto path = outs.write("picard.csv", csv.str());
    out << "picard samples=" << res.xi_samples.size() << " -> " << path.string() << '\n';
    return Ok;
}

int cmd_ibps(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    const double L = cfg.number("L", 4.0 * std::numbers::pi);
    const Grid g(L, cfg.integer("n", 256));
    const Coefficients c = coefficients(cfg);
    const double amp = cfg.number("amplitude", 0.2), width = cfg.number("width", 0.15);
    const SimState s = make_state(g, gaussian(amp, L / 2, width), gaussian(amp, L / 2 + cfg.number("v_shift", 0.3), width), c);
    CutoffParams cut;
    cut.delta_u = cfg.number("delta_u", cut.delta_u);
    cut.delta_v = cfg.number("delta_v", cut.delta_v);
    cut.eta_sim = cfg.number("eta", cut.eta_sim);
    IbpsRunConfig rc;
    rc.T = cfg.number("T", rc.T);
    rc.dt = cfg.number("dt", rc.dt);
    rc.nonlinear_enabled = cfg.flag("nonlinear", true);
    const double tol = cfg.number("tol", 1e-4);
    const IbpsReport r = ibps_residual(s, cut, rc);
    const bool pass = r.residual <= tol;
    Json j{{"residual", r.residual},
           {"residual_u", r.detail.residual_u},
           {"residual_v", r.detail.residual_v},
           {"quad_error_u", r.detail.quad_error_u},
           {"quad_error_v", r.detail.quad_error_v},
           {"solver_gap_u", r.detail.solver_gap_u},
           {"solver_gap_v", r.detail.solver_gap_v},
           {"steps", r.steps},
           {"dt", r.dt},
           {"pairs_U", r.pairs_U},
           {"pairs_V", r.pairs_V},
           {"min_phase_ratio_U", r.min_phase_ratio_U},
           {"min_phase_ratio_V", r.min_phase_ratio_V},
           {"a", c.a},
           {"n", g.n()},
           {"T", rc.T},
           {"nonlinear", rc.nonlinear_enabled},
           {"tol", tol},
           {"pass", pass}};
    const auto path = outs.write("ibps.json", dump_json(j));
    out << "ibps-check residual=" << r.residual << (pass ? " pass" : " FAIL") << " -> " << path.string() << '\n';
    return pass ? Ok : AcceptanceFailure;
}

int cmd_fre(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    const double a = cfg.number("a"), k = cfg.number("k"), s = cfg.number("s");
    const std::string form = cfg.str("form", "both");
    if (form != "both" && form != "dxv2" && form != "uvx")
        throw ConfigError(cfg.at("form").origin + ": form must be dxv2, uvx or both");
    ScanOptions opt;
    opt.alphas = cfg.numbers("alphas", opt.alphas);
    opt.Ms = cfg.numbers("Ms", opt.Ms);
    opt.points_per_decade = cfg.integer("ppd", opt.points_per_decade);
    const auto ladder = cfg.numbers("ladder", {100.0, 1000.0, 10000.0});

    std::optional<FixedVar> fixed;
    if (cfg.has("fixed")) {
        const auto v = cfg.at("fixed").value;
        if (v == "xi") fixed = FixedVar::Xi;
        else if (v == "xi1") fixed = FixedVar::Xi1;
        else if (v == "xi2") fixed = FixedVar::Xi2;
        else throw ConfigError(cfg.at("fixed").origin + ": fixed must be xi, xi1 or xi2");
    }

    Json runs = Json::array();
    bool pass = true;
    for (const std::string f : {"dxv2", "uvx"}) {
        if (form != "both" && form != f) continue;
        FreSpec spec = f == "dxv2" ? fre_spec_dxv2(k, s) : fre_spec_uvx(k, s);
        if (fixed) spec.fixed = *fixed;
        spec.alpha_exponent = cfg.number("alpha_exponent", spec.alpha_exponent);
        const ScanReport r = ratio_scan(spec, a, ladder, opt);
        Json j = scan_json(spec, f, a, k, s, r);
        bool ok = true;
        if (cfg.has("max_slope")) ok = ok && r.slope <= cfg.number("max_slope");
        if (cfg.has("min_slope")) ok = ok && r.slope >= cfg.number("min_slope");
        if (cfg.has("max_slope") || cfg.has("min_slope")) j["pass"] = ok;
        pass = pass && ok;
        out << "fre-scan " << f << " a=" << a << " k=" << k << " s=" << s << " slope=" << r.slope << '\n';
        runs.push_back(std::move(j));
    }

    Json doc{{"scans", runs}};
    if (cfg.has("dual_N")) {
        const auto Ns = cfg.numbers("dual_N", {});
        const auto samples = static_cast<std::size_t>(cfg.integer("dual_samples", 200000));
        const DualWeights w{k, s, 0.51, -0.48};
        Json dual = Json::array();
        for (const DualForm which : {DualForm::VVtoU, DualForm::UVtoV}) {
            Json vals = Json::array(), errs = Json::array();
            std::vector<double> lx, ly;
            for (double N : Ns) {
                const DualBoxes b = which == DualForm::VVtoU ? dual_boxes_vv_case1(N) : dual_boxes_uv_case1(N);
                const DualEstimate e = dual_form_estimate(b.h, b.h1, b.h2, a, w, which, samples, cfg.seed);
                vals.push_back(e.value);
                errs.push_back(e.std_error);
                lx.push_back(std::log(N));
                ly.push_back(std::log(e.value));
            }
            const double expected = which == DualForm::VVtoU ? k + 1 + 3 * w.bprime - s - 2 * w.b
                                                             : s + 2 * w.bprime - k - 3 * w.b;
            Json d{{"form", which == DualForm::VVtoU ? "vv_to_u" : "uv_to_v"},
                   {"N", Ns},
                   {"values", vals},
                   {"std_errors", errs},
                   {"expected_exponent", expected}};
            if (Ns.size() >= 2) d["exponent"] = fit_line(lx, ly).slope;
            dual.push_back(std::move(d));
        }
        doc["dual"] = std::move(dual);
    }
    const auto path = outs.write("fre_scan.json", dump_json(doc));
    out << "fre-scan -> " << path.string() << '\n';
    return pass ? Ok : AcceptanceFailure;
}

int cmd_sharpness(const RunConfig& cfg, OutputSet& outs, std::ostream& out) {
    const std::string tag = cfg.at("lemma").value;
    std::vector<LemmaId> ids;
    if (tag == "all") {
        for (const char* k : {"a", "k", "s", "rho", "b", "delta", "c"})
            if (cfg.has(k)) throw ConfigError(cfg.at(k).origin + ": '" + k + "' cannot be combined with lemma=all");
        ids.assign(all_lemmas.begin(), all_lemmas.end());
    } else {
        ids.push_back(lemma_from_tag(tag));
    }
    std::vector<double> ladder(default_ladder.begin(), default_ladder.end());
    ladder = cfg.numbers("N_ladder", ladder);
    LadderOptions opt;
    opt.picard.nodes = cfg.integer("nodes", opt.picard.nodes);
    opt.picard.samples = cfg.integer("samples", opt.picard.samples);
    if (cfg.has("tol")) opt.tol = cfg.number("tol");

    Json runs = Json::array();
    bool pass = true;
    for (LemmaId id : ids) {
        const LadderReport r = run_ladder(id, ladder, lemma_params(id, cfg), opt);
        pass = pass && r.pass;
        out << lemma_tag(id) << ": " << r.summary << (r.pass ? " PASS" : " FAIL") << '\n';
        runs.push_back(ladder_json(r));
    }
    const auto path = outs.write("sharpness.json", dump_json(runs));
    out << "sharpness -> " << path.string() << '\n';
    return pass ? Ok : AcceptanceFailure;
}

} // namespace

Json ladder_json(const LadderReport& r) {
    Json phase = Json::array();
    for (const auto& g : r.rungs)
        phase.push_back({{"N", g.N},
                         {"max_tphase", g.check.max_tphase},
                         {"min_tphase", g.check.min_tphase},
                         {"min_sinc", g.check.min_sinc},
                         {"dominance", g.check.dominance},
                         {"ok", g.check.ok}});
    Json params{{"b", r.params.b},
                {"c", r.params.c},
                {"delta", r.params.delta},
                {"check_side_conditions", r.params.check_side_conditions}};
    if (r.lemma == LemmaId::L62_s_ge_km2)
        params["rho"] = r.params.rho ? *r.params.rho : l62_default_rho(r.params.k, r.params.s);
    return Json{{"lemma", std::string(lemma_tag(r.lemma))},
                {"a", r.params.a},
                {"k", r.params.k},
                {"s", r.params.s},
                {"Ns", r.fit.Ns},
                {"norms", r.norms()},
                {"slope", r.fit.slope},
                {"intercept", r.fit.intercept},
                {"r2", r.fit.r2},
                {"predicted", r.predicted},
                {"tol", r.tol},
                {"pass", r.pass},
                {"regime_ok", r.regime_ok},
                {"monotone", r.monotone},
                {"boundary", std::string(lemma_boundary(r.lemma))},
                {"params", params},
                {"phase", phase}};
}

Json scan_json(const FreSpec& spec, std::string_view form, double a, double k, double s, const ScanReport& r) {
    Json sp{{"form", std::string(form)},
            {"multiplier", std::string(multiplier_name(spec.multiplier))},
            {"fixed", std::string(fixed_var_name(spec.fixed))},
            {"phase", std::string(phase_name(spec.phase))},
            {"s_out", spec.s_out},
            {"s1", spec.s1},
            {"s2", spec.s2},
            {"alpha_exponent", spec.alpha_exponent}};
    return Json{{"spec", sp},         {"a", a},           {"k", k},
                {"s", s},             {"ladder", r.ladder}, {"sup_values", r.sup_values},
                {"slope", r.slope},   {"intercept", r.intercept}, {"r2", r.r2},
                {"ratio", r.ratio}};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        OutputSet outs(cfg.output_dir);
        int code = Ok;
        if (cfg.command == "classify") code = cmd_classify(cfg, outs, out);
        else if (cfg.command == "atlas") code = cmd_atlas(cfg, outs, out);
        else if (cfg.command == "simulate") code = cmd_simulate(cfg, outs, out);
        else if (cfg.command == "picard") code = cmd_picard(cfg, outs, out);
        else if (cfg.command == "ibps-check") code = cmd_ibps(cfg, outs, out);
        else if (cfg.command == "fre-scan") code = cmd_fre(cfg, outs, out);
        else if (cfg.command == "sharpness") code = cmd_sharpness(cfg, outs, out);
        else throw ConfigError("unknown command '" + cfg.command + "'");
        // an acceptance failure still leaves a complete report behind
        outs.commit();
        return code;
    } catch (const ConfigError& e) {
        err << "hslab: config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const DomainError& e) {
        err << "hslab: parameter error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const NumericalError& e) {
        err << "hslab: numerical failure: " << e.what() << '\n';
        return NumericalFailure;
    } catch (const std::exception& e) {
        err << "hslab: error: " << e.what() << '\n';
        return Failure;
    }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hirota-Satsuma well-posedness lab"};
    std::string command, config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> sets;
    app.add_option("command", command, "classify | atlas | simulate | picard | ibps-check | fre-scan | sharpness");
    app.add_option("--config", config_path, "key = value config file");
    for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
             {"--a", "a"}, {"--k", "k"}, {"--s", "s"}, {"--lemma", "lemma"}, {"--N-ladder", "N_ladder"},
             {"--out", "out"}, {"--seed", "seed"}}) {
        app.add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; },
                                             "sets '" + key + "'");
    }
    app.add_option("--set", sets, "extra key=value overrides")->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int rc = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return rc == 0 ? Ok : ConfigFailure;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config(read_file(config_path));
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
            flags[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (!command.empty()) flags["command"] = command;
        finalize(cfg, flags);
        return run(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "hslab: config error: " << e.what() << '\n';
        return ConfigFailure;
    }
}

} // namespace hslab::app
