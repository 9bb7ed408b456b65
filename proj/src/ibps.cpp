#include "hslab/ibps.hpp"
#include "hslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace hslab {

namespace {

constexpr cplx I{0.0, 1.0};

void check_convolution(double xi, double xi1, double xi2) {
    const double scale = std::max({1.0, std::abs(xi), std::abs(xi1), std::abs(xi2)});
    if (std::abs(xi - xi1 - xi2) > 1e-12 * scale) throw DomainError("frequencies violate xi = xi1 + xi2");
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (auto z : v) m = std::max(m, std::abs(z));
    return m;
}

double max_diff(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

double relative(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

std::vector<cplx>& slot(TermValues& tv, TermId id) { return tv.term[static_cast<int>(id)]; }

} // namespace

void CutoffParams::validate() const {
    if (!(delta_u > 0.0) || !(delta_v > 0.0)) throw DomainError("cutoff deltas must be positive");
    if (!(eta_sim > 0.0 && eta_sim < 1.0)) throw DomainError("eta_sim must lie in (0, 1)");
}

std::string_view term_name(TermId id) {
    switch (id) {
    case TermId::N0u: return "N0u";
    case TermId::N1u: return "N1u";
    case TermId::N2u: return "N2u";
    case TermId::N3u: return "N3u";
    case TermId::N0v: return "N0v";
    case TermId::N1v: return "N1v";
    case TermId::N2v: return "N2v";
    case TermId::N3v: return "N3v";
    case TermId::Bu: return "Bu";
    case TermId::Bv: return "Bv";
    }
    return "?";
}

TermId term_from_name(std::string_view name) {
    for (auto id : all_terms)
        if (term_name(id) == name) return id;
    throw ConfigError("unknown term tag: " + std::string(name));
}

bool similar(double f, double g, double eta) { return std::abs(f - g) <= eta * std::max(std::abs(f), std::abs(g)); }

bool in_U(double a, double xi, double xi1, double xi2, const CutoffParams& cut) {
    check_convolution(xi, xi1, xi2);
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    if (!(std::abs(xi) > 1.0 / cut.delta_u)) return false;
    const bool u2 = similar(xi, xi1, cut.eta_sim) || similar(xi, xi2, cut.eta_sim);
    if (a >= 0.25) return u2;
    return u2 || similar(xi1, xi2, cut.eta_sim);
}

bool in_V(double xi, double xi1, double xi2, const CutoffParams& cut) {
    check_convolution(xi, xi1, xi2);
    return std::abs(xi) > 1.0 / cut.delta_v && similar(xi, xi1, cut.eta_sim);
}

ProfileState profile_state(const SimState& s, double dealias_fraction) {
    ProfileState p;
    p.grid = s.grid;
    p.K = s.grid.dealias_limit(dealias_fraction);
    p.t = s.t;
    p.params = s.params;
    const int K = p.K;
    p.u.resize(2 * K + 1);
    p.v.resize(2 * K + 1);
    for (int j = -K; j <= K; ++j) {
        const double x = p.xi(j);
        const double x3 = x * x * x;
        const int sl = s.grid.slot(j);
        p.u[j + K] = std::polar(1.0, -s.params.a * s.t * x3) * s.uhat.coeffs[sl];
        p.v[j + K] = std::polar(1.0, -s.t * x3) * s.vhat.coeffs[sl];
    }
    return p;
}

IbpsPlan::IbpsPlan(const Grid& grid, double a, const CutoffParams& cut, double dealias_fraction)
    : grid_(grid), a_(a), K_(grid.dealias_limit(dealias_fraction)) {
    cut.validate();
    require_theory_a(a);
    const int K = K_;
    const double dk = 2.0 * 3.141592653589793 / grid.L();
    pairs_.resize(2 * K + 1);
    // membership is tested on integer wavenumbers so xi = xi1 + xi2 holds exactly
    const CutoffParams scaled{cut.delta_u * dk, cut.delta_v * dk, cut.eta_sim};
    minU_ = minV_ = std::numeric_limits<double>::infinity();
    for (int j = -K; j <= K; ++j) {
        auto& list = pairs_[j + K];
        const double xi = dk * j;
        for (int j1 = std::max(-K, j - K); j1 <= std::min(K, j + K); ++j1) {
            const int j2 = j - j1;
            const double x1 = dk * j1, x2 = dk * j2;
            Pair p{j1, 0.0, 0.0};
            if (in_U(a, j, j1, j2, scaled)) {
                const double ph = phi1u(a, x1, x2);
                const double ratio = std::abs(ph) / std::abs(xi * xi * xi);
                if (!(ratio > 1e-9)) {
                    std::ostringstream msg;
                    msg << "Phi1u below floor inside U at (xi, xi1) = (" << xi << ", " << x1 << ")";
                    throw NumericalError(msg.str());
                }
                minU_ = std::min(minU_, ratio);
                p.inv_phi_u = 1.0 / ph;
                ++nU_;
            }
            if (in_V(j, j1, j2, scaled)) {
                const double ph = phiv(a, x1, x2);
                const double ratio = std::abs(ph) / std::abs(xi * xi * xi);
                if (!(ratio > 1e-9)) {
                    std::ostringstream msg;
                    msg << "Phiv below floor inside V at (xi, xi1) = (" << xi << ", " << x1 << ")";
                    throw NumericalError(msg.str());
                }
                minV_ = std::min(minV_, ratio);
                p.inv_phi_v = 1.0 / ph;
                ++nV_;
            }
            list.push_back(p);
        }
    }
    if (nU_ == 0) minU_ = 0.0;
    if (nV_ == 0) minV_ = 0.0;
}

TermValues IbpsPlan::evaluate(const ProfileState& p) const {
    if (!(p.grid == grid_) || p.K != K_) throw DomainError("profile state does not match the plan's grid");
    if (p.params.a != a_) throw DomainError("profile state has a different a than the plan");
    const int K = K_;
    const int m = 2 * K + 1;
    const double t = p.t, a = a_;
    const cplx beta = p.params.beta, gamma = p.params.gamma, theta = p.params.theta;

    // back to physical coefficients: the phases e^{it Phi} then factor out
    std::vector<double> xi(m);
    std::vector<cplx> uh(m), vh(m), rot_u(m), rot_v(m);
    for (int i = 0; i < m; ++i) {
        xi[i] = p.xi(i - K);
        const double x3 = xi[i] * xi[i] * xi[i];
        rot_u[i] = std::polar(1.0, -a * t * x3);
        rot_v[i] = std::polar(1.0, -t * x3);
        uh[i] = p.u[i] / rot_u[i];
        vh[i] = p.v[i] / rot_v[i];
    }

    std::vector<cplx> Fvv(m), Fuu(m), Fuv(m), N0u(m), N0v(m), Bu(m), Bv(m);
    for (int i = 0; i < m; ++i) {
        cplx fvv = 0, fuu = 0, fuv = 0, n0u = 0, n0v = 0, bu = 0, bv = 0;
        for (const auto& pr : pairs_[i]) {
            const int i1 = pr.j1 + K, i2 = (i - K - pr.j1) + K;
            const cplx vv = vh[i1] * vh[i2];
            const cplx uv = uh[i1] * (xi[i2] * vh[i2]);
            fvv += vv;
            fuu += uh[i1] * uh[i2];
            fuv += uv;
            if (pr.inv_phi_u != 0.0) bu += vv * pr.inv_phi_u;
            else n0u += vv;
            if (pr.inv_phi_v != 0.0) bv += uv * pr.inv_phi_v;
            else n0v += uv;
        }
        Fvv[i] = fvv;
        Fuu[i] = fuu;
        Fuv[i] = fuv;
        N0u[i] = n0u;
        N0v[i] = n0v;
        Bu[i] = bu;
        Bv[i] = bv;
    }

    // physical-frame nonlinear time derivatives, e^{i t phi(xi)} d/dt profile
    std::vector<cplx> Dv(m), Du_vv(m), Du_uu(m);
    for (int i = 0; i < m; ++i) {
        Dv[i] = theta * I * Fuv[i];
        Du_vv[i] = gamma * I * xi[i] * Fvv[i];
        Du_uu[i] = beta * I * xi[i] * Fuu[i];
    }

    TermValues out;
    for (auto& v : out.term) v.assign(m, 0.0);
    out.coupling_u.assign(m, 0.0);
    out.coupling_v.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        cplx n1u = 0, n2u = 0, n1v = 0, n2v = 0, n3v = 0;
        for (const auto& pr : pairs_[i]) {
            if (pr.inv_phi_u == 0.0 && pr.inv_phi_v == 0.0) continue;
            const int i1 = pr.j1 + K, i2 = (i - K - pr.j1) + K;
            if (pr.inv_phi_u != 0.0) {
                n1u += Dv[i1] * vh[i2] * pr.inv_phi_u;
                n2u += vh[i1] * Dv[i2] * pr.inv_phi_u;
            }
            if (pr.inv_phi_v != 0.0) {
                const double w = xi[i2] * pr.inv_phi_v;
                n1v += Du_vv[i1] * vh[i2] * w;
                n2v += Du_uu[i1] * vh[i2] * w;
                n3v += uh[i1] * Dv[i2] * w;
            }
        }
        const cplx ru = rot_u[i], rv = rot_v[i];
        const double x = xi[i];
        out.coupling_u[i] = ru * gamma * I * x * Fvv[i];
        out.coupling_v[i] = rv * theta * I * Fuv[i];
        slot(out, TermId::N0u)[i] = ru * gamma * I * x * N0u[i];
        slot(out, TermId::Bu)[i] = ru * gamma * x * Bu[i];
        slot(out, TermId::N1u)[i] = -ru * gamma * x * n1u;
        slot(out, TermId::N2u)[i] = -ru * gamma * x * n2u;
        slot(out, TermId::N3u)[i] = ru * beta * I * x * Fuu[i];
        slot(out, TermId::N0v)[i] = rv * theta * I * N0v[i];
        slot(out, TermId::Bv)[i] = rv * theta * Bv[i];
        slot(out, TermId::N1v)[i] = -rv * theta * n1v;
        slot(out, TermId::N2v)[i] = -rv * theta * n2v;
        slot(out, TermId::N3v)[i] = -rv * theta * n3v;
    }
    return out;
}

std::vector<cplx> eval_term(TermId id, const ProfileState& p, const CutoffParams& cut) {
    IbpsPlan plan(p.grid, p.params.a, cut, (p.K + 0.5) * 2.0 / p.grid.n());
    return plan.evaluate(p)[id];
}

IbpsAccumulator::IbpsAccumulator(const IbpsPlan& plan, int intervals, double h)
    : plan_(plan), intervals_(intervals), h_(h) {
    if (intervals < 4 || intervals % 4 != 0) throw DomainError("IBPS time quadrature needs a multiple of 4 intervals");
    if (!(h > 0.0)) throw DomainError("IBPS time step must be positive");
    const std::size_t m = 2 * plan.K() + 1;
    for (auto* v : {&cl_u_, &cl_v_, &ib_u_, &ib_v_, &cl_u2_, &cl_v2_, &ib_u2_, &ib_v2_}) v->assign(m, 0.0);
}

void IbpsAccumulator::add(const ProfileState& p) {
    if (seen_ > intervals_) throw DomainError("IBPS accumulator received too many states");
    const TermValues tv = plan_.evaluate(p);
    const int i = seen_;
    const int n = intervals_;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double w2 = 0.0;
    if (i % 2 == 0) {
        const int k = i / 2, n2 = n / 2;
        w2 = (k == 0 || k == n2) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    }
    const std::size_t m = cl_u_.size();
    for (std::size_t j = 0; j < m; ++j) {
        const cplx cu = tv.coupling_u[j] + tv[TermId::N3u][j];
        const cplx cv = tv.coupling_v[j];
        const cplx iu = tv[TermId::N0u][j] + tv[TermId::N1u][j] + tv[TermId::N2u][j] + tv[TermId::N3u][j];
        const cplx iv = tv[TermId::N0v][j] + tv[TermId::N1v][j] + tv[TermId::N2v][j] + tv[TermId::N3v][j];
        cl_u_[j] += w * cu;
        cl_v_[j] += w * cv;
        ib_u_[j] += w * iu;
        ib_v_[j] += w * iv;
        if (w2 != 0.0) {
            cl_u2_[j] += w2 * cu;
            cl_v2_[j] += w2 * cv;
            ib_u2_[j] += w2 * iu;
            ib_v2_[j] += w2 * iv;
        }
    }
    if (i == 0) {
        u0_ = p.u;
        v0_ = p.v;
        Bu0_ = tv[TermId::Bu];
        Bv0_ = tv[TermId::Bv];
    }
    if (i == n) {
        uT_ = p.u;
        vT_ = p.v;
        BuT_ = tv[TermId::Bu];
        BvT_ = tv[TermId::Bv];
    }
    ++seen_;
}

IbpsAccumulator::Result IbpsAccumulator::finish() const {
    if (seen_ != intervals_ + 1) throw DomainError("IBPS accumulator is missing states");
    const std::size_t m = cl_u_.size();
    const double f = h_ / 3.0, f2 = 2.0 * h_ / 3.0;
    std::vector<cplx> rec_cl_u(m), rec_cl_v(m), rec_ib_u(m), rec_ib_v(m);
    double qcu = 0, qcv = 0, qiu = 0, qiv = 0;
    for (std::size_t j = 0; j < m; ++j) {
        rec_cl_u[j] = u0_[j] + f * cl_u_[j];
        rec_cl_v[j] = v0_[j] + f * cl_v_[j];
        rec_ib_u[j] = u0_[j] + (BuT_[j] - Bu0_[j]) + f * ib_u_[j];
        rec_ib_v[j] = v0_[j] + (BvT_[j] - Bv0_[j]) + f * ib_v_[j];
        qcu = std::max(qcu, std::abs(f * cl_u_[j] - f2 * cl_u2_[j]) / 15.0);
        qcv = std::max(qcv, std::abs(f * cl_v_[j] - f2 * cl_v2_[j]) / 15.0);
        qiu = std::max(qiu, std::abs(f * ib_u_[j] - f2 * ib_u2_[j]) / 15.0);
        qiv = std::max(qiv, std::abs(f * ib_v_[j] - f2 * ib_v2_[j]) / 15.0);
    }
    const double su = max_abs(uT_), sv = max_abs(vT_);
    Result r;
    r.residual_u = relative(max_diff(rec_cl_u, rec_ib_u), su);
    r.residual_v = relative(max_diff(rec_cl_v, rec_ib_v), sv);
    r.quad_error_u = relative(std::max(qcu, qiu), su);
    r.quad_error_v = relative(std::max(qcv, qiv), sv);
    r.solver_gap_u = relative(max_diff(rec_cl_u, uT_), su);
    r.solver_gap_v = relative(max_diff(rec_cl_v, vT_), sv);
    return r;
}

IbpsReport ibps_residual(SimState initial, const CutoffParams& cut, const IbpsRunConfig& cfg) {
    if (!(cfg.T > 0.0) || !(cfg.dt > 0.0)) throw DomainError("IBPS run needs T > 0 and dt > 0");
    int steps = static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9));
    steps = ((steps + 3) / 4) * 4;
    const double h = cfg.T / steps;

    apply_dealias(initial, cfg.dealias_fraction);
    const IbpsPlan plan(initial.grid, initial.params.a, cut, cfg.dealias_fraction);
    IbpsAccumulator acc(plan, steps, h);

    SolverConfig sc;
    sc.dt = h;
    sc.dealias_fraction = cfg.dealias_fraction;
    sc.nonlinear_enabled = cfg.nonlinear_enabled;
    Transform tr(initial.grid.n());

    auto feed = [&](const SimState& s) {
        ProfileState p = profile_state(s, cfg.dealias_fraction);
        if (!cfg.nonlinear_enabled) p.params.beta = p.params.gamma = p.params.theta = 0.0;
        acc.add(p);
    };
    SimState s = std::move(initial);
    const double t0 = s.t;
    feed(s);
    for (int i = 1; i <= steps; ++i) {
        s = step(s, sc, tr);
        s.t = t0 + i * h;  // no drift in the sample times
        feed(s);
    }

    IbpsReport rep;
    rep.detail = acc.finish();
    rep.residual = std::max(rep.detail.residual_u, rep.detail.residual_v);
    rep.steps = steps;
    rep.dt = h;
    rep.pairs_U = plan.pairs_U();
    rep.pairs_V = plan.pairs_V();
    rep.min_phase_ratio_U = plan.min_phase_ratio_U();
    rep.min_phase_ratio_V = plan.min_phase_ratio_V();
    const double qerr = std::max(rep.detail.quad_error_u, rep.detail.quad_error_v);
    if (qerr > cfg.quad_tol) {
        std::ostringstream msg;
        msg << "trajectory too coarse for the time quadrature: error estimate " << qerr << " exceeds " << cfg.quad_tol;
        throw NumericalError(msg.str());
    }
    return rep;
}

void write_terms_csv(std::ostream& os, const ProfileState& p, const TermValues& values) {
    os << "tag,xi,t,re,im\n";
    const auto old = os.precision(17);
    for (auto id : all_terms) {
        const auto& v = values[id];
        for (int i = 0; i < static_cast<int>(v.size()); ++i)
            os << term_name(id) << ',' << p.xi(i - p.K) << ',' << p.t << ',' << v[i].real() << ',' << v[i].imag() << '\n';
    }
    os.precision(old);
}

} // namespace hslab
