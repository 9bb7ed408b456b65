#pragma once

#include "hslab/spectral.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace hslab {

// Frequency thresholds 1/delta_u, 1/delta_v and the tolerance behind "f ~ g":
// |f - g| <= eta_sim max(|f|, |g|).
struct CutoffParams {
    double delta_u = 0.05;
    double delta_v = 0.05;
    double eta_sim = 0.1;
    void validate() const;
};

enum class TermId { N0u, N1u, N2u, N3u, N0v, N1v, N2v, N3v, Bu, Bv };
inline constexpr std::array<TermId, 10> all_terms{TermId::N0u, TermId::N1u, TermId::N2u, TermId::N3u, TermId::N0v,
                                                   TermId::N1v, TermId::N2v, TermId::N3v, TermId::Bu,  TermId::Bv};

std::string_view term_name(TermId id);
TermId term_from_name(std::string_view name);

bool similar(double f, double g, double eta);

// Membership of the pair (xi1, xi2) with xi = xi1 + xi2 in the u- and v-regions.
bool in_U(double a, double xi, double xi1, double xi2, const CutoffParams& cut);
bool in_V(double xi, double xi1, double xi2, const CutoffParams& cut);

// Profile coefficients restricted to the dealias band |j| <= K, indexed j + K.
struct ProfileState {
    Grid grid{2.0 * 3.141592653589793, 8};
    int K = 0;
    double t = 0.0;
    Coefficients params;
    std::vector<cplx> u;
    std::vector<cplx> v;

    double xi(int j) const { return 2.0 * 3.141592653589793 / grid.L() * j; }
};

ProfileState profile_state(const SimState& s, double dealias_fraction = 2.0 / 3.0);

// Every term at one time, plus the unsplit coupling integrands the classical
// identities use. Arrays are indexed like ProfileState.
struct TermValues {
    std::array<std::vector<cplx>, 10> term;  // by TermId
    std::vector<cplx> coupling_u;            // i xi int e^{it Phi1u} v v, whole plane
    std::vector<cplx> coupling_v;            // i xi2 int e^{it Phiv} u v, whole plane
    const std::vector<cplx>& operator[](TermId id) const { return term[static_cast<int>(id)]; }
};

// Region masks and reciprocal phases for one grid, a and cutoffs. Building the
// plan checks that no pair inside U or V has a vanishing phase.
class IbpsPlan {
public:
    IbpsPlan(const Grid& grid, double a, const CutoffParams& cut, double dealias_fraction = 2.0 / 3.0);

    TermValues evaluate(const ProfileState& p) const;

    int K() const { return K_; }
    std::size_t pairs_U() const { return nU_; }
    std::size_t pairs_V() const { return nV_; }
    // min |Phi| / |xi|^3 over the region; empirical comparability constants.
    double min_phase_ratio_U() const { return minU_; }
    double min_phase_ratio_V() const { return minV_; }

private:
    struct Pair {
        int j1;
        double inv_phi_u;  // 1/Phi1u on U, 0 elsewhere
        double inv_phi_v;  // 1/Phiv on V, 0 elsewhere
    };
    Grid grid_;
    double a_;
    int K_;
    std::vector<std::vector<Pair>> pairs_;  // by output index j + K
    std::size_t nU_ = 0, nV_ = 0;
    double minU_ = 0.0, minV_ = 0.0;
};

std::vector<cplx> eval_term(TermId id, const ProfileState& p, const CutoffParams& cut);

// Streams equally spaced profile states and integrates both identities with
// composite Simpson. Needs a multiple of 4 intervals so the 2h rule exists for
// the error estimate.
class IbpsAccumulator {
public:
    IbpsAccumulator(const IbpsPlan& plan, int intervals, double h);
    void add(const ProfileState& p);  // call intervals + 1 times, in order

    struct Result {
        double residual_u = 0.0;
        double residual_v = 0.0;
        double quad_error_u = 0.0;  // |S_h - S_2h| / 15, relative
        double quad_error_v = 0.0;
        double solver_gap_u = 0.0;  // classical reconstruction vs the stored profile
        double solver_gap_v = 0.0;
    };
    Result finish() const;

private:
    const IbpsPlan& plan_;
    int intervals_;
    double h_;
    int seen_ = 0;
    std::vector<cplx> u0_, v0_, uT_, vT_, Bu0_, Bv0_, BuT_, BvT_;
    std::vector<cplx> cl_u_, cl_v_, ib_u_, ib_v_;          // fine Simpson sums
    std::vector<cplx> cl_u2_, cl_v2_, ib_u2_, ib_v2_;      // 2h Simpson sums
};

struct IbpsRunConfig {
    double T = 0.1;
    double dt = 1e-5;  // rounded down so T/dt is a multiple of 4
    double dealias_fraction = 2.0 / 3.0;
    bool nonlinear_enabled = true;
    double quad_tol = 1e-3;  // relative time-quadrature error estimate allowed
};

struct IbpsReport {
    double residual = 0.0;  // max of the u and v residuals
    IbpsAccumulator::Result detail;
    int steps = 0;
    double dt = 0.0;
    std::size_t pairs_U = 0, pairs_V = 0;
    double min_phase_ratio_U = 0.0, min_phase_ratio_V = 0.0;
};

// Runs the solver from `initial` (band-limited first) and compares the classical
// and integrated-by-parts reconstructions of the profiles at T. With the
// nonlinearity off every coupling vanishes and the residual is exactly zero.
IbpsReport ibps_residual(SimState initial, const CutoffParams& cut, const IbpsRunConfig& cfg);

// CSV rows tag,xi,t,re,im for every term of one state.
void write_terms_csv(std::ostream& os, const ProfileState& p, const TermValues& values);

} // namespace hslab
