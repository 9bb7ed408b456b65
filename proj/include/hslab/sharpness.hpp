#pragma once

#include "hslab/picard.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hslab {

enum class LemmaId {
    L61_s_le_k3,
    L62_s_ge_km2,
    L63_s_ge_k2_34,
    L64_quarter_s,
    L65_quarter_k,
    L66_agt_s,
    L67_agt_k,
    L68_cubic_34
};

inline constexpr std::array<LemmaId, 8> all_lemmas{LemmaId::L61_s_le_k3,   LemmaId::L62_s_ge_km2,
                                                   LemmaId::L63_s_ge_k2_34, LemmaId::L64_quarter_s,
                                                   LemmaId::L65_quarter_k,  LemmaId::L66_agt_s,
                                                   LemmaId::L67_agt_k,      LemmaId::L68_cubic_34};

std::string_view lemma_tag(LemmaId id);
// Accepts the full tag or its short prefix ("L64").
LemmaId lemma_from_tag(std::string_view tag);
// Inequality on (k, s) whose violation the family exhibits.
std::string_view lemma_boundary(LemmaId id);

enum class Iterate { SecondV, SecondU, ThirdV };
std::string_view iterate_name(Iterate it);

struct LemmaParams {
    double a = 2.0;
    double k = 0.0;
    double s = 0.0;
    double delta = 0.05;         // L63 box scale
    double b = 0.99;             // L62 box split
    double c = 0.01;             // time constant: t = c N^-3 or t = c, per lemma
    std::optional<double> rho;   // L62 weight; bracket midpoint when unset
    bool check_side_conditions = true;
};

// Reference parameters used by the acceptance ladder.
LemmaParams reference_params(LemmaId id);
double default_tolerance(LemmaId id);
double l62_default_rho(double k, double s);

struct Counterexample {
    LemmaId lemma{};
    double N = 0.0;
    double a = 0.0;
    Iterate iterate{};
    BoxData u0, v0;
    double t = 0.0;
    Window window;
    double norm_index = 0.0;  // k for u-norms, s for v-norms
    bool norm_on_u = false;
};

// Throws DomainError on a mismatch with the lemma's hypotheses (a-range, N >= 16,
// and the L62/L63 side conditions unless check_side_conditions is off).
Counterexample build(LemmaId id, double N, const LemmaParams& p);

double predicted_slope(LemmaId id, const LemmaParams& p);

// L64-L67 keep |t Phi| small everywhere; the others only need sin(z)/z >= 0.99
// on the support, plus a node with |t Phi| <= 0.1.
bool bounded_phase(LemmaId id);

struct PhaseCheck {
    double max_tphase = 0.0;   // max |t Phi| (|t Theta| for L68) over support nodes in the window
    double min_tphase = 0.0;
    double min_sinc = 1.0;     // min sin(z)/z over the same nodes
    double dominance = 0.0;    // L68: max |second| / |first| kernel piece
    bool ok = true;
    std::string detail;
};

PhaseCheck phase_regime(const Counterexample& c);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> Ns;
};

struct SlopeVerdict {
    bool pass = false;
    std::string report;
};

SlopeVerdict verdict(const ExponentFit& fit, double predicted, double tol);

struct LadderOptions {
    PicardOptions picard{};
    std::optional<double> tol;  // default_tolerance when unset
};

struct Rung {
    double N = 0.0;
    double norm = 0.0;
    PhaseCheck check;
};

struct LadderReport {
    LemmaId lemma{};
    LemmaParams params;
    std::vector<Rung> rungs;
    ExponentFit fit;
    double predicted = 0.0;
    double tol = 0.0;
    bool regime_ok = true;  // every rung passed phase_regime; reported, not part of pass
    bool monotone = true;
    bool pass = false;      // verdict on the fit alone
    std::string summary;

    std::vector<double> norms() const;
};

inline constexpr std::array<double, 5> default_ladder{64, 128, 256, 512, 1024};

// Needs >= 4 increasing rungs. Quadrature failures are rethrown naming the rung.
LadderReport run_ladder(LemmaId id, std::span<const double> Ns, const LemmaParams& p, const LadderOptions& opt = {});

} // namespace hslab
