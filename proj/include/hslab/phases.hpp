#pragma once

#include <complex>
#include <span>
#include <string_view>

namespace hslab {

using cplx = std::complex<double>;

struct Coefficients {
    double a = 0.5;
    cplx beta{1.0, 0.0};
    cplx gamma{1.0, 0.0};
    cplx theta{1.0, 0.0};

    // Throws DomainError unless a, beta, gamma, theta are all nonzero and finite.
    void validate() const;
    bool real_valued() const;
};

// Theory-facing operations call this; a = 0 and a = 1 are excluded.
void require_theory_a(double a);

enum class PhaseId { Phi1u, Phi2u, Phiv, Psi1u, Psi2u, Psi1v, Psi2v, Psi3v, Psi4v, Theta };

int arity(PhaseId id);
std::string_view phase_name(PhaseId id);
PhaseId phase_from_name(std::string_view name);

// The output frequency xi is the sum of freqs; callers never pass it.
//   Phi1u, Phi2u, Phiv : (xi1, xi2)
//   Psi1u              : (xi11, xi12, xi2)
//   Psi2u              : (xi1, xi21, xi22)
//   Psi1v, Psi2v       : (xi11, xi12, xi2)
//   Psi3v, Psi4v       : (xi1, xi21, xi22)
//   Theta              : (xi2, xi11, xi12)
double eval_phase(PhaseId id, double a, std::span<const double> freqs);

inline double phi1u(double a, double x1, double x2) {
    const double x = x1 + x2;
    return -a * x * x * x + x1 * x1 * x1 + x2 * x2 * x2;
}
inline double phi2u(double a, double x1, double x2) {
    const double x = x1 + x2;
    return a * (-x * x * x + x1 * x1 * x1 + x2 * x2 * x2);
}
inline double phiv(double a, double x1, double x2) {
    const double x = x1 + x2;
    return -x * x * x + a * x1 * x1 * x1 + x2 * x2 * x2;
}

// Root parameter of the u-phase for a >= 1/4.
double mu(double a);

// c(a) with |Phi1u| >= c(a)|xi|^3, for a < 1/4.
double phase_floor(double a);

// |direct - factored| / (1 + |direct|). Phi1u uses the mu product form (a >= 1/4),
// Phiv the reflection identity through Phi1u, Theta its product form.
double factorization_residual(PhaseId id, double a, std::span<const double> freqs);

} // namespace hslab
