#include "hslab/phases.hpp"
#include "hslab/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace hslab {

namespace {

constexpr std::array<std::string_view, 10> kNames{
    "Phi1u", "Phi2u", "Phiv", "Psi1u", "Psi2u", "Psi1v", "Psi2v", "Psi3v", "Psi4v", "Theta"};

double cube(double x) { return x * x * x; }

bool nonzero_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag()) && z != cplx{0.0, 0.0};
}

} // namespace

void Coefficients::validate() const {
    if (!std::isfinite(a) || a == 0.0) throw DomainError("coefficient a must be finite and nonzero");
    if (!nonzero_finite(beta)) throw DomainError("coefficient beta must be finite and nonzero");
    if (!nonzero_finite(gamma)) throw DomainError("coefficient gamma must be finite and nonzero");
    if (!nonzero_finite(theta)) throw DomainError("coefficient theta must be finite and nonzero");
}

bool Coefficients::real_valued() const {
    return beta.imag() == 0.0 && gamma.imag() == 0.0 && theta.imag() == 0.0;
}

void require_theory_a(double a) {
    if (!std::isfinite(a)) throw DomainError("a must be finite");
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    if (a == 1.0) throw DomainError("a = 1 is excluded from theory-facing operations");
}

int arity(PhaseId id) {
    switch (id) {
    case PhaseId::Phi1u:
    case PhaseId::Phi2u:
    case PhaseId::Phiv:
        return 2;
    default:
        return 3;
    }
}

std::string_view phase_name(PhaseId id) { return kNames[static_cast<std::size_t>(id)]; }

PhaseId phase_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<PhaseId>(i);
    throw DomainError("unknown phase tag '" + std::string(name) + "'");
}

double eval_phase(PhaseId id, double a, std::span<const double> f) {
    if (static_cast<int>(f.size()) != arity(id))
        throw DomainError(std::string(phase_name(id)) + " takes " + std::to_string(arity(id)) +
                          " frequencies, got " + std::to_string(f.size()));
    for (double x : f)
        if (!std::isfinite(x)) throw DomainError("non-finite frequency");
    if (!std::isfinite(a)) throw DomainError("non-finite a");

    double xi = 0.0;
    for (double x : f) xi += x;
    const double x3 = cube(xi);

    switch (id) {
    case PhaseId::Phi1u: return phi1u(a, f[0], f[1]);
    case PhaseId::Phi2u: return phi2u(a, f[0], f[1]);
    case PhaseId::Phiv: return phiv(a, f[0], f[1]);
    // (xi11, xi12, xi2)
    case PhaseId::Psi1u: return -a * x3 + cube(f[2]) + a * cube(f[0]) + cube(f[1]);
    // (xi1, xi21, xi22)
    case PhaseId::Psi2u: return -a * x3 + cube(f[0]) + a * cube(f[1]) + cube(f[2]);
    case PhaseId::Psi1v: return -x3 + cube(f[2]) + cube(f[0]) + cube(f[1]);
    case PhaseId::Psi2v: return -x3 + cube(f[2]) + a * cube(f[0]) + a * cube(f[1]);
    case PhaseId::Psi3v:
    case PhaseId::Psi4v: return -x3 + a * cube(f[0]) + a * cube(f[1]) + cube(f[2]);
    // (xi2, xi11, xi12)
    case PhaseId::Theta: return -x3 + cube(f[0]) + cube(f[1]) + cube(f[2]);
    }
    throw DomainError("unhandled phase tag");
}

double mu(double a) {
    if (!(a >= 0.25)) throw DomainError("mu(a) needs a >= 1/4");
    return 0.5 + std::sqrt(3.0 * (4.0 * a - 1.0)) / 6.0;
}

double phase_floor(double a) {
    if (!(a < 0.25)) throw DomainError("phase_floor(a) needs a < 1/4");
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    return 0.25 - a;
}

double factorization_residual(PhaseId id, double a, std::span<const double> f) {
    const double direct = eval_phase(id, a, f);
    double factored = 0.0;
    switch (id) {
    case PhaseId::Phi1u: {
        const double m = mu(a);
        const double xi = f[0] + f[1];
        factored = 3.0 * xi * (f[0] - m * xi) * (f[0] - (1.0 - m) * xi);
        break;
    }
    case PhaseId::Phiv: {
        // Phiv(xi, xi1, xi2) = Phi1u(-xi1, -xi, xi2): output -xi1, inputs -xi and xi2
        const double xi = f[0] + f[1];
        factored = phi1u(a, -xi, f[1]);
        break;
    }
    case PhaseId::Theta:
        factored = -3.0 * (f[0] + f[1]) * (f[0] + f[2]) * (f[1] + f[2]);
        break;
    default:
        throw DomainError("no factorization recorded for " + std::string(phase_name(id)));
    }
    return std::abs(direct - factored) / (1.0 + std::abs(direct));
}

} // namespace hslab
