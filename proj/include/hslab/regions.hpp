#pragma once

#include "hslab/phases.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace hslab {

using Rational = boost::multiprecision::cpp_rational;

// Exact: a double is a dyadic rational.
Rational to_rational(double x);
// Accepts "-0.75", "3/4", "1.5e-2", "7". Exact, no rounding.
Rational parse_rational(std::string_view text);

struct RegularityPoint {
    Rational k;
    Rational s;

    static RegularityPoint of(double k, double s) { return {to_rational(k), to_rational(s)}; }
    static RegularityPoint parse(std::string_view k, std::string_view s) {
        return {parse_rational(k), parse_rational(s)};
    }
    double kd() const { return static_cast<double>(k); }
    double sd() const { return static_cast<double>(s); }
};

enum class Lwp { DirectA0, IBPSOnly, None };
enum class IllPosed { C2, C3, None };
enum class Gwp { Yes, No, Unknown };

std::string_view to_string(Lwp v);
std::string_view to_string(IllPosed v);
std::string_view to_string(Gwp v);

struct Verdict {
    Lwp lwp = Lwp::None;
    IllPosed illposed = IllPosed::None;
    Gwp gwp = Gwp::Unknown;
    bool open_region = false;
    bool supported = true;
};

bool region_supported(double a);

// a in {0, 1} throws DomainError.
bool in_A(double a, const RegularityPoint& p);
bool in_A0(double a, const RegularityPoint& p);
bool in_closure_A(double a, const RegularityPoint& p);
// Interior of the a = -1/8 region left undecided by the C2 subcases.
bool in_gap_region(const RegularityPoint& p);
// s > k+3 or s < min{k/2-3/4, k-2, -1}; meaningful for a < 1/4.
bool in_c2_subcase(const RegularityPoint& p);

// Never throws; a in {0, 1} gives supported = false. gwp stays Unknown here.
Verdict classify(double a, const RegularityPoint& p);
// Same as above, with gwp filled from the coefficients.
Verdict classify(const Coefficients& c, const RegularityPoint& p, bool original_system);

Gwp classify_gwp(const Coefficients& c, const RegularityPoint& p, bool original_system);

struct KsPoint {
    Rational k;
    Rational s;
    double kd() const { return static_cast<double>(k); }
    double sd() const { return static_cast<double>(s); }
};

struct BoundarySegment {
    KsPoint start;
    KsPoint end;           // for rays, where the ray leaves the window k <= k_max
    bool ray = false;      // end is a window clip, not a vertex
    std::string line_label;
    bool start_included = false;
    bool end_included = false;
    bool interior_included = false;
};

std::vector<BoundarySegment> boundary_segments(double a, double k_max);

} // namespace hslab
