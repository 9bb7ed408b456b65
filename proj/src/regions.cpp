#include "hslab/regions.hpp"
#include "hslab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hslab {

namespace {

using Q = Rational;

Q q(long long n, long long d = 1) { return Q(n) / Q(d); }

Q max3(const Q& x, const Q& y, const Q& z) { return std::max({x, y, z}); }
Q min3(const Q& x, const Q& y, const Q& z) { return std::min({x, y, z}); }

enum class Case { Below, Quarter, Above };

Case case_of(double a) {
    if (a < 0.25) return Case::Below;
    if (a == 0.25) return Case::Quarter;
    return Case::Above;
}

void require_supported(double a) {
    if (!region_supported(a)) throw DomainError("regions are not defined for a in {0, 1} or non-finite a");
}

Q pow10(int e) {
    Q r = 1;
    for (int i = 0; i < std::abs(e); ++i) r *= 10;
    return e < 0 ? Q(1) / r : r;
}

} // namespace

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw DomainError("non-finite regularity index");
    return Q(x);
}

Rational parse_rational(std::string_view t) {
    auto fail = [&] { return DomainError("cannot parse '" + std::string(t) + "' as a rational number"); };
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    if (t.empty()) throw fail();

    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        Q num = parse_rational(t.substr(0, slash));
        Q den = parse_rational(t.substr(slash + 1));
        if (den == 0) throw fail();
        return num / den;
    }

    std::size_t i = 0;
    bool neg = false;
    if (t[i] == '+' || t[i] == '-') neg = t[i++] == '-';
    boost::multiprecision::cpp_int digits = 0;
    int frac_digits = 0;
    bool any = false, dot = false;
    for (; i < t.size(); ++i) {
        char c = t[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            if (dot) ++frac_digits;
            any = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw fail();
    int expo = 0;
    if (i < t.size()) {
        if (t[i] != 'e' && t[i] != 'E') throw fail();
        ++i;
        bool eneg = false;
        if (i < t.size() && (t[i] == '+' || t[i] == '-')) eneg = t[i++] == '-';
        if (i >= t.size()) throw fail();
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw fail();
            expo = expo * 10 + (t[i] - '0');
            if (expo > 400) throw fail();
        }
        if (eneg) expo = -expo;
    }
    Q r = Q(digits) * pow10(expo - frac_digits);
    return neg ? Q(-r) : r;
}

std::string_view to_string(Lwp v) {
    switch (v) {
    case Lwp::DirectA0: return "DirectA0";
    case Lwp::IBPSOnly: return "IBPSOnly";
    default: return "None";
    }
}
std::string_view to_string(IllPosed v) {
    switch (v) {
    case IllPosed::C2: return "C2";
    case IllPosed::C3: return "C3";
    default: return "None";
    }
}
std::string_view to_string(Gwp v) {
    switch (v) {
    case Gwp::Yes: return "Yes";
    case Gwp::No: return "No";
    default: return "Unknown";
    }
}

bool region_supported(double a) { return std::isfinite(a) && a != 0.0 && a != 1.0; }

bool in_A(double a, const RegularityPoint& p) {
    require_supported(a);
    const Q& k = p.k;
    const Q& s = p.s;
    switch (case_of(a)) {
    case Case::Below:
        return k > q(-3, 4) && s > max3(q(-3, 4), k / 2 - q(3, 4), k - 2) && s < k + 3;
    case Case::Quarter:
        return k >= q(3, 4) && s >= k / 2 + q(3, 8) && s > k - 2 && s < k + 3;
    case Case::Above:
        return k >= 0 && s >= k / 2 && s > k - 2 && s < k + 3;
    }
    return false;
}

bool in_A0(double a, const RegularityPoint& p) {
    require_supported(a);
    const Q& k = p.k;
    const Q& s = p.s;
    switch (case_of(a)) {
    case Case::Below:
        return k > q(-3, 4) && s > std::max(k / 2 - q(3, 8), k - q(3, 2)) && s < k + q(5, 2);
    case Case::Quarter:
        return k >= q(3, 4) && s >= k / 2 + q(3, 8) && s > k - q(3, 2) && s < k + q(5, 2);
    case Case::Above:
        return k >= 0 && s >= k / 2 && s > k - q(3, 2) && s < k + q(5, 2);
    }
    return false;
}

bool in_closure_A(double a, const RegularityPoint& p) {
    require_supported(a);
    const Q& k = p.k;
    const Q& s = p.s;
    switch (case_of(a)) {
    case Case::Below:
        return k >= q(-3, 4) && s >= max3(q(-3, 4), k / 2 - q(3, 4), k - 2) && s <= k + 3;
    case Case::Quarter:
        return k >= q(3, 4) && s >= k / 2 + q(3, 8) && s >= k - 2 && s <= k + 3;
    case Case::Above:
        return k >= 0 && s >= k / 2 && s >= k - 2 && s <= k + 3;
    }
    return false;
}

bool in_gap_region(const RegularityPoint& p) {
    return p.k > q(-3, 4) && p.s > std::min(p.k / 2 - q(3, 4), Q(-1)) && p.s < q(-3, 4);
}

bool in_c2_subcase(const RegularityPoint& p) {
    return p.s > p.k + 3 || p.s < min3(p.k / 2 - q(3, 4), p.k - 2, Q(-1));
}

Verdict classify(double a, const RegularityPoint& p) {
    Verdict v;
    if (!region_supported(a)) {
        v.supported = false;
        return v;
    }
    if (in_A0(a, p)) {
        v.lwp = Lwp::DirectA0;
    } else if (in_A(a, p)) {
        v.lwp = Lwp::IBPSOnly;
    } else if (in_closure_A(a, p)) {
        v.open_region = true;
    } else if (a >= 0.25) {
        v.illposed = IllPosed::C2;
    } else if (in_c2_subcase(p)) {
        v.illposed = IllPosed::C2;
    } else if (a == -0.125) {
        // only the C2 subcases are settled here
        v.open_region = true;
    } else {
        v.illposed = IllPosed::C3;
    }
    return v;
}

Gwp classify_gwp(const Coefficients& c, const RegularityPoint& p, bool original_system) {
    if (!region_supported(c.a) || !c.real_valued()) return Gwp::Unknown;
    const double g = c.gamma.real();
    const double th = c.theta.real();
    if (c.a != 0.25) {
        if (g * th < 0.0 && p.k >= 0 && p.s >= 0 && in_A(c.a, p)) return Gwp::Yes;
        return Gwp::Unknown;
    }
    if (original_system && p.k >= 1 && p.s >= 1 && in_A(c.a, p) && g > 0.0 && th < 0.0) return Gwp::Yes;
    return Gwp::Unknown;
}

Verdict classify(const Coefficients& c, const RegularityPoint& p, bool original_system) {
    Verdict v = classify(c.a, p);
    if (v.supported) v.gwp = classify_gwp(c, p, original_system);
    return v;
}

std::vector<BoundarySegment> boundary_segments(double a, double k_max) {
    require_supported(a);
    std::vector<BoundarySegment> out;
    auto seg = [&](KsPoint s0, KsPoint s1, std::string label, bool inc0, bool inc1, bool inner, bool ray = false) {
        out.push_back({std::move(s0), std::move(s1), ray, std::move(label), inc0, inc1, inner});
    };

    // Corner, top-left vertex and the vertex where the lower boundary meets s = k-2.
    KsPoint corner, top, last;
    switch (case_of(a)) {
    case Case::Above:
        corner = {0, 0};
        top = {0, 3};
        last = {4, 2};
        break;
    case Case::Quarter:
        corner = {q(3, 4), q(3, 4)};
        top = {q(3, 4), q(15, 4)};
        last = {q(19, 4), q(11, 4)};
        break;
    case Case::Below:
        corner = {q(-3, 4), q(-3, 4)};
        top = {q(-3, 4), q(9, 4)};
        last = {q(5, 2), q(1, 2)};
        break;
    }
    Q kmax = std::max<Q>(to_rational(k_max), Q(last.k + 1));
    KsPoint top_end{kmax, kmax + 3};
    KsPoint low_end{kmax, kmax - 2};

    if (case_of(a) == Case::Below) {
        KsPoint kink{0, q(-3, 4)};
        seg(corner, top, "k=-3/4", false, false, false);
        seg(top, top_end, "s=k+3", false, false, false, true);
        seg(corner, kink, "s=-3/4", false, false, false);
        seg(kink, last, "s=k/2-3/4", false, false, false);
        seg(last, low_end, "s=k-2", false, false, false, true);
    } else {
        const bool quarter = case_of(a) == Case::Quarter;
        seg(corner, top, quarter ? "k=3/4" : "k=0", true, false, true);
        seg(top, top_end, "s=k+3", false, false, false, true);
        seg(corner, last, quarter ? "s=k/2+3/8" : "s=k/2", true, false, true);
        seg(last, low_end, "s=k-2", false, false, false, true);
    }
    return out;
}

} // namespace hslab
