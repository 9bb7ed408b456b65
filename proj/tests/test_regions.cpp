#include "doctest.h"

#include "hslab/errors.hpp"
#include "hslab/regions.hpp"

#include <random>
#include <set>
#include <utility>

using namespace hslab;

namespace {

RegularityPoint P(std::string_view k, std::string_view s) { return RegularityPoint::parse(k, s); }

// Independent double-precision rendering of the region inequalities, used away
// from the boundary lines.
bool in_A_float(double a, double k, double s) {
    if (a < 0.25) return k > -0.75 && s > std::max({-0.75, k / 2 - 0.75, k - 2}) && s < k + 3;
    if (a == 0.25) return k >= 0.75 && s >= k / 2 + 0.375 && s > k - 2 && s < k + 3;
    return k >= 0 && s >= k / 2 && s > k - 2 && s < k + 3;
}

} // namespace

TEST_SUITE("regions") {

TEST_CASE("rational parsing is exact") {
    CHECK(parse_rational("3/4") == Rational(3) / 4);
    CHECK(parse_rational("-0.75") == Rational(-3) / 4);
    CHECK(parse_rational("1.5e-2") == Rational(3) / 200);
    CHECK(parse_rational("0.1") == Rational(1) / 10);
    CHECK(to_rational(0.1) != Rational(1) / 10);  // doubles are dyadic
    CHECK_THROWS(parse_rational("abc"));
    CHECK_THROWS(parse_rational("1/0"));
}

TEST_CASE("membership examples") {
    CHECK(in_A(0.5, P("0", "0")));
    CHECK(in_A(0.25, P("3/4", "3/4")));
    CHECK_FALSE(in_A(0.5, P("4", "2")));
    CHECK(in_A0(-1.0, P("-0.5", "-0.5")));
    CHECK_FALSE(in_A0(0.5, P("0", "2.75")));
    CHECK(in_A0(0.25, P("3/4", "3/4")));
    CHECK_THROWS_AS(in_A(1.0, P("0", "0")), DomainError);
    CHECK_THROWS_AS(in_A0(0.0, P("0", "0")), DomainError);
}

TEST_CASE("classification examples") {
    CHECK(classify(0.5, P("0", "4")).illposed == IllPosed::C2);
    const Verdict gap = classify(-0.125, P("0", "-0.8"));
    CHECK(gap.open_region);
    CHECK(gap.illposed == IllPosed::None);
    CHECK(in_gap_region(P("0", "-0.8")));
    CHECK(classify(-1.0, P("0", "-0.8")).illposed == IllPosed::C3);
    CHECK(classify(0.5, P("0", "0")).lwp == Lwp::DirectA0);
    CHECK(classify(0.5, P("0", "2.75")).lwp == Lwp::IBPSOnly);
    // boundary points outside A are undecided
    const Verdict edge = classify(0.5, P("4", "2"));
    CHECK(edge.open_region);
    CHECK(edge.lwp == Lwp::None);
    CHECK(edge.illposed == IllPosed::None);
    CHECK(classify(-1.0, P("-3/4", "-3/4")).open_region);
    // a = -1/8 away from the C2 subcases is never reported as C3
    CHECK(classify(-0.125, P("4", "1")).open_region);
    CHECK(classify(-0.125, P("-1", "0")).open_region);
    CHECK(classify(-0.125, P("0", "4")).illposed == IllPosed::C2);
    CHECK(classify(-0.125, P("0", "-2.5")).illposed == IllPosed::C2);
    CHECK(classify(-0.125, P("0", "-2")).open_region);
    CHECK(classify(-0.125, P("0", "0")).lwp != Lwp::None);
    CHECK(classify(-1.0, P("4", "1")).illposed == IllPosed::C3);
    // a < 1/4 uses C2 on the subcases
    CHECK(classify(-1.0, P("0", "3.5")).illposed == IllPosed::C2);
    CHECK(classify(0.25, P("0", "0")).illposed == IllPosed::C2);
}

TEST_CASE("unsupported a") {
    for (double a : {0.0, 1.0}) {
        const Verdict v = classify(a, P("0", "0"));
        CHECK_FALSE(v.supported);
        CHECK(v.lwp == Lwp::None);
        CHECK(v.illposed == IllPosed::None);
    }
    CHECK_FALSE(region_supported(1.0));
    CHECK(region_supported(-0.125));
}

TEST_CASE("global well-posedness") {
    Coefficients c{0.5, 1.0, 1.0, -1.0};
    CHECK(classify_gwp(c, P("0", "0"), false) == Gwp::Yes);
    CHECK(classify(c, P("0", "0"), false).gwp == Gwp::Yes);
    Coefficients q{0.25, 1.0, 1.0, -3.0};
    CHECK(classify_gwp(q, P("1", "1"), true) == Gwp::Yes);
    CHECK(classify_gwp(q, P("1", "1"), false) == Gwp::Unknown);
    CHECK(classify_gwp(q, P("3/4", "3/4"), true) == Gwp::Unknown);
    Coefficients pos{0.5, 1.0, 1.0, 1.0};
    CHECK(classify_gwp(pos, P("0", "0"), false) == Gwp::Unknown);
    Coefficients cx{0.5, 1.0, {1.0, 1.0}, -1.0};
    CHECK(classify_gwp(cx, P("0", "0"), false) == Gwp::Unknown);
}

TEST_CASE("diagonal thresholds") {
    // lwp on s = k exactly from -3/4 (open) below 1/4, from 0 above, from 3/4 at 1/4
    struct Case {
        double a;
        Rational threshold;
        bool closed;
    };
    for (const Case& c : {Case{-1.0, Rational(-3) / 4, false}, Case{-0.125, Rational(-3) / 4, false},
                          Case{0.5, Rational(0), true}, Case{2.0, Rational(0), true}, Case{0.25, Rational(3) / 4, true}}) {
        for (int i = -400; i <= 800; ++i) {
            const Rational k = Rational(i) / 160;
            const bool lwp = classify(c.a, RegularityPoint{k, k}).lwp != Lwp::None;
            const bool expect = c.closed ? k >= c.threshold : k > c.threshold;
            CHECK_MESSAGE(lwp == expect, "a=" << c.a << " k=" << k);
        }
    }
}

TEST_CASE("random consistency") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> da(-3, 3), dk(-3, 8), ds(-4, 10);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        double a = da(g);
        if (i % 10 == 0) a = 0.25;
        if (i % 10 == 1) a = -0.125;
        const double k = dk(g), s = ds(g);
        const auto p = RegularityPoint::of(k, s);
        const Verdict v = classify(a, p);
        if (in_A0(a, p)) CHECK(in_A(a, p));
        CHECK_FALSE((v.lwp != Lwp::None && v.illposed != IllPosed::None));
        if (v.open_region) CHECK((v.lwp == Lwp::None && v.illposed == IllPosed::None));
        if (v.lwp != Lwp::None) CHECK(in_A(a, p));
        if (in_A_float(a, k, s) != in_A(a, p)) ++mismatches;
        if (!v.open_region && v.lwp == Lwp::None) CHECK(v.illposed != IllPosed::None);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("boundary geometry") {
    auto vertices = [](double a) {
        std::set<std::pair<std::pair<double, double>, bool>> out;
        for (const auto& s : boundary_segments(a, 7)) {
            out.insert({{s.start.kd(), s.start.sd()}, s.start_included});
            if (!s.ray) out.insert({{s.end.kd(), s.end.sd()}, s.end_included});
        }
        return out;
    };
    const auto half = vertices(0.5);
    CHECK(half.count({{0, 0}, true}));
    CHECK(half.count({{0, 3}, false}));
    CHECK(half.count({{4, 2}, false}));
    const auto quarter = vertices(0.25);
    CHECK(quarter.count({{0.75, 0.75}, true}));
    CHECK(quarter.count({{4.75, 2.75}, false}));
    const auto below = vertices(-1.0);
    CHECK(below.count({{-0.75, -0.75}, false}));
    CHECK(below.count({{0, -0.75}, false}));
    CHECK(below.count({{2.5, 0.5}, false}));
    CHECK_THROWS_AS(boundary_segments(1.0, 7), DomainError);
}

TEST_CASE("boundary flags agree with membership") {
    for (double a : {-2.0, -0.125, 0.25, 0.5, 3.0}) {
        for (const auto& seg : boundary_segments(a, 7)) {
            CHECK(in_A(a, RegularityPoint{seg.start.k, seg.start.s}) == seg.start_included);
            if (!seg.ray) CHECK(in_A(a, RegularityPoint{seg.end.k, seg.end.s}) == seg.end_included);
            const RegularityPoint mid{(seg.start.k + seg.end.k) / 2, (seg.start.s + seg.end.s) / 2};
            CHECK_MESSAGE(in_A(a, mid) == seg.interior_included, seg.line_label);
            CHECK(in_closure_A(a, mid));
        }
    }
}

TEST_CASE("segments are consecutive along the boundary") {
    for (double a : {-1.0, 0.25, 0.5}) {
        const auto segs = boundary_segments(a, 7);
        std::multiset<std::pair<double, double>> ends;
        for (const auto& s : segs) {
            ends.insert({s.start.kd(), s.start.sd()});
            if (!s.ray) ends.insert({s.end.kd(), s.end.sd()});
        }
        // every finite vertex is shared by exactly two segments
        for (const auto& e : ends) CHECK(ends.count(e) == 2);
    }
}

}
