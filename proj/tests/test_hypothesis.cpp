#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "edverify/geometry.hpp"
#include "edverify/hypothesis.hpp"
#include "edverify/rng.hpp"
#include "support/brute.hpp"

using namespace edv;

namespace {

Vec basis(std::size_t d, std::size_t i) {
    Vec e(d, 0.0);
    e[i] = 1.0;
    return e;
}

// Closed-form maximum margin of the margin-1/3 family of size n labeled
// (first +, rest -), derived by symmetry reduction: with m = n - 1,
//   margin = (m + 3) / sqrt(3 (3 m^2 + 10 m + 3)).
// Sanity anchors: n=2 gives 1/sqrt(3), n=4 gives 1/sqrt(5), and the value
// decreases toward 1/3 as n grows.
double third_family_max_margin(std::size_t n) {
    const double m = static_cast<double>(n - 1);
    return (m + 3.0) / std::sqrt(3.0 * (3.0 * m * m + 10.0 * m + 3.0));
}

LabeledSet third_family_instance(std::size_t n) {
    VectorFamily f = construct_margin_third(n);
    LabeledSet s;
    s.points = f.points;
    s.labels.assign(n, -1);
    s.labels[0] = 1;
    return s;
}

}  // namespace

TEST_CASE("max_margin solves the antipodal pair exactly") {
    LabeledSet s;
    s.points = {basis(2, 0), scaled(basis(2, 0), -1.0)};
    s.labels = {1, -1};
    MaxMarginResult r = max_margin(s);
    CHECK(r.separable);
    CHECK(r.margin == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(r.w[0] - 1.0) <= 1e-7);
}

TEST_CASE("max_margin reports a conflicting duplicate point as non-separable") {
    LabeledSet s;
    s.points = {basis(2, 0), basis(2, 0)};
    s.labels = {1, -1};
    MaxMarginResult r = max_margin(s);
    CHECK_FALSE(r.separable);
    CHECK(r.margin <= 1e-12);
    CHECK(r.margin >= -1e-12);  // a perpendicular direction scores zero
}

TEST_CASE("max_margin rejects an empty set") {
    CHECK_THROWS_AS(max_margin(LabeledSet{}), std::domain_error);
}

TEST_CASE("max_margin matches the closed form on isolate-one labelings of the 1/3 family") {
    for (std::size_t n = 2; n <= 7; ++n) {
        CAPTURE(n);
        MaxMarginResult r = max_margin(third_family_instance(n));
        CHECK(r.separable);
        CHECK(std::fabs(r.margin - third_family_max_margin(n)) <= 1e-6);
        CHECK(is_unit(r.w, 1e-7));
        // The returned witness must actually achieve the reported margin.
        LabeledSet s = third_family_instance(n);
        CHECK(margin_of(normalized(r.w), s.points, s.labels) >= r.margin - 1e-9);
    }
}

TEST_CASE("max_margin in the plane agrees with an angular grid search") {
    Rng rng(0xfeed5eedULL);
    for (int trial = 0; trial < 25; ++trial) {
        CAPTURE(trial);
        const std::size_t n = 2 + rng.index(7);
        LabeledSet s;
        for (std::size_t i = 0; i < n; ++i) {
            s.points.push_back(rng.unit_vector(2));
            s.labels.push_back(rng.coin() ? 1 : -1);
        }
        s.labels[0] = 1;
        s.labels[n - 1] = -1;  // keep the instance two-sided
        const double grid = brute::grid_max_margin(s.points, s.labels);
        const double got = max_margin(s).margin;
        CHECK(std::fabs(got - grid) <= 1e-3);
        CHECK(got >= grid - 1e-9);  // exact enumeration can only beat the grid
    }
}

TEST_CASE("max_margin one-sided convention: margin one with a mean witness") {
    LabeledSet pos;
    pos.points = {basis(3, 0), basis(3, 1)};
    pos.labels = {1, 1};
    MaxMarginResult r = max_margin(pos);
    CHECK(r.separable);
    CHECK(r.margin == 1.0);
    CHECK(dot(r.w, basis(3, 0)) > 0.0);
    CHECK(dot(r.w, basis(3, 1)) > 0.0);

    LabeledSet neg;
    neg.points = {basis(3, 2)};
    neg.labels = {-1};
    MaxMarginResult rn = max_margin(neg);
    CHECK(rn.separable);
    CHECK(rn.margin == 1.0);
    CHECK(dot(rn.w, basis(3, 2)) < 0.0);
}

TEST_CASE("membership_linear_margin thresholds the measured maximum margin") {
    LabeledSet s = third_family_instance(4);
    const double true_margin = third_family_max_margin(4);  // 1/sqrt(5) ~ 0.447

    OracleVerdict at_third = membership_linear_margin(s, 1.0 / 3.0);
    CHECK(at_third.realizable);
    REQUIRE(at_third.achieved_margin.has_value());
    CHECK(std::fabs(*at_third.achieved_margin - true_margin) <= 1e-6);
    REQUIRE(at_third.weight.has_value());

    // The maximum margin of this labeling sits strictly above 1/3, so slightly
    // larger thresholds still pass; beyond the true value they must fail.
    CHECK(membership_linear_margin(s, 0.34).realizable);
    CHECK(membership_linear_margin(s, 0.44).realizable);
    CHECK_FALSE(membership_linear_margin(s, 0.45).realizable);
    CHECK_FALSE(membership_linear_margin(s, 1.0).realizable);

    CHECK_THROWS_AS(membership_linear_margin(s, -0.1), std::domain_error);
    CHECK_THROWS_AS(membership_linear_margin(s, 1.1), std::domain_error);
}

TEST_CASE("membership_linear_margin accepts one-sided sets at every threshold") {
    LabeledSet s;
    s.points = {basis(2, 0), basis(2, 1)};
    s.labels = {1, 1};
    CHECK(membership_linear_margin(s, 1.0).realizable);
    CHECK(membership_linear_margin(s, 0.0).realizable);
}

TEST_CASE("membership_linear_margin is invariant to positive rescaling of points") {
    LabeledSet s = third_family_instance(5);
    LabeledSet scaled_set = s;
    for (std::size_t i = 0; i < scaled_set.points.size(); ++i) {
        scaled_set.points[i] = scaled(scaled_set.points[i], 0.25 + 3.0 * (i % 3));
    }
    for (double gamma : {0.0, 0.2, 1.0 / 3.0, 0.4, 0.6}) {
        OracleVerdict a = membership_linear_margin(s, gamma);
        OracleVerdict b = membership_linear_margin(scaled_set, gamma);
        CHECK(a.realizable == b.realizable);
        CHECK(std::fabs(*a.achieved_margin - *b.achieved_margin) <= 1e-9);
    }
}

TEST_CASE("membership_linear_margin is monotone in the threshold") {
    Rng rng(0xabcdef12ULL);
    LabeledSet s;
    for (int i = 0; i < 6; ++i) {
        s.points.push_back(rng.unit_vector(3));
        s.labels.push_back(rng.coin() ? 1 : -1);
    }
    bool prev = true;
    for (double gamma = 0.0; gamma <= 1.0; gamma += 0.05) {
        const bool now = membership_linear_margin(s, gamma).realizable;
        if (!prev) CHECK_FALSE(now);
        prev = now;
    }
}

TEST_CASE("membership_finite scans hypotheses in order and certifies with the first match") {
    FiniteClass cls;
    cls.universe = {basis(2, 0), basis(2, 1)};
    cls.hypotheses = {
        {-1, -1},  // h0: everything negative
        {1, -1},   // h1: only p0 positive
        {1, -1},   // h2: duplicate of h1
    };

    LabeledSet only_p0;
    only_p0.points = {cls.universe[0]};
    only_p0.labels = {1};
    OracleVerdict v = membership_finite(cls, only_p0);
    CHECK(v.realizable);
    CHECK(v.hypothesis == 1);  // first agreeing index, not the duplicate

    LabeledSet both_pos;
    both_pos.points = cls.universe;
    both_pos.labels = {1, 1};
    CHECK_FALSE(membership_finite(cls, both_pos).realizable);

    CHECK(membership_finite(cls, LabeledSet{}).realizable);  // vacuous

    LabeledSet unknown;
    unknown.points = {basis(2, 0), Vec{0.5, 0.5}};
    unknown.labels = {1, 1};
    CHECK_THROWS_AS(membership_finite(cls, unknown), std::domain_error);
}

TEST_CASE("erm with zero slack reduces to membership with the anchor forced positive") {
    LabeledSet s = third_family_instance(4);
    s.labels.assign(4, -1);  // everything negative, anchor forced back to +

    OracleVerdict erm = erm_linear_margin(s, 0, 0, 1.0 / 3.0);
    LabeledSet forced = s;
    forced.labels[0] = 1;
    OracleVerdict mem = membership_linear_margin(forced, 1.0 / 3.0);
    CHECK(erm.realizable == mem.realizable);
    CHECK(erm.realizable);
    CHECK(std::fabs(*erm.achieved_margin - *mem.achieved_margin) <= 1e-9);
    CHECK(erm.error_count == 0);
}

TEST_CASE("erm on the all-negative 1/3 family finds a zero-error witness within slack one") {
    LabeledSet s = third_family_instance(4);
    s.labels.assign(4, -1);
    OracleVerdict v = erm_linear_margin(s, 0, 1, 1.0 / 3.0);
    CHECK(v.realizable);
    CHECK(v.error_count == 0);
    REQUIRE(v.weight.has_value());
}

TEST_CASE("erm exempts a conflicting duplicate only when slack allows") {
    LabeledSet s;
    s.points = {basis(2, 0), basis(2, 0)};
    s.labels = {1, -1};
    CHECK_FALSE(erm_linear_margin(s, 0, 0, 1.0).realizable);
    OracleVerdict v = erm_linear_margin(s, 0, 1, 1.0);
    CHECK(v.realizable);
    CHECK(v.error_count == 1);
}

TEST_CASE("erm is monotone in the slack budget") {
    Rng rng(0x77aa11ULL);
    for (int trial = 0; trial < 8; ++trial) {
        LabeledSet s;
        for (int i = 0; i < 7; ++i) {
            s.points.push_back(rng.unit_vector(3));
            s.labels.push_back(rng.coin() ? 1 : -1);
        }
        bool prev = false;
        for (std::size_t slack = 0; slack <= 3; ++slack) {
            const bool now = erm_linear_margin(s, 0, slack, 0.3).realizable;
            if (prev) CHECK(now);
            prev = now;
        }
    }
}

TEST_CASE("erm enforces its exhaustive-search caps on the linear class") {
    LabeledSet s;
    s.points = {basis(2, 0), scaled(basis(2, 0), -1.0)};
    s.labels = {1, -1};
    CHECK_THROWS_AS(erm_linear_margin(s, 0, 4, 0.5), std::domain_error);

    LabeledSet big;
    Rng rng(5);
    for (int i = 0; i < 65; ++i) {
        big.points.push_back(rng.unit_vector(3));
        big.labels.push_back(1);
    }
    big.labels.back() = -1;
    CHECK_THROWS_AS(erm_linear_margin(big, 0, 0, 0.5), std::domain_error);
    CHECK_THROWS_AS(erm_linear_margin(s, 5, 0, 0.5), std::invalid_argument);
}

TEST_CASE("finite-class erm returns the lowest-index error minimizer over anchor-positive rows") {
    FiniteClass cls;
    cls.universe = {basis(2, 0), basis(2, 1), Vec{1.0, 1.0}};
    cls.hypotheses = {
        {-1, -1, -1},  // h0: never labels the anchor positive
        {1, 1, -1},    // h1: one error on the query below
        {1, -1, -1},   // h2: zero errors
        {1, -1, -1},   // h3: zero errors, higher index
    };
    LabeledSet s;
    s.points = cls.universe;
    s.labels = {1, -1, -1};

    OracleVerdict v = erm_finite(cls, s, 0, 0);
    CHECK(v.realizable);
    CHECK(v.hypothesis == 2);
    CHECK(v.error_count == 0);

    // With only the erroneous rows available the minimum error is reported
    // and realizability follows the slack budget.
    FiniteClass worse;
    worse.universe = cls.universe;
    worse.hypotheses = {{-1, -1, -1}, {1, 1, -1}};
    OracleVerdict tight = erm_finite(worse, s, 0, 0);
    CHECK_FALSE(tight.realizable);
    CHECK(tight.error_count == 1);
    OracleVerdict loose = erm_finite(worse, s, 0, 1);
    CHECK(loose.realizable);
    CHECK(loose.hypothesis == 1);

    // No hypothesis labels the anchor positive at all.
    FiniteClass never;
    never.universe = cls.universe;
    never.hypotheses = {{-1, -1, -1}};
    OracleVerdict none = erm_finite(never, s, 0, 0);
    CHECK_FALSE(none.realizable);
    CHECK_FALSE(none.error_count.has_value());
}

TEST_CASE("finite-class erm tolerates large slack without a cap") {
    FiniteClass cls;
    cls.universe = {basis(2, 0), basis(2, 1)};
    cls.hypotheses = {{1, 1}};
    LabeledSet s;
    s.points = cls.universe;
    s.labels = {1, -1};
    CHECK(erm_finite(cls, s, 0, 10).realizable);
}

TEST_CASE("oracles answer identically through the polymorphic interface") {
    LinearMarginOracle linear(0.5);
    CHECK(linear.describe().find("0.5") != std::string::npos);
    LabeledSet s;
    s.points = {basis(2, 0), scaled(basis(2, 0), -1.0)};
    s.labels = {1, -1};
    const HypothesisOracle& base = linear;
    CHECK(base.membership(s).realizable == membership_linear_margin(s, 0.5).realizable);

    FiniteClass cls;
    cls.universe = s.points;
    cls.hypotheses = {{1, -1}};
    FiniteClassOracle finite(cls);
    const HypothesisOracle& fbase = finite;
    CHECK(fbase.membership(s).realizable);
    CHECK(fbase.describe().find("finite") != std::string::npos);
}

TEST_CASE("labeled-set validation rejects malformed instances") {
    LabeledSet bad;
    bad.points = {basis(2, 0)};
    bad.labels = {1, -1};
    CHECK_THROWS_AS(validate_labeled_set(bad), std::invalid_argument);

    bad.labels = {0};
    CHECK_THROWS_AS(validate_labeled_set(bad), std::invalid_argument);

    bad.points = {Vec{0.0, 0.0}};
    bad.labels = {1};
    CHECK_THROWS_AS(validate_labeled_set(bad), std::domain_error);
}
