#include <doctest.h>

#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "edverify/critical.hpp"
#include "edverify/dimension.hpp"
#include "edverify/geometry.hpp"
#include "edverify/hypothesis.hpp"
#include "edverify/rng.hpp"

using namespace edv;

namespace {

// Forwarding oracle that counts underlying queries and can fail on demand,
// for the call-budget and abort-on-error contracts.
class CountingOracle final : public HypothesisOracle {
public:
    explicit CountingOracle(const HypothesisOracle& inner,
                            std::optional<std::size_t> throw_at = std::nullopt)
        : inner_(inner), throw_at_(throw_at) {}

    OracleVerdict membership(const LabeledSet& set) const override {
        bump();
        return inner_.membership(set);
    }
    OracleVerdict erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                 std::size_t slack) const override {
        bump();
        return inner_.erm_with_slack(set, anchor, slack);
    }
    OracleVerdict fit_with_slack(const LabeledSet& set, std::size_t slack) const override {
        bump();
        return inner_.fit_with_slack(set, slack);
    }
    std::size_t slack_cap() const override { return inner_.slack_cap(); }
    std::string describe() const override { return inner_.describe(); }
    std::size_t calls() const { return calls_; }

private:
    void bump() const {
        ++calls_;
        if (throw_at_ && calls_ >= *throw_at_) {
            throw std::runtime_error("oracle failure injected by test");
        }
    }
    const HypothesisOracle& inner_;
    std::optional<std::size_t> throw_at_;
    mutable std::size_t calls_ = 0;
};

FiniteClass one_positive_each(std::size_t n, std::size_t d = 3) {
    FiniteClass cls;
    Rng rng(0xfaceULL + n);
    for (std::size_t i = 0; i < n; ++i) cls.universe.push_back(rng.unit_vector(d));
    for (std::size_t h = 0; h < n; ++h) {
        std::vector<int> labels(n, -1);
        labels[h] = 1;
        cls.hypotheses.push_back(labels);
    }
    return cls;
}

CriticalRequest all_negative_request(std::vector<Vec> points) {
    CriticalRequest req;
    req.points = std::move(points);
    return req;  // no positives, no verified, default scan order
}

// Positive set of a finite-class hypothesis as ground indices, for building
// the set system that bounds the critical set.
SetSystem trace_system(const FiniteClass& cls) {
    SetSystem sys;
    for (std::size_t i = 0; i < cls.universe.size(); ++i) {
        sys.ground.push_back("u" + std::to_string(i));
    }
    for (const auto& h : cls.hypotheses) {
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] == 1) pos.push_back(i);
        }
        sys.sets.push_back(pos);
    }
    return sys;
}

}  // namespace

TEST_CASE("critical scan keeps every point of the 1/3 family under an all-negative report") {
    VectorFamily f = construct_margin_third(4);
    LinearMarginOracle oracle(1.0 / 3.0);
    CriticalResult r = critical_points(all_negative_request(f.points), oracle);
    CHECK(r.critical == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(r.removal_log.size() == 4);
    CHECK(r.oracle_calls == 4);
    for (const ScanStep& s : r.removal_log) CHECK_FALSE(s.removed);
}

TEST_CASE("critical scan over an empty negative side does nothing") {
    VectorFamily f = construct_margin_third(3);
    CriticalRequest req;
    req.points = f.points;
    req.alice_positive = {0, 1, 2};
    LinearMarginOracle oracle(1.0 / 3.0);
    CriticalResult r = critical_points(req, oracle);
    CHECK(r.critical.empty());
    CHECK(r.removal_log.empty());
    CHECK(r.oracle_calls == 0);
}

TEST_CASE("critical scan with a one-positive-each finite class keeps the whole universe") {
    FiniteClass cls = one_positive_each(5);
    FiniteClassOracle oracle(cls);
    CriticalResult r = critical_points(all_negative_request(cls.universe), oracle);
    CHECK(r.critical == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("robust scan at slack zero matches the exact scan point for point") {
    Rng rng(0xc0ffeeULL);
    for (int trial = 0; trial < 6; ++trial) {
        CriticalRequest req;
        for (int i = 0; i < 8; ++i) req.points.push_back(rng.unit_vector(3));
        req.alice_positive = {rng.index(8)};
        LinearMarginOracle oracle(0.4);
        CriticalResult exact = critical_points(req, oracle);
        CriticalResult robust = robust_critical_points(req, oracle);
        CHECK(exact.critical == robust.critical);
        REQUIRE(exact.removal_log.size() == robust.removal_log.size());
        for (std::size_t s = 0; s < exact.removal_log.size(); ++s) {
            CHECK(exact.removal_log[s].index == robust.removal_log[s].index);
            CHECK(exact.removal_log[s].removed == robust.removal_log[s].removed);
        }
    }
}

TEST_CASE("robust scan keeps the whole 1/3 family with slack one") {
    VectorFamily f = construct_margin_third(5);
    CriticalRequest req = all_negative_request(f.points);
    req.slack = 1;
    LinearMarginOracle oracle(1.0 / 3.0);
    CriticalResult r = robust_critical_points(req, oracle);
    CHECK(r.critical == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("robust scan with a pair-positive finite class keeps the pair, drops the stranger") {
    FiniteClass cls;
    Rng rng(0xbeadULL);
    for (int i = 0; i < 3; ++i) cls.universe.push_back(rng.unit_vector(3));
    cls.hypotheses = {{1, 1, -1}};  // exactly {p0, p1} positive

    CriticalRequest req = all_negative_request(cls.universe);
    req.slack = 1;
    req.scan_order = {0, 1, 2};
    FiniteClassOracle oracle(cls);
    CriticalResult r = robust_critical_points(req, oracle);
    CHECK(r.critical == std::vector<std::size_t>{0, 1});
    CHECK(r.removal_log[2].removed);
}

TEST_CASE("verified negatives are retained unscanned and keep constraining the queries") {
    VectorFamily f = construct_margin_third(4);
    CriticalRequest req = all_negative_request(f.points);
    req.verified_negative = {3};
    LinearMarginOracle oracle(1.0 / 3.0);
    CriticalResult r = critical_points_verified(req, oracle);
    CHECK(r.critical == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(r.removal_log.size() == 3);  // x3 never scanned
    CHECK(r.oracle_calls == 3);
    for (const ScanStep& s : r.removal_log) CHECK(s.index != 3);

    SUBCASE("empty verified set reduces to the plain scan") {
        CriticalRequest plain = all_negative_request(f.points);
        CriticalResult a = critical_points_verified(plain, oracle);
        CriticalResult b = critical_points(plain, oracle);
        CHECK(a.critical == b.critical);
    }

    SUBCASE("fully verified negatives mean zero oracle calls") {
        CriticalRequest all = all_negative_request(f.points);
        all.verified_negative = {0, 1, 2, 3};
        CriticalResult r2 = critical_points_verified(all, oracle);
        CHECK(r2.critical == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(r2.oracle_calls == 0);
        CHECK(r2.removal_log.empty());
    }
}

TEST_CASE("every critical point carries a positive-isolation certificate") {
    Rng rng(0x9a9aULL);
    for (int trial = 0; trial < 6; ++trial) {
        CAPTURE(trial);
        CriticalRequest req;
        for (int i = 0; i < 9; ++i) req.points.push_back(rng.unit_vector(3));
        req.alice_positive = {rng.index(9)};
        LinearMarginOracle oracle(0.45);
        CriticalResult r = critical_points(req, oracle);
        for (std::size_t v : r.critical) {
            LabeledSet q;
            for (std::size_t i : req.alice_positive) {
                q.points.push_back(req.points[i]);
                q.labels.push_back(1);
            }
            q.points.push_back(req.points[v]);
            q.labels.push_back(1);
            for (std::size_t c : r.critical) {
                if (c == v) continue;
                q.points.push_back(req.points[c]);
                q.labels.push_back(-1);
            }
            CHECK(oracle.membership(q).realizable);
        }
    }
}

TEST_CASE("critical set size never exceeds the class's isolation dimension") {
    Rng rng(0x5ca1ab1eULL);
    for (int trial = 0; trial < 8; ++trial) {
        CAPTURE(trial);
        const std::size_t n = 5 + rng.index(4);
        FiniteClass cls;
        for (std::size_t i = 0; i < n; ++i) cls.universe.push_back(rng.unit_vector(3));
        const std::size_t hyp_count = 3 + rng.index(10);
        for (std::size_t h = 0; h < hyp_count; ++h) {
            std::vector<int> labels;
            for (std::size_t i = 0; i < n; ++i) labels.push_back(rng.coin() ? 1 : -1);
            cls.hypotheses.push_back(labels);
        }
        FiniteClassOracle oracle(cls);
        CriticalResult r = critical_points(all_negative_request(cls.universe), oracle);
        const LooResult dim = loo_dimension(trace_system(cls));
        CHECK(r.critical.size() <= dim.k);
    }
}

TEST_CASE("the disclosure bound is scan-order independent") {
    // A margin-0.5-separable instance: whatever order the negatives are
    // scanned in, the surviving set stays within the closed-form ceiling.
    const double gamma = 0.5;
    Rng rng(0x0d7eULL);
    Vec target = rng.unit_vector(3);
    CriticalRequest base;
    while (base.points.size() < 10) {
        Vec p = rng.unit_vector(3);
        const double s = dot(target, p);
        if (std::abs(s) < gamma) continue;
        if (s > 0.0) base.alice_positive.push_back(base.points.size());
        base.points.push_back(p);
    }
    REQUIRE_FALSE(base.alice_positive.empty());
    REQUIRE(base.alice_positive.size() < base.points.size());

    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < base.points.size(); ++i) {
        bool pos = false;
        for (std::size_t p : base.alice_positive) pos = pos || p == i;
        if (!pos) negatives.push_back(i);
    }

    LinearMarginOracle oracle(gamma);
    const auto ceiling = static_cast<std::size_t>(loo_bound(gamma));  // 6 at 0.5
    for (int trial = 0; trial < 20; ++trial) {
        CAPTURE(trial);
        CriticalRequest req = base;
        req.scan_order = negatives;
        for (std::size_t i = req.scan_order.size(); i > 1; --i) {
            std::swap(req.scan_order[i - 1], req.scan_order[rng.index(i)]);
        }
        CriticalResult r = critical_points(req, oracle);
        CHECK(r.critical.size() <= ceiling);
        CHECK(r.oracle_calls <= negatives.size());
    }
}

TEST_CASE("any hypothesis that slips a positive past the report is caught by a critical point") {
    // If some hypothesis agrees with the reported positives yet labels an
    // undisclosed point positive, it must also label a critical point
    // positive; checking the survivors therefore suffices for detection.
    Rng rng(0xdec0deULL);
    for (int trial = 0; trial < 12; ++trial) {
        CAPTURE(trial);
        const std::size_t n = 5 + rng.index(4);
        FiniteClass cls;
        for (std::size_t i = 0; i < n; ++i) cls.universe.push_back(rng.unit_vector(4));
        const std::size_t hyp_count = 4 + rng.index(17);
        for (std::size_t h = 0; h < hyp_count; ++h) {
            std::vector<int> labels;
            for (std::size_t i = 0; i < n; ++i) labels.push_back(rng.coin() ? 1 : -1);
            cls.hypotheses.push_back(labels);
        }

        CriticalRequest req;
        req.points = cls.universe;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform() < 0.25) req.alice_positive.push_back(i);
        }
        std::vector<char> is_positive(n, 0);
        for (std::size_t p : req.alice_positive) is_positive[p] = 1;

        FiniteClassOracle oracle(cls);
        CriticalResult r = critical_points(req, oracle);
        std::vector<char> is_critical(n, 0);
        for (std::size_t c : r.critical) is_critical[c] = 1;

        for (const auto& h : cls.hypotheses) {
            bool agrees_with_report = true;
            for (std::size_t p : req.alice_positive) {
                agrees_with_report = agrees_with_report && h[p] == 1;
            }
            if (!agrees_with_report) continue;
            bool hides_a_positive = false;
            bool flags_a_critical = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (is_positive[i] || h[i] != 1) continue;
                hides_a_positive = true;
                flags_a_critical = flags_a_critical || is_critical[i];
            }
            if (hides_a_positive) CHECK(flags_a_critical);
        }
    }
}

TEST_CASE("the removal log partitions the scanned points") {
    Rng rng(0x10a6ULL);
    CriticalRequest req;
    for (int i = 0; i < 10; ++i) req.points.push_back(rng.unit_vector(3));
    req.alice_positive = {2, 7};
    LinearMarginOracle oracle(0.35);
    CriticalResult r = critical_points(req, oracle);

    std::vector<std::size_t> kept;
    std::vector<std::size_t> scanned;
    for (const ScanStep& s : r.removal_log) {
        scanned.push_back(s.index);
        if (!s.removed) kept.push_back(s.index);
        CHECK(s.verdict.realizable == !s.removed);
    }
    std::sort(kept.begin(), kept.end());
    CHECK(kept == r.critical);
    std::sort(scanned.begin(), scanned.end());
    CHECK(scanned == std::vector<std::size_t>{0, 1, 3, 4, 5, 6, 8, 9});
    CHECK(r.oracle_calls == 8);
}

TEST_CASE("an oracle failure aborts the scan instead of returning a partial answer") {
    VectorFamily f = construct_margin_third(4);
    LinearMarginOracle inner(1.0 / 3.0);
    CountingOracle flaky(inner, 3);
    CHECK_THROWS_AS(critical_points(all_negative_request(f.points), flaky),
                    std::runtime_error);
    CHECK(flaky.calls() == 3);

    CountingOracle healthy(inner);
    CriticalResult r = critical_points(all_negative_request(f.points), healthy);
    CHECK(healthy.calls() == r.oracle_calls);
}

TEST_CASE("critical scan requests are validated before any oracle work") {
    VectorFamily f = construct_margin_third(3);
    LinearMarginOracle oracle(1.0 / 3.0);

    CriticalRequest with_slack = all_negative_request(f.points);
    with_slack.slack = 1;
    CHECK_THROWS_AS(critical_points(with_slack, oracle), std::invalid_argument);
    CHECK_THROWS_AS(critical_points_verified(with_slack, oracle), std::invalid_argument);

    CriticalRequest with_verified = all_negative_request(f.points);
    with_verified.verified_negative = {0};
    CHECK_THROWS_AS(critical_points(with_verified, oracle), std::invalid_argument);
    CHECK_THROWS_AS(robust_critical_points(with_verified, oracle), std::invalid_argument);

    CriticalRequest over_cap = all_negative_request(f.points);
    over_cap.slack = 4;
    CHECK_THROWS_AS(robust_critical_points(over_cap, oracle), std::domain_error);

    CriticalRequest bad_order = all_negative_request(f.points);
    bad_order.scan_order = {0, 1};  // misses 2
    CHECK_THROWS_AS(critical_points(bad_order, oracle), std::invalid_argument);
    bad_order.scan_order = {0, 1, 1};
    CHECK_THROWS_AS(critical_points(bad_order, oracle), std::invalid_argument);

    CriticalRequest overlap = all_negative_request(f.points);
    overlap.alice_positive = {0};
    overlap.verified_negative = {0};
    CHECK_THROWS_AS(critical_points_verified(overlap, oracle), std::invalid_argument);

    CriticalRequest out_of_range = all_negative_request(f.points);
    out_of_range.alice_positive = {3};
    CHECK_THROWS_AS(critical_points(out_of_range, oracle), std::invalid_argument);
}
