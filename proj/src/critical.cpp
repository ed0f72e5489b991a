#include "edverify/critical.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edv {

namespace {

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// X_A- as the ascending complement of Alice's positives.
std::vector<std::size_t> alice_negatives(const CriticalRequest& req) {
    std::vector<bool> positive(req.points.size(), false);
    for (std::size_t i : req.alice_positive) positive[i] = true;
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < req.points.size(); ++i) {
        if (!positive[i]) negatives.push_back(i);
    }
    return negatives;
}

void validate_request(const CriticalRequest& req, const HypothesisOracle& oracle) {
    const std::size_t n = req.points.size();
    for (std::size_t i : req.alice_positive) {
        if (i >= n) throw std::invalid_argument("CriticalRequest: positive index out of range");
    }
    for (std::size_t i : req.verified_negative) {
        if (i >= n) throw std::invalid_argument("CriticalRequest: verified index out of range");
    }
    const std::vector<std::size_t> pos = sorted_unique(req.alice_positive);
    if (pos.size() != req.alice_positive.size()) {
        throw std::invalid_argument("CriticalRequest: duplicate positive index");
    }
    for (std::size_t i : req.verified_negative) {
        if (std::binary_search(pos.begin(), pos.end(), i)) {
            throw std::invalid_argument(
                "CriticalRequest: verified negative also reported positive");
        }
    }
    if (req.slack > oracle.slack_cap()) {
        throw std::domain_error("CriticalRequest: slack exceeds the oracle's cap");
    }
    if (!req.scan_order.empty()) {
        std::vector<std::size_t> order = req.scan_order;
        std::sort(order.begin(), order.end());
        const std::vector<std::size_t> want = alice_negatives(req);
        if (order != want) {
            throw std::invalid_argument(
                "CriticalRequest: scan_order is not a permutation of Alice's negatives");
        }
    }
}

CriticalResult run_scan(const CriticalRequest& req, const HypothesisOracle& oracle,
                        bool robust) {
    validate_request(req, oracle);

    const std::vector<std::size_t> negatives = alice_negatives(req);
    std::vector<bool> in_m(req.points.size(), false);
    for (std::size_t i : negatives) in_m[i] = true;
    std::vector<bool> verified(req.points.size(), false);
    for (std::size_t i : req.verified_negative) verified[i] = true;

    const std::vector<std::size_t>& order =
        req.scan_order.empty() ? negatives : req.scan_order;

    // Memo keyed by the exact query content; queries are pure.
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, OracleVerdict> memo;

    CriticalResult result;
    for (std::size_t x : order) {
        if (verified[x]) continue;  // already confirmed negative: never scanned

        std::vector<std::size_t> t1 = req.alice_positive;
        t1.push_back(x);
        std::sort(t1.begin(), t1.end());
        std::vector<std::size_t> t2;
        for (std::size_t i = 0; i < req.points.size(); ++i) {
            if (in_m[i] && i != x) t2.push_back(i);
        }

        OracleVerdict verdict;
        const auto key = std::make_pair(t1, t2);
        if (const auto hit = memo.find(key); hit != memo.end()) {
            verdict = hit->second;
        } else {
            LabeledSet query;
            std::size_t anchor = 0;
            for (std::size_t i : t1) {
                if (i == x) anchor = query.points.size();
                query.points.push_back(req.points[i]);
                query.labels.push_back(1);
            }
            for (std::size_t i : t2) {
                query.points.push_back(req.points[i]);
                query.labels.push_back(-1);
            }
            verdict = robust ? oracle.erm_with_slack(query, anchor, req.slack)
                             : oracle.membership(query);
            memo.emplace(key, verdict);
            ++result.oracle_calls;
        }

        ScanStep step;
        step.index = x;
        step.removed = !verdict.realizable;
        step.verdict = verdict;
        result.removal_log.push_back(std::move(step));
        if (!verdict.realizable) in_m[x] = false;
    }

    for (std::size_t i = 0; i < req.points.size(); ++i) {
        if (in_m[i]) result.critical.push_back(i);
    }
    return result;
}

}  // namespace

CriticalResult critical_points(const CriticalRequest& req, const HypothesisOracle& oracle) {
    if (req.slack != 0) {
        throw std::invalid_argument("critical_points: slack must be zero (use the robust scan)");
    }
    if (!req.verified_negative.empty()) {
        throw std::invalid_argument(
            "critical_points: verified negatives need critical_points_verified");
    }
    return run_scan(req, oracle, /*robust=*/false);
}

CriticalResult robust_critical_points(const CriticalRequest& req,
                                      const HypothesisOracle& oracle) {
    if (!req.verified_negative.empty()) {
        throw std::invalid_argument(
            "robust_critical_points: verified negatives are not part of the robust scan");
    }
    return run_scan(req, oracle, /*robust=*/true);
}

CriticalResult critical_points_verified(const CriticalRequest& req,
                                        const HypothesisOracle& oracle) {
    if (req.slack != 0) {
        throw std::invalid_argument("critical_points_verified: slack must be zero");
    }
    return run_scan(req, oracle, /*robust=*/false);
}

}  // namespace edv
