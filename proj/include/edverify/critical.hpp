#pragma once

#include <cstddef>
#include <vector>

#include "edverify/hypothesis.hpp"
#include "edverify/vecmath.hpp"

namespace edv {

// Inputs of one critical-point scan over Alice's reported negatives. Indices
// refer to `points`. Alice's negatives X_A- are the complement of
// `alice_positive`; `scan_order`, when nonempty, must be a permutation of
// X_A- and fixes the visiting order (default: ascending index).
// `verified_negative` lists documents whose negative label has already been
// confirmed: they are skipped by the scan but kept as negative constraints
// and remain in the returned set. `slack` is the error budget of the robust
// scan and must stay within the oracle's cap.
struct CriticalRequest {
    std::vector<Vec> points;
    std::vector<std::size_t> alice_positive;
    std::vector<std::size_t> verified_negative;
    std::size_t slack = 0;
    std::vector<std::size_t> scan_order;
};

struct ScanStep {
    std::size_t index = 0;  // document scanned at this step
    bool removed = false;   // true when the flip was not realizable
    OracleVerdict verdict;
};

struct CriticalResult {
    std::vector<std::size_t> critical;  // surviving subset of X_A-, ascending
    std::vector<ScanStep> removal_log;  // one entry per scanned point
    std::size_t oracle_calls = 0;       // distinct oracle queries issued
};

// One-pass scan: starting from M = X_A-, each scanned point x is kept iff the
// labeling "Alice's positives plus x positive, M minus x negative" stays
// realizable; otherwise x leaves M immediately, shrinking every later query.
// The survivors are exactly the points whose positive flip Bob could never
// rule out, so they must be shown to him. Queries are memoized on the exact
// (positives, negatives) pair within the scan. Oracle exceptions propagate
// and no partial result is returned.
//
// Requires slack = 0 and no verified negatives (std::invalid_argument).
CriticalResult critical_points(const CriticalRequest& req, const HypothesisOracle& oracle);

// Error-tolerant scan: a point is kept iff some class member labels it
// positive at full margin while misclassifying at most req.slack of the other
// labels, per the oracle's erm_with_slack. Requires no verified negatives;
// slack may be positive but must respect oracle.slack_cap()
// (std::domain_error).
CriticalResult robust_critical_points(const CriticalRequest& req, const HypothesisOracle& oracle);

// Exact-realizability scan that honours req.verified_negative: those points
// are never scanned and never leave M, so they appear in the returned set
// (callers tracking disclosure should not count them again — they are already
// known to Bob). Requires slack = 0.
CriticalResult critical_points_verified(const CriticalRequest& req,
                                        const HypothesisOracle& oracle);

}  // namespace edv
