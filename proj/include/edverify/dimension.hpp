#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edverify/vecmath.hpp"

namespace edv {

// A finite set system: named ground elements and subsets given as ascending
// ground indices. For classifier classes a set is the positive region of one
// hypothesis restricted to the ground points.
struct SetSystem {
    std::vector<std::string> ground;
    std::vector<std::vector<std::size_t>> sets;
};

// Throws std::invalid_argument on out-of-range indices, duplicate indices
// inside one set, or duplicate/empty ground ids.
void validate_system(const SetSystem& sys);

struct LooResult {
    std::size_t k = 0;
    std::vector<std::size_t> witness;  // ascending ground indices, |witness| == k
};

// Isolation test for the lazy (oracle-backed) search: given an element c and a
// candidate set C containing it (ascending indices), decide whether some class
// member separates c from the rest of C. The predicate must be monotone:
// isolation within a subset of C may not be harder than within C itself. The
// search relies on this for sound pruning.
using IsolationPredicate =
    std::function<bool(std::size_t c, const std::vector<std::size_t>& candidate)>;

// Largest C such that every c in C is isolated by some set (the set meets C
// exactly in {c}). Exact search: iterative deepening on |C| with
// include-first, index-ascending DFS, so the returned witness is the
// lexicographically least among maximum-size witnesses. The witness is
// re-verified against the definition before returning (std::logic_error on an
// internal inconsistency). Ground size is capped at 24 (std::domain_error).
LooResult loo_dimension(const SetSystem& sys);

// Relaxed isolation: c is covered in C when some set contains c and meets C in
// at most slack + 1 elements. slack = 0 is exactly loo_dimension.
LooResult robust_loo_dimension(const SetSystem& sys, std::size_t slack);

// Search directly against an isolation oracle instead of a materialized
// system. With stop_at_least set, deepening halts as soon as a witness of that
// size is found (the result is then min(stop_at_least, true dimension) and the
// 24-element cap is waived, since the work is bounded by the stop).
LooResult loo_dimension_lazy(std::size_t ground_size, const IsolationPredicate& isolated,
                             std::optional<std::size_t> stop_at_least = std::nullopt);

// True when every element of `candidate` is isolated within it under the
// system's sets at the given slack. `candidate` must hold valid ascending
// indices. This is the certification half of the search, exposed so callers
// can confirm an externally produced witness (e.g. a protocol's disclosure
// set) without paying for a full search.
bool verify_witness(const SetSystem& sys, const std::vector<std::size_t>& candidate,
                    std::size_t slack = 0);
bool verify_witness_lazy(const IsolationPredicate& isolated,
                         const std::vector<std::size_t>& candidate);

// Which labelings to try when finitizing a margin class over concrete points.
enum class SystemMode {
    AllSubsets,       // every subset as the positive side: the full trace
    SingletonVsRest,  // one positive point against the rest
    AnchorPlusSlack,  // an anchor plus up to `slack` extra positives
};

// Materializes the realizable positive-sets of margin-gamma linear classifiers
// over `points` as a SetSystem (ground ids "p0", "p1", ...). query_budget
// caps the number of realizability queries the enumeration may issue (0 means
// uncapped); exceeding it, or more than 18 points, is a std::domain_error.
SetSystem margin_class_system(const std::vector<Vec>& points, double gamma,
                              std::size_t query_budget = 0,
                              SystemMode mode = SystemMode::AllSubsets, std::size_t slack = 0);

}  // namespace edv
