#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "edverify/vecmath.hpp"

namespace edv {

// A family of k (point-direction, witness) unit-vector pairs. The defining
// property -- checked by verify_skew_obtuse -- is that witness w_i scores its
// own point at least alpha while scoring all but at most `slack` of the other
// points at most -beta. `gamma` records the margin the family was built for;
// `slack` is the per-witness allowance of non-obtuse cross products.
struct VectorFamily {
    std::vector<Vec> points;
    std::vector<Vec> witnesses;
    double gamma = 0.0;
    std::size_t slack = 0;

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

struct SkewObtuseReport {
    bool holds = false;
    // (i, i) entries are margin failures of witness i on its own point; (i, j)
    // with i != j are cross products above -beta (within tolerance). Pairs are
    // zero-based (point index, witness index).
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    // For each witness j, how many other points it scores at most -beta.
    // The family holds when every count reaches k - 1 - slack and no margin
    // failure occurred.
    std::vector<std::size_t> column_obtuse;
};

// Ceiling (2 + 2*gamma) / (3*gamma - 1) on the leave-one-out dimension of
// margin-gamma linear classes. Defined only for gamma > 1/3; throws
// std::domain_error at or below that threshold, where the bound is vacuous.
double loo_bound(double gamma);

// Error-tolerant generalization (2 + 2*slack) * (1 + beta) / (alpha + 2*beta - 1).
// Requires alpha + 2*beta > 1 (std::domain_error otherwise). Coincides with
// loo_bound(gamma) exactly when alpha = beta = gamma and slack = 0.
double robust_loo_bound(double alpha, double beta, std::size_t slack);

// Structural validation of a family: matching list lengths, k >= 1, a single
// common dimension, finite coordinates, unit norms within 1e-9, and gamma in
// [0, 1]. Throws std::invalid_argument describing the first problem found.
void validate_family(const VectorFamily& family);

// Checks the skew-obtuse conditions at margin `alpha` and obtuseness level
// `beta`, honouring the family's slack. Comparisons use a one-sided 1e-9
// tolerance so exact closed-form constructions are never rejected for
// floating-point noise.
SkewObtuseReport verify_skew_obtuse(const VectorFamily& family, double alpha, double beta);

// The explicit margin-1/3 family of size n in R^{n+1}:
//   x_i = (1/sqrt 3) e_1 + sqrt(2/3) e_{i+1},
//   w_i = -(1/sqrt 3) e_1 + sqrt(2/3) e_{i+1}.
// Every <w_i, x_i> = 1/3 and every <w_i, x_j> = -1/3 for j != i, so the family
// certifies that margin-1/3 classes admit arbitrarily large isolated sets.
VectorFamily construct_margin_third(std::size_t n);

// Rejection-samples `count` sign vectors (entries +-1/sqrt d) whose pairwise
// inner products all have magnitude at most epsilon. Greedy: a candidate that
// clashes with any accepted vector is discarded; each draw consumes one unit
// of retry_budget (default 200 * count). Returns std::nullopt on exhaustion,
// which is certain when the geometry admits no such packing (e.g. d = 2 with
// small epsilon) and vanishingly rare in the intended high-dimensional regime.
std::optional<std::vector<Vec>> nearly_orthogonal(std::size_t d, double epsilon,
                                                  std::size_t count, std::uint64_t seed,
                                                  std::size_t retry_budget = 0);

// Builds a skew-obtuse family for a target margin gamma < 1/3 by lifting
// nearly-orthogonal sign vectors: with orthogonality tolerance
// eps_orth = (3/2)(1/3 - gamma) and lifting weight 1/sqrt 3,
//   x_i = (1/sqrt 3) e_1 + sqrt(2/3) v_i,   w_i = -(1/sqrt 3) e_1 + sqrt(2/3) v_i
// gives diagonal products exactly 1/3 >= gamma and off-diagonal products at
// most -gamma. Output vectors live in R^{d+1}. Returns std::nullopt when the
// sampler's retry budget is exhausted. Requires 0 <= gamma < 1/3 and d >= 2.
std::optional<VectorFamily> construct_small_margin(double gamma, std::size_t d,
                                                   std::uint64_t seed, std::size_t target_k);

// Smallest signed normalized score min_i labels[i] * <w, x_i / ||x_i||>.
// Labels must be +1/-1. Requires unit w and nonzero points (std::domain_error
// on a zero-norm point).
double margin_of(const Vec& w, const std::vector<Vec>& points, const std::vector<int>& labels);

// Unsigned variant min_i |<w, x_i / ||x_i||>|, the classic margin of w over a
// point set irrespective of labelling.
double margin_of(const Vec& w, const std::vector<Vec>& points);

}  // namespace edv
