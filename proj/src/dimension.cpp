#include "edverify/dimension.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

#include "edverify/hypothesis.hpp"

namespace edv {

namespace {

constexpr std::size_t kExactGroundCap = 24;

// Depth-first search for a feasible candidate of exactly `target` elements.
// Elements are tried in ascending order with inclusion first, so the first
// success is the lexicographically least feasible set of that size. After
// every inclusion all chosen elements are re-tested, which is sound pruning
// because isolation only degrades as the candidate grows.
class DeepeningSearch {
public:
    DeepeningSearch(std::size_t n, const IsolationPredicate& isolated)
        : n_(n), isolated_(isolated) {}

    bool find(std::size_t target, std::vector<std::size_t>& out) {
        current_.clear();
        if (!dfs(0, target)) return false;
        out = current_;
        return true;
    }

private:
    bool dfs(std::size_t next, std::size_t remaining) {
        if (remaining == 0) return true;
        for (std::size_t e = next; e + remaining <= n_; ++e) {
            current_.push_back(e);
            bool viable = true;
            for (std::size_t c : current_) {
                if (!isolated_(c, current_)) {
                    viable = false;
                    break;
                }
            }
            if (viable && dfs(e + 1, remaining - 1)) return true;
            current_.pop_back();
        }
        return false;
    }

    std::size_t n_;
    const IsolationPredicate& isolated_;
    std::vector<std::size_t> current_;
};

LooResult deepen(std::size_t n, const IsolationPredicate& isolated,
                 std::optional<std::size_t> stop_at_least) {
    LooResult best;
    DeepeningSearch search(n, isolated);
    for (std::size_t k = 1; k <= n; ++k) {
        if (stop_at_least && best.k >= *stop_at_least) break;
        std::vector<std::size_t> witness;
        if (!search.find(k, witness)) break;
        best.k = k;
        best.witness = std::move(witness);
    }
    if (!verify_witness_lazy(isolated, best.witness)) {
        throw std::logic_error("loo_dimension: search returned an invalid witness");
    }
    return best;
}

// Mask-backed isolation predicates for materialized systems.
std::vector<std::uint32_t> set_masks(const SetSystem& sys) {
    std::vector<std::uint32_t> masks;
    masks.reserve(sys.sets.size());
    for (const auto& s : sys.sets) {
        std::uint32_t m = 0;
        for (std::size_t e : s) m |= std::uint32_t{1} << e;
        masks.push_back(m);
    }
    return masks;
}

std::uint32_t candidate_mask(const std::vector<std::size_t>& candidate) {
    std::uint32_t m = 0;
    for (std::size_t e : candidate) m |= std::uint32_t{1} << e;
    return m;
}

IsolationPredicate system_predicate(const std::vector<std::uint32_t>& masks, std::size_t slack) {
    return [&masks, slack](std::size_t c, const std::vector<std::size_t>& candidate) {
        const std::uint32_t cm = candidate_mask(candidate);
        const std::uint32_t cbit = std::uint32_t{1} << c;
        for (const std::uint32_t s : masks) {
            if ((s & cbit) == 0) continue;
            if (static_cast<std::size_t>(std::popcount(s & cm)) <= slack + 1) return true;
        }
        return false;
    };
}

LooResult system_loo(const SetSystem& sys, std::size_t slack) {
    validate_system(sys);
    if (sys.ground.size() > kExactGroundCap) {
        throw std::domain_error("loo_dimension: ground larger than the exact-search cap of 24");
    }
    const std::vector<std::uint32_t> masks = set_masks(sys);
    const IsolationPredicate pred = system_predicate(masks, slack);
    return deepen(sys.ground.size(), pred, std::nullopt);
}

}  // namespace

void validate_system(const SetSystem& sys) {
    if (sys.ground.empty()) throw std::invalid_argument("SetSystem: empty ground");
    std::set<std::string> seen;
    for (const auto& id : sys.ground) {
        if (id.empty()) throw std::invalid_argument("SetSystem: empty ground id");
        if (!seen.insert(id).second) {
            throw std::invalid_argument("SetSystem: duplicate ground id '" + id + "'");
        }
    }
    for (const auto& s : sys.sets) {
        std::set<std::size_t> inside;
        for (std::size_t e : s) {
            if (e >= sys.ground.size()) {
                throw std::invalid_argument("SetSystem: set element out of range");
            }
            if (!inside.insert(e).second) {
                throw std::invalid_argument("SetSystem: duplicate element inside a set");
            }
        }
    }
}

LooResult loo_dimension(const SetSystem& sys) { return system_loo(sys, 0); }

LooResult robust_loo_dimension(const SetSystem& sys, std::size_t slack) {
    return system_loo(sys, slack);
}

LooResult loo_dimension_lazy(std::size_t ground_size, const IsolationPredicate& isolated,
                             std::optional<std::size_t> stop_at_least) {
    if (ground_size == 0) throw std::invalid_argument("loo_dimension_lazy: empty ground");
    if (!stop_at_least && ground_size > kExactGroundCap) {
        throw std::domain_error("loo_dimension_lazy: unbounded search needs ground <= 24");
    }
    return deepen(ground_size, isolated, stop_at_least);
}

bool verify_witness(const SetSystem& sys, const std::vector<std::size_t>& candidate,
                    std::size_t slack) {
    validate_system(sys);
    for (std::size_t e : candidate) {
        if (e >= sys.ground.size()) {
            throw std::invalid_argument("verify_witness: candidate element out of range");
        }
    }
    if (sys.ground.size() > 32) {
        throw std::domain_error("verify_witness: ground too large for mask representation");
    }
    const std::vector<std::uint32_t> masks = set_masks(sys);
    const IsolationPredicate pred = system_predicate(masks, slack);
    return verify_witness_lazy(pred, candidate);
}

bool verify_witness_lazy(const IsolationPredicate& isolated,
                         const std::vector<std::size_t>& candidate) {
    for (std::size_t c : candidate) {
        if (!isolated(c, candidate)) return false;
    }
    return true;
}

SetSystem margin_class_system(const std::vector<Vec>& points, double gamma,
                              std::size_t query_budget, SystemMode mode, std::size_t slack) {
    if (points.empty()) throw std::invalid_argument("margin_class_system: no points");
    const std::size_t n = points.size();
    if (n > 18) {
        throw std::domain_error("margin_class_system: more than 18 points");
    }

    // Enumerate the candidate positive-sets for the requested mode.
    std::vector<std::vector<std::size_t>> patterns;
    switch (mode) {
        case SystemMode::AllSubsets: {
            const std::uint32_t total = std::uint32_t{1} << n;
            for (std::uint32_t m = 0; m < total; ++m) {
                std::vector<std::size_t> p;
                for (std::size_t i = 0; i < n; ++i) {
                    if (m & (std::uint32_t{1} << i)) p.push_back(i);
                }
                patterns.push_back(std::move(p));
            }
            break;
        }
        case SystemMode::SingletonVsRest: {
            for (std::size_t i = 0; i < n; ++i) patterns.push_back({i});
            break;
        }
        case SystemMode::AnchorPlusSlack: {
            // Anchor plus every extra-positive subset of size at most `slack`;
            // small sets by construction, so they certify relaxed isolation.
            const std::uint32_t total = std::uint32_t{1} << n;
            for (std::uint32_t m = 0; m < total; ++m) {
                const auto size = static_cast<std::size_t>(std::popcount(m));
                if (size == 0 || size > slack + 1) continue;
                std::vector<std::size_t> p;
                for (std::size_t i = 0; i < n; ++i) {
                    if (m & (std::uint32_t{1} << i)) p.push_back(i);
                }
                patterns.push_back(std::move(p));
            }
            break;
        }
    }

    if (query_budget != 0 && patterns.size() > query_budget) {
        throw std::domain_error("margin_class_system: enumeration exceeds the query budget");
    }

    SetSystem sys;
    sys.ground.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sys.ground.push_back("p" + std::to_string(i));

    for (const auto& positive : patterns) {
        LabeledSet query;
        query.points = points;
        query.labels.assign(n, -1);
        for (std::size_t i : positive) query.labels[i] = 1;
        if (membership_linear_margin(query, gamma).realizable) {
            sys.sets.push_back(positive);
        }
    }
    return sys;
}

}  // namespace edv
