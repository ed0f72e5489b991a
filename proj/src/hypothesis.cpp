#include "edverify/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "edverify/rng.hpp"

namespace edv {

namespace {

constexpr double kMarginTol = 1e-7;  // realizability / error-count threshold
constexpr double kKktTol = 1e-10;    // dual ascent stopping rule
constexpr double kGapTol = 1e-9;     // duality-gap certificate target
constexpr std::size_t kErmSlackCap = 3;
constexpr std::size_t kErmSizeCap = 64;

// Label-signed normalized points z_i = labels[i] * x_i / ||x_i||. Every margin
// statement below is a statement about min_i <w, z_i>.
std::vector<Vec> signed_normalized(const LabeledSet& set) {
    std::vector<Vec> z;
    z.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        Vec v = normalized(set.points[i]);
        if (set.labels[i] < 0) {
            for (double& c : v) c = -c;
        }
        z.push_back(std::move(v));
    }
    return z;
}

double min_score(const Vec& w, const std::vector<Vec>& z) {
    double m = std::numeric_limits<double>::infinity();
    for (const Vec& v : z) m = std::min(m, dot(w, v));
    return m;
}

// One-sided sets are separable by convention with margin 1; the witness is the
// normalized mean of the signed points (first point when the mean vanishes).
MaxMarginResult one_sided_result(const std::vector<Vec>& z) {
    Vec mean(z.front().size(), 0.0);
    for (const Vec& v : z) axpy(1.0, v, mean);
    MaxMarginResult r;
    r.separable = true;
    r.margin = 1.0;
    r.w = (norm(mean) > 1e-12) ? normalized(mean) : z.front();
    return r;
}

// d <= 2: the objective min_i <w, z_i> over the unit circle attains its
// maximum either where a single term is maximized (w = z_i) or where two terms
// tie (w perpendicular to z_i - z_j), so enumerating those candidates is exact.
MaxMarginResult exact_low_dim(const std::vector<Vec>& z) {
    std::vector<Vec> candidates;
    for (const Vec& v : z) {
        candidates.push_back(v);
        candidates.push_back(scaled(v, -1.0));
    }
    if (z.front().size() == 2) {
        for (std::size_t i = 0; i < z.size(); ++i) {
            for (std::size_t j = i + 1; j < z.size(); ++j) {
                Vec dif = {z[i][0] - z[j][0], z[i][1] - z[j][1]};
                const double n = norm(dif);
                if (n < 1e-14) continue;
                Vec perp = {-dif[1] / n, dif[0] / n};
                candidates.push_back(perp);
                candidates.push_back(scaled(perp, -1.0));
            }
        }
    }
    MaxMarginResult best;
    best.margin = -std::numeric_limits<double>::infinity();
    for (const Vec& w : candidates) {
        const double m = min_score(w, z);
        if (m > best.margin) {
            best.margin = m;
            best.w = w;
        }
    }
    best.separable = best.margin > 0.0;
    return best;
}

// Best-effort maximizer of min_i <w, z_i> on the unit sphere for inputs the
// dual certifies non-separable: multistart projected subgradient ascent with a
// fixed seed so the outcome is deterministic.
MaxMarginResult sphere_polish(const std::vector<Vec>& z, MaxMarginResult best) {
    const std::size_t d = z.front().size();
    std::vector<Vec> starts(z.begin(), z.end());
    Vec mean(d, 0.0);
    for (const Vec& v : z) axpy(1.0, v, mean);
    if (norm(mean) > 1e-12) {
        starts.push_back(normalized(mean));
        starts.push_back(scaled(normalized(mean), -1.0));
    }
    if (!best.w.empty()) starts.push_back(best.w);
    Rng rng(0x0edfe11afadedeedULL);
    for (int r = 0; r < 8; ++r) starts.push_back(rng.unit_vector(d));

    for (Vec w : starts) {
        for (int t = 0; t < 400; ++t) {
            std::size_t arg = 0;
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double s = dot(w, z[i]);
                if (s < worst) {
                    worst = s;
                    arg = i;
                }
            }
            axpy(0.5 / (1.0 + t), z[arg], w);
            const double n = norm(w);
            w = (n < 1e-12) ? z[arg] : scaled(w, 1.0 / n);
        }
        const double m = min_score(w, z);
        if (m > best.margin) {
            best.margin = m;
            best.w = w;
        }
    }
    best.separable = best.margin > 0.0;
    return best;
}

// Hard-margin dual, coordinate ascent:
//   max_alpha  sum_i alpha_i - 1/2 ||sum_i alpha_i z_i||^2,  alpha >= 0.
// Maintains u = sum_i alpha_i z_i. Every normalized iterate gives a measured
// lower bound min_i <u/||u||, z_i>; every hull point u / sum(alpha) gives an
// upper bound ||u|| / sum(alpha) on the optimum. The sandwich closing to
// kGapTol certifies the returned margin; an upper bound collapsing to ~0
// certifies the instance is not separable.
MaxMarginResult dual_solve(const std::vector<Vec>& z) {
    const std::size_t n = z.size();
    const std::size_t d = z.front().size();
    std::vector<double> alpha(n, 0.0);
    Vec u(d, 0.0);
    double alpha_sum = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    MaxMarginResult best;
    best.margin = -std::numeric_limits<double>::infinity();

    constexpr std::size_t kMaxSweeps = 20000;
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double kkt = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = 1.0 - dot(u, z[i]);
            kkt = std::max(kkt, alpha[i] > 0.0 ? std::fabs(g) : std::max(g, 0.0));
            const double next = std::max(0.0, alpha[i] + g);
            const double delta = next - alpha[i];
            if (delta != 0.0) {
                axpy(delta, z[i], u);
                alpha_sum += delta;
                alpha[i] = next;
            }
        }
        const double un = norm(u);
        if (alpha_sum > 1e-300) upper = std::min(upper, un / alpha_sum);
        if (un > 1e-12) {
            const Vec w = scaled(u, 1.0 / un);
            const double low = min_score(w, z);
            if (low > best.margin) {
                best.margin = low;
                best.w = w;
            }
        }
        if (kkt <= kKktTol) break;
        if (best.margin > 0.0 && upper - best.margin <= kGapTol) break;
        if (upper <= kGapTol) break;
        if (sweep > 500 && best.margin <= 0.0 && upper <= 1e-4) break;
    }

    if (best.margin > 0.0) {
        best.separable = true;
        return best;
    }
    return sphere_polish(z, best);
}

}  // namespace

void validate_labeled_set(const LabeledSet& set) {
    if (set.points.size() != set.labels.size()) {
        throw std::invalid_argument("LabeledSet: points/labels length mismatch");
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.labels[i] != 1 && set.labels[i] != -1) {
            throw std::invalid_argument("LabeledSet: label must be +1 or -1");
        }
        if (!all_finite(set.points[i])) {
            throw std::invalid_argument("LabeledSet: non-finite coordinate");
        }
        if (norm(set.points[i]) < 1e-300) {
            throw std::domain_error("LabeledSet: zero-norm point");
        }
    }
}

void validate_finite_class(const FiniteClass& cls) {
    for (const auto& h : cls.hypotheses) {
        if (h.size() != cls.universe.size()) {
            throw std::invalid_argument("FiniteClass: hypothesis/universe length mismatch");
        }
        for (int l : h) {
            if (l != 1 && l != -1) {
                throw std::invalid_argument("FiniteClass: label must be +1 or -1");
            }
        }
    }
}

MaxMarginResult max_margin(const LabeledSet& set) {
    validate_labeled_set(set);
    if (set.size() == 0) throw std::domain_error("max_margin: empty set");
    bool has_pos = false, has_neg = false;
    for (int l : set.labels) (l > 0 ? has_pos : has_neg) = true;

    const std::vector<Vec> z = signed_normalized(set);
    if (!has_pos || !has_neg) return one_sided_result(z);
    if (z.front().size() <= 2) return exact_low_dim(z);
    return dual_solve(z);
}

OracleVerdict membership_linear_margin(const LabeledSet& set, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::domain_error("membership_linear_margin: gamma outside [0, 1]");
    }
    const MaxMarginResult mm = max_margin(set);
    OracleVerdict v;
    v.realizable = mm.margin >= gamma - kMarginTol;
    v.weight = mm.w;
    v.achieved_margin = mm.margin;
    return v;
}

namespace {

std::size_t resolve_point(const FiniteClass& cls, const Vec& p) {
    for (std::size_t i = 0; i < cls.universe.size(); ++i) {
        if (cls.universe[i] == p) return i;
    }
    throw std::domain_error("FiniteClass: query point not in universe");
}

std::vector<std::size_t> resolve_points(const FiniteClass& cls, const LabeledSet& set) {
    std::vector<std::size_t> idx;
    idx.reserve(set.size());
    for (const Vec& p : set.points) idx.push_back(resolve_point(cls, p));
    return idx;
}

}  // namespace

OracleVerdict membership_finite(const FiniteClass& cls, const LabeledSet& set) {
    validate_finite_class(cls);
    validate_labeled_set(set);
    const std::vector<std::size_t> idx = resolve_points(cls, set);
    OracleVerdict v;
    for (std::size_t h = 0; h < cls.hypotheses.size(); ++h) {
        bool agrees = true;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (cls.hypotheses[h][idx[i]] != set.labels[i]) {
                agrees = false;
                break;
            }
        }
        if (agrees) {
            v.realizable = true;
            v.hypothesis = h;
            return v;
        }
    }
    // An empty query is vacuously realizable even for an empty class.
    if (set.size() == 0) v.realizable = true;
    return v;
}

LinearMarginOracle::LinearMarginOracle(double gamma) : gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::domain_error("LinearMarginOracle: gamma outside [0, 1]");
    }
}

OracleVerdict LinearMarginOracle::membership(const LabeledSet& set) const {
    return membership_linear_margin(set, gamma_);
}

OracleVerdict LinearMarginOracle::erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                                 std::size_t slack) const {
    validate_labeled_set(set);
    if (anchor >= set.size()) throw std::invalid_argument("erm_with_slack: anchor out of range");
    if (slack > kErmSlackCap) {
        throw std::domain_error("erm_with_slack: slack exceeds the exhaustive-search cap");
    }
    if (set.size() > kErmSizeCap) {
        throw std::domain_error("erm_with_slack: set exceeds the exhaustive-search cap");
    }

    LabeledSet forced = set;
    forced.labels[anchor] = 1;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < forced.size(); ++i) {
        if (i != anchor) others.push_back(i);
    }

    const auto count_errors = [&](const Vec& w) {
        std::size_t e = 0;
        for (std::size_t i : others) {
            if (forced.labels[i] * dot(w, normalized(forced.points[i])) < gamma_ - kMarginTol) ++e;
        }
        return e;
    };

    const auto try_subset = [&](const std::vector<std::size_t>& exempt,
                                OracleVerdict& out) -> bool {
        LabeledSet kept;
        for (std::size_t i = 0; i < forced.size(); ++i) {
            if (std::find(exempt.begin(), exempt.end(), i) != exempt.end()) continue;
            kept.points.push_back(forced.points[i]);
            kept.labels.push_back(forced.labels[i]);
        }
        const MaxMarginResult mm = max_margin(kept);
        if (mm.margin < gamma_ - kMarginTol) return false;
        out.realizable = true;
        out.weight = mm.w;
        out.achieved_margin = mm.margin;
        out.error_count = count_errors(mm.w);
        return true;
    };

    // Exempt subsets in ascending size, lexicographic within a size, so the
    // first success is an error minimizer and ties resolve deterministically.
    OracleVerdict v;
    for (std::size_t e = 0; e <= std::min(slack, others.size()); ++e) {
        std::vector<char> sel(others.size(), 0);
        std::fill(sel.begin(), sel.begin() + e, 1);
        do {
            std::vector<std::size_t> exempt;
            exempt.reserve(e);
            for (std::size_t i = 0; i < others.size(); ++i) {
                if (sel[i]) exempt.push_back(others[i]);
            }
            if (try_subset(exempt, v)) return v;
        } while (std::prev_permutation(sel.begin(), sel.end()));
    }
    v.realizable = false;
    return v;
}

OracleVerdict LinearMarginOracle::fit_with_slack(const LabeledSet& set,
                                                 std::size_t slack) const {
    validate_labeled_set(set);
    if (slack > kErmSlackCap) {
        throw std::domain_error("fit_with_slack: slack exceeds the exhaustive-search cap");
    }
    if (set.size() > kErmSizeCap) {
        throw std::domain_error("fit_with_slack: set exceeds the exhaustive-search cap");
    }

    const auto count_errors = [&](const Vec& w) {
        std::size_t e = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (set.labels[i] * dot(w, normalized(set.points[i])) < gamma_ - kMarginTol) ++e;
        }
        return e;
    };

    // Same ascending-size exemption walk as erm_with_slack, just without an
    // anchor: the first exempt subset whose remainder is separable at the
    // margin yields an error minimizer.
    OracleVerdict v;
    for (std::size_t e = 0; e <= std::min(slack, set.size()); ++e) {
        std::vector<char> sel(set.size(), 0);
        std::fill(sel.begin(), sel.begin() + e, 1);
        do {
            LabeledSet kept;
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (sel[i]) continue;
                kept.points.push_back(set.points[i]);
                kept.labels.push_back(set.labels[i]);
            }
            if (kept.size() == 0) {  // slack >= |set|: anything fits trivially
                const Vec w = normalized(set.points.front());
                v.realizable = true;
                v.weight = w;
                v.error_count = count_errors(w);
                return v;
            }
            const MaxMarginResult mm = max_margin(kept);
            if (mm.margin < gamma_ - kMarginTol) continue;
            v.realizable = true;
            v.weight = mm.w;
            v.achieved_margin = mm.margin;
            v.error_count = count_errors(mm.w);
            return v;
        } while (std::prev_permutation(sel.begin(), sel.end()));
    }
    v.realizable = false;
    return v;
}

std::string LinearMarginOracle::describe() const {
    return "linear-margin(gamma=" + std::to_string(gamma_) + ")";
}

FiniteClassOracle::FiniteClassOracle(FiniteClass cls) : cls_(std::move(cls)) {
    validate_finite_class(cls_);
}

OracleVerdict FiniteClassOracle::membership(const LabeledSet& set) const {
    return membership_finite(cls_, set);
}

OracleVerdict FiniteClassOracle::erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                                std::size_t slack) const {
    validate_labeled_set(set);
    if (anchor >= set.size()) throw std::invalid_argument("erm_with_slack: anchor out of range");
    const std::vector<std::size_t> idx = resolve_points(cls_, set);

    OracleVerdict v;
    std::size_t best_err = std::numeric_limits<std::size_t>::max();
    std::optional<std::size_t> best_h;
    for (std::size_t h = 0; h < cls_.hypotheses.size(); ++h) {
        if (cls_.hypotheses[h][idx[anchor]] != 1) continue;
        std::size_t err = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i == anchor) continue;
            if (cls_.hypotheses[h][idx[i]] != set.labels[i]) ++err;
        }
        if (err < best_err) {
            best_err = err;
            best_h = h;
        }
    }
    if (best_h) {
        v.error_count = best_err;
        v.realizable = best_err <= slack;
        if (v.realizable) v.hypothesis = best_h;
    }
    return v;
}

OracleVerdict FiniteClassOracle::fit_with_slack(const LabeledSet& set,
                                                std::size_t slack) const {
    validate_labeled_set(set);
    const std::vector<std::size_t> idx = resolve_points(cls_, set);

    OracleVerdict v;
    std::size_t best_err = std::numeric_limits<std::size_t>::max();
    std::optional<std::size_t> best_h;
    for (std::size_t h = 0; h < cls_.hypotheses.size(); ++h) {
        std::size_t err = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (cls_.hypotheses[h][idx[i]] != set.labels[i]) ++err;
        }
        if (err < best_err) {
            best_err = err;
            best_h = h;
        }
    }
    if (best_h) {
        v.error_count = best_err;
        v.realizable = best_err <= slack;
        if (v.realizable) v.hypothesis = best_h;
    } else if (set.size() == 0) {
        v.realizable = true;  // mirrors membership: empty queries are vacuous
    }
    return v;
}

std::size_t FiniteClassOracle::slack_cap() const {
    // The hypothesis scan is linear in the class size, so any slack is fine.
    return std::numeric_limits<std::size_t>::max();
}

std::string FiniteClassOracle::describe() const {
    return "finite-class(universe=" + std::to_string(cls_.universe.size()) +
           ", hypotheses=" + std::to_string(cls_.hypotheses.size()) + ")";
}

OracleVerdict erm_linear_margin(const LabeledSet& set, std::size_t anchor, std::size_t slack,
                                double gamma) {
    return LinearMarginOracle(gamma).erm_with_slack(set, anchor, slack);
}

OracleVerdict erm_finite(const FiniteClass& cls, const LabeledSet& set, std::size_t anchor,
                         std::size_t slack) {
    return FiniteClassOracle(cls).erm_with_slack(set, anchor, slack);
}

}  // namespace edv
