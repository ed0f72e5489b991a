#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edverify/vecmath.hpp"

namespace edv {

// A point set with +1/-1 labels, the query shape every oracle consumes.
struct LabeledSet {
    std::vector<Vec> points;
    std::vector<int> labels;

    std::size_t size() const { return points.size(); }
};

// Throws std::invalid_argument on length mismatch, a label outside {+1, -1},
// or a non-finite coordinate; throws std::domain_error on a zero-norm point.
void validate_labeled_set(const LabeledSet& set);

struct MaxMarginResult {
    bool separable = false;  // margin > 0
    Vec w;                   // unit direction attaining `margin`
    double margin = 0.0;     // max over unit w of min_i labels[i] * <w, x_i/||x_i||>
};

// Answer to an oracle query, carrying a checkable certificate: a unit weight
// vector for linear classes, a hypothesis index for finite classes.
struct OracleVerdict {
    bool realizable = false;
    std::optional<Vec> weight;
    std::optional<std::size_t> hypothesis;
    std::optional<double> achieved_margin;
    std::optional<std::size_t> error_count;
};

// An explicitly enumerated class: hypotheses[h][i] is the +1/-1 label that
// hypothesis h assigns to universe[i]. Query points are resolved to universe
// indices by exact coordinate equality.
struct FiniteClass {
    std::vector<Vec> universe;
    std::vector<std::vector<int>> hypotheses;
};

void validate_finite_class(const FiniteClass& cls);

// Maximum margin of a homogeneous (through-the-origin) linear classifier on
// the normalized points. Guarantees:
//   - one-sided inputs (all labels equal) are separable by convention with
//     margin 1.0 and witness = normalized mean direction (sign-flipped for an
//     all-negative set, falling back to the first point if the mean vanishes);
//   - two-sided separable inputs: margin accurate to 1e-7 (dual ascent with a
//     duality-gap certificate; the returned value is re-measured on the
//     normalized points and is a true lower bound);
//   - d = 2: exact for any sign of the optimum via candidate enumeration;
//   - d >= 3 non-separable inputs: separable=false is certified, the
//     (non-positive) margin value itself is best-effort.
// Throws std::domain_error on an empty set.
MaxMarginResult max_margin(const LabeledSet& set);

// Realizability of the labeling by a margin-gamma linear classifier:
// realizable iff max_margin(set).margin >= gamma - 1e-7. gamma must lie in
// [0, 1]. The verdict carries the max-margin witness and measured margin.
OracleVerdict membership_linear_margin(const LabeledSet& set, double gamma);

// Realizability of the labeling within an explicit class: realizable iff some
// hypothesis agrees with every supplied label; the witness is the smallest
// such index. A query point absent from the universe is a std::domain_error.
// An empty query is vacuously realizable.
OracleVerdict membership_finite(const FiniteClass& cls, const LabeledSet& set);

// Uniform oracle interface consumed by the scanning algorithms. `membership`
// answers exact realizability; `erm_with_slack` asks for a class member that
// labels set.points[anchor] positive (regardless of its stored label) with
// full margin at the anchor while misclassifying at most `slack` of the
// remaining points, reporting the minimized error count.
class HypothesisOracle {
public:
    virtual ~HypothesisOracle() = default;
    virtual OracleVerdict membership(const LabeledSet& set) const = 0;
    virtual OracleVerdict erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                         std::size_t slack) const = 0;
    // Anchor-free variant: is there a class member whose total error on the
    // supplied labels is at most `slack`? Used as the report pre-check before
    // a robust scan. fit_with_slack(set, 0) agrees with membership(set).
    virtual OracleVerdict fit_with_slack(const LabeledSet& set, std::size_t slack) const = 0;
    // Largest slack erm_with_slack / fit_with_slack accept for this oracle.
    virtual std::size_t slack_cap() const = 0;
    virtual std::string describe() const = 0;
};

// Margin-gamma linear classifiers. erm_with_slack performs an exhaustive
// search over subsets of up to `slack` non-anchor points to exempt, solving
// max_margin on the remainder; the search is capped at slack <= 3 and
// |set| <= 64 (std::domain_error beyond), which is the scale the O(n^slack)
// scan is meant for.
class LinearMarginOracle final : public HypothesisOracle {
public:
    explicit LinearMarginOracle(double gamma);
    OracleVerdict membership(const LabeledSet& set) const override;
    OracleVerdict erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                 std::size_t slack) const override;
    OracleVerdict fit_with_slack(const LabeledSet& set, std::size_t slack) const override;
    std::size_t slack_cap() const override { return 3; }
    std::string describe() const override;
    double gamma() const { return gamma_; }

private:
    double gamma_;
};

// Explicit finite class. erm_with_slack scans all hypotheses and returns the
// lowest-index error minimizer among those labeling the anchor positive.
class FiniteClassOracle final : public HypothesisOracle {
public:
    explicit FiniteClassOracle(FiniteClass cls);
    OracleVerdict membership(const LabeledSet& set) const override;
    OracleVerdict erm_with_slack(const LabeledSet& set, std::size_t anchor,
                                 std::size_t slack) const override;
    OracleVerdict fit_with_slack(const LabeledSet& set, std::size_t slack) const override;
    std::size_t slack_cap() const override;
    std::string describe() const override;
    const FiniteClass& finite_class() const { return cls_; }

private:
    FiniteClass cls_;
};

// Convenience wrappers over the oracle classes.
OracleVerdict erm_linear_margin(const LabeledSet& set, std::size_t anchor, std::size_t slack,
                                double gamma);
OracleVerdict erm_finite(const FiniteClass& cls, const LabeledSet& set, std::size_t anchor,
                         std::size_t slack);

}  // namespace edv
