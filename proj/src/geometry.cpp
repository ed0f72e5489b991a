#include "edverify/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "edverify/rng.hpp"

namespace edv {

namespace {

constexpr double kGramTol = 1e-9;

}  // namespace

double loo_bound(double gamma) {
    if (!(gamma > 1.0 / 3.0)) {
        throw std::domain_error("loo_bound: gamma must exceed 1/3, got " + std::to_string(gamma));
    }
    return (2.0 + 2.0 * gamma) / (3.0 * gamma - 1.0);
}

double robust_loo_bound(double alpha, double beta, std::size_t slack) {
    if (!(alpha + 2.0 * beta > 1.0)) {
        throw std::domain_error("robust_loo_bound: alpha + 2*beta must exceed 1");
    }
    return (2.0 + 2.0 * static_cast<double>(slack)) * (1.0 + beta) / (alpha + 2.0 * beta - 1.0);
}

void validate_family(const VectorFamily& family) {
    const std::size_t k = family.points.size();
    if (k == 0) throw std::invalid_argument("VectorFamily: empty family");
    if (family.witnesses.size() != k) {
        throw std::invalid_argument("VectorFamily: points/witnesses length mismatch");
    }
    if (!(family.gamma >= 0.0 && family.gamma <= 1.0)) {
        throw std::invalid_argument("VectorFamily: gamma outside [0, 1]");
    }
    const std::size_t d = family.points.front().size();
    if (d == 0) throw std::invalid_argument("VectorFamily: zero-dimensional vectors");
    auto check_vec = [d](const Vec& x, const char* what, std::size_t i) {
        if (x.size() != d) {
            throw std::invalid_argument(std::string("VectorFamily: inconsistent dimension in ") +
                                        what + " " + std::to_string(i));
        }
        if (!all_finite(x)) {
            throw std::invalid_argument(std::string("VectorFamily: non-finite coordinate in ") +
                                        what + " " + std::to_string(i));
        }
        if (!is_unit(x)) {
            throw std::invalid_argument(std::string("VectorFamily: non-unit ") + what + " " +
                                        std::to_string(i));
        }
    };
    for (std::size_t i = 0; i < k; ++i) {
        check_vec(family.points[i], "point", i);
        check_vec(family.witnesses[i], "witness", i);
    }
}

SkewObtuseReport verify_skew_obtuse(const VectorFamily& family, double alpha, double beta) {
    validate_family(family);
    const std::size_t k = family.size();
    SkewObtuseReport report;
    report.column_obtuse.assign(k, 0);
    report.holds = true;
    for (std::size_t j = 0; j < k; ++j) {
        const Vec& w = family.witnesses[j];
        for (std::size_t i = 0; i < k; ++i) {
            const double g = dot(family.points[i], w);
            if (i == j) {
                if (g < alpha - kGramTol) {
                    report.violations.emplace_back(i, j);
                    report.holds = false;
                }
            } else if (g <= -beta + kGramTol) {
                ++report.column_obtuse[j];
            } else {
                report.violations.emplace_back(i, j);
            }
        }
        if (report.column_obtuse[j] + family.slack < k - 1) report.holds = false;
    }
    return report;
}

VectorFamily construct_margin_third(std::size_t n) {
    if (n == 0) throw std::domain_error("construct_margin_third: n must be positive");
    const double eps = 1.0 / std::sqrt(3.0);
    const double tall = std::sqrt(2.0 / 3.0);
    VectorFamily family;
    family.gamma = 1.0 / 3.0;
    family.slack = 0;
    family.points.reserve(n);
    family.witnesses.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec x(n + 1, 0.0);
        x[0] = eps;
        x[i + 1] = tall;
        Vec w = x;
        w[0] = -eps;
        family.points.push_back(std::move(x));
        family.witnesses.push_back(std::move(w));
    }
    return family;
}

std::optional<std::vector<Vec>> nearly_orthogonal(std::size_t d, double epsilon,
                                                  std::size_t count, std::uint64_t seed,
                                                  std::size_t retry_budget) {
    if (d == 0) throw std::domain_error("nearly_orthogonal: d must be positive");
    if (count == 0) throw std::domain_error("nearly_orthogonal: count must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::domain_error("nearly_orthogonal: epsilon must lie in (0, 1)");
    }
    if (retry_budget == 0) retry_budget = 200 * count;

    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Vec> accepted;
    accepted.reserve(count);
    Vec candidate(d);
    for (std::size_t draws = 0; accepted.size() < count; ++draws) {
        if (draws >= retry_budget) return std::nullopt;
        for (auto& c : candidate) c = rng.coin() ? scale : -scale;
        bool ok = true;
        for (const Vec& u : accepted) {
            if (std::fabs(dot(u, candidate)) > epsilon) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(candidate);
    }
    return accepted;
}

std::optional<VectorFamily> construct_small_margin(double gamma, std::size_t d,
                                                   std::uint64_t seed, std::size_t target_k) {
    if (!(gamma >= 0.0 && gamma < 1.0 / 3.0)) {
        throw std::domain_error("construct_small_margin: gamma must lie in [0, 1/3)");
    }
    if (d < 2) throw std::domain_error("construct_small_margin: d must be at least 2");
    const double eps_orth = 1.5 * (1.0 / 3.0 - gamma);
    auto base = nearly_orthogonal(d, eps_orth, target_k, seed);
    if (!base) return std::nullopt;

    const double eps = 1.0 / std::sqrt(3.0);
    const double tall = std::sqrt(2.0 / 3.0);
    VectorFamily family;
    family.gamma = gamma;
    family.slack = 0;
    family.points.reserve(target_k);
    family.witnesses.reserve(target_k);
    for (const Vec& v : *base) {
        Vec x(d + 1, 0.0);
        x[0] = eps;
        for (std::size_t t = 0; t < d; ++t) x[t + 1] = tall * v[t];
        Vec w = x;
        w[0] = -eps;
        family.points.push_back(std::move(x));
        family.witnesses.push_back(std::move(w));
    }
    return family;
}

namespace {

double normalized_score(const Vec& w, const Vec& x) {
    const double n = norm(x);
    if (n < 1e-300) throw std::domain_error("margin_of: zero-norm point");
    return dot(w, x) / n;
}

void require_unit_witness(const Vec& w) {
    if (!is_unit(w)) throw std::invalid_argument("margin_of: witness is not unit norm");
}

}  // namespace

double margin_of(const Vec& w, const std::vector<Vec>& points, const std::vector<int>& labels) {
    require_unit_witness(w);
    if (points.size() != labels.size()) {
        throw std::invalid_argument("margin_of: points/labels length mismatch");
    }
    if (points.empty()) throw std::invalid_argument("margin_of: empty point set");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) {
            throw std::invalid_argument("margin_of: labels must be +1 or -1");
        }
        best = std::min(best, labels[i] * normalized_score(w, points[i]));
    }
    return best;
}

double margin_of(const Vec& w, const std::vector<Vec>& points) {
    require_unit_witness(w);
    if (points.empty()) throw std::invalid_argument("margin_of: empty point set");
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& x : points) best = std::min(best, std::fabs(normalized_score(w, x)));
    return best;
}

}  // namespace edv
