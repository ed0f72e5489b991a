#include "edverify/instances.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "edverify/rng.hpp"

namespace edv {

Instance instance_from_points(const std::vector<Vec>& points, const std::vector<int>& labels,
                              const std::string& prefix) {
    if (points.size() != labels.size()) {
        throw std::invalid_argument("instance_from_points: points/labels length mismatch");
    }
    Instance inst;
    inst.documents.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        inst.documents.push_back({prefix + std::to_string(i), points[i], labels[i]});
    }
    validate_instance(inst);
    return inst;
}

namespace {

// A unit vector orthogonal to w, drawn uniformly from the d-1 sphere in w's
// orthogonal complement. Meaningless for d = 1; callers special-case it.
Vec random_orthogonal(const Vec& w, Rng& rng) {
    for (;;) {
        Vec u = rng.unit_vector(w.size());
        axpy(-dot(u, w), w, u);
        const double n = norm(u);
        if (n > 1e-6) return scaled(u, 1.0 / n);
    }
}

}  // namespace

Instance random_separable_instance(double gamma, std::size_t d, std::size_t n,
                                   std::uint64_t seed) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::domain_error("random_separable_instance: gamma outside [0, 1]");
    }
    if (d < 1) throw std::domain_error("random_separable_instance: d must be >= 1");
    if (n < 2) throw std::domain_error("random_separable_instance: n must be >= 2");

    Rng rng(seed);
    const Vec w = rng.unit_vector(d);
    std::vector<Vec> points;
    std::vector<int> labels;
    points.reserve(n);
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i == 0 ? 1 : i == 1 ? -1 : (rng.coin() ? 1 : -1);
        // Place the normalized point at signed margin m in [gamma, 1] exactly:
        // x_bar = label*m*w + sqrt(1-m^2)*u with u orthogonal to w.
        const double m = d == 1 ? 1.0 : rng.uniform(gamma, 1.0);
        Vec x_bar = scaled(w, label * m);
        if (d > 1 && m < 1.0) {
            axpy(std::sqrt(1.0 - m * m), random_orthogonal(w, rng), x_bar);
        }
        points.push_back(scaled(x_bar, rng.uniform(0.5, 2.0)));
        labels.push_back(label);
    }
    return instance_from_points(points, labels, "d");
}

PlantedInstance planted_error_instance(double gamma, std::size_t d, std::size_t n,
                                       std::size_t flips, std::uint64_t seed) {
    PlantedInstance out;
    out.instance = random_separable_instance(gamma, d, n, seed);
    if (flips == 0) return out;

    Rng rng(split_seed(seed, 1));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    std::size_t positives = out.instance.n_plus();
    std::size_t placed = 0;
    for (std::size_t i : order) {
        if (placed == flips) break;
        Document& doc = out.instance.documents[i];
        if (doc.true_label == 1 && positives == 1) continue;  // keep a positive alive
        positives += doc.true_label == 1 ? -1 : 1;
        doc.true_label = -doc.true_label;
        out.flipped.push_back(doc.id);
        ++placed;
    }
    if (placed < flips) {
        throw std::domain_error("planted_error_instance: cannot place that many flips");
    }
    return out;
}

}  // namespace edv
