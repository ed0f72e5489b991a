#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "edverify/protocol.hpp"
#include "edverify/vecmath.hpp"

namespace edv {

// Wraps bare points and labels as documents "p0", "p1", ... (or with a custom
// prefix). Throws std::invalid_argument on length mismatch.
Instance instance_from_points(const std::vector<Vec>& points, const std::vector<int>& labels,
                              const std::string& prefix = "p");

// A random instance whose true labeling is separable at margin `gamma`: each
// document's normalized point sits at signed distance >= gamma from a hidden
// unit direction, on the side its label dictates. The first document is
// positive and the second negative, so both classes are inhabited; remaining
// labels are fair coin flips. Magnitudes vary so normalization stays honest.
// Requires gamma in [0, 1], d >= 1, n >= 2 (std::domain_error otherwise).
Instance random_separable_instance(double gamma, std::size_t d, std::size_t n,
                                   std::uint64_t seed);

struct PlantedInstance {
    Instance instance;
    std::vector<DocId> flipped;  // documents whose true label was inverted
};

// A random instance classifiable with at most `flips` total errors at margin
// `gamma`: starts from random_separable_instance and inverts `flips` distinct
// labels, never leaving the positive class empty. The hidden direction then
// errs exactly on the flipped documents. Throws std::domain_error when the
// flips cannot be placed.
PlantedInstance planted_error_instance(double gamma, std::size_t d, std::size_t n,
                                       std::size_t flips, std::uint64_t seed);

}  // namespace edv
