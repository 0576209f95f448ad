#pragma once

#include "sparsecand/network.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace sparsecand {

struct SynthConfig {
    std::size_t num_vars = 37;
    std::size_t max_parents = 4;
    // (cardinality, relative weight).
    std::vector<std::pair<std::size_t, double>> cardinalities = {{2, 13.0}, {3, 22.0}, {4, 2.0}};
    double min_prob = 0.02; // floor on every CPT entry before renormalizing
    std::uint64_t seed = 0;
};

// Random ground-truth network: a random variable order, in-degree k drawn with
// weight proportional to (max_parents + 1 - k), parents uniform among earlier
// variables, and peaked random CPT rows. Variables are named X0, X1, ...;
// states s0, s1, ....
BayesianNetwork random_network(const SynthConfig& cfg);

} // namespace sparsecand
