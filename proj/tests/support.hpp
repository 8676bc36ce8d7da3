#pragma once

#include <cstdint>
#include <vector>

#include "entropy/harness.hpp"
#include "entropy/rng.hpp"
#include "entropy/tree_core.hpp"

namespace testing {

// Random measure with ‖μ‖₁ = 1 on levels 0..depth, drawn from (seed, stream).
inline entropy::TreeMeasure random_measure(std::uint64_t seed, std::uint64_t stream, int depth, int max_atoms = 20) {
    entropy::CounterRng rng(seed, stream);
    const int atoms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_atoms)));
    return entropy::random_tree_measure(rng, depth, atoms);
}

// Every node of levels 0..depth.
inline std::vector<entropy::NodeId> all_nodes(int depth) {
    std::vector<entropy::NodeId> out;
    for (int l = 0; l <= depth; ++l) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) out.push_back({l, i});
    }
    return out;
}

// Brute-force cone sums straight from the definition.
inline double brute_mass(const entropy::TreeMeasure& mu, const entropy::NodeId& t) {
    double s = 0.0;
    for (const auto& [u, m] : mu.support()) {
        if (u.level >= t.level && (u.index >> (u.level - t.level)) == t.index) s += m;
    }
    return s;
}

inline double brute_variation(const entropy::TreeMeasure& mu, const entropy::NodeId& t) {
    double s = 0.0;
    for (const auto& [u, m] : mu.support()) {
        if (u.level >= t.level && (u.index >> (u.level - t.level)) == t.index) s += m < 0 ? -m : m;
    }
    return s;
}

}  // namespace testing
