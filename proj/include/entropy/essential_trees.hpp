#pragma once

// n-essential subtrees: grow from the root while ‖μ‖(t) > |t|/n, stop (and
// record t in the boundary B^μ) as soon as ‖μ‖(t) ≤ |t|/n. For ‖μ‖₁ ≤ 1 the
// result never reaches level n + 1, its terminal set Q satisfies
// Σ_{t∈Q} |t| ≤ n, and the family Γ of all subtrees with that property has
// at most (4e)^n members.

#include <cstdint>
#include <vector>

#include "entropy/tree_operators.hpp"

namespace entropy {

/// Slack used for the unit-ball precondition ‖μ‖₁ ≤ 1.
inline constexpr double kUnitBallSlack = 1e-12;

/// Largest n accepted by the exhaustive enumeration of Γ.
inline constexpr int kMaxEnumerationN = 12;

struct EssentialResult {
    Subtree upsilon;
    std::vector<NodeId> boundary;  // B^μ, sorted
    int n = 0;
};

/// Breadth-first stopping-rule construction. Requires ‖μ‖₁ ≤ 1 and n ≥ 1.
EssentialResult essential_subtree(const TreeMeasure& mu, int n);

struct SizeBounds {
    long long sum_terminal_levels = 0;  // Σ_{t∈Q} |t|
    long long total_size = 0;           // Σ_l N_l
};

/// Computes both sizes and throws InvariantViolation if Σ|t| > n or
/// Σ N_l > n + 1.
SizeBounds verify_size_bounds(const EssentialResult& result);

/// Σ_{t∈Q} |t| for an arbitrary subtree.
long long terminal_level_sum(const Subtree& upsilon);

/// Level profile (q_1, …, q_n) of a terminal set: q_l = |Q ∩ T_l|, l ≥ 1.
using LevelProfile = std::vector<int>;

/// All non-negative integer profiles with Σ_{l=1}^n l q_l ≤ n.
std::vector<LevelProfile> admissible_profiles(int n);

/// All subtrees of the binary tree whose terminal set satisfies
/// Σ_{t∈Q} |t| ≤ n, sorted and deduplicated. Generated profile by profile.
/// BudgetError for n > kMaxEnumerationN.
std::vector<Subtree> enumerate_admissible_subtrees(int n);

/// Number of admissible terminal sets with the given profile.
std::uint64_t count_for_profile(const LevelProfile& profile);

/// |Γ_n|. Throws InvariantViolation if it exceeds (4e)^n.
std::uint64_t count_admissible(int n);

/// (4e)^n.
double admissible_count_bound(int n);

/// ‖(V* − A_{Υ^μ})μ‖²_{2,W}; ≤ 1/n when beta = 2 and ‖μ‖₁ ≤ 1.
double essential_approximation_error(const TreeMeasure& mu, int n, double beta = 2.0);

/// Σ_{l≥|t|} Σ_{u∈O_l(t)} w(u) s_μ(u)², the V*μ energy inside the cone of t.
double cone_energy(const TreeMeasure& mu, const NodeId& t, double beta);

}  // namespace entropy
