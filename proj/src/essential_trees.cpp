#include "entropy/essential_trees.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace entropy {

namespace {

void require_unit_ball(const TreeMeasure& mu) {
    const double total = mu.total_variation();
    if (total > 1.0 + kUnitBallSlack) {
        throw std::domain_error("measure must lie in the unit ball, got ||mu||_1 = " +
                                std::to_string(total));
    }
}

void require_enumerable(int n) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    if (n > kMaxEnumerationN) {
        throw BudgetError("exhaustive subtree enumeration is limited to n <= " +
                          std::to_string(kMaxEnumerationN));
    }
}

// Walks every terminal set with the given profile. Levels are filled from 1
// upwards; a level-l position is available when none of its ancestors has
// already been chosen. Positions within a level are chosen in increasing
// index order, so each set is produced exactly once.
class ProfileWalker {
public:
    ProfileWalker(const LevelProfile& profile, std::function<void(const std::vector<NodeId>&)> sink)
        : profile_(profile), sink_(std::move(sink)) {}

    void run() {
        chosen_.clear();
        fill_level(1, 0, 0);
    }

private:
    bool blocked(const NodeId& t) const {
        return std::any_of(chosen_.begin(), chosen_.end(),
                           [&](const NodeId& c) { return c.precedes_or_equal(t); });
    }

    void fill_level(int level, int taken, std::uint64_t next_index) {
        const int levels = static_cast<int>(profile_.size());
        if (level > levels) {
            sink_(chosen_);
            return;
        }
        const int want = profile_[static_cast<std::size_t>(level - 1)];
        if (taken == want) {
            fill_level(level + 1, 0, 0);
            return;
        }
        const std::uint64_t width = std::uint64_t{1} << level;
        for (std::uint64_t i = next_index; i < width; ++i) {
            const NodeId t{level, i};
            if (blocked(t)) continue;
            chosen_.push_back(t);
            fill_level(level, taken + 1, i + 1);
            chosen_.pop_back();
        }
    }

    const LevelProfile& profile_;
    std::function<void(const std::vector<NodeId>&)> sink_;
    std::vector<NodeId> chosen_;
};

void profiles_from(int level, int n, int budget, LevelProfile& current,
                   std::vector<LevelProfile>& out) {
    if (level > n) {
        out.push_back(current);
        return;
    }
    for (int q = 0; q * level <= budget; ++q) {
        current[static_cast<std::size_t>(level - 1)] = q;
        profiles_from(level + 1, n, budget - q * level, current, out);
    }
    current[static_cast<std::size_t>(level - 1)] = 0;
}

bool is_zero_profile(const LevelProfile& p) {
    return std::all_of(p.begin(), p.end(), [](int q) { return q == 0; });
}

}  // namespace

EssentialResult essential_subtree(const TreeMeasure& mu, int n) {
    if (n < 1) throw std::invalid_argument("essential_subtree needs n >= 1");
    require_unit_ball(mu);

    const ConeSums sums(mu);
    std::set<NodeId> members;
    std::vector<NodeId> boundary;
    std::deque<NodeId> queue{NodeId::root()};
    while (!queue.empty()) {
        const NodeId t = queue.front();
        queue.pop_front();
        const double threshold = static_cast<double>(t.level) / static_cast<double>(n);
        if (sums.variation(t) > threshold) {
            members.insert(t);
            // Children of a deepest-level node carry no measure and are not addressable.
            if (t.level == kMaxLevel) continue;
            const auto [c0, c1] = t.children();
            queue.push_back(c0);
            queue.push_back(c1);
        } else {
            boundary.push_back(t);
        }
    }
    std::sort(boundary.begin(), boundary.end());
    return {Subtree::from_nodes(std::move(members)), std::move(boundary), n};
}

long long terminal_level_sum(const Subtree& upsilon) {
    long long s = 0;
    for (const NodeId& q : upsilon.terminals()) s += q.level;
    return s;
}

SizeBounds verify_size_bounds(const EssentialResult& result) {
    SizeBounds b;
    b.sum_terminal_levels = terminal_level_sum(result.upsilon);
    b.total_size = static_cast<long long>(result.upsilon.size());
    if (b.sum_terminal_levels > result.n) {
        throw InvariantViolation("terminal level sum " + std::to_string(b.sum_terminal_levels) +
                                 " exceeds n = " + std::to_string(result.n));
    }
    if (b.total_size > result.n + 1) {
        throw InvariantViolation("essential subtree has " + std::to_string(b.total_size) +
                                 " nodes, more than n + 1 = " + std::to_string(result.n + 1));
    }
    return b;
}

std::vector<LevelProfile> admissible_profiles(int n) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    std::vector<LevelProfile> out;
    LevelProfile current(static_cast<std::size_t>(n), 0);
    profiles_from(1, n, n, current, out);
    return out;
}

std::uint64_t count_for_profile(const LevelProfile& profile) {
    if (is_zero_profile(profile)) return 1;  // Q = {root}
    std::uint64_t count = 0;
    ProfileWalker(profile, [&](const std::vector<NodeId>&) { ++count; }).run();
    return count;
}

std::vector<Subtree> enumerate_admissible_subtrees(int n) {
    require_enumerable(n);
    std::vector<Subtree> out;
    for (const LevelProfile& profile : admissible_profiles(n)) {
        if (is_zero_profile(profile)) {
            const NodeId root = NodeId::root();
            out.push_back(Subtree::from_terminals(std::span(&root, 1)));
            continue;
        }
        ProfileWalker(profile, [&](const std::vector<NodeId>& q) {
            out.push_back(Subtree::from_terminals(q));
        }).run();
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double admissible_count_bound(int n) { return std::pow(4.0 * std::numbers::e, n); }

std::uint64_t count_admissible(int n) {
    require_enumerable(n);
    std::uint64_t total = 0;
    for (const LevelProfile& profile : admissible_profiles(n)) total += count_for_profile(profile);
    if (static_cast<double>(total) > admissible_count_bound(n)) {
        throw InvariantViolation("admissible subtree count exceeds (4e)^n");
    }
    return total;
}

double essential_approximation_error(const TreeMeasure& mu, int n, double beta) {
    const EssentialResult r = essential_subtree(mu, n);
    return residual_norm_sq(mu, r.upsilon, beta);
}

double cone_energy(const TreeMeasure& mu, const NodeId& t, double beta) {
    const Weight w(beta);
    const ConeSums sums(mu);
    double s = 0.0;
    for (const auto& [u, cs] : sums.closure()) {
        if (t.precedes_or_equal(u)) s += w(u) * cs.mass * cs.mass;
    }
    return s;
}

}  // namespace entropy
