#pragma once

// Binary-tree addressing, level weights and finitely supported signed
// measures on the nodes.
//
// The tree is never materialised. A node is its (level, index) pair; the
// parent of (l, i) is (l - 1, i / 2) and its children are (l + 1, 2i) and
// (l + 1, 2i + 1). Everything else is arithmetic on those two numbers.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "entropy/errors.hpp"

namespace entropy {

/// Deepest addressable level. Index capacity is 2^62 so index arithmetic
/// never wraps.
inline constexpr int kMaxLevel = 62;

struct NodeId {
    int level = 0;
    std::uint64_t index = 0;

    static constexpr NodeId root() noexcept { return {0, 0}; }

    /// Validating constructor: level in [0, kMaxLevel] and index < 2^level.
    static NodeId make(int level, std::uint64_t index);

    bool is_root() const noexcept { return level == 0; }
    NodeId parent() const;
    std::pair<NodeId, NodeId> children() const;

    /// Ancestor of this node at `target_level` (<= level).
    NodeId ancestor_at(int target_level) const;

    /// u.precedes_or_equal(t) is u ≼ t: u lies on the branch from the root to t.
    bool precedes_or_equal(const NodeId& t) const noexcept {
        return level <= t.level && (t.index >> (t.level - level)) == index;
    }

    friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
    friend constexpr bool operator==(const NodeId&, const NodeId&) = default;
};

/// Children of t; DepthLimitError at level kMaxLevel.
std::pair<NodeId, NodeId> children(const NodeId& t);

/// Level weight w(t) = (1 + |t|)^-beta with beta > 1.
class Weight {
public:
    explicit Weight(double beta);

    double beta() const noexcept { return beta_; }
    double at_level(int level) const;
    double operator()(const NodeId& t) const { return at_level(t.level); }

private:
    double beta_;
};

/// w(t) for a single call; rejects beta <= 1.
double weight(const NodeId& t, double beta);

/// Mass s_μ(t) and variation ‖μ‖(t) over the offspring cone O(t).
struct ConeSum {
    double mass = 0.0;
    double variation = 0.0;
};

/// Finitely supported signed measure on tree nodes. Zero masses are never
/// stored, so support() is exactly the set of nonzero atoms.
class TreeMeasure {
public:
    using Support = std::map<NodeId, double>;

    TreeMeasure() = default;
    explicit TreeMeasure(Support atoms);

    static TreeMeasure delta(const NodeId& t, double mass = 1.0);

    /// Adds `mass` at t (merging with an existing atom).
    TreeMeasure& add(const NodeId& t, double mass);
    TreeMeasure& operator+=(const TreeMeasure& other);
    TreeMeasure& operator-=(const TreeMeasure& other);
    TreeMeasure& operator*=(double factor);

    friend TreeMeasure operator+(TreeMeasure a, const TreeMeasure& b) { return a += b; }
    friend TreeMeasure operator-(TreeMeasure a, const TreeMeasure& b) { return a -= b; }
    friend TreeMeasure operator*(double f, TreeMeasure a) { return a *= f; }

    const Support& support() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }
    std::size_t size() const noexcept { return atoms_.size(); }
    double at(const NodeId& t) const;

    /// ‖μ‖₁ = Σ|μ(u)|.
    double total_variation() const;
    /// Deepest level carrying an atom; -1 for the zero measure.
    int max_level() const;

    friend bool operator==(const TreeMeasure&, const TreeMeasure&) = default;

private:
    Support atoms_;
};

/// s_μ(t) = Σ_{u ≽ t} μ(u).
double mass(const TreeMeasure& mu, const NodeId& t);
/// ‖μ‖(t) = Σ_{u ≽ t} |μ(u)|.
double variation(const TreeMeasure& mu, const NodeId& t);

/// Atom-wise sign split μ = μ₊ − μ₋.
std::pair<TreeMeasure, TreeMeasure> hahn_split(const TreeMeasure& mu);

/// Mass and variation for every node of the ancestor closure of supp(μ),
/// obtained by walking each atom's branch once (atoms in sorted order).
/// Nodes outside the closure have zero mass and variation.
class ConeSums {
public:
    explicit ConeSums(const TreeMeasure& mu);

    ConeSum at(const NodeId& t) const;
    double mass(const NodeId& t) const { return at(t).mass; }
    double variation(const NodeId& t) const { return at(t).variation; }

    const std::map<NodeId, ConeSum>& closure() const noexcept { return sums_; }

private:
    std::map<NodeId, ConeSum> sums_;
};

}  // namespace entropy

template <>
struct std::hash<entropy::NodeId> {
    std::size_t operator()(const entropy::NodeId& t) const noexcept {
        return std::hash<std::uint64_t>{}(t.index * 64 + static_cast<std::uint64_t>(t.level));
    }
};
