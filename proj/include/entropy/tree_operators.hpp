#pragma once

// The dual tree-summation operators
//
//     (V f)(t)  = Σ_{u ≼ t} w(u) f(u)          ℓ₂(T,W) → ℓ∞(T)
//     (V*μ)(t)  = s_μ(t) = μ(O(t))             ℓ₁(T)   → ℓ₂(T,W)
//
// together with subtrees, the flush projection P_Υ and the finite-rank
// approximating operator A_Υ = ι_Υ V*_Υ P_Υ.

#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "entropy/tree_core.hpp"

namespace entropy {

/// Finitely supported element of ℓ₂(T, W) with W = (1 + |t|)^-beta.
/// Entries are kept sorted by (level, index) and never hold zeros, so norms
/// always sum in the same order.
class WeightedVector {
public:
    using Entry = std::pair<NodeId, double>;

    explicit WeightedVector(double beta);
    WeightedVector(double beta, std::vector<Entry> entries);

    double beta() const noexcept { return beta_; }
    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double at(const NodeId& t) const;

    /// ‖x‖²_{2,W} = Σ w(t) x(t)².
    double norm_sq() const;
    double norm() const;

    /// ⟨x, y⟩_W = Σ w(t) x(t) y(t).
    friend double dot(const WeightedVector& x, const WeightedVector& y);
    /// ‖x − y‖²_{2,W} by a sorted merge.
    friend double distance_sq(const WeightedVector& x, const WeightedVector& y);
    friend double distance(const WeightedVector& x, const WeightedVector& y);

    friend WeightedVector operator-(const WeightedVector& x, const WeightedVector& y);
    friend WeightedVector operator+(const WeightedVector& x, const WeightedVector& y);
    friend WeightedVector operator*(double a, const WeightedVector& x);

    /// Entries whose node satisfies `keep`.
    template <class Pred>
    WeightedVector restricted(Pred keep) const {
        std::vector<Entry> out;
        for (const auto& e : entries_) {
            if (keep(e.first)) out.push_back(e);
        }
        return WeightedVector(beta_, std::move(out));
    }

    friend bool operator==(const WeightedVector&, const WeightedVector&) = default;

private:
    double beta_;
    std::vector<Entry> entries_;
};

/// Ancestor-closed finite node set. The empty subtree is allowed and stands
/// for the zero operator (it arises from the zero measure).
class Subtree {
public:
    Subtree() = default;

    /// Validates ancestor closure.
    static Subtree from_nodes(std::set<NodeId> nodes);
    /// Union of the branches root → q. `terminals` must be an antichain.
    static Subtree from_terminals(std::span<const NodeId> terminals);
    /// Levels 0..depth of the full binary tree.
    static Subtree full(int depth);

    bool empty() const noexcept { return nodes_.empty(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool contains(const NodeId& t) const { return nodes_.contains(t); }
    const std::set<NodeId>& nodes() const noexcept { return nodes_; }

    /// Q: nodes with no child inside.
    std::vector<NodeId> terminals() const;
    /// B: children of members that are not members.
    std::vector<NodeId> boundary() const;
    /// N_l = |Υ ∩ T_l| for l = 0..max level.
    std::vector<std::size_t> level_counts() const;

    /// z(s): the last member on the branch root → s (s itself if inside).
    /// Empty optional only for the empty subtree.
    std::optional<NodeId> last_on_branch(const NodeId& s) const;

    friend bool operator==(const Subtree&, const Subtree&) = default;
    friend auto operator<=>(const Subtree& a, const Subtree& b) { return a.nodes_ <=> b.nodes_; }

private:
    explicit Subtree(std::set<NodeId> nodes) : nodes_(std::move(nodes)) {}
    std::set<NodeId> nodes_;
};

/// V*μ on the ancestor closure of supp(μ), levels ≤ depth.
/// Requires depth ≥ max support level.
WeightedVector apply_vstar(const TreeMeasure& mu, double beta, int depth);
/// Same, with depth = max support level.
WeightedVector apply_vstar(const TreeMeasure& mu, double beta);

/// (V f)(t) = Σ_{u ≼ t} w(u) f(u).
double apply_v(const WeightedVector& f, const NodeId& t);

/// ‖V‖² = ‖V*‖² restricted to levels 0..depth: Σ_{l ≤ depth} (1 + l)^-beta.
double operator_norm_sq(double beta, long long depth);

/// (P_Υ μ)(t) = μ(t) + Σ_{u ∈ Z(t)} μ(u) for t ∈ Υ.
TreeMeasure flush_projection(const TreeMeasure& mu, const Subtree& upsilon);

/// V*_Υ ν for ν supported on Υ: cone sums taken inside Υ only.
WeightedVector restricted_vstar(const TreeMeasure& nu, const Subtree& upsilon, double beta);

/// A_Υ μ = ι_Υ V*_Υ P_Υ μ.
WeightedVector approximator_apply(const TreeMeasure& mu, const Subtree& upsilon, double beta);

/// ‖(V* − A_Υ)μ‖²_{2,W} = Σ_{t ∉ Υ} s_μ(t)² w(t).
double residual_norm_sq(const TreeMeasure& mu, const Subtree& upsilon, double beta);

}  // namespace entropy
