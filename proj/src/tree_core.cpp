#include "entropy/tree_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace entropy {

NodeId NodeId::make(int level, std::uint64_t index) {
    if (level < 0 || level > kMaxLevel) {
        throw DepthLimitError("node level " + std::to_string(level) + " outside [0, " +
                              std::to_string(kMaxLevel) + "]");
    }
    if (index >> level != 0) {
        throw std::invalid_argument("node index " + std::to_string(index) +
                                    " does not fit level " + std::to_string(level));
    }
    return {level, index};
}

NodeId NodeId::parent() const {
    if (level == 0) throw std::domain_error("root has no parent");
    return {level - 1, index >> 1};
}

std::pair<NodeId, NodeId> NodeId::children() const {
    if (level >= kMaxLevel) {
        throw DepthLimitError("children of a level-" + std::to_string(level) +
                              " node exceed the depth limit");
    }
    return {{level + 1, index << 1}, {level + 1, (index << 1) | 1U}};
}

NodeId NodeId::ancestor_at(int target_level) const {
    if (target_level < 0 || target_level > level) {
        throw std::invalid_argument("ancestor level out of range");
    }
    return {target_level, index >> (level - target_level)};
}

std::pair<NodeId, NodeId> children(const NodeId& t) { return t.children(); }

Weight::Weight(double beta) : beta_(beta) {
    if (!(beta > 1.0)) {
        throw std::domain_error("weight exponent beta must exceed 1, got " + std::to_string(beta));
    }
}

double Weight::at_level(int level) const {
    return std::pow(1.0 + static_cast<double>(level), -beta_);
}

double weight(const NodeId& t, double beta) { return Weight(beta)(t); }

TreeMeasure::TreeMeasure(Support atoms) {
    for (const auto& [t, m] : atoms) {
        if (m != 0.0) atoms_.emplace(NodeId::make(t.level, t.index), m);
    }
}

TreeMeasure TreeMeasure::delta(const NodeId& t, double mass) {
    TreeMeasure mu;
    mu.add(t, mass);
    return mu;
}

TreeMeasure& TreeMeasure::add(const NodeId& t, double m) {
    if (m == 0.0) return *this;
    auto [it, inserted] = atoms_.try_emplace(NodeId::make(t.level, t.index), m);
    if (!inserted) {
        it->second += m;
        if (it->second == 0.0) atoms_.erase(it);
    }
    return *this;
}

TreeMeasure& TreeMeasure::operator+=(const TreeMeasure& other) {
    for (const auto& [t, m] : other.atoms_) add(t, m);
    return *this;
}

TreeMeasure& TreeMeasure::operator-=(const TreeMeasure& other) {
    for (const auto& [t, m] : other.atoms_) add(t, -m);
    return *this;
}

TreeMeasure& TreeMeasure::operator*=(double factor) {
    if (factor == 0.0) {
        atoms_.clear();
        return *this;
    }
    for (auto& [t, m] : atoms_) m *= factor;
    return *this;
}

double TreeMeasure::at(const NodeId& t) const {
    const auto it = atoms_.find(t);
    return it == atoms_.end() ? 0.0 : it->second;
}

double TreeMeasure::total_variation() const {
    double s = 0.0;
    for (const auto& [t, m] : atoms_) s += std::abs(m);
    return s;
}

int TreeMeasure::max_level() const {
    int deepest = -1;
    for (const auto& [t, m] : atoms_) deepest = std::max(deepest, t.level);
    return deepest;
}

double mass(const TreeMeasure& mu, const NodeId& t) {
    double s = 0.0;
    for (const auto& [u, m] : mu.support()) {
        if (t.precedes_or_equal(u)) s += m;
    }
    return s;
}

double variation(const TreeMeasure& mu, const NodeId& t) {
    double s = 0.0;
    for (const auto& [u, m] : mu.support()) {
        if (t.precedes_or_equal(u)) s += std::abs(m);
    }
    return s;
}

std::pair<TreeMeasure, TreeMeasure> hahn_split(const TreeMeasure& mu) {
    TreeMeasure plus;
    TreeMeasure minus;
    for (const auto& [t, m] : mu.support()) {
        if (m > 0.0) {
            plus.add(t, m);
        } else {
            minus.add(t, -m);
        }
    }
    return {std::move(plus), std::move(minus)};
}

ConeSums::ConeSums(const TreeMeasure& mu) {
    for (const auto& [u, m] : mu.support()) {
        const double a = std::abs(m);
        for (int l = 0; l <= u.level; ++l) {
            ConeSum& cs = sums_[u.ancestor_at(l)];
            cs.mass += m;
            cs.variation += a;
        }
    }
}

ConeSum ConeSums::at(const NodeId& t) const {
    const auto it = sums_.find(t);
    return it == sums_.end() ? ConeSum{} : it->second;
}

}  // namespace entropy
