#include "entropy/tree_operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace entropy {

namespace {

using WeightTable = std::array<double, kMaxLevel + 1>;

// Level weights for the most recently used beta on this thread.
const WeightTable& level_weights(double beta) {
    thread_local double cached_beta = 0.0;
    thread_local WeightTable table{};
    if (beta != cached_beta) {
        const Weight w(beta);
        for (int l = 0; l <= kMaxLevel; ++l) table[static_cast<std::size_t>(l)] = w.at_level(l);
        cached_beta = beta;
    }
    return table;
}

void require_same_beta(const WeightedVector& x, const WeightedVector& y) {
    if (x.beta() != y.beta()) {
        throw std::invalid_argument("weighted vectors live in different l2(T,W) spaces");
    }
}

// Merge of two sorted entry lists; `f` sees (node, x(node), y(node)).
template <class F>
void merge_entries(const WeightedVector& x, const WeightedVector& y, F&& f) {
    auto a = x.entries().begin();
    auto b = y.entries().begin();
    const auto ae = x.entries().end();
    const auto be = y.entries().end();
    while (a != ae || b != be) {
        if (b == be || (a != ae && a->first < b->first)) {
            f(a->first, a->second, 0.0);
            ++a;
        } else if (a == ae || b->first < a->first) {
            f(b->first, 0.0, b->second);
            ++b;
        } else {
            f(a->first, a->second, b->second);
            ++a;
            ++b;
        }
    }
}

}  // namespace

WeightedVector::WeightedVector(double beta) : beta_(Weight(beta).beta()) {}

WeightedVector::WeightedVector(double beta, std::vector<Entry> entries)
    : beta_(Weight(beta).beta()), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].first == entries_[i - 1].first) {
            throw std::invalid_argument("duplicate node in weighted vector");
        }
    }
    std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double WeightedVector::at(const NodeId& t) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                                     [](const Entry& e, const NodeId& n) { return e.first < n; });
    return (it != entries_.end() && it->first == t) ? it->second : 0.0;
}

double WeightedVector::norm_sq() const {
    const auto& w = level_weights(beta_);
    double s = 0.0;
    for (const auto& [t, v] : entries_) s += w[static_cast<std::size_t>(t.level)] * v * v;
    return s;
}

double WeightedVector::norm() const { return std::sqrt(norm_sq()); }

double dot(const WeightedVector& x, const WeightedVector& y) {
    require_same_beta(x, y);
    const auto& w = level_weights(x.beta_);
    double s = 0.0;
    merge_entries(x, y, [&](const NodeId& t, double a, double b) {
        s += w[static_cast<std::size_t>(t.level)] * a * b;
    });
    return s;
}

double distance_sq(const WeightedVector& x, const WeightedVector& y) {
    require_same_beta(x, y);
    const auto& w = level_weights(x.beta_);
    double s = 0.0;
    merge_entries(x, y, [&](const NodeId& t, double a, double b) {
        const double d = a - b;
        s += w[static_cast<std::size_t>(t.level)] * d * d;
    });
    return s;
}

double distance(const WeightedVector& x, const WeightedVector& y) {
    return std::sqrt(distance_sq(x, y));
}

WeightedVector operator-(const WeightedVector& x, const WeightedVector& y) {
    require_same_beta(x, y);
    std::vector<WeightedVector::Entry> out;
    merge_entries(x, y, [&](const NodeId& t, double a, double b) { out.emplace_back(t, a - b); });
    return WeightedVector(x.beta_, std::move(out));
}

WeightedVector operator+(const WeightedVector& x, const WeightedVector& y) {
    require_same_beta(x, y);
    std::vector<WeightedVector::Entry> out;
    merge_entries(x, y, [&](const NodeId& t, double a, double b) { out.emplace_back(t, a + b); });
    return WeightedVector(x.beta_, std::move(out));
}

WeightedVector operator*(double a, const WeightedVector& x) {
    std::vector<WeightedVector::Entry> out(x.entries_.begin(), x.entries_.end());
    for (auto& e : out) e.second *= a;
    return WeightedVector(x.beta_, std::move(out));
}

Subtree Subtree::from_nodes(std::set<NodeId> nodes) {
    for (const NodeId& t : nodes) {
        NodeId::make(t.level, t.index);
        if (!t.is_root() && !nodes.contains(t.parent())) {
            throw std::invalid_argument("node set is not ancestor-closed");
        }
    }
    return Subtree(std::move(nodes));
}

Subtree Subtree::from_terminals(std::span<const NodeId> terminals) {
    std::set<NodeId> nodes;
    for (const NodeId& q : terminals) {
        NodeId::make(q.level, q.index);
        for (int l = 0; l <= q.level; ++l) nodes.insert(q.ancestor_at(l));
    }
    for (const NodeId& q : terminals) {
        for (const NodeId& p : terminals) {
            if (!(p == q) && q.precedes_or_equal(p)) {
                throw std::invalid_argument("terminal set is not an antichain");
            }
        }
    }
    return Subtree(std::move(nodes));
}

Subtree Subtree::full(int depth) {
    if (depth < 0) return {};
    if (depth > 24) throw BudgetError("full subtree deeper than 24 levels");
    std::set<NodeId> nodes;
    for (int l = 0; l <= depth; ++l) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) nodes.insert({l, i});
    }
    return Subtree(std::move(nodes));
}

std::vector<NodeId> Subtree::terminals() const {
    std::vector<NodeId> out;
    for (const NodeId& t : nodes_) {
        if (t.level == kMaxLevel) {
            out.push_back(t);
            continue;
        }
        const auto [c0, c1] = t.children();
        if (!nodes_.contains(c0) && !nodes_.contains(c1)) out.push_back(t);
    }
    return out;
}

std::vector<NodeId> Subtree::boundary() const {
    std::vector<NodeId> out;
    for (const NodeId& t : nodes_) {
        if (t.level == kMaxLevel) continue;
        const auto [c0, c1] = t.children();
        if (!nodes_.contains(c0)) out.push_back(c0);
        if (!nodes_.contains(c1)) out.push_back(c1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> Subtree::level_counts() const {
    std::vector<std::size_t> counts;
    for (const NodeId& t : nodes_) {
        if (static_cast<std::size_t>(t.level) >= counts.size()) {
            counts.resize(static_cast<std::size_t>(t.level) + 1, 0);
        }
        ++counts[static_cast<std::size_t>(t.level)];
    }
    return counts;
}

std::optional<NodeId> Subtree::last_on_branch(const NodeId& s) const {
    if (nodes_.empty()) return std::nullopt;
    for (int l = s.level; l >= 0; --l) {
        const NodeId a = s.ancestor_at(l);
        if (nodes_.contains(a)) return a;
    }
    throw std::logic_error("non-empty subtree without its root");
}

WeightedVector apply_vstar(const TreeMeasure& mu, double beta, int depth) {
    if (depth < mu.max_level()) {
        throw std::invalid_argument("apply_vstar depth is below the deepest atom");
    }
    const ConeSums sums(mu);
    std::vector<WeightedVector::Entry> out;
    out.reserve(sums.closure().size());
    for (const auto& [t, cs] : sums.closure()) {
        if (t.level <= depth && cs.mass != 0.0) out.emplace_back(t, cs.mass);
    }
    return WeightedVector(beta, std::move(out));
}

WeightedVector apply_vstar(const TreeMeasure& mu, double beta) {
    return apply_vstar(mu, beta, std::max(mu.max_level(), 0));
}

double apply_v(const WeightedVector& f, const NodeId& t) {
    const auto& w = level_weights(f.beta());
    double s = 0.0;
    for (const auto& [u, v] : f.entries()) {
        if (u.precedes_or_equal(t)) s += w[static_cast<std::size_t>(u.level)] * v;
    }
    return s;
}

double operator_norm_sq(double beta, long long depth) {
    const Weight w(beta);
    if (depth < 0) return 0.0;
    // Smallest terms first.
    double s = 0.0;
    for (long long l = depth; l >= 0; --l) s += std::pow(1.0 + static_cast<double>(l), -w.beta());
    return s;
}

TreeMeasure flush_projection(const TreeMeasure& mu, const Subtree& upsilon) {
    TreeMeasure out;
    if (upsilon.empty()) return out;
    for (const auto& [u, m] : mu.support()) out.add(*upsilon.last_on_branch(u), m);
    return out;
}

WeightedVector restricted_vstar(const TreeMeasure& nu, const Subtree& upsilon, double beta) {
    std::vector<WeightedVector::Entry> out;
    for (const auto& [u, m] : nu.support()) {
        if (!upsilon.contains(u)) {
            throw std::invalid_argument("restricted_vstar: measure not supported on the subtree");
        }
    }
    // Every member's cone inside Υ; members with no atom below stay zero.
    for (const NodeId& t : upsilon.nodes()) {
        double s = 0.0;
        for (const auto& [u, m] : nu.support()) {
            if (t.precedes_or_equal(u)) s += m;
        }
        if (s != 0.0) out.emplace_back(t, s);
    }
    return WeightedVector(beta, std::move(out));
}

WeightedVector approximator_apply(const TreeMeasure& mu, const Subtree& upsilon, double beta) {
    return restricted_vstar(flush_projection(mu, upsilon), upsilon, beta);
}

double residual_norm_sq(const TreeMeasure& mu, const Subtree& upsilon, double beta) {
    const auto& w = level_weights(Weight(beta).beta());
    const ConeSums sums(mu);
    double s = 0.0;
    for (const auto& [t, cs] : sums.closure()) {
        if (!upsilon.contains(t)) s += cs.mass * cs.mass * w[static_cast<std::size_t>(t.level)];
    }
    return s;
}

}  // namespace entropy
