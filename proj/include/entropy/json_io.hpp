#pragma once

// nlohmann::json conversions for the core types. Nodes are written as
// {"level", "index"}; indices above 2^53 survive because nlohmann keeps
// uint64 exact.

#include <json.hpp>

#include "entropy/entropy_lab.hpp"
#include "entropy/tree_core.hpp"
#include "entropy/tree_operators.hpp"
#include "entropy/volterra.hpp"

namespace entropy {

inline void to_json(nlohmann::json& j, const NodeId& t) { j = {{"level", t.level}, {"index", t.index}}; }
inline void from_json(const nlohmann::json& j, NodeId& t) {
    t = NodeId::make(j.at("level").get<int>(), j.at("index").get<std::uint64_t>());
}

inline void to_json(nlohmann::json& j, const TreeMeasure& mu) {
    j = nlohmann::json::array();
    for (const auto& [t, m] : mu.support()) j.push_back({{"level", t.level}, {"index", t.index}, {"mass", m}});
}
inline void from_json(const nlohmann::json& j, TreeMeasure& mu) {
    TreeMeasure out;
    for (const auto& a : j) out.add(a.get<NodeId>(), a.at("mass").get<double>());
    mu = std::move(out);
}

/// A subtree is stored as its terminal set.
inline void to_json(nlohmann::json& j, const Subtree& s) { j = s.terminals(); }
inline void from_json(const nlohmann::json& j, Subtree& s) {
    const auto terminals = j.get<std::vector<NodeId>>();
    s = Subtree::from_terminals(terminals);
}

inline void to_json(nlohmann::json& j, const BinaryInterval& I) { j = {{"level", I.level}, {"index", I.index}}; }
inline void from_json(const nlohmann::json& j, BinaryInterval& I) {
    I = {j.at("level").get<int>(), j.at("index").get<std::uint64_t>()};
}

inline void to_json(nlohmann::json& j, const DyadicPartition& p) {
    j = {{"r", p.r()}, {"intervals", p.intervals()}, {"divided", p.divided()}};
}
inline void from_json(const nlohmann::json& j, DyadicPartition& p) {
    p = DyadicPartition(j.at("r").get<double>(), j.at("intervals").get<std::vector<BinaryInterval>>(),
                        j.value("divided", std::vector<BinaryInterval>{}));
}

inline void to_json(nlohmann::json& j, const IntervalMeasure& mu) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [x, m] : mu.atoms()) atoms.push_back({{"x", x}, {"mass", m}});
    nlohmann::json dens = nlohmann::json::array();
    for (const auto& d : mu.densities()) dens.push_back({{"lo", d.lo}, {"hi", d.hi}, {"density", d.density}});
    j = {{"atoms", std::move(atoms)}, {"densities", std::move(dens)}};
}
inline void from_json(const nlohmann::json& j, IntervalMeasure& mu) {
    std::vector<IntervalMeasure::Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.emplace_back(a.at("x").get<double>(), a.at("mass").get<double>());
    std::vector<DensityPiece> dens;
    if (j.contains("densities")) {
        for (const auto& d : j.at("densities")) {
            dens.push_back({d.at("lo").get<double>(), d.at("hi").get<double>(), d.at("density").get<double>()});
        }
    }
    mu = IntervalMeasure(std::move(atoms), std::move(dens));
}

inline void to_json(nlohmann::json& j, const CoverReport& c) {
    j = {{"k", c.k},
         {"radius", c.radius},
         {"centers", c.centers},
         {"method", c.method == CoverMethod::greedy ? "greedy" : "exhaustive"}};
}

inline void to_json(nlohmann::json& j, const ScalingFit& f) {
    j = {{"ns", f.ns}, {"values", f.values}, {"slope", f.slope}, {"intercept", f.intercept},
         {"residual", f.residual}};
}

}  // namespace entropy

// WeightedVector has no default constructor, so it needs the non-default
// serializer form.
template <>
struct nlohmann::adl_serializer<entropy::WeightedVector> {
    static void to_json(json& j, const entropy::WeightedVector& f) {
        json entries = json::array();
        for (const auto& [t, v] : f.entries()) entries.push_back({{"level", t.level}, {"index", t.index}, {"value", v}});
        j = {{"beta", f.beta()}, {"entries", std::move(entries)}};
    }
    static entropy::WeightedVector from_json(const json& j) {
        std::vector<entropy::WeightedVector::Entry> entries;
        for (const auto& e : j.at("entries")) entries.emplace_back(e.get<entropy::NodeId>(), e.at("value").get<double>());
        return entropy::WeightedVector(j.at("beta").get<double>(), std::move(entries));
    }
};
