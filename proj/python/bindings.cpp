// Python bindings. Nodes cross the boundary as (level, index) tuples and
// measures as {(level, index): mass} dicts; everything else is plain floats,
// lists and dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "entropy/entropy_lab.hpp"
#include "entropy/essential_trees.hpp"
#include "entropy/harness.hpp"
#include "entropy/json_io.hpp"
#include "entropy/volterra.hpp"

namespace py = pybind11;
using namespace entropy;

namespace {

using NodeTuple = std::pair<int, std::uint64_t>;

NodeId node(const NodeTuple& t) { return NodeId::make(t.first, t.second); }
NodeTuple tuple(const NodeId& t) { return {t.level, t.index}; }

std::vector<NodeTuple> tuples(const std::vector<NodeId>& nodes) {
    std::vector<NodeTuple> out;
    out.reserve(nodes.size());
    for (const NodeId& t : nodes) out.push_back(tuple(t));
    return out;
}

TreeMeasure measure(const std::map<NodeTuple, double>& atoms) {
    TreeMeasure mu;
    for (const auto& [t, m] : atoms) mu.add(node(t), m);
    return mu;
}

std::map<NodeTuple, double> atoms_of(const TreeMeasure& mu) {
    std::map<NodeTuple, double> out;
    for (const auto& [t, m] : mu.support()) out.emplace(tuple(t), m);
    return out;
}

std::map<NodeTuple, double> entries_of(const WeightedVector& v) {
    std::map<NodeTuple, double> out;
    for (const auto& [t, x] : v.entries()) out.emplace(tuple(t), x);
    return out;
}

Subtree subtree_from(const std::vector<NodeTuple>& terminals) {
    std::vector<NodeId> q;
    for (const auto& t : terminals) q.push_back(node(t));
    return Subtree::from_terminals(q);
}

IntervalMeasure interval_measure(const std::vector<std::pair<double, double>>& atoms) {
    return IntervalMeasure(atoms);
}

py::object json_to_python(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tree operators, essential subtrees, covering estimates and the critical Volterra kernel";

    py::register_exception<BudgetError>(m, "BudgetError", PyExc_ValueError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);
    py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_ArithmeticError);
    py::register_exception<DepthLimitError>(m, "DepthLimitError", PyExc_IndexError);

    m.attr("MAX_LEVEL") = kMaxLevel;

    // ---- trees
    m.def("children", [](const NodeTuple& t) {
        const auto [a, b] = node(t).children();
        return std::pair{tuple(a), tuple(b)};
    });
    m.def("weight", [](const NodeTuple& t, double beta) { return weight(node(t), beta); }, py::arg("node"),
          py::arg("beta"));
    m.def("mass", [](const std::map<NodeTuple, double>& mu, const NodeTuple& t) { return mass(measure(mu), node(t)); },
          py::arg("mu"), py::arg("node"));
    m.def("variation",
          [](const std::map<NodeTuple, double>& mu, const NodeTuple& t) { return variation(measure(mu), node(t)); },
          py::arg("mu"), py::arg("node"));
    m.def("apply_vstar",
          [](const std::map<NodeTuple, double>& mu, double beta) { return entries_of(apply_vstar(measure(mu), beta)); },
          py::arg("mu"), py::arg("beta"), "V*mu as {node: value} over the ancestor closure of the support");
    m.def("vstar_norm", [](const std::map<NodeTuple, double>& mu, double beta) {
        return apply_vstar(measure(mu), beta).norm();
    }, py::arg("mu"), py::arg("beta"));
    m.def("flush_projection", [](const std::map<NodeTuple, double>& mu, const std::vector<NodeTuple>& terminals) {
        return atoms_of(flush_projection(measure(mu), subtree_from(terminals)));
    }, py::arg("mu"), py::arg("terminals"));
    m.def("residual_norm_sq",
          [](const std::map<NodeTuple, double>& mu, const std::vector<NodeTuple>& terminals, double beta) {
              return residual_norm_sq(measure(mu), subtree_from(terminals), beta);
          },
          py::arg("mu"), py::arg("terminals"), py::arg("beta"));

    m.def("essential_subtree", [](const std::map<NodeTuple, double>& mu, int n) {
        const EssentialResult r = essential_subtree(measure(mu), n);
        py::dict out;
        out["terminals"] = tuples(r.upsilon.terminals());
        out["boundary"] = tuples(r.boundary);
        out["size"] = r.upsilon.size();
        out["terminal_level_sum"] = terminal_level_sum(r.upsilon);
        return out;
    }, py::arg("mu"), py::arg("n"));
    m.def("essential_approximation_error", [](const std::map<NodeTuple, double>& mu, int n, double beta) {
        return essential_approximation_error(measure(mu), n, beta);
    }, py::arg("mu"), py::arg("n"), py::arg("beta") = 2.0);
    m.def("count_admissible", &count_admissible, py::arg("n"));
    m.def("admissible_count_bound", &admissible_count_bound, py::arg("n"));
    m.def("enumerate_admissible_subtrees", [](int n) {
        std::vector<std::vector<NodeTuple>> out;
        for (const Subtree& s : enumerate_admissible_subtrees(n)) out.push_back(tuples(s.terminals()));
        return out;
    }, py::arg("n"), "Terminal sets of all admissible subtrees");

    m.def("random_tree_measure", [](std::uint64_t seed, std::uint64_t stream, int max_depth, int atoms) {
        CounterRng rng(seed, stream);
        return atoms_of(random_tree_measure(rng, max_depth, atoms));
    }, py::arg("seed"), py::arg("stream"), py::arg("max_depth"), py::arg("atoms"));

    // ---- covering
    m.def("greedy_radius_profile", [](double beta, int depth, std::size_t kmax, unsigned threads) {
        const PointCloud cloud = branch_indicator_cloud(beta, depth);
        py::gil_scoped_release release;
        return greedy_radius_profile(cloud, kmax, threads);
    }, py::arg("beta"), py::arg("depth"), py::arg("kmax"), py::arg("threads") = 1,
          "Greedy covering radius of {V*delta_t : |t| <= depth} with 1..kmax centres");
    m.def("dn_net_bound", &dn_net_bound, py::arg("n"), py::arg("beta"), py::arg("depth"));
    m.def("packing_separation", [](int n, double beta) { return packing_family(n, beta).separation; },
          py::arg("n"), py::arg("beta"));
    m.def("reference_rate", [](double beta, double n, const std::string& kind) {
        return reference_rate(beta, n, parse_rate_kind(kind));
    }, py::arg("beta"), py::arg("n"), py::arg("kind") = "upper");
    m.def("fit_exponent", [](const std::vector<double>& ns, const std::vector<double>& values) {
        const ScalingFit f = fit_exponent(ns, values);
        return std::pair{f.slope, f.intercept};
    }, py::arg("ns"), py::arg("values"), "(slope, intercept) of ln(value) against ln(n)");

    // ---- Volterra kernel
    m.def("kernel_eval", [](double t, double s, double r, double beta) {
        return kernel_eval(t, s, {r, beta});
    }, py::arg("t"), py::arg("s"), py::arg("r") = 0.1, py::arg("beta") = 1.0);
    m.def("kernel_norm_sq", [](double t, double r, double beta) { return kernel_norm_sq(t, {r, beta}); },
          py::arg("t"), py::arg("r") = 0.1, py::arg("beta") = 1.0);
    m.def("kernel_inner", [](double t1, double t2, double r, double beta, double abs_tol) {
        return kernel_inner(t1, t2, {r, beta}, {abs_tol, 4000});
    }, py::arg("t1"), py::arg("t2"), py::arg("r") = 0.1, py::arg("beta") = 1.0, py::arg("abs_tol") = 1e-10);
    m.def("modulus_check", [](double t, double u, double abs_tol) {
        const ModulusCheck c = modulus_check(t, u, KernelConfig{}, {abs_tol, 4000});
        return std::pair{c.lhs, c.rhs};
    }, py::arg("t"), py::arg("u"), py::arg("abs_tol") = 1e-10, "(||K_{t+u} - K_t||, 2|ln u|^{-1/2})");
    m.def("negative_dependence", [](double a, double b, double c, double d, double abs_tol) {
        return negative_dependence(a, b, c, d, KernelConfig{}, {abs_tol, 4000});
    }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("abs_tol") = 1e-10);

    m.def("essential_partition", [](const std::vector<std::pair<double, double>>& atoms, int n, double r) {
        const DyadicPartition p = essential_partition(interval_measure(atoms), n, {r, 1.0});
        std::vector<std::pair<int, std::uint64_t>> out;
        for (const auto& I : p.intervals()) out.emplace_back(I.level, I.index);
        return out;
    }, py::arg("atoms"), py::arg("n"), py::arg("r") = 0.1,
          "Binary intervals (level, index) of the n-essential partition of an atomic measure [(x, mass), ...]");
    m.def("approximation_error", [](const std::vector<std::pair<double, double>>& atoms, int n, double abs_tol) {
        KernelGram gram(KernelConfig{}, {abs_tol, 4000});
        const ApproximationError e = approximation_error(interval_measure(atoms), n, gram);
        py::dict out;
        out["err"] = e.err;
        out["bound"] = e.bound;
        out["diag_plus"] = e.diag_plus;
        out["diag_minus"] = e.diag_minus;
        out["diag_bound"] = e.diag_bound;
        out["partition_size"] = e.partition_size;
        return out;
    }, py::arg("atoms"), py::arg("n"), py::arg("abs_tol") = 1e-10);

    // ---- experiments
    m.def("run_experiment", [](const std::string& kind, std::vector<int> n_values, int trials, std::uint64_t seed,
                               std::optional<double> beta, const std::string& out, unsigned threads) {
        ExperimentSpec spec = default_spec(parse_experiment_kind(kind));
        if (!n_values.empty()) spec.n_values = std::move(n_values);
        if (trials > 0) spec.trials = trials;
        if (beta) spec.beta = *beta;
        spec.seed = seed;
        spec.out = out;
        spec.threads = threads;
        std::string text;
        {
            py::gil_scoped_release release;
            text = report_json(run(spec));
        }
        return json_to_python(text);
    }, py::arg("kind"), py::arg("n_values") = std::vector<int>{}, py::arg("trials") = 0, py::arg("seed") = 42,
          py::arg("beta") = py::none(), py::arg("out") = "", py::arg("threads") = 0,
          "Runs a seeded experiment and returns the report as a dict");

    py::class_<CounterRng>(m, "CounterRng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream"))
        .def("next_u64", &CounterRng::next_u64)
        .def("uniform", py::overload_cast<>(&CounterRng::uniform))
        .def("below", &CounterRng::below, py::arg("bound"))
        .def_property_readonly("counter", &CounterRng::counter);
}
