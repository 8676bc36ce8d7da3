#include "entropy/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "entropy/essential_trees.hpp"
#include "parallel.hpp"

namespace entropy {

namespace {

constexpr std::array<std::pair<ExperimentKind, const char*>, 6> kKindNames = {{
    {ExperimentKind::tree_approx, "tree-approx"},
    {ExperimentKind::tree_scaling, "tree-scaling"},
    {ExperimentKind::subtree_count, "subtree-count"},
    {ExperimentKind::volterra_check, "volterra-check"},
    {ExperimentKind::volterra_approx, "volterra-approx"},
    {ExperimentKind::nets, "nets"},
}};

constexpr int kMaxVolterraAtoms = 12;
constexpr int kDefaultScalingDepth = 14;

TrialRecord make_record(std::string check, int n, int trial, double value, double bound, double slack) {
    return {std::move(check), n, trial, value, bound, value <= bound + slack, false};
}

TrialRecord error_record(int n, int trial, const std::exception& e) {
    std::fprintf(stderr, "n=%d trial=%d: %s\n", n, trial, e.what());
    return {"error", n, trial, std::numeric_limits<double>::quiet_NaN(), 0.0, false, false};
}

TrialRecord quadrature_record(int n, int trial, const QuadratureError& e) {
    return {"quadrature", n, trial, e.estimate(), e.error(), false, true};
}

// Jobs that can raise QuadratureError return this.
struct JobResult {
    std::vector<TrialRecord> records;
    bool uses_quadrature = false;
};

template <class Job>
std::vector<JobResult> run_jobs(std::size_t count, unsigned threads, Job&& job) {
    std::vector<JobResult> out(count);
    detail::parallel_indices(count, threads, [&](std::size_t i) { out[i] = job(i); });
    return out;
}

// ---- tree-approx -----------------------------------------------------------

JobResult tree_approx_trial(const ExperimentSpec& spec, int n, int trial) {
    JobResult r;
    try {
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
        const int depth = std::min(2 * n, kMaxLevel);
        const int atoms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_atoms)));
        const TreeMeasure mu = random_tree_measure(rng, depth, atoms);
        const EssentialResult es = essential_subtree(mu, n);
        const double eps = spec.tol.inequality;
        r.records.push_back(make_record("terminal-level-sum", n, trial,
                                        static_cast<double>(terminal_level_sum(es.upsilon)), n, 0.0));
        r.records.push_back(make_record("subtree-size", n, trial, static_cast<double>(es.upsilon.size()), n + 1.0,
                                        0.0));
        r.records.push_back(make_record("residual", n, trial, residual_norm_sq(mu, es.upsilon, spec.beta),
                                        1.0 / n, eps));
    } catch (const std::exception& e) {
        r.records.push_back(error_record(n, trial, e));
    }
    return r;
}

// ---- tree-scaling ----------------------------------------------------------

std::vector<TrialRecord> tree_scaling(const ExperimentSpec& spec, unsigned threads, std::optional<double>& slope) {
    const int depth = spec.depth > 0 ? spec.depth : kDefaultScalingDepth;
    const PointCloud cloud = branch_indicator_cloud(spec.beta, depth);
    const int n_max = *std::max_element(spec.n_values.begin(), spec.n_values.end());
    const std::size_t kmax = std::min<std::size_t>(std::size_t{1} << (n_max - 1), cloud.size());
    const std::vector<double> radii = greedy_radius_profile(cloud, kmax, threads);

    std::vector<TrialRecord> records;
    std::vector<double> ns;
    std::vector<double> values;
    for (const int n : spec.n_values) {
        const std::size_t k = std::min<std::size_t>(std::size_t{1} << (n - 1), cloud.size());
        const double radius = radii[k - 1];
        const double lower = dn_net_bound(n - 1, spec.beta, depth);
        records.push_back(make_record("greedy-radius", n, 0, radius, 2.0 * lower, spec.tol.inequality));
        records.push_back(make_record("optimal-lower", n, 0, lower, radius, spec.tol.inequality));
        if (radius > 0.0) {
            ns.push_back(n);
            values.push_back(radius);
        }
    }
    if (ns.size() >= 3) slope = fit_exponent(ns, values).slope;
    return records;
}

// ---- subtree-count ---------------------------------------------------------

std::vector<TrialRecord> subtree_count(const ExperimentSpec& spec) {
    std::vector<TrialRecord> records;
    for (const int n : spec.n_values) {
        try {
            std::uint64_t count = 0;
            for (const auto& profile : admissible_profiles(n)) count += count_for_profile(profile);
            const double c = static_cast<double>(count);
            records.push_back(make_record("count", n, 0, c, admissible_count_bound(n), 0.0));
            if (n <= 10) {
                const double enumerated = static_cast<double>(enumerate_admissible_subtrees(n).size());
                TrialRecord rec = make_record("enumeration", n, 0, enumerated, c, 0.0);
                rec.pass = enumerated == c;
                records.push_back(rec);
            }
        } catch (const std::exception& e) {
            records.push_back(error_record(n, 0, e));
        }
    }
    return records;
}

// ---- volterra-check --------------------------------------------------------

std::array<double, 4> random_quadruple(const ExperimentSpec& spec, int trial, double r) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
    std::array<double, 4> q{};
    for (double& x : q) x = rng.uniform(0.0, r);
    std::sort(q.begin(), q.end());
    return q;
}

std::vector<JobResult> volterra_check(const ExperimentSpec& spec, unsigned threads) {
    const KernelConfig cfg{0.1, spec.beta};
    const QuadratureConfig quad{spec.tol.quadrature, 4000};
    const Tolerances& tol = spec.tol;

    constexpr int kNormPoints = 20;
    constexpr int kModulusT = 10;
    constexpr int kModulusU = 10;
    constexpr int kDegenerate = 20;
    const int negdep = spec.trials;
    const int degenerate = std::min(spec.trials, kDegenerate);
    const std::size_t jobs = 1 + kNormPoints + kModulusT * kModulusU + static_cast<std::size_t>(negdep + degenerate);

    return run_jobs(jobs, threads, [&](std::size_t job) -> JobResult {
        JobResult r;
        r.uses_quadrature = job > 0;
        auto idx = static_cast<int>(job);
        try {
            if (idx == 0) {
                const KernelShape shape = check_kernel_shape(cfg);
                TrialRecord rec = make_record("kernel-shape", 0, 0, shape.min_second_difference, 0.0, 0.0);
                rec.pass = shape.decreasing && shape.convex;
                r.records.push_back(rec);
                return r;
            }
            idx -= 1;
            if (idx < kNormPoints) {
                const double lo = std::log(1e-6);
                const double hi = std::log(cfg.r);
                const double t = std::exp(lo + (hi - lo) * (idx + 1) / kNormPoints);
                const NormCheck c = kernel_norm_sq_checked(std::min(t, cfg.r), cfg, quad);
                r.records.push_back(
                    make_record("norm-oracle", 0, idx, std::abs(c.quadrature - c.closed_form), tol.oracle, 0.0));
                return r;
            }
            idx -= kNormPoints;
            if (idx < kModulusT * kModulusU) {
                const int i = idx / kModulusU;
                const int j = idx % kModulusU;
                const double t = cfg.r * i / kModulusT;
                const double span = cfg.r - t;
                const double u = span * std::pow(10.0, -8.0 + 8.0 * j / (kModulusU - 1));
                const ModulusCheck m = modulus_check(t, std::min(u, span), cfg, quad);
                r.records.push_back(make_record("modulus", 0, idx, m.lhs, m.rhs, tol.oracle));
                return r;
            }
            idx -= kModulusT * kModulusU;
            if (idx < negdep) {
                const auto [a, b, c, d] = random_quadruple(spec, idx, cfg.r);
                r.records.push_back(
                    make_record("negative-dependence", 0, idx, negative_dependence(a, b, c, d, cfg, quad), 0.0,
                                tol.oracle));
                return r;
            }
            idx -= negdep;
            const auto [a, b, c, d] = random_quadruple(spec, idx, cfg.r);
            r.records.push_back(make_record("negdep-a-eq-b", 0, idx,
                                            std::abs(negative_dependence(a, a, c, d, cfg, quad)), 0.0,
                                            tol.degenerate));
            r.records.push_back(make_record("negdep-c-eq-d", 0, idx,
                                            std::abs(negative_dependence(a, b, c, c, cfg, quad)), 0.0,
                                            tol.degenerate));
        } catch (const QuadratureError& e) {
            r.records.push_back(quadrature_record(0, idx, e));
        } catch (const std::exception& e) {
            r.records.push_back(error_record(0, idx, e));
        }
        return r;
    });
}

// ---- volterra-approx -------------------------------------------------------

JobResult volterra_approx_trial(const ExperimentSpec& spec, int n, int trial) {
    JobResult r;
    r.uses_quadrature = true;
    const KernelConfig cfg{0.1, spec.beta};
    const Tolerances& tol = spec.tol;
    try {
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
        const int cap = std::min(spec.max_atoms, kMaxVolterraAtoms);
        const int atoms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cap)));
        const IntervalMeasure mu = random_interval_measure(rng, cfg.r, atoms);
        const DyadicPartition part = essential_partition(mu, n, cfg);
        const double cap_size = 2.0 * (n + 1);
        r.records.push_back(make_record("partition-size", n, trial, static_cast<double>(part.size()), cap_size, 0.0));
        r.records.push_back(make_record("terminal-level-sum", n, trial,
                                        static_cast<double>(part.terminal_level_sum()), n, 0.0));

        KernelGram gram(cfg, {tol.quadrature, 4000});
        const ApproximationError ae = approximation_error(mu, part, n, gram, tol.approximation);
        r.records.push_back(make_record("approx-error", n, trial, ae.err, ae.bound, tol.approximation));
        r.records.push_back(make_record("diag-plus", n, trial, ae.diag_plus, ae.diag_bound, tol.approximation));
        r.records.push_back(make_record("diag-minus", n, trial, ae.diag_minus, ae.diag_bound, tol.approximation));

        const DyadicPartition aux = auxiliary_partition(part, n);
        const SplitNormReport split = split_norm_bound(part, aux, n, gram);
        r.records.push_back(make_record("rank", n, trial, static_cast<double>(split.rank_count), cap_size, 0.0));
        r.records.push_back(make_record("split-norm", n, trial, split_difference_norm(mu, part, aux, gram),
                                        split.bound, tol.approximation));
    } catch (const QuadratureError& e) {
        r.records.push_back(quadrature_record(n, trial, e));
    } catch (const std::exception& e) {
        r.records.push_back(error_record(n, trial, e));
    }
    return r;
}

// ---- nets ------------------------------------------------------------------

std::vector<TrialRecord> nets(const ExperimentSpec& spec) {
    std::vector<TrialRecord> records;
    const double eps = spec.tol.inequality;
    for (const int n : spec.n_values) {
        try {
            const PackingFamily fam = packing_family(n, spec.beta);
            const double expected = std::sqrt(2.0 * weight_range_sum(n + 1, 2 * n, spec.beta));
            const std::size_t m = std::min<std::size_t>(fam.images.size(), 512);
            double deviation = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j) {
                    deviation = std::max(deviation,
                                         std::abs(distance(fam.images.points[i], fam.images.points[j]) - expected));
                }
            }
            records.push_back(make_record("packing-deviation", n, 0, deviation, eps, 0.0));

            const int depth = spec.depth > 0 ? std::max(spec.depth, n) : std::min(2 * n, kMaxLevel);
            double worst = 0.0;
            for (int l = 0; l <= depth; ++l) worst = std::max(worst, dn_net_distance(NodeId{l, 0}, n, spec.beta));
            records.push_back(make_record("dn-net", n, 0, worst, dn_net_bound(n, spec.beta, depth), eps));

            const OddGridNet grid(n, default_split_depth(n), spec.beta);
            for (int trial = 0; trial < spec.trials; ++trial) {
                CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
                std::vector<WeightedVector::Entry> entries;
                for (const NodeId& t : grid.delta()) entries.emplace_back(t, rng.uniform(-1.0, 1.0));
                const WeightedVector x(spec.beta, std::move(entries));
                records.push_back(make_record("odd-grid", n, trial, distance_sq(x, grid.nearest(x)),
                                              grid.error_sq_bound(), eps));
            }

            if (n <= 4 && spec.beta == 2.0) {
                const CombinedNetOutcome c = combined_net_experiment(n, spec.trials, spec.seed, spec.max_atoms);
                records.push_back(
                    make_record("combined-net-size", n, 0, static_cast<double>(c.net_size), c.size_bound, 0.0));
                const double base = c.s1 + 1.0 / std::sqrt(static_cast<double>(n)) + 2.0 * c.delta;
                for (std::size_t i = 0; i < c.distances.size(); ++i) {
                    const int trial = static_cast<int>(i);
                    records.push_back(make_record("combined-net", n, trial, c.distances[i], base, 0.0));
                    records.push_back(make_record("combined-net-s2", n, trial, c.distances[i],
                                                  c.s1 + c.s2[i] + 2.0 * c.delta, 0.0));
                }
            }
        } catch (const std::exception& e) {
            records.push_back(error_record(n, 0, e));
        }
    }
    return records;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (const auto& [k, s] : kKindNames) {
        if (name == s) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

void ExperimentSpec::validate() const {
    if (n_values.empty()) throw std::invalid_argument("n_values must not be empty");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (max_atoms < 1) throw std::invalid_argument("max_atoms must be >= 1");
    if (depth < 0 || depth > 24) throw std::invalid_argument("depth must lie in [0, 24]");
    const int lo = *std::min_element(n_values.begin(), n_values.end());
    const int hi = *std::max_element(n_values.begin(), n_values.end());
    switch (kind) {
        case ExperimentKind::tree_approx:
            if (lo < 1) throw std::invalid_argument("tree-approx needs n >= 1");
            if (!(beta >= 2.0)) throw std::invalid_argument("tree-approx bound 1/n needs beta >= 2");
            break;
        case ExperimentKind::tree_scaling: {
            const int d = depth > 0 ? depth : kDefaultScalingDepth;
            if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
            if (lo < 1 || hi - 1 > d) throw std::invalid_argument("tree-scaling needs 1 <= n <= depth + 1");
            break;
        }
        case ExperimentKind::subtree_count:
            if (lo < 0 || hi > 40) throw std::invalid_argument("subtree-count needs 0 <= n <= 40");
            break;
        case ExperimentKind::volterra_check:
        case ExperimentKind::volterra_approx:
            if (beta != 1.0) throw std::invalid_argument("Volterra experiments use the critical beta = 1");
            if (kind == ExperimentKind::volterra_approx && lo < 1) {
                throw std::invalid_argument("volterra-approx needs n >= 1");
            }
            break;
        case ExperimentKind::nets:
            if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
            if (lo < 1 || hi > kMaxPackingN) throw std::invalid_argument("nets needs 1 <= n <= 20");
            break;
    }
    if (!(tol.quadrature > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
}

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
        case ExperimentKind::tree_approx:
            s.beta = 2.0;
            s.n_values = {8, 16, 32, 64};
            s.trials = 1000;
            break;
        case ExperimentKind::tree_scaling:
            s.beta = 1.5;
            s.n_values = {3, 4, 5, 6, 7, 8, 9, 10};
            s.trials = 1;
            s.depth = kDefaultScalingDepth;
            break;
        case ExperimentKind::subtree_count:
            s.beta = 2.0;
            s.n_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            s.trials = 1;
            break;
        case ExperimentKind::volterra_check:
            s.beta = 1.0;
            s.n_values = {0};
            s.trials = 200;
            break;
        case ExperimentKind::volterra_approx:
            s.beta = 1.0;
            s.n_values = {8, 16, 32};
            s.trials = 200;
            s.tol.quadrature = 1e-8;
            break;
        case ExperimentKind::nets:
            s.beta = 2.0;
            s.n_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            s.trials = 100;
            break;
    }
    return s;
}

int ExperimentReport::exit_code() const {
    if (quadrature_trials > 0 && quadrature_failures == quadrature_trials) return 3;
    return failed > 0 ? 2 : 0;
}

TreeMeasure random_tree_measure(CounterRng& rng, int max_depth, int atoms) {
    if (atoms < 1) throw std::invalid_argument("random_tree_measure needs atoms >= 1");
    if (max_depth < 0) throw std::invalid_argument("random_tree_measure needs max_depth >= 0");
    if (max_depth > kMaxLevel) {
        throw DepthLimitError("random_tree_measure depth " + std::to_string(max_depth) + " exceeds level cap " +
                              std::to_string(kMaxLevel));
    }
    for (;;) {
        TreeMeasure mu;
        for (int a = 0; a < atoms; ++a) {
            const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_depth) + 1));
            const std::uint64_t index = rng.below(std::uint64_t{1} << level);
            double m = 0.0;
            while (m == 0.0) m = rng.uniform(-1.0, 1.0);
            mu.add(NodeId{level, index}, m);
        }
        const double total = mu.total_variation();
        if (total > 0.0) return (1.0 / total) * std::move(mu);
    }
}

IntervalMeasure random_interval_measure(CounterRng& rng, double r, int atoms) {
    if (atoms < 1) throw std::invalid_argument("random_interval_measure needs atoms >= 1");
    if (!(r > 0.0)) throw std::invalid_argument("random_interval_measure needs r > 0");
    for (;;) {
        std::vector<IntervalMeasure::Atom> list;
        double total = 0.0;
        for (int a = 0; a < atoms; ++a) {
            double x = 0.0;
            if (a % 2 == 0) {
                x = r * std::exp(std::log(1e-6) * rng.uniform());
            } else {
                x = r * (1.0 - rng.uniform());  // (0, r]
            }
            double m = 0.0;
            while (m == 0.0) m = rng.uniform(-1.0, 1.0);
            list.emplace_back(x, m);
        }
        IntervalMeasure raw(std::move(list));
        total = raw.total_variation();
        if (total <= 0.0) continue;
        std::vector<IntervalMeasure::Atom> scaled;
        for (const auto& [x, m] : raw.atoms()) scaled.emplace_back(x, m / total);
        return IntervalMeasure(std::move(scaled));
    }
}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested > 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ENTROPY_LAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

CombinedNetOutcome combined_net_experiment(int n, int trials, std::uint64_t seed, int max_atoms) {
    if (n < 1) throw std::invalid_argument("combined net needs n >= 1");
    constexpr double beta = 2.0;
    CombinedNetOutcome out;
    const std::vector<Subtree> family = enumerate_admissible_subtrees(n);

    std::vector<TreeMeasure> tests;
    tests.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const int atoms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_atoms)));
        tests.push_back(random_tree_measure(rng, std::min(2 * n, kMaxLevel), atoms));
    }

    const std::size_t k = std::size_t{1} << (n - 1);
    std::vector<MemberNet> members;
    members.reserve(family.size());
    for (const Subtree& upsilon : family) {
        PointCloud cloud;
        for (const TreeMeasure& mu : tests) cloud.points.push_back(approximator_apply(mu, upsilon, beta));
        for (const NodeId& u : upsilon.nodes()) {
            const WeightedVector v = restricted_vstar(TreeMeasure::delta(u), upsilon, beta);
            cloud.points.push_back(v);
            cloud.points.push_back(-1.0 * v);
        }
        const CoverReport cover = greedy_cover(cloud, std::min(k, cloud.size()));
        MemberNet m;
        m.radius = cover.radius;
        for (std::size_t c : cover.centers) m.centers.push_back(cloud.points[c]);
        members.push_back(std::move(m));
    }
    const CombinedNet net = combined_net(members);
    out.family_size = family.size();
    out.net_size = net.points.size();
    out.size_bound = net.size_bound(n);
    out.s1 = net.s1;

    for (const TreeMeasure& mu : tests) {
        out.distances.push_back(distance_to_net(net, apply_vstar(mu, beta)));
        double best = std::numeric_limits<double>::infinity();
        for (const Subtree& upsilon : family) best = std::min(best, residual_norm_sq(mu, upsilon, beta));
        out.s2.push_back(std::sqrt(best));
    }
    return out;
}

ExperimentReport run(const ExperimentSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(spec.threads);

    ExperimentReport report;
    report.spec = spec;
    std::vector<JobResult> jobs;
    auto per_trial = [&](auto&& trial_fn) {
        const std::size_t per_n = static_cast<std::size_t>(spec.trials);
        jobs = run_jobs(spec.n_values.size() * per_n, threads, [&](std::size_t j) {
            return trial_fn(spec, spec.n_values[j / per_n], static_cast<int>(j % per_n));
        });
    };
    auto single = [&](std::vector<TrialRecord> records) { jobs.push_back({std::move(records), false}); };

    switch (spec.kind) {
        case ExperimentKind::tree_approx:
            per_trial(tree_approx_trial);
            break;
        case ExperimentKind::tree_scaling:
            single(tree_scaling(spec, threads, report.slope));
            break;
        case ExperimentKind::subtree_count:
            single(subtree_count(spec));
            break;
        case ExperimentKind::volterra_check:
            jobs = volterra_check(spec, threads);
            break;
        case ExperimentKind::volterra_approx:
            per_trial(volterra_approx_trial);
            break;
        case ExperimentKind::nets:
            single(nets(spec));
            break;
    }

    for (auto& job : jobs) {
        bool quad_failed = false;
        for (auto& rec : job.records) {
            quad_failed = quad_failed || rec.quadrature_failure;
            if (rec.quadrature_failure) {
                // counted separately below
            } else if (rec.pass) {
                ++report.passed;
            } else {
                ++report.failed;
            }
            if (std::isfinite(rec.value) && std::isfinite(rec.bound) && rec.bound > 0.0) {
                report.max_ratio = std::max(report.max_ratio, rec.value / rec.bound);
            }
            report.records.push_back(std::move(rec));
        }
        if (job.uses_quadrature) {
            ++report.quadrature_trials;
            if (quad_failed) ++report.quadrature_failures;
        }
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!spec.out.empty()) write_report(report, spec.out);
    return report;
}

std::string report_json(const ExperimentReport& report) {
    using ojson = nlohmann::ordered_json;
    const ExperimentSpec& s = report.spec;
    ojson spec = {
        {"kind", to_string(s.kind)},
        {"beta", s.beta},
        {"n_values", s.n_values},
        {"trials", s.trials},
        {"seed", s.seed},
        {"tolerances",
         {{"inequality", s.tol.inequality},
          {"quadrature", s.tol.quadrature},
          {"oracle", s.tol.oracle},
          {"degenerate", s.tol.degenerate},
          {"approximation", s.tol.approximation}}},
        {"depth", s.depth},
        {"max_atoms", s.max_atoms},
        {"rng", "splitmix64-counter"},
    };
    ojson records = ojson::array();
    for (const auto& r : report.records) {
        records.push_back({{"check", r.check},
                           {"n", r.n},
                           {"trial", r.trial},
                           {"value", number_or_null(r.value)},
                           {"bound", number_or_null(r.bound)},
                           {"pass", r.pass},
                           {"quadrature_failure", r.quadrature_failure}});
    }
    ojson aggregate = {
        {"records", report.records.size()},
        {"passed", report.passed},
        {"failed", report.failed},
        {"quadrature_failures", report.quadrature_failures},
        {"quadrature_trials", report.quadrature_trials},
        {"max_ratio", report.max_ratio},
        {"slope", report.slope ? ojson(*report.slope) : ojson(nullptr)},
        {"exit_code", report.exit_code()},
    };
    ojson doc = {{"spec", std::move(spec)},
                 {"records", std::move(records)},
                 {"aggregate", std::move(aggregate)},
                 {"wall_time", report.wall_time}};
    return doc.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& report) {
    std::string out = "kind,n,trial,value,bound,pass\n";
    for (const auto& r : report.records) {
        out += r.check + ',' + std::to_string(r.n) + ',' + std::to_string(r.trial) + ',' + format_double(r.value) +
               ',' + format_double(r.bound) + ',' + (r.pass ? "1" : "0") + '\n';
    }
    return out;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
    const auto write = [](const fs::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        f << text;
        if (!f) throw std::runtime_error("write failed for " + path.string());
    };
    write(fs::path(dir) / "report.json", report_json(report));
    write(fs::path(dir) / "table.csv", report_csv(report));
}

}  // namespace entropy
