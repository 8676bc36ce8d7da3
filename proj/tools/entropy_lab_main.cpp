// entropy-lab <kind> --beta F --n A,B,C --trials N --seed S --tol T --out PATH

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entropy/harness.hpp"

namespace {

// "3,5,8" or "3..10" or a mix ("0..4,8").
std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(std::stoi(item));
            continue;
        }
        const int lo = std::stoi(item.substr(0, dots));
        const int hi = std::stoi(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("empty range " + item);
        for (int n = lo; n <= hi; ++n) out.push_back(n);
    }
    if (out.empty()) throw std::invalid_argument("--n needs at least one value");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded entropy-number experiments"};
    std::string kind_name;
    std::optional<double> beta;
    std::string n_text;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> quad_tol;
    std::optional<int> depth;
    std::optional<int> max_atoms;
    unsigned threads = 0;
    std::string out = "entropy-lab-out";
    bool quiet = false;

    app.add_option("kind", kind_name,
                   "tree-approx | tree-scaling | subtree-count | volterra-check | volterra-approx | nets")
        ->required();
    app.add_option("--beta", beta, "weight / kernel exponent");
    app.add_option("--n", n_text, "comma-separated n values, ranges as a..b");
    app.add_option("--trials", trials, "trials per n");
    app.add_option("--seed", seed, "64-bit seed");
    app.add_option("--tol", tol, "slack on exact inequalities");
    app.add_option("--quad-tol", quad_tol, "adaptive quadrature absolute tolerance");
    app.add_option("--depth", depth, "tree depth for tree-scaling and nets");
    app.add_option("--max-atoms", max_atoms, "atoms per random measure (upper limit)");
    app.add_option("--threads", threads, "worker threads (0 = all; ENTROPY_LAB_THREADS caps)");
    app.add_option("--out", out, "output directory for report.json and table.csv");
    app.add_flag("-q,--quiet", quiet, "no summary on stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        entropy::ExperimentSpec spec = entropy::default_spec(entropy::parse_experiment_kind(kind_name));
        if (beta) spec.beta = *beta;
        if (!n_text.empty()) spec.n_values = parse_n_list(n_text);
        if (trials) spec.trials = *trials;
        if (seed) spec.seed = *seed;
        if (tol) spec.tol.inequality = *tol;
        if (quad_tol) spec.tol.quadrature = *quad_tol;
        if (depth) spec.depth = *depth;
        if (max_atoms) spec.max_atoms = *max_atoms;
        spec.threads = threads;
        spec.out = out;

        const entropy::ExperimentReport report = entropy::run(spec);
        if (!quiet) {
            std::printf("%s: %zu records, %zu passed, %zu failed, %zu/%zu quadrature failures\n", kind_name.c_str(),
                        report.records.size(), report.passed, report.failed, report.quadrature_failures,
                        report.quadrature_trials);
            std::printf("max value/bound %.6g", report.max_ratio);
            if (report.slope) std::printf(", fitted slope %.4f", *report.slope);
            std::printf(", %.2f s -> %s\n", report.wall_time, out.c_str());
        }
        return report.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "entropy-lab: %s\n", e.what());
        return 1;
    }
}
