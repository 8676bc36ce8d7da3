#include "entropy/entropy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace entropy {

namespace {

void require_nonempty(const PointCloud& cloud) {
    if (cloud.points.empty()) throw std::invalid_argument("point cloud is empty");
}

bool entries_less(const WeightedVector& a, const WeightedVector& b) {
    const auto ea = a.entries();
    const auto eb = b.entries();
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

// Farthest-point traversal; calls observe(j, radius_sq) after j + 1 centers.
template <class Observe>
std::vector<std::size_t> farthest_point_traversal(const PointCloud& cloud, std::size_t kmax,
                                                  unsigned threads, Observe&& observe) {
    require_nonempty(cloud);
    const std::size_t n = cloud.size();
    std::vector<double> nearest_sq(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> centers;
    std::size_t next = 0;
    for (std::size_t j = 0; j < kmax; ++j) {
        if (j >= n) {
            observe(j, 0.0);
            continue;
        }
        centers.push_back(next);
        const WeightedVector& c = cloud.points[next];
        detail::parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                nearest_sq[i] = std::min(nearest_sq[i], distance_sq(cloud.points[i], c));
            }
        });
        // Serial argmax keeps the lowest index on ties.
        double worst = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest_sq[i] > worst) {
                worst = nearest_sq[i];
                next = i;
            }
        }
        observe(j, worst);
    }
    return centers;
}

}  // namespace

CoverReport greedy_cover(const PointCloud& cloud, std::size_t k, unsigned threads) {
    if (k == 0) throw std::invalid_argument("greedy_cover needs k >= 1");
    double radius_sq = 0.0;
    auto centers = farthest_point_traversal(cloud, k, threads,
                                            [&](std::size_t, double r) { radius_sq = r; });
    return {k, std::sqrt(radius_sq), std::move(centers), CoverMethod::greedy};
}

std::vector<double> greedy_radius_profile(const PointCloud& cloud, std::size_t kmax,
                                          unsigned threads) {
    std::vector<double> radii(kmax, 0.0);
    farthest_point_traversal(cloud, kmax, threads,
                             [&](std::size_t j, double r) { radii[j] = std::sqrt(r); });
    return radii;
}

double covering_radius(const PointCloud& cloud, const std::vector<std::size_t>& centers) {
    require_nonempty(cloud);
    if (centers.empty()) throw std::invalid_argument("covering_radius needs a center");
    double worst = 0.0;
    for (const auto& x : cloud.points) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c : centers) best = std::min(best, distance_sq(x, cloud.points.at(c)));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

CoverReport exhaustive_cover(const PointCloud& cloud, std::size_t k) {
    require_nonempty(cloud);
    if (k == 0) throw std::invalid_argument("exhaustive_cover needs k >= 1");
    const std::size_t n = cloud.size();
    if (k >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return {k, 0.0, std::move(all), CoverMethod::exhaustive};
    }
    double subsets = 1.0;
    for (std::size_t i = 0; i < k; ++i) subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (subsets > 2e6) throw BudgetError("exhaustive cover over more than 2e6 center sets");

    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = distance_sq(cloud.points[i], cloud.points[j]);
        }
    }
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<std::size_t> best_pick = pick;
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i) {
            double near = std::numeric_limits<double>::infinity();
            for (std::size_t c : pick) near = std::min(near, d[i * n + c]);
            worst = std::max(worst, near);
        }
        if (worst < best) {
            best = worst;
            best_pick = pick;
        }
        // Next k-combination in lexicographic order.
        std::size_t pos = k;
        while (pos > 0 && pick[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++pick[pos - 1];
        for (std::size_t j = pos; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return {k, std::sqrt(best), std::move(best_pick), CoverMethod::exhaustive};
}

PointCloud branch_indicator_cloud(double beta, int depth) {
    if (depth < 0 || depth > 24) throw BudgetError("branch cloud depth must be in [0, 24]");
    PointCloud cloud;
    for (int l = 0; l <= depth; ++l) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) {
            const NodeId t{l, i};
            cloud.points.push_back(apply_vstar(TreeMeasure::delta(t), beta, l));
            cloud.labels.push_back(std::to_string(l) + ":" + std::to_string(i));
        }
    }
    return cloud;
}

double weight_range_sum(long long from, long long to, double beta) {
    const Weight w(beta);
    from = std::max(from, 0LL);
    double s = 0.0;
    for (long long l = to; l >= from; --l) s += std::pow(1.0 + static_cast<double>(l), -w.beta());
    return s;
}

double weight_tail_sum(long long from, double beta) {
    const Weight w(beta);
    from = std::max(from, 0LL);
    // Direct part over levels [from, cut), then Σ_{k≥K} k^-β with K = cut + 1
    // by Euler–Maclaurin: K^{1-β}/(β-1) + K^{-β}/2 + β K^{-β-1}/12 − ….
    const long long cut = from + 4096;
    const double K = static_cast<double>(cut + 1);
    const double b = w.beta();
    const double tail = std::pow(K, 1.0 - b) / (b - 1.0) + 0.5 * std::pow(K, -b) +
                        b * std::pow(K, -b - 1.0) / 12.0 -
                        b * (b + 1.0) * (b + 2.0) * std::pow(K, -b - 3.0) / 720.0;
    return tail + weight_range_sum(from, cut - 1, b);
}

double dn_net_bound(int n, double beta, int depth) {
    if (n < 0) throw std::invalid_argument("dn_net_bound needs n >= 0");
    if (depth < n) throw std::invalid_argument("dn_net_bound needs depth >= n");
    return std::sqrt(weight_range_sum(n + 1, depth, beta));
}

DnNet dn_net(int n, double beta, int depth) {
    return {branch_indicator_cloud(beta, n), dn_net_bound(n, beta, depth)};
}

double dn_net_distance(const NodeId& t, int n, double beta) {
    if (t.level <= n) return 0.0;
    return std::sqrt(weight_range_sum(n + 1, t.level, beta));
}

PackingFamily packing_family(int n, double beta) {
    if (n < 1) throw std::invalid_argument("packing_family needs n >= 1");
    if (n > kMaxPackingN) throw BudgetError("packing family limited to n <= 20");
    PackingFamily fam;
    const std::uint64_t m = std::uint64_t{1} << n;
    fam.measures.reserve(m);
    fam.images.points.reserve(m);
    for (std::uint64_t j = 0; j < m; ++j) {
        const NodeId t{n, j};
        const NodeId s{2 * n, j << n};
        TreeMeasure mu = TreeMeasure::delta(s) - TreeMeasure::delta(t);
        fam.images.points.push_back(apply_vstar(mu, beta, 2 * n));
        fam.images.labels.push_back(std::to_string(j));
        fam.measures.push_back(std::move(mu));
    }
    fam.norm_sq = weight_range_sum(n + 1, 2 * n, beta);
    fam.separation = std::sqrt(2.0 * fam.norm_sq);
    return fam;
}

int default_split_depth(int n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    return std::max(1, static_cast<int>(std::floor(std::log(static_cast<double>(n)) / 4.0)));
}

OddGridNet::OddGridNet(int n, int split_depth, double beta)
    : n_(n), split_depth_(split_depth), beta_(Weight(beta).beta()) {
    if (n < 1) throw std::invalid_argument("odd-grid net needs n >= 1");
    if (split_depth < 0) throw std::invalid_argument("split depth must be non-negative");
    // |Δ| may exceed the asymptotic 2 n^{1/4} by a fixed factor 4.
    const double allowed = 8.0 * std::max(1.0, std::pow(static_cast<double>(n), 0.25));
    if (split_depth > 20 || std::ldexp(1.0, split_depth + 1) - 1.0 > allowed) {
        throw BudgetError("split depth " + std::to_string(split_depth) + " too large for n = " +
                          std::to_string(n));
    }
    for (int l = 0; l <= split_depth; ++l) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) delta_.push_back({l, i});
    }
    for (int j = -n; j <= n; ++j) {
        if (j % 2 != 0) odd_.push_back(j);
    }
}

double OddGridNet::size() const {
    return std::pow(static_cast<double>(odd_.size()), static_cast<double>(delta_.size()));
}

double OddGridNet::size_bound() const {
    return std::pow(2.0 * n_, static_cast<double>(delta_.size()));
}

double OddGridNet::error_sq_bound() const {
    return static_cast<double>(delta_.size()) / (static_cast<double>(n_) * n_);
}

WeightedVector OddGridNet::nearest(const WeightedVector& x) const {
    const int jmax = odd_.back();
    std::vector<WeightedVector::Entry> out;
    out.reserve(delta_.size());
    for (const NodeId& t : delta_) {
        const double v = x.at(t);
        if (std::abs(v) > 1.0 + 1e-12) {
            throw std::domain_error("odd-grid net covers only the sup-norm unit ball");
        }
        const double y = v * n_;
        auto j = static_cast<int>(2.0 * std::round((y - 1.0) / 2.0) + 1.0);
        j = std::clamp(j, -jmax, jmax);
        out.emplace_back(t, static_cast<double>(j) / n_);
    }
    return WeightedVector(beta_, std::move(out));
}

std::vector<WeightedVector> OddGridNet::elements() const {
    if (size() > 1e6) throw BudgetError("odd-grid net has more than 1e6 elements");
    const std::size_t dims = delta_.size();
    const std::size_t base = odd_.size();
    std::vector<std::size_t> digit(dims, 0);
    std::vector<WeightedVector> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (;;) {
        std::vector<WeightedVector::Entry> e;
        e.reserve(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            e.emplace_back(delta_[d], static_cast<double>(odd_[digit[d]]) / n_);
        }
        out.emplace_back(beta_, std::move(e));
        std::size_t d = 0;
        while (d < dims && ++digit[d] == base) digit[d++] = 0;
        if (d == dims) break;
    }
    return out;
}

NearFarSplit split_near_far(const TreeMeasure& mu, const Subtree& upsilon, int split_depth,
                            double beta) {
    const WeightedVector image = approximator_apply(mu, upsilon, beta);
    return {image.restricted([&](const NodeId& t) { return t.level <= split_depth; }),
            image.restricted([&](const NodeId& t) { return t.level > split_depth; })};
}

double far_norm_bound(int split_depth, double beta) {
    return std::sqrt(weight_tail_sum(static_cast<long long>(split_depth) + 1, beta));
}

double CombinedNet::size_bound(int n) const {
    if (family_size == 0) return 0.0;
    const double log2_family = std::floor(std::log2(static_cast<double>(family_size)));
    return std::ldexp(1.0, n + static_cast<int>(log2_family));
}

CombinedNet combined_net(const std::vector<MemberNet>& nets) {
    CombinedNet out;
    out.family_size = nets.size();
    for (const MemberNet& m : nets) {
        out.s1 = std::max(out.s1, m.radius);
        out.size_before_dedup += m.centers.size();
        out.points.insert(out.points.end(), m.centers.begin(), m.centers.end());
    }
    std::stable_sort(out.points.begin(), out.points.end(), entries_less);
    out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
    return out;
}

double distance_to_net(const CombinedNet& net, const WeightedVector& y) {
    if (net.points.empty()) throw std::invalid_argument("empty net");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : net.points) best = std::min(best, distance_sq(p, y));
    return std::sqrt(best);
}

double reference_rate(double beta, double n, RateKind kind) {
    if (!(n > 1.0)) throw std::domain_error("reference_rate needs n > 1");
    const double ln_n = std::log(n);
    const double inv_sqrt = 1.0 / std::sqrt(n);
    switch (kind) {
        case RateKind::upper:
        case RateKind::lower: {
            const double b = Weight(beta).beta();
            if (b < 2.0) return std::pow(n, -(b - 1.0) / 2.0);
            if (b > 2.0) return inv_sqrt * std::pow(ln_n, 1.0 - b / 2.0);
            return kind == RateKind::upper ? inv_sqrt * ln_n : inv_sqrt;
        }
        case RateKind::hull: {
            const double alpha = (Weight(beta).beta() - 1.0) / 2.0;
            if (alpha < 0.5) return std::pow(n, -alpha);
            if (alpha > 0.5) return inv_sqrt * std::pow(ln_n, 0.5 - alpha);
            return inv_sqrt * ln_n;
        }
        case RateKind::volterra_upper:
        case RateKind::volterra_lower: {
            if (!(beta > 0.5)) throw std::domain_error("Volterra rates need beta > 1/2");
            if (beta < 1.0) return std::pow(n, 0.5 - beta);
            if (beta > 1.0) return inv_sqrt * std::pow(ln_n, 1.0 - beta);
            return kind == RateKind::volterra_upper ? inv_sqrt * ln_n : inv_sqrt;
        }
    }
    throw std::logic_error("unknown rate kind");
}

RateKind parse_rate_kind(const std::string& name) {
    if (name == "upper") return RateKind::upper;
    if (name == "lower") return RateKind::lower;
    if (name == "hull") return RateKind::hull;
    if (name == "volterra-upper" || name == "volterra_upper") return RateKind::volterra_upper;
    if (name == "volterra-lower" || name == "volterra_lower") return RateKind::volterra_lower;
    throw std::invalid_argument("unknown rate kind '" + name + "'");
}

double carl_pajor_shape(double m, double k, double norm) {
    if (!(m >= 1.0) || !(k >= 1.0)) throw std::domain_error("carl_pajor_shape needs m, k >= 1");
    return std::sqrt(std::log(m + 1.0)) * norm / std::sqrt(k);
}

double schutt_lower_shape(double m, double k) {
    if (!(m >= 1.0) || !(k >= 1.0)) throw std::domain_error("schutt_lower_shape needs m, k >= 1");
    return std::sqrt(std::log1p(m / k) / k);
}

ScalingFit fit_exponent(const std::vector<double>& ns, const std::vector<double>& values) {
    if (ns.size() != values.size()) throw std::invalid_argument("ns and values differ in length");
    if (ns.size() < 3) throw std::invalid_argument("fit_exponent needs at least 3 points");
    const auto count = static_cast<double>(ns.size());
    double sx = 0.0;
    double sy = 0.0;
    std::vector<double> x(ns.size());
    std::vector<double> y(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0)) throw std::domain_error("fit_exponent needs positive n");
        if (!(values[i] > 0.0)) throw std::domain_error("fit_exponent needs positive values");
        x[i] = std::log(ns[i]);
        y[i] = std::log(values[i]);
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit_exponent needs at least two distinct n");
    ScalingFit fit{ns, values, sxy / sxx, 0.0, 0.0};
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.residual += r * r;
    }
    return fit;
}

}  // namespace entropy
