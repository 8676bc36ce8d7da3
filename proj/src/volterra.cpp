#include "entropy/volterra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "entropy/essential_trees.hpp"
#include "entropy/tree_core.hpp"

namespace entropy {

namespace {

void require_in_range(double x, const KernelConfig& cfg, const char* what) {
    if (!(x >= 0.0 && x <= cfg.r)) {
        throw std::domain_error(std::string(what) + " = " + std::to_string(x) + " outside [0, r]");
    }
}

// g(u) = u^{-1/2} |ln u|^{-β} for u ∈ (0, 1).
double profile(double u, double beta) {
    return 1.0 / (std::sqrt(u) * std::pow(-std::log(u), beta));
}

// Integrand of kernel_inner in the z variable (see header).
struct InnerIntegrand {
    double y0;        // |ln t_min|
    double log_gap;   // ln Δ, or -inf for Δ = 0
    double beta;

    double operator()(double z) const {
        const double y = y0 / z;
        const double log_u = -y;
        double ratio = 1.0;
        double log_sum = log_u;
        if (std::isfinite(log_gap)) {
            if (log_u >= log_gap) {
                const double q = std::exp(log_gap - log_u);  // Δ/u ≤ 1
                ratio = 1.0 / std::sqrt(1.0 + q);
                log_sum = log_u + std::log1p(q);
            } else {
                const double p = std::exp(log_u - log_gap);  // u/Δ < 1
                if (p == 0.0) return 0.0;
                ratio = std::sqrt(p / (1.0 + p));
                log_sum = log_gap + std::log1p(p);
            }
        }
        const double scale = beta == 1.0 ? 1.0 / z : std::pow(y0, 1.0 - beta) * std::pow(z, beta - 2.0);
        const double log_factor = beta == 1.0 ? -log_sum : std::pow(-log_sum, beta);
        return ratio * scale / log_factor;
    }
};

std::uint64_t dyadic_numerator(const BinaryInterval& I, int level) {
    return I.index << (level - I.level);
}

}  // namespace

void KernelConfig::validate() const {
    if (!(r > 0.0 && r < std::exp(-2.0))) {
        throw std::domain_error("kernel interval length r must lie in (0, e^-2), got " + std::to_string(r));
    }
    if (!(beta >= 1.0)) throw std::domain_error("kernel exponent beta must be >= 1");
}

double kernel_eval(double t, double s, const KernelConfig& cfg) {
    cfg.validate();
    require_in_range(t, cfg, "t");
    require_in_range(s, cfg, "s");
    if (s >= t) return 0.0;
    return profile(t - s, cfg.beta);
}

double kernel_norm_sq(double t, const KernelConfig& cfg) {
    cfg.validate();
    require_in_range(t, cfg, "t");
    if (t == 0.0) return 0.0;
    const double y = -std::log(t);
    return std::pow(y, 1.0 - 2.0 * cfg.beta) / (2.0 * cfg.beta - 1.0);
}

NormCheck kernel_norm_sq_checked(double t, const KernelConfig& cfg, const QuadratureConfig& quad) {
    if (!(t > 0.0)) throw std::domain_error("kernel_norm_sq_checked needs t > 0");
    return {kernel_norm_sq(t, cfg), kernel_inner(t, t, cfg, quad)};
}

double kernel_inner(double t1, double t2, const KernelConfig& cfg, const QuadratureConfig& quad) {
    cfg.validate();
    require_in_range(t1, cfg, "t1");
    require_in_range(t2, cfg, "t2");
    const double lo = std::min(t1, t2);
    if (lo == 0.0) return 0.0;
    const double gap = std::abs(t1 - t2);
    const InnerIntegrand f{-std::log(lo), gap == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(gap),
                           cfg.beta};
    return integrate_or_throw(f, 0.0, 1.0, quad);
}

KernelGram::KernelGram(KernelConfig cfg, QuadratureConfig quad) : cfg_(cfg), quad_(quad) {
    cfg_.validate();
}

double KernelGram::inner(double t1, double t2) {
    const auto key = std::minmax(t1, t2);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = kernel_inner(key.first, key.second, cfg_, quad_);
    cache_.emplace(key, v);
    return v;
}

double KernelGram::difference_inner(double a, double b, double c, double d) {
    return inner(a, c) - inner(a, d) - inner(b, c) + inner(b, d);
}

ModulusCheck modulus_check(double t, double u, const KernelConfig& cfg, const QuadratureConfig& quad) {
    if (!(u > 0.0)) throw std::domain_error("modulus_check needs u > 0");
    require_in_range(t, cfg, "t");
    require_in_range(t + u, cfg, "t + u");
    const double cross = kernel_inner(t + u, t, cfg, quad);
    const double sq = kernel_norm_sq(t + u, cfg) + kernel_norm_sq(t, cfg) - 2.0 * cross;
    ModulusCheck out;
    out.lhs = std::sqrt(std::max(sq, 0.0));
    out.rhs = 2.0 / std::sqrt(-std::log(u));
    out.holds = out.lhs <= out.rhs + quad.abs_tol;
    return out;
}

double negative_dependence(double a, double b, double c, double d, const KernelConfig& cfg,
                           const QuadratureConfig& quad) {
    if (!(0.0 <= a && a <= b && b <= c && c <= d && d <= cfg.r)) {
        throw std::invalid_argument("negative_dependence needs 0 <= a <= b <= c <= d <= r");
    }
    KernelGram gram(cfg, quad);
    return gram.difference_inner(d, c, b, a);
}

KernelShape check_kernel_shape(const KernelConfig& cfg, int points) {
    cfg.validate();
    if (points < 3) throw std::invalid_argument("check_kernel_shape needs at least 3 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 1; k <= points; ++k) {
        g[static_cast<std::size_t>(k - 1)] = profile(cfg.r * k / points, cfg.beta);
    }
    KernelShape shape{true, true, std::numeric_limits<double>::infinity()};
    for (std::size_t k = 1; k < g.size(); ++k) {
        if (!(g[k] < g[k - 1])) shape.decreasing = false;
    }
    for (std::size_t k = 1; k + 1 < g.size(); ++k) {
        const double second = g[k - 1] - 2.0 * g[k] + g[k + 1];
        shape.min_second_difference = std::min(shape.min_second_difference, second);
        if (second < -1e-12 * g[k]) shape.convex = false;
    }
    return shape;
}

IntervalMeasure::IntervalMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> densities)
    : densities_(std::move(densities)) {
    std::sort(atoms.begin(), atoms.end());
    for (const auto& [x, m] : atoms) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw std::domain_error("atoms must lie in (0, r]; got location " + std::to_string(x));
        }
        if (!atoms_.empty() && atoms_.back().first == x) {
            atoms_.back().second += m;
        } else {
            atoms_.emplace_back(x, m);
        }
    }
    std::erase_if(atoms_, [](const Atom& a) { return a.second == 0.0; });
    for (const auto& p : densities_) {
        if (!(p.lo >= 0.0 && p.hi > p.lo)) throw std::domain_error("density piece needs 0 <= lo < hi");
    }
}

double IntervalMeasure::total_variation() const {
    double s = 0.0;
    for (const auto& [x, m] : atoms_) s += std::abs(m);
    for (const auto& p : densities_) s += std::abs(p.density) * (p.hi - p.lo);
    return s;
}

double IntervalMeasure::variation(double lo, double hi) const {
    double s = 0.0;
    const auto first = std::upper_bound(atoms_.begin(), atoms_.end(), lo,
                                        [](double v, const Atom& a) { return v < a.first; });
    for (auto it = first; it != atoms_.end() && it->first <= hi; ++it) s += std::abs(it->second);
    for (const auto& p : densities_) {
        const double overlap = std::min(hi, p.hi) - std::max(lo, p.lo);
        if (overlap > 0.0) s += std::abs(p.density) * overlap;
    }
    return s;
}

double IntervalMeasure::signed_mass(double lo, double hi) const {
    double s = 0.0;
    const auto first = std::upper_bound(atoms_.begin(), atoms_.end(), lo,
                                        [](double v, const Atom& a) { return v < a.first; });
    for (auto it = first; it != atoms_.end() && it->first <= hi; ++it) s += it->second;
    for (const auto& p : densities_) {
        const double overlap = std::min(hi, p.hi) - std::max(lo, p.lo);
        if (overlap > 0.0) s += p.density * overlap;
    }
    return s;
}

double IntervalMeasure::max_point() const {
    double m = atoms_.empty() ? 0.0 : atoms_.back().first;
    for (const auto& p : densities_) m = std::max(m, p.hi);
    return m;
}

std::pair<IntervalMeasure, IntervalMeasure> hahn_split(const IntervalMeasure& mu) {
    std::vector<IntervalMeasure::Atom> plus;
    std::vector<IntervalMeasure::Atom> minus;
    for (const auto& [x, m] : mu.atoms()) {
        if (m > 0.0) {
            plus.emplace_back(x, m);
        } else {
            minus.emplace_back(x, -m);
        }
    }
    std::vector<DensityPiece> dplus;
    std::vector<DensityPiece> dminus;
    for (const auto& p : mu.densities()) {
        if (p.density > 0.0) dplus.push_back(p);
        if (p.density < 0.0) dminus.push_back({p.lo, p.hi, -p.density});
    }
    return {IntervalMeasure(std::move(plus), std::move(dplus)),
            IntervalMeasure(std::move(minus), std::move(dminus))};
}

double BinaryInterval::left(double r) const { return r * std::ldexp(static_cast<double>(index), -level); }
double BinaryInterval::right(double r) const {
    return r * std::ldexp(static_cast<double>(index + 1), -level);
}
double BinaryInterval::length(double r) const { return std::ldexp(r, -level); }

bool BinaryInterval::contains(const BinaryInterval& other) const noexcept {
    return other.level >= level && (other.index >> (other.level - level)) == index;
}

DyadicPartition::DyadicPartition(double r, std::vector<BinaryInterval> intervals,
                                 std::vector<BinaryInterval> divided)
    : r_(r), intervals_(std::move(intervals)), divided_(std::move(divided)) {
    if (intervals_.empty()) throw std::invalid_argument("partition needs at least one interval");
    int deepest = 0;
    for (const auto& I : intervals_) {
        if (I.level < 0 || I.level > kMaxLevel || (I.index >> I.level) != 0) {
            throw std::invalid_argument("invalid binary interval");
        }
        deepest = std::max(deepest, I.level);
    }
    std::sort(intervals_.begin(), intervals_.end(), [&](const BinaryInterval& a, const BinaryInterval& b) {
        return dyadic_numerator(a, deepest) < dyadic_numerator(b, deepest);
    });
    std::uint64_t expected = 0;
    for (const auto& I : intervals_) {
        if (dyadic_numerator(I, deepest) != expected) {
            throw std::invalid_argument("intervals do not tile (0, r]");
        }
        expected += std::uint64_t{1} << (deepest - I.level);
    }
    if (deepest < 64 && expected != (std::uint64_t{1} << deepest)) {
        throw std::invalid_argument("intervals do not cover (0, r]");
    }
    std::sort(divided_.begin(), divided_.end());
}

std::size_t DyadicPartition::locate(double x) const {
    if (!(x > 0.0 && x <= r_)) throw std::domain_error("point outside (0, r]");
    // Last interval whose left end is strictly below x.
    std::size_t lo = 0;
    std::size_t hi = intervals_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (intervals_[mid].left(r_) < x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

std::vector<double> DyadicPartition::anchors() const {
    std::vector<double> out;
    out.reserve(intervals_.size());
    for (const auto& I : intervals_) out.push_back(I.left(r_));
    return out;
}

std::vector<BinaryInterval> DyadicPartition::terminal_divided() const {
    const std::set<BinaryInterval> d(divided_.begin(), divided_.end());
    std::vector<BinaryInterval> out;
    for (const auto& I : divided_) {
        const BinaryInterval left{I.level + 1, I.index << 1};
        const BinaryInterval right{I.level + 1, (I.index << 1) | 1U};
        if (!d.contains(left) && !d.contains(right)) out.push_back(I);
    }
    return out;
}

long long DyadicPartition::terminal_level_sum() const {
    long long s = 0;
    for (const auto& I : terminal_divided()) s += I.level;
    return s;
}

DyadicPartition essential_partition(const IntervalMeasure& mu, int n, const KernelConfig& cfg) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("essential_partition needs n >= 1");
    const double total = mu.total_variation();
    if (total > 1.0 + kUnitBallSlack) {
        throw std::domain_error("measure must lie in the unit ball, got ||mu||_1 = " + std::to_string(total));
    }
    if (mu.max_point() > cfg.r) throw std::domain_error("measure reaches beyond r");

    std::vector<BinaryInterval> kept;
    std::vector<BinaryInterval> divided;
    // Explicit stack, left half popped first so `kept` comes out ordered.
    std::vector<BinaryInterval> stack{{0, 0}};
    while (!stack.empty()) {
        const BinaryInterval I = stack.back();
        stack.pop_back();
        const double threshold = static_cast<double>(I.level) / n;
        if (mu.variation(I.left(cfg.r), I.right(cfg.r)) >= threshold) {
            if (I.level > n) throw InvariantViolation("division continued past level n for a unit-ball measure");
            if (I.level >= kMaxLevel) {
                throw DepthLimitError("essential partition needs intervals below level " + std::to_string(kMaxLevel));
            }
            divided.push_back(I);
            stack.push_back({I.level + 1, (I.index << 1) | 1U});
            stack.push_back({I.level + 1, I.index << 1});
        } else {
            kept.push_back(I);
        }
    }
    return DyadicPartition(cfg.r, std::move(kept), std::move(divided));
}

KernelCombination::KernelCombination(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end());
    for (const auto& [a, c] : terms) {
        if (a == 0.0) continue;
        if (!terms_.empty() && terms_.back().first == a) {
            terms_.back().second += c;
        } else {
            terms_.emplace_back(a, c);
        }
    }
    std::erase_if(terms_, [](const Term& t) { return t.second == 0.0; });
}

double inner(const KernelCombination& x, const KernelCombination& y, KernelGram& gram) {
    double s = 0.0;
    for (const auto& [a, c] : x.terms_) {
        for (const auto& [b, d] : y.terms_) s += c * d * gram.inner(a, b);
    }
    return s;
}

double KernelCombination::norm_sq(KernelGram& gram) const { return inner(*this, *this, gram); }

double KernelCombination::norm(KernelGram& gram) const { return std::sqrt(std::max(norm_sq(gram), 0.0)); }

KernelCombination operator-(const KernelCombination& x, const KernelCombination& y) {
    std::vector<KernelCombination::Term> terms = x.terms_;
    for (const auto& [b, d] : y.terms_) terms.emplace_back(b, -d);
    return KernelCombination(std::move(terms));
}

KernelCombination finite_rank_apply(const IntervalMeasure& mu, const DyadicPartition& part) {
    if (mu.max_point() > part.r()) throw std::domain_error("partition does not cover the measure");
    std::vector<KernelCombination::Term> terms;
    for (const auto& I : part.intervals()) {
        const double m = mu.signed_mass(I.left(part.r()), I.right(part.r()));
        if (m != 0.0) terms.emplace_back(I.left(part.r()), m);
    }
    return KernelCombination(std::move(terms));
}

KernelCombination vstar_apply(const IntervalMeasure& mu) {
    if (!mu.is_atomic()) throw std::invalid_argument("vstar_apply as a kernel combination needs an atomic measure");
    return KernelCombination(mu.atoms());
}

std::vector<double> gram_matrix(std::span<const double> points, KernelGram& gram) {
    const std::size_t n = points.size();
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = gram.inner(points[i], points[j]);
    }
    return g;
}

double min_eigenvalue(std::span<const double> matrix, std::size_t n) {
    if (matrix.size() != n * n) throw std::invalid_argument("matrix size mismatch");
    if (n == 0) return 0.0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix[i * n + j];
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

ApproximationError approximation_error(const IntervalMeasure& mu, const DyadicPartition& part, int n,
                                       KernelGram& gram, double tolerance) {
    if (!mu.is_atomic()) throw std::invalid_argument("approximation_error needs an atomic measure");
    if (n < 1) throw std::invalid_argument("approximation_error needs n >= 1");
    const auto& atoms = mu.atoms();
    const std::size_t count = atoms.size();
    std::vector<double> anchor(count);
    std::vector<std::size_t> cell(count);
    for (std::size_t a = 0; a < count; ++a) {
        cell[a] = part.locate(atoms[a].first);
        anchor[a] = part.intervals()[cell[a]].left(part.r());
    }
    // Gram matrix of the difference functions K_{x_a} − K_{t_a}.
    std::vector<double> g(count * count);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a; b < count; ++b) {
            g[a * count + b] = g[b * count + a] =
                gram.difference_inner(atoms[a].first, anchor[a], atoms[b].first, anchor[b]);
        }
    }
    ApproximationError out;
    double total = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            const double ma = atoms[a].second;
            const double mb = atoms[b].second;
            const double term = ma * mb * g[a * count + b];
            total += term;
            if ((ma > 0.0) != (mb > 0.0)) continue;
            const double unsigned_term = std::abs(ma) * std::abs(mb) * g[a * count + b];
            const bool same_cell = cell[a] == cell[b];
            if (ma > 0.0) {
                (same_cell ? out.diag_plus : out.cross_plus) += unsigned_term;
            } else {
                (same_cell ? out.diag_minus : out.cross_minus) += unsigned_term;
            }
        }
    }
    out.err = std::sqrt(std::max(total, 0.0));
    out.err_plus = std::sqrt(std::max(out.diag_plus + out.cross_plus, 0.0));
    out.err_minus = std::sqrt(std::max(out.diag_minus + out.cross_minus, 0.0));
    out.diag_bound = 4.0 / (std::numbers::ln2 * n);
    out.bound = 4.0 / std::sqrt(std::numbers::ln2 * n);
    out.min_gram_eigenvalue = min_eigenvalue(g, count);
    out.partition_size = part.size();
    out.within_bound = out.err <= out.bound + tolerance;
    return out;
}

ApproximationError approximation_error(const IntervalMeasure& mu, int n, KernelGram& gram, double tolerance) {
    return approximation_error(mu, essential_partition(mu, n, gram.kernel()), n, gram, tolerance);
}

int auxiliary_level(int n) {
    if (n < 1) throw std::invalid_argument("auxiliary_level needs n >= 1");
    int m = 0;
    while ((std::uint64_t{1} << (4 * m)) < static_cast<std::uint64_t>(n)) ++m;
    return m;
}

DyadicPartition auxiliary_partition(const DyadicPartition& part, int n) {
    const int m = auxiliary_level(n);
    std::vector<BinaryInterval> coarse;
    for (const auto& I : part.intervals()) {
        const BinaryInterval block = I.level <= m ? I : BinaryInterval{m, I.index >> (I.level - m)};
        if (coarse.empty() || !(coarse.back() == block)) coarse.push_back(block);
    }
    return DyadicPartition(part.r(), std::move(coarse));
}

namespace {

// Interval of `aux` that contains J (aux is a coarsening of the partition J comes from).
const BinaryInterval& enclosing(const DyadicPartition& aux, const BinaryInterval& J) {
    const double mid = 0.5 * (J.left(aux.r()) + J.right(aux.r()));
    const BinaryInterval& I = aux.intervals()[aux.locate(mid)];
    if (!I.contains(J)) throw std::invalid_argument("auxiliary partition is not coarser than the partition");
    return I;
}

}  // namespace

SplitNormReport split_norm_bound(const DyadicPartition& part, const DyadicPartition& aux, int n,
                                 KernelGram& gram) {
    SplitNormReport out;
    out.rank_count = part.size();
    const double r = part.r();
    for (const auto& J : part.intervals()) {
        const BinaryInterval& I = enclosing(aux, J);
        if (I == J) continue;
        ++out.distinct_terms;
        const double tj = J.left(r);
        const double ti = I.left(r);
        const double sq = gram.difference_inner(tj, ti, tj, ti);
        out.operator_norm = std::max(out.operator_norm, std::sqrt(std::max(sq, 0.0)));
    }
    out.bound = n > 1 ? 2.0 / std::sqrt(0.25 * std::log(static_cast<double>(n)))
                      : std::numeric_limits<double>::infinity();
    return out;
}

double split_difference_norm(const IntervalMeasure& mu, const DyadicPartition& part,
                             const DyadicPartition& aux, KernelGram& gram) {
    const double r = part.r();
    std::vector<KernelCombination::Term> terms;
    for (const auto& J : part.intervals()) {
        const BinaryInterval& I = enclosing(aux, J);
        if (I == J) continue;
        const double m = mu.signed_mass(J.left(r), J.right(r));
        if (m == 0.0) continue;
        terms.emplace_back(J.left(r), m);
        terms.emplace_back(I.left(r), -m);
    }
    return KernelCombination(std::move(terms)).norm(gram);
}

CoefficientNet::CoefficientNet(DyadicPartition aux, int n, const KernelConfig& cfg)
    : aux_(std::move(aux)), n_(n), cfg_(cfg) {
    cfg_.validate();
    if (n < 1) throw std::invalid_argument("coefficient net needs n >= 1");
    const double allowed = 2.0 * std::pow(static_cast<double>(n), 0.25) + 1e-9;
    if (static_cast<double>(aux_.size()) > allowed) {
        throw BudgetError("auxiliary partition has " + std::to_string(aux_.size()) +
                          " intervals, more than 2 n^{1/4}");
    }
}

double CoefficientNet::size() const {
    return std::pow(2.0 * n_ - 1.0, static_cast<double>(aux_.size()));
}

double CoefficientNet::error_bound() const {
    return std::sqrt(kernel_norm_sq(cfg_.r, cfg_)) * static_cast<double>(aux_.size()) / n_;
}

std::vector<int> CoefficientNet::nearest_profile(const IntervalMeasure& mu) const {
    std::vector<int> j;
    j.reserve(aux_.size());
    for (const auto& I : aux_.intervals()) {
        const double m = mu.signed_mass(I.left(aux_.r()), I.right(aux_.r()));
        const auto rounded = static_cast<int>(std::lround(m * n_));
        j.push_back(std::clamp(rounded, 1 - n_, n_ - 1));
    }
    return j;
}

KernelCombination CoefficientNet::element(std::span<const int> profile) const {
    if (profile.size() != aux_.size()) throw std::invalid_argument("profile length differs from |E|");
    std::vector<KernelCombination::Term> terms;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile[i] < 1 - n_ || profile[i] > n_ - 1) throw std::invalid_argument("coefficient outside the net");
        terms.emplace_back(aux_.intervals()[i].left(aux_.r()), static_cast<double>(profile[i]) / n_);
    }
    return KernelCombination(std::move(terms));
}

double CoefficientNet::approximation_distance(const IntervalMeasure& mu, KernelGram& gram) const {
    const auto profile = nearest_profile(mu);
    return (finite_rank_apply(mu, aux_) - element(profile)).norm(gram);
}

}  // namespace entropy
