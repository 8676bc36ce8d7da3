#pragma once

// Empirical entropy-number estimation on point clouds in ℓ₂(T, W), the
// explicit nets used by the tree-operator bounds, packing families for lower
// bounds, reference rate shapes and log-log exponent fits.
//
// Entropy numbers of an operator ball are never computed directly: the image
// of the ℓ₁ ball is a convex hull. Covering estimates run on finite clouds
// (extreme points or sampled hull elements) and the nets below are checked
// against the inequalities they are built to satisfy.

#include <cstdint>
#include <string>
#include <vector>

#include "entropy/tree_operators.hpp"

namespace entropy {

struct PointCloud {
    std::vector<WeightedVector> points;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return points.size(); }
};

enum class CoverMethod { greedy, exhaustive };

struct CoverReport {
    std::size_t k = 0;
    double radius = 0.0;
    std::vector<std::size_t> centers;
    CoverMethod method = CoverMethod::greedy;
};

/// Farthest-point insertion starting from point 0; ties go to the lowest
/// index. Centers are cloud points, so `radius` is a valid covering radius
/// and at most twice the optimal one for k centers.
CoverReport greedy_cover(const PointCloud& cloud, std::size_t k, unsigned threads = 1);

/// Covering radius after each of the first kmax greedy insertions
/// (entry j is the radius with j + 1 centers). Farthest-point traversal is
/// incremental, so this equals greedy_cover(cloud, j + 1).radius.
std::vector<double> greedy_radius_profile(const PointCloud& cloud, std::size_t kmax,
                                          unsigned threads = 1);

/// Optimal k-center restricted to cloud points; BudgetError above 2e6 subsets.
CoverReport exhaustive_cover(const PointCloud& cloud, std::size_t k);

/// max_i min_{c ∈ centers} ‖x_i − x_c‖, recomputed from scratch.
double covering_radius(const PointCloud& cloud, const std::vector<std::size_t>& centers);

/// D = {V*δ_t : |t| ≤ depth}, in (level, index) order. Labels are "l:i".
PointCloud branch_indicator_cloud(double beta, int depth);

/// Σ_{l=from}^{to} (1 + l)^-beta, smallest terms first; 0 when from > to.
double weight_range_sum(long long from, long long to, double beta);
/// Σ_{l≥from} (1 + l)^-beta (direct sum plus an Euler–Maclaurin tail).
double weight_tail_sum(long long from, double beta);

/// Net D_n = {V*δ_t : |t| ≤ n} and its radius over D_depth.
struct DnNet {
    PointCloud net;
    double bound = 0.0;
};

/// (Σ_{l=n+1}^{depth} (1 + l)^-beta)^{1/2}; 0 when n ≥ depth.
double dn_net_bound(int n, double beta, int depth);
DnNet dn_net(int n, double beta, int depth);
/// dist(V*δ_t, D_n) from the closed-form case split: 0 for |t| ≤ n, the
/// tail Σ_{l=n+1}^{|t|} w_l otherwise (returned as a distance, not squared).
double dn_net_distance(const NodeId& t, int n, double beta);

/// μ_j = δ_{s_j} − δ_{t_j} with t_j the j-th level-n node and s_j its
/// leftmost level-2n descendant. Images have disjoint supports.
struct PackingFamily {
    std::vector<TreeMeasure> measures;
    PointCloud images;
    double norm_sq = 0.0;     // Σ_{l=n+1}^{2n} (1 + l)^-beta
    double separation = 0.0;  // pairwise distance √(2·norm_sq)
};

inline constexpr int kMaxPackingN = 20;
PackingFamily packing_family(int n, double beta);

/// Odd-integer grid net H_Δ on Δ = levels 0..split_depth:
/// h(t) = j(t)/n with j odd and |j| ≤ n.
class OddGridNet {
public:
    OddGridNet(int n, int split_depth, double beta = 2.0);

    int n() const noexcept { return n_; }
    int split_depth() const noexcept { return split_depth_; }
    double beta() const noexcept { return beta_; }
    /// |Δ| = 2^{split_depth+1} − 1.
    std::size_t delta_size() const noexcept { return delta_.size(); }
    const std::vector<NodeId>& delta() const noexcept { return delta_; }
    /// Odd j with |j| ≤ n, ascending.
    const std::vector<int>& odd_values() const noexcept { return odd_; }
    /// |H_Δ| = (#odd)^{|Δ|}, as a double (it overflows integers quickly).
    double size() const;
    /// (2n)^{|Δ|}.
    double size_bound() const;
    /// |Δ| / n², the squared-error bound for ‖x‖∞ ≤ 1.
    double error_sq_bound() const;

    /// Nearest net element to x restricted to Δ (entries of x outside Δ are
    /// ignored). Requires |x(t)| ≤ 1 on Δ.
    WeightedVector nearest(const WeightedVector& x) const;
    /// All elements; BudgetError above 1e6.
    std::vector<WeightedVector> elements() const;

private:
    int n_;
    int split_depth_;
    double beta_;
    std::vector<NodeId> delta_;
    std::vector<int> odd_;
};

/// max(1, floor(ln n / 4)).
int default_split_depth(int n);

struct NearFarSplit {
    WeightedVector near;  // V⁰_Υ μ: levels ≤ split_depth
    WeightedVector far;   // V⁺_Υ μ: levels > split_depth
};

/// Splits V*_Υ P_Υ μ at split_depth.
NearFarSplit split_near_far(const TreeMeasure& mu, const Subtree& upsilon, int split_depth,
                            double beta);
/// (Σ_{l > split_depth} (1 + l)^-beta)^{1/2}: upper bound on ‖V⁺_Υ‖.
double far_norm_bound(int split_depth, double beta);

/// A per-operator net: `centers` is an ε-net for (a sample of) the image of
/// the unit ball, with ε = radius.
struct MemberNet {
    std::vector<WeightedVector> centers;
    double radius = 0.0;
};

struct CombinedNet {
    std::vector<WeightedVector> points;
    std::size_t size_before_dedup = 0;
    std::size_t family_size = 0;
    double s1 = 0.0;  // sup over members of their radius
    /// 2^{n + [log₂ |Γ|]}.
    double size_bound(int n) const;
};

/// Union of member nets (exact duplicates removed).
CombinedNet combined_net(const std::vector<MemberNet>& nets);
double distance_to_net(const CombinedNet& net, const WeightedVector& y);

enum class RateKind { upper, lower, hull, volterra_upper, volterra_lower };

/// Rate shape without constants.
///   upper/lower: tree operator V* with weight (1+|t|)^-beta, beta > 1.
///   hull: aco D when e_n(D) ~ n^-α, α = (beta − 1)/2.
///   volterra_*: kernel (t−s)^-1/2 |ln(t−s)|^-beta, beta > 1/2.
double reference_rate(double beta, double n, RateKind kind);
RateKind parse_rate_kind(const std::string& name);

/// ln^{1/2}(m + 1) · norm · k^{-1/2}: the shape of the ℓ₁^m → Hilbert bound.
double carl_pajor_shape(double m, double k, double norm);
/// [ln(1 + m/k) / k]^{1/2}: shape of the lower bound for e_k(ℓ₁^m → ℓ₂^m).
double schutt_lower_shape(double m, double k);

struct ScalingFit {
    std::vector<double> ns;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // Σ squared residuals in log space
};

/// Least squares of ln(value) against ln(n). Needs ≥ 3 points, values > 0.
ScalingFit fit_exponent(const std::vector<double>& ns, const std::vector<double>& values);

}  // namespace entropy
