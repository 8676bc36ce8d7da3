#pragma once

// The critical Volterra kernel K_t(s) = (t − s)₊^{-1/2} |ln(t − s)₊|^{-β}
// on [0, r] (β = 1 is the critical case), measures on (0, r], n-essential
// dyadic partitions and the finite-rank operators
//
//     V*_𝕀 μ = Σ_{I ∈ 𝕀} μ(I) K_{t_I},      t_I = left end of I,
//
// with every L₂ norm evaluated exactly from Gram matrices of kernel inner
// products (no grid discretisation of L₂).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "entropy/quadrature.hpp"

namespace entropy {

struct KernelConfig {
    double r = 0.1;
    double beta = 1.0;

    /// Throws unless 0 < r < e^-2 and beta ≥ 1.
    void validate() const;
};

/// K_t(s); 0 for s ≥ t. Arguments must lie in [0, r].
double kernel_eval(double t, double s, const KernelConfig& cfg);

/// ‖K_t‖² = |ln t|^{1−2β} / (2β − 1) (1/|ln t| at β = 1); 0 at t = 0.
double kernel_norm_sq(double t, const KernelConfig& cfg);

/// Closed form alongside the quadrature value of the same integral.
struct NormCheck {
    double closed_form = 0.0;
    double quadrature = 0.0;
};
NormCheck kernel_norm_sq_checked(double t, const KernelConfig& cfg, const QuadratureConfig& quad);

/// (K_{t1}, K_{t2}) = ∫₀^{min(t1,t2)} K_{t1}(s) K_{t2}(s) ds.
///
/// With u = min − s = exp(−|ln min| / z), z ∈ (0, 1], the integrand becomes
///     √(u/(u+Δ)) · |ln(u+Δ)|^{-β} · |ln min|^{1−β} z^{β−2},   Δ = |t1 − t2|,
/// which is constant for Δ = 0, β = 1 and bounded otherwise.
/// QuadratureError on non-convergence.
double kernel_inner(double t1, double t2, const KernelConfig& cfg, const QuadratureConfig& quad);

/// Memoising wrapper for kernel_inner, keyed on the unordered pair.
class KernelGram {
public:
    KernelGram(KernelConfig cfg, QuadratureConfig quad);

    double inner(double t1, double t2);
    /// (K_a − K_b, K_c − K_d).
    double difference_inner(double a, double b, double c, double d);

    const KernelConfig& kernel() const noexcept { return cfg_; }
    const QuadratureConfig& quadrature() const noexcept { return quad_; }
    std::size_t evaluations() const noexcept { return cache_.size(); }

private:
    KernelConfig cfg_;
    QuadratureConfig quad_;
    std::map<std::pair<double, double>, double> cache_;
};

struct ModulusCheck {
    double lhs = 0.0;  // ‖K_{t+u} − K_t‖₂
    double rhs = 0.0;  // 2 |ln u|^{-1/2}
    bool holds = false;
};

/// Requires 0 ≤ t ≤ t + u ≤ r, u > 0. `holds` is lhs ≤ rhs + abs_tol.
ModulusCheck modulus_check(double t, double u, const KernelConfig& cfg, const QuadratureConfig& quad);

/// ∫₀^r (K_d − K_c)(K_b − K_a) for 0 ≤ a ≤ b ≤ c ≤ d ≤ r (≤ 0 for the
/// decreasing convex kernel).
double negative_dependence(double a, double b, double c, double d, const KernelConfig& cfg,
                           const QuadratureConfig& quad);

struct KernelShape {
    bool decreasing = false;
    bool convex = false;
    double min_second_difference = 0.0;
};

/// Checks g(u) = u^{-1/2} |ln u|^{-β} for monotone decrease and convexity on
/// a uniform grid of `points` nodes over (0, r].
KernelShape check_kernel_shape(const KernelConfig& cfg, int points = 4000);

/// Piecewise-constant density on (lo, hi].
struct DensityPiece {
    double lo = 0.0;
    double hi = 0.0;
    double density = 0.0;
};

/// Signed measure on (0, r]: finitely many atoms plus optional
/// piecewise-constant densities.
class IntervalMeasure {
public:
    using Atom = std::pair<double, double>;  // (location, mass)

    IntervalMeasure() = default;
    IntervalMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> densities = {});

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::vector<DensityPiece>& densities() const noexcept { return densities_; }
    bool is_atomic() const noexcept { return densities_.empty(); }

    /// ‖μ‖₁.
    double total_variation() const;
    /// ‖μ‖₁((lo, hi]).
    double variation(double lo, double hi) const;
    /// μ((lo, hi]).
    double signed_mass(double lo, double hi) const;
    /// Largest location touched by the measure.
    double max_point() const;

private:
    std::vector<Atom> atoms_;  // sorted by location, merged, no zero masses
    std::vector<DensityPiece> densities_;
};

std::pair<IntervalMeasure, IntervalMeasure> hahn_split(const IntervalMeasure& mu);

/// Binary interval (index·r/2^level, (index+1)·r/2^level].
struct BinaryInterval {
    int level = 0;
    std::uint64_t index = 0;

    double left(double r) const;
    double right(double r) const;
    double length(double r) const;
    bool contains(const BinaryInterval& other) const noexcept;

    friend constexpr auto operator<=>(const BinaryInterval&, const BinaryInterval&) = default;
    friend constexpr bool operator==(const BinaryInterval&, const BinaryInterval&) = default;
};

/// Partition of (0, r] into binary intervals, sorted left to right.
class DyadicPartition {
public:
    DyadicPartition() = default;
    /// Validates that the intervals tile (0, r].
    DyadicPartition(double r, std::vector<BinaryInterval> intervals,
                    std::vector<BinaryInterval> divided = {});

    double r() const noexcept { return r_; }
    const std::vector<BinaryInterval>& intervals() const noexcept { return intervals_; }
    /// The tree 𝔻 of intervals that were divided (may be empty).
    const std::vector<BinaryInterval>& divided() const noexcept { return divided_; }
    std::size_t size() const noexcept { return intervals_.size(); }

    /// Position of the interval containing x ∈ (0, r].
    std::size_t locate(double x) const;
    /// Left end t_I of each interval.
    std::vector<double> anchors() const;

    /// Terminal set Q of 𝔻: divided intervals with no divided half.
    std::vector<BinaryInterval> terminal_divided() const;
    /// Σ_l l·q_l over the terminal set of 𝔻.
    long long terminal_level_sum() const;

    friend bool operator==(const DyadicPartition&, const DyadicPartition&) = default;

private:
    double r_ = 0.1;
    std::vector<BinaryInterval> intervals_;
    std::vector<BinaryInterval> divided_;
};

/// Divide (0, r] recursively while ‖μ‖₁(I) ≥ level/n; keep the first
/// interval that fails. Requires ‖μ‖₁ ≤ 1; the root always divides.
/// DepthLimitError if an interval below level 62 would be needed (n ≥ 62 only).
DyadicPartition essential_partition(const IntervalMeasure& mu, int n, const KernelConfig& cfg);

/// Linear combination Σ c_i K_{a_i} in L₂[0, r]. Anchors at 0 (K_0 ≡ 0) are
/// dropped; equal anchors are merged.
class KernelCombination {
public:
    using Term = std::pair<double, double>;  // (anchor, coefficient)

    KernelCombination() = default;
    explicit KernelCombination(std::vector<Term> terms);

    const std::vector<Term>& terms() const noexcept { return terms_; }

    double norm_sq(KernelGram& gram) const;
    double norm(KernelGram& gram) const;
    friend double inner(const KernelCombination& x, const KernelCombination& y, KernelGram& gram);
    friend KernelCombination operator-(const KernelCombination& x, const KernelCombination& y);

private:
    std::vector<Term> terms_;
};

/// V*_𝕀 μ = Σ_I μ(I) K_{t_I}. Requires the partition to cover supp(μ).
KernelCombination finite_rank_apply(const IntervalMeasure& mu, const DyadicPartition& part);
/// V*μ = Σ_a m_a K_{x_a} for atomic μ.
KernelCombination vstar_apply(const IntervalMeasure& mu);

/// Gram matrix G_ij = (K_{p_i}, K_{p_j}).
std::vector<double> gram_matrix(std::span<const double> points, KernelGram& gram);
/// Smallest eigenvalue of a symmetric row-major n×n matrix.
double min_eigenvalue(std::span<const double> matrix, std::size_t n);

struct ApproximationError {
    double err = 0.0;            // ‖Δ_𝕀 μ‖₂
    double err_plus = 0.0;       // ‖Δ_𝕀 μ₊‖₂
    double err_minus = 0.0;      // ‖Δ_𝕀 μ₋‖₂
    double diag_plus = 0.0;      // same-interval terms of ‖Δ_𝕀 μ₊‖²
    double diag_minus = 0.0;
    double cross_plus = 0.0;     // different-interval terms (≤ 0)
    double cross_minus = 0.0;
    double diag_bound = 0.0;     // 4 / (ln 2 · n)
    double bound = 0.0;          // 4 (ln 2)^{-1/2} n^{-1/2}
    double min_gram_eigenvalue = 0.0;
    std::size_t partition_size = 0;
    bool within_bound = false;   // err ≤ bound + tolerance
};

/// Δ_𝕀 μ = Σ_a m_a (K_{x_a} − K_{t_{I(a)}}) for an arbitrary partition.
/// `n` only sets the bounds. Requires atomic μ.
ApproximationError approximation_error(const IntervalMeasure& mu, const DyadicPartition& part, int n,
                                       KernelGram& gram, double tolerance = 1e-6);
/// Same with 𝕀 = essential_partition(μ, n).
ApproximationError approximation_error(const IntervalMeasure& mu, int n, KernelGram& gram,
                                       double tolerance = 1e-6);

/// m with 2^{-m} ≤ n^{-1/4} ≤ 2^{1−m}: the smallest m with 2^{4m} ≥ n.
int auxiliary_level(int n);

/// Coarsening E: intervals of `part` at level ≤ m stay, finer ones are merged
/// into their level-m block.
DyadicPartition auxiliary_partition(const DyadicPartition& part, int n);

struct SplitNormReport {
    std::size_t rank_count = 0;       // |𝕀| (bounds rank(V*_𝕀 − V*_E))
    std::size_t distinct_terms = 0;   // |𝕀 \ E|
    double operator_norm = 0.0;       // sup over unit atoms, exact
    double bound = 0.0;               // 2 (ln n^{1/4})^{-1/2}
};

/// Exact ‖V*_𝕀 − V*_E‖ over unit atoms: max_J ‖K_{t_J} − K_{t_{I(J)}}‖.
SplitNormReport split_norm_bound(const DyadicPartition& part, const DyadicPartition& aux, int n,
                                 KernelGram& gram);
/// ‖(V*_𝕀 − V*_E) μ‖₂ for a specific μ.
double split_difference_norm(const IntervalMeasure& mu, const DyadicPartition& part,
                             const DyadicPartition& aux, KernelGram& gram);

/// Net 𝒩_E = { Σ_{I∈E} (j_I/n) K_{t_I} : j_I ∈ {1−n, …, n−1} }.
class CoefficientNet {
public:
    CoefficientNet(DyadicPartition aux, int n, const KernelConfig& cfg);

    int n() const noexcept { return n_; }
    const DyadicPartition& partition() const noexcept { return aux_; }
    /// (2n − 1)^{|E|}.
    double size() const;
    /// max_t ‖K_t‖ · |E| / n.
    double error_bound() const;
    /// j_I = round(n μ(I)) clamped to [1 − n, n − 1].
    std::vector<int> nearest_profile(const IntervalMeasure& mu) const;
    KernelCombination element(std::span<const int> profile) const;
    /// ‖V*_E μ − h‖ with h the nearest element.
    double approximation_distance(const IntervalMeasure& mu, KernelGram& gram) const;

private:
    DyadicPartition aux_;
    int n_;
    KernelConfig cfg_;
};

}  // namespace entropy
