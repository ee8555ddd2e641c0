#pragma once

#include <span>
#include <vector>

#include "qclab/contents.hpp"
#include "qclab/gauge.hpp"
#include "qclab/measure.hpp"

namespace qclab {

struct RieszIndex {
    double alpha = 1.0;
    double p = 1.5;

    RieszIndex() = default;
    RieszIndex(double alpha_, double p_) : alpha(alpha_), p(p_) {
        if (!(p > 1.0)) throw std::invalid_argument("RieszIndex: p must be > 1");
        if (!(alpha * p > 0.0 && alpha * p < 2.0))
            throw std::invalid_argument("RieszIndex: need 0 < alpha*p < 2");
    }
    double p_conj() const { return p / (p - 1.0); }
};

/// Dyadic truncation window [2^k_min, 2^k_max].
struct WolffOptions {
    int k_min = -30;
    int k_max = 10;

    WolffOptions() = default;
    WolffOptions(int kmin, int kmax) : k_min(kmin), k_max(kmax) {
        if (!(kmin < kmax)) throw std::invalid_argument("WolffOptions: k_min < k_max required");
    }
    /// Default window for a measure: [atom-resolution/4, 4 diam(supp mu)].
    static WolffOptions for_measure(const DiscreteMeasure& mu);
};

struct WolffResult {
    double value = 0.0;
    bool divergence_warning = false;  // mass present at the bottom scale 2^k_min
    double tail_bound = 0.0;          // bound on the truncated-from-above remainder
};

/// Dyadic Wolff potential: sum_k (mu(B(x,2^k)) / 2^{k(2-alpha p)})^{p'-1}.
WolffResult wolff_potential(const DiscreteMeasure& mu, const RieszIndex& idx, complexd x,
                            const WolffOptions& opts);

struct CapacityResult {
    double value = 0.0;
    double wolff_sup = 0.0;
    bool diverged = false;
};

/// Lower bound for the Riesz capacity of supp(mu), up to Wolff comparability:
/// rescale mu so the probed potential sup is 1, return the rescaled total mass.
CapacityResult capacity_lower(const DiscreteMeasure& mu, const RieszIndex& idx,
                              std::span<const complexd> probe_points, const WolffOptions& opts);

/// Dyadic approximation of the admissibility integral: sum_k eps(x,2^k)^{p'-1} ln 2.
double gauge_normalization(const GaugeSpec& spec, double p, complexd x, const WolffOptions& opts);

struct CapacityViaContents {
    double lower = 0.0;
    std::vector<double> per_gauge;       // content of each admissible gauge, -1 when skipped
    std::vector<int> skipped;            // indices failing the normalization
};

CapacityViaContents capacity_via_contents(const DyadicCellSet& target, const RieszIndex& idx,
                                          const std::vector<GaugeSpec>& gauges,
                                          const std::vector<Ball>& candidates,
                                          std::span<const complexd> probe_points,
                                          const WolffOptions& opts);

/// Compares the dyadic integrals of eps0(phi(B(x,r)))^s and eps0(phi(x),r)^s.
struct LemcgResult {
    double lhs = 0.0;
    double rhs = 0.0;
};
LemcgResult check_lemcg(const BallImageOracle& map, const GaugeSpec& base, double s, complexd x,
                        const WolffOptions& opts);

struct LemdensResult {
    double delta_prime = 0.0;
    double theta2 = 0.0;                    // sup of eps over r <= delta', the empirical C * theta1
    std::vector<double> offending_radii;    // radii violating the density precondition
};

/// delta' = (theta1 delta^{s+a} / mu(C))^{1/a}; verifies eps_{mu,a,s}(x,r) <= C theta1 below it.
LemdensResult check_lemdens(const DiscreteMeasure& mu, double s, double a, double theta1,
                            double delta, complexd x);

}  // namespace qclab
