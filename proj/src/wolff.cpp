#include "qclab/wolff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qclab {

WolffOptions WolffOptions::for_measure(const DiscreteMeasure& mu) {
    double res = 1.0;  // atom resolution: smallest nonzero pairwise distance
    const auto& atoms = mu.atoms();
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            const double d = std::abs(atoms[i].pos - atoms[j].pos);
            if (d > 0.0) min_dist = std::min(min_dist, d);
        }
    if (std::isfinite(min_dist)) res = min_dist;
    const double diam = std::max(mu.support_diameter(), res);
    const int k_min = static_cast<int>(std::floor(std::log2(res / 4.0)));
    const int k_max = static_cast<int>(std::ceil(std::log2(4.0 * diam)));
    return WolffOptions(std::min(k_min, k_max - 1), k_max);
}

WolffResult wolff_potential(const DiscreteMeasure& mu, const RieszIndex& idx, complexd x,
                            const WolffOptions& opts) {
    WolffResult out;
    if (mu.empty()) return out;
    const double expo = 2.0 - idx.alpha * idx.p;
    const double s = idx.p_conj() - 1.0;
    // Fixed index order for reproducibility.
    for (int k = opts.k_min; k <= opts.k_max; ++k) {
        const double r = std::ldexp(1.0, k);
        const double m = mu.ball_mass(Ball(x, r));
        if (m > 0.0) out.value += std::pow(m / std::pow(r, expo), s);
    }
    if (mu.ball_mass(Ball(x, std::ldexp(1.0, opts.k_min))) > 0.0) out.divergence_warning = true;
    // Above the top scale the summand decays geometrically when expo > 0.
    if (expo > 0.0) {
        const double top = std::pow(mu.total() / std::pow(std::ldexp(1.0, opts.k_max + 1), expo), s);
        const double q = std::pow(2.0, -expo * s);
        out.tail_bound = top / (1.0 - q);
    }
    return out;
}

CapacityResult capacity_lower(const DiscreteMeasure& mu, const RieszIndex& idx,
                              std::span<const complexd> probe_points, const WolffOptions& opts) {
    if (probe_points.empty()) throw std::invalid_argument("capacity_lower: probe_points empty");
    CapacityResult out;
    if (mu.empty()) return out;
    bool warn = false;
    for (const auto& x : probe_points) {
        const WolffResult w = wolff_potential(mu, idx, x, opts);
        out.wolff_sup = std::max(out.wolff_sup, w.value);
        warn = warn || w.divergence_warning;
    }
    if (!(out.wolff_sup > 0.0) || !std::isfinite(out.wolff_sup)) {
        out.diverged = !std::isfinite(out.wolff_sup);
        return out;
    }
    out.diverged = warn && out.wolff_sup > 1e12;  // treated as the W_sup = inf flag
    if (out.diverged) return out;
    // W^{lambda mu} = lambda^{p'-1} W^mu: pick lambda so the scaled sup is 1.
    const double lambda = std::pow(out.wolff_sup, -1.0 / (idx.p_conj() - 1.0));
    out.value = lambda * mu.total();
    return out;
}

double gauge_normalization(const GaugeSpec& spec, double p, complexd x, const WolffOptions& opts) {
    if (!(p > 1.0)) throw std::invalid_argument("gauge_normalization: p > 1 required");
    const double s = p / (p - 1.0) - 1.0;
    double acc = 0.0;
    for (int k = opts.k_min; k <= opts.k_max; ++k)
        acc += std::pow(spec.epsilon(x, std::ldexp(1.0, k)), s);
    return acc * std::numbers::ln2;
}

CapacityViaContents capacity_via_contents(const DyadicCellSet& target, const RieszIndex& idx,
                                          const std::vector<GaugeSpec>& gauges,
                                          const std::vector<Ball>& candidates,
                                          std::span<const complexd> probe_points,
                                          const WolffOptions& opts) {
    CapacityViaContents out;
    const double t = 2.0 - idx.alpha * idx.p;
    for (std::size_t g = 0; g < gauges.size(); ++g) {
        if (std::abs(gauges[g].t() - t) > 1e-9)
            throw std::invalid_argument("capacity_via_contents: gauge t must equal 2 - alpha p");
        bool admissible = true;
        for (const auto& x : probe_points)
            if (gauge_normalization(gauges[g], idx.p, x, opts) > 1.0 + 1e-9) {
                admissible = false;
                break;
            }
        if (!admissible) {
            out.per_gauge.push_back(-1.0);
            out.skipped.push_back(static_cast<int>(g));
            continue;
        }
        const CoverResult cr = content_upper(target, gauges[g], candidates);
        const double v = cr.uncoverable ? 0.0 : cr.value;
        out.per_gauge.push_back(v);
        out.lower = std::max(out.lower, v);
    }
    return out;
}

LemcgResult check_lemcg(const BallImageOracle& map, const GaugeSpec& base, double s, complexd x,
                        const WolffOptions& opts) {
    if (!(s > 0.0)) throw std::invalid_argument("check_lemcg: s > 0 required");
    LemcgResult out;
    BallBracket img0 = map.image_ball(x, std::ldexp(1.0, opts.k_min));
    const complexd fx = img0.center;
    for (int k = opts.k_min; k <= opts.k_max; ++k) {
        const double r = std::ldexp(1.0, k);
        const BallBracket img = map.image_ball(x, r);
        const double rr = std::sqrt(img.r_lo * img.r_hi);
        out.lhs += std::pow(base.epsilon(img.center, rr), s) * std::numbers::ln2;
        out.rhs += std::pow(base.epsilon(fx, r), s) * std::numbers::ln2;
    }
    return out;
}

LemdensResult check_lemdens(const DiscreteMeasure& mu, double s, double a, double theta1,
                            double delta, complexd x) {
    if (!(s > 0.0 && s <= 2.0)) throw std::invalid_argument("check_lemdens: s in (0,2]");
    if (!(a > 0.0 && theta1 > 0.0 && delta > 0.0))
        throw std::invalid_argument("check_lemdens: a, theta1, delta > 0");
    LemdensResult out;
    if (mu.empty()) {  // zero measure: every delta' works and eps vanishes
        out.delta_prime = std::numeric_limits<double>::infinity();
        return out;
    }
    // Precondition sweep: mu(B(x,r))/r^s <= theta1 for log-spaced r <= delta.
    constexpr int kSteps = 48;
    for (int i = 0; i < kSteps; ++i) {
        const double r = delta * std::pow(2.0, -i / 4.0);
        if (mu.ball_mass(Ball(x, r)) / std::pow(r, s) > theta1 * (1.0 + 1e-12))
            out.offending_radii.push_back(r);
    }
    out.delta_prime = std::pow(theta1 * std::pow(delta, s + a) / mu.total(), 1.0 / a);
    auto mu_ptr = std::make_shared<DiscreteMeasure>(mu);
    const GaugeSpec eps = GaugeSpec::measure_backed(s, a, mu_ptr);
    for (int i = 0; i < kSteps; ++i) {
        const double r = out.delta_prime * std::pow(2.0, -i / 4.0);
        out.theta2 = std::max(out.theta2, eps.epsilon(x, r));
    }
    return out;
}

}  // namespace qclab
