#include "qclab/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qclab {

double t_prime(double t, double K) {
    if (!(t > 0.0 && t <= 2.0)) throw std::invalid_argument("t_prime: t in (0,2]");
    if (!(K >= 1.0)) throw std::invalid_argument("t_prime: K >= 1");
    return 2.0 * K * t / (2.0 + (K - 1.0) * t);
}

DistortionIndices indices_from_target(double beta, double q, double K) {
    if (!(q > 1.0)) throw std::invalid_argument("indices_from_target: q > 1");
    if (!(beta * q > 0.0 && beta * q < 2.0)) throw std::invalid_argument("indices_from_target: 0 < beta*q < 2");
    if (!(K >= 1.0)) throw std::invalid_argument("indices_from_target: K >= 1");
    DistortionIndices idx;
    idx.K = K;
    idx.beta = beta;
    idx.q = q;
    idx.t_prime = 2.0 - beta * q;
    idx.t = 2.0 * idx.t_prime / (idx.t_prime + K * (2.0 - idx.t_prime));
    idx.p = 1.0 + (K * idx.t / idx.t_prime) * (q - 1.0);
    idx.alpha = (2.0 - idx.t) / idx.p;
    return idx;
}

TheoremCheck verify_thm11_on_cantor(const CantorParams& params, const DistortionIndices& idx, int N) {
    if (N < 1 || N > params.depth()) throw std::invalid_argument("verify_thm11_on_cantor: bad N");
    if (std::abs(idx.K - params.K) > 1e-12 || std::abs(idx.t - params.t) > 1e-9)
        throw std::invalid_argument("verify_thm11_on_cantor: indices do not match the construction");

    const auto gen = generation_data(params);
    const auto& g = gen[static_cast<std::size_t>(N - 1)];
    const double total_mass = std::exp(g.log_count + g.log_mass);

    const RieszIndex target(idx.beta, idx.q);
    const RieszIndex source(idx.alpha, idx.p);
    const double w_t = wolff_on_cantor(params, target, CantorSide::Target, N).back();
    const double w_s = wolff_on_cantor(params, source, CantorSide::Source, N).back();

    TheoremCheck out;
    out.lhs = total_mass * std::pow(w_t, -1.0 / (target.p_conj() - 1.0));
    const double cap_s = total_mass * std::pow(w_s, -1.0 / (source.p_conj() - 1.0));
    out.rhs = std::pow(cap_s, idx.t_prime / (idx.K * idx.t));
    out.ratio = out.lhs / out.rhs;
    out.diverged = !(std::isfinite(out.ratio) && out.ratio > 0.0);
    return out;
}

TheoremCheck verify_thm12_on_cantor(const CantorParams& params, int N) {
    if (N < 1 || N > params.depth()) throw std::invalid_argument("verify_thm12_on_cantor: bad N");
    for (const auto& L : params.levels)
        if (std::abs(L.d - 1.0) > 1e-12)
            throw std::invalid_argument("verify_thm12_on_cantor: requires the d = 1 construction");

    const double tp = t_prime(params.t, params.K);
    const auto gen = generation_data(params);
    const auto& g = gen[static_cast<std::size_t>(N - 1)];
    double log_renorm = 0.0;
    for (const auto& L : params.levels) log_renorm += std::log1p(-L.fill_deficit);

    TheoremCheck out;
    // Generation-N cover sums scaled by the measure's total renormalization; the
    // root ball has unit scale (principal map, diam comparable to 1).
    out.lhs = std::exp(g.log_count + tp * g.log_target_radius + log_renorm);
    out.rhs = std::exp((tp / (params.K * params.t)) *
                       (g.log_count + params.t * g.log_source_radius + log_renorm));
    out.ratio = out.lhs / out.rhs;
    out.diverged = !std::isfinite(out.ratio);
    return out;
}

std::vector<CapacityComparisonRow> capacity_comparison(const RieszIndex& idx1, const RieszIndex& idx2,
                                                       const std::vector<DiscreteMeasure>& measures) {
    if (std::abs(idx1.alpha * idx1.p - idx2.alpha * idx2.p) > 1e-9)
        throw std::invalid_argument("capacity_comparison: index pairs must share alpha*p");
    std::vector<CapacityComparisonRow> rows;
    rows.reserve(measures.size());
    for (const auto& mu : measures) {
        std::vector<complexd> probes;
        const std::size_t step = std::max<std::size_t>(1, mu.atoms().size() / 200);
        for (std::size_t i = 0; i < mu.atoms().size(); i += step) probes.push_back(mu.atoms()[i].pos);
        const auto opts = WolffOptions::for_measure(mu);
        const auto c1 = capacity_lower(mu, idx1, probes, opts);
        const auto c2 = capacity_lower(mu, idx2, probes, opts);
        CapacityComparisonRow row;
        row.cap1 = c1.value;
        row.cap2 = c2.value;
        row.ratio = c2.value > 0.0 ? c1.value / c2.value : 0.0;
        row.diverged = c1.diverged || c2.diverged;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qclab
