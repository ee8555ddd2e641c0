#include "qclab/gauge.hpp"

#include <cmath>

#include "json.hpp"

namespace qclab {

double psi(const PsiProfile& profile, double x) {
    if (x < 0.0) throw std::invalid_argument("psi: x must be nonnegative");
    return 1.0 / (std::pow(x, profile.t + profile.a) + 1.0);
}

GaugeSpec GaugeSpec::constant(double t, double eps_value) {
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("GaugeSpec: t must be in (0,2)");
    if (eps_value < 0.0) throw std::invalid_argument("GaugeSpec: epsilon must be nonnegative");
    GaugeSpec g;
    g.kind_ = Kind::Constant;
    g.t_ = t;
    g.const_eps_ = eps_value;
    return g;
}

GaugeSpec GaugeSpec::measure_backed(double t, double a, std::shared_ptr<const DiscreteMeasure> mu) {
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("GaugeSpec: t must be in (0,2)");
    if (!(a > 0.0)) throw std::invalid_argument("GaugeSpec: a must be positive");
    if (!mu) throw std::invalid_argument("GaugeSpec: null measure");
    GaugeSpec g;
    g.kind_ = Kind::MeasureBacked;
    g.t_ = t;
    g.a_ = a;
    g.mu_ = std::move(mu);
    return g;
}

GaugeSpec GaugeSpec::cantor_composed(double t, std::shared_ptr<const GaugeSpec> base,
                                     std::shared_ptr<const BallImageOracle> map, double d) {
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("GaugeSpec: t must be in (0,2)");
    if (!base || !map) throw std::invalid_argument("GaugeSpec: null base or map");
    if (!(d > 0.0)) throw std::invalid_argument("GaugeSpec: d must be positive");
    GaugeSpec g;
    g.kind_ = Kind::CantorComposed;
    g.t_ = t;
    g.d_ = d;
    g.base_ = std::move(base);
    g.map_ = std::move(map);
    return g;
}

GaugeSpec GaugeSpec::custom(double t, std::function<double(complexd, double)> eps) {
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("GaugeSpec: t must be in (0,2)");
    GaugeSpec g;
    g.kind_ = Kind::Custom;
    g.t_ = t;
    g.custom_ = std::move(eps);
    return g;
}

double GaugeSpec::epsilon(complexd x, double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("GaugeSpec::epsilon: radius must be positive");
    switch (kind_) {
        case Kind::Constant:
            return const_eps_;
        case Kind::MeasureBacked: {
            // Exact sum over atoms; no quadrature.
            const PsiProfile prof(a_, t_);
            double acc = 0.0;
            for (const auto& atom : mu_->atoms())
                acc += atom.mass * psi(prof, std::abs(atom.pos - x) / r);
            return acc / std::pow(r, t_);
        }
        case Kind::CantorComposed: {
            const BallBracket img = map_->image_ball(x, r);
            const double rr = std::sqrt(img.r_lo * img.r_hi);
            return std::pow(base_->epsilon(img.center, rr), d_);
        }
        case Kind::Custom:
            return custom_(x, r);
    }
    return 0.0;
}

double GaugeSpec::h(complexd x, double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("GaugeSpec::h: radius must be positive");
    return std::pow(r, t_) * epsilon(x, r);
}

std::string GaugeSpec::to_json(const std::string& measure_ref) const {
    nlohmann::json j;
    j["t"] = t_;
    switch (kind_) {
        case Kind::Constant:
            j["kind"] = "constant";
            break;
        case Kind::MeasureBacked:
            j["kind"] = "measure";
            j["a"] = a_;
            if (!measure_ref.empty()) j["measure_ref"] = measure_ref;
            break;
        case Kind::CantorComposed:
            j["kind"] = "cantor";
            j["d"] = d_;
            break;
        case Kind::Custom:
            j["kind"] = "custom";
            break;
    }
    return j.dump();
}

RegularityReport check_G1(const GaugeSpec& spec, std::span<const G1Sample> samples) {
    RegularityReport rep;
    rep.cls = GaugeClass::G1;
    double c2 = 1.0;
    for (const auto& s : samples) {
        if (std::abs(s.x - s.y) > 2.0 * s.r + 1e-12 * s.r || s.s < 0.5 * s.r - 1e-12 * s.r ||
            s.s > 2.0 * s.r + 1e-12 * s.r)
            throw std::invalid_argument("check_G1: sample violates |x-y|<=2r, r/2<=s<=2r");
        const double ex = spec.epsilon(s.x, s.r);
        const double ey = spec.epsilon(s.y, s.s);
        ++rep.samples_checked;
        double ratio;
        if (ex == 0.0 && ey == 0.0) {
            ratio = 1.0;
        } else if (ex == 0.0 || ey == 0.0) {
            rep.unbounded = true;
            rep.worst_point = s.x;
            rep.worst_radius = s.r;
            continue;
        } else {
            ratio = std::max(ex / ey, ey / ex);
        }
        if (ratio > c2) {
            c2 = ratio;
            rep.worst_point = s.x;
            rep.worst_radius = s.r;
        }
    }
    rep.estimated_constant = rep.unbounded ? std::numeric_limits<double>::infinity() : c2;
    return rep;
}

RegularityReport check_G2(const GaugeSpec& spec, std::span<const std::pair<complexd, double>> samples,
                          int k_max) {
    if (k_max < 1) throw std::invalid_argument("check_G2: k_max must be >= 1");
    const double t = spec.t();
    RegularityReport rep;
    rep.cls = GaugeClass::G2;
    double c3 = 0.0;
    for (const auto& [x, r] : samples) {
        double num = 0.0;
        for (int k = 0; k <= k_max; ++k)
            num += std::pow(2.0, -k * (2.0 - t)) * spec.epsilon(x, std::ldexp(r, k));
        const double den = spec.epsilon(x, r);
        ++rep.samples_checked;
        if (den == 0.0) {
            if (num > 0.0) {
                rep.unbounded = true;
                rep.worst_point = x;
                rep.worst_radius = r;
            }
            continue;
        }
        const double ratio = num / den;
        if (ratio > c3) {
            c3 = ratio;
            rep.worst_point = x;
            rep.worst_radius = r;
        }
        // Tail bound: eps(x, 2^k r) <= mu(C)/(2^k r)^t for measure-backed gauges,
        // so the tail of the sum is at most mu(C) r^-t sum_{k>k_max} 2^-2k.
        if (spec.kind() == GaugeSpec::Kind::MeasureBacked) {
            const double eps_cap = spec.measure()->total() / std::pow(r, t);
            const double tail = eps_cap * std::pow(2.0, -2.0 * (k_max + 1)) / (1.0 - 0.25);
            rep.tail_bound = std::max(rep.tail_bound, tail / den);
        }
    }
    rep.estimated_constant = rep.unbounded ? std::numeric_limits<double>::infinity() : c3;
    return rep;
}

std::pair<double, double> lemtec1_bound(double alpha, double beta, double x, int k_max) {
    if (alpha == beta)
        throw std::invalid_argument("lemtec1_bound: alpha == beta is the logarithmic case");
    if (!(x > 0.0)) throw std::invalid_argument("lemtec1_bound: x must be positive");
    if (!(alpha > 0.0 && beta > 0.0)) throw std::invalid_argument("lemtec1_bound: alpha, beta > 0");
    double lhs = 0.0;
    for (int k = 0; k <= k_max; ++k)
        lhs += std::pow(2.0, -beta * k) / (std::pow(std::ldexp(x, -k), alpha) + 1.0);
    const double m = std::min(alpha, beta);
    return {lhs, 1.0 / (std::pow(x, m) + 1.0)};
}

}  // namespace qclab
