#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qclab/measure.hpp"

namespace qclab {

/// Radial decay profile psi(x) = 1 / (x^{t+a} + 1).
struct PsiProfile {
    double a = 1.0;  // decay surplus, > 0
    double t = 1.0;  // dimension parameter, in (0,2)

    PsiProfile() = default;
    PsiProfile(double a_, double t_) : a(a_), t(t_) {
        if (!(a > 0.0)) throw std::invalid_argument("PsiProfile: a must be positive");
        if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("PsiProfile: t must be in (0,2)");
    }
};

double psi(const PsiProfile& profile, double x);

/// Bracket for the image of a ball under a map known only on construction disks.
struct BallBracket {
    complexd center;   // representative center of the image ball
    double r_lo = 0.0;
    double r_hi = 0.0;
};

/// Supplies image-ball radii for composed gauges (implemented by CantorMap).
class BallImageOracle {
public:
    virtual ~BallImageOracle() = default;
    virtual BallBracket image_ball(complexd center, double radius) const = 0;
};

/// Gauge h(x,r) = r^t * epsilon(x,r).
class GaugeSpec {
public:
    enum class Kind { Constant, MeasureBacked, CantorComposed, Custom };

    static GaugeSpec constant(double t, double eps_value = 1.0);
    static GaugeSpec measure_backed(double t, double a, std::shared_ptr<const DiscreteMeasure> mu);
    /// epsilon(B) = base.epsilon(phi(B))^d, phi supplied by the oracle.
    static GaugeSpec cantor_composed(double t, std::shared_ptr<const GaugeSpec> base,
                                     std::shared_ptr<const BallImageOracle> map, double d);
    /// Arbitrary evaluator, for tests and experiments. Not serializable.
    static GaugeSpec custom(double t, std::function<double(complexd, double)> eps);

    Kind kind() const { return kind_; }
    double t() const { return t_; }
    double a() const { return a_; }
    double d() const { return d_; }
    const DiscreteMeasure* measure() const { return mu_.get(); }

    double epsilon(complexd x, double r) const;
    /// r^t * epsilon(x, r); rejects r <= 0.
    double h(complexd x, double r) const;
    double h(const Ball& b) const { return h(b.center, b.radius); }

    std::string to_json(const std::string& measure_ref = "") const;

private:
    GaugeSpec() = default;
    Kind kind_ = Kind::Constant;
    double t_ = 1.0;
    double a_ = 0.0;          // MeasureBacked
    double d_ = 1.0;          // CantorComposed exponent
    double const_eps_ = 1.0;  // Constant
    std::shared_ptr<const DiscreteMeasure> mu_;
    std::shared_ptr<const GaugeSpec> base_;
    std::shared_ptr<const BallImageOracle> map_;
    std::function<double(complexd, double)> custom_;
};

enum class GaugeClass { G1, G2 };

struct RegularityReport {
    GaugeClass cls = GaugeClass::G1;
    double estimated_constant = 1.0;   // C2 or C3; infinity when unbounded
    bool unbounded = false;
    int samples_checked = 0;
    complexd worst_point;
    double worst_radius = 0.0;
    double tail_bound = 0.0;           // G2 truncation tail estimate
};

struct G1Sample {
    complexd x;
    double r = 0.0;
    complexd y;
    double s = 0.0;
};

/// Smallest C2 >= 1 with C2^-1 eps(x,r) <= eps(y,s) <= C2 eps(x,r) over the samples.
/// Rejects samples with |x-y| > 2r or s outside [r/2, 2r].
RegularityReport check_G1(const GaugeSpec& spec, std::span<const G1Sample> samples);

/// Sup over samples of sum_{k=0}^{k_max} 2^{-k(2-t)} eps(x, 2^k r) / eps(x, r).
RegularityReport check_G2(const GaugeSpec& spec, std::span<const std::pair<complexd, double>> samples,
                          int k_max);

/// Truncated sum of 2^{-beta k} / ((2^-k x)^alpha + 1) against the shape 1/(x^min(alpha,beta)+1).
/// Rejects alpha == beta (logarithmic borderline).
std::pair<double, double> lemtec1_bound(double alpha, double beta, double x, int k_max);

}  // namespace qclab
