#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qclab/gauge.hpp"
#include "qclab/measure.hpp"

namespace qclab {

/// Row-major n x n complex samples; values[j*n + i] sits at origin + (i + j*i)*spacing.
struct GridField {
    complexd origin;
    double spacing = 1.0;
    int n = 0;
    std::vector<complexd> values;

    static GridField zeros(complexd origin, double spacing, int n);

    complexd point(int i, int j) const { return origin + complexd(i * spacing, j * spacing); }
    complexd& at(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
    complexd at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }

    /// L2 norm with the grid area element: sqrt(sum |v|^2) * spacing.
    double l2_norm() const;

    /// Binary layout: origin re/im and spacing as doubles, n as int64, then
    /// interleaved re/im doubles, all little-endian.
    void write(std::ostream& os) const;
    static GridField read(std::istream& is);
};

/// Spectral Beurling transform on the grid (4x zero-padded, unimodular symbol).
/// Sets *support_warning when f is nonzero outside the inner half of the grid.
GridField beurling_full(const GridField& f, bool* support_warning = nullptr);

/// Convolution with the kernel -1/(pi z^2) zeroed on |z| <= eps. Rejects eps < 2*spacing.
GridField beurling_truncated(const GridField& f, double eps);

/// Direct-quadrature truncated transform at one point (cross-check for the FFT path).
complexd beurling_truncated_at(const GridField& f, complexd z, double eps);

/// Pointwise max of |beurling_truncated| over the eps ladder; real nonnegative values.
GridField beurling_maximal(const GridField& f, std::span<const double> eps_set);

/// Dyadic square [i,i+1] x [j,j+1] scaled by 2^-level, with its gauge mass h.
struct PackedSquare {
    int level = 0;
    std::int64_t i = 0;
    std::int64_t j = 0;
    double h = 0.0;

    double side() const { return std::ldexp(1.0, -level); }
    complexd corner() const { return complexd(i * side(), j * side()); }
    complexd center() const { return corner() + complexd(side() / 2, side() / 2); }
};

struct PackingFamily {
    std::vector<PackedSquare> squares;
    double c_pack = 0.0;  // measured sup over dyadic ancestors of sum h(P) / h(Q)
};

/// Seeded greedy selection of same-level squares inside [0,1]^2 with pairwise
/// disjoint triples 3P; verifies the packing ratio over all dyadic ancestors.
PackingFamily build_packing(const GaugeSpec& gauge, int level, int budget, unsigned seed);

struct Weight {
    PackingFamily family;
    GridField values;                      // real weight in the real part
    std::vector<std::size_t> unresolved;   // squares finer than 4*spacing
};

/// omega = sum_P h(P)/side(P)^2 on P, rasterized on the given grid shape.
Weight build_weight(const PackingFamily& family, complexd origin, double spacing, int n);

/// Centered maximal functions over a dyadic square ladder: plain and omega-weighted.
/// M_omega is NaN where every probed square has omega(Q) = 0.
std::pair<GridField, GridField> maximal_functions(const GridField& f, const Weight& w);

struct SquareRegion {
    complexd corner;
    double side = 0.0;
};

/// sup over probes of [omega(Q)/side(Q)^2] / omega(x); probes must lie on the family.
double check_local_A1(const Weight& w, std::span<const std::pair<complexd, SquareRegion>> probes);

struct WeightedTrialRow {
    int trial = 0;
    double ratio = 0.0;    // ||S_* f||_{L^p(omega)} / ||f||_{L^p(omega)}
    double weak11 = 0.0;   // max_lambda lambda * omega{S_* f > lambda} / ||f||_{L^1(omega)}
};

struct WeightedNormReport {
    double ratio_max = 0.0;
    double weak11_max = 0.0;
    std::vector<std::pair<double, double>> goodlambda;  // (gamma, measured ratio), gamma = 1..2^-8
    std::vector<WeightedTrialRow> rows;
};

/// Seeded random f on the family (per-square amplitudes plus single-square spikes);
/// measures L^p(omega) ratios of the maximal transform, weak (1,1) statistics, and
/// the good-lambda table at thresholds 10*lambda / gamma*lambda.
WeightedNormReport weighted_norm_harness(const Weight& w, double p, int trials, unsigned seed);

}  // namespace qclab
