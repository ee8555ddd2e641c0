#pragma once

#include <vector>

#include "qclab/cantor.hpp"
#include "qclab/measure.hpp"
#include "qclab/wolff.hpp"

namespace qclab {

/// The exponent tuple linking source indices (alpha, p, t) to target indices
/// (beta, q, t') across a K-quasiconformal map.
struct DistortionIndices {
    double K = 1.0;
    double t = 0.0;
    double t_prime = 0.0;
    double beta = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    double p = 0.0;
};

/// t' = 2Kt / (2 + (K-1)t); equivalently 1/t - 1/2 = K(1/t' - 1/2).
double t_prime(double t, double K);

/// Solves the full tuple from the target pair: t' = 2 - beta*q,
/// t = 2t'/(t' + K(2-t')), p = 1 + (Kt/t')(q-1), alpha = (2-t)/p.
DistortionIndices indices_from_target(double beta, double q, double K);

struct TheoremCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool diverged = false;
};

/// Capacity comparison on the construction via generation sums: normalized target
/// capacity at (beta, q) against the source capacity at (alpha, p) raised to t'/(Kt).
TheoremCheck verify_thm11_on_cantor(const CantorParams& params, const DistortionIndices& idx, int N);

/// Hausdorff cover-sum comparison for the exact-dimension (d = 1) construction:
/// generation-N target cover value against the source value raised to t'/(Kt).
TheoremCheck verify_thm12_on_cantor(const CantorParams& params, int N);

struct CapacityComparisonRow {
    double cap1 = 0.0;
    double cap2 = 0.0;
    double ratio = 0.0;
    bool diverged = false;
};

/// capacity_lower at both index pairs for each measure (probes at atom positions).
std::vector<CapacityComparisonRow> capacity_comparison(const RieszIndex& idx1, const RieszIndex& idx2,
                                                       const std::vector<DiscreteMeasure>& measures);

}  // namespace qclab
