#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qclab/gauge.hpp"
#include "qclab/measure.hpp"
#include "qclab/wolff.hpp"

namespace qclab {

double derive_sigma(double R, double t, double K, double d);

/// One level of the construction. R is uniform across the level; count is the
/// analytic disk count (may be far larger than any placeable tree).
struct CantorLevel {
    double R = 0.0;                // building-block radius ratio, in (0, 1/100]
    double d = 1.0;                // the d_N multiplier, in [1,2]
    std::int64_t count = 1;        // disks per level, M_N
    double fill_deficit = 0.0;     // eps_N in [0,1)
};

struct CantorParams {
    double K = 1.0;
    double t = 1.0;
    std::vector<CantorLevel> levels;

    int depth() const { return static_cast<int>(levels.size()); }
    double sigma(int level) const;  // derive_sigma of that level, guard included
    void validate() const;

    /// Uniform parameters for all levels. d_mode "unit" sets d = 1; "sharp" sets
    /// d_j = ((j+1)/j)^delta.
    static CantorParams uniform(double K, double t, int depth, double R, std::int64_t count,
                                double fill_deficit = 0.0);
    static CantorParams sharp(double K, double t, int depth, double R, std::int64_t count,
                              double delta);

    std::string to_json() const;
    static CantorParams from_json(const std::string& text);
};

struct DiskAddress {
    std::vector<int> js;  // level disk-class indices (radii are j-uniform here)
    std::vector<int> is;  // position indices within each level

    int depth() const { return static_cast<int>(js.size()); }
    static DiskAddress path(int depth);  // all-zero address of given depth
};

double source_radius(const CantorParams& params, const DiskAddress& addr);
double target_radius(const CantorParams& params, const DiskAddress& addr);
double block_mass(const CantorParams& params, const DiskAddress& addr);

/// Per-generation cumulative data in log space (counts overflow any integer type).
struct GenerationData {
    double log_source_radius = 0.0;
    double log_target_radius = 0.0;
    double log_mass = 0.0;       // per-block mass, renormalization included
    double log_count = 0.0;      // log of the number of generation-N blocks
};
std::vector<GenerationData> generation_data(const CantorParams& params);

enum class CantorSide { Source, Target };

/// Generation-sum form of the Wolff potential (partial sums S_1..S_N).
std::vector<double> wolff_on_cantor(const CantorParams& params, const RieszIndex& idx,
                                    CantorSide side, int n_max);

/// Seeded dart-throwing placement of `count` disjoint disks of relative radius R
/// inside the unit disk. Throws when no packing is found within 10^5 attempts.
std::vector<complexd> place_level(std::int64_t count, double R, unsigned seed);

/// Placed construction tree. Each level stores relative child placements shared by
/// every parent; protecting disks are pairwise disjoint inside the parent.
class CantorMap : public BallImageOracle {
public:
    CantorMap(CantorParams params, unsigned seed);

    const CantorParams& params() const { return params_; }
    const std::vector<std::vector<complexd>>& level_offsets() const { return offsets_; }

    complexd source_center(const DiskAddress& addr) const;
    complexd target_center(const DiskAddress& addr) const;

    /// Bracketing target radii for the image of a source ball, via the enclosing and
    /// enclosed construction disks plus a fixed quasisymmetry slack.
    BallBracket image_ball(complexd center, double radius) const override;

    /// One atom per generation-N disk: mu at target centers, nu at source centers.
    std::pair<DiscreteMeasure, DiscreteMeasure> discretize(int N) const;

    /// CSV: address, source_radius, target_radius, mass, center_x, center_y (source side).
    void export_tree(std::ostream& os, int N) const;

private:
    CantorParams params_;
    std::vector<std::vector<complexd>> offsets_;  // relative centers per level, |.| scaled to parent 1
};

struct SharpnessIndices {
    double beta = 0.0;
    double q = 0.0;
    double alpha_t = 0.0;  // the tilde pair
    double p_t = 0.0;
    double delta = 0.0;
};

struct SharpnessVerdict {
    SharpnessIndices indices;
    double target_exponent = 0.0;   // t'(q'-1) delta, converges iff > 1
    double source_exponent = 0.0;   // t K (p~'-1) delta, equals 1 by the delta choice
    bool target_converges = false;
    bool source_diverges = false;
    double target_partial_sum = 0.0;   // S_N at n_max
    double target_tail_bound = 0.0;    // integral bound on the dropped tail
    double source_log_slope = 0.0;     // fitted slope of S_N against ln N
};

/// Sharpness harness: delta = 1/(t K (p~'-1)), d_j = ((j+1)/j)^delta.
SharpnessVerdict sharpness_harness(double t, double K, double q, double p_tilde,
                                   int n_max = 1000000);

struct Lemtec5Result {
    double sup_C = 0.0;
    bool tail_warning = false;
    RegularityReport composed_g2;  // check_G2 of the composed gauge at b = 2-t
};

/// sum_j eps(phi(B(x,2^j r)))^d / 2^{bj} <= C eps(phi(B(x,r)))^d at the probes.
Lemtec5Result check_lemtec5(const CantorMap& cmap, std::shared_ptr<const DiscreteMeasure> base_mu,
                            double a, double t, double d, double b,
                            std::span<const std::pair<complexd, double>> probes);

}  // namespace qclab
