#pragma once

#include <optional>
#include <vector>

#include "qclab/gauge.hpp"
#include "qclab/measure.hpp"

namespace qclab {

struct CoverResult {
    double value = 0.0;
    std::vector<int> cover;     // indices into the candidate list
    bool uncoverable = false;   // set instead of throwing when candidates miss a cell
};

/// Does the closed ball contain the whole cell square?
bool ball_covers_cell(const Ball& b, const DyadicCellSet& target, const DyadicCell& c);

/// Min over found covers (subsets of candidates) of sum h(B_i): greedy set cover plus
/// local search. An upper bound for M^h restricted to the candidate family.
CoverResult content_upper(const DyadicCellSet& target, const GaugeSpec& gauge,
                          const std::vector<Ball>& candidates);

/// Exact minimum over all covering subsets; exhaustive, |candidates| <= max_candidates <= 20.
CoverResult content_oracle(const DyadicCellSet& target, const GaugeSpec& gauge,
                           const std::vector<Ball>& candidates, int max_candidates = 20);

/// content_upper restricted to candidates with radius < delta.
CoverResult hausdorff_h_delta(const DyadicCellSet& target, const GaugeSpec& gauge, double delta,
                              const std::vector<Ball>& candidates);

struct FrostmanReport {
    double total_mass = 0.0;
    double content = 0.0;        // content_upper over the cell-ball family, for the ratio
    int levels_swept = 0;
    double max_cap_ratio = 0.0;  // max over swept dyadic balls of nu(B)/h(B); <= 1 by construction
};

/// Standard top-down mass-capping sweep over dyadic levels; one atom per finest cell.
/// coarsest_level is the coarsest dyadic level at which caps are enforced.
DiscreteMeasure frostman_construct(const DyadicCellSet& target, const GaugeSpec& gauge,
                                   int coarsest_level, FrostmanReport* report = nullptr);

struct LemmaMmuResult {
    bool ok = false;
    double mu_A = 0.0;
    double content = 0.0;
    std::vector<int> violating_cover;
};

/// Lemma: mu(A) <= 2 M^{h_{mu,a,t}}(A), checked against the candidate-family content.
LemmaMmuResult check_lemma_Mmu(const DiscreteMeasure& mu, double a, double t,
                               const DyadicCellSet& target, const std::vector<Ball>& candidates);

/// Circumscribed balls of every target cell (the default candidate family).
std::vector<Ball> cell_balls(const DyadicCellSet& target);

}  // namespace qclab
