#include "qclab/contents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

namespace qclab {

bool ball_covers_cell(const Ball& b, const DyadicCellSet& target, const DyadicCell& c) {
    const double s = target.side();
    const double x0 = static_cast<double>(c.i) * s, y0 = static_cast<double>(c.j) * s;
    for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy)
            if (std::abs(complexd(x0 + dx * s, y0 + dy * s) - b.center) > b.radius + 1e-12 * b.radius)
                return false;
    return true;
}

namespace {

// coverage[k] = bitmask-ish list of cell indices covered by candidate k.
std::vector<std::vector<int>> coverage_lists(const DyadicCellSet& target,
                                             const std::vector<Ball>& candidates) {
    std::vector<std::vector<int>> cov(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k)
        for (std::size_t c = 0; c < target.cells.size(); ++c)
            if (ball_covers_cell(candidates[k], target, target.cells[c])) cov[k].push_back(static_cast<int>(c));
    return cov;
}

double cover_cost(const std::vector<int>& pick, const std::vector<double>& costs) {
    double v = 0.0;
    for (int k : pick) v += costs[k];
    return v;
}

bool covers_all(const std::vector<int>& pick, const std::vector<std::vector<int>>& cov, int ncells) {
    std::vector<char> hit(ncells, 0);
    for (int k : pick)
        for (int c : cov[k]) hit[c] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

// Drop candidates whose removal keeps the cover valid, most expensive first.
void prune(std::vector<int>& pick, const std::vector<std::vector<int>>& cov,
           const std::vector<double>& costs, int ncells) {
    std::sort(pick.begin(), pick.end(), [&](int a, int b) { return costs[a] > costs[b]; });
    for (std::size_t i = 0; i < pick.size();) {
        std::vector<int> trial = pick;
        trial.erase(trial.begin() + static_cast<long>(i));
        if (covers_all(trial, cov, ncells))
            pick = std::move(trial);
        else
            ++i;
    }
}

}  // namespace

CoverResult content_upper(const DyadicCellSet& target, const GaugeSpec& gauge,
                          const std::vector<Ball>& candidates) {
    CoverResult res;
    const int ncells = static_cast<int>(target.cells.size());
    if (ncells == 0) return res;
    const auto cov = coverage_lists(target, candidates);
    std::vector<double> costs(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) costs[k] = gauge.h(candidates[k]);

    // Greedy by cost per newly covered cell.
    std::vector<char> hit(ncells, 0);
    std::vector<int> pick;
    int remaining = ncells;
    while (remaining > 0) {
        int best = -1;
        double best_rate = 0.0;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            int gain = 0;
            for (int c : cov[k])
                if (!hit[c]) ++gain;
            if (gain == 0) continue;
            const double rate = costs[k] / gain;
            if (best < 0 || rate < best_rate) {
                best = static_cast<int>(k);
                best_rate = rate;
            }
        }
        if (best < 0) {
            res.uncoverable = true;
            return res;
        }
        pick.push_back(best);
        for (int c : cov[best])
            if (!hit[c]) {
                hit[c] = 1;
                --remaining;
            }
    }
    prune(pick, cov, costs, ncells);

    // Local search: swap one picked ball for one unpicked, keep improvements.
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < pick.size() && !improved; ++i) {
            for (std::size_t k = 0; k < candidates.size() && !improved; ++k) {
                if (std::find(pick.begin(), pick.end(), static_cast<int>(k)) != pick.end()) continue;
                std::vector<int> trial = pick;
                trial[i] = static_cast<int>(k);
                if (!covers_all(trial, cov, ncells)) continue;
                prune(trial, cov, costs, ncells);
                if (cover_cost(trial, costs) < cover_cost(pick, costs) - 1e-15) {
                    pick = std::move(trial);
                    improved = true;
                }
            }
        }
    }

    res.cover = pick;
    res.value = cover_cost(pick, costs);
    return res;
}

CoverResult content_oracle(const DyadicCellSet& target, const GaugeSpec& gauge,
                           const std::vector<Ball>& candidates, int max_candidates) {
    if (max_candidates > 20) throw std::invalid_argument("content_oracle: max_candidates must be <= 20");
    const int n = static_cast<int>(candidates.size());
    if (n > max_candidates) throw std::invalid_argument("content_oracle: too many candidates");
    CoverResult res;
    const int ncells = static_cast<int>(target.cells.size());
    if (ncells == 0) return res;
    const auto cov = coverage_lists(target, candidates);
    std::vector<double> costs(n);
    std::vector<std::uint64_t> masks(n, 0);
    for (int k = 0; k < n; ++k) {
        costs[k] = gauge.h(candidates[k]);
        for (int c : cov[k]) masks[k] |= (std::uint64_t{1} << c);
    }
    if (ncells > 63) throw std::invalid_argument("content_oracle: too many cells for exhaustive search");
    const std::uint64_t full = (std::uint64_t{1} << ncells) - 1;

    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_set = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        std::uint64_t m = 0;
        double cost = 0.0;
        for (int k = 0; k < n; ++k)
            if (s & (std::uint64_t{1} << k)) {
                m |= masks[k];
                cost += costs[k];
                if (cost >= best) break;
            }
        if (m == full && cost < best) {
            best = cost;
            best_set = s;
        }
    }
    if (!std::isfinite(best)) {
        res.uncoverable = true;
        return res;
    }
    res.value = best;
    for (int k = 0; k < n; ++k)
        if (best_set & (std::uint64_t{1} << k)) res.cover.push_back(k);
    return res;
}

CoverResult hausdorff_h_delta(const DyadicCellSet& target, const GaugeSpec& gauge, double delta,
                              const std::vector<Ball>& candidates) {
    if (!(delta > 0.0)) throw std::invalid_argument("hausdorff_h_delta: delta must be positive");
    std::vector<Ball> sub;
    std::vector<int> back;
    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (candidates[k].radius < delta) {
            sub.push_back(candidates[k]);
            back.push_back(static_cast<int>(k));
        }
    CoverResult res = content_upper(target, gauge, sub);
    for (auto& k : res.cover) k = back[static_cast<std::size_t>(k)];
    return res;
}

DiscreteMeasure frostman_construct(const DyadicCellSet& target, const GaugeSpec& gauge,
                                   int coarsest_level, FrostmanReport* report) {
    if (coarsest_level > target.level)
        throw std::invalid_argument("frostman_construct: coarsest_level must be <= target level");
    struct Node {
        DyadicCell cell;
        double mass;
    };
    // Initialize at the finest level with mass h(cell ball).
    std::vector<Node> nodes;
    for (const auto& c : target.cells) nodes.push_back({c, gauge.h(target.cell_ball(c))});

    FrostmanReport rep;
    // Sweep coarser levels, capping nu(cell) at h(cell ball).
    for (int lvl = target.level - 1; lvl >= coarsest_level; --lvl) {
        const int shift = target.level - lvl;
        std::map<DyadicCell, double> group;
        for (const auto& nd : nodes) group[{nd.cell.i >> shift, nd.cell.j >> shift}] += nd.mass;
        DyadicCellSet coarse(lvl, {});
        for (auto& [cell, mass] : group) {
            const Ball b = DyadicCellSet(lvl, {}).cell_ball(cell);
            const double cap = gauge.h(b);
            if (mass > cap && mass > 0.0) {
                const double scale = cap / mass;
                for (auto& nd : nodes)
                    if ((nd.cell.i >> shift) == cell.i && (nd.cell.j >> shift) == cell.j) nd.mass *= scale;
                mass = cap;
            }
            if (cap > 0.0) rep.max_cap_ratio = std::max(rep.max_cap_ratio, mass / cap);
        }
        ++rep.levels_swept;
    }

    std::vector<Atom> atoms;
    for (const auto& nd : nodes)
        if (nd.mass > 0.0) atoms.push_back({target.cell_center(nd.cell), nd.mass});
    DiscreteMeasure nu(std::move(atoms));
    if (report) {
        rep.total_mass = nu.total();
        rep.content = content_upper(target, gauge, cell_balls(target)).value;
        *report = rep;
    }
    return nu;
}

LemmaMmuResult check_lemma_Mmu(const DiscreteMeasure& mu, double a, double t,
                               const DyadicCellSet& target, const std::vector<Ball>& candidates) {
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("check_lemma_Mmu: t in (0,2)");
    if (!(a > 0.0)) throw std::invalid_argument("check_lemma_Mmu: a > 0");
    LemmaMmuResult out;
    // mu(A): atoms lying in some target cell.
    const double s = target.side();
    for (const auto& atom : mu.atoms()) {
        const DyadicCell c{static_cast<std::int64_t>(std::floor(atom.pos.real() / s)),
                           static_cast<std::int64_t>(std::floor(atom.pos.imag() / s))};
        if (target.contains(c)) out.mu_A += atom.mass;
    }
    auto mu_ptr = std::make_shared<DiscreteMeasure>(mu);
    const GaugeSpec h = GaugeSpec::measure_backed(t, a, mu_ptr);
    CoverResult cr = content_upper(target, h, candidates);
    out.content = cr.value;
    out.ok = !cr.uncoverable && out.mu_A <= 2.0 * cr.value + 1e-12 * std::max(1.0, out.mu_A);
    if (!out.ok) out.violating_cover = cr.cover;
    return out;
}

std::vector<Ball> cell_balls(const DyadicCellSet& target) {
    std::vector<Ball> out;
    out.reserve(target.cells.size());
    for (const auto& c : target.cells) out.push_back(target.cell_ball(c));
    return out;
}

}  // namespace qclab
