#include "qclab/beurling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fftw3.h>

namespace qclab {

GridField GridField::zeros(complexd origin, double spacing, int n) {
    if (!(spacing > 0.0)) throw std::invalid_argument("GridField: spacing must be positive");
    if (n <= 0 || (n & (n - 1)) != 0) throw std::invalid_argument("GridField: n must be a power of two");
    GridField g;
    g.origin = origin;
    g.spacing = spacing;
    g.n = n;
    g.values.assign(static_cast<std::size_t>(n) * n, complexd(0.0, 0.0));
    return g;
}

double GridField::l2_norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s) * spacing;
}

void GridField::write(std::ostream& os) const {
    const double head[3] = {origin.real(), origin.imag(), spacing};
    os.write(reinterpret_cast<const char*>(head), sizeof head);
    const std::int64_t nn = n;
    os.write(reinterpret_cast<const char*>(&nn), sizeof nn);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(complexd)));
}

GridField GridField::read(std::istream& is) {
    double head[3];
    std::int64_t nn = 0;
    is.read(reinterpret_cast<char*>(head), sizeof head);
    is.read(reinterpret_cast<char*>(&nn), sizeof nn);
    if (!is || nn <= 0 || nn > (1 << 20)) throw std::runtime_error("GridField::read: bad header");
    GridField g = zeros(complexd(head[0], head[1]), head[2], static_cast<int>(nn));
    is.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(complexd)));
    if (!is) throw std::runtime_error("GridField::read: truncated payload");
    return g;
}

namespace {

void fft2(std::vector<complexd>& data, int N, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft_2d(N, N, p, p, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

int freq_index(int k, int N) { return k <= N / 2 ? k : k - N; }

// Kernel-FFT cache for the truncated transform; keyed on padded size and the
// truncation radius in units of the spacing.
std::vector<complexd>& truncated_kernel_fft(int n, double spacing, double eps) {
    static std::map<std::pair<int, long long>, std::vector<complexd>> cache;
    const long long eps_key = std::llround(eps / spacing * 1024.0);
    auto [it, fresh] = cache.try_emplace({n, eps_key});
    if (!fresh) return it->second;

    const int N = 2 * n;
    auto& k = it->second;
    k.assign(static_cast<std::size_t>(N) * N, complexd(0.0, 0.0));
    const double scale = spacing * spacing / std::numbers::pi;
    for (int dj = -n; dj < n; ++dj)
        for (int di = -n; di < n; ++di) {
            const complexd z(di * spacing, dj * spacing);
            if (std::abs(z) <= eps) continue;
            k[static_cast<std::size_t>((dj + N) % N) * N + (di + N) % N] = -scale / (z * z);
        }
    fft2(k, N, FFTW_FORWARD);
    return k;
}

}  // namespace

GridField beurling_full(const GridField& f, bool* support_warning) {
    const int n = f.n, N = 2 * n;
    if (support_warning) {
        *support_warning = false;
        const int q = n / 4;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if ((i < q || i >= n - q || j < q || j >= n - q) && f.at(i, j) != complexd(0.0, 0.0))
                    *support_warning = true;
    }
    std::vector<complexd> g(static_cast<std::size_t>(N) * N, complexd(0.0, 0.0));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(j) * N + i] = f.at(i, j);
    fft2(g, N, FFTW_FORWARD);
    for (int kj = 0; kj < N; ++kj)
        for (int ki = 0; ki < N; ++ki) {
            const complexd xi(freq_index(ki, N), freq_index(kj, N));
            auto& v = g[static_cast<std::size_t>(kj) * N + ki];
            v = (xi == complexd(0.0, 0.0)) ? complexd(0.0, 0.0) : v * std::conj(xi) / xi;
        }
    fft2(g, N, FFTW_BACKWARD);
    GridField out = GridField::zeros(f.origin, f.spacing, n);
    const double inv = 1.0 / (static_cast<double>(N) * N);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out.at(i, j) = g[static_cast<std::size_t>(j) * N + i] * inv;
    return out;
}

GridField beurling_truncated(const GridField& f, double eps) {
    if (!(eps >= 2.0 * f.spacing)) throw std::invalid_argument("beurling_truncated: eps below resolution");
    const int n = f.n, N = 2 * n;
    const auto& kfft = truncated_kernel_fft(n, f.spacing, eps);
    std::vector<complexd> g(static_cast<std::size_t>(N) * N, complexd(0.0, 0.0));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(j) * N + i] = f.at(i, j);
    fft2(g, N, FFTW_FORWARD);
    for (std::size_t idx = 0; idx < g.size(); ++idx) g[idx] *= kfft[idx];
    fft2(g, N, FFTW_BACKWARD);
    GridField out = GridField::zeros(f.origin, f.spacing, n);
    const double inv = 1.0 / (static_cast<double>(N) * N);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out.at(i, j) = g[static_cast<std::size_t>(j) * N + i] * inv;
    return out;
}

complexd beurling_truncated_at(const GridField& f, complexd z, double eps) {
    const double scale = f.spacing * f.spacing / std::numbers::pi;
    complexd acc(0.0, 0.0);
    for (int j = 0; j < f.n; ++j)
        for (int i = 0; i < f.n; ++i) {
            const complexd d = z - f.point(i, j);
            if (std::abs(d) <= eps) continue;
            acc -= f.at(i, j) * scale / (d * d);
        }
    return acc;
}

GridField beurling_maximal(const GridField& f, std::span<const double> eps_set) {
    if (eps_set.empty()) throw std::invalid_argument("beurling_maximal: empty eps_set");
    GridField out = GridField::zeros(f.origin, f.spacing, f.n);
    for (const double eps : eps_set) {
        const GridField s = beurling_truncated(f, eps);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = complexd(std::max(out.values[i].real(), std::abs(s.values[i])), 0.0);
    }
    return out;
}

namespace {
double square_h(const GaugeSpec& gauge, const PackedSquare& p) {
    return gauge.h(p.center(), p.side() / 2.0);
}
}  // namespace

PackingFamily build_packing(const GaugeSpec& gauge, int level, int budget, unsigned seed) {
    if (level < 1 || level > 30) throw std::invalid_argument("build_packing: level in [1,30]");
    if (budget < 1) throw std::invalid_argument("build_packing: budget >= 1");
    {
        // Light G2 screen: the packing condition is meaningful only for gauges
        // with summable dyadic growth.
        std::vector<std::pair<complexd, double>> probes{{complexd(0.5, 0.5), std::ldexp(1.0, -level)}};
        const auto rep = check_G2(gauge, probes, 15);
        if (rep.unbounded || rep.estimated_constant > 1e6)
            throw std::invalid_argument("build_packing: gauge fails the G2 screen");
    }

    std::mt19937_64 rng(seed);
    const std::int64_t side_cells = std::int64_t{1} << level;
    std::uniform_int_distribution<std::int64_t> pick(0, side_cells - 1);
    PackingFamily fam;
    int attempts = 0;
    while (static_cast<int>(fam.squares.size()) < budget && attempts < 200 * budget) {
        ++attempts;
        PackedSquare p{level, pick(rng), pick(rng), 0.0};
        bool ok = true;
        for (const auto& q : fam.squares)
            if (std::max(std::llabs(p.i - q.i), std::llabs(p.j - q.j)) < 3) {
                ok = false;
                break;
            }
        if (!ok) continue;
        p.h = square_h(gauge, p);
        if (p.h > 0.0) fam.squares.push_back(p);
    }

    // Packing ratio over every dyadic ancestor of a selected square.
    std::map<std::tuple<int, std::int64_t, std::int64_t>, double> sums;
    for (const auto& p : fam.squares)
        for (int lvl = level; lvl >= 0; --lvl)
            sums[{lvl, p.i >> (level - lvl), p.j >> (level - lvl)}] += p.h;
    for (const auto& [key, s] : sums) {
        const auto& [lvl, i, j] = key;
        const PackedSquare q{lvl, i, j, 0.0};
        const double hq = square_h(gauge, q);
        if (hq > 0.0) fam.c_pack = std::max(fam.c_pack, s / hq);
    }
    return fam;
}

namespace {
// Applies fn(i, j) over grid points lying inside the square.
template <typename F>
void for_square_points(const GridField& grid, complexd corner, double side, F&& fn) {
    const auto lo_i = static_cast<int>(std::ceil((corner.real() - grid.origin.real()) / grid.spacing - 1e-9));
    const auto lo_j = static_cast<int>(std::ceil((corner.imag() - grid.origin.imag()) / grid.spacing - 1e-9));
    const auto hi_i = static_cast<int>(std::floor((corner.real() + side - grid.origin.real()) / grid.spacing - 1e-9));
    const auto hi_j = static_cast<int>(std::floor((corner.imag() + side - grid.origin.imag()) / grid.spacing - 1e-9));
    for (int j = std::max(lo_j, 0); j <= std::min(hi_j, grid.n - 1); ++j)
        for (int i = std::max(lo_i, 0); i <= std::min(hi_i, grid.n - 1); ++i) fn(i, j);
}
}  // namespace

Weight build_weight(const PackingFamily& family, complexd origin, double spacing, int n) {
    Weight w;
    w.family = family;
    w.values = GridField::zeros(origin, spacing, n);
    for (std::size_t idx = 0; idx < family.squares.size(); ++idx) {
        const auto& p = family.squares[idx];
        if (p.side() < 4.0 * spacing) {
            w.unresolved.push_back(idx);
            continue;
        }
        const double density = p.h / (p.side() * p.side());
        for_square_points(w.values, p.corner(), p.side(),
                          [&](int i, int j) { w.values.at(i, j) += density; });
    }
    return w;
}

namespace {
// Inclusive summed-area table: S[(j+1)*(n+1) + i+1] = sum over [0..i]x[0..j].
std::vector<double> summed_area(const GridField& g, auto&& value) {
    const int n = g.n;
    std::vector<double> S(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            S[static_cast<std::size_t>(j + 1) * (n + 1) + i + 1] =
                value(g.at(i, j)) + S[static_cast<std::size_t>(j) * (n + 1) + i + 1] +
                S[static_cast<std::size_t>(j + 1) * (n + 1) + i] -
                S[static_cast<std::size_t>(j) * (n + 1) + i];
    return S;
}

double box_sum(const std::vector<double>& S, int n, int i0, int j0, int i1, int j1) {
    i0 = std::max(i0, 0);
    j0 = std::max(j0, 0);
    i1 = std::min(i1, n - 1);
    j1 = std::min(j1, n - 1);
    if (i0 > i1 || j0 > j1) return 0.0;
    const auto at = [&](int i, int j) { return S[static_cast<std::size_t>(j) * (n + 1) + i]; };
    return at(i1 + 1, j1 + 1) - at(i0, j1 + 1) - at(i1 + 1, j0) + at(i0, j0);
}
}  // namespace

std::pair<GridField, GridField> maximal_functions(const GridField& f, const Weight& w) {
    if (w.values.n != f.n) throw std::invalid_argument("maximal_functions: grid shapes differ");
    const int n = f.n;
    const auto Sabs = summed_area(f, [](complexd v) { return std::abs(v); });
    const auto Sw = summed_area(w.values, [](complexd v) { return v.real(); });
    GridField fw = f;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) fw.at(i, j) = std::abs(f.at(i, j)) * w.values.at(i, j).real();
    const auto Swf = summed_area(fw, [](complexd v) { return v.real(); });

    GridField mf = GridField::zeros(f.origin, f.spacing, n);
    GridField mwf = GridField::zeros(f.origin, f.spacing, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double best = 0.0, best_w = -1.0;
            for (int h = 1; h <= n; h *= 2) {
                const int i0 = i - h, i1 = i + h, j0 = j - h, j1 = j + h;
                const double cells = static_cast<double>(std::min(i1, n - 1) - std::max(i0, 0) + 1) *
                                     (std::min(j1, n - 1) - std::max(j0, 0) + 1);
                best = std::max(best, box_sum(Sabs, n, i0, j0, i1, j1) / cells);
                const double wq = box_sum(Sw, n, i0, j0, i1, j1);
                if (wq > 0.0) best_w = std::max(best_w, box_sum(Swf, n, i0, j0, i1, j1) / wq);
            }
            mf.at(i, j) = best;
            mwf.at(i, j) = best_w >= 0.0 ? best_w : std::numeric_limits<double>::quiet_NaN();
        }
    return {std::move(mf), std::move(mwf)};
}

double check_local_A1(const Weight& w, std::span<const std::pair<complexd, SquareRegion>> probes) {
    const GridField& g = w.values;
    double sup = 0.0;
    for (const auto& [x, Q] : probes) {
        const int i = static_cast<int>(std::lround((x.real() - g.origin.real()) / g.spacing));
        const int j = static_cast<int>(std::lround((x.imag() - g.origin.imag()) / g.spacing));
        if (i < 0 || i >= g.n || j < 0 || j >= g.n || g.at(i, j).real() <= 0.0)
            throw std::invalid_argument("check_local_A1: probe point off the family support");
        double wq = 0.0;
        for_square_points(g, Q.corner, Q.side,
                          [&](int ii, int jj) { wq += g.at(ii, jj).real(); });
        wq *= g.spacing * g.spacing;
        sup = std::max(sup, (wq / (Q.side * Q.side)) / g.at(i, j).real());
    }
    return sup;
}

WeightedNormReport weighted_norm_harness(const Weight& w, double p, int trials, unsigned seed) {
    if (!(p > 1.0)) throw std::invalid_argument("weighted_norm_harness: p > 1");
    if (trials < 1) throw std::invalid_argument("weighted_norm_harness: trials >= 1");
    const GridField& wg = w.values;
    const int n = wg.n;
    const double area = wg.spacing * wg.spacing;

    std::vector<double> ladder;
    for (double eps = 2.0 * wg.spacing; eps <= n * wg.spacing / 4.0; eps *= 2.0) ladder.push_back(eps);
    if (ladder.empty()) ladder.push_back(2.0 * wg.spacing);

    WeightedNormReport rep;
    for (int g = 0; g <= 8; ++g) rep.goodlambda.emplace_back(std::ldexp(1.0, -g), 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        GridField f = GridField::zeros(wg.origin, wg.spacing, n);
        if (trial % 3 == 2 && !w.family.squares.empty()) {
            // Adversarial spike: all mass on one square.
            const auto& sq = w.family.squares[rng() % w.family.squares.size()];
            for_square_points(f, sq.corner(), sq.side(),
                              [&](int i, int j) { f.at(i, j) = complexd(1.0, 0.0); });
        } else {
            for (const auto& sq : w.family.squares) {
                const complexd amp(gauss(rng), gauss(rng));
                for_square_points(f, sq.corner(), sq.side(), [&](int i, int j) { f.at(i, j) = amp; });
            }
        }

        const GridField sf = beurling_maximal(f, ladder);
        const auto [mf, mwf] = maximal_functions(f, w);

        double num = 0.0, den = 0.0, l1 = 0.0, smax = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double om = wg.at(i, j).real();
                if (om <= 0.0) continue;
                const double fv = std::abs(f.at(i, j)), sv = sf.at(i, j).real();
                num += std::pow(sv, p) * om;
                den += std::pow(fv, p) * om;
                l1 += fv * om;
                smax = std::max(smax, sv);
            }
        if (den <= 0.0) {
            rep.rows.push_back({trial, 0.0, 0.0});
            continue;
        }
        WeightedTrialRow row{trial, std::pow(num / den, 1.0 / p), 0.0};

        for (double lam = smax / 2.0; lam > smax * 1e-7 && lam > 0.0; lam /= 2.0) {
            double above = 0.0, above10 = 0.0;
            std::vector<double> above_gamma(rep.goodlambda.size(), 0.0);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double om = wg.at(i, j).real();
                    if (om <= 0.0) continue;
                    const double sv = sf.at(i, j).real();
                    if (sv <= lam) continue;
                    above += om;
                    if (sv > 10.0 * lam) {
                        above10 += om;
                        const double m = mwf.at(i, j).real();
                        for (std::size_t gidx = 0; gidx < rep.goodlambda.size(); ++gidx)
                            if (!(m > rep.goodlambda[gidx].first * lam)) above_gamma[gidx] += om;
                    }
                }
            if (above <= 0.0) continue;
            row.weak11 = std::max(row.weak11, lam * above * area / (l1 * area));
            for (std::size_t gidx = 0; gidx < rep.goodlambda.size(); ++gidx)
                rep.goodlambda[gidx].second =
                    std::max(rep.goodlambda[gidx].second, above_gamma[gidx] / above);
        }
        rep.ratio_max = std::max(rep.ratio_max, row.ratio);
        rep.weak11_max = std::max(rep.weak11_max, row.weak11);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace qclab
