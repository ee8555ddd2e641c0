#include "qclab/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <numbers>
#include <ostream>
#include <random>

#include "json.hpp"

namespace qclab {

double derive_sigma(double R, double t, double K, double d) {
    if (!(R > 0.0 && R <= 0.01)) throw std::invalid_argument("derive_sigma: R must be in (0, 1/100]");
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("derive_sigma: t in (0,2)");
    if (!(K >= 1.0)) throw std::invalid_argument("derive_sigma: K >= 1");
    if (!(d >= 1.0)) throw std::invalid_argument("derive_sigma: d >= 1");
    const double sigma = std::pow(R, (2.0 - t) / (t * K)) * d;
    if (sigma > 0.01) throw std::invalid_argument("derive_sigma: sigma exceeds 1/100");
    return sigma;
}

double CantorParams::sigma(int level) const {
    const auto& L = levels.at(static_cast<std::size_t>(level));
    return derive_sigma(L.R, t, K, L.d);
}

void CantorParams::validate() const {
    if (!(K >= 1.0)) throw std::invalid_argument("CantorParams: K >= 1");
    if (!(t > 0.0 && t < 2.0)) throw std::invalid_argument("CantorParams: t in (0,2)");
    for (int n = 0; n < depth(); ++n) {
        const auto& L = levels[static_cast<std::size_t>(n)];
        if (!(L.count >= 1)) throw std::invalid_argument("CantorParams: count >= 1");
        if (!(L.fill_deficit >= 0.0 && L.fill_deficit < 1.0))
            throw std::invalid_argument("CantorParams: fill_deficit in [0,1)");
        (void)sigma(n);  // checks R, d and the sigma <= 1/100 guard
    }
}

CantorParams CantorParams::uniform(double K, double t, int depth, double R, std::int64_t count,
                                   double fill_deficit) {
    CantorParams p;
    p.K = K;
    p.t = t;
    p.levels.assign(static_cast<std::size_t>(depth), CantorLevel{R, 1.0, count, fill_deficit});
    p.validate();
    return p;
}

CantorParams CantorParams::sharp(double K, double t, int depth, double R, std::int64_t count,
                                 double delta) {
    CantorParams p;
    p.K = K;
    p.t = t;
    p.levels.reserve(static_cast<std::size_t>(depth));
    for (int j = 1; j <= depth; ++j) {
        const double dj = std::pow((j + 1.0) / j, delta);
        p.levels.push_back(CantorLevel{R, dj, count, 0.0});
    }
    p.validate();
    return p;
}

std::string CantorParams::to_json() const {
    nlohmann::json j;
    j["K"] = K;
    j["t"] = t;
    j["depth"] = depth();
    auto &R = j["R"], &d = j["d"], &cnt = j["disks_per_level"], &fd = j["fill_deficit"];
    for (const auto& L : levels) {
        R.push_back(L.R);
        d.push_back(L.d);
        cnt.push_back(L.count);
        fd.push_back(L.fill_deficit);
    }
    return j.dump();
}

CantorParams CantorParams::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const double K = j.at("K").get<double>();
    const double t = j.at("t").get<double>();
    const int depth = j.at("depth").get<int>();

    auto per_level = [&](const char* key, double fallback) {
        std::vector<double> v(static_cast<std::size_t>(depth), fallback);
        if (j.contains(key)) {
            const auto& arr = j[key];
            if (arr.is_number()) {
                std::fill(v.begin(), v.end(), arr.get<double>());
            } else {
                for (int n = 0; n < depth; ++n)
                    v[static_cast<std::size_t>(n)] =
                        arr.at(static_cast<std::size_t>(std::min<int>(n, static_cast<int>(arr.size()) - 1)))
                            .get<double>();
            }
        }
        return v;
    };

    const auto R = per_level("R", 1e-4);
    const auto cnt = per_level("disks_per_level", 1.0);
    const auto fd = per_level("fill_deficit", 0.0);
    std::vector<double> d(static_cast<std::size_t>(depth), 1.0);
    const std::string mode = j.value("d_mode", "unit");
    if (mode == "sharp") {
        const double delta = j.at("delta").get<double>();
        for (int n = 1; n <= depth; ++n)
            d[static_cast<std::size_t>(n - 1)] = std::pow((n + 1.0) / n, delta);
    } else if (j.contains("d")) {
        d = per_level("d", 1.0);
    }

    CantorParams p;
    p.K = K;
    p.t = t;
    for (int n = 0; n < depth; ++n)
        p.levels.push_back(CantorLevel{R[static_cast<std::size_t>(n)], d[static_cast<std::size_t>(n)],
                                       static_cast<std::int64_t>(cnt[static_cast<std::size_t>(n)]),
                                       fd[static_cast<std::size_t>(n)]});
    p.validate();
    return p;
}

DiskAddress DiskAddress::path(int depth) {
    DiskAddress a;
    a.js.assign(static_cast<std::size_t>(depth), 0);
    a.is.assign(static_cast<std::size_t>(depth), 0);
    return a;
}

namespace {
void check_address(const CantorParams& params, const DiskAddress& addr) {
    if (addr.js.size() != addr.is.size()) throw std::invalid_argument("DiskAddress: js/is length mismatch");
    if (addr.depth() > params.depth()) throw std::invalid_argument("DiskAddress: deeper than the construction");
    for (int n = 0; n < addr.depth(); ++n)
        if (addr.is[static_cast<std::size_t>(n)] < 0 ||
            addr.is[static_cast<std::size_t>(n)] >= params.levels[static_cast<std::size_t>(n)].count)
            throw std::invalid_argument("DiskAddress: position index out of range");
}
}  // namespace

double source_radius(const CantorParams& params, const DiskAddress& addr) {
    check_address(params, addr);
    double log_r = 0.0;
    for (int n = 0; n < addr.depth(); ++n)
        log_r += params.K * std::log(params.sigma(n)) + std::log(params.levels[static_cast<std::size_t>(n)].R);
    return std::exp(log_r);
}

double target_radius(const CantorParams& params, const DiskAddress& addr) {
    check_address(params, addr);
    double log_r = 0.0;
    for (int n = 0; n < addr.depth(); ++n)
        log_r += std::log(params.sigma(n)) + std::log(params.levels[static_cast<std::size_t>(n)].R);
    return std::exp(log_r);
}

double block_mass(const CantorParams& params, const DiskAddress& addr) {
    check_address(params, addr);
    double log_m = 0.0;
    for (int n = 0; n < addr.depth(); ++n) log_m += 2.0 * std::log(params.levels[static_cast<std::size_t>(n)].R);
    for (int n = addr.depth(); n < params.depth(); ++n)
        log_m += std::log1p(-params.levels[static_cast<std::size_t>(n)].fill_deficit);
    return std::exp(log_m);
}

std::vector<GenerationData> generation_data(const CantorParams& params) {
    // Renormalization prefactor: product of (1 - eps_n) over all built levels.
    double log_renorm = 0.0;
    for (const auto& L : params.levels) log_renorm += std::log1p(-L.fill_deficit);

    std::vector<GenerationData> out(static_cast<std::size_t>(params.depth()));
    double ls = 0.0, lt = 0.0, lm = 0.0, lc = 0.0, consumed = 0.0;
    for (int n = 0; n < params.depth(); ++n) {
        const auto& L = params.levels[static_cast<std::size_t>(n)];
        const double lsig = std::log(params.sigma(n));
        ls += params.K * lsig + std::log(L.R);
        lt += lsig + std::log(L.R);
        lm += 2.0 * std::log(L.R);
        lc += std::log(static_cast<double>(L.count));
        consumed += std::log1p(-L.fill_deficit);
        out[static_cast<std::size_t>(n)] = {ls, lt, lm + (log_renorm - consumed), lc};
    }
    return out;
}

std::vector<double> wolff_on_cantor(const CantorParams& params, const RieszIndex& idx,
                                    CantorSide side, int n_max) {
    if (n_max > params.depth()) throw std::invalid_argument("wolff_on_cantor: n_max exceeds depth");
    const auto gen = generation_data(params);
    const double expo = 2.0 - idx.alpha * idx.p;
    const double s = idx.p_conj() - 1.0;
    std::vector<double> partial(static_cast<std::size_t>(n_max));
    double acc = 0.0;
    for (int n = 0; n < n_max; ++n) {
        const auto& g = gen[static_cast<std::size_t>(n)];
        const double log_r = (side == CantorSide::Source) ? g.log_source_radius : g.log_target_radius;
        acc += std::exp(s * (g.log_mass - expo * log_r));
        partial[static_cast<std::size_t>(n)] = acc;
    }
    return partial;
}

std::vector<complexd> place_level(std::int64_t count, double R, unsigned seed) {
    if (count < 1) throw std::invalid_argument("place_level: count >= 1");
    if (!(R > 0.0 && R <= 1.0)) throw std::invalid_argument("place_level: R in (0,1]");
    if (count == 1) return {complexd(0.0, 0.0)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<complexd> centers;
    int attempts = 0;
    const int max_attempts = 100000;
    while (static_cast<std::int64_t>(centers.size()) < count && attempts < max_attempts) {
        ++attempts;
        const double rho = (1.0 - R) * std::sqrt(unit(rng));
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        const complexd c = std::polar(rho, phi);
        bool ok = true;
        for (const auto& other : centers)
            if (std::abs(c - other) < 2.0 * R) {
                ok = false;
                break;
            }
        if (ok) centers.push_back(c);
    }
    if (static_cast<std::int64_t>(centers.size()) < count)
        throw std::runtime_error("place_level: packing infeasible");
    return centers;
}

CantorMap::CantorMap(CantorParams params, unsigned seed) : params_(std::move(params)) {
    params_.validate();
    offsets_.resize(static_cast<std::size_t>(params_.depth()));
    for (int n = 0; n < params_.depth(); ++n) {
        const auto& L = params_.levels[static_cast<std::size_t>(n)];
        try {
            offsets_[static_cast<std::size_t>(n)] =
                place_level(L.count, L.R, seed + static_cast<unsigned>(n));
        } catch (const std::runtime_error&) {
            throw std::runtime_error("CantorMap: packing infeasible at level " + std::to_string(n));
        }
    }
}

complexd CantorMap::source_center(const DiskAddress& addr) const {
    check_address(params_, addr);
    complexd c(0.0, 0.0);
    double s = 1.0;  // current generating radius, root is the unit disk
    for (int n = 0; n < addr.depth(); ++n) {
        c += s * offsets_[static_cast<std::size_t>(n)][static_cast<std::size_t>(addr.is[static_cast<std::size_t>(n)])];
        s *= std::pow(params_.sigma(n), params_.K) * params_.levels[static_cast<std::size_t>(n)].R;
    }
    return c;
}

complexd CantorMap::target_center(const DiskAddress& addr) const {
    check_address(params_, addr);
    complexd c(0.0, 0.0);
    double t = 1.0;
    for (int n = 0; n < addr.depth(); ++n) {
        c += t * offsets_[static_cast<std::size_t>(n)][static_cast<std::size_t>(addr.is[static_cast<std::size_t>(n)])];
        t *= params_.sigma(n) * params_.levels[static_cast<std::size_t>(n)].R;
    }
    return c;
}

BallBracket CantorMap::image_ball(complexd center, double radius) const {
    if (!(radius > 0.0)) throw std::invalid_argument("image_ball: radius must be positive");
    // Balls at least as large as the root map to comparable balls: the map is
    // conformal outside the unit disk with derivative -> 1.
    if (radius >= 1.0) return {center, radius, radius};
    // A depth-0 construction is the identity map.
    if (params_.depth() == 0) return {center, radius, radius};

    // Chain of generating disks containing the point.
    struct Link {
        double s, t;       // source / target generating radii
        complexd t_center; // target center
    };
    std::vector<Link> chain{{1.0, 1.0, complexd(0.0, 0.0)}};
    complexd src_c(0.0, 0.0), tgt_c(0.0, 0.0);
    double s = 1.0, t = 1.0;
    for (int n = 0; n < params_.depth(); ++n) {
        const auto& L = params_.levels[static_cast<std::size_t>(n)];
        const auto& offs = offsets_[static_cast<std::size_t>(n)];
        // Child whose protecting disk (relative radius R) contains the point.
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < offs.size(); ++i) {
            const double d = std::abs(center - (src_c + s * offs[i]));
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0 || best_d > s * L.R) break;
        src_c += s * offs[static_cast<std::size_t>(best)];
        tgt_c += t * offs[static_cast<std::size_t>(best)];
        s *= std::pow(params_.sigma(n), params_.K) * L.R;
        t *= params_.sigma(n) * L.R;
        chain.push_back({s, t, tgt_c});
    }

    // Deepest chain disk with source radius >= the ball: the enclosing disk.
    const double tol = 1e-9;
    int hi = -1;
    for (std::size_t i = 0; i < chain.size(); ++i)
        if (chain[i].s >= radius * (1.0 - tol)) hi = static_cast<int>(i);
    if (hi < 0) return {center, radius, radius};  // ball larger than every chain disk near it
    const Link& enc = chain[static_cast<std::size_t>(hi)];
    if (std::abs(enc.s - radius) <= tol * radius)  // exact construction disk
        return {enc.t_center, enc.t, enc.t};
    if (hi + 1 < static_cast<int>(chain.size())) {
        const Link& inner = chain[static_cast<std::size_t>(hi + 1)];
        return {enc.t_center, inner.t, enc.t};
    }
    throw std::runtime_error("image_ball: ball finer than the built depth");
}

std::pair<DiscreteMeasure, DiscreteMeasure> CantorMap::discretize(int N) const {
    if (N > params_.depth()) throw std::invalid_argument("discretize: N exceeds depth");
    std::vector<Atom> mu_atoms, nu_atoms;
    if (N == 0) {
        double log_m = 0.0;
        for (const auto& L : params_.levels) log_m += std::log1p(-L.fill_deficit);
        const double m = std::exp(log_m);
        mu_atoms.push_back({complexd(0, 0), m});
        nu_atoms.push_back({complexd(0, 0), m});
        return {DiscreteMeasure(std::move(mu_atoms)), DiscreteMeasure(std::move(nu_atoms))};
    }
    DiskAddress addr = DiskAddress::path(N);
    const double mass = block_mass(params_, addr);  // position-independent
    // Depth-first enumeration of position indices.
    std::vector<int>& is = addr.is;
    std::fill(is.begin(), is.end(), 0);
    while (true) {
        mu_atoms.push_back({target_center(addr), mass});
        nu_atoms.push_back({source_center(addr), mass});
        int n = N - 1;
        while (n >= 0) {
            if (++is[static_cast<std::size_t>(n)] < params_.levels[static_cast<std::size_t>(n)].count) break;
            is[static_cast<std::size_t>(n)] = 0;
            --n;
        }
        if (n < 0) break;
    }
    return {DiscreteMeasure(std::move(mu_atoms)), DiscreteMeasure(std::move(nu_atoms))};
}

void CantorMap::export_tree(std::ostream& os, int N) const {
    os << "address,source_radius,target_radius,mass,center_x,center_y\n";
    os.precision(17);
    for (int depth = 1; depth <= N; ++depth) {
        DiskAddress addr = DiskAddress::path(depth);
        const double sr = source_radius(params_, addr);
        const double tr = target_radius(params_, addr);
        const double m = block_mass(params_, addr);
        std::vector<int>& is = addr.is;
        while (true) {
            os << depth << ':';
            for (int n = 0; n < depth; ++n) os << (n ? "." : "") << is[static_cast<std::size_t>(n)];
            const complexd c = source_center(addr);
            os << ',' << sr << ',' << tr << ',' << m << ',' << c.real() << ',' << c.imag() << '\n';
            int n = depth - 1;
            while (n >= 0) {
                if (++is[static_cast<std::size_t>(n)] < params_.levels[static_cast<std::size_t>(n)].count) break;
                is[static_cast<std::size_t>(n)] = 0;
                --n;
            }
            if (n < 0) break;
        }
    }
}

SharpnessVerdict sharpness_harness(double t, double K, double q, double p_tilde, int n_max) {
    if (!(q > 1.0)) throw std::invalid_argument("sharpness_harness: q > 1");
    const double t_prime = 2.0 * K * t / (2.0 + (K - 1.0) * t);
    const double p = 1.0 + (K * t / t_prime) * (q - 1.0);
    if (!(p_tilde > p)) throw std::invalid_argument("sharpness_harness: p_tilde must exceed p");

    SharpnessVerdict v;
    v.indices.q = q;
    v.indices.beta = (2.0 - t_prime) / q;
    v.indices.p_t = p_tilde;
    v.indices.alpha_t = (2.0 - t) / p_tilde;
    const double pt_conj_m1 = 1.0 / (p_tilde - 1.0);  // p~' - 1
    v.indices.delta = 1.0 / (t * K * pt_conj_m1);
    const double q_conj_m1 = 1.0 / (q - 1.0);
    v.target_exponent = t_prime * q_conj_m1 * v.indices.delta;
    v.source_exponent = t * K * pt_conj_m1 * v.indices.delta;  // equals 1 by construction
    v.target_converges = v.target_exponent > 1.0;
    v.source_diverges = v.source_exponent <= 1.0;

    // Numerical side: generation sums of the sharp construction. R is chosen so
    // that sigma stays below 1/100 despite d_1 = 2^delta.
    const double d_max = std::pow(2.0, v.indices.delta);
    double R = std::pow(0.005 / d_max, t * K / (2.0 - t));
    R = std::min(R, 1e-4);
    const auto count = static_cast<std::int64_t>(std::llround(1.0 / (R * R)));
    CantorParams params = CantorParams::sharp(K, t, n_max, R, count, v.indices.delta);

    const RieszIndex target_idx(v.indices.beta, q);
    const auto target_sums = wolff_on_cantor(params, target_idx, CantorSide::Target, n_max);
    v.target_partial_sum = target_sums.back();
    // Tail: summands are (n+1)^{-e}; integral bound n_max^{1-e}/(e-1).
    const double e = v.target_exponent;
    v.target_tail_bound = (e > 1.0) ? std::pow(static_cast<double>(n_max), 1.0 - e) / (e - 1.0)
                                    : std::numeric_limits<double>::infinity();

    const RieszIndex source_idx(v.indices.alpha_t, p_tilde);
    const auto source_sums = wolff_on_cantor(params, source_idx, CantorSide::Source, n_max);
    // Log-slope fit of S_N against ln N over [10^3, n_max].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (int N = 1000; N <= n_max; N = static_cast<int>(N * 1.5) + 1) {
        const double x = std::log(static_cast<double>(N));
        const double y = source_sums[static_cast<std::size_t>(N - 1)];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
    }
    v.source_log_slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    return v;
}

Lemtec5Result check_lemtec5(const CantorMap& cmap, std::shared_ptr<const DiscreteMeasure> base_mu,
                            double a, double t, double d, double b,
                            std::span<const std::pair<complexd, double>> probes) {
    if (!(d > 0.0 && b > 0.0)) throw std::invalid_argument("check_lemtec5: d, b > 0");
    Lemtec5Result out;
    auto base = std::make_shared<GaugeSpec>(GaugeSpec::measure_backed(t, a, std::move(base_mu)));
    auto map_ptr = std::shared_ptr<const BallImageOracle>(&cmap, [](const BallImageOracle*) {});
    const GaugeSpec composed = GaugeSpec::cantor_composed(t, base, map_ptr, d);

    const int j_max = 40;
    for (const auto& [x, r] : probes) {
        double sum = 0.0, last_term = 0.0;
        for (int j = 0; j <= j_max; ++j) {
            last_term = composed.epsilon(x, std::ldexp(r, j)) / std::pow(2.0, b * j);
            sum += last_term;
        }
        const double den = composed.epsilon(x, r);
        if (den > 0.0) out.sup_C = std::max(out.sup_C, sum / den);
        if (sum > 0.0 && last_term > 0.01 * sum) out.tail_warning = true;
    }

    std::vector<std::pair<complexd, double>> g2_probes(probes.begin(), probes.end());
    out.composed_g2 = check_G2(composed, g2_probes, 30);
    return out;
}

}  // namespace qclab
