#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qclab/beurling.hpp"
#include "qclab/cantor.hpp"
#include "qclab/contents.hpp"
#include "qclab/distortion.hpp"
#include "qclab/gauge.hpp"
#include "qclab/measure.hpp"
#include "qclab/wolff.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qclab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Ctx {
    json config;
    std::string config_text;
    fs::path config_dir;
    fs::path out;
    unsigned seed = 0;
};

std::string hash_hex(const std::string& text) {
    // FNV-1a, enough to fingerprint a config for the manifest.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_manifest(const Ctx& ctx, const std::string& command) {
    json m;
    m["command"] = command;
    m["config_hash"] = hash_hex(ctx.config_text);
    m["seed"] = ctx.seed;
    m["version"] = kVersion;
    std::ofstream(ctx.out / "manifest.json") << m.dump(2) << "\n";
}

std::ofstream open_csv(const Ctx& ctx, const std::string& name) {
    std::ofstream os(ctx.out / name);
    os.precision(17);
    return os;
}

CantorParams params_from(const json& j) { return CantorParams::from_json(j.dump()); }

DiscreteMeasure load_measure(const Ctx& ctx, const std::string& ref) {
    std::ifstream is(ctx.config_dir / ref);
    if (!is) throw std::invalid_argument("cannot open measure file: " + ref);
    return DiscreteMeasure::from_csv(is);
}

std::shared_ptr<GaugeSpec> gauge_from(const Ctx& ctx, const json& j,
                                      std::shared_ptr<const BallImageOracle> map = nullptr) {
    const std::string kind = j.value("kind", "constant");
    const double t = j.at("t").get<double>();
    if (kind == "constant") return std::make_shared<GaugeSpec>(GaugeSpec::constant(t));
    if (kind == "measure") {
        auto mu = std::make_shared<DiscreteMeasure>(load_measure(ctx, j.at("measure_ref").get<std::string>()));
        return std::make_shared<GaugeSpec>(GaugeSpec::measure_backed(t, j.at("a").get<double>(), mu));
    }
    if (kind == "cantor") {
        if (!map) throw std::invalid_argument("cantor gauge needs a construction map in this command");
        auto mu = std::make_shared<DiscreteMeasure>(load_measure(ctx, j.at("measure_ref").get<std::string>()));
        auto base = std::make_shared<GaugeSpec>(GaugeSpec::measure_backed(t, j.at("a").get<double>(), mu));
        return std::make_shared<GaugeSpec>(GaugeSpec::cantor_composed(t, base, map, j.at("d").get<double>()));
    }
    throw std::invalid_argument("unknown gauge kind: " + kind);
}

int cmd_exponents(const Ctx& ctx) {
    auto csv = open_csv(ctx, "exponents.csv");
    csv << "K,t,t_prime\n";
    for (const double K : ctx.config.at("K").get<std::vector<double>>())
        for (const double t : ctx.config.at("t").get<std::vector<double>>())
            csv << K << ',' << t << ',' << t_prime(t, K) << "\r\n";
    if (ctx.config.contains("beta")) {
        auto icsv = open_csv(ctx, "indices.csv");
        icsv << "K,beta,q,t_prime,t,p,alpha\n";
        for (const double K : ctx.config.at("K").get<std::vector<double>>())
            for (const double beta : ctx.config.at("beta").get<std::vector<double>>())
                for (const double q : ctx.config.at("q").get<std::vector<double>>()) {
                    const auto idx = indices_from_target(beta, q, K);
                    icsv << K << ',' << beta << ',' << q << ',' << idx.t_prime << ',' << idx.t << ','
                         << idx.p << ',' << idx.alpha << "\r\n";
                }
    }
    return 0;
}

int cmd_cantor_build(const Ctx& ctx) {
    const auto params = params_from(ctx.config.at("params"));
    CantorMap map(params, ctx.seed);
    const int N = ctx.config.value("export_depth", std::min(params.depth(), 3));
    auto csv = open_csv(ctx, "tree.csv");
    map.export_tree(csv, N);
    const auto [mu, nu] = map.discretize(N);
    auto mcsv = open_csv(ctx, "mu.csv");
    mu.to_csv(mcsv);
    auto ncsv = open_csv(ctx, "nu.csv");
    nu.to_csv(ncsv);
    std::ofstream(ctx.out / "params.json") << params.to_json() << "\n";
    return 0;
}

int cmd_cantor_wolff(const Ctx& ctx) {
    const auto params = params_from(ctx.config.at("params"));
    const RieszIndex idx(ctx.config.at("alpha").get<double>(), ctx.config.at("p").get<double>());
    const auto side = ctx.config.value("side", "target") == std::string("source") ? CantorSide::Source
                                                                                  : CantorSide::Target;
    const int n_max = ctx.config.value("n_max", params.depth());
    const auto sums = wolff_on_cantor(params, idx, side, n_max);
    auto csv = open_csv(ctx, "wolff.csv");
    csv << "N,partial_sum\n";
    for (std::size_t i = 0; i < sums.size(); ++i) csv << i + 1 << ',' << sums[i] << "\r\n";
    return 0;
}

int cmd_capacity(const Ctx& ctx) {
    const auto mu = load_measure(ctx, ctx.config.at("measure_ref").get<std::string>());
    const RieszIndex idx(ctx.config.at("alpha").get<double>(), ctx.config.at("p").get<double>());
    std::vector<complexd> probes;
    for (const auto& a : mu.atoms()) probes.push_back(a.pos);
    const auto res = capacity_lower(mu, idx, probes, WolffOptions::for_measure(mu));
    json out{{"value", res.value}, {"wolff_sup", res.wolff_sup}, {"diverged", res.diverged}};
    std::ofstream(ctx.out / "capacity.json") << out.dump(2) << "\n";
    return res.diverged ? 3 : 0;
}

DyadicCellSet cells_from(const json& j) { return DyadicCellSet::from_json(j.dump()); }

std::vector<Ball> candidates_from(const json& j) {
    std::vector<Ball> out;
    for (const auto& row : j)
        out.emplace_back(complexd(row.at(0).get<double>(), row.at(1).get<double>()), row.at(2).get<double>());
    return out;
}

int cmd_content(const Ctx& ctx) {
    const auto target = cells_from(ctx.config.at("target"));
    const auto gauge = gauge_from(ctx, ctx.config.at("gauge"));
    std::vector<Ball> candidates = ctx.config.contains("candidates")
                                       ? candidates_from(ctx.config.at("candidates"))
                                       : cell_balls(target);
    const auto res = content_upper(target, *gauge, candidates);
    json out{{"value", res.value}, {"uncoverable", res.uncoverable}, {"cover_size", res.cover.size()}};
    std::ofstream(ctx.out / "content.json") << out.dump(2) << "\n";
    return res.uncoverable ? 3 : 0;
}

int cmd_frostman(const Ctx& ctx) {
    const auto target = cells_from(ctx.config.at("target"));
    const auto gauge = gauge_from(ctx, ctx.config.at("gauge"));
    FrostmanReport report;
    const auto nu = frostman_construct(target, *gauge, ctx.config.value("coarsest_level", 0), &report);
    auto csv = open_csv(ctx, "frostman.csv");
    nu.to_csv(csv);
    json out{{"total_mass", report.total_mass},
             {"levels_swept", report.levels_swept},
             {"max_cap_ratio", report.max_cap_ratio}};
    std::ofstream(ctx.out / "frostman.json") << out.dump(2) << "\n";
    return 0;
}

int cmd_beurling_selftest(const Ctx& ctx) {
    const int n = ctx.config.value("n", 1024);
    const double spacing = 4.0 / n;
    auto f = GridField::zeros(complexd(-2.0, -2.0), spacing, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (std::abs(f.point(i, j)) < 1.0) f.at(i, j) = 1.0;
    const auto S = beurling_full(f);
    double interior_max = 0.0, exterior_rel = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const complexd z = f.point(i, j);
            const double az = std::abs(z);
            if (az < 0.8) interior_max = std::max(interior_max, std::abs(S.at(i, j)));
            if (az >= 1.5 && az < 1.9) {
                const complexd expect = -1.0 / (z * z);
                exterior_rel = std::max(exterior_rel, std::abs(S.at(i, j) - expect) / std::abs(expect));
            }
        }
    // Truncated FFT path against direct quadrature at probe points.
    const double eps = 8.0 * spacing;
    const auto St = beurling_truncated(f, eps);
    double trunc_rel = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int i = (k * 37) % n, j = (k * 53) % n;
        const complexd direct = beurling_truncated_at(f, f.point(i, j), eps);
        if (std::abs(direct) > 1e-6)
            trunc_rel = std::max(trunc_rel, std::abs(St.at(i, j) - direct) / std::abs(direct));
    }
    json out{{"n", n},
             {"interior_max", interior_max},
             {"exterior_rel_err", exterior_rel},
             {"truncated_vs_quadrature", trunc_rel}};
    std::ofstream(ctx.out / "selftest.json") << out.dump(2) << "\n";
    return (interior_max <= 0.05 && exterior_rel <= 0.05 && trunc_rel <= 0.02) ? 0 : 3;
}

int cmd_beurling_weighted(const Ctx& ctx) {
    const auto gauge = gauge_from(ctx, ctx.config.value("gauge", json{{"kind", "constant"}, {"t", 1.0}}));
    const int level = ctx.config.value("level", 4);
    const int budget = ctx.config.value("budget", 8);
    const int n = ctx.config.value("n", 256);
    const double p = ctx.config.value("p", 2.0);
    const int trials = ctx.config.value("trials", 6);
    const auto family = build_packing(*gauge, level, budget, ctx.seed);
    const auto w = build_weight(family, complexd(0.0, 0.0), 1.0 / n, n);
    const auto rep = weighted_norm_harness(w, p, trials, ctx.seed + 1);
    auto csv = open_csv(ctx, "weighted.csv");
    csv << "trial,p,ratio,weak11\n";
    for (const auto& row : rep.rows) csv << row.trial << ',' << p << ',' << row.ratio << ',' << row.weak11 << "\r\n";
    auto gcsv = open_csv(ctx, "goodlambda.csv");
    gcsv << "gamma,ratio\n";
    for (const auto& [gamma, ratio] : rep.goodlambda) gcsv << gamma << ',' << ratio << "\r\n";
    json out{{"c_pack", family.c_pack},
             {"squares", family.squares.size()},
             {"ratio_max", rep.ratio_max},
             {"weak11_max", rep.weak11_max}};
    std::ofstream(ctx.out / "weighted.json") << out.dump(2) << "\n";
    return 0;
}

int cmd_verify_thm11(const Ctx& ctx) {
    const auto params = params_from(ctx.config.at("params"));
    const auto idx = indices_from_target(ctx.config.at("beta").get<double>(),
                                         ctx.config.at("q").get<double>(), params.K);
    auto csv = open_csv(ctx, "thm11.csv");
    csv << "N,lhs,rhs,ratio\n";
    bool diverged = false;
    for (const int N : ctx.config.at("N").get<std::vector<int>>()) {
        const auto r = verify_thm11_on_cantor(params, idx, N);
        diverged = diverged || r.diverged;
        csv << N << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << "\r\n";
    }
    return diverged ? 3 : 0;
}

int cmd_verify_thm12(const Ctx& ctx) {
    const auto params = params_from(ctx.config.at("params"));
    auto csv = open_csv(ctx, "thm12.csv");
    csv << "N,lhs,rhs,ratio\n";
    for (const int N : ctx.config.at("N").get<std::vector<int>>()) {
        const auto r = verify_thm12_on_cantor(params, N);
        csv << N << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << "\r\n";
    }
    return 0;
}

int cmd_sharpness(const Ctx& ctx) {
    const auto v = sharpness_harness(ctx.config.at("t").get<double>(), ctx.config.at("K").get<double>(),
                                     ctx.config.at("q").get<double>(),
                                     ctx.config.at("p_tilde").get<double>(),
                                     ctx.config.value("n_max", 1000000));
    json out{{"beta", v.indices.beta},
             {"q", v.indices.q},
             {"alpha_tilde", v.indices.alpha_t},
             {"p_tilde", v.indices.p_t},
             {"delta", v.indices.delta},
             {"target_exponent", v.target_exponent},
             {"source_exponent", v.source_exponent},
             {"target_converges", v.target_converges},
             {"source_diverges", v.source_diverges},
             {"target_partial_sum", v.target_partial_sum},
             {"target_tail_bound", v.target_tail_bound},
             {"source_log_slope", v.source_log_slope}};
    std::ofstream(ctx.out / "sharpness.json") << out.dump(2) << "\n";
    return (v.target_converges && v.source_diverges) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qclab: gauge contents, Wolff potentials, Cantor constructions, Beurling bounds"};
    std::string command, config_path, out_dir;
    unsigned seed = 0;
    app.add_option("command", command, "subcommand to run")->required();
    app.add_option("--config", config_path, "JSON config path")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", seed, "random seed (overrides config)");
    CLI11_PARSE(app, argc, argv);

    const std::map<std::string, std::function<int(const Ctx&)>> commands{
        {"exponents", cmd_exponents},
        {"cantor-build", cmd_cantor_build},
        {"cantor-wolff", cmd_cantor_wolff},
        {"capacity", cmd_capacity},
        {"content", cmd_content},
        {"frostman", cmd_frostman},
        {"beurling-selftest", cmd_beurling_selftest},
        {"beurling-weighted", cmd_beurling_weighted},
        {"verify-thm11", cmd_verify_thm11},
        {"verify-thm12", cmd_verify_thm12},
        {"sharpness", cmd_sharpness},
    };
    const auto it = commands.find(command);
    if (it == commands.end()) {
        std::cerr << "unknown command: " << command << "\n";
        return 64;
    }

    Ctx ctx;
    try {
        std::ifstream is(config_path);
        if (!is) throw json::other_error::create(500, "cannot open config", nullptr);
        std::ostringstream buf;
        buf << is.rdbuf();
        ctx.config_text = buf.str();
        ctx.config = json::parse(ctx.config_text);
        ctx.config_dir = fs::path(config_path).parent_path();
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 65;
    }
    ctx.out = out_dir;
    ctx.seed = seed ? seed : ctx.config.value("seed", 1u);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);

    try {
        const int rc = it->second(ctx);
        write_manifest(ctx, command);
        return rc;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 65;
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
