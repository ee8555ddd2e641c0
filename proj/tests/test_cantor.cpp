#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qclab/cantor.hpp"

using namespace qclab;

TEST_CASE("derive_sigma") {
    // sigma = R^{(2-t)/(tK)} d, guarded to stay within the packing regime.
    CHECK(derive_sigma(1e-4, 1.0, 2.0, 1.0) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(derive_sigma(1e-2, 1.0, 1.0, 1.0) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK_THROWS_AS(derive_sigma(1e-2, 1.0, 1.0, 2.0), std::invalid_argument);   // sigma = 0.02
    CHECK_THROWS_AS(derive_sigma(0.2, 1.0, 1.0, 1.0), std::invalid_argument);    // R too large
    CHECK_THROWS_AS(derive_sigma(1e-4, 1.0, 2.0, 0.5), std::invalid_argument);   // d < 1
    CHECK_THROWS_AS(derive_sigma(1e-4, 2.5, 2.0, 1.0), std::invalid_argument);   // t out of range
}

TEST_CASE("radii and masses of uniform parameters") {
    const double K = 2.0, t = 1.0, R = 1e-4;
    const auto params = CantorParams::uniform(K, t, 3, R, 5);
    const double sigma = derive_sigma(R, t, K, 1.0);
    SUBCASE("radius products") {
        for (int n = 1; n <= 3; ++n) {
            const auto addr = DiskAddress::path(n);
            CHECK(source_radius(params, addr) ==
                  doctest::Approx(std::pow(std::pow(sigma, K) * R, n)).epsilon(1e-12));
            CHECK(target_radius(params, addr) ==
                  doctest::Approx(std::pow(sigma * R, n)).epsilon(1e-12));
            CHECK(block_mass(params, addr) == doctest::Approx(std::pow(R * R, n)).epsilon(1e-12));
        }
    }
    SUBCASE("dimensional identity: mass = s^t = tgt^{t'}") {
        const double tp = 2.0 * K * t / (2.0 + (K - 1.0) * t);
        for (int n = 1; n <= 3; ++n) {
            const auto addr = DiskAddress::path(n);
            const double m = block_mass(params, addr);
            CHECK(std::pow(source_radius(params, addr), t) == doctest::Approx(m).epsilon(1e-10));
            CHECK(std::pow(target_radius(params, addr), tp) == doctest::Approx(m).epsilon(1e-10));
        }
    }
    SUBCASE("K = 1 collapses source onto target") {
        const auto flat = CantorParams::uniform(1.0, 1.0, 4, 1e-3, 7);
        for (int n = 1; n <= 4; ++n) {
            const auto addr = DiskAddress::path(n);
            CHECK(source_radius(flat, addr) == doctest::Approx(target_radius(flat, addr)).epsilon(1e-14));
        }
    }
}

TEST_CASE("generation_data") {
    const auto params = CantorParams::uniform(2.0, 1.0, 6, 1e-4, 1000000, 0.25);
    const auto gens = generation_data(params);
    REQUIRE(gens.size() == 6);
    SUBCASE("log radii agree with the direct products") {
        const auto addr = DiskAddress::path(4);
        CHECK(gens[3].log_source_radius ==
              doctest::Approx(std::log(source_radius(params, addr))).epsilon(1e-12));
        CHECK(gens[3].log_target_radius ==
              doctest::Approx(std::log(target_radius(params, addr))).epsilon(1e-12));
    }
    SUBCASE("generation total = (count R^2)^N times the unbuilt-tail deficits") {
        const double total = std::exp(gens[2].log_count + gens[2].log_mass);
        CHECK(total == doctest::Approx(std::pow(1e6 * 1e-8, 3) * std::pow(0.75, 3)).epsilon(1e-10));
    }
    SUBCASE("counts multiply") {
        CHECK(gens[2].log_count == doctest::Approx(3.0 * std::log(1e6)).epsilon(1e-12));
    }
}

TEST_CASE("wolff_on_cantor") {
    SUBCASE("borderline target indices give S_N = N") {
        // d = 1, eps = 0, beta q = 2 - t': each generation contributes exactly 1.
        const double K = 2.0, t = 1.0;
        const double tp = 2.0 * K * t / (2.0 + (K - 1.0) * t);  // 4/3
        const double q = 1.5;
        const double beta = (2.0 - tp) / q;
        const auto params = CantorParams::uniform(K, t, 40, 1e-4, 100000000);
        const auto sums = wolff_on_cantor(params, RieszIndex(beta, q), CantorSide::Target, 40);
        REQUIRE(sums.size() == 40);
        for (int n = 1; n <= 40; ++n) CHECK(sums[n - 1] == doctest::Approx(n).epsilon(1e-9));
    }
    SUBCASE("source side at the matching indices also telescopes to N") {
        const double K = 2.0, t = 1.0, p = 2.0;
        const double alpha = (2.0 - t) / p;
        const auto params = CantorParams::uniform(K, t, 30, 1e-4, 100000000);
        const auto sums = wolff_on_cantor(params, RieszIndex(alpha, p), CantorSide::Source, 30);
        for (int n = 1; n <= 30; ++n) CHECK(sums[n - 1] == doctest::Approx(n).epsilon(1e-9));
    }
    SUBCASE("partial sums are non-decreasing") {
        const auto params = CantorParams::sharp(1.0, 1.0, 50, 1e-3, 1000, 1.5);
        const auto sums = wolff_on_cantor(params, RieszIndex(0.5, 1.5), CantorSide::Target, 50);
        for (std::size_t i = 1; i < sums.size(); ++i) CHECK(sums[i] >= sums[i - 1]);
    }
}

TEST_CASE("sharpness harness") {
    SUBCASE("reference case t=1 K=2 q=2 p~=4") {
        const auto v = sharpness_harness(1.0, 2.0, 2.0, 4.0, 20000);
        CHECK(v.indices.delta == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(v.target_exponent == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(v.source_exponent == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.target_converges);
        CHECK(v.source_diverges);
        // S_target -> sum_{n>=1} (n+1)^{-2} = pi^2/6 - 1.
        const double limit = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
        CHECK(v.target_partial_sum < limit);
        CHECK(v.target_partial_sum + v.target_tail_bound >= limit * 0.999);
        CHECK(v.source_log_slope == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("dual index algebra at q = 3/2") {
        const double q = 1.5, K = 3.0;
        const double t = 2.0 / (K + 1.0);  // makes t' = 2/(1/K + 1), beta = (2-t')/q
        const auto v = sharpness_harness(t, K, q, 3.0, 1000);
        CHECK(v.indices.q == doctest::Approx(q));
        CHECK(v.indices.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-12));  // t' = 1 here
        CHECK(v.indices.beta * q < 2.0);
        CHECK(v.source_exponent == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("p~ must exceed the source-critical exponent") {
        CHECK_THROWS_AS(sharpness_harness(1.0, 2.0, 2.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("place_level") {
    SUBCASE("single disk sits at the origin") {
        const auto cs = place_level(1, 0.3, 11);
        REQUIRE(cs.size() == 1);
        CHECK(std::abs(cs[0]) == 0.0);
    }
    SUBCASE("seven disks of radius 0.2 pack and stay disjoint") {
        const auto cs = place_level(7, 0.2, 5);
        REQUIRE(cs.size() == 7);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CHECK(std::abs(cs[i]) <= 0.8 + 1e-12);
            for (std::size_t j = i + 1; j < cs.size(); ++j)
                CHECK(std::abs(cs[i] - cs[j]) >= 0.4 - 1e-12);
        }
    }
    SUBCASE("two disks of radius 0.6 cannot pack") {
        CHECK_THROWS(place_level(2, 0.6, 1));
    }
}

TEST_CASE("CantorMap geometry") {
    const auto params = CantorParams::uniform(2.0, 1.0, 4, 1e-4, 7, 0.1);
    const CantorMap cmap(params, 42);
    const double sigma = params.sigma(0);
    const double s_r = std::pow(sigma, 2.0) * 1e-4;  // per-level source ratio
    const double t_r = sigma * 1e-4;                 // per-level target ratio

    SUBCASE("centers contract along the all-zero path") {
        const complexd off = cmap.level_offsets()[0][0];
        CHECK(std::abs(cmap.source_center(DiskAddress::path(1)) - off) < 1e-15);
        CHECK(std::abs(cmap.target_center(DiskAddress::path(1)) - off) < 1e-15);
        const complexd s2 = cmap.source_center(DiskAddress::path(2));
        CHECK(std::abs(s2 - (off + s_r * cmap.level_offsets()[1][0])) < 1e-15);
    }
    SUBCASE("image of a construction ball is exact") {
        const auto addr = DiskAddress::path(2);
        const auto br = cmap.image_ball(cmap.source_center(addr), source_radius(params, addr));
        CHECK(br.r_lo == doctest::Approx(target_radius(params, addr)).epsilon(1e-9));
        CHECK(br.r_hi == doctest::Approx(br.r_lo).epsilon(1e-12));
        CHECK(std::abs(br.center - cmap.target_center(addr)) < 1e-12);
    }
    SUBCASE("a straddling ball brackets between generations") {
        const complexd x = cmap.source_center(DiskAddress::path(3));
        const double r = std::sqrt(std::pow(s_r, 1) * std::pow(s_r, 2));  // geometric mean of gen 1,2
        const auto br = cmap.image_ball(x, r);
        CHECK(br.r_lo == doctest::Approx(std::pow(t_r, 2)).epsilon(1e-9));
        CHECK(br.r_hi == doctest::Approx(std::pow(t_r, 1)).epsilon(1e-9));
        CHECK(br.r_lo <= br.r_hi);
    }
    SUBCASE("large balls map to themselves") {
        const auto br = cmap.image_ball(complexd(3.0, 1.0), 2.0);
        CHECK(br.r_lo == 2.0);
        CHECK(br.r_hi == 2.0);
    }
    SUBCASE("balls below the built depth throw") {
        const complexd x = cmap.source_center(DiskAddress::path(4));
        CHECK_THROWS_WITH(cmap.image_ball(x, 1e-300), doctest::Contains("finer"));
    }
    SUBCASE("depth-0 parameters are the identity") {
        const CantorMap id(CantorParams{1.0, 1.0, {}}, 0);
        const auto br = id.image_ball(complexd(0.25, -0.5), 0.125);
        CHECK(br.r_lo == 0.125);
        CHECK(br.r_hi == 0.125);
        CHECK(std::abs(br.center - complexd(0.25, -0.5)) == 0.0);
    }
}

TEST_CASE("discretize and export") {
    const auto params = CantorParams::uniform(2.0, 1.0, 3, 1e-4, 3, 0.5);
    const CantorMap cmap(params, 9);
    SUBCASE("atom counts and masses") {
        const auto [mu, nu] = cmap.discretize(2);
        REQUIRE(mu.atoms().size() == 9);
        REQUIRE(nu.atoms().size() == 9);
        const auto gens = generation_data(params);
        const double m = std::exp(gens[1].log_mass);
        for (const auto& a : mu.atoms()) CHECK(a.mass == doctest::Approx(m).epsilon(1e-12));
        CHECK(mu.total() == doctest::Approx(nu.total()).epsilon(1e-14));
        // 9 blocks of mass R^4 times the one unbuilt level's deficit factor.
        CHECK(mu.total() == doctest::Approx(9.0 * 1e-16 * 0.5).epsilon(1e-10));
    }
    SUBCASE("depth 0 is a unit-scale single atom") {
        const auto [mu, nu] = cmap.discretize(0);
        REQUIRE(mu.atoms().size() == 1);
        CHECK(std::abs(mu.atoms()[0].pos) == 0.0);
        CHECK(mu.total() == doctest::Approx(std::pow(0.5, 3)).epsilon(1e-12));
    }
    SUBCASE("export_tree emits one CSV row per disk of every generation") {
        std::ostringstream os;
        cmap.export_tree(os, 2);
        std::istringstream is(os.str());
        std::string line;
        int rows = 0;
        std::getline(is, line);
        CHECK(line.find("address") == 0);
        while (std::getline(is, line))
            if (!line.empty() && line != "\r") ++rows;
        CHECK(rows == 3 + 9);  // generations 1 and 2
    }
}

TEST_CASE("check_lemtec5") {
    const auto params = CantorParams::uniform(2.0, 1.0, 3, 1e-4, 7, 0.1);
    const CantorMap cmap(params, 42);
    auto base = std::make_shared<DiscreteMeasure>(cmap.discretize(3).first);
    std::vector<std::pair<complexd, double>> probes;
    for (int n = 1; n <= 3; ++n) {
        const auto addr = DiskAddress::path(n);
        probes.emplace_back(cmap.source_center(addr), source_radius(params, addr));
    }
    const auto r1 = check_lemtec5(cmap, base, 0.5, 1.0, 1.0, 1.0, probes);
    CHECK(r1.sup_C > 0.0);
    CHECK(std::isfinite(r1.sup_C));
    // Smaller exponent d weakens the decay, so the constant can only grow.
    const auto r2 = check_lemtec5(cmap, base, 0.5, 1.0, 0.5, 1.0, probes);
    CHECK(r2.sup_C >= r1.sup_C * 0.999);
    CHECK(std::isfinite(r1.composed_g2.estimated_constant));
}

TEST_CASE("parameter JSON round trip") {
    // R small enough that sigma stays under the guard despite d_1 = 2^1.5.
    auto params = CantorParams::sharp(2.0, 1.0, 5, 1e-5, 100, 1.5);
    params.levels[2].fill_deficit = 0.125;
    const auto text = params.to_json();
    const auto back = CantorParams::from_json(text);
    CHECK(back.K == params.K);
    CHECK(back.t == params.t);
    REQUIRE(back.depth() == 5);
    for (int n = 0; n < 5; ++n) {
        CHECK(back.levels[n].R == doctest::Approx(params.levels[n].R).epsilon(1e-15));
        CHECK(back.levels[n].d == doctest::Approx(params.levels[n].d).epsilon(1e-15));
        CHECK(back.levels[n].count == params.levels[n].count);
        CHECK(back.levels[n].fill_deficit ==
              doctest::Approx(params.levels[n].fill_deficit).epsilon(1e-15));
    }
    SUBCASE("validation rejects bad blocks") {
        auto bad = params;
        bad.levels[0].d = 0.5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        auto bad2 = params;
        bad2.levels[1].fill_deficit = 1.0;
        CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
    }
}
