#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qclab/distortion.hpp"

using namespace qclab;

TEST_CASE("t_prime") {
    SUBCASE("examples") {
        CHECK(t_prime(1.0, 1.0) == doctest::Approx(1.0));
        CHECK(t_prime(1.0, 2.0) == doctest::Approx(4.0 / 3.0));
        CHECK(t_prime(2.0, 5.0) == doctest::Approx(2.0));
        CHECK(t_prime(0.5, 3.0) == doctest::Approx(1.0));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(t_prime(0.0, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(t_prime(2.5, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(t_prime(1.0, 0.5), std::invalid_argument);
    }
    SUBCASE("monotone in both arguments and involutive via 1/K") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ut(0.05, 1.95), uk(1.0, 8.0);
        for (int i = 0; i < 1000; ++i) {
            const double t = ut(rng), K = uk(rng);
            const double tp = t_prime(t, K);
            CHECK(tp >= t - 1e-15);
            CHECK(tp < 2.0);
            CHECK(t_prime(t + 1e-6 * (2.0 - t), K) > tp - 1e-15);
            // Dual form: 1/t - 1/2 = K (1/t' - 1/2), so mapping back with 1/K
            // recovers t. K < 1 is legitimate there (the inverse map).
            CHECK(2.0 * K * tp / (2.0 + (K - 1.0) * tp) >= tp - 1e-12);
            CHECK(1.0 / t - 0.5 == doctest::Approx(K * (1.0 / tp - 0.5)).epsilon(1e-10));
        }
    }
}

TEST_CASE("indices_from_target") {
    SUBCASE("K = 1 is the identity on index pairs") {
        const auto idx = indices_from_target(0.5, 1.5, 1.0);
        CHECK(idx.alpha == doctest::Approx(0.5));
        CHECK(idx.p == doctest::Approx(1.5));
        CHECK(idx.t == doctest::Approx(idx.t_prime));
    }
    SUBCASE("beta = 2/3, q = 3/2 reference point") {
        const double K = 3.0;
        const auto idx = indices_from_target(2.0 / 3.0, 1.5, K);
        CHECK(idx.t_prime == doctest::Approx(1.0));
        CHECK(idx.t == doctest::Approx(2.0 / (K + 1.0)));
        CHECK(idx.p == doctest::Approx(1.0 + (K * idx.t / idx.t_prime) * 0.5));
        CHECK(idx.alpha == doctest::Approx((2.0 - idx.t) / idx.p));
    }
    SUBCASE("exponent identities hold across the parameter box") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ub(0.05, 1.3), uq(1.05, 4.0), uk(1.0, 9.0);
        for (int i = 0; i < 1000; ++i) {
            const double q = uq(rng);
            const double beta = std::min(ub(rng), 1.9 / q);
            const double K = uk(rng);
            const auto idx = indices_from_target(beta, q, K);
            CHECK(idx.t_prime == doctest::Approx(2.0 - beta * q).epsilon(1e-12));
            CHECK(idx.t_prime == doctest::Approx(t_prime(idx.t, K)).epsilon(1e-12));
            CHECK(idx.alpha * idx.p == doctest::Approx(2.0 - idx.t).epsilon(1e-12));
            // The conjugate-exponent identity tying both sides together.
            const double pc = idx.p / (idx.p - 1.0), qc = idx.q / (idx.q - 1.0);
            CHECK(idx.t * K * (pc - 1.0) == doctest::Approx(idx.t_prime * (qc - 1.0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("verify_thm11_on_cantor") {
    SUBCASE("K = 1 gives ratio exactly 1") {
        const auto params = CantorParams::uniform(1.0, 1.0, 10, 1e-3, 1000000);
        const auto idx = indices_from_target(0.5, 2.0, 1.0);  // t = t' = 1
        const auto chk = verify_thm11_on_cantor(params, idx, 8);
        CHECK_FALSE(chk.diverged);
        CHECK(chk.ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("K = 2 ratio stays within a constant as N grows") {
        const auto idx = indices_from_target(0.5, 4.0 / 3.0, 2.0);  // t' = 4/3, t = 1
        // R strictly below 1e-4: idx.t carries an ulp of roundoff, so sigma at
        // R = 1e-4 would graze the 1/100 guard. count = 1/R^2 keeps each
        // generation's total mass at 1, which makes the ratio N-stable.
        const double R = 5e-5;
        const auto params =
            CantorParams::uniform(2.0, idx.t, 12, R, static_cast<std::int64_t>(1.0 / (R * R)));
        double lo = 1e300, hi = 0.0;
        for (int N : {4, 8, 12}) {
            const auto chk = verify_thm11_on_cantor(params, idx, N);
            REQUIRE_FALSE(chk.diverged);
            lo = std::min(lo, chk.ratio);
            hi = std::max(hi, chk.ratio);
        }
        CHECK(hi / lo < 1.2);
    }
    SUBCASE("parameter mismatch is rejected") {
        const auto params = CantorParams::uniform(2.0, 1.0, 4, 1e-4, 100);
        const auto idx = indices_from_target(0.25, 2.0, 3.0);  // K differs
        CHECK_THROWS_AS(verify_thm11_on_cantor(params, idx, 4), std::invalid_argument);
    }
}

TEST_CASE("verify_thm12_on_cantor") {
    SUBCASE("unit-d construction with count = 1/R^2 is exactly sharp") {
        const double R = 1e-4;
        const auto count = static_cast<std::int64_t>(1.0 / (R * R));
        const auto params = CantorParams::uniform(2.0, 1.0, 8, R, count);
        for (int N : {1, 4, 8}) {
            const auto chk = verify_thm12_on_cantor(params, N);
            CHECK(chk.lhs == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(chk.rhs == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("fill deficit moves both sides by the same N-independent constant") {
        const double R = 1e-4;
        const auto count = static_cast<std::int64_t>(1.0 / (R * R));
        const auto params = CantorParams::uniform(2.0, 1.0, 6, R, count, 0.5);
        double first = 0.0;
        for (int N : {2, 4, 6}) {
            const auto chk = verify_thm12_on_cantor(params, N);
            if (first == 0.0) first = chk.ratio;
            CHECK(chk.ratio == doctest::Approx(first).epsilon(1e-9));
        }
        CHECK(first < 1.0);  // mass loss hits the target side harder
    }
    SUBCASE("non-unit d is rejected") {
        const auto params = CantorParams::sharp(2.0, 1.0, 4, 1e-5, 100, 1.5);
        CHECK_THROWS_AS(verify_thm12_on_cantor(params, 4), std::invalid_argument);
    }
}

TEST_CASE("capacity_comparison") {
    std::vector<DiscreteMeasure> measures;
    {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int m = 0; m < 3; ++m) {
            std::vector<Atom> atoms;
            for (int k = 0; k < 12; ++k) atoms.push_back({complexd(u(rng), u(rng)), 0.1 + u(rng)});
            measures.emplace_back(std::move(atoms));
        }
    }
    SUBCASE("identical index pairs give ratio 1") {
        const RieszIndex idx(0.5, 2.0);
        for (const auto& row : capacity_comparison(idx, idx, measures)) {
            REQUIRE_FALSE(row.diverged);
            CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(row.cap1 > 0.0);
        }
    }
    SUBCASE("same product alpha*p, different p") {
        const RieszIndex idx1(0.5, 2.0), idx2(2.0 / 3.0, 1.5);  // both alpha*p = 1
        for (const auto& row : capacity_comparison(idx1, idx2, measures)) {
            REQUIRE_FALSE(row.diverged);
            CHECK(row.cap1 > 0.0);
            CHECK(row.cap2 > 0.0);
            CHECK(std::isfinite(row.ratio));
        }
    }
    SUBCASE("mismatched alpha*p is rejected") {
        CHECK_THROWS_AS(capacity_comparison(RieszIndex(0.5, 2.0), RieszIndex(0.5, 1.5), measures),
                        std::invalid_argument);
    }
}
