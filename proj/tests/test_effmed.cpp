#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "dielens/effmed.hpp"

using namespace dielens;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const UnitCellGeometry cell{1.6, 2.738};

std::vector<std::pair<double, double>> vf_samples(int n) {
    // strictly increasing table sampled from the volume-fraction rule
    std::vector<std::pair<double, double>> rows;
    const auto vf = make_mapping(MixingRule::volume_fraction);
    for (int i = 0; i <= n; ++i) {
        const double t = 1.6 * i / double(n);
        rows.emplace_back(t, eps_of_thickness(t, cell, vf));
    }
    return rows;
}
}  // namespace

TEST_CASE("volume fraction rule") {
    const auto m = make_mapping(MixingRule::volume_fraction);
    CHECK_THAT(eps_of_thickness(0.0, cell, m), WithinAbs(1.0, 1e-15));
    CHECK_THAT(eps_of_thickness(1.6, cell, m), WithinAbs(2.738, 1e-15));
    CHECK_THAT(eps_of_thickness(1.05, cell, m), WithinRel(1.748494140625, 1e-13));
    CHECK_THAT(eps_of_thickness(0.51, cell, m), WithinRel(1.176583515625, 1e-13));
    CHECK_THAT(eps_of_thickness(0.5, cell, m), WithinRel(1.1697265625, 1e-13));
}

TEST_CASE("maxwell garnett rule stays below the volume fraction estimate") {
    const auto mg = make_mapping(MixingRule::maxwell_garnett);
    const auto vf = make_mapping(MixingRule::volume_fraction);
    CHECK_THAT(eps_of_thickness(1.05, cell, mg), WithinRel(1.500747732791856, 1e-13));
    CHECK_THAT(eps_of_thickness(0.0, cell, mg), WithinAbs(1.0, 1e-15));
    CHECK_THAT(eps_of_thickness(1.6, cell, mg), WithinRel(2.738, 1e-13));
    for (double t = 0.1; t < 1.6; t += 0.1)
        CHECK(eps_of_thickness(t, cell, mg) < eps_of_thickness(t, cell, vf));
}

TEST_CASE("inverse mapping by bisection") {
    const auto vf = make_mapping(MixingRule::volume_fraction);
    // closed-form inverse of the volume fraction rule as the oracle
    const double target = 1.6546903033498455;
    const double expect = 1.6 * std::sqrt((target - 1.0) / 1.738);
    CHECK_THAT(expect, WithinRel(0.9820035344351061, 1e-12));
    CHECK_THAT(thickness_of_eps(target, cell, vf), WithinAbs(expect, 2e-9));

    SECTION("round trip across the reachable range") {
        for (double e = 1.001; e < 2.73; e += 0.1)
            CHECK_THAT(eps_of_thickness(thickness_of_eps(e, cell, vf), cell, vf),
                       WithinAbs(e, 1e-6));
    }
    SECTION("endpoints resolve without bisection noise") {
        CHECK(thickness_of_eps(1.0, cell, vf) == 0.0);
        CHECK(thickness_of_eps(2.738, cell, vf) == 1.6);
    }
    SECTION("unreachable targets are rejected") {
        CHECK_THROWS_AS(thickness_of_eps(0.9, cell, vf), argument_error);
        CHECK_THROWS_AS(thickness_of_eps(3.0, cell, vf), argument_error);
    }
}

TEST_CASE("lookup table interpolation") {
    const auto table = load_calibration(vf_samples(16));
    const auto vf = make_mapping(MixingRule::volume_fraction);

    SECTION("knots are reproduced exactly") {
        for (std::size_t i = 0; i < table.t_mm.size(); ++i)
            CHECK(eps_of_thickness(table.t_mm[i], cell, table) == table.eps[i]);
    }
    SECTION("between knots the curve tracks the generating rule") {
        for (double t = 0.05; t < 1.6; t += 0.07)
            CHECK_THAT(eps_of_thickness(t, cell, table),
                       WithinAbs(eps_of_thickness(t, cell, vf), 5e-3));
    }
    SECTION("interpolation is monotone even near sharp knees") {
        const auto knee = load_calibration(
            {{0.0, 1.0}, {0.4, 1.01}, {0.8, 1.02}, {1.2, 2.7}, {1.6, 2.73}});
        double prev = 1.0;
        for (int i = 0; i <= 320; ++i) {
            const double e = eps_of_thickness(1.6 * i / 320.0, cell, knee);
            CHECK(e >= prev - 1e-12);
            prev = e;
        }
        CHECK(prev <= 2.73 + 1e-12);
    }
    SECTION("inverse works through the table too") {
        for (double e = 1.05; e < 2.7; e += 0.2) {
            const double t = thickness_of_eps(e, cell, table);
            CHECK_THAT(eps_of_thickness(t, cell, table), WithinAbs(e, 1e-6));
        }
    }
    SECTION("evaluation outside the sampled range clamps and flags") {
        const auto partial = load_calibration(
            {{0.2, 1.05}, {0.6, 1.2}, {1.0, 1.6}, {1.4, 2.3}});
        bool clamped = false;
        CHECK(eps_of_thickness(0.1, cell, partial, &clamped) == 1.05);
        CHECK(clamped);
        clamped = false;
        CHECK(eps_of_thickness(1.5, cell, partial, &clamped) == 2.3);
        CHECK(clamped);
        clamped = true;
        eps_of_thickness(0.8, cell, partial, &clamped);
        CHECK_FALSE(clamped);
    }
}

TEST_CASE("calibration validation catches bad tables") {
    CHECK_THROWS_AS(load_calibration({{0.0, 1.0}, {0.5, 1.2}, {1.0, 1.5}}),
                    validation_error);
    CHECK_THROWS_WITH(
        load_calibration({{0.0, 1.0}, {0.5, 1.2}, {0.5, 1.3}, {1.0, 1.5}}),
        ContainsSubstring("row 3"));
    CHECK_THROWS_WITH(
        load_calibration({{0.0, 1.0}, {0.5, 1.2}, {0.8, 1.1}, {1.0, 1.5}}),
        ContainsSubstring("row 3"));
    CHECK_THROWS_AS(load_calibration({{0.0, 0.9}, {0.5, 1.2}, {0.8, 1.3}, {1.0, 1.5}}),
                    validation_error);
    CHECK_THROWS_AS(make_mapping(MixingRule::lookup_table), argument_error);
}

TEST_CASE("calibration csv reader") {
    std::istringstream in(
        "t_mm,eps_eff\n"
        "# measured on printed coupons\n"
        "0.0,1.0\n"
        "0.5,1.17\n"
        "1.0,1.65  # mid sample\n"
        "1.6,2.738\n");
    const auto m = read_calibration_csv(in);
    REQUIRE(m.t_mm.size() == 4);
    CHECK(m.eps[2] == 1.65);

    std::istringstream bad("0.0,1.0\n0.5 1.2\n1.0,1.5\n1.6,2.7\n");
    CHECK_THROWS_WITH(read_calibration_csv(bad), ContainsSubstring("line 2"));
}

TEST_CASE("geometry and domain validation") {
    const auto vf = make_mapping(MixingRule::volume_fraction);
    CHECK_THROWS_AS(eps_of_thickness(-0.1, cell, vf), argument_error);
    CHECK_THROWS_AS(eps_of_thickness(1.7, cell, vf), argument_error);
    CHECK_THROWS_AS(eps_of_thickness(0.5, {0.0, 2.738}, vf), argument_error);
    CHECK_THROWS_AS(eps_of_thickness(0.5, {1.6, 0.5}, vf), argument_error);
}
