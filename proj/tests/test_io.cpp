#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "swingreach/io.hpp"

using namespace swingreach;

TEST_CASE("double rendering round-trips and stays short") {
    CHECK(io::format_double(0.2) == "0.2");
    CHECK(io::format_double(-4.5) == "-4.5");
    CHECK(io::format_double(1.0) == "1");
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 5000; ++k) {
        const double x = u(rng) * std::pow(10.0, int(k % 13) - 6);
        CHECK(io::parse_double(io::format_double(x)) == x);
    }
    CHECK_THROWS_AS(io::parse_double("1.2.3"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double("12 "), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_long("7x"), std::invalid_argument);
}

TEST_CASE("field csv round-trips bit for bit") {
    GridSpec g{-1.5, 2.5, -3.0, 3.0, 5, 7};
    ScalarField f(g, 0.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (auto& v : f.values()) v = u(rng);

    const std::string csv = io::field_to_csv(f);
    CHECK(csv.rfind("delta_min,delta_max,omega_min,omega_max,n_delta,n_omega\n", 0) == 0);
    // one header line, one value line, one row per delta index
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + g.n_delta);

    const ScalarField back = io::field_from_csv(csv);
    CHECK(back == f);

    CHECK_THROWS_AS(io::field_from_csv("delta_min\n1\n"), std::invalid_argument);
    CHECK_THROWS_AS(
        io::field_from_csv("h\n0,1,0,1,3,3\n0,0,0\n0,0,0\n"),  // one row short
        std::invalid_argument);
}

TEST_CASE("trajectory csv carries the relay as 1 closed, 0 open") {
    Trajectory traj;
    traj.samples.push_back({0.0, {0.25, -1.5}, 0.2, RelayStatus::Closed});
    traj.samples.push_back({0.001, {0.3, -1.0}, -0.2, RelayStatus::Open});
    const std::string csv = io::trajectory_to_csv(traj);
    CHECK(csv ==
          "t,delta,omega,d,relay\n"
          "0,0.25,-1.5,0.2,1\n"
          "0.001,0.3,-1,-0.2,0\n");

    CHECK(io::attack_signal_csv(traj) == "t,d\n0,0.2\n0.001,-0.2\n");
}

TEST_CASE("contour json is an array of [delta, omega] polylines") {
    Contour c;
    c.polylines.push_back({{0.5, 0.0}, {0.5, 1.0}});
    const nlohmann::json j = io::contour_to_json(c);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    REQUIRE(j[0].size() == 2);
    CHECK(j[0][0][0] == 0.5);
    CHECK(j[0][1][1] == 1.0);
}
