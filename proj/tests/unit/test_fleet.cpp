#include <cmath>

#include "catch_amalgamated.hpp"
#include "rfvc/fleet.hpp"

using namespace rfvc;

TEST_CASE("degenerate mix produces a single class") {
    FleetSpec spec = FleetSpec::defaults();
    spec.truck_fraction = 0.0;
    spec.rng_seed = 7;
    const auto fleet = sample_fleet(spec, 10);
    REQUIRE(fleet.size() == 10);
    for (const auto& v : fleet) CHECK(v.class_label == VehicleClass::car);
}

TEST_CASE("same spec and seed give identical fleets") {
    FleetSpec spec = FleetSpec::defaults();
    spec.rng_seed = 42;
    const auto a = sample_fleet(spec, 50);
    const auto b = sample_fleet(spec, 50);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].class_label == b[i].class_label);
        CHECK(a[i].length_m == b[i].length_m);
        CHECK(a[i].entry_velocity_mps == b[i].entry_velocity_mps);
        CHECK(a[i].lateral_offset_m == b[i].lateral_offset_m);
        CHECK(a[i].width_m == b[i].width_m);
        REQUIRE(a[i].silhouette.size() == b[i].silhouette.size());
        for (size_t s = 0; s < a[i].silhouette.size(); ++s)
            CHECK(a[i].silhouette[s].height_m == b[i].silhouette[s].height_m);
    }
}

TEST_CASE("truck count stays within the 3-sigma binomial band") {
    FleetSpec spec = FleetSpec::defaults();
    spec.rng_seed = 2024;
    const int n = 3000;
    const auto fleet = sample_fleet(spec, n);
    int trucks = 0;
    for (const auto& v : fleet)
        if (v.class_label == VehicleClass::truck) ++trucks;
    const double expect = n * spec.truck_fraction;
    const double sigma = std::sqrt(n * spec.truck_fraction * (1.0 - spec.truck_fraction));
    CHECK(std::abs(trucks - expect) <= 3.0 * sigma);
}

TEST_CASE("segment lengths follow the fractions and sum to the length") {
    FleetSpec spec = FleetSpec::defaults();
    spec.rng_seed = 5;
    const auto fleet = sample_fleet(spec, 20);
    for (const auto& v : fleet) {
        double total = 0.0;
        for (const auto& seg : v.silhouette) total += seg.length_m;
        CHECK(total == Catch::Approx(v.length_m).margin(1e-9));
    }
}

TEST_CASE("distributions that can produce non-positive values are rejected") {
    FleetSpec spec = FleetSpec::defaults();
    spec.car.length = Distribution::normal(4.5, 0.3, -1.0, 5.4);  // support includes <= 0
    CHECK_THROWS_AS(sample_fleet(spec, 1), UsageError);

    spec = FleetSpec::defaults();
    spec.car.velocity = {Distribution::Kind::normal, 10.0, 2.0};  // unclamped normal
    CHECK_THROWS_AS(sample_fleet(spec, 1), UsageError);
}

TEST_CASE("fleet size must be positive") {
    CHECK_THROWS_AS(sample_fleet(FleetSpec::defaults(), 0), UsageError);
}

TEST_CASE("reverse fraction controls travel direction") {
    FleetSpec spec = FleetSpec::defaults();
    spec.reverse_fraction = 1.0;
    for (const auto& v : sample_fleet(spec, 5)) CHECK(v.direction == Direction::reverse);
}
