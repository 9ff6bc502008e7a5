#include <cmath>

#include "catch_amalgamated.hpp"
#include "rfvc/features.hpp"
#include "rfvc/pipeline.hpp"

using namespace rfvc;

namespace {

AttenuationEvent event_at(int link_id, double t_start, double t_drop = 0.45) {
    AttenuationEvent ev;
    ev.link_id = link_id;
    ev.t_start = t_start;
    ev.t_end = t_start + t_drop;
    ev.t_drop = t_drop;
    ev.idle_level_dbm = -54;
    ev.min_rssi_dbm = -74;
    ev.magnitude_db = 20;
    ev.local_magnitude_db = 20;
    ev.deep_minima_count = 1;
    ev.bulge_value = 2.0;
    ev.samples = {{t_start, link_id, -70.0}, {t_start + t_drop, link_id, -54.0}};
    return ev;
}

}  // namespace

TEST_CASE("Eq. 1: constant velocity from evenly spaced onsets") {
    const auto v = estimate_velocity(event_at(1, 0.0), event_at(5, 0.5), event_at(9, 1.0),
                                     0.0, 5.0, 10.0);
    CHECK(v.speed_mps == Catch::Approx(10.0));
    CHECK(v.direction == Direction::forward);
}

TEST_CASE("Eq. 1: reversed onset order flips the direction, same speed") {
    const auto v = estimate_velocity(event_at(1, 1.0), event_at(5, 0.5), event_at(9, 0.0),
                                     0.0, 5.0, 10.0);
    CHECK(v.speed_mps == Catch::Approx(10.0));
    CHECK(v.direction == Direction::reverse);
}

TEST_CASE("Eq. 1: constant-acceleration pass equals the mean of segment speeds") {
    // Kinematic oracle: x(t) = 10 t + t^2/2; onset times solve x(t) = d.
    const double v0 = 10.0, a = 1.0;
    auto onset = [&](double d) { return (-v0 + std::sqrt(v0 * v0 + 2.0 * a * d)) / a; };
    const double t1 = onset(0.0), t5 = onset(5.0), t9 = onset(10.0);
    const double expect =
        ((5.0 / (t5 - t1)) + (10.0 / (t9 - t1)) + (5.0 / (t9 - t5))) / 3.0;
    const auto v = estimate_velocity(event_at(1, t1), event_at(5, t5), event_at(9, t9),
                                     0.0, 5.0, 10.0);
    CHECK(v.speed_mps == Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("Eq. 1 preconditions: duplicate or unordered onsets") {
    CHECK_THROWS_AS(estimate_velocity(event_at(1, 0.0), event_at(5, 0.0), event_at(9, 1.0),
                                      0.0, 5.0, 10.0),
                    DataError);
    CHECK_THROWS_AS(estimate_velocity(event_at(1, 0.0), event_at(5, 1.0), event_at(9, 0.5),
                                      0.0, 5.0, 10.0),
                    DataError);
}

TEST_CASE("Eq. 3: length from velocity and drop durations") {
    CHECK(estimate_length(10.0, 0.45, 0.45, 0.45) == Catch::Approx(4.5));
    CHECK(estimate_length(20.0, 0.45, 0.45, 0.45) == Catch::Approx(9.0));
    CHECK_THROWS_AS(estimate_length(0.0, 0.45, 0.45, 0.45), DataError);
}

TEST_CASE("Eq. 4 assembly: reference link vs direct mean") {
    PassEvents events;
    events.emplace(1, event_at(1, 0.0, 0.40));
    events.emplace(5, event_at(5, 0.5, 0.45));
    events.emplace(9, event_at(9, 1.0, 0.50));
    DeploymentConfig cfg;
    const auto links = build_links(cfg);

    const FeatureVector ref = assemble_features(events, links, ScalarSource::reference_link, 1, 7);
    CHECK(ref.vehicle_id == 7);
    CHECK(ref.t_drop == Catch::Approx(0.40));
    CHECK(ref.v_est == Catch::Approx(10.0));
    CHECK(ref.l_est == Catch::Approx(10.0 / 3.0 * 1.35));
    CHECK(ref.direction == Direction::forward);

    const FeatureVector mean = assemble_features(events, links, ScalarSource::direct_mean);
    CHECK(mean.t_drop == Catch::Approx(0.45));
    CHECK(mean.v_est == ref.v_est);

    SECTION("missing direct-link event is an incomplete pass") {
        events.erase(5);
        CHECK_THROWS_AS(assemble_features(events, links), DataError);
    }
}

TEST_CASE("offset invariance: a global dBm shift leaves F unchanged") {
    DeploymentConfig dep;
    const auto links = build_links(dep);
    NoiseModel noise;  // default 1 dB sigma
    VehicleProfile v;
    v.vehicle_id = 3;
    v.length_m = 4.5;
    v.silhouette = {{1.35, 1.30}, {2.025, 1.55}, {1.125, 1.38}};
    v.entry_velocity_mps = 12.0;
    v.lateral_offset_m = 3.5;
    v.width_m = 1.8;
    auto traces = synth_pass(v, links, dep, MacSchedule::from_config(dep), noise,
                             ChannelParams{}, 21);
    DetectorConfig det;
    const auto base = extract_pass(traces, links, det, 64, 3, VehicleClass::car);

    for (auto& trace : traces)
        for (auto& s : trace.samples) s.rssi_dbm += 7.0;
    const auto shifted = extract_pass(traces, links, det, 64, 3, VehicleClass::car);

    // Timings, magnitudes and counts are exactly invariant; the standardized
    // quantities (b, raw values) are invariant up to rounding of the shifted
    // means, so those compare with a 1e-12 relative tolerance.
    CHECK(base.features.v_est == shifted.features.v_est);
    CHECK(base.features.l_est == shifted.features.l_est);
    CHECK(base.features.t_drop == shifted.features.t_drop);
    CHECK(base.features.m == shifted.features.m);
    CHECK(base.features.m_l == shifted.features.m_l);
    CHECK(base.features.n == shifted.features.n);
    CHECK(base.features.b == Catch::Approx(shifted.features.b).epsilon(1e-12));
    for (size_t r = 0; r < base.raw_rows.size(); ++r)
        for (size_t i = 0; i < base.raw_rows[r].values.size(); ++i)
            CHECK(base.raw_rows[r].values[i] ==
                  Catch::Approx(shifted.raw_rows[r].values[i]).margin(1e-9));
}

TEST_CASE("raw vector: normalization, identity and dilation invariance") {
    AttenuationEvent ev;
    ev.link_id = 1;
    const std::vector<double> shape = {-50, -55, -62, -70, -66, -58, -52, -50};

    SECTION("mean 0 and population std 1") {
        for (size_t i = 0; i < shape.size(); ++i)
            ev.samples.push_back({0.009 * static_cast<double>(i), 1, shape[i]});
        ev.t_start = ev.samples.front().time_s;
        ev.t_end = ev.samples.back().time_s;
        const RawVector rv = raw_vector(ev, 64);
        REQUIRE(rv.values.size() == 64);
        CHECK(mean_of(rv.values) == Catch::Approx(0.0).margin(1e-9));
        CHECK(population_std(rv.values) == Catch::Approx(1.0).margin(1e-9));
    }

    SECTION("a 64-sample event resamples to itself") {
        std::vector<double> vals;
        for (int i = 0; i < 64; ++i)
            vals.push_back(-60.0 + 8.0 * std::sin(0.3 * i));
        for (int i = 0; i < 64; ++i)
            ev.samples.push_back({0.009 * i, 1, vals[i]});
        const RawVector rv = raw_vector(ev, 64);
        const double mu = mean_of(vals);
        const double sd = population_std(vals);
        for (int i = 0; i < 64; ++i)
            CHECK(rv.values[static_cast<size_t>(i)] ==
                  Catch::Approx((vals[static_cast<size_t>(i)] - mu) / sd).margin(1e-9));
    }

    SECTION("time dilation does not change the raw vector") {
        AttenuationEvent slow;
        for (size_t i = 0; i < shape.size(); ++i) {
            ev.samples.push_back({0.009 * static_cast<double>(i), 1, shape[i]});
            slow.samples.push_back({0.018 * static_cast<double>(i), 1, shape[i]});
        }
        const RawVector a = raw_vector(ev, 64);
        const RawVector b = raw_vector(slow, 64);
        for (size_t i = 0; i < a.values.size(); ++i)
            CHECK(a.values[i] == Catch::Approx(b.values[i]).margin(1e-12));
    }

    SECTION("constant events are rejected") {
        for (int i = 0; i < 8; ++i) ev.samples.push_back({0.009 * i, 1, -60.0});
        CHECK_THROWS_AS(raw_vector(ev, 64), DegenerateEventError);
    }

    SECTION("single-sample events are rejected") {
        ev.samples.push_back({0.0, 1, -60.0});
        CHECK_THROWS_AS(raw_vector(ev, 64), DataError);
    }
}

TEST_CASE("length estimate grows strictly with true length at fixed speed") {
    DeploymentConfig dep;
    const auto links = build_links(dep);
    NoiseModel noise;
    noise.sigma_db = 0.0;
    DetectorConfig det;
    double prev = -1.0;
    for (double L = 3.5; L <= 17.0; L += 1.5) {
        VehicleProfile v;
        v.vehicle_id = 1;
        v.length_m = L;
        v.silhouette = {{0.3 * L, 1.30}, {0.45 * L, 1.55}, {0.25 * L, 1.38}};
        v.entry_velocity_mps = 12.0;
        v.lateral_offset_m = 3.5;
        v.width_m = 1.8;
        const auto traces = synth_pass(v, links, dep, MacSchedule::from_config(dep), noise,
                                       ChannelParams{}, 11);
        const auto pe = extract_pass(traces, links, det, 64, 1, VehicleClass::car);
        CHECK(pe.features.l_est > prev);
        prev = pe.features.l_est;
    }
}
