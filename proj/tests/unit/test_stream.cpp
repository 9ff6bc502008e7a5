#include <cmath>

#include "catch_amalgamated.hpp"
#include "rfvc/pipeline.hpp"
#include "rfvc/stream.hpp"

using namespace rfvc;

namespace {

struct StreamFixture {
    AppConfig cfg;
    std::vector<LinkGeometry> links;
    MacSchedule schedule;
    TrainedModel model;

    StreamFixture() {
        cfg.noise.sigma_db = 0.0;
        links = build_links(cfg.deployment);
        schedule = MacSchedule::from_config(cfg.deployment);

        // Train a small feature-vector model on a default synthetic fleet.
        FleetSpec fleet = FleetSpec::defaults();
        fleet.rng_seed = 7;
        const auto vehicles = sample_fleet(fleet, 40);
        Dataset data;
        data.representation = Representation::feature_vector;
        for (const auto& v : vehicles) {
            const auto traces = synth_pass(v, links, cfg.deployment, schedule, cfg.noise,
                                           cfg.channel, 7, cfg.lead_in_s, cfg.lead_out_s);
            const auto pe = extract_pass(traces, links, cfg.detector, cfg.raw_length,
                                         v.vehicle_id, v.class_label);
            const auto vals = pe.features.values();
            data.add({vals.begin(), vals.end()}, v.class_label);
        }
        ModelSpec spec;
        spec.family = ModelFamily::knn;
        spec.seed = 7;
        model = train(spec, data);
    }

    VehicleProfile car(int id, Direction dir = Direction::forward) const {
        VehicleProfile v;
        v.vehicle_id = id;
        v.class_label = VehicleClass::car;
        v.length_m = 4.5;
        v.silhouette = {{1.35, 1.30}, {2.025, 1.55}, {1.125, 1.38}};
        v.entry_velocity_mps = 12.0;
        v.lateral_offset_m = 3.5;
        v.width_m = 1.8;
        v.direction = dir;
        return v;
    }

    Gateway gateway() const {
        return Gateway(links, schedule, cfg.detector, model);
    }
};

}  // namespace

TEST_CASE_METHOD(StreamFixture, "one pass streams to exactly one matching record") {
    const VehicleProfile v = car(1);
    const auto traces = synth_pass(v, links, cfg.deployment, schedule, cfg.noise, cfg.channel,
                                   99, cfg.lead_in_s, cfg.lead_out_s);
    const auto batch = extract_pass(traces, links, cfg.detector, cfg.raw_length, 1,
                                    VehicleClass::car);
    const VehicleClass batch_label = [&] {
        const auto vals = batch.features.values();
        return model.predict({vals.begin(), vals.end()});
    }();

    Gateway gw = gateway();
    std::vector<ClassificationRecord> records;
    for (const auto& s : merge_traces(traces))
        for (auto& r : gw.push_sample(s)) records.push_back(std::move(r));

    REQUIRE(records.size() == 1);
    CHECK(gw.flush().empty());
    CHECK(records[0].predicted == batch_label);
    CHECK(records[0].predicted == VehicleClass::car);
    CHECK(records[0].direction == Direction::forward);

    // Bit-for-bit agreement with the batch pipeline.
    const auto a = records[0].features.values();
    const auto b = batch.features.values();
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    // Emission happens within one round of the closing hysteresis decision.
    CHECK(records[0].latency_s <=
          (cfg.detector.min_consecutive) * schedule.round_duration() + 1e-9);
}

TEST_CASE_METHOD(StreamFixture, "idle-only stream emits nothing") {
    Gateway gw = gateway();
    // Synthesize a pass, keep only the lead-in samples (vehicle not yet there).
    const auto traces = synth_pass(car(2), links, cfg.deployment, schedule, cfg.noise,
                                   cfg.channel, 5, cfg.lead_in_s, cfg.lead_out_s);
    size_t pushed = 0;
    for (const auto& s : merge_traces(traces)) {
        if (s.time_s >= 0.0) break;
        CHECK(gw.push_sample(s).empty());
        ++pushed;
    }
    CHECK(pushed > 0);
    CHECK(gw.flush().empty());
    CHECK(gw.passes_emitted() == 0);
}

TEST_CASE_METHOD(StreamFixture, "reverse pass is flagged reverse") {
    const auto traces = synth_pass(car(3, Direction::reverse), links, cfg.deployment, schedule,
                                   cfg.noise, cfg.channel, 12, cfg.lead_in_s, cfg.lead_out_s);
    Gateway gw = gateway();
    std::vector<ClassificationRecord> records;
    for (const auto& s : merge_traces(traces))
        for (auto& r : gw.push_sample(s)) records.push_back(std::move(r));
    REQUIRE(records.size() == 1);
    CHECK(records[0].direction == Direction::reverse);
}

TEST_CASE_METHOD(StreamFixture, "stream cut mid-pass: diagnostics, no records") {
    const auto traces = synth_pass(car(4), links, cfg.deployment, schedule, cfg.noise,
                                   cfg.channel, 31, cfg.lead_in_s, cfg.lead_out_s);
    const auto merged = merge_traces(traces);
    Gateway gw = gateway();
    size_t emitted = 0;
    // Cut while the car still covers the middle of the array.
    const double cut_time = 5.0 / 12.0 + 0.1;
    for (const auto& s : merged) {
        if (s.time_s > cut_time) break;
        emitted += gw.push_sample(s).size();
    }
    CHECK(emitted == 0);
    const auto diags = gw.flush();
    CHECK_FALSE(diags.empty());
}

TEST_CASE_METHOD(StreamFixture, "two sequential passes emit two records") {
    const VehicleProfile first = car(5);
    VehicleProfile second = car(6);
    second.entry_time_s = 12.0;

    auto t1 = synth_pass(first, links, cfg.deployment, schedule, cfg.noise, cfg.channel, 41,
                         cfg.lead_in_s, cfg.lead_out_s);
    auto t2 = synth_pass(second, links, cfg.deployment, schedule, cfg.noise, cfg.channel, 42,
                         cfg.lead_in_s, cfg.lead_out_s);
    std::vector<RssiSample> stream = merge_traces(t1);
    const auto more = merge_traces(t2);
    stream.insert(stream.end(), more.begin(), more.end());

    Gateway gw = gateway();
    std::vector<ClassificationRecord> records;
    for (const auto& s : stream)
        for (auto& r : gw.push_sample(s)) records.push_back(std::move(r));
    REQUIRE(records.size() == 2);
    CHECK(records[0].pass_id == 1);
    CHECK(records[1].pass_id == 2);
    CHECK(gw.flush().empty());
}

TEST_CASE_METHOD(StreamFixture, "stream order and link id are validated") {
    Gateway gw = gateway();
    CHECK_THROWS_AS(gw.push_sample({0.0, 12, -54.0}), DataError);
    REQUIRE_NOTHROW(gw.push_sample({1.0, 1, -54.0}));
    // Older than one full round: rejected.
    CHECK_THROWS_AS(gw.push_sample({1.0 - 2.0 * schedule.round_duration(), 1, -54.0}),
                    DataError);
    // Within one round of the newest sample: tolerated.
    REQUIRE_NOTHROW(gw.push_sample({1.0 - 0.5 * schedule.round_duration(), 2, -56.0}));
}
