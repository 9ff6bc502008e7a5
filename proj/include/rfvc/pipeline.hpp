#pragma once

#include <sys/utsname.h>

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rfvc/channel.hpp"
#include "rfvc/common.hpp"
#include "rfvc/evaluate.hpp"
#include "rfvc/events.hpp"
#include "rfvc/features.hpp"
#include "rfvc/fleet.hpp"
#include "rfvc/io.hpp"
#include "rfvc/model.hpp"
#include "rfvc/stream.hpp"

namespace rfvc {

// ---------------------------------------------------------------------------
// synth: fleet -> trace files + ground-truth manifest
// ---------------------------------------------------------------------------

struct SynthResult {
    std::vector<ManifestRow> manifest;
    std::string manifest_path;
};

inline ManifestRow manifest_row_for(const VehicleProfile& v, const std::string& trace_file) {
    ManifestRow r;
    r.vehicle_id = v.vehicle_id;
    r.class_label = v.class_label;
    r.length_m = v.length_m;
    r.velocity_mps = v.entry_velocity_mps;
    r.accel_mps2 = v.acceleration_mps2;
    r.direction = v.direction;
    r.lateral_offset_m = v.lateral_offset_m;
    r.width_m = v.width_m;
    r.entry_time_s = v.entry_time_s;
    r.trace_file = trace_file;
    return r;
}

inline SynthResult run_synth(const AppConfig& cfg, int n, std::uint64_t seed,
                             const std::string& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory: " + out_dir);

    FleetSpec fleet = cfg.fleet;
    fleet.rng_seed = seed;
    const auto vehicles = sample_fleet(fleet, n);
    const auto links = build_links(cfg.deployment);
    const MacSchedule schedule = MacSchedule::from_config(cfg.deployment);

    SynthResult result;
    for (const auto& v : vehicles) {
        if (v.lateral_offset_m - v.width_m / 2 <= 0.0 ||
            v.lateral_offset_m + v.width_m / 2 >= cfg.deployment.road_width_m)
            throw DataError("vehicle body leaves the road (check lateral_offset/width)");
        const auto traces = synth_pass(v, links, cfg.deployment, schedule, cfg.noise,
                                       cfg.channel, mix_seed(seed, 0x7ace), cfg.lead_in_s,
                                       cfg.lead_out_s);
        const std::string name = strf("pass_%06d.csv", v.vehicle_id);
        write_text_file(out_dir + "/" + name, trace_to_text(merge_traces(traces)));
        result.manifest.push_back(manifest_row_for(v, name));
    }
    result.manifest_path = out_dir + "/manifest.csv";
    write_text_file(result.manifest_path, manifest_to_text(result.manifest));
    return result;
}

// ---------------------------------------------------------------------------
// extract: traces -> feature rows, raw vectors, per-link rows
// ---------------------------------------------------------------------------

struct PassExtraction {
    FeatureVector features;
    PassEvents events;
    std::vector<RawRow> raw_rows;          ///< direct links
    std::vector<PerLinkRow> per_link_rows; ///< every link with an event
};

/// Run detection and Eq. 1-4 feature assembly on the nine traces of one pass.
inline PassExtraction extract_pass(const std::array<RssiTrace, 9>& traces,
                                   const std::vector<LinkGeometry>& links,
                                   const DetectorConfig& det, size_t raw_length,
                                   int vehicle_id, VehicleClass label,
                                   ScalarSource source = ScalarSource::reference_link,
                                   int reference_link = 1) {
    PassExtraction out;
    for (const auto& trace : traces) {
        const bool direct = trace.link_id == 1 || trace.link_id == 5 || trace.link_id == 9;
        try {
            const double idle = estimate_idle(trace, det);
            if (auto ev = detect_event(trace, idle, det)) out.events.emplace(trace.link_id, *ev);
        } catch (const TruncatedEventError&) {
            // A truncated cross-link event only costs that link's analytics
            // row; a truncated direct link means the pass itself is unusable.
            if (direct) throw;
        }
    }
    out.features = assemble_features(out.events, links, source, reference_link, vehicle_id);
    for (int id : {1, 5, 9}) {
        const RawVector rv = raw_vector(out.events.at(id), raw_length);
        out.raw_rows.push_back({vehicle_id, id, rv.values, label});
    }
    for (const auto& [id, ev] : out.events) {
        PerLinkRow row;
        row.vehicle_id = vehicle_id;
        row.link_id = id;
        row.values = per_link_features(ev, out.features.v_est, out.features.l_est);
        row.label = label;
        out.per_link_rows.push_back(row);
    }
    return out;
}

struct ExtractResult {
    std::vector<FeatureRow> features;
    std::vector<RawRow> raw_rows;
    std::vector<PerLinkRow> per_link_rows;
    std::vector<std::string> rejects;  ///< "vehicle_id,reason" lines
};

inline ExtractResult extract_manifest(const AppConfig& cfg, const std::string& trace_dir,
                                      const std::vector<ManifestRow>& manifest) {
    const auto links = build_links(cfg.deployment);
    ExtractResult result;
    for (const auto& row : manifest) {
        try {
            const auto samples = trace_from_text(read_text_file(trace_dir + "/" + row.trace_file),
                                                 row.trace_file);
            const auto traces = traces_from_samples(samples);
            PassExtraction pe = extract_pass(traces, links, cfg.detector, cfg.raw_length,
                                             row.vehicle_id, row.class_label);
            result.features.push_back({pe.features, row.class_label});
            for (auto& r : pe.raw_rows) result.raw_rows.push_back(std::move(r));
            for (auto& r : pe.per_link_rows) result.per_link_rows.push_back(std::move(r));
        } catch (const DataError& e) {
            result.rejects.push_back(strf("%d,", row.vehicle_id) + e.what());
        }
    }
    return result;
}

inline ExtractResult run_extract(const AppConfig& cfg, const std::string& trace_dir,
                                 const std::string& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory: " + out_dir);
    const auto manifest =
        manifest_from_text(read_text_file(trace_dir + "/manifest.csv"), "manifest.csv");
    ExtractResult result = extract_manifest(cfg, trace_dir, manifest);
    write_text_file(out_dir + "/features.csv", features_to_text(result.features));
    write_text_file(out_dir + "/raw.csv", raw_rows_to_text(result.raw_rows, cfg.raw_length));
    write_text_file(out_dir + "/features_per_link.csv", per_link_to_text(result.per_link_rows));
    std::string rejects = "# rfvc rejects v1\n";
    for (const auto& r : result.rejects) rejects += r + "\n";
    write_text_file(out_dir + "/rejects.log", rejects);
    return result;
}

// ---------------------------------------------------------------------------
// dataset construction
// ---------------------------------------------------------------------------

inline Dataset dataset_from_features(const std::vector<FeatureRow>& rows) {
    Dataset d;
    d.representation = Representation::feature_vector;
    for (const auto& r : rows) {
        const auto v = r.features.values();
        d.add({v.begin(), v.end()}, r.label);
    }
    return d;
}

inline Dataset dataset_from_raw(const std::vector<RawRow>& rows, int link_id = 1) {
    Dataset d;
    d.representation = Representation::raw_data;
    for (const auto& r : rows)
        if (r.link_id == link_id) d.add(r.values, r.label);
    return d;
}

inline Dataset dataset_from_per_link(const std::vector<PerLinkRow>& rows, int link_id) {
    Dataset d;
    d.representation = Representation::feature_vector;
    for (const auto& r : rows)
        if (r.link_id == link_id) d.add({r.values.begin(), r.values.end()}, r.label);
    return d;
}

// ---------------------------------------------------------------------------
// eval: Table II grid and Fig. 7 per-link table
// ---------------------------------------------------------------------------

inline constexpr std::array<ModelFamily, 4> kAllFamilies = {
    ModelFamily::decision_tree, ModelFamily::knn, ModelFamily::svm, ModelFamily::ann};

struct EvalGrid {
    std::vector<EvalReport> cells;
    int folds = 5;
    std::uint64_t seed = 0;

    const EvalReport& cell(ModelFamily f, Representation r) const {
        for (const auto& c : cells)
            if (c.family == f && c.representation == r) return c;
        throw InternalError("missing eval cell");
    }
};

inline EvalGrid run_eval_grid(const Dataset& features, const Dataset& raw, int folds,
                              std::uint64_t seed) {
    EvalGrid grid;
    grid.folds = folds;
    grid.seed = seed;
    for (const Dataset* data : {&raw, &features}) {
        for (ModelFamily family : kAllFamilies) {
            ModelSpec spec;
            spec.family = family;
            spec.seed = seed;
            grid.cells.push_back(cross_validate(spec, *data, folds, seed));
        }
    }
    return grid;
}

inline std::string eval_grid_to_text(const EvalGrid& grid, bool with_timings = false) {
    std::ostringstream os;
    os << "# rfvc eval v1\n";
    os << "folds = " << grid.folds << "\n";
    os << "seed = " << grid.seed << "\n";
    os << "\n[grid]\n";
    os << "representation,dt,knn,svm,ann\n";
    for (Representation repr : {Representation::raw_data, Representation::feature_vector}) {
        os << to_string(repr);
        for (ModelFamily family : kAllFamilies)
            os << strf(",%.6f", grid.cell(family, repr).csr());
        os << "\n";
    }
    for (const auto& cell : grid.cells) {
        os << "\n[cell " << to_string(cell.family) << " " << to_string(cell.representation)
           << "]\n";
        os << strf("csr = %.6f\n", cell.csr());
        os << strf("precision_car = %.6f\n", cell.precision_car());
        os << strf("recall_car = %.6f\n", cell.recall_car());
        os << strf("precision_truck = %.6f\n", cell.precision_truck());
        os << strf("recall_truck = %.6f\n", cell.recall_truck());
        os << "confusion = " << cell.total.car_as_car << " " << cell.total.car_as_truck << " "
           << cell.total.truck_as_car << " " << cell.total.truck_as_truck << "\n";
        os << "fold_csr =";
        for (const auto& cm : cell.fold_confusions)
            os << strf(" %.6f", cm.total() == 0 ? 0.0
                                                : static_cast<double>(cm.correct()) /
                                                      static_cast<double>(cm.total()));
        os << "\n";
        if (with_timings) {
            os << strf("inference_mean_s = %.3e\n", cell.mean_inference_s);
            os << strf("inference_median_s = %.3e\n", cell.median_inference_s);
        }
    }
    return os.str();
}

inline std::string per_link_report_to_text(const std::vector<LinkCsr>& table, int folds,
                                           std::uint64_t seed) {
    std::ostringstream os;
    os << "# rfvc eval-per-link v1\n";
    os << "folds = " << folds << "\n";
    os << "seed = " << seed << "\n";
    os << "link_id,csr\n";
    for (const auto& row : table) os << row.link_id << strf(",%.6f", row.csr) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// stream: trace rows -> classification records
// ---------------------------------------------------------------------------

inline constexpr const char* kRecordsHeader = "# rfvc records v1";

inline std::string records_to_text(const std::vector<ClassificationRecord>& records) {
    std::ostringstream os;
    os << kRecordsHeader << "\n";
    os << "pass_id,label,direction,latency_s,v_est,l_est,t_drop,b,m,m_l,n\n";
    for (const auto& r : records) {
        const auto& f = r.features;
        os << strf("%d,%s,%s,%.6f,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.pass_id,
                   to_string(r.predicted), to_string(r.direction), r.latency_s, f.v_est, f.l_est,
                   f.t_drop, f.b, f.m, f.m_l, f.n);
    }
    return os.str();
}

struct StreamResult {
    std::vector<ClassificationRecord> records;
    std::vector<IncompletePassDiagnostic> diagnostics;
};

inline StreamResult run_stream_text(const AppConfig& cfg, const TrainedModel& model,
                                    const std::string& trace_text,
                                    const std::string& origin = "stream") {
    const auto samples = trace_from_text(trace_text, origin);
    Gateway gw(build_links(cfg.deployment), MacSchedule::from_config(cfg.deployment),
               cfg.detector, model);
    StreamResult result;
    for (const auto& s : samples) {
        auto recs = gw.push_sample(s);
        for (auto& r : recs) result.records.push_back(std::move(r));
    }
    result.diagnostics = gw.flush();
    return result;
}

// ---------------------------------------------------------------------------
// profile: wall-clock training / inference cost per family and representation
// ---------------------------------------------------------------------------

struct ProfileEntry {
    ModelFamily family = ModelFamily::knn;
    Representation representation = Representation::feature_vector;
    double train_s = 0.0;
    double infer_mean_s = 0.0;
    double infer_median_s = 0.0;
    double infer_p95_s = 0.0;
    size_t parameter_count = 0;
    size_t inferences = 0;
};

struct ProfileReport {
    std::string hardware;
    std::vector<ProfileEntry> entries;
};

inline std::string hardware_description() {
    utsname u{};
    if (uname(&u) != 0) return "unknown";
    return std::string(u.sysname) + " " + u.release + " " + u.machine;
}

inline ProfileEntry profile_model(const ModelSpec& spec, const Dataset& data,
                                  size_t min_inferences = 1000) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const TrainedModel model = train(spec, data);
    const auto t1 = clock::now();

    std::vector<double> times;
    times.reserve(min_inferences + data.size());
    size_t i = 0;
    while (times.size() < min_inferences) {
        const auto& x = data.inputs[i % data.size()];
        const auto s0 = clock::now();
        (void)model.predict(x);
        const auto s1 = clock::now();
        times.push_back(std::chrono::duration<double>(s1 - s0).count());
        ++i;
    }
    ProfileEntry e;
    e.family = spec.family;
    e.representation = data.representation;
    e.train_s = std::chrono::duration<double>(t1 - t0).count();
    e.infer_mean_s = mean_of(times);
    std::sort(times.begin(), times.end());
    e.infer_median_s = times[times.size() / 2];
    e.infer_p95_s = times[static_cast<size_t>(0.95 * static_cast<double>(times.size() - 1))];
    e.parameter_count = model.parameter_count();
    e.inferences = times.size();
    return e;
}

inline ProfileReport run_profile(const Dataset& features, const Dataset& raw, std::uint64_t seed,
                                 size_t min_inferences = 1000) {
    ProfileReport report;
    report.hardware = hardware_description();
    for (const Dataset* data : {&raw, &features}) {
        for (ModelFamily family : kAllFamilies) {
            ModelSpec spec;
            spec.family = family;
            spec.seed = seed;
            report.entries.push_back(profile_model(spec, *data, min_inferences));
        }
    }
    return report;
}

inline std::string profile_to_text(const ProfileReport& report) {
    std::ostringstream os;
    os << "# rfvc profile v1\n";
    os << "hardware = " << report.hardware << "\n";
    os << "energy = unsupported (requires hardware instrumentation)\n";
    os << "family,representation,train_s,infer_mean_s,infer_median_s,infer_p95_s,"
          "param_count,inferences\n";
    for (const auto& e : report.entries) {
        os << to_string(e.family) << "," << to_string(e.representation)
           << strf(",%.4e,%.4e,%.4e,%.4e,%zu,%zu\n", e.train_s, e.infer_mean_s,
                   e.infer_median_s, e.infer_p95_s, e.parameter_count, e.inferences);
    }
    return os.str();
}

}  // namespace rfvc
