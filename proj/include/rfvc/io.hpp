#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rfvc/channel.hpp"
#include "rfvc/common.hpp"
#include "rfvc/events.hpp"
#include "rfvc/features.hpp"
#include "rfvc/fleet.hpp"
#include "rfvc/geometry.hpp"

namespace rfvc {

// ---------------------------------------------------------------------------
// Basic file helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out.good()) throw DataError("write failed: " + path);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(context + ": bad number '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& context) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(context + ": bad integer '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Trace files: one file per pass, all nine links interleaved in time order.
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader = "# rfvc trace v1";

inline std::string trace_to_text(const std::vector<RssiSample>& samples) {
    std::ostringstream os;
    os << kTraceHeader << "\n";
    os << "time_s,link_id,rssi_dbm\n";
    char buf[64];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.6f,%d,%g\n", s.time_s, s.link_id, s.rssi_dbm);
        os << buf;
    }
    return os.str();
}

inline std::vector<RssiSample> trace_from_text(const std::string& text,
                                               const std::string& origin = "trace") {
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    std::vector<RssiSample> samples;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind(kTraceHeader, 0) != 0)
                throw DataError(origin + ": missing trace version header");
            continue;
        }
        if (line_no == 2) continue;  // column names
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw DataError(ctx + ": expected 3 columns");
        RssiSample s;
        s.time_s = parse_double(fields[0], ctx);
        s.link_id = static_cast<int>(parse_long(fields[1], ctx));
        s.rssi_dbm = parse_double(fields[2], ctx);
        if (s.link_id < 1 || s.link_id > 9) throw DataError(ctx + ": link_id out of range");
        samples.push_back(s);
    }
    return samples;
}

/// Regroup a time-ordered stream into per-link traces (link_id 1..9 order).
inline std::array<RssiTrace, 9> traces_from_samples(const std::vector<RssiSample>& samples) {
    std::array<RssiTrace, 9> traces;
    for (int i = 0; i < 9; ++i) traces[static_cast<size_t>(i)].link_id = i + 1;
    for (const auto& s : samples)
        traces[static_cast<size_t>(s.link_id - 1)].samples.push_back(s);
    return traces;
}

// ---------------------------------------------------------------------------
// Manifest: ground truth, one record per synthesized pass.
// ---------------------------------------------------------------------------

inline constexpr const char* kManifestHeader = "# rfvc manifest v1";

struct ManifestRow {
    int vehicle_id = 0;
    VehicleClass class_label = VehicleClass::car;
    double length_m = 0.0;
    double velocity_mps = 0.0;
    double accel_mps2 = 0.0;
    Direction direction = Direction::forward;
    double lateral_offset_m = 0.0;
    double width_m = 0.0;
    double entry_time_s = 0.0;
    std::string trace_file;
};

inline std::string manifest_to_text(const std::vector<ManifestRow>& rows) {
    std::ostringstream os;
    os << kManifestHeader << "\n";
    os << "vehicle_id,class,length_m,velocity_mps,accel_mps2,direction,"
          "lateral_offset_m,width_m,entry_time_s,trace_file\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.12g,%.12g,%.12g,%s,%.12g,%.12g,%.12g,",
                      r.vehicle_id, to_string(r.class_label), r.length_m, r.velocity_mps,
                      r.accel_mps2, to_string(r.direction), r.lateral_offset_m, r.width_m,
                      r.entry_time_s);
        os << buf << r.trace_file << "\n";
    }
    return os.str();
}

inline std::vector<ManifestRow> manifest_from_text(const std::string& text,
                                                   const std::string& origin = "manifest") {
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    std::vector<ManifestRow> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind(kManifestHeader, 0) != 0)
                throw DataError(origin + ": missing manifest version header");
            continue;
        }
        if (line_no == 2 || line.empty()) continue;
        const auto f = split_csv(line);
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (f.size() != 10) throw DataError(ctx + ": expected 10 columns");
        ManifestRow r;
        r.vehicle_id = static_cast<int>(parse_long(f[0], ctx));
        r.class_label = parse_class(f[1]);
        r.length_m = parse_double(f[2], ctx);
        r.velocity_mps = parse_double(f[3], ctx);
        r.accel_mps2 = parse_double(f[4], ctx);
        r.direction = parse_direction(f[5]);
        r.lateral_offset_m = parse_double(f[6], ctx);
        r.width_m = parse_double(f[7], ctx);
        r.entry_time_s = parse_double(f[8], ctx);
        r.trace_file = f[9];
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Feature / raw-vector files.
// ---------------------------------------------------------------------------

inline constexpr const char* kFeaturesHeader = "# rfvc features v1";
inline constexpr const char* kPerLinkHeader = "# rfvc features-per-link v1";
inline constexpr const char* kRawHeader = "# rfvc raw v1";

struct FeatureRow {
    FeatureVector features;
    VehicleClass label = VehicleClass::car;
};

inline std::string features_to_text(const std::vector<FeatureRow>& rows) {
    std::ostringstream os;
    os << kFeaturesHeader << "\n";
    os << "vehicle_id,v_est,l_est,t_drop,b,m,m_l,n,label\n";
    char buf[256];
    for (const auto& r : rows) {
        const auto& f = r.features;
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n",
                      f.vehicle_id, f.v_est, f.l_est, f.t_drop, f.b, f.m, f.m_l, f.n,
                      to_string(r.label));
        os << buf;
    }
    return os.str();
}

inline std::vector<FeatureRow> features_from_text(const std::string& text,
                                                  const std::string& origin = "features") {
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    std::vector<FeatureRow> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind(kFeaturesHeader, 0) != 0)
                throw DataError(origin + ": missing features version header");
            continue;
        }
        if (line_no == 2 || line.empty()) continue;
        const auto f = split_csv(line);
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (f.size() != 9) throw DataError(ctx + ": expected 9 columns");
        FeatureRow r;
        r.features.vehicle_id = static_cast<int>(parse_long(f[0], ctx));
        r.features.v_est = parse_double(f[1], ctx);
        r.features.l_est = parse_double(f[2], ctx);
        r.features.t_drop = parse_double(f[3], ctx);
        r.features.b = parse_double(f[4], ctx);
        r.features.m = parse_double(f[5], ctx);
        r.features.m_l = parse_double(f[6], ctx);
        r.features.n = parse_double(f[7], ctx);
        r.label = parse_class(f[8]);
        rows.push_back(r);
    }
    return rows;
}

struct PerLinkRow {
    int vehicle_id = 0;
    int link_id = 0;
    std::array<double, 7> values{};  ///< t_drop, b, m, m_l, n, v_est, l_est
    VehicleClass label = VehicleClass::car;
};

inline std::string per_link_to_text(const std::vector<PerLinkRow>& rows) {
    std::ostringstream os;
    os << kPerLinkHeader << "\n";
    os << "vehicle_id,link_id,t_drop,b,m,m_l,n,v_est,l_est,label\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n",
                      r.vehicle_id, r.link_id, r.values[0], r.values[1], r.values[2], r.values[3],
                      r.values[4], r.values[5], r.values[6], to_string(r.label));
        os << buf;
    }
    return os.str();
}

inline std::vector<PerLinkRow> per_link_from_text(const std::string& text,
                                                  const std::string& origin = "features-per-link") {
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    std::vector<PerLinkRow> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind(kPerLinkHeader, 0) != 0)
                throw DataError(origin + ": missing per-link version header");
            continue;
        }
        if (line_no == 2 || line.empty()) continue;
        const auto f = split_csv(line);
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (f.size() != 10) throw DataError(ctx + ": expected 10 columns");
        PerLinkRow r;
        r.vehicle_id = static_cast<int>(parse_long(f[0], ctx));
        r.link_id = static_cast<int>(parse_long(f[1], ctx));
        for (int i = 0; i < 7; ++i)
            r.values[static_cast<size_t>(i)] = parse_double(f[static_cast<size_t>(i) + 2], ctx);
        r.label = parse_class(f[9]);
        rows.push_back(r);
    }
    return rows;
}

struct RawRow {
    int vehicle_id = 0;
    int link_id = 0;
    std::vector<double> values;
    VehicleClass label = VehicleClass::car;
};

inline std::string raw_rows_to_text(const std::vector<RawRow>& rows, size_t length) {
    std::ostringstream os;
    os << kRawHeader << "\n";
    os << "vehicle_id,link_id";
    for (size_t i = 0; i < length; ++i) os << ",x" << i;
    os << ",label\n";
    char buf[32];
    for (const auto& r : rows) {
        os << r.vehicle_id << "," << r.link_id;
        for (double v : r.values) {
            std::snprintf(buf, sizeof(buf), ",%.9g", v);
            os << buf;
        }
        os << "," << to_string(r.label) << "\n";
    }
    return os.str();
}

inline std::vector<RawRow> raw_rows_from_text(const std::string& text,
                                              const std::string& origin = "raw") {
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    std::vector<RawRow> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind(kRawHeader, 0) != 0)
                throw DataError(origin + ": missing raw version header");
            continue;
        }
        if (line_no == 2 || line.empty()) continue;
        const auto f = split_csv(line);
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (f.size() < 4) throw DataError(ctx + ": too few columns");
        RawRow r;
        r.vehicle_id = static_cast<int>(parse_long(f[0], ctx));
        r.link_id = static_cast<int>(parse_long(f[1], ctx));
        for (size_t i = 2; i + 1 < f.size(); ++i) r.values.push_back(parse_double(f[i], ctx));
        r.label = parse_class(f.back());
        if (!rows.empty() && rows.front().values.size() != r.values.size())
            throw DataError(ctx + ": inconsistent raw vector length");
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Configuration file: `key = value` lines, '#' comments.
// ---------------------------------------------------------------------------

/// Everything a pipeline run needs; see README for the key schema.
struct AppConfig {
    DeploymentConfig deployment;
    NoiseModel noise;
    ChannelParams channel;
    DetectorConfig detector;
    FleetSpec fleet = FleetSpec::defaults();
    double lead_in_s = 1.5;
    double lead_out_s = 0.5;
    size_t raw_length = 64;

    void validate() const {
        deployment.validate();
        noise.validate();
        channel.validate();
        detector.validate();
        fleet.validate();
        if (lead_in_s < detector.idle_window_s)
            throw UsageError("synth.lead_in_s must cover the detector idle window");
        if (lead_out_s <= 0) throw UsageError("synth.lead_out_s must be > 0");
        if (raw_length < 2) throw UsageError("raw.length must be >= 2");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

inline Distribution parse_distribution(const std::string& text, const std::string& ctx) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    Distribution d;
    if (kind == "constant") {
        d.kind = Distribution::Kind::constant;
        if (!(is >> d.a)) throw UsageError(ctx + ": constant needs one value");
    } else if (kind == "uniform") {
        d.kind = Distribution::Kind::uniform;
        if (!(is >> d.a >> d.b)) throw UsageError(ctx + ": uniform needs lo hi");
    } else if (kind == "normal") {
        d.kind = Distribution::Kind::normal;
        if (!(is >> d.a >> d.b)) throw UsageError(ctx + ": normal needs mean sd");
    } else {
        throw UsageError(ctx + ": unknown distribution kind '" + kind + "'");
    }
    std::string word;
    if (is >> word) {
        if (word != "clamp") throw UsageError(ctx + ": expected 'clamp lo hi'");
        if (!(is >> d.clamp_lo >> d.clamp_hi)) throw UsageError(ctx + ": clamp needs lo hi");
    }
    d.validate();
    return d;
}

inline bool class_key(const std::string& key, const std::string& prefix, std::string& rest) {
    if (key.rfind(prefix, 0) != 0) return false;
    rest = key.substr(prefix.size());
    return true;
}

inline void apply_class_key(VehicleClassSpec& cls, const std::string& rest,
                            const std::string& value, const std::string& ctx) {
    if (rest == "length") cls.length = parse_distribution(value, ctx);
    else if (rest == "velocity") cls.velocity = parse_distribution(value, ctx);
    else if (rest == "acceleration") cls.acceleration = parse_distribution(value, ctx);
    else if (rest == "lateral_offset") cls.lateral_offset = parse_distribution(value, ctx);
    else if (rest == "width") cls.width = parse_distribution(value, ctx);
    else if (rest == "segments") {
        std::istringstream is(value);
        std::vector<double> fracs;
        double f;
        while (is >> f) fracs.push_back(f);
        if (fracs.empty()) throw UsageError(ctx + ": segments needs fractions");
        std::vector<SegmentSpec> segs;
        for (size_t i = 0; i < fracs.size(); ++i) {
            SegmentSpec s;
            s.fraction = fracs[i];
            s.height = i < cls.segments.size() ? cls.segments[i].height
                                               : Distribution::constant(1.5);
            segs.push_back(s);
        }
        cls.segments = segs;
    } else if (rest.rfind("height.", 0) == 0) {
        const size_t idx = static_cast<size_t>(parse_long(rest.substr(7), ctx));
        if (idx < 1 || idx > cls.segments.size())
            throw UsageError(ctx + ": height index out of range (set segments first)");
        cls.segments[idx - 1].height = parse_distribution(value, ctx);
    } else {
        throw UsageError(ctx + ": unknown fleet key '" + rest + "'");
    }
}

}  // namespace detail

/// Parse a config document; unknown keys are errors so typos surface early.
inline AppConfig parse_config_text(const std::string& text, const std::string& origin = "config") {
    AppConfig cfg;
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        const std::string ctx = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw UsageError(ctx + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw UsageError(ctx + ": expected 'key = value'");

        auto num = [&]() { return parse_double(value, ctx); };
        std::string rest;
        if (key == "deployment.tx_power_dbm") cfg.deployment.tx_power_dbm = num();
        else if (key == "deployment.carrier_frequency_hz") cfg.deployment.carrier_frequency_hz = num();
        else if (key == "deployment.antenna_height_m") cfg.deployment.antenna_height_m = num();
        else if (key == "deployment.road_width_m") cfg.deployment.road_width_m = num();
        else if (key == "deployment.post_spacing_m") cfg.deployment.post_spacing_m = num();
        else if (key == "deployment.lane_offset_m") cfg.deployment.lane_offset_m = num();
        else if (key == "deployment.sample_rounds_per_second")
            cfg.deployment.sample_rounds_per_second = num();
        else if (key == "noise.sigma_db") cfg.noise.sigma_db = num();
        else if (key == "noise.quantization_step_db") cfg.noise.quantization_step_db = num();
        else if (key == "noise.distance_exponent") cfg.noise.distance_exponent = num();
        else if (key == "channel.a_max_db") cfg.channel.a_max_db = num();
        else if (key == "channel.lambda_m") cfg.channel.lambda_m = num();
        else if (key == "detector.drop_threshold_db") cfg.detector.drop_threshold_db = num();
        else if (key == "detector.min_consecutive")
            cfg.detector.min_consecutive = static_cast<int>(parse_long(value, ctx));
        else if (key == "detector.idle_window_s") cfg.detector.idle_window_s = num();
        else if (key == "synth.lead_in_s") cfg.lead_in_s = num();
        else if (key == "synth.lead_out_s") cfg.lead_out_s = num();
        else if (key == "raw.length") cfg.raw_length = static_cast<size_t>(parse_long(value, ctx));
        else if (key == "fleet.truck_fraction") cfg.fleet.truck_fraction = num();
        else if (key == "fleet.reverse_fraction") cfg.fleet.reverse_fraction = num();
        else if (detail::class_key(key, "fleet.car.", rest))
            detail::apply_class_key(cfg.fleet.car, rest, value, ctx);
        else if (detail::class_key(key, "fleet.truck.", rest))
            detail::apply_class_key(cfg.fleet.truck, rest, value, ctx);
        else
            throw UsageError(ctx + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline AppConfig load_config(const std::string& path) {
    return parse_config_text(read_text_file(path), path);
}

}  // namespace rfvc
