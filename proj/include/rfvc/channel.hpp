#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/geometry.hpp"
#include "rfvc/vehicle.hpp"

namespace rfvc {

/// Token rotation of the three transmitters. One slot = one TX beacon heard
/// by all three receivers, so a full round samples all nine links once.
struct MacSchedule {
    std::array<int, 3> token_order = {1, 2, 3};
    double slot_duration_s = 0.003;

    static MacSchedule from_config(const DeploymentConfig& cfg) {
        MacSchedule s;
        s.slot_duration_s = 1.0 / (3.0 * cfg.sample_rounds_per_second);
        return s;
    }

    double round_duration() const { return 3.0 * slot_duration_s; }

    int slot_of_tx(int tx_index) const {
        for (int s = 0; s < 3; ++s)
            if (token_order[s] == tx_index) return s;
        throw InternalError("tx index not in token order");
    }

    void validate(const DeploymentConfig& cfg) const {
        std::array<bool, 3> seen = {false, false, false};
        for (int t : token_order) {
            if (t < 1 || t > 3) throw UsageError("token order entries must be 1..3");
            seen[t - 1] = true;
        }
        if (!(seen[0] && seen[1] && seen[2]))
            throw UsageError("token order must be a permutation of {1,2,3}");
        if (slot_duration_s <= 0) throw UsageError("slot duration must be > 0");
        const double round = 1.0 / cfg.sample_rounds_per_second;
        if (std::abs(round_duration() - round) > 1e-9 * round)
            throw UsageError("schedule round duration inconsistent with sample_rounds_per_second");
    }
};

/// Per-sample RSSI disturbance. sigma scales with (path length / road width)
/// ^ distance_exponent; the default exponent 2 is the first-order SNR effect
/// (noise power fixed, received power falling with d^2), so the longer
/// diagonal links report noisier values.
struct NoiseModel {
    double sigma_db = 1.0;
    double quantization_step_db = 1.0;
    double distance_exponent = 2.0;

    void validate() const {
        if (sigma_db < 0) throw UsageError("noise sigma must be >= 0");
        if (quantization_step_db <= 0) throw UsageError("quantization step must be > 0");
        if (distance_exponent < 0) throw UsageError("noise distance exponent must be >= 0");
    }

    double sigma_for(const LinkGeometry& link, const DeploymentConfig& cfg) const {
        return sigma_db * std::pow(link.path_length() / cfg.road_width_m, distance_exponent);
    }
};

/// Saturating occlusion->attenuation map A(d) = A_max * (1 - exp(-d/lambda)).
struct ChannelParams {
    double a_max_db = 30.0;
    double lambda_m = 0.5;

    void validate() const {
        if (a_max_db <= 0) throw UsageError("a_max must be > 0");
        if (lambda_m <= 0) throw UsageError("lambda must be > 0");
    }
};

struct RssiSample {
    double time_s = 0.0;
    int link_id = 0;
    double rssi_dbm = 0.0;  ///< quantized; integer dBm at the default 1 dB step
};

struct RssiTrace {
    int link_id = 0;
    std::vector<RssiSample> samples;
    double idle_level_true_dbm = 0.0;  ///< generator-known baseline, for oracles
};

/// Free-space path loss in dB.
inline double fspl_db(double distance_m, double frequency_hz) {
    constexpr double c = 299792458.0;
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
           20.0 * std::log10(4.0 * std::numbers::pi / c);
}

/// Unoccluded RSSI of a link: TX power minus free-space path loss.
inline double idle_rssi(const LinkGeometry& link, const DeploymentConfig& cfg) {
    return cfg.tx_power_dbm - fspl_db(link.path_length(), cfg.carrier_frequency_hz);
}

/// Penetration of the LOS line below the body top at a given front position,
/// in meters (0 when the body misses the line).
///
/// Direct links cross the lane perpendicular, so the body is sampled at a
/// single point. Diagonal links cut an oblique chord of half-width
/// smear_halfwidth() through the body; the depth is averaged along it, which
/// smears event edges the way an oblique crossing does.
inline double occlusion_depth_at(const LinkGeometry& link, const VehicleProfile& vehicle,
                                 double front_x, double antenna_z, double road_width_m) {
    const double x_c = link.crossing_x(vehicle.lateral_offset_m);
    const double u_c = vehicle.direction == Direction::forward ? front_x - x_c : x_c - front_x;
    const double delta = link.smear_halfwidth(vehicle.width_m, road_width_m);
    if (delta <= 0.0) {
        if (u_c < 0.0 || u_c > vehicle.length_m) return 0.0;
        return std::max(0.0, vehicle.height_at(u_c) - antenna_z);
    }
    const double lo = u_c - delta, hi = u_c + delta;
    if (hi <= 0.0 || lo >= vehicle.length_m) return 0.0;
    double integral = 0.0;
    double seg_start = 0.0;
    for (const auto& seg : vehicle.silhouette) {
        const double seg_end = seg_start + seg.length_m;
        const double a = std::max(lo, seg_start);
        const double b = std::min(hi, seg_end);
        if (b > a) integral += (b - a) * std::max(0.0, seg.height_m - antenna_z);
        seg_start = seg_end;
    }
    return integral / (2.0 * delta);
}

/// Attenuation caused by an occlusion depth, bounded by a_max.
inline double attenuation_db(double depth_m, const ChannelParams& p = {}) {
    if (depth_m < 0) throw DataError("occlusion depth must be >= 0");
    return p.a_max_db * (1.0 - std::exp(-depth_m / p.lambda_m));
}

/// Longitudinal extent of one pass: where the vehicle front sits at
/// entry_time and how long until the body clears the whole array.
struct PassWindow {
    double x_enter = 0.0;       ///< front position at entry_time
    double clear_time_s = 0.0;  ///< body fully past every crossing
    double start_s = 0.0;       ///< first sampled round
    double end_s = 0.0;         ///< last sampled round is <= end_s

    static constexpr double kEnterMargin = 0.1;
};

inline double front_position(const VehicleProfile& v, const PassWindow& w, double t) {
    return w.x_enter + position_at(v, t);
}

inline PassWindow compute_pass_window(const VehicleProfile& vehicle,
                                      const std::vector<LinkGeometry>& links,
                                      double road_width_m, double lead_in_s,
                                      double lead_out_s) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    for (const auto& link : links) {
        const double x_c = link.crossing_x(vehicle.lateral_offset_m);
        const double delta = link.smear_halfwidth(vehicle.width_m, road_width_m);
        x_min = std::min(x_min, x_c - delta);
        x_max = std::max(x_max, x_c + delta);
    }
    PassWindow w;
    const double span = (x_max - x_min) + 2.0 * PassWindow::kEnterMargin;
    w.x_enter = vehicle.direction == Direction::forward ? x_min - PassWindow::kEnterMargin
                                                        : x_max + PassWindow::kEnterMargin;
    const double travel = span + vehicle.length_m;
    w.clear_time_s = vehicle.entry_time_s + vehicle.travel_time(travel);
    w.start_s = vehicle.entry_time_s - lead_in_s;
    w.end_s = w.clear_time_s + lead_out_s;
    return w;
}

/// Occlusion depth seen by one link at time t during a pass.
inline double occlusion_depth(const LinkGeometry& link, const VehicleProfile& vehicle,
                              double t, const PassWindow& window,
                              const DeploymentConfig& cfg) {
    return occlusion_depth_at(link, vehicle, front_position(vehicle, window, t),
                              cfg.antenna_height_m, cfg.road_width_m);
}

/// Synthesize the nine RSSI traces of one pass. Deterministic given the seed.
/// window_duration_s == 0 sizes the window automatically; a positive override
/// that cannot contain the pass is rejected.
inline std::array<RssiTrace, 9> synth_pass(const VehicleProfile& vehicle,
                                           const std::vector<LinkGeometry>& links,
                                           const DeploymentConfig& cfg,
                                           const MacSchedule& schedule,
                                           const NoiseModel& noise,
                                           const ChannelParams& channel,
                                           std::uint64_t seed,
                                           double lead_in_s = 1.5, double lead_out_s = 0.5,
                                           double window_duration_s = 0.0) {
    cfg.validate();
    schedule.validate(cfg);
    noise.validate();
    channel.validate();
    vehicle.validate();
    if (links.size() != 9) throw InternalError("expected nine links");

    PassWindow window = compute_pass_window(vehicle, links, cfg.road_width_m, lead_in_s, lead_out_s);
    if (window_duration_s > 0.0) {
        const double forced_end = window.start_s + window_duration_s;
        if (forced_end < window.end_s)
            throw DataError("synthesis window too short to contain the pass");
        window.end_s = forced_end;
    }

    std::array<RssiTrace, 9> traces;
    std::array<double, 9> idle{}, sigma{};
    for (int i = 0; i < 9; ++i) {
        traces[i].link_id = links[i].link_id;
        idle[i] = idle_rssi(links[i], cfg);
        sigma[i] = noise.sigma_for(links[i], cfg);
        traces[i].idle_level_true_dbm = quantize(idle[i], noise.quantization_step_db);
    }

    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(vehicle.vehicle_id)));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double round = schedule.round_duration();
    const long n_rounds = static_cast<long>(std::floor((window.end_s - window.start_s) / round)) + 1;
    for (long r = 0; r < n_rounds; ++r) {
        const double t_round = window.start_s + static_cast<double>(r) * round;
        for (int slot = 0; slot < 3; ++slot) {
            const int tx = schedule.token_order[static_cast<size_t>(slot)];
            const double t = t_round + slot * schedule.slot_duration_s;
            const double front = front_position(vehicle, window, t);
            for (int rx = 1; rx <= 3; ++rx) {
                const int idx = 3 * (tx - 1) + rx - 1;
                const double depth = occlusion_depth_at(links[static_cast<size_t>(idx)], vehicle,
                                                        front, cfg.antenna_height_m,
                                                        cfg.road_width_m);
                const double level =
                    idle[idx] - attenuation_db(depth, channel) + sigma[idx] * gauss(rng);
                traces[static_cast<size_t>(idx)].samples.push_back(
                    {t, links[static_cast<size_t>(idx)].link_id,
                     quantize(level, noise.quantization_step_db)});
            }
        }
    }
    return traces;
}

/// Interleave per-link traces into one time-ordered stream (ties by link_id).
inline std::vector<RssiSample> merge_traces(const std::array<RssiTrace, 9>& traces) {
    std::vector<RssiSample> all;
    size_t total = 0;
    for (const auto& t : traces) total += t.samples.size();
    all.reserve(total);
    for (const auto& t : traces) all.insert(all.end(), t.samples.begin(), t.samples.end());
    std::sort(all.begin(), all.end(), [](const RssiSample& a, const RssiSample& b) {
        if (a.time_s != b.time_s) return a.time_s < b.time_s;
        return a.link_id < b.link_id;
    });
    return all;
}

}  // namespace rfvc
