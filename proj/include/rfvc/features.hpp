#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/events.hpp"
#include "rfvc/geometry.hpp"

namespace rfvc {

/// Eq. 4 feature set F = {v~, l~, t_drop, b, m, m_l, n}.
struct FeatureVector {
    double v_est = 0.0;   ///< estimated velocity, m/s
    double l_est = 0.0;   ///< estimated length, m
    double t_drop = 0.0;  ///< s
    double b = 0.0;
    double m = 0.0;    ///< dB
    double m_l = 0.0;  ///< dB
    double n = 0.0;    ///< deep minima count (mean may be fractional)
    int vehicle_id = 0;
    Direction direction = Direction::forward;
    int reference_link = 1;

    std::array<double, 7> values() const { return {v_est, l_est, t_drop, b, m, m_l, n}; }
};

struct VelocityEstimate {
    double speed_mps = 0.0;
    Direction direction = Direction::forward;
};

/// Fixed-length, z-normalized resampling of one event (Table II raw mode).
struct RawVector {
    int link_id = 0;
    std::vector<double> values;
};

/// Eq. 1: mean of the three pairwise distance/time ratios over the direct
/// links. Onset ordering gives the travel direction; a zero time difference
/// means the pass was faster than the sampling can resolve.
inline VelocityEstimate estimate_velocity(const AttenuationEvent& ev1,
                                          const AttenuationEvent& ev5,
                                          const AttenuationEvent& ev9,
                                          double ref1, double ref5, double ref9) {
    const double t1 = ev1.t_start, t5 = ev5.t_start, t9 = ev9.t_start;
    const bool forward = (t1 < t5 && t5 < t9);
    const bool reverse = (t1 > t5 && t5 > t9);
    if (!forward && !reverse)
        throw DataError("direct-link onsets are not strictly ordered");
    const std::array<std::array<double, 2>, 3> pairs = {{
        {std::abs(ref5 - ref1), std::abs(t5 - t1)},
        {std::abs(ref9 - ref1), std::abs(t9 - t1)},
        {std::abs(ref9 - ref5), std::abs(t9 - t5)},
    }};
    double sum = 0.0;
    for (const auto& [d, dt] : pairs) {
        if (dt == 0.0) throw DataError("duplicate direct-link onset times");
        sum += d / dt;
    }
    return {sum / 3.0, forward ? Direction::forward : Direction::reverse};
}

/// Eq. 3: l~ = (v~/3) * (t_drop(1) + t_drop(5) + t_drop(9)).
inline double estimate_length(double v_est, double t_drop1, double t_drop5, double t_drop9) {
    if (v_est <= 0) throw DataError("velocity estimate must be > 0");
    return v_est / 3.0 * (t_drop1 + t_drop5 + t_drop9);
}

/// Where the per-event scalars of F come from: the designated reference link
/// (Table II evaluates link 1) or the mean over the three direct links.
enum class ScalarSource { reference_link, direct_mean };

/// Events of one pass, keyed by link_id; cross-link entries are optional.
using PassEvents = std::map<int, AttenuationEvent>;

inline const AttenuationEvent& direct_event(const PassEvents& events, int link_id) {
    auto it = events.find(link_id);
    if (it == events.end())
        throw DataError("incomplete pass: no event on direct link " + std::to_string(link_id));
    return it->second;
}

/// Eq. 4 assembly from the detected events of one pass.
inline FeatureVector assemble_features(const PassEvents& events,
                                       const std::vector<LinkGeometry>& links,
                                       ScalarSource source = ScalarSource::reference_link,
                                       int reference_link = 1, int vehicle_id = 0) {
    const AttenuationEvent& e1 = direct_event(events, 1);
    const AttenuationEvent& e5 = direct_event(events, 5);
    const AttenuationEvent& e9 = direct_event(events, 9);
    const VelocityEstimate vel =
        estimate_velocity(e1, e5, e9, link_by_id(links, 1).longitudinal_ref,
                          link_by_id(links, 5).longitudinal_ref,
                          link_by_id(links, 9).longitudinal_ref);

    FeatureVector f;
    f.vehicle_id = vehicle_id;
    f.direction = vel.direction;
    f.v_est = vel.speed_mps;
    f.l_est = estimate_length(vel.speed_mps, e1.t_drop, e5.t_drop, e9.t_drop);
    if (source == ScalarSource::reference_link) {
        const AttenuationEvent& ref = direct_event(events, reference_link);
        f.reference_link = reference_link;
        f.t_drop = ref.t_drop;
        f.b = ref.bulge_value;
        f.m = ref.magnitude_db;
        f.m_l = ref.local_magnitude_db;
        f.n = ref.deep_minima_count;
    } else {
        f.reference_link = 0;
        f.t_drop = (e1.t_drop + e5.t_drop + e9.t_drop) / 3.0;
        f.b = (e1.bulge_value + e5.bulge_value + e9.bulge_value) / 3.0;
        f.m = (e1.magnitude_db + e5.magnitude_db + e9.magnitude_db) / 3.0;
        f.m_l = (e1.local_magnitude_db + e5.local_magnitude_db + e9.local_magnitude_db) / 3.0;
        f.n = (e1.deep_minima_count + e5.deep_minima_count + e9.deep_minima_count) / 3.0;
    }
    for (double v : f.values())
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    return f;
}

/// Linear-interpolation resampling of the event samples onto `length`
/// uniform points spanning the event, then z-normalization (population std).
/// The resampled values of an event are invariant under time dilation.
inline RawVector raw_vector(const AttenuationEvent& event, size_t length = 64) {
    if (event.samples.size() < 2) throw DataError("raw vector needs at least two event samples");
    if (length < 2) throw UsageError("raw vector length must be >= 2");
    const double t0 = event.samples.front().time_s;
    const double t1 = event.samples.back().time_s;
    const double span = t1 - t0;
    RawVector out;
    out.link_id = event.link_id;
    out.values.resize(length);
    size_t seg = 0;
    for (size_t i = 0; i < length; ++i) {
        const double t = t0 + span * static_cast<double>(i) / static_cast<double>(length - 1);
        while (seg + 2 < event.samples.size() && event.samples[seg + 1].time_s < t) ++seg;
        const auto& a = event.samples[seg];
        const auto& b = event.samples[seg + 1];
        const double w = b.time_s == a.time_s ? 0.0 : (t - a.time_s) / (b.time_s - a.time_s);
        const double wc = std::clamp(w, 0.0, 1.0);
        out.values[i] = a.rssi_dbm + wc * (b.rssi_dbm - a.rssi_dbm);
    }
    const double mu = mean_of(out.values);
    const double sd = population_std(out.values);
    if (sd == 0.0) throw DegenerateEventError("raw vector undefined for a constant event");
    for (double& v : out.values) v = (v - mu) / sd;
    return out;
}

/// Per-link classification row (Fig. 7 evaluation): the link's own scalars
/// plus the shared velocity/length estimates.
inline std::array<double, 7> per_link_features(const AttenuationEvent& ev, double v_est,
                                               double l_est) {
    return {ev.t_drop, ev.bulge_value, ev.magnitude_db, ev.local_magnitude_db,
            static_cast<double>(ev.deep_minima_count), v_est, l_est};
}

}  // namespace rfvc
