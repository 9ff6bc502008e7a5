#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "rfvc/channel.hpp"
#include "rfvc/common.hpp"

namespace rfvc {

struct TruncatedEventError : DataError {
    using DataError::DataError;
};
struct DegenerateEventError : DataError {
    using DataError::DataError;
};

/// Hysteresis detector settings. An event opens after `min_consecutive`
/// samples below idle - drop_threshold and closes after the same number at
/// or above it. deep_minima_factor is the fixed 0.8 magnitude threshold for
/// counting deep local minima.
struct DetectorConfig {
    double drop_threshold_db = 6.0;
    int min_consecutive = 3;
    double idle_window_s = 1.0;
    double deep_minima_factor = 0.8;
    size_t max_event_samples = 16384;

    void validate() const {
        if (drop_threshold_db <= 0) throw UsageError("drop threshold must be > 0");
        if (min_consecutive < 1) throw UsageError("min_consecutive must be >= 1");
        if (idle_window_s <= 0) throw UsageError("idle window must be > 0");
        if (deep_minima_factor != 0.8)
            throw UsageError("deep_minima_factor is fixed at 0.8");
        if (max_event_samples < 4) throw UsageError("max_event_samples too small");
    }
};

/// One detected signal-drop episode and its statistics.
struct AttenuationEvent {
    int link_id = 0;
    double t_start = 0.0;        ///< drop onset
    double t_end = 0.0;          ///< first confirmed recovery sample
    double t_drop = 0.0;         ///< t_end - t_start
    double idle_level_dbm = 0.0; ///< estimated idle baseline
    double min_rssi_dbm = 0.0;
    double magnitude_db = 0.0;       ///< m  = idle - min
    double local_magnitude_db = 0.0; ///< m_l = max - min over [t_start, t_end]
    int deep_minima_count = 0;       ///< n
    double bulge_value = 0.0;        ///< b, Eq. 2 kurtosis
    std::vector<RssiSample> samples; ///< samples in [t_start, t_end] inclusive
};

/// Baseline estimate: median over the leading idle window of the trace.
inline double estimate_idle(const RssiTrace& trace, const DetectorConfig& cfg) {
    cfg.validate();
    if (trace.samples.size() < 2) throw DataError("trace too short to estimate idle level");
    const double t0 = trace.samples.front().time_s;
    const double span = trace.samples.back().time_s - t0;
    if (span < cfg.idle_window_s)
        throw DataError("trace shorter than the idle estimation window");
    std::vector<double> window;
    for (const auto& s : trace.samples) {
        if (s.time_s - t0 >= cfg.idle_window_s) break;
        window.push_back(s.rssi_dbm);
    }
    return median_of(std::move(window));
}

/// Sample kurtosis with population (1/N) standard deviation.
inline double bulge(const std::vector<double>& values) {
    if (values.size() < 2) throw DataError("bulge needs at least two samples");
    const double mu = mean_of(values);
    const double sd = population_std(values);
    if (sd == 0.0) throw DegenerateEventError("bulge undefined for a constant sample set");
    double acc = 0.0;
    for (double v : values) {
        const double z = (v - mu) / sd;
        acc += z * z * z * z;
    }
    return acc / static_cast<double>(values.size());
}

/// Count local minima at or below idle - factor*m. Plateaus of equal values
/// merge into one minimum; event boundaries count as greater neighbors.
inline int count_deep_minima(const std::vector<double>& values, double idle_level,
                             double magnitude, double factor) {
    const double threshold = idle_level - factor * magnitude;
    int count = 0;
    const size_t n = values.size();
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) ++j;  // run of equal values
        const bool left_greater = (i == 0) || (values[i - 1] > values[i]);
        const bool right_greater = (j == n - 1) || (values[j + 1] > values[i]);
        if (left_greater && right_greater && values[i] <= threshold) ++count;
        i = j + 1;
    }
    return count;
}

/// Assemble the event record from its samples (onset through the first
/// confirmed recovery sample, inclusive); shared by the batch and streaming
/// paths so both produce identical statistics.
inline AttenuationEvent make_event(int link_id, double idle_level,
                                   std::vector<RssiSample> samples, const DetectorConfig& cfg) {
    if (samples.size() < 2) throw InternalError("event needs at least two samples");
    AttenuationEvent ev;
    ev.link_id = link_id;
    ev.idle_level_dbm = idle_level;
    ev.t_start = samples.front().time_s;
    ev.t_end = samples.back().time_s;
    ev.t_drop = ev.t_end - ev.t_start;
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) values.push_back(s.rssi_dbm);
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ev.min_rssi_dbm = lo;
    ev.magnitude_db = idle_level - lo;
    ev.local_magnitude_db = hi - lo;
    ev.bulge_value = bulge(values);
    ev.deep_minima_count =
        count_deep_minima(values, idle_level, ev.magnitude_db, cfg.deep_minima_factor);
    ev.samples = std::move(samples);
    return ev;
}

/// Incremental hysteresis detector for one link. Feed time-ordered samples;
/// a completed event is returned by the push that confirms its recovery.
/// The same machine backs detect_event() and the streaming gateway.
class EventDetector {
public:
    EventDetector(int link_id, double idle_level, const DetectorConfig& cfg)
        : link_id_(link_id), idle_(idle_level), cfg_(cfg) {}

    std::optional<AttenuationEvent> push(const RssiSample& s) {
        const bool below = s.rssi_dbm < idle_ - cfg_.drop_threshold_db;
        const int k = cfg_.min_consecutive;
        if (!in_event_) {
            pending_.push_back(s);
            if (static_cast<int>(pending_.size()) > k) pending_.pop_front();
            below_run_ = below ? below_run_ + 1 : 0;
            if (below_run_ >= k) {
                in_event_ = true;
                event_.assign(pending_.begin(), pending_.end());
                pending_.clear();
                below_run_ = 0;
                recover_run_ = 0;
            }
            return std::nullopt;
        }
        event_.push_back(s);
        if (event_.size() > cfg_.max_event_samples)
            throw DataError("attenuation event exceeds the sample cap");
        recover_run_ = below ? 0 : recover_run_ + 1;
        if (recover_run_ >= k) {
            // The closing run is the last k samples; the event ends at (and
            // includes) the first sample of that run.
            const size_t end_idx = event_.size() - static_cast<size_t>(k);
            std::vector<RssiSample> body(event_.begin(),
                                         event_.begin() + static_cast<long>(end_idx) + 1);
            in_event_ = false;
            event_.clear();
            recover_run_ = 0;
            return make_event(link_id_, idle_, std::move(body), cfg_);
        }
        return std::nullopt;
    }

    bool in_event() const { return in_event_; }
    double idle_level() const { return idle_; }

private:
    int link_id_;
    double idle_;
    DetectorConfig cfg_;
    bool in_event_ = false;
    int below_run_ = 0;
    int recover_run_ = 0;
    std::deque<RssiSample> pending_;
    std::vector<RssiSample> event_;
};

/// First attenuation event of a trace, or nullopt when the link never drops.
/// Detection is armed only after the idle estimation window. An event still
/// open at the end of the trace is a truncated pass.
inline std::optional<AttenuationEvent> detect_event(const RssiTrace& trace, double idle_level,
                                                    const DetectorConfig& cfg) {
    cfg.validate();
    if (trace.samples.empty()) return std::nullopt;
    const double t0 = trace.samples.front().time_s;
    EventDetector det(trace.link_id, idle_level, cfg);
    for (const auto& s : trace.samples) {
        if (s.time_s - t0 < cfg.idle_window_s) continue;
        if (auto ev = det.push(s)) return ev;
    }
    if (det.in_event())
        throw TruncatedEventError("attenuation event truncated by end of trace (link " +
                                  std::to_string(trace.link_id) + ")");
    return std::nullopt;
}

}  // namespace rfvc
