#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfvc/channel.hpp"
#include "rfvc/common.hpp"
#include "rfvc/events.hpp"
#include "rfvc/features.hpp"
#include "rfvc/model.hpp"

namespace rfvc {

/// One completed and classified pass emitted by the gateway.
struct ClassificationRecord {
    int pass_id = 0;
    double completion_time_s = 0.0;  ///< time of the sample that closed the trio
    VehicleClass predicted = VehicleClass::car;
    Direction direction = Direction::forward;
    FeatureVector features;
    double latency_s = 0.0;  ///< completion time minus last direct-link event end
};

struct IncompletePassDiagnostic {
    int link_id = 0;
    std::string reason;
};

/// Online pipeline over a single time-ordered stream of samples from all
/// nine links: per-link idle estimation, incremental event detection, pass
/// assembly, classification. Memory is bounded by the idle window plus the
/// event sample cap per link, independent of stream length.
///
/// A pass is emitted exactly once, by the push that closes the third direct
/// link event. Pass state resets once every link has returned to idle.
class Gateway {
public:
    Gateway(std::vector<LinkGeometry> links, MacSchedule schedule, DetectorConfig detector,
            TrainedModel model, ScalarSource source = ScalarSource::reference_link,
            int reference_link = 1)
        : links_(std::move(links)),
          schedule_(schedule),
          detector_cfg_(detector),
          model_(std::move(model)),
          source_(source),
          reference_link_(reference_link),
          pass_gap_s_(detector.idle_window_s) {
        detector_cfg_.validate();
        if (links_.size() != 9) throw UsageError("gateway needs the nine-link geometry");
    }

    std::vector<ClassificationRecord> push_sample(const RssiSample& sample) {
        if (sample.link_id < 1 || sample.link_id > 9)
            throw DataError("unknown link_id " + std::to_string(sample.link_id));
        if (!seen_any_) {
            seen_any_ = true;
            last_time_ = sample.time_s;
        } else if (sample.time_s < last_time_ - schedule_.round_duration()) {
            throw DataError("stream sample out of order by more than one round");
        }
        last_time_ = std::max(last_time_, sample.time_s);

        std::vector<ClassificationRecord> out;
        LinkState& st = links_state_[static_cast<size_t>(sample.link_id - 1)];
        if (!st.detector) {
            if (!st.saw_first) {
                st.saw_first = true;
                st.first_time = sample.time_s;
            }
            if (sample.time_s - st.first_time < detector_cfg_.idle_window_s) {
                st.idle_window.push_back(sample.rssi_dbm);
                return out;
            }
            st.detector.emplace(sample.link_id, median_of(st.idle_window), detector_cfg_);
            st.idle_window.clear();
            st.idle_window.shrink_to_fit();
        }
        if (auto ev = st.detector->push(sample)) {
            // First completed event per link and pass wins, as in the batch path.
            pass_events_.emplace(ev->link_id, std::move(*ev));
            if (!emitted_ && pass_events_.count(1) && pass_events_.count(5) &&
                pass_events_.count(9)) {
                out.push_back(classify(sample.time_s));
                emitted_ = true;
            }
        }
        maybe_reset(sample.time_s);
        return out;
    }

    /// End-of-stream diagnostics for passes that never completed.
    std::vector<IncompletePassDiagnostic> flush() {
        std::vector<IncompletePassDiagnostic> diags = abandoned_;
        for (size_t i = 0; i < links_state_.size(); ++i) {
            const LinkState& st = links_state_[i];
            if (st.detector && st.detector->in_event())
                diags.push_back({static_cast<int>(i) + 1,
                                 "attenuation event truncated by end of stream"});
        }
        if (!emitted_ && !pass_events_.empty()) diags.push_back(partial_trio_diag());
        return diags;
    }

    int passes_emitted() const { return next_pass_id_ - 1; }

private:
    struct LinkState {
        bool saw_first = false;
        double first_time = 0.0;
        std::vector<double> idle_window;
        std::optional<EventDetector> detector;
    };

    ClassificationRecord classify(double now) {
        ClassificationRecord rec;
        rec.pass_id = next_pass_id_++;
        rec.completion_time_s = now;
        rec.features = assemble_features(pass_events_, links_, source_, reference_link_,
                                         rec.pass_id);
        rec.direction = rec.features.direction;
        double last_end = 0.0;
        for (int id : {1, 5, 9})
            last_end = std::max(last_end, pass_events_.at(id).t_end);
        rec.latency_s = now - last_end;
        if (model_.representation == Representation::raw_data) {
            const RawVector rv = raw_vector(pass_events_.at(reference_link_));
            rec.predicted = model_.predict(rv.values);
        } else {
            const auto vals = rec.features.values();
            rec.predicted = model_.predict({vals.begin(), vals.end()});
        }
        return rec;
    }

    IncompletePassDiagnostic partial_trio_diag() const {
        std::string have;
        for (const auto& [id, ev] : pass_events_) {
            if (!have.empty()) have += ",";
            have += std::to_string(id);
        }
        return {0, "incomplete direct-link trio (events on links " + have + ")"};
    }

    // Pass boundary: once every link is back at idle, an emitted pass is
    // cleared immediately; an unfinished trio is abandoned after a full idle
    // gap so stale events cannot leak into the next pass.
    void maybe_reset(double now) {
        if (pass_events_.empty()) return;
        for (const auto& st : links_state_)
            if (st.detector && st.detector->in_event()) return;
        if (emitted_) {
            pass_events_.clear();
            emitted_ = false;
            return;
        }
        double latest_end = -std::numeric_limits<double>::infinity();
        for (const auto& [id, ev] : pass_events_) latest_end = std::max(latest_end, ev.t_end);
        if (now - latest_end > pass_gap_s_) {
            abandoned_.push_back(partial_trio_diag());
            pass_events_.clear();
        }
    }

    std::vector<LinkGeometry> links_;
    MacSchedule schedule_;
    DetectorConfig detector_cfg_;
    TrainedModel model_;
    ScalarSource source_;
    int reference_link_;

    double pass_gap_s_;
    std::array<LinkState, 9> links_state_;
    PassEvents pass_events_;
    std::vector<IncompletePassDiagnostic> abandoned_;
    bool emitted_ = false;
    bool seen_any_ = false;
    double last_time_ = 0.0;
    int next_pass_id_ = 1;
};

}  // namespace rfvc
