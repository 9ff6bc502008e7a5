#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/geometry.hpp"

namespace rfvc {

/// One constant-height slice of a vehicle silhouette, front to back.
struct SilhouetteSegment {
    double length_m = 0.0;
    double height_m = 0.0;
};

/// Ground-truth vehicle. Kinematics are constant-acceleration over the pass;
/// the silhouette is a piecewise-constant height profile along the body.
struct VehicleProfile {
    int vehicle_id = 0;
    VehicleClass class_label = VehicleClass::car;
    double length_m = 0.0;
    std::vector<SilhouetteSegment> silhouette;
    double lateral_offset_m = 3.5;   ///< body centerline distance from TX side
    double width_m = 1.8;            ///< lateral body extent
    double entry_velocity_mps = 10.0;
    double acceleration_mps2 = 0.0;
    double entry_time_s = 0.0;
    Direction direction = Direction::forward;

    void validate() const {
        if (length_m <= 0) throw DataError("vehicle length must be > 0");
        if (entry_velocity_mps <= 0) throw DataError("entry velocity must be > 0");
        if (width_m <= 0) throw DataError("vehicle width must be > 0");
        if (silhouette.empty()) throw DataError("silhouette must not be empty");
        double total = 0.0;
        for (const auto& seg : silhouette) {
            if (seg.height_m <= 0) throw DataError("silhouette heights must be > 0");
            if (seg.length_m <= 0) throw DataError("silhouette segment lengths must be > 0");
            total += seg.length_m;
        }
        if (std::abs(total - length_m) > 1e-9 * std::max(1.0, length_m))
            throw DataError("silhouette segment lengths must sum to vehicle length");
    }

    /// Body height at distance u behind the front edge; 0 outside [0, length].
    double height_at(double u) const {
        if (u < 0.0 || u > length_m) return 0.0;
        double acc = 0.0;
        for (const auto& seg : silhouette) {
            acc += seg.length_m;
            if (u <= acc) return seg.height_m;
        }
        return silhouette.back().height_m;
    }

    /// Signed distance travelled since entry_time (always >= 0 for t >= entry).
    double advance(double t) const {
        const double dt = t - entry_time_s;
        return entry_velocity_mps * dt + 0.5 * acceleration_mps2 * dt * dt;
    }

    /// Speed at time t.
    double speed_at(double t) const {
        return entry_velocity_mps + acceleration_mps2 * (t - entry_time_s);
    }

    /// Time needed to travel `dist` meters from entry (smallest positive root).
    double travel_time(double dist) const {
        if (dist <= 0.0) return 0.0;
        const double v = entry_velocity_mps, a = acceleration_mps2;
        if (std::abs(a) < 1e-12) return dist / v;
        const double disc = v * v + 2.0 * a * dist;
        if (disc <= 0.0) throw DataError("vehicle stops before completing the pass");
        return (-v + std::sqrt(disc)) / a;
    }
};

/// Displacement along the road at time t, signed by travel direction.
/// Forward passes move toward +x, reverse passes toward -x.
inline double position_at(const VehicleProfile& v, double t) {
    const double d = v.advance(t);
    return v.direction == Direction::forward ? d : -d;
}

}  // namespace rfvc
