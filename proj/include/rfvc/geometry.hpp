#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rfvc/common.hpp"

namespace rfvc {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Physical deployment parameters of the 3x3 delineator-post array.
/// Defaults: 2.4 GHz, 2.5 dBm, 1 m antennas, 7 m road, 5 m post spacing.
struct DeploymentConfig {
    double tx_power_dbm = 2.5;
    double carrier_frequency_hz = 2.4e9;
    double antenna_height_m = 1.0;
    double road_width_m = 7.0;        ///< lateral TX-to-RX separation
    double post_spacing_m = 5.0;      ///< longitudinal spacing between posts
    double lane_offset_m = 3.5;       ///< lane centerline distance from TX side
    double sample_rounds_per_second = 1000.0 / 9.0;  ///< full token rounds per second

    void validate() const {
        if (antenna_height_m <= 0) throw UsageError("antenna_height must be > 0");
        if (road_width_m <= 0) throw UsageError("road_width must be > 0");
        if (post_spacing_m <= 0) throw UsageError("post_spacing must be > 0");
        if (lane_offset_m <= 0 || lane_offset_m >= road_width_m)
            throw UsageError("lane_offset must be inside (0, road_width)");
        if (carrier_frequency_hz <= 0) throw UsageError("carrier_frequency must be > 0");
        if (sample_rounds_per_second <= 0) throw UsageError("sample_rounds_per_second must be > 0");
    }
};

/// One TX->RX radio link of the array. link_id = 3*(tx-1)+rx, so the
/// perpendicular (direct) links are 1, 5 and 9.
struct LinkGeometry {
    int link_id = 0;       ///< 1..9
    int tx_index = 0;      ///< 1..3
    int rx_index = 0;      ///< 1..3
    Vec3 tx_position;
    Vec3 rx_position;
    bool is_direct = false;
    double longitudinal_ref = 0.0;  ///< x where the LOS crosses the lane centerline

    /// x-coordinate of the LOS segment at lateral position y.
    double crossing_x(double lateral_y) const {
        const double w = rx_position.y - tx_position.y;
        return tx_position.x + (rx_position.x - tx_position.x) * (lateral_y - tx_position.y) / w;
    }

    /// Half-width (in x) of the LOS chord cut by a body of the given lateral
    /// extent. Zero for direct links; diagonal links see an oblique crossing.
    double smear_halfwidth(double body_width_m, double road_width_m) const {
        return std::abs(rx_position.x - tx_position.x) * (0.5 * body_width_m) / road_width_m;
    }

    double path_length() const { return distance(tx_position, rx_position); }
};

/// TX posts on y=0 at x in {0, s, 2s}, RX posts opposite on y=road_width.
/// Emits all nine pairs in link_id order.
inline std::vector<LinkGeometry> build_links(const DeploymentConfig& cfg) {
    cfg.validate();
    std::vector<LinkGeometry> links;
    links.reserve(9);
    const double s = cfg.post_spacing_m;
    for (int tx = 1; tx <= 3; ++tx) {
        for (int rx = 1; rx <= 3; ++rx) {
            LinkGeometry link;
            link.link_id = 3 * (tx - 1) + rx;
            link.tx_index = tx;
            link.rx_index = rx;
            link.tx_position = {s * (tx - 1), 0.0, cfg.antenna_height_m};
            link.rx_position = {s * (rx - 1), cfg.road_width_m, cfg.antenna_height_m};
            link.is_direct = (tx == rx);
            link.longitudinal_ref = link.crossing_x(cfg.lane_offset_m);
            links.push_back(link);
        }
    }
    return links;
}

inline const LinkGeometry& link_by_id(const std::vector<LinkGeometry>& links, int id) {
    for (const auto& l : links)
        if (l.link_id == id) return l;
    throw DataError("unknown link_id " + std::to_string(id));
}

}  // namespace rfvc
