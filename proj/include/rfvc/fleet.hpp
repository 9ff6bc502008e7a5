#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/vehicle.hpp"

namespace rfvc {

/// Scalar sampling distribution: constant, uniform(a,b) or normal(mean,sd),
/// optionally clipped to [clamp_lo, clamp_hi].
struct Distribution {
    enum class Kind { constant, uniform, normal };
    Kind kind = Kind::constant;
    double a = 0.0;  ///< constant value / uniform lo / normal mean
    double b = 0.0;  ///< uniform hi / normal sd
    double clamp_lo = -std::numeric_limits<double>::infinity();
    double clamp_hi = std::numeric_limits<double>::infinity();

    static Distribution constant(double v) { return {Kind::constant, v, 0.0}; }
    static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
    static Distribution normal(double mean, double sd, double lo, double hi) {
        return {Kind::normal, mean, sd, lo, hi};
    }

    double sample(std::mt19937_64& rng) const {
        double v = 0.0;
        switch (kind) {
            case Kind::constant: v = a; break;
            case Kind::uniform: v = std::uniform_real_distribution<double>(a, b)(rng); break;
            case Kind::normal: v = std::normal_distribution<double>(a, b)(rng); break;
        }
        if (v < clamp_lo) v = clamp_lo;
        if (v > clamp_hi) v = clamp_hi;
        return v;
    }

    /// Smallest value the distribution can produce.
    double support_min() const {
        switch (kind) {
            case Kind::constant: return std::min(std::max(a, clamp_lo), clamp_hi);
            case Kind::uniform: return std::min(std::max(a, clamp_lo), clamp_hi);
            case Kind::normal: return clamp_lo;
        }
        return clamp_lo;
    }

    void validate() const {
        if (kind == Kind::uniform && b < a) throw UsageError("uniform distribution needs lo <= hi");
        if (kind == Kind::normal && b < 0) throw UsageError("normal distribution needs sd >= 0");
        if (clamp_hi < clamp_lo) throw UsageError("distribution clamp needs lo <= hi");
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::constant: os << "constant " << a; break;
            case Kind::uniform: os << "uniform " << a << " " << b; break;
            case Kind::normal: os << "normal " << a << " " << b; break;
        }
        if (std::isfinite(clamp_lo) || std::isfinite(clamp_hi))
            os << " clamp " << clamp_lo << " " << clamp_hi;
        return os.str();
    }
};

/// Height distribution of one silhouette slice plus its share of the length.
struct SegmentSpec {
    double fraction = 1.0;
    Distribution height;
};

/// Per-class generative model of the fleet.
struct VehicleClassSpec {
    Distribution length;
    Distribution velocity;
    Distribution acceleration;
    Distribution lateral_offset;
    Distribution width;
    std::vector<SegmentSpec> segments;

    void validate() const {
        length.validate();
        velocity.validate();
        acceleration.validate();
        lateral_offset.validate();
        width.validate();
        if (length.support_min() <= 0)
            throw UsageError("length distribution can produce non-positive values");
        if (velocity.support_min() <= 0)
            throw UsageError("velocity distribution can produce non-positive values");
        if (width.support_min() <= 0)
            throw UsageError("width distribution can produce non-positive values");
        if (segments.empty()) throw UsageError("silhouette needs at least one segment");
        double total = 0.0;
        for (const auto& s : segments) {
            s.height.validate();
            if (s.fraction <= 0) throw UsageError("segment fractions must be > 0");
            if (s.height.support_min() <= 0)
                throw UsageError("height distribution can produce non-positive values");
            total += s.fraction;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw UsageError("segment fractions must sum to 1");
    }
};

/// Fleet generator spec. Sampling is a pure function of (spec, n): vehicle i
/// draws from an rng seeded with mix_seed(rng_seed, i), so fleets are
/// reproducible and prefix-stable.
struct FleetSpec {
    double truck_fraction = 0.4;
    double reverse_fraction = 0.0;
    VehicleClassSpec car;
    VehicleClassSpec truck;
    std::uint64_t rng_seed = 1;

    /// Default desk-scale fleet: sedans/SUVs vs. tractor-trailers. Heights are
    /// chosen so every slice shadows a 1 m antenna line, with the trailer
    /// coupling gap giving trucks their characteristic two-lobed fingerprint.
    static FleetSpec defaults() {
        FleetSpec f;
        f.car.length = Distribution::normal(4.5, 0.3, 3.6, 5.4);
        f.car.velocity = Distribution::uniform(8.0, 16.0);
        f.car.acceleration = Distribution::constant(0.0);
        f.car.lateral_offset = Distribution::normal(3.5, 0.3, 2.8, 4.2);
        f.car.width = Distribution::normal(1.82, 0.06, 1.70, 1.95);
        f.car.segments = {
            {0.30, Distribution::normal(1.30, 0.05, 1.20, 1.40)},   // hood
            {0.45, Distribution::normal(1.55, 0.07, 1.35, 1.75)},   // cabin
            {0.25, Distribution::normal(1.38, 0.05, 1.25, 1.50)},   // trunk
        };
        f.truck.length = Distribution::normal(12.0, 2.0, 8.0, 16.0);
        f.truck.velocity = Distribution::uniform(8.0, 16.0);
        f.truck.acceleration = Distribution::constant(0.0);
        f.truck.lateral_offset = Distribution::normal(3.5, 0.3, 2.8, 4.2);
        f.truck.width = Distribution::normal(2.45, 0.06, 2.30, 2.60);
        f.truck.segments = {
            {0.18, Distribution::normal(2.85, 0.15, 2.50, 3.20)},   // cab
            {0.10, Distribution::normal(1.30, 0.05, 1.20, 1.40)},   // coupling gap
            {0.72, Distribution::normal(3.62, 0.15, 3.30, 3.95)},   // trailer
        };
        return f;
    }

    void validate() const {
        if (truck_fraction < 0 || truck_fraction > 1)
            throw UsageError("truck_fraction must be in [0,1]");
        if (reverse_fraction < 0 || reverse_fraction > 1)
            throw UsageError("reverse_fraction must be in [0,1]");
        car.validate();
        truck.validate();
    }
};

namespace detail {

// Guard distance for the stop-before-exit check; generous upper bound on the
// longitudinal distance a vehicle must cover during one pass.
inline constexpr double kPassGuardDistance = 40.0;

inline VehicleProfile sample_vehicle(const FleetSpec& spec, int vehicle_id, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(vehicle_id)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    VehicleProfile v;
    v.vehicle_id = vehicle_id;
    v.class_label = unit(rng) < spec.truck_fraction ? VehicleClass::truck : VehicleClass::car;
    const VehicleClassSpec& cls = v.class_label == VehicleClass::truck ? spec.truck : spec.car;

    v.length_m = cls.length.sample(rng);
    v.entry_velocity_mps = cls.velocity.sample(rng);
    v.acceleration_mps2 = cls.acceleration.sample(rng);
    // Do not let deceleration strand the vehicle inside the array.
    const double min_exit_speed = 1.5;
    const double a_floor =
        (min_exit_speed * min_exit_speed - v.entry_velocity_mps * v.entry_velocity_mps) /
        (2.0 * kPassGuardDistance);
    if (v.acceleration_mps2 < a_floor) v.acceleration_mps2 = a_floor;
    v.lateral_offset_m = cls.lateral_offset.sample(rng);
    v.width_m = cls.width.sample(rng);
    v.silhouette.clear();
    for (const auto& seg : cls.segments)
        v.silhouette.push_back({seg.fraction * v.length_m, seg.height.sample(rng)});
    v.direction = unit(rng) < spec.reverse_fraction ? Direction::reverse : Direction::forward;
    v.entry_time_s = 0.0;
    v.validate();
    return v;
}

}  // namespace detail

/// Draw n ground-truth vehicles. Deterministic given (spec, n).
inline std::vector<VehicleProfile> sample_fleet(const FleetSpec& spec, int n) {
    if (n < 1) throw UsageError("fleet size must be >= 1");
    spec.validate();
    std::vector<VehicleProfile> fleet;
    fleet.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        fleet.push_back(detail::sample_vehicle(spec, i + 1, spec.rng_seed));
    return fleet;
}

}  // namespace rfvc
