#pragma once

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfvc {

enum class VehicleClass { car, truck };
enum class Direction { forward, reverse };

inline const char* to_string(VehicleClass c) {
    return c == VehicleClass::car ? "car" : "truck";
}
inline const char* to_string(Direction d) {
    return d == Direction::forward ? "forward" : "reverse";
}

// Error categories map 1:1 onto CLI exit codes (usage=1, data=2, internal=3).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline VehicleClass parse_class(const std::string& s) {
    if (s == "car") return VehicleClass::car;
    if (s == "truck") return VehicleClass::truck;
    throw DataError("unknown vehicle class: " + s);
}
inline Direction parse_direction(const std::string& s) {
    if (s == "forward") return Direction::forward;
    if (s == "reverse") return Direction::reverse;
    throw DataError("unknown direction: " + s);
}

// splitmix64; used to derive independent per-entity seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Round to the nearest multiple of `step` (ties away from zero, like lround).
inline double quantize(double value, double step) {
    return step * std::round(value / step);
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population standard deviation (1/N).
inline double population_std(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Median; for even counts the mean of the two middle elements.
inline double median_of(std::vector<double> v) {
    if (v.empty()) throw InternalError("median of empty range");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// printf-style formatting into std::string (no std::format in GCC 11).
inline std::string strf(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

}  // namespace rfvc
