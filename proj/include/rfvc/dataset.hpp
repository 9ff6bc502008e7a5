#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rfvc/common.hpp"

namespace rfvc {

enum class Representation { feature_vector, raw_data };

inline const char* to_string(Representation r) {
    return r == Representation::feature_vector ? "feature_vector" : "raw_data";
}

/// Labeled classification samples with a uniform input dimensionality.
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<VehicleClass> labels;
    Representation representation = Representation::feature_vector;

    size_t size() const { return inputs.size(); }
    size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }

    void add(std::vector<double> x, VehicleClass y) {
        if (!inputs.empty() && x.size() != dim())
            throw DataError("dataset input dimensionality mismatch");
        inputs.push_back(std::move(x));
        labels.push_back(y);
    }

    size_t count(VehicleClass c) const {
        size_t n = 0;
        for (auto l : labels)
            if (l == c) ++n;
        return n;
    }

    void validate() const {
        if (inputs.size() != labels.size()) throw InternalError("dataset size mismatch");
        for (const auto& x : inputs) {
            if (x.size() != dim()) throw DataError("dataset input dimensionality mismatch");
            for (double v : x)
                if (!std::isfinite(v)) throw DataError("non-finite dataset value");
        }
    }
};

/// Per-dimension standardization fitted on training data only. Constant
/// dimensions keep scale 1 so they pass through unchanged.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    void fit(const Dataset& data, const std::vector<size_t>& indices) {
        const size_t d = data.dim();
        mean.assign(d, 0.0);
        scale.assign(d, 1.0);
        if (indices.empty()) throw InternalError("standardizer fitted on empty index set");
        for (size_t i : indices)
            for (size_t j = 0; j < d; ++j) mean[j] += data.inputs[i][j];
        for (double& m : mean) m /= static_cast<double>(indices.size());
        std::vector<double> var(d, 0.0);
        for (size_t i : indices)
            for (size_t j = 0; j < d; ++j) {
                const double dv = data.inputs[i][j] - mean[j];
                var[j] += dv * dv;
            }
        for (size_t j = 0; j < d; ++j) {
            const double sd = std::sqrt(var[j] / static_cast<double>(indices.size()));
            scale[j] = sd > 0.0 ? sd : 1.0;
        }
    }

    std::vector<double> transform(const std::vector<double>& x) const {
        if (x.size() != mean.size()) throw DataError("input dimension does not match model");
        std::vector<double> z(x.size());
        for (size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean[j]) / scale[j];
        return z;
    }
};

}  // namespace rfvc
