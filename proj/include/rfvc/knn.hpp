#pragma once

#include <algorithm>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"

namespace rfvc {

/// k-nearest-neighbor classifier over standardized inputs. Training is
/// storage; prediction scans the stored set. Even-vote ties go to the single
/// nearest neighbor, distance ties to the lower stored index.
struct KnnModel {
    int k = 3;
    std::vector<std::vector<double>> points;  ///< standardized training inputs
    std::vector<VehicleClass> labels;

    VehicleClass predict(const std::vector<double>& z) const {
        if (points.empty()) throw InternalError("knn model is empty");
        struct Hit {
            double d2;
            size_t idx;
        };
        std::vector<Hit> hits;
        hits.reserve(points.size());
        for (size_t i = 0; i < points.size(); ++i) {
            double d2 = 0.0;
            const auto& p = points[i];
            for (size_t j = 0; j < p.size(); ++j) {
                const double d = p[j] - z[j];
                d2 += d * d;
            }
            hits.push_back({d2, i});
        }
        const size_t kk = std::min<size_t>(static_cast<size_t>(k), hits.size());
        std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(kk), hits.end(),
                          [](const Hit& a, const Hit& b) {
                              if (a.d2 != b.d2) return a.d2 < b.d2;
                              return a.idx < b.idx;
                          });
        int trucks = 0;
        for (size_t i = 0; i < kk; ++i)
            if (labels[hits[i].idx] == VehicleClass::truck) ++trucks;
        const int cars = static_cast<int>(kk) - trucks;
        if (trucks > cars) return VehicleClass::truck;
        if (cars > trucks) return VehicleClass::car;
        return labels[hits[0].idx];  // tie: nearest single neighbor decides
    }
};

}  // namespace rfvc
