#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"

namespace rfvc {

/// Linear SVM trained by seeded subgradient descent on the L2-regularized
/// hinge loss (Pegasos step sizes, unregularized bias). Car is the negative
/// class, truck the positive one.
struct LinearSvm {
    double lambda = 1e-3;
    int epochs = 200;
    std::vector<double> weights;
    double bias = 0.0;

    double decision(const std::vector<double>& z) const {
        if (z.size() != weights.size()) throw DataError("input dimension does not match model");
        double s = bias;
        for (size_t j = 0; j < z.size(); ++j) s += weights[j] * z[j];
        return s;
    }

    VehicleClass predict(const std::vector<double>& z) const {
        return decision(z) >= 0.0 ? VehicleClass::truck : VehicleClass::car;
    }

    void train(const std::vector<std::vector<double>>& xs, const std::vector<VehicleClass>& ys,
               std::uint64_t seed) {
        const size_t d = xs.front().size();
        weights.assign(d, 0.0);
        bias = 0.0;
        std::mt19937_64 rng(seed);
        std::vector<size_t> order(xs.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        // 1/(lambda t) steps, offset by t0 = 1/lambda so the first updates
        // stay bounded (the bias is unregularized and never shrinks back).
        const double t0 = 1.0 / lambda;
        long step = 0;
        for (int e = 0; e < epochs; ++e) {
            std::shuffle(order.begin(), order.end(), rng);
            for (size_t i : order) {
                ++step;
                const double eta = 1.0 / (lambda * (t0 + static_cast<double>(step)));
                const double y = ys[i] == VehicleClass::truck ? 1.0 : -1.0;
                const double margin = y * decision(xs[i]);
                const double shrink = 1.0 - eta * lambda;
                for (double& w : weights) w *= shrink;
                if (margin < 1.0) {
                    for (size_t j = 0; j < d; ++j) weights[j] += eta * y * xs[i][j];
                    bias += eta * y;
                }
            }
        }
    }
};

}  // namespace rfvc
