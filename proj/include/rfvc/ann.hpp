#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"

namespace rfvc {

/// One-hidden-layer perceptron: D -> hidden rectified units -> 2-way softmax,
/// trained with full-batch gradient descent on the mean cross-entropy.
/// Class index 0 = car, 1 = truck.
struct Mlp {
    int input_dim = 0;
    int hidden = 16;
    double learning_rate = 0.01;
    int epochs = 300;

    std::vector<double> w1;  ///< hidden x input, row-major
    std::vector<double> b1;  ///< hidden
    std::vector<double> w2;  ///< 2 x hidden, row-major
    std::vector<double> b2;  ///< 2

    void init(int dim, std::uint64_t seed) {
        input_dim = dim;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g1(0.0, std::sqrt(2.0 / dim));
        std::normal_distribution<double> g2(0.0, std::sqrt(2.0 / hidden));
        w1.resize(static_cast<size_t>(hidden) * static_cast<size_t>(dim));
        b1.assign(static_cast<size_t>(hidden), 0.0);
        w2.resize(2 * static_cast<size_t>(hidden));
        b2.assign(2, 0.0);
        for (double& w : w1) w = g1(rng);
        for (double& w : w2) w = g2(rng);
    }

    struct Activations {
        std::vector<double> hidden_pre;
        std::vector<double> hidden_out;
        std::vector<double> probs;  ///< softmax over the two logits
    };

    Activations forward(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != input_dim)
            throw DataError("input dimension does not match model");
        Activations act;
        act.hidden_pre.resize(static_cast<size_t>(hidden));
        act.hidden_out.resize(static_cast<size_t>(hidden));
        for (int h = 0; h < hidden; ++h) {
            double s = b1[static_cast<size_t>(h)];
            const double* row = &w1[static_cast<size_t>(h) * static_cast<size_t>(input_dim)];
            for (int j = 0; j < input_dim; ++j) s += row[j] * x[static_cast<size_t>(j)];
            act.hidden_pre[static_cast<size_t>(h)] = s;
            act.hidden_out[static_cast<size_t>(h)] = s > 0.0 ? s : 0.0;
        }
        double logits[2];
        for (int c = 0; c < 2; ++c) {
            double s = b2[static_cast<size_t>(c)];
            const double* row = &w2[static_cast<size_t>(c) * static_cast<size_t>(hidden)];
            for (int h = 0; h < hidden; ++h) s += row[h] * act.hidden_out[static_cast<size_t>(h)];
            logits[c] = s;
        }
        const double mx = std::max(logits[0], logits[1]);
        const double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
        act.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
        return act;
    }

    VehicleClass predict(const std::vector<double>& z) const {
        const auto act = forward(z);
        return act.probs[1] > act.probs[0] ? VehicleClass::truck : VehicleClass::car;
    }

    /// Mean cross-entropy over a batch.
    double loss(const std::vector<std::vector<double>>& xs,
                const std::vector<VehicleClass>& ys) const {
        double total = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            const auto act = forward(xs[i]);
            const int y = ys[i] == VehicleClass::truck ? 1 : 0;
            total += -std::log(std::max(act.probs[static_cast<size_t>(y)], 1e-300));
        }
        return total / static_cast<double>(xs.size());
    }

    struct Gradients {
        std::vector<double> w1, b1, w2, b2;
    };

    /// Backpropagated gradients of the mean cross-entropy over the batch.
    Gradients gradients(const std::vector<std::vector<double>>& xs,
                        const std::vector<VehicleClass>& ys) const {
        Gradients g;
        g.w1.assign(w1.size(), 0.0);
        g.b1.assign(b1.size(), 0.0);
        g.w2.assign(w2.size(), 0.0);
        g.b2.assign(b2.size(), 0.0);
        const double inv_n = 1.0 / static_cast<double>(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            const auto act = forward(xs[i]);
            const int y = ys[i] == VehicleClass::truck ? 1 : 0;
            double dlogit[2] = {act.probs[0], act.probs[1]};
            dlogit[y] -= 1.0;
            for (int c = 0; c < 2; ++c) {
                const double dc = dlogit[c] * inv_n;
                g.b2[static_cast<size_t>(c)] += dc;
                for (int h = 0; h < hidden; ++h)
                    g.w2[static_cast<size_t>(c) * static_cast<size_t>(hidden) +
                         static_cast<size_t>(h)] += dc * act.hidden_out[static_cast<size_t>(h)];
            }
            for (int h = 0; h < hidden; ++h) {
                if (act.hidden_pre[static_cast<size_t>(h)] <= 0.0) continue;
                const double dh =
                    (dlogit[0] * w2[static_cast<size_t>(h)] +
                     dlogit[1] * w2[static_cast<size_t>(hidden) + static_cast<size_t>(h)]) *
                    inv_n;
                g.b1[static_cast<size_t>(h)] += dh;
                for (int j = 0; j < input_dim; ++j)
                    g.w1[static_cast<size_t>(h) * static_cast<size_t>(input_dim) +
                         static_cast<size_t>(j)] += dh * xs[i][static_cast<size_t>(j)];
            }
        }
        return g;
    }

    void train(const std::vector<std::vector<double>>& xs, const std::vector<VehicleClass>& ys,
               std::uint64_t seed) {
        init(static_cast<int>(xs.front().size()), seed);
        for (int e = 0; e < epochs; ++e) {
            const Gradients g = gradients(xs, ys);
            for (size_t i = 0; i < w1.size(); ++i) w1[i] -= learning_rate * g.w1[i];
            for (size_t i = 0; i < b1.size(); ++i) b1[i] -= learning_rate * g.b1[i];
            for (size_t i = 0; i < w2.size(); ++i) w2[i] -= learning_rate * g.w2[i];
            for (size_t i = 0; i < b2.size(); ++i) b2[i] -= learning_rate * g.b2[i];
        }
    }

    std::vector<double*> parameters() {
        std::vector<double*> p;
        p.reserve(w1.size() + b1.size() + w2.size() + b2.size());
        for (double& v : w1) p.push_back(&v);
        for (double& v : b1) p.push_back(&v);
        for (double& v : w2) p.push_back(&v);
        for (double& v : b2) p.push_back(&v);
        return p;
    }
};

/// Compare backpropagated gradients against central finite differences of the
/// loss. Returns the maximum relative error over all parameters, with the
/// denominator floored at 1e-4 so near-zero gradients are compared absolutely.
inline double gradient_check(Mlp& net, const std::vector<std::vector<double>>& xs,
                             const std::vector<VehicleClass>& ys, double epsilon) {
    const Mlp::Gradients g = net.gradients(xs, ys);
    std::vector<double> analytic;
    analytic.reserve(g.w1.size() + g.b1.size() + g.w2.size() + g.b2.size());
    for (double v : g.w1) analytic.push_back(v);
    for (double v : g.b1) analytic.push_back(v);
    for (double v : g.w2) analytic.push_back(v);
    for (double v : g.b2) analytic.push_back(v);

    const std::vector<double*> params = net.parameters();
    double worst = 0.0;
    for (size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + epsilon;
        const double up = net.loss(xs, ys);
        *params[i] = saved - epsilon;
        const double down = net.loss(xs, ys);
        *params[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-4});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace rfvc
