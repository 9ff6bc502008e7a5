#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"

namespace rfvc {

/// CART-style binary tree of axis-aligned splits trained with Gini impurity.
/// Equal-impurity candidates resolve to the lowest feature index, then the
/// lowest threshold, so growth is fully deterministic.
struct DecisionTree {
    struct Node {
        bool leaf = true;
        VehicleClass label = VehicleClass::car;
        int feature = -1;
        double threshold = 0.0;
        int left = -1;   ///< index into nodes, x[feature] <  threshold
        int right = -1;  ///< index into nodes, x[feature] >= threshold
    };

    int max_depth = 8;
    int min_leaf = 5;
    std::vector<Node> nodes;

    VehicleClass predict(const std::vector<double>& x) const {
        if (nodes.empty()) throw InternalError("decision tree is empty");
        int cur = 0;
        while (!nodes[static_cast<size_t>(cur)].leaf) {
            const Node& nd = nodes[static_cast<size_t>(cur)];
            cur = x[static_cast<size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<size_t>(cur)].label;
    }

    void train(const std::vector<std::vector<double>>& xs, const std::vector<VehicleClass>& ys) {
        nodes.clear();
        std::vector<size_t> all(xs.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = i;
        grow(xs, ys, all, 0);
    }

private:
    static double gini(size_t trucks, size_t total) {
        if (total == 0) return 0.0;
        const double p = static_cast<double>(trucks) / static_cast<double>(total);
        return 2.0 * p * (1.0 - p);
    }

    static VehicleClass majority(const std::vector<VehicleClass>& ys,
                                 const std::vector<size_t>& idx) {
        size_t trucks = 0;
        for (size_t i : idx)
            if (ys[i] == VehicleClass::truck) ++trucks;
        return trucks * 2 > idx.size() ? VehicleClass::truck : VehicleClass::car;
    }

    int grow(const std::vector<std::vector<double>>& xs, const std::vector<VehicleClass>& ys,
             const std::vector<size_t>& idx, int depth) {
        const int me = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<size_t>(me)].label = majority(ys, idx);

        size_t trucks = 0;
        for (size_t i : idx)
            if (ys[i] == VehicleClass::truck) ++trucks;
        const bool pure = trucks == 0 || trucks == idx.size();
        if (pure || depth >= max_depth || idx.size() < 2 * static_cast<size_t>(min_leaf))
            return me;

        const double parent_impurity = gini(trucks, idx.size());
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = parent_impurity;

        const size_t dim = xs[idx[0]].size();
        std::vector<std::pair<double, VehicleClass>> col(idx.size());
        for (size_t f = 0; f < dim; ++f) {
            for (size_t i = 0; i < idx.size(); ++i)
                col[i] = {xs[idx[i]][f], ys[idx[i]]};
            std::sort(col.begin(), col.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            size_t left_trucks = 0;
            for (size_t i = 0; i + 1 < col.size(); ++i) {
                if (col[i].second == VehicleClass::truck) ++left_trucks;
                if (col[i].first == col[i + 1].first) continue;  // no boundary here
                const size_t nl = i + 1, nr = col.size() - nl;
                if (nl < static_cast<size_t>(min_leaf) || nr < static_cast<size_t>(min_leaf))
                    continue;
                const double w =
                    (static_cast<double>(nl) * gini(left_trucks, nl) +
                     static_cast<double>(nr) * gini(trucks - left_trucks, nr)) /
                    static_cast<double>(col.size());
                const double threshold = 0.5 * (col[i].first + col[i + 1].first);
                if (w < best_impurity - 1e-12) {
                    best_impurity = w;
                    best_feature = static_cast<int>(f);
                    best_threshold = threshold;
                }
            }
        }
        if (best_feature < 0) return me;  // no admissible improving split

        std::vector<size_t> left, right;
        for (size_t i : idx) {
            if (xs[i][static_cast<size_t>(best_feature)] < best_threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }
        const int l = grow(xs, ys, left, depth + 1);
        const int r = grow(xs, ys, right, depth + 1);
        Node& nd = nodes[static_cast<size_t>(me)];
        nd.leaf = false;
        nd.feature = best_feature;
        nd.threshold = best_threshold;
        nd.left = l;
        nd.right = r;
        return me;
    }
};

}  // namespace rfvc
