#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"
#include "rfvc/model.hpp"

namespace rfvc {

struct ConfusionMatrix {
    size_t car_as_car = 0;
    size_t car_as_truck = 0;
    size_t truck_as_car = 0;
    size_t truck_as_truck = 0;

    void add(VehicleClass truth, VehicleClass predicted) {
        if (truth == VehicleClass::car)
            (predicted == VehicleClass::car ? car_as_car : car_as_truck) += 1;
        else
            (predicted == VehicleClass::truck ? truck_as_truck : truck_as_car) += 1;
    }
    void merge(const ConfusionMatrix& o) {
        car_as_car += o.car_as_car;
        car_as_truck += o.car_as_truck;
        truck_as_car += o.truck_as_car;
        truck_as_truck += o.truck_as_truck;
    }
    size_t total() const { return car_as_car + car_as_truck + truck_as_car + truck_as_truck; }
    size_t correct() const { return car_as_car + truck_as_truck; }
};

/// Cross-validation outcome for one (family, representation) cell.
struct EvalReport {
    ModelFamily family = ModelFamily::knn;
    Representation representation = Representation::feature_vector;
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<ConfusionMatrix> fold_confusions;
    ConfusionMatrix total;
    double mean_inference_s = 0.0;
    double median_inference_s = 0.0;

    double csr() const {
        return total.total() == 0 ? 0.0
                                  : static_cast<double>(total.correct()) /
                                        static_cast<double>(total.total());
    }
    double precision_car() const {
        const size_t p = total.car_as_car + total.truck_as_car;
        return p == 0 ? 0.0 : static_cast<double>(total.car_as_car) / static_cast<double>(p);
    }
    double recall_car() const {
        const size_t t = total.car_as_car + total.car_as_truck;
        return t == 0 ? 0.0 : static_cast<double>(total.car_as_car) / static_cast<double>(t);
    }
    double precision_truck() const {
        const size_t p = total.truck_as_truck + total.car_as_truck;
        return p == 0 ? 0.0 : static_cast<double>(total.truck_as_truck) / static_cast<double>(p);
    }
    double recall_truck() const {
        const size_t t = total.truck_as_truck + total.truck_as_car;
        return t == 0 ? 0.0 : static_cast<double>(total.truck_as_truck) / static_cast<double>(t);
    }
};

/// Deterministic stratified fold assignment: per-class index lists are
/// shuffled with seeded generators and dealt round-robin.
inline std::vector<int> stratified_folds(const std::vector<VehicleClass>& labels, int folds,
                                         std::uint64_t seed) {
    if (folds < 2) throw UsageError("need at least two folds");
    if (labels.size() < static_cast<size_t>(folds))
        throw DataError("dataset smaller than the fold count");
    std::vector<size_t> cars, trucks;
    for (size_t i = 0; i < labels.size(); ++i)
        (labels[i] == VehicleClass::car ? cars : trucks).push_back(i);
    std::mt19937_64 rng_car(mix_seed(seed, 17));
    std::mt19937_64 rng_truck(mix_seed(seed, 23));
    std::shuffle(cars.begin(), cars.end(), rng_car);
    std::shuffle(trucks.begin(), trucks.end(), rng_truck);
    std::vector<int> fold(labels.size(), 0);
    for (size_t i = 0; i < cars.size(); ++i) fold[cars[i]] = static_cast<int>(i % folds);
    for (size_t i = 0; i < trucks.size(); ++i) fold[trucks[i]] = static_cast<int>(i % folds);
    // Every training fold must still contain both classes.
    for (int f = 0; f < folds; ++f) {
        size_t train_cars = 0, train_trucks = 0;
        for (size_t i = 0; i < labels.size(); ++i) {
            if (fold[i] == f) continue;
            (labels[i] == VehicleClass::car ? train_cars : train_trucks) += 1;
        }
        if (train_cars < 2 || train_trucks < 2)
            throw DataError("stratified fold " + std::to_string(f) +
                            " leaves a training set without both classes");
    }
    return fold;
}

/// Stratified k-fold cross-validation. Standardization and training happen
/// per fold on training data only; the seed fixes the fold assignment and
/// every stochastic part of training.
inline EvalReport cross_validate(const ModelSpec& spec, const Dataset& data, int folds = 5,
                                 std::uint64_t seed = 1) {
    data.validate();
    EvalReport report;
    report.family = spec.family;
    report.representation = data.representation;
    report.folds = folds;
    report.seed = seed;

    const std::vector<int> fold = stratified_folds(data.labels, folds, seed);
    std::vector<double> times;
    for (int f = 0; f < folds; ++f) {
        std::vector<size_t> train_idx, test_idx;
        for (size_t i = 0; i < data.size(); ++i)
            (fold[i] == f ? test_idx : train_idx).push_back(i);
        ModelSpec fold_spec = spec;
        fold_spec.seed = mix_seed(seed, static_cast<std::uint64_t>(f) + 101);
        const TrainedModel model = train(fold_spec, data, train_idx);
        ConfusionMatrix cm;
        for (size_t i : test_idx) {
            const auto t0 = std::chrono::steady_clock::now();
            const VehicleClass pred = model.predict(data.inputs[i]);
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
            cm.add(data.labels[i], pred);
        }
        report.fold_confusions.push_back(cm);
        report.total.merge(cm);
    }
    if (!times.empty()) {
        report.mean_inference_s = mean_of(times);
        report.median_inference_s = median_of(times);
    }
    return report;
}

struct LinkCsr {
    int link_id = 0;
    double csr = 0.0;
};

/// Fig. 7-style evaluation: one cross-validated CSR per radio link.
inline std::vector<LinkCsr> per_link_eval(const ModelSpec& spec,
                                          const std::vector<std::pair<int, Dataset>>& per_link,
                                          int folds = 5, std::uint64_t seed = 1) {
    if (per_link.empty()) throw DataError("per-link evaluation needs at least one dataset");
    std::vector<LinkCsr> out;
    out.reserve(per_link.size());
    for (const auto& [link_id, data] : per_link) {
        if (data.size() == 0)
            throw DataError("per-link dataset for link " + std::to_string(link_id) + " is empty");
        const EvalReport rep = cross_validate(spec, data, folds, seed);
        out.push_back({link_id, rep.csr()});
    }
    return out;
}

}  // namespace rfvc
