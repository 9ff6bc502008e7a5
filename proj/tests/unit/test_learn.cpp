#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "rfvc/evaluate.hpp"
#include "rfvc/model.hpp"

using namespace rfvc;

namespace {

// Two well-separated Gaussian blobs in `dim` dimensions.
Dataset blob_dataset(size_t n_per_class, size_t dim, double gap, std::uint64_t seed) {
    Dataset d;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (size_t i = 0; i < 2 * n_per_class; ++i) {
        const bool truck = i % 2 == 1;
        std::vector<double> x(dim);
        for (auto& v : x) v = noise(rng) + (truck ? gap : 0.0);
        d.add(std::move(x), truck ? VehicleClass::truck : VehicleClass::car);
    }
    return d;
}

}  // namespace

TEST_CASE("knn: storage training and nearest-neighbor voting") {
    Dataset d;
    d.add({0.0}, VehicleClass::car);
    d.add({10.0}, VehicleClass::truck);
    d.add({0.5}, VehicleClass::car);
    d.add({9.5}, VehicleClass::truck);

    ModelSpec spec;
    spec.family = ModelFamily::knn;
    spec.knn_k = 1;
    const TrainedModel m = train(spec, d);

    SECTION("query near the car cluster") {
        CHECK(m.predict({1.0}) == VehicleClass::car);
        CHECK(m.predict({9.0}) == VehicleClass::truck);
    }
    SECTION("stored set equals the standardized input set") {
        const auto& knn = std::get<KnnModel>(m.impl);
        REQUIRE(knn.points.size() == d.size());
        for (size_t i = 0; i < d.size(); ++i) {
            const auto z = m.standardizer.transform(d.inputs[i]);
            CHECK(knn.points[i][0] == z[0]);
        }
    }
    SECTION("k=1 reproduces its training set exactly") {
        for (size_t i = 0; i < d.size(); ++i) CHECK(m.predict(d.inputs[i]) == d.labels[i]);
    }
}

TEST_CASE("knn: even-vote tie resolved by the single nearest neighbor") {
    Dataset d;
    d.add({0.0}, VehicleClass::car);
    d.add({1.0}, VehicleClass::car);
    d.add({10.0}, VehicleClass::truck);
    d.add({11.0}, VehicleClass::truck);
    ModelSpec spec;
    spec.family = ModelFamily::knn;
    spec.knn_k = 2;  // query between the clusters picks one of each
    const TrainedModel m = train(spec, d);
    CHECK(m.predict({4.0}) == VehicleClass::car);    // nearest is a car
    CHECK(m.predict({7.0}) == VehicleClass::truck);  // nearest is a truck
}

TEST_CASE("decision tree: 1-D separable data yields a single root split") {
    Dataset d;
    for (double x = -10.0; x < 0.0; x += 1.0) d.add({x}, VehicleClass::car);
    for (double x = 1.0; x <= 10.0; x += 1.0) d.add({x}, VehicleClass::truck);
    ModelSpec spec;
    spec.family = ModelFamily::decision_tree;
    const TrainedModel m = train(spec, d);
    const auto& dt = std::get<DecisionTree>(m.impl);
    REQUIRE(dt.nodes.size() == 3);
    CHECK_FALSE(dt.nodes[0].leaf);
    // Threshold lies between the largest car x and the smallest truck x
    // (standardized space preserves the order).
    const double lo = m.standardizer.transform({-1.0})[0];
    const double hi = m.standardizer.transform({1.0})[0];
    CHECK(dt.nodes[0].threshold > lo);
    CHECK(dt.nodes[0].threshold < hi);
    CHECK(m.predict({-3.0}) == VehicleClass::car);
    CHECK(m.predict({3.0}) == VehicleClass::truck);
}

TEST_CASE("decision tree: predictions invariant under monotone feature maps") {
    Dataset d = blob_dataset(40, 3, 4.0, 77);
    ModelSpec spec;
    spec.family = ModelFamily::decision_tree;
    const TrainedModel m = train(spec, d);

    Dataset mapped;
    mapped.representation = d.representation;
    auto monotone = [](double v) { return std::exp(0.3 * v) + 2.0 * v; };
    for (size_t i = 0; i < d.size(); ++i) {
        std::vector<double> x;
        for (double v : d.inputs[i]) x.push_back(monotone(v));
        mapped.add(std::move(x), d.labels[i]);
    }
    const TrainedModel m2 = train(spec, mapped);
    for (size_t i = 0; i < d.size(); ++i) {
        std::vector<double> x;
        for (double v : d.inputs[i]) x.push_back(monotone(v));
        CHECK(m2.predict(x) == m.predict(d.inputs[i]));
    }
}

TEST_CASE("svm: sign rule on a hand-set model") {
    LinearSvm svm;
    svm.weights = {1.0};
    svm.bias = 0.0;
    CHECK(svm.predict({-5.0}) == VehicleClass::car);
    CHECK(svm.predict({5.0}) == VehicleClass::truck);
}

TEST_CASE("svm: linearly separable 2-D set trains to 100% accuracy") {
    Dataset d = blob_dataset(50, 2, 6.0, 13);
    ModelSpec spec;
    spec.family = ModelFamily::svm;
    spec.seed = 5;
    const TrainedModel m = train(spec, d);
    size_t correct = 0;
    for (size_t i = 0; i < d.size(); ++i)
        if (m.predict(d.inputs[i]) == d.labels[i]) ++correct;
    CHECK(correct == d.size());
}

TEST_CASE("ann: hand-set weights implement a threshold rule") {
    Mlp net;
    net.hidden = 2;
    net.input_dim = 1;
    net.w1 = {1.0, -1.0};   // h0 = relu(x), h1 = relu(-x)
    net.b1 = {0.0, 0.0};
    net.w2 = {0.0, 1.0,     // car logit = h1
              1.0, 0.0};    // truck logit = h0
    net.b2 = {0.0, 0.0};
    CHECK(net.predict({2.0}) == VehicleClass::truck);
    CHECK(net.predict({-3.0}) == VehicleClass::car);
}

TEST_CASE("ann: zero weights give symmetric probabilities and known gradients") {
    Mlp net;
    net.hidden = 4;
    net.input_dim = 2;
    net.w1.assign(8, 0.0);
    net.b1.assign(4, 0.0);
    net.w2.assign(8, 0.0);
    net.b2.assign(2, 0.0);
    const std::vector<std::vector<double>> xs = {{1.0, 2.0}, {-1.0, 0.5}};
    const std::vector<VehicleClass> ys = {VehicleClass::car, VehicleClass::truck};
    const auto act = net.forward(xs[0]);
    CHECK(act.probs[0] == Catch::Approx(0.5));
    // With softmax at 0.5/0.5 and one sample per class, the b2 gradient is
    // mean(p - y) = 0 in each coordinate.
    const auto g = net.gradients(xs, ys);
    CHECK(g.b2[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(g.b2[1] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("ann: backprop matches central finite differences") {
    Dataset d = blob_dataset(8, 5, 3.0, 3);
    Mlp net;
    net.hidden = 6;
    net.init(5, 42);
    const double err = gradient_check(net, d.inputs, d.labels, 1e-5);
    CHECK(err < 1e-4);

    SECTION("truncation error grows with large epsilon") {
        const double coarse = gradient_check(net, d.inputs, d.labels, 1e-1);
        CHECK(coarse > err);
    }
}

TEST_CASE("training requires two samples of each class") {
    Dataset d;
    d.add({0.0}, VehicleClass::car);
    d.add({1.0}, VehicleClass::car);
    d.add({2.0}, VehicleClass::car);
    ModelSpec spec;
    spec.family = ModelFamily::knn;
    CHECK_THROWS_AS(train(spec, d), DataError);
    d.add({10.0}, VehicleClass::truck);
    CHECK_THROWS_AS(train(spec, d), DataError);  // only one truck
}

TEST_CASE("prediction rejects non-finite inputs and wrong dimensions") {
    Dataset d = blob_dataset(10, 2, 5.0, 9);
    ModelSpec spec;
    spec.family = ModelFamily::svm;
    const TrainedModel m = train(spec, d);
    CHECK_THROWS_AS(m.predict({std::nan(""), 0.0}), DataError);
    CHECK_THROWS_AS(m.predict({1.0}), DataError);
}

TEST_CASE("cross-validation: separable data scores 1.0 for every family") {
    Dataset d = blob_dataset(60, 3, 8.0, 31);
    for (ModelFamily family : {ModelFamily::decision_tree, ModelFamily::knn, ModelFamily::svm,
                               ModelFamily::ann}) {
        ModelSpec spec;
        spec.family = family;
        const EvalReport rep = cross_validate(spec, d, 5, 7);
        CHECK(rep.csr() == 1.0);
        CHECK(rep.total.total() == d.size());
    }
}

TEST_CASE("cross-validation: random labels score about one half") {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> val(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    Dataset d;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x = {val(rng), val(rng), val(rng)};
        d.add(std::move(x), coin(rng) ? VehicleClass::truck : VehicleClass::car);
    }
    ModelSpec spec;
    spec.family = ModelFamily::knn;
    const EvalReport rep = cross_validate(spec, d, 5, 11);
    // Binomial 3-sigma band around 0.5 for n=1000 is about +-0.05.
    CHECK(rep.csr() > 0.45);
    CHECK(rep.csr() < 0.55);
}

TEST_CASE("cross-validation is deterministic given the seed") {
    Dataset d = blob_dataset(50, 4, 2.0, 55);
    ModelSpec spec;
    spec.family = ModelFamily::ann;
    const EvalReport a = cross_validate(spec, d, 5, 21);
    const EvalReport b = cross_validate(spec, d, 5, 21);
    REQUIRE(a.fold_confusions.size() == b.fold_confusions.size());
    CHECK(a.csr() == b.csr());
    for (size_t i = 0; i < a.fold_confusions.size(); ++i) {
        CHECK(a.fold_confusions[i].car_as_car == b.fold_confusions[i].car_as_car);
        CHECK(a.fold_confusions[i].truck_as_truck == b.fold_confusions[i].truck_as_truck);
    }
}

TEST_CASE("no leakage: test-fold labels cannot influence the trained model") {
    Dataset d = blob_dataset(40, 3, 3.0, 88);
    const auto folds = stratified_folds(d.labels, 5, 3);
    std::vector<size_t> train_idx;
    for (size_t i = 0; i < d.size(); ++i)
        if (folds[i] != 0) train_idx.push_back(i);

    ModelSpec spec;
    spec.family = ModelFamily::svm;
    spec.seed = 17;
    const TrainedModel before = train(spec, d, train_idx);

    Dataset tampered = d;
    for (size_t i = 0; i < d.size(); ++i)
        if (folds[i] == 0)
            tampered.labels[i] = tampered.labels[i] == VehicleClass::car ? VehicleClass::truck
                                                                         : VehicleClass::car;
    const TrainedModel after = train(spec, tampered, train_idx);
    CHECK(model_to_text(before) == model_to_text(after));
}

TEST_CASE("stratified folds keep both classes in every training fold") {
    Dataset d = blob_dataset(6, 1, 5.0, 1);  // 6 cars, 6 trucks
    const auto folds = stratified_folds(d.labels, 3, 9);
    for (int f = 0; f < 3; ++f) {
        size_t cars = 0, trucks = 0;
        for (size_t i = 0; i < d.size(); ++i) {
            if (folds[i] == f) continue;
            (d.labels[i] == VehicleClass::car ? cars : trucks) += 1;
        }
        CHECK(cars >= 2);
        CHECK(trucks >= 2);
    }
    CHECK_THROWS_AS(stratified_folds(d.labels, 13, 9), DataError);
}

TEST_CASE("model text round-trip preserves predictions exactly") {
    Dataset d = blob_dataset(30, 4, 3.0, 19);
    for (ModelFamily family : {ModelFamily::decision_tree, ModelFamily::knn, ModelFamily::svm,
                               ModelFamily::ann}) {
        ModelSpec spec;
        spec.family = family;
        spec.seed = 23;
        const TrainedModel m = train(spec, d);
        const std::string text = model_to_text(m);
        const TrainedModel back = model_from_text(text);
        CHECK(model_to_text(back) == text);
        for (size_t i = 0; i < d.size(); ++i)
            CHECK(back.predict(d.inputs[i]) == m.predict(d.inputs[i]));
    }
}

TEST_CASE("per-link evaluation rejects empty link datasets") {
    Dataset empty;
    ModelSpec spec;
    spec.family = ModelFamily::knn;
    std::vector<std::pair<int, Dataset>> per_link = {{1, empty}};
    CHECK_THROWS_AS(per_link_eval(spec, per_link, 5, 1), DataError);
}
