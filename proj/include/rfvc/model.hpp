#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rfvc/ann.hpp"
#include "rfvc/common.hpp"
#include "rfvc/dataset.hpp"
#include "rfvc/decision_tree.hpp"
#include "rfvc/knn.hpp"
#include "rfvc/svm.hpp"

namespace rfvc {

enum class ModelFamily { decision_tree, knn, svm, ann };

inline const char* to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::decision_tree: return "dt";
        case ModelFamily::knn: return "knn";
        case ModelFamily::svm: return "svm";
        case ModelFamily::ann: return "ann";
    }
    return "?";
}

inline ModelFamily parse_family(const std::string& s) {
    if (s == "dt" || s == "decision_tree") return ModelFamily::decision_tree;
    if (s == "knn") return ModelFamily::knn;
    if (s == "svm") return ModelFamily::svm;
    if (s == "ann") return ModelFamily::ann;
    throw UsageError("unknown model family: " + s);
}

/// Family choice plus hyperparameters; the seed drives every stochastic part
/// of training (SVM shuffling, ANN initialization).
struct ModelSpec {
    ModelFamily family = ModelFamily::knn;
    int knn_k = 3;
    int tree_max_depth = 8;
    int tree_min_leaf = 5;
    double svm_lambda = 1e-3;
    int svm_epochs = 200;
    int ann_hidden = 16;
    double ann_learning_rate = 0.01;
    int ann_epochs = 300;
    std::uint64_t seed = 1;

    void validate() const {
        if (knn_k < 1) throw UsageError("knn k must be >= 1");
        if (tree_max_depth < 1 || tree_min_leaf < 1) throw UsageError("invalid tree parameters");
        if (svm_lambda <= 0 || svm_epochs < 1) throw UsageError("invalid svm parameters");
        if (ann_hidden < 1 || ann_learning_rate <= 0 || ann_epochs < 1)
            throw UsageError("invalid ann parameters");
    }
};

/// Immutable trained classifier; standardization is part of the model.
struct TrainedModel {
    ModelFamily family = ModelFamily::knn;
    Representation representation = Representation::feature_vector;
    Standardizer standardizer;
    std::variant<KnnModel, DecisionTree, LinearSvm, Mlp> impl;

    VehicleClass predict(const std::vector<double>& input) const {
        for (double v : input)
            if (!std::isfinite(v)) throw DataError("non-finite prediction input");
        const std::vector<double> z = standardizer.transform(input);
        return std::visit([&](const auto& m) { return m.predict(z); }, impl);
    }

    size_t parameter_count() const {
        if (const auto* knn = std::get_if<KnnModel>(&impl))
            return knn->points.size() * (knn->points.empty() ? 0 : knn->points[0].size());
        if (const auto* dt = std::get_if<DecisionTree>(&impl)) return dt->nodes.size() * 2;
        if (const auto* svm = std::get_if<LinearSvm>(&impl)) return svm->weights.size() + 1;
        const auto& ann = std::get<Mlp>(impl);
        return ann.w1.size() + ann.b1.size() + ann.w2.size() + ann.b2.size();
    }
};

/// Train one model on the given subset of the dataset (all samples when the
/// index list is empty). The standardizer is fitted on exactly that subset.
inline TrainedModel train(const ModelSpec& spec, const Dataset& data,
                          std::vector<size_t> indices = {}) {
    spec.validate();
    data.validate();
    if (indices.empty()) {
        indices.resize(data.size());
        for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }
    size_t cars = 0, trucks = 0;
    for (size_t i : indices)
        (data.labels[i] == VehicleClass::car ? cars : trucks) += 1;
    if (cars < 2 || trucks < 2)
        throw DataError("training set needs at least two samples of each class");

    TrainedModel model;
    model.family = spec.family;
    model.representation = data.representation;
    model.standardizer.fit(data, indices);

    std::vector<std::vector<double>> xs;
    std::vector<VehicleClass> ys;
    xs.reserve(indices.size());
    ys.reserve(indices.size());
    for (size_t i : indices) {
        xs.push_back(model.standardizer.transform(data.inputs[i]));
        ys.push_back(data.labels[i]);
    }

    switch (spec.family) {
        case ModelFamily::knn: {
            KnnModel knn;
            knn.k = spec.knn_k;
            knn.points = std::move(xs);
            knn.labels = std::move(ys);
            model.impl = std::move(knn);
            break;
        }
        case ModelFamily::decision_tree: {
            DecisionTree dt;
            dt.max_depth = spec.tree_max_depth;
            dt.min_leaf = spec.tree_min_leaf;
            dt.train(xs, ys);
            model.impl = std::move(dt);
            break;
        }
        case ModelFamily::svm: {
            LinearSvm svm;
            svm.lambda = spec.svm_lambda;
            svm.epochs = spec.svm_epochs;
            svm.train(xs, ys, mix_seed(spec.seed, 0x5f3759df));
            model.impl = std::move(svm);
            break;
        }
        case ModelFamily::ann: {
            Mlp ann;
            ann.hidden = spec.ann_hidden;
            ann.learning_rate = spec.ann_learning_rate;
            ann.epochs = spec.ann_epochs;
            ann.train(xs, ys, mix_seed(spec.seed, 0xa11e9));
            model.impl = std::move(ann);
            break;
        }
    }
    return model;
}

namespace detail {

inline void put_doubles(std::ostream& os, const char* key, const std::vector<double>& v) {
    os << key << " =";
    char buf[32];
    for (double x : v) {
        std::snprintf(buf, sizeof(buf), " %.17g", x);
        os << buf;
    }
    os << "\n";
}

inline std::vector<double> get_doubles(const std::string& line, const char* key) {
    const std::string prefix = std::string(key) + " =";
    if (line.rfind(prefix, 0) != 0) throw DataError("model file: expected '" + std::string(key) + "'");
    std::istringstream is(line.substr(prefix.size()));
    std::vector<double> out;
    double x;
    while (is >> x) out.push_back(x);
    return out;
}

}  // namespace detail

/// Text serialization; decimal round-trips reproduce the doubles exactly.
inline std::string model_to_text(const TrainedModel& model) {
    std::ostringstream os;
    os << "# rfvc model v1\n";
    os << "family = " << to_string(model.family) << "\n";
    os << "representation = " << to_string(model.representation) << "\n";
    os << "dim = " << model.standardizer.mean.size() << "\n";
    detail::put_doubles(os, "standardizer.mean", model.standardizer.mean);
    detail::put_doubles(os, "standardizer.scale", model.standardizer.scale);
    if (const auto* knn = std::get_if<KnnModel>(&model.impl)) {
        os << "knn.k = " << knn->k << "\n";
        os << "knn.count = " << knn->points.size() << "\n";
        for (size_t i = 0; i < knn->points.size(); ++i) {
            std::vector<double> row = knn->points[i];
            detail::put_doubles(os, "knn.point", row);
            os << "knn.label = " << to_string(knn->labels[i]) << "\n";
        }
    } else if (const auto* dt = std::get_if<DecisionTree>(&model.impl)) {
        os << "dt.max_depth = " << dt->max_depth << "\n";
        os << "dt.min_leaf = " << dt->min_leaf << "\n";
        os << "dt.nodes = " << dt->nodes.size() << "\n";
        char buf[64];
        for (const auto& nd : dt->nodes) {
            if (nd.leaf) {
                os << "dt.node = leaf " << to_string(nd.label) << "\n";
            } else {
                std::snprintf(buf, sizeof(buf), "%.17g", nd.threshold);
                os << "dt.node = split " << nd.feature << " " << buf << " " << nd.left << " "
                   << nd.right << "\n";
            }
        }
    } else if (const auto* svm = std::get_if<LinearSvm>(&model.impl)) {
        detail::put_doubles(os, "svm.weights", svm->weights);
        detail::put_doubles(os, "svm.bias", {svm->bias});
    } else {
        const auto& ann = std::get<Mlp>(model.impl);
        os << "ann.hidden = " << ann.hidden << "\n";
        detail::put_doubles(os, "ann.w1", ann.w1);
        detail::put_doubles(os, "ann.b1", ann.b1);
        detail::put_doubles(os, "ann.w2", ann.w2);
        detail::put_doubles(os, "ann.b2", ann.b2);
    }
    return os.str();
}

inline TrainedModel model_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next_line = [&]() -> std::string {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#') return line;
        }
        throw DataError("model file: unexpected end of file");
    };
    auto value_of = [](const std::string& l, const char* key) -> std::string {
        const std::string prefix = std::string(key) + " = ";
        if (l.rfind(prefix, 0) != 0)
            throw DataError("model file: expected '" + std::string(key) + "'");
        return l.substr(prefix.size());
    };

    TrainedModel model;
    model.family = parse_family(value_of(next_line(), "family"));
    const std::string repr = value_of(next_line(), "representation");
    model.representation =
        repr == "raw_data" ? Representation::raw_data : Representation::feature_vector;
    const size_t dim = std::stoul(value_of(next_line(), "dim"));
    model.standardizer.mean = detail::get_doubles(next_line(), "standardizer.mean");
    model.standardizer.scale = detail::get_doubles(next_line(), "standardizer.scale");
    if (model.standardizer.mean.size() != dim || model.standardizer.scale.size() != dim)
        throw DataError("model file: standardizer dimension mismatch");

    switch (model.family) {
        case ModelFamily::knn: {
            KnnModel knn;
            knn.k = std::stoi(value_of(next_line(), "knn.k"));
            const size_t count = std::stoul(value_of(next_line(), "knn.count"));
            for (size_t i = 0; i < count; ++i) {
                knn.points.push_back(detail::get_doubles(next_line(), "knn.point"));
                if (knn.points.back().size() != dim)
                    throw DataError("model file: knn point dimension mismatch");
                knn.labels.push_back(parse_class(value_of(next_line(), "knn.label")));
            }
            model.impl = std::move(knn);
            break;
        }
        case ModelFamily::decision_tree: {
            DecisionTree dt;
            dt.max_depth = std::stoi(value_of(next_line(), "dt.max_depth"));
            dt.min_leaf = std::stoi(value_of(next_line(), "dt.min_leaf"));
            const size_t count = std::stoul(value_of(next_line(), "dt.nodes"));
            for (size_t i = 0; i < count; ++i) {
                std::istringstream ns(value_of(next_line(), "dt.node"));
                std::string kind;
                ns >> kind;
                DecisionTree::Node nd;
                if (kind == "leaf") {
                    std::string label;
                    ns >> label;
                    nd.leaf = true;
                    nd.label = parse_class(label);
                } else if (kind == "split") {
                    nd.leaf = false;
                    ns >> nd.feature >> nd.threshold >> nd.left >> nd.right;
                } else {
                    throw DataError("model file: bad dt node kind");
                }
                dt.nodes.push_back(nd);
            }
            model.impl = std::move(dt);
            break;
        }
        case ModelFamily::svm: {
            LinearSvm svm;
            svm.weights = detail::get_doubles(next_line(), "svm.weights");
            svm.bias = detail::get_doubles(next_line(), "svm.bias").at(0);
            if (svm.weights.size() != dim) throw DataError("model file: svm dimension mismatch");
            model.impl = std::move(svm);
            break;
        }
        case ModelFamily::ann: {
            Mlp ann;
            ann.hidden = std::stoi(value_of(next_line(), "ann.hidden"));
            ann.input_dim = static_cast<int>(dim);
            ann.w1 = detail::get_doubles(next_line(), "ann.w1");
            ann.b1 = detail::get_doubles(next_line(), "ann.b1");
            ann.w2 = detail::get_doubles(next_line(), "ann.w2");
            ann.b2 = detail::get_doubles(next_line(), "ann.b2");
            if (ann.w1.size() != dim * static_cast<size_t>(ann.hidden) ||
                ann.b1.size() != static_cast<size_t>(ann.hidden) ||
                ann.w2.size() != 2 * static_cast<size_t>(ann.hidden) || ann.b2.size() != 2)
                throw DataError("model file: ann dimension mismatch");
            model.impl = std::move(ann);
            break;
        }
    }
    return model;
}

}  // namespace rfvc
