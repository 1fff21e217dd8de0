#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "frame.hpp"

namespace roadfirst {

struct TrainConfig {
    int n_trees = 100;
    int max_depth = 0;         // 0 = unlimited
    int min_samples_leaf = 5;
    int mtry = 0;              // features sampled per split; 0 = ceil(sqrt(p))
    bool hard_vote = false;    // soft vote (mean leaf probability) by default
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void validate(std::size_t feature_count) const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// Gini impurity 1 - sum(p_c^2) for binary class counts; in [0, 0.5].
double gini(std::int64_t count0, std::int64_t count1);

// Flat node storage. Internal nodes route values < threshold left and
// >= threshold right; leaves are marked by feature == -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::int64_t count0 = 0;
    std::int64_t count1 = 0;

    bool is_leaf() const { return feature < 0; }
    double probability() const {
        return static_cast<double>(count1) / static_cast<double>(count0 + count1);
    }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> row) const;
    std::size_t leaf_index(std::span<const double> row) const;
};

enum class ModelFlavor { CombinedFeature, RoadFeature };
std::string_view to_string(ModelFlavor flavor);
ModelFlavor flavor_from_string(std::string_view s);

// Bagged ensemble of CART trees with class-probability leaves. Two flavors
// exist per contributing factor: combined-feature (static + dynamic) and
// road-feature (static road features only, enforced at train and load time).
class RandomForest {
public:
    RandomForest() = default;
    RandomForest(std::vector<Tree> trees, std::vector<std::string> feature_names,
                 std::vector<FeatureClass> feature_classes, ModelFlavor flavor, TrainConfig config,
                 std::string target, std::uint64_t dataset_fingerprint);

    const std::vector<Tree>& trees() const { return trees_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<FeatureClass>& feature_classes() const { return feature_classes_; }
    ModelFlavor flavor() const { return flavor_; }
    const TrainConfig& config() const { return config_; }
    const std::string& target() const { return target_; }
    std::uint64_t dataset_fingerprint() const { return dataset_fingerprint_; }

    // Mean over trees of the class-1 leaf probability (or the hard-vote
    // fraction when configured). Row order must match feature_names().
    double predict_proba(std::span<const double> row) const;
    std::vector<double> predict_frame(const Frame& frame, unsigned threads = 0) const;

    // Extract this model's feature matrix from a frame, erroring on any
    // missing feature by name.
    std::vector<std::vector<double>> feature_matrix(const Frame& frame) const;

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static RandomForest load(const std::filesystem::path& path);

private:
    std::vector<Tree> trees_;
    std::vector<std::string> feature_names_;
    std::vector<FeatureClass> feature_classes_;
    ModelFlavor flavor_ = ModelFlavor::CombinedFeature;
    TrainConfig config_;
    std::string target_;
    std::uint64_t dataset_fingerprint_ = 0;
};

// Fit one CART tree on explicit rows (bootstrap indices refer to `rows`).
// Exposed for tests; fit_forest is the normal entry point.
Tree fit_tree(const std::vector<std::vector<double>>& features, const std::vector<double>& labels,
              const std::vector<std::size_t>& sample_indices, const TrainConfig& config,
              std::uint64_t tree_seed_stream, std::uint64_t tree_index);

// Train on the frame's feature columns. RoadFeature flavor requires every
// feature column to carry the static_road class.
RandomForest fit_forest(const Frame& train, std::string_view target, const TrainConfig& config,
                        ModelFlavor flavor = ModelFlavor::CombinedFeature);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;

    nlohmann::json to_json() const;
};

// Standard binary-classification metrics at the 0.5 decision threshold
// (predicted positive iff probability > 0.5). Degenerate ratios report 0.
Metrics evaluate(const RandomForest& model, const Frame& test, std::string_view target,
                 unsigned threads = 0);

}  // namespace roadfirst
