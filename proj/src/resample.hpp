#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frame.hpp"
#include "runlog.hpp"

namespace roadfirst {

struct BalanceConfig {
    // Majority rows kept = ceil(ratio * majority count). Unset picks the
    // ratio that leaves the majority at twice the minority, so undersampling
    // and synthesis split the rebalancing work.
    std::optional<double> undersample_ratio;
    double target_ratio = 1.0;  // minority:majority ratio after oversampling
    int k_neighbors = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Rows with synthetic provenance are flagged in this column ("0"/"1" text,
// identifier role so it can never become a model feature).
inline constexpr const char* kSyntheticColumn = "is_synthetic";
std::size_t synthetic_row_count(const Frame& frame);

// One categorical feature as SMOTE-NC sees it: either a dummy group
// (re-collapsed to a single feature) or a standalone binary column.
struct CategoricalFeature {
    std::string name;
    std::vector<std::size_t> member_cols;   // dummy columns; empty for standalone binary
    std::size_t binary_col = static_cast<std::size_t>(-1);
    std::vector<std::string> level_names;
};

struct MixedDistanceContext {
    std::vector<std::size_t> continuous_cols;
    std::vector<CategoricalFeature> categoricals;
    // Median of the minority class's continuous-feature standard deviations;
    // recomputed per dataset. Falls back to 1 when there are no continuous
    // features so categorical mismatches still separate rows.
    double med = 0.0;

    static MixedDistanceContext build(const Frame& frame, std::string_view target);
};

// A row projected into the mixed space: continuous values plus one level
// code per categorical feature.
struct MixedRow {
    std::vector<double> cont;
    std::vector<int> cat;
};

MixedRow mixed_row(const Frame& frame, const MixedDistanceContext& ctx, std::size_t row);

// Euclidean over continuous features; Med^2 enters the sum once per
// categorical feature on which the rows differ.
double mixed_distance(const MixedRow& a, const MixedRow& b, const MixedDistanceContext& ctx);

// Random undersampling of the majority class, without replacement,
// deterministic under the seed. Minority rows all survive.
Frame rumc(const Frame& frame, std::string_view target, const BalanceConfig& config,
           RunLog* log = nullptr);

// SMOTE-NC: synthetic minority rows appended until minority count reaches
// ceil(target_ratio * majority count). Continuous features interpolate
// between seed and a sampled neighbor; categorical features take the
// neighbor-majority level (ties resolved by the seed's own level).
Frame smote_nc(const Frame& frame, std::string_view target, const BalanceConfig& config,
               RunLog* log = nullptr, unsigned threads = 0);

// rumc followed by smote_nc.
Frame rebalance(const Frame& frame, std::string_view target, const BalanceConfig& config,
                RunLog* log = nullptr, unsigned threads = 0);

// Stratified split: within each class, ceil(train_fraction * n_class) rows
// go to train. Deterministic under the seed.
std::pair<Frame, Frame> train_test_split(const Frame& frame, double train_fraction,
                                         std::string_view target, std::uint64_t seed);

}  // namespace roadfirst
