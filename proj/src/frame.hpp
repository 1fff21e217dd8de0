#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace roadfirst {

// Every column carries exactly one role. Numeric roles store doubles
// (NaN = missing); text roles store strings ("" = missing).
enum class ColumnRole {
    Continuous,
    Categorical,
    Binary,
    Identifier,
    RouteId,
    Milepost,
    Coordinate,
    Target,
};

// Road-feature models train on StaticRoad columns only.
enum class FeatureClass { StaticRoad, Dynamic };

std::string_view to_string(ColumnRole role);
std::string_view to_string(FeatureClass fc);
ColumnRole role_from_string(std::string_view s);
FeatureClass feature_class_from_string(std::string_view s);

inline bool is_text_role(ColumnRole role) {
    return role == ColumnRole::Categorical || role == ColumnRole::Identifier ||
           role == ColumnRole::RouteId;
}

// Feature columns are what models and collinearity analysis operate on.
inline bool is_feature_role(ColumnRole role) {
    return role == ColumnRole::Continuous || role == ColumnRole::Binary;
}

struct ColumnSpec {
    std::string name;
    ColumnRole role = ColumnRole::Continuous;
    FeatureClass feature_class = FeatureClass::Dynamic;
    std::vector<std::string> levels;  // categorical only; sorted when collected from data
    std::string dummy_group;          // origin column for dummy-encoded binaries, "" otherwise
    double priority = 0.0;            // keep-preference during multicollinearity reduction

    bool operator==(const ColumnSpec&) const = default;
};

// Ordered column descriptions. Loaded from / saved to a JSON config file;
// the grammar is documented in the README.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<ColumnSpec> columns);

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const ColumnSpec& at(std::size_t i) const { return columns_[i]; }
    ColumnSpec& at(std::size_t i) { return columns_[i]; }

    // Index of a named column; throws SchemaError when absent.
    std::size_t index_of(std::string_view name) const;
    const ColumnSpec* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    void add(ColumnSpec spec);

    // Unique names; categorical level lists duplicate-free.
    void validate() const;

    nlohmann::json to_json() const;
    static Schema from_json(const nlohmann::json& j);
    static Schema load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<ColumnSpec> columns_;
};

// Column-major typed table; the universal currency of the pipeline.
// Immutable once constructed as far as concurrent readers are concerned:
// nothing in the library mutates a Frame it did not just build.
class Frame {
public:
    using NumColumn = std::vector<double>;
    using TextColumn = std::vector<std::string>;
    using ColumnData = std::variant<NumColumn, TextColumn>;

    Frame() = default;
    explicit Frame(Schema schema);

    const Schema& schema() const { return schema_; }
    Schema& mutable_schema() { return schema_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }

    std::size_t col_index(std::string_view name) const { return schema_.index_of(name); }
    bool is_text(std::size_t c) const { return std::holds_alternative<TextColumn>(columns_[c]); }

    NumColumn& num(std::size_t c) { return std::get<NumColumn>(columns_[c]); }
    const NumColumn& num(std::size_t c) const { return std::get<NumColumn>(columns_[c]); }
    const NumColumn& num(std::string_view name) const { return num(col_index(name)); }
    TextColumn& text(std::size_t c) { return std::get<TextColumn>(columns_[c]); }
    const TextColumn& text(std::size_t c) const { return std::get<TextColumn>(columns_[c]); }
    const TextColumn& text(std::string_view name) const { return text(col_index(name)); }

    static bool missing(double v) { return std::isnan(v); }
    static bool missing(const std::string& v) { return v.empty(); }
    bool cell_missing(std::size_t row, std::size_t col) const;

    // Rows must be appended column-complete via these helpers.
    void set_row_count(std::size_t n);
    void resize_columns();

    void add_column(ColumnSpec spec, NumColumn values);
    void add_column(ColumnSpec spec, TextColumn values);
    void drop_column(std::size_t c);

    Frame select_rows(const std::vector<std::size_t>& indices) const;
    Frame select_columns(const std::vector<std::size_t>& indices) const;
    Frame select_columns(const std::vector<std::string>& names) const;

    // Indices of model-feature columns (continuous + binary).
    std::vector<std::size_t> feature_columns() const;

    // Enforces the frame invariants: equal column lengths, binary cells in
    // {0,1}, finite non-negative mileposts, declared categorical levels.
    // `allow_missing` permits NaN/"" cells (pre-cleaning state).
    void validate(bool allow_missing = false) const;

    // Stable content fingerprint (schema + values), used for model metadata
    // and the run manifest.
    std::uint64_t fingerprint() const;

    bool operator==(const Frame&) const = default;

private:
    Schema schema_;
    std::vector<ColumnData> columns_;
    std::size_t rows_ = 0;
};

// FNV-1a 64-bit, the fingerprint primitive used across the pipeline.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace roadfirst
