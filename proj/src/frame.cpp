#include "frame.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace roadfirst {

std::string_view to_string(ColumnRole role) {
    switch (role) {
        case ColumnRole::Continuous: return "continuous";
        case ColumnRole::Categorical: return "categorical";
        case ColumnRole::Binary: return "binary";
        case ColumnRole::Identifier: return "identifier";
        case ColumnRole::RouteId: return "route_id";
        case ColumnRole::Milepost: return "milepost";
        case ColumnRole::Coordinate: return "coordinate";
        case ColumnRole::Target: return "target";
    }
    return "continuous";
}

std::string_view to_string(FeatureClass fc) {
    return fc == FeatureClass::StaticRoad ? "static_road" : "dynamic";
}

ColumnRole role_from_string(std::string_view s) {
    if (s == "continuous") return ColumnRole::Continuous;
    if (s == "categorical") return ColumnRole::Categorical;
    if (s == "binary") return ColumnRole::Binary;
    if (s == "identifier") return ColumnRole::Identifier;
    if (s == "route_id") return ColumnRole::RouteId;
    if (s == "milepost") return ColumnRole::Milepost;
    if (s == "coordinate") return ColumnRole::Coordinate;
    if (s == "target") return ColumnRole::Target;
    throw SchemaError("unknown column role: '" + std::string(s) + "'");
}

FeatureClass feature_class_from_string(std::string_view s) {
    if (s == "static_road") return FeatureClass::StaticRoad;
    if (s == "dynamic") return FeatureClass::Dynamic;
    throw SchemaError("unknown feature class: '" + std::string(s) + "'");
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) { validate(); }

std::size_t Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw SchemaError("no column named '" + std::string(name) + "'");
}

const ColumnSpec* Schema::find(std::string_view name) const {
    for (const auto& c : columns_) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void Schema::add(ColumnSpec spec) {
    if (contains(spec.name)) throw SchemaError("duplicate column name: '" + spec.name + "'");
    columns_.push_back(std::move(spec));
}

void Schema::validate() const {
    std::set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.name.empty()) throw SchemaError("schema contains an unnamed column");
        if (!seen.insert(c.name).second) throw SchemaError("duplicate column name: '" + c.name + "'");
        if (!c.levels.empty()) {
            std::set<std::string> lv(c.levels.begin(), c.levels.end());
            if (lv.size() != c.levels.size())
                throw SchemaError("column '" + c.name + "' has duplicate categorical levels");
        }
        if (c.role != ColumnRole::Categorical && !c.levels.empty())
            throw SchemaError("column '" + c.name + "' is not categorical but declares levels");
    }
}

nlohmann::json Schema::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
        nlohmann::json jc{{"name", c.name}, {"role", std::string(to_string(c.role))}};
        if (is_feature_role(c.role) || c.role == ColumnRole::Categorical)
            jc["class"] = std::string(to_string(c.feature_class));
        if (!c.levels.empty()) jc["levels"] = c.levels;
        if (!c.dummy_group.empty()) jc["dummy_group"] = c.dummy_group;
        if (c.priority != 0.0) jc["priority"] = c.priority;
        cols.push_back(std::move(jc));
    }
    return nlohmann::json{{"columns", std::move(cols)}};
}

Schema Schema::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array())
        throw ParseError("schema config must be an object with a 'columns' array");
    std::vector<ColumnSpec> specs;
    for (const auto& jc : j["columns"]) {
        if (!jc.contains("name") || !jc.contains("role"))
            throw ParseError("schema column entries need 'name' and 'role'");
        ColumnSpec c;
        c.name = jc["name"].get<std::string>();
        c.role = role_from_string(jc["role"].get<std::string>());
        if (jc.contains("class")) c.feature_class = feature_class_from_string(jc["class"].get<std::string>());
        if (jc.contains("levels")) c.levels = jc["levels"].get<std::vector<std::string>>();
        if (jc.contains("dummy_group")) c.dummy_group = jc["dummy_group"].get<std::string>();
        if (jc.contains("priority")) c.priority = jc["priority"].get<double>();
        specs.push_back(std::move(c));
    }
    return Schema(std::move(specs));
}

Schema Schema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in schema file " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

void Schema::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write schema file: " + path.string());
    out << to_json().dump(2) << '\n';
}

Frame::Frame(Schema schema) : schema_(std::move(schema)) {
    schema_.validate();
    columns_.reserve(schema_.size());
    for (const auto& c : schema_.columns()) {
        if (is_text_role(c.role))
            columns_.emplace_back(TextColumn{});
        else
            columns_.emplace_back(NumColumn{});
    }
}

bool Frame::cell_missing(std::size_t row, std::size_t col) const {
    return is_text(col) ? missing(text(col)[row]) : missing(num(col)[row]);
}

void Frame::set_row_count(std::size_t n) {
    rows_ = n;
    resize_columns();
}

void Frame::resize_columns() {
    for (auto& col : columns_) {
        if (auto* nc = std::get_if<NumColumn>(&col))
            nc->resize(rows_, std::numeric_limits<double>::quiet_NaN());
        else
            std::get<TextColumn>(col).resize(rows_);
    }
}

void Frame::add_column(ColumnSpec spec, NumColumn values) {
    if (values.size() != rows_) throw SchemaError("column '" + spec.name + "' has wrong length");
    if (is_text_role(spec.role)) throw SchemaError("column '" + spec.name + "' requires text storage");
    schema_.add(std::move(spec));
    columns_.emplace_back(std::move(values));
}

void Frame::add_column(ColumnSpec spec, TextColumn values) {
    if (values.size() != rows_) throw SchemaError("column '" + spec.name + "' has wrong length");
    if (!is_text_role(spec.role)) throw SchemaError("column '" + spec.name + "' requires numeric storage");
    schema_.add(std::move(spec));
    columns_.emplace_back(std::move(values));
}

void Frame::drop_column(std::size_t c) {
    if (c >= columns_.size()) throw InvalidArgument("drop_column: index out of range");
    auto specs = schema_.columns();
    specs.erase(specs.begin() + static_cast<std::ptrdiff_t>(c));
    schema_ = Schema(std::move(specs));
    columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(c));
}

Frame Frame::select_rows(const std::vector<std::size_t>& indices) const {
    Frame out(schema_);
    out.rows_ = indices.size();
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (is_text(c)) {
            TextColumn col;
            col.reserve(indices.size());
            for (auto i : indices) col.push_back(text(c)[i]);
            out.columns_[c] = std::move(col);
        } else {
            NumColumn col;
            col.reserve(indices.size());
            for (auto i : indices) col.push_back(num(c)[i]);
            out.columns_[c] = std::move(col);
        }
    }
    return out;
}

Frame Frame::select_columns(const std::vector<std::size_t>& indices) const {
    std::vector<ColumnSpec> specs;
    specs.reserve(indices.size());
    for (auto i : indices) specs.push_back(schema_.at(i));
    Frame out{Schema(std::move(specs))};
    out.rows_ = rows_;
    for (std::size_t k = 0; k < indices.size(); ++k) out.columns_[k] = columns_[indices[k]];
    return out;
}

Frame Frame::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(col_index(n));
    return select_columns(idx);
}

std::vector<std::size_t> Frame::feature_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        if (is_feature_role(schema_.at(c).role)) out.push_back(c);
    }
    return out;
}

void Frame::validate(bool allow_missing) const {
    schema_.validate();
    if (columns_.size() != schema_.size()) throw SchemaError("frame column count does not match schema");
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const auto& spec = schema_.at(c);
        const std::size_t len = is_text(c) ? text(c).size() : num(c).size();
        if (len != rows_)
            throw SchemaError("column '" + spec.name + "' has length " + std::to_string(len) +
                              ", expected " + std::to_string(rows_));
        if (spec.role == ColumnRole::Binary || spec.role == ColumnRole::Target) {
            for (std::size_t r = 0; r < rows_; ++r) {
                const double v = num(c)[r];
                if (missing(v)) {
                    if (!allow_missing)
                        throw SchemaError("column '" + spec.name + "' has a missing cell at row " +
                                          std::to_string(r));
                    continue;
                }
                if (v != 0.0 && v != 1.0)
                    throw SchemaError("binary column '" + spec.name + "' has non-binary value at row " +
                                      std::to_string(r));
            }
        } else if (spec.role == ColumnRole::Milepost) {
            for (std::size_t r = 0; r < rows_; ++r) {
                const double v = num(c)[r];
                if (missing(v)) {
                    if (!allow_missing)
                        throw SchemaError("milepost column '" + spec.name + "' has a missing cell at row " +
                                          std::to_string(r));
                    continue;
                }
                if (!std::isfinite(v) || v < 0.0)
                    throw SchemaError("milepost column '" + spec.name +
                                      "' must be finite and non-negative (row " + std::to_string(r) + ")");
            }
        } else if (spec.role == ColumnRole::Categorical) {
            for (std::size_t r = 0; r < rows_; ++r) {
                const auto& v = text(c)[r];
                if (missing(v)) {
                    if (!allow_missing)
                        throw SchemaError("column '" + spec.name + "' has a missing cell at row " +
                                          std::to_string(r));
                    continue;
                }
                if (std::find(spec.levels.begin(), spec.levels.end(), v) == spec.levels.end())
                    throw SchemaError("categorical column '" + spec.name + "' has undeclared level '" + v +
                                      "' at row " + std::to_string(r));
            }
            if (rows_ > 0 && spec.levels.empty())
                throw SchemaError("categorical column '" + spec.name + "' has no level list");
        }
    }
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for fingerprinting: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return h;
}

std::uint64_t Frame::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const std::string schema_bytes = schema_.to_json().dump();
    h = fnv1a64(schema_bytes.data(), schema_bytes.size(), h);
    h = fnv1a64(&rows_, sizeof(rows_), h);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (is_text(c)) {
            for (const auto& v : text(c)) {
                h = fnv1a64(v.data(), v.size(), h);
                h = fnv1a64("\x1f", 1, h);
            }
        } else {
            const auto& col = num(c);
            h = fnv1a64(col.data(), col.size() * sizeof(double), h);
        }
    }
    return h;
}

}  // namespace roadfirst
