#include "encode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "errors.hpp"

namespace roadfirst {

Frame encode_dummies(const Frame& frame, RunLog* log) {
    std::vector<ColumnSpec> specs;
    std::size_t n_dummies = 0, n_groups = 0;
    for (const auto& spec : frame.schema().columns()) {
        if (spec.role != ColumnRole::Categorical) {
            specs.push_back(spec);
            continue;
        }
        if (spec.levels.empty())
            throw SchemaError("categorical column '" + spec.name + "' has no levels to encode");
        ++n_groups;
        for (const auto& level : spec.levels) {
            ColumnSpec dummy;
            dummy.name = spec.name + "=" + level;
            dummy.role = ColumnRole::Binary;
            dummy.feature_class = spec.feature_class;
            dummy.dummy_group = spec.name;
            dummy.priority = spec.priority;
            specs.push_back(std::move(dummy));
            ++n_dummies;
        }
    }

    Frame out{Schema(std::move(specs))};
    out.set_row_count(frame.rows());
    std::size_t oc = 0;
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& spec = frame.schema().at(c);
        if (spec.role != ColumnRole::Categorical) {
            if (frame.is_text(c))
                out.text(oc) = frame.text(c);
            else
                out.num(oc) = frame.num(c);
            ++oc;
            continue;
        }
        for (const auto& level : spec.levels) {
            auto& col = out.num(oc);
            for (std::size_t r = 0; r < frame.rows(); ++r) {
                const auto& v = frame.text(c)[r];
                col[r] = Frame::missing(v) ? std::numeric_limits<double>::quiet_NaN()
                                           : (v == level ? 1.0 : 0.0);
            }
            ++oc;
        }
    }

    if (log)
        log->event("encode", {{"stage", "encode_dummies"},
                              {"groups", n_groups},
                              {"dummy_columns", n_dummies},
                              {"columns_out", out.cols()}});
    return out;
}

MissingPolicy missing_policy_from_string(std::string_view s) {
    if (s == "drop_row") return MissingPolicy::DropRow;
    if (s == "impute") return MissingPolicy::Impute;
    throw InvalidArgument("unknown missing policy: '" + std::string(s) + "'");
}

namespace {

double column_median(const Frame::NumColumn& col) {
    std::vector<double> vals;
    vals.reserve(col.size());
    for (double v : col)
        if (!Frame::missing(v)) vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

std::string column_mode(const Frame::TextColumn& col) {
    std::map<std::string, std::size_t> counts;  // ordered: lexicographic tie-break for free
    for (const auto& v : col)
        if (!Frame::missing(v)) ++counts[v];
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [level, count] : counts) {
        if (count > best_count) {
            best = level;
            best_count = count;
        }
    }
    return best;
}

double binary_mode(const Frame::NumColumn& col) {
    std::size_t zeros = 0, ones = 0;
    for (double v : col) {
        if (Frame::missing(v)) continue;
        if (v == 0.0) ++zeros;
        else ++ones;
    }
    return ones > zeros ? 1.0 : 0.0;  // tie goes to 0 ("0" < "1")
}

bool imputable(ColumnRole role) {
    switch (role) {
        case ColumnRole::Continuous:
        case ColumnRole::Categorical:
        case ColumnRole::Binary:
        case ColumnRole::Milepost:
            return true;
        default:
            return false;
    }
}

}  // namespace

Frame resolve_missing(const Frame& frame, MissingPolicy policy, MissingStats* stats, RunLog* log) {
    MissingStats local;
    MissingStats& st = stats ? *stats : local;

    // Rows with missing cells in non-imputable roles go away under either policy.
    std::vector<bool> drop(frame.rows(), false);
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& spec = frame.schema().at(c);
        const bool drops_row = policy == MissingPolicy::DropRow || !imputable(spec.role);
        if (!drops_row) continue;
        for (std::size_t r = 0; r < frame.rows(); ++r)
            if (frame.cell_missing(r, c)) drop[r] = true;
    }

    std::vector<std::size_t> kept;
    kept.reserve(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r)
        if (!drop[r]) kept.push_back(r);
    st.rows_dropped = frame.rows() - kept.size();

    Frame out = frame.select_rows(kept);

    if (policy == MissingPolicy::Impute) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            const auto& spec = out.schema().at(c);
            if (!imputable(spec.role)) continue;
            std::size_t missing_count = 0;
            if (out.is_text(c)) {
                for (const auto& v : out.text(c))
                    if (Frame::missing(v)) ++missing_count;
            } else {
                for (double v : out.num(c))
                    if (Frame::missing(v)) ++missing_count;
            }
            if (missing_count == 0) continue;
            if (missing_count == out.rows())
                throw InvalidArgument("column '" + spec.name + "' is entirely missing; cannot impute");

            if (spec.role == ColumnRole::Categorical) {
                const std::string fill = column_mode(out.text(c));
                for (auto& v : out.text(c))
                    if (Frame::missing(v)) v = fill;
            } else if (spec.role == ColumnRole::Binary) {
                const double fill = binary_mode(out.num(c));
                for (auto& v : out.num(c))
                    if (Frame::missing(v)) v = fill;
            } else {
                const double fill = column_median(out.num(c));
                for (auto& v : out.num(c))
                    if (Frame::missing(v)) v = fill;
            }
            st.cells_imputed += missing_count;
            if (log)
                log->event("impute", {{"column", spec.name},
                                      {"cells", missing_count},
                                      {"method", spec.role == ColumnRole::Categorical ||
                                                         spec.role == ColumnRole::Binary
                                                     ? "mode"
                                                     : "median"}});
        }
    }

    out.validate(/*allow_missing=*/false);
    if (log)
        log->event("resolve_missing", {{"policy", policy == MissingPolicy::Impute ? "impute" : "drop_row"},
                                       {"rows_in", frame.rows()},
                                       {"rows_out", out.rows()},
                                       {"rows_dropped", st.rows_dropped},
                                       {"cells_imputed", st.cells_imputed}});
    return out;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> dummy_groups(const Schema& schema) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        const auto& g = schema.at(c).dummy_group;
        if (g.empty()) continue;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& p) { return p.first == g; });
        if (it == groups.end())
            groups.push_back({g, {c}});
        else
            it->second.push_back(c);
    }
    return groups;
}

}  // namespace roadfirst
