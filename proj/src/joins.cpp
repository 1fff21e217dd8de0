#include "joins.hpp"

#include <algorithm>
#include <unordered_map>

#include "csv.hpp"
#include "errors.hpp"

namespace roadfirst {

namespace {

std::string row_key(const Frame& f, const std::vector<std::size_t>& key_cols, std::size_t row) {
    std::string key;
    for (std::size_t c : key_cols) {
        if (f.is_text(c))
            key += f.text(c)[row];
        else
            key += format_double(f.num(c)[row]);
        key.push_back('\x1f');
    }
    return key;
}

std::vector<std::size_t> key_columns(const Frame& f, const std::vector<std::string>& keys,
                                     const char* which) {
    if (keys.empty()) throw InvalidArgument("join_records: no key columns given");
    std::vector<std::size_t> cols;
    cols.reserve(keys.size());
    for (const auto& k : keys) {
        if (!f.schema().contains(k))
            throw SchemaError(std::string("join key '") + k + "' missing from " + which + " frame");
        cols.push_back(f.col_index(k));
    }
    return cols;
}

// key -> first matching row, counting rows beyond the first.
std::unordered_map<std::string, std::size_t> first_match_index(const Frame& f,
                                                               const std::vector<std::size_t>& key_cols,
                                                               std::size_t* extras) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) {
        auto [it, inserted] = index.emplace(row_key(f, key_cols, r), r);
        if (!inserted && extras) ++*extras;
    }
    return index;
}

void append_columns_from(const Frame& src, const std::vector<std::size_t>& src_rows,
                         const std::vector<std::string>& skip_names, Frame& dst) {
    for (std::size_t c = 0; c < src.cols(); ++c) {
        const auto& spec = src.schema().at(c);
        if (std::find(skip_names.begin(), skip_names.end(), spec.name) != skip_names.end()) continue;
        if (dst.schema().contains(spec.name))
            throw SchemaError("join would duplicate column '" + spec.name +
                              "'; non-key column names must be disjoint across files");
        if (src.is_text(c)) {
            Frame::TextColumn col;
            col.reserve(src_rows.size());
            for (auto r : src_rows) col.push_back(src.text(c)[r]);
            dst.add_column(spec, std::move(col));
        } else {
            Frame::NumColumn col;
            col.reserve(src_rows.size());
            for (auto r : src_rows) col.push_back(src.num(c)[r]);
            dst.add_column(spec, std::move(col));
        }
    }
}

}  // namespace

Frame join_records(const Frame& crash, const Frame& unit, const Frame& person,
                   const std::vector<std::string>& keys, JoinStats* stats, RunLog* log) {
    const auto crash_keys = key_columns(crash, keys, "crash");
    const auto unit_keys = key_columns(unit, keys, "unit");
    const auto person_keys = key_columns(person, keys, "person");

    // Crash identifiers must be unique.
    {
        std::unordered_map<std::string, std::size_t> seen;
        seen.reserve(crash.rows());
        for (std::size_t r = 0; r < crash.rows(); ++r) {
            auto key = row_key(crash, crash_keys, r);
            auto [it, inserted] = seen.emplace(key, r);
            if (!inserted)
                throw SchemaError("duplicate crash identifier at rows " + std::to_string(it->second) +
                                  " and " + std::to_string(r));
        }
    }

    JoinStats local;
    JoinStats& st = stats ? *stats : local;
    auto unit_index = first_match_index(unit, unit_keys, &st.multi_unit);
    auto person_index = first_match_index(person, person_keys, &st.multi_person);

    std::vector<std::size_t> kept_crash, kept_unit, kept_person;
    kept_crash.reserve(crash.rows());
    for (std::size_t r = 0; r < crash.rows(); ++r) {
        const auto key = row_key(crash, crash_keys, r);
        auto uit = unit_index.find(key);
        if (uit == unit_index.end()) {
            ++st.dropped_no_unit;
            continue;
        }
        auto pit = person_index.find(key);
        if (pit == person_index.end()) {
            ++st.dropped_no_person;
            continue;
        }
        kept_crash.push_back(r);
        kept_unit.push_back(uit->second);
        kept_person.push_back(pit->second);
    }

    Frame out = crash.select_rows(kept_crash);
    append_columns_from(unit, kept_unit, keys, out);
    append_columns_from(person, kept_person, keys, out);

    if (log) {
        log->event("join", {{"stage", "join_records"},
                            {"crash_rows", crash.rows()},
                            {"kept", kept_crash.size()},
                            {"dropped_no_unit", st.dropped_no_unit},
                            {"dropped_no_person", st.dropped_no_person},
                            {"multi_unit_first_kept", st.multi_unit},
                            {"multi_person_first_kept", st.multi_person}});
    }
    return out;
}

SegmentSet segments_from_frame(const Frame& frame) {
    const std::size_t route_col = [&] {
        for (std::size_t c = 0; c < frame.cols(); ++c)
            if (frame.schema().at(c).role == ColumnRole::RouteId) return c;
        throw SchemaError("segments frame has no route_id column");
    }();
    if (!frame.schema().contains("begin_mp") || !frame.schema().contains("end_mp"))
        throw SchemaError("segments frame needs 'begin_mp' and 'end_mp' milepost columns");
    const std::size_t begin_col = frame.col_index("begin_mp");
    const std::size_t end_col = frame.col_index("end_mp");

    std::optional<std::size_t> lat_col, lon_col;
    if (frame.schema().contains("lat")) lat_col = frame.col_index("lat");
    if (frame.schema().contains("lon")) lon_col = frame.col_index("lon");

    std::vector<ColumnSpec> feature_specs;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& spec = frame.schema().at(c);
        if (c == route_col || c == begin_col || c == end_col) continue;
        if (spec.role == ColumnRole::Coordinate) continue;
        if (is_feature_role(spec.role) || spec.role == ColumnRole::Categorical) {
            feature_specs.push_back(spec);
            feature_cols.push_back(c);
        }
    }

    SegmentSet set;
    set.feature_schema = Schema(std::move(feature_specs));
    set.records.reserve(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        SegmentRecord rec;
        rec.route_id = frame.text(route_col)[r];
        rec.begin_mp = frame.num(begin_col)[r];
        rec.end_mp = frame.num(end_col)[r];
        if (!(rec.begin_mp < rec.end_mp))
            throw SchemaError("segment on route '" + rec.route_id + "' has begin_mp " +
                              format_double(rec.begin_mp) + " >= end_mp " + format_double(rec.end_mp));
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const std::size_t c = feature_cols[k];
            const auto& name = set.feature_schema.at(k).name;
            if (frame.is_text(c))
                rec.text_features[name] = frame.text(c)[r];
            else
                rec.num_features[name] = frame.num(c)[r];
        }
        if (lat_col && lon_col) rec.coords = {frame.num(*lat_col)[r], frame.num(*lon_col)[r]};
        set.records.push_back(std::move(rec));
    }
    return set;
}

SegmentSet load_segments(const std::filesystem::path& csv_path, const Schema& schema) {
    return segments_from_frame(load_csv(csv_path, schema));
}

Frame map_to_segments(const Frame& crashes, const SegmentSet& segments, std::size_t* dropped_unmatched,
                      RunLog* log) {
    std::optional<std::size_t> route_col, mp_col;
    for (std::size_t c = 0; c < crashes.cols(); ++c) {
        const auto role = crashes.schema().at(c).role;
        if (role == ColumnRole::RouteId && !route_col) route_col = c;
        if (role == ColumnRole::Milepost && !mp_col) mp_col = c;
    }
    if (!route_col || !mp_col)
        throw SchemaError("map_to_segments needs route_id and milepost columns on the crash frame");

    // Per-route interval index; overlapping intervals are a hard error.
    std::map<std::string, std::vector<std::size_t>> by_route;
    for (std::size_t i = 0; i < segments.records.size(); ++i)
        by_route[segments.records[i].route_id].push_back(i);
    for (auto& [route, idx] : by_route) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return segments.records[a].begin_mp < segments.records[b].begin_mp;
        });
        for (std::size_t k = 1; k < idx.size(); ++k) {
            const auto& prev = segments.records[idx[k - 1]];
            const auto& cur = segments.records[idx[k]];
            if (cur.begin_mp < prev.end_mp)
                throw SchemaError("overlapping segments on route '" + route + "': [" +
                                  format_double(prev.begin_mp) + "," + format_double(prev.end_mp) +
                                  ") and [" + format_double(cur.begin_mp) + "," +
                                  format_double(cur.end_mp) + ")");
        }
    }

    std::vector<std::size_t> kept_rows, matched_segment;
    std::size_t dropped = 0;
    for (std::size_t r = 0; r < crashes.rows(); ++r) {
        const auto& route = crashes.text(*route_col)[r];
        const double mp = crashes.num(*mp_col)[r];
        auto rit = by_route.find(route);
        bool matched = false;
        if (rit != by_route.end()) {
            const auto& idx = rit->second;
            // last segment with begin <= mp
            auto it = std::upper_bound(idx.begin(), idx.end(), mp, [&](double v, std::size_t s) {
                return v < segments.records[s].begin_mp;
            });
            if (it != idx.begin()) {
                const auto& seg = segments.records[*(it - 1)];
                if (mp >= seg.begin_mp && mp < seg.end_mp) {
                    kept_rows.push_back(r);
                    matched_segment.push_back(*(it - 1));
                    matched = true;
                }
            }
        }
        if (!matched) ++dropped;
    }
    if (dropped_unmatched) *dropped_unmatched = dropped;

    Frame out = crashes.select_rows(kept_rows);
    for (std::size_t k = 0; k < segments.feature_schema.size(); ++k) {
        const auto& spec = segments.feature_schema.at(k);
        if (out.schema().contains(spec.name))
            throw SchemaError("segment feature '" + spec.name + "' collides with a crash column");
        if (is_text_role(spec.role)) {
            Frame::TextColumn col;
            col.reserve(kept_rows.size());
            for (auto s : matched_segment)
                col.push_back(segments.records[s].text_features.at(spec.name));
            out.add_column(spec, std::move(col));
        } else {
            Frame::NumColumn col;
            col.reserve(kept_rows.size());
            for (auto s : matched_segment) col.push_back(segments.records[s].num_features.at(spec.name));
            out.add_column(spec, std::move(col));
        }
    }

    if (log) {
        log->event("join", {{"stage", "map_to_segments"},
                            {"crash_rows", crashes.rows()},
                            {"kept", kept_rows.size()},
                            {"dropped_unmatched", dropped}});
    }
    return out;
}

void apply_coordinate_sidecar(SegmentSet& segments, const std::filesystem::path& csv_path) {
    auto records = read_csv_records(csv_path);
    if (records.empty()) throw ParseError("coordinate sidecar has no header: " + csv_path.string());
    const std::vector<std::string> expected{"route_id", "begin_mp", "end_mp", "lat", "lon"};
    if (records.front() != expected)
        throw ParseError("coordinate sidecar header must be route_id,begin_mp,end_mp,lat,lon");

    std::map<std::pair<std::string, double>, std::pair<double, double>> coords;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != expected.size())
            throw ParseError("coordinate sidecar row " + std::to_string(r) + " has wrong field count");
        coords[{rec[0], parse_double(rec[1], r, "begin_mp")}] = {parse_double(rec[3], r, "lat"),
                                                                 parse_double(rec[4], r, "lon")};
    }
    for (auto& seg : segments.records) {
        auto it = coords.find({seg.route_id, seg.begin_mp});
        if (it != coords.end()) seg.coords = it->second;
    }
}

}  // namespace roadfirst
