#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frame.hpp"
#include "runlog.hpp"

namespace roadfirst {

struct JoinStats {
    std::size_t dropped_no_unit = 0;
    std::size_t dropped_no_person = 0;
    std::size_t multi_unit = 0;    // crashes with >1 unit row (first kept)
    std::size_t multi_person = 0;  // crashes with >1 person row (first kept)
};

// Assemble one row per crash from the crash/unit/person file topology.
// Unit/person features of the first matching row (file order) are appended;
// crashes with no unit or no person match are dropped and counted.
// Duplicate identifiers within the crash frame are an error.
Frame join_records(const Frame& crash, const Frame& unit, const Frame& person,
                   const std::vector<std::string>& keys, JoinStats* stats = nullptr,
                   RunLog* log = nullptr);

// One road segment: half-open milepost interval [begin, end) on a route,
// static road feature values, optional coordinates.
struct SegmentRecord {
    std::string route_id;
    double begin_mp = 0.0;
    double end_mp = 0.0;
    std::map<std::string, double> num_features;
    std::map<std::string, std::string> text_features;
    std::optional<std::pair<double, double>> coords;  // lat, lon
};

// Segment inventory plus the schema of its feature columns (needed to append
// typed columns during mapping and to dummy-encode segments for scoring).
struct SegmentSet {
    Schema feature_schema;
    std::vector<SegmentRecord> records;
};

// Segments CSV layout: route_id, begin_mp, end_mp, feature columns per the
// schema config, optional lat/lon coordinate columns.
SegmentSet load_segments(const std::filesystem::path& csv_path, const Schema& schema);
SegmentSet segments_from_frame(const Frame& frame);

// Attach per-crash static road features by (route, milepost in [begin,end)).
// Unmatched crashes are dropped and counted; overlapping segments on one
// route are an error listing the conflict.
Frame map_to_segments(const Frame& crashes, const SegmentSet& segments,
                      std::size_t* dropped_unmatched = nullptr, RunLog* log = nullptr);

// Optional sidecar attaching coordinates to segments: CSV with header
// route_id,begin_mp,end_mp,lat,lon.
void apply_coordinate_sidecar(SegmentSet& segments, const std::filesystem::path& csv_path);

}  // namespace roadfirst
