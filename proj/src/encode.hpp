#pragma once

#include <string>
#include <vector>

#include "frame.hpp"
#include "runlog.hpp"

namespace roadfirst {

// One-hot expansion: every categorical column with k levels becomes k binary
// columns named "<col>=<level>" carrying the origin column as dummy-group
// metadata (the collinearity sibling rule depends on it). All k dummies are
// kept on purpose; the reduction step prunes them later. Missing categorical
// cells propagate as missing dummies.
Frame encode_dummies(const Frame& frame, RunLog* log = nullptr);

enum class MissingPolicy { DropRow, Impute };

MissingPolicy missing_policy_from_string(std::string_view s);

struct MissingStats {
    std::size_t rows_dropped = 0;
    std::size_t cells_imputed = 0;
};

// Under Impute: continuous/milepost -> column median, categorical/binary ->
// column mode (ties resolved by lexicographic level order). Cells in roles
// that cannot be honestly imputed (identifier, route_id, coordinate, target)
// drop the row under either policy. Under DropRow: any missing cell drops
// the row. A column that is entirely missing cannot be imputed.
Frame resolve_missing(const Frame& frame, MissingPolicy policy, MissingStats* stats = nullptr,
                      RunLog* log = nullptr);

// Dummy groups present in a schema, in first-appearance order:
// (group name, member column indices).
std::vector<std::pair<std::string, std::vector<std::size_t>>> dummy_groups(const Schema& schema);

}  // namespace roadfirst
