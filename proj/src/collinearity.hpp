#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "frame.hpp"
#include "runlog.hpp"

namespace roadfirst {

// VIF_i = 1 / (1 - R^2_i), where R^2_i comes from regressing feature i on
// the remaining features with an intercept. Exact collinearity is reported
// through the +infinity sentinel.
struct VifEntry {
    std::string column;
    double r2 = 0.0;
    double vif = 1.0;  // may be +infinity
    bool zero_variance = false;
};

struct VifReport {
    std::vector<VifEntry> entries;

    double max_vif() const;
    const VifEntry* find(std::string_view column) const;
    nlohmann::json to_json() const;
};

// (R^2, VIF) for one column. Preconditions: >= 2 feature columns, more rows
// than feature columns (rank-deficiency error otherwise).
std::pair<double, double> vif(const Frame& frame, std::string_view column);

VifReport vif_report(const Frame& frame, unsigned threads = 0);

struct CorrelationMatrix {
    std::vector<std::string> columns;
    std::vector<double> values;  // row-major, size columns^2
    std::vector<bool> zero_variance;

    double at(std::size_t i, std::size_t j) const { return values[i * columns.size() + j]; }
};

// Pearson correlations over feature columns; zero-variance columns get 0 by
// convention (flagged), diagonal stays 1.
CorrelationMatrix correlation_matrix(const Frame& frame);

enum class RemovalReason { PairwiseCorrelation, VifOverThreshold, DummySiblingMax };

std::string_view to_string(RemovalReason reason);
RemovalReason removal_reason_from_string(std::string_view s);

struct ReductionAction {
    std::string column;
    RemovalReason reason = RemovalReason::VifOverThreshold;
    int iteration = 0;
    double statistic = 0.0;  // |corr| or VIF that triggered the removal
};

// Replayable log of the iterative reduction; applying the actions to the
// original frame must reproduce the reduced frame exactly.
struct ReductionLog {
    std::vector<ReductionAction> actions;
    int iterations = 0;
    bool converged = false;
    double final_max_vif = 0.0;

    nlohmann::json to_json() const;
    static ReductionLog from_json(const nlohmann::json& j);
};

struct ReduceOptions {
    double vif_threshold = 10.0;
    double corr_threshold = 0.95;
    int max_iters = 50;
    unsigned threads = 0;
};

// Iterative holistic reduction. Per iteration, at most one removal per
// category: (1) the worst |corr| >= corr_threshold pair loses its
// lower-priority member; (2) among over-threshold dummies sharing a source
// variable, only the highest-VIF one goes; (3) the highest-VIF non-sibling
// over-threshold column goes. Repeats until max VIF <= threshold.
// Exhausting max_iters raises ReductionError carrying the partial log.
std::pair<Frame, ReductionLog> reduce_multicollinearity(const Frame& frame, const ReduceOptions& options,
                                                        RunLog* log = nullptr);

class ReductionError : public Error {
public:
    ReductionError(const std::string& what, ReductionLog partial)
        : Error(6, what), partial_log(std::move(partial)) {}
    ReductionLog partial_log;
};

// Replay a reduction log against the original frame.
Frame apply_reduction(const Frame& frame, const ReductionLog& log);

}  // namespace roadfirst
