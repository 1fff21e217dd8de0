#include "collinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "csv.hpp"
#include "encode.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "threading.hpp"

namespace roadfirst {

namespace {

constexpr double kExactFitTol = 1e-12;  // 1 - R^2 below this is the infinity sentinel
constexpr double kRankTol = 1e-10;

nlohmann::json json_stat(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

double stat_from_json(const nlohmann::json& j) {
    if (j.is_string()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

struct FeatureView {
    std::vector<std::size_t> cols;      // frame column indices
    std::vector<std::string> names;
};

FeatureView feature_view(const Frame& frame) {
    FeatureView v;
    v.cols = frame.feature_columns();
    v.names.reserve(v.cols.size());
    for (auto c : v.cols) v.names.push_back(frame.schema().at(c).name);
    return v;
}

// Centered copies of the feature columns (intercept handled by centering).
std::vector<std::vector<double>> centered_features(const Frame& frame, const FeatureView& view) {
    std::vector<std::vector<double>> out(view.cols.size());
    for (std::size_t k = 0; k < view.cols.size(); ++k) {
        const auto& col = frame.num(view.cols[k]);
        double mean = 0.0;
        for (double x : col) mean += x;
        mean /= static_cast<double>(col.size());
        out[k].resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) out[k][i] = col[i] - mean;
    }
    return out;
}

VifEntry vif_of(const std::vector<std::vector<double>>& centered, std::size_t target,
                const std::vector<std::string>& names) {
    const std::size_t n = centered[target].size();
    const std::size_t p = centered.size() - 1;

    VifEntry entry;
    entry.column = names[target];

    double sst = 0.0;
    for (double y : centered[target]) sst += y * y;
    if (sst <= 0.0) {
        entry.zero_variance = true;
        entry.r2 = 0.0;
        entry.vif = 1.0;
        return entry;
    }

    std::vector<double> a;
    a.reserve(n * p);
    for (std::size_t k = 0; k < centered.size(); ++k) {
        if (k == target) continue;
        a.insert(a.end(), centered[k].begin(), centered[k].end());
    }
    auto result = solve_least_squares(std::move(a), n, p, centered[target], kRankTol);

    double r2 = 1.0 - result.ssr / sst;
    r2 = std::clamp(r2, 0.0, 1.0);
    entry.r2 = r2;
    entry.vif = (1.0 - r2) < kExactFitTol ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - r2);
    return entry;
}

void check_vif_preconditions(const Frame& frame, const FeatureView& view) {
    if (view.cols.size() < 2)
        throw InvalidArgument("VIF needs at least 2 feature columns, got " +
                              std::to_string(view.cols.size()));
    if (frame.rows() <= view.cols.size())
        throw NumericError("rank deficiency: " + std::to_string(frame.rows()) + " rows for " +
                           std::to_string(view.cols.size()) + " feature columns");
}

}  // namespace

double VifReport::max_vif() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.vif);
    return m;
}

const VifEntry* VifReport::find(std::string_view column) const {
    for (const auto& e : entries)
        if (e.column == column) return &e;
    return nullptr;
}

nlohmann::json VifReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je{{"column", e.column}, {"r2", e.r2}, {"vif", json_stat(e.vif)}};
        if (e.zero_variance) je["zero_variance"] = true;
        arr.push_back(std::move(je));
    }
    return nlohmann::json{{"vif", std::move(arr)}};
}

std::pair<double, double> vif(const Frame& frame, std::string_view column) {
    const auto view = feature_view(frame);
    check_vif_preconditions(frame, view);
    auto it = std::find(view.names.begin(), view.names.end(), column);
    if (it == view.names.end())
        throw SchemaError("vif: '" + std::string(column) + "' is not a feature column");
    const auto centered = centered_features(frame, view);
    const auto entry = vif_of(centered, static_cast<std::size_t>(it - view.names.begin()), view.names);
    return {entry.r2, entry.vif};
}

VifReport vif_report(const Frame& frame, unsigned threads) {
    const auto view = feature_view(frame);
    check_vif_preconditions(frame, view);
    const auto centered = centered_features(frame, view);

    VifReport report;
    report.entries.resize(view.cols.size());
    parallel_for(view.cols.size(), threads,
                 [&](std::size_t i) { report.entries[i] = vif_of(centered, i, view.names); });
    return report;
}

CorrelationMatrix correlation_matrix(const Frame& frame) {
    const auto view = feature_view(frame);
    const std::size_t p = view.cols.size();
    const std::size_t n = frame.rows();

    CorrelationMatrix m;
    m.columns = view.names;
    m.values.assign(p * p, 0.0);
    m.zero_variance.assign(p, false);

    const auto centered = centered_features(frame, view);
    std::vector<double> sd(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        double s = 0.0;
        for (double x : centered[k]) s += x * x;
        sd[k] = std::sqrt(s);
        m.zero_variance[k] = sd[k] == 0.0;
    }

    for (std::size_t i = 0; i < p; ++i) {
        m.values[i * p + i] = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            double r = 0.0;
            if (!m.zero_variance[i] && !m.zero_variance[j] && n > 0) {
                double dot = 0.0;
                for (std::size_t t = 0; t < n; ++t) dot += centered[i][t] * centered[j][t];
                r = dot / (sd[i] * sd[j]);
                r = std::clamp(r, -1.0, 1.0);
            }
            m.values[i * p + j] = r;
            m.values[j * p + i] = r;
        }
    }
    return m;
}

std::string_view to_string(RemovalReason reason) {
    switch (reason) {
        case RemovalReason::PairwiseCorrelation: return "pairwise-correlation";
        case RemovalReason::VifOverThreshold: return "vif-over-threshold";
        case RemovalReason::DummySiblingMax: return "dummy-sibling-max";
    }
    return "vif-over-threshold";
}

RemovalReason removal_reason_from_string(std::string_view s) {
    if (s == "pairwise-correlation") return RemovalReason::PairwiseCorrelation;
    if (s == "vif-over-threshold") return RemovalReason::VifOverThreshold;
    if (s == "dummy-sibling-max") return RemovalReason::DummySiblingMax;
    throw ParseError("unknown removal reason: '" + std::string(s) + "'");
}

nlohmann::json ReductionLog::to_json() const {
    nlohmann::json acts = nlohmann::json::array();
    for (const auto& a : actions) {
        acts.push_back({{"column", a.column},
                        {"reason", std::string(to_string(a.reason))},
                        {"iteration", a.iteration},
                        {"statistic", json_stat(a.statistic)}});
    }
    return nlohmann::json{{"actions", std::move(acts)},
                          {"iterations", iterations},
                          {"converged", converged},
                          {"final_max_vif", json_stat(final_max_vif)}};
}

ReductionLog ReductionLog::from_json(const nlohmann::json& j) {
    ReductionLog log;
    for (const auto& ja : j.at("actions")) {
        ReductionAction a;
        a.column = ja.at("column").get<std::string>();
        a.reason = removal_reason_from_string(ja.at("reason").get<std::string>());
        a.iteration = ja.at("iteration").get<int>();
        a.statistic = stat_from_json(ja.at("statistic"));
        log.actions.push_back(std::move(a));
    }
    log.iterations = j.at("iterations").get<int>();
    log.converged = j.at("converged").get<bool>();
    log.final_max_vif = stat_from_json(j.at("final_max_vif"));
    return log;
}

namespace {

// Ordering for "highest VIF" selection: larger VIF first; the +inf sentinel
// ties are broken by removing the lexicographically greater name.
bool vif_removal_precedes(const VifEntry& a, const VifEntry& b) {
    if (a.vif != b.vif) return a.vif > b.vif;
    return a.column > b.column;
}

void drop_by_name(Frame& frame, const std::string& name) {
    frame.drop_column(frame.col_index(name));
}

}  // namespace

std::pair<Frame, ReductionLog> reduce_multicollinearity(const Frame& frame, const ReduceOptions& options,
                                                        RunLog* log) {
    if (options.vif_threshold <= 1.0 || options.corr_threshold <= 0.0 || options.corr_threshold > 1.0)
        throw InvalidArgument("reduce_multicollinearity: vif_threshold must exceed 1 and corr_threshold lie in (0,1]");
    if (options.max_iters < 1) throw InvalidArgument("reduce_multicollinearity: max_iters must be >= 1");

    Frame current = frame;
    ReductionLog rlog;

    auto record = [&](const std::string& column, RemovalReason reason, int iter, double stat) {
        rlog.actions.push_back({column, reason, iter, stat});
        drop_by_name(current, column);
        if (log)
            log->event("reduction", {{"iteration", iter},
                                     {"removed", column},
                                     {"reason", std::string(to_string(reason))},
                                     {"statistic", json_stat(stat)}});
    };

    auto over_threshold = [&](const VifReport& report) {
        std::vector<VifEntry> over;
        for (const auto& e : report.entries)
            if (e.vif > options.vif_threshold) over.push_back(e);
        return over;
    };

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        rlog.iterations = iter;

        auto report = vif_report(current, options.threads);
        auto over = over_threshold(report);
        if (over.empty()) {
            rlog.converged = true;
            rlog.final_max_vif = report.max_vif();
            break;
        }

        // (1) Worst high-correlation pair: remove the lower-priority member.
        bool pair_removed = false;
        {
            const auto corr = correlation_matrix(current);
            const std::size_t p = corr.columns.size();
            double worst = 0.0;
            std::size_t wi = 0, wj = 0;
            bool found = false;
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = i + 1; j < p; ++j) {
                    const double r = std::abs(corr.at(i, j));
                    if (r < options.corr_threshold) continue;
                    const bool better =
                        !found || r > worst ||
                        (r == worst && std::minmax(corr.columns[i], corr.columns[j]) <
                                           std::minmax(corr.columns[wi], corr.columns[wj]));
                    if (better) {
                        worst = r;
                        wi = i;
                        wj = j;
                        found = true;
                    }
                }
            }
            if (found) {
                const auto& spec_i = *current.schema().find(corr.columns[wi]);
                const auto& spec_j = *current.schema().find(corr.columns[wj]);
                std::string victim;
                if (spec_i.priority != spec_j.priority)
                    victim = spec_i.priority < spec_j.priority ? spec_i.name : spec_j.name;
                else
                    victim = std::max(spec_i.name, spec_j.name);
                record(victim, RemovalReason::PairwiseCorrelation, iter, worst);
                pair_removed = true;
            }
        }

        if (current.feature_columns().size() < 2) {
            rlog.converged = true;
            rlog.final_max_vif = 1.0;
            break;
        }

        // Structural steps use VIFs of the post-pairwise frame.
        if (pair_removed) {
            report = vif_report(current, options.threads);
            over = over_threshold(report);
            if (over.empty()) continue;  // convergence confirmed at next iteration start
        }

        // (2) Dummy siblings: groups with >= 2 over-threshold members lose
        // only their highest-VIF member.
        auto group_of = [&](const std::string& name) {
            const auto* spec = current.schema().find(name);
            return spec ? spec->dummy_group : std::string{};
        };
        std::map<std::string, int> over_per_group;
        for (const auto& e : over) {
            const auto g = group_of(e.column);
            if (!g.empty()) ++over_per_group[g];
        }
        const VifEntry* sibling_victim = nullptr;
        const VifEntry* lone_victim = nullptr;
        for (const auto& e : over) {
            const auto g = group_of(e.column);
            const bool is_sibling = !g.empty() && over_per_group[g] >= 2;
            if (is_sibling) {
                if (!sibling_victim || vif_removal_precedes(e, *sibling_victim)) sibling_victim = &e;
            } else {
                if (!lone_victim || vif_removal_precedes(e, *lone_victim)) lone_victim = &e;
            }
        }
        if (sibling_victim)
            record(sibling_victim->column, RemovalReason::DummySiblingMax, iter, sibling_victim->vif);
        // (3) Highest-VIF non-sibling column over threshold.
        if (lone_victim)
            record(lone_victim->column, RemovalReason::VifOverThreshold, iter, lone_victim->vif);
    }

    if (!rlog.converged) {
        auto report = vif_report(current, options.threads);
        rlog.final_max_vif = report.max_vif();
        if (rlog.final_max_vif > options.vif_threshold)
            throw ReductionError("multicollinearity reduction did not converge within " +
                                     std::to_string(options.max_iters) + " iterations (max VIF " +
                                     format_double(rlog.final_max_vif) + ")",
                                 rlog);
        rlog.converged = true;
    }

    if (log)
        log->event("reduction_done", {{"iterations", rlog.iterations},
                                      {"removed", rlog.actions.size()},
                                      {"final_max_vif", json_stat(rlog.final_max_vif)}});
    return {std::move(current), std::move(rlog)};
}

Frame apply_reduction(const Frame& frame, const ReductionLog& log) {
    Frame out = frame;
    for (const auto& a : log.actions) out.drop_column(out.col_index(a.column));
    return out;
}

}  // namespace roadfirst
