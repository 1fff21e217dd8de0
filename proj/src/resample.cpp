#include "resample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "encode.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "threading.hpp"

namespace roadfirst {

void BalanceConfig::validate() const {
    if (undersample_ratio && (*undersample_ratio <= 0.0 || *undersample_ratio > 1.0))
        throw InvalidArgument("undersample_ratio must lie in (0,1]");
    if (target_ratio <= 0.0 || target_ratio > 1.0)
        throw InvalidArgument("target_ratio must lie in (0,1]");
    if (k_neighbors < 1) throw InvalidArgument("k_neighbors must be >= 1");
}

std::size_t synthetic_row_count(const Frame& frame) {
    if (!frame.schema().contains(kSyntheticColumn)) return 0;
    const auto& col = frame.text(frame.col_index(kSyntheticColumn));
    return static_cast<std::size_t>(std::count(col.begin(), col.end(), "1"));
}

namespace {

struct ClassSplit {
    std::vector<std::size_t> minority, majority;
    double minority_value = 1.0;
};

ClassSplit classify_rows(const Frame& frame, std::string_view target) {
    const std::size_t t = frame.col_index(target);
    const auto& spec = frame.schema().at(t);
    if (spec.role != ColumnRole::Target && spec.role != ColumnRole::Binary)
        throw SchemaError("'" + std::string(target) + "' is not a binary target column");
    std::vector<std::size_t> zeros, ones;
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        const double v = frame.num(t)[r];
        if (v == 0.0) zeros.push_back(r);
        else if (v == 1.0) ones.push_back(r);
        else throw SchemaError("target '" + std::string(target) + "' has a non-binary cell");
    }
    if (zeros.empty() || ones.empty())
        throw NumericError("target '" + std::string(target) + "' has a single class present");
    ClassSplit split;
    if (ones.size() <= zeros.size()) {
        split.minority = std::move(ones);
        split.majority = std::move(zeros);
        split.minority_value = 1.0;
    } else {
        split.minority = std::move(zeros);
        split.majority = std::move(ones);
        split.minority_value = 0.0;
    }
    return split;
}

// Partial Fisher-Yates: first `take` slots of a shuffle of `pool`.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t take,
                                                    RngStream& rng) {
    take = std::min(take, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.next_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    return pool;
}

}  // namespace

MixedDistanceContext MixedDistanceContext::build(const Frame& frame, std::string_view target) {
    MixedDistanceContext ctx;
    const auto groups = dummy_groups(frame.schema());

    std::vector<bool> in_group(frame.cols(), false);
    for (const auto& [name, cols] : groups)
        for (auto c : cols) in_group[c] = true;

    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& spec = frame.schema().at(c);
        if (spec.role == ColumnRole::Continuous) ctx.continuous_cols.push_back(c);
        if (spec.role == ColumnRole::Binary && !in_group[c]) {
            CategoricalFeature f;
            f.name = spec.name;
            f.binary_col = c;
            f.level_names = {"0", "1"};
            ctx.categoricals.push_back(std::move(f));
        }
    }
    for (const auto& [name, cols] : groups) {
        CategoricalFeature f;
        f.name = name;
        f.member_cols = cols;
        for (auto c : cols) {
            const auto& dummy = frame.schema().at(c).name;
            const auto eq = dummy.find('=');
            f.level_names.push_back(eq == std::string::npos ? dummy : dummy.substr(eq + 1));
        }
        ctx.categoricals.push_back(std::move(f));
    }
    // Stable feature order regardless of schema layout.
    std::sort(ctx.categoricals.begin(), ctx.categoricals.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });

    const auto split = classify_rows(frame, target);
    std::vector<double> sds;
    for (auto c : ctx.continuous_cols) {
        double mean = 0.0;
        for (auto r : split.minority) mean += frame.num(c)[r];
        mean /= static_cast<double>(split.minority.size());
        double ss = 0.0;
        for (auto r : split.minority) {
            const double d = frame.num(c)[r] - mean;
            ss += d * d;
        }
        const std::size_t n = split.minority.size();
        sds.push_back(n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0);
    }
    if (sds.empty()) {
        ctx.med = 1.0;
    } else {
        std::sort(sds.begin(), sds.end());
        const std::size_t n = sds.size();
        ctx.med = n % 2 ? sds[n / 2] : 0.5 * (sds[n / 2 - 1] + sds[n / 2]);
    }
    return ctx;
}

MixedRow mixed_row(const Frame& frame, const MixedDistanceContext& ctx, std::size_t row) {
    MixedRow out;
    out.cont.reserve(ctx.continuous_cols.size());
    for (auto c : ctx.continuous_cols) out.cont.push_back(frame.num(c)[row]);
    out.cat.reserve(ctx.categoricals.size());
    for (const auto& f : ctx.categoricals) {
        if (f.member_cols.empty()) {
            out.cat.push_back(frame.num(f.binary_col)[row] >= 0.5 ? 1 : 0);
        } else {
            int code = -1;
            for (std::size_t k = 0; k < f.member_cols.size(); ++k) {
                if (frame.num(f.member_cols[k])[row] >= 0.5) {
                    code = static_cast<int>(k);
                    break;
                }
            }
            out.cat.push_back(code);
        }
    }
    return out;
}

double mixed_distance(const MixedRow& a, const MixedRow& b, const MixedDistanceContext& ctx) {
    if (a.cont.size() != b.cont.size() || a.cat.size() != b.cat.size())
        throw InvalidArgument("mixed_distance: rows do not share a schema");
    double s = 0.0;
    for (std::size_t i = 0; i < a.cont.size(); ++i) {
        const double d = a.cont[i] - b.cont[i];
        s += d * d;
    }
    const double med2 = ctx.med * ctx.med;
    for (std::size_t i = 0; i < a.cat.size(); ++i)
        if (a.cat[i] != b.cat[i]) s += med2;
    return std::sqrt(s);
}

Frame rumc(const Frame& frame, std::string_view target, const BalanceConfig& config, RunLog* log) {
    config.validate();
    const auto split = classify_rows(frame, target);

    const double ratio = config.undersample_ratio
                             ? *config.undersample_ratio
                             : std::min(1.0, 2.0 * static_cast<double>(split.minority.size()) /
                                                 static_cast<double>(split.majority.size()));
    const auto keep_count =
        static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(split.majority.size())));

    RngStream rng(config.seed, rng_streams::kRumc);
    auto kept_majority = sample_without_replacement(split.majority, keep_count, rng);

    std::vector<std::size_t> kept = split.minority;
    kept.insert(kept.end(), kept_majority.begin(), kept_majority.end());
    std::sort(kept.begin(), kept.end());  // original row order

    if (log)
        log->event("balance", {{"stage", "rumc"},
                               {"target", std::string(target)},
                               {"minority", split.minority.size()},
                               {"majority_before", split.majority.size()},
                               {"majority_after", kept_majority.size()},
                               {"ratio", ratio}});
    return frame.select_rows(kept);
}

Frame smote_nc(const Frame& frame, std::string_view target, const BalanceConfig& config, RunLog* log,
               unsigned threads) {
    config.validate();
    const auto split = classify_rows(frame, target);
    const std::size_t m = split.minority.size();
    const auto k = static_cast<std::size_t>(config.k_neighbors);
    if (m <= k)
        throw InvalidArgument("SMOTE-NC needs minority count > k: have " + std::to_string(m) +
                              " minority rows for k=" + std::to_string(config.k_neighbors) +
                              "; use a smaller k");

    const auto want = static_cast<std::size_t>(
        std::ceil(config.target_ratio * static_cast<double>(split.majority.size())));
    const std::size_t needed = want > m ? want - m : 0;
    if (needed == 0) {
        if (log)
            log->event("balance",
                       {{"stage", "smote_nc"}, {"target", std::string(target)}, {"synthetic", 0}});
        return frame;
    }

    const auto ctx = MixedDistanceContext::build(frame, target);
    std::vector<MixedRow> minority_rows(m);
    for (std::size_t i = 0; i < m; ++i) minority_rows[i] = mixed_row(frame, ctx, split.minority[i]);

    struct Synthetic {
        std::size_t seed_row = 0;  // frame row index of the seed
        MixedRow values;
    };
    std::vector<Synthetic> synth(needed);

    parallel_for(needed, threads, [&](std::size_t s) {
        RngStream rng(config.seed, rng_streams::kSmote, s);
        const std::size_t seed_idx = rng.next_below(m);
        const MixedRow& seed = minority_rows[seed_idx];

        // k nearest minority neighbors of the seed (excluding itself),
        // distance ties broken by row index.
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == seed_idx) continue;
            dist.emplace_back(mixed_distance(seed, minority_rows[j], ctx), j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

        const std::size_t pick = rng.next_below(k);
        const MixedRow& neighbor = minority_rows[dist[pick].second];

        MixedRow out;
        out.cont.resize(seed.cont.size());
        for (std::size_t i = 0; i < seed.cont.size(); ++i) {
            const double gap = rng.next_double();
            out.cont[i] = seed.cont[i] + gap * (neighbor.cont[i] - seed.cont[i]);
        }
        out.cat.resize(seed.cat.size());
        for (std::size_t f = 0; f < ctx.categoricals.size(); ++f) {
            std::map<int, std::size_t> votes;
            for (std::size_t nb = 0; nb < k; ++nb) ++votes[minority_rows[dist[nb].second].cat[f]];
            std::size_t best = 0;
            for (const auto& [code, count] : votes) best = std::max(best, count);
            std::vector<int> tied;
            for (const auto& [code, count] : votes)
                if (count == best) tied.push_back(code);
            int chosen;
            if (std::find(tied.begin(), tied.end(), seed.cat[f]) != tied.end()) {
                chosen = seed.cat[f];
            } else {
                // smallest level name among the tied codes
                chosen = tied.front();
                const auto& names = ctx.categoricals[f].level_names;
                for (int code : tied) {
                    if (code >= 0 && chosen >= 0 &&
                        names[static_cast<std::size_t>(code)] < names[static_cast<std::size_t>(chosen)])
                        chosen = code;
                }
            }
            out.cat[f] = chosen;
        }
        synth[s] = {split.minority[seed_idx], std::move(out)};
    });

    // Materialize: original rows first, synthetic rows appended.
    Frame out = frame;
    if (!out.schema().contains(kSyntheticColumn)) {
        ColumnSpec prov;
        prov.name = kSyntheticColumn;
        prov.role = ColumnRole::Identifier;
        out.add_column(prov, Frame::TextColumn(out.rows(), "0"));
    }
    const std::size_t base_rows = out.rows();
    out.set_row_count(base_rows + needed);

    const std::size_t prov_col = out.col_index(kSyntheticColumn);
    const std::size_t target_col = out.col_index(target);

    for (std::size_t s = 0; s < needed; ++s) {
        const std::size_t r = base_rows + s;
        const auto& syn = synth[s];
        // Non-feature columns inherit the seed row's values.
        for (std::size_t c = 0; c < out.cols(); ++c) {
            if (out.is_text(c))
                out.text(c)[r] = out.text(c)[syn.seed_row];
            else
                out.num(c)[r] = out.num(c)[syn.seed_row];
        }
        for (std::size_t i = 0; i < ctx.continuous_cols.size(); ++i)
            out.num(ctx.continuous_cols[i])[r] = syn.values.cont[i];
        for (std::size_t f = 0; f < ctx.categoricals.size(); ++f) {
            const auto& feat = ctx.categoricals[f];
            const int code = syn.values.cat[f];
            if (feat.member_cols.empty()) {
                out.num(feat.binary_col)[r] = code == 1 ? 1.0 : 0.0;
            } else {
                for (std::size_t kk = 0; kk < feat.member_cols.size(); ++kk)
                    out.num(feat.member_cols[kk])[r] = static_cast<int>(kk) == code ? 1.0 : 0.0;
            }
        }
        out.num(target_col)[r] = split.minority_value;
        out.text(prov_col)[r] = "1";
    }

    if (log)
        log->event("balance", {{"stage", "smote_nc"},
                               {"target", std::string(target)},
                               {"minority_before", m},
                               {"majority", split.majority.size()},
                               {"synthetic", needed},
                               {"med", ctx.med},
                               {"k", config.k_neighbors}});
    return out;
}

Frame rebalance(const Frame& frame, std::string_view target, const BalanceConfig& config, RunLog* log,
                unsigned threads) {
    return smote_nc(rumc(frame, target, config, log), target, config, log, threads);
}

std::pair<Frame, Frame> train_test_split(const Frame& frame, double train_fraction,
                                         std::string_view target, std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw InvalidArgument("train_fraction must lie in (0,1)");
    const std::size_t t = frame.col_index(target);
    std::vector<std::size_t> zeros, ones;
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        const double v = frame.num(t)[r];
        if (v == 0.0) zeros.push_back(r);
        else if (v == 1.0) ones.push_back(r);
        else throw SchemaError("target '" + std::string(target) + "' has a non-binary cell");
    }
    if (zeros.size() < 2 || ones.size() < 2)
        throw NumericError("train_test_split needs at least 2 rows per class");

    std::vector<std::size_t> train_idx, test_idx;
    for (int cls = 0; cls < 2; ++cls) {
        auto& pool = cls == 0 ? zeros : ones;
        RngStream rng(seed, rng_streams::kSplit, static_cast<std::uint64_t>(cls));
        const auto take =
            static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(pool.size())));
        auto chosen = sample_without_replacement(pool, take, rng);
        std::vector<bool> in_train(frame.rows(), false);
        for (auto r : chosen) in_train[r] = true;
        for (auto r : pool) (in_train[r] ? train_idx : test_idx).push_back(r);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {frame.select_rows(train_idx), frame.select_rows(test_idx)};
}

}  // namespace roadfirst
