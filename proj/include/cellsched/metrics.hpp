#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/workload.hpp"

namespace cellsched {

/// A completed download: (A, T0, Tend).
struct FlowRecord {
    FlowId id = 0;
    double file_size = 0.0;
    Slot arrival = 0;
    Slot departure = 0;

    double sojourn() const noexcept { return static_cast<double>(departure - arrival); }
    double throughput() const noexcept { return file_size / sojourn(); }

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct MetricsReport {
    double alpt = 0.0;
    double log_alpt = 0.0;
    std::uint64_t completed = 0;
    std::uint64_t unfinished = 0;
};

/// Mean perceived throughput (1/N) sum A / (Tend - T0).
inline double alpt(std::span<const FlowRecord> records) {
    if (records.empty()) throw MetricError("ALPT is undefined without completed flows");
    double sum = 0.0;
    for (const auto& r : records) sum += r.throughput();
    return sum / static_cast<double>(records.size());
}

/// (1/N) sum log_base(A / (Tend - T0)); natural log unless base is given.
inline double log_alpt(std::span<const FlowRecord> records, double base = std::numbers::e) {
    if (records.empty()) throw MetricError("logALPT is undefined without completed flows");
    if (!(base > 0.0) || base == 1.0) throw ParameterError("log base must be positive and != 1");
    double sum = 0.0;
    for (const auto& r : records) sum += std::log(r.throughput());
    const double mean = sum / static_cast<double>(records.size());
    return base == std::numbers::e ? mean : mean / std::log(base);
}

inline MetricsReport evaluate(std::span<const FlowRecord> records, std::uint64_t unfinished = 0,
                              double log_base = std::numbers::e) {
    MetricsReport rep;
    rep.completed = records.size();
    rep.unfinished = unfinished;
    if (!records.empty()) {
        rep.alpt = alpt(records);
        rep.log_alpt = log_alpt(records, log_base);
    }
    return rep;
}

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, n - 1 denominator
};

inline Summary summarize(std::span<const double> values) {
    if (values.size() < 2) throw MetricError("aggregation needs at least two replications");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

struct AggregateReport {
    Summary alpt;
    Summary log_alpt;
    Summary completed;
    Summary unfinished;
    std::size_t replications = 0;
};

inline AggregateReport aggregate(std::span<const MetricsReport> reports) {
    if (reports.size() < 2) throw MetricError("aggregation needs at least two replications");
    std::vector<double> a, l, c, u;
    for (const auto& r : reports) {
        a.push_back(r.alpt);
        l.push_back(r.log_alpt);
        c.push_back(static_cast<double>(r.completed));
        u.push_back(static_cast<double>(r.unfinished));
    }
    return {summarize(a), summarize(l), summarize(c), summarize(u), reports.size()};
}

}  // namespace cellsched
