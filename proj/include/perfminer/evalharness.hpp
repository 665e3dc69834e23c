#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace perfminer {

// Confusion cells with respect to a declared positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::uint64_t total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion(std::span<const HardLabel> pred, std::span<const HardLabel> truth,
                          HardLabel positive);

// Metrics with undefined denominators reported as absent, never coerced to 0.
struct ClassMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fpr;
};

ClassMetrics class_metrics(const ConfusionCounts& c);

struct MetricsReport {
    double accuracy = 0.0;
    ClassMetrics positive;  // the declared positive class
    ClassMetrics negative;  // roles swapped
};

MetricsReport metrics(const ConfusionCounts& c);

// n items x k categories; cell = raters assigning that category.
struct RatingMatrix {
    std::uint32_t raters_per_item = 0;
    std::vector<std::vector<std::uint32_t>> counts;
};

// Fleiss' kappa. Throws DegenerateDataError when every rating falls in one
// category (chance agreement 1, kappa undefined).
double fleiss_kappa(const RatingMatrix& m);

// Strict majority per item; rater count must be odd.
std::vector<HardLabel> adjudicate(std::span<const std::vector<HardLabel>> rater_labels);

struct TTestResult {
    double t = 0.0;
    unsigned df = 0;
    double p = 1.0;  // two-tailed
};

// Paired t-test with sample standard deviation (n-1).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Cochran sample size n = round(z^2 * p(1-p) / margin^2), nearest integer.
// margin may be 1.0 (degenerate, documented); confidence in (0,1).
std::uint64_t required_sample_size(double confidence, double margin, double proportion = 0.5);

// Uniform without replacement per stratum; output grouped by stratum in
// first-appearance order, pool order kept within each stratum.
template <typename Item>
std::vector<Item> stratified_sample(std::span<const std::pair<Item, std::string>> pool,
                                    std::size_t n_per_stratum, std::uint64_t seed);

struct ThroughputRun {
    std::uint64_t tokens = 0;
    double seconds = 0.0;
};

struct ThroughputResult {
    std::vector<ThroughputRun> runs;  // the 5 measured runs, warm-up excluded
    double mean_tokens_per_second = 0.0;  // mean of per-run ratios
    std::string token_counter_name;
};

using TextClassifier = std::function<HardLabel(const std::string&)>;
using TokenCounter = std::function<std::uint64_t(const std::string&)>;
using BenchClock = std::function<double()>;  // seconds, monotone

// Runs the classifier over the whole dataset once for warm-up, then five
// measured times. All classifiers are billed the same token total from the
// shared counter, which is what makes keyword filtering comparable.
ThroughputResult bench_throughput(const TextClassifier& classifier,
                                  std::span<const std::string> dataset,
                                  const TokenCounter& token_counter,
                                  const std::string& counter_name = "whitespace",
                                  BenchClock clock = {});

std::uint64_t whitespace_token_count(const std::string& text);

// ------------------------------------------------------------ template ----

template <typename Item>
std::vector<Item> stratified_sample(std::span<const std::pair<Item, std::string>> pool,
                                    std::size_t n_per_stratum, std::uint64_t seed) {
    std::vector<std::string> order;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const std::string& stratum = pool[i].second;
        std::size_t s = 0;
        for (; s < order.size(); ++s)
            if (order[s] == stratum) break;
        if (s == order.size()) {
            order.push_back(stratum);
            members.emplace_back();
        }
        members[s].push_back(i);
    }
    Rng rng(seed);
    std::vector<Item> out;
    out.reserve(order.size() * n_per_stratum);
    for (std::size_t s = 0; s < order.size(); ++s) {
        if (members[s].size() < n_per_stratum)
            throw DegenerateDataError("stratum \"" + order[s] + "\" has " +
                                      std::to_string(members[s].size()) + " members, need " +
                                      std::to_string(n_per_stratum));
        std::vector<std::size_t> picks = rng.sample_indices(members[s].size(), n_per_stratum);
        std::sort(picks.begin(), picks.end());
        for (std::size_t k : picks) out.push_back(pool[members[s][k]].first);
    }
    return out;
}

} // namespace perfminer
