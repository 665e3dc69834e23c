#include "perfminer/evalharness.hpp"

#include "perfminer/stats.hpp"

#include <chrono>
#include <cmath>

namespace perfminer {

ConfusionCounts confusion(std::span<const HardLabel> pred, std::span<const HardLabel> truth,
                          HardLabel positive) {
    if (pred.size() != truth.size())
        throw ConfigError("confusion: " + std::to_string(pred.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " truth labels");
    if (pred.empty()) throw ConfigError("confusion: empty label vectors");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        bool p = pred[i] == positive;
        bool t = truth[i] == positive;
        if (p && t)
            ++c.tp;
        else if (p && !t)
            ++c.fp;
        else if (!p && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

ClassMetrics class_metrics(const ConfusionCounts& c) {
    ClassMetrics m;
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.fp + c.tn > 0) m.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    if (m.precision && m.recall) {
        double sum = *m.precision + *m.recall;
        m.f1 = sum > 0.0 ? 2.0 * *m.precision * *m.recall / sum : 0.0;
    }
    return m;
}

MetricsReport metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw ConfigError("metrics: all confusion counts are zero");
    MetricsReport report;
    report.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    report.positive = class_metrics(c);
    report.negative = class_metrics(ConfusionCounts{c.tn, c.fn, c.fp, c.tp});
    return report;
}

double fleiss_kappa(const RatingMatrix& m) {
    const std::size_t n = m.counts.size();
    const std::uint32_t r = m.raters_per_item;
    if (r < 2) throw ConfigError("fleiss_kappa: needs at least 2 raters per item");
    if (n < 2) throw ConfigError("fleiss_kappa: needs at least 2 items");
    const std::size_t k = m.counts.front().size();

    std::vector<double> category_totals(k, 0.0);
    double p_bar = 0.0;
    for (const auto& row : m.counts) {
        if (row.size() != k) throw ConfigError("fleiss_kappa: ragged rating matrix");
        std::uint64_t row_sum = 0, sq = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += row[j];
            sq += static_cast<std::uint64_t>(row[j]) * row[j];
            category_totals[j] += row[j];
        }
        if (row_sum != r)
            throw ValidationError("fleiss_kappa: row sums to " + std::to_string(row_sum) +
                                  ", expected " + std::to_string(r));
        p_bar += (static_cast<double>(sq) - r) / (static_cast<double>(r) * (r - 1));
    }
    p_bar /= static_cast<double>(n);

    double p_e = 0.0;
    for (double total : category_totals) {
        double p_j = total / (static_cast<double>(n) * r);
        p_e += p_j * p_j;
    }
    if (p_e >= 1.0)
        throw DegenerateDataError("fleiss_kappa: all ratings fall in one category, kappa undefined");
    return (p_bar - p_e) / (1.0 - p_e);
}

std::vector<HardLabel> adjudicate(std::span<const std::vector<HardLabel>> rater_labels) {
    std::vector<HardLabel> out;
    out.reserve(rater_labels.size());
    for (std::size_t i = 0; i < rater_labels.size(); ++i) {
        const auto& raters = rater_labels[i];
        if (raters.empty() || raters.size() % 2 == 0)
            throw ConfigError("adjudicate: item " + std::to_string(i) + " has " +
                              std::to_string(raters.size()) + " raters, need an odd count");
        std::size_t perf = 0;
        for (HardLabel l : raters)
            if (l == HardLabel::Performance) ++perf;
        out.push_back(perf * 2 > raters.size() ? HardLabel::Performance
                                               : HardLabel::NonPerformance);
    }
    return out;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ConfigError("paired_t_test: series lengths differ");
    const std::size_t n = a.size();
    if (n < 2) throw ConfigError("paired_t_test: needs at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0)
        throw DegenerateDataError("paired_t_test: all differences identical, zero variance");

    TTestResult result;
    result.df = static_cast<unsigned>(n - 1);
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p = stats::student_t_two_tailed_p(result.t, static_cast<double>(result.df));
    return result;
}

std::uint64_t required_sample_size(double confidence, double margin, double proportion) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ConfigError("confidence must lie in (0,1)");
    if (!(margin > 0.0 && margin <= 1.0)) throw ConfigError("margin must lie in (0,1]");
    if (!(proportion > 0.0 && proportion < 1.0))
        throw ConfigError("proportion must lie in (0,1)");
    double z = stats::normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    double n = z * z * proportion * (1.0 - proportion) / (margin * margin);
    return static_cast<std::uint64_t>(std::llround(n));
}

std::uint64_t whitespace_token_count(const std::string& text) {
    std::uint64_t count = 0;
    bool in_token = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

ThroughputResult bench_throughput(const TextClassifier& classifier,
                                  std::span<const std::string> dataset,
                                  const TokenCounter& token_counter,
                                  const std::string& counter_name, BenchClock clock) {
    if (dataset.empty()) throw ConfigError("bench_throughput: empty dataset");
    if (!clock)
        clock = [] {
            return std::chrono::duration<double>(
                       std::chrono::steady_clock::now().time_since_epoch())
                .count();
        };

    // Equivalent-token accounting: the same counter prices every classifier,
    // keyword filters included.
    std::uint64_t total_tokens = 0;
    for (const std::string& m : dataset) total_tokens += token_counter(m);

    auto run_all = [&] {
        for (const std::string& m : dataset) {
            volatile HardLabel sink = classifier(m);
            (void)sink;
        }
    };

    run_all();  // warm-up, not recorded

    ThroughputResult result;
    result.token_counter_name = counter_name;
    result.runs.reserve(5);
    double ratio_sum = 0.0;
    for (int run = 0; run < 5; ++run) {
        double start = clock();
        run_all();
        double seconds = clock() - start;
        if (!(seconds > 0.0))
            throw Error("bench_throughput: clock did not advance during run " +
                        std::to_string(run + 1));
        result.runs.push_back({total_tokens, seconds});
        ratio_sum += static_cast<double>(total_tokens) / seconds;
    }
    result.mean_tokens_per_second = ratio_sum / 5.0;
    return result;
}

} // namespace perfminer
