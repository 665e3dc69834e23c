#include "perfminer/weak_supervision.hpp"

#include "perfminer/errors.hpp"
#include "perfminer/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace perfminer {

namespace {
constexpr double kAccuracyFloor = 0.05;
constexpr double kAccuracyCeil = 0.95;
constexpr double kPriorFloor = 1e-6;
constexpr double kEmTolerance = 1e-6;
constexpr unsigned kEmMaxIterations = 100;
constexpr double kSubClassifierConfidence = 0.9;
} // namespace

LabelingFunction make_labeling_function(std::string id, HardLabel polarity, std::string pattern) {
    LabelingFunction lf;
    lf.id = std::move(id);
    lf.polarity = polarity;
    lf.pattern = std::move(pattern);
    try {
        lf.compiled = std::regex(lf.pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
        throw ConfigError("labeling function \"" + lf.id + "\": bad pattern /" + lf.pattern +
                          "/: " + e.what());
    }
    return lf;
}

std::vector<LabelingFunction> parse_lf_definitions(std::string_view text) {
    std::vector<LabelingFunction> lfs;
    std::unordered_set<std::string> ids;
    std::istringstream in{std::string(text)};
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        bool blank = body.find_first_not_of(" \t") == std::string::npos;
        if (blank) continue;
        std::size_t t1 = body.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : body.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw ParseError("expected `id<TAB>polarity<TAB>regex`", line_no);
        std::string id = body.substr(0, t1);
        std::string polarity = body.substr(t1 + 1, t2 - t1 - 1);
        std::string pattern = body.substr(t2 + 1);
        // Whitespace before a stripped trailing comment is not part of the
        // regex; use \s or \t to match whitespace at a pattern's end.
        while (!pattern.empty() && (pattern.back() == ' ' || pattern.back() == '\t'))
            pattern.pop_back();
        if (pattern.empty()) throw ParseError("empty regex", line_no);
        if (!ids.insert(id).second) throw ParseError("duplicate labeling function id \"" + id + "\"", line_no);
        lfs.push_back(make_labeling_function(id, hard_label_from_string(polarity), pattern));
    }
    if (lfs.empty()) throw ParseError("labeling function file defines no functions");
    return lfs;
}

std::vector<LabelingFunction> load_lf_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open labeling function file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lf_definitions(buf.str());
}

LfVote apply_lf(const LabelingFunction& lf, const std::string& message) {
    LfVote polarity_vote = lf.polarity == HardLabel::Performance ? LfVote::Performance
                                                                 : LfVote::NonPerformance;
    if (std::regex_search(message, lf.compiled)) return polarity_vote;
    if (!lf.sub_classifier) return LfVote::Abstain;
    double p = predict(*lf.sub_classifier, message).p_performance;
    if (lf.polarity == HardLabel::Performance && p >= kSubClassifierConfidence) return LfVote::Performance;
    if (lf.polarity == HardLabel::NonPerformance && p <= 1.0 - kSubClassifierConfidence)
        return LfVote::NonPerformance;
    return LfVote::Abstain;
}

LfDataset induce_lf_dataset(const LabelingFunction& lf, std::span<const std::string> corpus) {
    if (corpus.empty()) throw DegenerateDataError("induce_lf_dataset: corpus is empty");
    LfDataset out;
    out.examples.reserve(corpus.size());
    std::size_t matches = 0;
    double match_target = lf.polarity == HardLabel::Performance ? 1.0 : 0.0;
    for (const std::string& message : corpus) {
        bool matched = std::regex_search(message, lf.compiled);
        if (matched) ++matches;
        out.examples.push_back({message, SoftLabel{matched ? match_target : 1.0 - match_target}});
    }
    if (matches == 0) {
        out.insufficient = true;
        out.reason = "no corpus message matches /" + lf.pattern + "/";
    } else if (matches == corpus.size()) {
        out.insufficient = true;
        out.reason = "every corpus message matches /" + lf.pattern + "/ (single class)";
    }
    return out;
}

std::vector<LabelingFunction> train_lf_classifiers(std::span<const LabelingFunction> lfs,
                                                   std::span<const std::string> corpus,
                                                   const TrainConfig& config,
                                                   LfTrainReport* report) {
    std::vector<LabelingFunction> out(lfs.begin(), lfs.end());
    for (LabelingFunction& lf : out) {
        LfDataset dataset = induce_lf_dataset(lf, corpus);
        if (dataset.insufficient) {
            if (report) report->skipped.emplace_back(lf.id, dataset.reason);
            continue;
        }
        try {
            lf.sub_classifier = train(dataset.examples, config);
            if (report) report->trained.push_back(lf.id);
        } catch (const Error& e) {
            if (report) report->skipped.emplace_back(lf.id, e.what());
        }
    }
    return out;
}

LfVoteMatrix build_vote_matrix(std::span<const LabelingFunction> lfs,
                               std::span<const std::string> corpus) {
    std::unordered_set<std::string> ids;
    for (const auto& lf : lfs)
        if (!ids.insert(lf.id).second)
            throw ConfigError("duplicate labeling function id \"" + lf.id + "\"");

    LfVoteMatrix matrix;
    matrix.lf_ids.reserve(lfs.size());
    for (const auto& lf : lfs) matrix.lf_ids.push_back(lf.id);
    matrix.rows = corpus.size();
    matrix.entries.resize(corpus.size() * lfs.size(), LfVote::Abstain);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = 0; j < lfs.size(); ++j)
            matrix.entries[i * lfs.size() + j] = apply_lf(lfs[j], corpus[i]);
    return matrix;
}

namespace {

// Posterior P(y=1 | row votes) under the conditionally independent model.
double row_posterior(const LfVoteMatrix& matrix, std::size_t row,
                     const std::vector<double>& acc, double prior, bool* abstained) {
    double l1 = std::log(prior);
    double l0 = std::log(1.0 - prior);
    bool any = false;
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        LfVote v = matrix.at(row, j);
        if (v == LfVote::Abstain) continue;
        any = true;
        if (v == LfVote::Performance) {
            l1 += std::log(acc[j]);
            l0 += std::log(1.0 - acc[j]);
        } else {
            l1 += std::log(1.0 - acc[j]);
            l0 += std::log(acc[j]);
        }
    }
    if (abstained) *abstained = !any;
    if (!any) return prior;
    double m = std::max(l1, l0);
    double z1 = std::exp(l1 - m);
    double z0 = std::exp(l0 - m);
    return z1 / (z1 + z0);
}

} // namespace

LabelModel fit_label_model(const LfVoteMatrix& matrix, LabelModelMode mode,
                           std::vector<double>* ll_trace) {
    if (matrix.rows == 0 || matrix.cols() == 0)
        throw DegenerateDataError("fit_label_model: empty vote matrix");

    LabelModel model;
    model.mode = mode;
    model.lf_ids = matrix.lf_ids;
    if (mode == LabelModelMode::MajorityVote) return model;

    bool any_vote = std::any_of(matrix.entries.begin(), matrix.entries.end(),
                                [](LfVote v) { return v != LfVote::Abstain; });
    if (!any_vote) throw DegenerateDataError("fit_label_model: every vote abstains, nothing to fit");

    const std::size_t n = matrix.rows, m = matrix.cols();
    std::vector<double> acc(m, 0.7);
    double prior = 0.5;
    std::vector<double> posterior(n, 0.5);

    for (unsigned iter = 0; iter < kEmMaxIterations; ++iter) {
        // E-step
        for (std::size_t i = 0; i < n; ++i)
            posterior[i] = row_posterior(matrix, i, acc, prior, nullptr);

        // M-step
        double delta = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double agree = 0.0, total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                LfVote v = matrix.at(i, j);
                if (v == LfVote::Abstain) continue;
                total += 1.0;
                agree += v == LfVote::Performance ? posterior[i] : 1.0 - posterior[i];
            }
            double next = total > 0.0 ? agree / total : acc[j];
            next = std::clamp(next, kAccuracyFloor, kAccuracyCeil);
            delta = std::max(delta, std::abs(next - acc[j]));
            acc[j] = next;
        }
        double mean_post = 0.0;
        for (double p : posterior) mean_post += p;
        mean_post /= static_cast<double>(n);
        mean_post = std::clamp(mean_post, kPriorFloor, 1.0 - kPriorFloor);
        delta = std::max(delta, std::abs(mean_post - prior));
        prior = mean_post;

        model.em_iterations = iter + 1;
        if (ll_trace) {
            LabelModel snapshot;
            snapshot.mode = LabelModelMode::WeightedEM;
            snapshot.accuracies = acc;
            snapshot.class_prior = prior;
            snapshot.lf_ids = matrix.lf_ids;
            ll_trace->push_back(label_model_log_likelihood(snapshot, matrix));
        }
        if (delta < kEmTolerance) break;
    }
    model.accuracies = std::move(acc);
    model.class_prior = prior;
    return model;
}

double label_model_log_likelihood(const LabelModel& model, const LfVoteMatrix& matrix) {
    if (model.mode != LabelModelMode::WeightedEM)
        throw ConfigError("log-likelihood is defined for WeightedEM models only");
    double ll = 0.0;
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        double l1 = std::log(model.class_prior);
        double l0 = std::log(1.0 - model.class_prior);
        bool any = false;
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            LfVote v = matrix.at(i, j);
            if (v == LfVote::Abstain) continue;
            any = true;
            double a = model.accuracies[j];
            if (v == LfVote::Performance) {
                l1 += std::log(a);
                l0 += std::log(1.0 - a);
            } else {
                l1 += std::log(1.0 - a);
                l0 += std::log(a);
            }
        }
        if (!any) continue;
        double m = std::max(l1, l0);
        ll += m + std::log(std::exp(l1 - m) + std::exp(l0 - m));
    }
    return ll;
}

std::vector<SoftLabelResult> predict_soft_labels(const LabelModel& model, const LfVoteMatrix& matrix) {
    if (model.lf_ids.size() != matrix.cols())
        throw ConfigError("label model has " + std::to_string(model.lf_ids.size()) +
                          " labeling functions, matrix has " + std::to_string(matrix.cols()));
    if (model.mode == LabelModelMode::WeightedEM && model.accuracies.size() != matrix.cols())
        throw ConfigError("weighted-em model carries " + std::to_string(model.accuracies.size()) +
                          " accuracies for " + std::to_string(matrix.cols()) + " columns");
    std::vector<SoftLabelResult> out(matrix.rows);
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        if (model.mode == LabelModelMode::MajorityVote) {
            std::size_t pos = 0, voting = 0;
            for (std::size_t j = 0; j < matrix.cols(); ++j) {
                LfVote v = matrix.at(i, j);
                if (v == LfVote::Abstain) continue;
                ++voting;
                if (v == LfVote::Performance) ++pos;
            }
            if (voting == 0)
                out[i] = {SoftLabel{0.5}, true};
            else
                out[i] = {SoftLabel{static_cast<double>(pos) / static_cast<double>(voting)}, false};
        } else {
            bool abstained = false;
            double p = row_posterior(matrix, i, model.accuracies, model.class_prior, &abstained);
            out[i] = {SoftLabel{p}, abstained};
        }
    }
    return out;
}

std::vector<SoftLabeledExample> build_balanced_set(std::span<const std::string> corpus,
                                                   std::span<const SoftLabelResult> soft_labels,
                                                   std::size_t n_per_class,
                                                   std::uint64_t seed) {
    if (corpus.size() != soft_labels.size())
        throw ConfigError("corpus size " + std::to_string(corpus.size()) +
                          " does not match soft label count " + std::to_string(soft_labels.size()));
    std::vector<std::size_t> perf, nonperf;
    for (std::size_t i = 0; i < soft_labels.size(); ++i) {
        if (soft_labels[i].abstained) continue;
        if (soft_labels[i].label.p_performance >= 0.5)
            perf.push_back(i);
        else
            nonperf.push_back(i);
    }
    if (perf.size() < n_per_class || nonperf.size() < n_per_class)
        throw DegenerateDataError("build_balanced_set: need " + std::to_string(n_per_class) +
                                  " per class, available: " + std::to_string(perf.size()) +
                                  " performance, " + std::to_string(nonperf.size()) +
                                  " non-performance");

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(n_per_class * 2);
    for (std::size_t k : rng.sample_indices(perf.size(), n_per_class)) chosen.push_back(perf[k]);
    for (std::size_t k : rng.sample_indices(nonperf.size(), n_per_class)) chosen.push_back(nonperf[k]);
    rng.shuffle(chosen);

    std::vector<SoftLabeledExample> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) out.push_back({corpus[i], soft_labels[i].label});
    return out;
}

void save_label_model(const LabelModel& model, std::ostream& out) {
    nlohmann::json j;
    j["format"] = "perfminer-label-model-v1";
    j["mode"] = model.mode == LabelModelMode::MajorityVote ? "majority-vote" : "weighted-em";
    j["accuracies"] = model.accuracies;
    j["class_prior"] = model.class_prior;
    j["lf_ids"] = model.lf_ids;
    j["em_iterations"] = model.em_iterations;
    out << j.dump() << '\n';
    if (!out) throw IoError("save_label_model: stream write failed");
}

LabelModel load_label_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("label model file is empty");
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("label model file is not valid JSON");
    if (j.value("format", "") != "perfminer-label-model-v1")
        throw ParseError("unsupported label model format tag");
    LabelModel model;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "majority-vote")
        model.mode = LabelModelMode::MajorityVote;
    else if (mode == "weighted-em")
        model.mode = LabelModelMode::WeightedEM;
    else
        throw ParseError("unknown label model mode \"" + mode + "\"");
    model.accuracies = j.at("accuracies").get<std::vector<double>>();
    model.class_prior = j.at("class_prior").get<double>();
    model.lf_ids = j.at("lf_ids").get<std::vector<std::string>>();
    model.em_iterations = j.value("em_iterations", 0u);
    return model;
}

} // namespace perfminer
