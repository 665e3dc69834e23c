#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/linear_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

namespace perfminer {

// Regex heuristic with abstention. When a sub-classifier is attached it
// generalizes the pattern: confident agreement with the LF's polarity votes,
// anything else abstains.
struct LabelingFunction {
    std::string id;
    std::string pattern;
    HardLabel polarity = HardLabel::Performance;
    std::optional<LinearTextModel> sub_classifier;
    std::regex compiled;
};

// Throws ConfigError if the pattern does not compile.
LabelingFunction make_labeling_function(std::string id, HardLabel polarity, std::string pattern);

// LF definition file: `id <TAB> polarity <TAB> regex`, '#' comments.
std::vector<LabelingFunction> parse_lf_definitions(std::string_view text);
std::vector<LabelingFunction> load_lf_file(const std::string& path);

LfVote apply_lf(const LabelingFunction& lf, const std::string& message);

// Dataset induced by one LF over a corpus: matches take the LF's polarity,
// non-matches the opposite. `insufficient` marks single-class datasets that
// would make training degenerate.
struct LfDataset {
    std::vector<SoftLabeledExample> examples;
    bool insufficient = false;
    std::string reason;
};

LfDataset induce_lf_dataset(const LabelingFunction& lf, std::span<const std::string> corpus);

struct LfTrainReport {
    std::vector<std::string> trained;
    std::vector<std::pair<std::string, std::string>> skipped;  // (id, reason)
};

// Trains one sub-classifier per LF on its induced dataset. LFs with
// insufficient datasets (or per-LF trainer failures) are left untouched and
// reported; the batch never aborts.
std::vector<LabelingFunction> train_lf_classifiers(std::span<const LabelingFunction> lfs,
                                                   std::span<const std::string> corpus,
                                                   const TrainConfig& config,
                                                   LfTrainReport* report = nullptr);

// Row-major n x m vote matrix; column order matches lf_ids.
struct LfVoteMatrix {
    std::vector<std::string> lf_ids;
    std::size_t rows = 0;
    std::vector<LfVote> entries;

    std::size_t cols() const { return lf_ids.size(); }
    LfVote at(std::size_t row, std::size_t col) const { return entries[row * cols() + col]; }
};

LfVoteMatrix build_vote_matrix(std::span<const LabelingFunction> lfs,
                               std::span<const std::string> corpus);

enum class LabelModelMode { MajorityVote, WeightedEM };

struct LabelModel {
    LabelModelMode mode = LabelModelMode::MajorityVote;
    std::vector<double> accuracies;  // per LF, WeightedEM only
    double class_prior = 0.5;
    std::vector<std::string> lf_ids;
    unsigned em_iterations = 0;
};

// MajorityVote needs no fitting. WeightedEM runs EM under a conditionally
// independent LF model: accuracies init 0.7 (clamped to [0.05, 0.95]), prior
// init 0.5, stop at max parameter delta < 1e-6 or 100 iterations.
// Throws DegenerateDataError on an all-abstain matrix. When ll_trace is
// given it receives the observed-data log-likelihood after every iteration.
LabelModel fit_label_model(const LfVoteMatrix& matrix, LabelModelMode mode,
                           std::vector<double>* ll_trace = nullptr);

// Observed-data log-likelihood of a WeightedEM model; abstentions carry no
// likelihood term.
double label_model_log_likelihood(const LabelModel& model, const LfVoteMatrix& matrix);

struct SoftLabelResult {
    SoftLabel label;
    bool abstained = false;  // no LF voted on this row
};

std::vector<SoftLabelResult> predict_soft_labels(const LabelModel& model, const LfVoteMatrix& matrix);

// Uniform sample without replacement of n_per_class rows with p >= 0.5 and
// n_per_class with p < 0.5 (abstained rows excluded); soft targets kept;
// output deterministically shuffled.
std::vector<SoftLabeledExample> build_balanced_set(std::span<const std::string> corpus,
                                                   std::span<const SoftLabelResult> soft_labels,
                                                   std::size_t n_per_class,
                                                   std::uint64_t seed);

void save_label_model(const LabelModel& model, std::ostream& out);
LabelModel load_label_model(std::istream& in);

} // namespace perfminer
