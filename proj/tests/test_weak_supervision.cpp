#include "perfminer/errors.hpp"
#include "perfminer/rng.hpp"
#include "perfminer/weak_supervision.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace perfminer;

namespace {

// Independent of predict_soft_labels: plain vote counting.
double majority_oracle(const std::vector<LfVote>& row, bool& abstained) {
    int pos = 0, voting = 0;
    for (LfVote v : row) {
        if (v == LfVote::Abstain) continue;
        ++voting;
        if (v == LfVote::Performance) ++pos;
    }
    abstained = voting == 0;
    return voting == 0 ? 0.5 : static_cast<double>(pos) / voting;
}

LfVoteMatrix matrix_from_rows(const std::vector<std::vector<LfVote>>& rows) {
    LfVoteMatrix m;
    m.rows = rows.size();
    for (std::size_t j = 0; j < rows.front().size(); ++j)
        m.lf_ids.push_back("lf" + std::to_string(j));
    for (const auto& row : rows)
        m.entries.insert(m.entries.end(), row.begin(), row.end());
    return m;
}

} // namespace

TEST_CASE("apply_lf: match, abstain, polarity") {
    LabelingFunction perf = make_labeling_function("speed", HardLabel::Performance, "speed.?up");
    CHECK(apply_lf(perf, "huge speedup in parser") == LfVote::Performance);
    CHECK(apply_lf(perf, "update readme") == LfVote::Abstain);

    LabelingFunction nonperf = make_labeling_function("typo", HardLabel::NonPerformance, "fix typo");
    CHECK(apply_lf(nonperf, "Fix typo in docs") == LfVote::NonPerformance);
}

TEST_CASE("apply_lf generalizes through a confident sub-classifier") {
    std::vector<SoftLabeledExample> corpus;
    for (int i = 0; i < 60; ++i) {
        corpus.push_back({"fast cache speedup path " + std::to_string(i % 5), SoftLabel{1.0}});
        corpus.push_back({"update readme docs page " + std::to_string(i % 5), SoftLabel{0.0}});
    }
    TrainConfig config;
    config.seed = 17;
    config.epochs = 40;
    config.learning_rate = 0.5;
    LabelingFunction lf = make_labeling_function("gate", HardLabel::Performance, "zz_never_matches");
    lf.sub_classifier = train(corpus, config);

    // No regex match anywhere; the classifier decides at the 0.9 gate.
    CHECK(apply_lf(lf, "fast cache speedup path 2") == LfVote::Performance);
    CHECK(apply_lf(lf, "update readme docs page 3") == LfVote::Abstain);
}

TEST_CASE("bad patterns and duplicate ids are configuration errors") {
    CHECK_THROWS_AS(make_labeling_function("bad", HardLabel::Performance, "(unclosed"),
                    ConfigError);
    CHECK_THROWS_AS(parse_lf_definitions("a\tperformance\tx\na\tperformance\ty\n"), ParseError);
    CHECK_THROWS_AS(parse_lf_definitions("only-two-fields\tperformance\n"), ParseError);
}

TEST_CASE("the shipped labeling function file loads with 71 entries") {
    auto lfs = load_lf_file(std::string(PERFMINER_DATA_DIR) + "/labeling_functions.tsv");
    CHECK(lfs.size() == 71);
    std::set<std::string> ids;
    std::size_t perf = 0;
    for (const auto& lf : lfs) {
        ids.insert(lf.id);
        if (lf.polarity == HardLabel::Performance) ++perf;
    }
    CHECK(ids.size() == 71);
    CHECK(perf > 0);
    CHECK(perf < 71);

    // The seed patterns behave on the canonical examples.
    LfVoteMatrix m = build_vote_matrix(lfs, std::vector<std::string>{
                                                "vs opencl speedup for bilateral filter"});
    bool any_perf_vote = false;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m.at(0, j) == LfVote::Performance) any_perf_vote = true;
    CHECK(any_perf_vote);
}

TEST_CASE("induce_lf_dataset targets and insufficiency flags") {
    LabelingFunction lf = make_labeling_function("s", HardLabel::Performance, "speedup");
    std::vector<std::string> corpus = {"speedup x", "docs"};
    LfDataset d = induce_lf_dataset(lf, corpus);
    CHECK_FALSE(d.insufficient);
    REQUIRE(d.examples.size() == 2);
    CHECK(d.examples[0].target.p_performance == 1.0);
    CHECK(d.examples[1].target.p_performance == 0.0);

    std::vector<std::string> no_match = {"docs", "more docs"};
    CHECK(induce_lf_dataset(lf, no_match).insufficient);

    std::vector<std::string> all_match = {"speedup a", "speedup b"};
    CHECK(induce_lf_dataset(lf, all_match).insufficient);

    LabelingFunction np = make_labeling_function("t", HardLabel::NonPerformance, "typo");
    LfDataset dn = induce_lf_dataset(np, corpus = {"fix typo", "speedup x"});
    CHECK(dn.examples[0].target.p_performance == 0.0);
    CHECK(dn.examples[1].target.p_performance == 1.0);
}

TEST_CASE("train_lf_classifiers trains what it can and reports the rest") {
    std::vector<std::string> corpus;
    for (int i = 0; i < 50; ++i) {
        corpus.push_back("speedup in module " + std::to_string(i % 5));
        corpus.push_back("fix typo in chapter " + std::to_string(i % 5));
    }
    std::vector<LabelingFunction> lfs;
    lfs.push_back(make_labeling_function("perf", HardLabel::Performance, "speedup"));
    lfs.push_back(make_labeling_function("typo", HardLabel::NonPerformance, "typo"));
    lfs.push_back(make_labeling_function("dead", HardLabel::Performance, "zz_no_such_word"));

    TrainConfig config;
    config.seed = 23;
    LfTrainReport report;
    auto out = train_lf_classifiers(lfs, corpus, config, &report);
    REQUIRE(out.size() == 3);
    CHECK(out[0].sub_classifier.has_value());
    CHECK(out[1].sub_classifier.has_value());
    CHECK_FALSE(out[2].sub_classifier.has_value());
    CHECK(report.trained == std::vector<std::string>{"perf", "typo"});
    REQUIRE(report.skipped.size() == 1);
    CHECK(report.skipped[0].first == "dead");

    // Each trained sub-classifier scores well on its own induced dataset.
    for (int idx : {0, 1}) {
        LfDataset d = induce_lf_dataset(lfs[idx], corpus);
        std::size_t correct = 0;
        for (const auto& ex : d.examples) {
            HardLabel got = classify(*out[idx].sub_classifier, ex.message);
            if (got == ex.target.harden()) ++correct;
        }
        CHECK(static_cast<double>(correct) / d.examples.size() >= 0.9);
    }

    CHECK(train_lf_classifiers({}, corpus, config).empty());
}

TEST_CASE("build_vote_matrix is the per-cell apply_lf") {
    std::vector<LabelingFunction> lfs;
    lfs.push_back(make_labeling_function("p", HardLabel::Performance, "speedup"));
    lfs.push_back(make_labeling_function("n", HardLabel::NonPerformance, "typo"));
    std::vector<std::string> corpus = {"speedup and typo", "nothing here", "typo only"};

    LfVoteMatrix m = build_vote_matrix(lfs, corpus);
    REQUIRE(m.rows == 3);
    REQUIRE(m.cols() == 2);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            CHECK(m.at(i, j) == apply_lf(lfs[j], corpus[i]));

    std::vector<LabelingFunction> dup;
    dup.push_back(make_labeling_function("x", HardLabel::Performance, "a"));
    dup.push_back(make_labeling_function("x", HardLabel::Performance, "b"));
    CHECK_THROWS_AS(build_vote_matrix(dup, corpus), ConfigError);
}

TEST_CASE("majority vote equals the enumeration oracle on every row shape") {
    // Row-wise exhaustive sweep: every vote combination for m = 1..4.
    for (std::size_t m = 1; m <= 4; ++m) {
        std::size_t total = 1;
        for (std::size_t j = 0; j < m; ++j) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<LfVote> row;
            std::size_t c = code;
            for (std::size_t j = 0; j < m; ++j) {
                row.push_back(static_cast<LfVote>(static_cast<int>(c % 3) - 1));
                c /= 3;
            }
            LfVoteMatrix matrix = matrix_from_rows({row});
            LabelModel model = fit_label_model(matrix, LabelModelMode::MajorityVote);
            auto got = predict_soft_labels(model, matrix);
            bool abstained = false;
            double expected = majority_oracle(row, abstained);
            CHECK(got[0].label.p_performance == expected);
            CHECK(got[0].abstained == abstained);
        }
    }

    // Random multi-row matrices up to 6x4.
    Rng rng(31337);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + rng.bounded(6), m = 1 + rng.bounded(4);
        std::vector<std::vector<LfVote>> rows(n);
        for (auto& row : rows)
            for (std::size_t j = 0; j < m; ++j)
                row.push_back(static_cast<LfVote>(static_cast<int>(rng.bounded(3)) - 1));
        LfVoteMatrix matrix = matrix_from_rows(rows);
        LabelModel model = fit_label_model(matrix, LabelModelMode::MajorityVote);
        auto got = predict_soft_labels(model, matrix);
        for (std::size_t i = 0; i < n; ++i) {
            bool abstained = false;
            CHECK(got[i].label.p_performance == majority_oracle(rows[i], abstained));
            CHECK(got[i].abstained == abstained);
        }
    }
}

TEST_CASE("spec vote examples") {
    LfVoteMatrix m = matrix_from_rows({{LfVote::Performance, LfVote::Performance,
                                        LfVote::Abstain, LfVote::NonPerformance}});
    auto out = predict_soft_labels(fit_label_model(m, LabelModelMode::MajorityVote), m);
    CHECK(out[0].label.p_performance == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(out[0].abstained);

    LfVoteMatrix all_abstain = matrix_from_rows({{LfVote::Abstain, LfVote::Abstain}});
    auto out2 = predict_soft_labels(fit_label_model(all_abstain, LabelModelMode::MajorityVote),
                                    all_abstain);
    CHECK(out2[0].label.p_performance == 0.5);
    CHECK(out2[0].abstained);

    LfVoteMatrix single = matrix_from_rows({{LfVote::Performance}});
    auto out3 = predict_soft_labels(fit_label_model(single, LabelModelMode::MajorityVote), single);
    CHECK(out3[0].label.p_performance == 1.0);
}

TEST_CASE("adding an all-abstain column changes no majority probability") {
    Rng rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + rng.bounded(6), m = 1 + rng.bounded(3);
        std::vector<std::vector<LfVote>> rows(n), extended(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j)
                rows[i].push_back(static_cast<LfVote>(static_cast<int>(rng.bounded(3)) - 1));
            extended[i] = rows[i];
            extended[i].push_back(LfVote::Abstain);
        }
        LfVoteMatrix a = matrix_from_rows(rows), b = matrix_from_rows(extended);
        auto pa = predict_soft_labels(fit_label_model(a, LabelModelMode::MajorityVote), a);
        auto pb = predict_soft_labels(fit_label_model(b, LabelModelMode::MajorityVote), b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(pa[i].label.p_performance == pb[i].label.p_performance);
    }
}

TEST_CASE("weighted EM finds the reliable labeling function") {
    // LF0 tracks the truth closely, LF3 is a coin flip.
    Rng rng(808);
    std::vector<std::vector<LfVote>> rows;
    for (int i = 0; i < 500; ++i) {
        bool truth = rng.bounded(2) == 1;
        auto vote = [&](double accuracy) {
            bool correct = rng.next_double() < accuracy;
            bool v = correct == truth;
            return v ? LfVote::Performance : LfVote::NonPerformance;
        };
        rows.push_back({vote(0.9), vote(0.8), vote(0.8), vote(0.5)});
    }
    LfVoteMatrix matrix = matrix_from_rows(rows);
    LabelModel model = fit_label_model(matrix, LabelModelMode::WeightedEM);
    REQUIRE(model.accuracies.size() == 4);
    CHECK(model.accuracies[0] > model.accuracies[3]);
    CHECK(model.accuracies[0] > 0.8);
    CHECK(model.accuracies[3] < 0.65);
}

TEST_CASE("EM log-likelihood is non-decreasing across iterations") {
    Rng rng(4242);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<LfVote>> rows;
        for (int i = 0; i < 200; ++i) {
            bool truth = rng.bounded(2) == 1;
            std::vector<LfVote> row;
            for (int j = 0; j < 5; ++j) {
                if (rng.next_double() < 0.35) {
                    row.push_back(LfVote::Abstain);
                    continue;
                }
                double acc = 0.55 + 0.08 * j;
                bool correct = rng.next_double() < acc;
                row.push_back(correct == truth ? LfVote::Performance : LfVote::NonPerformance);
            }
            rows.push_back(row);
        }
        LfVoteMatrix matrix = matrix_from_rows(rows);
        std::vector<double> trace;
        fit_label_model(matrix, LabelModelMode::WeightedEM, &trace);
        REQUIRE(trace.size() >= 2);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9);
    }
}

TEST_CASE("all-abstain matrix cannot be fitted") {
    LfVoteMatrix m = matrix_from_rows({{LfVote::Abstain}, {LfVote::Abstain}});
    CHECK_THROWS_AS(fit_label_model(m, LabelModelMode::WeightedEM), DegenerateDataError);
}

TEST_CASE("balanced set: counts, determinism, and shortage errors") {
    std::vector<std::string> corpus;
    std::vector<SoftLabelResult> labels;
    for (int i = 0; i < 10; ++i) {
        corpus.push_back("perf " + std::to_string(i));
        labels.push_back({SoftLabel{0.6 + 0.01 * i}, false});
    }
    for (int i = 0; i < 10; ++i) {
        corpus.push_back("other " + std::to_string(i));
        labels.push_back({SoftLabel{0.3 - 0.01 * i}, false});
    }
    corpus.push_back("abstained row");
    labels.push_back({SoftLabel{0.9}, true});

    auto set = build_balanced_set(corpus, labels, 5, 99);
    CHECK(set.size() == 10);
    std::size_t perf = 0;
    for (const auto& ex : set) {
        if (ex.target.p_performance >= 0.5) ++perf;
        CHECK(ex.message != "abstained row");
        // Soft targets survive; nothing got hardened.
        CHECK(ex.target.p_performance != 1.0);
        CHECK(ex.target.p_performance != 0.0);
    }
    CHECK(perf == 5);

    auto again = build_balanced_set(corpus, labels, 5, 99);
    REQUIRE(again.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(again[i].message == set[i].message);
        CHECK(again[i].target == set[i].target);
    }

    try {
        build_balanced_set(corpus, labels, 11, 99);
        FAIL("expected DegenerateDataError");
    } catch (const DegenerateDataError& e) {
        CHECK(std::string(e.what()).find("available: 10") != std::string::npos);
    }
}

TEST_CASE("label model save and load round trip") {
    LfVoteMatrix m = matrix_from_rows({{LfVote::Performance, LfVote::NonPerformance},
                                       {LfVote::Performance, LfVote::Performance}});
    LabelModel model = fit_label_model(m, LabelModelMode::WeightedEM);
    std::ostringstream out;
    save_label_model(model, out);
    std::istringstream in(out.str());
    LabelModel back = load_label_model(in);
    CHECK(back.mode == model.mode);
    CHECK(back.accuracies == model.accuracies);
    CHECK(back.class_prior == model.class_prior);
    CHECK(back.lf_ids == model.lf_ids);
}
