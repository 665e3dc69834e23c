#include "perfminer/distill.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/evalharness.hpp"
#include "perfminer/weak_supervision.hpp"

#include "support.hpp"

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <sstream>

#include <unistd.h>

using namespace perfminer;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    fs::path p = fs::temp_directory_path() /
                 ("perfminer-distill-" + std::to_string(::getpid()) + "-" + name);
    fs::remove(p);
    return p.string();
}

std::string model_bytes(const LinearTextModel& model) {
    std::ostringstream out;
    save_model(model, out);
    return out.str();
}

} // namespace

TEST_CASE("teacher_label maps text, probabilities, and garbage") {
    GatewayConfig config;
    MockGateway text_only(config, [](const LlmRequest&) {
        return Completion{"performance", std::nullopt};
    });
    CHECK(teacher_label(text_only, "speed up x").p_performance == 1.0);

    MockGateway negative(config, [](const LlmRequest&) {
        return Completion{"non-performance", std::nullopt};
    });
    CHECK(teacher_label(negative, "docs").p_performance == 0.0);

    MockGateway with_probs(config, [](const LlmRequest&) {
        return Completion{"performance", 0.83};
    });
    CHECK(teacher_label(with_probs, "speed up x").p_performance == doctest::Approx(0.83));

    MockGateway garbage(config, [](const LlmRequest&) { return Completion{"banana", std::nullopt}; });
    CHECK_THROWS_AS(teacher_label(garbage, "anything"), ParseError);

    // Probability contradicting the text is unusable, not silently trusted.
    MockGateway contradictory(config, [](const LlmRequest&) {
        return Completion{"performance", 0.2};
    });
    CHECK_THROWS_AS(teacher_label(contradictory, "x"), ParseError);
}

TEST_CASE("teacher cache round trip including failed entries") {
    std::string path = temp_path("cache.jsonl");
    {
        TeacherCache cache(path);
        cache.store("speed up parser", {0.97, "performance"});
        cache.store("weird reply", {std::nullopt, "banana"});
    }
    TeacherCache reloaded(path);
    CHECK(reloaded.size() == 2);
    auto hit = reloaded.lookup("speed up parser");
    REQUIRE(hit.has_value());
    CHECK(*hit->p_performance == doctest::Approx(0.97));
    auto failed = reloaded.lookup("weird reply");
    REQUIRE(failed.has_value());
    CHECK_FALSE(failed->p_performance.has_value());
    CHECK_FALSE(reloaded.lookup("never seen").has_value());
    fs::remove(path);
}

TEST_CASE("distill trains an accurate student from the mock teacher") {
    auto corpus = testsupport::synthetic_corpus(200, 314);
    std::vector<std::string> train_slice(corpus.begin() + 25, corpus.end() - 25);
    std::vector<std::string> holdout;
    holdout.insert(holdout.end(), corpus.begin(), corpus.begin() + 25);
    holdout.insert(holdout.end(), corpus.end() - 25, corpus.end());

    MockGateway teacher = testsupport::oracle_teacher();
    DistillOptions options;
    options.n_per_class = 50;
    options.train_config.seed = 11;
    options.train_config.epochs = 40;
    options.train_config.learning_rate = 0.5;
    options.seed = 21;
    auto [student, report] = distill(train_slice, teacher, options);

    CHECK(report.corpus_size == train_slice.size());
    CHECK(report.labeled == train_slice.size());
    CHECK(report.skipped == 0);
    CHECK(report.teacher_performance >= options.n_per_class);
    CHECK(report.teacher_non_performance >= options.n_per_class);
    CHECK(report.final_training_loss < std::log(2.0));

    std::vector<HardLabel> pred, truth;
    for (const std::string& message : holdout) {
        pred.push_back(classify(student, message));
        truth.push_back(testsupport::oracle_is_performance(message) ? HardLabel::Performance
                                                                    : HardLabel::NonPerformance);
    }
    MetricsReport m = metrics(confusion(pred, truth, HardLabel::Performance));
    REQUIRE(m.positive.f1.has_value());
    CHECK(*m.positive.f1 >= 0.95);

    // Every teacher request went out at temperature 0 with the 5-token cap.
    for (const auto& request : teacher.requests()) {
        CHECK(request.temperature == 0.0);
        CHECK(request.max_tokens == 5);
    }
}

TEST_CASE("balance is exact in the training set") {
    auto corpus = testsupport::synthetic_corpus(120, 99);
    MockGateway teacher = testsupport::oracle_teacher();
    std::vector<SoftLabelResult> labels;
    for (const auto& message : corpus)
        labels.push_back({teacher_label(teacher, message), false});
    auto balanced = build_balanced_set(corpus, labels, 30, 5);
    std::size_t perf = 0;
    for (const auto& ex : balanced)
        if (ex.target.p_performance >= 0.5) ++perf;
    CHECK(balanced.size() == 60);
    CHECK(perf == 30);
}

TEST_CASE("insufficient teacher positives is a hard error with counts") {
    std::vector<std::string> corpus;
    for (int i = 0; i < 40; ++i) corpus.push_back("update docs section " + std::to_string(i));
    corpus.push_back("speed up the parser");

    MockGateway teacher = testsupport::oracle_teacher();
    DistillOptions options;
    options.n_per_class = 10;
    CHECK_THROWS_AS(distill(corpus, teacher, options), DegenerateDataError);
}

TEST_CASE("cache idempotence: one teacher query per distinct message") {
    auto corpus = testsupport::synthetic_corpus(60, 7);
    // Duplicate every message; the teacher must still see each once.
    std::vector<std::string> doubled = corpus;
    doubled.insert(doubled.end(), corpus.begin(), corpus.end());

    std::string cache_path = temp_path("idem.jsonl");
    MockGateway teacher = testsupport::oracle_teacher();
    DistillOptions options;
    options.n_per_class = 20;
    options.train_config.seed = 1;
    options.seed = 2;
    options.cache_path = cache_path;
    options.workers = 1;  // serial so the first occurrence populates the cache
    distill(doubled, teacher, options);
    CHECK(teacher.requests().size() == corpus.size());

    // A rerun over the same lineage queries nothing.
    MockGateway second = testsupport::oracle_teacher();
    distill(doubled, second, options);
    CHECK(second.requests().empty());
    fs::remove(cache_path);
}

TEST_CASE("interrupted run resumes from the cache to an identical model") {
    auto corpus = testsupport::synthetic_corpus(100, 2718);
    DistillOptions options;
    options.n_per_class = 25;
    options.train_config.seed = 5;
    options.train_config.epochs = 30;
    options.train_config.learning_rate = 0.5;
    options.seed = 9;
    options.workers = 1;

    // Uninterrupted reference run, no cache.
    MockGateway reference = testsupport::oracle_teacher();
    auto [clean_model, clean_report] = distill(corpus, reference, options);

    // Outage after 50 calls.
    std::string cache_path = temp_path("resume.jsonl");
    options.cache_path = cache_path;
    std::atomic<int> calls{0};
    MockGateway flaky(GatewayConfig{}, [&](const LlmRequest& request) {
        if (++calls > 50) throw TransportError("gateway down", false);
        return Completion{testsupport::oracle_is_performance(
                              extract_message_from_classification_prompt(request.prompt))
                              ? "performance"
                              : "non-performance",
                          std::nullopt};
    });
    CHECK_THROWS_AS(distill(corpus, flaky, options), ResumableError);

    // Resume with a healthy gateway and the same cache.
    MockGateway healthy = testsupport::oracle_teacher();
    auto [resumed_model, resumed_report] = distill(corpus, healthy, options);
    CHECK(healthy.requests().size() == corpus.size() - 50);
    CHECK(model_bytes(resumed_model) == model_bytes(clean_model));
    CHECK(resumed_report.final_training_loss == clean_report.final_training_loss);
    fs::remove(cache_path);
}
