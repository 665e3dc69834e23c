#include "perfminer/distill.hpp"

#include "perfminer/digest.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/weak_supervision.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

namespace perfminer {

using nlohmann::json;

namespace {

std::optional<HardLabel> try_parse_class(const std::string& text) {
    try {
        return parse_class_response(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

} // namespace

TeacherResponse query_teacher(LlmGateway& gateway, const std::string& message,
                              unsigned max_tokens) {
    Completion c = gateway.complete(build_classification_prompt(message), max_tokens);
    TeacherResponse response;
    response.raw_text = c.text;
    if (c.p_performance) {
        double p = *c.p_performance;
        if (!(p >= 0.0 && p <= 1.0))
            throw ParseError("teacher probability " + std::to_string(p) + " outside [0,1]");
        response.p_performance = p;
        response.label = SoftLabel{p}.harden();
        // A parseable text label must agree with the served probability.
        std::optional<HardLabel> from_text = try_parse_class(c.text);
        if (from_text && *from_text != response.label)
            throw ParseError("teacher text \"" + c.text + "\" contradicts probability " +
                             std::to_string(p));
        return response;
    }
    response.label = parse_class_response(c.text);
    return response;
}

SoftLabel teacher_label(LlmGateway& gateway, const std::string& message, unsigned max_tokens) {
    TeacherResponse r = query_teacher(gateway, message, max_tokens);
    if (r.p_performance) return SoftLabel{*r.p_performance};
    return SoftLabel{r.label == HardLabel::Performance ? 1.0 : 0.0};
}

// ----------------------------------------------------------------- cache ----

TeacherCache::TeacherCache(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;  // fresh cache
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("message_sha256"))
            throw ParseError("malformed teacher cache entry", line_no);
        Entry e;
        if (j.contains("p_performance") && !j.at("p_performance").is_null())
            e.p_performance = j.at("p_performance").get<double>();
        e.raw_text = j.value("raw_text", "");
        entries_[j.at("message_sha256").get<std::string>()] = std::move(e);
    }
}

std::optional<TeacherCache::Entry> TeacherCache::lookup(const std::string& message) const {
    auto it = entries_.find(digest::sha256(message).hex());
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void TeacherCache::store(const std::string& message, const Entry& entry) {
    std::string key = digest::sha256(message).hex();
    entries_[key] = entry;
    if (path_.empty()) return;
    json j;
    j["message_sha256"] = key;
    if (entry.p_performance)
        j["p_performance"] = *entry.p_performance;
    else
        j["p_performance"] = nullptr;
    j["raw_text"] = entry.raw_text;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to teacher cache: " + path_);
    out << j.dump() << '\n';
    out.flush();
}

std::size_t TeacherCache::size() const { return entries_.size(); }

// --------------------------------------------------------------- distill ----

std::pair<LinearTextModel, DistillReport> distill(std::span<const std::string> corpus,
                                                  LlmGateway& gateway,
                                                  const DistillOptions& options) {
    if (options.n_per_class == 0) throw ConfigError("n_per_class must be positive");

    DistillReport report;
    report.corpus_size = corpus.size();

    TeacherCache cache = options.cache_path.empty() ? TeacherCache() : TeacherCache(options.cache_path);

    // Per-row teacher outcome; abstained marks skipped messages so the
    // balancer never samples them.
    std::vector<SoftLabelResult> labels(corpus.size(), SoftLabelResult{SoftLabel{0.5}, true});

    std::mutex mutex;  // guards cache and counters
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> stop{false};
    std::string transport_failure;
    std::size_t completed = 0;

    auto worker = [&]() {
        for (;;) {
            if (stop.load()) return;
            std::size_t i = cursor.fetch_add(1);
            if (i >= corpus.size()) return;
            const std::string& message = corpus[i];

            std::optional<TeacherCache::Entry> hit;
            {
                std::lock_guard lock(mutex);
                hit = cache.lookup(message);
            }
            if (hit) {
                std::lock_guard lock(mutex);
                ++report.cache_hits;
                ++completed;
                if (hit->p_performance)
                    labels[i] = {SoftLabel{*hit->p_performance}, false};
                else
                    ++report.skipped;
                continue;
            }

            TeacherCache::Entry entry;
            bool usable = false;
            try {
                TeacherResponse r = query_teacher(gateway, message, options.classify_max_tokens);
                entry.raw_text = r.raw_text;
                entry.p_performance =
                    r.p_performance ? *r.p_performance
                                    : (r.label == HardLabel::Performance ? 1.0 : 0.0);
                usable = true;
            } catch (const ParseError& e) {
                entry.raw_text = e.what();
                entry.p_performance = std::nullopt;
            } catch (const TransportError& e) {
                std::lock_guard lock(mutex);
                transport_failure = e.what();
                stop.store(true);
                return;
            }

            std::lock_guard lock(mutex);
            cache.store(message, entry);
            ++completed;
            if (usable)
                labels[i] = {SoftLabel{*entry.p_performance}, false};
            else
                ++report.skipped;
        }
    };

    unsigned workers = std::max(1u, std::min<unsigned>(options.workers,
                                                       static_cast<unsigned>(corpus.size())));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!transport_failure.empty())
        throw ResumableError("teacher labeling interrupted after " + std::to_string(completed) +
                             " of " + std::to_string(corpus.size()) +
                             " messages (" + transport_failure +
                             "); re-run with the same cache to resume");

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (labels[i].abstained) continue;
        ++report.labeled;
        if (labels[i].label.p_performance >= 0.5)
            ++report.teacher_performance;
        else
            ++report.teacher_non_performance;
    }

    std::vector<SoftLabeledExample> balanced =
        build_balanced_set(corpus, labels, options.n_per_class, options.seed);
    LinearTextModel student = train(balanced, options.train_config);
    report.final_training_loss = mean_loss(student, balanced);
    return {std::move(student), report};
}

} // namespace perfminer
