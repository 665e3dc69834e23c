// perfminer: mine, label, train, categorize, and evaluate performance
// bug-fix commits. One binary so distributed workers and the merge step
// share a single versioned artifact. See README.md for the pipeline.

#include "perfminer/categorize.hpp"
#include "perfminer/commit.hpp"
#include "perfminer/distill.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/evalharness.hpp"
#include "perfminer/jsonl.hpp"
#include "perfminer/keyword.hpp"
#include "perfminer/linear_model.hpp"
#include "perfminer/llm_gateway.hpp"
#include "perfminer/miner.hpp"
#include "perfminer/pipeline_config.hpp"
#include "perfminer/taxonomy.hpp"
#include "perfminer/weak_supervision.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

using namespace perfminer;
namespace fs = std::filesystem;

namespace {

struct CliState {
    std::string config_path;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    PipelineConfig config;

    void load() {
        if (!config_path.empty())
            config = load_pipeline_config(config_path);
        else
            config.gateway = gateway_config_from_env(config.gateway);
        if (seed_set) {
            config.seed = seed_override;
            config.train.seed = seed_override;
        }
        if (config.config_hash.empty()) config.config_hash = "default";
    }

    KeywordList keywords() const {
        if (!config.paths.keywords.empty()) return load_keyword_file(config.paths.keywords);
        return default_keywords();
    }
    std::vector<LabelingFunction> lfs() const {
        if (!config.paths.lfs.empty()) return load_lf_file(config.paths.lfs);
        throw ConfigError("no labeling function file configured (paths.lfs)");
    }
    Taxonomy taxonomy() const {
        if (!config.paths.taxonomy.empty()) return load_taxonomy_file(config.paths.taxonomy);
        return default_taxonomy();
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// Corpus files: .jsonl records (message field) or plain text, one message
// per line.
std::vector<std::string> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus: " + path);
    std::vector<std::string> corpus;
    if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
        for_each_record(in, [&](const CommitRecord& r) { corpus.push_back(r.message); });
    } else {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) corpus.push_back(line);
        }
    }
    if (corpus.empty()) throw ConfigError("corpus is empty: " + path);
    return corpus;
}

struct ManifestRow {
    std::string path;
    std::string repo_id;
    Language language = Language::Python;
    std::uint64_t stars = 0;
};

std::string repo_id_from_url(const std::string& url) {
    std::string trimmed = url;
    if (trimmed.size() > 4 && trimmed.substr(trimmed.size() - 4) == ".git")
        trimmed.resize(trimmed.size() - 4);
    while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
    std::size_t last = trimmed.rfind('/');
    if (last == std::string::npos) return trimmed;
    std::size_t prev = trimmed.rfind('/', last - 1);
    return prev == std::string::npos ? trimmed.substr(last + 1) : trimmed.substr(prev + 1);
}

// Manifest CSV: url,language,stars. The url column is a local clone path
// (file:// accepted); acquiring clones is outside this tool.
std::vector<ManifestRow> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path);
    std::vector<ManifestRow> rows;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("url,", 0) == 0) continue;  // header
        std::size_t c1 = line.find(',');
        std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw ParseError("manifest expects `url,language,stars`", line_no);
        ManifestRow row;
        row.path = line.substr(0, c1);
        if (row.path.rfind("file://", 0) == 0) row.path = row.path.substr(7);
        row.repo_id = repo_id_from_url(row.path);
        row.language = language_from_string(line.substr(c1 + 1, c2 - c1 - 1));
        row.stars = std::stoull(line.substr(c2 + 1));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<HardLabel> load_label_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open label file: " + path);
    std::vector<HardLabel> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        labels.push_back(hard_label_from_string(line));
    }
    return labels;
}

std::vector<double> load_number_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open series file: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        values.push_back(std::stod(line));
    }
    return values;
}

void print_metric(std::ostream& out, const std::optional<double>& m) {
    if (m)
        out << *m;
    else
        out << "n/a";
}

void write_metrics_csv(const MetricsReport& m, const PipelineConfig& config, std::ostream& out) {
    out << provenance_comment(config) << '\n';
    out << "class,precision,recall,f1,fpr,accuracy\n";
    auto row = [&](const char* name, const ClassMetrics& cm) {
        out << name << ',';
        print_metric(out, cm.precision);
        out << ',';
        print_metric(out, cm.recall);
        out << ',';
        print_metric(out, cm.f1);
        out << ',';
        print_metric(out, cm.fpr);
        out << ',' << m.accuracy << '\n';
    };
    row("performance", m.positive);
    row("non-performance", m.negative);
}

void print_metrics_table(const MetricsReport& m, std::ostream& out) {
    auto cell = [&](const std::optional<double>& v) {
        char buf[16];
        if (v)
            std::snprintf(buf, sizeof(buf), "%9.4f", *v);
        else
            std::snprintf(buf, sizeof(buf), "%9s", "n/a");
        return std::string(buf);
    };
    out << "class             precision    recall        f1       fpr  accuracy\n";
    out << "performance      " << cell(m.positive.precision) << ' ' << cell(m.positive.recall)
        << ' ' << cell(m.positive.f1) << ' ' << cell(m.positive.fpr) << ' '
        << cell(m.accuracy) << '\n';
    out << "non-performance  " << cell(m.negative.precision) << ' ' << cell(m.negative.recall)
        << ' ' << cell(m.negative.f1) << ' ' << cell(m.negative.fpr) << ' '
        << cell(m.accuracy) << '\n';
}

// Deterministic mock categorizer for --mock runs: routes by message keywords
// onto valid taxonomy pairs. Only the commit blocks are scanned; the prompt
// tail carries the taxonomy text itself.
Completion mock_categorize(const LlmRequest& request) {
    std::string p = request.prompt;
    std::size_t tail = p.find("\nTask description:");
    if (tail != std::string::npos) p.resize(tail);
    auto has = [&](const char* needle) { return p.find(needle) != std::string::npos; };
    const char* label = "Other :: Misc. Other";
    if (has("leak"))
        label = "Memory Inefficiency :: Memory Leak";
    else if (has("alloc"))
        label = "Memory Inefficiency :: Unnecessary Memory Allocation";
    else if (has("cach"))
        label = "Inefficient I/O :: Inefficient Caching";
    else if (has("lock") || has("synchroniz"))
        label = "Poor Concurrency Control :: Unnecessary Thread Synchronization";
    else if (has("parallel") || has("thread"))
        label = "Parallelization :: Missing Parallelism";
    else if (has("loop"))
        label = "Inefficient Algorithm/Data-structure :: Inefficient Loops";
    else if (has("recomput") || has("redundant"))
        label = "Inefficient Algorithm/Data-structure :: Unnecessary computations";
    else if (has("network") || has("request"))
        label = "Network Bottlenecks :: Excessive Network Calls";
    else if (has("disk") || has("write") || has("read"))
        label = "Inefficient I/O :: Inefficient Disk I/O";
    else if (has("api"))
        label = "API Misuse :: Redundant API Calls";
    return Completion{label, std::nullopt};
}

// ---------------------------------------------------------------- mine ----

int cmd_mine(CliState& state, const std::string& manifest_path, const std::string& out_dir,
             unsigned workers_flag) {
    std::string manifest = manifest_path.empty() ? state.config.paths.manifest : manifest_path;
    if (manifest.empty()) throw ConfigError("mine needs --manifest (or paths.manifest in config)");
    auto rows = load_manifest(manifest);

    KeywordList keywords = state.keywords();
    MinerConfig miner_config;
    miner_config.languages = state.config.miner.languages;
    miner_config.min_stars = state.config.miner.min_stars;
    miner_config.max_functions_changed = state.config.miner.max_functions_changed;
    miner_config.branch = state.config.miner.branch;
    miner_config.classifier = [keywords](const std::string& message) {
        return classify_keyword(message, keywords);
    };

    std::vector<ManifestRow> selected;
    for (const ManifestRow& row : rows) {
        if (row.stars < miner_config.min_stars) continue;
        if (!miner_config.languages.count(row.language)) continue;
        selected.push_back(row);
    }
    std::cerr << "mine: " << selected.size() << " of " << rows.size()
              << " manifest rows pass the star/language gate\n";

    unsigned workers = workers_flag ? workers_flag : state.config.miner.workers;
    workers = std::max(1u, std::min<unsigned>(workers, selected.size() ? selected.size() : 1));
    fs::create_directories(out_dir);

    std::vector<std::thread> pool;
    std::vector<std::string> failures(workers);
    std::vector<std::size_t> counts(workers, 0);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                std::ofstream shard =
                    open_out(out_dir + "/shard-" + std::to_string(w) + ".jsonl");
                shard << provenance_json_line(state.config) << '\n';
                DedupIndex index;
                for (std::size_t i = w; i < selected.size(); i += workers) {
                    const ManifestRow& row = selected[i];
                    MineLog log;
                    auto records = mine_repository(row.path, miner_config, index,
                                                   {row.repo_id, row.stars}, &log);
                    write_records(records, shard);
                    counts[w] += records.size();
                    for (const auto& skip : log.skipped)
                        std::cerr << "  skip " << row.repo_id << "@" << skip.commit_sha.substr(0, 8)
                                  << ": " << skip.reason << '\n';
                }
                std::ofstream index_out =
                    open_out(out_dir + "/shard-" + std::to_string(w) + ".index");
                index.write(index_out);
            } catch (const std::exception& e) {
                failures[w] = e.what();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (unsigned w = 0; w < workers; ++w)
        if (!failures[w].empty()) throw Error("worker " + std::to_string(w) + ": " + failures[w]);

    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    std::cout << "mined " << total << " records into " << workers << " shard(s) under "
              << out_dir << '\n';
    return 0;
}

// --------------------------------------------------------------- others ----

int cmd_merge(CliState& state, const std::vector<std::string>& shards, const std::string& out_path) {
    std::ofstream out = open_out(out_path);
    out << provenance_json_line(state.config) << '\n';
    MergeResult result = merge_shards(shards, out);
    std::cout << "merged " << result.records << " records, dropped "
              << result.dropped_duplicates << " duplicates\n";
    return 0;
}

int cmd_classify(CliState& state, const std::string& dataset, const std::string& model_path,
                 bool use_keywords, const std::string& out_path, double threshold) {
    TextClassifier classifier;
    std::function<double(const std::string&)> probability;
    if (use_keywords) {
        KeywordList keywords = state.keywords();
        classifier = [keywords](const std::string& m) { return classify_keyword(m, keywords); };
        probability = [classifier](const std::string& m) {
            return classifier(m) == HardLabel::Performance ? 1.0 : 0.0;
        };
    } else {
        if (model_path.empty()) throw ConfigError("classify needs --model or --keywords");
        LinearTextModel model = load_model_file(model_path);
        classifier = [model, threshold](const std::string& m) {
            return classify(model, m, threshold);
        };
        probability = [model](const std::string& m) { return predict(model, m).p_performance; };
    }

    std::ifstream in(dataset, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + dataset);
    std::ofstream out = open_out(out_path);
    out << provenance_comment(state.config) << '\n';
    out << "commit_sha,label,p_performance\n";
    std::size_t n = 0, positive = 0;
    for_each_record(in, [&](const CommitRecord& r) {
        HardLabel label = classifier(r.message);
        out << r.commit_sha << ',' << to_string(label) << ',' << probability(r.message) << '\n';
        ++n;
        if (label == HardLabel::Performance) ++positive;
    });
    std::cout << "classified " << n << " records, " << positive << " performance\n";
    return 0;
}

int cmd_train_hs(CliState& state, const std::string& corpus_path, const std::string& out_dir,
                 std::size_t n_per_class, double lf_fraction, const std::string& mode_name) {
    auto corpus = load_corpus(corpus_path);
    auto lfs = state.lfs();
    LabelModelMode mode;
    if (mode_name == "majority")
        mode = LabelModelMode::MajorityVote;
    else if (mode_name == "em")
        mode = LabelModelMode::WeightedEM;
    else
        throw ConfigError("--label-model must be em or majority, got \"" + mode_name + "\"");

    // Seeded split: one slice trains the LF sub-classifiers, the rest gets
    // soft labels from the label model.
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(state.config.seed);
    rng.shuffle(order);
    std::size_t lf_count = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        lf_fraction * corpus.size()));
    std::vector<std::string> lf_slice, label_slice;
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < lf_count ? lf_slice : label_slice).push_back(corpus[order[k]]);
    if (label_slice.empty()) throw ConfigError("lf-fraction leaves no messages to label");

    fs::create_directories(out_dir);
    LfTrainReport report;
    auto trained = train_lf_classifiers(lfs, lf_slice, state.config.train, &report);
    {
        std::ofstream rep = open_out(out_dir + "/lf_report.txt");
        rep << provenance_comment(state.config) << '\n';
        rep << "trained: " << report.trained.size() << " of " << trained.size() << '\n';
        for (const auto& [id, reason] : report.skipped)
            rep << "skipped " << id << ": " << reason << '\n';
    }

    LfVoteMatrix matrix = build_vote_matrix(trained, label_slice);
    LabelModel label_model = fit_label_model(matrix, mode);
    {
        std::ofstream lm = open_out(out_dir + "/label_model.json");
        save_label_model(label_model, lm);
        lm << provenance_json_line(state.config) << '\n';
    }

    auto soft = predict_soft_labels(label_model, matrix);
    auto balanced = build_balanced_set(label_slice, soft, n_per_class, state.config.seed);
    LinearTextModel student = train(balanced, state.config.train);
    {
        std::ofstream model_out = open_out(out_dir + "/hs_student.json");
        save_model(student, model_out);
        model_out << provenance_json_line(state.config) << '\n';
    }
    std::cout << "heuristic supervision: " << report.trained.size() << "/" << trained.size()
              << " labeling functions trained, student loss "
              << mean_loss(student, balanced) << " over " << balanced.size() << " examples\n";
    return 0;
}

int cmd_distill(CliState& state, const std::string& corpus_path, const std::string& out_path,
                const std::string& cache_path, std::size_t n_per_class, bool mock_teacher) {
    auto corpus = load_corpus(corpus_path);

    std::unique_ptr<LlmGateway> gateway;
    if (mock_teacher) {
        KeywordList keywords = state.keywords();
        gateway = std::make_unique<MockGateway>(
            state.config.gateway, keyword_oracle_handler([keywords](const std::string& message) {
                return classify_keyword(message, keywords) == HardLabel::Performance
                           ? std::string("performance")
                           : std::string("non-performance");
            }));
        std::cerr << "distill: using the deterministic keyword-oracle teacher (--mock-teacher)\n";
    } else {
        if (state.config.gateway.endpoint_url.empty())
            throw ConfigError("distill needs gateway.endpoint_url (or --mock-teacher)");
        gateway = std::make_unique<HttpGateway>(state.config.gateway);
    }

    DistillOptions options;
    options.n_per_class = n_per_class;
    options.train_config = state.config.train;
    options.seed = state.config.seed;
    options.cache_path = cache_path;
    options.workers = state.config.gateway.max_in_flight;
    options.classify_max_tokens = state.config.gateway.classify_max_tokens;

    auto [student, report] = distill(corpus, *gateway, options);
    std::ofstream out = open_out(out_path);
    save_model(student, out);
    out << provenance_json_line(state.config) << '\n';

    std::cout << "distilled student from " << report.labeled << " teacher labels ("
              << report.teacher_performance << " performance / " << report.teacher_non_performance
              << " non-performance, " << report.skipped << " skipped, " << report.cache_hits
              << " cache hits), final loss " << report.final_training_loss << '\n';
    return 0;
}

int cmd_categorize(CliState& state, const std::string& dataset, const std::string& out_dir,
                   bool mock) {
    Taxonomy taxonomy = state.taxonomy();
    std::unique_ptr<LlmGateway> gateway;
    if (mock) {
        gateway = std::make_unique<MockGateway>(state.config.gateway, mock_categorize);
        std::cerr << "categorize: using the deterministic mock categorizer (--mock)\n";
    } else {
        if (state.config.gateway.endpoint_url.empty())
            throw ConfigError("categorize needs gateway.endpoint_url (or --mock)");
        gateway = std::make_unique<HttpGateway>(state.config.gateway);
    }

    fs::create_directories(out_dir);
    std::ofstream assignments = open_out(out_dir + "/assignments.csv");
    assignments << provenance_comment(state.config) << '\n';
    assignments << "repo_id,commit_sha,language,category,subcategory\n";

    CategoryCounts counts;
    std::size_t done = 0, failed = 0;
    std::ifstream in(dataset, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + dataset);
    for_each_record(in, [&](const CommitRecord& r) {
        try {
            auto pairs = assign_category(*gateway, r, taxonomy,
                                         state.config.gateway.categorize_max_tokens);
            for (const auto& [category, subcategory] : pairs) {
                assignments << r.repo_id << ',' << r.commit_sha << ',' << to_string(r.language)
                            << ",\"" << category << "\",\"" << subcategory << "\"\n";
                counts.add(r.language, {category, subcategory});
            }
            ++done;
        } catch (const Error& e) {
            ++failed;
            std::cerr << "  categorize " << r.commit_sha.substr(0, 8) << " failed: " << e.what()
                      << '\n';
        }
    });
    if (counts.totals.empty()) throw Error("no records were categorized");

    {
        std::ofstream counts_out = open_out(out_dir + "/counts.csv");
        counts_out << provenance_comment(state.config) << '\n';
        write_counts_csv(counts, taxonomy, counts_out);
    }
    {
        SignificanceTable table = significance(counts, taxonomy);
        std::ofstream top = open_out(out_dir + "/top5.txt");
        write_top_k_table(table, taxonomy, 5, top);
        top << provenance_comment(state.config) << '\n';
        write_top_k_table(table, taxonomy, 5, std::cout);
    }
    std::cout << "categorized " << done << " records (" << failed << " failed) into " << out_dir
              << '\n';
    return 0;
}

int cmd_evaluate(CliState& state, const std::string& pred_path, const std::string& truth_path,
                 const std::string& out_path, const std::string& ratings_path,
                 const std::string& paired_a, const std::string& paired_b) {
    auto pred = load_label_lines(pred_path);
    auto truth = load_label_lines(truth_path);
    MetricsReport report = metrics(confusion(pred, truth, HardLabel::Performance));
    print_metrics_table(report, std::cout);
    if (!out_path.empty()) {
        std::ofstream out = open_out(out_path);
        write_metrics_csv(report, state.config, out);
    }

    if (!ratings_path.empty()) {
        std::ifstream in(ratings_path, std::ios::binary);
        if (!in) throw IoError("cannot open ratings: " + ratings_path);
        RatingMatrix matrix;
        std::string line;
        long line_no = 0;
        std::vector<std::vector<HardLabel>> rater_labels;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("rater_labels"))
                throw ParseError("ratings line needs rater_labels", line_no);
            std::vector<HardLabel> raters;
            std::vector<std::uint32_t> row(2, 0);
            for (const auto& l : j.at("rater_labels")) {
                HardLabel label = hard_label_from_string(l.get<std::string>());
                raters.push_back(label);
                ++row[label == HardLabel::Performance ? 0 : 1];
            }
            matrix.raters_per_item = static_cast<std::uint32_t>(raters.size());
            matrix.counts.push_back(row);
            rater_labels.push_back(std::move(raters));
        }
        double kappa = fleiss_kappa(matrix);
        auto final_labels = adjudicate(rater_labels);
        std::size_t perf = 0;
        for (HardLabel l : final_labels)
            if (l == HardLabel::Performance) ++perf;
        std::cout << "fleiss_kappa " << kappa << " over " << matrix.counts.size()
                  << " items (" << perf << " adjudicated performance)\n";
    }

    if (!paired_a.empty() || !paired_b.empty()) {
        if (paired_a.empty() || paired_b.empty())
            throw ConfigError("paired t-test needs both --paired-a and --paired-b");
        TTestResult t = paired_t_test(load_number_lines(paired_a), load_number_lines(paired_b));
        std::cout << "paired_t t=" << t.t << " df=" << t.df << " p=" << t.p
                  << (t.p < 0.05 ? "  (significant at 0.05)" : "  (not significant at 0.05)")
                  << '\n';
    }
    return 0;
}

int cmd_bench(CliState& state, const std::string& dataset, const std::string& model_path,
              bool use_keywords, const std::string& out_path) {
    std::vector<std::string> messages = load_corpus(dataset);
    TextClassifier classifier;
    std::string name;
    if (use_keywords) {
        KeywordList keywords = state.keywords();
        classifier = [keywords](const std::string& m) { return classify_keyword(m, keywords); };
        name = "keyword-filter";
    } else {
        if (model_path.empty()) throw ConfigError("bench needs --model or --keywords");
        LinearTextModel model = load_model_file(model_path);
        classifier = [model](const std::string& m) { return classify(model, m); };
        name = "linear-model";
    }

    ThroughputResult result = bench_throughput(classifier, messages, whitespace_token_count);
    std::cout << "bench " << name << ": " << messages.size()
              << " messages, token counter = " << result.token_counter_name
              << ", warm-up excluded\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i)
        std::cout << "  run " << (i + 1) << ": " << result.runs[i].tokens << " tokens in "
                  << result.runs[i].seconds << " s = "
                  << result.runs[i].tokens / result.runs[i].seconds << " tokens/s\n";
    std::cout << "  mean: " << result.mean_tokens_per_second << " tokens/s\n";

    if (!out_path.empty()) {
        std::ofstream out = open_out(out_path);
        out << provenance_comment(state.config) << '\n';
        out << "classifier,run,tokens,seconds,tokens_per_second\n";
        for (std::size_t i = 0; i < result.runs.size(); ++i)
            out << name << ',' << (i + 1) << ',' << result.runs[i].tokens << ','
                << result.runs[i].seconds << ','
                << result.runs[i].tokens / result.runs[i].seconds << '\n';
        out << name << ",mean,,," << result.mean_tokens_per_second << '\n';
    }
    return 0;
}

int cmd_sample(CliState& state, const std::string& pool_path, std::size_t n_per_stratum,
               const std::string& out_path) {
    std::ifstream in(pool_path, std::ios::binary);
    if (!in) throw IoError("cannot open pool: " + pool_path);
    std::vector<std::pair<std::string, std::string>> pool;  // (item, stratum)
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("pool expects `stratum<TAB>item`", line_no);
        pool.emplace_back(line.substr(tab + 1), line.substr(0, tab));
    }
    auto sampled = stratified_sample<std::string>(pool, n_per_stratum, state.config.seed);

    std::ofstream out = open_out(out_path);
    out << provenance_comment(state.config) << '\n';
    // Items come back grouped by stratum; recover the stratum per item from
    // the pool for the output file.
    std::size_t idx = 0;
    std::vector<std::string> strata;
    for (const auto& [item, stratum] : pool)
        if (std::find(strata.begin(), strata.end(), stratum) == strata.end())
            strata.push_back(stratum);
    for (const std::string& stratum : strata)
        for (std::size_t k = 0; k < n_per_stratum; ++k, ++idx)
            out << stratum << '\t' << sampled[idx] << '\n';
    std::cout << "sampled " << sampled.size() << " items over " << strata.size()
              << " strata into " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"perfminer: performance bug-fix commit mining pipeline"};
    app.require_subcommand(1);

    CliState state;
    app.add_option("--config", state.config_path, "pipeline config JSON")
        ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", state.seed_override, "override the config seed");

    // mine
    auto* mine = app.add_subcommand("mine", "mine repositories from a manifest into shards");
    std::string manifest, out_dir = "out";
    unsigned workers = 0;
    mine->add_option("--manifest", manifest, "CSV: url,language,stars (url = local clone path)");
    mine->add_option("--out-dir", out_dir, "shard output directory");
    mine->add_option("--workers", workers, "worker threads (default from config)");

    // merge
    auto* merge = app.add_subcommand("merge", "merge shards, dropping dedup-key duplicates");
    std::vector<std::string> shards;
    std::string merge_out = "dataset.jsonl";
    merge->add_option("shards", shards, "shard JSONL files")->required();
    merge->add_option("--out", merge_out, "merged dataset path");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "label a dataset with a classifier");
    std::string dataset, model_path, classify_out = "labels.csv";
    bool use_keywords = false;
    double threshold = 0.5;
    classify_cmd->add_option("--dataset", dataset, "CommitRecord JSONL")->required();
    classify_cmd->add_option("--model", model_path, "linear model artifact");
    classify_cmd->add_flag("--keywords", use_keywords, "use the keyword baseline");
    classify_cmd->add_option("--threshold", threshold, "decision threshold (default 0.5)");
    classify_cmd->add_option("--out", classify_out, "output CSV");

    // train-hs
    auto* train_hs = app.add_subcommand("train-hs",
                                        "heuristic supervision: LF classifiers, label model, student");
    std::string hs_corpus, hs_out_dir = "hs-out";
    std::size_t hs_n_per_class = 200;
    double lf_fraction = 1.0 / 7.0;
    std::string label_model_mode = "em";
    train_hs->add_option("--corpus", hs_corpus, "messages (.txt lines or .jsonl records)")
        ->required();
    train_hs->add_option("--out-dir", hs_out_dir, "artifact directory");
    train_hs->add_option("--n-per-class", hs_n_per_class, "balanced set size per class");
    train_hs->add_option("--lf-fraction", lf_fraction,
                         "corpus fraction for LF sub-classifier training");
    train_hs->add_option("--label-model", label_model_mode, "em | majority");

    // distill
    auto* distill_cmd = app.add_subcommand("distill", "teacher-label a corpus and train the student");
    std::string kd_corpus, kd_out = "kd_student.json", kd_cache;
    std::size_t kd_n_per_class = 200;
    bool mock_teacher = false;
    distill_cmd->add_option("--corpus", kd_corpus, "messages (.txt lines or .jsonl records)")
        ->required();
    distill_cmd->add_option("--out", kd_out, "student model artifact");
    distill_cmd->add_option("--cache", kd_cache, "teacher label cache (resumable)");
    distill_cmd->add_option("--n-per-class", kd_n_per_class, "balanced set size per class");
    distill_cmd->add_flag("--mock-teacher", mock_teacher,
                          "deterministic keyword-oracle teacher (tests/demos)");

    // categorize
    auto* categorize_cmd = app.add_subcommand("categorize",
                                              "assign taxonomy labels and report significance");
    std::string cat_dataset, cat_out_dir = "categorize-out";
    bool cat_mock = false;
    categorize_cmd->add_option("--dataset", cat_dataset, "CommitRecord JSONL")->required();
    categorize_cmd->add_option("--out-dir", cat_out_dir, "report directory");
    categorize_cmd->add_flag("--mock", cat_mock, "deterministic mock categorizer (tests/demos)");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "metrics, agreement, significance tests");
    std::string pred_path, truth_path, eval_out, ratings_path, paired_a, paired_b;
    evaluate_cmd->add_option("--pred", pred_path, "predicted labels, one per line")->required();
    evaluate_cmd->add_option("--truth", truth_path, "ground truth labels, one per line")
        ->required();
    evaluate_cmd->add_option("--out", eval_out, "metrics CSV");
    evaluate_cmd->add_option("--ratings", ratings_path,
                             "rater JSONL {message, rater_labels, final_label}");
    evaluate_cmd->add_option("--paired-a", paired_a, "metric series A, one number per line");
    evaluate_cmd->add_option("--paired-b", paired_b, "metric series B, one number per line");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "tokens-per-second throughput benchmark");
    std::string bench_dataset, bench_model, bench_out;
    bool bench_keywords = false;
    bench_cmd->add_option("--dataset", bench_dataset, "messages (.txt lines or .jsonl records)")
        ->required();
    bench_cmd->add_option("--model", bench_model, "linear model artifact");
    bench_cmd->add_flag("--keywords", bench_keywords, "benchmark the keyword baseline");
    bench_cmd->add_option("--out", bench_out, "report CSV");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "stratified ground-truth candidate sampling");
    std::string pool_path, sample_out = "sampled.tsv";
    std::size_t n_per_stratum = 0;
    sample_cmd->add_option("--pool", pool_path, "TSV: stratum<TAB>item")->required();
    sample_cmd->add_option("--n-per-stratum", n_per_stratum, "items per stratum")->required();
    sample_cmd->add_option("--out", sample_out, "output TSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Exit 0 for --help/--version, 1 for any usage error.
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        state.seed_set = seed_opt->count() > 0;
        state.load();
        if (mine->parsed()) return cmd_mine(state, manifest, out_dir, workers);
        if (merge->parsed()) return cmd_merge(state, shards, merge_out);
        if (classify_cmd->parsed())
            return cmd_classify(state, dataset, model_path, use_keywords, classify_out, threshold);
        if (train_hs->parsed())
            return cmd_train_hs(state, hs_corpus, hs_out_dir, hs_n_per_class, lf_fraction,
                                label_model_mode);
        if (distill_cmd->parsed())
            return cmd_distill(state, kd_corpus, kd_out, kd_cache, kd_n_per_class, mock_teacher);
        if (categorize_cmd->parsed()) return cmd_categorize(state, cat_dataset, cat_out_dir, cat_mock);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(state, pred_path, truth_path, eval_out, ratings_path, paired_a,
                                paired_b);
        if (bench_cmd->parsed())
            return cmd_bench(state, bench_dataset, bench_model, bench_keywords, bench_out);
        if (sample_cmd->parsed()) return cmd_sample(state, pool_path, n_per_stratum, sample_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
