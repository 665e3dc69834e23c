#include "perfminer/linear_model.hpp"

#include "perfminer/digest.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace perfminer {

namespace {

constexpr double kProbEps = 1e-12;

double clamp_prob(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

void check_config(const TrainConfig& c) {
    if (c.epochs == 0) throw ConfigError("epochs must be positive");
    if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (c.l2 < 0.0) throw ConfigError("l2 must be non-negative");
    if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
}

} // namespace

std::string config_hash(const TrainConfig& c) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "epochs=%u;lr=%.17g;l2=%.17g;seed=%llu;dim=%u;batch=%u",
                  c.epochs, c.learning_rate, c.l2,
                  static_cast<unsigned long long>(c.seed), c.dim, c.batch_size);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(digest::fnv1a64(buf)));
    return hex;
}

double distillation_loss(SoftLabel student_p, SoftLabel teacher_t) {
    double s = clamp_prob(student_p.p_performance);
    double t1 = teacher_t.p_performance;
    double t0 = 1.0 - t1;
    double loss = 0.0;
    if (t1 != 0.0) loss -= t1 * std::log(s);
    if (t0 != 0.0) loss -= t0 * std::log(1.0 - s);
    return loss;
}

SoftLabel predict(const LinearTextModel& model, std::string_view message) {
    SparseFeatureVector x = hash_features(tokenize(message), model.dim);
    double z = x.dot(model.weights) + model.bias;
    return SoftLabel{clamp_prob(sigmoid(z))};
}

HardLabel classify(const LinearTextModel& model, std::string_view message, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("classification threshold must lie in (0,1)");
    return predict(model, message).harden(threshold);
}

LinearTextModel train(std::span<const SoftLabeledExample> examples, const TrainConfig& config) {
    check_config(config);
    if (examples.size() < 2)
        throw DegenerateDataError("training needs at least 2 examples, got " +
                                  std::to_string(examples.size()));
    bool has_pos = false, has_neg = false;
    for (const auto& ex : examples) {
        double p = ex.target.p_performance;
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("target: p_performance out of [0,1]");
        if (p > 0.5) has_pos = true;
        if (p < 0.5) has_neg = true;
    }
    if (!has_pos || !has_neg)
        throw DegenerateDataError(
            "degenerate corpus: need targets on both sides of 0.5 (got " +
            std::string(has_pos ? "only performance" : "only non-performance") + ")");

    const std::size_t n = examples.size();
    std::vector<SparseFeatureVector> features;
    features.reserve(n);
    for (const auto& ex : examples) features.push_back(hash_features(tokenize(ex.message), config.dim));

    LinearTextModel model;
    model.dim = config.dim;
    model.weights.assign(config.dim, 0.0);
    model.bias = 0.0;
    model.trained_on = n;
    model.config_hash = config_hash(config);

    // L2 decay applied through a global scale so each batch stays O(nnz).
    double scale = 1.0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(config.seed);

    std::unordered_map<std::uint32_t, double> grad;
    for (unsigned epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            std::size_t end = std::min(n, start + config.batch_size);
            double batch = static_cast<double>(end - start);
            grad.clear();
            double grad_bias = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const auto& x = features[order[k]];
                double z = scale * x.dot(model.weights) + model.bias;
                double err = sigmoid(z) - examples[order[k]].target.p_performance;
                for (const auto& [idx, w] : x.entries) grad[idx] += err * w;
                grad_bias += err;
            }
            if (config.l2 > 0.0) scale *= 1.0 - config.learning_rate * 2.0 * config.l2;
            if (!(scale > 0.0))
                throw Error("training diverged: weight scale underflow (lr or l2 too large)");
            for (const auto& [idx, g] : grad) {
                double step = config.learning_rate * g / batch;
                if (!std::isfinite(step))
                    throw Error("training aborted: non-finite gradient at feature " +
                                std::to_string(idx) + ", epoch " + std::to_string(epoch));
                model.weights[idx] -= step / scale;
            }
            model.bias -= config.learning_rate * grad_bias / batch;
        }
    }
    if (scale != 1.0)
        for (double& w : model.weights) w *= scale;
    if (!std::isfinite(model.bias)) throw Error("training aborted: non-finite bias");

    double final_loss = mean_loss(model, examples);
    if (!std::isfinite(final_loss))
        throw Error("training aborted: non-finite final loss " + std::to_string(final_loss));
    return model;
}

double mean_loss(const LinearTextModel& model, std::span<const SoftLabeledExample> examples) {
    if (examples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : examples) total += distillation_loss(predict(model, ex.message), ex.target);
    return total / static_cast<double>(examples.size());
}

namespace {
constexpr const char* kModelFormat = "perfminer-linear-model-v1";
}

void save_model(const LinearTextModel& model, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["dim"] = model.dim;
    j["bias"] = model.bias;
    j["trained_on"] = model.trained_on;
    j["config_hash"] = model.config_hash;
    j["weights"] = model.weights;
    out << j.dump() << '\n';
    if (!out) throw IoError("save_model: stream write failed");
}

void save_model_file(const LinearTextModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    save_model(model, out);
}

LinearTextModel load_model(std::istream& in) {
    // First line is the artifact; anything after it (a provenance record,
    // for instance) is ignored.
    std::string line;
    if (!std::getline(in, line)) throw ParseError("model file is empty");
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("model file is not valid JSON");
    if (!j.is_object() || j.value("format", "") != kModelFormat)
        throw ParseError("unsupported model format tag \"" + j.value("format", std::string("<missing>")) +
                         "\", expected " + kModelFormat);
    LinearTextModel model;
    model.dim = j.at("dim").get<std::uint32_t>();
    model.bias = j.at("bias").get<double>();
    model.trained_on = j.at("trained_on").get<std::uint64_t>();
    model.config_hash = j.at("config_hash").get<std::string>();
    model.weights = j.at("weights").get<std::vector<double>>();
    if (model.weights.size() != model.dim)
        throw ParseError("model weight count " + std::to_string(model.weights.size()) +
                         " does not match dim " + std::to_string(model.dim));
    return model;
}

LinearTextModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    return load_model(in);
}

} // namespace perfminer
