#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/featurizer.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace perfminer {

// Binary text classifier over hashed n-gram features. The same type serves
// as the per-labeling-function sub-classifier and the distilled student.
struct LinearTextModel {
    std::uint32_t dim = kDefaultFeatureDim;
    std::vector<double> weights;  // length dim
    double bias = 0.0;
    std::uint64_t trained_on = 0;
    std::string config_hash;
};

struct SoftLabeledExample {
    std::string message;
    SoftLabel target;
};

struct TrainConfig {
    unsigned epochs = 5;
    double learning_rate = 0.1;
    double l2 = 1e-6;
    std::uint64_t seed = 0;
    std::uint32_t dim = kDefaultFeatureDim;
    unsigned batch_size = 32;
};

std::string config_hash(const TrainConfig& config);

// Per-example soft-target cross-entropy: -[T1*log(S) + T0*log(1-S)], natural
// log, S clamped to [1e-12, 1-1e-12], terms with zero target weight dropped
// (the 0*log 0 convention). Batch loss is the arithmetic mean over examples.
double distillation_loss(SoftLabel student_p, SoftLabel teacher_t);

SoftLabel predict(const LinearTextModel& model, std::string_view message);

// Performance iff p >= threshold (ties go to Performance).
HardLabel classify(const LinearTextModel& model, std::string_view message, double threshold = 0.5);

// Mini-batch SGD on mean distillation loss + l2*||weights||^2, zero init,
// per-epoch shuffle from config.seed. Deterministic given (examples, config)
// on one platform. Throws DegenerateDataError when the corpus has fewer than
// two examples or only one side of 0.5.
LinearTextModel train(std::span<const SoftLabeledExample> examples, const TrainConfig& config);

// Mean distillation loss of the model over a corpus.
double mean_loss(const LinearTextModel& model, std::span<const SoftLabeledExample> examples);

// Versioned JSON artifact. load rejects unknown format tags.
void save_model(const LinearTextModel& model, std::ostream& out);
void save_model_file(const LinearTextModel& model, const std::string& path);
LinearTextModel load_model(std::istream& in);
LinearTextModel load_model_file(const std::string& path);

} // namespace perfminer
