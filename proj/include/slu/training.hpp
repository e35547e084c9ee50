#pragma once

#include <tuple>

#include "slu/evaluation.hpp"
#include "slu/model.hpp"

namespace slu {

struct TrainConfig {
  Dims dims;                  // embedding 100, hidden 128, decoder hidden 128
  double dropout = 0.5;
  int batch_size = 20;
  double grad_clip = 5.0;
  double lr = 0.001;
  int epochs = 50;
  int patience = 5;           // epochs without dev improvement; <= 0 disables early stopping
  uint64_t seed = 1;
  double w_act = 1.0, w_slot = 1.0, w_value = 1.0;
  int min_count = 1;          // vocabulary frequency cutoff
  int threads = 1;
  int max_value_len = 10;

  void validate() const;
};

struct EpochStats {
  double act_loss = 0.0, slot_loss = 0.0, value_loss = 0.0, total_loss = 0.0;
  double dev_f1 = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;  // 0-based index into epochs
  double best_dev_f1 = 0.0;
  long unk_value_tokens = 0;  // gold value tokens unreachable by generation or copy
};

std::string train_report_json(const TrainConfig& cfg, const TrainReport& report);

// Per-utterance supervision: act indicator over the ontology's acts; one slot
// indicator (over the act's legal slots) per gold act that takes slots; one
// value task per gold triple carrying a value.
struct TrainingTargets {
  Eigen::VectorXd act_targets;
  std::vector<std::pair<std::string, Eigen::VectorXd>> slot_tasks;
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> value_tasks;
};

TrainingTargets make_training_targets(const Example& ex, const Ontology& o);

// Joint training: batch loss = w_act * mean act BCE + w_slot * mean slot BCE +
// w_value * mean value NLL (each mean over that task type's count in the
// batch); Adam with global-norm clipping; after every epoch the dev set is
// parsed and micro-F1 recorded; the returned model carries the best-dev-F1
// epoch's parameters.
std::pair<SluModel, TrainReport> train(
    const std::vector<Example>& train_set, const std::vector<Example>& dev_set,
    const TrainConfig& cfg, const Ontology& ontology, const Vocabulary& vocab,
    const WordVectors* word_vectors = nullptr,
    const std::map<std::string, std::vector<std::string>>& label_components = {});

// Data-size ablation: per (fraction, seed), subsample the training set,
// rebuild the vocabulary, train, and score on the fixed test set.
struct AblationCell {
  double fraction = 0.0;
  uint64_t seed = 0;
  double f1 = 0.0;
};

struct AblationTable {
  std::vector<double> fractions;
  std::vector<uint64_t> seeds;
  std::vector<AblationCell> cells;  // fraction-major, seed-minor

  double mean_f1(double fraction) const;
  bool complete() const { return cells.size() == fractions.size() * seeds.size(); }
};

AblationTable ablation_run(const std::vector<Example>& full_train,
                           const std::vector<double>& fractions,
                           const std::vector<uint64_t>& seeds,
                           const std::vector<Example>& dev, const std::vector<Example>& test,
                           const TrainConfig& cfg, const Ontology& ontology,
                           const WordVectors* word_vectors = nullptr);

std::string ablation_table_text(const AblationTable& t);
std::string ablation_table_json(const AblationTable& t);

}  // namespace slu
