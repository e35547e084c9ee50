#include "slu/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "slu/classifiers.hpp"
#include "slu/hier_decode.hpp"
#include "slu/util.hpp"
#include "slu/value_decoder.hpp"

namespace slu {

void TrainConfig::validate() const {
  if (dims.embedding <= 0 || dims.hidden <= 0 || dims.decoder_hidden <= 0)
    throw std::runtime_error("config: dimensions must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw std::runtime_error("config: dropout must be in [0,1)");
  if (batch_size <= 0) throw std::runtime_error("config: batch size must be positive");
  if (grad_clip <= 0.0) throw std::runtime_error("config: grad clip must be positive");
  if (lr <= 0.0) throw std::runtime_error("config: learning rate must be positive");
  if (epochs <= 0) throw std::runtime_error("config: epochs must be positive");
  if (min_count < 1) throw std::runtime_error("config: min count must be at least 1");
  if (w_act < 0.0 || w_slot < 0.0 || w_value < 0.0)
    throw std::runtime_error("config: loss weights must be non-negative");
  if (max_value_len < 0) throw std::runtime_error("config: max value length must be non-negative");
}

TrainingTargets make_training_targets(const Example& ex, const Ontology& o) {
  TrainingTargets t;
  const auto& acts = o.acts();
  t.act_targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(acts.size()));

  std::map<std::string, std::set<std::string>> slots_of_act;
  for (const auto& triple : ex.triples) {
    t.act_targets(o.act_index(triple.act)) = 1.0;
    if (triple.slot) slots_of_act[triple.act].insert(*triple.slot);
    if (triple.value) t.value_tasks.emplace_back(triple.act, *triple.slot, *triple.value);
  }
  for (const auto& [act, gold_slots] : slots_of_act) {
    const auto& legal = o.legal_slots(act);
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(legal.size()));
    for (size_t i = 0; i < legal.size(); ++i)
      if (gold_slots.count(legal[i])) ind(static_cast<Eigen::Index>(i)) = 1.0;
    t.slot_tasks.emplace_back(act, std::move(ind));
  }
  return t;
}

namespace {

struct ExampleLoss {
  double act = 0.0, slot = 0.0, value = 0.0;
  int unk_mapped = 0;
};

// Forward + backward for one utterance; gradients are accumulated into acc.
// The batch-level task counts are folded into per-term coefficients so the
// single backward pass produces the exact batch-mean gradient contribution.
ExampleLoss example_pass(const SluModel& model, const Example& ex, const TrainingTargets& tgt,
                         const TrainConfig& cfg, uint64_t dropout_seed, int batch_utterances,
                         int batch_slot_tasks, int batch_value_tasks,
                         std::vector<Eigen::MatrixXd>& acc) {
  Graph g;
  g.training = true;
  g.dropout_rate = cfg.dropout;
  std::mt19937_64 rng(dropout_seed);
  g.rng = &rng;

  EncodedUtterance enc = encode(g, model, ex.tokens);

  std::vector<Expr> terms;
  std::vector<double> coeffs;
  ExampleLoss out;

  ActScores acts = classify_acts(g, model, enc);
  Expr act_loss = bce_multilabel_loss(g, acts.probs, tgt.act_targets);
  out.act = g.scalar(act_loss);
  terms.push_back(act_loss);
  coeffs.push_back(cfg.w_act / batch_utterances);

  for (const auto& [act, indicator] : tgt.slot_tasks) {
    SlotScores slots = classify_slots(g, model, enc, act);
    Expr slot_loss = bce_multilabel_loss(g, slots.probs, indicator);
    out.slot += g.scalar(slot_loss);
    terms.push_back(slot_loss);
    coeffs.push_back(cfg.w_slot / std::max(batch_slot_tasks, 1));
  }

  if (!tgt.value_tasks.empty()) {
    ExtendedVocab ev = extend_vocab(ex.tokens, model.vocab());
    for (const auto& [act, slot, gold] : tgt.value_tasks) {
      TeacherForcedLoss tf = teacher_forced_nll(g, model, enc, ev, act, slot, gold);
      out.value += g.scalar(tf.loss);
      out.unk_mapped += tf.unk_mapped;
      terms.push_back(tf.loss);
      coeffs.push_back(cfg.w_value / std::max(batch_value_tasks, 1));
    }
  }

  Expr total = g.weighted_sum(terms, coeffs);
  if (!std::isfinite(g.scalar(total)))
    throw std::runtime_error("training: non-finite loss on utterance \"" + ex.text() + "\"");
  g.backward(total);
  g.add_param_grads(model.store(), acc);
  return out;
}

double dev_f1(const SluModel& model, const std::vector<Example>& dev, const TrainConfig& cfg) {
  if (dev.empty()) return 0.0;
  auto results = parse_batch(model, dev, cfg.threads, cfg.max_value_len);
  std::vector<TripleSet> preds, golds;
  preds.reserve(dev.size());
  golds.reserve(dev.size());
  for (size_t i = 0; i < dev.size(); ++i) {
    preds.push_back(results[i].triples);
    golds.push_back(dev[i].triples);
  }
  return score(preds, golds).f1();
}

}  // namespace

std::pair<SluModel, TrainReport> train(
    const std::vector<Example>& train_set, const std::vector<Example>& dev_set,
    const TrainConfig& cfg, const Ontology& ontology, const Vocabulary& vocab,
    const WordVectors* word_vectors,
    const std::map<std::string, std::vector<std::string>>& label_components) {
  cfg.validate();
  if (train_set.empty()) throw std::runtime_error("training: empty training set");

  SluModel model(ontology, vocab, cfg.dims);
  model.init(cfg.seed, word_vectors, label_components);

  const int n = static_cast<int>(train_set.size());
  std::vector<TrainingTargets> targets;
  targets.reserve(n);
  int total_slot_tasks = 0, total_value_tasks = 0;
  for (const auto& ex : train_set) {
    targets.push_back(make_training_targets(ex, ontology));
    total_slot_tasks += static_cast<int>(targets.back().slot_tasks.size());
    total_value_tasks += static_cast<int>(targets.back().value_tasks.size());
  }

  AdamState adam;
  adam.lr = cfg.lr;
  adam.clip_norm = cfg.grad_clip;

  TrainReport report;
  std::vector<Eigen::MatrixXd> best_values;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x9e3779b9ULL, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochStats stats;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int end = std::min(start + cfg.batch_size, n);
      const int b = end - start;
      int slot_tasks = 0, value_tasks = 0;
      for (int k = start; k < end; ++k) {
        slot_tasks += static_cast<int>(targets[order[k]].slot_tasks.size());
        value_tasks += static_cast<int>(targets[order[k]].value_tasks.size());
      }

      std::vector<Eigen::MatrixXd> grads(model.store().size());
      if (cfg.threads <= 1) {
        for (int k = start; k < end; ++k) {
          const int idx = order[k];
          ExampleLoss el =
              example_pass(model, train_set[idx], targets[idx], cfg,
                           mix_seed(cfg.seed, epoch, idx), b, slot_tasks, value_tasks, grads);
          stats.act_loss += el.act;
          stats.slot_loss += el.slot;
          stats.value_loss += el.value;
          report.unk_value_tokens += el.unk_mapped;
        }
      } else {
        std::vector<std::vector<Eigen::MatrixXd>> per(b);
        std::vector<ExampleLoss> losses(b);
        parallel_for(b, cfg.threads, [&](int j) {
          const int idx = order[start + j];
          per[j].assign(model.store().size(), Eigen::MatrixXd());
          losses[j] = example_pass(model, train_set[idx], targets[idx], cfg,
                                   mix_seed(cfg.seed, epoch, idx), b, slot_tasks, value_tasks,
                                   per[j]);
        });
        for (int j = 0; j < b; ++j) {
          stats.act_loss += losses[j].act;
          stats.slot_loss += losses[j].slot;
          stats.value_loss += losses[j].value;
          report.unk_value_tokens += losses[j].unk_mapped;
          for (size_t p = 0; p < per[j].size(); ++p) {
            if (per[j][p].size() == 0) continue;
            if (grads[p].size() == 0)
              grads[p] = std::move(per[j][p]);
            else
              grads[p] += per[j][p];
          }
        }
      }
      adam_update(adam, model.store(), grads);
    }
    if (!model.store().all_finite())
      throw std::runtime_error("training: parameters became non-finite at epoch " +
                               std::to_string(epoch + 1));

    stats.act_loss /= n;
    stats.slot_loss /= std::max(total_slot_tasks, 1);
    stats.value_loss /= std::max(total_value_tasks, 1);
    stats.total_loss =
        cfg.w_act * stats.act_loss + cfg.w_slot * stats.slot_loss + cfg.w_value * stats.value_loss;
    stats.dev_f1 = dev_f1(model, dev_set, cfg);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.epochs.push_back(stats);

    // without a dev set every epoch "improves": the last epoch is kept and
    // early stopping never fires
    if (dev_set.empty() || report.best_epoch < 0 || stats.dev_f1 > report.best_dev_f1) {
      report.best_epoch = epoch;
      report.best_dev_f1 = stats.dev_f1;
      best_values = model.snapshot_values();
    } else if (cfg.patience > 0 && epoch - report.best_epoch >= cfg.patience) {
      break;
    }
  }

  model.load_values(best_values);
  return {std::move(model), std::move(report)};
}

std::string train_report_json(const TrainConfig& cfg, const TrainReport& report) {
  nlohmann::ordered_json j;
  j["config"] = {{"embedding_dim", cfg.dims.embedding},
                 {"hidden_size", cfg.dims.hidden},
                 {"decoder_hidden", cfg.dims.decoder_hidden},
                 {"dropout", cfg.dropout},
                 {"batch_size", cfg.batch_size},
                 {"grad_clip", cfg.grad_clip},
                 {"lr", cfg.lr},
                 {"epochs", cfg.epochs},
                 {"patience", cfg.patience},
                 {"seed", cfg.seed},
                 {"loss_weights", {cfg.w_act, cfg.w_slot, cfg.w_value}},
                 {"min_count", cfg.min_count},
                 {"threads", cfg.threads},
                 {"max_value_len", cfg.max_value_len}};
  j["best_epoch"] = report.best_epoch + 1;
  j["best_dev_f1"] = report.best_dev_f1;
  j["unk_value_tokens"] = report.unk_value_tokens;
  j["epochs"] = nlohmann::json::array();
  for (const auto& e : report.epochs)
    j["epochs"].push_back({{"act_loss", e.act_loss},
                           {"slot_loss", e.slot_loss},
                           {"value_loss", e.value_loss},
                           {"total_loss", e.total_loss},
                           {"dev_f1", e.dev_f1},
                           {"seconds", e.seconds}});
  return j.dump(2);
}

double AblationTable::mean_f1(double fraction) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& c : cells) {
    if (c.fraction != fraction) continue;
    sum += c.f1;
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

AblationTable ablation_run(const std::vector<Example>& full_train,
                           const std::vector<double>& fractions,
                           const std::vector<uint64_t>& seeds,
                           const std::vector<Example>& dev, const std::vector<Example>& test,
                           const TrainConfig& cfg, const Ontology& ontology,
                           const WordVectors* word_vectors) {
  AblationTable table;
  table.fractions = fractions;
  table.seeds = seeds;
  std::vector<TripleSet> gold;
  gold.reserve(test.size());
  for (const auto& ex : test) gold.push_back(ex.triples);

  for (double fraction : fractions) {
    for (uint64_t seed : seeds) {
      auto sub = subsample(full_train, fraction, seed);
      Vocabulary vocab = build_vocab(sub, cfg.min_count);
      TrainConfig cell_cfg = cfg;
      cell_cfg.seed = seed;
      auto [model, report] = train(sub, dev, cell_cfg, ontology, vocab, word_vectors);
      auto results = parse_batch(model, test, cfg.threads, cfg.max_value_len);
      std::vector<TripleSet> preds;
      preds.reserve(results.size());
      for (const auto& r : results) preds.push_back(r.triples);
      table.cells.push_back({fraction, seed, score(preds, gold).f1()});
    }
  }
  return table;
}

std::string ablation_table_text(const AblationTable& t) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %-12s %8s\n", "fraction", "seed", "f1");
  out << line;
  for (const auto& c : t.cells) {
    std::snprintf(line, sizeof(line), "%-10.3f %-12llu %8.4f\n", c.fraction,
                  static_cast<unsigned long long>(c.seed), c.f1);
    out << line;
  }
  for (double f : t.fractions) {
    std::snprintf(line, sizeof(line), "%-10.3f %-12s %8.4f\n", f, "mean", t.mean_f1(f));
    out << line;
  }
  return out.str();
}

std::string ablation_table_json(const AblationTable& t) {
  nlohmann::ordered_json j;
  j["fractions"] = t.fractions;
  j["seeds"] = t.seeds;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : t.cells)
    j["cells"].push_back({{"fraction", c.fraction}, {"seed", c.seed}, {"f1", c.f1}});
  j["means"] = nlohmann::json::array();
  for (double f : t.fractions) j["means"].push_back({{"fraction", f}, {"f1", t.mean_f1(f)}});
  return j.dump(2);
}

}  // namespace slu
