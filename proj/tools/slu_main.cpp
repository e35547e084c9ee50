#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "slu/hier_decode.hpp"
#include "slu/synth.hpp"
#include "slu/training.hpp"
#include "slu/util.hpp"

namespace {

using namespace slu;

std::string argv_echo(int argc, char** argv) {
  std::vector<std::string> parts;
  for (int i = 0; i < argc; ++i) parts.emplace_back(argv[i]);
  return join(parts, " ");
}

std::set<std::pair<std::string, std::string>> parse_pairs(const std::string& text,
                                                          const Ontology& o) {
  std::set<std::pair<std::string, std::string>> out;
  if (text.empty()) return out;
  for (const auto& item : split_on(text, ',')) {
    auto parts = split_on(item, ':');
    if (parts.size() != 2)
      throw std::runtime_error("bad act:slot pair '" + item + "' (expected act:slot)");
    if (!o.is_legal_pair(parts[0], parts[1]))
      throw std::runtime_error("holdout pair '" + item + "' is not in the ontology");
    out.emplace(parts[0], parts[1]);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_on(text, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> out;
  for (const auto& item : split_on(text, ',')) out.push_back(std::stoull(item));
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// Training options shared by `train` and `ablate`. Precedence: command-line
// flag, then --config file entry, then the built-in default.
struct TrainOpts {
  TrainConfig cfg;
  std::string config_path;
  std::map<std::string, std::vector<std::string>> label_components;
  std::map<std::string, CLI::Option*> flags;

  void attach(CLI::App* app) {
    flags["embedding_dim"] = app->add_option("--embedding-dim", cfg.dims.embedding,
                                             "word/label embedding width");
    flags["hidden_size"] =
        app->add_option("--hidden-size", cfg.dims.hidden, "encoder units per direction");
    flags["decoder_hidden"] =
        app->add_option("--decoder-hidden", cfg.dims.decoder_hidden, "value decoder state width");
    flags["dropout"] = app->add_option("--dropout", cfg.dropout, "dropout rate on h and r");
    flags["batch_size"] = app->add_option("--batch-size", cfg.batch_size, "examples per update");
    flags["grad_clip"] = app->add_option("--grad-clip", cfg.grad_clip, "global gradient norm cap");
    flags["lr"] = app->add_option("--lr", cfg.lr, "adam learning rate");
    flags["epochs"] = app->add_option("--epochs", cfg.epochs, "epoch budget");
    flags["patience"] =
        app->add_option("--patience", cfg.patience, "epochs without dev gain before stopping; 0 disables");
    flags["seed"] = app->add_option("--seed", cfg.seed, "master random seed");
    flags["w_act"] = app->add_option("--w-act", cfg.w_act, "act loss weight");
    flags["w_slot"] = app->add_option("--w-slot", cfg.w_slot, "slot loss weight");
    flags["w_value"] = app->add_option("--w-value", cfg.w_value, "value loss weight");
    flags["min_count"] =
        app->add_option("--min-count", cfg.min_count, "vocabulary frequency cutoff");
    flags["threads"] = app->add_option("--threads", cfg.threads, "worker threads");
    flags["max_value_len"] =
        app->add_option("--max-value-len", cfg.max_value_len, "value decode length budget");
    app->add_option("--config", config_path, "JSON config file (flags win over entries)");
  }

  void finalize() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("config '" + config_path + "': " + e.what());
    }
    auto use = [&](const char* key) { return j.contains(key) && flags.at(key)->count() == 0; };
    if (use("embedding_dim")) cfg.dims.embedding = j["embedding_dim"].get<int>();
    if (use("hidden_size")) cfg.dims.hidden = j["hidden_size"].get<int>();
    if (use("decoder_hidden")) cfg.dims.decoder_hidden = j["decoder_hidden"].get<int>();
    if (use("dropout")) cfg.dropout = j["dropout"].get<double>();
    if (use("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (use("grad_clip")) cfg.grad_clip = j["grad_clip"].get<double>();
    if (use("lr")) cfg.lr = j["lr"].get<double>();
    if (use("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (use("patience")) cfg.patience = j["patience"].get<int>();
    if (use("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (use("w_act")) cfg.w_act = j["w_act"].get<double>();
    if (use("w_slot")) cfg.w_slot = j["w_slot"].get<double>();
    if (use("w_value")) cfg.w_value = j["w_value"].get<double>();
    if (use("min_count")) cfg.min_count = j["min_count"].get<int>();
    if (use("threads")) cfg.threads = j["threads"].get<int>();
    if (use("max_value_len")) cfg.max_value_len = j["max_value_len"].get<int>();
    if (j.contains("label_components"))
      for (const auto& [label, words] : j["label_components"].items())
        label_components[label] = words.get<std::vector<std::string>>();
  }
};

int cmd_synthesize(const std::string& grammar_path, const std::string& ontology_out,
                   const std::string& train_out, const std::string& dev_out,
                   const std::string& test_out, int n_train, int n_dev, int n_test,
                   uint64_t seed, const std::string& holdout_text, const std::string& header) {
  SyntheticGrammarSpec grammar =
      grammar_path.empty() ? default_grammar() : load_grammar(grammar_path);
  auto holdout = parse_pairs(holdout_text, grammar.ontology);
  if (train_out.empty() && dev_out.empty() && test_out.empty() && ontology_out.empty())
    throw std::runtime_error("nothing to write: give --ontology, --train, --dev or --test");

  if (!ontology_out.empty()) {
    save_ontology(grammar.ontology, ontology_out);
    std::printf("wrote ontology to %s\n", ontology_out.c_str());
  }
  auto emit = [&](const std::string& path, int n, uint64_t salt, bool oov, bool force) {
    if (path.empty()) return;
    SynthOptions opt;
    opt.n = n;
    opt.seed = mix_seed(seed, salt, 0);
    opt.use_oov_values = oov;
    opt.holdout_pairs = holdout;
    opt.force_holdout = force;
    auto xs = synthesize(grammar, opt);
    write_corpus(path, xs, {header});
    std::printf("wrote %zu examples to %s\n", xs.size(), path.c_str());
  };
  emit(train_out, n_train, 1, false, false);
  emit(dev_out, n_dev, 2, true, false);
  emit(test_out, n_test, 3, true, true);
  return 0;
}

int cmd_train(const std::string& ontology_path, const std::string& train_path,
              const std::string& dev_path, const std::string& vectors_path,
              const std::string& checkpoint_out, const std::string& report_out,
              TrainOpts& topts) {
  topts.finalize();
  if (checkpoint_out.empty()) throw std::runtime_error("--checkpoint output path is required");
  Ontology onto = load_ontology(ontology_path);
  auto train_set = load_corpus(train_path, onto);
  std::vector<Example> dev_set;
  if (!dev_path.empty()) dev_set = load_corpus(dev_path, onto);
  WordVectors vectors;
  const WordVectors* vectors_ptr = nullptr;
  if (!vectors_path.empty()) {
    vectors = load_word_vectors(vectors_path);
    vectors_ptr = &vectors;
  }
  Vocabulary vocab = build_vocab(train_set, topts.cfg.min_count);

  auto [model, report] = train(train_set, dev_set, topts.cfg, onto, vocab, vectors_ptr,
                               topts.label_components);
  model.save(checkpoint_out);
  if (!report_out.empty()) write_text_file(report_out, train_report_json(topts.cfg, report));

  std::printf("trained %zu epochs on %zu examples (vocab %d)\n", report.epochs.size(),
              train_set.size(), vocab.size());
  if (!dev_set.empty())
    std::printf("best dev F1 %.3f at epoch %d\n", report.best_dev_f1, report.best_epoch + 1);
  if (report.unk_value_tokens > 0)
    std::printf("warning: %ld gold value tokens were unreachable by generation or copy\n",
                report.unk_value_tokens);
  std::printf("checkpoint saved to %s\n", checkpoint_out.c_str());
  return 0;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& input_path,
                const std::string& out_path, int threads, int max_value_len,
                const std::string& header) {
  SluModel model = SluModel::load(checkpoint_path);
  auto examples = load_corpus(input_path, model.ontology());
  auto results = parse_batch(model, examples, threads, max_value_len);
  write_predictions(out_path, examples, results, {header});
  std::printf("wrote %zu predictions to %s\n", results.size(), out_path.c_str());
  return 0;
}

int cmd_evaluate(const std::string& ontology_path, const std::string& pred_path,
                 const std::string& gold_path, const std::string& train_path,
                 const std::string& report_out) {
  Ontology onto = load_ontology(ontology_path);
  auto preds_ex = load_corpus(pred_path, onto);
  auto golds_ex = load_corpus(gold_path, onto);
  if (preds_ex.size() != golds_ex.size())
    throw std::runtime_error("prediction/gold record counts differ (" +
                             std::to_string(preds_ex.size()) + " vs " +
                             std::to_string(golds_ex.size()) + ")");
  std::vector<TripleSet> preds, golds;
  for (const auto& e : preds_ex) preds.push_back(e.triples);
  for (const auto& e : golds_ex) golds.push_back(e.triples);

  ScoreReport overall = score(preds, golds);
  std::optional<std::pair<ScoreReport, ScoreReport>> split;
  if (!train_path.empty()) {
    auto train_set = load_corpus(train_path, onto);
    split = score_by_category(preds, golds, all_triples(train_set));
  }
  std::fputs(score_report_table(overall, split).c_str(), stdout);
  if (!report_out.empty()) write_text_file(report_out, score_report_json(overall, split));
  std::printf("F1 %.3f\n", overall.f1());
  return 0;
}

int cmd_ablate(const std::string& ontology_path, const std::string& train_path,
               const std::string& dev_path, const std::string& test_path,
               const std::string& vectors_path, const std::string& fractions_text,
               const std::string& seeds_text, const std::string& report_out, TrainOpts& topts) {
  topts.finalize();
  Ontology onto = load_ontology(ontology_path);
  auto train_set = load_corpus(train_path, onto);
  auto dev_set = load_corpus(dev_path, onto);
  auto test_set = load_corpus(test_path, onto);
  WordVectors vectors;
  const WordVectors* vectors_ptr = nullptr;
  if (!vectors_path.empty()) {
    vectors = load_word_vectors(vectors_path);
    vectors_ptr = &vectors;
  }
  auto fractions = parse_doubles(fractions_text);
  auto seeds = parse_seeds(seeds_text);
  if (fractions.empty() || seeds.empty())
    throw std::runtime_error("--fractions and --seeds must be non-empty");

  AblationTable table =
      ablation_run(train_set, fractions, seeds, dev_set, test_set, topts.cfg, onto, vectors_ptr);
  std::fputs(ablation_table_text(table).c_str(), stdout);
  if (!report_out.empty()) write_text_file(report_out, ablation_table_json(table));
  return 0;
}

int cmd_attn_dump(const std::string& checkpoint_path, const std::string& text,
                  const std::string& act, const std::string& slot, const std::string& out_path,
                  int max_value_len, const std::string& header) {
  SluModel model = SluModel::load(checkpoint_path);
  auto tokens = tokenize(text);
  if (tokens.empty()) throw std::runtime_error("--text has no tokens after normalization");

  Graph g;
  auto enc = encode(g, model, tokens);
  auto ev = extend_vocab(tokens, model.vocab());
  ValueDecode vd = decode_value(g, model, enc, ev, act, slot, max_value_len);

  std::vector<std::string> labels = vd.tokens;
  if (vd.ended) labels.push_back("</s>");
  write_attention_table(out_path, tokens, labels, vd.attention, {header});
  std::printf("wrote %ld x %ld attention table to %s\n", static_cast<long>(vd.attention.rows()),
              static_cast<long>(vd.attention.cols()), out_path.c_str());
  std::printf("value: %s%s\n", join(vd.tokens, " ").c_str(), vd.ended ? "" : " (no end marker)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"act-slot-value parser over utterances"};
  app.require_subcommand(1);
  const std::string header = argv_echo(argc, argv);

  std::string ontology_path, train_path, dev_path, test_path, vectors_path;
  std::string checkpoint_path, out_path, grammar_path, holdout_text;
  std::string pred_path, text, act, slot, fractions_text = "0.05,0.1,0.2,1.0";
  std::string seeds_text = "1,2,3";
  int n_train = 2000, n_dev = 400, n_test = 1000;
  uint64_t seed = 1;
  int threads = 1, max_value_len = 10;

  CLI::App* synth = app.add_subcommand("synthesize", "generate a grammar-based corpus");
  synth->add_option("--grammar", grammar_path, "grammar JSON (omit for the built-in one)");
  synth->add_option("--ontology", ontology_path, "ontology output path");
  synth->add_option("--train", train_path, "training corpus output path");
  synth->add_option("--dev", dev_path, "dev corpus output path");
  synth->add_option("--test", test_path, "test corpus output path");
  synth->add_option("--n-train", n_train, "training examples");
  synth->add_option("--n-dev", n_dev, "dev examples");
  synth->add_option("--n-test", n_test, "test examples");
  synth->add_option("--seed", seed, "master random seed");
  synth->add_option("--holdout-pairs", holdout_text,
                    "comma-separated act:slot pairs kept out of train/dev");

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a parser and write a checkpoint");
  train_cmd->add_option("--ontology", ontology_path, "ontology file")->required();
  train_cmd->add_option("--train", train_path, "training corpus")->required();
  train_cmd->add_option("--dev", dev_path, "dev corpus for early stopping");
  train_cmd->add_option("--word-vectors", vectors_path, "pretrained word vector file");
  train_cmd->add_option("--checkpoint", checkpoint_path, "model output path")->required();
  train_cmd->add_option("--out", out_path, "training report JSON output path");
  train_opts.attach(train_cmd);

  CLI::App* predict = app.add_subcommand("predict", "parse a corpus with a trained model");
  predict->add_option("--checkpoint", checkpoint_path, "model file")->required();
  predict->add_option("--test", test_path, "corpus to parse")->required();
  predict->add_option("--out", out_path, "predictions output path")->required();
  predict->add_option("--threads", threads, "worker threads");
  predict->add_option("--max-value-len", max_value_len, "value decode length budget");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
  evaluate->add_option("--ontology", ontology_path, "ontology file")->required();
  evaluate->add_option("--predictions", pred_path, "predictions file")->required();
  evaluate->add_option("--test", test_path, "gold corpus")->required();
  evaluate->add_option("--train", train_path, "training corpus for the seen/unseen split");
  evaluate->add_option("--out", out_path, "score report JSON output path");

  TrainOpts ablate_opts;
  CLI::App* ablate = app.add_subcommand("ablate", "training-size ablation grid");
  ablate->add_option("--ontology", ontology_path, "ontology file")->required();
  ablate->add_option("--train", train_path, "training corpus")->required();
  ablate->add_option("--dev", dev_path, "dev corpus")->required();
  ablate->add_option("--test", test_path, "test corpus")->required();
  ablate->add_option("--word-vectors", vectors_path, "pretrained word vector file");
  ablate->add_option("--fractions", fractions_text, "training fractions, comma-separated");
  ablate->add_option("--seeds", seeds_text, "one run per seed per fraction");
  ablate->add_option("--out", out_path, "table JSON output path");
  ablate_opts.attach(ablate);

  CLI::App* attn = app.add_subcommand("attn-dump", "decode one value and dump its attention");
  attn->add_option("--checkpoint", checkpoint_path, "model file")->required();
  attn->add_option("--text", text, "utterance")->required();
  attn->add_option("--act", act, "conditioning act")->required();
  attn->add_option("--slot", slot, "conditioning slot")->required();
  attn->add_option("--out", out_path, "attention table output path")->required();
  attn->add_option("--max-value-len", max_value_len, "value decode length budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synthesize(grammar_path, ontology_path, train_path, dev_path, test_path,
                            n_train, n_dev, n_test, seed, holdout_text, header);
    if (train_cmd->parsed())
      return cmd_train(ontology_path, train_path, dev_path, vectors_path, checkpoint_path,
                       out_path, train_opts);
    if (predict->parsed())
      return cmd_predict(checkpoint_path, test_path, out_path, threads, max_value_len, header);
    if (evaluate->parsed())
      return cmd_evaluate(ontology_path, pred_path, test_path, train_path, out_path);
    if (ablate->parsed())
      return cmd_ablate(ontology_path, train_path, dev_path, test_path, vectors_path,
                        fractions_text, seeds_text, out_path, ablate_opts);
    if (attn->parsed())
      return cmd_attn_dump(checkpoint_path, text, act, slot, out_path, max_value_len, header);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
