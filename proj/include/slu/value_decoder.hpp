#pragma once

#include "slu/encoder.hpp"

namespace slu {

// Recurrent decoder state, packed [s; cell].
struct DecoderState {
  Expr hc;
};

// One decode step's distributions. mixture = gate * gen (zero-padded over the
// extension) + (1 - gate) * ptr, over the extended vocabulary; ptr carries
// attention mass summed per surface word, with in-base utterance words
// contributing to their base id.
struct StepResult {
  Expr mixture;    // ext_size
  Expr attention;  // T, sums to 1
  Expr gate;       // 1x1, in (0,1)
  Expr gen;        // |V|
  Expr ptr;        // ext_size
  DecoderState next;
};

// s0 = dec_init_W h~ + dec_init_b; cell starts at zero.
DecoderState init_decoder(Graph& g, const SluModel& model, const EncodedUtterance& enc);

// Advances the recurrent state on the previous word's embedding, injects the
// act/slot conditioning into s~, attends over the encoder states, and mixes
// the generation and copy distributions.
StepResult decode_step(Graph& g, const SluModel& model, const DecoderState& state,
                       int prev_word_id, const EncodedUtterance& enc, const ExtendedVocab& ev,
                       int act_idx, int slot_idx);

struct ValueDecode {
  std::vector<std::string> tokens;      // surface words, terminal marker excluded
  std::vector<double> logprobs;         // one per step run, terminal step included
  Eigen::MatrixXd attention;            // steps x T
  bool ended = false;                   // true when the end marker was produced
};

// Greedy argmax decoding until the end marker or max_len steps.
ValueDecode decode_value(Graph& g, const SluModel& model, const EncodedUtterance& enc,
                         const ExtendedVocab& ev, const std::string& act,
                         const std::string& slot, int max_len);

struct TeacherForcedLoss {
  Expr loss;
  int unk_mapped = 0;  // gold tokens renderable neither from base nor utterance
};

// Feeds gold previous tokens; loss is the sequence negative log-likelihood of
// the gold extended ids plus the terminal marker.
TeacherForcedLoss teacher_forced_nll(Graph& g, const SluModel& model,
                                     const EncodedUtterance& enc, const ExtendedVocab& ev,
                                     const std::string& act, const std::string& slot,
                                     const std::vector<std::string>& gold_value);

// Plain tabular text: comment header, then one labeled row of attention
// weights per decode step (columns are utterance positions).
void write_attention_table(const std::string& path, const std::vector<std::string>& tokens,
                           const std::vector<std::string>& step_labels,
                           const Eigen::MatrixXd& attention,
                           const std::vector<std::string>& header_lines = {});

}  // namespace slu
