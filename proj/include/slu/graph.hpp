#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace slu {

// A trainable tensor. Shapes are fixed at registration; values are updated
// only by the optimizer (single writer), reads during forward/backward are
// lock-free.
struct Param {
  std::string name;
  Eigen::MatrixXd value;
  bool is_bias = false;
  int index = -1;  // position in the owning ParameterStore
};

class ParameterStore {
 public:
  Param& add_matrix(const std::string& name, int rows, int cols);
  Param& add_bias(const std::string& name, int rows);

  int size() const { return static_cast<int>(params_.size()); }
  Param& at(int i) { return *params_[i]; }
  const Param& at(int i) const { return *params_[i]; }
  Param* find(const std::string& name);

  // U[-1/sqrt(fan_in), +1/sqrt(fan_in)] for matrices (fan_in = columns),
  // zeros for biases. Draws in registration order.
  void init(std::mt19937_64& rng);

  long total_components() const;
  bool all_finite() const;

 private:
  std::vector<std::unique_ptr<Param>> params_;
  std::unordered_map<std::string, int> by_name_;
};

struct Expr {
  int i = -1;
  bool valid() const { return i >= 0; }
};

enum class Op : uint8_t {
  kInput,
  kParamRef,
  kLookup,      // row of arg matrix as a column vector
  kGather,      // selected rows of arg matrix
  kMatVec,      // A * x
  kMatTVec,     // A^T * x
  kAffine,      // A * x + b
  kAdd,
  kConcat,      // stack column vectors vertically
  kConcatCols,  // stack column vectors side by side
  kSlice,       // row range of a column vector
  kSigmoid,
  kTanh,
  kRelu,
  kSoftmax,
  kCMult,
  kCMultConst,  // elementwise by a stored constant (dropout mask)
  kDot,
  kScalarMul,  // (1x1) * vector
  kOneMinus,
  kPad,         // zero-extend a column vector at the bottom
  kScatterSum,  // out[map[j]] += in[j]
  kLstmStep,
  kBceLoss,
  kPickNegLog,
  kWeightedSum,
};

struct Node {
  Op op;
  std::vector<int> args;
  Eigen::MatrixXd val;
  const Param* param = nullptr;
  int i0 = 0, i1 = 0;          // row index / slice offset+len / pad size / pick index
  std::vector<int> imap;       // gather rows, scatter map
  Eigen::MatrixXd cmat;        // constant payload (targets, dropout mask)
  std::vector<double> coeffs;  // weighted sum coefficients
  Eigen::MatrixXd cache;       // lstm activations
};

// Eagerly evaluated computation tape. One graph per utterance (or per loss);
// not thread-safe, but separate graphs over frozen parameters may run
// concurrently. Gradients accumulate in graph-local storage, never in Param.
class Graph {
 public:
  bool training = false;
  double dropout_rate = 0.0;
  std::mt19937_64* rng = nullptr;

  Expr input(const Eigen::MatrixXd& value);
  Expr zeros(int rows);
  Expr scalar_input(double v);
  Expr param(const Param& p);  // one node per Param per graph

  Expr lookup(Expr matrix, int row);
  Expr gather(Expr matrix, std::vector<int> rows);
  Expr matvec(Expr A, Expr x);
  Expr mat_t_vec(Expr A, Expr x);
  Expr affine(Expr A, Expr x, Expr b);
  Expr add(Expr a, Expr b);
  Expr concat(const std::vector<Expr>& parts);
  Expr concat_cols(const std::vector<Expr>& cols);
  Expr slice(Expr x, int offset, int len);
  Expr sigmoid(Expr x);
  Expr tanh(Expr x);
  Expr relu(Expr x);
  Expr softmax(Expr x);
  Expr cmult(Expr a, Expr b);
  Expr cmult_const(Expr x, const Eigen::MatrixXd& m);
  Expr dot(Expr a, Expr b);
  Expr scalar_mul(Expr s, Expr v);
  Expr one_minus(Expr x);
  Expr pad(Expr x, int rows);
  Expr scatter_sum(Expr x, std::vector<int> map, int rows);
  Expr lstm_cell(Expr x, Expr prev_hc, Expr Wx, Expr Wh, Expr b);
  Expr bce(Expr probs, const Eigen::VectorXd& targets);
  Expr pick_neg_log(Expr probs, int index);
  Expr weighted_sum(const std::vector<Expr>& scalars, const std::vector<double>& coeffs);

  // Inverted-mask dropout; identity when not training or rate is zero.
  Expr dropout(Expr x);

  const Eigen::MatrixXd& val(Expr e) const { return nodes_[e.i].val; }
  double scalar(Expr e) const { return nodes_[e.i].val(0, 0); }
  int rows(Expr e) const { return static_cast<int>(nodes_[e.i].val.rows()); }

  void backward(Expr loss);

  // Adds this graph's parameter gradients into acc (indexed like the store;
  // empty cells are treated as zero and allocated on first touch).
  void add_param_grads(const ParameterStore& store, std::vector<Eigen::MatrixXd>& acc) const;
  // Gradient of the last backward()'s loss w.r.t. p; zero matrix if untouched.
  Eigen::MatrixXd grad_of(const Param& p) const;

  void check_finite(Expr e, const std::string& what) const;
  size_t size() const { return nodes_.size(); }

 private:
  int push(Node&& n);
  Eigen::MatrixXd& grad(int i);

  std::vector<Node> nodes_;
  std::vector<Eigen::MatrixXd> grads_;
  std::unordered_map<const Param*, int> param_nodes_;
  bool backward_done_ = false;
};

constexpr double kProbEps = 1e-12;

}  // namespace slu
