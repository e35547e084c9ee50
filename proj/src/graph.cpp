#include "slu/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace slu {

Param& ParameterStore::add_matrix(const std::string& name, int rows, int cols) {
  if (by_name_.count(name)) throw std::runtime_error("duplicate parameter '" + name + "'");
  auto p = std::make_unique<Param>();
  p->name = name;
  p->value = Eigen::MatrixXd::Zero(rows, cols);
  p->is_bias = false;
  p->index = static_cast<int>(params_.size());
  by_name_[name] = p->index;
  params_.push_back(std::move(p));
  return *params_.back();
}

Param& ParameterStore::add_bias(const std::string& name, int rows) {
  Param& p = add_matrix(name, rows, 1);
  p.is_bias = true;
  return p;
}

Param* ParameterStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

void ParameterStore::init(std::mt19937_64& rng) {
  for (auto& p : params_) {
    if (p->is_bias) {
      p->value.setZero();
      continue;
    }
    const double lim = 1.0 / std::sqrt(static_cast<double>(p->value.cols()));
    std::uniform_real_distribution<double> dist(-lim, lim);
    for (Eigen::Index c = 0; c < p->value.cols(); ++c)
      for (Eigen::Index r = 0; r < p->value.rows(); ++r) p->value(r, c) = dist(rng);
  }
}

long ParameterStore::total_components() const {
  long n = 0;
  for (const auto& p : params_) n += static_cast<long>(p->value.size());
  return n;
}

bool ParameterStore::all_finite() const {
  for (const auto& p : params_)
    if (!p->value.allFinite()) return false;
  return true;
}

int Graph::push(Node&& n) {
  if (backward_done_) throw std::runtime_error("graph: cannot grow after backward");
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Eigen::MatrixXd& Graph::grad(int i) {
  if (grads_[i].size() == 0)
    grads_[i] = Eigen::MatrixXd::Zero(nodes_[i].val.rows(), nodes_[i].val.cols());
  return grads_[i];
}

static void want_col(const Eigen::MatrixXd& m, const char* who) {
  if (m.cols() != 1) throw std::runtime_error(std::string(who) + ": expected a column vector");
}

Expr Graph::input(const Eigen::MatrixXd& value) {
  Node n;
  n.op = Op::kInput;
  n.val = value;
  return {push(std::move(n))};
}

Expr Graph::zeros(int rows) { return input(Eigen::MatrixXd::Zero(rows, 1)); }

Expr Graph::scalar_input(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return input(m);
}

Expr Graph::param(const Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return {it->second};
  Node n;
  n.op = Op::kParamRef;
  n.param = &p;
  n.val = p.value;
  int idx = push(std::move(n));
  param_nodes_[&p] = idx;
  return {idx};
}

Expr Graph::lookup(Expr matrix, int row) {
  const auto& m = nodes_[matrix.i].val;
  if (row < 0 || row >= m.rows()) throw std::runtime_error("lookup: row out of range");
  Node n;
  n.op = Op::kLookup;
  n.args = {matrix.i};
  n.i0 = row;
  n.val = m.row(row).transpose();
  return {push(std::move(n))};
}

Expr Graph::gather(Expr matrix, std::vector<int> rows) {
  const auto& m = nodes_[matrix.i].val;
  Node n;
  n.op = Op::kGather;
  n.args = {matrix.i};
  n.val.resize(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= m.rows()) throw std::runtime_error("gather: row out of range");
    n.val.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  }
  n.imap = std::move(rows);
  return {push(std::move(n))};
}

Expr Graph::matvec(Expr A, Expr x) {
  const auto& a = nodes_[A.i].val;
  const auto& v = nodes_[x.i].val;
  want_col(v, "matvec");
  if (a.cols() != v.rows()) throw std::runtime_error("matvec: shape mismatch");
  Node n;
  n.op = Op::kMatVec;
  n.args = {A.i, x.i};
  n.val.noalias() = a * v;
  return {push(std::move(n))};
}

Expr Graph::mat_t_vec(Expr A, Expr x) {
  const auto& a = nodes_[A.i].val;
  const auto& v = nodes_[x.i].val;
  want_col(v, "mat_t_vec");
  if (a.rows() != v.rows()) throw std::runtime_error("mat_t_vec: shape mismatch");
  Node n;
  n.op = Op::kMatTVec;
  n.args = {A.i, x.i};
  n.val.noalias() = a.transpose() * v;
  return {push(std::move(n))};
}

Expr Graph::affine(Expr A, Expr x, Expr b) {
  const auto& a = nodes_[A.i].val;
  const auto& v = nodes_[x.i].val;
  const auto& bias = nodes_[b.i].val;
  want_col(v, "affine");
  if (a.cols() != v.rows() || a.rows() != bias.rows() || bias.cols() != 1)
    throw std::runtime_error("affine: shape mismatch");
  Node n;
  n.op = Op::kAffine;
  n.args = {A.i, x.i, b.i};
  n.val.noalias() = a * v;
  n.val += bias;
  return {push(std::move(n))};
}

Expr Graph::add(Expr a, Expr b) {
  const auto& x = nodes_[a.i].val;
  const auto& y = nodes_[b.i].val;
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::runtime_error("add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.args = {a.i, b.i};
  n.val = x + y;
  return {push(std::move(n))};
}

Expr Graph::concat(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::runtime_error("concat: no parts");
  Eigen::Index total = 0;
  for (auto p : parts) {
    want_col(nodes_[p.i].val, "concat");
    total += nodes_[p.i].val.rows();
  }
  Node n;
  n.op = Op::kConcat;
  n.val.resize(total, 1);
  Eigen::Index at = 0;
  for (auto p : parts) {
    const auto& v = nodes_[p.i].val;
    n.val.block(at, 0, v.rows(), 1) = v;
    at += v.rows();
    n.args.push_back(p.i);
  }
  return {push(std::move(n))};
}

Expr Graph::concat_cols(const std::vector<Expr>& cols) {
  if (cols.empty()) throw std::runtime_error("concat_cols: no columns");
  const Eigen::Index rows = nodes_[cols[0].i].val.rows();
  Node n;
  n.op = Op::kConcatCols;
  n.val.resize(rows, static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) {
    const auto& v = nodes_[cols[k].i].val;
    want_col(v, "concat_cols");
    if (v.rows() != rows) throw std::runtime_error("concat_cols: ragged columns");
    n.val.col(static_cast<Eigen::Index>(k)) = v;
    n.args.push_back(cols[k].i);
  }
  return {push(std::move(n))};
}

Expr Graph::slice(Expr x, int offset, int len) {
  const auto& v = nodes_[x.i].val;
  want_col(v, "slice");
  if (offset < 0 || len < 0 || offset + len > v.rows())
    throw std::runtime_error("slice: range out of bounds");
  Node n;
  n.op = Op::kSlice;
  n.args = {x.i};
  n.i0 = offset;
  n.i1 = len;
  n.val = v.block(offset, 0, len, 1);
  return {push(std::move(n))};
}

Expr Graph::sigmoid(Expr x) {
  Node n;
  n.op = Op::kSigmoid;
  n.args = {x.i};
  n.val = nodes_[x.i].val.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return {push(std::move(n))};
}

Expr Graph::tanh(Expr x) {
  Node n;
  n.op = Op::kTanh;
  n.args = {x.i};
  n.val = nodes_[x.i].val.array().tanh().matrix();
  return {push(std::move(n))};
}

Expr Graph::relu(Expr x) {
  Node n;
  n.op = Op::kRelu;
  n.args = {x.i};
  n.val = nodes_[x.i].val.cwiseMax(0.0);
  return {push(std::move(n))};
}

Expr Graph::softmax(Expr x) {
  const auto& v = nodes_[x.i].val;
  want_col(v, "softmax");
  Node n;
  n.op = Op::kSoftmax;
  n.args = {x.i};
  const double mx = v.maxCoeff();
  Eigen::ArrayXd e = (v.array() - mx).exp();
  n.val = (e / e.sum()).matrix();
  return {push(std::move(n))};
}

Expr Graph::cmult(Expr a, Expr b) {
  const auto& x = nodes_[a.i].val;
  const auto& y = nodes_[b.i].val;
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::runtime_error("cmult: shape mismatch");
  Node n;
  n.op = Op::kCMult;
  n.args = {a.i, b.i};
  n.val = x.cwiseProduct(y);
  return {push(std::move(n))};
}

Expr Graph::cmult_const(Expr x, const Eigen::MatrixXd& m) {
  const auto& v = nodes_[x.i].val;
  if (v.rows() != m.rows() || v.cols() != m.cols())
    throw std::runtime_error("cmult_const: shape mismatch");
  Node n;
  n.op = Op::kCMultConst;
  n.args = {x.i};
  n.cmat = m;
  n.val = v.cwiseProduct(m);
  return {push(std::move(n))};
}

Expr Graph::dot(Expr a, Expr b) {
  const auto& x = nodes_[a.i].val;
  const auto& y = nodes_[b.i].val;
  want_col(x, "dot");
  if (x.rows() != y.rows() || y.cols() != 1) throw std::runtime_error("dot: shape mismatch");
  Node n;
  n.op = Op::kDot;
  n.args = {a.i, b.i};
  n.val.resize(1, 1);
  n.val(0, 0) = x.col(0).dot(y.col(0));
  return {push(std::move(n))};
}

Expr Graph::scalar_mul(Expr s, Expr v) {
  const auto& sv = nodes_[s.i].val;
  if (sv.rows() != 1 || sv.cols() != 1) throw std::runtime_error("scalar_mul: s must be 1x1");
  Node n;
  n.op = Op::kScalarMul;
  n.args = {s.i, v.i};
  n.val = sv(0, 0) * nodes_[v.i].val;
  return {push(std::move(n))};
}

Expr Graph::one_minus(Expr x) {
  Node n;
  n.op = Op::kOneMinus;
  n.args = {x.i};
  n.val = (1.0 - nodes_[x.i].val.array()).matrix();
  return {push(std::move(n))};
}

Expr Graph::pad(Expr x, int rows) {
  const auto& v = nodes_[x.i].val;
  want_col(v, "pad");
  if (rows < v.rows()) throw std::runtime_error("pad: target smaller than input");
  Node n;
  n.op = Op::kPad;
  n.args = {x.i};
  n.val = Eigen::MatrixXd::Zero(rows, 1);
  n.val.topRows(v.rows()) = v;
  return {push(std::move(n))};
}

Expr Graph::scatter_sum(Expr x, std::vector<int> map, int rows) {
  const auto& v = nodes_[x.i].val;
  want_col(v, "scatter_sum");
  if (static_cast<Eigen::Index>(map.size()) != v.rows())
    throw std::runtime_error("scatter_sum: map size mismatch");
  Node n;
  n.op = Op::kScatterSum;
  n.args = {x.i};
  n.val = Eigen::MatrixXd::Zero(rows, 1);
  for (size_t j = 0; j < map.size(); ++j) {
    if (map[j] < 0 || map[j] >= rows) throw std::runtime_error("scatter_sum: id out of range");
    n.val(map[j], 0) += v(static_cast<Eigen::Index>(j), 0);
  }
  n.imap = std::move(map);
  return {push(std::move(n))};
}

Expr Graph::lstm_cell(Expr x, Expr prev_hc, Expr Wx, Expr Wh, Expr b) {
  const auto& wx = nodes_[Wx.i].val;
  const auto& wh = nodes_[Wh.i].val;
  const auto& bias = nodes_[b.i].val;
  const auto& xv = nodes_[x.i].val;
  const auto& hc = nodes_[prev_hc.i].val;
  const Eigen::Index H = wx.rows() / 4;
  if (wx.rows() != 4 * H || wh.rows() != 4 * H || wh.cols() != H || bias.rows() != 4 * H ||
      xv.rows() != wx.cols() || hc.rows() != 2 * H)
    throw std::runtime_error("lstm_cell: shape mismatch");
  Node n;
  n.op = Op::kLstmStep;
  n.args = {x.i, prev_hc.i, Wx.i, Wh.i, b.i};
  Eigen::VectorXd pre = bias;
  pre.noalias() += wx * xv;
  pre.noalias() += wh * hc.topRows(H);
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  Eigen::VectorXd i_g = pre.segment(0, H).unaryExpr(sig);
  Eigen::VectorXd f_g = pre.segment(H, H).unaryExpr(sig);
  Eigen::VectorXd o_g = pre.segment(2 * H, H).unaryExpr(sig);
  Eigen::VectorXd c_cand = pre.segment(3 * H, H).array().tanh().matrix();
  Eigen::VectorXd c_new =
      f_g.cwiseProduct(hc.bottomRows(H)) + i_g.cwiseProduct(c_cand);
  Eigen::VectorXd tc = c_new.array().tanh().matrix();
  n.val.resize(2 * H, 1);
  n.val.topRows(H) = o_g.cwiseProduct(tc);
  n.val.bottomRows(H) = c_new;
  n.cache.resize(5 * H, 1);
  n.cache.block(0, 0, H, 1) = i_g;
  n.cache.block(H, 0, H, 1) = f_g;
  n.cache.block(2 * H, 0, H, 1) = o_g;
  n.cache.block(3 * H, 0, H, 1) = c_cand;
  n.cache.block(4 * H, 0, H, 1) = tc;
  return {push(std::move(n))};
}

Expr Graph::bce(Expr probs, const Eigen::VectorXd& targets) {
  const auto& p = nodes_[probs.i].val;
  want_col(p, "bce");
  if (p.rows() != targets.rows()) throw std::runtime_error("bce: shape mismatch");
  Node n;
  n.op = Op::kBceLoss;
  n.args = {probs.i};
  n.cmat = targets;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double pi = std::min(std::max(p(i, 0), kProbEps), 1.0 - kProbEps);
    loss -= targets(i) * std::log(pi) + (1.0 - targets(i)) * std::log(1.0 - pi);
  }
  n.val.resize(1, 1);
  n.val(0, 0) = loss;
  return {push(std::move(n))};
}

Expr Graph::pick_neg_log(Expr probs, int index) {
  const auto& p = nodes_[probs.i].val;
  want_col(p, "pick_neg_log");
  if (index < 0 || index >= p.rows())
    throw std::runtime_error("pick_neg_log: target id " + std::to_string(index) +
                             " outside distribution support [0, " + std::to_string(p.rows()) +
                             ")");
  Node n;
  n.op = Op::kPickNegLog;
  n.args = {probs.i};
  n.i0 = index;
  n.val.resize(1, 1);
  n.val(0, 0) = -std::log(std::max(p(index, 0), kProbEps));
  return {push(std::move(n))};
}

Expr Graph::weighted_sum(const std::vector<Expr>& scalars, const std::vector<double>& coeffs) {
  if (scalars.size() != coeffs.size() || scalars.empty())
    throw std::runtime_error("weighted_sum: bad arguments");
  Node n;
  n.op = Op::kWeightedSum;
  double total = 0.0;
  for (size_t k = 0; k < scalars.size(); ++k) {
    const auto& v = nodes_[scalars[k].i].val;
    if (v.rows() != 1 || v.cols() != 1) throw std::runtime_error("weighted_sum: non-scalar arg");
    total += coeffs[k] * v(0, 0);
    n.args.push_back(scalars[k].i);
  }
  n.coeffs = coeffs;
  n.val.resize(1, 1);
  n.val(0, 0) = total;
  return {push(std::move(n))};
}

Expr Graph::dropout(Expr x) {
  if (!training || dropout_rate <= 0.0) return x;
  if (!rng) throw std::runtime_error("dropout: no rng bound to graph");
  const double keep = 1.0 - dropout_rate;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& v = nodes_[x.i].val;
  Eigen::MatrixXd mask(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      mask(r, c) = u(*rng) < keep ? 1.0 / keep : 0.0;
  return cmult_const(x, mask);
}

void Graph::backward(Expr loss) {
  const auto& lv = nodes_[loss.i].val;
  if (lv.rows() != 1 || lv.cols() != 1) throw std::runtime_error("backward: loss must be 1x1");
  grads_.assign(nodes_.size(), Eigen::MatrixXd());
  backward_done_ = true;
  grad(loss.i)(0, 0) = 1.0;
  for (int i = loss.i; i >= 0; --i) {
    if (grads_[i].size() == 0) continue;  // not on the path to the loss
    const Node& n = nodes_[i];
    const Eigen::MatrixXd& g = grads_[i];
    switch (n.op) {
      case Op::kInput:
      case Op::kParamRef:
        break;
      case Op::kLookup:
        grad(n.args[0]).row(n.i0) += g.transpose();
        break;
      case Op::kGather: {
        auto& ga = grad(n.args[0]);
        for (size_t k = 0; k < n.imap.size(); ++k)
          ga.row(n.imap[k]) += g.row(static_cast<Eigen::Index>(k));
        break;
      }
      case Op::kMatVec: {
        const auto& A = nodes_[n.args[0]].val;
        const auto& x = nodes_[n.args[1]].val;
        grad(n.args[0]).noalias() += g * x.transpose();
        grad(n.args[1]).noalias() += A.transpose() * g;
        break;
      }
      case Op::kMatTVec: {
        const auto& A = nodes_[n.args[0]].val;
        const auto& x = nodes_[n.args[1]].val;
        grad(n.args[0]).noalias() += x * g.transpose();
        grad(n.args[1]).noalias() += A * g;
        break;
      }
      case Op::kAffine: {
        const auto& A = nodes_[n.args[0]].val;
        const auto& x = nodes_[n.args[1]].val;
        grad(n.args[0]).noalias() += g * x.transpose();
        grad(n.args[1]).noalias() += A.transpose() * g;
        grad(n.args[2]) += g;
        break;
      }
      case Op::kAdd:
        grad(n.args[0]) += g;
        grad(n.args[1]) += g;
        break;
      case Op::kConcat: {
        Eigen::Index at = 0;
        for (int a : n.args) {
          auto& ga = grad(a);
          ga += g.block(at, 0, ga.rows(), 1);
          at += ga.rows();
        }
        break;
      }
      case Op::kConcatCols: {
        for (size_t k = 0; k < n.args.size(); ++k)
          grad(n.args[k]) += g.col(static_cast<Eigen::Index>(k));
        break;
      }
      case Op::kSlice:
        grad(n.args[0]).block(n.i0, 0, n.i1, 1) += g;
        break;
      case Op::kSigmoid:
        grad(n.args[0]) += g.cwiseProduct(
            n.val.cwiseProduct((1.0 - n.val.array()).matrix()));
        break;
      case Op::kTanh:
        grad(n.args[0]) += g.cwiseProduct((1.0 - n.val.array().square()).matrix());
        break;
      case Op::kRelu: {
        const auto& x = nodes_[n.args[0]].val;
        grad(n.args[0]) +=
            g.cwiseProduct((x.array() > 0.0).cast<double>().matrix());
        break;
      }
      case Op::kSoftmax: {
        const double inner = (g.cwiseProduct(n.val)).sum();
        grad(n.args[0]) += n.val.cwiseProduct((g.array() - inner).matrix());
        break;
      }
      case Op::kCMult:
        grad(n.args[0]) += g.cwiseProduct(nodes_[n.args[1]].val);
        grad(n.args[1]) += g.cwiseProduct(nodes_[n.args[0]].val);
        break;
      case Op::kCMultConst:
        grad(n.args[0]) += g.cwiseProduct(n.cmat);
        break;
      case Op::kDot: {
        const double gs = g(0, 0);
        grad(n.args[0]) += gs * nodes_[n.args[1]].val;
        grad(n.args[1]) += gs * nodes_[n.args[0]].val;
        break;
      }
      case Op::kScalarMul: {
        const double s = nodes_[n.args[0]].val(0, 0);
        grad(n.args[0])(0, 0) += (g.cwiseProduct(nodes_[n.args[1]].val)).sum();
        grad(n.args[1]) += s * g;
        break;
      }
      case Op::kOneMinus:
        grad(n.args[0]) -= g;
        break;
      case Op::kPad: {
        auto& ga = grad(n.args[0]);
        ga += g.topRows(ga.rows());
        break;
      }
      case Op::kScatterSum: {
        auto& ga = grad(n.args[0]);
        for (size_t j = 0; j < n.imap.size(); ++j)
          ga(static_cast<Eigen::Index>(j), 0) += g(n.imap[j], 0);
        break;
      }
      case Op::kLstmStep: {
        const Eigen::Index H = n.val.rows() / 2;
        const auto& hc_prev = nodes_[n.args[1]].val;
        const auto& wx = nodes_[n.args[2]].val;
        const auto& wh = nodes_[n.args[3]].val;
        const auto i_g = n.cache.block(0, 0, H, 1).array();
        const auto f_g = n.cache.block(H, 0, H, 1).array();
        const auto o_g = n.cache.block(2 * H, 0, H, 1).array();
        const auto c_cand = n.cache.block(3 * H, 0, H, 1).array();
        const auto tc = n.cache.block(4 * H, 0, H, 1).array();
        const auto gh = g.topRows(H).array();
        const auto gc = g.bottomRows(H).array();
        Eigen::ArrayXd dc = gc + gh * o_g * (1.0 - tc.square());
        Eigen::VectorXd dpre(4 * H);
        dpre.segment(0, H) = (dc * c_cand * i_g * (1.0 - i_g)).matrix();
        dpre.segment(H, H) =
            (dc * hc_prev.bottomRows(H).array() * f_g * (1.0 - f_g)).matrix();
        dpre.segment(2 * H, H) = (gh * tc * o_g * (1.0 - o_g)).matrix();
        dpre.segment(3 * H, H) = (dc * i_g * (1.0 - c_cand.square())).matrix();
        grad(n.args[0]).noalias() += wx.transpose() * dpre;
        auto& ghc = grad(n.args[1]);
        ghc.topRows(H).noalias() += wh.transpose() * dpre;
        ghc.bottomRows(H) += (dc * f_g).matrix();
        grad(n.args[2]).noalias() += dpre * nodes_[n.args[0]].val.transpose();
        grad(n.args[3]).noalias() += dpre * hc_prev.topRows(H).transpose();
        grad(n.args[4]) += dpre;
        break;
      }
      case Op::kBceLoss: {
        const double gs = g(0, 0);
        const auto& p = nodes_[n.args[0]].val;
        auto& gp = grad(n.args[0]);
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
          const double pi = p(k, 0);
          if (pi <= kProbEps || pi >= 1.0 - kProbEps) continue;  // clamp active
          gp(k, 0) += gs * (-n.cmat(k, 0) / pi + (1.0 - n.cmat(k, 0)) / (1.0 - pi));
        }
        break;
      }
      case Op::kPickNegLog: {
        const double p = nodes_[n.args[0]].val(n.i0, 0);
        if (p > kProbEps) grad(n.args[0])(n.i0, 0) += -g(0, 0) / p;
        break;
      }
      case Op::kWeightedSum: {
        const double gs = g(0, 0);
        for (size_t k = 0; k < n.args.size(); ++k)
          grad(n.args[k])(0, 0) += gs * n.coeffs[k];
        break;
      }
    }
  }
}

void Graph::add_param_grads(const ParameterStore& store,
                            std::vector<Eigen::MatrixXd>& acc) const {
  if (acc.size() != static_cast<size_t>(store.size()))
    acc.assign(store.size(), Eigen::MatrixXd());
  for (const auto& [p, idx] : param_nodes_) {
    if (grads_.empty() || grads_[idx].size() == 0) continue;
    auto& slot = acc[p->index];
    if (slot.size() == 0)
      slot = grads_[idx];
    else
      slot += grads_[idx];
  }
}

Eigen::MatrixXd Graph::grad_of(const Param& p) const {
  auto it = param_nodes_.find(&p);
  if (it == param_nodes_.end() || grads_.empty() || grads_[it->second].size() == 0)
    return Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols());
  return grads_[it->second];
}

void Graph::check_finite(Expr e, const std::string& what) const {
  if (!nodes_[e.i].val.allFinite())
    throw std::runtime_error("non-finite values in " + what);
}

}  // namespace slu
