#include "rrgen/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rrgen {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

thread_local Tape* g_active_tape = nullptr;

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  std::ostringstream msg;
  msg << op << ": incompatible shapes " << shape_str(a) << " and " << shape_str(b);
  throw ShapeError(msg.str());
}

}  // namespace

std::string shape_str(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

struct Tensor::Impl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until needed
  bool requires_grad = false;
};

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  for (std::int64_t d : shape) {
    if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->data.assign(static_cast<std::size_t>(shape_numel(t.impl_->shape)), 0.0);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  if (static_cast<std::int64_t>(values.size()) != t.numel()) {
    throw ShapeError("from_values: " + std::to_string(values.size()) +
                     " values for shape " + shape_str(t.shape()));
  }
  t.impl_->data = std::move(values);
  return t;
}

const Shape& Tensor::shape() const { return impl_->shape; }
std::int64_t Tensor::numel() const { return static_cast<std::int64_t>(impl_->data.size()); }
std::int64_t Tensor::rank() const { return static_cast<std::int64_t>(impl_->shape.size()); }
std::int64_t Tensor::dim(std::int64_t axis) const { return impl_->shape.at(static_cast<std::size_t>(axis)); }

double* Tensor::data() { return impl_->data.data(); }
const double* Tensor::data() const { return impl_->data.data(); }

double Tensor::value() const {
  if (numel() != 1) throw ContractError("value(): tensor of shape " + shape_str(shape()) + " is not scalar");
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }
void Tensor::set_requires_grad(bool on) { impl_->requires_grad = on; }
bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

double* Tensor::ensure_grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad.data();
}

const double* Tensor::grad() const { return impl_->grad.empty() ? nullptr : impl_->grad.data(); }

void Tensor::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

bool Tensor::all_finite() const {
  for (double v : impl_->data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::deep_copy() const {
  Tensor t;
  t.impl_ = std::make_shared<Impl>(*impl_);
  return t;
}

const void* Tensor::id() const { return impl_.get(); }

// ---- tape -----------------------------------------------------------------

void Tape::record(Tensor output, std::function<void()> backward_fn) {
  nodes_.push_back(Node{std::move(output), std::move(backward_fn)});
}

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

void backward(const Tensor& loss, Tape& tape) {
  if (loss.numel() != 1) {
    throw ContractError("backward: loss of shape " + shape_str(loss.shape()) + " is not scalar");
  }
  // Tape-produced gradients are scratch; only leaves accumulate across calls.
  for (auto& node : tape.nodes_) {
    node.output.ensure_grad();
    node.output.zero_grad();
  }
  Tensor seed = loss;  // shares storage
  seed.ensure_grad()[0] += 1.0;
  for (auto it = tape.nodes_.rbegin(); it != tape.nodes_.rend(); ++it) {
    it->backward();
  }
}

namespace {

// Output tensors of recorded ops require grad whenever an input does, so the
// chain keeps propagating.
Tensor op_output(Shape shape, bool requires_grad) {
  return Tensor::zeros(std::move(shape), requires_grad && g_active_tape != nullptr);
}

bool track(const Tensor& t) { return g_active_tape != nullptr && t.requires_grad(); }

void maybe_record(Tensor& out, std::function<void()> fn) {
  if (g_active_tape != nullptr && out.requires_grad()) {
    g_active_tape->record(out, std::move(fn));
  }
}

}  // namespace

// ---- ops -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  const bool a_mat = a.rank() == 2;
  const bool b_mat = b.rank() == 2;
  Shape out_shape;
  std::int64_t m, k, n;
  if (a_mat && b_mat) {
    m = a.dim(0); k = a.dim(1); n = b.dim(1);
    if (b.dim(0) != k) shape_fail("matmul", a.shape(), b.shape());
    out_shape = {m, n};
  } else if (a_mat && b.rank() == 1) {
    m = a.dim(0); k = a.dim(1); n = 1;
    if (b.dim(0) != k) shape_fail("matmul", a.shape(), b.shape());
    out_shape = {m};
  } else if (a.rank() == 1 && b_mat) {
    m = 1; k = a.dim(0); n = b.dim(1);
    if (b.dim(0) != k) shape_fail("matmul", a.shape(), b.shape());
    out_shape = {n};
  } else {
    shape_fail("matmul", a.shape(), b.shape());
  }

  Tensor out = op_output(std::move(out_shape), a.requires_grad() || b.requires_grad());
  {
    ConstMatMap ma(a.data(), m, k);
    ConstMatMap mb(b.data(), k, n);
    MatMap mo(out.data(), m, n);
    mo.noalias() = ma * mb;
  }

  maybe_record(out, [a = a, b = b, out, m, k, n]() mutable {
    ConstMatMap ma(a.data(), m, k);
    ConstMatMap mb(b.data(), k, n);
    ConstMatMap go(out.grad(), m, n);
    if (a.requires_grad()) {
      MatMap ga(a.ensure_grad(), m, k);
      ga.noalias() += go * mb.transpose();
    }
    if (b.requires_grad()) {
      MatMap gb(b.ensure_grad(), k, n);
      gb.noalias() += ma.transpose() * go;
    }
  });
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool bias_row = a.rank() == 2 && b.rank() == 1 && a.dim(1) == b.dim(0);
  if (!bias_row && a.shape() != b.shape()) shape_fail("add", a.shape(), b.shape());

  Tensor out = op_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::int64_t n = a.numel();
  if (bias_row) {
    const std::int64_t cols = b.dim(0);
    for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] + b.data()[i % cols];
  } else {
    for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] + b.data()[i];
  }

  maybe_record(out, [a = a, b = b, out, bias_row, n]() mutable {
    const double* go = out.grad();
    if (a.requires_grad()) {
      double* ga = a.ensure_grad();
      for (std::int64_t i = 0; i < n; ++i) ga[i] += go[i];
    }
    if (b.requires_grad()) {
      double* gb = b.ensure_grad();
      if (bias_row) {
        const std::int64_t cols = b.dim(0);
        for (std::int64_t i = 0; i < n; ++i) gb[i % cols] += go[i];
      } else {
        for (std::int64_t i = 0; i < n; ++i) gb[i] += go[i];
      }
    }
  });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail("sub", a.shape(), b.shape());
  Tensor out = op_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] - b.data()[i];

  maybe_record(out, [a = a, b = b, out, n]() mutable {
    const double* go = out.grad();
    if (a.requires_grad()) {
      double* ga = a.ensure_grad();
      for (std::int64_t i = 0; i < n; ++i) ga[i] += go[i];
    }
    if (b.requires_grad()) {
      double* gb = b.ensure_grad();
      for (std::int64_t i = 0; i < n; ++i) gb[i] -= go[i];
    }
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail("mul", a.shape(), b.shape());
  Tensor out = op_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] * b.data()[i];

  maybe_record(out, [a = a, b = b, out, n]() mutable {
    const double* go = out.grad();
    if (a.requires_grad()) {
      double* ga = a.ensure_grad();
      for (std::int64_t i = 0; i < n; ++i) ga[i] += go[i] * b.data()[i];
    }
    if (b.requires_grad()) {
      double* gb = b.ensure_grad();
      for (std::int64_t i = 0; i < n; ++i) gb[i] += go[i] * a.data()[i];
    }
  });
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = op_output(a.shape(), a.requires_grad());
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] * factor;

  maybe_record(out, [a = a, out, factor, n]() mutable {
    if (!a.requires_grad()) return;
    const double* go = out.grad();
    double* ga = a.ensure_grad();
    for (std::int64_t i = 0; i < n; ++i) ga[i] += go[i] * factor;
  });
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out = op_output(a.shape(), a.requires_grad());
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) out.data()[i] = std::tanh(a.data()[i]);

  maybe_record(out, [a = a, out, n]() mutable {
    if (!a.requires_grad()) return;
    const double* go = out.grad();
    double* ga = a.ensure_grad();
    for (std::int64_t i = 0; i < n; ++i) {
      const double y = out.data()[i];
      ga[i] += go[i] * (1.0 - y * y);
    }
  });
  return out;
}

Tensor sigmoid(const Tensor& a) {
  Tensor out = op_output(a.shape(), a.requires_grad());
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = a.data()[i];
    // Split on sign to avoid exp overflow.
    out.data()[i] = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                           : std::exp(x) / (1.0 + std::exp(x));
  }

  maybe_record(out, [a = a, out, n]() mutable {
    if (!a.requires_grad()) return;
    const double* go = out.grad();
    double* ga = a.ensure_grad();
    for (std::int64_t i = 0; i < n; ++i) {
      const double y = out.data()[i];
      ga[i] += go[i] * y * (1.0 - y);
    }
  });
  return out;
}

Tensor softmax(const Tensor& a) {
  if (a.rank() != 1) throw ShapeError("softmax: expected rank-1 input, got " + shape_str(a.shape()));
  Tensor out = op_output(a.shape(), a.requires_grad());
  const std::int64_t n = a.numel();
  double mx = a.data()[0];
  for (std::int64_t i = 1; i < n; ++i) mx = std::max(mx, a.data()[i]);
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    out.data()[i] = std::exp(a.data()[i] - mx);
    total += out.data()[i];
  }
  for (std::int64_t i = 0; i < n; ++i) out.data()[i] /= total;

  maybe_record(out, [a = a, out, n]() mutable {
    if (!a.requires_grad()) return;
    const double* go = out.grad();
    const double* y = out.data();
    double dot = 0.0;
    for (std::int64_t i = 0; i < n; ++i) dot += go[i] * y[i];
    double* ga = a.ensure_grad();
    for (std::int64_t i = 0; i < n; ++i) ga[i] += y[i] * (go[i] - dot);
  });
  return out;
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat: no parts");
  std::int64_t total = 0;
  bool needs_grad = false;
  for (const Tensor& p : parts) {
    if (p.rank() != 1) throw ShapeError("concat: expected rank-1 parts, got " + shape_str(p.shape()));
    total += p.numel();
    needs_grad = needs_grad || p.requires_grad();
  }
  Tensor out = op_output({total}, needs_grad);
  std::int64_t offset = 0;
  for (const Tensor& p : parts) {
    std::copy(p.data(), p.data() + p.numel(), out.data() + offset);
    offset += p.numel();
  }

  std::vector<Tensor> held(parts.begin(), parts.end());
  maybe_record(out, [held = std::move(held), out]() mutable {
    const double* go = out.grad();
    std::int64_t offset = 0;
    for (Tensor& p : held) {
      if (p.requires_grad()) {
        double* gp = p.ensure_grad();
        for (std::int64_t i = 0; i < p.numel(); ++i) gp[i] += go[offset + i];
      }
      offset += p.numel();
    }
  });
  return out;
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ContractError("stack_rows: no rows");
  const std::int64_t cols = rows.front().numel();
  bool needs_grad = false;
  for (const Tensor& r : rows) {
    if (r.rank() != 1 || r.numel() != cols) {
      shape_fail("stack_rows", rows.front().shape(), r.shape());
    }
    needs_grad = needs_grad || r.requires_grad();
  }
  Tensor out = op_output({static_cast<std::int64_t>(rows.size()), cols}, needs_grad);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].data(), rows[i].data() + cols, out.data() + static_cast<std::int64_t>(i) * cols);
  }

  std::vector<Tensor> held(rows.begin(), rows.end());
  maybe_record(out, [held = std::move(held), out, cols]() mutable {
    const double* go = out.grad();
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (!held[i].requires_grad()) continue;
      double* gr = held[i].ensure_grad();
      const double* row = go + static_cast<std::int64_t>(i) * cols;
      for (std::int64_t j = 0; j < cols; ++j) gr[j] += row[j];
    }
  });
  return out;
}

Tensor embedding(const Tensor& table, std::int64_t row) {
  if (table.rank() != 2) throw ShapeError("embedding: table of shape " + shape_str(table.shape()) + " is not rank-2");
  if (row < 0 || row >= table.dim(0)) {
    throw IndexError("embedding: row " + std::to_string(row) + " out of range for table " + shape_str(table.shape()));
  }
  const std::int64_t cols = table.dim(1);
  Tensor out = op_output({cols}, table.requires_grad());
  std::copy(table.data() + row * cols, table.data() + (row + 1) * cols, out.data());

  maybe_record(out, [table = table, out, row, cols]() mutable {
    if (!table.requires_grad()) return;
    const double* go = out.grad();
    double* gt = table.ensure_grad() + row * cols;
    for (std::int64_t j = 0; j < cols; ++j) gt[j] += go[j];
  });
  return out;
}

Tensor sum(const Tensor& a) {
  Tensor out = op_output({1}, a.requires_grad());
  double total = 0.0;
  for (std::int64_t i = 0; i < a.numel(); ++i) total += a.data()[i];
  out.data()[0] = total;

  maybe_record(out, [a = a, out]() mutable {
    if (!a.requires_grad()) return;
    const double g = out.grad()[0];
    double* ga = a.ensure_grad();
    for (std::int64_t i = 0; i < a.numel(); ++i) ga[i] += g;
  });
  return out;
}

Tensor cross_entropy(const Tensor& logits, const std::vector<std::int64_t>& targets,
                     const std::vector<bool>& mask) {
  if (logits.rank() != 2) {
    throw ShapeError("cross_entropy: logits of shape " + shape_str(logits.shape()) + " are not rank-2");
  }
  const std::int64_t batch = logits.dim(0);
  const std::int64_t vocab = logits.dim(1);
  if (static_cast<std::int64_t>(targets.size()) != batch) {
    throw ContractError("cross_entropy: " + std::to_string(targets.size()) +
                        " targets for batch of " + std::to_string(batch));
  }
  if (!mask.empty() && static_cast<std::int64_t>(mask.size()) != batch) {
    throw ContractError("cross_entropy: mask length " + std::to_string(mask.size()) +
                        " does not match batch " + std::to_string(batch));
  }
  for (std::int64_t i = 0; i < batch; ++i) {
    if (targets[static_cast<std::size_t>(i)] < 0 || targets[static_cast<std::size_t>(i)] >= vocab) {
      throw IndexError("cross_entropy: target " + std::to_string(targets[static_cast<std::size_t>(i)]) +
                       " at position " + std::to_string(i) + " outside vocab of " + std::to_string(vocab));
    }
  }

  auto included = [&mask](std::int64_t i) {
    return mask.empty() || mask[static_cast<std::size_t>(i)];
  };
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < batch; ++i) {
    if (included(i)) ++count;
  }
  if (count == 0) throw ContractError("cross_entropy: mask excludes every position");

  // Row-wise softmax cached for the backward rule.
  auto probs = std::make_shared<std::vector<double>>(static_cast<std::size_t>(batch * vocab));
  double loss = 0.0;
  for (std::int64_t i = 0; i < batch; ++i) {
    const double* row = logits.data() + i * vocab;
    double mx = row[0];
    for (std::int64_t j = 1; j < vocab; ++j) mx = std::max(mx, row[j]);
    double total = 0.0;
    for (std::int64_t j = 0; j < vocab; ++j) total += std::exp(row[j] - mx);
    const double lse = mx + std::log(total);
    double* prow = probs->data() + i * vocab;
    for (std::int64_t j = 0; j < vocab; ++j) prow[j] = std::exp(row[j] - lse);
    if (included(i)) loss += lse - row[targets[static_cast<std::size_t>(i)]];
  }

  Tensor out = op_output({1}, logits.requires_grad());
  out.data()[0] = loss / static_cast<double>(count);

  maybe_record(out, [logits = logits, out, targets, mask, probs, batch, vocab, count]() mutable {
    if (!logits.requires_grad()) return;
    const double g = out.grad()[0] / static_cast<double>(count);
    double* gl = logits.ensure_grad();
    for (std::int64_t i = 0; i < batch; ++i) {
      if (!mask.empty() && !mask[static_cast<std::size_t>(i)]) continue;
      const double* prow = probs->data() + i * vocab;
      double* grow = gl + i * vocab;
      for (std::int64_t j = 0; j < vocab; ++j) grow[j] += g * prow[j];
      grow[targets[static_cast<std::size_t>(i)]] -= g;
    }
  });
  return out;
}

Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruCell& cell) {
  if (x.rank() != 1 || x.dim(0) != cell.input_dim()) {
    shape_fail("gru_cell input", x.shape(), cell.w_update.shape());
  }
  if (h_prev.rank() != 1 || h_prev.dim(0) != cell.hidden_dim()) {
    shape_fail("gru_cell state", h_prev.shape(), cell.u_update.shape());
  }
  Tensor z = sigmoid(add(add(matmul(cell.w_update, x), matmul(cell.u_update, h_prev)), cell.b_update));
  Tensor r = sigmoid(add(add(matmul(cell.w_reset, x), matmul(cell.u_reset, h_prev)), cell.b_reset));
  Tensor cand = tanh(add(add(matmul(cell.w_cand, x), matmul(cell.u_cand, mul(r, h_prev))), cell.b_cand));
  // (1-z) ⊙ h_prev + z ⊙ cand, written without a ones constant.
  return add(h_prev, mul(z, sub(cand, h_prev)));
}

// ---- rng -------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Rng::below(std::int64_t n) {
  return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
}

}  // namespace rrgen
