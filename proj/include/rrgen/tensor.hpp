#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rrgen/error.hpp"

namespace rrgen {

using Shape = std::vector<std::int64_t>;

std::string shape_str(const Shape& shape);
std::int64_t shape_numel(const Shape& shape);

// Dense tensor of 64-bit floats in row-major order. Copies share storage
// (handle semantics); deep_copy() detaches. A gradient buffer of the same
// length as the data exists only once a backward pass (or ensure_grad)
// touches the tensor.
//
// Gradients accumulate: backward() adds into leaf gradients until
// zero_grad() is called. Forward evaluation over tensors nobody mutates is
// safe from any number of threads; recording and backward are single-owner.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::int64_t numel() const;
  std::int64_t rank() const;
  std::int64_t dim(std::int64_t axis) const;

  double* data();
  const double* data() const;
  // Scalar tensors only.
  double value() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool has_grad() const;
  // Allocates a zeroed gradient buffer if absent.
  double* ensure_grad();
  // nullptr until a gradient buffer exists.
  const double* grad() const;
  void zero_grad();

  bool all_finite() const;
  Tensor deep_copy() const;

  // Storage identity; stable for the lifetime of the tensor.
  const void* id() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Records one backward rule per primitive op, in execution order. Replaying
// the rules in reverse visits each node exactly once. Gradients of tensors
// produced by the tape are reset at the start of every backward() so leaf
// gradients are the only state that accumulates across calls.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  void record(Tensor output, std::function<void()> backward_fn);

 private:
  struct Node {
    Tensor output;
    std::function<void()> backward;
  };
  std::vector<Node> nodes_;
  friend void backward(const Tensor& loss, Tape& tape);
};

// Binds `tape` as the recording target for ops on this thread. Without an
// active scope ops evaluate forward-only and track nothing.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

// Populates gradients of everything reachable from `loss` (a scalar produced
// by `tape`). Leaf gradients accumulate across calls until zeroed.
void backward(const Tensor& loss, Tape& tape);

// ---- primitive ops -------------------------------------------------------
// All ops propagate requires_grad and record a backward rule when a tape is
// active. Shapes are validated up front; mismatches throw ShapeError naming
// both operands.

// matmul supports [m,k]x[k,n] -> [m,n], [m,k]x[k] -> [m] and
// [k]x[k,n] -> [n] (row-vector convention). No other broadcasting.
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise same-shape add, plus the one allowed broadcast: [m,n] + [n]
// adds the vector to every row.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // Hadamard
Tensor scale(const Tensor& a, double factor);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);

// Rank-1, max-subtracted for stability. Outputs are strictly positive and
// sum to 1.
Tensor softmax(const Tensor& a);

// Rank-1 parts concatenated in order.
Tensor concat(std::span<const Tensor> parts);
// Rank-1 rows of equal length stacked into a [rows, n] matrix.
Tensor stack_rows(std::span<const Tensor> rows);
// Row lookup into a [rows, n] table; backward scatters into that row.
Tensor embedding(const Tensor& table, std::int64_t row);

Tensor sum(const Tensor& a);

// Mean negative log-likelihood of `targets` under row-wise softmax of
// `logits` ([batch, vocab]), restricted to positions where mask is true.
// An empty mask includes every position. Gradient flows to logits only.
Tensor cross_entropy(const Tensor& logits, const std::vector<std::int64_t>& targets,
                     const std::vector<bool>& mask = {});

// Update/reset/candidate GRU weights. w_* act on the input, u_* on the
// previous state, b_* are biases.
struct GruCell {
  Tensor w_update, u_update, b_update;
  Tensor w_reset, u_reset, b_reset;
  Tensor w_cand, u_cand, b_cand;

  std::int64_t input_dim() const { return w_update.dim(1); }
  std::int64_t hidden_dim() const { return w_update.dim(0); }
};

// h_new = (1-z) ⊙ h_prev + z ⊙ h~ with
//   z  = σ(W_z x + U_z h_prev + b_z)
//   r  = σ(W_r x + U_r h_prev + b_r)
//   h~ = tanh(W_h x + U_h (r ⊙ h_prev) + b_h)
// Composed from the primitives above, so it is differentiable end to end.
Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruCell& cell);

// ---- deterministic rng ---------------------------------------------------

// Stateless mix of two seeds into one (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// mt19937_64 behind hand-rolled draws so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }
  // Uniform in [0,1).
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::int64_t below(std::int64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::int64_t i = static_cast<std::int64_t>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<std::size_t>(i)],
                v[static_cast<std::size_t>(below(i + 1))]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rrgen
