#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rrgen/tensor.hpp"

namespace rrgen {

// Ordered collection of uniquely named trainable tensors. Registration order
// is the canonical order for initialization, optimizer state and checkpoints.
class ParamSet {
 public:
  // Returns a handle sharing the registered tensor's storage.
  Tensor add(std::string name, Tensor tensor);

  Tensor* find(const std::string& name);
  const Tensor* find(const std::string& name) const;
  const Tensor& at(const std::string& name) const;

  std::span<const std::pair<std::string, Tensor>> items() const { return items_; }
  std::size_t count() const { return items_.size(); }
  std::int64_t total_size() const;

  bool has(const std::string& name) const { return find(name) != nullptr; }
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

}  // namespace rrgen
