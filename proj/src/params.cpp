#include "rrgen/params.hpp"

#include "rrgen/error.hpp"

namespace rrgen {

Tensor ParamSet::add(std::string name, Tensor tensor) {
  if (find(name) != nullptr) throw ContractError("duplicate parameter name: " + name);
  tensor.set_requires_grad(true);
  items_.emplace_back(std::move(name), tensor);
  return tensor;
}

Tensor* ParamSet::find(const std::string& name) {
  for (auto& [key, value] : items_) {
    if (key == name) return &value;
  }
  return nullptr;
}

const Tensor* ParamSet::find(const std::string& name) const {
  for (const auto& [key, value] : items_) {
    if (key == name) return &value;
  }
  return nullptr;
}

const Tensor& ParamSet::at(const std::string& name) const {
  const Tensor* t = find(name);
  if (t == nullptr) throw ContractError("unknown parameter: " + name);
  return *t;
}

std::int64_t ParamSet::total_size() const {
  std::int64_t total = 0;
  for (const auto& [key, value] : items_) total += value.numel();
  return total;
}

void ParamSet::zero_grad() {
  for (auto& [key, value] : items_) value.zero_grad();
}

}  // namespace rrgen
