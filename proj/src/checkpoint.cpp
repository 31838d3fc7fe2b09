#include "rrgen/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "rrgen/error.hpp"
#include "rrgen/io.hpp"

namespace rrgen {

namespace {

constexpr char kMagic[8] = {'R', 'R', 'G', 'T', 'N', 'S', 'R', '1'};
constexpr std::uint64_t kVersion = 1;

}  // namespace

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, Tensor>>& tensors) {
  const std::filesystem::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + partial.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put_u64(out, kVersion);
    put_u64(out, tensors.size());
    for (const auto& [name, tensor] : tensors) {
      put_string(out, name);
      put_u64(out, static_cast<std::uint64_t>(tensor.rank()));
      for (std::int64_t d : tensor.shape()) put_u64(out, static_cast<std::uint64_t>(d));
      for (std::int64_t i = 0; i < tensor.numel(); ++i) put_f64(out, tensor.data()[i]);
    }
    if (!out) throw IoError("write failed for " + partial.string());
  }
  std::filesystem::rename(partial, path);
}

std::vector<std::pair<std::string, Tensor>> read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + " is not a tensor file");
  }
  const std::uint64_t version = get_u64(in);
  if (version != kVersion) {
    throw IoError(path.string() + ": unsupported tensor file version " + std::to_string(version));
  }
  const std::uint64_t count = get_u64(in);

  std::vector<std::pair<std::string, Tensor>> tensors;
  tensors.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string name = get_string(in);
    const std::uint64_t rank = get_u64(in);
    Shape shape(rank);
    for (std::uint64_t i = 0; i < rank; ++i) shape[i] = static_cast<std::int64_t>(get_u64(in));
    Tensor tensor = Tensor::zeros(shape);
    for (std::int64_t i = 0; i < tensor.numel(); ++i) tensor.data()[i] = get_f64(in);
    tensors.emplace_back(std::move(name), std::move(tensor));
  }
  return tensors;
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params) {
  std::vector<std::pair<std::string, Tensor>> tensors(params.items().begin(), params.items().end());
  write_tensor_file(path, tensors);
}

void load_checkpoint(const std::filesystem::path& path, ParamSet& params) {
  auto tensors = read_tensor_file(path);
  if (tensors.size() != params.count()) {
    throw IoError(path.string() + ": holds " + std::to_string(tensors.size()) +
                  " tensors, expected " + std::to_string(params.count()));
  }
  for (auto& [name, tensor] : tensors) {
    Tensor* target = params.find(name);
    if (target == nullptr) throw IoError(path.string() + ": unexpected tensor \"" + name + "\"");
    if (target->shape() != tensor.shape()) {
      throw IoError(path.string() + ": tensor \"" + name + "\" has shape " +
                    shape_str(tensor.shape()) + ", expected " + shape_str(target->shape()));
    }
    std::copy(tensor.data(), tensor.data() + tensor.numel(), target->data());
  }
}

}  // namespace rrgen
