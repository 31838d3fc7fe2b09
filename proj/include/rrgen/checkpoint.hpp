#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rrgen/params.hpp"
#include "rrgen/tensor.hpp"

namespace rrgen {

// Binary tensor container, byte layout documented in docs/file_formats.md:
//   magic "RRGTNSR1" (8 bytes)
//   u64 LE format version (currently 1)
//   u64 LE tensor count
// then per tensor, in order:
//   u64 LE name length, UTF-8 name bytes
//   u64 LE rank, rank x u64 LE dims
//   prod(dims) x f64 LE data
// Round-trips are bit-exact.

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, Tensor>>& tensors);

std::vector<std::pair<std::string, Tensor>> read_tensor_file(const std::filesystem::path& path);

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params);

// Loads values into already-registered parameters. Names and shapes must
// match the file exactly.
void load_checkpoint(const std::filesystem::path& path, ParamSet& params);

}  // namespace rrgen
