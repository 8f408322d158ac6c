#pragma once

#include <Eigen/Core>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sparse_rom/errors.hpp"

namespace sparse_rom::detail {

inline std::filesystem::path temp_sibling(const std::filesystem::path& target) {
  static thread_local unsigned counter = 0;
  return target.parent_path() / (target.filename().string() + ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
}

/// Write-temp-then-rename so readers never observe a partial file.
inline void write_bytes_atomic(const std::filesystem::path& target, const char* data, std::size_t size) {
  const auto tmp = temp_sibling(target);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline void write_text_atomic(const std::filesystem::path& target, const std::string& text) {
  write_bytes_atomic(target, text.data(), text.size());
}

inline void write_f64_le(const std::filesystem::path& target, const Eigen::VectorXd& v) {
  std::vector<char> buf(static_cast<std::size_t>(v.size()) * 8);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) buf[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_bytes_atomic(target, buf.data(), buf.size());
}

inline Eigen::VectorXd read_f64_le(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error("cannot read " + source.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() % 8 != 0) throw DimensionError(source.string() + " is not a float64 array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(buf.size() / 8));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace sparse_rom::detail
