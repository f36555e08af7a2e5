#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgf/filter_basis.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

enum class Dtype : std::uint8_t { kF64 = 0, kF32 = 1 };

Dtype parse_dtype(const std::string& s);

// "SGF1", u64 n, u64 nnz, u64 indptr[n+1], u64 indices[nnz]; little-endian.
void write_csr(const std::filesystem::path& path, const CsrGraph& g);
CsrGraph read_csr(const std::filesystem::path& path);

// Edge list or SGF1 binary, picked by the file's magic.
CsrGraph load_graph(const std::filesystem::path& path, std::optional<std::size_t> n_hint = std::nullopt);

// "SGX1", u64 n, u64 F, u8 dtype, row-major values.
void write_features(const std::filesystem::path& path, const SignalMatrix& x, Dtype dtype = Dtype::kF64);
SignalMatrix read_features(const std::filesystem::path& path);
// Whitespace-separated text rows, one node per line.
SignalMatrix read_text_matrix(const std::filesystem::path& path);
// SGX1 if the magic matches, text otherwise.
SignalMatrix load_features(const std::filesystem::path& path);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

Splits read_splits(const std::filesystem::path& path);
void write_splits(const std::filesystem::path& path, const Splits& s);

// "SGB1", u64 n, u64 F, u64 count, u8 dtype, the images row-major, then a
// footer of u32 crc32 per image. A trailing "SGBW" section carries the
// channel ids, fusion and recombination weights.
void write_basis_stack(const std::filesystem::path& path, const BasisStack& st, Dtype dtype = Dtype::kF64);
BasisStack read_basis_stack(const std::filesystem::path& path);

std::uint32_t crc32_bytes(const void* data, std::size_t size, std::uint32_t seed = 0);
std::uint32_t crc32_file(const std::filesystem::path& path);
std::string crc32_hex(std::uint32_t crc);

struct ManifestEntry {
  std::string path;  // relative to the manifest directory
  std::uintmax_t bytes = 0;
  std::string crc32;
};

// manifest.json listing every file with size and crc32.
void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files,
                    const std::string& name = "manifest.json");
// Files whose size or checksum no longer match; empty means verified.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir, const std::string& name = "manifest.json");

}  // namespace sgf
