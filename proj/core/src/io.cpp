#include "sgf/io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgf/errors.hpp"

namespace sgf {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

using Magic = std::array<char, 4>;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw ValidationError("write failed on " + path_.string());
  }
  void magic(const char* m) { bytes(m, 4); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u8(std::uint8_t v) { bytes(&v, 1); }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw ValidationError("cannot open " + path.string());
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw ParseError("truncated file " + path_.string());
  }
  void expect(const char* m) {
    Magic got{};
    bytes(got.data(), 4);
    if (std::memcmp(got.data(), m, 4) != 0) {
      throw ParseError(path_.string() + ": expected magic " + std::string(m, 4));
    }
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    bytes(&v, sizeof v);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    bytes(&v, sizeof v);
    return v;
  }
  std::uint8_t u8() {
    std::uint8_t v = 0;
    bytes(&v, 1);
    return v;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

bool has_magic(const std::filesystem::path& path, const char* m) {
  std::ifstream in(path, std::ios::binary);
  Magic got{};
  in.read(got.data(), 4);
  return in.gcount() == 4 && std::memcmp(got.data(), m, 4) == 0;
}

// Values of a row-major matrix in the requested storage type.
std::vector<unsigned char> encode(const SignalMatrix& m, Dtype dtype) {
  const auto count = static_cast<std::size_t>(m.size());
  std::vector<unsigned char> buf;
  if (dtype == Dtype::kF64) {
    buf.resize(count * sizeof(double));
    std::memcpy(buf.data(), m.data(), buf.size());
  } else {
    buf.resize(count * sizeof(float));
    for (std::size_t i = 0; i < count; ++i) {
      const auto f = static_cast<float>(m.data()[i]);
      std::memcpy(buf.data() + i * sizeof(float), &f, sizeof f);
    }
  }
  return buf;
}

SignalMatrix decode(const std::vector<unsigned char>& buf, std::size_t n, std::size_t f, Dtype dtype) {
  SignalMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  const std::size_t count = n * f;
  if (dtype == Dtype::kF64) {
    std::memcpy(m.data(), buf.data(), count * sizeof(double));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float v = 0;
      std::memcpy(&v, buf.data() + i * sizeof(float), sizeof v);
      m.data()[i] = v;
    }
  }
  return m;
}

std::size_t width(Dtype d) { return d == Dtype::kF64 ? sizeof(double) : sizeof(float); }

Dtype dtype_from_byte(std::uint8_t b) {
  if (b > 1) throw ParseError("unknown dtype flag " + std::to_string(b));
  return static_cast<Dtype>(b);
}

// Guards allocation sizes read from untrusted headers.
void check_size(std::uint64_t n, std::uint64_t f, const std::filesystem::path& path) {
  constexpr std::uint64_t kMax = std::uint64_t{1} << 40;
  if (n > kMax || f > kMax || (f != 0 && n > kMax / f)) throw ParseError(path.string() + ": implausible header");
  const auto bytes = std::filesystem::file_size(path);
  if (n * f > bytes) throw ParseError(path.string() + ": header larger than file");
}

}  // namespace

Dtype parse_dtype(const std::string& s) {
  if (s == "f64") return Dtype::kF64;
  if (s == "f32") return Dtype::kF32;
  throw ValidationError("dtype must be f32 or f64, got '" + s + "'");
}

void write_csr(const std::filesystem::path& path, const CsrGraph& g) {
  Writer w(path);
  w.magic("SGF1");
  w.u64(g.n());
  w.u64(g.nnz());
  for (std::size_t v : g.indptr()) w.u64(v);
  for (std::size_t v : g.indices()) w.u64(v);
}

CsrGraph read_csr(const std::filesystem::path& path) {
  Reader r(path);
  r.expect("SGF1");
  const std::uint64_t n = r.u64();
  const std::uint64_t nnz = r.u64();
  check_size(n + 1 + nnz, 8, path);
  std::vector<std::size_t> indptr(n + 1), indices(nnz);
  for (auto& v : indptr) v = r.u64();
  for (auto& v : indices) v = r.u64();
  return CsrGraph(n, std::move(indptr), std::move(indices));
}

CsrGraph load_graph(const std::filesystem::path& path, std::optional<std::size_t> n_hint) {
  if (has_magic(path, "SGF1")) {
    CsrGraph g = read_csr(path);
    if (n_hint && g.n() != *n_hint) throw BoundsError("binary graph has n = " + std::to_string(g.n()));
    return g.has_self_loops() ? g : g.with_self_loops();
  }
  return load_edge_list(path, n_hint);
}

void write_features(const std::filesystem::path& path, const SignalMatrix& x, Dtype dtype) {
  Writer w(path);
  w.magic("SGX1");
  w.u64(static_cast<std::uint64_t>(x.rows()));
  w.u64(static_cast<std::uint64_t>(x.cols()));
  w.u8(static_cast<std::uint8_t>(dtype));
  const auto buf = encode(x, dtype);
  w.bytes(buf.data(), buf.size());
}

SignalMatrix read_features(const std::filesystem::path& path) {
  Reader r(path);
  r.expect("SGX1");
  const std::uint64_t n = r.u64();
  const std::uint64_t f = r.u64();
  const Dtype dtype = dtype_from_byte(r.u8());
  check_size(n, f, path);
  std::vector<unsigned char> buf(n * f * width(dtype));
  r.bytes(buf.data(), buf.size());
  return decode(buf, n, f, dtype);
}

SignalMatrix read_text_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::size_t c = 0;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw ParseError("bad number '" + tok + "'", lineno);
      }
      ++c;
    }
    if (c == 0) continue;
    if (rows > 0 && c != cols) throw ParseError("row has " + std::to_string(c) + " values, expected " + std::to_string(cols), lineno);
    cols = c;
    ++rows;
  }
  SignalMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (rows > 0) std::memcpy(m.data(), values.data(), values.size() * sizeof(double));
  return m;
}

SignalMatrix load_features(const std::filesystem::path& path) {
  return has_magic(path, "SGX1") ? read_features(path) : read_text_matrix(path);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    long long v = 0;
    if (!(ls >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("malformed label line", lineno);
    }
    std::string rest;
    if (ls >> rest) throw ParseError("trailing tokens on label line", lineno);
    if (v < 0 || v > 1'000'000) throw ParseError("label out of range", lineno);
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (int y : labels) out << y << '\n';
}

Splits read_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("splits JSON: ") + e.what());
  }
  Splits s;
  auto grab = [&](const char* key, std::vector<std::size_t>& dst) {
    if (!j.contains(key) || !j[key].is_array()) throw ParseError(std::string("splits JSON lacks array '") + key + "'");
    for (const auto& v : j[key]) {
      if (!v.is_number_unsigned()) throw ParseError(std::string("non-index entry in '") + key + "'");
      dst.push_back(v.get<std::size_t>());
    }
  };
  grab("train", s.train);
  grab("val", s.val);
  grab("test", s.test);
  return s;
}

void write_splits(const std::filesystem::path& path, const Splits& s) {
  nlohmann::json j{{"train", s.train}, {"val", s.val}, {"test", s.test}};
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump() << '\n';
}

std::uint32_t crc32_bytes(const void* data, std::size_t size, std::uint32_t seed) {
  uLong crc = seed;
  const auto* p = static_cast<const Bytef*>(data);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<char> buf(1 << 16);
  std::uint32_t crc = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    crc = crc32_bytes(buf.data(), static_cast<std::size_t>(in.gcount()), crc);
  }
  return crc;
}

std::string crc32_hex(std::uint32_t crc) {
  char s[9];
  std::snprintf(s, sizeof s, "%08x", crc);
  return s;
}

void write_basis_stack(const std::filesystem::path& path, const BasisStack& st, Dtype dtype) {
  Writer w(path);
  const auto n = static_cast<std::uint64_t>(st.rows());
  const auto f = static_cast<std::uint64_t>(st.cols());
  w.magic("SGB1");
  w.u64(n);
  w.u64(f);
  w.u64(st.size());
  w.u8(static_cast<std::uint8_t>(dtype));
  std::vector<std::uint32_t> crcs;
  for (const auto& h : st.images) {
    if (static_cast<std::uint64_t>(h.rows()) != n || static_cast<std::uint64_t>(h.cols()) != f) {
      throw ShapeError("basis images differ in shape");
    }
    const auto buf = encode(h, dtype);
    crcs.push_back(crc32_bytes(buf.data(), buf.size()));
    w.bytes(buf.data(), buf.size());
  }
  for (auto c : crcs) w.u32(c);
  w.magic("SGBW");
  w.u64(static_cast<std::uint64_t>(st.channels));
  w.u8(static_cast<std::uint8_t>(st.fusion == Fusion::kConcat ? 1 : 0));
  for (int c : st.channel) w.u32(static_cast<std::uint32_t>(c));
  for (Eigen::Index k = 0; k < st.weights.rows(); ++k) {
    for (Eigen::Index j = 0; j < st.weights.cols(); ++j) {
      const double v = st.weights(k, j);
      w.bytes(&v, sizeof v);
    }
  }
}

BasisStack read_basis_stack(const std::filesystem::path& path) {
  Reader r(path);
  r.expect("SGB1");
  const std::uint64_t n = r.u64();
  const std::uint64_t f = r.u64();
  const std::uint64_t count = r.u64();
  const Dtype dtype = dtype_from_byte(r.u8());
  check_size(n * f, count, path);
  BasisStack st;
  std::vector<std::uint32_t> crcs;
  for (std::uint64_t k = 0; k < count; ++k) {
    std::vector<unsigned char> buf(n * f * width(dtype));
    r.bytes(buf.data(), buf.size());
    crcs.push_back(crc32_bytes(buf.data(), buf.size()));
    st.images.push_back(decode(buf, n, f, dtype));
  }
  for (std::uint64_t k = 0; k < count; ++k) {
    if (r.u32() != crcs[k]) throw ParseError(path.string() + ": checksum mismatch on image " + std::to_string(k));
  }
  st.channel.assign(static_cast<std::size_t>(count), 0);
  st.weights = DenseMatrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(f));
  if (r.at_end()) return st;
  r.expect("SGBW");
  st.channels = static_cast<int>(r.u64());
  st.fusion = r.u8() ? Fusion::kConcat : Fusion::kSum;
  for (auto& c : st.channel) c = static_cast<int>(r.u32());
  for (Eigen::Index k = 0; k < st.weights.rows(); ++k) {
    for (Eigen::Index j = 0; j < st.weights.cols(); ++j) {
      double v = 0;
      r.bytes(&v, sizeof v);
      st.weights(k, j) = v;
    }
  }
  return st;
}

void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files, const std::string& name) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& rel : files) {
    const auto p = dir / rel;
    entries.push_back({{"path", rel}, {"bytes", std::filesystem::file_size(p)}, {"crc32", crc32_hex(crc32_file(p))}});
  }
  std::ofstream out(dir / name);
  if (!out) throw ValidationError("cannot write manifest in " + dir.string());
  out << nlohmann::json{{"files", entries}}.dump(2) << '\n';
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir, const std::string& name) {
  std::ifstream in(dir / name);
  if (!in) throw ValidationError("no manifest in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  std::vector<std::string> bad;
  for (const auto& e : j.at("files")) {
    const auto rel = e.at("path").get<std::string>();
    const auto p = dir / rel;
    std::error_code ec;
    if (!std::filesystem::exists(p, ec) || std::filesystem::file_size(p) != e.at("bytes").get<std::uintmax_t>() ||
        crc32_hex(crc32_file(p)) != e.at("crc32").get<std::string>()) {
      bad.push_back(rel);
    }
  }
  return bad;
}

}  // namespace sgf
