#include "parpath/prp_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "parpath/error.hpp"

namespace parpath {

static_assert(std::endian::native == std::endian::little, "dump encoding assumes a little-endian host");

namespace {

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void u64(std::uint64_t v) { bytes(reinterpret_cast<const char*>(&v), 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  void expect_magic(const char* magic, std::size_t n) {
    need(n);
    if (std::memcmp(s_.data() + pos_, magic, n) != 0) throw IoError("bad magic: not a " + std::string(magic, 3) + " dump");
    pos_ += n;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, s_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count(std::uint64_t limit) {
    const auto v = u64();
    if (v > limit) throw IoError("corrupt dump: implausible size field");
    return static_cast<std::size_t>(v);
  }
  void finish() const {
    if (pos_ != s_.size()) throw IoError("corrupt dump: trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) throw IoError("corrupt dump: truncated");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

constexpr std::uint64_t kMaxField = std::uint64_t{1} << 32;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string encode_prp(const PartialRoughPath& prp) {
  const auto& cfg = prp.config();
  const std::size_t nodes = prp.grid().size();
  const std::size_t e = cfg.e(), d = cfg.d();
  Writer w;
  w.bytes("PRP1", 4);
  w.u64(prp.grid().N());
  w.u64(d);
  w.u64(e);
  w.f64(cfg.alpha());
  w.f64(cfg.beta());
  w.f64(prp.grid().T());
  w.u64(cfg.level1().size());
  for (const auto& i : cfg.level1())
    for (int v : i.entries()) w.u64(static_cast<std::uint64_t>(v));
  w.u64(cfg.level2().size());
  for (const auto& jk : cfg.level2()) {
    for (int v : jk.j.entries()) w.u64(static_cast<std::uint64_t>(v));
    for (int v : jk.k.entries()) w.u64(static_cast<std::uint64_t>(v));
  }
  for (std::size_t q = 0; q < nodes; ++q)
    for (double v : prp.xhat(q)) w.f64(v);
  for (std::size_t q = 0; q < nodes; ++q)
    for (std::size_t pos = 0; pos < cfg.level1().size(); ++pos)
      for (double v : prp.anchored_level1(pos, q)) w.f64(v);
  for (std::size_t q = 0; q < nodes; ++q)
    for (std::size_t pos = 0; pos < cfg.level2().size(); ++pos)
      for (double v : prp.anchored_level2(pos, q)) w.f64(v);
  return w.take();
}

PartialRoughPath decode_prp(const std::string& bytes) {
  Reader r(bytes);
  r.expect_magic("PRP1", 4);
  const std::size_t N = r.count(kMaxField);
  const std::size_t d = r.count(64);
  const std::size_t e = r.count(64);
  const double alpha = r.f64();
  const double beta = r.f64();
  const double T = r.f64();
  IndexConfig cfg = [&] {
    try {
      return IndexConfig::build(alpha, beta, e, d, T);
    } catch (const Error& ex) {
      throw IoError(std::string("corrupt dump header: ") + ex.what());
    }
  }();
  Grid grid = [&] {
    try {
      return Grid(T, N);
    } catch (const Error& ex) {
      throw IoError(std::string("corrupt dump header: ") + ex.what());
    }
  }();
  const std::size_t nI = r.count(kMaxField);
  if (nI != cfg.level1().size()) throw IoError("dump index list disagrees with (alpha, beta, e)");
  for (std::size_t pos = 0; pos < nI; ++pos)
    for (std::size_t l = 0; l < e; ++l)
      if (r.u64() != static_cast<std::uint64_t>(cfg.level1()[pos][l]))
        throw IoError("dump index list disagrees with (alpha, beta, e)");
  const std::size_t nJ = r.count(kMaxField);
  if (nJ != cfg.level2().size()) throw IoError("dump pair list disagrees with (alpha, beta, e)");
  for (std::size_t pos = 0; pos < nJ; ++pos) {
    for (std::size_t l = 0; l < e; ++l)
      if (r.u64() != static_cast<std::uint64_t>(cfg.level2()[pos].j[l]))
        throw IoError("dump pair list disagrees with (alpha, beta, e)");
    for (std::size_t l = 0; l < e; ++l)
      if (r.u64() != static_cast<std::uint64_t>(cfg.level2()[pos].k[l]))
        throw IoError("dump pair list disagrees with (alpha, beta, e)");
  }
  const std::size_t nodes = N + 1;
  std::vector<double> xhat(nodes * e), level1(nI * nodes * d), level2(nJ * nodes * d * d);
  for (std::size_t q = 0; q < nodes; ++q)
    for (std::size_t l = 0; l < e; ++l) xhat[q * e + l] = r.f64();
  for (std::size_t q = 0; q < nodes; ++q)
    for (std::size_t pos = 0; pos < nI; ++pos)
      for (std::size_t a = 0; a < d; ++a) level1[(pos * nodes + q) * d + a] = r.f64();
  for (std::size_t q = 0; q < nodes; ++q)
    for (std::size_t pos = 0; pos < nJ; ++pos)
      for (std::size_t ab = 0; ab < d * d; ++ab) level2[(pos * nodes + q) * d * d + ab] = r.f64();
  r.finish();
  return PartialRoughPath(std::move(cfg), grid, std::move(xhat), std::move(level1), std::move(level2));
}

void save_prp(const std::string& path, const PartialRoughPath& prp) { write_file(path, encode_prp(prp)); }

PartialRoughPath load_prp(const std::string& path) { return decode_prp(read_file(path)); }

std::string encode_rough_path(const RoughPath& rp) {
  Writer w;
  w.bytes("RP1\0", 4);
  w.u64(rp.grid().N());
  w.u64(rp.d());
  w.f64(rp.grid().T());
  for (std::size_t q = 0; q < rp.grid().size(); ++q) {
    for (double v : rp.anchored_level1(q)) w.f64(v);
    for (double v : rp.anchored_level2(q)) w.f64(v);
  }
  return w.take();
}

RoughPath decode_rough_path(const std::string& bytes) {
  Reader r(bytes);
  r.expect_magic("RP1\0", 4);
  const std::size_t N = r.count(kMaxField);
  const std::size_t d = r.count(64);
  const double T = r.f64();
  Grid grid = [&] {
    try {
      return Grid(T, N);
    } catch (const Error& ex) {
      throw IoError(std::string("corrupt dump header: ") + ex.what());
    }
  }();
  if (d == 0) throw IoError("corrupt dump header: d = 0");
  std::vector<double> y1(grid.size() * d), y2(grid.size() * d * d);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    for (std::size_t a = 0; a < d; ++a) y1[q * d + a] = r.f64();
    for (std::size_t ab = 0; ab < d * d; ++ab) y2[q * d * d + ab] = r.f64();
  }
  r.finish();
  return RoughPath(grid, d, std::move(y1), std::move(y2));
}

void save_rough_path(const std::string& path, const RoughPath& rp) { write_file(path, encode_rough_path(rp)); }

RoughPath load_rough_path(const std::string& path) { return decode_rough_path(read_file(path)); }

void write_prp_csv(const std::string& path, const PartialRoughPath& prp) {
  const auto& cfg = prp.config();
  std::ostringstream os;
  os << "node,t";
  for (std::size_t l = 0; l < cfg.e(); ++l) os << ",xhat_" << l + 1;
  for (std::size_t a = 0; a < cfg.d(); ++a) os << (cfg.d() == 1 ? ",X" : ",X_" + std::to_string(a + 1));
  os << '\n';
  for (std::size_t q = 0; q < prp.grid().size(); ++q) {
    os << q << ',' << format_double(prp.grid().node(q));
    for (double v : prp.xhat(q)) os << ',' << format_double(v);
    for (double v : prp.anchored_level1(0, q)) os << ',' << format_double(v);
    os << '\n';
  }
  write_file(path, os.str());
}

}  // namespace parpath
