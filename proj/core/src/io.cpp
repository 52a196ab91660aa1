#include "chcrit/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace chcrit {

namespace {

void append_u32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void append_u64(std::string& s, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void append_f64(std::string& s, double v) { append_u64(s, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t k) const {
    if (pos + k > buf.size()) throw std::runtime_error("truncated file");
  }
  std::string magic() {
    need(4);
    std::string m = buf.substr(pos, 4);
    pos += 4;
    return m;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + k])) << (8 * k);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + k])) << (8 * k);
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return buf;
}

void spill(const std::filesystem::path& p, const std::string& buf) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

void append_field(std::string& buf, const Field& u) {
  if (u.grid.n <= 0 || u.values.size() != u.grid.size())
    throw std::invalid_argument("field has inconsistent shape");
  buf += "CHF1";
  append_u32(buf, static_cast<std::uint32_t>(u.grid.n));
  append_f64(buf, u.grid.side);
  append_f64(buf, u.grid.phi);
  append_f64(buf, u.grid.xi);
  for (double v : u.values) append_f64(buf, v);
}

Field parse_field(Reader& r) {
  if (r.magic() != "CHF1") throw std::runtime_error("bad CHF1 magic");
  Grid g;
  g.n = static_cast<int>(r.u32());
  if (g.n <= 0 || g.n > 1 << 16) throw std::runtime_error("bad CHF1 grid size");
  g.side = r.f64();
  g.phi = r.f64();
  g.xi = r.f64();
  Field u(g);
  for (double& v : u.values) v = r.f64();
  return u;
}

}  // namespace

void write_field_chf1(const std::filesystem::path& p, const Field& u) {
  std::string buf;
  buf.reserve(28 + u.values.size() * 8);
  append_field(buf, u);
  spill(p, buf);
}

Field read_field_chf1(const std::filesystem::path& p) {
  std::string buf = slurp(p);
  Reader r{buf};
  Field u = parse_field(r);
  if (r.pos != buf.size()) throw std::runtime_error("trailing bytes in " + p.string());
  return u;
}

void write_string_chs1(const std::filesystem::path& p, const StringState& s) {
  if (s.images.empty() || s.alpha.size() != s.images.size())
    throw std::invalid_argument("string state has inconsistent shape");
  std::string buf;
  buf.reserve(16 + s.images.size() * (28 + s.images[0].values.size() * 8));
  buf += "CHS1";
  append_u32(buf, static_cast<std::uint32_t>(s.images.size()));
  for (const Field& u : s.images) append_field(buf, u);
  for (double a : s.alpha) append_f64(buf, a);
  append_u64(buf, static_cast<std::uint64_t>(s.iter));
  spill(p, buf);
}

StringState read_string_chs1(const std::filesystem::path& p) {
  std::string buf = slurp(p);
  Reader r{buf};
  if (r.magic() != "CHS1") throw std::runtime_error("bad CHS1 magic");
  std::uint32_t count = r.u32();
  if (count < 2 || count > 1 << 20) throw std::runtime_error("bad CHS1 image count");
  StringState s;
  s.images.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) s.images.push_back(parse_field(r));
  s.alpha.resize(count);
  for (double& a : s.alpha) a = r.f64();
  s.iter = static_cast<long long>(r.u64());
  s.last_displacement = std::numeric_limits<double>::infinity();
  if (r.pos != buf.size()) throw std::runtime_error("trailing bytes in " + p.string());
  return s;
}

std::string file_magic(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  char m[4];
  if (!in.read(m, 4)) return {};
  return std::string(m, 4);
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* b = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64_str(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t fnv1a64_file(const std::filesystem::path& p) {
  std::string buf = slurp(p);
  return fnv1a64(buf.data(), buf.size());
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, std::string> read_kv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(p.string() + ":" + std::to_string(ln) + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

void write_kv(const std::filesystem::path& p,
              const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string buf;
  for (const auto& [k, v] : kv) buf += k + "=" + v + "\n";
  spill(p, buf);
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace chcrit
