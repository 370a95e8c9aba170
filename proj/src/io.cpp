#include "ghostsim/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr char kMagic[8] = {'G', 'H', 'O', 'S', 'T', 'S', 'I', 'M'};
constexpr std::uint32_t kVersion = 1;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  return out;
}

void append_number(std::string& buf, double v) {
  char tmp[40];
  const int n = std::snprintf(tmp, sizeof tmp, "%.17g", v);
  buf.append(tmp, static_cast<std::size_t>(n));
}

template <class T>
void put(std::ostream& o, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  o.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw AnalysisError(path + ": truncated binary pattern");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

bool parse_double(const std::string& s, double& v) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  if (*first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && p == last;
}

}  // namespace

void write_csv(const std::string& path, const Pattern& p, const std::string& axis_name) {
  std::string buf;
  if (p.is_2d()) {
    buf = "y1 [m],y2 [m],density\n";
    const std::size_t n1 = p.x.count, n2 = p.y->count;
    buf.reserve(n1 * n2 * 72);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        append_number(buf, p.x[i]);
        buf += ',';
        append_number(buf, (*p.y)[j]);
        buf += ',';
        append_number(buf, p.at(i, j));
        buf += '\n';
      }
  } else {
    buf = axis_name + " [m],density\n";
    buf.reserve(p.x.count * 48);
    for (std::size_t i = 0; i < p.x.count; ++i) {
      append_number(buf, p.x[i]);
      buf += ',';
      append_number(buf, p.values[i]);
      buf += '\n';
    }
  }
  auto out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(path + ": write failed");
}

Pattern read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnalysisError(path + ": cannot open");
  std::vector<double> xs, vs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    double x = 0.0, v = 0.0;
    const bool ok = comma != std::string::npos && line.find(',', comma + 1) == std::string::npos &&
                    parse_double(line.substr(0, comma), x) && parse_double(line.substr(comma + 1), v);
    if (!ok) {
      if (xs.empty() && lineno == 1) continue;  // header
      throw AnalysisError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw AnalysisError(path + ": need at least two samples");
  const double step = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(step > 0.0)) throw AnalysisError(path + ": abscissa must increase");
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * step)) > 1e-6 * step)
      throw AnalysisError(path + ":" + std::to_string(i + 2) + ": abscissa is not uniformly spaced");
  Pattern p;
  p.label = path;
  p.x = {xs.front(), xs.back(), xs.size()};
  p.values = std::move(vs);
  return p;
}

void write_binary(const std::string& path, const Pattern& p) {
  if (!p.is_2d()) throw Error("binary format holds 2D patterns only");
  auto out = open_out(path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, p.x.count);
  put<std::uint64_t>(out, p.y->count);
  put<double>(out, p.x.start);
  put<double>(out, p.x.stop);
  put<double>(out, p.y->start);
  put<double>(out, p.y->stop);
  for (double v : p.values) put<double>(out, v);
  if (!out) throw Error(path + ": write failed");
}

Pattern read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnalysisError(path + ": cannot open");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw AnalysisError(path + ": not a ghostsim binary pattern");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw AnalysisError(path + ": unsupported format version " + std::to_string(version));
  (void)get<std::uint32_t>(in, path);
  const auto n1 = get<std::uint64_t>(in, path);
  const auto n2 = get<std::uint64_t>(in, path);
  Pattern p;
  p.label = path;
  p.x.start = get<double>(in, path);
  p.x.stop = get<double>(in, path);
  p.x.count = n1;
  Axis y;
  y.start = get<double>(in, path);
  y.stop = get<double>(in, path);
  y.count = n2;
  p.y = y;
  if (n1 == 0 || n2 == 0 || n1 > (std::uint64_t{1} << 40) / n2) throw AnalysisError(path + ": implausible dimensions");
  p.values.resize(n1 * n2);
  for (auto& v : p.values) v = get<double>(in, path);
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(path + ": write failed");
}

}  // namespace ghostsim
