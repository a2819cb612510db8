#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "spinweave/chain.hpp"
#include "spinweave/disorder.hpp"

namespace spinweave {

// Round-trip formatting: 17 significant digits reproduce any double
// exactly on re-parse.
inline std::string format_double(double v) {
  char buf[64];
  auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// One ECD file: the header metadata plus the distribution itself.
struct EcdFileData {
  int n_sites;
  double delta;
  double arrival_time;
  double j_max;
  double population;
  CouplingDistribution ecd;
};

namespace detail {

inline double parse_double_token(std::string_view s, int line) {
  double v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

inline int parse_int_token(std::string_view s, int line) {
  int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::string_view strip_prefix(std::string_view token,
                                     std::string_view prefix, int line) {
  if (token.substr(0, prefix.size()) != prefix) {
    throw ParseError(line, "expected '" + std::string(prefix) +
                               "...', got '" + std::string(token) + "'");
  }
  return token.substr(prefix.size());
}

inline void chomp(std::string& line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.pop_back();
  }
}

}  // namespace detail

// Header `# N=<int> delta=<float> T=<float> Jmax=<float> P=<float>`, then
// one `i,J_i` line per free coupling: N/2 lines for a centro-symmetric
// distribution, N-1 for a general one (told apart by the line count).
inline void write_ecd_stream(std::ostream& out, const EcdFileData& data) {
  out << "# N=" << data.n_sites << " delta=" << format_double(data.delta)
      << " T=" << format_double(data.arrival_time)
      << " Jmax=" << format_double(data.j_max)
      << " P=" << format_double(data.population) << "\n";
  std::vector<double> values = data.ecd.free_couplings();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i + 1) << "," << format_double(values[i]) << "\n";
  }
}

inline void write_ecd_file(const std::string& path, const EcdFileData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_ecd_stream(out, data);
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

inline EcdFileData read_ecd_stream(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  detail::chomp(line);

  std::istringstream header(line);
  std::string hash, tn, td, tt, tj, tp, extra;
  header >> hash >> tn >> td >> tt >> tj >> tp;
  if (hash != "#" || !header || header >> extra) {
    throw ParseError(1, "malformed header '" + line + "'");
  }
  int n = detail::parse_int_token(detail::strip_prefix(tn, "N=", 1), 1);
  double delta =
      detail::parse_double_token(detail::strip_prefix(td, "delta=", 1), 1);
  double arrival =
      detail::parse_double_token(detail::strip_prefix(tt, "T=", 1), 1);
  double j_max =
      detail::parse_double_token(detail::strip_prefix(tj, "Jmax=", 1), 1);
  double population =
      detail::parse_double_token(detail::strip_prefix(tp, "P=", 1), 1);
  if (n < 2) throw ParseError(1, "chain needs at least 2 sites");

  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(line_no, "expected 'i,J_i', got '" + line + "'");
    }
    int index = detail::parse_int_token(
        std::string_view(line).substr(0, comma), line_no);
    double value = detail::parse_double_token(
        std::string_view(line).substr(comma + 1), line_no);
    if (index != static_cast<int>(values.size()) + 1) {
      throw ParseError(line_no, "expected coupling index " +
                                    std::to_string(values.size() + 1) +
                                    ", got " + std::to_string(index));
    }
    values.push_back(value);
  }

  int count = static_cast<int>(values.size());
  int m_centro = n / 2;
  if (count == m_centro) {
    return EcdFileData{n, delta, arrival, j_max, population,
                       CouplingDistribution::centro_symmetric(
                           std::move(values), n)};
  }
  if (count == n - 1) {
    return EcdFileData{n, delta, arrival, j_max, population,
                       CouplingDistribution{std::move(values)}};
  }
  throw ParseError(line_no, "got " + std::to_string(count) +
                                " couplings; expected " +
                                std::to_string(m_centro) +
                                " (centro-symmetric) or " +
                                std::to_string(n - 1) + " (general)");
}

inline EcdFileData read_ecd_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_ecd_stream(in);
}

inline void write_disorder_header(std::ostream& out, std::uint64_t seed,
                                  int n_r, NoiseLaw law) {
  out << "# seed=" << seed << " n_r=" << n_r << " law=" << noise_law_name(law)
      << "\n";
}

// Line scan rows `a,mean,min,std` for one ECD over amplitudes.
inline void write_line_scan_csv(
    std::ostream& out,
    const std::vector<std::pair<double, DisorderStatistics>>& rows,
    std::uint64_t seed, int n_r, NoiseLaw law) {
  write_disorder_header(out, seed, n_r, law);
  for (const auto& [a, stats] : rows) {
    out << format_double(a) << "," << format_double(stats.mean) << ","
        << format_double(stats.minimum) << "," << format_double(stats.std_dev)
        << "\n";
  }
}

// Color-map rows `j_max,a,mean,min,std` over a sweep x amplitude grid.
inline void write_grid_csv(std::ostream& out,
                           const std::vector<DisorderGridCell>& cells,
                           std::uint64_t seed, int n_r, NoiseLaw law) {
  write_disorder_header(out, seed, n_r, law);
  for (const auto& cell : cells) {
    out << format_double(cell.j_max) << "," << format_double(cell.amplitude)
        << "," << format_double(cell.stats.mean) << ","
        << format_double(cell.stats.minimum) << ","
        << format_double(cell.stats.std_dev) << "\n";
  }
}

}  // namespace spinweave
