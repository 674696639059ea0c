#include "bindeblur/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bindeblur/rng.hpp"

namespace bindeblur {

namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& message) {
  std::ostringstream os;
  os << source << ":" << line << ": " << message;
  throw ParseError(os.str());
}

/// Whitespace/comment-aware token reader tracking the current line for
/// diagnostics. '#' starts a comment running to end of line.
class TokenReader {
 public:
  TokenReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  int line() const { return line_; }
  const std::string& source() const { return source_; }

  bool next(std::string& token) {
    token.clear();
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '#') {
        while ((c = in_.get()) != EOF && c != '\n') {
        }
        if (c == '\n') ++line_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        continue;
      }
      if (std::isspace(c)) continue;
      break;
    }
    if (c == EOF) return false;
    do {
      token.push_back(static_cast<char>(c));
      c = in_.get();
    } while (c != EOF && !std::isspace(c) && c != '#');
    if (c == '\n') ++line_;
    if (c == '#') in_.unget();
    return true;
  }

  std::string require(const char* what) {
    std::string token;
    if (!next(token)) fail(source_, line_, std::string("unexpected end of input, expected ") + what);
    return token;
  }

  int require_int(const char* what) {
    const std::string token = require(what);
    try {
      std::size_t used = 0;
      const int value = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return value;
    } catch (const std::exception&) {
      fail(source_, line_, std::string("expected integer for ") + what + ", got '" + token + "'");
    }
  }

  double require_double(const char* what) {
    const std::string token = require(what);
    try {
      std::size_t used = 0;
      const double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return value;
    } catch (const std::exception&) {
      fail(source_, line_, std::string("expected number for ") + what + ", got '" + token + "'");
    }
  }

 private:
  std::istream& in_;
  std::string source_;
  int line_ = 1;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  return out;
}

void format_value(std::ostream& out, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  out << buffer;
}

}  // namespace

BinaryMatrix read_pbm(std::istream& in, const std::string& source_name) {
  TokenReader reader(in, source_name);
  const std::string magic = reader.require("magic number");
  if (magic != "P1") fail(source_name, reader.line(), "expected plain bitmap magic 'P1'");
  const int width = reader.require_int("width");
  const int height = reader.require_int("height");
  if (width <= 0 || height <= 0) fail(source_name, reader.line(), "dimensions must be positive");
  const std::size_t total = static_cast<std::size_t>(width) * height;
  std::vector<int> pixels;
  pixels.reserve(total);
  while (pixels.size() < total) {
    // Plain bitmaps allow digits to run together; accept multi-digit tokens
    // of 0/1 characters.
    const std::string token = reader.require("pixel");
    for (char c : token) {
      if (c != '0' && c != '1')
        fail(source_name, reader.line(), std::string("invalid pixel '") + c + "'");
      if (pixels.size() >= total) fail(source_name, reader.line(), "too many pixels");
      pixels.push_back(c - '0');
    }
  }
  BinaryMatrix x(height, width);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j)
      x.bits()(i, j) = pixels[static_cast<std::size_t>(i) * width + j];
  return x;
}

BinaryMatrix read_pbm_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_pbm(in, path);
}

void write_pbm(std::ostream& out, const BinaryMatrix& m) {
  out << "P1\n" << m.n2() << " " << m.n1() << "\n";
  for (int i = 0; i < m.n1(); ++i) {
    for (int j = 0; j < m.n2(); ++j) {
      if (j > 0) out << ' ';
      out << m.bits()(i, j);
    }
    out << '\n';
  }
}

void write_pbm_file(const std::string& path, const BinaryMatrix& m) {
  std::ofstream out = open_output(path);
  write_pbm(out, m);
}

void write_pgm(std::ostream& out, const RealMatrix& m) {
  out << "P2\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const double v = std::clamp(m(i, j), 0.0, 1.0);
      if (j > 0) out << ' ';
      out << static_cast<int>(std::lround(255.0 * (1.0 - v)));
    }
    out << '\n';
  }
}

void write_pgm_file(const std::string& path, const RealMatrix& m) {
  std::ofstream out = open_output(path);
  write_pgm(out, m);
}

BandedSpectrum read_coefficients(std::istream& in, const std::string& source_name) {
  TokenReader reader(in, source_name);
  if (reader.require("'dims' header") != "dims")
    fail(source_name, reader.line(), "expected 'dims' header");
  const int n1 = reader.require_int("N1");
  const int n2 = reader.require_int("N2");
  if (n1 <= 0 || n2 <= 0) fail(source_name, reader.line(), "dimensions must be positive");
  if (reader.require("'count' header") != "count")
    fail(source_name, reader.line(), "expected 'count' header");
  const int count = reader.require_int("entry count");
  if (count <= 0) fail(source_name, reader.line(), "entry count must be positive");

  std::vector<IndexPair> indexes;
  std::vector<Complex> values;
  indexes.reserve(count);
  values.reserve(count);
  for (int e = 0; e < count; ++e) {
    const int k = reader.require_int("k");
    const int l = reader.require_int("l");
    const double re = reader.require_double("re");
    const double im = reader.require_double("im");
    if (k < frequency_low(n1) || k > frequency_high(n1) || l < frequency_low(n2) ||
        l > frequency_high(n2))
      fail(source_name, reader.line(), "frequency index outside the dimension range");
    indexes.emplace_back(k, l);
    values.emplace_back(re, im);
  }
  std::string extra;
  if (reader.next(extra))
    fail(source_name, reader.line(), "trailing content after declared entries");

  // Sort values into band order, rejecting duplicate indexes.
  std::vector<std::size_t> order(indexes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return indexes[a] < indexes[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (indexes[order[i]] == indexes[order[i - 1]])
      fail(source_name, reader.line(), "duplicate frequency index");
  std::vector<IndexPair> sorted_idx;
  std::vector<Complex> sorted_vals;
  for (std::size_t i : order) {
    sorted_idx.push_back(indexes[i]);
    sorted_vals.push_back(values[i]);
  }
  try {
    return BandedSpectrum(n1, n2, Band(std::move(sorted_idx)), std::move(sorted_vals));
  } catch (const std::invalid_argument& e) {
    fail(source_name, reader.line(), e.what());
  }
}

BandedSpectrum read_coefficients_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_coefficients(in, path);
}

void write_coefficients(std::ostream& out, const BandedSpectrum& s) {
  out << "dims " << s.n1() << " " << s.n2() << "\n";
  out << "count " << s.band().size() << "\n";
  const auto& idx = s.band().indexes();
  const auto& vals = s.values();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out << idx[i].first << " " << idx[i].second << " ";
    format_value(out, vals[i].real());
    out << " ";
    format_value(out, vals[i].imag());
    out << "\n";
  }
}

void write_coefficients_file(const std::string& path, const BandedSpectrum& s) {
  std::ofstream out = open_output(path);
  write_coefficients(out, s);
}

const char* status_name(RecoveryStatus status) {
  switch (status) {
    case RecoveryStatus::Recovered:
      return "recovered";
    case RecoveryStatus::BudgetExhausted:
      return "budget_exhausted";
    default:
      return "inconsistent";
  }
}

const char* kind_name(DirectionalKind kind) {
  switch (kind) {
    case DirectionalKind::ExactSums:
      return "exact_sums";
    case DirectionalKind::ConstraintBlock:
      return "constraint_block";
    default:
      return "skipped_raw";
  }
}

void write_report(std::ostream& out, const RecoveryReport& report, int n1, int n2) {
  out << "schema 1\n";
  out << "status " << status_name(report.status) << "\n";
  out << "dims " << n1 << " " << n2 << "\n";
  out << "stacked_nodes " << report.stacked_node_count << "\n";
  out << "retries " << report.retries_used << "\n";
  out << "elapsed_seconds ";
  format_value(out, report.total_elapsed);
  out << "\n";
  out << "directions " << report.per_direction.size() << "\n";
  for (const DirectionOutcome& d : report.per_direction) {
    out << "direction " << d.direction.k << " " << d.direction.l << " " << kind_name(d.kind)
        << " " << d.direction.m_count << " ";
    format_value(out, d.residual);
    out << " ";
    format_value(out, d.elapsed);
    out << "\n";
  }
}

void write_report_file(const std::string& path, const RecoveryReport& report, int n1, int n2) {
  std::ofstream out = open_output(path);
  write_report(out, report, n1, n2);
}

BinaryMatrix qr_like_fixture(int n, int popcount, std::uint64_t seed) {
  if (n < 16) throw std::invalid_argument("qr_like_fixture: side must be at least 16");
  BinaryMatrix x(n, n);
  // fixed(i, j): cell is reserved by a finder pattern or its separator.
  IntMatrix reserved = IntMatrix::Zero(n, n);

  const auto place_finder = [&](int top, int left) {
    for (int i = -1; i <= 7; ++i)
      for (int j = -1; j <= 7; ++j) {
        const int r = top + i, c = left + j;
        if (r < 0 || r >= n || c < 0 || c >= n) continue;
        reserved(r, c) = 1;
        if (i < 0 || i > 6 || j < 0 || j > 6) continue;  // separator stays white
        const bool ring = i == 0 || i == 6 || j == 0 || j == 6;
        const bool core = i >= 2 && i <= 4 && j >= 2 && j <= 4;
        x.bits()(r, c) = (ring || core) ? 1 : 0;
      }
  };
  place_finder(0, 0);
  place_finder(0, n - 7);
  place_finder(n - 7, 0);

  const int fixed_ones = x.popcount();
  std::vector<int> free_cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reserved(i, j)) free_cells.push_back(i * n + j);
  const int needed = popcount - fixed_ones;
  if (needed < 0 || needed > static_cast<int>(free_cells.size()))
    throw std::invalid_argument("qr_like_fixture: popcount unreachable with fixed patterns");

  Rng rng(seed);
  for (int i = 0; i < needed; ++i) {
    const int j =
        i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(free_cells.size() - i)));
    std::swap(free_cells[i], free_cells[j]);
  }
  for (int i = 0; i < needed; ++i) x.bits()(free_cells[i] / n, free_cells[i] % n) = 1;
  return x;
}

}  // namespace bindeblur
