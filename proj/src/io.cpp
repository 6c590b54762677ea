#include "nmfinit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

#include "nmfinit/errors.hpp"

namespace nmfinit {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

/// Cursor over PGM header/ASCII payload tokens.
class PgmScanner {
 public:
  explicit PgmScanner(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long next_unsigned(const char* what) {
    skip_space_and_comments();
    const std::size_t begin = pos_;
    if (pos_ >= bytes_.size()) {
      throw ParseError(std::string("pgm: unexpected end of data reading ") +
                           what + " at byte " + std::to_string(begin),
                       begin);
    }
    unsigned long value = 0;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || (ptr != last && !is_space(*ptr) && *ptr != '#')) {
      throw ParseError(std::string("pgm: invalid ") + what + " at byte " +
                           std::to_string(begin),
                       begin);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  /// The single whitespace byte that ends a binary header.
  void expect_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw ParseError("pgm: expected whitespace after maxval at byte " +
                           std::to_string(pos_),
                       pos_);
    }
    ++pos_;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

ImageMatrix parse_pgm(std::string_view bytes, std::string source) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("pgm: bad magic number (expected P2 or P5) at byte 0", 0);
  }
  const bool binary = bytes[1] == '5';
  const std::string_view rest = bytes.substr(2);
  if (!rest.empty() && !is_space(rest[0]) && rest[0] != '#') {
    throw ParseError("pgm: bad magic number at byte 0", 0);
  }
  // Offsets reported below are relative to the start of the file.
  const std::size_t base = 2;
  PgmScanner body(rest);
  std::size_t at = base;

  const unsigned long width = body.next_unsigned("width");
  const unsigned long height = body.next_unsigned("height");
  at = base + body.offset();
  const unsigned long maxval = body.next_unsigned("maxval");
  if (width == 0 || height == 0) {
    throw ParseError("pgm: zero image dimension before byte " +
                         std::to_string(at),
                     at);
  }
  if (maxval == 0 || maxval > 255) {
    at = base + body.offset();
    throw ParseError("pgm: maxval " + std::to_string(maxval) +
                         " unsupported (must be 1..255) before byte " +
                         std::to_string(at),
                     at);
  }

  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (count / height != width || count > bytes.size()) {
    throw ParseError("pgm: truncated payload, " + std::to_string(width) + "x" +
                         std::to_string(height) + " image cannot fit in " +
                         std::to_string(bytes.size()) + " bytes",
                     bytes.size());
  }
  std::vector<double> data(count);
  if (binary) {
    body.expect_single_space();
    const std::size_t payload = base + body.offset();
    if (bytes.size() - payload < count) {
      throw ParseError("pgm: truncated payload, expected " +
                           std::to_string(count) + " bytes from byte " +
                           std::to_string(payload) + ", file ends at byte " +
                           std::to_string(bytes.size()),
                       bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = static_cast<unsigned char>(bytes[payload + i]);
      if (v > maxval) {
        throw ParseError("pgm: sample " + std::to_string(v) +
                             " exceeds maxval at byte " +
                             std::to_string(payload + i),
                         payload + i);
      }
      data[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      body.skip_space_and_comments();
      const std::size_t sample_at = base + body.offset();
      if (sample_at >= bytes.size()) {
        throw ParseError("pgm: truncated payload, got " + std::to_string(i) +
                             " of " + std::to_string(count) +
                             " samples at byte " + std::to_string(sample_at),
                         sample_at);
      }
      const unsigned long v = body.next_unsigned("sample");
      if (v > maxval) {
        throw ParseError("pgm: sample " + std::to_string(v) +
                             " exceeds maxval at byte " +
                             std::to_string(sample_at),
                         sample_at);
      }
      data[i] = static_cast<double>(v);
    }
  }
  return ImageMatrix{DenseMatrix(height, width, std::move(data)),
                     std::move(source)};
}

ImageMatrix read_pgm(const std::string& path) {
  return parse_pgm(read_file(path), path);
}

std::string encode_pgm(const DenseMatrix& m) {
  std::string out = "P5\n" + std::to_string(m.cols()) + " " +
                    std::to_string(m.rows()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + m.size());
  auto src = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    double v = std::floor(src[i] + 0.5);
    if (!(v >= 0.0)) v = 0.0;  // also maps NaN to 0
    if (v > 255.0) v = 255.0;
    out[header + i] = static_cast<char>(static_cast<unsigned char>(v));
  }
  return out;
}

void write_pgm(const DenseMatrix& m, const std::string& path) {
  write_file(path, encode_pgm(m));
}

void write_pgm(const ImageMatrix& img, const std::string& path) {
  write_pgm(img.matrix, path);
}

DenseMatrix parse_csv_matrix(std::string_view text, bool require_nonnegative) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pending_blank = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;

    if (line.empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0 && rows > 0) {
      throw ParseError("csv: blank line inside matrix at line " +
                           std::to_string(line_no - 1),
                       line_no - 1);
    }
    pending_blank = 0;

    std::size_t count = 0;
    std::size_t cell_begin = 0;
    while (true) {
      std::size_t cell_end = line.find(',', cell_begin);
      const bool last = cell_end == std::string::npos;
      if (last) cell_end = line.size();
      const std::string cell = trim(std::string_view(line).substr(
          cell_begin, cell_end - cell_begin));
      ++count;
      double value = 0.0;
      const char* first = cell.data();
      const char* stop = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(first, stop, value);
      if (cell.empty() || ec != std::errc() || ptr != stop ||
          !std::isfinite(value)) {
        throw ParseError("csv: non-numeric cell '" + cell + "' at line " +
                             std::to_string(line_no) + ", column " +
                             std::to_string(count),
                         line_no);
      }
      if (require_nonnegative && value < 0.0) {
        throw ParseError("csv: negative entry " + cell + " at line " +
                             std::to_string(line_no) + ", column " +
                             std::to_string(count) +
                             " (factorization needs nonnegative input)",
                         line_no);
      }
      data.push_back(value);
      if (last) break;
      cell_begin = cell_end + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError("csv: ragged row at line " + std::to_string(line_no) +
                           " (" + std::to_string(count) + " cells, expected " +
                           std::to_string(cols) + ")",
                       line_no);
    }
    ++rows;
  }
  if (rows == 0) {
    throw ParseError("csv: no data rows", 1);
  }
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_csv_matrix(const std::string& path, bool require_nonnegative) {
  return parse_csv_matrix(read_file(path), require_nonnegative);
}

DenseMatrix read_matrix(const std::string& path, bool require_nonnegative) {
  std::string bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
    return parse_pgm(bytes, path).matrix;
  }
  return parse_csv_matrix(bytes, require_nonnegative);
}

std::string format_trace_csv(const ConvergenceTrace& trace, bool with_timing) {
  std::string out = "iter,error,elapsed_ms\n";
  char buf[96];
  for (const TraceRecord& r : trace.records) {
    const long long ms = with_timing ? std::llround(r.elapsed_ms) : 0;
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%lld\n", r.iteration, r.error, ms);
    out += buf;
  }
  return out;
}

void write_trace_csv(const ConvergenceTrace& trace, const std::string& path,
                     bool with_timing) {
  write_file(path, format_trace_csv(trace, with_timing));
}

}  // namespace nmfinit
