#pragma once

#include <string>
#include <string_view>

#include "nmfinit/matrix.hpp"
#include "nmfinit/solvers.hpp"

namespace nmfinit {

/// 8-bit grayscale image as a height x width matrix of integer intensities.
struct ImageMatrix {
  DenseMatrix matrix;
  std::string source_path;
};

/// Parses binary (P5) or ASCII (P2) PGM bytes with maxval <= 255. `#`
/// comments are allowed anywhere whitespace is. Intensities are not rescaled.
/// Throws ParseError carrying the byte offset of the problem.
ImageMatrix parse_pgm(std::string_view bytes, std::string source = {});
ImageMatrix read_pgm(const std::string& path);

/// P5 encoding with maxval 255; entries are clamped to [0, 255] and rounded
/// half-up.
std::string encode_pgm(const DenseMatrix& m);
void write_pgm(const DenseMatrix& m, const std::string& path);
void write_pgm(const ImageMatrix& img, const std::string& path);

/// Comma-separated rows, one per line. With `require_nonnegative`, the first
/// negative entry is rejected. Throws ParseError whose offset is the 1-based
/// line number.
DenseMatrix parse_csv_matrix(std::string_view text, bool require_nonnegative);
DenseMatrix read_csv_matrix(const std::string& path,
                            bool require_nonnegative = true);

/// Loads a PGM (detected by its P2/P5 magic) or a CSV matrix.
DenseMatrix read_matrix(const std::string& path, bool require_nonnegative);

/// `iter,error,elapsed_ms` header, one row per record, error with six digits
/// after the point, elapsed time in whole milliseconds (0 when timing is off).
std::string format_trace_csv(const ConvergenceTrace& trace, bool with_timing);
void write_trace_csv(const ConvergenceTrace& trace, const std::string& path,
                     bool with_timing = true);

/// Whole-file helpers; throw std::runtime_error naming the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace nmfinit
