#ifndef BINDEBLUR_IO_HPP
#define BINDEBLUR_IO_HPP

#include <iosfwd>
#include <string>

#include "bindeblur/reconstruct.hpp"
#include "bindeblur/spectral.hpp"

namespace bindeblur {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plain portable bitmap (P1): 0 = white/zero, 1 = black/one.
BinaryMatrix read_pbm(std::istream& in, const std::string& source_name = "<stream>");
BinaryMatrix read_pbm_file(const std::string& path);
void write_pbm(std::ostream& out, const BinaryMatrix& m);
void write_pbm_file(const std::string& path, const BinaryMatrix& m);

// Plain portable graymap (P2) rendering of a real-valued image, linearly
// mapped so 0 -> 255 (white) and 1 -> 0 (black), clamped.
void write_pgm(std::ostream& out, const RealMatrix& m);
void write_pgm_file(const std::string& path, const RealMatrix& m);

// Coefficient file: two-line header ("dims N1 N2", "count E") followed by
// one "k l re im" record per band index, 17 significant digits.
BandedSpectrum read_coefficients(std::istream& in, const std::string& source_name = "<stream>");
BandedSpectrum read_coefficients_file(const std::string& path);
void write_coefficients(std::ostream& out, const BandedSpectrum& s);
void write_coefficients_file(const std::string& path, const BandedSpectrum& s);

// Structured key-value recovery report (schema 1).
void write_report(std::ostream& out, const RecoveryReport& report, int n1, int n2);
void write_report_file(const std::string& path, const RecoveryReport& report, int n1, int n2);

const char* status_name(RecoveryStatus status);
const char* kind_name(DirectionalKind kind);

/// Deterministic QR-looking fixture: finder patterns in three corners with
/// separators, remaining cells seeded at random to hit the requested
/// popcount exactly. Not a standards-conformant QR encoder.
BinaryMatrix qr_like_fixture(int n, int popcount, std::uint64_t seed);

}  // namespace bindeblur

#endif
