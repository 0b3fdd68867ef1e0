#pragma once

// Netpbm grayscale (P2/P5) and CSV table I/O.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "kantnn/error.hpp"
#include "kantnn/image.hpp"
#include "kantnn/metrics.hpp"

namespace kantnn {

enum class PgmFormat { P2, P5 };

struct PgmHeader {
  PgmFormat format = PgmFormat::P5;
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 255;
};

namespace detail {

class PgmReader {
 public:
  explicit PgmReader(std::string bytes) : data_(std::move(bytes)) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ >= data_.size(); }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError("PGM: " + what + " at byte offset " + std::to_string(at));
  }

  // Skips whitespace and '#' comments that run to the end of the line.
  void skip_space() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    token_start_ = start;
    unsigned long v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(data_[pos_] - '0');
      if (v > 0xFFFFFFFFul) fail(std::string(what) + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= data_.size()) fail(std::string("unexpected end of file while reading ") + what, start);
      fail(std::string("expected ") + what, start);
    }
    return v;
  }

  PgmHeader header() {
    if (data_.size() < 2 || data_[0] != 'P' || (data_[1] != '2' && data_[1] != '5')) {
      fail("magic number must be P2 or P5", 0);
    }
    PgmHeader h;
    h.format = data_[1] == '2' ? PgmFormat::P2 : PgmFormat::P5;
    pos_ = 2;
    if (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_])) && data_[pos_] != '#') {
      fail("expected whitespace after magic number", pos_);
    }
    h.width = read_uint("width");
    if (h.width == 0) fail("width must be positive", token_start_);
    h.height = read_uint("height");
    if (h.height == 0) fail("height must be positive", token_start_);
    const unsigned long maxval = read_uint("maxval");
    if (maxval == 0 || maxval > 65535) fail("maxval must lie in [1, 65535]", token_start_);
    h.maxval = static_cast<unsigned>(maxval);
    if (h.format == PgmFormat::P5) {
      if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        fail("expected a single whitespace byte before the raster", pos_);
      }
      ++pos_;
    }
    return h;
  }

  std::vector<double> raster(const PgmHeader& h) {
    const std::size_t count = h.width * h.height;
    std::vector<double> px(count);
    const double scale = static_cast<double>(h.maxval);
    if (h.format == PgmFormat::P2) {
      for (std::size_t i = 0; i < count; ++i) {
        skip_space();
        if (at_end()) fail("truncated raster (" + std::to_string(i) + " of " + std::to_string(count) + " samples)", pos_);
        const unsigned long v = read_uint("sample");
        if (v > h.maxval) fail("sample exceeds maxval", token_start_);
        px[i] = static_cast<double>(v) / scale;
      }
      return px;
    }
    const std::size_t bytes_per = h.maxval > 255 ? 2 : 1;
    if (data_.size() - pos_ < count * bytes_per) {
      fail("truncated raster (need " + std::to_string(count * bytes_per) + " bytes, have " +
               std::to_string(data_.size() - pos_) + ")",
           data_.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = pos_;
      unsigned v = static_cast<unsigned char>(data_[pos_++]);
      if (bytes_per == 2) v = (v << 8) | static_cast<unsigned char>(data_[pos_++]);
      if (v > h.maxval) fail("sample exceeds maxval", at);
      px[i] = static_cast<double>(v) / scale;
    }
    return px;
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return bytes;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace detail

/// Decodes a P2 or P5 image from memory; samples are divided by maxval.
inline Image decode_pgm(std::string bytes) {
  detail::PgmReader reader(std::move(bytes));
  const PgmHeader h = reader.header();
  std::vector<double> px = reader.raster(h);
  return Image(h.height, h.width, std::move(px));
}

inline Image load_pgm(const std::string& path) { return decode_pgm(detail::read_file(path)); }

/// 8-bit encoding, p -> round(255 p) clamped to [0, 255].
inline std::string encode_pgm(const Image& img, PgmFormat format = PgmFormat::P5) {
  if (img.empty()) throw ArgumentError("cannot encode an empty image");
  if (img.has_mask()) throw ArgumentError("cannot encode a masked image");
  std::ostringstream os;
  os << (format == PgmFormat::P2 ? "P2" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  std::string out = os.str();
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      const double p = img(r, c);
      const long q = std::isnan(p) ? 0 : std::lround(std::clamp(p, 0.0, 1.0) * 255.0);
      if (format == PgmFormat::P5) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
      } else {
        out += std::to_string(q);
        out.push_back(c + 1 == img.width() ? '\n' : ' ');
      }
    }
  }
  return out;
}

inline void save_pgm(const Image& img, const std::string& path, PgmFormat format = PgmFormat::P5) {
  detail::write_file(path, encode_pgm(img, format));
}

/// Table cell: text or number ("%.6g", "inf" for +infinity).
using TableCell = std::variant<std::string, double>;

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline std::string csv_cell(const TableCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  return csv_field(std::get<std::string>(cell));
}

}  // namespace detail

/// CSV text with a header row and LF line endings.
inline std::string format_table(const std::vector<std::string>& columns,
                                const std::vector<std::vector<TableCell>>& rows) {
  if (columns.empty()) throw ArgumentError("table needs at least one column");
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + detail::csv_field(columns[i]);
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size()) {
      throw ArgumentError("table row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                          " cells, header has " + std::to_string(columns.size()));
    }
    for (std::size_t i = 0; i < rows[r].size(); ++i) out += (i ? "," : "") + detail::csv_cell(rows[r][i]);
    out += '\n';
  }
  return out;
}

inline void write_table(const std::vector<std::string>& columns, const std::vector<std::vector<TableCell>>& rows,
                        const std::string& path) {
  detail::write_file(path, format_table(columns, rows));
}

}  // namespace kantnn
