#include "zerohit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace zerohit {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Provenance::line() const {
  return "zerohit " + command + " seed=" + std::to_string(seed) +
         " config_hash=" + config_hash;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(const std::filesystem::path& file,
                     const std::vector<std::string>& header,
                     const Provenance& prov)
    : out_(file, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out_ << "# " << prov.line() << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::separator() {
  if (column_ >= columns_) throw std::logic_error("CsvWriter: too many cells in row");
  if (column_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_number(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::int64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::uint64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  separator();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    out_ << v;
    return *this;
  }
  out_ << '"';
  for (char c : v) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) throw std::logic_error("CsvWriter: short row");
  out_ << '\n';
  column_ = 0;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed-precision coordinates keep the files small and stable.
std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

void frame(std::ostringstream& os, const std::string& title,
           const std::string& x_label, const std::string& y_label,
           const Range& rx, const Range& ry, const Provenance& prov) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<!-- " << escape(prov.line()) << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << coord(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  os << "<rect x=\"" << coord(x0) << "\" y=\"" << coord(y1) << "\" width=\""
     << coord(x1 - x0) << "\" height=\"" << coord(y0 - y1)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double px = x0 + f * (x1 - x0);
    const double py = y0 - f * (y0 - y1);
    os << "<line x1=\"" << coord(px) << "\" y1=\"" << coord(y0) << "\" x2=\""
       << coord(px) << "\" y2=\"" << coord(y0 + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(px) << "\" y=\"" << coord(y0 + 18)
       << "\" text-anchor=\"middle\">" << tick_label(rx.lo + f * (rx.hi - rx.lo))
       << "</text>\n";
    os << "<line x1=\"" << coord(x0 - 5) << "\" y1=\"" << coord(py) << "\" x2=\""
       << coord(x0) << "\" y2=\"" << coord(py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(x0 - 8) << "\" y=\"" << coord(py + 4)
       << "\" text-anchor=\"end\">" << tick_label(ry.lo + f * (ry.hi - ry.lo))
       << "</text>\n";
  }
  os << "<text x=\"" << coord((x0 + x1) / 2) << "\" y=\"" << coord(kHeight - 18)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << coord((y0 + y1) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

}  // namespace

void write_line_svg(const std::filesystem::path& file, const LinePlot& plot,
                    const Provenance& prov) {
  Range rx;
  Range ry;
  for (const Series& s : plot.series) {
    if (s.xs.size() != s.ys.size()) {
      throw std::invalid_argument("write_line_svg: series lengths differ");
    }
    for (double v : s.xs) rx.add(v);
    for (double v : s.ys) ry.add(v);
  }
  rx.settle();
  ry.settle();
  std::ostringstream os;
  frame(os, plot.title, plot.x_label, plot.y_label, rx, ry, prov);
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  auto px = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * (x1 - x0); };
  auto py = [&](double v) { return y0 - (v - ry.lo) / (ry.hi - ry.lo) * (y0 - y1); };
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const Series& s = plot.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (!first) os << ' ';
      os << coord(px(s.xs[i])) << ',' << coord(py(s.ys[i]));
      first = false;
    }
    os << "\"/>\n";
    if (plot.markers) {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        os << "<circle cx=\"" << coord(px(s.xs[i])) << "\" cy=\"" << coord(py(s.ys[i]))
           << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
      }
    }
    const double ly = y1 + 14.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << coord(x1 + 12) << "\" y1=\"" << coord(ly - 4) << "\" x2=\""
       << coord(x1 + 32) << "\" y2=\"" << coord(ly - 4) << "\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << coord(x1 + 38) << "\" y=\"" << coord(ly) << "\">"
       << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  write_text(file, os.str());
}

void write_heatmap_svg(const std::filesystem::path& file, const HeatMap& map,
                       const Provenance& prov) {
  const std::size_t nx = map.xs.size();
  const std::size_t ny = map.ys.size();
  if (map.values.size() != ny) {
    throw std::invalid_argument("write_heatmap_svg: row count mismatch");
  }
  Range rv;
  auto transform = [&](double v) {
    if (!map.log_scale) return v;
    return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
  };
  for (const auto& row : map.values) {
    if (row.size() != nx) throw std::invalid_argument("write_heatmap_svg: row length mismatch");
    for (double v : row) rv.add(transform(v));
  }
  rv.settle();
  Range rx;
  Range ry;
  for (double v : map.xs) rx.add(v);
  for (double v : map.ys) ry.add(v);
  rx.settle();
  ry.settle();
  std::ostringstream os;
  frame(os, map.title, map.x_label, map.y_label, rx, ry, prov);
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  const double cw = (x1 - x0) / static_cast<double>(std::max<std::size_t>(nx, 1));
  const double ch = (y0 - y1) / static_cast<double>(std::max<std::size_t>(ny, 1));
  auto colour = [&](double v) {
    if (!std::isfinite(v)) return std::string("#bbbbbb");
    const double f = std::clamp((v - rv.lo) / (rv.hi - rv.lo), 0.0, 1.0);
    // Blue to yellow.
    const int r = static_cast<int>(std::lround(40 + 215 * f));
    const int g = static_cast<int>(std::lround(40 + 180 * f));
    const int b = static_cast<int>(std::lround(160 - 120 * f));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      os << "<rect x=\"" << coord(x0 + cw * static_cast<double>(j)) << "\" y=\""
         << coord(y0 - ch * static_cast<double>(i + 1)) << "\" width=\"" << coord(cw)
         << "\" height=\"" << coord(ch) << "\" fill=\""
         << colour(transform(map.values[i][j])) << "\"/>\n";
    }
  }
  const std::string scale = map.log_scale ? "log10 " : "";
  os << "<text x=\"" << coord(x1 + 12) << "\" y=\"" << coord(y1 + 14) << "\">"
     << scale << "min " << tick_label(rv.lo) << "</text>\n";
  os << "<text x=\"" << coord(x1 + 12) << "\" y=\"" << coord(y1 + 32) << "\">"
     << scale << "max " << tick_label(rv.hi) << "</text>\n";
  os << "</svg>\n";
  write_text(file, os.str());
}

}  // namespace zerohit
