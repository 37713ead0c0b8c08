#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace zerohit {

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Line written at the top of every output file.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::string line() const;
};

/// CSV with a leading "# ..." provenance comment and a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file,
            const std::vector<std::string>& header, const Provenance& prov);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::int64_t v);
  CsvWriter& operator<<(std::uint64_t v);
  CsvWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  CsvWriter& operator<<(bool v) { return *this << std::int64_t{v ? 1 : 0}; }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::size_t columns_;
  std::size_t column_ = 0;
};

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool markers = false;
};

void write_line_svg(const std::filesystem::path& file, const LinePlot& plot,
                    const Provenance& prov);

/// values[i][j] sits at (xs[j], ys[i]). Non-finite cells are drawn grey.
struct HeatMap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::vector<double>> values;
  /// Colour by log10 of the value.
  bool log_scale = false;
};

void write_heatmap_svg(const std::filesystem::path& file, const HeatMap& map,
                       const Provenance& prov);

/// Writes text to a file, throwing on failure.
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace zerohit
