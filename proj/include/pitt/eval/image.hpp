#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pitt::eval {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kGrey{200, 200, 200};

/// Distinct line colours, cycled by series index.
Rgb palette(std::size_t i);

/// 8-bit RGB raster, row-major from the top-left corner.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = kWhite);

  int width() const { return w_; }
  int height() const { return h_; }
  Rgb get(int x, int y) const;
  void set(int x, int y, Rgb c);  // ignores pixels outside the canvas
  void fill_rect(int x, int y, int w, int h, Rgb c);
  void line(int x0, int y0, int x1, int y1, Rgb c, int thickness = 1);
  /// 5x7 bitmap text; lowercase is drawn as uppercase, unknown glyphs as blanks.
  void text(int x, int y, std::string_view s, Rgb c, int scale = 1);
  void blit(const Image& src, int x, int y);
  const std::vector<std::uint8_t>& pixels() const { return px_; }

  static int text_width(std::string_view s, int scale = 1) { return static_cast<int>(s.size()) * 6 * scale; }
  static constexpr int kGlyphHeight = 7;

 private:
  int w_ = 0, h_ = 0;
  std::vector<std::uint8_t> px_;
};

/// Throws std::runtime_error when the file cannot be written.
void write_png(const Image& img, const std::filesystem::path& path);
Image read_png(const std::filesystem::path& path);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotOptions {
  int width = 640;
  int height = 400;
  std::string title, xlabel, ylabel;
  bool log_y = false;  // falls back to linear when any value is not positive
};

/// Axes with tick labels, one polyline per series and a legend. Non-finite points break the line.
Image line_plot(const std::vector<Series>& series, const PlotOptions& opts = {});

struct HeatmapOptions {
  int cell = 4;  // pixels per value
  std::string title;
  bool diverging = false;  // symmetric blue-white-red scale around zero
  double lo = 0.0, hi = 0.0;  // colour range; lo == hi picks the data range
};

/// `values` is [rows, cols], row 0 drawn at the bottom. Includes a colour bar with its range.
Image heatmap(std::span<const double> values, int rows, int cols, const HeatmapOptions& opts = {});

/// Side-by-side composition on a white background.
Image hstack(const std::vector<Image>& parts, int gap = 10);

/// Compact numeric label, at most four significant digits.
std::string format_number(double v);

}  // namespace pitt::eval
