#include "pitt/eval/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

namespace pitt::eval {

namespace {

struct Glyph {
  char c;
  std::array<std::uint8_t, 7> rows;
};

// clang-format off
constexpr Glyph kFont[] = {
  {'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
  {'1', {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
  {'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
  {'3', {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}},
  {'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
  {'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
  {'6', {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
  {'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
  {'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
  {'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}},
  {'A', {0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
  {'B', {0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110}},
  {'C', {0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110}},
  {'D', {0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100}},
  {'E', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111}},
  {'F', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000}},
  {'G', {0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111}},
  {'H', {0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
  {'I', {0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
  {'J', {0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100}},
  {'K', {0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001}},
  {'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
  {'M', {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001}},
  {'N', {0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001}},
  {'O', {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
  {'P', {0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000}},
  {'Q', {0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101}},
  {'R', {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001}},
  {'S', {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110}},
  {'T', {0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100}},
  {'U', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
  {'V', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100}},
  {'W', {0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010}},
  {'X', {0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001}},
  {'Y', {0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100}},
  {'Z', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111}},
  {'.', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}},
  {'-', {0b00000, 0b00000, 0b00000, 0b11111, 0b00000, 0b00000, 0b00000}},
  {'+', {0b00000, 0b00100, 0b00100, 0b11111, 0b00100, 0b00100, 0b00000}},
  {':', {0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000}},
  {'=', {0b00000, 0b00000, 0b11111, 0b00000, 0b11111, 0b00000, 0b00000}},
  {'(', {0b00010, 0b00100, 0b01000, 0b01000, 0b01000, 0b00100, 0b00010}},
  {')', {0b01000, 0b00100, 0b00010, 0b00010, 0b00010, 0b00100, 0b01000}},
  {'/', {0b00000, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b00000}},
  {'_', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b11111}},
  {',', {0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b00100, 0b01000}},
};
// clang-format on

const Glyph* glyph(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  for (const auto& g : kFont)
    if (g.c == c) return &g;
  return nullptr;
}

Rgb mix(Rgb a, Rgb b, double t) {
  auto ch = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (static_cast<double>(y) - x) * t));
  };
  return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b)};
}

Rgb ramp(const std::vector<Rgb>& stops, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
  return mix(stops[i], stops[i + 1], pos - static_cast<double>(i));
}

// viridis, sampled
const std::vector<Rgb> kSequential{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
const std::vector<Rgb> kDiverging{{33, 102, 172}, {146, 197, 222}, {247, 247, 247}, {244, 165, 130}, {178, 24, 43}};

struct PngFile {
  std::FILE* f = nullptr;
  ~PngFile() {
    if (f) std::fclose(f);
  }
};

}  // namespace

Rgb palette(std::size_t i) {
  static const Rgb colours[] = {{31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {255, 127, 14},
                                {148, 103, 189}, {140, 86, 75}, {23, 190, 207}, {127, 127, 127}};
  return colours[i % std::size(colours)];
}

Image::Image(int width, int height, Rgb fill) : w_(width), h_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("Image: dimensions must be positive");
  px_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < px_.size(); i += 3) {
    px_[i] = fill.r;
    px_[i + 1] = fill.g;
    px_[i + 2] = fill.b;
  }
}

Rgb Image::get(int x, int y) const {
  if (x < 0 || y < 0 || x >= w_ || y >= h_) throw std::out_of_range("Image::get: pixel outside canvas");
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x)) * 3;
  return {px_[i], px_[i + 1], px_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x)) * 3;
  px_[i] = c.r;
  px_[i + 1] = c.g;
  px_[i + 2] = c.b;
}

void Image::fill_rect(int x, int y, int w, int h, Rgb c) {
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) set(i, j, c);
}

void Image::line(int x0, int y0, int x1, int y1, Rgb c, int thickness) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  const int lo = -(thickness - 1) / 2, hi = thickness / 2;
  while (true) {
    for (int a = lo; a <= hi; ++a)
      for (int b = lo; b <= hi; ++b) set(x0 + a, y0 + b, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Image::text(int x, int y, std::string_view s, Rgb c, int scale) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Glyph* g = glyph(s[k]);
    if (!g) continue;
    const int ox = x + static_cast<int>(k) * 6 * scale;
    for (int r = 0; r < kGlyphHeight; ++r)
      for (int col = 0; col < 5; ++col)
        if (g->rows[static_cast<std::size_t>(r)] & (1u << (4 - col))) fill_rect(ox + col * scale, y + r * scale, scale, scale, c);
  }
}

void Image::blit(const Image& src, int x, int y) {
  for (int j = 0; j < src.height(); ++j)
    for (int i = 0; i < src.width(); ++i) set(x + i, y + j, src.get(i, j));
}

void write_png(const Image& img, const std::filesystem::path& path) {
  PngFile file;
  file.f = std::fopen(path.c_str(), "wb");
  if (!file.f) throw std::runtime_error("cannot write image " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: failed writing " + path.string());
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto stride = static_cast<std::size_t>(img.width()) * 3;
  for (int y = 0; y < img.height(); ++y)
    png_write_row(png, const_cast<png_bytep>(img.pixels().data() + static_cast<std::size_t>(y) * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.f) != 0) throw std::runtime_error("cannot write image " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&im, path.c_str())) throw std::runtime_error("cannot read image " + path.string());
  im.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(im));
  if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&im);
    throw std::runtime_error("cannot decode image " + path.string());
  }
  Image out(static_cast<int>(im.width), static_cast<int>(im.height));
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      const auto i = (static_cast<std::size_t>(y) * im.width + static_cast<std::size_t>(x)) * 3;
      out.set(x, y, {buf[i], buf[i + 1], buf[i + 2]});
    }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Image line_plot(const std::vector<Series>& series, const PlotOptions& opts) {
  Image img(opts.width, opts.height);
  const int left = 70, right = 20, top = opts.title.empty() ? 15 : 30, bottom = 45;
  const int pw = opts.width - left - right, ph = opts.height - top - bottom;
  if (pw < 20 || ph < 20) throw std::invalid_argument("line_plot: canvas too small");

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  bool positive = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("line_plot: series '" + s.label + "' x/y sizes differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
      positive = positive && s.y[i] > 0.0;
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  const bool logy = opts.log_y && positive;
  auto ty = [logy](double v) { return logy ? std::log10(v) : v; };
  double ly0 = ty(y0), ly1 = ty(y1);
  if (ly1 - ly0 < 1e-300) ly0 -= 0.5, ly1 += 0.5;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  const double pad = 0.05 * (ly1 - ly0);
  ly0 -= pad;
  ly1 += pad;

  auto px = [&](double x) { return left + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (pw - 1))); };
  auto py = [&](double y) { return top + ph - 1 - static_cast<int>(std::lround((ty(y) - ly0) / (ly1 - ly0) * (ph - 1))); };

  // grid and ticks
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const int gx = px(fx);
    img.line(gx, top, gx, top + ph - 1, kGrey);
    const auto lx = format_number(fx);
    img.text(gx - Image::text_width(lx) / 2, top + ph + 6, lx, kBlack);
    const double fy = ly0 + (ly1 - ly0) * k / 4.0;
    const int gy = top + ph - 1 - static_cast<int>(std::lround((fy - ly0) / (ly1 - ly0) * (ph - 1)));
    img.line(left, gy, left + pw - 1, gy, kGrey);
    const auto label = format_number(logy ? std::pow(10.0, fy) : fy);
    img.text(left - 6 - Image::text_width(label), gy - 3, label, kBlack);
  }
  img.line(left, top, left, top + ph - 1, kBlack);
  img.line(left, top + ph - 1, left + pw - 1, top + ph - 1, kBlack);
  if (!opts.title.empty()) img.text(left + (pw - Image::text_width(opts.title, 2)) / 2, 6, opts.title, kBlack, 2);
  if (!opts.xlabel.empty()) img.text(left + (pw - Image::text_width(opts.xlabel)) / 2, opts.height - 14, opts.xlabel, kBlack);
  if (!opts.ylabel.empty()) img.text(4, top - 12 < 0 ? 0 : top - 12, opts.ylabel, kBlack);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const Rgb c = palette(k);
    bool have = false;
    int lx = 0, ly = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        have = false;
        continue;
      }
      const int cx = px(s.x[i]), cy = py(s.y[i]);
      if (have) img.line(lx, ly, cx, cy, c, 2);
      else img.fill_rect(cx - 1, cy - 1, 2, 2, c);
      lx = cx;
      ly = cy;
      have = true;
    }
    // legend, top right
    const int ey = top + 6 + static_cast<int>(k) * 12;
    const int ex = left + pw - 10 - Image::text_width(s.label) - 18;
    img.fill_rect(ex, ey + 2, 12, 3, c);
    img.text(ex + 16, ey, s.label, kBlack);
  }
  return img;
}

Image heatmap(std::span<const double> values, int rows, int cols, const HeatmapOptions& opts) {
  if (rows <= 0 || cols <= 0 || values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("heatmap: values do not match " + std::to_string(rows) + "x" + std::to_string(cols));
  double lo = opts.lo, hi = opts.hi;
  if (lo == hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (double v : values)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (opts.diverging) {
      const double m = std::max(std::abs(lo), std::abs(hi));
      lo = -m;
      hi = m;
    }
    if (hi - lo < 1e-300) hi = lo + 1.0;
  }
  const int cell = std::max(1, opts.cell);
  const int top = opts.title.empty() ? 6 : 22, bar = 14;
  const int mw = cols * cell, mh = rows * cell;
  const int width = std::max(mw + 12 + bar + 8 + Image::text_width("-0.0000e+00"), Image::text_width(opts.title, 2) + 12);
  Image img(width, top + mh + 6);
  if (!opts.title.empty()) img.text(6, 4, opts.title, kBlack, 2);
  const auto& stops = opts.diverging ? kDiverging : kSequential;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double v = values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
      const Rgb col = std::isfinite(v) ? ramp(stops, (v - lo) / (hi - lo)) : Rgb{255, 0, 255};
      img.fill_rect(6 + c * cell, top + (rows - 1 - r) * cell, cell, cell, col);
    }
  const int bx = 6 + mw + 12;
  for (int j = 0; j < mh; ++j) img.fill_rect(bx, top + j, bar, 1, ramp(stops, 1.0 - j / std::max(1.0, mh - 1.0)));
  img.text(bx + bar + 4, top, format_number(hi), kBlack);
  img.text(bx + bar + 4, top + mh - Image::kGlyphHeight, format_number(lo), kBlack);
  return img;
}

Image hstack(const std::vector<Image>& parts, int gap) {
  if (parts.empty()) throw std::invalid_argument("hstack: nothing to compose");
  int w = 0, h = 0;
  for (const auto& p : parts) {
    w += p.width();
    h = std::max(h, p.height());
  }
  w += gap * static_cast<int>(parts.size() - 1);
  Image out(w, h);
  int x = 0;
  for (const auto& p : parts) {
    out.blit(p, x, 0);
    x += p.width() + gap;
  }
  return out;
}

}  // namespace pitt::eval
