#include "heterolab/render.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "heterolab/error.hpp"

namespace heterolab {

std::string format_fixed(double v, int precision) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  std::array<char, 64> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
  if (ec != std::errc()) throw NumericalError("cannot format value");
  std::string s(buf.data(), ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

struct Rgb {
  int r, g, b;
};

constexpr Rgb kLight{245, 245, 245};
constexpr Rgb kAccent{8, 48, 107};

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  return {mix(kLight.r, kAccent.r), mix(kLight.g, kAccent.g), mix(kLight.b, kAccent.b)};
}

std::string svg_open(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
         "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"#ffffff\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor, int size,
                 const std::string& fill = "#000000") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" +
         escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& stroke,
                 double width = 1.0) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

std::string rect(double x, double y, double w, double h, const std::string& fill,
                 const std::string& stroke = "") {
  std::string s = "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                  "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
  if (!stroke.empty()) s += " stroke=\"" + stroke + "\"";
  return s + "/>\n";
}

}  // namespace

std::string render_heatmap(const HeatmapSpec& spec) {
  const Matrix& m = spec.matrix;
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError("heatmap matrix must be square and non-empty");
  }
  for (double v : m.values()) {
    if (!std::isfinite(v)) throw ValidationError("heatmap matrix has a non-finite entry");
  }
  if (!(spec.hi > spec.lo)) throw ValidationError("heatmap scale needs hi > lo");
  if (spec.precision < 0 || spec.precision > 12) {
    throw ValidationError("heatmap precision must be in [0, 12]");
  }
  const std::size_t c = m.rows();
  auto labels = [c](const std::vector<std::string>& given) {
    if (given.empty()) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < c; ++i) out.push_back(std::to_string(i));
      return out;
    }
    if (given.size() != c) throw ValidationError("heatmap needs one label per row/column");
    return given;
  };
  const auto rows = labels(spec.row_labels);
  const auto cols = labels(spec.col_labels);

  const double cell = 56.0;
  const double left = 72.0;
  const double top = spec.title.empty() ? 40.0 : 64.0;
  const double width = left + cell * c + 24.0;
  const double height = top + cell * c + 24.0;

  std::string svg = svg_open(width, height);
  if (!spec.title.empty()) svg += text(width / 2, 24, spec.title, "middle", 14);
  for (std::size_t j = 0; j < c; ++j) {
    svg += text(left + cell * (j + 0.5), top - 10, cols[j], "middle", 12);
  }
  for (std::size_t i = 0; i < c; ++i) {
    svg += text(left - 10, top + cell * (i + 0.5) + 4, rows[i], "end", 12);
    for (std::size_t j = 0; j < c; ++j) {
      const double t = (m(i, j) - spec.lo) / (spec.hi - spec.lo);
      const double x = left + cell * j;
      const double y = top + cell * i;
      svg += rect(x, y, cell, cell, hex(ramp(t)), "#ffffff");
      svg += text(x + cell / 2, y + cell / 2 + 4, format_fixed(m(i, j), spec.precision), "middle",
                  11, t > 0.5 ? "#ffffff" : "#000000");
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_curve(const ExperimentResult& result) {
  if (result.points.size() < 2) throw ValidationError("curve needs at least two points");
  std::vector<std::size_t> order(result.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.points[a].h_mean > result.points[b].h_mean;
  });

  double h_lo = 1.0, h_hi = 0.0;
  for (const auto& p : result.points) {
    if (!std::isfinite(p.h_mean) || !std::isfinite(p.accuracy_mean) ||
        !std::isfinite(p.accuracy_std)) {
      throw ValidationError("curve point has a non-finite value");
    }
    h_lo = std::min(h_lo, p.h_mean);
    h_hi = std::max(h_hi, p.h_mean);
  }
  h_lo = std::max(0.0, std::floor(h_lo * 10.0) / 10.0);
  h_hi = std::min(1.0, std::ceil(h_hi * 10.0) / 10.0);
  if (h_hi - h_lo < 0.1) {
    h_lo = std::max(0.0, h_lo - 0.1);
    h_hi = std::min(1.0, h_hi + 0.1);
  }

  const double left = 64.0, top = 40.0, pw = 400.0, ph = 240.0;
  const double width = left + pw + 32.0;
  const double height = top + ph + 56.0;
  // Highest homophily on the left.
  auto xs = [&](double h) { return left + (h_hi - h) / (h_hi - h_lo) * pw; };
  auto ys = [&](double a) { return top + (1.0 - std::clamp(a, 0.0, 1.0)) * ph; };

  std::string svg = svg_open(width, height);
  svg += text(left + pw / 2, 22, "GCN test accuracy vs homophily ratio", "middle", 14);
  svg += line(left, top + ph, left + pw, top + ph, "#000000");
  svg += line(left, top, left, top + ph, "#000000");
  for (int i = 0; i <= 5; ++i) {
    const double a = i / 5.0;
    svg += line(left - 4, ys(a), left, ys(a), "#000000");
    svg += line(left, ys(a), left + pw, ys(a), "#e0e0e0", 0.5);
    svg += text(left - 8, ys(a) + 4, num(a), "end", 11);
    const double h = h_hi - (h_hi - h_lo) * i / 5.0;
    svg += line(xs(h), top + ph, xs(h), top + ph + 4, "#000000");
    svg += text(xs(h), top + ph + 18, num(h), "middle", 11);
  }
  svg += text(left + pw / 2, top + ph + 42, "homophily ratio h", "middle", 12);
  svg += text(16, top + ph / 2, "accuracy", "middle", 12);

  const std::string accent = hex(kAccent);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto& a = result.points[order[i]];
    const auto& b = result.points[order[i + 1]];
    svg += line(xs(a.h_mean), ys(a.accuracy_mean), xs(b.h_mean), ys(b.accuracy_mean), accent, 1.5);
  }
  for (std::size_t idx : order) {
    const auto& p = result.points[idx];
    const double x = xs(p.h_mean);
    const double y0 = ys(p.accuracy_mean - p.accuracy_std);
    const double y1 = ys(p.accuracy_mean + p.accuracy_std);
    svg += line(x, y0, x, y1, accent);
    svg += line(x - 4, y0, x + 4, y0, accent);
    svg += line(x - 4, y1, x + 4, y1, accent);
    svg += rect(x - 3, ys(p.accuracy_mean) - 3, 6, 6, accent);
  }
  svg += "</svg>\n";
  return svg;
}

std::string matrix_csv(const Matrix& m, int precision) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_fixed(m(i, j), precision);
    }
    out += '\n';
  }
  return out;
}

}  // namespace heterolab
