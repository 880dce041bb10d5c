#include "corrstates/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "corrstates/errors.hpp"

namespace corrstates {

namespace {

/// Fixed two-decimal coordinate formatting keeps output bytes independent
/// of locale and FP printing defaults.
std::string px(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  if (ec != std::errc{}) throw NumericError("svg: coordinate conversion failed");
  return std::string(buf, p);
}

const char* kClusterPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                 "#66ccee", "#aa3377", "#bbbbbb", "#222222"};

const char* cluster_color(int id) {
  return kClusterPalette[static_cast<std::size_t>(id) % 8];
}

struct Frame {
  double x0, y0, w, h;       // pixel box
  double vx0, vx1, vy0, vy1; // value ranges

  double sx(double v) const { return x0 + (v - vx0) / (vx1 - vx0) * w; }
  double sy(double v) const { return y0 + h - (v - vy0) / (vy1 - vy0) * h; }
};

void open_svg(std::ostringstream& out, int w, int h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& out, const Frame& f) {
  out << "<rect x=\"" << px(f.x0) << "\" y=\"" << px(f.y0) << "\" width=\"" << px(f.w)
      << "\" height=\"" << px(f.h) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
}

void title_text(std::ostringstream& out, double x, double y, const std::string& text) {
  out << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"12\">" << text
      << "</text>\n";
}

std::pair<double, double> value_range(std::span<const double> values) {
  double lo = values.empty() ? 0.0 : values[0];
  double hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  return {lo, hi};
}

void polyline(std::ostringstream& out, const Frame& f, std::span<const double> ys,
              const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (i != 0) out << ' ';
    out << px(f.sx(static_cast<double>(i))) << ',' << px(f.sy(ys[i]));
  }
  out << "\"/>\n";
}

Frame series_frame(double x0, double y0, double w, double h, std::size_t n,
                   std::span<const double> values) {
  auto [lo, hi] = value_range(values);
  const double pad = 0.05 * (hi - lo);
  return Frame{x0, y0, w, h, 0.0, static_cast<double>(n > 1 ? n - 1 : 1), lo - pad, hi + pad};
}

/// Blue-white-red diverging map over [-1, 1].
std::string heat_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r, g, b;
  if (v < 0.0) {
    const double t = v + 1.0;  // 0 at -1, 1 at 0
    r = static_cast<int>(std::lround(255.0 * t));
    g = static_cast<int>(std::lround(255.0 * (0.3 + 0.7 * t)));
    b = 255;
  } else {
    const double t = v;  // 0 at 0, 1 at +1
    r = 255;
    g = static_cast<int>(std::lround(255.0 * (1.0 - 0.7 * t)));
    b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string svg_filter_figure(const std::string& region, std::span<const double> raw,
                              std::span<const double> filtered) {
  const auto raw_spec = power_spectrum(raw);
  const auto flt_spec = power_spectrum(filtered);
  std::ostringstream out;
  open_svg(out, 900, 460);
  title_text(out, 20, 20, region + ": raw vs filtered (left), power spectra (right)");

  Frame top{60, 40, 380, 170, 0, 0, 0, 0};
  {
    std::vector<double> all(raw.begin(), raw.end());
    all.insert(all.end(), filtered.begin(), filtered.end());
    top = series_frame(60, 40, 380, 170, raw.size(), all);
    axes(out, top);
    polyline(out, top, raw, "#555555");
    polyline(out, top, filtered, "#cc3311");
    title_text(out, 60, 36, "counts");
  }
  {
    Frame bottom = series_frame(60, 250, 380, 170, filtered.size(), filtered);
    axes(out, bottom);
    polyline(out, bottom, filtered, "#cc3311");
    title_text(out, 60, 246, "filtered");
  }
  {
    Frame spec_top = series_frame(500, 40, 380, 170, raw_spec.power.size(), raw_spec.power);
    axes(out, spec_top);
    polyline(out, spec_top, raw_spec.power, "#555555");
    title_text(out, 500, 36, "spectrum before");
  }
  {
    Frame spec_bot = series_frame(500, 250, 380, 170, flt_spec.power.size(), flt_spec.power);
    axes(out, spec_bot);
    polyline(out, spec_bot, flt_spec.power, "#cc3311");
    title_text(out, 500, 246, "spectrum after");
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_returns_figure(const std::string& region, std::span<const double> filtered,
                               std::span<const double> returns) {
  std::ostringstream out;
  open_svg(out, 640, 420);
  title_text(out, 20, 20, region + ": filtered series and returns");
  {
    Frame top = series_frame(60, 40, 540, 160, filtered.size(), filtered);
    axes(out, top);
    polyline(out, top, filtered, "#222222");
    title_text(out, 60, 36, "filtered");
  }
  {
    Frame bottom = series_frame(60, 230, 540, 160, returns.size(), returns);
    axes(out, bottom);
    polyline(out, bottom, returns, "#117733");
    title_text(out, 60, 226, "returns");
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                        const std::string& title) {
  const Eigen::Index n = matrix.rows();
  if (n == 0 || matrix.cols() != n) throw ShapeError("svg_heatmap: square matrix required");
  const double cell = std::min(14.0, 460.0 / static_cast<double>(n));
  const double x0 = 50, y0 = 40;
  const int w = static_cast<int>(x0 * 2 + cell * static_cast<double>(n));
  const int h = static_cast<int>(y0 + 30 + cell * static_cast<double>(n));
  std::ostringstream out;
  open_svg(out, w, h);
  title_text(out, 20, 20, title);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out << "<rect x=\"" << px(x0 + cell * static_cast<double>(j)) << "\" y=\""
          << px(y0 + cell * static_cast<double>(i)) << "\" width=\"" << px(cell)
          << "\" height=\"" << px(cell) << "\" fill=\"" << heat_color(matrix(i, j)) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_strip_chart(const std::vector<SymbolicEntry>& symbolic, int k, int window,
                            const std::optional<std::vector<double>>& overlay) {
  if (symbolic.empty()) throw ShapeError("svg_strip_chart: no epochs");
  const int last_day = symbolic.back().epoch_start_day + window;
  std::ostringstream out;
  open_svg(out, 940, overlay ? 360 : 200);
  title_text(out, 20, 20, "cluster assignment per epoch");

  const double x0 = 60, w = 840;
  double strip_y = 60;
  if (overlay && !overlay->empty()) {
    Frame f = series_frame(x0, 40, w, 180, overlay->size(), *overlay);
    axes(out, f);
    polyline(out, f, *overlay, "#555555");
    title_text(out, x0, 36, "overlay series");
    strip_y = 250;
  }
  const double scale = w / static_cast<double>(last_day);
  for (const auto& s : symbolic) {
    out << "<rect x=\"" << px(x0 + scale * s.epoch_start_day) << "\" y=\"" << px(strip_y)
        << "\" width=\"" << px(scale * window) << "\" height=\"40\" fill=\""
        << cluster_color(s.cluster_id) << "\" fill-opacity=\"0.85\"/>\n";
  }
  for (int c = 0; c < k; ++c) {
    const double lx = x0 + 90.0 * c;
    out << "<rect x=\"" << px(lx) << "\" y=\"" << px(strip_y + 60) << "\" width=\"14\" height=\"14\" fill=\""
        << cluster_color(c) << "\"/>\n";
    title_text(out, lx + 20, strip_y + 72, "cluster " + std::to_string(c + 1));
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_spectra_overlay(const ClusterSpectrum& cs) {
  std::ostringstream out;
  open_svg(out, 680, 420);
  title_text(out, 20, 20, "eigenvalue density, cluster " + std::to_string(cs.cluster_id + 1));

  double max_density = 1e-12;
  for (double d : cs.empirical.densities) max_density = std::max(max_density, d);
  for (double d : cs.wishart.densities) max_density = std::max(max_density, d);
  for (double d : cs.mp_display.densities) max_density = std::max(max_density, d);
  const double hi = cs.empirical.bin_edges.back();

  Frame f{60, 40, 560, 330, 0.0, hi, 0.0, max_density * 1.08};
  axes(out, f);

  for (std::size_t i = 0; i < cs.empirical.densities.size(); ++i) {
    const double bl = cs.empirical.bin_edges[i];
    const double bh = cs.empirical.bin_edges[i + 1];
    const double d = cs.empirical.densities[i];
    out << "<rect x=\"" << px(f.sx(bl)) << "\" y=\"" << px(f.sy(d)) << "\" width=\""
        << px(f.sx(bh) - f.sx(bl)) << "\" height=\"" << px(f.sy(0.0) - f.sy(d))
        << "\" fill=\"#4477aa\" fill-opacity=\"0.55\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#ee6677\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < cs.wishart.densities.size(); ++i) {
    const double bl = cs.wishart.bin_edges[i];
    const double bh = cs.wishart.bin_edges[i + 1];
    const double d = cs.wishart.densities[i];
    if (!first) out << ' ';
    first = false;
    out << px(f.sx(bl)) << ',' << px(f.sy(d)) << ' ' << px(f.sx(bh)) << ',' << px(f.sy(d));
  }
  out << "\"/>\n";
  // Smooth analytic MP curve on top of its binned form.
  out << "<polyline fill=\"none\" stroke=\"#228833\" stroke-width=\"1.5\" points=\"";
  const int samples = 256;
  for (int i = 0; i <= samples; ++i) {
    const double lam = hi * static_cast<double>(i) / samples;
    if (i != 0) out << ' ';
    out << px(f.sx(lam)) << ',' << px(f.sy(std::min(mp_density(lam, cs.mp), f.vy1)));
  }
  out << "\"/>\n";
  title_text(out, 430, 36, "bars: data, red: ensemble, green: MP");
  out << "</svg>\n";
  return out.str();
}

}  // namespace corrstates
