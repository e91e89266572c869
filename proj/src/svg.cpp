#include "monogeo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "text_util.hpp"

namespace monogeo {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kMarginLeft = 60;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 40;
constexpr double kMarginBottom = 50;

std::string num(double v) { return text_util::format_fixed(v, 2); }

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

class Canvas {
 public:
  explicit Canvas(const std::string& title) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 22, title, "middle", 15);
  }

  void line(double x1, double y1, double x2, double y2, const char* stroke = "black", double w = 1) {
    os_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
        << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11) {
    os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
        << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
  }
  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

// Axis range padded by 5% on each side.
std::pair<double, double> padded(double lo, double hi) {
  if (hi <= lo) return {lo - 1, hi + 1};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void y_axis(Canvas& c, double lo, double hi, int ticks) {
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  c.line(kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom);
  for (int i = 0; i <= ticks; ++i) {
    const double v = lo + (hi - lo) * i / ticks;
    const double y = kHeight - kMarginBottom - plot_h * i / ticks;
    c.line(kMarginLeft - 4, y, kMarginLeft, y);
    c.text(kMarginLeft - 6, y + 4, num(v), "end", 10);
  }
}

}  // namespace

std::string render_boxplot_svg(const std::vector<AttributeStats>& attributes, const std::string& title) {
  Canvas c(title);
  double lo = 0;
  double hi = 0;
  for (const auto& a : attributes) {
    lo = std::min(lo, a.standardized.whisker_low);
    hi = std::max(hi, a.standardized.whisker_high);
  }
  std::tie(lo, hi) = padded(lo, hi);
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto ymap = [&](double v) { return kHeight - kMarginBottom - plot_h * (v - lo) / (hi - lo); };

  y_axis(c, lo, hi, 6);
  c.line(kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight, kHeight - kMarginBottom);
  const double slot = attributes.empty() ? plot_w : plot_w / static_cast<double>(attributes.size());
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const auto& b = attributes[i].standardized;
    const double cx = kMarginLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = slot * 0.25;
    c.line(cx, ymap(b.whisker_low), cx, ymap(b.q1));
    c.line(cx, ymap(b.q3), cx, ymap(b.whisker_high));
    c.line(cx - half / 2, ymap(b.whisker_low), cx + half / 2, ymap(b.whisker_low));
    c.line(cx - half / 2, ymap(b.whisker_high), cx + half / 2, ymap(b.whisker_high));
    c.rect(cx - half, ymap(b.q3), 2 * half, std::max(0.0, ymap(b.q1) - ymap(b.q3)), "#9ecae1");
    c.line(cx - half, ymap(b.median), cx + half, ymap(b.median), "#d62728", 2);
    c.text(cx, kHeight - kMarginBottom + 18, attributes[i].name);
  }
  return c.finish();
}

std::string render_histogram_svg(const Histogram& hist, const std::string& title) {
  Canvas c(title);
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  long long top = 1;
  for (auto n : hist.counts) top = std::max(top, n);
  y_axis(c, 0, static_cast<double>(top), 5);
  c.line(kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight, kHeight - kMarginBottom);
  const double bar_w = hist.counts.empty() ? plot_w : plot_w / static_cast<double>(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double h = plot_h * static_cast<double>(hist.counts[i]) / static_cast<double>(top);
    c.rect(kMarginLeft + bar_w * static_cast<double>(i), kHeight - kMarginBottom - h, bar_w, h, "#9ecae1");
  }
  if (!hist.edges.empty()) {
    c.text(kMarginLeft, kHeight - kMarginBottom + 18, num(hist.edges.front()), "start", 10);
    c.text(kWidth - kMarginRight, kHeight - kMarginBottom + 18, num(hist.edges.back()), "end", 10);
  }
  return c.finish();
}

}  // namespace monogeo
