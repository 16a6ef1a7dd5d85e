#include "tesslab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace tesslab::svg {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 40.0;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Document::Document(double xmin, double ymin, double xmax, double ymax)
    : xmin_(xmin), ymin_(ymin), xmax_(xmax), ymax_(ymax) {}

double Document::sx(double x) const {
  return kMargin + (x - xmin_) / (xmax_ - xmin_) * (kCanvas - 2.0 * kMargin);
}

double Document::sy(double y) const {
  return kCanvas - kMargin - (y - ymin_) / (ymax_ - ymin_) * (kCanvas - 2.0 * kMargin);
}

void Document::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                    double width) {
  body_.push_back("<line x1=\"" + fmt(sx(x1)) + "\" y1=\"" + fmt(sy(y1)) + "\" x2=\"" + fmt(sx(x2)) +
                  "\" y2=\"" + fmt(sy(y2)) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                  fmt(width) + "\"/>");
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                        double width) {
  std::string d;
  for (const auto& [x, y] : pts) {
    if (!d.empty()) d += " ";
    d += fmt(sx(x)) + "," + fmt(sy(y));
  }
  body_.push_back("<polyline points=\"" + d + "\" fill=\"none\" stroke=\"" + stroke +
                  "\" stroke-width=\"" + fmt(width) + "\"/>");
}

void Document::circle(double cx, double cy, double r_world, const std::string& stroke,
                      const std::string& fill) {
  const double r = r_world / (xmax_ - xmin_) * (kCanvas - 2.0 * kMargin);
  body_.push_back("<circle cx=\"" + fmt(sx(cx)) + "\" cy=\"" + fmt(sy(cy)) + "\" r=\"" + fmt(r) +
                  "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\"/>");
}

void Document::rect_bars(const std::vector<std::pair<double, double>>& xy, double bar_width,
                         const std::string& fill) {
  for (const auto& [x, h] : xy) {
    const double x0 = sx(x - 0.5 * bar_width);
    const double x1 = sx(x + 0.5 * bar_width);
    const double y0 = sy(0.0);
    const double y1 = sy(h);
    body_.push_back("<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) +
                    "\" height=\"" + fmt(y0 - y1) + "\" fill=\"" + fill + "\"/>");
  }
}

void Document::rect_outline(double x0, double y0, double x1, double y1, const std::string& stroke,
                            double width) {
  body_.push_back("<rect x=\"" + fmt(sx(x0)) + "\" y=\"" + fmt(sy(y1)) + "\" width=\"" +
                  fmt(sx(x1) - sx(x0)) + "\" height=\"" + fmt(sy(y0) - sy(y1)) +
                  "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>");
}

void Document::dot(double x, double y, double px_radius, const std::string& fill) {
  body_.push_back("<circle cx=\"" + fmt(sx(x)) + "\" cy=\"" + fmt(sy(y)) + "\" r=\"" +
                  fmt(px_radius) + "\" fill=\"" + fill + "\"/>");
}

void Document::text(double x, double y, const std::string& label) {
  body_.push_back("<text x=\"" + fmt(sx(x)) + "\" y=\"" + fmt(sy(y)) +
                  "\" font-family=\"monospace\" font-size=\"14\">" + label + "</text>");
}

void Document::axes() {
  line(xmin_, 0.0, xmax_, 0.0, "#888888", 1.0);
  line(0.0, ymin_, 0.0, ymax_, "#888888", 1.0);
}

std::string Document::str() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
  for (const auto& el : body_) out << el << "\n";
  out << "</svg>\n";
  return out.str();
}

std::string arrangement_svg(const std::vector<tess::Segment>& chords, const plp::Window& window,
                            const std::vector<tess::Vec2>& vertices) {
  double extent = 1.0;
  bool disk = false;
  if (std::holds_alternative<plp::DiskWindow>(window)) {
    extent = std::get<plp::DiskWindow>(window).radius;
    disk = true;
  } else {
    extent = std::get<plp::SquareWindow>(window).half_side;
  }
  Document doc(-1.05 * extent, -1.05 * extent, 1.05 * extent, 1.05 * extent);
  // Window outline uses rect/circle elements so the snapshot holds exactly
  // one polyline per chord.
  if (disk) {
    doc.circle(0.0, 0.0, extent, "#000000", "none");
  } else {
    doc.rect_outline(-extent, -extent, extent, extent, "#000000", 1.5);
  }
  for (const auto& seg : chords) {
    doc.polyline({{seg.a.x, seg.a.y}, {seg.b.x, seg.b.y}}, "#1f77b4", 1.0);
  }
  for (const auto& v : vertices) doc.dot(v.x, v.y, 1.5, "#d62728");
  return doc.str();
}

std::string histogram_svg(const std::vector<long>& counts, const std::vector<double>& reference_pmf,
                          const std::string& title) {
  long total = 0;
  for (long c : counts) total += c;
  const std::size_t bins = std::max(counts.size(), reference_pmf.size());
  double ymax = 1e-9;
  std::vector<std::pair<double, double>> bars;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = (total > 0 && k < counts.size()) ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
    bars.push_back({static_cast<double>(k), f});
    ymax = std::max(ymax, f);
    if (k < reference_pmf.size()) ymax = std::max(ymax, reference_pmf[k]);
  }
  Document doc(-1.0, -0.08 * ymax, static_cast<double>(bins), 1.15 * ymax);
  doc.axes();
  doc.rect_bars(bars, 0.8, "#9ecae1");
  std::vector<std::pair<double, double>> overlay;
  for (std::size_t k = 0; k < reference_pmf.size(); ++k)
    overlay.push_back({static_cast<double>(k), reference_pmf[k]});
  if (!overlay.empty()) doc.polyline(overlay, "#d62728", 2.0);
  for (const auto& [x, y] : overlay) doc.dot(x, y, 3.0, "#d62728");
  doc.text(0.0, 1.08 * ymax, title);
  return doc.str();
}

std::string trend_svg(const std::vector<std::pair<double, double>>& points, const std::string& title) {
  double xmax = 1.0, ymax = 1e-9;
  for (const auto& [x, y] : points) {
    xmax = std::max(xmax, x);
    ymax = std::max(ymax, y);
  }
  Document doc(-0.05 * xmax, -0.08 * ymax, 1.1 * xmax, 1.2 * ymax);
  doc.axes();
  if (!points.empty()) doc.polyline(points, "#2ca02c", 2.0);
  for (const auto& [x, y] : points) doc.dot(x, y, 3.0, "#2ca02c");
  doc.text(0.0, 1.1 * ymax, title);
  return doc.str();
}

}  // namespace tesslab::svg
