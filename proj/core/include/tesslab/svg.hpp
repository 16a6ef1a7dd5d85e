#pragma once

#include <map>
#include <string>
#include <vector>

#include "tesslab/stats.hpp"
#include "tesslab/tessellation.hpp"

namespace tesslab::svg {

/// Deterministic SVG document builder: fixed 800x800 canvas, fixed-precision
/// coordinates, no timestamps or generated ids, so identical data yields
/// byte-identical files.
class Document {
 public:
  Document(double world_xmin, double world_ymin, double world_xmax, double world_ymax);

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width);
  /// One polyline element per call (arrangement snapshots emit exactly one
  /// per chord).
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width);
  void circle(double cx, double cy, double r_world, const std::string& stroke,
              const std::string& fill);
  void rect_bars(const std::vector<std::pair<double, double>>& xy, double bar_width,
                 const std::string& fill);
  void rect_outline(double x0, double y0, double x1, double y1, const std::string& stroke,
                    double width);
  void dot(double x, double y, double px_radius, const std::string& fill);
  void text(double x, double y, const std::string& label);
  void axes();

  std::string str() const;

 private:
  double sx(double x) const;
  double sy(double y) const;

  double xmin_, ymin_, xmax_, ymax_;
  std::vector<std::string> body_;
};

/// Chord arrangement snapshot: window outline plus one polyline per chord,
/// vertices as dots.
std::string arrangement_svg(const std::vector<tess::Segment>& chords, const plp::Window& window,
                            const std::vector<tess::Vec2>& vertices);

/// Count histogram with a reference pmf overlay.
std::string histogram_svg(const std::vector<long>& counts, const std::vector<double>& reference_pmf,
                          const std::string& title);

/// Metric-vs-parameter trend plot (one polyline through the points).
std::string trend_svg(const std::vector<std::pair<double, double>>& points, const std::string& title);

}  // namespace tesslab::svg
