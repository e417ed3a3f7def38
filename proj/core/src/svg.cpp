#include "nnrepair/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csv_detail.hpp"
#include "nnrepair/error.hpp"
#include "nnrepair/trainer.hpp"

namespace nnrepair {

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* color(std::size_t label) { return kPalette[label % std::size(kPalette)]; }

std::string num(double v) { return csv::fixed(v, 3); }

std::string escape(std::string_view s) {
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

class Canvas {
 public:
  Canvas(const Rect& bounds, double width) : b_(bounds), w_(width) {
    h_ = width * (b_.hi[1] - b_.lo[1]) / (b_.hi[0] - b_.lo[0]);
  }
  double height() const { return h_; }
  double px(double x) const { return (x - b_.lo[0]) / (b_.hi[0] - b_.lo[0]) * w_; }
  double py(double y) const { return (b_.hi[1] - y) / (b_.hi[1] - b_.lo[1]) * h_; }

 private:
  Rect b_;
  double w_;
  double h_ = 0.0;
};

void draw_points(std::ostringstream& out, const Canvas& cv, std::span<const LabeledPoint> pts,
                 char shape) {
  const double r = 2.5;
  for (const auto& p : pts) {
    const double x = cv.px(p.x[0]);
    const double y = cv.py(p.x[1]);
    out << "<";
    if (shape == 'c') {
      out << "circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\"";
    } else if (shape == 't') {
      out << "polygon points=\"" << num(x) << "," << num(y - r) << " " << num(x - r) << ","
          << num(y + r) << " " << num(x + r) << "," << num(y + r) << "\"";
    } else {
      out << "rect x=\"" << num(x - r) << "\" y=\"" << num(y - r) << "\" width=\""
          << num(2 * r) << "\" height=\"" << num(2 * r) << "\"";
    }
    out << " fill=\"" << color(p.label) << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
  }
}

}  // namespace

std::string boundary_svg(const Network& net, const Rect& bounds, const PlotOptions& options) {
  if (net.input_dim() != 2) {
    throw InvalidInputError("plots need a two-input network");
  }
  if (bounds.dim() != 2 || !(bounds.lo[0] < bounds.hi[0]) || !(bounds.lo[1] < bounds.hi[1])) {
    throw InvalidInputError("degenerate plot bounds");
  }
  if (options.resolution < 16) {
    throw InvalidInputError("plot resolution must be at least 16");
  }
  const std::size_t n = options.resolution;
  const Canvas cv(bounds, options.width_px);
  const double cell_w = options.width_px / static_cast<double>(n);
  const double cell_h = cv.height() / static_cast<double>(n);
  const double k = static_cast<double>(net.output_dim());

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(options.width_px)
      << "\" height=\"" << num(cv.height()) << "\" viewBox=\"0 0 " << num(options.width_px)
      << " " << num(cv.height()) << "\">\n";
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t row = 0; row < n; ++row) {
    const double y = bounds.hi[1] - (row + 0.5) * (bounds.hi[1] - bounds.lo[1]) / n;
    // Runs of equal colour and opacity along a row are merged into one rect.
    std::size_t run_start = 0;
    std::string run_key;
    auto flush = [&](std::size_t end) {
      if (run_key.empty()) {
        return;
      }
      out << "<rect x=\"" << num(run_start * cell_w) << "\" y=\"" << num(row * cell_h)
          << "\" width=\"" << num((end - run_start) * cell_w) << "\" height=\""
          << num(cell_h) << "\" " << run_key << "/>\n";
    };
    for (std::size_t col = 0; col < n; ++col) {
      const double x = bounds.lo[0] + (col + 0.5) * (bounds.hi[0] - bounds.lo[0]) / n;
      const std::vector<double> in{x, y};
      const auto logits = net.forward(in);
      const std::size_t label = argmax(std::span<const double>(logits));
      const auto probs = softmax(logits);
      const double conf = k > 1 ? (probs[label] - 1.0 / k) / (1.0 - 1.0 / k) : 1.0;
      const double opacity = 0.15 + 0.45 * std::clamp(conf, 0.0, 1.0);
      std::string key = std::string("fill=\"") + color(label) + "\" fill-opacity=\"" +
                        csv::fixed(opacity, 2) + "\"";
      if (key != run_key) {
        flush(col);
        run_start = col;
        run_key = std::move(key);
      }
    }
    flush(n);
  }
  out << "</g>\n";

  for (const auto& prop : options.properties) {
    if (prop.center.size() != 2) {
      throw InvalidInputError("property '" + prop.name + "' is not two-dimensional");
    }
    const double cx = to_double(prop.center[0]);
    const double cy = to_double(prop.center[1]);
    const double d = to_double(prop.delta);
    out << "<polygon points=\"";
    if (prop.norm == Norm::kL1 && !options.l1_as_square) {
      out << num(cv.px(cx + d)) << "," << num(cv.py(cy)) << " " << num(cv.px(cx)) << ","
          << num(cv.py(cy + d)) << " " << num(cv.px(cx - d)) << "," << num(cv.py(cy)) << " "
          << num(cv.px(cx)) << "," << num(cv.py(cy - d));
    } else {
      out << num(cv.px(cx - d)) << "," << num(cv.py(cy - d)) << " " << num(cv.px(cx + d))
          << "," << num(cv.py(cy - d)) << " " << num(cv.px(cx + d)) << ","
          << num(cv.py(cy + d)) << " " << num(cv.px(cx - d)) << "," << num(cv.py(cy + d));
    }
    out << "\" fill=\"none\" stroke=\"" << color(prop.target_class)
        << "\" stroke-width=\"2\"><title>" << escape(prop.name) << "</title></polygon>\n";
  }
  draw_points(out, cv, options.train, 'c');
  draw_points(out, cv, options.test, 't');
  draw_points(out, cv, options.sampled, 's');
  out << "</svg>\n";
  return out.str();
}

}  // namespace nnrepair
