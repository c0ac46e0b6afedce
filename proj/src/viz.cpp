#include "gaia/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gaia/errors.hpp"

namespace gaia {

namespace {

struct Box {
  double x0, y0, x1, y1;
};

Box bounding_box(const Matrix& pts) {
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    b.x0 = std::min(b.x0, pts(i, 0));
    b.x1 = std::max(b.x1, pts(i, 0));
    b.y0 = std::min(b.y0, pts(i, 1));
    b.y1 = std::max(b.y1, pts(i, 1));
  }
  return b;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Prints -0.00 as 0.00.
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> MeshGrid::edges() const {
  std::vector<std::size_t> row_of(resolution * resolution, std::numeric_limits<std::size_t>::max());
  for (std::size_t r = 0; r < grid_i.size(); ++r) row_of[grid_i[r] * resolution + grid_j[r]] = r;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < grid_i.size(); ++r) {
    const std::size_t i = grid_i[r], j = grid_j[r];
    if (j + 1 < resolution && inside[i * resolution + j + 1]) out.emplace_back(r, row_of[i * resolution + j + 1]);
    if (i + 1 < resolution && inside[(i + 1) * resolution + j]) out.emplace_back(r, row_of[(i + 1) * resolution + j]);
  }
  return out;
}

MeshGrid meshgrid(const Matrix& points, std::size_t resolution, const PointMap& map) {
  if (resolution < 2) throw Error("meshgrid: resolution must be >= 2");
  if (points.cols() != 2) throw DimensionError("meshgrid: points must be n x 2");
  const Polygon2D hull = convex_hull(points);
  const Box box = bounding_box(points);

  MeshGrid g;
  g.resolution = resolution;
  g.origin = {box.x0, box.y0};
  const double steps = static_cast<double>(resolution - 1);
  g.spacing = {(box.x1 - box.x0) / steps, (box.y1 - box.y0) / steps};
  g.inside.assign(resolution * resolution, false);

  std::vector<double> kept;
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const Point2 p{g.origin.x + static_cast<double>(j) * g.spacing.x,
                     g.origin.y + static_cast<double>(i) * g.spacing.y};
      if (!point_in_polygon(p, hull)) continue;
      g.inside[i * resolution + j] = true;
      g.grid_i.push_back(i);
      g.grid_j.push_back(j);
      kept.push_back(p.x);
      kept.push_back(p.y);
    }
  }
  g.source = Matrix(g.grid_i.size(), 2, std::move(kept));
  g.mapped = g.source.rows() > 0 ? map(g.source) : Matrix(0, 2);
  if (g.mapped.rows() != g.source.rows() || (g.mapped.rows() > 0 && g.mapped.cols() != 2)) {
    throw DimensionError("meshgrid: map must return one 2D point per input row");
  }
  return g;
}

MeshGrid latent_meshgrid(const MlpNetwork& decoder, const Matrix& z, std::size_t resolution) {
  if (decoder.input_dim() != z.cols()) {
    throw DimensionError("latent_meshgrid: decoder expects " + std::to_string(decoder.input_dim()) +
                         " latent dims, z has " + std::to_string(z.cols()));
  }
  if (decoder.output_dim() != 2) throw DimensionError("latent_meshgrid: decoder must output 2D points");
  return meshgrid(z, resolution, [&](const Matrix& m) { return evaluate(decoder, m); });
}

MeshGrid latent_meshgrid(const AnyModel& model, const Matrix& z, std::size_t resolution) {
  return meshgrid(z, resolution, [&](const Matrix& m) { return decode(model, m); });
}

MeshGrid data_meshgrid(const PointMap& autoencode, const Matrix& x, std::size_t resolution) {
  return meshgrid(x, resolution, autoencode);
}

MeshGrid data_meshgrid(const AnyModel& model, const Matrix& x, std::size_t resolution) {
  return meshgrid(x, resolution, [&](const Matrix& m) { return reconstruct(model, m); });
}

std::string meshgrid_csv(const MeshGrid& grid) {
  std::string out = "grid_i,grid_j,zx,zy,xx,xy\n";
  for (std::size_t r = 0; r < grid.kept(); ++r) {
    out += std::to_string(grid.grid_i[r]) + "," + std::to_string(grid.grid_j[r]) + "," +
           num6(grid.source(r, 0)) + "," + num6(grid.source(r, 1)) + "," + num6(grid.mapped(r, 0)) +
           "," + num6(grid.mapped(r, 1)) + "\n";
  }
  return out;
}

namespace {

class SvgPanel {
 public:
  SvgPanel(std::string& out, Box view, double ox, double oy, double size)
      : out_(out), view_(view), ox_(ox), oy_(oy), size_(size) {}

  double px(double x) const { return ox_ + (x - view_.x0) / (view_.x1 - view_.x0) * size_; }
  double py(double y) const { return oy_ + size_ - (y - view_.y0) / (view_.y1 - view_.y0) * size_; }

  void histogram(const Matrix& pts, std::size_t bins, const char* rgb) {
    if (pts.rows() == 0) return;
    std::vector<std::size_t> counts(bins * bins, 0);
    const double wx = (view_.x1 - view_.x0) / static_cast<double>(bins);
    const double wy = (view_.y1 - view_.y0) / static_cast<double>(bins);
    for (std::size_t r = 0; r < pts.rows(); ++r) {
      const double fx = (pts(r, 0) - view_.x0) / wx;
      const double fy = (pts(r, 1) - view_.y0) / wy;
      if (!(fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(bins) && fy < static_cast<double>(bins))) continue;
      ++counts[static_cast<std::size_t>(fy) * bins + static_cast<std::size_t>(fx)];
    }
    const std::size_t peak = *std::max_element(counts.begin(), counts.end());
    if (peak == 0) return;
    const double cell = size_ / static_cast<double>(bins);
    for (std::size_t by = 0; by < bins; ++by) {
      for (std::size_t bx = 0; bx < bins; ++bx) {
        const std::size_t c = counts[by * bins + bx];
        if (c == 0) continue;
        const double opacity = 0.15 + 0.85 * std::sqrt(static_cast<double>(c) / static_cast<double>(peak));
        out_ += "<rect x=\"" + num(ox_ + static_cast<double>(bx) * cell) + "\" y=\"" +
                num(oy_ + size_ - static_cast<double>(by + 1) * cell) + "\" width=\"" + num(cell) +
                "\" height=\"" + num(cell) + "\" fill=\"" + rgb + "\" fill-opacity=\"" + num(opacity) +
                "\"/>\n";
      }
    }
  }

  void points(const Matrix& pts, const char* rgb, double radius) {
    for (std::size_t r = 0; r < pts.rows(); ++r) {
      out_ += "<circle cx=\"" + num(px(pts(r, 0))) + "\" cy=\"" + num(py(pts(r, 1))) + "\" r=\"" +
              num(radius) + "\" fill=\"" + rgb + "\" fill-opacity=\"0.5\"/>\n";
    }
  }

  void mesh(const MeshGrid& g, const char* rgb) {
    for (const auto& [a, b] : g.edges()) {
      out_ += "<line x1=\"" + num(px(g.mapped(a, 0))) + "\" y1=\"" + num(py(g.mapped(a, 1))) +
              "\" x2=\"" + num(px(g.mapped(b, 0))) + "\" y2=\"" + num(py(g.mapped(b, 1))) +
              "\" stroke=\"" + rgb + "\" stroke-width=\"0.6\"/>\n";
    }
  }

 private:
  std::string& out_;
  Box view_;
  double ox_, oy_, size_;
};

}  // namespace

RenderedFigure render_figure(const std::vector<ModelPanels>& models, const RenderOptions& opt) {
  if (models.empty()) throw Error("render_figure: no panel data");
  for (const auto& m : models) {
    if (m.data.rows() == 0) throw Error("render_figure: model '" + m.label + "' has no data");
  }
  if (opt.histogram_bins == 0) throw Error("render_figure: histogram_bins must be > 0");

  // One shared view: the first model's data box plus a margin.
  Box view = bounding_box(models.front().data);
  const double mx = (view.x1 - view.x0) * opt.margin;
  const double my = (view.y1 - view.y0) * opt.margin;
  view = {view.x0 - mx, view.y0 - my, view.x1 + mx, view.y1 + my};
  if (!(view.x1 > view.x0) || !(view.y1 > view.y0)) throw Error("render_figure: degenerate data extent");

  static const char* kRowNames[4] = {"interpolations", "latent mesh", "data mesh", "reconstruction"};
  const double gap = 20.0, label_h = 24.0, left = 110.0;
  const double size = opt.panel_size;
  const double width = left + static_cast<double>(models.size()) * (size + gap);
  const double height = label_h * 2 + 4.0 * (size + gap);

  RenderedFigure fig;
  std::string& s = fig.svg;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
       "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s += "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">" + opt.title + "</text>\n";
  }
  for (std::size_t r = 0; r < 4; ++r) {
    const double y = label_h * 2 + static_cast<double>(r) * (size + gap) + size / 2;
    s += "<text x=\"8\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         kRowNames[r] + "</text>\n";
  }

  for (std::size_t c = 0; c < models.size(); ++c) {
    const auto& m = models[c];
    const double ox = left + static_cast<double>(c) * (size + gap);
    s += "<text x=\"" + num(ox + size / 2) + "\" y=\"" + num(label_h * 1.5) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + m.label + "</text>\n";
    for (std::size_t r = 0; r < 4; ++r) {
      const double oy = label_h * 2 + static_cast<double>(r) * (size + gap);
      const std::string clip = "clip" + std::to_string(c) + "_" + std::to_string(r);
      s += "<clipPath id=\"" + clip + "\"><rect x=\"" + num(ox) + "\" y=\"" + num(oy) +
           "\" width=\"" + num(size) + "\" height=\"" + num(size) + "\"/></clipPath>\n";
      s += "<g class=\"panel\" clip-path=\"url(#" + clip + ")\">\n";
      s += "<rect x=\"" + num(ox) + "\" y=\"" + num(oy) + "\" width=\"" + num(size) + "\" height=\"" +
           num(size) + "\" fill=\"none\" stroke=\"#888\"/>\n";
      SvgPanel panel(s, view, ox, oy, size);
      switch (r) {
        case 0:
          panel.histogram(m.data, opt.histogram_bins, "#1f4e9c");
          panel.points(m.interpolations, "#d62728", 1.0);
          break;
        case 1:
          panel.histogram(m.data, opt.histogram_bins, "#9bb4dc");
          panel.mesh(m.latent_mesh, "#202020");
          break;
        case 2:
          panel.histogram(m.data, opt.histogram_bins, "#9bb4dc");
          panel.mesh(m.data_mesh, "#202020");
          break;
        default:
          panel.histogram(m.reconstructions, opt.histogram_bins, "#6a3d9a");
          break;
      }
      s += "</g>\n";
      ++fig.panel_count;
    }
    fig.sidecars.emplace_back(m.label + "_latent_mesh.csv", meshgrid_csv(m.latent_mesh));
    fig.sidecars.emplace_back(m.label + "_data_mesh.csv", meshgrid_csv(m.data_mesh));
  }
  s += "</svg>\n";
  return fig;
}

}  // namespace gaia
