#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaia/geometry.hpp"
#include "gaia/matrix.hpp"
#include "gaia/mlp.hpp"
#include "gaia/models.hpp"

namespace gaia {

using PointMap = std::function<Matrix(const Matrix&)>;

/// Uniform resolution x resolution lattice over the bounding box of a point
/// set, restricted to the set's convex hull, with every kept node mapped
/// through some function. Lattice index = i * resolution + j where i steps
/// along y and j along x.
struct MeshGrid {
  std::size_t resolution = 0;
  Point2 origin;               // lattice (0, 0)
  Point2 spacing;              // step along x (j) and y (i)
  std::vector<bool> inside;    // hull membership per lattice node
  std::vector<std::size_t> grid_i, grid_j;  // kept nodes only
  Matrix source;               // kept nodes, source space
  Matrix mapped;               // kept nodes after the map

  std::size_t kept() const { return source.rows(); }
  /// Pairs of kept-node row indices that are lattice neighbours.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
};

MeshGrid meshgrid(const Matrix& points, std::size_t resolution, const PointMap& map);

/// Lattice over the hull of latent codes z, decoded into data space.
MeshGrid latent_meshgrid(const MlpNetwork& decoder, const Matrix& z, std::size_t resolution);
MeshGrid latent_meshgrid(const AnyModel& model, const Matrix& z, std::size_t resolution);
/// Lattice over the hull of data x, passed through encode then decode.
MeshGrid data_meshgrid(const PointMap& autoencode, const Matrix& x, std::size_t resolution);
MeshGrid data_meshgrid(const AnyModel& model, const Matrix& x, std::size_t resolution);

/// CSV with columns grid_i,grid_j,zx,zy,xx,xy (source then mapped coordinates).
std::string meshgrid_csv(const MeshGrid& grid);

/// Everything drawn for one model column of the figure.
struct ModelPanels {
  std::string label;
  Matrix data;             // real data, drawn as a heat-map
  Matrix interpolations;   // G_d(z_int); may be empty
  MeshGrid latent_mesh;
  MeshGrid data_mesh;
  Matrix reconstructions;  // G(x)
};

struct RenderOptions {
  std::size_t histogram_bins = 128;
  double margin = 0.05;       // fraction of the data extent added on each side
  double panel_size = 220.0;  // px
  std::string title;
};

struct RenderedFigure {
  std::string svg;
  std::vector<std::pair<std::string, std::string>> sidecars;  // file name, CSV body
  std::size_t panel_count = 0;
};

/// Four panels per model (interpolations over data, latent mesh, data mesh,
/// reconstruction density), one column per model. Output bytes depend only
/// on the inputs.
RenderedFigure render_figure(const std::vector<ModelPanels>& models, const RenderOptions& options = {});

}  // namespace gaia
