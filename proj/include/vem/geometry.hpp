#ifndef VEM_GEOMETRY_HPP
#define VEM_GEOMETRY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vem {

using Vec2 = Eigen::Vector2d;

/// Simple closed polygon, counterclockwise, with derived element quantities.
class Polygon {
 public:
  const std::vector<Vec2>& vertices() const { return vertices_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return num_vertices(); }

  double diameter() const { return diameter_; }   // h_K
  double area() const { return area_; }           // |K|
  const Vec2& centroid() const { return centroid_; }  // x_K

  Vec2 edge_start(int e) const { return vertices_[e]; }
  Vec2 edge_end(int e) const { return vertices_[(e + 1) % num_vertices()]; }
  double edge_length(int e) const { return (edge_end(e) - edge_start(e)).norm(); }
  Vec2 edge_tangent(int e) const { return (edge_end(e) - edge_start(e)).normalized(); }
  Vec2 edge_normal(int e) const {  // outward for CCW orientation
    Vec2 t = edge_tangent(e);
    return Vec2(t.y(), -t.x());
  }

  friend Polygon build_polygon(std::vector<Vec2> vertices);

 private:
  Polygon() = default;
  std::vector<Vec2> vertices_;
  double diameter_ = 0.0;
  double area_ = 0.0;
  Vec2 centroid_ = Vec2::Zero();
};

/// Conforming triangulation of a polygon with boundary edges tagged by the
/// parent polygon edge.
struct TriMesh {
  std::vector<Vec2> points;
  std::vector<Eigen::Vector3i> triangles;
  // (point index a, point index b, parent polygon edge)
  std::vector<Eigen::Vector3i> boundary_edges;
  int refine_level = 0;

  double total_area() const;
};

struct RegularityReport {
  double rho_star = 0.0;        // best star-shapedness disk diameter / h_K
  double min_edge_ratio = 0.0;  // min_e h_e / h_K
};

enum class ElementFamily { hanging_node, flatten };

Polygon build_polygon(std::vector<Vec2> vertices);

/// The two degenerating element families of the stability study (index 1..5).
Polygon element_sequence(ElementFamily family, int index);

/// Level 0: centroid fan for strictly convex polygons whose centroid lies in
/// the kernel, ear clipping otherwise. Each further level is a uniform red
/// refinement (every triangle into 4).
TriMesh subtriangulate(const Polygon& polygon, int refine_level);

/// Kernel of the polygon (intersection of inward edge half-planes) as a
/// convex vertex loop; empty if the polygon is not star-shaped.
std::vector<Vec2> polygon_kernel(const Polygon& polygon);

RegularityReport regularity_report(const Polygon& polygon);

// JSON import/export: {"vertices": [[x,y],...]}.
Polygon polygon_from_json(const std::string& json_text);
std::string polygon_to_json(const Polygon& polygon);
std::string trimesh_to_json(const TriMesh& mesh);

}  // namespace vem

#endif
