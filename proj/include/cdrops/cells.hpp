#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cdrops/geometry.hpp"
#include "cdrops/riesz.hpp"

// Cell quadrature for planar Riesz energies. A region is represented by soft
// coverage weights on a square lattice of spacing h; the energy is the
// quadratic form w^T K w where K is the exact box-box interaction for nearby
// cells and the point kernel h^4 |x_i - x_j|^(alpha-2) otherwise. The
// far-field difference between the two is folded into the diagonal.

namespace cdrops::cells {

/// int over [-1,1]^2 of tent(u) tent(v) |(m,n) + (u,v)|^(alpha-2).
double box_interaction(double alpha, int m, int n);
/// Same for (m,n) = (0,0), through the one-dimensional polar reduction.
double self_interaction_polar(double alpha);

/// Lattice constants for one alpha (memoized, thread-safe).
struct KernelTable {
  double alpha = 0.0;
  double near[5][5] = {};  // box_interaction for |m|,|n| <= 2
  double far_bias = 0.0;   // sum over |Delta|_inf >= 3 of (box - point)

  /// Dimensionless lattice kernel; multiply by h^(2+alpha).
  double operator()(int m, int n) const;
};

const KernelTable& kernel_table(double alpha);

/// Soft coverage weights of a region on the lattice anchor + h Z^2.
class CellField {
 public:
  CellField(double h, Point anchor) : h_(h), anchor_(anchor) {}

  double h() const { return h_; }
  Point anchor() const { return anchor_; }
  std::size_t size() const { return w_.size(); }

  /// Add sign * coverage of the region bounded by `b`.
  void add_region(const Boundary& b, double sign);
  void add(int i, int j, double dw);
  /// Drop cells whose weight cancelled to zero.
  void prune(double tol = 1e-15);

  const std::vector<double>& x() const { return x_; }  // lattice indices as doubles
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<int>& ix() const { return ix_; }
  const std::vector<int>& iy() const { return iy_; }
  /// Index of cell (i, j) or -1.
  long find(int i, int j) const;

  double area() const;

 private:
  double h_;
  Point anchor_;
  std::vector<int> ix_, iy_;
  std::vector<double> x_, y_, w_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

/// Coverage of the cell centered at q (side h) by the region inside `b`.
double coverage(const Boundary& b, Point q, double h);
/// coverage() at many cell centers; the boundary is analysed once.
std::vector<double> coverage(const Boundary& b, const std::vector<Point>& qs, double h);

/// Lattice indices [i0, i1] x [j0, j1] that can carry nonzero weight for `b`.
void cell_range(const Boundary& b, double h, Point anchor, int& i0, int& i1, int& j0, int& j1);

/// w^T K w in physical units.
double energy(const CellField& f, double alpha);
/// a^T K b for two fields on the same lattice.
double bilinear(const CellField& a, const CellField& b, double alpha);
/// (K w)_i in physical units, one entry per cell of f.
std::vector<double> potential(const CellField& f, double alpha);

/// One signed region of a planar configuration.
struct SignedRegion {
  Boundary boundary;
  double sign = 1.0;
};

std::vector<SignedRegion> regions_of(const Configuration& config);

CellField rasterize(const std::vector<SignedRegion>& regions, double h, Point anchor);

/// V_alpha by cell quadrature with Richardson-style refinement: the error is
/// |V_h - V_2h| and h shrinks until it meets `quad.cell_target_rel_error`.
RieszResult riesz(const std::vector<SignedRegion>& regions, Point anchor, double alpha, const QuadratureControls& quad);
RieszResult riesz(const FourierCurve& curve, double alpha, const QuadratureControls& quad);
RieszResult riesz(const Configuration& config, double alpha, const QuadratureControls& quad);

}  // namespace cdrops::cells
