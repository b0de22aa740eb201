#ifndef GLAB_LOWDIM_HPP
#define GLAB_LOWDIM_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "glab/linalg.hpp"

namespace glab {

/// Exact convex geometry in n <= 3, used as the oracle-grade fallback for
/// volumes, inradii and polar vertex enumeration. Inputs are full vertex sets
/// (callers pass +/- generators for centrally symmetric bodies) and the origin
/// must be interior for facet-normal/ inradius queries.

/// 2-d convex hull by monotone chain; vertices returned in CCW order.
Mat convex_hull_2d(const Mat& points);

/// 3-d incremental convex hull; outward-oriented triangles over the original
/// point set (indices into `points` of the returned copy).
struct Hull3 {
    Mat points;
    std::vector<std::array<std::size_t, 3>> triangles;  // outward orientation
};
Hull3 convex_hull_3d(const Mat& points);

/// Facet normals a_j of the hull with facets {x : <a_j, x> = 1}, so the body
/// is {x : <a_j, x> <= 1 for all j}. Requires origin in the interior.
/// n in {1, 2, 3}. These are exactly the vertices of the polar body.
Mat facet_normals_lowdim(const Mat& points, std::size_t n);

/// Exact volume of conv(points) by origin-fan triangulation, n in {1, 2, 3}.
double exact_volume_lowdim(const Mat& points, std::size_t n);

/// Exact inradius (distance from the origin to the nearest facet plane):
/// min_j 1/|a_j|. Requires origin interior.
double exact_inradius_lowdim(const Mat& points, std::size_t n);

}  // namespace glab

#endif
