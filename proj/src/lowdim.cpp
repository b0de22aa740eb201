#include "glab/lowdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "glab/errors.hpp"

namespace glab {

namespace {

double scale_of(const Mat& points) {
    double s = 0.0;
    for (double v : points.a) s = std::max(s, std::fabs(v));
    return s;
}

Mat dedupe(const Mat& points, double tol) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.rows; ++i) {
        bool dup = false;
        for (std::size_t k : keep) {
            double d2 = 0;
            for (std::size_t j = 0; j < points.cols; ++j) {
                double d = points(i, j) - points(k, j);
                d2 += d * d;
            }
            if (d2 <= tol * tol) {
                dup = true;
                break;
            }
        }
        if (!dup) keep.push_back(i);
    }
    Mat out(keep.size(), points.cols);
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t j = 0; j < points.cols; ++j) out(r, j) = points(keep[r], j);
    return out;
}

double cross2(const double* o, const double* a, const double* b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

struct V3 {
    double x, y, z;
};

V3 v3(const double* p) { return {p[0], p[1], p[2]}; }
V3 sub(V3 a, V3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
V3 cross(V3 a, V3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot3(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm3(V3 a) { return std::sqrt(dot3(a, a)); }

}  // namespace

Mat convex_hull_2d(const Mat& points) {
    if (points.cols != 2) throw InvalidInputError("convex_hull_2d: need 2 columns");
    double eps = 1e-12 * (1.0 + scale_of(points));
    Mat p = dedupe(points, eps);
    std::size_t m = p.rows;
    if (m < 3) throw InvalidInputError("convex_hull_2d: degenerate point set");

    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (p(a, 0) != p(b, 0)) return p(a, 0) < p(b, 0);
        return p(a, 1) < p(b, 1);
    });

    std::vector<std::size_t> hull;
    auto build = [&](auto begin, auto end) {
        std::size_t start = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= start + 2 &&
                   cross2(p.row(hull[hull.size() - 2]), p.row(hull.back()), p.row(*it)) <= eps)
                hull.pop_back();
            hull.push_back(*it);
        }
        hull.pop_back();
    };
    build(idx.begin(), idx.end());
    build(idx.rbegin(), idx.rend());
    if (hull.size() < 3) throw InvalidInputError("convex_hull_2d: collinear point set");

    Mat out(hull.size(), 2);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        out(i, 0) = p(hull[i], 0);
        out(i, 1) = p(hull[i], 1);
    }
    return out;
}

Hull3 convex_hull_3d(const Mat& points) {
    if (points.cols != 3) throw InvalidInputError("convex_hull_3d: need 3 columns");
    double scale = 1.0 + scale_of(points);
    double eps = 1e-9 * scale;
    Mat p = dedupe(points, 1e-12 * scale);
    std::size_t m = p.rows;
    if (m < 4) throw InvalidInputError("convex_hull_3d: degenerate point set");

    // initial tetrahedron: spread points
    std::size_t i0 = 0, i1 = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (p(i, 0) < p(i0, 0)) i0 = i;
    double best = -1;
    for (std::size_t i = 0; i < m; ++i) {
        V3 d = sub(v3(p.row(i)), v3(p.row(i0)));
        double l = norm3(d);
        if (l > best) {
            best = l;
            i1 = i;
        }
    }
    if (best <= eps) throw InvalidInputError("convex_hull_3d: all points coincide");
    std::size_t i2 = i0;
    best = -1;
    V3 e01 = sub(v3(p.row(i1)), v3(p.row(i0)));
    for (std::size_t i = 0; i < m; ++i) {
        V3 c = cross(e01, sub(v3(p.row(i)), v3(p.row(i0))));
        double l = norm3(c);
        if (l > best) {
            best = l;
            i2 = i;
        }
    }
    if (best <= eps * norm3(e01)) throw InvalidInputError("convex_hull_3d: collinear point set");
    V3 nrm = cross(e01, sub(v3(p.row(i2)), v3(p.row(i0))));
    std::size_t i3 = i0;
    best = -1;
    for (std::size_t i = 0; i < m; ++i) {
        double d = std::fabs(dot3(nrm, sub(v3(p.row(i)), v3(p.row(i0)))));
        if (d > best) {
            best = d;
            i3 = i;
        }
    }
    if (best <= eps * norm3(nrm)) throw InvalidInputError("convex_hull_3d: coplanar point set");

    V3 centroid{0, 0, 0};
    for (std::size_t i : {i0, i1, i2, i3}) {
        centroid.x += p(i, 0) / 4;
        centroid.y += p(i, 1) / 4;
        centroid.z += p(i, 2) / 4;
    }

    struct Face {
        std::array<std::size_t, 3> v;
        V3 normal;  // outward, unit
        double offset;
        bool alive = true;
    };
    std::vector<Face> faces;
    auto add_face = [&](std::size_t a, std::size_t b, std::size_t c) {
        V3 pa = v3(p.row(a));
        V3 n = cross(sub(v3(p.row(b)), pa), sub(v3(p.row(c)), pa));
        double l = norm3(n);
        if (l <= 1e-300) return;
        n = {n.x / l, n.y / l, n.z / l};
        double off = dot3(n, pa);
        if (dot3(n, centroid) > off) {  // orient outward (away from interior)
            std::swap(b, c);
            n = {-n.x, -n.y, -n.z};
            off = -off;
        }
        faces.push_back(Face{{a, b, c}, n, off, true});
    };
    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);

    for (std::size_t q = 0; q < m; ++q) {
        if (q == i0 || q == i1 || q == i2 || q == i3) continue;
        V3 pt = v3(p.row(q));
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (faces[f].alive && dot3(faces[f].normal, pt) > faces[f].offset + eps)
                visible.push_back(f);
        if (visible.empty()) continue;

        // horizon = directed edges of visible faces whose reverse is not
        // present among visible faces
        std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
        for (std::size_t f : visible) {
            auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k) {
                std::size_t a = v[k], b = v[(k + 1) % 3];
                edge_count[{std::min(a, b), std::max(a, b)}]++;
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> horizon;
        for (std::size_t f : visible) {
            auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k) {
                std::size_t a = v[k], b = v[(k + 1) % 3];
                if (edge_count[{std::min(a, b), std::max(a, b)}] == 1)
                    horizon.push_back({a, b});
            }
        }
        for (std::size_t f : visible) faces[f].alive = false;
        for (auto [a, b] : horizon) add_face(a, b, q);
    }

    Hull3 out;
    out.points = p;
    for (const Face& f : faces)
        if (f.alive) out.triangles.push_back(f.v);
    return out;
}

Mat facet_normals_lowdim(const Mat& points, std::size_t n) {
    if (points.cols != n) throw InvalidInputError("facet_normals_lowdim: shape mismatch");
    if (n == 1) {
        double lo = 0, hi = 0;
        for (std::size_t i = 0; i < points.rows; ++i) {
            lo = std::min(lo, points(i, 0));
            hi = std::max(hi, points(i, 0));
        }
        if (lo >= -1e-12 || hi <= 1e-12)
            throw InvalidInputError("facet_normals_lowdim: origin not interior");
        Mat out(2, 1);
        out(0, 0) = 1.0 / hi;
        out(1, 0) = 1.0 / lo;  // negative normal: <a,x> <= 1 on the left
        return out;
    }
    if (n == 2) {
        Mat hull = convex_hull_2d(points);
        std::size_t k = hull.rows;
        Mat out(k, 2);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = (i + 1) % k;
            Mat sys(2, 2);
            sys(0, 0) = hull(i, 0);
            sys(0, 1) = hull(i, 1);
            sys(1, 0) = hull(j, 0);
            sys(1, 1) = hull(j, 1);
            Vec a = solve_dense(sys, {1.0, 1.0});
            out(i, 0) = a[0];
            out(i, 1) = a[1];
        }
        return out;
    }
    if (n == 3) {
        Hull3 hull = convex_hull_3d(points);
        std::vector<Vec> normals;
        for (const auto& tri : hull.triangles) {
            V3 pa = v3(hull.points.row(tri[0]));
            V3 nn = cross(sub(v3(hull.points.row(tri[1])), pa),
                          sub(v3(hull.points.row(tri[2])), pa));
            double off = dot3(nn, pa);
            if (off <= 1e-12 * norm3(nn))
                throw InvalidInputError("facet_normals_lowdim: origin not interior");
            Vec a = {nn.x / off, nn.y / off, nn.z / off};
            bool dup = false;
            for (const Vec& b : normals) {
                double d2 = 0;
                for (int j = 0; j < 3; ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
                if (d2 < 1e-14) {
                    dup = true;
                    break;
                }
            }
            if (!dup) normals.push_back(a);
        }
        Mat out(normals.size(), 3);
        for (std::size_t i = 0; i < normals.size(); ++i)
            for (int j = 0; j < 3; ++j) out(i, j) = normals[i][j];
        return out;
    }
    throw UnsupportedError("facet_normals_lowdim: n <= 3 only");
}

double exact_volume_lowdim(const Mat& points, std::size_t n) {
    if (points.cols != n) throw InvalidInputError("exact_volume_lowdim: shape mismatch");
    if (n == 1) {
        double lo = 0, hi = 0;
        for (std::size_t i = 0; i < points.rows; ++i) {
            lo = std::min(lo, points(i, 0));
            hi = std::max(hi, points(i, 0));
        }
        return hi - lo;
    }
    if (n == 2) {
        Mat hull = convex_hull_2d(points);
        double area2 = 0;
        for (std::size_t i = 0; i < hull.rows; ++i) {
            std::size_t j = (i + 1) % hull.rows;
            area2 += hull(i, 0) * hull(j, 1) - hull(j, 0) * hull(i, 1);
        }
        return 0.5 * std::fabs(area2);
    }
    if (n == 3) {
        Hull3 hull = convex_hull_3d(points);
        // interior reference point for the fan (centroid of hull vertices)
        V3 c{0, 0, 0};
        std::size_t cnt = 0;
        std::vector<bool> used(hull.points.rows, false);
        for (const auto& tri : hull.triangles)
            for (std::size_t v : tri) used[v] = true;
        for (std::size_t i = 0; i < hull.points.rows; ++i)
            if (used[i]) {
                c.x += hull.points(i, 0);
                c.y += hull.points(i, 1);
                c.z += hull.points(i, 2);
                ++cnt;
            }
        c = {c.x / cnt, c.y / cnt, c.z / cnt};
        double vol = 0;
        for (const auto& tri : hull.triangles) {
            V3 a = sub(v3(hull.points.row(tri[0])), c);
            V3 b = sub(v3(hull.points.row(tri[1])), c);
            V3 d = sub(v3(hull.points.row(tri[2])), c);
            vol += std::fabs(dot3(a, cross(b, d))) / 6.0;
        }
        return vol;
    }
    throw UnsupportedError("exact_volume_lowdim: n <= 3 only");
}

double exact_inradius_lowdim(const Mat& points, std::size_t n) {
    Mat normals = facet_normals_lowdim(points, n);
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < normals.rows; ++i) {
        double len = std::sqrt(kernels::dot(normals.row(i), normals.row(i), n));
        r = std::min(r, 1.0 / len);
    }
    return r;
}

}  // namespace glab
