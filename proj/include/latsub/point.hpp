#pragma once

#include <cstdlib>
#include <string>
#include <vector>

namespace latsub {

/// Lattice point / multi-index. Comparison is lexicographic (std::vector).
using Point = std::vector<int>;

inline Point point_add(const Point& a, const Point& b) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Point point_sub(const Point& a, const Point& b) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Point point_neg(const Point& a) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline Point point_scale(int c, const Point& a) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline int inf_norm(const Point& a) {
    int m = 0;
    for (int x : a) m = std::max(m, std::abs(x));
    return m;
}

inline int one_norm(const Point& a) {
    int s = 0;
    for (int x : a) s += std::abs(x);
    return s;
}

inline int index_sum(const Point& mu) {
    int s = 0;
    for (int m : mu) s += m;
    return s;
}

inline Point unit(int d, int axis) {
    Point p(d, 0);
    p[axis] = 1;
    return p;
}

inline Point zero_point(int d) { return Point(d, 0); }

/// All multi-indices over n slots with |mu| = total, lexicographic order.
inline std::vector<Point> multiindices(int n, int total) {
    std::vector<Point> out;
    Point cur(n, 0);
    auto rec = [&](auto&& self, int slot, int left) -> void {
        if (slot == n - 1) {
            cur[slot] = left;
            out.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[slot] = v;
            self(self, slot + 1, left - v);
        }
    };
    if (n > 0) rec(rec, 0, total);
    return out;
}

inline std::string point_str(const Point& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

}  // namespace latsub
