#pragma once

#include <cmath>
#include <iosfwd>
#include <map>
#include <vector>

#include "latsub/point.hpp"
#include "latsub/rational.hpp"

namespace latsub {

namespace detail {
inline bool is_zero(const Rat& v) { return v == Rat(0); }
inline bool is_zero(double v) { return v == 0.0; }
inline double abs_val(double v) { return std::fabs(v); }
inline Rat abs_val(const Rat& v) { return rat_abs(v); }
}  // namespace detail

/// Finitely supported sequence on Z^d. Unlisted points are exactly zero;
/// zero entries are pruned on insertion.
template <class T>
class Sequence {
public:
    explicit Sequence(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::map<Point, T>& values() const { return values_; }
    bool empty() const { return values_.empty(); }
    size_t support_size() const { return values_.size(); }

    T at(const Point& p) const {
        auto it = values_.find(p);
        return it == values_.end() ? T(0) : it->second;
    }

    void set(const Point& p, const T& v) {
        if (static_cast<int>(p.size()) != dim_) throw Error("dimension mismatch");
        if (detail::is_zero(v))
            values_.erase(p);
        else
            values_[p] = v;
    }

    void add(const Point& p, const T& v) {
        auto it = values_.find(p);
        if (it == values_.end()) {
            if (!detail::is_zero(v)) values_[p] = v;
        } else {
            it->second += v;
            if (detail::is_zero(it->second)) values_.erase(it);
        }
    }

    bool operator==(const Sequence& o) const {
        return dim_ == o.dim_ && values_ == o.values_;
    }

    /// Bounding box of the support; lo/hi empty when the sequence is zero.
    void bounds(Point& lo, Point& hi) const {
        lo.clear();
        hi.clear();
        for (const auto& [p, v] : values_) {
            if (lo.empty()) {
                lo = p;
                hi = p;
            } else {
                for (int i = 0; i < dim_; ++i) {
                    lo[i] = std::min(lo[i], p[i]);
                    hi[i] = std::max(hi[i], p[i]);
                }
            }
        }
    }

private:
    int dim_;
    std::map<Point, T> values_;
};

using RatSeq = Sequence<Rat>;
using DblSeq = Sequence<double>;

/// nabla_x v_k = v_{k+x} - v_k (forward convention, fixed project-wide).
template <class T>
Sequence<T> step_difference(const Sequence<T>& v, const Point& x) {
    Sequence<T> out(v.dim());
    for (const auto& [p, val] : v.values()) {
        out.add(point_sub(p, x), val);
        out.add(p, -val);
    }
    return out;
}

/// nabla^mu = nabla_1^{mu_1} ... nabla_d^{mu_d}.
template <class T>
Sequence<T> forward_difference(const Sequence<T>& v, const Point& mu) {
    if (static_cast<int>(mu.size()) != v.dim()) throw Error("dimension mismatch");
    Sequence<T> out = v;
    for (int axis = 0; axis < v.dim(); ++axis)
        for (int t = 0; t < mu[axis]; ++t) out = step_difference(out, unit(v.dim(), axis));
    return out;
}

enum class PNorm { One, Two, Inf };

PNorm parse_pnorm(const std::string& s);
std::string pnorm_str(PNorm p);

template <class T>
double lp_norm(const Sequence<T>& v, PNorm p) {
    double acc = 0;
    for (const auto& [pt, val] : v.values()) {
        double a = std::fabs(static_cast<double>([&] {
            if constexpr (std::is_same_v<T, Rat>) return to_double(val);
            else return val;
        }()));
        switch (p) {
            case PNorm::One: acc += a; break;
            case PNorm::Two: acc += a * a; break;
            case PNorm::Inf: acc = std::max(acc, a); break;
        }
    }
    return p == PNorm::Two ? std::sqrt(acc) : acc;
}

/// Exact l^1 / l^inf norms in rational mode.
Rat lp_norm_exact(const RatSeq& v, PNorm p);

struct DirectionSet {
    std::vector<Point> vectors;
    bool spans_lattice = false;

    explicit DirectionSet(std::vector<Point> dirs);
    int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors[0].size()); }
    int count() const { return static_cast<int>(vectors.size()); }
    bool is_canonical() const;
};

/// Applies nabla_{x_i}^{mu_i} in sequence over the direction set.
template <class T>
Sequence<T> directional_difference(const Sequence<T>& v, const DirectionSet& dirs,
                                   const Point& mu) {
    if (!dirs.spans_lattice) throw Error("direction set does not span the lattice");
    if (static_cast<int>(mu.size()) != dirs.count()) throw Error("multi-index/direction mismatch");
    Sequence<T> out = v;
    for (int i = 0; i < dirs.count(); ++i)
        for (int t = 0; t < mu[i]; ++t) out = step_difference(out, dirs.vectors[i]);
    return out;
}

/// Delta^l = (nabla^mu, |mu| = l); component order follows multiindices().
template <class T>
struct DifferenceBlock {
    int order;
    std::vector<Point> indices;          // the mu's
    std::vector<Sequence<T>> components;

    double norm(PNorm p) const {
        double m = 0;
        for (const auto& c : components) m = std::max(m, lp_norm(c, p));
        return m;
    }
};

template <class T>
DifferenceBlock<T> delta_block(const Sequence<T>& v, int l) {
    if (l < 1) throw Error("difference order must be >= 1");
    DifferenceBlock<T> b;
    b.order = l;
    b.indices = multiindices(v.dim(), l);
    for (const auto& mu : b.indices) b.components.push_back(forward_difference(v, mu));
    return b;
}

template <class T>
DifferenceBlock<T> delta_block_directional(const Sequence<T>& v, const DirectionSet& dirs,
                                           int l) {
    if (l < 1) throw Error("difference order must be >= 1");
    DifferenceBlock<T> b;
    b.order = l;
    b.indices = multiindices(dirs.count(), l);
    for (const auto& mu : b.indices)
        b.components.push_back(directional_difference(v, dirs, mu));
    return b;
}

Rat block_norm_exact(const DifferenceBlock<Rat>& b, PNorm p);

// CSV: one row per point, "k_1,...,k_d,value"; value decimal or "p/q".
RatSeq read_sequence_csv(std::istream& in, int dim);
DblSeq read_sequence_csv_double(std::istream& in, int dim);
void write_sequence_csv(std::ostream& out, const RatSeq& v);
void write_sequence_csv(std::ostream& out, const DblSeq& v);

}  // namespace latsub
