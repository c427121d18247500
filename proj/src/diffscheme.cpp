#include "latsub/diffscheme.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace latsub {

Rat mask_mass(const Mask& m) {
    Rat acc(0);
    for (const auto& [p, c] : m) acc += rat_abs(c);
    return acc;
}

int DifferenceScheme::index_of(const Point& mu) const {
    for (size_t i = 0; i < indices.size(); ++i)
        if (indices[i] == mu) return static_cast<int>(i);
    throw Error("unknown block component " + point_str(mu));
}

bool DifferenceScheme::linear() const {
    for (int n : rule_counts)
        if (n > 1) return false;
    return true;
}

// ------------------------------------------------------------- transport

namespace {

/// Shortest step path between lattice points using moves +-x_i.
/// Canonical direction sets use the staircase route; general sets use BFS.
struct StepPath {
    // Each step: (direction index, sign, base point of the nabla term).
    struct Step {
        int dir;
        int sign;
        Point at;
    };
    std::vector<Step> steps;
    int length() const { return static_cast<int>(steps.size()); }
};

StepPath staircase_path(const Point& from, const Point& to) {
    StepPath path;
    Point cur = from;
    int d = static_cast<int>(from.size());
    for (int axis = 0; axis < d; ++axis) {
        while (cur[axis] != to[axis]) {
            int sgn = to[axis] > cur[axis] ? 1 : -1;
            Point next = cur;
            next[axis] += sgn;
            path.steps.push_back({axis, sgn, sgn > 0 ? cur : next});
            cur = next;
        }
    }
    return path;
}

StepPath bfs_path(const Point& from, const Point& to, const DirectionSet& dirs) {
    if (from == to) return {};
    int d = static_cast<int>(from.size());
    // Bound the search region: both endpoints padded generously.
    Point lo(d), hi(d);
    int pad = 0;
    for (const auto& v : dirs.vectors) pad = std::max(pad, inf_norm(v));
    int diam = inf_norm(point_sub(to, from));
    pad = pad * (diam + static_cast<int>(dirs.vectors.size()) * pad + 2) + 2;
    for (int i = 0; i < d; ++i) {
        lo[i] = std::min(from[i], to[i]) - pad;
        hi[i] = std::max(from[i], to[i]) + pad;
    }
    auto inside = [&](const Point& p) {
        for (int i = 0; i < d; ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    };
    std::map<Point, std::pair<Point, std::pair<int, int>>> pred;  // p -> (prev, (dir, sign))
    std::queue<Point> q;
    q.push(from);
    pred[from] = {from, {-1, 0}};
    while (!q.empty()) {
        Point cur = q.front();
        q.pop();
        if (cur == to) break;
        for (int i = 0; i < dirs.count(); ++i) {
            for (int sgn : {+1, -1}) {
                Point nxt = sgn > 0 ? point_add(cur, dirs.vectors[i])
                                    : point_sub(cur, dirs.vectors[i]);
                if (!inside(nxt) || pred.count(nxt)) continue;
                pred[nxt] = {cur, {i, sgn}};
                q.push(nxt);
            }
        }
    }
    if (!pred.count(to))
        throw Error("direction set cannot connect " + point_str(from) + " to " + point_str(to));
    StepPath path;
    Point cur = to;
    while (cur != from) {
        auto [prev, mv] = pred[cur];
        Point base = mv.second > 0 ? prev : cur;
        path.steps.push_back({mv.first, mv.second, base});
        cur = prev;
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return path;
}

StepPath step_path(const Point& from, const Point& to, const DirectionSet& dirs) {
    return dirs.is_canonical() ? staircase_path(from, to) : bfs_path(from, to, dirs);
}

int step_distance(const Point& from, const Point& to, const DirectionSet& dirs) {
    if (dirs.is_canonical()) return one_norm(point_sub(to, from));
    return step_path(from, to, dirs).length();
}

struct Transport {
    // flows[(source, sink)] = amount; cost = sum amount * dist.
    std::map<std::pair<Point, Point>, Rat> flows;
    Rat cost{0};
};

/// Exact min-cost transport from the negative to the positive part of f.
Transport solve_transport(const RowFun& f, const DirectionSet& dirs) {
    std::vector<Point> sources, sinks;
    std::vector<Rat> supply, demand;
    Rat total(0);
    for (const auto& [p, c] : f) {
        if (c == Rat(0)) continue;
        total += c;
        if (c < Rat(0)) {
            sources.push_back(p);
            supply.push_back(-c);
        } else {
            sinks.push_back(p);
            demand.push_back(c);
        }
    }
    if (total != Rat(0)) throw Error("row functional does not annihilate constants");
    Transport t;
    if (sources.empty()) return t;

    int ns = static_cast<int>(sources.size()), nt = static_cast<int>(sinks.size());
    std::vector<std::vector<int>> dist(ns, std::vector<int>(nt));
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) dist[i][j] = step_distance(sources[i], sinks[j], dirs);

    // Successive shortest augmenting paths with potentials (exact flows,
    // integer reduced costs). Node layout: source 0..ns-1, sink ns..ns+nt-1.
    std::vector<Rat> rem_supply = supply, rem_demand = demand;
    std::vector<std::vector<Rat>> flow(ns, std::vector<Rat>(nt, Rat(0)));
    while (true) {
        // Any remaining supply?
        int src0 = -1;
        for (int i = 0; i < ns; ++i)
            if (rem_supply[i] > Rat(0)) { src0 = i; break; }
        if (src0 < 0) break;
        // Bellman-Ford over the residual bipartite graph from all active sources.
        const long long INF = std::numeric_limits<long long>::max() / 4;
        std::vector<long long> ds(ns, INF), dt(nt, INF);
        std::vector<int> prev_t(nt, -1), prev_s(ns, -1);
        for (int i = 0; i < ns; ++i)
            if (rem_supply[i] > Rat(0)) ds[i] = 0;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int i = 0; i < ns; ++i) {
                if (ds[i] == INF) continue;
                for (int j = 0; j < nt; ++j) {
                    long long w = ds[i] + dist[i][j];
                    if (w < dt[j]) {
                        dt[j] = w;
                        prev_t[j] = i;
                        changed = true;
                    }
                }
            }
            for (int j = 0; j < nt; ++j) {
                if (dt[j] == INF) continue;
                for (int i = 0; i < ns; ++i) {
                    if (flow[i][j] > Rat(0)) {  // residual reverse edge
                        long long w = dt[j] - dist[i][j];
                        if (w < ds[i]) {
                            ds[i] = w;
                            prev_s[i] = j;
                            changed = true;
                        }
                    }
                }
            }
        }
        // Cheapest reachable sink with demand.
        int best = -1;
        for (int j = 0; j < nt; ++j) {
            if (rem_demand[j] <= Rat(0) || dt[j] == INF) continue;
            if (best < 0 || dt[j] < dt[best]) best = j;
        }
        if (best < 0) throw Error("transport: no augmenting path");
        // Walk back, find bottleneck.
        std::vector<std::pair<int, int>> fwd, bwd;  // forward (i,j), reverse (i,j)
        int j = best;
        Rat bottleneck = rem_demand[best];
        while (true) {
            int i = prev_t[j];
            fwd.push_back({i, j});
            if (prev_s[i] < 0) {
                bottleneck = std::min(bottleneck, rem_supply[i]);
                break;
            }
            int jprev = prev_s[i];
            bwd.push_back({i, jprev});
            bottleneck = std::min(bottleneck, flow[i][jprev]);
            j = jprev;
        }
        for (auto [i, jj] : fwd) flow[i][jj] += bottleneck;
        for (auto [i, jj] : bwd) flow[i][jj] -= bottleneck;
        rem_supply[fwd.back().first] -= bottleneck;
        rem_demand[best] -= bottleneck;
    }
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            if (flow[i][j] > Rat(0)) {
                t.flows[{sources[i], sinks[j]}] = flow[i][j];
                t.cost += flow[i][j] * Rat(dist[i][j]);
            }
    return t;
}

}  // namespace

Rat w1_cost(const RowFun& f, const DirectionSet& dirs) {
    return solve_transport(f, dirs).cost;
}

std::vector<Mask> flow_decompose(const RowFun& f, const DirectionSet& dirs) {
    Transport t = solve_transport(f, dirs);
    std::vector<Mask> masks(dirs.count());
    for (const auto& [pq, amount] : t.flows) {
        StepPath path = step_path(pq.first, pq.second, dirs);
        for (const auto& st : path.steps) {
            auto& m = masks[st.dir];
            Rat add = st.sign > 0 ? amount : -amount;
            auto it = m.find(st.at);
            if (it == m.end()) {
                if (add != Rat(0)) m[st.at] = add;
            } else {
                it->second += add;
                if (it->second == Rat(0)) m.erase(it);
            }
        }
    }
    return masks;
}

// ------------------------------------------------------------- peeling

namespace {

void mask_add(Mask& m, const Point& p, const Rat& c) {
    if (c == Rat(0)) return;
    auto it = m.find(p);
    if (it == m.end())
        m[p] = c;
    else {
        it->second += c;
        if (it->second == Rat(0)) m.erase(it);
    }
}

/// Exact division of a 1-D row (along `axis`) by (z-1): g = (z-1)*h.
/// Throws when the mass does not telescope to zero (missing moment).
bool divide_once(RowFun& g, int axis) {
    if (g.empty()) return true;
    // Group by the other coordinates.
    std::map<Point, std::map<int, Rat>> lines;
    for (const auto& [p, c] : g) {
        Point key = p;
        key[axis] = 0;
        lines[key][p[axis]] = c;
    }
    RowFun h;
    for (const auto& [key, line] : lines) {
        int last = line.rbegin()->first;
        int first = line.begin()->first;
        Rat carry(0);
        for (int x = first; x <= last; ++x) {
            auto it = line.find(x);
            Rat gx = it == line.end() ? Rat(0) : it->second;
            carry -= gx;  // h_x = h_{x-1} - g_x
            if (carry != Rat(0)) {
                Point p = key;
                p[axis] = x;
                h[p] = carry;
            }
        }
        if (carry != Rat(0)) return false;  // nonzero tail: not divisible
    }
    g = std::move(h);
    return true;
}

struct Peeler {
    int d;
    int l;
    std::vector<Point> indices;
    std::vector<Mask> out;

    Peeler(int dim, int order) : d(dim), l(order) {
        indices = multiindices(dim, order);
        out.resize(indices.size());
    }

    int idx(const Point& nu) const {
        for (size_t i = 0; i < indices.size(); ++i)
            if (indices[i] == nu) return static_cast<int>(i);
        throw Error("internal: bad component");
    }

    void stage(RowFun f, int axis, int lrem, Point prefix) {
        if (f.empty()) return;
        if (lrem == 0)
            throw Error("no difference scheme: residual row is nonzero");
        if (axis == d - 1) {
            // Last axis: lrem-fold antiderivative per line; must terminate.
            for (int t = 0; t < lrem; ++t)
                if (!divide_once(f, axis))
                    throw Error("no difference scheme: insufficient polynomial reproduction");
            Point nu = prefix;
            nu[axis] += lrem;
            auto& m = out[idx(nu)];
            for (const auto& [p, c] : f) mask_add(m, p, c);
            return;
        }
        // Split off the full-order part along this axis: f = A^{lrem} c + V,
        // V supported on the anchor slab x_axis in {0..lrem-1}.
        std::map<Point, std::map<int, Rat>> lines;
        for (const auto& [p, c] : f) {
            Point key = p;
            key[axis] = 0;
            lines[key][p[axis]] = c;
        }
        RowFun remainder;  // A^{lrem} c part, still to divide
        std::map<Point, std::vector<Rat>> slab;  // key -> values at x=0..lrem-1
        for (const auto& [key, line] : lines) {
            // Newton coefficients tv_t = sum_x u_x binom(x, t), t < lrem.
            std::vector<Rat> tv(lrem, Rat(0));
            for (const auto& [x, c] : line)
                for (int t = 0; t < lrem; ++t) tv[t] += c * Rat(binomial(x, t));
            // v in the z-basis on positions {0..lrem-1}: sum_t tv_t (z-1)^t.
            std::vector<Rat> v(lrem, Rat(0));
            for (int t = 0; t < lrem; ++t)
                for (int x = 0; x <= t; ++x)
                    v[x] += tv[t] * Rat(binomial(t, x)) *
                            ((t - x) % 2 == 0 ? Rat(1) : Rat(-1));
            slab[key] = v;
            for (const auto& [x, c] : line) {
                Point p = key;
                p[axis] = x;
                mask_add(remainder, p, c);
            }
            for (int x = 0; x < lrem; ++x) {
                Point p = key;
                p[axis] = x;
                mask_add(remainder, p, -v[x]);
            }
        }
        for (int t = 0; t < lrem; ++t)
            if (!divide_once(remainder, axis))
                throw Error("no difference scheme: insufficient polynomial reproduction");
        if (!remainder.empty()) {
            Point nu = prefix;
            nu[axis] += lrem;
            auto& m = out[idx(nu)];
            for (const auto& [p, c] : remainder) mask_add(m, p, c);
        }
        // Slab rows: V = sum_t A_axis^t [w_t] with w_t on the x_axis = 0 plane.
        for (int t = 0; t < lrem; ++t) {
            RowFun w;
            for (const auto& [key, v] : slab) {
                Rat acc(0);
                for (int x = 0; x < lrem; ++x) acc += v[x] * Rat(binomial(x, t));
                if (acc != Rat(0)) w[key] = acc;  // key has x_axis = 0
            }
            Point pfx = prefix;
            pfx[axis] += t;
            stage(std::move(w), axis + 1, lrem - t, pfx);
        }
    }
};

}  // namespace

std::vector<Mask> peel_decompose(const RowFun& f, int dim, int l) {
    if (dim == 0) throw Error("peel_decompose: zero dimension");
    Peeler peeler(dim, l);
    if (dim == 1) {
        RowFun g = f;
        for (int t = 0; t < l; ++t)
            if (!divide_once(g, 0))
                throw Error("no difference scheme: insufficient polynomial reproduction");
        peeler.out[0] = Mask(g.begin(), g.end());
    } else {
        peeler.stage(f, 0, l, Point(dim, 0));
    }
    return peeler.out;
}

// ------------------------------------------------------------- derivation

namespace {

/// Row of S at a fine point (with a fixed rule): coarse position -> weight.
RowFun scheme_row(const SchemeSpec& s, const Point& base, int coset, int rule) {
    RowFun f;
    const auto& r = s.rules(coset)[rule];
    for (size_t i = 0; i < r.offsets.size(); ++i)
        mask_add(f, point_add(base, r.offsets[i]), r.weights[i]);
    return f;
}

/// Verifies masks reproduce f exactly: f == sum_nu A^nu c_nu.
bool masks_match_row(const std::vector<Mask>& masks, const std::vector<Point>& indices,
                     const DirectionSet& dirs, const RowFun& f) {
    RowFun recon;
    for (size_t ci = 0; ci < masks.size(); ++ci) {
        const Point& nu = indices[ci];
        for (const auto& [r, c] : masks[ci]) {
            // Expand c * nabla^nu delta at r: walk the multi-index.
            std::vector<std::pair<Point, Rat>> terms = {{r, c}};
            for (int i = 0; i < dirs.count(); ++i) {
                for (int rep = 0; rep < nu[i]; ++rep) {
                    std::vector<std::pair<Point, Rat>> next;
                    for (const auto& [p, w] : terms) {
                        next.push_back({point_add(p, dirs.vectors[i]), w});
                        next.push_back({p, -w});
                    }
                    terms = std::move(next);
                }
            }
            for (const auto& [p, w] : terms) mask_add(recon, p, w);
        }
    }
    for (const auto& [p, c] : f) {
        auto it = recon.find(p);
        if (it == recon.end() || it->second != c) return false;
        recon.erase(it);
    }
    return recon.empty();
}

/// Expansion of canonical nabla_{e_axis} into direction steps:
/// list of (dir, sign, shift) triples whose sum telescopes to one unit step.
std::vector<std::tuple<int, int, Point>> axis_expansion(int d, int axis,
                                                        const DirectionSet& dirs) {
    StepPath path = step_path(zero_point(d), unit(d, axis), dirs);
    std::vector<std::tuple<int, int, Point>> out;
    for (const auto& st : path.steps) out.push_back({st.dir, st.sign, st.at});
    return out;
}

std::vector<Mask> convert_to_directional(const std::vector<Mask>& canonical,
                                         const std::vector<Point>& can_indices, int d, int l,
                                         const DirectionSet& dirs,
                                         const std::vector<Point>& dir_indices) {
    std::vector<std::vector<std::tuple<int, int, Point>>> expansions(d);
    for (int axis = 0; axis < d; ++axis) expansions[axis] = axis_expansion(d, axis, dirs);

    std::vector<Mask> out(dir_indices.size());
    auto dir_idx = [&](const Point& nu) {
        for (size_t i = 0; i < dir_indices.size(); ++i)
            if (dir_indices[i] == nu) return static_cast<int>(i);
        throw Error("internal: bad directional component");
    };

    for (size_t ci = 0; ci < canonical.size(); ++ci) {
        const Point& nu = can_indices[ci];
        for (const auto& [r, c] : canonical[ci]) {
            // Product over axes of per-axis expansions, applied nu[axis] times.
            // Terms: (directional multi-index, shift, coefficient).
            std::vector<std::tuple<Point, Point, Rat>> terms = {
                {Point(dirs.count(), 0), r, c}};
            for (int axis = 0; axis < d; ++axis) {
                for (int rep = 0; rep < nu[axis]; ++rep) {
                    std::vector<std::tuple<Point, Point, Rat>> next;
                    for (const auto& [dmu, shift, coef] : terms) {
                        for (const auto& [dir, sign, at] : expansions[axis]) {
                            Point dmu2 = dmu;
                            dmu2[dir] += 1;
                            next.push_back({dmu2, point_add(shift, at),
                                            sign > 0 ? coef : -coef});
                        }
                    }
                    terms = std::move(next);
                }
            }
            for (const auto& [dmu, shift, coef] : terms) {
                if (index_sum(dmu) != l) throw Error("internal: order drift in conversion");
                mask_add(out[dir_idx(dmu)], shift, coef);
            }
        }
    }
    return out;
}

DifferenceScheme derive_impl(const SchemeSpec& s, const DirectionSet& dirs, int l) {
    if (l < 0) throw Error("difference order must be >= 0");
    if (!dirs.spans_lattice) throw Error("direction set does not span the lattice");
    int d = s.dim();

    if (l > 0) {
        auto cert = reproduction_degree(s, l - 1, false);
        if (cert.degree < l - 1)
            throw Error("no difference scheme of order " + std::to_string(l) +
                        ": scheme reproduces only degree " + std::to_string(cert.degree));
    }

    DifferenceScheme ds{l,
                        s.M(),
                        s.cosets(),
                        dirs,
                        multiindices(dirs.count(), l),
                        {},
                        {},
                        {}};
    for (int e = 0; e < s.cosets().count(); ++e)
        ds.rule_counts.push_back(s.rule_count(e));

    std::vector<Point> can_indices = multiindices(d, l);
    bool canonical = dirs.is_canonical();

    ds.families.resize(s.cosets().count());
    for (int e = 0; e < s.cosets().count(); ++e) {
        for (const auto& mu : ds.indices) {
            ComponentFamily fam;
            fam.mu = mu;

            // Fine points eps_e + sum m_i x_i over 0 <= m <= mu, deduplicated.
            std::map<Point, std::pair<Rat, SlotInfo>> by_point;  // point -> (sign sum, slot)
            std::vector<std::pair<Point, Rat>> terms;            // (fine point, coefficient)
            {
                std::vector<Point> ms = [&] {
                    std::vector<Point> all;
                    Point cur(dirs.count(), 0);
                    auto rec = [&](auto&& self, int i) -> void {
                        if (i == dirs.count()) {
                            all.push_back(cur);
                            return;
                        }
                        for (int v = 0; v <= mu[i]; ++v) {
                            cur[i] = v;
                            self(self, i + 1);
                        }
                    };
                    rec(rec, 0);
                    return all;
                }();
                for (const auto& m : ms) {
                    Point fine = s.cosets().rep(e);
                    for (int i = 0; i < dirs.count(); ++i)
                        fine = point_add(fine, point_scale(m[i], dirs.vectors[i]));
                    Rat coef = Rat(1);
                    for (int i = 0; i < dirs.count(); ++i)
                        coef *= Rat(binomial(mu[i], m[i]));
                    if ((l - index_sum(m)) % 2 != 0) coef = -coef;
                    bool found = false;
                    for (auto& [fp, acc] : terms)
                        if (fp == fine) {
                            acc += coef;
                            found = true;
                        }
                    if (!found) terms.push_back({fine, coef});
                }
            }
            for (const auto& [fine, coef] : terms) {
                auto dec = s.cosets().decompose(fine);
                SlotInfo slot{fine, dec.base, dec.coset, s.rule_count(dec.coset)};
                by_point.emplace(fine, std::make_pair(coef, slot));
            }
            for (const auto& [fine, pr] : by_point) fam.slots.push_back(pr.second);

            // Enumerate rule tuples over the slots.
            std::vector<int> tuple(fam.slots.size(), 0);
            auto emit = [&]() {
                RowFun f;
                for (size_t si = 0; si < fam.slots.size(); ++si) {
                    const auto& slot = fam.slots[si];
                    Rat coef = by_point.at(slot.fine).first;
                    if (coef == Rat(0)) continue;
                    RowFun row = scheme_row(s, slot.base, slot.coset, tuple[si]);
                    for (const auto& [p, w] : row) mask_add(f, p, coef * w);
                }
                std::vector<Mask> masks;
                if (l == 0) {
                    masks.resize(1);
                    masks[0] = Mask(f.begin(), f.end());
                } else if (l == 1) {
                    masks = flow_decompose(f, dirs);
                } else if (canonical) {
                    masks = peel_decompose(f, d, l);
                } else {
                    auto can = peel_decompose(f, d, l);
                    masks = convert_to_directional(can, can_indices, d, l, dirs, ds.indices);
                }
                if (l >= 1 && !masks_match_row(masks, ds.indices, dirs, f)) {
                    ds.record.residual_zero = false;
                    throw Error("internal: decomposition residual nonzero");
                }
                ds.record.systems_solved += 1;
                Rat mass(0);
                for (const auto& m : masks) mass += mask_mass(m);
                ds.record.max_row_mass = std::max(ds.record.max_row_mass, mass);
                fam.rows[tuple] = std::move(masks);
            };
            auto rec = [&](auto&& self, size_t si) -> void {
                if (si == fam.slots.size()) {
                    emit();
                    return;
                }
                for (int r = 0; r < fam.slots[si].nrules; ++r) {
                    tuple[si] = r;
                    self(self, si + 1);
                }
            };
            rec(rec, 0);
            ds.families[e].push_back(std::move(fam));
        }
    }
    return ds;
}

}  // namespace

DifferenceScheme derive(const SchemeSpec& s, int l) {
    std::vector<Point> units;
    for (int i = 0; i < s.dim(); ++i) units.push_back(unit(s.dim(), i));
    return derive_impl(s, DirectionSet(units), l);
}

DifferenceScheme derive_directional(const SchemeSpec& s, const DirectionSet& dirs, int l) {
    return derive_impl(s, dirs, l);
}

Rat operator_inf_norm(const DifferenceScheme& ds) {
    Rat best(0);
    for (const auto& fams : ds.families)
        for (const auto& fam : fams)
            for (const auto& [tuple, masks] : fam.rows) {
                Rat mass(0);
                for (const auto& m : masks) mass += mask_mass(m);
                best = std::max(best, mass);
            }
    return best;
}

ChoiceFn selector_choices(const SchemeSpec& s, const RatSeq& v) {
    // Capture v by value: choices stay valid after the data moves on.
    RatSeq data = v;
    SchemeSpec scheme = s;
    return [data, scheme](const Point& k, int coset) {
        return select_rule(scheme, data, k, coset);
    };
}

DifferenceBlock<Rat> apply_diff(const DifferenceScheme& ds, const ChoiceFn& choice,
                                const DifferenceBlock<Rat>& w) {
    if (w.order != ds.order) throw Error("block order mismatch");
    if (w.indices != ds.indices) throw Error("block component mismatch");
    int d = ds.M.dim();
    DifferenceBlock<Rat> out;
    out.order = ds.order;
    out.indices = ds.indices;
    out.components.assign(ds.q(), Sequence<Rat>(d));

    for (int e = 0; e < ds.cosets.count(); ++e) {
        for (int mi = 0; mi < ds.q(); ++mi) {
            const auto& fam = ds.families[e][mi];
            // Candidate bases: union over masks and input support.
            std::set<Point> bases;
            for (const auto& [tuple, masks] : fam.rows)
                for (int ni = 0; ni < ds.q(); ++ni)
                    for (const auto& [r, c] : masks[ni])
                        for (const auto& [p, val] : w.components[ni].values())
                            bases.insert(point_sub(p, r));
            for (const auto& base : bases) {
                std::vector<int> tuple(fam.slots.size(), 0);
                for (size_t si = 0; si < fam.slots.size(); ++si) {
                    const auto& slot = fam.slots[si];
                    if (slot.nrules > 1)
                        tuple[si] = choice(point_add(base, slot.base), slot.coset);
                }
                auto it = fam.rows.find(tuple);
                if (it == fam.rows.end()) throw Error("rule choice out of range");
                Rat val(0);
                for (int ni = 0; ni < ds.q(); ++ni)
                    for (const auto& [r, c] : it->second[ni])
                        val += c * w.components[ni].at(point_add(base, r));
                Point fine = point_add(ds.M.apply(base), ds.cosets.rep(e));
                out.components[mi].set(fine, val);
            }
        }
    }
    return out;
}

}  // namespace latsub
