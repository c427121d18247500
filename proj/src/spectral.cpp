#include "latsub/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace latsub {

long long work_budget_units() {
    // LATSUB_BUDGET_MS caps enumeration budgets; ~10^3 units per ms.
    const char* env = std::getenv("LATSUB_BUDGET_MS");
    long long ms = 20000;
    if (env) {
        try {
            ms = std::stoll(env);
        } catch (const std::exception&) {
            throw Error("LATSUB_BUDGET_MS is not a number");
        }
        if (ms <= 0) throw Error("LATSUB_BUDGET_MS must be positive");
    }
    return ms * 1000;
}

std::string RadiusBound::upper_str() const {
    std::ostringstream os;
    if (upper_is_exact()) {
        os << rat_str(upper_base) << " (exact)";
    } else {
        os.precision(12);
        os << upper << " (= (" << rat_str(upper_base) << ")^(1/" << upper_argmin << "))";
    }
    return os.str();
}

namespace {

/// Functional on a difference block: (component index, position) -> coef.
using BlockFun = std::map<std::pair<int, Point>, Rat>;

Rat fun_mass(const BlockFun& f) {
    Rat acc(0);
    for (const auto& [k, c] : f) acc += rat_abs(c);
    return acc;
}

/// Slots (with >1 rule) referenced when expanding R one level down.
/// Key: (absolute base point, coset).
std::map<std::pair<Point, int>, int> collect_slots(const DifferenceScheme& ds,
                                                   const BlockFun& R) {
    std::map<std::pair<Point, int>, int> slots;
    for (const auto& [key, c] : R) {
        const Point& pos = key.second;
        auto dec = ds.cosets.decompose(pos);
        const auto& fam = ds.families[dec.coset][key.first];
        for (const auto& slot : fam.slots)
            if (slot.nrules > 1)
                slots[{point_add(dec.base, slot.base), slot.coset}] = slot.nrules;
    }
    return slots;
}

/// Expands R (functional on level-t block) one level down under the given
/// rule assignment (point,coset)->rule.
BlockFun expand_level(const DifferenceScheme& ds, const BlockFun& R,
                      const std::map<std::pair<Point, int>, int>& assign) {
    BlockFun out;
    for (const auto& [key, coef] : R) {
        auto [nu, pos] = key;
        auto dec = ds.cosets.decompose(pos);
        const auto& fam = ds.families[dec.coset][nu];
        std::vector<int> tuple(fam.slots.size(), 0);
        for (size_t si = 0; si < fam.slots.size(); ++si) {
            const auto& slot = fam.slots[si];
            if (slot.nrules > 1)
                tuple[si] = assign.at({point_add(dec.base, slot.base), slot.coset});
        }
        const auto& masks = fam.rows.at(tuple);
        for (size_t ni = 0; ni < masks.size(); ++ni)
            for (const auto& [r, c] : masks[ni]) {
                auto k = std::make_pair(static_cast<int>(ni), point_add(dec.base, r));
                auto it = out.find(k);
                if (it == out.end()) {
                    if (coef * c != Rat(0)) out[k] = coef * c;
                } else {
                    it->second += coef * c;
                    if (it->second == Rat(0)) out.erase(it);
                }
            }
    }
    return out;
}

/// Support-only expansion for work estimation.
std::set<std::pair<int, Point>> expand_support(const DifferenceScheme& ds,
                                               const std::set<std::pair<int, Point>>& S) {
    std::set<std::pair<int, Point>> out;
    for (const auto& [nu, pos] : S) {
        auto dec = ds.cosets.decompose(pos);
        const auto& fam = ds.families[dec.coset][nu];
        for (const auto& [tuple, masks] : fam.rows)
            for (size_t ni = 0; ni < masks.size(); ++ni)
                for (const auto& [r, c] : masks[ni])
                    out.insert({static_cast<int>(ni), point_add(dec.base, r)});
    }
    return out;
}

long long count_assignments(const DifferenceScheme& ds,
                            const std::set<std::pair<int, Point>>& S, long long cap) {
    std::map<std::pair<Point, int>, int> slots;
    for (const auto& [nu, pos] : S) {
        auto dec = ds.cosets.decompose(pos);
        const auto& fam = ds.families[dec.coset][nu];
        for (const auto& slot : fam.slots)
            if (slot.nrules > 1)
                slots[{point_add(dec.base, slot.base), slot.coset}] = slot.nrules;
    }
    long long n = 1;
    for (const auto& [k, r] : slots) {
        n *= r;
        if (n > cap) return cap + 1;
    }
    return n;
}

std::vector<Point> coset_reps_pow(const DifferenceScheme& ds, int t) {
    // Digit order: index = e + m * index(E), matching digit-peeling lookups.
    std::vector<Point> reps = {zero_point(ds.M.dim())};
    size_t m = ds.cosets.count();
    for (int i = 0; i < t; ++i) {
        std::vector<Point> ordered(reps.size() * m);
        for (size_t ie = 0; ie < reps.size(); ++ie)
            for (size_t e = 0; e < m; ++e)
                ordered[e + m * ie] = point_add(ds.cosets.rep(static_cast<int>(e)),
                                                ds.M.apply(reps[ie]));
        reps = std::move(ordered);
    }
    return reps;
}

/// Estimated expansion work (mask-coefficient operations) for one output
/// row at depth t, maximizing over rule assignments.
long long estimate_row_work(const DifferenceScheme& ds, const Point& E, int mu, int t,
                            long long cap) {
    std::set<std::pair<int, Point>> S = {{mu, E}};
    long long leaves = 1;
    long long ops = 0;
    for (int level = t; level >= 1; --level) {
        long long a = count_assignments(ds, S, cap);
        if (leaves > cap / std::max(1LL, a)) return cap + 1;
        leaves *= a;
        long long sz = static_cast<long long>(S.size());
        if (ops > cap - leaves * sz * 4) return cap + 1;
        ops += leaves * sz * 4;
        if (level > 1) S = expand_support(ds, S);
        if (static_cast<long long>(S.size()) > 100000) return cap + 1;
    }
    return ops;
}

struct UpperAccumulator {
    PNorm p;
    Rat best_mass{0};                       // p = inf
    std::map<std::pair<int, Point>, Rat> row_entry_max;  // p = 1, per row
};

void enumerate_row(const DifferenceScheme& ds, const BlockFun& R, int level,
                   const Rat& norm1, UpperAccumulator& acc) {
    if (level == 0) {
        if (acc.p == PNorm::Inf) {
            acc.best_mass = std::max(acc.best_mass, fun_mass(R));
        } else {
            for (const auto& [k, c] : R) {
                Rat a = rat_abs(c);
                auto it = acc.row_entry_max.find(k);
                if (it == acc.row_entry_max.end())
                    acc.row_entry_max[k] = a;
                else
                    it->second = std::max(it->second, a);
            }
        }
        return;
    }
    // Prune: remaining levels cannot push the mass above the incumbent.
    if (acc.p == PNorm::Inf) {
        Rat cap = fun_mass(R) * rat_pow(norm1, level);
        if (cap <= acc.best_mass) return;
    }
    auto slots = collect_slots(ds, R);
    std::vector<std::pair<std::pair<Point, int>, int>> slot_list(slots.begin(), slots.end());
    std::map<std::pair<Point, int>, int> assign;
    auto rec = [&](auto&& self, size_t si) -> void {
        if (si == slot_list.size()) {
            BlockFun next = expand_level(ds, R, assign);
            enumerate_row(ds, next, level - 1, norm1, acc);
            return;
        }
        for (int r = 0; r < slot_list[si].second; ++r) {
            assign[slot_list[si].first] = r;
            self(self, si + 1);
        }
    };
    rec(rec, 0);
}

/// ||(S_l)^t||_p, exact, maximization over rule assignments.
Rat product_norm(const DifferenceScheme& ds, PNorm p, int t, long long budget) {
    auto reps = coset_reps_pow(ds, t);
    Rat norm1(0);
    {
        // Depth-1 norm for pruning.
        for (const auto& fams : ds.families)
            for (const auto& fam : fams)
                for (const auto& [tuple, masks] : fam.rows) {
                    Rat mass(0);
                    for (const auto& m : masks) mass += mask_mass(m);
                    norm1 = std::max(norm1, mass);
                }
    }
    // Work estimate; throw a budget error naming the feasible depth.
    long long total = 0;
    for (const auto& E : reps) {
        for (int mu = 0; mu < ds.q(); ++mu) {
            long long w = estimate_row_work(ds, E, mu, t, budget);
            total += w;
            if (total > budget) {
                int feasible = t - 1;
                while (feasible >= 1) {
                    long long ft = 0;
                    bool ok = true;
                    for (const auto& E2 : coset_reps_pow(ds, feasible)) {
                        for (int m2 = 0; m2 < ds.q(); ++m2) {
                            ft += estimate_row_work(ds, E2, m2, feasible, budget);
                            if (ft > budget) {
                                ok = false;
                                break;
                            }
                        }
                        if (!ok) break;
                    }
                    if (ok) break;
                    --feasible;
                }
                throw BudgetError("jsr enumeration at depth " + std::to_string(t) +
                                      " exceeds the work budget; feasible depth is " +
                                      std::to_string(std::max(feasible, 1)),
                                  std::max(feasible, 1));
            }
        }
    }

    Rat bound(0);
    std::map<std::pair<int, Point>, Rat> column_sums;  // p = 1
    for (const auto& E : reps) {
        for (int mu = 0; mu < ds.q(); ++mu) {
            UpperAccumulator acc;
            acc.p = p;
            BlockFun R = {{{mu, E}, Rat(1)}};
            enumerate_row(ds, R, t, norm1, acc);
            if (p == PNorm::Inf) {
                bound = std::max(bound, acc.best_mass);
            } else {
                for (const auto& [k, c] : acc.row_entry_max) {
                    auto it = column_sums.find(k);
                    // Column mass aggregates rows over all translates; each
                    // (row, relative position) pair hits a column once.
                    if (it == column_sums.end())
                        column_sums[k] = c;
                    else
                        it->second += c;
                }
            }
        }
    }
    if (p == PNorm::One) {
        // Sum per input component, then max over components.
        std::map<int, Rat> per_nu;
        for (const auto& [k, c] : column_sums) per_nu[k.first] += c;
        for (const auto& [nu, c] : per_nu) bound = std::max(bound, c);
    }
    return bound;
}

}  // namespace

RadiusBound jsr_upper(const DifferenceScheme& ds, PNorm p, int depth) {
    if (p == PNorm::Two) throw Error("jsr_upper certifies p in {1, inf} only");
    if (depth < 1) throw Error("depth must be >= 1");
    long long budget = work_budget_units();
    RadiusBound b;
    b.order = ds.order;
    b.p = p;
    b.depth = depth;
    double best = -1;
    for (int t = 1; t <= depth; ++t) {
        Rat bt = product_norm(ds, p, t, budget);
        b.per_depth.push_back(bt);
        double val = std::pow(to_double(bt), 1.0 / t);
        if (best < 0 || val < best) {
            best = val;
            b.upper_base = bt;
            b.upper_argmin = t;
        }
    }
    b.upper = best;
    return b;
}

// ----------------------------------------------------------------- lower

namespace {

/// Composed rows (per M^L-coset rep and component) for a fixed word of
/// per-level uniform rule choices (word[level][coset] -> rule).
std::vector<std::vector<BlockFun>> compose_word(const DifferenceScheme& ds,
                                                const std::vector<std::vector<int>>& word) {
    int L = static_cast<int>(word.size());
    auto reps = coset_reps_pow(ds, L);
    std::vector<std::vector<BlockFun>> rows(reps.size(), std::vector<BlockFun>(ds.q()));
    for (size_t ri = 0; ri < reps.size(); ++ri) {
        for (int mu = 0; mu < ds.q(); ++mu) {
            BlockFun R = {{{mu, reps[ri]}, Rat(1)}};
            for (int level = L - 1; level >= 0; --level) {
                // Uniform assignment per coset at this level.
                auto slots = collect_slots(ds, R);
                std::map<std::pair<Point, int>, int> assign;
                for (const auto& [key, nrules] : slots)
                    assign[key] = word[level][key.second] % nrules;
                R = expand_level(ds, R, assign);
            }
            rows[ri][mu] = std::move(R);
        }
    }
    return rows;
}

struct WindowMatrix {
    int radius = 0;
    std::vector<Point> points;               // window lattice points
    std::map<Point, int> point_index;
    int q = 1;
    // Sparse rows: row (point i, component mu) -> list of (col, coef).
    std::vector<std::vector<std::pair<int, Rat>>> rows;
    int dim_total() const { return static_cast<int>(points.size()) * q; }
    int id(int pi, int mu) const { return pi * q + mu; }
};

/// Section of the composed operator on a closed window; empty when no
/// closure radius <= max_radius exists.
std::optional<WindowMatrix> window_section(const DifferenceScheme& ds,
                                           const std::vector<std::vector<BlockFun>>& rows,
                                           int L, int max_radius) {
    int d = ds.M.dim();
    auto reps = coset_reps_pow(ds, L);
    std::map<Point, int> rep_index;
    for (size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<int>(i);

    // M^L decomposition of an arbitrary point via digit peeling:
    // p = rep + M^L base with rep = sum_i M^i eps_{digit_i}.
    auto decompose_L = [&](Point p) {
        std::vector<int> digits;
        for (int i = 0; i < L; ++i) {
            auto dec = ds.cosets.decompose(p);
            digits.push_back(dec.coset);
            p = dec.base;
        }
        Point r = zero_point(d);
        for (int i = L - 1; i >= 0; --i)
            r = point_add(ds.cosets.rep(digits[i]), ds.M.apply(r));
        return std::make_pair(r, p);
    };

    for (int R = 3; R <= max_radius; ++R) {
        WindowMatrix W;
        W.radius = R;
        W.q = ds.q();
        Point cur(d, -R);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                W.points.push_back(cur);
                return;
            }
            for (int v = -R; v <= R; ++v) {
                cur[axis] = v;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        for (size_t i = 0; i < W.points.size(); ++i) W.point_index[W.points[i]] = i;

        bool closed = true;
        W.rows.assign(W.dim_total(), {});
        for (size_t pi = 0; pi < W.points.size() && closed; ++pi) {
            auto [rep, base] = decompose_L(W.points[pi]);
            int ri = rep_index.at(rep);
            for (int mu = 0; mu < ds.q() && closed; ++mu) {
                auto& out = W.rows[W.id(static_cast<int>(pi), mu)];
                for (const auto& [k, c] : rows[ri][mu]) {
                    Point col = point_add(k.second, base);
                    auto it = W.point_index.find(col);
                    if (it == W.point_index.end()) {
                        closed = false;
                        break;
                    }
                    out.push_back({W.id(it->second, k.first), c});
                }
            }
        }
        if (closed) return W;
    }
    return std::nullopt;
}

/// Rationalize with a small denominator; nullopt if no close fraction.
std::optional<Rat> rationalize(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    long best_num = 0, best_den = 1;
    double best_err = 1e300;
    for (long den = 1; den <= max_den; ++den) {
        long num = std::lround(x * den);
        double err = std::fabs(x - static_cast<double>(num) / den);
        if (err < best_err) {
            best_err = err;
            best_num = num;
            best_den = den;
        }
        if (best_err < tol / 8) break;
    }
    if (best_err > tol) return std::nullopt;
    return Rat(Int(best_num), Int(best_den));
}

struct EigenCertificate {
    Rat lambda_abs;
    std::string method;
};

std::optional<EigenCertificate> certify_eigenpair(const WindowMatrix& W) {
    int n = W.dim_total();
    std::vector<double> y(n);
    auto iterate = [&](std::vector<double>& x, int iters) -> double {
        double lambda = 0;
        for (int it = 0; it < iters; ++it) {
            double nrm = 0;
            for (int i = 0; i < n; ++i) {
                double acc = 0;
                for (const auto& [j, c] : W.rows[i]) acc += to_double(c) * x[j];
                y[i] = acc;
                nrm = std::max(nrm, std::fabs(acc));
            }
            if (nrm < 1e-300) return 0.0;
            double num = 0, den = 0;
            for (int i = 0; i < n; ++i) {
                num += y[i] * x[i];
                den += x[i] * x[i];
            }
            lambda = num / den;
            for (int i = 0; i < n; ++i) x[i] = y[i] / nrm;
        }
        return lambda;
    };
    // Two deterministic starts: flat, and index-perturbed.
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i)
            x[i] = attempt == 0 ? 1.0
                                : 1.0 + 0.01 * ((i * 2654435761u % 97) / 97.0 - 0.5);
        double lambda = iterate(x, 300);
        if (lambda == 0.0) continue;
        auto lam = rationalize(lambda, 64, 1e-4);
        if (!lam) continue;
        double xmax = 0;
        for (double v : x) xmax = std::max(xmax, std::fabs(v));
        if (xmax == 0) continue;
        // Snap entries to small rationals; the exact verification below is
        // the actual certificate, the snap only has to land on it.
        std::vector<Rat> xr(n);
        bool snapped = true, nontrivial = false;
        for (int i = 0; i < n && snapped; ++i) {
            auto r = rationalize(x[i] / xmax, 64, 6e-3);
            if (!r) snapped = false;
            else {
                xr[i] = *r;
                if (*r != Rat(0)) nontrivial = true;
            }
        }
        if (!snapped || !nontrivial) continue;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            Rat acc(0);
            for (const auto& [j, c] : W.rows[i]) acc += c * xr[j];
            if (acc != (*lam) * xr[i]) ok = false;
        }
        if (ok) return EigenCertificate{rat_abs(*lam), "exact eigenpair on window"};
    }
    return std::nullopt;
}

std::optional<EigenCertificate> trace_bound(const WindowMatrix& W, int m_max) {
    // |tr(A^m)| <= dim * rho(A)^m, so rho(A) >= (|tr(A^m)|/dim)^{1/m}.
    int n = W.dim_total();
    if (n > 60) return std::nullopt;
    std::vector<std::vector<Rat>> P(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
        for (const auto& [j, c] : W.rows[i]) P[i][j] += c;
    double best = 0;
    int best_m = 0;
    for (int m = 1; m <= m_max; ++m) {
        if (m > 1) {
            std::vector<std::vector<Rat>> Q(n, std::vector<Rat>(n, Rat(0)));
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    if (P[i][k] == Rat(0)) continue;
                    for (const auto& [j, c] : W.rows[k]) Q[i][j] += P[i][k] * c;
                }
            P = std::move(Q);
        }
        Rat tr(0);
        for (int i = 0; i < n; ++i) tr += P[i][i];
        double val = std::pow(to_double(rat_abs(tr)) / n, 1.0 / m);
        if (val > best) {
            best = val;
            best_m = m;
        }
    }
    if (best <= 0) return std::nullopt;
    // Report as a double-valued certificate; the exact trace is the witness.
    EigenCertificate c{Rat(0), "trace bound (m = " + std::to_string(best_m) + ")"};
    // Encode the double bound through a rational within 1e-12 below it.
    c.lambda_abs = Rat(Int(static_cast<long long>(best * 1e12)), Int(1000000000000LL));
    return c;
}

}  // namespace

RadiusBound jsr_lower(const DifferenceScheme& ds, PNorm p, int depth) {
    if (p == PNorm::Two) throw Error("jsr_lower certifies p in {1, inf} only");
    if (depth < 1) throw Error("depth must be >= 1");
    RadiusBound b;
    b.order = ds.order;
    b.p = p;
    b.depth = depth;
    b.lower = 0;
    b.lower_method = "none";

    // Sampled words: uniform letters, lengths 1 and 2 (and length q when the
    // letter alphabet is a single element this is just the power).
    int ncosets = ds.cosets.count();
    std::vector<std::vector<int>> letters;
    {
        std::vector<int> cur(ncosets, 0);
        auto rec = [&](auto&& self, int e) -> void {
            if (e == ncosets) {
                letters.push_back(cur);
                return;
            }
            for (int r = 0; r < std::max(1, ds.rule_counts[e]); ++r) {
                cur[e] = r;
                self(self, e + 1);
            }
        };
        rec(rec, 0);
        if (letters.size() > 16) letters.resize(16);
    }
    std::vector<std::vector<std::vector<int>>> words;
    for (const auto& a : letters) words.push_back({a});
    if (depth >= 2 && letters.size() > 1) {
        size_t cap = words.size() + 8;
        for (const auto& a : letters) {
            for (const auto& bb : letters) {
                if (words.size() >= cap) break;
                words.push_back({a, bb});
            }
            if (words.size() >= cap) break;
        }
    }

    for (const auto& word : words) {
        int L = static_cast<int>(word.size());
        std::vector<std::vector<BlockFun>> rows;
        try {
            rows = compose_word(ds, word);
        } catch (const Error&) {
            continue;
        }
        auto W = window_section(ds, rows, L, 9);
        if (!W) continue;
        auto cert = certify_eigenpair(*W);
        if (!cert) {
            cert = trace_bound(*W, 3);
            if (!cert) continue;
        }
        double val = std::pow(to_double(cert->lambda_abs), 1.0 / L);
        if (val > b.lower) {
            b.lower = val;
            b.lower_method = cert->method + (L > 1 ? " (word length " + std::to_string(L) + ")"
                                                   : "");
        }
    }
    return b;
}

// ----------------------------------------------------------------- certify

double RegularityReport::upper_for_p(int order) const {
    size_t i = static_cast<size_t>(order - 1);
    switch (p) {
        case PNorm::Inf: return bounds_inf[i].upper;
        case PNorm::One: return bounds_one[i].upper;
        default: return std::sqrt(bounds_inf[i].upper * bounds_one[i].upper);
    }
}

RegularityReport certify(const SchemeSpec& s, PNorm p, int n_max, int depth) {
    if (n_max < 0) throw Error("max order must be >= 0");
    RegularityReport rep;
    rep.p = p;
    rep.depth = depth;
    rep.isotropy = classify_isotropy(s.M());

    rep.repro_degree = reproduction_degree(s, std::max(n_max, 1), false).degree;
    rep.repro_degree_exact = reproduction_degree(s, std::max(n_max, 1), true).degree;

    int max_l = std::min(n_max + 1, rep.repro_degree + 1);
    max_l = std::max(max_l, 1);
    rep.max_order = max_l;

    bool need_one = (p != PNorm::Inf);
    auto bounded_upper = [&rep](const DifferenceScheme& ds, PNorm pn, int J) {
        // Retry at the feasible depth when the enumeration would blow the
        // work budget; the report records the clamp.
        try {
            return jsr_upper(ds, pn, J);
        } catch (const BudgetError& e) {
            int feasible = std::max(1, e.feasible_depth);
            rep.notes.push_back("order " + std::to_string(ds.order) + " p=" + pnorm_str(pn) +
                                ": depth clamped to " + std::to_string(feasible) +
                                " (work budget)");
            return jsr_upper(ds, pn, feasible);
        }
    };
    for (int l = 1; l <= max_l; ++l) {
        if (l > rep.repro_degree + 1) break;
        DifferenceScheme ds = derive(s, l);
        {
            RadiusBound bi = bounded_upper(ds, PNorm::Inf, depth);
            RadiusBound lo = jsr_lower(ds, PNorm::Inf, depth);
            bi.lower = lo.lower;
            bi.lower_method = lo.lower_method;
            rep.bounds_inf.push_back(bi);
        }
        if (need_one) {
            RadiusBound b1 = bounded_upper(ds, PNorm::One, depth);
            RadiusBound lo = jsr_lower(ds, PNorm::One, depth);
            b1.lower = lo.lower;
            b1.lower_method = lo.lower_method;
            rep.bounds_one.push_back(b1);
        }
    }

    double m = static_cast<double>(s.m());
    double inv_p = (p == PNorm::Inf) ? 0.0 : (p == PNorm::One ? 1.0 : 0.5);
    double threshold = std::pow(m, inv_p);
    double up1 = rep.upper_for_p(1);
    rep.lp_convergent = up1 < threshold;
    rep.convergence_margin = threshold - up1;

    // Hoelder certificate always reads the p = inf order-1 bound.
    double upinf1 = rep.bounds_inf[0].upper;
    if (upinf1 < 1.0) {
        double sval = -std::log(upinf1) / std::log(m);
        if (sval >= 1.0) {
            rep.holder_s = 1.0;
            rep.holder_note =
                "raw exponent " + std::to_string(sval) +
                " truncated to 1 (C^s certificate covers 0 < s < 1; see Sobolev table)";
        } else {
            rep.holder_s = sval;
        }
    } else {
        rep.holder_note = "no Hoelder certificate: rho_{inf,1} upper bound "
                          "is not below 1";
    }

    for (int N = 1; N <= n_max; ++N) {
        SobolevEntry e;
        e.order = N;
        if (!rep.isotropy.isotropic()) {
            e.applicable = false;
            e.note = "not applicable: M is anisotropic";
        } else if (N > static_cast<int>(rep.bounds_inf.size())) {
            e.applicable = false;
            e.note = "order " + std::to_string(N) + " differences not derivable";
        } else {
            e.applicable = true;
            double upN = rep.upper_for_p(N);
            int d = s.dim();
            e.s_star = d * (inv_p - std::log(upN) / std::log(m));
            e.certified = e.s_star > static_cast<double>(N);
            e.note = e.certified ? "rho bound admits s = " + std::to_string(e.s_star) +
                                       " > N"
                                 : "s* = " + std::to_string(e.s_star) + " <= N";
        }
        rep.sobolev.push_back(e);
    }
    return rep;
}

RadiusInequalityCheck radius_inequality_check(const SchemeSpec& s, PNorm p, int n, int depth) {
    if (n < 0) throw Error("order must be >= 0");
    RadiusInequalityCheck chk;
    chk.n = n;
    chk.m_inf_norm = s.M().inf_norm();
    DifferenceScheme dn = derive(s, n);
    DifferenceScheme dn1 = derive(s, n + 1);
    RadiusBound lower_n = jsr_lower(dn, p, depth);
    RadiusBound upper_n1 = jsr_upper(dn1, p, depth);
    chk.lower_n = lower_n.lower;
    chk.upper_next = upper_n1.upper;
    double bound = chk.lower_n / to_double(chk.m_inf_norm) - 1e-12;
    chk.consistent = chk.upper_next >= bound;
    std::ostringstream os;
    os << "upper(" << n + 1 << ") = " << chk.upper_next << " vs lower(" << n << ")/||M||_inf = "
       << chk.lower_n / to_double(chk.m_inf_norm);
    chk.detail = os.str();
    return chk;
}

// ------------------------------------------------------------- two-level

DeviationConstants two_level_constants(const SchemeSpec& s) {
    if (!s.interpolatory())
        throw Error("two-level deviation constants require an interpolatory scheme");
    DeviationConstants out;
    int d = s.dim();
    std::vector<Point> units;
    for (int i = 0; i < d; ++i) units.push_back(unit(d, i));
    DirectionSet dirs(units);

    for (int pc = 1; pc < s.cosets().count(); ++pc) {
        for (int rule = 0; rule < s.rule_count(pc); ++rule) {
            for (int cc = 0; cc < s.cosets().count(); ++cc) {
                // k = M k' + eps_cc, wlog k' = 0; prediction at M k + eps_pc.
                Point k = s.cosets().rep(cc);
                const auto& r = s.rules(pc)[rule];
                // Deviation functional on v^{j-1}.
                RowFun dev;
                for (size_t i = 0; i < r.offsets.size(); ++i) {
                    auto it = dev.find(point_add(k, r.offsets[i]));
                    Rat add = r.weights[i];
                    if (it == dev.end())
                        dev[point_add(k, r.offsets[i])] = add;
                    else
                        it->second += add;
                }
                {
                    auto it = dev.find(k);
                    if (it == dev.end())
                        dev[k] = Rat(-1);
                    else {
                        it->second -= Rat(1);
                        if (it->second == Rat(0)) dev.erase(it);
                    }
                }
                Rat one_level = w1_cost(dev, dirs);

                // Expand one more level: points on coset 0 become v^{j-2}
                // samples, other points are predictions with free selections.
                struct Pt {
                    Point base;
                    int coset;
                    Rat coef;
                };
                std::vector<Pt> pts;
                for (const auto& [p, c] : dev) {
                    auto dec = s.cosets().decompose(p);
                    pts.push_back({dec.base, dec.coset, c});
                }
                Rat best(0);
                std::vector<int> pick(pts.size(), 0);
                auto rec = [&](auto&& self, size_t i) -> void {
                    if (i == pts.size()) {
                        RowFun f;
                        for (const auto& pt : pts) {
                            const auto& fam = s.rules(pt.coset);
                            const auto& rr = fam[pick[&pt - &pts[0]] % fam.size()];
                            for (size_t t = 0; t < rr.offsets.size(); ++t) {
                                Point pos = point_add(pt.base, rr.offsets[t]);
                                auto it = f.find(pos);
                                Rat add = pt.coef * rr.weights[t];
                                if (it == f.end()) {
                                    if (add != Rat(0)) f[pos] = add;
                                } else {
                                    it->second += add;
                                    if (it->second == Rat(0)) f.erase(it);
                                }
                            }
                        }
                        best = std::max(best, w1_cost(f, dirs));
                        return;
                    }
                    int nr = s.rule_count(pts[i].coset);
                    for (int rr = 0; rr < nr; ++rr) {
                        pick[i] = rr;
                        self(self, i + 1);
                    }
                };
                rec(rec, 0);
                out.entries.push_back({pc, cc, rule, best, one_level});
            }
        }
    }
    return out;
}

}  // namespace latsub
