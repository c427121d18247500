#include "latsub/scheme.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace latsub {

// ---------------------------------------------------------------- polynomial

Polynomial shifted_monomial(const Point& mu, const std::vector<Rat>& c) {
    int n = static_cast<int>(mu.size());
    Polynomial out = Polynomial::constant(n, Rat(1));
    for (int i = 0; i < n; ++i) {
        // (x_i + c_i)^{mu_i}
        Polynomial axis(n);
        for (int t = 0; t <= mu[i]; ++t) {
            Point e(n, 0);
            e[i] = t;
            axis.add_term(e, Rat(binomial(mu[i], t)) * rat_pow(c[i], mu[i] - t));
        }
        out = out * axis;
    }
    return out;
}

Polynomial Polynomial::shifted(const std::vector<Rat>& c) const {
    Polynomial out(nvars);
    for (const auto& [e, coef] : coeffs) out = out + shifted_monomial(e, c) * coef;
    return out;
}

std::string Polynomial::str() const {
    if (coeffs.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coeffs) {
        if (!first) os << " + ";
        first = false;
        os << rat_str(c);
        for (int i = 0; i < nvars; ++i)
            if (e[i] > 0) {
                os << "*x" << (i + 1);
                if (e[i] > 1) os << "^" << e[i];
            }
    }
    return os.str();
}

// -------------------------------------------------------------------- scheme

void StencilRule::validate(int dim) const {
    if (offsets.size() != weights.size() || offsets.empty())
        throw Error("stencil rule: offsets/weights size mismatch");
    std::set<Point> seen;
    Rat sum(0);
    for (size_t i = 0; i < offsets.size(); ++i) {
        if (static_cast<int>(offsets[i].size()) != dim)
            throw Error("stencil rule: offset dimension mismatch");
        if (!seen.insert(offsets[i]).second)
            throw Error("stencil rule: duplicate offset " + point_str(offsets[i]));
        sum += weights[i];
    }
    if (sum != Rat(1))
        throw Error("weights sum " + rat_str(sum) + " != 1");
}

std::string Selector::str() const {
    switch (kind) {
        case SelectorKind::Fixed: return "fixed:" + std::to_string(fixed_index);
        case SelectorKind::EnoMinDiff: return "eno-min-diff";
        default: return "exhaustive";
    }
}

Selector parse_selector(const std::string& s) {
    if (s == "eno-min-diff") return Selector::eno();
    if (s == "exhaustive") return Selector::exhaustive();
    if (s.rfind("fixed:", 0) == 0) {
        try {
            return Selector::fixed(std::stoi(s.substr(6)));
        } catch (const std::exception&) {
            throw Error("bad selector '" + s + "'");
        }
    }
    if (s == "fixed") return Selector::fixed(0);
    throw Error("unknown selector '" + s + "'");
}

SchemeSpec::SchemeSpec(DilationMatrix M, std::vector<std::vector<StencilRule>> rules_per_coset,
                       Selector selector, bool interpolatory)
    : M_(std::move(M)),
      cosets_(M_),
      rules_(std::move(rules_per_coset)),
      selector_(selector),
      interpolatory_(interpolatory) {
    if (static_cast<int>(rules_.size()) != cosets_.count())
        throw Error("expected one rule family per coset (" + std::to_string(cosets_.count()) +
                    " cosets)");
    K_ = 0;
    C_ = Rat(0);
    for (int e = 0; e < cosets_.count(); ++e) {
        if (rules_[e].empty())
            throw Error("missing rule for coset " + point_str(cosets_.rep(e)));
        for (const auto& rule : rules_[e]) {
            rule.validate(dim());
            for (size_t i = 0; i < rule.offsets.size(); ++i) {
                Point pos = point_sub(cosets_.rep(e), M_.apply(rule.offsets[i]));
                K_ = std::max(K_, inf_norm(pos));
                C_ = std::max(C_, rat_abs(rule.weights[i]));
            }
        }
    }
    if (interpolatory_) {
        const auto& fam = rules_[0];
        bool identity = fam.size() == 1 && fam[0].offsets.size() == 1 &&
                        inf_norm(fam[0].offsets[0]) == 0 && fam[0].weights[0] == Rat(1);
        if (!identity)
            throw Error("interpolatory scheme requires the identity rule on coset 0");
    }
}

namespace {

std::vector<std::vector<StencilRule>> assemble_rules(
    const CosetSet& cosets, const std::vector<std::pair<Point, std::vector<StencilRule>>>& by_rep) {
    std::vector<std::vector<StencilRule>> out(cosets.count());
    for (const auto& [rep, fam] : by_rep) {
        int idx = -1;
        for (int i = 0; i < cosets.count(); ++i)
            if (cosets.rep(i) == rep) idx = i;
        if (idx < 0) throw Error("rule bound to non-representative " + point_str(rep));
        out[idx] = fam;
    }
    return out;
}

StencilRule identity_rule(int d) {
    return StencilRule{{zero_point(d)}, {Rat(1)}};
}

Rat half() { return Rat(1, 2); }
Rat quarter() { return Rat(1, 4); }

}  // namespace

SchemeSpec builtin(const std::string& name) {
    if (name == "hexagonal") {
        DilationMatrix M({{2, 1}, {0, -2}});
        CosetSet cosets(M);
        std::vector<std::pair<Point, std::vector<StencilRule>>> by_rep;
        by_rep.push_back({{0, 0}, {identity_rule(2)}});
        by_rep.push_back({{1, 0}, {{{{0, 0}, {1, 0}}, {half(), half()}}}});
        by_rep.push_back({{1, -1},
                          {{{{1, 0}, {0, 1}, {0, 0}}, {quarter(), half(), quarter()}},
                           {{{0, 0}, {0, 1}, {1, 1}}, {half(), quarter(), quarter()}}}});
        by_rep.push_back({{2, -1},
                          {{{{0, 1}, {1, 1}, {1, 0}}, {quarter(), quarter(), half()}},
                           {{{0, 0}, {1, 0}, {1, 1}}, {quarter(), quarter(), half()}}}});
        return SchemeSpec(M, assemble_rules(cosets, by_rep), Selector::eno(), true);
    }
    if (name == "quincunx") {
        DilationMatrix M({{-1, 1}, {1, 1}});
        CosetSet cosets(M);
        std::vector<std::pair<Point, std::vector<StencilRule>>> by_rep;
        by_rep.push_back({{0, 0}, {identity_rule(2)}});
        by_rep.push_back({{0, 1},
                          {{{{0, 0}, {1, 1}}, {half(), half()}},
                           {{{1, 0}, {0, 1}}, {half(), half()}}}});
        return SchemeSpec(M, assemble_rules(cosets, by_rep), Selector::eno(), true);
    }
    throw Error("unknown builtin scheme '" + name + "'");
}

template <class T>
T eno_oscillation(const Sequence<T>& v, const Point& k, const StencilRule& rule) {
    T acc(0);
    int d = v.dim();
    for (const auto& o : rule.offsets) {
        Point p = point_add(k, o);
        for (int axis = 0; axis < d; ++axis) {
            T diff = v.at(point_add(p, unit(d, axis))) - v.at(p);
            acc += detail::abs_val(diff);
        }
    }
    return acc;
}

template <class T>
int eno_select(const Sequence<T>& v, const Point& k, const std::vector<StencilRule>& rules) {
    if (rules.empty()) throw Error("eno_select: no candidate rules");
    int best = 0;
    T best_osc = eno_oscillation(v, k, rules[0]);
    for (size_t i = 1; i < rules.size(); ++i) {
        T osc = eno_oscillation(v, k, rules[i]);
        if (osc < best_osc) {
            best = static_cast<int>(i);
            best_osc = osc;
        }
    }
    return best;
}

template <class T>
int select_rule(const SchemeSpec& s, const Sequence<T>& v, const Point& k, int coset) {
    const auto& fam = s.rules(coset);
    if (fam.size() == 1) return 0;
    switch (s.selector().kind) {
        case SelectorKind::Fixed: {
            int i = s.selector().fixed_index;
            if (i < 0 || i >= static_cast<int>(fam.size()))
                throw Error("fixed selector index " + std::to_string(i) + " out of range");
            return i;
        }
        case SelectorKind::EnoMinDiff: return eno_select(v, k, fam);
        default:
            throw Error("selector 'exhaustive' is certification-only; cannot apply the scheme");
    }
}

template <class T>
Sequence<T> subdivide_operator(const SchemeSpec& s, const Sequence<T>& v, const Sequence<T>& w,
                           const ChoiceFn* choice) {
    if (v.dim() != s.dim() || w.dim() != s.dim()) throw Error("dimension mismatch");
    Sequence<T> out(s.dim());
    // Candidate (base, coset) pairs whose stencil touches supp(w).
    std::vector<std::vector<Point>> offsets_by_coset(s.cosets().count());
    for (int e = 0; e < s.cosets().count(); ++e) {
        std::set<Point> uniq;
        for (const auto& rule : s.rules(e))
            for (const auto& o : rule.offsets) uniq.insert(o);
        offsets_by_coset[e].assign(uniq.begin(), uniq.end());
    }
    std::vector<std::pair<Point, int>> sites;
    sites.reserve(w.support_size() * 4);
    for (const auto& [p, val] : w.values())
        for (int e = 0; e < s.cosets().count(); ++e)
            for (const auto& o : offsets_by_coset[e]) sites.push_back({point_sub(p, o), e});
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    for (const auto& [k, e] : sites) {
        int ridx = choice ? (*choice)(k, e) : select_rule(s, v, k, e);
        if (ridx < 0 || ridx >= s.rule_count(e))
            throw Error("rule choice out of range at coset " + std::to_string(e));
        const auto& rule = s.rules(e)[ridx];
        T val(0);
        for (size_t i = 0; i < rule.offsets.size(); ++i) {
            if constexpr (std::is_same_v<T, Rat>)
                val += rule.weights[i] * w.at(point_add(k, rule.offsets[i]));
            else
                val += to_double(rule.weights[i]) * w.at(point_add(k, rule.offsets[i]));
        }
        Point fine = point_add(s.M().apply(k), s.cosets().rep(e));
        out.set(fine, val);
    }
    return out;
}

template Rat eno_oscillation<Rat>(const RatSeq&, const Point&, const StencilRule&);
template double eno_oscillation<double>(const DblSeq&, const Point&, const StencilRule&);
template int eno_select<Rat>(const RatSeq&, const Point&, const std::vector<StencilRule>&);
template int eno_select<double>(const DblSeq&, const Point&, const std::vector<StencilRule>&);
template int select_rule<Rat>(const SchemeSpec&, const RatSeq&, const Point&, int);
template int select_rule<double>(const SchemeSpec&, const DblSeq&, const Point&, int);
template RatSeq subdivide_operator<Rat>(const SchemeSpec&, const RatSeq&, const RatSeq&,
                                    const ChoiceFn*);
template DblSeq subdivide_operator<double>(const SchemeSpec&, const DblSeq&, const DblSeq&,
                                       const ChoiceFn*);

// ------------------------------------------------------------- reproduction

namespace {

/// S applied to samples of the monomial k^nu through one (coset, rule):
/// value at fine point Mk + eps as an exact polynomial in k.
Polynomial rule_output_poly(const StencilRule& rule, const Point& nu) {
    int d = static_cast<int>(nu.size());
    Polynomial out(d);
    for (size_t i = 0; i < rule.offsets.size(); ++i) {
        std::vector<Rat> off(d);
        for (int j = 0; j < d; ++j) off[j] = Rat(rule.offsets[i][j]);
        out = out + shifted_monomial(nu, off) * rule.weights[i];
    }
    return out;
}

}  // namespace

ReproductionCertificate reproduction_degree(const SchemeSpec& s, int n_max, bool require_exact) {
    ReproductionCertificate cert;
    cert.exact = require_exact;
    int d = s.dim();
    bool degree_ok = true;
    for (int r = 0; r <= n_max && degree_ok; ++r) {
        bool all_ok = true;
        for (const auto& nu : multiindices(d, r)) {
            ReproductionCertificate::Witness w;
            w.monomial = nu;
            w.ok = true;

            // Candidate P~ from the first rule of coset 0, then checked
            // against every (coset, rule).
            std::optional<Polynomial> cand;
            for (int e = 0; e < s.cosets().count() && w.ok; ++e) {
                std::vector<Rat> ceps = s.M().apply_inverse(s.cosets().rep(e));
                for (int ri = 0; ri < s.rule_count(e) && w.ok; ++ri) {
                    Polynomial lhs = rule_output_poly(s.rules(e)[ri], nu);
                    if (require_exact) {
                        Polynomial rhs = shifted_monomial(nu, ceps);
                        Polynomial resid = lhs - rhs;
                        if (!resid.zero()) {
                            w.ok = false;
                            w.output = resid;
                            w.note = "coset " + point_str(s.cosets().rep(e)) + " rule " +
                                     std::to_string(ri) + ": residual";
                        }
                    } else {
                        if (!cand) {
                            // P~(x) = lhs(x - ceps)
                            std::vector<Rat> neg(d);
                            for (int j = 0; j < d; ++j) neg[j] = -ceps[j];
                            cand = lhs.shifted(neg);
                        }
                        Polynomial expected = cand->shifted(ceps);
                        Polynomial resid = lhs - expected;
                        if (!resid.zero()) {
                            w.ok = false;
                            w.output = resid;
                            w.note = "coset " + point_str(s.cosets().rep(e)) + " rule " +
                                     std::to_string(ri) + ": inconsistent P~";
                        }
                    }
                }
            }
            if (w.ok && !require_exact) {
                // Leading coefficients must match: P - P~ in P_{r-1}.
                Polynomial lead = cand->homogeneous_part(r) - Polynomial::monomial(d, nu);
                if (!lead.zero()) {
                    w.ok = false;
                    w.output = lead;
                    w.note = "leading coefficient mismatch";
                }
            }
            if (w.ok) {
                if (require_exact)
                    w.output = Polynomial::monomial(d, nu);
                else
                    w.output = *cand;
            } else {
                all_ok = false;
            }
            cert.witnesses.push_back(std::move(w));
        }
        if (all_ok)
            cert.degree = r;
        else
            degree_ok = false;
    }
    return cert;
}

}  // namespace latsub
