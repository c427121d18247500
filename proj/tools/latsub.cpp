#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>

#include "latsub/limit.hpp"
#include "latsub/report.hpp"
#include "latsub/schemeio.hpp"
#include "latsub/spectral.hpp"

using namespace latsub;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

RatSeq random_window(int dim, int radius, unsigned seed) {
    std::mt19937_64 rng(seed);
    RatSeq v(dim);
    Point p(dim, -radius);
    auto rec = [&](auto&& self, int axis) -> void {
        if (axis == dim) {
            long long num = static_cast<long long>(rng() % 17) - 8;
            long long den = 1 + static_cast<long long>(rng() % 3);
            v.set(p, Rat(Int(num), Int(den)));
            return;
        }
        for (int x = -radius; x <= radius; ++x) {
            p[axis] = x;
            self(self, axis + 1);
        }
    };
    rec(rec, 0);
    return v;
}

std::vector<Point> parse_direction_list(const std::string& text) {
    std::vector<Point> dirs;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        std::stringstream ps(part);
        std::string cell;
        Point v;
        while (std::getline(ps, cell, ',')) v.push_back(std::stoi(cell));
        if (!v.empty()) dirs.push_back(v);
    }
    if (dirs.empty()) throw Error("empty direction list '" + text + "'");
    return dirs;
}

std::vector<int> parse_grid(const std::string& text, int dim) {
    std::vector<int> g;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, 'x')) g.push_back(std::stoi(cell));
    if (static_cast<int>(g.size()) == 1) g.assign(dim, g[0]);
    if (static_cast<int>(g.size()) != dim)
        throw Error("grid '" + text + "' does not match dimension " + std::to_string(dim));
    return g;
}

RenderBasis make_basis(const std::string& name, int dim) {
    if (name == "hat") return RenderBasis::hat_basis(dim);
    if (name == "courant") {
        if (dim != 2) throw Error("the courant basis is 2-d");
        return RenderBasis::box_basis({{1, 0}, {0, 1}, {1, 1}});
    }
    return RenderBasis::box_basis(parse_direction_list(name));
}

int cmd_analyze(const std::string& path, const std::string& p_str, int max_order, int depth,
                unsigned seed, const std::string& report_path, const std::string& json_path) {
    auto scheme = parse_scheme(path);
    PNorm p = parse_pnorm(p_str);
    auto rep = certify(scheme, p, max_order, depth);
    AnalysisRequest req{path, p_str, max_order, depth, seed};
    std::string text = format_report(scheme, rep, req);
    std::cout << text;
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw Error("cannot write " + report_path);
        out << text;
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw Error("cannot write " + json_path);
        out << report_json(scheme, rep, req);
    }
    return rep.lp_convergent ? 0 : kExitNotCertified;
}

int cmd_jsr(const std::string& path, int order, const std::string& p_str, int depth) {
    auto scheme = parse_scheme(path);
    PNorm p = parse_pnorm(p_str);
    auto ds = derive(scheme, order);
    auto up = jsr_upper(ds, p, depth);
    auto lo = jsr_lower(ds, p, depth);
    std::cout << "rho_{" << pnorm_str(p) << "," << order << "}: upper = " << up.upper_str()
              << ", lower = " << lo.lower << " [" << lo.lower_method << "]\n";
    return 0;
}

int cmd_derive_diff(const std::string& path, int order, const std::string& dirs_str,
                    const std::string& out_path) {
    auto scheme = parse_scheme(path);
    DifferenceScheme ds =
        dirs_str.empty() ? derive(scheme, order)
                         : derive_directional(scheme, DirectionSet(parse_direction_list(dirs_str)),
                                              order);
    std::string text = serialize_diff_scheme(ds);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        out << text;
    }
    std::cout << "order " << order << ": max row mass " << rat_str(ds.record.max_row_mass)
              << ", operator inf-norm " << rat_str(operator_inf_norm(ds)) << "\n";
    return 0;
}

int cmd_render(const std::string& path, const std::string& input, int levels,
               const std::string& basis_name, const std::string& grid_str,
               const std::string& out_path) {
    auto scheme = parse_scheme(path);
    RatSeq v0(scheme.dim());
    if (input.empty()) {
        v0.set(zero_point(scheme.dim()), Rat(1));
    } else {
        std::ifstream in(input);
        if (!in) throw Error("cannot open input '" + input + "'");
        v0 = read_sequence_csv(in, scheme.dim());
    }
    auto basis = make_basis(basis_name, scheme.dim());
    auto st = cascade(scheme, v0, levels);
    auto field = render(scheme, st, basis, parse_grid(grid_str, scheme.dim()));
    bool pgm = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".pgm";
    std::ofstream out(out_path, pgm ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write " + out_path);
    if (pgm)
        write_pgm(out, field);
    else
        write_csv(out, field);
    std::cout << "rendered level " << st.level << " to " << out_path << " (range ["
              << field.min_value() << ", " << field.max_value() << "])\n";
    return 0;
}

int cmd_boxspline(const std::string& dirs_str, int grid, const std::string& out_path) {
    auto dirs = parse_direction_list(dirs_str);
    BoxSpline bs{DirectionMatrix(dirs)};
    std::vector<double> lo, hi;
    bs.support_box(lo, hi);
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    out.precision(12);
    int d = bs.dim();
    std::vector<int> idx(d, 0);
    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<size_t>(grid);
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % grid);
            rem /= grid;
        }
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (grid - 1);
        for (int i = 0; i < d; ++i) out << x[i] << ",";
        out << bs.eval(x) << "\n";
    }
    std::cout << "box spline C^" << bs.smoothness() << ", " << total << " samples -> "
              << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& path, unsigned seed) {
    auto scheme = parse_scheme(path);
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "  ok   " : "  FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        int W = 8;
        Point p(scheme.dim(), -W);
        auto rec = [&](auto&& self, int axis) -> void {
            if (!ok) return;
            if (axis == scheme.dim()) {
                auto dec = scheme.cosets().decompose(p);
                Point back = point_add(scheme.M().apply(dec.base), scheme.cosets().rep(dec.coset));
                if (back != p) ok = false;
                return;
            }
            for (int x = -W; x <= W; ++x) {
                p[axis] = x;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        check("coset decomposition partitions the window", ok);
    }

    {
        RatSeq c(scheme.dim());
        Point p(scheme.dim(), -4);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == scheme.dim()) {
                c.set(p, Rat(7, 3));
                return;
            }
            for (int x = -4; x <= 4; ++x) {
                p[axis] = x;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        bool ok = true;
        for (unsigned trial = 0; trial < 4 && ok; ++trial) {
            ChoiceFn choice = [&scheme, trial](const Point& k, int coset) {
                size_t h = trial * 131 + coset;
                for (int x : k) h = h * 31 + static_cast<size_t>(x + 100);
                return static_cast<int>(h % scheme.rule_count(coset));
            };
            auto out = subdivide(scheme, c, &choice);
            Point origin(scheme.dim(), 0);
            if (out.at(origin) != Rat(7, 3)) ok = false;
        }
        check("constant reproduction for arbitrary rule selections", ok);
    }

    if (scheme.interpolatory()) {
        RatSeq v = random_window(scheme.dim(), 3, seed);
        auto sv = subdivide(scheme, v);
        bool ok = true;
        for (const auto& [k, c] : v.values())
            if (sv.at(scheme.M().apply(k)) != c) ok = false;
        check("interpolation (Sv)_{Mk} = v_k", ok);
    }

    auto cert = reproduction_degree(scheme, 2, false);
    check("polynomial reproduction degree >= 0 (got " + std::to_string(cert.degree) + ")",
          cert.degree >= 0);

    for (int l = 1; l <= std::min(2, cert.degree + 1); ++l) {
        bool ok = true;
        try {
            auto ds = derive(scheme, l);
            for (unsigned t = 0; t < 20 && ok; ++t) {
                RatSeq v = random_window(scheme.dim(), 3, seed + 17 * t);
                RatSeq w = random_window(scheme.dim(), 3, seed + 17 * t + 5);
                ChoiceFn choice = selector_choices(scheme, v);
                auto lhs = delta_block(subdivide_operator(scheme, v, w, &choice), l);
                auto rhs = apply_diff(ds, choice, delta_block(w, l));
                for (size_t i = 0; i < lhs.components.size(); ++i)
                    if (!(lhs.components[i] == rhs.components[i])) ok = false;
            }
        } catch (const Error&) {
            ok = false;
        }
        check("difference-scheme identity at order " + std::to_string(l), ok);
    }

    {
        RatSeq v = random_window(scheme.dim(), 6, seed + 3);
        auto a = subdivide(scheme, v);
        RatSeq v2 = v;
        Point corner(scheme.dim(), 6);
        v2.set(corner, v.at(corner) + Rat(50));
        auto b = subdivide(scheme, v2);
        bool ok = true;
        Point p(scheme.dim(), -2);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == scheme.dim()) {
                if (a.at(p) != b.at(p)) ok = false;
                return;
            }
            for (int x = -2; x <= 2; ++x) {
                p[axis] = x;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        check("locality: distant data never reaches nearby fine values", ok);
    }

    std::cout << (failures == 0 ? "verify: all invariant suites passed\n"
                                : "verify: FAILURES present\n");
    return failures == 0 ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latsub: nonlinear non-separable subdivision toolkit"};
    app.require_subcommand(1);

    std::string scheme_path, p_str = "inf", report_path, json_path, out_path, input_path;
    std::string basis_name = "hat", grid_str = "128", dirs_str;
    int max_order = 1, depth = 4, order = 1, levels = 4, grid = 64;
    unsigned seed = 1;

    auto* analyze = app.add_subcommand("analyze", "certify convergence and regularity");
    analyze->add_option("scheme", scheme_path)->required();
    analyze->add_option("--p", p_str, "norm: 1, 2 or inf");
    analyze->add_option("--max-order", max_order);
    analyze->add_option("--depth", depth);
    analyze->add_option("--seed", seed);
    analyze->add_option("--report", report_path);
    analyze->add_option("--json", json_path);

    auto* jsr = app.add_subcommand("jsr", "joint-spectral-radius bounds for S_l");
    jsr->add_option("scheme", scheme_path)->required();
    jsr->add_option("--order", order);
    jsr->add_option("--p", p_str);
    jsr->add_option("--depth", depth);

    auto* dd = app.add_subcommand("derive-diff", "derive the scheme for the differences");
    dd->add_option("scheme", scheme_path)->required();
    dd->add_option("--order", order);
    dd->add_option("--directions", dirs_str, "e.g. \"1,0;0,1;1,1\"");
    dd->add_option("--out", out_path);

    auto* render_cmd = app.add_subcommand("render", "cascade and sample the limit");
    render_cmd->add_option("scheme", scheme_path)->required();
    render_cmd->add_option("--input", input_path, "initial data csv (default: delta)");
    render_cmd->add_option("--levels", levels);
    render_cmd->add_option("--basis", basis_name, "hat | courant | \"x;y;...\"");
    render_cmd->add_option("--grid", grid_str, "e.g. 256x256");
    render_cmd->add_option("--out", out_path)->required();

    auto* bs = app.add_subcommand("boxspline", "sample a box spline");
    bs->add_option("--directions", dirs_str)->required();
    bs->add_option("--grid", grid);
    bs->add_option("--out", out_path)->required();

    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("scheme", scheme_path)->required();
    verify->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze))
            return cmd_analyze(scheme_path, p_str, max_order, depth, seed, report_path,
                               json_path);
        if (app.got_subcommand(jsr)) return cmd_jsr(scheme_path, order, p_str, depth);
        if (app.got_subcommand(dd)) return cmd_derive_diff(scheme_path, order, dirs_str, out_path);
        if (app.got_subcommand(render_cmd))
            return cmd_render(scheme_path, input_path, levels, basis_name, grid_str, out_path);
        if (app.got_subcommand(bs)) return cmd_boxspline(dirs_str, grid, out_path);
        if (app.got_subcommand(verify)) return cmd_verify(scheme_path, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
