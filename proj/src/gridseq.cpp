#include "latsub/gridseq.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace latsub {

PNorm parse_pnorm(const std::string& s) {
    if (s == "1") return PNorm::One;
    if (s == "2") return PNorm::Two;
    if (s == "inf" || s == "Inf" || s == "INF") return PNorm::Inf;
    throw Error("p must be one of {1, 2, inf}, got '" + s + "'");
}

std::string pnorm_str(PNorm p) {
    switch (p) {
        case PNorm::One: return "1";
        case PNorm::Two: return "2";
        default: return "inf";
    }
}

Rat lp_norm_exact(const RatSeq& v, PNorm p) {
    if (p == PNorm::Two) throw Error("p = 2 is not exact; use lp_norm");
    Rat acc(0);
    for (const auto& [pt, val] : v.values()) {
        Rat a = rat_abs(val);
        if (p == PNorm::One)
            acc += a;
        else
            acc = std::max(acc, a);
    }
    return acc;
}

Rat block_norm_exact(const DifferenceBlock<Rat>& b, PNorm p) {
    Rat m(0);
    for (const auto& c : b.components) m = std::max(m, lp_norm_exact(c, p));
    return m;
}

DirectionSet::DirectionSet(std::vector<Point> dirs) : vectors(std::move(dirs)) {
    if (vectors.empty()) throw Error("empty direction set");
    int d = static_cast<int>(vectors[0].size());
    for (const auto& v : vectors) {
        if (static_cast<int>(v.size()) != d) throw Error("direction dimension mismatch");
        if (inf_norm(v) == 0) throw Error("zero vector in direction set");
    }
    int n = count();
    if (n < d) {
        spans_lattice = false;
        return;
    }
    // gcd of all d x d minors equals 1 iff integer combinations generate Z^d.
    std::vector<int> idx(d);
    Int g(0);
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (g == 1) return;
        if (pos == d) {
            std::vector<std::vector<Int>> m(d, std::vector<Int>(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m[i][j] = Int(vectors[idx[j]][i]);
            // Exact determinant by rational-free expansion (d <= 4 in practice).
            Int det = [&]() {
                // Laplace expansion; d is tiny.
                auto minor_det = [&](auto&& dd, std::vector<int> rows,
                                     std::vector<int> cols) -> Int {
                    if (rows.size() == 1) return m[rows[0]][cols[0]];
                    Int acc(0);
                    int sign = 1;
                    for (size_t c = 0; c < cols.size(); ++c) {
                        std::vector<int> r2(rows.begin() + 1, rows.end());
                        std::vector<int> c2;
                        for (size_t t = 0; t < cols.size(); ++t)
                            if (t != c) c2.push_back(cols[t]);
                        acc += Int(sign) * m[rows[0]][cols[c]] * dd(dd, r2, c2);
                        sign = -sign;
                    }
                    return acc;
                };
                std::vector<int> rows(d), cols(d);
                for (int i = 0; i < d; ++i) rows[i] = cols[i] = i;
                return minor_det(minor_det, rows, cols);
            }();
            if (det < 0) det = -det;
            g = (g == 0) ? det : boost::multiprecision::gcd(g, det);
            return;
        }
        for (int i = start; i < n; ++i) {
            idx[pos] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    spans_lattice = (g == 1);
}

bool DirectionSet::is_canonical() const {
    int d = dim();
    if (count() != d) return false;
    for (int i = 0; i < d; ++i)
        if (vectors[i] != unit(d, i)) return false;
    return true;
}

namespace {

template <class T, class Parse>
Sequence<T> read_csv_impl(std::istream& in, int dim, Parse parse) {
    Sequence<T> seq(dim);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments and blanks.
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != dim + 1)
            throw Error("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dim + 1) + " fields");
        Point p(dim);
        for (int i = 0; i < dim; ++i) {
            try {
                p[i] = std::stoi(cells[i]);
            } catch (const std::exception&) {
                throw Error("csv line " + std::to_string(lineno) + ": bad index '" + cells[i] + "'");
            }
        }
        seq.add(p, parse(cells[dim], lineno));
    }
    return seq;
}

}  // namespace

RatSeq read_sequence_csv(std::istream& in, int dim) {
    return read_csv_impl<Rat>(in, dim, [](const std::string& s, int lineno) {
        try {
            return parse_rational(s);
        } catch (const Error& e) {
            throw Error("csv line " + std::to_string(lineno) + ": " + e.what());
        }
    });
}

DblSeq read_sequence_csv_double(std::istream& in, int dim) {
    return read_csv_impl<double>(in, dim, [](const std::string& s, int lineno) {
        if (s.find('/') != std::string::npos) return to_double(parse_rational(s));
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw Error("csv line " + std::to_string(lineno) + ": bad value '" + s + "'");
        }
    });
}

void write_sequence_csv(std::ostream& out, const RatSeq& v) {
    for (const auto& [p, val] : v.values()) {
        for (int x : p) out << x << ",";
        out << rat_str(val) << "\n";
    }
}

void write_sequence_csv(std::ostream& out, const DblSeq& v) {
    out.precision(17);
    for (const auto& [p, val] : v.values()) {
        for (int x : p) out << x << ",";
        out << val << "\n";
    }
}

}  // namespace latsub
