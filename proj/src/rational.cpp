#include "latsub/rational.hpp"

#include <cctype>

namespace latsub {

double to_double(const Rat& r) {
    return boost::rational_cast<double>(r);
}

Rat rat_pow(const Rat& base, long exp) {
    if (exp < 0) {
        if (base == Rat(0)) throw Error("rat_pow: zero to negative power");
        return rat_pow(Rat(base.denominator(), base.numerator()), -exp);
    }
    Rat out(1);
    Rat b = base;
    long e = exp;
    while (e > 0) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

Int int_pow(Int base, unsigned exp) {
    Int out(1);
    while (exp > 0) {
        if (exp & 1) out *= base;
        base *= base;
        exp >>= 1;
    }
    return out;
}

Int binomial(long n, long k) {
    // Generalized over negative n: binom(n,k) = n(n-1)...(n-k+1)/k!
    if (k < 0) return Int(0);
    Int num(1), den(1);
    for (long i = 0; i < k; ++i) {
        num *= Int(n - i);
        den *= Int(i + 1);
    }
    return num / den;
}

Rat parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw Error("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty()) throw Error("malformed rational '" + text + "'");
        try {
            Int n(num), d(den);
            if (d == 0) throw Error("zero denominator in '" + text + "'");
            return Rat(n, d);
        } catch (const std::exception&) {
            throw Error("malformed rational '" + text + "'");
        }
    }

    // Integer or decimal with optional exponent.
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
        if (i >= s.size()) throw Error("malformed rational '" + text + "'");
        long e = 0;
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw Error("malformed rational '" + text + "'");
            e = e * 10 + (s[i] - '0');
            if (e > 1000) throw Error("exponent too large in '" + text + "'");
        }
        exp10 = eneg ? -e : e;
    }
    if (i != s.size() || !seen_digit) throw Error("malformed rational '" + text + "'");

    // cpp_int treats a leading 0 as an octal prefix; strip it.
    while (digits.size() > 1 && digits.front() == '0') digits.erase(digits.begin());
    Int n(digits.empty() ? "0" : digits);
    if (neg) n = -n;
    long p = exp10 - frac_digits;
    if (p >= 0) return Rat(n * int_pow(Int(10), static_cast<unsigned>(p)), Int(1));
    return Rat(n, int_pow(Int(10), static_cast<unsigned>(-p)));
}

std::string rat_str(const Rat& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) s += "/" + r.denominator().str();
    return s;
}

}  // namespace latsub
