#include "selfaffine/rational.hpp"

#include <cctype>
#include <cmath>

namespace selfaffine {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

ParsedNumber parse_number(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty numeric literal");

    std::string s = text;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        s = s.substr(1);
    }
    if (s.empty()) throw std::invalid_argument("bare sign in numeric literal: '" + text + "'");

    auto fail = [&]() -> ParsedNumber {
        throw std::invalid_argument("malformed numeric literal: '" + text + "'");
    };

    ParsedNumber out;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) fail();
        Rational v{mpz_class(num, 10), mpz_class(den, 10)};
        if (v.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
        v.canonicalize();
        out.value = v;
    } else {
        std::string mantissa = s;
        long exp10 = 0;
        if (auto e = s.find_first_of("eE"); e != std::string::npos) {
            mantissa = s.substr(0, e);
            std::string es = s.substr(e + 1);
            bool eneg = false;
            if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
                eneg = es[0] == '-';
                es = es.substr(1);
            }
            if (!all_digits(es) || es.size() > 6) fail();
            exp10 = std::stol(es);
            if (eneg) exp10 = -exp10;
            out.was_decimal = true;
        }
        std::string digits = mantissa;
        if (auto dot = mantissa.find('.'); dot != std::string::npos) {
            digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
            exp10 -= static_cast<long>(mantissa.size() - dot - 1);
            out.was_decimal = true;
        }
        if (!all_digits(digits)) fail();
        Rational v{mpz_class(digits, 10)};
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
        if (exp10 >= 0)
            v *= Rational(p10);
        else
            v /= Rational(p10);
        v.canonicalize();
        out.value = v;
    }
    if (negative) out.value = -out.value;
    return out;
}

Rational pow_rational(const Rational& value, long e) {
    if (e == 0) return Rational(1);
    if (value == 0 && e < 0) throw std::invalid_argument("0 to a negative power");
    Rational base = e < 0 ? Rational(1 / value) : value;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    Rational acc(1);
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    acc.canonicalize();
    return acc;
}

std::string to_string(const Rational& v) { return v.get_str(); }

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
    Rational v;
    mpq_set_d(v.get_mpq_t(), x);
    return v;
}

std::size_t hash_rational(const Rational& v) {
    // Mix the low limbs of numerator and denominator; collisions only cost
    // an extra exact comparison in hash-table users.
    auto low = [](const mpz_class& z) -> std::uint64_t {
        std::uint64_t h = static_cast<std::uint64_t>(mpz_get_ui(z.get_mpz_t()));
        if (mpz_sgn(z.get_mpz_t()) < 0) h = ~h;
        return h;
    };
    std::uint64_t h = low(v.get_num()) * 0x9e3779b97f4a7c15ULL;
    h ^= low(v.get_den()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

}  // namespace selfaffine
