#include "extlab/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace extlab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

Rational parse_decimal(std::string_view s, std::string_view original) {
    auto fail = [&] { throw std::invalid_argument("malformed rational '" + std::string(original) + "'"); };
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        s = s.substr(0, e);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part[0] == '+' || exp_part[0] == '-')) {
            exp_negative = exp_part[0] == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) fail();
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
    }
    std::string_view int_part = s, frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) fail();
    if (!int_part.empty() && !all_digits(int_part)) fail();
    if (!frac_part.empty() && !all_digits(frac_part)) fail();

    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class numer(digits.empty() ? "0" : digits, 10);
    exponent -= static_cast<long>(frac_part.size());
    Rational r(numer);
    if (exponent > 0) r *= pow10(static_cast<unsigned long>(exponent));
    if (exponent < 0) r /= pow10(static_cast<unsigned long>(-exponent));
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty rational");

    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s, text);

    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num[0] == '+' || num[0] == '-')) {
        negative = num[0] == '-';
        num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r(mpz_class(std::string(num), 10), d);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    return r.get_str(10);
}

std::string to_decimal_string(const Rational& r) {
    mpz_class den = r.get_den();
    unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
    unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
    if (den != 1) return to_string(r);
    if (r.get_den() == 1) return r.get_num().get_str();

    unsigned long places = std::max(twos, fives);
    mpz_class scaled = r.get_num() * pow10(places) / r.get_den();
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.get_str();
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    return negative ? "-" + digits : digits;
}

Rational ratio(long num, long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

double to_double(const Rational& r) {
    return r.get_d();
}

Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
    Rational r(x);
    r.canonicalize();
    return r;
}

}  // namespace extlab
