#include "fpplab/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace fpplab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    }
    BigInt z(std::string(s), 10);
    return neg ? BigInt(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty rational");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_integer(text.substr(0, slash), text);
        std::string_view den_text = text.substr(slash + 1);
        if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+')) {
            throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
        }
        BigInt den = parse_integer(den_text, text);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        bool neg = !int_part.empty() && int_part.front() == '-';
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) int_part.remove_prefix(1);
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part))) {
            throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
        }
        std::string digits = std::string(int_part) + std::string(frac_part);
        if (digits.empty()) digits = "0";
        BigInt num(digits, 10);
        BigInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
        Rational r(neg ? BigInt(-num) : num, den);
        r.canonicalize();
        return r;
    }

    return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const BigInt& z) { return z.get_str(); }

double to_double(const Rational& r) { return mpq_get_d(r.get_mpq_t()); }

double log_bigint(const BigInt& z) {
    if (z <= 0) throw std::domain_error("log of non-positive integer");
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

BigInt common_denominator(const BigInt& acc, const Rational& r) {
    BigInt out;
    mpz_lcm(out.get_mpz_t(), acc.get_mpz_t(), r.get_den_mpz_t());
    return out;
}

}  // namespace fpplab
