#include "mcadiff/rational.hpp"

#include "mcadiff/errors.hpp"

#include <cctype>
#include <cstdlib>

namespace mcadiff {

namespace {

Rational parse_decimal(std::string_view text) {
    std::string digits;
    long exponent = 0;
    bool negative = false;
    bool seen_point = false;
    bool seen_digit = false;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c == 'e' || c == 'E') {
            const std::string tail(text.substr(i + 1));
            char* end = nullptr;
            const long e = std::strtol(tail.c_str(), &end, 10);
            if (tail.empty() || *end != '\0') throw InvalidArgument("malformed exponent in '" + std::string(text) + "'");
            exponent += e;
            break;
        } else {
            throw InvalidArgument("malformed number '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) throw InvalidArgument("malformed number '" + std::string(text) + "'");

    Integer mantissa(digits, 10);
    if (negative) mantissa = -mantissa;
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational result = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    result.canonicalize();
    return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw InvalidArgument("empty number");

    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);

    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
    return Rational(num / den);
}

std::string to_fraction_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational pow(const Rational& base, unsigned long exponent) {
    Rational result;
    mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    result.canonicalize();
    return result;
}

Rational ratio(long num, long den) {
    if (den == 0) throw InvalidArgument("ratio: zero denominator");
    Rational result{Integer(num), Integer(den)};
    result.canonicalize();
    return result;
}

}  // namespace mcadiff
