#include "rmatch/rational.hpp"

#include <stdexcept>

namespace rmatch {

namespace {

bool is_decimal_integer(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

}  // namespace

Rational::Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    v_ = mpq_class(mpz_class(num), mpz_class(den));
    v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    const std::string_view den =
        slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!is_decimal_integer(num) || !is_decimal_integer(den) || den.front() == '-' ||
        den.front() == '+') {
        throw std::invalid_argument("malformed rational \"" + std::string(text) + "\"");
    }
    const auto strip_plus = [](std::string_view s) {
        return std::string(!s.empty() && s.front() == '+' ? s.substr(1) : s);
    };
    mpz_class n(strip_plus(num), 10);
    mpz_class d(strip_plus(den), 10);
    if (d == 0) throw std::invalid_argument("rational with zero denominator: \"" + std::string(text) + "\"");
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(std::move(q));
}

std::string Rational::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero rational");
    v_ /= o.v_;
    return *this;
}

}  // namespace rmatch
