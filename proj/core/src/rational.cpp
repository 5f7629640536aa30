#include "susched/rational.hpp"

#include <limits>
#include <stdexcept>

namespace susched {

Rational ratio(std::int64_t num, std::int64_t den) {
    if (den == 0)
        throw std::invalid_argument("ratio: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Rational q(static_cast<long>(num), static_cast<unsigned long>(den));
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) {
    return q.get_d();
}

BigInt lcm(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

bool fits_tick(const BigInt& v) {
    return v >= 0 && v <= BigInt(std::numeric_limits<Tick>::max() / 2);
}

Tick to_tick(const BigInt& v) {
    if (!fits_tick(v))
        throw std::overflow_error("tick value out of range: " + v.get_str());
    return static_cast<Tick>(v.get_si());
}

}  // namespace susched
