#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace susched {

/// Discrete time. All schedules advance in integer ticks; one tick is the
/// unit interval of the analysis.
using Tick = std::int64_t;

/// Exact fraction type used for utilizations, fluid allocations, lags and
/// test thresholds. Backed by GMP so experiment-scale arithmetic never
/// overflows or rounds.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Canonical num/den construction (mpq_class alone does not reduce).
Rational ratio(std::int64_t num, std::int64_t den = 1);

/// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

BigInt lcm(const BigInt& a, const BigInt& b);

bool fits_tick(const BigInt& v);

/// Narrowing conversion; throws std::overflow_error if the value does not fit.
Tick to_tick(const BigInt& v);

}  // namespace susched
