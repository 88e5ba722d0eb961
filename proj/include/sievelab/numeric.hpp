#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>

#include "sievelab/errors.hpp"

namespace sievelab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;
inline constexpr double kZeta3 = 1.2020569031595942853997381615114;
inline constexpr double kZeta6 = 216.0 * kZeta2 * kZeta2 * kZeta2 / 945.0; // pi^6/945

inline u64 checked_mul(u64 a, u64 b, const char* what = "product")
{
    u64 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ResourceLimit(std::string(what) + " overflows 64 bits");
    return r;
}

inline u64 checked_add(u64 a, u64 b, const char* what = "sum")
{
    u64 r;
    if (__builtin_add_overflow(a, b, &r))
        throw ResourceLimit(std::string(what) + " overflows 64 bits");
    return r;
}

// floor(sqrt(n)), exact for all 64-bit n.
constexpr u64 isqrt(u64 n) noexcept
{
    if (n < 2)
        return n;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (r > n / r))
        --r;
    while ((r + 1) <= n / (r + 1))
        ++r;
    return r;
}

constexpr bool is_square(u64 n) noexcept
{
    u64 r = isqrt(n);
    return r * r == n;
}

// Mathematical residue in [0, m).
constexpr u64 mod_floor(i64 n, u64 m) noexcept
{
    i64 r = n % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

// e(k/m) = exp(2 pi i k/m) from the reduced angle, never by repeated products.
inline cplx unit_root(u64 k, u64 m) noexcept
{
    double angle = kTwoPi * static_cast<double>(k % m) / static_cast<double>(m);
    return {std::cos(angle), std::sin(angle)};
}

// Neumaier-compensated accumulator. Order of add() calls fixes the result.
template <typename T>
class CompensatedSum {
public:
    void add(T v) noexcept
    {
        if constexpr (std::is_same_v<T, cplx>) {
            re_.add(v.real());
            im_.add(v.imag());
        } else {
            T t = sum_ + v;
            if (std::abs(sum_) >= std::abs(v))
                comp_ += (sum_ - t) + v;
            else
                comp_ += (v - t) + sum_;
            sum_ = t;
        }
    }
    CompensatedSum& operator+=(T v) noexcept
    {
        add(v);
        return *this;
    }
    T value() const noexcept
    {
        if constexpr (std::is_same_v<T, cplx>)
            return {re_.value(), im_.value()};
        else
            return sum_ + comp_;
    }

private:
    struct Empty {};
    std::conditional_t<std::is_same_v<T, cplx>, CompensatedSum<double>, Empty> re_{}, im_{};
    std::conditional_t<std::is_same_v<T, cplx>, Empty, T> sum_{}, comp_{};
};

template <typename T>
T compensated_total(std::span<const T> values) noexcept
{
    CompensatedSum<T> acc;
    for (const T& v : values)
        acc.add(v);
    return acc.value();
}

// Greatest common divisor on signed/unsigned mixes, always non-negative.
constexpr u64 gcd_u(u64 a, u64 b) noexcept { return std::gcd(a, b); }

} // namespace sievelab
