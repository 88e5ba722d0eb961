#pragma once

// Multiplicative-function tables over [1, x_max] and small factorization
// helpers shared by every other module.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"

namespace sievelab {

struct PrimeFactor {
    u64 prime;
    unsigned exponent;
    friend bool operator==(const PrimeFactor&, const PrimeFactor&) = default;
};

// Trial-division factorization, ascending primes.
inline std::vector<PrimeFactor> factorize(u64 n)
{
    if (n == 0)
        throw InvalidArgument("factorize: n must be positive");
    std::vector<PrimeFactor> out;
    for (u64 p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0)
            continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1)
        out.push_back({n, 1});
    return out;
}

inline std::vector<u64> divisors(u64 n)
{
    std::vector<u64> out{1};
    for (const auto& [p, e] : factorize(n)) {
        std::size_t base = out.size();
        u64 pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i)
                out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline u64 euler_phi(u64 n)
{
    if (n == 0)
        throw InvalidArgument("euler_phi: n must be positive");
    u64 phi = n;
    for (const auto& f : factorize(n))
        phi = phi / f.prime * (f.prime - 1);
    return phi;
}

// phi(q^2) = q * phi(q), with overflow reported rather than wrapped.
inline u64 euler_phi_qsq(u64 q)
{
    if (q == 0)
        throw InvalidArgument("euler_phi_qsq: q must be positive");
    // phi(q) >= sqrt(q/2), so q^1.5/sqrt(2) > 2^64 means certain overflow;
    // bail out before an expensive factorization.
    if (static_cast<double>(q) * std::sqrt(static_cast<double>(q) / 2.0) > 0x1p65)
        throw ResourceLimit("euler_phi_qsq: q*phi(q) overflows 64 bits");
    return checked_mul(q, euler_phi(q), "euler_phi_qsq");
}

// Largest squarefree a with n = a*m^2, by trial division alone.
inline u64 squarefree_kernel(u64 n)
{
    if (n == 0)
        throw InvalidArgument("squarefree_kernel: n must be positive");
    u64 s = 1;
    for (const auto& f : factorize(n))
        if (f.exponent % 2 == 1)
            s *= f.prime;
    return s;
}

struct BuildOptions {
    // Peak-memory ceiling for the finished tables.
    u64 memory_budget_bytes = u64{2} << 30;
    // Above this many entries the tables are filled segment by segment.
    u64 segment_threshold = u64{1} << 26;
    u64 segment_size = u64{1} << 18;
};

class SieveTables;
inline SieveTables build_tables(u64 x_max, const BuildOptions& opts = {});
inline void save_tables(const SieveTables& t, const std::filesystem::path& path);
inline std::optional<SieveTables> load_tables(const std::filesystem::path& path, u64 expected_x_max);

// Immutable after construction; safe to share across threads by const&.
class SieveTables {
public:
    static constexpr std::size_t kBytesPerEntry =
        sizeof(std::uint32_t) * 3 + sizeof(double) + sizeof(std::int8_t) + sizeof(std::uint16_t);
    static constexpr u64 kMaxSupported = 0xFFFFFFFFull - 1;

    u64 x_max() const noexcept { return x_max_; }

    u64 spf(u64 n) const { return spf_[index(n)]; }
    double lambda(u64 n) const { return lambda_[index(n)]; }
    u64 phi(u64 n) const { return phi_[index(n)]; }
    int mu(u64 n) const { return mu_[index(n)]; }
    u64 tau(u64 n) const { return tau_[index(n)]; }
    u64 kernel(u64 n) const { return kernel_[index(n)]; }

    std::span<const std::uint32_t> primes() const noexcept { return primes_; }
    std::span<const double> lambda_table() const noexcept { return lambda_; }

    bool is_prime(u64 n) const { return n >= 2 && spf(n) == n; }

    friend bool operator==(const SieveTables&, const SieveTables&) = default;

private:
    friend SieveTables build_tables(u64, const BuildOptions&);
    friend std::optional<SieveTables> load_tables(const std::filesystem::path&, u64);
    friend void save_tables(const SieveTables&, const std::filesystem::path&);

    SieveTables() = default;

    std::size_t index(u64 n) const
    {
        if (n > x_max_)
            throw OutOfTable("n = " + std::to_string(n) + " exceeds table bound " + std::to_string(x_max_));
        return static_cast<std::size_t>(n);
    }

    void allocate(u64 x_max)
    {
        x_max_ = x_max;
        std::size_t n = static_cast<std::size_t>(x_max) + 1;
        spf_.assign(n, 0);
        lambda_.assign(n, 0.0);
        phi_.assign(n, 0);
        mu_.assign(n, 0);
        tau_.assign(n, 0);
        kernel_.assign(n, 0);
    }

    void fill_linear();
    void fill_segmented(u64 segment_size);

    u64 x_max_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<double> lambda_;
    std::vector<std::uint32_t> phi_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint16_t> tau_;
    std::vector<std::uint32_t> kernel_;
    std::vector<std::uint32_t> primes_;
};

inline void SieveTables::fill_linear()
{
    const std::uint32_t limit = static_cast<std::uint32_t>(x_max_);
    for (std::uint32_t n = 2; n <= limit; ++n) {
        if (spf_[n] == 0) {
            spf_[n] = n;
            primes_.push_back(n);
        }
        for (std::uint32_t p : primes_) {
            if (p > spf_[n] || static_cast<u64>(p) * n > limit)
                break;
            spf_[static_cast<std::size_t>(p) * n] = p;
        }
    }
    if (limit >= 1) {
        phi_[1] = 1;
        mu_[1] = 1;
        tau_[1] = 1;
        kernel_[1] = 1;
    }
    for (std::uint32_t n = 2; n <= limit; ++n) {
        const std::uint32_t p = spf_[n];
        std::uint32_t rest = n;
        unsigned e = 0;
        std::uint32_t pk = 1;
        while (rest % p == 0) {
            rest /= p;
            pk *= p;
            ++e;
        }
        phi_[n] = phi_[rest] * (pk / p) * (p - 1);
        mu_[n] = e > 1 ? 0 : static_cast<std::int8_t>(-mu_[rest]);
        tau_[n] = static_cast<std::uint16_t>(tau_[rest] * (e + 1));
        kernel_[n] = kernel_[rest] * (e % 2 == 1 ? p : 1);
        lambda_[n] = rest == 1 ? std::log(static_cast<double>(p)) : 0.0;
    }
}

inline void SieveTables::fill_segmented(u64 segment_size)
{
    const u64 root = isqrt(x_max_);
    std::vector<std::uint32_t> small;
    {
        std::vector<bool> composite(root + 1, false);
        for (u64 i = 2; i <= root; ++i) {
            if (composite[i])
                continue;
            small.push_back(static_cast<std::uint32_t>(i));
            for (u64 j = i * i; j <= root; j += i)
                composite[j] = true;
        }
    }
    phi_[1] = mu_[1] = tau_[1] = kernel_[1] = 1;

    std::vector<u64> rest;
    std::vector<std::uint32_t> distinct, last_prime;
    for (u64 lo = 2; lo <= x_max_; lo += segment_size) {
        const u64 hi = std::min(x_max_ + 1, lo + segment_size);
        const std::size_t len = static_cast<std::size_t>(hi - lo);
        rest.resize(len);
        distinct.assign(len, 0);
        last_prime.assign(len, 0);
        for (std::size_t i = 0; i < len; ++i) {
            const u64 n = lo + i;
            rest[i] = n;
            phi_[n] = 1;
            mu_[n] = 1;
            tau_[n] = 1;
            kernel_[n] = 1;
        }
        for (std::uint32_t p : small) {
            if (static_cast<u64>(p) * p >= hi)
                break;
            for (u64 n = (lo + p - 1) / p * p; n < hi; n += p) {
                const std::size_t i = static_cast<std::size_t>(n - lo);
                unsigned e = 0;
                u64 pk = 1;
                while (rest[i] % p == 0) {
                    rest[i] /= p;
                    pk *= p;
                    ++e;
                }
                if (spf_[n] == 0)
                    spf_[n] = p;
                phi_[n] = static_cast<std::uint32_t>(phi_[n] * (pk / p) * (p - 1));
                mu_[n] = e > 1 ? 0 : static_cast<std::int8_t>(-mu_[n]);
                tau_[n] = static_cast<std::uint16_t>(tau_[n] * (e + 1));
                kernel_[n] *= (e % 2 == 1 ? p : 1);
                ++distinct[i];
                last_prime[i] = p;
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            const u64 n = lo + i;
            if (rest[i] > 1) {
                const auto p = static_cast<std::uint32_t>(rest[i]);
                if (spf_[n] == 0)
                    spf_[n] = p;
                phi_[n] *= (p - 1);
                mu_[n] = static_cast<std::int8_t>(-mu_[n]);
                tau_[n] = static_cast<std::uint16_t>(tau_[n] * 2);
                kernel_[n] *= p;
                ++distinct[i];
                last_prime[i] = p;
            }
            if (spf_[n] == n)
                primes_.push_back(static_cast<std::uint32_t>(n));
            lambda_[n] = distinct[i] == 1 ? std::log(static_cast<double>(last_prime[i])) : 0.0;
        }
    }
}

inline SieveTables build_tables(u64 x_max, const BuildOptions& opts)
{
    if (x_max < 2)
        throw InvalidArgument("build_tables: x_max must be at least 2");
    if (x_max > SieveTables::kMaxSupported)
        throw ResourceLimit("build_tables: x_max exceeds 32-bit table entries");
    const double bytes = static_cast<double>(x_max + 1) * SieveTables::kBytesPerEntry;
    if (bytes > static_cast<double>(opts.memory_budget_bytes))
        throw ResourceLimit("build_tables: x_max = " + std::to_string(x_max) + " needs " +
                            std::to_string(static_cast<u64>(bytes)) + " bytes, budget is " +
                            std::to_string(opts.memory_budget_bytes));
    SieveTables t;
    t.allocate(x_max);
    if (x_max > opts.segment_threshold)
        t.fill_segmented(std::max<u64>(opts.segment_size, 64));
    else
        t.fill_linear();
    return t;
}

// s(n) with the table when n <= x_max; otherwise trial division by tabled
// primes up to sqrt(n), then odd trial divisors past the table if needed.
inline u64 squarefree_kernel(const SieveTables& tables, u64 n)
{
    if (n == 0)
        throw InvalidArgument("squarefree_kernel: n must be positive");
    if (n <= tables.x_max())
        return tables.kernel(n);
    u64 r = n;
    u64 s = 1;
    auto strip = [&](u64 p) {
        unsigned e = 0;
        while (r % p == 0) {
            r /= p;
            ++e;
        }
        if (e % 2 == 1)
            s *= p;
    };
    u64 last = 1;
    for (std::uint32_t p : tables.primes()) {
        if (p > r / p)
            break;
        strip(p);
        last = p;
    }
    if (last > 1 && last == tables.primes().back()) {
        for (u64 d = last + (last == 2 ? 1 : 2); d <= r / d; d += 2)
            strip(d);
    }
    if (r > 1)
        s *= r;
    return s;
}

// n with Lambda(n) > 0, ascending, paired with log p.
struct PrimePower {
    u64 n;
    double log_p;
};

inline std::vector<PrimePower> prime_powers_upto(const SieveTables& tables, u64 limit)
{
    if (limit > tables.x_max())
        throw OutOfTable("prime powers requested up to " + std::to_string(limit) + " beyond table bound " +
                         std::to_string(tables.x_max()));
    std::vector<PrimePower> out;
    auto lam = tables.lambda_table();
    for (u64 n = 2; n <= limit; ++n)
        if (lam[n] > 0.0)
            out.push_back({n, lam[n]});
    return out;
}

// ---------------------------------------------------------------------------
// Binary cache: "SLAB1", x_max (u64 LE), prime count (u64 LE), then spf,
// lambda, phi, mu, tau, kernel, primes as contiguous little-endian arrays.

namespace detail {

template <typename T>
void write_le(std::ostream& os, std::span<const T> data)
{
    if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
        os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    } else {
        for (const T& v : data) {
            unsigned char buf[sizeof(T)];
            std::memcpy(buf, &v, sizeof(T));
            std::reverse(buf, buf + sizeof(T));
            os.write(reinterpret_cast<const char*>(buf), sizeof(T));
        }
    }
}

template <typename T>
bool read_le(std::istream& is, std::span<T> data)
{
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if (!is)
        return false;
    if constexpr (std::endian::native != std::endian::little && sizeof(T) > 1) {
        for (T& v : data) {
            unsigned char buf[sizeof(T)];
            std::memcpy(buf, &v, sizeof(T));
            std::reverse(buf, buf + sizeof(T));
            std::memcpy(&v, buf, sizeof(T));
        }
    }
    return true;
}

inline constexpr char kCacheMagic[5] = {'S', 'L', 'A', 'B', '1'};

} // namespace detail

inline void save_tables(const SieveTables& t, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw InvalidArgument("cannot open table cache for writing: " + path.string());
    os.write(detail::kCacheMagic, sizeof(detail::kCacheMagic));
    const u64 header[2] = {t.x_max_, static_cast<u64>(t.primes_.size())};
    detail::write_le<u64>(os, header);
    detail::write_le<std::uint32_t>(os, t.spf_);
    detail::write_le<double>(os, t.lambda_);
    detail::write_le<std::uint32_t>(os, t.phi_);
    detail::write_le<std::int8_t>(os, t.mu_);
    detail::write_le<std::uint16_t>(os, t.tau_);
    detail::write_le<std::uint32_t>(os, t.kernel_);
    detail::write_le<std::uint32_t>(os, t.primes_);
    if (!os)
        throw ResourceLimit("failed writing table cache: " + path.string());
}

// nullopt when the file is missing, malformed, or built for another x_max.
inline std::optional<SieveTables> load_tables(const std::filesystem::path& path, u64 expected_x_max)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return std::nullopt;
    char magic[sizeof(detail::kCacheMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, detail::kCacheMagic, sizeof(magic)) != 0)
        return std::nullopt;
    u64 header[2];
    if (!detail::read_le<u64>(is, header) || header[0] != expected_x_max || header[0] > SieveTables::kMaxSupported)
        return std::nullopt;
    SieveTables t;
    t.allocate(header[0]);
    t.primes_.resize(static_cast<std::size_t>(header[1]));
    bool ok = detail::read_le<std::uint32_t>(is, t.spf_) && detail::read_le<double>(is, t.lambda_) &&
              detail::read_le<std::uint32_t>(is, t.phi_) && detail::read_le<std::int8_t>(is, t.mu_) &&
              detail::read_le<std::uint16_t>(is, t.tau_) && detail::read_le<std::uint32_t>(is, t.kernel_) &&
              detail::read_le<std::uint32_t>(is, t.primes_);
    if (!ok)
        return std::nullopt;
    return t;
}

} // namespace sievelab
