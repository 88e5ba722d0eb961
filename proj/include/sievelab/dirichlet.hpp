#pragma once

// Dirichlet characters mod q.
//
// The unit group (Z/qZ)* is split by CRT into prime-power components. An odd
// component p^k is cyclic; its generator is the smallest g that is a
// primitive root mod p^2 (hence mod every p^j), so generators agree across
// all moduli sharing the prime, which makes restriction/induction a pure
// rescaling of exponents. The 2-power component uses the {-1, 5} basis for
// k >= 3, {-1} for k = 2 and nothing for k = 1.
//
// A character is an exponent vector over the flattened generator list.
// chi(g_i) = e(x_i / ord_i). Values are produced from the exact integer phase
// k/L (L = group exponent) via unit_root, never by repeated multiplication.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sievelab/arithmetic.hpp"
#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"

namespace sievelab {

namespace detail {

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m); }

inline u64 pow_mod(u64 base, u64 exp, u64 m)
{
    u64 r = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Inverse of a mod m; requires gcd(a, m) = 1.
inline u64 inv_mod(u64 a, u64 m)
{
    i64 t = 0, new_t = 1;
    i64 r = static_cast<i64>(m), new_r = static_cast<i64>(a % m);
    while (new_r != 0) {
        i64 quot = r / new_r;
        t = std::exchange(new_t, t - quot * new_t);
        r = std::exchange(new_r, r - quot * new_r);
    }
    return mod_floor(t, m);
}

// Smallest g that generates (Z/p^2)*, hence (Z/p^k)* for every k >= 1.
inline u64 primitive_root_odd(u64 p)
{
    const auto factors = factorize(p - 1);
    const u64 p2 = p * p;
    for (u64 g = 2;; ++g) {
        bool primitive = std::all_of(factors.begin(), factors.end(),
                                     [&](const PrimeFactor& f) { return pow_mod(g, (p - 1) / f.prime, p) != 1; });
        if (primitive && pow_mod(g, p - 1, p2) != 1)
            return g;
    }
}

constexpr std::uint32_t kNoLog = 0xFFFFFFFFu;

// One prime-power factor p^k of the modulus with discrete-log tables.
struct UnitComponent {
    u64 prime = 0;
    unsigned exponent = 0;
    u64 modulus = 1;
    std::vector<u64> local_generators; // residues mod p^k
    std::vector<u64> orders;
    // logs[i][r] = exponent of generator i in the representation of r mod p^k.
    std::vector<std::vector<std::uint32_t>> logs;

    static UnitComponent make(u64 p, unsigned k)
    {
        UnitComponent c;
        c.prime = p;
        c.exponent = k;
        for (unsigned i = 0; i < k; ++i)
            c.modulus *= p;
        const u64 m = c.modulus;
        if (p == 2) {
            if (k == 2) {
                c.local_generators = {3};
                c.orders = {2};
                c.logs.assign(1, std::vector<std::uint32_t>(m, kNoLog));
                c.logs[0][1] = 0;
                c.logs[0][3] = 1;
            } else if (k >= 3) {
                const u64 ord5 = m / 4;
                c.local_generators = {m - 1, 5};
                c.orders = {2, ord5};
                c.logs.assign(2, std::vector<std::uint32_t>(m, kNoLog));
                u64 x = 1;
                for (u64 b = 0; b < ord5; ++b) {
                    c.logs[0][x] = 0;
                    c.logs[1][x] = static_cast<std::uint32_t>(b);
                    c.logs[0][m - x] = 1;
                    c.logs[1][m - x] = static_cast<std::uint32_t>(b);
                    x = x * 5 % m;
                }
            }
            return c;
        }
        const u64 g = primitive_root_odd(p);
        const u64 order = m / p * (p - 1);
        c.local_generators = {g % m};
        c.orders = {order};
        c.logs.assign(1, std::vector<std::uint32_t>(m, kNoLog));
        u64 x = 1;
        for (u64 i = 0; i < order; ++i) {
            c.logs[0][x] = static_cast<std::uint32_t>(i);
            x = mul_mod(x, g, m);
        }
        return c;
    }
};

// Shared, immutable description of (Z/qZ)* used by every character mod q.
struct GroupBasis {
    u64 modulus = 1;
    std::vector<UnitComponent> components;
    std::vector<u64> generators; // CRT-lifted residues mod q
    std::vector<u64> orders;
    std::vector<std::size_t> owner; // component index of each flattened generator
    std::vector<std::size_t> slot;  // generator index within its component
    u64 exponent = 1;               // lcm of orders
    u64 group_order = 1;
    std::vector<cplx> roots; // roots[k] = e(k / exponent)

    static std::shared_ptr<const GroupBasis> make(u64 q)
    {
        auto b = std::make_shared<GroupBasis>();
        b->modulus = q;
        if (q > 1) {
            for (const auto& f : factorize(q)) {
                b->components.push_back(UnitComponent::make(f.prime, f.exponent));
                b->group_order *= b->components.back().modulus / f.prime * (f.prime - 1);
            }
        }
        for (std::size_t ci = 0; ci < b->components.size(); ++ci) {
            const auto& c = b->components[ci];
            const u64 rest = q / c.modulus;
            for (std::size_t gi = 0; gi < c.local_generators.size(); ++gi) {
                // x = g mod p^k, x = 1 mod q/p^k
                const u64 g = c.local_generators[gi];
                const u64 lift = rest == 1 ? g
                                           : 1 + rest * mul_mod((g + c.modulus - 1) % c.modulus,
                                                                inv_mod(rest % c.modulus, c.modulus), c.modulus);
                b->generators.push_back(lift % q);
                b->orders.push_back(c.orders[gi]);
                b->owner.push_back(ci);
                b->slot.push_back(gi);
                b->exponent = std::lcm(b->exponent, c.orders[gi]);
            }
        }
        b->roots.resize(b->exponent);
        for (u64 k = 0; k < b->exponent; ++k)
            b->roots[k] = unit_root(k, b->exponent);
        return b;
    }

    // Phase k (chi(n) = e(k/exponent)) or nullopt when gcd(n, q) > 1.
    std::optional<u64> phase(const std::vector<std::uint32_t>& exps, i64 n) const
    {
        if (modulus == 1)
            return 0;
        const u64 r = mod_floor(n, modulus);
        if (std::gcd(r, modulus) != 1)
            return std::nullopt;
        unsigned __int128 acc = 0;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            if (exps[i] == 0)
                continue;
            const auto& c = components[owner[i]];
            const u64 lg = c.logs[slot[i]][r % c.modulus];
            acc += static_cast<unsigned __int128>(exps[i]) * lg % orders[i] * (exponent / orders[i]);
        }
        return static_cast<u64>(acc % exponent);
    }
};

} // namespace detail

class Character {
public:
    u64 modulus() const noexcept { return basis_->modulus; }
    const std::vector<std::uint32_t>& exponents() const noexcept { return exponents_; }
    u64 conductor() const noexcept { return conductor_; }
    bool is_primitive() const noexcept { return conductor_ == basis_->modulus; }
    bool is_principal() const noexcept
    {
        return std::all_of(exponents_.begin(), exponents_.end(), [](auto e) { return e == 0; });
    }

    // Multiplicative order of chi.
    u64 order() const
    {
        u64 ord = 1;
        for (std::size_t i = 0; i < exponents_.size(); ++i)
            ord = std::lcm(ord, basis_->orders[i] / std::gcd<u64>(basis_->orders[i], exponents_[i]));
        return ord;
    }

    // Exact value as a phase k with chi(n) = e(k / phase_denominator()).
    std::optional<u64> phase(i64 n) const { return basis_->phase(exponents_, n); }
    u64 phase_denominator() const noexcept { return basis_->exponent; }

    cplx operator()(i64 n) const
    {
        auto k = phase(n);
        return k ? basis_->roots[*k] : cplx{0.0, 0.0};
    }

    const detail::GroupBasis& basis() const noexcept { return *basis_; }

    // Identity of characters is decided by modulus and exponent vector.
    friend bool operator==(const Character& a, const Character& b)
    {
        return a.modulus() == b.modulus() && a.exponents_ == b.exponents_;
    }

private:
    friend class CharacterGroup;
    Character(std::shared_ptr<const detail::GroupBasis> basis, std::vector<std::uint32_t> exps, u64 conductor)
        : basis_(std::move(basis)), exponents_(std::move(exps)), conductor_(conductor)
    {
    }

    std::shared_ptr<const detail::GroupBasis> basis_;
    std::vector<std::uint32_t> exponents_;
    u64 conductor_ = 1;
};

struct Generator {
    u64 residue;
    u64 order;
};

// The full character group mod q, ordered lexicographically by exponent vector.
class CharacterGroup {
public:
    explicit CharacterGroup(u64 q)
    {
        if (q == 0)
            throw InvalidArgument("character_group: modulus must be positive");
        basis_ = detail::GroupBasis::make(q);
        const auto& b = *basis_;
        const std::size_t r = b.generators.size();
        std::vector<std::uint32_t> exps(r, 0);
        characters_.reserve(static_cast<std::size_t>(b.group_order));
        for (u64 idx = 0; idx < b.group_order; ++idx) {
            characters_.push_back(Character(basis_, exps, conductor_of(exps)));
            // mixed-radix increment, last generator fastest
            for (std::size_t i = r; i-- > 0;) {
                if (++exps[i] < b.orders[i])
                    break;
                exps[i] = 0;
            }
        }
    }

    u64 modulus() const noexcept { return basis_->modulus; }
    std::vector<Generator> generators() const
    {
        std::vector<Generator> out;
        for (std::size_t i = 0; i < basis_->generators.size(); ++i)
            out.push_back({basis_->generators[i], basis_->orders[i]});
        return out;
    }
    const std::vector<Character>& characters() const noexcept { return characters_; }
    std::size_t size() const noexcept { return characters_.size(); }
    const Character& principal() const noexcept { return characters_.front(); }

    std::size_t primitive_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(characters_.begin(), characters_.end(), [](const Character& c) { return c.is_primitive(); }));
    }

    // Character with the given exponent vector.
    const Character& with_exponents(const std::vector<std::uint32_t>& exps) const
    {
        const auto& b = *basis_;
        if (exps.size() != b.orders.size())
            throw InvalidArgument("exponent vector length does not match the generator basis");
        u64 idx = 0;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] >= b.orders[i])
                throw InvalidArgument("exponent out of range for generator order");
            idx = idx * b.orders[i] + exps[i];
        }
        return characters_[static_cast<std::size_t>(idx)];
    }

private:
    // Conductor per component: the smallest p^j such that chi restricted to
    // that component is trivial on every unit r = 1 mod p^j.
    u64 conductor_of(const std::vector<std::uint32_t>& exps) const
    {
        const auto& b = *basis_;
        u64 conductor = 1;
        std::size_t gi = 0;
        for (const auto& c : b.components) {
            const std::size_t ngen = c.local_generators.size();
            u64 local_exp = 1;
            for (std::size_t s = 0; s < ngen; ++s)
                local_exp = std::lcm(local_exp, c.orders[s]);
            auto local_phase = [&](u64 r) {
                u64 acc = 0;
                for (std::size_t s = 0; s < ngen; ++s)
                    acc = (acc + static_cast<u64>(exps[gi + s]) * c.logs[s][r] % c.orders[s] *
                                     (local_exp / c.orders[s])) %
                          local_exp;
                return acc;
            };
            u64 pj = 1;
            for (unsigned j = 0; j <= c.exponent; ++j, pj *= c.prime) {
                bool trivial = true;
                for (u64 r = 1 % c.modulus; r < c.modulus && trivial; r += pj) {
                    if (r % c.prime == 0 && c.modulus > 1)
                        continue;
                    if (c.logs.empty())
                        break;
                    trivial = local_phase(r) == 0;
                }
                if (trivial) {
                    conductor *= pj;
                    break;
                }
            }
            gi += ngen;
        }
        return conductor;
    }

    std::shared_ptr<const detail::GroupBasis> basis_;
    std::vector<Character> characters_;
};

inline CharacterGroup character_group(u64 q) { return CharacterGroup(q); }

inline cplx eval_char(const Character& chi, i64 n) { return chi(n); }

// The primitive character chi_1 mod conductor(chi) with chi_1(n) = chi(n) on
// every n coprime to q.
inline Character inducing_primitive(const Character& chi)
{
    const u64 f = chi.conductor();
    CharacterGroup target(f);
    if (f == 1)
        return target.principal();
    const auto& src = chi.basis();
    const auto& exps = chi.exponents();
    std::vector<std::uint32_t> mapped;
    std::size_t gi = 0;
    for (const auto& c : src.components) {
        const std::size_t ngen = c.local_generators.size();
        u64 pj = 1;
        unsigned j = 0;
        while (f % (pj * c.prime) == 0) {
            pj *= c.prime;
            ++j;
        }
        if (j > 0) {
            const u64 shrink = c.modulus / pj;
            if (c.prime == 2) {
                // {-1} keeps its exponent; 5 has order 2^(k-2) -> 2^(j-2)
                mapped.push_back(exps[gi]);
                if (j >= 3)
                    mapped.push_back(static_cast<std::uint32_t>(exps[gi + 1] / shrink));
            } else {
                mapped.push_back(static_cast<std::uint32_t>(exps[gi] / shrink));
            }
        }
        gi += ngen;
    }
    return target.with_exponents(mapped);
}

// tau(chi) = sum_{a mod q} chi(a) e(a/q), each term from one exact angle.
inline cplx gauss_sum(const Character& chi)
{
    const u64 q = chi.modulus();
    const u64 L = chi.phase_denominator();
    const u64 denom = checked_mul(L, q, "gauss_sum phase denominator");
    CompensatedSum<cplx> acc;
    for (u64 a = 1; a <= q; ++a) {
        auto k = chi.phase(static_cast<i64>(a));
        if (!k)
            continue;
        const u64 num = (static_cast<unsigned __int128>(*k) * q + static_cast<unsigned __int128>(a % q) * L) % denom;
        acc.add(unit_root(num, denom));
    }
    return acc.value();
}

// sum_{M < n <= M+N} chi(n), using that a full period sums to 0 (or phi(q)).
inline cplx char_interval_sum(const Character& chi, i64 M, u64 N)
{
    if (N == 0)
        throw InvalidArgument("char_interval_sum: N must be at least 1");
    const u64 q = chi.modulus();
    const u64 periods = N / q;
    const u64 tail = N % q;
    CompensatedSum<cplx> acc;
    if (chi.is_principal() && periods > 0)
        acc.add(cplx(static_cast<double>(periods) * static_cast<double>(chi.basis().group_order), 0.0));
    for (u64 i = 1; i <= tail; ++i)
        acc.add(chi(M + static_cast<i64>(i)));
    return acc.value();
}

struct PolyaVinogradovCheck {
    cplx sum;
    double bound; // 6 sqrt(q) log q
    bool holds;
};

inline PolyaVinogradovCheck polya_vinogradov_check(const Character& chi, i64 M, u64 N)
{
    if (chi.is_principal())
        throw InvalidArgument("Polya-Vinogradov bound only applies to non-principal characters");
    const double q = static_cast<double>(chi.modulus());
    const cplx s = char_interval_sum(chi, M, N);
    const double bound = 6.0 * std::sqrt(q) * std::log(q);
    return {s, bound, std::abs(s) <= bound};
}

} // namespace sievelab
