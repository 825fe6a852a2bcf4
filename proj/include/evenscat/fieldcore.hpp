#pragma once

// Arithmetic in GF(2^{6e}) = F_{q^6}, q = 2^e, realized as GF(2)[X]/(modulus).
// Subfields F_{q^l} (l | 6) are the fixed sets of x -> x^{q^l}.

#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#if defined(__PCLMUL__)
#include <immintrin.h>
#endif

#include "errors.hpp"

namespace evenscat {

using u128 = unsigned __int128;

/// Field element: coefficient bits relative to the power basis of the modulus
/// (bit i is the coefficient of X^i).
struct Felt {
  std::uint64_t bits = 0;

  constexpr bool is_zero() const { return bits == 0; }
  friend constexpr Felt operator+(Felt a, Felt b) { return Felt{a.bits ^ b.bits}; }
  friend constexpr Felt operator-(Felt a, Felt b) { return Felt{a.bits ^ b.bits}; }
  constexpr Felt& operator+=(Felt o) {
    bits ^= o.bits;
    return *this;
  }
  friend constexpr bool operator==(Felt, Felt) = default;
  friend constexpr auto operator<=>(Felt, Felt) = default;
};

inline constexpr Felt kZero{0};
inline constexpr Felt kOne{1};

namespace detail {

inline u128 clmul(std::uint64_t a, std::uint64_t b) {
#if defined(__PCLMUL__)
  const __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128(static_cast<long long>(a)),
                                         _mm_cvtsi64_si128(static_cast<long long>(b)), 0);
  alignas(16) std::uint64_t out[2];
  _mm_store_si128(reinterpret_cast<__m128i*>(out), r);
  return (u128{out[1]} << 64) | out[0];
#else
  u128 acc = 0;
  const u128 wide = a;
  while (b) {
    const int i = std::countr_zero(b);
    acc ^= wide << i;
    b &= b - 1;
  }
  return acc;
#endif
}

inline int degree_of(u128 p) {
  const auto hi = static_cast<std::uint64_t>(p >> 64);
  if (hi) return 127 - std::countl_zero(hi);
  const auto lo = static_cast<std::uint64_t>(p);
  return lo ? 63 - std::countl_zero(lo) : -1;
}

/// Remainder of p modulo m over GF(2) (schoolbook; only used off the hot path).
inline std::uint64_t polymod(u128 p, std::uint64_t m) {
  const int dm = degree_of(m);
  for (int dp = degree_of(p); dp >= dm; dp = degree_of(p)) p ^= u128{m} << (dp - dm);
  return static_cast<std::uint64_t>(p);
}

inline std::uint64_t polymulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return polymod(clmul(a, b), m);
}

inline std::uint64_t polygcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a = polymod(a, b);
    std::swap(a, b);
  }
  return a;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Rabin's test: m of degree d is irreducible iff X^{2^d} = X mod m and
/// gcd(X^{2^{d/r}} - X, m) = 1 for every prime r | d.
inline bool is_irreducible(std::uint64_t m) {
  const int d = degree_of(m);
  if (d < 1) return false;
  if (d == 1) return true;
  auto frob_pow = [&](int k) {
    std::uint64_t x = 2;
    for (int i = 0; i < k; ++i) x = polymulmod(x, x, m);
    return x;
  };
  if (frob_pow(d) != 2) return false;
  for (auto r : prime_factors(static_cast<std::uint64_t>(d))) {
    const std::uint64_t t = frob_pow(d / static_cast<int>(r)) ^ 2;
    if (polygcd(m, t) != 1) return false;
  }
  return true;
}

/// Smallest irreducible polynomial of degree d when coefficient sequences are
/// compared from the constant term upward.
inline std::uint64_t smallest_irreducible(unsigned d) {
  const std::uint64_t top = std::uint64_t{1} << d;
  const std::uint64_t span = std::uint64_t{1} << (d - 1);
  for (std::uint64_t k = 0; k < span; ++k) {
    // bit (d-2-i) of k is the coefficient of X^{i+1}
    std::uint64_t middle = 0;
    for (unsigned i = 0; i + 1 < d; ++i)
      if ((k >> (d - 2 - i)) & 1u) middle |= std::uint64_t{1} << (i + 1);
    const std::uint64_t m = top | middle | 1u;
    if (is_irreducible(m)) return m;
  }
  throw ModulusError("no irreducible polynomial found");
}

}  // namespace detail

/// The field F_{q^6}, q = 2^e, with precomputed reduction and Frobenius tables.
/// Immutable after construction; safe to share between threads.
class FieldCtx {
 public:
  static constexpr int kN = 6;
  static constexpr unsigned kMaxE = 10;

  FieldCtx(const FieldCtx&) = delete;
  FieldCtx& operator=(const FieldCtx&) = delete;
  FieldCtx(FieldCtx&&) = default;
  FieldCtx& operator=(FieldCtx&&) = default;

  /// Build F_{2^{6e}}. The default modulus is the smallest irreducible
  /// polynomial of degree 6e; an override must be irreducible of that degree.
  static FieldCtx make(unsigned e, std::optional<std::uint64_t> modulus_override = std::nullopt) {
    if (e == 0) throw ParameterError("e must be at least 1");
    if (e > kMaxE) throw ParameterError("e must be at most " + std::to_string(kMaxE));
    const unsigned d = 6 * e;
    std::uint64_t m = 0;
    if (modulus_override) {
      m = *modulus_override;
      if (detail::degree_of(m) != static_cast<int>(d))
        throw ModulusError("modulus must have degree " + std::to_string(d));
      if (!detail::is_irreducible(m)) throw ModulusError("modulus is reducible");
    } else {
      m = detail::smallest_irreducible(d);
    }
    return FieldCtx(e, m);
  }

  unsigned e() const { return e_; }
  unsigned degree() const { return d_; }
  std::uint64_t q() const { return std::uint64_t{1} << e_; }
  std::uint64_t order() const { return std::uint64_t{1} << d_; }
  std::uint64_t modulus() const { return modulus_; }
  Felt generator() const { return generator_; }
  /// Prime divisors of the multiplicative group order 2^{6e} - 1.
  const std::vector<std::uint64_t>& group_order_primes() const { return group_primes_; }

  /// The element whose bit vector is `index` (0 <= index < order()).
  Felt element(std::uint64_t index) const { return Felt{index}; }

  Felt mul(Felt a, Felt b) const { return reduce(detail::clmul(a.bits, b.bits)); }
  Felt sqr(Felt a) const { return mul(a, a); }

  Felt pow(Felt a, std::uint64_t k) const {
    Felt r = kOne;
    while (k) {
      if (k & 1u) r = mul(r, a);
      a = sqr(a);
      k >>= 1;
    }
    return r;
  }

  Felt inv(Felt a) const {
    if (a.is_zero()) throw DegenerateInputError("inverse of zero");
    return pow(a, order() - 2);
  }

  Felt div(Felt a, Felt b) const { return mul(a, inv(b)); }

  /// x^{q^j}; j is taken mod 6.
  Felt frob(Felt x, int j) const {
    const auto& t = frob_[static_cast<std::size_t>(((j % kN) + kN) % kN)];
    std::uint64_t r = 0;
    std::uint64_t v = x.bits;
    for (unsigned k = 0; v; ++k, v >>= 8) r ^= t[k * 256 + (v & 255u)];
    return Felt{r};
  }

  /// x^{2^r}, the automorphism of index r (taken mod 6e).
  Felt automorphism(Felt x, unsigned r) const {
    r %= d_;
    for (unsigned i = 0; i < r % e_; ++i) x = sqr(x);
    return frob(x, static_cast<int>(r / e_));
  }

  /// N_{q^6/q^l}(x) = x^{(q^6-1)/(q^l-1)}, l | 6.
  Felt norm(Felt x, int ell) const {
    check_divisor(ell);
    Felt r = x;
    for (int i = ell; i < kN; i += ell) r = mul(r, frob(x, i));
    return r;
  }

  /// Tr_{q^6/q^l}(x) = sum of x^{q^{l i}}, l | 6.
  Felt trace(Felt x, int ell) const {
    check_divisor(ell);
    Felt r = x;
    for (int i = ell; i < kN; i += ell) r += frob(x, i);
    return r;
  }

  /// x lies in the fixed field of x -> x^{q^l}.
  bool in_subfield(Felt x, int ell) const { return frob(x, ell) == x; }

  /// GF(2) matrix of x -> x^{q^j}: entry i is the image of X^i.
  std::vector<std::uint64_t> frobenius_columns(int j) const {
    std::vector<std::uint64_t> cols(d_);
    for (unsigned i = 0; i < d_; ++i) cols[i] = frob(Felt{std::uint64_t{1} << i}, j).bits;
    return cols;
  }

  Felt random(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(0, order() - 1);
    return Felt{dist(rng)};
  }
  Felt random_nonzero(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(1, order() - 1);
    return Felt{dist(rng)};
  }

  /// Fixed-width lowercase hex, least significant bit = constant coefficient.
  std::string to_hex(Felt x) const { return hex_of(x.bits, (d_ + 3) / 4); }

  Felt from_hex(std::string_view s) const {
    const std::uint64_t v = parse_hex(s);
    if (v >= order()) throw ParseError("element '" + std::string(s) + "' exceeds field size");
    return Felt{v};
  }

  static std::string hex_of(std::uint64_t v, unsigned width) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(width, '0');
    for (unsigned i = 0; i < width; ++i, v >>= 4) out[width - 1 - i] = kDigits[v & 15u];
    return out;
  }

  static std::uint64_t parse_hex(std::string_view s) {
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    if (s.empty()) throw ParseError("empty hex string");
    std::uint64_t v = 0;
    unsigned significant = 0;
    for (char ch : s) {
      unsigned digit = 0;
      if (ch >= '0' && ch <= '9') digit = static_cast<unsigned>(ch - '0');
      else if (ch >= 'a' && ch <= 'f') digit = static_cast<unsigned>(ch - 'a' + 10);
      else if (ch >= 'A' && ch <= 'F') digit = static_cast<unsigned>(ch - 'A' + 10);
      else throw ParseError("invalid hex digit in '" + std::string(s) + "'");
      if (v != 0 || digit != 0) ++significant;
      if (significant > 16) throw ParseError("hex value too wide: '" + std::string(s) + "'");
      v = (v << 4) | digit;
    }
    return v;
  }

 private:
  FieldCtx(unsigned e, std::uint64_t m) : e_(e), d_(6 * e), modulus_(m) {
    chunks_ = (d_ + 7) / 8;
    // Reduction: red_[k][b] = (b * X^{d + 8k}) mod m for the high half of a product.
    const unsigned hi_chunks = (d_ + 7) / 8;
    red_.assign(static_cast<std::size_t>(hi_chunks) * 256, 0);
    for (unsigned k = 0; k < hi_chunks; ++k)
      for (unsigned b = 0; b < 256; ++b)
        red_[k * 256 + b] = detail::polymod(u128{b} << (d_ + 8 * k), m);
    mask_ = order() - 1;

    // Frobenius tables, built from the images of the basis monomials.
    std::vector<std::uint64_t> cols(d_);
    for (unsigned i = 0; i < d_; ++i) cols[i] = std::uint64_t{1} << i;
    for (int j = 0; j < kN; ++j) {
      auto& t = frob_[static_cast<std::size_t>(j)];
      t.assign(static_cast<std::size_t>(chunks_) * 256, 0);
      for (unsigned k = 0; k < chunks_; ++k)
        for (unsigned b = 0; b < 256; ++b) {
          std::uint64_t r = 0;
          for (unsigned i = 0; i < 8 && 8 * k + i < d_; ++i)
            if ((b >> i) & 1u) r ^= cols[8 * k + i];
          t[k * 256 + b] = r;
        }
      // advance the columns by one more q-power
      for (auto& c : cols)
        for (unsigned s = 0; s < e_; ++s) c = detail::polymulmod(c, c, m);
    }

    group_primes_ = detail::prime_factors(order() - 1);
    for (std::uint64_t g = 2;; ++g) {
      if (is_full_order(Felt{g})) {
        generator_ = Felt{g};
        break;
      }
    }
  }

  Felt reduce(u128 p) const {
    std::uint64_t r = static_cast<std::uint64_t>(p) & mask_;
    u128 hi = p >> d_;
    for (unsigned k = 0; hi; ++k, hi >>= 8) r ^= red_[k * 256 + static_cast<unsigned>(hi & 255u)];
    return Felt{r};
  }

  bool is_full_order(Felt g) const {
    const std::uint64_t n = order() - 1;
    for (auto p : group_primes_)
      if (pow(g, n / p) == kOne) return false;
    return true;
  }

  static void check_divisor(int ell) {
    if (ell <= 0 || kN % ell != 0)
      throw ParameterError("subfield index " + std::to_string(ell) + " does not divide 6");
  }

  unsigned e_ = 0;
  unsigned d_ = 0;
  unsigned chunks_ = 0;
  std::uint64_t modulus_ = 0;
  std::uint64_t mask_ = 0;
  Felt generator_{};
  std::vector<std::uint64_t> red_;
  std::array<std::vector<std::uint64_t>, kN> frob_;
  std::vector<std::uint64_t> group_primes_;
};

/// Convenience spelling of FieldCtx::make.
inline FieldCtx make_field(unsigned e, std::optional<std::uint64_t> modulus_override = std::nullopt) {
  return FieldCtx::make(e, modulus_override);
}

}  // namespace evenscat
