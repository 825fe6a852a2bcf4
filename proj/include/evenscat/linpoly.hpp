#pragma once

// sigma-linearized polynomials over F_{q^6}, sigma = x -> x^{q^s} with gcd(s,6) = 1.
// A LinPoly stores a_0..a_5 for f(X) = sum a_i X^{sigma^i}.

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fieldcore.hpp"
#include "gf2.hpp"

namespace evenscat {

class LinPoly {
 public:
  static constexpr int kN = FieldCtx::kN;
  using Coeffs = std::array<Felt, kN>;

  LinPoly(const FieldCtx& ctx, int s, Coeffs coeffs) : ctx_(&ctx), s_(normalize_step(s)), a_(coeffs) {}

  static LinPoly zero(const FieldCtx& ctx, int s = 1) { return LinPoly(ctx, s, Coeffs{}); }
  static LinPoly identity(const FieldCtx& ctx, int s = 1) { return monomial(ctx, s, 0, kOne); }
  /// coef * X^{sigma^i}
  static LinPoly monomial(const FieldCtx& ctx, int s, int i, Felt coef) {
    Coeffs a{};
    a[static_cast<std::size_t>(((i % kN) + kN) % kN)] = coef;
    return LinPoly(ctx, s, a);
  }

  const FieldCtx& ctx() const { return *ctx_; }
  int step() const { return s_; }
  const Coeffs& coeffs() const { return a_; }
  Felt coeff(int i) const { return a_[static_cast<std::size_t>(((i % kN) + kN) % kN)]; }
  Felt& coeff(int i) { return a_[static_cast<std::size_t>(((i % kN) + kN) % kN)]; }

  bool is_zero() const {
    for (auto c : a_)
      if (!c.is_zero()) return false;
    return true;
  }

  /// sum a_i * x^{q^{s i}}
  Felt operator()(Felt x) const {
    Felt r = ctx_->mul(a_[0], x);
    for (int i = 1; i < kN; ++i)
      if (!a_[static_cast<std::size_t>(i)].is_zero())
        r += ctx_->mul(a_[static_cast<std::size_t>(i)], ctx_->frob(x, s_ * i));
    return r;
  }

  /// The same map written with step t: X^{q^{s i}} = X^{q^{t i'}} with t i' = s i (mod 6).
  LinPoly with_step(int t) const {
    t = normalize_step(t);
    Coeffs b{};
    for (int i = 0; i < kN; ++i) {
      const int k = (s_ * i) % kN;
      const int ip = (k * t) % kN;  // t is its own inverse mod 6
      b[static_cast<std::size_t>(ip)] = a_[static_cast<std::size_t>(i)];
    }
    return LinPoly(*ctx_, t, b);
  }

  /// lambda * f(X)
  LinPoly scaled(Felt lambda) const {
    Coeffs b{};
    for (int i = 0; i < kN; ++i)
      b[static_cast<std::size_t>(i)] = ctx_->mul(lambda, a_[static_cast<std::size_t>(i)]);
    return LinPoly(*ctx_, s_, b);
  }

  friend LinPoly operator+(const LinPoly& f, const LinPoly& g) {
    check_compatible(f, g);
    Coeffs b{};
    for (std::size_t i = 0; i < kN; ++i) b[i] = f.a_[i] + g.a_[i];
    return LinPoly(*f.ctx_, f.s_, b);
  }

  friend bool operator==(const LinPoly& f, const LinPoly& g) {
    return f.ctx_ == g.ctx_ && f.s_ == g.s_ && f.a_ == g.a_;
  }

  static void check_compatible(const LinPoly& f, const LinPoly& g) {
    if (f.ctx_ != g.ctx_) throw ParameterError("polynomials live in different fields");
    if (f.s_ != g.s_) throw ParameterError("polynomials have different steps");
  }

  static int normalize_step(int s) {
    const int r = ((s % kN) + kN) % kN;
    if (std::gcd(r, kN) != 1) throw ParameterError("step s must be coprime to 6, got " + std::to_string(s));
    return r;
  }

 private:
  const FieldCtx* ctx_;
  int s_;
  Coeffs a_;
};

inline Felt eval(const LinPoly& f, Felt x) { return f(x); }

/// f o g, i.e. h_k = sum_{i+j=k} a_i b_j^{sigma^i}.
inline LinPoly compose(const LinPoly& f, const LinPoly& g) {
  LinPoly::check_compatible(f, g);
  const auto& F = f.ctx();
  const int s = f.step();
  LinPoly::Coeffs h{};
  for (int i = 0; i < LinPoly::kN; ++i) {
    const Felt ai = f.coeff(i);
    if (ai.is_zero()) continue;
    for (int j = 0; j < LinPoly::kN; ++j) {
      const Felt bj = g.coeff(j);
      if (bj.is_zero()) continue;
      h[static_cast<std::size_t>((i + j) % LinPoly::kN)] += F.mul(ai, F.frob(bj, s * i));
    }
  }
  return LinPoly(F, s, h);
}

/// Adjoint with respect to the trace form: coefficient i is a_{6-i}^{sigma^i}.
inline LinPoly adjoint(const LinPoly& f) {
  const auto& F = f.ctx();
  LinPoly::Coeffs b{};
  for (int i = 0; i < LinPoly::kN; ++i)
    b[static_cast<std::size_t>(i)] = F.frob(f.coeff(LinPoly::kN - i), f.step() * i);
  return LinPoly(F, f.step(), b);
}

/// f^rho: every coefficient mapped by x -> x^{2^r}.
inline LinPoly conjugate(const LinPoly& f, unsigned r) {
  const auto& F = f.ctx();
  LinPoly::Coeffs b{};
  for (int i = 0; i < LinPoly::kN; ++i) b[static_cast<std::size_t>(i)] = F.automorphism(f.coeff(i), r);
  return LinPoly(F, f.step(), b);
}

/// f_{c,s}(X) = X^{q^s} + X^{q^{3s}} + c X^{q^{5s}}, written with step s.
inline LinPoly trinomial(const FieldCtx& ctx, Felt c, int s) {
  return LinPoly(ctx, s, {kZero, kOne, kZero, kOne, kZero, c});
}

/// X^{q^s} + b X^{q^{3s}} + c X^{q^{5s}}
inline LinPoly trinomial(const FieldCtx& ctx, Felt b, Felt c, int s) {
  return LinPoly(ctx, s, {kZero, kOne, kZero, b, kZero, c});
}

/// The 6x6 sigma-twisted circulant: entries[i][j] = a_{j-i}^{sigma^i}.
struct DicksonMat {
  const FieldCtx* ctx = nullptr;
  int step = 1;
  std::array<std::array<Felt, 6>, 6> entries{};
};

/// Dickson matrix of f, or of m X + f(X) when m is given.
inline DicksonMat dickson_matrix(const LinPoly& f, std::optional<Felt> m = std::nullopt) {
  const auto& F = f.ctx();
  auto a = f.coeffs();
  if (m) a[0] += *m;
  DicksonMat D{&F, f.step(), {}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      D.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          F.frob(a[static_cast<std::size_t>(((j - i) % 6 + 6) % 6)], f.step() * i);
  return D;
}

namespace detail {

/// Rank of a 6x6 matrix over F_{q^6} by division-free elimination (characteristic 2:
/// row_r <- p * row_r + b * row_piv). Columns are scanned in order and the first
/// nonzero entry becomes the pivot. With enough >= 0 it stops as soon as the
/// answer to "rank >= enough" is known and the return value is only guaranteed
/// to be on the correct side of `enough`; otherwise the rank is exact.
inline int rank6(const FieldCtx& F, std::array<std::array<Felt, 6>, 6> M, int enough = -1) {
  int rank = 0;
  int missing = 0;
  for (int col = 0; col < 6 && rank < 6; ++col) {
    int piv = -1;
    for (int r = rank; r < 6; ++r)
      if (!M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) {
      ++missing;
      if (enough >= 0 && 6 - missing < enough) return 6 - missing;
      continue;
    }
    std::swap(M[static_cast<std::size_t>(piv)], M[static_cast<std::size_t>(rank)]);
    const auto& P = M[static_cast<std::size_t>(rank)];
    const Felt p = P[static_cast<std::size_t>(col)];
    for (int r = rank + 1; r < 6; ++r) {
      auto& R = M[static_cast<std::size_t>(r)];
      const Felt b = R[static_cast<std::size_t>(col)];
      if (b.is_zero()) continue;
      R[static_cast<std::size_t>(col)] = kZero;
      for (int c = col + 1; c < 6; ++c)
        R[static_cast<std::size_t>(c)] =
            F.mul(p, R[static_cast<std::size_t>(c)]) + F.mul(b, P[static_cast<std::size_t>(c)]);
    }
    if (++rank == enough) return rank;
  }
  return rank;
}

}  // namespace detail

/// Determinant of a small square matrix over F_{q^6}.
inline Felt determinant(const FieldCtx& F, std::vector<std::vector<Felt>> M) {
  const std::size_t n = M.size();
  Felt det = kOne;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && M[piv][col].is_zero()) ++piv;
    if (piv == n) return kZero;
    std::swap(M[piv], M[col]);  // a row swap does not change the sign in characteristic 2
    const Felt p = M[col][col];
    det = F.mul(det, p);
    const Felt pinv = F.inv(p);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (M[r][col].is_zero()) continue;
      const Felt t = F.mul(M[r][col], pinv);
      for (std::size_t c = col; c < n; ++c) M[r][c] += F.mul(t, M[col][c]);
    }
  }
  return det;
}

inline Felt determinant(const DicksonMat& D) {
  std::vector<std::vector<Felt>> M;
  for (const auto& row : D.entries) M.emplace_back(row.begin(), row.end());
  return determinant(*D.ctx, std::move(M));
}

/// Rank over F_{q^6} by Gaussian elimination.
inline int rank(const DicksonMat& M) { return detail::rank6(*M.ctx, M.entries); }

/// dim_{F_q} ker f = 6 - rank of its Dickson matrix.
inline int kernel_dim(const LinPoly& f) { return 6 - rank(dickson_matrix(f)); }

/// GF(2) matrix of x -> f(x), as the images of the monomial basis X^i.
inline std::vector<gf2::BitVec> gf2_columns(const LinPoly& f) {
  const auto& F = f.ctx();
  std::vector<gf2::BitVec> cols;
  for (unsigned i = 0; i < F.degree(); ++i) {
    gf2::BitVec v(F.degree());
    v.put_bits(0, F.degree(), f(Felt{std::uint64_t{1} << i}).bits);
    cols.push_back(std::move(v));
  }
  return cols;
}

/// GF(2)-basis of F_q inside F_{q^6} (the kernel of x -> x^q - x).
inline std::vector<Felt> subfield_gf2_basis(const FieldCtx& F, int ell = 1) {
  const LinPoly fx(F, 1, [&] {
    LinPoly::Coeffs a{};
    a[0] = kOne;
    a[static_cast<std::size_t>(ell % 6)] += kOne;
    return a;
  }());
  std::vector<Felt> out;
  for (const auto& v : gf2::nullspace_of_columns(gf2_columns(fx))) out.push_back(Felt{v.get_bits(0, F.degree())});
  return out;
}

/// ker f as a GF(2) space: reduced echelon basis, sorted by leading (lowest) bit.
inline std::vector<Felt> kernel_gf2_basis(const LinPoly& f) {
  std::vector<Felt> out;
  for (const auto& v : gf2::nullspace_of_columns(gf2_columns(f)))
    out.push_back(Felt{v.get_bits(0, f.ctx().degree())});
  return out;
}

/// An F_q-basis of ker f, chosen greedily from the canonical GF(2) basis.
inline std::vector<Felt> kernel_basis(const LinPoly& f) {
  const auto& F = f.ctx();
  const auto omegas = subfield_gf2_basis(F);
  std::vector<gf2::BitVec> span;
  std::vector<std::size_t> pivots;
  std::vector<Felt> chosen;
  auto as_vec = [&](Felt x) {
    gf2::BitVec v(F.degree());
    v.put_bits(0, F.degree(), x.bits);
    return v;
  };
  for (Felt v : kernel_gf2_basis(f)) {
    if (gf2::in_span(span, pivots, as_vec(v))) continue;
    chosen.push_back(v);
    for (Felt w : omegas) span.push_back(as_vec(F.mul(w, v)));
    pivots = gf2::reduce(span);
  }
  return chosen;
}

/// Text form `s=<s>;a0=<hex>,...,a5=<hex>`.
inline std::string to_string(const LinPoly& f) {
  std::ostringstream os;
  os << "s=" << f.step() << ";";
  for (int i = 0; i < 6; ++i) os << (i ? "," : "") << "a" << i << "=" << f.ctx().to_hex(f.coeff(i));
  return os.str();
}

inline LinPoly parse_linpoly(const FieldCtx& F, std::string_view text) {
  const auto semi = text.find(';');
  if (semi == std::string_view::npos || !text.starts_with("s="))
    throw ParseError("expected 's=<s>;a0=..,...,a5=..'");
  int s = 0;
  try {
    s = std::stoi(std::string(text.substr(2, semi - 2)));
  } catch (const std::exception&) {
    throw ParseError("bad step in '" + std::string(text) + "'");
  }
  LinPoly::Coeffs a{};
  std::string_view rest = text.substr(semi + 1);
  for (int i = 0; i < 6; ++i) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    const std::string key = "a" + std::to_string(i) + "=";
    if (!item.starts_with(key)) throw ParseError("expected '" + key + "' in '" + std::string(text) + "'");
    a[static_cast<std::size_t>(i)] = F.from_hex(item.substr(key.size()));
    if (i < 5 && comma == std::string_view::npos) throw ParseError("too few coefficients");
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (!rest.empty()) throw ParseError("trailing text after a5");
  return LinPoly(F, s, a);
}

}  // namespace evenscat
