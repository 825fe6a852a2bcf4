#include <gtest/gtest.h>

#include <evenscat/family.hpp>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace evenscat;

namespace {

// c^{q^j} by plain square-and-multiply, no Frobenius tables.
Felt conj_by_pow(const FieldCtx& F, Felt c, int j) {
  std::uint64_t e = 1;
  for (int i = 0; i < j; ++i) e *= F.q();
  return F.pow(c, e);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) {
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

// Integer value of an exponent such as "q^4+2q^3+q^2+q+1".
std::uint64_t exponent_value(const std::string& expr, std::uint64_t q) {
  std::uint64_t total = 0;
  for (const auto& term : split(expr, '+')) {
    const auto qpos = term.find('q');
    if (qpos == std::string::npos) {
      total += std::stoull(term);
      continue;
    }
    const std::uint64_t coef = qpos == 0 ? 1 : std::stoull(term.substr(0, qpos));
    int power = 1;
    if (qpos + 1 < term.size() && term[qpos + 1] == '^') power = std::stoi(term.substr(qpos + 2));
    std::uint64_t qp = 1;
    for (int i = 0; i < power; ++i) qp *= q;
    total += coef * qp;
  }
  return total;
}

// Sum of X^{e} over exponents separated by '|', evaluated by generic exponentiation.
Felt eval_exponents(const FieldCtx& F, const std::string& monomials, Felt c) {
  Felt s = kZero;
  for (const auto& m : split(monomials, '|')) s += F.pow(c, exponent_value(m, F.q()));
  return s;
}

// Polynomial in named conjugates, e.g. "c*cq*cq3^2 + cq3 + 1" or "X0^2*X1 + 1".
Felt eval_product_form(const FieldCtx& F, const std::string& poly, Felt c) {
  Felt s = kZero;
  for (const auto& term : split(poly, '+')) {
    Felt m = kOne;
    if (term == "1") {
      s += m;
      continue;
    }
    for (const auto& factor : split(term, '*')) {
      const auto caret = factor.find('^');
      const std::string name = factor.substr(0, caret);
      const int power = caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
      int j = 0;
      if (name[0] == 'X') j = std::stoi(name.substr(1));
      else if (name == "c") j = 0;
      else if (name == "cq") j = 1;
      else j = std::stoi(name.substr(2));
      m = F.mul(m, F.pow(conj_by_pow(F, c, j), static_cast<std::uint64_t>(power)));
    }
    s += m;
  }
  return s;
}

const char* const kLatexF[] = {
    "q^4+2q^3+q^2+q+1 | q^4+q^3+q^2+1 | q^3+q+1 | 1 | 2q^3+q^2+q | q^3+q^2+q | q^3 | 0",
    "q^3+q^2+2q+2 | q^2+q+2 | q^3+2q^2+2q+1 | 2q^3+2q^2+q+1 | q^2+q+1 | q^3+q+1 | q^3+q^2+1 | 1 | 2q^3+q^2+q | "
    "q^3+q^2+q | q^3 | 0",
    "q^2+q+1 | 0",
    "2q^2+q+4 | 3q^2+2q+3 | q^2+2q+3 | 3q^2+q+3 | q^2+q+3 | 2q^2+3 | q^2+3 | 4q^2+q+2 | q+2 | 3q^2+2 | 2 | "
    "3q^2+2q+1 | q^2+2q+1 | 3q^2+q+1 | q^2+q+1 | 3q^2+1 | 1 | 2q^2+q | 2q^2 | q^2",
    "2q^2+q+2 | q^2+q+2 | 2q^2+2 | 2q^2+q+1 | q^2+q+1 | 0",
};

const char* const kLatexA[] = {
    "q^5+q^4+q^3+q^2+2q+1 | q^5+q^3+q^2+2q+1 | q^2+2q+1 | 2q+1 | q^4+q^3+q^2+q+1 | q^3+q^2+q+1 | "
    "q^5+q^4+q^2+q+1 | q^5+q^2+q+1 | q^4+q^2+1 | 1 | q^2+2q | q^5+q^4+q^3+2q | q^5+q^3+2q | 2q | q^4+q^3+q | "
    "q^3+q | q^5+q^4+q | q^5+q | q^2 | q^4",
    "q^5+q^4+q^3+q^2+q+1 | q+1 | q^4+q^2+1 | q^5+1 | q^2+q | q^5+q^3+q | q^3+q^2 | q^4+q^3 | q^5+q^4 | 0",
    "q^5+q^4+q+1 | q^5+q+1 | q+1 | q^4+1 | q | 0",
    "q^5+q^4+q^3+q^2 | q^4+q^3+q^2 | q^3+q^2 | q^2 | q^5+q^3 | 0",
};

const char* const kMagmaG10 = "c*cq*cq2*cq3^2*cq4 + c*cq*cq3 + c*cq2*cq3*cq4 + c + cq*cq2*cq3^2 + cq*cq2*cq3 + cq3 + 1";
const char* const kMagmaG20 =
    "c^2*cq^2*cq2*cq3 + c^2*cq*cq2 + c*cq^2*cq2^2*cq3 + c*cq*cq2^2*cq3^2 +c*cq*cq2 + c*cq*cq3 + c*cq2*cq3 + c + "
    "cq*cq2*cq3^2 + cq*cq2*cq3 + cq3 +1";
const char* const kPhiF5 = "X0^2*X1*X2^2+X0^2*X1*X2+X0^2*X2^2+X0*X1*X2^2+X0*X1*X2+1";

// Shared enumerations; the scans are the expensive part of this suite.
const std::vector<FrakCRecord>& records_for(unsigned e) {
  static std::map<unsigned, std::vector<FrakCRecord>> cache;
  static std::map<unsigned, FieldCtx> fields;
  if (!cache.count(e)) {
    fields.emplace(e, make_field(e));
    cache[e] = enumerate_frak_C(fields.at(e), {false, 2});
  }
  return cache[e];
}

}  // namespace

TEST(FamilyTables, MatchIndependentExponentTranscription) {
  std::mt19937_64 rng(1);
  for (unsigned e = 1; e <= 3; ++e) {
    const auto F = make_field(e);
    for (int t = 0; t < 100; ++t) {
      const Felt c = F.random(rng);
      for (int i = 1; i <= 5; ++i) EXPECT_EQ(eval_F(F, i, c), eval_exponents(F, kLatexF[i - 1], c)) << "F" << i;
      for (int i = 1; i <= 4; ++i) EXPECT_EQ(eval_A(F, i, c), eval_exponents(F, kLatexA[i - 1], c)) << "A" << i;
    }
  }
}

TEST(FamilyTables, MatchScriptAndMultivariateForms) {
  std::mt19937_64 rng(2);
  for (unsigned e = 1; e <= 3; ++e) {
    const auto F = make_field(e);
    for (int t = 0; t < 100; ++t) {
      const Felt c = F.random(rng);
      EXPECT_EQ(eval_F(F, 1, c), eval_product_form(F, kMagmaG10, c));
      EXPECT_EQ(eval_F(F, 2, c), eval_product_form(F, kMagmaG20, c));
      EXPECT_EQ(eval_F(F, 5, c), eval_product_form(F, kPhiF5, c));
    }
  }
}

TEST(FamilyTables, SmallValues) {
  const auto F = make_field(2);
  EXPECT_EQ(eval_F(F, 3, kOne), kZero);
  EXPECT_EQ(eval_F(F, 3, kZero), kOne);
  EXPECT_THROW(eval_F(F, 6, kOne), ParameterError);
  EXPECT_THROW(eval_A(F, 0, kOne), ParameterError);
}

TEST(FrakC, RecordsAreSortedAndReverified) {
  for (unsigned e : {1u, 2u, 3u}) {
    const auto F = make_field(e);
    const auto& recs = records_for(e);
    EXPECT_TRUE(std::is_sorted(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.c < b.c; }));
    std::size_t members = 0;
    for (const auto& r : recs) {
      EXPECT_TRUE(eval_exponents(F, kLatexF[0], r.c).is_zero());
      EXPECT_TRUE(eval_exponents(F, kLatexF[1], r.c).is_zero());
      const bool expect = !eval_F(F, 3, r.c).is_zero() && !eval_F(F, 4, r.c).is_zero() &&
                          !eval_F(F, 5, r.c).is_zero() && !F.in_subfield(r.c, 2);
      EXPECT_EQ(r.in_frak_c, expect);
      members += r.in_frak_c;
    }
    std::cout << "q=" << F.q() << " |frak C|=" << members << " (q^3=" << F.q() * F.q() * F.q() << ")\n";
  }
}

TEST(FrakC, EnumerationIsCompleteAtSmallQ) {
  // direct scan of all c at q = 2 and q = 4
  for (unsigned e : {1u, 2u}) {
    const auto F = make_field(e);
    std::set<std::uint64_t> expect;
    for (std::uint64_t i = 0; i < F.order(); ++i)
      if (in_frak_c(F, F.element(i))) expect.insert(i);
    std::set<std::uint64_t> got;
    for (Felt c : frak_c_elements(records_for(e))) got.insert(c.bits);
    EXPECT_EQ(got, expect);
  }
}

TEST(FrakC, ThreadCountDoesNotChangeTheResult) {
  const auto F = make_field(2);
  const auto a = enumerate_frak_C(F, {false, 1});
  const auto b = enumerate_frak_C(F, {false, 5});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].c, b[i].c);
}

TEST(FrakC, StableUnderFrobeniusAndAutomorphisms) {
  for (unsigned e : {2u, 3u}) {
    const auto F = make_field(e);
    const auto cs = frak_c_elements(records_for(e));
    const std::set<Felt> set(cs.begin(), cs.end());
    for (Felt c : cs)
      for (unsigned r = 1; r < F.degree(); ++r) EXPECT_TRUE(set.count(F.automorphism(c, r))) << F.to_hex(c);
  }
}

TEST(FrakC, DisjointFromCubicSubfield) {
  for (unsigned e : {1u, 2u, 3u}) {
    const auto F = make_field(e);
    for (const auto& r : records_for(e)) {
      // F_1 = F_2 = 0 and F_3 != 0 already exclude F_{q^3}
      if (!r.f_values[2].is_zero()) {
        EXPECT_FALSE(F.in_subfield(r.c, 3));
      }
    }
  }
}

TEST(FrakC, MainTheoremAtQ4) {
  const auto F = make_field(2);
  const auto cs = frak_c_elements(records_for(2));
  ASSERT_FALSE(cs.empty());
  for (Felt c : cs)
    for (int s : {1, 5}) {
      const auto f = trinomial(F, c, s);
      EXPECT_TRUE(is_scattered_fibers(f, 2)) << F.to_hex(c);
      EXPECT_TRUE(is_scattered_dickson(f, 2)) << F.to_hex(c);
    }
}

TEST(FrakC, ScatterVerdictsCanBeRequested) {
  const auto F = make_field(2);
  const auto recs = enumerate_frak_C(F, {true, 2});
  for (const auto& r : recs) {
    ASSERT_TRUE(r.scattered_s1.has_value());
    if (r.in_frak_c) {
      EXPECT_TRUE(*r.scattered_s1);
    }
  }
}

TEST(PhiIdentities, HoldOnFrakC) {
  for (unsigned e : {2u, 3u}) {
    const auto F = make_field(e);
    for (Felt c : frak_c_elements(records_for(e))) {
      const auto [phi, psi] = phi_identities(F, c);
      EXPECT_EQ(phi, F.frob(c, 4));
      EXPECT_EQ(psi, F.frob(c, 5));
    }
  }
}

TEST(PhiIdentities, HoldWheneverF1VanishesOutsideQuadraticSubfield) {
  const auto F = make_field(2);
  for (const auto& r : records_for(2)) {
    if (F.in_subfield(r.c, 2)) continue;
    EXPECT_EQ(phi_identities(F, r.c).first, F.frob(r.c, 4));
  }
}

TEST(PhiIdentities, DegenerateAndGenericInputs) {
  const auto F = make_field(2);
  EXPECT_THROW(phi_identities(F, kOne), DegenerateInputError);
  EXPECT_THROW(phi_identities(F, kZero), DegenerateInputError);
  for (std::uint64_t i = 0; i < F.order(); ++i)
    if (F.in_subfield(F.element(i), 2)) {
      EXPECT_THROW(phi_identities(F, F.element(i)), DegenerateInputError);
    }
  std::mt19937_64 rng(3);
  int mismatches = 0, tried = 0;
  while (tried < 200) {
    const Felt c = F.random(rng);
    if (F.in_subfield(c, 2) || eval_F(F, 1, c).is_zero()) continue;
    ++tried;
    try {
      mismatches += phi_identities(F, c).first != F.frob(c, 4);
    } catch (const DegenerateInputError&) {
      ++mismatches;
    }
  }
  // F_1(c) != 0 is exactly the failure of the first identity when its denominator is nonzero
  EXPECT_EQ(mismatches, tried);
}

TEST(Factorization, HoldsOnFrakCAtQ4AndQ8) {
  for (unsigned e : {2u, 3u}) {
    const auto F = make_field(e);
    const auto cs = frak_c_elements(records_for(e));
    ASSERT_FALSE(cs.empty());
    for (Felt c : cs) {
      EXPECT_TRUE(verify_factorization(F, c)) << F.to_hex(c);
      const auto d = factor_data(F, c);
      EXPECT_EQ(d.alpha, F.frob(eval_F(F, 3, c), 3));
      const auto prod = factored_product(F, d);
      EXPECT_EQ(prod.at({2, 2, 1}), d.alpha);
      EXPECT_EQ(prod.at({1, 2, 2}), F.frob(d.alpha, 1));
    }
  }
}

TEST(Factorization, ExpansionBookkeeping) {
  const auto F = make_field(2);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    FactorData d{};
    d.alpha = F.random_nonzero(rng);
    d.beta = F.random(rng);
    d.gamma = F.random(rng);
    const auto p = factored_product(F, d);
    // evaluate both sides at a random point
    const Felt x = F.random(rng), y = F.random(rng), z = F.random(rng);
    Felt lhs = kZero;
    for (const auto& [k, v] : p) lhs += F.mul(v, F.mul(F.pow(x, k[0]), F.mul(F.pow(y, k[1]), F.pow(z, k[2]))));
    const Felt rhs = F.mul(F.mul(F.mul(d.alpha, x) + F.mul(F.frob(d.alpha, 1), z), F.mul(x, y) + d.beta),
                           F.mul(y, z) + d.gamma);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Factorization, RejectsHypothesisViolationsAndFailsGenerically) {
  const auto F = make_field(2);
  EXPECT_THROW(verify_factorization(F, kOne), ParameterError);
  std::mt19937_64 rng(5);
  int failures = 0, tried = 0;
  while (tried < 100) {
    const Felt c = F.random(rng);
    if (eval_F(F, 3, c).is_zero() || eval_F(F, 2, c).is_zero()) continue;
    ++tried;
    EXPECT_THROW(verify_factorization(F, c), ParameterError);
    failures += !factorization_holds(F, c);
  }
  EXPECT_GT(failures, 90);
}

TEST(Lemmas, HoldOnFrakC) {
  for (unsigned e : {2u, 3u}) {
    const auto F = make_field(e);
    for (Felt c : frak_c_elements(records_for(e))) EXPECT_TRUE(lemma_checks(F, c).all()) << F.to_hex(c);
  }
}

TEST(Lemmas, SpecialValues) {
  const auto F = make_field(2);
  const auto one = lemma_checks(F, kOne);
  EXPECT_FALSE(one.norm_plus_trace_ne_0);
  EXPECT_FALSE(one.norm_ne_1);
  EXPECT_FALSE(one.not_in_Fq2);
  std::mt19937_64 rng(6);
  for (std::uint64_t i = 2; i < F.order(); ++i) {
    const Felt c = F.element(i);
    if (F.in_subfield(c, 2)) {
      EXPECT_FALSE(lemma_checks(F, c).not_in_Fq2);
    }
  }
}

TEST(Lemmas, TrinomialBijectiveExactlyWhenNormPlusTraceNonzero) {
  for (unsigned e : {1u, 2u}) {
    const auto F = make_field(e);
    for (std::uint64_t i = 0; i < F.order(); ++i) {
      const Felt c = F.element(i);
      EXPECT_EQ(kernel_dim(trinomial(F, c, 1)) == 0, lemma_checks(F, c).norm_plus_trace_ne_0) << F.to_hex(c);
    }
  }
  // image size q^6 on F_{q^6}, by direct evaluation
  const auto F = make_field(2);
  for (Felt c : frak_c_elements(records_for(2))) {
    std::vector<bool> hit(F.order());
    const auto f = trinomial(F, c, 1);
    for (std::uint64_t i = 0; i < F.order(); ++i) hit[f(F.element(i)).bits] = true;
    EXPECT_EQ(std::count(hit.begin(), hit.end(), true), static_cast<long>(F.order()));
  }
}
