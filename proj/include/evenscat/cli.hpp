#pragma once

// Command implementations behind the evenscat executable. Needs the vendored
// CLI11 and nlohmann/json headers on the include path.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "errors.hpp"
#include "family.hpp"
#include "fieldcore.hpp"
#include "linpoly.hpp"
#include "linset.hpp"
#include "mrd.hpp"
#include "parallel.hpp"
#include "scatter.hpp"

namespace evenscat::cli {

using Json = nlohmann::ordered_json;

enum class Check {
  scattered_fiber,
  scattered_dickson,
  factorization,
  phi_identities,
  lemmas,
  mrd,
  idealizers,
  linset,
  equivalence
};

inline constexpr std::array<std::string_view, 9> kCheckNames = {
    "scattered_fiber", "scattered_dickson", "factorization", "phi_identities", "lemmas",
    "mrd",             "idealizers",        "linset",        "equivalence"};

inline std::string_view name_of(Check c) { return kCheckNames[static_cast<std::size_t>(c)]; }

inline std::vector<Check> all_checks() {
  std::vector<Check> out;
  for (std::size_t i = 0; i < kCheckNames.size(); ++i) out.push_back(static_cast<Check>(i));
  return out;
}

/// Comma-separated names; the result is deduplicated and kept in canonical order.
inline std::vector<Check> parse_checks(std::string_view s) {
  if (s == "all") return all_checks();
  if (s.empty()) throw ParseError("empty check list");
  std::set<std::size_t> picked;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view tok = s.substr(0, comma);
    const auto it = std::find(kCheckNames.begin(), kCheckNames.end(), tok);
    if (it == kCheckNames.end()) throw ParseError("unknown check '" + std::string(tok) + "'");
    picked.insert(static_cast<std::size_t>(it - kCheckNames.begin()));
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
  }
  std::vector<Check> out;
  for (auto i : picked) out.push_back(static_cast<Check>(i));
  return out;
}

enum class Format { json, csv };

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2024;

struct CampaignConfig {
  unsigned e = 2;
  int s = 1;
  std::optional<std::uint64_t> modulus_override;
  unsigned threads = default_threads();
  Format output_format = Format::json;
  std::string output_path;  // empty: standard output
  std::vector<Check> checks = all_checks();
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> limit;

  void validate() const {
    if (e == 0) throw ParameterError("e must be at least 1");
    if (s != 1 && s != 5) throw ParameterError("s must be 1 or 5");
    if (threads == 0) throw ParameterError("threads must be at least 1");
    if (checks.empty()) throw ParameterError("at least one check is required");
  }

  FieldCtx field() const {
    validate();
    return make_field(e, modulus_override);
  }
};

/// A command result: the JSON document, its CSV rendering, and the exit status.
struct Report {
  Json json;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int status = 0;
};

namespace detail {

inline std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline Json point(const FieldCtx& F, Felt c, int s) { return Json{{"c", F.to_hex(c)}, {"s", s}}; }

}  // namespace detail

inline std::string render(const Report& r, Format f) {
  if (f == Format::json) return r.json.dump(2) + "\n";
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << detail::csv_escape(xs[i]);
    os << "\n";
  };
  line(r.header);
  for (const auto& row : r.rows) line(row);
  return os.str();
}

/// One check on f_{c,s}. Throws evenscat::Error when the check is undefined at c.
inline bool run_check(const FieldCtx& F, Felt c, int s, Check which, unsigned threads) {
  const LinPoly f = trinomial(F, c, s);
  switch (which) {
    case Check::scattered_fiber:
      return is_scattered_fibers(f, threads);
    case Check::scattered_dickson:
      return is_scattered_dickson(f, threads);
    case Check::factorization:
      return verify_factorization(F, c);
    case Check::phi_identities: {
      const auto [phi, psi] = phi_identities(F, c);
      return phi == F.frob(c, 4) && psi == F.frob(c, 5);
    }
    case Check::lemmas: {
      const auto L = lemma_checks(F, c);
      return L.all() && kernel_dim(f) == 0;
    }
    case Check::mrd: {
      const RMCode C = build_code(F, c, s);
      return dim_q(C) == 12 && min_distance(C, threads) == 5;
    }
    case Check::idealizers: {
      const RMCode C = build_code(F, c, s);
      const Idealizer R = right_idealizer(C);
      if (R.log2_order() != 2 * F.e()) return false;
      for (const auto& phi : R.gf2_basis) {
        const LinPoly p = phi.with_step(1);
        for (int i = 1; i < 6; ++i)
          if (!p.coeff(i).is_zero()) return false;
        if (!F.in_subfield(p.coeff(0), 2)) return false;
      }
      return left_idealizer(C).log2_order() == 6 * F.e();
    }
    case Check::linset:
      return is_maximum_scattered_linset(linear_set(subspace_of(f), threads));
    case Check::equivalence:
      for (unsigned k = 0; k < F.degree(); ++k) {
        const Felt ck = F.automorphism(c, k);
        const auto w = codes_equivalent(F, c, s, ck, s);
        if (!w || !validate(F, c, s, ck, s, *w)) return false;
      }
      return true;
  }
  return false;
}

/// {name: true | false | null}; null marks a check that is undefined at c.
inline Json run_checks(const FieldCtx& F, Felt c, int s, const std::vector<Check>& checks, unsigned threads) {
  Json out = Json::object();
  for (Check k : checks) {
    try {
      out[std::string(name_of(k))] = run_check(F, c, s, k, threads);
    } catch (const Error&) {
      out[std::string(name_of(k))] = nullptr;
    }
  }
  return out;
}

inline bool all_true(const Json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Json& v) { return v.is_boolean() && v.get<bool>(); });
}

inline std::string exclusion_reason(const FrakCRecord& r) {
  if (r.in_frak_c) return "member";
  if (!r.lemmas.not_in_Fq2) return "in_Fq2";
  if (r.f_values[2].is_zero()) return "F3=0";
  return "F4F5=0";
}

inline Report cmd_enumerate(const CampaignConfig& cfg) {
  const FieldCtx F = cfg.field();
  const auto records = enumerate_frak_C(F, {false, cfg.threads});
  const auto members = frak_c_elements(records);

  std::vector<const FrakCRecord*> chosen;
  if (cfg.limit) {
    std::vector<const FrakCRecord*> pool;
    for (const auto& r : records)
      if (r.in_frak_c) pool.push_back(&r);
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(pool.size(), *cfg.limit));
    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->c < b->c; });
    chosen = pool;
  } else {
    for (const auto& r : records) chosen.push_back(&r);
  }

  bool stable = true;
  for (Felt c : members) stable = stable && std::binary_search(members.begin(), members.end(), F.frob(c, 1));

  Report rep;
  rep.header = {"c", "in_frak_c", "reason", "scattered"};
  for (Check k : cfg.checks) rep.header.emplace_back(name_of(k));
  Json recs = Json::array();
  for (const FrakCRecord* r : chosen) {
    Json rec;
    rec["c"] = F.to_hex(r->c);
    rec["in_frak_c"] = r->in_frak_c;
    rec["reason"] = exclusion_reason(*r);
    rec["scattered"] = is_scattered_fibers(trinomial(F, r->c, cfg.s), cfg.threads);
    rec["checks"] = r->in_frak_c ? run_checks(F, r->c, cfg.s, cfg.checks, cfg.threads) : Json::object();
    if (r->in_frak_c && !all_true(rec["checks"])) rep.status = 2;
    std::vector<std::string> row = {rec["c"], r->in_frak_c ? "true" : "false", rec["reason"],
                                     rec["scattered"].get<bool>() ? "true" : "false"};
    for (Check k : cfg.checks) {
      const auto& ch = rec["checks"];
      const auto it = ch.find(std::string(name_of(k)));
      row.push_back(it == ch.end() ? "" : detail::cell(*it));
    }
    rep.rows.push_back(std::move(row));
    recs.push_back(std::move(rec));
  }
  if (!stable) rep.status = 2;

  Json checks = Json::array();
  for (Check k : cfg.checks) checks.push_back(name_of(k));
  rep.json["e"] = F.e();
  rep.json["q"] = F.q();
  rep.json["modulus"] = FieldCtx::hex_of(F.modulus(), (F.degree() + 4) / 4);
  rep.json["s"] = cfg.s;
  rep.json["frak_c_size"] = members.size();
  rep.json["q_cubed"] = F.q() * F.q() * F.q();
  rep.json["frobenius_stable"] = stable;
  rep.json["candidates"] = records.size();
  rep.json["checks"] = checks;
  if (cfg.limit) rep.json["sampled"] = chosen.size();
  rep.json["records"] = std::move(recs);
  return rep;
}

/// Report for one c. Exit 2 only when c is in the set and a check fails.
inline Report cmd_check(const CampaignConfig& cfg, std::string_view c_hex) {
  const FieldCtx F = cfg.field();
  const Felt c = F.from_hex(c_hex);
  const FrakCRecord r = frak_c_record(F, c);
  Report rep;
  rep.json["c"] = F.to_hex(c);
  rep.json["s"] = cfg.s;
  rep.json["in_frak_c"] = r.in_frak_c;
  rep.json["checks"] = run_checks(F, c, cfg.s, cfg.checks, cfg.threads);
  rep.header = {"c", "s", "in_frak_c"};
  rep.rows = {{F.to_hex(c), std::to_string(cfg.s), r.in_frak_c ? "true" : "false"}};
  for (Check k : cfg.checks) {
    rep.header.emplace_back(name_of(k));
    rep.rows[0].push_back(detail::cell(rep.json["checks"][std::string(name_of(k))]));
  }
  if (r.in_frak_c && !all_true(rep.json["checks"])) rep.status = 2;
  return rep;
}

inline Report cmd_code_report(const CampaignConfig& cfg, std::string_view c_hex) {
  const FieldCtx F = cfg.field();
  const Felt c = F.from_hex(c_hex);
  const RMCode C = build_code(F, c, cfg.s);
  const int d = min_distance(C, cfg.threads);
  const std::size_t k = dim_q(C);
  Report rep;
  rep.json["c"] = F.to_hex(c);
  rep.json["s"] = cfg.s;
  rep.json["dim_q"] = k;
  rep.json["min_distance"] = d;
  rep.json["is_mrd"] = k == static_cast<std::size_t>(6 * (6 - d + 1));
  rep.json["right_idealizer_order"] = right_idealizer(C).order();
  rep.json["left_idealizer_order"] = left_idealizer(C).order();
  for (const auto& [key, v] : rep.json.items()) rep.header.push_back(key);
  rep.rows.emplace_back();
  for (const auto& [key, v] : rep.json.items()) rep.rows[0].push_back(detail::cell(v));
  return rep;
}

/// Partition of the codes D_{c,s}, c in the set, into equivalence classes.
inline Report cmd_equiv(const CampaignConfig& cfg, std::optional<int> s) {
  const FieldCtx F = cfg.field();
  if (s && *s != 1 && *s != 5) throw ParameterError("s must be 1 or 5");
  const auto cs = frak_c_elements(enumerate_frak_C(F, {false, cfg.threads}));
  const std::vector<int> steps = s ? std::vector<int>{*s} : std::vector<int>{1, 5};
  const Partition P = partition_codes(F, cs, steps);
  const auto [b6, b12] = class_count_bounds(cs.size(), F.e());
  const auto ratio = [](const Rational& r) {
    return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
  };

  Report rep;
  rep.header = {"class", "c", "s"};
  bool edges_valid = true;
  std::map<std::pair<Felt, int>, std::size_t> class_of;
  Json classes = Json::array();
  for (std::size_t i = 0; i < P.classes.size(); ++i) {
    Json members = Json::array();
    for (const auto& [c, t] : P.classes[i].members) {
      members.push_back(detail::point(F, c, t));
      class_of[{c, t}] = i;
      rep.rows.push_back({std::to_string(i), F.to_hex(c), std::to_string(t)});
    }
    classes.push_back(Json{{"members", std::move(members)}, {"witnesses", Json::array()}});
  }
  for (const auto& e : P.edges) {
    const auto& w = e.witness;
    const bool ok = validate(F, e.from.first, e.from.second, e.to.first, e.to.second, w);
    edges_valid = edges_valid && ok;
    classes[class_of.at(e.from)]["witnesses"].push_back(
        Json{{"from", detail::point(F, e.from.first, e.from.second)},
             {"to", detail::point(F, e.to.first, e.to.second)},
             {"rho", w.rho},
             {"branch", w.branch == EquivBranch::same_s ? "same_s" : "opposite_s"},
             {"A", F.to_hex(w.A)},
             {"B", F.to_hex(w.B)},
             {"C", F.to_hex(w.C)},
             {"D", F.to_hex(w.D)},
             {"closed_form", w.closed_form},
             {"valid", ok}});
  }

  const std::uint64_t n = P.classes.size();
  rep.json["e"] = F.e();
  rep.json["q"] = F.q();
  rep.json["frak_c_size"] = cs.size();
  rep.json["steps"] = steps;
  rep.json["class_count"] = n;
  rep.json["bound_6e"] = ratio(b6);
  rep.json["bound_12e_plus_1"] = ratio(b12);
  rep.json["bound_6e_met"] = b6.at_most(n);
  rep.json["bound_12e_plus_1_met"] = b12.at_most(n);
  rep.json["witnesses_checked"] = P.witnesses_checked;
  rep.json["classes"] = std::move(classes);
  // with a single s the bound counts half the codes
  const Rational need = s ? Rational::make(cs.size(), 12 * F.e()) : b6;
  if (!edges_valid || !need.at_most(n)) rep.status = 2;
  return rep;
}

inline Report cmd_linset(const CampaignConfig& cfg, std::string_view c_hex) {
  const FieldCtx F = cfg.field();
  const Felt c = F.from_hex(c_hex);
  const LinearSet L = linear_set(subspace_of(trinomial(F, c, cfg.s)), cfg.threads);
  Json hist = Json::object();
  std::string hist_cell;
  for (const auto& [w, k] : L.weight_histogram()) {
    hist[std::to_string(w)] = k;
    hist_cell += (hist_cell.empty() ? "" : ";") + std::to_string(w) + ":" + std::to_string(k);
  }
  Report rep;
  rep.json["c"] = F.to_hex(c);
  rep.json["s"] = cfg.s;
  rep.json["size"] = L.size();
  rep.json["weight_histogram"] = hist;
  rep.json["max_scattered"] = is_maximum_scattered_linset(L);
  rep.header = {"c", "s", "size", "weight_histogram", "max_scattered"};
  rep.rows = {{F.to_hex(c), std::to_string(cfg.s), std::to_string(L.size()), hist_cell,
               detail::cell(rep.json["max_scattered"])}};
  return rep;
}

/// Exhaustive GammaL comparisons at q = 2: the swap U_1 ~ U_5 of the pseudoregulus
/// family, then sampled U_{b,c} = U(X^q + b X^{q^3} + c X^{q^5}) against family (a).
inline Report cmd_oracle_q2(const CampaignConfig& cfg) {
  const FieldCtx F = cfg.field();
  if (F.e() != 1) throw FeasibilityError("the GammaL oracle is limited to q = 2 (--e 1)");
  const auto a1 = family_subspace(F, FamilyKind::a, 1), a5 = family_subspace(F, FamilyKind::a, 5);
  const auto witness = [&](const std::optional<GammaLWitness>& w) {
    if (!w) return Json(nullptr);
    return Json{{"A", F.to_hex(w->A)}, {"B", F.to_hex(w->B)}, {"C", F.to_hex(w->C)},
                {"D", F.to_hex(w->D)}, {"r", w->r}};
  };
  const auto swap = gammaL_equivalent_bruteforce(a1, a5);

  // family (b) needs N(delta) outside {0, 1}, impossible when the norm lands in F_2
  std::uint64_t family_b = 0;
  for (std::uint64_t i = 0; i < F.order(); ++i) {
    const Felt n = F.norm(F.element(i), 1);
    family_b += !n.is_zero() && n != kOne;
  }

  Report rep;
  rep.header = {"b", "c", "scattered", "witness_a1", "witness_a5"};
  std::mt19937_64 rng(cfg.seed);
  const std::uint64_t want = cfg.limit.value_or(16);
  std::set<std::pair<Felt, Felt>> seen;
  Json samples = Json::array();
  while (seen.size() < std::min<std::uint64_t>(want, (F.order() - 1) * (F.order() - 3))) {
    const Felt b = F.random_nonzero(rng), c = F.random(rng);
    if (c.is_zero() || c == kOne || c == F.mul(F.frob(b, 2), b)) continue;
    if (!seen.insert({b, c}).second) continue;
    const auto U = subspace_of(trinomial(F, b, c, 1));
    const auto w1 = gammaL_equivalent_bruteforce(U, a1), w5 = gammaL_equivalent_bruteforce(U, a5);
    if (w1 || w5) rep.status = 2;
    const bool sc = is_scattered_fibers(U.f);
    samples.push_back(Json{{"b", F.to_hex(b)}, {"c", F.to_hex(c)}, {"scattered", sc},
                           {"witness_a1", witness(w1)}, {"witness_a5", witness(w5)}});
    rep.rows.push_back({F.to_hex(b), F.to_hex(c), sc ? "true" : "false", w1 ? "found" : "none",
                        w5 ? "found" : "none"});
  }
  std::sort(rep.rows.begin(), rep.rows.end());
  std::sort(samples.begin(), samples.end(), [](const Json& x, const Json& y) {
    return std::pair(x["b"].get<std::string>(), x["c"].get<std::string>()) <
           std::pair(y["b"].get<std::string>(), y["c"].get<std::string>());
  });
  if (!swap || !maps_onto(a1, a5, *swap)) rep.status = 2;

  rep.json["e"] = 1;
  rep.json["q"] = 2;
  rep.json["swap_a1_a5"] = witness(swap);
  rep.json["family_b_size"] = family_b;
  rep.json["samples"] = std::move(samples);
  return rep;
}

/// Writes the report and returns the exit code.
inline int emit(const Report& r, const CampaignConfig& cfg, std::ostream& out) {
  const std::string text = render(r, cfg.output_format);
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw Error("cannot open '" + cfg.output_path + "' for writing");
    f << text;
    if (!f.flush()) throw Error("failed writing '" + cfg.output_path + "'");
  }
  return r.status;
}

/// Entry point shared by the executable and the tests: 0 ok, 1 operational error, 2 check failed.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scattered trinomials over F_{q^6}, q even: enumeration and verification"};
  app.name("evenscat");
  app.require_subcommand(1);
  CampaignConfig cfg;
  std::string modulus, format = "json", checks = "all", c_hex;
  std::optional<int> equiv_s;
  bool have_threads = false;

  const auto common = [&](CLI::App* sub, bool with_s, bool with_checks) {
    sub->add_option("--e", cfg.e, "q = 2^e")->default_val(2);
    if (with_s) sub->add_option("--s", cfg.s, "1 or 5")->default_val(1);
    sub->add_option("--modulus", modulus, "defining polynomial of F_{2^{6e}} as hex");
    sub->add_option_function<unsigned>(
        "--threads", [&](unsigned t) { cfg.threads = t, have_threads = true; }, "worker threads");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.output_path, "output file (default: stdout)");
    sub->add_option("--seed", cfg.seed, "seed for sampling");
    sub->add_option("--limit", cfg.limit, "number of sampled elements");
    if (with_checks) sub->add_option("--checks", checks, "comma-separated checks, or 'all'");
  };
  auto* en = app.add_subcommand("enumerate", "enumerate the coefficient set and run checks on it");
  common(en, true, true);
  auto* ck = app.add_subcommand("check", "run checks on one element");
  common(ck, true, true);
  ck->add_option("--c", c_hex, "element as hex")->required();
  auto* cr = app.add_subcommand("code-report", "rank-metric code parameters for one element");
  common(cr, true, false);
  cr->add_option("--c", c_hex, "element as hex")->required();
  auto* eq = app.add_subcommand("equiv", "equivalence classes of the codes");
  common(eq, false, false);
  eq->add_option("--s", equiv_s, "restrict to one s");
  auto* ls = app.add_subcommand("linset", "linear set of one element");
  common(ls, true, false);
  ls->add_option("--c", c_hex, "element as hex")->required();
  auto* oq = app.add_subcommand("oracle-q2", "exhaustive GammaL comparisons at q = 2");
  common(oq, false, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "evenscat: " << e.what() << "\n";
    return 1;
  }

  try {
    if (!have_threads) cfg.threads = default_threads();
    if (!modulus.empty()) cfg.modulus_override = FieldCtx::parse_hex(modulus);
    cfg.output_format = format == "csv" ? Format::csv : Format::json;
    cfg.checks = parse_checks(checks);
    Report r;
    if (*en) r = cmd_enumerate(cfg);
    else if (*ck) r = cmd_check(cfg, c_hex);
    else if (*cr) r = cmd_code_report(cfg, c_hex);
    else if (*eq) r = cmd_equiv(cfg, equiv_s);
    else if (*ls) r = cmd_linset(cfg, c_hex);
    else r = cmd_oracle_q2(cfg);
    return emit(r, cfg, out);
  } catch (const std::exception& e) {
    err << "evenscat: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace evenscat::cli
