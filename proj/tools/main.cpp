#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tropkm/tropkm.hpp"

namespace {

using Out = nlohmann::ordered_json;

enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kParse = 2,
  kDimension = 3,
  kPrecision = 4,
  kIndexSum = 5,
  kDefect = 6,
};

struct Flags {
  std::string field;
  std::int64_t horizon = tropkm::kDefaultPrecision;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "text";
  int radius = 1;
  int trials = 64;
  bool dual = false;
  bool certificate = false;
  std::string triangulation;
  std::string bases;
  std::string indices;
  std::string params;
};

std::string scalar_text(const Out& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void render_text(const Out& o, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [key, v] : o.items()) {
    if (key == "certificate") {
      // One line, so that `verify` can read text output too.
      os << pad << key << ": " << v.dump() << "\n";
    } else if (v.is_object()) {
      os << pad << key << ":\n";
      render_text(v, os, indent + 2);
    } else if (v.is_array()) {
      bool flat = true;
      for (const auto& x : v) flat = flat && x.is_primitive();
      if (flat) {
        os << pad << key << ": (";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_text(v[i]);
        os << ")\n";
      } else {
        os << pad << key << ": " << v.dump() << "\n";
      }
    } else {
      os << pad << key << ": " << scalar_text(v) << "\n";
    }
  }
}

void emit(const Out& o, const Flags& flags) {
  if (flags.output == "json") {
    std::cout << o.dump(2) << "\n";
  } else {
    render_text(o, std::cout, 0);
  }
}

tropkm::Indices parse_int_list(const std::string& s, const char* what) {
  tropkm::Indices out;
  std::stringstream in(s);
  for (std::string cell; std::getline(in, cell, ',');) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (cell.empty() || used != cell.size()) throw tropkm::ParseError(std::string("bad ") + what + " list \"" + s + "\"", 0, 0);
    out.push_back(v);
  }
  if (out.empty()) throw tropkm::ParseError(std::string("empty ") + what + " list", 0, 0);
  return out;
}

tropkm::FieldConfig choose_field(const Flags& flags, const std::string& text) {
  const auto from_file = tropkm::peek_field(text);
  if (flags.field.empty()) return from_file;
  tropkm::FieldConfig requested;
  try {
    requested = tropkm::FieldConfig::parse(flags.field);
  } catch (const tropkm::DomainError& e) {
    throw tropkm::ParseError(e.what(), 0, 0);
  }
  if (!(requested == from_file)) {
    throw tropkm::ParseError("--field " + requested.name() + " differs from the file field " + from_file.name(), 0, 0);
  }
  return requested;
}

/// Calls fn(ctx) with the context of the chosen field.
template <class Fn>
int with_field(const tropkm::FieldConfig& fc, const Flags& flags, Fn&& fn) {
  if (fc.kind == tropkm::FieldConfig::Kind::kRationals) {
    return fn(tropkm::Context<tropkm::RationalField>{tropkm::RationalField(), flags.horizon});
  }
  return fn(tropkm::Context<tropkm::PrimeField>{tropkm::PrimeField(fc.prime), flags.horizon});
}

// ---- distance

int cmd_distance(const std::string& a, const std::string& b, const Flags& flags) {
  const auto ta = tropkm::read_file(a);
  const auto tb = tropkm::read_file(b);
  const auto fc = choose_field(flags, ta);
  if (!(tropkm::peek_field(tb) == fc)) throw tropkm::ParseError("the two files name different fields", 0, 0);
  return with_field(fc, flags, [&](const auto& ctx) {
    const auto la = tropkm::parse_lattice(ta, ctx);
    const auto lb = tropkm::parse_lattice(tb, ctx);
    tropkm::require_same_dimension(la, lb);
    const auto mu = tropkm::distance(la, lb);
    Out o;
    o["distance"] = mu.entries;
    for (std::size_t i = 1; i < la.n(); ++i) o["d_" + std::to_string(i)] = tropkm::to_string(mu.omega(i));
    emit(o, flags);
    return kOk;
  });
}

// ---- invariant

int cmd_invariant(const std::string& path, const Flags& flags) {
  const auto text = tropkm::read_file(path);
  const auto idx = parse_int_list(flags.indices, "index");
  return with_field(choose_field(flags, text), flags, [&](const auto& ctx) {
    using F = std::decay_t<decltype(ctx.field)>;
    const auto conf = tropkm::parse_configuration(text, ctx);
    const auto inv = flags.dual ? tropkm::dual_f_t(idx, conf, flags.seed) : tropkm::f_t(idx, conf, flags.seed);
    Out o;
    o["indices"] = idx;
    o["dual"] = flags.dual;
    o["value"] = tropkm::to_string(inv.value);
    o["A"] = inv.A;
    if (flags.certificate) {
      // Inputs of the witness: point s repeated i_s times (complements and duals for --dual).
      std::vector<tropkm::Lattice<F>> inputs;
      const auto n = static_cast<std::int64_t>(conf.n());
      for (std::size_t s = 0; s < idx.size(); ++s) {
        const auto reps = flags.dual ? n - idx[s] : idx[s];
        for (std::int64_t r = 0; r < reps; ++r) inputs.push_back(flags.dual ? tropkm::dual(conf.points[s]) : conf.points[s]);
      }
      o["certificate"] = Out::parse(tropkm::certificate_json(inv.certificate, inputs).dump());
    }
    emit(o, flags);
    return kOk;
  });
}

// ---- witness on n lattices

int cmd_witness(const std::string& path, const Flags& flags) {
  const auto text = tropkm::read_file(path);
  return with_field(choose_field(flags, text), flags, [&](const auto& ctx) {
    const auto conf = tropkm::parse_configuration(text, ctx);
    const auto cert = tropkm::witness(conf.points, std::nullopt, flags.seed);
    Out o;
    o["A"] = cert.A;
    o["iterations"] = cert.trace.size();
    o["certificate"] = Out::parse(tropkm::certificate_json(cert, conf.points).dump());
    emit(o, flags);
    return kOk;
  });
}

// ---- verify

int cmd_verify(const std::string& path, const Flags& flags) {
  const auto text = tropkm::read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    // Text output: the certificate sits on a line of its own.
    const auto at = text.find("certificate: ");
    if (at == std::string::npos) throw tropkm::ParseError("no certificate found in " + path, 0, 0);
    const auto end = text.find('\n', at);
    try {
      doc = nlohmann::json::parse(text.substr(at + 13, end == std::string::npos ? std::string::npos : end - at - 13));
    } catch (const nlohmann::json::exception& e) {
      throw tropkm::ParseError(std::string("malformed certificate: ") + e.what(), 0, 0);
    }
  }
  if (doc.contains("certificate")) doc = doc["certificate"];
  tropkm::FieldConfig fc;
  try {
    fc = tropkm::certificate_field(doc);
  } catch (const tropkm::DomainError& e) {
    throw tropkm::ParseError(e.what(), 0, 0);
  }
  return with_field(fc, flags, [&](const auto& ctx) {
    const auto parsed = tropkm::certificate_from_json(doc, ctx);
    tropkm::verify_certificate(parsed.certificate, parsed.inputs);
    Out o;
    o["verified"] = true;
    o["A"] = parsed.certificate.A;
    emit(o, flags);
    return kOk;
  });
}

// ---- assignment

int cmd_assignment(const std::string& path, const Flags& flags) {
  const auto cost = tropkm::parse_cost_csv(tropkm::read_file(path));
  tropkm::FieldConfig fc;
  if (!flags.field.empty()) {
    try {
      fc = tropkm::FieldConfig::parse(flags.field);
    } catch (const tropkm::DomainError& e) {
      throw tropkm::ParseError(e.what(), 0, 0);
    }
  }
  return with_field(fc, flags, [&](const auto& ctx) {
    const auto r = tropkm::assignment_solve(cost, ctx, flags.seed);
    const std::size_t n = cost.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (r.a[i] + r.b[j] > cost[i][j]) throw tropkm::VerificationFailed("potentials exceed a cost entry");
      }
    }
    std::vector<std::size_t> perm;
    for (auto p : r.permutation) perm.push_back(p + 1);
    Out o;
    o["value"] = r.min_transversal;
    o["permutation"] = perm;
    o["a"] = r.a;
    o["b"] = r.b;
    emit(o, flags);
    return kOk;
  });
}

// ---- checks

template <class F>
int check_identity(const tropkm::Configuration<F>& conf, const Flags& flags) {
  const auto idx = parse_int_list(flags.indices, "index");
  if (idx.size() != 4) throw tropkm::ParseError("the exchange relation takes four indices", 0, 0);
  const auto r = tropkm::exchange_identity_check(idx[0], idx[1], idx[2], idx[3], conf, flags.seed);
  Out o;
  o["check"] = "identity";
  o["indices"] = idx;
  std::vector<std::string> sums;
  for (const auto& s : r.sums) sums.push_back(tropkm::to_string(s));
  o["sums"] = sums;
  o["holds"] = r.holds;
  emit(o, flags);
  return r.holds ? kOk : kCheckFailed;
}

int check_positivity(const tropkm::Configuration<tropkm::RationalField>& conf, const tropkm::Context<tropkm::RationalField>& ctx,
                     const Flags& flags) {
  if (flags.bases.empty()) throw tropkm::ParseError("positivity needs --bases", 0, 0);
  const auto bases = tropkm::parse_bases(tropkm::read_file(flags.bases), ctx);
  std::optional<std::vector<std::array<std::size_t, 3>>> tri;
  if (!flags.triangulation.empty()) tri = tropkm::parse_triangulation(tropkm::read_file(flags.triangulation));
  const auto r = tropkm::positivity_check(conf, bases, tri, flags.seed);
  Out o;
  o["check"] = "positivity";
  o["positive"] = r.positive;
  if (!r.positive) o["first_violation"] = r.first_violation;
  emit(o, flags);
  return r.positive ? kOk : kCheckFailed;
}

int check_conjecture(const tropkm::Configuration<tropkm::PrimeField>& conf, const Flags& flags) {
  const auto p = parse_int_list(flags.params, "parameter");
  if (p.size() != 4) throw tropkm::ParseError("--params takes a,b,c,d", 0, 0);
  const tropkm::WebParams w{p[0], p[1], p[2], p[3]};
  const auto r = tropkm::conjecture_check(w, conf, flags.radius, flags.trials, flags.seed);
  Out o;
  o["check"] = "conjecture";
  o["status"] = r.label;
  o["params"] = p;
  o["radius"] = r.radius;
  o["trials"] = r.trials;
  o["lhs_estimate"] = r.lhs.value ? tropkm::to_string(*r.lhs.value) : "none";
  o["nonzero_samples"] = r.lhs.nonzero_samples;
  o["rhs"] = tropkm::to_string(r.rhs);
  o["ball_size"] = r.ball_size;
  o["inner_evaluations"] = r.inner_evaluations;
  o["lhs_le_rhs"] = r.lhs_le_rhs;
  o["agree"] = r.agree;
  emit(o, flags);
  return kOk;
}

template <class F>
int check_oracle_a(const tropkm::Configuration<F>& conf, const Flags& flags) {
  const auto cert = tropkm::witness(conf.points, std::nullopt, flags.seed);
  const auto sampled = tropkm::sample_A(conf.points, flags.trials, flags.seed);
  Out o;
  o["check"] = "oracle-A";
  o["witness_A"] = cert.A;
  o["sampled_A"] = sampled == tropkm::kInfinity ? std::string("infinity") : std::to_string(sampled);
  o["trials"] = flags.trials;
  const bool ok = sampled == cert.A;
  o["agree"] = ok;
  emit(o, flags);
  return ok ? kOk : kCheckFailed;
}

int check_oracle_ball(const tropkm::Configuration<tropkm::PrimeField>& conf, const Flags& flags) {
  const auto idx = parse_int_list(flags.indices, "index");
  const auto brute = tropkm::metric_min_brute(idx, conf, flags.radius);
  const auto inv = tropkm::f_t(idx, conf, flags.seed);
  tropkm::BallEnumerator en(tropkm::lattice_sum(conf.points), flags.radius);
  const bool inside = en.contains_class(inv.certificate.L);
  const bool ok = brute.value >= inv.value && (!inside || brute.value == inv.value);
  Out o;
  o["check"] = "oracle-ball";
  o["indices"] = idx;
  o["invariant"] = tropkm::to_string(inv.value);
  o["ball_minimum"] = tropkm::to_string(brute.value);
  o["ball_size"] = brute.count;
  o["witness_in_ball"] = inside;
  o["consistent"] = ok;
  emit(o, flags);
  return ok ? kOk : kCheckFailed;
}

int check_oracle_transversal(const std::string& path, const Flags& flags) {
  const auto cost = tropkm::parse_cost_csv(tropkm::read_file(path));
  const tropkm::Context<tropkm::PrimeField> ctx{tropkm::PrimeField(), flags.horizon};
  const auto r = tropkm::assignment_solve(cost, ctx, flags.seed);
  const auto brute = tropkm::brute_transversal(cost);
  Out o;
  o["check"] = "oracle-transversal";
  o["assignment"] = r.min_transversal;
  o["brute_force"] = brute;
  o["agree"] = brute == r.min_transversal;
  emit(o, flags);
  return brute == r.min_transversal ? kOk : kCheckFailed;
}

int cmd_check(const std::string& kind, const std::string& path, const Flags& flags) {
  if (kind == "oracle-transversal") return check_oracle_transversal(path, flags);
  const auto text = tropkm::read_file(path);
  const auto fc = choose_field(flags, text);
  return with_field(fc, flags, [&](const auto& ctx) -> int {
    using F = std::decay_t<decltype(ctx.field)>;
    const auto conf = tropkm::parse_configuration(text, ctx);
    if (kind == "identity") return check_identity(conf, flags);
    if (kind == "oracle-A") return check_oracle_a(conf, flags);
    if constexpr (std::is_same_v<F, tropkm::RationalField>) {
      if (kind == "positivity") return check_positivity(conf, ctx, flags);
      if (kind == "conjecture" || kind == "oracle-ball") throw tropkm::SizeLimit(kind + " needs a prime field of size at most 7");
    } else {
      if (kind == "positivity") throw tropkm::DomainError("positivity needs the ordered field Q");
      if (kind == "conjecture") return check_conjecture(conf, flags);
      if (kind == "oracle-ball") return check_oracle_ball(conf, flags);
    }
    throw tropkm::ParseError("unknown check \"" + kind + "\"", 0, 0);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact lattice assignment, witnesses and tropical invariants over Laurent series"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--field", flags.field, "Coefficient field: fp:<prime> or q (default: from the input file)");
  app.add_option("--horizon", flags.horizon, "Working precision for truncated series")->check(CLI::Range(8, 1 << 20));
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--threads", flags.threads, "Worker threads (computation is sequential)")->check(CLI::PositiveNumber);
  app.add_option("--output", flags.output, "text or json")->check(CLI::IsMember({"text", "json"}));

  std::string file_a, file_b, kind;
  auto* distance = app.add_subcommand("distance", "Distance coweight from the first lattice to the second");
  distance->add_option("a", file_a)->required();
  distance->add_option("b", file_b)->required();

  auto* invariant = app.add_subcommand("invariant", "Tropical invariant f^t of a configuration");
  invariant->add_option("configuration", file_a)->required();
  invariant->add_option("--indices", flags.indices, "Comma-separated indices, one per point")->required();
  invariant->add_flag("--dual", flags.dual, "Indices sum to (k-1)n");
  invariant->add_flag("--certificate", flags.certificate, "Print the witness certificate");

  auto* witness = app.add_subcommand("witness", "Witness lattice for n input lattices");
  witness->add_option("configuration", file_a)->required();

  auto* verify = app.add_subcommand("verify", "Re-check a printed certificate");
  verify->add_option("certificate", file_a)->required();

  auto* assignment = app.add_subcommand("assignment", "Minimum-cost transversal of an integer CSV matrix");
  assignment->add_option("costs", file_a)->required();

  auto* check = app.add_subcommand("check", "identity | positivity | conjecture | oracle-A | oracle-ball | oracle-transversal");
  check->add_option("kind", kind)->required()->check(
      CLI::IsMember({"identity", "positivity", "conjecture", "oracle-A", "oracle-ball", "oracle-transversal"}));
  check->add_option("input", file_a)->required();
  check->add_option("--indices", flags.indices, "Comma-separated indices");
  check->add_option("--bases", flags.bases, "Ordered bases file (positivity)");
  check->add_option("--triangulation", flags.triangulation, "Triangles as 0-based index triples (positivity)");
  check->add_option("--params", flags.params, "Web degrees a,b,c,d (conjecture)");
  check->add_option("--radius", flags.radius, "Ball radius")->check(CLI::Range(0, tropkm::kBallMaxRadius));
  check->add_option("--trials", flags.trials, "Sampling trials")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*distance) return cmd_distance(file_a, file_b, flags);
    if (*invariant) return cmd_invariant(file_a, flags);
    if (*witness) return cmd_witness(file_a, flags);
    if (*verify) return cmd_verify(file_a, flags);
    if (*assignment) return cmd_assignment(file_a, flags);
    if (*check) return cmd_check(kind, file_a, flags);
  } catch (const tropkm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const tropkm::DimensionMismatch& e) {
    std::cerr << "dimension mismatch: " << e.what() << "\n";
    return kDimension;
  } catch (const tropkm::PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return kPrecision;
  } catch (const tropkm::IndeterminateValuation& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return kPrecision;
  } catch (const tropkm::IndexSumMismatch& e) {
    std::cerr << "index sum mismatch: " << e.what() << "\n";
    return kIndexSum;
  } catch (const tropkm::VerificationFailed& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kDefect;
  } catch (const tropkm::IterationBudgetExceeded& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kDefect;
  } catch (const tropkm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kDefect;
}
