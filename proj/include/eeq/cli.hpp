#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eeq/laws.hpp"
#include "eeq/specfile.hpp"

namespace eeq {

// Exit codes: 0 ok at scope, 1 counterexample or failed diagnostics,
// 2 unknown-at-scope, 64 usage or input errors, 65 surrogate violations,
// 70 internal faults.
namespace exit_code {
constexpr int ok = 0;
constexpr int counterexample = 1;
constexpr int unknown = 2;
constexpr int usage = 64;
constexpr int surrogate = 65;
constexpr int internal = 70;
}  // namespace exit_code

struct RunConfig {
  Nat s = 32;
  Nat n = 64;
  bool scope_explicit = false;
  std::uint64_t seed = 0;
  Nat cap = 7;
  std::size_t instances = 20;
  std::string format = "human";  // human | structured
  std::filesystem::path out_dir = ".";
};

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

namespace cli_detail {

struct UsageFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void parse_scope(const std::string& text, RunConfig& cfg) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw UsageFault("--scope wants s,n (got '" + text + "')");
  try {
    cfg.s = std::stoull(text.substr(0, comma));
    cfg.n = std::stoull(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageFault("--scope wants two numbers (got '" + text + "')");
  }
  if (cfg.n < 1) throw UsageFault("--scope needs n >= 1");
  cfg.scope_explicit = true;
}

/// Inline relation shorthand: "id", "idnK", or a name from the loaded file.
inline RelPtr resolve_relation(const std::string& value, const RelFile* file) {
  if (value == "id") return rel::id_all();
  if (value.rfind("idn", 0) == 0 && value.size() > 3) {
    bool digits = true;
    for (std::size_t i = 3; i < value.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(value[i]))) digits = false;
    if (digits) return rel::id_n(std::stoull(value.substr(3)));
  }
  if (file) {
    if (RelPtr found = file->find(value)) return found;
  }
  throw UsageFault("unknown relation '" + value + "'");
}

struct KeyValues {
  std::vector<std::pair<std::string, std::string>> items;

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : items)
      if (k == key) return v;
    return std::nullopt;
  }

  std::string require(const std::string& key) const {
    if (auto v = get(key)) return *v;
    throw UsageFault("missing argument '" + key + "=...'");
  }
};

inline KeyValues parse_key_values(const std::vector<std::string>& args) {
  KeyValues kv;
  for (const std::string& a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageFault("expected key=value argument, got '" + a + "'");
    kv.items.emplace_back(a.substr(0, eq), a.substr(eq + 1));
  }
  return kv;
}

inline std::string classes_line(const Approximant& approx) {
  std::ostringstream os;
  const auto& classes = approx.classes();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i) os << " ";
    os << "[" << classes[i][0] << "]={";
    for (std::size_t j = 0; j < classes[i].size(); ++j)
      os << (j ? "," : "") << classes[i][j];
    os << "}";
  }
  return os.str();
}

inline std::vector<std::string> approx_structured(const Approximant& approx) {
  std::vector<std::string> lines;
  lines.push_back("scope.s=" + std::to_string(approx.stage()));
  lines.push_back("scope.n=" + std::to_string(approx.bound()));
  lines.push_back("classes=" + std::to_string(approx.classes_count()));
  for (const auto& cls : approx.classes()) {
    std::ostringstream os;
    os << "class." << cls[0] << "=";
    for (std::size_t j = 0; j < cls.size(); ++j) os << (j ? "," : "") << cls[j];
    lines.push_back(os.str());
  }
  lines.push_back("deferred=" + std::to_string(approx.deferred_pairs()));
  return lines;
}

inline int verdict_exit(const Verdict& v) {
  switch (v.status) {
    case Verdict::Status::Ok: return exit_code::ok;
    case Verdict::Status::Counterexample: return exit_code::counterexample;
    default: return exit_code::unknown;
  }
}

inline void emit(std::ostream& os, const RunConfig& cfg,
                 const std::vector<std::string>& structured,
                 const std::string& human) {
  if (cfg.format == "structured") {
    for (const auto& line : structured) os << line << "\n";
  } else {
    os << human << "\n";
  }
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline int cmd_show(const RunConfig& cfg, const std::optional<std::string>& rel_path,
                    const std::vector<std::string>& name_parts,
                    std::ostream& out) {
  std::optional<RelFile> file;
  if (rel_path) file = load_rel_file(*rel_path);
  std::string name;
  for (const auto& part : name_parts) {
    if (!name.empty()) name += " ";
    name += part;
  }
  RelPtr spec;
  if (name.rfind("idn ", 0) == 0) {
    spec = resolve_relation("idn" + name.substr(4), file ? &*file : nullptr);
  } else {
    spec = resolve_relation(name, file ? &*file : nullptr);
  }
  Approximant approx = approximant(spec, cfg.s, cfg.n);
  emit(out, cfg, approx_structured(approx), classes_line(approx));
  return exit_code::ok;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& kind,
                      const std::optional<std::string>& rel_path,
                      const std::vector<std::string>& raw_args,
                      std::ostream& out) {
  std::optional<RelFile> file;
  if (rel_path) file = load_rel_file(*rel_path);
  const RelFile* fp = file ? &*file : nullptr;
  KeyValues kv = parse_key_values(raw_args);
  EvalContext ctx;

  auto report_verdict = [&](const Verdict& v) {
    std::vector<std::string> structured{"command=verify", "kind=" + kind,
                                        "scope.s=" + std::to_string(cfg.s),
                                        "scope.n=" + std::to_string(cfg.n),
                                        "verdict=" + v.to_text()};
    emit(out, cfg, structured, v.to_text());
    return verdict_exit(v);
  };

  auto report_suite = [&](const LawReport& rep) {
    std::vector<std::string> structured{"command=verify", "kind=" + kind,
                                        "scope.s=" + std::to_string(cfg.s),
                                        "scope.n=" + std::to_string(cfg.n),
                                        "seed=" + std::to_string(cfg.seed)};
    auto lines = rep.lines("suite");
    structured.insert(structured.end(), lines.begin(), lines.end());
    structured.push_back(std::string("pass=") + (rep.ok() ? "true" : "false"));
    std::ostringstream human;
    human << (rep.ok() ? "ok" : "FAILED") << " instances=" << rep.instances
          << " checks=" << rep.law_checks
          << " uniqueness_nonvacuous=" << rep.uniqueness_nonvacuous;
    for (const auto& note : rep.failure_notes) human << "\n  " << note;
    emit(out, cfg, structured, human.str());
    return rep.ok() ? exit_code::ok : exit_code::counterexample;
  };

  LawConfig law{cfg.s, cfg.n, cfg.seed, cfg.instances, 50, cfg.cap};

  if (kind == "preserving" || kind == "reduction" || kind == "injective" ||
      kind == "surjective") {
    FunPtr f = parse_fun(kv.require("f"));
    RelPtr r = resolve_relation(kv.require("R"), fp);
    RelPtr s_rel = resolve_relation(kv.require("S"), fp);
    if (kind == "preserving")
      return report_verdict(check_preserving(f, r, s_rel, cfg.s, cfg.n, ctx));
    if (kind == "reduction")
      return report_verdict(reduction_check(f, r, s_rel, cfg.s, cfg.n, ctx));
    Verdict pres = check_preserving(f, r, s_rel, cfg.s, cfg.n, ctx);
    if (!pres.ok()) return report_verdict(pres);
    Morphism m{r, s_rel, f, Scope{cfg.s, cfg.n}};
    if (kind == "injective")
      return report_verdict(injective_at(m, cfg.s, cfg.n, ctx));
    return report_verdict(surjective_at(m, cfg.s, cfg.n, ctx));
  }
  if (kind == "product-laws") return report_suite(product_laws(law));
  if (kind == "coproduct-laws") return report_suite(coproduct_laws(law));
  if (kind == "coeq-laws") return report_suite(coequalizer_laws(law));
  if (kind == "terminal") {
    RelPtr r = resolve_relation(kv.require("R"), fp);
    return report_suite(terminal_uniqueness(r, law));
  }
  if (kind == "initial") {
    RelPtr x = resolve_relation(kv.require("X"), fp);
    bool distinct = initial_refutation_distinct(x, law);
    std::vector<std::string> structured{
        "command=verify", "kind=initial", "scope.s=" + std::to_string(cfg.s),
        "scope.n=" + std::to_string(cfg.n),
        std::string("distinct=") + (distinct ? "true" : "false")};
    emit(out, cfg, structured,
         distinct ? "ok distinct pair into the two-class relation"
                  : "FAILED refutation pair collapsed");
    return distinct ? exit_code::ok : exit_code::counterexample;
  }
  throw UsageFault("unknown verify kind '" + kind + "'");
}

inline int cmd_construct(const RunConfig& cfg, const std::string& which,
                         const std::optional<std::string>& family_path,
                         const std::optional<std::string>& kbar_path,
                         const std::optional<std::string>& rel_path,
                         const std::vector<std::string>& raw_args,
                         std::ostream& out) {
  std::optional<RelFile> file;
  if (rel_path) file = load_rel_file(*rel_path);
  const RelFile* fp = file ? &*file : nullptr;
  KeyValues kv = parse_key_values(raw_args);
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<std::string> diag{"construct=" + which};
  std::string trace_text;
  bool pass = false;

  if (which == "counter-pi1") {
    CoCeFamily fam = family_path ? parse_family_text(read_file(*family_path))
                                 : CoCeFamily::bundled();
    Nat stages = cfg.scope_explicit ? cfg.s : fam.horizon();
    Nat bound = cfg.scope_explicit
                    ? cfg.n
                    : std::max<Nat>(64, fam.index_count() + 2);
    auto result = counter_pi1_machine(fam, stages, bound);
    trace_text = trace_to_text(result.trace);
    diag.push_back("stages=" + std::to_string(result.stages));
    diag.push_back("bound=" + std::to_string(result.bound));
    diag.push_back("family.E=" + std::to_string(fam.index_count()));
    diag.push_back("family.horizon=" + std::to_string(fam.horizon()));
    diag.push_back("enumerated=" + std::to_string(result.u.size()));
    diag.push_back("classes=" + std::to_string(result.z_classes));
    diag.push_back("diagonal_ok=" + std::to_string(result.diagonal_ok_count()) +
                   "/" + std::to_string(fam.index_count()));
    pass = result.pass;
  } else if (which == "epi-not-onto") {
    KbarSurrogate k = kbar_path ? parse_kbar_text(read_file(*kbar_path))
                                : KbarSurrogate::bundled();
    Nat s = cfg.scope_explicit ? cfg.s : k.horizon();
    Nat n = cfg.scope_explicit ? cfg.n : 64;
    auto result = epi_not_onto_example(k, s, n);
    const auto& coceer_node = std::get<RelationSpec::Coceer>(result.r->node);
    trace_text = trace_to_text(coceer_node.trace);
    diag.push_back("scope.s=" + std::to_string(result.scope_s));
    diag.push_back("scope.n=" + std::to_string(result.scope_n));
    diag.push_back("singleton_region=" + std::to_string(result.c_members.size()));
    diag.push_back("src_bound=" + std::to_string(result.src_bound));
    diag.push_back("reduction=" + result.reduction.to_text());
    diag.push_back("surjective=" + result.surjectivity.to_text());
    {
      std::ostringstream os;
      os << "omitted=";
      for (std::size_t i = 0; i < result.omitted_reps.size(); ++i)
        os << (i ? "," : "") << result.omitted_reps[i];
      diag.push_back(os.str());
    }
    diag.push_back("omitted_count=" + std::to_string(result.omitted_reps.size()));
    diag.push_back(std::string("omitted_nonsingleton=") +
                   (result.class_a_size >= 2 && result.class_b_size >= 2
                        ? "true"
                        : "false"));
    pass = result.pass;
  } else if (which == "ceer-coeq") {
    FunPtr h = kv.get("h") ? parse_fun(*kv.get("h"))
                           : fn::pair(fn::id(), fn::compose(fn::succ(), fn::succ()));
    Nat s = cfg.scope_explicit ? cfg.s : 64;
    Nat n = cfg.scope_explicit ? cfg.n : 32;
    EvalContext ctx;
    auto result = ceer_as_coequalizer(h, s, n, ctx);
    diag.push_back("h=" + print(h));
    diag.push_back("scope.s=" + std::to_string(s));
    diag.push_back("scope.n=" + std::to_string(n));
    diag.push_back(std::string("roundtrip=") +
                   (result.roundtrip ? "true" : "false"));
    diag.push_back("classes=" +
                   std::to_string(ctx.cache.get(result.z, s, n).classes_count()));
    pass = result.roundtrip;
  } else if (which == "remark") {
    RelPtr x = kv.get("X") ? resolve_relation(*kv.get("X"), fp) : rel::id_n(3);
    Nat s = cfg.scope_explicit ? cfg.s : 64;
    Nat n = cfg.scope_explicit ? cfg.n : 64;
    EvalContext ctx;
    auto result = remark_demo(x, s, n, ctx);
    diag.push_back("scope.s=" + std::to_string(s));
    diag.push_back("scope.n=" + std::to_string(n));
    diag.push_back("classes=" + std::to_string(result.classes));
    diag.push_back("even_map=" + result.even_map_preserving.to_text());
    pass = result.pass;
  } else if (which == "darkstar") {
    RelPtr x = kv.get("X") ? resolve_relation(*kv.get("X"), fp) : rel::id_all();
    RelPtr y = kv.get("Y") ? resolve_relation(*kv.get("Y"), fp) : rel::id_all();
    std::optional<FunPtr> witness;
    if (kv.get("witness")) witness = parse_fun(*kv.get("witness"));
    EvalContext ctx;
    auto result = darkstar_closure_demo(x, y, witness, cfg.s, cfg.n, ctx,
                                        cfg.seed, cfg.instances);
    diag.push_back("scope.s=" + std::to_string(cfg.s));
    diag.push_back("scope.n=" + std::to_string(cfg.n));
    if (result.witness_supplied) {
      diag.push_back("witness_on_y=" + result.witness_on_y.to_text());
      diag.push_back("witness_on_coproduct=" +
                     result.witness_on_coproduct.to_text());
    } else {
      diag.push_back("witness=not-applicable");
    }
    diag.push_back("containment=" + std::to_string(result.containment_ok) + "/" +
                   std::to_string(result.coequalizers_tested));
    diag.push_back("note=" + result.note);
    pass = result.pass;
  } else {
    throw UsageFault("unknown construction '" + which + "'");
  }

  diag.push_back(std::string("pass=") + (pass ? "true" : "false"));
  std::string diag_text;
  for (const auto& line : diag) diag_text += line + "\n";
  write_text_file(cfg.out_dir / (which + ".diag"), diag_text);
  if (!trace_text.empty())
    write_text_file(cfg.out_dir / (which + ".trace"), trace_text);

  std::ostringstream human;
  for (std::size_t i = 1; i < diag.size(); ++i)
    human << (i > 1 ? " " : "") << diag[i];
  emit(out, cfg, diag, human.str());
  return pass ? exit_code::ok : exit_code::counterexample;
}

inline int cmd_trace_replay(const RunConfig& cfg, const std::string& trace_path,
                            const std::optional<std::string>& seed_classes,
                            std::ostream& out) {
  StageTrace trace = load_trace(trace_path);
  bool has_isolate = false;
  for (const auto& ev : trace.events)
    if (ev.kind == StageEvent::Kind::Isolate) has_isolate = true;
  RelPtr spec;
  if (has_isolate) {
    std::vector<std::vector<Nat>> seeds{{0}};
    if (seed_classes) {
      detail::LineCursor cur(*seed_classes, 1);
      seeds = detail::parse_seed_classes(cur);
    }
    spec = rel::coceer(std::move(seeds), trace);
  } else {
    spec = rel::from_pairs(PairSource{PairSource::TraceBacked{trace}});
  }
  Approximant approx = approximant(spec, cfg.s, cfg.n);
  std::vector<std::string> structured{"command=trace-replay",
                                      "events=" + std::to_string(trace.events.size()),
                                      std::string("kind=") +
                                          (has_isolate ? "coceer" : "ceer")};
  auto lines = approx_structured(approx);
  structured.insert(structured.end(), lines.begin(), lines.end());
  emit(out, cfg, structured, classes_line(approx));
  return exit_code::ok;
}

}  // namespace cli_detail

/// Run the command line against captured output streams. Identical
/// configuration and inputs produce byte-identical output.
inline CliResult run_cli(const std::vector<std::string>& args) {
  CliResult result;
  std::ostringstream out, err;
  RunConfig cfg;

  CLI::App app{"stage-approximated equivalence relations toolkit", "eeq"};
  app.require_subcommand(1);
  std::string scope_text;
  app.add_option("--scope", scope_text, "scope as s,n (stage, bound)");
  app.add_option("--seed", cfg.seed, "seed for generated families");
  app.add_option("--cap", cfg.cap, "size cap for candidate terms");
  app.add_option("--instances", cfg.instances, "instances for law suites");
  app.add_option("--format", cfg.format, "human | structured")
      ->check(CLI::IsMember({"human", "structured"}));
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory for construct");

  auto* show = app.add_subcommand("show", "print the classes of a relation");
  show->fallthrough();
  std::optional<std::string> show_rel;
  std::vector<std::string> show_name;
  show->add_option("--rel", show_rel, "relation spec file");
  show->add_option("name", show_name, "relation name")->required();

  auto* verify = app.add_subcommand("verify", "run a checker or law suite");
  verify->fallthrough();
  std::string verify_kind;
  std::optional<std::string> verify_rel;
  std::vector<std::string> verify_args;
  verify->add_option("kind", verify_kind,
                     "preserving|injective|surjective|reduction|product-laws|"
                     "coproduct-laws|coeq-laws|terminal|initial")
      ->required();
  verify->add_option("--rel", verify_rel, "relation spec file");
  verify->add_option("args", verify_args, "key=value arguments");

  auto* construct =
      app.add_subcommand("construct", "replay a stage construction");
  construct->fallthrough();
  std::string construct_which;
  std::optional<std::string> construct_family, construct_kbar, construct_rel;
  std::vector<std::string> construct_args;
  construct
      ->add_option("which", construct_which,
                   "counter-pi1|epi-not-onto|ceer-coeq|remark|darkstar")
      ->required();
  construct->add_option("--family", construct_family, "family schedule file");
  construct->add_option("--kbar", construct_kbar, "enumeration file");
  construct->add_option("--rel", construct_rel, "relation spec file");
  construct->add_option("args", construct_args, "key=value arguments");

  auto* replay = app.add_subcommand("trace-replay", "replay a stage trace");
  replay->fallthrough();
  std::string replay_trace;
  std::optional<std::string> replay_seeds;
  replay->add_option("--trace", replay_trace, "trace file")->required();
  replay->add_option("--seed-classes", replay_seeds,
                     "seed classes for coceer traces, e.g. [ [0] ]");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!scope_text.empty()) cli_detail::parse_scope(scope_text, cfg);
    cfg.out_dir = out_dir;
    if (cfg.n < 1) throw cli_detail::UsageFault("scope needs n >= 1");

    if (show->parsed()) {
      result.exit_code = cli_detail::cmd_show(cfg, show_rel, show_name, out);
    } else if (verify->parsed()) {
      result.exit_code =
          cli_detail::cmd_verify(cfg, verify_kind, verify_rel, verify_args, out);
    } else if (construct->parsed()) {
      result.exit_code =
          cli_detail::cmd_construct(cfg, construct_which, construct_family,
                                    construct_kbar, construct_rel,
                                    construct_args, out);
    } else if (replay->parsed()) {
      result.exit_code =
          cli_detail::cmd_trace_replay(cfg, replay_trace, replay_seeds, out);
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    result.exit_code = exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    result.exit_code = exit_code::usage;
  } catch (const cli_detail::UsageFault& e) {
    err << "usage error: " << e.what() << "\n";
    result.exit_code = exit_code::usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    result.exit_code = exit_code::usage;
  } catch (const SurrogateViolation& e) {
    err << "surrogate violation: " << e.what() << "\n";
    result.exit_code = exit_code::surrogate;
  } catch (const ScopeError& e) {
    err << "unknown at scope: " << e.what() << "\n";
    result.exit_code = exit_code::unknown;
  } catch (const OverflowError& e) {
    err << "overflow: " << e.what() << "\n";
    result.exit_code = exit_code::internal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = exit_code::usage;
  }

  result.out = out.str();
  result.err = err.str();
  return result;
}

}  // namespace eeq
