#include "mvred/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvred/abstract_reduction.hpp"
#include "mvred/modal_flatten.hpp"
#include "mvred/modal_unary.hpp"

namespace mvred::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Usage, "cannot read program file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Replaces the selector of the program's lattice declaration, which the
// grammar requires to be the first contentful line.
std::string override_lattice(const std::string& text, const std::string& sel) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i != std::string::npos && line[i] != '%') {
      if (line.compare(i, 7, "lattice") != 0)
        fail(ErrorKind::Usage, "program must start with a lattice declaration");
      return text.substr(0, pos + i) + "lattice " + sel + "." +
             text.substr(eol);
    }
    pos = eol < text.size() ? eol + 1 : text.size();
  }
  fail(ErrorKind::Usage, "program must start with a lattice declaration");
}

Matrix designated_matrix(const Lattice& lat, const std::vector<std::string>& ids) {
  if (ids.empty()) return matrix_from_ids(lat, {lat.id(lat.top)});
  return matrix_from_ids(lat, ids);
}

// Expands every encapsulation marker into its flattened image so the result
// evaluates against the flat Kripke model.
Formula expand_encap(const SemanticReflection& refl, const Formula& f) {
  if (f.kind == FKind::Encap) return encapsulate(refl, f.kids[0]);
  Formula out = f;
  for (Formula& kid : out.kids) kid = expand_encap(refl, kid);
  return out;
}

int run_model(const GroundProgram& gp, const RunConfig& cfg, std::ostream& out) {
  Interpretation I = compute_model(gp);
  if (cfg.json) {
    Json doc = Json::object();
    for (std::size_t id = 0; id < gp.base.size(); ++id)
      doc[gp.base.atom_text(id)] = gp.lattice.id(I.val[id]);
    out << doc.dump(2) << '\n';
  } else {
    out << model_text(gp, I);
  }
  return 0;
}

int run_transform_unary(const GroundProgram& gp, const RunConfig& cfg,
                        std::ostream& out) {
  ModalProgram mp = transform_unary(gp, cfg.clause_budget);
  if (cfg.json) {
    Json doc = Json::array();
    for (const ModalClause& c : mp.clauses) {
      Json jc;
      jc["head"] = {{"op", gp.lattice.id(c.head.value)},
                    {"atom", gp.base.atom_text(c.head.atom)}};
      Json body = Json::array();
      for (const auto& conj : c.body) {
        Json jconj = Json::array();
        for (const ModalAtom& a : conj)
          jconj.push_back({{"op", gp.lattice.id(a.value)},
                           {"atom", gp.base.atom_text(a.atom)}});
        body.push_back(jconj);
      }
      jc["body"] = body;
      doc.push_back(jc);
    }
    out << doc.dump(2) << '\n';
  } else {
    out << print_modal_program(gp, mp);
  }
  return 0;
}

int run_transform_flatten(const GroundProgram& gp, const RunConfig& cfg,
                          std::ostream& out) {
  Interpretation I = compute_model(gp);
  FlatProgram fp = transform_flatten(gp, I);
  if (cfg.json) {
    KripkeFlat m = build_kripke_flat(
        gp, I, cfg.full_implication ? ImplMode::Full : ImplMode::Verbatim);
    Json doc;
    Json clauses = Json::array();
    for (const Formula& c : fp.clauses)
      clauses.push_back(print_formula(gp.lattice, c));
    doc["clauses"] = clauses;
    Json rels;
    for (const char* name : {"neg", "and", "or", "impl", "any"}) {
      Json rows = Json::array();
      for (const auto& row : relation_flat(m, name)) {
        Json jrow = Json::array();
        for (std::uint32_t w : row) jrow.push_back(gp.lattice.id(TruthValue{w}));
        rows.push_back(jrow);
      }
      rels[name] = rows;
    }
    doc["relations"] = rels;
    out << doc.dump(2) << '\n';
  } else {
    out << print_flat_program(gp, fp);
  }
  return 0;
}

int run_check(const GroundProgram& gp, const RunConfig& cfg, std::ostream& out) {
  const Lattice& lat = gp.lattice;
  Formula f = parse_formula(lat, cfg.formula);
  std::optional<TruthValue> world;
  if (!cfg.world.empty()) {
    world = resolve_value_text(lat, cfg.world);
    if (!world)
      fail(ErrorKind::Usage,
           "unknown world '" + cfg.world + "' for lattice " + lat.name);
  }
  std::string printed = print_formula(lat, f);
  Json doc;
  doc["formula"] = printed;

  auto emit_bool = [&](const char* layer, bool res) {
    if (cfg.json) {
      doc["layer"] = layer;
      if (world) doc["world"] = lat.id(*world);
      doc["result"] = res;
      out << doc.dump(2) << '\n';
    } else {
      out << (res ? "true" : "false") << '\n';
    }
  };
  auto emit_worlds = [&](const char* layer, const std::vector<bool>& ext) {
    if (cfg.json) {
      doc["layer"] = layer;
      Json ws = Json::object();
      for (std::size_t w = 0; w < lat.size(); ++w)
        ws[lat.id(TruthValue{static_cast<std::uint32_t>(w)})] =
            static_cast<bool>(ext[w]);
      doc["worlds"] = ws;
      out << doc.dump(2) << '\n';
    } else {
      for (std::size_t w = 0; w < lat.size(); ++w)
        out << lat.id(TruthValue{static_cast<std::uint32_t>(w)}) << ": "
            << (ext[w] ? "true" : "false") << '\n';
    }
  };

  if (has_abstract_ops(f)) {
    if (world)
      fail(ErrorKind::Usage,
           "abstract formulas are world-independent; drop --world");
    Interpretation I = compute_model(gp);
    ValuationSpace vs = valuation_space(gp, cfg.valuation_budget);
    Matrix mat = designated_matrix(lat, cfg.designated);
    bool res = eval_abstract(gp, vs, program_sentences(gp), I, f, &mat);
    emit_bool("abstract", res);
    return 0;
  }
  if (has_flat_ops(f)) {
    Interpretation I = compute_model(gp);
    KripkeFlat m = build_kripke_flat(
        gp, I, cfg.full_implication ? ImplMode::Full : ImplMode::Verbatim);
    Formula flat = expand_encap(m.refl, f);
    if (world) {
      emit_bool("flat", eval_flat(m, flat, *world));
    } else {
      emit_worlds("flat", extent_flat(m, flat));
    }
    return 0;
  }
  if (is_mv_formula(f)) {
    if (world)
      fail(ErrorKind::Usage,
           "the formula evaluates to a truth value; --world does not apply");
    Interpretation I = compute_model(gp);
    TruthValue v = valuation(gp, I, f);
    if (cfg.json) {
      doc["layer"] = "value";
      doc["value"] = lat.id(v);
      out << doc.dump(2) << '\n';
    } else {
      out << lat.id(v) << '\n';
    }
    return 0;
  }
  Interpretation I = compute_model(gp);
  KripkeUnary m = build_kripke_unary(gp, I);
  if (world) {
    emit_bool("modal", eval_modal(m, f, *world));
  } else {
    emit_worlds("modal", extent_unary(m, f));
  }
  return 0;
}

// One verification suite normalized for reporting.
struct SuiteReport {
  std::string name;
  bool pass = false;
  std::string detail;  // counterexample or witness text
  Json json;
};

SuiteReport report_of(const Verdict& v) {
  SuiteReport r;
  r.name = v.check;
  r.pass = v.pass;
  r.detail = v.counterexample;
  r.json = {{"check", v.check}, {"pass", v.pass}};
  if (!v.pass) r.json["counterexample"] = v.counterexample;
  return r;
}

SuiteReport report_of(const LemmaVerdict& v) {
  SuiteReport r;
  r.name = v.lemma;
  r.pass = v.pass;
  r.detail = v.witness;
  r.json = {{"lemma", v.lemma},
            {"formulas_checked", v.formulas_checked},
            {"pass", v.pass}};
  if (!v.pass)
    r.json["witness"] = {{"formula", v.witness_formula},
                         {"side_left", v.side_left},
                         {"side_right", v.side_right}};
  return r;
}

int run_verify(const GroundProgram& gp, const RunConfig& cfg, std::ostream& out) {
  static const std::vector<std::string> kAll = {
      "lattice-axioms", "invariance", "twovalued", "flatten",
      "corollary",      "suszko",     "matrix"};
  std::vector<std::string> suites;
  if (cfg.suite == "all") {
    suites = kAll;
  } else {
    if (std::find(kAll.begin(), kAll.end(), cfg.suite) == kAll.end())
      fail(ErrorKind::Usage, "unknown suite '" + cfg.suite + "'");
    suites = {cfg.suite};
  }

  ImplMode mode = cfg.full_implication ? ImplMode::Full : ImplMode::Verbatim;
  std::optional<Interpretation> model;
  auto the_model = [&]() -> const Interpretation& {
    if (!model) model = compute_model(gp);
    return *model;
  };

  std::vector<SuiteReport> reports;
  for (const std::string& s : suites) {
    if (s == "lattice-axioms") {
      std::vector<AxiomViolation> bad = check_lattice(gp.lattice);
      Verdict v;
      v.check = "lattice-axioms";
      v.pass = bad.empty();
      if (!bad.empty()) v.counterexample = bad[0].axiom + ": " + bad[0].detail;
      reports.push_back(report_of(v));
    } else if (s == "invariance") {
      ModalProgram mp = transform_unary(gp, cfg.clause_budget);
      KripkeUnary m = build_kripke_unary(gp, the_model());
      reports.push_back(report_of(verify_invariance(gp, the_model(), mp, m)));
    } else if (s == "twovalued") {
      KripkeUnary m = build_kripke_unary(gp, the_model());
      std::vector<Formula> sample = sample_matom_formulas(
          gp, the_model(), cfg.sample_count, cfg.sample_depth, cfg.seed);
      reports.push_back(report_of(verify_two_valued(m, sample)));
    } else if (s == "flatten") {
      reports.push_back(report_of(verify_flat(gp, the_model(), mode, cfg.seed)));
    } else if (s == "corollary") {
      reports.push_back(report_of(verify_corollary(gp, the_model())));
    } else if (s == "suszko") {
      ValuationSpace vs = valuation_space(gp, cfg.valuation_budget);
      Matrix mat = designated_matrix(gp.lattice, cfg.designated);
      // Exhaustive depth follows the valuation count so the suite stays at
      // desk scale: 2 while the space is small, 1 beyond that.
      int depth = vs.count <= 64 ? 2 : 1;
      std::vector<Sentence> suite = clause_suite(gp, depth);
      for (const Formula& f : formula_suite(gp, depth))
        suite.push_back(sentence_of(f));
      reports.push_back(report_of(
          verify_suszko(gp, vs, program_sentences(gp), suite, &mat)));
    } else if (s == "matrix") {
      Matrix mat = designated_matrix(gp.lattice, cfg.designated);
      MatrixModel m = matrix_model(gp, the_model(), mat);
      reports.push_back(report_of(verify_matrix(gp, m, formula_suite(gp, 2))));
    }
  }

  bool all_pass = true;
  for (const SuiteReport& r : reports) all_pass = all_pass && r.pass;
  if (cfg.json) {
    Json doc = Json::array();
    for (const SuiteReport& r : reports) doc.push_back(r.json);
    out << doc.dump(2) << '\n';
  } else {
    for (const SuiteReport& r : reports) {
      if (r.pass) {
        out << r.name << ": pass";
        if (r.json.contains("formulas_checked"))
          out << " (" << r.json["formulas_checked"].get<std::size_t>()
              << " formulas)";
        out << '\n';
      } else {
        out << r.name << ": FAIL (" << r.detail << ")\n";
      }
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.clause_budget == 0 || cfg.valuation_budget == 0)
      fail(ErrorKind::Usage, "budgets must be positive");
    std::string text = read_file(cfg.program_path);
    if (!cfg.lattice_override.empty())
      text = override_lattice(text, cfg.lattice_override);
    GroundProgram gp = ground(parse_program(text));

    if (cfg.mode == "model") return run_model(gp, cfg, out);
    if (cfg.mode == "transform-unary") return run_transform_unary(gp, cfg, out);
    if (cfg.mode == "transform-flatten")
      return run_transform_flatten(gp, cfg, out);
    if (cfg.mode == "check") return run_check(gp, cfg, out);
    if (cfg.mode == "verify") return run_verify(gp, cfg, out);
    fail(ErrorKind::Usage, "unknown mode '" + cfg.mode + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Budget ? 3 : 2;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  std::string mode_flag = "unary";

  CLI::App app{"many-valued logic programs and their two-valued modal reductions"};
  app.name("mvred");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* c) {
    c->add_option("program", cfg.program_path, "program file")->required();
    c->add_option("--lattice", cfg.lattice_override,
                  "lattice selector replacing the program's declaration");
    c->add_option("--designated", cfg.designated,
                  "designated truth values (default: the lattice top)");
    c->add_flag("--full-implication", cfg.full_implication,
                "keep every implication triple instead of the <= filtered ones");
    c->add_flag("--json", cfg.json, "emit a JSON document instead of text");
    c->add_option("--clause-budget", cfg.clause_budget,
                  "cap on transformed clause count")
        ->check(CLI::PositiveNumber);
    c->add_option("--valuation-budget", cfg.valuation_budget,
                  "cap on the valuation space size")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", cfg.seed, "seed for sampled formula suites");
    c->add_option("--sample-count", cfg.sample_count,
                  "sampled formulas for the two-valuedness suite");
    c->add_option("--sample-depth", cfg.sample_depth,
                  "connective depth of sampled formulas");
  };

  CLI::App* model = app.add_subcommand("model", "print the least model");
  add_common(model);
  CLI::App* transform =
      app.add_subcommand("transform", "emit a two-valued image of the program");
  add_common(transform);
  transform->add_option("--mode", mode_flag, "unary | flatten")
      ->check(CLI::IsMember({"unary", "flatten"}));
  CLI::App* check = app.add_subcommand("check", "evaluate one formula");
  add_common(check);
  check->add_option("--formula", cfg.formula, "formula to evaluate")->required();
  check->add_option("--world", cfg.world, "world to evaluate at");
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify);
  verify
      ->add_option("--suite", cfg.suite,
                   "invariance | twovalued | flatten | corollary | suszko | "
                   "matrix | lattice-axioms | all")
      ->check(CLI::IsMember({"invariance", "twovalued", "flatten", "corollary",
                             "suszko", "matrix", "lattice-axioms", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (model->parsed()) cfg.mode = "model";
  else if (transform->parsed()) cfg.mode = "transform-" + mode_flag;
  else if (check->parsed()) cfg.mode = "check";
  else cfg.mode = "verify";

  if (const char* env = std::getenv("MVRED_BUDGET"); env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      err << "error: MVRED_BUDGET must be a positive integer\n";
      return 2;
    }
    cfg.clause_budget = v;
    cfg.valuation_budget = v;
  }

  return run(cfg, out, err);
}

}  // namespace mvred::cli
