// Acceptance gate: every release criterion runs end to end against the
// library and the installed binary, printing exactly one pass/fail line per
// criterion.  The process exits nonzero when any line fails.  Checks are
// exact; each criterion also carries a wall-clock ceiling that it must meet.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvred/abstract_reduction.hpp"
#include "mvred/modal_flatten.hpp"
#include "mvred/modal_unary.hpp"
#include "support.hpp"

using namespace mvred;

namespace {

constexpr std::uint64_t kBudget = 1000000;
constexpr std::uint64_t kSeed = 2026;

struct Gate {
  int failures = 0;

  // Runs one criterion.  The body returns an empty string on success and a
  // short failure description otherwise; exceeding the time ceiling fails
  // the line even when the checks themselves passed.
  void run(const std::string& name, double limit_s,
           const std::function<std::string()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = body();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (detail.empty() && secs >= limit_s)
      detail = "exceeded the time ceiling";
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs, ceiling %gs", secs, limit_s);
    if (detail.empty()) {
      std::cout << name << ": pass (" << timing << ")\n";
    } else {
      std::cout << name << ": FAIL (" << detail << ") (" << timing << ")\n";
      ++failures;
    }
  }
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(MVRED_CORPUS))
    if (e.path().extension() == ".mv") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Shared randomized program set: 50 four-valued and 20 five-point-chain
// stratified programs, generated once and reused by several criteria.
struct ProgramSet {
  std::vector<GroundProgram> programs;
  std::vector<Interpretation> models;

  static const ProgramSet& get() {
    static ProgramSet set = [] {
      ProgramSet s;
      Rng rng(kSeed);
      Lattice belnap = builtin_lattice("belnap4");
      Lattice fuzzy5 = lattice_from_selector("fuzzy:5");
      for (int i = 0; i < 50; ++i)
        s.programs.push_back(load(random_stratified(rng, belnap)));
      for (int i = 0; i < 20; ++i)
        s.programs.push_back(load(random_stratified(rng, fuzzy5)));
      for (const GroundProgram& gp : s.programs)
        s.models.push_back(compute_model(gp));
      return s;
    }();
    return set;
  }
};

// Small stratified four-valued programs whose Herbrand base stays at three
// atoms, so the full valuation space has at most 64 points.
std::string small_belnap_program(Rng& rng) {
  Lattice lat = builtin_lattice("belnap4");
  auto value = [&] {
    return lat.id(TruthValue{static_cast<std::uint32_t>(rng.below(lat.size()))});
  };
  std::string text = "lattice belnap4.\n";
  text += "p0(a) <- @" + value() + ".\n";
  if (rng.chance(1, 2)) text += "p1(a) <- @" + value() + ".\n";
  text += std::string("p1(a) :- ") + (rng.chance(1, 4) ? "~" : "") + "p0(a).\n";
  switch (rng.below(3)) {
    case 0: text += "p2(a) :- p0(a), p1(a).\n"; break;
    case 1: text += "p2(a) :- p0(a); p1(a).\n"; break;
    default: text += "p2(a) :- ~p1(a).\n"; break;
  }
  return text;
}

// Runs a shell command, capturing interleaved stdout/stderr and the exit
// status.
std::pair<int, std::string> run_command(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {rc, out};
}

std::string tables_criterion() {
  Lattice lat = builtin_lattice("belnap4");
  TruthValue f = val_of(lat, "f"), b = val_of(lat, "bot");
  TruthValue c = val_of(lat, "top"), t = val_of(lat, "t");
  const Connective* otimes = lat.extra("otimes");
  const Connective* oplus = lat.extra("oplus");
  const Connective* mu = lat.extra("mu");
  if (!otimes || !oplus || !mu) return "missing extra connective";
  auto bin = [&](const Connective* op, TruthValue x, TruthValue y) {
    return op->table[x.i * lat.size() + y.i];
  };
  if (lat.meet(c, b) != f) return "meet(top, bot) != f";
  if (lat.join(c, b) != t) return "join(top, bot) != t";
  if (bin(otimes, f, t) != b) return "otimes(f, t) != bot";
  if (bin(oplus, f, t) != c) return "oplus(f, t) != top";
  if (lat.neg(b) != b) return "neg(bot) != bot";
  if (lat.neg(c) != c) return "neg(top) != top";
  if (lat.neg(t) != f) return "neg(t) != f";
  for (std::uint32_t i = 0; i < lat.size(); ++i) {
    TruthValue x{i};
    bool designated = (x == c || x == t);
    if (mu->table[i] != (designated ? t : f))
      return "mu(" + lat.id(x) + ") misclassifies designation";
  }
  return "";
}

std::string axioms_criterion() {
  std::vector<std::string> selectors = {"belnap4"};
  for (int k = 2; k <= 9; ++k) selectors.push_back("fuzzy:" + std::to_string(k));
  for (int k = 2; k <= 5; ++k)
    selectors.push_back("interval:" + std::to_string(k));
  for (int k = 2; k <= 3; ++k)
    selectors.push_back("confidence:" + std::to_string(k));
  for (const std::string& sel : selectors) {
    Lattice lat = lattice_from_selector(sel);
    std::vector<AxiomViolation> bad = check_lattice(lat);
    if (!bad.empty())
      return sel + ": " + bad[0].axiom + ": " + bad[0].detail;
    std::uint32_t n = static_cast<std::uint32_t>(lat.size());
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = 0; b < n; ++b) {
        TruthValue va{a}, vb{b};
        // Independent residuum: the join of every c with c meet a <= b.
        TruthValue best = lat.bottom;
        for (std::uint32_t ci = 0; ci < n; ++ci) {
          TruthValue vc{ci};
          if (lat.leq(lat.meet(vc, va), vb)) best = lat.join(best, vc);
        }
        if (lat.implies(va, vb) != best)
          return sel + ": implies(" + lat.id(va) + ", " + lat.id(vb) +
                 ") is not the residuum";
        if ((lat.implies(va, vb) == lat.top) != lat.leq(va, vb))
          return sel + ": implies(" + lat.id(va) + ", " + lat.id(vb) +
                 ") = top disagrees with <=";
      }
    }
  }
  return "";
}

std::string invariance_criterion() {
  const ProgramSet& set = ProgramSet::get();
  for (std::size_t i = 0; i < set.programs.size(); ++i) {
    const GroundProgram& gp = set.programs[i];
    ModalProgram mp = transform_unary(gp, kBudget);
    KripkeUnary m = build_kripke_unary(gp, set.models[i]);
    Verdict v = verify_invariance(gp, set.models[i], mp, m);
    if (!v.pass)
      return "program " + std::to_string(i) + ": " + v.counterexample;
  }
  return "";
}

std::string two_valued_criterion() {
  const ProgramSet& set = ProgramSet::get();
  for (std::size_t i = 0; i < set.programs.size(); ++i) {
    const GroundProgram& gp = set.programs[i];
    KripkeUnary m = build_kripke_unary(gp, set.models[i]);
    std::vector<Formula> sample =
        sample_matom_formulas(gp, set.models[i], 500, 4, kSeed);
    Verdict v = verify_two_valued(m, sample);
    if (!v.pass)
      return "program " + std::to_string(i) + ": " + v.counterexample;
  }
  return "";
}

std::string flatten_criterion() {
  const ProgramSet& set = ProgramSet::get();
  for (std::size_t i = 0; i < set.programs.size(); ++i) {
    const GroundProgram& gp = set.programs[i];
    for (ImplMode mode : {ImplMode::Full, ImplMode::Verbatim}) {
      Verdict v = verify_flat(gp, set.models[i], mode, kSeed);
      if (!v.pass)
        return "program " + std::to_string(i) +
               (mode == ImplMode::Full ? " (full)" : " (verbatim)") + ": " +
               v.counterexample;
    }
  }
  return "";
}

std::string corollary_criterion() {
  const ProgramSet& set = ProgramSet::get();
  for (std::size_t i = 0; i < set.programs.size(); ++i) {
    Verdict v = verify_corollary(set.programs[i], set.models[i]);
    if (!v.pass)
      return "program " + std::to_string(i) + ": " + v.counterexample;
  }
  for (const std::filesystem::path& p : corpus_files()) {
    GroundProgram gp = load(read_file(p));
    Verdict v = verify_corollary(gp, compute_model(gp));
    if (!v.pass) return p.filename().string() + ": " + v.counterexample;
  }
  return "";
}

std::string suszko_criterion() {
  // Fixed small corpus programs plus ten generated ones, all with at most
  // three Herbrand atoms so the valuation space is exhaustible at 64 points.
  std::vector<std::string> texts;
  for (const char* name :
       {"belnap_chain.mv", "belnap_paraconsistent.mv", "belnap_stratified.mv",
        "belnap_fixpoint.mv"})
    texts.push_back(read_file(std::filesystem::path(MVRED_CORPUS) / name));
  Rng rng(kSeed);
  for (int i = 0; i < 10; ++i) texts.push_back(small_belnap_program(rng));

  for (std::size_t i = 0; i < texts.size(); ++i) {
    GroundProgram gp = load(texts[i]);
    ValuationSpace vs = valuation_space(gp, 64);
    Matrix mat = matrix_from_ids(gp.lattice, {gp.lattice.id(gp.lattice.top)});
    std::vector<Sentence> gamma = program_sentences(gp);
    std::vector<Sentence> suite = clause_suite(gp, 2);
    for (const Formula& f : formula_suite(gp, 2))
      suite.push_back(sentence_of(f));
    LemmaVerdict lv = verify_suszko(gp, vs, gamma, suite, &mat);
    if (!lv.pass) return "program " + std::to_string(i) + ": " + lv.witness;
    // The relation image is the same model set at every world, so each
    // sentence's extent must come out empty or full.
    SuszkoModel m = suszko_model(gp, vs, gamma, &mat);
    for (const Sentence& s : suite) {
      std::vector<std::uint8_t> ext = extent_box(gp, m, s, &mat);
      bool all = true, none = true;
      for (std::uint8_t e : ext) (e ? none : all) = false;
      if (!all && !none)
        return "program " + std::to_string(i) + ": nonuniform extent for " +
               print_sentence(gp, s);
    }
  }
  return "";
}

std::string matrix_criterion() {
  struct Case {
    const char* file;
    std::vector<std::string> designated;
  };
  std::vector<Case> cases = {
      {"belnap_chain.mv", {"t", "top"}},
      {"belnap_chain.mv", {"t"}},
      {"belnap_paraconsistent.mv", {"t", "top"}},
      {"belnap_paraconsistent.mv", {"t"}},
      {"belnap_stratified.mv", {"t", "top"}},
      {"belnap_stratified.mv", {"t"}},
      {"fuzzy5_mix.mv", {"1"}},
  };
  for (const Case& c : cases) {
    GroundProgram gp =
        load(read_file(std::filesystem::path(MVRED_CORPUS) / c.file));
    Matrix mat = matrix_from_ids(gp.lattice, c.designated);
    MatrixModel m = matrix_model(gp, compute_model(gp), mat);
    LemmaVerdict lv = verify_matrix(gp, m, formula_suite(gp, 2));
    if (!lv.pass) return std::string(c.file) + ": " + lv.witness;
  }
  return "";
}

std::string paraconsistency_criterion() {
  GroundProgram gp = load(read_file(
      std::filesystem::path(MVRED_CORPUS) / "belnap_paraconsistent.mv"));
  const Lattice& lat = gp.lattice;
  Interpretation I = compute_model(gp);
  std::size_t p_id = gp.base.size();
  for (std::size_t id = 0; id < gp.base.size(); ++id)
    if (gp.base.atom_text(id) == "p(a)") p_id = id;
  if (p_id == gp.base.size()) return "p(a) missing from the Herbrand base";
  if (!(I.val[p_id] == val_of(lat, "top"))) return "p(a) is not at value top";

  // The transformed image is a positive program by construction; the Kripke
  // model built from the source model must satisfy it.
  ModalProgram mp = transform_unary(gp, kBudget);
  if (mp.clauses.empty()) return "transformed program is empty";
  KripkeUnary m = build_kripke_unary(gp, I);
  Verdict v = verify_invariance(gp, I, mp, m);
  if (!v.pass) return v.counterexample;

  Formula f = parse_formula(lat, "[top] p(a)");
  std::vector<bool> ext = extent_unary(m, f);
  for (bool e : ext)
    if (!e) return "[top]p(a) fails at some world";
  if (!eval_modal(m, f, val_of(lat, "top"))) return "[top]p(a) fails at top";
  return "";
}

std::string cli_determinism_criterion() {
  std::vector<std::filesystem::path> files = corpus_files();
  if (files.empty()) return "no corpus programs found";
  for (const std::filesystem::path& p : files) {
    std::string cmd =
        std::string(MVRED_BIN) + " verify '" + p.string() + "' --json";
    auto first = run_command(cmd);
    auto second = run_command(cmd);
    if (first.first != 0)
      return p.filename().string() + ": exit " + std::to_string(first.first);
    if (second.first != 0)
      return p.filename().string() + ": exit " +
             std::to_string(second.first) + " on the second run";
    if (first.second != second.second)
      return p.filename().string() + ": runs differ";
  }
  return "";
}

}  // namespace

int main() {
  Gate gate;
  gate.run("01 four-valued connective tables", 1, tables_criterion);
  gate.run("02 built-in lattice axioms and residuation", 10, axioms_criterion);
  gate.run("03 unary transform invariance on random programs", 60,
           invariance_criterion);
  gate.run("04 modal extents are two-valued and boolean", 60,
           two_valued_criterion);
  gate.run("05 flattening contract in both implication modes", 60,
           flatten_criterion);
  gate.run("06 flat and unary models agree on encapsulations", 30,
           corollary_criterion);
  gate.run("07 consequence matches box over exhaustive suites", 30,
           suszko_criterion);
  gate.run("08 designation matches dia under chosen matrices", 10,
           matrix_criterion);
  gate.run("09 paraconsistent program keeps a classical image", 1,
           paraconsistency_criterion);
  gate.run("10 verification runs are byte-identical", 120,
           cli_determinism_criterion);
  return gate.failures == 0 ? 0 : 1;
}
