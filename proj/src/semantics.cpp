#include "mvred/semantics.hpp"

#include <algorithm>

namespace mvred {

TruthValue valuation(const GroundProgram& gp, const Interpretation& I,
                     const Formula& f) {
  const Lattice& lat = gp.lattice;
  switch (f.kind) {
    case FKind::Atom: {
      if (builtin_pred(f.atom.pred)) {
        for (const Term& t : f.atom.args)
          if (t.is_var)
            fail(ErrorKind::Semantic,
                 "cannot evaluate non-ground atom '" + print_atom(f.atom) + "'");
        return eval_builtin(f.atom.pred, f.atom.args) ? lat.top : lat.bottom;
      }
      auto id = gp.base.index_of(f.atom);
      if (!id)
        fail(ErrorKind::Semantic,
             "cannot evaluate atom '" + print_atom(f.atom) +
                 "': not in the Herbrand base of the program");
      return I.val[*id];
    }
    case FKind::MvConst:
      return *f.value;
    case FKind::MvNeg:
      return lat.neg(valuation(gp, I, f.kids[0]));
    case FKind::MvAnd:
      return lat.meet(valuation(gp, I, f.kids[0]), valuation(gp, I, f.kids[1]));
    case FKind::MvOr:
      return lat.join(valuation(gp, I, f.kids[0]), valuation(gp, I, f.kids[1]));
    case FKind::MvLarr:
      // head <- body evaluates as body -> head.
      return lat.implies(valuation(gp, I, f.kids[1]), valuation(gp, I, f.kids[0]));
    case FKind::MvRarr:
      return lat.implies(valuation(gp, I, f.kids[0]), valuation(gp, I, f.kids[1]));
    case FKind::MvOp: {
      const Connective* con = lat.extra(f.op_name);
      if (!con)
        fail(ErrorKind::Semantic,
             "lattice " + lat.name + " has no connective '" + f.op_name + "'");
      TruthValue a = valuation(gp, I, f.kids[0]);
      if (con->arity == 1) return con->table[a.i];
      TruthValue b = valuation(gp, I, f.kids[1]);
      return con->table[a.i * lat.size() + b.i];
    }
    default:
      fail(ErrorKind::Semantic,
           "formula is not many-valued and has no algebraic value");
  }
}

TruthValue body_value(const GroundProgram& gp, const Interpretation& I,
                      const GroundRule& r) {
  const Lattice& lat = gp.lattice;
  if (r.is_fact()) return *r.fact_value;
  TruthValue acc = lat.bottom;
  for (const auto& conj : r.body) {
    TruthValue c = lat.top;
    for (const GroundLiteral& lit : conj) {
      TruthValue v = I.val[lit.atom];
      if (lit.negated) v = lat.neg(v);
      c = lat.meet(c, v);
    }
    acc = lat.join(acc, c);
  }
  return acc;
}

bool satisfies_rule(const GroundProgram& gp, const Interpretation& I,
                    const GroundRule& r) {
  return gp.lattice.leq(body_value(gp, I, r), I.val[r.head]);
}

bool is_model(const GroundProgram& gp, const Interpretation& I) {
  if (I.val.size() != gp.base.size()) return false;
  for (const GroundRule& r : gp.rules)
    if (!satisfies_rule(gp, I, r)) return false;
  return true;
}

namespace {

// Strongly connected components of the head -> body-atom dependency graph,
// emitted bottom-up (every component is emitted after the components it
// depends on).  Iterative Tarjan.
struct SccResult {
  std::vector<int> comp;                        // atom id -> component index
  std::vector<std::vector<std::uint32_t>> order;  // components, bottom-up
};

SccResult scc_bottom_up(std::size_t n,
                        const std::vector<std::vector<std::uint32_t>>& adj) {
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  int next_index = 0;

  struct WorkItem {
    std::uint32_t v;
    std::size_t edge = 0;
  };
  for (std::uint32_t start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<WorkItem> work{{start, 0}};
    while (!work.empty()) {
      WorkItem& item = work.back();
      std::uint32_t v = item.v;
      if (item.edge == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (item.edge < adj[v].size()) {
        std::uint32_t w = adj[v][item.edge++];
        if (index[w] == -1) {
          work.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        res.order.emplace_back();
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          res.comp[w] = static_cast<int>(res.order.size()) - 1;
          res.order.back().push_back(w);
        } while (w != v);
      }
      work.pop_back();
      if (!work.empty()) {
        std::uint32_t parent = work.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return res;
}

}  // namespace

Interpretation compute_model(const GroundProgram& gp) {
  const Lattice& lat = gp.lattice;
  std::size_t n = gp.base.size();

  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const GroundRule& r : gp.rules)
    for (const auto& conj : r.body)
      for (const GroundLiteral& lit : conj) adj[r.head].push_back(lit.atom);

  SccResult scc = scc_bottom_up(n, adj);

  // A negated dependency inside one component makes the program unstratified.
  for (const GroundRule& r : gp.rules)
    for (const auto& conj : r.body)
      for (const GroundLiteral& lit : conj)
        if (lit.negated && scc.comp[r.head] == scc.comp[lit.atom])
          fail(ErrorKind::Semantic,
               "program is not stratified: '" + gp.base.atom_text(r.head) +
                   "' depends on '~" + gp.base.atom_text(lit.atom) +
                   "' inside a cycle");

  // Rules grouped by head for the per-component fixpoint.
  std::vector<std::vector<const GroundRule*>> by_head(n);
  for (const GroundRule& r : gp.rules) by_head[r.head].push_back(&r);

  Interpretation I;
  I.val.assign(n, lat.bottom);
  for (const auto& component : scc.order) {
    // All atoms outside the component already carry their final value, so the
    // restricted operator is monotone; iterate from bottom to its least
    // fixpoint.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t a : component) {
        TruthValue acc = lat.bottom;
        for (const GroundRule* r : by_head[a])
          acc = lat.join(acc, body_value(gp, I, *r));
        if (!(acc == I.val[a])) {
          I.val[a] = acc;
          changed = true;
        }
      }
    }
  }
  return I;
}

std::string model_text(const GroundProgram& gp, const Interpretation& I) {
  std::string out;
  for (std::size_t i = 0; i < gp.base.size(); ++i)
    out += gp.base.atom_text(i) + " = " + gp.lattice.id(I.val[i]) + "\n";
  return out;
}

Formula rule_formula(const GroundProgram& gp, const GroundRule& r) {
  auto atom_leaf = [&](std::uint32_t id) {
    Formula f;
    f.kind = FKind::Atom;
    f.atom = gp.base.atom(id);
    return f;
  };
  auto binary = [](FKind kind, Formula a, Formula b) {
    Formula f;
    f.kind = kind;
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
  };
  Formula body;
  if (r.is_fact()) {
    body.kind = FKind::MvConst;
    body.value = r.fact_value;
  } else {
    bool first_disjunct = true;
    for (const auto& conj : r.body) {
      Formula c;
      bool first_lit = true;
      for (const GroundLiteral& lit : conj) {
        Formula leaf = atom_leaf(lit.atom);
        if (lit.negated) {
          Formula neg;
          neg.kind = FKind::MvNeg;
          neg.kids.push_back(std::move(leaf));
          leaf = std::move(neg);
        }
        if (first_lit) {
          c = std::move(leaf);
          first_lit = false;
        } else {
          c = binary(FKind::MvAnd, std::move(c), std::move(leaf));
        }
      }
      if (first_disjunct) {
        body = std::move(c);
        first_disjunct = false;
      } else {
        body = binary(FKind::MvOr, std::move(body), std::move(c));
      }
    }
  }
  return binary(FKind::MvLarr, atom_leaf(r.head), std::move(body));
}

}  // namespace mvred
