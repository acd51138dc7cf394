#include "xlr/cfg.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace xlr {

bool FlatConstraint::operator<(const FlatConstraint& o) const {
  return std::tie(form, i, key, key2, bound) < std::tie(o.form, o.i, o.key, o.key2, o.bound);
}

const char* role_name(Provenance::Role r) {
  switch (r) {
    case Provenance::TopLevel: return "top";
    case Provenance::FreshConcat: return "fresh-concat";
    case Provenance::FreshAlt: return "fresh-alt";
    case Provenance::FreshOpt: return "fresh-opt";
    case Provenance::FreshStar: return "fresh-star";
    case Provenance::FreshPlus: return "fresh-plus";
    case Provenance::FreshList: return "fresh-list";
    case Provenance::Wrapper: return "wrapper";
  }
  return "top";
}

int Label::value_count() const {
  int n = 1;
  for (auto& d : domain) n *= d.type.range;
  return n;
}

std::vector<int> decode_value(const Label& l, int v) {
  std::vector<int> out(l.domain.size());
  for (size_t j = l.domain.size(); j-- > 0;) {
    int r = l.domain[j].type.range;
    out[j] = v % r;
    v /= r;
  }
  return out;
}

int encode_value(const Label& l, const std::vector<int>& vals) {
  int v = 0;
  for (size_t j = 0; j < l.domain.size(); ++j) v = v * l.domain[j].type.range + vals[j];
  return v;
}

int Cfg::find(const std::string& name) const {
  for (int i = 0; i < num_symbols(); ++i)
    if (names[i] == name) return i;
  return -1;
}

int Cfg::add_symbol(const std::string& name, int lbl) {
  names.push_back(name);
  label.push_back(lbl);
  bound.push_back(std::vector<int>(lbl >= 0 ? labels[lbl].domain.size() : 0, 0));
  cps_eligible.push_back(0);
  by_lhs.emplace_back();
  return num_symbols() - 1;
}

void Cfg::index() {
  by_lhs.assign(names.size(), {});
  for (size_t i = 0; i < prods.size(); ++i) {
    prods[i].id = static_cast<int>(i);
    by_lhs[prods[i].lhs].push_back(static_cast<int>(i));
  }
}

std::string Cfg::prod_str(int p) const {
  std::string s = names[prods[p].lhs] + " ->";
  for (int x : prods[p].rhs) s += " " + names[x];
  if (prods[p].rhs.empty()) s += " ε";
  return s;
}

std::string Cfg::item_str(int p, int dot) const {
  std::string s = names[prods[p].lhs] + " ->";
  const auto& rhs = prods[p].rhs;
  for (int j = 0; j <= static_cast<int>(rhs.size()); ++j) {
    if (j == dot) s += " .";
    if (j < static_cast<int>(rhs.size())) s += " " + names[rhs[j]];
  }
  return s;
}

std::string tree_str(const Cfg& g, const Tree& t) {
  if (t.prod < 0) return g.names[t.sym];
  std::string s = "(" + std::to_string(t.prod) + ":" + g.names[g.prods[t.prod].lhs];
  for (auto& k : t.kids) s += " " + tree_str(g, k);
  return s + ")";
}

std::string dump(const Cfg& g) {
  std::ostringstream os;
  os << "start " << g.names[g.start] << "\n";
  for (auto& p : g.prods) {
    os << p.id << ": " << g.prod_str(p.id);
    if (!p.constraints.empty()) {
      os << "  {";
      for (size_t j = 0; j < p.constraints.size(); ++j) {
        auto& c = p.constraints[j];
        os << (j ? ", " : "");
        switch (c.form) {
          case FlatConstraint::LhsLeq: os << "lhs[" << c.key << "]<=" << c.bound; break;
          case FlatConstraint::RhsIGeq: os << "rhs" << c.i << "[" << c.key << "]>=" << c.bound; break;
          case FlatConstraint::LhsLeqRhsI:
            os << "lhs[" << c.key << "]<=rhs" << c.i << "[" << c.key2 << "]";
            break;
        }
      }
      os << "}";
    }
    if (g.cps_eligible[p.lhs]) os << "  (" << role_name(p.prov.role) << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace xlr
