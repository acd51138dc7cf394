#include "xlr/regex.hpp"

#include <algorithm>

#include "xlr/error.hpp"

namespace xlr {

Regex::Regex(const std::string& pattern) : pat_(pattern) {
  Frag f = parse_alt();
  if (pos_ != pat_.size()) throw Error("lex", "unexpected '" + std::string(1, pat_[pos_]) + "' in /" + pat_ + "/");
  int m = add({State::Match, {}, -1, -1});
  patch(f, m);
  start_ = f.start;
  std::vector<char> on(states_.size(), 0);
  std::vector<int> init;
  closure(start_, on, init);
  for (int x : init) {
    if (states_[x].kind == State::Char) first_ |= states_[x].set;
    if (states_[x].kind == State::Match) nullable_ = true;
  }
}

int Regex::add(State s) {
  states_.push_back(s);
  return static_cast<int>(states_.size()) - 1;
}

void Regex::patch(Frag& f, int target) {
  for (auto [st, second] : f.holes) (second ? states_[st].out2 : states_[st].out) = target;
  f.holes.clear();
}

Regex::Frag Regex::parse_alt() {
  Frag left = parse_seq();
  while (pos_ < pat_.size() && pat_[pos_] == '|') {
    ++pos_;
    Frag right = parse_seq();
    int s = add({State::Split, {}, left.start, right.start});
    std::vector<std::pair<int, bool>> holes;
    holes.insert(holes.end(), left.holes.begin(), left.holes.end());
    holes.insert(holes.end(), right.holes.begin(), right.holes.end());
    left = {s, holes};
  }
  return left;
}

Regex::Frag Regex::parse_seq() {
  Frag acc{-1, {}};
  while (pos_ < pat_.size() && pat_[pos_] != '|' && pat_[pos_] != ')') {
    Frag a = parse_atom();
    if (pos_ < pat_.size() && (pat_[pos_] == '*' || pat_[pos_] == '+' || pat_[pos_] == '?')) {
      char q = pat_[pos_++];
      int s = add({State::Split, {}, a.start, -1});
      if (q == '*') {
        patch(a, s);
        a = {s, {{s, true}}};
      } else if (q == '+') {
        patch(a, s);
        a = {a.start, {{s, true}}};
      } else {
        a.holes.push_back({s, true});
        a.start = s;
      }
    }
    if (acc.start < 0) {
      acc = a;
    } else {
      patch(acc, a.start);
      acc.holes = a.holes;
    }
  }
  if (acc.start < 0) {
    // empty sequence: a split whose second arm is disabled
    int s = add({State::Split, {}, -1, -1});
    states_[s].out2 = -2;
    acc = {s, {{s, false}}};
  }
  return acc;
}

std::bitset<256> Regex::parse_escape() {
  std::bitset<256> set;
  if (pos_ >= pat_.size()) throw Error("lex", "dangling escape in /" + pat_ + "/");
  char e = pat_[pos_++];
  auto range = [&](int a, int b) {
    for (int c = a; c <= b; ++c) set.set(c);
  };
  switch (e) {
    case 'd': range('0', '9'); break;
    case 'w': range('0', '9'); range('a', 'z'); range('A', 'Z'); set.set('_'); break;
    case 's': for (char c : std::string(" \t\n\r\f\v")) set.set(static_cast<unsigned char>(c)); break;
    case 'n': set.set('\n'); break;
    case 't': set.set('\t'); break;
    case 'r': set.set('\r'); break;
    default: set.set(static_cast<unsigned char>(e));
  }
  return set;
}

std::bitset<256> Regex::parse_class() {
  std::bitset<256> set;
  bool neg = false;
  if (pos_ < pat_.size() && pat_[pos_] == '^') {
    neg = true;
    ++pos_;
  }
  bool first = true;
  while (pos_ < pat_.size() && (pat_[pos_] != ']' || first)) {
    first = false;
    if (pat_[pos_] == '\\') {
      ++pos_;
      set |= parse_escape();
      continue;
    }
    unsigned char a = pat_[pos_++];
    if (pos_ + 1 < pat_.size() && pat_[pos_] == '-' && pat_[pos_ + 1] != ']') {
      unsigned char b = pat_[pos_ + 1];
      pos_ += 2;
      if (b < a) throw Error("lex", "bad range in /" + pat_ + "/");
      for (int c = a; c <= b; ++c) set.set(c);
    } else {
      set.set(a);
    }
  }
  if (pos_ >= pat_.size()) throw Error("lex", "unterminated class in /" + pat_ + "/");
  ++pos_;
  if (neg) set.flip();
  return set;
}

Regex::Frag Regex::parse_atom() {
  char c = pat_[pos_];
  std::bitset<256> set;
  if (c == '(') {
    ++pos_;
    Frag f = parse_alt();
    if (pos_ >= pat_.size() || pat_[pos_] != ')') throw Error("lex", "unbalanced group in /" + pat_ + "/");
    ++pos_;
    return f;
  }
  if (c == '*' || c == '+' || c == '?') throw Error("lex", "nothing to repeat in /" + pat_ + "/");
  ++pos_;
  if (c == '[') set = parse_class();
  else if (c == '\\') set = parse_escape();
  else if (c == '.') set.set().reset('\n');
  else set.set(static_cast<unsigned char>(c));
  int s = add({State::Char, set, -1, -1});
  return {s, {{s, false}}};
}

void Regex::closure(int s, std::vector<char>& on, std::vector<int>& list) const {
  if (s < 0 || on[s]) return;
  on[s] = 1;
  const State& st = states_[s];
  if (st.kind == State::Split) {
    closure(st.out, on, list);
    if (st.out2 != -2) closure(st.out2, on, list);
    return;
  }
  list.push_back(s);
}

int Regex::longest_match(std::string_view s) const {
  if (!nullable_ && (s.empty() || !first_.test(static_cast<unsigned char>(s[0])))) return -1;
  std::vector<char> on(states_.size(), 0);
  std::vector<int> cur, next;
  closure(start_, on, cur);
  int best = -1;
  for (size_t i = 0;; ++i) {
    for (int x : cur)
      if (states_[x].kind == State::Match) best = static_cast<int>(i);
    if (i == s.size() || cur.empty()) break;
    unsigned char c = s[i];
    std::fill(on.begin(), on.end(), 0);
    next.clear();
    for (int x : cur)
      if (states_[x].kind == State::Char && states_[x].set.test(c)) closure(states_[x].out, on, next);
    cur.swap(next);
  }
  return best;
}

}  // namespace xlr
