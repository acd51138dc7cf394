// Small regular expressions for token patterns: literals, escapes (\d \w \s and escaped
// punctuation), '.', classes [a-z_] and [^...], groups, '|', and the quantifiers * + ?.
#ifndef XLR_REGEX_HPP
#define XLR_REGEX_HPP

#include <bitset>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xlr {

class Regex {
 public:
  /// Throws Error("lex", ...) on a malformed pattern.
  explicit Regex(const std::string& pattern);

  /// Length of the longest match at the start of s, or -1.
  int longest_match(std::string_view s) const;

 private:
  struct State {
    enum Kind { Char, Split, Match } kind = Match;
    std::bitset<256> set;
    int out = -1, out2 = -1;
  };
  struct Frag {
    int start;
    std::vector<std::pair<int, bool>> holes;  // (state, patches out2)
  };
  int add(State s);
  Frag parse_alt();
  Frag parse_seq();
  Frag parse_atom();
  std::bitset<256> parse_class();
  std::bitset<256> parse_escape();
  void patch(Frag& f, int target);
  void closure(int s, std::vector<char>& on, std::vector<int>& list) const;

  std::string pat_;
  size_t pos_ = 0;
  std::vector<State> states_;
  int start_ = -1;
  std::bitset<256> first_;
  bool nullable_ = false;
};

}  // namespace xlr

#endif
