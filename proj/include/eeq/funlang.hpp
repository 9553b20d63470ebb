#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eeq/pairing.hpp"

namespace eeq {

namespace detail {
template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;
}  // namespace detail

struct FunExpr;
using FunPtr = std::shared_ptr<const FunExpr>;

/// A closed term of the total-function language on naturals. Every node
/// denotes a total map N -> N; the language has no recursion and no search,
/// so evaluation terminates on every input by construction. Values are
/// immutable after construction and safe to share across threads.
struct FunExpr {
  struct Const {
    Nat value;
  };
  struct Id {};
  struct Succ {};
  struct Proj0 {};
  struct Proj1 {};
  struct PairOf {
    FunPtr first, second;  // x -> <first(x), second(x)>
  };
  struct Compose {
    FunPtr outer, inner;  // x -> outer(inner(x))
  };
  struct Double {};       // x -> 2x
  struct DoublePlus1 {};  // x -> 2x + 1
  struct Half {};         // x -> floor(x / 2)
  struct Mod {
    Nat modulus;  // >= 1
  };
  struct Add {
    FunPtr lhs, rhs;
  };
  struct Mul {
    FunPtr lhs, rhs;
  };
  struct IfLess {
    FunPtr probe, bound, then_branch, else_branch;  // probe(x) < bound(x) ?
  };
  struct Table {
    std::map<Nat, Nat> overrides;  // finite patch
    FunPtr fallback;
  };

  using Node = std::variant<Const, Id, Succ, Proj0, Proj1, PairOf, Compose,
                            Double, DoublePlus1, Half, Mod, Add, Mul, IfLess,
                            Table>;
  Node node;
};

namespace fn {

inline FunPtr make(FunExpr::Node n) {
  return std::make_shared<const FunExpr>(FunExpr{std::move(n)});
}

inline FunPtr constant(Nat c) { return make(FunExpr::Const{c}); }
inline FunPtr id() { return make(FunExpr::Id{}); }
inline FunPtr succ() { return make(FunExpr::Succ{}); }
inline FunPtr proj0() { return make(FunExpr::Proj0{}); }
inline FunPtr proj1() { return make(FunExpr::Proj1{}); }
inline FunPtr times_two() { return make(FunExpr::Double{}); }
inline FunPtr times_two_plus_one() { return make(FunExpr::DoublePlus1{}); }
inline FunPtr half() { return make(FunExpr::Half{}); }

inline FunPtr mod(Nat k) {
  if (k == 0) throw std::invalid_argument("mod needs modulus >= 1");
  return make(FunExpr::Mod{k});
}

inline FunPtr pair(FunPtr first, FunPtr second) {
  return make(FunExpr::PairOf{std::move(first), std::move(second)});
}
inline FunPtr compose(FunPtr outer, FunPtr inner) {
  return make(FunExpr::Compose{std::move(outer), std::move(inner)});
}
inline FunPtr add(FunPtr lhs, FunPtr rhs) {
  return make(FunExpr::Add{std::move(lhs), std::move(rhs)});
}
inline FunPtr mul(FunPtr lhs, FunPtr rhs) {
  return make(FunExpr::Mul{std::move(lhs), std::move(rhs)});
}
inline FunPtr if_less(FunPtr probe, FunPtr bound, FunPtr then_branch,
                      FunPtr else_branch) {
  return make(FunExpr::IfLess{std::move(probe), std::move(bound),
                              std::move(then_branch), std::move(else_branch)});
}
inline FunPtr table(std::map<Nat, Nat> overrides, FunPtr fallback) {
  return make(FunExpr::Table{std::move(overrides), std::move(fallback)});
}

}  // namespace fn

/// Evaluate a term at a point. Pure; overflow of the host integer width
/// raises OverflowError rather than wrapping.
inline Nat eval(const FunExpr& e, Nat x) {
  return std::visit(
      detail::Overload{
          [&](const FunExpr::Const& c) -> Nat { return c.value; },
          [&](const FunExpr::Id&) -> Nat { return x; },
          [&](const FunExpr::Succ&) -> Nat { return checked_add(x, 1); },
          [&](const FunExpr::Proj0&) -> Nat { return cantor_proj(x).first; },
          [&](const FunExpr::Proj1&) -> Nat { return cantor_proj(x).second; },
          [&](const FunExpr::PairOf& p) -> Nat {
            return cantor_pair(eval(*p.first, x), eval(*p.second, x));
          },
          [&](const FunExpr::Compose& c) -> Nat {
            return eval(*c.outer, eval(*c.inner, x));
          },
          [&](const FunExpr::Double&) -> Nat { return checked_mul(x, 2); },
          [&](const FunExpr::DoublePlus1&) -> Nat {
            return checked_add(checked_mul(x, 2), 1);
          },
          [&](const FunExpr::Half&) -> Nat { return x / 2; },
          [&](const FunExpr::Mod& m) -> Nat { return x % m.modulus; },
          [&](const FunExpr::Add& a) -> Nat {
            return checked_add(eval(*a.lhs, x), eval(*a.rhs, x));
          },
          [&](const FunExpr::Mul& m) -> Nat {
            return checked_mul(eval(*m.lhs, x), eval(*m.rhs, x));
          },
          [&](const FunExpr::IfLess& i) -> Nat {
            return eval(*i.probe, x) < eval(*i.bound, x)
                       ? eval(*i.then_branch, x)
                       : eval(*i.else_branch, x);
          },
          [&](const FunExpr::Table& t) -> Nat {
            auto it = t.overrides.find(x);
            return it != t.overrides.end() ? it->second : eval(*t.fallback, x);
          }},
      e.node);
}

inline Nat eval(const FunPtr& e, Nat x) { return eval(*e, x); }

namespace detail {

inline void print_to(const FunExpr& e, std::ostream& os) {
  std::visit(
      Overload{
          [&](const FunExpr::Const& c) { os << "const " << c.value; },
          [&](const FunExpr::Id&) { os << "id"; },
          [&](const FunExpr::Succ&) { os << "succ"; },
          [&](const FunExpr::Proj0&) { os << "proj0"; },
          [&](const FunExpr::Proj1&) { os << "proj1"; },
          [&](const FunExpr::Double&) { os << "double"; },
          [&](const FunExpr::DoublePlus1&) { os << "odd1"; },
          [&](const FunExpr::Half&) { os << "half"; },
          [&](const FunExpr::Mod& m) { os << "mod " << m.modulus; },
          [&](const FunExpr::PairOf& p) {
            os << "pair(";
            print_to(*p.first, os);
            os << ", ";
            print_to(*p.second, os);
            os << ")";
          },
          [&](const FunExpr::Compose& c) {
            os << "compose(";
            print_to(*c.outer, os);
            os << ", ";
            print_to(*c.inner, os);
            os << ")";
          },
          [&](const FunExpr::Add& a) {
            os << "add(";
            print_to(*a.lhs, os);
            os << ", ";
            print_to(*a.rhs, os);
            os << ")";
          },
          [&](const FunExpr::Mul& m) {
            os << "mul(";
            print_to(*m.lhs, os);
            os << ", ";
            print_to(*m.rhs, os);
            os << ")";
          },
          [&](const FunExpr::IfLess& i) {
            os << "ifless(";
            print_to(*i.probe, os);
            os << ", ";
            print_to(*i.bound, os);
            os << ", ";
            print_to(*i.then_branch, os);
            os << ", ";
            print_to(*i.else_branch, os);
            os << ")";
          },
          [&](const FunExpr::Table& t) {
            os << "table{";
            bool first = true;
            for (const auto& [k, v] : t.overrides) {
              if (!first) os << ", ";
              os << k << "->" << v;
              first = false;
            }
            os << "} else ";
            print_to(*t.fallback, os);
          }},
      e.node);
}

}  // namespace detail

/// Render a term in the concrete grammar; the output re-parses to an
/// extensionally equal term.
inline std::string print(const FunExpr& e) {
  std::ostringstream os;
  detail::print_to(e, os);
  return os.str();
}

inline std::string print(const FunPtr& e) { return print(*e); }

/// Structural equality. The printer is injective over terms, so textual
/// equality of prints coincides with tree equality.
inline bool fun_equal(const FunExpr& a, const FunExpr& b) {
  return print(a) == print(b);
}

inline bool fun_equal(const FunPtr& a, const FunPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  return fun_equal(*a, *b);
}

// ---------------------------------------------------------------------------
// Concrete syntax
//
//   expr := "id" | "succ" | "double" | "odd1" | "half" | "proj0" | "proj1"
//         | "const" NAT | "mod" NAT
//         | "pair(" expr "," expr ")" | "compose(" expr "," expr ")"
//         | "add(" expr "," expr ")" | "mul(" expr "," expr ")"
//         | "ifless(" expr "," expr "," expr "," expr ")"
//         | "table{" (NAT "->" NAT)* "}" "else" expr
//
// Keywords are case-insensitive; whitespace is free between tokens; table
// entries may optionally be separated by commas.
// ---------------------------------------------------------------------------

namespace detail {

struct FunToken {
  enum class Kind { Word, Number, LParen, RParen, Comma, LBrace, RBrace, Arrow, End };
  Kind kind = Kind::End;
  std::string word;
  Nat number = 0;
  std::size_t line = 1;
  std::size_t col = 1;
};

class FunLexer {
public:
  explicit FunLexer(const std::string& text, std::size_t pos = 0)
      : text_(text), pos_(pos), token_end_(pos), consumed_end_(pos) {
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) bump(text_[i]);
    advance();
  }

  const FunToken& peek() const { return current_; }

  FunToken take() {
    FunToken t = current_;
    advance();
    return t;
  }

  // Offset of the first character not consumed by accepted tokens.
  std::size_t consumed_end() const { return consumed_end_; }

private:
  void bump(char c) {
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
  }

  void advance() {
    consumed_end_ = token_end_;
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      bump(text_[pos_]);
      ++pos_;
    }
    current_ = FunToken{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = FunToken::Kind::End;
      token_end_ = pos_;
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Nat value = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        Nat digit = static_cast<Nat>(text_[pos_] - '0');
        if (value > (UINT64_MAX - digit) / 10)
          throw ParseError(line_, col_, "number too large");
        value = value * 10 + digit;
        bump(text_[pos_]);
        ++pos_;
      }
      current_.kind = FunToken::Kind::Number;
      current_.number = value;
      token_end_ = pos_;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])))) {
        word.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(text_[pos_]))));
        bump(text_[pos_]);
        ++pos_;
      }
      current_.kind = FunToken::Kind::Word;
      current_.word = std::move(word);
      token_end_ = pos_;
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      current_.kind = FunToken::Kind::Arrow;
      bump(text_[pos_]);
      bump(text_[pos_ + 1]);
      pos_ += 2;
      token_end_ = pos_;
      return;
    }
    switch (c) {
      case '(': current_.kind = FunToken::Kind::LParen; break;
      case ')': current_.kind = FunToken::Kind::RParen; break;
      case ',': current_.kind = FunToken::Kind::Comma; break;
      case '{': current_.kind = FunToken::Kind::LBrace; break;
      case '}': current_.kind = FunToken::Kind::RBrace; break;
      default:
        throw ParseError(line_, col_,
                         std::string("unexpected character '") + c + "'");
    }
    bump(c);
    ++pos_;
    token_end_ = pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t token_end_ = 0;
  std::size_t consumed_end_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  FunToken current_;
};

class FunParser {
public:
  explicit FunParser(FunLexer& lex) : lex_(lex) {}

  FunPtr parse_expr() {
    FunToken t = lex_.take();
    if (t.kind == FunToken::Kind::Number)
      throw ParseError(t.line, t.col, "expected a function keyword");
    if (t.kind != FunToken::Kind::Word)
      throw ParseError(t.line, t.col, "expected a function expression");

    const std::string& w = t.word;
    if (w == "id") return fn::id();
    if (w == "succ") return fn::succ();
    if (w == "double") return fn::times_two();
    if (w == "odd1") return fn::times_two_plus_one();
    if (w == "half") return fn::half();
    if (w == "proj0") return fn::proj0();
    if (w == "proj1") return fn::proj1();
    if (w == "const") return fn::constant(expect_number());
    if (w == "mod") {
      FunToken num = lex_.peek();
      Nat k = expect_number();
      if (k == 0) throw ParseError(num.line, num.col, "mod needs modulus >= 1");
      return fn::mod(k);
    }
    if (w == "pair") {
      auto [a, b] = parse_two_args();
      return fn::pair(a, b);
    }
    if (w == "compose") {
      auto [a, b] = parse_two_args();
      return fn::compose(a, b);
    }
    if (w == "add") {
      auto [a, b] = parse_two_args();
      return fn::add(a, b);
    }
    if (w == "mul") {
      auto [a, b] = parse_two_args();
      return fn::mul(a, b);
    }
    if (w == "ifless") {
      expect(FunToken::Kind::LParen, "'('");
      FunPtr probe = parse_expr();
      expect(FunToken::Kind::Comma, "','");
      FunPtr bound = parse_expr();
      expect(FunToken::Kind::Comma, "','");
      FunPtr then_branch = parse_expr();
      expect(FunToken::Kind::Comma, "','");
      FunPtr else_branch = parse_expr();
      expect(FunToken::Kind::RParen, "')'");
      return fn::if_less(probe, bound, then_branch, else_branch);
    }
    if (w == "table") return parse_table();
    throw ParseError(t.line, t.col, "unknown function '" + w + "'");
  }

private:
  std::pair<FunPtr, FunPtr> parse_two_args() {
    expect(FunToken::Kind::LParen, "'('");
    FunPtr a = parse_expr();
    expect(FunToken::Kind::Comma, "','");
    FunPtr b = parse_expr();
    expect(FunToken::Kind::RParen, "')'");
    return {a, b};
  }

  FunPtr parse_table() {
    expect(FunToken::Kind::LBrace, "'{'");
    std::map<Nat, Nat> overrides;
    while (lex_.peek().kind != FunToken::Kind::RBrace) {
      if (lex_.peek().kind == FunToken::Kind::Comma) {
        lex_.take();
        continue;
      }
      FunToken key = lex_.peek();
      Nat k = expect_number();
      expect(FunToken::Kind::Arrow, "'->'");
      Nat v = expect_number();
      if (!overrides.emplace(k, v).second)
        throw ParseError(key.line, key.col, "duplicate table key");
    }
    lex_.take();  // '}'
    FunToken kw = lex_.take();
    if (kw.kind != FunToken::Kind::Word || kw.word != "else")
      throw ParseError(kw.line, kw.col, "expected 'else' after table");
    return fn::table(std::move(overrides), parse_expr());
  }

  Nat expect_number() {
    FunToken t = lex_.take();
    if (t.kind != FunToken::Kind::Number)
      throw ParseError(t.line, t.col, "expected a number");
    return t.number;
  }

  void expect(FunToken::Kind kind, const char* what) {
    FunToken t = lex_.take();
    if (t.kind != kind)
      throw ParseError(t.line, t.col, std::string("expected ") + what);
  }

  FunLexer& lex_;
};

}  // namespace detail

/// Parse one expression starting at text[pos]; pos advances past it.
inline FunPtr parse_fun_at(const std::string& text, std::size_t& pos) {
  detail::FunLexer lex(text, pos);
  detail::FunParser parser(lex);
  FunPtr result = parser.parse_expr();
  pos = lex.consumed_end();
  return result;
}

/// Parse a whole string as a single expression.
inline FunPtr parse_fun(const std::string& text) {
  detail::FunLexer lex(text);
  detail::FunParser parser(lex);
  FunPtr result = parser.parse_expr();
  const detail::FunToken& rest = lex.peek();
  if (rest.kind != detail::FunToken::Kind::End)
    throw ParseError(rest.line, rest.col, "trailing input after expression");
  return result;
}

}  // namespace eeq
