#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eeq/constructions.hpp"
#include "eeq/relation.hpp"

namespace eeq {

// Line-oriented file formats. '#' starts a comment; blank lines are skipped.
//
//   rel NAME = id | idn NAT | frompairs [ (a,b)@s, ... ] | funrange FUNEXPR
//            | product NAME NAME | coproduct NAME NAME
//            | coeq NAME FUNEXPR FUNEXPR | closure NAME [ (a,b), ... ]
//            | coceer seed=[ [..],[..] ] trace=FILE
//
// Stage traces hold one event per line:
//   merge x y @s | isolate x @s | enumU x @s
//
// Families open with "family E=<k> horizon=<h>" and then hold
//   keep e x | extract e x @s
//
// K-enumerations open with "kbar horizon=<h>" and then hold
//   enum x @s

namespace detail {

// Cursor over one logical line.
class LineCursor {
public:
  LineCursor(const std::string& text, std::size_t line_no)
      : text_(text), line_(line_no) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a word");
    return text_.substr(start, pos_ - start);
  }

  std::string keyword() {
    std::string w = word();
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return w;
  }

  Nat number() {
    skip_ws();
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected a number");
    Nat value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      Nat digit = static_cast<Nat>(text_[pos_] - '0');
      if (value > (UINT64_MAX - digit) / 10) fail("number too large");
      value = value * 10 + digit;
      ++pos_;
    }
    return value;
  }

  // Remainder of the line from the current position (trimmed on the left).
  std::string rest() {
    skip_ws();
    return text_.substr(pos_);
  }

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }
  std::size_t line_no() const { return line_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, pos_ + 1, msg);
  }

  FunPtr fun_expr() {
    skip_ws();
    std::size_t p = pos_;
    try {
      FunPtr f = parse_fun_at(text_, p);
      pos_ = p;
      return f;
    } catch (const ParseError& e) {
      throw ParseError(line_, e.column(), e.what());
    }
  }

private:
  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

inline std::vector<std::pair<std::string, std::size_t>> logical_lines(
    const std::string& text) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    if (!blank) out.emplace_back(line, no);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stage traces
// ---------------------------------------------------------------------------

inline StageTrace parse_trace_text(const std::string& text) {
  StageTrace trace;
  for (const auto& [line, no] : detail::logical_lines(text)) {
    detail::LineCursor cur(line, no);
    std::string kw = cur.keyword();
    StageEvent ev;
    if (kw == "merge") {
      ev.kind = StageEvent::Kind::Merge;
      ev.x = cur.number();
      ev.y = cur.number();
    } else if (kw == "isolate") {
      ev.kind = StageEvent::Kind::Isolate;
      ev.x = cur.number();
    } else if (kw == "enumu") {
      ev.kind = StageEvent::Kind::EnumU;
      ev.x = cur.number();
    } else {
      cur.fail("unknown trace event '" + kw + "'");
    }
    cur.expect('@');
    ev.stage = cur.number();
    if (!cur.at_end()) cur.fail("trailing input after event");
    trace.events.push_back(ev);
  }
  trace.validate();
  return trace;
}

inline std::string trace_to_text(const StageTrace& trace) {
  std::ostringstream os;
  for (const auto& ev : trace.events) {
    switch (ev.kind) {
      case StageEvent::Kind::Merge:
        os << "merge " << ev.x << " " << ev.y;
        break;
      case StageEvent::Kind::Isolate:
        os << "isolate " << ev.x;
        break;
      case StageEvent::Kind::EnumU:
        os << "enumU " << ev.x;
        break;
    }
    os << " @" << ev.stage << "\n";
  }
  return os.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline StageTrace load_trace(const std::filesystem::path& path) {
  return parse_trace_text(read_file(path));
}

// ---------------------------------------------------------------------------
// Relation spec files
// ---------------------------------------------------------------------------

struct RelFile {
  std::vector<std::pair<std::string, RelPtr>> entries;  // definition order

  RelPtr find(const std::string& name) const {
    for (const auto& [n, spec] : entries)
      if (n == name) return spec;
    return nullptr;
  }
};

namespace detail {

inline std::vector<PairSource::StampedPair> parse_stamped_pairs(LineCursor& cur) {
  std::vector<PairSource::StampedPair> pairs;
  cur.expect('[');
  while (!cur.try_consume(']')) {
    if (cur.try_consume(',')) continue;
    cur.expect('(');
    PairSource::StampedPair p;
    p.a = cur.number();
    cur.expect(',');
    p.b = cur.number();
    cur.expect(')');
    cur.expect('@');
    p.stage = cur.number();
    pairs.push_back(p);
  }
  return pairs;
}

inline std::vector<std::pair<Nat, Nat>> parse_plain_pairs(LineCursor& cur) {
  std::vector<std::pair<Nat, Nat>> pairs;
  cur.expect('[');
  while (!cur.try_consume(']')) {
    if (cur.try_consume(',')) continue;
    cur.expect('(');
    Nat a = cur.number();
    cur.expect(',');
    Nat b = cur.number();
    cur.expect(')');
    pairs.emplace_back(a, b);
  }
  return pairs;
}

inline std::vector<std::vector<Nat>> parse_seed_classes(LineCursor& cur) {
  std::vector<std::vector<Nat>> classes;
  cur.expect('[');
  while (!cur.try_consume(']')) {
    if (cur.try_consume(',')) continue;
    cur.expect('[');
    std::vector<Nat> cls;
    while (!cur.try_consume(']')) {
      if (cur.try_consume(',')) continue;
      cls.push_back(cur.number());
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

}  // namespace detail

inline RelFile parse_rel_file(const std::string& text,
                              const std::filesystem::path& base_dir = ".") {
  RelFile file;
  for (const auto& [line, no] : detail::logical_lines(text)) {
    detail::LineCursor cur(line, no);
    std::string kw = cur.keyword();
    if (kw != "rel") cur.fail("expected 'rel'");
    std::string name = cur.word();
    if (file.find(name)) cur.fail("relation '" + name + "' already defined");
    cur.expect('=');
    std::string kind = cur.keyword();
    RelPtr spec;
    auto lookup = [&](const std::string& ref) {
      RelPtr found = file.find(ref);
      if (!found) cur.fail("unknown relation name '" + ref + "'");
      return found;
    };
    try {
      if (kind == "id") {
        spec = rel::id_all();
      } else if (kind == "idn") {
        Nat k = cur.number();
        if (k == 0) cur.fail("idn needs classes >= 1");
        spec = rel::id_n(k);
      } else if (kind == "frompairs") {
        spec = rel::from_pairs(
            PairSource{PairSource::ExplicitList{detail::parse_stamped_pairs(cur)}});
      } else if (kind == "funrange") {
        spec = rel::from_pairs(PairSource{PairSource::FunRange{cur.fun_expr()}});
      } else if (kind == "product") {
        RelPtr a = lookup(cur.word());
        RelPtr b = lookup(cur.word());
        spec = rel::product(a, b);
      } else if (kind == "coproduct") {
        RelPtr a = lookup(cur.word());
        RelPtr b = lookup(cur.word());
        spec = rel::coproduct(a, b);
      } else if (kind == "coeq") {
        RelPtr base = lookup(cur.word());
        FunPtr f1 = cur.fun_expr();
        FunPtr f2 = cur.fun_expr();
        spec = rel::coequalizer(base, f1, f2);
      } else if (kind == "closure") {
        RelPtr base = lookup(cur.word());
        spec = rel::closure_of(base, detail::parse_plain_pairs(cur));
      } else if (kind == "coceer") {
        std::string seed_kw = cur.keyword();
        if (seed_kw != "seed") cur.fail("expected 'seed='");
        cur.expect('=');
        auto seeds = detail::parse_seed_classes(cur);
        std::string trace_kw = cur.keyword();
        if (trace_kw != "trace") cur.fail("expected 'trace='");
        cur.expect('=');
        std::string path = cur.rest();
        while (!path.empty() &&
               std::isspace(static_cast<unsigned char>(path.back())))
          path.pop_back();
        if (path.empty()) cur.fail("expected a trace file path");
        StageTrace trace = load_trace(base_dir / path);
        spec = rel::coceer(std::move(seeds), std::move(trace));
        file.entries.emplace_back(name, spec);
        continue;  // rest of line consumed by the path
      } else {
        cur.fail("unknown relation kind '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      cur.fail(e.what());
    }
    if (!cur.at_end()) cur.fail("trailing input after definition");
    file.entries.emplace_back(name, spec);
  }
  return file;
}

inline RelFile load_rel_file(const std::filesystem::path& path) {
  return parse_rel_file(read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Family and K-enumeration files
// ---------------------------------------------------------------------------

inline CoCeFamily parse_family_text(const std::string& text) {
  auto lines = detail::logical_lines(text);
  if (lines.empty()) throw ParseError(1, 1, "empty family file");
  detail::LineCursor head(lines[0].first, lines[0].second);
  if (head.keyword() != "family") head.fail("expected 'family' header");
  if (head.keyword() != "e") head.fail("expected 'E='");
  head.expect('=');
  Nat e_count = head.number();
  if (head.keyword() != "horizon") head.fail("expected 'horizon='");
  head.expect('=');
  Nat horizon = head.number();
  CoCeFamily fam(e_count, horizon);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::LineCursor cur(lines[i].first, lines[i].second);
    std::string kw = cur.keyword();
    if (kw == "keep") {
      Nat e = cur.number();
      Nat x = cur.number();
      fam.add_keep(e, x);
    } else if (kw == "extract") {
      Nat e = cur.number();
      Nat x = cur.number();
      cur.expect('@');
      Nat stage = cur.number();
      fam.add_extract(e, x, stage);
    } else {
      cur.fail("unknown family line '" + kw + "'");
    }
    if (!cur.at_end()) cur.fail("trailing input");
  }
  return fam;
}

inline KbarSurrogate parse_kbar_text(const std::string& text) {
  auto lines = detail::logical_lines(text);
  if (lines.empty()) throw ParseError(1, 1, "empty enumeration file");
  detail::LineCursor head(lines[0].first, lines[0].second);
  if (head.keyword() != "kbar") head.fail("expected 'kbar' header");
  if (head.keyword() != "horizon") head.fail("expected 'horizon='");
  head.expect('=');
  KbarSurrogate k(head.number());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::LineCursor cur(lines[i].first, lines[i].second);
    if (cur.keyword() != "enum") cur.fail("expected 'enum'");
    Nat x = cur.number();
    cur.expect('@');
    Nat stage = cur.number();
    k.add_enumeration(x, stage);
    if (!cur.at_end()) cur.fail("trailing input");
  }
  return k;
}

}  // namespace eeq
