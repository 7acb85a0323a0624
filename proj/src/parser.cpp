#include "ccsr/parser.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "ccsr/errors.hpp"

namespace ccsr {

namespace {

enum class Tok { Ident, Zero, Tau, Tilde, Dot, Bar, Plus, LParen, RParen, Comma, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> tokens;

  explicit Lexer(const std::string& s) : src(s) { run(); }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(line, col, msg); }

  void advance() {
    if (src[pos] == '\n') { ++line; col = 1; } else { ++col; }
    ++pos;
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) { advance(); continue; }
      int tl = line, tc = col;
      auto push = [&](Tok k, std::string t) { tokens.push_back({k, std::move(t), tl, tc}); };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
                src[pos] == '\'')) {
          id += src[pos];
          advance();
        }
        push(id == "tau" ? Tok::Tau : Tok::Ident, id);
        continue;
      }
      switch (c) {
        case '0': push(Tok::Zero, "0"); break;
        case '~': push(Tok::Tilde, "~"); break;
        case '.': push(Tok::Dot, "."); break;
        case '|': push(Tok::Bar, "|"); break;
        case '+': push(Tok::Plus, "+"); break;
        case '(': push(Tok::LParen, "("); break;
        case ')': push(Tok::RParen, ")"); break;
        case ',': push(Tok::Comma, ","); break;
        case '=': push(Tok::Eq, "="); break;
        default: fail(std::string("unexpected character '") + c + "'");
      }
      advance();
    }
    tokens.push_back({Tok::End, "", line, col});
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t at = 0;

  const Token& peek(std::size_t k = 0) const {
    return toks[std::min(at + k, toks.size() - 1)];
  }
  Token take() { return toks[at == toks.size() - 1 ? at : at++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }

  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(peek(), "expected " + what);
    return take();
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> out;
    if (peek().kind == Tok::RParen) return out;
    for (;;) {
      out.push_back(expect(Tok::Ident, "a name").text);
      if (peek().kind != Tok::Comma) break;
      take();
    }
    return out;
  }

  // factor := 0 | action.factor | Name(names) | (x) factor | (process)
  Process factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Zero:
        take();
        return Process::nil();
      case Tok::Tau: {
        take();
        expect(Tok::Dot, "'.' after action");
        return Process::prefix(Action::tau(), factor());
      }
      case Tok::Tilde: {
        take();
        std::string ch = expect(Tok::Ident, "a channel name after '~'").text;
        expect(Tok::Dot, "'.' after action");
        return Process::prefix(Action::out(ch), factor());
      }
      case Tok::Ident: {
        std::string id = take().text;
        if (peek().kind == Tok::Dot) {
          take();
          return Process::prefix(Action::in(id), factor());
        }
        if (peek().kind == Tok::LParen) {
          take();
          auto args = name_list();
          expect(Tok::RParen, "')'");
          return Process::call(id, std::move(args));
        }
        fail(peek(), "expected '.' or '(' after name '" + id + "'");
      }
      case Tok::LParen: {
        // `(x) p` is a restriction; `(expr)` is grouping. A bare name is
        // not a process, so IDENT followed by ')' always means restriction.
        if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::RParen) {
          take();
          std::string ch = take().text;
          take();
          return Process::res(ch, factor());
        }
        take();
        Process inner = process();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(t, "expected a process");
    }
  }

  // Right-nested, so printing without redundant parentheses re-parses to
  // the identical tree.
  Process sum() {
    Process l = factor();
    if (peek().kind != Tok::Plus) return l;
    take();
    return Process::sum(std::move(l), sum());
  }

  Process process() {
    Process l = sum();
    if (peek().kind != Tok::Bar) return l;
    take();
    return Process::par(std::move(l), process());
  }

  bool at_definition() const {
    // Name ( names ) =
    if (peek().kind != Tok::Ident || peek(1).kind != Tok::LParen) return false;
    std::size_t k = 2;
    while (peek(k).kind == Tok::Ident || peek(k).kind == Tok::Comma) ++k;
    return peek(k).kind == Tok::RParen && peek(k + 1).kind == Tok::Eq;
  }

  Parsed file() {
    Parsed out;
    bool have_main = false;
    while (peek().kind != Tok::End) {
      if (at_definition()) {
        Token name = take();
        take();  // (
        auto formals = name_list();
        expect(Tok::RParen, "')'");
        expect(Tok::Eq, "'='");
        Process body = process();
        if (out.env.count(name.text))
          fail(name, "duplicate definition '" + name.text + "'");
        out.env[name.text] = Def{std::move(formals), std::move(body)};
      } else {
        const Token& t = peek();
        if (have_main) fail(t, "multiple main process expressions");
        out.main = process();
        have_main = true;
      }
    }
    if (!have_main) fail(peek(), "missing main process expression");
    return out;
  }
};

}  // namespace

Parsed parse(const std::string& text) {
  Lexer lex(text);
  Parser p{std::move(lex.tokens)};
  Parsed out = p.file();
  check_wellformed(out.main, out.env);
  return out;
}

Process parse_process(const std::string& text) {
  Parsed p = parse(text);
  if (!p.env.empty()) throw ValidationError("unexpected definitions in process expression");
  return p.main;
}

Action parse_action_text(const std::string& text) {
  std::string t = text;
  if (t == "tau") return Action::tau();
  bool out = false;
  if (!t.empty() && t[0] == '~') {
    out = true;
    t = t.substr(1);
  }
  if (t.empty()) throw ValidationError("empty action name");
  for (char c : t)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'')
      throw ValidationError("bad action name '" + text + "'");
  return out ? Action::out(t) : Action::in(t);
}

ObsSet parse_obs(const std::string& csv) {
  ObsSet k;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      k.insert(parse_action_text(cur));
      cur.clear();
    }
  };
  for (char c : csv) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return k;
}

}  // namespace ccsr
