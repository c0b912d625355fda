#include "lexrsm/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace lexrsm {

namespace {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

const std::set<std::string> kKeywords = {
    "while", "do",   "od",   "if",   "then", "else",      "fi",  "skip",
    "prob",  "star", "and",  "true", "sample", "ndet",    "unif", "norm",
    "invariant"};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') { ++line; col = 1; }
      else ++col;
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      size_t j = i;
      while (j < text.size() && text[j] != '\n') ++j;
      advance(j - i);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      t.kind = Tok::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j])))
          throw ParseError("digits expected after decimal point", line, col);
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
          ++j;
      }
      t.kind = Tok::Number;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else {
      static const char* two[] = {":=", "<=", ">=", "==", "!="};
      std::string sym(1, c);
      for (const char* s : two)
        if (text.compare(i, 2, s) == 0) { sym = s; break; }
      if (sym.size() == 1 && std::string("();,<>=+-*/@").find(c) == std::string::npos)
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      t.kind = Tok::Symbol;
      t.text = sym;
      advance(sym.size());
    }
    out.push_back(std::move(t));
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  StmtPtr program() {
    StmtPtr s = stmt_seq();
    expect_end();
    return s;
  }

  BExpr bexpr_only() {
    BExpr b = bexpr();
    expect_end();
    return b;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t j = pos_ + ahead;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.col);
  }
  bool at_symbol(const std::string& s) const {
    return peek().kind == Tok::Symbol && peek().text == s;
  }
  bool at_keyword(const std::string& s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) fail("expected '" + s + "'");
    next();
  }
  void expect_keyword(const std::string& s) {
    if (!at_keyword(s)) fail("expected '" + s + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("trailing input");
  }

  StmtPtr stmt_seq() {
    StmtPtr first = stmt();
    if (!at_symbol(";")) return first;
    next();
    StmtPtr rest = stmt_seq();
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Seq;
    s->line = first->line;
    s->a = std::move(first);
    s->b = std::move(rest);
    return s;
  }

  StmtPtr stmt() {
    const Token& t = peek();
    if (at_keyword("skip")) {
      next();
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Skip;
      s->line = t.line;
      return s;
    }
    if (at_keyword("if")) return if_stmt();
    if (at_keyword("while")) return while_stmt();
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) return assign();
    fail("statement expected");
  }

  StmtPtr assign() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->line = peek().line;
    s->var = next().text;
    expect_symbol(":=");
    s->rhs = rhs();
    return s;
  }

  StmtPtr if_stmt() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    s->line = peek().line;
    expect_keyword("if");
    if (at_keyword("star")) {
      next();
      s->ckind = CondKind::Star;
    } else if (at_keyword("prob")) {
      const Token& pt = peek();
      next();
      expect_symbol("(");
      s->ckind = CondKind::Prob;
      s->prob = number();
      if (s->prob < 0 || s->prob > 1)
        throw ParseError("probability outside [0,1]", pt.line, pt.col);
      expect_symbol(")");
    } else {
      s->ckind = CondKind::Boolean;
      s->cond = bexpr();
    }
    expect_keyword("then");
    s->a = stmt_seq();
    if (at_keyword("else")) {
      next();
      s->b = stmt_seq();
    }
    expect_keyword("fi");
    return s;
  }

  StmtPtr while_stmt() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::While;
    s->line = peek().line;
    expect_keyword("while");
    s->ckind = CondKind::Boolean;
    s->cond = bexpr();
    if (at_symbol("@")) {
      next();
      expect_keyword("invariant");
      expect_symbol("(");
      s->annotation = bexpr();
      expect_symbol(")");
    }
    expect_keyword("do");
    s->a = stmt_seq();
    expect_keyword("od");
    return s;
  }

  BExpr bexpr() {
    BExpr b;
    if (at_keyword("true")) {
      next();
      return b;
    }
    b.atoms.push_back(atom());
    while (at_keyword("and")) {
      next();
      b.atoms.push_back(atom());
    }
    return b;
  }

  Comparison atom() {
    Comparison c;
    c.lhs = sum(false, nullptr);
    if (peek().kind != Tok::Symbol) fail("comparison operator expected");
    std::string op = peek().text;
    if (op == "<") c.op = CmpOp::Lt;
    else if (op == "<=") c.op = CmpOp::Le;
    else if (op == ">") c.op = CmpOp::Gt;
    else if (op == ">=") c.op = CmpOp::Ge;
    else if (op == "=" || op == "==") c.op = CmpOp::Eq;
    else if (op == "!=") c.op = CmpOp::Ne;
    else fail("comparison operator expected");
    next();
    c.rhs = sum(false, nullptr);
    return c;
  }

  Rational number() {
    bool neg = false;
    if (at_symbol("-")) { next(); neg = true; }
    if (peek().kind != Tok::Number) fail("number expected");
    std::string text = next().text;
    if (at_symbol("/")) {
      next();
      if (peek().kind != Tok::Number) fail("denominator expected");
      text += "/" + next().text;
    }
    Rational r = parse_rational(text);
    return neg ? Rational(-r) : r;
  }

  struct Special {
    enum class Kind { None, Sample, Ndet } kind = Kind::None;
    Distribution dist;
    Rational lo, hi;
  };

  // sum := ['-'] term (('+'|'-') term)*, each term folded into acc; at most
  // one sample/ndet addend when sp is non-null, required coefficient +1.
  LinExpr sum(bool allow_special, Special* sp) {
    LinExpr acc;
    bool first = true;
    for (;;) {
      int sign = 1;
      if (at_symbol("-")) { next(); sign = -1; }
      else if (at_symbol("+")) { next(); }
      else if (!first) break;
      term(acc, sign, allow_special ? sp : nullptr);
      first = false;
      if (!at_symbol("+") && !at_symbol("-")) break;
    }
    return acc;
  }

  void term(LinExpr& acc, int sign, Special* sp) {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      Rational k = number();
      if (sign < 0) k = -k;
      if (at_symbol("*")) {
        next();
        if (peek().kind != Tok::Ident || kKeywords.count(peek().text))
          fail("variable expected after '*'");
        acc += LinExpr::var(next().text, k);
        reject_products();
      } else {
        acc += LinExpr(k);
      }
      return;
    }
    if (t.kind == Tok::Ident && (t.text == "sample" || t.text == "ndet")) {
      if (!sp) fail("'" + t.text + "' is only allowed on an assignment right-hand side");
      if (sp->kind != Special::Kind::None)
        fail("at most one sample/ndet per assignment");
      if (sign < 0)
        fail("sample/ndet must appear with coefficient +1");
      if (t.text == "sample") {
        next();
        expect_symbol("(");
        sp->kind = Special::Kind::Sample;
        sp->dist = dist();
        expect_symbol(")");
      } else {
        next();
        expect_symbol("(");
        sp->kind = Special::Kind::Ndet;
        const Token& at = peek();
        sp->lo = number();
        expect_symbol(",");
        sp->hi = number();
        expect_symbol(")");
        if (sp->lo > sp->hi)
          throw ParseError("ndet interval has lo > hi", at.line, at.col);
      }
      return;
    }
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      acc += LinExpr::var(next().text, Rational(sign));
      reject_products();
      return;
    }
    if (at_symbol("(")) {
      next();
      LinExpr inner = sum(false, nullptr);
      expect_symbol(")");
      if (sign < 0) inner *= Rational(-1);
      acc += inner;
      reject_products();
      return;
    }
    fail("expression expected");
  }

  void reject_products() {
    if (at_symbol("*"))
      fail("products of variables are not linear; write k*x with a constant k");
  }

  Distribution dist() {
    if (at_keyword("unif")) {
      const Token& at = peek();
      next();
      expect_symbol("(");
      Rational lo = number();
      expect_symbol(",");
      Rational hi = number();
      expect_symbol(")");
      if (lo > hi) throw ParseError("unif interval has lo > hi", at.line, at.col);
      return Distribution::uniform(lo, hi);
    }
    if (at_keyword("norm")) {
      const Token& at = peek();
      next();
      expect_symbol("(");
      Rational mean = number();
      expect_symbol(",");
      Rational sd = number();
      expect_symbol(")");
      if (sd <= 0) throw ParseError("norm needs a positive stddev", at.line, at.col);
      return Distribution::normal(mean, sd);
    }
    fail("'unif' or 'norm' expected");
  }

  UpdateElem rhs() {
    Special sp;
    LinExpr shift = sum(true, &sp);
    switch (sp.kind) {
      case Special::Kind::None: return UpdateElem::det(shift);
      case Special::Kind::Sample: return UpdateElem::sample(sp.dist, shift);
      case Special::Kind::Ndet: return UpdateElem::ndet(sp.lo, sp.hi, shift);
    }
    return UpdateElem::det(shift);
  }
};

std::string cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

}  // namespace

std::string Comparison::str() const {
  return lhs.str() + " " + cmp_str(op) + " " + rhs.str();
}

std::string BExpr::str() const {
  if (atoms.empty()) return "true";
  std::string s = atoms[0].str();
  for (size_t i = 1; i < atoms.size(); ++i) s += " and " + atoms[i].str();
  return s;
}

std::string print_program(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Skip: return "skip";
    case Stmt::Kind::Assign: return s.var + " := " + s.rhs.str();
    case Stmt::Kind::Seq:
      return print_program(*s.a) + "; " + print_program(*s.b);
    case Stmt::Kind::If: {
      std::string cond = s.ckind == CondKind::Star ? "star"
                         : s.ckind == CondKind::Prob
                             ? "prob(" + rat_str(s.prob) + ")"
                             : s.cond.str();
      std::string out = "if " + cond + " then " + print_program(*s.a);
      if (s.b) out += " else " + print_program(*s.b);
      return out + " fi";
    }
    case Stmt::Kind::While: {
      std::string out = "while " + s.cond.str();
      if (s.annotation) out += " @invariant(" + s.annotation->str() + ")";
      return out + " do " + print_program(*s.a) + " od";
    }
  }
  return "";
}

StmtPtr parse_program(const std::string& text) {
  return Parser(text).program();
}

BExpr parse_bexpr_text(const std::string& text) {
  return Parser(text).bexpr_only();
}

}  // namespace lexrsm
