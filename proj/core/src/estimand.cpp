#include "dofuse/estimand.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace dofuse {

std::string base_name(const std::string& v) {
  size_t end = v.size();
  while (end > 0 && v[end - 1] == '\'') --end;
  return v.substr(0, end);
}

VertexSet base_names(const VertexSet& s) {
  VertexSet out;
  for (const auto& v : s) out.insert(base_name(v));
  return out;
}

VertexSet ProbTerm::variables() const {
  VertexSet out = outcomes;
  out.insert(conditions.begin(), conditions.end());
  out.insert(do_set.begin(), do_set.end());
  return out;
}

ExprPtr make_term(ProbTerm t) {
  if (t.outcomes.empty())
    throw EstimandError("EmptyOutcomes", "probability term needs an outcome");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Term;
  e->term = std::move(t);
  return e;
}

ExprPtr make_sum(VertexSet bound, ExprPtr body) {
  if (bound.empty()) return body;
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Sum;
  e->bound = std::move(bound);
  e->body = std::move(body);
  return e;
}

ExprPtr make_product(std::vector<ExprPtr> factors) {
  if (factors.size() == 1) return factors.front();
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Product;
  e->factors = std::move(factors);
  return e;
}

ExprPtr make_quotient(ExprPtr numerator, ExprPtr denominator) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Quotient;
  e->numerator = std::move(numerator);
  e->denominator = std::move(denominator);
  return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Term:
      return a->term == b->term;
    case Expr::Kind::Sum:
      return a->bound == b->bound && expr_equal(a->body, b->body);
    case Expr::Kind::Product:
      if (a->factors.size() != b->factors.size()) return false;
      for (size_t i = 0; i < a->factors.size(); ++i)
        if (!expr_equal(a->factors[i], b->factors[i])) return false;
      return true;
    case Expr::Kind::Quotient:
      return expr_equal(a->numerator, b->numerator) &&
             expr_equal(a->denominator, b->denominator);
  }
  return false;
}

VertexSet free_variables(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Term:
      return e->term.variables();
    case Expr::Kind::Sum: {
      VertexSet out = free_variables(e->body);
      for (const auto& b : e->bound) out.erase(b);
      return out;
    }
    case Expr::Kind::Product: {
      VertexSet out;
      for (const auto& f : e->factors) {
        auto fv = free_variables(f);
        out.insert(fv.begin(), fv.end());
      }
      return out;
    }
    case Expr::Kind::Quotient: {
      VertexSet out = free_variables(e->numerator);
      auto dv = free_variables(e->denominator);
      out.insert(dv.begin(), dv.end());
      return out;
    }
  }
  return {};
}

std::vector<ProbTerm> collect_terms(const ExprPtr& e) {
  std::vector<ProbTerm> out;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
    switch (x->kind) {
      case Expr::Kind::Term:
        out.push_back(x->term);
        break;
      case Expr::Kind::Sum:
        walk(x->body);
        break;
      case Expr::Kind::Product:
        for (const auto& f : x->factors) walk(f);
        break;
      case Expr::Kind::Quotient:
        walk(x->numerator);
        walk(x->denominator);
        break;
    }
  };
  walk(e);
  return out;
}

std::set<std::string> domains_mentioned(const ExprPtr& e) {
  std::set<std::string> out;
  for (const auto& t : collect_terms(e)) out.insert(t.domain);
  return out;
}

namespace {

VertexSet rename_set(const VertexSet& s,
                     const std::map<std::string, std::string>& m) {
  VertexSet out;
  for (const auto& v : s) {
    auto it = m.find(v);
    out.insert(it == m.end() ? v : it->second);
  }
  return out;
}

// Capture-avoiding rename of free occurrences.
ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, std::string>& m) {
  if (m.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::Term: {
      ProbTerm t = e->term;
      t.outcomes = rename_set(t.outcomes, m);
      t.conditions = rename_set(t.conditions, m);
      t.do_set = rename_set(t.do_set, m);
      return make_term(std::move(t));
    }
    case Expr::Kind::Sum: {
      auto inner = m;
      for (const auto& b : e->bound) inner.erase(b);
      return make_sum(e->bound, substitute(e->body, inner));
    }
    case Expr::Kind::Product: {
      std::vector<ExprPtr> fs;
      fs.reserve(e->factors.size());
      for (const auto& f : e->factors) fs.push_back(substitute(f, m));
      return make_product(std::move(fs));
    }
    case Expr::Kind::Quotient:
      return make_quotient(substitute(e->numerator, m),
                           substitute(e->denominator, m));
  }
  return e;
}

std::string fresh_name(std::string candidate, const VertexSet& avoid) {
  while (avoid.count(candidate)) candidate += '\'';
  return candidate;
}

// Structural pass: flatten products, hoist sums above products (never out
// of a quotient), merge nested sums, drop vacuous binders.
ExprPtr structure(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Term:
      return e;
    case Expr::Kind::Sum: {
      ExprPtr body = structure(e->body);
      VertexSet bound;
      auto body_free = free_variables(body);
      for (const auto& b : e->bound)
        if (body_free.count(b)) bound.insert(b);
      if (body->kind == Expr::Kind::Sum) {
        for (const auto& b : body->bound)
          if (bound.count(b))
            throw EstimandError("CaptureDetected",
                                "nested sums bind the same variable " + b);
        bound.insert(body->bound.begin(), body->bound.end());
        body = body->body;
      }
      return make_sum(std::move(bound), std::move(body));
    }
    case Expr::Kind::Product: {
      std::vector<ExprPtr> flat;
      for (const auto& f : e->factors) {
        ExprPtr sf = structure(f);
        if (sf->kind == Expr::Kind::Product)
          flat.insert(flat.end(), sf->factors.begin(), sf->factors.end());
        else
          flat.push_back(sf);
      }
      VertexSet hoisted;
      std::vector<ExprPtr> plain;
      for (size_t i = 0; i < flat.size(); ++i) {
        if (flat[i]->kind != Expr::Kind::Sum) {
          plain.push_back(flat[i]);
          continue;
        }
        // Collision set: variables free in sibling factors plus binders
        // already hoisted; colliding bound variables get primed copies.
        VertexSet avoid = hoisted;
        for (size_t j = 0; j < flat.size(); ++j) {
          if (j == i) continue;
          auto fv = free_variables(flat[j]);
          avoid.insert(fv.begin(), fv.end());
        }
        ExprPtr sum = flat[i];
        std::map<std::string, std::string> ren;
        VertexSet bound;
        for (const auto& b : sum->bound) {
          if (avoid.count(b)) {
            VertexSet full = avoid;
            auto bf = free_variables(sum->body);
            full.insert(bf.begin(), bf.end());
            full.insert(bound.begin(), bound.end());
            std::string nb = fresh_name(b + "'", full);
            ren[b] = nb;
            bound.insert(nb);
          } else {
            bound.insert(b);
          }
        }
        hoisted.insert(bound.begin(), bound.end());
        ExprPtr body = substitute(sum->body, ren);
        if (body->kind == Expr::Kind::Product)
          plain.insert(plain.end(), body->factors.begin(), body->factors.end());
        else
          plain.push_back(body);
      }
      ExprPtr prod = make_product(std::move(plain));
      if (hoisted.empty()) return prod;
      return structure(make_sum(std::move(hoisted), std::move(prod)));
    }
    case Expr::Kind::Quotient: {
      ExprPtr num = structure(e->numerator);
      ExprPtr den = structure(e->denominator);
      // Cancel syntactically identical factors only, and only while the
      // result stays representable (no constant-1 node exists).
      auto factors_of = [](const ExprPtr& x) {
        return x->kind == Expr::Kind::Product ? x->factors
                                              : std::vector<ExprPtr>{x};
      };
      auto nf = factors_of(num);
      auto df = factors_of(den);
      bool changed = true;
      while (changed) {
        changed = false;
        for (size_t i = 0; i < df.size() && !changed; ++i) {
          for (size_t j = 0; j < nf.size(); ++j) {
            if (expr_equal(df[i], nf[j]) && !(nf.size() == 1 && df.size() > 1)) {
              df.erase(df.begin() + i);
              nf.erase(nf.begin() + j);
              changed = true;
              break;
            }
          }
        }
      }
      if (df.empty()) {
        if (nf.empty()) return make_quotient(num, den);  // P/P stays put
        return structure(make_product(std::move(nf)));
      }
      if (nf.empty()) return make_quotient(num, den);
      return make_quotient(make_product(std::move(nf)),
                           make_product(std::move(df)));
    }
  }
  return e;
}

// Canonical binder names: base name plus the fewest primes avoiding every
// name free in the whole expression or bound in an enclosing scope.
ExprPtr rename_binders(const ExprPtr& e, const VertexSet& avoid,
                       const VertexSet& taken) {
  switch (e->kind) {
    case Expr::Kind::Term:
      return e;
    case Expr::Kind::Sum: {
      std::map<std::string, std::string> ren;
      VertexSet bound;
      for (const auto& b : e->bound) {
        VertexSet full = avoid;
        full.insert(taken.begin(), taken.end());
        full.insert(bound.begin(), bound.end());
        std::string nb = fresh_name(base_name(b), full);
        if (nb != b) ren[b] = nb;
        bound.insert(nb);
      }
      ExprPtr body = substitute(e->body, ren);
      VertexSet inner = taken;
      inner.insert(bound.begin(), bound.end());
      return make_sum(std::move(bound), rename_binders(body, avoid, inner));
    }
    case Expr::Kind::Product: {
      std::vector<ExprPtr> fs;
      for (const auto& f : e->factors)
        fs.push_back(rename_binders(f, avoid, taken));
      return make_product(std::move(fs));
    }
    case Expr::Kind::Quotient:
      return make_quotient(rename_binders(e->numerator, avoid, taken),
                           rename_binders(e->denominator, avoid, taken));
  }
  return e;
}

ExprPtr sort_factors(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Term:
      return e;
    case Expr::Kind::Sum:
      return make_sum(e->bound, sort_factors(e->body));
    case Expr::Kind::Product: {
      std::vector<ExprPtr> fs;
      for (const auto& f : e->factors) fs.push_back(sort_factors(f));
      std::stable_sort(fs.begin(), fs.end(),
                       [](const ExprPtr& a, const ExprPtr& b) {
                         return render_text(a) < render_text(b);
                       });
      return make_product(std::move(fs));
    }
    case Expr::Kind::Quotient:
      return make_quotient(sort_factors(e->numerator),
                           sort_factors(e->denominator));
  }
  return e;
}

}  // namespace

ExprPtr canonicalize(const ExprPtr& e) {
  ExprPtr cur = e;
  std::string prev;
  for (int iter = 0; iter < 5; ++iter) {
    ExprPtr next = structure(cur);
    next = rename_binders(next, free_variables(next), {});
    next = sort_factors(next);
    std::string s = render_text(next);
    cur = next;
    if (s == prev) break;
    prev = s;
  }
  return cur;
}

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join_lower(const VertexSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ",";
    out += lower(v);
  }
  return out;
}

std::string render_term(const ProbTerm& t, RenderFormat fmt, bool multi) {
  std::string head = "P";
  if (t.domain == kTargetDomain) {
    if (multi) head += (fmt == RenderFormat::Latex) ? "^{*}" : "*";
  } else if (!t.domain.empty()) {
    head += (fmt == RenderFormat::Latex) ? "^{(" + t.domain + ")}"
                                         : "^(" + t.domain + ")";
  }
  std::string args = join_lower(t.outcomes);
  std::string rhs;
  for (const auto& v : t.do_set) {
    if (!rhs.empty()) rhs += ",";
    rhs += "do(" + lower(v) + ")";
  }
  if (!t.conditions.empty()) {
    if (!rhs.empty()) rhs += ",";
    rhs += join_lower(t.conditions);
  }
  if (t.selected) {
    if (!rhs.empty()) rhs += ",";
    rhs += "S=1";
  }
  if (!rhs.empty())
    args += (fmt == RenderFormat::Latex ? " \\mid " : "|") + rhs;
  return head + "(" + args + ")";
}

std::string render_rec(const ExprPtr& e, RenderFormat fmt, bool multi);

std::string render_atomish(const ExprPtr& e, RenderFormat fmt, bool multi) {
  std::string s = render_rec(e, fmt, multi);
  if (e->kind == Expr::Kind::Sum || e->kind == Expr::Kind::Product)
    return (fmt == RenderFormat::Latex) ? "\\left(" + s + "\\right)"
                                        : "(" + s + ")";
  return s;
}

std::string render_rec(const ExprPtr& e, RenderFormat fmt, bool multi) {
  switch (e->kind) {
    case Expr::Kind::Term:
      return render_term(e->term, fmt, multi);
    case Expr::Kind::Sum: {
      std::string vars = join_lower(e->bound);
      std::string head;
      if (fmt == RenderFormat::Latex)
        head = "\\sum_{" + vars + "} ";
      else if (e->bound.size() == 1)
        head = "Σ_" + vars + " ";
      else
        head = "Σ_{" + vars + "} ";
      return head + render_rec(e->body, fmt, multi);
    }
    case Expr::Kind::Product: {
      std::string out;
      for (const auto& f : e->factors) {
        if (!out.empty()) out += " ";
        out += (f->kind == Expr::Kind::Sum || f->kind == Expr::Kind::Product)
                   ? render_atomish(f, fmt, multi)
                   : render_rec(f, fmt, multi);
      }
      return out;
    }
    case Expr::Kind::Quotient:
      if (fmt == RenderFormat::Latex)
        return "\\frac{" + render_rec(e->numerator, fmt, multi) + "}{" +
               render_rec(e->denominator, fmt, multi) + "}";
      return render_atomish(e->numerator, fmt, multi) + " / " +
             render_atomish(e->denominator, fmt, multi);
  }
  return "";
}

}  // namespace

std::string render(const ExprPtr& e, RenderFormat format) {
  auto doms = domains_mentioned(e);
  bool multi = !(doms.size() == 1 && *doms.begin() == kTargetDomain);
  return render_rec(e, format, multi);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum Type {
    Ident, LParen, RParen, LBrace, RBrace, Bar, Comma, Star, Slash,
    Caret, Underscore, Equals, Number, End
  };
  Type type = End;
  std::string text;
  size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto push = [&](Token::Type t, std::string text, size_t pos) {
    out.push_back({t, std::move(text), pos});
  };
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) { ++i; continue; }
    size_t start = i;
    // UTF-8 capital sigma.
    if (c == 0xCE && i + 1 < s.size() &&
        static_cast<unsigned char>(s[i + 1]) == 0xA3) {
      push(Token::Ident, "sum", start);
      i += 2;
      continue;
    }
    if (c == '\\') {  // latex-style \sum
      size_t j = i + 1;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      push(Token::Ident, s.substr(i + 1, j - i - 1), start);
      i = j;
      continue;
    }
    if (std::isalpha(c)) {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '\''))
        ++j;
      push(Token::Ident, s.substr(i, j - i), start);
      i = j;
      continue;
    }
    if (std::isdigit(c)) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Token::Number, s.substr(i, j - i), start);
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(Token::LParen, "(", start); break;
      case ')': push(Token::RParen, ")", start); break;
      case '{': push(Token::LBrace, "{", start); break;
      case '}': push(Token::RBrace, "}", start); break;
      case '|': push(Token::Bar, "|", start); break;
      case ',': push(Token::Comma, ",", start); break;
      case '*': push(Token::Star, "*", start); break;
      case '/': push(Token::Slash, "/", start); break;
      case '^': push(Token::Caret, "^", start); break;
      case '_': push(Token::Underscore, "_", start); break;
      case '=': push(Token::Equals, "=", start); break;
      default:
        throw EstimandError("ParseError",
                            "unexpected character '" + std::string(1, s[i]) +
                                "' at offset " + std::to_string(i));
    }
    ++i;
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

std::string upper(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    expect(Token::End, "end of input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) {
    throw EstimandError("ParseError", "expected " + what + " near offset " +
                                          std::to_string(peek().pos));
  }
  Token expect(Token::Type t, const std::string& what) {
    if (peek().type != t) fail(what);
    return take();
  }

  bool starts_unary() const {
    return peek().type == Token::LParen ||
           (peek().type == Token::Ident &&
            (lower(peek().text) == "sum" || upper(peek().text) == "P" ||
             lower(peek().text) == "p"));
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (peek().type == Token::Star) {
        take();
        e = mul(e, parse_unary());
      } else if (peek().type == Token::Slash) {
        take();
        e = make_quotient(e, parse_unary());
      } else if (starts_unary()) {
        e = mul(e, parse_unary());
      } else {
        break;
      }
    }
    return e;
  }

  static ExprPtr mul(ExprPtr a, ExprPtr b) {
    std::vector<ExprPtr> fs;
    if (a->kind == Expr::Kind::Product)
      fs = a->factors;
    else
      fs.push_back(a);
    fs.push_back(b);
    return make_product(std::move(fs));
  }

  ExprPtr parse_unary() {
    if (peek().type == Token::LParen) {
      take();
      ExprPtr e = parse_expr();
      expect(Token::RParen, "')'");
      return e;
    }
    if (peek().type == Token::Ident && lower(peek().text) == "sum") {
      take();
      expect(Token::Underscore, "'_' after sum");
      VertexSet bound;
      if (peek().type == Token::LBrace) {
        take();
        bound = parse_var_list(Token::RBrace);
        expect(Token::RBrace, "'}'");
      } else {
        bound.insert(upper(expect(Token::Ident, "bound variable").text));
      }
      // The sum body extends as far right as the enclosing scope allows.
      return make_sum(std::move(bound), parse_expr());
    }
    if (peek().type == Token::Ident) return parse_term();
    fail("a probability term, sum, or '('");
  }

  VertexSet parse_var_list(Token::Type stop) {
    VertexSet out;
    for (;;) {
      out.insert(upper(expect(Token::Ident, "variable").text));
      if (peek().type == Token::Comma) {
        take();
        continue;
      }
      if (peek().type == stop) return out;
      fail("',' or list end");
    }
  }

  ExprPtr parse_term() {
    Token p = take();
    if (upper(p.text) != "P") fail("'P'");
    ProbTerm t;
    t.domain = "";  // bare P; promoted to the target domain post-parse
    if (peek().type == Token::Star) {
      take();
      t.domain = kTargetDomain;
    } else if (peek().type == Token::Caret) {
      take();
      bool brace = peek().type == Token::LBrace;
      if (brace) take();
      if (peek().type == Token::Star) {
        take();
        t.domain = kTargetDomain;
      } else {
        bool paren = peek().type == Token::LParen;
        if (paren) take();
        t.domain = expect(Token::Ident, "domain label").text;
        if (paren) expect(Token::RParen, "')'");
      }
      if (brace) expect(Token::RBrace, "'}'");
    }
    expect(Token::LParen, "'('");
    for (;;) {
      t.outcomes.insert(upper(expect(Token::Ident, "outcome variable").text));
      if (peek().type == Token::Comma) {
        take();
        continue;
      }
      break;
    }
    if (peek().type == Token::Bar) {
      take();
      for (;;) {
        if (peek().type == Token::Ident && lower(peek().text) == "do" &&
            toks_[pos_ + 1].type == Token::LParen) {
          take();
          take();
          auto vars = parse_var_list(Token::RParen);
          expect(Token::RParen, "')'");
          t.do_set.insert(vars.begin(), vars.end());
        } else {
          Token v = expect(Token::Ident, "conditioning variable");
          if (upper(v.text) == "S" && peek().type == Token::Equals) {
            take();
            Token n = expect(Token::Number, "1 after S=");
            if (n.text != "1") fail("S=1");
            t.selected = true;
          } else {
            t.conditions.insert(upper(v.text));
          }
        }
        if (peek().type == Token::Comma) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Token::RParen, "')'");
    return make_term(std::move(t));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

ExprPtr promote_bare_domain(const ExprPtr& e) {
  std::function<ExprPtr(const ExprPtr&)> walk = [&](const ExprPtr& x) -> ExprPtr {
    switch (x->kind) {
      case Expr::Kind::Term: {
        ProbTerm t = x->term;
        if (t.domain.empty()) t.domain = kTargetDomain;
        return make_term(std::move(t));
      }
      case Expr::Kind::Sum:
        return make_sum(x->bound, walk(x->body));
      case Expr::Kind::Product: {
        std::vector<ExprPtr> fs;
        for (const auto& f : x->factors) fs.push_back(walk(f));
        return make_product(std::move(fs));
      }
      case Expr::Kind::Quotient:
        return make_quotient(walk(x->numerator), walk(x->denominator));
    }
    return x;
  };
  return walk(e);
}

}  // namespace

ExprPtr parse_estimand(const std::string& text) {
  ExprPtr e = Parser(text).parse();
  // A bare P is the anonymous source; when no starred or named domain
  // appears the whole expression belongs to the target population.
  auto doms = domains_mentioned(e);
  bool only_bare =
      std::all_of(doms.begin(), doms.end(),
                  [](const std::string& d) { return d.empty(); });
  if (only_bare) e = promote_bare_domain(e);
  return e;
}

// ---------------------------------------------------------------------------
// Source catalogue

const Source* SourceCatalog::find(const std::string& domain) const {
  for (const auto& s : sources)
    if (s.domain == domain) return &s;
  return nullptr;
}

bool term_estimable(const ProbTerm& t, const SourceCatalog& cat) {
  VertexSet vars = base_names(t.variables());
  VertexSet dos = base_names(t.do_set);
  for (const auto& src : cat.sources) {
    if (src.domain != t.domain) continue;
    if (src.selected != t.selected) continue;
    if (!src.experimental && !dos.empty()) continue;
    if (src.experimental &&
        !std::includes(src.intervened.begin(), src.intervened.end(),
                       dos.begin(), dos.end()))
      continue;
    if (!std::includes(src.measured.begin(), src.measured.end(), vars.begin(),
                       vars.end()))
      continue;
    return true;
  }
  return false;
}

EstimabilityReport estimable(const ExprPtr& e, const SourceCatalog& cat) {
  EstimabilityReport rep;
  rep.estimable = true;
  for (const auto& t : collect_terms(e)) {
    TermReport tr;
    tr.term = t;
    tr.estimable = term_estimable(t, cat);
    if (!tr.estimable) {
      rep.estimable = false;
      tr.reason = "no source covers " + render_text(make_term(t));
    }
    rep.terms.push_back(std::move(tr));
  }
  return rep;
}

}  // namespace dofuse
