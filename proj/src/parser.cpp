#include "farcheck/ast.hpp"

#include <map>
#include <utility>

#include "farcheck/diag.hpp"
#include "farcheck/syms.hpp"

namespace far {

namespace {

struct Token {
  enum class Kind { Id, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

[[noreturn]] void fail(Diag::Kind k, const Token& at, std::string msg) {
  throw ParseError(Diag{k, at.line, at.col, std::move(msg)});
}

[[noreturn]] void fail(Diag::Kind k, SrcPos at, std::string msg) {
  throw ParseError(Diag{k, at.line, at.col, std::move(msg)});
}

bool id_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool id_char(char c) { return id_start(c) || (c >= '0' && c <= '9'); }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      Token open{Token::Kind::Sym, "(*", line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == ')'))
        advance(1);
      if (i + 1 >= src.size())
        fail(Diag::Kind::SyntaxError, open, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (id_start(c)) {
      size_t j = i;
      while (j < src.size() && id_char(src[j])) ++j;
      t.kind = Token::Kind::Id;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    t.kind = Token::Kind::Sym;
    auto sym2 = src.substr(i, 2);
    if (sym2 == ":=" || sym2 == "<>" || sym2 == "&&") {
      t.text = sym2;
      advance(2);
    } else if (std::string("=(){}[]:|;").find(c) != std::string::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      fail(Diag::Kind::SyntaxError, t,
           std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Token::Kind::End, "", line, col});
  return out;
}

// What a name is bound to while checking.
struct Binding {
  enum class Kind { Type, Ctor, Global, Array, Transition } kind;
  Sort sort;  // Ctor: its enum; Global: declared sort; Array: element sort
};

class Parser {
public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {
    // Built-in bool constructors; user declarations may not shadow them.
    names_.emplace("false", Binding{Binding::Kind::Ctor, Sort{Sort::kBool}});
    names_.emplace("true", Binding{Binding::Kind::Ctor, Sort{Sort::kBool}});
  }

  SystemAst run() {
    if (peek().kind == Token::Kind::End)
      fail(Diag::Kind::SyntaxError, peek(), "expected declaration");
    while (peek().kind != Token::Kind::End) {
      const Token& t = peek();
      if (t.kind != Token::Kind::Id)
        fail(Diag::Kind::SyntaxError, t, "expected declaration");
      if (t.text == "type")
        decl_type();
      else if (t.text == "var")
        decl_var();
      else if (t.text == "array")
        decl_array();
      else if (t.text == "init")
        decl_quant(ast_.init, "init");
      else if (t.text == "unsafe")
        decl_quant(ast_.unsafe, "unsafe");
      else if (t.text == "transition")
        decl_transition();
      else
        fail(Diag::Kind::SyntaxError, t, "expected declaration");
    }
    if (!ast_.init.present)
      fail(Diag::Kind::SyntaxError, peek(), "missing init declaration");
    if (!ast_.unsafe.present)
      fail(Diag::Kind::SyntaxError, peek(), "missing unsafe declaration");
    return std::move(ast_);
  }

private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  Token expect_sym(const std::string& s) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Sym || t.text != s)
      fail(Diag::Kind::SyntaxError, t, "expected '" + s + "'");
    return take();
  }

  Token expect_id() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Id)
      fail(Diag::Kind::SyntaxError, t, "expected identifier");
    return take();
  }

  Token expect_keyword(const std::string& kw) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Id || t.text != kw)
      fail(Diag::Kind::SyntaxError, t, "expected '" + kw + "'");
    return take();
  }

  bool at_sym(const std::string& s) const {
    return peek().kind == Token::Kind::Sym && peek().text == s;
  }

  void declare(const Token& name, Binding b) {
    if (name.text == "_")
      fail(Diag::Kind::SyntaxError, name, "'_' is reserved");
    if (names_.count(name.text))
      fail(Diag::Kind::DuplicateDecl, name, "'" + name.text + "'");
    names_.emplace(name.text, b);
  }

  Sort sort_of(const Token& name) {
    if (name.text == "proc") return Sort{Sort::kProc};
    if (name.text == "bool") return Sort{Sort::kBool};
    auto it = names_.find(name.text);
    if (it == names_.end() || it->second.kind != Binding::Kind::Type)
      fail(Diag::Kind::NameError, name, "unknown sort '" + name.text + "'");
    return it->second.sort;
  }

  void decl_type() {
    SrcPos pos{peek().line, peek().col};
    take();
    Token name = expect_id();
    declare(name, {Binding::Kind::Type, Sort{next_type_}});
    expect_sym("=");
    AstTypeDecl d;
    d.pos = pos;
    d.name = name.text;
    for (;;) {
      Token ctor = expect_id();
      declare(ctor, {Binding::Kind::Ctor, Sort{next_type_}});
      d.ctors.push_back(ctor.text);
      if (!at_sym("|")) break;
      take();
    }
    ++next_type_;
    ast_.types.push_back(std::move(d));
  }

  void decl_var() {
    SrcPos pos{peek().line, peek().col};
    take();
    Token name = expect_id();
    expect_sym(":");
    Token sname = expect_id();
    Sort s = sort_of(sname);
    declare(name, {Binding::Kind::Global, s});
    ast_.globals.push_back(AstVarDecl{pos, name.text, sname.text});
  }

  void decl_array() {
    SrcPos pos{peek().line, peek().col};
    take();
    Token name = expect_id();
    expect_sym("[");
    expect_keyword("proc");
    expect_sym("]");
    expect_sym(":");
    Token sname = expect_id();
    Sort s = sort_of(sname);
    if (s.is_proc())
      fail(Diag::Kind::SortError, sname, "proc-sorted arrays are not supported");
    declare(name, {Binding::Kind::Array, s});
    ast_.arrays.push_back(AstArrayDecl{pos, name.text, sname.text});
  }

  // Scope of process variables for terms: transition/init/unsafe parameters
  // plus, inside case arms, the cell binder.
  struct Scope {
    std::vector<std::string> params;
    std::string binder;  // empty when none

    bool is_param(const std::string& n) const {
      for (const auto& p : params)
        if (p == n) return true;
      return false;
    }
  };

  std::vector<std::string> param_list() {
    expect_sym("(");
    std::vector<std::string> params;
    while (!at_sym(")")) {
      Token p = expect_id();
      if (p.text == "_")
        fail(Diag::Kind::SyntaxError, p, "'_' is reserved");
      if (names_.count(p.text))
        fail(Diag::Kind::DuplicateDecl, p,
             "parameter '" + p.text + "' collides with a declaration");
      for (const auto& q : params)
        if (q == p.text)
          fail(Diag::Kind::DuplicateDecl, p, "parameter '" + p.text + "'");
      params.push_back(p.text);
    }
    take();
    return params;
  }

  AstTerm term(const Scope& sc, Sort* sort_out) {
    Token name = expect_id();
    AstTerm t;
    t.pos = {name.line, name.col};
    t.name = name.text;
    if (at_sym("[")) {
      take();
      Token ix = expect_id();
      expect_sym("]");
      t.index = ix.text;
      auto it = names_.find(name.text);
      if (it == names_.end() || it->second.kind != Binding::Kind::Array)
        fail(Diag::Kind::NameError, name, "'" + name.text + "' is not an array");
      if (!sc.is_param(ix.text) && ix.text != sc.binder)
        fail(Diag::Kind::NameError, ix,
             "array index '" + ix.text + "' is not a process variable in scope");
      *sort_out = it->second.sort;
      return t;
    }
    if (sc.is_param(name.text) || name.text == sc.binder) {
      *sort_out = Sort{Sort::kProc};
      return t;
    }
    auto it = names_.find(name.text);
    if (it == names_.end())
      fail(Diag::Kind::NameError, name, "undeclared '" + name.text + "'");
    switch (it->second.kind) {
      case Binding::Kind::Ctor:
      case Binding::Kind::Global:
        *sort_out = it->second.sort;
        return t;
      case Binding::Kind::Array:
        fail(Diag::Kind::SortError, name,
             "array '" + name.text + "' used without an index");
      default:
        fail(Diag::Kind::NameError, name,
             "'" + name.text + "' cannot appear in a term");
    }
  }

  AstLit lit(const Scope& sc) {
    AstLit l;
    Sort ls, rs;
    l.lhs = term(sc, &ls);
    if (at_sym("<>")) {
      take();
      l.neq = true;
    } else if (at_sym("=")) {
      take();
    } else {
      fail(Diag::Kind::SyntaxError, peek(), "expected '=' or '<>'");
    }
    l.rhs = term(sc, &rs);
    if (!(ls == rs))
      fail(Diag::Kind::SortError, l.rhs.pos,
           "sort mismatch in literal ('" + l.lhs.name + "' vs '" + l.rhs.name +
               "')");
    return l;
  }

  std::vector<AstLit> conj(const Scope& sc) {
    std::vector<AstLit> lits;
    lits.push_back(lit(sc));
    while (at_sym("&&")) {
      take();
      lits.push_back(lit(sc));
    }
    return lits;
  }

  void decl_quant(AstQuant& slot, const std::string& kw) {
    Token t = peek();
    take();
    if (slot.present)
      fail(Diag::Kind::DuplicateDecl, t, kw + " declared twice");
    slot.pos = {t.line, t.col};
    slot.present = true;
    Scope sc;
    sc.params = param_list();
    slot.params = sc.params;
    expect_sym("{");
    slot.lits = conj(sc);
    expect_sym("}");
  }

  AstUpdate update(const Scope& params_only) {
    AstUpdate u;
    Token target = expect_id();
    u.pos = {target.line, target.col};
    u.target = target.text;
    auto it = names_.find(target.text);
    if (it == names_.end())
      fail(Diag::Kind::NameError, target, "undeclared '" + target.text + "'");
    bool is_array = it->second.kind == Binding::Kind::Array;
    if (!is_array && it->second.kind != Binding::Kind::Global)
      fail(Diag::Kind::NameError, target,
           "'" + target.text + "' is not assignable");
    Sort target_sort = it->second.sort;

    if (at_sym("[")) {
      if (!is_array)
        fail(Diag::Kind::SortError, target,
             "'" + target.text + "' is not an array");
      take();
      Token ix = expect_id();
      expect_sym("]");
      u.index = ix.text;
      expect_sym(":=");
      if (peek().kind == Token::Kind::Id && peek().text == "case") {
        take();
        // The index is a fresh cell binder scoped to the arms.
        if (ix.text == "_")
          fail(Diag::Kind::SyntaxError, ix, "'_' is reserved");
        if (params_only.is_param(ix.text) || names_.count(ix.text))
          fail(Diag::Kind::DuplicateDecl, ix,
               "case index '" + ix.text + "' must be a fresh name");
        Scope sc = params_only;
        sc.binder = ix.text;
        bool saw_default = false;
        while (at_sym("|")) {
          take();
          AstCaseArm arm;
          if (peek().kind == Token::Kind::Id && peek().text == "_") {
            take();
            saw_default = true;
            expect_sym(":");
            Sort vs;
            arm.value = term(sc, &vs);
            if (!(vs == target_sort))
              fail(Diag::Kind::SortError, arm.value.pos,
                   "case value sort mismatch");
            u.arms.push_back(std::move(arm));
            break;
          }
          Token at = peek();
          AstLit c = lit(sc);
          if (c.neq)
            fail(Diag::Kind::SortError, at,
                 "case condition must be an equality");
          bool lb = c.lhs.name == sc.binder && !c.lhs.index;
          bool rb = c.rhs.name == sc.binder && !c.rhs.index;
          bool lp = params_only.is_param(c.lhs.name) && !c.lhs.index;
          bool rp = params_only.is_param(c.rhs.name) && !c.rhs.index;
          if (!((lb && rp) || (rb && lp)))
            fail(Diag::Kind::SortError, at,
                 "case condition must equate the cell index with a parameter");
          arm.cond = c;
          expect_sym(":");
          Sort vs;
          arm.value = term(sc, &vs);
          if (!(vs == target_sort))
            fail(Diag::Kind::SortError, arm.value.pos,
                 "case value sort mismatch");
          u.arms.push_back(std::move(arm));
        }
        if (u.arms.size() < 2 || !saw_default)
          fail(Diag::Kind::SyntaxError, peek(),
               "case needs at least one conditional arm and a '_' default");
        expect_sym(";");
        return u;
      }
      // Simple cell assignment: the index is a transition parameter.
      if (!params_only.is_param(ix.text))
        fail(Diag::Kind::NameError, ix,
             "array index '" + ix.text + "' is not a parameter");
      Sort vs;
      AstTerm v = term(params_only, &vs);
      if (!(vs == target_sort))
        fail(Diag::Kind::SortError, v.pos, "assignment sort mismatch");
      u.value = std::move(v);
      expect_sym(";");
      return u;
    }

    if (is_array)
      fail(Diag::Kind::SortError, target,
           "array '" + target.text + "' needs an index");
    expect_sym(":=");
    Sort vs;
    AstTerm v = term(params_only, &vs);
    if (!(vs == target_sort))
      fail(Diag::Kind::SortError, v.pos, "assignment sort mismatch");
    u.value = std::move(v);
    expect_sym(";");
    return u;
  }

  void decl_transition() {
    SrcPos pos{peek().line, peek().col};
    take();
    Token name = expect_id();
    declare(name, {Binding::Kind::Transition, Sort{}});
    AstTransition tr;
    tr.pos = pos;
    tr.name = name.text;
    Scope sc;
    sc.params = param_list();
    tr.params = sc.params;
    expect_keyword("requires");
    expect_sym("{");
    tr.guard = conj(sc);
    expect_sym("}");
    expect_sym("{");
    while (!at_sym("}")) {
      AstUpdate u = update(sc);
      for (const AstUpdate& prev : tr.updates)
        if (prev.target == u.target)
          fail(Diag::Kind::DuplicateDecl, u.pos,
               "'" + u.target + "' updated twice");
      tr.updates.push_back(std::move(u));
    }
    take();
    ast_.transitions.push_back(std::move(tr));
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  SystemAst ast_;
  std::map<std::string, Binding> names_;
  int32_t next_type_ = 1;  // 0 is bool
};

}  // namespace

SystemAst parse(const std::string& source) { return Parser(source).run(); }

}  // namespace far
