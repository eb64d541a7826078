#pragma once

#include <optional>
#include <string>
#include <vector>

namespace far {

struct SrcPos {
  int line = 0;
  int col = 0;
};

// Surface term: a bare identifier (constructor, global, parameter, or case
// index) or an array read `name[index]`.
struct AstTerm {
  SrcPos pos;
  std::string name;
  std::optional<std::string> index;
};

struct AstLit {
  AstTerm lhs;
  AstTerm rhs;
  bool neq = false;
};

struct AstCaseArm {
  std::optional<AstLit> cond;  // nullopt = the "_" default arm
  AstTerm value;
};

// `target := value;` or `target[index] := value;` or the case form
// `target[index] := case | lit : term ... | _ : term;` where index binds the
// running cell variable over the arms.
struct AstUpdate {
  SrcPos pos;
  std::string target;
  std::optional<std::string> index;
  std::optional<AstTerm> value;
  std::vector<AstCaseArm> arms;  // nonempty = case form
};

struct AstTransition {
  SrcPos pos;
  std::string name;
  std::vector<std::string> params;
  std::vector<AstLit> guard;
  std::vector<AstUpdate> updates;
};

struct AstTypeDecl {
  SrcPos pos;
  std::string name;
  std::vector<std::string> ctors;
};

struct AstVarDecl {
  SrcPos pos;
  std::string name;
  std::string sort;
};

struct AstArrayDecl {
  SrcPos pos;
  std::string name;
  std::string elem;
};

// init or unsafe: quantified parameter list plus a literal conjunction.
struct AstQuant {
  SrcPos pos;
  std::vector<std::string> params;
  std::vector<AstLit> lits;
  bool present = false;
};

struct SystemAst {
  std::vector<AstTypeDecl> types;
  std::vector<AstVarDecl> globals;
  std::vector<AstArrayDecl> arrays;
  AstQuant init;
  AstQuant unsafe;
  std::vector<AstTransition> transitions;
};

// Recursive-descent parse of .fcub source. Performs name resolution, sort
// checking, and duplicate detection; throws ParseError on the first problem.
SystemAst parse(const std::string& source);

}  // namespace far
