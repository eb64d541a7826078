#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace far {

// A sort is either the process sort or an index into SymbolTable::types.
// Type 0 is always the built-in two-constructor enum "bool" (false, true).
struct Sort {
  static constexpr int32_t kProc = -1;
  static constexpr int32_t kBool = 0;

  int32_t type = kBool;

  bool is_proc() const { return type == kProc; }
  bool is_bool() const { return type == kBool; }
  bool operator==(const Sort&) const = default;
};

struct EnumType {
  std::string name;
  std::vector<std::string> ctors;
  bool operator==(const EnumType&) const = default;
};

struct GlobalDecl {
  std::string name;
  Sort sort;
  bool operator==(const GlobalDecl&) const = default;
};

struct ArrayDecl {
  std::string name;   // indexed by proc
  Sort elem;
  bool operator==(const ArrayDecl&) const = default;
};

// Immutable after elaboration. Ids are declaration order, which also fixes
// the canonical literal order and every rendered output.
struct SymbolTable {
  std::vector<EnumType> types;      // [0] = bool
  std::vector<GlobalDecl> globals;
  std::vector<ArrayDecl> arrays;

  SymbolTable() { types.push_back(EnumType{"bool", {"false", "true"}}); }

  const std::string& ctor_name(int32_t type, int32_t ctor) const {
    return types.at(type).ctors.at(ctor);
  }
  int num_ctors(int32_t type) const {
    return static_cast<int>(types.at(type).ctors.size());
  }
  std::string sort_name(Sort s) const {
    return s.is_proc() ? "proc" : types.at(s.type).name;
  }

  bool operator==(const SymbolTable&) const = default;
};

}  // namespace far
