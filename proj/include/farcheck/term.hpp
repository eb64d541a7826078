#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <string>

#include "farcheck/syms.hpp"

namespace far {

// Flat term over the state signature. Process positions (array indices)
// are restricted to bound variables (Param), ground witnesses (Witness),
// or proc-sorted globals; nothing here recurses.
struct Term {
  enum class Kind : uint8_t { Const, Param, Witness, Global, Read };

  Kind kind = Kind::Const;
  Kind ixk = Kind::Param;  // Read only: kind of the index position
  int32_t a = 0;  // Const: type id; Param/Witness: index; Global: var id; Read: array id
  int32_t b = 0;  // Const: ctor index; Read: index value (per ixk)

  static Term cst(int32_t type, int32_t ctor) {
    return {Kind::Const, Kind::Param, type, ctor};
  }
  static Term btrue() { return cst(Sort::kBool, 1); }
  static Term bfalse() { return cst(Sort::kBool, 0); }
  static Term param(int32_t i) { return {Kind::Param, Kind::Param, i, 0}; }
  static Term witness(int32_t k) { return {Kind::Witness, Kind::Param, k, 0}; }
  static Term global(int32_t g) { return {Kind::Global, Kind::Param, g, 0}; }
  static Term read(int32_t arr, Term index) {
    assert(index.kind == Kind::Param || index.kind == Kind::Witness ||
           index.kind == Kind::Global);
    return {Kind::Read, index.kind, arr, index.a};
  }

  bool is_const() const { return kind == Kind::Const; }
  Term index() const {  // Read only
    assert(kind == Kind::Read);
    return {ixk, Kind::Param, b, 0};
  }

  // Total order placing state variables first: Global < Read < Param <
  // Witness < Const. Literal orientation and the canonical literal order
  // both derive from this.
  std::array<int32_t, 4> key() const {
    switch (kind) {
      case Kind::Global:  return {0, a, 0, 0};
      case Kind::Read:    return {1, a, static_cast<int32_t>(ixk), b};
      case Kind::Param:   return {2, a, 0, 0};
      case Kind::Witness: return {3, a, 0, 0};
      case Kind::Const:   return {4, a, b, 0};
    }
    return {};
  }

  bool operator==(const Term&) const = default;
};

inline bool term_less(const Term& x, const Term& y) { return x.key() < y.key(); }

// lhs/rhs are kept oriented so that lhs.key() <= rhs.key().
struct Literal {
  Term lhs, rhs;
  bool neq = false;

  static Literal make(Term l, Term r, bool neq) {
    if (term_less(r, l)) std::swap(l, r);
    return {l, r, neq};
  }
  Literal negated() const { return {lhs, rhs, !neq}; }

  std::array<int32_t, 9> key() const {
    auto lk = lhs.key();
    auto rk = rhs.key();
    return {lk[0], lk[1], lk[2], lk[3], neq ? 1 : 0, rk[0], rk[1], rk[2], rk[3]};
  }

  bool operator==(const Literal&) const = default;
};

inline bool lit_less(const Literal& x, const Literal& y) { return x.key() < y.key(); }

std::string render_term(const SymbolTable& syms, const Term& t);
std::string render_literal(const SymbolTable& syms, const Literal& l);

}  // namespace far
