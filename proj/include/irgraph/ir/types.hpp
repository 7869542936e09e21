#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irgraph/errors.hpp"

namespace irgraph {

enum class TypeKind : std::uint8_t {
  Void,
  Integer,
  Float,
  Pointer,
  Vector,
  Array,
  Struct,
  Function,
  Opaque,
};

constexpr int kTypeKindCount = 9;

inline const char* type_kind_name(TypeKind k) {
  switch (k) {
    case TypeKind::Void: return "void";
    case TypeKind::Integer: return "integer";
    case TypeKind::Float: return "float";
    case TypeKind::Pointer: return "pointer";
    case TypeKind::Vector: return "vector";
    case TypeKind::Array: return "array";
    case TypeKind::Struct: return "structure";
    case TypeKind::Function: return "function";
    case TypeKind::Opaque: return "opaque";
  }
  return "opaque";
}

// Index into a module's TypeTable; -1 means "no type".
using TypeRef = std::int32_t;
constexpr TypeRef kNoType = -1;

struct TypeDesc {
  TypeKind kind = TypeKind::Opaque;
  std::uint32_t bit_width = 0;        // Integer / Float
  std::string float_name;             // half, float, double, ...
  TypeRef element = kNoType;          // pointee / element / function return
  std::uint64_t count = 0;            // Vector / Array length
  std::vector<TypeRef> members;       // Struct members / Function params
  bool packed = false;                // Struct
  bool varargs = false;               // Function
  std::string name;                   // named struct identity ("%name")
};

// Interns structural types by their printed form; named structs intern by
// name so recursive types terminate.
class TypeTable {
public:
  TypeRef intern(const TypeDesc& d) {
    const std::string key = print_desc(d);
    auto it = interned_.find(key);
    if (it != interned_.end()) return it->second;
    const TypeRef ref = static_cast<TypeRef>(types_.size());
    types_.push_back(d);
    interned_.emplace(key, ref);
    return ref;
  }

  // Creates (or finds) a named struct slot; the body may be filled in later.
  TypeRef declare_named(const std::string& name) {
    auto it = named_.find(name);
    if (it != named_.end()) return it->second;
    TypeDesc d;
    d.kind = TypeKind::Struct;
    d.name = name;
    const TypeRef ref = static_cast<TypeRef>(types_.size());
    types_.push_back(d);
    named_.emplace(name, ref);
    interned_.emplace("%" + name, ref);
    return ref;
  }

  void define_named(TypeRef ref, TypeDesc body) {
    body.name = types_.at(static_cast<std::size_t>(ref)).name;
    types_[static_cast<std::size_t>(ref)] = std::move(body);
  }

  const TypeDesc& at(TypeRef ref) const {
    if (ref < 0 || static_cast<std::size_t>(ref) >= types_.size())
      throw InternalInconsistency("type ref out of range");
    return types_[static_cast<std::size_t>(ref)];
  }

  std::size_t size() const { return types_.size(); }

  std::string print(TypeRef ref) const { return print_desc(at(ref)); }

  // Full structural body, expanding a named struct one level.
  std::string print_body(TypeRef ref) const {
    const TypeDesc& d = at(ref);
    if (!d.name.empty()) {
      TypeDesc body = d;
      body.name.clear();
      return print_desc(body);
    }
    return print_desc(d);
  }

  bool is_sized(TypeRef ref) const {
    std::unordered_set<TypeRef> seen;
    return sized_impl(ref, seen);
  }

  std::uint64_t byte_size(TypeRef ref) const {
    std::unordered_set<TypeRef> seen;
    return size_impl(ref, seen);
  }

private:
  std::string print_desc(const TypeDesc& d) const {
    if (!d.name.empty()) return "%" + d.name;
    switch (d.kind) {
      case TypeKind::Void: return "void";
      case TypeKind::Integer: return "i" + std::to_string(d.bit_width);
      case TypeKind::Float: return d.float_name;
      case TypeKind::Pointer:
        return d.element == kNoType ? "ptr" : print(d.element) + "*";
      case TypeKind::Vector:
        return "<" + std::to_string(d.count) + " x " + print(d.element) + ">";
      case TypeKind::Array:
        return "[" + std::to_string(d.count) + " x " + print(d.element) + "]";
      case TypeKind::Struct: {
        std::string s = d.packed ? "<{" : "{";
        for (std::size_t i = 0; i < d.members.size(); ++i) {
          s += (i ? ", " : " ") + print(d.members[i]);
        }
        s += d.members.empty() ? (d.packed ? "}" : "}") : (d.packed ? " }" : " }");
        if (d.packed) s += ">";
        return s;
      }
      case TypeKind::Function: {
        std::string s = print(d.element) + " (";
        for (std::size_t i = 0; i < d.members.size(); ++i) {
          if (i) s += ", ";
          s += print(d.members[i]);
        }
        if (d.varargs) {
          if (!d.members.empty()) s += ", ";
          s += "...";
        }
        s += ")";
        return s;
      }
      case TypeKind::Opaque: return "opaque";
    }
    return "opaque";
  }

  bool sized_impl(TypeRef ref, std::unordered_set<TypeRef>& seen) const {
    const TypeDesc& d = at(ref);
    switch (d.kind) {
      case TypeKind::Void:
      case TypeKind::Function:
      case TypeKind::Opaque:
        return false;
      case TypeKind::Integer:
      case TypeKind::Float:
      case TypeKind::Pointer:
        return true;
      case TypeKind::Vector:
      case TypeKind::Array:
        return sized_impl(d.element, seen);
      case TypeKind::Struct: {
        if (!seen.insert(ref).second) return false;
        for (TypeRef m : d.members)
          if (!sized_impl(m, seen)) return false;
        return true;
      }
    }
    return false;
  }

  // Packed layout: byte sizes sum with no padding. Pointers are 8 bytes,
  // integers round up to whole bytes, x86_fp80 stores as 10.
  std::uint64_t size_impl(TypeRef ref, std::unordered_set<TypeRef>& seen) const {
    const TypeDesc& d = at(ref);
    switch (d.kind) {
      case TypeKind::Void:
      case TypeKind::Function:
      case TypeKind::Opaque:
        return 0;
      case TypeKind::Integer:
        return (d.bit_width + 7) / 8;
      case TypeKind::Float:
        return (d.bit_width + 7) / 8;
      case TypeKind::Pointer:
        return 8;
      case TypeKind::Vector:
      case TypeKind::Array:
        return d.count * size_impl(d.element, seen);
      case TypeKind::Struct: {
        if (!seen.insert(ref).second)
          throw InternalInconsistency("cyclic struct size");
        std::uint64_t total = 0;
        for (TypeRef m : d.members) total += size_impl(m, seen);
        seen.erase(ref);
        return total;
      }
    }
    return 0;
  }

  std::vector<TypeDesc> types_;
  std::unordered_map<std::string, TypeRef> interned_;
  std::unordered_map<std::string, TypeRef> named_;
};

}  // namespace irgraph
