#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irgraph/errors.hpp"
#include "irgraph/ir/ast.hpp"
#include "irgraph/ir/lexer.hpp"

namespace irgraph {

struct SubsetFlag {
  std::string construct;
  std::uint32_t line = 0;
};

struct ParseOptions {
  bool lenient = false;
  std::size_t max_bytes = 64ull << 20;
};

struct ParseResult {
  IrModule module;
  std::vector<SubsetFlag> flags;
};

namespace detail {

inline const std::unordered_set<std::string>& float_type_words() {
  static const std::unordered_set<std::string> s = {
      "half", "bfloat", "float", "double", "fp128", "x86_fp80", "ppc_fp128"};
  return s;
}

inline std::uint32_t float_bits(const std::string& w) {
  if (w == "half" || w == "bfloat") return 16;
  if (w == "float") return 32;
  if (w == "double") return 64;
  if (w == "x86_fp80") return 80;
  return 128;  // fp128, ppc_fp128
}

inline bool is_int_type_word(const std::string& w) {
  if (w.size() < 2 || w[0] != 'i') return false;
  return std::all_of(w.begin() + 1, w.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

inline const std::unordered_set<std::string>& fast_math_flags() {
  static const std::unordered_set<std::string> s = {
      "fast", "nnan", "ninf", "nsz", "arcp", "contract", "afn", "reassoc"};
  return s;
}

inline const std::unordered_set<std::string>& atomic_orderings() {
  static const std::unordered_set<std::string> s = {
      "unordered", "monotonic", "acquire", "release", "acq_rel", "seq_cst"};
  return s;
}

inline const std::unordered_set<std::string>& linkage_words() {
  static const std::unordered_set<std::string> s = {
      "external", "private", "internal", "linkonce", "linkonce_odr", "weak",
      "weak_odr", "common", "appending", "available_externally",
      "extern_weak"};
  return s;
}

inline Linkage linkage_from_word(const std::string& w) {
  static const std::pair<const char*, Linkage> table[] = {
      {"external", Linkage::External},
      {"private", Linkage::Private},
      {"internal", Linkage::Internal},
      {"linkonce", Linkage::LinkOnce},
      {"linkonce_odr", Linkage::LinkOnceODR},
      {"weak", Linkage::Weak},
      {"weak_odr", Linkage::WeakODR},
      {"common", Linkage::Common},
      {"appending", Linkage::Appending},
      {"available_externally", Linkage::AvailableExternally},
      {"extern_weak", Linkage::ExternWeak}};
  for (const auto& [name, l] : table)
    if (w == name) return l;
  return Linkage::External;
}

// Constant-expression opcodes that may appear as `op ( ... )` in operands.
inline const std::unordered_set<std::string>& constexpr_casts() {
  static const std::unordered_set<std::string> s = {
      "trunc", "zext", "sext", "fptoui", "fptosi", "uitofp", "sitofp",
      "fptrunc", "fpext", "ptrtoint", "inttoptr", "bitcast", "addrspacecast"};
  return s;
}

inline const std::unordered_set<std::string>& constexpr_binaries() {
  static const std::unordered_set<std::string> s = {
      "add", "sub", "mul", "shl", "lshr", "ashr", "and", "or", "xor",
      "udiv", "sdiv", "urem", "srem"};
  return s;
}

// Words that end the attribute tail of a function declaration: anything that
// begins the next top-level entity.
inline const std::unordered_set<std::string>& top_level_words() {
  static const std::unordered_set<std::string> s = {
      "define", "declare", "attributes", "target", "source_filename",
      "module", "uselistorder", "uselistorder_bb"};
  return s;
}

}  // namespace detail

// Recursive-descent parser for the supported IR dialect. In strict mode the
// first construct outside the subset throws UnsupportedConstruct; in lenient
// mode the construct is recorded, the rest of the statement skipped, and
// parsing continues.
class Parser {
public:
  Parser(std::string_view text, std::string module_name, ParseOptions opts)
      : opts_(opts) {
    if (text.size() > opts.max_bytes)
      throw FormatError("input exceeds " + std::to_string(opts.max_bytes) +
                        " bytes");
    tokens_ = Lexer(text).run();
    result_.module.name = std::move(module_name);
  }

  ParseResult run() {
    parse_top_level();
    resolve_module_references();
    return std::move(result_);
  }

private:
  // ---- token plumbing -----------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  Token take() {
    Token t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  bool at(Tok k) const { return peek().kind == k; }

  bool at_word(const char* w) const {
    return peek().kind == Tok::Word && peek().text == w;
  }

  Token expect(Tok k, const char* what) {
    if (!at(k))
      throw SyntaxError(peek().line, peek().col, what, describe(peek()));
    return take();
  }

  void expect_word(const char* w) {
    if (!at_word(w))
      throw SyntaxError(peek().line, peek().col, std::string("'") + w + "'",
                        describe(peek()));
    take();
  }

  bool accept(Tok k) {
    if (at(k)) {
      take();
      return true;
    }
    return false;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::GlobalId: return "'@" + t.text + "'";
      case Tok::LocalId: return "'%" + t.text + "'";
      case Tok::AttrId: return "'#" + t.text + "'";
      case Tok::MetaId: return "'!" + t.text + "'";
      case Tok::Label: return "label '" + t.text + ":'";
      default: return "'" + t.text + "'";
    }
  }

  // Records the construct in lenient mode, throws in strict mode.
  void flag(const std::string& construct, std::uint32_t line) {
    if (!opts_.lenient) throw UnsupportedConstruct(construct, line);
    result_.flags.push_back(SubsetFlag{construct, line});
  }

  void skip_rest_of_line() {
    const std::uint32_t line = peek().line;
    while (!at(Tok::End) && peek().line == line) take();
  }

  void skip_balanced(Tok open, Tok close) {
    int depth = 0;
    while (!at(Tok::End)) {
      if (at(open)) ++depth;
      if (at(close)) {
        --depth;
        take();
        if (depth == 0) return;
        continue;
      }
      take();
    }
  }

  // ---- numbers ------------------------------------------------------------

  static std::optional<std::int64_t> parse_i64(const std::string& s) {
    std::int64_t v = 0;
    const auto* b = s.data();
    const auto* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec == std::errc() && p == e) return v;
    return std::nullopt;
  }

  std::uint64_t expect_u64(const char* what) {
    Token t = expect(Tok::Int, what);
    std::uint64_t v = 0;
    auto [p, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc())
      throw SyntaxError(t.line, t.col, "an unsigned integer",
                        "'" + t.text + "'");
    return v;
  }

  static std::optional<double> parse_fp(const std::string& s) {
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
      const char c = s[2];
      if (c == 'H' || c == 'K' || c == 'L' || c == 'M' || c == 'R')
        return std::nullopt;  // non-double hex payloads stay textual
      std::uint64_t bits = 0;
      auto [p, ec] =
          std::from_chars(s.data() + 2, s.data() + s.size(), bits, 16);
      if (ec != std::errc()) return std::nullopt;
      double d;
      std::memcpy(&d, &bits, sizeof(d));
      return d;
    }
    try {
      return std::stod(s);
    } catch (...) {
      return std::nullopt;
    }
  }

  // ---- types --------------------------------------------------------------

  TypeRef intern(TypeDesc d) { return result_.module.types.intern(d); }

  TypeRef int_type(std::uint32_t bits) {
    TypeDesc d;
    d.kind = TypeKind::Integer;
    d.bit_width = bits;
    return intern(d);
  }

  TypeRef ptr_type() {
    TypeDesc d;
    d.kind = TypeKind::Pointer;
    return intern(d);
  }

  TypeRef void_type() {
    TypeDesc d;
    d.kind = TypeKind::Void;
    return intern(d);
  }

  TypeRef opaque_type() {
    TypeDesc d;
    d.kind = TypeKind::Opaque;
    return intern(d);
  }

  bool starts_type() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LocalId:
        return peek(1).kind != Tok::Equals;
      case Tok::LBrace:
      case Tok::LBracket:
      case Tok::Less:
        return true;
      case Tok::Word:
        return t.text == "void" || t.text == "ptr" || t.text == "opaque" ||
               detail::is_int_type_word(t.text) ||
               detail::float_type_words().count(t.text) > 0;
      default:
        return false;
    }
  }

  TypeRef parse_type() {
    TypeRef ref = parse_primary_type();
    for (;;) {
      if (at(Tok::Star)) {
        take();
        TypeDesc d;
        d.kind = TypeKind::Pointer;
        d.element = ref;
        ref = intern(d);
      } else if (at(Tok::LParen)) {
        ref = parse_function_suffix(ref);
      } else {
        break;
      }
    }
    return ref;
  }

  TypeRef parse_function_suffix(TypeRef ret) {
    expect(Tok::LParen, "'('");
    TypeDesc d;
    d.kind = TypeKind::Function;
    d.element = ret;
    if (!at(Tok::RParen)) {
      for (;;) {
        if (at(Tok::Ellipsis)) {
          take();
          d.varargs = true;
          break;
        }
        d.members.push_back(parse_type());
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RParen, "')'");
    return intern(d);
  }

  TypeRef parse_primary_type() {
    const Token t = peek();
    if (t.kind == Tok::LocalId) {
      take();
      return result_.module.types.declare_named(t.text);
    }
    if (t.kind == Tok::LBrace) return parse_struct_body(false);
    if (t.kind == Tok::LBracket) {
      take();
      const std::uint64_t n = expect_u64("an array length");
      expect_word("x");
      TypeDesc d;
      d.kind = TypeKind::Array;
      d.count = n;
      d.element = parse_type();
      expect(Tok::RBracket, "']'");
      return intern(d);
    }
    if (t.kind == Tok::Less) {
      take();
      if (at(Tok::LBrace)) {
        const TypeRef s = parse_struct_body(true);
        expect(Tok::Greater, "'>'");
        return s;
      }
      const std::uint64_t n = expect_u64("a vector length");
      expect_word("x");
      TypeDesc d;
      d.kind = TypeKind::Vector;
      d.count = n;
      d.element = parse_type();
      expect(Tok::Greater, "'>'");
      return intern(d);
    }
    if (t.kind == Tok::Word) {
      if (t.text == "void") {
        take();
        return void_type();
      }
      if (t.text == "ptr") {
        take();
        if (at_word("addrspace")) {
          take();
          skip_balanced(Tok::LParen, Tok::RParen);
        }
        return ptr_type();
      }
      if (t.text == "opaque") {
        take();
        return opaque_type();
      }
      if (detail::is_int_type_word(t.text)) {
        take();
        std::uint32_t bits = 0;
        std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(),
                        bits);
        return int_type(bits);
      }
      if (detail::float_type_words().count(t.text)) {
        take();
        TypeDesc d;
        d.kind = TypeKind::Float;
        d.bit_width = detail::float_bits(t.text);
        d.float_name = t.text;
        return intern(d);
      }
      if (t.text == "metadata" || t.text == "token" || t.text == "label" ||
          t.text == "x86_mmx" || t.text == "x86_amx") {
        flag("type " + t.text, t.line);
        take();
        return opaque_type();
      }
    }
    throw SyntaxError(t.line, t.col, "a type", describe(t));
  }

  TypeRef parse_struct_body(bool packed) {
    expect(Tok::LBrace, "'{'");
    TypeDesc d;
    d.kind = TypeKind::Struct;
    d.packed = packed;
    if (!at(Tok::RBrace)) {
      for (;;) {
        d.members.push_back(parse_type());
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RBrace, "'}'");
    return intern(d);
  }

  // ---- values -------------------------------------------------------------

  bool starts_value() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Float:
      case Tok::CStr:
      case Tok::GlobalId:
      case Tok::LocalId:
      case Tok::LBracket:
      case Tok::LBrace:
      case Tok::Less:
        return true;
      case Tok::Word:
        return is_value_word(t.text);
      default:
        return false;
    }
  }

  static bool is_value_word(const std::string& w) {
    return w == "true" || w == "false" || w == "null" || w == "none" ||
           w == "undef" || w == "poison" || w == "zeroinitializer" ||
           w == "getelementptr" || w == "blockaddress" ||
           w == "dso_local_equivalent" || w == "no_cfi" ||
           w == "icmp" || w == "fcmp" || w == "select" ||
           w == "shufflevector" || w == "extractelement" ||
           w == "insertelement" ||
           detail::constexpr_casts().count(w) > 0 ||
           detail::constexpr_binaries().count(w) > 0;
  }

  ValueInfo parse_value(TypeRef type) {
    const Token t = peek();
    switch (t.kind) {
      case Tok::LocalId: {
        take();
        ValueInfo v;
        v.id = t.text;
        v.kind = ValueKind::Local;  // refined during resolution
        v.type = type;
        return v;
      }
      case Tok::GlobalId: {
        take();
        ValueInfo v;
        v.id = t.text;
        v.kind = ValueKind::GlobalVariable;  // refined during resolution
        v.type = type;
        return v;
      }
      case Tok::Int: {
        take();
        ValueInfo v;
        v.kind = ValueKind::ConstantInt;
        v.type = type;
        v.payload = t.text;
        v.int_value = parse_i64(t.text);
        if (!v.int_value) v.fp_value = parse_fp(t.text);
        v.id = t.text;
        return v;
      }
      case Tok::Float: {
        take();
        ValueInfo v;
        v.kind = ValueKind::ConstantFp;
        v.type = type;
        v.payload = t.text;
        v.fp_value = parse_fp(t.text);
        v.id = t.text;
        return v;
      }
      case Tok::CStr: {
        take();
        ValueInfo v;
        v.kind = ValueKind::ConstantAggregate;
        v.type = type;
        v.payload = "c\"" + t.text + "\"";
        v.id = *v.payload;
        return v;
      }
      case Tok::LBracket:
        return parse_aggregate(type, Tok::LBracket, Tok::RBracket, "[", "]");
      case Tok::LBrace:
        return parse_aggregate(type, Tok::LBrace, Tok::RBrace, "{", "}");
      case Tok::Less:
        return parse_aggregate(type, Tok::Less, Tok::Greater, "<", ">");
      case Tok::Word:
        return parse_word_value(type, t);
      default:
        break;
    }
    throw SyntaxError(t.line, t.col, "a value", describe(t));
  }

  ValueInfo parse_aggregate(TypeRef type, Tok open, Tok close, const char* ob,
                            const char* cb) {
    expect(open, ob);
    ValueInfo v;
    v.kind = ValueKind::ConstantAggregate;
    v.type = type;
    std::string text(ob);
    if (!at(close)) {
      for (;;) {
        const TypeRef et = parse_type();
        ValueInfo child = parse_value(et);
        text += (text.size() > 1) ? ", " : " ";
        text += result_.module.types.print(et) + " " + value_text(child);
        v.children.push_back(std::move(child));
        if (!accept(Tok::Comma)) break;
      }
      text += " ";
    }
    expect(close, cb);
    text += cb;
    v.payload = text;
    v.id = text;
    return v;
  }

  ValueInfo parse_word_value(TypeRef type, const Token& t) {
    const std::string& w = t.text;
    if (w == "true" || w == "false") {
      take();
      ValueInfo v;
      v.kind = ValueKind::ConstantInt;
      v.type = type;
      v.payload = w;
      v.int_value = (w == "true") ? 1 : 0;
      v.id = w;
      return v;
    }
    if (w == "null" || w == "none" || w == "zeroinitializer") {
      take();
      ValueInfo v;
      v.kind = ValueKind::ConstantOther;
      v.type = type;
      v.payload = w;
      v.id = w;
      return v;
    }
    if (w == "undef" || w == "poison") {
      take();
      ValueInfo v;
      v.kind = ValueKind::Undef;
      v.type = type;
      v.payload = w;
      v.id = w;
      return v;
    }
    if (w == "blockaddress" || w == "dso_local_equivalent" || w == "no_cfi") {
      flag(w, t.line);
      take();
      if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
      ValueInfo v;
      v.kind = ValueKind::ConstantOther;
      v.type = type;
      v.payload = w;
      v.id = w;
      return v;
    }
    if (w == "getelementptr" || detail::constexpr_casts().count(w) ||
        detail::constexpr_binaries().count(w) || w == "icmp" || w == "fcmp" ||
        w == "select" || w == "shufflevector" || w == "extractelement" ||
        w == "insertelement") {
      return parse_constexpr(type, w);
    }
    throw SyntaxError(t.line, t.col, "a value", describe(t));
  }

  // Constant expressions: `op [flags] ( typed operands... )`, with casts
  // spelled `op ( T V to T2 )`.
  ValueInfo parse_constexpr(TypeRef type, const std::string& op) {
    take();  // op word
    ValueInfo v;
    v.kind = ValueKind::ConstantAggregate;
    v.type = type;
    v.payload = op;
    if (op == "icmp" || op == "fcmp") {
      v.flags.push_back(expect(Tok::Word, "a comparison predicate").text);
    }
    while (at(Tok::Word) &&
           (peek().text == "inbounds" || peek().text == "nuw" ||
            peek().text == "nsw" || peek().text == "exact" ||
            detail::fast_math_flags().count(peek().text))) {
      v.flags.push_back(take().text);
    }
    expect(Tok::LParen, "'('");
    if (op == "getelementptr") {
      v.aux_type = parse_type();
      expect(Tok::Comma, "','");
    }
    const bool cast_form = detail::constexpr_casts().count(op) > 0;
    for (;;) {
      const TypeRef et = parse_type();
      v.children.push_back(parse_value(et));
      if (cast_form) {
        expect_word("to");
        v.aux_type = parse_type();  // destination type
        break;
      }
      if (!accept(Tok::Comma)) break;
    }
    expect(Tok::RParen, "')'");
    v.id = constexpr_key(v);
    return v;
  }

  std::string value_text(const ValueInfo& v) const {
    switch (v.kind) {
      case ValueKind::Argument:
      case ValueKind::Local:
        return "%" + v.id;
      case ValueKind::GlobalVariable:
      case ValueKind::FunctionRef:
        return "@" + v.id;
      default:
        return v.payload ? *v.payload : v.id;
    }
  }

  std::string constexpr_key(const ValueInfo& v) const {
    std::string s = *v.payload;
    for (const auto& f : v.flags) s += " " + f;
    s += " (";
    if (v.aux_type != kNoType && *v.payload == "getelementptr")
      s += result_.module.types.print(v.aux_type) + ", ";
    for (std::size_t i = 0; i < v.children.size(); ++i) {
      if (i) s += ", ";
      s += result_.module.types.print(v.children[i].type) + " " +
           value_text(v.children[i]);
    }
    if (v.aux_type != kNoType && *v.payload != "getelementptr")
      s += " to " + result_.module.types.print(v.aux_type);
    s += ")";
    return s;
  }

  ValueInfo parse_typed_value() {
    const TypeRef t = parse_type();
    return parse_value(t);
  }

  // ---- attributes ---------------------------------------------------------

  // Parses one attribute word (optionally with a parenthesized payload, a
  // following integer, or a ="value" suffix) into `set`.
  bool parse_attr_word(AttributeSet& set) {
    if (!at(Tok::Word)) return false;
    const std::string w = take().text;
    if (w == "align" || w == "alignstack" || w == "dereferenceable" ||
        w == "dereferenceable_or_null") {
      if (at(Tok::Int)) take();
      else if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
      set.add(Attr::Other);
      return true;
    }
    if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
    if (at(Tok::Equals)) {  // "key"="value" string attributes
      take();
      if (at(Tok::Str)) take();
      set.add(Attr::Other);
      return true;
    }
    const auto known = attr_from_name(w);
    set.add(known ? *known : Attr::Other);
    return true;
  }

  // ---- top level ----------------------------------------------------------

  void parse_top_level() {
    while (!at(Tok::End)) {
      const Token t = peek();
      if (t.kind == Tok::Word) {
        if (t.text == "source_filename") {
          take();
          expect(Tok::Equals, "'='");
          result_.module.source_filename = expect(Tok::Str, "a string").text;
          continue;
        }
        if (t.text == "target") {
          take();
          const Token what = expect(Tok::Word, "'triple' or 'datalayout'");
          expect(Tok::Equals, "'='");
          const std::string s = expect(Tok::Str, "a string").text;
          if (what.text == "triple") result_.module.target_triple = s;
          else result_.module.target_datalayout = s;
          continue;
        }
        if (t.text == "define") {
          parse_function(false);
          continue;
        }
        if (t.text == "declare") {
          parse_function(true);
          continue;
        }
        if (t.text == "attributes") {
          parse_attribute_group();
          continue;
        }
        if (t.text == "module") {  // module-level asm
          flag("module_asm", t.line);
          skip_rest_of_line();
          continue;
        }
        if (t.text == "uselistorder" || t.text == "uselistorder_bb") {
          flag("uselistorder", t.line);
          skip_rest_of_line();
          continue;
        }
        if (t.text[0] == '$') {
          flag("comdat", t.line);
          skip_rest_of_line();
          continue;
        }
        flag(t.text, t.line);
        skip_rest_of_line();
        continue;
      }
      if (t.kind == Tok::MetaId) {
        flag("metadata", t.line);
        skip_rest_of_line();
        continue;
      }
      if (t.kind == Tok::GlobalId) {
        parse_global();
        continue;
      }
      if (t.kind == Tok::LocalId) {
        parse_named_type();
        continue;
      }
      flag("top-level " + describe(t), t.line);
      skip_rest_of_line();
    }
  }

  void parse_named_type() {
    const Token name = expect(Tok::LocalId, "a type name");
    expect(Tok::Equals, "'='");
    expect_word("type");
    const TypeRef ref = result_.module.types.declare_named(name.text);
    if (at_word("opaque")) {
      take();
      TypeDesc d;
      d.kind = TypeKind::Opaque;
      result_.module.types.define_named(ref, d);
    } else {
      const bool packed = at(Tok::Less);
      if (packed) take();
      const TypeRef body = parse_struct_body(packed);
      if (packed) expect(Tok::Greater, "'>'");
      TypeDesc d = result_.module.types.at(body);
      result_.module.types.define_named(ref, d);
    }
    result_.module.named_types.emplace_back(name.text, ref);
  }

  void parse_attribute_group() {
    expect_word("attributes");
    const Token id = expect(Tok::AttrId, "an attribute group id");
    expect(Tok::Equals, "'='");
    expect(Tok::LBrace, "'{'");
    AttributeSet set;
    while (!at(Tok::RBrace) && !at(Tok::End)) {
      if (at(Tok::Str)) {  // "key" or "key"="value"
        take();
        if (accept(Tok::Equals)) {
          if (at(Tok::Str)) take();
        }
        set.add(Attr::Other);
        continue;
      }
      if (!parse_attr_word(set)) take();
    }
    expect(Tok::RBrace, "'}'");
    attr_groups_[id.text] = set;
  }

  // Consumes linkage/visibility/dso_local and assorted prefix keywords.
  // Returns true when an explicit `external` / `extern_weak` keyword was
  // present (which for globals means no initializer follows).
  bool parse_linkage_prefix(Linkage& linkage, AttributeSet& attrs) {
    bool explicit_external = false;
    bool saw_linkage = false;
    for (;;) {
      if (!at(Tok::Word)) break;
      const std::string& w = peek().text;
      if (detail::linkage_words().count(w)) {
        linkage = detail::linkage_from_word(w);
        attrs.add(*attr_from_name(w));
        saw_linkage = true;
        if (w == "external" || w == "extern_weak") explicit_external = true;
        take();
        continue;
      }
      if (w == "hidden" || w == "protected") {
        attrs.add(*attr_from_name(w));
        take();
        continue;
      }
      if (w == "default") {  // default visibility
        take();
        continue;
      }
      if (w == "dso_local" || w == "dso_preemptable") {
        if (w == "dso_local") attrs.add(Attr::DsoLocal);
        take();
        continue;
      }
      if (w == "thread_local") {
        take();
        if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
        continue;
      }
      if (w == "unnamed_addr" || w == "local_unnamed_addr" ||
          w == "externally_initialized") {
        take();
        continue;
      }
      break;
    }
    if (!saw_linkage) attrs.add(Attr::External);
    return explicit_external;
  }

  void parse_global() {
    const Token name = expect(Tok::GlobalId, "a global name");
    expect(Tok::Equals, "'='");
    GlobalValue g;
    g.name = name.text;
    const bool explicit_external = parse_linkage_prefix(g.linkage, g.attrs);
    if (at_word("ifunc") || at_word("alias")) {
      flag(peek().text, peek().line);
      skip_rest_of_line();
      return;
    }
    if (at_word("addrspace")) {
      take();
      skip_balanced(Tok::LParen, Tok::RParen);
    }
    if (at_word("constant")) {
      g.is_constant = true;
      take();
    } else {
      expect_word("global");
    }
    g.value_type = parse_type();
    if (!explicit_external) g.initializer = parse_value(g.value_type);
    parse_global_tail(g);
    result_.module.globals.push_back(std::move(g));
  }

  void parse_global_tail(GlobalValue& g) {
    while (accept(Tok::Comma)) {
      if (at_word("align")) {
        take();
        g.alignment = static_cast<std::uint32_t>(expect_u64("an alignment"));
        continue;
      }
      if (at_word("section") || at_word("partition")) {
        take();
        expect(Tok::Str, "a section name");
        continue;
      }
      if (at_word("comdat")) {
        take();
        if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
        continue;
      }
      if (at(Tok::MetaId)) {
        flag("metadata", peek().line);
        skip_rest_of_line();
        return;
      }
      if (at(Tok::AttrId)) {
        take();
        continue;
      }
      flag("global tail " + describe(peek()), peek().line);
      skip_rest_of_line();
      return;
    }
  }

  // ---- functions ----------------------------------------------------------

  void parse_function(bool is_declaration) {
    take();  // define / declare
    Function f;
    f.is_declaration = is_declaration;
    parse_linkage_prefix(f.linkage, f.attrs);
    // calling convention
    if (at(Tok::Word)) {
      const std::string& w = peek().text;
      if (w == "ccc") {
        take();
      } else if (w == "fastcc") {
        f.calling_convention = CallingConv::Fast;
        f.attrs.add(Attr::FastCC);
        take();
      } else if (w == "coldcc") {
        f.calling_convention = CallingConv::Cold;
        f.attrs.add(Attr::ColdCC);
        take();
      } else if (w == "cc") {
        f.calling_convention = CallingConv::Other;
        f.attrs.add(Attr::Other);
        take();
        if (at(Tok::Int)) take();
      } else if (w.size() > 4 && w.substr(w.size() - 2) == "cc" &&
                 !detail::is_int_type_word(w) && w != "musttail") {
        f.calling_convention = CallingConv::Other;
        f.attrs.add(Attr::Other);
        take();
      }
    }
    // return attributes
    while (at(Tok::Word)) {
      const std::string& w = peek().text;
      if (w == "zeroext" || w == "signext" || w == "inreg" || w == "noalias" ||
          w == "nonnull" || w == "noundef") {
        const auto a = attr_from_name(w);
        f.attrs.add(a ? *a : Attr::Other);
        take();
        continue;
      }
      break;
    }
    f.return_type = parse_type();
    const Token name = expect(Tok::GlobalId, "a function name");
    f.name = name.text;
    parse_params(f);

    TypeDesc fnty;
    fnty.kind = TypeKind::Function;
    fnty.element = f.return_type;
    for (const auto& a : f.args) fnty.members.push_back(a.type);
    fnty.varargs = f.varargs;
    f.type = intern(fnty);

    // trailing attributes / groups, up to the body or the next entity
    std::vector<std::string> groups;
    for (;;) {
      if (at(Tok::LBrace) || at(Tok::End)) break;
      if (at(Tok::AttrId)) {
        groups.push_back(take().text);
        continue;
      }
      if (at(Tok::Str)) {  // "key"="value" at function level
        take();
        if (accept(Tok::Equals)) {
          if (at(Tok::Str)) take();
        }
        f.attrs.add(Attr::Other);
        continue;
      }
      if (at(Tok::MetaId)) {
        flag("metadata", peek().line);
        take();
        if (at(Tok::MetaId)) take();
        continue;
      }
      if (at(Tok::Word)) {
        const std::string& w = peek().text;
        if (detail::top_level_words().count(w)) break;
        if (w == "section" || w == "partition" || w == "gc") {
          take();
          if (at(Tok::Str)) take();
          continue;
        }
        if (w == "comdat") {
          take();
          if (at(Tok::LParen)) skip_balanced(Tok::LParen, Tok::RParen);
          continue;
        }
        if (w == "personality" || w == "prefix" || w == "prologue") {
          const Token kw = take();
          flag(kw.text, kw.line);
          while (!at(Tok::LBrace) && !at(Tok::End) && peek().line == kw.line)
            take();
          continue;
        }
        AttributeSet tmp;
        parse_attr_word(tmp);
        for (Attr a : tmp.entries) f.attrs.add(a);
        continue;
      }
      break;  // GlobalId / LocalId / anything else starts the next entity
    }
    pending_fn_groups_.emplace_back(result_.module.functions.size(), groups);

    if (!is_declaration) parse_body(f);
    result_.module.functions.push_back(std::move(f));
  }

  void parse_params(Function& f) {
    expect(Tok::LParen, "'('");
    std::uint32_t unnamed = 0;
    if (!at(Tok::RParen)) {
      for (;;) {
        if (at(Tok::Ellipsis)) {
          take();
          f.varargs = true;
          break;
        }
        const TypeRef ty = parse_type();
        AttributeSet attrs;
        for (;;) {
          if (at(Tok::Str)) {
            take();
            if (accept(Tok::Equals)) {
              if (at(Tok::Str)) take();
            }
            attrs.add(Attr::Other);
            continue;
          }
          if (at(Tok::Word) && !is_value_word(peek().text)) {
            if (parse_attr_word(attrs)) continue;
          }
          break;
        }
        ValueInfo arg;
        arg.kind = ValueKind::Argument;
        arg.type = ty;
        if (at(Tok::LocalId)) {
          arg.id = take().text;
          // Explicit numeric names consume slots in the implicit numbering.
          if (auto n = parse_i64(arg.id); n && *n >= 0)
            unnamed = std::max(unnamed, static_cast<std::uint32_t>(*n) + 1);
        } else {
          arg.id = std::to_string(unnamed++);
        }
        f.args.push_back(std::move(arg));
        f.arg_attrs.push_back(std::move(attrs));
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RParen, "')'");
    implicit_counter_ = unnamed;
  }

  // ---- function bodies ----------------------------------------------------

  void parse_body(Function& f) {
    expect(Tok::LBrace, "'{'");
    local_scope_.clear();
    for (const auto& a : f.args)
      local_scope_[a.id] = {ValueKind::Argument, a.type};
    block_labels_.clear();

    while (!at(Tok::RBrace) && !at(Tok::End)) {
      BasicBlock block;
      if (at(Tok::Label)) {
        block.label = take().text;
      } else if (f.blocks.empty()) {
        block.label = std::to_string(implicit_counter_++);
      } else {
        throw SyntaxError(peek().line, peek().col, "a block label",
                          describe(peek()));
      }
      block_labels_.insert(block.label);
      bool terminated = false;
      while (!terminated && !at(Tok::RBrace) && !at(Tok::Label) &&
             !at(Tok::End)) {
        if (auto instr = parse_instruction()) {
          if (instr->result) {
            local_scope_[instr->result->id] = {ValueKind::Local,
                                               instr->result_type};
          }
          terminated = is_terminator(instr->opcode);
          block.instructions.push_back(std::move(*instr));
        }
      }
      if (!terminated) {
        flag("missing_terminator", peek().line);
        Instruction u;
        u.opcode = Opcode::Unreachable;
        u.line = peek().line;
        block.instructions.push_back(std::move(u));
      }
      f.blocks.push_back(std::move(block));
    }
    expect(Tok::RBrace, "'}'");
    resolve_function_references(f);
  }

  // Returns nullopt when the instruction was outside the subset and skipped
  // (lenient mode only; strict mode throws from flag()).
  std::optional<Instruction> parse_instruction() {
    Instruction ins;
    ins.line = peek().line;
    ins.col = peek().col;

    std::optional<std::string> result_name;
    if (at(Tok::LocalId) && peek(1).kind == Tok::Equals) {
      result_name = take().text;
      take();  // '='
    }

    if (!at(Tok::Word))
      throw SyntaxError(peek().line, peek().col, "an opcode",
                        describe(peek()));
    const Token op_tok = peek();
    const std::string w = op_tok.text;

    static const std::unordered_set<std::string> unsupported = {
        "invoke", "callbr", "indirectbr", "resume", "cleanupret", "catchret",
        "catchswitch", "cleanuppad", "catchpad", "landingpad"};
    if (unsupported.count(w)) {
      flag(w, op_tok.line);
      skip_rest_of_line();
      register_skipped_result(result_name);
      return std::nullopt;
    }

    std::optional<Opcode> op;
    if (w == "tail" || w == "musttail" || w == "notail") {
      take();
      ins.flags.push_back(w);
      expect_word("call");
      op = Opcode::Call;
    } else {
      op = opcode_from_name(w);
      if (!op || *op == Opcode::UserOp1 || *op == Opcode::UserOp2 ||
          *op == Opcode::Other) {
        flag(w, op_tok.line);
        skip_rest_of_line();
        register_skipped_result(result_name);
        return std::nullopt;
      }
      take();  // opcode word
    }
    ins.opcode = *op;

    switch (*op) {
      case Opcode::Ret: parse_ret(ins); break;
      case Opcode::Br: parse_br(ins); break;
      case Opcode::Switch: parse_switch(ins); break;
      case Opcode::Unreachable: break;
      case Opcode::FNeg: parse_unary(ins); break;
      case Opcode::Add: case Opcode::FAdd: case Opcode::Sub:
      case Opcode::FSub: case Opcode::Mul: case Opcode::FMul:
      case Opcode::UDiv: case Opcode::SDiv: case Opcode::FDiv:
      case Opcode::URem: case Opcode::SRem: case Opcode::FRem:
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr:
      case Opcode::And: case Opcode::Or: case Opcode::Xor:
        parse_binary(ins);
        break;
      case Opcode::Alloca: parse_alloca(ins); break;
      case Opcode::Load: parse_load(ins); break;
      case Opcode::Store: parse_store(ins); break;
      case Opcode::GetElementPtr: parse_gep(ins); break;
      case Opcode::Fence: parse_fence(ins); break;
      case Opcode::AtomicCmpXchg: parse_cmpxchg(ins); break;
      case Opcode::AtomicRMW: parse_atomicrmw(ins); break;
      case Opcode::Trunc: case Opcode::ZExt: case Opcode::SExt:
      case Opcode::FPToUI: case Opcode::FPToSI: case Opcode::UIToFP:
      case Opcode::SIToFP: case Opcode::FPTrunc: case Opcode::FPExt:
      case Opcode::PtrToInt: case Opcode::IntToPtr: case Opcode::BitCast:
      case Opcode::AddrSpaceCast:
        parse_cast(ins);
        break;
      case Opcode::ICmp: case Opcode::FCmp: parse_cmp(ins); break;
      case Opcode::Phi: parse_phi(ins); break;
      case Opcode::Call:
        if (!parse_call(ins, op_tok.line)) {
          register_skipped_result(result_name);
          return std::nullopt;
        }
        break;
      case Opcode::Select: parse_select(ins); break;
      case Opcode::VAArg: parse_va_arg(ins); break;
      case Opcode::ExtractElement: parse_extractelement(ins); break;
      case Opcode::InsertElement: parse_insertelement(ins); break;
      case Opcode::ShuffleVector: parse_shufflevector(ins); break;
      case Opcode::ExtractValue: parse_extractvalue(ins); break;
      case Opcode::InsertValue: parse_insertvalue(ins); break;
      case Opcode::Freeze: parse_freeze(ins); break;
      default:
        flag(w, op_tok.line);
        skip_rest_of_line();
        register_skipped_result(result_name);
        return std::nullopt;
    }

    parse_instruction_tail(ins);

    if (result_name) {
      ValueInfo r;
      r.id = *result_name;
      r.kind = ValueKind::Local;
      r.type = ins.result_type;
      ins.result = std::move(r);
    }
    return ins;
  }

  void register_skipped_result(const std::optional<std::string>& name) {
    if (name) local_scope_[*name] = {ValueKind::Local, opaque_type()};
  }

  // Trailing `, align N` and metadata attachments shared by many opcodes.
  void parse_instruction_tail(Instruction& ins) {
    while (at(Tok::Comma)) {
      if (peek(1).kind == Tok::Word && peek(1).text == "align") {
        take();
        take();
        ins.alignment = static_cast<std::uint32_t>(expect_u64("an alignment"));
        continue;
      }
      if (peek(1).kind == Tok::MetaId) {
        take();
        flag("metadata", peek().line);
        take();  // !name
        if (at(Tok::MetaId)) take();
        continue;
      }
      break;
    }
  }

  void parse_fast_math(Instruction& ins) {
    while (at(Tok::Word) && detail::fast_math_flags().count(peek().text)) {
      ins.flags.push_back(take().text);
    }
  }

  void parse_ret(Instruction& ins) {
    if (at_word("void")) {
      take();
      return;
    }
    ins.operands.push_back(parse_typed_value());
  }

  void parse_br(Instruction& ins) {
    if (at_word("label")) {
      take();
      ins.successors.push_back(expect(Tok::LocalId, "a block label").text);
      return;
    }
    const TypeRef ty = parse_type();
    ins.operands.push_back(parse_value(ty));
    expect(Tok::Comma, "','");
    expect_word("label");
    ins.successors.push_back(expect(Tok::LocalId, "a block label").text);
    expect(Tok::Comma, "','");
    expect_word("label");
    ins.successors.push_back(expect(Tok::LocalId, "a block label").text);
  }

  void parse_switch(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    expect_word("label");
    ins.successors.push_back(expect(Tok::LocalId, "a block label").text);
    expect(Tok::LBracket, "'['");
    while (!at(Tok::RBracket) && !at(Tok::End)) {
      ins.operands.push_back(parse_typed_value());
      expect(Tok::Comma, "','");
      expect_word("label");
      ins.successors.push_back(expect(Tok::LocalId, "a block label").text);
    }
    expect(Tok::RBracket, "']'");
  }

  void parse_unary(Instruction& ins) {
    parse_fast_math(ins);
    const TypeRef ty = parse_type();
    ins.result_type = ty;
    ins.operands.push_back(parse_value(ty));
  }

  void parse_binary(Instruction& ins) {
    while (at(Tok::Word) &&
           (peek().text == "nuw" || peek().text == "nsw" ||
            peek().text == "exact" ||
            detail::fast_math_flags().count(peek().text))) {
      ins.flags.push_back(take().text);
    }
    const TypeRef ty = parse_type();
    ins.result_type = ty;
    ins.operands.push_back(parse_value(ty));
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_value(ty));
  }

  void parse_alloca(Instruction& ins) {
    if (at_word("inalloca")) take();
    ins.aux_type = parse_type();
    ins.result_type = ptr_type();
    if (at(Tok::Comma) && peek(1).kind == Tok::Word) {
      const std::string& w = peek(1).text;
      if (w == "addrspace") {
        take();
        take();
        skip_balanced(Tok::LParen, Tok::RParen);
      } else if (w != "align") {
        take();
        ins.operands.push_back(parse_typed_value());
      }
    }
  }

  void parse_atomic_suffix(Instruction& ins) {
    if (at_word("syncscope")) {
      take();
      skip_balanced(Tok::LParen, Tok::RParen);
    }
    while (at(Tok::Word) && detail::atomic_orderings().count(peek().text)) {
      ins.orderings.push_back(take().text);
    }
  }

  void parse_load(Instruction& ins) {
    if (at_word("atomic")) {
      take();
      ins.flags.push_back("atomic");
    }
    if (at_word("volatile")) {
      take();
      ins.flags.push_back("volatile");
    }
    ins.result_type = parse_type();
    expect(Tok::Comma, "','");
    const TypeRef pty = parse_type();
    ins.operands.push_back(parse_value(pty));
    parse_atomic_suffix(ins);
  }

  void parse_store(Instruction& ins) {
    if (at_word("atomic")) {
      take();
      ins.flags.push_back("atomic");
    }
    if (at_word("volatile")) {
      take();
      ins.flags.push_back("volatile");
    }
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    const TypeRef pty = parse_type();
    ins.operands.push_back(parse_value(pty));
    parse_atomic_suffix(ins);
  }

  void parse_gep(Instruction& ins) {
    if (at_word("inbounds")) {
      take();
      ins.flags.push_back("inbounds");
    }
    ins.aux_type = parse_type();
    expect(Tok::Comma, "','");
    const TypeRef base_ty = parse_type();
    ins.operands.push_back(parse_value(base_ty));
    while (at(Tok::Comma)) {
      if (peek(1).kind == Tok::Word && peek(1).text == "align") break;
      if (peek(1).kind == Tok::MetaId) break;
      take();
      ins.operands.push_back(parse_typed_value());
    }
    const bool vector_base =
        result_.module.types.at(base_ty).kind == TypeKind::Vector;
    if (vector_base) {
      TypeDesc d;
      d.kind = TypeKind::Vector;
      d.count = result_.module.types.at(base_ty).count;
      d.element = ptr_type();
      ins.result_type = intern(d);
    } else {
      ins.result_type = ptr_type();
    }
  }

  void parse_fence(Instruction& ins) { parse_atomic_suffix(ins); }

  void parse_cmpxchg(Instruction& ins) {
    if (at_word("weak")) {
      take();
      ins.flags.push_back("weak");
    }
    if (at_word("volatile")) {
      take();
      ins.flags.push_back("volatile");
    }
    const TypeRef pty = parse_type();
    ins.operands.push_back(parse_value(pty));
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    parse_atomic_suffix(ins);
    TypeDesc d;
    d.kind = TypeKind::Struct;
    d.members = {ins.operands[1].type, int_type(1)};
    ins.result_type = intern(d);
  }

  void parse_atomicrmw(Instruction& ins) {
    if (at_word("volatile")) {
      take();
      ins.flags.push_back("volatile");
    }
    ins.sub_op = expect(Tok::Word, "an atomicrmw operation").text;
    const TypeRef pty = parse_type();
    ins.operands.push_back(parse_value(pty));
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    parse_atomic_suffix(ins);
    ins.result_type = ins.operands[1].type;
  }

  void parse_cast(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect_word("to");
    ins.result_type = parse_type();
  }

  void parse_cmp(Instruction& ins) {
    if (ins.opcode == Opcode::FCmp) parse_fast_math(ins);
    ins.sub_op = expect(Tok::Word, "a comparison predicate").text;
    const TypeRef ty = parse_type();
    ins.operands.push_back(parse_value(ty));
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_value(ty));
    const TypeDesc& d = result_.module.types.at(ty);
    if (d.kind == TypeKind::Vector) {
      TypeDesc v;
      v.kind = TypeKind::Vector;
      v.count = d.count;
      v.element = int_type(1);
      ins.result_type = intern(v);
    } else {
      ins.result_type = int_type(1);
    }
  }

  void parse_phi(Instruction& ins) {
    parse_fast_math(ins);
    const TypeRef ty = parse_type();
    ins.result_type = ty;
    for (;;) {
      expect(Tok::LBracket, "'['");
      ins.operands.push_back(parse_value(ty));
      expect(Tok::Comma, "','");
      ins.phi_blocks.push_back(expect(Tok::LocalId, "a block label").text);
      expect(Tok::RBracket, "']'");
      if (!accept(Tok::Comma)) break;
    }
  }

  void parse_select(Instruction& ins) {
    parse_fast_math(ins);
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    ins.result_type = ins.operands[1].type;
  }

  void parse_va_arg(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.result_type = parse_type();
  }

  void parse_extractelement(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    const TypeDesc& v = result_.module.types.at(ins.operands[0].type);
    ins.result_type = v.kind == TypeKind::Vector ? v.element : opaque_type();
  }

  void parse_insertelement(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    ins.result_type = ins.operands[0].type;
  }

  void parse_shufflevector(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    const TypeDesc& a = result_.module.types.at(ins.operands[0].type);
    const TypeDesc& m = result_.module.types.at(ins.operands[2].type);
    if (a.kind == TypeKind::Vector && m.kind == TypeKind::Vector) {
      TypeDesc d;
      d.kind = TypeKind::Vector;
      d.count = m.count;
      d.element = a.element;
      ins.result_type = intern(d);
    } else {
      ins.result_type = ins.operands[0].type;
    }
  }

  TypeRef navigate_aggregate(TypeRef ty,
                             const std::vector<std::uint64_t>& idx) {
    TypeRef cur = ty;
    for (std::uint64_t i : idx) {
      const TypeDesc& d = result_.module.types.at(cur);
      if (d.kind == TypeKind::Struct) {
        if (i >= d.members.size()) return opaque_type();
        cur = d.members[static_cast<std::size_t>(i)];
      } else if (d.kind == TypeKind::Array || d.kind == TypeKind::Vector) {
        cur = d.element;
      } else {
        return opaque_type();
      }
    }
    return cur;
  }

  void parse_extractvalue(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    while (at(Tok::Comma)) {
      if (peek(1).kind != Tok::Int) break;
      take();
      ins.indices.push_back(expect_u64("an index"));
    }
    ins.result_type = navigate_aggregate(ins.operands[0].type, ins.indices);
  }

  void parse_insertvalue(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    expect(Tok::Comma, "','");
    ins.operands.push_back(parse_typed_value());
    while (at(Tok::Comma)) {
      if (peek(1).kind != Tok::Int) break;
      take();
      ins.indices.push_back(expect_u64("an index"));
    }
    ins.result_type = ins.operands[0].type;
  }

  void parse_freeze(Instruction& ins) {
    ins.operands.push_back(parse_typed_value());
    ins.result_type = ins.operands[0].type;
  }

  // Returns false when the call used a construct outside the subset (inline
  // asm) and was skipped.
  bool parse_call(Instruction& ins, std::uint32_t line) {
    parse_fast_math(ins);
    // optional calling convention + return attributes at the call site
    while (at(Tok::Word)) {
      const std::string& w = peek().text;
      if (w == "ccc" || w == "fastcc" || w == "coldcc" || w == "cc") {
        take();
        if (at(Tok::Int)) take();
        continue;
      }
      if (w == "zeroext" || w == "signext" || w == "inreg" || w == "noalias" ||
          w == "nonnull" || w == "noundef") {
        take();
        continue;
      }
      break;
    }
    TypeRef ty = parse_type();
    // A '(' directly after the type means the full function type was spelled
    // out (varargs and function-pointer calls).
    if (at(Tok::LParen) &&
        result_.module.types.at(ty).kind != TypeKind::Function) {
      ty = parse_function_suffix(ty);
    }
    TypeRef fnty = kNoType;
    if (result_.module.types.at(ty).kind == TypeKind::Function) {
      fnty = ty;
      ins.result_type = result_.module.types.at(ty).element;
      ins.aux_type = fnty;
    } else {
      ins.result_type = ty;
    }
    if (at_word("asm")) {
      flag("inline_asm", line);
      skip_rest_of_line();
      return false;
    }
    // callee
    ValueInfo callee;
    if (at(Tok::GlobalId)) {
      const Token t = take();
      callee.id = t.text;
      callee.kind = ValueKind::GlobalVariable;
      callee.type = fnty != kNoType ? fnty : ptr_type();
    } else if (at(Tok::LocalId)) {
      const Token t = take();
      callee.id = t.text;
      callee.kind = ValueKind::Local;
      callee.type = ptr_type();
    } else {
      callee = parse_value(fnty != kNoType ? fnty : ptr_type());
    }
    ins.operands.push_back(std::move(callee));
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      for (;;) {
        const TypeRef aty = parse_type();
        AttributeSet ignored;
        for (;;) {
          if (at(Tok::Str)) {
            take();
            if (accept(Tok::Equals)) {
              if (at(Tok::Str)) take();
            }
            continue;
          }
          if (at(Tok::Word) && !is_value_word(peek().text)) {
            if (parse_attr_word(ignored)) continue;
          }
          break;
        }
        ins.operands.push_back(parse_value(aty));
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RParen, "')'");
    // trailing call-site attributes
    for (;;) {
      if (at(Tok::AttrId)) {
        take();
        continue;
      }
      if (at(Tok::Word)) {
        const std::string& w = peek().text;
        if (w == "nounwind" || w == "noreturn" || w == "readonly" ||
            w == "readnone" || w == "willreturn" || w == "noundef" ||
            w == "memory" || w == "cold") {
          AttributeSet ignored;
          parse_attr_word(ignored);
          continue;
        }
      }
      break;
    }
    return true;
  }

  // ---- reference resolution -----------------------------------------------

  void resolve_function_references(Function& f) {
    for (auto& block : f.blocks) {
      for (auto& ins : block.instructions) {
        for (auto& op : ins.operands) resolve_local(op, ins.line);
        for (const auto& s : ins.successors) {
          if (!block_labels_.count(s)) unresolved_label(s, ins.line);
        }
        for (const auto& s : ins.phi_blocks) {
          if (!block_labels_.count(s)) unresolved_label(s, ins.line);
        }
      }
    }
  }

  void resolve_local(ValueInfo& v, std::uint32_t line) {
    for (auto& child : v.children) resolve_local(child, line);
    if (v.kind != ValueKind::Local) return;
    auto it = local_scope_.find(v.id);
    if (it == local_scope_.end()) {
      if (!opts_.lenient) throw UnresolvedReference("%" + v.id);
      result_.flags.push_back(SubsetFlag{"unresolved_reference", line});
      return;
    }
    v.kind = it->second.first;
    if (v.type == kNoType) v.type = it->second.second;
  }

  void unresolved_label(const std::string& s, std::uint32_t line) {
    if (!opts_.lenient) throw UnresolvedReference("%" + s);
    result_.flags.push_back(SubsetFlag{"unresolved_reference", line});
  }

  void resolve_module_references() {
    // attribute groups referenced from function signatures
    for (auto& [fn_index, groups] : pending_fn_groups_) {
      for (const auto& gid : groups) {
        auto it = attr_groups_.find(gid);
        if (it == attr_groups_.end()) continue;
        for (Attr a : it->second.entries)
          result_.module.functions[fn_index].attrs.add(a);
      }
    }
    // global/function symbol references
    std::unordered_map<std::string, bool> symbols;  // name -> is_function
    for (const auto& g : result_.module.globals) symbols[g.name] = false;
    for (const auto& f : result_.module.functions) symbols[f.name] = true;
    for (auto& g : result_.module.globals) {
      if (g.initializer) resolve_symbol(*g.initializer, symbols);
    }
    for (auto& f : result_.module.functions) {
      for (auto& b : f.blocks) {
        for (auto& ins : b.instructions) {
          for (auto& op : ins.operands) resolve_symbol(op, ins.line, symbols);
        }
      }
    }
  }

  void resolve_symbol(ValueInfo& v,
                      const std::unordered_map<std::string, bool>& symbols) {
    resolve_symbol(v, 0, symbols);
  }

  void resolve_symbol(ValueInfo& v, std::uint32_t line,
                      const std::unordered_map<std::string, bool>& symbols) {
    for (auto& child : v.children) resolve_symbol(child, line, symbols);
    if (v.kind != ValueKind::GlobalVariable) return;
    auto it = symbols.find(v.id);
    if (it == symbols.end()) {
      if (!opts_.lenient) throw UnresolvedReference("@" + v.id);
      result_.flags.push_back(SubsetFlag{"unresolved_reference", line});
      return;
    }
    if (it->second) v.kind = ValueKind::FunctionRef;
  }

  ParseOptions opts_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseResult result_;
  std::uint32_t implicit_counter_ = 0;
  std::unordered_map<std::string, std::pair<ValueKind, TypeRef>> local_scope_;
  std::unordered_set<std::string> block_labels_;
  std::unordered_map<std::string, AttributeSet> attr_groups_;
  std::vector<std::pair<std::size_t, std::vector<std::string>>>
      pending_fn_groups_;
};

inline ParseResult parse_module_ex(std::string_view text,
                                   const std::string& name,
                                   const ParseOptions& opts = {}) {
  return Parser(text, name, opts).run();
}

inline IrModule parse_module(std::string_view text,
                             const std::string& name = "module") {
  return parse_module_ex(text, name, ParseOptions{}).module;
}

// Aggregated (construct, count) list from a lenient parse, sorted by name.
inline std::vector<std::pair<std::string, int>> subset_report(
    std::string_view text, const std::string& name = "module") {
  ParseOptions opts;
  opts.lenient = true;
  const ParseResult r = parse_module_ex(text, name, opts);
  std::map<std::string, int> counts;
  for (const auto& f : r.flags) ++counts[f.construct];
  return {counts.begin(), counts.end()};
}

}  // namespace irgraph
