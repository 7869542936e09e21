#pragma once

#include <cctype>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "irgraph/ir/ast.hpp"

namespace irgraph {

namespace detail {

inline bool needs_quotes(const std::string& name) {
  if (name.empty()) return true;
  auto head = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '$' ||
           c == '.' || c == '_' || c == '-';
  };
  auto tail = [&](char c) {
    return head(c) || std::isdigit(static_cast<unsigned char>(c));
  };
  if (!head(name[0]) && !std::isdigit(static_cast<unsigned char>(name[0])))
    return true;
  if (std::isdigit(static_cast<unsigned char>(name[0]))) {
    // purely numeric names are fine unquoted; mixed ones are not
    return !std::all_of(name.begin(), name.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
  }
  return !std::all_of(name.begin() + 1, name.end(), tail);
}

inline std::string print_name(char sigil, const std::string& name) {
  std::string s(1, sigil);
  if (needs_quotes(name)) {
    s += '"';
    s += name;  // escape sequences are preserved verbatim by the lexer
    s += '"';
  } else {
    s += name;
  }
  return s;
}

inline bool fp_bits_equal(const std::optional<double>& a,
                          const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  std::uint64_t ba = 0, bb = 0;
  std::memcpy(&ba, &*a, sizeof(ba));
  std::memcpy(&bb, &*b, sizeof(bb));
  return ba == bb;
}

}  // namespace detail

// Prints an IrModule back to textual assembly. The output re-parses to a
// module that is structurally equal to the input (unknown attributes are
// spelled as the string attribute "other", calling conventions outside
// ccc/fastcc/coldcc as "cc 11").
class ModulePrinter {
public:
  explicit ModulePrinter(const IrModule& m) : m_(m) {}

  std::string print() {
    out_.clear();
    if (m_.source_filename)
      line("source_filename = \"" + *m_.source_filename + "\"");
    if (m_.target_datalayout)
      line("target datalayout = \"" + *m_.target_datalayout + "\"");
    if (m_.target_triple)
      line("target triple = \"" + *m_.target_triple + "\"");
    if (m_.source_filename || m_.target_datalayout || m_.target_triple)
      line("");
    for (const auto& [name, ref] : m_.named_types)
      line(detail::print_name('%', name) + " = type " +
           m_.types.print_body(ref));
    if (!m_.named_types.empty()) line("");
    for (const auto& g : m_.globals) line(print_global(g));
    if (!m_.globals.empty()) line("");
    for (const auto& f : m_.functions) {
      print_function(f);
      line("");
    }
    return out_;
  }

private:
  void line(const std::string& s) {
    out_ += s;
    out_ += '\n';
  }

  std::string type(TypeRef t) const { return m_.types.print(t); }

  // Attributes reproduced by linkage/visibility printing, excluded from the
  // trailing attribute list.
  static bool prefix_attr(Attr a) {
    switch (a) {
      case Attr::External: case Attr::Private: case Attr::Internal:
      case Attr::LinkOnce: case Attr::LinkOnceODR: case Attr::Weak:
      case Attr::WeakODR: case Attr::Common: case Attr::Appending:
      case Attr::AvailableExternally: case Attr::ExternWeak:
      case Attr::Hidden: case Attr::Protected: case Attr::DsoLocal:
      case Attr::FastCC: case Attr::ColdCC:
        return true;
      default:
        return false;
    }
  }

  static std::string attr_text(Attr a) {
    return a == Attr::Other ? "\"other\"" : attr_name(a);
  }

  std::string attrs_text(const AttributeSet& set, bool skip_prefix) const {
    std::string s;
    for (Attr a : set.entries) {
      if (skip_prefix && prefix_attr(a)) continue;
      if (!s.empty()) s += ' ';
      s += attr_text(a);
    }
    return s;
  }

  std::string linkage_prefix(Linkage l, const AttributeSet& attrs,
                             bool force_external) const {
    std::string s;
    if (l != Linkage::External || force_external) {
      s += linkage_name(l);
      s += ' ';
    }
    if (attrs.has(Attr::DsoLocal)) s += "dso_local ";
    if (attrs.has(Attr::Hidden)) s += "hidden ";
    if (attrs.has(Attr::Protected)) s += "protected ";
    return s;
  }

  std::string value_ref(const ValueInfo& v) const {
    switch (v.kind) {
      case ValueKind::Argument:
      case ValueKind::Local:
        return detail::print_name('%', v.id);
      case ValueKind::GlobalVariable:
      case ValueKind::FunctionRef:
        return detail::print_name('@', v.id);
      case ValueKind::ConstantInt:
      case ValueKind::ConstantFp:
      case ValueKind::ConstantOther:
      case ValueKind::Undef:
        return v.payload ? *v.payload : v.id;
      case ValueKind::ConstantAggregate:
        return print_aggregate(v);
      default:
        return v.id;
    }
  }

  std::string typed(const ValueInfo& v) const {
    return type(v.type) + " " + value_ref(v);
  }

  std::string print_aggregate(const ValueInfo& v) const {
    const std::string& p = v.payload ? *v.payload : std::string();
    if (!p.empty() && p[0] == 'c' && p.size() > 1 && p[1] == '"')
      return p;  // c"..." string constant, stored verbatim
    if (!p.empty() && (std::isalpha(static_cast<unsigned char>(p[0])))) {
      // constant expression: op [predicate/flags] ( operands )
      std::string s = p;
      for (const auto& f : v.flags) s += " " + f;
      s += " (";
      bool first = true;
      if (v.aux_type != kNoType && p == "getelementptr") {
        s += type(v.aux_type);
        first = false;
      }
      for (const auto& c : v.children) {
        if (!first) s += ", ";
        first = false;
        s += typed(c);
      }
      if (v.aux_type != kNoType && p != "getelementptr")
        s += " to " + type(v.aux_type);
      s += ")";
      return s;
    }
    // literal aggregate: [ ... ] / { ... } / < ... >
    const char open = p.empty() ? '[' : p[0];
    const char close = open == '[' ? ']' : (open == '{' ? '}' : '>');
    std::string s(1, open);
    for (std::size_t i = 0; i < v.children.size(); ++i) {
      s += i ? ", " : " ";
      s += typed(v.children[i]);
    }
    if (!v.children.empty()) s += ' ';
    s += close;
    return s;
  }

  std::string print_global(const GlobalValue& g) const {
    std::string s = detail::print_name('@', g.name) + " = ";
    s += linkage_prefix(g.linkage, g.attrs, !g.initializer.has_value());
    s += g.is_constant ? "constant " : "global ";
    s += type(g.value_type);
    if (g.initializer) s += " " + value_ref(*g.initializer);
    if (g.alignment) s += ", align " + std::to_string(*g.alignment);
    return s;
  }

  void print_function(const Function& f) {
    std::string s = f.is_declaration ? "declare " : "define ";
    s += linkage_prefix(f.linkage, f.attrs, false);
    if (f.calling_convention == CallingConv::Fast) s += "fastcc ";
    else if (f.calling_convention == CallingConv::Cold) s += "coldcc ";
    else if (f.calling_convention == CallingConv::Other) s += "cc 11 ";
    s += type(f.return_type) + " " + detail::print_name('@', f.name) + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (i) s += ", ";
      s += type(f.args[i].type);
      if (i < f.arg_attrs.size() && !f.arg_attrs[i].empty())
        s += " " + attrs_text(f.arg_attrs[i], false);
      if (!f.is_declaration)
        s += " " + detail::print_name('%', f.args[i].id);
    }
    if (f.varargs) {
      if (!f.args.empty()) s += ", ";
      s += "...";
    }
    s += ")";
    const std::string trailing = attrs_text(f.attrs, true);
    if (!trailing.empty()) s += " " + trailing;
    if (f.is_declaration) {
      line(s);
      return;
    }
    line(s + " {");
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto& block = f.blocks[b];
      if (b) line("");
      line(label_text(block.label) + ":");
      for (const auto& ins : block.instructions)
        line("  " + print_instruction(ins));
    }
    line("}");
  }

  static std::string label_text(const std::string& l) {
    if (detail::needs_quotes(l)) return "\"" + l + "\"";
    return l;
  }

  std::string label_ref(const std::string& l) const {
    return "label " + detail::print_name('%', l);
  }

  std::string print_instruction(const Instruction& ins) const {
    std::string s;
    if (ins.result)
      s += detail::print_name('%', ins.result->id) + " = ";
    s += instruction_body(ins);
    if (ins.alignment) s += ", align " + std::to_string(*ins.alignment);
    return s;
  }

  static bool is_tail_word(const std::string& w) {
    return w == "tail" || w == "musttail" || w == "notail";
  }

  std::string flags_text(const Instruction& ins) const {
    std::string s;
    for (const auto& f : ins.flags) {
      if (is_tail_word(f)) continue;
      s += f + " ";
    }
    return s;
  }

  std::string instruction_body(const Instruction& ins) const {
    const auto& ops = ins.operands;
    std::string s;
    switch (ins.opcode) {
      case Opcode::Ret:
        return ops.empty() ? "ret void" : "ret " + typed(ops[0]);
      case Opcode::Br:
        if (ins.successors.size() == 1)
          return "br " + label_ref(ins.successors[0]);
        return "br " + typed(ops[0]) + ", " + label_ref(ins.successors[0]) +
               ", " + label_ref(ins.successors[1]);
      case Opcode::Switch: {
        s = "switch " + typed(ops[0]) + ", " + label_ref(ins.successors[0]) +
            " [";
        for (std::size_t i = 1; i < ins.successors.size(); ++i)
          s += " " + typed(ops[i]) + ", " + label_ref(ins.successors[i]);
        return s + " ]";
      }
      case Opcode::Unreachable:
        return "unreachable";
      case Opcode::FNeg:
        return "fneg " + flags_text(ins) + typed(ops[0]);
      case Opcode::Add: case Opcode::FAdd: case Opcode::Sub:
      case Opcode::FSub: case Opcode::Mul: case Opcode::FMul:
      case Opcode::UDiv: case Opcode::SDiv: case Opcode::FDiv:
      case Opcode::URem: case Opcode::SRem: case Opcode::FRem:
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr:
      case Opcode::And: case Opcode::Or: case Opcode::Xor:
        return std::string(opcode_name(ins.opcode)) + " " + flags_text(ins) +
               typed(ops[0]) + ", " + value_ref(ops[1]);
      case Opcode::Alloca:
        s = "alloca " + type(ins.aux_type);
        if (!ops.empty()) s += ", " + typed(ops[0]);
        return s;
      case Opcode::Load:
        return "load " + flags_text(ins) + type(ins.result_type) + ", " +
               typed(ops[0]) + orderings_text(ins);
      case Opcode::Store:
        return "store " + flags_text(ins) + typed(ops[0]) + ", " +
               typed(ops[1]) + orderings_text(ins);
      case Opcode::GetElementPtr: {
        s = "getelementptr " + flags_text(ins) + type(ins.aux_type);
        for (const auto& op : ops) s += ", " + typed(op);
        return s;
      }
      case Opcode::Fence:
        return "fence" + orderings_text(ins);
      case Opcode::AtomicCmpXchg:
        return "cmpxchg " + flags_text(ins) + typed(ops[0]) + ", " +
               typed(ops[1]) + ", " + typed(ops[2]) + orderings_text(ins);
      case Opcode::AtomicRMW:
        return "atomicrmw " + flags_text(ins) + ins.sub_op + " " +
               typed(ops[0]) + ", " + typed(ops[1]) + orderings_text(ins);
      case Opcode::Trunc: case Opcode::ZExt: case Opcode::SExt:
      case Opcode::FPToUI: case Opcode::FPToSI: case Opcode::UIToFP:
      case Opcode::SIToFP: case Opcode::FPTrunc: case Opcode::FPExt:
      case Opcode::PtrToInt: case Opcode::IntToPtr: case Opcode::BitCast:
      case Opcode::AddrSpaceCast:
        return std::string(opcode_name(ins.opcode)) + " " + typed(ops[0]) +
               " to " + type(ins.result_type);
      case Opcode::ICmp:
      case Opcode::FCmp:
        return std::string(opcode_name(ins.opcode)) + " " + flags_text(ins) +
               ins.sub_op + " " + typed(ops[0]) + ", " + value_ref(ops[1]);
      case Opcode::Phi: {
        s = "phi " + flags_text(ins) + type(ins.result_type) + " ";
        for (std::size_t i = 0; i < ops.size(); ++i) {
          if (i) s += ", ";
          s += "[ " + value_ref(ops[i]) + ", " +
               detail::print_name('%', ins.phi_blocks[i]) + " ]";
        }
        return s;
      }
      case Opcode::Call: {
        for (const auto& f : ins.flags)
          if (is_tail_word(f)) s += f + " ";
        s += "call " + flags_text(ins);
        s += ins.aux_type != kNoType ? type(ins.aux_type)
                                     : type(ins.result_type);
        s += " " + value_ref(ops[0]) + "(";
        for (std::size_t i = 1; i < ops.size(); ++i) {
          if (i > 1) s += ", ";
          s += typed(ops[i]);
        }
        return s + ")";
      }
      case Opcode::Select:
        return "select " + flags_text(ins) + typed(ops[0]) + ", " +
               typed(ops[1]) + ", " + typed(ops[2]);
      case Opcode::VAArg:
        return "va_arg " + typed(ops[0]) + ", " + type(ins.result_type);
      case Opcode::ExtractElement:
        return "extractelement " + typed(ops[0]) + ", " + typed(ops[1]);
      case Opcode::InsertElement:
        return "insertelement " + typed(ops[0]) + ", " + typed(ops[1]) +
               ", " + typed(ops[2]);
      case Opcode::ShuffleVector:
        return "shufflevector " + typed(ops[0]) + ", " + typed(ops[1]) +
               ", " + typed(ops[2]);
      case Opcode::ExtractValue: {
        s = "extractvalue " + typed(ops[0]);
        for (std::uint64_t i : ins.indices) s += ", " + std::to_string(i);
        return s;
      }
      case Opcode::InsertValue: {
        s = "insertvalue " + typed(ops[0]) + ", " + typed(ops[1]);
        for (std::uint64_t i : ins.indices) s += ", " + std::to_string(i);
        return s;
      }
      case Opcode::Freeze:
        return "freeze " + typed(ops[0]);
      default:
        return std::string(opcode_name(ins.opcode));
    }
  }

  std::string orderings_text(const Instruction& ins) const {
    std::string s;
    for (const auto& o : ins.orderings) s += " " + o;
    return s;
  }

  const IrModule& m_;
  std::string out_;
};

inline std::string print_module(const IrModule& m) {
  return ModulePrinter(m).print();
}

// ---- structural equality ----------------------------------------------

namespace detail {

inline bool values_equal(const IrModule& ma, const ValueInfo& a,
                         const IrModule& mb, const ValueInfo& b) {
  if (a.kind != b.kind || a.id != b.id) return false;
  if ((a.type == kNoType) != (b.type == kNoType)) return false;
  if (a.type != kNoType && ma.types.print(a.type) != mb.types.print(b.type))
    return false;
  if (a.payload != b.payload) return false;
  if (a.int_value != b.int_value) return false;
  if (!fp_bits_equal(a.fp_value, b.fp_value)) return false;
  if (a.flags != b.flags) return false;
  if ((a.aux_type == kNoType) != (b.aux_type == kNoType)) return false;
  if (a.aux_type != kNoType &&
      ma.types.print(a.aux_type) != mb.types.print(b.aux_type))
    return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!values_equal(ma, a.children[i], mb, b.children[i])) return false;
  return true;
}

inline bool instructions_equal(const IrModule& ma, const Instruction& a,
                               const IrModule& mb, const Instruction& b) {
  if (a.opcode != b.opcode || a.sub_op != b.sub_op) return false;
  if (a.flags != b.flags || a.orderings != b.orderings) return false;
  if (a.alignment != b.alignment || a.indices != b.indices) return false;
  if (a.successors != b.successors || a.phi_blocks != b.phi_blocks)
    return false;
  if (a.result.has_value() != b.result.has_value()) return false;
  if (a.result && a.result->id != b.result->id) return false;
  if ((a.result_type == kNoType) != (b.result_type == kNoType)) return false;
  if (a.result_type != kNoType &&
      ma.types.print(a.result_type) != mb.types.print(b.result_type))
    return false;
  if ((a.aux_type == kNoType) != (b.aux_type == kNoType)) return false;
  if (a.aux_type != kNoType &&
      ma.types.print(a.aux_type) != mb.types.print(b.aux_type))
    return false;
  if (a.operands.size() != b.operands.size()) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!values_equal(ma, a.operands[i], mb, b.operands[i])) return false;
  return true;
}

}  // namespace detail

// Field-by-field comparison of two modules, with types compared by printed
// form so the interning tables need not match.
inline bool structurally_equal(const IrModule& a, const IrModule& b) {
  if (a.source_filename != b.source_filename) return false;
  if (a.target_triple != b.target_triple) return false;
  if (a.target_datalayout != b.target_datalayout) return false;
  if (a.named_types.size() != b.named_types.size()) return false;
  for (std::size_t i = 0; i < a.named_types.size(); ++i) {
    if (a.named_types[i].first != b.named_types[i].first) return false;
    if (a.types.print_body(a.named_types[i].second) !=
        b.types.print_body(b.named_types[i].second))
      return false;
  }
  if (a.globals.size() != b.globals.size()) return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    const auto& ga = a.globals[i];
    const auto& gb = b.globals[i];
    if (ga.name != gb.name || ga.linkage != gb.linkage) return false;
    if (ga.attrs.entries != gb.attrs.entries) return false;
    if (ga.is_constant != gb.is_constant || ga.alignment != gb.alignment)
      return false;
    if (a.types.print(ga.value_type) != b.types.print(gb.value_type))
      return false;
    if (ga.initializer.has_value() != gb.initializer.has_value()) return false;
    if (ga.initializer &&
        !detail::values_equal(a, *ga.initializer, b, *gb.initializer))
      return false;
  }
  if (a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || fa.linkage != fb.linkage) return false;
    if (fa.calling_convention != fb.calling_convention) return false;
    if (fa.attrs.entries != fb.attrs.entries) return false;
    if (fa.is_declaration != fb.is_declaration || fa.varargs != fb.varargs)
      return false;
    if (a.types.print(fa.type) != b.types.print(fb.type)) return false;
    if (a.types.print(fa.return_type) != b.types.print(fb.return_type))
      return false;
    if (fa.args.size() != fb.args.size()) return false;
    for (std::size_t j = 0; j < fa.args.size(); ++j) {
      if (fa.args[j].id != fb.args[j].id) return false;
      if (a.types.print(fa.args[j].type) != b.types.print(fb.args[j].type))
        return false;
      if (fa.arg_attrs[j].entries != fb.arg_attrs[j].entries) return false;
    }
    if (fa.blocks.size() != fb.blocks.size()) return false;
    for (std::size_t j = 0; j < fa.blocks.size(); ++j) {
      if (fa.blocks[j].label != fb.blocks[j].label) return false;
      if (fa.blocks[j].instructions.size() !=
          fb.blocks[j].instructions.size())
        return false;
      for (std::size_t k = 0; k < fa.blocks[j].instructions.size(); ++k) {
        if (!detail::instructions_equal(a, fa.blocks[j].instructions[k], b,
                                        fb.blocks[j].instructions[k]))
          return false;
      }
    }
  }
  return true;
}

}  // namespace irgraph
