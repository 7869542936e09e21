#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "irgraph/ir/types.hpp"

namespace irgraph {

// The 67 instruction opcodes of the supported IR dialect plus a trailing
// catch-all slot. Enum order is the one-hot feature order.
enum class Opcode : std::uint8_t {
  Ret, Br, Switch, IndirectBr, Invoke, Resume, Unreachable, CleanupRet,
  CatchRet, CatchSwitch, CallBr,
  FNeg,
  Add, FAdd, Sub, FSub, Mul, FMul, UDiv, SDiv, FDiv, URem, SRem, FRem,
  Shl, LShr, AShr, And, Or, Xor,
  Alloca, Load, Store, GetElementPtr, Fence, AtomicCmpXchg, AtomicRMW,
  Trunc, ZExt, SExt, FPToUI, FPToSI, UIToFP, SIToFP, FPTrunc, FPExt,
  PtrToInt, IntToPtr, BitCast, AddrSpaceCast,
  CleanupPad, CatchPad,
  ICmp, FCmp, Phi, Call, Select, UserOp1, UserOp2, VAArg,
  ExtractElement, InsertElement, ShuffleVector, ExtractValue, InsertValue,
  LandingPad, Freeze,
  Other,
};

constexpr int kOpcodeCount = 68;

inline const char* opcode_name(Opcode op) {
  static const char* names[kOpcodeCount] = {
      "ret", "br", "switch", "indirectbr", "invoke", "resume", "unreachable",
      "cleanupret", "catchret", "catchswitch", "callbr",
      "fneg",
      "add", "fadd", "sub", "fsub", "mul", "fmul", "udiv", "sdiv", "fdiv",
      "urem", "srem", "frem",
      "shl", "lshr", "ashr", "and", "or", "xor",
      "alloca", "load", "store", "getelementptr", "fence", "cmpxchg",
      "atomicrmw",
      "trunc", "zext", "sext", "fptoui", "fptosi", "uitofp", "sitofp",
      "fptrunc", "fpext", "ptrtoint", "inttoptr", "bitcast", "addrspacecast",
      "cleanuppad", "catchpad",
      "icmp", "fcmp", "phi", "call", "select", "userop1", "userop2", "va_arg",
      "extractelement", "insertelement", "shufflevector", "extractvalue",
      "insertvalue", "landingpad", "freeze",
      "other"};
  return names[static_cast<int>(op)];
}

inline std::optional<Opcode> opcode_from_name(const std::string& name) {
  for (int i = 0; i < kOpcodeCount; ++i) {
    if (name == opcode_name(static_cast<Opcode>(i)))
      return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

inline bool is_terminator(Opcode op) {
  switch (op) {
    case Opcode::Ret:
    case Opcode::Br:
    case Opcode::Switch:
    case Opcode::IndirectBr:
    case Opcode::Invoke:
    case Opcode::Resume:
    case Opcode::Unreachable:
    case Opcode::CleanupRet:
    case Opcode::CatchRet:
    case Opcode::CatchSwitch:
    case Opcode::CallBr:
      return true;
    default:
      return false;
  }
}

// Value classification used for feature encoding and node identity.
enum class ValueKind : std::uint8_t {
  Argument,
  Local,
  GlobalVariable,
  FunctionRef,
  ConstantInt,
  ConstantFp,
  ConstantAggregate,
  Undef,
  ConstantOther,  // fallback slot, must stay last
};

constexpr int kValueKindCount = 9;

inline const char* value_kind_name(ValueKind k) {
  static const char* names[kValueKindCount] = {
      "argument", "local", "global_variable", "function_ref", "constant_int",
      "constant_fp", "constant_aggregate", "undef", "constant_other"};
  return names[static_cast<int>(k)];
}

inline bool is_constant_kind(ValueKind k) {
  switch (k) {
    case ValueKind::ConstantInt:
    case ValueKind::ConstantFp:
    case ValueKind::ConstantAggregate:
    case ValueKind::ConstantOther:
    case ValueKind::Undef:
      return true;
    default:
      return false;
  }
}

enum class Linkage : std::uint8_t {
  External, Private, Internal, LinkOnce, LinkOnceODR, Weak, WeakODR,
  Common, Appending, AvailableExternally, ExternWeak,
};

inline const char* linkage_name(Linkage l) {
  static const char* names[] = {
      "external", "private", "internal", "linkonce", "linkonce_odr", "weak",
      "weak_odr", "common", "appending", "available_externally",
      "extern_weak"};
  return names[static_cast<int>(l)];
}

enum class CallingConv : std::uint8_t { C, Fast, Cold, Other };

// Closed attribute vocabulary; everything unrecognized folds into Other.
// Covers linkage, visibility, calling convention, function attributes and
// parameter attributes so one multi-hot table serves all attribute sets.
enum class Attr : std::uint8_t {
  External, Private, Internal, LinkOnce, LinkOnceODR, Weak, WeakODR,
  Common, Appending, AvailableExternally, ExternWeak,
  Hidden, Protected,
  DsoLocal,
  FastCC, ColdCC,
  AlwaysInline, NoInline, InlineHint, OptNone, OptSize, MinSize,
  NoUnwind, NoReturn, NoRecurse, WillReturn, MustProgress,
  ReadOnly, ReadNone, WriteOnly,
  ColdAttr, Ssp, UwTable,
  NoAlias, NoCapture, NonNull, Sret, ZeroExt, SignExt,
  Other,
};

constexpr int kAttrCount = 40;

inline const char* attr_name(Attr a) {
  static const char* names[kAttrCount] = {
      "external", "private", "internal", "linkonce", "linkonce_odr", "weak",
      "weak_odr", "common", "appending", "available_externally",
      "extern_weak",
      "hidden", "protected",
      "dso_local",
      "fastcc", "coldcc",
      "alwaysinline", "noinline", "inlinehint", "optnone", "optsize",
      "minsize",
      "nounwind", "noreturn", "norecurse", "willreturn", "mustprogress",
      "readonly", "readnone", "writeonly",
      "cold", "ssp", "uwtable",
      "noalias", "nocapture", "nonnull", "sret", "zeroext", "signext",
      "other"};
  return names[static_cast<int>(a)];
}

inline std::optional<Attr> attr_from_name(const std::string& name) {
  for (int i = 0; i < kAttrCount; ++i) {
    if (name == attr_name(static_cast<Attr>(i))) return static_cast<Attr>(i);
  }
  return std::nullopt;
}

struct AttributeSet {
  std::set<Attr> entries;

  bool empty() const { return entries.empty(); }
  void add(Attr a) { entries.insert(a); }
  bool has(Attr a) const { return entries.count(a) > 0; }

  // Canonical identity string, e.g. "external|nounwind".
  std::string key() const {
    std::string s;
    for (Attr a : entries) {
      if (!s.empty()) s += "|";
      s += attr_name(a);
    }
    return s;
  }
};

// A value occurrence: an SSA name, symbol reference or (possibly nested)
// constant. Constants carry their literal payload; aggregate constants and
// constant expressions list their operands in `children`.
struct ValueInfo {
  std::string id;
  ValueKind kind = ValueKind::Local;
  TypeRef type = kNoType;
  std::optional<std::string> payload;
  std::optional<std::int64_t> int_value;
  std::optional<double> fp_value;
  std::vector<ValueInfo> children;
  TypeRef aux_type = kNoType;           // constexpr source type (gep)
  std::vector<std::string> flags;       // constexpr flags (inbounds, nuw, ...)
};

struct Instruction {
  Opcode opcode = Opcode::Other;
  std::optional<ValueInfo> result;
  std::vector<ValueInfo> operands;
  TypeRef result_type = kNoType;
  std::optional<std::uint32_t> alignment;
  std::vector<std::string> successors;   // terminator targets, block labels
  std::vector<std::string> phi_blocks;   // phi incoming labels
  std::string sub_op;                    // icmp/fcmp predicate, atomicrmw op
  std::vector<std::string> flags;        // nuw nsw exact inbounds volatile ...
  std::vector<std::string> orderings;    // atomic orderings
  TypeRef aux_type = kNoType;            // gep/alloca element type, call fnty
  std::vector<std::uint64_t> indices;    // extractvalue / insertvalue
  std::uint32_t line = 0;
  std::uint32_t col = 0;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instructions;
};

struct Function {
  std::string name;
  std::vector<ValueInfo> args;
  std::vector<AttributeSet> arg_attrs;   // parallel to args
  std::vector<BasicBlock> blocks;        // empty for declarations
  AttributeSet attrs;                    // linkage + visibility + cc + fn attrs
  Linkage linkage = Linkage::External;
  CallingConv calling_convention = CallingConv::C;
  TypeRef type = kNoType;                // function type
  TypeRef return_type = kNoType;
  bool is_declaration = false;
  bool varargs = false;
};

struct GlobalValue {
  std::string name;
  Linkage linkage = Linkage::External;
  AttributeSet attrs;
  bool is_constant = false;              // 'constant' vs 'global'
  TypeRef value_type = kNoType;
  std::optional<ValueInfo> initializer;
  std::optional<std::uint32_t> alignment;
};

struct IrModule {
  std::string name;
  std::optional<std::string> source_filename;
  std::optional<std::string> target_triple;
  std::optional<std::string> target_datalayout;
  std::vector<std::pair<std::string, TypeRef>> named_types;  // decl order
  std::vector<GlobalValue> globals;
  std::vector<Function> functions;
  TypeTable types;

  std::size_t instruction_count() const {
    std::size_t n = 0;
    for (const auto& f : functions)
      for (const auto& b : f.blocks) n += b.instructions.size();
    return n;
  }

  std::size_t block_count() const {
    std::size_t n = 0;
    for (const auto& f : functions) n += f.blocks.size();
    return n;
  }
};

}  // namespace irgraph
