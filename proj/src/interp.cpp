#include <map>
#include <set>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"
#include "typing.hpp"

namespace dmt {
namespace {

using namespace ast;

class Interpreter {
 public:
  Interpreter(const KernelAST& k, const ThreadSpace& space, MemoryImage& mem, const Defines& defines)
      : kernel_(k), space_(space), mem_(mem) {
    for (const auto& c : k.consts) {
      auto it = defines.find(c.name);
      consts_[c.name] = it != defines.end() ? it->second : eval_const(*c.value);
    }
    for (const auto& a : resolve_arrays(k, space, defines)) {
      types_[a.name] = a.type;
      auto& data = mem_[a.name];
      if (data.empty()) data.assign(static_cast<std::size_t>(a.extent), Scalar::zero(a.type));
      if (static_cast<std::int64_t>(data.size()) != a.extent)
        throw ParameterError(Stage::Frontend, "array '" + a.name + "' has " + std::to_string(data.size()) +
                                                  " elements, expected " + std::to_string(a.extent));
    }
    for (const auto& a : k.arrays) {
      std::vector<std::int64_t> dims;
      for (const auto& d : a.dims) dims.push_back(eval_const(*d).as_int());
      dims_[a.name] = dims;
    }
  }

  void run() {
    for (Tid t = 0; t < space_.block_size(); ++t) {
      tid_ = t;
      coords_ = space_.delinearize(t);
      scopes_.assign(1, {});
      for (const auto& s : kernel_.body) stmt(*s);
    }
  }

 private:
  struct Var {
    Scalar value;
    ScalarKind type;
  };

  Scalar eval_const(const Expr& e) {
    tid_ = -1;
    return expr(e);
  }

  Var* find(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  std::size_t flat(const std::string& array, const std::vector<ExprPtr>& idx) {
    const auto& dims = dims_.at(array);
    std::int64_t flat = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      Scalar v = expr(*idx[d]);
      if (v.is_float()) throw LowerError("array index must be an integer");
      flat = flat * (d > 0 ? dims[d] : 1) + v.i;
    }
    const auto extent = static_cast<std::int64_t>(mem_.at(array).size());
    if (flat < 0 || flat >= extent)
      throw SimFault("thread " + std::to_string(tid_) + " accesses " + array + "[" + std::to_string(flat) +
                     "] outside [0, " + std::to_string(extent) + ")");
    return static_cast<std::size_t>(flat);
  }

  Scalar binary(Opcode op, Scalar a, Scalar b) {
    const auto cls = typing::op_class(op);
    if (cls == typing::OpClass::Bitwise && (a.is_float() || b.is_float()))
      throw LowerError("bitwise operator on float");
    Scalar args[2] = {a, b};
    if (cls != typing::OpClass::Logical) {
      auto t = typing::operand_type(op, a.kind, b.kind);
      args[0] = a.convert(t);
      args[1] = b.convert(t);
    }
    return apply_opcode(op, args, 2);
  }

  Scalar expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Scalar::of_int(e.ival);
      case ExprKind::FloatLit: return Scalar::of_float(e.fval);
      case ExprKind::BlockDim: return Scalar::of_int(space_.extent(e.dim));
      case ExprKind::ThreadIdx:
        if (tid_ < 0) throw LowerError("expression is not a compile-time constant");
        if (e.dim == TidSource::kLinearTid) return Scalar::of_int(tid_);
        return Scalar::of_int(e.dim < space_.dims() ? coords_[e.dim] : 0);
      case ExprKind::Var: {
        if (Var* v = find(e.name)) return v->value;
        auto it = consts_.find(e.name);
        if (it != consts_.end()) return it->second;
        throw LowerError("undeclared variable '" + e.name + "'");
      }
      case ExprKind::Index: {
        auto i = flat(e.name, e.args);
        return mem_.at(e.name)[i];
      }
      case ExprKind::Unary: {
        Scalar a = expr(*e.args[0]);
        if (e.op == Opcode::BitNot && a.is_float()) throw LowerError("bitwise operator on float");
        return apply_opcode(e.op, &a, 1);
      }
      case ExprKind::Binary: {
        Scalar a = expr(*e.args[0]);
        Scalar b = expr(*e.args[1]);
        return binary(e.op, a, b);
      }
      case ExprKind::Ternary: {
        Scalar c = expr(*e.args[0]);
        Scalar a = expr(*e.args[1]);
        Scalar b = expr(*e.args[2]);
        auto t = typing::common(a.kind, b.kind);
        return c.truthy() ? a.convert(t) : b.convert(t);
      }
      case ExprKind::Call: {
        Scalar a = expr(*e.args[0]);
        Scalar b = e.args.size() > 1 ? expr(*e.args[1]) : a;
        auto t = typing::call_operand_type(e.name, a.kind, b.kind);
        Scalar args[2] = {a.convert(t), b.convert(t)};
        if (e.name == "float" || e.name == "int") return args[0];
        return apply_opcode(typing::call_opcode(e.name), args, static_cast<int>(e.args.size()));
      }
      case ExprKind::FromThreadOrConst:
      case ExprKind::FromThreadOrMem:
        throw LowerError("reference interpreter does not support communication intrinsics");
    }
    return Scalar{};
  }

  void block(const std::vector<StmtPtr>& body) {
    scopes_.emplace_back();
    for (const auto& s : body) stmt(*s);
    scopes_.pop_back();
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl:
        scopes_.back()[s.name] = Var{expr(*s.value).convert(s.type), s.type};
        return;
      case StmtKind::Assign: {
        Scalar v = expr(*s.value);
        Var* var = find(s.name);
        if (!var) throw LowerError("undeclared variable '" + s.name + "'");
        var->value = v.convert(var->type);
        return;
      }
      case StmtKind::Store: {
        Scalar v = expr(*s.value).convert(types_.at(s.name));
        auto i = flat(s.name, s.indices);
        mem_.at(s.name)[i] = v;
        return;
      }
      case StmtKind::Block:
        block(s.body);
        return;
      case StmtKind::TagValue:
        throw LowerError("reference interpreter does not support communication intrinsics");
      case StmtKind::If:
        if (expr(*s.value).truthy()) block(s.body);
        else if (s.has_else) block(s.else_body);
        return;
      case StmtKind::For: {
        std::int64_t i = expr(*s.init).as_int();
        const std::int64_t limit = expr(*s.limit).as_int();
        const std::int64_t step = expr(*s.step).as_int();
        std::int64_t trips = 0;
        auto holds = [&] {
          Scalar args[2] = {Scalar::of_int(i), Scalar::of_int(limit)};
          return apply_opcode(s.cmp, args, 2).truthy();
        };
        while (holds()) {
          if (++trips > (1 << 16)) throw LowerError("loop trip count exceeds 65536");
          scopes_.emplace_back();
          scopes_.back()[s.name] = Var{Scalar::of_int(i), ScalarKind::Int};
          block(s.body);
          scopes_.pop_back();
          i += step;
        }
        return;
      }
    }
  }

  const KernelAST& kernel_;
  ThreadSpace space_;
  MemoryImage& mem_;
  std::map<std::string, Scalar> consts_;
  std::map<std::string, ScalarKind> types_;
  std::map<std::string, std::vector<std::int64_t>> dims_;
  std::vector<std::map<std::string, Var>> scopes_;
  Tid tid_ = -1;
  Coords coords_{0, 0, 0};
};

}  // namespace

void interpret(const ast::KernelAST& kernel, const ThreadSpace& space, MemoryImage& memory,
               const Defines& defines) {
  Interpreter(kernel, space, memory, defines).run();
}

}  // namespace dmt
