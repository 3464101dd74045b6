#include <map>
#include <set>
#include <tuple>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"
#include "typing.hpp"

namespace dmt {
namespace {

using namespace ast;

std::string where(const SourceLoc& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": ";
}

/// Compile-time evaluation of constant expressions (consts, loop variables,
/// blockDim and literals).
class ConstEval {
 public:
  ConstEval(const ThreadSpace& space, const std::map<std::string, Scalar>& symbols)
      : space_(space), symbols_(symbols) {}

  Scalar eval(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::IntLit: return Scalar::of_int(e.ival);
      case ExprKind::FloatLit: return Scalar::of_float(e.fval);
      case ExprKind::BlockDim: return Scalar::of_int(space_.extent(e.dim));
      case ExprKind::Var: {
        auto it = symbols_.find(e.name);
        if (it == symbols_.end()) throw LowerError(where(e.loc) + "'" + e.name + "' is not a constant");
        return it->second;
      }
      case ExprKind::Unary: {
        Scalar a = eval(*e.args[0]);
        if (e.op == Opcode::BitNot && a.is_float()) throw LowerError(where(e.loc) + "bitwise operator on float");
        return apply_opcode(e.op, &a, 1);
      }
      case ExprKind::Binary: {
        Scalar a = eval(*e.args[0]);
        Scalar b = eval(*e.args[1]);
        if (typing::op_class(e.op) == typing::OpClass::Bitwise && (a.is_float() || b.is_float()))
          throw LowerError(where(e.loc) + "bitwise operator on float");
        auto t = typing::operand_type(e.op, a.kind, b.kind);
        Scalar args[2] = {a, b};
        if (typing::op_class(e.op) != typing::OpClass::Logical) {
          args[0] = a.convert(t);
          args[1] = b.convert(t);
        }
        return apply_opcode(e.op, args, 2);
      }
      case ExprKind::Ternary: {
        Scalar c = eval(*e.args[0]);
        Scalar a = eval(*e.args[1]);
        Scalar b = eval(*e.args[2]);
        auto t = typing::common(a.kind, b.kind);
        return c.truthy() ? a.convert(t) : b.convert(t);
      }
      case ExprKind::Call: {
        Scalar a = eval(*e.args[0]);
        Scalar b = e.args.size() > 1 ? eval(*e.args[1]) : a;
        auto t = typing::call_operand_type(e.name, a.kind, b.kind);
        Scalar args[2] = {a.convert(t), b.convert(t)};
        if (e.name == "float" || e.name == "int") return args[0];
        return apply_opcode(typing::call_opcode(e.name), args, static_cast<int>(e.args.size()));
      }
      default:
        throw LowerError(where(e.loc) + "expression is not a compile-time constant");
    }
  }

  std::int64_t eval_int(const Expr& e, const char* what) const {
    Scalar s = eval(e);
    if (s.is_float()) throw LowerError(where(e.loc) + what + " must be an integer");
    return s.i;
  }

 private:
  const ThreadSpace& space_;
  const std::map<std::string, Scalar>& symbols_;
};

std::map<std::string, Scalar> eval_consts(const KernelAST& k, const ThreadSpace& space, const Defines& defines) {
  std::map<std::string, Scalar> symbols;
  for (const auto& c : k.consts) {
    auto it = defines.find(c.name);
    symbols[c.name] = it != defines.end() ? it->second : ConstEval(space, symbols).eval(*c.value);
  }
  for (const auto& [name, value] : defines) {
    bool known = false;
    for (const auto& c : k.consts) known = known || c.name == name;
    if (!known) throw LowerError("define '" + name + "' does not match any const in kernel " + k.name);
  }
  return symbols;
}

/// An SSA value: either a folded constant or an output port of a graph node.
struct Val {
  bool is_const = true;
  Scalar c;
  NodeId node = kNoNode;
  int port = 0;
  ScalarKind type = ScalarKind::Int;

  static Val constant(Scalar s) { return Val{true, s, kNoNode, 0, s.kind}; }
  static Val port_of(NodeId n, int p, ScalarKind t) { return Val{false, Scalar{}, n, p, t}; }
  bool same(const Val& o) const {
    if (is_const != o.is_const || type != o.type) return false;
    return is_const ? c == o.c : (node == o.node && port == o.port);
  }
};

struct Affine {
  std::optional<Val> var;  // nullopt: purely constant
  std::int64_t offset = 0;
};

class Lowerer {
 public:
  Lowerer(const KernelAST& k, const ThreadSpace& space, const Defines& defines)
      : kernel_(k), space_(space), graph_(space) {
    consts_ = eval_consts(k, space, defines);
    for (const auto& a : resolve_arrays(k, space, defines)) {
      graph_.add_array(a);
      arrays_[a.name] = a;
    }
    for (const auto& a : k.arrays) {
      std::vector<std::int64_t> dims;
      for (const auto& d : a.dims) dims.push_back(ConstEval(space, consts_).eval_int(*d, "array extent"));
      array_dims_[a.name] = dims;
    }
    for (const auto& s : k.body) collect_decl_types(*s);
  }

  DataflowGraph run() {
    scopes_.emplace_back();
    for (const auto& s : kernel_.body) stmt(*s);
    for (const auto& p : pending_) {
      auto it = tags_.find(p.var);
      if (it == tags_.end())
        throw LowerError(where(p.loc) + "missing tagValue for communicated variable '" + p.var + "'");
      Val v = materialize(it->second);
      graph_.connect(v.node, v.port, p.elevator, 0);
    }
    const auto comms = graph_.count_kind<Elevator>() + graph_.count_kind<ELoadStore>();
    if (comms != intrinsic_count_)
      throw LowerError("internal: " + std::to_string(intrinsic_count_) + " intrinsics lowered to " +
                       std::to_string(comms) + " communication nodes");
    return std::move(graph_);
  }

 private:
  struct MemState {
    std::optional<std::pair<NodeId, int>> last_store_done;
    NodeId split = kNoNode;  // fan-out SplitJoin after the last store
    std::vector<std::pair<NodeId, int>> loads_since;
  };
  struct PendingComm {
    NodeId elevator;
    std::string var;
    SourceLoc loc;
  };
  using Scope = std::map<std::string, Val>;

  void collect_decl_types(const Stmt& s) {
    if (s.kind == StmtKind::Decl) {
      auto [it, inserted] = decl_types_.emplace(s.name, s.type);
      if (!inserted && it->second != s.type) conflicting_types_.insert(s.name);
    }
    for (const auto& b : s.body) collect_decl_types(*b);
    for (const auto& b : s.else_body) collect_decl_types(*b);
  }

  // ---- constants, sources, CSE ----
  Val materialize(const Val& v) {
    if (!v.is_const) return v;
    auto key = std::make_pair(v.c.kind, v.c.is_float() ? std::bit_cast<std::int64_t>(v.c.f) : v.c.i);
    auto it = const_nodes_.find(key);
    if (it == const_nodes_.end())
      it = const_nodes_.emplace(key, graph_.add_node(ConstSource{v.c})).first;
    return Val::port_of(it->second, 0, v.c.kind);
  }

  Val thread_coord(int dim) {
    if (dim != TidSource::kLinearTid && dim >= space_.dims()) return Val::constant(Scalar::of_int(0));
    if (dim == TidSource::kLinearTid && space_.dims() == 1) dim = 0;
    auto it = tid_nodes_.find(dim);
    if (it == tid_nodes_.end()) {
      static const char* const kLabels[] = {"threadIdx.x", "threadIdx.y", "threadIdx.z", "tid"};
      it = tid_nodes_.emplace(dim, graph_.add_node(TidSource{dim}, kLabels[dim])).first;
    }
    return Val::port_of(it->second, 0, ScalarKind::Int);
  }

  Val emit_op(NodeKind kind, Opcode op, std::vector<Val> operands, ScalarKind result) {
    bool all_const = true;
    for (const auto& o : operands) all_const = all_const && o.is_const;
    if (all_const) {
      std::vector<Scalar> args;
      for (const auto& o : operands) args.push_back(o.c);
      return Val::constant(apply_opcode(op, args.data(), static_cast<int>(args.size())));
    }
    std::vector<std::pair<NodeId, int>> ins;
    for (auto& o : operands) {
      o = materialize(o);
      ins.emplace_back(o.node, o.port);
    }
    auto key = std::make_tuple(kind.index(), static_cast<int>(op), ins);
    auto it = cse_.find(key);
    if (it != cse_.end()) return Val::port_of(it->second, 0, result);
    NodeId n = graph_.add_node(std::move(kind));
    for (std::size_t p = 0; p < ins.size(); ++p) graph_.connect(ins[p].first, ins[p].second, n, static_cast<int>(p));
    cse_.emplace(key, n);
    return Val::port_of(n, 0, result);
  }

  Val convert(const Val& v, ScalarKind to) {
    if (v.type == to) return v;
    if (v.is_const) return Val::constant(v.c.convert(to));
    Opcode op = to == ScalarKind::Float ? Opcode::ToFloat : Opcode::ToInt;
    return emit_op(FloatOp{op}, op, {v}, to);
  }

  Val binary(Opcode op, Val a, Val b, const SourceLoc& loc) {
    using typing::OpClass;
    const auto cls = typing::op_class(op);
    if (cls == OpClass::Bitwise && (a.type == ScalarKind::Float || b.type == ScalarKind::Float))
      throw LowerError(where(loc) + "bitwise operator on float");
    if (cls != OpClass::Logical) {
      auto t = typing::operand_type(op, a.type, b.type);
      a = convert(a, t);
      b = convert(b, t);
    }
    const auto result = typing::result_type(op, a.type);
    if (cls == OpClass::Arith)
      return a.type == ScalarKind::Float ? emit_op(FloatOp{op}, op, {a, b}, result)
                                         : emit_op(ArithOp{op}, op, {a, b}, result);
    return emit_op(Control{op}, op, {a, b}, result);
  }

  Val unary(Opcode op, Val a, const SourceLoc& loc) {
    if (op == Opcode::BitNot && a.type == ScalarKind::Float) throw LowerError(where(loc) + "bitwise operator on float");
    if (op == Opcode::Neg || op == Opcode::Abs)
      return a.type == ScalarKind::Float ? emit_op(FloatOp{op}, op, {a}, a.type) : emit_op(ArithOp{op}, op, {a}, a.type);
    return emit_op(Control{op}, op, {a}, ScalarKind::Int);
  }

  Val select(Val c, Val a, Val b) {
    auto t = typing::common(a.type, b.type);
    a = convert(a, t);
    b = convert(b, t);
    if (c.is_const) return c.c.truthy() ? a : b;
    if (a.same(b)) return a;
    return emit_op(Control{Opcode::Select}, Opcode::Select, {c, a, b}, t);
  }

  // ---- predicates ----
  bool predicated() const { return !(pred_.is_const && pred_.c.truthy()); }

  Val and_pred(const Val& cond) {
    if (!predicated()) return cond;
    return binary(Opcode::LogAnd, pred_, cond, {});
  }

  // ---- memory ----
  Affine affine(const Expr& e) {
    if (e.kind == ExprKind::Binary && (e.op == Opcode::Add || e.op == Opcode::Sub)) {
      Affine l = affine(*e.args[0]);
      Affine r = affine(*e.args[1]);
      if (!l.var || !r.var) {
        Affine out;
        out.var = l.var ? l.var : r.var;
        if (e.op == Opcode::Sub && r.var) {
          // c - x: keep as a computed value
          return Affine{lower_int_index(e), 0};
        }
        out.offset = e.op == Opcode::Add ? l.offset + r.offset : l.offset - r.offset;
        return out;
      }
      Val v = lower_int_index(e);
      return Affine{v, 0};
    }
    Val v = lower_int_index(e);
    if (v.is_const) return Affine{std::nullopt, v.c.i};
    return Affine{v, 0};
  }

  Val lower_int_index(const Expr& e) {
    Val v = expr(e);
    if (v.type == ScalarKind::Float) throw LowerError(where(e.loc) + "array index must be an integer");
    return v;
  }

  std::pair<Val, std::int64_t> flat_index(const std::string& array, const std::vector<ExprPtr>& idx) {
    const auto& dims = array_dims_.at(array);
    std::optional<Val> var;
    std::int64_t offset = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (d > 0) {
        offset *= dims[d];
        if (var) var = binary(Opcode::Mul, *var, Val::constant(Scalar::of_int(dims[d])), idx[d]->loc);
      }
      Affine a = affine(*idx[d]);
      offset += a.offset;
      if (a.var) var = var ? binary(Opcode::Add, *var, *a.var, idx[d]->loc) : *a.var;
    }
    if (!var) return {Val::constant(Scalar::of_int(0)), offset};
    if (var->is_const) return {Val::constant(Scalar::of_int(0)), offset + var->c.i};
    return {*var, offset};
  }

  void wire_load_order(MemState& ms, NodeId n, int port) {
    if (!ms.last_store_done) return;
    if (ms.split == kNoNode) {
      ms.split = graph_.add_node(SplitJoin{1});
      graph_.connect(ms.last_store_done->first, ms.last_store_done->second, ms.split, 0);
    }
    graph_.connect(ms.split, 0, n, port);
  }

  Val load(const Expr& e) {
    auto [base, offset] = flat_index(e.name, e.args);
    auto& ms = mem_[e.name];
    LoadStore ls{e.name, false, offset, predicated(), ms.last_store_done.has_value()};
    NodeId n = graph_.add_node(ls, e.name);
    Val b = materialize(base);
    graph_.connect(b.node, b.port, n, 0);
    if (predicated()) {
      Val p = materialize(pred_);
      graph_.connect(p.node, p.port, n, enable_port(graph_.node(n).kind));
    }
    wire_load_order(ms, n, order_port(graph_.node(n).kind));
    ms.loads_since.emplace_back(n, 1);
    return Val::port_of(n, 0, arrays_.at(e.name).type);
  }

  void store(const Stmt& s) {
    Val value = convert(expr(*s.value), arrays_.at(s.name).type);
    auto [base, offset] = flat_index(s.name, s.indices);
    auto& ms = mem_[s.name];
    std::vector<std::pair<NodeId, int>> deps = ms.loads_since;
    if (ms.last_store_done) deps.push_back(*ms.last_store_done);
    Sink sink{s.name, offset, predicated(), !deps.empty()};
    NodeId n = graph_.add_node(sink, s.name);
    Val b = materialize(base);
    Val v = materialize(value);
    graph_.connect(b.node, b.port, n, 0);
    graph_.connect(v.node, v.port, n, 1);
    if (predicated()) {
      Val p = materialize(pred_);
      graph_.connect(p.node, p.port, n, enable_port(graph_.node(n).kind));
    }
    if (!deps.empty()) {
      NodeId join = graph_.add_node(SplitJoin{static_cast<int>(deps.size())});
      for (std::size_t i = 0; i < deps.size(); ++i)
        graph_.connect(deps[i].first, deps[i].second, join, static_cast<int>(i));
      graph_.connect(join, 0, n, order_port(graph_.node(n).kind));
    }
    ms.last_store_done = std::make_pair(n, 0);
    ms.split = kNoNode;
    ms.loads_since.clear();
  }

  // ---- communication ----
  TidDelta source_offset(const std::vector<ExprPtr>& delta) {
    TidDelta d;
    d.dims = static_cast<int>(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i)
      d.offsets[i] = ConstEval(space_, symbols()).eval_int(*delta[i], "delta");
    return d;
  }

  std::int64_t window_of(const Expr& e) {
    if (!e.window) return space_.block_size();
    return ConstEval(space_, symbols()).eval_int(*e.window, "window");
  }

  std::int64_t linear_of(const TidDelta& shift, const SourceLoc& loc) {
    try {
      return delta_to_linear(shift, space_);
    } catch (const RangeError& err) {
      throw LowerError(where(loc) + err.what());
    }
  }

  void no_divergence(const SourceLoc& loc, const char* what) {
    if (predicated()) throw LowerError(where(loc) + what + " inside a divergent branch");
  }

  Val from_thread_or_const(const Expr& e) {
    no_divergence(e.loc, "communication");
    auto it = decl_types_.find(e.name);
    if (it == decl_types_.end()) throw LowerError(where(e.loc) + "undeclared variable '" + e.name + "'");
    if (conflicting_types_.count(e.name))
      throw LowerError(where(e.loc) + "communicated variable '" + e.name + "' is declared with different types");
    TidDelta shift = source_offset(e.delta).negated();
    Elevator el;
    el.delta = shift;
    el.constant = ConstEval(space_, symbols()).eval(*e.constant).convert(it->second);
    el.window = window_of(e);
    el.shift = linear_of(shift, e.loc);
    el.comm_id = next_comm_++;
    NodeId n = graph_.add_node(el, "fromThreadOrConst<" + e.name + ">");
    pending_.push_back({n, e.name, e.loc});
    ++intrinsic_count_;
    return Val::port_of(n, 0, it->second);
  }

  Val from_thread_or_mem(const Expr& e) {
    no_divergence(e.loc, "communication");
    TidDelta shift = source_offset(e.delta).negated();
    linear_of(shift, e.loc);
    Val enable = expr(*e.predicate);
    auto [base, offset] = flat_index(e.name, e.args);
    auto& ms = mem_[e.name];
    ELoadStore ld{e.name, shift, window_of(e), offset, ms.last_store_done.has_value()};
    NodeId n = graph_.add_node(ld, "fromThreadOrMem<" + e.name + ">");
    Val b = materialize(base);
    Val en = materialize(enable);
    graph_.connect(b.node, b.port, n, 0);
    graph_.connect(en.node, en.port, n, 1);
    wire_load_order(ms, n, order_port(graph_.node(n).kind));
    ms.loads_since.emplace_back(n, 1);
    ++intrinsic_count_;
    return Val::port_of(n, 0, arrays_.at(e.name).type);
  }

  // ---- expressions ----
  std::map<std::string, Scalar> symbols() const {
    std::map<std::string, Scalar> s = consts_;
    for (const auto& scope : scopes_)
      for (const auto& [name, v] : scope)
        if (loop_vars_.count(name) && v.is_const) s[name] = v.c;
    return s;
  }

  const Val* find_var(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  Val expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Val::constant(Scalar::of_int(e.ival));
      case ExprKind::FloatLit: return Val::constant(Scalar::of_float(e.fval));
      case ExprKind::BlockDim: return Val::constant(Scalar::of_int(space_.extent(e.dim)));
      case ExprKind::ThreadIdx: return thread_coord(e.dim);
      case ExprKind::Var: {
        if (const Val* v = find_var(e.name)) return *v;
        auto it = consts_.find(e.name);
        if (it != consts_.end()) return Val::constant(it->second);
        throw LowerError(where(e.loc) + "undeclared variable '" + e.name + "'");
      }
      case ExprKind::Index: return load(e);
      case ExprKind::Unary: return unary(e.op, expr(*e.args[0]), e.loc);
      case ExprKind::Binary: {
        Val a = expr(*e.args[0]);
        Val b = expr(*e.args[1]);
        return binary(e.op, a, b, e.loc);
      }
      case ExprKind::Ternary: {
        Val c = expr(*e.args[0]);
        Val a = expr(*e.args[1]);
        Val b = expr(*e.args[2]);
        return select(c, a, b);
      }
      case ExprKind::Call: {
        Val a = expr(*e.args[0]);
        Val b = e.args.size() > 1 ? expr(*e.args[1]) : a;
        auto t = typing::call_operand_type(e.name, a.type, b.type);
        a = convert(a, t);
        b = convert(b, t);
        if (e.name == "float" || e.name == "int") return a;
        Opcode op = typing::call_opcode(e.name);
        if (op == Opcode::Min || op == Opcode::Max) return binary(op, a, b, e.loc);
        if (op == Opcode::Abs) return unary(op, a, e.loc);
        return emit_op(FloatOp{op}, op, {a}, ScalarKind::Float);
      }
      case ExprKind::FromThreadOrConst: return from_thread_or_const(e);
      case ExprKind::FromThreadOrMem: return from_thread_or_mem(e);
    }
    throw LowerError(where(e.loc) + "unsupported expression");
  }

  // ---- statements ----
  void assign(const std::string& name, Val v, const SourceLoc& loc) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) {
        f->second = convert(v, decl_types_.at(name));
        return;
      }
    }
    throw LowerError(where(loc) + "undeclared variable '" + name + "'");
  }

  void block(const std::vector<StmtPtr>& body) {
    scopes_.emplace_back();
    for (const auto& s : body) stmt(*s);
    scopes_.pop_back();
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl:
        scopes_.back()[s.name] = convert(expr(*s.value), s.type);
        return;
      case StmtKind::Assign:
        assign(s.name, expr(*s.value), s.loc);
        return;
      case StmtKind::Store:
        store(s);
        return;
      case StmtKind::Block:
        block(s.body);
        return;
      case StmtKind::TagValue: {
        no_divergence(s.loc, "tagValue");
        const Val* v = find_var(s.name);
        if (!v) throw LowerError(where(s.loc) + "undeclared variable '" + s.name + "'");
        if (!tags_.emplace(s.name, *v).second)
          throw LowerError(where(s.loc) + "variable '" + s.name + "' has multiple reaching definitions at tag point");
        return;
      }
      case StmtKind::If:
        if_stmt(s);
        return;
      case StmtKind::For:
        for_stmt(s);
        return;
    }
  }

  void if_stmt(const Stmt& s) {
    Val cond = expr(*s.value);
    if (cond.is_const) {
      if (cond.c.truthy()) block(s.body);
      else if (s.has_else) block(s.else_body);
      return;
    }
    const Val outer_pred = pred_;
    const auto saved = scopes_;
    Val not_cond = unary(Opcode::LogNot, cond, s.loc);

    pred_ = and_pred(cond);
    block(s.body);
    const auto then_scopes = scopes_;

    scopes_ = saved;
    pred_ = and_pred_from(outer_pred, not_cond);
    if (s.has_else) block(s.else_body);
    const auto else_scopes = scopes_;
    pred_ = outer_pred;

    scopes_ = saved;
    for (std::size_t i = 0; i < scopes_.size(); ++i)
      for (auto& [name, v] : scopes_[i]) {
        const Val& t = then_scopes[i].at(name);
        const Val& f = else_scopes[i].at(name);
        v = t.same(f) ? t : convert(select(cond, t, f), decl_types_.count(name) ? decl_types_.at(name) : t.type);
      }
  }

  Val and_pred_from(const Val& outer, const Val& cond) {
    Val saved = pred_;
    pred_ = outer;
    Val r = and_pred(cond);
    pred_ = saved;
    return r;
  }

  void for_stmt(const Stmt& s) {
    auto syms = symbols();
    ConstEval ev(space_, syms);
    std::int64_t i = ev.eval_int(*s.init, "loop bound");
    const std::int64_t limit = ev.eval_int(*s.limit, "loop bound");
    const std::int64_t step = ev.eval_int(*s.step, "loop step");
    std::int64_t trips = 0;
    auto holds = [&](std::int64_t v) {
      Scalar args[2] = {Scalar::of_int(v), Scalar::of_int(limit)};
      return apply_opcode(s.cmp, args, 2).truthy();
    };
    loop_vars_.insert(s.name);
    while (holds(i)) {
      if (++trips > kMaxTrips) throw LowerError(where(s.loc) + "loop trip count exceeds " + std::to_string(kMaxTrips));
      scopes_.emplace_back();
      scopes_.back()[s.name] = Val::constant(Scalar::of_int(i));
      block(s.body);
      scopes_.pop_back();
      i += step;
    }
    loop_vars_.erase(s.name);
  }

  static constexpr std::int64_t kMaxTrips = 1 << 16;

  const KernelAST& kernel_;
  ThreadSpace space_;
  DataflowGraph graph_;
  std::map<std::string, Scalar> consts_;
  std::map<std::string, ArrayDecl> arrays_;
  std::map<std::string, std::vector<std::int64_t>> array_dims_;
  std::map<std::string, ScalarKind> decl_types_;
  std::set<std::string> conflicting_types_;
  std::set<std::string> loop_vars_;
  std::vector<Scope> scopes_;
  Val pred_ = Val::constant(Scalar::of_int(1));
  std::map<std::pair<ScalarKind, std::int64_t>, NodeId> const_nodes_;
  std::map<int, NodeId> tid_nodes_;
  std::map<std::tuple<std::size_t, int, std::vector<std::pair<NodeId, int>>>, NodeId> cse_;
  std::map<std::string, MemState> mem_;
  std::map<std::string, Val> tags_;
  std::vector<PendingComm> pending_;
  std::size_t intrinsic_count_ = 0;
  std::int32_t next_comm_ = 0;
};

}  // namespace

std::map<std::string, Scalar> resolve_consts(const ast::KernelAST& kernel, const ThreadSpace& space,
                                             const Defines& defines) {
  return eval_consts(kernel, space, defines);
}

std::vector<ArrayDecl> resolve_arrays(const ast::KernelAST& k, const ThreadSpace& space, const Defines& defines) {
  auto consts = eval_consts(k, space, defines);
  ConstEval ev(space, consts);
  std::vector<ArrayDecl> out;
  for (const auto& a : k.arrays) {
    std::int64_t extent = 1;
    for (const auto& d : a.dims) {
      auto v = ev.eval_int(*d, "array extent");
      if (v < 1) throw LowerError(where(a.loc) + "array '" + a.name + "' has non-positive extent");
      extent *= v;
    }
    out.push_back(ArrayDecl{a.name, a.type, extent});
  }
  return out;
}

DataflowGraph lower(const ast::KernelAST& kernel, const ThreadSpace& space, const Defines& defines) {
  return Lowerer(kernel, space, defines).run();
}

}  // namespace dmt
